//! Two-arm fringe visibility and drift calibration.
//!
//! With only arms `k` and `l` open, Bob's first detector sees the fringe
//! `P(θ) = (τ_k² + τ_l² + 2 τ_k τ_l Re(e^{iθ} c)) / (4 (τ_k² + τ_l²))`, where `θ`
//! is the scanned relative phase and `c = E[e^{i(r_l − r_k)}]` averages the
//! residual phase noise over the integration time. The detected rate adds
//! dark counts on top of `μ η P(θ)`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{InterferometerConfig, PhaseNoiseModel};
use super::noise::NoiseProcess;
use super::{PhotonicsError, Result, ARMS};

/// The six unordered arm pairs.
pub const ARM_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

const SCAN_POINTS: usize = 360;
const NOISE_SAMPLES: u64 = 20_000;
const NOISE_SAMPLES_PER_RELOCK: u64 = 200;
const CALIBRATION_STEPS: usize = 60;
const SIGMA_CEILING: f64 = 4.0;

fn noise_coherence(
    config: &InterferometerConfig,
    (k, l): (usize, usize),
    seed: u64,
    stream: u64,
) -> Result<Complex64> {
    if config.phase_noise.model == PhaseNoiseModel::None || config.phase_noise.sigma == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut noise = NoiseProcess::start(config, &mut rng)?;
    let stride = (config.stabilization.relock_interval / NOISE_SAMPLES_PER_RELOCK).max(1);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..NOISE_SAMPLES {
        let r = noise.residual_at(n * stride, config, &mut rng)?;
        sum += Complex64::from_polar(1.0, r[l] - r[k]);
    }
    Ok(sum / NOISE_SAMPLES as f64)
}

fn visibility_from_coherence(
    config: &InterferometerConfig,
    (k, l): (usize, usize),
    c: Complex64,
) -> f64 {
    let (tk, tl) = (config.tau[k], config.tau[l]);
    let norm = tk * tk + tl * tl;
    let rate = |theta: f64| {
        let p = (norm + 2.0 * tk * tl * (Complex64::from_polar(1.0, theta) * c).re) / (4.0 * norm);
        config.mu * config.det_efficiency * p + config.dark_count_prob
    };
    let (mut max, mut min) = (f64::NEG_INFINITY, f64::INFINITY);
    for n in 0..SCAN_POINTS {
        let r = rate(std::f64::consts::TAU * n as f64 / SCAN_POINTS as f64);
        max = max.max(r);
        min = min.min(r);
    }
    if max + min == 0.0 {
        0.0
    } else {
        (max - min) / (max + min)
    }
}

fn check_pair(config: &InterferometerConfig, (k, l): (usize, usize)) -> Result<()> {
    if k >= ARMS || l >= ARMS || k == l {
        return Err(PhotonicsError::InvalidArmPair(k, l));
    }
    if config.tau[k] == 0.0 && config.tau[l] == 0.0 {
        return Err(PhotonicsError::AllArmsBlocked);
    }
    Ok(())
}

/// Visibility `(max − min)/(max + min)` of the SPD₁ fringe between arms `k` and `l`.
pub fn fringe_visibility(
    config: &InterferometerConfig,
    arm_pair: (usize, usize),
    seed: u64,
) -> Result<f64> {
    config.validate()?;
    check_pair(config, arm_pair)?;
    let c = noise_coherence(config, arm_pair, seed, 0)?;
    Ok(visibility_from_coherence(config, arm_pair, c))
}

/// Fringe visibility averaged over all six arm pairs.
pub fn mean_fringe_visibility(config: &InterferometerConfig, seed: u64) -> Result<f64> {
    config.validate()?;
    let mut sum = 0.0;
    for (stream, &pair) in ARM_PAIRS.iter().enumerate() {
        check_pair(config, pair)?;
        let c = noise_coherence(config, pair, seed, stream as u64)?;
        sum += visibility_from_coherence(config, pair, c);
    }
    Ok(sum / ARM_PAIRS.len() as f64)
}

/// Noise sigma for which [`mean_fringe_visibility`] equals `target`.
///
/// The config's noise model is kept, or Gaussian drift is used when it is
/// `none`. Every evaluation reuses `seed`, so the search runs on a fixed set
/// of noise draws.
pub fn calibrate_drift_sigma(config: &InterferometerConfig, target: f64, seed: u64) -> Result<f64> {
    let model = match config.phase_noise.model {
        PhaseNoiseModel::None => PhaseNoiseModel::GaussianDrift,
        m => m,
    };
    let at = |sigma: f64| mean_fringe_visibility(&config.clone().with_noise(model, sigma), seed);
    let (mut lo, mut hi) = (0.0, SIGMA_CEILING);
    let (v_lo, v_hi) = (at(lo)?, at(hi)?);
    if !(target <= v_lo && target >= v_hi) {
        return Err(PhotonicsError::InvalidVisibilityTarget(target));
    }
    for _ in 0..CALIBRATION_STEPS {
        let mid = 0.5 * (lo + hi);
        if at(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
