//! Phase noise and the SPD₁ stabilization loop.
//!
//! The preparation phase in arm `k` is `φ^A_k = φ^n_k + φ^c_k + φ^s_k`
//! (noise + controller + state setting).

use std::f64::consts::{PI, TAU};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::config::{InterferometerConfig, PhaseNoiseModel};
use super::optics::{amplitudes, probabilities};
use super::{PhotonicsError, Result, ARMS};

const INITIAL_STEP: f64 = PI / 4.0;
const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseState {
    pub phi_n: [f64; ARMS],
    pub phi_c: [f64; ARMS],
    pub phi_s: [f64; ARMS],
    pub phi_b: [f64; ARMS],
}

impl PhaseState {
    /// `φ^n + φ^c + φ^s`, arm by arm.
    pub fn preparation_phases(&self) -> [f64; ARMS] {
        std::array::from_fn(|k| self.phi_n[k] + self.phi_c[k] + self.phi_s[k])
    }

    /// Uncompensated phase `φ^n + φ^c`.
    pub fn residual(&self) -> [f64; ARMS] {
        std::array::from_fn(|k| self.phi_n[k] + self.phi_c[k])
    }
}

/// SPD₁ click probability with all arms open, `φ^s = 0` and `φ^B = 0`.
pub fn spd1_probability(tau: &[f64; ARMS], residual: &[f64; ARMS]) -> f64 {
    amplitudes(tau, residual).map_or(0.0, |a| probabilities(&a, &[0.0; ARMS])[0])
}

/// Best SPD₁ probability reachable for the given transmissivities.
pub fn spd1_ceiling(tau: &[f64; ARMS]) -> f64 {
    spd1_probability(tau, &[0.0; ARMS])
}

/// Coordinate-wise hill climbing on `φ^c` until the SPD₁ probability reaches
/// `threshold × ceiling`. Arm 1 is the phase reference and is not moved.
pub fn stabilize_phases<R: Rng + ?Sized>(
    config: &InterferometerConfig,
    state: &PhaseState,
    rng: &mut R,
) -> Result<PhaseState> {
    let tau = &config.tau;
    let stab = &config.stabilization;
    let target = stab.threshold * spd1_ceiling(tau);
    let mut out = *state;
    out.phi_s = [0.0; ARMS];
    let objective = |phi_c: &[f64; ARMS]| {
        let residual: [f64; ARMS] = std::array::from_fn(|k| out.phi_n[k] + phi_c[k]);
        spd1_probability(tau, &residual)
    };

    let mut phi_c = out.phi_c;
    let mut best = objective(&phi_c);
    let mut step = INITIAL_STEP;
    let mut arms = [1, 2, 3];
    let mut iterations = 0;
    while best < target {
        if iterations >= stab.max_iterations || step < MIN_STEP {
            return Err(PhotonicsError::StabilizationFailed {
                probability: best,
                iterations,
            });
        }
        iterations += 1;
        arms.shuffle(rng);
        let mut improved = false;
        for &k in &arms {
            let first = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            for sign in [first, -first] {
                let mut trial = phi_c;
                trial[k] += sign * step;
                let value = objective(&trial);
                if value > best {
                    phi_c = trial;
                    best = value;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    out.phi_c = phi_c.map(|p| p.rem_euclid(TAU));
    Ok(out)
}

/// Time-ordered phase-noise process for one shard of pulses.
#[derive(Debug, Clone)]
pub(crate) struct NoiseProcess {
    model: PhaseNoiseModel,
    sigma: f64,
    state: PhaseState,
    last_pulse: u64,
    next_relock: u64,
    relock_interval: u64,
}

impl NoiseProcess {
    /// Draws the initial drift (random-walk model only) and locks it.
    pub fn start<R: Rng + ?Sized>(config: &InterferometerConfig, rng: &mut R) -> Result<Self> {
        let noise = config.phase_noise;
        let mut state = PhaseState::default();
        if noise.model == PhaseNoiseModel::RandomWalk {
            state.phi_n = std::array::from_fn(|_| rng.random_range(0.0..TAU));
            state = stabilize_phases(config, &state, rng)?;
        }
        let relock_interval = config.stabilization.relock_interval;
        Ok(Self {
            model: noise.model,
            sigma: noise.sigma,
            state,
            last_pulse: 0,
            next_relock: relock_interval,
            relock_interval,
        })
    }

    fn walk<R: Rng + ?Sized>(&mut self, pulses: u64, rng: &mut R) {
        if pulses == 0 || self.sigma == 0.0 {
            return;
        }
        let scale = self.sigma * (pulses as f64).sqrt();
        for phi in &mut self.state.phi_n {
            let z: f64 = rng.sample(StandardNormal);
            *phi += scale * z;
        }
    }

    /// Residual phase `φ^n + φ^c` at pulse `pulse` (non-decreasing between calls).
    pub fn residual_at<R: Rng + ?Sized>(
        &mut self,
        pulse: u64,
        config: &InterferometerConfig,
        rng: &mut R,
    ) -> Result<[f64; ARMS]> {
        match self.model {
            PhaseNoiseModel::None => Ok([0.0; ARMS]),
            PhaseNoiseModel::GaussianDrift => {
                let base = self.state.residual();
                Ok(std::array::from_fn(|k| {
                    let z: f64 = rng.sample(StandardNormal);
                    base[k] + self.sigma * z
                }))
            }
            PhaseNoiseModel::RandomWalk => {
                while self.next_relock <= pulse {
                    self.walk(self.next_relock - self.last_pulse, rng);
                    self.last_pulse = self.next_relock;
                    self.state = stabilize_phases(config, &self.state, rng)?;
                    self.next_relock += self.relock_interval;
                }
                self.walk(pulse - self.last_pulse, rng);
                self.last_pulse = pulse;
                Ok(self.state.residual())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn wrapped_offset(residual: &[f64; ARMS]) -> f64 {
        (1..ARMS)
            .map(|k| {
                let d = (residual[k] - residual[0]).rem_euclid(TAU);
                d.min(TAU - d)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn already_locked_needs_no_iterations() {
        let cfg = InterferometerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = stabilize_phases(&cfg, &PhaseState::default(), &mut rng).unwrap();
        assert_eq!(out.phi_c, [0.0; ARMS]);
        assert!((spd1_probability(&cfg.tau, &out.residual()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn locks_random_frozen_noise() {
        let cfg = InterferometerConfig::default();
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let state = PhaseState {
                phi_n: std::array::from_fn(|_| rng.random_range(0.0..TAU)),
                ..Default::default()
            };
            let out = stabilize_phases(&cfg, &state, &mut rng).unwrap();
            let p = spd1_probability(&cfg.tau, &out.residual());
            assert!(p >= 0.999, "seed {seed}: {p}");
            assert!(wrapped_offset(&out.residual()) < 0.1);
        }
    }

    #[test]
    fn threshold_is_relative_to_transmissivity_ceiling() {
        let cfg = InterferometerConfig {
            tau: [1.0, 0.9, 1.0, 0.8],
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let state = PhaseState {
            phi_n: [0.3, 2.0, -1.0, 0.5],
            ..Default::default()
        };
        let out = stabilize_phases(&cfg, &state, &mut rng).unwrap();
        let p = spd1_probability(&cfg.tau, &out.residual());
        assert!(p >= 0.999 * spd1_ceiling(&cfg.tau));
    }

    #[test]
    fn reports_failure_when_capped() {
        let mut cfg = InterferometerConfig::default();
        cfg.stabilization.max_iterations = 1;
        cfg.stabilization.threshold = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let state = PhaseState {
            phi_n: [0.0, 2.5, 1.0, -2.0],
            ..Default::default()
        };
        assert!(matches!(
            stabilize_phases(&cfg, &state, &mut rng),
            Err(PhotonicsError::StabilizationFailed { .. })
        ));
    }

    #[test]
    fn preparation_phase_is_sum_of_parts() {
        let s = PhaseState {
            phi_n: [0.1, 0.2, 0.3, 0.4],
            phi_c: [1.0, 1.0, 1.0, 1.0],
            phi_s: [0.0, PI, 0.0, PI],
            phi_b: [0.0; ARMS],
        };
        assert_eq!(s.preparation_phases(), [1.1, 1.2 + PI, 1.3, 1.4 + PI]);
    }

    #[test]
    fn random_walk_relocks() {
        let cfg = InterferometerConfig::default().with_noise(PhaseNoiseModel::RandomWalk, 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut noise = NoiseProcess::start(&cfg, &mut rng).unwrap();
        let r0 = noise.residual_at(0, &cfg, &mut rng).unwrap();
        assert!(spd1_probability(&cfg.tau, &r0) >= 0.999);
        // just past a relock the residual is small again even after long drift
        let r = noise
            .residual_at(5 * cfg.stabilization.relock_interval, &cfg, &mut rng)
            .unwrap();
        assert!(spd1_probability(&cfg.tau, &r) >= 0.999);
    }
}
