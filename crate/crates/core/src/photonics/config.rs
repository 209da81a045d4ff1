use serde::{Deserialize, Serialize};

use super::{PhotonicsError, Result, ARMS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseNoiseModel {
    /// No phase noise at all.
    #[default]
    None,
    /// Independent zero-mean Gaussian jitter per arm and pulse around a locked point.
    GaussianDrift,
    /// Per-arm Gaussian random walk from a random start, re-locked periodically
    /// by the stabilization loop.
    RandomWalk,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseNoise {
    pub model: PhaseNoiseModel,
    /// Radians per pulse interval.
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilizationConfig {
    /// Required SPD₁ probability, relative to the best value the arm
    /// transmissivities allow.
    pub threshold: f64,
    pub max_iterations: usize,
    /// Pulses between re-locks under the random-walk model.
    pub relock_interval: u64,
}

impl Default for StabilizationConfig {
    fn default() -> Self {
        Self {
            threshold: 0.999,
            max_iterations: 10_000,
            relock_interval: 100_000,
        }
    }
}

/// Parameters of the four-core interferometer and its source and detectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterferometerConfig {
    /// Number of core modes; only 4 is supported.
    pub d: usize,
    /// Mean photon number per pulse.
    pub mu: f64,
    pub det_efficiency: f64,
    /// Pulses per second.
    pub rep_rate: f64,
    /// Seconds.
    pub integration_time: f64,
    pub phase_noise: PhaseNoise,
    /// Static per-arm transmissivities, multiplied into the prepared amplitudes.
    pub tau: [f64; ARMS],
    pub dark_count_prob: f64,
    pub stabilization: StabilizationConfig,
}

impl Default for InterferometerConfig {
    fn default() -> Self {
        Self {
            d: ARMS,
            mu: 0.2,
            det_efficiency: 0.10,
            rep_rate: 2e6,
            integration_time: 1.0,
            phase_noise: PhaseNoise::default(),
            tau: [1.0; ARMS],
            dark_count_prob: 0.0,
            stabilization: StabilizationConfig::default(),
        }
    }
}

fn is_probability(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl InterferometerConfig {
    pub fn with_noise(mut self, model: PhaseNoiseModel, sigma: f64) -> Self {
        self.phase_noise = PhaseNoise { model, sigma };
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(PhotonicsError::InvalidConfig(msg));
        if self.d != ARMS {
            return fail(format!("d must be {ARMS}, got {}", self.d));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return fail(format!("mu must be positive, got {}", self.mu));
        }
        if !is_probability(self.det_efficiency) {
            return fail(format!(
                "det_efficiency must lie in [0, 1], got {}",
                self.det_efficiency
            ));
        }
        if !is_probability(self.dark_count_prob) {
            return fail(format!(
                "dark_count_prob must lie in [0, 1], got {}",
                self.dark_count_prob
            ));
        }
        if !(self.rep_rate.is_finite() && self.rep_rate > 0.0) {
            return fail(format!("rep_rate must be positive, got {}", self.rep_rate));
        }
        if !(self.integration_time.is_finite() && self.integration_time > 0.0) {
            return fail(format!(
                "integration_time must be positive, got {}",
                self.integration_time
            ));
        }
        if let Some(t) = self.tau.iter().find(|t| !is_probability(**t)) {
            return fail(format!("tau entries must lie in [0, 1], got {t}"));
        }
        if self.tau.iter().all(|&t| t == 0.0) {
            return fail("all arms blocked (tau = 0)".into());
        }
        let sigma = self.phase_noise.sigma;
        if !(sigma.is_finite() && sigma >= 0.0) {
            return fail(format!(
                "phase_noise.sigma must be non-negative, got {sigma}"
            ));
        }
        let stab = &self.stabilization;
        if !(stab.threshold > 0.0 && stab.threshold <= 1.0) {
            return fail(format!(
                "stabilization.threshold must lie in (0, 1], got {}",
                stab.threshold
            ));
        }
        if stab.relock_interval == 0 {
            return fail("stabilization.relock_interval must be positive".into());
        }
        Ok(())
    }

    /// Pulses emitted over one integration window.
    pub fn pulses_per_run(&self) -> u64 {
        (self.rep_rate * self.integration_time).round() as u64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(s).map_err(|e| PhotonicsError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
