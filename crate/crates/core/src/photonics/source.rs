use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::{PhotonicsError, Result};

/// Attenuated laser: Poissonian photon number per pulse.
#[derive(Debug, Clone, Copy)]
pub struct PulseSource {
    poisson: Poisson<f64>,
}

impl PulseSource {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(PhotonicsError::InvalidMu(mu));
        }
        let poisson = Poisson::new(mu).map_err(|_| PhotonicsError::InvalidMu(mu))?;
        Ok(Self { poisson })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.poisson.sample(rng) as u64
    }
}

/// Photon number of one pulse with mean `mu`.
pub fn sample_source<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> Result<u64> {
    Ok(PulseSource::new(mu)?.sample(rng))
}

/// Survivors of `photons` independent detection attempts.
pub(crate) fn thin<R: Rng + ?Sized>(photons: u64, efficiency: f64, rng: &mut R) -> u64 {
    (0..photons).filter(|_| rng.random_bool(efficiency)).count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mean_matches_mu() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let src = PulseSource::new(0.2).unwrap();
        let n = 200_000;
        let total: u64 = (0..n).map(|_| src.sample(&mut rng)).sum();
        let mean = total as f64 / n as f64;
        let se = (0.2 / n as f64).sqrt();
        assert!((mean - 0.2).abs() < 4.0 * se);
    }

    #[test]
    fn rejects_bad_mu() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            sample_source(0.0, &mut rng),
            Err(PhotonicsError::InvalidMu(_))
        ));
        assert!(sample_source(f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn thinning_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(thin(5, 1.0, &mut rng), 5);
        assert_eq!(thin(5, 0.0, &mut rng), 0);
    }
}
