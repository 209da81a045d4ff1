//! Sharded prepare-and-measure simulation producing [`CountsTable`]s.
//!
//! Pulses are split into fixed-size shards. Shard `s` draws from a ChaCha8
//! stream `s` keyed by the master seed, so the merged table does not depend on
//! how many threads execute the shards or in which order they finish.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::InterferometerConfig;
use super::noise::NoiseProcess;
use super::optics::{amplitudes, measurement_phase_for_input, probabilities, settings_for_state};
use super::source::{thin, PulseSource};
use super::{PhotonicsError, Result, ARMS};
use crate::counts::{CountsMeta, CountsTable};
use crate::mub::paper_mub_pair_d4;
use crate::qrac::optimal_states;

/// Pulses per shard.
pub const SHARD_PULSES: u64 = 1 << 16;

const SETTINGS: usize = ARMS * ARMS * 2;
const SHARD_BATCH: u64 = 64;
const INTEGRALITY_TOL: f64 = 1e-6;
const INTEGRALITY_SEARCH: u64 = 4096;

#[derive(Debug, Clone, Copy)]
struct Setting {
    i: usize,
    j: usize,
    y: usize,
    tau: [f64; ARMS],
    phi_s: [f64; ARMS],
    phi_b: [f64; ARMS],
}

fn settings() -> [Setting; SETTINGS] {
    let enc = optimal_states(&paper_mub_pair_d4()).expect("the d = 4 pair is unbiased");
    std::array::from_fn(|s| {
        let (i, j, y) = (s / (2 * ARMS), (s / 2) % ARMS, s % 2);
        let (tau, phi_s) = settings_for_state(enc.state(i, j)).expect("four-dimensional state");
        let phi_b = measurement_phase_for_input(y).expect("y is 0 or 1");
        Setting {
            i,
            j,
            y,
            tau,
            phi_s,
            phi_b,
        }
    })
}

/// Noise-free outcome distribution of every setting, indexed by `(i·d + j)·2 + y`.
pub fn ideal_setting_probabilities() -> [[f64; ARMS]; SETTINGS] {
    settings().map(|s| {
        let amps = amplitudes(&s.tau, &s.phi_s).expect("every state has an open arm");
        probabilities(&amps, &s.phi_b)
    })
}

struct Simulator<'a> {
    config: &'a InterferometerConfig,
    source: PulseSource,
    settings: [Setting; SETTINGS],
    seed: u64,
}

struct ShardResult {
    counts: CountsTable,
    detections: u64,
}

fn categorical<R: Rng + ?Sized>(p: &[f64; ARMS], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &pk) in p.iter().enumerate() {
        acc += pk;
        if u < acc {
            return k;
        }
    }
    p.iter().rposition(|&pk| pk > 0.0).unwrap_or(ARMS - 1)
}

impl<'a> Simulator<'a> {
    fn new(config: &'a InterferometerConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            source: PulseSource::new(config.mu)?,
            settings: settings(),
            seed,
        })
    }

    fn detection_possible(&self) -> bool {
        self.config.det_efficiency > 0.0 || self.config.dark_count_prob > 0.0
    }

    /// Runs `pulses` pulses of shard `shard`, stopping early once `stop_after`
    /// detections have been recorded.
    fn run_shard(&self, shard: u64, pulses: u64, stop_after: Option<u64>) -> Result<ShardResult> {
        let cfg = self.config;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(shard);
        let mut noise = NoiseProcess::start(cfg, &mut rng)?;
        let mut counts = CountsTable::new(ARMS);
        let mut detections = 0u64;
        let limit = stop_after.unwrap_or(u64::MAX);

        'pulses: for pulse in 0..pulses {
            let s = &self.settings[rng.random_range(0..SETTINGS)];
            let photons = self.source.sample(&mut rng);
            let detected = thin(photons, cfg.det_efficiency, &mut rng);
            let mut clicks = [0u64; ARMS];
            if detected > 0 {
                let residual = noise.residual_at(pulse, cfg, &mut rng)?;
                let tau: [f64; ARMS] = std::array::from_fn(|k| s.tau[k] * cfg.tau[k]);
                let phases: [f64; ARMS] = std::array::from_fn(|k| s.phi_s[k] + residual[k]);
                if let Some(amps) = amplitudes(&tau, &phases) {
                    let p = probabilities(&amps, &s.phi_b);
                    for _ in 0..detected {
                        clicks[categorical(&p, &mut rng)] += 1;
                    }
                }
            }
            if cfg.dark_count_prob > 0.0 {
                for c in &mut clicks {
                    if rng.random_bool(cfg.dark_count_prob) {
                        *c += 1;
                    }
                }
            }
            for (outcome, &c) in clicks.iter().enumerate() {
                let c = c.min(limit - detections);
                counts.add(s.i, s.j, s.y, outcome, c);
                detections += c;
                if detections == limit {
                    break 'pulses;
                }
            }
        }
        counts.meta = Some(CountsMeta {
            seed: self.seed,
            config: Some(cfg.clone()),
        });
        Ok(ShardResult { counts, detections })
    }

    fn run_shards(
        &self,
        shards: std::ops::Range<u64>,
        total_pulses: u64,
    ) -> Result<Vec<ShardResult>> {
        let job = |shard: u64| {
            let pulses = (total_pulses - shard * SHARD_PULSES).min(SHARD_PULSES);
            self.run_shard(shard, pulses, None)
        };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            shards.into_par_iter().map(job).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            shards.map(job).collect()
        }
    }

    fn merge(&self, results: &[ShardResult]) -> CountsTable {
        let mut table = CountsTable::new(ARMS);
        for r in results {
            table.merge(&r.counts).expect("same dimension");
        }
        table.meta = Some(CountsMeta {
            seed: self.seed,
            config: Some(self.config.clone()),
        });
        table
    }
}

/// Simulates exactly `pulses` source pulses.
pub fn simulate_pulses(
    config: &InterferometerConfig,
    pulses: u64,
    seed: u64,
) -> Result<CountsTable> {
    let sim = Simulator::new(config, seed)?;
    let shards = pulses.div_ceil(SHARD_PULSES);
    let results = sim.run_shards(0..shards, pulses)?;
    Ok(sim.merge(&results))
}

/// Simulates `32 · rounds_per_setting` pulses, so each (i, j, y) setting is
/// drawn `rounds_per_setting` times on average.
pub fn simulate_counts(
    config: &InterferometerConfig,
    rounds_per_setting: u64,
    seed: u64,
) -> Result<CountsTable> {
    simulate_pulses(config, rounds_per_setting * SETTINGS as u64, seed)
}

/// Runs pulses until exactly `detections` detector clicks have been recorded.
pub fn simulate_detections(
    config: &InterferometerConfig,
    detections: u64,
    seed: u64,
) -> Result<CountsTable> {
    let sim = Simulator::new(config, seed)?;
    if !sim.detection_possible() {
        return Err(PhotonicsError::NoDetectionPossible);
    }
    let mut kept: Vec<ShardResult> = Vec::new();
    let mut recorded = 0u64;
    let mut next = 0u64;
    while recorded < detections {
        let batch = sim.run_shards(next..next + SHARD_BATCH, u64::MAX)?;
        for (offset, r) in batch.into_iter().enumerate() {
            let remaining = detections - recorded;
            if r.detections >= remaining {
                let last = sim.run_shard(next + offset as u64, SHARD_PULSES, Some(remaining))?;
                recorded += last.detections;
                kept.push(last);
                break;
            }
            recorded += r.detections;
            kept.push(r);
        }
        next += SHARD_BATCH;
    }
    Ok(sim.merge(&kept))
}

/// Expected counts of the noise-free experiment with about `total` detections.
///
/// Every setting receives the same number of detections `n`, chosen as the
/// integer closest to `total / 32` for which all `n · P(outcome)` are whole
/// numbers, so the table carries no rounding error. If no such `n` exists
/// nearby, each cell is rounded independently.
pub fn ideal_counts(total: u64) -> CountsTable {
    let probs = ideal_setting_probabilities();
    let target = (total as f64 / SETTINGS as f64).round().max(1.0) as u64;
    let integral = |n: u64| {
        probs.iter().flatten().all(|&p| {
            let x = n as f64 * p;
            (x - x.round()).abs() < INTEGRALITY_TOL
        })
    };
    let n = (0..=INTEGRALITY_SEARCH)
        .flat_map(|delta| [target.checked_sub(delta), target.checked_add(delta)])
        .flatten()
        .find(|&n| n > 0 && integral(n))
        .unwrap_or(target);

    let mut table = CountsTable::new(ARMS);
    for (s, p) in settings().iter().zip(&probs) {
        for (outcome, &pk) in p.iter().enumerate() {
            table.set(s.i, s.j, s.y, outcome, (n as f64 * pk).round() as u64);
        }
    }
    table
}
