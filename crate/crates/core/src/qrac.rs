//! The 2^d → 1 quantum random access code.
//!
//! Alice receives two dits `(i, j)` and sends a d-dimensional state; Bob
//! receives a bit `y` and measures the first or second POVM of a pair. The
//! round succeeds when his outcome equals `i` (for `y = 0`) or `j` (for
//! `y = 1`). The average success probability (ASP) is
//!
//! ```text
//! p̄ = 1/(2d²) Σ_ij tr[ρ_ij (A_i + B_j)]
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counts::CountsTable;
use crate::mub::{is_mutually_unbiased, MubError, MubPair};
use crate::qla::{eig_hermitian, CMatrix, CVector, LinalgError, DEFAULT_TOL};

#[derive(Debug, Error)]
pub enum QracError {
    #[error("measurement pair is not a rank-1 MUB pair")]
    NotMub,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state ({i}, {j}) is not normalized")]
    NotNormalized { i: usize, j: usize },

    #[error("no detections for setting i={i}, j={j}, y={y} (1-based)")]
    EmptyCell { i: usize, j: usize, y: usize },

    #[error(transparent)]
    Mub(#[from] MubError),

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, QracError>;

/// One pure state per input pair `(i, j)`.
#[derive(Debug, Clone)]
pub struct EncodingTable {
    dim: usize,
    states: Vec<CVector>,
}

impl EncodingTable {
    /// `states` in row-major `(i, j)` order.
    pub fn new(dim: usize, states: Vec<CVector>) -> Result<Self> {
        if states.len() != dim * dim {
            return Err(QracError::DimensionMismatch {
                expected: dim * dim,
                found: states.len(),
            });
        }
        for (k, s) in states.iter().enumerate() {
            if s.dim() != dim {
                return Err(QracError::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            if !s.is_normalized(DEFAULT_TOL) {
                return Err(QracError::NotNormalized {
                    i: k / dim,
                    j: k % dim,
                });
            }
        }
        Ok(Self { dim, states })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self, i: usize, j: usize) -> &CVector {
        &self.states[i * self.dim + j]
    }

    pub fn states(&self) -> &[CVector] {
        &self.states
    }
}

/// Observed ASP with its one-sigma uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AspEstimate {
    pub value: f64,
    pub sigma: f64,
    /// `per_input[i][j][y]`: conditional success probability; empty when the
    /// estimate was supplied directly rather than computed from counts.
    pub per_input: Vec<Vec<[f64; 2]>>,
    pub n_rounds: u64,
}

impl AspEstimate {
    pub fn from_value(value: f64, sigma: f64) -> Self {
        Self {
            value,
            sigma,
            per_input: Vec::new(),
            n_rounds: 0,
        }
    }

    /// ASP restricted to one of Bob's inputs.
    pub fn per_measurement(&self, y: usize) -> Option<f64> {
        let n = self.per_input.iter().map(Vec::len).sum::<usize>();
        (n > 0).then(|| self.per_input.iter().flatten().map(|p| p[y]).sum::<f64>() / n as f64)
    }
}

/// The analytic optimum for a rank-1 MUB pair:
/// `|ψ_ij⟩ ∝ |a_i⟩ + e^{−i arg⟨a_i|b_j⟩} |b_j⟩`.
pub fn optimal_states(pair: &MubPair) -> Result<EncodingTable> {
    match is_mutually_unbiased(pair, DEFAULT_TOL) {
        Ok(true) => {}
        Ok(false) | Err(MubError::NotProjective) => return Err(QracError::NotMub),
        Err(e) => return Err(e.into()),
    }
    let a = pair.first().basis_vectors()?;
    let b = pair.second().basis_vectors()?;
    let d = pair.dim();
    let mut states = Vec::with_capacity(d * d);
    for ai in &a {
        for bj in &b {
            let overlap = ai.inner(bj);
            let phase = Complex64::from_polar(1.0, -overlap.arg());
            let psi = (ai + &bj.scale(phase))
                .normalized()
                .expect("unbiased vectors are never antiparallel");
            states.push(psi);
        }
    }
    EncodingTable::new(d, states)
}

/// ASP of pure encoding states against a measurement pair.
pub fn asp(enc: &EncodingTable, pair: &MubPair) -> Result<f64> {
    let rhos: Vec<CMatrix> = enc.states.iter().map(CVector::projector).collect();
    asp_for_density_matrices(&rhos, pair)
}

/// ASP for arbitrary (possibly mixed) states `ρ_ij`, row-major in `(i, j)`.
pub fn asp_for_density_matrices(rhos: &[CMatrix], pair: &MubPair) -> Result<f64> {
    let d = pair.dim();
    if rhos.len() != d * d {
        return Err(QracError::DimensionMismatch {
            expected: d * d,
            found: rhos.len(),
        });
    }
    if let Some(bad) = rhos.iter().find(|r| r.dim() != d) {
        return Err(QracError::DimensionMismatch {
            expected: d,
            found: bad.dim(),
        });
    }
    let mut total = 0.0;
    for i in 0..d {
        for j in 0..d {
            let rho = &rhos[i * d + j];
            let op = pair.first().effect(i) + pair.second().effect(j);
            total += (rho * &op).trace().re;
        }
    }
    Ok(total / (2.0 * (d * d) as f64))
}

/// `½(1 + 1/√d)`.
pub fn quantum_optimum(d: usize) -> f64 {
    0.5 * (1.0 + 1.0 / (d as f64).sqrt())
}

/// Exact optimum over all encodings for a fixed pair: each `ρ_ij` is the top
/// eigenvector of `A_i + B_j`, contributing `λ_max / (2d²)`.
pub fn brute_force_optimal_asp(pair: &MubPair) -> Result<(f64, EncodingTable)> {
    let d = pair.dim();
    let mut total = 0.0;
    let mut states = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let op = pair.first().effect(i) + pair.second().effect(j);
            let mut eig = eig_hermitian(&op)?;
            total += eig.max_value();
            states.push(eig.vectors.swap_remove(0));
        }
    }
    Ok((
        total / (2.0 * (d * d) as f64),
        EncodingTable::new(d, states)?,
    ))
}

/// ASP estimate from detection counts.
///
/// Each setting `(i, j, y)` contributes the ratio `c/(c+o)` of correct to
/// total detections; the ASP is their uniform average. Cells are treated as
/// independent Poisson variables (variance = count) and propagated to first
/// order, giving `Var[c/(c+o)] = c·o/(c+o)³` per setting.
pub fn estimate_asp(counts: &CountsTable) -> Result<AspEstimate> {
    let d = counts.dim();
    let mut per_input = vec![vec![[0.0; 2]; d]; d];
    let mut sum = 0.0;
    let mut variance = 0.0;
    for (i, row) in per_input.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            for (y, slot) in cell.iter_mut().enumerate() {
                let target = if y == 0 { i } else { j };
                let cells = counts.setting(i, j, y);
                let total: u64 = cells.iter().sum();
                if total == 0 {
                    return Err(QracError::EmptyCell {
                        i: i + 1,
                        j: j + 1,
                        y: y + 1,
                    });
                }
                let correct = cells[target] as f64;
                let total = total as f64;
                let other = total - correct;
                let ratio = correct / total;
                *slot = ratio;
                sum += ratio;
                variance += correct * other / total.powi(3);
            }
        }
    }
    let n = (2 * d * d) as f64;
    Ok(AspEstimate {
        value: sum / n,
        sigma: variance.sqrt() / n,
        per_input,
        n_rounds: counts.total(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::{fourier_mub_pair, paper_mub_pair_d4};

    fn identical_pair(d: usize) -> MubPair {
        let m = fourier_mub_pair(d).unwrap().first().clone();
        MubPair::custom(m.clone(), m).unwrap()
    }

    #[test]
    fn optimal_state_for_first_inputs() {
        let enc = optimal_states(&paper_mub_pair_d4()).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let want = CVector::from_real(&[0.0, s, s, s]);
        let psi = enc.state(0, 0);
        for k in 0..4 {
            assert!((psi.get(k) - want.get(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn optimal_states_have_one_zero_amplitude() {
        let enc = optimal_states(&paper_mub_pair_d4()).unwrap();
        let s = 1.0 / 3f64.sqrt();
        for psi in enc.states() {
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            let zeros = psi.entries().iter().filter(|z| z.norm() < 1e-12).count();
            let thirds = psi
                .entries()
                .iter()
                .filter(|z| (z.norm() - s).abs() < 1e-12)
                .count();
            assert_eq!((zeros, thirds), (1, 3));
        }
    }

    #[test]
    fn asp_values() {
        let pair = paper_mub_pair_d4();
        let enc = optimal_states(&pair).unwrap();
        assert!((asp(&enc, &pair).unwrap() - 0.75).abs() < 1e-12);

        let mixed = vec![CMatrix::identity(4).scale(0.25); 16];
        assert!((asp_for_density_matrices(&mixed, &pair).unwrap() - 0.25).abs() < 1e-12);

        let same = identical_pair(4);
        let (value, _) = brute_force_optimal_asp(&same).unwrap();
        assert!((value - 0.625).abs() < 1e-12);
    }

    #[test]
    fn optimal_states_require_mub() {
        assert!(matches!(
            optimal_states(&identical_pair(3)),
            Err(QracError::NotMub)
        ));
        let pair = paper_mub_pair_d4();
        let noisy = MubPair::custom(pair.first().depolarized(0.9), pair.second().clone()).unwrap();
        assert!(matches!(optimal_states(&noisy), Err(QracError::NotMub)));
    }

    #[test]
    fn quantum_optimum_values() {
        assert_eq!(quantum_optimum(4), 0.75);
        assert!((quantum_optimum(2) - 0.853_553_390_593_273_7).abs() < 1e-15);
        assert!((quantum_optimum(9) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn brute_force_matches_analytic_optimum() {
        let mut pairs = vec![paper_mub_pair_d4()];
        pairs.extend((2..=4).map(|d| fourier_mub_pair(d).unwrap()));
        for pair in pairs {
            let (oracle, _) = brute_force_optimal_asp(&pair).unwrap();
            let analytic = asp(&optimal_states(&pair).unwrap(), &pair).unwrap();
            assert!((oracle - analytic).abs() < 1e-10);
            assert!((oracle - quantum_optimum(pair.dim())).abs() < 1e-10);
        }
    }

    #[test]
    fn depolarizing_states_is_affine() {
        let pair = paper_mub_pair_d4();
        let enc = optimal_states(&pair).unwrap();
        let full = asp(&enc, &pair).unwrap();
        for eta in [0.0, 0.3, 0.77, 1.0] {
            let rhos: Vec<CMatrix> = enc
                .states()
                .iter()
                .map(|s| &s.projector().scale(eta) + &CMatrix::identity(4).scale((1.0 - eta) / 4.0))
                .collect();
            let got = asp_for_density_matrices(&rhos, &pair).unwrap();
            assert!((got - (eta * full + (1.0 - eta) / 4.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_checks() {
        let pair = paper_mub_pair_d4();
        let rhos = vec![CMatrix::identity(2).scale(0.5); 16];
        assert!(matches!(
            asp_for_density_matrices(&rhos, &pair),
            Err(QracError::DimensionMismatch { .. })
        ));
        let enc = optimal_states(&fourier_mub_pair(2).unwrap()).unwrap();
        assert!(asp(&enc, &pair).is_err());
        assert!(matches!(
            EncodingTable::new(2, vec![CVector::from_real(&[1.0, 1.0]); 4]),
            Err(QracError::NotNormalized { i: 0, j: 0 })
        ));
    }

    fn filled(d: usize, f: impl Fn(usize, usize, usize, usize) -> u64) -> CountsTable {
        let mut t = CountsTable::new(d);
        for i in 0..d {
            for j in 0..d {
                for y in 0..2 {
                    for b in 0..d {
                        t.set(i, j, y, b, f(i, j, y, b));
                    }
                }
            }
        }
        t
    }

    #[test]
    fn estimate_from_uniform_counts() {
        let est = estimate_asp(&filled(4, |_, _, _, _| 100)).unwrap();
        assert!((est.value - 0.25).abs() < 1e-15);
        assert_eq!(est.n_rounds, 100 * 128);
    }

    #[test]
    fn estimate_single_correct_round() {
        let t = filled(2, |i, j, y, b| u64::from(b == if y == 0 { i } else { j }));
        let est = estimate_asp(&t).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.sigma, 0.0);
        assert_eq!(est.per_input[1][0], [1.0, 1.0]);
    }

    #[test]
    fn estimate_rejects_empty_setting() {
        let mut t = filled(2, |_, _, _, _| 3);
        for b in 0..2 {
            t.set(1, 0, 1, b, 0);
        }
        assert!(matches!(
            estimate_asp(&t),
            Err(QracError::EmptyCell { i: 2, j: 1, y: 2 })
        ));
    }

    #[test]
    fn estimate_from_ideal_expected_counts() {
        // 10^6 counts per setting split as 3/4, 1/12, 1/12, 1/12
        let t = filled(4, |i, j, y, b| {
            let target = if y == 0 { i } else { j };
            if b == target {
                750_000
            } else {
                83_333
            }
        });
        let est = estimate_asp(&t).unwrap();
        assert!((est.value - 0.75).abs() < 2.0 * est.sigma);
        // σ for one setting: sqrt(c·o/T³), averaged over 32 settings
        let (c, o) = (750_000.0f64, 249_999.0f64);
        let one = (c * o / (c + o).powi(3)).sqrt();
        assert!((est.sigma - one / 32f64.sqrt()).abs() < 1e-12);
        assert_eq!(est.per_measurement(0), est.per_measurement(1));
    }
}
