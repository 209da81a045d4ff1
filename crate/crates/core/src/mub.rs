//! Measurements, MUB pair constructions and their figures of merit.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qla::{
    eig_hermitian, operator_norm, psd_sqrt, validate_povm, CMatrix, CVector, LinalgError,
    DEFAULT_TOL,
};

#[derive(Debug, Error)]
pub enum MubError {
    #[error("effects do not form a POVM")]
    NotPovm,

    #[error("measurement dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),

    #[error("measurement is not rank-1 projective")]
    NotProjective,

    #[error("pair is not mutually unbiased")]
    NotUnbiased,

    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("effect {index} has {len} entries, expected {expected}")]
    MalformedEffect {
        index: usize,
        len: usize,
        expected: usize,
    },

    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, MubError>;

/// A d-outcome POVM. Outcome `b` (0-based here, 1-based in files) maps to `effects[b]`.
#[derive(Debug, Clone)]
pub struct Measurement {
    dim: usize,
    effects: Vec<CMatrix>,
    basis: Option<Vec<CVector>>,
}

impl Measurement {
    pub fn new(effects: Vec<CMatrix>) -> Result<Self> {
        let dim = effects.first().map_or(0, CMatrix::dim);
        if effects.len() != dim || !validate_povm(&effects, DEFAULT_TOL)? {
            return Err(MubError::NotPovm);
        }
        Ok(Self {
            dim,
            effects,
            basis: None,
        })
    }

    /// Rank-1 projective measurement onto an orthonormal basis.
    ///
    /// The vectors themselves (phases included) are kept and returned by
    /// [`Measurement::basis_vectors`].
    pub fn from_basis(vectors: &[CVector]) -> Result<Self> {
        let mut m = Self::new(vectors.iter().map(CVector::projector).collect())?;
        m.basis = Some(vectors.to_vec());
        Ok(m)
    }

    /// Rank-1 projective measurement onto the columns of `m`.
    pub fn from_columns(m: &CMatrix) -> Result<Self> {
        let cols: Vec<CVector> = (0..m.dim()).map(|c| m.column(c)).collect();
        Self::from_basis(&cols)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn effect(&self, outcome: usize) -> &CMatrix {
        &self.effects[outcome]
    }

    /// Each effect replaced by `v·E + (1−v)·I/d`.
    pub fn depolarized(&self, visibility: f64) -> Self {
        let noise = CMatrix::identity(self.dim).scale((1.0 - visibility) / self.dim as f64);
        let effects = self
            .effects
            .iter()
            .map(|e| &e.scale(visibility) + &noise)
            .collect();
        Self {
            dim: self.dim,
            effects,
            basis: None,
        }
    }

    /// Applies `U E U†` to every effect.
    pub fn rotated(&self, u: &CMatrix) -> Self {
        let ud = u.adjoint();
        let effects = self.effects.iter().map(|e| &(u * e) * &ud).collect();
        let basis = self
            .basis
            .as_ref()
            .map(|vs| vs.iter().map(|v| u * v).collect());
        Self {
            dim: self.dim,
            effects,
            basis,
        }
    }

    pub fn is_rank_one_projective(&self, tol: f64) -> Result<bool> {
        for e in &self.effects {
            if (e.trace().re - 1.0).abs() > tol || (operator_norm(e)? - 1.0).abs() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Basis vectors `|e_b⟩` of a rank-1 projective measurement (top eigenvector of each effect).
    pub fn basis_vectors(&self) -> Result<Vec<CVector>> {
        if let Some(basis) = &self.basis {
            return Ok(basis.clone());
        }
        if !self.is_rank_one_projective(DEFAULT_TOL)? {
            return Err(MubError::NotProjective);
        }
        self.effects
            .iter()
            .map(|e| Ok(eig_hermitian(e)?.vectors.swap_remove(0)))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&MeasurementDoc::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<MeasurementDoc>(s)?.try_into()
    }
}

/// On-disk layout: `{dim, effects: [[[re, im], …], …]}`, each effect row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementDoc {
    pub dim: usize,
    pub effects: Vec<Vec<[f64; 2]>>,
}

impl From<&Measurement> for MeasurementDoc {
    fn from(m: &Measurement) -> Self {
        let effects = m
            .effects
            .iter()
            .map(|e| e.to_row_major().iter().map(|z| [z.re, z.im]).collect())
            .collect();
        Self {
            dim: m.dim,
            effects,
        }
    }
}

impl TryFrom<MeasurementDoc> for Measurement {
    type Error = MubError;

    fn try_from(doc: MeasurementDoc) -> Result<Self> {
        let expected = doc.dim * doc.dim;
        let mut effects = Vec::with_capacity(doc.effects.len());
        for (index, raw) in doc.effects.iter().enumerate() {
            if raw.len() != expected {
                return Err(MubError::MalformedEffect {
                    index,
                    len: raw.len(),
                    expected,
                });
            }
            let entries: Vec<Complex64> =
                raw.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            effects.push(CMatrix::from_row_major(&entries)?);
        }
        Measurement::new(effects)
    }
}

impl Serialize for Measurement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasurementDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Measurement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = MeasurementDoc::deserialize(d)?;
        Measurement::try_from(doc).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    PaperD4,
    Fourier,
    Custom,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MubPairDoc", into = "MubPairDoc")]
pub struct MubPair {
    first: Measurement,
    second: Measurement,
    construction: Construction,
}

#[derive(Serialize, Deserialize)]
struct MubPairDoc {
    construction: Construction,
    dim: usize,
    first: Measurement,
    second: Measurement,
}

impl TryFrom<MubPairDoc> for MubPair {
    type Error = MubError;
    fn try_from(doc: MubPairDoc) -> Result<Self> {
        let pair = MubPair::new(doc.first, doc.second, doc.construction)?;
        if pair.dim() != doc.dim {
            return Err(MubError::DimensionMismatch(doc.dim, pair.dim()));
        }
        Ok(pair)
    }
}

impl From<MubPair> for MubPairDoc {
    fn from(p: MubPair) -> Self {
        Self {
            construction: p.construction,
            dim: p.dim(),
            first: p.first,
            second: p.second,
        }
    }
}

impl MubPair {
    /// Named constructions must be mutually unbiased within 1e−9.
    pub fn new(
        first: Measurement,
        second: Measurement,
        construction: Construction,
    ) -> Result<Self> {
        if first.dim() != second.dim() {
            return Err(MubError::DimensionMismatch(first.dim(), second.dim()));
        }
        let pair = Self {
            first,
            second,
            construction,
        };
        if construction != Construction::Custom && !is_mutually_unbiased(&pair, DEFAULT_TOL)? {
            return Err(MubError::NotUnbiased);
        }
        Ok(pair)
    }

    pub fn custom(first: Measurement, second: Measurement) -> Result<Self> {
        Self::new(first, second, Construction::Custom)
    }

    pub fn dim(&self) -> usize {
        self.first.dim()
    }

    pub fn first(&self) -> &Measurement {
        &self.first
    }

    pub fn second(&self) -> &Measurement {
        &self.second
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    /// Measurement for Bob's input `y` (0 → first, 1 → second).
    pub fn measurement(&self, y: usize) -> &Measurement {
        if y == 0 {
            &self.first
        } else {
            &self.second
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Real 4×4 Hadamard/2 whose columns are the first basis of the experiment.
pub fn paper_basis_a() -> CMatrix {
    CMatrix::from_real_rows(&[
        &[0.5, 0.5, 0.5, 0.5],
        &[0.5, 0.5, -0.5, -0.5],
        &[0.5, -0.5, 0.5, -0.5],
        &[0.5, -0.5, -0.5, 0.5],
    ])
    .expect("4x4")
}

/// Second basis: the first row of [`paper_basis_a`] negated.
pub fn paper_basis_b() -> CMatrix {
    CMatrix::from_real_rows(&[
        &[-0.5, -0.5, -0.5, -0.5],
        &[0.5, 0.5, -0.5, -0.5],
        &[0.5, -0.5, 0.5, -0.5],
        &[0.5, -0.5, -0.5, 0.5],
    ])
    .expect("4x4")
}

/// The d = 4 pair realised with phase modulation only.
pub fn paper_mub_pair_d4() -> MubPair {
    let first = Measurement::from_columns(&paper_basis_a()).expect("orthonormal columns");
    let second = Measurement::from_columns(&paper_basis_b()).expect("orthonormal columns");
    MubPair::new(first, second, Construction::PaperD4).expect("the d = 4 pair is unbiased")
}

/// Computational basis paired with the Fourier basis `(1/√d) Σ_k ω^{jk} |k⟩`.
pub fn fourier_mub_pair(d: usize) -> Result<MubPair> {
    if d < 2 {
        return Err(MubError::InvalidDimension(d));
    }
    let computational: Vec<CVector> = (0..d).map(|k| CVector::basis(d, k)).collect();
    let norm = 1.0 / (d as f64).sqrt();
    let fourier: Vec<CVector> = (0..d)
        .map(|j| {
            CVector::from_vec(
                (0..d)
                    .map(|k| {
                        Complex64::from_polar(norm, 2.0 * PI * ((j * k) % d) as f64 / d as f64)
                    })
                    .collect(),
            )
        })
        .collect();
    MubPair::new(
        Measurement::from_basis(&computational)?,
        Measurement::from_basis(&fourier)?,
        Construction::Fourier,
    )
}

/// `tr(A_i B_j)` for all outcome pairs, indexed `[i][j]`.
pub fn overlap_matrix(pair: &MubPair) -> Vec<Vec<f64>> {
    pair.first
        .effects()
        .iter()
        .map(|a| {
            pair.second
                .effects()
                .iter()
                .map(|b| (a * b).trace().re)
                .collect()
        })
        .collect()
}

/// `tr(A_i B_j) = 1/d` for every pair, both measurements rank-1 projective.
pub fn is_mutually_unbiased(pair: &MubPair, tol: f64) -> Result<bool> {
    if !pair.first.is_rank_one_projective(tol)? || !pair.second.is_rank_one_projective(tol)? {
        return Err(MubError::NotProjective);
    }
    let target = 1.0 / pair.dim() as f64;
    Ok(overlap_matrix(pair)
        .iter()
        .flatten()
        .all(|&t| (t - target).abs() <= tol))
}

/// Rényi-½ entropy (bits) of `{tr(A_i B_j)/d}`.
pub fn overlap_entropy(pair: &MubPair) -> f64 {
    let d = pair.dim() as f64;
    let root_sum: f64 = overlap_matrix(pair)
        .iter()
        .flatten()
        .map(|&t| (t / d).max(0.0).sqrt())
        .sum();
    2.0 * root_sum.log2()
}

/// `Σ_b ‖E_b‖`.
pub fn norm_sum(m: &Measurement) -> Result<f64> {
    m.effects()
        .iter()
        .map(|e| operator_norm(e).map_err(MubError::from))
        .sum()
}

/// `max_{ij} ‖√A_i √B_j‖`.
pub fn s_max(pair: &MubPair) -> Result<f64> {
    let roots_a = pair
        .first
        .effects()
        .iter()
        .map(psd_sqrt)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let roots_b = pair
        .second
        .effects()
        .iter()
        .map(psd_sqrt)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut best: f64 = 0.0;
    for ra in &roots_a {
        for rb in &roots_b {
            best = best.max(operator_norm(&(ra * rb))?);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qla::test_util::random_unitary;

    const EPS: f64 = 1e-12;

    fn identical_pair(d: usize) -> MubPair {
        let m = fourier_mub_pair(d).unwrap().first().clone();
        MubPair::custom(m.clone(), m).unwrap()
    }

    #[test]
    fn d4_pair_columns() {
        let a = paper_basis_a().column(0);
        let b = paper_basis_b().column(0);
        for k in 0..4 {
            assert_eq!(a.get(k), Complex64::new(0.5, 0.0));
        }
        assert_eq!(b.get(0).re, -0.5);
        for k in 1..4 {
            assert_eq!(b.get(k).re, 0.5);
        }
    }

    #[test]
    fn d4_pair_overlaps_quarter() {
        let pair = paper_mub_pair_d4();
        for row in overlap_matrix(&pair) {
            for t in row {
                assert!((t - 0.25).abs() < EPS);
            }
        }
        assert!(is_mutually_unbiased(&pair, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn fourier_pairs() {
        let p2 = fourier_mub_pair(2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let plus = CVector::from_real(&[s, s]).projector();
        let minus = CVector::from_real(&[s, -s]).projector();
        assert!(p2.second().effect(0).max_abs_diff(&plus) < EPS);
        assert!(p2.second().effect(1).max_abs_diff(&minus) < EPS);

        let p3 = fourier_mub_pair(3).unwrap();
        for t in overlap_matrix(&p3).iter().flatten() {
            assert!((t - 1.0 / 3.0).abs() < EPS);
        }
        for d in 2..=8 {
            assert!(is_mutually_unbiased(&fourier_mub_pair(d).unwrap(), DEFAULT_TOL).unwrap());
        }
        assert!(matches!(
            fourier_mub_pair(1),
            Err(MubError::InvalidDimension(1))
        ));
    }

    #[test]
    fn same_basis_is_biased() {
        assert!(!is_mutually_unbiased(&identical_pair(2), DEFAULT_TOL).unwrap());
    }

    #[test]
    fn unbiasedness_requires_projective() {
        let pair = paper_mub_pair_d4();
        let noisy = MubPair::custom(pair.first().depolarized(0.9), pair.second().clone()).unwrap();
        assert!(matches!(
            is_mutually_unbiased(&noisy, DEFAULT_TOL),
            Err(MubError::NotProjective)
        ));
    }

    #[test]
    fn overlap_entropy_values() {
        assert!((overlap_entropy(&paper_mub_pair_d4()) - 4.0).abs() < EPS);
        assert!((overlap_entropy(&identical_pair(4)) - 2.0).abs() < EPS);
        assert!((overlap_entropy(&fourier_mub_pair(2).unwrap()) - 2.0).abs() < EPS);
    }

    #[test]
    fn norm_sum_values() {
        let pair = paper_mub_pair_d4();
        assert!((norm_sum(pair.first()).unwrap() - 4.0).abs() < 1e-10);
        let trivial = Measurement::new(vec![CMatrix::identity(4).scale(0.25); 4]).unwrap();
        assert!((norm_sum(&trivial).unwrap() - 1.0).abs() < 1e-12);
        let noisy = pair.first().depolarized(0.9);
        assert!((norm_sum(&noisy).unwrap() - 3.7).abs() < 1e-10);
    }

    #[test]
    fn s_max_values() {
        assert!((s_max(&paper_mub_pair_d4()).unwrap() - 0.5).abs() < 1e-10);
        assert!((s_max(&identical_pair(4)).unwrap() - 1.0).abs() < 1e-10);
        let want = 1.0 / 2f64.sqrt();
        assert!((s_max(&fourier_mub_pair(2).unwrap()).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn s_max_invariant_under_global_unitary() {
        for seed in 0..5 {
            let pair = fourier_mub_pair(4).unwrap();
            let noisy = MubPair::custom(
                pair.first().depolarized(0.8),
                pair.second().depolarized(0.95),
            )
            .unwrap();
            let u = random_unitary(4, 100 + seed);
            let rotated =
                MubPair::custom(noisy.first().rotated(&u), noisy.second().rotated(&u)).unwrap();
            let a = s_max(&noisy).unwrap();
            let b = s_max(&rotated).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn overlap_entropy_strictly_below_max_for_perturbed_pairs() {
        let pair = paper_mub_pair_d4();
        for seed in 0..5 {
            let u = random_unitary(4, 200 + seed);
            let rotated = pair.second().rotated(&u);
            let perturbed = MubPair::custom(pair.first().clone(), rotated).unwrap();
            let biased = !is_mutually_unbiased(&perturbed, 1e-6).unwrap();
            assert!(biased);
            assert!(overlap_entropy(&perturbed) < 4.0 - 1e-9);
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let pair = fourier_mub_pair(5).unwrap();
        let json = pair.to_json();
        let back = MubPair::from_json(&json).unwrap();
        assert_eq!(back.construction(), Construction::Fourier);
        for y in 0..2 {
            for (a, b) in pair
                .measurement(y)
                .effects()
                .iter()
                .zip(back.measurement(y).effects())
            {
                assert_eq!(a.to_row_major(), b.to_row_major());
            }
        }
        let m = Measurement::from_json(&pair.first().to_json()).unwrap();
        assert_eq!(m.dim(), 5);
    }

    #[test]
    fn json_rejects_invalid_povm() {
        let doc = r#"{"dim":2,"effects":[[[1,0],[0,0],[0,0],[1,0]],[[1,0],[0,0],[0,0],[1,0]]]}"#;
        assert!(matches!(
            Measurement::from_json(doc),
            Err(MubError::NotPovm)
        ));
        let short = r#"{"dim":2,"effects":[[[1,0]],[[1,0]]]}"#;
        assert!(matches!(
            Measurement::from_json(short),
            Err(MubError::MalformedEffect { .. })
        ));
    }
}
