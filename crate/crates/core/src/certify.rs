//! Self-testing certificates derived from an observed ASP.
//!
//! Given an ASP `p` in dimension `d` (write `x = 2p − 1`):
//!
//! | quantity | bound |
//! |---|---|
//! | overlap entropy `H_S(A,B)` | `≥ 2 log₂(d√d · x)` |
//! | norm sum `N(A)`, `N(B)` | `≥ d − (2+√2)/d · (1 − √(d³x² − (d²−1)))` |
//! | `s_max` | `≤ x + (1/d)√(d(d²−1)(1 − d x²))` |
//! | incompatibility robustness `η*` | `≤ [½d²(1+s) − N²/d] / [N² − d − (d−N)(d−N+1)]` |
//! | `H(A)_ρ + H(B)_ρ` | `≥ −2 log₂ s` |
//!
//! `η*` is evaluated at the certified extremes (`N` at its lower bound, `s` at
//! its upper bound). Uncertainties are first-order Gaussian propagation of
//! the ASP uncertainty.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qrac::{quantum_optimum, AspEstimate};

/// Slack allowed on `1 − d x²` before a point above `p̄_Q` is rejected.
const RADICAND_SLACK: f64 = 1e-12;
const MAX_FD_STEP: f64 = 1e-6;
const BISECTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundId {
    OverlapEntropy,
    NormSum,
    Smax,
    Incompatibility,
    Entropic,
}

impl BoundId {
    pub const ALL: [BoundId; 5] = [
        BoundId::OverlapEntropy,
        BoundId::NormSum,
        BoundId::Smax,
        BoundId::Incompatibility,
        BoundId::Entropic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::OverlapEntropy => "overlap_entropy",
            BoundId::NormSum => "norm_sum",
            BoundId::Smax => "smax",
            BoundId::Incompatibility => "incompatibility",
            BoundId::Entropic => "entropic",
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("{bound}: ASP {p} outside the admissible range")]
    OutOfRange { bound: BoundId, p: f64 },

    #[error("norm-sum bound needs p ≥ {threshold:.6}, got {p}")]
    BelowThreshold { p: f64, threshold: f64 },

    #[error("incompatibility bound denominator is {value:e} (must be positive)")]
    DenominatorNonpositive { value: f64 },

    #[error("{bound}: not applicable throughout [p − 3σ, p + 3σ] for p = {p}, σ = {sigma}")]
    BoundInapplicableInWindow { bound: BoundId, p: f64, sigma: f64 },

    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("sigma must be finite and non-negative, got {0}")]
    InvalidSigma(f64),
}

pub type Result<T> = std::result::Result<T, CertifyError>;

fn check_dim(d: usize) -> Result<f64> {
    if d < 2 {
        Err(CertifyError::InvalidDimension(d))
    } else {
        Ok(d as f64)
    }
}

fn check_asp(bound: BoundId, p: f64) -> Result<f64> {
    if p > 0.5 && p <= 1.0 {
        Ok(2.0 * p - 1.0)
    } else {
        Err(CertifyError::OutOfRange { bound, p })
    }
}

fn raw_overlap_entropy(p: f64, d: usize) -> Result<f64> {
    let df = check_dim(d)?;
    let x = check_asp(BoundId::OverlapEntropy, p)?;
    Ok(2.0 * (df * df.sqrt() * x).log2())
}

/// Lower bound on `H_S(A,B)` in bits, clamped below at 0.
pub fn bound_overlap_entropy(p: f64, d: usize) -> Result<f64> {
    Ok(raw_overlap_entropy(p, d)?.max(0.0))
}

/// Smallest ASP at which the norm-sum bound applies: `½(1 + √((d²−1)/d³))`.
pub fn norm_sum_threshold(d: usize) -> f64 {
    let df = d as f64;
    0.5 * (1.0 + ((df * df - 1.0) / (df * df * df)).sqrt())
}

/// Lower bound on `N(A)` (and `N(B)`).
pub fn bound_norm_sum(p: f64, d: usize) -> Result<f64> {
    let df = check_dim(d)?;
    let x = check_asp(BoundId::NormSum, p)?;
    let disc = df.powi(3) * x * x - (df * df - 1.0);
    if disc < -RADICAND_SLACK {
        return Err(CertifyError::BelowThreshold {
            p,
            threshold: norm_sum_threshold(d),
        });
    }
    Ok(df - (2.0 + 2f64.sqrt()) / df * (1.0 - disc.max(0.0).sqrt()))
}

/// Upper bound on `s_max = max_ij ‖√A_i √B_j‖`. Defined for `½ < p ≤ p̄_Q`.
pub fn bound_smax(p: f64, d: usize) -> Result<f64> {
    let df = check_dim(d)?;
    let x = check_asp(BoundId::Smax, p)?;
    let radicand = 1.0 - df * x * x;
    if radicand < -RADICAND_SLACK {
        return Err(CertifyError::OutOfRange {
            bound: BoundId::Smax,
            p,
        });
    }
    Ok(x + (df * (df * df - 1.0) * radicand.max(0.0)).sqrt() / df)
}

fn raw_incompatibility(norm_lower: f64, smax_upper: f64, d: usize) -> Result<f64> {
    let df = check_dim(d)?;
    let n = norm_lower;
    let denominator = n * n - df - (df - n) * (df - n + 1.0);
    if denominator <= 0.0 {
        return Err(CertifyError::DenominatorNonpositive { value: denominator });
    }
    Ok((0.5 * df * df * (1.0 + smax_upper) - n * n / df) / denominator)
}

/// Upper bound on the incompatibility robustness, capped at the trivial value 1.
pub fn bound_incompatibility(norm_lower: f64, smax_upper: f64, d: usize) -> Result<f64> {
    Ok(raw_incompatibility(norm_lower, smax_upper, d)?.min(1.0))
}

fn raw_entropic(p: f64, d: usize) -> Result<f64> {
    let s = bound_smax(p, d).map_err(|e| match e {
        CertifyError::OutOfRange { p, .. } => CertifyError::OutOfRange {
            bound: BoundId::Entropic,
            p,
        },
        other => other,
    })?;
    Ok(-2.0 * s.log2())
}

/// Lower bound on `H(A)_ρ + H(B)_ρ` in bits, clamped to `[0, log₂ d]`.
pub fn bound_entropic(p: f64, d: usize) -> Result<f64> {
    Ok(raw_entropic(p, d)?.clamp(0.0, (d as f64).log2()))
}

/// `η*` of an ideal MUB pair: `½(1 + 1/(√d + 1))`.
pub fn mub_incompat_value(d: usize) -> f64 {
    0.5 * (1.0 + 1.0 / ((d as f64).sqrt() + 1.0))
}

/// A bound as a function of the ASP alone.
pub fn evaluate(bound: BoundId, p: f64, d: usize) -> Result<f64> {
    match bound {
        BoundId::OverlapEntropy => bound_overlap_entropy(p, d),
        BoundId::NormSum => bound_norm_sum(p, d),
        BoundId::Smax => bound_smax(p, d),
        BoundId::Incompatibility => {
            bound_incompatibility(bound_norm_sum(p, d)?, bound_smax(p, d)?, d)
        }
        BoundId::Entropic => bound_entropic(p, d),
    }
}

/// `|df/dp| · σ` by central differences with step `min(σ, 1e−6)`.
///
/// The bound must be applicable at `p − 3σ`, `p` and `p + 3σ`.
pub fn propagate_error(bound: BoundId, p: f64, sigma: f64, d: usize) -> Result<f64> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(CertifyError::InvalidSigma(sigma));
    }
    evaluate(bound, p, d)?;
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let window_ok = [p - 3.0 * sigma, p + 3.0 * sigma]
        .iter()
        .all(|&q| evaluate(bound, q, d).is_ok());
    if !window_ok {
        return Err(CertifyError::BoundInapplicableInWindow { bound, p, sigma });
    }
    let h = sigma.min(MAX_FD_STEP);
    let slope = (evaluate(bound, p + h, d)? - evaluate(bound, p - h, d)?) / (2.0 * h);
    Ok(slope.abs() * sigma)
}

/// Largest one-sided change of the bound over `[p − σ, p + σ]`, with each end
/// pulled back (by bisection) to the edge of the bound's domain.
fn clipped_window_spread(bound: BoundId, p: f64, sigma: f64, d: usize) -> Result<f64> {
    let centre = evaluate(bound, p, d)?;
    let mut spread: f64 = 0.0;
    for dir in [-1.0, 1.0] {
        let mut q = p + dir * sigma;
        if evaluate(bound, q, d).is_err() {
            let (mut good, mut bad) = (p, q);
            while (bad - good).abs() > 1e-15 * p.abs().max(1.0) {
                let mid = 0.5 * (good + bad);
                if evaluate(bound, mid, d).is_ok() {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            q = good;
        }
        spread = spread.max((evaluate(bound, q, d)? - centre).abs());
    }
    Ok(spread)
}

/// A certified value with its propagated one-sigma uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    pub sigma: f64,
}

/// Values of each quantity for an ideal MUB pair in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealRefs {
    pub hs: f64,
    pub norm: f64,
    pub eta: f64,
    pub entropy: f64,
}

impl IdealRefs {
    pub fn for_dim(d: usize) -> Self {
        let df = d as f64;
        Self {
            hs: (df * df).log2(),
            norm: df,
            eta: mub_incompat_value(d),
            entropy: df.log2(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub d: usize,
    pub asp: AspEstimate,
    /// ASP the bounds were evaluated at (differs from `asp.value` only when clamped).
    pub effective_asp: f64,
    pub hs_lower: Option<BoundValue>,
    pub norm_sum_lower: Option<BoundValue>,
    pub smax_upper: Option<BoundValue>,
    pub incompat_upper: Option<BoundValue>,
    pub entropic_lower: Option<BoundValue>,
    pub ideal_refs: IdealRefs,
    /// `bound id → "ok"` or the reason the bound is not reported.
    pub applicability: BTreeMap<BoundId, String>,
    /// Clamps, caps and error-propagation fallbacks applied while building the report.
    pub notes: Vec<String>,
}

impl CertificateReport {
    pub fn bound(&self, id: BoundId) -> Option<BoundValue> {
        match id {
            BoundId::OverlapEntropy => self.hs_lower,
            BoundId::NormSum => self.norm_sum_lower,
            BoundId::Smax => self.smax_upper,
            BoundId::Incompatibility => self.incompat_upper,
            BoundId::Entropic => self.entropic_lower,
        }
    }

    fn slot(&mut self, id: BoundId) -> &mut Option<BoundValue> {
        match id {
            BoundId::OverlapEntropy => &mut self.hs_lower,
            BoundId::NormSum => &mut self.norm_sum_lower,
            BoundId::Smax => &mut self.smax_upper,
            BoundId::Incompatibility => &mut self.incompat_upper,
            BoundId::Entropic => &mut self.entropic_lower,
        }
    }

    pub fn is_applicable(&self, id: BoundId) -> bool {
        self.applicability.get(&id).is_some_and(|s| s == "ok")
    }

    /// Ideal MUB value of a quantity.
    pub fn ideal(&self, id: BoundId) -> f64 {
        match id {
            BoundId::OverlapEntropy => self.ideal_refs.hs,
            BoundId::NormSum => self.ideal_refs.norm,
            BoundId::Smax => 1.0 / (self.d as f64).sqrt(),
            BoundId::Incompatibility => self.ideal_refs.eta,
            BoundId::Entropic => self.ideal_refs.entropy,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Plain-text comparison of each bound with its ideal value.
    pub fn table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "d = {}   ASP = {:.6} ± {:.6}   (quantum optimum {:.6})\n",
            self.d,
            self.asp.value,
            self.asp.sigma,
            quantum_optimum(self.d)
        ));
        out.push_str(&format!(
            "{:<26} {:>12} {:>12} {:>12}\n",
            "quantity", "bound", "± sigma", "MUB value"
        ));
        for id in BoundId::ALL {
            let label = match id {
                BoundId::OverlapEntropy => "H_S(A,B) >=",
                BoundId::NormSum => "N(A) >=",
                BoundId::Smax => "s_max <=",
                BoundId::Incompatibility => "eta* <=",
                BoundId::Entropic => "H(A)+H(B) >=",
            };
            match self.bound(id) {
                Some(b) => out.push_str(&format!(
                    "{:<26} {:>12.6} {:>12.6} {:>12.6}\n",
                    label,
                    b.value,
                    b.sigma,
                    self.ideal(id)
                )),
                None => out.push_str(&format!(
                    "{:<26} {:>12} {:>12} {:>12.6}   ({})\n",
                    label,
                    "n/a",
                    "",
                    self.ideal(id),
                    self.applicability.get(&id).map_or("", String::as_str)
                )),
            }
        }
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        out
    }
}

/// Evaluates every certificate for an observed ASP. Never fails: a bound
/// whose precondition does not hold is omitted and its reason recorded.
pub fn full_certificate(asp: &AspEstimate, d: usize) -> CertificateReport {
    let mut report = CertificateReport {
        d,
        asp: asp.clone(),
        effective_asp: asp.value,
        hs_lower: None,
        norm_sum_lower: None,
        smax_upper: None,
        incompat_upper: None,
        entropic_lower: None,
        ideal_refs: IdealRefs::for_dim(d),
        applicability: BTreeMap::new(),
        notes: Vec::new(),
    };
    let sigma = if asp.sigma.is_finite() {
        asp.sigma.max(0.0)
    } else {
        0.0
    };
    let p_q = quantum_optimum(d);

    let blocker = if d < 2 {
        Some(format!("dimension must be at least 2, got {d}"))
    } else if !(asp.value > 0.5 && asp.value <= 1.0) {
        Some(format!("ASP {} outside (1/2, 1]", asp.value))
    } else if asp.value > p_q + 3.0 * sigma {
        Some(format!(
            "ASP {} exceeds the quantum optimum {p_q:.6} by more than 3 sigma",
            asp.value
        ))
    } else {
        None
    };
    if let Some(reason) = blocker {
        for id in BoundId::ALL {
            report.applicability.insert(id, reason.clone());
        }
        return report;
    }

    let p = if asp.value > p_q {
        report.notes.push(format!(
            "ASP {} above quantum optimum {p_q:.6} (within 3 sigma); clamped to the optimum",
            asp.value
        ));
        p_q
    } else {
        asp.value
    };
    report.effective_asp = p;

    for id in BoundId::ALL {
        let value = match evaluate(id, p, d) {
            Ok(v) => v,
            Err(e) => {
                report.applicability.insert(id, e.to_string());
                continue;
            }
        };
        let err = match propagate_error(id, p, sigma, d) {
            Ok(s) => s,
            Err(CertifyError::BoundInapplicableInWindow { .. }) => {
                report.notes.push(format!(
                    "{id}: domain edge within 3 sigma; uncertainty from the clipped ±1 sigma window"
                ));
                clipped_window_spread(id, p, sigma, d).unwrap_or(f64::NAN)
            }
            Err(e) => {
                report.applicability.insert(id, e.to_string());
                continue;
            }
        };
        *report.slot(id) = Some(BoundValue { value, sigma: err });
        report.applicability.insert(id, "ok".to_string());
    }

    if matches!(raw_overlap_entropy(p, d), Ok(v) if v < 0.0) {
        report.notes.push("overlap_entropy: clamped to 0".into());
    }
    if matches!(raw_entropic(p, d), Ok(v) if !(0.0..=(d as f64).log2()).contains(&v)) {
        report
            .notes
            .push(format!("entropic: clamped to [0, log2 {d}]"));
    }
    if let (Ok(n), Ok(s)) = (bound_norm_sum(p, d), bound_smax(p, d)) {
        if matches!(raw_incompatibility(n, s, d), Ok(v) if v > 1.0) {
            report
                .notes
                .push("incompatibility: capped at 1 (no incompatibility certified)".into());
        }
    }
    report
}

/// Smallest ASP at which the `η*` bound is applicable and below 1.
pub fn min_asp_for_nontrivial_eta(d: usize) -> f64 {
    let nontrivial = |p: f64| matches!(evaluate(BoundId::Incompatibility, p, d), Ok(v) if v < 1.0);
    let mut lo = norm_sum_threshold(d);
    let mut hi = quantum_optimum(d);
    if nontrivial(lo) {
        return lo;
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if nontrivial(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    const P_REFERENCE: f64 = 0.74924;

    #[test]
    fn overlap_entropy_bound_values() {
        assert!((bound_overlap_entropy(P_REFERENCE, 4).unwrap() - 3.99122).abs() < 5e-6);
        assert!((bound_overlap_entropy(0.75, 4).unwrap() - 4.0).abs() < 1e-12);
        let want = 2.0 * 1.6f64.log2();
        assert!((bound_overlap_entropy(0.6, 4).unwrap() - want).abs() < 1e-12);
        assert!(bound_overlap_entropy(0.5, 4).is_err());
        assert!(bound_overlap_entropy(1.01, 4).is_err());
        // 8·(2p−1) < 1 → clamped
        assert_eq!(bound_overlap_entropy(0.55, 4).unwrap(), 0.0);
    }

    #[test]
    fn norm_sum_bound_values() {
        assert!((bound_norm_sum(P_REFERENCE, 4).unwrap() - 3.95749).abs() < 5e-5);
        assert!((bound_norm_sum(0.75, 4).unwrap() - 4.0).abs() < 1e-12);
        let t = norm_sum_threshold(4);
        assert!((t - 0.742061).abs() < 1e-6);
        let at_threshold = bound_norm_sum(t, 4).unwrap();
        assert!((at_threshold - (4.0 - (2.0 + 2f64.sqrt()) / 4.0)).abs() < 1e-6);
        assert!(matches!(
            bound_norm_sum(0.70, 4),
            Err(CertifyError::BelowThreshold { .. })
        ));
    }

    #[test]
    fn smax_bound_values() {
        assert!((bound_smax(0.75, 4).unwrap() - 0.5).abs() < 1e-12);
        let s = bound_smax(P_REFERENCE, 4).unwrap();
        assert!((s - 0.64945).abs() < 2e-4, "{s}");
        let e = bound_entropic(P_REFERENCE, 4).unwrap();
        assert!((e + 2.0 * s.log2()).abs() < 1e-12);
        assert!(bound_smax(0.76, 4).is_err());
    }

    #[test]
    fn smax_accepts_optimum_in_every_dimension() {
        for d in 2..=8 {
            let s = bound_smax(quantum_optimum(d), d).unwrap();
            assert!((s - 1.0 / (d as f64).sqrt()).abs() < 1e-7, "d={d}");
        }
    }

    #[test]
    fn incompatibility_values() {
        let v = bound_incompatibility(4.0, 0.5, 4).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        assert!((mub_incompat_value(4) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(bound_incompatibility(4.0, 1.0, 4).unwrap(), 1.0);
        let n = bound_norm_sum(P_REFERENCE, 4).unwrap();
        let s = bound_smax(P_REFERENCE, 4).unwrap();
        assert!((bound_incompatibility(n, s, 4).unwrap() - 0.798757).abs() < 1e-3);
        assert!(matches!(
            bound_incompatibility(1.0, 0.5, 4),
            Err(CertifyError::DenominatorNonpositive { .. })
        ));
    }

    #[test]
    fn entropic_values() {
        assert!((bound_entropic(P_REFERENCE, 4).unwrap() - 1.24581).abs() < 1e-3);
        assert!((bound_entropic(0.75, 4).unwrap() - 2.0).abs() < 1e-12);
        for d in 2..=8 {
            let p = 0.5 + 0.5 / (d as f64).sqrt();
            let want = (d as f64).log2();
            // the s_max radicand vanishes here, so rounding in p is amplified by a square root
            assert!((bound_entropic(p, d).unwrap() - want).abs() < 1e-6, "d={d}");
        }
    }

    #[test]
    fn mub_incompat_decreases_to_half() {
        assert!((mub_incompat_value(2) - 0.707_106_781_186_547_5).abs() < 1e-12);
        let vals: Vec<f64> = (2..200).map(mub_incompat_value).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert!(vals.last().unwrap() - 0.5 < 0.04);
    }

    #[test]
    fn propagated_errors() {
        let hs = propagate_error(BoundId::OverlapEntropy, P_REFERENCE, 0.00011, 4).unwrap();
        let analytic = 4.0 / (std::f64::consts::LN_2 * (2.0 * P_REFERENCE - 1.0)) * 0.00011;
        assert!((hs - analytic).abs() < 1e-9);
        assert!((0.00127..=0.00131).contains(&hs));
        let n = propagate_error(BoundId::NormSum, P_REFERENCE, 0.00011, 4).unwrap();
        assert!((n - 0.0065).abs() < 3e-4);
        for id in BoundId::ALL {
            assert_eq!(propagate_error(id, P_REFERENCE, 0.0, 4).unwrap(), 0.0);
        }
    }

    #[test]
    fn propagation_window_and_sigma_checks() {
        assert!(matches!(
            propagate_error(BoundId::Smax, 0.7495, 0.001, 4),
            Err(CertifyError::BoundInapplicableInWindow { .. })
        ));
        assert!(matches!(
            propagate_error(BoundId::Smax, 0.7, -1.0, 4),
            Err(CertifyError::InvalidSigma(_))
        ));
    }

    #[test]
    fn certificate_at_optimum() {
        let r = full_certificate(&AspEstimate::from_value(0.75, 0.0), 4);
        let want = [4.0, 4.0, 0.5, 2.0 / 3.0, 2.0];
        for (id, w) in BoundId::ALL.into_iter().zip(want) {
            let b = r.bound(id).unwrap();
            assert!((b.value - w).abs() < 1e-10, "{id}");
            assert_eq!(b.sigma, 0.0);
        }
    }

    #[test]
    fn certificate_below_norm_threshold() {
        let r = full_certificate(&AspEstimate::from_value(0.70, 0.001), 4);
        assert!(r.hs_lower.is_some());
        assert!(r.entropic_lower.is_some());
        assert!(r.smax_upper.is_some());
        assert!(r.norm_sum_lower.is_none());
        assert!(r.incompat_upper.is_none());
        assert!(!r.is_applicable(BoundId::NormSum));
        assert!(r.applicability[&BoundId::NormSum].contains("0.742061"));
    }

    #[test]
    fn certificate_clamps_marginal_excess() {
        let r = full_certificate(&AspEstimate::from_value(0.751, 0.001), 4);
        assert_eq!(r.effective_asp, 0.75);
        assert!(r.notes.iter().any(|n| n.contains("clamped")));
        let hs = r.hs_lower.unwrap();
        assert!((hs.value - 4.0).abs() < 1e-12);
        assert!(hs.sigma > 0.0 && hs.sigma.is_finite());
        let s = r.smax_upper.unwrap();
        assert!(s.sigma > 0.0 && s.sigma.is_finite());

        let far = full_certificate(&AspEstimate::from_value(0.8, 0.001), 4);
        assert!(BoundId::ALL.iter().all(|&id| far.bound(id).is_none()));
        let low = full_certificate(&AspEstimate::from_value(0.4, 0.001), 4);
        assert!(low.applicability.values().all(|r| r.contains("outside")));
    }

    #[test]
    fn report_serializes_applicability_map() {
        let r = full_certificate(&AspEstimate::from_value(0.70, 0.001), 4);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["applicability"]["overlap_entropy"], "ok");
        assert!(v["norm_sum_lower"].is_null());
        assert_eq!(v["ideal_refs"]["hs"], 4.0);
        let back: CertificateReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn min_asp_for_eta() {
        let p = min_asp_for_nontrivial_eta(4);
        assert!(p > norm_sum_threshold(4) && p < 0.75);
        let eta = |q| evaluate(BoundId::Incompatibility, q, 4);
        assert!(matches!(eta(p + 1e-6), Ok(v) if v < 1.0));
        assert!(!matches!(eta(p - 1e-6), Ok(v) if v < 1.0));
        let p2 = min_asp_for_nontrivial_eta(2);
        assert!(p2.is_finite() && p2 < quantum_optimum(2));
    }
}
