//! Ideal optical elements of the path-encoded ququart interferometer.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{PhotonicsError, Result, ARMS};
use crate::mub::paper_basis_a;
use crate::qla::{CMatrix, CVector};

pub type Amplitudes = [Complex64; ARMS];

/// Sign pattern of the 4×4 Hadamard (entries ×½).
const HADAMARD_SIGNS: [[f64; ARMS]; ARMS] = [
    [1.0, 1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, 1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
];

/// The multi-port beam splitter: a real symmetric Hadamard/2.
pub fn mbs_matrix() -> CMatrix {
    paper_basis_a()
}

/// Normalized `Σ_k τ_k e^{iφ_k} |k⟩`, or `None` when every arm is blocked.
pub(crate) fn amplitudes(tau: &[f64; ARMS], phases: &[f64; ARMS]) -> Option<Amplitudes> {
    let norm_sq: f64 = tau.iter().map(|t| t * t).sum();
    if norm_sq <= 0.0 {
        return None;
    }
    let scale = norm_sq.sqrt().recip();
    Some(std::array::from_fn(|k| {
        Complex64::from_polar(tau[k] * scale, phases[k])
    }))
}

/// Path-encoded state prepared with transmissivities `tau` and phases `phases`.
pub fn prepare_state(tau: &[f64; ARMS], phases: &[f64; ARMS]) -> Result<CVector> {
    amplitudes(tau, phases)
        .map(|a| CVector::from_vec(a.to_vec()))
        .ok_or(PhotonicsError::AllArmsBlocked)
}

/// `MBS · diag(e^{−iφ^B})`: phases are applied before the beam splitter, so
/// row `k` is `⟨α_k|` with `|α_k⟩ = ½ Σ_m ±e^{iφ^B_m} |m⟩`.
pub fn measurement_unitary(phi_b: &[f64; ARMS]) -> CMatrix {
    CMatrix::from_fn(ARMS, |k, m| {
        Complex64::from_polar(0.5 * HADAMARD_SIGNS[k][m], -phi_b[m])
    })
}

pub(crate) fn probabilities(amps: &Amplitudes, phi_b: &[f64; ARMS]) -> [f64; ARMS] {
    let shifted: Amplitudes =
        std::array::from_fn(|m| amps[m] * Complex64::from_polar(1.0, -phi_b[m]));
    std::array::from_fn(|k| {
        let out: Complex64 = (0..ARMS).map(|m| shifted[m] * HADAMARD_SIGNS[k][m]).sum();
        (out * 0.5).norm_sqr()
    })
}

/// `P_k = |⟨α_k|ψ⟩|²` for detector `k`.
pub fn detection_probabilities(state: &CVector, phi_b: &[f64; ARMS]) -> Result<[f64; ARMS]> {
    if state.dim() != ARMS {
        return Err(PhotonicsError::DimensionMismatch(state.dim()));
    }
    let amps: Amplitudes = std::array::from_fn(|k| state.get(k));
    Ok(probabilities(&amps, phi_b))
}

/// Modulator settings reproducing `target` up to a global phase.
/// Transmissivities are scaled so the largest is 1; blocked arms get phase 0.
pub fn settings_for_state(target: &CVector) -> Result<([f64; ARMS], [f64; ARMS])> {
    if target.dim() != ARMS {
        return Err(PhotonicsError::DimensionMismatch(target.dim()));
    }
    let max = target
        .entries()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if max == 0.0 {
        return Err(PhotonicsError::AllArmsBlocked);
    }
    let mut tau = [0.0; ARMS];
    let mut phases = [0.0; ARMS];
    for (k, z) in target.entries().iter().enumerate() {
        let r = z.norm();
        if r > 1e-15 {
            tau[k] = r / max;
            phases[k] = z.arg();
        }
    }
    Ok((tau, phases))
}

/// Measurement-side phases for Bob's input (`0` → first basis, `1` → second):
/// `φ^B_1` is 0 or π, the other arms stay at 0.
pub fn measurement_phase_for_input(y: usize) -> Result<[f64; ARMS]> {
    match y {
        0 => Ok([0.0; ARMS]),
        1 => Ok([PI, 0.0, 0.0, 0.0]),
        _ => Err(PhotonicsError::InvalidInput(y)),
    }
}
