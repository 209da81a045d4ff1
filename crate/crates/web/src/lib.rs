//! WebAssembly bindings for the in-browser certification demo.
//!
//! Every export takes plain numbers and returns a JSON string, so the page
//! needs no generated TypeScript types and the same functions run natively
//! in tests. Errors come back as `{"error": "..."}`.

use mubcert::certify::{
    evaluate, full_certificate, min_asp_for_nontrivial_eta, norm_sum_threshold, BoundId,
    CertificateReport,
};
use mubcert::photonics::{
    calibrate_drift_sigma, simulate_detections, InterferometerConfig, PhaseNoiseModel,
};
use mubcert::qrac::{estimate_asp, quantum_optimum, AspEstimate};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_DIM: usize = 64;
const MAX_POINTS: usize = 4096;
/// Upper limit keeping a single-threaded browser run to a few seconds.
const MAX_DETECTIONS: u32 = 200_000;

fn error_json(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn check_dim(d: u32) -> Result<usize, String> {
    let d = d as usize;
    if (2..=MAX_DIM).contains(&d) {
        Ok(d)
    } else {
        Err(format!("dimension must lie in 2..={MAX_DIM}, got {d}"))
    }
}

#[derive(Serialize)]
struct Curve {
    bound: BoundId,
    /// `null` where the bound is not applicable.
    values: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct Curves {
    d: usize,
    asp: Vec<f64>,
    curves: Vec<Curve>,
    quantum_optimum: f64,
    norm_sum_threshold: f64,
    nontrivial_eta_asp: f64,
}

/// Every certified quantity as a function of the ASP on `points` samples of `(½, p̄_Q]`.
#[wasm_bindgen]
pub fn certificate_curves(d: u32, points: u32) -> String {
    let d = match check_dim(d) {
        Ok(d) => d,
        Err(e) => return error_json(e),
    };
    let n = (points as usize).clamp(2, MAX_POINTS);
    let top = quantum_optimum(d);
    let asp: Vec<f64> = (1..=n)
        .map(|k| 0.5 + (top - 0.5) * k as f64 / n as f64)
        .collect();
    let curves = BoundId::ALL
        .iter()
        .map(|&bound| Curve {
            bound,
            values: asp.iter().map(|&p| evaluate(bound, p, d).ok()).collect(),
        })
        .collect();
    serde_json::to_string(&Curves {
        d,
        asp,
        curves,
        quantum_optimum: top,
        norm_sum_threshold: norm_sum_threshold(d),
        nontrivial_eta_asp: min_asp_for_nontrivial_eta(d),
    })
    .expect("serializable")
}

/// Certificate report for an observed ASP and its uncertainty.
#[wasm_bindgen]
pub fn certify(asp: f64, sigma: f64, d: u32) -> String {
    let d = match check_dim(d) {
        Ok(d) => d,
        Err(e) => return error_json(e),
    };
    if !(sigma.is_finite() && sigma >= 0.0) {
        return error_json(format!("sigma must be non-negative, got {sigma}"));
    }
    full_certificate(&AspEstimate::from_value(asp, sigma), d).to_json()
}

#[derive(Serialize)]
struct Experiment {
    detections: u64,
    noise_sigma: f64,
    /// `per_state_asp[i][j]`, averaged over both measurements.
    per_state_asp: Vec<Vec<f64>>,
    report: CertificateReport,
}

fn run_experiment(detections: u32, visibility: f64, seed: u32) -> Result<Experiment, String> {
    if detections == 0 || detections > MAX_DETECTIONS {
        return Err(format!(
            "detections must lie in 1..={MAX_DETECTIONS}, got {detections}"
        ));
    }
    if !(visibility > 0.0 && visibility <= 1.0) {
        return Err(format!("visibility must lie in (0, 1], got {visibility}"));
    }
    let seed = u64::from(seed);
    let base = InterferometerConfig::default();
    let (config, noise_sigma) = if visibility >= 1.0 {
        (base, 0.0)
    } else {
        let sigma = calibrate_drift_sigma(&base, visibility, seed).map_err(|e| e.to_string())?;
        (
            base.with_noise(PhaseNoiseModel::GaussianDrift, sigma),
            sigma,
        )
    };
    let counts =
        simulate_detections(&config, u64::from(detections), seed).map_err(|e| e.to_string())?;
    let estimate = estimate_asp(&counts).map_err(|e| e.to_string())?;
    let per_state_asp = estimate
        .per_input
        .iter()
        .map(|row| row.iter().map(|[a, b]| 0.5 * (a + b)).collect())
        .collect();
    Ok(Experiment {
        detections: counts.total(),
        noise_sigma,
        per_state_asp,
        report: full_certificate(&estimate, counts.dim()),
    })
}

/// Simulates the four-arm experiment at the given mean fringe visibility and
/// certifies the resulting counts.
#[wasm_bindgen]
pub fn simulate_experiment(detections: u32, visibility: f64, seed: u32) -> String {
    match run_experiment(detections, visibility, seed) {
        Ok(e) => serde_json::to_string(&e).expect("serializable"),
        Err(e) => error_json(e),
    }
}
