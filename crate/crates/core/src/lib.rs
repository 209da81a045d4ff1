//! Semi-device-independent certification of mutually unbiased bases.
//!
//! The pipeline runs from linear algebra up to certificates:
//!
//! - [`qla`]: small dense complex matrices, Hermitian eigendecomposition, POVM checks.
//! - [`mub`]: measurements, MUB pair constructions, overlap entropy, norm sum, `s_max`.
//! - [`qrac`]: the 2^d → 1 random access code, its optimal encoding and ASP estimation.
//! - [`counts`]: detection count tables and their CSV exchange format.
//! - [`certify`]: lower and upper bounds on MUB figures of merit from an observed ASP.
//! - [`photonics`]: a seeded Monte Carlo model of a four-arm fiber interferometer.
//!
//! All indices in this API are 0-based: inputs `i, j ∈ 0..d`, `y ∈ {0, 1}`
//! (`0` selects the first measurement), outcomes `0..d`. Files and the command
//! line use 1-based indices.

pub mod certify;
pub mod counts;
pub mod mub;
pub mod photonics;
pub mod qla;
pub mod qrac;

pub use counts::{CountsError, CountsMeta, CountsTable};
