//! Numerical laboratory for three bosons on a periodic unit ring with
//! per-pair contact couplings.
//!
//! The impurity atom (particle 1) couples to each majority atom (particles
//! 2 and 3) with strength `g`; the majority pair couples with `g'`. Equal
//! couplings make the model integrable (Lieb-Liniger); unequal couplings
//! break integrability. The crate provides
//!
//! - exact Bethe-ansatz ground-state energies in the integrable case
//!   ([`bethe`]),
//! - closed-form energies and pair-correlation functions of the pair-product
//!   (Jastrow) ansatz at exponent v = 1 ([`jastrow`]),
//! - quadrature evaluation of the variational ansatz at arbitrary exponent v
//!   and all density marginals ([`quad`]),
//! - one-dimensional optimization of v plus error and stability scans
//!   ([`varopt`]),
//! - an independent exact-diagonalization oracle in a plane-wave basis
//!   ([`ed`], feature `ed`),
//! - a self-check suite ([`verify`]) and a CSV/JSON command-line surface
//!   ([`cli`]).
//!
//! Units: lengths in the ring circumference L, energies in hbar^2/(M L^2).

pub mod bethe;
pub mod cli;
#[cfg(feature = "ed")]
pub mod ed;
pub mod jastrow;
pub mod model;
pub mod quad;
pub mod varopt;
pub mod verify;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain: {0}")]
    Domain(String),
    #[error("numerics: {0}")]
    Numerics(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Method tag attached to every energy report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    JastrowAnalytic,
    JastrowVariational,
    Bethe,
    EdOracle,
}

/// Ground-state energy with its kinetic/interaction split.
///
/// For the Bethe method the quasi-momentum form absorbs the interaction;
/// the total is reported as kinetic and the interaction field is zero.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct EnergyReport {
    /// Total energy in hbar^2/(M L^2).
    pub total: f64,
    pub kinetic: f64,
    pub interaction: f64,
    pub method: Method,
}

/// Which pair a correlation function refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairKind {
    /// The two identically coupled majority atoms.
    MajorityMajority,
    /// The impurity and one majority atom.
    ImpurityMajority,
}

/// A one-dimensional normalized pair-distance marginal.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CorrelationCurve {
    pub r_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: PairKind,
    pub params: model::JastrowParams,
    /// Self-reported relative error of the underlying integrals.
    pub error: f64,
}

/// A two-dimensional density sampled on a rectangular grid.
///
/// `values` is row-major: `values[i * y.len() + j]` belongs to `(x[i], y[j])`.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub values: Vec<f64>,
    pub error: f64,
}

/// Inclusive linearly spaced grid with `count >= 2` points.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "linspace needs at least two points");
    let step = (stop - start) / (count - 1) as f64;
    (0..count).map(|i| start + step * i as f64).collect()
}
