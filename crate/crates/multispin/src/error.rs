use num_complex::Complex64;

/// Crate-wide error type. Variants map onto CLI exit codes (see the binary).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Structural defect in a model: index out of range, table length
    /// mismatch, bad probability vector. Fatal for all downstream use.
    #[error("structural error: {0}")]
    Structural(String),

    /// The model parsed but violates an admissibility condition
    /// (Lipschitz bound, catalog certificate).
    #[error("inadmissible model: {0}")]
    Inadmissible(String),

    /// |lambda| lies outside the zero-free disc required by the operation.
    #[error("lambda modulus {modulus} exceeds admissible radius {radius}")]
    LambdaOutOfRange { modulus: f64, radius: f64 },

    /// A scalar parameter is outside its domain (delta, epsilon, r, c, ...).
    #[error("parameter out of range: {0}")]
    Domain(String),

    /// An enumeration or quadrature would exceed the configured budget.
    #[error("cost ceiling exceeded: estimated {estimate:.3e} elementary reads > ceiling {ceiling:.3e}")]
    CostCeiling { estimate: f64, ceiling: f64 },

    /// The selected truncation degree is beyond the configured ceiling.
    #[error("truncation degree {degree} exceeds ceiling {ceiling}")]
    DegreeCeiling { degree: usize, ceiling: usize },

    /// Logarithm of a series with vanishing constant term.
    #[error("series has zero constant term; logarithm undefined")]
    ZeroConstantTerm,

    /// A winding-number sample landed on (or too close to) a zero.
    #[error("sample at {z} has |F| = {modulus:.3e}, too close to a zero for winding evaluation")]
    WindingNearZero { z: Complex64, modulus: f64 },

    /// Argument increment of at least pi between adjacent winding samples.
    #[error("unresolved argument step of {step:.4} rad between winding samples; increase sample count")]
    WindingUnresolved { step: f64 },

    /// Iterative refinement did not reach the requested tolerance.
    #[error("refinement did not converge: last values {previous} and {current}")]
    NotConverged {
        previous: Complex64,
        current: Complex64,
    },

    /// A root search (grid + Newton) failed to locate a zero.
    #[error("root search failed: {0}")]
    RootSearch(String),

    /// Malformed input document.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
