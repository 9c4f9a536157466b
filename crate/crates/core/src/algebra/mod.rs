//! Exact sparse polynomial arithmetic over the Gaussian rationals.

mod field;
mod gauss;
mod matrix;
mod multiindex;
mod poly;

pub use field::PolyVectorField;
pub use gauss::GaussianRational;
pub(crate) use gauss::ratio_to_f64;
pub use matrix::ExactMatrix;
pub use multiindex::MultiIndex;
pub use poly::ScalarPoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("malformed number `{0}`")]
    MalformedNumber(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("shift is not near-identity: contains a term of degree {degree}")]
    NotNearIdentity { degree: u32 },
    #[error("matrix rows have different lengths")]
    RaggedMatrix,
}
