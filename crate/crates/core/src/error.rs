use thiserror::Error;

use crate::poly::PolyError;
use crate::scalar::ScalarError;
use crate::series::SeriesError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("element is not U(1)-invariant: {0}")]
    NotInvariant(String),
    #[error("element is not homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
