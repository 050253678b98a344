use thiserror::Error;

use crate::exact::ExactError;
use crate::filtration::FiltrationError;
use crate::geodesics::GeodesicError;
use crate::progressions::ProgressionError;
use crate::quad::QuadError;
use crate::ramsey::RamseyError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error(transparent)]
    Filtration(#[from] FiltrationError),
    #[error(transparent)]
    Progression(#[from] ProgressionError),
    #[error(transparent)]
    Ramsey(#[from] RamseyError),
    #[error("i/o: {0}")]
    Io(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}
