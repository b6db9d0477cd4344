use thiserror::Error;

use crate::category::CategoryError;
use crate::collapse::CollapseError;
use crate::det::DetError;
use crate::frobenius::FrobeniusError;
use crate::graph::GraphError;
use crate::linalg::LinalgError;
use crate::spine::SpineError;
use crate::suites::SuiteError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Det(#[from] DetError),
    #[error(transparent)]
    Collapse(#[from] CollapseError),
    #[error(transparent)]
    Spine(#[from] SpineError),
    #[error(transparent)]
    Frobenius(#[from] FrobeniusError),
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
