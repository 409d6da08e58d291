// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not hermitian (max |A - A*| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("Kraus set is not unital (|| sum W*W - 1 || = {defect:e})")]
    NotUnital { defect: f64 },

    #[error("map is not completely positive (min Choi eigenvalue {min_eigenvalue:e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("state is not faithful (min eigenvalue {min_eigenvalue:e})")]
    NotFaithful { min_eigenvalue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("negative evolution time {0}")]
    NegativeTime(f64),

    #[error("time {t} lies outside the control window [-{tau}, {tau}]")]
    OutOfWindow { t: f64, tau: f64 },

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("size cap exceeded: {size} > {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}
