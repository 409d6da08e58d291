// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

pub mod algebra;
pub mod born;
pub mod channels;
pub mod error;
pub mod io;
pub mod lindblad;
pub mod linalg;
pub mod operators;
pub mod symmetry;

pub use error::{Error, Result};
