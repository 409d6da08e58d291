// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use decohere_core::io;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = io::parse_model(data, 1e-9);
});
