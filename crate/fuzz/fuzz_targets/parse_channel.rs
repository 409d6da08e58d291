// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use decohere_core::io;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(spec) = io::parse_channel_with_cap(data, 16) {
        let _ = spec.build(1e-9);
    }
});
