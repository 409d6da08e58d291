// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

//! Replays the checked-in fuzz seeds through every parser. Seeds named
//! `valid_*` must load and build; `invalid_*` must be rejected with an error.

use std::path::PathBuf;

use decohere_core::io;

type Loader = fn(&str) -> bool;

fn loaders() -> Vec<(&'static str, Loader)> {
    vec![
        ("parse_matrix", |s| io::parse_matrix_with_cap(s, 16).is_ok()),
        ("parse_channel", |s| {
            io::parse_channel_with_cap(s, 16).and_then(|spec| spec.build(1e-9)).is_ok()
        }),
        ("parse_operator_list", |s| io::parse_operator_list_with_cap(s, 16).is_ok()),
        ("parse_generator", |s| {
            io::parse_generator_with_cap(s, 8).and_then(|spec| spec.build(1e-9)).is_ok()
        }),
        ("parse_trajectory", |s| io::parse_trajectory_with_cap(s, 1e-9, 8).is_ok()),
        ("parse_bath", |s| io::parse_bath_with_cap(s, 1e-9, 8).is_ok()),
        ("parse_state", |s| io::parse_state_with_cap(s, 16).is_ok()),
        ("parse_model", |s| io::parse_model(s, 1e-9).is_ok()),
    ]
}

#[test]
fn fuzz_seeds_replay() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    for (target, load) in loaders() {
        let dir = root.join(target);
        let mut seen = 0;
        for entry in std::fs::read_dir(&dir).unwrap_or_else(|e| panic!("{}: {e}", dir.display())) {
            let path = entry.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            let text = String::from_utf8_lossy(&std::fs::read(&path).unwrap()).into_owned();
            let loaded = load(&text);
            if name.starts_with("valid_") {
                assert!(loaded, "{target}/{name} should load");
            } else if name.starts_with("invalid_") {
                assert!(!loaded, "{target}/{name} should be rejected");
            }
            seen += 1;
        }
        assert!(seen > 0, "no seeds for {target}");
    }
}
