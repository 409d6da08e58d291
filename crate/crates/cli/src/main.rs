// Copyright 2026 The Decohere Authors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (outcome, out) = match decohere_cli::run_from_args(std::env::args_os()) {
        Ok(parsed) => parsed,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let written = if outcome.code != 0 {
        std::io::stderr().write_all(outcome.body.as_bytes())
    } else if let Some(path) = out {
        std::fs::write(&path, &outcome.body)
    } else {
        std::io::stdout().write_all(outcome.body.as_bytes())
    };
    if let Err(e) = written {
        eprintln!("decohere: cannot write report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.code as u8)
}
