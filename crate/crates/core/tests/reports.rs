//! Report formats, the energy proxy and run configuration files.

use imt_vsim::coproc::{CoprocConfig, Scheme};
use imt_vsim::harness::config::{parse_weights, RunConfig};
use imt_vsim::harness::report::{to_csv, to_json, CSV_COLUMNS, JSON_SCHEMA};
use imt_vsim::harness::trend::trend_check;
use imt_vsim::harness::{grid, run_workload, sweep, EnergyWeights, RunOptions, RunReport, WorkloadSpec};
use imt_vsim::kernels::oracle::conv_ops;
use imt_vsim::kernels::KernelSpec;

fn small_table() -> imt_vsim::harness::SweepTable {
    let w = [WorkloadSpec::homogeneous(KernelSpec::conv(4)).with_instances(1)];
    let base = CoprocConfig::new(Scheme::Dedicated, 1, 4).unwrap();
    sweep(&grid(&w, &base), &RunOptions::default())
}

fn run(scheme: Scheme, d: u32, weights: EnergyWeights) -> RunReport {
    let w = WorkloadSpec::homogeneous(KernelSpec::conv(32)).with_instances(1);
    let opts = RunOptions { weights, ..RunOptions::default() };
    run_workload(&w, &CoprocConfig::new(scheme, d, 4).unwrap(), &opts).unwrap()
}

#[test]
fn json_report_matches_schema() {
    let table = small_table();
    let checks = trend_check(&table);
    let doc: serde_json::Value = serde_json::from_str(&to_json(&table, &checks).unwrap()).unwrap();
    let schema: serde_json::Value = serde_json::from_str(JSON_SCHEMA).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    assert!(v.is_valid(&doc));
    assert_eq!(doc["cells"].as_array().unwrap().len(), 12);

    let mut bad = doc.clone();
    bad["cells"][0]["config"]["d"] = serde_json::json!(3);
    assert!(!v.is_valid(&bad));
    let mut bad = doc;
    bad.as_object_mut().unwrap().remove("schema_version");
    assert!(!v.is_valid(&bad));
}

#[test]
fn csv_has_documented_columns() {
    let csv = to_csv(&small_table()).unwrap();
    let mut rd = csv::Reader::from_reader(csv.as_bytes());
    let header: Vec<String> = rd.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(header, CSV_COLUMNS);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 12);
    for r in &rows {
        assert_eq!(&r[5], "conv4");
        assert!(r[6].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn energy_proxy_matches_event_sum() {
    let w = EnergyWeights::default();
    let r = run(Scheme::Dedicated, 2, w);
    let c = &r.counters;
    let events = [
        (c.retired.iter().sum::<u64>() - c.retired_vector) as f64 * w.scalar_instr,
        c.coproc.vector_line_ops as f64 * w.vector_line_op,
        (c.coproc.spm_line_reads + c.coproc.spm_line_writes) as f64 * w.spm_line_access,
        c.mem_words as f64 * w.mem_word,
        (3 * c.cycles - c.coproc.mfu_busy) as f64 * w.mfu_idle_cycle,
        c.cycles as f64 * w.base_cycle,
    ];
    let ops = 3 * conv_ops(32, 32, 3).total();
    assert_eq!(r.ops, ops);
    let want = events.iter().sum::<f64>() / ops as f64;
    assert!((r.energy_proxy - want).abs() <= 1e-9 * want);
}

#[test]
fn energy_proxy_scales_with_weights() {
    assert_eq!(run(Scheme::Dedicated, 1, EnergyWeights::zero()).energy_proxy, 0.0);
    let one = run(Scheme::Shared, 4, EnergyWeights::default()).energy_proxy;
    let two = run(Scheme::Shared, 4, EnergyWeights::default().scaled(2.0)).energy_proxy;
    assert!((two - 2.0 * one).abs() <= 1e-9 * two);
}

#[test]
fn vector_lanes_cut_energy_per_op() {
    let w = EnergyWeights::default();
    let sisd = run(Scheme::Shared, 1, w).energy_proxy;
    let sym2 = run(Scheme::Dedicated, 2, w).energy_proxy;
    let simd8 = run(Scheme::Shared, 8, w).energy_proxy;
    assert!(sym2 < sisd, "{sym2} vs {sisd}");
    assert!(simd8 < sisd, "{simd8} vs {sisd}");
}

#[test]
fn config_file_round_trip() {
    let c = RunConfig::parse(
        "scheme = sym\nd = 8\ninstances = 2\nworkload = conv16\nload_latency = 5\n# trailing comment\nmax_cycles = 1_000_000\n",
    )
    .unwrap();
    let cp = c.coproc().unwrap();
    assert_eq!((cp.scheme, cp.lanes, cp.mfus, cp.spmis), (Scheme::Dedicated, 8, 3, 3));
    assert_eq!(c.options().unwrap().core.load_latency, 5);
    assert_eq!(c.workload().instances(), 2);
    assert_eq!(c.max_cycles, 1_000_000);
    assert!(RunConfig::parse("d = 3").unwrap().coproc().is_err());
    assert!(RunConfig::parse("scheme = vliw").is_err());
}

#[test]
fn weights_file_rejects_unknown_and_negative() {
    assert!(parse_weights("mem_word = 1\nbase_cycle = 2").is_ok());
    assert!(parse_weights("leakage = 1").is_err());
    assert!(parse_weights("scalar_instr = -0.5").is_err());
}
