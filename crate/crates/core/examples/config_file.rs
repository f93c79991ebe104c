//! Runs one cell described by a flat key=value configuration, then the same
//! cell with an override, and prints both as CSV.

use imt_vsim::harness::config::RunConfig;
use imt_vsim::harness::report::to_csv;
use imt_vsim::harness::{run_workload, SweepCell, SweepTable};

const CONFIG: &str = "
# one homogeneous run
scheme = het
d = 2
workload = conv16
instances = 2
seed = 0x2a
";

fn cell(rc: &RunConfig) -> SweepCell {
    let cfg = rc.coproc().unwrap();
    let report = run_workload(&rc.workload(), &cfg, &rc.options().unwrap()).unwrap();
    SweepCell { config: (&cfg).into(), workload: report.workload.clone(), report: Some(report), error: None }
}

fn main() {
    let mut rc = RunConfig::parse(CONFIG).unwrap();
    let first = cell(&rc);
    rc.set("scheme", "sym").unwrap();
    let second = cell(&rc);
    print!("{}", to_csv(&SweepTable { cells: vec![first, second] }).unwrap());
}
