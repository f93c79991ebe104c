//! Convolution, FFT and matrix multiply running together on harts 0, 1
//! and 2, reported per kernel type for every design point.

use imt_vsim::coproc::CoprocConfig;
use imt_vsim::harness::report::to_text;
use imt_vsim::harness::{grid, sweep, RunOptions, WorkloadSpec};

fn main() {
    let instances = std::env::args().nth(1).map(|a| a.parse().expect("instances")).unwrap_or(2);
    let w = WorkloadSpec::composite().with_instances(instances);
    let base = CoprocConfig::new(imt_vsim::coproc::Scheme::Shared, 1, w.spms()).unwrap();
    let table = sweep(&grid(&[w], &base), &RunOptions::default());
    print!("{}", to_text(&table, &[]));
}
