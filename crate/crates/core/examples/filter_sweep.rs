//! Convolutions of a 32×32 input with 3×3 to 11×11 filters on the shared
//! scheme: the gain of 8 lanes over 1 grows with the filter.

use imt_vsim::coproc::{CoprocConfig, Scheme};
use imt_vsim::harness::{filter_workloads, sweep, RunOptions};

fn main() {
    let instances = std::env::args().nth(1).map(|a| a.parse().expect("instances")).unwrap_or(2);
    let mut cells = Vec::new();
    for w in filter_workloads(instances) {
        for d in [1, 8] {
            cells.push((w, CoprocConfig::new(Scheme::Shared, d, w.spms()).unwrap()));
        }
    }
    let table = sweep(&cells, &RunOptions::default());
    println!("{:<12} {:>10} {:>10} {:>8}", "workload", "D=1", "D=8", "speedup");
    for w in filter_workloads(instances) {
        let l = w.label();
        let a = table.average(Scheme::Shared, 1, &l, &l).unwrap();
        let b = table.average(Scheme::Shared, 8, &l, &l).unwrap();
        println!("{l:<12} {a:>10.0} {b:>10.0} {:>7.2}x", a / b);
    }
}
