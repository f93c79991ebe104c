//! Runs the six main workloads and the filter-size series on all twelve
//! design points, then prints the cycle grid and the trend verdicts.
//!
//!     cargo run --release --example table_sweep -- [instances] [csv-out]

use imt_vsim::coproc::{CoprocConfig, Scheme};
use imt_vsim::harness::report::{emit_report, to_text, Format};
use imt_vsim::harness::trend::trend_check;
use imt_vsim::harness::{filter_workloads, grid, sweep, table_workloads, RunOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let instances: u32 = args.next().map(|s| s.parse().expect("instances")).unwrap_or(4);
    let out = args.next();

    let base = CoprocConfig::new(Scheme::Shared, 1, 4).unwrap();
    let mut workloads = table_workloads(instances);
    workloads.extend(filter_workloads(instances).into_iter().skip(1));
    let t0 = std::time::Instant::now();
    let table = sweep(&grid(&workloads, &base), &RunOptions::default());
    let checks = trend_check(&table);

    print!("{}", to_text(&table, &checks));
    for f in table.failures() {
        eprintln!("{} {}: {}", f.config.scheme, f.workload, f.error.as_deref().unwrap_or(""));
    }
    eprintln!("{} cells in {:.1?}", table.cells.len(), t0.elapsed());
    if let Some(path) = out {
        emit_report(&table, &checks, Format::Csv, path.as_ref()).expect("write csv");
    }
}
