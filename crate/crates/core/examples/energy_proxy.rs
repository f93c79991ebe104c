//! Event-weighted energy per operation for conv 32×32 on a few design
//! points, with the default weights and with memory traffic made costly.

use imt_vsim::coproc::{design_grid, CoprocConfig};
use imt_vsim::harness::{run_workload, EnergyWeights, RunOptions, WorkloadSpec};
use imt_vsim::kernels::KernelSpec;

fn main() {
    let w = WorkloadSpec::homogeneous(KernelSpec::conv(32)).with_instances(2);
    let heavy = EnergyWeights { mem_word: 10.0, ..EnergyWeights::default() };
    let picks: Vec<CoprocConfig> =
        design_grid(w.spms()).into_iter().filter(|c| c.lanes == 1 || c.lanes == 8).collect();
    println!("{:<16} {:>2} {:>10} {:>10}", "configuration", "D", "default", "mem x5");
    for cfg in picks {
        let base = run_workload(&w, &cfg, &RunOptions::default()).unwrap();
        let alt = run_workload(&w, &cfg, &RunOptions { weights: heavy, ..RunOptions::default() }).unwrap();
        println!("{:<16} {:>2} {:>10.3} {:>10.3}", cfg.family(), cfg.lanes, base.energy_proxy, alt.energy_proxy);
    }
}
