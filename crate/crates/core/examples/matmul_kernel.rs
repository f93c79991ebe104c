//! Matrix multiply on all three harts under each scheme at D=8, verified
//! against the oracle, with the per-instance average and replay totals.

use imt_vsim::coproc::{CoprocConfig, Scheme};
use imt_vsim::harness::{run_workload, RunOptions, WorkloadSpec};
use imt_vsim::kernels::KernelSpec;

fn main() {
    let n = std::env::args().nth(1).map(|a| a.parse().expect("n")).unwrap_or(32);
    let w = WorkloadSpec::homogeneous(KernelSpec::Matmul { n }).with_instances(2);
    for scheme in [Scheme::Shared, Scheme::Dedicated, Scheme::SharedMfu] {
        let cfg = CoprocConfig::new(scheme, 8, w.spms()).unwrap();
        let r = run_workload(&w, &cfg, &RunOptions::default()).expect("verified run");
        println!(
            "{:<12} avg {:>9.0} cycles/instance, {:>6} replays, {:>7} SPM line accesses",
            cfg.family(),
            r.averages[0].avg_cycles,
            r.counters.replays.total(),
            r.counters.coproc.spm_line_reads + r.counters.coproc.spm_line_writes
        );
    }
}
