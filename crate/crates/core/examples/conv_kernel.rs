//! Generates the 2D convolution kernel, runs one instance on a single hart
//! and compares the scratchpad result written back to memory with the
//! scalar oracle. Optional arguments: input side, filter side.

use imt_vsim::coproc::{CoprocConfig, Scheme};
use imt_vsim::kernels::{build_kernel, KernelSpec};
use imt_vsim::pipeline::CoreConfig;

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let size = args.next().unwrap_or(8);
    let filter = args.next().unwrap_or(3);
    let spec = KernelSpec::conv_filter(size, filter);
    let cfg = CoprocConfig::new(Scheme::Shared, 4, 4).unwrap();

    let kp = build_kernel(spec, &cfg, 42).expect("kernel builds");
    println!("{}: {} instructions", spec.label(), kp.program.instrs.len());
    for b in &kp.spm_buffers {
        println!("  spm buffer {:<10} {:#010x} {:>6} bytes", b.name, b.addr, b.bytes);
    }

    let mut core = kp.core(cfg, CoreConfig::default()).unwrap();
    core.run(kp.stop(1), 10_000_000).unwrap();
    kp.verify(&core).expect("output matches the oracle");

    let job = kp.jobs[0].as_ref().unwrap();
    let out = core.mem.peek_words(job.output_addr, size.min(8)).unwrap();
    let row: Vec<i32> = out.iter().map(|w| *w as i32).collect();
    println!("first output row: {row:?}");
    println!("{} cycles, census {:?}", core.counters.cycles, spec.census());
}
