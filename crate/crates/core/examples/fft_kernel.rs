//! The 256-point fixed-point FFT: the scalar oracle against a double
//! precision DFT, then the vector kernel against the oracle.

use imt_vsim::coproc::{CoprocConfig, Scheme};
use imt_vsim::kernels::data::random_samples;
use imt_vsim::kernels::oracle::{oracle_fft256, reference_dft};
use imt_vsim::kernels::{build_kernel, KernelSpec};
use imt_vsim::pipeline::CoreConfig;

fn main() {
    let x = random_samples(7, 256);
    let fixed = oracle_fft256(&x);
    let exact = reference_dft(&x);
    let worst = fixed
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a.0 as f64 - b.0).abs().max((a.1 as f64 - b.1).abs()))
        .fold(0.0, f64::max);
    println!("oracle vs float DFT: worst component error {worst:.1}");
    println!("bin 1: fixed {:?}, float ({:.1}, {:.1})", fixed[1], exact[1].0, exact[1].1);

    for d in [1, 8] {
        let cfg = CoprocConfig::new(Scheme::Dedicated, d, 4).unwrap();
        let kp = build_kernel(KernelSpec::Fft, &cfg, 7).unwrap();
        let mut core = kp.core(cfg, CoreConfig::default()).unwrap();
        core.run(kp.stop(1), 10_000_000).unwrap();
        kp.verify(&core).expect("kernel matches oracle");
        println!(
            "D={d}: {} cycles, {} vector instructions retired",
            core.counters.cycles, core.counters.retired_vector
        );
    }
}
