use imt_vsim::coproc::{design_grid, CoprocConfig, Scheme};
use imt_vsim::kernels::{build_homogeneous, build_kernel, KernelSpec};
use imt_vsim::pipeline::CoreConfig;

fn run_one(spec: KernelSpec, cfg: CoprocConfig) -> imt_vsim::pipeline::Core {
    let kp = build_kernel(spec, &cfg, 11).unwrap();
    let mut core = kp.core(cfg, CoreConfig::default()).unwrap();
    core.run(kp.stop(1), 50_000_000).unwrap();
    kp.verify(&core).unwrap();
    core
}

#[test]
fn small_kernels_match_oracle_on_every_configuration() {
    for spec in [KernelSpec::conv(4), KernelSpec::conv(8), KernelSpec::Matmul { n: 16 }] {
        for cfg in design_grid(spec.kind().default_spms()) {
            run_one(spec, cfg);
        }
    }
}

#[test]
fn fft_matches_oracle() {
    run_one(KernelSpec::Fft, CoprocConfig::new(Scheme::Dedicated, 2, 4).unwrap());
}

#[test]
fn post_scaled_convolution() {
    run_one(KernelSpec::Conv { size: 8, filter: 5, pscale: 7 }, CoprocConfig::new(Scheme::SharedMfu, 4, 4).unwrap());
}

#[test]
fn homogeneous_three_harts() {
    let cfg = CoprocConfig::new(Scheme::Shared, 2, 4).unwrap();
    let kp = build_homogeneous(KernelSpec::conv(8), 2, &cfg, 5).unwrap();
    let mut core = kp.core(cfg, CoreConfig::default()).unwrap();
    core.run(kp.stop(2), 10_000_000).unwrap();
    kp.verify(&core).unwrap();
    assert!(core.counters.completions.iter().all(|c| c.len() == 2));
}
