//! Criterion evaluators shared by the acceptance runner and the property
//! suites. Reference values are recomputed here, independently of the
//! library oracles.

#![allow(dead_code)]

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use imt_vsim::asm::{assemble, SourceUnit};
use imt_vsim::coproc::{design_grid, CoprocConfig, Scheme};
use imt_vsim::harness::{filter_workloads, grid, sweep, table_workloads, RunOptions, SweepTable, DEFAULT_INSTANCES};
use imt_vsim::isa::NUM_HARTS;
use imt_vsim::kernels::{build_homogeneous, HartJob, KernelSpec};
use imt_vsim::pipeline::{single_hart, Core, CoreConfig};

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

/// Every kernel the functional matrix covers.
pub fn kernel_list() -> Vec<KernelSpec> {
    let mut v: Vec<KernelSpec> = [4, 8, 16, 32].into_iter().map(KernelSpec::conv).collect();
    v.extend([5, 7, 9, 11].into_iter().map(|k| KernelSpec::conv_filter(32, k)));
    v.push(KernelSpec::Fft);
    v.push(KernelSpec::matmul());
    v
}

// ---- reference implementations ----

pub fn naive_conv(input: &[u32], n: usize, filter: &[u32], k: usize, pscale: u32) -> Vec<u32> {
    let h = k as i64 / 2;
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n as i64 {
        for c in 0..n as i64 {
            let mut acc: i128 = 0;
            for i in 0..k as i64 {
                for j in 0..k as i64 {
                    let (y, x) = (r + i - h, c + j - h);
                    if y < 0 || x < 0 || y >= n as i64 || x >= n as i64 {
                        continue;
                    }
                    let a = input[(y * n as i64 + x) as usize] as i32 as i128;
                    let w = filter[(i * k as i64 + j) as usize] as i32 as i128;
                    acc += a * w;
                }
            }
            out.push((acc >> pscale) as i32 as u32);
        }
    }
    out
}

pub fn naive_matmul(a: &[u32], b: &[u32], n: usize) -> Vec<u32> {
    let mut out = vec![0u32; n * n];
    for j in 0..n {
        for i in 0..n {
            let mut acc = 0u32;
            for k in 0..n {
                acc = acc.wrapping_add(a[i * n + k].wrapping_mul(b[k * n + j]));
            }
            out[i * n + j] = acc;
        }
    }
    out
}

/// Largest component distance between the fixed-point result and a
/// floating DFT of the same input, scaled by 1/256.
pub fn fft_error(input: &[u32], got: &[u32]) -> f64 {
    let n = 256;
    let x: Vec<(f64, f64)> = (0..n).map(|t| (input[2 * t] as i32 as f64, input[2 * t + 1] as i32 as f64)).collect();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let (mut re, mut im) = (0.0, 0.0);
        for (t, &(xr, xi)) in x.iter().enumerate() {
            let th = -2.0 * std::f64::consts::PI * ((k * t) % n) as f64 / n as f64;
            re += xr * th.cos() - xi * th.sin();
            im += xr * th.sin() + xi * th.cos();
        }
        let (gr, gi) = (got[2 * k] as i32 as f64, got[2 * k + 1] as i32 as f64);
        worst = worst.max((gr - re / n as f64).abs()).max((gi - im / n as f64).abs());
    }
    worst
}

/// Checks a job's expected output against the references above.
pub fn reference_agrees(job: &HartJob) -> Result<(), String> {
    match job.spec {
        KernelSpec::Conv { size, filter, pscale } => {
            let want = naive_conv(&job.images[0].1, size, &job.images[1].1, filter, pscale);
            (want == job.expected).then_some(()).ok_or_else(|| format!("{} reference differs", job.spec.label()))
        }
        KernelSpec::Matmul { n } => {
            let want = naive_matmul(&job.images[0].1, &job.images[1].1, n);
            (want == job.expected).then_some(()).ok_or_else(|| format!("{} reference differs", job.spec.label()))
        }
        KernelSpec::Fft => {
            let e = fft_error(&job.images[0].1, &job.expected);
            (e <= 8.0).then_some(()).ok_or_else(|| format!("fft256 off the float DFT by {e:.1}"))
        }
    }
}

// ---- functional matrix: criteria 1, 3, 4 ----

pub struct MatrixRun {
    pub runs: usize,
    pub cycles: u64,
    pub errors: Vec<String>,
    /// Kernels whose final state differed between configurations.
    pub divergent: Vec<String>,
    pub seconds: f64,
}

fn fingerprint(core: &Core) -> u64 {
    let mut h = DefaultHasher::new();
    core.mem.peek_words(0, (core.mem.size() / 4) as usize).unwrap().hash(&mut h);
    for hart in &core.harts {
        hart.regs().hash(&mut h);
    }
    h.finish()
}

/// Runs every kernel on every design point with the fence check on,
/// verifying outputs and comparing final states across configurations.
pub fn functional_matrix(seed: u64) -> MatrixRun {
    let t0 = Instant::now();
    let mut m = MatrixRun { runs: 0, cycles: 0, errors: Vec::new(), divergent: Vec::new(), seconds: 0.0 };
    for spec in kernel_list() {
        let mut prints = Vec::new();
        for cfg in design_grid(spec.kind().default_spms()) {
            let tag = format!("{} on {}", spec.label(), cfg.label());
            let kp = match build_homogeneous(spec, 1, &cfg, seed) {
                Ok(kp) => kp,
                Err(e) => {
                    m.errors.push(format!("{tag}: {e}"));
                    continue;
                }
            };
            if prints.is_empty() {
                for job in kp.jobs.iter().flatten() {
                    if let Err(e) = reference_agrees(job) {
                        m.errors.push(e);
                    }
                }
            }
            let mut core = kp.core(cfg, CoreConfig::default()).unwrap();
            assert!(core.cfg.check_fence);
            match core.run(kp.stop(1), 100_000_000) {
                Ok(_) => {}
                Err(t) => {
                    m.errors.push(format!("{tag}: {}", t.kind));
                    continue;
                }
            }
            if let Err(e) = kp.verify(&core) {
                m.errors.push(format!("{tag}: {e}"));
            }
            m.runs += 1;
            m.cycles += core.counters.cycles;
            prints.push(fingerprint(&core));
        }
        if prints.windows(2).any(|w| w[0] != w[1]) {
            m.divergent.push(spec.label());
        }
    }
    m.seconds = t0.elapsed().as_secs_f64();
    m
}

pub fn criterion_1(m: &MatrixRun) -> Outcome {
    Outcome::new(
        m.errors.is_empty() && m.runs == kernel_list().len() * 12,
        format!("{} runs bit-exact, {} errors, {:.1}s (budget 600s) {}", m.runs, m.errors.len(), m.seconds, m.errors.join("; ")),
    )
}

/// Stage distance between same-hart slots in every trace line.
pub fn trace_fence_violations(trace: &str) -> usize {
    trace
        .lines()
        .filter(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            let harts: Vec<Option<&str>> =
                cols[2..6].iter().map(|s| (*s != "-").then(|| s.split(':').next().unwrap())).collect();
            (0..4).any(|a| (a + 1..4).any(|b| b - a < 3 && harts[a].is_some() && harts[a] == harts[b]))
        })
        .count()
}

pub fn criterion_3(m: &MatrixRun) -> Outcome {
    let mut lines = 0;
    let mut bad = 0;
    for scheme in [Scheme::Shared, Scheme::Dedicated, Scheme::SharedMfu] {
        let cfg = CoprocConfig::new(scheme, 2, 4).unwrap();
        for spec in [KernelSpec::conv(8), KernelSpec::Fft] {
            let kp = build_homogeneous(spec, 1, &cfg, 3).unwrap();
            let mut core = kp.core(cfg, CoreConfig { trace: true, ..CoreConfig::default() }).unwrap();
            core.run(kp.stop(1), 10_000_000).unwrap();
            lines += core.trace().lines().count();
            bad += trace_fence_violations(core.trace());
        }
    }
    let fence_traps = m.errors.iter().filter(|e| e.contains("fence")).count();
    Outcome::new(
        bad == 0 && fence_traps == 0 && m.runs > 0,
        format!("checked every cycle of {} runs ({} cycles), {} traced cycles re-checked, {} violations", m.runs, m.cycles, lines, bad + fence_traps),
    )
}

pub fn criterion_4(m: &MatrixRun) -> Outcome {
    Outcome::new(
        m.divergent.is_empty() && m.runs > 0,
        format!("final memory and registers identical across 12 design points for {} kernels; divergent: {:?}", kernel_list().len(), m.divergent),
    )
}

// ---- criterion 2 ----

/// Cycle at which the `n`-th instruction retires.
fn cycles_to_retire(entries: impl Fn(&imt_vsim::isa::Program) -> [Option<u32>; NUM_HARTS], per_hart: usize, n: u64) -> u64 {
    let mut src = String::new();
    for i in 0..per_hart {
        src.push_str(&format!("xori x{}, x{}, {}\n", 1 + i % 7, 2 + i % 5, i % 2000));
    }
    src.push_str("ebreak\n");
    let p = assemble(&SourceUnit::from_text("alu.s", &src), 0).unwrap();
    let e = entries(&p);
    let mut core = Core::new(p, e, CoprocConfig::new(Scheme::Dedicated, 1, 1).unwrap(), CoreConfig::default()).unwrap();
    while core.counters.retired_total() < n {
        core.step().unwrap();
    }
    core.state.cycle
}

pub fn criterion_2() -> Outcome {
    let three = cycles_to_retire(|p| [Some(p.origin); NUM_HARTS], 1000, 3000);
    let one = cycles_to_retire(single_hart, 1000, 1000);
    Outcome::new(
        three <= 3004 && one.abs_diff(3000) <= 1,
        format!("3 harts: 3000 retired by cycle {three} (max 3004); 1 hart: 1000 retired by cycle {one} (3000 +/- 1)"),
    )
}

// ---- trend criteria on the default sweep ----

pub fn trend_table(instances: u32) -> SweepTable {
    let base = CoprocConfig::new(Scheme::Shared, 1, 4).unwrap();
    let mut w = table_workloads(instances);
    w.extend(filter_workloads(instances).into_iter().skip(1));
    sweep(&grid(&w, &base), &RunOptions::default())
}

pub fn default_instances() -> u32 {
    DEFAULT_INSTANCES
}

fn avg(t: &SweepTable, s: Scheme, d: u32, w: &str) -> f64 {
    t.average(s, d, w, w).unwrap_or(f64::NAN)
}

use Scheme::{Dedicated as SYM, Shared as SHARED, SharedMfu as HET};

pub fn criterion_5(t: &SweepTable) -> Outcome {
    let v: Vec<f64> = [1, 2, 4, 8].iter().map(|&d| avg(t, SHARED, d, "conv32")).collect();
    let mono = v.windows(2).all(|w| w[1] < w[0]);
    let ratio = v[0] / v[3];
    Outcome::new(
        mono && ratio >= 2.5,
        format!("shared conv32 D1..D8 {:.0} {:.0} {:.0} {:.0}; D8 speedup {ratio:.2}x (min 2.5)", v[0], v[1], v[2], v[3]),
    )
}

pub fn criterion_6(t: &SweepTable) -> Outcome {
    let (s4, m4) = (avg(t, SYM, 1, "conv4"), avg(t, SHARED, 8, "conv4"));
    let (s32, m32) = (avg(t, SYM, 1, "conv32"), avg(t, SHARED, 8, "conv32"));
    Outcome::new(
        s4 < m4 && m32 < s32,
        format!("conv4 sym-d1 {s4:.0} < simd-d8 {m4:.0}; conv32 simd-d8 {m32:.0} < sym-d1 {s32:.0}"),
    )
}

pub fn criterion_7(t: &SweepTable) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for w in ["conv32", "matmul64"] {
        let best = avg(t, SYM, 8, w);
        let others: Vec<f64> = design_grid(4)
            .iter()
            .filter(|c| !(c.scheme == SYM && c.lanes == 8))
            .map(|c| avg(t, c.scheme, c.lanes, w))
            .collect();
        let runner = others.iter().cloned().fold(f64::INFINITY, f64::min);
        ok &= others.iter().all(|x| best <= *x);
        parts.push(format!("{w} sym-d8 {best:.0} vs best of other 11 cells {runner:.0}"));
    }
    Outcome::new(ok, parts.join("; "))
}

pub fn criterion_8(t: &SweepTable) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for w in ["conv32", "matmul64"] {
        for d in [1, 2] {
            let (h, s) = (avg(t, HET, d, w), avg(t, SYM, d, w));
            let o = h / s - 1.0;
            ok &= (0.0..=0.15).contains(&o);
            parts.push(format!("{w} D{d} {:+.1}%", 100.0 * o));
        }
    }
    Outcome::new(ok, format!("het over sym (allowed 0..+15%): {}", parts.join(", ")))
}

pub fn criterion_9(t: &SweepTable) -> Outcome {
    let (a, b, c) = (avg(t, SYM, 1, "fft256"), avg(t, SHARED, 8, "fft256"), avg(t, SHARED, 1, "fft256"));
    Outcome::new(a < b && b < c, format!("fft256 sym-d1 {a:.0} < simd-d8 {b:.0} < sisd {c:.0}"))
}

pub fn criterion_10(t: &SweepTable) -> Outcome {
    let s: Vec<f64> = ["conv32", "conv32_f5", "conv32_f7", "conv32_f9", "conv32_f11"]
        .iter()
        .map(|w| avg(t, SHARED, 1, w) / avg(t, SHARED, 8, w))
        .collect();
    let ok = s.windows(2).all(|w| w[1] >= w[0]);
    let txt: Vec<String> = s.iter().map(|x| format!("{x:.2}")).collect();
    Outcome::new(ok, format!("simd-d8 over sisd, 3x3..11x11: {}", txt.join(" ")))
}
