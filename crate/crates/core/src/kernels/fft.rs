//! 256-point radix-2 FFT on interleaved (re, im) words.
//!
//! Each butterfly forms `t = w·b` with two `kdotpps` (the twiddle table holds
//! `(wr, −wi, wi, wr)` per entry, pscale 30) and writes `t` to a staging
//! vector with `ksvaddrf` against a zero vector. A group of `h` butterflies
//! then finishes with one `ksubv` and one `kaddv` of length `8h` bytes, and
//! every stage ends with `ksrav` by one over the whole array.

use super::data::random_samples;
use super::oracle::{bit_reverse, oracle_fft256, twiddles, FFT_POINTS, TWIDDLE_FRAC_BITS};
use super::spm::SpmPlan;
use super::{Emitter, HartJob, KernelError, KernelSpec};

pub(super) fn twiddle_words() -> Vec<u32> {
    twiddles()
        .iter()
        .flat_map(|&(wr, wi)| [wr as u32, wi.wrapping_neg() as u32, wi as u32, wr as u32])
        .collect()
}

pub(super) fn emit(e: &mut Emitter, plan: &mut SpmPlan, hart: usize, region: u32, seed: u64) -> Result<HartJob, KernelError> {
    let x = random_samples(seed, FFT_POINTS);
    let expected = oracle_fft256(&x);
    let bytes = FFT_POINTS as u32 * 8;

    let mem_in = region;
    let mem_tw = mem_in + bytes;
    let mem_out = mem_tw + bytes;

    let spm_in = plan.alloc(format!("h{hart}.fft.input"), bytes, 8)?;
    let spm_x = plan.alloc(format!("h{hart}.fft.data"), bytes, 8)?;
    let spm_tw = plan.alloc(format!("h{hart}.fft.twiddles"), bytes, 8)?;
    // Products of one group plus a guard word for the last two-element write.
    let spm_t = plan.alloc(format!("h{hart}.fft.products"), bytes / 2 + 4, 8)?;
    let spm_z = plan.alloc(format!("h{hart}.fft.zero"), 8, 8)?;

    e.comment("fft 256");
    e.op(format!("li x3, {bytes}"));
    e.op(format!("li x24, {spm_in}"));
    e.op(format!("li x2, {mem_in}"));
    e.op("kmemld (x24), (x2), x3");
    e.op(format!("li x21, {spm_tw}"));
    e.op(format!("li x2, {mem_tw}"));
    e.op("kmemld (x21), (x2), x3");
    e.op("csrwi vlen, 8");
    e.op(format!("csrwi pscale, {TWIDDLE_FRAC_BITS}"));
    e.op(format!("li x20, {spm_x}"));
    e.op(format!("li x22, {spm_t}"));
    e.op(format!("li x23, {spm_z}"));
    e.op("li x25, 1");
    e.op("mv x6, x20");
    for k in 0..FFT_POINTS {
        e.op(format!("addi x5, x24, {}", 8 * bit_reverse(k, 8)));
        e.op("kvcp (x6), (x5)");
        e.op("addi x6, x6, 8");
    }

    let mut h = 1usize;
    let mut s = 0;
    while h < FFT_POINTS {
        let groups = FFT_POINTS / (2 * h);
        let stride = (16 * (FFT_POINTS / 2) / h) as i32;
        let tag = |t: &str| format!("fft{s}_{t}");
        e.op(format!("li x15, {groups}"));
        e.op("mv x16, x20");
        e.label(&tag("group"));
        e.op(format!("addi x17, x16, {}", 8 * h));
        e.op("mv x5, x17");
        e.op("mv x6, x21");
        e.op("mv x7, x22");
        e.op(format!("li x18, {h}"));
        e.label(&tag("bfly"));
        e.op("kdotpps (x10), (x5), (x6)");
        e.op("addi x6, x6, 8");
        e.op("kdotpps (x11), (x5), (x6)");
        e.op(format!("addi x6, x6, {}", stride - 8));
        e.op("ksvaddrf (x7), (x23), x10");
        e.op("addi x12, x7, 4");
        e.op("ksvaddrf (x12), (x23), x11");
        e.op("addi x7, x7, 8");
        e.op("addi x5, x5, 8");
        e.op("addi x18, x18, -1");
        e.op(format!("bne x18, x0, {}", e.l(&tag("bfly"))));
        e.op(format!("li x19, {}", 8 * h));
        e.op("csrw vlen, x19");
        e.op("ksubv (x17), (x16), (x22)");
        e.op("kaddv (x16), (x16), (x22)");
        e.op("csrwi vlen, 8");
        if groups > 1 {
            e.op(format!("addi x16, x16, {}", 16 * h));
            e.op("addi x15, x15, -1");
            e.op(format!("bne x15, x0, {}", e.l(&tag("group"))));
        }
        e.op("csrw vlen, x3");
        e.op("ksrav (x20), (x20), x25");
        e.op("csrwi vlen, 8");
        h *= 2;
        s += 1;
    }
    e.op(format!("li x2, {mem_out}"));
    e.op("kmemstr (x2), (x20), x3");

    let input: Vec<u32> = x.iter().flat_map(|&(r, i)| [r as u32, i as u32]).collect();
    let out: Vec<u32> = expected.iter().flat_map(|&(r, i)| [r as u32, i as u32]).collect();
    Ok(HartJob {
        spec: KernelSpec::Fft,
        images: vec![(mem_in, input), (mem_tw, twiddle_words())],
        output_addr: mem_out,
        expected: out,
    })
}
