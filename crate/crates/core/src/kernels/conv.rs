//! Row-wise convolution: every output row accumulates `k²` scaled input rows
//! (`ksvmuls` by a filter tap read from the scratchpad, then `kaddv`).
//! Zero padding comes from the untouched border of the staged input.

use super::data::{random_matrix, random_matrix_bounded, Lcg, MatrixSpec};
use super::oracle::oracle_conv2d;
use super::spm::SpmPlan;
use super::{Emitter, HartJob, KernelError};

/// Data range for runs with a post-scale shift, keeping sums inside 32 bits.
const SCALED_BOUND: i32 = 2047;

pub(super) fn inputs(size: usize, k: usize, pscale: u32, seed: u64) -> (MatrixSpec, MatrixSpec) {
    let mut g = Lcg::new(seed);
    let (s1, s2) = (g.next_u64(), g.next_u64());
    if pscale == 0 {
        (random_matrix(s1, size, size), random_matrix(s2, k, k))
    } else {
        (random_matrix_bounded(s1, size, size, SCALED_BOUND), random_matrix_bounded(s2, k, k, SCALED_BOUND))
    }
}

#[allow(clippy::too_many_arguments)]
pub(super) fn emit(
    e: &mut Emitter,
    plan: &mut SpmPlan,
    hart: usize,
    region: u32,
    size: usize,
    k: usize,
    pscale: u32,
    seed: u64,
) -> Result<HartJob, KernelError> {
    let (input, filter) = inputs(size, k, pscale, seed);
    let expected = oracle_conv2d(&input, &filter, pscale)?;

    let p = k / 2;
    let stride = (size + 2 * p) as u32 * 4;
    let row = size as u32 * 4;
    let mem_in = region;
    let mem_filter = mem_in + row * size as u32;
    let mem_out = mem_filter + (k * k) as u32 * 4;

    let spm_in = plan.alloc(format!("h{hart}.conv.input"), stride * (size + 2 * p) as u32, 4)?;
    let spm_f = plan.alloc(format!("h{hart}.conv.filter"), (k * k) as u32 * 4, 4)?;
    let spm_acc = plan.alloc(format!("h{hart}.conv.acc"), row, 4)?;
    let spm_tmp = plan.alloc(format!("h{hart}.conv.tmp"), row, 4)?;

    e.comment(&format!("conv {size}x{size}, filter {k}x{k}, pscale {pscale}"));
    e.op(format!("li x1, {}", spm_in + (p as u32 * stride) + p as u32 * 4));
    e.op(format!("li x2, {mem_in}"));
    e.op(format!("li x3, {row}"));
    e.op(format!("li x4, {size}"));
    e.label("conv_load");
    e.op("kmemld (x1), (x2), x3");
    e.op(format!("addi x1, x1, {stride}"));
    e.op(format!("addi x2, x2, {row}"));
    e.op("addi x4, x4, -1");
    e.op(format!("bne x4, x0, {}", e.l("conv_load")));
    e.op(format!("li x1, {spm_f}"));
    e.op(format!("li x2, {mem_filter}"));
    e.op(format!("li x3, {}", k * k * 4));
    e.op("kmemld (x1), (x2), x3");

    e.op(format!("li x5, {row}"));
    e.op("csrw vlen, x5");
    if pscale > 0 {
        e.op(format!("li x9, {pscale}"));
    }
    e.op(format!("li x1, {spm_in}"));
    e.op(format!("li x2, {spm_f}"));
    e.op(format!("li x7, {spm_tmp}"));
    e.op(format!("li x8, {spm_acc}"));
    e.op(format!("li x10, {mem_out}"));
    e.op(format!("li x11, {row}"));
    e.op(format!("li x4, {size}"));
    e.label("conv_row");
    for i in 0..k {
        for j in 0..k {
            e.op(format!("addi x5, x1, {}", i as u32 * stride + j as u32 * 4));
            e.op(format!("addi x6, x2, {}", (i * k + j) * 4));
            if i == 0 && j == 0 {
                e.op("ksvmuls (x8), (x5), (x6)");
            } else {
                e.op("ksvmuls (x7), (x5), (x6)");
                e.op("kaddv (x8), (x8), (x7)");
            }
        }
    }
    if pscale > 0 {
        e.op("ksrav (x8), (x8), x9");
    }
    e.op("kmemstr (x10), (x8), x11");
    e.op(format!("addi x10, x10, {row}"));
    e.op(format!("addi x1, x1, {stride}"));
    e.op("addi x4, x4, -1");
    e.op(format!("bne x4, x0, {}", e.l("conv_row")));

    Ok(HartJob {
        spec: super::KernelSpec::Conv { size, filter: k, pscale },
        images: vec![(mem_in, input.words()), (mem_filter, filter.words())],
        output_addr: mem_out,
        expected: expected.words(),
    })
}
