//! Matrix multiply by row accumulation over 16-column blocks of `b`:
//! `acc = Σ_k a[i][k] · b[k][block]` with `ksvmulrf` and `kaddv`, the scalar
//! `a[i][k]` loaded with `lw`.

use super::data::{Lcg, random_matrix};
use super::oracle::oracle_matmul;
use super::spm::SpmPlan;
use super::{Emitter, HartJob, KernelError, KernelSpec};

pub const BLOCK: usize = 16;

pub(super) fn emit(
    e: &mut Emitter,
    plan: &mut SpmPlan,
    hart: usize,
    region: u32,
    n: usize,
    seed: u64,
) -> Result<HartJob, KernelError> {
    let mut g = Lcg::new(seed);
    let a = random_matrix(g.next_u64(), n, n);
    let b = random_matrix(g.next_u64(), n, n);
    let expected = oracle_matmul(&a, &b);

    let row = n as u32 * 4;
    let brow = BLOCK as u32 * 4;
    let mem_a = region;
    let mem_b = mem_a + row * n as u32;
    let mem_c = mem_b + row * n as u32;

    let spm_b = plan.alloc(format!("h{hart}.matmul.b_block"), brow * n as u32, 4)?;
    let spm_acc = plan.alloc(format!("h{hart}.matmul.acc"), brow, 4)?;
    let spm_tmp = plan.alloc(format!("h{hart}.matmul.tmp"), brow, 4)?;

    e.comment(&format!("matmul {n}x{n}, {BLOCK}-column blocks"));
    e.op(format!("li x3, {brow}"));
    e.op("csrw vlen, x3");
    e.op(format!("li x8, {spm_acc}"));
    e.op(format!("li x9, {spm_tmp}"));
    for blk in 0..n / BLOCK {
        let tag = |s: &str| format!("mm{blk}_{s}");
        e.op(format!("li x1, {spm_b}"));
        e.op(format!("li x2, {}", mem_b + blk as u32 * brow));
        e.op(format!("li x4, {n}"));
        e.label(&tag("load"));
        e.op("kmemld (x1), (x2), x3");
        e.op(format!("addi x1, x1, {brow}"));
        e.op(format!("addi x2, x2, {row}"));
        e.op("addi x4, x4, -1");
        e.op(format!("bne x4, x0, {}", e.l(&tag("load"))));
        e.op(format!("li x5, {mem_a}"));
        e.op(format!("li x10, {}", mem_c + blk as u32 * brow));
        e.op(format!("li x12, {n}"));
        e.label(&tag("row"));
        e.op(format!("li x6, {spm_b}"));
        e.op("lw x7, 0(x5)");
        e.op("ksvmulrf (x8), (x6), x7");
        e.op(format!("li x13, {}", n - 1));
        e.label(&tag("k"));
        e.op("addi x5, x5, 4");
        e.op(format!("addi x6, x6, {brow}"));
        e.op("lw x7, 0(x5)");
        e.op("ksvmulrf (x9), (x6), x7");
        e.op("kaddv (x8), (x8), (x9)");
        e.op("addi x13, x13, -1");
        e.op(format!("bne x13, x0, {}", e.l(&tag("k"))));
        e.op("kmemstr (x10), (x8), x3");
        e.op("addi x5, x5, 4");
        e.op(format!("addi x10, x10, {row}"));
        e.op("addi x12, x12, -1");
        e.op(format!("bne x12, x0, {}", e.l(&tag("row"))));
    }

    Ok(HartJob {
        spec: KernelSpec::Matmul { n },
        images: vec![(mem_a, a.words()), (mem_b, b.words())],
        output_addr: mem_c,
        expected: expected.words(),
    })
}
