//! Benchmark kernels (2D convolution, 256-point FFT, matrix multiply) as
//! generated assembly over the vector extension, with their oracles.
//!
//! Every hart gets its own copy of the code (labels prefixed `hN_`), its own
//! main-memory region and its own scratchpad buffers. One instance stages
//! the inputs with `kmemld`, computes, writes the result with `kmemstr` and
//! then stores to the hart's completion mailbox word.

pub mod data;
pub mod oracle;
pub mod spm;

mod conv;
mod fft;
mod matmul;

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asm::{assemble, AsmErrors, SourceUnit};
use crate::coproc::CoprocConfig;
use crate::isa::{Program, NUM_HARTS};
use crate::memory::MemFault;
use crate::pipeline::{Core, CoreConfig, StopCondition};

use oracle::OpCensus;
use spm::{SpmBuffer, SpmPlan};

/// Word stored to `MAILBOX + 4·hart` when an instance completes.
pub const MAILBOX: u32 = 0x0000_0100;
/// Start of hart 0's data region; each hart owns `REGION_BYTES`.
pub const REGION_BASE: u32 = 0x0001_0000;
pub const REGION_BYTES: u32 = 0x0001_0000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("filter side {0} must be odd and within 3..=11")]
    BadFilter(usize),
    #[error("matrix size {0} not supported")]
    BadSize(usize),
    #[error("scratchpad plan overflow placing `{buffer}` ({bytes} bytes)")]
    SpmOverflow { buffer: String, bytes: u32 },
    #[error("generated program failed to assemble: {0}")]
    Assembly(String),
    #[error("hart {hart} output word {index}: got {got:#010x}, expected {want:#010x}")]
    Mismatch { hart: usize, index: usize, got: u32, want: u32 },
    #[error("hart {hart} completed no instance")]
    NotRun { hart: usize },
    #[error(transparent)]
    Memory(#[from] MemFault),
}

impl From<AsmErrors> for KernelError {
    fn from(e: AsmErrors) -> Self {
        KernelError::Assembly(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Conv,
    Fft,
    Matmul,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Conv => "conv",
            KernelKind::Fft => "fft",
            KernelKind::Matmul => "matmul",
        }
    }

    /// Scratchpads per interface used for this kernel.
    pub fn default_spms(self) -> u32 {
        match self {
            KernelKind::Matmul => 3,
            KernelKind::Conv | KernelKind::Fft => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `size`×`size` input, `filter`×`filter` filter.
    Conv { size: usize, filter: usize, pscale: u32 },
    Fft,
    /// `n`×`n` operands, `n` a multiple of 16 up to 64.
    Matmul { n: usize },
}

impl KernelSpec {
    pub fn conv(size: usize) -> Self {
        KernelSpec::Conv { size, filter: 3, pscale: 0 }
    }

    pub fn conv_filter(size: usize, filter: usize) -> Self {
        KernelSpec::Conv { size, filter, pscale: 0 }
    }

    pub fn matmul() -> Self {
        KernelSpec::Matmul { n: 64 }
    }

    pub fn kind(&self) -> KernelKind {
        match self {
            KernelSpec::Conv { .. } => KernelKind::Conv,
            KernelSpec::Fft => KernelKind::Fft,
            KernelSpec::Matmul { .. } => KernelKind::Matmul,
        }
    }

    /// Short stable name used in reports, e.g. `conv32`, `conv32_f5`.
    pub fn label(&self) -> String {
        match *self {
            KernelSpec::Conv { size, filter: 3, pscale: 0 } => format!("conv{size}"),
            KernelSpec::Conv { size, filter, pscale: 0 } => format!("conv{size}_f{filter}"),
            KernelSpec::Conv { size, filter, pscale } => format!("conv{size}_f{filter}_s{pscale}"),
            KernelSpec::Fft => "fft256".to_string(),
            KernelSpec::Matmul { n } => format!("matmul{n}"),
        }
    }

    pub fn parse(s: &str) -> Option<KernelSpec> {
        if s == "fft" || s == "fft256" {
            return Some(KernelSpec::Fft);
        }
        if let Some(n) = s.strip_prefix("matmul") {
            let n = if n.is_empty() { 64 } else { n.parse().ok()? };
            return Some(KernelSpec::Matmul { n });
        }
        let rest = s.strip_prefix("conv")?;
        let mut parts = rest.split('_');
        let size = parts.next()?.parse().ok()?;
        let mut spec = KernelSpec::Conv { size, filter: 3, pscale: 0 };
        for p in parts {
            if let KernelSpec::Conv { filter, pscale, .. } = &mut spec {
                if let Some(f) = p.strip_prefix('f') {
                    *filter = f.parse().ok()?;
                } else if let Some(v) = p.strip_prefix('s') {
                    *pscale = v.parse().ok()?;
                } else {
                    return None;
                }
            }
        }
        Some(spec)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        match *self {
            KernelSpec::Conv { size, filter, pscale } => {
                oracle::check_filter(filter)?;
                if !(1..=32).contains(&size) || pscale > 31 {
                    return Err(KernelError::BadSize(size));
                }
                Ok(())
            }
            KernelSpec::Fft => Ok(()),
            KernelSpec::Matmul { n } => {
                if n == 0 || n % 16 != 0 || n > 64 {
                    Err(KernelError::BadSize(n))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn census(&self) -> OpCensus {
        match *self {
            KernelSpec::Conv { size, filter, .. } => oracle::conv_ops(size, size, filter),
            KernelSpec::Fft => oracle::fft_ops(oracle::FFT_POINTS),
            KernelSpec::Matmul { n } => oracle::matmul_ops(n),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Assembly text for one hart, with prefixed labels.
pub(crate) struct Emitter {
    pub text: String,
    prefix: String,
}

impl Emitter {
    fn new(hart: usize) -> Self {
        Emitter { text: String::new(), prefix: format!("h{hart}_") }
    }

    pub fn op(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.text, "    {}", line.as_ref());
    }

    pub fn label(&mut self, name: &str) {
        let _ = writeln!(self.text, "{}{}:", self.prefix, name);
    }

    pub fn l(&self, name: &str) -> String {
        format!("{}{}", self.prefix, name)
    }

    pub fn comment(&mut self, text: &str) {
        let _ = writeln!(self.text, "# {text}");
    }
}

/// Inputs placed in main memory and the expected output of one hart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HartJob {
    pub spec: KernelSpec,
    pub images: Vec<(u32, Vec<u32>)>,
    pub output_addr: u32,
    pub expected: Vec<u32>,
}

/// Generated code plus memory layout for a whole workload.
#[derive(Debug, Clone)]
pub struct KernelProgram {
    pub program: Program,
    pub source: String,
    pub entries: [Option<u32>; NUM_HARTS],
    pub jobs: [Option<HartJob>; NUM_HARTS],
    pub spm_buffers: Vec<SpmBuffer>,
    /// Instances each hart runs before halting; 0 loops forever.
    pub instances: u32,
    pub mailbox: u32,
}

impl KernelProgram {
    /// Fresh simulated system with the program and input images loaded.
    pub fn core(&self, coproc: CoprocConfig, mut cfg: CoreConfig) -> Result<Core, KernelError> {
        cfg.mailbox = Some(self.mailbox);
        let mut core = Core::new(self.program.clone(), self.entries, coproc, cfg)?;
        for job in self.jobs.iter().flatten() {
            for (addr, words) in &job.images {
                core.mem.poke_words(*addr, words)?;
            }
        }
        Ok(core)
    }

    /// Stop condition matching the instance count.
    pub fn stop(&self, instances: u64) -> StopCondition {
        if self.instances == 0 {
            StopCondition::Instances(instances)
        } else {
            StopCondition::AllHalted
        }
    }

    /// Compares every hart's output region with the oracle result.
    pub fn verify(&self, core: &Core) -> Result<(), KernelError> {
        for (hart, job) in self.jobs.iter().enumerate() {
            let Some(job) = job else { continue };
            if core.counters.completions[hart].is_empty() {
                return Err(KernelError::NotRun { hart });
            }
            let got = core.mem.peek_words(job.output_addr, job.expected.len())?;
            if let Some(index) = (0..got.len()).find(|&k| got[k] != job.expected[k]) {
                return Err(KernelError::Mismatch { hart, index, got: got[index], want: job.expected[index] });
            }
        }
        Ok(())
    }
}

/// Builds a workload where hart `h` runs `jobs[h]` (or starts halted).
pub fn build_workload(
    jobs: [Option<KernelSpec>; NUM_HARTS],
    instances: u32,
    cfg: &CoprocConfig,
    seed: u64,
) -> Result<KernelProgram, KernelError> {
    let mut plan = SpmPlan::new(cfg);
    let mut source = String::new();
    let mut hart_jobs: [Option<HartJob>; NUM_HARTS] = Default::default();
    for (hart, spec) in jobs.iter().enumerate() {
        let Some(spec) = spec else { continue };
        spec.validate()?;
        let mut e = Emitter::new(hart);
        let region = REGION_BASE + hart as u32 * REGION_BYTES;
        e.label("entry");
        if instances > 0 {
            e.op(format!("li x31, {instances}"));
        }
        e.label("instance");
        let job = match *spec {
            KernelSpec::Conv { size, filter, pscale } => {
                conv::emit(&mut e, &mut plan, hart, region, size, filter, pscale, data::hart_seed(seed, hart, 0))?
            }
            KernelSpec::Fft => fft::emit(&mut e, &mut plan, hart, region, data::hart_seed(seed, hart, 1))?,
            KernelSpec::Matmul { n } => matmul::emit(&mut e, &mut plan, hart, region, n, data::hart_seed(seed, hart, 2))?,
        };
        e.op(format!("li x30, {}", MAILBOX + 4 * hart as u32));
        e.op("sw x0, 0(x30)");
        if instances > 0 {
            e.op("addi x31, x31, -1");
            e.op(format!("bne x31, x0, {}", e.l("instance")));
            e.op("ebreak");
        } else {
            e.op(format!("j {}", e.l("instance")));
        }
        source.push_str(&e.text);
        hart_jobs[hart] = Some(job);
    }
    if source.is_empty() {
        source.push_str("idle:\n    ebreak\n");
    }
    let program = assemble(&SourceUnit::from_text("kernel.s", &source), 0)?;
    let entries = std::array::from_fn(|h| {
        jobs[h].as_ref().map(|_| program.label_address(&format!("h{h}_entry")).expect("entry label"))
    });
    Ok(KernelProgram {
        program,
        source,
        entries,
        jobs: hart_jobs,
        spm_buffers: plan.buffers,
        instances,
        mailbox: MAILBOX,
    })
}

/// The same kernel on every hart.
pub fn build_homogeneous(spec: KernelSpec, instances: u32, cfg: &CoprocConfig, seed: u64) -> Result<KernelProgram, KernelError> {
    build_workload([Some(spec); NUM_HARTS], instances, cfg, seed)
}

/// A single instance of one kernel on hart 0.
pub fn build_kernel(spec: KernelSpec, cfg: &CoprocConfig, seed: u64) -> Result<KernelProgram, KernelError> {
    build_workload([Some(spec), None, None], 1, cfg, seed)
}

/// The mixed workload: convolution 32×32, FFT-256 and matrix multiply on
/// harts 0, 1 and 2, each looping until stopped.
pub fn build_composite(cfg: &CoprocConfig, seed: u64) -> Result<KernelProgram, KernelError> {
    build_workload([Some(KernelSpec::conv(32)), Some(KernelSpec::Fft), Some(KernelSpec::matmul())], 0, cfg, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_labels_round_trip() {
        for s in [
            KernelSpec::conv(4),
            KernelSpec::conv_filter(32, 11),
            KernelSpec::Conv { size: 8, filter: 5, pscale: 3 },
            KernelSpec::Fft,
            KernelSpec::matmul(),
            KernelSpec::Matmul { n: 16 },
        ] {
            assert_eq!(KernelSpec::parse(&s.label()), Some(s));
        }
        assert_eq!(KernelSpec::parse("conv32_x"), None);
    }
}
