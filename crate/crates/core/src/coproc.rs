//! The vector coprocessor: MFUs, scratchpad memories behind their interfaces
//! (SPMIs), the latency model, vector instruction semantics, and the
//! availability rules of the three sharing schemes.
//!
//! Scratchpads are stored in logical byte order. Bank `b` of a `D`-bank
//! scratchpad holds the words whose index is `b` modulo `D`; a line is `D`
//! consecutive words. Rotators and the interleaver only affect placement, so
//! they are modeled as address arithmetic with no extra cycles.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::isa::{classify_unit, FuClass, HartContext, Instruction, VectorOp, NUM_HARTS};
use crate::memory::{transfer_cycles, LsuState, MainMemory, MemFault};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// One MFU and one SPMI shared by every hart.
    Shared,
    /// A complete MFU/SPM subsystem per hart.
    Dedicated,
    /// One SPMI per hart, one MFU shared at functional-unit granularity.
    SharedMfu,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Shared => "shared",
            Scheme::Dedicated => "dedicated",
            Scheme::SharedMfu => "shared_mfu",
        }
    }

    pub fn parse(s: &str) -> Option<Scheme> {
        match s.to_ascii_lowercase().as_str() {
            "shared" | "simd" | "sisd" => Some(Scheme::Shared),
            "dedicated" | "sym" | "symmetric" => Some(Scheme::Dedicated),
            "shared_mfu" | "het" | "heterogeneous" => Some(Scheme::SharedMfu),
            _ => None,
        }
    }

    /// (M, F) implied by the scheme.
    pub fn interfaces_and_mfus(self) -> (u32, u32) {
        match self {
            Scheme::Shared => (1, 1),
            Scheme::Dedicated => (3, 3),
            Scheme::SharedMfu => (3, 1),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("lanes D={0} must be 1, 2, 4 or 8")]
    Lanes(u32),
    #[error("scheme {scheme} requires M={m}, F={f}")]
    SchemeShape { scheme: Scheme, m: u32, f: u32 },
    #[error("scratchpad capacity {cap} must be a positive multiple of {line} bytes")]
    Capacity { cap: u32, line: u32 },
    #[error("initial latency {0} outside 4..=8")]
    InitialLatency(u32),
    #[error("need at least one scratchpad per interface")]
    NoScratchpads,
    #[error("dot-product unit must be ADDER or MULTIPLIER, got {0}")]
    DotUnit(FuClass),
}

/// One coprocessor design point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoprocConfig {
    pub scheme: Scheme,
    /// Lanes per MFU, also the number of banks per scratchpad.
    pub lanes: u32,
    pub mfus: u32,
    pub spmis: u32,
    /// Scratchpads per interface.
    pub spms: u32,
    /// Bytes per scratchpad.
    pub spm_capacity: u32,
    pub initial_latency: u32,
    pub spm_base: u32,
    /// Unit charged for `kdotp`/`kdotpps`.
    pub dot_unit: FuClass,
}

pub const DEFAULT_SPM_CAPACITY: u32 = 8 << 10;
pub const DEFAULT_SPM_BASE: u32 = 0x0010_0000;
pub const DEFAULT_INITIAL_LATENCY: u32 = 4;

impl CoprocConfig {
    pub fn new(scheme: Scheme, lanes: u32, spms: u32) -> Result<Self, ConfigError> {
        let (m, f) = scheme.interfaces_and_mfus();
        let cfg = CoprocConfig {
            scheme,
            lanes,
            mfus: f,
            spmis: m,
            spms,
            spm_capacity: DEFAULT_SPM_CAPACITY,
            initial_latency: DEFAULT_INITIAL_LATENCY,
            spm_base: DEFAULT_SPM_BASE,
            dot_unit: FuClass::Multiplier,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !matches!(self.lanes, 1 | 2 | 4 | 8) {
            return Err(ConfigError::Lanes(self.lanes));
        }
        let (m, f) = self.scheme.interfaces_and_mfus();
        if self.spmis != m || self.mfus != f {
            return Err(ConfigError::SchemeShape { scheme: self.scheme, m, f });
        }
        let line = self.line_bytes();
        if self.spm_capacity == 0 || self.spm_capacity % line != 0 {
            return Err(ConfigError::Capacity { cap: self.spm_capacity, line });
        }
        if !(4..=8).contains(&self.initial_latency) {
            return Err(ConfigError::InitialLatency(self.initial_latency));
        }
        if self.spms == 0 {
            return Err(ConfigError::NoScratchpads);
        }
        if !matches!(self.dot_unit, FuClass::Adder | FuClass::Multiplier) {
            return Err(ConfigError::DotUnit(self.dot_unit));
        }
        Ok(())
    }

    pub fn with_spms(mut self, n: u32) -> Self {
        self.spms = n;
        self
    }

    pub fn line_bytes(&self) -> u32 {
        4 * self.lanes
    }

    /// Bytes of scratchpad address space each hart sees.
    pub fn space_bytes(&self) -> u32 {
        self.spms * self.spm_capacity
    }

    pub fn spmi_of(&self, hart: usize) -> usize {
        match self.scheme {
            Scheme::Shared => 0,
            Scheme::Dedicated | Scheme::SharedMfu => hart,
        }
    }

    fn mfu_of(&self, hart: usize) -> usize {
        match self.scheme {
            Scheme::Dedicated => hart,
            Scheme::Shared | Scheme::SharedMfu => 0,
        }
    }

    /// Unit an arithmetic vector instruction occupies under this config.
    pub fn unit_of(&self, op: VectorOp) -> Option<FuClass> {
        let i = Instruction { op: crate::isa::Mnemonic::Vector(op), rd: 0, rs1: 0, rs2: 0, imm: 0 };
        let class = classify_unit(&i).ok()?;
        Some(match op {
            VectorOp::Kdotp | VectorOp::Kdotpps => self.dot_unit,
            _ => class,
        })
    }

    /// Family name as used in the result tables.
    pub fn family(&self) -> &'static str {
        match (self.scheme, self.lanes) {
            (Scheme::Shared, 1) => "SISD",
            (Scheme::Shared, _) => "SIMD",
            (Scheme::Dedicated, 1) => "Sym MIMD",
            (Scheme::Dedicated, _) => "Sym MIMD+SIMD",
            (Scheme::SharedMfu, 1) => "Het MIMD",
            (Scheme::SharedMfu, _) => "Het MIMD+SIMD",
        }
    }

    /// Short stable label such as `sym-d4`.
    pub fn label(&self) -> String {
        let s = match self.scheme {
            Scheme::Shared => "simd",
            Scheme::Dedicated => "sym",
            Scheme::SharedMfu => "het",
        };
        format!("{s}-d{}", self.lanes)
    }
}

/// The twelve accelerated design points: three schemes by D in {1,2,4,8}.
pub fn design_grid(spms: u32) -> Vec<CoprocConfig> {
    let mut out = Vec::new();
    for scheme in [Scheme::Shared, Scheme::Dedicated, Scheme::SharedMfu] {
        for d in [1, 2, 4, 8] {
            out.push(CoprocConfig::new(scheme, d, spms).expect("grid point is valid"));
        }
    }
    out
}

/// `initial + ceil(vlen / (4·D))`: one D-bank line per cycle after setup.
pub fn vector_latency(vlen: u32, lanes: u32, initial: u32) -> u64 {
    initial as u64 + vlen.div_ceil(4 * lanes) as u64
}

/// Lines touched by a `len`-byte operand.
pub fn line_count(len: u32, lanes: u32) -> u64 {
    len.div_ceil(4 * lanes) as u64
}

/// (bank, line) holding byte `offset` of a scratchpad.
pub fn bank_of(offset: u32, lanes: u32) -> (u32, u32) {
    let word = offset / 4;
    (word % lanes, word / lanes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpmLocation {
    pub spmi: usize,
    pub spm: usize,
    pub offset: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoprocError {
    #[error("address {addr:#010x} is outside the scratchpad space")]
    SpmOutOfRange { addr: u32 },
    #[error("operand at {addr:#010x} of {len} bytes crosses a scratchpad boundary")]
    CrossesScratchpad { addr: u32, len: u32 },
    #[error("vector length {vlen} is not a positive multiple of {ewidth}-bit elements")]
    BadVectorLength { vlen: u32, ewidth: u32 },
    #[error("element width {0} is not 8, 16 or 32")]
    BadElementWidth(u32),
    #[error("post-scale shift {0} exceeds 31")]
    BadPscale(u32),
    #[error("transfer byte count is zero")]
    ZeroCount,
    #[error("main memory: {0}")]
    Memory(#[from] MemFault),
    #[error("{0:?} is not a coprocessor instruction")]
    NotVector(Instruction),
}

/// Maps an SPM address of `hart` to interface, scratchpad and offset.
pub fn map_spm_address(addr: u32, hart: usize, cfg: &CoprocConfig) -> Result<SpmLocation, CoprocError> {
    let rel = addr
        .checked_sub(cfg.spm_base)
        .filter(|r| *r < cfg.space_bytes())
        .ok_or(CoprocError::SpmOutOfRange { addr })?;
    Ok(SpmLocation {
        spmi: cfg.spmi_of(hart),
        spm: (rel / cfg.spm_capacity) as usize,
        offset: rel % cfg.spm_capacity,
    })
}

/// Maps an operand of `len` bytes, rejecting spans that leave their scratchpad.
pub fn map_operand(addr: u32, len: u32, hart: usize, cfg: &CoprocConfig) -> Result<SpmLocation, CoprocError> {
    let loc = map_spm_address(addr, hart, cfg)?;
    if loc.offset as u64 + len as u64 > cfg.spm_capacity as u64 {
        return Err(CoprocError::CrossesScratchpad { addr, len });
    }
    Ok(loc)
}

/// One scratchpad interface with its N scratchpads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spmi {
    pub spms: Vec<Vec<u8>>,
    pub busy_until: u64,
    pub owner: Option<u8>,
}

/// All scratchpad interfaces of a design point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scratchpads {
    pub spmis: Vec<Spmi>,
}

impl Scratchpads {
    pub fn new(cfg: &CoprocConfig) -> Self {
        let spmi = Spmi {
            spms: vec![vec![0; cfg.spm_capacity as usize]; cfg.spms as usize],
            busy_until: 0,
            owner: None,
        };
        Scratchpads { spmis: vec![spmi; cfg.spmis as usize] }
    }

    pub fn bytes(&self, loc: SpmLocation, len: u32) -> &[u8] {
        let o = loc.offset as usize;
        &self.spmis[loc.spmi].spms[loc.spm][o..o + len as usize]
    }

    pub fn bytes_mut(&mut self, loc: SpmLocation, len: u32) -> &mut [u8] {
        let o = loc.offset as usize;
        &mut self.spmis[loc.spmi].spms[loc.spm][o..o + len as usize]
    }

    /// Words of one scratchpad in logical order.
    pub fn words(&self, spmi: usize, spm: usize) -> Vec<u32> {
        self.spmis[spmi].spms[spm]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect()
    }

    /// Hex dump, one scratchpad after another, each word on its own line.
    pub fn dump_hex(&self, spmi: usize) -> String {
        let mut out = String::new();
        for (k, _) in self.spmis[spmi].spms.iter().enumerate() {
            out.push_str(&format!("# spm {k}\n"));
            out.push_str(&crate::memory::format_hex_words(&self.words(spmi, k)));
        }
        out
    }

    /// Reads the words of `hart`'s view starting at an SPM address.
    pub fn peek_words(&self, cfg: &CoprocConfig, hart: usize, addr: u32, count: usize) -> Result<Vec<u32>, CoprocError> {
        let loc = map_operand(addr, 4 * count as u32, hart, cfg)?;
        Ok(self
            .bytes(loc, 4 * count as u32)
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect())
    }
}

/// Per-MFU functional unit occupancy.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Mfu {
    pub class_busy_until: [u64; 5],
    pub class_hart: [Option<u8>; 5],
    /// Whole-MFU occupancy (all schemes except the shared-MFU one use only this).
    pub busy_until: u64,
    pub hart: Option<u8>,
    union_end: u64,
}

/// What made an issue attempt replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Resource {
    Mfu,
    Fu(FuClass),
    Spmi,
    Lsu,
    ResultPending,
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resource::Mfu => f.write_str("MFU"),
            Resource::Fu(c) => write!(f, "{c}"),
            Resource::Spmi => f.write_str("SPMI"),
            Resource::Lsu => f.write_str("LSU"),
            Resource::ResultPending => f.write_str("RESULT-PENDING"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Availability {
    Free,
    Busy(Resource),
}

/// Result of an issue attempt that was not replayed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Issued {
    pub latency: u64,
    /// Register write of `kdotp`/`kdotpps`: (rd, value, ready cycle).
    pub reg_write: Option<(u8, u32, u64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssueOutcome {
    Issued(Issued),
    Replay(Resource),
}

/// Event counts accumulated by the coprocessor.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoprocStats {
    /// Line-streaming cycles per functional-unit class.
    pub fu_busy: [u64; 5],
    /// Cycles at least one unit of an MFU was occupied, summed over MFUs.
    pub mfu_busy: u64,
    pub spm_line_reads: u64,
    pub spm_line_writes: u64,
    /// Lines processed by arithmetic vector instructions.
    pub vector_line_ops: u64,
    pub vector_ops: u64,
    pub transfers: u64,
    pub transfer_bytes: u64,
}

/// Functional effect of one arithmetic vector instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorEffect {
    pub reg_write: Option<(u8, u32)>,
    pub latency: u64,
    pub line_reads: u64,
    pub line_writes: u64,
    pub lines: u64,
}

#[inline]
fn read_elem(bytes: &[u8], k: usize, ew: u32) -> i64 {
    match ew {
        8 => bytes[k] as i8 as i64,
        16 => i16::from_le_bytes([bytes[2 * k], bytes[2 * k + 1]]) as i64,
        _ => i32::from_le_bytes([bytes[4 * k], bytes[4 * k + 1], bytes[4 * k + 2], bytes[4 * k + 3]]) as i64,
    }
}

#[inline]
fn write_elem(bytes: &mut [u8], k: usize, ew: u32, v: i64) {
    match ew {
        8 => bytes[k] = v as u8,
        16 => bytes[2 * k..2 * k + 2].copy_from_slice(&(v as u16).to_le_bytes()),
        _ => bytes[4 * k..4 * k + 4].copy_from_slice(&(v as u32).to_le_bytes()),
    }
}

/// Sign-extends the low `ew` bits of `v`.
#[inline]
fn sext(v: i64, ew: u32) -> i64 {
    let sh = 64 - ew;
    (v << sh) >> sh
}

fn check_shape(hart: &HartContext) -> Result<(u32, u32), CoprocError> {
    let ew = hart.ctrl.ewidth;
    if !matches!(ew, 8 | 16 | 32) {
        return Err(CoprocError::BadElementWidth(ew));
    }
    let vlen = hart.ctrl.vlen;
    if vlen == 0 || vlen % (ew / 8) != 0 {
        return Err(CoprocError::BadVectorLength { vlen, ewidth: ew });
    }
    Ok((vlen, ew))
}

/// Executes one arithmetic vector instruction against the scratchpads of
/// `hart_id`. Sources are read in full before the destination is written.
pub fn exec_vector(
    i: &Instruction,
    hart_id: usize,
    hart: &HartContext,
    spms: &mut Scratchpads,
    cfg: &CoprocConfig,
) -> Result<VectorEffect, CoprocError> {
    use VectorOp::*;
    let op = i.vector_op().filter(|v| !v.is_transfer()).ok_or(CoprocError::NotVector(*i))?;
    let (vlen, ew) = check_shape(hart)?;
    let eb = ew / 8;
    let n = (vlen / eb) as usize;
    let lines = line_count(vlen, cfg.lanes);
    let latency = vector_latency(vlen, cfg.lanes, cfg.initial_latency);

    let load = |spms: &Scratchpads, addr: u32, len: u32| -> Result<Vec<i64>, CoprocError> {
        let loc = map_operand(addr, len, hart_id, cfg)?;
        let b = spms.bytes(loc, len);
        Ok((0..(len / eb) as usize).map(|k| read_elem(b, k, ew)).collect())
    };

    let a = load(spms, hart.reg(i.rs1), vlen)?;
    let mut line_reads = lines;
    let vec_b = matches!(op, Kaddv | Ksubv | Kvmul | Kdotp | Kdotpps | Kvslt);
    let b = if vec_b {
        line_reads += lines;
        load(spms, hart.reg(i.rs2), vlen)?
    } else {
        Vec::new()
    };
    let scalar = match op {
        Ksvaddsc | Ksvmuls => {
            line_reads += 1;
            load(spms, hart.reg(i.rs2), eb)?[0]
        }
        Ksvaddrf | Ksvmulrf | Ksvslt => sext(hart.reg(i.rs2) as i64, ew),
        Ksrlv | Ksrav => (hart.reg(i.rs2) % ew) as i64,
        _ => 0,
    };

    let dot = |a: &[i64], b: &[i64]| -> i64 {
        a.iter().zip(b).fold(0i64, |acc, (x, y)| acc.wrapping_add(x.wrapping_mul(*y)))
    };

    let (out, reg_write): (Option<Vec<i64>>, Option<(u8, u32)>) = match op {
        Kaddv => (Some(a.iter().zip(&b).map(|(x, y)| x + y).collect()), None),
        Ksubv => (Some(a.iter().zip(&b).map(|(x, y)| x - y).collect()), None),
        Kvmul => (Some(a.iter().zip(&b).map(|(x, y)| x.wrapping_mul(*y)).collect()), None),
        Kvred => (Some(vec![a.iter().fold(0i64, |s, x| s.wrapping_add(*x)) as i32 as i64]), None),
        Kdotp => (None, Some((i.rd, dot(&a, &b) as u32))),
        Kdotpps => {
            let ps = hart.ctrl.pscale;
            if ps > 31 {
                return Err(CoprocError::BadPscale(ps));
            }
            (None, Some((i.rd, (dot(&a, &b) >> ps) as u32)))
        }
        Ksvaddsc | Ksvaddrf => (Some(a.iter().map(|x| x + scalar).collect()), None),
        Ksvmuls | Ksvmulrf => (Some(a.iter().map(|x| x.wrapping_mul(scalar)).collect()), None),
        Ksrlv => {
            let mask = if ew == 32 { u32::MAX as i64 } else { (1i64 << ew) - 1 };
            (Some(a.iter().map(|x| (x & mask) >> scalar).collect()), None)
        }
        Ksrav => (Some(a.iter().map(|x| x >> scalar).collect()), None),
        Krelu => (Some(a.iter().map(|x| (*x).max(0)).collect()), None),
        Kvslt => (Some(a.iter().zip(&b).map(|(x, y)| (x < y) as i64).collect()), None),
        Ksvslt => (Some(a.iter().map(|x| (*x < scalar) as i64).collect()), None),
        Kvcp => (Some(a.clone()), None),
        Kmemld | Kmemstr => unreachable!(),
    };

    let mut line_writes = 0;
    if let Some(out) = out {
        let len = out.len() as u32 * eb;
        let loc = map_operand(hart.reg(i.rd), len, hart_id, cfg)?;
        let dst = spms.bytes_mut(loc, len);
        for (k, v) in out.iter().enumerate() {
            write_elem(dst, k, ew, *v);
        }
        line_writes = line_count(len, cfg.lanes);
    }
    debug_assert!(n > 0);
    Ok(VectorEffect { reg_write, latency, line_reads, line_writes, lines })
}

/// Executes `kmemld` (main memory to scratchpad) or `kmemstr` (scratchpad to
/// main memory). Returns the transfer latency.
pub fn exec_transfer(
    i: &Instruction,
    hart_id: usize,
    hart: &HartContext,
    mem: &mut MainMemory,
    spms: &mut Scratchpads,
    cfg: &CoprocConfig,
) -> Result<u64, CoprocError> {
    let count = hart.reg(i.rs2);
    if count == 0 {
        return Err(CoprocError::ZeroCount);
    }
    match i.vector_op() {
        Some(VectorOp::Kmemld) => {
            let loc = map_operand(hart.reg(i.rd), count, hart_id, cfg)?;
            let src = mem.read_block(hart.reg(i.rs1), count)?;
            spms.bytes_mut(loc, count).copy_from_slice(src);
        }
        Some(VectorOp::Kmemstr) => {
            let loc = map_operand(hart.reg(i.rs1), count, hart_id, cfg)?;
            let data = spms.bytes(loc, count).to_vec();
            mem.write_block(hart.reg(i.rd), &data)?;
        }
        _ => return Err(CoprocError::NotVector(*i)),
    }
    Ok(transfer_cycles(count, cfg.initial_latency))
}

/// Coprocessor state of one simulation: scratchpads, MFUs and counters.
#[derive(Debug, Clone)]
pub struct Coprocessor {
    pub cfg: CoprocConfig,
    pub spms: Scratchpads,
    pub mfus: Vec<Mfu>,
    pub stats: CoprocStats,
    /// Per hart: the unit its replaying instruction waits for, and the
    /// cycle of its first replay.
    waiting: [Option<(Gate, u64)>; NUM_HARTS],
}

/// A unit harts can queue for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Gate {
    Mfu(usize),
    Fu(usize, usize),
    Spmi(usize),
    Lsu,
}

impl Coprocessor {
    pub fn new(cfg: CoprocConfig) -> Self {
        Coprocessor {
            spms: Scratchpads::new(&cfg),
            mfus: vec![Mfu::default(); cfg.mfus as usize],
            stats: CoprocStats::default(),
            waiting: [None; NUM_HARTS],
            cfg,
        }
    }

    fn gates(&self, op: VectorOp, hart: usize) -> [(Gate, Resource); 2] {
        let spmi = (Gate::Spmi(self.cfg.spmi_of(hart)), Resource::Spmi);
        if op.is_transfer() {
            return [(Gate::Lsu, Resource::Lsu), spmi];
        }
        let m = self.cfg.mfu_of(hart);
        match self.cfg.scheme {
            Scheme::Shared | Scheme::Dedicated => [(Gate::Mfu(m), Resource::Mfu), spmi],
            Scheme::SharedMfu => {
                let class = self.cfg.unit_of(op).expect("arithmetic op has a unit");
                [(Gate::Fu(m, class.index()), Resource::Fu(class)), spmi]
            }
        }
    }

    /// Oldest waiter first: a free unit is held for a hart that has been
    /// replaying on it longer than `hart`.
    fn reserved(&self, op: VectorOp, hart: usize, now: u64) -> Option<Resource> {
        let since = self.waiting[hart].map_or(now, |w| w.1);
        self.gates(op, hart).into_iter().find_map(|(g, r)| {
            let older = (0..NUM_HARTS).any(|o| o != hart && matches!(self.waiting[o], Some((wg, t)) if wg == g && t < since));
            older.then_some(r)
        })
    }

    /// Cycle from which every unit `op` needs has been free.
    fn freed_at(&self, op: VectorOp, hart: usize) -> u64 {
        self.gates(op, hart)
            .into_iter()
            .map(|(g, _)| match g {
                Gate::Mfu(m) => self.mfus[m].busy_until,
                Gate::Fu(m, c) if self.mfus[m].class_hart[c] != Some(hart as u8) => {
                    self.mfus[m].class_busy_until[c].saturating_sub(self.cfg.initial_latency as u64)
                }
                Gate::Fu(..) | Gate::Lsu => 0,
                Gate::Spmi(i) => self.spms.spmis[i].busy_until,
            })
            .max()
            .unwrap_or(0)
    }

    fn wait(&mut self, op: VectorOp, hart: usize, r: Resource, now: u64) {
        let gate = self.gates(op, hart).into_iter().find(|x| x.1 == r).map(|x| x.0);
        let since = self.waiting[hart].map_or(now, |w| w.1);
        self.waiting[hart] = gate.map(|g| (g, since));
    }

    /// Whether `i` from `hart` could start at cycle `now`.
    pub fn availability(&self, i: &Instruction, hart: usize, now: u64, lsu: &LsuState) -> Availability {
        let Some(op) = i.vector_op() else {
            return Availability::Free;
        };
        let spmi_busy = now < self.spms.spmis[self.cfg.spmi_of(hart)].busy_until;
        if op.is_transfer() {
            if lsu.busy(now) {
                return Availability::Busy(Resource::Lsu);
            }
            if spmi_busy {
                return Availability::Busy(Resource::Spmi);
            }
            return Availability::Free;
        }
        let mfu = &self.mfus[self.cfg.mfu_of(hart)];
        match self.cfg.scheme {
            Scheme::Shared | Scheme::Dedicated => {
                if now < mfu.busy_until {
                    Availability::Busy(Resource::Mfu)
                } else if spmi_busy {
                    Availability::Busy(Resource::Spmi)
                } else {
                    Availability::Free
                }
            }
            Scheme::SharedMfu => {
                let class = self.cfg.unit_of(op).expect("arithmetic op has a unit");
                let c = class.index();
                // The unit streams lines after the SPM access setup, so it
                // only has to be free by then.
                let contended = mfu.class_busy_until[c] > now + self.cfg.initial_latency as u64
                    && mfu.class_hart[c] != Some(hart as u8);
                if contended {
                    Availability::Busy(Resource::Fu(class))
                } else if spmi_busy {
                    Availability::Busy(Resource::Spmi)
                } else {
                    Availability::Free
                }
            }
        }
    }

    /// Attempts to start `i` for `hart` at cycle `now`.
    pub fn try_issue(
        &mut self,
        i: &Instruction,
        hart: usize,
        ctx: &HartContext,
        now: u64,
        mem: &mut MainMemory,
        lsu: &mut LsuState,
    ) -> Result<IssueOutcome, CoprocError> {
        let op = i.vector_op().ok_or(CoprocError::NotVector(*i))?;
        let blocked = match self.availability(i, hart, now, lsu) {
            Availability::Busy(r) => Some(r),
            Availability::Free => self.reserved(op, hart, now),
        };
        if let Some(r) = blocked {
            self.wait(op, hart, r, now);
            return Ok(IssueOutcome::Replay(r));
        }
        let waited = self.waiting[hart].take();
        let spmi = self.cfg.spmi_of(hart);
        if op.is_transfer() {
            let latency = exec_transfer(i, hart, ctx, mem, &mut self.spms, &self.cfg)?;
            let count = ctx.reg(i.rs2);
            lsu.start_transfer(hart as u8, now, count, self.cfg.initial_latency);
            let s = &mut self.spms.spmis[spmi];
            s.busy_until = now + latency;
            s.owner = Some(hart as u8);
            self.stats.transfers += 1;
            self.stats.transfer_bytes += count as u64;
            let lines = line_count(count, self.cfg.lanes);
            match op {
                VectorOp::Kmemld => self.stats.spm_line_writes += lines,
                _ => self.stats.spm_line_reads += lines,
            }
            return Ok(IssueOutcome::Issued(Issued { latency, reg_write: None }));
        }

        // A stalled request is granted the cycle its units freed; the
        // replay slot that collects it can come up to two cycles later.
        let start = match waited {
            Some((_, since)) => self.freed_at(op, hart).clamp(since.max(now.saturating_sub(2)), now),
            None => now,
        };
        let effect = exec_vector(i, hart, ctx, &mut self.spms, &self.cfg)?;
        let end = start + effect.latency;
        let class = self.cfg.unit_of(op).expect("arithmetic op has a unit");
        let mfu = &mut self.mfus[self.cfg.mfu_of(hart)];
        match self.cfg.scheme {
            Scheme::Shared | Scheme::Dedicated => {
                mfu.busy_until = end;
                mfu.hart = Some(hart as u8);
            }
            Scheme::SharedMfu => {
                mfu.busy_until = mfu.busy_until.max(end);
            }
        }
        mfu.class_busy_until[class.index()] = end;
        mfu.class_hart[class.index()] = Some(hart as u8);
        let from = start.max(mfu.union_end);
        self.stats.mfu_busy += end.saturating_sub(from);
        mfu.union_end = mfu.union_end.max(end);

        let s = &mut self.spms.spmis[spmi];
        s.busy_until = end;
        s.owner = Some(hart as u8);

        self.stats.fu_busy[class.index()] += effect.lines;
        self.stats.vector_ops += 1;
        self.stats.vector_line_ops += effect.lines;
        self.stats.spm_line_reads += effect.line_reads;
        self.stats.spm_line_writes += effect.line_writes;
        Ok(IssueOutcome::Issued(Issued {
            latency: end - now,
            reg_write: effect.reg_write.map(|(rd, v)| (rd, v, end)),
        }))
    }

    pub fn units(&self) -> u64 {
        self.cfg.mfus as u64
    }
}

/// Hart count the coprocessor is sized for.
pub const HARTS: usize = NUM_HARTS;
