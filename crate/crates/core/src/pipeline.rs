//! The four-stage, three-hart interleaved pipeline.
//!
//! Fetch takes the hart named by `harc`, which then advances modulo 3; a
//! halted hart leaves a bubble. An instruction retires in the cycle it enters
//! writeback. All instruction semantics happen in execute,
//! including branch resolution and the pc update, so the same hart's next
//! fetch (three cycles after the previous one) always sees the right pc.
//! A coprocessor instruction that finds its resource busy is replayed: the
//! pc stays put and the instruction is fetched again on the hart's next slot.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coproc::{CoprocConfig, CoprocError, CoprocStats, Coprocessor, IssueOutcome, Resource};
use crate::isa::{csr, FuClass, HartContext, Instruction, InstrKind, Mnemonic, Program, ScalarOp, NUM_HARTS};
use crate::memory::{LsuState, MainMemory, MemFault, DEFAULT_DATA_MEMORY};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoreConfig {
    pub data_memory: u32,
    /// Stores to `mailbox + 4·hart` mark the end of one kernel instance.
    pub mailbox: Option<u32>,
    /// Check the same-hart stage distance every cycle.
    pub check_fence: bool,
    pub trace: bool,
    /// Cycles until a scalar load result is usable. Values up to 3 are
    /// hidden by the hart rotation.
    pub load_latency: u32,
}

impl Default for CoreConfig {
    fn default() -> Self {
        CoreConfig { data_memory: DEFAULT_DATA_MEMORY, mailbox: None, check_fence: true, trace: false, load_latency: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub hart: u8,
    pub pc: u32,
    pub instr: Instruction,
    pub replayed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PipelineState {
    /// Fetch, decode, execute, writeback.
    pub stages: [Option<Slot>; 4],
    pub harc: u8,
    pub cycle: u64,
}

impl PipelineState {
    /// Stage positions of `hart`'s in-flight instructions must be at least
    /// three apart.
    pub fn fence_holds(&self) -> bool {
        for a in 0..4 {
            for b in a + 1..4 {
                if let (Some(x), Some(y)) = (&self.stages[a], &self.stages[b]) {
                    if x.hart == y.hart && b - a < 3 {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Nothing left to execute or retire; the writeback slot has already
    /// retired in the cycle it was entered.
    pub fn is_drained(&self) -> bool {
        self.stages[..3].iter().all(Option::is_none)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayEvent {
    pub hart: u8,
    pub pc: u32,
    pub resource: Resource,
    pub cycle: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayCounts {
    pub mfu: u64,
    pub fu: [u64; 5],
    pub spmi: u64,
    pub lsu: u64,
    pub result_pending: u64,
}

impl ReplayCounts {
    pub fn record(&mut self, r: Resource) {
        match r {
            Resource::Mfu => self.mfu += 1,
            Resource::Fu(c) => self.fu[c.index()] += 1,
            Resource::Spmi => self.spmi += 1,
            Resource::Lsu => self.lsu += 1,
            Resource::ResultPending => self.result_pending += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.mfu + self.fu.iter().sum::<u64>() + self.spmi + self.lsu + self.result_pending
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfCounters {
    pub cycles: u64,
    pub retired: [u64; NUM_HARTS],
    /// Retired instructions that were coprocessor instructions.
    pub retired_vector: u64,
    pub replays: ReplayCounts,
    pub max_consecutive_replays: u64,
    pub coproc: CoprocStats,
    pub mem_words: u64,
    pub lsu_busy_cycles: u64,
    pub halted_at: [Option<u64>; NUM_HARTS],
    /// Cycle of every instance-complete store, per hart.
    pub completions: [Vec<u64>; NUM_HARTS],
}

impl PerfCounters {
    pub fn retired_total(&self) -> u64 {
        self.retired.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrapKind {
    #[error("fetch outside program")]
    FetchFault,
    #[error("memory: {0}")]
    Memory(#[from] MemFault),
    #[error("coprocessor: {0}")]
    Coproc(#[from] CoprocError),
    #[error("unknown control register {0:#x}")]
    UnknownCsr(u16),
    #[error("control register {0:#x} is read-only")]
    ReadOnlyCsr(u16),
    #[error("element width {0} is not 8, 16 or 32")]
    BadElementWidth(u32),
    #[error("hazard fence violated")]
    FenceViolation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("trap on hart {hart} at pc {pc:#010x}, cycle {cycle}: {kind}\n{dump}")]
pub struct Trap {
    pub hart: u8,
    pub pc: u32,
    pub cycle: u64,
    pub kind: TrapKind,
    pub dump: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopCondition {
    /// Every hart halted and the pipeline drained.
    AllHalted,
    /// Every hart halted or completed this many instances.
    Instances(u64),
    /// Only the cycle cap applies.
    Cycles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    AllHalted,
    Instances,
    MaxCycles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PendingWrite {
    rd: u8,
    value: u32,
    ready: u64,
}

/// A complete simulated system: pipeline, harts, memory and coprocessor.
#[derive(Debug, Clone)]
pub struct Core {
    pub cfg: CoreConfig,
    pub state: PipelineState,
    pub harts: [HartContext; NUM_HARTS],
    pub halted: [bool; NUM_HARTS],
    pub mem: MainMemory,
    pub coproc: Coprocessor,
    pub lsu: LsuState,
    pub counters: PerfCounters,
    program: Program,
    pending: [Option<PendingWrite>; NUM_HARTS],
    consecutive: [u64; NUM_HARTS],
    trace: String,
    last_events: Vec<ReplayEvent>,
}

/// Hart 0 at the program start, the others halted.
pub fn single_hart(program: &Program) -> [Option<u32>; NUM_HARTS] {
    [Some(program.origin), None, None]
}

impl Core {
    /// Harts with no entry point start halted. `.word` data is placed in
    /// main memory.
    pub fn new(
        program: Program,
        entries: [Option<u32>; NUM_HARTS],
        coproc: CoprocConfig,
        cfg: CoreConfig,
    ) -> Result<Self, MemFault> {
        let mut mem = MainMemory::new(cfg.data_memory);
        for w in &program.data {
            mem.poke(w.addr, 32, w.value)?;
        }
        let harts = std::array::from_fn(|h| HartContext::new(h as u32, entries[h].unwrap_or(0)));
        let halted = std::array::from_fn(|h| entries[h].is_none());
        Ok(Core {
            cfg,
            state: PipelineState::default(),
            harts,
            halted,
            mem,
            coproc: Coprocessor::new(coproc),
            lsu: LsuState::default(),
            counters: PerfCounters::default(),
            program,
            pending: [None; NUM_HARTS],
            consecutive: [0; NUM_HARTS],
            trace: String::new(),
            last_events: Vec::new(),
        })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn trace(&self) -> &str {
        &self.trace
    }

    pub fn take_trace(&mut self) -> String {
        std::mem::take(&mut self.trace)
    }

    /// Replay events recorded during the last step.
    pub fn last_events(&self) -> &[ReplayEvent] {
        &self.last_events
    }

    fn trap(&self, hart: u8, pc: u32, kind: TrapKind) -> Trap {
        let mut dump = String::new();
        let h = &self.harts[hart as usize];
        for (r, v) in h.regs().iter().enumerate() {
            let _ = write!(dump, "x{r:<2}={v:08x}{}", if r % 8 == 7 { "\n" } else { " " });
        }
        let _ = write!(
            dump,
            "vlen={} ewidth={} pscale={} harc={} stages={}",
            h.ctrl.vlen,
            h.ctrl.ewidth,
            h.ctrl.pscale,
            self.state.harc,
            self.stage_text()
        );
        Trap { hart, pc, cycle: self.state.cycle, kind, dump }
    }

    fn stage_text(&self) -> String {
        self.state
            .stages
            .iter()
            .map(|s| match s {
                Some(s) => format!("h{}:{:#x}", s.hart, s.pc),
                None => "-".to_string(),
            })
            .collect::<Vec<_>>()
            .join("\t")
    }

    /// Advances one clock cycle.
    pub fn step(&mut self) -> Result<(), Trap> {
        let now = self.state.cycle;
        self.last_events.clear();
        for h in 0..NUM_HARTS {
            if let Some(p) = self.pending[h] {
                if p.ready <= now {
                    self.harts[h].set_reg(p.rd, p.value);
                    self.pending[h] = None;
                }
            }
        }

        let st = &mut self.state.stages;
        st[3] = st[2].take();
        if let Some(w) = st[3] {
            if !w.replayed {
                self.counters.retired[w.hart as usize] += 1;
                if w.instr.vector_op().is_some() {
                    self.counters.retired_vector += 1;
                }
            }
        }
        st[2] = st[1].take();
        if let Some(mut e) = st[2] {
            e.replayed = !self.execute(&e)?;
            self.state.stages[2] = Some(e);
        }
        let st = &mut self.state.stages;
        st[1] = st[0].take();

        let harc = self.state.harc;
        let h = harc as usize;
        if !self.halted[h] {
            let pc = self.harts[h].pc;
            let instr = match self.program.fetch(pc) {
                Some(i) => *i,
                None => return Err(self.trap(harc, pc, TrapKind::FetchFault)),
            };
            self.state.stages[0] = Some(Slot { hart: harc, pc, instr, replayed: false });
        }
        self.state.harc = (harc + 1) % NUM_HARTS as u8;

        if self.cfg.check_fence && !self.state.fence_holds() {
            return Err(self.trap(harc, self.harts[h].pc, TrapKind::FenceViolation));
        }
        if self.cfg.trace {
            let events = if self.last_events.is_empty() {
                "-".to_string()
            } else {
                self.last_events
                    .iter()
                    .map(|e| format!("replay h{}:{:#x}:{}", e.hart, e.pc, e.resource))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            let _ = writeln!(self.trace, "{now}\t{harc}\t{}\t{events}", self.stage_text());
        }
        self.state.cycle += 1;
        self.counters.cycles = self.state.cycle;
        Ok(())
    }

    fn replay(&mut self, s: &Slot, resource: Resource) -> bool {
        let h = s.hart as usize;
        let ev = ReplayEvent { hart: s.hart, pc: s.pc, resource, cycle: self.state.cycle };
        self.counters.replays.record(resource);
        self.consecutive[h] += 1;
        self.counters.max_consecutive_replays = self.counters.max_consecutive_replays.max(self.consecutive[h]);
        self.last_events.push(ev);
        false
    }

    /// Executes the slot in the execute stage. Returns false on replay.
    fn execute(&mut self, s: &Slot) -> Result<bool, Trap> {
        let h = s.hart as usize;
        let now = self.state.cycle;
        if self.pending[h].is_some_and(|p| p.ready > now) {
            return Ok(self.replay(s, Resource::ResultPending));
        }
        let i = s.instr;
        let result = match i.op {
            Mnemonic::Vector(_) => self.execute_vector(s),
            Mnemonic::Scalar(op) => self.execute_scalar(op, &i, h, s.pc),
        };
        match result {
            Ok(Some(r)) => Ok(self.replay(s, r)),
            Ok(None) => {
                self.consecutive[h] = 0;
                Ok(true)
            }
            Err(kind) => Err(self.trap(s.hart, s.pc, kind)),
        }
    }

    fn execute_vector(&mut self, s: &Slot) -> Result<Option<Resource>, TrapKind> {
        let h = s.hart as usize;
        let now = self.state.cycle;
        let out = self.coproc.try_issue(&s.instr, h, &self.harts[h], now, &mut self.mem, &mut self.lsu)?;
        match out {
            IssueOutcome::Replay(r) => Ok(Some(r)),
            IssueOutcome::Issued(iss) => {
                if let Some((rd, value, ready)) = iss.reg_write {
                    self.pending[h] = Some(PendingWrite { rd, value, ready });
                }
                self.harts[h].pc = s.pc.wrapping_add(4);
                Ok(None)
            }
        }
    }

    fn execute_scalar(&mut self, op: ScalarOp, i: &Instruction, h: usize, pc: u32) -> Result<Option<Resource>, TrapKind> {
        use ScalarOp::*;
        let now = self.state.cycle;
        let hart = &self.harts[h];
        let a = hart.reg(i.rs1);
        let b = hart.reg(i.rs2);
        let imm = i.imm as u32;
        let mut next = pc.wrapping_add(4);
        let mut rd_val: Option<u32> = None;
        match op.kind() {
            InstrKind::AluReg | InstrKind::MulDiv => rd_val = Some(alu(op, a, b)),
            InstrKind::AluImm => rd_val = Some(alu(op, a, imm)),
            InstrKind::UpperImm => rd_val = Some(if op == Lui { imm } else { pc.wrapping_add(imm) }),
            InstrKind::Branch => {
                let taken = match op {
                    Beq => a == b,
                    Bne => a != b,
                    Blt => (a as i32) < (b as i32),
                    Bge => (a as i32) >= (b as i32),
                    Bltu => a < b,
                    Bgeu => a >= b,
                    _ => unreachable!(),
                };
                if taken {
                    next = pc.wrapping_add(imm);
                }
            }
            InstrKind::Jump => {
                rd_val = Some(next);
                next = pc.wrapping_add(imm);
            }
            InstrKind::JumpReg => {
                rd_val = Some(next);
                next = a.wrapping_add(imm) & !1;
            }
            InstrKind::Load => {
                if self.lsu.busy(now) {
                    return Ok(Some(Resource::Lsu));
                }
                let addr = a.wrapping_add(imm);
                let v = match op {
                    Lb => self.mem.read(addr, 8)? as i8 as i32 as u32,
                    Lh => self.mem.read(addr, 16)? as i16 as i32 as u32,
                    Lw => self.mem.read(addr, 32)?,
                    Lbu => self.mem.read(addr, 8)?,
                    Lhu => self.mem.read(addr, 16)?,
                    _ => unreachable!(),
                };
                self.lsu.scalar_access();
                if self.cfg.load_latency > 3 {
                    self.pending[h] = Some(PendingWrite { rd: i.rd, value: v, ready: now + self.cfg.load_latency as u64 });
                } else {
                    rd_val = Some(v);
                }
            }
            InstrKind::Store => {
                if self.lsu.port_busy(now) {
                    return Ok(Some(Resource::Lsu));
                }
                let addr = a.wrapping_add(imm);
                let width = match op {
                    Sb => 8,
                    Sh => 16,
                    _ => 32,
                };
                self.mem.write(addr, width, b)?;
                self.lsu.scalar_access();
                if let Some(mb) = self.cfg.mailbox {
                    if addr == mb.wrapping_add(4 * h as u32) {
                        self.counters.completions[h].push(now);
                    }
                }
            }
            InstrKind::CsrAccess => rd_val = Some(self.csr_access(op, i, h)?),
            InstrKind::Halt => {
                self.halted[h] = true;
                self.counters.halted_at[h] = Some(now);
            }
            InstrKind::Vector(_) => unreachable!(),
        }
        let hart = &mut self.harts[h];
        if let Some(v) = rd_val {
            hart.set_reg(i.rd, v);
        }
        hart.pc = next;
        Ok(None)
    }

    fn csr_access(&mut self, op: ScalarOp, i: &Instruction, h: usize) -> Result<u32, TrapKind> {
        use ScalarOp::*;
        let id = i.imm as u16;
        let cycle = self.state.cycle;
        let hart = &mut self.harts[h];
        let old = match id {
            csr::VLEN => hart.ctrl.vlen,
            csr::EWIDTH => hart.ctrl.ewidth,
            csr::PSCALE => hart.ctrl.pscale,
            csr::CYCLE => cycle as u32,
            csr::CYCLEH => (cycle >> 32) as u32,
            csr::HARTID => hart.ctrl.hartid,
            _ => return Err(TrapKind::UnknownCsr(id)),
        };
        let src = match op {
            Csrrw | Csrrs | Csrrc => hart.reg(i.rs1),
            _ => i.rs1 as u32,
        };
        let new = match op {
            Csrrw | Csrrwi => Some(src),
            Csrrs | Csrrsi if i.rs1 != 0 => Some(old | src),
            Csrrc | Csrrci if i.rs1 != 0 => Some(old & !src),
            _ => None,
        };
        if let Some(v) = new {
            match id {
                csr::VLEN => hart.ctrl.vlen = v,
                csr::EWIDTH => {
                    if !matches!(v, 8 | 16 | 32) {
                        return Err(TrapKind::BadElementWidth(v));
                    }
                    hart.ctrl.ewidth = v;
                }
                csr::PSCALE => hart.ctrl.pscale = v,
                _ => return Err(TrapKind::ReadOnlyCsr(id)),
            }
        }
        Ok(old)
    }

    fn done(&self, stop: StopCondition) -> Option<StopReason> {
        let all_halted = self.halted.iter().all(|h| *h) && self.state.is_drained();
        match stop {
            StopCondition::AllHalted if all_halted => Some(StopReason::AllHalted),
            StopCondition::Instances(n) => {
                let ok = (0..NUM_HARTS).all(|h| self.halted[h] || self.counters.completions[h].len() as u64 >= n);
                if ok || all_halted {
                    Some(StopReason::Instances)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Steps until `stop` holds or `max_cycles` have elapsed.
    pub fn run(&mut self, stop: StopCondition, max_cycles: u64) -> Result<StopReason, Trap> {
        loop {
            if let Some(r) = self.done(stop) {
                self.finish();
                return Ok(r);
            }
            if self.state.cycle >= max_cycles {
                self.finish();
                return Ok(StopReason::MaxCycles);
            }
            self.step()?;
        }
    }

    fn finish(&mut self) {
        self.counters.cycles = self.state.cycle;
        self.counters.coproc = self.coproc.stats.clone();
        self.counters.mem_words = self.mem.port_words();
        self.counters.lsu_busy_cycles = self.lsu.busy_cycles;
    }

    /// Counters with coprocessor and memory totals folded in.
    pub fn snapshot(&mut self) -> PerfCounters {
        self.finish();
        self.counters.clone()
    }
}

fn alu(op: ScalarOp, a: u32, b: u32) -> u32 {
    use ScalarOp::*;
    let (sa, sb) = (a as i32, b as i32);
    match op {
        Add | Addi => a.wrapping_add(b),
        Sub => a.wrapping_sub(b),
        Sll | Slli => a << (b & 31),
        Slt | Slti => (sa < sb) as u32,
        Sltu | Sltiu => (a < b) as u32,
        Xor | Xori => a ^ b,
        Srl | Srli => a >> (b & 31),
        Sra | Srai => (sa >> (b & 31)) as u32,
        Or | Ori => a | b,
        And | Andi => a & b,
        Mul => a.wrapping_mul(b),
        Mulh => ((sa as i64 * sb as i64) >> 32) as u32,
        Mulhsu => ((sa as i64 as i128 * b as i128) >> 32) as u32,
        Mulhu => ((a as u64 * b as u64) >> 32) as u32,
        Div => {
            if b == 0 {
                u32::MAX
            } else {
                sa.wrapping_div(sb) as u32
            }
        }
        Divu => a.checked_div(b).unwrap_or(u32::MAX),
        Rem => {
            if b == 0 {
                a
            } else {
                sa.wrapping_rem(sb) as u32
            }
        }
        Remu => a.checked_rem(b).unwrap_or(a),
        _ => unreachable!("{op:?} is not an ALU operation"),
    }
}

/// Scalar result of an ALU or mul/div instruction, exposed for tests.
pub fn alu_result(op: ScalarOp, a: u32, b: u32) -> u32 {
    alu(op, a, b)
}

impl fmt::Display for PipelineState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cycle {} harc {}", self.cycle, self.harc)?;
        for s in &self.stages {
            match s {
                Some(s) => write!(f, " h{}:{:#x}", s.hart, s.pc)?,
                None => write!(f, " -")?,
            }
        }
        Ok(())
    }
}

/// Index of the unit class in counter arrays, for callers that hold names.
pub fn fu_index(c: FuClass) -> usize {
    c.index()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asm::{assemble, SourceUnit};
    use crate::coproc::Scheme;

    fn prog(src: &str) -> Program {
        assemble(&SourceUnit::from_text("t.s", src), 0).unwrap()
    }

    fn shared() -> CoprocConfig {
        CoprocConfig::new(Scheme::Shared, 1, 4).unwrap()
    }

    fn straight(n: usize) -> String {
        let mut s = String::new();
        for k in 0..n {
            s.push_str(&format!("addi x{}, x{}, 1\n", 1 + k % 5, 1 + k % 5));
        }
        s.push_str("ebreak\n");
        s
    }

    #[test]
    fn alu_edge_cases() {
        use ScalarOp::*;
        assert_eq!(alu(Add, 0x7FFF_FFFF, 1), 0x8000_0000);
        assert_eq!(alu(Div, 5, 0), u32::MAX);
        assert_eq!(alu(Rem, 5, 0), 5);
        assert_eq!(alu(Div, i32::MIN as u32, u32::MAX), i32::MIN as u32);
        assert_eq!(alu(Rem, i32::MIN as u32, u32::MAX), 0);
        assert_eq!(alu(Mulh, u32::MAX, u32::MAX), 0);
        assert_eq!(alu(Mulhu, u32::MAX, u32::MAX), 0xFFFF_FFFE);
        assert_eq!(alu(Mulhsu, u32::MAX, u32::MAX), u32::MAX);
        assert_eq!(alu(Sra, 0x8000_0000, 33), 0xC000_0000);
    }

    #[test]
    fn three_harts_reach_ipc_one() {
        let p = prog(&straight(300));
        let e = Some(0);
        let mut c = Core::new(p, [e, e, e], shared(), CoreConfig::default()).unwrap();
        assert_eq!(c.run(StopCondition::AllHalted, 10_000).unwrap(), StopReason::AllHalted);
        assert_eq!(c.counters.retired_total(), 903);
        assert!(c.counters.cycles <= 906);
    }

    #[test]
    fn single_hart_retires_every_third_cycle() {
        let p = prog(&straight(99));
        let entries = single_hart(&p);
        let mut c = Core::new(p, entries, shared(), CoreConfig::default()).unwrap();
        c.run(StopCondition::AllHalted, 10_000).unwrap();
        assert_eq!(c.counters.retired[0], 100);
        assert_eq!(c.counters.cycles, 3 * 99 + 4);
    }

    #[test]
    fn empty_program_retires_nothing() {
        let p = prog("ebreak\n");
        let mut c = Core::new(p, [None; 3], shared(), CoreConfig::default()).unwrap();
        c.run(StopCondition::AllHalted, 100).unwrap();
        assert_eq!(c.counters.retired_total(), 0);
    }

    #[test]
    fn taken_branch_redirects_next_fetch() {
        let p = prog("beq x0, x0, skip\naddi x1, x0, 1\nskip: addi x2, x0, 2\nebreak\n");
        let e = Some(0);
        let mut cfg = CoreConfig::default();
        cfg.trace = true;
        let mut c = Core::new(p, [e, e, e], shared(), cfg).unwrap();
        c.run(StopCondition::AllHalted, 100).unwrap();
        for h in 0..3 {
            assert_eq!(c.harts[h].reg(1), 0);
            assert_eq!(c.harts[h].reg(2), 2);
            assert_eq!(c.counters.retired[h], 3);
        }
        // hart 0 fetches the branch at 0, resolves it at 2 and fetches the
        // target at 3 with no bubbles for harts 1 and 2.
        let line3 = c.trace().lines().nth(3).unwrap();
        assert!(line3.starts_with("3\t0\th0:0x8\th2:0x0\th1:0x0\th0:0x0"), "{line3}");
    }

    #[test]
    fn csr_reads() {
        let p = prog("csrr x5, hartid\ncsrwi ewidth, 16\ncsrr x6, ewidth\nebreak\n");
        let e = Some(0);
        let mut c = Core::new(p, [e, e, e], shared(), CoreConfig::default()).unwrap();
        c.run(StopCondition::AllHalted, 100).unwrap();
        assert_eq!(c.harts[2].reg(5), 2);
        assert_eq!(c.harts[1].reg(6), 16);
    }

    #[test]
    fn bad_ewidth_traps() {
        let p = prog("csrwi ewidth, 12\nebreak\n");
        let entries = single_hart(&p);
        let mut c = Core::new(p, entries, shared(), CoreConfig::default()).unwrap();
        let t = c.run(StopCondition::AllHalted, 100).unwrap_err();
        assert_eq!(t.kind, TrapKind::BadElementWidth(12));
    }

    #[test]
    fn max_cycles_bounds_livelock() {
        let p = prog("loop: j loop\n");
        let entries = single_hart(&p);
        let mut c = Core::new(p, entries, shared(), CoreConfig::default()).unwrap();
        assert_eq!(c.run(StopCondition::AllHalted, 50).unwrap(), StopReason::MaxCycles);
        assert_eq!(c.counters.cycles, 50);
    }

    #[test]
    fn dot_product_result_blocks_next_instruction() {
        let src = "li x1, 0x100000\nli x2, 0x100040\ncsrwi vlen, 16\nkdotp (x3), (x1), (x2)\naddi x4, x3, 0\nebreak\n";
        let p = prog(src);
        let entries = single_hart(&p);
        let mut c = Core::new(p, entries, shared(), CoreConfig::default()).unwrap();
        c.run(StopCondition::AllHalted, 1000).unwrap();
        assert!(c.counters.replays.result_pending > 0);
    }

    #[test]
    fn shared_unit_is_granted_oldest_first() {
        // 8 lines + 4 setup: a latency that is a multiple of the rotation
        let mut src = String::from("li x5, 32\ncsrw vlen, x5\nli x1, 0x100000\n");
        for _ in 0..30 {
            src.push_str("kaddv (x1), (x1), (x1)\n");
        }
        src.push_str("ebreak\n");
        let p = prog(&src);
        let mut c = Core::new(p, [Some(0); NUM_HARTS], shared(), CoreConfig::default()).unwrap();
        c.run(StopCondition::AllHalted, 100_000).unwrap();
        let halts: Vec<u64> = c.counters.halted_at.iter().map(|h| h.unwrap()).collect();
        let spread = halts.iter().max().unwrap() - halts.iter().min().unwrap();
        assert!(spread <= 3 * 12, "halt cycles {halts:?}");
        // 90 back-to-back ops keep the unit busy with no idle gaps
        assert!(c.counters.coproc.mfu_busy >= 90 * 12);
        assert!(c.counters.cycles < 90 * 12 + 60);
    }
}
