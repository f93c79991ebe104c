//! Decoded instruction set: the RV32IM scalar subset, the 18-instruction
//! vector extension, per-hart architectural state and static classification.
//!
//! Programs only ever exist in decoded form; there is no binary encoding.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Number of hardware threads interleaved in the pipeline.
pub const NUM_HARTS: usize = 3;

/// Control register ids used by csr-access instructions.
pub mod csr {
    pub const VLEN: u16 = 0x800;
    pub const EWIDTH: u16 = 0x801;
    pub const PSCALE: u16 = 0x802;
    pub const CYCLE: u16 = 0xC00;
    pub const CYCLEH: u16 = 0xC80;
    pub const HARTID: u16 = 0xF14;

    /// Symbolic names accepted by the assembler, in disassembly order.
    pub const NAMES: &[(&str, u16)] = &[
        ("vlen", VLEN),
        ("ewidth", EWIDTH),
        ("pscale", PSCALE),
        ("cyclecount", CYCLE),
        ("cyclecounth", CYCLEH),
        ("hartid", HARTID),
    ];

    pub fn name_of(id: u16) -> Option<&'static str> {
        NAMES.iter().find(|(_, n)| *n == id).map(|(s, _)| *s)
    }

    pub fn id_of(name: &str) -> Option<u16> {
        NAMES.iter().find(|(s, _)| *s == name).map(|(_, n)| *n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsaError {
    #[error("register index {0} out of range")]
    RegisterOutOfRange(u8),
    #[error("{0} does not use operand `{1}`, which must be zero")]
    UnusedOperand(Mnemonic, &'static str),
    #[error("{0} is not an arithmetic vector instruction")]
    NotArithmeticVector(Mnemonic),
    #[error("{0} is not a vector instruction")]
    NotVector(Mnemonic),
}

/// Scalar operations of the RV32IM subset plus `ebreak`, which halts a hart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalarOp {
    Add,
    Sub,
    Sll,
    Slt,
    Sltu,
    Xor,
    Srl,
    Sra,
    Or,
    And,
    Addi,
    Slti,
    Sltiu,
    Xori,
    Ori,
    Andi,
    Slli,
    Srli,
    Srai,
    Lb,
    Lh,
    Lw,
    Lbu,
    Lhu,
    Sb,
    Sh,
    Sw,
    Beq,
    Bne,
    Blt,
    Bge,
    Bltu,
    Bgeu,
    Jal,
    Jalr,
    Lui,
    Auipc,
    Csrrw,
    Csrrs,
    Csrrc,
    Csrrwi,
    Csrrsi,
    Csrrci,
    Mul,
    Mulh,
    Mulhsu,
    Mulhu,
    Div,
    Divu,
    Rem,
    Remu,
    Ebreak,
}

/// The custom vector extension. `Kvslt` is the vector-vector compare and
/// `Ksvslt` the vector-scalar one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VectorOp {
    Kmemld,
    Kmemstr,
    Kaddv,
    Ksubv,
    Kvmul,
    Kvred,
    Kdotp,
    Ksvaddsc,
    Ksvaddrf,
    Ksvmuls,
    Ksvmulrf,
    Kdotpps,
    Ksrlv,
    Ksrav,
    Krelu,
    Kvslt,
    Ksvslt,
    Kvcp,
}

impl VectorOp {
    pub const ALL: [VectorOp; 18] = [
        VectorOp::Kmemld,
        VectorOp::Kmemstr,
        VectorOp::Kaddv,
        VectorOp::Ksubv,
        VectorOp::Kvmul,
        VectorOp::Kvred,
        VectorOp::Kdotp,
        VectorOp::Ksvaddsc,
        VectorOp::Ksvaddrf,
        VectorOp::Ksvmuls,
        VectorOp::Ksvmulrf,
        VectorOp::Kdotpps,
        VectorOp::Ksrlv,
        VectorOp::Ksrav,
        VectorOp::Krelu,
        VectorOp::Kvslt,
        VectorOp::Ksvslt,
        VectorOp::Kvcp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VectorOp::Kmemld => "kmemld",
            VectorOp::Kmemstr => "kmemstr",
            VectorOp::Kaddv => "kaddv",
            VectorOp::Ksubv => "ksubv",
            VectorOp::Kvmul => "kvmul",
            VectorOp::Kvred => "kvred",
            VectorOp::Kdotp => "kdotp",
            VectorOp::Ksvaddsc => "ksvaddsc",
            VectorOp::Ksvaddrf => "ksvaddrf",
            VectorOp::Ksvmuls => "ksvmuls",
            VectorOp::Ksvmulrf => "ksvmulrf",
            VectorOp::Kdotpps => "kdotpps",
            VectorOp::Ksrlv => "ksrlv",
            VectorOp::Ksrav => "ksrav",
            VectorOp::Krelu => "krelu",
            VectorOp::Kvslt => "kvslt",
            VectorOp::Ksvslt => "ksvslt",
            VectorOp::Kvcp => "kvcp",
        }
    }

    /// Operand shape: `true` for each of (rd, rs1, rs2) that is written in
    /// parentheses, `None` when the operand is absent.
    pub fn operand_shape(self) -> [Option<bool>; 3] {
        use VectorOp::*;
        match self {
            Kvred | Krelu | Kvcp => [Some(true), Some(true), None],
            Ksvaddrf | Ksvmulrf | Ksrlv | Ksrav | Ksvslt => [Some(true), Some(true), Some(false)],
            _ => [Some(true), Some(true), Some(true)],
        }
    }

    pub fn has_rs2(self) -> bool {
        self.operand_shape()[2].is_some()
    }

    pub fn is_transfer(self) -> bool {
        matches!(self, VectorOp::Kmemld | VectorOp::Kmemstr)
    }
}

impl ScalarOp {
    pub fn name(self) -> &'static str {
        use ScalarOp::*;
        match self {
            Add => "add",
            Sub => "sub",
            Sll => "sll",
            Slt => "slt",
            Sltu => "sltu",
            Xor => "xor",
            Srl => "srl",
            Sra => "sra",
            Or => "or",
            And => "and",
            Addi => "addi",
            Slti => "slti",
            Sltiu => "sltiu",
            Xori => "xori",
            Ori => "ori",
            Andi => "andi",
            Slli => "slli",
            Srli => "srli",
            Srai => "srai",
            Lb => "lb",
            Lh => "lh",
            Lw => "lw",
            Lbu => "lbu",
            Lhu => "lhu",
            Sb => "sb",
            Sh => "sh",
            Sw => "sw",
            Beq => "beq",
            Bne => "bne",
            Blt => "blt",
            Bge => "bge",
            Bltu => "bltu",
            Bgeu => "bgeu",
            Jal => "jal",
            Jalr => "jalr",
            Lui => "lui",
            Auipc => "auipc",
            Csrrw => "csrrw",
            Csrrs => "csrrs",
            Csrrc => "csrrc",
            Csrrwi => "csrrwi",
            Csrrsi => "csrrsi",
            Csrrci => "csrrci",
            Mul => "mul",
            Mulh => "mulh",
            Mulhsu => "mulhsu",
            Mulhu => "mulhu",
            Div => "div",
            Divu => "divu",
            Rem => "rem",
            Remu => "remu",
            Ebreak => "ebreak",
        }
    }

    pub const ALL: [ScalarOp; 52] = {
        use ScalarOp::*;
        [
            Add, Sub, Sll, Slt, Sltu, Xor, Srl, Sra, Or, And, Addi, Slti, Sltiu, Xori, Ori, Andi,
            Slli, Srli, Srai, Lb, Lh, Lw, Lbu, Lhu, Sb, Sh, Sw, Beq, Bne, Blt, Bge, Bltu, Bgeu,
            Jal, Jalr, Lui, Auipc, Csrrw, Csrrs, Csrrc, Csrrwi, Csrrsi, Csrrci, Mul, Mulh,
            Mulhsu, Mulhu, Div, Divu, Rem, Remu, Ebreak,
        ]
    };

    pub fn kind(self) -> InstrKind {
        use ScalarOp::*;
        match self {
            Add | Sub | Sll | Slt | Sltu | Xor | Srl | Sra | Or | And => InstrKind::AluReg,
            Addi | Slti | Sltiu | Xori | Ori | Andi | Slli | Srli | Srai => InstrKind::AluImm,
            Lb | Lh | Lw | Lbu | Lhu => InstrKind::Load,
            Sb | Sh | Sw => InstrKind::Store,
            Beq | Bne | Blt | Bge | Bltu | Bgeu => InstrKind::Branch,
            Jal => InstrKind::Jump,
            Jalr => InstrKind::JumpReg,
            Lui | Auipc => InstrKind::UpperImm,
            Csrrw | Csrrs | Csrrc | Csrrwi | Csrrsi | Csrrci => InstrKind::CsrAccess,
            Mul | Mulh | Mulhsu | Mulhu | Div | Divu | Rem | Remu => InstrKind::MulDiv,
            Ebreak => InstrKind::Halt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mnemonic {
    Scalar(ScalarOp),
    Vector(VectorOp),
}

impl Mnemonic {
    pub fn name(self) -> &'static str {
        match self {
            Mnemonic::Scalar(s) => s.name(),
            Mnemonic::Vector(v) => v.name(),
        }
    }

    pub fn from_name(name: &str) -> Option<Mnemonic> {
        ScalarOp::ALL
            .iter()
            .find(|s| s.name() == name)
            .map(|s| Mnemonic::Scalar(*s))
            .or_else(|| {
                VectorOp::ALL
                    .iter()
                    .find(|v| v.name() == name)
                    .map(|v| Mnemonic::Vector(*v))
            })
    }
}

impl fmt::Display for Mnemonic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Coarse instruction kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstrKind {
    AluReg,
    AluImm,
    Load,
    Store,
    Branch,
    Jump,
    JumpReg,
    UpperImm,
    CsrAccess,
    MulDiv,
    Halt,
    Vector(VectorOp),
}

/// Internal functional units of the MFU.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FuClass {
    Adder,
    Multiplier,
    Shifter,
    Compare,
    Move,
}

impl FuClass {
    pub const ALL: [FuClass; 5] = [
        FuClass::Adder,
        FuClass::Multiplier,
        FuClass::Shifter,
        FuClass::Compare,
        FuClass::Move,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            FuClass::Adder => "ADDER",
            FuClass::Multiplier => "MULTIPLIER",
            FuClass::Shifter => "SHIFTER",
            FuClass::Compare => "COMPARE",
            FuClass::Move => "MOVE",
        }
    }
}

impl fmt::Display for FuClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One decoded instruction. Fields an instruction does not use are zero.
///
/// Scalar immediates hold the final operand value: `lui`/`auipc` carry the
/// already-shifted upper immediate, branches and `jal` a byte offset, and
/// csr-access instructions the control register id (with the 5-bit
/// immediate of the `*i` forms in `rs1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub op: Mnemonic,
    pub rd: u8,
    pub rs1: u8,
    pub rs2: u8,
    pub imm: i32,
}

fn check_reg(r: u8) -> Result<u8, IsaError> {
    if r < 32 {
        Ok(r)
    } else {
        Err(IsaError::RegisterOutOfRange(r))
    }
}

impl Instruction {
    /// Builds an instruction, enforcing register range and the zero-field rules.
    pub fn new(op: Mnemonic, rd: u8, rs1: u8, rs2: u8, imm: i32) -> Result<Self, IsaError> {
        check_reg(rd)?;
        check_reg(rs1)?;
        check_reg(rs2)?;
        let (uses_rd, uses_rs1, uses_rs2, uses_imm) = match op {
            Mnemonic::Vector(v) => (true, true, v.has_rs2(), false),
            Mnemonic::Scalar(s) => match s.kind() {
                InstrKind::AluReg | InstrKind::MulDiv => (true, true, true, false),
                InstrKind::AluImm | InstrKind::Load | InstrKind::JumpReg => (true, true, false, true),
                InstrKind::Store | InstrKind::Branch => (false, true, true, true),
                InstrKind::Jump | InstrKind::UpperImm => (true, false, false, true),
                InstrKind::CsrAccess => (true, true, false, true),
                InstrKind::Halt => (false, false, false, false),
                InstrKind::Vector(_) => unreachable!(),
            },
        };
        if !uses_rd && rd != 0 {
            return Err(IsaError::UnusedOperand(op, "rd"));
        }
        if !uses_rs1 && rs1 != 0 {
            return Err(IsaError::UnusedOperand(op, "rs1"));
        }
        if !uses_rs2 && rs2 != 0 {
            return Err(IsaError::UnusedOperand(op, "rs2"));
        }
        if !uses_imm && imm != 0 {
            return Err(IsaError::UnusedOperand(op, "imm"));
        }
        Ok(Instruction { op, rd, rs1, rs2, imm })
    }

    pub fn scalar(op: ScalarOp, rd: u8, rs1: u8, rs2: u8, imm: i32) -> Result<Self, IsaError> {
        Self::new(Mnemonic::Scalar(op), rd, rs1, rs2, imm)
    }

    pub fn vector(op: VectorOp, rd: u8, rs1: u8, rs2: u8) -> Result<Self, IsaError> {
        Self::new(Mnemonic::Vector(op), rd, rs1, rs2, 0)
    }

    /// `addi x0, x0, 0`.
    pub fn nop() -> Self {
        Instruction { op: Mnemonic::Scalar(ScalarOp::Addi), rd: 0, rs1: 0, rs2: 0, imm: 0 }
    }

    pub fn kind(&self) -> InstrKind {
        match self.op {
            Mnemonic::Scalar(s) => s.kind(),
            Mnemonic::Vector(v) => InstrKind::Vector(v),
        }
    }

    pub fn vector_op(&self) -> Option<VectorOp> {
        match self.op {
            Mnemonic::Vector(v) => Some(v),
            Mnemonic::Scalar(_) => None,
        }
    }
}

/// True exactly for the 18 vector kinds.
pub fn is_coprocessor(i: &Instruction) -> bool {
    matches!(i.op, Mnemonic::Vector(_))
}

/// Functional unit class an arithmetic vector instruction occupies.
pub fn classify_unit(i: &Instruction) -> Result<FuClass, IsaError> {
    use VectorOp::*;
    let v = match i.op {
        Mnemonic::Vector(v) => v,
        Mnemonic::Scalar(_) => return Err(IsaError::NotArithmeticVector(i.op)),
    };
    Ok(match v {
        Kaddv | Ksubv | Kvred | Ksvaddsc | Ksvaddrf => FuClass::Adder,
        Kvmul | Ksvmuls | Ksvmulrf | Kdotp | Kdotpps => FuClass::Multiplier,
        Ksrlv | Ksrav => FuClass::Shifter,
        Krelu | Kvslt | Ksvslt => FuClass::Compare,
        Kvcp => FuClass::Move,
        Kmemld | Kmemstr => return Err(IsaError::NotArithmeticVector(i.op)),
    })
}

/// Whether a vector instruction writes the scalar register file.
pub fn writes_register(i: &Instruction) -> Result<bool, IsaError> {
    match i.op {
        Mnemonic::Vector(v) => Ok(matches!(v, VectorOp::Kdotp | VectorOp::Kdotpps)),
        Mnemonic::Scalar(_) => Err(IsaError::NotVector(i.op)),
    }
}

/// Per-hart control registers read and written through csr-access.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ControlRegisters {
    /// Vector length in bytes.
    pub vlen: u32,
    /// Element width in bits: 8, 16 or 32.
    pub ewidth: u32,
    /// Right shift applied by `kdotpps`.
    pub pscale: u32,
    pub cyclecount: u64,
    pub hartid: u32,
}

impl ControlRegisters {
    pub fn new(hartid: u32) -> Self {
        ControlRegisters { vlen: 4, ewidth: 32, pscale: 0, cyclecount: 0, hartid }
    }
}

/// Replicated architectural state of one hart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HartContext {
    regs: [u32; 32],
    pub pc: u32,
    pub ctrl: ControlRegisters,
}

impl HartContext {
    pub fn new(hartid: u32, pc: u32) -> Self {
        HartContext { regs: [0; 32], pc, ctrl: ControlRegisters::new(hartid) }
    }

    #[inline]
    pub fn reg(&self, r: u8) -> u32 {
        self.regs[r as usize]
    }

    /// Writes to x0 are discarded.
    #[inline]
    pub fn set_reg(&mut self, r: u8, value: u32) {
        if r != 0 {
            self.regs[r as usize] = value;
        }
    }

    pub fn regs(&self) -> &[u32; 32] {
        &self.regs
    }
}

/// A word placed in data memory by the `.word` directive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DataWord {
    pub addr: u32,
    pub value: u32,
}

/// An assembled program: instruction sequence, label table and load origin.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub instrs: Vec<Instruction>,
    pub labels: BTreeMap<String, usize>,
    pub origin: u32,
    pub data: Vec<DataWord>,
}

impl Program {
    pub fn address_of(&self, index: usize) -> u32 {
        self.origin.wrapping_add(4 * index as u32)
    }

    pub fn label_address(&self, name: &str) -> Option<u32> {
        self.labels.get(name).map(|&i| self.address_of(i))
    }

    /// Instruction at a byte address, if it lies inside the program.
    pub fn fetch(&self, pc: u32) -> Option<&Instruction> {
        let off = pc.checked_sub(self.origin)?;
        if off % 4 != 0 {
            return None;
        }
        self.instrs.get((off / 4) as usize)
    }

    /// Same instructions, origin and data; labels may differ.
    pub fn same_code(&self, other: &Program) -> bool {
        self.instrs == other.instrs && self.origin == other.origin && self.data == other.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(op: VectorOp) -> Instruction {
        let rs2 = if op.has_rs2() { 5 } else { 0 };
        Instruction::vector(op, 3, 4, rs2).unwrap()
    }

    #[test]
    fn unit_classes() {
        assert_eq!(classify_unit(&v(VectorOp::Kaddv)).unwrap(), FuClass::Adder);
        assert_eq!(classify_unit(&v(VectorOp::Kdotp)).unwrap(), FuClass::Multiplier);
        assert_eq!(classify_unit(&v(VectorOp::Kvcp)).unwrap(), FuClass::Move);
        assert_eq!(classify_unit(&v(VectorOp::Ksrav)).unwrap(), FuClass::Shifter);
        assert_eq!(classify_unit(&v(VectorOp::Kvslt)).unwrap(), FuClass::Compare);
        assert!(classify_unit(&v(VectorOp::Kmemld)).is_err());
        assert!(classify_unit(&v(VectorOp::Kmemstr)).is_err());
        assert!(classify_unit(&Instruction::nop()).is_err());
    }

    #[test]
    fn classification_is_total_over_arithmetic_kinds() {
        for op in VectorOp::ALL {
            let r = classify_unit(&v(op));
            assert_eq!(r.is_ok(), !op.is_transfer(), "{op:?}");
        }
    }

    #[test]
    fn coprocessor_predicate() {
        assert!(is_coprocessor(&v(VectorOp::Kmemld)));
        assert!(!is_coprocessor(&Instruction::nop()));
        let csr = Instruction::scalar(ScalarOp::Csrrs, 1, 0, 0, csr::HARTID as i32).unwrap();
        assert!(!is_coprocessor(&csr));
        assert_eq!(VectorOp::ALL.iter().filter(|o| is_coprocessor(&v(**o))).count(), 18);
    }

    #[test]
    fn register_writers() {
        assert!(writes_register(&v(VectorOp::Kdotp)).unwrap());
        assert!(writes_register(&v(VectorOp::Kdotpps)).unwrap());
        assert!(!writes_register(&v(VectorOp::Kaddv)).unwrap());
        assert!(!writes_register(&v(VectorOp::Kmemstr)).unwrap());
        for op in VectorOp::ALL {
            if writes_register(&v(op)).unwrap() {
                assert!(is_coprocessor(&v(op)));
            }
        }
        assert!(writes_register(&Instruction::nop()).is_err());
    }

    #[test]
    fn field_invariants() {
        assert_eq!(
            Instruction::vector(VectorOp::Kvred, 3, 4, 5),
            Err(IsaError::UnusedOperand(Mnemonic::Vector(VectorOp::Kvred), "rs2"))
        );
        assert!(Instruction::new(Mnemonic::Vector(VectorOp::Kaddv), 1, 2, 3, 7).is_err());
        assert_eq!(
            Instruction::scalar(ScalarOp::Add, 32, 0, 0, 0),
            Err(IsaError::RegisterOutOfRange(32))
        );
        assert!(Instruction::scalar(ScalarOp::Sw, 1, 2, 3, 0).is_err());
    }

    #[test]
    fn x0_is_hardwired() {
        let mut h = HartContext::new(0, 0);
        h.set_reg(0, 55);
        h.set_reg(1, 55);
        assert_eq!(h.reg(0), 0);
        assert_eq!(h.reg(1), 55);
    }

    #[test]
    fn mnemonic_lookup_round_trips() {
        for op in ScalarOp::ALL {
            assert_eq!(Mnemonic::from_name(op.name()), Some(Mnemonic::Scalar(op)));
        }
        for op in VectorOp::ALL {
            assert_eq!(Mnemonic::from_name(op.name()), Some(Mnemonic::Vector(op)));
        }
    }
}
