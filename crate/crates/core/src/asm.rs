//! Two-pass assembler and disassembler for the RV32IM subset plus the vector
//! extension.
//!
//! Dialect: one instruction per line, optionally preceded by `label:`.
//! Comments start with `#`. Directives: `.org <addr>` moves the data cursor
//! and `.word <value>` places one word of data memory at it. Pseudo
//! instructions: `li`, `mv`, `j`, `nop`, `ret`, `csrr`, `csrw`, `csrwi`.
//!
//! Vector operands in parentheses are scratchpad or memory addresses held in
//! a register; bare registers are read as values. `kmemld`/`kmemstr` accept
//! the byte count either bare or parenthesized. `ksvslt` with a
//! parenthesized third operand is the vector-vector compare (`kvslt`).

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::isa::{csr, DataWord, InstrKind, Instruction, Mnemonic, Program, ScalarOp, VectorOp};

/// Assembly text with a name used in diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceUnit {
    pub filename: String,
    pub lines: Vec<String>,
}

impl SourceUnit {
    /// Splits text into lines, tolerating CRLF endings.
    pub fn from_text(filename: impl Into<String>, text: &str) -> Self {
        let lines = text
            .lines()
            .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
            .collect();
        SourceUnit { filename: filename.into(), lines }
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            s.push_str(l);
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsmDiagnostic {
    /// 1-based source line.
    pub line: usize,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for AsmDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "line {}: {}: {}", self.line, sev, self.message)
    }
}

/// Diagnostics from a failed assembly, with the source name for display.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsmErrors {
    pub filename: String,
    pub diagnostics: Vec<AsmDiagnostic>,
}

impl fmt::Display for AsmErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}:{}", self.filename, d)?;
        }
        Ok(())
    }
}

impl std::error::Error for AsmErrors {}

/// Assembles `src` with the first instruction at byte address `origin`.
pub fn assemble(src: &SourceUnit, origin: u32) -> Result<Program, AsmErrors> {
    let (program, diagnostics) = assemble_with_warnings(src, origin);
    match program {
        Some(p) => Ok(p),
        None => Err(AsmErrors { filename: src.filename.clone(), diagnostics }),
    }
}

/// Like [`assemble`], also returning warnings. The program is `None` when any
/// error was reported.
pub fn assemble_with_warnings(
    src: &SourceUnit,
    origin: u32,
) -> (Option<Program>, Vec<AsmDiagnostic>) {
    let mut diags = Vec::new();
    let mut items: Vec<(usize, Item)> = Vec::new();
    let mut labels: BTreeMap<String, usize> = BTreeMap::new();
    let mut label_lines: Vec<(String, usize)> = Vec::new();
    let mut data: Vec<DataWord> = Vec::new();
    let mut data_cursor: u32 = 0;

    let err = |diags: &mut Vec<AsmDiagnostic>, line: usize, msg: String| {
        diags.push(AsmDiagnostic { line, severity: Severity::Error, message: msg });
    };

    // Pass 1: labels, directives, and instruction parsing with symbolic targets.
    for (n, raw) in src.lines.iter().enumerate() {
        let line_no = n + 1;
        let mut text = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw.as_str(),
        }
        .trim();
        let mut line_label = None;
        if let Some((name, rest)) = split_label(text) {
            if labels.contains_key(name) {
                err(&mut diags, line_no, format!("duplicate label `{name}`"));
            } else {
                labels.insert(name.to_string(), items.len());
                label_lines.push((name.to_string(), line_no));
            }
            line_label = Some(name);
            text = rest.trim();
        }
        if text.is_empty() {
            continue;
        }
        let (mnemonic, operands) = split_mnemonic(text);
        if let Some(directive) = mnemonic.strip_prefix('.') {
            match directive_line(directive, &operands, &mut data_cursor, &mut data) {
                Ok(Some(w)) => diags.push(AsmDiagnostic {
                    line: line_no,
                    severity: Severity::Warning,
                    message: w,
                }),
                Ok(None) => {}
                Err(e) => err(&mut diags, line_no, e),
            }
            if let Some(l) = line_label {
                if directive == "word" {
                    err(&mut diags, line_no, format!("label `{l}` cannot name a data word"));
                }
            }
            continue;
        }
        match parse_instruction(&mnemonic, &operands) {
            Ok(list) => items.extend(list.into_iter().map(|i| (line_no, i))),
            Err(e) => err(&mut diags, line_no, e),
        }
    }

    for (name, line) in &label_lines {
        if labels.get(name).is_some_and(|&i| i >= items.len()) {
            err(&mut diags, *line, format!("label `{name}` does not precede an instruction"));
        }
    }

    // Pass 2: resolve targets to pc-relative offsets.
    let mut instrs = Vec::with_capacity(items.len());
    for (idx, (line_no, item)) in items.iter().enumerate() {
        match resolve(item, idx, &labels) {
            Ok(i) => instrs.push(i),
            Err(e) => err(&mut diags, *line_no, e),
        }
    }

    diags.sort_by_key(|d| d.line);
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return (None, diags);
    }
    (Some(Program { instrs, labels, origin, data }), diags)
}

#[derive(Debug, Clone)]
enum Target {
    Label(String),
    Offset(i64),
}

#[derive(Debug, Clone)]
enum Item {
    Ready(Instruction),
    Branch { op: ScalarOp, rs1: u8, rs2: u8, target: Target },
    Jal { rd: u8, target: Target },
}

fn resolve(item: &Item, idx: usize, labels: &BTreeMap<String, usize>) -> Result<Instruction, String> {
    let offset = |t: &Target| -> Result<i64, String> {
        match t {
            Target::Offset(o) => Ok(*o),
            Target::Label(l) => labels
                .get(l)
                .map(|&i| (i as i64 - idx as i64) * 4)
                .ok_or_else(|| format!("undefined label `{l}`")),
        }
    };
    match item {
        Item::Ready(i) => Ok(*i),
        Item::Branch { op, rs1, rs2, target } => {
            let off = offset(target)?;
            if off % 2 != 0 || !(-4096..=4094).contains(&off) {
                return Err(format!("branch offset {off} out of range"));
            }
            mk(Instruction::scalar(*op, 0, *rs1, *rs2, off as i32))
        }
        Item::Jal { rd, target } => {
            let off = offset(target)?;
            if off % 2 != 0 || !(-(1 << 20)..(1 << 20)).contains(&off) {
                return Err(format!("jump offset {off} out of range"));
            }
            mk(Instruction::scalar(ScalarOp::Jal, *rd, 0, 0, off as i32))
        }
    }
}

fn mk(r: Result<Instruction, crate::isa::IsaError>) -> Result<Instruction, String> {
    r.map_err(|e| e.to_string())
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '.'
}

fn is_ident(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '$'
}

fn split_label(text: &str) -> Option<(&str, &str)> {
    let colon = text.find(':')?;
    let name = text[..colon].trim();
    let mut chars = name.chars();
    let first = chars.next()?;
    if is_ident_start(first) && chars.all(is_ident) {
        Some((name, &text[colon + 1..]))
    } else {
        None
    }
}

fn split_mnemonic(text: &str) -> (String, Vec<String>) {
    let (m, rest) = match text.find(char::is_whitespace) {
        Some(i) => (&text[..i], text[i..].trim()),
        None => (text, ""),
    };
    let ops = if rest.is_empty() {
        Vec::new()
    } else {
        rest.split(',').map(|s| s.trim().to_string()).collect()
    };
    (m.to_ascii_lowercase(), ops)
}

fn directive_line(
    directive: &str,
    ops: &[String],
    cursor: &mut u32,
    data: &mut Vec<DataWord>,
) -> Result<Option<String>, String> {
    if ops.len() != 1 {
        return Err(format!(".{directive} takes exactly one operand"));
    }
    let v = parse_int(&ops[0])?;
    match directive {
        "org" => {
            if !(0..=u32::MAX as i64).contains(&v) || v % 4 != 0 {
                return Err(format!("`.org` address {} must be a word-aligned 32-bit address", ops[0]));
            }
            *cursor = v as u32;
            Ok(None)
        }
        "word" => {
            if !(i32::MIN as i64..=u32::MAX as i64).contains(&v) {
                return Err(format!("`.word` value {} does not fit in 32 bits", ops[0]));
            }
            let addr = *cursor;
            let warn = data
                .iter()
                .any(|d| d.addr == addr)
                .then(|| format!("data word at {addr:#x} overwrites an earlier .word"));
            data.push(DataWord { addr, value: v as u32 });
            *cursor = cursor.wrapping_add(4);
            Ok(warn)
        }
        other => Err(format!("unknown directive `.{other}`")),
    }
}

const ABI_NAMES: [&str; 32] = [
    "zero", "ra", "sp", "gp", "tp", "t0", "t1", "t2", "s0", "s1", "a0", "a1", "a2", "a3", "a4",
    "a5", "a6", "a7", "s2", "s3", "s4", "s5", "s6", "s7", "s8", "s9", "s10", "s11", "t3", "t4",
    "t5", "t6",
];

/// Parses `x0`..`x31` or a standard ABI name.
pub fn parse_reg(tok: &str) -> Result<u8, String> {
    let t = tok.trim().to_ascii_lowercase();
    if let Some(num) = t.strip_prefix('x') {
        if !num.is_empty() && num.chars().all(|c| c.is_ascii_digit()) {
            let n: u32 = num.parse().map_err(|_| format!("bad register `{tok}`"))?;
            return if n < 32 {
                Ok(n as u8)
            } else {
                Err(format!("register `{tok}` out of range"))
            };
        }
    }
    if t == "fp" {
        return Ok(8);
    }
    ABI_NAMES
        .iter()
        .position(|n| *n == t)
        .map(|p| p as u8)
        .ok_or_else(|| format!("expected a register, found `{tok}`"))
}

fn paren_inner(tok: &str) -> Option<&str> {
    let t = tok.trim();
    t.strip_prefix('(')?.strip_suffix(')').map(str::trim)
}

fn parse_int(tok: &str) -> Result<i64, String> {
    let t = tok.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let parsed = if let Some(h) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) {
        i64::from_str_radix(h, 16)
    } else if let Some(b) = body.strip_prefix("0b") {
        i64::from_str_radix(b, 2)
    } else {
        body.parse::<i64>()
    };
    let v = parsed.map_err(|_| format!("expected an integer, found `{tok}`"))?;
    if v > u32::MAX as i64 + 1 {
        return Err(format!("immediate `{tok}` out of range"));
    }
    Ok(if neg { -v } else { v })
}

fn imm_in(tok: &str, lo: i64, hi: i64) -> Result<i32, String> {
    let v = parse_int(tok)?;
    if v < lo || v > hi {
        return Err(format!("immediate {v} out of range [{lo}, {hi}]"));
    }
    Ok(v as i32)
}

fn imm12(tok: &str) -> Result<i32, String> {
    imm_in(tok, -2048, 2047)
}

/// `imm(reg)` or `(reg)`.
fn parse_mem(tok: &str) -> Result<(i32, u8), String> {
    let t = tok.trim();
    let open = t.find('(').ok_or_else(|| format!("expected `offset(register)`, found `{tok}`"))?;
    let inner = paren_inner(&t[open..]).ok_or_else(|| format!("malformed memory operand `{tok}`"))?;
    let reg = parse_reg(inner)?;
    let off_text = t[..open].trim();
    let off = if off_text.is_empty() { 0 } else { imm12(off_text)? };
    Ok((off, reg))
}

fn parse_target(tok: &str) -> Result<Target, String> {
    let t = tok.trim();
    match t.chars().next() {
        Some(c) if is_ident_start(c) => {
            if t.chars().all(is_ident) {
                Ok(Target::Label(t.to_string()))
            } else {
                Err(format!("bad label `{t}`"))
            }
        }
        _ => parse_int(t).map(Target::Offset),
    }
}

fn parse_csr(tok: &str) -> Result<i32, String> {
    let t = tok.trim().to_ascii_lowercase();
    if let Some(id) = csr::id_of(&t) {
        return Ok(id as i32);
    }
    imm_in(&t, 0, 4095).map_err(|_| format!("unknown control register `{tok}`"))
}

fn expect_count(m: &str, ops: &[String], n: usize) -> Result<(), String> {
    if ops.len() == n {
        Ok(())
    } else {
        Err(format!("`{m}` expects {n} operand(s), found {}", ops.len()))
    }
}

fn li_expand(rd: u8, value: i64) -> Result<Vec<Item>, String> {
    if !(i32::MIN as i64..=u32::MAX as i64).contains(&value) {
        return Err(format!("immediate {value} does not fit in 32 bits"));
    }
    let w = value as u32 as i32;
    if (-2048..=2047).contains(&w) {
        return Ok(vec![Item::Ready(mk(Instruction::scalar(ScalarOp::Addi, rd, 0, 0, w))?)]);
    }
    let hi = w.wrapping_add(0x800) >> 12;
    let lo = w.wrapping_sub(hi << 12);
    let mut out = vec![Item::Ready(mk(Instruction::scalar(ScalarOp::Lui, rd, 0, 0, hi << 12))?)];
    if lo != 0 {
        out.push(Item::Ready(mk(Instruction::scalar(ScalarOp::Addi, rd, rd, 0, lo))?));
    }
    Ok(out)
}

fn parse_instruction(m: &str, ops: &[String]) -> Result<Vec<Item>, String> {
    let one = |i: Result<Instruction, crate::isa::IsaError>| -> Result<Vec<Item>, String> {
        Ok(vec![Item::Ready(mk(i)?)])
    };
    // Pseudo instructions first.
    match m {
        "nop" => {
            expect_count(m, ops, 0)?;
            return Ok(vec![Item::Ready(Instruction::nop())]);
        }
        "li" => {
            expect_count(m, ops, 2)?;
            return li_expand(parse_reg(&ops[0])?, parse_int(&ops[1])?);
        }
        "mv" => {
            expect_count(m, ops, 2)?;
            return one(Instruction::scalar(ScalarOp::Addi, parse_reg(&ops[0])?, parse_reg(&ops[1])?, 0, 0));
        }
        "j" => {
            expect_count(m, ops, 1)?;
            return Ok(vec![Item::Jal { rd: 0, target: parse_target(&ops[0])? }]);
        }
        "ret" => {
            expect_count(m, ops, 0)?;
            return one(Instruction::scalar(ScalarOp::Jalr, 0, 1, 0, 0));
        }
        "csrr" => {
            expect_count(m, ops, 2)?;
            return one(Instruction::scalar(ScalarOp::Csrrs, parse_reg(&ops[0])?, 0, 0, parse_csr(&ops[1])?));
        }
        "csrw" => {
            expect_count(m, ops, 2)?;
            return one(Instruction::scalar(ScalarOp::Csrrw, 0, parse_reg(&ops[1])?, 0, parse_csr(&ops[0])?));
        }
        "csrwi" => {
            expect_count(m, ops, 2)?;
            let uimm = imm_in(&ops[1], 0, 31)? as u8;
            return one(Instruction::scalar(ScalarOp::Csrrwi, 0, uimm, 0, parse_csr(&ops[0])?));
        }
        _ => {}
    }
    let mnemonic = Mnemonic::from_name(m).ok_or_else(|| format!("unknown mnemonic `{m}`"))?;
    match mnemonic {
        Mnemonic::Vector(v) => parse_vector(v, ops).map(|i| vec![Item::Ready(i)]),
        Mnemonic::Scalar(s) => parse_scalar(s, ops),
    }
}

fn parse_vector(v: VectorOp, ops: &[String]) -> Result<Instruction, String> {
    let shape = v.operand_shape();
    let arity = shape.iter().filter(|s| s.is_some()).count();
    expect_count(v.name(), ops, arity)?;
    let mut op = v;
    let mut regs = [0u8; 3];
    for (k, tok) in ops.iter().enumerate() {
        let want_paren = shape[k].unwrap();
        let inner = paren_inner(tok);
        let flexible_count = k == 2 && v.is_transfer();
        regs[k] = match (inner, want_paren) {
            (Some(r), true) => parse_reg(r)?,
            (None, false) => parse_reg(tok)?,
            (Some(r), false) if v == VectorOp::Ksvslt && k == 2 => {
                op = VectorOp::Kvslt;
                parse_reg(r)?
            }
            (None, true) if flexible_count => parse_reg(tok)?,
            (Some(_), false) => {
                return Err(format!("operand {} of `{}` must be a bare register", k + 1, v.name()))
            }
            (None, true) => {
                return Err(format!(
                    "operand {} of `{}` must be a parenthesized register",
                    k + 1,
                    v.name()
                ))
            }
        };
    }
    mk(Instruction::vector(op, regs[0], regs[1], regs[2]))
}

fn parse_scalar(s: ScalarOp, ops: &[String]) -> Result<Vec<Item>, String> {
    use ScalarOp::*;
    let name = s.name();
    let ready = |i| -> Result<Vec<Item>, String> { Ok(vec![Item::Ready(mk(i)?)]) };
    match s.kind() {
        InstrKind::AluReg | InstrKind::MulDiv => {
            expect_count(name, ops, 3)?;
            ready(Instruction::scalar(s, parse_reg(&ops[0])?, parse_reg(&ops[1])?, parse_reg(&ops[2])?, 0))
        }
        InstrKind::AluImm => {
            expect_count(name, ops, 3)?;
            let imm = match s {
                Slli | Srli | Srai => imm_in(&ops[2], 0, 31)?,
                _ => imm12(&ops[2])?,
            };
            ready(Instruction::scalar(s, parse_reg(&ops[0])?, parse_reg(&ops[1])?, 0, imm))
        }
        InstrKind::Load => {
            expect_count(name, ops, 2)?;
            let (off, base) = parse_mem(&ops[1])?;
            ready(Instruction::scalar(s, parse_reg(&ops[0])?, base, 0, off))
        }
        InstrKind::Store => {
            expect_count(name, ops, 2)?;
            let (off, base) = parse_mem(&ops[1])?;
            ready(Instruction::scalar(s, 0, base, parse_reg(&ops[0])?, off))
        }
        InstrKind::Branch => {
            expect_count(name, ops, 3)?;
            Ok(vec![Item::Branch {
                op: s,
                rs1: parse_reg(&ops[0])?,
                rs2: parse_reg(&ops[1])?,
                target: parse_target(&ops[2])?,
            }])
        }
        InstrKind::Jump => match ops.len() {
            1 => Ok(vec![Item::Jal { rd: 1, target: parse_target(&ops[0])? }]),
            2 => Ok(vec![Item::Jal { rd: parse_reg(&ops[0])?, target: parse_target(&ops[1])? }]),
            n => Err(format!("`jal` expects 1 or 2 operands, found {n}")),
        },
        InstrKind::JumpReg => match ops.len() {
            1 => ready(Instruction::scalar(s, 1, parse_reg(&ops[0])?, 0, 0)),
            2 => {
                let (off, base) = parse_mem(&ops[1])?;
                ready(Instruction::scalar(s, parse_reg(&ops[0])?, base, 0, off))
            }
            3 => ready(Instruction::scalar(s, parse_reg(&ops[0])?, parse_reg(&ops[1])?, 0, imm12(&ops[2])?)),
            n => Err(format!("`jalr` expects 1 to 3 operands, found {n}")),
        },
        InstrKind::UpperImm => {
            expect_count(name, ops, 2)?;
            let v = imm_in(&ops[1], -(1 << 19), (1 << 20) - 1)?;
            ready(Instruction::scalar(s, parse_reg(&ops[0])?, 0, 0, ((v as u32) << 12) as i32))
        }
        InstrKind::CsrAccess => {
            expect_count(name, ops, 3)?;
            let rd = parse_reg(&ops[0])?;
            let id = parse_csr(&ops[1])?;
            let src = match s {
                Csrrwi | Csrrsi | Csrrci => imm_in(&ops[2], 0, 31)? as u8,
                _ => parse_reg(&ops[2])?,
            };
            ready(Instruction::scalar(s, rd, src, 0, id))
        }
        InstrKind::Halt => {
            expect_count(name, ops, 0)?;
            ready(Instruction::scalar(s, 0, 0, 0, 0))
        }
        InstrKind::Vector(_) => unreachable!(),
    }
}

fn x(r: u8) -> String {
    format!("x{r}")
}

/// Renders one instruction. `target` names the label used for branch and
/// jump destinations.
fn render(i: &Instruction, target: Option<&str>) -> String {
    let name = i.op.name();
    let tgt = || target.map(str::to_string).unwrap_or_else(|| i.imm.to_string());
    match i.kind() {
        InstrKind::Vector(v) => {
            let shape = v.operand_shape();
            let regs = [i.rd, i.rs1, i.rs2];
            let parts: Vec<String> = shape
                .iter()
                .zip(regs)
                .filter_map(|(s, r)| s.map(|p| if p { format!("({})", x(r)) } else { x(r) }))
                .collect();
            format!("{name} {}", parts.join(","))
        }
        InstrKind::AluReg | InstrKind::MulDiv => {
            format!("{name} {}, {}, {}", x(i.rd), x(i.rs1), x(i.rs2))
        }
        InstrKind::AluImm => format!("{name} {}, {}, {}", x(i.rd), x(i.rs1), i.imm),
        InstrKind::Load => format!("{name} {}, {}({})", x(i.rd), i.imm, x(i.rs1)),
        InstrKind::Store => format!("{name} {}, {}({})", x(i.rs2), i.imm, x(i.rs1)),
        InstrKind::Branch => format!("{name} {}, {}, {}", x(i.rs1), x(i.rs2), tgt()),
        InstrKind::Jump => format!("{name} {}, {}", x(i.rd), tgt()),
        InstrKind::JumpReg => format!("{name} {}, {}({})", x(i.rd), i.imm, x(i.rs1)),
        InstrKind::UpperImm => format!("{name} {}, {:#x}", x(i.rd), (i.imm as u32) >> 12),
        InstrKind::CsrAccess => {
            let id = i.imm as u16;
            let c = csr::name_of(id).map(str::to_string).unwrap_or_else(|| format!("{id:#x}"));
            let src = match i.op {
                Mnemonic::Scalar(ScalarOp::Csrrwi | ScalarOp::Csrrsi | ScalarOp::Csrrci) => i.rs1.to_string(),
                _ => x(i.rs1),
            };
            format!("{name} {}, {c}, {src}", x(i.rd))
        }
        InstrKind::Halt => name.to_string(),
    }
}

/// Text for a single instruction, with numeric branch offsets.
pub fn format_instruction(i: &Instruction) -> String {
    render(i, None)
}

/// Emits text that reassembles to the same program (up to label names).
pub fn disassemble(p: &Program) -> SourceUnit {
    let n = p.instrs.len();
    let mut names: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (name, &idx) in &p.labels {
        names.entry(idx).or_default().push(name.clone());
    }
    // Synthesize labels for branch targets that have none.
    let mut targets: Vec<Option<String>> = vec![None; n];
    for (idx, i) in p.instrs.iter().enumerate() {
        if matches!(i.kind(), InstrKind::Branch | InstrKind::Jump) {
            let dest = idx as i64 + (i.imm as i64) / 4;
            if i.imm % 4 == 0 && dest >= 0 && (dest as usize) < n {
                let d = dest as usize;
                let entry = names.entry(d).or_default();
                if entry.is_empty() {
                    entry.push(format!(".L{d}"));
                }
                targets[idx] = Some(entry[0].clone());
            }
        }
    }
    let mut lines = Vec::new();
    for (idx, i) in p.instrs.iter().enumerate() {
        if let Some(ls) = names.get(&idx) {
            for l in ls {
                lines.push(format!("{l}:"));
            }
        }
        lines.push(format!("    {}", render(i, targets[idx].as_deref())));
    }
    let mut cursor: Option<u32> = None;
    for d in &p.data {
        if cursor != Some(d.addr) {
            lines.push(format!(".org {:#x}", d.addr));
        }
        let mut s = String::new();
        let _ = write!(s, ".word {:#x}", d.value);
        lines.push(s);
        cursor = Some(d.addr.wrapping_add(4));
    }
    SourceUnit { filename: "<disassembly>".to_string(), lines }
}
