//! Three harts running independent ALU code retire one instruction per
//! cycle; a single active hart retires one every three cycles.

use imt_vsim::asm::{assemble, SourceUnit};
use imt_vsim::coproc::{CoprocConfig, Scheme};
use imt_vsim::isa::NUM_HARTS;
use imt_vsim::pipeline::{single_hart, Core, CoreConfig, StopCondition};

fn straight_line(n: usize) -> String {
    let mut s = String::new();
    for i in 0..n {
        s.push_str(&format!("    addi x{}, x{}, {}\n", 1 + i % 8, 1 + (i + 3) % 8, i % 100));
    }
    s.push_str("    ebreak\n");
    s
}

fn run(entries_for: impl Fn(&imt_vsim::isa::Program) -> [Option<u32>; NUM_HARTS]) -> (u64, u64) {
    let program = assemble(&SourceUnit::from_text("alu.s", &straight_line(999)), 0).unwrap();
    let entries = entries_for(&program);
    let cfg = CoprocConfig::new(Scheme::Dedicated, 1, 1).unwrap();
    let mut core = Core::new(program, entries, cfg, CoreConfig::default()).unwrap();
    core.run(StopCondition::AllHalted, 1_000_000).unwrap();
    (core.counters.retired_total(), core.counters.cycles)
}

fn main() {
    let (retired, cycles) = run(|p| [Some(p.origin); NUM_HARTS]);
    println!("3 harts: {retired} retired in {cycles} cycles, IPC {:.3}", retired as f64 / cycles as f64);

    let (retired, cycles) = run(single_hart);
    println!("1 hart:  {retired} retired in {cycles} cycles, IPC {:.3}", retired as f64 / cycles as f64);
}
