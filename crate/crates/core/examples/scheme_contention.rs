//! The same three vector instructions, one per hart, under the three
//! coprocessor sharing schemes. Hart 0 multiplies, hart 1 adds and hart 2
//! multiplies again, so the shared-unit scheme only blocks hart 2.

use imt_vsim::asm::{assemble, SourceUnit};
use imt_vsim::coproc::{CoprocConfig, Scheme};
use imt_vsim::pipeline::{Core, CoreConfig, StopCondition};

fn source() -> String {
    let ops = ["kvmul", "kaddv", "ksvmulrf"];
    let mut s = String::new();
    for (h, op) in ops.iter().enumerate() {
        let base = 0x100000 + 0x400 * h as u32;
        s.push_str(&format!("h{h}:\n    li x5, 256\n    csrw vlen, x5\n    li x1, {base}\n    li x2, {}\n", base + 0x100));
        if *op == "ksvmulrf" {
            s.push_str(&format!("    li x3, 3\n    {op} (x1), (x2), x3\n"));
        } else {
            s.push_str(&format!("    {op} (x1), (x2), (x2)\n"));
        }
        s.push_str("    ebreak\n");
    }
    s
}

fn main() {
    let program = assemble(&SourceUnit::from_text("contend.s", &source()), 0).unwrap();
    let entries = std::array::from_fn(|h| program.label_address(&format!("h{h}")));
    for scheme in [Scheme::Shared, Scheme::Dedicated, Scheme::SharedMfu] {
        let cfg = CoprocConfig::new(scheme, 1, 4).unwrap();
        let mut core = Core::new(program.clone(), entries, cfg, CoreConfig::default()).unwrap();
        let mut first = Vec::new();
        while !(core.halted.iter().all(|h| *h) && core.state.is_drained()) {
            core.step().unwrap();
            for ev in core.last_events() {
                if !first.iter().any(|(h, _): &(u8, String)| *h == ev.hart) {
                    first.push((ev.hart, format!("{} at cycle {}", ev.resource, ev.cycle)));
                }
            }
        }
        core.run(StopCondition::AllHalted, u64::MAX).unwrap();
        let r = &core.counters.replays;
        println!(
            "{:<10} {:>4} cycles  replays: mfu {} adder {} mul {} spmi {}",
            scheme.name(),
            core.counters.cycles,
            r.mfu,
            r.fu[0],
            r.fu[1],
            r.spmi
        );
        for (h, what) in first {
            println!("    hart {h} first blocked on {what}");
        }
    }
}
