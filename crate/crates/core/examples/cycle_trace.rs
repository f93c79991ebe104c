//! Per-cycle pipeline trace of two harts competing for the single shared
//! coprocessor: columns are cycle, hart counter, F, D, E, W and replays.

use imt_vsim::asm::{assemble, SourceUnit};
use imt_vsim::coproc::{CoprocConfig, Scheme};
use imt_vsim::pipeline::{Core, CoreConfig, StopCondition};

const SOURCE: &str = "
h0: li x5, 32
    csrw vlen, x5
    li x1, 0x100000
    kaddv (x1), (x1), (x1)
    addi x2, x2, 1
    ebreak
h1: li x5, 32
    csrw vlen, x5
    li x1, 0x100100
    kvmul (x1), (x1), (x1)
    ebreak
";

fn main() {
    let program = assemble(&SourceUnit::from_text("trace.s", SOURCE), 0).unwrap();
    let entries = [program.label_address("h0"), program.label_address("h1"), None];
    let cfg = CoprocConfig::new(Scheme::Shared, 2, 4).unwrap();
    let mut core = Core::new(program, entries, cfg, CoreConfig { trace: true, ..CoreConfig::default() }).unwrap();
    core.run(StopCondition::AllHalted, 1000).unwrap();
    println!("cycle\tharc\tF\tD\tE\tW\tevents");
    print!("{}", core.trace());
}
