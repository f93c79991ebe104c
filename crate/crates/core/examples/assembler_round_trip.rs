//! Assembles a small program mixing base, multiply and vector instructions,
//! prints the canonical disassembly and checks that it reassembles to the
//! same code. Also shows how a malformed line is reported.

use imt_vsim::asm::{assemble, disassemble, SourceUnit};

const SOURCE: &str = "
# sum of squares of 1..=n
    li   x1, 10
    li   x2, 0
loop:
    mul  x3, x1, x1
    add  x2, x2, x3
    addi x1, x1, -1
    bne  x1, x0, loop
    li   x5, 64
    csrw vlen, x5
    li   x4, 0x100000
    kaddv (x4), (x4), (x4)
    ebreak
.org 0x200
.word 385
";

fn main() {
    let src = SourceUnit::from_text("squares.s", SOURCE);
    let program = assemble(&src, 0).expect("assembles");
    let listing = disassemble(&program);
    println!("{}", listing.text());

    let again = assemble(&listing, 0).expect("listing reassembles");
    assert!(program.same_code(&again));
    assert_eq!(program.data, again.data);
    println!("round trip ok: {} instructions, {} data words", program.instrs.len(), program.data.len());

    let bad = SourceUnit::from_text("bad.s", "addi x1, x2\nkaddv (x1, (x2), (x3)\n");
    match assemble(&bad, 0) {
        Ok(_) => unreachable!("malformed input assembled"),
        Err(e) => println!("\n{e}"),
    }
}
