//! Cycle-approximate simulator of a three-hart interleaved-multithreaded
//! RV32IM core coupled to a parametric vector coprocessor, with the
//! benchmark kernels and the design-space sweep harness built on it.

pub mod asm;
pub mod coproc;
pub mod harness;
pub mod isa;
pub mod kernels;
pub mod memory;
pub mod pipeline;
