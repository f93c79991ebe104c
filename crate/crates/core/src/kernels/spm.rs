//! First-fit placement of kernel buffers in the scratchpad address space.
//!
//! Buffers of all harts are placed as if the space were shared, so one
//! program runs unchanged under every sharing scheme.

use crate::coproc::CoprocConfig;

use super::KernelError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpmBuffer {
    pub name: String,
    pub addr: u32,
    pub bytes: u32,
    pub spm: usize,
}

#[derive(Debug, Clone)]
pub struct SpmPlan {
    base: u32,
    capacity: u32,
    next: Vec<u32>,
    pub buffers: Vec<SpmBuffer>,
}

impl SpmPlan {
    pub fn new(cfg: &CoprocConfig) -> Self {
        SpmPlan {
            base: cfg.spm_base,
            capacity: cfg.spm_capacity,
            next: vec![0; cfg.spms as usize],
            buffers: Vec::new(),
        }
    }

    /// Places `bytes` in the first scratchpad with room, aligned to `align`.
    pub fn alloc(&mut self, name: impl Into<String>, bytes: u32, align: u32) -> Result<u32, KernelError> {
        let name = name.into();
        for (spm, next) in self.next.iter_mut().enumerate() {
            let off = next.div_ceil(align) * align;
            if off as u64 + bytes as u64 <= self.capacity as u64 {
                *next = off + bytes;
                let addr = self.base + spm as u32 * self.capacity + off;
                self.buffers.push(SpmBuffer { name, addr, bytes, spm });
                return Ok(addr);
            }
        }
        Err(KernelError::SpmOverflow { buffer: name, bytes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coproc::{CoprocConfig, Scheme};

    #[test]
    fn first_fit() {
        let cfg = CoprocConfig::new(Scheme::Shared, 1, 2).unwrap();
        let mut p = SpmPlan::new(&cfg);
        assert_eq!(p.alloc("a", 6000, 4).unwrap(), cfg.spm_base);
        assert_eq!(p.alloc("b", 4000, 4).unwrap(), cfg.spm_base + 8192);
        assert_eq!(p.alloc("c", 100, 64).unwrap(), cfg.spm_base + 6016);
        let e = p.alloc("big", 5000, 4).unwrap_err();
        assert_eq!(e, KernelError::SpmOverflow { buffer: "big".into(), bytes: 5000 });
    }
}
