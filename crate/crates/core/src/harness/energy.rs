//! Event-weighted energy proxy per algorithmic operation.
//!
//! The proxy is a weighted event count divided by the multiplies and adds
//! the kernels performed. It supports comparisons between configurations
//! and carries no physical calibration.

use serde::{Deserialize, Serialize};

use crate::coproc::CoprocConfig;
use crate::pipeline::PerfCounters;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyWeights {
    pub scalar_instr: f64,
    pub vector_line_op: f64,
    pub spm_line_access: f64,
    pub mem_word: f64,
    pub mfu_idle_cycle: f64,
    pub base_cycle: f64,
}

impl Default for EnergyWeights {
    fn default() -> Self {
        EnergyWeights {
            scalar_instr: 1.0,
            vector_line_op: 1.0,
            spm_line_access: 0.5,
            mem_word: 2.0,
            mfu_idle_cycle: 0.25,
            base_cycle: 0.5,
        }
    }
}

impl EnergyWeights {
    pub fn zero() -> Self {
        EnergyWeights {
            scalar_instr: 0.0,
            vector_line_op: 0.0,
            spm_line_access: 0.0,
            mem_word: 0.0,
            mfu_idle_cycle: 0.0,
            base_cycle: 0.0,
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        EnergyWeights {
            scalar_instr: self.scalar_instr * k,
            vector_line_op: self.vector_line_op * k,
            spm_line_access: self.spm_line_access * k,
            mem_word: self.mem_word * k,
            mfu_idle_cycle: self.mfu_idle_cycle * k,
            base_cycle: self.base_cycle * k,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.as_array().iter().all(|w| w.is_finite() && *w >= 0.0)
    }

    fn as_array(&self) -> [f64; 6] {
        [self.scalar_instr, self.vector_line_op, self.spm_line_access, self.mem_word, self.mfu_idle_cycle, self.base_cycle]
    }
}

/// Event counts in the order of the weight fields.
pub fn event_counts(c: &PerfCounters, cfg: &CoprocConfig) -> [f64; 6] {
    let scalar = c.retired_total() - c.retired_vector;
    let spm = c.coproc.spm_line_reads + c.coproc.spm_line_writes;
    let idle = (c.cycles * cfg.mfus as u64).saturating_sub(c.coproc.mfu_busy);
    [scalar as f64, c.coproc.vector_line_ops as f64, spm as f64, c.mem_words as f64, idle as f64, c.cycles as f64]
}

/// Weighted events per operation; `None` when `ops` is zero.
pub fn energy_proxy(c: &PerfCounters, cfg: &CoprocConfig, ops: u64, w: &EnergyWeights) -> Option<f64> {
    if ops == 0 {
        return None;
    }
    let e: f64 = event_counts(c, cfg).iter().zip(w.as_array()).map(|(n, w)| n * w).sum();
    Some(e / ops as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coproc::Scheme;

    fn counters() -> PerfCounters {
        let mut c = PerfCounters::default();
        c.cycles = 1000;
        c.retired = [300, 300, 300];
        c.retired_vector = 100;
        c.coproc.vector_line_ops = 400;
        c.coproc.mfu_busy = 600;
        c.mem_words = 50;
        c
    }

    #[test]
    fn zero_weights() {
        let cfg = CoprocConfig::new(Scheme::Shared, 1, 4).unwrap();
        assert_eq!(energy_proxy(&counters(), &cfg, 10, &EnergyWeights::zero()), Some(0.0));
    }

    #[test]
    fn linear_in_weights() {
        let cfg = CoprocConfig::new(Scheme::Dedicated, 2, 4).unwrap();
        let w = EnergyWeights::default();
        let a = energy_proxy(&counters(), &cfg, 10, &w).unwrap();
        let b = energy_proxy(&counters(), &cfg, 10, &w.scaled(2.0)).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-9);
    }

    #[test]
    fn zero_ops_is_an_error() {
        let cfg = CoprocConfig::new(Scheme::Shared, 1, 4).unwrap();
        assert_eq!(energy_proxy(&counters(), &cfg, 0, &EnergyWeights::default()), None);
    }
}
