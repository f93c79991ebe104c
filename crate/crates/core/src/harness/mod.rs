//! Workload runs, configuration sweeps and the derived metrics.
//!
//! The average cycle count of a kernel type is, for every hart running it,
//! the cycle of its last completed instance divided by the number of
//! instances it completed, averaged over those harts.

pub mod config;
pub mod energy;
pub mod report;
pub mod trend;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coproc::{CoprocConfig, Scheme};
use crate::isa::NUM_HARTS;
use crate::kernels::{build_workload, KernelError, KernelSpec};
use crate::pipeline::{CoreConfig, PerfCounters, StopReason, Trap};

pub use energy::EnergyWeights;

pub const DEFAULT_INSTANCES: u32 = 8;
pub const DEFAULT_MAX_CYCLES: u64 = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum WorkloadSpec {
    Homogeneous { kernel: KernelSpec, instances: u32 },
    /// Convolution 32×32, FFT-256 and matrix multiply on harts 0, 1, 2.
    Composite { instances: u32 },
}

impl WorkloadSpec {
    pub fn homogeneous(kernel: KernelSpec) -> Self {
        WorkloadSpec::Homogeneous { kernel, instances: DEFAULT_INSTANCES }
    }

    pub fn composite() -> Self {
        WorkloadSpec::Composite { instances: DEFAULT_INSTANCES }
    }

    pub fn with_instances(self, n: u32) -> Self {
        match self {
            WorkloadSpec::Homogeneous { kernel, .. } => WorkloadSpec::Homogeneous { kernel, instances: n },
            WorkloadSpec::Composite { .. } => WorkloadSpec::Composite { instances: n },
        }
    }

    pub fn instances(&self) -> u32 {
        match *self {
            WorkloadSpec::Homogeneous { instances, .. } | WorkloadSpec::Composite { instances } => instances,
        }
    }

    pub fn jobs(&self) -> [Option<KernelSpec>; NUM_HARTS] {
        match *self {
            WorkloadSpec::Homogeneous { kernel, .. } => [Some(kernel); NUM_HARTS],
            WorkloadSpec::Composite { .. } => {
                [Some(KernelSpec::conv(32)), Some(KernelSpec::Fft), Some(KernelSpec::matmul())]
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            WorkloadSpec::Homogeneous { kernel, .. } => kernel.label(),
            WorkloadSpec::Composite { .. } => "composite".to_string(),
        }
    }

    /// Scratchpads per interface: 3 when only matrix multiply runs, else 4.
    pub fn spms(&self) -> u32 {
        match self {
            WorkloadSpec::Homogeneous { kernel, .. } => kernel.kind().default_spms(),
            WorkloadSpec::Composite { .. } => 4,
        }
    }

    pub fn parse(s: &str) -> Option<WorkloadSpec> {
        if s == "composite" {
            Some(WorkloadSpec::composite())
        } else {
            KernelSpec::parse(s).map(WorkloadSpec::homogeneous)
        }
    }
}

impl fmt::Display for WorkloadSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub max_cycles: u64,
    pub core: CoreConfig,
    pub weights: EnergyWeights,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 1,
            max_cycles: DEFAULT_MAX_CYCLES,
            core: CoreConfig::default(),
            weights: EnergyWeights::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("kernel: {0}")]
    Kernel(#[from] KernelError),
    #[error("{0}")]
    Trap(#[from] Box<Trap>),
    #[error("cycle limit {0} reached before the workload finished")]
    Timeout(u64),
    #[error("no algorithmic operations completed")]
    NoOps,
}

/// Average cycles per instance of one kernel type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelAverage {
    pub kernel: String,
    pub avg_cycles: f64,
    pub harts: Vec<usize>,
    pub instances: Vec<u64>,
}

/// Configuration as echoed in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub scheme: Scheme,
    pub family: String,
    pub d: u32,
    pub f: u32,
    pub m: u32,
    pub n: u32,
    pub spm_capacity: u32,
    pub initial_latency: u32,
}

impl From<&CoprocConfig> for ConfigEcho {
    fn from(c: &CoprocConfig) -> Self {
        ConfigEcho {
            scheme: c.scheme,
            family: c.family().to_string(),
            d: c.lanes,
            f: c.mfus,
            m: c.spmis,
            n: c.spms,
            spm_capacity: c.spm_capacity,
            initial_latency: c.initial_latency,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub workload: String,
    pub seed: u64,
    pub stop: StopReason,
    pub averages: Vec<KernelAverage>,
    pub counters: PerfCounters,
    pub ops: u64,
    pub energy_proxy: f64,
}

impl RunReport {
    pub fn average(&self, kernel: &str) -> Option<f64> {
        self.averages.iter().find(|a| a.kernel == kernel).map(|a| a.avg_cycles)
    }
}

/// Per-kernel-type averages from per-hart completion timestamps.
pub fn kernel_averages(jobs: &[Option<KernelSpec>; NUM_HARTS], counters: &PerfCounters) -> Vec<KernelAverage> {
    let mut out: Vec<KernelAverage> = Vec::new();
    let mut sums: Vec<f64> = Vec::new();
    for (h, job) in jobs.iter().enumerate() {
        let Some(spec) = job else { continue };
        let done = &counters.completions[h];
        let Some(&last) = done.last() else { continue };
        let avg = last as f64 / done.len() as f64;
        let label = spec.label();
        match out.iter().position(|a| a.kernel == label) {
            Some(i) => {
                out[i].harts.push(h);
                out[i].instances.push(done.len() as u64);
                sums[i] += avg;
            }
            None => {
                out.push(KernelAverage { kernel: label, avg_cycles: 0.0, harts: vec![h], instances: vec![done.len() as u64] });
                sums.push(avg);
            }
        }
    }
    for (a, s) in out.iter_mut().zip(sums) {
        a.avg_cycles = s / a.harts.len() as f64;
    }
    out
}

/// Builds, runs and verifies one workload on one configuration.
pub fn run_workload(w: &WorkloadSpec, cfg: &CoprocConfig, opts: &RunOptions) -> Result<RunReport, HarnessError> {
    let jobs = w.jobs();
    let instances = match w {
        WorkloadSpec::Homogeneous { instances, .. } => *instances,
        WorkloadSpec::Composite { .. } => 0,
    };
    let kp = build_workload(jobs, instances, cfg, opts.seed)?;
    let mut core = kp.core(*cfg, opts.core)?;
    let stop = core.run(kp.stop(w.instances() as u64), opts.max_cycles).map_err(Box::new)?;
    if stop == StopReason::MaxCycles {
        return Err(HarnessError::Timeout(opts.max_cycles));
    }
    kp.verify(&core)?;
    let counters = core.snapshot();
    let ops: u64 = jobs
        .iter()
        .enumerate()
        .filter_map(|(h, j)| j.map(|s| s.census().total() * counters.completions[h].len() as u64))
        .sum();
    let energy_proxy = energy::energy_proxy(&counters, cfg, ops, &opts.weights).ok_or(HarnessError::NoOps)?;
    Ok(RunReport {
        config: cfg.into(),
        workload: w.label(),
        seed: opts.seed,
        stop,
        averages: kernel_averages(&jobs, &counters),
        counters,
        ops,
        energy_proxy,
    })
}

/// One sweep cell's outcome; failures are kept, not dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub config: ConfigEcho,
    pub workload: String,
    pub report: Option<RunReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepTable {
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn average(&self, scheme: Scheme, d: u32, workload: &str, kernel: &str) -> Option<f64> {
        self.cells
            .iter()
            .filter(|c| c.config.scheme == scheme && c.config.d == d && c.workload == workload)
            .find_map(|c| c.report.as_ref()?.average(kernel))
    }

    pub fn failures(&self) -> impl Iterator<Item = &SweepCell> {
        self.cells.iter().filter(|c| c.error.is_some())
    }
}

/// Runs every (workload, configuration) cell, concurrently, keeping order.
pub fn sweep(specs: &[(WorkloadSpec, CoprocConfig)], opts: &RunOptions) -> SweepTable {
    let cells = specs
        .par_iter()
        .map(|(w, cfg)| {
            let (report, error) = match run_workload(w, cfg, opts) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SweepCell { config: cfg.into(), workload: w.label(), report, error }
        })
        .collect();
    SweepTable { cells }
}

/// Every workload on the twelve design points, with the workload's
/// scratchpad count and otherwise default parameters.
pub fn grid(workloads: &[WorkloadSpec], base: &CoprocConfig) -> Vec<(WorkloadSpec, CoprocConfig)> {
    let mut out = Vec::new();
    for w in workloads {
        for mut cfg in crate::coproc::design_grid(w.spms()) {
            cfg.spm_capacity = base.spm_capacity;
            cfg.initial_latency = base.initial_latency;
            cfg.spm_base = base.spm_base;
            cfg.dot_unit = base.dot_unit;
            out.push((*w, cfg));
        }
    }
    out
}

/// The six workloads of the main results table.
pub fn table_workloads(instances: u32) -> Vec<WorkloadSpec> {
    let mut v: Vec<WorkloadSpec> = [4, 8, 16, 32]
        .into_iter()
        .map(|s| WorkloadSpec::homogeneous(KernelSpec::conv(s)).with_instances(instances))
        .collect();
    v.push(WorkloadSpec::homogeneous(KernelSpec::Fft).with_instances(instances));
    v.push(WorkloadSpec::homogeneous(KernelSpec::matmul()).with_instances(instances));
    v
}

/// Convolutions of 32×32 inputs with 3×3 through 11×11 filters.
pub fn filter_workloads(instances: u32) -> Vec<WorkloadSpec> {
    [3, 5, 7, 9, 11]
        .into_iter()
        .map(|k| WorkloadSpec::homogeneous(KernelSpec::conv_filter(32, k)).with_instances(instances))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_instance_average_is_its_span() {
        let mut c = PerfCounters::default();
        c.completions[0] = vec![1234];
        let jobs = [Some(KernelSpec::Fft), None, None];
        let a = kernel_averages(&jobs, &c);
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].avg_cycles, 1234.0);
    }

    #[test]
    fn averages_over_harts() {
        let mut c = PerfCounters::default();
        c.completions = [vec![100, 200], vec![150, 300], vec![90]];
        let jobs = [Some(KernelSpec::conv(4)), Some(KernelSpec::conv(4)), Some(KernelSpec::Fft)];
        let a = kernel_averages(&jobs, &c);
        assert_eq!(a[0].avg_cycles, 125.0);
        assert_eq!(a[1].avg_cycles, 90.0);
    }

    #[test]
    fn empty_sweep() {
        assert!(sweep(&[], &RunOptions::default()).cells.is_empty());
    }

    #[test]
    fn workload_names() {
        assert_eq!(WorkloadSpec::parse("composite"), Some(WorkloadSpec::composite()));
        assert_eq!(WorkloadSpec::parse("matmul64").unwrap().spms(), 3);
        assert_eq!(table_workloads(1).len(), 6);
        assert_eq!(grid(&table_workloads(1), &CoprocConfig::new(Scheme::Shared, 1, 4).unwrap()).len(), 72);
    }
}
