//! Ordering and ratio checks over a sweep table.
//!
//! A check whose cells are missing or failed is reported as NOT-RUN.

use serde::{Deserialize, Serialize};

use crate::coproc::Scheme;

use super::SweepTable;

/// Upper bound on the heterogeneous-over-symmetric cycle overhead.
pub const HET_OVERHEAD_MAX: f64 = 0.15;
/// Minimum cycle-count speedup of 8 lanes over 1 lane, shared scheme, conv 32×32.
pub const DLP_SPEEDUP_MIN: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "NOT-RUN")]
    NotRun,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NotRun => "NOT-RUN",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub verdict: Verdict,
    /// Cells the check compared, as (label, average cycles).
    pub values: Vec<(String, f64)>,
    pub detail: String,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!("{:<7} {:<28} {}", self.verdict.as_str(), self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    scheme: Scheme,
    d: u32,
}

const SISD: Cell = Cell { scheme: Scheme::Shared, d: 1 };
const SIMD8: Cell = Cell { scheme: Scheme::Shared, d: 8 };
const SYM1: Cell = Cell { scheme: Scheme::Dedicated, d: 1 };
const SYM8: Cell = Cell { scheme: Scheme::Dedicated, d: 8 };

fn label(c: Cell) -> String {
    let s = match c.scheme {
        Scheme::Shared => "simd",
        Scheme::Dedicated => "sym",
        Scheme::SharedMfu => "het",
    };
    format!("{s}-d{}", c.d)
}

struct Lookup<'a> {
    table: &'a SweepTable,
}

impl Lookup<'_> {
    /// Homogeneous average of `workload` at `cell`.
    fn get(&self, workload: &str, c: Cell) -> Option<f64> {
        self.table.average(c.scheme, c.d, workload, workload)
    }

    fn values(&self, workload: &str, cells: &[Cell]) -> Option<Vec<(String, f64)>> {
        cells.iter().map(|&c| Some((format!("{workload}@{}", label(c)), self.get(workload, c)?))).collect()
    }
}

fn result(name: &str, values: Option<Vec<(String, f64)>>, f: impl FnOnce(&[f64]) -> (bool, String)) -> CheckResult {
    match values {
        None => CheckResult {
            name: name.to_string(),
            verdict: Verdict::NotRun,
            values: Vec::new(),
            detail: "required cells missing or failed".to_string(),
        },
        Some(values) => {
            let nums: Vec<f64> = values.iter().map(|v| v.1).collect();
            let (ok, detail) = f(&nums);
            CheckResult { name: name.to_string(), verdict: if ok { Verdict::Pass } else { Verdict::Fail }, values, detail }
        }
    }
}

fn all_grid() -> Vec<Cell> {
    let mut v = Vec::new();
    for scheme in [Scheme::Shared, Scheme::Dedicated, Scheme::SharedMfu] {
        for d in [1, 2, 4, 8] {
            v.push(Cell { scheme, d });
        }
    }
    v
}

pub fn dlp_monotonic(t: &SweepTable) -> CheckResult {
    let l = Lookup { table: t };
    let cells: Vec<Cell> = [1, 2, 4, 8].map(|d| Cell { scheme: Scheme::Shared, d }).to_vec();
    result("dlp-monotonic-conv32", l.values("conv32", &cells), |v| {
        (v.windows(2).all(|w| w[1] < w[0]), format!("shared D1..D8: {:.0} > {:.0} > {:.0} > {:.0}", v[0], v[1], v[2], v[3]))
    })
}

pub fn dlp_ratio(t: &SweepTable) -> CheckResult {
    let l = Lookup { table: t };
    result("dlp-ratio-conv32", l.values("conv32", &[SISD, SIMD8]), |v| {
        let r = v[0] / v[1];
        (r >= DLP_SPEEDUP_MIN, format!("D8 speedup over D1 {r:.2}x (min {DLP_SPEEDUP_MIN})"))
    })
}

pub fn crossover_small(t: &SweepTable) -> CheckResult {
    let l = Lookup { table: t };
    result("crossover-conv4", l.values("conv4", &[SYM1, SIMD8]), |v| {
        (v[0] < v[1], format!("sym-d1 {:.0} < simd-d8 {:.0}", v[0], v[1]))
    })
}

pub fn crossover_large(t: &SweepTable) -> CheckResult {
    let l = Lookup { table: t };
    result("crossover-conv32", l.values("conv32", &[SIMD8, SYM1]), |v| {
        (v[0] < v[1], format!("simd-d8 {:.0} < sym-d1 {:.0}", v[0], v[1]))
    })
}

pub fn combined_minimum(t: &SweepTable, workload: &str) -> CheckResult {
    let l = Lookup { table: t };
    let mut cells = vec![SYM8];
    cells.extend(all_grid().into_iter().filter(|c| !(c.scheme == Scheme::Dedicated && c.d == 8)));
    result(&format!("combined-min-{workload}"), l.values(workload, &cells), |v| {
        let (best, rest) = (v[0], &v[1..]);
        let runner = rest.iter().cloned().fold(f64::INFINITY, f64::min);
        (rest.iter().all(|x| best <= *x), format!("sym-d8 {best:.0}, best other {runner:.0}"))
    })
}

pub fn het_overhead(t: &SweepTable, workload: &str, d: u32) -> CheckResult {
    let l = Lookup { table: t };
    let cells = [Cell { scheme: Scheme::SharedMfu, d }, Cell { scheme: Scheme::Dedicated, d }];
    result(&format!("het-overhead-{workload}-d{d}"), l.values(workload, &cells), |v| {
        let o = v[0] / v[1] - 1.0;
        (
            (0.0..=HET_OVERHEAD_MAX).contains(&o),
            format!("het {:.0} vs sym {:.0}: {:+.1}% (allowed 0..{:.0}%)", v[0], v[1], 100.0 * o, 100.0 * HET_OVERHEAD_MAX),
        )
    })
}

pub fn fft_prefers_tlp(t: &SweepTable) -> CheckResult {
    let l = Lookup { table: t };
    result("fft-tlp", l.values("fft256", &[SYM1, SIMD8, SISD]), |v| {
        (v[0] < v[1] && v[1] < v[2], format!("sym-d1 {:.0} < simd-d8 {:.0} < sisd {:.0}", v[0], v[1], v[2]))
    })
}

pub fn filter_dlp(t: &SweepTable) -> CheckResult {
    let l = Lookup { table: t };
    let mut values = Some(Vec::new());
    let mut speedups = Vec::new();
    for k in [3, 5, 7, 9, 11] {
        let w = if k == 3 { "conv32".to_string() } else { format!("conv32_f{k}") };
        match l.values(&w, &[SISD, SIMD8]) {
            Some(v) => {
                speedups.push(v[0].1 / v[1].1);
                if let Some(all) = values.as_mut() {
                    all.extend(v);
                }
            }
            None => values = None,
        }
    }
    result("filter-dlp", values, |_| {
        let ok = speedups.windows(2).all(|w| w[1] >= w[0]);
        let s: Vec<String> = speedups.iter().map(|x| format!("{x:.2}")).collect();
        (ok, format!("simd-d8 over sisd, 3x3..11x11: {}", s.join(" <= ")))
    })
}

/// All trend checks, in a stable order.
pub fn trend_check(t: &SweepTable) -> Vec<CheckResult> {
    vec![
        dlp_monotonic(t),
        dlp_ratio(t),
        crossover_small(t),
        crossover_large(t),
        combined_minimum(t, "conv32"),
        combined_minimum(t, "matmul64"),
        het_overhead(t, "conv32", 1),
        het_overhead(t, "conv32", 2),
        het_overhead(t, "matmul64", 1),
        het_overhead(t, "matmul64", 2),
        fft_prefers_tlp(t),
        filter_dlp(t),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_cells_are_not_run() {
        let t = SweepTable::default();
        let r = trend_check(&t);
        assert_eq!(r.len(), 12);
        assert!(r.iter().all(|c| c.verdict == Verdict::NotRun));
    }
}
