use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use imt_vsim::asm::{assemble, disassemble, SourceUnit};
use imt_vsim::coproc::CoprocConfig;
use imt_vsim::harness::config::RunConfig;
use imt_vsim::harness::report::{render, Format};
use imt_vsim::harness::trend::{trend_check, Verdict};
use imt_vsim::harness::{filter_workloads, grid, run_workload, sweep, table_workloads, SweepCell, SweepTable};
use imt_vsim::kernels::build_workload;
use imt_vsim::pipeline::{single_hart, Core, CoreConfig, StopCondition};

#[derive(Parser)]
#[command(name = "imt-vsim", version, about = "Interleaved-multithreaded core and vector coprocessor simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one workload on one configuration and verify it.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run workloads across the design grid.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// table, filters or all
        #[arg(long, default_value = "table")]
        grid: String,
        /// Also evaluate the trend checks and fail if any does not pass.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the full grid and evaluate the trend checks.
    Check {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Assemble a source file and print its canonical form.
    Asm {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        origin: u32,
    },
    /// Run with the per-cycle pipeline trace enabled.
    Trace {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Trace a single-hart assembly program instead of a kernel workload.
        #[arg(long)]
        program: Option<PathBuf>,
        /// Stop printing after this many cycles.
        #[arg(long)]
        limit: Option<usize>,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// key=value configuration file
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Extra `key=value` overrides, applied after the named flags.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    spm_capacity: Option<String>,
    #[arg(long)]
    initial_latency: Option<String>,
    #[arg(long)]
    dot_unit: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    workload: Option<String>,
    #[arg(long)]
    instances: Option<String>,
    #[arg(long)]
    max_cycles: Option<String>,
    #[arg(long)]
    load_latency: Option<String>,
    #[arg(long)]
    weights: Option<String>,
}

#[derive(Args)]
struct OutputArgs {
    /// text, csv or json
    #[arg(long, default_value = "text")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

type Res<T> = Result<T, String>;

impl ConfigArgs {
    fn load(&self) -> Res<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p).map_err(|e| e.to_string())?,
            None => RunConfig::default(),
        };
        let named = [
            ("scheme", &self.scheme),
            ("d", &self.d),
            ("f", &self.f),
            ("m", &self.m),
            ("n", &self.n),
            ("spm_capacity", &self.spm_capacity),
            ("initial_latency", &self.initial_latency),
            ("dot_unit", &self.dot_unit),
            ("seed", &self.seed),
            ("workload", &self.workload),
            ("instances", &self.instances),
            ("max_cycles", &self.max_cycles),
            ("load_latency", &self.load_latency),
            ("weights", &self.weights),
        ];
        for (k, v) in named {
            if let Some(v) = v {
                c.set(k, v).map_err(|e| e.to_string())?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
            c.set(k.trim(), v.trim()).map_err(|e| e.to_string())?;
        }
        Ok(c)
    }
}

impl OutputArgs {
    fn emit(&self, table: &SweepTable, checks: &[imt_vsim::harness::trend::CheckResult]) -> Res<()> {
        let fmt = Format::parse(&self.format).ok_or_else(|| format!("unknown format `{}`", self.format))?;
        let text = render(table, checks, fmt).map_err(|e| e.to_string())?;
        match &self.out {
            Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn cmd_run(cfg: &ConfigArgs, out: &OutputArgs) -> Res<bool> {
    let rc = cfg.load()?;
    let coproc = rc.coproc().map_err(|e| e.to_string())?;
    let opts = rc.options().map_err(|e| e.to_string())?;
    let w = rc.workload();
    let (report, error) = match run_workload(&w, &coproc, &opts) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let ok = error.is_none();
    if let Some(e) = &error {
        eprintln!("error: {e}");
    }
    let table = SweepTable { cells: vec![SweepCell { config: (&coproc).into(), workload: w.label(), report, error }] };
    out.emit(&table, &[])?;
    Ok(ok)
}

fn sweep_table(rc: &RunConfig, which: &str) -> Res<SweepTable> {
    let mut workloads = match which {
        "table" => table_workloads(rc.instances),
        "filters" => filter_workloads(rc.instances),
        "all" => {
            let mut v = table_workloads(rc.instances);
            v.extend(filter_workloads(rc.instances).into_iter().skip(1));
            v
        }
        other => return Err(format!("unknown grid `{other}`")),
    };
    workloads.dedup();
    let base = rc.coproc().map_err(|e| e.to_string())?;
    let opts = rc.options().map_err(|e| e.to_string())?;
    Ok(sweep(&grid(&workloads, &base), &opts))
}

fn report_failures(table: &SweepTable) -> bool {
    let mut ok = true;
    for f in table.failures() {
        eprintln!("error: {} {}: {}", f.config.scheme, f.workload, f.error.as_deref().unwrap_or(""));
        ok = false;
    }
    ok
}

fn cmd_sweep(cfg: &ConfigArgs, which: &str, check: bool, out: &OutputArgs) -> Res<bool> {
    let rc = cfg.load()?;
    let table = sweep_table(&rc, which)?;
    let checks = if check { trend_check(&table) } else { Vec::new() };
    out.emit(&table, &checks)?;
    let ok = report_failures(&table);
    Ok(ok && checks.iter().all(|c| c.verdict != Verdict::Fail))
}

fn cmd_check(cfg: &ConfigArgs, out: &OutputArgs) -> Res<bool> {
    let rc = cfg.load()?;
    let table = sweep_table(&rc, "all")?;
    let checks = trend_check(&table);
    if out.format == "text" && out.out.is_none() {
        for c in &checks {
            println!("{}", c.line());
        }
    } else {
        out.emit(&table, &checks)?;
    }
    let ok = report_failures(&table);
    Ok(ok && checks.iter().all(|c| c.verdict == Verdict::Pass))
}

fn read_source(path: &PathBuf) -> Res<SourceUnit> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(SourceUnit::from_text(path.display().to_string(), &text))
}

fn cmd_asm(file: &PathBuf, origin: u32) -> Res<bool> {
    let src = read_source(file)?;
    let p = assemble(&src, origin).map_err(|e| e.to_string())?;
    print!("{}", disassemble(&p).text());
    eprintln!("{} instructions at {:#x}, {} data words", p.instrs.len(), p.origin, p.data.len());
    Ok(true)
}

fn cmd_trace(cfg: &ConfigArgs, program: Option<&PathBuf>, limit: Option<usize>) -> Res<bool> {
    let rc = cfg.load()?;
    let core_cfg = CoreConfig { trace: true, load_latency: rc.load_latency, ..CoreConfig::default() };
    let (mut core, stop, verify) = match program {
        Some(path) => {
            let p = assemble(&read_source(path)?, 0).map_err(|e| e.to_string())?;
            let coproc = rc.coproc().unwrap_or_else(|_| CoprocConfig::new(rc.scheme, rc.d, 4).expect("default shape"));
            let entries = single_hart(&p);
            let core = Core::new(p, entries, coproc, core_cfg).map_err(|e| e.to_string())?;
            (core, StopCondition::AllHalted, None)
        }
        None => {
            let coproc = rc.coproc().map_err(|e| e.to_string())?;
            let w = rc.workload();
            let kp = build_workload(w.jobs(), w.instances(), &coproc, rc.seed).map_err(|e| e.to_string())?;
            let core = kp.core(coproc, core_cfg).map_err(|e| e.to_string())?;
            let stop = kp.stop(w.instances() as u64);
            (core, stop, Some(kp))
        }
    };
    let result = core.run(stop, rc.max_cycles);
    let trace = core.take_trace();
    let lines = trace.lines();
    match limit {
        Some(n) => lines.take(n).for_each(|l| println!("{l}")),
        None => lines.for_each(|l| println!("{l}")),
    }
    let reason = result.map_err(|t| t.to_string())?;
    eprintln!("stopped: {reason:?} after {} cycles", core.counters.cycles);
    if let Some(kp) = verify {
        kp.verify(&core).map_err(|e| e.to_string())?;
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Run { cfg, out } => cmd_run(cfg, out),
        Cmd::Sweep { cfg, grid, check, out } => cmd_sweep(cfg, grid, *check, out),
        Cmd::Check { cfg, out } => cmd_check(cfg, out),
        Cmd::Asm { file, origin } => cmd_asm(file, *origin),
        Cmd::Trace { cfg, program, limit } => cmd_trace(cfg, program.as_ref(), *limit),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
