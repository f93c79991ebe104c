use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imt-vsim")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn asm_prints_canonical_source() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("loop.s");
    std::fs::write(&path, "  li x1, 4\nloop: addi x1, x1, -1\n  bne x1, x0, loop\n  ebreak\n").unwrap();
    let o = bin(&["asm", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("bne"), "{text}");

    let again = dir.path().join("again.s");
    std::fs::write(&again, &text).unwrap();
    let o2 = bin(&["asm", again.to_str().unwrap()]);
    assert_eq!(stdout(&o2), text);
}

#[test]
fn asm_reports_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.s");
    std::fs::write(&path, "addi x1, x1\n").unwrap();
    let o = bin(&["asm", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn run_emits_one_csv_row() {
    let o = bin(&["run", "--scheme", "sym", "--d", "2", "--workload", "conv8", "--instances", "1", "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "{text}");
    assert!(lines[0].starts_with("scheme,d,f,m,n,kernel,avg_cycles"));
    assert!(lines[1].contains("conv8"));
}

#[test]
fn run_reads_config_file_and_set_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "scheme = het\nd = 4\nworkload = conv4\ninstances = 1\n").unwrap();
    let out = dir.path().join("r.json");
    let o = bin(&["run", "-c", cfg.to_str().unwrap(), "--set", "seed=9", "--format", "json", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let report = &doc["cells"][0]["report"];
    assert_eq!(report["seed"], 9);
    assert_eq!(report["config"]["d"], 4);
}

#[test]
fn bad_config_is_a_usage_error() {
    assert_eq!(bin(&["run", "--set", "d=3", "--instances", "1"]).status.code(), Some(2));
    assert_eq!(bin(&["run", "--set", "colour=blue"]).status.code(), Some(2));
}

#[test]
fn trace_prints_stage_columns() {
    let o = bin(&["trace", "--workload", "conv4", "--instances", "1", "--limit", "20"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 20);
    assert!(String::from_utf8_lossy(&o.stderr).contains("stopped"));
}

#[test]
fn trace_runs_a_program_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.s");
    std::fs::write(&path, "li x1, 3\nadd x2, x1, x1\nebreak\n").unwrap();
    let o = bin(&["trace", "--program", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!stdout(&o).is_empty());
}

#[test]
fn sweep_filters_grid_is_reproducible() {
    let args = ["sweep", "--grid", "filters", "--instances", "1", "--format", "csv"];
    let a = bin(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(stdout(&a).lines().count(), 1 + 5 * 12);
    assert_eq!(stdout(&bin(&args)), stdout(&a));
}
