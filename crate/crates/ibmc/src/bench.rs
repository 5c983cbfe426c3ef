//! Benchmark runner and report.
//!
//! Every (benchmark, mode) pair runs as a child `ibmc check` process with a
//! hard timeout; the child writes its summary to a file. Up to `jobs` children
//! run at once, and the report is assembled afterwards on one thread.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{mpsc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use wait_timeout::ChildExt;

use crate::driver::RunSummary;
use crate::families::Expectation;

/// Engine configuration named by `+`-joined flags: `i` or `ni` first, then
/// any of `s` (slicing), `p` (SAT preprocessing), `r` (refinement) and `k`
/// (k-induction). Example: `i+s+p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub incremental: bool,
    pub slice: bool,
    pub preprocess: bool,
    pub refine: bool,
    pub induction: bool,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        let mut parts = s.split('+');
        let incremental = match parts.next() {
            Some("i") => true,
            Some("ni") => false,
            _ => return Err(format!("mode `{s}` must start with `i` or `ni`")),
        };
        let mut m = Mode {
            incremental,
            slice: false,
            preprocess: false,
            refine: false,
            induction: false,
        };
        for p in parts {
            let flag = match p {
                "s" => &mut m.slice,
                "p" => &mut m.preprocess,
                "r" => &mut m.refine,
                "k" => &mut m.induction,
                _ => return Err(format!("unknown mode flag `{p}` in `{s}`")),
            };
            if *flag {
                return Err(format!("flag `{p}` repeated in `{s}`"));
            }
            *flag = true;
        }
        Ok(m)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.incremental { "i" } else { "ni" })?;
        for (on, c) in [
            (self.slice, "s"),
            (self.preprocess, "p"),
            (self.refine, "r"),
            (self.induction, "k"),
        ] {
            if on {
                write!(f, "+{c}")?;
            }
        }
        Ok(())
    }
}

impl Mode {
    /// `check` arguments selecting this mode.
    pub fn args(&self) -> Vec<&'static str> {
        let mut a = Vec::new();
        if self.incremental {
            a.push("--incremental");
        }
        if self.slice {
            a.push("--slice-formula");
        }
        if !self.preprocess {
            a.push("--no-sat-preprocessor");
        }
        if self.refine {
            a.push("--refine");
        }
        if self.induction {
            a.push("--k-induction");
        }
        a
    }
}

pub fn parse_modes(list: &str) -> Result<Vec<Mode>, String> {
    let modes: Vec<Mode> = list
        .split(',')
        .map(|m| m.trim().parse())
        .collect::<Result<_, _>>()?;
    if modes.is_empty() {
        return Err("no modes given".into());
    }
    Ok(modes)
}

#[derive(Clone, Debug)]
pub struct Benchmark {
    pub name: String,
    pub path: PathBuf,
    pub expect: Expectation,
}

/// All `.rsl` files in `dir` that have an `.expect` sidecar, sorted by name.
pub fn discover(dir: &Path) -> Result<Vec<Benchmark>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot read {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("rsl") {
            continue;
        }
        let side = path.with_extension("expect");
        let Ok(text) = fs::read_to_string(&side) else {
            continue;
        };
        let expect =
            Expectation::parse(&text).with_context(|| format!("bad sidecar {}", side.display()))?;
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        out.push(Benchmark { name, path, expect });
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub benchmark: String,
    pub mode: Mode,
    /// Engine verdict name, or `timeout` / `error`.
    pub verdict: String,
    pub depth: Option<u32>,
    pub wall_ms: f64,
    pub solve_ms: f64,
    pub clauses: u64,
    pub vars: u64,
    pub solves: u64,
    pub peak_mem_kb: u64,
    /// Full child summary when it finished.
    pub summary: Option<RunSummary>,
    /// Set when the result contradicts the sidecar.
    pub mismatch: Option<String>,
}

impl RunRecord {
    pub fn solved(&self) -> bool {
        matches!(self.verdict.as_str(), "cex" | "safe" | "proved" | "unsat")
    }
}

pub const CSV_HEADER: &str =
    "benchmark,mode,verdict,depth,wall_ms,solve_ms,clauses,vars,solves,peak_mem_kb";

fn check_expectation(
    b: &Benchmark,
    mode: Mode,
    verdict: &str,
    depth: Option<u32>,
) -> Option<String> {
    let (want, want_depth) = if mode.induction {
        let (v, d) = b.expect.induction.as_ref()?;
        (v.as_str(), *d)
    } else {
        (b.expect.verdict.as_str(), b.expect.depth)
    };
    let timed_out = verdict == "timeout" || verdict == "limit";
    if timed_out || (verdict == want && depth == Some(want_depth)) {
        None
    } else {
        Some(format!(
            "expected {want}@{want_depth}, got {verdict}@{}",
            depth.map_or("-".into(), |d| d.to_string())
        ))
    }
}

static SCRATCH: AtomicU64 = AtomicU64::new(0);

/// Run one benchmark in one mode as a child process of `exe`.
pub fn run_one(exe: &Path, b: &Benchmark, mode: Mode, timeout: Duration) -> RunRecord {
    let report = std::env::temp_dir().join(format!(
        "ibmc-run-{}-{}.json",
        std::process::id(),
        SCRATCH.fetch_add(1, Ordering::Relaxed)
    ));
    let mut cmd = Command::new(exe);
    cmd.arg("check").arg(&b.path).args(mode.args());
    cmd.arg("--unwind-max").arg(b.expect.kmax.to_string());
    if let Some(l) = &b.expect.check_loop {
        cmd.arg("--check-loop").arg(l);
    }
    // the soft limit lets the engine stop cleanly before the hard kill
    cmd.arg("--timeout")
        .arg(format!("{:.3}", timeout.as_secs_f64()));
    cmd.arg("--report").arg(&report);
    cmd.stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::null());

    let started = Instant::now();
    let mut rec = RunRecord {
        benchmark: b.name.clone(),
        mode,
        verdict: "error".into(),
        depth: None,
        wall_ms: 0.0,
        solve_ms: 0.0,
        clauses: 0,
        vars: 0,
        solves: 0,
        peak_mem_kb: 0,
        summary: None,
        mismatch: None,
    };
    let status = match cmd.spawn() {
        Ok(mut child) => match child.wait_timeout(timeout + Duration::from_secs(2)) {
            Ok(Some(st)) => Some(st),
            _ => {
                let _ = child.kill();
                let _ = child.wait();
                rec.verdict = "timeout".into();
                None
            }
        },
        Err(e) => {
            rec.mismatch = Some(format!("cannot start {}: {e}", exe.display()));
            None
        }
    };
    rec.wall_ms = started.elapsed().as_secs_f64() * 1e3;
    if status.is_some() {
        let summary = fs::read_to_string(&report)
            .ok()
            .and_then(|t| serde_json::from_str::<RunSummary>(&t).ok());
        if let Some(s) = summary {
            rec.verdict = if s.verdict == "limit" {
                "timeout".into()
            } else {
                s.verdict.clone()
            };
            rec.depth = s.depth;
            rec.wall_ms = s.wall_ms;
            rec.solve_ms = s.solve_ms;
            rec.clauses = s.clauses;
            rec.vars = s.vars;
            rec.solves = s.solves;
            rec.peak_mem_kb = s.peak_mem_kb;
            rec.summary = Some(s);
        }
    }
    let _ = fs::remove_file(&report);
    if rec.mismatch.is_none() {
        rec.mismatch = if rec.verdict == "error" {
            Some("child failed without a report".into())
        } else {
            check_expectation(b, mode, &rec.verdict, rec.depth)
        };
    }
    rec
}

/// Run every benchmark in every mode with up to `jobs` concurrent children.
/// Records come back in (benchmark, mode) order.
pub fn run_all(
    exe: &Path,
    benches: &[Benchmark],
    modes: &[Mode],
    jobs: usize,
    timeout: Duration,
) -> Vec<RunRecord> {
    let mut work: Vec<(usize, usize)> = Vec::new();
    for bi in 0..benches.len() {
        for mi in 0..modes.len() {
            work.push((bi, mi));
        }
    }
    let total = work.len();
    work.reverse();
    let queue = Mutex::new(work);
    let (tx, rx) = mpsc::channel();
    thread::scope(|s| {
        for _ in 0..jobs.max(1) {
            let tx = tx.clone();
            let queue = &queue;
            s.spawn(move || loop {
                let next = queue.lock().unwrap().pop();
                let Some((bi, mi)) = next else { break };
                let r = run_one(exe, &benches[bi], modes[mi], timeout);
                if tx.send(((bi, mi), r)).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);
    let mut got: BTreeMap<(usize, usize), RunRecord> = rx.into_iter().collect();
    debug_assert_eq!(got.len(), total);
    (0..benches.len())
        .flat_map(|bi| (0..modes.len()).map(move |mi| (bi, mi)))
        .filter_map(|k| got.remove(&k))
        .collect()
}

pub fn to_csv(records: &[RunRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.3},{:.3},{},{},{},{}",
            r.benchmark,
            r.mode,
            r.verdict,
            r.depth.map_or(String::new(), |d| d.to_string()),
            r.wall_ms,
            r.solve_ms,
            r.clauses,
            r.vars,
            r.solves,
            r.peak_mem_kb
        );
    }
    s
}

pub fn geometric_mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() || xs.iter().any(|x| x.is_nan() || *x <= 0.0) {
        return None;
    }
    Some((xs.iter().map(|x| x.ln()).sum::<f64>() / xs.len() as f64).exp())
}

pub fn arithmetic_mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Speedup of one mode over a baseline.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub baseline: Mode,
    pub mode: Mode,
    /// (benchmark, baseline ms, mode ms, speedup) over the commonly solved set.
    pub rows: Vec<(String, f64, f64, f64)>,
    pub geo_mean: Option<f64>,
    pub arith_mean: Option<f64>,
    /// Benchmarks solved by only one of the two modes.
    pub excluded: Vec<String>,
}

/// Timings below this are clamped so that trivial runs do not produce
/// infinite or zero speedups.
const MIN_MS: f64 = 0.001;

pub fn compare(records: &[RunRecord], baseline: Mode, mode: Mode) -> Comparison {
    let mut by: BTreeMap<&str, (Option<&RunRecord>, Option<&RunRecord>)> = BTreeMap::new();
    for r in records {
        let e = by.entry(r.benchmark.as_str()).or_default();
        if r.mode == baseline {
            e.0 = Some(r);
        }
        if r.mode == mode {
            e.1 = Some(r);
        }
    }
    let mut c = Comparison {
        baseline,
        mode,
        rows: Vec::new(),
        geo_mean: None,
        arith_mean: None,
        excluded: Vec::new(),
    };
    for (name, (a, b)) in by {
        match (a, b) {
            (Some(a), Some(b)) if a.solved() && b.solved() => {
                let (ta, tb) = (a.wall_ms.max(MIN_MS), b.wall_ms.max(MIN_MS));
                c.rows.push((name.to_string(), ta, tb, ta / tb));
            }
            (Some(a), Some(b)) if a.solved() != b.solved() => c.excluded.push(name.to_string()),
            _ => {}
        }
    }
    let speedups: Vec<f64> = c.rows.iter().map(|r| r.3).collect();
    c.geo_mean = geometric_mean(&speedups);
    c.arith_mean = arithmetic_mean(&speedups);
    c
}

/// Human-readable report: one comparison table per non-baseline mode, then
/// expectation mismatches.
pub fn render_report(records: &[RunRecord], modes: &[Mode]) -> String {
    let mut s = String::new();
    let base = modes[0];
    for &m in &modes[1..] {
        let c = compare(records, base, m);
        let _ = writeln!(s, "{base} vs {m}");
        let _ = writeln!(
            s,
            "{:<28} {:>12} {:>12} {:>9}",
            "benchmark",
            format!("{base} ms"),
            format!("{m} ms"),
            "speedup"
        );
        for (name, a, b, sp) in &c.rows {
            let _ = writeln!(s, "{name:<28} {a:>12.3} {b:>12.3} {sp:>9.2}");
        }
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |x| format!("{x:.2}"));
        let _ = writeln!(
            s,
            "geometric mean speedup {} (arithmetic {}) over {} benchmarks",
            fmt(c.geo_mean),
            fmt(c.arith_mean),
            c.rows.len()
        );
        if !c.excluded.is_empty() {
            let _ = writeln!(s, "solved by one mode only: {}", c.excluded.join(", "));
        }
        s.push('\n');
    }
    let bad: Vec<&RunRecord> = records.iter().filter(|r| r.mismatch.is_some()).collect();
    for r in &bad {
        let _ = writeln!(
            s,
            "MISMATCH {} {}: {}",
            r.benchmark,
            r.mode,
            r.mismatch.as_ref().unwrap()
        );
    }
    let timeouts = records.iter().filter(|r| r.verdict == "timeout").count();
    let _ = writeln!(
        s,
        "{} runs, {} timeouts, {} mismatches",
        records.len(),
        timeouts,
        bad.len()
    );
    s
}
