//! The `check` command.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use ibmc_core::engine::{verdict_line, Hooks, SolveInfo};
use ibmc_core::frontend::{compile, loop_table_text, CompileOptions};
use ibmc_core::sat::Solver;
use ibmc_core::symex::{SymexOptions, UnwindingSession};
use ibmc_core::{Checker, Options, Verdict};
use serde::{Deserialize, Serialize};

use crate::dimacs::{self, Cnf};
use crate::memory;
use crate::tracejson::trace_json;

pub const EXIT_SAFE: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;
pub const EXIT_CEX: i32 = 10;

#[derive(Clone, Debug, Default)]
pub struct CheckConfig {
    pub file: PathBuf,
    pub options: Options,
    pub unwinding_assertions: bool,
    pub show_loops: bool,
    pub show_ssa: bool,
    pub dump_dimacs: Option<PathBuf>,
    pub trace_json: Option<PathBuf>,
    pub timeout: Option<Duration>,
    /// Write a machine-readable run summary (used by `bench`).
    pub report: Option<PathBuf>,
}

/// Summary of one run as written by `--report`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub verdict: String,
    pub depth: Option<u32>,
    pub wall_ms: f64,
    pub solve_ms: f64,
    pub clauses: u64,
    pub vars: u64,
    pub solves: u64,
    pub property_solves: u64,
    pub clauses_encoded: u64,
    pub over_approx_unsat: u64,
    pub refinements: u64,
    pub peak_mem_kb: u64,
}

pub fn exit_code(v: &Verdict) -> i32 {
    match v {
        Verdict::CounterexampleFound { .. } => EXIT_CEX,
        Verdict::BoundedSafe(_) | Verdict::Proved(_) | Verdict::Unsat(_) => EXIT_SAFE,
        Verdict::ResourceLimit(_) => EXIT_LIMIT,
    }
}

struct StdHooks {
    start: Instant,
    deadline: Option<Instant>,
    dimacs: Option<PathBuf>,
    error: Option<std::io::Error>,
}

impl Hooks for StdHooks {
    fn now_us(&mut self) -> u64 {
        self.start.elapsed().as_micros() as u64
    }

    fn interrupted(&mut self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn on_solve(&mut self, info: &SolveInfo, solver: &Solver) {
        let Some(path) = &self.dimacs else { return };
        if self.error.is_some() {
            return;
        }
        let cnf = Cnf::from_recorded(solver).expect("clause recording is on");
        let text = dimacs::write(&cnf, &[format!("step k={} ell={}", info.depth, info.round)]);
        if let Err(e) = fs::write(path, text) {
            self.error = Some(e);
        }
    }
}

/// Run `check` and return the process exit code. Normal output goes to `out`.
pub fn run_check(cfg: &CheckConfig, out: &mut dyn Write) -> Result<i32> {
    let start = Instant::now();
    let src = fs::read_to_string(&cfg.file)
        .with_context(|| format!("cannot read {}", cfg.file.display()))?;
    let prog = compile(
        &src,
        CompileOptions {
            unwinding_assertions: cfg.unwinding_assertions,
        },
    )
    .map_err(|e| anyhow::anyhow!("{}: {e}", cfg.file.display()))?;

    if cfg.show_loops {
        write!(out, "{}", loop_table_text(&prog))?;
        return Ok(EXIT_SAFE);
    }
    if cfg.show_ssa {
        let l = match &cfg.options.check_loop {
            Some(id) => prog
                .find_main_loop(id)
                .with_context(|| format!("unknown loop `{id}`"))?,
            None => 0,
        };
        if prog.main_loops.is_empty() {
            bail!("the program has no unbounded loop");
        }
        let mut s = UnwindingSession::for_loop(
            &prog,
            l,
            SymexOptions {
                constant_propagation: cfg.options.constant_propagation,
            },
        );
        for _ in 0..cfg.options.unwind_max.unwrap_or(1) {
            s.unwind_step();
        }
        write!(out, "{}", s.show_ssa())?;
        return Ok(EXIT_SAFE);
    }

    let mut opts = cfg.options.clone();
    opts.record_clauses = cfg.dump_dimacs.is_some();
    let mut checker = Checker::new(&prog, opts)?;
    let mut hooks = StdHooks {
        start,
        deadline: cfg.timeout.map(|t| start + t),
        dimacs: cfg.dump_dimacs.clone(),
        error: None,
    };
    let verdict = checker.run(&mut hooks);
    if let Some(e) = hooks.error {
        return Err(e).context("cannot write the DIMACS dump");
    }
    let wall = start.elapsed();

    writeln!(out, "{}", verdict_line(&verdict))?;
    if let Some(t) = verdict.trace() {
        write!(out, "{}", t.to_text(&prog))?;
        if let Some(path) = &cfg.trace_json {
            let j = serde_json::to_string_pretty(&trace_json(&prog, t))?;
            fs::write(path, j).with_context(|| format!("cannot write {}", path.display()))?;
        }
    }

    if let Some(path) = &cfg.report {
        let st = &checker.stats;
        let summary = RunSummary {
            verdict: verdict.name().to_string(),
            depth: verdict.depth(),
            wall_ms: wall.as_secs_f64() * 1e3,
            solve_ms: st.solve_us as f64 / 1e3,
            clauses: st.final_clauses,
            vars: st.final_vars,
            solves: st.solves,
            property_solves: st.property_solves,
            clauses_encoded: st.clauses_encoded,
            over_approx_unsat: st.over_approx_unsat,
            refinements: st.refinements,
            peak_mem_kb: memory::peak_kb(),
        };
        fs::write(path, serde_json::to_string(&summary)?)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(exit_code(&verdict))
}
