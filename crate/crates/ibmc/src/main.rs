use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ibmc::bench;
use ibmc::dimacs;
use ibmc::driver::{run_check, CheckConfig, EXIT_USAGE};
use ibmc::families;
use ibmc::memory::CountingAlloc;
use ibmc_core::sat::Solver;
use ibmc_core::Options;

#[global_allocator]
static ALLOC: CountingAlloc = CountingAlloc;

#[derive(Parser)]
#[command(
    name = "ibmc",
    version,
    about = "Incremental bounded model checker for .rsl programs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the assertions of a program.
    Check(CheckArgs),
    /// Solve a DIMACS CNF file.
    Sat {
        file: PathBuf,
        /// Disable the in-solver preprocessing.
        #[arg(long)]
        no_sat_preprocessor: bool,
    },
    /// Run every benchmark in a directory under several modes.
    Bench {
        dir: PathBuf,
        /// Comma-separated modes; the first one is the baseline.
        #[arg(long, default_value = "ni+s+p,i+s+p")]
        modes: String,
        /// CSV output file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Per-run timeout in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
    },
    /// Write synthetic benchmark programs and their expectation sidecars.
    /// `suite` writes the standard corpus.
    Gen {
        family: String,
        /// Comma-separated numeric parameters.
        #[arg(long, value_delimiter = ',')]
        params: Vec<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// With `suite`: also write this many random programs.
        #[arg(long, default_value_t = 0)]
        random: u64,
    },
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    #[arg(long)]
    incremental: bool,
    /// Incremental check of the given main loop (e.g. `main.1`).
    #[arg(long, value_name = "LOOP")]
    incremental_check: Option<String>,
    /// Main loop to check without implying `--incremental`.
    #[arg(long, value_name = "LOOP", conflicts_with = "incremental_check")]
    check_loop: Option<String>,
    #[arg(long, value_name = "K")]
    unwind_max: Option<u32>,
    #[arg(long)]
    slice_formula: bool,
    #[arg(long)]
    refine: bool,
    #[arg(long)]
    no_sat_preprocessor: bool,
    #[arg(long)]
    no_unwinding_assertions: bool,
    #[arg(long)]
    no_constant_propagation: bool,
    #[arg(long)]
    stop_when_unsat: bool,
    #[arg(long, conflicts_with = "stop_when_unsat")]
    k_induction: bool,
    #[arg(long)]
    show_loops: bool,
    #[arg(long)]
    show_ssa: bool,
    #[arg(long, value_name = "PATH")]
    dump_dimacs: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    trace_json: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock limit in seconds.
    #[arg(long, value_name = "S")]
    timeout: Option<f64>,
    #[arg(long, hide = true)]
    report: Option<PathBuf>,
}

impl CheckArgs {
    fn config(self) -> Result<CheckConfig> {
        let timeout = match self.timeout {
            Some(t) if !(t.is_finite() && t > 0.0) => bail!("--timeout must be positive"),
            Some(t) => Some(Duration::from_secs_f64(t)),
            None => None,
        };
        let options = Options {
            incremental: self.incremental || self.incremental_check.is_some(),
            unwind_max: self.unwind_max,
            check_loop: self.incremental_check.or(self.check_loop),
            slice: self.slice_formula,
            refine: self.refine,
            sat_preprocessing: !self.no_sat_preprocessor,
            constant_propagation: !self.no_constant_propagation,
            stop_when_unsat: self.stop_when_unsat,
            k_induction: self.k_induction,
            seed: self.seed,
            ..Options::default()
        };
        Ok(CheckConfig {
            file: self.file,
            options,
            unwinding_assertions: !self.no_unwinding_assertions,
            show_loops: self.show_loops,
            show_ssa: self.show_ssa,
            dump_dimacs: self.dump_dimacs,
            trace_json: self.trace_json,
            timeout,
            report: self.report,
        })
    }
}

fn sat(file: &Path, no_pre: bool, out: &mut dyn Write) -> Result<i32> {
    let text =
        fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
    let cnf = dimacs::parse(&text).map_err(|e| anyhow::anyhow!("{}: {e}", file.display()))?;
    let mut s = Solver::new();
    s.set_preprocessing(!no_pre)?;
    cnf.load(&mut s);
    if s.solve(&[]).is_sat() {
        writeln!(out, "s SATISFIABLE")?;
        let mut line = String::from("v");
        for v in 1..=cnf.num_vars as i64 {
            let l = ibmc_core::sat::Lit::from_dimacs(v);
            let x = if s.model_value(l) == Some(false) {
                -v
            } else {
                v
            };
            line.push_str(&format!(" {x}"));
        }
        writeln!(out, "{line} 0")?;
        Ok(10)
    } else {
        writeln!(out, "s UNSATISFIABLE")?;
        Ok(20)
    }
}

fn write_instance(dir: &Path, inst: &families::Instance) -> Result<()> {
    let rsl = dir.join(format!("{}.rsl", inst.name));
    fs::write(&rsl, &inst.source).with_context(|| format!("cannot write {}", rsl.display()))?;
    if let Some(e) = &inst.expect {
        fs::write(dir.join(format!("{}.expect", inst.name)), e.to_sidecar())?;
    }
    Ok(())
}

fn gen(family: &str, params: &[u64], dir: &Path, random: u64) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    if family == "suite" {
        for (f, p) in families::standard_suite() {
            write_instance(dir, &families::generate(f, &p)?)?;
        }
        for seed in 0..random {
            write_instance(dir, &families::generate("random", &[seed])?)?;
        }
        return Ok(());
    }
    write_instance(dir, &families::generate(family, params)?)
}

fn run(cli: Cli) -> Result<i32> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.cmd {
        Cmd::Check(a) => run_check(&a.config()?, &mut out),
        Cmd::Sat {
            file,
            no_sat_preprocessor,
        } => sat(&file, no_sat_preprocessor, &mut out),
        Cmd::Bench {
            dir,
            modes,
            out: csv,
            jobs,
            timeout,
        } => {
            let modes = bench::parse_modes(&modes).map_err(anyhow::Error::msg)?;
            if !(timeout.is_finite() && timeout > 0.0) {
                bail!("--timeout must be positive");
            }
            let benches = bench::discover(&dir)?;
            if benches.is_empty() {
                bail!("no benchmarks with .expect sidecars in {}", dir.display());
            }
            let exe = std::env::current_exe()?;
            let records = bench::run_all(
                &exe,
                &benches,
                &modes,
                jobs,
                Duration::from_secs_f64(timeout),
            );
            fs::write(&csv, bench::to_csv(&records))
                .with_context(|| format!("cannot write {}", csv.display()))?;
            write!(out, "{}", bench::render_report(&records, &modes))?;
            Ok(if records.iter().any(|r| r.mismatch.is_some()) {
                EXIT_USAGE
            } else {
                0
            })
        }
        Cmd::Gen {
            family,
            params,
            out: dir,
            random,
        } => gen(&family, &params, &dir, random).map(|()| 0),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
