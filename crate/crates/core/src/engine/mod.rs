//! Verification drivers: bounded model checking (incremental and not),
//! k-induction, the stop-when-unsat loop and multi-loop schedules.
//!
//! Depth `k` means the init step plus `k` loop iterations. Incremental BMC
//! keeps one session and one solver: at depth `k` it encodes the new frame,
//! adds `sel_k ∨ α_k` with `sel_k ↔ sel_{k-1} ∨ atoms_k`, solves under
//! `¬α_k` and then retires `α_k` with a unit clause.

mod job;
mod trace;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use crate::cnf::{ActStatus, ActivationLedger};
pub use trace::{Trace, TraceEnv, TraceStep};

use crate::frontend::TypedProgram;
use crate::sat::{Lit, Solver};
use job::{Job, Outcome};

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub incremental: bool,
    /// Maximum depth; `None` unwinds until a counterexample or interrupt.
    pub unwind_max: Option<u32>,
    /// Last main loop to check (id `main.N` or loop name); defaults to the
    /// last one.
    pub check_loop: Option<String>,
    pub slice: bool,
    pub refine: bool,
    pub sat_preprocessing: bool,
    pub constant_propagation: bool,
    pub stop_when_unsat: bool,
    pub k_induction: bool,
    pub seed: u64,
    /// Compact the solver once this fraction of its clauses is satisfied by
    /// retired activation literals.
    pub compaction_threshold: f64,
    /// Keep a copy of every clause for DIMACS output.
    pub record_clauses: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            incremental: false,
            unwind_max: None,
            check_loop: None,
            slice: false,
            refine: false,
            sat_preprocessing: true,
            constant_propagation: true,
            stop_when_unsat: false,
            k_induction: false,
            seed: 0,
            compaction_threshold: 0.25,
            record_clauses: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    CounterexampleFound {
        /// Global step of the violation.
        depth: u32,
        /// Loop executing at that step (`init` for step 0).
        loop_id: String,
        /// Iteration of that loop.
        loop_depth: u32,
        trace: Trace,
    },
    /// No violation up to the given depth.
    BoundedSafe(u32),
    /// The property is k-inductive for this k.
    Proved(u32),
    /// Stop-when-unsat mode reached an unsatisfiable depth.
    Unsat(u32),
    ResourceLimit(String),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::CounterexampleFound { .. } => "cex",
            Verdict::BoundedSafe(_) => "safe",
            Verdict::Proved(_) => "proved",
            Verdict::Unsat(_) => "unsat",
            Verdict::ResourceLimit(_) => "limit",
        }
    }

    pub fn depth(&self) -> Option<u32> {
        match self {
            Verdict::CounterexampleFound { depth, .. } => Some(*depth),
            Verdict::BoundedSafe(k) | Verdict::Proved(k) | Verdict::Unsat(k) => Some(*k),
            Verdict::ResourceLimit(_) => None,
        }
    }

    pub fn trace(&self) -> Option<&Trace> {
        match self {
            Verdict::CounterexampleFound { trace, .. } => Some(trace),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("unknown loop `{0}`")]
    UnknownLoop(String),
    #[error("the program has no unbounded loop")]
    NoLoop,
    #[error("{0}")]
    Usage(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Property,
    BaseCase,
    StepCase,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveInfo {
    pub phase: Phase,
    pub depth: u32,
    /// Refinement round within this query, starting at 0.
    pub round: u32,
    pub sat: bool,
    /// Clauses encoded since the previous solve on the same solver.
    pub clauses_added: u64,
}

/// Callbacks into the embedding program: time, interruption and solver
/// inspection. All have trivial defaults.
pub trait Hooks {
    fn now_us(&mut self) -> u64 {
        0
    }

    fn interrupted(&mut self) -> bool {
        false
    }

    fn on_solve(&mut self, _info: &SolveInfo, _solver: &Solver) {}
}

pub struct NoHooks;

impl Hooks for NoHooks {}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub solves: u64,
    pub property_solves: u64,
    pub refinement_solves: u64,
    pub solve_us: u64,
    /// Sum over solve calls of the clauses encoded for that call.
    pub clauses_encoded: u64,
    pub final_clauses: u64,
    pub final_vars: u64,
    pub equations_generated: u64,
    pub equations_encoded: u64,
    pub refinements: u64,
    /// Solves that were UNSAT while approximations were active.
    pub over_approx_unsat: u64,
    pub array_lemmas: u64,
    pub compactions: u64,
}

impl RunStats {
    pub fn mean_clauses_per_solve(&self) -> f64 {
        if self.solves == 0 {
            0.0
        } else {
            self.clauses_encoded as f64 / self.solves as f64
        }
    }
}

pub struct Checker<'p> {
    prog: &'p TypedProgram,
    opts: Options,
    /// Index of the last main loop to check.
    target: usize,
    pub stats: RunStats,
}

impl<'p> Checker<'p> {
    pub fn new(prog: &'p TypedProgram, opts: Options) -> Result<Checker<'p>, EngineError> {
        if prog.main_loops.is_empty() {
            return Err(EngineError::NoLoop);
        }
        let target = match &opts.check_loop {
            Some(id) => prog
                .find_main_loop(id)
                .ok_or_else(|| EngineError::UnknownLoop(id.clone()))?,
            None => prog.main_loops.len() - 1,
        };
        if opts.k_induction && opts.stop_when_unsat {
            return Err(EngineError::Usage(
                "--stop-when-unsat is implied by --k-induction".into(),
            ));
        }
        if target > 0 && opts.unwind_max.is_none() {
            return Err(EngineError::Usage(
                "checking a later loop needs --unwind-max for the loops before it".into(),
            ));
        }
        if opts.k_induction && target > 0 {
            return Err(EngineError::Usage(
                "k-induction works on the first main loop only".into(),
            ));
        }
        Ok(Checker {
            prog,
            opts,
            target,
            stats: RunStats::default(),
        })
    }

    pub fn options(&self) -> &Options {
        &self.opts
    }

    fn kmax(&self) -> u32 {
        self.opts.unwind_max.unwrap_or(u32::MAX)
    }

    pub fn run(&mut self, hooks: &mut dyn Hooks) -> Verdict {
        if self.opts.k_induction {
            if self.opts.incremental {
                self.kinduction_incremental(hooks)
            } else {
                self.kinduction_nonincremental(hooks)
            }
        } else if self.opts.stop_when_unsat {
            self.stop_when_unsat(hooks)
        } else if self.opts.incremental {
            self.bmc_incremental(hooks)
        } else {
            self.bmc_nonincremental(hooks)
        }
    }

    /// `(loop, loop depth)` for each global step after init: loops before the
    /// target run `kmax` iterations each. Yields lazily since the target loop
    /// may be unbounded.
    fn schedule(&self) -> impl Iterator<Item = (usize, u32)> {
        let kmax = self.kmax();
        let target = self.target;
        (0..target)
            .flat_map(move |l| (1..=kmax).map(move |d| (l, d)))
            .chain((1..=kmax).map(move |d| (target, d)))
    }

    fn counterexample(&self, job: &Job, k: u32) -> Verdict {
        let f = job.session.frame(k);
        let (loop_id, loop_depth) = match f.main_loop {
            None => (String::from("init"), 0),
            Some(l) => (self.prog.main_loop_info(l).id.clone(), f.loop_depth),
        };
        Verdict::CounterexampleFound {
            depth: k,
            loop_id,
            loop_depth,
            trace: trace::extract(job, k),
        }
    }

    fn limit(&self, what: &str) -> Verdict {
        Verdict::ResourceLimit(String::from(what))
    }

    /// Advance `job` by one scheduled step.
    fn advance(job: &mut Job, (l, _): (usize, u32)) {
        if job.session.current_loop() != l {
            job.session.switch_loop(l);
        }
        job.session.unwind_step();
    }

    pub fn bmc_incremental(&mut self, hooks: &mut dyn Hooks) -> Verdict {
        let mut job = Job::new(self.prog, 0, &self.opts);
        let mut sel_prev = job.enc.false_lit();
        let mut sched = self.schedule();
        let mut k = 0u32;
        let verdict = loop {
            if hooks.interrupted() {
                break self.limit("interrupted");
            }
            let atoms = job.sync(&[]);
            let mut lits = Vec::from([sel_prev]);
            lits.extend(atoms.into_iter().flatten());
            let (sel, alpha) = job.property(k, &lits);
            let out = job.solve(alpha, Phase::Property, k, &mut self.stats, hooks);
            job.retire_alpha(alpha);
            match out {
                Outcome::Interrupted => break self.limit("interrupted"),
                Outcome::Sat => break self.counterexample(&job, k),
                Outcome::Unsat => {}
            }
            job.maybe_compact(&mut self.stats);
            sel_prev = sel;
            match sched.next() {
                Some(s) => Self::advance(&mut job, s),
                None => break Verdict::BoundedSafe(k),
            }
            k += 1;
        };
        job.finish(&mut self.stats);
        verdict
    }

    pub fn bmc_nonincremental(&mut self, hooks: &mut dyn Hooks) -> Verdict {
        let steps: Vec<(usize, u32)> = match self.opts.unwind_max {
            Some(_) => self.schedule().collect(),
            None => Vec::new(),
        };
        let mut k = 0u32;
        loop {
            if hooks.interrupted() {
                return self.limit("interrupted");
            }
            let mut job = Job::new(self.prog, 0, &self.opts);
            for i in 0..k as usize {
                let s = steps.get(i).copied().unwrap_or((self.target, i as u32 + 1));
                Self::advance(&mut job, s);
            }
            let atoms = job.sync(&[]);
            let lits: Vec<Lit> = atoms.into_iter().flatten().collect();
            let (_, alpha) = job.property(k, &lits);
            let out = job.solve(alpha, Phase::Property, k, &mut self.stats, hooks);
            job.finish(&mut self.stats);
            match out {
                Outcome::Interrupted => return self.limit("interrupted"),
                Outcome::Sat => return self.counterexample(&job, k),
                Outcome::Unsat => {}
            }
            if self.opts.unwind_max.is_some() && k as usize >= steps.len() {
                return Verdict::BoundedSafe(k);
            }
            k += 1;
        }
    }

    /// Unwind while the formula "violation at step k, none before" stays
    /// satisfiable; report the first unsatisfiable depth.
    pub fn stop_when_unsat(&mut self, hooks: &mut dyn Hooks) -> Verdict {
        let mut job = Job::new(self.prog, 0, &self.opts);
        let mut sched = self.schedule();
        let mut k = 0u32;
        let verdict = loop {
            let atoms = job.sync(&[]);
            let lits: Vec<Lit> = atoms.into_iter().flatten().collect();
            let (sel, alpha) = job.property(k, &lits);
            let out = job.solve(alpha, Phase::Property, k, &mut self.stats, hooks);
            job.retire_alpha(alpha);
            match out {
                Outcome::Interrupted => break self.limit("interrupted"),
                Outcome::Unsat => break Verdict::Unsat(k),
                Outcome::Sat => job.add_unit(!sel),
            }
            match sched.next() {
                Some(s) => Self::advance(&mut job, s),
                None => break self.limit("unwind-max reached while still satisfiable"),
            }
            k += 1;
        };
        job.finish(&mut self.stats);
        verdict
    }

    /// Step-case job: havocked loop-modified state, entry assumption as a
    /// unit.
    fn step_case_job(&self) -> Job<'p> {
        let mut job = Job::new(self.prog, 0, &self.opts);
        job.session.havoc_state().expect("havoc on a fresh session");
        let entry = job
            .session
            .entry_assumption()
            .expect("entry assumption on a fresh session");
        let roots: Vec<_> = entry.iter().map(|a| a.name).collect();
        job.sync(&roots);
        if let Some(a) = entry {
            let l = job.enc.bool_lit(a.name);
            job.add_unit(l);
        }
        job
    }

    /// Base and step case in lockstep, each on its own incremental solver.
    pub fn kinduction_incremental(&mut self, hooks: &mut dyn Hooks) -> Verdict {
        let kmax = self.kmax();
        let mut bc = Job::new(self.prog, 0, &self.opts);
        let mut sc = self.step_case_job();
        let mut k = 0u32;
        let verdict = loop {
            if hooks.interrupted() {
                break self.limit("interrupted");
            }
            let atoms = bc.sync(&[]);
            let lits: Vec<Lit> = atoms.into_iter().flatten().collect();
            let (p, alpha) = bc.property(k, &lits);
            let out = bc.solve(alpha, Phase::BaseCase, k, &mut self.stats, hooks);
            bc.retire_alpha(alpha);
            match out {
                Outcome::Interrupted => break self.limit("interrupted"),
                Outcome::Sat => break self.counterexample(&bc, k),
                Outcome::Unsat => bc.add_unit(!p),
            }
            if k >= 1 {
                let atoms = sc.sync(&[]);
                let lits: Vec<Lit> = atoms.into_iter().flatten().collect();
                let (sel, alpha) = sc.property(k, &lits);
                let out = sc.solve(alpha, Phase::StepCase, k, &mut self.stats, hooks);
                sc.retire_alpha(alpha);
                match out {
                    Outcome::Interrupted => break self.limit("interrupted"),
                    Outcome::Unsat => break Verdict::Proved(k),
                    Outcome::Sat => sc.add_unit(!sel),
                }
            }
            if k >= kmax {
                break Verdict::BoundedSafe(k);
            }
            k += 1;
            bc.session.unwind_step();
            sc.session.unwind_step();
        };
        bc.finish(&mut self.stats);
        sc.finish(&mut self.stats);
        verdict
    }

    /// The same checks with both cases rebuilt from scratch at every k.
    pub fn kinduction_nonincremental(&mut self, hooks: &mut dyn Hooks) -> Verdict {
        let kmax = self.kmax();
        let mut k = 0u32;
        loop {
            if hooks.interrupted() {
                return self.limit("interrupted");
            }
            // base case: violation at step k, none before
            let mut bc = Job::new(self.prog, 0, &self.opts);
            for _ in 0..k {
                bc.session.unwind_step();
            }
            let frames = bc.sync(&[]);
            let out = self.solve_last(&mut bc, frames, k, Phase::BaseCase, hooks);
            bc.finish(&mut self.stats);
            match out {
                Outcome::Interrupted => return self.limit("interrupted"),
                Outcome::Sat => return self.counterexample(&bc, k),
                Outcome::Unsat => {}
            }
            if k >= 1 {
                let mut sc = self.step_case_job();
                for _ in 0..k {
                    sc.session.unwind_step();
                }
                let frames = sc.sync(&[]);
                let out = self.solve_last(&mut sc, frames, k, Phase::StepCase, hooks);
                sc.finish(&mut self.stats);
                match out {
                    Outcome::Interrupted => return self.limit("interrupted"),
                    Outcome::Unsat => return Verdict::Proved(k),
                    Outcome::Sat => {}
                }
            }
            if k >= kmax {
                return Verdict::BoundedSafe(k);
            }
            k += 1;
        }
    }

    /// Solve "some atom of the last frame holds and no atom of an earlier
    /// frame does".
    fn solve_last(
        &mut self,
        job: &mut Job,
        frames: Vec<Vec<Lit>>,
        k: u32,
        phase: Phase,
        hooks: &mut dyn Hooks,
    ) -> Outcome {
        let n = frames.len();
        for (i, atoms) in frames.into_iter().enumerate() {
            if i + 1 < n {
                for a in atoms {
                    job.add_unit(!a);
                }
            } else {
                let (_, alpha) = job.property(k, &atoms);
                return job.solve(alpha, phase, k, &mut self.stats, hooks);
            }
        }
        unreachable!("at least one frame")
    }
}

/// Human-readable summary line for a verdict.
pub fn verdict_line(v: &Verdict) -> String {
    match v {
        Verdict::CounterexampleFound {
            depth,
            loop_id,
            loop_depth,
            ..
        } => format!("counterexample at depth {depth} ({loop_id} iteration {loop_depth})"),
        Verdict::BoundedSafe(k) => format!("no violation up to depth {k}"),
        Verdict::Proved(k) => format!("proved by {k}-induction"),
        Verdict::Unsat(k) => format!("unsatisfiable at depth {k}"),
        Verdict::ResourceLimit(what) => format!("resource limit: {what}"),
    }
}

#[cfg(test)]
mod tests;
