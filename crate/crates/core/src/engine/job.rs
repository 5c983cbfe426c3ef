//! One unwinding session with its slicer, encoder and solver.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{Hooks, Options, Phase, RunStats, SolveInfo};
use crate::cnf::{ActStatus, Encoder, EncoderOptions};
use crate::frontend::TypedProgram;
use crate::sat::{Lit, SolveOutcome, Solver};
use crate::slicer::SliceState;
use crate::symex::{Atom, EqId, SsaName, SymexOptions, UnwindingSession};

pub(crate) enum Outcome {
    Sat,
    Unsat,
    Interrupted,
}

pub(crate) struct Job<'p> {
    pub session: UnwindingSession<'p>,
    pub enc: Encoder<'p>,
    slicer: SliceState,
    consumed: usize,
    eq_loc: BTreeMap<EqId, (usize, usize)>,
    last_clauses: u64,
    compaction_threshold: f64,
}

impl<'p> Job<'p> {
    pub fn new(prog: &'p TypedProgram, l: usize, opts: &Options) -> Job<'p> {
        let session = UnwindingSession::for_loop(
            prog,
            l,
            SymexOptions {
                constant_propagation: opts.constant_propagation,
            },
        );
        let mut solver = Solver::with_seed(opts.seed);
        solver
            .set_preprocessing(opts.sat_preprocessing)
            .expect("fresh solver accepts the preprocessing switch");
        solver.record_clauses(opts.record_clauses);
        let enc = Encoder::new(
            prog,
            solver,
            EncoderOptions {
                refine_bv: opts.refine,
                lazy_arrays: opts.refine,
            },
        );
        Job {
            session,
            enc,
            slicer: SliceState::new(opts.slice),
            consumed: 0,
            eq_loc: BTreeMap::new(),
            last_clauses: 0,
            compaction_threshold: opts.compaction_threshold,
        }
    }

    /// Encode whatever the frames produced since the last call need, and
    /// return the atom literals of each of those frames.
    pub fn sync(&mut self, extra_roots: &[SsaName]) -> Vec<Vec<Lit>> {
        let frames = &self.session.frames()[self.consumed..];
        let mut roots: Vec<SsaName> = frames
            .iter()
            .flat_map(|f| f.atoms.iter().map(|a| a.name))
            .collect();
        roots.extend_from_slice(extra_roots);
        for (fi, f) in frames.iter().enumerate() {
            for (i, eq) in f.equations.iter().enumerate() {
                self.eq_loc.insert(eq.id, (self.consumed + fi, i));
            }
        }
        let ids = self.slicer.slice_increment(frames, &roots);
        for id in ids {
            let (f, i) = self.eq_loc[&id];
            let eq = &self.session.frames()[f].equations[i];
            self.enc.encode_equation(eq);
        }
        let new: Vec<Vec<Atom>> = self.session.frames()[self.consumed..]
            .iter()
            .map(|f| f.atoms.clone())
            .collect();
        self.consumed = self.session.frames().len();
        new.iter()
            .map(|atoms| atoms.iter().map(|a| self.enc.bool_lit(a.name)).collect())
            .collect()
    }

    /// `sel ↔ ∨ atoms` guarded by a fresh property activation literal for
    /// depth `k`. Returns the selector and the activation literal.
    pub fn property(&mut self, k: u32, atoms: &[Lit]) -> (Lit, Lit) {
        let alpha = self.enc.new_activation();
        let sel = self.enc.encode_property_selector(atoms, alpha);
        debug_assert!(
            self.enc
                .ledger
                .alpha
                .values()
                .all(|a| a.1 == ActStatus::Retired),
            "two live property activations"
        );
        self.enc.ledger.alpha.insert(k, (alpha, ActStatus::Live));
        (sel, alpha)
    }

    pub fn retire_alpha(&mut self, alpha: Lit) {
        self.enc.retire(alpha);
    }

    pub fn add_unit(&mut self, l: Lit) {
        self.enc.emit(&[l]);
    }

    /// Solve under `¬alpha`, running the refinement loop when enabled.
    pub fn solve(
        &mut self,
        alpha: Lit,
        phase: Phase,
        depth: u32,
        stats: &mut RunStats,
        hooks: &mut dyn Hooks,
    ) -> Outcome {
        let mut property_solve = true;
        let mut round = 0;
        loop {
            let mut assumptions = alloc::vec![!alpha];
            let approx = self.enc.approx_assumptions();
            let approximated = !approx.is_empty();
            assumptions.extend(approx);
            let now = self.enc.stats.clauses;
            let added = now - self.last_clauses;
            self.last_clauses = now;
            stats.clauses_encoded += added;
            stats.solves += 1;
            if property_solve {
                stats.property_solves += 1;
            } else {
                stats.refinement_solves += 1;
            }
            property_solve = false;
            let t0 = hooks.now_us();
            let out = {
                let mut stop = || hooks.interrupted();
                self.enc.solver.solve_with(&assumptions, &mut stop)
            };
            stats.solve_us += hooks.now_us().saturating_sub(t0);
            stats.final_clauses = self.enc.solver.num_clauses() as u64;
            stats.final_vars = self.enc.solver.num_vars() as u64;
            let sat = match out {
                SolveOutcome::Interrupted => return Outcome::Interrupted,
                SolveOutcome::Sat => true,
                SolveOutcome::Unsat(_) => false,
            };
            hooks.on_solve(
                &SolveInfo {
                    phase,
                    depth,
                    round,
                    sat,
                    clauses_added: added,
                },
                &self.enc.solver,
            );
            if !sat {
                if approximated {
                    stats.over_approx_unsat += 1;
                }
                return Outcome::Unsat;
            }
            if self.enc.options().refine_bv || self.enc.options().lazy_arrays {
                let b = self.enc.refine_bitvectors();
                let a = self.enc.refine_arrays();
                stats.refinements += b as u64;
                stats.array_lemmas += a as u64;
                if a + b > 0 {
                    round += 1;
                    continue;
                }
            }
            return Outcome::Sat;
        }
    }

    /// Compact the solver once enough clauses are permanently satisfied by
    /// retired activation literals.
    pub fn maybe_compact(&mut self, stats: &mut RunStats) {
        let total = self.enc.solver.num_clauses() as f64;
        if total > 0.0 && self.enc.retired_guarded as f64 > self.compaction_threshold * total {
            let keep = self.enc.ledger.assumable();
            self.enc.solver.restart_and_compact(&keep);
            self.enc.retired_guarded = 0;
            stats.compactions += 1;
        }
    }

    /// Fold slicing and encoding counters into `stats`.
    pub fn finish(&self, stats: &mut RunStats) {
        stats.equations_generated += self.slicer.generated() as u64;
        stats.equations_encoded += self.enc.stats.equations;
    }
}
