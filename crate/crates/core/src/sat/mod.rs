//! Incremental CDCL SAT solver with solving under assumptions.
//!
//! Two-watched-literal propagation, VSIDS branching with phase saving,
//! first-UIP learning with local minimisation, Luby restarts and
//! activity-based learnt clause reduction. Assumptions are enqueued as the
//! first decisions of every search, so any clause learnt from them carries the
//! negated assumption literal and stays valid when later calls pass different
//! assumptions. Clauses are never removed through the public interface;
//! retracting a group of clauses is done by guarding it with an activation
//! literal and later asserting that literal.

mod heap;
mod lit;

use alloc::vec;
use alloc::vec::Vec;

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use heap::VarHeap;
pub use lit::{LBool, Lit, Var};

const NO_REASON: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f32,
}

#[derive(Clone, Copy, Debug)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

/// Result of a call to [`Solver::solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// Satisfiable; the model is available through [`Solver::model_value`].
    Sat,
    /// Unsatisfiable under the given assumptions. The vector is the subset of
    /// assumptions involved in the final conflict (empty if the clause set
    /// itself is unsatisfiable).
    Unsat(Vec<Lit>),
    /// The interrupt callback asked the search to stop.
    Interrupted,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat)
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveOutcome::Unsat(_))
    }
}

/// Errors from misuse of the solver configuration API.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SatError {
    #[error("preprocessing can only be toggled before the first solve call")]
    ToggleAfterSolve,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub solves: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learnts_removed: u64,
    pub compactions: u64,
}

#[derive(Clone)]
pub struct Solver {
    clauses: Vec<Clause>,
    originals: Vec<u32>,
    learnts: Vec<u32>,
    deleted_count: usize,
    watches: Vec<Vec<Watcher>>,

    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<u32>,
    polarity: Vec<bool>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,

    activity: Vec<f64>,
    var_inc: f64,
    var_decay: f64,
    cla_inc: f64,
    cla_decay: f64,
    order: VarHeap,
    seen: Vec<u8>,

    ok: bool,
    preprocess: bool,
    solved_once: bool,
    max_learnts: f64,
    unit_clauses: usize,

    model: Vec<LBool>,
    core: Vec<Lit>,
    rng: SmallRng,
    seeded: bool,
    pub stats: SolverStats,

    record: Option<Vec<Vec<Lit>>>,
    #[cfg(debug_assertions)]
    debug_originals: Vec<Vec<Lit>>,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            clauses: Vec::new(),
            originals: Vec::new(),
            learnts: Vec::new(),
            deleted_count: 0,
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            polarity: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            var_decay: 0.95,
            cla_inc: 1.0,
            cla_decay: 0.999,
            order: VarHeap::default(),
            seen: Vec::new(),
            ok: true,
            preprocess: true,
            solved_once: false,
            max_learnts: 0.0,
            unit_clauses: 0,
            model: Vec::new(),
            core: Vec::new(),
            rng: SmallRng::seed_from_u64(0),
            seeded: false,
            stats: SolverStats::default(),
            record: None,
            #[cfg(debug_assertions)]
            debug_originals: Vec::new(),
        }
    }

    /// A solver whose branching is perturbed by `seed`. Seed 0 is the
    /// deterministic default.
    pub fn with_seed(seed: u64) -> Solver {
        let mut s = Solver::new();
        s.rng = SmallRng::seed_from_u64(seed);
        s.seeded = seed != 0;
        s
    }

    /// Toggle on-add simplification. Only legal before the first solve.
    pub fn set_preprocessing(&mut self, on: bool) -> Result<(), SatError> {
        if self.solved_once {
            return Err(SatError::ToggleAfterSolve);
        }
        self.preprocess = on;
        Ok(())
    }

    pub fn preprocessing(&self) -> bool {
        self.preprocess
    }

    /// Keep a copy of every clause passed to `add_clause`, in order.
    pub fn record_clauses(&mut self, on: bool) {
        self.record = if on { Some(Vec::new()) } else { None };
    }

    pub fn recorded_clauses(&self) -> Option<&[Vec<Lit>]> {
        self.record.as_deref()
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var(self.assigns.len() as u32);
        self.assigns.push(LBool::Undef);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.polarity.push(true);
        let act = if self.seeded {
            self.rng.gen::<f64>() * 1e-5
        } else {
            0.0
        };
        self.activity.push(act);
        self.seen.push(0);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.order.insert(v.0, &self.activity);
        v
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    /// Number of stored original clauses plus original unit clauses.
    pub fn num_clauses(&self) -> usize {
        self.originals.len() + self.unit_clauses
    }

    pub fn num_learnts(&self) -> usize {
        self.learnts.len()
    }

    /// False once the clause set is known to be unsatisfiable.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    /// Value of a literal fixed at decision level zero, if any.
    pub fn fixed_value(&self, l: Lit) -> Option<bool> {
        let v = l.var().index();
        if self.level[v] == 0 {
            self.value_lit(l).to_option()
        } else {
            None
        }
    }

    #[inline]
    fn value_lit(&self, l: Lit) -> LBool {
        self.assigns[l.var().index()].negate_if(l.is_negated())
    }

    #[inline]
    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    /// Add a clause permanently. Returns false if the solver is now
    /// unsatisfiable regardless of assumptions.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if let Some(rec) = self.record.as_mut() {
            rec.push(lits.to_vec());
        }
        if !self.ok {
            return false;
        }
        debug_assert!(lits.iter().all(|l| l.var().index() < self.num_vars()));
        self.cancel_until(0);
        let mut ps: Vec<Lit> = lits.to_vec();
        ps.sort_unstable();
        ps.dedup();
        if ps.windows(2).any(|w| w[0] == !w[1]) {
            return true;
        }
        #[cfg(debug_assertions)]
        self.debug_originals.push(ps.clone());

        if self.preprocess {
            if ps.iter().any(|&l| self.value_lit(l) == LBool::True) {
                return true;
            }
            ps.retain(|&l| self.value_lit(l) != LBool::False);
            match ps.len() {
                0 => {
                    self.ok = false;
                    false
                }
                1 => {
                    self.unit_clauses += 1;
                    self.unchecked_enqueue(ps[0], NO_REASON);
                    if self.propagate().is_some() {
                        self.ok = false;
                    }
                    self.ok
                }
                _ => {
                    let cref = self.alloc_clause(ps, false);
                    self.originals.push(cref);
                    self.attach(cref);
                    true
                }
            }
        } else {
            if ps.is_empty() {
                self.ok = false;
                return false;
            }
            // watched positions must hold non-false literals where possible
            ps.sort_by_key(|&l| match self.value_lit(l) {
                LBool::True => 0,
                LBool::Undef => 1,
                LBool::False => 2,
            });
            if self.value_lit(ps[0]) == LBool::False {
                self.ok = false;
                return false;
            }
            let unit = ps.len() == 1 || self.value_lit(ps[1]) == LBool::False;
            let cref = if ps.len() > 1 {
                let cref = self.alloc_clause(ps.clone(), false);
                self.originals.push(cref);
                self.attach(cref);
                cref
            } else {
                self.unit_clauses += 1;
                NO_REASON
            };
            if unit && self.value_lit(ps[0]) == LBool::Undef {
                self.unchecked_enqueue(ps[0], cref);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            self.ok
        }
    }

    fn alloc_clause(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.clauses.push(Clause {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        cref
    }

    fn attach(&mut self, cref: u32) {
        let c = &self.clauses[cref as usize];
        let (a, b) = (c.lits[0], c.lits[1]);
        self.watches[a.code()].push(Watcher { cref, blocker: b });
        self.watches[b.code()].push(Watcher { cref, blocker: a });
    }

    #[inline]
    fn unchecked_enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var().index();
        debug_assert_eq!(self.assigns[v], LBool::Undef);
        self.assigns[v] = LBool::from_bool(!l.is_negated());
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn new_decision_level(&mut self) {
        self.trail_lim.push(self.trail.len());
    }

    fn cancel_until(&mut self, lvl: usize) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index();
            self.assigns[v] = LBool::Undef;
            self.reason[v] = NO_REASON;
            self.polarity[v] = l.is_negated();
            self.order.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl);
        self.qhead = lim;
    }

    /// Unit propagation; returns a conflicting clause if one is found.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = core::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value_lit(w.blocker) == LBool::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.value_lit(first) == LBool::True {
                    ws[j] = Watcher {
                        cref: w.cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                // look for a new literal to watch
                let len = self.clauses[cref].lits.len();
                let mut found = false;
                for k in 2..len {
                    let lk = self.clauses[cref].lits[k];
                    if self.value_lit(lk) != LBool::False {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[lk.code()].push(Watcher {
                            cref: w.cref,
                            blocker: first,
                        });
                        found = true;
                        break;
                    }
                }
                if found {
                    continue;
                }
                ws[j] = w;
                j += 1;
                if self.value_lit(first) == LBool::False {
                    conflict = Some(w.cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.unchecked_enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.increased(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc as f32;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backtrack level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, usize) {
        let mut out: Vec<Lit> = vec![Lit(0)];
        let mut path_c = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let mut to_clear: Vec<usize> = Vec::new();
        let dl = self.decision_level() as u32;

        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = if p.is_some() { 1 } else { 0 };
            let n = self.clauses[confl as usize].lits.len();
            for k in start..n {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var().index();
                if self.seen[v] == 0 && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = 1;
                    to_clear.push(v);
                    if self.level[v] >= dl {
                        path_c += 1;
                    } else {
                        out.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] != 0 {
                    break;
                }
            }
            let pl = self.trail[index];
            p = Some(pl);
            confl = self.reason[pl.var().index()];
            self.seen[pl.var().index()] = 0;
            path_c -= 1;
            if path_c == 0 {
                break;
            }
        }
        out[0] = !p.unwrap();

        // local minimisation: drop literals implied by others in the clause
        let mut keep = Vec::with_capacity(out.len());
        keep.push(out[0]);
        for &l in &out[1..] {
            let v = l.var().index();
            let r = self.reason[v];
            if r == NO_REASON {
                keep.push(l);
                continue;
            }
            let redundant = self.clauses[r as usize].lits[1..].iter().all(|q| {
                let qv = q.var().index();
                self.seen[qv] != 0 || self.level[qv] == 0
            });
            if !redundant {
                keep.push(l);
            }
        }
        for v in to_clear {
            self.seen[v] = 0;
        }
        let mut out = keep;

        let bt = if out.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..out.len() {
                if self.level[out[i].var().index()] > self.level[out[max_i].var().index()] {
                    max_i = i;
                }
            }
            out.swap(1, max_i);
            self.level[out[1].var().index()] as usize
        };
        (out, bt)
    }

    /// Collect the assumptions responsible for assumption literal `p` being
    /// false. Fills `self.core` with assumption literals.
    fn analyze_final(&mut self, failed: Lit) {
        self.core.clear();
        self.core.push(failed);
        if self.decision_level() == 0 {
            return;
        }
        let v0 = failed.var().index();
        self.seen[v0] = 1;
        let start = self.trail_lim[0];
        for i in (start..self.trail.len()).rev() {
            let x = self.trail[i].var().index();
            if self.seen[x] != 0 {
                let r = self.reason[x];
                if r == NO_REASON {
                    // a decision below the current assumption prefix is an assumption
                    self.core.push(self.trail[i]);
                } else {
                    let n = self.clauses[r as usize].lits.len();
                    for k in 1..n {
                        let q = self.clauses[r as usize].lits[k].var().index();
                        if self.level[q] > 0 {
                            self.seen[q] = 1;
                        }
                    }
                }
                self.seen[x] = 0;
            }
        }
        self.seen[v0] = 0;
        self.core.sort_unstable();
        self.core.dedup();
    }

    fn pick_branch_lit(&mut self) -> Option<Lit> {
        loop {
            let v = self.order.pop(&self.activity)?;
            if self.assigns[v as usize] == LBool::Undef {
                self.stats.decisions += 1;
                return Some(Var(v).lit(!self.polarity[v as usize]));
            }
        }
    }

    fn is_locked(&self, cref: u32) -> bool {
        let c = &self.clauses[cref as usize];
        let l0 = c.lits[0];
        self.reason[l0.var().index()] == cref && self.value_lit(l0) == LBool::True
    }

    fn reduce_db(&mut self) {
        let mut ls = core::mem::take(&mut self.learnts);
        ls.sort_by(|&a, &b| {
            let ca = &self.clauses[a as usize];
            let cb = &self.clauses[b as usize];
            let ka = (ca.lits.len() > 2, ca.activity);
            let kb = (cb.lits.len() > 2, cb.activity);
            kb.0.cmp(&ka.0).then(
                ka.1.partial_cmp(&kb.1)
                    .unwrap_or(core::cmp::Ordering::Equal),
            )
        });
        // binary clauses sort first (kept); the rest by increasing activity
        let half = ls.len() / 2;
        let mut kept = Vec::with_capacity(ls.len());
        let extra_lim = self.cla_inc / ls.len().max(1) as f64;
        for (i, &cref) in ls.iter().enumerate() {
            let c = &self.clauses[cref as usize];
            let removable = c.lits.len() > 2
                && !self.is_locked(cref)
                && (i < half || (c.activity as f64) < extra_lim);
            if removable {
                self.clauses[cref as usize].deleted = true;
                self.deleted_count += 1;
                self.stats.learnts_removed += 1;
            } else {
                kept.push(cref);
            }
        }
        self.learnts = kept;
        self.maybe_collect_garbage();
    }

    fn maybe_collect_garbage(&mut self) {
        if self.deleted_count * 2 > self.clauses.len() && self.deleted_count > 1000 {
            self.collect_garbage();
        }
    }

    /// Rebuild the clause arena without deleted clauses.
    fn collect_garbage(&mut self) {
        let mut remap = vec![NO_REASON; self.clauses.len()];
        let old = core::mem::take(&mut self.clauses);
        for (i, c) in old.into_iter().enumerate() {
            if !c.deleted {
                remap[i] = self.clauses.len() as u32;
                self.clauses.push(c);
            }
        }
        for r in self.reason.iter_mut() {
            if *r != NO_REASON {
                *r = remap[*r as usize];
            }
        }
        self.originals = self
            .originals
            .iter()
            .map(|&c| remap[c as usize])
            .filter(|&c| c != NO_REASON)
            .collect();
        self.learnts = self
            .learnts
            .iter()
            .map(|&c| remap[c as usize])
            .filter(|&c| c != NO_REASON)
            .collect();
        for w in self.watches.iter_mut() {
            w.clear();
        }
        for cref in 0..self.clauses.len() as u32 {
            self.attach(cref);
        }
        self.deleted_count = 0;
    }

    fn satisfied_at_root(&self, cref: u32) -> bool {
        self.clauses[cref as usize]
            .lits
            .iter()
            .any(|&l| self.value_lit(l) == LBool::True && self.level[l.var().index()] == 0)
    }

    /// Remove clauses satisfied at level zero.
    fn simplify(&mut self, originals_too: bool) {
        debug_assert_eq!(self.decision_level(), 0);
        let mut removed = 0;
        let learnts = core::mem::take(&mut self.learnts);
        let mut kept = Vec::with_capacity(learnts.len());
        for cref in learnts {
            if self.satisfied_at_root(cref) {
                self.clauses[cref as usize].deleted = true;
                removed += 1;
            } else {
                kept.push(cref);
            }
        }
        self.learnts = kept;
        if originals_too {
            let originals = core::mem::take(&mut self.originals);
            let mut kept = Vec::with_capacity(originals.len());
            for cref in originals {
                if self.satisfied_at_root(cref) {
                    self.clauses[cref as usize].deleted = true;
                    removed += 1;
                } else {
                    kept.push(cref);
                }
            }
            self.originals = kept;
        }
        // level-0 reasons are never consulted again
        for i in 0..self.trail.len() {
            let v = self.trail[i].var().index();
            self.reason[v] = NO_REASON;
        }
        self.deleted_count += removed;
    }

    /// Drop every clause satisfied at level zero (in particular everything
    /// guarded by a retired activation literal), strip root-false literals,
    /// and rebuild the clause arena. `keep_assumable` lists variables that
    /// later calls may still assume; they must not be fixed at level zero.
    pub fn restart_and_compact(&mut self, keep_assumable: &[Var]) {
        self.cancel_until(0);
        if self.ok && self.propagate().is_some() {
            self.ok = false;
        }
        debug_assert!(keep_assumable
            .iter()
            .all(|v| self.assigns[v.index()] == LBool::Undef || !self.ok));
        self.simplify(true);
        for cref in 0..self.clauses.len() {
            if self.clauses[cref].deleted {
                continue;
            }
            // watched literals of unsatisfied clauses are never root-false
            let (assigns, level) = (&self.assigns, &self.level);
            let c = &mut self.clauses[cref];
            let head = [c.lits[0], c.lits[1]];
            let mut tail: Vec<Lit> = c.lits[2..]
                .iter()
                .copied()
                .filter(|l| {
                    let v = l.var().index();
                    !(level[v] == 0 && assigns[v].negate_if(l.is_negated()) == LBool::False)
                })
                .collect();
            c.lits.truncate(2);
            c.lits[0] = head[0];
            c.lits[1] = head[1];
            c.lits.append(&mut tail);
        }
        self.collect_garbage();
        self.stats.compactions += 1;
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveOutcome {
        self.solve_with(assumptions, &mut || false)
    }

    /// Solve under `assumptions`; `interrupt` is polled periodically.
    pub fn solve_with(
        &mut self,
        assumptions: &[Lit],
        interrupt: &mut dyn FnMut() -> bool,
    ) -> SolveOutcome {
        self.model.clear();
        self.core.clear();
        self.solved_once = true;
        self.stats.solves += 1;
        if !self.ok {
            return SolveOutcome::Unsat(Vec::new());
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.ok = false;
            return SolveOutcome::Unsat(Vec::new());
        }
        self.simplify(self.preprocess);
        self.maybe_collect_garbage();

        self.max_learnts = (self.originals.len() as f64 / 3.0).max(2000.0);
        let mut learnt_adjust_confl = 100.0f64;
        let mut learnt_adjust_cnt = 100i64;
        let mut curr_restarts = 0u32;
        let result = loop {
            let budget = (luby(2.0, curr_restarts) * 100.0) as u64;
            match self.search(
                budget,
                assumptions,
                interrupt,
                &mut learnt_adjust_confl,
                &mut learnt_adjust_cnt,
            ) {
                Some(r) => break r,
                None => {
                    if interrupt() {
                        break SolveOutcome::Interrupted;
                    }
                    curr_restarts += 1;
                    self.stats.restarts += 1;
                }
            }
        };
        if result.is_sat() {
            self.model = self.assigns.clone();
            #[cfg(debug_assertions)]
            self.debug_check_model();
        }
        self.cancel_until(0);
        result
    }

    #[cfg(debug_assertions)]
    fn debug_check_model(&self) {
        for c in &self.debug_originals {
            debug_assert!(
                c.iter()
                    .any(|&l| self.model[l.var().index()].negate_if(l.is_negated()) == LBool::True),
                "model violates original clause {:?}",
                c
            );
        }
    }

    /// Returns `None` when the conflict budget is exhausted (restart).
    fn search(
        &mut self,
        budget: u64,
        assumptions: &[Lit],
        interrupt: &mut dyn FnMut() -> bool,
        learnt_adjust_confl: &mut f64,
        learnt_adjust_cnt: &mut i64,
    ) -> Option<SolveOutcome> {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(SolveOutcome::Unsat(Vec::new()));
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.unchecked_enqueue(learnt[0], NO_REASON);
                } else {
                    let first = learnt[0];
                    let cref = self.alloc_clause(learnt, true);
                    self.learnts.push(cref);
                    self.attach(cref);
                    self.bump_clause(cref);
                    self.unchecked_enqueue(first, cref);
                }
                self.var_inc /= self.var_decay;
                self.cla_inc /= self.cla_decay;

                *learnt_adjust_cnt -= 1;
                if *learnt_adjust_cnt <= 0 {
                    *learnt_adjust_confl *= 1.5;
                    *learnt_adjust_cnt = *learnt_adjust_confl as i64;
                    self.max_learnts *= 1.1;
                }
                if self.stats.conflicts.is_multiple_of(256) && interrupt() {
                    self.cancel_until(0);
                    return Some(SolveOutcome::Interrupted);
                }
            } else {
                if conflicts >= budget {
                    self.cancel_until(0);
                    return None;
                }
                if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                    self.reduce_db();
                }
                let mut next = None;
                while self.decision_level() < assumptions.len() {
                    let p = assumptions[self.decision_level()];
                    match self.value_lit(p) {
                        LBool::True => self.new_decision_level(),
                        LBool::False => {
                            self.analyze_final(!p);
                            let core: Vec<Lit> = self.core.iter().map(|&l| !l).collect();
                            return Some(SolveOutcome::Unsat(core));
                        }
                        LBool::Undef => {
                            next = Some(p);
                            break;
                        }
                    }
                }
                let next = match next {
                    Some(p) => p,
                    None => match self.pick_branch_lit() {
                        Some(p) => p,
                        None => return Some(SolveOutcome::Sat),
                    },
                };
                self.new_decision_level();
                self.unchecked_enqueue(next, NO_REASON);
            }
        }
    }

    /// Model value of a literal after a satisfiable call.
    pub fn model_value(&self, l: Lit) -> Option<bool> {
        self.model
            .get(l.var().index())
            .and_then(|v| v.negate_if(l.is_negated()).to_option())
    }

    pub fn has_model(&self) -> bool {
        !self.model.is_empty()
    }

    /// Assumption literals of the last unsatisfiable call's final conflict.
    pub fn unsat_core(&self) -> Vec<Lit> {
        self.core.iter().map(|&l| !l).collect()
    }

    /// All stored original clauses plus level-zero units, for dumping.
    pub fn clause_snapshot(&self) -> Vec<Vec<Lit>> {
        let mut out: Vec<Vec<Lit>> = Vec::new();
        let lim = self.trail_lim.first().copied().unwrap_or(self.trail.len());
        for &l in &self.trail[..lim] {
            out.push(vec![l]);
        }
        for &c in &self.originals {
            if !self.clauses[c as usize].deleted {
                out.push(self.clauses[c as usize].lits.clone());
            }
        }
        if !self.ok {
            out.push(Vec::new());
        }
        out
    }
}

/// The Luby restart sequence scaled by `y`.
fn luby(y: f64, mut x: u32) -> f64 {
    let mut size = 1u32;
    let mut seq = 0i32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    libm_pow(y, seq)
}

fn libm_pow(base: f64, exp: i32) -> f64 {
    let mut r = 1.0;
    for _ in 0..exp {
        r *= base;
    }
    r
}
