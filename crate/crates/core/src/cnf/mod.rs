//! Bit-blasting of SSA equations into CNF.
//!
//! Every SSA name is encoded once into a vector of literals and cached; an
//! equation's left-hand side simply aliases the literals of its right-hand
//! side. Literal 0 is reserved as the constant true literal so gates can fold
//! constants. The cache and the solver are owned together by [`Encoder`].

mod approx;
mod arrays;
mod gates;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use approx::Approx;
pub use approx::{ApproxMode, ApproxTag};
use arrays::ArrTerm;

use crate::bv::{BinOp, Ty};
use crate::frontend::TypedProgram;
use crate::sat::{Lit, Solver};
use crate::symex::{Base, EqId, Equation, Rhs, SsaExpr, SsaKind, SsaName};

/// Literals of a bitvector, least significant bit first. Booleans have one.
pub type BitVec = Vec<Lit>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EncoderOptions {
    /// Encode `*`, `/` and `%` as over-approximations first.
    pub refine_bv: bool,
    /// Add array read-consistency constraints on demand.
    pub lazy_arrays: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EncodeStats {
    /// Clauses emitted, including ones the solver simplified away.
    pub clauses: u64,
    pub equations: u64,
    /// Approximated operator occurrences.
    pub approximations: u64,
    /// Approximation refinements performed.
    pub refinements: u64,
    /// Array consistency constraints added lazily.
    pub array_lemmas: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActStatus {
    Live,
    Retired,
}

/// Activation literals. A clause `C ∨ a` is live while the solver assumes
/// `¬a`; retiring adds the unit `a`, which satisfies it permanently.
#[derive(Clone, Debug, Default)]
pub struct ActivationLedger {
    /// Property activation literal per depth.
    pub alpha: BTreeMap<u32, (Lit, ActStatus)>,
    /// Approximation activation literals: occurrence, precision, literal.
    pub beta: Vec<(ApproxTag, ApproxMode, Lit, ActStatus)>,
}

impl ActivationLedger {
    pub fn live_betas(&self) -> impl Iterator<Item = Lit> + '_ {
        self.beta
            .iter()
            .filter(|b| b.3 == ActStatus::Live)
            .map(|b| b.2)
    }

    /// Variables that may appear in assumptions and so must survive
    /// compaction.
    pub fn assumable(&self) -> Vec<crate::sat::Var> {
        self.alpha
            .values()
            .filter(|a| a.1 == ActStatus::Live)
            .map(|a| a.0.var())
            .chain(self.live_betas().map(|l| l.var()))
            .collect()
    }
}

pub struct Encoder<'p> {
    prog: &'p TypedProgram,
    pub solver: Solver,
    opts: EncoderOptions,
    t: Lit,
    gates: BTreeMap<(gates::GateKind, u32, u32, u32), Lit>,
    scalars: BTreeMap<SsaName, BitVec>,
    arrays: BTreeMap<SsaName, usize>,
    terms: Vec<ArrTerm>,
    read_memo: BTreeMap<(usize, BitVec), BitVec>,
    approx: Vec<Approx>,
    cur_eq: EqId,
    node: u32,
    pub ledger: ActivationLedger,
    pub stats: EncodeStats,
    /// Clauses guarded by each live activation literal.
    guarded: BTreeMap<Lit, u64>,
    /// Clauses made permanently satisfied by retirement since this was last
    /// reset.
    pub retired_guarded: u64,
}

impl<'p> Encoder<'p> {
    pub fn new(prog: &'p TypedProgram, solver: Solver, opts: EncoderOptions) -> Encoder<'p> {
        let mut solver = solver;
        let t = solver.new_var().pos();
        let mut e = Encoder {
            prog,
            solver,
            opts,
            t,
            gates: BTreeMap::new(),
            scalars: BTreeMap::new(),
            arrays: BTreeMap::new(),
            terms: Vec::new(),
            read_memo: BTreeMap::new(),
            approx: Vec::new(),
            cur_eq: 0,
            node: 0,
            ledger: ActivationLedger::default(),
            stats: EncodeStats::default(),
            guarded: BTreeMap::new(),
            retired_guarded: 0,
        };
        e.emit(&[t]);
        e
    }

    pub fn options(&self) -> EncoderOptions {
        self.opts
    }

    pub fn program(&self) -> &'p TypedProgram {
        self.prog
    }

    /// Add a clause to the solver and count it.
    pub fn emit(&mut self, c: &[Lit]) {
        self.stats.clauses += 1;
        self.solver.add_clause(c);
    }

    fn shape(&self, n: SsaName) -> (Ty, Option<u32>) {
        match n.base {
            Base::Var(v) => (self.prog.vars[v].ty, self.prog.vars[v].array_len),
            Base::Nondet(s) => (self.prog.sites[s as usize].ty, None),
            _ => (Ty::Bool, None),
        }
    }

    /// Literals of a scalar name. Names without a defining equation (inputs,
    /// nondets, havocked state) get fresh variables.
    pub fn name_lits(&mut self, n: SsaName) -> BitVec {
        if let Some(v) = self.scalars.get(&n) {
            return v.clone();
        }
        let (ty, len) = self.shape(n);
        debug_assert!(len.is_none(), "array name used as scalar");
        let v = self.fresh_bv(ty.width());
        self.scalars.insert(n, v.clone());
        v
    }

    /// Literals of an already encoded scalar name.
    pub fn lookup(&self, n: SsaName) -> Option<&[Lit]> {
        self.scalars.get(&n).map(|v| v.as_slice())
    }

    pub fn is_encoded(&self, n: SsaName) -> bool {
        self.scalars.contains_key(&n) || self.arrays.contains_key(&n)
    }

    /// Literal of a boolean name.
    pub fn bool_lit(&mut self, n: SsaName) -> Lit {
        self.name_lits(n)[0]
    }

    pub fn encode_equation(&mut self, eq: &Equation) {
        debug_assert!(!self.is_encoded(eq.lhs), "name encoded twice");
        self.cur_eq = eq.id;
        self.node = 0;
        self.stats.equations += 1;
        match &eq.rhs {
            Rhs::Scalar(e) => {
                let v = self.expr(e);
                self.scalars.insert(eq.lhs, v);
            }
            Rhs::Broadcast(e) => {
                let v = self.expr(e);
                let id = self.new_term(ArrTerm::Broadcast(v));
                self.arrays.insert(eq.lhs, id);
            }
            Rhs::Store { prev, index, value } => {
                let prev = self.array_term(*prev);
                let idx = self.expr(index);
                let val = self.expr(value);
                let len = eq.array_len.unwrap();
                let (ti, inb) = self.truncate_index(&idx, len);
                let id = self.new_term(ArrTerm::Store {
                    prev,
                    idx: ti,
                    inb,
                    val,
                });
                self.arrays.insert(eq.lhs, id);
            }
            Rhs::ArrayIte {
                cond,
                then_arr,
                else_arr,
            } => {
                let c = self.expr(cond)[0];
                let a = self.array_term(*then_arr);
                let b = self.array_term(*else_arr);
                let id = self.new_term(ArrTerm::Ite(c, a, b));
                self.arrays.insert(eq.lhs, id);
            }
        }
    }

    pub fn expr(&mut self, e: &SsaExpr) -> BitVec {
        match &e.kind {
            SsaKind::Const(v) => self.const_bv(*v, e.ty.width()),
            SsaKind::Name(n) => self.name_lits(*n),
            SsaKind::Unary(op, a) => {
                let x = self.expr(a);
                self.unary_bv(*op, &x)
            }
            SsaKind::Binary(op, a, b) => {
                let x = self.expr(a);
                let y = self.expr(b);
                self.binary(*op, &x, &y, a.ty)
            }
            SsaKind::Ite(c, a, b) => {
                let c = self.expr(c)[0];
                let x = self.expr(a);
                let y = self.expr(b);
                self.mux_bv(c, &x, &y)
            }
            SsaKind::Cast(a) => {
                let x = self.expr(a);
                self.cast_bv(&x, a.ty, e.ty)
            }
            SsaKind::Select(arr, i) => {
                let idx = self.expr(i);
                self.select(*arr, &idx)
            }
        }
    }

    fn binary(&mut self, op: BinOp, x: &[Lit], y: &[Lit], ty: Ty) -> BitVec {
        let constant = self.bv_const_value(x).is_some() && self.bv_const_value(y).is_some();
        if self.opts.refine_bv && op.is_refinable() && !constant {
            let tag = ApproxTag {
                eq: self.cur_eq,
                node: self.node,
            };
            self.node += 1;
            return self.approximate(tag, op, ty, x, y);
        }
        self.binary_bv(op, x, y, ty)
    }

    /// Selector for the disjunction of `atoms`: returns `sel ↔ ∨ atoms` and
    /// adds the clause `sel ∨ alpha`, which is live while `¬alpha` is
    /// assumed.
    pub fn encode_property_selector(&mut self, atoms: &[Lit], alpha: Lit) -> Lit {
        let sel = self.or_many(atoms);
        self.emit(&[sel, alpha]);
        *self.guarded.entry(alpha).or_insert(0) += 1;
        sel
    }

    /// A fresh activation literal.
    pub fn new_activation(&mut self) -> Lit {
        self.fresh_lit()
    }

    /// Retire an activation literal for good.
    pub fn retire(&mut self, a: Lit) {
        self.emit(&[a]);
        self.retired_guarded += self.guarded.remove(&a).unwrap_or(0);
        for x in self.ledger.alpha.values_mut() {
            if x.0 == a {
                x.1 = ActStatus::Retired;
            }
        }
        for b in &mut self.ledger.beta {
            if b.2 == a {
                b.3 = ActStatus::Retired;
            }
        }
    }

    /// Assumptions keeping every live approximation active.
    pub fn approx_assumptions(&self) -> Vec<Lit> {
        self.ledger.live_betas().map(|b| !b).collect()
    }

    /// Value of a bitvector in the current model (unassigned bits read 0).
    pub fn model_bv(&self, v: &[Lit]) -> u64 {
        let mut x = 0u64;
        for (i, &l) in v.iter().enumerate() {
            if self.solver.model_value(l) == Some(true) {
                x |= 1 << i;
            }
        }
        x
    }

    /// Model value of a scalar name, if it was encoded.
    pub fn model_name(&self, n: SsaName) -> Option<u64> {
        self.scalars.get(&n).map(|v| self.model_bv(v))
    }
}

#[cfg(test)]
mod tests;
