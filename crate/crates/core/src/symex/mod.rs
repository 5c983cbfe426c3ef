//! Incremental symbolic execution into guarded SSA equations.
//!
//! Step 0 holds the declaration initializers and the init block; each call
//! to [`UnwindingSession::unwind_step`] symbolically executes one iteration of
//! the current main loop as the next step. Constants are propagated along the
//! SSA stream and branches with a constant condition are pruned.
//!
//! The path condition is the pseudo-variable `$pc`. An `assume(c)` updates it
//! to `$pc && c`; at the end of an `if` it is merged like any other variable.
//! It carries across steps, so an assume constrains everything after it and
//! nothing before it. An assert produces the atom `$viol = pc && g && !c`,
//! where `g` is the conjunction of the enclosing branch conditions.

mod expr;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

pub use expr::*;

use crate::bv::Ty;
use crate::frontend::{AssertId, SiteId, TExpr, TExprKind, TStmt, TypedProgram, VarId, VarKind};
use crate::interp::Value;

pub type EqId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rhs {
    Scalar(SsaExpr),
    /// `prev` with element `index` replaced by `value` (no-op when out of
    /// bounds).
    Store {
        prev: SsaName,
        index: SsaExpr,
        value: SsaExpr,
    },
    ArrayIte {
        cond: SsaExpr,
        then_arr: SsaName,
        else_arr: SsaName,
    },
    /// Every element equal to the value.
    Broadcast(SsaExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub id: EqId,
    pub step: u32,
    /// Path guard under which the defining statement executes. The definition
    /// itself holds unconditionally; the guard is informational and counts as
    /// a read for slicing.
    pub guard: SsaExpr,
    pub lhs: SsaName,
    /// Scalar type, or element type for arrays.
    pub ty: Ty,
    pub array_len: Option<u32>,
    pub rhs: Rhs,
    /// Names read by the guard and the definition, without duplicates.
    pub reads: Vec<SsaName>,
}

impl Equation {
    pub fn writes(&self) -> SsaName {
        self.lhs
    }

    pub fn is_array(&self) -> bool {
        self.array_len.is_some()
    }

    /// `k: [guard] lhs = rhs`.
    pub fn display(&self, prog: &TypedProgram) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{}: [{}] {} = ",
            self.step,
            self.guard.display(prog),
            self.lhs.display(prog)
        );
        let _ = match &self.rhs {
            Rhs::Scalar(e) => write!(s, "{}", e.display(prog)),
            Rhs::Store { prev, index, value } => write!(
                s,
                "store({}, {}, {})",
                prev.display(prog),
                index.display(prog),
                value.display(prog)
            ),
            Rhs::ArrayIte {
                cond,
                then_arr,
                else_arr,
            } => write!(
                s,
                "{} ? {} : {}",
                cond.display(prog),
                then_arr.display(prog),
                else_arr.display(prog)
            ),
            Rhs::Broadcast(e) => write!(s, "broadcast({})", e.display(prog)),
        };
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Atom {
    pub eq: EqId,
    pub name: SsaName,
    pub assert: AssertId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TimeframeFormula {
    pub step: u32,
    /// Main loop executed in this step; `None` for step 0.
    pub main_loop: Option<usize>,
    /// Iteration number of `main_loop`, starting at 1.
    pub loop_depth: u32,
    pub equations: Vec<Equation>,
    pub atoms: Vec<Atom>,
    /// State variable names at the end of the step.
    pub boundary: Vec<(VarId, SsaName)>,
    /// Input names read in this step.
    pub inputs: Vec<(VarId, SsaName)>,
    /// Nondet names read in this step.
    pub nondets: Vec<(SiteId, SsaName)>,
    /// Unconstrained names introduced by havoc.
    pub havoc: Vec<SsaName>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SymexError {
    #[error("unknown loop `{0}`")]
    UnknownLoop(String),
    #[error("`{0}` is not an unbounded loop")]
    NotUnbounded(String),
    #[error("havoc is only possible before the first unwinding")]
    HavocAfterUnwind,
    #[error("depth {0} exceeds the unwound depth {1}")]
    DepthOutOfRange(u32, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymexOptions {
    pub constant_propagation: bool,
}

impl Default for SymexOptions {
    fn default() -> Self {
        SymexOptions {
            constant_propagation: true,
        }
    }
}

pub struct UnwindingSession<'p> {
    prog: &'p TypedProgram,
    opts: SymexOptions,
    current_loop: usize,
    loop_depth: u32,
    depth: u32,
    step: u32,
    versions: BTreeMap<(Base, u32), u32>,
    env: Vec<Option<SsaName>>,
    pc: SsaExpr,
    consts: BTreeMap<SsaName, u64>,
    frames: Vec<TimeframeFormula>,
    next_eq: EqId,
    next_cond: u32,
    havocked: bool,
    entry: Option<Atom>,
    // per-step scratch
    cur: TimeframeFormula,
    conds: Vec<SsaExpr>,
}

impl<'p> UnwindingSession<'p> {
    /// Start a session on an unbounded loop (id `main.N` or loop name) and
    /// build step 0.
    pub fn new(
        prog: &'p TypedProgram,
        loop_id: &str,
        opts: SymexOptions,
    ) -> Result<UnwindingSession<'p>, SymexError> {
        let l = match prog.find_main_loop(loop_id) {
            Some(l) => l,
            None => {
                return Err(if prog.loop_table.iter().any(|i| i.id == loop_id) {
                    SymexError::NotUnbounded(loop_id.into())
                } else {
                    SymexError::UnknownLoop(loop_id.into())
                })
            }
        };
        Ok(Self::for_loop(prog, l, opts))
    }

    /// Start a session on main loop `l` (position in `main_loops`).
    pub fn for_loop(prog: &'p TypedProgram, l: usize, opts: SymexOptions) -> UnwindingSession<'p> {
        assert!(
            prog.expanded,
            "symbolic execution needs an expanded program"
        );
        let mut s = UnwindingSession {
            prog,
            opts,
            current_loop: l,
            loop_depth: 0,
            depth: 0,
            step: 0,
            versions: BTreeMap::new(),
            env: vec![None; prog.vars.len()],
            pc: SsaExpr::bool(true),
            consts: BTreeMap::new(),
            frames: Vec::new(),
            next_eq: 0,
            next_cond: 0,
            havocked: false,
            entry: None,
            cur: TimeframeFormula::default(),
            conds: Vec::new(),
        };
        s.init_frame();
        s
    }

    pub fn program(&self) -> &'p TypedProgram {
        self.prog
    }

    /// Number of loop iterations unwound so far.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Global step of the last frame.
    pub fn step(&self) -> u32 {
        self.step
    }

    pub fn current_loop(&self) -> usize {
        self.current_loop
    }

    /// Iterations of the current loop unwound so far.
    pub fn loop_depth(&self) -> u32 {
        self.loop_depth
    }

    pub fn frames(&self) -> &[TimeframeFormula] {
        &self.frames
    }

    pub fn frame(&self, step: u32) -> &TimeframeFormula {
        &self.frames[step as usize]
    }

    pub fn num_equations(&self) -> usize {
        self.next_eq as usize
    }

    pub fn equations(&self) -> impl Iterator<Item = &Equation> + '_ {
        self.frames.iter().flat_map(|f| f.equations.iter())
    }

    pub fn constant(&self, n: SsaName) -> Option<u64> {
        self.consts.get(&n).copied()
    }

    /// Continue with another main loop; the state carries over.
    pub fn switch_loop(&mut self, l: usize) {
        assert!(l < self.prog.main_loops.len());
        self.current_loop = l;
        self.loop_depth = 0;
    }

    fn fresh(&mut self, base: Base) -> SsaName {
        let step = self.step;
        let v = self.versions.entry((base, step)).or_insert(0);
        let n = SsaName {
            base,
            step,
            version: *v,
        };
        *v += 1;
        n
    }

    fn guard(&self) -> SsaExpr {
        let mut g = self.pc.clone();
        for c in &self.conds {
            g = mk_and(g, c.clone());
        }
        g
    }

    fn emit(&mut self, lhs: SsaName, ty: Ty, array_len: Option<u32>, rhs: Rhs) -> EqId {
        let guard = self.guard();
        let mut reads = Vec::new();
        guard.names(&mut reads);
        match &rhs {
            Rhs::Scalar(e) | Rhs::Broadcast(e) => e.names(&mut reads),
            Rhs::Store { prev, index, value } => {
                reads.push(*prev);
                index.names(&mut reads);
                value.names(&mut reads);
            }
            Rhs::ArrayIte {
                cond,
                then_arr,
                else_arr,
            } => {
                cond.names(&mut reads);
                reads.push(*then_arr);
                reads.push(*else_arr);
            }
        }
        reads.sort();
        reads.dedup();
        debug_assert!(!reads.contains(&lhs));
        let id = self.next_eq;
        self.next_eq += 1;
        if let (Rhs::Scalar(e), true) = (&rhs, self.opts.constant_propagation) {
            if let Some(c) = e.as_const() {
                self.consts.insert(lhs, c);
            }
        }
        self.cur.equations.push(Equation {
            id,
            step: self.step,
            guard,
            lhs,
            ty,
            array_len,
            rhs,
            reads,
        });
        id
    }

    /// Bind a scalar expression to a fresh version of `base`.
    fn define(&mut self, base: Base, value: SsaExpr) -> SsaName {
        let n = self.fresh(base);
        let ty = value.ty;
        self.emit(n, ty, None, Rhs::Scalar(value));
        n
    }

    fn name_expr(&self, n: SsaName, ty: Ty) -> SsaExpr {
        if self.opts.constant_propagation {
            if let Some(c) = self.consts.get(&n) {
                return SsaExpr::constant(*c, ty);
            }
        }
        SsaExpr::name(n, ty)
    }

    fn input_name(&mut self, v: VarId) -> SsaName {
        let n = SsaName {
            base: Base::Var(v),
            step: self.step,
            version: 0,
        };
        if !self.cur.inputs.iter().any(|(x, _)| *x == v) {
            self.cur.inputs.push((v, n));
        }
        n
    }

    fn nondet_name(&mut self, site: SiteId) -> SsaName {
        let n = SsaName {
            base: Base::Nondet(site),
            step: self.step,
            version: 0,
        };
        if !self.cur.nondets.iter().any(|(x, _)| *x == site) {
            self.cur.nondets.push((site, n));
        }
        n
    }

    fn var_name(&mut self, v: VarId) -> SsaName {
        if self.prog.vars[v].kind == VarKind::Input {
            self.input_name(v)
        } else {
            self.env[v].expect("variable read before definition")
        }
    }

    fn expr(&mut self, e: &TExpr) -> SsaExpr {
        match &e.kind {
            TExprKind::Const(v) => SsaExpr::constant(*v, e.ty),
            TExprKind::Var(v) => {
                let n = self.var_name(*v);
                self.name_expr(n, e.ty)
            }
            TExprKind::Nondet(site) => {
                let n = self.nondet_name(*site);
                SsaExpr::name(n, e.ty)
            }
            TExprKind::Induction(_) => unreachable!("bounded loops are expanded"),
            TExprKind::Unary(op, a) => {
                let a = self.expr(a);
                mk_unary(*op, a)
            }
            TExprKind::Binary(op, a, b) => {
                let a = self.expr(a);
                let b = self.expr(b);
                mk_binary(*op, a, b)
            }
            TExprKind::Ite(c, a, b) => {
                let c = self.expr(c);
                let a = self.expr(a);
                let b = self.expr(b);
                mk_ite(c, a, b)
            }
            TExprKind::Cast(a) => {
                let a = self.expr(a);
                mk_cast(a, e.ty)
            }
            TExprKind::Index(v, i) => {
                let arr = self.var_name(*v);
                let i = self.expr(i);
                SsaExpr {
                    kind: SsaKind::Select(arr, alloc::boxed::Box::new(i)),
                    ty: e.ty,
                }
            }
        }
    }

    /// Initialise variable `v` from a declaration or local initializer.
    fn init_var(&mut self, v: VarId, init: &TExpr) {
        let info = &self.prog.vars[v];
        let (ty, len) = (info.ty, info.array_len);
        match len {
            Some(_) => {
                if let TExprKind::Nondet(site) = init.kind {
                    // free array, recorded under its nondet site
                    let n = self.fresh(Base::Var(v));
                    self.cur.nondets.push((site, n));
                    self.env[v] = Some(n);
                } else {
                    let value = self.expr(init);
                    let n = self.fresh(Base::Var(v));
                    self.emit(n, ty, len, Rhs::Broadcast(value));
                    self.env[v] = Some(n);
                }
            }
            None => {
                let value = self.expr(init);
                let n = self.define(Base::Var(v), value);
                self.env[v] = Some(n);
            }
        }
    }

    fn exec(&mut self, stmts: &[TStmt]) {
        for s in stmts {
            if self.pc.is_false() {
                // nothing after a failed assume is observable
                return;
            }
            match s {
                TStmt::Assign { var, index, value } => {
                    let info = &self.prog.vars[*var];
                    let (ty, len) = (info.ty, info.array_len);
                    match index {
                        None => {
                            let value = self.expr(value);
                            let n = self.define(Base::Var(*var), value);
                            self.env[*var] = Some(n);
                        }
                        Some(i) => {
                            let prev = self.env[*var].expect("array read before definition");
                            let index = self.expr(i);
                            let value = self.expr(value);
                            let n = self.fresh(Base::Var(*var));
                            self.emit(n, ty, len, Rhs::Store { prev, index, value });
                            self.env[*var] = Some(n);
                        }
                    }
                }
                TStmt::If {
                    cond,
                    then_block,
                    else_block,
                } => {
                    let c = self.expr(cond);
                    match c.as_const() {
                        Some(1) => self.exec(then_block),
                        Some(_) => self.exec(else_block),
                        None => self.branch(c, then_block, else_block),
                    }
                }
                TStmt::Assert { id, cond } => {
                    let c = self.expr(cond);
                    let viol = mk_and(self.guard(), mk_not(c));
                    if !viol.is_false() {
                        let n = self.fresh(Base::Viol(*id));
                        let eq = self.emit(n, Ty::Bool, None, Rhs::Scalar(viol));
                        self.cur.atoms.push(Atom {
                            eq,
                            name: n,
                            assert: *id,
                        });
                    }
                }
                TStmt::Assume(cond) => {
                    let c = self.expr(cond);
                    let next = mk_and(self.pc.clone(), c);
                    self.pc = if next.as_const().is_some() {
                        next
                    } else {
                        let n = self.define(Base::Pc, next);
                        SsaExpr::name(n, Ty::Bool)
                    };
                }
                TStmt::Local { var, init } => self.init_var(*var, init),
                TStmt::For { .. } => unreachable!("bounded loops are expanded"),
            }
        }
    }

    fn branch(&mut self, c: SsaExpr, then_block: &[TStmt], else_block: &[TStmt]) {
        let cn = match c.kind {
            SsaKind::Name(_) => c,
            _ => {
                let id = self.next_cond;
                self.next_cond += 1;
                let n = self.define(Base::Cond(id), c);
                SsaExpr::name(n, Ty::Bool)
            }
        };
        let env0 = self.env.clone();
        let pc0 = self.pc.clone();

        self.conds.push(cn.clone());
        self.exec(then_block);
        self.conds.pop();
        let env_then = core::mem::replace(&mut self.env, env0.clone());
        let pc_then = core::mem::replace(&mut self.pc, pc0.clone());

        self.conds.push(mk_not(cn.clone()));
        self.exec(else_block);
        self.conds.pop();
        let env_else = core::mem::take(&mut self.env);
        let pc_else = core::mem::replace(&mut self.pc, pc0);

        self.env = env0;
        for v in 0..self.env.len() {
            if self.env[v].is_none() {
                continue;
            }
            let (t, e) = (env_then[v].unwrap(), env_else[v].unwrap());
            if t == e {
                self.env[v] = Some(t);
                continue;
            }
            let info = &self.prog.vars[v];
            let (ty, len) = (info.ty, info.array_len);
            let n = match len {
                Some(_) => {
                    let n = self.fresh(Base::Var(v));
                    self.emit(
                        n,
                        ty,
                        len,
                        Rhs::ArrayIte {
                            cond: cn.clone(),
                            then_arr: t,
                            else_arr: e,
                        },
                    );
                    n
                }
                None => {
                    let te = self.name_expr(t, ty);
                    let ee = self.name_expr(e, ty);
                    let merged = mk_ite(cn.clone(), te, ee);
                    self.define(Base::Var(v), merged)
                }
            };
            self.env[v] = Some(n);
        }
        self.pc = if pc_then == pc_else {
            pc_then
        } else {
            let merged = mk_ite(cn, pc_then, pc_else);
            if merged.as_const().is_some() {
                merged
            } else {
                let n = self.define(Base::Pc, merged);
                SsaExpr::name(n, Ty::Bool)
            }
        };
    }

    fn finish_frame(&mut self) {
        let prog = self.prog;
        self.cur.step = self.step;
        self.cur.boundary = prog
            .state_vars()
            .map(|v| (v, self.env[v].expect("state variable undefined")))
            .collect();
        let f = core::mem::take(&mut self.cur);
        self.frames.push(f);
    }

    fn init_frame(&mut self) {
        let prog = self.prog;
        for v in prog.state_vars() {
            if let Some(init) = &prog.vars[v].init {
                self.init_var(v, init);
            }
        }
        self.exec(&prog.init);
        self.finish_frame();
    }

    /// Symbolically execute one iteration of the current loop.
    pub fn unwind_step(&mut self) -> &TimeframeFormula {
        self.step += 1;
        self.depth += 1;
        self.loop_depth += 1;
        self.cur = TimeframeFormula {
            main_loop: Some(self.current_loop),
            loop_depth: self.loop_depth,
            ..TimeframeFormula::default()
        };
        for v in 0..self.env.len() {
            if self.prog.vars[v].kind == VarKind::Local {
                self.env[v] = None;
            }
        }
        let prog = self.prog;
        self.exec(&prog.main_loops[self.current_loop].body);
        self.finish_frame();
        self.frames.last().unwrap()
    }

    /// Rebind every state variable modified by the current loop to an
    /// unconstrained name, forget the step-0 atoms and reset the path
    /// condition. Only valid before the first unwinding.
    pub fn havoc_state(&mut self) -> Result<(), SymexError> {
        if self.depth != 0 || self.havocked {
            return Err(SymexError::HavocAfterUnwind);
        }
        self.havocked = true;
        let modified = self.prog.loop_modified_state(self.current_loop);
        let mut f = self.frames.pop().unwrap();
        self.step = 0;
        for v in modified {
            let n = self.fresh(Base::Var(v));
            self.env[v] = Some(n);
            f.havoc.push(n);
        }
        f.atoms.clear();
        f.boundary = self
            .prog
            .state_vars()
            .map(|v| (v, self.env[v].unwrap()))
            .collect();
        self.pc = SsaExpr::bool(true);
        self.frames.push(f);
        Ok(())
    }

    /// Conditions of the loop's top-level asserts that only read state
    /// variables not assigned later in the body. If such an assert held in
    /// some iteration, its condition holds on the state at the end of that
    /// iteration. Emits `$entry = conjunction` evaluated on the current
    /// boundary and returns its atom (with the first such assert's id).
    pub fn entry_assumption(&mut self) -> Result<Option<Atom>, SymexError> {
        if self.depth != 0 {
            return Err(SymexError::HavocAfterUnwind);
        }
        if let Some(a) = self.entry {
            return Ok(Some(a));
        }
        let prog = self.prog;
        let body = &prog.main_loops[self.current_loop].body;
        let mut conds: Vec<(AssertId, &TExpr)> = Vec::new();
        for (i, s) in body.iter().enumerate() {
            let TStmt::Assert { id, cond } = s else {
                continue;
            };
            if cond.has_nondet() {
                continue;
            }
            let mut vars = BTreeSet::new();
            cond.vars(&mut vars);
            if vars.iter().any(|&v| prog.vars[v].kind != VarKind::State) {
                continue;
            }
            let mut later = BTreeSet::new();
            TStmt::walk(&body[i + 1..], &mut |s| {
                if let TStmt::Assign { var, .. } | TStmt::Local { var, .. } = s {
                    later.insert(*var);
                }
            });
            if vars.iter().any(|v| later.contains(v)) {
                continue;
            }
            conds.push((*id, cond));
        }
        let Some(&(first, _)) = conds.first() else {
            return Ok(None);
        };
        let mut f = self.frames.pop().unwrap();
        self.cur = core::mem::take(&mut f);
        self.step = 0;
        let saved_pc = core::mem::replace(&mut self.pc, SsaExpr::bool(true));
        let mut p = SsaExpr::bool(true);
        for (_, c) in &conds {
            let e = self.expr(c);
            p = mk_and(p, e);
        }
        let n = self.fresh(Base::Entry);
        let eq = self.emit(n, Ty::Bool, None, Rhs::Scalar(p));
        self.pc = saved_pc;
        let f = core::mem::take(&mut self.cur);
        self.frames.push(f);
        let atom = Atom {
            eq,
            name: n,
            assert: first,
        };
        self.entry = Some(atom);
        Ok(Some(atom))
    }

    /// All property atoms of steps `0..=k`.
    pub fn property_disjunction(&self, k: u32) -> Result<Vec<Atom>, SymexError> {
        if k > self.step {
            return Err(SymexError::DepthOutOfRange(k, self.step));
        }
        Ok(self.frames[..=k as usize]
            .iter()
            .flat_map(|f| f.atoms.iter().copied())
            .collect())
    }

    /// `--show-ssa` listing of all frames.
    pub fn show_ssa(&self) -> String {
        let mut s = String::new();
        for eq in self.equations() {
            s.push_str(&eq.display(self.prog));
            s.push('\n');
        }
        s
    }
}

/// Concrete values of SSA names.
#[derive(Clone, Debug, Default)]
pub struct Valuation {
    pub scalars: BTreeMap<SsaName, u64>,
    pub arrays: BTreeMap<SsaName, Vec<u64>>,
}

impl Valuation {
    fn array_read(&self, n: SsaName, i: u64) -> Option<u64> {
        let a = self.arrays.get(&n)?;
        Some(if i < a.len() as u64 { a[i as usize] } else { 0 })
    }
}

/// Evaluate equations in order. Names read but never defined are taken from
/// `free` (inputs, nondets, havocked and free array names).
pub fn evaluate<'e>(
    prog: &TypedProgram,
    eqs: impl Iterator<Item = &'e Equation>,
    free: &mut dyn FnMut(SsaName, Ty, Option<u32>) -> Value,
) -> Valuation {
    let mut val = Valuation::default();
    let mut eqs: Vec<&Equation> = eqs.collect();
    eqs.sort_by_key(|e| e.id);
    let shape = |n: SsaName, fallback: Ty| -> (Ty, Option<u32>) {
        match n.base {
            Base::Var(v) => (prog.vars[v].ty, prog.vars[v].array_len),
            Base::Nondet(s) => (prog.sites[s as usize].ty, None),
            _ => (fallback, None),
        }
    };
    for eq in eqs {
        for r in &eq.reads {
            if val.scalars.contains_key(r) || val.arrays.contains_key(r) {
                continue;
            }
            let (ty, len) = shape(*r, Ty::Bool);
            match free(*r, ty, len) {
                Value::Scalar(x) => {
                    val.scalars.insert(*r, x & ty.mask());
                }
                Value::Array(a) => {
                    val.arrays.insert(*r, a);
                }
            }
        }
        let ev = |e: &SsaExpr| {
            let v = &val;
            expr::eval(e, &mut |n| v.scalars.get(&n).copied(), &mut |n, i| {
                v.array_read(n, i)
            })
            .expect("equation reads an undefined name")
        };
        match &eq.rhs {
            Rhs::Scalar(e) => {
                let x = ev(e);
                val.scalars.insert(eq.lhs, x);
            }
            Rhs::Broadcast(e) => {
                let x = ev(e);
                val.arrays
                    .insert(eq.lhs, vec![x; eq.array_len.unwrap() as usize]);
            }
            Rhs::Store { prev, index, value } => {
                let i = ev(index);
                let x = ev(value);
                let mut a = val.arrays[prev].clone();
                if i < a.len() as u64 {
                    a[i as usize] = x;
                }
                val.arrays.insert(eq.lhs, a);
            }
            Rhs::ArrayIte {
                cond,
                then_arr,
                else_arr,
            } => {
                let c = ev(cond);
                let a = if c == 1 {
                    val.arrays[then_arr].clone()
                } else {
                    val.arrays[else_arr].clone()
                };
                val.arrays.insert(eq.lhs, a);
            }
        }
    }
    val
}

/// Human-readable rendering of a loop position, e.g. `main.0 depth 3`.
pub fn describe_step(prog: &TypedProgram, f: &TimeframeFormula) -> String {
    match f.main_loop {
        None => String::from("init"),
        Some(l) => format!("{} depth {}", prog.main_loop_info(l).id, f.loop_depth),
    }
}
