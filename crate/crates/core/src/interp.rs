//! Concrete interpreter for expanded programs.
//!
//! Step 0 runs the declaration initializers and the init block; every later
//! step runs one iteration of a main loop. Inputs are drawn once per step,
//! `nondet()` once per call site and step. Asserts do not stop execution; a
//! failing `assume` blocks the path, after which nothing is executed.

use alloc::vec;
use alloc::vec::Vec;

use crate::bv::{eval_binary, eval_cast, eval_unary, Ty};
use crate::frontend::{AssertId, SiteId, TExpr, TExprKind, TStmt, TypedProgram, VarId, VarKind};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Scalar(u64),
    Array(Vec<u64>),
}

impl Value {
    pub fn scalar(&self) -> u64 {
        match self {
            Value::Scalar(v) => *v,
            Value::Array(_) => panic!("array used as scalar"),
        }
    }

    pub fn zero(len: Option<u32>) -> Value {
        match len {
            Some(n) => Value::Array(vec![0; n as usize]),
            None => Value::Scalar(0),
        }
    }
}

/// Source of inputs and nondeterministic choices.
pub trait Environment {
    fn input(&mut self, step: u32, var: VarId, ty: Ty, len: Option<u32>) -> Value;
    fn nondet(&mut self, step: u32, site: SiteId, ty: Ty, len: Option<u32>) -> Value;
}

/// Every input and nondet value is zero.
pub struct ZeroEnv;

impl Environment for ZeroEnv {
    fn input(&mut self, _: u32, _: VarId, _: Ty, len: Option<u32>) -> Value {
        Value::zero(len)
    }

    fn nondet(&mut self, _: u32, _: SiteId, _: Ty, len: Option<u32>) -> Value {
        Value::zero(len)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepResult {
    /// Asserts violated in this step, in execution order.
    pub violations: Vec<AssertId>,
    /// An `assume` failed; the path ends here.
    pub blocked: bool,
}

#[derive(Clone)]
pub struct Interpreter<'p> {
    prog: &'p TypedProgram,
    vals: Vec<Value>,
    step: u32,
    blocked: bool,
    started: bool,
}

impl<'p> Interpreter<'p> {
    pub fn new(prog: &'p TypedProgram) -> Interpreter<'p> {
        assert!(prog.expanded, "interpreter needs an expanded program");
        let vals = prog.vars.iter().map(|v| Value::zero(v.array_len)).collect();
        Interpreter {
            prog,
            vals,
            step: 0,
            blocked: false,
            started: false,
        }
    }

    /// Step index of the last executed step.
    pub fn step(&self) -> u32 {
        self.step
    }

    pub fn is_blocked(&self) -> bool {
        self.blocked
    }

    pub fn value(&self, v: VarId) -> &Value {
        &self.vals[v]
    }

    /// Values of all state variables, in declaration order.
    pub fn state(&self) -> Vec<(VarId, Value)> {
        self.prog
            .state_vars()
            .map(|v| (v, self.vals[v].clone()))
            .collect()
    }

    /// Overwrite the state (used to start from an arbitrary state).
    pub fn set_state(&mut self, state: &[(VarId, Value)]) {
        for (v, val) in state {
            self.vals[*v] = val.clone();
        }
        self.started = true;
    }

    /// Run step 0.
    pub fn run_init(&mut self, env: &mut dyn Environment) -> StepResult {
        assert!(!self.started, "init already executed");
        self.started = true;
        self.step = 0;
        let mut res = StepResult::default();
        for v in self.prog.state_vars().collect::<Vec<_>>() {
            let info = &self.prog.vars[v];
            if let Some(init) = &info.init {
                self.vals[v] = self.init_value(init, info.ty, info.array_len, env);
            }
        }
        let prog = self.prog;
        self.exec(&prog.init, env, &mut res);
        res
    }

    /// Run one iteration of main loop `l` as the next step.
    pub fn run_iteration(&mut self, l: usize, env: &mut dyn Environment) -> StepResult {
        assert!(self.started, "init has not run");
        self.step += 1;
        let mut res = StepResult::default();
        if self.blocked {
            res.blocked = true;
            return res;
        }
        for v in self.prog.input_vars().collect::<Vec<_>>() {
            let info = &self.prog.vars[v];
            let val = env.input(self.step, v, info.ty, info.array_len);
            self.vals[v] = mask_value(val, info.ty);
        }
        let prog = self.prog;
        self.exec(&prog.main_loops[l].body, env, &mut res);
        res
    }

    fn init_value(
        &mut self,
        init: &TExpr,
        ty: Ty,
        len: Option<u32>,
        env: &mut dyn Environment,
    ) -> Value {
        match (len, &init.kind) {
            (Some(n), TExprKind::Nondet(site)) => {
                mask_value(env.nondet(self.step, *site, ty, Some(n)), ty)
            }
            (Some(n), _) => Value::Array(vec![self.eval(init, env); n as usize]),
            (None, _) => Value::Scalar(self.eval(init, env)),
        }
    }

    fn exec(&mut self, stmts: &[TStmt], env: &mut dyn Environment, res: &mut StepResult) {
        for s in stmts {
            if self.blocked {
                return;
            }
            match s {
                TStmt::Assign { var, index, value } => {
                    let val = self.eval(value, env);
                    match index {
                        None => self.vals[*var] = Value::Scalar(val),
                        Some(i) => {
                            let idx = self.eval(i, env);
                            if let Value::Array(a) = &mut self.vals[*var] {
                                if idx < a.len() as u64 {
                                    a[idx as usize] = val;
                                }
                            }
                        }
                    }
                }
                TStmt::If {
                    cond,
                    then_block,
                    else_block,
                } => {
                    if self.eval(cond, env) == 1 {
                        self.exec(then_block, env, res);
                    } else {
                        self.exec(else_block, env, res);
                    }
                }
                TStmt::Assert { id, cond } => {
                    if self.eval(cond, env) == 0 {
                        res.violations.push(*id);
                    }
                }
                TStmt::Assume(cond) => {
                    if self.eval(cond, env) == 0 {
                        self.blocked = true;
                        res.blocked = true;
                    }
                }
                TStmt::Local { var, init } => {
                    let info = &self.prog.vars[*var];
                    let (ty, len) = (info.ty, info.array_len);
                    self.vals[*var] = self.init_value(init, ty, len, env);
                }
                TStmt::For { .. } => unreachable!("bounded loops are expanded"),
            }
        }
    }

    fn eval(&mut self, e: &TExpr, env: &mut dyn Environment) -> u64 {
        match &e.kind {
            TExprKind::Const(v) => *v,
            TExprKind::Var(v) => self.vals[*v].scalar(),
            TExprKind::Nondet(site) => {
                env.nondet(self.step, *site, e.ty, None).scalar() & e.ty.mask()
            }
            TExprKind::Induction(_) => unreachable!("bounded loops are expanded"),
            TExprKind::Unary(op, a) => {
                let x = self.eval(a, env);
                eval_unary(*op, x, e.ty)
            }
            TExprKind::Binary(op, a, b) => {
                let x = self.eval(a, env);
                let y = self.eval(b, env);
                eval_binary(*op, x, y, a.ty)
            }
            TExprKind::Ite(c, a, b) => {
                let cv = self.eval(c, env);
                let x = self.eval(a, env);
                let y = self.eval(b, env);
                if cv == 1 {
                    x
                } else {
                    y
                }
            }
            TExprKind::Cast(a) => {
                let x = self.eval(a, env);
                eval_cast(x, a.ty, e.ty)
            }
            TExprKind::Index(v, i) => {
                let idx = self.eval(i, env);
                match &self.vals[*v] {
                    Value::Array(a) if idx < a.len() as u64 => a[idx as usize],
                    _ => 0,
                }
            }
        }
    }
}

fn mask_value(v: Value, ty: Ty) -> Value {
    let m = ty.mask();
    match v {
        Value::Scalar(x) => Value::Scalar(x & m),
        Value::Array(a) => Value::Array(a.into_iter().map(|x| x & m).collect()),
    }
}

/// Which main loop runs at each step: non-final loops run `kmax` iterations
/// each, then the given loop runs `depth` iterations.
pub fn schedule(loop_index: usize, depth: u32, kmax: u32) -> Vec<usize> {
    let mut out = Vec::new();
    for l in 0..loop_index {
        out.extend(core::iter::repeat_n(l, kmax as usize));
    }
    out.extend(core::iter::repeat_n(loop_index, depth as usize));
    out
}

/// Outcome of running a whole schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    /// First step with a violation and the asserts violated there.
    pub violation: Option<(u32, Vec<AssertId>)>,
    /// State at the end of every executed step.
    pub states: Vec<Vec<(VarId, Value)>>,
    pub blocked_at: Option<u32>,
}

/// Run init and then the loops in `sched`, stopping at the first violation.
pub fn run(prog: &TypedProgram, sched: &[usize], env: &mut dyn Environment) -> RunOutcome {
    let mut it = Interpreter::new(prog);
    let mut out = RunOutcome {
        violation: None,
        states: Vec::new(),
        blocked_at: None,
    };
    let r = it.run_init(env);
    out.states.push(it.state());
    if !r.violations.is_empty() {
        out.violation = Some((0, r.violations));
        return out;
    }
    if r.blocked {
        out.blocked_at = Some(0);
        return out;
    }
    for &l in sched {
        let r = it.run_iteration(l, env);
        out.states.push(it.state());
        if !r.violations.is_empty() {
            out.violation = Some((it.step(), r.violations));
            return out;
        }
        if r.blocked {
            out.blocked_at = Some(it.step());
            return out;
        }
    }
    out
}

/// Name of every variable of a kind, for display.
pub fn var_names(prog: &TypedProgram, kind: VarKind) -> Vec<(VarId, &str)> {
    prog.vars
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == kind)
        .map(|(i, v)| (i, v.name.as_str()))
        .collect()
}
