//! Explicit-state breadth-first model checker.
//!
//! Shares only the typed program with the engine: expressions are evaluated
//! here with their own `i128` semantics, inputs and `nondet()` values are
//! enumerated exhaustively, and states are deduplicated in hash sets. Used as
//! ground truth for small programs.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use ibmc_core::bv::{BinOp, Ty, UnOp};
use ibmc_core::frontend::{AssertId, TExpr, TExprKind, TStmt, VarId, VarKind};
use ibmc_core::TypedProgram;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Val {
    S(u64),
    A(Vec<u64>),
}

/// Packed values of the state variables; arrays are laid out inline.
type State = Rc<[u64]>;

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Distinct states stored over the whole search.
    pub max_states: usize,
    /// Machine words stored over the whole search (bounds memory).
    pub max_words: usize,
    /// Step executions over the whole search.
    pub max_transitions: u64,
    /// Values of a single input or `nondet()` draw.
    pub max_domain: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 1 << 20,
            max_words: 1 << 24,
            max_transitions: 1 << 24,
            max_domain: 1 << 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// First violation at global step `depth`.
    Violation { depth: u32, asserts: Vec<AssertId> },
    /// No violation up to `depth`. `complete` means every reachable state was
    /// explored, so no violation exists at any depth.
    Safe { depth: u32, complete: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("state space too large for the explicit-state oracle: {0}")]
pub struct TooLarge(pub String);

/// Bounded check matching the engine's schedule: loops before `target` run
/// `kmax` iterations each, then `target` runs up to `kmax` iterations.
pub fn bmc(p: &TypedProgram, target: usize, kmax: u32, lim: Limits) -> Result<Outcome, TooLarge> {
    let mut phases: Vec<(usize, Option<u32>)> = (0..target).map(|l| (l, Some(kmax))).collect();
    phases.push((target, Some(kmax)));
    Search::new(p, lim).run(&phases)
}

/// Unbounded reachability of a violation with main loop 0 only.
pub fn reachability(p: &TypedProgram, lim: Limits) -> Result<Outcome, TooLarge> {
    Search::new(p, lim).run(&[(0, None)])
}

fn width(ty: Ty) -> u32 {
    match ty {
        Ty::Bool => 1,
        Ty::Bv { width, .. } => width as u32,
    }
}

fn mask(ty: Ty) -> u64 {
    let w = width(ty);
    if w == 64 {
        u64::MAX
    } else {
        (1u64 << w) - 1
    }
}

fn to_int(x: u64, ty: Ty) -> i128 {
    let w = width(ty);
    let x = (x & mask(ty)) as i128;
    if matches!(ty, Ty::Bv { signed: true, .. }) && (x >> (w - 1)) & 1 == 1 {
        x - (1i128 << w)
    } else {
        x
    }
}

fn from_int(x: i128, ty: Ty) -> u64 {
    (x.rem_euclid(1i128 << width(ty))) as u64
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Input(VarId),
    Nondet(u32),
}

/// Enumerates the values drawn during one step as an odometer over the
/// sequence of first reads.
struct Chooser {
    digits: Vec<(u64, u64)>,
    pos: usize,
    drawn: HashMap<Key, Val>,
    max_domain: u64,
    too_large: Option<String>,
}

impl Chooser {
    fn digit(&mut self, domain: u64) -> u64 {
        if self.pos == self.digits.len() {
            self.digits.push((0, domain));
        }
        let d = self.digits[self.pos].0;
        self.pos += 1;
        d
    }

    fn draw(&mut self, key: Key, ty: Ty, len: Option<u32>) -> Val {
        if let Some(v) = self.drawn.get(&key) {
            return v.clone();
        }
        let dom = mask(ty).saturating_add(1);
        let v = match len {
            None => {
                if dom > self.max_domain {
                    self.too_large = Some(format!("a draw of type {ty}"));
                    return Val::S(0);
                }
                Val::S(self.digit(dom))
            }
            Some(n) => {
                let total = (dom as u128).checked_pow(n);
                if total.is_none_or(|t| t > self.max_domain as u128) {
                    self.too_large = Some(format!("a draw of type {ty}[{n}]"));
                    return Val::A(vec![0; n as usize]);
                }
                Val::A((0..n).map(|_| self.digit(dom)).collect())
            }
        };
        self.drawn.insert(key, v.clone());
        v
    }

    /// Advance to the next combination; false when all are done.
    fn next(&mut self) -> bool {
        // a different path may read fewer values than the previous one
        self.digits.truncate(self.pos);
        while let Some((d, dom)) = self.digits.pop() {
            if d + 1 < dom {
                self.digits.push((d + 1, dom));
                break;
            }
        }
        self.pos = 0;
        self.drawn.clear();
        !self.digits.is_empty()
    }
}

struct Exec<'a, 'p> {
    p: &'p TypedProgram,
    vals: Vec<Val>,
    ch: &'a mut Chooser,
    violated: Vec<AssertId>,
    blocked: bool,
}

impl Exec<'_, '_> {
    fn scalar(&mut self, e: &TExpr) -> u64 {
        match self.eval(e) {
            Val::S(x) => x,
            Val::A(_) => unreachable!("array in scalar context"),
        }
    }

    fn var(&mut self, v: VarId) -> Val {
        let info = &self.p.vars[v];
        if info.kind == VarKind::Input {
            self.ch.draw(Key::Input(v), info.ty, info.array_len)
        } else {
            self.vals[v].clone()
        }
    }

    fn eval(&mut self, e: &TExpr) -> Val {
        let ty = e.ty;
        let x = match &e.kind {
            TExprKind::Const(c) => c & mask(ty),
            TExprKind::Var(v) => return self.var(*v),
            TExprKind::Nondet(s) => self.ch.draw(Key::Nondet(*s), ty, None).scalar(),
            TExprKind::Induction(_) => unreachable!("bounded loops are expanded"),
            TExprKind::Unary(op, a) => {
                let x = self.scalar(a);
                match op {
                    UnOp::Neg => from_int(-to_int(x, ty), ty),
                    UnOp::Not => 1 - (x & 1),
                    UnOp::BitNot => !x & mask(ty),
                }
            }
            TExprKind::Binary(op, a, b) => {
                let t = a.ty;
                let (x, y) = (self.scalar(a), self.scalar(b));
                binary(*op, x, y, t)
            }
            TExprKind::Ite(c, a, b) => {
                if self.scalar(c) & 1 == 1 {
                    return self.eval(a);
                } else {
                    return self.eval(b);
                }
            }
            TExprKind::Cast(a) => {
                let x = self.scalar(a);
                from_int(to_int(x, a.ty), ty)
            }
            TExprKind::Index(v, i) => {
                let i = self.scalar(i);
                match self.var(*v) {
                    Val::A(arr) => arr.get(i as usize).copied().unwrap_or(0),
                    Val::S(_) => unreachable!("indexing a scalar"),
                }
            }
        };
        Val::S(x)
    }

    /// Declaration or local initializer; arrays take a broadcast value or a
    /// whole nondet array.
    fn init_value(&mut self, v: VarId, init: &TExpr) -> Val {
        let info = &self.p.vars[v];
        match info.array_len {
            None => self.eval(init),
            Some(n) => match init.kind {
                TExprKind::Nondet(s) => self.ch.draw(Key::Nondet(s), info.ty, Some(n)),
                _ => {
                    let x = self.scalar(init);
                    Val::A(vec![x; n as usize])
                }
            },
        }
    }

    fn block(&mut self, stmts: &[TStmt]) {
        for s in stmts {
            if self.blocked {
                return;
            }
            match s {
                TStmt::Assign { var, index, value } => {
                    let x = self.eval(value);
                    match index {
                        None => self.vals[*var] = x,
                        Some(i) => {
                            let i = self.scalar(i) as usize;
                            if let (Val::A(arr), Val::S(x)) = (&mut self.vals[*var], x) {
                                if i < arr.len() {
                                    arr[i] = x;
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
                    if self.scalar(cond) & 1 == 1 {
                        self.block(then_block);
                    } else {
                        self.block(else_block);
                    }
                }
                TStmt::Assert { id, cond } => {
                    if self.scalar(cond) & 1 == 0 {
                        self.violated.push(*id);
                    }
                }
                TStmt::Assume(c) => {
                    if self.scalar(c) & 1 == 0 {
                        self.blocked = true;
                    }
                }
                TStmt::For { .. } => unreachable!("bounded loops are expanded"),
                TStmt::Local { var, init } => {
                    let x = self.init_value(*var, init);
                    self.vals[*var] = x;
                }
            }
        }
    }
}

impl Val {
    fn scalar(self) -> u64 {
        match self {
            Val::S(x) => x,
            Val::A(_) => unreachable!(),
        }
    }
}

/// Reference semantics of a binary operator on raw `ty` bit patterns.
pub fn binary(op: BinOp, x: u64, y: u64, ty: Ty) -> u64 {
    let w = width(ty);
    let (a, b) = (to_int(x, ty), to_int(y, ty));
    let r: i128 = match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div if b == 0 => return mask(ty),
        BinOp::Div => a / b,
        BinOp::Rem if b == 0 => return x & mask(ty),
        BinOp::Rem => a % b,
        BinOp::And => return x & y,
        BinOp::Or => return x | y,
        BinOp::Xor => return x ^ y,
        BinOp::Shl if y >= w as u64 => 0,
        BinOp::Shl => a << y,
        // `a` is sign-extended for signed types, so this is arithmetic
        BinOp::Shr => a >> y.min(127),
        BinOp::Eq => return (x == y) as u64,
        BinOp::Ne => return (x != y) as u64,
        BinOp::Lt => return (a < b) as u64,
        BinOp::Le => return (a <= b) as u64,
        BinOp::Gt => return (a > b) as u64,
        BinOp::Ge => return (a >= b) as u64,
    };
    from_int(r, ty)
}

struct Search<'p> {
    p: &'p TypedProgram,
    lim: Limits,
    stored: usize,
    transitions: u64,
    states: Vec<VarId>,
    words: usize,
}

impl<'p> Search<'p> {
    fn new(p: &'p TypedProgram, lim: Limits) -> Search<'p> {
        assert!(p.expanded, "the oracle needs an expanded program");
        let states: Vec<VarId> = p.state_vars().collect();
        let words = states
            .iter()
            .map(|&v| p.vars[v].array_len.unwrap_or(1) as usize)
            .sum();
        Search {
            p,
            lim,
            stored: 0,
            transitions: 0,
            states,
            words,
        }
    }

    fn zero(&self) -> Vec<Val> {
        self.p
            .vars
            .iter()
            .map(|v| match v.array_len {
                None => Val::S(0),
                Some(n) => Val::A(vec![0; n as usize]),
            })
            .collect()
    }

    fn pack(&self, vals: &[Val]) -> State {
        let mut out = Vec::with_capacity(self.words);
        for &v in &self.states {
            match &vals[v] {
                Val::S(x) => out.push(*x),
                Val::A(xs) => out.extend_from_slice(xs),
            }
        }
        out.into()
    }

    fn unpack(&self, s: &[u64], vals: &mut [Val]) {
        let mut i = 0;
        for &v in &self.states {
            match &mut vals[v] {
                Val::S(x) => {
                    *x = s[i];
                    i += 1;
                }
                Val::A(xs) => {
                    let n = xs.len();
                    xs.copy_from_slice(&s[i..i + n]);
                    i += n;
                }
            }
        }
    }

    /// Execute `body` (or the init step when `None`) from `from` under every
    /// combination of drawn values; successors go into `next`.
    fn step(
        &mut self,
        from: Option<&State>,
        body: Option<usize>,
        next: &mut HashSet<State>,
    ) -> Result<Option<Vec<AssertId>>, TooLarge> {
        let mut ch = Chooser {
            digits: Vec::new(),
            pos: 0,
            drawn: HashMap::new(),
            max_domain: self.lim.max_domain,
            too_large: None,
        };
        let mut violation: Option<Vec<AssertId>> = None;
        loop {
            self.transitions += 1;
            if self.transitions > self.lim.max_transitions {
                return Err(TooLarge(format!(
                    "more than {} transitions",
                    self.lim.max_transitions
                )));
            }
            let mut vals = self.zero();
            if let Some(s) = from {
                self.unpack(s, &mut vals);
            }
            let mut ex = Exec {
                p: self.p,
                vals,
                ch: &mut ch,
                violated: Vec::new(),
                blocked: false,
            };
            match body {
                None => {
                    for &v in &self.states {
                        if let Some(init) = &self.p.vars[v].init {
                            let x = ex.init_value(v, init);
                            ex.vals[v] = x;
                        }
                    }
                    ex.block(&self.p.init);
                }
                Some(l) => ex.block(&self.p.main_loops[l].body),
            }
            let Exec {
                vals,
                violated,
                blocked,
                ..
            } = ex;
            if let Some(what) = ch.too_large.take() {
                return Err(TooLarge(what));
            }
            if !violated.is_empty() {
                violation.get_or_insert_with(Vec::new).extend(violated);
            }
            if !blocked && next.insert(self.pack(&vals)) {
                self.store(1)?;
            }
            if !ch.next() {
                break;
            }
        }
        if let Some(v) = violation.as_mut() {
            v.sort_unstable();
            v.dedup();
        }
        Ok(violation)
    }

    fn store(&mut self, n: usize) -> Result<(), TooLarge> {
        self.stored += n;
        if self.stored > self.lim.max_states {
            return Err(TooLarge(format!(
                "more than {} states",
                self.lim.max_states
            )));
        }
        if self.stored.saturating_mul(self.words.max(1)) > self.lim.max_words {
            return Err(TooLarge(format!(
                "more than {} stored words",
                self.lim.max_words
            )));
        }
        Ok(())
    }

    /// Run the phases in order. A phase `(l, Some(n))` executes exactly `n`
    /// iterations of loop `l` (the last phase: up to `n`); `(l, None)` runs
    /// until no new state appears.
    fn run(&mut self, phases: &[(usize, Option<u32>)]) -> Result<Outcome, TooLarge> {
        let mut init = HashSet::new();
        if let Some(asserts) = self.step(None, None, &mut init)? {
            return Ok(Outcome::Violation { depth: 0, asserts });
        }
        let mut frontier: Vec<State> = init.into_iter().collect();
        let mut depth = 0;
        for (pi, &(l, n)) in phases.iter().enumerate() {
            let last = pi + 1 == phases.len();
            // in the last phase only first visits matter
            let mut seen: HashSet<State> = HashSet::new();
            if last {
                seen.extend(frontier.iter().cloned());
            }
            let mut i = 0;
            while n.is_none_or(|n| i < n) {
                i += 1;
                depth += 1;
                let mut next = HashSet::new();
                let mut hit: Option<Vec<AssertId>> = None;
                for s in &frontier {
                    if let Some(v) = self.step(Some(s), Some(l), &mut next)? {
                        hit.get_or_insert_with(Vec::new).extend(v);
                    }
                }
                if let Some(mut asserts) = hit {
                    asserts.sort_unstable();
                    asserts.dedup();
                    return Ok(Outcome::Violation { depth, asserts });
                }
                let mut next: Vec<State> = next.into_iter().collect();
                if last {
                    next.retain(|s| seen.insert(s.clone()));
                    if next.is_empty() {
                        return Ok(Outcome::Safe {
                            depth,
                            complete: true,
                        });
                    }
                }
                frontier = next;
                if frontier.is_empty() {
                    // every path blocked
                    return Ok(Outcome::Safe {
                        depth,
                        complete: true,
                    });
                }
            }
        }
        Ok(Outcome::Safe {
            depth,
            complete: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ibmc_core::frontend::{compile, CompileOptions};

    fn prog(src: &str) -> TypedProgram {
        compile(src, CompileOptions::default()).unwrap()
    }

    #[test]
    fn counter_to_three() {
        let p = prog("state u8 c := 0; loop main { c := c + 1; assert(c != 3); }");
        assert_eq!(
            bmc(&p, 0, 10, Limits::default()).unwrap(),
            Outcome::Violation {
                depth: 3,
                asserts: vec![0]
            }
        );
        assert_eq!(
            bmc(&p, 0, 2, Limits::default()).unwrap(),
            Outcome::Safe {
                depth: 2,
                complete: false
            }
        );
    }

    #[test]
    fn saturating_counter_is_safe_forever() {
        let p = prog("state u8 x := 0; loop main { if (x < 5) { x := x + 1; } assert(x <= 5); }");
        assert!(matches!(
            reachability(&p, Limits::default()).unwrap(),
            Outcome::Safe { complete: true, .. }
        ));
    }

    #[test]
    fn inputs_are_enumerated() {
        let p = prog(
            "input u8 t; state u8 s := 0; loop main { if (s == 0) { assert(t != 5); } s := 1; }",
        );
        assert_eq!(
            bmc(&p, 0, 4, Limits::default()).unwrap(),
            Outcome::Violation {
                depth: 1,
                asserts: vec![0]
            }
        );
    }

    #[test]
    fn two_loops() {
        let p = prog("state u8 x := 0; state u8 y := 0; loop first { x := x + 1; } loop second { y := y + 1; assert(y != 2); }");
        assert_eq!(
            bmc(&p, 1, 3, Limits::default()).unwrap(),
            Outcome::Violation {
                depth: 5,
                asserts: vec![0]
            }
        );
    }

    #[test]
    fn assume_blocks_later_steps_only() {
        let p = prog("input u1 t; loop main { assert(t == 0); assume(t == 0); }");
        assert_eq!(
            bmc(&p, 0, 3, Limits::default()).unwrap(),
            Outcome::Violation {
                depth: 1,
                asserts: vec![0]
            }
        );
    }

    #[test]
    fn semantics_of_corner_cases() {
        let i4 = Ty::Bv {
            width: 4,
            signed: true,
        };
        let u4 = Ty::Bv {
            width: 4,
            signed: false,
        };
        assert_eq!(binary(BinOp::Div, 5, 0, u4), 15);
        assert_eq!(binary(BinOp::Div, 5, 0, i4), 15);
        assert_eq!(binary(BinOp::Rem, 5, 0, i4), 5);
        // -8 / -1 wraps to -8
        assert_eq!(binary(BinOp::Div, 8, 15, i4), 8);
        // -7 % 2 == -1
        assert_eq!(binary(BinOp::Rem, 9, 2, i4), 15);
        assert_eq!(binary(BinOp::Shr, 8, 9, i4), 15);
        assert_eq!(binary(BinOp::Shr, 8, 9, u4), 0);
        assert_eq!(binary(BinOp::Shl, 3, 4, u4), 0);
        assert_eq!(binary(BinOp::Lt, 8, 1, i4), 1);
        assert_eq!(binary(BinOp::Lt, 8, 1, u4), 0);
    }

    #[test]
    fn large_domains_are_refused() {
        let p = prog("input u32 t; loop main { assert(t != 7); }");
        assert!(bmc(&p, 0, 2, Limits::default()).is_err());
    }
}
