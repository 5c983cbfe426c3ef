//! Name resolution, type inference for literals and `nondet()`, definite
//! initialisation of state, and construction of the loop table.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::*;
use super::typed::*;
use super::{ErrorKind, FrontendError};
use crate::bv::{eval_binary, eval_cast, eval_unary, BinOp, Ty, UnOp};

const DEFAULT_INT: Ty = Ty::unsigned(32);

#[derive(Clone, Copy, Debug)]
enum Binding {
    Var(VarId),
    Induction(ForId),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Region {
    Decls,
    Init,
    Loop(usize),
}

struct Checker {
    vars: Vec<VarInfo>,
    for_vars: Vec<String>,
    /// Every name ever declared, for global uniqueness.
    declared: BTreeMap<String, Binding>,
    /// Names currently in scope.
    visible: BTreeSet<String>,
    scopes: Vec<Vec<String>>,
    loop_table: Vec<LoopInfo>,
    loop_stack: Vec<usize>,
    asserts: Vec<AssertInfo>,
    sites: Vec<SiteInfo>,
    region: Region,
    /// State variables definitely assigned so far (declarations and init).
    initialized: BTreeSet<VarId>,
}

fn err(kind: ErrorKind, span: Span, msg: impl Into<String>) -> FrontendError {
    FrontendError::new(kind, span, msg)
}

pub fn typecheck(p: &Program) -> Result<TypedProgram, FrontendError> {
    let mut c = Checker {
        vars: Vec::new(),
        for_vars: Vec::new(),
        declared: BTreeMap::new(),
        visible: BTreeSet::new(),
        scopes: Vec::new(),
        loop_table: Vec::new(),
        loop_stack: Vec::new(),
        asserts: Vec::new(),
        sites: Vec::new(),
        region: Region::Decls,
        initialized: BTreeSet::new(),
    };

    for d in &p.decls {
        c.declare_name(&d.name, d.span)?;
        let kind = match d.kind {
            DeclKind::Input => VarKind::Input,
            DeclKind::State => VarKind::State,
        };
        if kind == VarKind::Input && d.init.is_some() {
            return Err(err(
                ErrorKind::TypeMismatch,
                d.span,
                format!("input `{}` cannot have an initializer", d.name),
            ));
        }
        let init = match &d.init {
            Some(e) => Some(c.scalar_init(e, d.ty.scalar)?),
            None => None,
        };
        if d.ty.array_len.is_some() && kind == VarKind::State && init.is_none() {
            return Err(err(
                ErrorKind::Uninitialized,
                d.span,
                format!(
                    "state array `{}` needs a broadcast or nondet() initializer",
                    d.name
                ),
            ));
        }
        let id = c.vars.len();
        c.vars.push(VarInfo {
            name: d.name.clone(),
            kind,
            ty: d.ty.scalar,
            array_len: d.ty.array_len,
            init,
            span: d.span,
        });
        c.declared.insert(d.name.clone(), Binding::Var(id));
        c.visible.insert(d.name.clone());
        if kind == VarKind::State && d.init.is_some() {
            c.initialized.insert(id);
        }
    }

    c.region = Region::Init;
    let init = c.block(&p.init)?;
    for (id, v) in c.vars.iter().enumerate() {
        if v.kind == VarKind::State && !c.initialized.contains(&id) {
            return Err(err(
                ErrorKind::Uninitialized,
                v.span,
                format!(
                    "state variable `{}` has no initializer and is not assigned in init",
                    v.name
                ),
            ));
        }
    }

    let mut main_loops = Vec::new();
    for (l, def) in p.loops.iter().enumerate() {
        if c.declared.contains_key(&def.name) {
            return Err(err(
                ErrorKind::Duplicate,
                def.span,
                format!("`{}` is already declared", def.name),
            ));
        }
        if p.loops[..l].iter().any(|o| o.name == def.name) {
            return Err(err(
                ErrorKind::Duplicate,
                def.span,
                format!("loop `{}` is already defined", def.name),
            ));
        }
        c.region = Region::Loop(l);
        let loop_index = c.open_loop(def.name.clone(), LoopKind::Unbounded, def.span);
        let body = c.block(&def.body)?;
        c.loop_stack.pop();
        main_loops.push(MainLoop { loop_index, body });
    }

    Ok(TypedProgram {
        vars: c.vars,
        for_vars: c.for_vars,
        init,
        main_loops,
        loop_table: c.loop_table,
        asserts: c.asserts,
        sites: c.sites,
        expanded: false,
    })
}

impl Checker {
    fn declare_name(&mut self, name: &str, span: Span) -> Result<(), FrontendError> {
        if self.declared.contains_key(name) {
            return Err(err(
                ErrorKind::Duplicate,
                span,
                format!("`{name}` is already declared"),
            ));
        }
        Ok(())
    }

    fn open_loop(&mut self, name: String, kind: LoopKind, span: Span) -> usize {
        let idx = self.loop_table.len();
        self.loop_table.push(LoopInfo {
            id: format!("main.{idx}"),
            name,
            kind,
            parent: self.loop_stack.last().copied(),
            modified_vars: BTreeSet::new(),
            span,
        });
        self.loop_stack.push(idx);
        idx
    }

    fn note_modified(&mut self, v: VarId) {
        for &l in &self.loop_stack {
            self.loop_table[l].modified_vars.insert(v);
        }
    }

    fn main_loop(&self) -> Option<usize> {
        match self.region {
            Region::Loop(l) => Some(l),
            _ => None,
        }
    }

    /// Initializer of a declaration or array local: scalar of `ty`.
    fn scalar_init(&mut self, e: &Expr, ty: Ty) -> Result<TExpr, FrontendError> {
        self.expr(e, Some(ty))
    }

    fn block(&mut self, stmts: &[Stmt]) -> Result<Vec<TStmt>, FrontendError> {
        self.scopes.push(Vec::new());
        let mut out = Vec::with_capacity(stmts.len());
        for s in stmts {
            out.push(self.stmt(s)?);
        }
        for name in self.scopes.pop().unwrap() {
            self.visible.remove(&name);
        }
        Ok(out)
    }

    fn lookup(&self, name: &str, span: Span) -> Result<Binding, FrontendError> {
        match self.declared.get(name) {
            Some(b) if self.visible.contains(name) => Ok(*b),
            Some(_) => Err(err(
                ErrorKind::Undeclared,
                span,
                format!("`{name}` is not in scope here"),
            )),
            None => Err(err(
                ErrorKind::Undeclared,
                span,
                format!("undeclared identifier `{name}`"),
            )),
        }
    }

    fn stmt(&mut self, s: &Stmt) -> Result<TStmt, FrontendError> {
        match &s.kind {
            StmtKind::Assign {
                target,
                index,
                value,
            } => {
                let var = match self.lookup(target, s.span)? {
                    Binding::Var(v) => v,
                    Binding::Induction(_) => {
                        return Err(err(
                            ErrorKind::TypeMismatch,
                            s.span,
                            format!("cannot assign to loop variable `{target}`"),
                        ))
                    }
                };
                let info = self.vars[var].clone();
                if info.kind == VarKind::Input {
                    return Err(err(
                        ErrorKind::InputAssignment,
                        s.span,
                        format!("cannot assign to `{target}`: inputs are read-only per step"),
                    ));
                }
                let index = match (index, info.array_len) {
                    (Some(i), Some(_)) => Some(self.index_expr(i)?),
                    (None, None) => None,
                    (Some(_), None) => {
                        return Err(err(
                            ErrorKind::TypeMismatch,
                            s.span,
                            format!("`{target}` is not an array"),
                        ))
                    }
                    (None, Some(_)) => {
                        return Err(err(
                            ErrorKind::TypeMismatch,
                            s.span,
                            format!("array `{target}` must be assigned element-wise"),
                        ))
                    }
                };
                let value = self.expr(value, Some(info.ty))?;
                if self.region == Region::Init && info.kind == VarKind::State && index.is_none() {
                    self.initialized.insert(var);
                }
                self.note_modified(var);
                Ok(TStmt::Assign { var, index, value })
            }
            StmtKind::If {
                cond,
                then_block,
                else_block,
            } => {
                let cond = self.expr(cond, Some(Ty::Bool))?;
                let before = self.initialized.clone();
                let then_block = self.block(then_block)?;
                let after_then = core::mem::replace(&mut self.initialized, before);
                let else_block = match else_block {
                    Some(b) => self.block(b)?,
                    None => Vec::new(),
                };
                self.initialized = self
                    .initialized
                    .intersection(&after_then)
                    .copied()
                    .collect();
                Ok(TStmt::If {
                    cond,
                    then_block,
                    else_block,
                })
            }
            StmtKind::Assert(e) => {
                let cond = self.expr(e, Some(Ty::Bool))?;
                let id = self.asserts.len() as AssertId;
                self.asserts.push(AssertInfo {
                    span: s.span,
                    unwinding: false,
                    main_loop: self.main_loop(),
                });
                Ok(TStmt::Assert { id, cond })
            }
            StmtKind::Assume(e) => Ok(TStmt::Assume(self.expr(e, Some(Ty::Bool))?)),
            StmtKind::For { var, lo, hi, body } => {
                let lo_t = self.bound_expr(lo)?;
                let hi_t = self.bound_expr(hi)?;
                let count = match (const_eval(&lo_t), const_eval(&hi_t)) {
                    (Some(a), Some(b)) => Some(b.saturating_sub(a)),
                    _ => None,
                };
                self.declare_name(var, s.span)?;
                let for_id = self.for_vars.len();
                self.for_vars.push(var.clone());
                self.declared
                    .insert(var.clone(), Binding::Induction(for_id));
                let loop_index = self.open_loop(var.clone(), LoopKind::Bounded(count), s.span);
                self.scopes.push(alloc::vec![var.clone()]);
                self.visible.insert(var.clone());
                let before = self.initialized.clone();
                let body = self.block(body)?;
                if count.unwrap_or(0) == 0 {
                    self.initialized = before;
                }
                for name in self.scopes.pop().unwrap() {
                    self.visible.remove(&name);
                }
                self.loop_stack.pop();
                Ok(TStmt::For {
                    id: for_id,
                    loop_index,
                    lo: lo_t,
                    hi: hi_t,
                    body,
                })
            }
            StmtKind::Local { ty, name, init } => {
                self.declare_name(name, s.span)?;
                let init = self.expr(init, Some(ty.scalar))?;
                let id = self.vars.len();
                self.vars.push(VarInfo {
                    name: name.clone(),
                    kind: VarKind::Local,
                    ty: ty.scalar,
                    array_len: ty.array_len,
                    init: None,
                    span: s.span,
                });
                self.declared.insert(name.clone(), Binding::Var(id));
                self.visible.insert(name.clone());
                self.scopes.last_mut().unwrap().push(name.clone());
                self.note_modified(id);
                Ok(TStmt::Local { var: id, init })
            }
        }
    }

    fn bound_expr(&mut self, e: &Expr) -> Result<TExpr, FrontendError> {
        let ty = self.natural(e)?.unwrap_or(Ty::unsigned(64));
        if !matches!(ty, Ty::Bv { signed: false, .. }) {
            return Err(err(
                ErrorKind::TypeMismatch,
                e.span,
                format!("loop bounds must be unsigned, found {ty}"),
            ));
        }
        self.check(e, ty)
    }

    fn index_expr(&mut self, e: &Expr) -> Result<TExpr, FrontendError> {
        let ty = self.natural(e)?.unwrap_or(DEFAULT_INT);
        if !matches!(ty, Ty::Bv { signed: false, .. }) {
            return Err(err(
                ErrorKind::TypeMismatch,
                e.span,
                format!("array index must be unsigned, found {ty}"),
            ));
        }
        self.check(e, ty)
    }

    fn expr(&mut self, e: &Expr, expected: Option<Ty>) -> Result<TExpr, FrontendError> {
        let ty = match expected {
            Some(t) => t,
            None => match self.natural(e)? {
                Some(t) => t,
                None => DEFAULT_INT,
            },
        };
        self.check(e, ty)
    }

    /// Type of an expression that does not depend on context, if any.
    fn natural(&self, e: &Expr) -> Result<Option<Ty>, FrontendError> {
        Ok(match &e.kind {
            ExprKind::Int(_) | ExprKind::Nondet => None,
            ExprKind::Bool(_) => Some(Ty::Bool),
            ExprKind::Ident(name) => match self.lookup(name, e.span)? {
                Binding::Var(v) => Some(self.vars[v].ty),
                Binding::Induction(_) => None,
            },
            ExprKind::Unary(UnOp::Not, _) => Some(Ty::Bool),
            ExprKind::Unary(_, a) => self.natural(a)?,
            ExprKind::Binary(op, a, b) => {
                if op.is_comparison() {
                    Some(Ty::Bool)
                } else {
                    match self.natural(a)? {
                        Some(t) => Some(t),
                        None => self.natural(b)?,
                    }
                }
            }
            ExprKind::Ternary(_, a, b) => match self.natural(a)? {
                Some(t) => Some(t),
                None => self.natural(b)?,
            },
            ExprKind::Cast(_, t) => Some(*t),
            ExprKind::Index(name, _) => match self.lookup(name, e.span)? {
                Binding::Var(v) => Some(self.vars[v].ty),
                Binding::Induction(_) => None,
            },
        })
    }

    fn mismatch(span: Span, expected: Ty, found: impl core::fmt::Display) -> FrontendError {
        err(
            ErrorKind::TypeMismatch,
            span,
            format!("type mismatch: expected {expected}, found {found}"),
        )
    }

    fn read_var(&self, v: VarId, span: Span) -> Result<(), FrontendError> {
        let info = &self.vars[v];
        match self.region {
            Region::Decls | Region::Init if info.kind == VarKind::Input => Err(err(
                ErrorKind::TypeMismatch,
                span,
                format!("input `{}` can only be read inside a loop", info.name),
            )),
            Region::Decls | Region::Init
                if info.kind == VarKind::State && !self.initialized.contains(&v) =>
            {
                Err(err(
                    ErrorKind::Uninitialized,
                    span,
                    format!("`{}` is read before it is initialized", info.name),
                ))
            }
            _ => Ok(()),
        }
    }

    /// Elaborate `e` at type `ty`.
    fn check(&mut self, e: &Expr, ty: Ty) -> Result<TExpr, FrontendError> {
        let kind = match &e.kind {
            ExprKind::Int(v) => {
                if ty.is_bool() {
                    return Err(Self::mismatch(e.span, ty, "integer literal"));
                }
                if *v > ty.mask() {
                    return Err(err(
                        ErrorKind::TypeMismatch,
                        e.span,
                        format!("literal {v} does not fit in {ty}"),
                    ));
                }
                TExprKind::Const(*v)
            }
            ExprKind::Bool(b) => {
                if !ty.is_bool() {
                    return Err(Self::mismatch(e.span, ty, "bool"));
                }
                TExprKind::Const(*b as u64)
            }
            ExprKind::Ident(name) => match self.lookup(name, e.span)? {
                Binding::Var(v) => {
                    let info = &self.vars[v];
                    if info.is_array() {
                        return Err(err(
                            ErrorKind::TypeMismatch,
                            e.span,
                            format!("array `{name}` must be indexed"),
                        ));
                    }
                    if info.ty != ty {
                        return Err(Self::mismatch(e.span, ty, info.ty));
                    }
                    self.read_var(v, e.span)?;
                    TExprKind::Var(v)
                }
                Binding::Induction(f) => {
                    if ty.is_bool() {
                        return Err(Self::mismatch(e.span, ty, "loop variable"));
                    }
                    TExprKind::Induction(f)
                }
            },
            ExprKind::Nondet => {
                let site = self.sites.len() as SiteId;
                self.sites.push(SiteInfo {
                    ty,
                    span: e.span,
                    main_loop: self.main_loop(),
                });
                TExprKind::Nondet(site)
            }
            ExprKind::Unary(op, a) => {
                match op {
                    UnOp::Not if !ty.is_bool() => return Err(Self::mismatch(e.span, ty, "bool")),
                    UnOp::Neg | UnOp::BitNot if ty.is_bool() => {
                        return Err(err(
                            ErrorKind::TypeMismatch,
                            e.span,
                            format!("operator `{}` needs a bitvector operand", unop_symbol(*op)),
                        ))
                    }
                    _ => {}
                }
                TExprKind::Unary(*op, Box::new(self.check(a, ty)?))
            }
            ExprKind::Binary(op, a, b) => {
                let operand_ty = if op.is_comparison() {
                    if !ty.is_bool() {
                        return Err(Self::mismatch(e.span, ty, "bool"));
                    }
                    let t = match self.natural(a)? {
                        Some(t) => Some(t),
                        None => self.natural(b)?,
                    };
                    match t {
                        Some(t) => t,
                        None if has_nondet(a) || has_nondet(b) => {
                            return Err(err(
                                ErrorKind::TypeMismatch,
                                e.span,
                                "cannot infer the type of nondet() here; add a cast",
                            ))
                        }
                        None => DEFAULT_INT,
                    }
                } else {
                    ty
                };
                let bool_ok = matches!(
                    op,
                    BinOp::And | BinOp::Or | BinOp::Xor | BinOp::Eq | BinOp::Ne
                );
                if operand_ty.is_bool() && !bool_ok {
                    return Err(err(
                        ErrorKind::TypeMismatch,
                        e.span,
                        format!("operator `{}` needs bitvector operands", op.symbol()),
                    ));
                }
                TExprKind::Binary(
                    *op,
                    Box::new(self.check(a, operand_ty)?),
                    Box::new(self.check(b, operand_ty)?),
                )
            }
            ExprKind::Ternary(c, a, b) => TExprKind::Ite(
                Box::new(self.check(c, Ty::Bool)?),
                Box::new(self.check(a, ty)?),
                Box::new(self.check(b, ty)?),
            ),
            ExprKind::Cast(a, target) => {
                if *target != ty {
                    return Err(Self::mismatch(e.span, ty, *target));
                }
                if ty.is_bool() {
                    return Err(err(
                        ErrorKind::TypeMismatch,
                        e.span,
                        "casts are only defined between bitvector types",
                    ));
                }
                let inner_ty = self.natural(a)?.unwrap_or(ty);
                if inner_ty.is_bool() {
                    return Err(err(
                        ErrorKind::TypeMismatch,
                        e.span,
                        "casts are only defined between bitvector types",
                    ));
                }
                TExprKind::Cast(Box::new(self.check(a, inner_ty)?))
            }
            ExprKind::Index(name, idx) => match self.lookup(name, e.span)? {
                Binding::Var(v) => {
                    let info = self.vars[v].clone();
                    if !info.is_array() {
                        return Err(err(
                            ErrorKind::TypeMismatch,
                            e.span,
                            format!("`{name}` is not an array"),
                        ));
                    }
                    if info.ty != ty {
                        return Err(Self::mismatch(e.span, ty, info.ty));
                    }
                    self.read_var(v, e.span)?;
                    TExprKind::Index(v, Box::new(self.index_expr(idx)?))
                }
                Binding::Induction(_) => {
                    return Err(err(
                        ErrorKind::TypeMismatch,
                        e.span,
                        format!("`{name}` is not an array"),
                    ))
                }
            },
        };
        Ok(TExpr { kind, ty })
    }
}

fn has_nondet(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Nondet => true,
        ExprKind::Unary(_, a) | ExprKind::Cast(a, _) | ExprKind::Index(_, a) => has_nondet(a),
        ExprKind::Binary(_, a, b) => has_nondet(a) || has_nondet(b),
        ExprKind::Ternary(c, a, b) => has_nondet(c) || has_nondet(a) || has_nondet(b),
        _ => false,
    }
}

fn unop_symbol(op: UnOp) -> &'static str {
    match op {
        UnOp::Neg => "-",
        UnOp::Not => "!",
        UnOp::BitNot => "~",
    }
}

/// Evaluate an expression built only from constants.
pub(crate) fn const_eval(e: &TExpr) -> Option<u64> {
    Some(match &e.kind {
        TExprKind::Const(v) => *v,
        TExprKind::Unary(op, a) => eval_unary(*op, const_eval(a)?, e.ty),
        TExprKind::Binary(op, a, b) => eval_binary(*op, const_eval(a)?, const_eval(b)?, a.ty),
        TExprKind::Ite(c, a, b) => {
            if const_eval(c)? & 1 == 1 {
                const_eval(a)?
            } else {
                const_eval(b)?
            }
        }
        TExprKind::Cast(a) => eval_cast(const_eval(a)?, a.ty, e.ty),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    fn tc(src: &str) -> Result<TypedProgram, FrontendError> {
        typecheck(&parse(src).unwrap())
    }

    #[test]
    fn bool_from_u8_is_rejected() {
        let e = tc("state u8 x := 0; state bool b := x; loop m { }").unwrap_err();
        assert_eq!(e.kind, ErrorKind::TypeMismatch);
    }

    #[test]
    fn signed_input_accumulation() {
        tc("input i16 t; state i16 s := 0; loop m { s := s + t; }").unwrap();
    }

    #[test]
    fn inputs_are_read_only() {
        let e = tc("input u8 t; loop m { t := 1; }").unwrap_err();
        assert_eq!(e.kind, ErrorKind::InputAssignment);
        assert!(e.message.contains("inputs are read-only per step"));
    }

    #[test]
    fn undeclared_and_duplicate() {
        assert_eq!(
            tc("loop m { x := 1; }").unwrap_err().kind,
            ErrorKind::Undeclared
        );
        assert_eq!(
            tc("state u8 x := 0; state u8 x := 1; loop m { }")
                .unwrap_err()
                .kind,
            ErrorKind::Duplicate
        );
    }

    #[test]
    fn state_needs_initialization() {
        assert_eq!(
            tc("state u8 x; loop m { }").unwrap_err().kind,
            ErrorKind::Uninitialized
        );
        tc("state u8 x; init { x := 3; } loop m { }").unwrap();
        assert_eq!(
            tc("state u8 x; input bool c; init { if (true) { x := 3; } } loop m { }")
                .unwrap_err()
                .kind,
            ErrorKind::Uninitialized
        );
        tc("state u8 x; init { if (true) { x := 3; } else { x := 4; } } loop m { }").unwrap();
    }

    #[test]
    fn literals_take_context_type() {
        let p = tc("state i8 x := -1; loop m { assert(x < 3); }").unwrap();
        assert_eq!(p.vars[0].init.as_ref().unwrap().ty, Ty::signed(8));
        assert!(tc("state u8 x := 256; loop m { }").is_err());
    }

    #[test]
    fn nondet_needs_context() {
        assert!(tc("loop m { assert(nondet() == nondet()); }").is_err());
        let p = tc("state u8 x := nondet(); loop m { }").unwrap();
        assert_eq!(p.sites.len(), 1);
        assert_eq!(p.sites[0].ty, Ty::unsigned(8));
    }

    #[test]
    fn loops_are_indexed_in_source_order() {
        let p = tc("state u8 s := 0; loop a { for i in 0..4 { s := s + i; } } loop b { }").unwrap();
        let ids: Vec<_> = p.loop_table.iter().map(|l| l.id.as_str()).collect();
        assert_eq!(ids, ["main.0", "main.1", "main.2"]);
        assert_eq!(p.loop_table[1].kind, LoopKind::Bounded(Some(4)));
        assert_eq!(p.loop_table[1].parent, Some(0));
        assert!(p.loop_table[0].modified_vars.contains(&0));
    }

    #[test]
    fn arrays() {
        tc("state u8[4] a := 0; loop m { a[1] := a[0] + 1; }").unwrap();
        assert!(tc("state u8[4] a; loop m { }").is_err());
        assert!(tc("state u8[4] a := 0; input i8 j; loop m { a[j] := 1; }").is_err());
        assert!(tc("state u8[4] a := 0; state u8 x := 0; loop m { x := a; }").is_err());
    }
}
