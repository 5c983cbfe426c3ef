//! Typed program representation shared by the interpreter and symbolic
//! execution.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::Span;
use crate::bv::{BinOp, Ty, UnOp};

pub type VarId = usize;
pub type SiteId = u32;
pub type AssertId = u32;
pub type ForId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Input,
    State,
    Local,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarInfo {
    pub name: String,
    pub kind: VarKind,
    /// Element type for arrays.
    pub ty: Ty,
    pub array_len: Option<u32>,
    /// Declaration initializer (state variables only). For arrays this is the
    /// broadcast value or `nondet()`.
    pub init: Option<TExpr>,
    pub span: Span,
}

impl VarInfo {
    pub fn is_array(&self) -> bool {
        self.array_len.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TExpr {
    pub kind: TExprKind,
    pub ty: Ty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TExprKind {
    /// Bit pattern masked to `ty`.
    Const(u64),
    Var(VarId),
    Nondet(SiteId),
    /// Induction variable of a bounded loop; replaced by a constant during
    /// unrolling.
    Induction(ForId),
    Unary(UnOp, Box<TExpr>),
    /// Operands share a type; the node's type is `bool` for comparisons.
    Binary(BinOp, Box<TExpr>, Box<TExpr>),
    Ite(Box<TExpr>, Box<TExpr>, Box<TExpr>),
    Cast(Box<TExpr>),
    Index(VarId, Box<TExpr>),
}

impl TExpr {
    pub fn constant(v: u64, ty: Ty) -> TExpr {
        TExpr {
            kind: TExprKind::Const(v & ty.mask()),
            ty,
        }
    }

    pub fn bool_const(b: bool) -> TExpr {
        TExpr::constant(b as u64, Ty::Bool)
    }

    /// Visit every sub-expression in pre-order.
    pub fn walk(&self, f: &mut dyn FnMut(&TExpr)) {
        f(self);
        match &self.kind {
            TExprKind::Unary(_, a) | TExprKind::Cast(a) | TExprKind::Index(_, a) => a.walk(f),
            TExprKind::Binary(_, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            TExprKind::Ite(c, a, b) => {
                c.walk(f);
                a.walk(f);
                b.walk(f);
            }
            _ => {}
        }
    }

    pub fn walk_mut(&mut self, f: &mut dyn FnMut(&mut TExpr)) {
        f(self);
        match &mut self.kind {
            TExprKind::Unary(_, a) | TExprKind::Cast(a) | TExprKind::Index(_, a) => a.walk_mut(f),
            TExprKind::Binary(_, a, b) => {
                a.walk_mut(f);
                b.walk_mut(f);
            }
            TExprKind::Ite(c, a, b) => {
                c.walk_mut(f);
                a.walk_mut(f);
                b.walk_mut(f);
            }
            _ => {}
        }
    }

    /// Variables read by the expression (array reads count the array).
    pub fn vars(&self, out: &mut BTreeSet<VarId>) {
        self.walk(&mut |e| match e.kind {
            TExprKind::Var(v) | TExprKind::Index(v, _) => {
                out.insert(v);
            }
            _ => {}
        });
    }

    pub fn has_nondet(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= matches!(e.kind, TExprKind::Nondet(_)));
        found
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TStmt {
    Assign {
        var: VarId,
        index: Option<TExpr>,
        value: TExpr,
    },
    If {
        cond: TExpr,
        then_block: Vec<TStmt>,
        else_block: Vec<TStmt>,
    },
    Assert {
        id: AssertId,
        cond: TExpr,
    },
    Assume(TExpr),
    For {
        id: ForId,
        /// Index of this loop in the loop table.
        loop_index: usize,
        lo: TExpr,
        hi: TExpr,
        body: Vec<TStmt>,
    },
    /// Declaration of a local; (re)initialises it every time it executes.
    /// Array locals take a broadcast value or `nondet()`.
    Local {
        var: VarId,
        init: TExpr,
    },
}

impl TStmt {
    /// Visit statements in pre-order, including nested blocks.
    pub fn walk(stmts: &[TStmt], f: &mut dyn FnMut(&TStmt)) {
        for s in stmts {
            f(s);
            match s {
                TStmt::If {
                    then_block,
                    else_block,
                    ..
                } => {
                    TStmt::walk(then_block, f);
                    TStmt::walk(else_block, f);
                }
                TStmt::For { body, .. } => TStmt::walk(body, f),
                _ => {}
            }
        }
    }

    /// Visit every expression in the statements, in execution order.
    pub fn walk_exprs_mut(stmts: &mut [TStmt], f: &mut dyn FnMut(&mut TExpr)) {
        for s in stmts {
            match s {
                TStmt::Assign { index, value, .. } => {
                    if let Some(i) = index {
                        i.walk_mut(f);
                    }
                    value.walk_mut(f);
                }
                TStmt::If {
                    cond,
                    then_block,
                    else_block,
                } => {
                    cond.walk_mut(f);
                    TStmt::walk_exprs_mut(then_block, f);
                    TStmt::walk_exprs_mut(else_block, f);
                }
                TStmt::Assert { cond, .. } | TStmt::Assume(cond) => cond.walk_mut(f),
                TStmt::For { lo, hi, body, .. } => {
                    lo.walk_mut(f);
                    hi.walk_mut(f);
                    TStmt::walk_exprs_mut(body, f);
                }
                TStmt::Local { init, .. } => init.walk_mut(f),
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopKind {
    Unbounded,
    /// Iteration count, when the bounds are static.
    Bounded(Option<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopInfo {
    /// `main.<ordinal>`.
    pub id: String,
    /// Source name of an unbounded loop, induction variable of a `for`.
    pub name: String,
    pub kind: LoopKind,
    /// Loop-table index of the enclosing loop.
    pub parent: Option<usize>,
    /// State and local variables assigned anywhere in the body.
    pub modified_vars: BTreeSet<VarId>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MainLoop {
    /// Index into [`TypedProgram::loop_table`].
    pub loop_index: usize,
    pub body: Vec<TStmt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssertInfo {
    pub span: Span,
    /// Inserted by unrolling to detect an insufficient bound.
    pub unwinding: bool,
    /// Main loop containing the assert; `None` for the init block.
    pub main_loop: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteInfo {
    pub ty: Ty,
    pub span: Span,
    pub main_loop: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedProgram {
    pub vars: Vec<VarInfo>,
    /// Names of `for` induction variables, indexed by [`ForId`].
    pub for_vars: Vec<String>,
    pub init: Vec<TStmt>,
    pub main_loops: Vec<MainLoop>,
    pub loop_table: Vec<LoopInfo>,
    pub asserts: Vec<AssertInfo>,
    pub sites: Vec<SiteInfo>,
    /// True once bounded loops have been unrolled.
    pub expanded: bool,
}

impl TypedProgram {
    pub fn var(&self, v: VarId) -> &VarInfo {
        &self.vars[v]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn state_vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.vars_of(VarKind::State)
    }

    pub fn input_vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.vars_of(VarKind::Input)
    }

    fn vars_of(&self, kind: VarKind) -> impl Iterator<Item = VarId> + '_ {
        self.vars
            .iter()
            .enumerate()
            .filter(move |(_, v)| v.kind == kind)
            .map(|(i, _)| i)
    }

    /// Resolve a loop by id (`main.0`) or by the name of an unbounded loop,
    /// returning its position in [`TypedProgram::main_loops`].
    pub fn find_main_loop(&self, key: &str) -> Option<usize> {
        self.main_loops.iter().position(|m| {
            let info = &self.loop_table[m.loop_index];
            info.id == key || info.name == key
        })
    }

    pub fn main_loop_info(&self, l: usize) -> &LoopInfo {
        &self.loop_table[self.main_loops[l].loop_index]
    }

    /// State variables assigned in main loop `l`.
    pub fn loop_modified_state(&self, l: usize) -> BTreeSet<VarId> {
        self.main_loop_info(l)
            .modified_vars
            .iter()
            .copied()
            .filter(|&v| self.vars[v].kind == VarKind::State)
            .collect()
    }

    /// Reassign assert ids and nondet sites in pre-order: declaration
    /// initializers, init block, then main loops.
    pub fn renumber(&mut self) {
        let mut asserts: Vec<AssertInfo> = Vec::new();
        let mut sites: Vec<SiteInfo> = Vec::new();
        let old_asserts = core::mem::take(&mut self.asserts);
        let old_sites = core::mem::take(&mut self.sites);

        let mut fix_expr = |e: &mut TExpr, sites: &mut Vec<SiteInfo>, ml: Option<usize>| {
            e.walk_mut(&mut |x| {
                if let TExprKind::Nondet(s) = &mut x.kind {
                    let old = &old_sites[*s as usize];
                    *s = sites.len() as SiteId;
                    sites.push(SiteInfo {
                        ty: old.ty,
                        span: old.span,
                        main_loop: ml,
                    });
                }
            })
        };
        for v in &mut self.vars {
            if let Some(init) = &mut v.init {
                fix_expr(init, &mut sites, None);
            }
        }
        fn fix_block(
            stmts: &mut [TStmt],
            ml: Option<usize>,
            asserts: &mut Vec<AssertInfo>,
            sites: &mut Vec<SiteInfo>,
            old_asserts: &[AssertInfo],
            fix_expr: &mut dyn FnMut(&mut TExpr, &mut Vec<SiteInfo>, Option<usize>),
        ) {
            for s in stmts {
                match s {
                    TStmt::Assign { index, value, .. } => {
                        if let Some(i) = index {
                            fix_expr(i, sites, ml);
                        }
                        fix_expr(value, sites, ml);
                    }
                    TStmt::If {
                        cond,
                        then_block,
                        else_block,
                    } => {
                        fix_expr(cond, sites, ml);
                        fix_block(then_block, ml, asserts, sites, old_asserts, fix_expr);
                        fix_block(else_block, ml, asserts, sites, old_asserts, fix_expr);
                    }
                    TStmt::Assert { id, cond } => {
                        fix_expr(cond, sites, ml);
                        let mut info = old_asserts[*id as usize].clone();
                        info.main_loop = ml;
                        *id = asserts.len() as AssertId;
                        asserts.push(info);
                    }
                    TStmt::Assume(c) => fix_expr(c, sites, ml),
                    TStmt::For { lo, hi, body, .. } => {
                        fix_expr(lo, sites, ml);
                        fix_expr(hi, sites, ml);
                        fix_block(body, ml, asserts, sites, old_asserts, fix_expr);
                    }
                    TStmt::Local { init, .. } => fix_expr(init, sites, ml),
                }
            }
        }
        fix_block(
            &mut self.init,
            None,
            &mut asserts,
            &mut sites,
            &old_asserts,
            &mut fix_expr,
        );
        for (l, m) in self.main_loops.iter_mut().enumerate() {
            fix_block(
                &mut m.body,
                Some(l),
                &mut asserts,
                &mut sites,
                &old_asserts,
                &mut fix_expr,
            );
        }
        self.asserts = asserts;
        self.sites = sites;
    }
}
