//! Render a typed program back to source. Re-parsing and type-checking the
//! output yields the same program modulo source positions.

use alloc::string::String;
use core::fmt::Write;

use super::typed::*;
use crate::bv::{Ty, UnOp};

pub fn pretty_print(p: &TypedProgram) -> String {
    let mut pp = Printer {
        p,
        out: String::new(),
    };
    for v in p.vars.iter().filter(|v| v.kind != VarKind::Local) {
        let kw = if v.kind == VarKind::Input {
            "input"
        } else {
            "state"
        };
        let _ = write!(
            pp.out,
            "{kw} {} {}",
            pp.type_text(v.ty, v.array_len),
            v.name
        );
        if let Some(init) = &v.init {
            pp.out.push_str(" := ");
            pp.expr(init);
        }
        pp.out.push_str(";\n");
    }
    if !p.init.is_empty() {
        pp.out.push_str("init ");
        pp.block(&p.init, 0);
        pp.out.push('\n');
    }
    for m in &p.main_loops {
        let _ = write!(pp.out, "loop {} ", p.loop_table[m.loop_index].name);
        pp.block(&m.body, 0);
        pp.out.push('\n');
    }
    pp.out
}

struct Printer<'a> {
    p: &'a TypedProgram,
    out: String,
}

impl Printer<'_> {
    fn type_text(&self, ty: Ty, len: Option<u32>) -> String {
        let mut s = String::new();
        let _ = write!(s, "{ty}");
        if let Some(n) = len {
            let _ = write!(s, "[{n}]");
        }
        s
    }

    fn indent(&mut self, depth: usize) {
        for _ in 0..depth {
            self.out.push_str("    ");
        }
    }

    fn block(&mut self, stmts: &[TStmt], depth: usize) {
        self.out.push_str("{\n");
        for s in stmts {
            self.stmt(s, depth + 1);
        }
        self.indent(depth);
        self.out.push('}');
    }

    fn stmt(&mut self, s: &TStmt, depth: usize) {
        self.indent(depth);
        match s {
            TStmt::Assign { var, index, value } => {
                self.out.push_str(&self.p.vars[*var].name);
                if let Some(i) = index {
                    self.out.push('[');
                    self.expr(i);
                    self.out.push(']');
                }
                self.out.push_str(" := ");
                self.expr(value);
                self.out.push(';');
            }
            TStmt::If {
                cond,
                then_block,
                else_block,
            } => {
                self.out.push_str("if (");
                self.expr(cond);
                self.out.push_str(") ");
                self.block(then_block, depth);
                if !else_block.is_empty() {
                    self.out.push_str(" else ");
                    self.block(else_block, depth);
                }
            }
            TStmt::Assert { cond, .. } => {
                self.out.push_str("assert(");
                self.expr(cond);
                self.out.push_str(");");
            }
            TStmt::Assume(cond) => {
                self.out.push_str("assume(");
                self.expr(cond);
                self.out.push_str(");");
            }
            TStmt::For {
                id, lo, hi, body, ..
            } => {
                let _ = write!(self.out, "for {} in ", self.p.for_vars[*id]);
                self.expr(lo);
                self.out.push_str("..");
                self.expr(hi);
                self.out.push(' ');
                self.block(body, depth);
            }
            TStmt::Local { var, init } => {
                let v = &self.p.vars[*var];
                let _ = write!(
                    self.out,
                    "local {} {} := ",
                    self.type_text(v.ty, v.array_len),
                    v.name
                );
                self.expr(init);
                self.out.push(';');
            }
        }
        self.out.push('\n');
    }

    fn expr(&mut self, e: &TExpr) {
        match &e.kind {
            TExprKind::Const(v) => {
                if e.ty.is_bool() {
                    self.out.push_str(if *v == 1 { "true" } else { "false" });
                } else {
                    let _ = write!(self.out, "{v}");
                }
            }
            TExprKind::Var(v) => self.out.push_str(&self.p.vars[*v].name),
            TExprKind::Nondet(_) => self.out.push_str("nondet()"),
            TExprKind::Induction(f) => self.out.push_str(&self.p.for_vars[*f]),
            TExprKind::Unary(op, a) => {
                self.out.push_str(match op {
                    UnOp::Neg => "-",
                    UnOp::Not => "!",
                    UnOp::BitNot => "~",
                });
                self.atom(a);
            }
            TExprKind::Binary(op, a, b) => {
                self.atom(a);
                let _ = write!(self.out, " {} ", op.symbol());
                self.atom(b);
            }
            TExprKind::Ite(c, a, b) => {
                self.atom(c);
                self.out.push_str(" ? ");
                self.atom(a);
                self.out.push_str(" : ");
                self.atom(b);
            }
            TExprKind::Cast(a) => {
                self.atom(a);
                let _ = write!(self.out, " as {}", e.ty);
            }
            TExprKind::Index(v, i) => {
                self.out.push_str(&self.p.vars[*v].name);
                self.out.push('[');
                self.expr(i);
                self.out.push(']');
            }
        }
    }

    /// An operand: parenthesised unless it is a leaf.
    fn atom(&mut self, e: &TExpr) {
        let leaf = matches!(
            e.kind,
            TExprKind::Var(_)
                | TExprKind::Nondet(_)
                | TExprKind::Induction(_)
                | TExprKind::Index(..)
        ) || matches!(e.kind, TExprKind::Const(_));
        if leaf {
            self.expr(e);
        } else {
            self.out.push('(');
            self.expr(e);
            self.out.push(')');
        }
    }
}
