use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use super::typecheck::const_eval;
use super::typed::*;
use super::{ErrorKind, FrontendError};
use crate::bv::{BinOp, Ty};

/// The loop table in source order.
pub fn index_loops(p: &TypedProgram) -> Vec<LoopInfo> {
    p.loop_table.clone()
}

/// One line per loop: id, kind, enclosing loop and name.
pub fn loop_table_text(p: &TypedProgram) -> String {
    let mut out = String::new();
    for l in &p.loop_table {
        let kind = match l.kind {
            LoopKind::Unbounded => String::from("unbounded"),
            LoopKind::Bounded(Some(n)) => format!("bounded({n})"),
            LoopKind::Bounded(None) => String::from("bounded(?)"),
        };
        let _ = write!(out, "{} {} {}", l.id, kind, l.name);
        if let Some(parent) = l.parent {
            let _ = write!(out, " in {}", p.loop_table[parent].id);
        }
        out.push('\n');
    }
    out
}

/// Replace every `for` by copies of its body with the induction variable
/// substituted. With `unwinding_assertions`, each unrolled loop is followed by
/// an `assert(false)` guarded by the loop condition after the last copy.
pub fn expand_bounded_loops(
    p: &TypedProgram,
    unwinding_assertions: bool,
) -> Result<TypedProgram, FrontendError> {
    let mut out = p.clone();
    if p.expanded {
        return Ok(out);
    }
    let mut cx = Expander {
        loop_table: &p.loop_table,
        asserts: &mut out.asserts,
        unwinding_assertions,
        main_loop: None,
    };
    out.init = cx.block(&p.init)?;
    for (l, m) in out.main_loops.iter_mut().enumerate() {
        cx.main_loop = Some(l);
        m.body = cx.block(&m.body)?;
    }
    out.expanded = true;
    out.renumber();
    Ok(out)
}

struct Expander<'a> {
    loop_table: &'a [LoopInfo],
    asserts: &'a mut Vec<AssertInfo>,
    unwinding_assertions: bool,
    main_loop: Option<usize>,
}

impl Expander<'_> {
    fn block(&mut self, stmts: &[TStmt]) -> Result<Vec<TStmt>, FrontendError> {
        let mut out = Vec::with_capacity(stmts.len());
        for s in stmts {
            self.stmt(s, &mut out)?;
        }
        Ok(out)
    }

    fn stmt(&mut self, s: &TStmt, out: &mut Vec<TStmt>) -> Result<(), FrontendError> {
        match s {
            TStmt::If {
                cond,
                then_block,
                else_block,
            } => out.push(TStmt::If {
                cond: cond.clone(),
                then_block: self.block(then_block)?,
                else_block: self.block(else_block)?,
            }),
            TStmt::For {
                id,
                loop_index,
                lo,
                hi,
                body,
            } => {
                let span = self.loop_table[*loop_index].span;
                let static_err =
                    || FrontendError::new(ErrorKind::NonStaticBound, span, "bound must be static");
                let lo_v = const_eval(lo).ok_or_else(static_err)?;
                let hi_v = const_eval(hi).ok_or_else(static_err)?;
                let mut v = lo_v;
                while v < hi_v {
                    let mut copy = body.clone();
                    substitute(&mut copy, *id, v);
                    for s in &copy {
                        self.stmt(s, out)?;
                    }
                    v += 1;
                }
                if self.unwinding_assertions && hi_v > lo_v {
                    let bty = hi.ty;
                    let assert_id = self.asserts.len() as AssertId;
                    self.asserts.push(AssertInfo {
                        span,
                        unwinding: true,
                        main_loop: self.main_loop,
                    });
                    let cont = TExpr {
                        kind: TExprKind::Binary(
                            BinOp::Lt,
                            alloc::boxed::Box::new(TExpr::constant(v, bty)),
                            alloc::boxed::Box::new(TExpr::constant(hi_v, bty)),
                        ),
                        ty: Ty::Bool,
                    };
                    out.push(TStmt::If {
                        cond: cont,
                        then_block: vec![TStmt::Assert {
                            id: assert_id,
                            cond: TExpr::bool_const(false),
                        }],
                        else_block: Vec::new(),
                    });
                }
            }
            other => out.push(other.clone()),
        }
        Ok(())
    }
}

fn substitute(stmts: &mut [TStmt], id: ForId, value: u64) {
    TStmt::walk_exprs_mut(stmts, &mut |e| {
        if e.kind == TExprKind::Induction(id) {
            *e = TExpr::constant(value, e.ty);
        }
    });
}
