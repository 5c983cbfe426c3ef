use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::bv::{eval_binary, eval_cast, eval_unary, BinOp, Ty, UnOp};
use crate::frontend::{AssertId, SiteId, TypedProgram, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    Var(VarId),
    Nondet(SiteId),
    /// Path condition.
    Pc,
    /// Materialised branch condition.
    Cond(u32),
    /// Violation atom of an assert.
    Viol(AssertId),
    /// Entry assumption of an induction step case.
    Entry,
}

/// `base@step.version`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SsaName {
    pub base: Base,
    pub step: u32,
    pub version: u32,
}

impl SsaName {
    pub fn display<'a>(&'a self, prog: &'a TypedProgram) -> impl fmt::Display + 'a {
        NameDisplay { n: self, prog }
    }
}

struct NameDisplay<'a> {
    n: &'a SsaName,
    prog: &'a TypedProgram,
}

impl fmt::Display for NameDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.n.base {
            Base::Var(v) => write!(f, "{}", self.prog.vars[v].name)?,
            Base::Nondet(s) => write!(f, "nondet#{s}")?,
            Base::Pc => write!(f, "$pc")?,
            Base::Cond(c) => write!(f, "$cond{c}")?,
            Base::Viol(a) => write!(f, "$viol{a}")?,
            Base::Entry => write!(f, "$entry")?,
        }
        write!(f, "@{}.{}", self.n.step, self.n.version)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SsaExpr {
    pub kind: SsaKind,
    pub ty: Ty,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SsaKind {
    Const(u64),
    Name(SsaName),
    Unary(UnOp, Box<SsaExpr>),
    /// Operands share a type; comparisons have type `bool`.
    Binary(BinOp, Box<SsaExpr>, Box<SsaExpr>),
    Ite(Box<SsaExpr>, Box<SsaExpr>, Box<SsaExpr>),
    /// Conversion from the operand's type to `ty`.
    Cast(Box<SsaExpr>),
    /// Read of an array name; out-of-bounds reads yield zero.
    Select(SsaName, Box<SsaExpr>),
}

impl SsaExpr {
    pub fn constant(v: u64, ty: Ty) -> SsaExpr {
        SsaExpr {
            kind: SsaKind::Const(v & ty.mask()),
            ty,
        }
    }

    pub fn bool(b: bool) -> SsaExpr {
        SsaExpr::constant(b as u64, Ty::Bool)
    }

    pub fn name(n: SsaName, ty: Ty) -> SsaExpr {
        SsaExpr {
            kind: SsaKind::Name(n),
            ty,
        }
    }

    pub fn as_const(&self) -> Option<u64> {
        match self.kind {
            SsaKind::Const(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_true(&self) -> bool {
        self.as_const() == Some(1) && self.ty.is_bool()
    }

    pub fn is_false(&self) -> bool {
        self.as_const() == Some(0) && self.ty.is_bool()
    }

    /// Names read, including array names of selects.
    pub fn names(&self, out: &mut Vec<SsaName>) {
        match &self.kind {
            SsaKind::Const(_) => {}
            SsaKind::Name(n) => out.push(*n),
            SsaKind::Unary(_, a) | SsaKind::Cast(a) => a.names(out),
            SsaKind::Binary(_, a, b) => {
                a.names(out);
                b.names(out);
            }
            SsaKind::Ite(c, a, b) => {
                c.names(out);
                a.names(out);
                b.names(out);
            }
            SsaKind::Select(arr, i) => {
                out.push(*arr);
                i.names(out);
            }
        }
    }

    pub fn display<'a>(&'a self, prog: &'a TypedProgram) -> impl fmt::Display + 'a {
        ExprDisplay { e: self, prog }
    }
}

struct ExprDisplay<'a> {
    e: &'a SsaExpr,
    prog: &'a TypedProgram,
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self.e, self.prog)?;
        f.write_str(&s)
    }
}

fn write_operand(out: &mut String, e: &SsaExpr, prog: &TypedProgram) -> fmt::Result {
    match e.kind {
        SsaKind::Const(_) | SsaKind::Name(_) | SsaKind::Select(..) => write_expr(out, e, prog),
        _ => {
            out.push('(');
            write_expr(out, e, prog)?;
            out.push(')');
            Ok(())
        }
    }
}

fn write_expr(out: &mut String, e: &SsaExpr, prog: &TypedProgram) -> fmt::Result {
    match &e.kind {
        SsaKind::Const(v) => {
            if e.ty.is_bool() {
                out.push_str(if *v == 1 { "true" } else { "false" });
                Ok(())
            } else {
                write!(out, "{}", crate::bv::format_value(*v, e.ty))
            }
        }
        SsaKind::Name(n) => write!(out, "{}", n.display(prog)),
        SsaKind::Unary(op, a) => {
            out.push_str(match op {
                UnOp::Neg => "-",
                UnOp::Not => "!",
                UnOp::BitNot => "~",
            });
            write_operand(out, a, prog)
        }
        SsaKind::Binary(op, a, b) => {
            write_operand(out, a, prog)?;
            write!(out, " {} ", op.symbol())?;
            write_operand(out, b, prog)
        }
        SsaKind::Ite(c, a, b) => {
            write_operand(out, c, prog)?;
            out.push_str(" ? ");
            write_operand(out, a, prog)?;
            out.push_str(" : ");
            write_operand(out, b, prog)
        }
        SsaKind::Cast(a) => {
            write_operand(out, a, prog)?;
            write!(out, " as {}", e.ty)
        }
        SsaKind::Select(arr, i) => {
            write!(out, "{}[", arr.display(prog))?;
            write_expr(out, i, prog)?;
            out.push(']');
            Ok(())
        }
    }
}

// Smart constructors folding constants and trivial boolean identities.

pub fn mk_unary(op: UnOp, a: SsaExpr) -> SsaExpr {
    let ty = a.ty;
    if let Some(v) = a.as_const() {
        return SsaExpr::constant(eval_unary(op, v, ty), ty);
    }
    if op == UnOp::Not {
        if let SsaKind::Unary(UnOp::Not, inner) = a.kind {
            return *inner;
        }
    }
    SsaExpr {
        kind: SsaKind::Unary(op, Box::new(a)),
        ty,
    }
}

pub fn mk_not(a: SsaExpr) -> SsaExpr {
    mk_unary(UnOp::Not, a)
}

pub fn mk_binary(op: BinOp, a: SsaExpr, b: SsaExpr) -> SsaExpr {
    let operand_ty = a.ty;
    let ty = if op.is_comparison() {
        Ty::Bool
    } else {
        operand_ty
    };
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        return SsaExpr::constant(eval_binary(op, x, y, operand_ty), ty);
    }
    if operand_ty.is_bool() {
        match op {
            BinOp::And => {
                if a.is_false() || b.is_false() {
                    return SsaExpr::bool(false);
                }
                if a.is_true() {
                    return b;
                }
                if b.is_true() || a == b {
                    return a;
                }
            }
            BinOp::Or => {
                if a.is_true() || b.is_true() {
                    return SsaExpr::bool(true);
                }
                if a.is_false() {
                    return b;
                }
                if b.is_false() || a == b {
                    return a;
                }
            }
            _ => {}
        }
    }
    SsaExpr {
        kind: SsaKind::Binary(op, Box::new(a), Box::new(b)),
        ty,
    }
}

pub fn mk_and(a: SsaExpr, b: SsaExpr) -> SsaExpr {
    mk_binary(BinOp::And, a, b)
}

pub fn mk_ite(c: SsaExpr, a: SsaExpr, b: SsaExpr) -> SsaExpr {
    match c.as_const() {
        Some(1) => return a,
        Some(_) => return b,
        None => {}
    }
    if a == b {
        return a;
    }
    let ty = a.ty;
    if ty.is_bool() {
        if a.is_true() && b.is_false() {
            return c;
        }
        if a.is_false() && b.is_true() {
            return mk_not(c);
        }
    }
    SsaExpr {
        kind: SsaKind::Ite(Box::new(c), Box::new(a), Box::new(b)),
        ty,
    }
}

pub fn mk_cast(a: SsaExpr, to: Ty) -> SsaExpr {
    if a.ty == to {
        return a;
    }
    if let Some(v) = a.as_const() {
        return SsaExpr::constant(eval_cast(v, a.ty, to), to);
    }
    SsaExpr {
        kind: SsaKind::Cast(Box::new(a)),
        ty: to,
    }
}

/// Evaluate an expression given values for the names it reads. Array
/// selects consult `array` with the array name and index.
pub fn eval(
    e: &SsaExpr,
    scalar: &mut dyn FnMut(SsaName) -> Option<u64>,
    array: &mut dyn FnMut(SsaName, u64) -> Option<u64>,
) -> Option<u64> {
    Some(match &e.kind {
        SsaKind::Const(v) => *v,
        SsaKind::Name(n) => scalar(*n)? & e.ty.mask(),
        SsaKind::Unary(op, a) => eval_unary(*op, eval(a, scalar, array)?, e.ty),
        SsaKind::Binary(op, a, b) => {
            let x = eval(a, scalar, array)?;
            let y = eval(b, scalar, array)?;
            eval_binary(*op, x, y, a.ty)
        }
        SsaKind::Ite(c, a, b) => {
            if eval(c, scalar, array)? == 1 {
                eval(a, scalar, array)?
            } else {
                eval(b, scalar, array)?
            }
        }
        SsaKind::Cast(a) => eval_cast(eval(a, scalar, array)?, a.ty, e.ty),
        SsaKind::Select(arr, i) => {
            let idx = eval(i, scalar, array)?;
            array(*arr, idx)? & e.ty.mask()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u32) -> SsaExpr {
        SsaExpr::name(
            SsaName {
                base: Base::Cond(v),
                step: 0,
                version: 0,
            },
            Ty::Bool,
        )
    }

    #[test]
    fn folds_boolean_identities() {
        assert_eq!(mk_and(SsaExpr::bool(true), n(1)), n(1));
        assert!(mk_and(SsaExpr::bool(false), n(1)).is_false());
        assert_eq!(mk_not(mk_not(n(2))), n(2));
        assert_eq!(
            mk_ite(n(1), SsaExpr::bool(true), SsaExpr::bool(false)),
            n(1)
        );
    }

    #[test]
    fn folds_constants() {
        let u4 = Ty::unsigned(4);
        let e = mk_binary(
            BinOp::Add,
            SsaExpr::constant(7, u4),
            SsaExpr::constant(9, u4),
        );
        assert_eq!(e.as_const(), Some(0));
        let c = mk_binary(
            BinOp::Ne,
            SsaExpr::constant(1, u4),
            SsaExpr::constant(3, u4),
        );
        assert!(c.is_true());
    }
}
