//! Concrete two's-complement semantics shared by the interpreter, constant
//! propagation and the refinement model checks.
//!
//! Values are carried as `u64` bit patterns masked to the type width.
//! Division is total: `x / 0` is all ones (unsigned) or -1 (signed) and
//! `x % 0 == x`.

use core::fmt;

/// Scalar type: a boolean or a bitvector of width 1..=64.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Ty {
    Bool,
    Bv { width: u8, signed: bool },
}

impl Ty {
    pub const fn unsigned(width: u8) -> Ty {
        Ty::Bv {
            width,
            signed: false,
        }
    }

    pub const fn signed(width: u8) -> Ty {
        Ty::Bv {
            width,
            signed: true,
        }
    }

    /// Number of bits in the bit-level encoding.
    pub fn width(self) -> u32 {
        match self {
            Ty::Bool => 1,
            Ty::Bv { width, .. } => width as u32,
        }
    }

    pub fn is_signed(self) -> bool {
        matches!(self, Ty::Bv { signed: true, .. })
    }

    pub fn is_bool(self) -> bool {
        matches!(self, Ty::Bool)
    }

    pub fn mask(self) -> u64 {
        mask(self.width())
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Bool => write!(f, "bool"),
            Ty::Bv { width, signed } => write!(f, "{}{}", if *signed { 'i' } else { 'u' }, width),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum UnOp {
    /// Arithmetic negation.
    Neg,
    /// Boolean negation.
    Not,
    /// Bitwise complement.
    BitNot,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    And,
    Or,
    Xor,
    Shl,
    Shr,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl BinOp {
    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }

    pub fn is_refinable(self) -> bool {
        matches!(self, BinOp::Mul | BinOp::Div | BinOp::Rem)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Xor => "^",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
        }
    }

    pub const ALL: [BinOp; 16] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Rem,
        BinOp::And,
        BinOp::Or,
        BinOp::Xor,
        BinOp::Shl,
        BinOp::Shr,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
    ];
}

#[inline]
pub fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Interpret a bit pattern of the given width as a signed integer.
#[inline]
pub fn to_signed(v: u64, width: u32) -> i64 {
    if width >= 64 {
        v as i64
    } else {
        let shift = 64 - width;
        ((v << shift) as i64) >> shift
    }
}

pub fn eval_unary(op: UnOp, v: u64, ty: Ty) -> u64 {
    let m = ty.mask();
    match op {
        UnOp::Neg => v.wrapping_neg() & m,
        UnOp::Not => (v ^ 1) & 1,
        UnOp::BitNot => !v & m,
    }
}

/// Evaluate a binary operator whose operands have type `ty`. Comparison
/// results are 0 or 1.
pub fn eval_binary(op: BinOp, a: u64, b: u64, ty: Ty) -> u64 {
    let w = ty.width();
    let m = mask(w);
    let (a, b) = (a & m, b & m);
    let signed = ty.is_signed();
    match op {
        BinOp::Add => a.wrapping_add(b) & m,
        BinOp::Sub => a.wrapping_sub(b) & m,
        BinOp::Mul => a.wrapping_mul(b) & m,
        BinOp::Div => {
            if b == 0 {
                m
            } else if signed {
                let (sa, sb) = (to_signed(a, w), to_signed(b, w));
                (sa.wrapping_div(sb) as u64) & m
            } else {
                a / b
            }
        }
        BinOp::Rem => {
            if b == 0 {
                a
            } else if signed {
                let (sa, sb) = (to_signed(a, w), to_signed(b, w));
                (sa.wrapping_rem(sb) as u64) & m
            } else {
                a % b
            }
        }
        BinOp::And => a & b,
        BinOp::Or => a | b,
        BinOp::Xor => a ^ b,
        BinOp::Shl => {
            if b >= w as u64 {
                0
            } else {
                (a << b) & m
            }
        }
        BinOp::Shr => {
            if signed {
                let sa = to_signed(a, w);
                let sh = if b >= w as u64 { 63 } else { b as u32 };
                ((sa >> sh) as u64) & m
            } else if b >= w as u64 {
                0
            } else {
                a >> b
            }
        }
        BinOp::Eq => (a == b) as u64,
        BinOp::Ne => (a != b) as u64,
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            let ord = if signed {
                to_signed(a, w).cmp(&to_signed(b, w))
            } else {
                a.cmp(&b)
            };
            let r = match op {
                BinOp::Lt => ord.is_lt(),
                BinOp::Le => ord.is_le(),
                BinOp::Gt => ord.is_gt(),
                _ => ord.is_ge(),
            };
            r as u64
        }
    }
}

/// Truncate or extend (sign-extend if `from` is signed) between bitvector types.
pub fn eval_cast(v: u64, from: Ty, to: Ty) -> u64 {
    let fw = from.width();
    let ext = if from.is_signed() {
        to_signed(v, fw) as u64
    } else {
        v & mask(fw)
    };
    ext & to.mask()
}

/// Render a value of the given type for traces.
pub fn format_value(v: u64, ty: Ty) -> alloc::string::String {
    use alloc::string::ToString;
    match ty {
        Ty::Bool => (if v & 1 == 1 { "true" } else { "false" }).to_string(),
        Ty::Bv {
            width,
            signed: true,
        } => to_signed(v, width as u32).to_string(),
        Ty::Bv { .. } => v.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_by_zero_is_total() {
        let u4 = Ty::unsigned(4);
        for x in 0..16 {
            assert_eq!(eval_binary(BinOp::Div, x, 0, u4), 15);
            assert_eq!(eval_binary(BinOp::Rem, x, 0, u4), x);
        }
        let i4 = Ty::signed(4);
        assert_eq!(eval_binary(BinOp::Div, 0b1001, 0, i4), 0b1111);
        assert_eq!(eval_binary(BinOp::Rem, 0b1001, 0, i4), 0b1001);
    }

    #[test]
    fn signed_overflow_wraps() {
        let i8t = Ty::signed(8);
        assert_eq!(eval_binary(BinOp::Div, 0x80, 0xff, i8t), 0x80);
        assert_eq!(eval_binary(BinOp::Rem, 0x80, 0xff, i8t), 0);
        assert_eq!(eval_binary(BinOp::Add, 0x7f, 1, i8t), 0x80);
    }

    #[test]
    fn wraparound_add() {
        assert_eq!(eval_binary(BinOp::Add, 7, 9, Ty::unsigned(4)), 0);
    }

    #[test]
    fn arithmetic_shift_fills_sign() {
        let i4 = Ty::signed(4);
        assert_eq!(eval_binary(BinOp::Shr, 0b1000, 2, i4), 0b1110);
        assert_eq!(eval_binary(BinOp::Shr, 0b1000, 9, i4), 0b1111);
        assert_eq!(eval_binary(BinOp::Shr, 0b1000, 9, Ty::unsigned(4)), 0);
    }

    #[test]
    fn casts_extend_by_source_sign() {
        assert_eq!(eval_cast(0xf, Ty::signed(4), Ty::unsigned(8)), 0xff);
        assert_eq!(eval_cast(0xf, Ty::unsigned(4), Ty::unsigned(8)), 0x0f);
        assert_eq!(eval_cast(0x1ff, Ty::unsigned(16), Ty::unsigned(8)), 0xff);
    }
}
