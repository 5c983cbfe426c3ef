//! Tseitin gates with constant folding and structural hashing, and the
//! word-level circuits built from them. Bitvectors are LSB first.

use alloc::vec;
use alloc::vec::Vec;

use super::{BitVec, Encoder};
use crate::bv::{BinOp, Ty, UnOp};
use crate::sat::Lit;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(super) enum GateKind {
    And,
    Xor,
    Mux,
}

impl Encoder<'_> {
    pub fn true_lit(&self) -> Lit {
        self.t
    }

    pub fn false_lit(&self) -> Lit {
        !self.t
    }

    pub fn const_lit(&self, b: bool) -> Lit {
        if b {
            self.t
        } else {
            !self.t
        }
    }

    /// Constant value of a literal, if it is one of the reserved literals.
    pub fn lit_const(&self, l: Lit) -> Option<bool> {
        if l == self.t {
            Some(true)
        } else if l == !self.t {
            Some(false)
        } else {
            None
        }
    }

    pub fn const_bv(&self, v: u64, w: u32) -> BitVec {
        (0..w)
            .map(|i| self.const_lit(i < 64 && (v >> i) & 1 == 1))
            .collect()
    }

    pub fn bv_const_value(&self, a: &[Lit]) -> Option<u64> {
        let mut v = 0u64;
        for (i, &l) in a.iter().enumerate() {
            if self.lit_const(l)? {
                v |= 1 << i;
            }
        }
        Some(v)
    }

    pub fn fresh_lit(&mut self) -> Lit {
        self.solver.new_var().pos()
    }

    pub fn fresh_bv(&mut self, w: u32) -> BitVec {
        (0..w).map(|_| self.fresh_lit()).collect()
    }

    fn cached(&self, k: GateKind, a: Lit, b: Lit, c: Lit) -> Option<Lit> {
        self.gates.get(&(k, a.0, b.0, c.0)).copied()
    }

    fn remember(&mut self, k: GateKind, a: Lit, b: Lit, c: Lit, o: Lit) {
        self.gates.insert((k, a.0, b.0, c.0), o);
    }

    pub fn and2(&mut self, a: Lit, b: Lit) -> Lit {
        let (t, f) = (self.t, !self.t);
        if a == f || b == f || a == !b {
            return f;
        }
        if a == t || a == b {
            return b;
        }
        if b == t {
            return a;
        }
        let (a, b) = if a.0 < b.0 { (a, b) } else { (b, a) };
        if let Some(o) = self.cached(GateKind::And, a, b, t) {
            return o;
        }
        let o = self.fresh_lit();
        self.emit(&[!o, a]);
        self.emit(&[!o, b]);
        self.emit(&[o, !a, !b]);
        self.remember(GateKind::And, a, b, t, o);
        o
    }

    pub fn or2(&mut self, a: Lit, b: Lit) -> Lit {
        !self.and2(!a, !b)
    }

    pub fn xor2(&mut self, a: Lit, b: Lit) -> Lit {
        let t = self.t;
        match (self.lit_const(a), self.lit_const(b)) {
            (Some(x), _) => return if x { !b } else { b },
            (_, Some(y)) => return if y { !a } else { a },
            _ => {}
        }
        if a == b {
            return !t;
        }
        if a == !b {
            return t;
        }
        // normalise polarity so x ^ y, !x ^ y, ... share one gate
        let neg = a.is_negated() ^ b.is_negated();
        let (a, b) = (a.var().pos(), b.var().pos());
        let (a, b) = if a.0 < b.0 { (a, b) } else { (b, a) };
        let o = match self.cached(GateKind::Xor, a, b, t) {
            Some(o) => o,
            None => {
                let o = self.fresh_lit();
                self.emit(&[!o, a, b]);
                self.emit(&[!o, !a, !b]);
                self.emit(&[o, !a, b]);
                self.emit(&[o, a, !b]);
                self.remember(GateKind::Xor, a, b, t, o);
                o
            }
        };
        if neg {
            !o
        } else {
            o
        }
    }

    pub fn xnor2(&mut self, a: Lit, b: Lit) -> Lit {
        !self.xor2(a, b)
    }

    /// `s ? a : b`.
    pub fn mux(&mut self, s: Lit, a: Lit, b: Lit) -> Lit {
        match self.lit_const(s) {
            Some(true) => return a,
            Some(false) => return b,
            None => {}
        }
        if a == b {
            return a;
        }
        match (self.lit_const(a), self.lit_const(b)) {
            (Some(true), Some(false)) => return s,
            (Some(false), Some(true)) => return !s,
            (Some(true), _) => return self.or2(s, b),
            (Some(false), _) => return self.and2(!s, b),
            (_, Some(true)) => return self.or2(!s, a),
            (_, Some(false)) => return self.and2(s, a),
            _ => {}
        }
        if s == a {
            return self.or2(s, b);
        }
        if s == !a {
            return self.and2(!s, b);
        }
        if s == b {
            return self.and2(s, a);
        }
        if s == !b {
            return self.or2(!s, a);
        }
        if let Some(o) = self.cached(GateKind::Mux, s, a, b) {
            return o;
        }
        let o = self.fresh_lit();
        self.emit(&[!s, !a, o]);
        self.emit(&[!s, a, !o]);
        self.emit(&[s, !b, o]);
        self.emit(&[s, b, !o]);
        self.remember(GateKind::Mux, s, a, b, o);
        o
    }

    pub fn and_many(&mut self, lits: &[Lit]) -> Lit {
        let (t, f) = (self.t, !self.t);
        let mut ls: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            if l == f {
                return f;
            }
            if l != t {
                ls.push(l);
            }
        }
        ls.sort_unstable();
        ls.dedup();
        if ls.windows(2).any(|w| w[0] == !w[1]) {
            return f;
        }
        match ls.len() {
            0 => t,
            1 => ls[0],
            2 => self.and2(ls[0], ls[1]),
            _ => {
                let o = self.fresh_lit();
                let mut big = Vec::with_capacity(ls.len() + 1);
                big.push(o);
                for &l in &ls {
                    self.emit(&[!o, l]);
                    big.push(!l);
                }
                self.emit(&big);
                o
            }
        }
    }

    pub fn or_many(&mut self, lits: &[Lit]) -> Lit {
        let neg: Vec<Lit> = lits.iter().map(|&l| !l).collect();
        !self.and_many(&neg)
    }

    pub fn mux_bv(&mut self, s: Lit, a: &[Lit], b: &[Lit]) -> BitVec {
        a.iter().zip(b).map(|(&x, &y)| self.mux(s, x, y)).collect()
    }

    pub fn not_bv(&self, a: &[Lit]) -> BitVec {
        a.iter().map(|&l| !l).collect()
    }

    pub fn eq_bv(&mut self, a: &[Lit], b: &[Lit]) -> Lit {
        let bits: Vec<Lit> = a.iter().zip(b).map(|(&x, &y)| self.xnor2(x, y)).collect();
        self.and_many(&bits)
    }

    pub fn full_adder(&mut self, a: Lit, b: Lit, c: Lit) -> (Lit, Lit) {
        let ab = self.xor2(a, b);
        let sum = self.xor2(ab, c);
        let g = self.and2(a, b);
        let p = self.and2(ab, c);
        let carry = self.or2(g, p);
        (sum, carry)
    }

    /// Ripple-carry adder; returns the sum and the carry out.
    pub fn add_bv(&mut self, a: &[Lit], b: &[Lit], cin: Lit) -> (BitVec, Lit) {
        let mut c = cin;
        let mut out = Vec::with_capacity(a.len());
        for (&x, &y) in a.iter().zip(b) {
            let (s, c2) = self.full_adder(x, y, c);
            out.push(s);
            c = c2;
        }
        (out, c)
    }

    pub fn sub_bv(&mut self, a: &[Lit], b: &[Lit]) -> BitVec {
        let nb = self.not_bv(b);
        let t = self.t;
        self.add_bv(a, &nb, t).0
    }

    pub fn neg_bv(&mut self, a: &[Lit]) -> BitVec {
        let na = self.not_bv(a);
        let zero = self.const_bv(0, a.len() as u32);
        let t = self.t;
        self.add_bv(&na, &zero, t).0
    }

    /// Unsigned `a < b`: no carry out of `a + !b + 1`.
    pub fn ult_bv(&mut self, a: &[Lit], b: &[Lit]) -> Lit {
        let nb = self.not_bv(b);
        let t = self.t;
        let (_, c) = self.add_bv(a, &nb, t);
        !c
    }

    /// Signed `a < b`: unsigned comparison with the sign bits flipped.
    pub fn slt_bv(&mut self, a: &[Lit], b: &[Lit]) -> Lit {
        let mut a2 = a.to_vec();
        let mut b2 = b.to_vec();
        let w = a.len() - 1;
        a2[w] = !a2[w];
        b2[w] = !b2[w];
        self.ult_bv(&a2, &b2)
    }

    /// Barrel shifter. `arith` fills with the sign bit, `left` shifts towards
    /// the MSB. Amounts of at least the width give zero (or all sign bits).
    pub fn shift_bv(&mut self, a: &[Lit], amt: &[Lit], left: bool, arith: bool) -> BitVec {
        let w = a.len();
        let fill = if arith { a[w - 1] } else { !self.t };
        let mut cur = a.to_vec();
        let mut overflow = Vec::new();
        for (i, &s) in amt.iter().enumerate() {
            let sh = if i < 63 { 1usize << i } else { usize::MAX };
            if sh >= w {
                overflow.push(s);
                continue;
            }
            let shifted: BitVec = (0..w)
                .map(|j| {
                    if left {
                        if j >= sh {
                            cur[j - sh]
                        } else {
                            !self.t
                        }
                    } else if j + sh < w {
                        cur[j + sh]
                    } else {
                        fill
                    }
                })
                .collect();
            cur = self.mux_bv(s, &shifted, &cur);
        }
        if !overflow.is_empty() {
            let ov = self.or_many(&overflow);
            let fills = vec![fill; w];
            cur = self.mux_bv(ov, &fills, &cur);
        }
        cur
    }

    /// Shift-add multiplier, truncated to the operand width.
    pub fn mul_bv(&mut self, a: &[Lit], b: &[Lit]) -> BitVec {
        let w = a.len();
        let f = !self.t;
        let mut acc = vec![f; w];
        for i in 0..w {
            if self.lit_const(b[i]) == Some(false) {
                continue;
            }
            let pp: BitVec = (0..w)
                .map(|j| if j < i { f } else { self.and2(a[j - i], b[i]) })
                .collect();
            // the low i bits of the partial product are zero
            let (hi, _) = self.add_bv(&acc[i..], &pp[i..], f);
            acc[i..].copy_from_slice(&hi);
        }
        acc
    }

    /// Restoring division. Division by zero yields all ones and remainder `a`.
    pub fn udivrem_bv(&mut self, a: &[Lit], b: &[Lit]) -> (BitVec, BitVec) {
        let w = a.len();
        let f = !self.t;
        let t = self.t;
        let mut rem = vec![f; w + 1];
        let mut b_ext = b.to_vec();
        b_ext.push(f);
        let nb = self.not_bv(&b_ext);
        let mut q = vec![f; w];
        for i in (0..w).rev() {
            let mut shifted = Vec::with_capacity(w + 1);
            shifted.push(a[i]);
            shifted.extend_from_slice(&rem[..w]);
            let (diff, carry) = self.add_bv(&shifted, &nb, t);
            q[i] = carry;
            rem = self.mux_bv(carry, &diff, &shifted);
        }
        rem.truncate(w);
        (q, rem)
    }

    pub fn abs_bv(&mut self, a: &[Lit]) -> BitVec {
        let n = self.neg_bv(a);
        let s = a[a.len() - 1];
        self.mux_bv(s, &n, a)
    }

    /// Signed division truncating towards zero; `x / 0 == -1`, `x % 0 == x`.
    pub fn sdivrem_bv(&mut self, a: &[Lit], b: &[Lit]) -> (BitVec, BitVec) {
        let w = a.len();
        let (sa, sb) = (a[w - 1], b[w - 1]);
        let ua = self.abs_bv(a);
        let ub = self.abs_bv(b);
        let (q, r) = self.udivrem_bv(&ua, &ub);
        let nq = self.neg_bv(&q);
        let sq = self.xor2(sa, sb);
        let q = self.mux_bv(sq, &nq, &q);
        let nr = self.neg_bv(&r);
        let r = self.mux_bv(sa, &nr, &r);
        let zero = self.const_bv(0, w as u32);
        let bz = self.eq_bv(b, &zero);
        let ones = self.const_bv(u64::MAX, w as u32);
        let q = self.mux_bv(bz, &ones, &q);
        (q, r)
    }

    pub fn cast_bv(&mut self, a: &[Lit], from: Ty, to: Ty) -> BitVec {
        let tw = to.width() as usize;
        let fill = if from.is_signed() {
            a[a.len() - 1]
        } else {
            !self.t
        };
        (0..tw)
            .map(|i| if i < a.len() { a[i] } else { fill })
            .collect()
    }

    pub fn unary_bv(&mut self, op: UnOp, a: &[Lit]) -> BitVec {
        match op {
            UnOp::Neg => self.neg_bv(a),
            UnOp::Not | UnOp::BitNot => self.not_bv(a),
        }
    }

    /// Exact circuit for a binary operator whose operands have type `ty`.
    pub fn binary_bv(&mut self, op: BinOp, a: &[Lit], b: &[Lit], ty: Ty) -> BitVec {
        let signed = ty.is_signed();
        match op {
            BinOp::Add => {
                let f = !self.t;
                self.add_bv(a, b, f).0
            }
            BinOp::Sub => self.sub_bv(a, b),
            BinOp::Mul => self.mul_bv(a, b),
            BinOp::Div | BinOp::Rem => {
                let (q, r) = if signed {
                    self.sdivrem_bv(a, b)
                } else {
                    self.udivrem_bv(a, b)
                };
                if op == BinOp::Div {
                    q
                } else {
                    r
                }
            }
            BinOp::And => a.iter().zip(b).map(|(&x, &y)| self.and2(x, y)).collect(),
            BinOp::Or => a.iter().zip(b).map(|(&x, &y)| self.or2(x, y)).collect(),
            BinOp::Xor => a.iter().zip(b).map(|(&x, &y)| self.xor2(x, y)).collect(),
            BinOp::Shl => self.shift_bv(a, b, true, false),
            BinOp::Shr => self.shift_bv(a, b, false, signed),
            BinOp::Eq => vec![self.eq_bv(a, b)],
            BinOp::Ne => vec![!self.eq_bv(a, b)],
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                let (x, y, negate) = match op {
                    BinOp::Lt => (a, b, false),
                    BinOp::Ge => (a, b, true),
                    BinOp::Gt => (b, a, false),
                    _ => (b, a, true),
                };
                let lt = if signed {
                    self.slt_bv(x, y)
                } else {
                    self.ult_bv(x, y)
                };
                vec![if negate { !lt } else { lt }]
            }
        }
    }
}
