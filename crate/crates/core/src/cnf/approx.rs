//! Approximate encodings of `*`, `/` and `%` for bitvector refinement.
//!
//! An occurrence starts as an over-approximation at `b0 = max(4, w/4)` bits:
//! only the low `b` bits of the result are constrained. The constraint is
//! guarded by an activation literal. When a model disagrees with the exact
//! operator on some occurrence, the guard is retired and `b` doubles; at the
//! full width the exact circuit is added permanently.

use alloc::vec::Vec;

use super::{ActStatus, BitVec, Encoder};
use crate::bv::{eval_binary, BinOp, Ty};
use crate::sat::Lit;
use crate::symex::EqId;

/// Which operator occurrence: the equation and its position within it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ApproxTag {
    pub eq: EqId,
    pub node: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApproxMode {
    /// Only the low `b` result bits are constrained.
    Over(u32),
    /// Operands are restricted to their low `b` bits (sign- or
    /// zero-extended); the result is exact for those operands.
    Under(u32),
}

pub(super) struct Approx {
    op: BinOp,
    ty: Ty,
    a: BitVec,
    b: BitVec,
    r: BitVec,
    bits: u32,
    beta: Option<Lit>,
    tag: ApproxTag,
    full: Option<BitVec>,
}

/// Starting precision for a width.
pub fn initial_bits(w: u32) -> u32 {
    core::cmp::max(4, w / 4)
}

impl Encoder<'_> {
    pub(super) fn approximate(
        &mut self,
        tag: ApproxTag,
        op: BinOp,
        ty: Ty,
        a: &[Lit],
        b: &[Lit],
    ) -> BitVec {
        let w = ty.width();
        let b0 = initial_bits(w);
        if b0 >= w {
            return self.binary_bv(op, a, b, ty);
        }
        let r = self.fresh_bv(w);
        self.approx.push(Approx {
            op,
            ty,
            a: a.to_vec(),
            b: b.to_vec(),
            r: r.clone(),
            bits: 0,
            beta: None,
            tag,
            full: None,
        });
        self.stats.approximations += 1;
        self.set_precision(self.approx.len() - 1, b0);
        r
    }

    fn tie(&mut self, guard: Option<Lit>, x: Lit, y: Lit) {
        match guard {
            Some(g) => {
                self.emit(&[g, !x, y]);
                self.emit(&[g, x, !y]);
                *self.guarded.entry(g).or_insert(0) += 2;
            }
            None => {
                self.emit(&[!x, y]);
                self.emit(&[x, !y]);
            }
        }
    }

    fn full_circuit(&mut self, ix: usize) -> BitVec {
        if let Some(f) = &self.approx[ix].full {
            return f.clone();
        }
        let (op, ty) = (self.approx[ix].op, self.approx[ix].ty);
        let (a, b) = (self.approx[ix].a.clone(), self.approx[ix].b.clone());
        let f = self.binary_bv(op, &a, &b, ty);
        self.approx[ix].full = Some(f.clone());
        f
    }

    fn set_precision(&mut self, ix: usize, bits: u32) {
        if let Some(old) = self.approx[ix].beta.take() {
            self.retire(old);
        }
        let w = self.approx[ix].ty.width();
        let r = self.approx[ix].r.clone();
        if bits >= w {
            let f = self.full_circuit(ix);
            for i in 0..w as usize {
                self.tie(None, r[i], f[i]);
            }
            self.approx[ix].bits = w;
            return;
        }
        let beta = self.new_activation();
        let op = self.approx[ix].op;
        let k = bits as usize;
        let low = if op == BinOp::Mul {
            let (a, b) = (self.approx[ix].a.clone(), self.approx[ix].b.clone());
            self.mul_bv(&a[..k], &b[..k])
        } else {
            let f = self.full_circuit(ix);
            f[..k].to_vec()
        };
        for i in 0..k {
            self.tie(Some(beta), r[i], low[i]);
        }
        self.approx[ix].bits = bits;
        self.approx[ix].beta = Some(beta);
        let tag = self.approx[ix].tag;
        self.ledger
            .beta
            .push((tag, ApproxMode::Over(bits), beta, ActStatus::Live));
    }

    /// Encode `op` on fresh result literals under an approximation, guarded
    /// by a fresh activation literal. Returns the result and the literal; the
    /// constraints hold while its negation is assumed.
    pub fn encode_approx(
        &mut self,
        tag: ApproxTag,
        op: BinOp,
        ty: Ty,
        a: &[Lit],
        b: &[Lit],
        mode: ApproxMode,
    ) -> (BitVec, Lit) {
        let w = ty.width() as usize;
        let r = self.fresh_bv(w as u32);
        let beta = self.new_activation();
        match mode {
            ApproxMode::Over(k) => {
                let k = core::cmp::min(k as usize, w);
                let low = if op == BinOp::Mul {
                    self.mul_bv(&a[..k], &b[..k])
                } else {
                    self.binary_bv(op, a, b, ty)[..k].to_vec()
                };
                for i in 0..k {
                    self.tie(Some(beta), r[i], low[i]);
                }
            }
            ApproxMode::Under(k) => {
                let k = core::cmp::max(1, core::cmp::min(k as usize, w));
                let x = self.restrict(a, k, ty.is_signed(), beta);
                let y = self.restrict(b, k, ty.is_signed(), beta);
                let out = self.binary_bv(op, &x, &y, ty);
                for i in 0..w {
                    self.tie(Some(beta), r[i], out[i]);
                }
            }
        }
        self.ledger.beta.push((tag, mode, beta, ActStatus::Live));
        (r, beta)
    }

    /// Operand extended from its low `k` bits; under `¬beta` the operand's
    /// high bits are forced to equal the extension.
    fn restrict(&mut self, a: &[Lit], k: usize, signed: bool, beta: Lit) -> BitVec {
        let fill = if signed { a[k - 1] } else { !self.t };
        let ext: BitVec = (0..a.len())
            .map(|i| if i < k { a[i] } else { fill })
            .collect();
        for i in k..a.len() {
            self.tie(Some(beta), a[i], fill);
        }
        ext
    }

    /// Check live approximations against the model and raise the precision
    /// of every occurrence whose result is wrong. Returns how many.
    pub fn refine_bitvectors(&mut self) -> usize {
        let mut wrong = Vec::new();
        for (ix, ap) in self.approx.iter().enumerate() {
            if ap.bits >= ap.ty.width() {
                continue;
            }
            let x = self.model_bv(&ap.a);
            let y = self.model_bv(&ap.b);
            let r = self.model_bv(&ap.r);
            if eval_binary(ap.op, x, y, ap.ty) != r {
                wrong.push(ix);
            }
        }
        for &ix in &wrong {
            let bits = self.approx[ix].bits * 2;
            self.set_precision(ix, bits);
        }
        self.stats.refinements += wrong.len() as u64;
        wrong.len()
    }

    /// Occurrences still below full precision.
    pub fn live_approximations(&self) -> usize {
        self.approx.iter().filter(|a| a.bits < a.ty.width()).count()
    }
}
