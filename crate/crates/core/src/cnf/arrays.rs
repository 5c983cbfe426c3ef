//! Arrays as terms over free bases. Reads are resolved through stores and
//! merges down to the base, where each distinct read index gets fresh value
//! literals. Reads of the same base at equal indices must agree; these
//! constraints are added eagerly, or lazily when the model violates them.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{BitVec, Encoder};
use crate::bv::Ty;
use crate::sat::Lit;
use crate::symex::SsaName;

pub(super) enum ArrTerm {
    Base {
        ty: Ty,
        reads: Vec<(BitVec, BitVec)>,
        lemmas: BTreeSet<(usize, usize)>,
    },
    Broadcast(BitVec),
    Store {
        prev: usize,
        idx: BitVec,
        inb: Lit,
        val: BitVec,
    },
    Ite(Lit, usize, usize),
}

/// Bits needed to address `len` elements.
pub(super) fn index_bits(len: u32) -> usize {
    let hi = len.saturating_sub(1);
    core::cmp::max(1, (32 - hi.leading_zeros()) as usize)
}

impl Encoder<'_> {
    pub(super) fn new_term(&mut self, t: ArrTerm) -> usize {
        self.terms.push(t);
        self.terms.len() - 1
    }

    /// Term of an array name; names without a definition become free bases.
    pub(super) fn array_term(&mut self, n: SsaName) -> usize {
        if let Some(&id) = self.arrays.get(&n) {
            return id;
        }
        let (ty, len) = self.shape(n);
        debug_assert!(len.is_some(), "scalar name used as array");
        let id = self.new_term(ArrTerm::Base {
            ty,
            reads: Vec::new(),
            lemmas: BTreeSet::new(),
        });
        self.arrays.insert(n, id);
        id
    }

    /// Index narrowed to the address width, and whether it is in bounds.
    pub(super) fn truncate_index(&mut self, idx: &[Lit], len: u32) -> (BitVec, Lit) {
        let iw = index_bits(len);
        let w = idx.len();
        let all_in = w < 64 && (len as u64) > crate::bv::mask(w as u32);
        let inb = if all_in {
            self.t
        } else {
            let bound = self.const_bv(len as u64, w as u32);
            self.ult_bv(idx, &bound)
        };
        let f = !self.t;
        let ti = (0..iw).map(|i| if i < w { idx[i] } else { f }).collect();
        (ti, inb)
    }

    /// Encode `arr[idx]`; out-of-bounds reads are zero.
    pub(super) fn select(&mut self, arr: SsaName, idx: &[Lit]) -> BitVec {
        let len = self.shape(arr).1.expect("select on a scalar");
        let term = self.array_term(arr);
        let (ti, inb) = self.truncate_index(idx, len);
        let v = self.read(term, &ti);
        v.into_iter().map(|l| self.and2(l, inb)).collect()
    }

    fn read(&mut self, term: usize, ti: &[Lit]) -> BitVec {
        let key = (term, ti.to_vec());
        if let Some(v) = self.read_memo.get(&key) {
            return v.clone();
        }
        let v = match &self.terms[term] {
            ArrTerm::Broadcast(v) => v.clone(),
            ArrTerm::Store {
                prev,
                idx,
                inb,
                val,
            } => {
                let (prev, idx, inb, val) = (*prev, idx.clone(), *inb, val.clone());
                let same = self.eq_bv(ti, &idx);
                let hit = self.and2(inb, same);
                let old = self.read(prev, ti);
                self.mux_bv(hit, &val, &old)
            }
            ArrTerm::Ite(c, a, b) => {
                let (c, a, b) = (*c, *a, *b);
                let x = self.read(a, ti);
                let y = self.read(b, ti);
                self.mux_bv(c, &x, &y)
            }
            ArrTerm::Base { ty, .. } => {
                let w = ty.width();
                let v = self.fresh_bv(w);
                let eager = !self.opts.lazy_arrays;
                let earlier = match &mut self.terms[term] {
                    ArrTerm::Base { reads, .. } => {
                        reads.push((ti.to_vec(), v.clone()));
                        if eager {
                            reads[..reads.len() - 1].to_vec()
                        } else {
                            Vec::new()
                        }
                    }
                    _ => unreachable!(),
                };
                for (tj, vj) in earlier {
                    self.read_lemma(ti, &v, &tj, &vj);
                }
                v
            }
        };
        self.read_memo.insert(key, v.clone());
        v
    }

    /// `ti == tj → vi == vj`.
    fn read_lemma(&mut self, ti: &[Lit], vi: &[Lit], tj: &[Lit], vj: &[Lit]) {
        let e = self.eq_bv(ti, tj);
        if self.lit_const(e) == Some(false) {
            return;
        }
        for (&a, &b) in vi.iter().zip(vj) {
            self.emit(&[!e, !a, b]);
            self.emit(&[!e, a, !b]);
        }
    }

    /// Add one violated read-consistency constraint per base array under the
    /// current model. Returns how many were added.
    pub fn refine_arrays(&mut self) -> usize {
        let mut added = 0;
        for term in 0..self.terms.len() {
            let ArrTerm::Base { reads, lemmas, .. } = &self.terms[term] else {
                continue;
            };
            let mut found = None;
            'outer: for i in 0..reads.len() {
                for j in 0..i {
                    if lemmas.contains(&(j, i)) {
                        continue;
                    }
                    let (ti, vi) = &reads[i];
                    let (tj, vj) = &reads[j];
                    if self.model_bv(ti) == self.model_bv(tj)
                        && self.model_bv(vi) != self.model_bv(vj)
                    {
                        found = Some((j, i, ti.clone(), vi.clone(), tj.clone(), vj.clone()));
                        break 'outer;
                    }
                }
            }
            if let Some((j, i, ti, vi, tj, vj)) = found {
                if let ArrTerm::Base { lemmas, .. } = &mut self.terms[term] {
                    lemmas.insert((j, i));
                }
                self.read_lemma(&ti, &vi, &tj, &vj);
                added += 1;
            }
        }
        self.stats.array_lemmas += added as u64;
        added
    }

    /// Model values of the elements of an array name. Elements of free bases
    /// that were never read are 0.
    pub fn model_array(&self, n: SsaName) -> Option<Vec<u64>> {
        let len = self.shape(n).1?;
        let &term = self.arrays.get(&n)?;
        Some(
            (0..len)
                .map(|i| self.model_element(term, i as u64))
                .collect(),
        )
    }

    fn model_element(&self, term: usize, i: u64) -> u64 {
        match &self.terms[term] {
            ArrTerm::Base { reads, .. } => reads
                .iter()
                .find(|(ti, _)| self.model_bv(ti) == i)
                .map(|(_, v)| self.model_bv(v))
                .unwrap_or(0),
            ArrTerm::Broadcast(v) => self.model_bv(v),
            ArrTerm::Store {
                prev,
                idx,
                inb,
                val,
            } => {
                if self.solver.model_value(*inb) == Some(true) && self.model_bv(idx) == i {
                    self.model_bv(val)
                } else {
                    self.model_element(*prev, i)
                }
            }
            ArrTerm::Ite(c, a, b) => {
                if self.solver.model_value(*c) == Some(true) {
                    self.model_element(*a, i)
                } else {
                    self.model_element(*b, i)
                }
            }
        }
    }
}
