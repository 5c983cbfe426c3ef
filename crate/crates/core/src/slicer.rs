//! Monotone cone-of-influence slicing over guarded equations.
//!
//! The kept set only ever grows. Each increment is the set of equations newly
//! reachable backwards (over read-sets) from the roots seen so far; this
//! includes equations of old frames that become relevant only because a new
//! root reads them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::symex::{EqId, Equation, SsaName, TimeframeFormula};

#[derive(Clone, Debug)]
pub struct SliceState {
    enabled: bool,
    kept: BTreeSet<EqId>,
    /// Defining equation of every name seen so far.
    defs: BTreeMap<SsaName, EqId>,
    /// Read-sets of equations not yet kept.
    pending: BTreeMap<EqId, Vec<SsaName>>,
    seen_frames: usize,
    generated: usize,
}

impl SliceState {
    /// With `enabled == false` every equation is kept as soon as it is seen.
    pub fn new(enabled: bool) -> SliceState {
        SliceState {
            enabled,
            kept: BTreeSet::new(),
            defs: BTreeMap::new(),
            pending: BTreeMap::new(),
            seen_frames: 0,
            generated: 0,
        }
    }

    pub fn kept(&self) -> &BTreeSet<EqId> {
        &self.kept
    }

    /// Number of equations seen.
    pub fn generated(&self) -> usize {
        self.generated
    }

    /// Number of frames consumed so far.
    pub fn seen_frames(&self) -> usize {
        self.seen_frames
    }

    fn register(&mut self, eq: &Equation) {
        self.generated += 1;
        self.defs.insert(eq.lhs, eq.id);
        self.pending.insert(eq.id, eq.reads.clone());
    }

    /// Consume `new_frames` and the `roots` (names of new property atoms and
    /// assumptions) and return the newly kept equation ids in ascending order.
    pub fn slice_increment(
        &mut self,
        new_frames: &[TimeframeFormula],
        roots: &[SsaName],
    ) -> Vec<EqId> {
        let before = self.kept.len();
        self.seen_frames += new_frames.len();
        if !self.enabled {
            let mut out = Vec::new();
            for f in new_frames {
                for eq in &f.equations {
                    self.generated += 1;
                    self.kept.insert(eq.id);
                    out.push(eq.id);
                }
            }
            return out;
        }
        for f in new_frames {
            for eq in &f.equations {
                self.register(eq);
            }
        }
        let mut out = Vec::new();
        let mut work: Vec<SsaName> = roots.to_vec();
        while let Some(n) = work.pop() {
            let Some(&id) = self.defs.get(&n) else {
                continue;
            };
            if let Some(reads) = self.pending.remove(&id) {
                self.kept.insert(id);
                out.push(id);
                work.extend(reads);
            }
        }
        out.sort_unstable();
        debug_assert!(self.kept.len() >= before);
        out
    }
}

/// Backward slice of `frames` from `roots`, computed from scratch.
pub fn full_slice(frames: &[TimeframeFormula], roots: &[SsaName]) -> BTreeSet<EqId> {
    let mut defs: BTreeMap<SsaName, &Equation> = BTreeMap::new();
    for f in frames {
        for eq in &f.equations {
            defs.insert(eq.lhs, eq);
        }
    }
    let mut kept = BTreeSet::new();
    let mut work: Vec<SsaName> = roots.to_vec();
    while let Some(n) = work.pop() {
        if let Some(eq) = defs.get(&n) {
            if kept.insert(eq.id) {
                work.extend(eq.reads.iter().copied());
            }
        }
    }
    kept
}
