use std::collections::HashMap;
use std::hash::Hash;

use super::{encode_block, EncodedProfile, ProbeTree};
use crate::error::{Error, Result};
use crate::profile::{max_dimension_bound, Profile};

/// Streaming profile encoder: one tree update per consumed symbol.
///
/// The tree maps multiplicity to prevalence and always equals the profile
/// of the prefix consumed so far. `S` is the symbol type used by
/// [`feed_symbol`](Self::feed_symbol); callers that track multiplicities
/// themselves use [`update`](Self::update) directly.
#[derive(Debug, Clone)]
pub struct SeqEncoderState<S = u64> {
    tree: ProbeTree,
    symbol_counts: HashMap<S, u64>,
    t: u64,
}

impl<S> Default for SeqEncoderState<S> {
    fn default() -> Self {
        SeqEncoderState {
            tree: ProbeTree::new(),
            symbol_counts: HashMap::new(),
            t: 0,
        }
    }
}

impl<S: Hash + Eq> SeqEncoderState<S> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Symbols consumed so far.
    pub fn consumed(&self) -> u64 {
        self.t
    }

    pub fn tree(&self) -> &ProbeTree {
        &self.tree
    }

    /// Node probes spent on tree operations so far.
    pub fn probes(&self) -> u64 {
        self.tree.probes()
    }

    /// Consumes one symbol whose multiplicity in the prefix is `mu`.
    pub fn update(&mut self, mu: u64) -> Result<()> {
        if mu > self.t {
            return Err(Error::TreeState(format!(
                "multiplicity {mu} exceeds the {} symbols consumed",
                self.t
            )));
        }
        if mu > 0 && self.tree.contains(mu) {
            self.tree.increment(mu + 1);
            self.tree.decrement(mu);
        } else if mu > 0 {
            return Err(Error::TreeState(format!(
                "no symbol currently has multiplicity {mu}"
            )));
        } else {
            self.tree.increment(1);
        }
        self.t += 1;
        let bound = max_dimension_bound(self.t, None);
        assert!(
            self.tree.len() as u64 <= bound,
            "tree holds {} pairs after {} symbols (bound {bound})",
            self.tree.len(),
            self.t
        );
        Ok(())
    }

    /// Looks up the symbol's running count, then calls [`update`](Self::update).
    pub fn feed_symbol(&mut self, symbol: S) {
        let count = self.symbol_counts.entry(symbol).or_insert(0);
        let mu = *count;
        *count += 1;
        self.update(mu)
            .expect("symbol counts and tree are updated together");
    }

    /// Profile of everything consumed (in-order traversal).
    pub fn profile(&self) -> Profile {
        Profile::from_pairs(self.t, self.tree.to_vec()).expect("tree holds a valid profile")
    }

    pub fn finalize(self) -> (Profile, EncodedProfile) {
        let p = self.profile();
        let e = encode_block(&p);
        (p, e)
    }
}
