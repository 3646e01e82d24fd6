//! Leveled automata for block languages.
//!
//! States are partitioned into ranks `ℓ, …, 0`: the initial state is the only
//! state of rank `ℓ`, the final state the only state of rank 0, and every
//! transition lowers the rank by exactly one. In a [`RankedDfa`] a missing
//! transition goes to the dead state `Ω`, which is implicit in memory and only
//! materialized when the automaton is written out.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::record::{validate, AutomatonRecord, StateRecord};
use crate::bitmap::{checked_block_size, BlockLanguage, Symbol};
use crate::bits::BitVec;
use crate::error::{Error, Result};

pub type StateId = usize;

/// Number of states per rank, listed from rank `ℓ` down to rank 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WidthProfile {
    pub widths: Vec<usize>,
    pub has_dead: bool,
}

impl WidthProfile {
    pub fn ell(&self) -> usize {
        self.widths.len() - 1
    }

    /// Width of rank `i`.
    pub fn at_rank(&self, i: usize) -> usize {
        self.widths[self.ell() - i]
    }

    /// Ranked states plus the dead state when it is reachable.
    pub fn total(&self) -> usize {
        self.widths.iter().sum::<usize>() + usize::from(self.has_dead)
    }

    /// Largest width over all ranks.
    pub fn max_width(&self) -> usize {
        self.widths.iter().copied().max().unwrap_or(0)
    }
}

/// Behaviour shared by ranked DFAs and NFAs.
pub trait RankedAutomaton {
    fn k(&self) -> usize;
    fn ell(&self) -> usize;
    /// The accepted words as a bitmap.
    fn language(&self) -> Result<BlockLanguage>;
    fn to_record(&self) -> AutomatonRecord;
    fn width_profile(&self) -> WidthProfile;

    /// Re-runs the structural validator on the serialized form.
    fn validate(&self) -> Result<WidthProfile> {
        validate(&self.to_record())
    }
}

/// `true` iff both automata accept the same words.
pub fn equivalent<A, B>(a: &A, b: &B) -> Result<bool>
where
    A: RankedAutomaton + ?Sized,
    B: RankedAutomaton + ?Sized,
{
    if a.k() != b.k() {
        return Err(Error::LengthMismatch(format!(
            "alphabet sizes {} and {}",
            a.k(),
            b.k()
        )));
    }
    if a.ell() != b.ell() {
        // both are trim, hence nonempty, and their words have different lengths
        return Ok(false);
    }
    Ok(a.language()? == b.language()?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedDfa {
    k: usize,
    ell: usize,
    rank: Vec<usize>,
    initial: StateId,
    final_state: StateId,
    /// `delta[q * k + σ]`; `None` is the dead state.
    delta: Vec<Option<StateId>>,
}

impl RankedDfa {
    /// Builds a DFA from parts, dropping every state that is unreachable or
    /// cannot reach the final state.
    pub(crate) fn build_trimmed(
        k: usize,
        ell: usize,
        rank: Vec<usize>,
        initial: StateId,
        final_state: StateId,
        delta: Vec<Option<StateId>>,
    ) -> Result<Self> {
        let n = rank.len();
        debug_assert_eq!(delta.len(), n * k);
        // productive states, computed from rank 0 upward
        let mut order: Vec<StateId> = (0..n).collect();
        order.sort_by_key(|&q| rank[q]);
        let mut productive = vec![false; n];
        productive[final_state] = true;
        for &q in &order {
            if q == final_state {
                continue;
            }
            productive[q] = (0..k).any(|s| delta[q * k + s].is_some_and(|p| productive[p]));
        }
        if !productive[initial] {
            return Err(Error::EmptyLanguage);
        }
        let delta: Vec<Option<StateId>> = delta
            .into_iter()
            .map(|t| t.filter(|&p| productive[p]))
            .collect();
        let raw = RankedDfa {
            k,
            ell,
            rank,
            initial,
            final_state,
            delta,
        };
        Ok(raw.canonical())
    }

    pub fn try_from_record(record: &AutomatonRecord) -> Result<Self> {
        validate(record)?;
        let ell = record.ell.expect("validated");
        let index = record.index()?;
        let dead = record.dead.map(|d| index[&d]);
        let k = record.k;
        // dense ids over the ranked states only
        let mut dense = vec![usize::MAX; record.states.len()];
        let mut rank = Vec::new();
        let mut final_state = 0;
        for (pos, s) in record.states.iter().enumerate() {
            if Some(pos) == dead {
                continue;
            }
            dense[pos] = rank.len();
            if s.is_final {
                final_state = rank.len();
            }
            rank.push(s.rank.expect("validated"));
        }
        let mut delta = vec![None; rank.len() * k];
        for (f, sym, t) in record.dense_edges(&index)? {
            if Some(f) == dead || Some(t) == dead {
                continue;
            }
            let slot = &mut delta[dense[f] * k + sym];
            if slot.is_some_and(|p| p != dense[t]) {
                return Err(Error::Nondeterministic(format!(
                    "state {} has two successors on symbol {sym}",
                    record.states[f].id
                )));
            }
            *slot = Some(dense[t]);
        }
        Ok(RankedDfa {
            k,
            ell,
            rank,
            initial: dense[index[&record.initial]],
            final_state,
            delta,
        })
    }

    /// Ranked states, not counting `Ω`.
    pub fn num_states(&self) -> usize {
        self.rank.len()
    }

    /// `true` when some transition is missing, so `Ω` is reachable.
    pub fn has_dead(&self) -> bool {
        self.delta.iter().any(Option::is_none)
    }

    /// Size of the complete DFA: ranked states plus `Ω` when reachable.
    pub fn dsc(&self) -> usize {
        self.num_states() + usize::from(self.has_dead())
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn final_state(&self) -> StateId {
        self.final_state
    }

    pub fn rank_of(&self, q: StateId) -> usize {
        self.rank[q]
    }

    #[inline]
    pub fn step(&self, q: StateId, symbol: Symbol) -> Option<StateId> {
        self.delta[q * self.k + symbol]
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        if word.len() != self.ell || word.iter().any(|&s| s >= self.k) {
            return false;
        }
        let mut q = self.initial;
        for &s in word {
            match self.step(q, s) {
                Some(p) => q = p,
                None => return false,
            }
        }
        q == self.final_state
    }

    /// Renumbers states breadth-first from the initial state, visiting
    /// successors in symbol order. Unreachable states are dropped.
    pub fn canonical(&self) -> RankedDfa {
        let n = self.num_states();
        let mut new_id = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([self.initial]);
        new_id[self.initial] = 0;
        order.push(self.initial);
        while let Some(q) = queue.pop_front() {
            for s in 0..self.k {
                if let Some(p) = self.step(q, s) {
                    if new_id[p] == usize::MAX {
                        new_id[p] = order.len();
                        order.push(p);
                        queue.push_back(p);
                    }
                }
            }
        }
        let mut delta = Vec::with_capacity(order.len() * self.k);
        for &q in &order {
            for s in 0..self.k {
                delta.push(self.step(q, s).map(|p| new_id[p]));
            }
        }
        RankedDfa {
            k: self.k,
            ell: self.ell,
            rank: order.iter().map(|&q| self.rank[q]).collect(),
            initial: 0,
            final_state: new_id[self.final_state],
            delta,
        }
    }

    /// Equal up to renaming of states.
    pub fn is_isomorphic(&self, other: &RankedDfa) -> bool {
        self.canonical() == other.canonical()
    }

    /// Merges equivalent states rank by rank, starting at rank 0.
    ///
    /// Two states of the same rank are equivalent iff their successors on
    /// every symbol are already known to be equivalent, so one pass over the
    /// ranks with a signature table suffices.
    pub fn minimize(&self) -> RankedDfa {
        let n = self.num_states();
        let mut by_rank: Vec<Vec<StateId>> = vec![Vec::new(); self.ell + 1];
        for q in 0..n {
            by_rank[self.rank[q]].push(q);
        }
        let mut class = vec![usize::MAX; n];
        let mut rank = Vec::new();
        let mut delta: Vec<Option<StateId>> = Vec::new();
        for states in &by_rank {
            let mut table: HashMap<Vec<Option<usize>>, usize> = HashMap::new();
            for &q in states {
                let sig: Vec<Option<usize>> =
                    (0..self.k).map(|s| self.step(q, s).map(|p| class[p])).collect();
                let id = *table.entry(sig.clone()).or_insert_with(|| {
                    rank.push(self.rank[q]);
                    delta.extend_from_slice(&sig);
                    rank.len() - 1
                });
                class[q] = id;
            }
        }
        RankedDfa {
            k: self.k,
            ell: self.ell,
            rank,
            initial: class[self.initial],
            final_state: class[self.final_state],
            delta,
        }
        .canonical()
    }

    /// Transitions inverted, initial and final swapped, rank `i` relabeled
    /// `ℓ - i`. Accepts the reversal of the language.
    pub fn reverse(&self) -> RankedNfa {
        RankedNfa::from(self).reverse()
    }
}

impl RankedAutomaton for RankedDfa {
    fn k(&self) -> usize {
        self.k
    }

    fn ell(&self) -> usize {
        self.ell
    }

    fn language(&self) -> Result<BlockLanguage> {
        checked_block_size(self.k, self.ell)?;
        let mut order: Vec<StateId> = (0..self.num_states()).collect();
        order.sort_by_key(|&q| self.rank[q]);
        let mut bitmaps: Vec<Option<BitVec>> = vec![None; self.num_states()];
        for &q in &order {
            let r = self.rank[q];
            let bits = if r == 0 {
                BitVec::ones(1)
            } else {
                let block = self.k.pow(r as u32 - 1);
                let mut bits = BitVec::zeros(0);
                for s in 0..self.k {
                    match self.step(q, s) {
                        Some(p) => bits.extend_from(
                            bitmaps[p].as_ref().expect("lower ranks first").as_slice(),
                        ),
                        None => bits.extend_zeros(block),
                    }
                }
                bits
            };
            bitmaps[q] = Some(bits);
        }
        let top = bitmaps[self.initial].take().expect("initial visited");
        BlockLanguage::new(self.k, self.ell, top)
    }

    fn to_record(&self) -> AutomatonRecord {
        let n = self.num_states();
        let dead = self.has_dead().then_some(n);
        let mut states: Vec<StateRecord> = (0..n)
            .map(|q| StateRecord {
                id: q,
                rank: Some(self.rank[q]),
                is_final: q == self.final_state,
            })
            .collect();
        let mut transitions = Vec::with_capacity(self.delta.len());
        for q in 0..n {
            for s in 0..self.k {
                match self.step(q, s) {
                    Some(p) => transitions.push([q, s, p]),
                    None => transitions.push([q, s, n]),
                }
            }
        }
        if let Some(d) = dead {
            states.push(StateRecord {
                id: d,
                rank: None,
                is_final: false,
            });
            for s in 0..self.k {
                transitions.push([d, s, d]);
            }
        }
        AutomatonRecord {
            k: self.k,
            ell: Some(self.ell),
            states,
            initial: self.initial,
            dead,
            transitions,
        }
    }

    fn width_profile(&self) -> WidthProfile {
        let mut widths = vec![0; self.ell + 1];
        for &r in &self.rank {
            widths[self.ell - r] += 1;
        }
        WidthProfile {
            widths,
            has_dead: self.has_dead(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedNfa {
    k: usize,
    ell: usize,
    rank: Vec<usize>,
    initial: StateId,
    final_state: StateId,
    /// `delta[q * k + σ]`, sorted and deduplicated.
    delta: Vec<Vec<StateId>>,
}

impl RankedNfa {
    /// Builds and validates an NFA from `(from, symbol, to)` edges.
    pub fn new(
        k: usize,
        ell: usize,
        ranks: Vec<usize>,
        initial: StateId,
        final_state: StateId,
        edges: impl IntoIterator<Item = (StateId, Symbol, StateId)>,
    ) -> Result<Self> {
        let record = AutomatonRecord {
            k,
            ell: Some(ell),
            states: ranks
                .iter()
                .enumerate()
                .map(|(id, &r)| StateRecord {
                    id,
                    rank: Some(r),
                    is_final: id == final_state,
                })
                .collect(),
            initial,
            dead: None,
            transitions: edges.into_iter().map(|(f, s, t)| [f, s, t]).collect(),
        };
        Self::try_from_record(&record)
    }

    pub fn try_from_record(record: &AutomatonRecord) -> Result<Self> {
        validate(record)?;
        let index = record.index()?;
        let dead = record.dead.map(|d| index[&d]);
        let k = record.k;
        let mut dense = vec![usize::MAX; record.states.len()];
        let mut rank = Vec::new();
        let mut final_state = 0;
        for (pos, s) in record.states.iter().enumerate() {
            if Some(pos) == dead {
                continue;
            }
            dense[pos] = rank.len();
            if s.is_final {
                final_state = rank.len();
            }
            rank.push(s.rank.expect("validated"));
        }
        let mut delta = vec![Vec::new(); rank.len() * k];
        for (f, sym, t) in record.dense_edges(&index)? {
            if Some(f) == dead || Some(t) == dead {
                continue;
            }
            delta[dense[f] * k + sym].push(dense[t]);
        }
        for row in &mut delta {
            row.sort_unstable();
            row.dedup();
        }
        Ok(RankedNfa {
            k,
            ell: record.ell.expect("validated"),
            rank,
            initial: dense[index[&record.initial]],
            final_state,
            delta,
        })
    }

    pub(crate) fn from_parts(
        k: usize,
        ell: usize,
        rank: Vec<usize>,
        initial: StateId,
        final_state: StateId,
        mut delta: Vec<Vec<StateId>>,
    ) -> Self {
        for row in &mut delta {
            row.sort_unstable();
            row.dedup();
        }
        RankedNfa {
            k,
            ell,
            rank,
            initial,
            final_state,
            delta,
        }
    }

    pub fn num_states(&self) -> usize {
        self.rank.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn final_state(&self) -> StateId {
        self.final_state
    }

    pub fn rank_of(&self, q: StateId) -> usize {
        self.rank[q]
    }

    pub fn step(&self, q: StateId, symbol: Symbol) -> &[StateId] {
        &self.delta[q * self.k + symbol]
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        if word.len() != self.ell || word.iter().any(|&s| s >= self.k) {
            return false;
        }
        let mut current = vec![self.initial];
        for &s in word {
            let mut next: Vec<StateId> = current.iter().flat_map(|&q| self.step(q, s)).copied().collect();
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        current.contains(&self.final_state)
    }

    /// Subset construction over reachable subsets. Every subset holds states
    /// of a single rank, so the result is ranked as well.
    pub fn determinize(&self) -> RankedDfa {
        let k = self.k;
        let mut ids: HashMap<(usize, Vec<StateId>), StateId> = HashMap::new();
        let mut subsets: Vec<Vec<StateId>> = Vec::new();
        let mut rank = Vec::new();
        let mut delta: Vec<Option<StateId>> = Vec::new();
        let start = vec![self.initial];
        ids.insert((self.ell, start.clone()), 0);
        subsets.push(start);
        rank.push(self.ell);
        let mut next = 0;
        while next < subsets.len() {
            let current = subsets[next].clone();
            let r = rank[next];
            for s in 0..k {
                let mut target: Vec<StateId> =
                    current.iter().flat_map(|&q| self.step(q, s)).copied().collect();
                target.sort_unstable();
                target.dedup();
                if target.is_empty() {
                    delta.push(None);
                    continue;
                }
                let key = (r - 1, target);
                let id = match ids.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = subsets.len();
                        subsets.push(key.1.clone());
                        rank.push(r - 1);
                        ids.insert(key, id);
                        id
                    }
                };
                delta.push(Some(id));
            }
            next += 1;
        }
        let final_state = ids[&(0, vec![self.final_state])];
        RankedDfa {
            k,
            ell: self.ell,
            rank,
            initial: 0,
            final_state,
            delta,
        }
        .canonical()
    }

    pub fn reverse(&self) -> RankedNfa {
        let mut delta = vec![Vec::new(); self.delta.len()];
        for q in 0..self.num_states() {
            for s in 0..self.k {
                for &p in self.step(q, s) {
                    delta[p * self.k + s].push(q);
                }
            }
        }
        RankedNfa::from_parts(
            self.k,
            self.ell,
            self.rank.iter().map(|&r| self.ell - r).collect(),
            self.final_state,
            self.initial,
            delta,
        )
    }
}

impl From<&RankedDfa> for RankedNfa {
    fn from(dfa: &RankedDfa) -> Self {
        RankedNfa {
            k: dfa.k,
            ell: dfa.ell,
            rank: dfa.rank.clone(),
            initial: dfa.initial,
            final_state: dfa.final_state,
            delta: dfa.delta.iter().map(|t| t.iter().copied().collect()).collect(),
        }
    }
}

impl RankedAutomaton for RankedNfa {
    fn k(&self) -> usize {
        self.k
    }

    fn ell(&self) -> usize {
        self.ell
    }

    fn language(&self) -> Result<BlockLanguage> {
        checked_block_size(self.k, self.ell)?;
        let mut order: Vec<StateId> = (0..self.num_states()).collect();
        order.sort_by_key(|&q| self.rank[q]);
        let mut bitmaps: Vec<Option<BitVec>> = vec![None; self.num_states()];
        for &q in &order {
            let r = self.rank[q];
            let bits = if r == 0 {
                BitVec::ones(1)
            } else {
                let block = self.k.pow(r as u32 - 1);
                let mut bits = BitVec::zeros(0);
                for s in 0..self.k {
                    let mut part = BitVec::zeros(block);
                    for &p in self.step(q, s) {
                        part.or_assign(bitmaps[p].as_ref().expect("lower ranks first").as_slice());
                    }
                    bits.extend_from(part.as_slice());
                }
                bits
            };
            bitmaps[q] = Some(bits);
        }
        let top = bitmaps[self.initial].take().expect("initial visited");
        BlockLanguage::new(self.k, self.ell, top)
    }

    fn to_record(&self) -> AutomatonRecord {
        let n = self.num_states();
        let mut transitions = Vec::new();
        for q in 0..n {
            for s in 0..self.k {
                for &p in self.step(q, s) {
                    transitions.push([q, s, p]);
                }
            }
        }
        AutomatonRecord {
            k: self.k,
            ell: Some(self.ell),
            states: (0..n)
                .map(|q| StateRecord {
                    id: q,
                    rank: Some(self.rank[q]),
                    is_final: q == self.final_state,
                })
                .collect(),
            initial: self.initial,
            dead: None,
            transitions,
        }
    }

    fn width_profile(&self) -> WidthProfile {
        let mut widths = vec![0; self.ell + 1];
        for &r in &self.rank {
            widths[self.ell - r] += 1;
        }
        WidthProfile {
            widths,
            has_dead: false,
        }
    }
}
