//! Unleveled automata. Star and plus of a block language are no longer block
//! languages, and their automata contain cycles, so they live here.

use std::collections::{HashMap, VecDeque};

use super::record::{AutomatonRecord, StateRecord};
use super::ranked::StateId;
use crate::bitmap::Symbol;
use crate::error::{Error, Result};

/// A complete DFA without rank labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralDfa {
    k: usize,
    initial: StateId,
    finals: Vec<bool>,
    /// `delta[q * k + σ]`, always defined.
    delta: Vec<StateId>,
}

impl GeneralDfa {
    pub fn new(k: usize, initial: StateId, finals: Vec<bool>, delta: Vec<StateId>) -> Result<Self> {
        let n = finals.len();
        if k == 0 || n == 0 || initial >= n {
            return Err(Error::Invalid("empty alphabet, no states or bad initial state".into()));
        }
        if delta.len() != n * k || delta.iter().any(|&p| p >= n) {
            return Err(Error::Invalid("transition table is not complete".into()));
        }
        Ok(GeneralDfa {
            k,
            initial,
            finals,
            delta,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals[q]
    }

    #[inline]
    pub fn step(&self, q: StateId, symbol: Symbol) -> StateId {
        self.delta[q * self.k + symbol]
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        let mut q = self.initial;
        for &s in word {
            if s >= self.k {
                return false;
            }
            q = self.step(q, s);
        }
        self.finals[q]
    }

    /// States from which no final state is reachable.
    pub fn dead_states(&self) -> Vec<StateId> {
        let n = self.num_states();
        let mut rev = vec![Vec::new(); n];
        for q in 0..n {
            for s in 0..self.k {
                rev[self.step(q, s)].push(q);
            }
        }
        let mut live = self.finals.clone();
        let mut queue: VecDeque<StateId> = (0..n).filter(|&q| live[q]).collect();
        while let Some(q) = queue.pop_front() {
            for &p in &rev[q] {
                if !live[p] {
                    live[p] = true;
                    queue.push_back(p);
                }
            }
        }
        (0..n).filter(|&q| !live[q]).collect()
    }

    /// `true` when a non-accepting sink is part of the automaton.
    pub fn has_dead(&self) -> bool {
        !self.dead_states().is_empty()
    }

    /// Breadth-first renumbering from the initial state; drops unreachable
    /// states.
    pub fn canonical(&self) -> GeneralDfa {
        let n = self.num_states();
        let mut new_id = vec![usize::MAX; n];
        let mut order = vec![self.initial];
        new_id[self.initial] = 0;
        let mut head = 0;
        while head < order.len() {
            let q = order[head];
            head += 1;
            for s in 0..self.k {
                let p = self.step(q, s);
                if new_id[p] == usize::MAX {
                    new_id[p] = order.len();
                    order.push(p);
                }
            }
        }
        GeneralDfa {
            k: self.k,
            initial: 0,
            finals: order.iter().map(|&q| self.finals[q]).collect(),
            delta: order
                .iter()
                .flat_map(|&q| (0..self.k).map(move |s| (q, s)))
                .map(|(q, s)| new_id[self.step(q, s)])
                .collect(),
        }
    }

    /// Minimal complete DFA by Moore-style partition refinement on the
    /// reachable part. The result is in canonical numbering.
    pub fn minimize(&self) -> GeneralDfa {
        let reach = self.canonical();
        let n = reach.num_states();
        let k = reach.k;
        let mut class: Vec<usize> = reach.finals.iter().map(|&f| usize::from(f)).collect();
        let mut count = {
            let mut seen = [false; 2];
            for &c in &class {
                seen[c] = true;
            }
            seen.iter().filter(|&&b| b).count()
        };
        loop {
            let mut table: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next = vec![0; n];
            for q in 0..n {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(class[q]);
                sig.extend((0..k).map(|s| class[reach.step(q, s)]));
                let len = table.len();
                next[q] = *table.entry(sig).or_insert(len);
            }
            let new_count = table.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let mut finals = vec![false; count];
        let mut delta = vec![0; count * k];
        for q in 0..n {
            finals[class[q]] = reach.finals[q];
            for s in 0..k {
                delta[class[q] * k + s] = class[reach.step(q, s)];
            }
        }
        GeneralDfa {
            k,
            initial: class[reach.initial],
            finals,
            delta,
        }
        .canonical()
    }

    /// Language equality by exploring the product for a distinguishing pair.
    pub fn equivalent(&self, other: &GeneralDfa) -> Result<bool> {
        if self.k != other.k {
            return Err(Error::LengthMismatch(format!(
                "alphabet sizes {} and {}",
                self.k, other.k
            )));
        }
        let mut seen = HashMap::new();
        let mut queue = VecDeque::from([(self.initial, other.initial)]);
        seen.insert((self.initial, other.initial), ());
        while let Some((p, q)) = queue.pop_front() {
            if self.finals[p] != other.finals[q] {
                return Ok(false);
            }
            for s in 0..self.k {
                let pair = (self.step(p, s), other.step(q, s));
                if seen.insert(pair, ()).is_none() {
                    queue.push_back(pair);
                }
            }
        }
        Ok(true)
    }

    pub fn to_record(&self) -> AutomatonRecord {
        let dead = self.dead_states();
        let n = self.num_states();
        AutomatonRecord {
            k: self.k,
            ell: None,
            states: (0..n)
                .map(|q| StateRecord {
                    id: q,
                    rank: None,
                    is_final: self.finals[q],
                })
                .collect(),
            initial: self.initial,
            dead: dead.first().copied(),
            transitions: (0..n)
                .flat_map(|q| (0..self.k).map(move |s| (q, s)))
                .map(|(q, s)| [q, s, self.step(q, s)])
                .collect(),
        }
    }

    pub fn try_from_record(record: &AutomatonRecord) -> Result<Self> {
        let index = record.index()?;
        let n = record.states.len();
        let mut delta = vec![usize::MAX; n * record.k];
        for (f, s, t) in record.dense_edges(&index)? {
            let slot = &mut delta[f * record.k + s];
            if *slot != usize::MAX && *slot != t {
                return Err(Error::Nondeterministic(format!(
                    "state {} has two successors on symbol {s}",
                    record.states[f].id
                )));
            }
            *slot = t;
        }
        let initial = *index
            .get(&record.initial)
            .ok_or_else(|| Error::Invalid(format!("unknown initial state {}", record.initial)))?;
        GeneralDfa::new(
            record.k,
            initial,
            record.states.iter().map(|s| s.is_final).collect(),
            delta,
        )
    }
}

/// An NFA with a single initial state and no rank labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralNfa {
    k: usize,
    initial: StateId,
    finals: Vec<bool>,
    delta: Vec<Vec<StateId>>,
}

impl GeneralNfa {
    pub fn new(k: usize, initial: StateId, finals: Vec<bool>, mut delta: Vec<Vec<StateId>>) -> Result<Self> {
        let n = finals.len();
        if k == 0 || initial >= n || delta.len() != n * k || delta.iter().flatten().any(|&p| p >= n) {
            return Err(Error::Invalid("malformed NFA".into()));
        }
        for row in &mut delta {
            row.sort_unstable();
            row.dedup();
        }
        Ok(GeneralNfa {
            k,
            initial,
            finals,
            delta,
        })
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn step(&self, q: StateId, symbol: Symbol) -> &[StateId] {
        &self.delta[q * self.k + symbol]
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        let mut current = vec![self.initial];
        for &s in word {
            if s >= self.k {
                return false;
            }
            let mut next: Vec<StateId> = current.iter().flat_map(|&q| self.step(q, s)).copied().collect();
            next.sort_unstable();
            next.dedup();
            current = next;
        }
        current.iter().any(|&q| self.finals[q])
    }

    /// Complete subset construction; the empty subset becomes the dead state
    /// when it is reached.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn to_record(&self) -> AutomatonRecord {
        let n = self.num_states();
        AutomatonRecord {
            k: self.k,
            ell: None,
            states: (0..n)
                .map(|q| StateRecord {
                    id: q,
                    rank: None,
                    is_final: self.finals[q],
                })
                .collect(),
            initial: self.initial,
            dead: None,
            transitions: (0..n)
                .flat_map(|q| (0..self.k).map(move |s| (q, s)))
                .flat_map(|(q, s)| self.step(q, s).iter().map(move |&p| [q, s, p]))
                .collect(),
        }
    }

    pub fn determinize(&self) -> GeneralDfa {
        let k = self.k;
        let mut ids: HashMap<Vec<StateId>, StateId> = HashMap::new();
        let mut subsets = vec![vec![self.initial]];
        ids.insert(vec![self.initial], 0);
        let mut delta = Vec::new();
        let mut head = 0;
        while head < subsets.len() {
            let current = subsets[head].clone();
            head += 1;
            for s in 0..k {
                let mut target: Vec<StateId> = current.iter().flat_map(|&q| self.step(q, s)).copied().collect();
                target.sort_unstable();
                target.dedup();
                let id = match ids.get(&target) {
                    Some(&id) => id,
                    None => {
                        let id = subsets.len();
                        ids.insert(target.clone(), id);
                        subsets.push(target);
                        id
                    }
                };
                delta.push(id);
            }
        }
        let finals = subsets
            .iter()
            .map(|set| set.iter().any(|&q| self.finals[q]))
            .collect();
        GeneralDfa {
            k,
            initial: 0,
            finals,
            delta,
        }
    }
}
