//! The automaton file format and the structural validator.
//!
//! ```json
//! {"k":2,"ell":2,"states":[{"id":0,"rank":2,"final":false}, …],
//!  "initial":0,"dead":3,"transitions":[[0,0,1], …]}
//! ```
//!
//! `ell` and every `rank` are `null` for automata that are not leveled (the
//! outputs of star and plus). The dead state, when present, has no rank.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::WidthProfile;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateRecord {
    pub id: usize,
    pub rank: Option<usize>,
    #[serde(rename = "final")]
    pub is_final: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonRecord {
    pub k: usize,
    pub ell: Option<usize>,
    pub states: Vec<StateRecord>,
    pub initial: usize,
    pub dead: Option<usize>,
    /// `[from, symbol, to]` triples.
    pub transitions: Vec<[usize; 3]>,
}

impl AutomatonRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Maps state ids to dense positions `0..states.len()`.
    pub(crate) fn index(&self) -> Result<HashMap<usize, usize>> {
        let mut map = HashMap::with_capacity(self.states.len());
        for (pos, s) in self.states.iter().enumerate() {
            if map.insert(s.id, pos).is_some() {
                return Err(Error::Invalid(format!("duplicate state id {}", s.id)));
            }
        }
        Ok(map)
    }

    /// Transitions as dense positions, with symbols checked against `k`.
    pub(crate) fn dense_edges(&self, index: &HashMap<usize, usize>) -> Result<Vec<(usize, usize, usize)>> {
        self.transitions
            .iter()
            .map(|&[from, sym, to]| {
                if sym >= self.k {
                    return Err(Error::Invalid(format!(
                        "symbol {sym} outside an alphabet of size {}",
                        self.k
                    )));
                }
                let f = *index
                    .get(&from)
                    .ok_or_else(|| Error::Invalid(format!("unknown state {from}")))?;
                let t = *index
                    .get(&to)
                    .ok_or_else(|| Error::Invalid(format!("unknown state {to}")))?;
                Ok((f, sym, t))
            })
            .collect()
    }
}

/// Checks the leveled-automaton invariants and returns the rank widths.
///
/// Every non-dead state must carry a rank in `0..=ℓ`, every transition must go
/// from rank `i` to rank `i - 1` (or to the dead state), the initial state sits
/// at rank `ℓ`, there is exactly one final state and it sits at rank 0, and
/// every ranked state lies on some path from the initial to the final state.
pub fn validate(record: &AutomatonRecord) -> Result<WidthProfile> {
    let ell = record
        .ell
        .ok_or_else(|| Error::NotRanked("word length is missing".into()))?;
    if record.k == 0 {
        return Err(Error::Invalid("alphabet size must be at least 1".into()));
    }
    let index = record.index()?;
    let n = record.states.len();
    let dead = match record.dead {
        Some(d) => {
            let pos = *index
                .get(&d)
                .ok_or_else(|| Error::Invalid(format!("unknown dead state {d}")))?;
            let s = &record.states[pos];
            if s.rank.is_some() || s.is_final {
                return Err(Error::NotRanked(format!(
                    "dead state {d} must be unranked and non-final"
                )));
            }
            Some(pos)
        }
        None => None,
    };

    let mut rank = vec![0usize; n];
    for (pos, s) in record.states.iter().enumerate() {
        if Some(pos) == dead {
            continue;
        }
        match s.rank {
            Some(r) if r <= ell => rank[pos] = r,
            Some(r) => {
                return Err(Error::NotRanked(format!(
                    "state {} has rank {r} above ℓ = {ell}",
                    s.id
                )))
            }
            None => return Err(Error::NotRanked(format!("state {} has no rank", s.id))),
        }
    }

    let finals: Vec<usize> = (0..n).filter(|&p| record.states[p].is_final).collect();
    let final_pos = match finals.len() {
        1 => finals[0],
        0 => return Err(Error::NotTrim("no final state".into())),
        m => return Err(Error::MultipleFinals(m)),
    };
    if rank[final_pos] != 0 {
        return Err(Error::NotRanked(format!(
            "final state {} has rank {}",
            record.states[final_pos].id, rank[final_pos]
        )));
    }

    let init = *index
        .get(&record.initial)
        .ok_or_else(|| Error::Invalid(format!("unknown initial state {}", record.initial)))?;
    if Some(init) == dead || rank[init] != ell {
        return Err(Error::NotRanked(format!(
            "initial state {} is not at rank {ell}",
            record.initial
        )));
    }

    let edges = record.dense_edges(&index)?;
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    let mut dead_reached_by_edge = false;
    for &(f, sym, t) in &edges {
        if Some(f) == dead {
            if Some(t) != dead {
                return Err(Error::NotRanked(format!(
                    "dead state leaves itself on symbol {sym}"
                )));
            }
            continue;
        }
        if Some(t) == dead {
            dead_reached_by_edge = true;
            continue;
        }
        if rank[t] + 1 != rank[f] {
            return Err(Error::NotRanked(format!(
                "transition {} -{sym}-> {} goes from rank {} to rank {}",
                record.states[f].id, record.states[t].id, rank[f], rank[t]
            )));
        }
        fwd[f].push(t);
        bwd[t].push(f);
    }

    let reach = |start: usize, adj: &[Vec<usize>]| {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(q) = queue.pop_front() {
            for &p in &adj[q] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        seen
    };
    let accessible = reach(init, &fwd);
    let coaccessible = reach(final_pos, &bwd);
    for p in 0..n {
        if Some(p) == dead {
            continue;
        }
        if !accessible[p] || !coaccessible[p] {
            return Err(Error::NotTrim(format!(
                "state {} is {}",
                record.states[p].id,
                if accessible[p] { "not co-accessible" } else { "unreachable" }
            )));
        }
    }

    let mut widths = vec![0usize; ell + 1];
    for p in 0..n {
        if Some(p) != dead {
            widths[ell - rank[p]] += 1;
        }
    }
    Ok(WidthProfile {
        widths,
        has_dead: dead.is_some() && dead_reached_by_edge,
    })
}
