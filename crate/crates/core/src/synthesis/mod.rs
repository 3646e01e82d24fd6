//! Minimal automata read off a bitmap.
//!
//! The minimal DFA has one state per distinct nonzero factor; the NFA has one
//! state per member of a minimum cover of each factor set.

mod cover;

use std::collections::{BTreeMap, HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

pub use cover::{minimal_cover, Cover, CoverOptions, DEFAULT_NODE_BUDGET};

use crate::automata::{GeneralDfa, RankedAutomaton, RankedDfa, RankedNfa, WidthProfile};
use crate::bitmap::{BlockLanguage, FactorSets};
use crate::bits::BitVec;
use crate::error::{Error, Result};

/// The minimal DFA: states are the factors, `δ(s, σ_j)` is the `j`-th block
/// of `s` (or `Ω` when that block is zero).
pub fn min_dfa_from_bitmap(lang: &BlockLanguage) -> Result<RankedDfa> {
    if lang.is_empty() {
        return Err(Error::EmptyLanguage);
    }
    let sets = lang.factor_sets();
    dfa_from_factor_sets(lang.k(), &sets)
}

fn dfa_from_factor_sets(k: usize, sets: &FactorSets) -> Result<RankedDfa> {
    let ell = sets.ell();
    // ids assigned from rank ℓ down so the initial state is 0
    let mut base = vec![0usize; ell + 1];
    let mut next = 0;
    for i in (0..=ell).rev() {
        base[i] = next;
        next += sets.rank(i).len();
    }
    let lookup: Vec<HashMap<&BitVec, usize>> = (0..=ell)
        .map(|i| {
            sets.rank(i)
                .iter()
                .enumerate()
                .map(|(j, s)| (s, base[i] + j))
                .collect()
        })
        .collect();
    let mut rank = vec![0usize; next];
    let mut delta = vec![None; next * k];
    for i in 0..=ell {
        for (j, s) in sets.rank(i).iter().enumerate() {
            let q = base[i] + j;
            rank[q] = i;
            if i == 0 {
                continue;
            }
            let block = s.len() / k;
            for sym in 0..k {
                let piece = s.slice(sym * block, block);
                if !piece.is_zero() {
                    delta[q * k + sym] = Some(lookup[i - 1][&piece.to_bitvec()]);
                }
            }
        }
    }
    RankedDfa::build_trimmed(k, ell, rank, base[ell], base[0], delta)
}

/// Minimal covers of every factor set; entry `i` covers `B_i`.
pub fn covers(lang: &BlockLanguage, options: &CoverOptions) -> Result<Vec<Cover>> {
    if lang.is_empty() {
        return Err(Error::EmptyLanguage);
    }
    let sets = lang.factor_sets();
    let ell = sets.ell();
    let k = lang.k();
    (0..=ell)
        .into_par_iter()
        .map(|i| {
            if i == 0 || i == ell {
                Ok(Cover {
                    rank: i,
                    members: sets.rank(i).to_vec(),
                    targets: sets.rank(i).to_vec(),
                    rho: vec![vec![0]],
                    exact: true,
                })
            } else {
                minimal_cover(sets.rank(i), sets.rank(i - 1), k, i, options)
            }
        })
        .collect()
}

/// The NFA whose states are the cover members, with `δ(c, σ_j) = ρ(c_j)`.
/// Members that end up unreachable from the initial state are dropped.
pub fn nfa_from_covers(k: usize, covers: &[Cover]) -> RankedNfa {
    let ell = covers.len() - 1;
    let mut base = vec![0usize; ell + 1];
    let mut next = 0;
    for i in (0..=ell).rev() {
        base[i] = next;
        next += covers[i].members.len();
    }
    let target_index: Vec<HashMap<&BitVec, usize>> = covers
        .iter()
        .map(|c| c.targets.iter().enumerate().map(|(t, s)| (s, t)).collect())
        .collect();
    let mut rank = vec![0usize; next];
    let mut delta = vec![Vec::new(); next * k];
    for i in 0..=ell {
        for (j, c) in covers[i].members.iter().enumerate() {
            let q = base[i] + j;
            rank[q] = i;
            if i == 0 {
                continue;
            }
            let block = c.len() / k;
            for sym in 0..k {
                let piece = c.slice(sym * block, block);
                if piece.is_zero() {
                    continue;
                }
                let t = target_index[i - 1][&piece.to_bitvec()];
                delta[q * k + sym] = covers[i - 1].rho[t].iter().map(|&m| base[i - 1] + m).collect();
            }
        }
    }
    trim_forward(k, ell, rank, base[ell], base[0], delta)
}

/// Keeps the states reachable from `initial`. Every cover member reaches the
/// final state, so this leaves a trim automaton.
fn trim_forward(
    k: usize,
    ell: usize,
    rank: Vec<usize>,
    initial: usize,
    final_state: usize,
    delta: Vec<Vec<usize>>,
) -> RankedNfa {
    let n = rank.len();
    let mut new_id = vec![usize::MAX; n];
    let mut order = vec![initial];
    new_id[initial] = 0;
    let mut queue = VecDeque::from([initial]);
    while let Some(q) = queue.pop_front() {
        for s in 0..k {
            for &p in &delta[q * k + s] {
                if new_id[p] == usize::MAX {
                    new_id[p] = order.len();
                    order.push(p);
                    queue.push_back(p);
                }
            }
        }
    }
    let new_delta = order
        .iter()
        .flat_map(|&q| (0..k).map(move |s| q * k + s))
        .map(|slot| delta[slot].iter().map(|&p| new_id[p]).collect())
        .collect();
    RankedNfa::from_parts(
        k,
        ell,
        order.iter().map(|&q| rank[q]).collect(),
        0,
        new_id[final_state],
        new_delta,
    )
}

/// A minimal NFA built from per-rank minimum covers.
pub fn min_nfa_from_bitmap(lang: &BlockLanguage, options: &CoverOptions) -> Result<RankedNfa> {
    Ok(nfa_from_covers(lang.k(), &covers(lang, options)?))
}

/// Measured sizes of one language.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexityReport {
    pub k: usize,
    /// `None` for languages that are not block languages (star and plus).
    pub ell: Option<usize>,
    pub dsc: u64,
    pub nsc: u64,
    /// `false` when some cover search ran out of budget, so `nsc` is only an
    /// upper bound, or when `nsc` is the size of a construction rather than
    /// of a minimal NFA.
    pub nsc_exact: bool,
    pub dfa_widths: Option<WidthProfile>,
    pub nfa_widths: Option<WidthProfile>,
    pub formula_values: BTreeMap<String, u64>,
}

impl ComplexityReport {
    /// The empty language: only `Ω`.
    pub fn empty(k: usize, ell: usize) -> Self {
        ComplexityReport {
            k,
            ell: Some(ell),
            dsc: 1,
            nsc: 0,
            nsc_exact: true,
            dfa_widths: None,
            nfa_widths: None,
            formula_values: BTreeMap::new(),
        }
    }

    /// Report for an unleveled DFA, with `nsc` taken from a construction.
    pub fn general(dfa: &GeneralDfa, nfa_states: usize) -> Self {
        ComplexityReport {
            k: dfa.k(),
            ell: None,
            dsc: dfa.num_states() as u64,
            nsc: nfa_states as u64,
            nsc_exact: false,
            dfa_widths: None,
            nfa_widths: None,
            formula_values: BTreeMap::new(),
        }
    }

    /// DFA rank widths `m_ℓ … m_0`.
    pub fn dfa_width_list(&self) -> &[usize] {
        self.dfa_widths.as_ref().map_or(&[], |w| &w.widths)
    }

    pub fn nfa_width_list(&self) -> &[usize] {
        self.nfa_widths.as_ref().map_or(&[], |w| &w.widths)
    }
}

/// Deterministic side only; the NFA fields mirror the DFA.
pub fn measure_dfa(lang: &BlockLanguage) -> Result<ComplexityReport> {
    let dfa = min_dfa_from_bitmap(lang)?;
    let widths = dfa.width_profile();
    Ok(ComplexityReport {
        k: lang.k(),
        ell: Some(lang.ell()),
        dsc: dfa.dsc() as u64,
        nsc: dfa.num_states() as u64,
        nsc_exact: false,
        dfa_widths: Some(widths.clone()),
        nfa_widths: Some(widths),
        formula_values: BTreeMap::new(),
    })
}

pub fn measure(lang: &BlockLanguage) -> Result<ComplexityReport> {
    measure_with(lang, &CoverOptions::default())
}

pub fn measure_with(lang: &BlockLanguage, options: &CoverOptions) -> Result<ComplexityReport> {
    let dfa = min_dfa_from_bitmap(lang)?;
    let covers = covers(lang, options)?;
    let exact = covers.iter().all(|c| c.exact);
    let nfa = nfa_from_covers(lang.k(), &covers);
    let report = ComplexityReport {
        k: lang.k(),
        ell: Some(lang.ell()),
        dsc: dfa.dsc() as u64,
        nsc: nfa.num_states() as u64,
        nsc_exact: exact,
        dfa_widths: Some(dfa.width_profile()),
        nfa_widths: Some(nfa.width_profile()),
        formula_values: BTreeMap::new(),
    };
    assert!(
        report.nsc <= dfa.num_states() as u64,
        "cover NFA larger than the trimmed DFA"
    );
    Ok(report)
}
