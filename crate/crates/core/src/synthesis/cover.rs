//! Minimum covers of a factor set.
//!
//! A cover of `B_i` is a set `C_i` of bit sequences such that every `s ∈ B_i`
//! is the OR of the members lying below it. Members are drawn from the
//! compositions `(B_{i-1} ∪ {0})^k ∖ {0}`, so that each member is itself a
//! legal NFA state whose blocks are quotients of the next rank.
//!
//! The search is an exact set cover over the elements `(s, p)`, one per set
//! bit `p` of each target `s`. A candidate `c` covers `(s, p)` when `c ≤ s`
//! and `c_p = 1`.

use std::collections::HashSet;

use crate::bits::BitVec;
use crate::error::{Error, Result};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverOptions {
    /// Search nodes allowed per rank, candidate enumeration included.
    pub node_budget: u64,
    /// Return the greedy cover instead of failing when the budget runs out.
    pub fallback_to_greedy: bool,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            node_budget: DEFAULT_NODE_BUDGET,
            fallback_to_greedy: false,
        }
    }
}

/// `C_i` together with the map `ρ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub rank: usize,
    /// Sorted in ascending bit-sequence order.
    pub members: Vec<BitVec>,
    /// The factors being covered, in the order they were given.
    pub targets: Vec<BitVec>,
    /// `rho[t]` indexes the members whose OR is `targets[t]`.
    pub rho: Vec<Vec<usize>>,
    /// `false` when the search gave up and this is the greedy cover.
    pub exact: bool,
}

impl Cover {
    fn assemble(rank: usize, mut members: Vec<BitVec>, targets: &[BitVec], exact: bool) -> Cover {
        members.sort();
        members.dedup();
        let rho = targets.iter().map(|s| rho_for(s, &members)).collect();
        Cover {
            rank,
            members,
            targets: targets.to_vec(),
            rho,
            exact,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Checks that `ρ(s)` consists of members below `s` whose OR is `s`.
    pub fn verify(&self) -> bool {
        self.targets.iter().zip(&self.rho).all(|(s, picks)| {
            let mut acc = BitVec::zeros(s.len());
            for &m in picks {
                let m = &self.members[m];
                if !m.is_subset_of(s) {
                    return false;
                }
                acc.or_assign(m.as_slice());
            }
            &acc == s
        })
    }
}

/// Members below `s`, with every member dropped whose bits the rest already
/// provide.
fn rho_for(s: &BitVec, members: &[BitVec]) -> Vec<usize> {
    let mut picks: Vec<usize> = (0..members.len())
        .filter(|&m| members[m].is_subset_of(s))
        .collect();
    let mut i = 0;
    while i < picks.len() {
        let mut rest = BitVec::zeros(s.len());
        for (j, &m) in picks.iter().enumerate() {
            if j != i {
                rest.or_assign(members[m].as_slice());
            }
        }
        if &rest == s {
            picks.remove(i);
        } else {
            i += 1;
        }
    }
    picks
}

/// A minimum-size cover of `targets` by compositions of `parts`; among all
/// minimum covers, the one whose sorted member list is lexicographically
/// least.
///
/// `targets` have length `k^rank` and `parts` length `k^(rank-1)`.
pub fn minimal_cover(
    targets: &[BitVec],
    parts: &[BitVec],
    k: usize,
    rank: usize,
    options: &CoverOptions,
) -> Result<Cover> {
    if targets.is_empty() {
        return Err(Error::Invalid("cover of an empty factor set".into()));
    }
    if targets.len() == 1 {
        return Ok(Cover::assemble(rank, targets.to_vec(), targets, true));
    }
    let mut budget = Budget(options.node_budget);
    let out_of_budget = |greedy: Vec<BitVec>| {
        let cover = Cover::assemble(rank, greedy, targets, false);
        if options.fallback_to_greedy {
            Ok(cover)
        } else {
            Err(Error::CoverBudgetExceeded {
                rank,
                budget: options.node_budget,
                greedy: Box::new(cover),
            })
        }
    };

    let candidates = match enumerate_candidates(targets, parts, k, &mut budget) {
        Some(c) => c,
        // the targets themselves always form a cover
        None => return out_of_budget(targets.to_vec()),
    };
    let problem = Problem::new(targets, &candidates);
    let greedy = problem.greedy();
    let greedy_members: Vec<BitVec> = greedy.iter().map(|&c| candidates[c].clone()).collect();

    // phase 1: smallest size, by iterative deepening
    let mut best = greedy.len();
    let mut found = greedy;
    let lower = problem.lower_bound(&problem.empty(), 0);
    let mut size = lower.max(1);
    while size < best {
        let mut stack = Vec::new();
        match problem.search(&problem.empty(), 0, size, &mut stack, &mut budget) {
            Some(true) => {
                best = size;
                found = stack;
                break;
            }
            Some(false) => size += 1,
            None => return out_of_budget(greedy_members),
        }
    }

    // phase 2: fix members one at a time in ascending order
    let mut chosen: Vec<usize> = Vec::with_capacity(best);
    let mut covered = problem.empty();
    let mut start = 0;
    for slot in 0..best {
        let mut fixed = false;
        let from = start;
        for c in from..candidates.len() {
            if !problem.adds_coverage(&covered, c) {
                continue;
            }
            let next = problem.with(&covered, c);
            let mut stack = Vec::new();
            match problem.search(&next, c + 1, best - slot - 1, &mut stack, &mut budget) {
                Some(true) => {
                    chosen.push(c);
                    covered = next;
                    start = c + 1;
                    fixed = true;
                    break;
                }
                Some(false) => {}
                // out of budget for the tie-break: any minimum cover will do
                None => {
                    let members = found.iter().map(|&c| candidates[c].clone()).collect();
                    return Ok(Cover::assemble(rank, members, targets, true));
                }
            }
        }
        assert!(fixed, "phase 1 established a cover of this size");
    }
    let members = chosen.iter().map(|&c| candidates[c].clone()).collect();
    Ok(Cover::assemble(rank, members, targets, true))
}

struct Budget(u64);

impl Budget {
    fn spend(&mut self) -> bool {
        if self.0 == 0 {
            false
        } else {
            self.0 -= 1;
            true
        }
    }
}

/// Compositions of `k` blocks from `parts ∪ {0}` lying below some target,
/// sorted ascending. `None` when the budget runs out.
fn enumerate_candidates(
    targets: &[BitVec],
    parts: &[BitVec],
    k: usize,
    budget: &mut Budget,
) -> Option<Vec<BitVec>> {
    let block = parts.first().map_or(0, BitVec::len);
    let mut seen: HashSet<BitVec> = HashSet::new();
    for t in targets {
        debug_assert_eq!(t.len(), block * k);
        // options[j]: parts fitting under block j of t; `None` stands for zero
        let options: Vec<Vec<Option<&BitVec>>> = (0..k)
            .map(|j| {
                let tj = t.slice(j * block, block);
                std::iter::once(None)
                    .chain(parts.iter().filter(|p| p.as_slice().is_subset_of(tj)).map(Some))
                    .collect()
            })
            .collect();
        let mut digits = vec![0usize; k];
        loop {
            if !budget.spend() {
                return None;
            }
            if digits.iter().any(|&d| d != 0) {
                let mut c = BitVec::zeros(0);
                for (j, &d) in digits.iter().enumerate() {
                    match options[j][d] {
                        Some(p) => c.extend_from(p.as_slice()),
                        None => c.extend_zeros(block),
                    }
                }
                seen.insert(c);
            }
            // odometer over the option lists, last block fastest
            let mut j = k;
            let wrapped = loop {
                if j == 0 {
                    break true;
                }
                j -= 1;
                digits[j] += 1;
                if digits[j] < options[j].len() {
                    break false;
                }
                digits[j] = 0;
            };
            if wrapped {
                break;
            }
        }
    }
    let mut out: Vec<BitVec> = seen.into_iter().collect();
    out.sort();
    Some(out)
}

/// The set-cover instance over elements `(target, bit)`.
struct Problem {
    n_elements: usize,
    /// Elements covered by each candidate, as a bitset over elements.
    covers: Vec<Vec<u64>>,
    /// Candidates covering each element, ascending.
    by_element: Vec<Vec<usize>>,
}

type ElementSet = Vec<u64>;

impl Problem {
    fn new(targets: &[BitVec], candidates: &[BitVec]) -> Problem {
        let mut offsets = Vec::with_capacity(targets.len());
        let mut n_elements = 0;
        for t in targets {
            offsets.push(n_elements);
            n_elements += t.count_ones();
        }
        let words = n_elements.div_ceil(64);
        let mut covers = vec![vec![0u64; words]; candidates.len()];
        let mut by_element = vec![Vec::new(); n_elements];
        for (ci, c) in candidates.iter().enumerate() {
            for (ti, t) in targets.iter().enumerate() {
                if !c.is_subset_of(t) {
                    continue;
                }
                for (e, p) in t.ones_positions().enumerate() {
                    if c.get(p) {
                        let id = offsets[ti] + e;
                        covers[ci][id / 64] |= 1 << (id % 64);
                        by_element[id].push(ci);
                    }
                }
            }
        }
        Problem {
            n_elements,
            covers,
            by_element,
        }
    }

    fn empty(&self) -> ElementSet {
        vec![0; self.n_elements.div_ceil(64)]
    }

    fn is_covered(set: &ElementSet, e: usize) -> bool {
        set[e / 64] >> (e % 64) & 1 == 1
    }

    fn with(&self, set: &ElementSet, c: usize) -> ElementSet {
        set.iter().zip(&self.covers[c]).map(|(a, b)| a | b).collect()
    }

    fn gain(&self, set: &ElementSet, c: usize) -> u32 {
        set.iter()
            .zip(&self.covers[c])
            .map(|(a, b)| (b & !a).count_ones())
            .sum()
    }

    fn adds_coverage(&self, set: &ElementSet, c: usize) -> bool {
        set.iter().zip(&self.covers[c]).any(|(a, b)| b & !a != 0)
    }

    fn uncovered<'a>(&'a self, set: &'a ElementSet) -> impl Iterator<Item = usize> + 'a {
        (0..self.n_elements).filter(move |&e| !Self::is_covered(set, e))
    }

    /// Repeatedly takes the candidate covering the most uncovered elements.
    fn greedy(&self) -> Vec<usize> {
        let mut set = self.empty();
        let mut picks = Vec::new();
        while self.uncovered(&set).next().is_some() {
            let best = (0..self.covers.len())
                .max_by_key(|&c| (self.gain(&set, c), std::cmp::Reverse(c)))
                .expect("targets are candidates");
            set = self.with(&set, best);
            picks.push(best);
        }
        picks
    }

    /// Size of a greedily built family of uncovered elements no two of which
    /// share a usable candidate; each needs its own cover member.
    fn lower_bound(&self, set: &ElementSet, start: usize) -> usize {
        let mut elements: Vec<(usize, usize)> = self
            .uncovered(set)
            .map(|e| (self.by_element[e].iter().filter(|&&c| c >= start).count(), e))
            .collect();
        elements.sort_unstable();
        let mut used: HashSet<usize> = HashSet::new();
        let mut count = 0;
        for (_, e) in elements {
            let cands = self.by_element[e].iter().filter(|&&c| c >= start);
            if cands.clone().all(|c| !used.contains(c)) {
                used.extend(cands);
                count += 1;
            }
        }
        count
    }

    /// Is there a cover of the uncovered elements using at most `left`
    /// candidates with index `>= start`? `None` when the budget runs out.
    fn search(
        &self,
        set: &ElementSet,
        start: usize,
        left: usize,
        stack: &mut Vec<usize>,
        budget: &mut Budget,
    ) -> Option<bool> {
        if !budget.spend() {
            return None;
        }
        // branch on the hardest uncovered element
        let mut pick: Option<(usize, usize)> = None;
        for e in self.uncovered(set) {
            let n = self.by_element[e].iter().filter(|&&c| c >= start).count();
            if pick.is_none_or(|(best, _)| n < best) {
                pick = Some((n, e));
                if n <= 1 {
                    break;
                }
            }
        }
        let Some((n, e)) = pick else {
            return Some(true);
        };
        if n == 0 || left == 0 || self.lower_bound(set, start) > left {
            return Some(false);
        }
        let mut options: Vec<usize> = self.by_element[e].iter().copied().filter(|&c| c >= start).collect();
        options.sort_by_key(|&c| std::cmp::Reverse(self.gain(set, c)));
        for c in options {
            stack.push(c);
            match self.search(&self.with(set, c), start, left - 1, stack, budget)? {
                true => return Some(true),
                false => {
                    stack.pop();
                }
            }
        }
        Some(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVec {
        BitVec::parse(s).unwrap()
    }

    fn bvs(list: &[&str]) -> Vec<BitVec> {
        list.iter().map(|s| bv(s)).collect()
    }

    #[test]
    fn three_pairs_need_two_members() {
        let c = minimal_cover(&bvs(&["01", "10", "11"]), &bvs(&["1"]), 2, 1, &CoverOptions::default()).unwrap();
        assert_eq!(c.members, bvs(&["01", "10"]));
        assert_eq!(c.rho[2], vec![0, 1]);
        assert!(c.verify() && c.exact);
    }

    #[test]
    fn singleton_covers_itself() {
        let c = minimal_cover(&bvs(&["0110"]), &bvs(&["01", "10"]), 2, 2, &CoverOptions::default()).unwrap();
        assert_eq!(c.members, bvs(&["0110"]));
    }

    #[test]
    fn unions_share_pieces() {
        // 1100 and 0011 produce 1111; 1010 stands alone
        let targets = bvs(&["1100", "0011", "1111", "1010"]);
        let parts = bvs(&["11", "10"]);
        let c = minimal_cover(&targets, &parts, 2, 2, &CoverOptions::default()).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.verify());
    }

    #[test]
    fn budget_exhaustion_reports_greedy() {
        let targets = bvs(&["01", "10", "11"]);
        let opts = CoverOptions {
            node_budget: 2,
            fallback_to_greedy: false,
        };
        match minimal_cover(&targets, &bvs(&["1"]), 2, 1, &opts) {
            Err(Error::CoverBudgetExceeded { greedy, rank: 1, .. }) => {
                assert!(greedy.verify());
                assert!(!greedy.exact);
            }
            other => panic!("unexpected {other:?}"),
        }
        let opts = CoverOptions {
            node_budget: 2,
            fallback_to_greedy: true,
        };
        let c = minimal_cover(&targets, &bvs(&["1"]), 2, 1, &opts).unwrap();
        assert!(!c.exact && c.verify());
    }

    #[test]
    fn rho_is_irredundant() {
        let members = bvs(&["0011", "0101", "0110", "1100"]);
        let picks = rho_for(&bv("0111"), &members);
        let mut acc = BitVec::zeros(4);
        for &m in &picks {
            acc.or_assign(members[m].as_slice());
        }
        assert_eq!(acc, bv("0111"));
        assert_eq!(picks.len(), 2);
    }
}
