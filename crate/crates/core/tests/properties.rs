//! Invariants of bitmaps, factor sets, automata and covers, checked against
//! word-level oracles.

use std::collections::BTreeSet;

use blockset::automata::{AutomatonRecord, GeneralDfa, RankedAutomaton, RankedDfa, RankedNfa};
use blockset::ops::{block_complement, star_dfa};
use blockset::synthesis::{covers, measure, min_dfa_from_bitmap, min_nfa_from_bitmap};
use blockset::{BitVec, BlockLanguage, CoverOptions, Word};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![(Just(1usize), 1usize..=4), (Just(2usize), 1usize..=5), (Just(3usize), 1usize..=3)]
}

fn lang_of(k: usize, ell: usize) -> impl Strategy<Value = BlockLanguage> {
    proptest::collection::vec(any::<bool>(), k.pow(ell as u32))
        .prop_map(move |v| BlockLanguage::new(k, ell, BitVec::from_bools(v)).unwrap())
}

fn any_lang() -> impl Strategy<Value = BlockLanguage> {
    shape().prop_flat_map(|(k, ell)| lang_of(k, ell))
}

fn nonempty() -> impl Strategy<Value = BlockLanguage> {
    any_lang().prop_filter("nonempty", |l| !l.is_empty())
}

fn all_words(k: usize, ell: usize) -> Vec<Word> {
    let a = blockset::Alphabet::new(k).unwrap();
    (0..k.pow(ell as u32) as u64).map(|i| a.index_to_word(ell, i).unwrap()).collect()
}

fn word_set(l: &BlockLanguage) -> BTreeSet<Word> {
    l.to_words().into_iter().collect()
}

/// Pairs of states with equal rank that no word separates.
fn indistinguishable(dfa: &RankedDfa) -> Option<(usize, usize)> {
    let n = dfa.num_states();
    let accepts_from = |q: usize, w: &[usize]| {
        let mut cur = Some(q);
        for &s in w {
            cur = cur.and_then(|c| dfa.step(c, s));
        }
        cur == Some(dfa.final_state())
    };
    for p in 0..n {
        for q in p + 1..n {
            if dfa.rank_of(p) != dfa.rank_of(q) {
                continue;
            }
            let r = dfa.rank_of(p);
            if all_words(dfa.k(), r).iter().all(|w| accepts_from(p, w) == accepts_from(q, w)) {
                return Some((p, q));
            }
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn words_round_trip(l in any_lang()) {
        let again = BlockLanguage::from_words(l.alphabet(), l.ell(), l.to_words()).unwrap();
        prop_assert_eq!(again, l);
    }

    #[test]
    fn index_round_trip((k, ell) in shape(), i in any::<u64>()) {
        let a = blockset::Alphabet::new(k).unwrap();
        let i = i % k.pow(ell as u32) as u64;
        let w = a.index_to_word(ell, i).unwrap();
        prop_assert_eq!(a.word_to_index(ell, &w).unwrap(), i);
    }

    #[test]
    fn factor_recurrence_and_quotients(l in any_lang()) {
        let k = l.k();
        let ell = l.ell();
        for i in 0..=ell {
            for j in 0..k.pow((ell - i) as u32) {
                let f = l.factor(i, j).unwrap().content.to_bitvec();
                if i > 0 {
                    let mut joined = BitVec::zeros(0);
                    for t in 0..k {
                        joined.extend_from(l.factor(i - 1, j * k + t).unwrap().content);
                    }
                    prop_assert_eq!(&joined, &f);
                }
                // w⁻¹L by filtering words
                let prefix = if i == ell { Vec::new() } else { l.alphabet().index_to_word(ell - i, j as u64).unwrap() };
                let quotient: BTreeSet<Word> = l
                    .to_words()
                    .into_iter()
                    .filter(|w| w.starts_with(&prefix))
                    .map(|w| w[prefix.len()..].to_vec())
                    .collect();
                let from_factor: BTreeSet<Word> = f
                    .ones_positions()
                    .map(|p| if i == 0 { Vec::new() } else { l.alphabet().index_to_word(i, p as u64).unwrap() })
                    .collect();
                prop_assert_eq!(quotient, from_factor);
            }
        }
    }

    #[test]
    fn factor_set_caps(l in any_lang()) {
        let sets = l.factor_sets();
        let k = l.k() as u128;
        for i in 0..=l.ell() {
            let up = (1u128 << k.pow(i as u32).min(127)) - 1;
            let down = k.pow((l.ell() - i) as u32);
            prop_assert!(sets.rank(i).len() as u128 <= up.min(down));
            prop_assert!(sets.rank(i).iter().all(|s| !s.is_zero()));
        }
    }

    #[test]
    fn boolean_homomorphism((x, y) in shape().prop_flat_map(|(k, ell)| (lang_of(k, ell), lang_of(k, ell)))) {
        let (a, b) = (word_set(&x), word_set(&y));
        prop_assert_eq!(word_set(&x.and(&y).unwrap()), a.intersection(&b).cloned().collect::<BTreeSet<_>>());
        prop_assert_eq!(word_set(&x.or(&y).unwrap()), a.union(&b).cloned().collect::<BTreeSet<_>>());
        let all: BTreeSet<Word> = all_words(x.k(), x.ell()).into_iter().collect();
        prop_assert_eq!(word_set(&x.complement()), all.difference(&a).cloned().collect::<BTreeSet<_>>());
    }

    #[test]
    fn reversal_matches_words(l in any_lang()) {
        let rev: BTreeSet<Word> = l.to_words().into_iter().map(|mut w| { w.reverse(); w }).collect();
        prop_assert_eq!(word_set(&l.reversal()), rev);
        prop_assert_eq!(l.reversal().reversal(), l);
    }

    #[test]
    fn concat_counts((x, y) in (1usize..=3).prop_flat_map(|k| (lang_of(k, 2), lang_of(k, 1)))) {
        let c = x.concat(&y).unwrap();
        prop_assert_eq!(c.count(), x.count() * y.count());
        for w in c.to_words() {
            prop_assert!(x.contains(&w[..2]).unwrap() && y.contains(&w[2..]).unwrap());
        }
    }

    #[test]
    fn de_morgan((x, y) in shape().prop_flat_map(|(k, ell)| (lang_of(k, ell), lang_of(k, ell)))) {
        let both = x.and(&y).unwrap();
        if !both.is_empty() && !both.is_full() && !x.is_full() && !y.is_full() {
            let lhs = block_complement(&both).unwrap();
            let rhs = min_dfa_from_bitmap(&x.complement().or(&y.complement()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn synthesized_automata(l in nonempty()) {
        let dfa = min_dfa_from_bitmap(&l).unwrap();
        let widths = dfa.validate().unwrap();
        let sets = l.factor_sets();
        for i in 0..=l.ell() {
            prop_assert_eq!(widths.at_rank(i), sets.rank(i).len());
        }
        prop_assert_eq!(dfa.dsc(), sets.total() + 1);
        prop_assert_eq!(dfa.minimize(), dfa.clone());
        prop_assert_eq!(dfa.language().unwrap(), l.clone());
        prop_assert_eq!(indistinguishable(&dfa), None);

        let nfa = min_nfa_from_bitmap(&l, &CoverOptions::default()).unwrap();
        nfa.validate().unwrap();
        prop_assert_eq!(nfa.language().unwrap(), l.clone());
        prop_assert_eq!(nfa.determinize().minimize(), dfa.clone());
        let r = measure(&l).unwrap();
        prop_assert!(r.nsc < r.dsc);
    }

    #[test]
    fn cover_legality(l in nonempty()) {
        let sets = l.factor_sets();
        let cs = covers(&l, &CoverOptions::default()).unwrap();
        for (i, c) in cs.iter().enumerate() {
            prop_assert!(c.verify());
            prop_assert!(c.len() <= sets.rank(i).len());
            if i == 0 {
                continue;
            }
            let below: BTreeSet<&BitVec> = sets.rank(i - 1).iter().collect();
            for m in &c.members {
                let block = m.len() / l.k();
                for t in 0..l.k() {
                    let piece = m.slice(t * block, block).to_bitvec();
                    prop_assert!(piece.is_zero() || below.contains(&piece));
                }
            }
        }
    }

    #[test]
    fn removal_moves_widths_by_one(l in nonempty(), pick in any::<u64>()) {
        let members = l.to_words();
        let w = &members[(pick % members.len() as u64) as usize];
        let removed = l.toggle_word(w).unwrap();
        let (a, b) = (l.factor_sets(), removed.factor_sets());
        for i in 0..=l.ell() {
            prop_assert!(a.rank(i).len().abs_diff(b.rank(i).len()) <= 1);
        }
    }

    #[test]
    fn records_round_trip(l in nonempty()) {
        let dfa = min_dfa_from_bitmap(&l).unwrap();
        let text = dfa.to_record().to_json().unwrap();
        let back = RankedDfa::try_from_record(&AutomatonRecord::from_json(&text).unwrap()).unwrap();
        prop_assert_eq!(back, dfa);
        let nfa = min_nfa_from_bitmap(&l, &CoverOptions::default()).unwrap();
        let back = RankedNfa::try_from_record(&nfa.to_record()).unwrap();
        prop_assert_eq!(back.language().unwrap(), l);
    }

    #[test]
    fn general_minimize_idempotent(l in nonempty()) {
        let star = star_dfa(&min_dfa_from_bitmap(&l).unwrap());
        let again = star.minimize();
        prop_assert_eq!(again.num_states(), star.num_states());
        prop_assert!(again.equivalent(&star).unwrap());
        let back = GeneralDfa::try_from_record(&star.to_record()).unwrap();
        prop_assert!(back.equivalent(&star).unwrap());
    }
}

#[test]
fn determinize_exhaustive_small() {
    for (k, ell) in [(2usize, 1usize), (2, 2), (2, 3), (3, 1), (3, 2)] {
        let n = k.pow(ell as u32);
        for v in 1..(1u64 << n) {
            let l = BlockLanguage::new(k, ell, BitVec::from_u64(v, n)).unwrap();
            let nfa = min_nfa_from_bitmap(&l, &CoverOptions::default()).unwrap();
            assert_eq!(nfa.determinize().language().unwrap(), l);
            assert_eq!(min_dfa_from_bitmap(&l).unwrap().reverse().determinize().language().unwrap(), l.reversal());
        }
    }
}
