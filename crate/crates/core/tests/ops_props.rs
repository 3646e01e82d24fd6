use blockset::ops::{evaluate, in_star, Op, OpResult};
use blockset::{BitVec, BlockLanguage, CoverOptions, RankedAutomaton};
use proptest::prelude::*;

fn lang(k: usize, ell: usize) -> impl Strategy<Value = BlockLanguage> {
    let n = k.pow(ell as u32);
    proptest::collection::vec(any::<bool>(), n)
        .prop_filter("nonempty", |v| v.iter().any(|&b| b))
        .prop_map(move |v| BlockLanguage::new(k, ell, BitVec::from_bools(v)).unwrap())
}

fn shape() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![(Just(2usize), 1usize..=4), (Just(3usize), 1usize..=2), (Just(1usize), 1usize..=3)]
}

fn pair() -> impl Strategy<Value = (BlockLanguage, BlockLanguage)> {
    shape().prop_flat_map(|(k, ell)| (lang(k, ell), lang(k, ell)))
}

fn check(op: Op, operands: &[BlockLanguage]) {
    match evaluate(&op, operands, &CoverOptions::default()) {
        Ok(run) => {
            assert!(run.outcome.violations().is_empty(), "{:?}\n{:?}", run.outcome.violations(), operands);
            if let OpResult::Block { lang, nfa, .. } = &run.result {
                assert_eq!(&nfa.language().unwrap(), lang);
            }
        }
        Err(blockset::Error::EmptyLanguage) | Err(blockset::Error::NoChange(_)) => {}
        Err(e) => panic!("{op:?}: {e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn binary_ops_agree((a, b) in pair()) {
        for op in [Op::Union, Op::Intersect] {
            check(op, &[a.clone(), b.clone()]);
        }
    }

    #[test]
    fn concat_agrees((a, b) in (1usize..=2, 1usize..=3, 1usize..=3).prop_flat_map(|(k, l1, l2)| (lang(k, l1), lang(k, l2)))) {
        check(Op::Concat, &[a, b]);
    }

    #[test]
    fn unary_ops_agree((k, ell) in shape(), bits in any::<u64>(), w in any::<u64>()) {
        let n = k.pow(ell as u32);
        let l = BlockLanguage::new(k, ell, BitVec::from_bools((0..n).map(|i| bits >> (i % 64) & 1 == 1 || i == 0))).unwrap();
        let word = l.alphabet().index_to_word(ell, w % n as u64).unwrap();
        for op in [Op::Reverse, Op::Complement, Op::Star, Op::Plus, Op::AddWord(word.clone()), Op::RemoveWord(word.clone())] {
            check(op, std::slice::from_ref(&l));
        }
    }

    #[test]
    fn star_matches_membership(l in lang(2, 2), w in proptest::collection::vec(0usize..2, 0..=8)) {
        let run = evaluate(&Op::Star, std::slice::from_ref(&l), &CoverOptions::default()).unwrap();
        if let OpResult::General { dfa, nfa } = run.result {
            prop_assert_eq!(dfa.accepts(&w), in_star(&l, &w, false));
            prop_assert_eq!(nfa.accepts(&w), in_star(&l, &w, false));
        }
    }
}
