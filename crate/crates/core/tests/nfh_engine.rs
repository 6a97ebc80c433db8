//! Hyperautomaton acceptance against a naive quantifier expansion.

mod common;

use common::*;
use hyperlang::fixtures;
use hyperlang::model::{pad_to_sync, Alphabet, Quantifier, QuantifierPrefix, TrackLetter, VarSet, Word};
use hyperlang::nfa::Nfa;
use hyperlang::nfh::{Nfh, NfhError, PROBE_UNIVERSE_CAP};
use proptest::prelude::*;
use rand::Rng;

fn random_nfh(seed: u64, alphabet: &Alphabet, quantifiers: Option<Vec<Quantifier>>) -> Nfh {
    let mut r = rng(seed);
    let k = quantifiers.as_ref().map_or_else(|| r.gen_range(1..=3), Vec::len);
    let names: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let vars = VarSet::new(names).unwrap();
    let letters = letters_with_pad::<TrackLetter>(alphabet, &vars);
    let a = random_nfa(&mut r, alphabet, &vars, &letters, 3);
    let qs = quantifiers.unwrap_or_else(|| {
        (0..k)
            .map(|_| if r.gen_bool(0.5) { Quantifier::Forall } else { Quantifier::Exists })
            .collect()
    });
    Nfh::new(QuantifierPrefix::from_quantifiers(&vars, qs).unwrap(), a).unwrap()
}

fn naive(n: &Nfh, lang: &[Word]) -> bool {
    let vars = n.vars().clone();
    eval_naive(n.prefix().quantifiers(), lang, &mut |ws| {
        nfa_accepts(n.underlying(), pad_to_sync(vars.clone(), ws).unwrap().letters())
    })
}

fn a_only() -> Alphabet {
    Alphabet::new(["a"]).unwrap()
}

#[test]
fn infinite_a_rejects_every_finite_language() {
    let n = fixtures::infinite_a();
    let universe = a_only().words_up_to(4);
    let all = subsets(&universe);
    assert_eq!(all.len(), 31);
    for lang in &all {
        assert!(!n.accepts(lang).unwrap(), "accepted {lang:?}");
        assert!(!naive(&n, lang));
    }
    assert!(n.probe(4).unwrap().is_empty());
}

#[test]
fn existential_witness_suffices() {
    let alphabet = ab();
    let a = Nfa::word_automaton(&alphabet, &syms("a")).on_track("x").unwrap();
    let vars = a.vars().clone();
    let n = Nfh::new(QuantifierPrefix::from_quantifiers(&vars, vec![Quantifier::Exists]).unwrap(), a).unwrap();
    assert!(n.accepts(&[syms("a"), syms("b")]).unwrap());
    assert!(!n.accepts(&[syms("b")]).unwrap());
}

#[test]
fn acceptance_matches_naive_expansion() {
    let alphabet = ab();
    let universe = alphabet.words_up_to(2);
    for seed in 0..40 {
        let n = random_nfh(seed, &alphabet, None);
        for lang in subsets(&universe).into_iter().step_by(3) {
            assert_eq!(n.accepts(&lang).unwrap(), naive(&n, &lang), "seed {seed}, {lang:?}");
        }
    }
}

#[test]
fn probe_is_the_filtered_subset_list() {
    let alphabet = ab();
    for seed in 100..110 {
        let n = random_nfh(seed, &alphabet, None);
        let want: Vec<Vec<Word>> = subsets(&alphabet.words_up_to(1)).into_iter().filter(|l| naive(&n, l)).collect();
        let mut got = n.probe(1).unwrap();
        let mut want = want;
        got.iter_mut().for_each(|l| l.sort());
        want.iter_mut().for_each(|l| l.sort());
        got.sort();
        want.sort();
        assert_eq!(got, want, "seed {seed}");
    }
}

#[test]
fn universal_prefixes_are_closed_under_subsets() {
    let alphabet = ab();
    let universe = alphabet.words_up_to(1);
    for seed in 200..240 {
        let n = random_nfh(seed, &alphabet, Some(vec![Quantifier::Forall, Quantifier::Forall]));
        for lang in subsets(&universe) {
            if n.accepts(&lang).unwrap() {
                for sub in subsets(&lang) {
                    assert!(n.accepts(&sub).unwrap(), "seed {seed}: {lang:?} accepted, {sub:?} not");
                }
            }
        }
    }
}

#[test]
fn existential_prefixes_are_closed_under_supersets() {
    let alphabet = ab();
    let universe = alphabet.words_up_to(1);
    for seed in 300..340 {
        let n = random_nfh(seed, &alphabet, Some(vec![Quantifier::Exists, Quantifier::Exists]));
        for lang in subsets(&universe) {
            if n.accepts(&lang).unwrap() {
                for sup in subsets(&universe).iter().filter(|s| lang.iter().all(|w| s.contains(w))) {
                    assert!(n.accepts(sup).unwrap(), "seed {seed}: {lang:?} accepted, {sup:?} not");
                }
            }
        }
    }
}

#[test]
fn single_quantifier_kinds_never_pin_a_two_word_language() {
    let alphabet = ab();
    for seed in 400..460 {
        let qs = if seed % 2 == 0 {
            vec![Quantifier::Forall; 2]
        } else {
            vec![Quantifier::Exists; 2]
        };
        let probed = random_nfh(seed, &alphabet, Some(qs)).probe(1).unwrap();
        assert!(!(probed.len() == 1 && probed[0].len() >= 2), "seed {seed}: {probed:?}");
    }
}

#[test]
fn empty_and_oversized_inputs_are_rejected() {
    let n = fixtures::infinite_a();
    assert_eq!(n.accepts(&[]), Err(NfhError::EmptyLanguage));
    assert!(n.accepts(&[syms("b")]).is_err());
    let big = random_nfh(1, &ab(), None);
    assert!(matches!(
        big.probe(4),
        Err(NfhError::UniverseTooLarge { cap: PROBE_UNIVERSE_CAP, .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn duplicate_words_do_not_change_acceptance(seed in any::<u64>(), mask in 1u32..128) {
        let alphabet = ab();
        let universe = alphabet.words_up_to(2);
        let lang: Vec<Word> = (0..7).filter(|i| mask & (1 << i) != 0).map(|i| universe[i].clone()).collect();
        let n = random_nfh(seed, &alphabet, None);
        let mut doubled = lang.clone();
        doubled.extend(lang.iter().rev().cloned());
        prop_assert_eq!(n.accepts(&doubled).unwrap(), n.accepts(&lang).unwrap());
        prop_assert_eq!(n.accepts(&lang).unwrap(), naive(&n, &lang));
    }
}
