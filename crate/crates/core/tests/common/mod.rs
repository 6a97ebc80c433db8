//! Brute-force oracles and seeded generators shared by the integration
//! tests. Nothing here calls the library's own decision procedures.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use hyperlang::cfg::{Cfg, GSym, TrackCfg};
use hyperlang::cfhg::Cfhg;
use hyperlang::letter::Letter;
use hyperlang::model::{Alphabet, Quantifier, QuantifierPrefix, Sym, TrackLetter, VarSet, Word};
use hyperlang::nfa::Nfa;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).unwrap()
}

/// Letters an automaton over `frame` may read, the all-pad letter included.
pub fn letters_with_pad<L: Letter>(alphabet: &Alphabet, frame: &L::Frame) -> Vec<L> {
    let mut v = L::universe(alphabet, frame);
    v.push(L::all_pad(frame));
    v
}

/// Every word over `letters` of length at most `n`.
pub fn all_words<L: Clone>(letters: &[L], n: usize) -> Vec<Vec<L>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for l in letters {
                let mut x: Vec<L> = w.clone();
                x.push(l.clone());
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Path search over the raw transition list.
pub fn nfa_accepts<L: Letter>(a: &Nfa<L>, w: &[L]) -> bool {
    let edges: Vec<(usize, L, usize)> = a.transitions().map(|(p, l, q)| (p, l.clone(), q)).collect();
    let mut stack: Vec<(usize, usize)> = a.initial().iter().map(|&q| (q, 0)).collect();
    let mut seen = HashSet::new();
    while let Some((q, i)) = stack.pop() {
        if !seen.insert((q, i)) {
            continue;
        }
        if i == w.len() {
            if a.accepting().contains(&q) {
                return true;
            }
            continue;
        }
        for (p, l, r) in &edges {
            if *p == q && *l == w[i] {
                stack.push((*r, i + 1));
            }
        }
    }
    false
}

pub fn nfa_language<L: Letter>(a: &Nfa<L>, letters: &[L], n: usize) -> BTreeSet<Vec<L>> {
    all_words(letters, n).into_iter().filter(|w| nfa_accepts(a, w)).collect()
}

pub fn random_nfa<L: Letter>(r: &mut ChaCha8Rng, alphabet: &Alphabet, frame: &L::Frame, letters: &[L], max_states: usize) -> Nfa<L> {
    let mut a = Nfa::new(alphabet.clone(), frame.clone());
    let n = r.gen_range(1..=max_states);
    for i in 0..n {
        a.add_state(format!("s{i}"));
    }
    a.set_initial(0);
    if r.gen_bool(0.3) && n > 1 {
        a.set_initial(r.gen_range(1..n));
    }
    for q in 0..n {
        if r.gen_bool(0.4) {
            a.set_accepting(q);
        }
        for l in letters {
            if r.gen_bool(0.35) {
                a.add_transition(q, l.clone(), r.gen_range(0..n));
            }
        }
    }
    a
}

/// Words of length at most `n`, by breadth-first leftmost derivation.
/// Exact when no rule has an empty right-hand side except possibly the
/// start's and the start never occurs on a right-hand side.
pub fn cfg_language<L: Letter>(g: &Cfg<L>, n: usize) -> BTreeSet<Vec<L>> {
    let mut out = BTreeSet::new();
    let start: Vec<GSym<L>> = vec![GSym::V(g.start())];
    let mut seen: HashSet<Vec<GSym<L>>> = HashSet::new();
    let mut queue = VecDeque::from([start]);
    while let Some(form) = queue.pop_front() {
        let Some(pos) = form.iter().position(|s| s.var().is_some()) else {
            let w: Vec<L> = form.iter().map(|s| s.terminal().unwrap().clone()).collect();
            if w.len() <= n {
                out.insert(w);
            }
            continue;
        };
        let v = form[pos].var().unwrap();
        for r in g.rules().iter().filter(|r| r.lhs == v) {
            let mut next = form[..pos].to_vec();
            next.extend(r.rhs.iter().cloned());
            next.extend(form[pos + 1..].iter().cloned());
            // Every symbol yields at least one letter.
            if next.len() > n {
                continue;
            }
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    out
}

/// Checks the precondition of [`cfg_language`].
pub fn epsilon_free_except_start<L: Letter>(g: &Cfg<L>) -> bool {
    g.rules().iter().all(|r| !r.rhs.is_empty() || r.lhs == g.start())
        && (!g.has_start_epsilon() || g.rules().iter().all(|r| !r.rhs.contains(&GSym::V(g.start()))))
}

/// A random grammar without `ε`-rules; some variables may be useless.
pub fn random_cfg<L: Letter>(r: &mut ChaCha8Rng, alphabet: &Alphabet, frame: &L::Frame, letters: &[L]) -> Cfg<L> {
    let mut g = Cfg::new(alphabet.clone(), frame.clone(), "S");
    let nv = r.gen_range(1..=3);
    for i in 1..nv {
        g.add_var(format!("A{i}")).unwrap();
    }
    for v in 0..nv {
        for _ in 0..r.gen_range(1..=3) {
            let len = r.gen_range(1..=3);
            let rhs = (0..len)
                .map(|_| {
                    if r.gen_bool(0.35) {
                        GSym::V(r.gen_range(0..nv))
                    } else {
                        GSym::T(letters.choose(r).unwrap().clone())
                    }
                })
                .collect();
            g.add_rule(v, rhs).unwrap();
        }
    }
    g
}

/// Track letters biased towards `#`-free ones.
pub fn track_letter_pool(alphabet: &Alphabet, vars: &VarSet) -> Vec<TrackLetter> {
    let all = TrackLetter::universe(alphabet, vars);
    let mut pool: Vec<TrackLetter> = all.iter().filter(|l| l.pad_positions().next().is_none()).cloned().collect();
    let free = pool.clone();
    pool.extend(free);
    pool.extend(all);
    pool
}

/// Tracks of a word assignment with every `#` removed.
pub fn strip_tracks(w: &[TrackLetter], k: usize) -> Vec<Word> {
    (0..k)
        .map(|i| w.iter().map(|l| l.get(i).clone()).filter(|s| !s.is_pad()).collect())
        .collect()
}

/// Word tuples derived by the grammar, from derivations of length `≤ n`.
pub fn derived_tuples(g: &Cfg<TrackLetter>, n: usize) -> BTreeSet<Vec<Word>> {
    let k = g.frame().len();
    cfg_language(g, n).iter().map(|w| strip_tracks(w, k)).collect()
}

/// Quantifier evaluation over every assignment, no short-circuiting.
pub fn eval_naive(prefix: &[Quantifier], words: &[Word], leaf: &mut dyn FnMut(&[Word]) -> bool) -> bool {
    fn go(prefix: &[Quantifier], words: &[Word], acc: &mut Vec<Word>, leaf: &mut dyn FnMut(&[Word]) -> bool) -> bool {
        let Some((q, rest)) = prefix.split_first() else {
            return leaf(acc);
        };
        let results: Vec<bool> = words
            .iter()
            .map(|w| {
                acc.push(w.clone());
                let v = go(rest, words, acc, leaf);
                acc.pop();
                v
            })
            .collect();
        match q {
            Quantifier::Forall => results.iter().all(|&b| b),
            Quantifier::Exists => results.iter().any(|&b| b),
        }
    }
    go(prefix, words, &mut Vec::new(), leaf)
}

/// Non-empty subsets of `universe`, in bitmask order.
pub fn subsets(universe: &[Word]) -> Vec<Vec<Word>> {
    (1u32..(1 << universe.len()))
        .map(|m| (0..universe.len()).filter(|i| m & (1 << i) != 0).map(|i| universe[i].clone()).collect())
        .collect()
}

pub fn syms(s: &str) -> Vec<Sym> {
    hyperlang::model::word(s)
}

/// Seeded random two-track hypergrammars with a random prefix.
pub fn random_cfhgs(seed: u64, count: usize) -> Vec<Cfhg> {
    let mut r = rng(seed);
    let vars = VarSet::new(["x1", "x2"]).unwrap();
    let pool = track_letter_pool(&ab(), &vars);
    (0..count)
        .map(|_| {
            let g: TrackCfg = random_cfg(&mut r, &ab(), &vars, &pool);
            let q = (0..2)
                .map(|_| if r.gen_bool(0.5) { Quantifier::Forall } else { Quantifier::Exists })
                .collect();
            Cfhg::new(QuantifierPrefix::from_quantifiers(&vars, q).unwrap(), g).unwrap()
        })
        .collect()
}

/// The first `count` ranked grammars of a seeded stream.
pub fn random_ranked(seed: u64, count: usize) -> Vec<Cfhg> {
    let mut out = Vec::new();
    let mut s = seed;
    while out.len() < count {
        out.extend(random_cfhgs(s, 10).into_iter().filter(|g| g.is_ranked() && !g.grammar().rules().is_empty()));
        s += 1;
    }
    out.truncate(count);
    out
}
