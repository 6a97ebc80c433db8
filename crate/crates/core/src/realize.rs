//! Constructions that compile a described language `L` into a hyperautomaton
//! whose hyperlanguage is exactly `{L}`.
//!
//! Relations between words are given as two-track automata over `(x, y)`:
//! the pair `(u, v)` is in the relation iff the automaton accepts the
//! suffix-padded encoding of `u` and `v`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{
    strip_hash, sync_letters, Alphabet, ModelError, Quantifier, QuantifierPrefix, Sym, TrackLetter, VarSet, Word,
};
use crate::nfa::{compose_free, compose_free_all, compose_sync, Nfa, NfaError, StateId, SymDfa, TrackNfa};
use crate::nfh::{Nfh, NfhError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("the language must not be empty")]
    EmptyLanguage,
    #[error("automaton does not recognize a prefix-closed language: {0}")]
    NotPrefixClosed(String),
    #[error("{what} is {value}, above the configured cap of {cap}")]
    CapExceeded { what: &'static str, value: usize, cap: usize },
    #[error("successor automaton is not functional: {0}")]
    NotFunctional(String),
    #[error("invalid specification: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Nfa(#[from] NfaError),
    #[error(transparent)]
    Nfh(#[from] NfhError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Size limits for the exponential constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// States of a trimmed automaton before subset construction.
    pub determinize_states: usize,
    /// Number of simple-path words.
    pub minimal_words: usize,
    /// Total number of simple cycles over all states.
    pub cycles: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            determinize_states: 12,
            minimal_words: 8,
            cycles: 8,
        }
    }
}

fn cap(what: &'static str, value: usize, cap: usize) -> Result<(), RealizeError> {
    if value > cap {
        Err(RealizeError::CapExceeded { what, value, cap })
    } else {
        Ok(())
    }
}

fn var_set(names: &[String]) -> Result<VarSet, ModelError> {
    VarSet::new(names.iter())
}

fn word_on(alphabet: &Alphabet, var: &str, w: &Word) -> Result<TrackNfa, NfaError> {
    Nfa::word_automaton(alphabet, w).on_track(var)
}

fn prefix_of(vars: &VarSet, qs: Vec<Quantifier>) -> Result<QuantifierPrefix, ModelError> {
    QuantifierPrefix::from_quantifiers(vars, qs)
}

/// Pairs `(u, v)` of a two-track relation with `max(|u|,|v|) ≤ max_len`.
pub fn relation_pairs(relation: &TrackNfa, max_len: usize) -> BTreeSet<(Word, Word)> {
    relation
        .accepted_up_to(max_len)
        .into_iter()
        .filter(|w| crate::model::is_synchronous(w))
        .map(|w| {
            let x: Word = w.iter().map(|l| l.get(0).clone()).collect();
            let y: Word = w.iter().map(|l| l.get(1).clone()).collect();
            (strip_hash(&x), strip_hash(&y))
        })
        .collect()
}

/// Whether `(u, v)` is in the relation.
pub fn relates(relation: &TrackNfa, u: &Word, v: &Word) -> bool {
    relation.accepts(&sync_letters(&[u, v]))
}

fn check_relation(relation: &TrackNfa) -> Result<(), RealizeError> {
    if relation.vars().len() != 2 {
        return Err(RealizeError::BadSpec(format!(
            "a relation runs on two tracks, got {}",
            relation.vars().len()
        )));
    }
    Ok(())
}

/// `∀x ∃y` over the cycle `w1 → w2 → … → wk → w1`.
pub fn realize_finite(alphabet: &Alphabet, lang: &[Word]) -> Result<Nfh, RealizeError> {
    let mut words = lang.to_vec();
    words.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    words.dedup();
    if words.is_empty() {
        return Err(RealizeError::EmptyLanguage);
    }
    for w in &words {
        alphabet.check_word(w)?;
    }
    let mut parts = Vec::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        let next = &words[(i + 1) % words.len()];
        parts.push(compose_free(&word_on(alphabet, "x", w)?, &word_on(alphabet, "y", next)?)?);
    }
    let underlying = Nfa::union_all(&parts)?;
    let vars = underlying.vars().clone();
    Ok(Nfh::new(
        prefix_of(&vars, vec![Quantifier::Forall, Quantifier::Exists])?,
        underlying,
    )?)
}

/// A language listed as `w1, f(w1), f(f(w1)), …`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedLanguageSpec {
    pub first_word: Word,
    /// Two-track automaton for the graph of `f`.
    pub successor: TrackNfa,
}

impl OrderedLanguageSpec {
    /// Bounded check that every word has at most one successor.
    pub fn check_functional(&self, max_len: usize) -> Result<(), RealizeError> {
        check_relation(&self.successor)?;
        let mut seen: BTreeMap<Word, Word> = BTreeMap::new();
        for (u, v) in relation_pairs(&self.successor, max_len) {
            if let Some(prev) = seen.insert(u.clone(), v.clone()) {
                return Err(RealizeError::NotFunctional(format!(
                    "`{}` maps to both `{}` and `{}`",
                    crate::model::show_word(&u),
                    crate::model::show_word(&prev),
                    crate::model::show_word(&v)
                )));
            }
        }
        Ok(())
    }

    /// The first `n` words of the chain, stopping early when `f` is
    /// undefined within `max_len`.
    pub fn chain(&self, n: usize, max_len: usize) -> Vec<Word> {
        let pairs: BTreeMap<Word, Word> = relation_pairs(&self.successor, max_len).into_iter().collect();
        let mut out = vec![self.first_word.clone()];
        while out.len() < n {
            match pairs.get(out.last().unwrap()) {
                Some(v) => out.push(v.clone()),
                None => break,
            }
        }
        out
    }
}

/// `∃x1 ∀x2 ∃x3` over `A_{w1}[x1] ⊗ A_f[x2, x3]`.
pub fn realize_ordered(spec: &OrderedLanguageSpec) -> Result<Nfh, RealizeError> {
    check_relation(&spec.successor)?;
    let alphabet = spec.successor.alphabet();
    alphabet.check_word(&spec.first_word)?;
    let first = word_on(alphabet, "x1", &spec.first_word)?;
    let f = spec.successor.rename(VarSet::new(["x2", "x3"])?)?;
    let underlying = compose_free(&first, &f)?;
    let vars = underlying.vars().clone();
    Ok(Nfh::new(
        prefix_of(&vars, vec![Quantifier::Exists, Quantifier::Forall, Quantifier::Exists])?,
        underlying,
    )?)
}

fn pair_bits(i: usize) -> u64 {
    let n = i * i.saturating_sub(1) / 2;
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn pair_index(a: usize, b: usize) -> usize {
    // a < b
    b * (b - 1) / 2 + a
}

/// Marks every pair of copies whose y-letters differ.
fn mark_distinct(done: u64, ys: &[&Sym]) -> u64 {
    let mut d = done;
    for b in 0..ys.len() {
        for a in 0..b {
            if ys[a] != ys[b] {
                d |= 1 << pair_index(a, b);
            }
        }
    }
    d
}

/// Moves of a padded relation copy from `q`, grouped by x-letter.
fn moves_by_x(rel: &TrackNfa, q: StateId) -> BTreeMap<Sym, Vec<(Sym, StateId)>> {
    let mut out: BTreeMap<Sym, Vec<(Sym, StateId)>> = BTreeMap::new();
    for (l, ts) in rel.transitions_from(q) {
        for &t in ts {
            out.entry(l.get(0).clone()).or_default().push((l.get(1).clone(), t));
        }
    }
    out
}

/// All ways `i` relation copies can move together on x-letter `x`.
fn joint_moves(rel: &TrackNfa, qs: &[StateId], x: &Sym) -> Vec<(Vec<Sym>, Vec<StateId>)> {
    let mut combos: Vec<(Vec<Sym>, Vec<StateId>)> = vec![(Vec::new(), Vec::new())];
    for &q in qs {
        let m = moves_by_x(rel, q);
        let Some(opts) = m.get(x) else { return Vec::new() };
        let mut next = Vec::with_capacity(combos.len() * opts.len());
        for (ys, ts) in &combos {
            for (y, t) in opts {
                let mut ys2 = ys.clone();
                ys2.push(y.clone());
                let mut ts2 = ts.clone();
                ts2.push(*t);
                next.push((ys2, ts2));
            }
        }
        combos = next;
    }
    combos
}

fn initial_tuples(rel: &TrackNfa, i: usize) -> Vec<Vec<StateId>> {
    let mut out: Vec<Vec<StateId>> = vec![Vec::new()];
    for _ in 0..i {
        out = out
            .into_iter()
            .flat_map(|t| {
                rel.initial().iter().map(move |&q| {
                    let mut t2 = t.clone();
                    t2.push(q);
                    t2
                })
            })
            .collect();
    }
    out
}

fn x_letters(rel: &TrackNfa, q: StateId) -> BTreeSet<Sym> {
    rel.transitions_from(q).keys().map(|l| l.get(0).clone()).collect()
}

/// Words with at least `i` distinct successors, as a one-track automaton
/// over the relation's first variable.
pub fn successors_ge(relation: &TrackNfa, i: usize) -> Result<TrackNfa, RealizeError> {
    check_relation(relation)?;
    if i == 0 {
        return Err(RealizeError::BadSpec("successor count must be at least 1".into()));
    }
    if i * (i - 1) / 2 > 64 {
        return Err(RealizeError::CapExceeded { what: "successor count", value: i, cap: 11 });
    }
    let rel = relation.pad_suffix();
    let full = pair_bits(i);
    let xvar = VarSet::new([relation.vars().names()[0].clone()])?;
    let starts: Vec<(Vec<StateId>, u64)> = initial_tuples(&rel, i).into_iter().map(|t| (t, 0)).collect();
    let product = Nfa::explore(
        rel.alphabet().clone(),
        xvar,
        starts,
        |(qs, d): &(Vec<StateId>, u64)| {
            let names: Vec<&str> = qs.iter().map(|&q| rel.state_name(q)).collect();
            format!("({};{d:b})", names.join(","))
        },
        |(qs, d)| *d == full && qs.iter().all(|&q| rel.is_accepting(q)),
        |(qs, d)| {
            let mut out = Vec::new();
            let xs = x_letters(&rel, qs[0]);
            for x in xs {
                for (ys, ts) in joint_moves(&rel, qs, &x) {
                    let yr: Vec<&Sym> = ys.iter().collect();
                    out.push((TrackLetter::new(vec![x.clone()]), (ts, mark_distinct(*d, &yr))));
                }
            }
            out
        },
    );
    Ok(product.trim().strip_trailing_pads())
}

/// Words with exactly `i` distinct successors.
pub fn successors_exact(relation: &TrackNfa, i: usize, caps: &Caps) -> Result<TrackNfa, RealizeError> {
    let ge = successors_ge(relation, i)?;
    let more = successors_ge(relation, i + 1)?.trim();
    if more.is_empty() {
        return Ok(ge);
    }
    cap("states before subset construction", more.num_states(), caps.determinize_states)?;
    let not_more = more.determinize().complement().to_nfa();
    Ok(ge.intersect(&not_more)?.trim())
}

/// A language generated from `m` minimal words by a relation giving each
/// word at most `k` successors.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialOrderSpec {
    pub minimal_words: Vec<Word>,
    pub relation: TrackNfa,
    pub max_successors: usize,
}

impl PartialOrderSpec {
    /// Bounded sanity check: no minimal word has a proper predecessor among
    /// pairs with both words of length at most `max_len`.
    pub fn check_minimal(&self, max_len: usize) -> Result<(), RealizeError> {
        check_relation(&self.relation)?;
        if self.minimal_words.is_empty() || self.max_successors == 0 {
            return Err(RealizeError::BadSpec("need m ≥ 1 and k ≥ 1".into()));
        }
        for (u, v) in relation_pairs(&self.relation, max_len) {
            if u != v && self.minimal_words.contains(&v) {
                return Err(RealizeError::BadSpec(format!(
                    "minimal word `{}` has predecessor `{}`",
                    crate::model::show_word(&v),
                    crate::model::show_word(&u)
                )));
            }
        }
        Ok(())
    }

    /// Words reachable from the minimal words by relation steps, within
    /// the length bound.
    pub fn closure(&self, max_len: usize) -> BTreeSet<Word> {
        let pairs = relation_pairs(&self.relation, max_len);
        let mut seen: BTreeSet<Word> = self
            .minimal_words
            .iter()
            .filter(|w| w.len() <= max_len)
            .cloned()
            .collect();
        let mut stack: Vec<Word> = seen.iter().cloned().collect();
        while let Some(u) = stack.pop() {
            for (a, b) in &pairs {
                if *a == u && seen.insert(b.clone()) {
                    stack.push(b.clone());
                }
            }
        }
        seen
    }
}

/// Tracks `(z, y1..yk)`: `z` has exactly `i` successors, `y1..yi` are
/// pairwise distinct successors and `y(i+1)..yk` copy `z`.
fn successor_block(
    relation: &TrackNfa,
    exact: &TrackNfa,
    i: usize,
    k: usize,
    vars: VarSet,
) -> TrackNfa {
    let rel = relation.pad_suffix();
    let zc = exact.pad_suffix();
    let full = pair_bits(i);
    let mut starts = Vec::new();
    for &e in zc.initial() {
        for t in initial_tuples(&rel, i) {
            starts.push((e, t, 0u64));
        }
    }
    let alphabet = rel.alphabet().merge(zc.alphabet());
    Nfa::explore(
        alphabet,
        vars,
        starts,
        |(e, qs, d): &(StateId, Vec<StateId>, u64)| {
            let names: Vec<&str> = qs.iter().map(|&q| rel.state_name(q)).collect();
            format!("({};{};{d:b})", zc.state_name(*e), names.join(","))
        },
        |(e, qs, d)| *d == full && zc.is_accepting(*e) && qs.iter().all(|&q| rel.is_accepting(q)),
        |(e, qs, d)| {
            let mut out = Vec::new();
            for (zl, es) in zc.transitions_from(*e) {
                let z = zl.get(0);
                for (ys, ts) in joint_moves(&rel, qs, z) {
                    let yr: Vec<&Sym> = ys.iter().collect();
                    let d2 = mark_distinct(*d, &yr);
                    let mut letter = vec![z.clone()];
                    letter.extend(ys.iter().cloned());
                    letter.extend(std::iter::repeat_n(z.clone(), k - i));
                    let letter = TrackLetter::new(letter);
                    for &e2 in es {
                        out.push((letter.clone(), (e2, ts.clone(), d2)));
                    }
                }
            }
            out
        },
    )
}

/// `∃x1..xm ∀z ∃y1..yk` over `⋃_i A_U ⊗ B_i`.
pub fn realize_partially_ordered(spec: &PartialOrderSpec, caps: &Caps) -> Result<Nfh, RealizeError> {
    check_relation(&spec.relation)?;
    let m = spec.minimal_words.len();
    let k = spec.max_successors;
    if m == 0 || k == 0 {
        return Err(RealizeError::BadSpec("need m ≥ 1 and k ≥ 1".into()));
    }
    let alphabet = spec.relation.alphabet().clone();
    let xs: Vec<String> = (1..=m).map(|j| format!("x{j}")).collect();
    let mut tail: Vec<String> = vec!["z".into()];
    tail.extend((1..=k).map(|j| format!("y{j}")));

    let mins: Vec<TrackNfa> = spec
        .minimal_words
        .iter()
        .zip(&xs)
        .map(|(w, v)| {
            alphabet.check_word(w)?;
            Ok(word_on(&alphabet, v, w)?)
        })
        .collect::<Result<_, RealizeError>>()?;
    let min_refs: Vec<&TrackNfa> = mins.iter().collect();
    let a_u = compose_free_all(&min_refs)?;

    let tail_vars = var_set(&tail)?;
    let mut parts = Vec::new();
    for i in 1..=k {
        let exact = successors_exact(&spec.relation, i, caps)?;
        if exact.is_empty() {
            continue;
        }
        let block = successor_block(&spec.relation, &exact, i, k, tail_vars.clone()).trim();
        if block.is_empty() {
            continue;
        }
        parts.push(compose_free(&a_u, &block)?.trim());
    }
    let mut all = xs.clone();
    all.extend(tail.iter().cloned());
    let vars = var_set(&all)?;
    let underlying = if parts.is_empty() {
        let mut dead = Nfa::new(alphabet, vars.clone());
        let q = dead.add_state("dead");
        dead.set_initial(q);
        dead
    } else {
        Nfa::union_all(&parts)?
    };
    let mut qs = vec![Quantifier::Exists; m];
    qs.push(Quantifier::Forall);
    qs.extend(std::iter::repeat_n(Quantifier::Exists, k));
    Ok(Nfh::new(prefix_of(&vars, qs)?, underlying)?)
}

/// The trimmed DFA, after checking that every live state accepts.
fn prefix_closed_core(a: &SymDfa) -> Result<SymDfa, RealizeError> {
    let t = a.trim();
    if t.accepting().is_empty() {
        return Err(RealizeError::EmptyLanguage);
    }
    if let Some(q) = (0..t.num_states()).find(|&q| !t.is_accepting(q)) {
        return Err(RealizeError::NotPrefixClosed(format!(
            "state `{}` lies on a path to acceptance but does not accept",
            t.state_name(q)
        )));
    }
    Ok(t)
}

/// `(w, wσ)` for every extension in the language, and `(w, w)` where
/// `w` cannot be extended. The only minimal word is `ε`.
pub fn prefix_closed_relation(a: &SymDfa) -> Result<PartialOrderSpec, RealizeError> {
    let t = prefix_closed_core(a)?;
    let vars = VarSet::new(["x", "y"])?;
    let mut rel = Nfa::new(t.alphabet().clone(), vars);
    for q in 0..t.num_states() {
        rel.add_state(t.state_name(q).to_string());
    }
    let done = rel.add_state("p'");
    rel.set_accepting(done);
    rel.set_initial(t.initial());
    let mut k = 1;
    for q in 0..t.num_states() {
        let out = t.transitions_from(q);
        k = k.max(out.len());
        if out.is_empty() {
            rel.set_accepting(q);
        }
        for (s, &p) in out {
            rel.add_transition(q, TrackLetter::new(vec![s.clone(), s.clone()]), p);
            rel.add_transition(q, TrackLetter::new(vec![Sym::pad(), s.clone()]), done);
        }
    }
    Ok(PartialOrderSpec {
        minimal_words: vec![Vec::new()],
        relation: rel,
        max_successors: k,
    })
}

/// The polynomial `∃x ∀z ∃y1..yk` construction for prefix-closed
/// languages: `x` is `ε`, the `y`s copy `z`, and at the end of `z` one extra
/// letter lists every one-letter extension.
pub fn realize_prefix_closed_fast(a: &SymDfa) -> Result<Nfh, RealizeError> {
    let t = prefix_closed_core(a)?;
    let k = (0..t.num_states())
        .map(|q| t.transitions_from(q).len())
        .max()
        .unwrap_or(0)
        .max(1);
    let mut names = vec!["x".to_string(), "z".to_string()];
    names.extend((1..=k).map(|j| format!("y{j}")));
    let vars = var_set(&names)?;
    let mut u = Nfa::new(t.alphabet().clone(), vars.clone());
    for q in 0..t.num_states() {
        u.add_state(t.state_name(q).to_string());
    }
    let done = u.add_state("p'");
    u.set_accepting(done);
    u.set_initial(t.initial());
    for q in 0..t.num_states() {
        let out: Vec<(&Sym, &StateId)> = t.transitions_from(q).iter().collect();
        if out.is_empty() {
            u.set_accepting(q);
            continue;
        }
        for (s, &p) in &out {
            let mut l = vec![Sym::pad()];
            l.extend(std::iter::repeat_n((*s).clone(), k + 1));
            u.add_transition(q, TrackLetter::new(l), p);
        }
        // One witness tuple per state: successors in order, the last repeated.
        let mut l = vec![Sym::pad(), Sym::pad()];
        l.extend((0..k).map(|j| out[j.min(out.len() - 1)].0.clone()));
        u.add_transition(q, TrackLetter::new(l), done);
    }
    let mut qs = vec![Quantifier::Exists, Quantifier::Forall];
    qs.extend(std::iter::repeat_n(Quantifier::Exists, k));
    Ok(Nfh::new(prefix_of(&vars, qs)?, u)?)
}

/// Words read along simple paths from the initial state to an accepting
/// state, and for each state the words of its simple cycles.
pub fn simple_paths_and_cycles(t: &SymDfa) -> (Vec<Word>, BTreeMap<StateId, Vec<Word>>) {
    let mut paths = Vec::new();
    let mut stack = vec![(t.initial(), Vec::new(), BTreeSet::from([t.initial()]))];
    while let Some((q, w, seen)) = stack.pop() {
        if t.is_accepting(q) {
            paths.push(w.clone());
        }
        for (s, &p) in t.transitions_from(q) {
            if !seen.contains(&p) {
                let mut w2 = w.clone();
                w2.push(s.clone());
                let mut seen2 = seen.clone();
                seen2.insert(p);
                stack.push((p, w2, seen2));
            }
        }
    }
    paths.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));

    let mut cycles: BTreeMap<StateId, Vec<Word>> = BTreeMap::new();
    for start in 0..t.num_states() {
        let mut found = BTreeSet::new();
        let mut stack = vec![(start, Vec::new(), BTreeSet::from([start]))];
        while let Some((q, w, seen)) = stack.pop() {
            for (s, &p) in t.transitions_from(q) {
                let mut w2: Word = w.clone();
                w2.push(s.clone());
                if p == start {
                    found.insert(w2);
                } else if !seen.contains(&p) {
                    let mut seen2 = seen.clone();
                    seen2.insert(p);
                    stack.push((p, w2, seen2));
                }
            }
        }
        if !found.is_empty() {
            let mut v: Vec<Word> = found.into_iter().collect();
            v.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
            cycles.insert(start, v);
        }
    }
    (paths, cycles)
}

/// Phase of the cycle-insertion automaton.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Insert {
    /// Reading the common prefix along a simple path.
    Prefix(StateId, BTreeSet<StateId>),
    /// `x` is in state `.0`; `.1` holds the letters `y` still owes; `.2` is
    /// set once `x` has ended.
    Shift(StateId, Vec<Sym>, bool),
}

/// Pairs `(uv, ucv)` where `u` runs along a simple path to `p` and `c` is
/// a simple cycle at `p`.
fn insertion_relation(t: &SymDfa, p: StateId, c: &Word, vars: VarSet) -> TrackNfa {
    let enter = |q: StateId, seen: BTreeSet<StateId>| {
        let mut v = vec![Insert::Prefix(q, seen)];
        if q == p {
            v.push(Insert::Shift(p, c.clone(), false));
        }
        v
    };
    let starts = enter(t.initial(), BTreeSet::from([t.initial()]));
    Nfa::explore(
        t.alphabet().clone(),
        vars,
        starts,
        |k| match k {
            Insert::Prefix(q, seen) => {
                let s: Vec<&str> = seen.iter().map(|&r| t.state_name(r)).collect();
                format!("pre({};{})", t.state_name(*q), s.join(","))
            }
            Insert::Shift(q, owe, ended) => {
                format!("ins({};{};{})", t.state_name(*q), crate::model::show_word(owe), u8::from(*ended))
            }
        },
        |k| matches!(k, Insert::Shift(_, owe, true) if owe.is_empty()),
        |k| {
            let mut out = Vec::new();
            match k {
                Insert::Prefix(q, seen) => {
                    for (s, &r) in t.transitions_from(*q) {
                        if seen.contains(&r) {
                            continue;
                        }
                        let mut seen2 = seen.clone();
                        seen2.insert(r);
                        let l = TrackLetter::new(vec![s.clone(), s.clone()]);
                        for target in enter(r, seen2) {
                            out.push((l.clone(), target));
                        }
                    }
                }
                Insert::Shift(q, owe, ended) => {
                    let Some((front, rest)) = owe.split_first() else { return out };
                    if !*ended {
                        for (s, &r) in t.transitions_from(*q) {
                            let mut owe2 = rest.to_vec();
                            owe2.push(s.clone());
                            out.push((TrackLetter::new(vec![s.clone(), front.clone()]), Insert::Shift(r, owe2, false)));
                        }
                    }
                    if *ended || t.is_accepting(*q) {
                        out.push((
                            TrackLetter::new(vec![Sym::pad(), front.clone()]),
                            Insert::Shift(*q, rest.to_vec(), true),
                        ));
                    }
                }
            }
            out
        },
    )
}

/// Minimal words are the simple-path words; a step inserts one simple
/// cycle at a point the prefix reaches along a simple path, or stays put.
pub fn regular_relation(a: &SymDfa, caps: &Caps) -> Result<PartialOrderSpec, RealizeError> {
    let t = a.trim();
    if t.accepting().is_empty() {
        return Err(RealizeError::EmptyLanguage);
    }
    let (paths, cycles) = simple_paths_and_cycles(&t);
    cap("simple-path words", paths.len(), caps.minimal_words)?;
    let n_cycles: usize = cycles.values().map(Vec::len).sum();
    cap("simple cycles", n_cycles, caps.cycles)?;

    let vars = VarSet::new(["x", "y"])?;
    let base = t.to_nfa();
    let mut parts = vec![compose_sync(&[&base, &base], vars.clone())?];
    for (&p, cs) in &cycles {
        for c in cs {
            parts.push(insertion_relation(&t, p, c, vars.clone()).trim());
        }
    }
    Ok(PartialOrderSpec {
        minimal_words: paths,
        relation: Nfa::union_all(&parts)?,
        max_successors: 1 + n_cycles,
    })
}

/// [`realize_partially_ordered`] over [`regular_relation`].
pub fn realize_regular(a: &SymDfa, caps: &Caps) -> Result<Nfh, RealizeError> {
    realize_partially_ordered(&regular_relation(a, caps)?, caps)
}
