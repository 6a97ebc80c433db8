//! Finite automata over plain or track alphabets, and the composition
//! operators used to build hyperautomata.
//!
//! [`compose_free`] runs its operands side by side on disjoint variable
//! sets, each operand padded with trailing `#` so tracks of different
//! lengths line up. [`compose_sync`] runs base automata on one shared word,
//! writing the same letter to every track.
//!
//! Product states are named `(p,q,...)` and subset states `{p,q}`, so
//! constructions are reproducible byte-for-byte.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::letter::Letter;
use crate::model::{Alphabet, ModelError, Sym, TrackLetter, VarSet, Word};

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NfaError {
    #[error("letter `{0}` is not in the automaton's alphabet")]
    UnknownLetter(String),
    #[error("variable sets overlap on `{0}`; rename one operand first")]
    VarClash(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("automaton is not deterministic: {0}")]
    NotDeterministic(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A nondeterministic automaton with a set of initial states.
#[derive(Debug, Clone, PartialEq)]
pub struct Nfa<L: Letter> {
    alphabet: Alphabet,
    frame: L::Frame,
    names: Vec<String>,
    initial: BTreeSet<StateId>,
    accepting: BTreeSet<StateId>,
    delta: Vec<BTreeMap<L, BTreeSet<StateId>>>,
}

pub type SymNfa = Nfa<Sym>;
pub type TrackNfa = Nfa<TrackLetter>;

impl<L: Letter> Nfa<L> {
    pub fn new(alphabet: Alphabet, frame: L::Frame) -> Self {
        Nfa {
            alphabet,
            frame,
            names: Vec::new(),
            initial: BTreeSet::new(),
            accepting: BTreeSet::new(),
            delta: Vec::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> StateId {
        self.names.push(name.into());
        self.delta.push(BTreeMap::new());
        self.names.len() - 1
    }

    pub fn set_initial(&mut self, q: StateId) {
        self.initial.insert(q);
    }

    pub fn set_accepting(&mut self, q: StateId) {
        self.accepting.insert(q);
    }

    pub fn add_transition(&mut self, from: StateId, letter: L, to: StateId) {
        self.delta[from].entry(letter).or_default().insert(to);
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn frame(&self) -> &L::Frame {
        &self.frame
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.names[q]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn initial(&self) -> &BTreeSet<StateId> {
        &self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<StateId> {
        &self.accepting
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting.contains(&q)
    }

    /// Outgoing transitions of `q`, grouped by letter.
    pub fn transitions_from(&self, q: StateId) -> &BTreeMap<L, BTreeSet<StateId>> {
        &self.delta[q]
    }

    /// All transitions as `(from, letter, to)` in a stable order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, &L, StateId)> + '_ {
        self.delta.iter().enumerate().flat_map(|(p, m)| {
            m.iter()
                .flat_map(move |(l, qs)| qs.iter().map(move |q| (p, l, *q)))
        })
    }

    pub fn num_transitions(&self) -> usize {
        self.delta
            .iter()
            .map(|m| m.values().map(BTreeSet::len).sum::<usize>())
            .sum()
    }

    /// Letters used on some transition.
    pub fn letters(&self) -> BTreeSet<L> {
        self.delta.iter().flat_map(|m| m.keys().cloned()).collect()
    }

    pub fn check_letter(&self, l: &L) -> Result<(), NfaError> {
        if l.fits(&self.alphabet, &self.frame) {
            Ok(())
        } else {
            Err(NfaError::UnknownLetter(l.render(&self.frame)))
        }
    }

    /// Subset-state step.
    pub fn step(&self, from: &BTreeSet<StateId>, l: &L) -> BTreeSet<StateId> {
        let mut next = BTreeSet::new();
        for &q in from {
            if let Some(ts) = self.delta[q].get(l) {
                next.extend(ts.iter().copied());
            }
        }
        next
    }

    /// Membership without alphabet checks.
    pub fn accepts(&self, w: &[L]) -> bool {
        let mut cur = self.initial.clone();
        for l in w {
            if cur.is_empty() {
                return false;
            }
            cur = self.step(&cur, l);
        }
        cur.iter().any(|q| self.accepting.contains(q))
    }

    /// Membership; every letter must belong to the alphabet.
    pub fn member(&self, w: &[L]) -> Result<bool, NfaError> {
        for l in w {
            self.check_letter(l)?;
        }
        Ok(self.accepts(w))
    }

    fn forward_reachable(&self) -> BTreeSet<StateId> {
        let mut seen: BTreeSet<StateId> = self.initial.clone();
        let mut stack: Vec<StateId> = seen.iter().copied().collect();
        while let Some(p) = stack.pop() {
            for qs in self.delta[p].values() {
                for &q in qs {
                    if seen.insert(q) {
                        stack.push(q);
                    }
                }
            }
        }
        seen
    }

    fn backward_reachable(&self) -> BTreeSet<StateId> {
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); self.num_states()];
        for (p, _, q) in self.transitions() {
            rev[q].push(p);
        }
        let mut seen: BTreeSet<StateId> = self.accepting.clone();
        let mut stack: Vec<StateId> = seen.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if seen.insert(p) {
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// True iff no accepting state is reachable.
    pub fn is_empty(&self) -> bool {
        self.forward_reachable()
            .iter()
            .all(|q| !self.accepting.contains(q))
    }

    /// Keeps only states that are reachable and can reach acceptance.
    /// An empty language trims to a single non-accepting initial state.
    pub fn trim(&self) -> Self {
        let fwd = self.forward_reachable();
        let bwd = self.backward_reachable();
        let keep: Vec<StateId> = (0..self.num_states())
            .filter(|q| fwd.contains(q) && bwd.contains(q))
            .collect();
        if keep.is_empty() {
            let mut out = Nfa::new(self.alphabet.clone(), self.frame.clone());
            let q = out.add_state("dead");
            out.set_initial(q);
            return out;
        }
        self.restrict(&keep)
    }

    fn restrict(&self, keep: &[StateId]) -> Self {
        let map: BTreeMap<StateId, StateId> =
            keep.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let mut out = Nfa::new(self.alphabet.clone(), self.frame.clone());
        for &q in keep {
            out.add_state(self.names[q].clone());
        }
        for &q in keep {
            let nq = map[&q];
            if self.initial.contains(&q) {
                out.set_initial(nq);
            }
            if self.accepting.contains(&q) {
                out.set_accepting(nq);
            }
            for (l, ts) in &self.delta[q] {
                for t in ts {
                    if let Some(&nt) = map.get(t) {
                        out.add_transition(nq, l.clone(), nt);
                    }
                }
            }
        }
        out
    }

    fn same_frame(&self, other: &Self) -> Result<(), NfaError> {
        if self.frame != other.frame {
            return Err(NfaError::AlphabetMismatch(format!(
                "{:?} vs {:?}",
                self.frame, other.frame
            )));
        }
        Ok(())
    }

    /// Disjoint union.
    pub fn union(&self, other: &Self) -> Result<Self, NfaError> {
        self.same_frame(other)?;
        let mut out = Nfa::new(self.alphabet.merge(&other.alphabet), self.frame.clone());
        for (tag, part) in [("1", self), ("2", other)] {
            let base = out.num_states();
            for n in &part.names {
                out.add_state(format!("{tag}.{n}"));
            }
            for &q in &part.initial {
                out.set_initial(base + q);
            }
            for &q in &part.accepting {
                out.set_accepting(base + q);
            }
            for (p, l, q) in part.transitions() {
                out.add_transition(base + p, l.clone(), base + q);
            }
        }
        Ok(out)
    }

    /// Union of any number of automata sharing a frame.
    pub fn union_all(parts: &[Self]) -> Result<Self, NfaError> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| NfaError::AlphabetMismatch("union of zero automata".into()))?;
        let mut out = Nfa::new(first.alphabet.clone(), first.frame.clone());
        for p in rest {
            first.same_frame(p)?;
            out.alphabet = out.alphabet.merge(&p.alphabet);
        }
        for (i, part) in parts.iter().enumerate() {
            let base = out.num_states();
            for n in &part.names {
                out.add_state(format!("{}.{n}", i + 1));
            }
            for &q in &part.initial {
                out.set_initial(base + q);
            }
            for &q in &part.accepting {
                out.set_accepting(base + q);
            }
            for (p, l, q) in part.transitions() {
                out.add_transition(base + p, l.clone(), base + q);
            }
        }
        Ok(out)
    }

    /// Product on equal letters; only reachable pairs are built.
    pub fn intersect(&self, other: &Self) -> Result<Self, NfaError> {
        self.same_frame(other)?;
        let mut out = Nfa::new(self.alphabet.merge(&other.alphabet), self.frame.clone());
        let mut index: BTreeMap<(StateId, StateId), StateId> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &p in &self.initial {
            for &q in &other.initial {
                let id = out.add_state(format!("({},{})", self.names[p], other.names[q]));
                out.set_initial(id);
                index.insert((p, q), id);
                queue.push_back((p, q));
            }
        }
        while let Some((p, q)) = queue.pop_front() {
            let id = index[&(p, q)];
            if self.accepting.contains(&p) && other.accepting.contains(&q) {
                out.set_accepting(id);
            }
            for (l, ps) in &self.delta[p] {
                let Some(qs) = other.delta[q].get(l) else { continue };
                for &p2 in ps {
                    for &q2 in qs {
                        let tid = *index.entry((p2, q2)).or_insert_with(|| {
                            queue.push_back((p2, q2));
                            out.names.push(format!("({},{})", self.names[p2], other.names[q2]));
                            out.delta.push(BTreeMap::new());
                            out.names.len() - 1
                        });
                        out.add_transition(id, l.clone(), tid);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Builds the reachable part of an implicitly given automaton: `succ`
    /// lists the moves of a state key, `name` and `accept` describe it.
    pub fn explore<K, N, A, S>(alphabet: Alphabet, frame: L::Frame, starts: Vec<K>, name: N, accept: A, mut succ: S) -> Self
    where
        K: Ord + Clone,
        N: Fn(&K) -> String,
        A: Fn(&K) -> bool,
        S: FnMut(&K) -> Vec<(L, K)>,
    {
        let mut out = Nfa::new(alphabet, frame);
        let mut index: BTreeMap<K, StateId> = BTreeMap::new();
        let mut queue: VecDeque<K> = VecDeque::new();
        for k in starts {
            if index.contains_key(&k) {
                continue;
            }
            let id = out.add_state(name(&k));
            out.set_initial(id);
            index.insert(k.clone(), id);
            queue.push_back(k);
        }
        while let Some(k) = queue.pop_front() {
            let id = index[&k];
            if accept(&k) {
                out.set_accepting(id);
            }
            for (l, k2) in succ(&k) {
                let tid = match index.get(&k2) {
                    Some(&t) => t,
                    None => {
                        let t = out.add_state(name(&k2));
                        index.insert(k2.clone(), t);
                        queue.push_back(k2);
                        t
                    }
                };
                out.add_transition(id, l, tid);
            }
        }
        out
    }

    /// Subset construction over the letters actually used; the result is
    /// partial (no sink).
    pub fn determinize(&self) -> Dfa<L> {
        let subset_name = |s: &BTreeSet<StateId>| {
            let parts: Vec<&str> = s.iter().map(|&q| self.names[q].as_str()).collect();
            format!("{{{}}}", parts.join(","))
        };
        let mut dfa = Dfa::new(self.alphabet.clone(), self.frame.clone());
        let mut index: BTreeMap<BTreeSet<StateId>, StateId> = BTreeMap::new();
        let start = self.initial.clone();
        let s0 = dfa.add_state(subset_name(&start));
        dfa.initial = s0;
        index.insert(start.clone(), s0);
        let mut queue = VecDeque::from([start]);
        while let Some(set) = queue.pop_front() {
            let id = index[&set];
            if set.iter().any(|q| self.accepting.contains(q)) {
                dfa.accepting.insert(id);
            }
            let mut by_letter: BTreeMap<&L, BTreeSet<StateId>> = BTreeMap::new();
            for &q in &set {
                for (l, ts) in &self.delta[q] {
                    by_letter.entry(l).or_default().extend(ts.iter().copied());
                }
            }
            for (l, target) in by_letter {
                let tid = match index.get(&target) {
                    Some(&t) => t,
                    None => {
                        let t = dfa.add_state(subset_name(&target));
                        index.insert(target.clone(), t);
                        queue.push_back(target);
                        t
                    }
                };
                dfa.delta[id].insert(l.clone(), tid);
            }
        }
        dfa
    }

    /// `L · #*` where `#` is the all-pad letter: a fresh accepting state is
    /// entered from every accepting state on the pad letter and loops on it.
    pub fn pad_suffix(&self) -> Self {
        let mut out = self.clone();
        let pad = L::all_pad(&self.frame);
        let sink = out.add_state("pad");
        out.add_transition(sink, pad.clone(), sink);
        let acc: Vec<StateId> = self.accepting.iter().copied().collect();
        for q in acc {
            out.add_transition(q, pad.clone(), sink);
        }
        out.set_accepting(sink);
        out
    }

    /// Words accepted with length at most `max_len`.
    pub fn accepted_up_to(&self, max_len: usize) -> BTreeSet<Vec<L>> {
        let mut out = BTreeSet::new();
        let mut frontier: Vec<(Vec<L>, BTreeSet<StateId>)> = vec![(Vec::new(), self.initial.clone())];
        for depth in 0..=max_len {
            let mut next = Vec::new();
            for (w, set) in frontier {
                if set.iter().any(|q| self.accepting.contains(q)) {
                    out.insert(w.clone());
                }
                if depth == max_len {
                    continue;
                }
                let mut by_letter: BTreeMap<&L, BTreeSet<StateId>> = BTreeMap::new();
                for &q in &set {
                    for (l, ts) in &self.delta[q] {
                        by_letter.entry(l).or_default().extend(ts.iter().copied());
                    }
                }
                for (l, t) in by_letter {
                    let mut w2 = w.clone();
                    w2.push(l.clone());
                    next.push((w2, t));
                }
            }
            frontier = next;
        }
        out
    }
}

/// A deterministic, possibly partial, automaton.
#[derive(Debug, Clone, PartialEq)]
pub struct Dfa<L: Letter> {
    alphabet: Alphabet,
    frame: L::Frame,
    names: Vec<String>,
    initial: StateId,
    accepting: BTreeSet<StateId>,
    delta: Vec<BTreeMap<L, StateId>>,
}

pub type SymDfa = Dfa<Sym>;

impl<L: Letter> Dfa<L> {
    pub fn new(alphabet: Alphabet, frame: L::Frame) -> Self {
        Dfa {
            alphabet,
            frame,
            names: Vec::new(),
            initial: 0,
            accepting: BTreeSet::new(),
            delta: Vec::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> StateId {
        self.names.push(name.into());
        self.delta.push(BTreeMap::new());
        self.names.len() - 1
    }

    pub fn set_initial(&mut self, q: StateId) {
        self.initial = q;
    }

    pub fn set_accepting(&mut self, q: StateId) {
        self.accepting.insert(q);
    }

    /// Fails if `from` already has a different target on `letter`.
    pub fn add_transition(&mut self, from: StateId, letter: L, to: StateId) -> Result<(), NfaError> {
        match self.delta[from].get(&letter) {
            Some(&t) if t != to => Err(NfaError::NotDeterministic(format!(
                "state `{}` has two targets on `{}`",
                self.names[from],
                letter.render(&self.frame)
            ))),
            _ => {
                self.delta[from].insert(letter, to);
                Ok(())
            }
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn frame(&self) -> &L::Frame {
        &self.frame
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.names[q]
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<StateId> {
        &self.accepting
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting.contains(&q)
    }

    pub fn next(&self, q: StateId, l: &L) -> Option<StateId> {
        self.delta[q].get(l).copied()
    }

    pub fn transitions_from(&self, q: StateId) -> &BTreeMap<L, StateId> {
        &self.delta[q]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, &L, StateId)> + '_ {
        self.delta
            .iter()
            .enumerate()
            .flat_map(|(p, m)| m.iter().map(move |(l, q)| (p, l, *q)))
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().map(BTreeMap::len).sum()
    }

    /// The state reached on `w`, if the run does not fall off.
    pub fn run(&self, w: &[L]) -> Option<StateId> {
        w.iter().try_fold(self.initial, |q, l| self.next(q, l))
    }

    pub fn accepts(&self, w: &[L]) -> bool {
        self.run(w).is_some_and(|q| self.accepting.contains(&q))
    }

    /// Every state has a move on every letter of the universe.
    pub fn is_total(&self) -> bool {
        let universe = L::universe(&self.alphabet, &self.frame);
        self.delta
            .iter()
            .all(|m| universe.iter().all(|l| m.contains_key(l)))
    }

    /// Adds a single non-accepting sink for every missing move.
    pub fn totalize(&self) -> Self {
        if self.is_total() {
            return self.clone();
        }
        let universe = L::universe(&self.alphabet, &self.frame);
        let mut out = self.clone();
        let sink = out.add_state("sink");
        for q in 0..out.num_states() {
            for l in &universe {
                out.delta[q].entry(l.clone()).or_insert(sink);
            }
        }
        out
    }

    /// Complement with respect to the letter universe (pads excluded).
    pub fn complement(&self) -> Self {
        let mut out = self.totalize();
        out.accepting = (0..out.num_states())
            .filter(|q| !out.accepting.contains(q))
            .collect();
        out
    }

    pub fn to_nfa(&self) -> Nfa<L> {
        let mut out = Nfa::new(self.alphabet.clone(), self.frame.clone());
        for n in &self.names {
            out.add_state(n.clone());
        }
        out.set_initial(self.initial);
        for &q in &self.accepting {
            out.set_accepting(q);
        }
        for (p, l, q) in self.transitions() {
            out.add_transition(p, l.clone(), q);
        }
        out
    }

    /// Keeps states that are reachable and co-reachable; the initial state
    /// always survives.
    pub fn trim(&self) -> Self {
        let trimmed = self.to_nfa().trim();
        let mut out = Dfa::new(self.alphabet.clone(), self.frame.clone());
        for q in 0..trimmed.num_states() {
            out.add_state(trimmed.state_name(q).to_string());
        }
        out.initial = *trimmed.initial().iter().next().unwrap_or(&0);
        out.accepting = trimmed.accepting().clone();
        for (p, l, q) in trimmed.transitions() {
            out.delta[p].insert(l.clone(), q);
        }
        out
    }

    /// Restricts to states reachable from the initial state.
    pub fn reachable(&self) -> Self {
        let mut seen = BTreeSet::from([self.initial]);
        let mut stack = vec![self.initial];
        while let Some(p) = stack.pop() {
            for &q in self.delta[p].values() {
                if seen.insert(q) {
                    stack.push(q);
                }
            }
        }
        let keep: Vec<StateId> = seen.into_iter().collect();
        let map: BTreeMap<StateId, StateId> =
            keep.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let mut out = Dfa::new(self.alphabet.clone(), self.frame.clone());
        for &q in &keep {
            out.add_state(self.names[q].clone());
        }
        out.initial = map[&self.initial];
        for &q in &keep {
            if self.accepting.contains(&q) {
                out.accepting.insert(map[&q]);
            }
            for (l, t) in &self.delta[q] {
                out.delta[map[&q]].insert(l.clone(), map[t]);
            }
        }
        out
    }
}

impl Nfa<Sym> {
    /// The line-shaped automaton for `{w}`.
    pub fn word_automaton(alphabet: &Alphabet, w: &[Sym]) -> Self {
        let mut out = Nfa::new(alphabet.clone(), ());
        let mut prev = out.add_state("w0");
        out.set_initial(prev);
        for (i, s) in w.iter().enumerate() {
            let q = out.add_state(format!("w{}", i + 1));
            out.add_transition(prev, s.clone(), q);
            prev = q;
        }
        out.set_accepting(prev);
        out
    }

    /// Accepts every word obtained from `L` by inserting `#` anywhere: a
    /// `#` self-loop on every state.
    pub fn pad_anywhere(&self) -> Self {
        let mut out = self.clone();
        for q in 0..out.num_states() {
            out.add_transition(q, Sym::pad(), q);
        }
        out
    }

    /// The same automaton read on a single named track.
    pub fn on_track(&self, var: &str) -> Result<Nfa<TrackLetter>, NfaError> {
        let vars = VarSet::new([var])?;
        let mut out = Nfa::new(self.alphabet.clone(), vars);
        for n in &self.names {
            out.add_state(n.clone());
        }
        out.initial = self.initial.clone();
        out.accepting = self.accepting.clone();
        for (p, l, q) in self.transitions() {
            out.add_transition(p, TrackLetter::new(vec![l.clone()]), q);
        }
        Ok(out)
    }
}

impl Dfa<Sym> {
    /// The line-shaped deterministic automaton for `{w}`.
    pub fn word_automaton(alphabet: &Alphabet, w: &[Sym]) -> Self {
        Nfa::word_automaton(alphabet, w).determinize()
    }
}

impl Nfa<TrackLetter> {
    pub fn vars(&self) -> &VarSet {
        &self.frame
    }

    /// Positional renaming of the variables.
    pub fn rename(&self, vars: VarSet) -> Result<Self, NfaError> {
        if vars.len() != self.frame.len() {
            return Err(NfaError::Model(ModelError::TrackCount {
                expected: self.frame.len(),
                got: vars.len(),
            }));
        }
        let mut out = self.clone();
        out.frame = vars;
        Ok(out)
    }

    /// Drops one track.
    pub fn project(&self, drop: &str) -> Result<Self, NfaError> {
        let i = self
            .frame
            .index_of(drop)
            .ok_or_else(|| NfaError::UnknownVar(drop.to_string()))?;
        let keep: Vec<usize> = (0..self.frame.len()).filter(|&j| j != i).collect();
        self.keep_tracks(&keep)
    }

    /// Keeps only the listed track positions, in the given order.
    pub fn keep_tracks(&self, keep: &[usize]) -> Result<Self, NfaError> {
        let vars = VarSet::new(keep.iter().map(|&j| self.frame.names()[j].clone()))?;
        let mut out = Nfa::new(self.alphabet.clone(), vars);
        for n in &self.names {
            out.add_state(n.clone());
        }
        out.initial = self.initial.clone();
        out.accepting = self.accepting.clone();
        for (p, l, q) in self.transitions() {
            let nl = TrackLetter::new(keep.iter().map(|&j| l.get(j).clone()).collect());
            out.add_transition(p, nl, q);
        }
        Ok(out)
    }

    /// For a one-track automaton whose words are `w·#^k`, the automaton of
    /// the words `w` (words with an interior `#` are dropped).
    pub fn strip_trailing_pads(&self) -> Self {
        let pad = TrackLetter::all_pad(&self.frame);
        let mut acc = self.accepting.clone();
        loop {
            let mut grew = false;
            for q in 0..self.num_states() {
                if acc.contains(&q) {
                    continue;
                }
                if let Some(ts) = self.delta[q].get(&pad) {
                    if ts.iter().any(|t| acc.contains(t)) {
                        acc.insert(q);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut out = Nfa::new(self.alphabet.clone(), self.frame.clone());
        for n in &self.names {
            out.add_state(n.clone());
        }
        out.initial = self.initial.clone();
        out.accepting = acc;
        for (p, l, q) in self.transitions() {
            if l.syms().iter().any(Sym::is_pad) {
                continue;
            }
            out.add_transition(p, l.clone(), q);
        }
        out.trim()
    }

    /// Constrains track `var` to `L(constraint)·#*`; `constraint` is a
    /// one-track automaton.
    pub fn restrict_track(&self, var: &str, constraint: &Nfa<TrackLetter>) -> Result<Self, NfaError> {
        let i = self
            .frame
            .index_of(var)
            .ok_or_else(|| NfaError::UnknownVar(var.to_string()))?;
        if constraint.frame.len() != 1 {
            return Err(NfaError::AlphabetMismatch(
                "track constraint must have exactly one track".into(),
            ));
        }
        let c = constraint.pad_suffix();
        let mut out = Nfa::new(self.alphabet.merge(&c.alphabet), self.frame.clone());
        let mut index: BTreeMap<(StateId, StateId), StateId> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &p in &self.initial {
            for &q in &c.initial {
                let id = out.add_state(format!("({},{})", self.names[p], c.names[q]));
                out.set_initial(id);
                index.insert((p, q), id);
                queue.push_back((p, q));
            }
        }
        while let Some((p, q)) = queue.pop_front() {
            let id = index[&(p, q)];
            if self.accepting.contains(&p) && c.accepting.contains(&q) {
                out.set_accepting(id);
            }
            for (l, ps) in &self.delta[p] {
                let key = TrackLetter::new(vec![l.get(i).clone()]);
                let Some(qs) = c.delta[q].get(&key) else { continue };
                for &p2 in ps {
                    for &q2 in qs {
                        let tid = *index.entry((p2, q2)).or_insert_with(|| {
                            queue.push_back((p2, q2));
                            out.names.push(format!("({},{})", self.names[p2], c.names[q2]));
                            out.delta.push(BTreeMap::new());
                            out.names.len() - 1
                        });
                        out.add_transition(id, l.clone(), tid);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Checks that every accepted word up to `max_len` is synchronous.
    pub fn suffix_padded_up_to(&self, max_len: usize) -> bool {
        self.accepted_up_to(max_len)
            .iter()
            .all(|w| crate::model::is_synchronous(w))
    }
}

/// Free composition of two automata over disjoint variable sets.
pub fn compose_free(a: &Nfa<TrackLetter>, b: &Nfa<TrackLetter>) -> Result<Nfa<TrackLetter>, NfaError> {
    compose_free_all(&[a, b])
}

/// k-fold free composition. Each operand is first padded with trailing
/// all-`#` letters; the product follows all operands letter by letter.
pub fn compose_free_all(parts: &[&Nfa<TrackLetter>]) -> Result<Nfa<TrackLetter>, NfaError> {
    let Some((first, rest)) = parts.split_first() else {
        return Err(NfaError::AlphabetMismatch("composition of zero automata".into()));
    };
    let mut vars = first.frame.clone();
    let mut alphabet = first.alphabet.clone();
    for p in rest {
        for n in p.frame.names() {
            if vars.index_of(n).is_some() {
                return Err(NfaError::VarClash(n.clone()));
            }
        }
        vars = vars.concat(&p.frame)?;
        alphabet = alphabet.merge(&p.alphabet);
    }
    let padded: Vec<Nfa<TrackLetter>> = parts.iter().map(|p| p.pad_suffix()).collect();
    product(&padded, vars, alphabet)
}

fn tuple_name(parts: &[Nfa<TrackLetter>], tuple: &[StateId]) -> String {
    let names: Vec<&str> = parts
        .iter()
        .zip(tuple)
        .map(|(p, &q)| p.names[q].as_str())
        .collect();
    format!("({})", names.join(","))
}

/// Reachable product where the letter is the concatenation of the
/// component letters.
fn product(
    parts: &[Nfa<TrackLetter>],
    vars: VarSet,
    alphabet: Alphabet,
) -> Result<Nfa<TrackLetter>, NfaError> {
    let mut out = Nfa::new(alphabet, vars);
    let mut index: BTreeMap<Vec<StateId>, StateId> = BTreeMap::new();
    let mut queue: VecDeque<Vec<StateId>> = VecDeque::new();

    let mut starts: Vec<Vec<StateId>> = vec![Vec::new()];
    for p in parts {
        starts = starts
            .into_iter()
            .flat_map(|t| {
                p.initial.iter().map(move |&q| {
                    let mut t2 = t.clone();
                    t2.push(q);
                    t2
                })
            })
            .collect();
    }
    for t in starts {
        let id = out.add_state(tuple_name(parts, &t));
        out.set_initial(id);
        index.insert(t.clone(), id);
        queue.push_back(t);
    }

    while let Some(t) = queue.pop_front() {
        let id = index[&t];
        if parts.iter().zip(&t).all(|(p, &q)| p.accepting.contains(&q)) {
            out.set_accepting(id);
        }
        // (letter, successor tuple) combinations, built component by component.
        let mut combos: Vec<(TrackLetter, Vec<StateId>)> = vec![(TrackLetter::new(Vec::new()), Vec::new())];
        for (p, &q) in parts.iter().zip(&t) {
            let moves: Vec<(&TrackLetter, StateId)> = p.delta[q]
                .iter()
                .flat_map(|(l, ts)| ts.iter().map(move |&t| (l, t)))
                .collect();
            let mut next = Vec::with_capacity(combos.len() * moves.len());
            for (l, succ) in &combos {
                for (ml, mt) in &moves {
                    let mut s2 = succ.clone();
                    s2.push(*mt);
                    next.push((l.concat(ml), s2));
                }
            }
            combos = next;
            if combos.is_empty() {
                break;
            }
        }
        for (l, succ) in combos {
            let tid = match index.get(&succ) {
                Some(&x) => x,
                None => {
                    let x = out.add_state(tuple_name(parts, &succ));
                    index.insert(succ.clone(), x);
                    queue.push_back(succ);
                    x
                }
            };
            out.add_transition(id, l, tid);
        }
    }
    Ok(out)
}

/// Synchronized composition: every operand reads the same word and the
/// product writes that letter to every track (named by `vars`).
pub fn compose_sync(parts: &[&Nfa<Sym>], vars: VarSet) -> Result<Nfa<TrackLetter>, NfaError> {
    if parts.len() != vars.len() {
        return Err(NfaError::Model(ModelError::TrackCount {
            expected: vars.len(),
            got: parts.len(),
        }));
    }
    let mut alphabet = parts[0].alphabet.clone();
    for p in &parts[1..] {
        alphabet = alphabet.merge(&p.alphabet);
    }
    let mut out = Nfa::new(alphabet, vars);
    let mut index: BTreeMap<Vec<StateId>, StateId> = BTreeMap::new();
    let mut queue: VecDeque<Vec<StateId>> = VecDeque::new();
    let name = |t: &[StateId]| {
        let names: Vec<&str> = parts.iter().zip(t).map(|(p, &q)| p.names[q].as_str()).collect();
        format!("({})", names.join(","))
    };
    let mut starts: Vec<Vec<StateId>> = vec![Vec::new()];
    for p in parts {
        starts = starts
            .into_iter()
            .flat_map(|t| {
                p.initial.iter().map(move |&q| {
                    let mut t2 = t.clone();
                    t2.push(q);
                    t2
                })
            })
            .collect();
    }
    for t in starts {
        let id = out.add_state(name(&t));
        out.set_initial(id);
        index.insert(t.clone(), id);
        queue.push_back(t);
    }
    while let Some(t) = queue.pop_front() {
        let id = index[&t];
        if parts.iter().zip(&t).all(|(p, &q)| p.accepting.contains(&q)) {
            out.set_accepting(id);
        }
        for (sym, ts0) in &parts[0].delta[t[0]] {
            if sym.is_pad() {
                continue;
            }
            let mut succs: Vec<Vec<StateId>> = ts0.iter().map(|&q| vec![q]).collect();
            for (p, &q) in parts.iter().zip(&t).skip(1) {
                let Some(ts) = p.delta[q].get(sym) else {
                    succs.clear();
                    break;
                };
                succs = succs
                    .into_iter()
                    .flat_map(|s| {
                        ts.iter().map(move |&q2| {
                            let mut s2 = s.clone();
                            s2.push(q2);
                            s2
                        })
                    })
                    .collect();
            }
            let letter = TrackLetter::new(vec![sym.clone(); parts.len()]);
            for s in succs {
                let tid = match index.get(&s) {
                    Some(&x) => x,
                    None => {
                        let x = out.add_state(name(&s));
                        index.insert(s.clone(), x);
                        queue.push_back(s);
                        x
                    }
                };
                out.add_transition(id, letter.clone(), tid);
            }
        }
    }
    Ok(out)
}

/// Free composition of word automata, one per track.
pub fn compose_words(alphabet: &Alphabet, vars: &VarSet, words: &[Word]) -> Result<Nfa<TrackLetter>, NfaError> {
    let parts: Vec<Nfa<TrackLetter>> = vars
        .names()
        .iter()
        .zip(words)
        .map(|(v, w)| Nfa::word_automaton(alphabet, w).on_track(v))
        .collect::<Result<_, _>>()?;
    let refs: Vec<&Nfa<TrackLetter>> = parts.iter().collect();
    compose_free_all(&refs)
}
