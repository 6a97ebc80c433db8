//! Context-free grammars over plain symbols or track letters.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::letter::Letter;
use crate::model::{Alphabet, Sym, TrackLetter};
use crate::nfa::{Nfa, StateId};

/// Cap on the number of words `derive_bounded` may collect.
pub const DERIVE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfgError {
    #[error("grammar is not in Chomsky normal form: {0}")]
    NotCnf(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVar(String),
    #[error("letter `{0}` is not in the grammar's alphabet")]
    UnknownLetter(String),
    #[error("bounded derivation produced more than {0} words")]
    TooManyWords(usize),
}

/// A right-hand-side symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GSym<L> {
    T(L),
    V(usize),
}

impl<L> GSym<L> {
    pub fn var(&self) -> Option<usize> {
        match self {
            GSym::V(v) => Some(*v),
            GSym::T(_) => None,
        }
    }

    pub fn terminal(&self) -> Option<&L> {
        match self {
            GSym::T(l) => Some(l),
            GSym::V(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule<L> {
    pub lhs: usize,
    pub rhs: Vec<GSym<L>>,
}

/// `⟨Σ, V, V0, P⟩`; variables are indices into `var_names`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cfg<L: Letter> {
    alphabet: Alphabet,
    frame: L::Frame,
    var_names: Vec<String>,
    start: usize,
    rules: Vec<Rule<L>>,
}

pub type SymCfg = Cfg<Sym>;
pub type TrackCfg = Cfg<TrackLetter>;

impl<L: Letter> Cfg<L> {
    /// A grammar with only the start variable and no rules.
    pub fn new(alphabet: Alphabet, frame: L::Frame, start: impl Into<String>) -> Self {
        Cfg {
            alphabet,
            frame,
            var_names: vec![start.into()],
            start: 0,
            rules: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> Result<usize, CfgError> {
        let name = name.into();
        if self.var_names.contains(&name) {
            return Err(CfgError::DuplicateVar(name));
        }
        self.var_names.push(name);
        Ok(self.var_names.len() - 1)
    }

    /// Returns the variable, adding it if needed.
    pub fn var_or_add(&mut self, name: &str) -> usize {
        match self.var_id(name) {
            Some(v) => v,
            None => {
                self.var_names.push(name.to_string());
                self.var_names.len() - 1
            }
        }
    }

    /// Appends a rule unless an identical one exists.
    pub fn add_rule(&mut self, lhs: usize, rhs: Vec<GSym<L>>) -> Result<(), CfgError> {
        for s in &rhs {
            match s {
                GSym::V(v) if *v >= self.var_names.len() => return Err(CfgError::UnknownVar(format!("#{v}"))),
                GSym::T(l) if !l.fits(&self.alphabet, &self.frame) => {
                    return Err(CfgError::UnknownLetter(l.render(&self.frame)))
                }
                _ => {}
            }
        }
        let r = Rule { lhs, rhs };
        if !self.rules.contains(&r) {
            self.rules.push(r);
        }
        Ok(())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn frame(&self) -> &L::Frame {
        &self.frame
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn set_start(&mut self, v: usize) {
        self.start = v;
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_name(&self, v: usize) -> &str {
        &self.var_names[v]
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn var_id(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|n| n == name)
    }

    pub fn rules(&self) -> &[Rule<L>] {
        &self.rules
    }

    pub fn rules_of(&self, v: usize) -> impl Iterator<Item = &Rule<L>> + '_ {
        self.rules.iter().filter(move |r| r.lhs == v)
    }

    pub fn has_start_epsilon(&self) -> bool {
        self.rules.iter().any(|r| r.lhs == self.start && r.rhs.is_empty())
    }

    /// Total number of symbols over all right-hand sides.
    pub fn size(&self) -> usize {
        self.rules.iter().map(|r| r.rhs.len().max(1)).sum()
    }

    /// Keeps the rules satisfying `keep`.
    pub fn retain_rules(&self, keep: impl Fn(&Rule<L>) -> bool) -> Self {
        let mut out = self.clone();
        out.rules.retain(|r| keep(r));
        out
    }

    pub fn render_symbol(&self, s: &GSym<L>) -> String {
        match s {
            GSym::T(l) => l.render(&self.frame),
            GSym::V(v) => self.var_names[*v].clone(),
        }
    }

    pub fn render_rhs(&self, rhs: &[GSym<L>]) -> String {
        if rhs.is_empty() {
            return "eps".into();
        }
        rhs.iter().map(|s| self.render_symbol(s)).collect::<Vec<_>>().join(" ")
    }

    pub fn render_rule(&self, r: &Rule<L>) -> String {
        format!("{} -> {}", self.var_names[r.lhs], self.render_rhs(&r.rhs))
    }

    /// Variables deriving some terminal word.
    pub fn productive(&self) -> BTreeSet<usize> {
        let mut prod = BTreeSet::new();
        loop {
            let before = prod.len();
            for r in &self.rules {
                if !prod.contains(&r.lhs) && r.rhs.iter().all(|s| s.var().is_none_or(|v| prod.contains(&v))) {
                    prod.insert(r.lhs);
                }
            }
            if prod.len() == before {
                return prod;
            }
        }
    }

    /// Variables reachable from the start.
    pub fn reachable(&self) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([self.start]);
        let mut stack = vec![self.start];
        while let Some(v) = stack.pop() {
            for r in self.rules_of(v) {
                for u in r.rhs.iter().filter_map(GSym::var) {
                    if seen.insert(u) {
                        stack.push(u);
                    }
                }
            }
        }
        seen
    }

    /// Variables deriving `ε`.
    pub fn nullable(&self) -> BTreeSet<usize> {
        let mut null = BTreeSet::new();
        loop {
            let before = null.len();
            for r in &self.rules {
                if r.rhs.iter().all(|s| s.var().is_some_and(|v| null.contains(&v))) {
                    null.insert(r.lhs);
                }
            }
            if null.len() == before {
                return null;
            }
        }
    }

    /// True iff the language is empty.
    pub fn is_empty(&self) -> bool {
        !self.productive().contains(&self.start)
    }

    /// Keeps the listed variables (the start must be among them) and the
    /// rules that mention only them, renumbering in the given order.
    fn keep_vars(&self, keep: &[usize]) -> Self {
        let map: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut out = Cfg {
            alphabet: self.alphabet.clone(),
            frame: self.frame.clone(),
            var_names: keep.iter().map(|&v| self.var_names[v].clone()).collect(),
            start: map[&self.start],
            rules: Vec::new(),
        };
        let mut seen = HashSet::new();
        for r in &self.rules {
            let Some(&lhs) = map.get(&r.lhs) else { continue };
            let rhs: Option<Vec<GSym<L>>> = r
                .rhs
                .iter()
                .map(|s| match s {
                    GSym::V(v) => map.get(v).map(|&u| GSym::V(u)),
                    GSym::T(l) => Some(GSym::T(l.clone())),
                })
                .collect();
            if let Some(rhs) = rhs {
                let rule = Rule { lhs, rhs };
                if seen.insert(rule.clone()) {
                    out.rules.push(rule);
                }
            }
        }
        out
    }

    fn drop_unproductive(&self) -> Self {
        let prod = self.productive();
        let mut keep: Vec<usize> = vec![self.start];
        keep.extend((0..self.num_vars()).filter(|v| *v != self.start && prod.contains(v)));
        let mut out = self.keep_vars(&keep);
        if !prod.contains(&self.start) {
            let s = out.start;
            out.rules.retain(|r| r.lhs != s);
        }
        out
    }

    fn drop_unreachable(&self) -> Self {
        let reach = self.reachable();
        let keep: Vec<usize> = (0..self.num_vars()).filter(|v| reach.contains(v)).collect();
        self.keep_vars(&keep)
    }

    fn fresh_name(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.var_names.contains(&name) {
            name.push('\'');
        }
        name
    }

    /// Language-preserving normalization: every variable productive and
    /// reachable, no `ε`-rules except possibly `start → ε`, and in that
    /// case the start never occurs on a right-hand side. An empty language
    /// yields the bare start variable with no rules.
    pub fn cleanup(&self) -> Self {
        let g = self.drop_unproductive();
        if g.rules.is_empty() {
            return g.keep_vars(&[g.start]);
        }
        let null = g.nullable();
        let mut out = g.clone();
        out.rules.clear();
        let mut seen = HashSet::new();
        for r in &g.rules {
            let positions: Vec<usize> = r
                .rhs
                .iter()
                .enumerate()
                .filter(|(_, s)| s.var().is_some_and(|v| null.contains(&v)))
                .map(|(i, _)| i)
                .collect();
            for mask in 0u64..(1u64 << positions.len()) {
                let rhs: Vec<GSym<L>> = r
                    .rhs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| positions.iter().position(|p| p == i).is_none_or(|j| mask & (1 << j) == 0))
                    .map(|(_, s)| s.clone())
                    .collect();
                if rhs.is_empty() || rhs == [GSym::V(r.lhs)] {
                    continue;
                }
                let rule = Rule { lhs: r.lhs, rhs };
                if seen.insert(rule.clone()) {
                    out.rules.push(rule);
                }
            }
        }
        if null.contains(&g.start) {
            let start_used = out.rules.iter().any(|r| r.rhs.contains(&GSym::V(out.start)));
            if start_used {
                let fresh = out.fresh_name(&format!("{}'", out.var_names[out.start]));
                out.var_names.push(fresh);
                let s = out.var_names.len() - 1;
                out.rules.push(Rule { lhs: s, rhs: vec![GSym::V(out.start)] });
                out.start = s;
            }
            out.rules.push(Rule { lhs: out.start, rhs: Vec::new() });
        }
        // Variables whose only rule was `ε` are unproductive now.
        let out = out.drop_unproductive().drop_unreachable();
        // Put the start first for readable output.
        let mut keep = vec![out.start];
        keep.extend((0..out.num_vars()).filter(|&v| v != out.start));
        out.keep_vars(&keep)
    }

    /// `A → BC`, `A → a`, or `start → ε` with the start never on a
    /// right-hand side.
    pub fn is_cnf(&self) -> bool {
        self.rules.iter().all(|r| match r.rhs.as_slice() {
            [] => r.lhs == self.start,
            [GSym::T(_)] => true,
            [GSym::V(b), GSym::V(c)] => *b != self.start && *c != self.start,
            _ => false,
        })
    }

    /// Chomsky normal form with a fresh start symbol.
    pub fn to_cnf(&self) -> Self {
        let g = self.cleanup();
        let mut out = g.clone();
        out.rules.clear();
        let fresh = g.fresh_name("S0");
        out.var_names.push(fresh);
        let s0 = out.var_names.len() - 1;
        out.start = s0;
        if g.rules.is_empty() {
            return out.keep_vars(&[s0]);
        }

        // Terminals inside long rules get their own variables.
        let mut term_var: BTreeMap<L, usize> = BTreeMap::new();
        let mut staged: Vec<Rule<L>> = vec![Rule { lhs: s0, rhs: vec![GSym::V(g.start)] }];
        for r in &g.rules {
            if r.rhs.is_empty() {
                if r.lhs == g.start {
                    staged.push(Rule { lhs: s0, rhs: Vec::new() });
                }
                continue;
            }
            if r.rhs.len() == 1 {
                staged.push(r.clone());
                continue;
            }
            let rhs = r
                .rhs
                .iter()
                .map(|s| match s {
                    GSym::T(l) => {
                        let v = *term_var.entry(l.clone()).or_insert_with(|| {
                            let name = out.fresh_name(&format!("T{}", l.render(&g.frame)));
                            out.var_names.push(name);
                            out.var_names.len() - 1
                        });
                        GSym::V(v)
                    }
                    v => v.clone(),
                })
                .collect();
            staged.push(Rule { lhs: r.lhs, rhs });
        }
        for (l, &v) in &term_var {
            staged.push(Rule { lhs: v, rhs: vec![GSym::T(l.clone())] });
        }

        // Binarize.
        let mut binary: Vec<Rule<L>> = Vec::new();
        for r in staged {
            if r.rhs.len() <= 2 {
                binary.push(r);
                continue;
            }
            let mut lhs = r.lhs;
            let n = r.rhs.len();
            for (i, s) in r.rhs[..n - 2].iter().enumerate() {
                let name = out.fresh_name(&format!("{}.{}", out.var_names[r.lhs], i + 1));
                out.var_names.push(name);
                let next = out.var_names.len() - 1;
                binary.push(Rule { lhs, rhs: vec![s.clone(), GSym::V(next)] });
                lhs = next;
            }
            binary.push(Rule { lhs, rhs: r.rhs[n - 2..].to_vec() });
        }

        // Unit elimination via the unit-pair closure.
        let nv = out.var_names.len();
        let mut unit: Vec<BTreeSet<usize>> = (0..nv).map(|v| BTreeSet::from([v])).collect();
        loop {
            let mut changed = false;
            for r in &binary {
                if let [GSym::V(b)] = r.rhs.as_slice() {
                    let add: Vec<usize> = unit[*b].iter().copied().collect();
                    for u in add {
                        changed |= unit[r.lhs].insert(u);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut seen = HashSet::new();
        for (a, reach) in unit.iter().enumerate() {
            for &b in reach {
                for r in binary.iter().filter(|r| r.lhs == b) {
                    if matches!(r.rhs.as_slice(), [GSym::V(_)]) {
                        continue;
                    }
                    if r.rhs.is_empty() && a != s0 {
                        continue;
                    }
                    let rule = Rule { lhs: a, rhs: r.rhs.clone() };
                    if seen.insert(rule.clone()) {
                        out.rules.push(rule);
                    }
                }
            }
        }
        let out = out.drop_unproductive().drop_unreachable();
        let mut keep = vec![out.start];
        keep.extend((0..out.num_vars()).filter(|&v| v != out.start));
        out.keep_vars(&keep)
    }

    /// CYK membership; the grammar must be in CNF.
    pub fn cyk(&self, w: &[L]) -> Result<bool, CfgError> {
        if !self.is_cnf() {
            return Err(CfgError::NotCnf("run to_cnf first".into()));
        }
        let n = w.len();
        if n == 0 {
            return Ok(self.has_start_epsilon());
        }
        let nv = self.num_vars();
        let mut unary: HashMap<&L, Vec<usize>> = HashMap::new();
        let mut binary: Vec<(usize, usize, usize)> = Vec::new();
        for r in &self.rules {
            match r.rhs.as_slice() {
                [GSym::T(l)] => unary.entry(l).or_default().push(r.lhs),
                [GSym::V(b), GSym::V(c)] => binary.push((r.lhs, *b, *c)),
                _ => {}
            }
        }
        // table[len-1][i][v]: v derives w[i..i+len].
        let mut table = vec![vec![vec![false; nv]; n]; n];
        for (i, l) in w.iter().enumerate() {
            if let Some(vs) = unary.get(l) {
                for &v in vs {
                    table[0][i][v] = true;
                }
            }
        }
        for len in 2..=n {
            for i in 0..=n - len {
                for split in 1..len {
                    for &(a, b, c) in &binary {
                        if !table[len - 1][i][a] && table[split - 1][i][b] && table[len - split - 1][i + split][c] {
                            table[len - 1][i][a] = true;
                        }
                    }
                }
            }
        }
        Ok(table[n - 1][0][self.start])
    }

    /// Membership through a CNF copy.
    pub fn member(&self, w: &[L]) -> bool {
        self.to_cnf().cyk(w).unwrap_or(false)
    }

    /// Bar-Hillel product with an automaton; the grammar must be in CNF.
    /// Only productive triples `(p, A, q)` are materialized.
    pub fn intersect_nfa(&self, a: &Nfa<L>) -> Result<Self, CfgError> {
        if !self.is_cnf() {
            return Err(CfgError::NotCnf("run to_cnf first".into()));
        }
        if *a.frame() != self.frame {
            return Err(CfgError::AlphabetMismatch(format!("{:?} vs {:?}", self.frame, a.frame())));
        }
        type Triple = (StateId, usize, StateId);
        let mut productive: HashSet<Triple> = HashSet::new();
        let mut by_from: HashMap<(usize, StateId), Vec<StateId>> = HashMap::new();
        let mut by_to: HashMap<(usize, StateId), Vec<StateId>> = HashMap::new();
        let mut queue: Vec<Triple> = Vec::new();
        let mut left_of: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        let mut right_of: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        let mut unary: Vec<(usize, &L)> = Vec::new();
        for r in &self.rules {
            match r.rhs.as_slice() {
                [GSym::V(b), GSym::V(c)] => {
                    left_of.entry(*b).or_default().push((r.lhs, *c));
                    right_of.entry(*c).or_default().push((r.lhs, *b));
                }
                [GSym::T(l)] => unary.push((r.lhs, l)),
                _ => {}
            }
        }
        let mut binary_rules: BTreeSet<(Triple, Triple, Triple)> = BTreeSet::new();
        let push = |t: Triple,
                        productive: &mut HashSet<Triple>,
                        by_from: &mut HashMap<(usize, StateId), Vec<StateId>>,
                        by_to: &mut HashMap<(usize, StateId), Vec<StateId>>,
                        queue: &mut Vec<Triple>| {
            if productive.insert(t) {
                by_from.entry((t.1, t.0)).or_default().push(t.2);
                by_to.entry((t.1, t.2)).or_default().push(t.0);
                queue.push(t);
            }
        };
        let mut unary_rules: BTreeSet<(Triple, L)> = BTreeSet::new();
        for &(v, l) in &unary {
            for p in 0..a.num_states() {
                if let Some(ts) = a.transitions_from(p).get(l) {
                    for &q in ts {
                        unary_rules.insert(((p, v, q), l.clone()));
                        push((p, v, q), &mut productive, &mut by_from, &mut by_to, &mut queue);
                    }
                }
            }
        }
        while let Some((p, b, q)) = queue.pop() {
            // b on the left: A → B C with (q, C, r).
            if let Some(rules) = left_of.get(&b) {
                for &(lhs, c) in rules {
                    let rs = by_from.get(&(c, q)).cloned().unwrap_or_default();
                    for r in rs {
                        binary_rules.insert(((p, lhs, r), (p, b, q), (q, c, r)));
                        push((p, lhs, r), &mut productive, &mut by_from, &mut by_to, &mut queue);
                    }
                }
            }
            // b on the right: A → C B with (o, C, p).
            if let Some(rules) = right_of.get(&b) {
                for &(lhs, c) in rules {
                    let os = by_to.get(&(c, p)).cloned().unwrap_or_default();
                    for o in os {
                        binary_rules.insert(((o, lhs, q), (o, c, p), (p, b, q)));
                        push((o, lhs, q), &mut productive, &mut by_from, &mut by_to, &mut queue);
                    }
                }
            }
        }

        let mut out = Cfg::new(self.alphabet.merge(a.alphabet()), self.frame.clone(), "S");
        let mut ids: BTreeMap<Triple, usize> = BTreeMap::new();
        let mut var = |t: Triple, out: &mut Cfg<L>| -> usize {
            *ids.entry(t).or_insert_with(|| {
                out.var_names.push(format!(
                    "({},{},{})",
                    a.state_name(t.0),
                    self.var_names[t.1],
                    a.state_name(t.2)
                ));
                out.var_names.len() - 1
            })
        };
        for &p in a.initial() {
            for &f in a.accepting() {
                if productive.contains(&(p, self.start, f)) {
                    let v = var((p, self.start, f), &mut out);
                    out.rules.push(Rule { lhs: 0, rhs: vec![GSym::V(v)] });
                }
            }
        }
        if self.has_start_epsilon() && a.initial().iter().any(|q| a.is_accepting(*q)) {
            out.rules.push(Rule { lhs: 0, rhs: Vec::new() });
        }
        for (t, l) in unary_rules {
            let v = var(t, &mut out);
            out.rules.push(Rule { lhs: v, rhs: vec![GSym::T(l)] });
        }
        for (t, l, r) in binary_rules {
            let v = var(t, &mut out);
            let lv = var(l, &mut out);
            let rv = var(r, &mut out);
            out.rules.push(Rule { lhs: v, rhs: vec![GSym::V(lv), GSym::V(rv)] });
        }
        Ok(out.cleanup())
    }

    /// A shortest word of the language, if any. Ties go to the rule that
    /// was relaxed first, so the result is deterministic.
    pub fn shortest_word(&self) -> Option<Vec<L>> {
        let mut best: Vec<Option<Vec<L>>> = vec![None; self.num_vars()];
        loop {
            let mut changed = false;
            for r in &self.rules {
                let mut cand = Vec::new();
                let complete = r.rhs.iter().all(|s| match s {
                    GSym::T(l) => {
                        cand.push(l.clone());
                        true
                    }
                    GSym::V(v) => best[*v].as_ref().map(|w| cand.extend(w.iter().cloned())).is_some(),
                });
                if complete && best[r.lhs].as_ref().is_none_or(|b| cand.len() < b.len()) {
                    best[r.lhs] = Some(cand);
                    changed = true;
                }
            }
            if !changed {
                return best[self.start].take();
            }
        }
    }

    /// Every word of length at most `n`, computed bottom-up per
    /// `(variable, length)` on the cleaned grammar.
    pub fn derive_bounded(&self, n: usize) -> Result<BTreeSet<Vec<L>>, CfgError> {
        let g = self.cleanup();
        let nv = g.num_vars();
        // words[v][len]
        let mut words: Vec<Vec<BTreeSet<Vec<L>>>> = vec![vec![BTreeSet::new(); n + 1]; nv];
        let mut total = 0usize;
        if g.has_start_epsilon() {
            words[g.start][0].insert(Vec::new());
        }
        for len in 1..=n {
            loop {
                let mut changed = false;
                for r in &g.rules {
                    if r.rhs.is_empty() || r.rhs.len() > len {
                        continue;
                    }
                    let produced = expand(&r.rhs, len, &words);
                    for w in produced {
                        if words[r.lhs][len].insert(w) {
                            changed = true;
                            total += 1;
                            if total > DERIVE_CAP {
                                return Err(CfgError::TooManyWords(DERIVE_CAP));
                            }
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        Ok(words[g.start].iter().flatten().cloned().collect())
    }
}

/// Words of exactly `len` letters derivable from `rhs`, where every symbol
/// yields at least one letter.
fn expand<L: Letter>(rhs: &[GSym<L>], len: usize, words: &[Vec<BTreeSet<Vec<L>>>]) -> Vec<Vec<L>> {
    let Some((first, rest)) = rhs.split_first() else {
        return if len == 0 { vec![Vec::new()] } else { Vec::new() };
    };
    if len < rhs.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    match first {
        GSym::T(l) => {
            for mut tail in expand(rest, len - 1, words) {
                tail.insert(0, l.clone());
                out.push(tail);
            }
        }
        GSym::V(v) => {
            for k in 1..=len - rest.len() {
                if words[*v][k].is_empty() {
                    continue;
                }
                let tails = expand(rest, len - k, words);
                for head in &words[*v][k] {
                    for tail in &tails {
                        let mut w = head.clone();
                        w.extend(tail.iter().cloned());
                        out.push(w);
                    }
                }
            }
        }
    }
    out
}
