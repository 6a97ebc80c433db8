//! Context-free hypergrammars: a quantifier prefix plus a grammar over
//! track letters. A word assignment is derived when some `#`-padding of
//! it (with `#` inserted anywhere on each track) is in the grammar's
//! language.

pub mod pcp;
pub mod rank;

use std::fmt;

use thiserror::Error;

use crate::cfg::{CfgError, GSym, TrackCfg};
use crate::model::{is_synchronous, sync_letters, ModelError, Quantifier, QuantifierPrefix, Sym, TrackLetter, VarSet, Word};
use crate::nfa::{compose_free_all, Nfa, NfaError, SymNfa};
use crate::nfh::{evaluate_prefix, probe_universe, NfhError, PROBE_UNIVERSE_CAP};

pub use rank::{ExitJoin, Rank, RankOptions, RankTable, RuleGraph, Side, TraversalOrder, Vertex, Violation};

/// Decision problems this library refuses to answer exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    /// Emptiness for `∀*` or `∃∀*` prefixes when the grammar is not ranked.
    ForallEmptinessUnranked,
    /// Emptiness for `∃∃∀*`-style prefixes, even for ranked grammars.
    ExistsForallEmptiness,
    /// Emptiness when some `∀` precedes an `∃`.
    ForallExistsEmptiness,
    /// Regular membership for any prefix with a `∀`.
    ForallRegularMembership,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::ForallEmptinessUnranked => {
                "emptiness of a non-ranked CFHG with a forall* or exists-forall* prefix is undecidable (PCP reduction)"
            }
            Problem::ExistsForallEmptiness => {
                "emptiness of an exists*-forall* CFHG is undecidable, even for synchronous grammars (PCP reduction)"
            }
            Problem::ForallExistsEmptiness => "emptiness of a CFHG with a forall before an exists is undecidable",
            Problem::ForallRegularMembership => {
                "regular membership for a CFHG with a forall quantifier is undecidable, even for synchronous grammars"
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfhgError {
    #[error("undecidable: {0}")]
    Undecidable(Problem),
    #[error("wrong quantifier prefix: {0}")]
    WrongPrefix(String),
    #[error("grammar is not ranked ({0} violations)")]
    NotRanked(usize),
    #[error("hyperlanguage membership is only defined for non-empty languages")]
    EmptyLanguage,
    #[error(transparent)]
    Cfg(#[from] CfgError),
    #[error(transparent)]
    Nfa(#[from] NfaError),
    #[error(transparent)]
    Nfh(#[from] NfhError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which leaf check `finite_member` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LeafPath {
    /// Fast when it is exact, slow otherwise.
    #[default]
    Auto,
    /// CYK on the synchronous padding only; exact for ranked grammars
    /// without all-`#` letters.
    Fast,
    /// Intersection with the product of pad-anywhere word automata.
    Slow,
}

/// Outcome of a bounded search for an undecidable question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bounded {
    Witness(Vec<Word>),
    NoWitnessWithinBound,
}

/// Result of the `∀*` / `∃∀*` emptiness check for ranked grammars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncEmptiness {
    pub empty: bool,
    /// A word `w` with `{w}` in the hyperlanguage.
    pub witness: Option<Word>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cfhg {
    prefix: QuantifierPrefix,
    grammar: TrackCfg,
}

impl Cfhg {
    /// The grammar is normalized with `cleanup`.
    pub fn new(prefix: QuantifierPrefix, grammar: TrackCfg) -> Result<Self, CfhgError> {
        if prefix.len() != grammar.frame().len() {
            return Err(ModelError::PrefixMismatch(format!(
                "{} quantifiers for {} variables",
                prefix.len(),
                grammar.frame().len()
            ))
            .into());
        }
        Ok(Cfhg {
            prefix,
            grammar: grammar.cleanup(),
        })
    }

    pub fn prefix(&self) -> &QuantifierPrefix {
        &self.prefix
    }

    pub fn grammar(&self) -> &TrackCfg {
        &self.grammar
    }

    pub fn vars(&self) -> &VarSet {
        self.grammar.frame()
    }

    pub fn rule_graph(&self) -> RuleGraph {
        RuleGraph::build(&self.grammar)
    }

    pub fn ranks(&self) -> RankTable {
        self.ranks_with(RankOptions::default())
    }

    pub fn ranks_with(&self, opts: RankOptions) -> RankTable {
        RankTable::compute(&self.rule_graph(), opts)
    }

    /// Every adjacent pair breaking `R ⊆ L`; empty iff the grammar is ranked.
    pub fn violations(&self) -> Vec<Violation> {
        rank::violations(&self.grammar, &self.ranks())
    }

    pub fn is_ranked(&self) -> bool {
        self.violations().is_empty()
    }

    fn has_all_pad_letter(&self) -> bool {
        self.grammar
            .rules()
            .iter()
            .flat_map(|r| r.rhs.iter())
            .any(|s| s.terminal().is_some_and(TrackLetter::is_all_pad))
    }

    /// Every derivable word of length at most `n` is synchronous.
    pub fn sync_check_bounded(&self, n: usize) -> Result<bool, CfhgError> {
        Ok(self.grammar.derive_bounded(n)?.iter().all(|w| is_synchronous(w)))
    }

    /// Emptiness for an all-`∃` prefix, or a single `∀`.
    pub fn exists_empty(&self) -> Result<bool, CfhgError> {
        if !self.prefix.all_exists() && self.prefix.len() != 1 {
            return Err(CfhgError::WrongPrefix(format!(
                "expected exists* or a single forall, got {}",
                self.prefix.shape()
            )));
        }
        Ok(self.grammar.is_empty())
    }

    /// Whether some language contained in `L(a)` is in the hyperlanguage
    /// (all-`∃` prefix only).
    pub fn exists_regular_member(&self, a: &SymNfa) -> Result<bool, CfhgError> {
        if !self.prefix.all_exists() {
            return Err(CfhgError::WrongPrefix(format!("expected exists*, got {}", self.prefix.shape())));
        }
        let padded = a.pad_anywhere();
        let tracks = self
            .vars()
            .names()
            .iter()
            .map(|v| padded.on_track(v))
            .collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&Nfa<TrackLetter>> = tracks.iter().collect();
        let product = compose_free_all(&refs)?;
        Ok(!self.grammar.to_cnf().intersect_nfa(&product)?.is_empty())
    }

    /// Whether the finite language `lang` is in the hyperlanguage.
    /// Duplicate words are ignored.
    pub fn finite_member(&self, lang: &[Word], path: LeafPath) -> Result<bool, CfhgError> {
        let mut words = lang.to_vec();
        words.sort();
        words.dedup();
        if words.is_empty() {
            return Err(CfhgError::EmptyLanguage);
        }
        for w in &words {
            self.grammar.alphabet().check_word(w)?;
        }
        let mut leaf = self.leaf(path);
        let ids: Vec<usize> = (0..words.len()).collect();
        evaluate_prefix(self.prefix.quantifiers(), &ids, |a| {
            let ws: Vec<&Word> = a.iter().map(|&i| &words[i]).collect();
            leaf(&ws)
        })
    }

    /// All non-empty subsets of `Σ^{≤max_len}` in the hyperlanguage.
    pub fn probe(&self, max_len: usize, path: LeafPath) -> Result<Vec<Vec<Word>>, CfhgError> {
        let universe = self.grammar.alphabet().words_up_to(max_len);
        let mut leaf = self.leaf(path);
        probe_universe(&universe, self.prefix.quantifiers(), |ws| leaf(ws))
    }

    fn fast_path_exact(&self) -> bool {
        !self.has_all_pad_letter() && self.is_ranked()
    }

    /// The per-assignment check. The CNF copy is built once.
    fn leaf(&self, path: LeafPath) -> impl FnMut(&[&Word]) -> Result<bool, CfhgError> + '_ {
        let fast = match path {
            LeafPath::Auto => self.fast_path_exact(),
            LeafPath::Fast => true,
            LeafPath::Slow => false,
        };
        let cnf = self.grammar.to_cnf();
        move |ws: &[&Word]| {
            if fast {
                let tracks: Vec<&[Sym]> = ws.iter().map(|w| w.as_slice()).collect();
                return Ok(cnf.cyk(&sync_letters(&tracks))?);
            }
            let alphabet = self.grammar.alphabet();
            let autos = ws
                .iter()
                .zip(self.vars().names())
                .map(|(w, v)| Nfa::word_automaton(alphabet, w).pad_anywhere().on_track(v))
                .collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&Nfa<TrackLetter>> = autos.iter().collect();
            let product = compose_free_all(&refs)?;
            Ok(!cnf.intersect_nfa(&product)?.is_empty())
        }
    }

    /// Emptiness for `∀*` and `∃∀*` prefixes over a ranked grammar: the
    /// hyperlanguage is non-empty iff some singleton `{w}` is in it, iff
    /// the grammar derives the diagonal word of some `w`.
    pub fn sync_forall_empty(&self) -> Result<SyncEmptiness, CfhgError> {
        if !self.prefix.is_forall_or_exists_forall() {
            return Err(CfhgError::WrongPrefix(format!(
                "expected forall* or exists-forall*, got {}",
                self.prefix.shape()
            )));
        }
        let v = self.violations();
        if !v.is_empty() {
            return Err(CfhgError::NotRanked(v.len()));
        }
        let diag = self.diagonal_grammar();
        let witness = diag
            .shortest_word()
            .map(|w| w.iter().map(|l| l.get(0).clone()).collect::<Word>());
        Ok(SyncEmptiness {
            empty: witness.is_none(),
            witness,
        })
    }

    /// Rules using only diagonal letters; all-`#` letters are erased
    /// first since they pad every track alike.
    pub fn diagonal_grammar(&self) -> TrackCfg {
        let g = &self.grammar;
        let mut out = TrackCfg::new(g.alphabet().clone(), g.frame().clone(), g.var_name(g.start()));
        for v in 0..g.num_vars() {
            out.var_or_add(g.var_name(v));
        }
        for r in g.rules() {
            let rhs: Vec<GSym<TrackLetter>> = r
                .rhs
                .iter()
                .filter(|s| !s.terminal().is_some_and(TrackLetter::is_all_pad))
                .cloned()
                .collect();
            if rhs.iter().all(|s| s.terminal().is_none_or(TrackLetter::is_diagonal)) {
                let lhs = out.var_or_add(g.var_name(r.lhs));
                let rhs = rhs
                    .into_iter()
                    .map(|s| match s {
                        GSym::V(v) => GSym::V(out.var_or_add(g.var_name(v))),
                        t => t,
                    })
                    .collect();
                out.add_rule(lhs, rhs).expect("letters come from a valid grammar");
            }
        }
        out.cleanup()
    }

    /// Emptiness of the hyperlanguage, where decidable.
    pub fn is_empty(&self) -> Result<bool, CfhgError> {
        let q = self.prefix.quantifiers();
        if self.prefix.all_exists() || q.len() == 1 {
            return self.exists_empty();
        }
        if let Some(first_forall) = q.iter().position(|&x| x == Quantifier::Forall) {
            if q[first_forall..].contains(&Quantifier::Exists) {
                return Err(CfhgError::Undecidable(Problem::ForallExistsEmptiness));
            }
            if first_forall >= 2 {
                return Err(CfhgError::Undecidable(Problem::ExistsForallEmptiness));
            }
        }
        if !self.is_ranked() {
            return Err(CfhgError::Undecidable(Problem::ForallEmptinessUnranked));
        }
        Ok(self.sync_forall_empty()?.empty)
    }

    /// Regular membership: whether some language contained in `L(a)` is in
    /// the hyperlanguage.
    pub fn member_regular(&self, a: &SymNfa) -> Result<bool, CfhgError> {
        if self.prefix.has_forall() {
            return Err(CfhgError::Undecidable(Problem::ForallRegularMembership));
        }
        self.exists_regular_member(a)
    }

    /// Looks for a language of words up to `max_len` in the hyperlanguage.
    /// Evidence only: finding nothing decides nothing.
    pub fn bounded_nonempty_search(&self, max_len: usize) -> Result<Bounded, CfhgError> {
        Ok(match self.probe(max_len, LeafPath::Auto)?.into_iter().next() {
            Some(l) => Bounded::Witness(l),
            None => Bounded::NoWitnessWithinBound,
        })
    }

    /// Looks for a language of words of `L(a)` up to `max_len` in the
    /// hyperlanguage.
    pub fn bounded_regular_search(&self, a: &SymNfa, max_len: usize) -> Result<Bounded, CfhgError> {
        let universe: Vec<Word> = a
            .accepted_up_to(max_len)
            .into_iter()
            .filter(|w| self.grammar.alphabet().check_word(w).is_ok())
            .collect();
        if universe.len() > PROBE_UNIVERSE_CAP {
            return Err(NfhError::UniverseTooLarge {
                words: universe.len(),
                cap: PROBE_UNIVERSE_CAP,
            }
            .into());
        }
        let mut leaf = self.leaf(LeafPath::Auto);
        let found = probe_universe(&universe, self.prefix.quantifiers(), |ws| leaf(ws))?;
        Ok(match found.into_iter().next() {
            Some(l) => Bounded::Witness(l),
            None => Bounded::NoWitnessWithinBound,
        })
    }
}
