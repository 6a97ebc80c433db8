//! Nondeterministic finite hyperautomata and their acceptance of finite
//! languages.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{sync_letters, Alphabet, ModelError, Quantifier, QuantifierPrefix, VarSet, Word};
use crate::nfa::TrackNfa;

/// Largest universe `probe` will enumerate subsets of.
pub const PROBE_UNIVERSE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NfhError {
    #[error("hyperlanguage membership is only defined for non-empty languages")]
    EmptyLanguage,
    #[error("universe has {words} words; probing is limited to {cap}")]
    UniverseTooLarge { words: usize, cap: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A quantifier prefix over word variables plus an underlying automaton
/// over the track alphabet of those variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Nfh {
    prefix: QuantifierPrefix,
    underlying: TrackNfa,
}

impl Nfh {
    pub fn new(prefix: QuantifierPrefix, underlying: TrackNfa) -> Result<Self, NfhError> {
        if prefix.len() != underlying.vars().len() {
            return Err(NfhError::Model(ModelError::PrefixMismatch(format!(
                "{} quantifiers for {} variables",
                prefix.len(),
                underlying.vars().len()
            ))));
        }
        Ok(Nfh { prefix, underlying })
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.underlying.alphabet()
    }

    pub fn vars(&self) -> &VarSet {
        self.underlying.vars()
    }

    pub fn prefix(&self) -> &QuantifierPrefix {
        &self.prefix
    }

    pub fn underlying(&self) -> &TrackNfa {
        &self.underlying
    }

    /// Leaf check: the suffix-padded assignment is accepted.
    pub fn accepts_assignment(&self, words: &[&Word]) -> bool {
        let ws: Vec<&[crate::model::Sym]> = words.iter().map(|w| w.as_slice()).collect();
        self.underlying.accepts(&sync_letters(&ws))
    }

    /// Whether the finite language `lang` is in the hyperlanguage.
    /// Duplicate words are ignored.
    pub fn accepts(&self, lang: &[Word]) -> Result<bool, NfhError> {
        let mut words: Vec<Word> = lang.to_vec();
        words.sort();
        words.dedup();
        if words.is_empty() {
            return Err(NfhError::EmptyLanguage);
        }
        for w in &words {
            self.alphabet().check_word(w)?;
        }
        let ids: Vec<usize> = (0..words.len()).collect();
        evaluate_prefix(self.prefix.quantifiers(), &ids, |a| {
            let ws: Vec<&Word> = a.iter().map(|&i| &words[i]).collect();
            Ok::<_, NfhError>(self.accepts_assignment(&ws))
        })
    }

    /// All non-empty subsets of `Σ^{≤max_len}` that are accepted, each
    /// sorted length-lexicographically; the list is in subset-bitmask order.
    pub fn probe(&self, max_len: usize) -> Result<Vec<Vec<Word>>, NfhError> {
        let universe = self.alphabet().words_up_to(max_len);
        probe_universe(&universe, self.prefix.quantifiers(), |ws| {
            Ok(self.accepts_assignment(ws))
        })
    }
}

/// Subset enumeration shared by hyperautomata and hypergrammars. Leaf
/// results are cached across subsets, keyed by universe indices.
pub fn probe_universe<E, F>(universe: &[Word], prefix: &[Quantifier], mut leaf: F) -> Result<Vec<Vec<Word>>, E>
where
    E: From<NfhError>,
    F: FnMut(&[&Word]) -> Result<bool, E>,
{
    if universe.len() > PROBE_UNIVERSE_CAP {
        return Err(NfhError::UniverseTooLarge {
            words: universe.len(),
            cap: PROBE_UNIVERSE_CAP,
        }
        .into());
    }
    // Universe indices fit in 5 bits; longer prefixes fall back to Vec keys.
    let packable = prefix.len() <= 25;
    let mut packed: HashMap<u128, bool> = HashMap::new();
    let mut cache: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << universe.len()) {
        let ids: Vec<usize> = (0..universe.len()).filter(|i| mask & (1 << i) != 0).collect();
        let ok = evaluate_prefix::<E, _>(prefix, &ids, |a| {
            let key = a.iter().fold(0u128, |k, &i| (k << 5) | i as u128);
            let hit = if packable { packed.get(&key) } else { cache.get(a) };
            if let Some(&v) = hit {
                return Ok(v);
            }
            let ws: Vec<&Word> = a.iter().map(|&i| &universe[i]).collect();
            let v = leaf(&ws)?;
            if packable {
                packed.insert(key, v);
            } else {
                cache.insert(a.to_vec(), v);
            }
            Ok(v)
        })?;
        if ok {
            out.push(ids.iter().map(|&i| universe[i].clone()).collect());
        }
    }
    Ok(out)
}

/// Evaluates the quantifier tree over the candidate word ids with
/// short-circuiting; `leaf` sees one id per variable, in prefix order.
/// Every leaf tuple is visited at most once per evaluation, so callers
/// that evaluate many trees share a cache inside `leaf`.
pub fn evaluate_prefix<E, F>(prefix: &[Quantifier], ids: &[usize], mut leaf: F) -> Result<bool, E>
where
    F: FnMut(&[usize]) -> Result<bool, E>,
{
    let mut assignment = Vec::with_capacity(prefix.len());
    walk(prefix, ids, &mut assignment, &mut leaf)
}

fn walk<E, F>(prefix: &[Quantifier], ids: &[usize], assignment: &mut Vec<usize>, leaf: &mut F) -> Result<bool, E>
where
    F: FnMut(&[usize]) -> Result<bool, E>,
{
    let depth = assignment.len();
    if depth == prefix.len() {
        return leaf(assignment);
    }
    let want_all = prefix[depth] == Quantifier::Forall;
    for &i in ids {
        assignment.push(i);
        let v = walk(prefix, ids, assignment, leaf);
        assignment.pop();
        let v = v?;
        if want_all != v {
            return Ok(v);
        }
    }
    Ok(want_all)
}
