//! Symbols, word variables, track letters and word assignments.
//!
//! Everything else in the crate runs on these types. A [`TrackLetter`] is a
//! positional tuple over a [`VarSet`]: component `i` is the symbol read on
//! the track of the `i`-th variable, with [`Sym::pad`] marking padding.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// The reserved pad marker.
pub const PAD: &str = "#";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,
    #[error("the pad marker `#` cannot be an alphabet symbol")]
    PadInAlphabet,
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("variable set must not be empty")]
    EmptyVarSet,
    #[error("duplicate variable `{0}`")]
    DuplicateVar(String),
    #[error("tracks have different lengths: {0:?}")]
    LengthMismatch(Vec<usize>),
    #[error("expected {expected} tracks, got {got}")]
    TrackCount { expected: usize, got: usize },
    #[error("quantifier prefix does not match variables: {0}")]
    PrefixMismatch(String),
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),
}

/// An opaque alphabet token. The token `#` is the pad marker.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(s: impl AsRef<str>) -> Self {
        Sym(Arc::from(s.as_ref()))
    }

    pub fn pad() -> Self {
        Sym::new(PAD)
    }

    pub fn is_pad(&self) -> bool {
        &*self.0 == PAD
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A (possibly padded) word over symbols.
pub type Word = Vec<Sym>;

/// Parses a word written either as a run of single-character symbols
/// (`"a#b"`) or as whitespace-separated tokens (`"a b 12"`). `eps` and the
/// empty string both denote the empty word.
pub fn word(s: &str) -> Word {
    let s = s.trim();
    if s.is_empty() || s == "eps" {
        return Vec::new();
    }
    if s.contains(char::is_whitespace) {
        s.split_whitespace().map(Sym::new).collect()
    } else {
        s.chars().map(|c| Sym::new(c.to_string())).collect()
    }
}

/// Renders a word the way [`word`] reads it back. The empty word is `eps`.
pub fn show_word(w: &[Sym]) -> String {
    if w.is_empty() {
        return "eps".to_string();
    }
    if w.iter().all(|s| s.as_str().chars().count() == 1) {
        w.iter().map(Sym::as_str).collect()
    } else {
        w.iter().map(Sym::as_str).collect::<Vec<_>>().join(" ")
    }
}

/// Deletes every pad marker.
pub fn strip_hash(w: &[Sym]) -> Word {
    w.iter().filter(|s| !s.is_pad()).cloned().collect()
}

/// True iff `padded` is `w` with pad markers inserted somewhere.
pub fn is_padding_of(padded: &[Sym], w: &[Sym]) -> bool {
    !w.iter().any(Sym::is_pad) && strip_hash(padded) == w
}

/// A word is suffix-padded when it matches `Σ*#*`.
pub fn is_suffix_padded(w: &[Sym]) -> bool {
    match w.iter().position(Sym::is_pad) {
        Some(i) => w[i..].iter().all(Sym::is_pad),
        None => true,
    }
}

/// The base alphabet Σ: unique symbols in declaration order, never `#`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<Sym>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for s in symbols {
            let sym = Sym::new(s);
            if sym.is_pad() {
                return Err(ModelError::PadInAlphabet);
            }
            if !seen.insert(sym.clone()) {
                return Err(ModelError::DuplicateSymbol(sym.to_string()));
            }
            out.push(sym);
        }
        if out.is_empty() {
            return Err(ModelError::EmptyAlphabet);
        }
        Ok(Alphabet { symbols: out })
    }

    pub fn symbols(&self) -> &[Sym] {
        &self.symbols
    }

    pub fn contains(&self, s: &Sym) -> bool {
        self.symbols.contains(s)
    }

    /// Σ ∪ {#}, pad last.
    pub fn with_pad(&self) -> Vec<Sym> {
        let mut v = self.symbols.clone();
        v.push(Sym::pad());
        v
    }

    /// Union of two alphabets, keeping `self`'s order first.
    pub fn merge(&self, other: &Alphabet) -> Alphabet {
        let mut symbols = self.symbols.clone();
        for s in &other.symbols {
            if !symbols.contains(s) {
                symbols.push(s.clone());
            }
        }
        Alphabet { symbols }
    }

    /// All words over Σ of length at most `n`, in length-lexicographic order.
    pub fn words_up_to(&self, n: usize) -> Vec<Word> {
        let mut out: Vec<Word> = vec![Vec::new()];
        let mut frontier: Vec<Word> = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for w in &frontier {
                for s in &self.symbols {
                    let mut w2 = w.clone();
                    w2.push(s.clone());
                    next.push(w2);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    pub fn check_word(&self, w: &[Sym]) -> Result<(), ModelError> {
        match w.iter().find(|s| !self.contains(s)) {
            Some(s) => Err(ModelError::UnknownSymbol(s.to_string())),
            None => Ok(()),
        }
    }
}

/// Ordered word variables `x_1 .. x_k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VarSet(Arc<[String]>);

impl VarSet {
    pub fn new<I, S>(names: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ModelError::EmptyVarSet);
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(ModelError::DuplicateVar(n.clone()));
            }
        }
        Ok(VarSet(names.into()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// Concatenation; fails when the two sets share a name.
    pub fn concat(&self, other: &VarSet) -> Result<VarSet, ModelError> {
        VarSet::new(self.0.iter().chain(other.0.iter()).cloned())
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// One letter of `(Σ ∪ {#})^X`, positional over a [`VarSet`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrackLetter(Arc<[Sym]>);

impl TrackLetter {
    pub fn new(syms: Vec<Sym>) -> Self {
        TrackLetter(syms.into())
    }

    /// Builds a letter from single-character components, e.g. `"a#"`.
    pub fn from_chars(s: &str) -> Self {
        TrackLetter::new(s.chars().map(|c| Sym::new(c.to_string())).collect())
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn syms(&self) -> &[Sym] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &Sym {
        &self.0[i]
    }

    /// Variables (as positions) assigned `#`.
    pub fn pad_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, s)| s.is_pad()).map(|(i, _)| i)
    }

    pub fn is_all_pad(&self) -> bool {
        self.0.iter().all(Sym::is_pad)
    }

    /// Every component is the same non-pad symbol.
    pub fn is_diagonal(&self) -> bool {
        match self.0.first() {
            Some(first) => !first.is_pad() && self.0.iter().all(|s| s == first),
            None => false,
        }
    }

    pub fn concat(&self, other: &TrackLetter) -> TrackLetter {
        TrackLetter(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    /// `[x1=a,x2=#]`
    pub fn render(&self, vars: &VarSet) -> String {
        let parts: Vec<String> = vars
            .names()
            .iter()
            .zip(self.0.iter())
            .map(|(v, s)| format!("{v}={s}"))
            .collect();
        format!("[{}]", parts.join(","))
    }
}

impl fmt::Debug for TrackLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ">")
    }
}

/// A word assignment: a word over track letters sharing one [`VarSet`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HWord {
    vars: VarSet,
    letters: Vec<TrackLetter>,
}

impl HWord {
    pub fn new(vars: VarSet, letters: Vec<TrackLetter>) -> Result<Self, ModelError> {
        if let Some(l) = letters.iter().find(|l| l.arity() != vars.len()) {
            return Err(ModelError::TrackCount {
                expected: vars.len(),
                got: l.arity(),
            });
        }
        Ok(HWord { vars, letters })
    }

    /// Zips equal-length padded tracks, given in `vars` order.
    pub fn from_tracks(vars: VarSet, tracks: &[Word]) -> Result<Self, ModelError> {
        if tracks.len() != vars.len() {
            return Err(ModelError::TrackCount {
                expected: vars.len(),
                got: tracks.len(),
            });
        }
        let lens: Vec<usize> = tracks.iter().map(Vec::len).collect();
        if lens.windows(2).any(|w| w[0] != w[1]) {
            return Err(ModelError::LengthMismatch(lens));
        }
        let n = lens.first().copied().unwrap_or(0);
        let letters = (0..n)
            .map(|i| TrackLetter::new(tracks.iter().map(|t| t[i].clone()).collect()))
            .collect();
        Ok(HWord { vars, letters })
    }

    /// Convenience for tests and fixtures: `&[("x", "aa#"), ("y", "abb")]`.
    pub fn from_named(tracks: &[(&str, &str)]) -> Result<Self, ModelError> {
        let vars = VarSet::new(tracks.iter().map(|(v, _)| v.to_string()))?;
        let words: Vec<Word> = tracks.iter().map(|(_, w)| word(w)).collect();
        HWord::from_tracks(vars, &words)
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn letters(&self) -> &[TrackLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The padded word on every track, in `vars` order.
    pub fn tracks(&self) -> Vec<Word> {
        (0..self.vars.len())
            .map(|i| self.letters.iter().map(|l| l.get(i).clone()).collect())
            .collect()
    }

    pub fn track(&self, var: &str) -> Option<Word> {
        let i = self.vars.index_of(var)?;
        Some(self.letters.iter().map(|l| l.get(i).clone()).collect())
    }

    /// Every track matches `Σ*#*`.
    pub fn is_synchronous(&self) -> bool {
        is_synchronous(&self.letters)
    }
}

/// Per-track `Σ*#*` check on a raw letter sequence.
pub fn is_synchronous(letters: &[TrackLetter]) -> bool {
    let Some(first) = letters.first() else {
        return true;
    };
    let mut padded = vec![false; first.arity()];
    for l in letters {
        for (i, s) in l.syms().iter().enumerate() {
            if s.is_pad() {
                padded[i] = true;
            } else if padded[i] {
                return false;
            }
        }
    }
    true
}

/// Right-pads every word to the longest length and zips the result.
pub fn pad_to_sync(vars: VarSet, words: &[Word]) -> Result<HWord, ModelError> {
    let n = words.iter().map(Vec::len).max().unwrap_or(0);
    let tracks: Vec<Word> = words
        .iter()
        .map(|w| {
            let mut t = w.clone();
            t.resize(n, Sym::pad());
            t
        })
        .collect();
    HWord::from_tracks(vars, &tracks)
}

/// Letter sequence of [`pad_to_sync`] without building an [`HWord`].
pub fn sync_letters(words: &[&[Sym]]) -> Vec<TrackLetter> {
    let n = words.iter().map(|w| w.len()).max().unwrap_or(0);
    let pad = Sym::pad();
    (0..n)
        .map(|i| {
            TrackLetter::new(
                words
                    .iter()
                    .map(|w| w.get(i).cloned().unwrap_or_else(|| pad.clone()))
                    .collect(),
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn letter(self) -> char {
        match self {
            Quantifier::Exists => 'E',
            Quantifier::Forall => 'A',
        }
    }
}

/// One quantifier per variable, in variable order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantifierPrefix {
    quantifiers: Vec<Quantifier>,
}

impl QuantifierPrefix {
    /// Validates that `entries` names every variable of `vars` once, in order.
    pub fn new(vars: &VarSet, entries: &[(Quantifier, &str)]) -> Result<Self, ModelError> {
        if entries.len() != vars.len() {
            return Err(ModelError::PrefixMismatch(format!(
                "{} quantifiers for {} variables",
                entries.len(),
                vars.len()
            )));
        }
        for ((_, name), expected) in entries.iter().zip(vars.names()) {
            if name != expected {
                return Err(ModelError::PrefixMismatch(format!(
                    "expected `{expected}`, found `{name}`"
                )));
            }
        }
        Ok(QuantifierPrefix {
            quantifiers: entries.iter().map(|(q, _)| *q).collect(),
        })
    }

    /// Positional constructor; the caller guarantees the length.
    pub fn from_quantifiers(vars: &VarSet, quantifiers: Vec<Quantifier>) -> Result<Self, ModelError> {
        if quantifiers.len() != vars.len() {
            return Err(ModelError::PrefixMismatch(format!(
                "{} quantifiers for {} variables",
                quantifiers.len(),
                vars.len()
            )));
        }
        Ok(QuantifierPrefix { quantifiers })
    }

    pub fn quantifiers(&self) -> &[Quantifier] {
        &self.quantifiers
    }

    pub fn len(&self) -> usize {
        self.quantifiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quantifiers.is_empty()
    }

    pub fn all_exists(&self) -> bool {
        self.quantifiers.iter().all(|q| *q == Quantifier::Exists)
    }

    pub fn all_forall(&self) -> bool {
        self.quantifiers.iter().all(|q| *q == Quantifier::Forall)
    }

    pub fn has_forall(&self) -> bool {
        self.quantifiers.contains(&Quantifier::Forall)
    }

    /// `∀*` or `∃∀*`.
    pub fn is_forall_or_exists_forall(&self) -> bool {
        match self.quantifiers.split_first() {
            Some((_, rest)) => rest.iter().all(|q| *q == Quantifier::Forall),
            None => false,
        }
    }

    /// Shape like `EEA` for messages.
    pub fn shape(&self) -> String {
        self.quantifiers.iter().map(|q| q.letter()).collect()
    }

    /// `A x E y`
    pub fn render(&self, vars: &VarSet) -> String {
        self.quantifiers
            .iter()
            .zip(vars.names())
            .map(|(q, v)| format!("{} {v}", q.letter()))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        word(s)
    }

    #[test]
    fn strip_hash_examples() {
        assert_eq!(strip_hash(&w("a#b#")), w("ab"));
        assert_eq!(strip_hash(&w("")), w(""));
        assert_eq!(strip_hash(&w("bb#aabb#baa")), w("bbaabbbaa"));
    }

    #[test]
    fn padding_membership() {
        assert!(is_padding_of(&w("a#b"), &w("ab")));
        assert!(!is_padding_of(&w("ab#"), &w("ba")));
        assert!(is_padding_of(&w("bb#aabb#baa"), &w("bbaabbbaa")));
    }

    #[test]
    fn tracks_zip_into_letters() {
        let h = HWord::from_named(&[("x", "aa#"), ("y", "abb")]).unwrap();
        let expected: Vec<TrackLetter> = ["aa", "ab", "#b"]
            .iter()
            .map(|s| TrackLetter::from_chars(s))
            .collect();
        assert_eq!(h.letters(), expected.as_slice());

        let empty = HWord::from_named(&[("x", "")]).unwrap();
        assert!(empty.is_empty());

        assert!(matches!(
            HWord::from_named(&[("x", "ab"), ("y", "a")]),
            Err(ModelError::LengthMismatch(_))
        ));
    }

    #[test]
    fn tracks_invert_zip() {
        let h = HWord::from_named(&[("x", "a#"), ("y", "ab")]).unwrap();
        assert_eq!(h.tracks(), vec![w("a#"), w("ab")]);
        let e = HWord::from_named(&[("x", ""), ("y", "")]).unwrap();
        assert_eq!(e.tracks(), vec![w(""), w("")]);
    }

    #[test]
    fn synchronicity() {
        assert!(HWord::from_named(&[("x", "ab#"), ("y", "abb")]).unwrap().is_synchronous());
        assert!(!HWord::from_named(&[("x", "a#b")]).unwrap().is_synchronous());
        assert!(HWord::from_named(&[("x1", "a##"), ("x2", "baa")]).unwrap().is_synchronous());
    }

    #[test]
    fn pad_to_sync_examples() {
        let vars = VarSet::new(["x", "y"]).unwrap();
        let h = pad_to_sync(vars.clone(), &[w("aa"), w("abb")]).unwrap();
        assert_eq!(h.tracks(), vec![w("aa#"), w("abb")]);
        let one = pad_to_sync(VarSet::new(["x"]).unwrap(), &[w("a")]).unwrap();
        assert_eq!(one.tracks(), vec![w("a")]);
        assert!(pad_to_sync(vars, &[w(""), w("")]).unwrap().is_empty());
    }

    #[test]
    fn alphabet_rejects_pad_and_duplicates() {
        assert_eq!(Alphabet::new(["a", "#"]), Err(ModelError::PadInAlphabet));
        assert_eq!(
            Alphabet::new(["a", "a"]),
            Err(ModelError::DuplicateSymbol("a".into()))
        );
        assert_eq!(Alphabet::new(Vec::<&str>::new()), Err(ModelError::EmptyAlphabet));
        let sigma = Alphabet::new(["a", "b"]).unwrap();
        assert_eq!(sigma.words_up_to(2).len(), 7);
    }

    #[test]
    fn multi_char_symbols_round_trip() {
        let ww = word("a b 12");
        assert_eq!(ww.len(), 3);
        assert_eq!(show_word(&ww), "a b 12");
        assert_eq!(show_word(&[]), "eps");
        assert_eq!(word("eps"), Vec::<Sym>::new());
    }

    #[test]
    fn prefix_must_follow_var_order() {
        let vars = VarSet::new(["x", "y"]).unwrap();
        assert!(QuantifierPrefix::new(&vars, &[(Quantifier::Forall, "x"), (Quantifier::Exists, "y")]).is_ok());
        assert!(QuantifierPrefix::new(&vars, &[(Quantifier::Exists, "y"), (Quantifier::Forall, "x")]).is_err());
        assert!(QuantifierPrefix::new(&vars, &[(Quantifier::Exists, "x")]).is_err());
    }

    #[test]
    fn letter_rendering() {
        let vars = VarSet::new(["x1", "x2"]).unwrap();
        assert_eq!(TrackLetter::from_chars("a#").render(&vars), "[x1=a,x2=#]");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn base_word() -> impl Strategy<Value = Word> {
            proptest::collection::vec(prop_oneof![Just("a"), Just("b")], 0..6)
                .prop_map(|v| v.into_iter().map(Sym::new).collect())
        }

        fn padded_word() -> impl Strategy<Value = Word> {
            proptest::collection::vec(prop_oneof![Just("a"), Just("b"), Just("#")], 0..8)
                .prop_map(|v| v.into_iter().map(Sym::new).collect())
        }

        proptest! {
            #[test]
            fn strip_inverts_padding(wp in padded_word()) {
                let w = strip_hash(&wp);
                prop_assert!(is_padding_of(&wp, &w));
                prop_assert!(w.len() <= wp.len());
            }

            #[test]
            fn zip_unzip_identity(ws in proptest::collection::vec(padded_word(), 1..4)) {
                let n = ws.iter().map(Vec::len).max().unwrap_or(0);
                let tracks: Vec<Word> = ws.into_iter().map(|mut w| { w.resize(n, Sym::new("a")); w }).collect();
                let vars = VarSet::new((0..tracks.len()).map(|i| format!("x{i}"))).unwrap();
                let h = HWord::from_tracks(vars, &tracks).unwrap();
                prop_assert_eq!(h.tracks(), tracks);
            }

            #[test]
            fn pad_to_sync_is_synchronous_and_minimal(ws in proptest::collection::vec(base_word(), 1..4)) {
                let vars = VarSet::new((0..ws.len()).map(|i| format!("x{i}"))).unwrap();
                let h = pad_to_sync(vars, &ws).unwrap();
                prop_assert!(h.is_synchronous());
                let n = ws.iter().map(Vec::len).max().unwrap_or(0);
                prop_assert_eq!(h.len(), n);
                for (t, w) in h.tracks().iter().zip(&ws) {
                    prop_assert!(is_padding_of(t, w));
                    prop_assert!(is_suffix_padded(t));
                }
            }
        }
    }
}
