use std::fmt;
use std::hash::Hash;

use crate::model::{Alphabet, Sym, TrackLetter, VarSet};

/// Letter types that automata and grammars can run on: plain symbols of
/// `Σ ∪ {#}`, or track letters of `(Σ ∪ {#})^X`.
///
/// The `Frame` is whatever context a letter needs to be interpreted; for
/// track letters it is the variable set.
pub trait Letter: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync + 'static {
    type Frame: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn is_all_pad(&self) -> bool;

    fn all_pad(frame: &Self::Frame) -> Self;

    /// Every letter over `alphabet` except the all-pad letter.
    fn universe(alphabet: &Alphabet, frame: &Self::Frame) -> Vec<Self>;

    /// Well-formedness against an alphabet and frame (pads allowed).
    fn fits(&self, alphabet: &Alphabet, frame: &Self::Frame) -> bool;

    fn render(&self, frame: &Self::Frame) -> String;
}

impl Letter for Sym {
    type Frame = ();

    fn is_all_pad(&self) -> bool {
        self.is_pad()
    }

    fn all_pad(_: &()) -> Self {
        Sym::pad()
    }

    fn universe(alphabet: &Alphabet, _: &()) -> Vec<Self> {
        alphabet.symbols().to_vec()
    }

    fn fits(&self, alphabet: &Alphabet, _: &()) -> bool {
        self.is_pad() || alphabet.contains(self)
    }

    fn render(&self, _: &()) -> String {
        self.to_string()
    }
}

impl Letter for TrackLetter {
    type Frame = VarSet;

    fn is_all_pad(&self) -> bool {
        TrackLetter::is_all_pad(self)
    }

    fn all_pad(frame: &VarSet) -> Self {
        TrackLetter::new(vec![Sym::pad(); frame.len()])
    }

    fn universe(alphabet: &Alphabet, frame: &VarSet) -> Vec<Self> {
        let syms = alphabet.with_pad();
        let mut acc: Vec<Vec<Sym>> = vec![Vec::new()];
        for _ in 0..frame.len() {
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    syms.iter().map(move |s| {
                        let mut p = prefix.clone();
                        p.push(s.clone());
                        p
                    })
                })
                .collect();
        }
        acc.into_iter()
            .map(TrackLetter::new)
            .filter(|l| !l.is_all_pad())
            .collect()
    }

    fn fits(&self, alphabet: &Alphabet, frame: &VarSet) -> bool {
        self.arity() == frame.len() && self.syms().iter().all(|s| s.is_pad() || alphabet.contains(s))
    }

    fn render(&self, frame: &VarSet) -> String {
        TrackLetter::render(self, frame)
    }
}
