//! Post correspondence instances and the hypergrammars built from them.

use std::collections::VecDeque;

use crate::cfg::{GSym, TrackCfg};
use crate::model::{sync_letters, word, Alphabet, ModelError, Quantifier, QuantifierPrefix, Sym, TrackLetter, VarSet, Word};

use super::Cfhg;

/// Tiles `[a_i, b_i]` over `{a, b}`; tiles are numbered from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcpInstance {
    tiles: Vec<(Word, Word)>,
}

impl PcpInstance {
    pub fn new(tiles: Vec<(Word, Word)>) -> Result<Self, ModelError> {
        if tiles.is_empty() {
            return Err(ModelError::EmptyAlphabet);
        }
        let ab = Self::tile_alphabet();
        for (a, b) in &tiles {
            ab.check_word(a)?;
            ab.check_word(b)?;
        }
        Ok(PcpInstance { tiles })
    }

    /// Convenience for `&[("a", "baa"), ...]`.
    pub fn from_strs(tiles: &[(&str, &str)]) -> Result<Self, ModelError> {
        Self::new(tiles.iter().map(|(a, b)| (word(a), word(b))).collect())
    }

    pub fn tile_alphabet() -> Alphabet {
        Alphabet::new(["a", "b"]).expect("fixed alphabet")
    }

    pub fn tiles(&self) -> &[(Word, Word)] {
        &self.tiles
    }

    /// Top and bottom words for a 1-based index sequence.
    pub fn concat(&self, seq: &[usize]) -> (Word, Word) {
        let mut top = Word::new();
        let mut bottom = Word::new();
        for &i in seq {
            top.extend(self.tiles[i - 1].0.iter().cloned());
            bottom.extend(self.tiles[i - 1].1.iter().cloned());
        }
        (top, bottom)
    }

    pub fn is_solution(&self, seq: &[usize]) -> bool {
        if seq.is_empty() || seq.iter().any(|&i| i == 0 || i > self.tiles.len()) {
            return false;
        }
        let (t, b) = self.concat(seq);
        t == b
    }

    /// A shortest solution with at most `max_tiles` tiles, by breadth-first
    /// search over the unmatched overhang.
    pub fn solve_bounded(&self, max_tiles: usize) -> Option<Vec<usize>> {
        // (overhang, top_ahead, sequence)
        let mut queue: VecDeque<(Word, bool, Vec<usize>)> = VecDeque::new();
        queue.push_back((Word::new(), true, Vec::new()));
        let mut seen = std::collections::HashSet::new();
        while let Some((over, top_ahead, seq)) = queue.pop_front() {
            if seq.len() == max_tiles {
                continue;
            }
            for (i, (a, b)) in self.tiles.iter().enumerate() {
                let (mut ahead, behind) = if top_ahead { (over.clone(), b) } else { (over.clone(), a) };
                ahead.extend(if top_ahead { a.iter() } else { b.iter() }.cloned());
                // `ahead` must start with `behind` or vice versa.
                let n = ahead.len().min(behind.len());
                if ahead[..n] != behind[..n] {
                    continue;
                }
                let (over2, top2) = if ahead.len() >= behind.len() {
                    (ahead[n..].to_vec(), top_ahead)
                } else {
                    (behind[n..].to_vec(), !top_ahead)
                };
                let mut seq2 = seq.clone();
                seq2.push(i + 1);
                if over2.is_empty() {
                    return Some(seq2);
                }
                if seen.insert((over2.clone(), top2)) {
                    queue.push_back((over2, top2, seq2));
                }
            }
        }
        None
    }

    fn index_sym(i: usize) -> Sym {
        Sym::new(i.to_string())
    }

    /// `∀x1∀x2`: `V0 → ⟨a_i,b_i⟩ V0 | ⟨a_i,b_i⟩`, the shorter side padded
    /// with trailing `#`. The hyperlanguage is non-empty iff the instance
    /// has a solution.
    pub fn encode_forall(&self) -> Cfhg {
        let vars = VarSet::new(["x1", "x2"]).expect("fixed names");
        let mut g = TrackCfg::new(Self::tile_alphabet(), vars.clone(), "V0");
        for (a, b) in &self.tiles {
            let tile: Vec<GSym<TrackLetter>> = sync_letters(&[a.as_slice(), b.as_slice()]).into_iter().map(GSym::T).collect();
            let mut looping = tile.clone();
            looping.push(GSym::V(0));
            g.add_rule(0, looping).expect("letters over the tile alphabet");
            g.add_rule(0, tile).expect("letters over the tile alphabet");
        }
        let prefix = QuantifierPrefix::from_quantifiers(&vars, vec![Quantifier::Forall; 2]).expect("two vars");
        Cfhg::new(prefix, g).expect("prefix matches")
    }

    /// `∃x1∃x2∀x3`: `V0 → V1 | V2`,
    /// `V1 → ⟨a_i, c^|a_i|, a_i⟩ V1 ⟨i,c,i⟩ | ⟨a_i, c^|a_i|, a_i⟩⟨i,c,i⟩`,
    /// `V2 → ⟨b_i, c^|b_i|, c^|b_i|⟩ V2 ⟨i,c,c⟩ | ...`. No letter carries `#`.
    pub fn encode_exists_forall(&self) -> Cfhg {
        let vars = VarSet::new(["x1", "x2", "x3"]).expect("fixed names");
        let mut symbols = vec![Sym::new("a"), Sym::new("b"), Sym::new("c")];
        symbols.extend((1..=self.tiles.len()).map(Self::index_sym));
        let alphabet = Alphabet::new(symbols.iter().map(Sym::as_str)).expect("distinct symbols");
        let mut g = TrackCfg::new(alphabet, vars.clone(), "V0");
        let v1 = g.add_var("V1").expect("fresh");
        let v2 = g.add_var("V2").expect("fresh");
        g.add_rule(0, vec![GSym::V(v1)]).expect("valid");
        g.add_rule(0, vec![GSym::V(v2)]).expect("valid");
        let c = Sym::new("c");
        for (i, (a, b)) in self.tiles.iter().enumerate() {
            let idx = Self::index_sym(i + 1);
            let top: Vec<GSym<TrackLetter>> = a
                .iter()
                .map(|s| GSym::T(TrackLetter::new(vec![s.clone(), c.clone(), s.clone()])))
                .collect();
            let bottom: Vec<GSym<TrackLetter>> = b
                .iter()
                .map(|s| GSym::T(TrackLetter::new(vec![s.clone(), c.clone(), c.clone()])))
                .collect();
            let top_tail = GSym::T(TrackLetter::new(vec![idx.clone(), c.clone(), idx.clone()]));
            let bottom_tail = GSym::T(TrackLetter::new(vec![idx, c.clone(), c.clone()]));
            for (var, head, tail) in [(v1, top, top_tail), (v2, bottom, bottom_tail)] {
                let mut rec = head.clone();
                rec.push(GSym::V(var));
                rec.push(tail.clone());
                g.add_rule(var, rec).expect("valid");
                let mut base = head;
                base.push(tail);
                g.add_rule(var, base).expect("valid");
            }
        }
        let prefix = QuantifierPrefix::from_quantifiers(
            &vars,
            vec![Quantifier::Exists, Quantifier::Exists, Quantifier::Forall],
        )
        .expect("three vars");
        Cfhg::new(prefix, g).expect("prefix matches")
    }

    /// The two-word language the `∃∃∀` encoding accepts for a solution:
    /// the top word followed by the index block as the grammar emits it
    /// (innermost tile first), and `c` repeated to the same length.
    pub fn exists_forall_witness(&self, seq: &[usize]) -> Vec<Word> {
        let (top, _) = self.concat(seq);
        let mut x1 = top;
        x1.extend(seq.iter().rev().map(|&i| Self::index_sym(i)));
        let x2 = vec![Sym::new("c"); x1.len()];
        vec![x1, x2]
    }
}
