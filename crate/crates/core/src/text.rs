//! Line-oriented text formats.
//!
//! Every file is a list of `key: value` lines. Blank lines are skipped and
//! `#!` starts a comment (a bare `#` is the pad symbol). Track letters are
//! written `[x=a,y=#]`.
//!
//! ```text
//! type: nfh
//! alphabet: a
//! vars: x y
//! quantifiers: A x E y
//! states: q0 q1
//! initial: q0
//! accepting: q1
//! trans: q0 [x=a,y=a] q0
//! trans: q0 [x=#,y=a] q1
//! ```
//!
//! Grammars use `start: V0` and `rule: V0 -> [x=c] V0 [x=a]` (`eps` for
//! the empty right-hand side). Language files hold one word per line and
//! PCP files one tile `a | baa` per line.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cfg::{Cfg, GSym};
use crate::cfhg::pcp::PcpInstance;
use crate::cfhg::Cfhg;
use crate::letter::Letter;
use crate::model::{show_word, word, Alphabet, Quantifier, QuantifierPrefix, Sym, TrackLetter, VarSet, Word};
use crate::nfa::{Dfa, Nfa};
use crate::nfh::Nfh;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `{0}:` line")]
    Missing(&'static str),
}

fn err(line: usize, msg: impl Into<String>) -> TextError {
    TextError::Syntax { line, msg: msg.into() }
}

/// Letters that can be read from and written to text.
pub trait TextLetter: Letter {
    fn frame_from(vars: Option<VarSet>, line: usize) -> Result<Self::Frame, TextError>;
    fn frame_vars(frame: &Self::Frame) -> Option<&VarSet>;
    fn parse(tok: &str, alphabet: &Alphabet, frame: &Self::Frame, line: usize) -> Result<Self, TextError>;
}

impl TextLetter for Sym {
    fn frame_from(vars: Option<VarSet>, line: usize) -> Result<(), TextError> {
        match vars {
            None => Ok(()),
            Some(_) => Err(err(line, "a `vars:` line is not allowed here")),
        }
    }

    fn frame_vars(_: &()) -> Option<&VarSet> {
        None
    }

    fn parse(tok: &str, alphabet: &Alphabet, _: &(), line: usize) -> Result<Sym, TextError> {
        let s = Sym::new(tok);
        if s.is_pad() || alphabet.contains(&s) {
            Ok(s)
        } else {
            Err(err(line, format!("symbol `{tok}` is not in the alphabet")))
        }
    }
}

impl TextLetter for TrackLetter {
    fn frame_from(vars: Option<VarSet>, _: usize) -> Result<VarSet, TextError> {
        vars.ok_or(TextError::Missing("vars"))
    }

    fn frame_vars(frame: &VarSet) -> Option<&VarSet> {
        Some(frame)
    }

    fn parse(tok: &str, alphabet: &Alphabet, vars: &VarSet, line: usize) -> Result<TrackLetter, TextError> {
        parse_track_letter(tok, alphabet, vars).map_err(|m| err(line, m))
    }
}

/// `[x=a,y=#]`, variables in any order, each exactly once.
pub fn parse_track_letter(tok: &str, alphabet: &Alphabet, vars: &VarSet) -> Result<TrackLetter, String> {
    let inner = tok
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| format!("expected a bracketed track letter, got `{tok}`"))?;
    let mut slots: Vec<Option<Sym>> = vec![None; vars.len()];
    for part in inner.split(',') {
        let (v, s) = part
            .split_once('=')
            .ok_or_else(|| format!("expected `var=symbol` in `{tok}`"))?;
        let (v, s) = (v.trim(), s.trim());
        let i = vars.index_of(v).ok_or_else(|| format!("unknown variable `{v}` in `{tok}`"))?;
        let sym = Sym::new(s);
        if !sym.is_pad() && !alphabet.contains(&sym) {
            return Err(format!("symbol `{s}` is not in the alphabet"));
        }
        if slots[i].replace(sym).is_some() {
            return Err(format!("variable `{v}` appears twice in `{tok}`"));
        }
    }
    let syms = slots
        .into_iter()
        .zip(vars.names())
        .map(|(s, v)| s.ok_or_else(|| format!("variable `{v}` missing from `{tok}`")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TrackLetter::new(syms))
}

/// The `key: value` lines of a file, with line numbers.
struct Doc {
    items: Vec<(usize, String, String)>,
}

impl Doc {
    fn parse(text: &str, keys: &[&'static str]) -> Result<Doc, TextError> {
        let mut items = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = match raw.find("#!") {
                Some(p) => &raw[..p],
                None => raw,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content
                .split_once(':')
                .ok_or_else(|| err(line, format!("expected `key: value`, got `{content}`")))?;
            let k = k.trim();
            if !keys.contains(&k) {
                return Err(err(line, format!("unknown key `{k}`")));
            }
            items.push((line, k.to_string(), v.trim().to_string()));
        }
        Ok(Doc { items })
    }

    fn single(&self, key: &'static str) -> Result<Option<(usize, &str)>, TextError> {
        let mut found = self.items.iter().filter(|(_, k, _)| k == key);
        let first = found.next();
        if let Some((line, _, _)) = found.next() {
            return Err(err(*line, format!("duplicate `{key}:` line")));
        }
        Ok(first.map(|(l, _, v)| (*l, v.as_str())))
    }

    fn required(&self, key: &'static str) -> Result<(usize, &str), TextError> {
        self.single(key)?.ok_or(TextError::Missing(key))
    }

    fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = (usize, &'a str)> + 'a {
        self.items.iter().filter(move |(_, k, _)| k == key).map(|(l, _, v)| (*l, v.as_str()))
    }

    fn expect_type(&self, allowed: &[&str]) -> Result<(), TextError> {
        if let Some((line, t)) = self.single("type")? {
            if !allowed.contains(&t) {
                return Err(err(line, format!("expected type {}, got `{t}`", allowed.join(" or "))));
            }
        }
        Ok(())
    }

    fn alphabet(&self) -> Result<Alphabet, TextError> {
        let (line, v) = self.required("alphabet")?;
        Alphabet::new(v.split_whitespace()).map_err(|e| err(line, e.to_string()))
    }

    fn vars(&self) -> Result<Option<VarSet>, TextError> {
        self.single("vars")?
            .map(|(line, v)| VarSet::new(v.split_whitespace()).map_err(|e| err(line, e.to_string())))
            .transpose()
    }

    fn quantifiers(&self, vars: &VarSet) -> Result<QuantifierPrefix, TextError> {
        let (line, v) = self.required("quantifiers")?;
        let toks: Vec<&str> = v.split_whitespace().collect();
        if !toks.len().is_multiple_of(2) {
            return Err(err(line, "expected pairs like `A x E y`"));
        }
        let entries = toks
            .chunks(2)
            .map(|c| {
                let q = match c[0] {
                    "A" => Quantifier::Forall,
                    "E" => Quantifier::Exists,
                    other => return Err(err(line, format!("unknown quantifier `{other}`"))),
                };
                Ok((q, c[1]))
            })
            .collect::<Result<Vec<_>, _>>()?;
        QuantifierPrefix::new(vars, &entries).map_err(|e| err(line, e.to_string()))
    }
}

const AUTOMATON_KEYS: &[&str] = &["type", "alphabet", "vars", "quantifiers", "states", "initial", "accepting", "trans"];
const GRAMMAR_KEYS: &[&str] = &["type", "alphabet", "vars", "quantifiers", "start", "rule"];

struct Skeleton<L: TextLetter> {
    alphabet: Alphabet,
    frame: L::Frame,
    states: Vec<String>,
    initial: Vec<usize>,
    accepting: Vec<usize>,
    trans: Vec<(usize, usize, L, usize)>,
}

fn skeleton<L: TextLetter>(doc: &Doc) -> Result<Skeleton<L>, TextError> {
    let alphabet = doc.alphabet()?;
    let vars_line = doc.single("vars")?.map_or(0, |(l, _)| l);
    let frame = L::frame_from(doc.vars()?, vars_line)?;
    let (sline, svals) = doc.required("states")?;
    let mut index = BTreeMap::new();
    let mut states = Vec::new();
    for s in svals.split_whitespace() {
        if index.insert(s.to_string(), states.len()).is_some() {
            return Err(err(sline, format!("duplicate state `{s}`")));
        }
        states.push(s.to_string());
    }
    let lookup = |line: usize, s: &str| index.get(s).copied().ok_or_else(|| err(line, format!("unknown state `{s}`")));
    let list = |key: &'static str| -> Result<Vec<usize>, TextError> {
        match doc.single(key)? {
            None => Ok(Vec::new()),
            Some((line, v)) => v.split_whitespace().map(|s| lookup(line, s)).collect(),
        }
    };
    let initial = list("initial")?;
    let accepting = list("accepting")?;
    let mut trans = Vec::new();
    for (line, v) in doc.all("trans") {
        let toks: Vec<&str> = v.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(err(line, "expected `trans: from letter to`"));
        }
        let from = lookup(line, toks[0])?;
        let to = lookup(line, toks[toks.len() - 1])?;
        let letter = L::parse(&toks[1..toks.len() - 1].join(""), &alphabet, &frame, line)?;
        trans.push((line, from, letter, to));
    }
    Ok(Skeleton {
        alphabet,
        frame,
        states,
        initial,
        accepting,
        trans,
    })
}

fn nfa_from<L: TextLetter>(sk: Skeleton<L>) -> Nfa<L> {
    let mut a = Nfa::new(sk.alphabet, sk.frame);
    for s in &sk.states {
        a.add_state(s.clone());
    }
    for q in sk.initial {
        a.set_initial(q);
    }
    for q in sk.accepting {
        a.set_accepting(q);
    }
    for (_, p, l, q) in sk.trans {
        a.add_transition(p, l, q);
    }
    a
}

/// Reads an `nfa` file; a `dfa` file is accepted as well.
pub fn parse_nfa<L: TextLetter>(text: &str) -> Result<Nfa<L>, TextError> {
    let doc = Doc::parse(text, AUTOMATON_KEYS)?;
    doc.expect_type(&["nfa", "dfa"])?;
    reject_key(&doc, "quantifiers")?;
    Ok(nfa_from(skeleton(&doc)?))
}

/// Reads a `dfa` file; at most one transition per state and letter.
pub fn parse_dfa<L: TextLetter>(text: &str) -> Result<Dfa<L>, TextError> {
    let doc = Doc::parse(text, AUTOMATON_KEYS)?;
    doc.expect_type(&["dfa"])?;
    reject_key(&doc, "quantifiers")?;
    let sk: Skeleton<L> = skeleton(&doc)?;
    let mut d = Dfa::new(sk.alphabet, sk.frame);
    for s in &sk.states {
        d.add_state(s.clone());
    }
    match sk.initial.as_slice() {
        [q] => d.set_initial(*q),
        _ => {
            let line = doc.single("initial")?.map_or(0, |(l, _)| l);
            return Err(err(line, "a dfa needs exactly one initial state"));
        }
    }
    for q in sk.accepting {
        d.set_accepting(q);
    }
    for (line, p, l, q) in sk.trans {
        d.add_transition(p, l, q).map_err(|e| err(line, e.to_string()))?;
    }
    Ok(d)
}

pub fn parse_nfh(text: &str) -> Result<Nfh, TextError> {
    let doc = Doc::parse(text, AUTOMATON_KEYS)?;
    doc.expect_type(&["nfh"])?;
    let sk: Skeleton<TrackLetter> = skeleton(&doc)?;
    let prefix = doc.quantifiers(&sk.frame)?;
    let line = doc.required("quantifiers")?.0;
    Nfh::new(prefix, nfa_from(sk)).map_err(|e| err(line, e.to_string()))
}

fn reject_key(doc: &Doc, key: &'static str) -> Result<(), TextError> {
    match doc.single(key)? {
        Some((line, _)) => Err(err(line, format!("`{key}:` is not allowed in this file"))),
        None => Ok(()),
    }
}

/// State or variable names that survive a round trip; otherwise
/// positional names with the given prefix.
fn printable_names(names: &[String], prefix: &str, reserved: impl Fn(&str) -> bool) -> Vec<String> {
    let distinct: BTreeSet<&String> = names.iter().collect();
    let ok = distinct.len() == names.len()
        && names.iter().all(|n| {
            !n.is_empty()
                && !n.contains(char::is_whitespace)
                && !n.starts_with('[')
                && !n.contains("#!")
                && !n.contains(':')
                && n != "eps"
                && n != "->"
                && !reserved(n)
        });
    if ok {
        names.to_vec()
    } else {
        (0..names.len()).map(|i| format!("{prefix}{i}")).collect()
    }
}

fn header<L: TextLetter>(out: &mut String, kind: &str, alphabet: &Alphabet, frame: &L::Frame) {
    out.push_str(&format!("type: {kind}\n"));
    let syms: Vec<&str> = alphabet.symbols().iter().map(Sym::as_str).collect();
    out.push_str(&format!("alphabet: {}\n", syms.join(" ")));
    if let Some(vars) = L::frame_vars(frame) {
        out.push_str(&format!("vars: {}\n", vars.names().join(" ")));
    }
}

fn automaton_body(
    out: &mut String,
    raw_names: &[String],
    initial: &[usize],
    accepting: &[usize],
    trans: impl Iterator<Item = (usize, String, usize)>,
) {
    let names = printable_names(raw_names, "q", |_| false);
    let join = |qs: &[usize]| qs.iter().map(|&q| names[q].as_str()).collect::<Vec<_>>().join(" ");
    let all: Vec<usize> = (0..names.len()).collect();
    out.push_str(&format!("states: {}\n", join(&all)));
    out.push_str(&format!("initial: {}\n", join(initial)));
    out.push_str(&format!("accepting: {}\n", join(accepting)));
    for (p, l, q) in trans {
        out.push_str(&format!("trans: {} {} {}\n", names[p], l, names[q]));
    }
}

pub fn write_nfa<L: TextLetter>(a: &Nfa<L>) -> String {
    let mut out = String::new();
    header::<L>(&mut out, "nfa", a.alphabet(), a.frame());
    write_nfa_body(&mut out, a);
    out
}

fn write_nfa_body<L: TextLetter>(out: &mut String, a: &Nfa<L>) {
    let names: Vec<String> = (0..a.num_states()).map(|q| a.state_name(q).to_string()).collect();
    let initial: Vec<usize> = a.initial().iter().copied().collect();
    let accepting: Vec<usize> = a.accepting().iter().copied().collect();
    let frame = a.frame();
    automaton_body(
        out,
        &names,
        &initial,
        &accepting,
        a.transitions().map(|(p, l, q)| (p, l.render(frame), q)),
    );
}

pub fn write_dfa<L: TextLetter>(d: &Dfa<L>) -> String {
    let mut out = String::new();
    header::<L>(&mut out, "dfa", d.alphabet(), d.frame());
    let names: Vec<String> = (0..d.num_states()).map(|q| d.state_name(q).to_string()).collect();
    let accepting: Vec<usize> = d.accepting().iter().copied().collect();
    let frame = d.frame();
    automaton_body(
        &mut out,
        &names,
        &[d.initial()],
        &accepting,
        d.transitions().map(|(p, l, q)| (p, l.render(frame), q)),
    );
    out
}

pub fn write_nfh(h: &Nfh) -> String {
    let mut out = String::new();
    header::<TrackLetter>(&mut out, "nfh", h.alphabet(), h.vars());
    out.push_str(&format!("quantifiers: {}\n", h.prefix().render(h.vars())));
    write_nfa_body(&mut out, h.underlying());
    out
}

fn grammar_from<L: TextLetter>(doc: &Doc) -> Result<Cfg<L>, TextError> {
    let alphabet = doc.alphabet()?;
    let vars_line = doc.single("vars")?.map_or(0, |(l, _)| l);
    let frame = L::frame_from(doc.vars()?, vars_line)?;
    let (_, start) = doc.required("start")?;
    let mut rules = Vec::new();
    for (line, v) in doc.all("rule") {
        let (lhs, rhs) = v
            .split_once("->")
            .ok_or_else(|| err(line, "expected `rule: V -> symbols`"))?;
        let lhs = lhs.trim();
        if lhs.is_empty() || lhs.contains(char::is_whitespace) || lhs.starts_with('[') {
            return Err(err(line, format!("bad left-hand side `{lhs}`")));
        }
        rules.push((line, lhs.to_string(), rhs.trim().to_string()));
    }
    let lhs_names: BTreeSet<&str> = rules.iter().map(|(_, l, _)| l.as_str()).chain([start]).collect();
    let track = L::frame_vars(&frame).is_some();
    let mut g = Cfg::new(alphabet.clone(), frame.clone(), start);
    for (line, lhs, rhs) in &rules {
        let l = g.var_or_add(lhs);
        let mut syms = Vec::new();
        if rhs != "eps" {
            for tok in split_symbols(rhs).map_err(|m| err(*line, m))? {
                let is_var = if track { !tok.starts_with('[') } else { lhs_names.contains(tok.as_str()) };
                if is_var {
                    syms.push(GSym::V(g.var_or_add(&tok)));
                } else {
                    syms.push(GSym::T(L::parse(&tok, &alphabet, &frame, *line)?));
                }
            }
        }
        g.add_rule(l, syms).map_err(|e| err(*line, e.to_string()))?;
    }
    Ok(g)
}

/// Whitespace-separated symbols, keeping `[ ... ]` groups together.
fn split_symbols(s: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0usize;
    for c in s.chars() {
        match c {
            '[' => {
                depth += 1;
                cur.push(c);
            }
            ']' => {
                depth = depth.checked_sub(1).ok_or("unbalanced `]`")?;
                cur.push(c);
            }
            c if c.is_whitespace() && depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c if c.is_whitespace() => {}
            c => cur.push(c),
        }
    }
    if depth != 0 {
        return Err("unbalanced `[`".into());
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

pub fn parse_grammar<L: TextLetter>(text: &str) -> Result<Cfg<L>, TextError> {
    let doc = Doc::parse(text, GRAMMAR_KEYS)?;
    doc.expect_type(&["cfg"])?;
    reject_key(&doc, "quantifiers")?;
    grammar_from(&doc)
}

pub fn parse_cfhg(text: &str) -> Result<Cfhg, TextError> {
    let doc = Doc::parse(text, GRAMMAR_KEYS)?;
    doc.expect_type(&["cfhg"])?;
    let g: Cfg<TrackLetter> = grammar_from(&doc)?;
    let prefix = doc.quantifiers(g.frame())?;
    let line = doc.required("quantifiers")?.0;
    Cfhg::new(prefix, g).map_err(|e| err(line, e.to_string()))
}

fn grammar_body<L: TextLetter>(out: &mut String, g: &Cfg<L>) {
    let alphabet = g.alphabet();
    let names = printable_names(g.var_names(), "V", |n| {
        L::frame_vars(g.frame()).is_none() && (n == "#" || alphabet.contains(&Sym::new(n)))
    });
    out.push_str(&format!("start: {}\n", names[g.start()]));
    for r in g.rules() {
        let rhs = if r.rhs.is_empty() {
            "eps".to_string()
        } else {
            r.rhs
                .iter()
                .map(|s| match s {
                    GSym::V(v) => names[*v].clone(),
                    GSym::T(l) => l.render(g.frame()),
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!("rule: {} -> {}\n", names[r.lhs], rhs));
    }
}

pub fn write_grammar<L: TextLetter>(g: &Cfg<L>) -> String {
    let mut out = String::new();
    header::<L>(&mut out, "cfg", g.alphabet(), g.frame());
    grammar_body(&mut out, g);
    out
}

pub fn write_cfhg(h: &Cfhg) -> String {
    let mut out = String::new();
    let g = h.grammar();
    header::<TrackLetter>(&mut out, "cfhg", g.alphabet(), g.frame());
    out.push_str(&format!("quantifiers: {}\n", h.prefix().render(g.frame())));
    grammar_body(&mut out, g);
    out
}

/// One word per line; `eps` is the empty word, `#!` starts a comment.
pub fn parse_language(text: &str) -> Vec<Word> {
    text.lines()
        .map(|l| l.find("#!").map_or(l, |p| &l[..p]).trim())
        .filter(|l| !l.is_empty())
        .map(word)
        .collect()
}

pub fn write_language(words: &[Word]) -> String {
    words.iter().map(|w| format!("{}\n", show_word(w))).collect()
}

/// One tile per line: `top | bottom`.
pub fn parse_pcp(text: &str) -> Result<PcpInstance, TextError> {
    let mut tiles = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.find("#!").map_or(raw, |p| &raw[..p]).trim();
        if l.is_empty() {
            continue;
        }
        let (a, b) = l.split_once('|').ok_or_else(|| err(i + 1, "expected `top | bottom`"))?;
        tiles.push((word(a), word(b)));
    }
    PcpInstance::new(tiles).map_err(|e| err(0, e.to_string()))
}

pub fn write_pcp(p: &PcpInstance) -> String {
    p.tiles()
        .iter()
        .map(|(a, b)| format!("{} | {}\n", show_word(a), show_word(b)))
        .collect()
}
