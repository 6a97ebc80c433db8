use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use hyperlang::cfhg::rank::{self, render_rank};
use hyperlang::cfhg::{ExitJoin, LeafPath, RankOptions, TraversalOrder};
use hyperlang::model::{show_word, Alphabet, Word};
use hyperlang::nfh::Nfh;
use hyperlang::realize::{self, Caps, OrderedLanguageSpec};
use hyperlang::text::{self, TextError};
use hyperlang::Cfhg;
use serde_json::{json, Map, Value};

use crate::error::{code, CliError};
use crate::{
    CapArgs, CfhgCommand, Command, Join, Leaf, NfhCommand, Order, OutArg, PcpCommand, RankArgs, RealizeCommand, Route,
};

/// A finished command: exit status, plain text and the JSON fields.
pub struct Report {
    pub code: u8,
    pub text: String,
    fields: Map<String, Value>,
}

impl Report {
    fn new(code: u8, text: String) -> Self {
        Report { code, text, fields: Map::new() }
    }

    fn verdict(holds: bool) -> Self {
        let mut r = Report::new(
            if holds { code::TRUE } else { code::FALSE },
            format!("{}\n", if holds { "TRUE" } else { "FALSE" }),
        );
        r.set("verdict", json!(holds));
        r
    }

    fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.to_string(), value);
    }

    pub fn json_line(&self, command: &str) -> String {
        let mut obj = Map::new();
        obj.insert("schema".into(), json!(1));
        obj.insert("command".into(), json!(command));
        obj.extend(self.fields.clone());
        format!("{}\n", Value::Object(obj))
    }
}

pub fn error_json(command: &str, e: &CliError) -> String {
    let mut obj = json!({ "schema": 1, "command": command, "error": { "kind": e.kind(), "message": e.to_string() } });
    if let CliError::Undecidable(reason) = e {
        obj["verdict"] = json!("undecidable");
        obj["reason"] = json!(reason);
    }
    format!("{obj}\n")
}

pub fn run(command: Command) -> (&'static str, Result<Report, CliError>) {
    match command {
        Command::Nfh(NfhCommand::Member { nfh, lang }) => ("nfh member", nfh_member(&nfh, &lang)),
        Command::Nfh(NfhCommand::Probe { nfh, max_len }) => ("nfh probe", nfh_probe(&nfh, max_len)),
        Command::Realize(RealizeCommand::Finite { lang, alphabet, out }) => {
            ("realize finite", realize_finite(&lang, alphabet.as_deref(), &out))
        }
        Command::Realize(RealizeCommand::Ordered { successor, first, check_len, out }) => {
            ("realize ordered", realize_ordered(&successor, &first, check_len, &out))
        }
        Command::Realize(RealizeCommand::PrefixClosed { dfa, route, caps, out }) => {
            ("realize prefix-closed", realize_prefix_closed(&dfa, route, &caps, &out))
        }
        Command::Realize(RealizeCommand::Regular { dfa, caps, out }) => {
            ("realize regular", realize_regular(&dfa, &caps, &out))
        }
        Command::Cfhg(CfhgCommand::Empty { cfhg }) => ("cfhg empty", cfhg_empty(&cfhg)),
        Command::Cfhg(CfhgCommand::MemberFinite { cfhg, lang, leaf }) => {
            ("cfhg member-finite", cfhg_member_finite(&cfhg, &lang, leaf))
        }
        Command::Cfhg(CfhgCommand::MemberRegular { cfhg, nfa }) => ("cfhg member-regular", cfhg_member_regular(&cfhg, &nfa)),
        Command::Cfhg(CfhgCommand::Ranks { cfhg, rank }) => ("cfhg ranks", cfhg_ranks(&cfhg, &rank)),
        Command::Cfhg(CfhgCommand::IsRanked { cfhg, rank }) => ("cfhg is-ranked", cfhg_is_ranked(&cfhg, &rank)),
        Command::Pcp(PcpCommand::EncodeForall { pcp, out }) => ("pcp encode-forall", pcp_encode(&pcp, false, &out)),
        Command::Pcp(PcpCommand::EncodeEa { pcp, out }) => ("pcp encode-ea", pcp_encode(&pcp, true, &out)),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn load<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T, TextError>) -> Result<T, CliError> {
    parse(&read(path)?).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

fn show_language(lang: &[Word]) -> String {
    format!("{{{}}}", lang.iter().map(|w| show_word(w)).collect::<Vec<_>>().join(", "))
}

fn language_json(lang: &[Word]) -> Value {
    json!(lang.iter().map(|w| show_word(w)).collect::<Vec<_>>())
}

/// Writes `content` to the requested file, or returns it as the report.
fn emit(content: String, out: &OutArg, summary: String) -> Result<Report, CliError> {
    let mut r = match &out.output {
        Some(path) => {
            fs::write(path, &content).map_err(|source| CliError::Write { path: path.clone(), source })?;
            let mut r = Report::new(code::TRUE, format!("wrote {} ({summary})\n", path.display()));
            r.set("output", json!(path.display().to_string()));
            r
        }
        None => {
            let mut r = Report::new(code::TRUE, content.clone());
            r.set("content", json!(content));
            r
        }
    };
    r.set("summary", json!(summary));
    Ok(r)
}

fn nfh_summary(n: &Nfh) -> String {
    format!(
        "prefix {}, {} states, {} transitions",
        n.prefix().shape(),
        n.underlying().num_states(),
        n.underlying().num_transitions()
    )
}

fn caps(c: &CapArgs) -> Caps {
    Caps { determinize_states: c.max_determinize, minimal_words: c.max_minimal_words, cycles: c.max_cycles }
}

fn nfh_member(nfh: &Path, lang: &Path) -> Result<Report, CliError> {
    let n = load(nfh, text::parse_nfh)?;
    let words = text::parse_language(&read(lang)?);
    Ok(Report::verdict(n.accepts(&words)?))
}

fn nfh_probe(nfh: &Path, max_len: usize) -> Result<Report, CliError> {
    let n = load(nfh, text::parse_nfh)?;
    let found = n.probe(max_len)?;
    let text: String = found.iter().map(|l| format!("{}\n", show_language(l))).collect();
    let mut r = Report::new(code::TRUE, text);
    r.set("languages", json!(found.iter().map(|l| language_json(l)).collect::<Vec<_>>()));
    Ok(r)
}

fn realize_finite(lang: &Path, alphabet: Option<&str>, out: &OutArg) -> Result<Report, CliError> {
    let words = text::parse_language(&read(lang)?);
    let symbols: Vec<String> = match alphabet {
        Some(s) => s.split_whitespace().map(str::to_string).collect(),
        None => words.iter().flatten().map(|s| s.as_str().to_string()).collect::<BTreeSet<_>>().into_iter().collect(),
    };
    if symbols.is_empty() {
        return Err(CliError::Usage("no symbol occurs in the language; pass --alphabet".into()));
    }
    let alphabet = Alphabet::new(symbols).map_err(|e| CliError::Usage(e.to_string()))?;
    let n = realize::realize_finite(&alphabet, &words)?;
    emit(text::write_nfh(&n), out, nfh_summary(&n))
}

fn realize_ordered(successor: &Path, first: &str, check_len: usize, out: &OutArg) -> Result<Report, CliError> {
    let f = load(successor, text::parse_nfa)?;
    let spec = OrderedLanguageSpec { first_word: hyperlang::model::word(first), successor: f };
    spec.check_functional(check_len)?;
    let n = realize::realize_ordered(&spec)?;
    emit(text::write_nfh(&n), out, nfh_summary(&n))
}

fn realize_prefix_closed(dfa: &Path, route: Route, c: &CapArgs, out: &OutArg) -> Result<Report, CliError> {
    let d = load(dfa, text::parse_dfa)?;
    let n = match route {
        Route::Fast => realize::realize_prefix_closed_fast(&d)?,
        Route::Relation => realize::realize_partially_ordered(&realize::prefix_closed_relation(&d)?, &caps(c))?,
    };
    emit(text::write_nfh(&n), out, nfh_summary(&n))
}

fn realize_regular(dfa: &Path, c: &CapArgs, out: &OutArg) -> Result<Report, CliError> {
    let d = load(dfa, text::parse_dfa)?;
    let n = realize::realize_regular(&d, &caps(c))?;
    emit(text::write_nfh(&n), out, nfh_summary(&n))
}

/// A language witnessing non-emptiness, when one is cheap to name.
fn emptiness_witness(h: &Cfhg) -> Option<Vec<Word>> {
    if h.prefix().all_exists() || h.prefix().len() == 1 {
        let w = h.grammar().shortest_word()?;
        let tracks: BTreeSet<Word> = (0..h.vars().len())
            .map(|i| w.iter().map(|l| l.get(i).clone()).filter(|s| !s.is_pad()).collect())
            .collect();
        return Some(tracks.into_iter().collect());
    }
    h.sync_forall_empty().ok()?.witness.map(|w| vec![w])
}

fn cfhg_empty(path: &Path) -> Result<Report, CliError> {
    let h = load(path, text::parse_cfhg)?;
    let empty = h.is_empty()?;
    let mut r = Report::verdict(empty);
    if !empty {
        if let Some(lang) = emptiness_witness(&h) {
            r.text.push_str(&format!("witness: {}\n", show_language(&lang)));
            r.set("witness", language_json(&lang));
        }
    }
    Ok(r)
}

fn cfhg_member_finite(path: &Path, lang: &Path, leaf: Leaf) -> Result<Report, CliError> {
    let h = load(path, text::parse_cfhg)?;
    let words = text::parse_language(&read(lang)?);
    let leaf = match leaf {
        Leaf::Auto => LeafPath::Auto,
        Leaf::Fast => LeafPath::Fast,
        Leaf::Slow => LeafPath::Slow,
    };
    Ok(Report::verdict(h.finite_member(&words, leaf)?))
}

fn cfhg_member_regular(path: &Path, nfa: &Path) -> Result<Report, CliError> {
    let h = load(path, text::parse_cfhg)?;
    let a = load(nfa, text::parse_nfa)?;
    Ok(Report::verdict(h.member_regular(&a)?))
}

fn rank_options(a: &RankArgs) -> RankOptions {
    RankOptions {
        join: match a.join {
            Join::Intersection => ExitJoin::Intersection,
            Join::Union => ExitJoin::Union,
        },
        order: match a.order {
            Order::Tarjan => TraversalOrder::Tarjan,
            Order::Kahn => TraversalOrder::Kahn,
        },
    }
}

struct RankReport {
    table: String,
    rows: Vec<Value>,
    violations: Vec<String>,
    violations_json: Vec<Value>,
}

fn rank_report(h: &Cfhg, args: &RankArgs) -> RankReport {
    let g = h.grammar();
    let vars = h.vars();
    let graph = h.rule_graph();
    let table = h.ranks_with(rank_options(args));
    let mut cells = vec![["vertex".to_string(), "L".to_string(), "R".to_string()]];
    let mut rows = Vec::new();
    for u in 0..graph.vertices.len() {
        let name = graph.render_vertex(g, u);
        let (l, r) = (render_rank(vars, &table.left[u]), render_rank(vars, &table.right[u]));
        rows.push(json!({ "vertex": name, "L": l, "R": r }));
        cells.push([name, l, r]);
    }
    let widths: Vec<usize> = (0..3).map(|c| cells.iter().map(|row| row[c].chars().count()).max().unwrap_or(0)).collect();
    let mut text = String::new();
    for row in &cells {
        let padded: Vec<String> =
            row.iter().zip(&widths).map(|(s, &w)| format!("{s}{}", " ".repeat(w - s.chars().count()))).collect();
        text.push_str(padded.join(" | ").trim_end());
        text.push('\n');
    }
    let mut violations = Vec::new();
    let mut violations_json = Vec::new();
    for v in rank::violations(g, &table) {
        let rule = g.render_rule(&g.rules()[v.rule]);
        let (right, left) = (render_rank(vars, &v.right), render_rank(vars, &v.left));
        violations.push(format!("violation: {rule} @ position {} (R = {right} not in L = {left})\n", v.position));
        violations_json.push(json!({ "rule": rule, "position": v.position, "R": right, "L": left }));
    }
    RankReport { table: text, rows, violations, violations_json }
}

fn cfhg_ranks(path: &Path, args: &RankArgs) -> Result<Report, CliError> {
    let h = load(path, text::parse_cfhg)?;
    let rep = rank_report(&h, args);
    let mut r = Report::new(code::TRUE, rep.table + &rep.violations.concat());
    r.set("vertices", json!(rep.rows));
    r.set("violations", json!(rep.violations_json));
    Ok(r)
}

fn cfhg_is_ranked(path: &Path, args: &RankArgs) -> Result<Report, CliError> {
    let h = load(path, text::parse_cfhg)?;
    let rep = rank_report(&h, args);
    let mut r = Report::verdict(rep.violations.is_empty());
    r.text.push_str(&rep.violations.concat());
    r.set("violations", json!(rep.violations_json));
    Ok(r)
}

fn pcp_encode(path: &Path, exists_forall: bool, out: &OutArg) -> Result<Report, CliError> {
    let p = load(path, text::parse_pcp)?;
    let h = if exists_forall { p.encode_exists_forall() } else { p.encode_forall() };
    let summary = format!(
        "prefix {}, {} variables, {} rules",
        h.prefix().shape(),
        h.grammar().num_vars(),
        h.grammar().rules().len()
    );
    emit(text::write_cfhg(&h), out, summary)
}
