//! The worked examples as parsed values. The texts live in `fixtures/`.

use crate::cfhg::pcp::PcpInstance;
use crate::cfhg::Cfhg;
use crate::model::{Sym, Word};
use crate::nfa::{Dfa, Nfa, TrackNfa};
use crate::nfh::Nfh;
use crate::text::{parse_cfhg, parse_dfa, parse_language, parse_nfa, parse_nfh, parse_pcp};

pub const INFINITE_A_NFH: &str = include_str!("../fixtures/infinite_a.nfh");
pub const SUCCESSOR_F_NFA: &str = include_str!("../fixtures/successor_f.nfa");
pub const PCP_TILES_CFHG: &str = include_str!("../fixtures/pcp_tiles.cfhg");
pub const ROBOT_G1_CFHG: &str = include_str!("../fixtures/robot_g1.cfhg");
pub const ROBOT_G2_CFHG: &str = include_str!("../fixtures/robot_g2.cfhg");
pub const RANKED_GR_CFHG: &str = include_str!("../fixtures/ranked_gr.cfhg");
pub const ROBOT_DIAGONAL_CFHG: &str = include_str!("../fixtures/robot_diagonal.cfhg");
pub const MIXED_LETTERS_CFHG: &str = include_str!("../fixtures/mixed_letters.cfhg");
pub const EXISTS_AB_CFHG: &str = include_str!("../fixtures/exists_ab.cfhg");
pub const PCP_SOLVABLE: &str = include_str!("../fixtures/pcp_solvable.pcp");
pub const PCP_UNSOLVABLE: &str = include_str!("../fixtures/pcp_unsolvable.pcp");
pub const PREFIX_CLOSED_DFA: &str = include_str!("../fixtures/prefix_closed.dfa");
pub const A_PLUS_DFA: &str = include_str!("../fixtures/a_plus.dfa");
pub const A_OR_B_NFA: &str = include_str!("../fixtures/a_or_b.nfa");
pub const ONLY_C_NFA: &str = include_str!("../fixtures/only_c.nfa");
pub const FINITE_A_LANG: &str = include_str!("../fixtures/finite_a.lang");

fn cfhg(text: &str) -> Cfhg {
    parse_cfhg(text).expect("fixture parses")
}

pub fn infinite_a() -> Nfh {
    parse_nfh(INFINITE_A_NFH).expect("fixture parses")
}

/// Two-track graph of the successor function; the chain starts at `ε`.
pub fn successor_f() -> TrackNfa {
    parse_nfa(SUCCESSOR_F_NFA).expect("fixture parses")
}

pub fn pcp_tiles() -> Cfhg {
    cfhg(PCP_TILES_CFHG)
}

pub fn robot_g1() -> Cfhg {
    cfhg(ROBOT_G1_CFHG)
}

pub fn robot_g2() -> Cfhg {
    cfhg(ROBOT_G2_CFHG)
}

pub fn ranked_gr() -> Cfhg {
    cfhg(RANKED_GR_CFHG)
}

pub fn robot_diagonal() -> Cfhg {
    cfhg(ROBOT_DIAGONAL_CFHG)
}

pub fn mixed_letters() -> Cfhg {
    cfhg(MIXED_LETTERS_CFHG)
}

pub fn exists_ab() -> Cfhg {
    cfhg(EXISTS_AB_CFHG)
}

pub fn pcp_solvable() -> PcpInstance {
    parse_pcp(PCP_SOLVABLE).expect("fixture parses")
}

pub fn pcp_unsolvable() -> PcpInstance {
    parse_pcp(PCP_UNSOLVABLE).expect("fixture parses")
}

pub fn prefix_closed() -> Dfa<Sym> {
    parse_dfa(PREFIX_CLOSED_DFA).expect("fixture parses")
}

pub fn a_plus() -> Dfa<Sym> {
    parse_dfa(A_PLUS_DFA).expect("fixture parses")
}

pub fn a_or_b() -> Nfa<Sym> {
    parse_nfa(A_OR_B_NFA).expect("fixture parses")
}

pub fn only_c() -> Nfa<Sym> {
    parse_nfa(ONLY_C_NFA).expect("fixture parses")
}

pub fn finite_a() -> Vec<Word> {
    parse_language(FINITE_A_LANG)
}

/// Every hypergrammar fixture with a short label, including both PCP
/// encodings of the solvable instance.
pub fn all_cfhgs() -> Vec<(&'static str, Cfhg)> {
    vec![
        ("pcp_tiles", pcp_tiles()),
        ("robot_g1", robot_g1()),
        ("robot_g2", robot_g2()),
        ("ranked_gr", ranked_gr()),
        ("robot_diagonal", robot_diagonal()),
        ("mixed_letters", mixed_letters()),
        ("exists_ab", exists_ab()),
        ("pcp_forall", pcp_solvable().encode_forall()),
        ("pcp_exists_forall", pcp_solvable().encode_exists_forall()),
    ]
}
