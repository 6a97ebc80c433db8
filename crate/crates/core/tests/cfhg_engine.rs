mod common;

use std::collections::BTreeSet;

use common::*;
use hyperlang::cfg::{GSym, TrackCfg};
use hyperlang::cfhg::rank::{pad_tracks, Rank};
use hyperlang::cfhg::{Bounded, Cfhg, CfhgError, ExitJoin, LeafPath, Problem, RankOptions, TraversalOrder};
use hyperlang::fixtures;
use hyperlang::model::{is_synchronous, sync_letters, word, Alphabet, Quantifier, QuantifierPrefix, TrackLetter, VarSet, Word};
use hyperlang::nfa::Nfa;
use rand::Rng;

fn rank(items: &[usize]) -> Rank {
    items.iter().copied().collect()
}

fn letters(spec: &[&str]) -> Vec<GSym<TrackLetter>> {
    spec.iter().map(|s| GSym::T(TrackLetter::from_chars(s))).collect()
}

fn var(g: &Cfhg, name: &str) -> usize {
    g.grammar().var_id(name).unwrap()
}

#[test]
fn pcp_tiles_rank_values() {
    let g = fixtures::pcp_tiles();
    let graph = g.rule_graph();
    let t = g.ranks();
    let tile1 = graph.vertex_of_rhs(&letters(&["ab", "#a", "#a"])).unwrap();
    let tile2 = graph.vertex_of_rhs(&letters(&["aa", "ba"])).unwrap();
    let tile3 = graph.vertex_of_rhs(&letters(&["bb", "ab", "a#"])).unwrap();
    assert_eq!(t.left[tile1], rank(&[]));
    assert_eq!(t.right[tile1], rank(&[0]));
    assert_eq!(t.left[tile3], rank(&[]));
    assert_eq!(t.right[tile3], rank(&[1]));
    assert_eq!(t.left[tile2], rank(&[]));
    assert_eq!(t.right[tile2], rank(&[]));
    assert_eq!(t.right_of_var(0), &rank(&[0, 1]));
    assert_eq!(t.left_of_var(0), &rank(&[]));
}

#[test]
fn pcp_tiles_rule_graph_shape() {
    let g = fixtures::pcp_tiles();
    let graph = g.rule_graph();
    assert_eq!(graph.vertices.len(), 7);
    // Looping right-hand sides end with V0.
    let back: Vec<_> = graph.right_edges.iter().filter(|(_, b)| *b == 0).collect();
    assert_eq!(back.len(), 3);
    assert!(graph.left_edges.iter().all(|(_, b)| *b != 0));
    for (u, v) in graph.vertices.iter().enumerate() {
        if let hyperlang::cfhg::Vertex::Rhs(rhs) = v {
            if rhs.iter().all(|s| s.terminal().is_some()) {
                assert_eq!(graph.out_degree(hyperlang::cfhg::Side::Left, u), 0);
                assert_eq!(graph.out_degree(hyperlang::cfhg::Side::Right, u), 0);
            }
        }
    }
}

#[test]
fn pcp_tiles_is_not_ranked_at_the_looping_tiles() {
    let g = fixtures::pcp_tiles();
    let v = g.violations();
    let rules: BTreeSet<String> = v.iter().map(|x| g.grammar().render_rule(&g.grammar().rules()[x.rule])).collect();
    assert!(rules.contains("V0 -> [x1=a,x2=b] [x1=#,x2=a] [x1=#,x2=a] V0"));
    assert!(rules.contains("V0 -> [x1=b,x2=b] [x1=a,x2=b] [x1=a,x2=#] V0"));
    let first = v.iter().find(|x| x.right == rank(&[0])).unwrap();
    assert_eq!(first.position, 3);
    assert_eq!(first.left, rank(&[]));
}

#[test]
fn ranked_gr_values_follow_its_derivations() {
    let g = fixtures::ranked_gr();
    let t = g.ranks();
    let (v0, v1, v2) = (var(&g, "V0"), var(&g, "V1"), var(&g, "V2"));
    assert_eq!(t.left_of_var(v2), &rank(&[0]));
    assert_eq!(t.right_of_var(v2), &rank(&[0]));
    assert_eq!(t.left_of_var(v1), &rank(&[]));
    assert_eq!(t.right_of_var(v1), &rank(&[]));
    // Every word of V0 is a^n b^n on x1 followed by padding: it starts
    // with a letter on x1 and ends with `#` there.
    let words = g.grammar().derive_bounded(6).unwrap();
    assert!(!words.is_empty());
    assert!(words.iter().all(|w| !w[0].get(0).is_pad() && w.last().unwrap().get(0).is_pad()));
    assert_eq!(t.left_of_var(v0), &rank(&[]));
    assert_eq!(t.right_of_var(v0), &rank(&[0]));
    assert!(g.is_ranked());
}

#[test]
fn pad_free_grammars_have_empty_ranks() {
    for g in [fixtures::robot_g1(), fixtures::robot_diagonal(), fixtures::mixed_letters()] {
        let t = g.ranks();
        assert!(t.left.iter().chain(t.right.iter()).all(BTreeSet::is_empty));
        assert!(g.is_ranked());
        assert!(g.sync_check_bounded(6).unwrap());
    }
}

#[test]
fn terminal_vertices_take_their_boundary_letters() {
    for (_, g) in fixtures::all_cfhgs().into_iter().chain(random_cfhgs(7, 20).into_iter().map(|g| ("random", g))) {
        let graph = g.rule_graph();
        let t = g.ranks();
        for (u, v) in graph.vertices.iter().enumerate() {
            if let hyperlang::cfhg::Vertex::Rhs(rhs) = v {
                if let Some(GSym::T(l)) = rhs.first() {
                    assert_eq!(t.left[u], pad_tracks(l));
                }
                if let Some(GSym::T(l)) = rhs.last() {
                    assert_eq!(t.right[u], pad_tracks(l));
                }
            }
        }
    }
}

#[test]
fn rank_tables_do_not_depend_on_traversal_order() {
    let grammars: Vec<Cfhg> = fixtures::all_cfhgs()
        .into_iter()
        .map(|(_, g)| g)
        .chain(random_cfhgs(11, 40))
        .collect();
    for g in grammars {
        for join in [ExitJoin::Intersection, ExitJoin::Union] {
            let a = g.ranks_with(RankOptions { join, order: TraversalOrder::Tarjan });
            let b = g.ranks_with(RankOptions { join, order: TraversalOrder::Kahn });
            assert_eq!(a, b);
        }
    }
}

#[test]
fn both_joins_agree_on_the_worked_examples() {
    for g in [fixtures::pcp_tiles(), fixtures::ranked_gr()] {
        let literal = g.ranks_with(RankOptions { join: ExitJoin::Union, ..Default::default() });
        assert_eq!(literal, g.ranks());
    }
}

/// Sentential forms reachable in at most `d` steps (capped per layer).
fn sentential_forms(g: &TrackCfg, d: usize) -> Vec<Vec<GSym<TrackLetter>>> {
    let mut layer = vec![vec![GSym::V(g.start())]];
    let mut all = layer.clone();
    for _ in 0..d {
        let mut next = Vec::new();
        for f in &layer {
            // Rewrite every variable occurrence, not only the leftmost.
            for (pos, s) in f.iter().enumerate() {
                let Some(v) = s.var() else { continue };
                for r in g.rules_of(v) {
                    let mut n = f[..pos].to_vec();
                    n.extend(r.rhs.iter().cloned());
                    n.extend(f[pos + 1..].iter().cloned());
                    next.push(n);
                }
            }
        }
        next.sort();
        next.dedup();
        next.truncate(4000);
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

#[test]
fn ranked_grammars_keep_every_sentential_form_ranked() {
    let mut grammars: Vec<Cfhg> = fixtures::all_cfhgs().into_iter().map(|(_, g)| g).filter(Cfhg::is_ranked).collect();
    grammars.extend(random_ranked(100, 20));
    for g in grammars {
        let t = g.ranks();
        for f in sentential_forms(g.grammar(), 6) {
            assert!(t.violations_in(&f).is_empty(), "{}", g.grammar().render_rhs(&f));
        }
    }
}

#[test]
fn right_ranks_are_witnessed_by_derivations() {
    let mut grammars: Vec<Cfhg> = fixtures::all_cfhgs().into_iter().map(|(_, g)| g).collect();
    grammars.extend(random_ranked(300, 10));
    for g in grammars {
        let t = g.ranks();
        for v in 0..g.grammar().num_vars() {
            let mut from_v = g.grammar().clone();
            from_v.set_start(v);
            let words = from_v.derive_bounded(6).unwrap();
            for &j in t.right_of_var(v) {
                assert!(
                    words.iter().any(|w| w.last().is_some_and(|l| l.get(j).is_pad())),
                    "no word of {} ends with # on track {j}",
                    g.grammar().var_name(v)
                );
            }
        }
    }
}

#[test]
fn ranked_grammars_derive_only_synchronous_words() {
    let mut grammars: Vec<Cfhg> = vec![fixtures::ranked_gr()];
    grammars.extend(random_ranked(500, 20));
    grammars.extend(fixtures::all_cfhgs().into_iter().map(|(_, g)| g).filter(Cfhg::is_ranked));
    for g in &grammars {
        assert!(g.sync_check_bounded(6).unwrap());
        // Independent enumeration agrees.
        assert!(cfg_language(g.grammar(), 6).iter().all(|w| is_synchronous(w)));
    }
}

#[test]
fn unranked_fixtures_expose_asynchronous_words() {
    let bound = 8;
    for (name, g) in fixtures::all_cfhgs() {
        if g.is_ranked() {
            continue;
        }
        let found = !g.sync_check_bounded(bound).unwrap();
        println!("{name}: asynchronous word within {bound}: {found}");
        assert!(found, "{name}");
    }
    let random: Vec<Cfhg> = random_cfhgs(900, 60).into_iter().filter(|g| !g.is_ranked()).collect();
    let exposed = random.iter().filter(|g| !g.sync_check_bounded(bound).unwrap()).count();
    println!("random unranked grammars exposed within {bound}: {exposed}/{}", random.len());
}

#[test]
fn intersection_join_rejects_a_grammar_the_union_join_accepts() {
    let vars = VarSet::new(["x1", "x2"]).unwrap();
    let mut g = TrackCfg::new(ab(), vars.clone(), "S");
    let v2 = g.add_var("V2").unwrap();
    let mut rhs = letters(&["#b"]);
    rhs.push(GSym::V(v2));
    g.add_rule(0, rhs).unwrap();
    g.add_rule(v2, letters(&["#b"])).unwrap();
    g.add_rule(v2, letters(&["ab"])).unwrap();
    let h = Cfhg::new(QuantifierPrefix::from_quantifiers(&vars, vec![Quantifier::Forall; 2]).unwrap(), g).unwrap();
    assert!(!h.sync_check_bounded(2).unwrap());
    assert!(!h.is_ranked());
    let literal = h.ranks_with(RankOptions { join: ExitJoin::Union, ..Default::default() });
    assert!(hyperlang::cfhg::rank::violations(h.grammar(), &literal).is_empty());
}

/// Membership by enumerating derived tuples; exact for grammars without
/// all-`#` letters because every letter then consumes a symbol.
fn oracle_member(g: &Cfhg, lang: &[Word]) -> bool {
    let k = g.vars().len();
    let longest = lang.iter().map(Vec::len).max().unwrap_or(0);
    let tuples = derived_tuples(g.grammar(), k * longest.max(1));
    let mut words = lang.to_vec();
    words.sort();
    words.dedup();
    eval_naive(g.prefix().quantifiers(), &words, &mut |a| tuples.contains(a))
}

#[test]
fn finite_membership_matches_enumeration() {
    let mut r = rng(42);
    let mut cases: Vec<Cfhg> = fixtures::all_cfhgs()
        .into_iter()
        .filter(|(n, _)| *n != "pcp_exists_forall")
        .map(|(_, g)| g)
        .collect();
    cases.extend(random_cfhgs(1234, 12));
    for g in &cases {
        let universe = g.grammar().alphabet().words_up_to(3);
        for _ in 0..25 {
            let size = r.gen_range(1..=3);
            let lang: Vec<Word> = (0..size).map(|_| universe[r.gen_range(0..universe.len())].clone()).collect();
            let expect = oracle_member(g, &lang);
            assert_eq!(g.finite_member(&lang, LeafPath::Slow).unwrap(), expect, "{lang:?}");
            assert_eq!(g.finite_member(&lang, LeafPath::Auto).unwrap(), expect, "{lang:?}");
        }
    }
}

#[test]
fn fast_and_slow_leaves_agree_on_ranked_grammars() {
    let mut r = rng(77);
    let mut ranked: Vec<Cfhg> = fixtures::all_cfhgs().into_iter().map(|(_, g)| g).filter(Cfhg::is_ranked).collect();
    ranked.extend(random_ranked(2000, 8));
    for g in &ranked {
        let small = g.grammar().alphabet().words_up_to(2);
        let long = g.grammar().alphabet().words_up_to(6);
        let mut langs: Vec<Vec<Word>> = small.iter().map(|w| vec![w.clone()]).collect();
        for _ in 0..20 {
            let size = r.gen_range(1..=3);
            langs.push((0..size).map(|_| long[r.gen_range(0..long.len().min(400))].clone()).collect());
        }
        for lang in langs {
            let fast = g.finite_member(&lang, LeafPath::Fast).unwrap();
            let slow = g.finite_member(&lang, LeafPath::Slow).unwrap();
            assert_eq!(fast, slow, "{lang:?}");
        }
    }
}

#[test]
fn robot_membership() {
    let g = fixtures::robot_g1();
    assert!(g.finite_member(&[word("ccca")], LeafPath::Auto).unwrap());
    assert!(g.finite_member(&[word("cc"), word("ccccaa"), word("ccc")], LeafPath::Auto).unwrap());
    assert!(!g.finite_member(&[word("cca")], LeafPath::Auto).unwrap());
    assert!(!g.finite_member(&[word("ca")], LeafPath::Auto).unwrap());
    assert!(!g.finite_member(&[word("ccca"), word("a")], LeafPath::Auto).unwrap());
    assert_eq!(g.finite_member(&[], LeafPath::Auto), Err(CfhgError::EmptyLanguage));
}

#[test]
fn robot_probe_matches_its_closed_form() {
    // Single ∀: a language is accepted iff every word is c^j a^m, j ≥ m + 2.
    let g = fixtures::robot_g1();
    let good = |w: &Word| {
        let j = w.iter().take_while(|s| s.as_str() == "c").count();
        let m = w.len() - j;
        w[j..].iter().all(|s| s.as_str() == "a") && j >= m + 2
    };
    let universe = g.grammar().alphabet().words_up_to(3);
    let expect: Vec<Vec<Word>> = subsets(&universe).into_iter().filter(|l| l.iter().all(good)).collect();
    assert_eq!(g.probe(3, LeafPath::Auto).unwrap(), expect);
}

#[test]
fn forall_encoding_accepts_the_solution_word() {
    let p = fixtures::pcp_solvable();
    let g = p.encode_forall();
    assert!(!g.is_ranked());
    assert!(g.finite_member(&[word("bbaabbbaa")], LeafPath::Auto).unwrap());
    assert!(!g.finite_member(&[word("ab")], LeafPath::Auto).unwrap());
    let x1 = word("bbaabbbaa##");
    let x2 = word("bb#aabb#baa");
    assert!(g.grammar().member(&sync_letters(&[&x1, &x2])));
}

#[test]
fn forall_encoding_mirrors_solvability() {
    let mut r = rng(5);
    let mut solved = 0;
    for _ in 0..40 {
        let n = r.gen_range(1..=3);
        let tiles: Vec<(String, String)> = (0..n)
            .map(|_| {
                let mut piece = || (0..r.gen_range(1..=3)).map(|_| if r.gen_bool(0.5) { 'a' } else { 'b' }).collect();
                (piece(), piece())
            })
            .collect();
        let refs: Vec<(&str, &str)> = tiles.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let p = hyperlang::cfhg::pcp::PcpInstance::from_strs(&refs).unwrap();
        assert!(p.encode_exists_forall().is_ranked());
        if let Some(seq) = p.solve_bounded(4) {
            solved += 1;
            let (top, bottom) = p.concat(&seq);
            assert_eq!(top, bottom);
            assert!(p.encode_forall().finite_member(&[top], LeafPath::Auto).unwrap());
            let ea = p.encode_exists_forall();
            assert!(ea.finite_member(&p.exists_forall_witness(&seq), LeafPath::Auto).unwrap());
        }
    }
    assert!(solved > 0);
}

#[test]
fn exists_forall_gadget() {
    let p = fixtures::pcp_solvable();
    let g = p.encode_exists_forall();
    assert!(g.is_ranked());
    let lang = p.exists_forall_witness(&[3, 2, 3, 1]);
    assert_eq!(lang[0], word("bbaabbbaa1323"));
    assert!(g.finite_member(&lang, LeafPath::Auto).unwrap());
    assert!(g.finite_member(&lang, LeafPath::Slow).unwrap());
    let literal = vec![word("bbaabbbaa3231"), vec![hyperlang::model::Sym::new("c"); 13]];
    assert!(!g.finite_member(&literal, LeafPath::Auto).unwrap());
}

#[test]
fn unsolvable_gadget_has_no_small_witness() {
    let p = fixtures::pcp_unsolvable();
    assert_eq!(p.solve_bounded(8), None);
    let g = p.encode_exists_forall();
    let tuples = derived_tuples(g.grammar(), 8);
    let mut tried = 0;
    for t in &tuples {
        let lang = vec![t[0].clone(), t[1].clone()];
        tried += 1;
        assert!(!g.finite_member(&lang, LeafPath::Auto).unwrap());
    }
    assert!(tried > 0);
}

#[test]
fn diagonal_emptiness() {
    let g = fixtures::robot_diagonal();
    let s = g.sync_forall_empty().unwrap();
    assert!(!s.empty);
    let w = s.witness.unwrap();
    assert_eq!(w, word("cc"));
    assert!(g.grammar().to_cnf().cyk(&sync_letters(&[&w, &w])).unwrap());
    assert!(g.finite_member(&[w], LeafPath::Auto).unwrap());
    assert!(g.finite_member(&[word("ccca")], LeafPath::Auto).unwrap());
    assert!(fixtures::mixed_letters().sync_forall_empty().unwrap().empty);

    // The same grammars under ∃∀.
    for (h, empty) in [(fixtures::robot_diagonal(), false), (fixtures::mixed_letters(), true)] {
        let p = QuantifierPrefix::from_quantifiers(h.vars(), vec![Quantifier::Exists, Quantifier::Forall]).unwrap();
        let ea = Cfhg::new(p, h.grammar().clone()).unwrap();
        assert_eq!(ea.sync_forall_empty().unwrap().empty, empty);
        assert_eq!(ea.is_empty().unwrap(), empty);
    }
}

#[test]
fn diagonal_witnesses_are_members_on_random_ranked_grammars() {
    for g in random_ranked(3000, 20) {
        let p = QuantifierPrefix::from_quantifiers(g.vars(), vec![Quantifier::Forall; 2]).unwrap();
        let g = Cfhg::new(p, g.grammar().clone()).unwrap();
        let s = g.sync_forall_empty().unwrap();
        match s.witness {
            Some(w) => assert!(g.finite_member(&[w], LeafPath::Slow).unwrap()),
            None => {
                // No singleton of short words is accepted.
                for w in g.grammar().alphabet().words_up_to(3) {
                    assert!(!g.finite_member(&[w], LeafPath::Slow).unwrap());
                }
            }
        }
    }
}

#[test]
fn sync_forall_preconditions() {
    assert!(matches!(fixtures::pcp_tiles().sync_forall_empty(), Err(CfhgError::NotRanked(2))));
    assert!(matches!(fixtures::ranked_gr().sync_forall_empty(), Err(CfhgError::WrongPrefix(_))));
}

#[test]
fn existential_emptiness() {
    let p = fixtures::pcp_solvable().encode_exists_forall();
    let mut only_v1 = p.grammar().clone();
    only_v1.set_start(p.grammar().var_id("V1").unwrap());
    let ee = Cfhg::new(
        QuantifierPrefix::from_quantifiers(p.vars(), vec![Quantifier::Exists; 3]).unwrap(),
        only_v1.clone(),
    )
    .unwrap();
    assert!(!ee.exists_empty().unwrap());
    assert!(only_v1.derive_bounded(6).unwrap().iter().any(|_| true));

    let vars = VarSet::new(["x"]).unwrap();
    let mut dead = TrackCfg::new(ab(), vars.clone(), "S");
    let mut rhs = letters(&["a"]);
    rhs.push(GSym::V(0));
    dead.add_rule(0, rhs).unwrap();
    let e = Cfhg::new(QuantifierPrefix::from_quantifiers(&vars, vec![Quantifier::Exists]).unwrap(), dead.clone()).unwrap();
    assert!(e.exists_empty().unwrap());
    let a = Cfhg::new(QuantifierPrefix::from_quantifiers(&vars, vec![Quantifier::Forall]).unwrap(), dead).unwrap();
    assert!(a.is_empty().unwrap());
    assert_eq!(fixtures::robot_g1().is_empty().unwrap(), fixtures::robot_g1().grammar().is_empty());
}

#[test]
fn existential_regular_membership() {
    let g = fixtures::exists_ab();
    assert!(g.member_regular(&fixtures::a_or_b()).unwrap());
    assert!(!g.member_regular(&fixtures::only_c()).unwrap());
}

#[test]
fn single_track_regular_membership_matches_enumeration() {
    let mut r = rng(31);
    let vars = VarSet::new(["x"]).unwrap();
    let pool = track_letter_pool(&ab(), &vars);
    for _ in 0..40 {
        let g: TrackCfg = random_cfg(&mut r, &ab(), &vars, &pool);
        let h = Cfhg::new(QuantifierPrefix::from_quantifiers(&vars, vec![Quantifier::Exists]).unwrap(), g).unwrap();
        let a = random_nfa(&mut r, &ab(), &(), ab().symbols(), 3);
        let verdict = h.member_regular(&a).unwrap();
        let found = derived_tuples(h.grammar(), 4).iter().any(|t| nfa_accepts(&a, &t[0]));
        if found {
            assert!(verdict);
        }
        if verdict && !found {
            // Confirm with a witness from the product grammar.
            let product = {
                let padded = a.pad_anywhere().on_track("x").unwrap();
                h.grammar().to_cnf().intersect_nfa(&padded).unwrap()
            };
            let w = product.shortest_word().unwrap();
            let stripped = strip_tracks(&w, 1);
            assert!(h.grammar().member(&w));
            assert!(nfa_accepts(&a, &stripped[0]));
        }
    }
}

#[test]
fn dispatcher_refuses_undecidable_questions() {
    let un = |g: Cfhg| g.is_empty().unwrap_err();
    assert_eq!(un(fixtures::pcp_tiles()), CfhgError::Undecidable(Problem::ForallEmptinessUnranked));
    assert_eq!(un(fixtures::robot_g2()), CfhgError::Undecidable(Problem::ForallEmptinessUnranked));
    assert_eq!(
        un(fixtures::pcp_solvable().encode_exists_forall()),
        CfhgError::Undecidable(Problem::ExistsForallEmptiness)
    );
    assert_eq!(un(fixtures::ranked_gr()), CfhgError::Undecidable(Problem::ForallExistsEmptiness));
    assert!(!fixtures::robot_diagonal().is_empty().unwrap());
    assert!(!fixtures::exists_ab().is_empty().unwrap());
    let a = Nfa::word_automaton(&Alphabet::new(["a", "c"]).unwrap(), &word("cc"));
    assert_eq!(
        fixtures::robot_g1().member_regular(&a),
        Err(CfhgError::Undecidable(Problem::ForallRegularMembership))
    );
}

#[test]
fn bounded_search_reports_evidence_only() {
    let g = fixtures::pcp_solvable().encode_forall();
    assert_eq!(g.bounded_nonempty_search(2).unwrap(), Bounded::NoWitnessWithinBound);
    let d = fixtures::robot_diagonal();
    assert_eq!(d.bounded_nonempty_search(2).unwrap(), Bounded::Witness(vec![word("cc")]));
    let aplus = fixtures::a_plus().to_nfa();
    let one = Cfhg::new(
        QuantifierPrefix::from_quantifiers(&VarSet::new(["x"]).unwrap(), vec![Quantifier::Forall]).unwrap(),
        {
            let vars = VarSet::new(["x"]).unwrap();
            let mut g = TrackCfg::new(Alphabet::new(["a"]).unwrap(), vars, "S");
            g.add_rule(0, letters(&["a", "a"])).unwrap();
            g
        },
    )
    .unwrap();
    assert_eq!(one.bounded_regular_search(&aplus, 3).unwrap(), Bounded::Witness(vec![word("aa")]));
}
