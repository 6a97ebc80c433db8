//! Rule graphs, left/right ranks and the ranked-grammar check.
//!
//! A rank is a set of word variables (track indices). The right rank of a
//! vertex over-approximates the tracks on which it may end with `#`; the
//! left rank under-approximates the tracks on which it must begin with
//! `#`. A rule is fine when every right rank is contained in the left rank
//! of its right neighbour.

use std::collections::{BTreeSet, HashMap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::cfg::{GSym, Rule, TrackCfg};
use crate::model::{TrackLetter, VarSet};

/// A set of track indices.
pub type Rank = BTreeSet<usize>;

/// `t(σ)`: the tracks on which a letter reads `#`.
pub fn pad_tracks(l: &TrackLetter) -> Rank {
    l.pad_positions().collect()
}

pub fn render_rank(vars: &VarSet, r: &Rank) -> String {
    let names: Vec<&str> = r.iter().map(|&i| vars.names()[i].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Var(usize),
    Rhs(Vec<GSym<TrackLetter>>),
}

/// Vertices are the variables followed by the distinct non-empty
/// right-hand sides in rule order.
#[derive(Debug, Clone)]
pub struct RuleGraph {
    pub vertices: Vec<Vertex>,
    pub left_edges: BTreeSet<(usize, usize)>,
    pub right_edges: BTreeSet<(usize, usize)>,
    index: HashMap<Vertex, usize>,
}

impl RuleGraph {
    pub fn build(g: &TrackCfg) -> Self {
        let mut vertices: Vec<Vertex> = (0..g.num_vars()).map(Vertex::Var).collect();
        let mut index: HashMap<Vertex, usize> = vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let mut left_edges = BTreeSet::new();
        let mut right_edges = BTreeSet::new();
        for r in g.rules() {
            if r.rhs.is_empty() {
                continue;
            }
            let key = Vertex::Rhs(r.rhs.clone());
            let w = *index.entry(key.clone()).or_insert_with(|| {
                vertices.push(key);
                vertices.len() - 1
            });
            left_edges.insert((r.lhs, w));
            right_edges.insert((r.lhs, w));
            if let Some(GSym::V(v)) = r.rhs.first() {
                left_edges.insert((w, *v));
            }
            if let Some(GSym::V(v)) = r.rhs.last() {
                right_edges.insert((w, *v));
            }
        }
        RuleGraph {
            vertices,
            left_edges,
            right_edges,
            index,
        }
    }

    pub fn vertex_of_rhs(&self, rhs: &[GSym<TrackLetter>]) -> Option<usize> {
        self.index.get(&Vertex::Rhs(rhs.to_vec())).copied()
    }

    pub fn edges(&self, side: Side) -> &BTreeSet<(usize, usize)> {
        match side {
            Side::Left => &self.left_edges,
            Side::Right => &self.right_edges,
        }
    }

    pub fn out_degree(&self, side: Side, u: usize) -> usize {
        self.edges(side).iter().filter(|(a, _)| *a == u).count()
    }

    pub fn render_vertex(&self, g: &TrackCfg, u: usize) -> String {
        match &self.vertices[u] {
            Vertex::Var(v) => g.var_name(*v).to_string(),
            Vertex::Rhs(rhs) => g.render_rhs(rhs),
        }
    }

    /// Maximal strongly connected components of one edge set, sinks first.
    pub fn components(&self, side: Side) -> Vec<Vec<usize>> {
        let mut graph: DiGraph<usize, ()> = DiGraph::new();
        let nodes: Vec<NodeIndex> = (0..self.vertices.len()).map(|i| graph.add_node(i)).collect();
        for &(a, b) in self.edges(side) {
            graph.add_edge(nodes[a], nodes[b], ());
        }
        tarjan_scc(&graph)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|n| graph[n]).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// How the left rank of a component combines the ranks of its exits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExitJoin {
    /// A variable must start with `#` on a track only if every way out
    /// does. Sound for the ranked check.
    #[default]
    Intersection,
    /// Union over exits; accepts grammars that can break synchrony
    /// (kept for comparison).
    Union,
}

/// Order in which components are visited; the result must not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraversalOrder {
    #[default]
    Tarjan,
    /// Kahn's algorithm on the reversed condensation, highest index first.
    Kahn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RankOptions {
    pub join: ExitJoin,
    pub order: TraversalOrder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTable {
    pub left: Vec<Rank>,
    pub right: Vec<Rank>,
    /// Per-vertex values before the component-wide combination.
    pub left_raw: Vec<Rank>,
    pub right_raw: Vec<Rank>,
}

impl RankTable {
    pub fn compute(graph: &RuleGraph, opts: RankOptions) -> Self {
        let (left, left_raw) = side_ranks(graph, Side::Left, opts);
        let (right, right_raw) = side_ranks(graph, Side::Right, opts);
        RankTable {
            left,
            right,
            left_raw,
            right_raw,
        }
    }

    pub fn left_of_var(&self, v: usize) -> &Rank {
        &self.left[v]
    }

    pub fn right_of_var(&self, v: usize) -> &Rank {
        &self.right[v]
    }

    pub fn left_of_symbol(&self, s: &GSym<TrackLetter>) -> Rank {
        match s {
            GSym::T(l) => pad_tracks(l),
            GSym::V(v) => self.left[*v].clone(),
        }
    }

    pub fn right_of_symbol(&self, s: &GSym<TrackLetter>) -> Rank {
        match s {
            GSym::T(l) => pad_tracks(l),
            GSym::V(v) => self.right[*v].clone(),
        }
    }

    /// Adjacent pairs of a sentential form that break `R ⊆ L`, as
    /// 1-based positions of the left element.
    pub fn violations_in(&self, form: &[GSym<TrackLetter>]) -> Vec<(usize, Rank, Rank)> {
        form.windows(2)
            .enumerate()
            .filter_map(|(i, w)| {
                let r = self.right_of_symbol(&w[0]);
                let l = self.left_of_symbol(&w[1]);
                (!r.is_subset(&l)).then_some((i + 1, r, l))
            })
            .collect()
    }
}

fn side_ranks(graph: &RuleGraph, side: Side, opts: RankOptions) -> (Vec<Rank>, Vec<Rank>) {
    let comps = graph.components(side);
    let mut comp_of = vec![0usize; graph.vertices.len()];
    for (ci, c) in comps.iter().enumerate() {
        for &u in c {
            comp_of[u] = ci;
        }
    }
    let mut exits: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); comps.len()];
    for &(a, b) in graph.edges(side) {
        if comp_of[a] != comp_of[b] {
            exits[comp_of[a]].insert(comp_of[b]);
        }
    }
    let order: Vec<usize> = match opts.order {
        TraversalOrder::Tarjan => (0..comps.len()).collect(),
        TraversalOrder::Kahn => kahn_sinks_first(&exits),
    };

    let mut rank = vec![Rank::new(); graph.vertices.len()];
    let mut raw = vec![Rank::new(); graph.vertices.len()];
    for ci in order {
        let comp = &comps[ci];
        // Terminal boundary letters decide on their own.
        if let [u] = comp.as_slice() {
            if let Vertex::Rhs(rhs) = &graph.vertices[*u] {
                let edge = match side {
                    Side::Left => rhs.first(),
                    Side::Right => rhs.last(),
                };
                if let Some(GSym::T(l)) = edge {
                    let t = pad_tracks(l);
                    rank[*u] = t.clone();
                    raw[*u] = t.clone();
                    continue;
                }
            }
        }
        let exit_ranks: Vec<Rank> = exits[ci]
            .iter()
            .map(|c2| {
                let members = &comps[*c2];
                let got = |u: &usize| rank[*u].clone();
                match side {
                    Side::Left => intersect_all(members.iter().map(got)),
                    Side::Right => members.iter().map(got).fold(Rank::new(), |a, b| &a | &b),
                }
            })
            .collect();
        let value = match (side, opts.join) {
            (Side::Left, ExitJoin::Intersection) => intersect_all(exit_ranks.into_iter()),
            _ => exit_ranks.into_iter().fold(Rank::new(), |a, b| &a | &b),
        };
        for &u in comp {
            raw[u] = value.clone();
            rank[u] = value.clone();
        }
    }
    (rank, raw)
}

/// Intersection of a family; the empty family gives the empty set.
fn intersect_all(mut sets: impl Iterator<Item = Rank>) -> Rank {
    let Some(first) = sets.next() else { return Rank::new() };
    sets.fold(first, |a, b| &a & &b)
}

fn kahn_sinks_first(exits: &[BTreeSet<usize>]) -> Vec<usize> {
    let n = exits.len();
    let mut pending: Vec<usize> = exits.iter().map(BTreeSet::len).collect();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, es) in exits.iter().enumerate() {
        for &b in es {
            preds[b].push(a);
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&c| pending[c] == 0).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(&c) = ready.iter().next_back() {
        ready.remove(&c);
        out.push(c);
        for &p in &preds[c] {
            pending[p] -= 1;
            if pending[p] == 0 {
                ready.insert(p);
            }
        }
    }
    out
}

/// One adjacent pair breaking `R(γi) ⊆ L(γi+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: usize,
    /// 1-based index of `γi`.
    pub position: usize,
    pub right: Rank,
    pub left: Rank,
}

/// Checks every non-empty rule.
pub fn violations(g: &TrackCfg, table: &RankTable) -> Vec<Violation> {
    let mut out = Vec::new();
    for (ri, Rule { rhs, .. }) in g.rules().iter().enumerate() {
        for (position, right, left) in table.violations_in(rhs) {
            out.push(Violation {
                rule: ri,
                position,
                right,
                left,
            });
        }
    }
    out
}
