//! Event co-participation graph of record holders and its community
//! structure by modularity.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub label: String,
    /// Distinct record holders of the event.
    pub competitors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Edge<T> {
    pub u: usize,
    pub v: usize,
    pub weight: T,
}

/// Simple undirected weighted graph; nodes sorted by label, edges by
/// `(u, v)` with `u < v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CompetitorGraph<T> {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge<T>>,
}

impl<T: Real> CompetitorGraph<T> {
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge<T>>) -> Result<Self> {
        for e in &edges {
            if e.u == e.v || e.u >= nodes.len() || e.v >= nodes.len() || !(e.weight > T::zero()) {
                return Err(Error::InvalidParameter(format!("bad edge ({}, {}, {})", e.u, e.v, e.weight)));
            }
        }
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::InvalidParameter(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
        }
        Ok(CompetitorGraph { nodes, edges })
    }

    /// Unlabeled graph on `n` nodes named `0..n`, for tests and fixtures.
    pub fn from_edges(n: usize, edges: &[(usize, usize, T)]) -> Result<Self> {
        let nodes = (0..n).map(|i| Node { label: i.to_string(), competitors: 1 }).collect();
        Self::new(nodes, edges.iter().map(|&(u, v, weight)| Edge { u, v, weight }).collect())
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn total_weight(&self) -> T {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.label == label)
    }

    pub fn weight(&self, a: &str, b: &str) -> Option<T> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        self.edges.iter().find(|e| (e.u, e.v) == (i.min(j), i.max(j))).map(|e| e.weight)
    }

    /// Same topology with every weight set to 1.
    pub fn unweighted(&self) -> Self {
        let edges = self.edges.iter().map(|e| Edge { weight: T::one(), ..e.clone() }).collect();
        CompetitorGraph { nodes: self.nodes.clone(), edges }
    }

    pub fn scaled(&self, c: T) -> Self {
        let edges = self.edges.iter().map(|e| Edge { weight: e.weight * c, ..e.clone() }).collect();
        CompetitorGraph { nodes: self.nodes.clone(), edges }
    }

    fn degrees(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.order()];
        for e in &self.edges {
            d[e.u] += e.weight;
            d[e.v] += e.weight;
        }
        d
    }

    /// `u,v,weight` with node labels.
    pub fn edges_csv(&self) -> String {
        let mut out = String::from("u,v,weight\n");
        for e in &self.edges {
            let _ = writeln!(out, "{},{},{}", self.nodes[e.u].label, self.nodes[e.v].label, e.weight);
        }
        out
    }

    /// `label,competitors`.
    pub fn nodes_csv(&self) -> String {
        let mut out = String::from("label,competitors\n");
        for n in &self.nodes {
            let _ = writeln!(out, "{},{}", n.label, n.competitors);
        }
        out
    }

    /// Graphviz source; nodes carry their community as a `group` attribute
    /// when an assignment is given.
    pub fn to_dot(&self, communities: Option<&CommunityAssignment<T>>) -> String {
        let mut out = String::from("graph competitors {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = write!(out, "  \"{}\" [size={}", n.label, n.competitors);
            if let Some(c) = communities {
                let _ = write!(out, ", group={}, colorscheme=set18, color={}", c.community[i], c.community[i] % 8 + 1);
            }
            out.push_str("];\n");
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  \"{}\" -- \"{}\" [weight={}];",
                self.nodes[e.u].label, self.nodes[e.v].label, e.weight
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Nodes are events, weighted by distinct record holders; an edge joins two
/// events sharing at least one record holder and weighs the number shared.
pub fn build_graph<T: Real, P: AsRef<str>, E: AsRef<str>>(records: &[(P, E)]) -> CompetitorGraph<T> {
    let mut holders: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (p, e) in records {
        holders.entry(e.as_ref()).or_default().insert(p.as_ref());
    }
    let sets: Vec<(&str, BTreeSet<&str>)> = holders.into_iter().collect();
    let nodes = sets.iter().map(|(l, s)| Node { label: l.to_string(), competitors: s.len() }).collect();
    let mut edges = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let shared = sets[i].1.intersection(&sets[j].1).count();
            if shared > 0 {
                edges.push(Edge { u: i, v: j, weight: T::from_count(shared) });
            }
        }
    }
    CompetitorGraph { nodes, edges }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CommunityAssignment<T> {
    /// Community of each node; ids numbered by first appearance.
    pub community: Vec<usize>,
    pub q: T,
}

impl<T: Real> CommunityAssignment<T> {
    pub fn count(&self) -> usize {
        self.community.iter().max().map_or(0, |&m| m + 1)
    }

    /// Node indices per community.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut g = vec![Vec::new(); self.count()];
        for (i, &c) in self.community.iter().enumerate() {
            g[c].push(i);
        }
        g
    }

    pub fn labeled(&self, graph: &CompetitorGraph<T>) -> BTreeMap<String, usize> {
        graph.nodes.iter().zip(&self.community).map(|(n, &c)| (n.label.clone(), c)).collect()
    }
}

/// Renumbers community ids by first appearance.
pub fn canonical_partition(community: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    community
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// Weighted Newman modularity `Σ_c [w_c/m − (d_c/2m)²]`. A graph without
/// edges has `Q = 0`.
pub fn modularity<T: Real>(graph: &CompetitorGraph<T>, community: &[usize]) -> Result<T> {
    if graph.order() == 0 {
        return Err(Error::EmptyGraph);
    }
    if community.len() != graph.order() {
        return Err(Error::InvalidParameter(format!(
            "partition covers {} of {} nodes",
            community.len(),
            graph.order()
        )));
    }
    let m = graph.total_weight();
    if !(m > T::zero()) {
        return Ok(T::zero());
    }
    let k = community.iter().max().map_or(0, |&c| c + 1);
    let mut inside = vec![T::zero(); k];
    let mut degree = vec![T::zero(); k];
    for e in &graph.edges {
        if community[e.u] == community[e.v] {
            inside[community[e.u]] += e.weight;
        }
        degree[community[e.u]] += e.weight;
        degree[community[e.v]] += e.weight;
    }
    let two_m = m + m;
    Ok(inside.iter().zip(&degree).map(|(&w, &d)| w / m - (d / two_m) * (d / two_m)).sum())
}

/// Upper bound on partitions visited per phase of [`detect_communities`];
/// past it, ties are no longer branched on.
pub const MAX_SEARCH_STATES: usize = 200_000;

/// Greedy agglomeration: repeatedly merge the connected pair of
/// communities with the largest modularity gain until no edges run between
/// communities, keeping the partitions of highest `Q` seen. Those are then
/// polished by single-node moves, each step taking the move with the largest
/// positive gain.
///
/// Gains within [`tie_tolerance`] of each other are ties, and every tied
/// choice is followed (sharing repeated partitions), so the reachable set and
/// hence `Q` do not depend on node order. Among equally good results the
/// partition whose canonical form sorts first is returned.
pub fn detect_communities<T: Real>(graph: &CompetitorGraph<T>) -> Result<CommunityAssignment<T>> {
    let n = graph.order();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let singletons: Vec<usize> = (0..n).collect();
    let m = graph.total_weight();
    if !(m > T::zero()) {
        return Ok(CommunityAssignment { q: modularity(graph, &singletons)?, community: singletons });
    }
    let search = Search::new(graph);

    let mut peaks = Peaks::default();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([singletons.clone()]);
    let mut stack = vec![singletons];
    while let Some(p) = stack.pop() {
        peaks.offer(modularity(graph, &p)?, &p, search.tie);
        let merges = search.best_merges(&p);
        let take = if seen.len() < MAX_SEARCH_STATES { merges.len() } else { merges.len().min(1) };
        for &(a, b) in &merges[..take] {
            let next = canonical_partition(&p.iter().map(|&c| if c == b { a } else { c }).collect::<Vec<_>>());
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }

    let mut finals = Peaks::default();
    let mut seen: HashSet<Vec<usize>> = peaks.parts.iter().cloned().collect();
    let mut stack = peaks.parts;
    while let Some(p) = stack.pop() {
        let moves = search.best_moves(&p);
        if moves.is_empty() {
            finals.offer(modularity(graph, &p)?, &p, search.tie);
            continue;
        }
        let take = if seen.len() < MAX_SEARCH_STATES { moves.len() } else { 1 };
        for &(i, to) in &moves[..take] {
            let mut next = p.clone();
            next[i] = to;
            let next = canonical_partition(&next);
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }
    let community = finals.parts.into_iter().min().expect("at least one local optimum");
    Ok(CommunityAssignment { q: modularity(graph, &community)?, community })
}

/// Modularity gains are O(1), so a few dozen ulps separate real
/// differences from rounding (e.g. after rescaling all weights).
fn tie_tolerance<T: Real>() -> T {
    T::epsilon() * T::lit(64.0)
}

/// Partitions whose `Q` is within tolerance of the best offered.
struct Peaks<T> {
    q: Option<T>,
    parts: Vec<Vec<usize>>,
}

impl<T> Default for Peaks<T> {
    fn default() -> Self {
        Peaks { q: None, parts: Vec::new() }
    }
}

impl<T: Real> Peaks<T> {
    fn offer(&mut self, q: T, part: &[usize], tie: T) {
        match self.q {
            Some(best) if q < best - tie => {}
            Some(best) if q <= best + tie => {
                self.q = Some(best.max(q));
                self.parts.push(part.to_vec());
            }
            _ => {
                self.q = Some(q);
                self.parts = vec![part.to_vec()];
            }
        }
    }
}

struct Search<T> {
    m: T,
    deg: Vec<T>,
    adj: Vec<Vec<(usize, T)>>,
    edges: Vec<(usize, usize, T)>,
    tie: T,
}

impl<T: Real> Search<T> {
    fn new(graph: &CompetitorGraph<T>) -> Self {
        let n = graph.order();
        let mut adj: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for e in &graph.edges {
            adj[e.u].push((e.v, e.weight));
            adj[e.v].push((e.u, e.weight));
        }
        Search {
            m: graph.total_weight(),
            deg: graph.degrees(),
            adj,
            edges: graph.edges.iter().map(|e| (e.u, e.v, e.weight)).collect(),
            tie: tie_tolerance(),
        }
    }

    fn community_degrees(&self, p: &[usize]) -> Vec<T> {
        let mut cdeg = vec![T::zero(); p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            cdeg[c] += self.deg[i];
        }
        cdeg
    }

    /// Connected community pairs tied for the largest merge gain.
    fn best_merges(&self, p: &[usize]) -> Vec<(usize, usize)> {
        let mut between: BTreeMap<(usize, usize), T> = BTreeMap::new();
        for &(u, v, w) in &self.edges {
            let (a, b) = (p[u], p[v]);
            if a != b {
                *between.entry((a.min(b), a.max(b))).or_insert(T::zero()) += w;
            }
        }
        let cdeg = self.community_degrees(p);
        let two_m = self.m + self.m;
        let gains: Vec<((usize, usize), T)> = between
            .into_iter()
            .map(|((a, b), w)| ((a, b), w / self.m - T::lit(2.0) * (cdeg[a] / two_m) * (cdeg[b] / two_m)))
            .collect();
        let Some(top) = gains.iter().map(|g| g.1).reduce(T::max) else {
            return Vec::new();
        };
        gains.into_iter().filter(|g| g.1 >= top - self.tie).map(|g| g.0).collect()
    }

    /// Single-node moves, to a neighboring community or a fresh one, tied
    /// for the largest gain; empty when no move gains more than tolerance.
    fn best_moves(&self, p: &[usize]) -> Vec<(usize, usize)> {
        let n = p.len();
        let cdeg = self.community_degrees(p);
        let two_m2 = T::lit(2.0) * self.m * self.m;
        let fresh = p.iter().copied().max().map_or(0, |c| c + 1);
        let mut gains: Vec<((usize, usize), T)> = Vec::new();
        for i in 0..n {
            let from = p[i];
            let mut links: BTreeMap<usize, T> = BTreeMap::new();
            for &(j, w) in &self.adj[i] {
                *links.entry(p[j]).or_insert(T::zero()) += w;
            }
            let stay = links.get(&from).copied().unwrap_or(T::zero());
            let rest = cdeg[from] - self.deg[i];
            let gain_to = |k: T, d: T| (k - stay) / self.m - self.deg[i] * (d - rest) / two_m2;
            for (&c, &k) in &links {
                if c != from {
                    gains.push(((i, c), gain_to(k, cdeg[c])));
                }
            }
            // zero for a node already alone
            gains.push(((i, fresh), gain_to(T::zero(), T::zero())));
        }
        let top = gains.iter().map(|g| g.1).fold(T::neg_infinity(), T::max);
        if !(top > self.tie) {
            return Vec::new();
        }
        gains.into_iter().filter(|g| g.1 >= top - self.tie).map(|g| g.0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangles() -> CompetitorGraph<f64> {
        CompetitorGraph::from_edges(6, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (3, 4, 1.0), (3, 5, 1.0), (4, 5, 1.0)])
            .unwrap()
    }

    #[test]
    fn one_shared_person() {
        let g: CompetitorGraph<f64> = build_graph(&[("p", "3"), ("p", "4")]);
        assert_eq!(g.nodes.len(), 2);
        assert!(g.nodes.iter().all(|n| n.competitors == 1));
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].weight, 1.0);
    }

    #[test]
    fn disjoint_people() {
        let g: CompetitorGraph<f64> = build_graph(&[("p", "3"), ("q", "4")]);
        assert_eq!(g.nodes.len(), 2);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn single_community_has_zero_q() {
        let g = triangles();
        assert!(modularity(&g, &[0; 6]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn two_triangles() {
        let g = triangles();
        assert_eq!(modularity(&g, &[0, 0, 0, 1, 1, 1]).unwrap(), 0.5);
        let c = detect_communities(&g).unwrap();
        assert_eq!(c.community, vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(c.q, 0.5);
    }

    #[test]
    fn single_node() {
        let g = CompetitorGraph::<f64>::from_edges(1, &[]).unwrap();
        let c = detect_communities(&g).unwrap();
        assert_eq!(c.community, vec![0]);
        assert_eq!(c.q, 0.0);
    }

    #[test]
    fn empty_graph_errors() {
        let g = CompetitorGraph::<f64>::from_edges(0, &[]).unwrap();
        assert!(matches!(modularity(&g, &[]), Err(Error::EmptyGraph)));
    }

    #[test]
    fn exports() {
        let g: CompetitorGraph<f64> = build_graph(&[("p", "3"), ("p", "4"), ("q", "4")]);
        assert_eq!(g.edges_csv(), "u,v,weight\n3,4,1\n");
        assert_eq!(g.nodes_csv(), "label,competitors\n3,1\n4,2\n");
        assert!(g.to_dot(None).contains("\"3\" -- \"4\""));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(CompetitorGraph::<f64>::from_edges(2, &[(0, 0, 1.0)]).is_err());
        assert!(CompetitorGraph::<f64>::from_edges(2, &[(0, 1, 1.0), (1, 0, 1.0)]).is_err());
    }
}
