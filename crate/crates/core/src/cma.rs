//! Cardinality-matching realization of a network specification.
//!
//! Subgraph instances are placed on nodes with enough free stubs, largest
//! kinds first, without reusing an existing edge and preferring placements
//! that close no extra triangles. The remaining stubs are then paired into
//! free edges, avoiding new triangles where possible and repairing dead ends
//! by rewiring earlier free edges. A failed attempt restarts from scratch.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::family::{NetworkSpec, SubgraphFamily, SubgraphKind};
use crate::graph::Graph;
use crate::metrics::{global_clustering, subgraph_census};
use crate::{Error, Result, Rng};

const PLACEMENT_TRIES: usize = 48;
const NODE_DRAWS: usize = 64;
const PARTNER_CANDIDATES: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RealizationConfig {
    pub max_attempts: u32,
    pub max_edge_retries: u32,
    pub rng_seed: u64,
    /// Run the subgraph census on success to report by-products.
    pub census: bool,
}

impl Default for RealizationConfig {
    fn default() -> Self {
        RealizationConfig {
            max_attempts: 10,
            max_edge_retries: 2000,
            rng_seed: 0,
            census: true,
        }
    }
}

impl RealizationConfig {
    pub fn with_seed(self, rng_seed: u64) -> Self {
        RealizationConfig { rng_seed, ..self }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizationReport {
    pub graph: Option<Graph>,
    pub attempts_used: u32,
    /// Census minus specified count, per kind; empty when the census was not
    /// run or the family is not supported by it.
    pub by_products: Vec<i64>,
    pub census: Option<Vec<u64>>,
    pub realized_clustering: Option<f64>,
}

impl RealizationReport {
    pub fn succeeded(&self) -> bool {
        self.graph.is_some()
    }
}

/// Graph under construction with per-node remaining stubs.
#[derive(Clone, Debug)]
pub struct PartialGraph {
    graph: Graph,
    degree: usize,
    stubs: Vec<usize>,
    // nodes with at least one stub, and each node's slot in it
    pool: Vec<usize>,
    slot: Vec<usize>,
    free_edges: Vec<(usize, usize)>,
}

impl PartialGraph {
    pub fn new(nodes: usize, degree: usize) -> Self {
        PartialGraph {
            graph: Graph::new(nodes),
            degree,
            stubs: vec![degree; nodes],
            pool: (0..nodes).collect(),
            slot: (0..nodes).collect(),
            free_edges: Vec::new(),
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn stubs(&self) -> &[usize] {
        &self.stubs
    }

    pub fn free_edges(&self) -> &[(usize, usize)] {
        &self.free_edges
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    fn take_stub(&mut self, v: usize) {
        self.stubs[v] -= 1;
        if self.stubs[v] == 0 {
            let i = self.slot[v];
            let last = *self.pool.last().unwrap();
            self.pool.swap_remove(i);
            if last != v {
                self.slot[last] = i;
            }
            self.slot[v] = usize::MAX;
        }
    }

    fn give_stub(&mut self, v: usize) {
        if self.stubs[v] == 0 {
            self.slot[v] = self.pool.len();
            self.pool.push(v);
        }
        self.stubs[v] += 1;
    }

    fn connect(&mut self, u: usize, v: usize) {
        let added = self.graph.add_edge(u, v).expect("valid endpoints");
        debug_assert!(added);
        self.take_stub(u);
        self.take_stub(v);
    }

    fn connect_free(&mut self, u: usize, v: usize) {
        self.connect(u, v);
        self.free_edges.push((u, v));
    }

    fn closes_triangle(&self, u: usize, v: usize) -> bool {
        self.graph.common_neighbor_count(u, v) > 0
    }
}

/// Triangles a placement would close beyond those inside the pattern:
/// common neighbours of every new edge, plus existing chords between placed
/// nodes.
fn byproduct_score(g: &Graph, nodes: &[usize], pattern: &[[usize; 2]]) -> usize {
    let mut score: usize = pattern
        .iter()
        .map(|&[a, b]| g.common_neighbor_count(nodes[a], nodes[b]))
        .sum();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            let in_pattern = pattern
                .iter()
                .any(|&[a, b]| (a, b) == (i, j) || (a, b) == (j, i));
            if !in_pattern && g.has_edge(nodes[i], nodes[j]) {
                score += 1;
            }
        }
    }
    score
}

/// Places one instance of `kind`. Fails when no node set with enough stubs
/// and no pre-existing pattern edge is found within the retry budget.
pub fn place_subgraph<R: rand::Rng + ?Sized>(
    partial: &mut PartialGraph,
    kind: &SubgraphKind,
    rng: &mut R,
) -> Result<bool> {
    let pattern = kind
        .pattern
        .as_deref()
        .ok_or_else(|| Error::Family(format!("kind `{}` has no edge pattern", kind.name)))?;
    let mut roles: Vec<usize> = (0..kind.nodes).collect();
    roles.sort_by_key(|&r| core::cmp::Reverse(kind.degrees[r]));

    let mut best: Option<(usize, Vec<usize>)> = None;
    'tries: for _ in 0..PLACEMENT_TRIES {
        let mut nodes = vec![usize::MAX; kind.nodes];
        for &r in &roles {
            let need = kind.degrees[r];
            let mut found = None;
            for _ in 0..NODE_DRAWS {
                if partial.pool.is_empty() {
                    break;
                }
                let v = partial.pool[rng.gen_range(0..partial.pool.len())];
                if partial.stubs[v] < need || nodes.contains(&v) {
                    continue;
                }
                // favour nodes with many remaining stubs
                if rng.gen_range(0..partial.degree) >= partial.stubs[v] {
                    continue;
                }
                found = Some(v);
                break;
            }
            match found {
                Some(v) => nodes[r] = v,
                None => continue 'tries,
            }
        }
        if pattern
            .iter()
            .any(|&[a, b]| partial.graph.has_edge(nodes[a], nodes[b]))
        {
            continue;
        }
        let score = byproduct_score(&partial.graph, &nodes, pattern);
        if best.as_ref().is_none_or(|(s, _)| score < *s) {
            best = Some((score, nodes));
            if score == 0 {
                break;
            }
        }
    }
    let Some((_, nodes)) = best else {
        return Ok(false);
    };
    for &[a, b] in pattern {
        partial.connect(nodes[a], nodes[b]);
    }
    Ok(true)
}

fn choose_partner<R: rand::Rng + ?Sized>(
    partial: &PartialGraph,
    u: usize,
    open: &[usize],
    rng: &mut R,
) -> Option<usize> {
    let valid = |v: usize| v != u && !partial.graph.has_edge(u, v);
    let mut fallback = None;
    let mut consider = |j: usize| -> Option<usize> {
        let v = open[j];
        if !valid(v) {
            return None;
        }
        if !partial.closes_triangle(u, v) {
            return Some(j);
        }
        fallback.get_or_insert(j);
        None
    };
    if open.len() <= 2 * PARTNER_CANDIDATES {
        let start = if open.is_empty() { 0 } else { rng.gen_range(0..open.len()) };
        for step in 0..open.len() {
            if let Some(j) = consider((start + step) % open.len()) {
                return Some(j);
            }
        }
    } else {
        for _ in 0..PARTNER_CANDIDATES {
            if let Some(j) = consider(rng.gen_range(0..open.len())) {
                return Some(j);
            }
        }
    }
    fallback
}

/// Replaces a free edge `(a, b)` with `(u, a)` and `(v, b)`.
fn rewire<R: rand::Rng + ?Sized>(
    partial: &mut PartialGraph,
    u: usize,
    v: usize,
    rng: &mut R,
    retries: u32,
) -> bool {
    for attempt in 0..retries {
        if partial.free_edges.is_empty() {
            return false;
        }
        let i = rng.gen_range(0..partial.free_edges.len());
        let (mut a, mut b) = partial.free_edges[i];
        if rng.gen_bool(0.5) {
            core::mem::swap(&mut a, &mut b);
        }
        if [a, b].iter().any(|x| *x == u || *x == v) {
            continue;
        }
        let g = &partial.graph;
        if g.has_edge(u, a) || g.has_edge(v, b) {
            continue;
        }
        let strict = attempt < retries / 2;
        if strict && (partial.closes_triangle(u, a) || partial.closes_triangle(v, b)) {
            continue;
        }
        partial.free_edges.swap_remove(i);
        partial.graph.remove_edge(a, b);
        partial.give_stub(a);
        partial.give_stub(b);
        partial.connect_free(u, a);
        partial.connect_free(v, b);
        return true;
    }
    false
}

/// Pairs all remaining stubs into free edges.
pub fn fill_free_edges<R: rand::Rng + ?Sized>(
    partial: &mut PartialGraph,
    rng: &mut R,
    max_edge_retries: u32,
) -> bool {
    let mut open: Vec<usize> = partial
        .stubs
        .iter()
        .enumerate()
        .flat_map(|(v, &s)| core::iter::repeat_n(v, s))
        .collect();
    if open.len() % 2 == 1 {
        return false;
    }
    open.shuffle(rng);
    let mut stuck = Vec::new();
    while let Some(u) = open.pop() {
        match choose_partner(partial, u, &open, rng) {
            Some(j) => {
                let v = open.swap_remove(j);
                partial.connect_free(u, v);
            }
            None => stuck.push(u),
        }
    }
    while let (Some(u), Some(v)) = (stuck.pop(), stuck.pop()) {
        if u != v && !partial.graph.has_edge(u, v) {
            partial.connect_free(u, v);
        } else if !rewire(partial, u, v, rng, max_edge_retries) {
            return false;
        }
    }
    partial.stubs.iter().all(|&s| s == 0)
}

/// Kinds in placement order: more nodes first, then more edges.
fn placement_order(family: &SubgraphFamily) -> Vec<usize> {
    let mut order: Vec<usize> = (0..family.len()).collect();
    order.sort_by_key(|&i| {
        let k = &family.kinds()[i];
        (core::cmp::Reverse(k.nodes), core::cmp::Reverse(k.edges), i)
    });
    order
}

fn attempt<R: rand::Rng + ?Sized>(
    spec: &NetworkSpec,
    family: &SubgraphFamily,
    order: &[usize],
    cfg: &RealizationConfig,
    rng: &mut R,
) -> Result<Option<Graph>> {
    let mut partial = PartialGraph::new(spec.context.nodes, spec.context.degree);
    for &i in order {
        let kind = &family.kinds()[i];
        for _ in 0..spec.counts[i] {
            if !place_subgraph(&mut partial, kind, rng)? {
                return Ok(None);
            }
        }
    }
    if !fill_free_edges(&mut partial, rng, cfg.max_edge_retries) {
        return Ok(None);
    }
    Ok(Some(partial.into_graph()))
}

/// Realizes `spec` as a simple k-regular graph. The spec must validate.
pub fn realize(
    spec: &NetworkSpec,
    family: &SubgraphFamily,
    cfg: &RealizationConfig,
) -> Result<RealizationReport> {
    if cfg.max_attempts == 0 {
        return Err(Error::Config("max_attempts must be at least 1".into()));
    }
    let violations = spec.validate(family);
    if !violations.is_empty() {
        return Err(Error::InvalidSpec(violations));
    }
    let order = placement_order(family);
    let mut rng = Rng::seed_from_u64(cfg.rng_seed);
    for attempts_used in 1..=cfg.max_attempts {
        let Some(g) = attempt(spec, family, &order, cfg, &mut rng)? else {
            continue;
        };
        debug_assert_eq!(g.regular_degree(), Some(spec.context.degree));
        let census = if cfg.census {
            subgraph_census(&g, family).ok().map(|c| c.counts)
        } else {
            None
        };
        let by_products = census
            .as_ref()
            .map(|c| c.iter().zip(&spec.counts).map(|(&got, &want)| got as i64 - want).collect())
            .unwrap_or_default();
        return Ok(RealizationReport {
            realized_clustering: global_clustering(&g),
            graph: Some(g),
            attempts_used,
            by_products,
            census,
        });
    }
    Ok(RealizationReport {
        graph: None,
        attempts_used: cfg.max_attempts,
        by_products: Vec::new(),
        census: None,
        realized_clustering: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{Context, Shape};

    fn mixed_spec(family: &SubgraphFamily) -> NetworkSpec {
        let ctx = Context::new(1000, 7, 3.0 * 673.0 / 21000.0).unwrap();
        family
            .spec_from_named(
                ctx,
                &[("k4", 35), ("diag_square", 128), ("triangle", 277), ("square", 35), ("pentagon", 42)],
            )
            .unwrap()
    }

    #[test]
    fn fig1_spec_realizes_regular_near_target() {
        let f = SubgraphFamily::default_family();
        let spec = mixed_spec(&f);
        for seed in 0..5 {
            let r = realize(&spec, &f, &RealizationConfig::default().with_seed(seed)).unwrap();
            let g = r.graph.as_ref().expect("realized");
            assert_eq!(g.regular_degree(), Some(7));
            let c = r.realized_clustering.unwrap();
            assert!((0.093..=0.103).contains(&c), "clustering {c}");
            let census = r.census.unwrap();
            // K4s are never destroyed and rarely created
            assert!((35..=37).contains(&census[0]), "{census:?}");
        }
    }

    #[test]
    fn empty_spec_is_plain_regular_graph() {
        let f = SubgraphFamily::default_family();
        let spec = NetworkSpec::new(vec![0; 5], Context::new(1000, 7, 0.0).unwrap());
        let r = realize(&spec, &f, &RealizationConfig::default().with_seed(11)).unwrap();
        assert_eq!(r.graph.unwrap().regular_degree(), Some(7));
        assert!(r.realized_clustering.unwrap() < 0.02);
    }

    #[test]
    fn over_budget_is_contract_error() {
        let f = SubgraphFamily::default_family();
        let spec = NetworkSpec::new(vec![0, 1167, 0, 0, 0], Context::new(1000, 7, 0.1667).unwrap());
        assert!(matches!(
            realize(&spec, &f, &RealizationConfig::default()),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn deterministic_under_seed() {
        let f = SubgraphFamily::default_family();
        let spec = mixed_spec(&f);
        let cfg = RealizationConfig::default().with_seed(42);
        assert_eq!(realize(&spec, &f, &cfg).unwrap(), realize(&spec, &f, &cfg).unwrap());
    }

    #[test]
    fn placement_examples() {
        let mut rng = Rng::seed_from_u64(1);
        let tri = Shape::Triangle.kind();
        let mut p = PartialGraph::new(3, 7);
        assert!(place_subgraph(&mut p, &tri, &mut rng).unwrap());
        assert_eq!(p.stubs(), [5, 5, 5]);
        // the same three nodes are now pairwise adjacent
        assert!(!place_subgraph(&mut p, &tri, &mut rng).unwrap());
        assert_eq!(p.graph().edge_count(), 3);

        let k4 = Shape::K4.kind();
        let mut p = PartialGraph::new(4, 7);
        p.stubs[3] = 2;
        assert!(!place_subgraph(&mut p, &k4, &mut rng).unwrap());
    }

    #[test]
    fn free_edges_never_self_loop() {
        let mut rng = Rng::seed_from_u64(5);
        // zero stubs: immediate success
        let mut p = PartialGraph::new(4, 0);
        assert!(fill_free_edges(&mut p, &mut rng, 10));
        // one node with two stubs and nothing to rewire
        let mut p = PartialGraph::new(3, 2);
        p.stubs = vec![2, 0, 0];
        p.pool = vec![0];
        p.slot = vec![0, usize::MAX, usize::MAX];
        assert!(!fill_free_edges(&mut p, &mut rng, 10));
        assert_eq!(p.graph().edge_count(), 0);
    }

    #[test]
    fn rewire_repairs_same_node_stubs() {
        let mut rng = Rng::seed_from_u64(9);
        let mut p = PartialGraph::new(5, 2);
        // 1-2, 3-4 are free edges; node 0 has two stubs left
        for v in 1..5 {
            p.stubs[v] = 1;
        }
        p.connect_free(1, 2);
        p.connect_free(3, 4);
        p.stubs[1] = 1;
        p.stubs[2] = 1;
        p.stubs[3] = 1;
        p.stubs[4] = 1;
        p.pool = vec![0, 1, 2, 3, 4];
        p.slot = vec![0, 1, 2, 3, 4];
        // pair 1-3, 2-4 first, leaving 0 with two stubs that need rewiring
        p.connect_free(1, 3);
        p.connect_free(2, 4);
        assert!(fill_free_edges(&mut p, &mut rng, 100));
        assert_eq!(p.graph().regular_degree(), Some(2));
    }
}
