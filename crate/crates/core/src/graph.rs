//! Simple undirected graphs with sorted adjacency, degree sequences and the
//! edge-list text format.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Simple undirected graph on nodes `0..n`.
///
/// Neighbor lists are kept sorted, so `has_edge` is a binary search and every
/// iteration order is deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edges: 0,
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    fn check(&self, v: usize) -> Result<()> {
        if v >= self.adj.len() {
            return Err(Error::NodeOutOfRange {
                index: v,
                n: self.adj.len(),
            });
        }
        Ok(())
    }

    /// Adds `{u, v}`. Returns `Ok(false)` when the edge was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.edges += 1;
                Ok(true)
            }
        }
    }

    /// Removes `{u, v}` if present.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u >= self.adj.len() || v >= self.adj.len() {
            return false;
        }
        match self.adj[u].binary_search(&v) {
            Ok(pos) => {
                self.adj[u].remove(pos);
                let pos = self.adj[v].binary_search(&u).expect("asymmetric adjacency");
                self.adj[v].remove(pos);
                self.edges -= 1;
                true
            }
            Err(_) => false,
        }
    }

    /// Edges as `(u, v)` with `u < v`, ordered lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, ns)| {
            let start = ns.partition_point(|&v| v <= u);
            ns[start..].iter().map(move |&v| (u, v))
        })
    }

    pub fn common_neighbor_count(&self, u: usize, v: usize) -> usize {
        sorted_intersection_count(&self.adj[u], &self.adj[v])
    }

    pub fn degrees(&self) -> DegreeSequence {
        DegreeSequence(self.adj.iter().map(Vec::len).collect())
    }

    /// Returns `Some(k)` when every node has degree `k`.
    pub fn regular_degree(&self) -> Option<usize> {
        let k = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|ns| ns.len() == k).then_some(k)
    }

    /// Writes one `u v` line per edge, smaller endpoint first. Trailing
    /// isolated nodes are recorded in a `# nodes N` header so that the node
    /// count survives the round trip.
    pub fn write_edge_list<W: fmt::Write>(&self, out: &mut W) -> fmt::Result {
        let implied = self
            .adj
            .iter()
            .rposition(|ns| !ns.is_empty())
            .map_or(0, |v| v + 1);
        if implied != self.adj.len() {
            writeln!(out, "# nodes {}", self.adj.len())?;
        }
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    /// Parses the edge-list format written by [`Graph::write_edge_list`].
    /// Lines starting with `#` are comments, except for a `# nodes N` header.
    pub fn read_edge_list(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut pairs = Vec::new();
        let mut max_node = None::<usize>;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                let mut words = comment.split_whitespace();
                if words.next() == Some("nodes") {
                    let n = words
                        .next()
                        .and_then(|w| w.parse::<usize>().ok())
                        .ok_or_else(|| parse_err(line, "malformed `# nodes` header"))?;
                    declared = Some(n);
                }
                continue;
            }
            let mut words = trimmed.split_whitespace();
            let (Some(a), Some(b), None) = (words.next(), words.next(), words.next()) else {
                return Err(parse_err(line, "expected two node indices"));
            };
            let u: usize = a
                .parse()
                .map_err(|_| parse_err(line, &format!("invalid node `{a}`")))?;
            let v: usize = b
                .parse()
                .map_err(|_| parse_err(line, &format!("invalid node `{b}`")))?;
            if u == v {
                return Err(parse_err(line, &format!("self-loop on node {u}")));
            }
            max_node = Some(max_node.map_or(u.max(v), |m| m.max(u).max(v)));
            pairs.push((line, u, v));
        }
        let implied = max_node.map_or(0, |m| m + 1);
        let n = match declared {
            Some(n) if n < implied => {
                return Err(parse_err(1, "`# nodes` header smaller than largest node index"))
            }
            Some(n) => n,
            None => implied,
        };
        let mut g = Graph::new(n);
        for (line, u, v) in pairs {
            if !g.add_edge(u, v)? {
                return Err(parse_err(line, &format!("duplicate edge {u} {v}")));
            }
        }
        Ok(g)
    }
}

fn parse_err(line: usize, reason: &str) -> Error {
    Error::Parse {
        line,
        reason: reason.to_string(),
    }
}

pub(crate) fn sorted_intersection_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegreeSequence(pub Vec<usize>);

impl DegreeSequence {
    pub fn new(degrees: Vec<usize>) -> Self {
        DegreeSequence(degrees)
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    /// Erdős–Gallai test: true iff some simple graph has these degrees.
    pub fn is_graphical(&self) -> bool {
        let n = self.0.len();
        if self.sum() % 2 == 1 {
            return false;
        }
        let mut d = self.0.clone();
        d.sort_unstable_by(|a, b| b.cmp(a));
        if d.first().is_some_and(|&max| max >= n) {
            return false;
        }
        let mut lhs = 0usize;
        for k in 1..=n {
            lhs += d[k - 1];
            let tail: usize = d[k..].iter().map(|&x| x.min(k)).sum();
            if lhs > k * (k - 1) + tail {
                return false;
            }
        }
        true
    }
}

pub fn is_graphical(degrees: &DegreeSequence) -> bool {
    degrees.is_graphical()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::string::String;
    use proptest::prelude::*;

    #[test]
    fn add_edge_semantics() {
        let mut g = Graph::new(3);
        assert_eq!(g.add_edge(0, 1), Ok(true));
        assert_eq!((g.edge_count(), g.degree(0), g.degree(1)), (1, 1, 1));
        assert_eq!(g.add_edge(1, 0), Ok(false));
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.add_edge(0, 0), Err(Error::SelfLoop(0)));
        assert_eq!(
            g.add_edge(0, 3),
            Err(Error::NodeOutOfRange { index: 3, n: 3 })
        );
    }

    #[test]
    fn graphical_examples() {
        assert!(DegreeSequence::new(vec![3, 3, 3, 3]).is_graphical());
        assert!(!DegreeSequence::new(vec![3, 1]).is_graphical());
        assert!(!DegreeSequence::new(vec![4, 4, 4, 1, 1]).is_graphical());
        assert!(DegreeSequence::new(vec![]).is_graphical());
    }

    fn sequences(n: usize, max: usize) -> Vec<Vec<usize>> {
        // nonincreasing sequences of length n with entries <= max
        fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for d in 0..=max {
                cur.push(d);
                rec(n, d, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, max, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn erdos_gallai_matches_exhaustive_realization() {
        for n in 1..=7usize {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect();
            let mut realizable = BTreeSet::new();
            for mask in 0u32..(1 << pairs.len()) {
                let mut deg = vec![0usize; n];
                for (i, &(u, v)) in pairs.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        deg[u] += 1;
                        deg[v] += 1;
                    }
                }
                deg.sort_unstable_by(|a, b| b.cmp(a));
                realizable.insert(deg);
            }
            // include entries >= n to exercise the max-degree guard
            for seq in sequences(n, n) {
                let expected = realizable.contains(&seq);
                assert_eq!(
                    DegreeSequence::new(seq.clone()).is_graphical(),
                    expected,
                    "{seq:?}"
                );
            }
        }
    }

    #[test]
    fn edge_list_triangle() {
        let g = Graph::from_edges(3, [(1, 2), (0, 1), (2, 0)]).unwrap();
        let mut s = String::new();
        g.write_edge_list(&mut s).unwrap();
        assert_eq!(s, "0 1\n0 2\n1 2\n");
        assert_eq!(Graph::read_edge_list(&s).unwrap(), g);
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        let err = Graph::read_edge_list("0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = Graph::read_edge_list("0 1\n\n1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = Graph::read_edge_list("0 1\n2 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = Graph::read_edge_list("0 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn isolated_tail_nodes_round_trip() {
        let g = Graph::from_edges(5, [(0, 1)]).unwrap();
        let mut s = String::new();
        g.write_edge_list(&mut s).unwrap();
        assert_eq!(s, "# nodes 5\n0 1\n");
        assert_eq!(Graph::read_edge_list(&s).unwrap(), g);
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..30).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..80).prop_map(move |pairs| {
                let mut g = Graph::new(n);
                for (u, v) in pairs {
                    if u != v {
                        g.add_edge(u, v).unwrap();
                    }
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn edge_list_round_trip(g in arb_graph()) {
            let mut s = String::new();
            g.write_edge_list(&mut s).unwrap();
            prop_assert_eq!(Graph::read_edge_list(&s).unwrap(), g);
        }

        #[test]
        fn handshake_and_symmetry(g in arb_graph()) {
            prop_assert_eq!(g.degrees().sum(), 2 * g.edge_count());
            for u in 0..g.node_count() {
                prop_assert!(!g.has_edge(u, u));
                for &v in g.neighbors(u) {
                    prop_assert!(g.has_edge(v, u));
                }
            }
        }
    }
}
