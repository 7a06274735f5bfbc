//! Structural measurements on realized graphs.

mod betweenness;
mod census;
mod variance;

pub use betweenness::{betweenness, BetweennessSummary};
pub use census::{subgraph_census, SubgraphCensus};
pub use variance::RunningVariance;

use crate::graph::Graph;

/// Number of triangles in `g`.
pub fn triangle_count(g: &Graph) -> u64 {
    let mut t = 0;
    for (u, v) in g.edges() {
        // count each triangle once via its largest vertex w > v
        let nu = g.neighbors(u);
        let nv = g.neighbors(v);
        let (a, b) = (&nu[nu.partition_point(|&x| x <= v)..], &nv[nv.partition_point(|&x| x <= v)..]);
        t += crate::graph::sorted_intersection_count(a, b) as u64;
    }
    t
}

/// Connected triples, `sum_v d_v (d_v - 1) / 2`.
pub fn connected_triples(g: &Graph) -> u64 {
    (0..g.node_count())
        .map(|v| {
            let d = g.degree(v) as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum()
}

/// Global clustering `3 T / triples`; `None` when the graph has no path of
/// length two.
pub fn global_clustering(g: &Graph) -> Option<f64> {
    let triples = connected_triples(g);
    (triples > 0).then(|| 3.0 * triangle_count(g) as f64 / triples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_regular;

    #[test]
    fn clustering_examples() {
        let k3 = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(global_clustering(&k3), Some(1.0));
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(global_clustering(&path), Some(0.0));
        assert_eq!(global_clustering(&Graph::from_edges(2, [(0, 1)]).unwrap()), None);
    }

    #[test]
    fn clustering_matches_triangle_formula() {
        let g = random_regular(60, 3, 1);
        let c = global_clustering(&g).unwrap();
        assert_eq!(connected_triples(&g), 60 * 3);
        assert!((c - 3.0 * triangle_count(&g) as f64 / 180.0).abs() < 1e-15);
        // 700 triangles in a 7-regular N=1000 graph
        assert_eq!(3.0 * 700.0 / (1000.0 * 21.0), 0.1);
    }
}
