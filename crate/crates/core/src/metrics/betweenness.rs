use alloc::vec;
use alloc::vec::Vec;

use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq)]
pub struct BetweennessSummary {
    pub per_node: Vec<f64>,
    /// Population standard deviation of `per_node`.
    pub dispersion: f64,
}

/// Exact unnormalized shortest-path betweenness (Brandes accumulation).
/// Each unordered pair of endpoints contributes once; unreachable pairs
/// contribute nothing.
pub fn betweenness(g: &Graph) -> BetweennessSummary {
    let n = g.node_count();
    // flat adjacency keeps the n breadth-first searches cache friendly
    let mut start = Vec::with_capacity(n + 1);
    let mut adj: Vec<u32> = Vec::with_capacity(2 * g.edge_count());
    start.push(0);
    for v in 0..n {
        adj.extend(g.neighbors(v).iter().map(|&w| w as u32));
        start.push(adj.len());
    }
    let mut score = vec![0.0f64; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![u32::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut order: Vec<u32> = Vec::with_capacity(n);
    for s in 0..n {
        sigma.fill(0.0);
        dist.fill(u32::MAX);
        delta.fill(0.0);
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        order.push(s as u32);
        // `order` doubles as the queue
        let mut head = 0;
        while head < order.len() {
            let v = order[head] as usize;
            head += 1;
            let dv = dist[v] + 1;
            for &w in &adj[start[v]..start[v + 1]] {
                let w = w as usize;
                if dist[w] == u32::MAX {
                    dist[w] = dv;
                    order.push(w as u32);
                }
                if dist[w] == dv {
                    sigma[w] += sigma[v];
                }
            }
        }
        for &w in order.iter().rev() {
            let w = w as usize;
            let coef = (1.0 + delta[w]) / sigma[w];
            let dw = dist[w];
            for &v in &adj[start[w]..start[w + 1]] {
                let v = v as usize;
                if dist[v].wrapping_add(1) == dw {
                    delta[v] += sigma[v] * coef;
                }
            }
            if w != s {
                score[w] += delta[w];
            }
        }
    }
    // every pair was seen from both endpoints
    for x in score.iter_mut() {
        *x /= 2.0;
    }
    let dispersion = std_dev(&score);
    BetweennessSummary {
        per_node: score,
        dispersion,
    }
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    libm::sqrt(xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::testutil::random_graph;

    /// All-pairs BFS path counting: for each pair s < t, node v lies on
    /// sigma_sv * sigma_vt of the sigma_st shortest paths iff
    /// d(s,v) + d(v,t) = d(s,t).
    pub(crate) fn brute_betweenness(g: &Graph) -> Vec<f64> {
        let n = g.node_count();
        let mut d = vec![vec![usize::MAX; n]; n];
        let mut c = vec![vec![0u128; n]; n];
        for s in 0..n {
            d[s][s] = 0;
            c[s][s] = 1;
            let mut frontier = vec![s];
            let mut level = 0;
            while !frontier.is_empty() {
                level += 1;
                let mut next = Vec::new();
                for &v in &frontier {
                    for &w in g.neighbors(v) {
                        if d[s][w] == usize::MAX {
                            d[s][w] = level;
                            next.push(w);
                        }
                        if d[s][w] == level {
                            c[s][w] += c[s][v];
                        }
                    }
                }
                frontier = next;
            }
        }
        let mut out = vec![0.0; n];
        for s in 0..n {
            for t in s + 1..n {
                if d[s][t] == usize::MAX {
                    continue;
                }
                for v in 0..n {
                    if v == s || v == t || d[s][v] == usize::MAX || d[v][t] == usize::MAX {
                        continue;
                    }
                    if d[s][v] + d[v][t] == d[s][t] {
                        out[v] += (c[s][v] * c[v][t]) as f64 / c[s][t] as f64;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn star_and_cycle() {
        let star = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let b = betweenness(&star);
        assert_eq!(b.per_node, [6.0, 0.0, 0.0, 0.0, 0.0]);
        let c5 = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let b = betweenness(&c5);
        assert!(b.per_node.iter().all(|&x| (x - b.per_node[0]).abs() < 1e-12));
        assert!(b.dispersion.abs() < 1e-12);
        // Petersen graph is vertex-transitive
        let petersen = Graph::from_edges(
            10,
            [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
             (5, 7), (7, 9), (6, 9), (6, 8), (5, 8)],
        )
        .unwrap();
        assert!(betweenness(&petersen).dispersion.abs() < 1e-9);
    }

    #[test]
    fn disconnected_pairs_contribute_nothing() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        assert_eq!(betweenness(&g).per_node, [0.0, 1.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn agrees_with_path_counting() {
        for seed in 0..20 {
            let g = random_graph(5 + (seed as usize % 40), 0.15, seed);
            let fast = betweenness(&g).per_node;
            let slow = brute_betweenness(&g);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-9, "seed {seed}: {a} vs {b}");
            }
        }
    }
}
