use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::family::{Shape, SubgraphFamily};
use crate::graph::Graph;
use crate::{Error, Result};

/// Counts per family kind, in family order.
///
/// K4 and diag-squares are induced occurrences. A triangle is counted only
/// when no outside node is adjacent to two of its corners, i.e. when it is not
/// part of a K4 or diag-square. Squares and pentagons are induced
/// (chordless) cycles, regardless of overlaps with other kinds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubgraphCensus {
    pub counts: Vec<u64>,
}

#[derive(Default)]
struct ShapeCounts {
    k4: u64,
    diag: u64,
    free_triangles: u64,
    squares: u64,
    pentagons: u64,
}

fn count_shapes(g: &Graph, want_cycles: bool) -> ShapeCounts {
    let n = g.node_count();
    let mut out = ShapeCounts::default();
    let mut common = Vec::new();
    // K4 and diag-squares through their shared edge: for edge uv, the common
    // neighbours c1, c2 give K4 when adjacent and a diag-square otherwise.
    let mut k4_times_6 = 0u64;
    for (u, v) in g.edges() {
        common.clear();
        intersect_into(g.neighbors(u), g.neighbors(v), &mut common);
        for i in 0..common.len() {
            for j in i + 1..common.len() {
                if g.has_edge(common[i], common[j]) {
                    k4_times_6 += 1;
                } else {
                    out.diag += 1;
                }
            }
        }
        // triangles uvw with w > v, free when no outside node sees two corners
        for &w in common.iter().filter(|&&w| w > v) {
            if is_free_triangle(g, u, v, w) {
                out.free_triangles += 1;
            }
        }
    }
    out.k4 = k4_times_6 / 6;

    if !want_cycles {
        return out;
    }
    // Induced 4-cycles: for each non-adjacent pair (a, c), a < c, every
    // non-adjacent pair of common neighbours closes one. Each cycle has two
    // such diagonals.
    let mut paths: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut sq2 = 0u64;
    for a in 0..n {
        paths.clear();
        for &b in g.neighbors(a) {
            for &c in g.neighbors(b) {
                if c > a && !g.has_edge(a, c) {
                    paths.entry(c).or_default().push(b);
                }
            }
        }
        for mids in paths.values() {
            for i in 0..mids.len() {
                for j in i + 1..mids.len() {
                    if !g.has_edge(mids[i], mids[j]) {
                        sq2 += 1;
                    }
                }
            }
        }
    }
    out.squares = sq2 / 2;

    // Induced 5-cycles a-b-c-d-e-a with a the smallest vertex and b < e.
    for a in 0..n {
        for &b in g.neighbors(a).iter().filter(|&&b| b > a) {
            for &c in g.neighbors(b).iter().filter(|&&c| c > a) {
                if g.has_edge(a, c) {
                    continue;
                }
                for &d in g.neighbors(c).iter().filter(|&&d| d > a && d != b) {
                    if g.has_edge(a, d) || g.has_edge(b, d) {
                        continue;
                    }
                    for &e in g.neighbors(d).iter().filter(|&&e| e > b && e != c) {
                        if g.has_edge(a, e) && !g.has_edge(b, e) && !g.has_edge(c, e) {
                            out.pentagons += 1;
                        }
                    }
                }
            }
        }
    }
    out
}

fn intersect_into(a: &[usize], b: &[usize], out: &mut Vec<usize>) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

fn is_free_triangle(g: &Graph, a: usize, b: usize, c: usize) -> bool {
    // an outside node adjacent to two corners would be a second common
    // neighbour of one of the sides
    g.common_neighbor_count(a, b) == 1
        && g.common_neighbor_count(b, c) == 1
        && g.common_neighbor_count(a, c) == 1
}

/// Census of `g` over `family`. Every kind must be one of the five built-in
/// shapes.
pub fn subgraph_census(g: &Graph, family: &SubgraphFamily) -> Result<SubgraphCensus> {
    let shapes = family
        .kinds()
        .iter()
        .map(|k| k.shape().ok_or_else(|| Error::UnsupportedFamily(k.name.clone())))
        .collect::<Result<Vec<_>>>()?;
    let want_cycles = shapes
        .iter()
        .any(|s| matches!(s, Shape::Square | Shape::Pentagon));
    let c = count_shapes(g, want_cycles);
    let counts = shapes
        .iter()
        .map(|s| match s {
            Shape::K4 => c.k4,
            Shape::DiagSquare => c.diag,
            Shape::Triangle => c.free_triangles,
            Shape::Square => c.squares,
            Shape::Pentagon => c.pentagons,
        })
        .collect();
    Ok(SubgraphCensus { counts })
}

impl SubgraphCensus {
    pub fn zeros(len: usize) -> Self {
        SubgraphCensus {
            counts: vec![0; len],
        }
    }
}
