use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};

use crate::graph::Graph;
use crate::Rng;

/// G(n, p).
pub(crate) fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Uniform-ish k-regular graph by stub pairing with restarts.
pub(crate) fn random_regular(n: usize, k: usize, seed: u64) -> Graph {
    let mut rng = Rng::seed_from_u64(seed);
    'restart: loop {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| core::iter::repeat_n(v, k)).collect();
        stubs.shuffle(&mut rng);
        let mut g = Graph::new(n);
        for pair in stubs.chunks(2) {
            if pair[0] == pair[1] || !g.add_edge(pair[0], pair[1]).unwrap() {
                continue 'restart;
            }
        }
        return g;
    }
}
