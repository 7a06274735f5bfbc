//! Hierarchical MapElite archive over subgraph-count space.
//!
//! The root box is tiled by top-level cells of the initial side, created on
//! first visit. Refining a leaf splits it into `2^n` children of half the
//! side; the elite moves to the child that contains it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::family::NetworkSpec;
use crate::metrics::RunningVariance;
use crate::{Error, Result};

/// Index of a node in the archive arena.
pub type CellId = usize;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Elite {
    pub spec: NetworkSpec,
    pub fitness: f64,
    pub clustering: f64,
    /// Seed that reproduces the stored realization.
    pub realization_seed: u64,
    /// Iteration at which this elite was accepted; 0 for the seeds.
    pub iteration: u64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ArchiveCell {
    /// Lower corner; the cell covers `[lo, lo + side)` in every dimension.
    pub lo: Vec<i64>,
    pub side: i64,
    pub depth: u32,
    pub elite: Option<Elite>,
    pub interest: RunningVariance,
    pub visits: u64,
}

impl ArchiveCell {
    fn empty(lo: Vec<i64>, side: i64, depth: u32) -> Self {
        ArchiveCell {
            lo,
            side,
            depth,
            elite: None,
            interest: RunningVariance::new(),
            visits: 0,
        }
    }

    pub fn contains(&self, counts: &[i64]) -> bool {
        counts
            .iter()
            .zip(&self.lo)
            .all(|(&c, &lo)| c >= lo && c < lo + self.side)
    }

    pub fn elite_fitness(&self) -> Option<f64> {
        self.elite.as_ref().map(|e| e.fitness)
    }
}

#[derive(Clone, Debug)]
enum Node {
    Leaf(ArchiveCell),
    Split { lo: Vec<i64>, side: i64, children: Vec<CellId> },
}

/// Outcome of a lookup.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Located {
    pub cell: CellId,
    pub discovered: bool,
}

#[derive(Clone, Debug)]
pub struct ArchiveTree {
    ceilings: Vec<i64>,
    initial_side: i64,
    nodes: Vec<Node>,
    top: BTreeMap<Vec<i64>, CellId>,
    occupied: BTreeSet<CellId>,
    leaf_count: u64,
    weighted_side_sum: f64,
    new_cells: u64,
    revisits: u64,
    total_new_cells: u64,
    total_revisits: u64,
    refinements: u64,
}

impl ArchiveTree {
    /// `ceilings[i]` is the largest admissible count in dimension `i`.
    pub fn new(ceilings: Vec<i64>, initial_side: i64) -> Result<Self> {
        if initial_side < 1 || (initial_side & (initial_side - 1)) != 0 {
            return Err(Error::Config("cell size must be a power of two".into()));
        }
        if ceilings.is_empty() || ceilings.iter().any(|&c| c < 0) {
            return Err(Error::Config("archive needs non-negative ceilings".into()));
        }
        Ok(ArchiveTree {
            ceilings,
            initial_side,
            nodes: Vec::new(),
            top: BTreeMap::new(),
            occupied: BTreeSet::new(),
            leaf_count: 0,
            weighted_side_sum: 0.0,
            new_cells: 0,
            revisits: 0,
            total_new_cells: 0,
            total_revisits: 0,
            refinements: 0,
        })
    }

    pub fn dims(&self) -> usize {
        self.ceilings.len()
    }

    pub fn ceilings(&self) -> &[i64] {
        &self.ceilings
    }

    pub fn initial_side(&self) -> i64 {
        self.initial_side
    }

    pub fn in_bounds(&self, counts: &[i64]) -> bool {
        counts.len() == self.ceilings.len()
            && counts.iter().zip(&self.ceilings).all(|(&c, &m)| (0..=m).contains(&c))
    }

    fn leaf_for(&self, counts: &[i64]) -> Option<CellId> {
        let key: Vec<i64> = counts.iter().map(|c| c.div_euclid(self.initial_side)).collect();
        let mut id = *self.top.get(&key)?;
        loop {
            match &self.nodes[id] {
                Node::Leaf(_) => return Some(id),
                Node::Split { lo, side, children } => {
                    id = children[child_index(lo, *side, counts)];
                }
            }
        }
    }

    /// Leaf containing `counts`, without touching any counter.
    pub fn find(&self, counts: &[i64]) -> Option<&ArchiveCell> {
        self.leaf_for(counts).map(|id| self.cell(id))
    }

    /// Unique leaf containing `spec`. A first visit counts as a discovery,
    /// any later one as a revisit.
    pub fn locate(&mut self, spec: &NetworkSpec) -> Result<Located> {
        let counts = &spec.counts;
        if !self.in_bounds(counts) {
            return Err(Error::Config("specification outside the archive box".into()));
        }
        let id = match self.leaf_for(counts) {
            Some(id) => id,
            None => {
                let key: Vec<i64> = counts.iter().map(|c| c.div_euclid(self.initial_side)).collect();
                let lo = key.iter().map(|k| k * self.initial_side).collect();
                let id = self.nodes.len();
                self.nodes.push(Node::Leaf(ArchiveCell::empty(lo, self.initial_side, 0)));
                self.top.insert(key, id);
                self.leaf_count += 1;
                self.weighted_side_sum += self.initial_side as f64;
                id
            }
        };
        let cell = self.cell_mut(id);
        let discovered = cell.visits == 0;
        cell.visits += 1;
        if discovered {
            self.new_cells += 1;
            self.total_new_cells += 1;
        } else {
            self.revisits += 1;
            self.total_revisits += 1;
        }
        Ok(Located { cell: id, discovered })
    }

    pub fn cell(&self, id: CellId) -> &ArchiveCell {
        match &self.nodes[id] {
            Node::Leaf(c) => c,
            Node::Split { .. } => panic!("cell {id} is not a leaf"),
        }
    }

    fn cell_mut(&mut self, id: CellId) -> &mut ArchiveCell {
        match &mut self.nodes[id] {
            Node::Leaf(c) => c,
            Node::Split { .. } => panic!("cell {id} is not a leaf"),
        }
    }

    /// Records `interest` and keeps `candidate` if strictly fitter than the
    /// incumbent. Returns whether the elite was replaced.
    pub fn offer(&mut self, id: CellId, candidate: Elite, interest: f64) -> bool {
        let cell = self.cell_mut(id);
        debug_assert!(cell.contains(&candidate.spec.counts));
        cell.interest.push(interest);
        let better = cell.elite_fitness().is_none_or(|f| candidate.fitness > f);
        if better {
            cell.elite = Some(candidate);
            self.occupied.insert(id);
        }
        better
    }

    /// Discoveries and revisits in the current epoch.
    pub fn epoch(&self) -> (u64, u64) {
        (self.new_cells, self.revisits)
    }

    pub fn totals(&self) -> (u64, u64) {
        (self.total_new_cells, self.total_revisits)
    }

    pub fn refinements(&self) -> u64 {
        self.refinements
    }

    pub fn epoch_ratio(&self) -> f64 {
        self.revisits as f64 / self.new_cells.max(1) as f64
    }

    /// Splits the most interesting occupied leaves when revisits outpace
    /// discoveries by more than `threshold`. Returns the number split.
    pub fn maybe_refine(&mut self, threshold: f64, fraction: f64) -> usize {
        if self.epoch_ratio() <= threshold {
            return 0;
        }
        self.new_cells = 0;
        self.revisits = 0;
        let occupied = self.occupied_leaves();
        let quota = ((fraction * occupied.len() as f64) as usize).max(1);
        let mut ranked: Vec<CellId> = occupied
            .into_iter()
            .filter(|&id| self.cell(id).side > 1)
            .collect();
        ranked.sort_by(|&a, &b| {
            let (ca, cb) = (self.cell(a), self.cell(b));
            cb.interest
                .variance()
                .total_cmp(&ca.interest.variance())
                .then_with(|| ca.lo.cmp(&cb.lo))
                .then_with(|| cb.side.cmp(&ca.side))
        });
        ranked.truncate(quota);
        for &id in &ranked {
            self.split(id);
        }
        self.refinements += ranked.len() as u64;
        ranked.len()
    }

    /// Splits leaf `id` into `2^n` children of half its side.
    pub fn split(&mut self, id: CellId) {
        let Node::Leaf(cell) = &self.nodes[id] else {
            return;
        };
        if cell.side <= 1 {
            return;
        }
        let cell = cell.clone();
        let half = cell.side / 2;
        let dims = cell.lo.len();
        let base = self.nodes.len();
        let children: Vec<CellId> = (base..base + (1 << dims)).collect();
        for mask in 0..1usize << dims {
            let lo: Vec<i64> = (0..dims)
                .map(|d| cell.lo[d] + if mask >> d & 1 == 1 { half } else { 0 })
                .collect();
            self.nodes.push(Node::Leaf(ArchiveCell::empty(lo, half, cell.depth + 1)));
        }
        if let Some(elite) = cell.elite {
            let child = children[child_index(&cell.lo, cell.side, &elite.spec.counts)];
            let c = self.cell_mut(child);
            c.visits = 1;
            c.elite = Some(elite);
            self.occupied.remove(&id);
            self.occupied.insert(child);
        }
        self.leaf_count += (1u64 << dims) - 1;
        // children hold the parent's volume at half the side
        self.weighted_side_sum -= self.volume_weight(cell.side) / 2.0;
        self.nodes[id] = Node::Split {
            lo: cell.lo,
            side: cell.side,
            children,
        };
    }

    /// `(side, 2 * side)` for the leaf `id`.
    pub fn mutation_band(&self, id: CellId) -> (u32, u32) {
        let side = self.cell(id).side as u32;
        (side, 2 * side)
    }

    /// Leaves holding an elite, in arena order.
    pub fn occupied_leaves(&self) -> Vec<CellId> {
        self.occupied.iter().copied().collect()
    }

    /// The `i`-th occupied leaf in arena order.
    pub fn occupied_nth(&self, i: usize) -> Option<CellId> {
        self.occupied.iter().nth(i).copied()
    }

    /// Materialized leaves, occupied or not.
    pub fn leaf_count(&self) -> u64 {
        self.leaf_count
    }

    pub fn elite_count(&self) -> usize {
        self.occupied.len()
    }

    /// Number of top-level cells needed to tile the root box.
    pub fn top_level_cells(&self) -> f64 {
        self.ceilings
            .iter()
            .map(|&m| (m / self.initial_side + 1) as f64)
            .product()
    }

    // side times the leaf's volume relative to a top-level cell
    fn volume_weight(&self, side: i64) -> f64 {
        let rel = side as f64 / self.initial_side as f64;
        side as f64 * libm::pow(rel, self.dims() as f64)
    }

    /// Side of the containing leaf averaged over every point of the top-level
    /// tiling, including cells never visited. Splitting only ever lowers it.
    pub fn mean_leaf_side(&self) -> f64 {
        let cells = self.top_level_cells();
        let untouched = cells - self.top.len() as f64;
        (untouched * self.initial_side as f64 + self.weighted_side_sum) / cells
    }

    /// Mean side of the leaves holding an elite.
    pub fn mean_occupied_side(&self) -> f64 {
        let occ = self.occupied_leaves();
        if occ.is_empty() {
            return self.initial_side as f64;
        }
        occ.iter().map(|&id| self.cell(id).side as f64).sum::<f64>() / occ.len() as f64
    }

    /// Occupied leaves sorted by lower corner, then side.
    pub fn snapshot(&self) -> Vec<ArchiveCell> {
        let mut cells: Vec<ArchiveCell> = self
            .occupied_leaves()
            .into_iter()
            .map(|id| self.cell(id).clone())
            .collect();
        cells.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.side.cmp(&a.side)));
        cells
    }

    /// Checks that the materialized leaves under each top-level cell tile
    /// it exactly.
    pub fn check_tiling(&self) -> bool {
        self.top.values().all(|&id| {
            let (lo, side) = match &self.nodes[id] {
                Node::Leaf(c) => (c.lo.clone(), c.side),
                Node::Split { lo, side, .. } => (lo.clone(), *side),
            };
            let volume: i128 = (0..lo.len()).map(|_| side as i128).product();
            self.subtree_volume(id) == volume
        })
    }

    fn subtree_volume(&self, id: CellId) -> i128 {
        match &self.nodes[id] {
            Node::Leaf(c) => (0..c.lo.len()).map(|_| c.side as i128).product(),
            Node::Split { lo, side, children } => children
                .iter()
                .map(|&ch| {
                    let child_lo = match &self.nodes[ch] {
                        Node::Leaf(c) => &c.lo,
                        Node::Split { lo, .. } => lo,
                    };
                    debug_assert!(child_lo.iter().zip(lo).all(|(c, p)| c >= p && *c < p + side));
                    self.subtree_volume(ch)
                })
                .sum(),
        }
    }
}

fn child_index(lo: &[i64], side: i64, counts: &[i64]) -> usize {
    let half = side / 2;
    (0..lo.len())
        .filter(|&d| counts[d] >= lo[d] + half)
        .fold(0, |m, d| m | 1 << d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Context;
    use proptest::prelude::*;

    fn spec(counts: &[i64]) -> NetworkSpec {
        NetworkSpec::new(counts.to_vec(), Context::new(100, 4, 0.0).unwrap())
    }

    fn elite(counts: &[i64], fitness: f64) -> Elite {
        Elite {
            spec: spec(counts),
            fitness,
            clustering: 0.0,
            realization_seed: 0,
            iteration: 0,
        }
    }

    fn tree() -> ArchiveTree {
        ArchiveTree::new(vec![255, 255], 64).unwrap()
    }

    #[test]
    fn locate_counts_discoveries_and_revisits() {
        let mut t = tree();
        let a = t.locate(&spec(&[3, 5])).unwrap();
        assert!(a.discovered);
        let b = t.locate(&spec(&[3, 5])).unwrap();
        assert_eq!((b.cell, b.discovered), (a.cell, false));
        let c = t.locate(&spec(&[60, 0])).unwrap();
        assert_eq!(c.cell, a.cell);
        assert_eq!(t.epoch(), (1, 2));
        assert!(t.locate(&spec(&[256, 0])).is_err());
        assert!(t.locate(&spec(&[-1, 0])).is_err());
    }

    #[test]
    fn offer_keeps_strictly_fitter() {
        let mut t = tree();
        let id = t.locate(&spec(&[1, 1])).unwrap().cell;
        assert!(t.offer(id, elite(&[1, 1], -0.001), 1.0));
        assert!(!t.offer(id, elite(&[2, 2], -0.002), 2.0));
        assert!(!t.offer(id, elite(&[3, 3], -0.001), 3.0));
        assert_eq!(t.cell(id).elite.as_ref().unwrap().spec.counts, [1, 1]);
        assert!(t.offer(id, elite(&[4, 4], 0.0), 4.0));
        assert_eq!(t.cell(id).interest.count(), 4);
    }

    fn fill(t: &mut ArchiveTree, discoveries: u64, revisits: u64) -> CellId {
        let id = t.locate(&spec(&[10, 10])).unwrap().cell;
        t.offer(id, elite(&[10, 10], 0.0), 0.0);
        for i in 1..discoveries {
            let c = [64 * i as i64 % 256, 64 * (i as i64 / 4)];
            let got = t.locate(&spec(&c)).unwrap();
            t.offer(got.cell, elite(&c, 0.0), 0.0);
        }
        for _ in 0..revisits {
            t.locate(&spec(&[10, 10])).unwrap();
        }
        id
    }

    #[test]
    fn refinement_threshold_is_strict() {
        let mut t = tree();
        fill(&mut t, 4, 10);
        assert_eq!(t.epoch(), (4, 10));
        assert_eq!(t.maybe_refine(2.0, 0.05), 1);
        assert_eq!(t.epoch(), (0, 0));

        let mut t = tree();
        fill(&mut t, 4, 8);
        assert_eq!(t.maybe_refine(2.0, 0.05), 0);
        assert_eq!(t.epoch(), (4, 8));
    }

    #[test]
    fn split_halves_and_inherits() {
        let mut t = tree();
        let id = t.locate(&spec(&[40, 10])).unwrap().cell;
        t.offer(id, elite(&[40, 10], -0.5), 0.3);
        assert_eq!(t.mutation_band(id), (64, 128));
        t.split(id);
        let child = t.locate(&spec(&[40, 10])).unwrap();
        assert!(!child.discovered);
        let cell = t.cell(child.cell);
        assert_eq!((cell.side, cell.depth, cell.lo.as_slice()), (32, 1, &[32, 0][..]));
        assert_eq!(cell.elite_fitness(), Some(-0.5));
        assert_eq!(cell.interest.count(), 0);
        assert_eq!(t.mutation_band(child.cell), (32, 64));
        let sibling = t.locate(&spec(&[0, 0])).unwrap();
        assert!(sibling.discovered);
        assert!(t.cell(sibling.cell).elite.is_none());
        assert!(t.check_tiling());
    }

    #[test]
    fn unit_cells_are_not_split() {
        let mut t = ArchiveTree::new(vec![3], 1).unwrap();
        let id = t.locate(&spec(&[2])).unwrap().cell;
        t.offer(id, elite(&[2], 0.0), 0.0);
        for _ in 0..5 {
            t.locate(&spec(&[2])).unwrap();
        }
        assert_eq!(t.maybe_refine(2.0, 1.0), 0);
        assert_eq!(t.mutation_band(id), (1, 2));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(ArchiveTree::new(vec![10], 48).is_err());
        assert!(ArchiveTree::new(vec![10], 0).is_err());
    }

    proptest! {
        #[test]
        fn random_refinement_keeps_tiling(
            ops in proptest::collection::vec((0i64..200, 0i64..200, any::<bool>()), 1..60)
        ) {
            let mut t = ArchiveTree::new(vec![199, 199], 64).unwrap();
            let mut last_mean = t.mean_leaf_side();
            for (x, y, split) in ops {
                let got = t.locate(&spec(&[x, y])).unwrap();
                t.offer(got.cell, elite(&[x, y], -((x + y) as f64)), x as f64);
                if split {
                    t.split(got.cell);
                }
                let mean = t.mean_leaf_side();
                prop_assert!(mean <= last_mean + 1e-9);
                last_mean = mean;
                prop_assert!(t.check_tiling());
                let cell = t.find(&[x, y]).unwrap();
                prop_assert!(cell.contains(&[x, y]));
                prop_assert!(cell.side.count_ones() == 1);
            }
            for cell in t.snapshot() {
                let e = cell.elite.as_ref().unwrap();
                prop_assert!(cell.contains(&e.spec.counts));
            }
        }
    }
}
