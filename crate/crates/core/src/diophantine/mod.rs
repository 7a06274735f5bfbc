//! Exact mutations: integer count changes that keep the total number of
//! triangles and edges fixed.
//!
//! A mutation solves `A x = b` where the first two rows of `A` hold the
//! per-kind triangle and edge counts (with right-hand side zero) and the third
//! row selects the enforced kinds, whose summed change must equal the signed
//! mutation size. The catalog enumerates every enforced subset of one to three
//! kinds and every signed size, keeping the minimum-norm solution of each.

pub mod lattice;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;


use crate::family::{NetworkSpec, SubgraphFamily};
use crate::{Error, Result};

/// Largest enforced subset, matching mutations that involve 1 to 3 kinds.
pub const MAX_ENFORCED: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub a: Vec<Vec<i64>>,
    pub b: Vec<i64>,
}

impl ConstraintSystem {
    /// Conservation rows plus a selector row over `enforced` with signed
    /// right-hand side `size`.
    pub fn new(family: &SubgraphFamily, enforced: &[usize], size: i64) -> Self {
        let mut selector = vec![0; family.len()];
        for &i in enforced {
            selector[i] = 1;
        }
        ConstraintSystem {
            a: vec![family.triangle_row(), family.edge_row(), selector],
            b: vec![0, 0, size],
        }
    }

    pub fn is_satisfied_by(&self, x: &[i64]) -> bool {
        self.a
            .iter()
            .zip(&self.b)
            .all(|(row, &rhs)| crate::family::dot(row, x) == rhs)
    }
}

/// Minimum Euclidean norm integer solution, or `None` when the enforced change
/// cannot be compensated with integer counts.
pub fn solve_min_norm(system: &ConstraintSystem) -> Option<Vec<i64>> {
    lattice::min_norm_solution(&system.a, &system.b)
}

/// One catalog entry.
///
/// `size` is the magnitude of the enforced change that produced `delta`
/// (the smallest one when several did); `enforced` lists the kinds it was
/// enforced on.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MutationVector {
    pub delta: Vec<i64>,
    pub size: u32,
    pub enforced: Vec<usize>,
}

impl MutationVector {
    /// Kinds whose count actually changes.
    pub fn touched(&self) -> Vec<usize> {
        self.delta
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn max_abs(&self) -> i64 {
        self.delta.iter().map(|d| d.abs()).max().unwrap_or(0)
    }

    pub fn negated(&self) -> Self {
        MutationVector {
            delta: self.delta.iter().map(|d| -d).collect(),
            size: self.size,
            enforced: self.enforced.clone(),
        }
    }

    pub fn conserves(&self, family: &SubgraphFamily) -> bool {
        family.triangle_contribution(&self.delta) == 0 && family.edge_contribution(&self.delta) == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationCatalog {
    entries: Vec<MutationVector>,
    by_size: BTreeMap<u32, Vec<usize>>,
    max_size: u32,
}

fn subsets(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for len in 1..=max_len.min(n) {
        rec(0, n, len, &mut Vec::new(), &mut out);
    }
    out
}

impl MutationCatalog {
    /// Enumerates enforced subsets of up to three kinds and signed sizes
    /// `1..=max_size`, keeping nonzero minimum-norm solutions whose largest
    /// component stays within `max_size`. The result is deduplicated, closed
    /// under negation and ordered by `(size, delta)`.
    pub fn build(family: &SubgraphFamily, max_size: u32) -> Result<Self> {
        if max_size == 0 {
            return Err(Error::Config("catalog max_size must be at least 1".into()));
        }
        let limit = i64::from(max_size);
        // delta -> (size, enforced)
        let mut best: BTreeMap<Vec<i64>, (u32, Vec<usize>)> = BTreeMap::new();
        let mut consider = |delta: Vec<i64>, size: u32, enforced: &[usize]| {
            let key = (size, enforced.len(), enforced.to_vec());
            match best.get(&delta) {
                Some((s, e)) if (*s, e.len(), e.clone()) <= key => {}
                _ => {
                    best.insert(delta, (size, enforced.to_vec()));
                }
            }
        };
        for enforced in subsets(family.len(), MAX_ENFORCED) {
            for size in 1..=max_size {
                for sign in [1i64, -1] {
                    let sys = ConstraintSystem::new(family, &enforced, sign * i64::from(size));
                    let Some(x) = solve_min_norm(&sys) else {
                        continue;
                    };
                    if x.iter().all(|&v| v == 0) || x.iter().any(|v| v.abs() > limit) {
                        continue;
                    }
                    let neg: Vec<i64> = x.iter().map(|v| -v).collect();
                    consider(x, size, &enforced);
                    consider(neg, size, &enforced);
                }
            }
        }
        let entries = best
            .into_iter()
            .map(|(delta, (size, enforced))| MutationVector {
                delta,
                size,
                enforced,
            })
            .collect();
        Ok(Self::from_entries(entries, max_size))
    }

    /// Wraps prebuilt entries (e.g. loaded from disk), re-establishing the
    /// ordering and size index.
    pub fn from_entries(mut entries: Vec<MutationVector>, max_size: u32) -> Self {
        entries.sort_by(|a, b| (a.size, &a.delta).cmp(&(b.size, &b.delta)));
        let mut seen = BTreeSet::new();
        entries.retain(|e| seen.insert(e.delta.clone()));
        let mut by_size: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            by_size.entry(e.size).or_default().push(i);
        }
        MutationCatalog {
            entries,
            by_size,
            max_size,
        }
    }

    pub fn entries(&self) -> &[MutationVector] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_size(&self) -> u32 {
        self.max_size
    }

    pub fn sizes(&self) -> impl Iterator<Item = u32> + '_ {
        self.by_size.keys().copied()
    }

    pub fn size_histogram(&self) -> BTreeMap<u32, usize> {
        self.by_size.iter().map(|(&s, v)| (s, v.len())).collect()
    }

    /// Histogram over the number of enforced kinds (1 to 3).
    pub fn enforced_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for e in &self.entries {
            *h.entry(e.enforced.len()).or_insert(0) += 1;
        }
        h
    }

    /// Histogram over the number of kinds with a nonzero change.
    pub fn touched_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for e in &self.entries {
            *h.entry(e.touched().len()).or_insert(0) += 1;
        }
        h
    }

    pub fn contains(&self, delta: &[i64]) -> bool {
        self.entries.iter().any(|e| e.delta == delta)
    }

    /// Uniform draw among entries with `lo <= size <= hi`. When the band is
    /// empty, draws among the entries of the nearest available size, ties
    /// going to the smaller size.
    pub fn sample<R: rand::Rng + ?Sized>(&self, lo: u32, hi: u32, rng: &mut R) -> Result<&MutationVector> {
        if self.entries.is_empty() {
            return Err(Error::EmptyCatalog);
        }
        let in_band: usize = self.by_size.range(lo..=hi).map(|(_, v)| v.len()).sum();
        if in_band > 0 {
            let mut pick = rng.gen_range(0..in_band);
            for (_, idx) in self.by_size.range(lo..=hi) {
                if pick < idx.len() {
                    return Ok(&self.entries[idx[pick]]);
                }
                pick -= idx.len();
            }
            unreachable!("pick within band total");
        }
        let distance = |s: u32| if s < lo { lo - s } else { s.saturating_sub(hi) };
        let (_, idx) = self
            .by_size
            .iter()
            .min_by_key(|(&s, _)| (distance(s), s))
            .expect("nonempty catalog");
        Ok(&self.entries[idx[rng.gen_range(0..idx.len())]])
    }
}

pub fn sample_mutation<'c, R: rand::Rng + ?Sized>(
    catalog: &'c MutationCatalog,
    size_lo: u32,
    size_hi: u32,
    rng: &mut R,
) -> Result<&'c MutationVector> {
    catalog.sample(size_lo, size_hi, rng)
}

/// `spec + m`, or `None` if a count would go negative or the subgraphs would
/// no longer fit the edge budget.
pub fn apply_mutation(spec: &NetworkSpec, delta: &[i64], family: &SubgraphFamily) -> Option<NetworkSpec> {
    let counts: Vec<i64> = spec.counts.iter().zip(delta).map(|(c, d)| c + d).collect();
    if counts.iter().any(|&c| c < 0) {
        return None;
    }
    let next = NetworkSpec::new(counts, spec.context);
    next.free_edge_budget(family).ok()?;
    Some(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{Context, Shape};
    use rand::SeedableRng;

    fn default_catalog(max: u32) -> MutationCatalog {
        MutationCatalog::build(&SubgraphFamily::default_family(), max).unwrap()
    }

    #[test]
    fn worked_example_system() {
        let f = SubgraphFamily::default_family();
        let diag = f.index_of("diag_square").unwrap();
        let sys = ConstraintSystem::new(&f, &[diag], 2);
        assert_eq!(solve_min_norm(&sys), Some(vec![-1, 0, -1, 0, 2]));
    }

    #[test]
    fn odd_triangle_change_is_impossible_on_restricted_family() {
        let f = SubgraphFamily::from_shapes(&[Shape::Triangle, Shape::K4, Shape::DiagSquare]);
        let sys = ConstraintSystem::new(&f, &[0], 1);
        assert_eq!(solve_min_norm(&sys), None);
    }

    #[test]
    fn zero_enforcement_gives_zero_vector() {
        let f = SubgraphFamily::default_family();
        let sys = ConstraintSystem::new(&f, &[0, 1, 2, 3, 4], 0);
        assert_eq!(solve_min_norm(&sys), Some(vec![0; 5]));
    }

    #[test]
    fn small_catalog_respects_size() {
        let cat = default_catalog(2);
        assert!(!cat.is_empty());
        assert!(cat.entries().iter().all(|e| e.size <= 2 && e.max_abs() <= 2));
        assert!(cat.contains(&[-1, 0, -1, 0, 2]));
    }

    #[test]
    fn catalog_invariants() {
        let f = SubgraphFamily::default_family();
        let cat = default_catalog(32);
        let mut seen = BTreeSet::new();
        for e in cat.entries() {
            assert!(e.conserves(&f), "{e:?}");
            assert!(e.delta.iter().any(|&d| d != 0));
            assert!(seen.insert(e.delta.clone()), "duplicate {e:?}");
            assert!(cat.contains(&e.negated().delta));
            assert!((1..=MAX_ENFORCED).contains(&e.enforced.len()));
        }
        assert_eq!(cat, default_catalog(32));
    }

    #[test]
    fn band_sampling() {
        let cat = default_catalog(128);
        let mut rng = crate::Rng::seed_from_u64(3);
        for _ in 0..200 {
            let m = cat.sample(8, 16, &mut rng).unwrap();
            assert!((8..=16).contains(&m.size));
            assert_eq!(cat.sample(1, 1, &mut rng).unwrap().size, 1);
            assert_eq!(cat.sample(1000, 2000, &mut rng).unwrap().size, 128);
        }
    }

    #[test]
    fn nearest_size_tie_prefers_smaller() {
        let mk = |size: u32, d: i64| MutationVector { delta: vec![d], size, enforced: vec![0] };
        let cat = MutationCatalog::from_entries(vec![mk(2, 1), mk(6, 2)], 6);
        let mut rng = crate::Rng::seed_from_u64(0);
        assert_eq!(cat.sample(4, 4, &mut rng).unwrap().size, 2);
        let empty = MutationCatalog::from_entries(vec![], 6);
        assert_eq!(empty.sample(1, 2, &mut rng), Err(Error::EmptyCatalog));
    }

    #[test]
    fn apply_examples() {
        let f = SubgraphFamily::default_family();
        let ctx = Context::new(1000, 7, 0.1).unwrap();
        let spec = NetworkSpec::new(vec![61, 283, 110, 142, 87], ctx);
        let m = [-1, 0, -1, 0, 2];
        let next = apply_mutation(&spec, &m, &f).unwrap();
        assert_eq!(next.counts, [60, 283, 109, 142, 89]);
        let back = apply_mutation(&next, &[1, 0, 1, 0, -2], &f).unwrap();
        assert_eq!(back, spec);

        let no_squares = NetworkSpec::new(vec![61, 283, 0, 142, 87], ctx);
        assert_eq!(apply_mutation(&no_squares, &m, &f), None);
    }

    #[test]
    fn apply_preserves_contributions() {
        let f = SubgraphFamily::default_family();
        let ctx = Context::new(1000, 7, 0.1).unwrap();
        let spec = NetworkSpec::new(vec![100, 200, 100, 100, 50], ctx);
        for e in default_catalog(16).entries() {
            if let Some(next) = apply_mutation(&spec, &e.delta, &f) {
                assert_eq!(next.triangle_contribution(&f), spec.triangle_contribution(&f));
                assert_eq!(next.edge_contribution(&f), spec.edge_contribution(&f));
                assert_eq!(apply_mutation(&next, &e.negated().delta, &f).unwrap(), spec);
            }
        }
    }
}
