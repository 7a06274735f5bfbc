//! Complex contagion with threshold `r` and per-contact transmission `beta`.
//!
//! Rounds are synchronous. A node infected in one round tries each
//! susceptible neighbour once in the next; a susceptible node with `r`
//! successful exposures from distinct neighbours becomes infected at the end
//! of that round. Infection is permanent.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::Graph;
use crate::metrics::RunningVariance;
use crate::seeding::derive_rng;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContagionParams {
    pub threshold: u32,
    pub beta: f64,
    pub seeds: usize,
    pub rounds_cap: u32,
}

impl Default for ContagionParams {
    fn default() -> Self {
        ContagionParams {
            threshold: 3,
            beta: 1.0,
            seeds: 1,
            rounds_cap: 10_000,
        }
    }
}

impl ContagionParams {
    pub fn validate(&self, nodes: usize) -> Result<()> {
        if self.threshold == 0 {
            return Err(Error::Config("threshold must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Config("beta must lie in [0, 1]".into()));
        }
        if self.seeds == 0 || self.seeds > nodes {
            return Err(Error::Config("seed count must lie in 1..=N".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContagionOutcome {
    /// Nodes ever infected, seeds included.
    pub final_size: usize,
    /// Rounds in which at least one node became infected.
    pub duration: u32,
}

/// Runs the process from a uniformly random seed set of size `p.seeds`.
pub fn simulate<R: rand::Rng + ?Sized>(g: &Graph, p: &ContagionParams, rng: &mut R) -> Result<ContagionOutcome> {
    p.validate(g.node_count())?;
    let mut seeds = rand::seq::index::sample(rng, g.node_count(), p.seeds).into_vec();
    seeds.sort_unstable();
    simulate_with_seeds(g, p, &seeds, rng)
}

/// Runs the process from the given seed set. Duplicate seeds count once.
pub fn simulate_with_seeds<R: rand::Rng + ?Sized>(
    g: &Graph,
    p: &ContagionParams,
    seeds: &[usize],
    rng: &mut R,
) -> Result<ContagionOutcome> {
    let n = g.node_count();
    if let Some(&bad) = seeds.iter().find(|&&s| s >= n) {
        return Err(Error::NodeOutOfRange { index: bad, n });
    }
    let mut infected = vec![false; n];
    let mut marks = vec![0u32; n];
    let mut fresh: Vec<usize> = Vec::new();
    for &s in seeds {
        if !infected[s] {
            infected[s] = true;
            fresh.push(s);
        }
    }
    let mut size = fresh.len();
    let mut duration = 0;
    while !fresh.is_empty() && duration < p.rounds_cap {
        let mut next = Vec::new();
        for &u in &fresh {
            for &v in g.neighbors(u) {
                if infected[v] {
                    continue;
                }
                if p.beta >= 1.0 || rng.gen_bool(p.beta) {
                    marks[v] += 1;
                    if marks[v] == p.threshold {
                        next.push(v);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        for &v in &next {
            infected[v] = true;
        }
        size += next.len();
        duration += 1;
        fresh = next;
    }
    Ok(ContagionOutcome {
        final_size: size,
        duration,
    })
}

/// One simulation of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunRecord {
    pub seed_count: usize,
    pub replicate: usize,
    pub final_size: usize,
    pub duration: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProfilePoint {
    pub seed_count: usize,
    pub var_final: f64,
    pub var_duration: f64,
    /// Sum of both variances after min-max normalization over the grid.
    pub combined: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub critical_seed_count: usize,
    pub profile: Vec<ProfilePoint>,
    pub runs: Vec<RunRecord>,
}

/// Replicate `replicate` at `seed_count`. The stream depends only on the
/// master seed, the seed count and the replicate, so every network of an
/// ensemble sees the same random numbers.
pub fn replicate(g: &Graph, base: &ContagionParams, seed_count: usize, replicate: usize, master: u64) -> Result<RunRecord> {
    let p = ContagionParams {
        seeds: seed_count,
        ..*base
    };
    let mut rng = derive_rng(master, "contagion", ((seed_count as u64) << 32) | replicate as u64);
    let out = simulate(g, &p, &mut rng)?;
    Ok(RunRecord {
        seed_count,
        replicate,
        final_size: out.final_size,
        duration: out.duration,
    })
}

/// Builds the variability profile from runs over `grid` and picks the point
/// of largest combined variance, ties going to the smaller seed count.
pub fn summarize(grid: &[usize], runs: Vec<RunRecord>) -> Result<Transition> {
    if grid.is_empty() {
        return Err(Error::Config("empty seed grid".into()));
    }
    let mut profile: Vec<ProfilePoint> = grid
        .iter()
        .map(|&s| {
            let (mut f, mut d) = (RunningVariance::new(), RunningVariance::new());
            for r in runs.iter().filter(|r| r.seed_count == s) {
                f.push(r.final_size as f64);
                d.push(r.duration as f64);
            }
            ProfilePoint {
                seed_count: s,
                var_final: f.variance(),
                var_duration: d.variance(),
                combined: 0.0,
            }
        })
        .collect();
    let scale = |vals: Vec<f64>| -> Vec<f64> {
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        vals.iter()
            .map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
            .collect()
    };
    let nf = scale(profile.iter().map(|p| p.var_final).collect());
    let nd = scale(profile.iter().map(|p| p.var_duration).collect());
    for (i, p) in profile.iter_mut().enumerate() {
        p.combined = nf[i] + nd[i];
    }
    let best = profile
        .iter()
        .max_by(|a, b| {
            a.combined
                .total_cmp(&b.combined)
                .then_with(|| b.seed_count.cmp(&a.seed_count))
        })
        .expect("nonempty grid");
    Ok(Transition {
        critical_seed_count: best.seed_count,
        profile,
        runs,
    })
}

/// Seed count of maximal variability in final size and duration.
pub fn locate_transition(
    g: &Graph,
    base: &ContagionParams,
    grid: &[usize],
    runs_per_point: usize,
    master: u64,
) -> Result<Transition> {
    if runs_per_point < 2 {
        return Err(Error::Config("need at least two runs per grid point".into()));
    }
    let mut runs = Vec::with_capacity(grid.len() * runs_per_point);
    for &s in grid {
        for r in 0..runs_per_point {
            runs.push(replicate(g, base, s, r, master)?);
        }
    }
    summarize(grid, runs)
}

/// `(min, max)` of the critical seed counts of `networks`.
pub fn transition_range(
    networks: &[Graph],
    base: &ContagionParams,
    grid: &[usize],
    runs_per_point: usize,
    master: u64,
) -> Result<(usize, usize)> {
    if networks.is_empty() {
        return Err(Error::TooFew { needed: 1, got: 0 });
    }
    let mut lo = usize::MAX;
    let mut hi = 0;
    for g in networks {
        let c = locate_transition(g, base, grid, runs_per_point, master)?.critical_seed_count;
        lo = lo.min(c);
        hi = hi.max(c);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_graph, random_regular};
    use crate::Rng;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    fn params(threshold: u32, beta: f64, seeds: usize) -> ContagionParams {
        ContagionParams {
            threshold,
            beta,
            seeds,
            rounds_cap: 1000,
        }
    }

    #[test]
    fn complete_graph_saturates() {
        let mut rng = Rng::seed_from_u64(0);
        let out = simulate(&complete(10), &params(3, 1.0, 3), &mut rng).unwrap();
        assert_eq!(out, ContagionOutcome { final_size: 10, duration: 1 });
    }

    #[test]
    fn unreachable_threshold_never_spreads() {
        let g = random_regular(50, 4, 2);
        let mut rng = Rng::seed_from_u64(1);
        for beta in [0.3, 1.0] {
            let out = simulate(&g, &params(5, beta, 10), &mut rng).unwrap();
            assert_eq!(out, ContagionOutcome { final_size: 10, duration: 0 });
        }
    }

    #[test]
    fn all_seeded_changes_nothing() {
        let g = random_graph(30, 0.2, 4);
        let mut rng = Rng::seed_from_u64(2);
        let out = simulate(&g, &params(1, 0.5, 30), &mut rng).unwrap();
        assert_eq!(out, ContagionOutcome { final_size: 30, duration: 0 });
    }

    #[test]
    fn path_with_threshold_one() {
        let path = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let mut rng = Rng::seed_from_u64(3);
        let out = simulate_with_seeds(&path, &params(1, 1.0, 1), &[0], &mut rng).unwrap();
        assert_eq!(out, ContagionOutcome { final_size: 5, duration: 4 });
        // a node needing two exposures on a path only fills between seeds
        let out = simulate_with_seeds(&path, &params(2, 1.0, 2), &[1, 3], &mut rng).unwrap();
        assert_eq!(out, ContagionOutcome { final_size: 3, duration: 1 });
    }

    #[test]
    fn rounds_cap_limits_duration() {
        let path = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let mut rng = Rng::seed_from_u64(3);
        let p = ContagionParams { rounds_cap: 2, ..params(1, 1.0, 1) };
        let out = simulate_with_seeds(&path, &p, &[0], &mut rng).unwrap();
        assert_eq!(out, ContagionOutcome { final_size: 3, duration: 2 });
    }

    #[test]
    fn invalid_params() {
        let g = complete(4);
        let mut rng = Rng::seed_from_u64(0);
        assert!(simulate(&g, &params(0, 1.0, 1), &mut rng).is_err());
        assert!(simulate(&g, &params(1, 1.5, 1), &mut rng).is_err());
        assert!(simulate(&g, &params(1, 1.0, 5), &mut rng).is_err());
        assert!(simulate_with_seeds(&g, &params(1, 1.0, 1), &[9], &mut rng).is_err());
    }

    #[test]
    fn summarize_picks_variable_point() {
        let rec = |s, r, f| RunRecord { seed_count: s, replicate: r, final_size: f, duration: 1 };
        let runs = vec![rec(1, 0, 5), rec(1, 1, 5), rec(2, 0, 5), rec(2, 1, 9)];
        let t = summarize(&[1, 2], runs).unwrap();
        assert_eq!(t.critical_seed_count, 2);
        assert_eq!(t.profile[1].var_final, 4.0);
        // flat profile: ties go to the smallest seed count
        let runs = vec![rec(3, 0, 7), rec(3, 1, 7), rec(4, 0, 7), rec(4, 1, 7)];
        assert_eq!(summarize(&[4, 3], runs).unwrap().critical_seed_count, 3);
        let t = summarize(&[6], vec![rec(6, 0, 1), rec(6, 1, 2)]).unwrap();
        assert_eq!(t.critical_seed_count, 6);
    }

    #[test]
    fn saturated_points_are_not_critical() {
        let g = complete(12);
        let t = locate_transition(&g, &params(3, 1.0, 1), &[1, 2, 3, 4], 10, 7).unwrap();
        // from three seeds on, every run saturates in one round
        for p in &t.profile {
            assert_eq!(p.var_final, 0.0);
        }
        assert_eq!(t.critical_seed_count, 1);
        assert!(locate_transition(&g, &params(3, 1.0, 1), &[1], 1, 7).is_err());
    }

    #[test]
    fn identical_networks_give_zero_width() {
        let g = random_regular(80, 6, 5);
        let nets = vec![g.clone(), g.clone(), g];
        let (lo, hi) = transition_range(&nets, &params(3, 1.0, 1), &[2, 4, 6, 8, 10, 12], 8, 3).unwrap();
        assert_eq!(lo, hi);
    }

    proptest! {
        #[test]
        fn beta_one_is_repeatable(seed in 0u64..500, r in 1u32..4, k in 1usize..15) {
            let g = random_graph(40, 0.15, seed);
            let seeds: Vec<usize> = (0..k).map(|i| (i * 7 + seed as usize) % 40).collect();
            let p = params(r, 1.0, k);
            let a = simulate_with_seeds(&g, &p, &seeds, &mut Rng::seed_from_u64(seed)).unwrap();
            let b = simulate_with_seeds(&g, &p, &seeds, &mut Rng::seed_from_u64(seed + 1)).unwrap();
            prop_assert_eq!(a, b);
            let mut distinct = seeds.clone();
            distinct.sort_unstable();
            distinct.dedup();
            prop_assert!(a.final_size >= distinct.len() && a.final_size <= 40);
        }

        #[test]
        fn more_rounds_never_shrink(seed in 0u64..200, cap in 0u32..6) {
            let g = random_graph(40, 0.12, seed);
            let p = ContagionParams { rounds_cap: cap, ..params(2, 0.7, 6) };
            let q = ContagionParams { rounds_cap: cap + 1, ..p };
            let a = simulate(&g, &p, &mut Rng::seed_from_u64(seed)).unwrap();
            let b = simulate(&g, &q, &mut Rng::seed_from_u64(seed)).unwrap();
            prop_assert!(b.final_size >= a.final_size);
            prop_assert!(a.duration <= cap);
        }
    }
}
