//! The MapElite loop: pick an elite, mutate it, realize the result and offer
//! it to the archive.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::archive::{ArchiveTree, Elite};
use crate::cma::{realize, RealizationConfig, RealizationReport};
use crate::diophantine::{apply_mutation, MutationCatalog};
use crate::family::{Context, NetworkSpec, SubgraphFamily};
use crate::metrics::betweenness;
use crate::seeding::{derive_rng, derive_seed};
use crate::{Error, Result, Rng};

/// How mutations are drawn and how the archive resolution evolves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum SearchMode {
    /// Cells start at the initial size and are refined on demand; mutation
    /// sizes follow the parent's cell.
    #[default]
    Adaptive,
    /// One cell per specification and mutations of exactly `size`.
    Fixed { size: u32 },
    /// Unconstrained random perturbations, unit cells.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SearchConfig {
    pub initial_cell_size: u32,
    pub revisit_threshold: f64,
    pub refine_fraction: f64,
    pub iterations: u64,
    pub population_seed_count: usize,
    pub rng_seed: u64,
    pub mode: SearchMode,
    pub realization: RealizationConfig,
    /// Random draws allowed when building the starting population.
    pub max_seed_draws: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            initial_cell_size: 64,
            revisit_threshold: 2.0,
            refine_fraction: 0.05,
            iterations: 4700,
            population_seed_count: 5,
            rng_seed: 0,
            mode: SearchMode::Adaptive,
            realization: RealizationConfig {
                census: false,
                ..RealizationConfig::default()
            },
            max_seed_draws: 1000,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let pow2 = |s: u32| s >= 1 && s.is_power_of_two();
        if !pow2(self.initial_cell_size) {
            return Err(Error::Config("initial_cell_size must be a power of two".into()));
        }
        if let SearchMode::Fixed { size } = self.mode {
            if size == 0 {
                return Err(Error::Config("fixed mutation size must be at least 1".into()));
            }
        }
        if self.revisit_threshold.is_nan() || self.revisit_threshold <= 0.0 {
            return Err(Error::Config("revisit_threshold must be positive".into()));
        }
        if !(self.refine_fraction > 0.0 && self.refine_fraction <= 1.0) {
            return Err(Error::Config("refine_fraction must lie in (0, 1]".into()));
        }
        if self.population_seed_count == 0 {
            return Err(Error::Config("population_seed_count must be at least 1".into()));
        }
        Ok(())
    }

    fn cell_side(&self) -> u32 {
        match self.mode {
            SearchMode::Adaptive => self.initial_cell_size,
            SearchMode::Fixed { .. } | SearchMode::Random => 1,
        }
    }
}

/// One row per iteration; counters are cumulative.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeriesRow {
    pub iteration: u64,
    pub new_cells: u64,
    pub revisits: u64,
    pub valid_networks: u64,
    pub distinct_networks: u64,
    pub elites: u64,
    pub refinements: u64,
    pub mean_leaf_side: f64,
    /// Lower end of the mutation band used, 0 for random perturbations.
    pub band_lo: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchStats {
    pub iterations: u64,
    /// Mutations leaving the non-negative, within-budget region.
    pub out_of_bounds: u64,
    /// Candidates failing specification validation.
    pub invalid: u64,
    pub realization_failures: u64,
    /// Successfully realized candidates, seeds excluded.
    pub valid: u64,
    pub distinct_valid: u64,
    pub accepted: u64,
    pub refinements: u64,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub archive: ArchiveTree,
    pub seeds: Vec<NetworkSpec>,
    pub series: Vec<SeriesRow>,
    pub stats: SearchStats,
}

/// Random valid specification: clustering kinds share the triangle target,
/// the rest take a random fraction of the leftover edge budget.
pub fn random_spec<R: rand::Rng + ?Sized>(
    context: &Context,
    family: &SubgraphFamily,
    rng: &mut R,
) -> Option<NetworkSpec> {
    let kinds = family.kinds();
    let mut counts = vec![0i64; kinds.len()];
    let mut clustering: Vec<usize> = (0..kinds.len()).filter(|&i| kinds[i].triangles > 0).collect();
    let mut open: Vec<usize> = (0..kinds.len()).filter(|&i| kinds[i].triangles == 0).collect();
    clustering.shuffle(rng);
    open.shuffle(rng);
    // the kind with fewest triangles closes the gap
    let last = *clustering.iter().min_by_key(|&&i| (kinds[i].triangles, i))?;
    let mut left = context.target_triangles();
    for &i in clustering.iter().filter(|&&i| i != last) {
        let t = kinds[i].triangles as i64;
        let cap = left / t;
        counts[i] = rng.gen_range(0..=cap) * rng.gen_range(0..=1000) / 1000;
        left -= counts[i] * t;
    }
    let t = kinds[last].triangles as i64;
    if left % t != 0 {
        return None;
    }
    counts[last] = left / t;
    let mut spare = context.edge_budget() - family.edge_contribution(&counts);
    if spare < 0 {
        return None;
    }
    spare = spare * rng.gen_range(0..=600) / 1000;
    for &i in &open {
        let e = kinds[i].edges as i64;
        counts[i] = rng.gen_range(0..=spare / e);
        spare -= counts[i] * e;
    }
    let spec = NetworkSpec::new(counts, *context);
    spec.is_valid(family).then_some(spec)
}

/// Starting population: `count` random specifications that realize, drawn
/// from the `seeds` stream of `master`.
pub fn seed_population(
    context: &Context,
    family: &SubgraphFamily,
    count: usize,
    master: u64,
    realization: &RealizationConfig,
    max_draws: u32,
) -> Result<Vec<(NetworkSpec, u64, RealizationReport)>> {
    let mut rng = derive_rng(master, "seeds", 0);
    let mut out: Vec<(NetworkSpec, u64, RealizationReport)> = Vec::new();
    for draw in 0..max_draws as u64 {
        if out.len() == count {
            break;
        }
        let Some(spec) = random_spec(context, family, &mut rng) else {
            continue;
        };
        if out.iter().any(|(s, _, _)| s.counts == spec.counts) {
            continue;
        }
        let seed = derive_seed(master, "seed-realize", draw);
        let report = realize(&spec, family, &realization.with_seed(seed))?;
        if report.succeeded() {
            out.push((spec, seed, report));
        }
    }
    if out.is_empty() {
        return Err(Error::NoRealizableSeed);
    }
    if out.len() < count {
        return Err(Error::TooFew {
            needed: count,
            got: out.len(),
        });
    }
    Ok(out)
}

/// Perturbs a random nonempty subset of counts by signed integers whose
/// largest magnitude is drawn uniformly from `1..=128`. Nothing is conserved.
pub fn random_mutation_baseline<R: rand::Rng + ?Sized>(spec: &NetworkSpec, rng: &mut R) -> NetworkSpec {
    let n = spec.counts.len();
    let size = rng.gen_range(1..=128i64);
    let mut chosen: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    if chosen.is_empty() {
        chosen.push(rng.gen_range(0..n));
    }
    let mut counts = spec.counts.clone();
    for &i in &chosen {
        counts[i] += rng.gen_range(-size..=size);
    }
    // one component carries the full size so the delta is never zero
    let pinned = chosen[rng.gen_range(0..chosen.len())];
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    counts[pinned] = spec.counts[pinned] + sign * size;
    NetworkSpec::new(counts, spec.context)
}

fn fitness(context: &Context, clustering: f64) -> f64 {
    -libm::fabs(clustering - context.clustering)
}

fn elite_from(spec: NetworkSpec, report: &RealizationReport, seed: u64, iteration: u64) -> (Elite, f64) {
    let g = report.graph.as_ref().expect("successful realization");
    let clustering = report.realized_clustering.unwrap_or(0.0);
    let elite = Elite {
        fitness: fitness(&spec.context, clustering),
        spec,
        clustering,
        realization_seed: seed,
        iteration,
    };
    (elite, betweenness(g).dispersion)
}

pub fn run_search(
    cfg: &SearchConfig,
    family: &SubgraphFamily,
    context: &Context,
    catalog: &MutationCatalog,
) -> Result<SearchOutcome> {
    cfg.validate()?;
    context.validate()?;
    if catalog.is_empty() && cfg.mode != SearchMode::Random {
        return Err(Error::EmptyCatalog);
    }
    let master = cfg.rng_seed;
    let ceilings = NetworkSpec::count_ceiling(context, family);
    let mut archive = ArchiveTree::new(ceilings, cfg.cell_side() as i64)?;
    let seeds = seed_population(
        context,
        family,
        cfg.population_seed_count,
        master,
        &cfg.realization,
        cfg.max_seed_draws,
    )?;
    let mut distinct: BTreeSet<Vec<i64>> = BTreeSet::new();
    for (spec, seed, report) in &seeds {
        let at = archive.locate(spec)?;
        let (elite, interest) = elite_from(spec.clone(), report, *seed, 0);
        archive.offer(at.cell, elite, interest);
        distinct.insert(spec.counts.clone());
    }

    let mut rng: Rng = derive_rng(master, "search", 0);
    let mut stats = SearchStats::default();
    let mut series = Vec::with_capacity(cfg.iterations as usize);
    for iteration in 1..=cfg.iterations {
        stats.iterations += 1;
        let pick = rng.gen_range(0..archive.elite_count());
        let parent_id = archive.occupied_nth(pick).expect("occupied leaf");
        let parent = archive.cell(parent_id).elite.as_ref().expect("elite").spec.clone();
        let (band_lo, candidate) = match cfg.mode {
            SearchMode::Random => (0, Some(random_mutation_baseline(&parent, &mut rng))),
            SearchMode::Adaptive | SearchMode::Fixed { .. } => {
                let (lo, hi) = match cfg.mode {
                    SearchMode::Fixed { size } => (size, size),
                    _ => archive.mutation_band(parent_id),
                };
                let m = catalog.sample(lo, hi, &mut rng)?;
                (lo, apply_mutation(&parent, &m.delta, family))
            }
        };
        let outcome = match candidate {
            None => {
                stats.out_of_bounds += 1;
                None
            }
            Some(spec) if !spec.is_valid(family) => {
                stats.invalid += 1;
                None
            }
            Some(spec) => {
                let seed = derive_seed(master, "realize", iteration);
                let report = realize(&spec, family, &cfg.realization.with_seed(seed))?;
                if report.succeeded() {
                    Some((spec, seed, report))
                } else {
                    stats.realization_failures += 1;
                    None
                }
            }
        };
        if let Some((spec, seed, report)) = outcome {
            stats.valid += 1;
            distinct.insert(spec.counts.clone());
            let at = archive.locate(&spec)?;
            let (elite, interest) = elite_from(spec, &report, seed, iteration);
            if archive.offer(at.cell, elite, interest) {
                stats.accepted += 1;
            }
            if cfg.mode == SearchMode::Adaptive {
                archive.maybe_refine(cfg.revisit_threshold, cfg.refine_fraction);
            }
        }
        let (new_cells, revisits) = archive.totals();
        series.push(SeriesRow {
            iteration,
            new_cells,
            revisits,
            valid_networks: stats.valid,
            distinct_networks: distinct.len() as u64,
            elites: archive.elite_count() as u64,
            refinements: archive.refinements(),
            mean_leaf_side: archive.mean_leaf_side(),
            band_lo,
        });
    }
    stats.distinct_valid = distinct.len() as u64;
    stats.refinements = archive.refinements();
    Ok(SearchOutcome {
        archive,
        seeds: seeds.into_iter().map(|(s, _, _)| s).collect(),
        series,
        stats,
    })
}
