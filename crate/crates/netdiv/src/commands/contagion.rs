use netdiv_core::cma::realize;
use netdiv_core::contagion::{replicate, summarize, RunRecord, Transition};
use netdiv_core::Graph;
use rayon::prelude::*;

use super::prepare_output;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult, RuntimeContext};
use crate::formats::{self, ArchiveFile};

#[derive(Debug)]
pub struct ContagionReport {
    /// Archive cell index per swept network.
    pub cells: Vec<usize>,
    pub transitions: Vec<Transition>,
    pub range: (usize, usize),
}

impl std::fmt::Display for ContagionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (c, t) in self.cells.iter().zip(&self.transitions) {
            writeln!(f, "elite {c}: critical seed count {}", t.critical_seed_count)?;
        }
        write!(f, "transition range: {}..={}", self.range.0, self.range.1)
    }
}

fn distance2(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Pair of rows farthest apart in Euclidean distance, first pair in
/// `(i, j)` order on ties. Identical rows never form a pair.
pub fn most_distant_pair(rows: &[Vec<i64>]) -> Option<(usize, usize)> {
    let mut best: Option<(i64, usize, usize)> = None;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let d = distance2(&rows[i], &rows[j]);
            if d > 0 && best.is_none_or(|(bd, _, _)| d > bd) {
                best = Some((d, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Sweeps every graph over the grid in parallel. Each replicate draws from
/// its own stream, so the result does not depend on scheduling.
pub fn sweep(graphs: &[Graph], cfg: &RunConfig) -> CliResult<Vec<Transition>> {
    let c = &cfg.contagion;
    let grid = c.grid();
    let base = c.params();
    let master = netdiv_core::seeding::derive_seed(cfg.master_seed, "contagion-sweep", 0);
    graphs
        .iter()
        .map(|g| {
            let runs = grid
                .par_iter()
                .flat_map_iter(|&s| (0..c.runs_per_point).map(move |r| (s, r)))
                .map(|(s, r)| replicate(g, &base, s, r, master))
                .collect::<Result<Vec<RunRecord>, _>>()
                .runtime("contagion run")?;
            summarize(&grid, runs).runtime("contagion profile")
        })
        .collect()
}

pub fn cmd_contagion(cfg: &RunConfig) -> CliResult<ContagionReport> {
    cfg.validate()?;
    let family = cfg.family()?;
    let src = cfg.contagion.archive.clone().unwrap_or_else(|| cfg.output_dir.clone());
    let archive: ArchiveFile = formats::read_json(&src.join("archive.json"))?;
    if archive.family_hash != formats::hex(family.digest()) {
        return Err(CliError::config("archive was produced with a different family"));
    }
    if archive.cells.len() < 2 {
        return Err(CliError::config("contagion needs an archive with at least two elites"));
    }
    if cfg.contagion.grid_stop > archive.context.nodes {
        return Err(CliError::config("contagion grid exceeds the archive's node count"));
    }
    let counts: Vec<Vec<i64>> = archive.cells.iter().map(|c| c.elite.counts.clone()).collect();
    let cells: Vec<usize> = if cfg.contagion.all_elites {
        (0..counts.len()).collect()
    } else {
        let (i, j) = most_distant_pair(&counts)
            .ok_or_else(|| CliError::config("all elites share the same subgraph counts"))?;
        vec![i, j]
    };
    prepare_output(cfg, "contagion", &family)?;
    let graphs = cells
        .par_iter()
        .map(|&i| {
            let seed = archive.cells[i].elite.realization_seed;
            realize(&archive.spec(i), &family, &archive.realization.with_seed(seed))
                .runtime("re-realizing an elite")?
                .graph
                .ok_or_else(|| CliError::runtime(format!("elite {i} no longer realizes")))
        })
        .collect::<CliResult<Vec<Graph>>>()?;
    let transitions = sweep(&graphs, cfg)?;
    let crit = transitions.iter().map(|t| t.critical_seed_count);
    let range = (crit.clone().min().unwrap_or(0), crit.max().unwrap_or(0));

    let dir = &cfg.output_dir;
    let mut runs = csv::Writer::from_path(dir.join("contagion_runs.csv"))?;
    runs.write_record(["network_id", "seed_count", "replicate", "final_size", "duration"])?;
    let mut prof = csv::Writer::from_path(dir.join("contagion_profile.csv"))?;
    prof.write_record(["network_id", "seed_count", "var_final", "var_duration", "combined"])?;
    for (&cell, t) in cells.iter().zip(&transitions) {
        for r in &t.runs {
            runs.write_record([
                cell.to_string(),
                r.seed_count.to_string(),
                r.replicate.to_string(),
                r.final_size.to_string(),
                r.duration.to_string(),
            ])?;
        }
        for p in &t.profile {
            prof.write_record([
                cell.to_string(),
                p.seed_count.to_string(),
                p.var_final.to_string(),
                p.var_duration.to_string(),
                p.combined.to_string(),
            ])?;
        }
    }
    runs.flush()?;
    prof.flush()?;
    formats::write_json(
        &dir.join("transition.json"),
        &serde_json::json!({
            "networks": cells.iter().zip(&transitions).map(|(&c, t)| serde_json::json!({
                "network_id": c,
                "counts": counts[c],
                "critical_seed_count": t.critical_seed_count,
            })).collect::<Vec<_>>(),
            "range": [range.0, range.1],
        }),
    )?;
    Ok(ContagionReport {
        cells,
        transitions,
        range,
    })
}
