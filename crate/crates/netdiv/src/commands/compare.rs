use std::collections::BTreeMap;
use std::path::PathBuf;

use super::prepare_output;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::formats::{self, ArchiveFile};

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub name: String,
    pub elites: usize,
    pub valid_networks: u64,
    pub distinct_networks: u64,
    /// Per kind `(min, max)` over the elites.
    pub ranges: Vec<(i64, i64)>,
    /// Per kind, bin lower edge to number of elites.
    pub histograms: Vec<BTreeMap<i64, usize>>,
}

#[derive(Debug)]
pub struct CompareReport {
    pub kinds: Vec<String>,
    pub runs: Vec<RunSummary>,
}

impl std::fmt::Display for CompareReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in &self.runs {
            write!(f, "{}: {} elites, {} valid", r.name, r.elites, r.valid_networks)?;
            for (k, (lo, hi)) in self.kinds.iter().zip(&r.ranges) {
                write!(f, ", {k} {lo}..{hi}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn run_name(dir: &std::path::Path, i: usize) -> String {
    dir.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| format!("run{i}"))
}

pub fn summarize(name: String, a: &ArchiveFile, bin_width: i64) -> RunSummary {
    let dims = a.kinds.len();
    let mut ranges = vec![(i64::MAX, i64::MIN); dims];
    let mut histograms = vec![BTreeMap::new(); dims];
    for c in &a.cells {
        for (d, &x) in c.elite.counts.iter().enumerate() {
            ranges[d] = (ranges[d].0.min(x), ranges[d].1.max(x));
            *histograms[d].entry(x.div_euclid(bin_width) * bin_width).or_insert(0) += 1;
        }
    }
    RunSummary {
        name,
        elites: a.cells.len(),
        valid_networks: a.stats.valid,
        distinct_networks: a.stats.distinct_valid,
        ranges,
        histograms,
    }
}

pub fn cmd_compare(cfg: &RunConfig) -> CliResult<CompareReport> {
    cfg.validate()?;
    let inputs: &[PathBuf] = &cfg.compare.inputs;
    if inputs.len() < 2 {
        return Err(CliError::config("compare needs at least two search outputs"));
    }
    let archives = inputs
        .iter()
        .map(|d| formats::read_json::<ArchiveFile>(&d.join("archive.json")))
        .collect::<CliResult<Vec<_>>>()?;
    let first = &archives[0];
    for (d, a) in inputs.iter().zip(&archives) {
        if a.context != first.context || a.kinds != first.kinds {
            return Err(CliError::config(format!(
                "{} was run in a different context or family",
                d.display()
            )));
        }
        if a.cells.is_empty() {
            return Err(CliError::config(format!("{} holds an empty archive", d.display())));
        }
    }
    let family = cfg.family()?;
    prepare_output(cfg, "compare", &family)?;
    let bin = cfg.compare.bin_width;
    let runs: Vec<RunSummary> = inputs
        .iter()
        .zip(&archives)
        .enumerate()
        .map(|(i, (d, a))| summarize(run_name(d, i), a, bin))
        .collect();

    let dir = &cfg.output_dir;
    let mut w = csv::Writer::from_path(dir.join("histograms.csv"))?;
    w.write_record(["run", "kind", "bin_lo", "bin_hi", "count"])?;
    for r in &runs {
        for (k, h) in first.kinds.iter().zip(&r.histograms) {
            for (lo, n) in h {
                w.write_record([&r.name, k, &lo.to_string(), &(lo + bin - 1).to_string(), &n.to_string()])?;
            }
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    let mut header = vec!["run".to_string(), "elites".into(), "valid".into(), "distinct".into()];
    for k in &first.kinds {
        header.push(format!("{k}_min"));
        header.push(format!("{k}_max"));
    }
    w.write_record(&header)?;
    for r in &runs {
        let mut row = vec![
            r.name.clone(),
            r.elites.to_string(),
            r.valid_networks.to_string(),
            r.distinct_networks.to_string(),
        ];
        for (lo, hi) in &r.ranges {
            row.push(lo.to_string());
            row.push(hi.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("discovery.csv"))?;
    w.write_record(["run", "iteration", "new_cells", "valid_networks", "distinct_networks", "elites"])?;
    for (d, r) in inputs.iter().zip(&runs) {
        let series = d.join("timeseries.csv");
        if !series.exists() {
            continue;
        }
        for row in formats::read_series_csv(&series)? {
            w.write_record([
                r.name.clone(),
                row.iteration.to_string(),
                row.new_cells.to_string(),
                row.valid_networks.to_string(),
                row.distinct_networks.to_string(),
                row.elites.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(CompareReport {
        kinds: first.kinds.clone(),
        runs,
    })
}
