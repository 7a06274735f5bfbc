use netdiv_core::cma::realize;
use netdiv_core::search::{run_search, SearchOutcome};
use netdiv_core::Error;
use rayon::prelude::*;

use super::{load_catalog, prepare_output};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult, RuntimeContext};
use crate::formats::{self, ArchiveFile, CatalogFile};

#[derive(Debug)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub archive: ArchiveFile,
}

impl std::fmt::Display for SearchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = &self.outcome.stats;
        writeln!(f, "mode: {}", self.archive.mode)?;
        writeln!(f, "iterations: {}", s.iterations)?;
        writeln!(
            f,
            "valid networks: {} ({} distinct), elites: {}",
            s.valid,
            s.distinct_valid,
            self.archive.cells.len()
        )?;
        writeln!(
            f,
            "rejected: {} out of bounds, {} invalid, {} unrealized",
            s.out_of_bounds, s.invalid, s.realization_failures
        )?;
        write!(f, "refinements: {}", s.refinements)
    }
}

pub fn cmd_search(cfg: &RunConfig) -> CliResult<SearchReport> {
    cfg.validate()?;
    let family = cfg.family()?;
    prepare_output(cfg, "search", &family)?;
    let catalog = load_catalog(cfg, &family)?;
    let dir = &cfg.output_dir;
    if cfg.catalog.path.is_none() {
        formats::write_json(&dir.join("catalog.json"), &CatalogFile::new(&family, &catalog))?;
    }
    let search = cfg.search.to_core(cfg.master_seed);
    let outcome = run_search(&search, &family, &cfg.context, &catalog).map_err(|e| match e {
        Error::Config(_) | Error::Context(_) | Error::Family(_) | Error::EmptyCatalog => CliError::config(e),
        e => CliError::Runtime(anyhow::Error::new(e).context("search failed")),
    })?;

    let archive = ArchiveFile {
        context: cfg.context,
        kinds: formats::kind_names(&family),
        family_hash: formats::hex(family.digest()),
        mode: format!("{:?}", search.mode),
        master_seed: cfg.master_seed,
        realization: search.realization,
        stats: outcome.stats,
        cells: formats::cell_records(&outcome.archive),
    };
    formats::write_json(&dir.join("archive.json"), &archive)?;
    formats::write_archive_csv(&dir.join("archive.csv"), &archive)?;
    formats::write_series_csv(&dir.join("timeseries.csv"), &outcome.series)?;

    if cfg.search.export_networks {
        let net_dir = dir.join("networks");
        std::fs::create_dir_all(&net_dir).runtime(format!("creating {}", net_dir.display()))?;
        let ext = if cfg.search.compress_networks { "edges.gz" } else { "edges" };
        (0..archive.cells.len()).into_par_iter().try_for_each(|i| -> CliResult<()> {
            let seed = archive.cells[i].elite.realization_seed;
            let report = realize(&archive.spec(i), &family, &search.realization.with_seed(seed))
                .runtime("re-realizing an elite")?;
            let g = report
                .graph
                .ok_or_else(|| CliError::runtime(format!("elite {i} no longer realizes")))?;
            formats::write_edge_list(&net_dir.join(format!("elite_{i:05}.{ext}")), &g)
        })?;
    }
    Ok(SearchReport { outcome, archive })
}
