use std::collections::BTreeMap;

use netdiv_core::diophantine::MutationCatalog;

use super::prepare_output;
use crate::config::RunConfig;
use crate::error::{CliResult, RuntimeContext};
use crate::formats::{self, CatalogFile};

#[derive(Debug)]
pub struct CatalogReport {
    pub catalog: MutationCatalog,
    pub sizes: BTreeMap<u32, usize>,
    /// Entries by number of enforced kinds.
    pub enforced: BTreeMap<usize, usize>,
    /// Entries by number of kinds with a nonzero change.
    pub support: BTreeMap<usize, usize>,
}

impl std::fmt::Display for CatalogReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "entries: {}", self.catalog.len())?;
        let (lo, hi) = (self.sizes.keys().next(), self.sizes.keys().last());
        if let (Some(lo), Some(hi)) = (lo, hi) {
            writeln!(f, "sizes: {lo}..={hi} ({} distinct)", self.sizes.len())?;
        }
        writeln!(f, "size histogram:")?;
        for (s, n) in &self.sizes {
            writeln!(f, "  {s:>4} {n}")?;
        }
        writeln!(f, "enforced kinds: {:?}", self.enforced)?;
        write!(f, "changed kinds: {:?}", self.support)
    }
}

pub fn cmd_catalog(cfg: &RunConfig) -> CliResult<CatalogReport> {
    cfg.validate()?;
    let family = cfg.family()?;
    prepare_output(cfg, "catalog", &family)?;
    let catalog = MutationCatalog::build(&family, cfg.catalog.max_size).runtime("building the catalog")?;
    formats::write_json(
        &cfg.output_dir.join("catalog.json"),
        &CatalogFile::new(&family, &catalog),
    )?;
    Ok(CatalogReport {
        sizes: catalog.size_histogram(),
        enforced: catalog.enforced_histogram(),
        support: catalog.touched_histogram(),
        catalog,
    })
}
