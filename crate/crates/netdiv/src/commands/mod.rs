//! The five subcommands. Each takes a resolved configuration and writes its
//! artifacts under the configured output directory.

mod catalog;
mod compare;
mod contagion;
mod search;
mod validate;

use netdiv_core::diophantine::MutationCatalog;
use netdiv_core::SubgraphFamily;

pub use catalog::{cmd_catalog, CatalogReport};
pub use compare::{cmd_compare, CompareReport};
pub use contagion::{cmd_contagion, most_distant_pair, ContagionReport};
pub use search::{cmd_search, SearchReport};
pub use validate::{cmd_validate, ValidateReport};

use crate::config::RunConfig;
use crate::error::{CliResult, RuntimeContext};
use crate::formats::{self, CatalogFile, Manifest};

/// Creates the output directory and records the resolved configuration and
/// the manifest in it.
pub(crate) fn prepare_output(cfg: &RunConfig, command: &str, family: &SubgraphFamily) -> CliResult<()> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).runtime(format!("creating {}", dir.display()))?;
    formats::write_json(&dir.join("config.json"), cfg)?;
    formats::write_json(
        &dir.join("manifest.json"),
        &Manifest {
            command: command.to_string(),
            version: formats::version(),
            master_seed: cfg.master_seed,
            family_hash: formats::hex(family.digest()),
        },
    )
}

/// The configured catalog file if set, otherwise a freshly built catalog.
pub(crate) fn load_catalog(cfg: &RunConfig, family: &SubgraphFamily) -> CliResult<MutationCatalog> {
    match &cfg.catalog.path {
        Some(p) => formats::read_json::<CatalogFile>(p)?.into_catalog(family),
        None => MutationCatalog::build(family, cfg.catalog.max_size).runtime("building the catalog"),
    }
}
