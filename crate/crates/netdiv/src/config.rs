//! Run configuration: one JSON document per run, every field optional.

use std::path::{Path, PathBuf};

use netdiv_core::cma::RealizationConfig;
use netdiv_core::contagion::ContagionParams;
use netdiv_core::search::{SearchConfig, SearchMode};
use netdiv_core::{Context, SubgraphFamily};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::formats;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_context")]
    pub context: Context,
    /// Family file; the built-in five-shape family when absent.
    pub family: Option<PathBuf>,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub catalog: CatalogSection,
    pub search: SearchSection,
    pub compare: CompareSection,
    pub contagion: ContagionSection,
    pub validate: ValidateSection,
}

fn default_context() -> Context {
    Context {
        nodes: 1000,
        degree: 7,
        clustering: 0.1,
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            context: default_context(),
            family: None,
            master_seed: 0,
            output_dir: PathBuf::from("out"),
            catalog: CatalogSection::default(),
            search: SearchSection::default(),
            compare: CompareSection::default(),
            contagion: ContagionSection::default(),
            validate: ValidateSection::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CatalogSection {
    pub max_size: u32,
    /// Existing catalog to reuse; built from the family when absent.
    pub path: Option<PathBuf>,
}

impl Default for CatalogSection {
    fn default() -> Self {
        CatalogSection {
            max_size: 128,
            path: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Adaptive,
    Fixed,
    Random,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSection {
    pub mode: ModeName,
    pub fixed_size: u32,
    pub initial_cell_size: u32,
    pub revisit_threshold: f64,
    pub refine_fraction: f64,
    pub iterations: u64,
    pub population_seed_count: usize,
    pub max_seed_draws: u32,
    pub realization: RealizationSection,
    /// Write one edge list per elite.
    pub export_networks: bool,
    /// Gzip the exported edge lists.
    pub compress_networks: bool,
}

impl Default for SearchSection {
    fn default() -> Self {
        let core = SearchConfig::default();
        SearchSection {
            mode: ModeName::Adaptive,
            fixed_size: 8,
            initial_cell_size: core.initial_cell_size,
            revisit_threshold: core.revisit_threshold,
            refine_fraction: core.refine_fraction,
            iterations: core.iterations,
            population_seed_count: core.population_seed_count,
            max_seed_draws: core.max_seed_draws,
            realization: RealizationSection::default(),
            export_networks: true,
            compress_networks: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RealizationSection {
    pub max_attempts: u32,
    pub max_edge_retries: u32,
}

impl Default for RealizationSection {
    fn default() -> Self {
        let core = RealizationConfig::default();
        RealizationSection {
            max_attempts: core.max_attempts,
            max_edge_retries: core.max_edge_retries,
        }
    }
}

impl RealizationSection {
    pub fn to_core(&self) -> RealizationConfig {
        RealizationConfig {
            max_attempts: self.max_attempts,
            max_edge_retries: self.max_edge_retries,
            rng_seed: 0,
            census: false,
        }
    }
}

impl SearchSection {
    pub fn mode(&self) -> SearchMode {
        match self.mode {
            ModeName::Adaptive => SearchMode::Adaptive,
            ModeName::Fixed => SearchMode::Fixed {
                size: self.fixed_size,
            },
            ModeName::Random => SearchMode::Random,
        }
    }

    pub fn to_core(&self, master_seed: u64) -> SearchConfig {
        SearchConfig {
            initial_cell_size: self.initial_cell_size,
            revisit_threshold: self.revisit_threshold,
            refine_fraction: self.refine_fraction,
            iterations: self.iterations,
            population_seed_count: self.population_seed_count,
            rng_seed: master_seed,
            mode: self.mode(),
            realization: self.realization.to_core(),
            max_seed_draws: self.max_seed_draws,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSection {
    /// Search output directories to compare.
    pub inputs: Vec<PathBuf>,
    pub bin_width: i64,
}

impl Default for CompareSection {
    fn default() -> Self {
        CompareSection {
            inputs: Vec::new(),
            bin_width: 5,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContagionSection {
    /// Search output directory holding the archive; the output directory
    /// when absent.
    pub archive: Option<PathBuf>,
    pub threshold: u32,
    pub beta: f64,
    pub rounds_cap: u32,
    pub grid_start: usize,
    pub grid_stop: usize,
    pub grid_step: usize,
    pub runs_per_point: usize,
    /// Sweep every elite, not only the most distant pair.
    pub all_elites: bool,
}

impl Default for ContagionSection {
    fn default() -> Self {
        ContagionSection {
            archive: None,
            threshold: 3,
            beta: 1.0,
            rounds_cap: 10_000,
            grid_start: 1,
            grid_stop: 200,
            grid_step: 1,
            runs_per_point: 100,
            all_elites: false,
        }
    }
}

impl ContagionSection {
    pub fn params(&self) -> ContagionParams {
        ContagionParams {
            threshold: self.threshold,
            beta: self.beta,
            seeds: 1,
            rounds_cap: self.rounds_cap,
        }
    }

    pub fn grid(&self) -> Vec<usize> {
        (self.grid_start..=self.grid_stop).step_by(self.grid_step.max(1)).collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateSection {
    /// Accepted distance between realized and target clustering.
    pub clustering_tolerance: f64,
}

impl Default for ValidateSection {
    fn default() -> Self {
        ValidateSection {
            clustering_tolerance: 0.007,
        }
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub mode: Option<ModeName>,
    pub fixed_size: Option<u32>,
    pub iterations: Option<u64>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        // relative paths in the file are relative to the file
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = cfg.family.as_mut() {
            rebase(p);
        }
        if let Some(p) = cfg.catalog.path.as_mut() {
            rebase(p);
        }
        if let Some(p) = cfg.contagion.archive.as_mut() {
            rebase(p);
        }
        cfg.compare.inputs.iter_mut().for_each(rebase);
        rebase(&mut cfg.output_dir);
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.master_seed = s;
        }
        if let Some(out) = &o.out {
            self.output_dir = out.clone();
        }
        if let Some(m) = o.mode {
            self.search.mode = m;
        }
        if let Some(s) = o.fixed_size {
            self.search.fixed_size = s;
        }
        if let Some(i) = o.iterations {
            self.search.iterations = i;
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        self.context.validate().map_err(CliError::config)?;
        self.search
            .to_core(self.master_seed)
            .validate()
            .map_err(CliError::config)?;
        if self.catalog.max_size == 0 {
            return Err(CliError::config("catalog.max_size must be at least 1"));
        }
        if self.compare.bin_width < 1 {
            return Err(CliError::config("compare.bin_width must be at least 1"));
        }
        let c = &self.contagion;
        if c.grid_start == 0 || c.grid_stop < c.grid_start || c.grid_step == 0 {
            return Err(CliError::config("contagion grid must be 1 <= start <= stop with step >= 1"));
        }
        if c.runs_per_point < 2 {
            return Err(CliError::config("contagion.runs_per_point must be at least 2"));
        }
        c.params().validate(self.context.nodes).map_err(CliError::config)?;
        if let Some(p) = &self.family {
            if !p.exists() {
                return Err(CliError::config(format!("family file {} not found", p.display())));
            }
        }
        Ok(())
    }

    pub fn family(&self) -> CliResult<SubgraphFamily> {
        match &self.family {
            None => Ok(SubgraphFamily::default_family()),
            Some(p) => formats::read_family(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg.context, default_context());
        assert_eq!(cfg.search.iterations, 4700);
        assert_eq!(cfg.search.initial_cell_size, 64);
        assert_eq!(cfg.catalog.max_size, 128);
        assert_eq!(cfg.contagion.grid().len(), 200);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"serach": {}}"#).is_err());
    }

    #[test]
    fn overrides_win() {
        let mut cfg = RunConfig::default();
        cfg.apply(&Overrides {
            seed: Some(9),
            mode: Some(ModeName::Fixed),
            fixed_size: Some(16),
            iterations: Some(3),
            out: Some("x".into()),
        });
        let core = cfg.search.to_core(cfg.master_seed);
        assert_eq!(core.mode, SearchMode::Fixed { size: 16 });
        assert_eq!((core.iterations, core.rng_seed), (3, 9));
        assert_eq!(cfg.output_dir, PathBuf::from("x"));
    }
}
