use std::path::Path;

use netdiv_core::metrics::{global_clustering, subgraph_census};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::formats;

#[derive(Debug)]
pub struct ValidateReport {
    pub nodes: usize,
    pub edges: usize,
    pub regular_degree: Option<usize>,
    pub clustering: Option<f64>,
    pub census: Option<Vec<u64>>,
    pub kinds: Vec<String>,
    pub problems: Vec<String>,
}

impl ValidateReport {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

impl std::fmt::Display for ValidateReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "nodes: {}, edges: {}", self.nodes, self.edges)?;
        match self.regular_degree {
            Some(k) => writeln!(f, "regular of degree {k}")?,
            None => writeln!(f, "not regular")?,
        }
        if let Some(c) = self.clustering {
            writeln!(f, "clustering: {c:.6}")?;
        }
        if let Some(census) = &self.census {
            let parts: Vec<String> = self.kinds.iter().zip(census).map(|(k, n)| format!("{k} {n}")).collect();
            writeln!(f, "census: {}", parts.join(", "))?;
        }
        if self.ok() {
            write!(f, "valid")
        } else {
            write!(f, "INVALID: {}", self.problems.join("; "))
        }
    }
}

/// Re-checks an exported network against the configured context: exact
/// regularity and clustering within the tolerance of the target.
pub fn cmd_validate(cfg: &RunConfig, network: &Path) -> CliResult<ValidateReport> {
    cfg.validate()?;
    let family = cfg.family()?;
    let g = formats::read_edge_list(network)?;
    if g.node_count() == 0 {
        return Err(CliError::config("empty network"));
    }
    let ctx = &cfg.context;
    let mut problems = Vec::new();
    if g.node_count() != ctx.nodes {
        problems.push(format!("{} nodes, expected {}", g.node_count(), ctx.nodes));
    }
    let regular_degree = g.regular_degree();
    if regular_degree != Some(ctx.degree) {
        problems.push(format!("not {}-regular", ctx.degree));
    }
    let clustering = global_clustering(&g);
    let tol = cfg.validate.clustering_tolerance;
    match clustering {
        Some(c) if (c - ctx.clustering).abs() <= tol => {}
        Some(c) => problems.push(format!("clustering {c:.6} outside {} +- {tol}", ctx.clustering)),
        None => problems.push("clustering undefined".into()),
    }
    let census = subgraph_census(&g, &family).ok().map(|c| c.counts);
    Ok(ValidateReport {
        nodes: g.node_count(),
        edges: g.edge_count(),
        regular_degree,
        clustering,
        census,
        kinds: formats::kind_names(&family),
        problems,
    })
}
