//! On-disk formats: family and catalog JSON, archive JSON and CSV, time
//! series CSV, edge lists and the run manifest.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use netdiv_core::archive::ArchiveTree;
use netdiv_core::cma::RealizationConfig;
use netdiv_core::diophantine::{MutationCatalog, MutationVector};
use netdiv_core::search::{SearchStats, SeriesRow};
use netdiv_core::{Context, Graph, NetworkSpec, SubgraphFamily, SubgraphKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult, RuntimeContext};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KindEntry {
    name: String,
    /// Edge list over local roles; enough on its own.
    #[serde(default)]
    pattern: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    nodes: Option<usize>,
    #[serde(default)]
    edges: Option<usize>,
    #[serde(default)]
    triangles: Option<usize>,
    #[serde(default)]
    degrees: Option<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    kinds: Vec<KindEntry>,
}

fn kind_from_entry(e: KindEntry) -> CliResult<SubgraphKind> {
    let bad = |what: &str| CliError::config(format!("kind `{}`: {what}", e.name));
    let kind = match (&e.pattern, &e.degrees) {
        (Some(p), _) => {
            let nodes = e
                .nodes
                .unwrap_or_else(|| p.iter().flatten().max().map_or(0, |m| m + 1));
            let k = SubgraphKind::from_pattern(&e.name, nodes, p.clone()).map_err(CliError::config)?;
            let mismatch = e.edges.is_some_and(|x| x != k.edges)
                || e.triangles.is_some_and(|x| x != k.triangles)
                || e.degrees.as_ref().is_some_and(|d| *d != k.degrees);
            if mismatch {
                return Err(bad("counts disagree with the pattern"));
            }
            k
        }
        (None, Some(d)) => {
            let (Some(nodes), Some(edges), Some(triangles)) = (e.nodes, e.edges, e.triangles) else {
                return Err(bad("needs a pattern or nodes, edges, triangles and degrees"));
            };
            SubgraphKind::new(&e.name, nodes, edges, triangles, d.clone()).map_err(CliError::config)?
        }
        (None, None) => return Err(bad("needs a pattern or nodes, edges, triangles and degrees")),
    };
    Ok(kind)
}

pub fn parse_family(text: &str) -> CliResult<SubgraphFamily> {
    let file: FamilyFile = serde_json::from_str(text).map_err(CliError::config)?;
    let kinds = file
        .kinds
        .into_iter()
        .map(kind_from_entry)
        .collect::<CliResult<Vec<_>>>()?;
    SubgraphFamily::new(kinds).map_err(CliError::config)
}

pub fn read_family(path: &Path) -> CliResult<SubgraphFamily> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    parse_family(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn family_json(family: &SubgraphFamily) -> serde_json::Value {
    serde_json::json!({ "kinds": family.kinds() })
}

pub fn hex(x: u64) -> String {
    format!("{x:016x}")
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CatalogFile {
    pub family_hash: String,
    pub kinds: Vec<String>,
    pub max_size: u32,
    pub entries: Vec<MutationVector>,
}

impl CatalogFile {
    pub fn new(family: &SubgraphFamily, catalog: &MutationCatalog) -> Self {
        CatalogFile {
            family_hash: hex(family.digest()),
            kinds: kind_names(family),
            max_size: catalog.max_size(),
            entries: catalog.entries().to_vec(),
        }
    }

    /// The catalog, provided it was built for `family`.
    pub fn into_catalog(self, family: &SubgraphFamily) -> CliResult<MutationCatalog> {
        if self.family_hash != hex(family.digest()) {
            return Err(CliError::config("catalog was built for a different family"));
        }
        if self.entries.iter().any(|e| !e.conserves(family)) {
            return Err(CliError::config("catalog holds a non-conserving entry"));
        }
        Ok(MutationCatalog::from_entries(self.entries, self.max_size))
    }
}

pub fn kind_names(family: &SubgraphFamily) -> Vec<String> {
    family.kinds().iter().map(|k| k.name.clone()).collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path).runtime(format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, value).runtime("serializing JSON")?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EliteRecord {
    pub counts: Vec<i64>,
    pub fitness: f64,
    pub clustering: f64,
    pub realization_seed: u64,
    pub iteration: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CellRecord {
    pub lo: Vec<i64>,
    pub side: i64,
    pub depth: u32,
    pub visits: u64,
    pub interest_count: u64,
    pub interest_mean: f64,
    pub interest_variance: f64,
    pub elite: EliteRecord,
}

/// Everything needed to re-create the archived networks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArchiveFile {
    pub context: Context,
    pub kinds: Vec<String>,
    pub family_hash: String,
    pub mode: String,
    pub master_seed: u64,
    pub realization: RealizationConfig,
    pub stats: SearchStats,
    pub cells: Vec<CellRecord>,
}

impl ArchiveFile {
    pub fn spec(&self, cell: usize) -> NetworkSpec {
        NetworkSpec::new(self.cells[cell].elite.counts.clone(), self.context)
    }
}

pub fn cell_records(archive: &ArchiveTree) -> Vec<CellRecord> {
    archive
        .snapshot()
        .into_iter()
        .map(|c| {
            let e = c.elite.expect("snapshot holds occupied cells");
            CellRecord {
                lo: c.lo,
                side: c.side,
                depth: c.depth,
                visits: c.visits,
                interest_count: c.interest.count(),
                interest_mean: c.interest.mean(),
                interest_variance: c.interest.variance(),
                elite: EliteRecord {
                    counts: e.spec.counts,
                    fitness: e.fitness,
                    clustering: e.clustering,
                    realization_seed: e.realization_seed,
                    iteration: e.iteration,
                },
            }
        })
        .collect()
}

/// One elite per row.
pub fn write_archive_csv(path: &Path, file: &ArchiveFile) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["cell".to_string(), "depth".into(), "side".into()];
    header.extend(file.kinds.iter().map(|k| format!("lo_{k}")));
    header.extend(file.kinds.iter().cloned());
    header.extend(
        [
            "fitness",
            "clustering",
            "visits",
            "interest_count",
            "interest_mean",
            "interest_variance",
            "realization_seed",
            "iteration",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    for (i, c) in file.cells.iter().enumerate() {
        let mut row = vec![i.to_string(), c.depth.to_string(), c.side.to_string()];
        row.extend(c.lo.iter().map(i64::to_string));
        row.extend(c.elite.counts.iter().map(i64::to_string));
        row.extend([
            c.elite.fitness.to_string(),
            c.elite.clustering.to_string(),
            c.visits.to_string(),
            c.interest_count.to_string(),
            c.interest_mean.to_string(),
            c.interest_variance.to_string(),
            c.elite.realization_seed.to_string(),
            c.elite.iteration.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_series_csv(path: &Path, series: &[SeriesRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in series {
        w.serialize(row)?;
    }
    if series.is_empty() {
        w.write_record([
            "iteration",
            "new_cells",
            "revisits",
            "valid_networks",
            "distinct_networks",
            "elites",
            "refinements",
            "mean_leaf_side",
            "band_lo",
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_series_csv(path: &Path) -> CliResult<Vec<SeriesRow>> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    r.deserialize()
        .collect::<Result<Vec<SeriesRow>, _>>()
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Writes `g` as an edge list, gzipped when the name ends in `.gz`.
pub fn write_edge_list(path: &Path, g: &Graph) -> CliResult<()> {
    let mut text = String::new();
    g.write_edge_list(&mut text).expect("writing to a string");
    let file = File::create(path).runtime(format!("creating {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "gz") {
        let mut enc = GzEncoder::new(BufWriter::new(file), Compression::default());
        enc.write_all(text.as_bytes())?;
        enc.finish()?.flush()?;
    } else {
        let mut w = BufWriter::new(file);
        w.write_all(text.as_bytes())?;
        w.flush()?;
    }
    Ok(())
}

pub fn read_edge_list(path: &Path) -> CliResult<Graph> {
    let mut file = File::open(path).map_err(|e| CliError::config(format!("cannot open {}: {e}", path.display())))?;
    let mut text = String::new();
    if path.extension().is_some_and(|e| e == "gz") {
        GzDecoder::new(file).read_to_string(&mut text)
    } else {
        file.read_to_string(&mut text)
    }
    .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    Graph::read_edge_list(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub master_seed: u64,
    pub family_hash: String,
}

pub fn version() -> String {
    match option_env!("NETDIV_GIT_DESCRIBE") {
        Some(d) if !d.is_empty() => format!("{} ({d})", env!("CARGO_PKG_VERSION")),
        _ => env!("CARGO_PKG_VERSION").to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_from_patterns_and_counts() {
        let f = parse_family(
            r#"{"kinds": [
                {"name": "tri", "pattern": [[0,1],[1,2],[0,2]]},
                {"name": "sq", "nodes": 4, "edges": 4, "triangles": 0, "degrees": [2,2,2,2]}
            ]}"#,
        )
        .unwrap();
        assert_eq!(f.triangle_row(), [1, 0]);
        assert_eq!(f.edge_row(), [3, 4]);
        assert!(f.kinds()[1].pattern.is_some());
    }

    #[test]
    fn family_without_clustering_is_rejected() {
        let err = parse_family(r#"{"kinds": [{"name": "sq", "pattern": [[0,1],[1,2],[2,3],[0,3]]}]}"#);
        assert!(matches!(err, Err(CliError::Config(_))));
        let err = parse_family(r#"{"kinds": [{"name": "tri", "pattern": [[0,1],[1,2],[0,2]], "edges": 4}]}"#);
        assert!(matches!(err, Err(CliError::Config(_))));
    }

    #[test]
    fn catalog_round_trip_checks_family() {
        let f = SubgraphFamily::default_family();
        let cat = MutationCatalog::build(&f, 4).unwrap();
        let text = serde_json::to_string(&CatalogFile::new(&f, &cat)).unwrap();
        let back: CatalogFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_catalog(&f).unwrap().entries(), cat.entries());
        let other = SubgraphFamily::from_shapes(&[netdiv_core::family::Shape::Triangle]);
        let back: CatalogFile = serde_json::from_str(&text).unwrap();
        assert!(back.into_catalog(&other).is_err());
    }

    #[test]
    fn edge_lists_round_trip_plain_and_gzip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 0), (3, 4)]).unwrap();
        for name in ["g.edges", "g.edges.gz"] {
            let p = dir.path().join(name);
            write_edge_list(&p, &g).unwrap();
            assert_eq!(read_edge_list(&p).unwrap(), g);
        }
    }
}
