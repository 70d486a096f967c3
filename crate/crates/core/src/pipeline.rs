//! End-to-end orchestration: dataset in, feature matrices, diagrams or
//! distance matrices out. Graphs are processed in parallel and gathered in
//! dataset order, so every output is byte-identical across runs and thread
//! counts.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagram_distance::{pairwise_distance_matrix, Order};
use crate::error::{Error, Result};
use crate::features::{compute_features, FeatureVector, FEATURE_CSV_HEADER};
use crate::filtration::{build_flag_filtration, threshold_grid};
use crate::format_float;
use crate::graph::{parse_tu_dataset, Graph, GraphDataset};
use crate::metric::{resistance_distance_matrix, shortest_path_matrix, DistanceMatrix};
use crate::persistence::{persistence_h0, persistence_h1, PersistenceDiagram, PointRecord};
use crate::vectorize::{clamp, BettiWeight, SummaryVector, Vectorizer};

/// Largest deletion fraction accepted without an explicit override.
pub const MAX_PROTOCOL_DELETION: f64 = 0.45;

/// Deletion fractions of the robustness sweep: 0%, 5%, ..., 45%.
pub fn sweep_fractions() -> Vec<f64> {
    (0..10).map(|k| (5 * k) as f64 / 100.0).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphMetric {
    ShortestPath,
    Resistance,
}

impl FromStr for GraphMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spd" => Ok(GraphMetric::ShortestPath),
            "resistance" => Ok(GraphMetric::Resistance),
            other => Err(Error::validation(format!(
                "unknown metric {other:?} (expected spd or resistance)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorizerKind {
    Betti,
    Landscape,
    Silhouette,
}

impl FromStr for VectorizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "betti" => Ok(VectorizerKind::Betti),
            "landscape" => Ok(VectorizerKind::Landscape),
            "silhouette" => Ok(VectorizerKind::Silhouette),
            other => Err(Error::validation(format!(
                "unknown vectorizer {other:?} (expected betti, landscape or silhouette)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::validation(format!(
                "unknown format {other:?} (expected csv or json)"
            ))),
        }
    }
}

/// Parses a comma-separated list of homology dimensions, e.g. `0,1`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let mut dims = Vec::new();
    for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match token {
            "0" => dims.push(0),
            "1" => dims.push(1),
            other => {
                return Err(Error::validation(format!(
                    "unsupported dimension {other:?} (expected 0 or 1)"
                )))
            }
        }
    }
    dims.sort_unstable();
    dims.dedup();
    if dims.is_empty() {
        return Err(Error::validation("at least one dimension is required"));
    }
    Ok(dims)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub dataset_dir: PathBuf,
    pub dataset: String,
    pub metric: GraphMetric,
    pub steps: usize,
    /// Filtration cap as a fraction of the largest finite distance.
    pub max_threshold: f64,
    /// `None` selects the nine structural graph features.
    pub vectorizer: Option<VectorizerKind>,
    pub landscape_k: usize,
    pub silhouette_power: f64,
    pub betti_weight: BettiWeight,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub delete_fraction: f64,
    pub allow_large_deletion: bool,
    pub normalize: bool,
    pub format: OutputFormat,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            dataset_dir: PathBuf::from("."),
            dataset: String::new(),
            metric: GraphMetric::ShortestPath,
            steps: 100,
            max_threshold: 1.0,
            vectorizer: None,
            landscape_k: 1,
            silhouette_power: 1.0,
            betti_weight: BettiWeight::Constant,
            dims: vec![0, 1],
            seed: 0,
            delete_fraction: 0.0,
            allow_large_deletion: false,
            normalize: true,
            format: OutputFormat::Csv,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::validation(format!(
                "steps must be at least 2, got {}",
                self.steps
            )));
        }
        if !(self.max_threshold > 0.0 && self.max_threshold <= 1.0) {
            return Err(Error::validation(format!(
                "max threshold must lie in (0, 1], got {}",
                self.max_threshold
            )));
        }
        let upper = if self.allow_large_deletion {
            1.0
        } else {
            MAX_PROTOCOL_DELETION
        };
        if !(0.0..=upper).contains(&self.delete_fraction) {
            return Err(Error::validation(format!(
                "delete fraction must lie in [0, {upper}], got {}",
                self.delete_fraction
            )));
        }
        if self.landscape_k < 1 {
            return Err(Error::validation("landscape order must be at least 1"));
        }
        if !(self.silhouette_power >= 0.0) {
            return Err(Error::validation("silhouette power must be non-negative"));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d > 1) {
            return Err(Error::validation(
                "dims must be a non-empty subset of {0, 1}",
            ));
        }
        Ok(())
    }

    pub fn vectorizer(&self) -> Option<Vectorizer> {
        self.vectorizer.map(|kind| match kind {
            VectorizerKind::Betti => Vectorizer::Betti(self.betti_weight),
            VectorizerKind::Landscape => Vectorizer::Landscape {
                k: self.landscape_k,
            },
            VectorizerKind::Silhouette => Vectorizer::Silhouette {
                power: self.silhouette_power,
            },
        })
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        threshold_grid(self.steps)
    }
}

pub fn load_dataset(config: &PipelineConfig) -> Result<GraphDataset> {
    parse_tu_dataset(&config.dataset_dir, &config.dataset)
}

/// Distance matrix of `g` under the configured metric, normalized unless
/// disabled.
pub fn graph_distances(g: &Graph, config: &PipelineConfig) -> Result<DistanceMatrix> {
    let dm = match config.metric {
        GraphMetric::ShortestPath => shortest_path_matrix(g),
        GraphMetric::Resistance => resistance_distance_matrix(g)?,
    };
    Ok(if config.normalize { dm.normalize() } else { dm })
}

/// Diagrams of `g` for each configured dimension, in the order of
/// `config.dims`.
pub fn graph_diagrams(g: &Graph, config: &PipelineConfig) -> Result<Vec<PersistenceDiagram>> {
    let dm = graph_distances(g, config)?;
    let scale = dm.max_finite();
    let threshold = if scale > 0.0 {
        config.max_threshold * scale
    } else {
        config.max_threshold
    };
    let max_dim = if config.dims.contains(&1) { 2 } else { 1 };
    let f = build_flag_filtration(&dm, max_dim, threshold)?;
    config
        .dims
        .iter()
        .map(|&dim| match dim {
            0 => Ok(persistence_h0(&f)),
            _ => persistence_h1(&f),
        })
        .collect()
}

/// Diagrams of every graph, in dataset order.
pub fn dataset_diagrams(
    ds: &GraphDataset,
    config: &PipelineConfig,
) -> Result<Vec<Vec<PersistenceDiagram>>> {
    ds.graphs
        .par_iter()
        .map(|g| graph_diagrams(g, config))
        .collect()
}

fn label_text(label: Option<usize>) -> String {
    label.map_or(String::new(), |l| l.to_string())
}

#[derive(Serialize)]
struct FeatureRecord {
    graph_id: usize,
    label: Option<usize>,
    density: f64,
    diameter: f64,
    clustering: f64,
    spectral_gap: f64,
    assortativity: f64,
    cliques: usize,
    components: usize,
    motif3_open: f64,
    motif3_closed: f64,
}

impl FeatureRecord {
    fn new(graph_id: usize, label: Option<usize>, f: &FeatureVector) -> Self {
        FeatureRecord {
            graph_id,
            label,
            density: f.density,
            diameter: f.diameter,
            clustering: f.clustering_coefficient,
            spectral_gap: f.spectral_gap,
            assortativity: f.assortativity,
            cliques: f.clique_number,
            components: f.component_count,
            motif3_open: f.motif3_open,
            motif3_closed: f.motif3_closed,
        }
    }
}

#[derive(Serialize)]
struct VectorRecord<'a> {
    kind: String,
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    param: Option<f64>,
    values: &'a [f64],
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    graph_id: usize,
    label: Option<usize>,
    vectors: Vec<VectorRecord<'a>>,
}

#[derive(Serialize)]
struct SummaryDocument<'a> {
    dataset: &'a str,
    grid: &'a [f64],
    rows: Vec<SummaryRow<'a>>,
}

/// Per-graph summary vectors, one per configured dimension.
pub fn dataset_summaries(
    ds: &GraphDataset,
    config: &PipelineConfig,
) -> Result<Vec<Vec<SummaryVector>>> {
    let vectorizer = config
        .vectorizer()
        .ok_or_else(|| Error::validation("no vectorizer configured"))?;
    let grid = config.grid()?;
    ds.graphs
        .par_iter()
        .map(|g| {
            graph_diagrams(g, config)?
                .iter()
                .map(|pd| vectorizer.apply(pd, &grid))
                .collect()
        })
        .collect()
}

/// Feature matrix: the nine graph features when no vectorizer is set,
/// otherwise the concatenated summary vectors of every configured
/// dimension. Graph ids are 1-based.
pub fn featurize(ds: &GraphDataset, config: &PipelineConfig) -> Result<String> {
    config.validate()?;
    match config.vectorizer {
        None => {
            let rows: Vec<FeatureVector> = ds.graphs.par_iter().map(compute_features).collect();
            Ok(match config.format {
                OutputFormat::Csv => {
                    let mut out = String::from(FEATURE_CSV_HEADER);
                    out.push('\n');
                    for (i, (g, f)) in ds.graphs.iter().zip(&rows).enumerate() {
                        out.push_str(&f.csv_row(i + 1, g.label()));
                        out.push('\n');
                    }
                    out
                }
                OutputFormat::Json => {
                    let records: Vec<FeatureRecord> = ds
                        .graphs
                        .iter()
                        .zip(&rows)
                        .enumerate()
                        .map(|(i, (g, f))| FeatureRecord::new(i + 1, g.label(), f))
                        .collect();
                    to_json(&records)
                }
            })
        }
        Some(kind) => {
            let summaries = dataset_summaries(ds, config)?;
            let grid = config.grid()?;
            Ok(match config.format {
                OutputFormat::Csv => {
                    let prefix = match kind {
                        VectorizerKind::Betti => "betti",
                        VectorizerKind::Landscape => "landscape",
                        VectorizerKind::Silhouette => "silhouette",
                    };
                    let mut out = String::from("graph_id,label");
                    for &dim in &config.dims {
                        for i in 1..=grid.len() {
                            let _ = write!(out, ",{prefix}{dim}_{i}");
                        }
                    }
                    out.push('\n');
                    for (i, (g, vectors)) in ds.graphs.iter().zip(&summaries).enumerate() {
                        let _ = write!(out, "{},{}", i + 1, label_text(g.label()));
                        for v in vectors.iter().flat_map(|sv| &sv.values) {
                            let _ = write!(out, ",{}", format_float(*v));
                        }
                        out.push('\n');
                    }
                    out
                }
                OutputFormat::Json => {
                    let rows = ds
                        .graphs
                        .iter()
                        .zip(&summaries)
                        .enumerate()
                        .map(|(i, (g, vectors))| SummaryRow {
                            graph_id: i + 1,
                            label: g.label(),
                            vectors: vectors
                                .iter()
                                .map(|sv| VectorRecord {
                                    kind: sv.kind.to_string(),
                                    dim: sv.dim,
                                    param: sv.param,
                                    values: &sv.values,
                                })
                                .collect(),
                        })
                        .collect();
                    to_json(&SummaryDocument {
                        dataset: &ds.name,
                        grid: &grid,
                        rows,
                    })
                }
            })
        }
    }
}

/// Featurizes the dataset after deleting `config.delete_fraction` of the
/// edges of every graph.
pub fn perturb(ds: &GraphDataset, config: &PipelineConfig) -> Result<String> {
    config.validate()?;
    let perturbed = ds.delete_edges_random(config.delete_fraction, config.seed)?;
    featurize(&perturbed, config)
}

/// One `(file name, contents)` pair per sweep fraction.
pub fn perturb_sweep(ds: &GraphDataset, config: &PipelineConfig) -> Result<Vec<(String, String)>> {
    sweep_fractions()
        .into_iter()
        .map(|fraction| {
            let mut step = config.clone();
            step.delete_fraction = fraction;
            let name = format!(
                "{}_del{:02}.{}",
                ds.name,
                (fraction * 100.0).round() as usize,
                config.format.extension()
            );
            Ok((name, perturb(ds, &step)?))
        })
        .collect()
}

#[derive(Serialize)]
struct DiagramRow {
    graph_id: usize,
    label: Option<usize>,
    points: Vec<PointRecord>,
}

/// Persistence diagrams of every graph: CSV `graph_id,dim,birth,death`
/// or a JSON list of per-graph point records.
pub fn diagrams(ds: &GraphDataset, config: &PipelineConfig) -> Result<String> {
    config.validate()?;
    let all = dataset_diagrams(ds, config)?;
    Ok(match config.format {
        OutputFormat::Csv => {
            let mut out = String::from("graph_id,dim,birth,death\n");
            for (i, pds) in all.iter().enumerate() {
                for pd in pds {
                    pd.write_csv_rows(i + 1, &mut out);
                }
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<DiagramRow> = ds
                .graphs
                .iter()
                .zip(&all)
                .enumerate()
                .map(|(i, (g, pds))| DiagramRow {
                    graph_id: i + 1,
                    label: g.label(),
                    points: pds.iter().flat_map(PersistenceDiagram::records).collect(),
                })
                .collect();
            to_json(&rows)
        }
    })
}

#[derive(Serialize)]
struct DistanceDocument {
    ids: Vec<usize>,
    matrix: Vec<Vec<f64>>,
}

/// Pairwise distances between the clamped diagrams of a single dimension.
pub fn distances(ds: &GraphDataset, config: &PipelineConfig, order: Order) -> Result<String> {
    config.validate()?;
    if config.dims.len() != 1 {
        return Err(Error::validation(format!(
            "distances compare diagrams of one dimension; got dims {:?}",
            config.dims
        )));
    }
    let pds: Vec<PersistenceDiagram> = dataset_diagrams(ds, config)?
        .into_iter()
        .map(|mut v| clamp(&v.remove(0)))
        .collect();
    let matrix = pairwise_distance_matrix(&pds, order)?;
    let ids: Vec<usize> = (1..=pds.len()).collect();
    Ok(match config.format {
        OutputFormat::Csv => matrix.to_csv(&ids),
        OutputFormat::Json => {
            let rows = (0..matrix.size())
                .map(|i| (0..matrix.size()).map(|j| matrix.get(i, j)).collect())
                .collect();
            to_json(&DistanceDocument { ids, matrix: rows })
        }
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_from_edge_list;

    fn c4_dataset() -> GraphDataset {
        let c4 = graph_from_edge_list(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])
            .unwrap()
            .with_label(Some(0));
        GraphDataset::new("C4", vec![c4])
    }

    #[test]
    fn parses_options() {
        assert_eq!(parse_dims("1,0").unwrap(), vec![0, 1]);
        assert!(parse_dims("2").is_err());
        assert!(parse_dims("").is_err());
        assert_eq!(
            "spd".parse::<GraphMetric>().unwrap(),
            GraphMetric::ShortestPath
        );
        assert!("euclid".parse::<GraphMetric>().is_err());
        assert_eq!("json".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
    }

    #[test]
    fn validation() {
        let mut c = PipelineConfig::default();
        assert!(c.validate().is_ok());
        c.steps = 1;
        assert!(c.validate().is_err());
        let mut c = PipelineConfig::default();
        c.delete_fraction = 0.5;
        assert!(c.validate().is_err());
        c.allow_large_deletion = true;
        assert!(c.validate().is_ok());
        let mut c = PipelineConfig::default();
        c.max_threshold = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn c4_diagrams_before_and_after_normalization() {
        let ds = c4_dataset();
        let mut config = PipelineConfig {
            dims: vec![1],
            ..PipelineConfig::default()
        };
        let pd = &dataset_diagrams(&ds, &config).unwrap()[0][0];
        assert_eq!(pd.sorted_pairs(), vec![(0.5, 1.0)]);
        config.normalize = false;
        let pd = &dataset_diagrams(&ds, &config).unwrap()[0][0];
        assert_eq!(pd.sorted_pairs(), vec![(1.0, 2.0)]);
    }

    #[test]
    fn betti_featurize_shape() {
        let config = PipelineConfig {
            vectorizer: Some(VectorizerKind::Betti),
            steps: 5,
            ..PipelineConfig::default()
        };
        let out = featurize(&c4_dataset(), &config).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), 2 + 10);
        // H0 of C4 normalized: four classes until 0.5, one survivor to the cap.
        // H1: one loop on [0.5, 1).
        assert_eq!(lines[1], "1,0,4,4,1,1,0,0,0,1,1,0");
    }

    #[test]
    fn sweep_names() {
        let config = PipelineConfig {
            vectorizer: Some(VectorizerKind::Betti),
            steps: 3,
            ..PipelineConfig::default()
        };
        let files = perturb_sweep(&c4_dataset(), &config).unwrap();
        assert_eq!(files.len(), 10);
        assert_eq!(files[0].0, "C4_del00.csv");
        assert_eq!(files[9].0, "C4_del45.csv");
        assert_eq!(files[0].1, featurize(&c4_dataset(), &config).unwrap());
    }

    #[test]
    fn distance_requires_one_dim() {
        let config = PipelineConfig::default();
        assert!(distances(&c4_dataset(), &config, Order::Finite(1.0)).is_err());
        let config = PipelineConfig {
            dims: vec![0],
            ..PipelineConfig::default()
        };
        let csv = distances(&c4_dataset(), &config, Order::Finite(1.0)).unwrap();
        assert_eq!(csv, "id,1\n1,0\n");
    }
}
