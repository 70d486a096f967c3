//! Small canonical instances shared by tests and documentation.
//!
//! Every fixture is also stored on disk under `fixtures/<name>/` as a
//! one-graph TUDataset directory plus an `expected.json` file holding the
//! frozen expected diagrams. The weighted fixture additionally carries
//! `<name>_edge_attributes.txt` with one weight per directed edge line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::{build_flag_filtration, Filtration};
use crate::graph::{graph_from_edge_list, parse_tu_dataset, write_tu_dataset, Graph, GraphDataset};
use crate::metric::{shortest_path_matrix, DistanceMatrix};
use crate::persistence::{diagram_from_json, PersistenceDiagram, PointRecord};

/// Where an expected value comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    /// Taken from a published worked example.
    Published { source: String },
    /// Follows immediately from the definitions.
    Immediate,
    /// Computed once by an independent brute-force oracle and frozen.
    Oracle { oracle: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedValue {
    pub value: serde_json::Value,
    pub provenance: Provenance,
}

/// Contents of a fixture's `expected.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedFile {
    pub name: String,
    /// Filtration threshold the diagrams were computed with.
    pub threshold: f64,
    pub artifacts: BTreeMap<String, ExpectedValue>,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub graph: Graph,
    /// Edge weights parallel to `graph.edges()`; `None` means unit weights.
    pub weights: Option<Vec<f64>>,
    pub threshold: f64,
    pub expected: BTreeMap<String, ExpectedValue>,
}

impl Fixture {
    /// Unnormalized shortest-path distances (weighted if the fixture has
    /// weights).
    pub fn distances(&self) -> DistanceMatrix {
        match &self.weights {
            None => shortest_path_matrix(&self.graph),
            Some(w) => weighted_shortest_paths(&self.graph, w),
        }
    }

    pub fn filtration(&self) -> Result<Filtration> {
        build_flag_filtration(&self.distances(), 2, self.threshold)
    }

    /// Expected diagram stored under `artifact` (`"h0"` or `"h1"`).
    pub fn expected_diagram(&self, artifact: &str) -> Option<PersistenceDiagram> {
        let entry = self.expected.get(artifact)?;
        let dim = if artifact == "h0" { 0 } else { 1 };
        diagram_from_json(&entry.value.to_string(), dim, self.threshold).ok()
    }
}

/// All-pairs weighted shortest paths by Floyd-Warshall.
pub fn weighted_shortest_paths(g: &Graph, weights: &[f64]) -> DistanceMatrix {
    let n = g.num_nodes();
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for (&(u, v), &w) in g.edges().iter().zip(weights) {
        d[u * n + v] = d[u * n + v].min(w);
        d[v * n + u] = d[v * n + u].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let through = d[i * n + k] + d[k * n + j];
                if through < d[i * n + j] {
                    d[i * n + j] = through;
                }
            }
        }
    }
    DistanceMatrix::from_rows(n, d).expect("shortest paths form a distance matrix")
}

/// Node names of the six-node weighted example, in index order.
pub const WEIGHTED_HOLE_NODES: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

/// Six-node weighted graph whose Rips filtration over weighted path
/// lengths forms the loop C-D-F-E at scale 3 and fills it with the
/// triangles CDE and DEF at scale 4. Weights:
/// A-B 1, A-C 1, B-C 1, C-D 2, C-E 2, D-F 3, E-F 3, D-E 4.
pub fn weighted_hole_graph() -> (Graph, Vec<f64>) {
    let (a, b, c, d, e, f) = (0, 1, 2, 3, 4, 5);
    let weighted = [
        ((a, b), 1.0),
        ((a, c), 1.0),
        ((b, c), 1.0),
        ((c, d), 2.0),
        ((c, e), 2.0),
        ((d, e), 4.0),
        ((d, f), 3.0),
        ((e, f), 3.0),
    ];
    let edges: Vec<_> = weighted.iter().map(|&(e, _)| e).collect();
    let graph = graph_from_edge_list(6, &edges).expect("valid fixture");
    let weights = graph
        .edges()
        .iter()
        .map(|e| {
            weighted
                .iter()
                .find(|(w, _)| w == e)
                .expect("edge listed")
                .1
        })
        .collect();
    (graph, weights)
}

/// Seeded `G(12, 0.3)` random graph.
pub fn random12_graph() -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut edges = Vec::new();
    for i in 0..12 {
        for j in i + 1..12 {
            if rng.gen::<f64>() < 0.3 {
                edges.push((i, j));
            }
        }
    }
    graph_from_edge_list(12, &edges).expect("valid fixture")
}

struct Spec {
    name: &'static str,
    graph: Graph,
    weights: Option<Vec<f64>>,
    expected_json: &'static str,
}

fn specs() -> Vec<Spec> {
    let edges = |n, e: &[(usize, usize)]| graph_from_edge_list(n, e).expect("valid fixture");
    let (hole, hole_weights) = weighted_hole_graph();
    vec![
        Spec {
            name: "p3",
            graph: edges(3, &[(0, 1), (1, 2)]),
            weights: None,
            expected_json: include_str!("../fixtures/p3/expected.json"),
        },
        Spec {
            name: "k3",
            graph: edges(3, &[(0, 1), (1, 2), (0, 2)]),
            weights: None,
            expected_json: include_str!("../fixtures/k3/expected.json"),
        },
        Spec {
            name: "c4",
            graph: edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
            weights: None,
            expected_json: include_str!("../fixtures/c4/expected.json"),
        },
        Spec {
            name: "two_components",
            graph: edges(4, &[(0, 1), (2, 3)]),
            weights: None,
            expected_json: include_str!("../fixtures/two_components/expected.json"),
        },
        Spec {
            name: "edgeless",
            graph: Graph::empty(4),
            weights: None,
            expected_json: include_str!("../fixtures/edgeless/expected.json"),
        },
        Spec {
            name: "weighted_hole",
            graph: hole,
            weights: Some(hole_weights),
            expected_json: include_str!("../fixtures/weighted_hole/expected.json"),
        },
        Spec {
            name: "random12",
            graph: random12_graph(),
            weights: None,
            expected_json: include_str!("../fixtures/random12/expected.json"),
        },
    ]
}

/// The fixture catalog. Names are stable identifiers.
pub fn fixture_catalog() -> Vec<Fixture> {
    specs()
        .into_iter()
        .map(|s| {
            let file: ExpectedFile =
                serde_json::from_str(s.expected_json).expect("embedded expected.json parses");
            assert_eq!(
                file.name, s.name,
                "expected.json belongs to another fixture"
            );
            let mut fixture = Fixture {
                name: s.name.to_string(),
                graph: s.graph,
                weights: s.weights,
                threshold: 1.0,
                expected: file.artifacts,
            };
            // full filtration: every finite distance enters
            let max = fixture.distances().max_finite();
            if max > 0.0 {
                fixture.threshold = max;
            }
            fixture
        })
        .collect()
}

pub fn fixture(name: &str) -> Option<Fixture> {
    fixture_catalog().into_iter().find(|f| f.name == name)
}

/// Writes `f` as a one-graph TUDataset named after the fixture, plus the
/// edge attribute file when the fixture is weighted.
pub fn write_fixture_dir(f: &Fixture, dir: &Path) -> Result<()> {
    let ds = GraphDataset::new(f.name.clone(), vec![f.graph.clone().with_label(Some(0))]);
    write_tu_dataset(&ds, dir)?;
    if let Some(weights) = &f.weights {
        let mut body = String::new();
        for w in weights {
            // both directions of the edge, matching the `_A` file
            let _ = writeln!(body, "{w}\n{w}");
        }
        let path = dir.join(format!("{}_edge_attributes.txt", f.name));
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Reads a one-graph fixture directory written by [`write_fixture_dir`].
/// Weights, if present, are returned parallel to `graph.edges()`.
pub fn read_fixture_dir(dir: &Path, name: &str) -> Result<(Graph, Option<Vec<f64>>)> {
    let ds = parse_tu_dataset(dir, name)?;
    if ds.len() != 1 {
        return Err(Error::validation(format!(
            "fixture {name} holds {} graphs",
            ds.len()
        )));
    }
    let graph = ds.graphs.into_iter().next().expect("one graph");
    let attr_name = format!("{name}_edge_attributes.txt");
    let attr_path = dir.join(&attr_name);
    if !attr_path.exists() {
        return Ok((graph, None));
    }
    let a_path = dir.join(format!("{name}_A.txt"));
    let a_text = fs::read_to_string(&a_path).map_err(|e| Error::io(&a_path, e))?;
    let attr_text = fs::read_to_string(&attr_path).map_err(|e| Error::io(&attr_path, e))?;
    let bad = |line: usize, message: String| Error::Format {
        file: attr_name.clone(),
        line,
        message,
    };
    let pairs: Vec<&str> = a_text.lines().filter(|l| !l.trim().is_empty()).collect();
    let values: Vec<&str> = attr_text.lines().filter(|l| !l.trim().is_empty()).collect();
    if pairs.len() != values.len() {
        return Err(bad(
            values.len(),
            format!("{} weights for {} edge lines", values.len(), pairs.len()),
        ));
    }
    let mut weight_of = BTreeMap::new();
    for (i, (pair, value)) in pairs.iter().zip(&values).enumerate() {
        let w: f64 = value.trim().parse().map_err(|_| {
            bad(
                i + 1,
                format!("expected a number, found {:?}", value.trim()),
            )
        })?;
        let ends: Vec<usize> = pair
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad(i + 1, format!("malformed edge line {pair:?}")))?;
        if ends.len() != 2 || ends[0] == 0 || ends[1] == 0 {
            return Err(bad(i + 1, format!("malformed edge line {pair:?}")));
        }
        let key = (ends[0].min(ends[1]) - 1, ends[0].max(ends[1]) - 1);
        if let Some(&prev) = weight_of.get(&key) {
            if prev != w {
                return Err(bad(
                    i + 1,
                    format!("edge {key:?} has weights {prev} and {w}"),
                ));
            }
        }
        weight_of.insert(key, w);
    }
    let weights = graph.edges().iter().map(|e| weight_of[e]).collect();
    Ok((graph, Some(weights)))
}

/// Expected-value entry for a diagram.
pub fn diagram_value(pd: &PersistenceDiagram, provenance: Provenance) -> ExpectedValue {
    let records: Vec<PointRecord> = pd.records();
    ExpectedValue {
        value: serde_json::to_value(records).expect("records serialize"),
        provenance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_required_fixtures() {
        let names: Vec<String> = fixture_catalog().into_iter().map(|f| f.name).collect();
        for required in [
            "p3",
            "k3",
            "c4",
            "two_components",
            "edgeless",
            "weighted_hole",
            "random12",
        ] {
            assert!(names.iter().any(|n| n == required), "missing {required}");
        }
    }

    #[test]
    fn every_expected_value_has_provenance() {
        for f in fixture_catalog() {
            assert!(!f.expected.is_empty(), "{} has no expectations", f.name);
            for (artifact, v) in &f.expected {
                if let Provenance::Oracle { oracle } = &v.provenance {
                    assert!(
                        !oracle.is_empty(),
                        "{}:{artifact} lacks an oracle name",
                        f.name
                    );
                }
            }
        }
    }

    #[test]
    fn fixture_dir_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for f in fixture_catalog() {
            let sub = dir.path().join(&f.name);
            write_fixture_dir(&f, &sub).unwrap();
            let (g, w) = read_fixture_dir(&sub, &f.name).unwrap();
            assert_eq!(g.edges(), f.graph.edges(), "{}", f.name);
            assert_eq!(g.num_nodes(), f.graph.num_nodes(), "{}", f.name);
            assert_eq!(w, f.weights, "{}", f.name);
        }
    }

    #[test]
    fn weighted_hole_distances() {
        let f = fixture("weighted_hole").unwrap();
        let d = f.distances();
        let idx = |name: &str| WEIGHTED_HOLE_NODES.iter().position(|&n| n == name).unwrap();
        assert_eq!(d.get(idx("C"), idx("D")), 2.0);
        assert_eq!(d.get(idx("D"), idx("F")), 3.0);
        assert_eq!(d.get(idx("D"), idx("E")), 4.0);
        assert_eq!(d.get(idx("C"), idx("F")), 5.0);
        assert_eq!(d.get(idx("A"), idx("F")), 6.0);
    }
}
