//! Undirected unweighted graphs, TUDataset ingestion, and random edge deletion.
//!
//! A TUDataset directory holds three mandatory plain-text files for a dataset
//! `NAME`:
//!
//! * `NAME_A.txt`: one `i, j` line per directed edge, 1-based global node ids;
//! * `NAME_graph_indicator.txt`: line `k` holds the 1-based graph id of node `k`;
//! * `NAME_graph_labels.txt`: line `g` holds the class label of graph `g`.
//!
//! Optional attribute and label files are ignored.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// An undirected simple graph on nodes `0..num_nodes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    label: Option<usize>,
}

impl Graph {
    /// Builds a graph from an edge list. Symmetric duplicates collapse into
    /// one edge; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{num_nodes}"
                )));
            }
            if u == v {
                return Err(Error::validation(format!("self-loop on node {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self::from_sorted_unique(
            num_nodes,
            set.into_iter().collect(),
        ))
    }

    /// Edgeless graph on `num_nodes` nodes.
    pub fn empty(num_nodes: usize) -> Self {
        Self::from_sorted_unique(num_nodes, Vec::new())
    }

    fn from_sorted_unique(num_nodes: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); num_nodes];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph {
            num_nodes,
            edges,
            adjacency,
            label: None,
        }
    }

    pub fn with_label(mut self, label: Option<usize>) -> Self {
        self.label = label;
        self
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `node`.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.num_nodes && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn label(&self) -> Option<usize> {
        self.label
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.num_nodes];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.num_nodes {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut component = Vec::new();
            while let Some(node) = queue.pop_front() {
                component.push(node);
                for &next in &self.adjacency[node] {
                    if !seen[next] {
                        seen[next] = true;
                        queue.push_back(next);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }

    /// Removes `floor(fraction * |E|)` edges chosen uniformly without
    /// replacement by a seeded partial Fisher-Yates shuffle. Node count and
    /// label are kept.
    pub fn delete_edges_random(&self, fraction: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.delete_edges_with(fraction, &mut rng)
    }

    pub(crate) fn delete_edges_with(&self, fraction: f64, rng: &mut ChaCha8Rng) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::validation(format!(
                "deletion fraction {fraction} is outside [0, 1]"
            )));
        }
        let total = self.edges.len();
        let remove = deletion_count(fraction, total);
        let mut order: Vec<usize> = (0..total).collect();
        for i in 0..remove {
            let j = rng.gen_range(i..total);
            order.swap(i, j);
        }
        let mut removed = vec![false; total];
        for &idx in &order[..remove] {
            removed[idx] = true;
        }
        let kept = self
            .edges
            .iter()
            .zip(&removed)
            .filter(|(_, &gone)| !gone)
            .map(|(&e, _)| e)
            .collect();
        Ok(Self::from_sorted_unique(self.num_nodes, kept).with_label(self.label))
    }

    /// Returns the graph with node `i` renamed to `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.num_nodes {
            return Err(Error::validation(
                "permutation length differs from node count",
            ));
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(u, v)| (perm[u], perm[v]))
            .collect();
        Ok(Self::from_edges(self.num_nodes, &edges)?.with_label(self.label))
    }
}

/// `floor(fraction * total)`, tolerant to representation error such as
/// `0.29 * 100 = 28.999999999999996`.
pub fn deletion_count(fraction: f64, total: usize) -> usize {
    let raw = fraction * total as f64;
    let count = (raw + 1e-9).floor();
    (count.max(0.0) as usize).min(total)
}

/// Builds a graph from an edge list; see [`Graph::from_edges`].
pub fn graph_from_edge_list(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Graph> {
    Graph::from_edges(num_nodes, edges)
}

/// A named, ordered collection of labelled graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphDataset {
    pub name: String,
    pub graphs: Vec<Graph>,
    pub class_count: usize,
}

impl GraphDataset {
    pub fn new(name: impl Into<String>, graphs: Vec<Graph>) -> Self {
        let class_count = graphs
            .iter()
            .filter_map(Graph::label)
            .max()
            .map_or(0, |m| m + 1);
        GraphDataset {
            name: name.into(),
            graphs,
            class_count,
        }
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Applies [`Graph::delete_edges_random`] to every graph. Graph `i` draws
    /// from stream `i` of a generator seeded by `seed`, so the result does not
    /// depend on evaluation order.
    pub fn delete_edges_random(&self, fraction: f64, seed: u64) -> Result<Self> {
        let graphs = self
            .graphs
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                g.delete_edges_with(fraction, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GraphDataset {
            name: self.name.clone(),
            graphs,
            class_count: self.class_count,
        })
    }
}

fn read_lines(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_int(token: &str, file: &str, line: usize) -> Result<i64> {
    token.trim().parse::<i64>().map_err(|_| Error::Format {
        file: file.to_string(),
        line,
        message: format!("expected an integer, found {:?}", token.trim()),
    })
}

/// Non-blank lines of `text` with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Reads the TUDataset `name` from `root_dir`.
///
/// Node ids are relabelled to 0-based indices within each graph, in file
/// order. Each directed pair collapses into one undirected edge and
/// self-loops are dropped. Labels are remapped to `0..class_count` in
/// ascending order of their original values.
pub fn parse_tu_dataset(root_dir: &Path, name: &str) -> Result<GraphDataset> {
    let a_name = format!("{name}_A.txt");
    let ind_name = format!("{name}_graph_indicator.txt");
    let lab_name = format!("{name}_graph_labels.txt");
    let a_text = read_lines(&root_dir.join(&a_name))?;
    let ind_text = read_lines(&root_dir.join(&ind_name))?;
    let lab_text = read_lines(&root_dir.join(&lab_name))?;

    let mut raw_labels = Vec::new();
    for (line, text) in content_lines(&lab_text) {
        raw_labels.push(parse_int(text, &lab_name, line)?);
    }
    let graph_count = raw_labels.len();

    // graph index and local index of every global node
    let mut owner = Vec::new();
    let mut local = Vec::new();
    let mut sizes = vec![0usize; graph_count];
    for (line, text) in content_lines(&ind_text) {
        let id = parse_int(text, &ind_name, line)?;
        if id < 1 || id as usize > graph_count {
            return Err(Error::Format {
                file: ind_name.clone(),
                line,
                message: format!("graph id {id} outside 1..={graph_count}"),
            });
        }
        let g = id as usize - 1;
        owner.push(g);
        local.push(sizes[g]);
        sizes[g] += 1;
    }

    let mut edge_sets: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); graph_count];
    for (line, text) in content_lines(&a_text) {
        let mut parts = text.split(',');
        let (Some(first), Some(second), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Format {
                file: a_name.clone(),
                line,
                message: format!("expected \"i, j\", found {text:?}"),
            });
        };
        let i = parse_int(first, &a_name, line)?;
        let j = parse_int(second, &a_name, line)?;
        let node_count = owner.len() as i64;
        for id in [i, j] {
            if id < 1 || id > node_count {
                return Err(Error::Format {
                    file: a_name.clone(),
                    line,
                    message: format!("node id {id} outside 1..={node_count}"),
                });
            }
        }
        let (i, j) = (i as usize - 1, j as usize - 1);
        if owner[i] != owner[j] {
            return Err(Error::Format {
                file: a_name.clone(),
                line,
                message: format!(
                    "edge ({}, {}) joins graph {} and graph {}",
                    i + 1,
                    j + 1,
                    owner[i] + 1,
                    owner[j] + 1
                ),
            });
        }
        if i == j {
            continue;
        }
        let (u, v) = (local[i], local[j]);
        edge_sets[owner[i]].insert((u.min(v), u.max(v)));
    }

    let mut distinct: Vec<i64> = raw_labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let graphs = edge_sets
        .into_iter()
        .zip(&sizes)
        .zip(&raw_labels)
        .map(|((edges, &n), raw)| {
            let class = distinct.binary_search(raw).expect("label present");
            Graph::from_sorted_unique(n, edges.into_iter().collect()).with_label(Some(class))
        })
        .collect();
    Ok(GraphDataset {
        name: name.to_string(),
        graphs,
        class_count: distinct.len(),
    })
}

/// Writes `ds` as a TUDataset directory readable by [`parse_tu_dataset`].
/// Each undirected edge is written in both directions.
pub fn write_tu_dataset(ds: &GraphDataset, root_dir: &Path) -> Result<()> {
    fs::create_dir_all(root_dir).map_err(|e| Error::io(root_dir, e))?;
    let mut a = String::new();
    let mut indicator = String::new();
    let mut labels = String::new();
    let mut offset = 0usize;
    for (g, graph) in ds.graphs.iter().enumerate() {
        for _ in 0..graph.num_nodes() {
            let _ = writeln!(indicator, "{}", g + 1);
        }
        for &(u, v) in graph.edges() {
            let _ = writeln!(a, "{}, {}", offset + u + 1, offset + v + 1);
            let _ = writeln!(a, "{}, {}", offset + v + 1, offset + u + 1);
        }
        let _ = writeln!(labels, "{}", graph.label().unwrap_or(0));
        offset += graph.num_nodes();
    }
    let name = &ds.name;
    for (suffix, body) in [
        ("A", a),
        ("graph_indicator", indicator),
        ("graph_labels", labels),
    ] {
        let path = root_dir.join(format!("{name}_{suffix}.txt"));
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
