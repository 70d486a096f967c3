//! Nine structural descriptors per graph, used as a non-topological baseline.

use std::collections::VecDeque;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::graph::{Graph, GraphDataset};

/// CSV header of the feature matrix.
pub const FEATURE_CSV_HEADER: &str = "graph_id,label,density,diameter,clustering,spectral_gap,assortativity,cliques,components,motif3_open,motif3_closed";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureVector {
    pub density: f64,
    /// Longest finite shortest path over all components. Not normalized.
    pub diameter: f64,
    /// Mean local clustering coefficient; nodes of degree < 2 count as 0.
    pub clustering_coefficient: f64,
    /// Largest minus second-largest adjacency eigenvalue.
    pub spectral_gap: f64,
    /// Degree Pearson correlation over edges; 0 when undefined.
    pub assortativity: f64,
    pub clique_number: usize,
    pub component_count: usize,
    /// Open three-node paths divided by `C(n, 3)`.
    pub motif3_open: f64,
    /// Triangles divided by `C(n, 3)`.
    pub motif3_closed: f64,
}

impl FeatureVector {
    pub fn as_array(&self) -> [f64; 9] {
        [
            self.density,
            self.diameter,
            self.clustering_coefficient,
            self.spectral_gap,
            self.assortativity,
            self.clique_number as f64,
            self.component_count as f64,
            self.motif3_open,
            self.motif3_closed,
        ]
    }

    pub fn csv_row(&self, graph_id: usize, label: Option<usize>) -> String {
        let mut out = format!(
            "{graph_id},{}",
            label.map_or(String::new(), |l| l.to_string())
        );
        for v in self.as_array() {
            let _ = write!(out, ",{}", crate::format_float(v));
        }
        out
    }
}

/// Raw counts of connected three-node subgraphs: `(open paths, triangles)`.
pub fn motif3_counts(g: &Graph) -> (u64, u64) {
    let triangles = triangle_count(g);
    let wedges: u64 = (0..g.num_nodes())
        .map(|v| {
            let d = g.degree(v) as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    (wedges - 3 * triangles, triangles)
}

fn triangle_count(g: &Graph) -> u64 {
    let mut count = 0u64;
    for &(u, v) in g.edges() {
        count += sorted_intersection_above(g.neighbors(u), g.neighbors(v), v) as u64;
    }
    count
}

/// Number of common elements greater than `floor`.
fn sorted_intersection_above(a: &[usize], b: &[usize], floor: usize) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a[i] > floor {
                    count += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }
    count
}

fn local_clustering(g: &Graph, v: usize) -> f64 {
    let nbrs = g.neighbors(v);
    let k = nbrs.len();
    if k < 2 {
        return 0.0;
    }
    let links: usize = nbrs
        .iter()
        .map(|&u| sorted_intersection_above(g.neighbors(u), nbrs, u))
        .sum();
    2.0 * links as f64 / (k * (k - 1)) as f64
}

fn eccentricity_max(g: &Graph) -> usize {
    let n = g.num_nodes();
    let mut hops = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let mut best = 0;
    for source in 0..n {
        hops.fill(usize::MAX);
        hops[source] = 0;
        queue.push_back(source);
        while let Some(node) = queue.pop_front() {
            best = best.max(hops[node]);
            for &next in g.neighbors(node) {
                if hops[next] == usize::MAX {
                    hops[next] = hops[node] + 1;
                    queue.push_back(next);
                }
            }
        }
    }
    best
}

fn spectral_gap(g: &Graph) -> f64 {
    let n = g.num_nodes();
    if n < 2 {
        return 0.0;
    }
    let mut adjacency = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in g.edges() {
        adjacency[(u, v)] = 1.0;
        adjacency[(v, u)] = 1.0;
    }
    let mut eigenvalues: Vec<f64> = adjacency.symmetric_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    eigenvalues[0] - eigenvalues[1]
}

fn degree_assortativity(g: &Graph) -> f64 {
    if g.num_edges() == 0 {
        return 0.0;
    }
    // Each undirected edge contributes both orientations.
    let m2 = 2.0 * g.num_edges() as f64;
    let (mut sum, mut sum_sq, mut sum_prod) = (0.0, 0.0, 0.0);
    for &(u, v) in g.edges() {
        let (du, dv) = (g.degree(u) as f64, g.degree(v) as f64);
        sum += du + dv;
        sum_sq += du * du + dv * dv;
        sum_prod += 2.0 * du * dv;
    }
    let mean = sum / m2;
    let variance = sum_sq / m2 - mean * mean;
    if variance <= 1e-12 * mean.max(1.0) * mean.max(1.0) {
        return 0.0;
    }
    ((sum_prod / m2 - mean * mean) / variance).clamp(-1.0, 1.0)
}

/// Nodes in degeneracy order (repeatedly removing a minimum-degree node).
fn degeneracy_order(g: &Graph) -> Vec<usize> {
    let n = g.num_nodes();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); max_degree + 1];
    for v in 0..n {
        buckets[degree[v]].push(v);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut low = 0;
    while order.len() < n {
        low = low.min(max_degree);
        while buckets[low].is_empty() {
            low += 1;
        }
        let v = buckets[low].pop().expect("non-empty bucket");
        if removed[v] || degree[v] != low {
            continue;
        }
        removed[v] = true;
        order.push(v);
        for &u in g.neighbors(v) {
            if !removed[u] {
                degree[u] -= 1;
                buckets[degree[u]].push(u);
                low = low.min(degree[u]);
            }
        }
    }
    order
}

/// Size of a maximum clique, by branch and bound over degeneracy-ordered
/// neighborhoods.
pub fn clique_number(g: &Graph) -> usize {
    let n = g.num_nodes();
    if n == 0 {
        return 0;
    }
    let order = degeneracy_order(g);
    let mut position = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut best = 1;
    for &v in &order {
        let later: Vec<usize> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| position[u] > position[v])
            .collect();
        if later.len() + 1 > best {
            expand(g, 1, later, &mut best);
        }
    }
    best
}

fn expand(g: &Graph, size: usize, mut candidates: Vec<usize>, best: &mut usize) {
    if candidates.is_empty() {
        *best = (*best).max(size);
        return;
    }
    while let Some(v) = candidates.pop() {
        if size + candidates.len() < *best {
            return;
        }
        let next: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&u| g.has_edge(u, v))
            .collect();
        expand(g, size + 1, next, best);
    }
}

/// Computes all nine descriptors of `g`.
pub fn compute_features(g: &Graph) -> FeatureVector {
    let n = g.num_nodes();
    let density = if n >= 2 {
        2.0 * g.num_edges() as f64 / (n * (n - 1)) as f64
    } else {
        0.0
    };
    let clustering = if n == 0 {
        0.0
    } else {
        (0..n).map(|v| local_clustering(g, v)).sum::<f64>() / n as f64
    };
    let (open, closed) = motif3_counts(g);
    let triples = if n >= 3 {
        (n * (n - 1) * (n - 2)) as f64 / 6.0
    } else {
        0.0
    };
    let normalize = |count: u64| {
        if triples > 0.0 {
            count as f64 / triples
        } else {
            0.0
        }
    };
    FeatureVector {
        density,
        diameter: eccentricity_max(g) as f64,
        clustering_coefficient: clustering,
        spectral_gap: spectral_gap(g),
        assortativity: degree_assortativity(g),
        clique_number: clique_number(g),
        component_count: g.connected_components().len(),
        motif3_open: normalize(open),
        motif3_closed: normalize(closed),
    }
}

/// One feature row per graph, in dataset order.
pub fn feature_matrix(ds: &GraphDataset) -> Vec<FeatureVector> {
    ds.graphs.par_iter().map(compute_features).collect()
}
