//! Node-pair distance matrices: hop distance, effective resistance, and
//! normalization to the unit interval.

use std::collections::VecDeque;
use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Relative cutoff below which Laplacian eigenvalues are treated as zero.
pub const PINV_RELATIVE_CUTOFF: f64 = 1e-9;

/// Resistances closer than this relative gap are treated as equal. The
/// eigensolver leaves rounding noise of a few ulps on values that are equal
/// in exact arithmetic, which would otherwise break filtration ties and
/// create spurious near-zero persistence pairs.
pub const RESISTANCE_TIE_TOLERANCE: f64 = 1e-10;

/// Dense symmetric distance matrix with zero diagonal. Entries between
/// different connected components are `f64::INFINITY`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from row-major entries, checking shape, symmetry,
    /// non-negativity and the zero diagonal.
    pub fn from_rows(size: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::validation(format!(
                "expected {} entries for a {size}x{size} matrix, got {}",
                size * size,
                entries.len()
            )));
        }
        for i in 0..size {
            if entries[i * size + i] != 0.0 {
                return Err(Error::validation(format!("diagonal entry {i} is not zero")));
            }
            for j in 0..size {
                let d = entries[i * size + j];
                if d.is_nan() || d < 0.0 {
                    return Err(Error::validation(format!(
                        "entry ({i}, {j}) = {d} is not a distance"
                    )));
                }
                if d != entries[j * size + i] {
                    return Err(Error::validation(format!(
                        "entry ({i}, {j}) breaks symmetry"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { size, entries })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    /// Largest finite entry, or 0 when there is none.
    pub fn max_finite(&self) -> f64 {
        self.entries
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    }

    /// Divides every finite entry by [`Self::max_finite`]. Infinite entries
    /// are kept, and an all-zero matrix is returned unchanged.
    pub fn normalize(&self) -> DistanceMatrix {
        let max = self.max_finite();
        if max == 0.0 {
            return self.clone();
        }
        let entries = self
            .entries
            .iter()
            .map(|&d| if d.is_finite() { d / max } else { d })
            .collect();
        DistanceMatrix {
            size: self.size,
            entries,
        }
    }

    /// CSV dump, one row per line, infinity written as `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.size {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|&d| crate::format_float(d))
                .collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Hop distances by breadth-first search from every node.
pub fn shortest_path_matrix(g: &Graph) -> DistanceMatrix {
    let n = g.num_nodes();
    let mut entries = vec![f64::INFINITY; n * n];
    let mut hops = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for source in 0..n {
        hops.fill(usize::MAX);
        hops[source] = 0;
        queue.push_back(source);
        while let Some(node) = queue.pop_front() {
            for &next in g.neighbors(node) {
                if hops[next] == usize::MAX {
                    hops[next] = hops[node] + 1;
                    queue.push_back(next);
                }
            }
        }
        for (target, &h) in hops.iter().enumerate() {
            if h != usize::MAX {
                entries[source * n + target] = h as f64;
            }
        }
    }
    DistanceMatrix { size: n, entries }
}

/// Effective resistance between every pair of nodes in the same component,
/// `L+_ii + L+_jj - 2 L+_ij`, with `L+` the pseudoinverse of the component's
/// Laplacian.
pub fn resistance_distance_matrix(g: &Graph) -> Result<DistanceMatrix> {
    let n = g.num_nodes();
    let mut entries = vec![f64::INFINITY; n * n];
    for i in 0..n {
        entries[i * n + i] = 0.0;
    }
    for (component_id, nodes) in g.connected_components().iter().enumerate() {
        if nodes.len() < 2 {
            continue;
        }
        let pinv = component_laplacian_pinv(g, nodes).ok_or_else(|| Error::Computation {
            component: component_id,
            message: "Laplacian eigendecomposition did not converge".into(),
        })?;
        for (a, &u) in nodes.iter().enumerate() {
            for (b, &v) in nodes.iter().enumerate().skip(a + 1) {
                let r = pinv[(a, a)] + pinv[(b, b)] - 2.0 * pinv[(a, b)];
                if !r.is_finite() {
                    return Err(Error::Computation {
                        component: component_id,
                        message: format!("non-finite resistance between {u} and {v}"),
                    });
                }
                let r = r.max(0.0);
                entries[u * n + v] = r;
                entries[v * n + u] = r;
            }
        }
    }
    merge_near_ties(n, &mut entries, RESISTANCE_TIE_TOLERANCE);
    Ok(DistanceMatrix { size: n, entries })
}

/// Replaces every run of finite off-diagonal values whose consecutive gaps
/// are within `relative_tol` by the smallest value of the run.
fn merge_near_ties(n: usize, entries: &mut [f64], relative_tol: f64) {
    let mut pairs: Vec<(f64, usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (entries[i * n + j], i, j))
        .filter(|p| p.0.is_finite())
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut representative = f64::NAN;
    let mut previous = f64::NAN;
    for (value, i, j) in pairs {
        if !(value - previous <= relative_tol * value.abs()) {
            representative = value;
        }
        previous = value;
        entries[i * n + j] = representative;
        entries[j * n + i] = representative;
    }
}

fn component_laplacian_pinv(g: &Graph, nodes: &[usize]) -> Option<DMatrix<f64>> {
    let m = nodes.len();
    let mut laplacian = DMatrix::<f64>::zeros(m, m);
    for (a, &u) in nodes.iter().enumerate() {
        laplacian[(a, a)] = g.degree(u) as f64;
        for &v in g.neighbors(u) {
            let b = nodes.binary_search(&v).ok()?;
            laplacian[(a, b)] = -1.0;
        }
    }
    let eigen = nalgebra::SymmetricEigen::try_new(laplacian, 1e-14, 10_000)?;
    let largest = eigen.eigenvalues.iter().copied().fold(0.0, f64::max);
    let cutoff = PINV_RELATIVE_CUTOFF * largest;
    let mut pinv = DMatrix::<f64>::zeros(m, m);
    for (k, &lambda) in eigen.eigenvalues.iter().enumerate() {
        if lambda.abs() <= cutoff {
            continue;
        }
        let vector = eigen.eigenvectors.column(k);
        pinv += (vector * vector.transpose()) / lambda;
    }
    Some(pinv)
}
