//! Vietoris-Rips flag filtrations up to dimension two.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

/// A vertex, edge or triangle with its filtration value. Vertices are
/// stored sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    vertices: Vec<usize>,
    value: f64,
}

impl Simplex {
    pub fn new(mut vertices: Vec<usize>, value: f64) -> Self {
        vertices.sort_unstable();
        Simplex { vertices, value }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Codimension-one faces, in lexicographic order.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        if self.vertices.len() < 2 {
            return Vec::new();
        }
        let mut faces: Vec<Vec<usize>> = (0..self.vertices.len())
            .map(|skip| {
                self.vertices
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        faces.sort();
        faces
    }

    /// Filtration order: value, then dimension, then vertices.
    pub fn filtration_cmp(&self, other: &Simplex) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.vertices.len().cmp(&other.vertices.len()))
            .then_with(|| self.vertices.cmp(&other.vertices))
    }
}

/// Sorted list of simplices; every prefix is a simplicial complex.
#[derive(Clone, Debug, PartialEq)]
pub struct Filtration {
    num_vertices: usize,
    simplices: Vec<Simplex>,
    threshold: f64,
    max_dim: usize,
}

impl Filtration {
    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Number of vertices, edges and triangles with value at most `t`.
    pub fn complex_at(&self, t: f64) -> (usize, usize, usize) {
        let mut counts = [0usize; 3];
        for s in self.simplices.iter().take_while(|s| s.value <= t) {
            counts[s.dim()] += 1;
        }
        (counts[0], counts[1], counts[2])
    }
}

/// Builds the flag filtration of `dm` up to `max_dim` (1 or 2), keeping
/// edges with distance at most `threshold`. Triangles enter at the largest
/// of their edge values.
pub fn build_flag_filtration(
    dm: &DistanceMatrix,
    max_dim: usize,
    threshold: f64,
) -> Result<Filtration> {
    if !(1..=2).contains(&max_dim) {
        return Err(Error::validation(format!(
            "max_dim must be 1 or 2, got {max_dim}"
        )));
    }
    if !(threshold > 0.0) {
        return Err(Error::validation(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let n = dm.size();
    let mut simplices: Vec<Simplex> = (0..n).map(|v| Simplex::new(vec![v], 0.0)).collect();

    // upper neighbors within threshold, ascending
    let mut upper: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let d = dm.get(i, j);
            if d <= threshold {
                upper[i].push(j);
                simplices.push(Simplex {
                    vertices: vec![i, j],
                    value: d,
                });
            }
        }
    }
    if max_dim == 2 {
        for i in 0..n {
            for (a, &j) in upper[i].iter().enumerate() {
                for &k in &upper[i][a + 1..] {
                    if upper[j].binary_search(&k).is_ok() {
                        let value = dm.get(i, j).max(dm.get(i, k)).max(dm.get(j, k));
                        simplices.push(Simplex {
                            vertices: vec![i, j, k],
                            value,
                        });
                    }
                }
            }
        }
    }
    simplices.sort_by(Simplex::filtration_cmp);
    Ok(Filtration {
        num_vertices: n,
        simplices,
        threshold,
        max_dim,
    })
}

/// `steps` evenly spaced values from 0 to 1 inclusive.
pub fn threshold_grid(steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::validation(format!(
            "grid needs at least 2 steps, got {steps}"
        )));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|i| i as f64 / last).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{graph_from_edge_list, Graph};
    use crate::metric::shortest_path_matrix;

    fn c4_filtration() -> Filtration {
        let c4 = graph_from_edge_list(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        build_flag_filtration(&shortest_path_matrix(&c4), 2, 2.0).unwrap()
    }

    #[test]
    fn c4_counts() {
        let f = c4_filtration();
        assert_eq!(f.complex_at(2.0), (4, 6, 4));
        let unit_edges = f
            .simplices()
            .iter()
            .filter(|s| s.dim() == 1 && s.value() == 1.0)
            .count();
        assert_eq!(unit_edges, 4);
        assert!(f
            .simplices()
            .iter()
            .filter(|s| s.dim() == 2)
            .all(|s| s.value() == 2.0));
        assert_eq!(f.complex_at(1.0), (4, 4, 0));
        assert_eq!(f.complex_at(0.5), (4, 0, 0));
    }

    #[test]
    fn edgeless_has_only_vertices() {
        let f = build_flag_filtration(&shortest_path_matrix(&Graph::empty(3)), 2, 1.0).unwrap();
        assert_eq!(f.len(), 3);
        assert!(f.simplices().iter().all(|s| s.dim() == 0));
    }

    #[test]
    fn empty_matrix_gives_empty_filtration() {
        let f = build_flag_filtration(&shortest_path_matrix(&Graph::empty(0)), 2, 1.0).unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn threshold_cuts_edges() {
        let f = build_flag_filtration(
            &shortest_path_matrix(
                &graph_from_edge_list(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap(),
            ),
            2,
            1.0,
        )
        .unwrap();
        assert_eq!(f.complex_at(f64::INFINITY), (4, 4, 0));
    }

    #[test]
    fn invalid_arguments() {
        let dm = shortest_path_matrix(&Graph::empty(2));
        assert!(build_flag_filtration(&dm, 3, 1.0).is_err());
        assert!(build_flag_filtration(&dm, 2, 0.0).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(threshold_grid(2).unwrap(), vec![0.0, 1.0]);
        assert_eq!(threshold_grid(5).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = threshold_grid(100).unwrap();
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[99], 1.0);
        assert!(threshold_grid(1).is_err());
    }

    #[test]
    fn order_breaks_ties_by_dimension_then_vertices() {
        let f = c4_filtration();
        let at_two: Vec<_> = f
            .simplices()
            .iter()
            .filter(|s| s.value() == 2.0)
            .map(|s| s.vertices().to_vec())
            .collect();
        assert_eq!(
            at_two,
            vec![
                vec![0, 2],
                vec![1, 3],
                vec![0, 1, 2],
                vec![0, 1, 3],
                vec![0, 2, 3],
                vec![1, 2, 3]
            ]
        );
    }
}
