//! Wasserstein and bottleneck distances between persistence diagrams.
//!
//! Both diagrams are augmented with the diagonal: a point may be matched to
//! a point of the other diagram or to its own orthogonal projection
//! `((b+d)/2, (b+d)/2)`, at `L_inf` cost `(d-b)/2`. This becomes a balanced
//! assignment problem of size `n1 + n2`.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::assignment::{hopcroft_karp, hungarian};
use crate::error::{Error, Result};
use crate::persistence::{PersistenceDiagram, PersistencePoint};

/// Largest combined diagram size accepted by [`brute_force_wasserstein`].
pub const BRUTE_FORCE_MAX_POINTS: usize = 8;

/// Exponent of a diagram distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    /// `q`-Wasserstein with `q >= 1`.
    Finite(f64),
    /// Bottleneck: the largest matched cost.
    Infinity,
}

/// One side of a matched pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatchEnd {
    /// Index into the diagram's point list.
    Point(usize),
    /// The diagonal, at the projection of the partner point.
    Diagonal(PersistencePoint),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchedPair {
    pub source: MatchEnd,
    pub target: MatchEnd,
    /// `L_inf` distance between the two ends.
    pub cost: f64,
}

/// An optimal bijection between two diagonal-augmented diagrams.
/// Diagonal-to-diagonal pairs are omitted.
#[derive(Clone, Debug, PartialEq)]
pub struct Matching {
    pub pairs: Vec<MatchedPair>,
    /// The distance realized by this matching.
    pub cost: f64,
    pub order: Order,
}

impl Matching {
    pub fn max_edge_cost(&self) -> f64 {
        self.pairs.iter().map(|p| p.cost).fold(0.0, f64::max)
    }
}

pub fn linf(a: &PersistencePoint, b: &PersistencePoint) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

/// `L_inf` distance from a point to the diagonal.
pub fn diagonal_cost(p: &PersistencePoint) -> f64 {
    (p.death - p.birth) / 2.0
}

pub fn projection(p: &PersistencePoint) -> PersistencePoint {
    let mid = (p.birth + p.death) / 2.0;
    PersistencePoint::new(mid, mid)
}

fn check_inputs(pd1: &PersistenceDiagram, pd2: &PersistenceDiagram) -> Result<()> {
    if pd1.dim != pd2.dim {
        return Err(Error::validation(format!(
            "cannot compare a dimension {} diagram with a dimension {} diagram",
            pd1.dim, pd2.dim
        )));
    }
    for pd in [pd1, pd2] {
        if pd
            .points
            .iter()
            .any(|p| !p.death.is_finite() || !p.birth.is_finite())
        {
            return Err(Error::precondition(
                "diagram has infinite deaths; clamp it to its cap first",
            ));
        }
    }
    Ok(())
}

/// Augmented `L_inf` cost matrix. Rows: points of `pd1`, then diagonal
/// slots for `pd2`. Columns: points of `pd2`, then diagonal slots for `pd1`.
fn augmented_costs(pd1: &PersistenceDiagram, pd2: &PersistenceDiagram) -> (usize, Vec<f64>) {
    let (n1, n2) = (pd1.len(), pd2.len());
    let n = n1 + n2;
    let mut cost = vec![0.0; n * n];
    for (i, p) in pd1.points.iter().enumerate() {
        for (j, q) in pd2.points.iter().enumerate() {
            cost[i * n + j] = linf(p, q);
        }
        let c = diagonal_cost(p);
        for j in n2..n {
            cost[i * n + j] = c;
        }
    }
    for (j, q) in pd2.points.iter().enumerate() {
        let c = diagonal_cost(q);
        for i in n1..n {
            cost[i * n + j] = c;
        }
    }
    (n, cost)
}

fn build_matching(
    pd1: &PersistenceDiagram,
    pd2: &PersistenceDiagram,
    assignment: &[usize],
    cost: &[f64],
    order: Order,
) -> Matching {
    let (n1, n2) = (pd1.len(), pd2.len());
    let n = n1 + n2;
    let mut pairs = Vec::new();
    for (row, &col) in assignment.iter().enumerate() {
        let c = cost[row * n + col];
        let pair = match (row < n1, col < n2) {
            (true, true) => MatchedPair {
                source: MatchEnd::Point(row),
                target: MatchEnd::Point(col),
                cost: c,
            },
            (true, false) => MatchedPair {
                source: MatchEnd::Point(row),
                target: MatchEnd::Diagonal(projection(&pd1.points[row])),
                cost: c,
            },
            (false, true) => MatchedPair {
                source: MatchEnd::Diagonal(projection(&pd2.points[col])),
                target: MatchEnd::Point(col),
                cost: c,
            },
            (false, false) => continue,
        };
        pairs.push(pair);
    }
    let cost = match order {
        Order::Finite(q) => pairs
            .iter()
            .map(|p| p.cost.powf(q))
            .sum::<f64>()
            .powf(1.0 / q),
        Order::Infinity => pairs.iter().map(|p| p.cost).fold(0.0, f64::max),
    };
    Matching { pairs, cost, order }
}

/// `q`-Wasserstein distance and an optimal matching.
pub fn wasserstein(
    pd1: &PersistenceDiagram,
    pd2: &PersistenceDiagram,
    q: f64,
) -> Result<(f64, Matching)> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::validation(format!(
            "Wasserstein order must be a finite q >= 1, got {q}"
        )));
    }
    check_inputs(pd1, pd2)?;
    let (n, cost) = augmented_costs(pd1, pd2);
    let powered: Vec<f64> = cost.iter().map(|c| c.powf(q)).collect();
    let assignment = hungarian(n, &powered);
    let matching = build_matching(pd1, pd2, &assignment, &cost, Order::Finite(q));
    Ok((matching.cost, matching))
}

/// Bottleneck distance: binary search over the distinct candidate costs for
/// the smallest threshold admitting a perfect matching.
pub fn bottleneck(pd1: &PersistenceDiagram, pd2: &PersistenceDiagram) -> Result<(f64, Matching)> {
    check_inputs(pd1, pd2)?;
    let (n, cost) = augmented_costs(pd1, pd2);
    if n == 0 {
        let matching = Matching {
            pairs: Vec::new(),
            cost: 0.0,
            order: Order::Infinity,
        };
        return Ok((0.0, matching));
    }
    let mut candidates = cost.clone();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let perfect = |limit: f64| -> Option<Vec<usize>> {
        let adjacency: Vec<Vec<usize>> = (0..n)
            .map(|r| (0..n).filter(|&c| cost[r * n + c] <= limit).collect())
            .collect();
        let matched = hopcroft_karp(n, n, &adjacency);
        matched.into_iter().collect()
    };

    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect(candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let assignment = perfect(candidates[lo]).expect("largest candidate admits every edge");
    let matching = build_matching(pd1, pd2, &assignment, &cost, Order::Infinity);
    Ok((matching.cost, matching))
}

/// Distance of the given order; see [`wasserstein`] and [`bottleneck`].
pub fn diagram_distance(
    pd1: &PersistenceDiagram,
    pd2: &PersistenceDiagram,
    order: Order,
) -> Result<f64> {
    match order {
        Order::Finite(q) => wasserstein(pd1, pd2, q).map(|r| r.0),
        Order::Infinity => bottleneck(pd1, pd2).map(|r| r.0),
    }
}

/// Exhaustive minimum over every bijection of the augmented diagrams.
/// Only for `pd1.len() + pd2.len() <= BRUTE_FORCE_MAX_POINTS`.
pub fn brute_force_wasserstein(
    pd1: &PersistenceDiagram,
    pd2: &PersistenceDiagram,
    order: Order,
) -> Result<f64> {
    let total = pd1.len() + pd2.len();
    if total > BRUTE_FORCE_MAX_POINTS {
        return Err(Error::validation(format!(
            "brute force handles at most {BRUTE_FORCE_MAX_POINTS} points, got {total}"
        )));
    }
    check_inputs(pd1, pd2)?;
    // Slot k < n1 is a real point of pd1, otherwise the diagonal copy of
    // pd2 point k - n1; likewise for the other side.
    let (n1, n2) = (pd1.len(), pd2.len());
    let edge = |row: usize, col: usize| -> f64 {
        match (row < n1, col < n2) {
            (true, true) => {
                let (p, q) = (pd1.points[row], pd2.points[col]);
                (p.birth - q.birth).abs().max((p.death - q.death).abs())
            }
            (true, false) => (pd1.points[row].death - pd1.points[row].birth) / 2.0,
            (false, true) => (pd2.points[col].death - pd2.points[col].birth) / 2.0,
            (false, false) => 0.0,
        }
    };
    let mut perm: Vec<usize> = (0..total).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let value = match order {
            Order::Finite(q) => (0..total).map(|r| edge(r, p[r]).powf(q)).sum::<f64>(),
            Order::Infinity => (0..total).map(|r| edge(r, p[r])).fold(0.0, f64::max),
        };
        best = best.min(value);
    });
    Ok(match order {
        Order::Finite(q) => best.powf(1.0 / q),
        Order::Infinity => best,
    })
}

fn permute(perm: &mut [usize], start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == perm.len() {
        visit(perm);
        return;
    }
    for i in start..perm.len() {
        perm.swap(start, i);
        permute(perm, start + 1, visit);
        perm.swap(start, i);
    }
}

/// Symmetric matrix of pairwise diagram distances.
#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseDistances {
    size: usize,
    entries: Vec<f64>,
}

impl PairwiseDistances {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    /// CSV with a header row `id,<id_1>,...` followed by one row per diagram.
    pub fn to_csv(&self, ids: &[usize]) -> String {
        let mut out = String::from("id");
        for id in ids {
            let _ = write!(out, ",{id}");
        }
        out.push('\n');
        for (i, id) in ids.iter().enumerate() {
            let _ = write!(out, "{id}");
            for j in 0..self.size {
                let _ = write!(out, ",{}", crate::format_float(self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

/// Distances between every pair of diagrams, computed over the upper
/// triangle in parallel.
pub fn pairwise_distance_matrix(
    diagrams: &[PersistenceDiagram],
    order: Order,
) -> Result<PairwiseDistances> {
    let n = diagrams.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| diagram_distance(&diagrams[i], &diagrams[j], order))
        .collect::<Result<Vec<f64>>>()?;
    let mut entries = vec![0.0; n * n];
    for (&(i, j), &d) in pairs.iter().zip(&values) {
        entries[i * n + j] = d;
        entries[j * n + i] = d;
    }
    Ok(PairwiseDistances { size: n, entries })
}
