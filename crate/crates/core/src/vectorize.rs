//! Functional summaries of persistence diagrams and their vectorization on a
//! scale grid: Betti functions, persistence landscapes and silhouettes.
//!
//! All summaries require finite deaths. [`clamp`] is the single place where
//! essential classes are cut off at the diagram's filtration cap.

use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::persistence::{PersistenceDiagram, PersistencePoint};

/// Replaces every infinite death with `pd.cap`.
pub fn clamp(pd: &PersistenceDiagram) -> PersistenceDiagram {
    let points = pd
        .points
        .iter()
        .map(|p| PersistencePoint::new(p.birth, if p.is_essential() { pd.cap } else { p.death }))
        .collect();
    PersistenceDiagram::new(pd.dim, points, pd.cap)
}

fn require_finite(pd: &PersistenceDiagram) -> Result<()> {
    if pd.has_infinite_death() {
        return Err(Error::precondition(
            "diagram has infinite deaths; clamp it to its cap first",
        ));
    }
    Ok(())
}

fn require_increasing(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::validation("grid values must be finite"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::validation("grid must be strictly increasing"));
    }
    Ok(())
}

/// Weight given to a point `(b, d)` in the Betti function.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BettiWeight {
    /// Every point counts once.
    #[default]
    Constant,
    /// A point counts `d - b`.
    Persistence,
}

impl BettiWeight {
    fn weight(self, p: &PersistencePoint) -> f64 {
        match self {
            BettiWeight::Constant => 1.0,
            BettiWeight::Persistence => p.death - p.birth,
        }
    }
}

/// Right-continuous, compactly supported piecewise-constant function.
///
/// The function is 0 left of `breakpoints[0]` and equals `levels[i]` on
/// `[breakpoints[i], breakpoints[i + 1])`. The last level is always 0.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    pub dim: usize,
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
}

impl StepFunction {
    pub fn zero(dim: usize) -> Self {
        StepFunction {
            dim,
            breakpoints: Vec::new(),
            levels: Vec::new(),
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        if idx == 0 {
            0.0
        } else {
            self.levels[idx - 1]
        }
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(|&l| l == 0.0)
    }
}

/// `sum_i w(b_i, d_i) * 1[b_i <= t < d_i]`. Points on the diagonal add
/// nothing.
pub fn betti_function(pd: &PersistenceDiagram, weight: BettiWeight) -> Result<StepFunction> {
    require_finite(pd)?;
    let mut events: Vec<(f64, f64)> = Vec::with_capacity(2 * pd.len());
    for p in &pd.points {
        if p.death < p.birth {
            return Err(Error::validation(format!(
                "point ({}, {}) dies before it is born",
                p.birth, p.death
            )));
        }
        if p.death == p.birth {
            continue;
        }
        let w = weight.weight(p);
        events.push((p.birth, w));
        events.push((p.death, -w));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut breakpoints: Vec<f64> = Vec::new();
    let mut levels: Vec<f64> = Vec::new();
    let mut level = 0.0;
    for (t, delta) in events {
        level += delta;
        if breakpoints.last() == Some(&t) {
            *levels.last_mut().expect("paired with breakpoint") = level;
        } else {
            breakpoints.push(t);
            levels.push(level);
        }
    }
    if let Some(last) = levels.last_mut() {
        *last = 0.0;
    }
    Ok(StepFunction {
        dim: pd.dim,
        breakpoints,
        levels,
    })
}

/// Exact `integral |f - g| dt`, summed over the merged breakpoint partition.
pub fn betti_l1_distance(f: &StepFunction, g: &StepFunction) -> f64 {
    let mut cuts: Vec<f64> = f
        .breakpoints
        .iter()
        .chain(&g.breakpoints)
        .copied()
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| (f.eval(w[0]) - g.eval(w[0])).abs() * (w[1] - w[0]))
        .sum()
}

/// Which summary a [`SummaryVector`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SummaryKind {
    Betti,
    Landscape,
    Silhouette,
}

impl fmt::Display for SummaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SummaryKind::Betti => "betti",
            SummaryKind::Landscape => "landscape",
            SummaryKind::Silhouette => "silhouette",
        })
    }
}

/// A summary function sampled on a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryVector {
    pub kind: SummaryKind,
    pub dim: usize,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Landscape order or silhouette power; absent for Betti vectors.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
}

/// Samples `sf` at every grid point.
pub fn evaluate_grid(sf: &StepFunction, grid: &[f64]) -> Result<SummaryVector> {
    require_increasing(grid)?;
    Ok(SummaryVector {
        kind: SummaryKind::Betti,
        dim: sf.dim,
        grid: grid.to_vec(),
        values: grid.iter().map(|&t| sf.eval(t)).collect(),
        param: None,
    })
}

/// `max(0, min(t - b, d - t))`.
pub fn tent(p: &PersistencePoint, t: f64) -> f64 {
    (t - p.birth).min(p.death - t).max(0.0)
}

/// `k`-th largest tent value at each grid point (0 when there are fewer
/// than `k` points).
pub fn landscape(pd: &PersistenceDiagram, k: usize, grid: &[f64]) -> Result<SummaryVector> {
    if k < 1 {
        return Err(Error::validation("landscape order must be at least 1"));
    }
    require_increasing(grid)?;
    require_finite(pd)?;
    let mut heights = Vec::with_capacity(pd.len());
    let values = grid
        .iter()
        .map(|&t| {
            if pd.len() < k {
                return 0.0;
            }
            heights.clear();
            heights.extend(pd.points.iter().map(|p| tent(p, t)));
            let (_, kth, _) = heights.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
            *kth
        })
        .collect();
    Ok(SummaryVector {
        kind: SummaryKind::Landscape,
        dim: pd.dim,
        grid: grid.to_vec(),
        values,
        param: Some(k as f64),
    })
}

/// Average of tents weighted by `persistence^power`. Empty diagrams and
/// diagrams whose weights sum to zero give the zero vector.
pub fn silhouette(pd: &PersistenceDiagram, power: f64, grid: &[f64]) -> Result<SummaryVector> {
    if !(power >= 0.0) || !power.is_finite() {
        return Err(Error::validation(format!(
            "silhouette power must be >= 0, got {power}"
        )));
    }
    require_increasing(grid)?;
    require_finite(pd)?;
    let weights: Vec<f64> = pd
        .points
        .iter()
        .map(|p| (p.death - p.birth).abs().powf(power))
        .collect();
    let total: f64 = weights.iter().sum();
    let values = grid
        .iter()
        .map(|&t| {
            if total == 0.0 {
                return 0.0;
            }
            let weighted: f64 = pd
                .points
                .iter()
                .zip(&weights)
                .map(|(p, w)| w * tent(p, t))
                .sum();
            weighted / total
        })
        .collect();
    Ok(SummaryVector {
        kind: SummaryKind::Silhouette,
        dim: pd.dim,
        grid: grid.to_vec(),
        values,
        param: Some(power),
    })
}

/// A configured vectorization method.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Vectorizer {
    Betti(BettiWeight),
    Landscape { k: usize },
    Silhouette { power: f64 },
}

impl Vectorizer {
    pub fn kind(&self) -> SummaryKind {
        match self {
            Vectorizer::Betti(_) => SummaryKind::Betti,
            Vectorizer::Landscape { .. } => SummaryKind::Landscape,
            Vectorizer::Silhouette { .. } => SummaryKind::Silhouette,
        }
    }

    /// Clamps `pd` and samples the configured summary on `grid`.
    pub fn apply(&self, pd: &PersistenceDiagram, grid: &[f64]) -> Result<SummaryVector> {
        let clamped = clamp(pd);
        match *self {
            Vectorizer::Betti(weight) => evaluate_grid(&betti_function(&clamped, weight)?, grid),
            Vectorizer::Landscape { k } => landscape(&clamped, k, grid),
            Vectorizer::Silhouette { power } => silhouette(&clamped, power, grid),
        }
    }
}

/// Header `graph_id,label,kind,dim,v_1..v_d` of the long summary CSV.
pub fn summary_csv_header(len: usize) -> String {
    let mut out = String::from("graph_id,label,kind,dim");
    for i in 1..=len {
        let _ = write!(out, ",v_{i}");
    }
    out
}

/// One row of the long summary CSV.
pub fn summary_csv_row(graph_id: usize, label: Option<usize>, sv: &SummaryVector) -> String {
    let mut out = format!(
        "{graph_id},{},{},{}",
        label.map_or(String::new(), |l| l.to_string()),
        sv.kind,
        sv.dim
    );
    for &v in &sv.values {
        let _ = write!(out, ",{}", crate::format_float(v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd(pairs: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::from_pairs(1, pairs, 10.0)
    }

    #[test]
    fn betti_step_levels() {
        let sf = betti_function(&pd(&[(0.0, 2.0), (1.0, 3.0)]), BettiWeight::Constant).unwrap();
        assert_eq!(sf.eval(-0.5), 0.0);
        assert_eq!(sf.eval(0.0), 1.0);
        assert_eq!(sf.eval(0.5), 1.0);
        assert_eq!(sf.eval(1.0), 2.0);
        assert_eq!(sf.eval(1.99), 2.0);
        assert_eq!(sf.eval(2.0), 1.0);
        assert_eq!(sf.eval(3.0), 0.0);
        assert_eq!(sf.eval(7.0), 0.0);
    }

    #[test]
    fn betti_trivial_diagrams() {
        assert!(betti_function(&pd(&[]), BettiWeight::Constant)
            .unwrap()
            .is_zero());
        assert!(betti_function(&pd(&[(1.0, 1.0)]), BettiWeight::Constant)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn betti_persistence_weight() {
        let sf = betti_function(&pd(&[(0.0, 2.0), (1.0, 1.5)]), BettiWeight::Persistence).unwrap();
        assert_eq!(sf.eval(0.5), 2.0);
        assert_eq!(sf.eval(1.2), 2.5);
        assert_eq!(sf.eval(1.7), 2.0);
        assert_eq!(sf.eval(2.0), 0.0);
    }

    #[test]
    fn betti_rejects_unclamped() {
        let raw = pd(&[(0.0, f64::INFINITY)]);
        assert!(matches!(
            betti_function(&raw, BettiWeight::Constant),
            Err(Error::Precondition(_))
        ));
        let sf = betti_function(&clamp(&raw), BettiWeight::Constant).unwrap();
        assert_eq!(sf.eval(9.99), 1.0);
        assert_eq!(sf.eval(10.0), 0.0);
    }

    #[test]
    fn grid_evaluation() {
        let sf = betti_function(&pd(&[(0.0, 2.0), (1.0, 3.0)]), BettiWeight::Constant).unwrap();
        let sv = evaluate_grid(&sf, &[0.5, 1.5, 2.5, 3.5]).unwrap();
        assert_eq!(sv.values, vec![1.0, 2.0, 1.0, 0.0]);
        assert_eq!(evaluate_grid(&sf, &[1.0]).unwrap().values, vec![2.0]);
        let zero = evaluate_grid(&StepFunction::zero(0), &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(zero.values, vec![0.0; 3]);
        assert!(evaluate_grid(&sf, &[1.0, 1.0]).is_err());
        assert!(evaluate_grid(&sf, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn l1_distances() {
        let a = betti_function(&pd(&[(0.0, 2.0)]), BettiWeight::Constant).unwrap();
        let b = betti_function(&pd(&[(0.0, 1.0)]), BettiWeight::Constant).unwrap();
        let c = betti_function(&pd(&[(2.0, 3.0)]), BettiWeight::Constant).unwrap();
        assert_eq!(betti_l1_distance(&a, &a), 0.0);
        assert_eq!(betti_l1_distance(&a, &b), 1.0);
        assert_eq!(betti_l1_distance(&b, &c), 2.0);
        assert_eq!(betti_l1_distance(&b, &StepFunction::zero(1)), 1.0);
    }

    #[test]
    fn landscape_values() {
        let one = pd(&[(0.0, 2.0)]);
        let sv = landscape(&one, 1, &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(sv.values, vec![0.5, 1.0, 0.0]);
        assert_eq!(
            landscape(&one, 2, &[0.5, 1.0, 2.0]).unwrap().values,
            vec![0.0; 3]
        );
        let two = pd(&[(0.0, 2.0), (1.0, 3.0)]);
        assert_eq!(landscape(&two, 1, &[1.5]).unwrap().values, vec![0.5]);
        assert_eq!(landscape(&two, 2, &[1.5]).unwrap().values, vec![0.5]);
        assert!(landscape(&two, 0, &[1.5]).is_err());
    }

    #[test]
    fn silhouette_values() {
        let grid = [0.25, 0.5, 1.0, 1.5];
        let single = pd(&[(0.0, 2.0)]);
        let tents: Vec<f64> = grid.iter().map(|&t| tent(&single.points[0], t)).collect();
        for power in [0.0, 1.0, 2.5] {
            assert_eq!(silhouette(&single, power, &grid).unwrap().values, tents);
        }
        let two = pd(&[(0.0, 2.0), (0.0, 4.0)]);
        assert_eq!(silhouette(&two, 1.0, &[1.0]).unwrap().values, vec![1.0]);
        assert_eq!(
            silhouette(&pd(&[]), 1.0, &grid).unwrap().values,
            vec![0.0; 4]
        );
        assert_eq!(
            silhouette(&pd(&[(1.0, 1.0)]), 1.0, &grid).unwrap().values,
            vec![0.0; 4]
        );
        assert!(silhouette(&two, -1.0, &grid).is_err());
    }

    #[test]
    fn vectorizer_clamps() {
        let raw = PersistenceDiagram::from_pairs(0, &[(0.0, 0.5), (0.0, f64::INFINITY)], 1.0);
        let grid = [0.0, 0.5, 0.99];
        let b = Vectorizer::Betti(BettiWeight::Constant)
            .apply(&raw, &grid)
            .unwrap();
        assert_eq!(b.values, vec![2.0, 1.0, 1.0]);
        let l = Vectorizer::Landscape { k: 1 }.apply(&raw, &grid).unwrap();
        assert_eq!(l.values[1], 0.5);
    }

    #[test]
    fn long_csv() {
        let sv = evaluate_grid(
            &betti_function(&pd(&[(0.0, 1.0)]), BettiWeight::Constant).unwrap(),
            &[0.0, 1.0],
        )
        .unwrap();
        assert_eq!(summary_csv_header(2), "graph_id,label,kind,dim,v_1,v_2");
        assert_eq!(summary_csv_row(4, Some(1), &sv), "4,1,betti,1,1,0");
    }
}
