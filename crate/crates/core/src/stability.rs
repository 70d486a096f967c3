//! Empirical certification of the L1 stability bound for Betti functions:
//! `||beta - beta'||_L1 <= 2 W_1(D, D')` for diagrams with finite deaths,
//! together with its interval-level building block
//! `integral |1[a,b) - 1[c,d)| <= 2 max(|a-c|, |b-d|)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::diagram_distance::wasserstein;
use crate::error::{Error, Result};
use crate::persistence::{PersistenceDiagram, PersistencePoint, PointRecord};
use crate::vectorize::{betti_function, betti_l1_distance, BettiWeight};

/// Absolute slack on every bound comparison.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Slack on the interval inequality, whose two sides are sums of a few
/// differences of the inputs.
pub const LEMMA_TOLERANCE: f64 = 1e-12;

/// Relative position of two half-open intervals `[a,b)` and `[c,d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalCase {
    /// Overlapping, neither nested in the other.
    Overlap,
    /// No common point.
    Disjoint,
    /// One contains the other (endpoint-wise).
    Nested,
}

/// Classifies the pair. Nesting is tested on endpoints first, so an empty
/// interval lying inside the other counts as nested; an empty interval
/// outside it counts as disjoint.
pub fn classify(u: (f64, f64), v: (f64, f64)) -> IntervalCase {
    let ((a, b), (c, d)) = (u, v);
    if (a <= c && d <= b) || (c <= a && b <= d) {
        IntervalCase::Nested
    } else if b <= c || d <= a {
        IntervalCase::Disjoint
    } else {
        IntervalCase::Overlap
    }
}

fn check_interval(u: (f64, f64)) -> Result<()> {
    if !(u.0 <= u.1) {
        return Err(Error::validation(format!(
            "interval ({}, {}) has its left end after its right end",
            u.0, u.1
        )));
    }
    Ok(())
}

/// Closed-form `integral |1[a,b)(t) - 1[c,d)(t)| dt`.
pub fn lemma_lhs(u: (f64, f64), v: (f64, f64)) -> Result<f64> {
    check_interval(u)?;
    check_interval(v)?;
    let ((a, b), (c, d)) = (u, v);
    Ok(match classify(u, v) {
        IntervalCase::Overlap | IntervalCase::Nested => (c - a).abs() + (d - b).abs(),
        IntervalCase::Disjoint => (b - a) + (d - c),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates both sides of the interval inequality.
pub fn check_lemma(u: (f64, f64), v: (f64, f64)) -> Result<BoundCheck> {
    let lhs = lemma_lhs(u, v)?;
    let rhs = 2.0 * (u.0 - v.0).abs().max((u.1 - v.1).abs());
    Ok(BoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + LEMMA_TOLERANCE,
    })
}

/// Both sides of the diagram-level bound, plus whether the bound without
/// the factor 2 would also have held.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub l1: f64,
    pub w1: f64,
    pub bound: f64,
    pub holds: bool,
    pub unscaled_holds: bool,
}

impl TheoremCheck {
    /// `l1 / bound`, with `0/0` taken as 0.
    pub fn ratio(&self) -> f64 {
        if self.bound == 0.0 {
            if self.l1 <= BOUND_TOLERANCE {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.l1 / self.bound
        }
    }
}

/// Compares the L1 distance of the (unit-weight) Betti functions of two
/// finite diagrams with twice their 1-Wasserstein distance.
pub fn check_theorem(pd1: &PersistenceDiagram, pd2: &PersistenceDiagram) -> Result<TheoremCheck> {
    let (w1, _) = wasserstein(pd1, pd2, 1.0)?;
    let l1 = betti_l1_distance(
        &betti_function(pd1, BettiWeight::Constant)?,
        &betti_function(pd2, BettiWeight::Constant)?,
    );
    let bound = 2.0 * w1;
    Ok(TheoremCheck {
        l1,
        w1,
        bound,
        holds: l1 <= bound + BOUND_TOLERANCE,
        unscaled_holds: l1 <= w1 + BOUND_TOLERANCE,
    })
}

/// `n` points with birth uniform in `[0, range]` and death uniform in
/// `[birth, range]`, determined by `seed`.
pub fn random_diagram(n: usize, seed: u64, range: f64) -> PersistenceDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_diagram_with(&mut rng, n, range)
}

fn random_diagram_with(rng: &mut ChaCha8Rng, n: usize, range: f64) -> PersistenceDiagram {
    let points = (0..n)
        .map(|_| {
            let birth = rng.gen::<f64>() * range;
            let death = birth + rng.gen::<f64>() * (range - birth);
            PersistencePoint::new(birth, death.min(range))
        })
        .collect();
    PersistenceDiagram::new(1, points, range)
}

/// The worst diagram pair seen by an audit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub trial: usize,
    pub family: String,
    pub first: Vec<PointRecord>,
    pub second: Vec<PointRecord>,
    pub l1: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub trials: usize,
    pub violations: usize,
    /// Largest `l1 / (2 W_1)` over all trials.
    pub max_ratio: f64,
    /// Trials where `l1 > W_1`, i.e. where the bound without the factor 2
    /// would fail.
    pub unscaled_violations: usize,
    pub witness: Option<Witness>,
}

/// Trial generators used by [`stability_audit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialFamily {
    /// Two independent random diagrams.
    Random,
    /// A random diagram against a copy with every interval shrunk inside
    /// the original.
    Nested,
    /// Two random diagrams on disjoint halves of the range.
    Disjoint,
    /// A random diagram with many near-diagonal points against the empty
    /// or a sparse diagram.
    DiagonalHeavy,
}

impl TrialFamily {
    const ALL: [TrialFamily; 4] = [
        TrialFamily::Random,
        TrialFamily::Nested,
        TrialFamily::Disjoint,
        TrialFamily::DiagonalHeavy,
    ];

    fn name(self) -> &'static str {
        match self {
            TrialFamily::Random => "random",
            TrialFamily::Nested => "nested",
            TrialFamily::Disjoint => "disjoint",
            TrialFamily::DiagonalHeavy => "diagonal-heavy",
        }
    }

    /// Family of trial `index`: mostly random, every fourth trial one of
    /// the adversarial templates in turn.
    fn for_trial(index: usize) -> TrialFamily {
        if index.is_multiple_of(4) {
            Self::ALL[1 + (index / 4) % 3]
        } else {
            TrialFamily::Random
        }
    }

    fn generate(
        self,
        rng: &mut ChaCha8Rng,
        max_points: usize,
    ) -> (PersistenceDiagram, PersistenceDiagram) {
        const RANGE: f64 = 1.0;
        let size = |rng: &mut ChaCha8Rng| rng.gen_range(0..=max_points);
        match self {
            TrialFamily::Random => {
                let (n1, n2) = (size(rng), size(rng));
                (
                    random_diagram_with(rng, n1, RANGE),
                    random_diagram_with(rng, n2, RANGE),
                )
            }
            TrialFamily::Nested => {
                let n = size(rng);
                let outer = random_diagram_with(rng, n, RANGE);
                let inner = outer
                    .points
                    .iter()
                    .map(|p| {
                        let len = p.death - p.birth;
                        let start = p.birth + rng.gen::<f64>() * len;
                        let end = start + rng.gen::<f64>() * (p.death - start);
                        PersistencePoint::new(start, end)
                    })
                    .collect();
                (outer, PersistenceDiagram::new(1, inner, RANGE))
            }
            TrialFamily::Disjoint => {
                let (n1, n2) = (size(rng), size(rng));
                let mut left = random_diagram_with(rng, n1, RANGE / 2.0);
                let mut right = random_diagram_with(rng, n2, RANGE / 2.0);
                for p in &mut right.points {
                    p.birth += RANGE / 2.0;
                    p.death += RANGE / 2.0;
                }
                left.cap = RANGE;
                right.cap = RANGE;
                (left, right)
            }
            TrialFamily::DiagonalHeavy => {
                let n = size(rng);
                let points = (0..n)
                    .map(|_| {
                        let birth = rng.gen::<f64>() * RANGE;
                        let death = (birth + rng.gen::<f64>() * 1e-3).min(RANGE);
                        PersistencePoint::new(birth, death)
                    })
                    .collect();
                let sparse_size = rng.gen_range(0..=max_points.min(2));
                let sparse = random_diagram_with(rng, sparse_size, RANGE);
                (PersistenceDiagram::new(1, points, RANGE), sparse)
            }
        }
    }
}

/// Checks the bound on `trials` generated diagram pairs with up to
/// `max_points` points each. Trial `i` uses stream `i` of a generator
/// seeded by `seed`, so results are independent of scheduling.
pub fn stability_audit(trials: usize, max_points: usize, seed: u64) -> Result<StabilityReport> {
    if trials == 0 {
        return Err(Error::validation("an audit needs at least one trial"));
    }
    let checks = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let family = TrialFamily::for_trial(i);
            let (a, b) = family.generate(&mut rng, max_points);
            let check = check_theorem(&a, &b)?;
            Ok((i, family.name(), a, b, check))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(checks))
}

/// Runs the bound check on explicit diagram pairs.
pub fn audit_pairs(pairs: &[(PersistenceDiagram, PersistenceDiagram)]) -> Result<StabilityReport> {
    let checks = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (a, b))| Ok((i, "given", a.clone(), b.clone(), check_theorem(a, b)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(checks))
}

type TrialOutcome = (
    usize,
    &'static str,
    PersistenceDiagram,
    PersistenceDiagram,
    TheoremCheck,
);

fn summarize(checks: Vec<TrialOutcome>) -> StabilityReport {
    let mut report = StabilityReport {
        trials: checks.len(),
        violations: 0,
        max_ratio: 0.0,
        unscaled_violations: 0,
        witness: None,
    };
    let mut worst: Option<usize> = None;
    for (k, (_, _, _, _, check)) in checks.iter().enumerate() {
        if !check.holds {
            report.violations += 1;
        }
        if !check.unscaled_holds {
            report.unscaled_violations += 1;
        }
        let ratio = check.ratio();
        if worst.is_none() || ratio > report.max_ratio {
            report.max_ratio = ratio;
            worst = Some(k);
        }
    }
    if let Some(k) = worst {
        let (trial, family, a, b, check) = &checks[k];
        report.witness = Some(Witness {
            trial: *trial,
            family: family.to_string(),
            first: a.records(),
            second: b.records(),
            l1: check.l1,
            bound: check.bound,
        });
    }
    report
}
