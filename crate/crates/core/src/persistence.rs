//! Persistence diagrams in dimensions 0 and 1.
//!
//! Dimension 0 comes from a union-find sweep over the edges. Dimension 1
//! comes from the Z/2 boundary matrix reduction of the edge and triangle
//! columns, processed from the top dimension down so that every edge which
//! is the pivot of a triangle column is cleared without being reduced.

use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::filtration::{Filtration, Simplex};

/// A `(birth, death)` pair; `death` may be `f64::INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PersistencePoint {
    pub birth: f64,
    pub death: f64,
}

impl PersistencePoint {
    pub fn new(birth: f64, death: f64) -> Self {
        PersistencePoint { birth, death }
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.birth
            .total_cmp(&other.birth)
            .then(self.death.total_cmp(&other.death))
    }
}

/// Multiset of persistence points for one homological dimension. `cap` is
/// the filtration threshold the diagram was computed with.
#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceDiagram {
    pub dim: usize,
    pub points: Vec<PersistencePoint>,
    pub cap: f64,
}

impl PersistenceDiagram {
    pub fn new(dim: usize, points: Vec<PersistencePoint>, cap: f64) -> Self {
        PersistenceDiagram { dim, points, cap }
    }

    pub fn from_pairs(dim: usize, pairs: &[(f64, f64)], cap: f64) -> Self {
        let points = pairs
            .iter()
            .map(|&(b, d)| PersistencePoint::new(b, d))
            .collect();
        PersistenceDiagram { dim, points, cap }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn essential_count(&self) -> usize {
        self.points.iter().filter(|p| p.is_essential()).count()
    }

    pub fn has_infinite_death(&self) -> bool {
        self.points.iter().any(PersistencePoint::is_essential)
    }

    /// Points ordered by birth, then death.
    pub fn sorted_points(&self) -> Vec<PersistencePoint> {
        let mut pts = self.points.clone();
        pts.sort_by(PersistencePoint::total_cmp);
        pts
    }

    /// Sorted `(birth, death)` tuples, convenient for comparisons.
    pub fn sorted_pairs(&self) -> Vec<(f64, f64)> {
        self.sorted_points()
            .iter()
            .map(|p| (p.birth, p.death))
            .collect()
    }

    /// Multiset equality, ignoring point order.
    pub fn same_points(&self, other: &PersistenceDiagram) -> bool {
        self.dim == other.dim && self.sorted_pairs() == other.sorted_pairs()
    }

    pub fn records(&self) -> Vec<PointRecord> {
        self.sorted_points()
            .into_iter()
            .map(|p| PointRecord {
                dim: self.dim,
                birth: p.birth,
                death: p.death,
            })
            .collect()
    }

    /// JSON array of `{dim, birth, death}` objects, `death` being `"inf"`
    /// for essential classes.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.records()).expect("records serialize")
    }

    /// CSV rows `graph_id,dim,birth,death` without a header.
    pub fn write_csv_rows(&self, graph_id: usize, out: &mut String) {
        for p in self.sorted_points() {
            let _ = writeln!(
                out,
                "{graph_id},{},{},{}",
                self.dim,
                crate::format_float(p.birth),
                crate::format_float(p.death)
            );
        }
    }
}

/// Serialized form of one diagram point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub dim: usize,
    pub birth: f64,
    #[serde(
        serialize_with = "serialize_death",
        deserialize_with = "deserialize_death"
    )]
    pub death: f64,
}

fn serialize_death<S: Serializer>(death: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if death.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*death)
    }
}

fn deserialize_death<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Death {
        Finite(f64),
        Text(String),
    }
    match Death::deserialize(d)? {
        Death::Finite(v) => Ok(v),
        Death::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Death::Text(t) => Err(serde::de::Error::custom(format!(
            "invalid death value {t:?}"
        ))),
    }
}

/// Parses the output of [`PersistenceDiagram::to_json`]. An empty list
/// yields an empty diagram of dimension `dim`.
pub fn diagram_from_json(json: &str, dim: usize, cap: f64) -> Result<PersistenceDiagram> {
    let records: Vec<PointRecord> = serde_json::from_str(json)
        .map_err(|e| Error::validation(format!("bad diagram JSON: {e}")))?;
    if let Some(r) = records.iter().find(|r| r.dim != dim) {
        return Err(Error::validation(format!(
            "record of dimension {} in a dimension {dim} diagram",
            r.dim
        )));
    }
    let points = records
        .iter()
        .map(|r| PersistencePoint::new(r.birth, r.death))
        .collect();
    Ok(PersistenceDiagram::new(dim, points, cap))
}

/// Disjoint sets whose representative is always the smallest member.
struct ElderUnionFind {
    parent: Vec<usize>,
}

impl ElderUnionFind {
    fn new(n: usize) -> Self {
        ElderUnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; returns false if already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (elder, younger) = (ra.min(rb), ra.max(rb));
        self.parent[younger] = elder;
        true
    }
}

/// Zero-dimensional diagram: every vertex is born at 0; each merging edge
/// kills one class at its value and the survivors are essential.
pub fn persistence_h0(f: &Filtration) -> PersistenceDiagram {
    let mut uf = ElderUnionFind::new(f.num_vertices());
    let mut points = Vec::new();
    for s in f.simplices().iter().filter(|s| s.dim() == 1) {
        let v = s.vertices();
        if uf.union(v[0], v[1]) && s.value() > 0.0 {
            points.push(PersistencePoint::new(0.0, s.value()));
        }
    }
    for v in 0..f.num_vertices() {
        if uf.find(v) == v {
            points.push(PersistencePoint::new(0.0, f64::INFINITY));
        }
    }
    PersistenceDiagram::new(0, points, f.threshold())
}

/// Pairing produced by reducing the boundary matrix of a filtration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    /// `(birth index, death index)` into the filtration's simplex list.
    pub pairs: Vec<(usize, usize)>,
    /// Indices of simplices that create a class which never dies.
    pub essential: Vec<usize>,
}

const NO_COLUMN: usize = usize::MAX;

/// Symmetric difference of two sorted index lists.
fn xor_into(target: &mut Vec<usize>, other: &[usize], scratch: &mut Vec<usize>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(target[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&target[i..]);
    scratch.extend_from_slice(&other[j..]);
    std::mem::swap(target, scratch);
}

/// Boundary of every simplex as sorted indices into the filtration.
fn boundary_columns(simplices: &[Simplex], num_vertices: usize) -> Vec<Vec<usize>> {
    let n = num_vertices;
    let mut vertex_index = vec![NO_COLUMN; n];
    let mut edge_index = vec![NO_COLUMN; n * n];
    let mut columns = Vec::with_capacity(simplices.len());
    for (idx, s) in simplices.iter().enumerate() {
        let v = s.vertices();
        let mut col: Vec<usize> = match v.len() {
            1 => {
                vertex_index[v[0]] = idx;
                Vec::new()
            }
            2 => {
                edge_index[v[0] * n + v[1]] = idx;
                vec![vertex_index[v[0]], vertex_index[v[1]]]
            }
            _ => vec![
                edge_index[v[0] * n + v[1]],
                edge_index[v[0] * n + v[2]],
                edge_index[v[1] * n + v[2]],
            ],
        };
        debug_assert!(col.iter().all(|&c| c != NO_COLUMN), "face after coface");
        col.sort_unstable();
        columns.push(col);
    }
    columns
}

/// Reduces the boundary matrix of `f` over Z/2 with clearing: triangle
/// columns first, then every edge column that is not already known to be
/// a pivot of a triangle column.
pub fn reduce_boundary(f: &Filtration) -> Pairing {
    let simplices = f.simplices();
    let mut columns = boundary_columns(simplices, f.num_vertices());
    let mut pivot_owner = vec![NO_COLUMN; simplices.len()];
    let mut cleared = vec![false; simplices.len()];
    let mut scratch = Vec::new();
    let mut pairs = Vec::new();

    for dim in (1..=f.max_dim()).rev() {
        for idx in 0..simplices.len() {
            if simplices[idx].dim() != dim || cleared[idx] {
                continue;
            }
            let mut col = std::mem::take(&mut columns[idx]);
            while let Some(&low) = col.last() {
                let owner = pivot_owner[low];
                if owner == NO_COLUMN {
                    break;
                }
                xor_into(&mut col, &columns[owner], &mut scratch);
            }
            if let Some(&low) = col.last() {
                pivot_owner[low] = idx;
                cleared[low] = true;
                pairs.push((low, idx));
            }
            columns[idx] = col;
        }
    }

    let mut is_positive_paired = vec![false; simplices.len()];
    let mut is_negative = vec![false; simplices.len()];
    for &(b, d) in &pairs {
        is_positive_paired[b] = true;
        is_negative[d] = true;
    }
    let essential = (0..simplices.len())
        .filter(|&i| simplices[i].dim() < f.max_dim() && !is_negative[i] && !is_positive_paired[i])
        .collect();
    pairs.sort_unstable();
    Pairing { pairs, essential }
}

/// One-dimensional diagram of a filtration that contains triangles.
/// Zero-length pairs are dropped; loops never filled below the threshold
/// are kept with infinite death.
pub fn persistence_h1(f: &Filtration) -> Result<PersistenceDiagram> {
    if f.max_dim() < 2 {
        return Err(Error::precondition(
            "one-dimensional persistence needs a filtration with triangles (max_dim = 2)",
        ));
    }
    let simplices = f.simplices();
    let pairing = reduce_boundary(f);
    let mut points: Vec<PersistencePoint> = pairing
        .pairs
        .iter()
        .filter(|&&(b, _)| simplices[b].dim() == 1)
        .map(|&(b, d)| PersistencePoint::new(simplices[b].value(), simplices[d].value()))
        .filter(|p| p.death > p.birth)
        .collect();
    points.extend(
        pairing
            .essential
            .iter()
            .filter(|&&i| simplices[i].dim() == 1)
            .map(|&i| PersistencePoint::new(simplices[i].value(), f64::INFINITY)),
    );
    Ok(PersistenceDiagram::new(1, points, f.threshold()))
}

/// Number of points with `birth <= t < death`.
pub fn betti_from_diagram(pd: &PersistenceDiagram, t: f64) -> usize {
    pd.points
        .iter()
        .filter(|p| p.birth <= t && t < p.death)
        .count()
}
