//! Brute-force reference implementations. None of these call into the
//! library's algorithms; they only share its data types at the boundary.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};

use graph_ph::graph::{parse_tu_dataset, Graph, GraphDataset};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixtures_dir() -> PathBuf {
    crate_dir().join("fixtures")
}

/// Hop distances by repeated relaxation (Floyd-Warshall on unit weights).
pub fn hop_distances(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v) in edges {
        d[u][v] = 1.0;
        d[v][u] = 1.0;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Effective resistance from `(L + J/m)^{-1} - J/m` on each component.
pub fn resistance_oracle(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.num_nodes();
    let mut r = vec![vec![f64::INFINITY; n]; n];
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    queue.push_back(v);
                }
            }
        }
        let m = comp.len();
        let mut l = DMatrix::<f64>::from_element(m, m, 1.0 / m as f64);
        for (a, &u) in comp.iter().enumerate() {
            for (b, &v) in comp.iter().enumerate() {
                if a == b {
                    l[(a, b)] += g.degree(u) as f64;
                } else if g.has_edge(u, v) {
                    l[(a, b)] -= 1.0;
                }
            }
        }
        let inv = l
            .try_inverse()
            .expect("L + J/m is invertible on a connected component");
        for (a, &u) in comp.iter().enumerate() {
            for (b, &v) in comp.iter().enumerate() {
                r[u][v] = if a == b {
                    0.0
                } else {
                    inv[(a, a)] + inv[(b, b)] - 2.0 * inv[(a, b)]
                };
            }
        }
    }
    r
}

/// Largest clique by checking every vertex subset. Only for small graphs.
pub fn clique_number_exhaustive(g: &Graph) -> usize {
    let n = g.num_nodes();
    assert!(n <= 20, "exhaustive clique search is exponential");
    let mut adj = vec![0u32; n];
    for &(u, v) in g.edges() {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    let mut best = 0;
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let clique = (0..n)
            .filter(|&v| mask >> v & 1 == 1)
            .all(|v| mask & !(1 << v) & !adj[v] == 0);
        if clique {
            best = size;
        }
    }
    best
}

/// Spanning-forest edge weights by Kruskal over the complete graph on the
/// finite entries of `d`.
pub fn kruskal_weights(d: &[Vec<f64>]) -> Vec<f64> {
    let n = d.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if d[i][j].is_finite() {
                edges.push((d[i][j], i, j));
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    let mut out = Vec::new();
    for (w, i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
            out.push(w);
        }
    }
    out
}

/// Diagrams of the Rips complex of `d` truncated at `threshold`, from the
/// textbook left-to-right reduction of the full boundary matrix (vertices,
/// edges and triangles, no clearing). Zero-persistence pairs are dropped.
/// Returns the sorted `(birth, death)` lists for dimensions 0 and 1.
pub fn naive_rips_diagrams(d: &[Vec<f64>], threshold: f64) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let n = d.len();
    let present = |i: usize, j: usize| d[i][j].is_finite() && d[i][j] <= threshold;
    let mut simplices: Vec<(f64, Vec<usize>)> = (0..n).map(|v| (0.0, vec![v])).collect();
    for i in 0..n {
        for j in i + 1..n {
            if present(i, j) {
                simplices.push((d[i][j], vec![i, j]));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if present(i, j) && present(i, k) && present(j, k) {
                    simplices.push((d[i][j].max(d[i][k]).max(d[j][k]), vec![i, j, k]));
                }
            }
        }
    }
    simplices.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.len().cmp(&b.1.len()))
            .then(a.1.cmp(&b.1))
    });
    let index_of = |vs: &[usize]| {
        simplices
            .iter()
            .position(|(_, s)| s == vs)
            .expect("face present")
    };
    let mut columns: Vec<BTreeSet<usize>> = simplices
        .iter()
        .map(|(_, vs)| {
            let mut col = BTreeSet::new();
            if vs.len() > 1 {
                for skip in 0..vs.len() {
                    let face: Vec<usize> = vs
                        .iter()
                        .enumerate()
                        .filter(|&(p, _)| p != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    col.insert(index_of(&face));
                }
            }
            col
        })
        .collect();
    let mut owner_of_low: Vec<Option<usize>> = vec![None; simplices.len()];
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].iter().next_back() {
            match owner_of_low[low] {
                Some(k) => {
                    let other = columns[k].clone();
                    for r in other {
                        if !columns[j].remove(&r) {
                            columns[j].insert(r);
                        }
                    }
                }
                None => {
                    owner_of_low[low] = Some(j);
                    break;
                }
            }
        }
    }
    let (mut h0, mut h1) = (Vec::new(), Vec::new());
    for (i, (value, vs)) in simplices.iter().enumerate() {
        if !columns[i].is_empty() {
            continue; // negative simplex
        }
        let death = owner_of_low[i].map_or(f64::INFINITY, |j| simplices[j].0);
        if death == *value {
            continue;
        }
        match vs.len() {
            1 => h0.push((*value, death)),
            2 => h1.push((*value, death)),
            _ => {} // triangles may be positive but dimension 2 is not reported
        }
    }
    let sort =
        |v: &mut Vec<(f64, f64)>| v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    sort(&mut h0);
    sort(&mut h1);
    (h0, h1)
}

/// `∫ |1[a,b)(t) - 1[c,d)(t)| dt` by the midpoint rule with `cells` cells
/// over `[lo, hi]`.
pub fn lemma_integral(u: (f64, f64), v: (f64, f64), lo: f64, hi: f64, cells: usize) -> f64 {
    let h = (hi - lo) / cells as f64;
    let inside = |t: f64, (a, b): (f64, f64)| -> f64 {
        if a <= t && t < b {
            1.0
        } else {
            0.0
        }
    };
    (0..cells)
        .map(|i| {
            let t = lo + (i as f64 + 0.5) * h;
            (inside(t, u) - inside(t, v)).abs()
        })
        .sum::<f64>()
        * h
}

/// `G(n, p)` from a seeded generator.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

pub fn matrix_rows(dm: &graph_ph::metric::DistanceMatrix) -> Vec<Vec<f64>> {
    (0..dm.size()).map(|i| dm.row(i).to_vec()).collect()
}

/// Environment variable pointing at a complete MUTAG TUDataset directory.
pub const MUTAG_DIR_ENV: &str = "GRAPH_PH_MUTAG_DIR";

/// Where MUTAG came from, which decides what can be checked.
pub enum MutagSource {
    /// A complete TUDataset directory including graph labels.
    Full(PathBuf),
    /// The vendored edge and indicator files only; class labels unknown.
    StructureOnly,
}

/// Directory holding the vendored MUTAG structure files.
pub fn mutag_structure_dir() -> PathBuf {
    crate_dir().join("tests/data/mutag_structure")
}

/// Materializes a TUDataset directory for MUTAG under `scratch` and loads
/// it. Without a full copy, the vendored structure is paired with a
/// single-class placeholder label file; class-dependent checks must then
/// be skipped.
pub fn load_mutag(scratch: &Path) -> (GraphDataset, MutagSource, PathBuf) {
    if let Ok(dir) = std::env::var(MUTAG_DIR_ENV) {
        let dir = PathBuf::from(dir);
        let ds = parse_tu_dataset(&dir, "MUTAG").expect("MUTAG directory parses");
        return (ds, MutagSource::Full(dir.clone()), dir);
    }
    let src = mutag_structure_dir();
    fs::create_dir_all(scratch).unwrap();
    for file in ["MUTAG_A.txt", "MUTAG_graph_indicator.txt"] {
        fs::copy(src.join(file), scratch.join(file)).unwrap();
    }
    let graphs = fs::read_to_string(src.join("MUTAG_graph_indicator.txt"))
        .unwrap()
        .lines()
        .filter_map(|l| l.trim().parse::<usize>().ok())
        .max()
        .unwrap_or(0);
    fs::write(scratch.join("MUTAG_graph_labels.txt"), "0\n".repeat(graphs)).unwrap();
    let ds = parse_tu_dataset(scratch, "MUTAG").expect("vendored MUTAG parses");
    (ds, MutagSource::StructureOnly, scratch.to_path_buf())
}

/// Optimal partial matching cost between two finite diagrams by trying
/// every permutation of the diagonal-augmented cost matrix. `q = None`
/// gives the bottleneck distance.
pub fn brute_force_diagram_distance(x: &[(f64, f64)], y: &[(f64, f64)], q: Option<f64>) -> f64 {
    let (n, m) = (x.len(), y.len());
    let size = n + m;
    assert!(size <= 9, "permutation search is factorial");
    let half = |p: &(f64, f64)| (p.1 - p.0) / 2.0;
    // rows: points of x then m diagonal copies; columns: points of y then n
    // diagonal copies
    let cost = |i: usize, j: usize| -> f64 {
        match (i < n, j < m) {
            (true, true) => (x[i].0 - y[j].0).abs().max((x[i].1 - y[j].1).abs()),
            (true, false) => half(&x[i]),
            (false, true) => half(&y[j]),
            (false, false) => 0.0,
        }
    };
    let mut perm: Vec<usize> = (0..size).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let total = match q {
            Some(q) => p
                .iter()
                .enumerate()
                .map(|(i, &j)| cost(i, j).powf(q))
                .sum::<f64>(),
            None => p
                .iter()
                .enumerate()
                .map(|(i, &j)| cost(i, j))
                .fold(0.0, f64::max),
        };
        best = best.min(total);
    });
    match q {
        Some(q) if size > 0 => best.powf(1.0 / q),
        _ if size == 0 => 0.0,
        _ => best,
    }
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}
