//! Persistent homology of graphs.
//!
//! A graph is turned into a metric space (hop distance or effective
//! resistance), normalized to `[0, 1]`, and filtered by the Vietoris-Rips
//! flag complex. Persistence diagrams in dimensions 0 and 1 are vectorized
//! as Betti functions, landscapes or silhouettes on a scale grid, and can be
//! compared with Wasserstein and bottleneck distances.
//!
//! ```
//! use graph_ph::{filtration, graph, metric, persistence};
//!
//! let c4 = graph::graph_from_edge_list(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
//! let dm = metric::shortest_path_matrix(&c4).normalize();
//! let f = filtration::build_flag_filtration(&dm, 2, 1.0).unwrap();
//! let h1 = persistence::persistence_h1(&f).unwrap();
//! assert_eq!(h1.sorted_pairs(), vec![(0.5, 1.0)]);
//! ```

pub mod assignment;
pub mod cli;
pub mod diagram_distance;
pub mod error;
pub mod features;
pub mod filtration;
pub mod fixtures;
pub mod graph;
pub mod metric;
pub mod persistence;
pub mod pipeline;
pub mod stability;
pub mod vectorize;

pub use error::{Error, Result};

/// Renders `x` with 9 significant digits in fixed notation, trailing zeros
/// trimmed. Infinity is written `inf`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).clamp(0, 24) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}
