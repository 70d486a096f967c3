//! Exact assignment solvers on dense square cost matrices.

use std::collections::VecDeque;

/// Minimum-cost perfect assignment of an `n x n` row-major cost matrix by
/// the Hungarian method with potentials, `O(n^3)`. Returns the column
/// assigned to each row.
pub fn hungarian(n: usize, cost: &[f64]) -> Vec<usize> {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    if n == 0 {
        return Vec::new();
    }
    // 1-based internals; column 0 is a virtual start column.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut min_slack = vec![f64::INFINITY; n + 1];
    let mut used = vec![false; n + 1];

    for row in 1..=n {
        row_of_col[0] = row;
        let mut col0 = 0usize;
        min_slack.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[col0] = true;
            let r = row_of_col[col0];
            let mut delta = f64::INFINITY;
            let mut next_col = 0usize;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let slack = cost[(r - 1) * n + (col - 1)] - u[r] - v[col];
                if slack < min_slack[col] {
                    min_slack[col] = slack;
                    way[col] = col0;
                }
                if min_slack[col] < delta {
                    delta = min_slack[col];
                    next_col = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[row_of_col[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = next_col;
            if row_of_col[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            row_of_col[col0] = row_of_col[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for col in 1..=n {
        assignment[row_of_col[col] - 1] = col - 1;
    }
    assignment
}

/// Maximum bipartite matching by Hopcroft-Karp. `adjacency[r]` lists the
/// columns row `r` may use. Returns the matched column per row, if any.
pub fn hopcroft_karp(rows: usize, cols: usize, adjacency: &[Vec<usize>]) -> Vec<Option<usize>> {
    const FREE: usize = usize::MAX;
    let mut match_row = vec![FREE; rows];
    let mut match_col = vec![FREE; cols];
    let mut layer = vec![0usize; rows];

    loop {
        // BFS from free rows, layering by alternating path length.
        let mut queue = VecDeque::new();
        let mut found_free = false;
        for r in 0..rows {
            if match_row[r] == FREE {
                layer[r] = 0;
                queue.push_back(r);
            } else {
                layer[r] = usize::MAX;
            }
        }
        while let Some(r) = queue.pop_front() {
            for &c in &adjacency[r] {
                let partner = match_col[c];
                if partner == FREE {
                    found_free = true;
                } else if layer[partner] == usize::MAX {
                    layer[partner] = layer[r] + 1;
                    queue.push_back(partner);
                }
            }
        }
        if !found_free {
            break;
        }

        let mut progress = false;
        let mut next_edge = vec![0usize; rows];
        for r in 0..rows {
            if match_row[r] == FREE
                && augment(
                    r,
                    adjacency,
                    &mut match_row,
                    &mut match_col,
                    &mut layer,
                    &mut next_edge,
                )
            {
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    match_row
        .into_iter()
        .map(|c| (c != FREE).then_some(c))
        .collect()
}

fn augment(
    root: usize,
    adjacency: &[Vec<usize>],
    match_row: &mut [usize],
    match_col: &mut [usize],
    layer: &mut [usize],
    next_edge: &mut [usize],
) -> bool {
    const FREE: usize = usize::MAX;
    // Iterative DFS along layered edges.
    let mut stack = vec![root];
    while let Some(&r) = stack.last() {
        if next_edge[r] == adjacency[r].len() {
            layer[r] = usize::MAX;
            stack.pop();
            continue;
        }
        let c = adjacency[r][next_edge[r]];
        next_edge[r] += 1;
        let partner = match_col[c];
        if partner == FREE {
            // Flip the path: each row on the stack takes the column it last tried.
            for &row in stack.iter().rev() {
                let col = adjacency[row][next_edge[row] - 1];
                match_col[col] = row;
                match_row[row] = col;
            }
            return true;
        }
        if layer[partner] == layer[r].wrapping_add(1) {
            stack.push(partner);
        }
    }
    false
}
