//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use carnot_lab::carnot::GroupSpec;

/// Same-colored centers must be farther apart than `2 ell r`; the distance
/// is composed from the group primitives rather than the fast path.
pub fn conflicts(g: &GroupSpec, centers: &[Vec<f64>], radius: f64, ell: f64) -> Vec<Vec<bool>> {
    let n = centers.len();
    let mut c = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d: f64 = g.gauge(&g.product(&g.inverse(&centers[i]), &centers[j]));
            let hit = d <= 2.0 * ell * radius;
            c[i][j] = hit;
            c[j][i] = hit;
        }
    }
    c
}

/// Largest number of candidates splitting into `n_colors` conflict-free
/// classes, by branch and bound over color assignments.
pub fn exhaustive_optimum(conflict: &[Vec<bool>], n_colors: usize) -> usize {
    fn go(k: usize, conflict: &[Vec<bool>], classes: &mut Vec<Vec<usize>>, n_colors: usize, count: usize, best: &mut usize) {
        let n = conflict.len();
        if count + (n - k) <= *best {
            return;
        }
        if k == n {
            *best = count;
            return;
        }
        // Classes are interchangeable, so open at most one new class.
        let open = classes.len();
        for c in 0..open.min(n_colors) {
            if classes[c].iter().all(|&j| !conflict[k][j]) {
                classes[c].push(k);
                go(k + 1, conflict, classes, n_colors, count + 1, best);
                classes[c].pop();
            }
        }
        if open < n_colors {
            classes.push(vec![k]);
            go(k + 1, conflict, classes, n_colors, count + 1, best);
            classes.pop();
        }
        go(k + 1, conflict, classes, n_colors, count, best);
    }
    let mut best = 0;
    go(0, conflict, &mut Vec::new(), n_colors, 0, &mut best);
    best
}
