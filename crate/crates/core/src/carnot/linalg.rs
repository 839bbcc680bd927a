//! Small dense helpers on row-major `f64` matrices.

/// Row echelon reduction; returns the pivot columns.
fn reduce(mut a: Vec<Vec<f64>>, tol: f64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, val) = (r..rows)
            .map(|i| (i, a[i][c].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            continue;
        }
        a.swap(r, best);
        let p = a[r][c];
        for v in a[r].iter_mut() {
            *v /= p;
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0.0 {
                let f = a[i][c];
                for j in 0..cols {
                    a[i][j] -= f * a[r][j];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(a: &[Vec<f64>]) -> usize {
    reduce(a.to_vec(), 1e-12).1.len()
}

/// Orthonormal basis of the null space of `a` (columns count = `cols`).
pub fn null_space(a: &[Vec<f64>], cols: usize) -> Vec<Vec<f64>> {
    let (red, pivots) = reduce(a.to_vec(), 1e-12);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![0.0; cols];
        v[f] = 1.0;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -red[row][f];
        }
        basis.push(v);
    }
    gram_schmidt(basis)
}

pub fn gram_schmidt(vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mut v in vs {
        for u in &out {
            let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= d * y;
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            out.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    out
}

pub fn determinant(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        if m[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            m.swap(piv, c);
            det = -det;
        }
        det *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                m[i][j] -= f * m[c][j];
            }
        }
    }
    det
}

/// `sqrt(det(A A^T))` for a `k x n` matrix with `k <= n`: the factor by which
/// `A` scales `k`-volumes of the unit ball of `R^n` onto `R^k`.
pub fn gram_volume_factor(a: &[Vec<f64>]) -> f64 {
    let k = a.len();
    let mut g = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            g[i][j] = a[i].iter().zip(&a[j]).map(|(x, y)| x * y).sum();
        }
    }
    determinant(&g).max(0.0).sqrt()
}

/// Volume of the Euclidean unit ball in `R^k`.
pub fn unit_ball_volume(k: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_k = 2 pi / k V_{k-2}
    let mut v = [1.0, 2.0];
    if k < 2 {
        return v[k];
    }
    let mut cur = 0.0;
    for d in 2..=k {
        cur = 2.0 * std::f64::consts::PI / d as f64 * v[d % 2];
        v[d % 2] = cur;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        let a = vec![vec![1.0, 0.0, 0.0]];
        assert_eq!(rank(&a), 1);
        let k = null_space(&a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(v[0].abs() < 1e-12);
        }
    }

    #[test]
    fn determinants_and_volumes() {
        assert!((determinant(&[vec![2.0, 0.0], vec![0.0, 2.0]]) - 4.0).abs() < 1e-12);
        assert!((determinant(&[vec![0.0, 1.0], vec![1.0, 0.0]]) + 1.0).abs() < 1e-12);
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-12);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((gram_volume_factor(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]) - 1.0).abs() < 1e-12);
    }
}
