use serde::{Deserialize, Serialize};

use crate::carnot::{GroupSpec, KernelVector, Region};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Closed-form upper bound for a packing pre-measure of a model set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticBound {
    /// Geometric constant `c` in the bound.
    pub constant: f64,
    pub value: f64,
}

/// `1 / height(B(0, 1))`, where the height is the length of the ball's
/// intersection with the vertical axis, found by bisection on the gauge.
pub fn vertical_packing_constant(g: &GroupSpec) -> Result<f64> {
    if g.is_abelian() {
        return Err(Error::Unsupported("vertical segments need a non-abelian group".into()));
    }
    let n = g.n();
    let at = |t: f64| {
        let mut p = vec![0.0; n];
        p[n - 1] = t;
        g.gauge(&p)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while at(hi) <= 1.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if at(mid) <= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(1.0 / (2.0 * lo))
}

/// `1 / L_V(B(0, 1) cap V)` for the subgroup `V` spanned by an orthonormal
/// graded basis, by a midpoint rule in basis coordinates.
pub fn section_packing_constant(g: &GroupSpec, basis: &[KernelVector]) -> Result<f64> {
    let k = basis.len();
    if k == 0 {
        return Err(Error::Domain("empty kernel".into()));
    }
    let res = (4.0e6f64.powf(1.0 / k as f64)).floor().max(8.0) as usize;
    let mut half = vec![0.0; g.n()];
    g.neighbor_window(&g.identity::<f64>(), 1.0, &mut half);
    let bounds: Vec<f64> = basis
        .iter()
        .map(|v| v.coords.iter().zip(&half).filter(|(c, _)| c.abs() > 0.0).map(|(_, h)| *h).fold(0.0, f64::max))
        .collect();
    let cell: f64 = bounds.iter().map(|b| 2.0 * b / res as f64).product();
    let mut idx = vec![0usize; k];
    let mut p = vec![0.0; g.n()];
    let mut count = 0usize;
    'outer: loop {
        p.iter_mut().for_each(|x| *x = 0.0);
        for (j, v) in basis.iter().enumerate() {
            let a = -bounds[j] + (idx[j] as f64 + 0.5) * 2.0 * bounds[j] / res as f64;
            for (x, c) in p.iter_mut().zip(&v.coords) {
                *x += a * c;
            }
        }
        count += (g.gauge(&p) <= 1.0) as usize;
        for j in 0..k {
            idx[j] += 1;
            if idx[j] < res {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    Ok(1.0 / (count as f64 * cell))
}

/// Upper bound for `sum radius^p` over `(N, 1)`-packings of mesh `eps`
/// centered on a model set, radii at most `eps`:
///
/// * horizontal segment of length `L`: `N L eps^(p-1) / 2`;
/// * vertical segment of height `h`: `c N h eps^(p-2)`;
/// * kernel patch `A` of a homomorphism onto a group of dimension `Q''`:
///   `c N L(A + eps) eps^(p - Q + Q'')`.
///
/// Returns `None` for other regions.
pub fn analytic_bound<T: Real>(
    g: &GroupSpec,
    region: &Region<T>,
    p: f64,
    eps: f64,
    n_colors: usize,
) -> Result<Option<AnalyticBound>> {
    let nf = n_colors as f64;
    Ok(match region {
        Region::HorizontalSegment { length, .. } => {
            let c = 0.5;
            Some(AnalyticBound { constant: c, value: c * nf * length.as_f64() * eps.powf(p - 1.0) })
        }
        Region::VerticalSegment { height, .. } => {
            let c = vertical_packing_constant(g)?;
            Some(AnalyticBound { constant: c, value: c * nf * height.as_f64() * eps.powf(p - 2.0) })
        }
        Region::KernelPatch { hom, basis, .. } => {
            let c = section_packing_constant(g, basis)?;
            let nbhd = region.kernel_neighborhood_measure(g, T::lit(eps))?.as_f64();
            // Q - Q'' is the homogeneous dimension of the kernel.
            let dim = (g.q() - hom.target().q()) as f64;
            Some(AnalyticBound { constant: c, value: c * nf * nbhd * eps.powf(p - dim) })
        }
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carnot::HomHom;

    #[test]
    fn vertical_constant_from_ball_height() {
        let g = GroupSpec::heisenberg(1).unwrap();
        assert!((vertical_packing_constant(&g).unwrap() - 2.0).abs() < 1e-12);
        assert!(vertical_packing_constant(&GroupSpec::euclidean(2).unwrap()).is_err());
    }

    #[test]
    fn section_constant_for_x_kernel() {
        // {(0, y, z): y^4 + 16 z^2 <= 1} has area int_0^1 sqrt(1 - y^4) dy
        let g = GroupSpec::heisenberg(1).unwrap();
        let u = HomHom::coordinate_projection(g, &[0]).unwrap();
        let c = section_packing_constant(&g, &u.kernel_basis()).unwrap();
        let area = 0.874019;
        assert!((1.0 / c - area).abs() < 2e-3, "{}", 1.0 / c);
    }
}
