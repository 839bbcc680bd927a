use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::report::InequalityReport;
use crate::carnot::{GroupSpec, Pt, Region};
use crate::error::{Error, Result};
use crate::measures::{dimension_estimate, loglog_fit, PackingParams, Sweep};
use crate::packing::{build_greedy_packing, verify_packing, Ball, PackingFamily, RadiusFn};

/// The coordinate identity between two geometries on `R^n`, e.g. Euclidean
/// `R^3` and `Heis^1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateIdentity {
    pub source: GroupSpec,
    pub target: GroupSpec,
}

impl CoordinateIdentity {
    pub fn new(source: GroupSpec, target: GroupSpec) -> Result<Self> {
        if source.n() != target.n() {
            return Err(Error::DimensionMismatch { expected: source.n(), got: target.n() });
        }
        Ok(CoordinateIdentity { source, target })
    }
}

/// Empirical Hoelder data of `f` on a box, from random pairs at dyadic scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    /// `max d_Y / d_X^alpha` over the pairs.
    pub constant: f64,
    /// Slope of `ln max d_Y` against `ln d_X` across scales.
    pub alpha: f64,
    pub pairs: usize,
    pub worst: (Vec<f64>, Vec<f64>),
}

/// Samples `pairs` pairs `(x, x + delta v)` with `x` uniform in the box
/// `[corner, corner + sides]`, `v` a random unit vector and `delta = 2^-k`,
/// `k = 0..scales`.
pub fn empirical_holder(
    f: &CoordinateIdentity,
    alpha: f64,
    corner: &[f64],
    sides: &[f64],
    pairs: usize,
    scales: usize,
    seed: u64,
) -> Result<HolderFit> {
    let n = f.source.n();
    f.source.check_dim(corner)?;
    f.source.check_dim(sides)?;
    if scales < 2 || pairs < scales {
        return Err(Error::InvalidParameter { name: "pairs", reason: "need two scales and a pair per scale".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_scale = pairs / scales;
    let mut constant: f64 = 0.0;
    let mut worst = (Vec::new(), Vec::new());
    let mut xs = Vec::with_capacity(scales);
    let mut ys = Vec::with_capacity(scales);
    for k in 0..scales {
        let delta = 2f64.powi(-(k as i32));
        let mut max_image: f64 = 0.0;
        for _ in 0..per_scale {
            let x: Vec<f64> = (0..n).map(|i| corner[i] + rng.gen::<f64>() * sides[i]).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
            let y: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + delta * b / norm).collect();
            let dx = f.source.distance(&x, &y);
            let dy = f.target.distance(&x, &y);
            max_image = max_image.max(dy);
            let ratio = dy / dx.powf(alpha);
            if ratio > constant {
                constant = ratio;
                worst = (x, y);
            }
        }
        xs.push(delta);
        ys.push(max_image);
    }
    let fit = loglog_fit(&xs, &ys)?;
    Ok(HolderFit { constant, alpha: fit.slope, pairs: per_scale * scales, worst })
}

/// Checks `f` against `d_Y <= C d_X^alpha` on fresh pairs.
pub fn validate_holder(f: &CoordinateIdentity, alpha: f64, c: f64, corner: &[f64], sides: &[f64], seed: u64) -> Result<()> {
    let fit = empirical_holder(f, alpha, corner, sides, 10_000, 10, seed)?;
    if fit.constant > c {
        let (x, y) = fit.worst;
        let image_distance = f.target.distance(&x, &y);
        return Err(Error::HolderViolation {
            i: 0,
            j: 1,
            image_distance,
            bound: c * f.source.distance(&x, &y).powf(alpha),
        });
    }
    Ok(())
}

/// Hoelder covariance of packing pre-measures under `f = id`:
/// a greedy `(N, l)`-packing `{B'_i}` of `f(A)` pulls back to
/// `B_i = B(x_i, (1/l)(l r'_i / C)^(1/alpha))`, which must be an
/// `(N, l)`-packing of `A`, and
/// `sum r_i^(alpha p) = l^(p(1 - alpha)) C^(-p) sum r'_i^p` holds exactly.
/// Also compares packing dimensions: `dim A >= alpha dim f(A) - 0.1`.
#[allow(clippy::too_many_arguments)]
pub fn holder_covariance_check(
    f: &CoordinateIdentity,
    alpha: f64,
    c: f64,
    source_region: &Region<f64>,
    target_region: &Region<f64>,
    p: f64,
    params: &PackingParams,
    eps: f64,
    sweep: &Sweep,
) -> Result<InequalityReport> {
    if !(alpha > 0.0 && alpha <= 1.0) || !(c > 0.0) {
        return Err(Error::InvalidParameter { name: "alpha", reason: "need 0 < alpha <= 1 and C > 0".into() });
    }
    let ell = params.ell;
    let image = build_greedy_packing(&f.target, target_region, &RadiusFn, p, eps, params.n_colors, ell, params.seed)?;
    let pulled: Vec<Ball<f64>> = image
        .family
        .balls
        .iter()
        .map(|b| Ball::new(b.center.clone(), (ell * b.radius / c).powf(1.0 / alpha) / ell))
        .collect();
    let outside = pulled.iter().filter(|b| !source_region.contains(&f.source, &b.center)).count();
    let max_radius = pulled.iter().map(|b| b.radius).fold(0.0, f64::max);
    let family = PackingFamily {
        group: f.source,
        balls: pulled.clone(),
        colors: image.family.colors.clone(),
        n_colors: params.n_colors,
        ell,
        mesh: 2.0 * max_radius,
    };
    let valid = verify_packing(&family).valid;
    let source_sum: f64 = pulled.iter().map(|b| b.radius.powf(alpha * p)).sum();
    let image_sum: f64 = image.family.balls.iter().map(|b| b.radius.powf(p)).sum();
    let predicted = ell.powf(p * (1.0 - alpha)) * c.powf(-p) * image_sum;
    let identity = (source_sum - predicted).abs() <= 1e-9 * predicted.abs().max(f64::MIN_POSITIVE);

    let dim_source = dimension_estimate(&f.source, source_region, params, sweep, 1.0)?.dimension.unwrap_or(f64::NAN);
    let dim_target = dimension_estimate(&f.target, target_region, params, sweep, 1.0)?.dimension.unwrap_or(f64::NAN);
    let transport = dim_source >= alpha * dim_target - 0.1;

    Ok(InequalityReport::single("holder", eps, predicted, source_sum, 1e-9)
        .witness("balls", pulled.len() as f64)
        .witness("C", c)
        .witness("alpha", alpha)
        .witness("dim_source", dim_source)
        .witness("dim_target", dim_target)
        .witness("dimension_slack", dim_source - alpha * dim_target)
        .witness("centers_outside_source", outside as f64)
        .require("identity", identity)
        .require("pulled_back_valid", valid)
        .require("dimension_transport", transport))
}

/// Segment in `R^n` along the last axis with the same point set as the
/// vertical segment of `Heis^m` at the origin.
pub fn euclidean_vertical_axis(source: &GroupSpec, height: f64) -> Result<Region<f64>> {
    let n = source.n();
    let mut dir = vec![0.0; n];
    dir[n - 1] = 1.0;
    Region::horizontal_segment(source, Pt(vec![0.0; n]), dir, height)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> CoordinateIdentity {
        CoordinateIdentity::new(GroupSpec::euclidean(3).unwrap(), GroupSpec::heisenberg(1).unwrap()).unwrap()
    }

    #[test]
    fn identity_to_heisenberg_is_half_holder() {
        let fit = empirical_holder(&pair(), 0.5, &[0.0; 3], &[1.0; 3], 10_000, 10, 1).unwrap();
        assert!((fit.alpha - 0.5).abs() < 0.02, "{fit:?}");
        assert!(fit.constant > 1.0 && fit.constant < 4.0);
        assert!(validate_holder(&pair(), 0.5, fit.constant * 1.1, &[0.0; 3], &[1.0; 3], 2).is_ok());
        assert!(matches!(
            validate_holder(&pair(), 0.5, 0.5, &[0.0; 3], &[1.0; 3], 2),
            Err(Error::HolderViolation { .. })
        ));
    }

    #[test]
    fn same_geometry_identity_is_exact() {
        let g = GroupSpec::heisenberg(1).unwrap();
        let f = CoordinateIdentity::new(g, g).unwrap();
        let seg = Region::vertical_segment(&g, Pt(vec![0.0; 3]), 1.0).unwrap();
        let rep = holder_covariance_check(&f, 1.0, 1.0, &seg, &seg, 2.0, &PackingParams::default(), 1.0 / 16.0, &Sweep::dyadic(2, 5))
            .unwrap();
        assert!(rep.holds, "{rep:?}");
        assert!((rep.lhs - rep.rhs).abs() < 1e-12);
    }
}
