use std::collections::BTreeMap;

use super::report::InequalityReport;
use crate::carnot::{Pt, Region};
use crate::energy::{ImageMeasurer, MapKind, MapSpec};
use crate::error::{Error, Result};
use crate::measures::PackingParams;
use crate::packing::{build_greedy_packing, verify_packing, Ball, BallFunction, PackingFamily};

/// Constructive check of `PE^p_{u,N,2l}(X) <= int PE^{p-1}_{u,N,l}(u^{-1}(m)) dm`
/// for a real-valued `u`, following the recentering argument at one mesh.
///
/// An `(N, 2l)`-packing `{B_i}` of `X` is built greedily with `phi = e_u`.
/// The target line is cut into cells of length `eps / 4`; for every cell
/// meeting `u(B_i)` a fiber point `x_i in B_i` with `|u(x_i) - m| <= eps / 8`
/// is chosen as close to the center as possible and `B_{i,m}` is the
/// smallest ball at `x_i` containing `B_i`, radius `d(c_i, x_i) + r_i`. The
/// right side weighs `e_u(B_{i,m})^(p-1)` by the length of
/// `cell ∩ u(B_i)`, so that summing over cells recovers `e_u(B_i)` exactly.
pub fn coarea_check(
    u: &MapSpec,
    region: &Region<f64>,
    p: f64,
    params: &PackingParams,
    eps: f64,
    resolution: usize,
) -> Result<InequalityReport> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter { name: "p", reason: format!("must be >= 1, got {p}") });
    }
    if !u.is_real_valued() {
        return Err(Error::InvalidParameter { name: "map", reason: "coarea needs a real-valued map".into() });
    }
    let g = u.source;
    let measurer = ImageMeasurer::new(u.clone(), resolution)?;
    let doubled = 2.0 * params.ell;
    let gp = build_greedy_packing(&g, region, &measurer, p, eps, params.n_colors, doubled, params.seed)?;
    let balls = &gp.family.balls;
    let values: Vec<f64> = balls.iter().map(|b| BallFunction::<f64>::eval(&measurer, &g, b)).collect();
    let lhs: f64 = values.iter().map(|v| v.powf(p)).sum();

    let delta = eps / 4.0;
    let intervals: Vec<(f64, f64)> =
        balls.iter().zip(&values).map(|(b, &e)| image_interval(&measurer, b, e)).collect::<Result<_>>()?;

    let mut rhs = 0.0;
    let mut recentered = 0usize;
    let mut within_double = 0usize;
    let mut within_triple = 0usize;
    let mut fibers: BTreeMap<i64, Vec<(Ball<f64>, usize)>> = BTreeMap::new();
    for (i, b) in balls.iter().enumerate() {
        let (lo, hi) = intervals[i];
        if hi <= lo {
            continue;
        }
        let samples = if matches!(u.kind, MapKind::Homomorphism { .. }) { Vec::new() } else { measurer.ball_samples(&b.center, b.radius) };
        let images: Vec<f64> = samples.iter().map(|x| u.eval(x)[0]).collect();
        let first = (lo / delta).floor() as i64;
        let last = ((hi / delta).ceil() as i64 - 1).max(first);
        for k in first..=last {
            let (a, z) = (k as f64 * delta, (k + 1) as f64 * delta);
            let overlap = hi.min(z) - lo.max(a);
            if overlap <= 0.0 {
                continue;
            }
            let m = (k as f64 + 0.5) * delta;
            let x = match fiber_point(u, b, m, delta / 2.0, &samples, &images) {
                Some(x) => x,
                None => return Err(Error::FiberNotFound { ball: i, level: m }),
            };
            let d = g.distance(&b.center, &x);
            let rho = d + b.radius;
            recentered += 1;
            within_double += (d <= b.radius * (1.0 + 1e-12) && rho <= 2.0 * b.radius * (1.0 + 1e-12)) as usize;
            within_triple += (d + rho <= 3.0 * b.radius * (1.0 + 1e-12)) as usize;
            let e = measurer.measure(&x, rho)?;
            rhs += overlap * e.powf(p - 1.0);
            fibers.entry(k).or_default().push((Ball::new(x, rho), gp.family.colors[i]));
        }
    }

    let levels = fibers.len();
    let valid_levels = fibers
        .into_values()
        .filter(|members| {
            let fam = PackingFamily {
                group: g,
                balls: members.iter().map(|(b, _)| b.clone()).collect(),
                colors: members.iter().map(|(_, c)| *c).collect(),
                n_colors: params.n_colors,
                ell: params.ell,
                mesh: 2.0 * eps,
            };
            verify_packing(&fam).valid
        })
        .count();

    Ok(InequalityReport::single("coarea", eps, lhs, rhs, 0.0)
        .witness("balls", balls.len() as f64)
        .witness("recentered", recentered as f64)
        .witness("recentered_within_2B", within_double as f64)
        .witness("recentered_sets_within_3B", within_triple as f64)
        .witness("levels", levels as f64)
        .witness("levels_valid_packings", valid_levels as f64)
        .require("recentering", within_double == recentered))
}

/// `u(B)` as an interval of length `e_u(B)`.
fn image_interval(measurer: &ImageMeasurer, b: &Ball<f64>, e: f64) -> Result<(f64, f64)> {
    let u = measurer.map();
    if matches!(u.kind, MapKind::Homomorphism { .. } | MapKind::Constant { .. }) {
        // Linear images of the symmetric ball are centered at u(c).
        let c = u.eval(&b.center)[0];
        return Ok((c - e / 2.0, c + e / 2.0));
    }
    let vals: Vec<f64> = measurer.ball_samples(&b.center, b.radius).iter().map(|x| u.eval(x)[0]).collect();
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// A point of `B` with `|u(x) - m| <= tol`, as close to the center as the
/// construction allows.
fn fiber_point(u: &MapSpec, b: &Ball<f64>, m: f64, tol: f64, samples: &[Pt<f64>], images: &[f64]) -> Option<Pt<f64>> {
    let g = &u.source;
    if let MapKind::Homomorphism { hom } = &u.kind {
        // Exact: move from the center along the horizontal gradient.
        let h = g.horizontal_dim();
        let row = &hom.matrix()[0][..h];
        let norm = row.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        let c = u.eval(&b.center)[0];
        let t = ((m - c) / (b.radius * norm)).clamp(-1.0, 1.0);
        let mut step = vec![0.0; g.n()];
        for (s, a) in step.iter_mut().zip(row) {
            *s = t * b.radius * a / norm;
        }
        return Some(g.product(&b.center, &step));
    }
    let mut best: Option<(f64, usize)> = None;
    for (j, (x, &v)) in samples.iter().zip(images).enumerate() {
        if (v - m).abs() <= tol {
            let d = g.distance(&b.center, x);
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, j));
            }
        }
    }
    best.map(|(_, j)| samples[j].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carnot::GroupSpec;

    fn h1() -> GroupSpec {
        GroupSpec::heisenberg(1).unwrap()
    }

    #[test]
    fn empty_region_is_trivial() {
        let u = MapSpec::parse(h1(), "coord:x").unwrap();
        let r = coarea_check(&u, &Region::Empty, 4.0, &PackingParams::default(), 0.125, 16).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.holds);
    }

    #[test]
    fn constant_map_gives_zero_sides() {
        let g = h1();
        let u = MapSpec::parse(g, "const").unwrap();
        let bx = Region::boxed(&g, Pt(vec![0.0; 3]), vec![0.5, 0.5, 0.125]).unwrap();
        let r = coarea_check(&u, &bx, 2.0, &PackingParams::default(), 0.125, 16).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.holds);
    }

    #[test]
    fn single_ball_reduces_to_monotonicity() {
        let g = h1();
        let u = MapSpec::parse(g, "coord:x").unwrap();
        let point = Region::horizontal_segment(&g, Pt(vec![0.1, 0.2, 0.3]), vec![1.0, 0.0], 0.0).unwrap();
        let r = coarea_check(&u, &point, 3.0, &PackingParams::default(), 0.25, 16).unwrap();
        assert_eq!(r.witnesses["balls"], 1.0);
        assert!(r.holds && r.rhs >= r.lhs && r.lhs > 0.0, "{r:?}");
    }

    #[test]
    fn distance_map_on_a_box() {
        let g = h1();
        let u = MapSpec::parse(g, "dist:0/0:quotient-yz").unwrap();
        let bx = Region::boxed(&g, Pt(vec![0.0; 3]), vec![0.5, 0.5, 0.125]).unwrap();
        let r = coarea_check(&u, &bx, 2.0, &PackingParams { n_colors: 7, ell: 1.0, seed: 0 }, 0.125, 16).unwrap();
        assert!(r.holds, "{r:?}");
    }
}
