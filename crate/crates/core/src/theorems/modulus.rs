use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::InequalityReport;
use crate::carnot::{GroupSpec, Pt, Region};
use crate::error::{Error, Result};
use crate::measures::{covering_value, BallGauge, PackingParams};
use crate::packing::{greedy_pack_candidates, verify_packing, Ball, BallFunction, PackingFamily};

/// Parallel horizontal segments `gamma_t(s) = (0, t) . (s e_1)`, `s in [0, L]`,
/// indexed by `t` in a box of the codimension-one subgroup `{x_1 = 0}`, with
/// Lebesgue measure `d gamma = dt` and normalized length `m_gamma`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentFamily {
    pub group: GroupSpec,
    pub length: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl SegmentFamily {
    pub fn new(group: GroupSpec, length: f64, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let k = group.n() - 1;
        if k == 0 {
            return Err(Error::Unsupported("segment families need dimension at least 2".into()));
        }
        if lower.len() != k || upper.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: lower.len().min(upper.len()) });
        }
        if !(length > 0.0) || lower.iter().zip(&upper).any(|(l, u)| !(u >= l)) {
            return Err(Error::InvalidParameter { name: "family", reason: "needs L > 0 and lower <= upper".into() });
        }
        Ok(SegmentFamily { group, length, lower, upper })
    }

    pub fn transversal_dim(&self) -> usize {
        self.lower.len()
    }

    /// Total `d gamma` measure.
    pub fn measure(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).product()
    }

    pub fn base(&self, t: &[f64]) -> Pt<f64> {
        let mut p = vec![0.0];
        p.extend_from_slice(t);
        Pt(p)
    }

    pub fn segment(&self, t: &[f64]) -> Result<Region<f64>> {
        let mut dir = vec![0.0; self.group.horizontal_dim()];
        dir[0] = 1.0;
        Region::horizontal_segment(&self.group, self.base(t), dir, self.length)
    }

    pub fn contains_param(&self, t: &[f64]) -> bool {
        t.iter().zip(self.lower.iter().zip(&self.upper)).all(|(x, (l, u))| *x >= *l && *x <= *u)
    }

    /// Midpoints of a `per_axis`-per-axis grid on the parameter box, with the
    /// measure of one cell.
    pub fn param_grid(&self, per_axis: usize) -> (Vec<Vec<f64>>, f64) {
        let k = self.transversal_dim();
        let cell = self.measure() / (per_axis as f64).powi(k as i32);
        let pts = grid(k, per_axis)
            .into_iter()
            .map(|u| (0..k).map(|j| self.lower[j] + u[j] * (self.upper[j] - self.lower[j])).collect())
            .collect();
        (pts, cell)
    }

    /// An axis box containing every segment.
    pub fn hull(&self) -> Result<Region<f64>> {
        let g = &self.group;
        let n = g.n();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        let corners = 1usize << self.transversal_dim();
        for mask in 0..corners {
            let t: Vec<f64> =
                (0..self.transversal_dim()).map(|j| if mask >> j & 1 == 1 { self.upper[j] } else { self.lower[j] }).collect();
            for s in [0.0, self.length] {
                let mut step = vec![0.0; n];
                step[0] = s;
                let p = g.product(&self.base(&t), &step);
                for i in 0..n {
                    lo[i] = lo[i].min(p[i]);
                    hi[i] = hi[i].max(p[i]);
                }
            }
        }
        Region::boxed(g, Pt(lo.clone()), lo.iter().zip(&hi).map(|(l, h)| h - l).collect())
    }
}

/// Unit-cube midpoint grid in `k` dimensions.
fn grid(k: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    'outer: loop {
        out.push(idx.iter().map(|&i| (i as f64 + 0.5) / per_axis as f64).collect());
        for j in 0..k {
            idx[j] += 1;
            if idx[j] < per_axis {
                continue 'outer;
            }
            idx[j] = 0;
        }
        return out;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauReport {
    pub p: f64,
    pub ell: f64,
    /// Maximum over the sampled balls.
    pub tau: f64,
    pub per_ball: Vec<f64>,
}

/// Hypothesis integral `int_{gamma meets B} m_gamma(gamma ∩ l B)^(1-p) d gamma`
/// for each ball, by a midpoint rule with `per_axis` points per transversal
/// axis; `tau` is the maximum.
///
/// Integration runs in the ball's frame: `c^{-1} gamma_t` is the line through
/// `v` in direction `e_1`, and `t -> v` preserves Lebesgue measure. Along a
/// horizontal line the gauge distance is convex, so the chord of `l B` is an
/// interval found by golden-section search and bisection.
pub fn modulus_tau(family: &SegmentFamily, p: f64, ell: f64, balls: &[Ball<f64>], per_axis: usize) -> Result<TauReport> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter { name: "p", reason: format!("must be >= 1, got {p}") });
    }
    if !(ell > 1.0) {
        return Err(Error::InvalidParameter {
            name: "ell",
            reason: "grazing intersections diverge for ell = 1; need ell > 1".into(),
        });
    }
    let per_ball: Vec<f64> =
        balls.par_iter().map(|b| ball_integral(family, p, ell, b, per_axis)).collect::<Result<_>>()?;
    let tau = per_ball.iter().cloned().fold(0.0, f64::max);
    Ok(TauReport { p, ell, tau, per_ball })
}

fn ball_integral(family: &SegmentFamily, p: f64, ell: f64, b: &Ball<f64>, per_axis: usize) -> Result<f64> {
    let g = &family.group;
    let n = g.n();
    let r = b.radius;
    if !(r > 0.0) {
        return Err(Error::InvalidParameter { name: "radius", reason: "balls need a positive radius".into() });
    }
    let k = n - 1;
    // Lines meeting B have |v_j| <= r horizontally and |v_z| <= r^2 / 4 + r^2 / 2.
    let big = ell * r;
    let half: Vec<f64> = (1..n).map(|i| if g.weight(i) == 1 { r } else { 0.75 * r * r }).collect();
    let cell: f64 = half.iter().map(|h| 2.0 * h / per_axis as f64).product();
    let c1 = b.center[0];
    let (s_lo, s_hi) = (-c1, family.length - c1);
    let mut total = 0.0;
    for u in grid(k, per_axis) {
        let mut v = vec![0.0; n];
        for j in 0..k {
            v[j + 1] = -half[j] + 2.0 * half[j] * u[j];
        }
        // Back to the family parameter: b = c v (-c_1 e_1).
        let mut shift = vec![0.0; n];
        shift[0] = -c1;
        let base = g.product(&g.product(&b.center, &v), &shift);
        if !family.contains_param(&base[1..]) {
            continue;
        }
        let f = |s: f64| {
            let mut step = vec![0.0; n];
            step[0] = s;
            g.gauge(&g.product(&v, &step))
        };
        let (lo, hi) = (s_lo.max(-big), s_hi.min(big));
        if lo > hi {
            continue;
        }
        let s_min = golden_min(&f, lo, hi);
        if f(s_min) > r {
            continue;
        }
        let left = if f(lo) <= big { lo } else { bisect(&f, lo, s_min, big) };
        let right = if f(hi) <= big { hi } else { bisect(&f, s_min, hi, big) };
        let m = (right - left) / family.length;
        if !(m > 0.0) {
            return Err(Error::Domain("degenerate chord of a ball meeting the segment".into()));
        }
        total += m.powf(1.0 - p) * cell;
    }
    Ok(total)
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if f(c) <= f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Root of `f = level` between `inside` (f <= level) and `outside`.
fn bisect(f: &impl Fn(f64) -> f64, a: f64, b: f64, level: f64) -> f64 {
    let (mut inside, mut outside) = if f(a) <= level { (a, b) } else { (b, a) };
    for _ in 0..80 {
        let mid = 0.5 * (inside + outside);
        if f(mid) <= level {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// `phi` is Gamma-admissible at mesh `eps` when the covering value of every
/// sampled segment is at least 1.
pub fn admissibility_check(family: &SegmentFamily, phi: &BallGauge, eps: f64, per_axis: usize) -> Result<bool> {
    let (params, _) = family.param_grid(per_axis);
    for t in params {
        if covering_value(&family.group, &family.segment(&t)?, phi, 1.0, eps)? < 1.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Covering `(N, l)`-packing of a region at mesh `eps`, as in the doubling
/// remark: a maximal `eps/2`-separated subset of an `eps/4` lattice, with
/// balls of radius `eps/2` colored first-fit. Centers are `eps/2` apart and
/// conflict within `l eps`, so `N` must reach the doubling multiplicity at
/// `2 l`.
pub fn covering_packing(
    g: &GroupSpec,
    region: &Region<f64>,
    eps: f64,
    params: &PackingParams,
) -> Result<PackingFamily<f64>> {
    let lattice = region.sample(g, eps / 4.0, params.seed)?;
    let (centers, _) = greedy_pack_candidates(g, &lattice, eps / 4.0, None, 1, 1.0);
    let centers: Vec<Pt<f64>> = centers.into_iter().map(|i| lattice[i].clone()).collect();
    let (chosen, colors) = greedy_pack_candidates(g, &centers, eps / 2.0, None, params.n_colors, params.ell);
    if chosen.len() < centers.len() {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: format!("{} colors cannot color the covering packing", params.n_colors),
        });
    }
    let mut order: Vec<(usize, usize)> = chosen.into_iter().zip(colors).collect();
    order.sort_unstable();
    Ok(PackingFamily {
        group: *g,
        balls: order.iter().map(|&(i, _)| Ball::new(centers[i].clone(), eps / 2.0)).collect(),
        colors: order.iter().map(|&(_, c)| c).collect(),
        n_colors: params.n_colors,
        ell: params.ell,
        mesh: eps,
    })
}

/// `(1 / (N^(p-1) tau)) int K phi(gamma)^p d gamma <= P phi^p(X)` at mesh `eps`.
///
/// The right side is the score of a covering `(N, l)`-packing of the hull
/// of the family; the covering values come from equispaced covers of each
/// segment.
pub fn modulus_lower_bound(
    family: &SegmentFamily,
    phi: &BallGauge,
    p: f64,
    params: &PackingParams,
    eps: f64,
    tau: f64,
    per_axis: usize,
) -> Result<InequalityReport> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter { name: "tau", reason: "must be positive".into() });
    }
    let g = &family.group;
    let hull = family.hull()?;
    let cover = covering_packing(g, &hull, eps, params)?;
    let valid = verify_packing(&cover).valid;
    let rhs: f64 = cover.balls.iter().map(|b| BallFunction::<f64>::eval(phi, g, b).powf(p)).sum();
    let (params_grid, cell) = family.param_grid(per_axis);
    let integral: f64 = params_grid
        .par_iter()
        .map(|t| Ok(covering_value(g, &family.segment(t)?, phi, 1.0, eps)?.powf(p) * cell))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum();
    let lhs = integral / ((params.n_colors as f64).powf(p - 1.0) * tau);
    Ok(InequalityReport::single("modulus", eps, lhs, rhs, 0.0)
        .witness("tau", tau)
        .witness("cover_balls", cover.balls.len() as f64)
        .witness("covering_integral", integral)
        .require("covering_packing_valid", valid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_tau_matches_chord_integral() {
        // int_{-r}^{r} dt / (2 sqrt(4 r^2 - t^2)) = pi / 6 for l = 2, p = 2
        let g = GroupSpec::euclidean(2).unwrap();
        let fam = SegmentFamily::new(g, 1.0, vec![0.0], vec![1.0]).unwrap();
        let b = Ball::new(Pt(vec![0.5, 0.5]), 1.0 / 16.0);
        let t = modulus_tau(&fam, 2.0, 2.0, &[b], 4096).unwrap();
        assert!((t.tau - std::f64::consts::PI / 6.0).abs() < 2e-3, "{}", t.tau);
        assert!(t.tau <= 1.0 / 3f64.sqrt());
    }

    #[test]
    fn p_one_measures_the_meeting_set() {
        let g = GroupSpec::euclidean(2).unwrap();
        let fam = SegmentFamily::new(g, 1.0, vec![0.0], vec![1.0]).unwrap();
        let r = 1.0 / 16.0;
        let t = modulus_tau(&fam, 1.0, 2.0, &[Ball::new(Pt(vec![0.5, 0.5]), r)], 512).unwrap();
        assert!(t.tau <= 2.0 * r + 1e-9 && t.tau > 1.9 * r);
    }

    #[test]
    fn ell_one_is_rejected() {
        let g = GroupSpec::euclidean(2).unwrap();
        let fam = SegmentFamily::new(g, 1.0, vec![0.0], vec![1.0]).unwrap();
        assert!(modulus_tau(&fam, 2.0, 1.0, &[], 16).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let g = GroupSpec::euclidean(2).unwrap();
        let unit = SegmentFamily::new(g, 1.0, vec![0.0], vec![1.0]).unwrap();
        assert!(admissibility_check(&unit, &BallGauge::ScaledRadius(2.0), 1.0 / 32.0, 8).unwrap());
        assert!(!admissibility_check(&unit, &BallGauge::ScaledRadius(0.0), 1.0 / 32.0, 8).unwrap());
        let long = SegmentFamily::new(g, 4.0, vec![0.0], vec![1.0]).unwrap();
        assert!(admissibility_check(&long, &BallGauge::Radius, 1.0 / 32.0, 8).unwrap());
    }

    #[test]
    fn zero_gauge_gives_equality() {
        let g = GroupSpec::euclidean(2).unwrap();
        let fam = SegmentFamily::new(g, 1.0, vec![0.0], vec![1.0]).unwrap();
        let params = PackingParams { n_colors: 52, ell: 2.0, seed: 0 };
        let r = modulus_lower_bound(&fam, &BallGauge::ScaledRadius(0.0), 2.0, &params, 0.125, 0.6, 8).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.holds);
    }

    #[test]
    fn square_radius_gauge_holds() {
        let g = GroupSpec::euclidean(2).unwrap();
        let fam = SegmentFamily::new(g, 1.0, vec![0.0], vec![1.0]).unwrap();
        let params = PackingParams { n_colors: 52, ell: 2.0, seed: 0 };
        let r = modulus_lower_bound(&fam, &BallGauge::Radius, 2.0, &params, 1.0 / 16.0, std::f64::consts::PI / 6.0, 16)
            .unwrap();
        assert!(r.holds && r.lhs > 0.0, "{r:?}");
    }
}
