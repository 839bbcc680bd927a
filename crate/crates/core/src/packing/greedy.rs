use serde::{Deserialize, Serialize};

use super::ball::Ball;
use super::family::PackingFamily;
use super::grid::SpatialIndex;
use crate::carnot::{GroupSpec, Pt, Region};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A nonnegative function on balls (`phi` in packing pre-measures).
pub trait BallFunction<T>: Sync {
    fn eval(&self, g: &GroupSpec, b: &Ball<T>) -> T;

    /// True when the value depends on the radius only (left-invariant gauges);
    /// lets callers evaluate once per radius.
    fn radius_only(&self) -> bool {
        false
    }
}

/// `phi(B) = radius(B)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct RadiusFn;

impl<T: Real> BallFunction<T> for RadiusFn {
    fn eval(&self, _g: &GroupSpec, b: &Ball<T>) -> T {
        b.radius
    }
    fn radius_only(&self) -> bool {
        true
    }
}

/// Relative margin used by construction so that produced families pass the
/// exact `d > ell (r_i + r_j)` test robustly.
pub const CONSTRUCTION_MARGIN: f64 = 1e-9;

/// Metric spacing of the candidate lattice for mesh `eps` and dilation `ell`:
/// half the same-color separation `ell * eps`.
pub fn candidate_step<T: Real>(eps: T, ell: T) -> T {
    ell * eps / T::lit(2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyPacking<T> {
    pub family: PackingFamily<T>,
    /// `sum phi(B_i)^p` over the family.
    pub score: T,
    pub candidates: usize,
}

fn validate(eps: f64, n_colors: usize, ell: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter { name: "epsilon", reason: format!("must be positive, got {eps}") });
    }
    if n_colors == 0 {
        return Err(Error::InvalidParameter { name: "N", reason: "must be at least 1".into() });
    }
    if !(ell >= 1.0) || !ell.is_finite() {
        return Err(Error::InvalidParameter { name: "ell", reason: format!("must be >= 1, got {ell}") });
    }
    Ok(())
}

/// First-fit coloring of equal-radius balls over a candidate pool.
///
/// Candidates are visited by decreasing `scores` (when given), then
/// lexicographically by coordinates, then by index; each goes to the first
/// color class where its `ell`-dilate is disjoint from the class, or is
/// dropped when all `n_colors` classes conflict.
pub fn greedy_pack_candidates<T: Real>(
    g: &GroupSpec,
    candidates: &[Pt<T>],
    radius: T,
    scores: Option<&[T]>,
    n_colors: usize,
    ell: T,
) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        let by_score = match scores {
            Some(s) => s[b].partial_cmp(&s[a]).unwrap_or(std::cmp::Ordering::Equal),
            None => std::cmp::Ordering::Equal,
        };
        by_score
            .then_with(|| {
                candidates[a]
                    .iter()
                    .zip(candidates[b].iter())
                    .map(|(x, y)| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .then(a.cmp(&b))
    });
    let conflict = ell * (radius + radius) * (T::one() + T::lit(CONSTRUCTION_MARGIN));
    let mut index = SpatialIndex::new(*g, conflict);
    let mut chosen = Vec::new();
    let mut colors = Vec::new();
    let mut used = vec![false; n_colors];
    for &c in &order {
        used.iter_mut().for_each(|u| *u = false);
        index.for_each_within(&candidates[c], conflict, |id, _| used[colors[id]] = true);
        if let Some(color) = used.iter().position(|u| !u) {
            index.insert(&candidates[c]);
            chosen.push(c);
            colors.push(color);
        }
    }
    (chosen, colors)
}

/// Greedy `(N, ell)`-packing centered on `region`, all radii `eps / 2`.
///
/// A lower bound for the supremum defining the packing pre-measure.
#[allow(clippy::too_many_arguments)]
pub fn build_greedy_packing<T: Real, F: BallFunction<T> + ?Sized>(
    g: &GroupSpec,
    region: &Region<T>,
    phi: &F,
    p: T,
    eps: T,
    n_colors: usize,
    ell: T,
    seed: u64,
) -> Result<GreedyPacking<T>> {
    validate(eps.as_f64(), n_colors, ell.as_f64())?;
    if !(p >= T::zero()) {
        return Err(Error::InvalidParameter { name: "p", reason: format!("must be >= 0, got {p}") });
    }
    let empty = || GreedyPacking { family: PackingFamily::empty(*g, n_colors, ell, eps), score: T::zero(), candidates: 0 };
    if region.is_empty() {
        return Ok(empty());
    }
    let step = candidate_step(eps, ell);
    let candidates = region.sample(g, step, seed)?;
    if candidates.is_empty() {
        return Err(Error::ResolutionUnderflow { step: step.as_f64() });
    }
    let radius = eps / T::lit(2.0);
    let values: Vec<T> = if phi.radius_only() {
        let v = phi.eval(g, &Ball::new(candidates[0].clone(), radius));
        vec![v; candidates.len()]
    } else {
        use rayon::prelude::*;
        candidates.par_iter().map(|c| phi.eval(g, &Ball::new(c.clone(), radius))).collect()
    };
    let (chosen, colors) = greedy_pack_candidates(g, &candidates, radius, Some(&values), n_colors, ell);
    let score = chosen.iter().map(|&i| values[i].powf(p)).sum();
    let balls = chosen.iter().map(|&i| Ball::new(candidates[i].clone(), radius)).collect();
    Ok(GreedyPacking {
        family: PackingFamily { group: *g, balls, colors, n_colors, ell, mesh: eps },
        score,
        candidates: candidates.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::verify_packing;

    fn h1() -> GroupSpec {
        GroupSpec::heisenberg(1).unwrap()
    }

    #[test]
    fn horizontal_segment_score_within_bounds() {
        let g = h1();
        let seg = Region::horizontal_segment(&g, Pt(vec![0.0; 3]), vec![1.0, 0.0], 1.0).unwrap();
        let gp = build_greedy_packing(&g, &seg, &RadiusFn, 1.0, 1.0 / 16.0, 1, 1.0, 0).unwrap();
        assert!(verify_packing(&gp.family).valid);
        assert!(gp.score >= 0.25 && gp.score <= 0.5, "score {}", gp.score);
    }

    #[test]
    fn empty_region_gives_empty_family() {
        let g = h1();
        let gp = build_greedy_packing(&g, &Region::<f64>::Empty, &RadiusFn, 1.0, 0.1, 2, 1.0, 0).unwrap();
        assert!(gp.family.is_empty());
        assert_eq!(gp.score, 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = h1();
        let seg = Region::horizontal_segment(&g, Pt(vec![0.0; 3]), vec![1.0, 0.0], 1.0).unwrap();
        assert!(build_greedy_packing(&g, &seg, &RadiusFn, 1.0, 0.0, 1, 1.0, 0).is_err());
        assert!(build_greedy_packing(&g, &seg, &RadiusFn, 1.0, 0.1, 0, 1.0, 0).is_err());
        assert!(build_greedy_packing(&g, &seg, &RadiusFn, 1.0, 0.1, 1, 0.5, 0).is_err());
    }

    #[test]
    fn families_are_valid_and_centered() {
        let g = h1();
        let u = crate::carnot::HomHom::coordinate_projection(g, &[0]).unwrap();
        let regions = vec![
            Region::vertical_segment(&g, Pt(vec![0.0; 3]), 1.0).unwrap(),
            Region::kernel_patch(u, vec![0.0, 0.0], vec![0.5, 0.125]).unwrap(),
            Region::boxed(&g, Pt(vec![0.0; 3]), vec![0.5, 0.5, 0.125]).unwrap(),
        ];
        for r in &regions {
            for (n, ell) in [(1, 1.0), (3, 2.0), (8, 1.5)] {
                for seed in [0, 9] {
                    let gp = build_greedy_packing(&g, r, &RadiusFn, 2.0, 0.125, n, ell, seed).unwrap();
                    assert!(verify_packing(&gp.family).valid, "{} N={n} ell={ell}", r.tag());
                    assert!(gp.family.balls.iter().all(|b| r.contains(&g, &b.center)));
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let g = h1();
        let r = Region::boxed(&g, Pt(vec![0.0; 3]), vec![0.5, 0.5, 0.125]).unwrap();
        let a = build_greedy_packing(&g, &r, &RadiusFn, 2.0, 0.125, 4, 2.0, 5).unwrap();
        let b = build_greedy_packing(&g, &r, &RadiusFn, 2.0, 0.125, 4, 2.0, 5).unwrap();
        assert_eq!(a, b);
    }
}
