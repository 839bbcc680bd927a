use serde::{Deserialize, Serialize};

use super::grid::SpatialIndex;
use super::greedy::CONSTRUCTION_MARGIN;
use crate::carnot::GroupSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingReport {
    /// Largest number of balls `B(x_i, ell eps)` sharing a probe point.
    pub multiplicity: usize,
    pub centers: usize,
    pub probes: usize,
}

/// Empirical multiplicity bound `N(ell)` for covering `(N, ell)`-packings.
///
/// Builds a maximal family of disjoint `eps/2`-balls on a lattice anchored at
/// the identity (candidates visited by increasing gauge), so the doubled balls
/// `B(x_i, eps)` cover; then counts, over lattice probes of gauge at most
/// `eps/2`, how many enlarged balls `B(x_i, ell eps)` contain the probe.
/// Because candidates are processed outward from the identity, the family
/// near the probes does not depend on `ell`, and the result is nondecreasing
/// in `ell`.
pub fn doubling_probe<T: Real>(g: &GroupSpec, ell: T, eps: T) -> Result<DoublingReport> {
    if !(ell >= T::one()) {
        return Err(Error::InvalidParameter { name: "ell", reason: format!("must be >= 1, got {ell}") });
    }
    if !(eps > T::zero()) {
        return Err(Error::InvalidParameter { name: "epsilon", reason: format!("must be positive, got {eps}") });
    }
    let n = g.n();
    let probe_radius = eps / T::lit(2.0);
    let reach = ell * eps + probe_radius;
    let h = eps / T::lit(4.0);
    let steps: Vec<T> = (0..n).map(|i| (h / g.axis_gauge::<T>(i)).powi(g.weight(i) as i32)).collect();
    let mut half = vec![T::zero(); n];
    g.neighbor_window(&vec![T::zero(); n], reach, &mut half);
    let counts: Vec<i64> = (0..n).map(|i| (half[i] / steps[i]).ceil().to_i64().unwrap_or(0) + 1).collect();
    let total: i64 = counts.iter().map(|c| 2 * c + 1).product();
    if total > 50_000_000 {
        return Err(Error::InvalidParameter { name: "ell", reason: format!("probe lattice of {total} points") });
    }
    let mut lattice: Vec<(T, Vec<T>)> = Vec::new();
    let mut k: Vec<i64> = counts.iter().map(|c| -c).collect();
    'outer: loop {
        let p: Vec<T> = k.iter().zip(&steps).map(|(&i, &s)| T::lit(i as f64) * s).collect();
        let gp = g.gauge(&p);
        if gp <= reach {
            lattice.push((gp, p));
        }
        let mut d = n;
        loop {
            if d == 0 {
                break 'outer;
            }
            d -= 1;
            k[d] += 1;
            if k[d] <= counts[d] {
                break;
            }
            k[d] = -counts[d];
        }
    }
    lattice.sort_by(|a, b| {
        a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then_with(|| {
            a.1.iter()
                .zip(&b.1)
                .map(|(x, y)| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let sep = eps * (T::one() + T::lit(CONSTRUCTION_MARGIN));
    let big = (ell * eps).max(sep);
    let mut index = SpatialIndex::new(*g, big);
    for (_, p) in &lattice {
        let mut clash = false;
        index.for_each_within(p, sep, |_, _| clash = true);
        if !clash {
            index.insert(p);
        }
    }
    let mut best = 0;
    let mut probes = 0;
    for (gp, p) in lattice.iter().take_while(|(gp, _)| *gp <= probe_radius) {
        let _ = gp;
        probes += 1;
        let mut count = 0;
        index.for_each_within(p, ell * eps, |_, _| count += 1);
        best = best.max(count);
    }
    Ok(DoublingReport { multiplicity: best, centers: index.len(), probes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_and_plane_bounds() {
        let r1 = GroupSpec::euclidean(1).unwrap();
        let n1 = doubling_probe(&r1, 1.0, 1.0).unwrap().multiplicity;
        assert!((1..=3).contains(&n1), "{n1}");
        let r2 = GroupSpec::euclidean(2).unwrap();
        let n2 = doubling_probe(&r2, 1.0, 1.0).unwrap().multiplicity;
        assert!((1..=7).contains(&n2), "{n2}");
    }

    #[test]
    fn heisenberg_monotone_in_ell() {
        let g = GroupSpec::heisenberg(1).unwrap();
        let ns: Vec<usize> = [1.0, 1.5, 2.0].iter().map(|&l| doubling_probe(&g, l, 1.0).unwrap().multiplicity).collect();
        assert!(ns.windows(2).all(|w| w[0] <= w[1]), "{ns:?}");
        assert!(ns[0] >= 1);
    }

    #[test]
    fn scale_invariant() {
        let g = GroupSpec::heisenberg(1).unwrap();
        let a = doubling_probe(&g, 2.0, 1.0).unwrap();
        let b = doubling_probe(&g, 2.0, 0.125).unwrap();
        assert_eq!(a.multiplicity, b.multiplicity);
    }
}
