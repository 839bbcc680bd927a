use serde::{Deserialize, Serialize};

use crate::carnot::{GroupSpec, Pt};
use crate::scalar::Real;

/// A center and a radius. `scaled(l)` is the concentric ball `B(x, l r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball<T> {
    pub center: Pt<T>,
    pub radius: T,
}

impl<T: Real> Ball<T> {
    pub fn new(center: Pt<T>, radius: T) -> Self {
        debug_assert!(radius >= T::zero());
        Ball { center, radius }
    }

    pub fn scaled(&self, lambda: T) -> Self {
        Ball { center: self.center.clone(), radius: self.radius * lambda }
    }

    /// Diameter by convention: twice the radius.
    pub fn diameter(&self) -> T {
        self.radius + self.radius
    }

    pub fn contains(&self, g: &GroupSpec, p: &[T]) -> bool {
        g.distance(&self.center, p) <= self.radius
    }

    /// Sufficient test for `self ⊆ other` via the triangle inequality.
    pub fn inside(&self, g: &GroupSpec, other: &Ball<T>) -> bool {
        g.distance(&self.center, &other.center) * T::lit(g.quasi_triangle_constant()) + self.radius
            <= other.radius * (T::one() + T::lit(1e-12))
    }

    /// Deterministic samples of the ball: `center * delta_{t r}(s)` for unit
    /// gauge directions `s` and shells `t = k / shells`, `k = 1..=shells`,
    /// plus the center. The outer shell lies exactly on the boundary sphere.
    pub fn samples(&self, g: &GroupSpec, directions: &[Pt<T>], shells: usize) -> Vec<Pt<T>> {
        let mut out = Vec::with_capacity(1 + directions.len() * shells);
        out.push(self.center.clone());
        for k in 1..=shells {
            let t = self.radius * T::from_usize_lossy(k) / T::from_usize_lossy(shells);
            for s in directions {
                out.push(g.product(&self.center, &g.dilate(t, s)));
            }
        }
        out
    }
}

/// Points of gauge exactly 1, spread over the unit sphere of `g`: a lattice on
/// the cube `[-1,1]^n` projected radially along dilations.
pub fn unit_sphere_directions<T: Real>(g: &GroupSpec, per_axis: usize) -> Vec<Pt<T>> {
    let n = g.n();
    let k = per_axis.max(2);
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let v: Vec<T> = idx
            .iter()
            .map(|&i| T::lit(-1.0 + 2.0 * i as f64 / (k - 1) as f64))
            .collect();
        let on_face = idx.iter().any(|&i| i == 0 || i == k - 1);
        let gv = g.gauge(&v);
        if on_face && gv > T::zero() {
            out.push(g.dilate(T::one() / gv, &v));
        }
        let mut d = n;
        loop {
            if d == 0 {
                return out;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < k {
                break;
            }
            idx[d] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_lie_in_ball_and_reach_boundary() {
        let g = GroupSpec::heisenberg(1).unwrap();
        let dirs = unit_sphere_directions::<f64>(&g, 5);
        assert!(dirs.iter().all(|d| (g.gauge(d) - 1.0).abs() < 1e-12));
        let b = Ball::new(Pt(vec![0.3, -0.2, 0.1]), 0.25);
        let s = b.samples(&g, &dirs, 3);
        let dmax = s.iter().map(|p| g.distance(&b.center, p)).fold(0.0, f64::max);
        assert!((dmax - 0.25).abs() < 1e-12);
        assert!(s.iter().all(|p| g.distance(&b.center, p) <= 0.25 + 1e-12));
    }

    #[test]
    fn scaling_only_changes_radius() {
        let b = Ball::new(Pt(vec![1.0, 2.0]), 0.5);
        let s = b.scaled(3.0);
        assert_eq!(s.center, b.center);
        assert_eq!(s.radius, 1.5);
        assert_eq!(s.diameter(), 3.0);
    }
}
