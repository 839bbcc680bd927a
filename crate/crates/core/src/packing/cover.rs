use serde::{Deserialize, Serialize};

use super::ball::Ball;
use crate::carnot::{GroupSpec, Pt, Region};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Balls covering a curve-like region at a given mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cover<T> {
    pub balls: Vec<Ball<T>>,
    pub mesh: T,
}

impl<T: Real> Cover<T> {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Every point lies in at least one ball.
    pub fn covers(&self, g: &GroupSpec, points: &[Pt<T>]) -> bool {
        let slack = T::one() + T::lit(1e-9);
        points.iter().all(|p| self.balls.iter().any(|b| g.distance(&b.center, p) <= b.radius * slack))
    }
}

/// Covers a segment by balls of radius `eps / 2` at equispaced parameters.
///
/// A ball of radius `eps/2` centered on the curve contains the parameter
/// interval of half-length `reach(eps/2)`; centers are spaced at most twice
/// that apart, with both endpoints used.
pub fn build_cover<T: Real>(g: &GroupSpec, curve: &Region<T>, eps: T) -> Result<Cover<T>> {
    if !(eps > T::zero()) {
        return Err(Error::InvalidParameter { name: "epsilon", reason: format!("must be positive, got {eps}") });
    }
    let length = curve.curve_length()?;
    let radius = eps / T::lit(2.0);
    let spacing = curve.curve_reach(g, radius)? * T::lit(2.0);
    let gaps = if length > T::zero() {
        ((length / spacing).as_f64() - 1e-9).ceil().max(1.0) as usize
    } else {
        0
    };
    let balls = (0..=gaps)
        .map(|j| {
            let t = if gaps == 0 { T::zero() } else { length * T::from_usize_lossy(j) / T::from_usize_lossy(gaps) };
            curve.curve_point(g, t).map(|c| Ball::new(c, radius))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Cover { balls, mesh: eps })
}
