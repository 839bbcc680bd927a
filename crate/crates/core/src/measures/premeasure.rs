use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{loglog_fit, LogLogFit, Sweep};
use crate::carnot::{GroupSpec, Region};
use crate::energy::ImageMeasurer;
use crate::error::{Error, Result};
use crate::packing::{build_cover, build_greedy_packing, Ball, BallFunction, GreedyPacking};
use crate::scalar::Real;

/// The ball function `phi` of a pre-measure.
#[derive(Clone, Debug)]
pub enum BallGauge {
    /// `phi(B) = radius(B)`.
    Radius,
    /// `phi(B) = c radius(B)`; `c = 0` gives the zero function.
    ScaledRadius(f64),
    /// `phi(B) = e_u(B)`, the measure of the image of `B` under a map.
    Image(Arc<ImageMeasurer>),
}

impl BallGauge {
    pub fn label(&self) -> String {
        match self {
            BallGauge::Radius => "radius".into(),
            BallGauge::ScaledRadius(c) => format!("radius*{c}"),
            BallGauge::Image(m) => format!("image:{}", m.map()),
        }
    }
}

impl<T: Real> BallFunction<T> for BallGauge {
    fn eval(&self, g: &GroupSpec, b: &Ball<T>) -> T {
        match self {
            BallGauge::Radius => b.radius,
            BallGauge::ScaledRadius(c) => T::lit(*c) * b.radius,
            BallGauge::Image(m) => <ImageMeasurer as BallFunction<T>>::eval(m, g, b),
        }
    }

    fn radius_only(&self) -> bool {
        match self {
            BallGauge::Radius | BallGauge::ScaledRadius(_) => true,
            BallGauge::Image(m) => <ImageMeasurer as BallFunction<T>>::radius_only(m),
        }
    }
}

/// Packing family parameters shared by every scale of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingParams {
    pub n_colors: usize,
    pub ell: f64,
    pub seed: u64,
}

impl Default for PackingParams {
    fn default() -> Self {
        PackingParams { n_colors: 1, ell: 1.0, seed: 0 }
    }
}

/// One scale of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalePoint {
    pub epsilon: f64,
    pub value: f64,
    pub balls: usize,
    pub candidates: usize,
}

/// Values of `sum phi(B)^p` over a mesh sweep and their log-log fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub group: String,
    pub region: String,
    pub gauge: String,
    pub p: f64,
    pub params: PackingParams,
    pub points: Vec<ScalePoint>,
    pub fit: LogLogFit,
    /// `p - slope` for dimension sweeps.
    pub dimension: Option<f64>,
    pub reliable: bool,
}

impl ScalingReport {
    pub fn fitted_exponent(&self) -> f64 {
        self.fit.slope
    }
}

/// Greedy lower estimate of the packing pre-measure at one scale.
pub fn packing_premeasure_est<T: Real, F: BallFunction<T> + ?Sized>(
    g: &GroupSpec,
    region: &Region<T>,
    phi: &F,
    p: T,
    eps: T,
    params: &PackingParams,
) -> Result<GreedyPacking<T>> {
    build_greedy_packing(g, region, phi, p, eps, params.n_colors, T::lit(params.ell), params.seed)
}

/// `sum phi(B)^p` over the equispaced cover of a curve at mesh `eps`: an
/// upper estimate for the covering measure.
pub fn covering_value<T: Real, F: BallFunction<T> + ?Sized>(
    g: &GroupSpec,
    curve: &Region<T>,
    phi: &F,
    p: T,
    eps: T,
) -> Result<T> {
    let cover = build_cover(g, curve, eps)?;
    Ok(cover.balls.iter().map(|b| phi.eval(g, b).powf(p)).sum())
}

/// Evaluates the greedy estimate at every scale (in parallel) and fits
/// `ln value` against `ln eps`.
pub fn scaling_sweep<T: Real>(
    g: &GroupSpec,
    region: &Region<T>,
    gauge: &BallGauge,
    p: f64,
    sweep: &Sweep,
    params: &PackingParams,
) -> Result<ScalingReport> {
    if sweep.len() < 2 {
        return Err(Error::InvalidParameter { name: "sweep", reason: "needs at least two scales".into() });
    }
    let points = sweep
        .0
        .par_iter()
        .map(|&eps| {
            let gp = packing_premeasure_est(g, region, gauge, T::lit(p), T::lit(eps), params)?;
            Ok(ScalePoint { epsilon: eps, value: gp.score.as_f64(), balls: gp.family.len(), candidates: gp.candidates })
        })
        .collect::<Result<Vec<_>>>()?;
    if points.iter().any(|pt| !pt.value.is_finite()) {
        return Err(Error::Domain("non-finite ball function value".into()));
    }
    let xs: Vec<f64> = points.iter().map(|pt| pt.epsilon).collect();
    let ys: Vec<f64> = points.iter().map(|pt| pt.value).collect();
    let fit = loglog_fit(&xs, &ys)?;
    Ok(ScalingReport {
        group: g.name(),
        region: region.tag().into(),
        gauge: gauge.label(),
        p,
        params: *params,
        points,
        fit,
        dimension: None,
        reliable: fit.reliable(),
    })
}

/// Packing dimension of `region` from the radius gauge: the values scale as
/// `eps^(p - dim)`, so `dim = p - slope` whatever `p_probe` is.
pub fn dimension_estimate<T: Real>(
    g: &GroupSpec,
    region: &Region<T>,
    params: &PackingParams,
    sweep: &Sweep,
    p_probe: f64,
) -> Result<ScalingReport> {
    let mut report = scaling_sweep(g, region, &BallGauge::Radius, p_probe, sweep, params)?;
    report.dimension = Some(p_probe - report.fit.slope);
    // Near p_probe = dim the values are flat and their r2 is meaningless;
    // judge the power law on the ball counts, which have the same residuals.
    let xs: Vec<f64> = report.points.iter().map(|pt| pt.epsilon).collect();
    let counts: Vec<f64> = report.points.iter().map(|pt| pt.balls as f64).collect();
    report.reliable = loglog_fit(&xs, &counts).map(|f| f.reliable()).unwrap_or(false);
    Ok(report)
}
