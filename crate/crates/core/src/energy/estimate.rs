use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::image::ImageMeasurer;
use super::map::MapSpec;
use crate::carnot::Region;
use crate::error::{Error, Result};
use crate::measures::{loglog_fit, scaling_sweep, BallGauge, LogLogFit, PackingParams, ScalingReport, Sweep};
use crate::packing::{build_greedy_packing, BallFunction};

/// Default rasterization resolution (samples per ball diameter per axis).
pub const DEFAULT_RESOLUTION: usize = 32;

/// Per-scale values of `PE^{p; eps}` with the fitted exponent.
pub type EnergyReport = ScalingReport;

/// Crossing of the fitted energy exponent through zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyDimensionReport {
    pub map: String,
    pub region: String,
    pub params: PackingParams,
    pub p_grid: Vec<f64>,
    pub exponents: Vec<f64>,
    pub fits: Vec<LogLogFit>,
    pub crossing: f64,
}

fn measurer(u: &MapSpec, resolution: usize) -> Result<Arc<ImageMeasurer>> {
    Ok(Arc::new(ImageMeasurer::new(u.clone(), resolution)?))
}

/// `sum e_u(B_i)^p` over greedy packings with `phi = e_u` across the sweep.
pub fn energy_estimate(
    u: &MapSpec,
    region: &Region<f64>,
    p: f64,
    params: &PackingParams,
    sweep: &Sweep,
    resolution: usize,
) -> Result<EnergyReport> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter { name: "p", reason: format!("must be positive, got {p}") });
    }
    let gauge = BallGauge::Image(measurer(u, resolution)?);
    scaling_sweep(&u.source, region, &gauge, p, sweep, params)
}

/// Fitted energy exponent for each `p` and its interpolated zero crossing.
///
/// The greedy family does not depend on `p` (insertion is by decreasing
/// `e_u`), so packings are built once per scale and every `p` reuses them.
pub fn energy_dimension_probe(
    u: &MapSpec,
    region: &Region<f64>,
    p_grid: &[f64],
    params: &PackingParams,
    sweep: &Sweep,
    resolution: usize,
) -> Result<EnergyDimensionReport> {
    if p_grid.len() < 2 || p_grid.iter().any(|p| !(*p > 0.0)) {
        return Err(Error::InvalidParameter { name: "p_grid", reason: "needs two positive exponents".into() });
    }
    let mut grid = p_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let m = measurer(u, resolution)?;
    let g = u.source;
    let per_scale: Vec<Vec<f64>> = sweep
        .0
        .par_iter()
        .map(|&eps| {
            let gp = build_greedy_packing(&g, region, m.as_ref(), 1.0, eps, params.n_colors, params.ell, params.seed)?;
            Ok(gp.family.balls.iter().map(|b| BallFunction::<f64>::eval(m.as_ref(), &g, b)).collect())
        })
        .collect::<Result<_>>()?;
    if per_scale.iter().flatten().all(|&v| v <= 0.0) {
        return Err(Error::ConstantMap);
    }
    let mut fits = Vec::with_capacity(grid.len());
    for &p in &grid {
        let values: Vec<f64> = per_scale.iter().map(|vs| vs.iter().map(|v| v.powf(p)).sum()).collect();
        fits.push(loglog_fit(&sweep.0, &values)?);
    }
    let exponents: Vec<f64> = fits.iter().map(|f| f.slope).collect();
    let crossing = zero_crossing(&grid, &exponents).ok_or(Error::OutOfRange)?;
    Ok(EnergyDimensionReport {
        map: u.label.clone(),
        region: region.tag().into(),
        params: *params,
        p_grid: grid,
        exponents,
        fits,
        crossing,
    })
}

/// First sign change of `ys` over `xs`, linearly interpolated.
pub fn zero_crossing(xs: &[f64], ys: &[f64]) -> Option<f64> {
    for k in 0..xs.len().saturating_sub(1) {
        let (y0, y1) = (ys[k], ys[k + 1]);
        if y0 == 0.0 {
            return Some(xs[k]);
        }
        if y0 * y1 < 0.0 || y1 == 0.0 {
            return Some(xs[k] + (xs[k + 1] - xs[k]) * y0 / (y0 - y1));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carnot::{GroupSpec, Pt};

    #[test]
    fn interpolated_crossing() {
        assert_eq!(zero_crossing(&[1.0, 2.0, 3.0], &[-2.0, -1.0, 1.0]), Some(2.5));
        assert_eq!(zero_crossing(&[1.0, 2.0], &[1.0, 2.0]), None);
    }

    #[test]
    fn constant_map_is_rejected() {
        let g = GroupSpec::euclidean(2).unwrap();
        let u = MapSpec::parse(g, "const").unwrap();
        let sq = Region::boxed(&g, Pt(vec![0.0; 2]), vec![1.0, 1.0]).unwrap();
        let r = energy_dimension_probe(&u, &sq, &[1.0, 2.0, 3.0], &PackingParams::default(), &Sweep::dyadic(2, 4), 16);
        assert_eq!(r.unwrap_err(), Error::ConstantMap);
    }

    #[test]
    fn euclidean_coordinate_crosses_at_two() {
        let g = GroupSpec::euclidean(2).unwrap();
        let u = MapSpec::parse(g, "coord:x").unwrap();
        let sq = Region::boxed(&g, Pt(vec![0.0; 2]), vec![1.0, 1.0]).unwrap();
        let params = PackingParams { n_colors: 4, ell: 1.0, seed: 0 };
        let r = energy_dimension_probe(&u, &sq, &[1.5, 2.0, 2.5], &params, &Sweep::dyadic(2, 6), 16).unwrap();
        assert!((r.crossing - 2.0).abs() < 0.1, "{r:?}");
    }
}
