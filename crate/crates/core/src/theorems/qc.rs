use serde::{Deserialize, Serialize};

use crate::carnot::Pt;
use crate::energy::{ImageMeasurer, MapKind, MapSpec};
use crate::error::{Error, Result};
use crate::packing::Ball;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QcReport {
    pub map: String,
    pub lambdas: Vec<f64>,
    /// Smallest `eta(lambda)` that works for every sampled ball.
    pub eta: Vec<f64>,
    pub balls: usize,
    pub finite: bool,
    pub monotone: bool,
    pub holds: bool,
}

/// Empirical quasiconformal-submersion profile of a real-valued `u`: for
/// each ball `B` the image `u(B)` is an interval, `B'` is that interval, and
/// `eta(lambda)` is the least factor with `u(lambda B) ⊆ eta(lambda) B'`.
pub fn qc_submersion_check(u: &MapSpec, balls: &[Ball<f64>], lambdas: &[f64], resolution: usize) -> Result<QcReport> {
    if !u.is_real_valued() {
        return Err(Error::Unsupported("quasiconformal profiles are computed for real-valued maps".into()));
    }
    if matches!(u.kind, MapKind::Constant { .. }) {
        return Err(Error::ConstantMap);
    }
    if lambdas.iter().any(|&l| !(l >= 1.0)) {
        return Err(Error::InvalidParameter { name: "lambda", reason: "all factors must be >= 1".into() });
    }
    let measurer = ImageMeasurer::new(u.clone(), resolution)?;
    let interval = |c: &Pt<f64>, r: f64| {
        let vals: Vec<f64> = measurer.ball_samples(c, r).iter().map(|x| u.eval(x)[0]).collect();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let mut eta = vec![0.0f64; lambdas.len()];
    for b in balls {
        let (lo, hi) = interval(&b.center, b.radius);
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (k, &l) in lambdas.iter().enumerate() {
            let (a, z) = interval(&b.center, l * b.radius);
            let reach = (mid - a).max(z - mid);
            eta[k] = eta[k].max(if half > 0.0 { reach / half } else { f64::INFINITY });
        }
    }
    let finite = eta.iter().all(|e| e.is_finite());
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&a, &b| lambdas[a].total_cmp(&lambdas[b]));
    let monotone = order.windows(2).all(|w| eta[w[0]] <= eta[w[1]] * (1.0 + 1e-9));
    Ok(QcReport {
        map: u.to_string(),
        lambdas: lambdas.to_vec(),
        eta,
        balls: balls.len(),
        finite,
        monotone,
        holds: finite && monotone,
    })
}
