use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values below this are treated as zero and dropped from log-log fits.
pub const VALUE_FLOOR: f64 = 1e-14;
/// Fits with `r2` below this are flagged unreliable.
pub const R2_THRESHOLD: f64 = 0.9;

/// Ordinary least squares on `(ln x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub used: usize,
}

impl LogLogFit {
    pub fn reliable(&self) -> bool {
        self.r2 >= R2_THRESHOLD
    }
}

pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y >= VALUE_FLOOR && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Domain(format!("log-log fit needs two positive values, got {}", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("log-log fit needs two distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy <= 1e-24 * (1.0 + my * my) { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(LogLogFit { slope, intercept: my - slope * mx, r2, used: pts.len() })
}

/// Mesh scales for a sweep, strictly decreasing and positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sweep(pub Vec<f64>);

impl Sweep {
    pub fn new(mut eps: Vec<f64>) -> Result<Self> {
        if eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return Err(Error::InvalidParameter { name: "sweep", reason: "scales must be positive".into() });
        }
        eps.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        eps.dedup();
        Ok(Sweep(eps))
    }

    /// `2^-from, ..., 2^-to`.
    pub fn dyadic(from: i32, to: i32) -> Self {
        Sweep((from..=to).map(|k| 2f64.powi(-k)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep::dyadic(2, 7)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let xs = [0.5, 0.25, 0.125, 0.0625];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        let f = loglog_fit(&xs, &ys).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn drops_zero_values() {
        let f = loglog_fit(&[1.0, 0.5, 0.25], &[0.0, 2.0, 4.0]).unwrap();
        assert_eq!(f.used, 2);
        assert!(loglog_fit(&[1.0, 0.5], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn sweep_is_sorted() {
        let s = Sweep::new(vec![0.125, 0.5, 0.25, 0.5]).unwrap();
        assert_eq!(s.0, vec![0.5, 0.25, 0.125]);
        assert_eq!(Sweep::default().len(), 6);
        assert!(Sweep::new(vec![0.0]).is_err());
    }
}
