use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::carnot::{GroupSpec, Pt, Region};
use crate::error::{Error, Result};
use crate::measures::PackingParams;
use crate::packing::{build_greedy_packing, verify_packing, Ball, PackingFamily, RadiusFn};

/// Quasisymmetric self-maps used to transport packings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QsMap {
    /// `delta_lambda`.
    Dilation { lambda: f64 },
    /// Left translation `x -> a x`.
    Translation { by: Vec<f64> },
    /// `x -> x |x|^(s-1)` on Euclidean space.
    RadialPower { s: f64 },
}

impl QsMap {
    pub fn check(&self, g: &GroupSpec) -> Result<()> {
        match self {
            QsMap::Dilation { lambda } if !(*lambda > 0.0) => {
                Err(Error::InvalidParameter { name: "lambda", reason: format!("must be positive, got {lambda}") })
            }
            QsMap::Translation { by } => g.check_dim(by),
            QsMap::RadialPower { s } if !(*s > 0.0) => {
                Err(Error::InvalidParameter { name: "s", reason: format!("must be positive, got {s}") })
            }
            QsMap::RadialPower { .. } if !g.is_abelian() => {
                Err(Error::Unsupported("radial power maps need a Euclidean group".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn apply(&self, g: &GroupSpec, x: &[f64]) -> Pt<f64> {
        match self {
            QsMap::Dilation { lambda } => g.dilate(*lambda, x),
            QsMap::Translation { by } => g.product(by, x),
            QsMap::RadialPower { s } => {
                let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
                let k = if norm > 0.0 { norm.powf(s - 1.0) } else { 0.0 };
                Pt(x.iter().map(|a| a * k).collect())
            }
        }
    }

    /// Factor by which distances scale, for similarities.
    pub fn similarity_factor(&self) -> Option<f64> {
        match self {
            QsMap::Dilation { lambda } => Some(*lambda),
            QsMap::Translation { .. } => Some(1.0),
            QsMap::RadialPower { s } if *s == 1.0 => Some(1.0),
            QsMap::RadialPower { .. } => None,
        }
    }

    /// Radius of the smallest ball at `f(c)` containing `f(B(c, r))`.
    pub fn image_radius(&self, g: &GroupSpec, b: &Ball<f64>) -> f64 {
        if let Some(k) = self.similarity_factor() {
            return k * b.radius;
        }
        // A homeomorphism of the plane maps the boundary circle onto the
        // boundary of the image, so the farthest point lies on it.
        let fc = self.apply(g, &b.center);
        let far = |theta: f64| {
            let mut y = b.center.0.clone();
            y[0] += b.radius * theta.cos();
            y[1] += b.radius * theta.sin();
            g.distance(&fc, &self.apply(g, &y))
        };
        let steps = 720;
        let h = std::f64::consts::TAU / steps as f64;
        let k = (0..steps).max_by(|&a, &b| far(a as f64 * h).total_cmp(&far(b as f64 * h))).unwrap_or(0);
        let (mut lo, mut hi) = ((k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let (a, z) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
            if far(a) > far(z) {
                hi = z;
            } else {
                lo = a;
            }
        }
        far(0.5 * (lo + hi)).max(far(k as f64 * h))
    }
}

/// A monotone control function `eta`, tabulated on increasing `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eta {
    pub ts: Vec<f64>,
    pub values: Vec<f64>,
    /// `None` when tabulated; `Some(k)` for `eta(t) = k t`.
    pub linear: Option<f64>,
}

impl Eta {
    pub fn linear(k: f64) -> Self {
        Eta { ts: Vec::new(), values: Vec::new(), linear: Some(k) }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if let Some(k) = self.linear {
            return k * t;
        }
        let i = self.ts.partition_point(|&s| s < t);
        self.values.get(i).copied().unwrap_or(f64::INFINITY)
    }

    /// The largest tabulated `t` with `eta(t) <= v`.
    pub fn inverse(&self, v: f64) -> Result<f64> {
        if let Some(k) = self.linear {
            return Ok(v / k);
        }
        self.ts
            .iter()
            .zip(&self.values)
            .filter(|(_, &e)| e <= v)
            .map(|(&t, _)| t)
            .last()
            .ok_or_else(|| Error::InvalidParameter { name: "eta", reason: format!("no tabulated t with eta(t) <= {v}") })
    }
}

/// Empirical `eta` for `f` from `triples` random triples near the box
/// `[corner, corner + sides]`: the running maximum of
/// `|f x - f y| / |f x - f z|` over triples with `|x - y| / |x - z| <= t`,
/// inflated by `1 + margin`.
pub fn empirical_eta(
    f: &QsMap,
    g: &GroupSpec,
    corner: &[f64],
    sides: &[f64],
    triples: usize,
    margin: f64,
    seed: u64,
) -> Result<Eta> {
    f.check(g)?;
    if f.similarity_factor().is_some() {
        return Ok(Eta::linear(1.0));
    }
    let n = g.n();
    let bins = 64;
    let (t_lo, t_hi) = (1e-3f64, 1.0f64);
    let ts: Vec<f64> = (0..bins).map(|k| t_lo * (t_hi / t_lo).powf((k + 1) as f64 / bins as f64)).collect();
    let mut worst = vec![0.0f64; bins];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let direction = |rng: &mut ChaCha8Rng| {
        let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
        v.into_iter().map(|a| a / norm).collect::<Vec<f64>>()
    };
    for _ in 0..triples {
        let x: Vec<f64> = (0..n).map(|i| corner[i] + rng.gen::<f64>() * sides[i]).collect();
        let b = 10f64.powf(rng.gen_range(-2.0..0.3));
        let a = b * 10f64.powf(rng.gen_range(-3.0..0.0));
        let (u, v) = (direction(&mut rng), direction(&mut rng));
        let y: Vec<f64> = x.iter().zip(&u).map(|(p, d)| p + a * d).collect();
        let z: Vec<f64> = x.iter().zip(&v).map(|(p, d)| p + b * d).collect();
        let t = g.distance(&x, &y) / g.distance(&x, &z);
        let fx = f.apply(g, &x);
        let ratio = g.distance(&fx, &f.apply(g, &y)) / g.distance(&fx, &f.apply(g, &z));
        let k = ts.partition_point(|&s| s < t);
        if k < bins {
            worst[k] = worst[k].max(ratio);
        }
    }
    let mut running = 0.0f64;
    let values = worst
        .into_iter()
        .map(|w| {
            running = running.max(w);
            running * (1.0 + margin)
        })
        .collect();
    Ok(Eta { ts, values, linear: None })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QsReport {
    pub map: QsMap,
    /// Separation of the source packing, `1 / eta^-1(1 / (3 l'))`.
    pub ell_source: f64,
    pub ell_target: f64,
    pub balls: usize,
    pub source_valid: bool,
    pub image_valid: bool,
    pub score_source: f64,
    pub score_image: f64,
    /// `lambda^p` for similarities.
    pub expected_ratio: Option<f64>,
    pub holds: bool,
}

/// Transports a greedy `(N, l)`-packing of `X` through `f` and checks that
/// the image balls `B'_i`, the smallest balls at `f(c_i)` containing
/// `f(B_i)`, form an `(N, l')`-packing of `f(X)`. For similarities the
/// radius scores must agree up to `lambda^p` to `1e-9`.
pub fn qs_transport(
    f: &QsMap,
    eta: &Eta,
    g: &GroupSpec,
    region: &Region<f64>,
    ell_target: f64,
    p: f64,
    params: &PackingParams,
    eps: f64,
) -> Result<QsReport> {
    f.check(g)?;
    let t0 = eta.inverse(1.0 / (3.0 * ell_target))?;
    if !(t0 > 0.0) {
        return Err(Error::InvalidParameter { name: "eta", reason: "eta^-1 vanished".into() });
    }
    let ell_source = (1.0 / t0).max(1.0);
    let gp = build_greedy_packing(g, region, &RadiusFn, p, eps, params.n_colors, ell_source, params.seed)?;
    let source_valid = verify_packing(&gp.family).valid;
    let image: Vec<Ball<f64>> =
        gp.family.balls.iter().map(|b| Ball::new(f.apply(g, &b.center), f.image_radius(g, b))).collect();
    let mesh = 2.0 * image.iter().map(|b| b.radius).fold(0.0, f64::max);
    let fam = PackingFamily {
        group: *g,
        balls: image,
        colors: gp.family.colors.clone(),
        n_colors: params.n_colors,
        ell: ell_target,
        mesh,
    };
    let image_valid = verify_packing(&fam).valid;
    let score_source = gp.family.radius_score(p);
    let score_image = fam.radius_score(p);
    let expected_ratio = f.similarity_factor().map(|k| k.powf(p));
    let exact = expected_ratio
        .map_or(true, |k| (score_image - k * score_source).abs() <= 1e-9 * (k * score_source).max(f64::MIN_POSITIVE));
    Ok(QsReport {
        map: f.clone(),
        ell_source,
        ell_target,
        balls: fam.balls.len(),
        source_valid,
        image_valid,
        score_source,
        score_image,
        expected_ratio,
        holds: source_valid && image_valid && exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn similarities_use_triple_separation() {
        let g = GroupSpec::heisenberg(1).unwrap();
        let bx = Region::boxed(&g, Pt(vec![0.0; 3]), vec![1.0, 1.0, 0.25]).unwrap();
        let params = PackingParams { n_colors: 1, ell: 1.0, seed: 0 };
        for f in [QsMap::Dilation { lambda: 2.5 }, QsMap::Translation { by: vec![0.3, -1.0, 2.0] }] {
            let eta = empirical_eta(&f, &g, &[0.0; 3], &[1.0; 3], 100, 0.1, 0).unwrap();
            let r = qs_transport(&f, &eta, &g, &bx, 1.0, 2.0, &params, 0.125).unwrap();
            assert_eq!(r.ell_source, 3.0);
            assert!(r.holds, "{r:?}");
        }
    }

    #[test]
    fn dilation_images_are_dilated_balls() {
        let g = GroupSpec::heisenberg(1).unwrap();
        let f = QsMap::Dilation { lambda: 2.0 };
        let b = Ball::new(Pt(vec![0.2, 0.1, -0.3]), 0.25);
        let fc = f.apply(&g, &b.center);
        for d in crate::packing::unit_sphere_directions::<f64>(&g, 6) {
            let y = g.product(&b.center, &g.dilate(b.radius, &d));
            assert!((g.distance(&fc, &f.apply(&g, &y)) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn radial_power_image_radius() {
        let g = GroupSpec::euclidean(2).unwrap();
        let f = QsMap::RadialPower { s: 2.0 };
        // f(c + r e) - f(c) is largest along the ray through c.
        let b = Ball::new(Pt(vec![1.5, 0.0]), 0.25);
        assert!((f.image_radius(&g, &b) - (1.75f64.powi(2) - 2.25)).abs() < 1e-9);
    }

    #[test]
    fn eta_inverse_is_conservative() {
        let eta = Eta { ts: vec![0.1, 0.2, 0.4], values: vec![0.05, 0.3, 0.5], linear: None };
        assert_eq!(eta.inverse(0.31).unwrap(), 0.2);
        assert!(eta.inverse(0.01).is_err());
        assert_eq!(eta.eval(0.15), 0.3);
    }
}
