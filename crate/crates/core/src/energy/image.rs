use std::collections::{HashMap, HashSet};
use std::sync::{Mutex, OnceLock};

use super::map::{MapKind, MapSpec};
use crate::carnot::linalg::{gram_volume_factor, rank, unit_ball_volume};
use crate::carnot::{GroupKind, GroupSpec, Pt};
use crate::error::{Error, Result};
use crate::packing::{Ball, BallFunction};
use crate::scalar::Real;

/// Target cells per axis of the image bounding box when rasterizing.
pub const CELLS_PER_AXIS: usize = 32;
/// Minimum source samples per ball diameter per coordinate.
pub const MIN_RESOLUTION: usize = 8;
/// Occupied-cell budget before an image is declared unbounded.
pub const CELL_BUDGET: usize = 4_000_000;

/// How `e_u(B) = L(u(B))` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureMethod {
    ClosedForm,
    Raster,
}

/// Computes `e_u(B)` by a closed form where one is known and otherwise by
/// rasterizing the image of a graded lattice filling the ball.
#[derive(Debug)]
pub struct ImageMeasurer {
    map: MapSpec,
    unit_samples: Vec<Vec<f64>>,
    resolution: usize,
    force_raster: bool,
    cache: Mutex<HashMap<u64, f64>>,
}

impl ImageMeasurer {
    pub fn new(map: MapSpec, resolution: usize) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::ResolutionUnderflow { step: 2.0 / resolution as f64 });
        }
        let unit_samples = unit_ball_samples(&map.source, resolution);
        Ok(ImageMeasurer { map, unit_samples, resolution, force_raster: false, cache: Mutex::new(HashMap::new()) })
    }

    /// Ignores closed forms; used to cross-check them.
    pub fn raster_only(mut self) -> Self {
        self.force_raster = true;
        self
    }

    pub fn map(&self) -> &MapSpec {
        &self.map
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn method(&self) -> MeasureMethod {
        if !self.force_raster && closed_form_unit(&self.map).is_some() {
            MeasureMethod::ClosedForm
        } else {
            MeasureMethod::Raster
        }
    }

    /// `e_u(B(center, radius))`.
    pub fn measure(&self, center: &[f64], radius: f64) -> Result<f64> {
        if self.method() == MeasureMethod::ClosedForm {
            let unit = closed_form_unit(&self.map).expect("closed form");
            let k = self.map.homogeneity_degree().expect("closed forms are homogeneous");
            return Ok(unit * radius.powi(k as i32));
        }
        if self.map.radius_only() {
            let key = radius.to_bits();
            if let Some(&v) = self.cache.lock().expect("cache lock").get(&key) {
                return Ok(v);
            }
            let v = self.raster(&self.map.source.identity::<f64>(), radius)?;
            self.cache.lock().expect("cache lock").insert(key, v);
            return Ok(v);
        }
        self.raster(center, radius)
    }

    /// `e_u(B)` from the ball samples regardless of closed forms. Balls are
    /// connected, so real-valued images are intervals and their length is
    /// read off directly; other images are rasterized.
    pub fn raster(&self, center: &[f64], radius: f64) -> Result<f64> {
        let images: Vec<Pt<f64>> = self.ball_samples(center, radius).iter().map(|x| self.map.eval(x)).collect();
        if self.map.is_real_valued() {
            let (lo, hi) = images.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v[0]), h.max(v[0])));
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::Domain("non-finite image point".into()));
            }
            return Ok(hi - lo);
        }
        raster_measure(&images, CELLS_PER_AXIS, CELL_BUDGET)
    }

    /// The ball's sample points: a graded lattice filling it plus points on
    /// its boundary sphere.
    pub fn ball_samples(&self, center: &[f64], radius: f64) -> Vec<Pt<f64>> {
        let g = &self.map.source;
        self.unit_samples.iter().map(|s| g.product(center, &g.dilate(radius, s))).collect()
    }
}

impl<T: Real> BallFunction<T> for ImageMeasurer {
    fn eval(&self, _g: &GroupSpec, b: &Ball<T>) -> T {
        let c: Vec<f64> = b.center.iter().map(|x| x.as_f64()).collect();
        // A fixed number of cells per axis cannot exceed the budget, so
        // failures only come from non-finite input and surface as NaN.
        T::lit(self.measure(&c, b.radius.as_f64()).unwrap_or(f64::NAN))
    }

    fn radius_only(&self) -> bool {
        self.map.radius_only()
    }
}

/// `e_u(B(0, 1))` where a closed form is known; `e_u(B(c, r))` is then this
/// value times `r^k`, `k` the map's homogeneity degree.
pub fn closed_form_unit(map: &MapSpec) -> Option<f64> {
    match &map.kind {
        MapKind::Constant { .. } => Some(0.0),
        MapKind::HorizontalQuotient => Some(quotient_unit_area()),
        MapKind::Homomorphism { hom } => {
            let src = hom.source();
            let h = src.horizontal_dim();
            let block: Vec<Vec<f64>> = hom.matrix().iter().take(hom.target().horizontal_dim()).map(|r| r[..h].to_vec()).collect();
            match hom.target().kind() {
                GroupKind::Euclidean { n: k } => {
                    if rank(&block) < k {
                        return Some(0.0);
                    }
                    Some(unit_ball_volume(k) * gram_volume_factor(&block))
                }
                GroupKind::Heisenberg { m } => {
                    if src.kind() != (GroupKind::Heisenberg { m }) {
                        return None;
                    }
                    let lambda2 = conformal_factor(&block)?;
                    let q = hom.target().q() as f64;
                    Some(lambda2.powf(q / 2.0) * heisenberg_unit_ball_volume(m))
                }
            }
        }
        MapKind::CoordinateProjection { .. } | MapKind::DistanceToPoint { .. } => None,
    }
}

/// `lambda^2` when `A A^T = lambda^2 I` with `A` square.
fn conformal_factor(a: &[Vec<f64>]) -> Option<f64> {
    let k = a.len();
    if a.iter().any(|r| r.len() != k) {
        return None;
    }
    let dot = |i: usize, j: usize| a[i].iter().zip(&a[j]).map(|(x, y)| x * y).sum::<f64>();
    let l2 = dot(0, 0);
    let tol = 1e-12 * (1.0 + l2);
    for i in 0..k {
        for j in 0..k {
            let want = if i == j { l2 } else { 0.0 };
            if (dot(i, j) - want).abs() > tol {
                return None;
            }
        }
    }
    (l2 > 0.0).then_some(l2)
}

/// Lebesgue volume of the unit Koranyi ball of `Heis^m`.
pub fn heisenberg_unit_ball_volume(m: usize) -> f64 {
    // The z-fiber over h has length sqrt(1 - |h|^4) / 2.
    let k = 2 * m;
    let sphere = unit_ball_volume(k) * k as f64;
    0.5 * sphere * simpson(|r| r.powi(k as i32 - 1) * (1.0 - r.powi(4)).max(0.0).sqrt(), 0.0, 1.0, 20_000)
}

/// Area of `u(B(0, 1))` for the horizontal quotient `(y, z + x y / 2)`.
///
/// Over a fixed `y` the image is `|w| <= max_x (x |y| / 2 + sqrt(1 - (x^2 + y^2)^2) / 4)`;
/// the function of `x` is concave, so golden-section search finds the max.
pub fn quotient_unit_area() -> f64 {
    static AREA: OnceLock<f64> = OnceLock::new();
    *AREA.get_or_init(|| {
        let half_width = |y: f64| {
            let xmax = (1.0 - y * y).max(0.0).sqrt();
            let f = |x: f64| 0.5 * x * y.abs() + 0.25 * (1.0 - (x * x + y * y).powi(2)).max(0.0).sqrt();
            let (mut a, mut b) = (0.0, xmax);
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..100 {
                let c = b - phi * (b - a);
                let d = a + phi * (b - a);
                if f(c) < f(d) {
                    a = c;
                } else {
                    b = d;
                }
            }
            f(0.5 * (a + b))
        };
        2.0 * simpson(half_width, -1.0, 1.0, 20_000)
    })
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Cell centers of a `resolution`-per-axis grid over the bounding box of the
/// unit ball that lie in the ball, plus points on the unit sphere.
fn unit_ball_samples(g: &GroupSpec, resolution: usize) -> Vec<Vec<f64>> {
    let n = g.n();
    let origin = g.identity::<f64>();
    let mut half = vec![0.0; n];
    g.neighbor_window(&origin, 1.0, &mut half);
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    'outer: loop {
        let p: Vec<f64> = (0..n)
            .map(|i| -half[i] + (idx[i] as f64 + 0.5) * 2.0 * half[i] / resolution as f64)
            .collect();
        if g.gauge(&p) <= 1.0 {
            out.push(p);
        }
        for i in 0..n {
            idx[i] += 1;
            if idx[i] < resolution {
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }
    for d in crate::packing::unit_sphere_directions::<f64>(g, resolution / 2) {
        out.push(d.0);
    }
    out
}

/// Lebesgue measure of the set sampled by `points`, from occupied cells of a
/// grid with `cells` cells per axis over the bounding box. Boundary cells
/// (occupied, with an empty face neighbor) count one half.
pub fn raster_measure(points: &[Pt<f64>], cells: usize, budget: usize) -> Result<f64> {
    let Some(first) = points.first() else { return Ok(0.0) };
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::Domain("non-finite image point".into()));
    }
    let d = first.len();
    let mut lo = first.0.clone();
    let mut hi = first.0.clone();
    for p in points {
        for i in 0..d {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let scale = lo.iter().chain(&hi).fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    if (0..d).any(|i| hi[i] - lo[i] <= 1e-12 * scale) {
        return Ok(0.0);
    }
    let size: Vec<f64> = (0..d).map(|i| (hi[i] - lo[i]) / cells as f64).collect();
    let mut occupied: HashSet<Vec<i64>> = HashSet::new();
    for p in points {
        let key: Vec<i64> =
            (0..d).map(|i| (((p[i] - lo[i]) / size[i]).floor() as i64).min(cells as i64 - 1)).collect();
        occupied.insert(key);
        if occupied.len() > budget {
            return Err(Error::UnboundedImage { cells: occupied.len() });
        }
    }
    let mut boundary = 0usize;
    let mut probe = vec![0i64; d];
    for key in &occupied {
        let mut edge = false;
        'axes: for i in 0..d {
            for delta in [-1, 1] {
                probe.copy_from_slice(key);
                probe[i] += delta;
                if !occupied.contains(&probe) {
                    edge = true;
                    break 'axes;
                }
            }
        }
        boundary += edge as usize;
    }
    let interior = occupied.len() - boundary;
    let cell: f64 = size.iter().product();
    Ok((interior as f64 + 0.5 * boundary as f64) * cell)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h1() -> GroupSpec {
        GroupSpec::heisenberg(1).unwrap()
    }

    #[test]
    fn koranyi_ball_volume() {
        let pi = std::f64::consts::PI;
        assert!((heisenberg_unit_ball_volume(1) - pi * pi / 8.0).abs() < 1e-6);
    }

    #[test]
    fn coordinate_image_is_an_interval() {
        let u = MapSpec::parse(h1(), "coord:x").unwrap();
        assert_eq!(closed_form_unit(&u), Some(2.0));
        let m = ImageMeasurer::new(u, 32).unwrap();
        let r = m.raster(&[0.2, 0.1, -0.3], 0.5).unwrap();
        assert!((r - 1.0).abs() < 0.05, "{r}");
    }

    #[test]
    fn quotient_raster_matches_closed_form() {
        let u = MapSpec::horizontal_quotient(h1()).unwrap();
        let a = quotient_unit_area();
        assert!(a > 0.5 && a < 2.0, "{a}");
        let m = ImageMeasurer::new(u, 48).unwrap();
        let r = m.raster(&[0.3, -0.2, 0.1], 1.0).unwrap();
        assert!((r / a - 1.0).abs() < 0.1, "raster {r} closed {a}");
        let half = m.measure(&[0.0; 3], 0.5).unwrap();
        assert!((half / a - 0.125).abs() < 1e-12);
    }

    #[test]
    fn degenerate_images_have_zero_measure() {
        let m = ImageMeasurer::new(MapSpec::parse(h1(), "const").unwrap(), 16).unwrap();
        assert_eq!(m.raster(&[0.0; 3], 1.0).unwrap(), 0.0);
        assert!(ImageMeasurer::new(MapSpec::parse(h1(), "const").unwrap(), 4).is_err());
    }

    #[test]
    fn non_equivariant_projection_depends_on_center() {
        let u = MapSpec::parse(h1(), "coord:y,z").unwrap();
        let m = ImageMeasurer::new(u, 32).unwrap();
        let near = m.measure(&[0.0, 0.0, 0.0], 0.25).unwrap();
        let far = m.measure(&[0.0, 2.0, 0.0], 0.25).unwrap();
        assert!(far > 2.0 * near, "near {near} far {far}");
    }
}
