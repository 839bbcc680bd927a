use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::group::{GroupSpec, Pt};
use super::hom::{HomHom, KernelVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A parametric subset of a group with a deterministic lattice sampler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region<T> {
    Empty,
    /// `base * (t * direction)` for `t in [0, length]`; `direction` is a unit
    /// vector of the first layer.
    HorizontalSegment { base: Pt<T>, direction: Vec<T>, length: T },
    /// `base * (0, .., 0, t)` for `t in [0, height]` along the last coordinate.
    VerticalSegment { base: Pt<T>, height: T },
    /// `sum_k a_k v_k` over the graded orthonormal basis `v_k` of `ker u`,
    /// with `lower_k <= a_k <= upper_k`.
    KernelPatch { hom: HomHom, basis: Vec<KernelVector>, lower: Vec<T>, upper: Vec<T> },
    /// Axis-aligned box in exponential coordinates.
    Box { corner: Pt<T>, sides: Vec<T> },
    /// Planar annulus `inner <= |p - center| <= outer` (Euclidean plane only).
    Annulus { center: Pt<T>, inner: T, outer: T },
}

/// One lattice direction: coordinate-space extent and grading data.
struct Axis<T> {
    lower: T,
    extent: T,
    weight: u32,
    unit_gauge: T,
}

fn tol<T: Real>(scale: T) -> T {
    T::lit(1e-9) * (T::one() + scale.abs())
}

impl<T: Real> Region<T> {
    pub fn horizontal_segment(g: &GroupSpec, base: Pt<T>, direction: Vec<T>, length: T) -> Result<Self> {
        g.check_dim(&base)?;
        if direction.len() != g.horizontal_dim() {
            return Err(Error::DimensionMismatch { expected: g.horizontal_dim(), got: direction.len() });
        }
        let norm = direction.iter().map(|&d| d * d).sum::<T>().sqrt();
        if !(norm > T::zero()) {
            return Err(Error::InvalidParameter { name: "direction", reason: "zero vector".into() });
        }
        if !(length >= T::zero()) || !length.is_finite() {
            return Err(Error::InvalidParameter { name: "length", reason: format!("{length}") });
        }
        let direction = direction.into_iter().map(|d| d / norm).collect();
        Ok(Region::HorizontalSegment { base, direction, length })
    }

    pub fn vertical_segment(g: &GroupSpec, base: Pt<T>, height: T) -> Result<Self> {
        g.check_dim(&base)?;
        if !(height >= T::zero()) || !height.is_finite() {
            return Err(Error::InvalidParameter { name: "height", reason: format!("{height}") });
        }
        Ok(Region::VerticalSegment { base, height })
    }

    /// Patch of the kernel of `hom`; `lower`/`upper` index the graded kernel basis.
    pub fn kernel_patch(hom: HomHom, lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        let basis = hom.kernel_basis();
        for v in [&lower, &upper] {
            if v.len() != basis.len() {
                return Err(Error::DimensionMismatch { expected: basis.len(), got: v.len() });
            }
        }
        Ok(Region::KernelPatch { hom, basis, lower, upper })
    }

    pub fn boxed(g: &GroupSpec, corner: Pt<T>, sides: Vec<T>) -> Result<Self> {
        g.check_dim(&corner)?;
        if sides.len() != g.n() {
            return Err(Error::DimensionMismatch { expected: g.n(), got: sides.len() });
        }
        if sides.iter().any(|s| !(*s >= T::zero()) || !s.is_finite()) {
            return Err(Error::InvalidParameter { name: "sides", reason: "negative or non-finite side".into() });
        }
        Ok(Region::Box { corner, sides })
    }

    pub fn annulus(g: &GroupSpec, center: Pt<T>, inner: T, outer: T) -> Result<Self> {
        if *g != GroupSpec::euclidean(2)? {
            return Err(Error::Unsupported("annulus regions live in the Euclidean plane".into()));
        }
        g.check_dim(&center)?;
        if !(inner >= T::zero() && outer >= inner) {
            return Err(Error::InvalidParameter { name: "annulus", reason: "need 0 <= inner <= outer".into() });
        }
        Ok(Region::Annulus { center, inner, outer })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Region::Empty => "empty",
            Region::HorizontalSegment { .. } => "horizontal-segment",
            Region::VerticalSegment { .. } => "vertical-segment",
            Region::KernelPatch { .. } => "kernel-patch",
            Region::Box { .. } => "box",
            Region::Annulus { .. } => "annulus",
        }
    }

    pub fn is_curve(&self) -> bool {
        matches!(self, Region::HorizontalSegment { .. } | Region::VerticalSegment { .. })
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Region::Empty => true,
            Region::KernelPatch { lower, upper, .. } => lower.iter().zip(upper).any(|(l, u)| l > u),
            _ => false,
        }
    }

    /// Length, height, or Lebesgue measure of the region.
    pub fn reference_measure(&self) -> T {
        match self {
            Region::Empty => T::zero(),
            Region::HorizontalSegment { length, .. } => *length,
            Region::VerticalSegment { height, .. } => *height,
            Region::KernelPatch { lower, upper, .. } => {
                if self.is_empty() {
                    T::zero()
                } else {
                    lower.iter().zip(upper).map(|(&l, &u)| u - l).fold(T::one(), |a, b| a * b)
                }
            }
            Region::Box { sides, .. } => sides.iter().fold(T::one(), |a, &b| a * b),
            Region::Annulus { inner, outer, .. } => {
                T::lit(std::f64::consts::PI) * (*outer * *outer - *inner * *inner)
            }
        }
    }

    /// Upper bound for the measure of the `eps`-neighborhood of a kernel patch
    /// inside the kernel, obtained by widening each basis coordinate by the
    /// reach of an `eps`-ball along it. Exact widening for abelian kernels.
    pub fn kernel_neighborhood_measure(&self, g: &GroupSpec, eps: T) -> Result<T> {
        match self {
            Region::KernelPatch { basis, lower, upper, .. } => {
                if self.is_empty() {
                    return Ok(T::zero());
                }
                let mut m = T::one();
                for ((v, &l), &u) in basis.iter().zip(lower).zip(upper) {
                    let c: T = g.gauge(&v.coords.iter().map(|&x| T::lit(x)).collect::<Vec<_>>());
                    let reach = (eps / c).powi(v.weight as i32);
                    m = m * (u - l + reach + reach);
                }
                Ok(m)
            }
            _ => Err(Error::Unsupported("neighborhood measure is defined for kernel patches".into())),
        }
    }

    fn axes(&self, g: &GroupSpec) -> Vec<Axis<T>> {
        match self {
            Region::Empty => vec![],
            Region::HorizontalSegment { length, .. } => {
                vec![Axis { lower: T::zero(), extent: *length, weight: 1, unit_gauge: T::one() }]
            }
            Region::VerticalSegment { height, .. } => vec![Axis {
                lower: T::zero(),
                extent: *height,
                weight: g.weight(g.n() - 1),
                unit_gauge: g.vertical_gauge_constant(),
            }],
            Region::KernelPatch { basis, lower, upper, .. } => basis
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (&l, &u))| Axis {
                    lower: l,
                    extent: u - l,
                    weight: v.weight,
                    unit_gauge: g.gauge(&v.coords.iter().map(|&x| T::lit(x)).collect::<Vec<_>>()),
                })
                .collect(),
            Region::Box { corner, sides } => (0..g.n())
                .map(|i| Axis { lower: corner[i], extent: sides[i], weight: g.weight(i), unit_gauge: g.axis_gauge(i) })
                .collect(),
            Region::Annulus { center, outer, .. } => (0..2)
                .map(|i| Axis { lower: center[i] - *outer, extent: *outer + *outer, weight: 1, unit_gauge: T::one() })
                .collect(),
        }
    }

    fn point_at(&self, g: &GroupSpec, params: &[T]) -> Pt<T> {
        match self {
            Region::Empty => unreachable!("empty region has no parameters"),
            Region::HorizontalSegment { base, direction, .. } => {
                let mut step = vec![T::zero(); g.n()];
                for (s, &d) in step.iter_mut().zip(direction) {
                    *s = params[0] * d;
                }
                g.product(base, &step)
            }
            Region::VerticalSegment { base, .. } => {
                let mut step = vec![T::zero(); g.n()];
                step[g.n() - 1] = params[0];
                g.product(base, &step)
            }
            Region::KernelPatch { basis, .. } => {
                let mut p = vec![T::zero(); g.n()];
                for (v, &a) in basis.iter().zip(params) {
                    for (x, &c) in p.iter_mut().zip(&v.coords) {
                        *x = *x + a * T::lit(c);
                    }
                }
                Pt(p)
            }
            Region::Box { .. } | Region::Annulus { .. } => Pt(params.to_vec()),
        }
    }

    /// Deterministic cell-centered lattice on the region.
    ///
    /// `step` is a metric spacing: along a direction of weight `w` whose unit
    /// vector has gauge `c`, the coordinate spacing is `(step / c)^w`, so the
    /// lattice is graded. A nonzero `seed` jitters each sample inside its own
    /// lattice cell; `seed = 0` returns exact cell centers.
    pub fn sample(&self, g: &GroupSpec, step: T, seed: u64) -> Result<Vec<Pt<T>>> {
        if !(step > T::zero()) || !step.is_finite() {
            return Err(Error::InvalidParameter { name: "step", reason: format!("{step}") });
        }
        if self.is_empty() {
            return Ok(vec![]);
        }
        let axes = self.axes(g);
        let counts: Vec<usize> = axes
            .iter()
            .map(|a| {
                if a.extent <= T::zero() {
                    1
                } else {
                    let coord_step = (step / a.unit_gauge).powi(a.weight as i32);
                    let ratio = (a.extent / coord_step).as_f64();
                    ((ratio - 1e-9).ceil().max(1.0)) as usize
                }
            })
            .collect();
        let total: usize = counts.iter().product();
        if total > 200_000_000 {
            return Err(Error::InvalidParameter { name: "step", reason: format!("lattice of {total} points") });
        }
        let mut rng = (seed != 0).then(|| ChaCha8Rng::seed_from_u64(seed));
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; axes.len()];
        let mut params = vec![T::zero(); axes.len()];
        for _ in 0..total {
            for (k, a) in axes.iter().enumerate() {
                let cell = a.extent / T::from_usize_lossy(counts[k]);
                let mut frac = T::lit(idx[k] as f64 + 0.5);
                if let Some(rng) = rng.as_mut() {
                    frac = frac + T::lit(rng.gen_range(-0.25..0.25));
                }
                params[k] = a.lower + cell * frac;
            }
            let p = self.point_at(g, &params);
            if !matches!(self, Region::Annulus { .. }) || self.contains(g, &p) {
                out.push(p);
            }
            // odometer, last axis fastest
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < counts[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(out)
    }

    pub fn contains(&self, g: &GroupSpec, p: &[T]) -> bool {
        if p.len() != g.n() {
            return false;
        }
        match self {
            Region::Empty => false,
            Region::HorizontalSegment { base, direction, length } => {
                let q = g.product(&g.inverse(base), p);
                let hd = g.horizontal_dim();
                if q[hd..].iter().any(|&z| z.abs() > tol(*length * *length)) {
                    return false;
                }
                let t: T = q[..hd].iter().zip(direction).map(|(&a, &b)| a * b).sum();
                let resid: T = q[..hd]
                    .iter()
                    .zip(direction)
                    .map(|(&a, &b)| (a - t * b) * (a - t * b))
                    .sum::<T>()
                    .sqrt();
                resid <= tol(*length) && t >= -tol(*length) && t <= *length + tol(*length)
            }
            Region::VerticalSegment { base, height } => {
                let q = g.product(&g.inverse(base), p);
                let n = g.n();
                q[..n - 1].iter().all(|&x| x.abs() <= tol(T::zero()))
                    && q[n - 1] >= -tol(*height)
                    && q[n - 1] <= *height + tol(*height)
            }
            Region::KernelPatch { hom, basis, lower, upper } => {
                if self.is_empty() {
                    return false;
                }
                let image = hom.apply(p);
                if hom.target().gauge(&image) > tol(T::zero()) {
                    return false;
                }
                basis.iter().zip(lower.iter().zip(upper)).all(|(v, (&l, &u))| {
                    let a: T = v.coords.iter().zip(p).map(|(&c, &x)| T::lit(c) * x).sum();
                    a >= l - tol(l) && a <= u + tol(u)
                })
            }
            Region::Box { corner, sides } => p
                .iter()
                .zip(corner.iter().zip(sides))
                .all(|(&x, (&c, &s))| x >= c - tol(c) && x <= c + s + tol(c + s)),
            Region::Annulus { center, inner, outer } => {
                let r = g.distance(center, p);
                r >= *inner - tol(*inner) && r <= *outer + tol(*outer)
            }
        }
    }

    /// Image of the region under the dilation `delta_r`.
    pub fn dilated(&self, g: &GroupSpec, r: T) -> Result<Self> {
        Ok(match self {
            Region::Empty => Region::Empty,
            Region::HorizontalSegment { base, direction, length } => Region::HorizontalSegment {
                base: g.dilate(r, base),
                direction: direction.clone(),
                length: *length * r,
            },
            Region::VerticalSegment { base, height } => {
                Region::VerticalSegment { base: g.dilate(r, base), height: *height * r.powi(g.weight(g.n() - 1) as i32) }
            }
            Region::KernelPatch { hom, basis, lower, upper } => {
                let scale = |v: &Vec<T>| {
                    v.iter().zip(basis).map(|(&a, b)| a * r.powi(b.weight as i32)).collect::<Vec<_>>()
                };
                Region::KernelPatch { hom: hom.clone(), basis: basis.clone(), lower: scale(lower), upper: scale(upper) }
            }
            Region::Box { corner, sides } => Region::Box {
                corner: g.dilate(r, corner),
                sides: sides.iter().enumerate().map(|(i, &s)| s * r.powi(g.weight(i) as i32)).collect(),
            },
            Region::Annulus { center, inner, outer } => {
                Region::Annulus { center: g.dilate(r, center), inner: *inner * r, outer: *outer * r }
            }
        })
    }

    /// For curve-like regions: parameter length, and the point at parameter `t`.
    pub fn curve_length(&self) -> Result<T> {
        match self {
            Region::HorizontalSegment { length, .. } => Ok(*length),
            Region::VerticalSegment { height, .. } => Ok(*height),
            other => Err(Error::NotCurve(other.tag().into())),
        }
    }

    pub fn curve_point(&self, g: &GroupSpec, t: T) -> Result<Pt<T>> {
        if !self.is_curve() {
            return Err(Error::NotCurve(self.tag().into()));
        }
        Ok(self.point_at(g, &[t]))
    }

    /// Parameter half-length of the curve covered by a ball of radius `radius`
    /// centered on it.
    pub fn curve_reach(&self, g: &GroupSpec, radius: T) -> Result<T> {
        match self {
            Region::HorizontalSegment { .. } => Ok(radius),
            Region::VerticalSegment { .. } => {
                let c: T = g.vertical_gauge_constant();
                Ok((radius / c).powi(g.weight(g.n() - 1) as i32))
            }
            other => Err(Error::NotCurve(other.tag().into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h1() -> GroupSpec {
        GroupSpec::heisenberg(1).unwrap()
    }

    fn regions() -> Vec<Region<f64>> {
        let g = h1();
        let u = HomHom::coordinate_projection(g, &[0]).unwrap();
        vec![
            Region::horizontal_segment(&g, Pt(vec![0.2, -0.1, 0.3]), vec![1.0, 1.0], 1.5).unwrap(),
            Region::vertical_segment(&g, Pt(vec![0.4, 0.1, 0.0]), 0.7).unwrap(),
            Region::kernel_patch(u, vec![-0.25, 0.0], vec![0.25, 0.125]).unwrap(),
            Region::boxed(&g, Pt(vec![0.0, 0.0, 0.0]), vec![0.5, 0.5, 0.125]).unwrap(),
        ]
    }

    #[test]
    fn samples_are_members_and_deterministic() {
        let g = h1();
        for r in regions() {
            for seed in [0, 42] {
                let a = r.sample(&g, 0.1, seed).unwrap();
                let b = r.sample(&g, 0.1, seed).unwrap();
                assert_eq!(a, b);
                assert!(!a.is_empty());
                assert!(a.iter().all(|p| r.contains(&g, p)), "{}", r.tag());
            }
        }
        let r2 = GroupSpec::euclidean(2).unwrap();
        let ann = Region::annulus(&r2, Pt(vec![0.0, 0.0]), 0.5, 1.0).unwrap();
        let s = ann.sample(&r2, 0.05, 0).unwrap();
        assert!(s.iter().all(|p| ann.contains(&r2, p)));
    }

    #[test]
    fn kernel_patch_samples_lie_in_kernel() {
        let g = h1();
        let u = HomHom::coordinate_projection(g, &[0]).unwrap();
        let r = Region::kernel_patch(u.clone(), vec![0.0, 0.0], vec![0.5, 0.125]).unwrap();
        for p in r.sample(&g, 1.0 / 32.0, 0).unwrap() {
            let up = u.apply(&p);
            assert!(u.target().gauge(&up) <= 1e-12);
        }
    }

    #[test]
    fn graded_lattice_counts() {
        let g = h1();
        let v = Region::vertical_segment(&g, Pt(vec![0.0; 3]), 1.0).unwrap();
        // coordinate step (eps / 2)^2
        assert_eq!(v.sample(&g, 0.25, 0).unwrap().len(), 64);
        let s = Region::horizontal_segment(&g, Pt(vec![0.0; 3]), vec![1.0, 0.0], 1.0).unwrap();
        assert_eq!(s.sample(&g, 0.125, 0).unwrap().len(), 8);
    }

    #[test]
    fn degenerate_regions() {
        let g = h1();
        let s = Region::horizontal_segment(&g, Pt(vec![0.0; 3]), vec![1.0, 0.0], 0.0).unwrap();
        assert_eq!(s.reference_measure(), 0.0);
        assert_eq!(s.sample(&g, 0.1, 0).unwrap().len(), 1);
        let u = HomHom::coordinate_projection(g, &[0]).unwrap();
        let e = Region::kernel_patch(u, vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert!(e.is_empty());
        assert_eq!(e.reference_measure(), 0.0);
        assert!(e.sample(&g, 0.1, 0).unwrap().is_empty());
        assert!(Region::<f64>::Empty.sample(&g, 0.1, 0).unwrap().is_empty());
    }

    #[test]
    fn dilation_maps_lattices() {
        let g = h1();
        for r in regions() {
            let d = r.dilated(&g, 2.0).unwrap();
            let a = r.sample(&g, 0.1, 0).unwrap();
            let b = d.sample(&g, 0.2, 0).unwrap();
            assert_eq!(a.len(), b.len(), "{}", r.tag());
            for (p, q) in a.iter().zip(&b) {
                let dp = g.dilate(2.0, p);
                assert!(g.distance(&dp, q) < 1e-9);
            }
        }
    }
}
