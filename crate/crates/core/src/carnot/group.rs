use std::fmt;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Weight of the vertical coordinate in the Korányi gauge `(|h|^4 + KAPPA z^2)^{1/4}`.
///
/// With the polarized product this value makes the gauge distance a genuine
/// metric (Cygan), so the quasi-triangle constant is 1.
pub const KORANYI_KAPPA: f64 = 16.0;

/// A point in exponential coordinates, ordered layer by layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pt<T>(pub Vec<T>);

impl<T: Real> Pt<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Pt(coords)
    }

    pub fn zeros(n: usize) -> Self {
        Pt(vec![T::zero(); n])
    }

    pub fn from_f64(coords: &[f64]) -> Self {
        Pt(coords.iter().map(|&c| T::lit(c)).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl<T> Deref for Pt<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for Pt<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupKind {
    Euclidean { n: usize },
    /// `Heis^m` with coordinates `(x_1..x_m, y_1..y_m, z)`.
    Heisenberg { m: usize },
}

/// A concrete Carnot group: Euclidean space or a Heisenberg group.
///
/// The Heisenberg product is the polarized one,
/// `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+ 1/2 (x.y' - y.x'))`,
/// dilations scale the top layer quadratically, and the gauge is Korányi's.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupSpec {
    kind: GroupKind,
}

impl GroupSpec {
    pub fn euclidean(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("Euclidean dimension must be at least 1".into()));
        }
        Ok(GroupSpec { kind: GroupKind::Euclidean { n } })
    }

    pub fn heisenberg(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("Heisenberg index m must be at least 1".into()));
        }
        Ok(GroupSpec { kind: GroupKind::Heisenberg { m } })
    }

    /// Parses `heis<m>` or `euclid<n>` (also `r<n>`).
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim().to_ascii_lowercase();
        let parse = |digits: &str| -> Result<usize> {
            digits.parse::<usize>().map_err(|_| Error::Unknown { kind: "group", name: name.clone() })
        };
        if let Some(rest) = name.strip_prefix("heis") {
            Self::heisenberg(parse(rest)?)
        } else if let Some(rest) = name.strip_prefix("euclid") {
            Self::euclidean(parse(rest)?)
        } else if let Some(rest) = name.strip_prefix('r') {
            Self::euclidean(parse(rest)?)
        } else {
            Err(Error::Unknown { kind: "group", name })
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn name(&self) -> String {
        match self.kind {
            GroupKind::Euclidean { n } => format!("euclid{n}"),
            GroupKind::Heisenberg { m } => format!("heis{m}"),
        }
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self.kind, GroupKind::Euclidean { .. })
    }

    /// Topological dimension.
    pub fn n(&self) -> usize {
        match self.kind {
            GroupKind::Euclidean { n } => n,
            GroupKind::Heisenberg { m } => 2 * m + 1,
        }
    }

    /// Homogeneous dimension, `sum_i i * dim(layer_i)`.
    pub fn q(&self) -> usize {
        self.layer_dims().iter().enumerate().map(|(i, d)| (i + 1) * d).sum()
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        match self.kind {
            GroupKind::Euclidean { n } => vec![n],
            GroupKind::Heisenberg { m } => vec![2 * m, 1],
        }
    }

    /// Dimension of the first (horizontal) layer.
    pub fn horizontal_dim(&self) -> usize {
        self.layer_dims()[0]
    }

    /// Grading weight of coordinate `i`.
    pub fn weight(&self, i: usize) -> u32 {
        match self.kind {
            GroupKind::Euclidean { .. } => 1,
            GroupKind::Heisenberg { m } => {
                if i < 2 * m {
                    1
                } else {
                    2
                }
            }
        }
    }

    pub fn weights(&self) -> Vec<u32> {
        (0..self.n()).map(|i| self.weight(i)).collect()
    }

    /// Largest grading weight (the step of the group).
    pub fn step(&self) -> u32 {
        self.layer_dims().len() as u32
    }

    /// Gauge of the unit vector along coordinate `i`.
    pub fn axis_gauge<T: Real>(&self, i: usize) -> T {
        let mut e = vec![T::zero(); self.n()];
        e[i] = T::one();
        self.gauge(&e)
    }

    /// Gauge of the unit vector along the last (top-layer) coordinate.
    pub fn vertical_gauge_constant<T: Real>(&self) -> T {
        self.axis_gauge(self.n() - 1)
    }

    /// Constant `K` in `d(g,h) <= K (d(g,k) + d(k,h))`.
    pub fn quasi_triangle_constant(&self) -> f64 {
        1.0
    }

    pub fn check_dim<T>(&self, p: &[T]) -> Result<()> {
        if p.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: p.len() });
        }
        Ok(())
    }

    pub fn identity<T: Real>(&self) -> Pt<T> {
        Pt::zeros(self.n())
    }

    pub fn product<T: Real>(&self, a: &[T], b: &[T]) -> Pt<T> {
        let mut out: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x + y).collect();
        if let GroupKind::Heisenberg { m } = self.kind {
            out[2 * m] = out[2 * m] + T::lit(0.5) * symplectic(m, a, b);
        }
        Pt(out)
    }

    pub fn inverse<T: Real>(&self, a: &[T]) -> Pt<T> {
        Pt(a.iter().map(|&x| -x).collect())
    }

    pub fn dilate<T: Real>(&self, r: T, a: &[T]) -> Pt<T> {
        let r2 = r * r;
        Pt(a
            .iter()
            .enumerate()
            .map(|(i, &x)| if self.weight(i) == 1 { r * x } else { r2 * x })
            .collect())
    }

    /// Homogeneous quasi-norm: Euclidean norm, or Korányi gauge on `Heis^m`.
    pub fn gauge<T: Real>(&self, a: &[T]) -> T {
        match self.kind {
            GroupKind::Euclidean { .. } => a.iter().map(|&x| x * x).sum::<T>().sqrt(),
            GroupKind::Heisenberg { m } => {
                let h2: T = a[..2 * m].iter().map(|&x| x * x).sum();
                let z = a[2 * m];
                (h2 * h2 + T::lit(KORANYI_KAPPA) * z * z).sqrt().sqrt()
            }
        }
    }

    /// `gauge(a^{-1} b)`, computed without allocating.
    pub fn distance<T: Real>(&self, a: &[T], b: &[T]) -> T {
        match self.kind {
            GroupKind::Euclidean { .. } => {
                a.iter().zip(b).map(|(&x, &y)| (y - x) * (y - x)).sum::<T>().sqrt()
            }
            GroupKind::Heisenberg { m } => {
                let mut h2 = T::zero();
                for i in 0..2 * m {
                    let d = b[i] - a[i];
                    h2 = h2 + d * d;
                }
                let w = b[2 * m] - a[2 * m] - T::lit(0.5) * symplectic(m, a, b);
                (h2 * h2 + T::lit(KORANYI_KAPPA) * w * w).sqrt().sqrt()
            }
        }
    }

    /// Checked variant of [`GroupSpec::distance`].
    pub fn try_distance<T: Real>(&self, a: &[T], b: &[T]) -> Result<T> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.distance(a, b))
    }

    /// Per-coordinate half-widths of an axis-aligned box around `a` that
    /// contains the ball `B(a, radius)`.
    pub fn neighbor_window<T: Real>(&self, a: &[T], radius: T, out: &mut [T]) {
        match self.kind {
            GroupKind::Euclidean { .. } => out.iter_mut().for_each(|o| *o = radius),
            GroupKind::Heisenberg { m } => {
                for o in out[..2 * m].iter_mut() {
                    *o = radius;
                }
                let spread: T = a[..2 * m].iter().map(|x| x.abs()).sum();
                out[2 * m] = radius * radius / T::lit(KORANYI_KAPPA).sqrt()
                    + T::lit(0.5) * radius * spread;
            }
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn symplectic<T: Real>(m: usize, a: &[T], b: &[T]) -> T {
    let mut s = T::zero();
    for i in 0..m {
        s = s + a[i] * b[m + i] - a[m + i] * b[i];
    }
    s
}

pub fn make_heisenberg(m: usize) -> Result<GroupSpec> {
    GroupSpec::heisenberg(m)
}

pub fn make_euclidean(n: usize) -> Result<GroupSpec> {
    GroupSpec::euclidean(n)
}

/// Checked distance between two points of `group`.
pub fn distance<T: Real>(group: &GroupSpec, a: &Pt<T>, b: &Pt<T>) -> Result<T> {
    group.try_distance(a, b)
}
