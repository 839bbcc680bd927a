use std::fmt;

use serde::{Deserialize, Serialize};

use crate::carnot::{GroupKind, GroupSpec, HomHom, Pt};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// How a map acts on points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    Constant { value: Vec<f64> },
    /// Raw coordinate projection (used when the coordinates are not all
    /// horizontal, so the projection is not a homomorphism).
    CoordinateProjection { indices: Vec<usize> },
    Homomorphism { hom: HomHom },
    /// `Heis^1 -> R^2`, `(x, y, z) -> (y, z + x y / 2)`: the quotient by the
    /// horizontal line subgroup `{(t, 0, 0)}`. Its fibers are the horizontal
    /// lines parallel to the `x` axis.
    HorizontalQuotient,
    /// `v(x) = d(m0, u(x))`, real valued.
    DistanceToPoint { inner: Box<MapSpec>, point: Vec<f64> },
}

/// A map from a Carnot group to a measure space: Euclidean `R^k` or a group,
/// each with Lebesgue measure on exponential coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub source: GroupSpec,
    pub target: GroupSpec,
    pub kind: MapKind,
    /// Registry string this map was built from.
    pub label: String,
}

impl MapSpec {
    pub fn constant(source: GroupSpec, value: Vec<f64>) -> Result<Self> {
        let target = GroupSpec::euclidean(value.len().max(1))?;
        let value = if value.is_empty() { vec![0.0] } else { value };
        let label = format!("const:{}", join(&value));
        Ok(MapSpec { source, target, kind: MapKind::Constant { value }, label })
    }

    /// Projection onto the given coordinates; a homomorphism when they are
    /// all horizontal (or the source is abelian).
    pub fn coordinates(source: GroupSpec, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParameter { name: "indices", reason: "empty".into() });
        }
        let label = format!("coord:{}", indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","));
        let target = GroupSpec::euclidean(indices.len())?;
        if indices.iter().all(|&i| i < source.n() && source.weight(i) == 1) {
            let hom = HomHom::coordinate_projection(source, indices)?;
            Ok(MapSpec { source, target, kind: MapKind::Homomorphism { hom }, label })
        } else {
            if let Some(&bad) = indices.iter().find(|&&i| i >= source.n()) {
                return Err(Error::InvalidParameter { name: "indices", reason: format!("{bad} out of range") });
            }
            Ok(MapSpec { source, target, kind: MapKind::CoordinateProjection { indices: indices.to_vec() }, label })
        }
    }

    pub fn homomorphism(hom: HomHom) -> Self {
        let label = format!(
            "hom:{}:{}",
            hom.target().name(),
            hom.matrix().iter().map(|r| join(r)).collect::<Vec<_>>().join(";")
        );
        MapSpec { source: *hom.source(), target: *hom.target(), kind: MapKind::Homomorphism { hom }, label }
    }

    pub fn horizontal_quotient(source: GroupSpec) -> Result<Self> {
        if source.kind() != (GroupKind::Heisenberg { m: 1 }) {
            return Err(Error::Unsupported("the horizontal quotient is defined on heis1".into()));
        }
        Ok(MapSpec {
            source,
            target: GroupSpec::euclidean(2)?,
            kind: MapKind::HorizontalQuotient,
            label: "quotient-yz".into(),
        })
    }

    pub fn distance_to_point(inner: MapSpec, point: Vec<f64>) -> Result<Self> {
        inner.target.check_dim(&point)?;
        let label = format!("dist:{}:{}", join_slash(&point), inner.label);
        Ok(MapSpec {
            source: inner.source,
            target: GroupSpec::euclidean(1)?,
            kind: MapKind::DistanceToPoint { inner: Box::new(inner), point },
            label,
        })
    }

    /// Builds a map from its registry string:
    /// `const[:v1,v2]`, `coord:x|y|z|<i>[,..]`, `hom:<target>:<row>;<row>`,
    /// `quotient-yz`, `dist:<m0 as a/b/c>:<inner map>`.
    pub fn parse(source: GroupSpec, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let num = |s: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| Error::InvalidParameter { name: "map", reason: format!("bad number `{s}`") })
        };
        match head {
            "const" => {
                let value = if rest.is_empty() { vec![0.0] } else { rest.split(',').map(num).collect::<Result<_>>()? };
                Self::constant(source, value)
            }
            "coord" => {
                let indices = rest
                    .split(',')
                    .map(|t| coordinate_index(&source, t.trim()))
                    .collect::<Result<Vec<_>>>()?;
                Self::coordinates(source, &indices)
            }
            "hom" => {
                let (target, rows) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidParameter { name: "map", reason: "expected hom:<target>:<rows>".into() })?;
                let target = GroupSpec::from_name(target)?;
                let matrix = rows
                    .split(';')
                    .map(|r| r.split(',').map(num).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::homomorphism(HomHom::new(source, target, matrix)?))
            }
            "quotient-yz" => Self::horizontal_quotient(source),
            "dist" => {
                let (point, inner) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidParameter { name: "map", reason: "expected dist:<point>:<map>".into() })?;
                let point = point.split('/').map(num).collect::<Result<Vec<_>>>()?;
                Self::distance_to_point(Self::parse(source, inner)?, point)
            }
            _ => Err(Error::Unknown { kind: "map", name: spec.into() }),
        }
    }

    pub fn is_real_valued(&self) -> bool {
        self.target.n() == 1
    }

    /// Ahlfors regularity exponent of the target measure.
    pub fn target_dimension(&self) -> usize {
        self.target.q()
    }

    /// Degree `k` with `e_u(delta_r B) = r^k e_u(B)` for balls at the
    /// identity, when the map intertwines dilations with a linear scaling.
    pub fn homogeneity_degree(&self) -> Option<usize> {
        match &self.kind {
            MapKind::Constant { .. } => Some(0),
            MapKind::Homomorphism { hom } => Some(hom.target().q()),
            MapKind::HorizontalQuotient => Some(3),
            MapKind::CoordinateProjection { .. } | MapKind::DistanceToPoint { .. } => None,
        }
    }

    /// True when `e_u(B)` depends on the radius of `B` only: for maps with
    /// `u(c g) = A_c(u(g))`, `A_c` a measure-preserving affine map.
    pub fn radius_only(&self) -> bool {
        match &self.kind {
            MapKind::Constant { .. } | MapKind::Homomorphism { .. } | MapKind::HorizontalQuotient => true,
            MapKind::CoordinateProjection { .. } | MapKind::DistanceToPoint { .. } => false,
        }
    }

    pub fn eval<T: Real>(&self, p: &[T]) -> Pt<T> {
        match &self.kind {
            MapKind::Constant { value } => Pt(value.iter().map(|&v| T::lit(v)).collect()),
            MapKind::CoordinateProjection { indices } => Pt(indices.iter().map(|&i| p[i]).collect()),
            MapKind::Homomorphism { hom } => hom.apply(p),
            MapKind::HorizontalQuotient => Pt(vec![p[1], p[2] + T::lit(0.5) * p[0] * p[1]]),
            MapKind::DistanceToPoint { inner, point } => {
                let m0: Vec<T> = point.iter().map(|&v| T::lit(v)).collect();
                Pt(vec![inner.target.distance(&m0, &inner.eval(p))])
            }
        }
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn coordinate_index(g: &GroupSpec, t: &str) -> Result<usize> {
    let named = match (g.kind(), t) {
        (GroupKind::Heisenberg { m: 1 }, "x") | (GroupKind::Euclidean { .. }, "x") => Some(0),
        (GroupKind::Heisenberg { m: 1 }, "y") | (GroupKind::Euclidean { .. }, "y") => Some(1),
        (GroupKind::Heisenberg { m: 1 }, "z") => Some(2),
        (GroupKind::Euclidean { .. }, "z") => Some(2),
        _ => None,
    };
    match named {
        Some(i) => Ok(i),
        None => t
            .parse::<usize>()
            .map_err(|_| Error::InvalidParameter { name: "map", reason: format!("unknown coordinate `{t}`") }),
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn join_slash(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("/")
}
