use super::estimate::energy_estimate;
use super::image::{closed_form_unit, heisenberg_unit_ball_volume, ImageMeasurer};
use super::map::MapSpec;
use crate::carnot::linalg::unit_ball_volume;
use crate::carnot::{GroupKind, GroupSpec, HomHom, Region};
use crate::error::{Error, Result};
use crate::measures::{PackingParams, Sweep};
use crate::theorems::{InequalityReport, ScaleRow};

/// Lebesgue volume of the unit gauge ball.
pub fn unit_gauge_ball_volume(g: &GroupSpec) -> f64 {
    match g.kind() {
        GroupKind::Euclidean { n } => unit_ball_volume(n),
        GroupKind::Heisenberg { m } => heisenberg_unit_ball_volume(m),
    }
}

/// `J(h) = vol(h(beta)) / vol(beta)^(Q / Q')` for a surjective homogeneous
/// homomorphism `h` from a group of dimension `Q'` onto one of dimension `Q`,
/// `beta` the unit ball of the source; `0` when `h` is not surjective.
pub fn jacobian_j(h: &HomHom) -> Result<f64> {
    if !h.is_surjective() {
        return Ok(0.0);
    }
    let map = MapSpec::homomorphism(h.clone());
    let image = match closed_form_unit(&map) {
        Some(v) => v,
        None => ImageMeasurer::new(map, 48)?.raster(&h.source().identity::<f64>(), 1.0)?,
    };
    let (q_src, q_tgt) = (h.source().q() as f64, h.target().q() as f64);
    Ok(image / unit_gauge_ball_volume(h.source()).powf(q_tgt / q_src))
}

/// Constant-differential case of the energy/Jacobian inequality
/// `PE^{Q'/Q}_{g, N, 2 ell}(X') >= C J(g)^{Q'/Q} L(X')`.
///
/// Reports `C = lhs / rhs` per scale; holds when `C > 0` everywhere and its
/// spread over the sweep is at most a factor 2 (trivially when `rhs = 0`).
pub fn pej_check(g: &HomHom, region: &Region<f64>, params: &PackingParams, sweep: &Sweep) -> Result<InequalityReport> {
    if region.tag() != "box" && !region.is_empty() {
        return Err(Error::Unsupported("the energy/Jacobian check takes box regions".into()));
    }
    let p = g.source().q() as f64 / g.target().q() as f64;
    let j = jacobian_j(g)?;
    let rhs = j.powf(p) * region.reference_measure();
    let doubled = PackingParams { ell: 2.0 * params.ell, ..*params };
    let map = MapSpec::homomorphism(g.clone());
    let rows: Vec<ScaleRow> = if region.is_empty() {
        sweep.0.iter().map(|&epsilon| ScaleRow { epsilon, lhs: 0.0, rhs }).collect()
    } else {
        let rep = energy_estimate(&map, region, p, &doubled, sweep, 32)?;
        rep.points.iter().map(|pt| ScaleRow { epsilon: pt.epsilon, lhs: pt.value, rhs }).collect()
    };
    // Reported in "rhs <= lhs" orientation: C * rhs <= lhs.
    let consts: Vec<f64> = rows.iter().map(|r| if rhs > 0.0 { r.lhs / rhs } else { f64::INFINITY }).collect();
    let c_min = consts.iter().cloned().fold(f64::INFINITY, f64::min);
    let c_max = consts.iter().cloned().fold(0.0, f64::max);
    let flipped = rows
        .iter()
        .map(|r| ScaleRow { epsilon: r.epsilon, lhs: if rhs > 0.0 { c_min * rhs } else { 0.0 }, rhs: r.lhs })
        .collect();
    let stable = rhs == 0.0 || (c_min > 0.0 && c_max / c_min <= 2.0);
    Ok(InequalityReport::from_rows("pej", flipped, 0.0)
        .witness("p", p)
        .witness("jacobian", j)
        .witness("C_min", if rhs > 0.0 { c_min } else { 0.0 })
        .witness("C_max", if rhs > 0.0 { c_max } else { 0.0 })
        .require("stable", stable))
}
