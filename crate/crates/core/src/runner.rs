//! Executes an [`ExperimentConfig`] and renders its artifacts.
//!
//! Defaults when a field is absent: `ell = 2` for `dimension`, `premeasure`
//! and `modulus` and `1` elsewhere; `N` is the doubling multiplicity at the
//! separation the operation packs with; the seed is `0`.

use serde::Serialize;
use serde_json::json;

use crate::carnot::{GroupSpec, Pt, Region};
use crate::config::{format_region, parse_gauge, parse_qs_map, parse_region, parse_sweep, ExperimentConfig, Operation};
use crate::energy::{energy_dimension_probe, energy_estimate, jacobian_j, pej_check, MapKind, MapSpec, DEFAULT_RESOLUTION};
use crate::error::{Error, Result};
use crate::measures::{analytic_bound, covering_value, dimension_estimate, loglog_fit, scaling_sweep, BallGauge, PackingParams, ScalingReport, Sweep};
use crate::output::{cell, render_json, Artifacts, Header, Table};
use crate::packing::{doubling_probe, Ball};
use crate::theorems::{
    admissibility_check, coarea_check, empirical_eta, empirical_holder, exponent_bound, holder_covariance_check,
    modulus_lower_bound, modulus_tau, pinching_bound, qc_submersion_check, qs_transport, validate_holder,
    CoordinateIdentity, InequalityReport, SegmentFamily,
};

/// Mesh of the doubling probe used for default `N`.
const DOUBLING_EPS: f64 = 0.25;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub operation: Operation,
    pub artifacts: Artifacts,
    /// Verdict of inequality-type operations.
    pub holds: Option<bool>,
    /// Short human-readable lines.
    pub summary: Vec<String>,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    g: GroupSpec,
    header: Header,
    stem: String,
}

impl<'a> Ctx<'a> {
    fn ell(&self, default: f64) -> f64 {
        self.cfg.params.ell.unwrap_or(default)
    }

    fn n_colors(&self, separation: f64) -> Result<usize> {
        match self.cfg.params.n {
            Some(n) => Ok(n),
            None => Ok(doubling_probe(&self.g, separation, DOUBLING_EPS)?.multiplicity),
        }
    }

    fn params(&self, ell: f64, separation: f64) -> Result<PackingParams> {
        Ok(PackingParams { n_colors: self.n_colors(separation)?, ell, seed: self.cfg.params.seed })
    }

    fn region(&self) -> Result<Region<f64>> {
        match &self.cfg.region {
            Some(r) => parse_region(&self.g, r),
            None => Ok(Region::Empty),
        }
    }

    fn map(&self) -> Result<MapSpec> {
        let m = self.cfg.map.as_deref().ok_or(Error::InvalidParameter { name: "map", reason: "missing".into() })?;
        MapSpec::parse(self.g, m)
    }

    fn sweep(&self, default: Sweep) -> Result<Sweep> {
        self.cfg.params.sweep.as_deref().map_or(Ok(default), parse_sweep)
    }

    /// The sweep if given, else the single mesh `epsilon`, else `default`.
    fn meshes(&self, default: &[f64]) -> Result<Sweep> {
        match (&self.cfg.params.sweep, self.cfg.params.epsilon) {
            (Some(s), _) => parse_sweep(s),
            (None, Some(e)) => Sweep::new(vec![e]),
            (None, None) => Sweep::new(default.to_vec()),
        }
    }

    fn epsilon(&self, default: f64) -> f64 {
        self.cfg.params.epsilon.unwrap_or(default)
    }

    fn gauge(&self, default: BallGauge) -> Result<BallGauge> {
        self.cfg.params.gauge.as_deref().map_or(Ok(default), parse_gauge)
    }

    fn resolution(&self, default: usize) -> usize {
        self.cfg.params.resolution.unwrap_or(default)
    }

    fn finish<S: Serialize>(&self, result: &S, table: Option<Table>, holds: Option<bool>, summary: Vec<String>) -> Result<Outcome> {
        let csv = table.map(|t| t.render(&self.header)).transpose()?;
        Ok(Outcome {
            operation: self.cfg.operation,
            artifacts: Artifacts { stem: self.stem.clone(), json: render_json(&self.header, result)?, csv },
            holds,
            summary,
        })
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let ctx = Ctx {
        cfg,
        g: cfg.group_spec()?,
        header: Header::new(cfg.hash(), cfg.params.seed),
        stem: cfg.output.stem.clone().unwrap_or_else(|| cfg.operation.name().to_string()),
    };
    match cfg.operation {
        Operation::Dimension => dimension(&ctx),
        Operation::Premeasure => premeasure(&ctx),
        Operation::Cover => cover(&ctx),
        Operation::Energy => energy(&ctx),
        Operation::EnergyDim => energy_dim(&ctx),
        Operation::Coarea => coarea(&ctx),
        Operation::Modulus => modulus(&ctx),
        Operation::Holder => holder(&ctx),
        Operation::Qs => qs(&ctx),
        Operation::QcCheck => qc(&ctx),
        Operation::Jacobian => jacobian(&ctx),
        Operation::Bound => bound(&ctx),
        Operation::Doubling => doubling(&ctx),
    }
}

fn scaling_table(r: &ScalingReport, region: &str) -> Table {
    let mut t = Table::new(&["epsilon", "value", "p", "N", "ell", "region", "gauge"]);
    for pt in &r.points {
        t.push([
            cell(pt.epsilon),
            cell(pt.value),
            cell(r.p),
            r.params.n_colors.to_string(),
            cell(r.params.ell),
            region.to_string(),
            r.gauge.clone(),
        ]);
    }
    t
}

fn scaling_json(r: &ScalingReport) -> serde_json::Value {
    json!({
        "fitted_exponent": r.fitted_exponent(),
        "r2": r.fit.r2,
        "dimension": r.dimension,
        "reliable": r.reliable,
        "report": r,
    })
}

fn dimension(ctx: &Ctx) -> Result<Outcome> {
    let region = ctx.region()?;
    let ell = ctx.ell(2.0);
    let params = ctx.params(ell, ell)?;
    let r = dimension_estimate(&ctx.g, &region, &params, &ctx.sweep(Sweep::default())?, ctx.cfg.params.p.unwrap_or(1.0))?;
    let summary = vec![format!(
        "dimension {:.4} (slope {:.4}, r2 {:.4}, N {}, ell {})",
        r.dimension.unwrap_or(f64::NAN),
        r.fit.slope,
        r.fit.r2,
        params.n_colors,
        ell
    )];
    ctx.finish(&scaling_json(&r), Some(scaling_table(&r, &format_region(&region))), None, summary)
}

fn premeasure(ctx: &Ctx) -> Result<Outcome> {
    let region = ctx.region()?;
    let ell = ctx.ell(2.0);
    let params = ctx.params(ell, ell)?;
    let p = ctx.cfg.params.p.unwrap_or(1.0);
    let gauge = ctx.gauge(BallGauge::Radius)?;
    let r = scaling_sweep(&ctx.g, &region, &gauge, p, &ctx.sweep(Sweep::default())?, &params)?;
    let mut t = scaling_table(&r, &format_region(&region));
    t.columns.push("bound".into());
    let mut violations = 0usize;
    let mut bounded = false;
    for (row, pt) in t.rows.iter_mut().zip(&r.points) {
        let b = match gauge {
            BallGauge::Radius => analytic_bound(&ctx.g, &region, p, pt.epsilon, params.n_colors)?,
            _ => None,
        };
        match b {
            Some(b) => {
                bounded = true;
                violations += (pt.value > b.value * (1.0 + 1e-9)) as usize;
                row.push(cell(b.value));
            }
            None => row.push(String::new()),
        }
    }
    let holds = bounded.then_some(violations == 0);
    let mut summary = vec![format!("fitted exponent {:.4} (r2 {:.4})", r.fit.slope, r.fit.r2)];
    if bounded {
        summary.push(format!("analytic bound violations: {violations}"));
    }
    let json = json!({ "fitted_exponent": r.fit.slope, "r2": r.fit.r2, "bound_violations": bounded.then_some(violations), "report": r });
    ctx.finish(&json, Some(t), holds, summary)
}

fn cover(ctx: &Ctx) -> Result<Outcome> {
    let region = ctx.region()?;
    let gauge = ctx.gauge(BallGauge::Radius)?;
    let p = ctx.cfg.params.p.unwrap_or(1.0);
    let sweep = ctx.sweep(Sweep::default())?;
    let mut t = Table::new(&["epsilon", "value", "p", "region", "gauge"]);
    let mut values = Vec::new();
    for &eps in &sweep.0 {
        let v = covering_value(&ctx.g, &region, &gauge, p, eps)?;
        t.push([cell(eps), cell(v), cell(p), format_region(&region), gauge.label()]);
        values.push(v);
    }
    let fit = loglog_fit(&sweep.0, &values)?;
    let summary = vec![format!("covering values scale with exponent {:.4}", fit.slope)];
    ctx.finish(&json!({ "epsilon": sweep.0, "values": values, "fit": fit, "p": p }), Some(t), None, summary)
}

fn energy(ctx: &Ctx) -> Result<Outcome> {
    let (u, region) = (ctx.map()?, ctx.region()?);
    let ell = ctx.ell(1.0);
    let params = ctx.params(ell, ell)?;
    let p = ctx.cfg.params.p.unwrap_or(ctx.g.q() as f64);
    let r = energy_estimate(&u, &region, p, &params, &ctx.sweep(Sweep::dyadic(2, 4))?, ctx.resolution(DEFAULT_RESOLUTION))?;
    let summary = vec![format!("energy exponent {:.4} at p = {p} (r2 {:.4})", r.fit.slope, r.fit.r2)];
    ctx.finish(&scaling_json(&r), Some(scaling_table(&r, &format_region(&region))), None, summary)
}

fn energy_dim(ctx: &Ctx) -> Result<Outcome> {
    let (u, region) = (ctx.map()?, ctx.region()?);
    let ell = ctx.ell(1.0);
    let params = ctx.params(ell, ell)?;
    let grid = ctx.cfg.params.p_grid.clone().unwrap_or_else(|| vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    let r = energy_dimension_probe(&u, &region, &grid, &params, &ctx.sweep(Sweep::dyadic(2, 4))?, ctx.resolution(DEFAULT_RESOLUTION))?;
    let mut t = Table::new(&["p", "exponent", "r2"]);
    for ((p, e), f) in r.p_grid.iter().zip(&r.exponents).zip(&r.fits) {
        t.push([cell(*p), cell(*e), cell(f.r2)]);
    }
    let summary = vec![format!("energy exponent crosses zero at p = {:.4}", r.crossing)];
    ctx.finish(&r, Some(t), None, summary)
}

fn inequality_table(reports: &[InequalityReport]) -> Table {
    let mut t = Table::new(&["name", "epsilon", "lhs", "rhs", "holds"]);
    for r in reports {
        for row in &r.breakdown {
            t.push([r.name.clone(), cell(row.epsilon), cell(row.lhs), cell(row.rhs), r.holds.to_string()]);
        }
    }
    t
}

fn coarea(ctx: &Ctx) -> Result<Outcome> {
    let (u, region) = (ctx.map()?, ctx.region()?);
    let ell = ctx.ell(1.0);
    let params = ctx.params(ell, ell)?;
    let p = ctx.cfg.params.p.unwrap_or(2.0);
    let resolution = ctx.resolution(16);
    let reports: Vec<InequalityReport> = ctx
        .meshes(&[0.125])?
        .0
        .iter()
        .map(|&eps| coarea_check(&u, &region, p, &params, eps, resolution))
        .collect::<Result<_>>()?;
    let holds = reports.iter().all(|r| r.holds);
    let summary = reports
        .iter()
        .map(|r| {
            format!(
                "coarea eps {}: lhs {:.6e} <= rhs {:.6e}: {}",
                r.breakdown.first().map_or(f64::NAN, |b| b.epsilon),
                r.lhs,
                r.rhs,
                r.holds
            )
        })
        .collect();
    ctx.finish(&json!({ "holds": holds, "p": p, "reports": reports }), Some(inequality_table(&reports)), Some(holds), summary)
}

/// Balls of radii `r, r/2, r/4` at `center`.
fn halving(center: &Pt<f64>, r: f64) -> Vec<Ball<f64>> {
    (0..3).map(|k| Ball::new(center.clone(), r / f64::from(1 << k))).collect()
}

fn stable(taus: &[f64]) -> bool {
    taus.iter().all(|t| t.is_finite() && *t > 0.0) && taus.windows(2).all(|w| (w[1] / w[0] - 1.0).abs() <= 0.1)
}

fn modulus(ctx: &Ctx) -> Result<Outcome> {
    let g = ctx.g;
    let p = ctx.cfg.params.p.unwrap_or(g.q() as f64);
    let ell = ctx.ell(2.0);
    let params = ctx.params(ell, 2.0 * ell)?;
    let eps = ctx.epsilon(0.125);
    let length = ctx.cfg.params.length.unwrap_or(1.0);
    let k = g.n() - 1;
    let lower = ctx.cfg.params.lower.clone().unwrap_or_else(|| vec![0.0; k]);
    let upper = ctx
        .cfg
        .params
        .upper
        .clone()
        .unwrap_or_else(|| (1..g.n()).map(|i| if g.weight(i) == 1 { 0.25 } else { 0.0625 }).collect());
    let family = SegmentFamily::new(g, length, lower.clone(), upper.clone())?;
    let per_axis = ctx.cfg.params.per_axis.unwrap_or(64);
    let mid: Vec<f64> = lower.iter().zip(&upper).map(|(a, b)| 0.5 * (a + b)).collect();
    let start = family.base(&mid);
    let mut half = vec![0.0; g.n()];
    half[0] = 0.5 * length;
    let middle = g.product(&start, &half);
    let interior = modulus_tau(&family, p, ell, &halving(&middle, eps / 2.0), per_axis)?;
    let end = modulus_tau(&family, p, ell, &halving(&start, eps / 2.0), per_axis)?;
    let tau_stable = stable(&interior.per_ball) && stable(&end.per_ball);
    let tau = interior.per_ball.iter().chain(&end.per_ball).cloned().fold(0.0, f64::max);
    let phi = ctx.gauge(BallGauge::ScaledRadius(2.0))?;
    let admissible = admissibility_check(&family, &phi, eps, per_axis.min(16))?;
    let report = modulus_lower_bound(&family, &phi, p, &params, eps, tau, per_axis)?
        .witness("tau_interior_max", interior.tau)
        .witness("tau_end_max", end.tau)
        .require("tau_stable", tau_stable)
        .require("admissible", admissible)
        .require("rhs_positive", true);
    let positive = report.rhs > 0.0;
    let holds = report.holds && positive;
    let summary = vec![
        format!("tau interior {:?}", interior.per_ball),
        format!("tau end {:?}", end.per_ball),
        format!("admissible {admissible}; lower bound {:.6e} <= {:.6e}", report.lhs, report.rhs),
        format!("verdict {holds}"),
    ];
    let json = json!({
        "family": family,
        "p": p,
        "tau": tau,
        "tau_interior": interior,
        "tau_end": end,
        "tau_stable": tau_stable,
        "admissible": admissible,
        "rhs_positive": positive,
        "report": report,
        "holds": holds,
    });
    ctx.finish(&json, Some(inequality_table(std::slice::from_ref(&report))), Some(holds), summary)
}

/// The same point set described in the coordinates of another geometry
/// on `R^n`; the source must be Euclidean unless both groups agree.
pub fn same_points(source: &GroupSpec, target: &GroupSpec, r: &Region<f64>) -> Result<Region<f64>> {
    if source == target {
        return Ok(r.clone());
    }
    if !source.is_abelian() {
        return Err(Error::Unsupported("region transfer needs a Euclidean source".into()));
    }
    let n = source.n();
    match r {
        Region::Empty => Ok(Region::Empty),
        Region::Box { corner, sides } => Region::boxed(source, corner.clone(), sides.clone()),
        Region::VerticalSegment { base, height } => {
            let mut dir = vec![0.0; n];
            dir[n - 1] = 1.0;
            Region::horizontal_segment(source, base.clone(), dir, *height)
        }
        Region::HorizontalSegment { base, direction, length } => {
            // base . (t d) moves linearly in t, with vertical rate omega(b, d) / 2.
            let mut step = direction.clone();
            step.push(0.0);
            step.resize(n, 0.0);
            let moved = target.product(base, &step);
            let dir: Vec<f64> = moved.0.iter().zip(&base.0).map(|(a, b)| a - b).collect();
            let norm = dir.iter().map(|a| a * a).sum::<f64>().sqrt();
            Region::horizontal_segment(source, base.clone(), dir, length * norm)
        }
        _ => Err(Error::Unsupported(format!("give `source_region` for {} regions", r.tag()))),
    }
}

/// Bounding box of a region's lattice sample at step `eps`.
fn bounding_box(g: &GroupSpec, region: &Region<f64>, eps: f64, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let pts = region.sample(g, eps, seed)?;
    let n = g.n();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for p in &pts {
        for i in 0..n {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    if pts.is_empty() {
        return Ok((vec![0.0; n], vec![1.0; n]));
    }
    let sides = lo.iter().zip(&hi).map(|(a, b)| b - a).collect();
    Ok((lo, sides))
}

fn holder(ctx: &Ctx) -> Result<Outcome> {
    let target = ctx.g;
    let source = GroupSpec::from_name(ctx.cfg.params.source_group.as_deref().unwrap_or("euclid3"))?;
    let f = CoordinateIdentity::new(source, target)?;
    let target_region = ctx.region()?;
    let source_region = match &ctx.cfg.params.source_region {
        Some(s) => parse_region(&source, s)?,
        None => same_points(&source, &target, &target_region)?,
    };
    let alpha = ctx.cfg.params.alpha.unwrap_or(0.5);
    let eps = ctx.epsilon(1.0 / 32.0);
    let seed = ctx.cfg.params.seed;
    // Pairs are drawn around the region, padded to unit scale.
    let (mut corner, mut sides) = bounding_box(&target, &target_region, eps, seed)?;
    for (c, s) in corner.iter_mut().zip(sides.iter_mut()) {
        *c -= 0.5;
        *s += 1.0;
    }
    let fit = empirical_holder(&f, alpha, &corner, &sides, 10_000, 10, seed)?;
    let c = ctx.cfg.params.constant.unwrap_or(1.1 * fit.constant);
    validate_holder(&f, alpha, c, &corner, &sides, seed.wrapping_add(1))?;
    let ell = ctx.ell(1.0);
    let params = ctx.params(ell, ell)?;
    let p = ctx.cfg.params.p.unwrap_or(2.0);
    let sweep = ctx.sweep(Sweep::dyadic(2, 6))?;
    let report = holder_covariance_check(&f, alpha, c, &source_region, &target_region, p, &params, eps, &sweep)?
        .witness("alpha_empirical", fit.alpha)
        .require("alpha_matches", (fit.alpha - alpha).abs() <= 0.02);
    let summary = vec![
        format!("empirical alpha {:.4}, C {:.4}", fit.alpha, c),
        format!(
            "dim source {:.4} >= alpha * dim target {:.4}",
            report.witnesses["dim_source"],
            alpha * report.witnesses["dim_target"]
        ),
        format!("identity {:.12e} = {:.12e}: {}", report.lhs, report.rhs, report.holds),
    ];
    let holds = report.holds;
    ctx.finish(&json!({ "fit": fit, "report": report }), Some(inequality_table(std::slice::from_ref(&report))), Some(holds), summary)
}

fn qs(ctx: &Ctx) -> Result<Outcome> {
    let region = ctx.region()?;
    let f = parse_qs_map(ctx.cfg.params.qs_map.as_deref().unwrap_or_default())?;
    let eps = ctx.epsilon(0.125);
    let seed = ctx.cfg.params.seed;
    let (corner, sides) = bounding_box(&ctx.g, &region, eps, seed)?;
    let eta = empirical_eta(&f, &ctx.g, &corner, &sides, 10_000, 0.1, seed)?;
    let params = PackingParams { n_colors: ctx.cfg.params.n.unwrap_or(1), ell: 1.0, seed };
    let ell_target = ctx.cfg.params.ell_target.unwrap_or(1.0);
    let r = qs_transport(&f, &eta, &ctx.g, &region, ell_target, ctx.cfg.params.p.unwrap_or(2.0), &params, eps)?;
    let summary = vec![format!(
        "ell {:.4} -> ell' {}: {} balls, image valid {}, score ratio {:.12}",
        r.ell_source,
        r.ell_target,
        r.balls,
        r.image_valid,
        r.score_image / r.score_source
    )];
    let holds = r.holds;
    ctx.finish(&json!({ "eta": eta, "report": r }), None, Some(holds), summary)
}

fn qc(ctx: &Ctx) -> Result<Outcome> {
    let (u, region) = (ctx.map()?, ctx.region()?);
    let eps = ctx.epsilon(0.25);
    let balls: Vec<Ball<f64>> =
        region.sample(&ctx.g, eps, ctx.cfg.params.seed)?.into_iter().map(|c| Ball::new(c, eps / 2.0)).collect();
    let lambdas = ctx.cfg.params.lambdas.clone().unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0]);
    let r = qc_submersion_check(&u, &balls, &lambdas, ctx.resolution(16))?;
    let mut t = Table::new(&["lambda", "eta"]);
    for (l, e) in r.lambdas.iter().zip(&r.eta) {
        t.push([cell(*l), cell(*e)]);
    }
    let summary = vec![format!("eta over {} balls: {:?}", r.balls, r.eta)];
    let holds = r.holds;
    ctx.finish(&r, Some(t), Some(holds), summary)
}

fn jacobian(ctx: &Ctx) -> Result<Outcome> {
    let u = ctx.map()?;
    let hom = match &u.kind {
        MapKind::Homomorphism { hom } => hom.clone(),
        _ => return Err(Error::InvalidParameter { name: "map", reason: "the Jacobian needs a homomorphism".into() }),
    };
    let j = jacobian_j(&hom)?;
    let mut summary = vec![format!("J = {j:.6}")];
    if ctx.cfg.region.is_none() {
        return ctx.finish(&json!({ "map": u.to_string(), "jacobian": j }), None, None, summary);
    }
    let region = ctx.region()?;
    let ell = ctx.ell(1.0);
    let params = ctx.params(ell, ell)?;
    let r = pej_check(&hom, &region, &params, &ctx.sweep(Sweep::dyadic(2, 4))?)?;
    summary.push(format!("energy bound: {:.6e} <= {:.6e}: {}", r.lhs, r.rhs, r.holds));
    let holds = r.holds;
    ctx.finish(&json!({ "map": u.to_string(), "jacobian": j, "report": r }), Some(inequality_table(std::slice::from_ref(&r))), Some(holds), summary)
}

fn bound(ctx: &Ctx) -> Result<Outcome> {
    let p = &ctx.cfg.params;
    let (n, q) = (p.topological_dim.unwrap_or_default(), p.homogeneous_dim.unwrap_or_default());
    let alpha = exponent_bound(n, q, p.fiber_dim.unwrap_or(1))?;
    let delta = pinching_bound(alpha);
    let value = |r: &crate::theorems::Rational| *r.numer() as f64 / *r.denom() as f64;
    let summary = vec![format!("alpha <= {alpha}"), format!("delta >= {delta}")];
    let json = json!({
        "n": n,
        "Q": q,
        "alpha_bound": alpha.to_string(),
        "alpha_bound_value": value(&alpha),
        "pinching_bound": delta.to_string(),
        "pinching_bound_value": value(&delta),
    });
    ctx.finish(&json, None, None, summary)
}

fn doubling(ctx: &Ctx) -> Result<Outcome> {
    let ell = ctx.ell(1.0);
    let eps = ctx.epsilon(DOUBLING_EPS);
    let r = doubling_probe(&ctx.g, ell, eps)?;
    let summary = vec![format!("N({ell}) = {} on {}", r.multiplicity, ctx.g.name())];
    ctx.finish(&json!({ "group": ctx.g.name(), "ell": ell, "epsilon": eps, "report": r }), None, None, summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml(text).unwrap()
    }

    #[test]
    fn bound_prints_exact_fractions() {
        let o = run(&cfg("operation = \"bound\"\n[params]\ntopological_dim = 3\nhomogeneous_dim = 4\n")).unwrap();
        assert_eq!(o.summary, vec!["alpha <= 2/3", "delta >= -4/9"]);
        assert!(o.artifacts.json.contains("\"alpha_bound\": \"2/3\""));
        assert!(o.artifacts.json.contains("\"config_hash\""));
    }

    #[test]
    fn coarea_on_empty_region() {
        let o = run(&cfg("operation = \"coarea\"\nmap = \"coord:x\"\n[params]\np = 4.0\nn = 1\n")).unwrap();
        assert_eq!(o.holds, Some(true));
        assert!(o.artifacts.json.contains("\"lhs\": 0.0"));
    }

    #[test]
    fn same_points_transfers_segments() {
        let h = GroupSpec::heisenberg(1).unwrap();
        let e = GroupSpec::euclidean(3).unwrap();
        let seg = Region::horizontal_segment(&h, Pt(vec![0.0, 1.0, 0.0]), vec![1.0, 0.0], 2.0).unwrap();
        let moved = same_points(&e, &h, &seg).unwrap();
        let stretch = moved.curve_length().unwrap() / 2.0;
        for t in [0.0, 0.5, 2.0] {
            let on_h = seg.curve_point(&h, t).unwrap();
            let on_e = moved.curve_point(&e, t * stretch).unwrap();
            for (a, b) in on_h.0.iter().zip(&on_e.0) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identical_configs_give_identical_bytes() {
        let c = cfg("operation = \"premeasure\"\nregion = \"horizontal-segment:L=1\"\n[params]\np = 2.0\nn = 1\nsweep = \"2..4\"\n");
        let (a, b) = (run(&c).unwrap(), run(&c).unwrap());
        assert_eq!(a.artifacts, b.artifacts);
        assert_eq!(a.holds, Some(true));
    }
}
