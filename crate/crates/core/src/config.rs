//! Declarative experiment configuration and the text forms of its pieces.
//!
//! Regions are written `kind:key=value,...` with vectors separated by `/`
//! and matrix rows by `;`, e.g. `vertical-segment:h=1` or
//! `box:corner=0/0/0,sides=1/1/0.25`.

use serde::{Deserialize, Serialize};

use crate::carnot::{GroupSpec, HomHom, Pt, Region};
use crate::error::{Error, Result};
use crate::measures::{BallGauge, Sweep};
use crate::theorems::QsMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operation {
    Dimension,
    Premeasure,
    Cover,
    Energy,
    EnergyDim,
    Coarea,
    Modulus,
    Holder,
    Qs,
    QcCheck,
    Jacobian,
    Bound,
    Doubling,
}

impl Operation {
    pub const ALL: [Operation; 13] = [
        Operation::Dimension,
        Operation::Premeasure,
        Operation::Cover,
        Operation::Energy,
        Operation::EnergyDim,
        Operation::Coarea,
        Operation::Modulus,
        Operation::Holder,
        Operation::Qs,
        Operation::QcCheck,
        Operation::Jacobian,
        Operation::Bound,
        Operation::Doubling,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Operation::Dimension => "dimension",
            Operation::Premeasure => "premeasure",
            Operation::Cover => "cover",
            Operation::Energy => "energy",
            Operation::EnergyDim => "energy-dim",
            Operation::Coarea => "coarea",
            Operation::Modulus => "modulus",
            Operation::Holder => "holder",
            Operation::Qs => "qs",
            Operation::QcCheck => "qc-check",
            Operation::Jacobian => "jacobian",
            Operation::Bound => "bound",
            Operation::Doubling => "doubling",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|op| op.name() == name)
            .ok_or_else(|| Error::Unknown { kind: "operation", name: name.to_string() })
    }
}

/// Operation parameters. Which fields an operation reads is documented on
/// the runner; unused fields are ignored.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    /// Number of color classes `N`; defaults to the doubling probe.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<f64>,
    /// `a..b` for `2^-a .. 2^-b`, or a comma-separated list of meshes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    /// `radius` or `scaled:<k>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_region: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    /// `dilation:<lambda>`, `translation:<a/b/..>` or `radial-power:<s>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qs_map: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell_target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topological_dim: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homogeneous_dim: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_dim: Option<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for artifacts; the runner falls back to `CARNOT_LAB_OUT`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// File stem; defaults to the operation name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub operation: Operation,
    #[serde(default = "default_group")]
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_group() -> String {
    "heis1".into()
}

impl ExperimentConfig {
    pub fn new(operation: Operation, group: &str) -> Self {
        ExperimentConfig {
            operation,
            group: group.into(),
            region: None,
            map: None,
            params: Params::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
            Error::Parse { line, column, message: e.message().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn group_spec(&self) -> Result<GroupSpec> {
        GroupSpec::from_name(&self.group)
    }

    /// Checks that every textual field parses and that the operation has
    /// the inputs it needs.
    pub fn validate(&self) -> Result<()> {
        let g = self.group_spec()?;
        if let Some(r) = &self.region {
            parse_region(&g, r)?;
        }
        if let Some(s) = &self.params.sweep {
            parse_sweep(s)?;
        }
        if let Some(s) = &self.params.gauge {
            parse_gauge(s)?;
        }
        if let Some(s) = &self.params.qs_map {
            parse_qs_map(s)?;
        }
        let need = |present: bool, name: &'static str| {
            if present {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: format!("required by `{}`", self.operation.name()) })
            }
        };
        use Operation::*;
        match self.operation {
            Dimension | Premeasure | Cover | Doubling | Modulus | Bound => {}
            Energy | EnergyDim | Coarea | QcCheck | Jacobian => need(self.map.is_some(), "map")?,
            Holder => need(self.params.source_group.is_some(), "source_group")?,
            Qs => need(self.params.qs_map.is_some(), "qs_map")?,
        }
        match self.operation {
            Dimension | Premeasure | Cover | Energy | EnergyDim | Holder | Qs => need(self.region.is_some(), "region")?,
            Bound => {
                need(self.params.topological_dim.is_some(), "topological_dim")?;
                need(self.params.homogeneous_dim.is_some(), "homogeneous_dim")?;
            }
            _ => {}
        }
        Ok(())
    }

    /// SHA-256 of the canonical TOML form, in hex.
    pub fn hash(&self) -> String {
        crate::output::sha256_hex(&self.to_toml())
    }
}

/// 1-based line and column of a byte offset.
pub fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn num(key: &'static str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidParameter { name: key, reason: format!("not a finite number: `{s}`") })
}

fn vector(key: &'static str, s: &str) -> Result<Vec<f64>> {
    s.split('/').map(|x| num(key, x)).collect()
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("/")
}

/// Parses the text form of a region (see the module docs).
pub fn parse_region(g: &GroupSpec, text: &str) -> Result<Region<f64>> {
    let text = text.trim();
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    let mut fields: Vec<(&str, &str)> = Vec::new();
    for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter { name: "region", reason: format!("expected key=value, got `{item}`") })?;
        fields.push((k.trim(), v.trim()));
    }
    let allowed: &[&str] = match kind {
        "empty" => &[],
        "horizontal-segment" => &["L", "base", "dir"],
        "vertical-segment" => &["h", "base"],
        "box" => &["corner", "sides"],
        "kernel-patch" => &["kernel", "lower", "upper"],
        "annulus" => &["center", "inner", "outer"],
        _ => return Err(Error::Unknown { kind: "region", name: kind.to_string() }),
    };
    if let Some((k, _)) = fields.iter().find(|(k, _)| !allowed.contains(k)) {
        return Err(Error::InvalidParameter { name: "region", reason: format!("unknown key `{k}` for {kind}") });
    }
    let get = |k: &str| fields.iter().find(|(key, _)| *key == k).map(|(_, v)| *v);
    let require = |k: &str| {
        get(k).ok_or_else(|| Error::InvalidParameter { name: "region", reason: format!("{kind} needs `{k}`") })
    };
    let origin = || Pt(vec![0.0; g.n()]);
    let point = |k: &'static str| -> Result<Pt<f64>> { get(k).map_or(Ok(origin()), |v| vector(k, v).map(Pt)) };
    match kind {
        "empty" => Ok(Region::Empty),
        "horizontal-segment" => {
            let mut e1 = vec![0.0; g.horizontal_dim()];
            e1[0] = 1.0;
            let dir = get("dir").map_or(Ok(e1), |v| vector("dir", v))?;
            Region::horizontal_segment(g, point("base")?, dir, num("L", require("L")?)?)
        }
        "vertical-segment" => {
            if g.is_abelian() {
                return Err(Error::Unsupported("vertical segments need a Heisenberg group".into()));
            }
            Region::vertical_segment(g, point("base")?, num("h", require("h")?)?)
        }
        "box" => Region::boxed(g, point("corner")?, vector("sides", require("sides")?)?),
        "kernel-patch" => {
            let rows: Vec<Vec<f64>> = require("kernel")?.split(';').map(|r| vector("kernel", r)).collect::<Result<_>>()?;
            let target = GroupSpec::euclidean(rows.len())?;
            let hom = HomHom::new(*g, target, rows)?;
            Region::kernel_patch(hom, vector("lower", require("lower")?)?, vector("upper", require("upper")?)?)
        }
        "annulus" => {
            let center = get("center").map_or(Ok(Pt(vec![0.0; 2])), |v| vector("center", v).map(Pt))?;
            Region::annulus(g, center, num("inner", require("inner")?)?, num("outer", require("outer")?)?)
        }
        _ => unreachable!(),
    }
}

/// Canonical text form; `parse_region(g, &format_region(r)) == r`.
pub fn format_region(r: &Region<f64>) -> String {
    match r {
        Region::Empty => "empty".into(),
        Region::HorizontalSegment { base, direction, length } => {
            format!("horizontal-segment:L={length},base={},dir={}", join(base), join(direction))
        }
        Region::VerticalSegment { base, height } => format!("vertical-segment:h={height},base={}", join(base)),
        Region::Box { corner, sides } => format!("box:corner={},sides={}", join(corner), join(sides)),
        Region::KernelPatch { hom, lower, upper, .. } => {
            let rows: Vec<String> = hom.matrix().iter().map(|r| join(r)).collect();
            format!("kernel-patch:kernel={},lower={},upper={}", rows.join(";"), join(lower), join(upper))
        }
        Region::Annulus { center, inner, outer } => format!("annulus:center={},inner={inner},outer={outer}", join(center)),
    }
}

/// `a..b` for the dyadic sweep `2^-a .. 2^-b`, or a comma-separated list.
pub fn parse_sweep(text: &str) -> Result<Sweep> {
    if let Some((a, b)) = text.split_once("..") {
        let parse = |s: &str| {
            s.trim()
                .parse::<i32>()
                .map_err(|_| Error::InvalidParameter { name: "sweep", reason: format!("bad exponent `{s}`") })
        };
        let (a, b) = (parse(a)?, parse(b)?);
        if a > b {
            return Err(Error::InvalidParameter { name: "sweep", reason: format!("empty range {a}..{b}") });
        }
        return Ok(Sweep::dyadic(a, b));
    }
    let eps: Vec<f64> = text.split(',').map(|s| num("sweep", s)).collect::<Result<_>>()?;
    if eps.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidParameter { name: "sweep", reason: "meshes must be positive".into() });
    }
    Sweep::new(eps)
}

pub fn parse_gauge(text: &str) -> Result<BallGauge> {
    match text.trim() {
        "radius" => Ok(BallGauge::Radius),
        s => match s.strip_prefix("scaled:") {
            Some(k) => Ok(BallGauge::ScaledRadius(num("gauge", k)?)),
            None => Err(Error::Unknown { kind: "gauge", name: s.to_string() }),
        },
    }
}

pub fn parse_qs_map(text: &str) -> Result<QsMap> {
    let (kind, arg) = text.trim().split_once(':').unwrap_or((text.trim(), ""));
    match kind {
        "dilation" => Ok(QsMap::Dilation { lambda: num("qs_map", arg)? }),
        "translation" => Ok(QsMap::Translation { by: vector("qs_map", arg)? }),
        "radial-power" => Ok(QsMap::RadialPower { s: num("qs_map", arg)? }),
        _ => Err(Error::Unknown { kind: "qs map", name: kind.to_string() }),
    }
}
