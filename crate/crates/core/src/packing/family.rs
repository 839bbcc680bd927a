use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ball::Ball;
use super::grid::SpatialIndex;
use crate::carnot::{GroupSpec, Pt};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A colored ball family claimed to be an `(N, ell)`-packing of mesh `mesh`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingFamily<T> {
    pub group: GroupSpec,
    pub balls: Vec<Ball<T>>,
    pub colors: Vec<usize>,
    /// Multiplicity parameter `N`.
    pub n_colors: usize,
    pub ell: T,
    pub mesh: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Violation<T> {
    /// Same color, and `distance <= ell (r_i + r_j)`.
    Overlap { i: usize, j: usize, distance: T, required: T },
    RadiusExceedsMesh { i: usize, radius: T },
    ColorOutOfRange { i: usize, color: usize },
    LengthMismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict<T> {
    pub valid: bool,
    pub violation: Option<Violation<T>>,
}

impl<T: Real> PackingFamily<T> {
    pub fn empty(group: GroupSpec, n_colors: usize, ell: T, mesh: T) -> Self {
        PackingFamily { group, balls: vec![], colors: vec![], n_colors, ell, mesh }
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// `sum_i phi(B_i)^p`.
    pub fn score<F: Fn(&Ball<T>) -> T>(&self, phi: F, p: T) -> T {
        self.balls.iter().map(|b| phi(b).powf(p)).sum()
    }

    pub fn radius_score(&self, p: T) -> T {
        self.score(|b| b.radius, p)
    }
}

/// Checks every packing invariant; reports the first violation found.
///
/// Disjointness is exact on stored coordinates: same-colored centers must
/// satisfy `d > ell (r_i + r_j)`. Pairs are enumerated through a grid hash.
pub fn verify_packing<T: Real>(fam: &PackingFamily<T>) -> Verdict<T> {
    let bad = |v| Verdict { valid: false, violation: Some(v) };
    if fam.balls.len() != fam.colors.len() {
        return bad(Violation::LengthMismatch);
    }
    let half_mesh = fam.mesh / T::lit(2.0);
    for (i, b) in fam.balls.iter().enumerate() {
        if !(b.radius >= T::zero()) || b.radius > half_mesh * (T::one() + T::lit(1e-12)) {
            return bad(Violation::RadiusExceedsMesh { i, radius: b.radius });
        }
        if fam.colors[i] >= fam.n_colors {
            return bad(Violation::ColorOutOfRange { i, color: fam.colors[i] });
        }
    }
    if fam.balls.is_empty() {
        return Verdict { valid: true, violation: None };
    }
    let r_max = fam.balls.iter().map(|b| b.radius).fold(T::zero(), T::max);
    let reach = fam.ell * (r_max + r_max);
    let mut classes: Vec<Vec<usize>> = vec![vec![]; fam.n_colors];
    for (i, &c) in fam.colors.iter().enumerate() {
        classes[c].push(i);
    }
    for members in classes.iter().filter(|m| m.len() > 1) {
        let mut idx = SpatialIndex::new(fam.group, reach);
        for &i in members {
            idx.insert(&fam.balls[i].center);
        }
        for (local_i, &i) in members.iter().enumerate() {
            let bi = &fam.balls[i];
            let query = fam.ell * (bi.radius + r_max);
            let mut found = None;
            idx.for_each_within(&bi.center, query, |local_j, d| {
                if local_j == local_i || found.is_some() {
                    return;
                }
                let j = members[local_j];
                let required = fam.ell * (bi.radius + fam.balls[j].radius);
                if d <= required {
                    found = Some(Violation::Overlap { i: i.min(j), j: i.max(j), distance: d, required });
                }
            });
            if let Some(v) = found {
                return bad(v);
            }
        }
    }
    Verdict { valid: true, violation: None }
}

/// Line-oriented text form: a header line then `color c_1 .. c_n radius` per ball.
///
/// ```text
/// # packing group=heis1 N=3 ell=2 epsilon=0.125 balls=2
/// 0 0.0625 0 0 0.0625
/// 1 0.1875 0 0 0.0625
/// ```
pub fn write_packing<T: Real>(fam: &PackingFamily<T>) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# packing group={} N={} ell={} epsilon={} balls={}",
        fam.group.name(),
        fam.n_colors,
        fam.ell,
        fam.mesh,
        fam.balls.len()
    );
    for (b, c) in fam.balls.iter().zip(&fam.colors) {
        let _ = write!(s, "{c}");
        for x in b.center.iter() {
            let _ = write!(s, " {x}");
        }
        let _ = writeln!(s, " {}", b.radius);
    }
    s
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

pub fn parse_packing<T: Real>(text: &str) -> Result<PackingFamily<T>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, 1, "missing header"))?;
    let body = header
        .strip_prefix("# packing")
        .ok_or_else(|| parse_err(1, 1, "header must start with `# packing`"))?;
    let (mut group, mut n, mut ell, mut eps, mut count) = (None, None, None, None, None);
    for field in body.split_whitespace() {
        let column = header.find(field).map_or(1, |c| c + 1);
        let (k, v) = field.split_once('=').ok_or_else(|| parse_err(1, column, format!("bad field `{field}`")))?;
        let num_err = |_| parse_err(1, column, format!("bad value for `{k}`"));
        match k {
            "group" => group = Some(GroupSpec::from_name(v)?),
            "N" => n = Some(v.parse::<usize>().map_err(|_| parse_err(1, column, "bad N"))?),
            "ell" => ell = Some(v.parse::<T>().map_err(num_err)?),
            "epsilon" => eps = Some(v.parse::<T>().map_err(num_err)?),
            "balls" => count = Some(v.parse::<usize>().map_err(|_| parse_err(1, column, "bad ball count"))?),
            _ => return Err(parse_err(1, column, format!("unknown key `{k}`"))),
        }
    }
    let group = group.ok_or_else(|| parse_err(1, 1, "missing group"))?;
    let mut fam = PackingFamily::empty(
        group,
        n.ok_or_else(|| parse_err(1, 1, "missing N"))?,
        ell.ok_or_else(|| parse_err(1, 1, "missing ell"))?,
        eps.ok_or_else(|| parse_err(1, 1, "missing epsilon"))?,
    );
    for (lineno, line) in lines {
        let line_no = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != group.n() + 2 {
            return Err(parse_err(line_no, 1, format!("expected {} fields, got {}", group.n() + 2, tokens.len())));
        }
        let column_of = |k: usize| line.find(tokens[k]).map_or(1, |c| c + 1);
        let color = tokens[0].parse::<usize>().map_err(|_| parse_err(line_no, 1, "bad color"))?;
        let mut nums = Vec::with_capacity(group.n() + 1);
        for k in 1..tokens.len() {
            nums.push(tokens[k].parse::<T>().map_err(|_| parse_err(line_no, column_of(k), "bad number"))?);
        }
        let radius = nums.pop().expect("radius field");
        fam.balls.push(Ball::new(Pt(nums), radius));
        fam.colors.push(color);
    }
    if let Some(c) = count {
        if c != fam.balls.len() {
            return Err(parse_err(1, 1, format!("header announces {c} balls, found {}", fam.balls.len())));
        }
    }
    Ok(fam)
}
