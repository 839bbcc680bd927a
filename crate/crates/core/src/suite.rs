//! Named batteries of experiments with a pass/fail summary table.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::config::{ExperimentConfig, Operation};
use crate::error::{Error, Result};
use crate::output::{render_json, sha256_hex, Artifacts, Header, Table};
use crate::runner::{run, Outcome};

pub const SUITES: [&str; 3] = ["examples", "inequalities", "all"];

#[derive(Clone, Debug)]
enum Expect {
    /// `result.<key>` within `tol` of `target`.
    Near { key: &'static str, target: f64, tol: f64 },
    Holds,
    Summary(Vec<String>),
}

#[derive(Clone, Debug)]
struct Case {
    check: String,
    config: ExperimentConfig,
    expect: Expect,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteRow {
    pub check: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub rows: Vec<SuiteRow>,
    /// Per-experiment artifacts followed by the summary.
    pub artifacts: Vec<Artifacts>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Fixed-width text rendering of the summary table.
    pub fn table(&self) -> String {
        let w = self.rows.iter().map(|r| r.check.len()).max().unwrap_or(5).max(5);
        let mut s = format!("{:<w$}  {:<22}  {:<22}  pass\n", "check", "expected", "observed");
        for r in &self.rows {
            s.push_str(&format!("{:<w$}  {:<22}  {:<22}  {}\n", r.check, r.expected, r.observed, r.pass));
        }
        s
    }
}

fn config(op: Operation, group: &str, region: Option<&str>, map: Option<&str>, seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(op, group);
    c.region = region.map(str::to_string);
    c.map = map.map(str::to_string);
    c.params.seed = seed;
    c
}

fn examples(seed: u64) -> Vec<Case> {
    let dim = |check: &str, group: &str, region: &str, target: f64, tol: f64| {
        let mut c = config(Operation::Dimension, group, Some(region), None, seed);
        c.params.sweep = Some("2..7".into());
        c.params.ell = Some(2.0);
        Case { check: check.into(), config: c, expect: Expect::Near { key: "dimension", target, tol } }
    };
    vec![
        dim("dimension heis1 horizontal segment", "heis1", "horizontal-segment:L=8", 1.0, 0.1),
        dim("dimension heis1 vertical segment", "heis1", "vertical-segment:h=1", 2.0, 0.15),
        dim("dimension heis1 kernel patch", "heis1", "kernel-patch:kernel=1/0/0,lower=0/0,upper=0.5/0.125", 3.0, 0.2),
        dim("dimension euclid2 unit square", "euclid2", "box:sides=1/1", 2.0, 0.1),
    ]
}

fn inequalities(seed: u64) -> Vec<Case> {
    let mut cases = Vec::new();
    for p in [2.0, 4.0] {
        let mut c = config(Operation::Coarea, "heis1", Some("box:sides=1/1/1"), Some("coord:x"), seed);
        c.params.p = Some(p);
        c.params.sweep = Some("3..4".into());
        c.params.resolution = Some(16);
        cases.push(Case { check: format!("coarea heis1 x p={p}"), config: c, expect: Expect::Holds });
    }
    cases.push(Case {
        check: "modulus heis1 p=4 ell=2".into(),
        config: config(Operation::Modulus, "heis1", None, None, seed),
        expect: Expect::Holds,
    });
    let mut h = config(Operation::Holder, "heis1", Some("vertical-segment:h=1"), None, seed);
    h.params.source_group = Some("euclid3".into());
    h.params.ell = Some(2.0);
    h.params.n = Some(82);
    cases.push(Case { check: "holder id euclid3 -> heis1".into(), config: h, expect: Expect::Holds });
    for (name, group, region, map, n) in [
        ("qs heis1 dilation", "heis1", "box:sides=1/1/0.25", "dilation:2.5", 1),
        ("qs heis1 translation", "heis1", "box:sides=1/1/0.25", "translation:0.3/-1/2", 1),
        ("qs euclid2 radial power", "euclid2", "annulus:inner=1,outer=2", "radial-power:2", 4),
    ] {
        let mut c = config(Operation::Qs, group, Some(region), None, seed);
        c.params.qs_map = Some(map.into());
        c.params.n = Some(n);
        cases.push(Case { check: name.into(), config: c, expect: Expect::Holds });
    }
    cases
}

fn extras(seed: u64) -> Vec<Case> {
    let mut cases = Vec::new();
    let mut pre = config(Operation::Premeasure, "heis1", Some("horizontal-segment:L=8"), None, seed);
    pre.params.p = Some(2.0);
    pre.params.n = Some(82);
    cases.push(Case { check: "segment packing bound".into(), config: pre, expect: Expect::Holds });
    for (check, map, grid, target, tol) in [
        ("energy crossing x-coordinate", "coord:x", vec![3.0, 3.5, 4.0, 4.5], 4.0, 0.2),
        ("energy crossing yz-quotient", "quotient-yz", vec![1.0, 1.25, 1.5, 2.0], 4.0 / 3.0, 0.1),
    ] {
        let mut c = config(Operation::EnergyDim, "heis1", Some("box:sides=1/1/0.25"), Some(map), seed);
        c.params.p_grid = Some(grid);
        c.params.sweep = Some("2..4".into());
        c.params.n = Some(7);
        cases.push(Case { check: check.into(), config: c, expect: Expect::Near { key: "crossing", target, tol } });
    }
    let mut b = config(Operation::Bound, "heis1", None, None, seed);
    b.params.topological_dim = Some(3);
    b.params.homogeneous_dim = Some(4);
    cases.push(Case { check: "exponent bound (3, 4)".into(), config: b, expect: Expect::Summary(vec!["alpha <= 2/3".into(), "delta >= -4/9".into()]) });
    for m in [2, 3] {
        let mut b = config(Operation::Bound, "heis1", None, None, seed);
        b.params.topological_dim = Some(2 * m + 1);
        b.params.homogeneous_dim = Some(2 * m + 2);
        let line = format!("alpha <= {}/{}", 2 * m, 2 * m + 1);
        cases.push(Case { check: format!("exponent bound heis{m}"), config: b, expect: Expect::Summary(vec![line]) });
    }
    let mut j = config(Operation::Jacobian, "heis1", Some("box:sides=1/1/1"), Some("coord:x"), seed);
    j.params.n = Some(7);
    cases.push(Case { check: "energy vs Jacobian x-coordinate".into(), config: j, expect: Expect::Holds });
    cases
}

fn cases(name: &str, seed: u64) -> Result<Vec<Case>> {
    match name {
        "examples" => Ok(examples(seed)),
        "inequalities" => Ok(inequalities(seed)),
        "all" => Ok([examples(seed), inequalities(seed), extras(seed)].concat()),
        _ => Err(Error::Unknown { kind: "suite", name: name.to_string() }),
    }
}

fn judge(case: &Case, outcome: &Result<Outcome>) -> SuiteRow {
    let expected = match &case.expect {
        Expect::Near { target, tol, .. } => format!("{target:.4} +- {tol}"),
        Expect::Holds => "holds".into(),
        Expect::Summary(lines) => lines.join("; "),
    };
    let (observed, pass) = match outcome {
        Err(e) => (format!("error: {e}"), false),
        Ok(o) => match &case.expect {
            Expect::Near { key, target, tol } => {
                let v = serde_json::from_str::<Value>(&o.artifacts.json)
                    .ok()
                    .and_then(|v| v["result"][*key].as_f64())
                    .unwrap_or(f64::NAN);
                (format!("{v:.4}"), (v - target).abs() <= *tol)
            }
            Expect::Holds => match o.holds {
                Some(true) => ("holds".into(), true),
                Some(false) => ("fails".into(), false),
                None => ("no verdict".into(), false),
            },
            Expect::Summary(lines) => {
                let ok = lines.iter().all(|l| o.summary.iter().any(|s| s == l));
                (o.summary.join("; "), ok)
            }
        },
    };
    SuiteRow { check: case.check.clone(), expected, observed, pass }
}

/// Runs a suite on a pool of `threads` workers (0 for the rayon default).
/// Results are collected in case order, so outputs do not depend on
/// scheduling.
pub fn run_suite(name: &str, seed: u64, threads: usize) -> Result<SuiteReport> {
    let cases = cases(name, seed)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::Io(e.to_string()))?;
    let outcomes: Vec<Result<Outcome>> = pool.install(|| cases.par_iter().map(|c| run(&c.config)).collect());
    let rows: Vec<SuiteRow> = cases.iter().zip(&outcomes).map(|(c, o)| judge(c, o)).collect();
    let mut artifacts = Vec::new();
    for (k, o) in outcomes.into_iter().enumerate() {
        if let Ok(o) = o {
            let mut a = o.artifacts;
            a.stem = format!("suite-{name}-{k:02}-{}", a.stem);
            artifacts.push(a);
        }
    }
    let mut table = Table::new(&["check", "expected", "observed", "pass"]);
    for r in &rows {
        table.push([r.check.clone(), r.expected.clone(), r.observed.clone(), r.pass.to_string()]);
    }
    let all: Vec<String> = cases.iter().map(|c| c.config.to_toml()).collect();
    let header = Header::new(sha256_hex(&all.join("\n")), seed);
    artifacts.push(Artifacts {
        stem: format!("suite-{name}"),
        json: render_json(&header, &serde_json::json!({ "suite": name, "rows": rows, "pass": rows.iter().all(|r| r.pass) }))?,
        csv: Some(table.render(&header)?),
    });
    Ok(SuiteReport { name: name.into(), rows, artifacts })
}
