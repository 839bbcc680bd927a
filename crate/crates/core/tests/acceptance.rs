//! Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::time::Instant;

use carnot_lab::carnot::{GroupSpec, Pt};
use carnot_lab::config::{parse_region, ExperimentConfig, Operation};
use carnot_lab::energy::MapSpec;
use carnot_lab::measures::PackingParams;
use carnot_lab::packing::{build_greedy_packing, doubling_probe, greedy_pack_candidates, verify_packing, RadiusFn};
use carnot_lab::runner::run;
use carnot_lab::suite::run_suite;
use carnot_lab::theorems::{coarea_check, exponent_bound, group_exponent_bound, pinching_bound, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn result_of(cfg: &ExperimentConfig) -> Result<(Value, Option<bool>), String> {
    let o = run(cfg).map_err(|e| format!("{}: {e}", cfg.operation.name()))?;
    let v: Value = serde_json::from_str(&o.artifacts.json).map_err(|e| e.to_string())?;
    Ok((v["result"].clone(), o.holds))
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn cfg(op: Operation, group: &str, region: Option<&str>, map: Option<&str>) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(op, group);
    c.region = region.map(str::to_string);
    c.map = map.map(str::to_string);
    c
}

fn dimension_suite() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    for (group, region, target, tol) in [
        ("heis1", "horizontal-segment:L=8", 1.0, 0.1),
        ("heis1", "vertical-segment:h=1", 2.0, 0.15),
        ("heis1", "kernel-patch:kernel=1/0/0,lower=0/0,upper=0.5/0.125", 3.0, 0.2),
        ("euclid2", "box:sides=1/1", 2.0, 0.1),
    ] {
        let mut c = cfg(Operation::Dimension, group, Some(region), None);
        c.params.sweep = Some("2..7".into());
        c.params.ell = Some(2.0);
        let start = Instant::now();
        let (r, _) = result_of(&c)?;
        let d = num(&r["dimension"]);
        let secs = start.elapsed().as_secs_f64();
        ok &= (d - target).abs() <= tol && secs <= 300.0;
        lines.push(format!("{group} {} {d:.3} ({secs:.1} s)", region.split(':').next().unwrap_or(region)));
    }
    ensure(ok, lines.join(", "))
}

fn segment_bound() -> Check {
    let g = GroupSpec::heisenberg(1).map_err(|e| e.to_string())?;
    let ell = 2.0;
    let n = doubling_probe(&g, ell, 0.25).map_err(|e| e.to_string())?.multiplicity;
    let (mut packings, mut violations, mut invalid) = (0, 0, 0);
    for length in [1.0, 8.0] {
        let region = parse_region(&g, &format!("horizontal-segment:L={length}")).map_err(|e| e.to_string())?;
        for p in [1.0, 2.0, 4.0] {
            for k in 2..=7 {
                let eps = 0.5f64.powi(k);
                let gp = build_greedy_packing(&g, &region, &RadiusFn, p, eps, n, ell, 0).map_err(|e| e.to_string())?;
                let sum: f64 = gp.family.balls.iter().map(|b| b.radius.powf(p)).sum();
                let bound = 0.5 * n as f64 * length * eps.powf(p - 1.0);
                packings += 1;
                violations += (sum > bound) as usize;
                invalid += (!verify_packing(&gp.family).valid) as usize;
            }
        }
    }
    ensure(violations == 0 && invalid == 0, format!("{packings} packings, N {n}, {violations} violations, {invalid} invalid"))
}

fn coarea() -> Check {
    let g = GroupSpec::heisenberg(1).map_err(|e| e.to_string())?;
    let u = MapSpec::parse(g, "coord:x").map_err(|e| e.to_string())?;
    let region = parse_region(&g, "box:sides=1/1/1").map_err(|e| e.to_string())?;
    let params = PackingParams { n_colors: 7, ell: 1.0, seed: 0 };
    let (mut runs, mut holds, mut recentered, mut within) = (0, 0, 0.0, 0.0);
    let mut worst = 0.0f64;
    for p in [2.0, 4.0] {
        for k in 3..=5 {
            let r = coarea_check(&u, &region, p, &params, 0.5f64.powi(k), 16).map_err(|e| e.to_string())?;
            runs += 1;
            holds += r.holds as usize;
            recentered += r.witnesses["recentered"];
            within += r.witnesses["recentered_within_2B"];
            worst = worst.max(r.lhs / r.rhs);
        }
    }
    ensure(
        holds == runs && within == recentered,
        format!("{holds}/{runs} hold, max lhs/rhs {worst:.4}, {within}/{recentered} recentered balls inside 2B"),
    )
}

fn modulus() -> Check {
    let (r, holds) = result_of(&cfg(Operation::Modulus, "heis1", None, None))?;
    let ok = holds == Some(true)
        && r["tau_stable"] == true
        && r["admissible"] == true
        && r["rhs_positive"] == true
        && num(&r["tau"]).is_finite();
    ensure(
        ok,
        format!(
            "tau {:.4} stable {}, admissible {}, {:.4e} <= {:.4e}",
            num(&r["tau"]),
            r["tau_stable"],
            r["admissible"],
            num(&r["report"]["lhs"]),
            num(&r["report"]["rhs"])
        ),
    )
}

fn holder() -> Check {
    let mut c = cfg(Operation::Holder, "heis1", Some("vertical-segment:h=1"), None);
    c.params.source_group = Some("euclid3".into());
    c.params.ell = Some(2.0);
    c.params.n = Some(82);
    let (r, holds) = result_of(&c)?;
    let w = &r["report"]["witnesses"];
    let (alpha, pairs) = (num(&r["fit"]["alpha"]), r["fit"]["pairs"].as_u64().unwrap_or(0));
    let (ds, dt) = (num(&w["dim_source"]), num(&w["dim_target"]));
    let ok = holds == Some(true)
        && pairs == 10_000
        && (alpha - 0.5).abs() <= 0.02
        && (ds - 1.0).abs() <= 0.1
        && ds >= 0.5 * dt - 0.1
        && num(&w["pulled_back_valid"]) == 1.0;
    ensure(ok, format!("alpha {alpha:.4} on {pairs} pairs, dim_E {ds:.3} >= dim_H/2 {:.3}, pulled back valid {}", dt / 2.0, w["pulled_back_valid"]))
}

fn qs() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    for (group, region, map, n) in [
        ("heis1", "box:sides=1/1/0.25", "dilation:2.5", 1),
        ("heis1", "box:sides=1/1/0.25", "translation:0.3/-1/2", 1),
        ("euclid2", "annulus:inner=1,outer=2", "radial-power:2", 4),
    ] {
        let mut c = cfg(Operation::Qs, group, Some(region), None);
        c.params.qs_map = Some(map.into());
        c.params.n = Some(n);
        let (r, holds) = result_of(&c)?;
        let r = &r["report"];
        let valid = r["image_valid"] == true && r["source_valid"] == true;
        let ratio = num(&r["score_image"]) / num(&r["score_source"]);
        let label = map.split(':').next().unwrap_or(map);
        match r["expected_ratio"].as_f64() {
            Some(e) => {
                let err = (ratio / e - 1.0).abs();
                ok &= valid && holds == Some(true) && err <= 1e-9;
                lines.push(format!("{label} ratio error {err:.1e}"));
            }
            None => {
                ok &= valid && holds == Some(true) && num(&r["ell_target"]) == 1.0;
                lines.push(format!("{label} ell {:.3} -> 1 valid {valid}", num(&r["ell_source"])));
            }
        }
    }
    ensure(ok, lines.join(", "))
}

fn energy_crossings() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    for (map, grid, target, tol) in
        [("coord:x", vec![3.0, 3.5, 4.0, 4.5], 4.0, 0.2), ("quotient-yz", vec![1.0, 1.25, 1.5, 2.0], 4.0 / 3.0, 0.1)]
    {
        let mut c = cfg(Operation::EnergyDim, "heis1", Some("box:sides=1/1/0.25"), Some(map));
        c.params.p_grid = Some(grid);
        c.params.sweep = Some("2..4".into());
        c.params.n = Some(7);
        let (r, _) = result_of(&c)?;
        let x = num(&r["crossing"]);
        ok &= (x - target).abs() <= tol;
        lines.push(format!("{map} crosses at {x:.4}"));
    }
    ensure(ok, lines.join(", "))
}

fn exponent_calculator() -> Check {
    let e = |r: carnot_lab::Result<Rational>| r.map_err(|e| e.to_string());
    let alpha = e(exponent_bound(3, 4, 1))?;
    let delta = pinching_bound(alpha);
    let mut ok = alpha == Rational::new(2, 3) && delta == Rational::new(-4, 9);
    let mut heis = Vec::new();
    for m in 1..=3 {
        let g = GroupSpec::heisenberg(m).map_err(|e| e.to_string())?;
        let b = e(group_exponent_bound(&g))?;
        ok &= b == Rational::new(2 * m as i64, 2 * m as i64 + 1);
        heis.push(b.to_string());
    }
    ensure(ok, format!("alpha <= {alpha}, delta >= {delta}, Heis^1..3: {}", heis.join(" ")))
}

fn oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let radius = 1.0 / 16.0;
    let (mut instances, mut ratio_ok, mut greedy_valid, mut monotone) = (0, 0, 0, 0);
    let mut worst = f64::INFINITY;
    for k in 0..100 {
        let g = if k % 2 == 0 { GroupSpec::heisenberg(1) } else { GroupSpec::euclidean(2) }.map_err(|e| e.to_string())?;
        let count = rng.gen_range(8..=20);
        let centers: Vec<Vec<f64>> = (0..count)
            .map(|_| (0..g.n()).map(|i| rng.gen_range(0.0..if g.weight(i) == 1 { 0.5 } else { 0.1 })).collect())
            .collect();
        let pts: Vec<Pt<f64>> = centers.iter().map(|c| Pt::from_f64(c)).collect();
        let n_colors = rng.gen_range(1..=3);
        let ell = [1.0, 1.5, 2.0][rng.gen_range(0..3)];
        let conflict = common::conflicts(&g, &centers, radius, ell);
        let best = common::exhaustive_optimum(&conflict, n_colors);
        let (chosen, colors) = greedy_pack_candidates(&g, &pts, radius, None, n_colors, ell);
        let valid = chosen.iter().enumerate().all(|(a, &i)| {
            chosen.iter().enumerate().all(|(b, &j)| a == b || colors[a] != colors[b] || !conflict[i][j])
        });
        // Equal radii, so scores are counts times radius^p.
        let ratio = chosen.len() as f64 / best as f64;
        worst = worst.min(ratio);
        instances += 1;
        ratio_ok += (chosen.len() <= best && 4 * chosen.len() >= best) as usize;
        greedy_valid += valid as usize;
        let by_colors: Vec<usize> = (1..=4).map(|n| common::exhaustive_optimum(&conflict, n)).collect();
        let by_ell: Vec<usize> =
            [1.0, 1.5, 2.0, 3.0].iter().map(|&l| common::exhaustive_optimum(&common::conflicts(&g, &centers, radius, l), n_colors)).collect();
        monotone += (by_colors.windows(2).all(|w| w[0] <= w[1]) && by_ell.windows(2).all(|w| w[0] >= w[1])) as usize;
    }
    ensure(
        ratio_ok == instances && greedy_valid == instances && monotone == instances,
        format!("greedy >= optimum/4 in {ratio_ok}/{instances} (worst ratio {worst:.3}), valid {greedy_valid}, monotone {monotone}"),
    )
}

fn determinism() -> Check {
    let a = run_suite("all", 0, 1).map_err(|e| e.to_string())?;
    let b = run_suite("all", 0, 4).map_err(|e| e.to_string())?;
    let files = a.artifacts.len();
    let same = a.artifacts == b.artifacts && a.table() == b.table();
    ensure(same && a.pass(), format!("{files} artifact sets identical {same}, suite pass {}", a.pass()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("dimension suite", dimension_suite),
        ("horizontal segment bound", segment_bound),
        ("coarea inequality", coarea),
        ("modulus estimate", modulus),
        ("Hoelder covariance", holder),
        ("quasisymmetric transport", qs),
        ("energy exponents", energy_crossings),
        ("exponent calculator", exponent_calculator),
        ("oracle equivalence", oracle),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail} [{:.1} s]", k + 1, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
