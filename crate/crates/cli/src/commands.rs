//! One function per subcommand, each turning parsed arguments into a
//! [`Report`].

use polcorr_core::bell::TERM_LABELS;
use polcorr_core::closed_form::{joint, marginal, quadruple, statistical_dependence_gap, Which};
use polcorr_core::integrals::quadruple_angles;
use polcorr_core::montecarlo::estimate_s_sharded;
use polcorr_core::oracle::{run_oracle, OracleLevel, OracleTolerances};
use polcorr_core::search::{search as run_search, violation_frontier, Direction, Frontier};
use polcorr_core::{
    s_beta_scan, s_statistic, AngleQuad, Beta, Objective, ProcessKind, RngSeed, SearchConfig,
};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{Cell, Manifest, Report, Table};
use crate::{
    BellArgs, FrontierArg, LevelArg, ObjectiveArg, OracleArgs, ProbArgs, ScanArgs, SearchArgs,
    SimulateArgs,
};

const OUTCOME_LABELS: [&str; 4] = ["AA", "OA", "AO", "OO"];

fn process(n: u8) -> Result<ProcessKind, CliError> {
    Ok(ProcessKind::from_number(n)?)
}

fn beta(b: f64) -> Result<Beta, CliError> {
    Beta::new(b).map_err(|_| CliError::Input(format!("beta must lie in [0, 1], got {b}")))
}

fn finite_angle(name: &str, deg: f64) -> Result<f64, CliError> {
    if deg.is_finite() {
        Ok(deg.to_radians())
    } else {
        Err(CliError::Input(format!("{name} must be finite, got {deg}")))
    }
}

fn quad(deg: &[f64]) -> Result<AngleQuad, CliError> {
    let arr: [f64; 4] = deg.try_into().map_err(|_| {
        CliError::Input(format!(
            "--angles takes exactly four values, got {}",
            deg.len()
        ))
    })?;
    for (i, d) in arr.iter().enumerate() {
        finite_angle(&format!("angle {}", i + 1), *d)?;
    }
    Ok(AngleQuad::from_degrees(arr))
}

fn quad_json(q: AngleQuad) -> Value {
    json!({ "degrees": q.to_degrees(), "radians": q.to_array() })
}

pub fn prob(a: &ProbArgs) -> Result<Report, CliError> {
    let p = process(a.common.process)?;
    let b = beta(a.common.beta)?;
    let chi1 = finite_angle("chi1", a.chi1)?;
    let chi2 = finite_angle("chi2", a.chi2)?;

    let j = joint(p, b, chi1, chi2).value;
    let m1 = marginal(p, b, chi1, Which::First).value;
    let m2 = marginal(p, b, chi2, Which::Second).value;
    let gap = statistical_dependence_gap(p, b, chi1, chi2);
    let quadr = quadruple(p, b, chi1, chi2);
    let angles = quadruple_angles(chi1, chi2);

    let mut table = Table::new(&["quantity", "chi1_deg", "chi2_deg", "value"]);
    table.push(vec![
        Cell::text("joint"),
        Cell::Num(a.chi1),
        Cell::Num(a.chi2),
        Cell::Num(j),
    ]);
    table.push(vec![
        Cell::text("marginal_first"),
        Cell::Num(a.chi1),
        Cell::Empty,
        Cell::Num(m1),
    ]);
    table.push(vec![
        Cell::text("marginal_second"),
        Cell::Empty,
        Cell::Num(a.chi2),
        Cell::Num(m2),
    ]);
    table.push(vec![
        Cell::text("dependence_gap"),
        Cell::Num(a.chi1),
        Cell::Num(a.chi2),
        Cell::Num(gap),
    ]);
    let mut outcomes = Vec::new();
    for ((label, (x1, x2)), v) in OUTCOME_LABELS.iter().zip(angles).zip(quadr) {
        table.push(vec![
            Cell::text(format!("outcome_{label}")),
            Cell::Num(x1.to_degrees()),
            Cell::Num(x2.to_degrees()),
            Cell::Num(v),
        ]);
        outcomes.push(json!({
            "outcome": label,
            "chi1_deg": x1.to_degrees(),
            "chi2_deg": x2.to_degrees(),
            "probability": v,
        }));
    }

    let params = json!({
        "process": p.number(),
        "beta": b.get(),
        "chi1_deg": a.chi1, "chi1_rad": chi1,
        "chi2_deg": a.chi2, "chi2_rad": chi2,
    });
    let results = json!({
        "joint": j,
        "marginal_first": m1,
        "marginal_second": m2,
        "dependence_gap": gap,
        "quadruple": outcomes,
        "quadruple_sum": quadr.iter().sum::<f64>(),
    });
    Ok(Report {
        manifest: Manifest::new("prob", params),
        results,
        table,
        notes: vec![],
    })
}

pub fn bell(a: &BellArgs) -> Result<Report, CliError> {
    let p = process(a.common.process)?;
    let b = beta(a.common.beta)?;
    let q = quad(&a.angles.angles)?;
    let r = s_statistic(p, b, q);

    let mut table = Table::new(&["quantity", "value"]);
    for (label, t) in TERM_LABELS.iter().zip(r.terms) {
        table.push(vec![Cell::text(*label), Cell::Num(t)]);
    }
    table.push(vec![Cell::text("S"), Cell::Num(r.s)]);
    table.push(vec![
        Cell::text("verdict"),
        Cell::text(r.verdict.to_string()),
    ]);

    let params = json!({ "process": p.number(), "beta": b.get(), "angles": quad_json(q) });
    let terms: Vec<Value> = TERM_LABELS
        .iter()
        .zip(r.terms)
        .map(|(l, t)| json!({ "term": l, "value": t }))
        .collect();
    let results = json!({ "s": r.s, "verdict": r.verdict, "terms": terms });
    Ok(Report {
        manifest: Manifest::new("bell", params),
        results,
        table,
        notes: vec![],
    })
}

fn scan_speeds(a: &ScanArgs) -> Result<Vec<Beta>, CliError> {
    let raw: Vec<f64> = if let Some(list) = &a.betas {
        list.clone()
    } else if let Some(range) = &a.beta_range {
        let [start, stop, count] = range.as_slice() else {
            return Err(CliError::Input(
                "--beta-range takes start,stop,count".into(),
            ));
        };
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("not a number in --beta-range: {s:?}")))
        };
        let (start, stop) = (parse(start)?, parse(stop)?);
        let count: usize = count.trim().parse().map_err(|_| {
            CliError::Input(format!(
                "count in --beta-range must be an integer, got {count:?}"
            ))
        })?;
        match count {
            0 => vec![],
            1 => vec![start],
            n => (0..n)
                .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    } else {
        vec![]
    };
    if raw.is_empty() {
        return Err(CliError::Input("the speed list is empty".into()));
    }
    raw.into_iter().map(beta).collect()
}

pub fn scan(a: &ScanArgs) -> Result<Report, CliError> {
    let p = process(a.process)?;
    let q = quad(&a.angles.angles)?;
    let speeds = scan_speeds(a)?;
    let rows = s_beta_scan(p, q, &speeds);
    let frontier = a.frontier.map(|d| {
        let dir = match d {
            FrontierArg::Above => Direction::Above,
            FrontierArg::Below => Direction::Below,
        };
        (dir, violation_frontier(p, q, dir))
    });

    let mut cols = vec!["beta", "s", "verdict"];
    cols.extend(TERM_LABELS);
    if frontier.is_some() {
        cols.push("frontier_beta");
    }
    let frontier_cell = |f: Frontier| match f {
        Frontier::NoViolation => Cell::text("none"),
        Frontier::Interior(b) => Cell::Num(b),
        Frontier::AllBeta => Cell::text("all"),
    };
    let mut table = Table::new(&cols);
    for r in &rows {
        let mut row = vec![
            Cell::Num(r.beta.get()),
            Cell::Num(r.s),
            Cell::text(r.verdict.to_string()),
        ];
        row.extend(r.terms.map(Cell::Num));
        if let Some((_, f)) = frontier {
            row.push(frontier_cell(f));
        }
        table.push(row);
    }

    let params = json!({
        "process": p.number(),
        "angles": quad_json(q),
        "betas": speeds.iter().map(|b| b.get()).collect::<Vec<_>>(),
        "frontier": frontier.map(|(d, _)| d),
    });
    let points: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "beta": r.beta.get(), "s": r.s, "verdict": r.verdict, "terms": r.terms }))
        .collect();
    let mut notes = vec![];
    if let Some((d, f)) = frontier {
        notes.push(match f {
            Frontier::NoViolation => format!("frontier ({d:?}): no violation at beta = 0"),
            Frontier::Interior(b) => format!("frontier ({d:?}): violation ends near beta = {b:.6}"),
            Frontier::AllBeta => format!("frontier ({d:?}): violated up to beta = 1"),
        });
    }
    let results = json!({
        "points": points,
        "frontier": frontier.map(|(d, f)| json!({ "direction": d, "result": f })),
    });
    Ok(Report {
        manifest: Manifest::new("scan", params),
        results,
        table,
        notes,
    })
}

fn tolerances(a: &OracleArgs) -> Result<OracleTolerances, CliError> {
    let mut t = OracleTolerances::default();
    let overrides = [
        (a.integral_rel, &mut t.integral_rel, "integral-rel"),
        (a.identity_rel, &mut t.identity_rel, "identity-rel"),
        (a.window_rel, &mut t.window_rel, "window-rel"),
        (a.delta_limit_abs, &mut t.delta_limit_abs, "delta-limit-abs"),
        (a.amplitude_rel, &mut t.amplitude_rel, "amplitude-rel"),
        (a.angular_fit_rel, &mut t.angular_fit_rel, "angular-fit-rel"),
        (
            a.angular_prob_abs,
            &mut t.angular_prob_abs,
            "angular-prob-abs",
        ),
    ];
    for (given, slot, name) in overrides {
        if let Some(v) = given {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Input(format!(
                    "--{name} must be positive, got {v}"
                )));
            }
            *slot = v;
        }
    }
    Ok(t)
}

/// Returns the report together with a failure to raise after it is written.
pub fn oracle(a: &OracleArgs) -> Result<(Report, Option<CliError>), CliError> {
    let tol = tolerances(a)?;
    let levels: Vec<OracleLevel> = match a.level {
        LevelArg::Integrals => vec![OracleLevel::Integrals],
        LevelArg::DeltaLimit => vec![OracleLevel::DeltaLimit],
        LevelArg::Amplitude => vec![OracleLevel::Amplitude],
        LevelArg::Process2Angular => vec![OracleLevel::Process2Angular],
        LevelArg::All => OracleLevel::ALL.to_vec(),
    };
    let reports = levels
        .iter()
        .map(|l| run_oracle(*l, &tol))
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(&[
        "level",
        "check",
        "samples",
        "max_deviation",
        "tolerance",
        "passed",
    ]);
    let mut failed = Vec::new();
    for r in &reports {
        for c in &r.checks {
            table.push(vec![
                Cell::text(r.level.name()),
                Cell::text(c.name.clone()),
                Cell::Int(c.samples as u64),
                Cell::Num(c.max_deviation),
                Cell::Num(c.tolerance),
                Cell::text(if c.passed { "pass" } else { "FAIL" }),
            ]);
            if !c.passed {
                failed.push(format!("{}/{}", r.level.name(), c.name));
            }
        }
    }
    let params = json!({
        "levels": levels.iter().map(|l| l.name()).collect::<Vec<_>>(),
        "tolerances": tol,
    });
    let results = json!({ "passed": failed.is_empty(), "reports": reports });
    let failure = (!failed.is_empty())
        .then(|| CliError::OracleFailed(format!("failed checks: {}", failed.join(", "))));
    let report = Report {
        manifest: Manifest::new("oracle", params),
        results,
        table,
        notes: vec![],
    };
    Ok((report, failure))
}

pub fn search(a: &SearchArgs) -> Result<Report, CliError> {
    let p = process(a.common.process)?;
    let b = beta(a.common.beta)?;
    let objective = match a.objective {
        ObjectiveArg::Min => Objective::MinimizeS,
        ObjectiveArg::Max => Objective::MaximizeS,
    };
    let cfg = SearchConfig {
        grid_points_per_angle: a.grid_points,
        refine_iterations: a.refine_iterations,
        refine_initial_step: a.initial_step_deg.to_radians(),
        objective,
        grid_offset: a.grid_offset_deg.to_radians(),
    };
    let r = run_search(p, b, &cfg)?;
    let deg = r.best_quad.to_degrees();

    let mut table = Table::new(&["quantity", "value"]);
    for (name, v) in ["chi1_deg", "chi2_deg", "chi1p_deg", "chi2p_deg"]
        .iter()
        .zip(deg)
    {
        table.push(vec![Cell::text(*name), Cell::Num(v)]);
    }
    table.push(vec![Cell::text("S"), Cell::Num(r.best_s)]);
    table.push(vec![
        Cell::text("verdict"),
        Cell::text(r.verdict.to_string()),
    ]);

    let params = json!({
        "process": p.number(),
        "beta": b.get(),
        "objective": objective,
        "grid_points": a.grid_points,
        "refine_iterations": a.refine_iterations,
        "initial_step_deg": a.initial_step_deg,
        "initial_step_rad": cfg.refine_initial_step,
        "grid_offset_deg": a.grid_offset_deg,
        "grid_offset_rad": cfg.grid_offset,
    });
    let results = json!({
        "best_s": r.best_s,
        "verdict": r.verdict,
        "best_angles": quad_json(r.best_quad),
        "trace": r.trace,
    });
    Ok(Report {
        manifest: Manifest::new("search", params),
        results,
        table,
        notes: vec![],
    })
}

pub fn simulate(a: &SimulateArgs) -> Result<Report, CliError> {
    let p = process(a.common.process)?;
    let b = beta(a.common.beta)?;
    let q = quad(&a.angles.angles)?;
    if a.n == 0 {
        return Err(CliError::Input("--n must be positive".into()));
    }
    let est = estimate_s_sharded(p, b, q, a.n, RngSeed(a.seed), a.shards)?;

    let mut table = Table::new(&[
        "setting", "sign", "chi1_deg", "chi2_deg", "p_hat", "se", "exact",
    ]);
    for s in &est.settings {
        table.push(vec![
            Cell::text(s.label),
            Cell::Num(s.sign),
            Cell::opt(s.chi1.map(f64::to_degrees)),
            Cell::opt(s.chi2.map(f64::to_degrees)),
            Cell::Num(s.p_hat),
            Cell::Num(s.se),
            Cell::Num(s.exact),
        ]);
    }
    table.push(vec![
        Cell::text("S"),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Num(est.s_hat),
        Cell::Num(est.se),
        Cell::Num(est.s_exact),
    ]);
    let z = if est.se > 0.0 {
        (est.s_hat - est.s_exact) / est.se
    } else {
        0.0
    };

    let params = json!({
        "process": p.number(),
        "beta": b.get(),
        "angles": quad_json(q),
        "n_per_setting": a.n,
        "seed": a.seed,
        "shards": a.shards,
    });
    let settings: Vec<Value> = est
        .settings
        .iter()
        .map(|s| {
            json!({
                "label": s.label,
                "sign": s.sign,
                "chi1_deg": s.chi1.map(f64::to_degrees),
                "chi2_deg": s.chi2.map(f64::to_degrees),
                "p_hat": s.p_hat,
                "se": s.se,
                "exact": s.exact,
            })
        })
        .collect();
    let results = json!({
        "s_hat": est.s_hat,
        "se": est.se,
        "s_exact": est.s_exact,
        "z_score": z,
        "settings": settings,
    });
    Ok(Report {
        manifest: Manifest::new("simulate", params),
        results,
        table,
        notes: vec![format!("z = {z:.3}")],
    })
}
