use std::fmt::Write as _;

use monopole::reference::{parse_reference_csv, reference_table, GRID_EPSILON, GRID_LAMBDA};
use monopole::stability::FixedPointId;
use monopole::sweep::{row_schedule, sort_cells};
use monopole::{
    action, apply_gauge_flip, apply_phi_flip, classify_stability, compute_coeffs, default_guess,
    el_residual_within, estimate_order, newton_solve, overlap_check, sweep_row,
    verify_against_closed_forms, OdeState, Params, SeedCoeffs, ShootingConfig, SolveResult,
    SweepCell, SweepOrder,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::args::{CellArgs, Format, ProfileArgs, SolveArgs, StabilityArgs, TableArgs, VerifyArgs};
use crate::error::CliError;
use crate::output::{
    emit_with_manifest, num, profile_csv, table_csv, to_json_line, RunManifest, TableRow,
};

pub const THREADS_VAR: &str = "MONOPOLE_THREADS";

/// Text destined for stdout.
pub type Output = String;

fn solve_cell(cell: &CellArgs, config: &ShootingConfig) -> Result<SolveResult, CliError> {
    let params = Params::new(cell.epsilon, cell.lambda)?;
    let guess = cell.guess.unwrap_or_else(|| default_guess(&params));
    Ok(newton_solve(&params, guess, config)?)
}

fn single_row(res: &SolveResult) -> TableRow {
    TableRow {
        epsilon: res.params.epsilon(),
        lambda: res.params.lambda(),
        a1: Some(res.seed.a1),
        b2: Some(res.seed.b2),
        residual_inf: Some(res.residual_inf()),
        iterations: Some(res.iterations),
        status: "converged".into(),
    }
}

pub fn solve(args: &SolveArgs) -> Result<Output, CliError> {
    let config = args.common.config()?;
    let res = solve_cell(&args.cell, &config)?;
    let format = args.common.format.unwrap_or(Format::Json);

    if let Some(path) = &args.common.out {
        let contents = match format {
            Format::Csv => profile_csv(&res.profile, None),
            Format::Json => to_json_line(&res),
        };
        let rows = [single_row(&res)];
        emit_with_manifest(
            path,
            &contents,
            &RunManifest::new("solve", config, path, &rows),
        )?;
    }

    Ok(match format {
        Format::Json => to_json_line(&json!({
            "epsilon": res.params.epsilon(),
            "lambda": res.params.lambda(),
            "a1": res.seed.a1,
            "b2": res.seed.b2,
            "residual": res.residual,
            "residual_inf": res.residual_inf(),
            "iterations": res.iterations,
            "action": res.action_value,
            "el_residual_max": res.el_residual_max,
        })),
        Format::Csv => format!(
            "epsilon,lambda,a1,b2,residual_inf,iterations,action\n{},{},{},{},{},{},{}\n",
            num(res.params.epsilon()),
            num(res.params.lambda()),
            num(res.seed.a1),
            num(res.seed.b2),
            num(res.residual_inf()),
            res.iterations,
            num(res.action_value)
        ),
    })
}

fn thread_count() -> Result<usize, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(0),
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "{THREADS_VAR} must be a non-negative integer, got `{v}`"
            ))
        }),
    }
}

/// Solves every epsilon row concurrently. Rows are independent chains, so
/// the result does not depend on the thread count.
pub fn parallel_sweep(
    eps: &[f64],
    lam: &[f64],
    order: SweepOrder,
    config: &ShootingConfig,
) -> Result<Vec<SweepCell>, CliError> {
    for &e in eps {
        for &l in lam {
            Params::new(e, l)?;
        }
    }
    if eps.is_empty() || lam.is_empty() {
        return Err(CliError::Usage(
            "grid needs at least one epsilon and one lambda".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    let rows = row_schedule(eps, order);
    let chunks: Vec<Vec<SweepCell>> = pool.install(|| {
        rows.par_iter()
            .map(|&e| sweep_row(e, lam, order, config))
            .collect::<Result<_, _>>()
    })?;
    let mut cells: Vec<SweepCell> = chunks.into_iter().flatten().collect();
    sort_cells(&mut cells);
    Ok(cells)
}

#[derive(Debug, Serialize)]
struct CheckReport {
    compared: usize,
    missing: Vec<(f64, f64)>,
    max_da1: f64,
    max_db2: f64,
    tolerance: f64,
    pass: bool,
}

fn compare(
    rows: &[TableRow],
    reference: &[monopole::reference::ReferenceRow],
    tol: f64,
) -> CheckReport {
    let mut report = CheckReport {
        compared: 0,
        missing: Vec::new(),
        max_da1: 0.0,
        max_db2: 0.0,
        tolerance: tol,
        pass: true,
    };
    for row in rows {
        let Some(r) = reference
            .iter()
            .find(|r| r.epsilon == row.epsilon && r.lambda == row.lambda)
        else {
            continue;
        };
        match (row.a1, row.b2, row.status.as_str()) {
            (Some(a1), Some(b2), "converged") => {
                report.compared += 1;
                report.max_da1 = report.max_da1.max((a1 - r.a1).abs());
                report.max_db2 = report.max_db2.max((b2 - r.b2).abs());
            }
            _ => report.missing.push((row.epsilon, row.lambda)),
        }
    }
    report.pass = report.compared > 0
        && report.missing.is_empty()
        && report.max_da1 <= tol
        && report.max_db2 <= tol;
    report
}

/// Returns stdout text and, in `--check` mode, a report for stderr plus
/// whether the check passed.
pub fn table(args: &TableArgs) -> Result<(Output, Option<(String, bool)>), CliError> {
    let config = args.common.config()?;
    let reference = match &args.check {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            Some(parse_reference_csv(&text)?)
        }
        None => None,
    };
    let cells = parallel_sweep(&args.eps, &args.lam, args.order.into(), &config)?;
    let rows: Vec<TableRow> = cells.iter().map(TableRow::from).collect();
    let contents = match args.common.format.unwrap_or(Format::Csv) {
        Format::Csv => table_csv(&rows),
        Format::Json => to_json_line(&rows),
    };

    let check = reference.map(|reference| {
        let report = compare(&rows, &reference, args.check_tol);
        let text = format!(
            "check: {} cells compared, max |da1| = {:e}, max |db2| = {:e}, tolerance {:e}{}: {}\n",
            report.compared,
            report.max_da1,
            report.max_db2,
            report.tolerance,
            if report.missing.is_empty() {
                String::new()
            } else {
                format!(", {} without a converged value", report.missing.len())
            },
            if report.pass { "PASS" } else { "FAIL" }
        );
        (text, report.pass)
    });

    match &args.common.out {
        Some(path) => {
            emit_with_manifest(
                path,
                &contents,
                &RunManifest::new("table", config, path, &rows),
            )?;
            Ok((String::new(), check))
        }
        None => Ok((contents, check)),
    }
}

pub fn profile(args: &ProfileArgs) -> Result<Output, CliError> {
    let config = args.common.config()?;
    let res = solve_cell(&args.cell, &config)?;
    let contents = match args.common.format.unwrap_or(Format::Csv) {
        Format::Csv => profile_csv(&res.profile, args.sample),
        Format::Json => {
            let states = res.profile.states();
            let samples: Vec<_> = crate::output::sample_indices(states.len(), args.sample)
                .into_iter()
                .map(|i| {
                    let s = &states[i];
                    json!({ "r": s.r, "gamma": s.gamma(), "phi": s.phi, "dgamma": s.dgamma, "dphi": s.dphi })
                })
                .collect();
            to_json_line(&json!({
                "epsilon": res.params.epsilon(),
                "lambda": res.params.lambda(),
                "a1": res.seed.a1,
                "b2": res.seed.b2,
                "samples": samples,
            }))
        }
    };
    match &args.common.out {
        Some(path) => {
            let rows = [single_row(&res)];
            emit_with_manifest(
                path,
                &contents,
                &RunManifest::new("profile", config, path, &rows),
            )?;
            Ok(String::new())
        }
        None => Ok(contents),
    }
}

pub fn stability(args: &StabilityArgs) -> Result<Output, CliError> {
    let params = Params::new(args.epsilon, args.lambda)?;
    let reports = FixedPointId::ALL
        .iter()
        .map(|&fp| classify_stability(fp, args.r, &params))
        .collect::<Result<Vec<_>, _>>()?;
    let contents = match args.common.format.unwrap_or(Format::Json) {
        Format::Json => to_json_line(&reports),
        Format::Csv => {
            let mut out = String::from(
                "fixed_point,gamma,phi,r,epsilon,lambda,unstable_mode_count,gamma_mode_stable,phi_mode_stable,phi_oscillatory,gamma_length_scale,phi_length_scale\n",
            );
            for rep in &reports {
                let (g, f) = rep.fixed_point.values();
                writeln!(
                    out,
                    "\"{}\",{},{},{},{},{},{},{},{},{},{},{}",
                    rep.fixed_point.label(),
                    num(g),
                    num(f),
                    num(rep.r),
                    num(rep.params.epsilon()),
                    num(rep.params.lambda()),
                    rep.unstable_mode_count,
                    rep.gamma_mode_stable,
                    rep.phi_mode_stable,
                    rep.phi_oscillatory,
                    num(rep.gamma_length_scale),
                    num(rep.phi_length_scale)
                )
                .unwrap();
            }
            out
        }
    };
    match &args.common.out {
        Some(path) => {
            crate::output::write_atomic(path, &contents)?;
            Ok(String::new())
        }
        None => Ok(contents),
    }
}

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

fn check(name: &'static str, value: f64, threshold: f64, detail: String) -> CheckResult {
    CheckResult {
        name,
        pass: value <= threshold,
        value,
        threshold,
        detail,
    }
}

fn verify_series() -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for i in 0..10 {
        for j in 0..10 {
            let seed = SeedCoeffs {
                a1: -10.0 + 20.0 * (i as f64 + 0.37) / 10.0,
                b2: -10.0 + 20.0 * (j as f64 + 0.61) / 10.0,
            };
            for e in [0.1, 1.0, 10.0] {
                for l in [0.0, 1.0, 30.0] {
                    let p = Params::new(e, l).expect("valid grid");
                    worst = worst.max(verify_against_closed_forms(seed, &p));
                    cases += 1;
                }
            }
        }
    }
    check(
        "series",
        worst,
        1e-12,
        format!("{cases} seeds x params, max relative deviation {worst:e}"),
    )
}

fn verify_order() -> Result<CheckResult, CliError> {
    let p = Params::new(1.0, 1.0)?;
    let start = OdeState::new(0.2, -0.05, -0.5, 0.3, 1.4);
    let order = estimate_order(&p, &start)?.value().unwrap_or(f64::NAN);
    let off = (order - 4.0).abs();
    Ok(CheckResult {
        name: "order",
        pass: off <= 0.2,
        value: order,
        threshold: 0.2,
        detail: format!("empirical order {order:.4} (accepted 4 +/- 0.2)"),
    })
}

fn verify_overlap(config: &ShootingConfig) -> Result<CheckResult, CliError> {
    let p = Params::new(1.0, 0.0)?;
    let res = newton_solve(&p, default_guess(&p), config)?;
    let r_alt = config.r_match / 2.0;
    let d = overlap_check(&res, r_alt)?;
    Ok(check(
        "overlap",
        d,
        1e-8,
        format!(
            "handoff {} -> {r_alt} moves boundary values by {d:e}",
            config.r_match
        ),
    ))
}

fn verify_symmetry(config: &ShootingConfig) -> Result<CheckResult, CliError> {
    let p = Params::new(1.0, 1.0)?;
    let res = newton_solve(&p, default_guess(&p), config)?;
    let series = compute_coeffs(res.seed, p, config.series_order)?;
    let s = action(&res.profile, &series)?;
    let mut worst: f64 = 0.0;
    for flipped in [apply_phi_flip(&res.profile), apply_gauge_flip(&res.profile)] {
        worst = worst.max((action(&flipped, &series)? - s).abs() / (1.0 + s.abs()));
    }
    let involution = apply_phi_flip(&apply_phi_flip(&res.profile)) == res.profile
        && apply_gauge_flip(&apply_gauge_flip(&res.profile)) == res.profile;
    let mut c = check(
        "symmetry",
        worst,
        1e-12,
        format!("action {s}, max relative change {worst:e}, involutions exact: {involution}"),
    );
    c.pass &= involution;
    Ok(c)
}

fn verify_table(cells: &[SweepCell]) -> CheckResult {
    let rows: Vec<TableRow> = cells.iter().map(TableRow::from).collect();
    let report = compare(&rows, reference_table(), 1e-4);
    let worst = report.max_da1.max(report.max_db2);
    let mut c = check(
        "table",
        worst,
        1e-4,
        format!(
            "{} cells, max |da1| = {:e}, max |db2| = {:e}",
            report.compared, report.max_da1, report.max_db2
        ),
    );
    c.pass = report.pass;
    c
}

fn verify_residual(cells: &[SweepCell]) -> Result<CheckResult, CliError> {
    let mut worst: f64 = 0.0;
    let mut failed = 0;
    for cell in cells {
        match cell.result() {
            Some(r) => worst = worst.max(el_residual_within(&r.profile, &r.params, 0.02, 0.98)?),
            None => failed += 1,
        }
    }
    let mut c = check(
        "residual",
        worst,
        1e-4,
        format!(
            "max interior ODE residual {worst:e} over {} cells",
            cells.len() - failed
        ),
    );
    c.pass &= failed == 0;
    Ok(c)
}

pub fn verify(args: &VerifyArgs) -> Result<(Output, bool), CliError> {
    let config = args.common.config()?;
    let all = args.none_selected();
    let mut results = Vec::new();
    if all || args.series {
        results.push(verify_series());
    }
    if all || args.order {
        results.push(verify_order()?);
    }
    if all || args.overlap {
        results.push(verify_overlap(&config)?);
    }
    if all || args.symmetry {
        results.push(verify_symmetry(&config)?);
    }
    if all || args.table || args.residual {
        let cells = parallel_sweep(&GRID_EPSILON, &GRID_LAMBDA, SweepOrder::Forward, &config)?;
        if all || args.table {
            results.push(verify_table(&cells));
        }
        if all || args.residual {
            results.push(verify_residual(&cells)?);
        }
    }
    let pass = results.iter().all(|c| c.pass);
    let contents = match args.common.format {
        Some(Format::Json) => to_json_line(&json!({ "pass": pass, "checks": results })),
        Some(Format::Csv) => {
            let mut out = String::from("check,pass,value,threshold\n");
            for c in &results {
                writeln!(
                    out,
                    "{},{},{},{}",
                    c.name,
                    c.pass,
                    num(c.value),
                    num(c.threshold)
                )
                .unwrap();
            }
            out
        }
        None => {
            let mut out = String::new();
            for c in &results {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                writeln!(out, "{verdict} {}: {}", c.name, c.detail).unwrap();
            }
            out
        }
    };
    match &args.common.out {
        Some(path) => {
            crate::output::write_atomic(path, &contents)?;
            Ok((String::new(), pass))
        }
        None => Ok((contents, pass)),
    }
}
