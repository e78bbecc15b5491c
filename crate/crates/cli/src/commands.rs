use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use qel_core::attacks::{information_curves, strategy_b_coefficients, strategy_b_disturbance, strategy_b_information};
use qel_core::channel::{best_crossover, eta_t_bounds, observed_error_from_disturbance, ChannelScenario, Strategy};
use qel_core::oracle::DEFAULT_PULSES;
use qel_core::verify::{run_verification, VerificationReport, VerifyOptions, SCHEMA};

use crate::cli::VerifyArgs;
use crate::config::RunConfig;
use crate::output::{fmt_g12, Cell, Output, Table};
use crate::CliError;

const DEFAULT_D_STEPS: usize = 101;

pub fn info_curves(cfg: &RunConfig) -> Result<Output, CliError> {
    let etas = cfg.eta_dets();
    if etas.is_empty() {
        return Err(CliError::Usage("info-curves needs at least one eta_det".into()));
    }
    let grid = cfg.d_grid(DEFAULT_D_STEPS)?.points();
    let curves = etas.iter().map(|&eta| information_curves(eta, &grid)).collect::<Result<Vec<_>, _>>()?;

    let mut columns = vec!["D".to_string()];
    if etas.len() == 1 {
        columns.push("i_pns".into());
    } else {
        columns.extend(etas.iter().map(|e| format!("i_pns_eta{}", fmt_g12(*e))));
    }
    columns.extend(["i_a".to_string(), "i_b".to_string()]);

    let mut table = Table::new("info-curves", columns);
    for (k, &d) in grid.iter().enumerate() {
        let mut row = vec![Cell::Num(d)];
        row.extend(curves.iter().map(|c| Cell::Num(c[k].i_pns)));
        // the cloner columns do not depend on eta_det
        row.push(curves[0][k].i_a.into());
        row.push(curves[0][k].i_b.into());
        table.push(row);
    }
    Ok(Output::Table(table))
}

pub fn error_map(cfg: &RunConfig) -> Result<Output, CliError> {
    let (mu, eta) = (cfg.mu(), cfg.eta_det()?);
    eta_t_bounds(mu, eta)?;
    let losses = cfg.losses()?;
    let ds = cfg.d_grid(DEFAULT_D_STEPS)?.points();
    if cfg.single_loss() {
        // a scenario asked for by name must be valid; grids only flag rows
        ChannelScenario::from_loss_db(mu, eta, losses[0])?.check_regime()?;
    }
    let mut table = Table::new(
        "error-map",
        ["loss_db", "eta_t", "D", "e", "valid"].map(String::from).to_vec(),
    );
    for &loss in &losses {
        let scen = ChannelScenario::from_loss_db(mu, eta, loss)?;
        for &d in &ds {
            // out-of-window scenarios stay in the table, flagged
            let e = observed_error_from_disturbance(&scen, d).ok();
            table.push(vec![loss.into(), scen.eta_t().into(), d.into(), e.into(), e.is_some().into()]);
        }
    }
    Ok(Output::Table(table))
}

#[derive(Serialize)]
struct BoundsRecord {
    schema: &'static str,
    mu: f64,
    eta_det: f64,
    empty: bool,
    eta_t_lower: Option<f64>,
    eta_t_upper: Option<f64>,
    lower_db: Option<f64>,
    upper_db: Option<f64>,
}

pub fn bounds(cfg: &RunConfig) -> Result<Output, CliError> {
    let (mu, eta) = (cfg.mu(), cfg.eta_det()?);
    let rec = match eta_t_bounds(mu, eta) {
        Ok(w) => BoundsRecord {
            schema: SCHEMA,
            mu,
            eta_det: eta,
            empty: false,
            eta_t_lower: Some(w.eta_t_lower),
            eta_t_upper: Some(w.eta_t_upper),
            lower_db: Some(w.lower_db),
            upper_db: Some(w.upper_db),
        },
        Err(qel_core::Error::InvalidRegime(_)) => BoundsRecord {
            schema: SCHEMA,
            mu,
            eta_det: eta,
            empty: true,
            eta_t_lower: None,
            eta_t_upper: None,
            lower_db: None,
            upper_db: None,
        },
        Err(e) => return Err(e.into()),
    };
    Output::record(&rec)
}

#[derive(Serialize)]
struct CrossoverRecord {
    schema: &'static str,
    mu: f64,
    eta_det: f64,
    e: f64,
    window_lower_db: f64,
    window_upper_db: f64,
    crossover_a_db: Option<f64>,
    crossover_b_db: Option<f64>,
    best_db: Option<f64>,
    best_strategy: Option<Strategy>,
}

pub fn crossover(cfg: &RunConfig) -> Result<Output, CliError> {
    let (mu, eta) = (cfg.mu(), cfg.eta_det()?);
    let e = cfg.e.ok_or_else(|| CliError::Usage("crossover needs --e".into()))?;
    let w = eta_t_bounds(mu, eta)?;
    let c = best_crossover(mu, eta, e)?;
    Output::record(&CrossoverRecord {
        schema: SCHEMA,
        mu,
        eta_det: eta,
        e,
        window_lower_db: w.lower_db,
        window_upper_db: w.upper_db,
        crossover_a_db: c.a,
        crossover_b_db: c.b,
        best_db: c.best,
        best_strategy: c.best_strategy,
    })
}

fn parse_perturbation(spec: &str) -> Result<(char, f64), CliError> {
    let bad = || CliError::Usage(format!("--perturb-coefficient expects NAME=DELTA with NAME in a-f, got {spec:?}"));
    let (name, delta) = spec.split_once('=').ok_or_else(bad)?;
    let mut chars = name.trim().chars();
    let (Some(c), None) = (chars.next(), chars.next()) else {
        return Err(bad());
    };
    if !('a'..='f').contains(&c) {
        return Err(bad());
    }
    let delta: f64 = delta.trim().parse().map_err(|_| bad())?;
    Ok((c, delta))
}

/// Runs the suites. The caller turns a failed report into exit status 2.
pub fn verify(cfg: &RunConfig, args: &VerifyArgs) -> Result<(Output, VerificationReport), CliError> {
    let mut opts = VerifyOptions { seed: cfg.seed(), n_pulses: cfg.pulses.unwrap_or(DEFAULT_PULSES), ..Default::default() };
    if opts.n_pulses == 0 {
        return Err(CliError::Usage("--pulses must be positive".into()));
    }
    if let Some(spec) = &args.perturb_coefficient {
        let (name, delta) = parse_perturbation(spec)?;
        opts.coefficients = Arc::new(move |g| {
            let mut k = strategy_b_coefficients(g)?;
            match name {
                'a' => k.a += delta,
                'b' => k.b += delta,
                'c' => k.c += delta,
                'd' => k.d += delta,
                'e' => k.e += delta,
                _ => k.f += delta,
            }
            Ok(k)
        });
    }
    let report = run_verification(&opts)?;
    Ok((Output::record(&report)?, report))
}

pub fn coefficients(cfg: &RunConfig) -> Result<Output, CliError> {
    let grid = cfg.gamma_grid()?.points();
    let rows = grid
        .par_iter()
        .map(|&g| {
            let k = strategy_b_coefficients(g)?;
            let mut row: Vec<Cell> = vec![g.into()];
            row.extend(k.as_array().iter().map(|&x| Cell::Num(x)));
            row.push(strategy_b_disturbance(g)?.into());
            row.push(strategy_b_information(g)?.into());
            Ok(row)
        })
        .collect::<Result<Vec<_>, qel_core::Error>>()?;
    let mut table =
        Table::new("coefficients", ["gamma", "a", "b", "c", "d", "e", "f", "D", "i_b"].map(String::from).to_vec());
    for r in rows {
        table.push(r);
    }
    Ok(Output::Table(table))
}
