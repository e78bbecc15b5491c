//! Named verification suites: every closed form against its brute-force
//! counterpart on fixed grids. `qel verify` runs them and serializes the
//! report.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attacks::{
    gamma_for_disturbance, strategy_a_unitary, strategy_b_coefficients, strategy_b_disturbance, strategy_b_unitary,
    CloneAParams, CloneBParams, StrategyBCoefficients,
};
use crate::channel::{
    eta_t_bounds, observed_error_closed_form, observed_error_from_disturbance, ChannelScenario,
};
use crate::detection::{povm_elements, DetectorModel};
use crate::infotheory::{fuchs_information, levitin_information, phi, TwoStateEnsemble};
use crate::linalg::{re, DensityOperator, Operator, C64};
use crate::optics::Basis;
use crate::oracle::{
    monte_carlo_protocol, numeric_two_state_info, simulate_strategy_a, simulate_strategy_b_with, AttackSpec, Check,
    DEFAULT_ANGLE_GRID, DEFAULT_PULSES, INFO_TOL, STATE_TOL,
};
use crate::Result;

pub const SCHEMA: &str = "qel/1";

/// Points of the strategy-B `γ` grid on `[0, π]`.
pub const GAMMA_GRID_POINTS: usize = 50;
/// Points of the strategy-A `β` grid on `[0, 1/√8]`.
pub const BETA_GRID_POINTS: usize = 12;
pub const LEVITIN_SAMPLES: usize = 200;
pub const ERROR_MAP_SAMPLES: usize = 1000;
pub const POVM_SAMPLES: usize = 100;
/// Relative tolerance of the error-map identity.
pub const ERROR_MAP_TOL: f64 = 1e-12;
pub const POVM_TOL: f64 = 1e-12;
/// Required significance of a nonzero double-click rate.
pub const DOUBLE_CLICK_SIGMAS: f64 = 5.0;

pub type CoefficientFn = Arc<dyn Fn(f64) -> Result<StrategyBCoefficients> + Send + Sync>;

#[derive(Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    pub n_pulses: u64,
    /// Source of the strategy-B coefficients under test.
    pub coefficients: CoefficientFn,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 1, n_pulses: DEFAULT_PULSES, coefficients: Arc::new(strategy_b_coefficients) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Suite {
    fn new(name: &str, checks: Vec<Check>) -> Self {
        Self { name: name.into(), passed: checks.iter().all(|c| c.passed), checks }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub passed: bool,
    pub seed: u64,
    pub failures: Vec<String>,
    pub suites: Vec<Suite>,
}

fn prefixed(prefix: &str, checks: Vec<Check>) -> Vec<Check> {
    checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("{prefix}/{}", c.name);
            c
        })
        .collect()
}

fn beta_grid() -> Vec<f64> {
    (0..BETA_GRID_POINTS).map(|k| CloneAParams::MAX_BETA * k as f64 / (BETA_GRID_POINTS - 1) as f64).collect()
}

fn gamma_grid() -> Vec<f64> {
    (0..GAMMA_GRID_POINTS).map(|k| PI * k as f64 / (GAMMA_GRID_POINTS - 1) as f64).collect()
}

fn unitarity_defect(u: &Operator) -> f64 {
    u.adjoint().mul(u).max_abs_diff(&Operator::identity(u.dim()))
}

pub fn isometry_suite() -> Result<Suite> {
    let mut checks = Vec::new();
    for beta in beta_grid() {
        let u = strategy_a_unitary(&CloneAParams::new(beta)?)?;
        checks.push(Check::new(format!("A beta={beta:.6}"), unitarity_defect(&u), STATE_TOL));
    }
    for gamma in gamma_grid() {
        let u = strategy_b_unitary(&CloneBParams::new(gamma)?)?;
        checks.push(Check::new(format!("B gamma={gamma:.6}"), unitarity_defect(&u), STATE_TOL));
    }
    Ok(Suite::new("isometry", checks))
}

pub fn probe_a_suite(seed: u64) -> Result<Suite> {
    let reports: Vec<_> =
        beta_grid().par_iter().map(|&b| simulate_strategy_a(b, 0.2, seed)).collect::<Result<_>>()?;
    let checks = reports
        .into_iter()
        .flat_map(|r| {
            let tag = format!("beta={:.6}", r.parameter);
            prefixed(&tag, r.checks)
        })
        .collect();
    Ok(Suite::new("probe-A", checks))
}

pub fn probe_b_suite(seed: u64, coefficients: &CoefficientFn) -> Result<Suite> {
    let reports: Vec<_> = gamma_grid()
        .par_iter()
        .map(|&g| simulate_strategy_b_with(g, 0.2, seed, coefficients.as_ref()))
        .collect::<Result<_>>()?;
    let checks = reports
        .into_iter()
        .flat_map(|r| {
            let tag = format!("gamma={:.6}", r.parameter);
            prefixed(&tag, r.checks)
        })
        .collect();
    Ok(Suite::new("probe-B/AppendixB", checks))
}

/// Round trips of the parameter ↔ disturbance maps.
pub fn d_maps_suite() -> Result<Suite> {
    let mut checks = Vec::new();
    for k in 0..=25 {
        let d = 0.01 * k as f64;
        let g = gamma_for_disturbance(d)?;
        checks.push(Check::new(format!("gamma(D={d:.2})"), (strategy_b_disturbance(g)? - d).abs(), 1e-10));
        let beta = CloneAParams::for_disturbance(d)?.beta();
        let sim = simulate_strategy_a(beta, 0.5, 0)?;
        checks.push(Check::new(format!("beta(D={d:.2})"), (sim.disturbance - d).abs(), STATE_TOL));
    }
    Ok(Suite::new("D-maps", checks))
}

fn bloch_state(r: f64, theta: f64, phi_angle: f64) -> Result<DensityOperator> {
    let (x, y, z) = (r * theta.sin() * phi_angle.cos(), r * theta.sin() * phi_angle.sin(), r * theta.cos());
    DensityOperator::new(Operator::new(
        2,
        vec![re(0.5 * (1.0 + z)), C64::new(0.5 * x, -0.5 * y), C64::new(0.5 * x, 0.5 * y), re(0.5 * (1.0 - z))],
    )?)
}

/// Random ensembles with equal determinants (equal Bloch lengths).
pub fn levitin_suite(seed: u64) -> Result<Suite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4c45_5649);
    let mut cases = Vec::with_capacity(LEVITIN_SAMPLES);
    for _ in 0..LEVITIN_SAMPLES {
        let r = rng.gen::<f64>();
        let mut angles = || (rng.gen::<f64>().mul_add(2.0, -1.0).acos(), 2.0 * PI * rng.gen::<f64>());
        let (t0, p0) = angles();
        let (t1, p1) = angles();
        cases.push((r, t0, p0, t1, p1));
    }
    let checks = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(r, t0, p0, t1, p1))| {
            let a = bloch_state(r, t0, p0)?;
            let b = bloch_state(r, t1, p1)?;
            let numeric = numeric_two_state_info(&a, &b, DEFAULT_ANGLE_GRID)?;
            let lev = levitin_information(&TwoStateEnsemble::new(a, b)?)?;
            Ok(Check::new(format!("ensemble {i}"), (lev - numeric).abs(), INFO_TOL))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Suite::new("Levitin", checks))
}

pub fn double_click_suite(seed: u64, n_pulses: u64) -> Result<Suite> {
    let scen = ChannelScenario::from_loss_db(0.1, 0.2, 10.0)?;
    let mut checks = Vec::new();
    let pns = monte_carlo_protocol(&scen, AttackSpec::Pns { d: 0.1 }, n_pulses, seed)?;
    checks.push(Check::new("pns matching-basis double clicks", pns.matching_double_click.count as f64, 0.0));
    for (name, attack) in [("clone-A", AttackSpec::clone_a_at(0.1)?), ("clone-B", AttackSpec::clone_b_at(0.1)?)] {
        let stats = monte_carlo_protocol(&scen, attack, n_pulses, seed)?;
        for (basis, est) in Basis::ALL.iter().zip(stats.matching_double_click_by_basis) {
            // delta is the shortfall below the required significance
            let sigmas = est.rate / est.std_err;
            let shortfall = if sigmas.is_finite() { (DOUBLE_CLICK_SIGMAS - sigmas).max(0.0) } else { f64::INFINITY };
            checks.push(Check::new(format!("{name} {basis:?} double clicks above {DOUBLE_CLICK_SIGMAS} sigma"), shortfall, 0.0));
        }
    }
    Ok(Suite::new("double-click", checks))
}

pub fn povm_suite(seed: u64) -> Result<Suite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x504f_564d);
    let mut checks = Vec::new();
    for i in 0..POVM_SAMPLES {
        let basis = if rng.gen::<bool>() { Basis::Rectilinear } else { Basis::Diagonal };
        let eta = rng.gen::<f64>();
        let cutoff = rng.gen_range(2..=6);
        let povm = povm_elements(basis, &DetectorModel::new(eta, cutoff)?);
        let delta = povm.sum().max_abs_diff(&Operator::identity((cutoff + 1) * (cutoff + 1)));
        checks.push(Check::new(format!("sample {i} eta={eta:.4} cutoff={cutoff}"), delta, POVM_TOL));
    }
    let endpoints = [
        ("phi(0)", phi(0.0)?),
        ("phi(1)-2", phi(1.0)? - 2.0),
        ("fuchs(0)", fuchs_information(0.0)?),
        ("fuchs(1/2)-1", fuchs_information(0.5)? - 1.0),
    ];
    for (name, v) in endpoints {
        checks.push(Check::new(name, v.abs(), 0.0));
    }
    Ok(Suite::new("POVM", checks))
}

/// Closed-form error map against the photon-series composition on random
/// scenarios from the interior of the transmission window.
pub fn error_map_suite(seed: u64) -> Result<Suite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4552_524d);
    let mut worst: f64 = 0.0;
    let mut worst_case = String::new();
    for _ in 0..ERROR_MAP_SAMPLES {
        let (mu, eta, frac, d) = error_map_sample(&mut rng);
        let rel = error_map_relative_delta(mu, eta, frac, d)?;
        if rel > worst {
            worst = rel;
            worst_case = format!("mu={mu:.4} eta={eta:.4} frac={frac:.4} D={d:.4}");
        }
    }
    let name = if worst_case.is_empty() { "max relative delta".to_string() } else { format!("max relative delta ({worst_case})") };
    Ok(Suite::new("error-map", vec![Check::new(name, worst, ERROR_MAP_TOL)]))
}

/// `(μ, η_det, position in window, D)` drawn for the error-map identity.
pub fn error_map_sample<R: Rng>(rng: &mut R) -> (f64, f64, f64, f64) {
    (rng.gen_range(0.01..1.0), rng.gen_range(0.01..1.0), rng.gen_range(0.01..0.99), rng.gen_range(0.0..0.5))
}

/// Relative difference of the closed form and the composed map at the loss a
/// fraction `frac` of the way across the window.
pub fn error_map_relative_delta(mu: f64, eta: f64, frac: f64, d: f64) -> Result<f64> {
    let w = eta_t_bounds(mu, eta)?;
    let loss = w.lower_db + frac * (w.upper_db - w.lower_db);
    let scen = ChannelScenario::from_loss_db(mu, eta, loss)?;
    let composed = observed_error_from_disturbance(&scen, d)?;
    let closed = observed_error_closed_form(&scen, d)?;
    Ok(if composed == 0.0 { closed.abs() } else { ((closed - composed) / composed).abs() })
}

/// Runs every suite.
pub fn run_verification(opts: &VerifyOptions) -> Result<VerificationReport> {
    let suites = vec![
        isometry_suite()?,
        probe_a_suite(opts.seed)?,
        probe_b_suite(opts.seed, &opts.coefficients)?,
        d_maps_suite()?,
        levitin_suite(opts.seed)?,
        double_click_suite(opts.seed, opts.n_pulses)?,
        povm_suite(opts.seed)?,
        error_map_suite(opts.seed)?,
    ];
    let failures: Vec<String> = suites
        .iter()
        .flat_map(|s| s.checks.iter().filter(|c| !c.passed).map(move |c| format!("{}: {}", s.name, c.name)))
        .collect();
    Ok(VerificationReport {
        schema: SCHEMA.into(),
        passed: failures.is_empty(),
        seed: opts.seed,
        failures,
        suites,
    })
}
