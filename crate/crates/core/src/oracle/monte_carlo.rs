//! Pulse-by-pulse simulation of the attacked protocol at matched raw rate.
//!
//! Each pulse: Alice picks a BB84 signal, Eve applies her process, Bob picks
//! a basis, the detector model draws an outcome and the event is sifted.
//! Eve's processes, with `p = 1/(2 − η_det)`:
//!
//! * PNS: with probability `p` she holds a two-photon pulse, keeps one photon
//!   and forwards the other untouched; otherwise she applies the optimal
//!   single-photon attack at disturbance `D`, which leaves Bob with
//!   `(1−2D)ρ + D·𝟙`.
//! * Cloning: with probability `p` she clones a two-photon pulse and forwards
//!   Bob's two-photon marginal; otherwise she blocks the pulse.
//!
//! Both give Bob the raw click rate `η_det` by construction.
//!
//! Work is split into a fixed number of chunks, each with its own ChaCha
//! stream derived from the seed, so the result does not depend on the thread
//! count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attacks::{
    clone_output, matched_two_photon_fraction, strategy_a_unitary, strategy_b_unitary, CloneAParams, CloneBParams,
};
use crate::channel::ChannelScenario;
use crate::detection::{outcome_distribution, sifted_outcome, ArrivingSignal, DetectionOutcome, DetectorModel, OutcomeDistribution, SiftResult};
use crate::error::check_range;
use crate::linalg::{hadamard, re, Operator, Tensor};
use crate::optics::{signal_ket, symmetric_encode, Basis, Bb84Signal, SymmetricTwoQubit};
use crate::{Error, Result};

/// Default number of simulated pulses.
pub const DEFAULT_PULSES: u64 = 1_000_000;

const CHUNKS: u64 = 64;

/// Eve's process and its parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "attack", rename_all = "snake_case")]
pub enum AttackSpec {
    Pns { d: f64 },
    CloneA { beta: f64 },
    CloneB { gamma: f64 },
}

impl AttackSpec {
    /// Strategy A or B at the parameter giving disturbance `d`.
    pub fn clone_a_at(d: f64) -> Result<Self> {
        Ok(AttackSpec::CloneA { beta: CloneAParams::for_disturbance(d)?.beta() })
    }

    pub fn clone_b_at(d: f64) -> Result<Self> {
        Ok(AttackSpec::CloneB { gamma: CloneBParams::for_disturbance(d)?.gamma() })
    }
}

/// A rate estimate with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub count: u64,
    pub trials: u64,
    pub rate: f64,
    pub std_err: f64,
}

impl Estimate {
    fn new(count: u64, trials: u64) -> Self {
        if trials == 0 {
            return Self { count, trials, rate: f64::NAN, std_err: f64::NAN };
        }
        let rate = count as f64 / trials as f64;
        Self { count, trials, rate, std_err: (rate * (1.0 - rate) / trials as f64).sqrt() }
    }

    /// `(rate − value) / std_err`; infinite when the estimate has zero spread
    /// but differs from `value`.
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = self.rate - value;
        if self.std_err > 0.0 {
            diff / self.std_err
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

/// Exact per-pulse rates of the simulated process.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRates {
    pub raw_click: f64,
    pub double_click: f64,
    /// Double clicks per pulse measured in Alice's basis.
    pub matching_double_click: f64,
    pub sifted_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloStats {
    pub attack: AttackSpec,
    pub eta_det: f64,
    pub n_pulses: u64,
    pub seed: u64,
    pub two_photon_fraction: f64,
    /// Any click, over all pulses.
    pub raw_click: Estimate,
    /// Double clicks, over all pulses.
    pub double_click: Estimate,
    /// Double clicks over pulses where Bob measured in Alice's basis.
    pub matching_double_click: Estimate,
    /// Same, split by Alice's basis (rectilinear, diagonal).
    pub matching_double_click_by_basis: [Estimate; 2],
    /// Errors over sifted events.
    pub sifted_error: Estimate,
    pub analytic: AnalyticRates,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Counts {
    pulses: u64,
    clicks: u64,
    doubles: u64,
    matching: [u64; 2],
    matching_doubles: [u64; 2],
    sifted: u64,
    errors: u64,
}

impl Counts {
    fn merge(mut self, o: Counts) -> Counts {
        self.pulses += o.pulses;
        self.clicks += o.clicks;
        self.doubles += o.doubles;
        for k in 0..2 {
            self.matching[k] += o.matching[k];
            self.matching_doubles[k] += o.matching_doubles[k];
        }
        self.sifted += o.sifted;
        self.errors += o.errors;
        self
    }
}

fn basis_index(b: Basis) -> usize {
    match b {
        Basis::Rectilinear => 0,
        Basis::Diagonal => 1,
    }
}

/// Outcome distributions for every (branch, signal, Bob basis).
/// Branch 0 is the two-photon branch, branch 1 the complementary one.
struct ProcessTable {
    p: f64,
    dists: [[[OutcomeDistribution; 2]; 4]; 2],
}

impl ProcessTable {
    fn dist(&self, branch: usize, signal: usize, bob: Basis) -> &OutcomeDistribution {
        &self.dists[branch][signal][basis_index(bob)]
    }
}

/// Bob's two-photon state for strategy B. The cloner is built around the
/// diagonal basis; rectilinear signals go through it in the Hadamard-rotated
/// frame, so every signal sees the same disturbance.
fn clone_b_bob_state(u: &Operator, s: Bb84Signal) -> Result<Operator> {
    match s.basis() {
        Basis::Diagonal => Ok(clone_output(u, &symmetric_encode(s))?.bob),
        Basis::Rectilinear => {
            let hh = hadamard().tensor(&hadamard());
            let rotated = SymmetricTwoQubit::new(hh.apply(symmetric_encode(s).ket()))?;
            Ok(clone_output(u, &rotated)?.bob.conjugate_by(&hh))
        }
    }
}

fn build_table(attack: &AttackSpec, model: &DetectorModel, p: f64) -> Result<ProcessTable> {
    let vacuum = OutcomeDistribution { vacuum: 1.0, ..Default::default() };
    let mut dists = [[[vacuum; 2]; 4]; 2];
    let clone_u = match attack {
        AttackSpec::Pns { d } => {
            check_range("D", *d, 0.0, 0.5, "[0, 1/2]")?;
            None
        }
        AttackSpec::CloneA { beta } => Some(strategy_a_unitary(&CloneAParams::new(*beta)?)?),
        AttackSpec::CloneB { gamma } => Some(strategy_b_unitary(&CloneBParams::new(*gamma)?)?),
    };
    for (si, s) in Bb84Signal::ALL.into_iter().enumerate() {
        for bob in Basis::ALL {
            let bi = basis_index(bob);
            match (attack, &clone_u) {
                (AttackSpec::Pns { d }, _) => {
                    let rho = signal_ket(s).projector();
                    dists[0][si][bi] = outcome_distribution(ArrivingSignal::SinglePhoton(&rho), bob, model)?;
                    let noisy = rho.scale(re(1.0 - 2.0 * d)).add(&Operator::identity(2).scale(re(*d)));
                    dists[1][si][bi] = outcome_distribution(ArrivingSignal::SinglePhoton(&noisy), bob, model)?;
                }
                (AttackSpec::CloneA { .. }, Some(u)) => {
                    let bob_state = clone_output(u, &symmetric_encode(s))?.bob;
                    dists[0][si][bi] = outcome_distribution(ArrivingSignal::TwoPhoton(&bob_state), bob, model)?;
                }
                (AttackSpec::CloneB { .. }, Some(u)) => {
                    let bob_state = clone_b_bob_state(u, s)?;
                    dists[0][si][bi] = outcome_distribution(ArrivingSignal::TwoPhoton(&bob_state), bob, model)?;
                }
                _ => unreachable!("cloning attacks always carry a unitary"),
            }
        }
    }
    Ok(ProcessTable { p, dists })
}

fn analytic_rates(t: &ProcessTable) -> AnalyticRates {
    let (mut raw, mut dbl, mut mdbl, mut sift, mut err) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (si, s) in Bb84Signal::ALL.into_iter().enumerate() {
        for bob in Basis::ALL {
            for (branch, w) in [(0, t.p), (1, 1.0 - t.p)] {
                let d = t.dist(branch, si, bob);
                let weight = w * 0.25 * 0.5;
                raw += weight * d.click();
                dbl += weight * d.double;
                if bob == s.basis() {
                    mdbl += weight * d.double;
                    sift += weight * d.click();
                    let wrong = if s.bit() == 0 { d.click1 } else { d.click0 };
                    err += weight * (wrong + 0.5 * d.double);
                }
            }
        }
    }
    AnalyticRates { raw_click: raw, double_click: dbl, matching_double_click: mdbl, sifted_error: err / sift }
}

fn run_chunk(t: &ProcessTable, seed: u64, chunk: u64, pulses: u64) -> Counts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut c = Counts { pulses, ..Default::default() };
    for _ in 0..pulses {
        let si = rng.gen_range(0..4);
        let sent = Bb84Signal::ALL[si];
        let branch = usize::from(rng.gen::<f64>() >= t.p);
        let bob = if rng.gen::<bool>() { Basis::Rectilinear } else { Basis::Diagonal };
        let out = t.dist(branch, si, bob).sample_with(rng.gen::<f64>());
        if out != DetectionOutcome::Vacuum {
            c.clicks += 1;
        }
        let is_double = out == DetectionOutcome::DoubleClick;
        c.doubles += u64::from(is_double);
        if bob == sent.basis() {
            let b = basis_index(bob);
            c.matching[b] += 1;
            c.matching_doubles[b] += u64::from(is_double);
        }
        match sifted_outcome(out, sent, bob, &mut rng) {
            SiftResult::Correct => c.sifted += 1,
            SiftResult::Error => {
                c.sifted += 1;
                c.errors += 1;
            }
            SiftResult::DiscardedVacuum | SiftResult::MismatchedBasis => {}
        }
    }
    c
}

/// Simulates `n_pulses` pulses of the attacked protocol. Only `η_det` of the
/// scenario enters: at matched rate Eve's processes replace the channel.
pub fn monte_carlo_protocol(scen: &ChannelScenario, attack: AttackSpec, n_pulses: u64, seed: u64) -> Result<MonteCarloStats> {
    if n_pulses == 0 {
        return Err(Error::Precondition("n_pulses must be at least 1".into()));
    }
    let eta_det = scen.eta_det();
    let model = DetectorModel::with_efficiency(eta_det)?;
    let p = matched_two_photon_fraction(eta_det)?;
    let table = build_table(&attack, &model, p)?;

    let base = n_pulses / CHUNKS;
    let extra = n_pulses % CHUNKS;
    let counts = (0..CHUNKS)
        .into_par_iter()
        .map(|k| run_chunk(&table, seed, k, base + u64::from(k < extra)))
        .reduce(Counts::default, Counts::merge);

    let matching_total = counts.matching[0] + counts.matching[1];
    Ok(MonteCarloStats {
        attack,
        eta_det,
        n_pulses,
        seed,
        two_photon_fraction: p,
        raw_click: Estimate::new(counts.clicks, counts.pulses),
        double_click: Estimate::new(counts.doubles, counts.pulses),
        matching_double_click: Estimate::new(counts.matching_doubles[0] + counts.matching_doubles[1], matching_total),
        matching_double_click_by_basis: [
            Estimate::new(counts.matching_doubles[0], counts.matching[0]),
            Estimate::new(counts.matching_doubles[1], counts.matching[1]),
        ],
        sifted_error: Estimate::new(counts.errors, counts.sifted),
        analytic: analytic_rates(&table),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scen(eta: f64) -> ChannelScenario {
        ChannelScenario::from_loss_db(0.1, eta, 10.0).unwrap()
    }

    #[test]
    fn pns_never_double_clicks_in_matching_basis() {
        let s = monte_carlo_protocol(&scen(0.2), AttackSpec::Pns { d: 0.1 }, 200_000, 5).unwrap();
        assert_eq!(s.matching_double_click.count, 0);
        assert_eq!(s.double_click.count, 0);
        assert!(s.raw_click.z_score(0.2).abs() < 4.0);
        assert!(s.sifted_error.z_score(s.analytic.sifted_error).abs() < 4.0);
    }

    #[test]
    fn cloners_double_click_in_both_bases() {
        for attack in [AttackSpec::clone_a_at(0.1).unwrap(), AttackSpec::clone_b_at(0.1).unwrap()] {
            let s = monte_carlo_protocol(&scen(0.2), attack, 200_000, 11).unwrap();
            for e in s.matching_double_click_by_basis {
                assert!(e.count > 0 && e.rate > 5.0 * e.std_err, "{attack:?} {e:?}");
            }
            assert!(s.raw_click.z_score(0.2).abs() < 4.0);
            // sifted error given a click is the disturbance
            assert!(s.sifted_error.z_score(0.1).abs() < 4.0, "{attack:?} {:?}", s.sifted_error);
            assert!((s.analytic.sifted_error - 0.1).abs() < 1e-9);
        }
    }

    #[test]
    fn analytic_raw_rate_is_eta() {
        for eta in [0.1, 0.5, 1.0] {
            for attack in [AttackSpec::Pns { d: 0.2 }, AttackSpec::CloneA { beta: 0.2 }, AttackSpec::CloneB { gamma: 1.0 }] {
                let model = DetectorModel::with_efficiency(eta).unwrap();
                let t = build_table(&attack, &model, matched_two_photon_fraction(eta).unwrap()).unwrap();
                assert!((analytic_rates(&t).raw_click - eta).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn seed_determinism_and_thread_independence() {
        let a = monte_carlo_protocol(&scen(0.3), AttackSpec::CloneA { beta: 0.2 }, 50_000, 42).unwrap();
        let b = monte_carlo_protocol(&scen(0.3), AttackSpec::CloneA { beta: 0.2 }, 50_000, 42).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| monte_carlo_protocol(&scen(0.3), AttackSpec::CloneA { beta: 0.2 }, 50_000, 42).unwrap());
        assert_eq!(a, c);
        let d = monte_carlo_protocol(&scen(0.3), AttackSpec::CloneA { beta: 0.2 }, 50_000, 43).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn standard_error_scales_as_inverse_root_n() {
        let attack = AttackSpec::CloneB { gamma: 1.0 };
        let small = monte_carlo_protocol(&scen(0.2), attack, 40_000, 1).unwrap();
        let large = monte_carlo_protocol(&scen(0.2), attack, 160_000, 1).unwrap();
        let ratio = small.double_click.std_err / large.double_click.std_err;
        assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn rejects_empty_runs() {
        assert!(monte_carlo_protocol(&scen(0.2), AttackSpec::Pns { d: 0.1 }, 0, 1).is_err());
    }
}
