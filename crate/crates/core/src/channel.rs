//! Click probabilities under the PNS attack, the observed-error ↔ disturbance
//! map, the transmission window in which the comparison is meaningful, and the
//! loss at which cloning starts to beat PNS.
//!
//! Throughout, Eve owns a lossless channel: she stops single photons at will
//! and forwards multi-photon remainders, so the number of clicks she can
//! induce does not depend on `η_t`, while the click rate Bob expects does.

use serde::{Deserialize, Serialize};

use crate::attacks::{pns_information_matched, strategy_a_information, strategy_b_information, CloneBParams, CLONER_MAX_DISTURBANCE};
use crate::error::check_range;
use crate::optics::poisson_photon_dist;
use crate::roots::first_true;
use crate::{Error, Result};

/// Photon-number cutoff for all scenario sums; the tail is below 1e-40 for
/// `μ ≤ 1`.
pub const PHOTON_CUTOFF: usize = 40;

/// Resolution of the crossover search.
pub const CROSSOVER_TOL_DB: f64 = 0.01;

/// Coarse scan step used before bisecting for a crossover.
const CROSSOVER_SCAN_DB: f64 = 0.05;

pub fn loss_db_from_eta(eta_t: f64) -> f64 {
    // `+ 0.0` turns the −0 of a lossless channel into 0
    -10.0 * eta_t.log10() + 0.0
}

pub fn eta_from_loss_db(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 10.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelScenario {
    mu: f64,
    eta_det: f64,
    eta_t: f64,
}

impl ChannelScenario {
    pub fn new(mu: f64, eta_det: f64, eta_t: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::OutOfRange { name: "mu", value: mu, range: "(0, ∞)" });
        }
        if !(eta_det > 0.0 && eta_det <= 1.0) {
            return Err(Error::OutOfRange { name: "eta_det", value: eta_det, range: "(0, 1]" });
        }
        if !(eta_t > 0.0 && eta_t <= 1.0) {
            return Err(Error::OutOfRange { name: "eta_t", value: eta_t, range: "(0, 1]" });
        }
        Ok(Self { mu, eta_det, eta_t })
    }

    pub fn from_loss_db(mu: f64, eta_det: f64, loss_db: f64) -> Result<Self> {
        if !(loss_db.is_finite() && loss_db >= 0.0) {
            return Err(Error::OutOfRange { name: "loss_db", value: loss_db, range: "[0, ∞)" });
        }
        Self::new(mu, eta_det, eta_from_loss_db(loss_db))
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn eta_det(&self) -> f64 {
        self.eta_det
    }

    pub fn eta_t(&self) -> f64 {
        self.eta_t
    }

    pub fn loss_db(&self) -> f64 {
        loss_db_from_eta(self.eta_t)
    }

    pub fn p_exp(&self) -> f64 {
        p_exp(self.mu, self.eta_det, self.eta_t)
    }

    pub fn p_arr_multi(&self) -> f64 {
        p_arr_multi(self.mu, self.eta_det, PHOTON_CUTOFF)
    }

    /// Ok when the scenario lies inside the transmission window, i.e. Eve can
    /// reproduce the expected click rate by stopping some single photons.
    pub fn check_regime(&self) -> Result<()> {
        let w = eta_t_bounds(self.mu, self.eta_det)?;
        if self.eta_t > w.eta_t_upper {
            return Err(Error::InvalidRegime(format!(
                "loss {:.4} dB is below the window's lower edge {:.4} dB: even forwarding every \
                 single photon Eve cannot reach the expected click rate",
                self.loss_db(),
                w.lower_db
            )));
        }
        p_arr_single(self.mu, self.eta_det, self.eta_t).map(|_| ())
    }
}

/// `Σ_{n≥2} P(n, μ)(1 − η̄^{n−1})`: probability that a multi-photon pulse,
/// after Eve keeps one photon and forwards the rest losslessly, clicks.
pub fn p_arr_multi(mu: f64, eta_det: f64, cutoff: usize) -> f64 {
    let Ok(dist) = poisson_photon_dist(mu, cutoff) else {
        return f64::NAN;
    };
    let eta_bar = 1.0 - eta_det;
    let mut total = 0.0;
    let mut miss = 1.0; // η̄^{n−1}
    for n in 2..=cutoff {
        miss *= eta_bar;
        total += dist.prob(n) * (1.0 - miss);
    }
    total
}

/// Click rate Bob expects without Eve, `1 − e^{−μ η_det η_t}`.
pub fn p_exp(mu: f64, eta_det: f64, eta_t: f64) -> f64 {
    -(-mu * eta_det * eta_t).exp_m1()
}

/// Share of the expected clicks Eve must supply from single photons,
/// `P_exp − P_arr^multi`. Negative means that multi-photon pulses alone
/// already exceed the expected rate, which is outside the analysed regime.
pub fn p_arr_single(mu: f64, eta_det: f64, eta_t: f64) -> Result<f64> {
    let v = p_exp(mu, eta_det, eta_t) - p_arr_multi(mu, eta_det, PHOTON_CUTOFF);
    if v < 0.0 || !v.is_finite() {
        return Err(Error::InvalidRegime(format!(
            "P_exp - P_arr^multi = {v:.3e} < 0 at loss {:.4} dB: multi-photon arrivals alone \
             exceed the expected click rate (transmission below the lower bound)",
            loss_db_from_eta(eta_t)
        )));
    }
    Ok(v)
}

/// `e / D = P_arr^single / P_exp`.
pub fn dilution_ratio(scen: &ChannelScenario) -> Result<f64> {
    scen.check_regime()?;
    let single = p_arr_single(scen.mu, scen.eta_det, scen.eta_t)?;
    Ok(single / scen.p_exp())
}

/// Multi-photon pulses are forwarded untouched and carry no error, so only
/// the single-photon share of the clicks shows the disturbance.
pub fn observed_error_from_disturbance(scen: &ChannelScenario, d: f64) -> Result<f64> {
    check_range("D", d, 0.0, 0.5, "[0, 1/2]")?;
    Ok(dilution_ratio(scen)? * d)
}

/// Closed form of [`observed_error_from_disturbance`] with the photon sum
/// done analytically,
/// `e = e^{−μ}(η e^{μηη_t} + e^{μ}(1−η) − e^{μ(1−η(1−η_t))}) / ((1−η)(1−e^{μηη_t})) · D`.
///
/// Evaluated in the rearranged form
/// `[η e^{a−μη} g − expm1(a−μη)] / (1 − e^{a}) · D` with `a = μηη_t` and
/// `g = expm1(−μ(1−η))/(1−η)`, which is the same function but avoids
/// cancelling O(1) exponentials and has the finite limit `g → −μ` at
/// `η_det = 1`.
pub fn observed_error_closed_form(scen: &ChannelScenario, d: f64) -> Result<f64> {
    check_range("D", d, 0.0, 0.5, "[0, 1/2]")?;
    let (mu, eta, t) = (scen.mu, scen.eta_det, scen.eta_t);
    let a = mu * eta * t;
    let one_minus = 1.0 - eta;
    let g = if one_minus == 0.0 { -mu } else { (-mu * one_minus).exp_m1() / one_minus };
    let num = eta * (a - mu * eta).exp() * g - (a - mu * eta).exp_m1();
    Ok(num / -a.exp_m1() * d)
}

/// The closed form exactly as printed, kept to show how much precision the
/// direct evaluation loses. Singular at `η_det = 1`.
pub fn observed_error_closed_form_direct(scen: &ChannelScenario, d: f64) -> Result<f64> {
    check_range("D", d, 0.0, 0.5, "[0, 1/2]")?;
    let (mu, eta, t) = (scen.mu, scen.eta_det, scen.eta_t);
    if eta >= 1.0 {
        return Err(Error::Precondition("closed form is singular at eta_det = 1".into()));
    }
    let num = eta * (mu * eta * t).exp() + mu.exp() * (1.0 - eta) - (mu * (1.0 - eta * (1.0 - t))).exp();
    let den = (1.0 - eta) * -(mu * eta * t).exp_m1();
    Ok((-mu).exp() * num / den * d)
}

/// Inverts the error map: the disturbance Eve must cause for Alice and Bob
/// to observe `e`.
pub fn disturbance_for_error(scen: &ChannelScenario, e: f64) -> Result<f64> {
    check_range("e", e, 0.0, 0.5, "[0, 1/2]")?;
    let ratio = dilution_ratio(scen)?;
    if e == 0.0 {
        return Ok(0.0);
    }
    let d = e / ratio;
    if !(d <= 0.5) {
        return Err(Error::InvalidRegime(format!(
            "observing e = {e} at loss {:.4} dB needs D = {d:.4} > 1/2",
            scen.loss_db()
        )));
    }
    Ok(d)
}

/// Transmission window `(η_t^lower, η_t^upper)` and its loss form. Losses
/// below `lower_db` are too small for Eve to mimic the expected click rate;
/// losses above `upper_db` let multi-photon pulses alone exceed it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaWindow {
    pub eta_t_lower: f64,
    pub eta_t_upper: f64,
    pub lower_db: f64,
    pub upper_db: f64,
}

impl EtaWindow {
    fn from_etas(eta_t_lower: f64, eta_t_upper: f64) -> Self {
        Self {
            eta_t_lower,
            eta_t_upper,
            lower_db: loss_db_from_eta(eta_t_upper),
            upper_db: loss_db_from_eta(eta_t_lower),
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.eta_t_lower < self.eta_t_upper)
    }

    pub fn contains_loss_db(&self, loss_db: f64) -> bool {
        loss_db >= self.lower_db && loss_db <= self.upper_db
    }
}

/// `η_t` solving `P_exp(η_t) = target`.
fn eta_t_for_click_rate(mu: f64, eta_det: f64, target: f64) -> f64 {
    -(-target).ln_1p() / (mu * eta_det)
}

/// Window edges from the photon series: the upper edge solves
/// `P_exp = η_det P(1, μ) + P_arr^multi` (capped at 1), the lower edge
/// `P_exp = P_arr^multi`.
pub fn eta_t_bounds(mu: f64, eta_det: f64) -> Result<EtaWindow> {
    ChannelScenario::new(mu, eta_det, 1.0)?;
    let multi = p_arr_multi(mu, eta_det, PHOTON_CUTOFF);
    let p1 = mu * (-mu).exp();
    let upper = eta_t_for_click_rate(mu, eta_det, eta_det * p1 + multi).min(1.0);
    let lower = eta_t_for_click_rate(mu, eta_det, multi);
    let w = EtaWindow::from_etas(lower, upper);
    if w.is_empty() {
        return Err(Error::InvalidRegime(format!(
            "empty transmission window for mu = {mu}, eta_det = {eta_det}: PNS stays optimal"
        )));
    }
    Ok(w)
}

/// Analytic window edges for `η_det < 1`:
/// `η_t^upper = −ln[e^{−μ}(e^{μ(1−η)} − η(1+μ(1−η)))/(1−η)]/(μη)` and
/// `η_t^lower = −ln[(e^{−μη} − ηe^{−μ})/(1−η)]/(μη)`.
pub fn eta_t_bounds_closed_form(mu: f64, eta_det: f64) -> Result<EtaWindow> {
    ChannelScenario::new(mu, eta_det, 1.0)?;
    if eta_det >= 1.0 {
        return Err(Error::Precondition("closed-form bounds are singular at eta_det = 1".into()));
    }
    let (m, e) = (mu, eta_det);
    let upper_arg = (-m).exp() * ((m * (1.0 - e)).exp() - e * (1.0 + m * (1.0 - e))) / (1.0 - e);
    let lower_arg = ((-m * e).exp() - e * (-m).exp()) / (1.0 - e);
    let upper = (-upper_arg.ln() / (m * e)).min(1.0);
    let lower = -lower_arg.ln() / (m * e);
    Ok(EtaWindow::from_etas(lower, upper))
}

/// The two cloning attacks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    A,
    B,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::A, Strategy::B];

    /// Eve's information at disturbance `d`, `None` outside the cloner's range.
    pub fn information(self, d: f64) -> Option<f64> {
        if !(0.0..=CLONER_MAX_DISTURBANCE).contains(&d) {
            return None;
        }
        match self {
            Strategy::A => strategy_a_information(d).ok(),
            Strategy::B => CloneBParams::for_disturbance(d)
                .and_then(|p| strategy_b_information(p.gamma()))
                .ok(),
        }
    }
}

/// Whether `strategy` yields more information than matched PNS at the
/// disturbance needed to show error `e` at `loss_db`.
pub fn cloning_beats_pns(mu: f64, eta_det: f64, e: f64, loss_db: f64, strategy: Strategy) -> bool {
    let Ok(scen) = ChannelScenario::from_loss_db(mu, eta_det, loss_db) else {
        return false;
    };
    let Ok(d) = disturbance_for_error(&scen, e) else {
        return false;
    };
    match (strategy.information(d), pns_information_matched(eta_det, d)) {
        (Some(clone), Ok(pns)) => clone > pns,
        _ => false,
    }
}

/// Smallest loss inside the window where `strategy` beats matched PNS at
/// observed error `e`, to [`CROSSOVER_TOL_DB`]. `None` when it never does
/// (always the case for `e = 0`).
pub fn crossover_loss(mu: f64, eta_det: f64, e: f64, strategy: Strategy) -> Result<Option<f64>> {
    check_range("e", e, 0.0, 0.5, "[0, 1/2]")?;
    let w = eta_t_bounds(mu, eta_det)?;
    if e == 0.0 {
        return Ok(None);
    }
    let pred = |loss: f64| cloning_beats_pns(mu, eta_det, e, loss, strategy);
    Ok(first_true(pred, w.lower_db, w.upper_db, CROSSOVER_SCAN_DB, CROSSOVER_TOL_DB))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub best: Option<f64>,
    pub best_strategy: Option<Strategy>,
}

/// Crossover for both strategies; `best` is the smaller loss.
pub fn best_crossover(mu: f64, eta_det: f64, e: f64) -> Result<Crossover> {
    let a = crossover_loss(mu, eta_det, e, Strategy::A)?;
    let b = crossover_loss(mu, eta_det, e, Strategy::B)?;
    let (best, best_strategy) = match (a, b) {
        (Some(x), Some(y)) if y < x => (Some(y), Some(Strategy::B)),
        (Some(x), _) => (Some(x), Some(Strategy::A)),
        (None, Some(y)) => (Some(y), Some(Strategy::B)),
        (None, None) => (None, None),
    };
    Ok(Crossover { a, b, best, best_strategy })
}
