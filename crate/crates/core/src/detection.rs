//! Bob's analyzer: a polarizing beam splitter with two threshold detectors of
//! efficiency `η_det`, described per basis by a four-outcome POVM that is
//! diagonal in the two-mode occupation states `|n,m⟩`.
//!
//! ```text
//! F_vac = Σ η̄^{n+m}                |n,m⟩⟨n,m|
//! F_0   = Σ (1 − η̄ⁿ) η̄^m           |n,m⟩⟨n,m|
//! F_1   = Σ (1 − η̄^m) η̄ⁿ           |n,m⟩⟨n,m|
//! F_D   = Σ (1 − η̄ⁿ)(1 − η̄^m)      |n,m⟩⟨n,m|      η̄ = 1 − η_det
//! ```
//!
//! Dark counts are not modelled; the error rates handled here are the channel
//! error rates left once the detector noise has been subtracted.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::check_range;
use crate::linalg::{DensityOperator, Operator, DENSITY_TOL};
use crate::optics::{basis_ket, fock_from_symmetric, Basis, Bb84Signal};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    eta_det: f64,
    cutoff: usize,
}

impl DetectorModel {
    pub fn new(eta_det: f64, cutoff: usize) -> Result<Self> {
        check_range("eta_det", eta_det, 0.0, 1.0, "[0, 1]")?;
        if cutoff < 2 {
            return Err(Error::OutOfRange { name: "cutoff", value: cutoff as f64, range: "≥ 2" });
        }
        Ok(Self { eta_det, cutoff })
    }

    /// Model with the two-photon cutoff, enough for every signal in this crate.
    pub fn with_efficiency(eta_det: f64) -> Result<Self> {
        Self::new(eta_det, 2)
    }

    pub fn eta_det(&self) -> f64 {
        self.eta_det
    }

    pub fn eta_bar(&self) -> f64 {
        1.0 - self.eta_det
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// POVM weights `(vacuum, click0, click1, double)` on `|n,m⟩`.
    pub fn weights(&self, n: usize, m: usize) -> [f64; 4] {
        let eb = self.eta_bar();
        let en = eb.powi(n as i32);
        let em = eb.powi(m as i32);
        [en * em, (1.0 - en) * em, (1.0 - em) * en, (1.0 - en) * (1.0 - em)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionOutcome {
    Vacuum,
    Click0,
    Click1,
    DoubleClick,
}

impl DetectionOutcome {
    pub const ALL: [DetectionOutcome; 4] = [
        DetectionOutcome::Vacuum,
        DetectionOutcome::Click0,
        DetectionOutcome::Click1,
        DetectionOutcome::DoubleClick,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

/// The four POVM elements of one basis on the truncated two-mode Fock space,
/// written in that basis's occupation states. Index of `|n,m⟩` is
/// `n·(cutoff+1) + m`.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmElements {
    pub basis: Basis,
    pub vacuum: Operator,
    pub click0: Operator,
    pub click1: Operator,
    pub double: Operator,
}

impl PovmElements {
    pub fn element(&self, outcome: DetectionOutcome) -> &Operator {
        match outcome {
            DetectionOutcome::Vacuum => &self.vacuum,
            DetectionOutcome::Click0 => &self.click0,
            DetectionOutcome::Click1 => &self.click1,
            DetectionOutcome::DoubleClick => &self.double,
        }
    }

    pub fn sum(&self) -> Operator {
        self.vacuum.add(&self.click0).add(&self.click1).add(&self.double)
    }
}

pub fn fock_index(n: usize, m: usize, cutoff: usize) -> usize {
    n * (cutoff + 1) + m
}

pub fn povm_elements(basis: Basis, model: &DetectorModel) -> PovmElements {
    let side = model.cutoff + 1;
    let mut diag = [vec![0.0; side * side], vec![0.0; side * side], vec![0.0; side * side], vec![0.0; side * side]];
    for n in 0..side {
        for m in 0..side {
            let w = model.weights(n, m);
            for (k, d) in diag.iter_mut().enumerate() {
                d[fock_index(n, m, model.cutoff)] = w[k];
            }
        }
    }
    let [v, c0, c1, dd] = diag;
    PovmElements {
        basis,
        vacuum: Operator::diagonal(&v),
        click0: Operator::diagonal(&c0),
        click1: Operator::diagonal(&c1),
        double: Operator::diagonal(&dd),
    }
}

/// Probabilities of the four outcomes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub vacuum: f64,
    pub click0: f64,
    pub click1: f64,
    pub double: f64,
}

impl OutcomeDistribution {
    pub fn prob(&self, outcome: DetectionOutcome) -> f64 {
        self.as_array()[outcome.index()]
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.vacuum, self.click0, self.click1, self.double]
    }

    pub fn total(&self) -> f64 {
        self.as_array().iter().sum()
    }

    pub fn click(&self) -> f64 {
        self.click0 + self.click1 + self.double
    }

    /// `a·self + b·other`.
    pub fn mix(&self, a: f64, other: &OutcomeDistribution, b: f64) -> Self {
        Self {
            vacuum: a * self.vacuum + b * other.vacuum,
            click0: a * self.click0 + b * other.click0,
            click1: a * self.click1 + b * other.click1,
            double: a * self.double + b * other.double,
        }
    }

    /// Sifted error probability given a click, for a sent bit, when double
    /// clicks are assigned a uniformly random bit.
    pub fn sifted_error_given_click(&self, sent_bit: u8) -> f64 {
        let wrong = if sent_bit == 0 { self.click1 } else { self.click0 };
        (wrong + 0.5 * self.double) / self.click()
    }

    /// Draws an outcome from `u ∈ [0, 1)`.
    pub fn sample_with(&self, u: f64) -> DetectionOutcome {
        let mut acc = 0.0;
        for o in DetectionOutcome::ALL {
            acc += self.prob(o);
            if u < acc {
                return o;
            }
        }
        DetectionOutcome::Vacuum
    }
}

/// What arrives at Bob's analyzer.
#[derive(Clone, Copy, Debug)]
pub enum ArrivingSignal<'a> {
    /// Explicit occupation probabilities `(n, m, p)` in the measured basis.
    Occupations(&'a [(usize, usize, f64)]),
    /// A one-photon polarization state (2×2 density operator).
    SinglePhoton(&'a Operator),
    /// A two-photon state in the symmetric two-qubit picture (4×4).
    TwoPhoton(&'a Operator),
}

pub fn outcome_distribution(
    input: ArrivingSignal<'_>,
    basis: Basis,
    model: &DetectorModel,
) -> Result<OutcomeDistribution> {
    let occupations: Vec<(usize, usize, f64)> = match input {
        ArrivingSignal::Occupations(occ) => occ.to_vec(),
        ArrivingSignal::SinglePhoton(rho) => {
            if rho.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, actual: rho.dim() });
            }
            DensityOperator::new(rho.clone())?;
            vec![
                (1, 0, rho.expectation(&basis_ket(basis, 0)).re),
                (0, 1, rho.expectation(&basis_ket(basis, 1)).re),
            ]
        }
        ArrivingSignal::TwoPhoton(rho) => {
            DensityOperator::new(rho.clone())?;
            let occ = fock_from_symmetric(rho, basis)?;
            vec![(2, 0, occ.p20), (1, 1, occ.p11), (0, 2, occ.p02)]
        }
    };
    let mut total = 0.0;
    let mut out = [0.0; 4];
    for &(n, m, p) in &occupations {
        if p < -DENSITY_TOL || !p.is_finite() {
            return Err(Error::Precondition(format!("negative occupation probability {p}")));
        }
        if n > model.cutoff || m > model.cutoff {
            return Err(Error::Precondition(format!(
                "occupation ({n},{m}) beyond detector cutoff {}",
                model.cutoff
            )));
        }
        total += p;
        let w = model.weights(n, m);
        for k in 0..4 {
            out[k] += p * w[k];
        }
    }
    if (total - 1.0).abs() > DENSITY_TOL {
        return Err(Error::Precondition(format!("input not normalized: total {total}")));
    }
    Ok(OutcomeDistribution { vacuum: out[0], click0: out[1], click1: out[2], double: out[3] })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiftResult {
    Correct,
    Error,
    DiscardedVacuum,
    MismatchedBasis,
}

/// Sifting of one detection event. Vacuum events are discarded regardless of
/// basis; otherwise a basis mismatch discards the event; a double click is
/// turned into a uniformly random bit.
pub fn sifted_outcome<R: Rng + ?Sized>(
    out: DetectionOutcome,
    sent: Bb84Signal,
    measured_basis: Basis,
    rng: &mut R,
) -> SiftResult {
    if out == DetectionOutcome::Vacuum {
        return SiftResult::DiscardedVacuum;
    }
    if measured_basis != sent.basis() {
        return SiftResult::MismatchedBasis;
    }
    let bob_bit = match out {
        DetectionOutcome::Click0 => 0,
        DetectionOutcome::Click1 => 1,
        _ => u8::from(rng.gen_bool(0.5)),
    };
    if bob_bit == sent.bit() {
        SiftResult::Correct
    } else {
        SiftResult::Error
    }
}
