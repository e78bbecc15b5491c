//! The three two-photon eavesdropping processes compared at equal raw bit
//! rate.
//!
//! * **PNS process.** With probability `p` a two-photon pulse arrives; Eve
//!   keeps one photon and forwards the other. Single-photon pulses
//!   (probability `1−p`) get the optimal individual attack with disturbance
//!   `D`.
//! * **Strategy A.** Two-photon pulses go through a 2→3 universal asymmetric
//!   cloner; Eve keeps a two-qubit probe and forwards two photons. Single
//!   photons are blocked.
//! * **Strategy B.** As A, with a phase-covariant cloner parameterized by
//!   `γ ∈ [0, π]`.
//!
//! Qubit order in the four-qubit cloner space is `(bob₁, bob₂, eve₁, eve₂)`;
//! Bob's two photons are the first factor of `C⁴ ⊗ C⁴`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{outcome_distribution, ArrivingSignal, DetectorModel};
use crate::error::check_range;
use crate::infotheory::{fuchs_information, phi};
use crate::linalg::{
    pauli_x, pauli_y, pauli_z, re, reduce_pure, unitary_extension, DensityOperator, Ket, Operator,
    Subsystem, Tensor, I,
};
use crate::optics::{basis_ket, Bb84Signal, SymmetricTwoQubit};
use crate::roots::bisect_monotone;
use crate::{Error, Result};

/// Tolerance of the `D ↦ γ` inversion on the strategy-B branch `[0, π/2]`.
pub const GAMMA_INVERSION_TOL: f64 = 1e-10;

/// Largest disturbance reachable by strategy A (and by strategy B on its
/// monotone branch).
pub const CLONER_MAX_DISTURBANCE: f64 = 0.25;

// ---------------------------------------------------------------------------
// PNS

/// `I = p + (1−p)/2 · Φ(2√(D(1−D)))`.
pub fn pns_information(p: f64, d: f64) -> Result<f64> {
    check_range("p", p, 0.0, 1.0, "[0, 1]")?;
    Ok(p + (1.0 - p) * fuchs_information(d)?)
}

/// Two-photon fraction giving the PNS process the same raw click rate as the
/// cloning processes: `p = 1/(2 − η_det)`.
pub fn matched_two_photon_fraction(eta_det: f64) -> Result<f64> {
    check_range("eta_det", eta_det, 0.0, 1.0, "[0, 1]")?;
    Ok(1.0 / (2.0 - eta_det))
}

/// PNS information at the matched rate,
/// `1/(2−η) · {1 + (1−η)/2 · Φ(2√(D(1−D)))}`.
pub fn pns_information_matched(eta_det: f64, d: f64) -> Result<f64> {
    check_range("eta_det", eta_det, 0.0, 1.0, "[0, 1]")?;
    check_range("D", d, 0.0, 0.5, "[0, 1/2]")?;
    let f = phi(2.0 * (d * (1.0 - d)).sqrt())?;
    Ok((1.0 + 0.5 * (1.0 - eta_det) * f) / (2.0 - eta_det))
}

// ---------------------------------------------------------------------------
// Shared two-photon plumbing

fn bell(sign_phi: bool, plus: bool) -> Ket {
    let h = FRAC_1_SQRT_2;
    let s = if plus { h } else { -h };
    if sign_phi {
        Ket::from_real(&[h, 0.0, 0.0, s]).unwrap()
    } else {
        Ket::from_real(&[0.0, h, s, 0.0]).unwrap()
    }
}

/// `|φ+⟩ = (|00⟩+|11⟩)/√2`.
pub fn phi_plus() -> Ket {
    bell(true, true)
}

/// `|φ−⟩ = (|00⟩−|11⟩)/√2`.
pub fn phi_minus() -> Ket {
    bell(true, false)
}

/// `|ψ+⟩ = (|01⟩+|10⟩)/√2`.
pub fn psi_plus() -> Ket {
    bell(false, true)
}

/// `|ψ−⟩ = (|01⟩−|10⟩)/√2`.
pub fn psi_minus() -> Ket {
    bell(false, false)
}

/// Orthonormal basis `|00⟩, |ψ+⟩, |11⟩` of the two-qubit symmetric subspace.
pub fn symmetric_basis() -> [Ket; 3] {
    [Ket::basis(4, 0), psi_plus(), Ket::basis(4, 3)]
}

/// The domain of a cloner: `(symmetric basis) ⊗ |00⟩`.
fn cloner_domain() -> Vec<Ket> {
    let blank = Ket::basis(4, 0);
    symmetric_basis().iter().map(|k| k.tensor(&blank)).collect()
}

/// Bob's two photons and Eve's probe after a cloner.
#[derive(Clone, Debug)]
pub struct CloneOutput {
    pub bob: Operator,
    pub eve: Operator,
}

/// Applies a four-qubit cloner to `|input⟩|00⟩` and splits the result.
pub fn clone_output(unitary: &Operator, input: &SymmetricTwoQubit) -> Result<CloneOutput> {
    if unitary.dim() != 16 {
        return Err(Error::DimensionMismatch { expected: 16, actual: unitary.dim() });
    }
    let out = unitary.apply(&input.ket().tensor(&Ket::basis(4, 0)));
    Ok(CloneOutput {
        bob: reduce_pure(&out, Subsystem::A, (4, 4))?,
        eve: reduce_pure(&out, Subsystem::B, (4, 4))?,
    })
}

/// Sifted error rate of a forwarded two-photon state (double clicks assigned
/// a random bit). Independent of `η_det` for two-photon inputs.
pub fn two_photon_sifted_error(bob: &Operator, sent: Bb84Signal, model: &DetectorModel) -> Result<f64> {
    let dist = outcome_distribution(ArrivingSignal::TwoPhoton(bob), sent.basis(), model)?;
    Ok(dist.sifted_error_given_click(sent.bit()))
}

fn ideal_detector() -> DetectorModel {
    DetectorModel::with_efficiency(1.0).expect("valid model")
}

// ---------------------------------------------------------------------------
// Strategy A: universal asymmetric 2→3 cloner

/// Cloner weights with `α² + 8β² = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloneAParams {
    beta: f64,
}

impl CloneAParams {
    pub const MAX_BETA: f64 = 0.353_553_390_593_273_8; // 1/√8

    pub fn new(beta: f64) -> Result<Self> {
        check_range("beta", beta, 0.0, Self::MAX_BETA, "[0, 1/√8]")?;
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> f64 {
        (1.0 - 8.0 * self.beta * self.beta).max(0.0).sqrt()
    }

    /// The `β` whose cloner disturbs the sifted key by `d`, found by bisection
    /// on the disturbance computed from the explicit unitary.
    pub fn for_disturbance(d: f64) -> Result<Self> {
        check_range("D", d, 0.0, CLONER_MAX_DISTURBANCE, "[0, 1/4]")?;
        let f = |beta: f64| strategy_a_disturbance(&CloneAParams { beta }).unwrap_or(f64::NAN);
        let beta = bisect_monotone(f, d, 0.0, Self::MAX_BETA, 1e-15, 1e-14)?;
        Self::new(beta)
    }
}

/// `σ̃_k = σ_k ⊗ 𝟙 + 𝟙 ⊗ σ_k`.
fn sigma_tilde(sigma: &Operator) -> Operator {
    let id = Operator::identity(2);
    sigma.tensor(&id).add(&id.tensor(sigma))
}

/// `α|φ⟩|φ+⟩ + β(σ̃_z|φ⟩|φ−⟩ + σ̃_x|φ⟩|ψ+⟩ + iσ̃_y|φ⟩|ψ−⟩)` for `|φ⟩` in the
/// symmetric subspace.
fn strategy_a_image(params: &CloneAParams, input: &Ket) -> Ket {
    let (a, b) = (params.alpha(), params.beta);
    let sz = sigma_tilde(&pauli_z()).apply(input);
    let sx = sigma_tilde(&pauli_x()).apply(input);
    let sy = sigma_tilde(&pauli_y()).apply(input);
    input
        .tensor(&phi_plus())
        .scale(re(a))
        .add(&sz.tensor(&phi_minus()).scale(re(b)))
        .add(&sx.tensor(&psi_plus()).scale(re(b)))
        .add(&sy.tensor(&psi_minus()).scale(I * b))
}

/// The strategy-A cloner as a 16×16 unitary: it acts as the cloning map on
/// `(symmetric subspace) ⊗ |00⟩` and is completed arbitrarily elsewhere.
pub fn strategy_a_unitary(params: &CloneAParams) -> Result<Operator> {
    let images: Vec<Ket> = symmetric_basis().iter().map(|k| strategy_a_image(params, k)).collect();
    unitary_extension(&cloner_domain(), &images)
}

/// Sifted-key disturbance of strategy A, averaged over the four signals,
/// computed from Bob's reduced state.
pub fn strategy_a_disturbance(params: &CloneAParams) -> Result<f64> {
    let u = strategy_a_unitary(params)?;
    let model = ideal_detector();
    let mut total = 0.0;
    for s in Bb84Signal::ALL {
        let out = clone_output(&u, &crate::optics::symmetric_encode(s))?;
        total += two_photon_sifted_error(&out.bob, s, &model)?;
    }
    Ok(total / 4.0)
}

/// `|φ_±⟩ = (√(1−4D)|φ+⟩ ± √(2D)|ψ+⟩)/√(1−2D)`.
pub fn strategy_a_block_states(d: f64) -> Result<(Ket, Ket)> {
    check_range("D", d, 0.0, CLONER_MAX_DISTURBANCE, "[0, 1/4]")?;
    let n = 1.0 / (1.0 - 2.0 * d).sqrt();
    let a = phi_plus().scale(re((1.0 - 4.0 * d).max(0.0).sqrt() * n));
    let b = psi_plus().scale(re((2.0 * d).sqrt() * n));
    Ok((a.add(&b), a.sub(&b)))
}

/// Eve's probe for the diagonal two-photon signals `|++⟩`, `|−−⟩`:
/// `ρ± = 2D |∓±⟩⟨∓±| + (1−2D) |φ_±⟩⟨φ_±|`, in the computational basis.
pub fn strategy_a_probe_states(d: f64) -> Result<(DensityOperator, DensityOperator)> {
    let (vp, vm) = strategy_a_block_states(d)?;
    let plus = basis_ket(crate::optics::Basis::Diagonal, 0);
    let minus = basis_ket(crate::optics::Basis::Diagonal, 1);
    let mp = minus.tensor(&plus);
    let pm = plus.tensor(&minus);
    let rho_p = mp.projector().scale(re(2.0 * d)).add(&vp.projector().scale(re(1.0 - 2.0 * d)));
    let rho_m = pm.projector().scale(re(2.0 * d)).add(&vm.projector().scale(re(1.0 - 2.0 * d)));
    Ok((DensityOperator::new(rho_p)?, DensityOperator::new(rho_m)?))
}

/// `⟨φ_+|φ_−⟩ = (1−6D)/(1−2D)`.
pub fn strategy_a_overlap(d: f64) -> Result<f64> {
    check_range("D", d, 0.0, CLONER_MAX_DISTURBANCE, "[0, 1/4]")?;
    Ok((1.0 - 6.0 * d) / (1.0 - 2.0 * d))
}

/// `I_A = 2D + (1−2D)/2 · Φ(√(8D(1−4D))/(1−2D))`.
pub fn strategy_a_information(d: f64) -> Result<f64> {
    check_range("D", d, 0.0, CLONER_MAX_DISTURBANCE, "[0, 1/4]")?;
    let arg = (8.0 * d * (1.0 - 4.0 * d)).max(0.0).sqrt() / (1.0 - 2.0 * d);
    Ok(2.0 * d + 0.5 * (1.0 - 2.0 * d) * phi(arg)?)
}

// ---------------------------------------------------------------------------
// Strategy B: phase-covariant 2→3 cloner

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloneBParams {
    gamma: f64,
}

impl CloneBParams {
    pub fn new(gamma: f64) -> Result<Self> {
        check_range("gamma", gamma, 0.0, PI, "[0, π]")?;
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The `γ ∈ [0, π/2]` with `D(γ) = d`.
    pub fn for_disturbance(d: f64) -> Result<Self> {
        Self::new(gamma_for_disturbance(d)?)
    }
}

fn three_qubit(bits: [u8; 3], flip: bool) -> Ket {
    let idx = bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from((b ^ u8::from(flip)) == 1));
    Ket::basis(8, idx)
}

/// Images of `|00⟩|0⟩`, `|ψ+⟩|0⟩`, `|11⟩|0⟩` under `V` (or under `Ṽ`, which
/// swaps zeros and ones in every output).
pub fn strategy_b_v_images(params: &CloneBParams, tilde: bool) -> [Ket; 3] {
    let (c, s) = (params.gamma.cos(), params.gamma.sin());
    let k = |b| three_qubit(b, tilde);
    let i00 = k([0, 0, 0]);
    let ipsi = k([0, 1, 0]).add(&k([1, 0, 0])).scale(re(c)).add(&k([0, 0, 1]).scale(re(s)));
    let ipsi = ipsi.scale(re(1.0 / (1.0 + c * c).sqrt()));
    let i11 = k([1, 1, 0]).scale(re(c)).add(&k([0, 1, 1]).add(&k([1, 0, 1])).scale(re(s)));
    let i11 = i11.scale(re(1.0 / (1.0 + s * s).sqrt()));
    [i00, ipsi, i11]
}

/// The strategy-B cloner `|φ⟩|00⟩ ↦ (V|φ⟩|0⟩)|0⟩ + (Ṽ|φ⟩|0⟩)|1⟩`, scaled by
/// `1/√2` so the map is isometric, completed to a 16×16 unitary.
pub fn strategy_b_unitary(params: &CloneBParams) -> Result<Operator> {
    let v = strategy_b_v_images(params, false);
    let vt = strategy_b_v_images(params, true);
    let zero = Ket::basis(2, 0);
    let one = Ket::basis(2, 1);
    let images: Vec<Ket> = v
        .iter()
        .zip(&vt)
        .map(|(a, b)| a.tensor(&zero).add(&b.tensor(&one)).scale(re(FRAC_1_SQRT_2)))
        .collect();
    unitary_extension(&cloner_domain(), &images)
}

/// The six entries of Eve's strategy-B probe (times 16) in the
/// `|++⟩, |+−⟩, |−+⟩, |−−⟩` basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyBCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl StrategyBCoefficients {
    pub fn as_array(&self) -> [f64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }
}

pub fn strategy_b_coefficients(gamma: f64) -> Result<StrategyBCoefficients> {
    check_range("gamma", gamma, 0.0, PI, "[0, π]")?;
    let (s, c) = gamma.sin_cos();
    let (s2, c2) = (2.0 * gamma).sin_cos();
    let c4 = (4.0 * gamma).cos();
    let root3 = (3.0 + c2).sqrt(); // √(3 + cos 2γ)
    let root_s = (1.0 + s * s).sqrt(); // √(1 + sin²γ)
    let shared_ac = 2.0 * c / root_s
        + c * c * (8.0 / (1.0 + c * c) + 1.0 / (1.0 + s * s))
        + 4.0 * s * s * (1.0 / (3.0 + c2) + 1.0 / (1.0 + s * s));
    let odd_ac = 4.0 * s / root3 + 10.0 * s2 / (root3 * root_s);
    let a = 1.0 + odd_ac + shared_ac;
    let cc = 1.0 - odd_ac + shared_ac;
    let b = 1.0
        + 2.0 * c / root_s
        + 8.0 * s * s * (9.0 + c2) / (-17.0 + c4)
        + c * c * (8.0 / (1.0 + c * c) + 1.0 / (1.0 + s * s));
    let shared_df = 1.0 + 4.0 * s * s / (3.0 + c2) + c * c / (1.0 + s * s) - 2.0 * c / root_s;
    let d = shared_df + 4.0 * s * (-c + root_s) / (root3 * root_s);
    let e = 1.0 - 4.0 * s * s / (3.0 + c2) + c * c / (1.0 + s * s) - 2.0 * c / root_s;
    let f = shared_df - 4.0 * s / root3 + 2.0 * s2 / (root3 * root_s);
    Ok(StrategyBCoefficients { a, b, c: cc, d, e, f })
}

/// `ρ±` assembled from coefficients, in the diagonal product basis
/// `(|++⟩, |+−⟩, |−+⟩, |−−⟩)`. `ρ−` swaps `a↔c` and `d↔f`.
pub fn probe_states_from_coefficients(k: &StrategyBCoefficients) -> Result<(DensityOperator, DensityOperator)> {
    let m = |a: f64, c: f64, d: f64, f: f64| {
        Operator::from_real_rows(&[
            &[a / 16.0, 0.0, 0.0, k.b / 16.0],
            &[0.0, d / 16.0, k.e / 16.0, 0.0],
            &[0.0, k.e / 16.0, f / 16.0, 0.0],
            &[k.b / 16.0, 0.0, 0.0, c / 16.0],
        ])
    };
    Ok((
        DensityOperator::new(m(k.a, k.c, k.d, k.f)?)?,
        DensityOperator::new(m(k.c, k.a, k.f, k.d)?)?,
    ))
}

pub fn strategy_b_probe_states(gamma: f64) -> Result<(DensityOperator, DensityOperator)> {
    probe_states_from_coefficients(&strategy_b_coefficients(gamma)?)
}

/// `D = ½{1 − (cos γ + 1/√(1+sin²γ)) / √(2(1+cos²γ))}`.
pub fn strategy_b_disturbance(gamma: f64) -> Result<f64> {
    check_range("gamma", gamma, 0.0, PI, "[0, π]")?;
    let (s, c) = gamma.sin_cos();
    Ok(0.5 * (1.0 - (c + 1.0 / (1.0 + s * s).sqrt()) / (2.0 * (1.0 + c * c)).sqrt()))
}

/// `I_B = {(a+c)Φ((a−c)/(a+c)) + (d+f)Φ((d−f)/(d+f))}/32`; a block with zero
/// weight contributes nothing.
pub fn information_from_coefficients(k: &StrategyBCoefficients) -> Result<f64> {
    let term = |x: f64, y: f64| -> Result<f64> {
        let w = x + y;
        if w <= 1e-15 {
            Ok(0.0)
        } else {
            Ok(w * phi((x - y) / w)?)
        }
    };
    Ok((term(k.a, k.c)? + term(k.d, k.f)?) / 32.0)
}

pub fn strategy_b_information(gamma: f64) -> Result<f64> {
    information_from_coefficients(&strategy_b_coefficients(gamma)?)
}

/// Inverts [`strategy_b_disturbance`] on its monotone branch `γ ∈ [0, π/2]`.
pub fn gamma_for_disturbance(d: f64) -> Result<f64> {
    check_range("D", d, 0.0, CLONER_MAX_DISTURBANCE, "[0, 1/4]")?;
    let f = |g: f64| strategy_b_disturbance(g).unwrap_or(f64::NAN);
    bisect_monotone(f, d, 0.0, FRAC_PI_2, 1e-16, 1e-13)
}

// ---------------------------------------------------------------------------
// Curves

/// Eve's information for the three processes at one disturbance. Cloner
/// fields are `None` where the cloner cannot produce that disturbance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackCurvePoint {
    pub d: f64,
    pub i_pns: f64,
    pub i_a: Option<f64>,
    pub i_b: Option<f64>,
}

pub fn curve_point(eta_det: f64, d: f64) -> Result<AttackCurvePoint> {
    let i_pns = pns_information_matched(eta_det, d)?;
    let (i_a, i_b) = if d <= CLONER_MAX_DISTURBANCE {
        let g = gamma_for_disturbance(d)?;
        (Some(strategy_a_information(d)?), Some(strategy_b_information(g)?))
    } else {
        (None, None)
    };
    Ok(AttackCurvePoint { d, i_pns, i_a, i_b })
}

/// Evaluates [`curve_point`] over a disturbance grid, in parallel.
pub fn information_curves(eta_det: f64, d_grid: &[f64]) -> Result<Vec<AttackCurvePoint>> {
    check_range("eta_det", eta_det, 0.0, 1.0, "[0, 1]")?;
    d_grid.par_iter().map(|&d| curve_point(eta_det, d)).collect()
}

/// `n ≥ 2` evenly spaced points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{symmetric_encode, Basis};

    #[test]
    fn pns_examples() {
        assert_eq!(pns_information(0.3, 0.0).unwrap(), 0.3);
        for d in [0.0, 0.1, 0.33, 0.5] {
            assert!((pns_information(1.0, d).unwrap() - 1.0).abs() < 1e-15);
            assert!((pns_information(0.0, d).unwrap() - fuchs_information(d).unwrap()).abs() < 1e-15);
        }
        assert!(pns_information(1.1, 0.1).is_err());
        assert!(pns_information(0.5, 0.6).is_err());
    }

    #[test]
    fn matched_fraction() {
        assert_eq!(matched_two_photon_fraction(1.0).unwrap(), 1.0);
        assert_eq!(matched_two_photon_fraction(0.0).unwrap(), 0.5);
        assert!((matched_two_photon_fraction(0.2).unwrap() - 1.0 / 1.8).abs() < 1e-15);
    }

    #[test]
    fn matched_pns_examples() {
        assert!((pns_information_matched(0.9, 0.0).unwrap() - 1.0 / 1.1).abs() < 1e-15);
        for d in [0.0, 0.2, 0.5] {
            assert!((pns_information_matched(1.0, d).unwrap() - 1.0).abs() < 1e-15);
        }
        for i in 0..=20 {
            for j in 0..=20 {
                let (eta, d) = (i as f64 / 20.0, j as f64 / 40.0);
                let composed = pns_information(matched_two_photon_fraction(eta).unwrap(), d).unwrap();
                assert!((pns_information_matched(eta, d).unwrap() - composed).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn matched_pns_monotone() {
        for j in 1..50 {
            let d = j as f64 / 100.0;
            let mut prev = 0.0;
            for i in 0..=20 {
                let v = pns_information_matched(i as f64 / 20.0, d).unwrap();
                assert!(v > prev);
                prev = v;
            }
        }
        for i in 0..20 {
            let eta = i as f64 / 20.0;
            let mut prev = 0.0;
            for j in 1..=50 {
                let v = pns_information_matched(eta, j as f64 / 100.0).unwrap();
                assert!(v > prev);
                prev = v;
            }
        }
    }

    #[test]
    fn clone_a_params() {
        let p = CloneAParams::new(0.2).unwrap();
        assert!((p.alpha().powi(2) + 8.0 * p.beta().powi(2) - 1.0).abs() < 1e-12);
        assert!(CloneAParams::new(0.36).is_err());
    }

    #[test]
    fn strategy_a_identity_at_zero_beta() {
        let u = strategy_a_unitary(&CloneAParams::new(0.0).unwrap()).unwrap();
        for s in Bb84Signal::ALL {
            let input = symmetric_encode(s);
            let out = u.apply(&input.ket().tensor(&Ket::basis(4, 0)));
            let expect = input.ket().tensor(&phi_plus());
            assert!(out.sub(&expect).norm_sqr() < 1e-28);
        }
    }

    #[test]
    fn strategy_a_is_unitary_and_norm_preserving() {
        let u = strategy_a_unitary(&CloneAParams::new(0.2).unwrap()).unwrap();
        assert!(u.adjoint().mul(&u).max_abs_diff(&Operator::identity(16)) < 1e-12);
        for s in Bb84Signal::ALL {
            let out = u.apply(&symmetric_encode(s).ket().tensor(&Ket::basis(4, 0)));
            assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn strategy_a_output_stays_symmetric() {
        for beta in [0.05, 0.13, 0.27, CloneAParams::MAX_BETA] {
            let u = strategy_a_unitary(&CloneAParams::new(beta).unwrap()).unwrap();
            for s in Bb84Signal::ALL {
                let out = clone_output(&u, &symmetric_encode(s)).unwrap();
                let singlet = out.bob.expectation(&psi_minus()).re;
                assert!(singlet.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn strategy_a_disturbance_is_two_beta_squared() {
        // observed relation of the explicit unitary
        for beta in [0.0, 0.05, 0.1, 0.2, 0.3, CloneAParams::MAX_BETA] {
            let d = strategy_a_disturbance(&CloneAParams::new(beta).unwrap()).unwrap();
            assert!((d - 2.0 * beta * beta).abs() < 1e-12, "beta {beta} D {d}");
        }
        let p = CloneAParams::for_disturbance(0.1).unwrap();
        assert!((p.beta() - 0.05f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn strategy_a_probe_examples() {
        let (rp, rm) = strategy_a_probe_states(0.0).unwrap();
        let pure = phi_plus().projector();
        assert!(rp.operator().max_abs_diff(&pure) < 1e-15);
        assert!(rm.operator().max_abs_diff(&pure) < 1e-15);
        assert!(strategy_a_overlap(1.0 / 6.0).unwrap().abs() < 1e-15);
        for k in 0..=25 {
            let d = k as f64 / 100.0;
            let (vp, vm) = strategy_a_block_states(d).unwrap();
            let direct = vp.inner(&vm);
            assert!((direct.re - strategy_a_overlap(d).unwrap()).abs() < 1e-12);
            assert!(direct.im.abs() < 1e-15);
            let (rp, rm) = strategy_a_probe_states(d).unwrap();
            assert!(crate::linalg::check_density(rp.operator(), 1e-9));
            assert!(crate::linalg::check_density(rm.operator(), 1e-9));
        }
        assert!(strategy_a_probe_states(0.26).is_err());
    }

    #[test]
    fn strategy_a_information_examples() {
        assert_eq!(strategy_a_information(0.0).unwrap(), 0.0);
        assert!((strategy_a_information(0.25).unwrap() - 0.5).abs() < 1e-15);
        // 0.2 + 0.4·Φ(√0.48/0.8)
        let arg: f64 = 0.48f64.sqrt() / 0.8;
        let expect = 0.2 + 0.4 * ((1.0 + arg) * (1.0 + arg).log2() + (1.0 - arg) * (1.0 - arg).log2());
        let v = strategy_a_information(0.1).unwrap();
        assert!((v - expect).abs() < 1e-14);
        assert!((v - 0.7164).abs() < 1e-4);
        assert!(strategy_a_information(0.3).is_err());
    }

    #[test]
    fn strategy_b_identity_limit() {
        let p = CloneBParams::new(0.0).unwrap();
        let v = strategy_b_v_images(&p, false);
        assert_eq!(v[0], Ket::basis(8, 0));
        let expect = Ket::basis(8, 0b010).add(&Ket::basis(8, 0b100)).scale(re(FRAC_1_SQRT_2));
        assert!(v[1].sub(&expect).norm_sqr() < 1e-30);
    }

    #[test]
    fn strategy_b_is_isometric() {
        let u = strategy_b_unitary(&CloneBParams::new(1.0).unwrap()).unwrap();
        assert!(u.adjoint().mul(&u).max_abs_diff(&Operator::identity(16)) < 1e-12);
        let domain = cloner_domain();
        let v = domain[0].scale(re(0.3)).add(&domain[1].scale(crate::linalg::C64::new(0.4, -0.5)))
            .add(&domain[2].scale(re(0.2)));
        assert!((u.apply(&v).norm_sqr() - v.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn strategy_b_tilde_is_bit_flip_of_v() {
        let p = CloneBParams::new(0.7).unwrap();
        let x3 = pauli_x().tensor(&pauli_x()).tensor(&pauli_x());
        let v = strategy_b_v_images(&p, false);
        let vt = strategy_b_v_images(&p, true);
        for (a, b) in v.iter().zip(&vt) {
            assert!(x3.apply(a).sub(b).norm_sqr() < 1e-30);
        }
    }

    #[test]
    fn strategy_b_output_symmetric() {
        for g in [0.0, 0.4, 1.3, 2.5, PI] {
            let u = strategy_b_unitary(&CloneBParams::new(g).unwrap()).unwrap();
            for s in Bb84Signal::ALL {
                let out = clone_output(&u, &symmetric_encode(s)).unwrap();
                assert!(out.bob.expectation(&psi_minus()).re.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn strategy_b_coefficient_examples() {
        let k = strategy_b_coefficients(0.0).unwrap();
        let expect = [8.0, 8.0, 8.0, 0.0, 0.0, 0.0];
        for (x, y) in k.as_array().iter().zip(expect) {
            assert!((x - y).abs() < 1e-14);
        }
        let k = strategy_b_coefficients(FRAC_PI_2).unwrap();
        let r2 = 2f64.sqrt();
        assert!((k.a - (5.0 + 2.0 * r2)).abs() < 1e-13);
        assert!((k.c - (5.0 - 2.0 * r2)).abs() < 1e-13);
        assert!((k.d - (3.0 + 2.0 * r2)).abs() < 1e-13);
        assert!((k.f - (3.0 - 2.0 * r2)).abs() < 1e-13);
    }

    #[test]
    fn strategy_b_c_is_a_reflected() {
        // c(γ) = a(−γ): evaluate the a-expression at −γ by flipping its odd terms
        for k in 0..=40 {
            let g = PI * k as f64 / 40.0;
            let (s, c) = (-g).sin_cos();
            let (s2, c2) = (-2.0 * g).sin_cos();
            let a_neg = 1.0
                + 4.0 * s / (3.0 + c2).sqrt()
                + 10.0 * s2 / ((3.0 + c2).sqrt() * (1.0 + s * s).sqrt())
                + 2.0 * c / (1.0 + s * s).sqrt()
                + c * c * (8.0 / (1.0 + c * c) + 1.0 / (1.0 + s * s))
                + 4.0 * s * s * (1.0 / (3.0 + c2) + 1.0 / (1.0 + s * s));
            assert!((strategy_b_coefficients(g).unwrap().c - a_neg).abs() < 1e-13);
        }
    }

    #[test]
    fn strategy_b_probe_examples() {
        let (rp, rm) = strategy_b_probe_states(0.0).unwrap();
        let ev = rp.operator().hermitian_eigenvalues();
        assert!((ev[3] - 1.0).abs() < 1e-12 && ev[2].abs() < 1e-12);
        for k in 0..=50 {
            let g = PI * k as f64 / 50.0;
            let c = strategy_b_coefficients(g).unwrap();
            assert!(((c.a + c.c + c.d + c.f) / 16.0 - 1.0).abs() < 1e-12);
            let (rp, rm) = strategy_b_probe_states(g).unwrap();
            // ρ− is ρ+ with the basis order reversed
            let rev = Operator::from_real_rows(&[
                &[0.0, 0.0, 0.0, 1.0],
                &[0.0, 0.0, 1.0, 0.0],
                &[0.0, 1.0, 0.0, 0.0],
                &[1.0, 0.0, 0.0, 0.0],
            ])
            .unwrap();
            assert!(rp.operator().conjugate_by(&rev).max_abs_diff(rm.operator()) < 1e-15);
        }
        let _ = rm;
    }

    #[test]
    fn strategy_b_disturbance_examples() {
        assert!(strategy_b_disturbance(0.0).unwrap().abs() < 1e-15);
        assert!((strategy_b_disturbance(FRAC_PI_2).unwrap() - 0.25).abs() < 1e-15);
        let mut prev = -1.0;
        for k in 0..=200 {
            let d = strategy_b_disturbance(FRAC_PI_2 * k as f64 / 200.0).unwrap();
            assert!(d > prev);
            prev = d;
        }
        for k in 0..=50 {
            let d = strategy_b_disturbance(PI * k as f64 / 50.0).unwrap();
            assert!((0.0..=1.0).contains(&d));
        }
    }

    #[test]
    fn strategy_b_information_examples() {
        assert_eq!(strategy_b_information(0.0).unwrap(), 0.0);
        // from a=5+2√2, c=5−2√2, d=3+2√2, f=3−2√2
        let r2 = 2f64.sqrt();
        let expect = (10.0 * phi(4.0 * r2 / 10.0).unwrap() + 6.0 * phi(4.0 * r2 / 6.0).unwrap()) / 32.0;
        let v = strategy_b_information(FRAC_PI_2).unwrap();
        assert!((v - expect).abs() < 1e-13);
        assert!((v - 0.4579).abs() < 1e-4);
        let sup = (0..=2000)
            .map(|k| strategy_b_information(PI * k as f64 / 2000.0).unwrap())
            .fold(0.0, f64::max);
        assert!(sup < 1.0);
    }

    #[test]
    fn gamma_inversion_round_trip() {
        for k in 0..=250 {
            let d = k as f64 / 1000.0;
            let g = gamma_for_disturbance(d).unwrap();
            assert!((0.0..=FRAC_PI_2).contains(&g));
            assert!((strategy_b_disturbance(g).unwrap() - d).abs() <= GAMMA_INVERSION_TOL);
        }
        assert!(gamma_for_disturbance(0.3).is_err());
    }

    #[test]
    fn curves_at_zero_disturbance() {
        for i in 1..=9 {
            let eta = i as f64 / 10.0;
            let pts = information_curves(eta, &[0.0]).unwrap();
            assert!((pts[0].i_pns - 1.0 / (2.0 - eta)).abs() < 1e-15);
            assert_eq!(pts[0].i_a, Some(0.0));
            assert!(pts[0].i_b.unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn curves_domains_and_eta_independence() {
        let grid = uniform_grid(0.0, 0.5, 101);
        let c2 = information_curves(0.2, &grid).unwrap();
        let c7 = information_curves(0.7, &grid).unwrap();
        for (p, q) in c2.iter().zip(&c7) {
            assert_eq!(p.i_a, q.i_a);
            assert_eq!(p.i_b, q.i_b);
            assert_eq!(p.i_a.is_none(), p.d > 0.25);
        }
        // some D beats matched PNS with strategy A at η = 0.2
        assert!(c2.iter().any(|p| p.i_a.is_some_and(|a| a > p.i_pns)));
    }

    #[test]
    fn literal_strategy_b_cloner_only_serves_the_diagonal_basis() {
        // Rectilinear two-photon signals leave the cloner fully randomized.
        let u = strategy_b_unitary(&CloneBParams::new(1.0).unwrap()).unwrap();
        let model = ideal_detector();
        for s in Bb84Signal::ALL {
            let out = clone_output(&u, &symmetric_encode(s)).unwrap();
            let err = two_photon_sifted_error(&out.bob, s, &model).unwrap();
            match s.basis() {
                Basis::Rectilinear => assert!((err - 0.5).abs() < 1e-12),
                Basis::Diagonal => assert!((err - strategy_b_disturbance(1.0).unwrap()).abs() < 1e-12),
            }
        }
    }
}
