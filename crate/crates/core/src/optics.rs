//! BB84 signal states, Poissonian photon statistics of phase-averaged weak
//! coherent pulses, and the symmetric two-qubit picture of two-photon pulses.
//!
//! Qubit convention: `|0⟩`, `|1⟩` is the rectilinear basis, the diagonal
//! basis is `|±⟩ = (|0⟩ ± |1⟩)/√2`. A two-photon pulse in polarization `ψ` is
//! the product `|ψ⟩|ψ⟩`, which lives in the three-dimensional symmetric
//! subspace spanned by `|00⟩`, `|ψ+⟩`, `|11⟩`.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::check_range;
use crate::linalg::{re, DensityOperator, Ket, Operator, Tensor, DENSITY_TOL};
use crate::{Error, Result};

/// Photon-number cutoff used for Poisson series unless stated otherwise.
pub const DEFAULT_FOCK_CUTOFF: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Rectilinear,
    Diagonal,
}

impl Basis {
    pub const ALL: [Basis; 2] = [Basis::Rectilinear, Basis::Diagonal];

    pub fn other(self) -> Basis {
        match self {
            Basis::Rectilinear => Basis::Diagonal,
            Basis::Diagonal => Basis::Rectilinear,
        }
    }
}

/// One of the four BB84 polarization states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bb84Signal {
    basis: Basis,
    bit: u8,
}

impl Bb84Signal {
    pub const ALL: [Bb84Signal; 4] = [
        Bb84Signal { basis: Basis::Rectilinear, bit: 0 },
        Bb84Signal { basis: Basis::Rectilinear, bit: 1 },
        Bb84Signal { basis: Basis::Diagonal, bit: 0 },
        Bb84Signal { basis: Basis::Diagonal, bit: 1 },
    ];

    pub fn new(basis: Basis, bit: u8) -> Result<Self> {
        if bit > 1 {
            return Err(Error::OutOfRange { name: "bit", value: bit as f64, range: "{0, 1}" });
        }
        Ok(Self { basis, bit })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn bit(&self) -> u8 {
        self.bit
    }

    /// `"0"`, `"1"`, `"+"` or `"-"`.
    pub fn label(&self) -> &'static str {
        match (self.basis, self.bit) {
            (Basis::Rectilinear, 0) => "0",
            (Basis::Rectilinear, _) => "1",
            (Basis::Diagonal, 0) => "+",
            (Basis::Diagonal, _) => "-",
        }
    }

    /// The orthogonal state of the same basis.
    pub fn flipped(&self) -> Self {
        Self { basis: self.basis, bit: 1 - self.bit }
    }
}

/// `|b⟩` of the given basis: `|0⟩`, `|1⟩`, `|+⟩` or `|−⟩`.
pub fn basis_ket(basis: Basis, bit: u8) -> Ket {
    let h = FRAC_1_SQRT_2;
    let amps: [f64; 2] = match (basis, bit) {
        (Basis::Rectilinear, 0) => [1.0, 0.0],
        (Basis::Rectilinear, _) => [0.0, 1.0],
        (Basis::Diagonal, 0) => [h, h],
        (Basis::Diagonal, _) => [h, -h],
    };
    Ket::from_real(&amps).expect("two amplitudes")
}

pub fn signal_ket(s: Bb84Signal) -> Ket {
    basis_ket(s.basis, s.bit)
}

/// Photon-number probabilities `P(n, μ) = e^{-μ} μⁿ / n!` for `n ≤ cutoff`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonDistribution {
    mu: f64,
    probs: Vec<f64>,
    tail_bound: f64,
}

impl PhotonDistribution {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn cutoff(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    /// Upper bound `μ^{N+1}/(N+1)!` on the probability mass beyond the cutoff.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }
}

pub fn poisson_photon_dist(mu: f64, cutoff: usize) -> Result<PhotonDistribution> {
    check_range("mu", mu, 0.0, f64::MAX, "[0, ∞)")?;
    let mut probs = Vec::with_capacity(cutoff + 1);
    let mut term = (-mu).exp();
    for n in 0..=cutoff {
        if n > 0 {
            term *= mu / n as f64;
        }
        probs.push(term);
    }
    // μ^{N+1}/(N+1)! bounds e^{-μ} Σ_{k>N} μ^k/k! for every μ ≥ 0
    let mut tail_bound = 1.0;
    for k in 1..=cutoff + 1 {
        tail_bound *= mu / k as f64;
    }
    Ok(PhotonDistribution { mu, probs, tail_bound })
}

/// `|ψ−⟩ = (|01⟩ − |10⟩)/√2`.
pub fn singlet() -> Ket {
    let h = FRAC_1_SQRT_2;
    Ket::from_real(&[0.0, h, -h, 0.0]).unwrap()
}

/// Orthonormal basis of the symmetric subspace in the given polarization
/// basis: the occupation states `|2,0⟩ = |bb⟩`, `|1,1⟩ = (|bb'⟩+|b'b⟩)/√2`,
/// `|0,2⟩ = |b'b'⟩`, where `b` is the bit-0 state of that basis.
pub fn occupation_basis(basis: Basis) -> [Ket; 3] {
    let b0 = basis_ket(basis, 0);
    let b1 = basis_ket(basis, 1);
    let n20 = b0.tensor(&b0);
    let n02 = b1.tensor(&b1);
    let n11 = b0.tensor(&b1).add(&b1.tensor(&b0)).scale(re(FRAC_1_SQRT_2));
    [n20, n11, n02]
}

/// A normalized two-qubit ket with no singlet component.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTwoQubit(Ket);

impl SymmetricTwoQubit {
    pub fn new(ket: Ket) -> Result<Self> {
        if ket.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, actual: ket.dim() });
        }
        if !ket.is_normalized(DENSITY_TOL) {
            return Err(Error::Precondition(format!("ket norm² {} ≠ 1", ket.norm_sqr())));
        }
        let anti = singlet().inner(&ket).norm_sqr();
        if anti > DENSITY_TOL {
            return Err(Error::Precondition(format!("singlet weight {anti:.3e} in symmetric state")));
        }
        Ok(Self(ket))
    }

    pub fn ket(&self) -> &Ket {
        &self.0
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::pure(&self.0).expect("normalized ket")
    }

    pub fn occupations(&self, basis: Basis) -> OccupationDistribution {
        let [n20, n11, n02] = occupation_basis(basis);
        OccupationDistribution {
            p20: n20.inner(&self.0).norm_sqr(),
            p11: n11.inner(&self.0).norm_sqr(),
            p02: n02.inner(&self.0).norm_sqr(),
        }
    }
}

pub fn symmetric_encode(s: Bb84Signal) -> SymmetricTwoQubit {
    let k = signal_ket(s);
    SymmetricTwoQubit(k.tensor(&k))
}

/// Two-photon occupation probabilities `(2,0)`, `(1,1)`, `(0,2)`. The first
/// index counts photons in the bit-0 mode of the chosen basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupationDistribution {
    pub p20: f64,
    pub p11: f64,
    pub p02: f64,
}

impl OccupationDistribution {
    pub fn total(&self) -> f64 {
        self.p20 + self.p11 + self.p02
    }
}

/// Occupation distribution of a two-photon density operator in `basis`.
/// Rejects inputs with singlet weight above [`DENSITY_TOL`].
pub fn fock_from_symmetric(rho: &Operator, basis: Basis) -> Result<OccupationDistribution> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, actual: rho.dim() });
    }
    let anti = rho.expectation(&singlet()).re;
    if anti > DENSITY_TOL {
        return Err(Error::Precondition(format!("singlet weight {anti:.3e} in two-photon state")));
    }
    let [n20, n11, n02] = occupation_basis(basis);
    Ok(OccupationDistribution {
        p20: rho.expectation(&n20).re,
        p11: rho.expectation(&n11).re,
        p02: rho.expectation(&n02).re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hadamard, Ket};

    #[test]
    fn poisson_vacuum_when_dark() {
        let d = poisson_photon_dist(0.0, 5).unwrap();
        assert_eq!(d.probs(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn poisson_vacuum_probability() {
        let d = poisson_photon_dist(0.1, DEFAULT_FOCK_CUTOFF).unwrap();
        assert!((d.prob(0) - (-0.1f64).exp()).abs() < 1e-16);
        assert!((d.prob(0) - 0.904_837_418_035_959_6).abs() < 1e-15);
        assert!((d.prob(2) - (-0.1f64).exp() * 0.005).abs() < 1e-17);
    }

    #[test]
    fn poisson_sum_within_tail_bound() {
        let d = poisson_photon_dist(1.0, 20).unwrap();
        let s: f64 = d.probs().iter().sum();
        assert!((1.0 - s).abs() < 1e-15);
        for mu in [0.05, 0.1, 0.5, 1.0] {
            for n in [2usize, 4, 8] {
                let d = poisson_photon_dist(mu, n).unwrap();
                let exact_tail = 1.0 - d.probs().iter().sum::<f64>();
                assert!(exact_tail <= d.tail_bound() + 1e-16, "mu {mu} n {n}");
            }
        }
    }

    #[test]
    fn poisson_rejects_negative_mean() {
        assert!(poisson_photon_dist(-0.1, 10).is_err());
    }

    #[test]
    fn signal_kets() {
        let s = |b, v| signal_ket(Bb84Signal::new(b, v).unwrap());
        assert_eq!(s(Basis::Rectilinear, 0), Ket::from_real(&[1.0, 0.0]).unwrap());
        let plus = s(Basis::Diagonal, 0);
        assert!((plus.amp(0).re - FRAC_1_SQRT_2).abs() < 1e-16);
        assert!((plus.amp(1).re - FRAC_1_SQRT_2).abs() < 1e-16);
        assert!(plus.inner(&s(Basis::Diagonal, 1)).norm() < 1e-16);
        assert!(Bb84Signal::new(Basis::Diagonal, 2).is_err());
    }

    #[test]
    fn symmetric_encoding() {
        let r0 = symmetric_encode(Bb84Signal::ALL[0]);
        assert_eq!(r0.ket(), &Ket::basis(4, 0));
        let pp = symmetric_encode(Bb84Signal::ALL[2]);
        for a in pp.ket().amplitudes() {
            assert!((a.re - 0.5).abs() < 1e-15 && a.im == 0.0);
        }
        for s in Bb84Signal::ALL {
            let enc = symmetric_encode(s);
            assert!(singlet().inner(enc.ket()).norm() < 1e-15);
            // own basis puts both photons in the signal mode
            let occ = enc.occupations(s.basis());
            let expect = if s.bit() == 0 { occ.p20 } else { occ.p02 };
            assert!((expect - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn occupations_of_examples() {
        let occ = symmetric_encode(Bb84Signal::ALL[2]).occupations(Basis::Rectilinear);
        assert!((occ.p20 - 0.25).abs() < 1e-15);
        assert!((occ.p11 - 0.5).abs() < 1e-15);
        assert!((occ.p02 - 0.25).abs() < 1e-15);

        let psi_plus = Ket::from_real(&[0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]).unwrap();
        let occ = fock_from_symmetric(&psi_plus.projector(), Basis::Rectilinear).unwrap();
        assert!((occ.p11 - 1.0).abs() < 1e-15);
        assert!((occ.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fock_rejects_singlet() {
        assert!(fock_from_symmetric(&singlet().projector(), Basis::Diagonal).is_err());
        assert!(SymmetricTwoQubit::new(singlet()).is_err());
    }

    #[test]
    fn occupation_is_hadamard_covariant() {
        let hh = hadamard().tensor(&hadamard());
        for s in Bb84Signal::ALL {
            let rho = symmetric_encode(s).density().into_operator();
            let rotated = rho.conjugate_by(&hh);
            for b in Basis::ALL {
                let a = fock_from_symmetric(&rho, b).unwrap();
                let c = fock_from_symmetric(&rotated, b.other()).unwrap();
                assert!((a.p20 - c.p20).abs() < 1e-14);
                assert!((a.p11 - c.p11).abs() < 1e-14);
                assert!((a.p02 - c.p02).abs() < 1e-14);
            }
        }
    }
}
