//! Scalar information functions used by every attack.
//!
//! `Φ(x) = (1+x)log₂(1+x) + (1−x)log₂(1−x)`, with `0·log 0 = 0`, so that a
//! binary symmetric channel of bias `x` carries `½Φ(x)` bits.

use crate::error::check_range;
use crate::linalg::DensityOperator;
use crate::{Error, Result};

/// Tolerance on `|x| − 1` inside which `Φ` clamps instead of rejecting.
pub const PHI_DOMAIN_TOL: f64 = 1e-12;

/// Tolerance on the equal-determinant precondition of [`levitin_information`].
pub const DETERMINANT_TOL: f64 = 1e-9;

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

pub fn phi(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + PHI_DOMAIN_TOL {
        return Err(Error::OutOfRange { name: "x", value: x, range: "[-1, 1]" });
    }
    let x = x.clamp(-1.0, 1.0);
    Ok(xlog2x(1.0 + x) + xlog2x(1.0 - x))
}

/// Eve's information from the optimal individual attack on single photons
/// that causes disturbance `d`: `½Φ(2√(d(1−d)))`.
pub fn fuchs_information(d: f64) -> Result<f64> {
    check_range("D", d, 0.0, 0.5, "[0, 1/2]")?;
    Ok(0.5 * phi(2.0 * (d * (1.0 - d)).sqrt())?)
}

/// Two equiprobable states of the same dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoStateEnsemble {
    pub rho0: DensityOperator,
    pub rho1: DensityOperator,
}

impl TwoStateEnsemble {
    pub fn new(rho0: DensityOperator, rho1: DensityOperator) -> Result<Self> {
        if rho0.dim() != rho1.dim() {
            return Err(Error::DimensionMismatch { expected: rho0.dim(), actual: rho1.dim() });
        }
        Ok(Self { rho0, rho1 })
    }
}

/// Accessible information `½Φ(√(1 − r − 2d))` of two equiprobable qubit
/// states with the same determinant `d`, where `r = Tr(ρ₀ρ₁)`.
pub fn levitin_information(ens: &TwoStateEnsemble) -> Result<f64> {
    if ens.rho0.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, actual: ens.rho0.dim() });
    }
    let d0 = ens.rho0.operator().determinant().re;
    let d1 = ens.rho1.operator().determinant().re;
    if (d0 - d1).abs() > DETERMINANT_TOL {
        return Err(Error::Precondition(format!(
            "Levitin formula needs equal determinants, got {d0:.12} and {d1:.12}"
        )));
    }
    let r = ens.rho0.overlap(&ens.rho1);
    let d = 0.5 * (d0 + d1);
    let arg = (1.0 - r - 2.0 * d).max(0.0).sqrt();
    Ok(0.5 * phi(arg.min(1.0))?)
}

/// One orthogonal block of a two-step measurement: Eve first projects onto a
/// block, then discriminates inside it.
#[derive(Clone, Debug, PartialEq)]
pub enum InfoBlock {
    /// Block reached with probability `weight` (for either state) holding the
    /// given normalized conditional ensemble.
    Ensemble { weight: f64, ensemble: TwoStateEnsemble },
    /// Block in which the two states are orthogonal: one full bit.
    Perfect { weight: f64 },
}

impl InfoBlock {
    fn weight(&self) -> f64 {
        match self {
            InfoBlock::Ensemble { weight, .. } | InfoBlock::Perfect { weight } => *weight,
        }
    }
}

/// How to account for the probability mass not covered by the listed blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leftover {
    PerfectlyDistinguishing,
    Uninformative,
}

pub fn blockwise_information(blocks: &[InfoBlock], leftover: Leftover) -> Result<f64> {
    let mut total_weight = 0.0;
    let mut info = 0.0;
    for b in blocks {
        let w = b.weight();
        if !(w >= 0.0) {
            return Err(Error::OutOfRange { name: "block weight", value: w, range: "[0, 1]" });
        }
        total_weight += w;
        info += match b {
            InfoBlock::Ensemble { weight, ensemble } => weight * levitin_information(ensemble)?,
            InfoBlock::Perfect { weight } => *weight,
        };
    }
    if total_weight > 1.0 + 1e-12 {
        return Err(Error::OutOfRange { name: "total block weight", value: total_weight, range: "[0, 1]" });
    }
    if leftover == Leftover::PerfectlyDistinguishing {
        info += (1.0 - total_weight).max(0.0);
    }
    Ok(info)
}
