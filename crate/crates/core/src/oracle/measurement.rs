//! Brute-force accessible information of two equiprobable qubit states over
//! orthogonal projective measurements.

use crate::linalg::{DensityOperator, Operator};
use crate::{Error, Result};

/// Default number of grid angles before refinement.
pub const DEFAULT_ANGLE_GRID: usize = 256;

const GOLDEN_ITERS: usize = 80;

fn bloch_vector(rho: &Operator) -> [f64; 3] {
    let off = rho.entry(0, 1);
    [2.0 * off.re, -2.0 * off.im, (rho.entry(0, 0) - rho.entry(1, 1)).re]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn xlog2x(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

fn binary_entropy(p: f64) -> f64 {
    -xlog2x(p) - xlog2x(1.0 - p)
}

/// Shannon mutual information between a uniform input bit and a binary
/// output with `P(out = +|in = k) = q_k`.
fn mutual_information(q0: f64, q1: f64) -> f64 {
    let q0 = q0.clamp(0.0, 1.0);
    let q1 = q1.clamp(0.0, 1.0);
    binary_entropy(0.5 * (q0 + q1)) - 0.5 * (binary_entropy(q0) + binary_entropy(q1))
}

/// Maximum over projective measurements `{(𝟙 ± n·σ)/2}` of the mutual
/// information between the label and the outcome.
///
/// Only directions `n` in the plane of the two Bloch vectors are searched: the
/// out-of-plane component of `n` just shortens the effective vector, and the
/// information of a binary channel does not decrease when both conditional
/// biases are scaled up. The angle is scanned on `grid_size` points in
/// `[0, π)` and the best bracket refined by golden-section search.
pub fn numeric_two_state_info(rho0: &DensityOperator, rho1: &DensityOperator, grid_size: usize) -> Result<f64> {
    for r in [rho0, rho1] {
        if r.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, actual: r.dim() });
        }
    }
    let r0 = bloch_vector(rho0.operator());
    let r1 = bloch_vector(rho1.operator());
    let (u, v) = plane_basis(&r0, &r1);
    let info = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let n = [c * u[0] + s * v[0], c * u[1] + s * v[1], c * u[2] + s * v[2]];
        mutual_information(0.5 * (1.0 + dot(&n, &r0)), 0.5 * (1.0 + dot(&n, &r1)))
    };

    let grid = grid_size.max(8);
    let step = std::f64::consts::PI / grid as f64;
    let (mut best_k, mut best) = (0, f64::NEG_INFINITY);
    for k in 0..grid {
        let val = info(k as f64 * step);
        if val > best {
            best = val;
            best_k = k;
        }
    }
    let centre = best_k as f64 * step;
    let refined = golden_max(&info, centre - step, centre + step);
    Ok(best.max(refined).max(0.0))
}

/// Orthonormal pair spanning (at least) the plane of `a` and `b`.
fn plane_basis(a: &[f64; 3], b: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let first = if norm(a) >= norm(b) { a } else { b };
    let other = if norm(a) >= norm(b) { b } else { a };
    let nf = norm(first);
    let u = if nf > 1e-14 { [first[0] / nf, first[1] / nf, first[2] / nf] } else { [0.0, 0.0, 1.0] };
    let proj = dot(other, &u);
    let mut w = [other[0] - proj * u[0], other[1] - proj * u[1], other[2] - proj * u[2]];
    let mut nw = norm(&w);
    if nw < 1e-12 * norm(other).max(1.0) {
        // collinear: any perpendicular direction
        let seed = if u[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let p = dot(&seed, &u);
        w = [seed[0] - p * u[0], seed[1] - p * u[1], seed[2] - p * u[2]];
        nw = norm(&w);
    }
    (u, [w[0] / nw, w[1] / nw, w[2] / nw])
}

fn golden_max(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERS {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}
