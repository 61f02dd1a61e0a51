use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::C64;

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub const IDENTITY: Mat2 = [[ONE, ZERO], [ZERO, ONE]];

/// Which family single-qubit gates are drawn from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateSet {
    /// Haar-random SU(2).
    #[default]
    Haar,
    /// Uniform choice among sqrt(X), sqrt(Y) and T.
    SqrtXYT,
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn mat2_transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Largest entry of `|U^dagger U - I|`.
pub fn unitarity_error(u: &Mat2) -> f64 {
    let p = mat2_mul(&mat2_dagger(u), u);
    let mut err: f64 = 0.0;
    for (i, row) in p.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            err = err.max((v - target).norm());
        }
    }
    err
}

/// SU(2) element `[[e^{i phi} cos t, e^{i psi} sin t], [-e^{-i psi} sin t, e^{-i phi} cos t]]`.
pub fn su2_from_angles(phi: f64, psi: f64, theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    let a = C64::from_polar(1.0, phi);
    let b = C64::from_polar(1.0, psi);
    [[a * c, b * s], [-b.conj() * s, a.conj() * c]]
}

pub fn hadamard() -> Mat2 {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn sqrt_x() -> Mat2 {
    let p = C64::new(0.5, 0.5);
    let q = C64::new(0.5, -0.5);
    [[p, q], [q, p]]
}

pub fn sqrt_y() -> Mat2 {
    let p = C64::new(0.5, 0.5);
    [[p, -p], [p, p]]
}

pub fn t_gate() -> Mat2 {
    [[ONE, ZERO], [ZERO, C64::from_polar(1.0, PI / 4.0)]]
}

/// Draws one single-qubit gate from `set`.
///
/// Haar draws use `phi, psi ~ U[0, 2pi)` and `sin^2 theta ~ U[0, 1)`, which is
/// the Haar measure on SU(2) in these coordinates.
pub fn random_single_qubit_gate<R: Rng + ?Sized>(rng: &mut R, set: GateSet) -> Mat2 {
    match set {
        GateSet::Haar => {
            let phi = 2.0 * PI * rng.gen::<f64>();
            let psi = 2.0 * PI * rng.gen::<f64>();
            let theta = rng.gen::<f64>().sqrt().asin();
            su2_from_angles(phi, psi, theta)
        }
        GateSet::SqrtXYT => match rng.gen_range(0..3) {
            0 => sqrt_x(),
            1 => sqrt_y(),
            _ => t_gate(),
        },
    }
}
