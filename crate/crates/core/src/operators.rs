//! Single-spin operators.
//!
//! Two-level states are ordered (|g>, |e>) with sigma_z |g> = +|g>. Spin-1
//! states are ordered by projection (m = +1, 0, -1).

use num_complex::Complex64 as C64;

use crate::linalg::ComplexMatrix;

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[1.0, -1.0])
}

/// |e><e| = (I - sigma_z) / 2
pub fn sigma_ee() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[0.0, 1.0])
}

/// |e><g|
pub fn raising() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap()
}

pub fn spin1_x() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(3, &[0.0, h, 0.0, h, 0.0, h, 0.0, h, 0.0]).unwrap()
}

pub fn spin1_y() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_vec(
        3,
        vec![
            c(0.0, 0.0),
            c(0.0, -h),
            c(0.0, 0.0),
            c(0.0, h),
            c(0.0, 0.0),
            c(0.0, -h),
            c(0.0, 0.0),
            c(0.0, h),
            c(0.0, 0.0),
        ],
    )
    .unwrap()
}

pub fn spin1_z() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[1.0, 0.0, -1.0])
}
