use num_complex::Complex64 as C64;

use super::eig::hermitian_eig;
use super::matrix::ComplexMatrix;

const PADE_ORDER: usize = 8;

/// exp(scale * m).
///
/// Hermitian inputs go through the eigendecomposition, which keeps
/// exp(-i dt H) unitary to round-off. Everything else (Liouvillian
/// superoperators, say) uses scaling and squaring with a diagonal Pade
/// approximant.
pub fn matrix_exp(m: &ComplexMatrix, scale: C64) -> ComplexMatrix {
    if m.hermiticity_error() <= 1e-12 {
        if let Ok(spec) = hermitian_eig(m) {
            return spec.map(|l| (scale * l).exp());
        }
    }
    pade_exp(&m.scale(scale))
}

fn pade_coefficients(q: usize) -> Vec<f64> {
    // c_k = (2q - k)! q! / ((2q)! k! (q - k)!), built by recurrence
    let mut c = vec![1.0; q + 1];
    for k in 1..=q {
        c[k] = c[k - 1] * (q - k + 1) as f64 / (k as f64 * (2 * q - k + 1) as f64);
    }
    c
}

fn pade_exp(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let norm = a.frobenius_norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale_real(0.5f64.powi(squarings as i32));

    let coeffs = pade_coefficients(PADE_ORDER);
    let mut num = ComplexMatrix::identity(n);
    let mut den = ComplexMatrix::identity(n);
    let mut power = ComplexMatrix::identity(n);
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        power = power.matmul(&scaled);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        num.axpy(C64::new(c, 0.0), &power);
        den.axpy(C64::new(sign * c, 0.0), &power);
    }
    let mut result = den
        .solve(&num)
        .expect("Pade denominator is well conditioned after scaling");
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::pauli_x;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_scale_is_identity() {
        let e = matrix_exp(&pauli_x(), C64::new(0.0, 0.0));
        assert!(e.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn pauli_rotation() {
        let e = matrix_exp(&pauli_x(), C64::new(0.0, -FRAC_PI_2));
        let expected = pauli_x().scale(C64::new(0.0, -1.0));
        assert!(e.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn pade_matches_eig_path_on_hermitian() {
        let h = ComplexMatrix::from_vec(
            2,
            vec![
                C64::new(0.7, 0.0),
                C64::new(0.2, 1.1),
                C64::new(0.2, -1.1),
                C64::new(-0.4, 0.0),
            ],
        )
        .unwrap();
        let s = C64::new(0.3, -2.5);
        let via_eig = matrix_exp(&h, s);
        let via_pade = pade_exp(&h.scale(s));
        assert!(via_eig.max_abs_diff(&via_pade) < 1e-12);
    }

    #[test]
    fn non_hermitian_nilpotent() {
        // exp([[0,1],[0,0]]) = [[1,1],[0,1]]
        let m = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let e = matrix_exp(&m, C64::new(1.0, 0.0));
        let expected = ComplexMatrix::from_real(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(e.max_abs_diff(&expected) < 1e-15);
    }
}
