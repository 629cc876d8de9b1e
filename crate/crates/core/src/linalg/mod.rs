//! Dense complex linear algebra sized for two-qubit (4x4) and spin-1 x spin-1
//! (9x9) problems.
//!
//! Nothing here is tuned for large matrices; the eigensolver is a cyclic
//! Jacobi iteration and the exponential is eigen- or Pade-based.

mod eig;
mod expm;
mod matrix;

pub(crate) use eig::eigenvalues_2x2;
pub use eig::{hermitian_eig, Spectrum, HERMITICITY_TOLERANCE};
pub use expm::matrix_exp;
pub use matrix::ComplexMatrix;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which factor of a bipartite system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Subsystem {
    /// The electron in this crate's basis ordering.
    #[default]
    First,
    Second,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::First => Subsystem::Second,
            Subsystem::Second => Subsystem::First,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    /// Entropies in nats.
    #[default]
    Natural,
    /// Entropies in bits.
    Two,
}

impl LogBase {
    #[inline]
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        }
    }
}

/// Kronecker product: `(a ⊗ b)[i*db + k, j*db + l] = a[i,j] * b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Factor dimensions of the bipartitions this crate works with.
fn bipartition(dim: usize) -> Result<usize> {
    match dim {
        4 => Ok(2),
        9 => Ok(3),
        other => Err(Error::dim("4x4 (2⊗2) or 9x9 (3⊗3) matrix", format!("{other}x{other}"))),
    }
}

/// Reduced matrix of the `keep` factor of a 2⊗2 or 3⊗3 operator.
///
/// This is the plain linear map; it does not require unit trace, so
/// unnormalized post-measurement operators can pass through it.
pub fn partial_trace(rho: &ComplexMatrix, keep: Subsystem) -> Result<ComplexMatrix> {
    let d = bipartition(rho.dim())?;
    let mut out = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..d {
                acc += match keep {
                    Subsystem::First => rho[(i * d + k, j * d + k)],
                    Subsystem::Second => rho[(k * d + i, k * d + j)],
                };
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Eigenvalues in [-ENTROPY_CLIP, 0) are treated as round-off and clipped.
pub const ENTROPY_CLIP: f64 = 1e-9;

/// von Neumann entropy -Tr(rho log rho).
///
/// Requires a Hermitian, unit-trace (1e-9) matrix whose eigenvalues are not
/// below -1e-9; eigenvalues under 1e-12 contribute nothing.
pub fn vn_entropy(rho: &ComplexMatrix, base: LogBase) -> Result<f64> {
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
        return Err(Error::Contract(format!(
            "entropy needs unit trace, got {:.12}{:+.3e}i",
            trace.re, trace.im
        )));
    }
    let eigenvalues: Vec<f64> = if rho.dim() == 2 {
        if rho.hermiticity_error() > HERMITICITY_TOLERANCE {
            return Err(Error::Contract("entropy needs a Hermitian matrix".into()));
        }
        eig::eigenvalues_2x2(rho).to_vec()
    } else {
        hermitian_eig(rho)?.eigenvalues
    };
    let mut s = 0.0;
    for &l in &eigenvalues {
        if l < -ENTROPY_CLIP {
            return Err(Error::Contract(format!(
                "entropy needs a positive semidefinite matrix, eigenvalue {l:.3e}"
            )));
        }
        if l > 1e-12 {
            s -= l * base.log(l);
        }
    }
    Ok(s.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{pauli_x, pauli_z};

    fn bell() -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [
            C64::new(h, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(h, 0.0),
        ];
        ComplexMatrix::outer(&psi)
    }

    #[test]
    fn kron_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&pauli_z(), &i2), ComplexMatrix::from_diag(&[1.0, 1.0, -1.0, -1.0]));
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        assert_eq!(
            kron(&pauli_z(), &pauli_z()),
            ComplexMatrix::from_diag(&[1.0, -1.0, -1.0, 1.0])
        );
        let sx_i = kron(&pauli_x(), &i2);
        assert_eq!(sx_i[(0, 2)], C64::new(1.0, 0.0));
        assert_eq!(sx_i[(0, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        for keep in [Subsystem::First, Subsystem::Second] {
            let r = partial_trace(&bell(), keep).unwrap();
            assert!(r.max_abs_diff(&ComplexMatrix::from_diag(&[0.5, 0.5])) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let ra = ComplexMatrix::from_diag(&[0.3, 0.7]);
        let rb = ComplexMatrix::from_real(2, &[0.6, 0.2, 0.2, 0.4]).unwrap();
        let rho = kron(&ra, &rb);
        assert!(partial_trace(&rho, Subsystem::First).unwrap().max_abs_diff(&ra) < 1e-15);
        assert!(partial_trace(&rho, Subsystem::Second).unwrap().max_abs_diff(&rb) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_odd_dims() {
        assert!(matches!(
            partial_trace(&ComplexMatrix::identity(3), Subsystem::First),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn partial_trace_three_by_three() {
        let ra = ComplexMatrix::from_diag(&[0.2, 0.3, 0.5]);
        let rb = ComplexMatrix::from_diag(&[0.1, 0.1, 0.8]);
        let rho = kron(&ra, &rb);
        assert!(partial_trace(&rho, Subsystem::First).unwrap().max_abs_diff(&ra) < 1e-15);
        assert!(partial_trace(&rho, Subsystem::Second).unwrap().max_abs_diff(&rb) < 1e-15);
    }

    #[test]
    fn entropy_examples() {
        assert!(vn_entropy(&bell(), LogBase::Natural).unwrap().abs() < 1e-12);
        let mixed = ComplexMatrix::from_diag(&[0.5, 0.5]);
        assert!((vn_entropy(&mixed, LogBase::Natural).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((vn_entropy(&mixed, LogBase::Two).unwrap() - 1.0).abs() < 1e-15);
        let mixed4 = ComplexMatrix::from_diag(&[0.25; 4]);
        assert!((vn_entropy(&mixed4, LogBase::Natural).unwrap() - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_contract_violations() {
        let bad_trace = ComplexMatrix::from_diag(&[0.5, 0.6]);
        assert!(matches!(
            vn_entropy(&bad_trace, LogBase::Natural),
            Err(Error::Contract(_))
        ));
        let negative = ComplexMatrix::from_diag(&[1.1, -0.1]);
        assert!(matches!(
            vn_entropy(&negative, LogBase::Natural),
            Err(Error::Contract(_))
        ));
        let tiny_negative = ComplexMatrix::from_diag(&[1.0 + 5e-10, -5e-10]);
        assert!(vn_entropy(&tiny_negative, LogBase::Natural).unwrap() < 1e-8);
    }
}
