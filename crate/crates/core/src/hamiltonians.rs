//! Hamiltonians for the driven two-spin model and the NV electron/14N system.
//!
//! Units: frequencies in MHz, times in us, and every matrix returned here is
//! an angular frequency in rad/us (the 2π factors are applied on
//! construction).
//!
//! Two-qubit basis order is |gg>, |ge>, |eg>, |ee> with the electron (or
//! spin 1) as the first factor. For the NV center the qubit labels are
//! electron |g> = |m_S=0>, |e> = |m_S=-1> and nuclear |g> = |m_I=+1>,
//! |e> = |m_I=0>.
//!
//! A drive's `rabi` is the full population flopping frequency of a resonant
//! transition: a resonant drive with rabi = 2 MHz returns the population
//! after 0.5 us.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, ComplexMatrix};
use crate::operators::{pauli_x, pauli_z, raising, sigma_ee, spin1_x, spin1_y, spin1_z};

pub const TWO_PI: f64 = 2.0 * PI;

/// Indices of |gg>, |ge>, |eg>, |ee> inside the 9-level (m_S, m_I) basis.
pub const SUBSPACE_IN_FULL: [usize; 4] = [3, 4, 6, 7];

/// Drives with rabi above this fraction of their transition frequency get an
/// RWA warning.
pub const RWA_GUARD_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSpinParams {
    #[serde(default)]
    pub delta_1: f64,
    #[serde(default)]
    pub delta_2: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub v0: f64,
}

impl TwoSpinParams {
    pub fn resonant(omega_1: f64, omega_2: f64, v0: f64) -> Self {
        Self {
            delta_1: 0.0,
            delta_2: 0.0,
            omega_1,
            omega_2,
            v0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("delta_1", self.delta_1),
            ("delta_2", self.delta_2),
            ("omega_1", self.omega_1),
            ("omega_2", self.omega_2),
            ("v0", self.v0),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::config(format!("two_spin.{name}"), "must be finite"));
            }
        }
        if self.omega_1 < 0.0 {
            return Err(Error::config("two_spin.omega_1", "must be >= 0"));
        }
        if self.omega_2 < 0.0 {
            return Err(Error::config("two_spin.omega_2", "must be >= 0"));
        }
        Ok(())
    }
}

/// NV ground-state constants. `gn_mun` is in kHz/G, everything else in MHz
/// (or MHz/G), `b_z` in gauss.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NvParams {
    pub d: f64,
    pub ge_mub: f64,
    pub gn_mun: f64,
    pub a_par: f64,
    pub a_perp: f64,
    pub q: f64,
    pub b_z: f64,
}

impl Default for NvParams {
    fn default() -> Self {
        Self {
            d: 2870.0,
            ge_mub: 2.802,
            gn_mun: 0.308,
            a_par: -2.16,
            a_perp: -2.70,
            q: -4.962,
            b_z: 500.0,
        }
    }
}

/// Transition frequencies (MHz) inside the two-qubit subspace, taken from
/// the diagonal Hamiltonian (transverse hyperfine excluded).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transitions {
    /// |gg> -> |eg>
    pub electron_g: f64,
    /// |ge> -> |ee>
    pub electron_e: f64,
    /// |gg> -> |ge>
    pub nuclear_g: f64,
    /// |eg> -> |ee>
    pub nuclear_e: f64,
}

impl Transitions {
    /// Microwave carrier that detunes both electron transitions equally.
    pub fn electron_midway(&self) -> f64 {
        0.5 * (self.electron_g + self.electron_e)
    }

    fn min_gap(&self, target: Target) -> f64 {
        match target {
            Target::Electron => self.electron_g.abs().min(self.electron_e.abs()),
            Target::Nuclear => self.nuclear_g.abs().min(self.nuclear_e.abs()),
        }
    }
}

impl NvParams {
    /// g_N mu_N in MHz/G.
    pub fn gn_mun_mhz(&self) -> f64 {
        self.gn_mun * 1e-3
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("d", self.d),
            ("ge_mub", self.ge_mub),
            ("gn_mun", self.gn_mun),
            ("a_par", self.a_par),
            ("a_perp", self.a_perp),
            ("q", self.q),
            ("b_z", self.b_z),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::config(format!("nv.{name}"), "must be finite"));
            }
        }
        if self.d <= 0.0 {
            return Err(Error::config("nv.d", "zero-field splitting must be > 0"));
        }
        if self.b_z < 0.0 {
            return Err(Error::config("nv.b_z", "must be >= 0"));
        }
        Ok(())
    }

    /// Subspace level energies (MHz) for |gg>, |ge>, |eg>, |ee>.
    pub fn subspace_levels(&self) -> [f64; 4] {
        let ez = self.ge_mub * self.b_z;
        let nz = self.gn_mun_mhz() * self.b_z;
        let a = self.a_par;
        // 0.5 * [-(D - ez - A/2) s_e + (Q - nz - A/2) s_n + (A/2) s_e s_n]
        let ce = -(self.d - ez - 0.5 * a);
        let cn = self.q - nz - 0.5 * a;
        let cz = 0.5 * a;
        let level = |se: f64, sn: f64| 0.5 * (ce * se + cn * sn + cz * se * sn);
        [level(1.0, 1.0), level(1.0, -1.0), level(-1.0, 1.0), level(-1.0, -1.0)]
    }

    pub fn transitions(&self) -> Transitions {
        let [gg, ge, eg, ee] = self.subspace_levels();
        Transitions {
            electron_g: eg - gg,
            electron_e: ee - ge,
            nuclear_g: ge - gg,
            nuclear_e: ee - eg,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Electron,
    Nuclear,
}

/// Sinusoidal drive `2π·rabi·sin(2π·carrier·t + phase)` on one spin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub target: Target,
    /// MHz
    pub rabi: f64,
    /// MHz
    pub carrier: f64,
    /// rad
    pub phase: f64,
}

impl DriveSpec {
    pub fn new(target: Target, rabi: f64, carrier: f64) -> Self {
        Self {
            target,
            rabi,
            carrier,
            phase: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rabi.is_finite() && self.carrier.is_finite() && self.phase.is_finite()) {
            return Err(Error::config("drive", "rabi, carrier and phase must be finite"));
        }
        if self.rabi < 0.0 {
            return Err(Error::config("drive.rabi", "must be >= 0"));
        }
        if self.carrier < 0.0 {
            return Err(Error::config("drive.carrier", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Frame {
    Lab,
    /// Doubly rotating frame at the given reference frequencies (MHz).
    Rotating {
        electron_ref: f64,
        nuclear_ref: f64,
    },
}

#[derive(Clone, Debug)]
pub struct DriveTerm {
    pub spec: DriveSpec,
    /// |e><g| on the driven spin, embedded in the model space.
    raising: ComplexMatrix,
    /// Lab-frame coupling operator (raising + lowering).
    coupling: ComplexMatrix,
    /// carrier - frame reference (MHz); zero in the lab frame.
    detuning: f64,
}

impl DriveTerm {
    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    fn add_to(&self, frame: Frame, t: f64, out: &mut ComplexMatrix) {
        let rabi = self.spec.rabi;
        if rabi == 0.0 {
            return;
        }
        match frame {
            Frame::Lab => {
                let amp = TWO_PI * rabi * (TWO_PI * self.spec.carrier * t + self.spec.phase).sin();
                out.axpy(C64::new(amp, 0.0), &self.coupling);
            }
            Frame::Rotating { .. } => {
                // co-rotating half of the sin carrier: (i/2) e^{-i(2π δ t + φ)} |e><g| + h.c.
                let angle = TWO_PI * self.detuning * t + self.spec.phase;
                let c = C64::new(0.0, 1.0) * C64::from_polar(0.5 * TWO_PI * rabi, -angle);
                let n = out.dim();
                let r = self.raising.as_slice();
                let o = out.as_mut_slice();
                for i in 0..n {
                    for j in 0..n {
                        let v = r[i * n + j];
                        if v != C64::new(0.0, 0.0) {
                            o[i * n + j] += c * v;
                            o[j * n + i] += (c * v).conj();
                        }
                    }
                }
            }
        }
    }
}

/// Static Hamiltonian plus sinusoidal drives.
#[derive(Clone, Debug)]
pub struct HamiltonianModel {
    pub static_part: ComplexMatrix,
    pub drives: Vec<DriveTerm>,
    pub frame: Frame,
    /// RWA-validity and other non-fatal notes collected while building.
    pub warnings: Vec<String>,
    transitions: Option<Transitions>,
}

impl HamiltonianModel {
    pub fn new(static_part: ComplexMatrix, frame: Frame) -> Result<Self> {
        if !static_part.is_hermitian(1e-12) {
            return Err(Error::Contract("static Hamiltonian is not Hermitian".into()));
        }
        Ok(Self {
            static_part,
            drives: Vec::new(),
            frame,
            warnings: Vec::new(),
            transitions: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.static_part.dim()
    }

    pub fn add_drive(&mut self, spec: DriveSpec) -> Result<()> {
        spec.validate()?;
        let dim = self.dim();
        let raising = embedded_raising(spec.target, dim)?;
        let coupling = &raising + &raising.adjoint();
        let detuning = match self.frame {
            Frame::Lab => 0.0,
            Frame::Rotating {
                electron_ref,
                nuclear_ref,
            } => {
                if dim != 4 {
                    return Err(Error::dim("4-level model for a rotating frame", dim));
                }
                spec.carrier
                    - match spec.target {
                        Target::Electron => electron_ref,
                        Target::Nuclear => nuclear_ref,
                    }
            }
        };
        if let (Frame::Rotating { .. }, Some(tr)) = (self.frame, self.transitions) {
            let gap = tr.min_gap(spec.target);
            if spec.rabi > RWA_GUARD_FRACTION * gap {
                self.warnings.push(format!(
                    "RWA questionable: {:?} drive rabi {} MHz exceeds {} x transition gap {:.4} MHz",
                    spec.target, spec.rabi, RWA_GUARD_FRACTION, gap
                ));
            }
        }
        self.drives.push(DriveTerm {
            spec,
            raising,
            coupling,
            detuning,
        });
        Ok(())
    }

    pub fn is_time_dependent(&self) -> bool {
        self.drives.iter().any(|d| {
            d.spec.rabi != 0.0
                && match self.frame {
                    Frame::Lab => d.spec.carrier != 0.0,
                    Frame::Rotating { .. } => d.detuning != 0.0,
                }
        })
    }

    /// Highest lab-frame carrier (MHz) among active drives.
    pub fn max_carrier(&self) -> f64 {
        self.drives
            .iter()
            .filter(|d| d.spec.rabi != 0.0)
            .map(|d| d.spec.carrier)
            .fold(0.0, f64::max)
    }

    /// Largest transition frequency (MHz) of the static part: its spectral
    /// width over 2π.
    pub fn static_bandwidth(&self) -> Result<f64> {
        let ev = hermitian_eig(&self.static_part)?.eigenvalues;
        Ok((ev[ev.len() - 1] - ev[0]) / TWO_PI)
    }

    pub fn evaluate(&self, t: f64) -> ComplexMatrix {
        let mut out = self.static_part.clone();
        for d in &self.drives {
            d.add_to(self.frame, t, &mut out);
        }
        out
    }

    /// `evaluate` without allocating.
    pub fn evaluate_into(&self, t: f64, out: &mut ComplexMatrix) {
        out.as_mut_slice().copy_from_slice(self.static_part.as_slice());
        for d in &self.drives {
            d.add_to(self.frame, t, out);
        }
    }
}

fn embedded_raising(target: Target, dim: usize) -> Result<ComplexMatrix> {
    match dim {
        4 => {
            let i2 = ComplexMatrix::identity(2);
            Ok(match target {
                Target::Electron => kron(&raising(), &i2),
                Target::Nuclear => kron(&i2, &raising()),
            })
        }
        9 => {
            // sqrt(2)·S_- (m -> m-1), so R + R^dagger = sqrt(2)·S_x. Only the lab
            // frame uses the 9-level operator, and there only the sum matters.
            let mut up = ComplexMatrix::zeros(3);
            up[(1, 0)] = C64::new(1.0, 0.0);
            up[(2, 1)] = C64::new(1.0, 0.0);
            let i3 = ComplexMatrix::identity(3);
            Ok(match target {
                Target::Electron => kron(&up, &i3),
                Target::Nuclear => kron(&i3, &up),
            })
        }
        other => Err(Error::dim("model dimension 4 or 9", other)),
    }
}

/// Abstract two-spin Hamiltonian:
/// 2π[-Σ Δ_i σ_ee^i + Σ (Ω_i/2) σ_x^i + V0 σ_ee^1 σ_ee^2].
pub fn two_spin_hamiltonian(p: &TwoSpinParams) -> Result<HamiltonianModel> {
    p.validate()?;
    let i2 = ComplexMatrix::identity(2);
    let ee1 = kron(&sigma_ee(), &i2);
    let ee2 = kron(&i2, &sigma_ee());
    let x1 = kron(&pauli_x(), &i2);
    let x2 = kron(&i2, &pauli_x());
    let mut h = ComplexMatrix::zeros(4);
    h.axpy(C64::new(-p.delta_1, 0.0), &ee1);
    h.axpy(C64::new(-p.delta_2, 0.0), &ee2);
    h.axpy(C64::new(0.5 * p.omega_1, 0.0), &x1);
    h.axpy(C64::new(0.5 * p.omega_2, 0.0), &x2);
    h.axpy(C64::new(p.v0, 0.0), &ee1.matmul(&ee2));
    HamiltonianModel::new(
        h.scale_real(TWO_PI),
        Frame::Rotating {
            electron_ref: 0.0,
            nuclear_ref: 0.0,
        },
    )
}

/// Full 9-level ground-state Hamiltonian on (m_S) ⊗ (m_I), each ordered +1, 0, -1.
pub fn nv_ground_hamiltonian_full(p: &NvParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let i3 = ComplexMatrix::identity(3);
    let (sx, sy, sz) = (spin1_x(), spin1_y(), spin1_z());
    let sz2 = sz.matmul(&sz);

    let mut h = ComplexMatrix::zeros(9);
    h.axpy(C64::new(p.d, 0.0), &kron(&sz2, &i3));
    h.axpy(C64::new(p.ge_mub * p.b_z, 0.0), &kron(&sz, &i3));
    let transverse = &kron(&sx, &sx) + &kron(&sy, &sy);
    h.axpy(C64::new(p.a_perp, 0.0), &transverse);
    h.axpy(C64::new(p.a_par, 0.0), &kron(&sz, &sz));
    h.axpy(C64::new(p.q, 0.0), &kron(&i3, &sz2));
    h.axpy(C64::new(-p.gn_mun_mhz() * p.b_z, 0.0), &kron(&i3, &sz));
    let mut h = h.scale_real(TWO_PI);
    h.symmetrize();
    Ok(h)
}

/// Reduced two-qubit NV Hamiltonian on {|0>,|-1>}_e ⊗ {|+1>,|0>}_N:
/// π[-(D - g_e μ_B B - A/2) σ_z⊗I + (Q - g_N μ_N B - A/2) I⊗σ_z + (A/2) σ_z⊗σ_z].
pub fn nv_reduced_hamiltonian(p: &NvParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let i2 = ComplexMatrix::identity(2);
    let a = p.a_par;
    let mut h = ComplexMatrix::zeros(4);
    h.axpy(
        C64::new(-(p.d - p.ge_mub * p.b_z - 0.5 * a), 0.0),
        &kron(&pauli_z(), &i2),
    );
    h.axpy(
        C64::new(p.q - p.gn_mun_mhz() * p.b_z - 0.5 * a, 0.0),
        &kron(&i2, &pauli_z()),
    );
    h.axpy(C64::new(0.5 * a, 0.0), &kron(&pauli_z(), &pauli_z()));
    Ok(h.scale_real(PI))
}

/// Lab-frame drive matrix `2π·Ω·sin(2π f t + φ)·C` for a model of dimension
/// 4 or 9. `C` is σ_x on the driven qubit (dim 4) or sqrt(2)·S_x / sqrt(2)·I_x
/// (dim 9), so Ω is the resonant flopping frequency in both cases.
pub fn drive_term(d: &DriveSpec, model_dim: usize, t: f64) -> Result<ComplexMatrix> {
    d.validate()?;
    if t < 0.0 {
        return Err(Error::Contract(format!("drive evaluated at negative time {t}")));
    }
    let r = embedded_raising(d.target, model_dim)?;
    let amp = TWO_PI * d.rabi * (TWO_PI * d.carrier * t + d.phase).sin();
    Ok((&r + &r.adjoint()).scale_real(amp))
}

/// Lab-frame model: static Hamiltonian plus sinusoidal drives.
pub fn lab_frame_model(static_part: ComplexMatrix, drives: &[DriveSpec]) -> Result<HamiltonianModel> {
    let mut model = HamiltonianModel::new(static_part, Frame::Lab)?;
    for d in drives {
        model.add_drive(*d)?;
    }
    Ok(model)
}

/// Time-independent RWA Hamiltonian in the frame rotating at the MW carrier
/// (electron) and RF carrier (nuclear).
///
/// Further drives (noise tones) can be attached with
/// [`HamiltonianModel::add_drive`]; they pick up their detuning from these
/// reference carriers. A drive with rabi above a tenth of its transition
/// frequency records a warning on the returned model.
pub fn rotating_frame_model(p: &NvParams, mw: &DriveSpec, rf: &DriveSpec) -> Result<HamiltonianModel> {
    p.validate()?;
    if mw.target != Target::Electron {
        return Err(Error::Contract(
            "rotating_frame_model: mw must target the electron".into(),
        ));
    }
    if rf.target != Target::Nuclear {
        return Err(Error::Contract(
            "rotating_frame_model: rf must target the nuclear spin".into(),
        ));
    }
    let tr = p.transitions();
    if [tr.electron_g, tr.electron_e, tr.nuclear_g, tr.nuclear_e]
        .iter()
        .any(|&f| f <= 0.0)
    {
        return Err(Error::Contract(format!(
            "rotating frame needs |e> above |g> for both spins (level crossing at B_z = {} G)",
            p.b_z
        )));
    }
    let (fm, fr) = (mw.carrier, rf.carrier);
    let levels = p.subspace_levels();
    let frame_levels = [
        -0.5 * fm - 0.5 * fr,
        -0.5 * fm + 0.5 * fr,
        0.5 * fm - 0.5 * fr,
        0.5 * fm + 0.5 * fr,
    ];
    let diag: Vec<f64> = levels.iter().zip(frame_levels).map(|(e, f)| TWO_PI * (e - f)).collect();
    let mut model = HamiltonianModel::new(
        ComplexMatrix::from_diag(&diag),
        Frame::Rotating {
            electron_ref: fm,
            nuclear_ref: fr,
        },
    )?;
    model.transitions = Some(tr);
    model.add_drive(*mw)?;
    model.add_drive(*rf)?;
    Ok(model)
}
