//! Lindblad master-equation propagation.
//!
//! dρ/dt = -i[H(t), ρ] + Σ_k (L_k ρ L_k† - ½{L_k† L_k, ρ})
//!
//! Three integrators share one driver: fixed-step RK4 (default), adaptive
//! Dormand–Prince 5(4), and a piecewise-constant Liouvillian exponential that
//! serves as the oracle for the other two. Every step is followed by
//! symmetrization ρ ← (ρ + ρ†)/2 and a positivity check; a minimum eigenvalue
//! below [`POSITIVITY_TOLERANCE`] aborts with the offending time.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::discord::DiscordResult;
use crate::error::{Error, Result};
use crate::hamiltonians::HamiltonianModel;
use crate::linalg::{hermitian_eig, kron, matrix_exp, partial_trace, ComplexMatrix, Subsystem};
use crate::operators::spin1_z;

pub const POSITIVITY_TOLERANCE: f64 = 1e-6;

const RK45_RTOL: f64 = 1e-9;
const RK45_ATOL: f64 = 1e-11;

#[derive(Clone, Debug)]
pub struct LindbladChannel {
    pub operator: ComplexMatrix,
    pub label: String,
}

impl LindbladChannel {
    pub fn new(operator: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        if operator
            .as_slice()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Contract("Lindblad operator has non-finite entries".into()));
        }
        Ok(Self {
            operator,
            label: label.into(),
        })
    }

    /// Pure electron dephasing L = sqrt(1/T2)·S_z, with S_z the electron
    /// spin-1 projection embedded in the working space: diag(0, 0, -1, -1)
    /// on the two-qubit subspace, S_z ⊗ I_3 on the 9-level space.
    pub fn electron_dephasing(t2_us: f64, dim: usize) -> Result<Self> {
        if !(t2_us.is_finite() && t2_us > 0.0) {
            return Err(Error::config("channels.t2_us", "must be finite and > 0"));
        }
        let sz = match dim {
            4 => ComplexMatrix::from_diag(&[0.0, 0.0, -1.0, -1.0]),
            9 => kron(&spin1_z(), &ComplexMatrix::identity(3)),
            other => return Err(Error::dim("dimension 4 or 9", other)),
        };
        Self::new(sz.scale_real((1.0 / t2_us).sqrt()), format!("electron T2 = {t2_us} us"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Rk4Fixed,
    Rk45Adaptive,
    #[serde(alias = "expm_piecewise_oracle")]
    ExpmPiecewise,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationGrid {
    /// us
    pub t_end: f64,
    /// Nominal step (us). The actual step is t_end / ceil(t_end / dt), so it
    /// never exceeds `dt` and the last step lands on `t_end`.
    pub dt: f64,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    #[serde(default)]
    pub method: Method,
}

fn default_stride() -> usize {
    1
}

impl SimulationGrid {
    pub fn new(t_end: f64, dt: f64, record_stride: usize, method: Method) -> Self {
        Self {
            t_end,
            dt,
            record_stride,
            method,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::config("grid.t_end", "must be finite and > 0"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0 && self.dt <= self.t_end) {
            return Err(Error::config("grid.dt", "must satisfy 0 < dt <= t_end"));
        }
        if self.record_stride == 0 {
            return Err(Error::config("grid.record_stride", "must be >= 1"));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn step(&self) -> f64 {
        self.t_end / self.n_steps() as f64
    }

    /// Step indices that are recorded: every `record_stride`-th plus the last.
    pub fn record_steps(&self) -> Vec<usize> {
        let n = self.n_steps();
        let mut steps: Vec<usize> = (0..=n).step_by(self.record_stride).collect();
        if *steps.last().unwrap() != n {
            steps.push(n);
        }
        steps
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    /// |Tr ρ - 1|
    pub trace_error: f64,
    pub min_eigenvalue: f64,
    /// Relative Hermiticity error after symmetrization.
    pub hermiticity: f64,
}

impl Diagnostics {
    pub fn of(rho: &ComplexMatrix) -> Result<Self> {
        let hermiticity = rho.hermiticity_error();
        let mut sym = rho.clone();
        sym.symmetrize();
        let min_eigenvalue = hermitian_eig(&sym)?.eigenvalues[0];
        Ok(Self {
            trace_error: (rho.trace() - C64::new(1.0, 0.0)).norm(),
            min_eigenvalue,
            hermiticity,
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct TimeSeries {
    /// us
    pub times: Vec<f64>,
    pub populations: Vec<Vec<f64>>,
    pub states: Vec<ComplexMatrix>,
    pub diagnostics: Vec<Diagnostics>,
    /// Discord evaluations as (time, result), at their own stride.
    pub discord: Option<Vec<(f64, DiscordResult)>>,
    /// Worst values over every integration step, recorded or not.
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
    pub max_hermiticity: f64,
    pub steps_taken: usize,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.states.first().map(ComplexMatrix::dim)
    }

    /// Nuclear marginal at each recorded time, if the states are two-qubit.
    pub fn nuclear_marginals(&self) -> Result<Vec<[f64; 2]>> {
        self.states.iter().map(nuclear_marginal).collect()
    }

    fn push(&mut self, t: f64, rho: &ComplexMatrix, diag: Diagnostics) {
        self.times.push(t);
        self.populations.push(populations(rho));
        self.states.push(rho.clone());
        self.diagnostics.push(diag);
    }
}

/// Real parts of the diagonal, in basis order.
pub fn populations(rho: &ComplexMatrix) -> Vec<f64> {
    rho.diag_real()
}

/// (P_g, P_e) of the nuclear spin (second factor) of a two-qubit state.
pub fn nuclear_marginal(rho: &ComplexMatrix) -> Result<[f64; 2]> {
    rho.check_square_dim(4, "nuclear_marginal")?;
    let r = partial_trace(rho, Subsystem::Second)?;
    Ok([r[(0, 0)].re, r[(1, 1)].re])
}

/// Validates a density matrix: Hermitian, unit trace and positive
/// semidefinite to the given tolerance.
pub fn check_density_matrix(rho: &ComplexMatrix, tol: f64) -> Result<()> {
    if rho.hermiticity_error() > tol {
        return Err(Error::Contract("density matrix is not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > tol {
        return Err(Error::Contract(format!("density matrix trace {tr} is not 1")));
    }
    let min = hermitian_eig(rho)?.eigenvalues[0];
    if min < -tol {
        return Err(Error::Contract(format!("density matrix has eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// Precomputed dissipator pieces (L, L†, ½L†L) for the channels.
#[derive(Clone, Debug)]
struct Dissipator {
    terms: Vec<(ComplexMatrix, ComplexMatrix, ComplexMatrix)>,
}

impl Dissipator {
    fn new(channels: &[LindbladChannel], dim: usize) -> Result<Self> {
        let mut terms = Vec::with_capacity(channels.len());
        for ch in channels {
            ch.operator.check_square_dim(dim, "Lindblad operator")?;
            let l = ch.operator.clone();
            let ld = l.adjoint();
            let half = ld.matmul(&l).scale_real(0.5);
            terms.push((l, ld, half));
        }
        Ok(Self { terms })
    }
}

struct Scratch {
    a: ComplexMatrix,
    b: ComplexMatrix,
}

impl Scratch {
    fn new(dim: usize) -> Self {
        Self {
            a: ComplexMatrix::zeros(dim),
            b: ComplexMatrix::zeros(dim),
        }
    }
}

fn rhs_into(h: &ComplexMatrix, rho: &ComplexMatrix, diss: &Dissipator, out: &mut ComplexMatrix, s: &mut Scratch) {
    let minus_i = C64::new(0.0, -1.0);
    h.matmul_into(rho, &mut s.a);
    rho.matmul_into(h, &mut s.b);
    {
        let o = out.as_mut_slice();
        for ((o, a), b) in o.iter_mut().zip(s.a.as_slice()).zip(s.b.as_slice()) {
            *o = minus_i * (a - b);
        }
    }
    for (l, ld, half) in &diss.terms {
        l.matmul_into(rho, &mut s.a);
        s.a.matmul_into(ld, &mut s.b);
        *out += &s.b;
        half.matmul_into(rho, &mut s.a);
        *out -= &s.a;
        rho.matmul_into(half, &mut s.a);
        *out -= &s.a;
    }
}

/// Right-hand side of the master equation for a given Hamiltonian (rad/us).
pub fn lindblad_rhs(rho: &ComplexMatrix, h_t: &ComplexMatrix, channels: &[LindbladChannel]) -> Result<ComplexMatrix> {
    let n = rho.dim();
    h_t.check_square_dim(n, "Hamiltonian")?;
    let diss = Dissipator::new(channels, n)?;
    let mut out = ComplexMatrix::zeros(n);
    rhs_into(h_t, rho, &diss, &mut out, &mut Scratch::new(n));
    Ok(out)
}

/// Liouvillian superoperator on row-major vec(ρ): vec(AρB) = (A ⊗ Bᵀ) vec(ρ).
pub fn liouvillian(h: &ComplexMatrix, channels: &[LindbladChannel]) -> Result<ComplexMatrix> {
    let n = h.dim();
    let id = ComplexMatrix::identity(n);
    let minus_i = C64::new(0.0, -1.0);
    let mut sup = &kron(h, &id) - &kron(&id, &h.transpose());
    sup = sup.scale(minus_i);
    for ch in channels {
        ch.operator.check_square_dim(n, "Lindblad operator")?;
        let l = &ch.operator;
        let ldl = l.adjoint().matmul(l);
        sup += &kron(l, &l.conj());
        sup.axpy(C64::new(-0.5, 0.0), &kron(&ldl, &id));
        sup.axpy(C64::new(-0.5, 0.0), &kron(&id, &ldl.transpose()));
    }
    Ok(sup)
}

/// Per-step bookkeeping shared by the integrators.
struct Monitor {
    max_trace_error: f64,
    min_eigenvalue: f64,
    max_hermiticity: f64,
    steps: usize,
}

impl Monitor {
    fn new() -> Self {
        Self {
            max_trace_error: 0.0,
            min_eigenvalue: f64::INFINITY,
            max_hermiticity: 0.0,
            steps: 0,
        }
    }

    /// Symmetrizes `rho` and checks it; returns the diagnostics.
    fn accept(&mut self, t: f64, rho: &mut ComplexMatrix) -> Result<Diagnostics> {
        if rho.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Integration {
                time: t,
                min_eigenvalue: f64::NAN,
            });
        }
        rho.symmetrize();
        let d = Diagnostics::of(rho)?;
        if d.min_eigenvalue < -POSITIVITY_TOLERANCE {
            return Err(Error::Integration {
                time: t,
                min_eigenvalue: d.min_eigenvalue,
            });
        }
        self.max_trace_error = self.max_trace_error.max(d.trace_error);
        self.min_eigenvalue = self.min_eigenvalue.min(d.min_eigenvalue);
        self.max_hermiticity = self.max_hermiticity.max(d.hermiticity);
        self.steps += 1;
        Ok(d)
    }
}

/// Propagates `rho0` over the grid and records populations, states and
/// diagnostics at the grid's record steps.
pub fn propagate(
    rho0: &ComplexMatrix,
    model: &HamiltonianModel,
    channels: &[LindbladChannel],
    grid: &SimulationGrid,
) -> Result<TimeSeries> {
    grid.validate()?;
    let n = model.dim();
    rho0.check_square_dim(n, "initial state")?;
    check_density_matrix(rho0, 1e-9)?;
    let diss = Dissipator::new(channels, n)?;

    let mut rho = rho0.clone();
    let mut series = TimeSeries::default();
    let mut mon = Monitor::new();
    let d0 = mon.accept(0.0, &mut rho)?;
    series.push(0.0, &rho, d0);

    let h = grid.step();
    let records = grid.record_steps();
    let mut next_record = 1;

    match grid.method {
        Method::Rk4Fixed => {
            let mut rk = Rk4::new(n);
            for k in 1..=grid.n_steps() {
                let t0 = (k - 1) as f64 * h;
                rk.step(model, &diss, t0, h, &mut rho);
                let t = k as f64 * h;
                let d = mon.accept(t, &mut rho)?;
                if records.get(next_record) == Some(&k) {
                    series.push(t, &rho, d);
                    next_record += 1;
                }
            }
        }
        Method::ExpmPiecewise => {
            let static_prop = if model.is_time_dependent() {
                None
            } else {
                Some(step_propagator(model, channels, 0.0, h)?)
            };
            let mut v = vec![C64::new(0.0, 0.0); n * n];
            for k in 1..=grid.n_steps() {
                let t0 = (k - 1) as f64 * h;
                let owned;
                let prop = match &static_prop {
                    Some(p) => p,
                    None => {
                        owned = step_propagator(model, channels, t0 + 0.5 * h, h)?;
                        &owned
                    }
                };
                v.copy_from_slice(rho.as_slice());
                let next = prop.mat_vec(&v);
                rho.as_mut_slice().copy_from_slice(&next);
                let t = k as f64 * h;
                let d = mon.accept(t, &mut rho)?;
                if records.get(next_record) == Some(&k) {
                    series.push(t, &rho, d);
                    next_record += 1;
                }
            }
        }
        Method::Rk45Adaptive => {
            let mut dp = DormandPrince::new(n, grid.dt);
            for &k in &records[1..] {
                let target = k as f64 * h;
                dp.advance_to(model, &diss, target, &mut rho, &mut mon)?;
                let d = Diagnostics::of(&rho)?;
                series.push(target, &rho, d);
            }
        }
    }

    series.max_trace_error = mon.max_trace_error;
    series.min_eigenvalue = mon.min_eigenvalue;
    series.max_hermiticity = mon.max_hermiticity;
    series.steps_taken = mon.steps - 1;
    Ok(series)
}

fn step_propagator(
    model: &HamiltonianModel,
    channels: &[LindbladChannel],
    t_mid: f64,
    h: f64,
) -> Result<ComplexMatrix> {
    let l = liouvillian(&model.evaluate(t_mid), channels)?;
    Ok(matrix_exp(&l, C64::new(h, 0.0)))
}

struct Rk4 {
    ham: ComplexMatrix,
    k: [ComplexMatrix; 4],
    tmp: ComplexMatrix,
    scratch: Scratch,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        Self {
            ham: ComplexMatrix::zeros(n),
            k: std::array::from_fn(|_| ComplexMatrix::zeros(n)),
            tmp: ComplexMatrix::zeros(n),
            scratch: Scratch::new(n),
        }
    }

    fn step(&mut self, model: &HamiltonianModel, diss: &Dissipator, t: f64, h: f64, rho: &mut ComplexMatrix) {
        let Rk4 { ham, k, tmp, scratch } = self;
        let [k1, k2, k3, k4] = k;
        model.evaluate_into(t, ham);
        rhs_into(ham, rho, diss, k1, scratch);

        model.evaluate_into(t + 0.5 * h, ham);
        stage(tmp, rho, &[(0.5 * h, &*k1)]);
        rhs_into(ham, tmp, diss, k2, scratch);
        stage(tmp, rho, &[(0.5 * h, &*k2)]);
        rhs_into(ham, tmp, diss, k3, scratch);

        model.evaluate_into(t + h, ham);
        stage(tmp, rho, &[(h, &*k3)]);
        rhs_into(ham, tmp, diss, k4, scratch);

        let w = h / 6.0;
        let r = rho.as_mut_slice();
        let (a, b, c, d) = (k1.as_slice(), k2.as_slice(), k3.as_slice(), k4.as_slice());
        for i in 0..r.len() {
            r[i] += (a[i] + (b[i] + c[i]) * 2.0 + d[i]) * w;
        }
    }
}

/// out = base + Σ c_i k_i
fn stage(out: &mut ComplexMatrix, base: &ComplexMatrix, terms: &[(f64, &ComplexMatrix)]) {
    out.as_mut_slice().copy_from_slice(base.as_slice());
    for (c, k) in terms {
        if *c != 0.0 {
            out.axpy(C64::new(*c, 0.0), k);
        }
    }
}

// Dormand–Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct DormandPrince {
    t: f64,
    h: f64,
    ham: ComplexMatrix,
    k: [ComplexMatrix; 7],
    tmp: ComplexMatrix,
    scratch: Scratch,
}

impl DormandPrince {
    fn new(n: usize, h0: f64) -> Self {
        Self {
            t: 0.0,
            h: h0,
            ham: ComplexMatrix::zeros(n),
            k: std::array::from_fn(|_| ComplexMatrix::zeros(n)),
            tmp: ComplexMatrix::zeros(n),
            scratch: Scratch::new(n),
        }
    }

    /// Integrates up to exactly `target`, clamping the last step.
    fn advance_to(
        &mut self,
        model: &HamiltonianModel,
        diss: &Dissipator,
        target: f64,
        rho: &mut ComplexMatrix,
        mon: &mut Monitor,
    ) -> Result<()> {
        while target - self.t > 1e-12 * target.max(1.0) {
            let h = self.h.min(target - self.t);
            for s in 0..7 {
                let terms: Vec<(f64, &ComplexMatrix)> = (0..s).map(|j| (h * DP_A[s][j], &self.k[j])).collect();
                stage(&mut self.tmp, rho, &terms);
                model.evaluate_into(self.t + DP_C[s] * h, &mut self.ham);
                let (before, rest) = self.k.split_at_mut(s);
                let _ = before;
                rhs_into(&self.ham, &self.tmp, diss, &mut rest[0], &mut self.scratch);
            }
            // 5th-order solution and embedded error estimate
            let n2 = rho.as_slice().len();
            let mut err = 0.0f64;
            let mut next = rho.clone();
            {
                let nx = next.as_mut_slice();
                let r = rho.as_slice();
                for i in 0..n2 {
                    let mut hi = C64::new(0.0, 0.0);
                    let mut lo = C64::new(0.0, 0.0);
                    for s in 0..7 {
                        let v = self.k[s].as_slice()[i];
                        hi += v * DP_B5[s];
                        lo += v * DP_B4[s];
                    }
                    nx[i] = r[i] + hi * h;
                    let scale = RK45_ATOL + RK45_RTOL * r[i].norm().max(nx[i].norm());
                    err = err.max(((hi - lo) * h).norm() / scale);
                }
            }
            if err <= 1.0 {
                self.t += h;
                *rho = next;
                mon.accept(self.t, rho)?;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            // keep the proposal from collapsing to the clamp remainder
            self.h = (h * factor).max(self.h.min(h) * 0.2);
            if self.h < 1e-14 {
                return Err(Error::Integration {
                    time: self.t,
                    min_eigenvalue: f64::NAN,
                });
            }
        }
        self.t = target;
        Ok(())
    }
}
