//! Mutual information, measurement-conditioned classical correlation and
//! quantum discord for two-qubit states.
//!
//! Projective measurements on one qubit are parameterized by
//! |u> = cosθ|0> + e^{iφ} sinθ|1>, |v> = sinθ|0> - e^{iφ} cosθ|1>.
//! The classical correlation is maximized by brute force over a (θ, φ) grid
//! followed by a Nelder–Mead polish around the best grid point.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues_2x2, partial_trace, vn_entropy, ComplexMatrix, LogBase, Subsystem};

/// Discord in (-DISCORD_FLOOR, 0) is round-off and reported as 0.
pub const DISCORD_FLOOR: f64 = 1e-9;
/// Outcomes less likely than this contribute nothing.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-12;

const REFINE_TOLERANCE: f64 = 1e-8;
const REFINE_MAX_ITERATIONS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementBasis {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// (|u>, |v>)
    pub fn vectors(&self) -> ([C64; 2], [C64; 2]) {
        let (s, c) = self.theta.sin_cos();
        let e = C64::from_polar(1.0, self.phi);
        ([C64::new(c, 0.0), e * s], [C64::new(s, 0.0), -e * c])
    }

    /// Same projector pair with θ in [0, π/2] and φ in [0, 2π).
    pub fn canonical(&self) -> Self {
        let mut theta = self.theta.rem_euclid(PI);
        if theta > FRAC_PI_2 {
            // θ - π/2 swaps |u> and |v>
            theta -= FRAC_PI_2;
        }
        Self {
            theta,
            phi: self.phi.rem_euclid(2.0 * PI),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiscordResult {
    pub discord: f64,
    pub mutual_info: f64,
    pub classical_corr: f64,
    pub argmax_basis: MeasurementBasis,
    pub grid_resolution: (usize, usize),
    pub refined: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiscordOptions {
    pub measured: Subsystem,
    pub n_theta: usize,
    pub n_phi: usize,
    pub refine: bool,
    pub log_base: LogBase,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        Self {
            measured: Subsystem::First,
            n_theta: 64,
            n_phi: 128,
            refine: true,
            log_base: LogBase::Natural,
        }
    }
}

impl DiscordOptions {
    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 8 || self.n_phi < 8 {
            return Err(Error::config(
                "discord.n_theta/n_phi",
                "grid needs at least 8 x 8 points",
            ));
        }
        Ok(())
    }
}

fn check_two_qubit(rho: &ComplexMatrix) -> Result<()> {
    rho.check_square_dim(4, "two-qubit density matrix")
}

/// I(ρ) = S(ρ_A) + S(ρ_B) - S(ρ)
pub fn mutual_information(rho: &ComplexMatrix, base: LogBase) -> Result<f64> {
    check_two_qubit(rho)?;
    let sa = vn_entropy(&partial_trace(rho, Subsystem::First)?, base)?;
    let sb = vn_entropy(&partial_trace(rho, Subsystem::Second)?, base)?;
    let s = vn_entropy(rho, base)?;
    Ok(sa + sb - s)
}

fn entropy_from_eigenvalues(ls: &[f64], base: LogBase) -> f64 {
    ls.iter()
        .filter(|&&l| l > 1e-12)
        .map(|&l| -l * base.log(l))
        .sum::<f64>()
        .max(0.0)
}

/// Pre-split 2x2 blocks of ρ indexed by the measured qubit's (i, j).
struct Blocks {
    b: [[ComplexMatrix; 2]; 2],
    s_unmeasured: f64,
    base: LogBase,
}

impl Blocks {
    fn new(rho: &ComplexMatrix, measured: Subsystem, base: LogBase) -> Result<Self> {
        check_two_qubit(rho)?;
        let block = |i: usize, j: usize| {
            let mut m = ComplexMatrix::zeros(2);
            for k in 0..2 {
                for l in 0..2 {
                    m[(k, l)] = match measured {
                        Subsystem::First => rho[(2 * i + k, 2 * j + l)],
                        Subsystem::Second => rho[(2 * k + i, 2 * l + j)],
                    };
                }
            }
            m
        };
        let s_unmeasured = vn_entropy(&partial_trace(rho, measured.other())?, base)?;
        Ok(Self {
            b: [[block(0, 0), block(0, 1)], [block(1, 0), block(1, 1)]],
            s_unmeasured,
            base,
        })
    }

    /// S(ρ_B) - Σ_k p_k S(ρ_B|k)
    fn conditional(&self, basis: &MeasurementBasis) -> f64 {
        let (u, v) = basis.vectors();
        let mut avg = 0.0;
        for w in [u, v] {
            // <w|_A ρ |w>_A
            let mut m = ComplexMatrix::zeros(2);
            for i in 0..2 {
                for j in 0..2 {
                    m.axpy(w[i].conj() * w[j], &self.b[i][j]);
                }
            }
            let p = m.trace().re;
            if p < MIN_OUTCOME_PROBABILITY {
                continue;
            }
            let ls = eigenvalues_2x2(&m.scale_real(1.0 / p));
            avg += p * entropy_from_eigenvalues(&ls, self.base);
        }
        self.s_unmeasured - avg
    }
}

/// Information about the unmeasured qubit gained by measuring `measured` in
/// `basis`.
pub fn conditional_information(
    rho: &ComplexMatrix,
    basis: &MeasurementBasis,
    measured: Subsystem,
    base: LogBase,
) -> Result<f64> {
    Ok(Blocks::new(rho, measured, base)?.conditional(basis))
}

/// Discord with measurement on `opts.measured`.
pub fn quantum_discord(rho: &ComplexMatrix, opts: &DiscordOptions) -> Result<DiscordResult> {
    opts.validate()?;
    let blocks = Blocks::new(rho, opts.measured, opts.log_base)?;
    let mutual_info = mutual_information(rho, opts.log_base)?;

    let (nt, np) = (opts.n_theta, opts.n_phi);
    let dtheta = FRAC_PI_2 / (nt - 1) as f64;
    let dphi = 2.0 * PI / np as f64;
    let values: Vec<(f64, MeasurementBasis)> = (0..nt * np)
        .into_par_iter()
        .map(|idx| {
            let b = MeasurementBasis::new((idx / np) as f64 * dtheta, (idx % np) as f64 * dphi);
            (blocks.conditional(&b), b)
        })
        .collect();
    let (mut best, mut basis) = values[0];
    for &(v, b) in &values[1..] {
        if v > best {
            best = v;
            basis = b;
        }
    }

    if opts.refine {
        let f = |x: [f64; 2]| -blocks.conditional(&MeasurementBasis::new(x[0], x[1]));
        let (x, fx) = nelder_mead(f, [basis.theta, basis.phi], [0.5 * dtheta, 0.5 * dphi]);
        if -fx > best {
            best = -fx;
            basis = MeasurementBasis::new(x[0], x[1]).canonical();
        }
    }

    let mut classical_corr = best;
    let mut discord = mutual_info - classical_corr;
    if discord < 0.0 {
        if discord < -DISCORD_FLOOR {
            return Err(Error::Contract(format!(
                "classical correlation exceeds mutual information by {:.3e}",
                -discord
            )));
        }
        discord = 0.0;
        classical_corr = mutual_info;
    }
    Ok(DiscordResult {
        discord,
        mutual_info,
        classical_corr,
        argmax_basis: basis,
        grid_resolution: (nt, np),
        refined: opts.refine,
    })
}

/// Minimizes `f` from `x0` with initial simplex steps `step`.
fn nelder_mead(f: impl Fn([f64; 2]) -> f64, x0: [f64; 2], step: [f64; 2]) -> ([f64; 2], f64) {
    let mut pts = [x0, [x0[0] + step[0], x0[1]], [x0[0], x0[1] + step[1]]];
    let mut vals = pts.map(&f);
    for _ in 0..REFINE_MAX_ITERATIONS {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.map(|i| pts[i]);
        vals = order.map(|i| vals[i]);

        let size = (1..3)
            .map(|k| (pts[k][0] - pts[0][0]).abs().max((pts[k][1] - pts[0][1]).abs()))
            .fold(0.0, f64::max);
        if size < REFINE_TOLERANCE {
            break;
        }

        let centroid = [0.5 * (pts[0][0] + pts[1][0]), 0.5 * (pts[0][1] + pts[1][1])];
        let along = |t: f64| {
            [
                centroid[0] + t * (pts[2][0] - centroid[0]),
                centroid[1] + t * (pts[2][1] - centroid[1]),
            ]
        };
        let xr = along(-1.0);
        let fr = f(xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(xe);
            if fe < fr {
                (pts[2], vals[2]) = (xe, fe);
            } else {
                (pts[2], vals[2]) = (xr, fr);
            }
        } else if fr < vals[1] {
            (pts[2], vals[2]) = (xr, fr);
        } else {
            let xc = if fr < vals[2] { along(-0.5) } else { along(0.5) };
            let fc = f(xc);
            if fc < vals[2].min(fr) {
                (pts[2], vals[2]) = (xc, fc);
            } else {
                for k in 1..3 {
                    pts[k] = [
                        pts[0][0] + 0.5 * (pts[k][0] - pts[0][0]),
                        pts[0][1] + 0.5 * (pts[k][1] - pts[0][1]),
                    ];
                    vals[k] = f(pts[k]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (pts[best], vals[best])
}

/// Discord of the recorded states, evaluated roughly every `stride_us` of
/// simulated time (always including the first and last record).
pub fn discord_trace(series: &TimeSeries, stride_us: f64, opts: &DiscordOptions) -> Result<Vec<(f64, DiscordResult)>> {
    if !(stride_us.is_finite() && stride_us >= 0.0) {
        return Err(Error::config("outputs.discord_stride_us", "must be finite and >= 0"));
    }
    let mut picks = Vec::new();
    let mut next = f64::NEG_INFINITY;
    let last = series.times.len().saturating_sub(1);
    for (i, &t) in series.times.iter().enumerate() {
        if t >= next - 1e-9 || i == last {
            picks.push(i);
            if stride_us > 0.0 {
                next = (((t + 1e-9) / stride_us).floor() + 1.0) * stride_us;
            }
        }
    }
    picks
        .into_par_iter()
        .map(|i| Ok((series.times[i], quantum_discord(&series.states[i], opts)?)))
        .collect()
}
