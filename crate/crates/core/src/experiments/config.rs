//! Scenario configuration schema (TOML).
//!
//! ```toml
//! name = "fig3b_caption"
//! model = "nv_reduced"          # two_spin | nv_reduced | nv_full
//! frame = "rotating"            # rotating | lab
//! seed = 0
//!
//! [nv]                          # any subset; defaults fill the rest
//! b_z = 500.0
//!
//! [initial_state]
//! kind = "basis"                # basis | nuclear_superposition | product_superposition | pure
//! label = "gg"
//!
//! [[drives]]
//! target = "electron"
//! rabi = 4.0
//! carrier = "electron_midway"   # or a number in MHz
//!
//! [noise]
//! profile = "uniform_band"      # single_tone | gaussian | uniform_band
//! k = 0.02
//! f_lo = -0.5
//! f_hi = 0.5
//! relative_to = "nuclear_g"     # frequencies are offsets from this transition
//!
//! [channels]
//! t2_us = 150.0
//!
//! [grid]
//! t_end = 150.0                 # us; dt and record_every_us are optional
//!
//! [outputs]
//! discord = true
//! ```

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::discord::DiscordOptions;
use crate::dynamics::{Method, SimulationGrid};
use crate::error::{Error, Result};
use crate::hamiltonians::{DriveSpec, NvParams, Target, Transitions, TwoSpinParams};
use crate::linalg::ComplexMatrix;
use crate::noise::{NoiseProfile, NoiseSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    TwoSpin,
    NvReduced,
    NvFull,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    #[default]
    Rotating,
    Lab,
}

/// Named transitions of the two-qubit subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarrierRef {
    /// Midway between |gg>->|eg> and |ge>->|ee>.
    ElectronMidway,
    /// |gg> -> |eg>
    ElectronG,
    /// |ge> -> |ee>
    ElectronE,
    /// |gg> -> |ge>
    NuclearG,
    /// |eg> -> |ee>
    NuclearE,
}

impl CarrierRef {
    pub fn frequency(self, tr: &Transitions) -> f64 {
        match self {
            CarrierRef::ElectronMidway => tr.electron_midway(),
            CarrierRef::ElectronG => tr.electron_g,
            CarrierRef::ElectronE => tr.electron_e,
            CarrierRef::NuclearG => tr.nuclear_g,
            CarrierRef::NuclearE => tr.nuclear_e,
        }
    }

    pub fn default_for(target: Target) -> Self {
        match target {
            Target::Electron => CarrierRef::ElectronMidway,
            Target::Nuclear => CarrierRef::NuclearG,
        }
    }
}

/// A carrier given in MHz or by transition name.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Carrier {
    Mhz(f64),
    Named(CarrierRef),
}

impl Carrier {
    pub fn resolve(&self, tr: &Transitions) -> f64 {
        match self {
            Carrier::Mhz(f) => *f,
            Carrier::Named(r) => r.frequency(tr),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    pub target: Target,
    /// MHz
    pub rabi: f64,
    pub carrier: Carrier,
    #[serde(default)]
    pub phase: f64,
}

impl DriveConfig {
    pub fn named(target: Target, rabi: f64, carrier: CarrierRef) -> Self {
        Self {
            target,
            rabi,
            carrier: Carrier::Named(carrier),
            phase: 0.0,
        }
    }

    pub fn resolve(&self, tr: &Transitions) -> DriveSpec {
        DriveSpec {
            target: self.target,
            rabi: self.rabi,
            carrier: self.carrier.resolve(tr),
            phase: self.phase,
        }
    }
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    #[serde(flatten)]
    pub spec: NoiseSpec,
    /// When set, every profile frequency is an offset (MHz) from this
    /// transition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_to: Option<CarrierRef>,
    /// Seeds seed, seed+1, ... are run and their states averaged.
    #[serde(default = "one")]
    pub realizations: usize,
}

impl NoiseConfig {
    pub fn new(profile: NoiseProfile, relative_to: Option<CarrierRef>) -> Self {
        Self {
            spec: NoiseSpec::new(profile),
            relative_to,
            realizations: 1,
        }
    }

    /// Noise spec with absolute frequencies.
    pub fn absolute(&self, tr: &Transitions) -> NoiseSpec {
        let Some(r) = self.relative_to else {
            return self.spec;
        };
        let f0 = r.frequency(tr);
        let profile = match self.spec.profile {
            NoiseProfile::SingleTone { rabi, frequency } => NoiseProfile::SingleTone {
                rabi,
                frequency: frequency + f0,
            },
            NoiseProfile::Gaussian { a0, sigma, center } => NoiseProfile::Gaussian {
                a0,
                sigma,
                center: center + f0,
            },
            NoiseProfile::UniformBand { k, f_lo, f_hi } => NoiseProfile::UniformBand {
                k,
                f_lo: f_lo + f0,
                f_hi: f_hi + f0,
            },
        };
        NoiseSpec { profile, ..self.spec }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitState {
    G,
    E,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    /// One of gg, ge, eg, ee.
    Basis { label: String },
    /// |electron> ⊗ (|g> + |e>)/sqrt(2)
    NuclearSuperposition { electron: QubitState },
    /// (|g> + |e>)/sqrt(2) ⊗ (|g> + |e>)/sqrt(2)
    ProductSuperposition,
    /// Four amplitudes [re, im] in basis order.
    Pure { amplitudes: Vec<[f64; 2]> },
}

impl InitialState {
    pub fn basis(label: &str) -> Self {
        InitialState::Basis {
            label: label.to_string(),
        }
    }

    pub fn amplitudes(&self) -> Result<[C64; 4]> {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Ok(match self {
            InitialState::Basis { label } => {
                let k = ["gg", "ge", "eg", "ee"]
                    .iter()
                    .position(|l| l == label)
                    .ok_or_else(|| {
                        Error::config("initial_state.label", format!("`{label}` is not one of gg, ge, eg, ee"))
                    })?;
                let mut a = [z; 4];
                a[k] = one;
                a
            }
            InitialState::NuclearSuperposition { electron } => match electron {
                QubitState::G => [h, h, z, z],
                QubitState::E => [z, z, h, h],
            },
            InitialState::ProductSuperposition => [C64::new(0.5, 0.0); 4],
            InitialState::Pure { amplitudes } => {
                if amplitudes.len() != 4 {
                    return Err(Error::config("initial_state.amplitudes", "needs exactly 4 amplitudes"));
                }
                let a: Vec<C64> = amplitudes.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                let norm: f64 = a.iter().map(|c| c.norm_sqr()).sum();
                if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
                    return Err(Error::config(
                        "initial_state.amplitudes",
                        format!("state norm {norm} is not 1 (tolerance 1e-12)"),
                    ));
                }
                [a[0], a[1], a[2], a[3]]
            }
        })
    }

    /// Density matrix, embedded in the 9-level space when `dim` is 9.
    pub fn density_matrix(&self, dim: usize) -> Result<ComplexMatrix> {
        let a = self.amplitudes()?;
        match dim {
            4 => Ok(ComplexMatrix::outer(&a)),
            9 => {
                let mut psi = [C64::new(0.0, 0.0); 9];
                for (k, &idx) in crate::hamiltonians::SUBSPACE_IN_FULL.iter().enumerate() {
                    psi[idx] = a[k];
                }
                Ok(ComplexMatrix::outer(&psi))
            }
            other => Err(Error::dim("dimension 4 or 9", other)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct ChannelConfig {
    /// Electron T2 (us); no dephasing when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2_us: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// us
    pub t_end: f64,
    /// us; chosen from the model and frame when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// us; defaults to t_end / 2000.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every_us: Option<f64>,
    #[serde(default)]
    pub method: Method,
}

impl GridConfig {
    pub fn window(t_end: f64) -> Self {
        Self {
            t_end,
            dt: None,
            record_every_us: None,
            method: Method::Rk4Fixed,
        }
    }
}

fn default_discord_stride() -> f64 {
    0.5
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default)]
    pub nuclear_marginal: bool,
    #[serde(default)]
    pub discord: bool,
    #[serde(default = "default_discord_stride")]
    pub discord_stride_us: f64,
    #[serde(default)]
    pub discord_options: DiscordOptions,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            nuclear_marginal: false,
            discord: false,
            discord_stride_us: default_discord_stride(),
            discord_options: DiscordOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreezingMode {
    /// Leakage = P_ge + P_ee.
    Ground,
    /// Leakage = |P_g^N(t) - P_g^N(0)|.
    Superposition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub model: ModelKind,
    #[serde(default)]
    pub frame: FrameKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_spin: Option<TwoSpinParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nv: Option<NvParams>,
    pub initial_state: InitialState,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drives: Vec<DriveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    #[serde(default)]
    pub channels: ChannelConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    /// Inferred from the initial state when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<FreezingMode>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let span = e
                .span()
                .map(|s| format!(" (bytes {}..{})", s.start, s.end))
                .unwrap_or_default();
            Error::config("config", format!("{}{span}", e.message()))
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn nv_params(&self) -> NvParams {
        self.nv.unwrap_or_default()
    }

    pub fn freezing_mode(&self) -> FreezingMode {
        self.metric.unwrap_or(match self.initial_state {
            InitialState::NuclearSuperposition { .. } | InitialState::ProductSuperposition => {
                FreezingMode::Superposition
            }
            _ => FreezingMode::Ground,
        })
    }

    pub fn dim(&self) -> usize {
        match self.model {
            ModelKind::NvFull => 9,
            _ => 4,
        }
    }

    /// Integration grid, filling in automatic step and record stride.
    ///
    /// `max_carrier` bounds an explicit lab-frame step (dt <= 1/(20 f)); the
    /// automatic lab step is 1/(40 f) with f the larger of `max_carrier` and
    /// `static_bandwidth`, so levels far above the driven ones (m_S = +1 in
    /// the 9-level model) are resolved too.
    pub fn simulation_grid(&self, max_carrier: f64, static_bandwidth: f64) -> Result<SimulationGrid> {
        let g = &self.grid;
        if !(g.t_end.is_finite() && g.t_end > 0.0) {
            return Err(Error::config("grid.t_end", "must be finite and > 0"));
        }
        let lab = self.frame == FrameKind::Lab;
        let dt = match g.dt {
            Some(dt) => dt,
            None if lab && max_carrier > 0.0 => 1.0 / (40.0 * max_carrier.max(static_bandwidth)),
            None if lab => 0.002,
            None => match self.model {
                ModelKind::TwoSpin => 0.001,
                _ => 0.002,
            },
        };
        if !(dt.is_finite() && dt > 0.0 && dt <= g.t_end) {
            return Err(Error::config("grid.dt", "must satisfy 0 < dt <= t_end"));
        }
        if lab && max_carrier > 0.0 && dt > 1.0 / (20.0 * max_carrier) * (1.0 + 1e-12) {
            return Err(Error::config(
                "grid.dt",
                format!(
                    "lab-frame step must be <= 1/(20 f_max) = {:.3e} us for f_max = {max_carrier} MHz",
                    1.0 / (20.0 * max_carrier)
                ),
            ));
        }
        let every = g.record_every_us.unwrap_or(g.t_end / 2000.0);
        if !(every.is_finite() && every >= 0.0) {
            return Err(Error::config("grid.record_every_us", "must be finite and >= 0"));
        }
        let grid = SimulationGrid::new(g.t_end, dt, 1, g.method);
        let stride = ((every / grid.step()).round() as usize).max(1);
        let grid = SimulationGrid {
            record_stride: stride,
            ..grid
        };
        grid.validate()?;
        Ok(grid)
    }
}
