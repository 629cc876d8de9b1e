use crate::error::{Error, Result};
use crate::hamiltonians::{NvParams, Target, TwoSpinParams};
use crate::noise::NoiseProfile;

use super::config::*;

/// Electron T2 used by every NV preset (us).
pub const T2_US: f64 = 150.0;

const SHORT_WINDOW_US: f64 = 10.0;
const LONG_WINDOW_US: f64 = 150.0;

/// Preset names with one-line descriptions, sorted by name.
pub const PRESETS: [(&str, &str); 18] = [
    (
        "fig2a",
        "two spins, V0 = 0, Omega1 = Omega2 = 2 MHz: independent flops |gg> <-> |ee>",
    ),
    (
        "fig2b",
        "two spins, V0 = 2 MHz, Omega1 = Omega2 = 2 MHz: all four states populated",
    ),
    (
        "fig2c",
        "two spins, V0 = 0, Omega1 = 2 MHz, Omega2 = 100 kHz: slow second spin still flips",
    ),
    (
        "fig2d",
        "two spins, V0 = 2 MHz, Omega1 = 2 MHz, Omega2 = 100 kHz: second spin frozen",
    ),
    (
        "fig3a",
        "NV, Omega_MW = Omega_RF = 4 MHz: electron and nucleus both flop",
    ),
    (
        "fig3b_caption",
        "NV, Omega_MW = 4 MHz, Omega_RF = 40 kHz: nucleus frozen in |g>",
    ),
    (
        "fig3b_text",
        "NV, Omega_MW = 4 MHz, Omega_RF = 100 kHz: nucleus frozen in |g>",
    ),
    (
        "fig3c",
        "NV, Omega_MW = 4 MHz, Omega_RF = 40 kHz over 150 us: long-time freezing",
    ),
    (
        "fig4a",
        "NV, resonant 40 kHz RF noise, no MW: nucleus flops |gg> <-> |ge>",
    ),
    (
        "fig4b",
        "NV, resonant 40 kHz RF noise + 4 MHz MW: nucleus decoupled from the noise",
    ),
    ("fig4c", "NV, nuclear superposition, resonant 40 kHz RF noise, no MW"),
    (
        "fig4d",
        "NV, nuclear superposition, resonant 40 kHz RF noise + 4 MHz MW: pinned at 0.5",
    ),
    ("fig5a", "NV, 4 MHz MW, Gaussian RF noise A0 = 30 kHz, sigma = 10 kHz"),
    ("fig5b", "NV, 4 MHz MW, Gaussian RF noise A0 = 30 kHz, sigma = 100 kHz"),
    ("fig5c", "NV, 4 MHz MW, uniform RF noise K = 10 kHz over +-0.5 MHz"),
    ("fig5d", "NV, 4 MHz MW, uniform RF noise K = 20 kHz over +-0.5 MHz"),
    (
        "fig6a",
        "NV discord, equal superposition, resonant 40 kHz RF noise, no MW",
    ),
    (
        "fig6b",
        "NV discord, equal superposition, resonant 40 kHz RF noise + 4 MHz MW",
    ),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

fn two_spin(name: &str, omega_1: f64, omega_2: f64, v0: f64) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        description: describe(name),
        model: ModelKind::TwoSpin,
        frame: FrameKind::Rotating,
        seed: 0,
        two_spin: Some(TwoSpinParams::resonant(omega_1, omega_2, v0)),
        nv: None,
        initial_state: InitialState::basis("gg"),
        drives: vec![],
        noise: None,
        channels: ChannelConfig::default(),
        grid: GridConfig::window(SHORT_WINDOW_US),
        outputs: OutputConfig::default(),
        metric: None,
    }
}

fn nv(name: &str, mw: f64, t_end: f64, initial_state: InitialState) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        description: describe(name),
        model: ModelKind::NvReduced,
        frame: FrameKind::Rotating,
        seed: 0,
        two_spin: None,
        nv: Some(NvParams::default()),
        initial_state,
        drives: vec![DriveConfig::named(Target::Electron, mw, CarrierRef::ElectronMidway)],
        noise: None,
        channels: ChannelConfig { t2_us: Some(T2_US) },
        grid: GridConfig::window(t_end),
        outputs: OutputConfig::default(),
        metric: None,
    }
}

fn with_rf(mut cfg: ScenarioConfig, rf: f64) -> ScenarioConfig {
    cfg.drives
        .push(DriveConfig::named(Target::Nuclear, rf, CarrierRef::NuclearG));
    cfg
}

fn with_noise(mut cfg: ScenarioConfig, profile: NoiseProfile) -> ScenarioConfig {
    cfg.noise = Some(NoiseConfig::new(profile, Some(CarrierRef::NuclearG)));
    cfg
}

const RESONANT_NOISE: NoiseProfile = NoiseProfile::SingleTone {
    rabi: 0.04,
    frequency: 0.0,
};

fn describe(name: &str) -> String {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, d)| d.to_string())
        .unwrap_or_default()
}

/// Built-in scenario by name.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let gg = || InitialState::basis("gg");
    let nuc_sup = || InitialState::NuclearSuperposition {
        electron: QubitState::G,
    };
    let cfg = match name {
        "fig2a" => two_spin(name, 2.0, 2.0, 0.0),
        "fig2b" => two_spin(name, 2.0, 2.0, 2.0),
        "fig2c" => two_spin(name, 2.0, 0.1, 0.0),
        "fig2d" => two_spin(name, 2.0, 0.1, 2.0),
        "fig3a" => with_rf(nv(name, 4.0, SHORT_WINDOW_US, gg()), 4.0),
        "fig3b_caption" => with_rf(nv(name, 4.0, SHORT_WINDOW_US, gg()), 0.04),
        "fig3b_text" => with_rf(nv(name, 4.0, SHORT_WINDOW_US, gg()), 0.1),
        "fig3c" => with_rf(nv(name, 4.0, LONG_WINDOW_US, gg()), 0.04),
        "fig4a" => with_noise(nv(name, 0.0, LONG_WINDOW_US, gg()), RESONANT_NOISE),
        "fig4b" => with_noise(nv(name, 4.0, LONG_WINDOW_US, gg()), RESONANT_NOISE),
        "fig4c" => with_noise(nv(name, 0.0, LONG_WINDOW_US, nuc_sup()), RESONANT_NOISE),
        "fig4d" => with_noise(nv(name, 4.0, LONG_WINDOW_US, nuc_sup()), RESONANT_NOISE),
        "fig5a" | "fig5b" => {
            let sigma = if name == "fig5a" { 0.01 } else { 0.1 };
            let profile = NoiseProfile::Gaussian {
                a0: 0.03,
                sigma,
                center: 0.0,
            };
            with_noise(nv(name, 4.0, LONG_WINDOW_US, gg()), profile)
        }
        "fig5c" | "fig5d" => {
            let k = if name == "fig5c" { 0.01 } else { 0.02 };
            let profile = NoiseProfile::UniformBand {
                k,
                f_lo: -0.5,
                f_hi: 0.5,
            };
            with_noise(nv(name, 4.0, LONG_WINDOW_US, gg()), profile)
        }
        "fig6a" | "fig6b" => {
            let mw = if name == "fig6a" { 0.0 } else { 4.0 };
            let mut cfg = with_noise(
                nv(name, mw, LONG_WINDOW_US, InitialState::ProductSuperposition),
                RESONANT_NOISE,
            );
            cfg.outputs.discord = true;
            cfg
        }
        _ => {
            return Err(Error::UnknownPreset {
                name: name.to_string(),
                valid: preset_names().into_iter().map(String::from).collect(),
            })
        }
    };
    Ok(cfg)
}
