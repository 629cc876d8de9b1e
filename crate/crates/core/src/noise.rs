//! Seeded multitone RF noise.
//!
//! A noise field is a comb of sinusoidal tones with a prescribed amplitude
//! profile and independent uniform random phases. Phases come from
//! [`SplitMix64`], whose recurrence is fixed here so tone lists are
//! bit-identical across platforms and languages:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! out = z ^ (z >> 31)                      (wrapping u64 arithmetic)
//! phase = (out >> 11) * 2^-53 * 2π
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{DriveSpec, Target};

pub const DEFAULT_TONES: usize = 101;

/// Gaussian combs span center ± GAUSSIAN_SPAN_SIGMAS·σ.
pub const GAUSSIAN_SPAN_SIGMAS: f64 = 4.0;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [0, 2π).
    pub fn next_phase(&mut self) -> f64 {
        let p = self.next_f64() * 2.0 * PI;
        // rounding in the product can land exactly on 2π
        if p >= 2.0 * PI {
            f64::from_bits((2.0 * PI).to_bits() - 1)
        } else {
            p
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseTone {
    /// MHz
    pub rabi: f64,
    /// MHz
    pub frequency: f64,
    /// rad, in [0, 2π)
    pub phase: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Per-tone amplitude = profile / sqrt(n_tones): total power independent
    /// of the comb size.
    #[default]
    SqrtN,
    /// Per-tone amplitude = profile value.
    PerTone,
}

impl Normalization {
    fn factor(self, n: usize) -> f64 {
        match self {
            Normalization::SqrtN => 1.0 / (n as f64).sqrt(),
            Normalization::PerTone => 1.0,
        }
    }
}

/// Noise amplitude profile (MHz throughout).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum NoiseProfile {
    /// One tone with phase 0.
    SingleTone { rabi: f64, frequency: f64 },
    /// A(f) = a0·exp(-(f - center)² / (2σ²)), truncated at ±4σ.
    Gaussian { a0: f64, sigma: f64, center: f64 },
    /// Flat amplitude `k` over [f_lo, f_hi].
    UniformBand { k: f64, f_lo: f64, f_hi: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    pub tones: Vec<NoiseTone>,
    pub seed: u64,
    pub profile: NoiseProfile,
    pub normalization: Normalization,
}

fn check_finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(format!("noise.{field}"), "must be finite"))
    }
}

fn check_tones(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::config("noise.n_tones", "must be >= 1"));
    }
    Ok(())
}

fn finish(model: NoiseModel) -> Result<NoiseModel> {
    if let Some(t) = model.tones.iter().find(|t| t.frequency <= 0.0) {
        return Err(Error::config(
            "noise",
            format!("tone frequency {} MHz is not positive", t.frequency),
        ));
    }
    Ok(model)
}

pub fn single_tone(rabi: f64, frequency: f64) -> Result<NoiseModel> {
    check_finite("rabi", rabi)?;
    check_finite("frequency", frequency)?;
    if rabi < 0.0 {
        return Err(Error::config("noise.rabi", "must be >= 0"));
    }
    finish(NoiseModel {
        tones: vec![NoiseTone {
            rabi,
            frequency,
            phase: 0.0,
        }],
        seed: 0,
        profile: NoiseProfile::SingleTone { rabi, frequency },
        normalization: Normalization::PerTone,
    })
}

pub fn gaussian_noise(a0: f64, sigma: f64, center: f64, n_tones: usize, seed: u64) -> Result<NoiseModel> {
    gaussian_noise_with(a0, sigma, center, n_tones, seed, Normalization::SqrtN)
}

pub fn gaussian_noise_with(
    a0: f64,
    sigma: f64,
    center: f64,
    n_tones: usize,
    seed: u64,
    normalization: Normalization,
) -> Result<NoiseModel> {
    check_finite("a0", a0)?;
    check_finite("sigma", sigma)?;
    check_finite("center", center)?;
    if a0 <= 0.0 {
        return Err(Error::config("noise.a0", "must be > 0"));
    }
    if sigma <= 0.0 {
        return Err(Error::config("noise.sigma", "must be > 0"));
    }
    check_tones(n_tones)?;
    let spacing = if n_tones > 1 {
        2.0 * GAUSSIAN_SPAN_SIGMAS * sigma / (n_tones - 1) as f64
    } else {
        0.0
    };
    let mid = 0.5 * (n_tones - 1) as f64;
    let norm = normalization.factor(n_tones);
    let mut rng = SplitMix64::new(seed);
    let tones = (0..n_tones)
        .map(|k| {
            // offset computed from a symmetric index so the comb is exactly
            // mirror-symmetric about the center
            let x = (k as f64 - mid) * spacing;
            NoiseTone {
                rabi: a0 * (-x * x / (2.0 * sigma * sigma)).exp() * norm,
                frequency: center + x,
                phase: rng.next_phase(),
            }
        })
        .collect();
    finish(NoiseModel {
        tones,
        seed,
        profile: NoiseProfile::Gaussian { a0, sigma, center },
        normalization,
    })
}

pub fn uniform_band_noise(k: f64, f_lo: f64, f_hi: f64, n_tones: usize, seed: u64) -> Result<NoiseModel> {
    uniform_band_noise_with(k, f_lo, f_hi, n_tones, seed, Normalization::SqrtN)
}

pub fn uniform_band_noise_with(
    k: f64,
    f_lo: f64,
    f_hi: f64,
    n_tones: usize,
    seed: u64,
    normalization: Normalization,
) -> Result<NoiseModel> {
    check_finite("k", k)?;
    check_finite("f_lo", f_lo)?;
    check_finite("f_hi", f_hi)?;
    if k < 0.0 {
        return Err(Error::config("noise.k", "must be >= 0"));
    }
    if f_lo >= f_hi {
        return Err(Error::config("noise.f_lo", "band needs f_lo < f_hi"));
    }
    check_tones(n_tones)?;
    let rabi = k * normalization.factor(n_tones);
    let mut rng = SplitMix64::new(seed);
    let tones = (0..n_tones)
        .map(|i| {
            let frequency = if n_tones == 1 {
                0.5 * (f_lo + f_hi)
            } else if i == n_tones - 1 {
                f_hi
            } else {
                f_lo + (f_hi - f_lo) * i as f64 / (n_tones - 1) as f64
            };
            NoiseTone {
                rabi,
                frequency,
                phase: rng.next_phase(),
            }
        })
        .collect();
    finish(NoiseModel {
        tones,
        seed,
        profile: NoiseProfile::UniformBand { k, f_lo, f_hi },
        normalization,
    })
}

/// One sinusoidal drive per tone, in tone order.
pub fn noise_drive_terms(model: &NoiseModel, target: Target) -> Vec<DriveSpec> {
    model
        .tones
        .iter()
        .map(|t| DriveSpec {
            target,
            rabi: t.rabi,
            carrier: t.frequency,
            phase: t.phase,
        })
        .collect()
}

fn default_tones() -> usize {
    DEFAULT_TONES
}

fn default_noise_target() -> Target {
    Target::Nuclear
}

/// Serializable noise description; the seed comes from the scenario.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(flatten)]
    pub profile: NoiseProfile,
    #[serde(default = "default_tones")]
    pub n_tones: usize,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default = "default_noise_target")]
    pub target: Target,
}

impl NoiseSpec {
    pub fn new(profile: NoiseProfile) -> Self {
        Self {
            profile,
            n_tones: DEFAULT_TONES,
            normalization: Normalization::SqrtN,
            target: Target::Nuclear,
        }
    }

    pub fn build(&self, seed: u64) -> Result<NoiseModel> {
        match self.profile {
            NoiseProfile::SingleTone { rabi, frequency } => single_tone(rabi, frequency),
            NoiseProfile::Gaussian { a0, sigma, center } => {
                gaussian_noise_with(a0, sigma, center, self.n_tones, seed, self.normalization)
            }
            NoiseProfile::UniformBand { k, f_lo, f_hi } => {
                uniform_band_noise_with(k, f_lo, f_hi, self.n_tones, seed, self.normalization)
            }
        }
    }
}
