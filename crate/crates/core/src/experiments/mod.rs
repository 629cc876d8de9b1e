//! Scenario definitions, the scenario runner and freezing metrics.

mod config;
mod presets;

pub use config::*;
pub use presets::{preset, preset_names, PRESETS, T2_US};

use rayon::prelude::*;
use serde::Serialize;

use crate::discord::discord_trace;
use crate::dynamics::{propagate, LindbladChannel, TimeSeries};
use crate::error::{Error, Result};
use crate::hamiltonians::{
    lab_frame_model, nv_ground_hamiltonian_full, nv_reduced_hamiltonian, rotating_frame_model, two_spin_hamiltonian,
    DriveSpec, Frame, HamiltonianModel, Target, SUBSPACE_IN_FULL,
};
use crate::linalg::ComplexMatrix;
use crate::noise::noise_drive_terms;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FreezingMetrics {
    pub mode: FreezingMode,
    pub max_leakage: f64,
    pub mean_leakage: f64,
    /// us
    pub time_window: f64,
}

/// Result of [`run_scenario`].
#[derive(Clone, Debug)]
pub struct ScenarioRun {
    pub config: ScenarioConfig,
    pub series: TimeSeries,
    pub metrics: FreezingMetrics,
    pub warnings: Vec<String>,
}

/// Populations of |gg>, |ge>, |eg>, |ee> from a 4- or 9-level population
/// vector.
pub fn subspace_populations(p: &[f64]) -> Result<[f64; 4]> {
    match p.len() {
        4 => Ok([p[0], p[1], p[2], p[3]]),
        9 => Ok(SUBSPACE_IN_FULL.map(|i| p[i])),
        n => Err(Error::dim("4 or 9 populations", n)),
    }
}

/// Leakage statistics over every recorded time of `series`.
pub fn freezing_metrics(series: &TimeSeries, mode: FreezingMode) -> Result<FreezingMetrics> {
    if series.populations.is_empty() {
        return Err(Error::Contract(
            "freezing metrics need a non-empty population series".into(),
        ));
    }
    let sub: Vec<[f64; 4]> = series
        .populations
        .iter()
        .map(|p| subspace_populations(p))
        .collect::<Result<_>>()?;
    let leak: Vec<f64> = match mode {
        FreezingMode::Ground => sub.iter().map(|p| p[1] + p[3]).collect(),
        FreezingMode::Superposition => {
            let png = |p: &[f64; 4]| p[0] + p[2];
            let p0 = png(&sub[0]);
            sub.iter().map(|p| (png(p) - p0).abs()).collect()
        }
    };
    let max_leakage = leak.iter().copied().fold(0.0, f64::max).clamp(0.0, 1.0);
    let mean_leakage = (leak.iter().sum::<f64>() / leak.len() as f64).clamp(0.0, max_leakage);
    Ok(FreezingMetrics {
        mode,
        max_leakage,
        mean_leakage,
        time_window: series.times.last().copied().unwrap_or(0.0) - series.times[0],
    })
}

/// Hamiltonian model for the scenario with the noise realization of `seed`.
pub fn build_model(cfg: &ScenarioConfig, seed: u64) -> Result<HamiltonianModel> {
    let p = cfg.nv_params();
    let tr = p.transitions();
    let mut drives: Vec<DriveSpec> = cfg.drives.iter().map(|d| d.resolve(&tr)).collect();
    for d in &drives {
        d.validate()?;
    }
    let noise = match &cfg.noise {
        Some(n) => {
            if n.realizations == 0 {
                return Err(Error::config("noise.realizations", "must be >= 1"));
            }
            noise_drive_terms(&n.absolute(&tr).build(seed)?, n.spec.target)
        }
        None => vec![],
    };

    match (cfg.model, cfg.frame) {
        (ModelKind::TwoSpin, FrameKind::Rotating) => {
            if !drives.is_empty() || !noise.is_empty() {
                return Err(Error::config(
                    "drives",
                    "the two-spin model takes its drives from [two_spin]; drives/noise are not supported",
                ));
            }
            let params = cfg
                .two_spin
                .ok_or_else(|| Error::config("two_spin", "missing [two_spin] parameters"))?;
            two_spin_hamiltonian(&params)
        }
        (ModelKind::TwoSpin, FrameKind::Lab) => Err(Error::config(
            "frame",
            "the two-spin model is defined in the rotating frame only",
        )),
        (ModelKind::NvFull, FrameKind::Rotating) => Err(Error::config(
            "frame",
            "the 9-level NV model runs in the lab frame only",
        )),
        (ModelKind::NvReduced, FrameKind::Rotating) => {
            // the first drive on each spin sets that spin's frame reference
            let take =
                |drives: &mut Vec<DriveSpec>, target: Target| match drives.iter().position(|d| d.target == target) {
                    Some(i) => drives.remove(i),
                    None => DriveSpec::new(target, 0.0, CarrierRef::default_for(target).frequency(&tr)),
                };
            let mw = take(&mut drives, Target::Electron);
            let rf = take(&mut drives, Target::Nuclear);
            // targets are fixed above, so a contract failure here comes from the parameters
            let mut model = rotating_frame_model(&p, &mw, &rf).map_err(|e| match e {
                Error::Contract(m) => Error::config("frame", m),
                e => e,
            })?;
            for d in drives.into_iter().chain(noise) {
                model.add_drive(d)?;
            }
            Ok(model)
        }
        (ModelKind::NvReduced, FrameKind::Lab) => {
            drives.extend(noise);
            lab_frame_model(nv_reduced_hamiltonian(&p)?, &drives)
        }
        (ModelKind::NvFull, FrameKind::Lab) => {
            drives.extend(noise);
            lab_frame_model(nv_ground_hamiltonian_full(&p)?, &drives)
        }
    }
}

fn channels(cfg: &ScenarioConfig) -> Result<Vec<LindbladChannel>> {
    match cfg.channels.t2_us {
        Some(t2) => Ok(vec![LindbladChannel::electron_dephasing(t2, cfg.dim())?]),
        None => Ok(vec![]),
    }
}

fn validate(cfg: &ScenarioConfig) -> Result<()> {
    if cfg.name.trim().is_empty() {
        return Err(Error::config("name", "must not be empty"));
    }
    if cfg.name.contains(['/', '\\']) {
        return Err(Error::config("name", "must not contain path separators"));
    }
    if cfg.model != ModelKind::TwoSpin {
        cfg.nv_params().validate()?;
    }
    if cfg.outputs.discord {
        if cfg.dim() != 4 {
            return Err(Error::config("outputs.discord", "discord needs a two-qubit model"));
        }
        cfg.outputs.discord_options.validate()?;
    }
    Ok(())
}

/// Runs a scenario end to end. Propagation failures carry the scenario name.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    validate(cfg)?;
    let model = build_model(cfg, cfg.seed)?;
    let bandwidth = match model.frame {
        Frame::Lab => model.static_bandwidth()?,
        Frame::Rotating { .. } => 0.0,
    };
    let grid = cfg.simulation_grid(model.max_carrier(), bandwidth)?;
    let rho0 = cfg.initial_state.density_matrix(cfg.dim())?;
    let chans = channels(cfg)?;
    let warnings = model.warnings.clone();
    let wrap = |e: Error| Error::Scenario {
        name: cfg.name.clone(),
        source: Box::new(e),
    };

    let realizations = cfg.noise.as_ref().map_or(1, |n| n.realizations);
    let mut series = if realizations <= 1 {
        propagate(&rho0, &model, &chans, &grid).map_err(wrap)?
    } else {
        let runs: Vec<TimeSeries> = (0..realizations as u64)
            .into_par_iter()
            .map(|r| {
                let m = build_model(cfg, cfg.seed.wrapping_add(r))?;
                propagate(&rho0, &m, &chans, &grid)
            })
            .collect::<Result<_>>()
            .map_err(wrap)?;
        average(runs)?
    };

    if cfg.outputs.discord {
        let d = discord_trace(&series, cfg.outputs.discord_stride_us, &cfg.outputs.discord_options).map_err(wrap)?;
        series.discord = Some(d);
    }
    let metrics = freezing_metrics(&series, cfg.freezing_mode())?;
    Ok(ScenarioRun {
        config: cfg.clone(),
        series,
        metrics,
        warnings,
    })
}

/// Mean state over realizations (states are averaged, then everything else
/// is recomputed from them).
fn average(runs: Vec<TimeSeries>) -> Result<TimeSeries> {
    let n = runs.len() as f64;
    let mut out = runs[0].clone();
    for (k, state) in out.states.iter_mut().enumerate() {
        let mut acc = ComplexMatrix::zeros(state.dim());
        for r in &runs {
            acc += &r.states[k];
        }
        *state = acc.scale_real(1.0 / n);
    }
    for k in 0..out.states.len() {
        out.populations[k] = crate::dynamics::populations(&out.states[k]);
        out.diagnostics[k] = crate::dynamics::Diagnostics::of(&out.states[k])?;
    }
    out.max_trace_error = runs.iter().map(|r| r.max_trace_error).fold(0.0, f64::max);
    out.min_eigenvalue = runs.iter().map(|r| r.min_eigenvalue).fold(f64::INFINITY, f64::min);
    out.max_hermiticity = runs.iter().map(|r| r.max_hermiticity).fold(0.0, f64::max);
    out.steps_taken = runs.iter().map(|r| r.steps_taken).sum();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Diagnostics;

    fn series_from(pops: &[[f64; 4]]) -> TimeSeries {
        let mut s = TimeSeries::default();
        for (i, p) in pops.iter().enumerate() {
            s.times.push(i as f64);
            s.populations.push(p.to_vec());
            s.diagnostics.push(Diagnostics {
                trace_error: 0.0,
                min_eigenvalue: 0.0,
                hermiticity: 0.0,
            });
        }
        s
    }

    #[test]
    fn constant_ground_series_has_no_leakage() {
        let s = series_from(&[[1.0, 0.0, 0.0, 0.0]; 3]);
        let m = freezing_metrics(&s, FreezingMode::Ground).unwrap();
        assert_eq!(m.max_leakage, 0.0);
        assert_eq!(m.mean_leakage, 0.0);
        assert_eq!(m.time_window, 2.0);
    }

    #[test]
    fn single_excursion() {
        let s = series_from(&[[1.0, 0.0, 0.0, 0.0], [0.93, 0.07, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]]);
        let m = freezing_metrics(&s, FreezingMode::Ground).unwrap();
        assert!((m.max_leakage - 0.07).abs() < 1e-15);
        assert!(m.mean_leakage <= m.max_leakage);
    }

    #[test]
    fn superposition_mode_tracks_nuclear_marginal() {
        let s = series_from(&[[0.5, 0.5, 0.0, 0.0], [0.6, 0.4, 0.0, 0.0]]);
        let m = freezing_metrics(&s, FreezingMode::Superposition).unwrap();
        assert!((m.max_leakage - 0.1).abs() < 1e-12);
    }

    #[test]
    fn empty_series_is_an_error() {
        assert!(freezing_metrics(&TimeSeries::default(), FreezingMode::Ground).is_err());
    }

    #[test]
    fn unknown_preset_lists_names() {
        let e = preset("nosuch").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("fig2a") && msg.contains("fig6b"));
    }

    #[test]
    fn presets_roundtrip_through_toml() {
        for name in preset_names() {
            let cfg = preset(name).unwrap();
            let text = cfg.to_toml().unwrap();
            let back = ScenarioConfig::from_toml(&text).unwrap();
            assert_eq!(back, cfg, "{name}\n{text}");
        }
    }

    #[test]
    fn level_crossing_is_a_config_error() {
        let mut cfg = preset("fig3b_caption").unwrap();
        // electron |0> <-> |-1> crosses near 1024 G
        cfg.nv.as_mut().unwrap().b_z = 1100.0;
        assert!(matches!(run_scenario(&cfg), Err(Error::Config { .. })));
    }

    #[test]
    fn lab_two_spin_is_a_config_error() {
        let mut cfg = preset("fig2a").unwrap();
        cfg.frame = FrameKind::Lab;
        assert!(matches!(run_scenario(&cfg), Err(Error::Config { .. })));
    }
}
