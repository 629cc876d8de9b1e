//! Regenerates tests/data/golden.toml: reference thresholds computed with
//! the Liouvillian-exponential integrator at a tenth of the preset step, and
//! the Werner-state discord from a 1000 x 1000 measurement grid.
//!
//!     cargo run --release -p spinfreeze --example golden

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use spinfreeze::discord::{quantum_discord, DiscordOptions};
use spinfreeze::dynamics::Method;
use spinfreeze::experiments::{preset, run_scenario, ScenarioConfig};
use spinfreeze::linalg::ComplexMatrix;

fn oracle(name: &str) -> (f64, ScenarioConfig) {
    let mut cfg = preset(name).expect("preset");
    let auto = cfg.simulation_grid(0.0, 0.0).expect("grid");
    cfg.grid.dt = Some(auto.dt / 10.0);
    cfg.grid.record_every_us = Some(auto.step() * auto.record_stride as f64);
    cfg.grid.method = Method::ExpmPiecewise;
    let run = run_scenario(&cfg).expect("oracle run");
    (run.metrics.max_leakage, cfg)
}

fn werner(p: f64) -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let bell = ComplexMatrix::outer(&[C64::new(h, 0.0), z, z, C64::new(h, 0.0)]);
    &bell.scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0)
}

fn main() {
    let (eps_2d, c2) = oracle("fig2d");
    let (delta_4d, c4) = oracle("fig4d");
    let opts = DiscordOptions {
        n_theta: 1000,
        n_phi: 1000,
        refine: false,
        ..DiscordOptions::default()
    };
    let w = quantum_discord(&werner(0.5), &opts).expect("discord").discord;

    let mut out = String::new();
    writeln!(
        out,
        "# Generated by `cargo run --release -p spinfreeze --example golden`; do not edit."
    )
    .unwrap();
    writeln!(
        out,
        "# fig2d: max(P_ge + P_ee), expm_piecewise, dt = {:e} us",
        c2.grid.dt.unwrap()
    )
    .unwrap();
    writeln!(out, "eps_2d = {eps_2d:e}").unwrap();
    writeln!(
        out,
        "# fig4d: max |P_g^N - 0.5|, expm_piecewise, dt = {:e} us",
        c4.grid.dt.unwrap()
    )
    .unwrap();
    writeln!(out, "delta_4d = {delta_4d:e}").unwrap();
    writeln!(
        out,
        "# Werner p = 0.5, natural log, electron measured, 1000 x 1000 grid"
    )
    .unwrap();
    writeln!(out, "werner_p05_discord = {w:e}").unwrap();

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/golden.toml");
    std::fs::write(path, &out).expect("write golden.toml");
    print!("{out}");
}
