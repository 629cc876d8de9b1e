//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs with `harness = false` so the report is always printed. The process
//! fails if any criterion fails, except those listed in `KNOWN_FAILURES`;
//! a known failure that starts passing also fails the run so the list stays
//! honest.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Deserialize;

use spinfreeze::discord::{quantum_discord, DiscordOptions};
use spinfreeze::dynamics::TimeSeries;
use spinfreeze::experiments::{preset, preset_names, run_scenario, subspace_populations, FrameKind, ScenarioRun};
use spinfreeze::hamiltonians::{
    nv_ground_hamiltonian_full, nv_reduced_hamiltonian, NvParams, SUBSPACE_IN_FULL, TWO_PI,
};
use spinfreeze::linalg::{kron, ComplexMatrix};
use spinfreeze::noise::SplitMix64;

/// Allowance for RK4 against the fine-step oracle values in golden.toml.
const GOLDEN_SLACK: f64 = 1e-4;
const RABI_TOL: f64 = 1e-3;
const RABI_RUNTIME_S: f64 = 1.0;
const FIG2D_CONTROL_RATIO: f64 = 0.02;
const NV_LEAKAGE_MAX: f64 = 5e-2;
const NV_FREEZE_WINDOW_US: f64 = 100.0;
const SECULAR_RATIO: f64 = 2.0;
const EDGE_WINDOW_US: f64 = 25.0;
const FIG4A_MIN_AMPLITUDE: f64 = 0.9;
const FIG4B_MAX_AMPLITUDE: f64 = 0.05;
const SHIELDING_RATIO: f64 = 18.0;
const FIG4C_MIN_AMPLITUDE: f64 = 0.4;
const BROADBAND_MAX: f64 = 0.05;
const DISCORD_START_MAX: f64 = 1e-6;
const DISCORD_PEAK: (f64, f64) = (0.3, 0.7);
const DISCORD_FROZEN_MAX: f64 = 0.05;
const PRODUCT_TOL: f64 = 1e-6;
const BELL_TOL: f64 = 1e-3;
const WERNER_TOL: f64 = 1e-4;
const TRACE_TOL: f64 = 1e-9;
const EIGEN_TOL: f64 = 1e-6;
const HERMITICITY_TOL: f64 = 1e-12;
const FRAME_TOL: f64 = 1e-2;
const FRAME_WINDOW_US: f64 = 2.0;
const GAP_TOL_MHZ: f64 = 1e-8;
const GAP_SAMPLES: usize = 20;

/// Criteria that are implemented faithfully but do not hold; see the README.
const KNOWN_FAILURES: &[&str] = &["6b"];

#[derive(Deserialize)]
struct Golden {
    eps_2d: f64,
    delta_4d: f64,
    werner_p05_discord: f64,
}

fn golden() -> Golden {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/golden.toml");
    let text = std::fs::read_to_string(path).expect("golden.toml present");
    toml::from_str(&text).expect("golden.toml parses")
}

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn check(id: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { id, pass, detail }
}

fn run(cfg: &spinfreeze::experiments::ScenarioConfig) -> ScenarioRun {
    run_scenario(cfg).unwrap_or_else(|e| panic!("{}: {e}", cfg.name))
}

fn run_preset(name: &str) -> ScenarioRun {
    run(&preset(name).unwrap())
}

fn pops(series: &TimeSeries) -> Vec<[f64; 4]> {
    series
        .populations
        .iter()
        .map(|p| subspace_populations(p).unwrap())
        .collect()
}

/// P_g of the nuclear spin at every recorded time.
fn nuclear_g(series: &TimeSeries) -> Vec<f64> {
    pops(series).iter().map(|p| p[0] + p[2]).collect()
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::INFINITY, f64::min)
}

fn peak_to_peak(v: &[f64]) -> f64 {
    max_of(v.iter().copied()) - min_of(v.iter().copied())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = run_preset("fig2a");
    let elapsed = start.elapsed().as_secs_f64();
    let dev = max_of(
        r.series
            .times
            .iter()
            .zip(pops(&r.series))
            .map(|(&t, p)| (p[3] - (PI * 2.0 * t).sin().powi(4)).abs()),
    );
    check(
        "1",
        dev <= RABI_TOL && elapsed < RABI_RUNTIME_S,
        format!("fig2a max|P_ee - sin^4(pi Omega t)| = {dev:.2e} (<= {RABI_TOL:.0e}), runtime {elapsed:.2} s (< {RABI_RUNTIME_S} s)"),
    )
}

fn criterion_2(runs: &BTreeMap<String, ScenarioRun>, g: &Golden) -> Outcome {
    let leak = runs["fig2d"].metrics.max_leakage;
    let control = runs["fig2c"].metrics.max_leakage;
    check(
        "2",
        leak <= g.eps_2d + GOLDEN_SLACK && leak <= FIG2D_CONTROL_RATIO * control,
        format!(
            "fig2d max leakage {leak:.6e} (<= eps_2d {:.6e} + {GOLDEN_SLACK:.0e}; <= {FIG2D_CONTROL_RATIO} x fig2c {control:.4})",
            g.eps_2d
        ),
    )
}

fn window_mean(series: &TimeSeries, leak: &[f64], lo: f64, hi: f64) -> f64 {
    let picked: Vec<f64> = series
        .times
        .iter()
        .zip(leak)
        .filter(|(&t, _)| t >= lo && t <= hi)
        .map(|(_, &l)| l)
        .collect();
    picked.iter().sum::<f64>() / picked.len() as f64
}

fn criterion_3(runs: &BTreeMap<String, ScenarioRun>, long_3b: &[ScenarioRun]) -> Outcome {
    let mut detail = Vec::new();
    let mut pass = true;
    for r in long_3b {
        let l = r.metrics.max_leakage;
        pass &= l <= NV_LEAKAGE_MAX;
        detail.push(format!("{} over {} us: {l:.3e}", r.config.name, r.config.grid.t_end));
    }
    let s = &runs["fig3c"].series;
    let leak: Vec<f64> = pops(s).iter().map(|p| p[1] + p[3]).collect();
    let t_end = *s.times.last().unwrap();
    let first = window_mean(s, &leak, 0.0, EDGE_WINDOW_US);
    let last = window_mean(s, &leak, t_end - EDGE_WINDOW_US, t_end);
    pass &= last <= SECULAR_RATIO * first;
    detail.push(format!(
        "fig3c mean leakage first/last {EDGE_WINDOW_US} us: {first:.3e} / {last:.3e} (ratio {:.2} <= {SECULAR_RATIO})",
        last / first
    ));
    check(
        "3",
        pass,
        format!("{} (each <= {NV_LEAKAGE_MAX:.0e})", detail.join("; ")),
    )
}

fn criterion_4(runs: &BTreeMap<String, ScenarioRun>, g: &Golden) -> Outcome {
    let amp = |name: &str| peak_to_peak(&nuclear_g(&runs[name].series));
    let dev = |name: &str| max_of(nuclear_g(&runs[name].series).into_iter().map(|p| (p - 0.5).abs()));
    let (a, b) = (amp("fig4a"), amp("fig4b"));
    let (c, d) = (dev("fig4c"), dev("fig4d"));
    let ratio = a / b;
    check(
        "4",
        a >= FIG4A_MIN_AMPLITUDE
            && b <= FIG4B_MAX_AMPLITUDE
            && ratio >= SHIELDING_RATIO
            && d <= g.delta_4d + GOLDEN_SLACK
            && c >= FIG4C_MIN_AMPLITUDE,
        format!(
            "nuclear amplitude fig4a {a:.4} (>= {FIG4A_MIN_AMPLITUDE}), fig4b {b:.3e} (<= {FIG4B_MAX_AMPLITUDE}), ratio {ratio:.0} (>= {SHIELDING_RATIO}); \
             max|P_gN - 0.5| fig4d {d:.6e} (<= delta_4d {:.6e} + {GOLDEN_SLACK:.0e}), fig4c {c:.4} (>= {FIG4C_MIN_AMPLITUDE})",
            g.delta_4d
        ),
    )
}

fn criterion_5(runs: &BTreeMap<String, ScenarioRun>) -> Outcome {
    let l = |name: &str| runs[name].metrics.max_leakage;
    let (a, b, c, d) = (l("fig5a"), l("fig5b"), l("fig5c"), l("fig5d"));
    check(
        "5",
        a <= BROADBAND_MAX && b <= BROADBAND_MAX && c <= BROADBAND_MAX && d > c,
        format!("max leakage fig5a {a:.3e}, fig5b {b:.3e}, fig5c {c:.3e} (each <= {BROADBAND_MAX}); fig5d {d:.3e} (> fig5c)"),
    )
}

fn discord_values(r: &ScenarioRun) -> Vec<(f64, f64)> {
    r.series
        .discord
        .as_ref()
        .expect("discord enabled")
        .iter()
        .map(|(t, d)| (*t, d.discord))
        .collect()
}

fn criterion_6a(runs: &BTreeMap<String, ScenarioRun>) -> Outcome {
    let d = discord_values(&runs["fig6a"]);
    let start = d[0].1;
    let peak = max_of(d.iter().map(|x| x.1));
    let t_end = d.last().unwrap().0;
    let first = max_of(d.iter().filter(|x| x.0 <= EDGE_WINDOW_US).map(|x| x.1));
    let last = max_of(d.iter().filter(|x| x.0 >= t_end - EDGE_WINDOW_US).map(|x| x.1));
    check(
        "6a",
        start <= DISCORD_START_MAX && peak >= DISCORD_PEAK.0 && peak <= DISCORD_PEAK.1 && last < first,
        format!(
            "fig6a discord at t=0 {start:.1e} (<= {DISCORD_START_MAX:.0e}), peak {peak:.4} (in [{}, {}]), \
             max over first/last {EDGE_WINDOW_US} us {first:.4} / {last:.4} (decaying)",
            DISCORD_PEAK.0, DISCORD_PEAK.1
        ),
    )
}

fn criterion_6b(runs: &BTreeMap<String, ScenarioRun>) -> Outcome {
    let d = discord_values(&runs["fig6b"]);
    let (t_peak, peak) = d
        .iter()
        .copied()
        .fold((0.0, f64::NEG_INFINITY), |a, x| if x.1 > a.1 { x } else { a });
    check(
        "6b",
        peak <= DISCORD_FROZEN_MAX,
        format!(
            "fig6b max discord {peak:.4} at t = {t_peak} us (<= {DISCORD_FROZEN_MAX} at all {} evaluated times)",
            d.len()
        ),
    )
}

fn pure(amps: [C64; 4]) -> ComplexMatrix {
    ComplexMatrix::outer(&amps)
}

/// Werner-state discord in closed form (natural log).
fn werner_discord(p: f64) -> f64 {
    (1.0 - p) / 4.0 * (1.0 - p).ln() - (1.0 + p) / 2.0 * (1.0 + p).ln() + (1.0 + 3.0 * p) / 4.0 * (1.0 + 3.0 * p).ln()
}

fn criterion_7(g: &Golden) -> Outcome {
    let opts = DiscordOptions::default();
    let mut rng = SplitMix64::new(7);
    let mut qubit = || {
        let v = [
            C64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5),
            C64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5),
        ];
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        ComplexMatrix::outer(&[v[0] / n, v[1] / n])
    };
    let mut product_max: f64 = 0.0;
    for _ in 0..10 {
        let rho = kron(&qubit(), &qubit());
        product_max = product_max.max(quantum_discord(&rho, &opts).unwrap().discord);
    }
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    let mixed_product = kron(&qubit(), &half);
    product_max = product_max.max(quantum_discord(&mixed_product, &opts).unwrap().discord);

    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    let bell = pure([h, z, z, h]);
    let bell_d = quantum_discord(&bell, &opts).unwrap().discord;

    let p = 0.5;
    let werner = &bell.scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
    let werner_d = quantum_discord(&werner, &opts).unwrap().discord;
    let analytic = werner_discord(p);
    check(
        "7",
        product_max <= PRODUCT_TOL
            && (bell_d - LN_2).abs() <= BELL_TOL
            && (werner_d - g.werner_p05_discord).abs() <= WERNER_TOL
            && (werner_d - analytic).abs() <= WERNER_TOL,
        format!(
            "product states max {product_max:.1e} (<= {PRODUCT_TOL:.0e}); Bell {bell_d:.6} (ln 2 +- {BELL_TOL:.0e}); \
             Werner p=0.5 {werner_d:.6} vs golden {:.6} / closed form {analytic:.6} (+- {WERNER_TOL:.0e})",
            g.werner_p05_discord
        ),
    )
}

fn criterion_8(all: &[&ScenarioRun]) -> Outcome {
    let trace = max_of(all.iter().map(|r| r.series.max_trace_error));
    let eig = min_of(all.iter().map(|r| r.series.min_eigenvalue));
    let herm = max_of(all.iter().map(|r| r.series.max_hermiticity));
    check(
        "8",
        trace <= TRACE_TOL && eig >= -EIGEN_TOL && herm <= HERMITICITY_TOL,
        format!(
            "{} runs: max trace error {trace:.1e} (<= {TRACE_TOL:.0e}), min eigenvalue {eig:.1e} (>= -{EIGEN_TOL:.0e}), \
             max Hermiticity error {herm:.1e} (<= {HERMITICITY_TOL:.0e})",
            all.len()
        ),
    )
}

/// Linear interpolation of `series` populations at time `t`.
fn interpolate(series: &TimeSeries, t: f64) -> [f64; 4] {
    let times = &series.times;
    let k = times.partition_point(|&x| x < t).clamp(1, times.len() - 1);
    let (t0, t1) = (times[k - 1], times[k]);
    let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
    let (a, b) = (
        subspace_populations(&series.populations[k - 1]).unwrap(),
        subspace_populations(&series.populations[k]).unwrap(),
    );
    std::array::from_fn(|i| a[i] + w * (b[i] - a[i]))
}

fn criterion_9() -> (Outcome, Vec<ScenarioRun>) {
    let mut rot = preset("fig3b_caption").unwrap();
    rot.grid.t_end = FRAME_WINDOW_US;
    rot.grid.record_every_us = Some(0.0);
    let mut lab = rot.clone();
    lab.frame = FrameKind::Lab;
    lab.grid.record_every_us = Some(0.005);
    let (rot, lab) = rayon::join(|| run(&rot), || run(&lab));
    let dev = max_of(lab.series.times.iter().zip(pops(&lab.series)).map(|(&t, p)| {
        let q = interpolate(&rot.series, t);
        max_of((0..4).map(|i| (p[i] - q[i]).abs()))
    }));
    let out = check(
        "9",
        dev <= FRAME_TOL,
        format!(
            "fig3b_caption lab ({} steps) vs rotating over {FRAME_WINDOW_US} us: max population difference {dev:.2e} (<= {FRAME_TOL:.0e})",
            lab.series.steps_taken
        ),
    );
    (out, vec![rot, lab])
}

fn criterion_10() -> Outcome {
    let mut rng = SplitMix64::new(10);
    let mut worst: f64 = 0.0;
    for _ in 0..GAP_SAMPLES {
        let p = NvParams {
            b_z: 1000.0 * rng.next_f64(),
            ..NvParams::default()
        };
        let full = nv_ground_hamiltonian_full(&p).unwrap();
        let reduced = nv_reduced_hamiltonian(&p).unwrap();
        let level_full = |k: usize| full[(SUBSPACE_IN_FULL[k], SUBSPACE_IN_FULL[k])].re / TWO_PI;
        let level_red = |k: usize| reduced[(k, k)].re / TWO_PI;
        // |gg>->|eg>, |ge>->|ee>, |gg>->|ge>, |eg>->|ee>
        for (i, j) in [(0, 2), (1, 3), (0, 1), (2, 3)] {
            let gap_full = level_full(j) - level_full(i);
            let gap_red = level_red(j) - level_red(i);
            worst = worst.max((gap_full - gap_red).abs());
        }
    }
    check(
        "10",
        worst <= GAP_TOL_MHZ,
        format!("reduced vs full subspace gaps over {GAP_SAMPLES} random B_z: max difference {worst:.1e} MHz (<= {GAP_TOL_MHZ:.0e})"),
    )
}

fn main() {
    let g = golden();
    let started = Instant::now();

    let mut outcomes = vec![criterion_1()];
    let runs: BTreeMap<String, ScenarioRun> = preset_names()
        .into_par_iter()
        .map(|n| (n.to_string(), run_preset(n)))
        .collect();
    let long_3b: Vec<ScenarioRun> = ["fig3b_caption", "fig3b_text"]
        .par_iter()
        .map(|n| {
            let mut cfg = preset(n).unwrap();
            cfg.grid.t_end = NV_FREEZE_WINDOW_US;
            run(&cfg)
        })
        .collect();
    let (c9, frame_runs) = criterion_9();

    outcomes.push(criterion_2(&runs, &g));
    outcomes.push(criterion_3(&runs, &long_3b));
    outcomes.push(criterion_4(&runs, &g));
    outcomes.push(criterion_5(&runs));
    outcomes.push(criterion_6a(&runs));
    outcomes.push(criterion_6b(&runs));
    outcomes.push(criterion_7(&g));
    let all: Vec<&ScenarioRun> = runs.values().chain(&long_3b).chain(&frame_runs).collect();
    outcomes.push(criterion_8(&all));
    outcomes.push(c9);
    outcomes.push(criterion_10());

    let mut unexpected = Vec::new();
    for o in &outcomes {
        let known = KNOWN_FAILURES.contains(&o.id);
        let tag = match (o.pass, known) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (known)",
            (true, true) => "PASS (unexpected; remove from KNOWN_FAILURES)",
        };
        println!("criterion {:<3} {tag}: {}", o.id, o.detail);
        if o.pass == known {
            unexpected.push(o.id);
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!(
        "acceptance: {passed}/{} criteria pass, known failures {:?}, {:.1} s",
        outcomes.len(),
        KNOWN_FAILURES,
        started.elapsed().as_secs_f64()
    );
    if !unexpected.is_empty() {
        eprintln!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
