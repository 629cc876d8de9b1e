use num_complex::Complex64 as C64;
use proptest::prelude::*;

use spinfreeze::discord::{quantum_discord, DiscordOptions};
use spinfreeze::linalg::{kron, matrix_exp, partial_trace, vn_entropy, ComplexMatrix, LogBase, Subsystem};

fn opts() -> DiscordOptions {
    DiscordOptions::default()
}

fn discord(rho: &ComplexMatrix, o: &DiscordOptions) -> f64 {
    quantum_discord(rho, o).unwrap().discord
}

/// Werner-state discord in closed form (natural log).
fn werner_closed_form(p: f64) -> f64 {
    let term = |c: f64, x: f64| if x > 0.0 { c * x.ln() } else { 0.0 };
    term((1.0 - p) / 4.0, 1.0 - p) - term((1.0 + p) / 2.0, 1.0 + p) + term((1.0 + 3.0 * p) / 4.0, 1.0 + 3.0 * p)
}

fn werner(p: f64) -> ComplexMatrix {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    let bell = ComplexMatrix::outer(&[h, z, z, h]);
    &bell.scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0)
}

#[test]
fn werner_family_matches_closed_form() {
    for p in [0.0, 0.1, 0.3, 0.5, 0.8, 1.0] {
        let d = discord(&werner(p), &opts());
        assert!((d - werner_closed_form(p)).abs() < 1e-6, "p = {p}: {d}");
    }
}

#[test]
fn base_two_rescales_by_ln2() {
    let rho = werner(0.6);
    let nats = discord(&rho, &opts());
    let bits = discord(
        &rho,
        &DiscordOptions {
            log_base: LogBase::Two,
            ..opts()
        },
    );
    assert!((bits * std::f64::consts::LN_2 - nats).abs() < 1e-9);
}

#[test]
fn classically_correlated_state_has_no_discord() {
    let rho = ComplexMatrix::from_diag(&[0.5, 0.0, 0.0, 0.5]);
    let r = quantum_discord(&rho, &opts()).unwrap();
    assert!(r.discord <= 1e-6);
    assert!((r.mutual_info - std::f64::consts::LN_2).abs() < 1e-9);
}

fn hermitian(e: &[f64], n: usize) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(n);
    let mut k = 0;
    for i in 0..n {
        h[(i, i)] = C64::new(e[k], 0.0);
        k += 1;
        for j in i + 1..n {
            h[(i, j)] = C64::new(e[k], e[k + 1]);
            h[(j, i)] = h[(i, j)].conj();
            k += 2;
        }
    }
    h
}

/// Random full-rank-ish state G G† / tr from a complex Ginibre matrix.
fn state(e: &[f64]) -> ComplexMatrix {
    let g = ComplexMatrix::from_vec(4, e.chunks(2).map(|c| C64::new(c[0], c[1])).collect()).unwrap();
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    let mut rho = m.scale_real(1.0 / tr);
    rho.symmetrize();
    rho
}

fn unitary(e: &[f64]) -> ComplexMatrix {
    matrix_exp(&hermitian(e, 2), C64::new(0.0, -1.0))
}

fn swap(rho: &ComplexMatrix) -> ComplexMatrix {
    let perm = [0, 2, 1, 3];
    let mut out = ComplexMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            out[(perm[i], perm[j])] = rho[(i, j)];
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bounded_by_measured_entropy(e in prop::collection::vec(-1.0f64..1.0, 32)) {
        let rho = state(&e);
        let r = quantum_discord(&rho, &opts()).unwrap();
        let s_a = vn_entropy(&partial_trace(&rho, Subsystem::First).unwrap(), LogBase::Natural).unwrap();
        prop_assert!(r.discord >= 0.0);
        prop_assert!(r.discord <= s_a + 1e-6, "{} > S_A {}", r.discord, s_a);
        prop_assert!(r.classical_corr <= r.mutual_info + 1e-9);
    }

    #[test]
    fn grid_refinement_converges(e in prop::collection::vec(-1.0f64..1.0, 32)) {
        let rho = state(&e);
        let coarse = discord(&rho, &DiscordOptions { n_theta: 16, n_phi: 32, refine: false, ..opts() });
        let refined = discord(&rho, &opts());
        let fine = discord(&rho, &DiscordOptions { n_theta: 256, n_phi: 512, refine: false, ..opts() });
        // grids overestimate discord; refinement must beat both and stay close
        prop_assert!(refined <= coarse + 1e-12);
        prop_assert!(refined <= fine + 1e-12, "{refined} vs {fine}");
        prop_assert!(fine - refined < 1e-4, "{refined} vs {fine}");
        prop_assert!(fine <= coarse + 1e-12);
    }

    #[test]
    fn invariant_under_local_unitaries(
        e in prop::collection::vec(-1.0f64..1.0, 32),
        ua in prop::collection::vec(-3.0f64..3.0, 4),
        ub in prop::collection::vec(-3.0f64..3.0, 4),
    ) {
        let rho = state(&e);
        let u = kron(&unitary(&ua), &unitary(&ub));
        let rotated = u.matmul(&rho).matmul(&u.adjoint());
        let (d0, d1) = (discord(&rho, &opts()), discord(&rotated, &opts()));
        prop_assert!((d0 - d1).abs() < 1e-5, "{d0} vs {d1}");
    }

    #[test]
    fn measured_side_follows_the_swap(e in prop::collection::vec(-1.0f64..1.0, 32)) {
        let rho = state(&e);
        let a = discord(&rho, &opts());
        let b = discord(&swap(&rho), &DiscordOptions { measured: Subsystem::Second, ..opts() });
        prop_assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn product_states_have_no_discord(
        a in prop::collection::vec(-1.0f64..1.0, 4),
        b in prop::collection::vec(-1.0f64..1.0, 4),
        mix in 0.0f64..1.0,
    ) {
        let qubit = |v: &[f64]| {
            let psi = [C64::new(v[0], v[1]), C64::new(v[2], v[3] + 1e-3)];
            let n = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
            ComplexMatrix::outer(&[psi[0] / n, psi[1] / n])
        };
        let rho_b = &qubit(&b).scale_real(mix) + &ComplexMatrix::identity(2).scale_real(0.5 * (1.0 - mix));
        let rho = kron(&qubit(&a), &rho_b);
        prop_assert!(discord(&rho, &opts()) <= 1e-6);
    }
}
