//! Acceptance gate: one test per criterion, each printing a pass/fail line
//! with the measured worst residual and runtime (visible with
//! `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use ellrop::belavin::{
    ab_matrices, belavin_property_residuals, rk_matrix, shift_one_reference, ybe_matrix_residual,
};
use ellrop::functions::{ExpBivariate, ExpTrivariate, Parity};
use ellrop::intertwiners::{
    exchange_residual, outgoing_coeffs, vertex_irf_residual, weyl_kac_det_residual, BasisKind,
};
use ellrop::irf::{star_triangle_residual, WeightSequence};
use ellrop::l_operators::{
    belavin_rll_residual, belavin_vertex_irf_residual, rll_pointwise_residual,
};
use ellrop::linalg;
use ellrop::r_operator::{
    subspace_mapping_residual, subspace_mapping_residual_with_target, ybe_pointwise_residual,
    MappingTarget, EPS_DIAG,
};
use ellrop::sampling::Draws;
use ellrop::theta::{
    dedekind_eta, theta1, theta1_deriv0, theta_char, three_term_residual, ModularParams,
    ThetaCharacteristics,
};
use num_complex::Complex64;

type C = Complex64;

fn params() -> ModularParams {
    ModularParams::new(C::new(0.2, 1.0), C::new(0.41421356237309515, 0.0)).unwrap()
}

struct Criterion {
    name: &'static str,
    started: Instant,
    budget_s: f64,
    worst: f64,
    tol: f64,
}

impl Criterion {
    fn new(name: &'static str, budget_s: f64, tol: f64) -> Self {
        Self { name, started: Instant::now(), budget_s, worst: 0.0, tol }
    }

    fn record(&mut self, residual: f64) {
        self.worst = self.worst.max(residual);
    }

    fn finish(self) {
        let elapsed = self.started.elapsed().as_secs_f64();
        let pass = self.worst < self.tol && elapsed < self.budget_s;
        println!(
            "acceptance {}: {} (max residual {:.3e} < {:.0e}, runtime {:.2}s < {:.0}s)",
            self.name,
            if pass { "PASS" } else { "FAIL" },
            self.worst,
            self.tol,
            elapsed,
            self.budget_s,
        );
        assert!(
            self.worst < self.tol,
            "{}: residual {:.3e} exceeds {:.0e}",
            self.name,
            self.worst,
            self.tol
        );
        assert!(
            elapsed < self.budget_s,
            "{}: runtime {elapsed:.2}s exceeds {}s",
            self.name,
            self.budget_s
        );
    }
}

#[test]
fn criterion_01_theta_substrate() {
    let p = params();
    let tau = p.tau;
    let mut c = Criterion::new("1 theta-substrate", 1.0, 1e-10);
    let mut d = Draws::new(42);
    let i = C::i();
    for _ in 0..100 {
        let z = d.complex_box((-0.5, 0.5), (-0.3 * tau.im, 0.3 * tau.im));
        let v = theta1(z, tau).unwrap();
        let scale = v.norm().max(1.0);
        c.record((theta1(z + 1.0, tau).unwrap() + v).norm() / scale);
        let mult = -((-i * 2.0 * std::f64::consts::PI * z - i * std::f64::consts::PI * tau).exp());
        let vt = theta1(z + tau, tau).unwrap();
        c.record((vt - mult * v).norm() / vt.norm().max((mult * v).norm()).max(1.0));
        c.record((theta1(-z, tau).unwrap() + v).norm() / scale);
        c.record((theta_char(ThetaCharacteristics::half_half(), z, tau).unwrap() - v).norm() / scale);
        let q: Vec<C> = (0..4)
            .map(|_| d.complex_box((-0.5, 0.5), (-0.2 * tau.im, 0.2 * tau.im)))
            .collect();
        c.record(three_term_residual(q[0], q[1], q[2], q[3], tau).unwrap());
    }
    for m in -2i32..=2 {
        for n in -1i32..=1 {
            let z = C::new(m as f64, 0.0) + C::new(n as f64, 0.0) * tau;
            c.record(theta1(z, tau).unwrap().norm());
        }
    }
    // theta1'(0) = -2 pi eta^3 in the series convention used throughout
    // (the classical identity holds for the negated series).
    let d0 = theta1_deriv0(tau).unwrap();
    let eta = dedekind_eta(tau).unwrap();
    c.record((d0 + 2.0 * std::f64::consts::PI * eta * eta * eta).norm() / d0.norm());
    c.finish();
}

#[test]
fn criterion_02_pointwise_yang_baxter() {
    let p = params();
    let mut c = Criterion::new("2 pointwise-YBE", 5.0, 1e-9);
    let mut d = Draws::new(42);
    let fams = [(1, 2, 3), (0, 1, 2), (2, 1, 0), (1, 0, 2), (2, 2, 1)];
    for parity in [Parity::Plus, Parity::Minus] {
        for _ in 0..10 {
            let xi1 = d.generic_xi(&p);
            let xi2 = d.generic_xi(&p);
            let xi3 = d.generic_xi(&p);
            let points: Vec<(C, C, C)> = (0..10)
                .map(|_| {
                    let v = d.generic_points(&p, 3, 10.0 * EPS_DIAG);
                    (v[0], v[1], v[2])
                })
                .collect();
            for (a, b, cc) in fams {
                let f = ExpTrivariate { a, b, c: cc, parity };
                c.record(ybe_pointwise_residual(&p, xi1, xi2, xi3, &f, &points).unwrap());
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_03_subspace_mapping() {
    let p = params();
    let mut c = Criterion::new("3 subspace-mapping", 10.0, 1e-8);
    let mut d = Draws::new(42);
    for n in 1..=4usize {
        for parity in [Parity::Plus, Parity::Minus] {
            let xi1 = d.generic_xi(&p);
            let xi2 = d.generic_xi(&p);
            c.record(subspace_mapping_residual(&p, n, xi1, xi2, parity).unwrap());
        }
    }
    c.finish();
}

#[test]
fn criterion_04_star_triangle() {
    let p = params();
    let mut c = Criterion::new("4 star-triangle", 5.0, 1e-9);
    let lam = WeightSequence::default_window(0, 3, &p).unwrap();
    let mut d = Draws::new(42);
    for _ in 0..5 {
        let x1 = d.generic_xi(&p);
        let x2 = d.generic_xi(&p);
        let x3 = d.generic_xi(&p);
        for i in 0..4 {
            for j in 0..4 {
                for l in 0..4 {
                    for alpha in 0..3 {
                        for beta in 0..3 {
                            c.record(
                                star_triangle_residual(&lam, i, j, l, alpha, beta, x1, x2, x3, &p)
                                    .unwrap(),
                            );
                        }
                    }
                }
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_05_vertex_irf() {
    let p = params();
    let mut c = Criterion::new("5 vertex-IRF", 5.0, 1e-9);
    let lam = WeightSequence::default_window(0, 3, &p).unwrap();
    let mut d = Draws::new(42);
    let fams = [(1, 2), (0, 1), (2, 0), (2, 2), (1, 0)];
    for parity in [Parity::Plus, Parity::Minus] {
        for _ in 0..5 {
            let xi = d.generic_xi(&p);
            for (a, b) in fams {
                let f = ExpBivariate { a, b, parity };
                for i in 0..4 {
                    for j in 0..4 {
                        c.record(vertex_irf_residual(&lam, i, j, xi, &f, &p).unwrap());
                    }
                }
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_06_duality_weyl_kac() {
    let p = params();
    let mut c = Criterion::new("6 duality+Weyl-Kac", 2.0, 1e-9);
    let mut d = Draws::new(42);
    for k in 1..=4i32 {
        let lam = WeightSequence::default_window(0, k - 1, &p).unwrap();
        for _ in 0..3 {
            let xi = d.generic_xi(&p);
            for kind in [BasisKind::Plus, BasisKind::Minus] {
                c.record(outgoing_coeffs(xi, &lam, kind, &p).unwrap().duality_residual);
            }
            c.record(weyl_kac_det_residual(xi, &lam, &p).unwrap());
        }
    }
    c.finish();
}

#[test]
fn criterion_07_exchange_and_rll() {
    let p = params();
    let mut c = Criterion::new("7 exchange+RLL", 20.0, 1e-8);
    let mut d = Draws::new(42);
    for k in 1..=3i32 {
        let lam = WeightSequence::default_window(0, k - 1, &p).unwrap();
        for _ in 0..3 {
            let xi1 = d.generic_xi(&p);
            let xi2 = d.generic_xi(&p);
            let pts = d.generic_points(&p, 2, 10.0 * EPS_DIAG);
            let f = ExpBivariate { a: 1, b: 2, parity: Parity::Plus };
            for i in 0..k {
                for j in 0..k {
                    c.record(
                        exchange_residual(xi1, xi2, &lam, i, j, pts[0], pts[1], BasisKind::Plus, &p)
                            .unwrap(),
                    );
                    c.record(
                        rll_pointwise_residual(
                            xi1,
                            xi2,
                            &lam,
                            i,
                            j,
                            &f,
                            &[(pts[0], pts[1])],
                            BasisKind::Plus,
                            &p,
                        )
                        .unwrap(),
                    );
                }
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_08_belavin_tower() {
    let p = params();
    let mut c = Criterion::new("8 belavin-tower", 60.0, 1e-8);
    let mut d = Draws::new(42);
    // unitality at the stricter 1e-10
    let d0 = theta1_deriv0(p.tau).unwrap();
    for k in 1..=4usize {
        let r0 = rk_matrix(k, C::new(0.0, 0.0), &p).unwrap();
        let expect = linalg::identity(k * k).mapv(|v| v * d0);
        let mut diff = 0.0f64;
        for (u, v) in r0.entries.iter().zip(expect.iter()) {
            diff = diff.max((u - v).norm());
        }
        let unit_res = diff / d0.norm();
        assert!(unit_res < 1e-10, "R_{k}(0) unitality residual {unit_res:.3e}");
        c.record(unit_res);
    }
    // properties (2)-(4) and the matrix YBE
    for k in 1..=4usize {
        let xi = d.generic_xi(&p);
        let rep = belavin_property_residuals(k, xi, &p).unwrap();
        c.record(rep.symmetry_a);
        c.record(rep.symmetry_b);
        c.record(rep.shift_one);
        c.record(rep.shift_tau);
        let x1 = d.generic_xi(&p);
        let x2 = d.generic_xi(&p);
        let x3 = d.generic_xi(&p);
        c.record(ybe_matrix_residual(k, x1, x2, x3, &p).unwrap());
    }
    // Thm 4.3 / Thm 4.4 at k in {2, 3}
    for k in 2..=3i32 {
        let lam = WeightSequence::default_window(0, k - 1, &p).unwrap();
        let xi1 = d.generic_xi(&p);
        let xi2 = d.generic_xi(&p);
        for i in 0..k {
            for j in 0..k {
                c.record(belavin_vertex_irf_residual(xi1, xi2, &lam, i, j, &p).unwrap());
            }
        }
        for (i, j) in [(0, k - 1), (0, 0), (k - 1, 0)] {
            c.record(belavin_rll_residual(xi1, xi2, &lam, i, j, &p).unwrap());
        }
    }
    c.finish();
}

#[test]
fn criterion_09_negative_controls() {
    let p = params();
    let started = Instant::now();
    let mut d = Draws::new(42);
    let xi1 = d.generic_xi(&p);
    let xi2 = d.generic_xi(&p);
    let unswapped = subspace_mapping_residual_with_target(
        &p,
        2,
        xi1,
        xi2,
        Parity::Plus,
        MappingTarget::Unswapped,
    )
    .unwrap();

    let k = 2usize;
    let xi = d.generic_xi(&p);
    let r = rk_matrix(k, xi, &p).unwrap().entries;
    let r1 = rk_matrix(k, xi + 1.0, &p).unwrap().entries;
    let (a, _) = ab_matrices(k);
    let id = linalg::identity(k);
    // the correct reference negated = the (-1) factor dropped
    let wrong = shift_one_reference(&r, &a, &id).mapv(|v| -v);
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for (u, v) in r1.iter().zip(wrong.iter()) {
        diff = diff.max((u - v).norm());
        scale = scale.max(u.norm()).max(v.norm());
    }
    let sign_dropped = diff / scale;

    let pass = unswapped > 1e-2 && sign_dropped > 1e-2;
    println!(
        "acceptance 9 negative-controls: {} (unswapped {unswapped:.3e} > 1e-2, sign-dropped {sign_dropped:.3e} > 1e-2, runtime {:.2}s)",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64(),
    );
    assert!(unswapped > 1e-2, "unswapped-target control too small: {unswapped:.3e}");
    assert!(sign_dropped > 1e-2, "sign-dropped control too small: {sign_dropped:.3e}");
}

#[test]
fn criterion_10_determinism() {
    let started = Instant::now();
    let bin = env!("CARGO_BIN_EXE_verify");
    let run = || {
        let out = std::process::Command::new(bin)
            .args(["all", "--seed", "42"])
            .output()
            .expect("verify binary runs");
        assert!(out.status.success(), "verify all must pass");
        String::from_utf8(out.stdout).expect("utf8 report")
    };
    let strip = |s: &str| -> String {
        s.lines()
            .filter(|l| !l.contains("wall_time_ms"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let a = run();
    let b = run();
    let pass = strip(&a) == strip(&b);
    println!(
        "acceptance 10 determinism: {} (byte-identical reports apart from timing, runtime {:.2}s)",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64(),
    );
    assert!(pass, "reports differ beyond the timing field");
}
