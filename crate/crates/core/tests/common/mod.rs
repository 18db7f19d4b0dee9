//! Structural invariants shared by the property-test target and the
//! acceptance run. Every check is an independent oracle: nothing here calls
//! the closed forms it is meant to confirm.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use tact_core::dynamics::{build_hamiltonian, expectation, HamiltonianKind, HamiltonianSpec, Propagator};
use tact_core::phase_space::cg_coefficient;
use tact_core::spin::{build_spin_matrices, coherent_state, rotation_operator, BlochDirection, ParticleNumber};

pub const KINDS: [HamiltonianKind; 4] = [
    HamiltonianKind::TactOriginal,
    HamiltonianKind::TactRotated,
    HamiltonianKind::TactEquivalent,
    HamiltonianKind::Oat,
];

pub fn pn(n: usize) -> ParticleNumber {
    ParticleNumber::new(n).unwrap()
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Seeded runner so every invocation draws the same cases.
pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

/// `U(t)^dagger U(t) = 1` with `U(t)` assembled column by column from evolved
/// Fock states.
pub fn unitarity(n: usize, kind: usize, t: f64) -> Result<(), TestCaseError> {
    let np = pn(n);
    let s = build_spin_matrices(np);
    let p = Propagator::from_spec(&HamiltonianSpec::unit(KINDS[kind], np), &s).unwrap();
    let mut u = DMatrix::<Complex64>::zeros(n + 1, n + 1);
    for k in 0..=n {
        let e = tact_core::spin::fock_state(k, np).unwrap();
        u.set_column(k, p.evolve(&e, t).unwrap().amplitudes());
    }
    let err = max_abs(&(u.adjoint() * &u - DMatrix::identity(n + 1, n + 1)));
    ensure(err < 1e-10, || format!("N={n} kind={kind} t={t}: |U'U-1| = {err:e}"))
}

/// `<H>` along the evolution, relative to the spectral radius.
pub fn energy_conservation(n: usize, kind: usize, theta: f64, phi: f64, t: f64) -> Result<(), TestCaseError> {
    let np = pn(n);
    let s = build_spin_matrices(np);
    let spec = HamiltonianSpec::unit(KINDS[kind], np);
    let h = build_hamiltonian(&spec, &s).unwrap();
    let p = Propagator::from_spec(&spec, &s).unwrap();
    let psi0 = coherent_state(theta, phi, np).unwrap();
    let e0 = expectation(&h, &psi0);
    let e1 = expectation(&h, &p.evolve(&psi0, t).unwrap());
    let scale = p.eigenvalues().iter().map(|e| e.abs()).fold(1.0, f64::max);
    let rel = (e1 - e0).abs() / scale;
    ensure(rel < 1e-9, || format!("N={n} kind={kind}: energy drift {rel:e}"))
}

/// Cyclic commutators and the Casimir `S^2 = S(S+1)`.
pub fn commutators(n: usize) -> Result<(), TestCaseError> {
    let s = build_spin_matrices(pn(n));
    let i = Complex64::new(0.0, 1.0);
    let comm = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| a * b - b * a;
    let errs = [
        max_abs(&(comm(s.sx(), s.sy()) - s.sz() * i)),
        max_abs(&(comm(s.sy(), s.sz()) - s.sx() * i)),
        max_abs(&(comm(s.sz(), s.sx()) - s.sy() * i)),
    ];
    let spin = n as f64 / 2.0;
    let casimir = s.sx() * s.sx() + s.sy() * s.sy() + s.sz() * s.sz()
        - DMatrix::identity(n + 1, n + 1) * Complex64::from(spin * (spin + 1.0));
    let worst = errs.iter().copied().fold(max_abs(&casimir), f64::max);
    ensure(worst < 1e-10, || format!("N={n}: commutator/Casimir defect {worst:e}"))
}

/// The three counter-twisting forms are related by fixed rotations.
pub fn tact_equivalence(n: usize) -> Result<(), TestCaseError> {
    let np = pn(n);
    let s = build_spin_matrices(np);
    let h = |k| build_hamiltonian(&HamiltonianSpec::unit(k, np), &s).unwrap();
    let orig = h(HamiltonianKind::TactOriginal);
    let rot = h(HamiltonianKind::TactRotated);
    let eq = h(HamiltonianKind::TactEquivalent);
    let ry = rotation_operator(&s, &BlochDirection::Y, PI / 2.0);
    let a = max_abs(&(&ry * &orig * ry.adjoint() - &rot));
    let u = &ry * rotation_operator(&s, &BlochDirection::X, -PI / 4.0);
    let b = max_abs(&(&u * &rot * u.adjoint() - &eq));
    ensure(a.max(b) < 1e-10, || format!("N={n}: conjugation defects {a:e}, {b:e}"))
}

/// `sum_{m1 m2} <j1 m1 j2 m2|J M><j1 m1 j2 m2|J' M> = delta_{J J'}` over the
/// allowed `J, J'` for a given `M`.
pub fn cg_orthogonality(tj1: i64, tj2: i64, tm: i64) -> Result<(), TestCaseError> {
    let (j1, j2) = (tj1 as f64 / 2.0, tj2 as f64 / 2.0);
    let lo = (tj1 - tj2).abs();
    let js: Vec<i64> = (lo..=tj1 + tj2).step_by(2).filter(|&tj| tm.abs() <= tj).collect();
    if js.is_empty() || (tj1 + tj2 + tm) % 2 != 0 {
        return Ok(());
    }
    let m = tm as f64 / 2.0;
    let mut worst: f64 = 0.0;
    for &a in &js {
        for &b in &js {
            let mut sum = 0.0;
            for tm1 in (-tj1..=tj1).step_by(2) {
                let m1 = tm1 as f64 / 2.0;
                let m2 = m - m1;
                if m2.abs() > j2 + 1e-9 {
                    continue;
                }
                sum += cg_coefficient(j1, m1, j2, m2, a as f64 / 2.0, m)
                    * cg_coefficient(j1, m1, j2, m2, b as f64 / 2.0, m);
            }
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((sum - want).abs());
        }
    }
    ensure(worst < 1e-10, || format!("j1={j1} j2={j2} M={m}: orthogonality defect {worst:e}"))
}

fn fmt<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| format!("{e}"))
}

fn kind_strategy() -> impl Strategy<Value = usize> {
    0..KINDS.len()
}

/// Runs each family of structural checks; returns `(name, outcome)`.
pub fn structural_suite(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        (
            "unitarity",
            fmt(runner(cases).run(&(1usize..40, kind_strategy(), 0.0f64..3.0), |(n, k, t)| {
                unitarity(n, k, t)
            })),
        ),
        (
            "energy conservation",
            fmt(runner(cases).run(
                &(1usize..60, kind_strategy(), 0.0f64..PI, -PI..PI, 0.0f64..5.0),
                |(n, k, th, ph, t)| energy_conservation(n, k, th, ph, t),
            )),
        ),
        (
            "commutators and Casimir",
            fmt(runner(cases).run(&(1usize..60), commutators)),
        ),
        (
            "TACT unitary equivalence",
            fmt(runner(cases).run(&(1usize..50), tact_equivalence)),
        ),
        (
            "CG orthogonality",
            fmt(runner(cases).run(&(0i64..12, 0i64..12, -12i64..=12), |(a, b, m)| {
                cg_orthogonality(a, b, m)
            })),
        ),
    ]
}
