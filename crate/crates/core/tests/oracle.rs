use std::f64::consts::PI;

use ibc_core::dirichlet_box::{box_spectrum, BoxSpec};
use ibc_core::graph::{build_graph, graph_spectrum, VacuumVariant};
use ibc_core::multi_source::{scattering_state_multi, Source};
use ibc_core::numerics::{integrate_with, Domain, QuadOptions};
use ibc_core::oracle::*;
use ibc_core::single_source::{green_line, propagator, reflection_amplitude};
use ibc_core::{Complex64, Coupling};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn one() -> Coupling {
    Coupling::real(1.0).unwrap()
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn decoupled_lattice_has_free_spectrum() {
    let free = LatticeModel::new(-1.0, 1.0, 0.1, &[], VacuumVariant::Shared).unwrap();
    let levels = lattice_spectrum(&free, 6).unwrap();
    // The idle vacuum contributes E = 0.
    assert!(levels[0].abs() < 1e-12);
    let n = free.points as f64;
    for (j, e) in levels[1..].iter().enumerate() {
        let exact = (2.0 * ((j + 1) as f64 * PI / (2.0 * (n + 1.0))).sin() / free.h).powi(2);
        assert!((e - exact).abs() < 1e-11 * exact, "{e} vs {exact}");
    }
}

#[test]
fn line_ground_state_extrapolates_to_analytic() {
    let ex = lattice_spectrum_extrapolated(|h| LatticeModel::line(&one(), 20.0, h), 4e-3, 1).unwrap();
    assert!((ex[0].value + 2f64.powf(-2.0 / 3.0)).abs() < 1e-3);
    assert!(ex[0].order >= 1.0, "order {}", ex[0].order);
}

#[test]
fn box_levels_agree_with_secular_equation() {
    let spec = BoxSpec::centred(1.0, Coupling::real(20.0).unwrap()).unwrap();
    let exact = box_spectrum(&spec, 400.0).unwrap();
    let mut expected = vec![exact.ground_energy];
    expected.extend(exact.positive_levels.iter().take(5));
    let ex = lattice_spectrum_extrapolated(|h| LatticeModel::dirichlet_box(&spec, h), 2e-3, 6).unwrap();
    for (a, b) in ex.iter().zip(&expected) {
        assert!((a.value - b).abs() < 1e-3 * b.abs().max(1.0), "{} vs {b}", a.value);
    }
}

#[test]
fn lattice_hamiltonian_is_self_adjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sources = [Source::new(-0.5, Complex64::new(1.0, 0.7)), Source::new(0.4, Complex64::new(-0.3, 2.0))];
    for variant in [VacuumVariant::Shared, VacuumVariant::Trapped] {
        let m = LatticeModel::new(-2.0, 2.0, 0.05, &sources, variant).unwrap();
        let mut random = || DiscreteState {
            phi0: (0..m.vacua).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
            phi1: (0..m.points).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        };
        for _ in 0..100 {
            let (u, v) = (random(), random());
            let lhs = m.inner(&m.apply(&u), &v);
            let rhs = m.inner(&u, &m.apply(&v));
            assert!((lhs - rhs).norm() < 1e-13 * lhs.norm().max(1.0));
        }
    }
}

#[test]
fn lattice_ground_state_weights() {
    let m = LatticeModel::line(&one(), 20.0, 1e-3).unwrap();
    let e = lattice_spectrum(&m, 1).unwrap()[0];
    let s = lattice_eigenstate(&m, e).unwrap();
    assert!((s.norm_sq(m.h) - 1.0).abs() < 1e-12);
    assert!((s.phi0[0].norm_sqr() - 2.0 / 3.0).abs() < 1e-3);
    let r = m.apply(&s);
    let resid: f64 = r.phi0.iter().zip(&s.phi0).map(|(a, b)| (a - e * b).norm()).fold(0.0, f64::max);
    assert!(resid < 1e-8);
}

#[test]
fn crank_nicolson_keeps_stationary_state() {
    let m = LatticeModel::line(&one(), 20.0, 0.01).unwrap();
    let e = lattice_spectrum(&m, 1).unwrap()[0];
    let s = lattice_eigenstate(&m, e).unwrap();
    let out = crank_nicolson_evolve(&m, &s, 1.0, 1e-3).unwrap();
    let expected = s.phi0[0] * Complex64::from_polar(1.0, -e);
    assert!((out.phi0[0] - expected).norm() < 1e-6);
    assert!((out.phi0[0].norm() - s.phi0[0].norm()).abs() < 1e-9);
}

#[test]
fn crank_nicolson_conserves_probability() {
    let m = LatticeModel::new(-10.0, 10.0, 0.05, &[Source::new(0.0, Complex64::new(0.6, 0.8))], VacuumVariant::Shared).unwrap();
    let init = DiscreteState { phi0: vec![re(1.0)], phi1: vec![ZERO; m.points] };
    let out = crank_nicolson_evolve(&m, &init, 100.0, 0.01).unwrap();
    assert!((out.norm_sq(m.h) - 1.0).abs() < 1e-10);
}

#[test]
fn crank_nicolson_reproduces_kernel() {
    let (sig, y0, x, t) = (0.1, -0.3, 0.7, 0.5);
    let g = |y: f64| (-(y - y0) * (y - y0) / (2.0 * sig * sig)).exp();
    let c = one();
    let exact = integrate_with(
        |y| propagator(&c, t, x, y).unwrap().g11 * g(y),
        Domain::Finite { a: y0 - 12.0 * sig, b: y0 + 12.0 * sig },
        &QuadOptions::new(1e-12).with_breakpoints(&[0.0]),
    )
    .unwrap()
    .value;
    let m = LatticeModel::line(&c, 40.0, 0.01).unwrap();
    let init = DiscreteState { phi0: vec![ZERO], phi1: (0..m.points).map(|j| re(g(m.position(j)))).collect() };
    let out = crank_nicolson_evolve(&m, &init, t, 1e-3).unwrap();
    assert!((out.phi1[m.nearest_index(x)] - exact).norm() < 1e-3);
}

#[test]
fn vacuum_decays_towards_four_ninths() {
    let m = LatticeModel::line(&one(), 200.0, 0.02).unwrap();
    let init = DiscreteState { phi0: vec![re(1.0)], phi1: vec![ZERO; m.points] };
    let out = crank_nicolson_evolve(&m, &init, 50.0, 0.01).unwrap();
    assert!((out.phi0[0].norm_sqr() - 4.0 / 9.0).abs() < 0.02);
}

#[test]
fn lattice_resolvent_matches_green_function() {
    let c = Coupling::new(Complex64::new(0.8, -0.6)).unwrap();
    for e in [2.0, -0.2] {
        let m = LatticeModel::line(&c, 6.0, 1e-3).unwrap();
        let src = m.nearest_index(0.4);
        let col = lattice_green(&m, re(e), GreenSource::Particle(src)).unwrap();
        let vac = lattice_green(&m, re(e), GreenSource::Vacuum(0)).unwrap();
        for x in [-1.0, 0.3, 2.5] {
            let exact = green_line(&c, e, x, 0.4).unwrap();
            let j = m.nearest_index(x);
            assert!((col.phi1[j] - exact.g11).norm() < 1e-3, "E = {e}, x = {x}");
            assert!((vac.phi1[j] - exact.g10).norm() < 1e-3);
        }
        let exact = green_line(&c, e, 0.4, 0.4).unwrap();
        assert!((col.phi0[0] - exact.g01).norm() < 1e-3);
        assert!((vac.phi0[0] - exact.g00).norm() < 1e-3);
    }
}

#[test]
fn lattice_scattering_matches_reflection_amplitude() {
    let b = reflection_amplitude(&one(), 2.0);
    let s = lattice_scattering(&[Source::new(0.0, re(1.0))], VacuumVariant::Shared, 2.0, 1e-3, 5.0).unwrap();
    assert!((s.reflection.norm() - b.norm()).abs() < 1e-2);
    assert!((s.transmission.norm() - (1.0 + b).norm()).abs() < 1e-2);

    let sources = [Source::new(-0.5, Complex64::new(1.0, 0.5)), Source::new(0.75, re(0.7))];
    let exact = scattering_state_multi(&sources, 1.3).unwrap();
    let s = lattice_scattering(&sources, VacuumVariant::Shared, 1.3, 1e-3, 5.0).unwrap();
    assert!((s.transmission - exact.transmission).norm() < 1e-2);
    assert!((s.reflection - exact.reflection).norm() < 1e-2);
}

#[test]
fn graph_lattice_tracks_secular_spectrum() {
    let g = build_graph(&[(0, 1, 1.0), (0, 2, 0.7), (0, 3, 1.3)], &[re(2.0), re(0.0), re(0.0), re(0.0)])
        .unwrap()
        .with_dirichlet(3)
        .unwrap();
    let exact = graph_spectrum(&g, -20.0, 60.0, VacuumVariant::Shared).unwrap().levels;
    let lattice = lattice_graph_spectrum(&g, 2e-3, VacuumVariant::Shared).unwrap();
    for (a, b) in lattice.iter().zip(&exact).take(5) {
        assert!((a - b).abs() < 1e-2 * b.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn kirchhoff_oracle_agrees_with_secular_determinant() {
    let triangle = build_graph(&[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)], &[re(0.0); 3]).unwrap();
    let levels = kirchhoff_levels(&triangle, 60.0).unwrap();
    let expected: Vec<f64> = (1..=3).flat_map(|n| [(2.0 * PI * n as f64 / 3.0).powi(2); 2]).collect();
    assert_eq!(levels.len(), expected.len(), "{levels:?}");
    for (a, b) in levels.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-9 * b);
    }

    let star = build_graph(&[(0, 1, 1.0), (0, 2, 0.7), (0, 3, 1.3)], &[re(0.0); 4]).unwrap().with_dirichlet(2).unwrap();
    let a = kirchhoff_levels(&star, 80.0).unwrap();
    let b = graph_spectrum(&star, 0.05, 80.0, VacuumVariant::Shared).unwrap().levels;
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-9 * y.max(1.0), "{x} vs {y}");
    }
}

#[test]
fn orthonormality_pieces_cancel() {
    let r = verify_orthonormality(&one(), 1.0, 2.0).unwrap();
    assert!(r.scattering_closed_form < 1e-14);
    assert!(r.scattering_intermediate < 1e-14);
    let r = verify_orthonormality(&one(), 0.7, 0.7).unwrap();
    assert!(r.ground_closed_form < 1e-13 && r.ground_quadrature < 1e-7);
}

#[test]
fn completeness_relations_hold() {
    for x in [0.1, 0.5, 1.0, 2.0, 3.0] {
        let r = verify_completeness(&one(), x, 0.5).unwrap();
        assert!(r.vacuum < 1e-10, "{r:?}");
        assert!(r.mixed < 1e-7, "x = {x}: {r:?}");
        assert!(r.smeared < 1e-5, "x = {x}: {r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn orthonormality_for_any_coupling(
        modulus in 0.1f64..10.0, phase in -PI..PI, k in 0.05f64..20.0, kp in -20.0f64..-0.05
    ) {
        let c = Coupling::new(Complex64::from_polar(modulus, phase)).unwrap();
        let r = verify_orthonormality(&c, k, kp).unwrap();
        prop_assert!(r.max() < 1e-12, "{:?}", r);
    }
}
