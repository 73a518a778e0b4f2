use ibc_core::multi_source::*;
use ibc_core::numerics::{integrate_with, Domain, QuadOptions};
use ibc_core::single_source::{ground_state, reflection_amplitude};
use ibc_core::{Complex64, Coupling};
use proptest::prelude::*;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn two_equal_sources_reference_root() {
    let g = ground_state_multi(&[Source::new(0.0, re(1.0)), Source::new(5.0, re(1.0))]).unwrap();
    assert!((g.kappa - 1.002216315026665247489748).abs() < 1e-14);
    assert!(g.warning.is_none());
}

#[test]
fn ground_state_satisfies_ibc_and_is_normalised() {
    let sources = [
        Source::new(-1.0, Complex64::new(0.7, 0.2)),
        Source::new(0.5, Complex64::new(-0.3, 1.1)),
        Source::new(2.5, Complex64::new(1.4, 0.0)),
    ];
    let g = ground_state_multi(&sources).unwrap();
    for (i, s) in sources.iter().enumerate() {
        assert!((g.derivative_jump(i) - s.coupling * g.phi0).norm() < 1e-13);
    }
    let vac: Complex64 = sources.iter().map(|s| s.coupling.conj() * g.phi1(s.position)).sum();
    assert!((g.energy * g.phi0 - vac).norm() < 1e-12);

    let opts = QuadOptions::new(1e-13).with_breakpoints(&[-1.0, 0.5, 2.5]);
    let norm = integrate_with(|x| re(g.phi1(x).norm_sqr()), Domain::WholeLine, &opts).unwrap();
    assert!((norm.value.re + g.phi0.norm_sqr() - 1.0).abs() < 1e-12);
    let (w0, w1) = g.weights();
    assert!((w1 - norm.value.re).abs() < 1e-12);
    assert!((w0 + w1 - 1.0).abs() < 1e-14);
}

#[test]
fn energy_is_continuous_at_zero_separation() {
    let (c1, c2) = (re(1.0), Complex64::new(0.5, 0.5));
    let e0 = interaction_energy(c1, c2, 0.0).unwrap();
    let r = 1e-5;
    let e = interaction_energy(c1, c2, r).unwrap();
    let slope = (e - e0) / r;
    assert!((slope - coulomb_slope(c1, c2)).abs() < 1e-3 * coulomb_slope(c1, c2).abs());
}

#[test]
fn distant_sources_share_a_vacuum() {
    // At large separation 2κ³ → |c₁|² + |c₂|².
    let e = interaction_energy(re(1.0), re(1.0), 60.0).unwrap();
    assert!((e + 1.0).abs() < 1e-12);
}

#[test]
fn opposite_charges_bind_weakly_when_close() {
    let e = interaction_energy(re(1.0), re(-1.0), 0.01).unwrap();
    assert!(e < 0.0 && e > -0.1);
}

proptest! {
    #[test]
    fn translation_invariance(shift in -20.0f64..20.0, r in 0.1f64..5.0, a in 0.2f64..2.0, b in -2.0f64..2.0) {
        prop_assume!(b.abs() > 0.05);
        let base = [Source::new(0.0, re(a)), Source::new(r, Complex64::new(b, 0.3))];
        let moved = [Source::new(shift, re(a)), Source::new(r + shift, Complex64::new(b, 0.3))];
        let e1 = ground_state_multi(&base).unwrap().energy;
        let e2 = ground_state_multi(&moved).unwrap().energy;
        prop_assert!((e1 - e2).abs() <= 1e-12 * e1.abs().max(1.0));
    }

    #[test]
    fn permutation_invariance(x in prop::collection::vec(-5.0f64..5.0, 3), c in prop::collection::vec(0.1f64..2.0, 3)) {
        let mut xs = x.clone();
        xs.sort_by(f64::total_cmp);
        prop_assume!(xs.windows(2).all(|w| w[1] - w[0] > 1e-3));
        let s: Vec<Source> = (0..3).map(|i| Source::new(x[i], re(c[i]))).collect();
        let p: Vec<Source> = [2, 0, 1].iter().map(|&i| s[i]).collect();
        let e1 = ground_state_multi(&s).unwrap().energy;
        let e2 = ground_state_multi(&p).unwrap().energy;
        prop_assert!((e1 - e2).abs() <= 1e-12 * e1.abs().max(1.0));
    }

    #[test]
    fn scattering_is_unitary(k in -8.0f64..8.0, r in 0.1f64..4.0, c1 in -2.0f64..2.0, c2 in -2.0f64..2.0) {
        prop_assume!(k.abs() > 0.05 && c1.abs() > 0.01 && c2.abs() > 0.01);
        let s = scattering_state_multi(&[Source::new(0.0, re(c1)), Source::new(r, Complex64::new(0.2, c2))], k).unwrap();
        prop_assert!((s.transmission.norm_sqr() + s.reflection.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn one_source_scattering_matches_single_source() {
    let c = Complex64::new(0.9, -0.4);
    let s = scattering_state_multi(&[Source::new(0.0, c)], 1.7).unwrap();
    let b = reflection_amplitude(&Coupling::new(c).unwrap(), 1.7);
    assert!((s.b[0] - b).norm() < 1e-14);
    assert!((s.reflection - b).norm() < 1e-14);
    assert!((s.transmission - 1.0 - b).norm() < 1e-14);
}

#[test]
fn scattering_state_satisfies_ibc() {
    let sources = [Source::new(-0.4, re(1.0)), Source::new(1.3, Complex64::new(0.0, 2.0))];
    let k = -2.3;
    let s = scattering_state_multi(&sources, k).unwrap();
    let h = 1e-6;
    for src in &sources {
        let x = src.position;
        let right = (s.phi1(x + h) - s.phi1(x)) / h;
        let left = (s.phi1(x) - s.phi1(x - h)) / h;
        assert!((right - left - src.coupling * s.phi0).norm() < 1e-5);
    }
    let vac: Complex64 = sources.iter().map(|src| src.coupling.conj() * s.phi1(src.position)).sum();
    assert!((k * k * s.phi0 - vac).norm() < 1e-12);
}

#[test]
fn merged_limit_matches_single_source() {
    let e = interaction_energy(re(0.5), re(0.5), 0.0).unwrap();
    assert!((e - ground_state(&Coupling::real(1.0).unwrap()).energy).abs() < 1e-15);
}
