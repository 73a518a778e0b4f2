//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use ibc_core::dirichlet_box::*;
use ibc_core::graph::{build_graph, graph_spectrum, VacuumVariant};
use ibc_core::multi_source::interaction_energy;
use ibc_core::numerics::{integrate_with, solve_root, Bracket, Domain, QuadOptions};
use ibc_core::oracle::*;
use ibc_core::single_source::*;
use ibc_core::{Complex64, Coupling};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn unit() -> Coupling {
    Coupling::real(1.0).unwrap()
}

fn ground_state_line() -> Outcome {
    let g = ground_state(&unit());
    let de = (g.energy + 2f64.powf(-2.0 / 3.0)).abs();
    let opts = QuadOptions::new(1e-13).with_breakpoints(&[0.0]);
    let w1 = integrate_with(|x| re(g.phi1(x).norm_sqr()), Domain::WholeLine, &opts).map_err(|e| e.to_string())?.value.re;
    let w0 = g.phi0.norm_sqr();
    let dw = (w0 - 2.0 / 3.0).abs().max((w1 - 1.0 / 3.0).abs());
    check(de < 1e-12 && dw < 1e-10, format!("|ΔE| = {de:.1e}, weight error {dw:.1e}"))
}

fn optical_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let c = Coupling::new(Complex64::from_polar(rng.gen_range(0.05..10.0), rng.gen_range(-PI..PI))).unwrap();
        let k = rng.gen_range(0.01..30.0);
        let d = diffraction_coefficient(&c, k).map_err(|e| e.to_string())?;
        worst = worst.max((d.im + d.norm_sqr() / (2.0 * k)).abs() / d.norm());
    }
    check(worst < 1e-13, format!("max |Im D + |D|²/2k| / |D| = {worst:.1e} over 100 points"))
}

fn orthonormality_completeness() -> Outcome {
    let c = unit();
    let mut ortho: f64 = 0.0;
    for (k, kp) in [(1.0, 2.0), (0.7, 0.7), (0.3, -4.0), (5.0, 0.2)] {
        let r = verify_orthonormality(&c, k, kp).map_err(|e| e.to_string())?;
        ortho = ortho.max(r.ground_closed_form).max(r.scattering_closed_form).max(r.scattering_intermediate);
    }
    let (mut r1, mut r2, mut r3): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for x in [0.1, 0.5, 1.0, 2.0, 3.0] {
        let r = verify_completeness(&c, x, 0.5).map_err(|e| e.to_string())?;
        r1 = r1.max(r.vacuum);
        r2 = r2.max(r.mixed);
        r3 = r3.max(r.smeared);
    }
    check(
        r1 < 1e-10 && r2 < 1e-7 && r3 < 1e-5 && ortho < 1e-13,
        format!("(i) {r1:.1e}, (ii) {r2:.1e}, (iii) {r3:.1e}, orthonormality {ortho:.1e}"),
    )
}

fn propagator_limits() -> Outcome {
    let c = unit();
    let kappa = c.kappa();
    let k00 = |t: f64| propagator(&c, t, 0.0, 0.0).map(|k| k.g00).map_err(|e| e.to_string());
    let start = (k00(1e-12)? - 1.0).norm();
    let residual = |t: f64| k00(t).map(|k| (k - 2.0 / 3.0 * (I * kappa * kappa * t).exp()).norm());
    let exponent = (residual(200.0)? / residual(50.0)?).ln() / 4f64.ln();
    let end = (k00(500.0)?.norm_sqr() - 4.0 / 9.0).abs();
    check(
        start < 1e-6 && (exponent + 1.5).abs() < 0.3 && end < 0.01,
        format!("|K00(0⁺) − 1| = {start:.1e}, decay exponent {exponent:.3}, ||K00(500)|² − 4/9| = {end:.1e}"),
    )
}

fn kernel_versus_pde() -> Outcome {
    let c = unit();
    let (sig, y0, x, t) = (0.1, -0.3, 0.7, 0.5);
    let g = |y: f64| (-(y - y0) * (y - y0) / (2.0 * sig * sig)).exp();
    let exact = integrate_with(
        |y| propagator(&c, t, x, y).unwrap().g11 * g(y),
        Domain::Finite { a: y0 - 12.0 * sig, b: y0 + 12.0 * sig },
        &QuadOptions::new(1e-12).with_breakpoints(&[0.0]),
    )
    .map_err(|e| e.to_string())?
    .value;
    let mut diffs = Vec::new();
    for (h, dt) in [(0.01, 1e-3), (0.005, 5e-4)] {
        let m = LatticeModel::line(&c, 40.0, h).map_err(|e| e.to_string())?;
        let init = DiscreteState { phi0: vec![re(0.0)], phi1: (0..m.points).map(|j| re(g(m.position(j)))).collect() };
        let out = crank_nicolson_evolve(&m, &init, t, dt).map_err(|e| e.to_string())?;
        diffs.push((out.phi1[m.nearest_index(x)] - exact).norm());
    }
    let m = LatticeModel::new(-10.0, 10.0, 0.05, &[ibc_core::multi_source::Source::new(0.0, Complex64::new(0.6, 0.8))], VacuumVariant::Shared)
        .map_err(|e| e.to_string())?;
    let init = DiscreteState { phi0: vec![re(1.0)], phi1: vec![re(0.0); m.points] };
    let out = crank_nicolson_evolve(&m, &init, 100.0, 0.01).map_err(|e| e.to_string())?;
    let drift = (out.norm_sq(m.h) - 1.0).abs();
    check(
        diffs[1] < 1e-3 && drift < 1e-10,
        format!("|CN − K11| = {:.1e} → {:.1e} after refinement, norm drift {drift:.1e} over 1e4 steps", diffs[0], diffs[1]),
    )
}

fn two_source_curve() -> Outcome {
    let e = |r: f64| interaction_energy(re(1.0), re(1.0), r).map_err(|e| e.to_string());
    let e0 = e(0.0)?;
    let d0 = (e0 + 2f64.powf(2.0 / 3.0)).abs();
    let d50 = (e(50.0)? + 1.0).abs();
    let r = 1e-4;
    let slope = 2.0 * (e(r)? - e0) / r - (e(2.0 * r)? - e0) / (2.0 * r);
    let ds = (slope - 2.0 / 3.0).abs();
    check(d0 < 1e-12 && d50 < 1e-6 && ds < 1e-4, format!("|E(0) + 2^(2/3)| = {d0:.1e}, |E(50) + 1| = {d50:.1e}, slope {slope:.6}"))
}

fn box_ground_state() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut unique = 0;
    for _ in 0..50 {
        let spec = BoxSpec::new(
            rng.gen_range(0.05..5.0),
            rng.gen_range(0.05..5.0),
            Coupling::from_kappa(rng.gen_range(0.05..8.0), rng.gen_range(-3.0..3.0)).unwrap(),
        )
        .unwrap();
        let hi = 1.01 * spec.coupling.kappa();
        let n = 4000;
        let changes = (1..n)
            .filter(|&j| {
                let a = box_ground_secular(&spec, hi * j as f64 / n as f64);
                let b = box_ground_secular(&spec, hi * (j + 1) as f64 / n as f64);
                a.signum() != b.signum()
            })
            .count();
        // Beyond 1.01 κ₀ the secular function is positive: κ³ > |c|²/2 > |c|² sinh ratio.
        if changes == 1 && box_ground_secular(&spec, hi) > 0.0 {
            unique += 1;
        }
    }
    let l = 1e-3;
    let small = box_ground_kappa(&BoxSpec::centred(l, unit()).unwrap());
    let ds = (small / (l / 4.0).sqrt() - 1.0).abs();
    let large = box_ground_kappa(&BoxSpec::centred(1e3, unit()).unwrap());
    let dl = (large - 2f64.powf(-1.0 / 3.0)).abs();
    check(
        unique == 50 && ds < 1e-3 && dl < 1e-9,
        format!("{unique}/50 unique, small-box relative error {ds:.1e}, large-box error {dl:.1e}"),
    )
}

fn determinant_zeros() -> Outcome {
    let spec = BoxSpec::centred(1.0, Coupling::real(20.0).unwrap()).unwrap();
    let spectrum = box_spectrum(&spec, (21.0 * PI).powi(2)).map_err(|e| e.to_string())?;
    let mut levels = vec![spectrum.ground_energy];
    levels.extend(spectrum.positive_levels.iter().take(19));
    let mut zeros = Vec::new();
    let step = 0.25;
    let mut e = -2.0 * spec.coupling.kappa().powi(2);
    let mut prev = spectral_determinant(&spec, e);
    while zeros.len() < 20 {
        let v = spectral_determinant(&spec, e + step);
        if v.signum() != prev.signum() {
            let z = solve_root(|x| spectral_determinant(&spec, x), Bracket::new(e, e + step).unwrap(), 1e-14 * (e + step).abs().max(1.0))
                .map_err(|e| e.to_string())?;
            zeros.push(z);
        }
        prev = v;
        e += step;
    }
    let worst = zeros.iter().zip(&levels).map(|(z, l)| (z - l).abs() / l.abs().max(1.0)).fold(0.0, f64::max);
    check(worst < 1e-9, format!("worst relative mismatch over 20 levels {worst:.1e}"))
}

fn trace_formula() -> Outcome {
    let spec = BoxSpec::centred(1.0, Coupling::real(20.0).unwrap()).unwrap();
    let levels = box_positive_levels(&spec, 1000.0).map_err(|e| e.to_string())?;
    let tf = TraceFormula::new(&spec, 2855);
    let mids = std::iter::once(0.5 * levels[0]).chain(levels.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for e in mids {
        let exact = staircase_exact_with_bound_state(&spec, e).map_err(|e| e.to_string())?;
        worst = worst.max((tf.evaluate(e) - exact).abs());
        count += 1;
    }
    check(worst < 0.1, format!("max mid-gap deviation {worst:.3} over {count} gaps, {} orbits", tf.orbits.len()))
}

fn graph_checks() -> Outcome {
    let kappa = 0.5f64.powf(1.0 / 3.0);
    let half = 50.0 / kappa;
    let line = build_graph(&[(0, 1, half), (1, 2, half)], &[re(0.0), re(1.0), re(0.0)]).map_err(|e| e.to_string())?;
    let s = graph_spectrum(&line, -2.0, -0.1, VacuumVariant::Shared).map_err(|e| e.to_string())?;
    let dline = s.levels.first().map(|e| (e + 2f64.powf(-2.0 / 3.0)).abs()).unwrap_or(f64::INFINITY);

    let levels = |c: f64| {
        let g = build_graph(&[(0, 1, 1.0), (1, 2, 1.7)], &[re(0.0), re(c), re(0.0)]).unwrap();
        graph_spectrum(&g, 0.5, 60.0, VacuumVariant::Shared).unwrap().levels
    };
    let (base, d2, d3) = (levels(0.0), levels(1e-2), levels(1e-3));
    let drift = |v: &[f64]| v.iter().zip(&base).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let ratio = drift(&d2) / drift(&d3);

    let mut dbox: f64 = 0.0;
    for c in [1.0, 20.0] {
        let g = build_graph(&[(0, 1, 0.3), (1, 2, 0.7)], &[re(0.0), re(c), re(0.0)])
            .and_then(|g| g.with_dirichlet(0))
            .and_then(|g| g.with_dirichlet(2))
            .map_err(|e| e.to_string())?;
        let b = box_spectrum(&BoxSpec::new(0.3, 0.7, Coupling::real(c).unwrap()).unwrap(), 1000.0).map_err(|e| e.to_string())?;
        let mut expected = vec![b.ground_energy];
        expected.extend(b.positive_levels.iter().take(9));
        let s = graph_spectrum(&g, expected[0] - 1.0, expected[9] + 1.0, VacuumVariant::Shared).map_err(|e| e.to_string())?;
        if s.levels.len() != 10 {
            return Err(format!("interval graph with c = {c} gave {} levels", s.levels.len()));
        }
        for (a, b) in s.levels.iter().zip(&expected) {
            dbox = dbox.max((a - b).abs() / b.abs().max(1.0));
        }
    }
    check(
        dline < 1e-6 && base.len() == d2.len() && (ratio / 100.0 - 1.0).abs() < 0.1 && dbox < 1e-9,
        format!("pseudo-line error {dline:.1e}, drift ratio (c=1e-2 : 1e-3) {ratio:.2}, interval vs box {dbox:.1e}"),
    )
}

fn lattice_oracle() -> Outcome {
    let line = lattice_spectrum_extrapolated(|h| LatticeModel::line(&unit(), 20.0, h), 4e-3, 1).map_err(|e| e.to_string())?;
    let dline = (line[0].value + 2f64.powf(-2.0 / 3.0)).abs();
    let spec = BoxSpec::centred(1.0, Coupling::real(20.0).unwrap()).unwrap();
    let exact = box_spectrum(&spec, 400.0).map_err(|e| e.to_string())?;
    let mut expected = vec![exact.ground_energy];
    expected.extend(exact.positive_levels.iter().take(4));
    let lattice = lattice_spectrum_extrapolated(|h| LatticeModel::dirichlet_box(&spec, h), 2e-3, 5).map_err(|e| e.to_string())?;
    let dbox = lattice.iter().zip(&expected).map(|(a, b)| (a.value - b).abs() / b.abs().max(1.0)).fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = LatticeModel::line(&Coupling::new(Complex64::new(0.4, 1.3)).unwrap(), 5.0, 0.01).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mut random = || DiscreteState {
            phi0: vec![Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))],
            phi1: (0..m.points).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        };
        let (u, v) = (random(), random());
        let a = m.inner(&m.apply(&u), &v);
        worst = worst.max((a - m.inner(&u, &m.apply(&v))).norm() / a.norm());
    }
    check(
        dline < 1e-3 && dbox < 1e-3 && worst < 1e-13,
        format!(
            "line ground error {dline:.1e} (order {:.2}), box levels relative error {dbox:.1e}, self-adjointness {worst:.1e}",
            line[0].order
        ),
    )
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 11] = [
        ("ground state", Duration::from_secs(1), ground_state_line),
        ("optical theorem", Duration::from_secs(1), optical_theorem),
        ("orthonormality and completeness", Duration::from_secs(30), orthonormality_completeness),
        ("propagator", Duration::from_secs(60), propagator_limits),
        ("kernel versus Crank–Nicolson", Duration::from_secs(300), kernel_versus_pde),
        ("two-source curve", Duration::from_secs(10), two_source_curve),
        ("box bound state", Duration::from_secs(10), box_ground_state),
        ("spectral determinant zeros", Duration::from_secs(10), determinant_zeros),
        ("trace formula", Duration::from_secs(120), trace_formula),
        ("graph spectra", Duration::from_secs(60), graph_checks),
        ("lattice oracle", Duration::from_secs(300), lattice_oracle),
    ];
    let mut failed = 0;
    for (n, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) => (elapsed <= *limit, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {:>2}. {name}: {detail} [{:.2} s, limit {} s]",
            if ok { "PASS" } else { "FAIL" },
            n + 1,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
