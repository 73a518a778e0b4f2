use ibc_core::numerics::{erfc, erfcx, integrate, solve_root, Bracket, Domain};
use ibc_core::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// 50-digit reference values from tests/oracle_scripts/frozen_values.py.
const ERFC_REFERENCE: &[((f64, f64), (f64, f64))] = &[
    ((2.0, 0.0), (0.004677734981047265837931, 0.0)),
    ((0.5, 0.5), (0.3573870851451794716806, -0.4578813944351922158421)),
    ((-1.3, 0.7), (2.059592552018260211615, -0.0821977310413189207583)),
    ((3.0, -2.0), (0.001036721143182731119589, -0.00001154672437929060340631)),
    ((-2.5, -4.0), (1120.367715639456463829, 1742.108580192343897627)),
    ((0.1, 5.5), (-1251028928244.302840926, -666695387253.9266133475)),
    ((6.0, 6.0), (-0.05763424013567858929045, 0.03313911474115650049215)),
    ((-6.0, 6.0), (2.05763424013567858929, 0.03313911474115650049215)),
    ((12.0, -3.0), (-1.066696286776350207264e-60, 1.404758747271318596415e-62)),
    ((0.0, 9.0), (1.0, -9.500776643665995567475e+33)),
    ((-8.0, 1.0), (2.0, 1.219870461950460400794e-29)),
    ((20.0, 20.0), (-0.01892597849978877872764, -0.006300310979864400475244)),
    ((0.001, -0.002), (0.9988716166955095816986, 0.002256759086439515410142)),
    ((4.5, 0.0), (1.966160441542887476279e-10, 0.0)),
    ((-0.7, -3.3), (-5438.801831258272589372, -1828.861627555483902366)),
];

#[test]
fn erfc_matches_high_precision_reference() {
    for &((x, y), (re, im)) in ERFC_REFERENCE {
        let got = erfc(c(x, y)).unwrap();
        let want = c(re, im);
        let rel = (got - want).norm() / want.norm();
        assert!(rel < 1e-13, "erfc({x}+{y}i): got {got}, want {want}, rel {rel:e}");
    }
}

#[test]
fn erfc_at_zero_and_real_axis() {
    assert_eq!(erfc(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    let v = erfc(c(2.0, 0.0)).unwrap();
    assert!((v.re - 0.004677734981047266).abs() < 1e-17);
    assert_eq!(v.im, 0.0);
}

#[test]
fn erfc_overflow_is_an_error() {
    assert!(erfc(c(-1.0, 30.0)).is_err());
}

proptest! {
    #[test]
    fn erfc_reflection_identity(r in 0.0f64..6.0, theta in 0.0f64..std::f64::consts::TAU) {
        let z = Complex64::from_polar(r, theta);
        let a = erfc(z).unwrap();
        let b = erfc(-z).unwrap();
        let scale = a.norm().max(b.norm()).max(1.0);
        prop_assert!((a + b - 2.0).norm() <= 1e-14 * scale);
    }

    #[test]
    fn erfc_conjugation_symmetry(x in -5.0f64..5.0, y in -5.0f64..5.0) {
        let z = c(x, y);
        let a = erfc(z.conj()).unwrap();
        let b = erfc(z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-15 * a.norm().max(1.0));
    }

    #[test]
    fn erfcx_is_bounded_in_right_half_plane(x in 0.0f64..50.0, y in -50.0f64..50.0) {
        let w = erfcx(c(x, y)).unwrap();
        prop_assert!(w.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn root_of_cubic_is_bracketed_to_tolerance(a in 0.5f64..3.0) {
        let f = |x: f64| x * x * x - a;
        let r = solve_root(f, Bracket::new(0.0, 2.0).unwrap(), 1e-14).unwrap();
        prop_assert!((r - a.cbrt()).abs() <= 1e-14);
    }
}

#[test]
fn root_finder_reproduces_reference_root() {
    // 2κ(κ² - 4) = 1 on [2, 3]
    let f = |k: f64| 2.0 * k * (k * k - 4.0) - 1.0;
    let r = solve_root(f, Bracket::new(2.0, 3.0).unwrap(), 1e-14).unwrap();
    assert!((r - 2.059791970101320766963724).abs() < 1e-14);
}

#[test]
fn quadrature_reports_error_estimate() {
    let r = integrate(|x| c((-x * x).exp() * x.cos(), 0.0), Domain::WholeLine, 1e-12).unwrap();
    let exact = std::f64::consts::PI.sqrt() * (-0.25f64).exp();
    assert!((r.value.re - exact).abs() < 1e-12);
    assert!(r.error <= 1e-12);
}
