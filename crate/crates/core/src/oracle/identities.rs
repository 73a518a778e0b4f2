use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::numerics::{erfcx, extrapolate_to_zero, integrate_with, Domain, QuadOptions};
use crate::single_source::{ground_state, scattering_state, Coupling, SectorState};
use crate::{IbcError, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthonormalityResiduals {
    /// Vacuum product of bound and scattering state plus the closed form of
    /// the one-particle overlap.
    pub ground_closed_form: f64,
    /// Same, with the one-particle overlap integrated numerically.
    pub ground_quadrature: f64,
    /// Vacuum product of two scattering states plus the non-delta part of
    /// their one-particle overlap.
    pub scattering_closed_form: f64,
    /// Agreement of the two algebraic forms of the non-delta part; zero
    /// when `|k| = |k'|`, where only the reduced form exists.
    pub scattering_intermediate: f64,
}

impl OrthonormalityResiduals {
    pub fn max(&self) -> f64 {
        self.ground_closed_form.max(self.ground_quadrature).max(self.scattering_closed_form).max(self.scattering_intermediate)
    }
}

fn overlap_quadrature<F: Fn(f64) -> Complex64>(f: F, domain: Domain, opts: &QuadOptions) -> Result<Complex64> {
    match integrate_with(f, domain, opts) {
        Ok(r) => Ok(r.value),
        // Accept a stalled refinement if it already sits at round-off.
        Err(IbcError::QuadratureNotConverged { estimate, error }) if error < 1e-11 * estimate.norm().max(1.0) => Ok(estimate),
        Err(e) => Err(e),
    }
}

/// Checks `⟨φ_g, φ_k⟩ = 0` and the cancellation of the regular part of
/// `⟨φ_k', φ_k⟩` against the vacuum product.
pub fn verify_orthonormality(coupling: &Coupling, k: f64, kp: f64) -> Result<OrthonormalityResiduals> {
    if k == 0.0 || kp == 0.0 || !k.is_finite() || !kp.is_finite() {
        return Err(IbcError::InvalidParameter("wavenumbers must be finite and nonzero".into()));
    }
    let kappa = coupling.kappa();
    let k3 = kappa.powi(3);
    let (q, qp) = (k.abs(), kp.abs());
    let g = ground_state(coupling);
    let sk = scattering_state(coupling, k);
    let skp = scattering_state(coupling, kp);

    let vacuum = g.phi0.conj() * sk.phi0;
    let bracket = (kappa / (6.0 * PI)).sqrt()
        * (1.0 / (kappa - I * k) + 1.0 / (kappa + I * k) - 2.0 * I * k3 / ((kappa - I * q) * (q.powi(3) + I * k3)));
    let reduced = (2.0 / (3.0 * PI)).sqrt() * (k * k * k3).sqrt() / (q.powi(3) + I * k3);
    let ground_closed_form = (vacuum + bracket).norm().max((vacuum + reduced).norm());

    let opts = QuadOptions::new(1e-15).with_breakpoints(&[0.0]);
    let overlap = overlap_quadrature(|x| g.phi1(x).conj() * sk.phi1(x), Domain::WholeLine, &opts)?;
    let ground_quadrature = (vacuum + overlap).norm();

    let ss0 = skp.phi0.conj() * sk.phi0;
    let denom = (q.powi(3) + I * k3) * (qp.powi(3) - I * k3);
    let regular = -q * qp * k3 / (PI * denom);
    let scattering_closed_form = (ss0 + regular).norm();
    let scattering_intermediate = if q != qp {
        let (b, bp) = (sk.b_k, skp.b_k.conj());
        let form = I / TAU * (b + bp + 2.0 * b * bp) / (q - qp) + I / TAU * (b - bp) / (q + qp);
        (form - regular).norm()
    } else {
        0.0
    };
    Ok(OrthonormalityResiduals { ground_closed_form, ground_quadrature, scattering_closed_form, scattering_intermediate })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletenessResiduals {
    /// `|φ_g⁰|² + ∫|φ_k⁰|² dk - 1`
    pub vacuum: f64,
    /// `φ̄_g⁰ φ_g¹(x) + ∫ φ̄_k⁰ φ_k¹(x) dk` at the requested `x`.
    pub mixed: f64,
    /// One-particle relation integrated against a normalised Gaussian of
    /// width [`SMEARING_WIDTH`] centred at `y`, compared with its value at `x`.
    pub smeared: f64,
}

impl CompletenessResiduals {
    pub fn max(&self) -> f64 {
        self.vacuum.max(self.mixed).max(self.smeared)
    }
}

pub const SMEARING_WIDTH: f64 = 0.05;

/// `∫_0^∞ g(s) e^{-iqs} ds` for the normalised Gaussian `g` of width `w`
/// centred at `y0`, written with `erfcx` so it stays finite for large `q`
/// and complex `q`.
fn half_line_transform(q: Complex64, y0: f64, w: f64) -> Result<Complex64> {
    let u = -(y0 - I * q * w * w) / (std::f64::consts::SQRT_2 * w);
    let gauss = (-y0 * y0 / (2.0 * w * w)).exp();
    if u.re >= 0.0 {
        Ok(0.5 * gauss * erfcx(u)?)
    } else {
        Ok((-I * q * y0 - q * q * w * w / 2.0).exp() - 0.5 * gauss * erfcx(-u)?)
    }
}

/// `∫ g(s) e^{-iq|s|} ds`
fn even_transform(q: Complex64, y0: f64, w: f64) -> Result<Complex64> {
    Ok(half_line_transform(q, y0, w)? + half_line_transform(q, -y0, w)?)
}

/// Checks the three completeness relations for the single-source line.
///
/// The mixed relation converges slowly in `k`; it is damped by `e^{-εk²}`
/// and extrapolated to `ε = 0` from three values of `ε ≤ x²/200`, which
/// keeps the damping away from the kink at the origin.
pub fn verify_completeness(coupling: &Coupling, x: f64, y: f64) -> Result<CompletenessResiduals> {
    if !x.is_finite() || !y.is_finite() || x == 0.0 {
        return Err(IbcError::InvalidParameter(format!("need finite x ≠ 0 and y, got x = {x}, y = {y}")));
    }
    let kappa = coupling.kappa();
    let g = ground_state(coupling);

    let tail = overlap_quadrature(
        |k| Complex64::new(scattering_state(coupling, k).phi0.norm_sqr(), 0.0),
        Domain::UpperInfinite { a: 0.0 },
        &QuadOptions::new(1e-15).with_breakpoints(&[kappa]),
    )?;
    let vacuum = (g.phi0.norm_sqr() + 2.0 * tail.re - 1.0).abs();

    let eps0 = (1e-2f64).min(x * x / 200.0);
    let ax = x.abs();
    let mut samples = Vec::with_capacity(3);
    for eps in [eps0, eps0 / 2.0, eps0 / 4.0] {
        let cutoff = 7.0 / eps.sqrt();
        let period = PI / ax;
        let breaks: Vec<f64> = (1..).map(|j| j as f64 * period).take_while(|&b| b < cutoff).collect();
        let opts = QuadOptions::new(1e-14).with_breakpoints(&breaks);
        // k and -k combined: φ_k⁰ is even in k.
        let value = overlap_quadrature(
            |k| {
                let s = scattering_state(coupling, k);
                let even = 2.0 * (k * x).cos() + 2.0 * s.b_k * (I * k * ax).exp();
                s.phi0.conj() * even / TAU.sqrt() * (-eps * k * k).exp()
            },
            Domain::Finite { a: 0.0, b: cutoff },
            &opts,
        )?;
        samples.push((eps, value));
    }
    let mixed = (g.phi0.conj() * g.phi1(x) + extrapolate_to_zero(&samples)).norm();

    let w = SMEARING_WIDTH;
    let target = (-(x - y).powi(2) / (2.0 * w * w)).exp() / (TAU.sqrt() * w);
    let ground_part = g.phi1(x) * g.amplitude * even_transform(-I * kappa, y, w)?;
    let cutoff = 40.0 / w;
    let period = PI / (ax + y.abs()).max(0.1);
    let breaks: Vec<f64> = (1..).map(|j| j as f64 * period).take_while(|&b| b < cutoff).collect();
    let opts = QuadOptions::new(1e-13).with_breakpoints(&breaks);
    let cell = std::cell::Cell::new(None::<IbcError>);
    let continuum = overlap_quadrature(
        |k| {
            let mut total = Complex64::new(0.0, 0.0);
            for kk in [k, -k] {
                if kk == 0.0 {
                    continue;
                }
                let s = scattering_state(coupling, kk);
                let plane = (-I * kk * y - kk * kk * w * w / 2.0).exp();
                let outgoing = match even_transform(Complex64::new(kk.abs(), 0.0), y, w) {
                    Ok(v) => v,
                    Err(e) => {
                        cell.set(Some(e));
                        Complex64::new(0.0, 0.0)
                    }
                };
                total += s.phi1(x) * (plane + s.b_k.conj() * outgoing) / TAU.sqrt();
            }
            total
        },
        Domain::Finite { a: 0.0, b: cutoff },
        &opts,
    )?;
    if let Some(e) = cell.take() {
        return Err(e);
    }
    let smeared = (ground_part + continuum - target).norm();
    Ok(CompletenessResiduals { vacuum, mixed, smeared })
}
