//! A source at `x = 0` inside the box `[-l₁, l₂]` with Dirichlet walls.
//!
//! Every quantity is written through the entire function
//! `d(E) = E·l·sinc(kl) + |c|² l₁l₂ sinc(kl₁) sinc(kl₂)`, whose zeros are the
//! eigenvalues. Dividing by `|c|² l₁l₂` gives the spectral determinant,
//! normalised to `Δ(0) = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::numerics::{sinc, sinc_energy, solve_root, wavenumber, Bracket};
use crate::single_source::{reflection_amplitude, SectorGreen};
use crate::{Coupling, IbcError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSpec {
    pub l1: f64,
    pub l2: f64,
    pub l: f64,
    pub coupling: Coupling,
}

impl BoxSpec {
    pub fn new(l1: f64, l2: f64, coupling: Coupling) -> Result<Self> {
        if !(l1 > 0.0 && l2 > 0.0 && l1.is_finite() && l2.is_finite()) {
            return Err(IbcError::InvalidParameter(format!("box lengths must be positive, got l1={l1}, l2={l2}")));
        }
        Ok(Self { l1, l2, l: l1 + l2, coupling })
    }

    /// Box of length `l` with the source at `x = 0`, `l₁ = l₂ = l/2`.
    pub fn centred(l: f64, coupling: Coupling) -> Result<Self> {
        Self::new(0.5 * l, 0.5 * l, coupling)
    }

    fn c2(&self) -> f64 {
        self.coupling.modulus_sq()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxSpectrum {
    pub ground_energy: f64,
    pub positive_levels: Vec<f64>,
}

/// `sinh(a) sinh(b) / sinh(a + b)` without overflow.
fn sinh_ratio(a: f64, b: f64) -> f64 {
    if a + b < 1e-8 {
        return a * b / (a + b);
    }
    let ea = -(-2.0 * a).exp_m1();
    let eb = -(-2.0 * b).exp_m1();
    let eab = -(-2.0 * (a + b)).exp_m1();
    ea * eb / (2.0 * eab)
}

/// `κ³ - |c|² sinh(κl₁) sinh(κl₂)/sinh(κl)`; its positive root is the decay
/// rate of the bound state.
pub fn box_ground_secular(spec: &BoxSpec, kappa: f64) -> f64 {
    kappa.powi(3) - spec.c2() * sinh_ratio(kappa * spec.l1, kappa * spec.l2)
}

/// Decay rate `κ` of the unique bound state.
pub fn box_ground_kappa(spec: &BoxSpec) -> f64 {
    let k0 = spec.coupling.kappa();
    // The sinh ratio increases monotonically to 1/2, so the root lies below κ₀.
    let hi = 1.01 * k0;
    let f = |k: f64| box_ground_secular(spec, k) / k;
    let mut lo = 0.5 * k0;
    while f(lo) >= 0.0 {
        lo *= 0.5;
    }
    solve_root(f, Bracket { lo, hi }, 1e-15 * hi).expect("bracket has a sign change by construction")
}

pub fn box_ground_energy(spec: &BoxSpec) -> f64 {
    -box_ground_kappa(spec).powi(2)
}

/// `∫₀^a sinh²(κs) ds / sinh²(κa)`, the weight of one side of the bound
/// state normalised to `φ¹(0) = 1`.
fn side_weight(kappa: f64, a: f64) -> f64 {
    let x = kappa * a;
    if x < 0.1 {
        // (sinh 2x - 2x)/(2κ) by its series, divided by 2 sinh² x.
        let y = 2.0 * x;
        let (mut term, mut sum) = (y, 0.0);
        for n in 1..10 {
            term *= y * y / ((2 * n) as f64 * (2 * n + 1) as f64);
            sum += term;
        }
        sum / (2.0 * kappa) / (2.0 * x.sinh().powi(2))
    } else {
        let e2 = (-2.0 * x).exp();
        ((1.0 - e2 * e2) / (4.0 * kappa) - a * e2) / (0.5 * (1.0 - e2).powi(2))
    }
}

/// Sector weights `(|φ⁰|², ‖φ¹‖²)` of the normalised bound state.
pub fn box_ground_weights(spec: &BoxSpec) -> (f64, f64) {
    let kappa = box_ground_kappa(spec);
    // With φ¹(0) = 1 the vacuum row gives φ⁰ = -c̄/κ².
    let w0 = spec.c2() / kappa.powi(4);
    let w1 = side_weight(kappa, spec.l1) + side_weight(kappa, spec.l2);
    (w0 / (w0 + w1), w1 / (w0 + w1))
}

/// `k³ sin(kl) + |c|² sin(kl₁) sin(kl₂)`; positive levels are its zeros.
pub fn box_level_function(spec: &BoxSpec, k: f64) -> f64 {
    k.powi(3) * (k * spec.l).sin() + spec.c2() * (k * spec.l1).sin() * (k * spec.l2).sin()
}

fn scan_roots(spec: &BoxSpec, k_max: f64, step: f64) -> Vec<(f64, f64)> {
    let n = (k_max / step).ceil() as usize;
    let mut brackets = Vec::new();
    let mut prev_k = step;
    let mut prev = box_level_function(spec, prev_k);
    for j in 2..=n {
        let k = (j as f64 * step).min(k_max);
        let v = box_level_function(spec, k);
        if v == 0.0 || v.signum() != prev.signum() {
            if prev != 0.0 {
                brackets.push((prev_k, k));
            }
        }
        prev_k = k;
        prev = v;
    }
    brackets
}

/// All levels `0 < E ≤ e_max`, sorted.
///
/// Sign changes of [`box_level_function`] are bracketed on a uniform `k` grid
/// (no level lies below `π/l`, where the function is positive); the census is
/// repeated at half the step and the finer grid wins if the counts differ.
pub fn box_positive_levels(spec: &BoxSpec, e_max: f64) -> Result<Vec<f64>> {
    if !(e_max > 0.0 && e_max.is_finite()) {
        return Err(IbcError::InvalidParameter(format!("e_max {e_max} must be positive")));
    }
    let k_max = e_max.sqrt();
    let coarse = PI / (4.0 * spec.l);
    let mut step = coarse.min((spec.coupling.kappa() / 10.0).max(coarse / 100.0));
    let mut brackets = scan_roots(spec, k_max, step);
    for _ in 0..6 {
        let finer = scan_roots(spec, k_max, 0.5 * step);
        if finer.len() == brackets.len() {
            break;
        }
        brackets = finer;
        step *= 0.5;
    }
    let mut levels = Vec::with_capacity(brackets.len());
    for (a, b) in brackets {
        let k = solve_root(|k| box_level_function(spec, k), Bracket::new(a, b)?, 1e-15 * b)?;
        let e = k * k;
        if e <= e_max {
            levels.push(e);
        }
    }
    Ok(levels)
}

pub fn box_spectrum(spec: &BoxSpec, e_max: f64) -> Result<BoxSpectrum> {
    Ok(BoxSpectrum { ground_energy: box_ground_energy(spec), positive_levels: box_positive_levels(spec, e_max)? })
}

fn sinc_len(k: Complex64, len: f64) -> Complex64 {
    sinc(k * len)
}

/// `d(E) = E·l·sinc(kl) + |c|² l₁l₂ sinc(kl₁) sinc(kl₂)` at complex energy.
fn secular_entire(spec: &BoxSpec, energy: Complex64) -> Complex64 {
    let k = wavenumber(energy);
    energy * spec.l * sinc_len(k, spec.l) + spec.c2() * spec.l1 * spec.l2 * sinc_len(k, spec.l1) * sinc_len(k, spec.l2)
}

/// Spectral determinant `Δ(E)`, an entire function of `E`, real on the real
/// axis, with `Δ(0) = 1` and zeros exactly at the eigenvalues (including the
/// negative one).
pub fn spectral_determinant(spec: &BoxSpec, energy: f64) -> f64 {
    let (l, l1, l2) = (spec.l, spec.l1, spec.l2);
    energy * l * sinc_energy(energy, l) / (spec.c2() * l1 * l2) + sinc_energy(energy, l1) * sinc_energy(energy, l2)
}

pub fn spectral_determinant_complex(spec: &BoxSpec, energy: Complex64) -> Complex64 {
    secular_entire(spec, energy) / (spec.c2() * spec.l1 * spec.l2)
}

/// Bare Dirichlet-box Green function `sin(k(x<+l₁)) sin(k(x>-l₂))/(k sin(kl))`.
pub fn bare_box_green(spec: &BoxSpec, energy: Complex64, x: f64, y: f64) -> Complex64 {
    let k = wavenumber(energy);
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    (k * (lo + spec.l1)).sin() * (k * (hi - spec.l2)).sin() / (energy * spec.l * sinc_len(k, spec.l))
}

/// Sector Green function of the box with source.
///
/// Evaluated in the pole-free form `(entire)/d(E)`: the bare-box poles
/// cancel analytically, so only eigenvalues of the full problem are poles.
pub fn box_green(spec: &BoxSpec, energy: Complex64, x: f64, y: f64) -> Result<SectorGreen> {
    for p in [x, y] {
        if !(p >= -spec.l1 && p <= spec.l2) {
            return Err(IbcError::InvalidParameter(format!("position {p} outside the box")));
        }
    }
    if energy.im == 0.0 {
        let e = energy.re;
        let step = 1e-6 * e.abs().max(1.0);
        let slope = (spectral_determinant(spec, e + step) - spectral_determinant(spec, e - step)) / (2.0 * step);
        let distance = (spectral_determinant(spec, e) / slope).abs();
        if distance < 1e-10 {
            return Err(IbcError::NearEigenvalue { energy: e, distance });
        }
    }

    let k = wavenumber(energy);
    let c = spec.coupling.value();
    let c2 = spec.c2();
    let (l1, l2) = (spec.l1, spec.l2);
    let d = secular_entire(spec, energy);
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };

    let n = (k * (lo + l1)).sin() * (k * (hi - l2)).sin();
    // Same-side correction B̃/k³; zero when the source lies between x and y.
    let b = if hi <= 0.0 {
        (lo + l1) * l2 * hi * sinc_len(k, lo + l1) * sinc_len(k, l2) * sinc_len(k, hi)
    } else if lo >= 0.0 {
        (hi - l2) * l1 * lo * sinc_len(k, hi - l2) * sinc_len(k, l1) * sinc_len(k, lo)
    } else {
        Complex64::new(0.0, 0.0)
    };
    // N(x, 0)/k² for the mixed components.
    let edge = |p: f64| {
        if p <= 0.0 {
            -(p + l1) * l2 * sinc_len(k, p + l1) * sinc_len(k, l2)
        } else {
            l1 * (p - l2) * sinc_len(k, l1) * sinc_len(k, p - l2)
        }
    };
    Ok(SectorGreen {
        g11: (n + c2 * b) / d,
        g10: c * edge(x) / d,
        g01: c.conj() * edge(y) / d,
        g00: spec.l * sinc_len(k, spec.l) / d,
    })
}

/// Number of positive levels `≤ E` (the bound state is not counted).
pub fn staircase_exact(spec: &BoxSpec, energy: f64) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(IbcError::InvalidParameter(format!("staircase needs E > 0, got {energy}")));
    }
    let levels = box_positive_levels(spec, energy * (1.0 + 1e-9) + 1e-9)?;
    let mut count = 0usize;
    for e in levels {
        let distance = (e - energy).abs();
        if distance < 1e-10 * energy.max(1.0) {
            return Err(IbcError::NearEigenvalue { energy, distance });
        }
        if e <= energy {
            count += 1;
        }
    }
    Ok(count as f64)
}

/// Number of all levels `≤ E`, bound state included. This is the
/// convention reproduced by the orbit expansion [`staircase_trace_formula`].
pub fn staircase_exact_with_bound_state(spec: &BoxSpec, energy: f64) -> Result<f64> {
    Ok(staircase_exact(spec, energy)? + 1.0)
}

/// `-(1/π) arg Δ(E + iε)`, continued from `Δ(0) = 1` along a contour through
/// the upper half plane, with `ε = 1e-8·max(1, E)`. Counts positive levels
/// below `E` independently of the root scan.
pub fn staircase_from_determinant(spec: &BoxSpec, energy: f64) -> f64 {
    let eps = 1e-8 * energy.abs().max(1.0);
    let height = energy.abs().max(1.0);
    let path = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, height),
        Complex64::new(energy, height),
        Complex64::new(energy, eps),
    ];
    let delta = |z: Complex64| spectral_determinant_complex(spec, z);
    // The phase winds about once per π of k·l along the contour; start from
    // pieces much shorter than one turn so that bisection cannot alias.
    let pieces = 16 * ((energy.abs().sqrt() * spec.l).ceil() as usize + 4);
    let mut phase = 0.0;
    for w in path.windows(2) {
        for j in 0..pieces {
            let a = w[0] + (w[1] - w[0]) * (j as f64 / pieces as f64);
            let b = w[0] + (w[1] - w[0]) * ((j + 1) as f64 / pieces as f64);
            phase += unwrap_segment(&delta, a, b, 0);
        }
    }
    -phase / PI
}

fn unwrap_segment<F: Fn(Complex64) -> Complex64>(f: &F, a: Complex64, b: Complex64, depth: u32) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let step = (fb / fa).arg();
    if depth >= 40 {
        return step;
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    let left = (fm / fa).arg();
    let right = (fb / fm).arg();
    if step.abs() < 0.3 && left.abs() < 0.3 && right.abs() < 0.3 && (left + right - step).abs() < 1e-12 {
        return step;
    }
    unwrap_segment(f, a, mid, depth + 1) + unwrap_segment(f, mid, b, depth + 1)
}

/// One periodic or diffractive orbit: `n₀` full traversals of the box,
/// `n₁`/`n₂` diffractive bounces in the left/right cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitTerm {
    pub n0: u32,
    pub n1: u32,
    pub n2: u32,
    pub n: u32,
    /// `L = n₀l + n₁l₁ + n₂l₂`
    pub length: f64,
    /// `n!/(n₀! n₁! n₂!)`, exact for `n ≤ 64`.
    pub multinomial: f64,
    multinomial_exact: Option<u128>,
}

impl OrbitTerm {
    pub fn multinomial_exact(&self) -> Option<u128> {
        self.multinomial_exact
    }
}

fn binomial(n: u32, k: u32) -> Option<u128> {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(r)
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

fn multinomial(n0: u32, n1: u32, n2: u32) -> (f64, Option<u128>) {
    let n = n0 + n1 + n2;
    let exact = if n <= 64 { binomial(n, n0).zip(binomial(n - n0, n1)).and_then(|(a, b)| a.checked_mul(b)) } else { None };
    match exact {
        Some(m) => (m as f64, Some(m)),
        None => ((ln_factorial(n) - ln_factorial(n0) - ln_factorial(n1) - ln_factorial(n2)).exp(), None),
    }
}

/// The `count` orbits with the smallest length; ties are ordered
/// lexicographically by `(n₀, n₁, n₂)`.
pub fn enumerate_orbits(spec: &BoxSpec, count: usize) -> Vec<OrbitTerm> {
    if count == 0 {
        return Vec::new();
    }
    let (l, l1, l2) = (spec.l, spec.l1, spec.l2);
    // Number of triples with length ≤ L grows like L³/(6 l l₁ l₂).
    let mut l_max = (6.0 * l * l1 * l2 * count as f64).cbrt().max(l1.min(l2));
    let mut triples = loop {
        let mut found = Vec::new();
        let mut n0 = 0u32;
        while n0 as f64 * l <= l_max {
            let r0 = l_max - n0 as f64 * l;
            let mut n1 = 0u32;
            while n1 as f64 * l1 <= r0 {
                let r1 = r0 - n1 as f64 * l1;
                let mut n2 = 0u32;
                while n2 as f64 * l2 <= r1 {
                    if n0 + n1 + n2 > 0 {
                        found.push((n0, n1, n2));
                    }
                    n2 += 1;
                }
                n1 += 1;
            }
            n0 += 1;
        }
        if found.len() >= count {
            break found;
        }
        l_max *= 1.5;
    };
    let key = |&(a, b, c): &(u32, u32, u32)| {
        let length = a as f64 * l + b as f64 * l1 + c as f64 * l2;
        ((length * 1e9).round() as i64, a, b, c)
    };
    triples.sort_by_key(key);
    triples.truncate(count);
    triples
        .into_iter()
        .map(|(n0, n1, n2)| {
            let (m, exact) = multinomial(n0, n1, n2);
            OrbitTerm {
                n0,
                n1,
                n2,
                n: n0 + n1 + n2,
                length: n0 as f64 * l + n1 as f64 * l1 + n2 as f64 * l2,
                multinomial: m,
                multinomial_exact: exact,
            }
        })
        .collect()
}

/// Orbit expansion of the staircase with a fixed set of orbits.
#[derive(Debug, Clone)]
pub struct TraceFormula {
    pub spec: BoxSpec,
    pub orbits: Vec<OrbitTerm>,
}

impl TraceFormula {
    pub fn new(spec: &BoxSpec, orbit_count: usize) -> Self {
        Self { spec: *spec, orbits: enumerate_orbits(spec, orbit_count) }
    }

    /// Smooth part `kl/π + arctan(k³/κ³)/π`.
    pub fn mean(&self, energy: f64) -> f64 {
        let k = energy.sqrt();
        let kappa = self.spec.coupling.kappa();
        k * self.spec.l / PI + (k / kappa).powi(3).atan() / PI
    }

    pub fn evaluate(&self, energy: f64) -> f64 {
        let k = energy.sqrt();
        let theta = (k / self.spec.coupling.kappa()).powi(3).atan();
        let b = reflection_amplitude(&self.spec.coupling, k);
        let mut sum = Complex64::new(0.0, 0.0);
        for o in &self.orbits {
            let sign = if o.n % 2 == 0 { 1.0 } else { -1.0 };
            let phase = Complex64::from_polar(1.0, 2.0 * k * o.length + 2.0 * o.n0 as f64 * theta);
            sum += sign / (PI * o.n as f64) * o.multinomial * b.powu(o.n1 + o.n2) * phase;
        }
        self.mean(energy) + sum.im
    }
}

/// Orbit expansion of the staircase truncated to the `orbit_count` shortest
/// orbits. Its smooth part tends to `kl/π + 1/2`, so it counts the bound
/// state together with the positive levels.
pub fn staircase_trace_formula(spec: &BoxSpec, energy: f64, orbit_count: usize) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(IbcError::InvalidParameter(format!("trace formula needs E > 0, got {energy}")));
    }
    Ok(TraceFormula::new(spec, orbit_count).evaluate(energy))
}

/// Staircase of the bare Dirichlet box from its orbit expansion,
/// `kl/π - 1/2 + Σ_{n≤terms} sin(2nkl)/(πn)`.
pub fn bare_staircase_trace(l: f64, energy: f64, terms: usize) -> f64 {
    let x = energy.sqrt() * l;
    let sum: f64 = (1..=terms).map(|n| (2.0 * n as f64 * x).sin() / n as f64).sum();
    x / PI - 0.5 + sum / PI
}
