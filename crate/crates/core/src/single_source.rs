//! A single point source at `x = 0` on the real line.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::numerics::{erfcx, solve_root, wavenumber, Bracket};
use crate::{IbcError, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Nonzero complex coupling constant `c` of a source, with its derived scale
/// `κ = (|c|²/2)^{1/3}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    c: Complex64,
    kappa: f64,
}

impl Coupling {
    pub fn new(c: Complex64) -> Result<Self> {
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(IbcError::InvalidParameter(format!("coupling {c} is not finite")));
        }
        if c.norm() == 0.0 {
            return Err(IbcError::ZeroCoupling);
        }
        Ok(Self { c, kappa: (0.5 * c.norm_sqr()).cbrt() })
    }

    pub fn real(c: f64) -> Result<Self> {
        Self::new(Complex64::new(c, 0.0))
    }

    /// Coupling with scale `κ` and phase `φ_c`, i.e. `c = √(2κ³) e^{iφ_c}`.
    pub fn from_kappa(kappa: f64, phase: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(IbcError::InvalidParameter(format!("kappa {kappa} must be positive")));
        }
        Self::new(Complex64::from_polar((2.0 * kappa.powi(3)).sqrt(), phase))
    }

    pub fn value(&self) -> Complex64 {
        self.c
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn phase(&self) -> f64 {
        self.c.arg()
    }

    pub fn modulus_sq(&self) -> f64 {
        self.c.norm_sqr()
    }

    /// `κ_j = κ e^{2πij/3}`, the three cube roots entering the propagator.
    pub fn kappa_j(&self, j: usize) -> Complex64 {
        Complex64::from_polar(self.kappa, TAU * j as f64 / 3.0)
    }
}

/// Which side of the source a one-sided limit is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A state in the two-sector Hilbert space, evaluated near the source.
pub trait SectorState {
    fn phi0(&self) -> Complex64;
    fn phi1(&self, x: f64) -> Complex64;
    /// One-sided derivative of `φ¹` at `x`; `side` matters only at the source.
    fn phi1_derivative(&self, x: f64, side: Side) -> Complex64;
}

/// Normalised bound state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundState {
    pub coupling: Coupling,
    /// Decay rate of `φ¹`.
    pub kappa: f64,
    pub energy: f64,
    /// Mass gap `M` of the created particle (zero for the massless model).
    pub mass: f64,
    pub phi0: Complex64,
    /// `φ¹(x) = amplitude · e^{-κ|x|}`
    pub amplitude: f64,
}

impl GroundState {
    /// `(|φ⁰|², ‖φ¹‖²)`
    pub fn weights(&self) -> (f64, f64) {
        (self.phi0.norm_sqr(), self.amplitude * self.amplitude / self.kappa)
    }
}

impl SectorState for GroundState {
    fn phi0(&self) -> Complex64 {
        self.phi0
    }

    fn phi1(&self, x: f64) -> Complex64 {
        Complex64::new(self.amplitude * (-self.kappa * x.abs()).exp(), 0.0)
    }

    fn phi1_derivative(&self, x: f64, side: Side) -> Complex64 {
        let s = if x > 0.0 || (x == 0.0 && side == Side::Right) { -1.0 } else { 1.0 };
        Complex64::new(s * self.kappa * self.amplitude * (-self.kappa * x.abs()).exp(), 0.0)
    }
}

/// The unique bound state `E = -κ²`, `|φ⁰|² = 2/3`, `‖φ¹‖² = 1/3`.
pub fn ground_state(coupling: &Coupling) -> GroundState {
    let kappa = coupling.kappa;
    let c = coupling.c;
    let amplitude = (kappa / 3.0).sqrt();
    GroundState {
        coupling: *coupling,
        kappa,
        energy: -kappa * kappa,
        mass: 0.0,
        phi0: -(2.0f64 / 3.0).sqrt() * c.norm() / c,
        amplitude,
    }
}

/// Bound state when the created particle carries a rest energy `mass > 0`:
/// `κ` solves `2κ(κ² - M) = |c|²` and `E = M - κ²`.
pub fn ground_state_massive(coupling: &Coupling, mass: f64) -> Result<GroundState> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(IbcError::InvalidParameter(format!("mass {mass} must be positive")));
    }
    let c2 = coupling.modulus_sq();
    let root_m = mass.sqrt();
    // F(√M) = -|c|² < 0 and F(√M + (|c|²/2)^{1/3} + 1) > 0.
    let f = |k: f64| 2.0 * k * (k - root_m) * (k + root_m) - c2;
    let hi = root_m + coupling.kappa + 1.0;
    let kappa = solve_root(f, Bracket::new(root_m, hi)?, 1e-15 * hi)?;
    // κ² - M from the defining equation; differencing κ² and M loses all
    // precision at weak coupling.
    let gap = c2 / (2.0 * kappa);
    let denom = 3.0 * kappa * kappa - mass;
    let amplitude = (kappa * gap / denom).sqrt();
    Ok(GroundState {
        coupling: *coupling,
        kappa,
        energy: -gap,
        mass,
        phi0: -2.0 * kappa * amplitude / coupling.c,
        amplitude,
    })
}

/// `b_k = -iκ³/(|k|³ + iκ³)`, the amplitude of the outgoing wave emitted by
/// the source.
pub fn reflection_amplitude(coupling: &Coupling, k: f64) -> Complex64 {
    let k3 = coupling.kappa.powi(3);
    -I * k3 / (Complex64::new(k.abs().powi(3), k3))
}

/// `b_k` continued analytically off the real axis (valid for `Re k > 0` or
/// `Im k ≥ 0`): `-iκ³/(k³ + iκ³)`.
pub fn reflection_amplitude_complex(coupling: &Coupling, k: Complex64) -> Complex64 {
    let k3 = coupling.kappa.powi(3);
    -I * k3 / (k * k * k + I * k3)
}

/// Diffraction coefficient `𝒟(k) = 2ik b_k` for `k > 0`. It satisfies the
/// optical theorem `Im 𝒟 = -|𝒟|²/(2k)`.
pub fn diffraction_coefficient(coupling: &Coupling, k: f64) -> Result<Complex64> {
    if !(k > 0.0) {
        return Err(IbcError::InvalidParameter(format!("diffraction coefficient needs k > 0, got {k}")));
    }
    Ok(2.0 * I * k * reflection_amplitude(coupling, k))
}

/// Generalised eigenstate at energy `k²`, normalised to `δ(k - k')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringState {
    pub coupling: Coupling,
    pub k: f64,
    pub b_k: Complex64,
    pub phi0: Complex64,
}

impl ScatteringState {
    pub fn energy(&self) -> f64 {
        self.k * self.k
    }
}

impl SectorState for ScatteringState {
    fn phi0(&self) -> Complex64 {
        self.phi0
    }

    fn phi1(&self, x: f64) -> Complex64 {
        let q = self.k.abs();
        ((I * self.k * x).exp() + self.b_k * (I * q * x.abs()).exp()) / TAU.sqrt()
    }

    fn phi1_derivative(&self, x: f64, side: Side) -> Complex64 {
        let q = self.k.abs();
        let s = if x > 0.0 || (x == 0.0 && side == Side::Right) { 1.0 } else { -1.0 };
        (I * self.k * (I * self.k * x).exp() + self.b_k * I * q * s * (I * q * x.abs()).exp()) / TAU.sqrt()
    }
}

pub fn scattering_state(coupling: &Coupling, k: f64) -> ScatteringState {
    let b_k = reflection_amplitude(coupling, k);
    let phi0 = 2.0 * I * k.abs() * b_k / (TAU.sqrt() * coupling.c);
    ScatteringState { coupling: *coupling, k, b_k, phi0 }
}

/// Linear combination of sector states.
pub struct Superposition<'a> {
    pub terms: Vec<(Complex64, &'a dyn SectorState)>,
}

impl SectorState for Superposition<'_> {
    fn phi0(&self) -> Complex64 {
        self.terms.iter().map(|(a, s)| a * s.phi0()).sum()
    }

    fn phi1(&self, x: f64) -> Complex64 {
        self.terms.iter().map(|(a, s)| a * s.phi1(x)).sum()
    }

    fn phi1_derivative(&self, x: f64, side: Side) -> Complex64 {
        self.terms.iter().map(|(a, s)| a * s.phi1_derivative(x, side)).sum()
    }
}

/// Grid samples of `φ¹` containing the source as a grid point, plus `φ⁰`.
/// Derivatives at the source are one-sided second-order differences.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledState {
    pub x0: f64,
    pub h: f64,
    pub values: Vec<Complex64>,
    pub phi0: Complex64,
}

impl SampledState {
    fn index_of(&self, x: f64) -> f64 {
        (x - self.x0) / self.h
    }
}

impl SectorState for SampledState {
    fn phi0(&self) -> Complex64 {
        self.phi0
    }

    fn phi1(&self, x: f64) -> Complex64 {
        let t = self.index_of(x);
        let n = self.values.len();
        if n == 0 || t < 0.0 || t > (n - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let j = (t.floor() as usize).min(n.saturating_sub(2));
        let w = t - j as f64;
        if n == 1 {
            return self.values[0];
        }
        self.values[j] * (1.0 - w) + self.values[j + 1] * w
    }

    fn phi1_derivative(&self, x: f64, side: Side) -> Complex64 {
        let j = self.index_of(x).round().max(0.0) as usize;
        let v = &self.values;
        let h = self.h;
        match side {
            Side::Right if j + 2 < v.len() => (-3.0 * v[j] + 4.0 * v[j + 1] - v[j + 2]) / (2.0 * h),
            Side::Left if j >= 2 && j < v.len() => (3.0 * v[j] - 4.0 * v[j - 1] + v[j - 2]) / (2.0 * h),
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    }
}

/// Probability balance at the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxBalance {
    /// `j(0⁺) - j(0⁻)` with `j = 2 Im(φ̄¹ ∂ₓφ¹)`: rate at which the
    /// one-particle sector gains probability.
    pub current_jump: f64,
    /// `d|φ⁰|²/dt = 2 Im(φ̄⁰ c̄ φ¹(0))`.
    pub vacuum_rate: f64,
    /// `|current_jump + vacuum_rate|`, zero when probability is conserved.
    pub residual: f64,
}

pub fn flux_balance(state: &dyn SectorState, coupling: &Coupling) -> FluxBalance {
    let value = state.phi1(0.0);
    let current = |side| 2.0 * (value.conj() * state.phi1_derivative(0.0, side)).im;
    let current_jump = current(Side::Right) - current(Side::Left);
    let vacuum_rate = 2.0 * (state.phi0().conj() * coupling.c.conj() * value).im;
    FluxBalance { current_jump, vacuum_rate, residual: (current_jump + vacuum_rate).abs() }
}

/// The four sector components of a Green function or kernel, `G^{ab}` with
/// `a` the output sector and `b` the input sector. `g10` depends on `x`
/// only and `g01` on `y` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorGreen {
    pub g11: Complex64,
    pub g10: Complex64,
    pub g01: Complex64,
    pub g00: Complex64,
}

/// Green function `(E - H)^{-1}` for real energy; for `E > 0` the outgoing
/// (`E + i0`) boundary value.
pub fn green_line(coupling: &Coupling, energy: f64, x: f64, y: f64) -> Result<SectorGreen> {
    if energy == 0.0 || !energy.is_finite() {
        return Err(IbcError::InvalidParameter(format!("energy {energy} must be finite and nonzero")));
    }
    let e_g = -coupling.kappa.powi(2);
    let distance = (energy - e_g).abs();
    if distance < 1e-10 * e_g.abs().max(1.0) {
        return Err(IbcError::NearEigenvalue { energy, distance });
    }
    Ok(green_line_complex(coupling, Complex64::new(energy, 0.0), x, y))
}

/// Green function at complex energy, on the physical sheet `Im k ≥ 0`.
pub fn green_line_complex(coupling: &Coupling, energy: Complex64, x: f64, y: f64) -> SectorGreen {
    let k = wavenumber(energy);
    let b = reflection_amplitude_complex(coupling, k);
    let c = coupling.c;
    let ex = (I * k * x.abs()).exp();
    let ey = (I * k * y.abs()).exp();
    let two_ik = 2.0 * I * k;
    SectorGreen {
        g11: (I * k * (x - y).abs()).exp() / two_ik + b * ex * ey / two_ik,
        g10: b * ex / c.conj(),
        g01: b * ey / c,
        g00: two_ik * b / coupling.modulus_sq(),
    }
}

/// Free-particle kernel `e^{i(x-y)²/(4t)} / √(4πit)`.
pub fn free_kernel(t: f64, x: f64, y: f64) -> Complex64 {
    let d = x - y;
    (I * d * d / (4.0 * t)).exp() / (Complex64::from_polar((4.0 * PI * t).sqrt(), PI / 4.0))
}

/// Time-evolution kernel `⟨x|e^{-iHt}|y⟩` in all four sector combinations.
///
/// Each image term `e^{iκ_j²t} e^{-κ_j s} erfc(s/(2√(it)) - κ_j √(it))` is
/// evaluated as `e^{is²/(4t)} erfcx(·)`, which stays bounded for all `t`.
pub fn propagator(coupling: &Coupling, t: f64, x: f64, y: f64) -> Result<SectorGreen> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(IbcError::InvalidParameter(format!("time {t} must be positive")));
    }
    let a = Complex64::from_polar(t.sqrt(), PI / 4.0);
    let c = coupling.c;
    let s = x.abs() + y.abs();
    let phase = |d: f64| (I * d * d / (4.0 * t)).exp();

    let mut k11 = free_kernel(t, x, y);
    let mut k10 = Complex64::new(0.0, 0.0);
    let mut k01 = Complex64::new(0.0, 0.0);
    let mut k00 = Complex64::new(0.0, 0.0);
    for j in 0..3 {
        let kj = coupling.kappa_j(j);
        k11 += kj / 6.0 * phase(s) * erfcx(s / (2.0 * a) - kj * a)?;
        let ex = phase(x) * erfcx(x.abs() / (2.0 * a) - kj * a)?;
        let ey = phase(y) * erfcx(y.abs() / (2.0 * a) - kj * a)?;
        k10 -= kj * kj / (3.0 * c.conj()) * ex;
        k01 -= kj * kj / (3.0 * c) * ey;
        k00 += erfcx(-kj * a)? / 3.0;
    }
    Ok(SectorGreen { g11: k11, g10: k10, g01: k01, g00: k00 })
}
