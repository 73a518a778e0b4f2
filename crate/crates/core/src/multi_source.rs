//! Several point sources on the line sharing one vacuum sector.
//!
//! The bound state decays as `e^{-κ|x - x_i|}` away from every source, with
//! `κ` the largest root of `2κ³ = S(κ) = Σ_{ij} c̄_i c_j e^{-κ|x_i - x_j|}`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::numerics::{solve_root, Bracket};
use crate::single_source::ground_state;
use crate::{Coupling, IbcError, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    pub position: f64,
    pub coupling: Complex64,
}

impl Source {
    pub fn new(position: f64, coupling: Complex64) -> Self {
        Self { position, coupling }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiGroundState {
    pub sources: Vec<Source>,
    pub kappa: f64,
    pub energy: f64,
    pub phi0: Complex64,
    /// `φ¹(x) = Σ_i a_i e^{-κ|x - x_i|}`
    pub amplitudes: Vec<Complex64>,
    /// Set when the secular equation has more than one positive root; the
    /// largest one (lowest energy) is returned.
    pub warning: Option<String>,
}

impl MultiGroundState {
    pub fn phi1(&self, x: f64) -> Complex64 {
        self.sources
            .iter()
            .zip(&self.amplitudes)
            .map(|(s, a)| a * (-self.kappa * (x - s.position).abs()).exp())
            .sum()
    }

    /// `(|φ⁰|², ‖φ¹‖²)`
    pub fn weights(&self) -> (f64, f64) {
        (self.phi0.norm_sqr(), one_particle_norm(&self.sources, &self.amplitudes, self.kappa))
    }

    /// Jump of `∂ₓφ¹` across source `i`.
    pub fn derivative_jump(&self, i: usize) -> Complex64 {
        -2.0 * self.kappa * self.amplitudes[i]
    }
}

/// `S(κ) = Σ_{ij} c̄_i c_j e^{-κ|x_i - x_j|}`; real and positive for distinct
/// positions and not all couplings zero.
pub fn secular_sum(sources: &[Source], kappa: f64) -> f64 {
    let mut total = 0.0;
    for (i, si) in sources.iter().enumerate() {
        total += si.coupling.norm_sqr();
        for sj in &sources[i + 1..] {
            let w = (-kappa * (si.position - sj.position).abs()).exp();
            total += 2.0 * (si.coupling.conj() * sj.coupling).re * w;
        }
    }
    total
}

fn one_particle_norm(sources: &[Source], amplitudes: &[Complex64], kappa: f64) -> f64 {
    let mut total = 0.0;
    for (i, si) in sources.iter().enumerate() {
        for (j, sj) in sources.iter().enumerate() {
            let d = (si.position - sj.position).abs();
            // ∫ e^{-κ|x|} e^{-κ|x-d|} dx = (d + 1/κ) e^{-κd}
            total += (amplitudes[i].conj() * amplitudes[j]).re * (d + 1.0 / kappa) * (-kappa * d).exp();
        }
    }
    total
}

fn validate(sources: &[Source]) -> Result<()> {
    if sources.is_empty() {
        return Err(IbcError::InvalidParameter("at least one source is required".into()));
    }
    for s in sources {
        if !s.position.is_finite() || !s.coupling.re.is_finite() || !s.coupling.im.is_finite() {
            return Err(IbcError::InvalidParameter("source data must be finite".into()));
        }
    }
    if sources.iter().all(|s| s.coupling.norm() == 0.0) {
        return Err(IbcError::ZeroCoupling);
    }
    for (i, a) in sources.iter().enumerate() {
        for b in &sources[i + 1..] {
            if a.position == b.position {
                return Err(IbcError::InvalidParameter(format!(
                    "two sources at x = {}; merge them into one coupling",
                    a.position
                )));
            }
        }
    }
    Ok(())
}

/// Normalised bound state for sources at distinct positions.
pub fn ground_state_multi(sources: &[Source]) -> Result<MultiGroundState> {
    validate(sources)?;
    let n = sources.len() as f64;
    let total: f64 = sources.iter().map(|s| s.coupling.norm_sqr()).sum();
    let f = |k: f64| 2.0 * k.powi(3) - secular_sum(sources, k);

    let lo = 1e-9;
    let mut hi = (0.5 * n * total).cbrt() + 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(IbcError::NoBoundState);
        }
    }
    // Log-spaced scan for sign changes; the largest root is the ground state.
    let samples = 400;
    let ratio = (hi / lo).ln() / samples as f64;
    let grid: Vec<f64> = (0..=samples).map(|j| lo * (ratio * j as f64).exp()).collect();
    let values: Vec<f64> = grid.iter().map(|&k| f(k)).collect();
    let brackets: Vec<usize> = (0..samples).filter(|&j| values[j].signum() != values[j + 1].signum()).collect();
    let Some(&last) = brackets.last() else {
        return Err(IbcError::NoBoundState);
    };
    let warning = (brackets.len() > 1).then(|| format!("secular equation has {} roots; using the largest", brackets.len()));
    let kappa = solve_root(f, Bracket::new(grid[last], grid[last + 1])?, 1e-15 * grid[last + 1])?;

    // Unnormalised solution with φ⁰ = 1, then rescale.
    let raw: Vec<Complex64> = sources.iter().map(|s| -s.coupling / (2.0 * kappa)).collect();
    let norm = (1.0 + one_particle_norm(sources, &raw, kappa)).sqrt();
    // Fix the global phase so the largest amplitude is real and positive.
    let lead = raw.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("non-empty");
    let phase = lead.conj() / lead.norm() / norm;
    Ok(MultiGroundState {
        sources: sources.to_vec(),
        kappa,
        energy: -kappa * kappa,
        phi0: phase,
        amplitudes: raw.iter().map(|a| a * phase).collect(),
        warning,
    })
}

/// Ground-state energy of two sources at separation `r ≥ 0`. At `r = 0` the
/// sources merge into one with coupling `c1 + c2`.
pub fn interaction_energy(c1: Complex64, c2: Complex64, r: f64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(IbcError::InvalidParameter(format!("separation {r} must be non-negative")));
    }
    if r == 0.0 {
        return match Coupling::new(c1 + c2) {
            Ok(c) => Ok(ground_state(&c).energy),
            Err(IbcError::ZeroCoupling) => Err(IbcError::NoBoundState),
            Err(e) => Err(e),
        };
    }
    Ok(ground_state_multi(&[Source::new(0.0, c1), Source::new(r, c2)])?.energy)
}

/// `dE/dR` at `R = 0⁺`: `(c̄₁c₂ + c̄₂c₁)/3`.
pub fn coulomb_slope(c1: Complex64, c2: Complex64) -> f64 {
    2.0 * (c1.conj() * c2).re / 3.0
}

/// Scattering solution for a plane wave `e^{ikx}` incident on all sources.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiScatteringState {
    pub k: f64,
    pub phi0: Complex64,
    /// `φ¹(x) = (e^{ikx} + Σ_i b_i e^{i|k||x - x_i|})/√(2π)`
    pub b: Vec<Complex64>,
    pub transmission: Complex64,
    pub reflection: Complex64,
    pub sources: Vec<Source>,
}

impl MultiScatteringState {
    pub fn phi1(&self, x: f64) -> Complex64 {
        let q = self.k.abs();
        let outgoing: Complex64 = self
            .sources
            .iter()
            .zip(&self.b)
            .map(|(s, b)| b * (I * q * (x - s.position).abs()).exp())
            .sum();
        ((I * self.k * x).exp() + outgoing) / TAU.sqrt()
    }
}

pub fn scattering_state_multi(sources: &[Source], k: f64) -> Result<MultiScatteringState> {
    validate(sources)?;
    if !(k.is_finite() && k != 0.0) {
        return Err(IbcError::InvalidParameter(format!("wavenumber {k} must be finite and nonzero")));
    }
    let q = k.abs();
    let mut interaction = Complex64::new(0.0, 0.0);
    for si in sources {
        for sj in sources {
            interaction += si.coupling.conj() * sj.coupling * (I * q * (si.position - sj.position).abs()).exp();
        }
    }
    let denom = 2.0 * I * q.powi(3) - interaction;
    if denom.norm() < 1e-14 * interaction.norm().max(q.powi(3)) {
        return Err(IbcError::ResonanceDenominator(k));
    }
    let drive: Complex64 = sources.iter().map(|s| s.coupling.conj() * (I * k * s.position).exp()).sum();
    let phi0 = 2.0 * I * q * drive / (TAU.sqrt() * denom);
    let b: Vec<Complex64> = sources.iter().map(|s| TAU.sqrt() * s.coupling * phi0 / (2.0 * I * q)).collect();
    let sgn = k.signum();
    let transmission = 1.0
        + sources
            .iter()
            .zip(&b)
            .map(|(s, b)| b * (-I * q * s.position * sgn).exp())
            .sum::<Complex64>();
    let reflection = sources.iter().zip(&b).map(|(s, b)| b * (I * q * s.position * sgn).exp()).sum();
    Ok(MultiScatteringState { k, phi0, b, transmission, reflection, sources: sources.to_vec() })
}
