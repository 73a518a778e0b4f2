use std::f64::consts::TAU;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::bordered::BorderedSolver;
use crate::dirichlet_box::BoxSpec;
use crate::graph::VacuumVariant;
use crate::multi_source::Source;
use crate::single_source::Coupling;
use crate::{IbcError, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSource {
    /// Interior grid index.
    pub index: usize,
    pub coupling: Complex64,
    /// Vacuum amplitude this source feeds.
    pub vacuum: usize,
}

/// Uniform grid on `[left, left + (points + 1) h]` with Dirichlet walls at
/// both ends; unknowns are the `points` interior values and the vacua.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeModel {
    pub h: f64,
    pub left: f64,
    pub points: usize,
    pub sources: Vec<LatticeSource>,
    pub vacua: usize,
}

/// `φ¹` on the interior grid (unscaled) and the vacuum amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteState {
    pub phi0: Vec<Complex64>,
    pub phi1: Vec<Complex64>,
}

impl DiscreteState {
    /// `Σ|φ⁰|² + h Σ|φ¹_j|²`
    pub fn norm_sq(&self, h: f64) -> f64 {
        self.phi0.iter().map(|z| z.norm_sqr()).sum::<f64>() + h * self.phi1.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }
}

impl LatticeModel {
    /// Grid with spacing close to `h` such that every source lands on a grid point.
    pub fn new(left: f64, right: f64, h: f64, sources: &[Source], variant: VacuumVariant) -> Result<Self> {
        if !(h > 0.0 && right > left && left.is_finite() && right.is_finite()) {
            return Err(IbcError::InvalidParameter(format!("bad lattice [{left}, {right}] with h = {h}")));
        }
        let steps = (right - left) / h;
        let intervals = steps.round();
        if (steps - intervals).abs() > 1e-6 || intervals < 2.0 {
            return Err(IbcError::InvalidParameter(format!("h = {h} does not divide [{left}, {right}]")));
        }
        let intervals = intervals as usize;
        let mut out = Vec::with_capacity(sources.len());
        for (j, s) in sources.iter().enumerate() {
            let pos = (s.position - left) / h;
            let idx = pos.round();
            if (pos - idx).abs() > 1e-6 || idx < 1.0 || idx >= intervals as f64 {
                return Err(IbcError::InvalidParameter(format!("source at {} is not an interior grid point", s.position)));
            }
            if !(s.coupling.re.is_finite() && s.coupling.im.is_finite()) {
                return Err(IbcError::InvalidParameter("coupling is not finite".into()));
            }
            let index = idx as usize - 1;
            if out.iter().any(|o: &LatticeSource| o.index == index) {
                return Err(IbcError::InvalidParameter(format!("two sources at grid index {index}")));
            }
            let vacuum = match variant {
                VacuumVariant::Shared => 0,
                VacuumVariant::Trapped => j,
            };
            out.push(LatticeSource { index, coupling: s.coupling, vacuum });
        }
        let vacua = match variant {
            VacuumVariant::Shared => 1,
            VacuumVariant::Trapped => sources.len().max(1),
        };
        Ok(LatticeModel { h: (right - left) / intervals as f64, left, points: intervals - 1, sources: out, vacua })
    }

    /// One source at the origin with walls at `±half_width`.
    pub fn line(coupling: &Coupling, half_width: f64, h: f64) -> Result<Self> {
        Self::new(-half_width, half_width, h, &[Source::new(0.0, coupling.value())], VacuumVariant::Shared)
    }

    /// Source at the origin, walls at `-l₁` and `l₂`.
    pub fn dirichlet_box(spec: &BoxSpec, h: f64) -> Result<Self> {
        Self::new(-spec.l1, spec.l2, h, &[Source::new(0.0, spec.coupling.value())], VacuumVariant::Shared)
    }

    pub fn dimension(&self) -> usize {
        self.points + self.vacua
    }

    pub fn position(&self, j: usize) -> f64 {
        self.left + (j + 1) as f64 * self.h
    }

    /// Interior index closest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        (((x - self.left) / self.h).round().max(1.0) as usize - 1).min(self.points - 1)
    }

    /// Border of the scaled Hermitian matrix, `ψ¹ = √h φ¹`:
    /// `(site, vacuum, c/√h)`.
    fn border(&self) -> Vec<(usize, usize, Complex64)> {
        let s = self.h.sqrt();
        self.sources.iter().map(|src| (src.index, src.vacuum, src.coupling / s)).collect()
    }

    fn conj_border(&self) -> Vec<(usize, usize, Complex64)> {
        self.border().into_iter().map(|(site, v, c)| (v, site, c.conj())).collect()
    }

    /// Scaled operator applied to `(ψ¹, ψ⁰)`.
    fn apply_scaled(&self, psi1: &[Complex64], psi0: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let inv = 1.0 / (self.h * self.h);
        let n = self.points;
        let mut out1: Vec<Complex64> = (0..n)
            .map(|j| {
                let left = if j > 0 { psi1[j - 1] } else { ZERO };
                let right = if j + 1 < n { psi1[j + 1] } else { ZERO };
                (2.0 * psi1[j] - left - right) * inv
            })
            .collect();
        let mut out0 = vec![ZERO; self.vacua];
        for (site, v, c) in self.border() {
            out1[site] += c * psi0[v];
            out0[v] += c.conj() * psi1[site];
        }
        (out1, out0)
    }

    /// `Hφ` in unscaled variables.
    pub fn apply(&self, state: &DiscreteState) -> DiscreteState {
        let s = self.h.sqrt();
        let psi1: Vec<Complex64> = state.phi1.iter().map(|z| z * s).collect();
        let (o1, o0) = self.apply_scaled(&psi1, &state.phi0);
        DiscreteState { phi0: o0, phi1: o1.into_iter().map(|z| z / s).collect() }
    }

    /// Weighted inner product `Σ conj(a⁰) b⁰ + h Σ conj(a¹) b¹`.
    pub fn inner(&self, a: &DiscreteState, b: &DiscreteState) -> Complex64 {
        let v: Complex64 = a.phi0.iter().zip(&b.phi0).map(|(x, y)| x.conj() * y).sum();
        let p: Complex64 = a.phi1.iter().zip(&b.phi1).map(|(x, y)| x.conj() * y).sum();
        v + self.h * p
    }

    /// Number of eigenvalues below `lambda`, from the signs of the
    /// tridiagonal LDLᵀ pivots plus the inertia of the vacuum Schur block.
    pub fn count_below(&self, lambda: f64) -> usize {
        let inv = 1.0 / (self.h * self.h);
        let a = 2.0 * inv;
        let e = -inv;
        let m = self.vacua;
        let mut border: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); self.points];
        for (site, v, c) in self.border() {
            border[site].push((v, c));
        }
        let mut schur = DMatrix::<Complex64>::from_diagonal_element(m, m, Complex64::new(-lambda, 0.0));
        let mut y = vec![ZERO; m];
        let mut active = false;
        let mut negatives = 0;
        let mut d_prev = 1.0;
        let tiny = f64::EPSILON * (a + lambda.abs());
        for (j, b) in border.iter().enumerate() {
            let mut d = a - lambda - if j > 0 { e * e / d_prev } else { 0.0 };
            if d == 0.0 {
                d = tiny;
            }
            let l = if j > 0 { e / d_prev } else { 0.0 };
            if active {
                y.iter_mut().for_each(|z| *z *= -l);
            }
            for &(v, c) in b {
                y[v] += c;
                active = true;
            }
            if active {
                for r in 0..m {
                    for s in 0..m {
                        schur[(r, s)] -= y[r].conj() * y[s] / d;
                    }
                }
            }
            if d < 0.0 {
                negatives += 1;
            }
            d_prev = d;
        }
        let neg_schur = if m == 1 {
            usize::from(schur[(0, 0)].re < 0.0)
        } else {
            SymmetricEigen::new(schur).eigenvalues.iter().filter(|&&x| x < 0.0).count()
        };
        negatives + neg_schur
    }

    fn spectral_bounds(&self) -> (f64, f64) {
        let border: f64 = self.border().iter().map(|(_, _, c)| c.norm()).sum();
        (-border - 1.0, 4.0 / (self.h * self.h) + border + 1.0)
    }
}

/// Lowest `num_levels` eigenvalues, by bisection on the eigenvalue count.
pub fn lattice_spectrum(model: &LatticeModel, num_levels: usize) -> Result<Vec<f64>> {
    if num_levels > model.dimension() {
        return Err(IbcError::InvalidParameter(format!("{num_levels} levels requested from a {}-dimensional lattice", model.dimension())));
    }
    let (lo0, hi0) = model.spectral_bounds();
    let mut levels = Vec::with_capacity(num_levels);
    for k in 0..num_levels {
        let (mut lo, mut hi) = (levels.last().copied().unwrap_or(lo0).min(hi0), hi0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if model.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        levels.push(0.5 * (lo + hi));
    }
    Ok(levels)
}

/// Extrapolated value from samples at `h`, `h/2`, `h/4` with a fitted order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: f64,
    /// Empirical convergence order `log₂((a - b)/(b - c))`.
    pub order: f64,
    pub samples: [f64; 3],
}

pub fn richardson(samples: [f64; 3]) -> Extrapolated {
    let [a, b, c] = samples;
    let (d1, d2) = (a - b, b - c);
    if d2 == 0.0 {
        return Extrapolated { value: c, order: f64::INFINITY, samples };
    }
    let ratio = d1 / d2;
    if !(ratio > 1.0) {
        // Not in the asymptotic regime; fall back to first order.
        return Extrapolated { value: c + (c - b), order: f64::NAN, samples };
    }
    let order = ratio.log2();
    Extrapolated { value: c + (c - b) / (ratio - 1.0), order, samples }
}

/// Spectrum at `h`, `h/2`, `h/4`, extrapolated level by level.
pub fn lattice_spectrum_extrapolated<F>(build: F, h: f64, num_levels: usize) -> Result<Vec<Extrapolated>>
where
    F: Fn(f64) -> Result<LatticeModel>,
{
    let runs = [h, h / 2.0, h / 4.0].map(|hh| build(hh).and_then(|m| lattice_spectrum(&m, num_levels)));
    let [a, b, c] = runs;
    let (a, b, c) = (a?, b?, c?);
    Ok((0..num_levels).map(|j| richardson([a[j], b[j], c[j]])).collect())
}

/// Normalised eigenvector at an eigenvalue of the model. The vacuum part is
/// the null vector of the Schur block, the one-particle part follows from
/// `(T - λ)ψ¹ = -Pψ⁰`.
pub fn lattice_eigenstate(model: &LatticeModel, energy: f64) -> Result<DiscreteState> {
    let inv = 1.0 / (model.h * model.h);
    let diag = vec![Complex64::new(2.0 * inv - energy, 0.0); model.points];
    let tri = BorderedSolver::tridiagonal(&diag, Complex64::new(-inv, 0.0))?;
    let m = model.vacua;
    let mut z = vec![vec![ZERO; model.points]; m];
    for (v, zv) in z.iter_mut().enumerate() {
        let mut rhs = vec![ZERO; model.points];
        for &(site, w, c) in &model.border() {
            if w == v {
                rhs[site] += c;
            }
        }
        *zv = tri.tri_solve(&rhs);
    }
    let mut schur = DMatrix::<Complex64>::from_diagonal_element(m, m, Complex64::new(-energy, 0.0));
    for (r, site, c) in model.conj_border() {
        for s in 0..m {
            schur[(r, s)] -= c * z[s][site];
        }
    }
    let svd = schur.svd(false, true);
    let imin = svd.singular_values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let x0: Vec<Complex64> = v_t.row(imin).iter().map(|z| z.conj()).collect();
    let mut x1 = vec![ZERO; model.points];
    for (v, zv) in z.iter().enumerate() {
        for (a, b) in x1.iter_mut().zip(zv) {
            *a -= b * x0[v];
        }
    }
    let norm = (x0.iter().chain(&x1).map(|z| z.norm_sqr()).sum::<f64>()).sqrt();
    let lead = x0.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or(Complex64::new(1.0, 0.0));
    let phase = if lead.norm() > 0.0 { lead.conj() / lead.norm() } else { Complex64::new(1.0, 0.0) };
    let s = model.h.sqrt();
    Ok(DiscreteState {
        phi0: x0.iter().map(|z| z * phase / norm).collect(),
        phi1: x1.iter().map(|z| z * phase / (norm * s)).collect(),
    })
}

/// Implicit-midpoint (Crank–Nicolson) evolution under `e^{-iHt}`. The
/// bordered system `(1 + iτH)` is factorised once.
pub fn crank_nicolson_evolve(model: &LatticeModel, initial: &DiscreteState, t_final: f64, dt: f64) -> Result<DiscreteState> {
    if !(dt > 0.0 && t_final >= 0.0) {
        return Err(IbcError::InvalidParameter(format!("need dt > 0 and t ≥ 0, got dt = {dt}, t = {t_final}")));
    }
    if initial.phi1.len() != model.points || initial.phi0.len() != model.vacua {
        return Err(IbcError::InvalidParameter("state does not match the lattice".into()));
    }
    let steps = (t_final / dt - 1e-9).ceil().max(0.0) as usize;
    let s = model.h.sqrt();
    let mut psi1: Vec<Complex64> = initial.phi1.iter().map(|z| z * s).collect();
    let mut psi0 = initial.phi0.clone();
    if steps > 0 {
        let tau = 0.5 * t_final / steps as f64;
        let inv = 1.0 / (model.h * model.h);
        let diag = vec![Complex64::new(1.0, 2.0 * tau * inv); model.points];
        let p: Vec<_> = model.border().into_iter().map(|(a, b, c)| (a, b, I * tau * c)).collect();
        let q: Vec<_> = model.conj_border().into_iter().map(|(a, b, c)| (a, b, I * tau * c)).collect();
        let solver = BorderedSolver::new(&diag, Complex64::new(0.0, -tau * inv), &p, &q, &vec![Complex64::new(1.0, 0.0); model.vacua])?;
        for _ in 0..steps {
            let (h1, h0) = model.apply_scaled(&psi1, &psi0);
            let r1: Vec<Complex64> = psi1.iter().zip(&h1).map(|(a, b)| a - I * tau * b).collect();
            let r0: Vec<Complex64> = psi0.iter().zip(&h0).map(|(a, b)| a - I * tau * b).collect();
            let (x1, x0) = solver.solve(&r1, &r0)?;
            psi1 = x1;
            psi0 = x0;
        }
    }
    Ok(DiscreteState { phi0: psi0, phi1: psi1.into_iter().map(|z| z / s).collect() })
}

/// Right-hand side for the lattice resolvent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreenSource {
    /// Unit inhomogeneity in vacuum amplitude `v`.
    Vacuum(usize),
    /// Discrete delta `1/h` at interior index `j`.
    Particle(usize),
}

/// Lattice wavenumber with `4 sin²(qh/2)/h² = E` and `Im q ≥ 0`.
fn lattice_wavenumber(energy: Complex64, h: f64) -> Complex64 {
    let q = (crate::numerics::wavenumber(energy) * (h / 2.0)).asin() * (2.0 / h);
    if q.im < 0.0 {
        -q
    } else {
        q
    }
}

fn outgoing_system(model: &LatticeModel, energy: Complex64) -> Result<BorderedSolver> {
    let inv = 1.0 / (model.h * model.h);
    let q = lattice_wavenumber(energy, model.h);
    let mut diag = vec![energy - 2.0 * inv; model.points];
    // Ghost value φ_{N+1} = e^{iqh} φ_N at both ends.
    let ghost = (I * q * model.h).exp() * inv;
    diag[0] += ghost;
    let last = model.points - 1;
    diag[last] += ghost;
    let p: Vec<_> = model.border().into_iter().map(|(a, b, c)| (a, b, -c)).collect();
    let qb: Vec<_> = model.conj_border().into_iter().map(|(a, b, c)| (a, b, -c)).collect();
    BorderedSolver::new(&diag, Complex64::new(inv, 0.0), &p, &qb, &vec![energy; model.vacua])
}

/// Solution of `(E - H)φ = f` with outgoing (transparent) boundaries, the
/// lattice image of the Green function column at the source point.
pub fn lattice_green(model: &LatticeModel, energy: Complex64, source: GreenSource) -> Result<DiscreteState> {
    let solver = outgoing_system(model, energy)?;
    let mut r1 = vec![ZERO; model.points];
    let mut r0 = vec![ZERO; model.vacua];
    let s = model.h.sqrt();
    match source {
        GreenSource::Vacuum(v) if v < model.vacua => r0[v] = Complex64::new(1.0, 0.0),
        GreenSource::Particle(j) if j < model.points => r1[j] = Complex64::new(1.0 / s, 0.0),
        _ => return Err(IbcError::InvalidParameter(format!("{source:?} outside the lattice"))),
    }
    let (x1, x0) = solver.solve(&r1, &r0)?;
    Ok(DiscreteState { phi0: x0, phi1: x1.into_iter().map(|z| z / s).collect() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeScattering {
    pub transmission: Complex64,
    pub reflection: Complex64,
}

/// Stationary scattering of `e^{ikx}/√(2π)` on the lattice. The scattered
/// part solves `(E - H)φ_sc = (H - E)φ_inc`, which only has vacuum entries
/// because `e^{ikx}` is an exact lattice eigenfunction at
/// `E = 4 sin²(kh/2)/h²`.
pub fn lattice_scattering(sources: &[Source], variant: VacuumVariant, k: f64, h: f64, half_width: f64) -> Result<LatticeScattering> {
    if !(k > 0.0 && k * h < std::f64::consts::PI) {
        return Err(IbcError::InvalidParameter(format!("wavenumber {k} outside (0, π/h)")));
    }
    let model = LatticeModel::new(-half_width, half_width, h, sources, variant)?;
    let energy = (2.0 * (0.5 * k * model.h).sin() / model.h).powi(2);
    let solver = outgoing_system(&model, energy.into())?;
    let incident = |x: f64| (I * k * x).exp() / TAU.sqrt();
    let r1 = vec![ZERO; model.points];
    let mut r0 = vec![ZERO; model.vacua];
    for src in &model.sources {
        r0[src.vacuum] += src.coupling.conj() * incident(model.position(src.index));
    }
    let (x1, _) = solver.solve(&r1, &r0)?;
    let s = model.h.sqrt();
    let (first, last) = (0, model.points - 1);
    let right = x1[last] / s * TAU.sqrt() * (-I * k * model.position(last)).exp();
    let left = x1[first] / s * TAU.sqrt() * (I * k * model.position(first)).exp();
    Ok(LatticeScattering { transmission: 1.0 + right, reflection: left })
}
