use num_complex::Complex64;

use crate::{IbcError, Result};

// Gauss–Kronrod 7/15 nodes on [-1, 1] (non-negative half) and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite { a: f64, b: f64 },
    /// `[a, ∞)`
    UpperInfinite { a: f64 },
    /// `(-∞, b]`
    LowerInfinite { b: f64 },
    WholeLine,
}

#[derive(Debug, Clone)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Points where the integrand has kinks or other non-smoothness; the
    /// domain is split there before adaptation starts.
    pub breakpoints: Vec<f64>,
}

impl QuadOptions {
    pub fn new(abs_tol: f64) -> Self {
        Self { abs_tol, rel_tol: 0.0, max_intervals: 4000, breakpoints: Vec::new() }
    }

    pub fn with_breakpoints(mut self, points: &[f64]) -> Self {
        self.breakpoints = points.to_vec();
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    /// Estimated absolute error.
    pub error: f64,
    pub evaluations: usize,
}

/// Integrates a complex-valued function to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, domain: Domain, tol: f64) -> Result<QuadResult> {
    integrate_with(f, domain, &QuadOptions::new(tol))
}

/// Globally adaptive Gauss–Kronrod (7, 15) quadrature.
///
/// Infinite ranges are mapped to `[0, 1)` by `x = a + t/(1 - t)`. Subintervals
/// with the largest error estimate are bisected until the total estimate is
/// below `max(abs_tol, rel_tol·|I|)`. If the interval budget runs out the
/// best estimate is returned inside [`IbcError::QuadratureNotConverged`].
pub fn integrate_with<F: Fn(f64) -> Complex64>(f: F, domain: Domain, opts: &QuadOptions) -> Result<QuadResult> {
    let pieces = split_domain(domain, &opts.breakpoints)?;
    let mut intervals: Vec<Interval> = Vec::new();
    let mut evaluations = 0;
    for piece in &pieces {
        intervals.push(piece.evaluate(&f, piece.lo(), piece.hi()));
        evaluations += 15;
    }

    loop {
        let value: Complex64 = intervals.iter().map(|iv| iv.value).sum();
        let error: f64 = intervals.iter().map(|iv| iv.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        if error <= target {
            return Ok(QuadResult { value, error, evaluations });
        }
        if intervals.len() >= opts.max_intervals {
            return Err(IbcError::QuadratureNotConverged { estimate: value, error });
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i)
            .expect("at least one interval");
        let iv = intervals.swap_remove(worst);
        let mid = 0.5 * (iv.lo + iv.hi);
        if mid <= iv.lo || mid >= iv.hi {
            // Interval cannot be split further; accept its estimate.
            return Err(IbcError::QuadratureNotConverged { estimate: value, error });
        }
        let piece = iv.piece;
        intervals.push(piece.evaluate(&f, iv.lo, mid));
        intervals.push(piece.evaluate(&f, mid, iv.hi));
        evaluations += 30;
    }
}

/// A piece of the domain in its own integration variable.
#[derive(Debug, Clone, Copy)]
enum Piece {
    Finite { a: f64, b: f64 },
    /// `x = a + t/(1-t)`, `t ∈ [0, 1)`
    Upper { a: f64 },
    /// `x = b - t/(1-t)`, `t ∈ [0, 1)`
    Lower { b: f64 },
}

impl Piece {
    fn lo(&self) -> f64 {
        match *self {
            Piece::Finite { a, .. } => a,
            _ => 0.0,
        }
    }

    fn hi(&self) -> f64 {
        match *self {
            Piece::Finite { b, .. } => b,
            _ => 1.0,
        }
    }

    fn mapped<F: Fn(f64) -> Complex64>(&self, f: &F, t: f64) -> Complex64 {
        match *self {
            Piece::Finite { .. } => f(t),
            Piece::Upper { a } => {
                let s = 1.0 - t;
                if s <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                f(a + t / s) / (s * s)
            }
            Piece::Lower { b } => {
                let s = 1.0 - t;
                if s <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                f(b - t / s) / (s * s)
            }
        }
    }

    fn evaluate<F: Fn(f64) -> Complex64>(self, f: &F, lo: f64, hi: f64) -> Interval {
        let centre = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let fc = self.mapped(f, centre);
        let mut kronrod = fc * WGK[7];
        let mut gauss = fc * WG[3];
        let mut abs_sum = fc.norm() * WGK[7];
        for j in 0..7 {
            let dx = half * XGK[j];
            let f1 = self.mapped(f, centre - dx);
            let f2 = self.mapped(f, centre + dx);
            kronrod += (f1 + f2) * WGK[j];
            abs_sum += (f1.norm() + f2.norm()) * WGK[j];
            if j % 2 == 1 {
                gauss += (f1 + f2) * WG[j / 2];
            }
        }
        let value = kronrod * half;
        let raw = ((kronrod - gauss) * half).norm();
        let roundoff = 50.0 * f64::EPSILON * abs_sum * half.abs();
        let error = if raw.is_finite() { raw.max(roundoff) } else { f64::INFINITY };
        Interval { piece: self, lo, hi, value, error }
    }
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    piece: Piece,
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
}

fn split_domain(domain: Domain, breakpoints: &[f64]) -> Result<Vec<Piece>> {
    let (lo, hi) = match domain {
        Domain::Finite { a, b } => {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(IbcError::InvalidParameter(format!("bad integration range [{a}, {b}]")));
            }
            (Some(a), Some(b))
        }
        Domain::UpperInfinite { a } => (Some(a), None),
        Domain::LowerInfinite { b } => (None, Some(b)),
        Domain::WholeLine => (None, None),
    };
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|p| p.is_finite() && lo.is_none_or(|a| *p > a) && hi.is_none_or(|b| *p < b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    if lo.is_none() && hi.is_none() && cuts.is_empty() {
        cuts.push(0.0);
    }

    let mut nodes: Vec<f64> = Vec::new();
    nodes.extend(lo);
    nodes.extend(cuts);
    nodes.extend(hi);

    let mut pieces = Vec::new();
    if lo.is_none() {
        pieces.push(Piece::Lower { b: nodes[0] });
    }
    for w in nodes.windows(2) {
        pieces.push(Piece::Finite { a: w[0], b: w[1] });
    }
    if hi.is_none() {
        pieces.push(Piece::Upper { a: *nodes.last().expect("non-empty") });
    }
    Ok(pieces)
}

/// Extrapolates samples `(ε_i, I(ε_i))` to `ε = 0` with the Lagrange
/// polynomial through all points.
pub fn extrapolate_to_zero(samples: &[(f64, Complex64)]) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for (i, &(ei, vi)) in samples.iter().enumerate() {
        let mut weight = 1.0;
        for (j, &(ej, _)) in samples.iter().enumerate() {
            if i != j {
                weight *= ej / (ej - ei);
            }
        }
        total += vi * weight;
    }
    total
}
