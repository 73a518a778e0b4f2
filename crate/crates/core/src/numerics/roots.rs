use crate::{IbcError, Result};

/// Iteration cap for [`solve_root`].
pub const MAX_ROOT_ITERATIONS: usize = 200;

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(IbcError::InvalidParameter(format!("bad bracket [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Finds a root of `f` inside `bracket`.
///
/// Safeguarded Newton iteration: a Newton step with a central-difference
/// derivative is taken when it lands inside the current bracket and shrinks
/// it fast enough, otherwise the bracket is bisected. On success the sign
/// change is confined to an interval of width at most `tol` (or a few ulps,
/// if `tol` is below machine resolution) around the returned point.
pub fn solve_root<F: Fn(f64) -> f64>(f: F, bracket: Bracket, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(IbcError::NoSignChange { lo, hi });
    }

    let mut x = 0.5 * (lo + hi);
    // Width two iterations ago; Newton is only trusted while it keeps
    // halving the bracket at least as fast as bisection would.
    let mut widths = [hi - lo; 2];
    for _ in 0..MAX_ROOT_ITERATIONS {
        let floor = tol.max(4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE));
        if hi - lo <= floor {
            return Ok(0.5 * (lo + hi));
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }

        let delta = (1e-7 * (hi - lo)).max(8.0 * f64::EPSILON * x.abs().max(1e-300));
        let slope = (f(x + delta) - f(x - delta)) / (2.0 * delta);
        let newton = x - fx / slope;
        let width = hi - lo;
        let progressing = width <= 0.5 * widths[0];
        widths = [widths[1], width];
        if slope.is_finite() && slope != 0.0 && newton > lo && newton < hi && progressing {
            if (newton - x).abs() < 0.5 * floor {
                // Confirm the sign change in a tolerance-sized window.
                let a = (newton - 0.5 * floor).max(lo);
                let b = (newton + 0.5 * floor).min(hi);
                let (fa, fb) = (f(a), f(b));
                if fa == 0.0 {
                    return Ok(a);
                }
                if fb == 0.0 || fa.signum() != fb.signum() {
                    return Ok(newton);
                }
                if fa.signum() == flo.signum() {
                    lo = a;
                    flo = fa;
                } else {
                    hi = b;
                }
                x = 0.5 * (lo + hi);
            } else {
                x = newton;
            }
        } else {
            x = 0.5 * (lo + hi);
        }
    }
    Err(IbcError::RootNotConverged { iterations: MAX_ROOT_ITERATIONS, best: 0.5 * (lo + hi) })
}

/// Golden-section minimisation of a unimodal function on `[a, b]`.
/// Returns `(x_min, f(x_min))`.
pub fn golden_minimize<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..300 {
        if (b - a).abs() <= tol.max(4.0 * f64::EPSILON * c.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
