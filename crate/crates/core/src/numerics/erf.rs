use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64;

use crate::{IbcError, Result};

/// Complementary error function on the whole complex plane.
///
/// Backed by the Faddeeva-function implementation of the `errorfunctions`
/// crate. Returns [`IbcError::Overflow`] when the value is not representable,
/// which happens for large `|z|` in the sectors `3π/4 < |arg z| < π`
/// (approached from the left half plane).
pub fn erfc(z: Complex64) -> Result<Complex64> {
    finite(z, z.erfc())
}

/// Scaled complementary error function `e^{z²} erfc(z)`.
///
/// Bounded in the right half plane and along `|arg z| ≤ 3π/4`; use this
/// whenever an `erfc` is multiplied by a large Gaussian factor.
pub fn erfcx(z: Complex64) -> Result<Complex64> {
    finite(z, z.erfcx())
}

fn finite(z: Complex64, w: Complex64) -> Result<Complex64> {
    if w.re.is_finite() && w.im.is_finite() {
        Ok(w)
    } else {
        Err(IbcError::Overflow(z))
    }
}
