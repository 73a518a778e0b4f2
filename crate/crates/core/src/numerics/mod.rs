//! Numerical kernels shared by the physics modules.

mod erf;
mod quad;
mod roots;

pub use erf::{erfc, erfcx};
pub use quad::{extrapolate_to_zero, integrate, integrate_with, Domain, QuadOptions, QuadResult};
pub use roots::{golden_minimize, solve_root, Bracket, MAX_ROOT_ITERATIONS};

/// `sin(z)/z`, with the removable singularity filled in.
pub fn sinc(z: num_complex::Complex64) -> num_complex::Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// `sin(x)/x` for real arguments.
pub fn sinc_real(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `sin(√E·len)/(√E·len)` continued to `E ≤ 0` (where it becomes `sinh`).
/// Entire in `E` and real for real `E`.
pub fn sinc_energy(energy: f64, len: f64) -> f64 {
    if energy >= 0.0 {
        sinc_real(energy.sqrt() * len)
    } else {
        let u = (-energy).sqrt() * len;
        if u < 1e-4 {
            1.0 + u * u / 6.0 + u.powi(4) / 120.0
        } else {
            u.sinh() / u
        }
    }
}

/// Principal square root of a complex energy with `Im k ≥ 0`; the physical
/// sheet for outgoing waves.
pub fn wavenumber(energy: num_complex::Complex64) -> num_complex::Complex64 {
    let k = energy.sqrt();
    if k.im < 0.0 {
        -k
    } else {
        k
    }
}
