//! Small complex helpers that num-complex does not provide.

use crate::C64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// `e^{z} - 1` without cancellation for small `|z|`.
pub(crate) fn expm1(z: C64) -> C64 {
    if z.norm() < 1e-3 {
        // Horner form of z + z²/2 + z³/6 + z⁴/24 + z⁵/120
        z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0))))
    } else {
        z.exp() - 1.0
    }
}

/// `e^{z - |Re z|}`: an exponential rescaled so its modulus never exceeds one.
pub(crate) fn exp_scaled(z: C64) -> C64 {
    C64::new(z.re - z.re.abs(), z.im).exp()
}
