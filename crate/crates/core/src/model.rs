//! Potential parameters and the initial state.
//!
//! Units are ħ = 2m = 1 throughout, so energies are `k²` and the intensity
//! `b` carries units of inverse length.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The purely absorptive shell `V(r) = -i b δ(r - a)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaShellPotential {
    b: f64,
    a: f64,
}

impl DeltaShellPotential {
    pub fn new(b: f64, a: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::domain("intensity must be positive"));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::domain("radius must be positive"));
        }
        Ok(Self { b, a })
    }

    /// Intensity `b`.
    pub fn intensity(&self) -> f64 {
        self.b
    }

    /// Shell radius `a`.
    pub fn radius(&self) -> f64 {
        self.a
    }

    /// Same radius, different intensity.
    pub fn with_intensity(&self, b: f64) -> Result<Self> {
        Self::new(b, self.a)
    }
}

/// `ψ(r, 0) = N_c sin(k_c r)` on `[0, a]`, zero outside.
///
/// Only the interior portion of the state is modeled; it is normalized to
/// unity on its own.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SineInitialState {
    k_c: f64,
    n_c: f64,
    a: f64,
}

impl SineInitialState {
    pub fn new(k_c: f64, a: f64) -> Result<Self> {
        let n_c = normalization_constant(k_c, a)?;
        Ok(Self { k_c, n_c, a })
    }

    /// Infinite-box eigenstate `q`: `k_c = qπ/a`, `N_c = √(2/a)`.
    pub fn box_state(q: u32, a: f64) -> Result<Self> {
        if q == 0 {
            return Err(Error::domain("box mode number must be a positive integer"));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::domain("radius must be positive"));
        }
        Ok(Self {
            k_c: f64::from(q) * PI / a,
            n_c: (2.0 / a).sqrt(),
            a,
        })
    }

    pub fn wavenumber(&self) -> f64 {
        self.k_c
    }

    pub fn norm_constant(&self) -> f64 {
        self.n_c
    }

    pub fn radius(&self) -> f64 {
        self.a
    }

    /// Amplitude at `r`.
    pub fn eval(&self, r: f64) -> f64 {
        initial_state_eval(self, r)
    }
}

/// `N_c = √(2/a) / [1 - sin(2 k_c a)/(2 k_c a)]^{1/2}`.
pub fn normalization_constant(k_c: f64, a: f64) -> Result<f64> {
    if !(k_c > 0.0 && k_c.is_finite()) {
        return Err(Error::domain("wavenumber k_c must be positive"));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain("radius must be positive"));
    }
    let x = 2.0 * k_c * a;
    Ok((2.0 / a).sqrt() / (1.0 - x.sin() / x).sqrt())
}

pub fn initial_state_eval(state: &SineInitialState, r: f64) -> f64 {
    if r > state.a {
        0.0
    } else {
        state.n_c * (state.k_c * r).sin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Composite Simpson rule, used only as an independent check.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn box_wavenumbers_give_sqrt_two() {
        for q in 1..8 {
            let n = normalization_constant(f64::from(q) * PI, 1.0).unwrap();
            assert_relative_eq!(n, 2f64.sqrt(), epsilon = 1e-12);
        }
        let n = normalization_constant(4.5 * PI, 1.0).unwrap();
        assert_relative_eq!(n, 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn unit_wavenumber_matches_quadrature() {
        // Frozen from 1/sqrt(∫₀¹ sin² r dr) evaluated by adaptive quadrature.
        let expected = 1.915_035_489_788_286_4;
        let n = normalization_constant(1.0, 1.0).unwrap();
        assert_relative_eq!(n, expected, epsilon = 1e-12);
        let norm = simpson(|r| (n * r.sin()).powi(2), 0.0, 1.0, 2000);
        assert_relative_eq!(norm, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn rejects_non_positive_parameters() {
        assert!(normalization_constant(0.0, 1.0).is_err());
        assert!(normalization_constant(1.0, -1.0).is_err());
        assert!(DeltaShellPotential::new(-1.0, 1.0).is_err());
        assert!(DeltaShellPotential::new(1.0, 0.0).is_err());
        assert!(SineInitialState::box_state(0, 1.0).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let a = 1.3;
        let s = SineInitialState::box_state(1, a).unwrap();
        assert_eq!(s.eval(0.0), 0.0);
        assert_relative_eq!(s.eval(a / 2.0), (2.0 / a).sqrt(), epsilon = 1e-14);
        assert_eq!(s.eval(1.5 * a), 0.0);
    }

    #[test]
    fn box_state_agrees_with_generic_constructor() {
        for q in 1..7 {
            let a = 0.7;
            let b = SineInitialState::box_state(q, a).unwrap();
            let g = SineInitialState::new(f64::from(q) * PI / a, a).unwrap();
            for i in 0..=40 {
                let r = 1.2 * a * f64::from(i) / 40.0;
                assert_relative_eq!(b.eval(r), g.eval(r), epsilon = 1e-12);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn every_sine_state_is_normalized(k_c in 0.05f64..20.0, a in 0.2f64..3.0) {
            let s = SineInitialState::new(k_c, a).unwrap();
            // sin² has a closed-form integral; Simpson with many panels is the check.
            let n = 20_000;
            let norm = simpson(|r| s.eval(r).powi(2), 0.0, a, n);
            proptest::prop_assert!((norm - 1.0).abs() < 1e-10);
        }
    }
}
