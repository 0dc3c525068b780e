//! Expansion-free reference values.
//!
//! The outgoing Green's function of the shell is known in closed form,
//!
//! ```text
//! G⁺(r, r'; k) = −φ(k, r_<) f(k, r_>) / F(k)
//! ```
//!
//! with the regular solution `φ`, the Jost solution `f` and the Jost function
//! `F(k) = f(k, 0)`. The propagator follows by rotating the energy contour to
//! `k = γz`, `γ = e^{−iπ/4}`, which picks up the proper poles as residues:
//!
//! ```text
//! g(r, r'; t) = Σ_{p≥1} u_p(r) u_p(r') e^{−ik_p² t} + (1/π) ∫ G⁺(r, r'; γz) e^{−z² t} z dz
//! ```
//!
//! The `z` integral is cut at `|z| = √(Λ/t)`, where the Gaussian has fallen
//! below `e^{−Λ}`. The residue sum runs over every proper pole in the sector,
//! not just the ones in a given basis: poles are added until `e^{−Γ_p t}`
//! drops under a floor, which at short times means thousands of them. Every exponential is evaluated in a rescaled form whose
//! modulus stays at most one, so the rotated ray can be followed to the large
//! `|z|` that short times require.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmath::{exp_scaled, expm1, I};
use crate::error::{Error, Result};
use crate::expansion::{overlap_coefficient, validate_grid, AmplitudeTerms, Expansion, Source, SurvivalSeries};
use crate::model::{DeltaShellPotential, SineInitialState};
use crate::pole_solver::find_poles;
use crate::quadrature::{integrate_with_breaks, QuadOptions};
use crate::resonant_basis::{ResonantBasis, ResonantState};
use crate::C64;

/// `|F(k)|` below which `k` is treated as a pole.
pub const NEAR_POLE: f64 = 1e-13;

/// `γ = e^{−iπ/4}`.
pub fn gamma() -> C64 {
    C64::from_polar(1.0, -PI / 4.0)
}

/// `F(k) = 1 − (b/2k)(e^{2ika} − 1)`, continued to `F(0) = 1 − iba`.
pub fn jost_function(k: C64, pot: &DeltaShellPotential) -> C64 {
    let (b, a) = (pot.intensity(), pot.radius());
    if k == C64::new(0.0, 0.0) {
        return C64::new(1.0, -b * a);
    }
    1.0 - b / (2.0 * k) * expm1(2.0 * I * k * a)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenEvaluation {
    pub r: f64,
    pub r_prime: f64,
    pub k: C64,
    pub value: C64,
}

impl GreenEvaluation {
    pub fn new(r: f64, r_prime: f64, k: C64, pot: &DeltaShellPotential) -> Result<Self> {
        Ok(Self {
            r,
            r_prime,
            k,
            value: green_function(r, r_prime, k, pot)?,
        })
    }
}

/// `sin(k x) e^{ik y}` as a difference of two exponentials.
fn sin_exp(k: C64, x: f64, y: f64) -> C64 {
    ((I * k * (y + x)).exp() - (I * k * (y - x)).exp()) / (2.0 * I)
}

/// The outgoing Green's function.
pub fn green_function(r: f64, r_prime: f64, k: C64, pot: &DeltaShellPotential) -> Result<C64> {
    if !(r >= 0.0 && r_prime >= 0.0 && r.is_finite() && r_prime.is_finite()) {
        return Err(Error::domain("Green's function needs finite r, r' ≥ 0"));
    }
    if k == C64::new(0.0, 0.0) {
        return Err(Error::domain("Green's function is evaluated for k ≠ 0"));
    }
    let jost = jost_function(k, pot);
    if jost.norm() < NEAR_POLE {
        return Err(Error::NearPole { k, jost: jost.norm() });
    }
    let (b, a) = (pot.intensity(), pot.radius());
    let (lo, hi) = if r <= r_prime { (r, r_prime) } else { (r_prime, r) };
    let beta = b / (2.0 * k);
    if hi > a {
        let phi = if lo <= a {
            (k * lo).sin() / k
        } else {
            let ka = k * a;
            let d = k * (lo - a);
            ka.sin() / k * d.cos() + (ka.cos() - I * b * ka.sin() / k) * d.sin() / k
        };
        return Ok(-phi * (I * k * hi).exp() / jost);
    }
    // both points inside: pick the normalization that keeps every factor bounded
    let value = if k.im <= 0.0 {
        let num = (1.0 + beta) * sin_exp(k, lo, hi - 2.0 * a) - beta * sin_exp(k, lo, -hi);
        let den = (1.0 + beta) * (-2.0 * I * k * a).exp() - beta;
        -num / (k * den)
    } else {
        let num = (1.0 + beta) * sin_exp(k, lo, hi) - beta * sin_exp(k, lo, 2.0 * a - hi);
        -num / (k * jost)
    };
    Ok(value)
}

/// `(1/2πi) ∮ G⁺ dk` on a circle, by the trapezoid rule (spectrally accurate
/// for analytic integrands).
pub fn numerical_residue(
    r: f64,
    r_prime: f64,
    center: C64,
    radius: f64,
    points: usize,
    pot: &DeltaShellPotential,
) -> Result<C64> {
    if !(radius > 0.0) || points < 4 {
        return Err(Error::domain("residue contour needs a positive radius and at least 4 points"));
    }
    let mut sum = C64::new(0.0, 0.0);
    for j in 0..points {
        let w = C64::from_polar(radius, 2.0 * PI * j as f64 / points as f64);
        // dk = i w dθ, so the 1/(2πi) leaves w/points
        sum += green_function(r, r_prime, center + w, pot)? * w;
    }
    Ok(sum / points as f64)
}

/// `⟨ψ|G⁺(k)|ψ⟩` for a sine initial state, in closed form.
///
/// Solving `(k² − H)χ = ψ` inside the shell gives
/// `⟨ψ|G⁺|ψ⟩ = 1/D + N_c² (k_c cos k_c a − i(k + b) sin k_c a) I(k) / (D Δ(k))` with
/// `D = k² − k_c²`, `I = ∫₀ᵃ sin(k_c r) sin(kr) dr · D` and `Δ = −k e^{−ika} F(k)`.
/// Both `I` and `Δ` are computed with `e^{±ika}` scaled by `e^{−|Im ka|}`.
pub fn psi_green_psi(k: C64, init: &SineInitialState, pot: &DeltaShellPotential) -> Result<C64> {
    if k == C64::new(0.0, 0.0) {
        return Err(Error::domain("⟨ψ|G⁺|ψ⟩ is evaluated for k ≠ 0"));
    }
    let (b, a) = (pot.intensity(), pot.radius());
    let (kc, n) = (init.wavenumber(), init.norm_constant());
    let d = k * k - kc * kc;
    if d.norm() < 1e-12 * kc * kc {
        return Err(Error::domain("⟨ψ|G⁺|ψ⟩ closed form is singular at k² = k_c²"));
    }
    let (sc, cc) = (kc * a).sin_cos();
    let ka = k * a;
    let ep = exp_scaled(I * ka);
    let em = exp_scaled(-I * ka);
    let sin_s = (ep - em) / (2.0 * I);
    let cos_s = (ep + em) / 2.0;
    let delta = -k * em + I * b * sin_s;
    if delta.norm() < NEAR_POLE * k.norm() {
        return Err(Error::NearPole { k, jost: jost_function(k, pot).norm() });
    }
    let overlap = kc * sin_s * cc - k * sc * cos_s;
    Ok(1.0 / d + n * n * (kc * cc - I * (k + b) * sc) / d * overlap / (d * delta))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleOptions {
    /// Cut the rotated integral where `z² t = Λ`.
    pub lambda: f64,
    /// Smallest admissible time.
    pub t_min: f64,
    /// Largest accepted quadrature error estimate.
    pub fail_tol: f64,
    pub quad: QuadOptions,
    /// Initial uniform panels on `[0, √(Λ/t)]`.
    pub panels: usize,
    /// Residues are summed until `e^{−Γ_p t}` falls below this.
    pub residue_floor: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            lambda: 40.0,
            t_min: 1e-4,
            fail_tol: 1e-9,
            quad: QuadOptions {
                abs_tol: 1e-13,
                rel_tol: 1e-11,
                max_intervals: 20_000,
            },
            panels: 32,
            residue_floor: 1e-12,
        }
    }
}

impl OracleOptions {
    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= self.t_min && t.is_finite()) {
            return Err(Error::domain(format!("oracle needs t ≥ t_min = {}", self.t_min)));
        }
        Ok(())
    }

    /// `(1/π) ∫_{−L}^{L} h(γz) e^{−z²t} z dz`, folded onto `[0, L]`.
    fn rotated_integral<H>(&self, h: H, t: f64) -> Result<C64>
    where
        H: Fn(C64) -> Result<C64> + Sync,
    {
        let l = (self.lambda / t).sqrt();
        let g = gamma();
        let breaks: Vec<f64> = (1..self.panels).map(|i| l * i as f64 / self.panels as f64).collect();
        // the integrand closure cannot return errors, so the first one is parked here
        let failure = std::sync::Mutex::new(None);
        let f = |z: f64| {
            let k = g * z;
            match (h(k), h(-k)) {
                (Ok(p), Ok(m)) => (p - m) * (-z * z * t).exp() * z / PI,
                (Err(e), _) | (_, Err(e)) => {
                    failure.lock().expect("unpoisoned").get_or_insert(e);
                    C64::new(0.0, 0.0)
                }
            }
        };
        let result = integrate_with_breaks(f, 0.0, l, &breaks, &self.quad);
        if let Some(e) = failure.into_inner().expect("unpoisoned") {
            return Err(e);
        }
        result.within(self.fail_tol)
    }

    fn settled(&self, state: &ResonantState, t: f64) -> bool {
        state.pole.width() * t >= -self.residue_floor.ln()
    }
}

/// Proper states for the residue sum at times `≥ t`: at least the first `n`
/// of `basis`, extended by fresh poles until the last one has decayed below
/// the residue floor. The second value is how many come from `basis`.
fn residue_states(basis: &ResonantBasis, n: usize, t: f64, opts: &OracleOptions) -> Result<(Vec<ResonantState>, usize)> {
    if n == 0 || n > basis.proper.len() {
        return Err(Error::domain(format!("{n} proper poles requested, {} available", basis.proper.len())));
    }
    let mut states = basis.proper.clone();
    let mut m = n;
    while !opts.settled(&states[m - 1], t) {
        m += 1;
        if m > states.len() {
            let wanted = estimated_count(&basis.potential, t, opts).max(states.len() + states.len() / 4);
            states = ResonantBasis::new(&find_poles(&basis.potential, wanted, 1)?)?.proper;
        }
    }
    states.truncate(m);
    Ok((states, m.min(basis.proper.len())))
}

/// Proper poles needed at time `t`, from `α_p ≈ pπ/a` and `e^{2β_p a} ≈ 2α_p/b`.
fn estimated_count(pot: &DeltaShellPotential, t: f64, opts: &OracleOptions) -> usize {
    let (b, a) = (pot.intensity(), pot.radius());
    let cutoff = -opts.residue_floor.ln();
    let width = |p: f64| {
        let alpha = p * PI / a;
        4.0 * alpha * ((2.0 * alpha / b).ln() / (2.0 * a)).max(0.0)
    };
    let mut p = 1.0;
    while width(p) * t < cutoff {
        p *= 1.1;
    }
    p.ceil() as usize + 1
}

fn residue_weights(expansion: &Expansion, states: &[ResonantState], reused: usize) -> Result<Vec<C64>> {
    let mut w: Vec<C64> = expansion.overlaps.proper[..reused].iter().map(|o| o.weight()).collect();
    let fresh = states[reused..]
        .par_iter()
        .map(|s| overlap_coefficient(s, &expansion.init).map(|o| o.weight()))
        .collect::<Result<Vec<C64>>>()?;
    w.extend(fresh);
    Ok(w)
}

fn residue_sum(states: &[ResonantState], weights: &[C64], t: f64) -> C64 {
    states
        .iter()
        .zip(weights)
        .fold(C64::new(0.0, 0.0), |acc, (s, w)| acc + w * (-I * s.k() * s.k() * t).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorTerms {
    pub total: C64,
    /// Residue sum over the proper poles.
    pub residues: C64,
    /// Rotated-contour integral.
    pub background: C64,
}

/// `g(r, r'; t)` for `0 ≤ r, r' ≤ a`, with at least `n` residues.
pub fn propagator(
    r: f64,
    r_prime: f64,
    t: f64,
    basis: &ResonantBasis,
    n: usize,
    opts: &OracleOptions,
) -> Result<PropagatorTerms> {
    let pot = basis.potential;
    let a = pot.radius();
    if !((0.0..=a).contains(&r) && (0.0..=a).contains(&r_prime)) {
        return Err(Error::domain("the propagator oracle covers 0 ≤ r, r' ≤ a"));
    }
    opts.check_time(t)?;
    let (states, _) = residue_states(basis, n, t, opts)?;
    let weights: Vec<C64> = states.iter().map(|s| s.eval(r) * s.eval(r_prime)).collect();
    let residues = residue_sum(&states, &weights, t);
    let background = opts.rotated_integral(|k| green_function(r, r_prime, k, &pot), t)?;
    Ok(PropagatorTerms {
        total: residues + background,
        residues,
        background,
    })
}

/// `A(t) = ⟨ψ|g(t)|ψ⟩` from the proper-pole residues (at least the first
/// `n`) and the rotated-contour integral of `⟨ψ|G⁺|ψ⟩`.
///
/// `exponential` carries the residue sum and `tail` the background integral.
pub fn survival_amplitude_exact(expansion: &Expansion, t: f64, n: usize, opts: &OracleOptions) -> Result<AmplitudeTerms> {
    survival_series_exact(expansion, &[t], n, opts).map(|s| AmplitudeTerms {
        total: s.amplitude[0],
        exponential: s.exponential[0],
        tail: s.tail[0],
    })
}

/// Exact amplitude on a time grid, evaluated in parallel over `t`. The
/// residue set is built once, for the earliest time.
pub fn survival_series_exact(expansion: &Expansion, t: &[f64], n: usize, opts: &OracleOptions) -> Result<SurvivalSeries> {
    validate_grid(t)?;
    let t_first = t.iter().copied().fold(f64::INFINITY, f64::min);
    opts.check_time(t_first)?;
    if n > expansion.overlaps.proper.len() {
        return Err(Error::domain(format!("{n} proper poles requested, {} available", expansion.overlaps.proper.len())));
    }
    let pot = expansion.basis.potential;
    let (states, reused) = residue_states(&expansion.basis, n, t_first, opts)?;
    let weights = residue_weights(expansion, &states, reused)?;
    let terms = t
        .par_iter()
        .map(|&x| {
            let exponential = residue_sum(&states, &weights, x);
            let tail = opts.rotated_integral(|k| psi_green_psi(k, &expansion.init, &pot), x)?;
            Ok(AmplitudeTerms {
                total: exponential + tail,
                exponential,
                tail,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurvivalSeries::from_terms(Source::Oracle, expansion.lifetime()?, t.to_vec(), terms))
}
