//! Resonant expansion of the survival amplitude.
//!
//! With `C_p = ∫₀ᵃ ψ(r,0) u_p(r) dr` the amplitude reads
//!
//! ```text
//! A(t) = Σ_{p≥1} C_p C̄_p e^{-ik_p² t} − η Σ_{p≠0} C_p C̄_p /(2k_p³) · t^{-3/2}
//! ```
//!
//! with `η = (4πi)^{-1/2}`. The first sum runs over proper poles only; the
//! power-law tail collects both families. All sums run in ascending `p` with
//! the improper member of each pair first, so serial and parallel runs agree
//! bitwise.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmath::I;
use crate::error::{Error, Result};
use crate::model::{DeltaShellPotential, SineInitialState};
use crate::pole_solver::{find_poles, Pole};
use crate::quadrature::{integrate, QuadOptions};
use crate::resonant_basis::{ResonantBasis, ResonantState};
use crate::C64;

/// Default number of pole pairs kept in a series.
pub const DEFAULT_PAIRS: usize = 40;

/// Relative distance `|k_p² − k_c²|/k_c²` below which the closed-form overlap
/// is replaced by quadrature.
pub const DEGENERATE_OVERLAP: f64 = 1e-6;

/// `η = (4πi)^{-1/2} = e^{-iπ/4}/(2√π)`.
pub fn eta() -> C64 {
    C64::from_polar(0.5 / PI.sqrt(), -PI / 4.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub index: i32,
    /// `C_p = ∫ ψ u_p`.
    pub c: C64,
    /// `C̄_p = ∫ ψ* u_p`.
    pub c_bar: C64,
    pub provenance: Provenance,
}

impl Overlap {
    /// `C_p C̄_p`, the weight of pole `p` in the survival amplitude.
    pub fn weight(&self) -> C64 {
        self.c * self.c_bar
    }
}

/// Overlaps of one initial state with both pole families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapSet {
    pub proper: Vec<Overlap>,
    pub improper: Vec<Overlap>,
}

impl OverlapSet {
    pub fn new(basis: &ResonantBasis, init: &SineInitialState) -> Result<Self> {
        let build = |states: &[ResonantState]| -> Result<Vec<Overlap>> {
            states.iter().map(|s| overlap_coefficient(s, init)).collect()
        };
        Ok(Self {
            proper: build(&basis.proper)?,
            improper: build(&basis.improper)?,
        })
    }

    pub fn get(&self, index: i32) -> Option<&Overlap> {
        match index {
            0 => None,
            i if i > 0 => self.proper.get(i as usize - 1),
            i => self.improper.get(i.unsigned_abs() as usize - 1),
        }
    }

    pub fn pairs(&self) -> usize {
        self.proper.len().min(self.improper.len())
    }
}

/// `C_p` for a sine initial state. The initial state is real, so `C̄_p = C_p`.
pub fn overlap_coefficient(state: &ResonantState, init: &SineInitialState) -> Result<Overlap> {
    let a = init.radius();
    let kc = init.wavenumber();
    let kp = state.k();
    let d = kp * kp - kc * kc;
    let (c, provenance) = if d.norm() < DEGENERATE_OVERLAP * kc * kc {
        let f = |r: f64| init.eval(r) * state.eval(r);
        let opts = QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            ..QuadOptions::default()
        };
        (integrate(f, 0.0, a, &opts).within(1e-10)?, Provenance::Quadrature)
    } else {
        let (skc, ckc) = (kc * a).sin_cos();
        let bracket = -kp * skc * (kp * a).cos() + kc * (kp * a).sin() * ckc;
        (init.norm_constant() * state.amplitude * bracket / d, Provenance::ClosedForm)
    };
    Ok(Overlap {
        index: state.index(),
        c,
        c_bar: c,
        provenance,
    })
}

/// `(1/2) Σ_{p=1..n} [C_p C̄_p + C_{-p} C̄_{-p}]`, which tends to one.
pub fn closure_sum(coeffs: &OverlapSet, n: usize) -> Result<C64> {
    if n > coeffs.pairs() {
        return Err(Error::domain(format!("closure sum needs {n} pairs, {} available", coeffs.pairs())));
    }
    let sum = coeffs
        .improper
        .iter()
        .zip(&coeffs.proper)
        .take(n)
        .fold(C64::new(0.0, 0.0), |acc, (m, p)| acc + m.weight() + p.weight());
    Ok(0.5 * sum)
}

/// Resonant expansion of the propagator `g(r, r'; t)` for `r, r' ≤ a`, `t > 0`.
pub fn resonant_propagator(basis: &ResonantBasis, r: f64, r_prime: f64, t: f64, n: usize) -> Result<C64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("the resonant expansion needs t > 0"));
    }
    // reuses the domain checks of the sum rules
    crate::resonant_basis::sum_rule_defect(basis, r, r_prime, -1, n)?;
    let mut exponential = C64::new(0.0, 0.0);
    let mut tail = C64::new(0.0, 0.0);
    for (m, p) in basis.iter_pairs(n) {
        let (wm, wp) = (m.eval(r) * m.eval(r_prime), p.eval(r) * p.eval(r_prime));
        exponential += wp * (-I * p.k() * p.k() * t).exp();
        tail += wm / (2.0 * m.k().powi(3)) + wp / (2.0 * p.k().powi(3));
    }
    Ok(exponential - eta() * tail * t.powf(-1.5))
}

/// `τ = 1/Γ_min` over the proper poles.
pub fn lifetime(poles: &[Pole]) -> Result<f64> {
    poles
        .iter()
        .filter(|p| p.is_proper())
        .map(Pole::width)
        .min_by(f64::total_cmp)
        .map(f64::recip)
        .ok_or_else(|| Error::domain("lifetime needs at least one proper pole"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTerms {
    pub total: C64,
    pub exponential: C64,
    pub tail: C64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Expansion,
    Oracle,
}

/// Survival amplitude on a time grid.
///
/// For oracle series `exponential` holds the residue sum and `tail` the
/// rotated-contour background.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalSeries {
    pub source: Source,
    pub tau: f64,
    pub t: Vec<f64>,
    pub amplitude: Vec<C64>,
    pub exponential: Vec<C64>,
    pub tail: Vec<C64>,
}

impl SurvivalSeries {
    pub fn from_terms(source: Source, tau: f64, t: Vec<f64>, terms: Vec<AmplitudeTerms>) -> Self {
        Self {
            source,
            tau,
            t,
            amplitude: terms.iter().map(|x| x.total).collect(),
            exponential: terms.iter().map(|x| x.exponential).collect(),
            tail: terms.iter().map(|x| x.tail).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `S(t) = |A(t)|²`.
    pub fn survival(&self) -> Vec<f64> {
        self.amplitude.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn survival_exponential(&self) -> Vec<f64> {
        self.exponential.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn survival_tail(&self) -> Vec<f64> {
        self.tail.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Check that a time grid is nonempty, positive and strictly increasing.
pub fn validate_grid(t: &[f64]) -> Result<()> {
    if t.is_empty() {
        return Err(Error::domain("time grid is empty"));
    }
    if !t.iter().all(|&x| x > 0.0 && x.is_finite()) {
        return Err(Error::domain("time grid must be positive"));
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("time grid must be strictly increasing"));
    }
    Ok(())
}

/// Everything needed to evaluate the resonant expansion for one initial state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub init: SineInitialState,
    pub basis: ResonantBasis,
    pub overlaps: OverlapSet,
    pairs: usize,
    tail_coefficient: C64,
}

impl Expansion {
    /// Solve for `n` pole pairs and expand `init` in them.
    pub fn new(pot: &DeltaShellPotential, init: &SineInitialState, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("pole count must be positive"));
        }
        if (init.radius() - pot.radius()).abs() > 1e-12 * pot.radius() {
            return Err(Error::domain("initial state and potential must share the radius a"));
        }
        let poles = find_poles(pot, n, n)?;
        Self::from_basis(ResonantBasis::new(&poles)?, init)
    }

    pub fn from_basis(basis: ResonantBasis, init: &SineInitialState) -> Result<Self> {
        let overlaps = OverlapSet::new(&basis, init)?;
        Ok(Self::from_parts(basis, *init, overlaps))
    }

    /// Assemble from precomputed overlaps (which must align with `basis`).
    pub fn from_parts(basis: ResonantBasis, init: SineInitialState, overlaps: OverlapSet) -> Self {
        let pairs = basis.pairs().min(overlaps.pairs());
        let tail_coefficient = -eta()
            * basis
                .iter_pairs(pairs)
                .zip(overlaps.improper.iter().zip(&overlaps.proper))
                .fold(C64::new(0.0, 0.0), |acc, ((sm, sp), (om, op))| {
                    acc + om.weight() / (2.0 * sm.k().powi(3)) + op.weight() / (2.0 * sp.k().powi(3))
                });
        Self {
            init,
            basis,
            overlaps,
            pairs,
            tail_coefficient,
        }
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn potential(&self) -> DeltaShellPotential {
        self.basis.potential
    }

    /// Coefficient `T` of the tail `A_tail = T t^{-3/2}`.
    pub fn tail_coefficient(&self) -> C64 {
        self.tail_coefficient
    }

    pub fn lifetime(&self) -> Result<f64> {
        let proper: Vec<Pole> = self.basis.proper.iter().map(|s| s.pole).collect();
        lifetime(&proper)
    }

    pub fn survival_amplitude(&self, t: f64) -> Result<AmplitudeTerms> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain("the resonant expansion needs t > 0"));
        }
        let exponential = self
            .basis
            .proper
            .iter()
            .zip(&self.overlaps.proper)
            .take(self.pairs)
            .fold(C64::new(0.0, 0.0), |acc, (s, o)| acc + o.weight() * (-I * s.k() * s.k() * t).exp());
        let tail = self.tail_coefficient * t.powf(-1.5);
        Ok(AmplitudeTerms {
            total: exponential + tail,
            exponential,
            tail,
        })
    }

    /// Amplitude on a grid of absolute times, evaluated in parallel.
    pub fn survival_series(&self, t: &[f64]) -> Result<SurvivalSeries> {
        validate_grid(t)?;
        let terms = t
            .par_iter()
            .map(|&x| self.survival_amplitude(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(SurvivalSeries::from_terms(Source::Expansion, self.lifetime()?, t.to_vec(), terms))
    }

    /// `ψ(r, t)` inside the shell.
    pub fn wavefunction(&self, r: f64, t: f64) -> Result<C64> {
        let a = self.potential().radius();
        if !(0.0..=a).contains(&r) {
            return Err(Error::domain("the expansion of ψ(r, t) holds only for 0 ≤ r ≤ a"));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain("the resonant expansion needs t > 0"));
        }
        let mut exponential = C64::new(0.0, 0.0);
        let mut tail = C64::new(0.0, 0.0);
        let states = self.basis.iter_pairs(self.pairs);
        let coeffs = self.overlaps.improper.iter().zip(&self.overlaps.proper);
        for ((sm, sp), (om, op)) in states.zip(coeffs) {
            let (um, up) = (sm.eval(r), sp.eval(r));
            exponential += op.c * up * (-I * sp.k() * sp.k() * t).exp();
            tail += om.c * um / (2.0 * sm.k().powi(3)) + op.c * up / (2.0 * sp.k().powi(3));
        }
        Ok(exponential - eta() * tail * t.powf(-1.5))
    }

    /// `C₄² e^{-ik₄²t} + C₅² e^{-ik₅²t}`.
    pub fn two_pole_amplitude(&self, t: f64) -> Result<C64> {
        [4, 5].iter().try_fold(C64::new(0.0, 0.0), |acc, &p| {
            let (s, o) = self
                .basis
                .get(p)
                .zip(self.overlaps.get(p))
                .ok_or_else(|| Error::domain("two-pole amplitude needs proper poles 4 and 5"))?;
            Ok(acc + o.weight() * (-I * s.k() * s.k() * t).exp())
        })
    }

    /// Time at which `|C₁C̄₁| e^{-Γ₁t/2}` meets `|T| t^{-3/2}`, searched on `[τ, 200τ]`.
    pub fn transition_time(&self) -> Result<f64> {
        let tau = self.lifetime()?;
        let (s1, o1) = self
            .basis
            .proper
            .iter()
            .zip(&self.overlaps.proper)
            .min_by(|x, y| x.0.pole.width().total_cmp(&y.0.pole.width()))
            .expect("lifetime checked at least one proper pole");
        let gamma = s1.pole.width();
        let ln_w = o1.weight().norm().ln();
        let ln_tail = self.tail_coefficient.norm().ln();
        // positive while the exponential dominates
        let gap = |t: f64| (ln_w - 0.5 * gamma * t) - (ln_tail - 1.5 * t.ln());
        let (mut lo, mut hi) = (tau, 200.0 * tau);
        let (g_lo, g_hi) = (gap(lo), gap(hi));
        if !(g_lo.is_finite() && g_hi.is_finite()) || g_lo.signum() == g_hi.signum() {
            return Err(Error::NoTransition { lo, hi });
        }
        let rising = g_lo < 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (gap(mid) < 0.0) == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn pot() -> DeltaShellPotential {
        DeltaShellPotential::new(4.5 * PI, 1.0).unwrap()
    }

    fn basis() -> &'static ResonantBasis {
        static B: OnceLock<ResonantBasis> = OnceLock::new();
        B.get_or_init(|| ResonantBasis::new(&find_poles(&pot(), 40, 40).unwrap()).unwrap())
    }

    fn expand(init: SineInitialState) -> Expansion {
        Expansion::from_basis(basis().clone(), &init).unwrap()
    }

    fn singular() -> Expansion {
        expand(SineInitialState::new(4.5 * PI, 1.0).unwrap())
    }

    fn boxed(q: u32) -> Expansion {
        expand(SineInitialState::box_state(q, 1.0).unwrap())
    }

    const TABLE: [(f64, f64, f64, f64); 10] = [
        (0.00108, -0.00039, 0.00111, -0.00020),
        (0.00357, -0.00644, 0.00662, -0.00131),
        (-0.00817, -0.00757, 0.03260, -0.00914),
        (-0.00663, -0.00112, 0.31311, -0.26619),
        (0.99502, 0.07038, 0.44151, 0.33393),
        (-0.00419, -0.00017, 0.08426, 0.01809),
        (-0.00370, -0.00001, 0.03770, 0.00464),
        (-0.00335, -0.00006, 0.02282, 0.00195),
        (-0.00308, -0.00004, 0.01595, 0.00105),
        (-0.00286, -0.00002, 0.01212, 0.00064),
    ];

    #[test]
    fn reproduces_printed_coefficients() {
        let e = singular();
        for (i, row) in TABLE.iter().enumerate() {
            let p = i as i32 + 1;
            let m = e.overlaps.get(-p).unwrap().weight();
            let q = e.overlaps.get(p).unwrap().weight();
            for (got, want) in [(m.re, row.0), (m.im, row.1), (q.re, row.2), (q.im, row.3)] {
                assert!((got - want).abs() < 2e-4, "p = {p}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn singular_overlap_uses_quadrature() {
        let e = singular();
        let o = e.overlaps.get(-5).unwrap();
        assert_eq!(o.provenance, Provenance::Quadrature);
        // analytic limit (b²a² + iba)/(1 + b²a²) at k_p = -k_c = -b
        let ba = 4.5 * PI;
        let exact = C64::new(ba * ba, ba) / (1.0 + ba * ba);
        assert!((o.weight() - exact).norm() < 1e-6, "{}", o.weight());
        assert_eq!(e.overlaps.get(5).unwrap().provenance, Provenance::ClosedForm);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let init = SineInitialState::new(4.5 * PI, 1.0).unwrap();
        for p in 1..=10 {
            for idx in [p, -p] {
                let s = basis().get(idx).unwrap();
                let closed = overlap_coefficient(s, &init).unwrap();
                if closed.provenance == Provenance::Quadrature {
                    continue;
                }
                let quad = integrate(|r| init.eval(r) * s.eval(r), 0.0, 1.0, &QuadOptions::default())
                    .within(1e-10)
                    .unwrap();
                assert!((closed.c - quad).norm() < 1e-9, "p = {idx}");
            }
        }
    }

    #[test]
    fn conjugate_coefficients_equal_for_real_states() {
        for e in [singular(), boxed(2)] {
            for o in e.overlaps.proper.iter().chain(&e.overlaps.improper) {
                assert!((o.c - o.c_bar).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn box_states_overlap_mostly_with_their_resonance() {
        for (q, want) in [(1, 1.0129), (2, 1.0355), (6, 1.1494)] {
            let w = boxed(q).overlaps.get(q as i32).unwrap().weight();
            assert!((w.re - want).abs() < 1e-3, "q = {q}: {}", w.re);
        }
    }

    #[test]
    fn closure_examples() {
        let e = singular();
        // the printed coefficients themselves sum to 0.96775 + 0.06901i
        let printed = TABLE.iter().fold(C64::new(0.0, 0.0), |acc, r| acc + C64::new(r.0 + r.2, r.1 + r.3)) * 0.5;
        let c10 = closure_sum(&e.overlaps, 10).unwrap();
        assert!((c10 - printed).norm() < 1e-3, "{c10}");
        assert!((c10.re - 1.0).abs() < 0.05);
        let b = boxed(1);
        assert!((closure_sum(&b.overlaps, 10).unwrap().re - 1.0).abs() < 0.05);
        for e in [singular(), boxed(1), boxed(6)] {
            let d = |n| (closure_sum(&e.overlaps, n).unwrap() - 1.0).norm();
            for (n1, n2) in [(10, 20), (20, 40), (10, 40)] {
                assert!(d(n2) <= d(n1) + 0.01);
            }
        }
        assert!(closure_sum(&b.overlaps, 41).is_err());
    }

    #[test]
    fn lifetime_is_inverse_smallest_width() {
        let e = singular();
        let tau = e.lifetime().unwrap();
        assert!((tau * 2.2993 - 1.0).abs() < 1e-3);
        let widths: Vec<f64> = e.basis.proper.iter().map(|s| s.pole.width()).collect();
        let min = widths.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(min, widths[0]);
        assert!((tau * min - 1.0).abs() < 1e-15);
        assert!(lifetime(&[]).is_err());
    }

    #[test]
    fn amplitude_rejects_non_positive_times() {
        let e = boxed(1);
        assert!(e.survival_amplitude(0.0).is_err());
        assert!(e.survival_amplitude(-1.0).is_err());
        assert!(e.survival_series(&[1.0, 0.5]).is_err());
        assert!(e.survival_series(&[]).is_err());
    }

    #[test]
    fn late_times_follow_inverse_cube() {
        let e = singular();
        let tau = e.lifetime().unwrap();
        let t = 100.0 * tau;
        let a = e.survival_amplitude(t).unwrap();
        assert!(a.tail.norm() > 100.0 * a.exponential.norm());
        let h = 1e-3;
        let s = |t: f64| e.survival_amplitude(t).unwrap().total.norm_sqr().ln();
        let slope = (s(t * (1.0 + h)) - s(t * (1.0 - h))) / ((1.0 + h).ln() - (1.0 - h).ln());
        assert!((slope + 3.0).abs() < 0.05, "{slope}");
    }

    #[test]
    fn exponential_regime_is_single_pole_for_ground_box_state() {
        let e = boxed(1);
        let tau = e.lifetime().unwrap();
        let w1 = e.overlaps.get(1).unwrap().weight().norm_sqr();
        for i in 0..=30 {
            let t = tau * (2.0 + 3.0 * f64::from(i) / 30.0);
            let s = e.survival_amplitude(t).unwrap().total.norm_sqr();
            assert!((s - w1 * (-t / tau).exp()).abs() / s < 0.05);
        }
    }

    #[test]
    fn flipping_state_signs_leaves_survival_unchanged() {
        let init = SineInitialState::new(4.5 * PI, 1.0).unwrap();
        let mut flipped = basis().clone();
        for s in flipped.proper.iter_mut().chain(flipped.improper.iter_mut()).step_by(3) {
            *s = s.negated();
        }
        let a = expand(init);
        let b = Expansion::from_basis(flipped, &init).unwrap();
        for t in [0.1, 0.7, 3.0, 40.0] {
            let (x, y) = (a.survival_amplitude(t).unwrap(), b.survival_amplitude(t).unwrap());
            assert!((x.total - y.total).norm() < 1e-12);
        }
    }

    #[test]
    fn parallel_series_is_bitwise_serial() {
        let e = boxed(2);
        let t: Vec<f64> = (1..=200).map(|i| 0.05 * f64::from(i)).collect();
        let s = e.survival_series(&t).unwrap();
        for (i, &x) in t.iter().enumerate() {
            assert_eq!(s.amplitude[i], e.survival_amplitude(x).unwrap().total);
            assert!(s.survival()[i] >= 0.0);
        }
    }

    #[test]
    fn wavefunction_overlap_reproduces_amplitude() {
        let e = boxed(2);
        assert!(e.wavefunction(1.01, 1.0).is_err());
        for t in [0.2, 1.0, 4.0] {
            assert_eq!(e.wavefunction(0.0, t).unwrap(), C64::new(0.0, 0.0));
            let overlap = integrate(|r| e.init.eval(r) * e.wavefunction(r, t).unwrap(), 0.0, 1.0, &QuadOptions::default())
                .within(1e-11)
                .unwrap();
            let a = e.survival_amplitude(t).unwrap().total;
            assert!((overlap - a).norm() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn late_profile_is_the_first_resonance() {
        let e = boxed(1);
        let t = 3.0 * e.lifetime().unwrap();
        let u1 = e.basis.get(1).unwrap();
        let grid: Vec<f64> = (1..50).map(|i| f64::from(i) / 50.0).collect();
        let psi: Vec<f64> = grid.iter().map(|&r| e.wavefunction(r, t).unwrap().norm_sqr()).collect();
        let u: Vec<f64> = grid.iter().map(|&r| u1.eval(r).norm_sqr()).collect();
        let scale = psi.iter().sum::<f64>() / u.iter().sum::<f64>();
        let err = psi.iter().zip(&u).map(|(p, q)| (p - scale * q).abs()).fold(0.0, f64::max);
        let peak = psi.iter().copied().fold(0.0, f64::max);
        assert!(err / peak < 0.05, "{}", err / peak);
    }

    #[test]
    fn two_pole_beats_at_energy_difference() {
        let e = singular();
        let (k4, k5) = (e.basis.get(4).unwrap().k(), e.basis.get(5).unwrap().k());
        let (w4, w5) = (e.overlaps.get(4).unwrap().weight(), e.overlaps.get(5).unwrap().weight());
        // interference term with the envelope removed
        let beat = |t: f64| {
            let x = e.two_pole_amplitude(t).unwrap().norm_sqr();
            let (a4, a5) = (w4 * (-I * k4 * k4 * t).exp(), w5 * (-I * k5 * k5 * t).exp());
            (x - a4.norm_sqr() - a5.norm_sqr()) / (a4.norm() * a5.norm())
        };
        let mut crossings = Vec::new();
        let dt = 1e-3;
        let mut t = dt;
        while crossings.len() < 4 {
            if beat(t) < 0.0 && beat(t + dt) >= 0.0 {
                let (mut lo, mut hi) = (t, t + dt);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if beat(mid) < 0.0 { lo = mid } else { hi = mid }
                }
                crossings.push(lo);
            }
            t += dt;
        }
        let period = (crossings[3] - crossings[0]) / 3.0;
        let de = (k5 * k5).re - (k4 * k4).re;
        assert!((period * de / (2.0 * PI) - 1.0).abs() < 0.01);
        let late: Vec<f64> = (0..20).map(|i| e.two_pole_amplitude(2.0 + f64::from(i)).unwrap().norm()).collect();
        assert!(late.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn transition_time_examples() {
        let e = singular();
        let tau = e.lifetime().unwrap();
        let t = e.transition_time().unwrap();
        assert!((24.0..=30.0).contains(&(t / tau)), "{}", t / tau);
        let b = boxed(1);
        let t1 = b.transition_time().unwrap() / tau;
        assert!((20.0..=40.0).contains(&t1), "{t1}");
    }

    #[test]
    fn transition_time_ignores_common_scale() {
        let e = singular();
        let mut overlaps = e.overlaps.clone();
        for o in overlaps.proper.iter_mut().chain(overlaps.improper.iter_mut()) {
            o.c *= 2f64.sqrt();
            o.c_bar *= 2f64.sqrt();
        }
        let scaled = Expansion::from_parts(e.basis.clone(), e.init, overlaps);
        let (a, b) = (e.transition_time().unwrap(), scaled.transition_time().unwrap());
        assert!((a - b).abs() < 1e-9 * a);
    }
}
