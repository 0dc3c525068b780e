//! Normalized resonant states and the completeness diagnostics built on them.
//!
//! Inside the shell `u_p(r) = A_p sin(k_p r)`; outside `u_p(r) = B_p e^{ik_p r}`
//! with `B_p = A_p sin(k_p a) e^{-ik_p a}` so the two pieces meet at `r = a`.
//! The amplitude `A_p` is fixed by
//!
//! ```text
//! ∫₀ᵃ u_p²(r) dr + i u_p²(a)/(2k_p) = 1
//! ```
//!
//! and only the square `A_p²` enters any observable, so the principal branch
//! of the square root is used.

use serde::{Deserialize, Serialize};

use crate::cmath::I;
use crate::error::{Error, Result};
use crate::model::DeltaShellPotential;
use crate::pole_solver::{Pole, PoleSet};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonantState {
    pub pole: Pole,
    /// Interior amplitude `A_p`.
    pub amplitude: C64,
    /// Exterior amplitude `B_p`.
    pub exterior: C64,
    radius: f64,
}

/// `A_p = [2(-iba - 2ik_p a) / (a(1 - iba - 2ik_p a))]^{1/2}`.
pub fn normalization_coefficient(pole: &Pole, pot: &DeltaShellPotential) -> Result<C64> {
    let (b, a) = (pot.intensity(), pot.radius());
    let k = pole.k;
    let den = a * (1.0 - I * b * a - 2.0 * I * k * a);
    if den.norm() < 1e-14 {
        return Err(Error::DegenerateNormalization(k));
    }
    Ok((2.0 * (-I * b * a - 2.0 * I * k * a) / den).sqrt())
}

impl ResonantState {
    pub fn new(pole: Pole, pot: &DeltaShellPotential) -> Result<Self> {
        let amplitude = normalization_coefficient(&pole, pot)?;
        let ka = pole.k * pot.radius();
        let exterior = amplitude * ka.sin() * (-I * ka).exp();
        Ok(Self {
            pole,
            amplitude,
            exterior,
            radius: pot.radius(),
        })
    }

    pub fn k(&self) -> C64 {
        self.pole.k
    }

    pub fn index(&self) -> i32 {
        self.pole.index
    }

    /// The same state with `u_p → -u_p`.
    pub fn negated(&self) -> Self {
        Self {
            amplitude: -self.amplitude,
            exterior: -self.exterior,
            ..*self
        }
    }

    /// `u_p(r)`.
    pub fn eval(&self, r: f64) -> C64 {
        eval_state(self, r)
    }

    /// `u_p'(r)`, taking the interior branch at `r = a`.
    pub fn derivative(&self, r: f64) -> C64 {
        let k = self.k();
        if r <= self.radius {
            self.amplitude * k * (k * r).cos()
        } else {
            I * k * self.exterior * (I * k * r).exp()
        }
    }

    /// `∫₀ᵃ u² dr + i u²(a)/(2k) - 1`, with the interior integral in closed form.
    pub fn normalization_residual(&self) -> C64 {
        let k = self.k();
        let a = self.radius;
        let interior = self.amplitude * self.amplitude * (a / 2.0 - (2.0 * k * a).sin() / (4.0 * k));
        let ua = self.eval(a);
        interior + I * ua * ua / (2.0 * k) - 1.0
    }
}

pub fn eval_state(state: &ResonantState, r: f64) -> C64 {
    let k = state.k();
    if r <= state.radius {
        state.amplitude * (k * r).sin()
    } else {
        state.exterior * (I * k * r).exp()
    }
}

/// Resonant states for both pole families of a [`PoleSet`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonantBasis {
    pub potential: DeltaShellPotential,
    pub proper: Vec<ResonantState>,
    pub improper: Vec<ResonantState>,
}

impl ResonantBasis {
    pub fn new(poles: &PoleSet) -> Result<Self> {
        let pot = poles.potential;
        let build = |ps: &[Pole]| -> Result<Vec<ResonantState>> {
            ps.iter().map(|p| ResonantState::new(*p, &pot)).collect()
        };
        Ok(Self {
            potential: pot,
            proper: build(&poles.proper)?,
            improper: build(&poles.improper)?,
        })
    }

    pub fn pairs(&self) -> usize {
        self.proper.len().min(self.improper.len())
    }

    /// States `(u_{-p}, u_p)` for `p = 1..=n`, in summation order.
    pub fn iter_pairs(&self, n: usize) -> impl Iterator<Item = (&ResonantState, &ResonantState)> {
        self.improper.iter().zip(self.proper.iter()).take(n)
    }

    pub fn get(&self, index: i32) -> Option<&ResonantState> {
        match index {
            0 => None,
            i if i > 0 => self.proper.get(i as usize - 1),
            i => self.improper.get(i.unsigned_abs() as usize - 1),
        }
    }

    fn check_pairs(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.pairs() {
            return Err(Error::domain(format!(
                "truncation {n} outside 1..={} available pole pairs",
                self.pairs()
            )));
        }
        Ok(())
    }

    /// Truncated resonant expansion `Σ_{p=-n..n} u_p(r)u_p(r')/(2k_p(k - k_p))`
    /// of the outgoing Green's function.
    pub fn green_expansion(&self, r: f64, r_prime: f64, k: C64, n: usize) -> Result<C64> {
        self.check_interior(r, r_prime)?;
        self.check_pairs(n)?;
        Ok(self.iter_pairs(n).fold(C64::new(0.0, 0.0), |acc, (m, p)| {
            let term = |s: &ResonantState| s.eval(r) * s.eval(r_prime) / (2.0 * s.k() * (k - s.k()));
            acc + term(m) + term(p)
        }))
    }

    fn check_interior(&self, r: f64, r_prime: f64) -> Result<()> {
        let a = self.potential.radius();
        if r < 0.0 || r_prime < 0.0 || r > a || r_prime > a {
            return Err(Error::domain("resonant expansions hold only for 0 ≤ r, r' ≤ a"));
        }
        if r == a && r_prime == a {
            return Err(Error::domain("resonant expansions do not hold at r = r' = a"));
        }
        Ok(())
    }
}

/// Partial sum `Σ_{p=-n..n, p≠0} u_p(r) u_p(r') k_p^order`.
///
/// Order -1 and +1 sums vanish in the limit; the order-0 sum equals
/// `2δ(r - r')`, so off the diagonal it too should tend to zero. Only the
/// order -1 sum converges pointwise; the other two converge as
/// distributions, see [`cesaro_sum_rule_defect`].
pub fn sum_rule_defect(basis: &ResonantBasis, r: f64, r_prime: f64, order: i32, n: usize) -> Result<C64> {
    Ok(*partial_sums(basis, r, r_prime, order, n)?
        .last()
        .expect("n ≥ 1"))
}

/// Mean of the first `n` partial sums of [`sum_rule_defect`].
pub fn cesaro_sum_rule_defect(basis: &ResonantBasis, r: f64, r_prime: f64, order: i32, n: usize) -> Result<C64> {
    let sums = partial_sums(basis, r, r_prime, order, n)?;
    Ok(sums.iter().sum::<C64>() / n as f64)
}

fn partial_sums(basis: &ResonantBasis, r: f64, r_prime: f64, order: i32, n: usize) -> Result<Vec<C64>> {
    if !(-1..=1).contains(&order) {
        return Err(Error::domain("sum-rule order must be -1, 0 or +1"));
    }
    basis.check_interior(r, r_prime)?;
    basis.check_pairs(n)?;
    let term = |s: &ResonantState| s.eval(r) * s.eval(r_prime) * s.k().powi(order);
    let mut acc = C64::new(0.0, 0.0);
    Ok(basis
        .iter_pairs(n)
        .map(|(m, p)| {
            acc += term(m) + term(p);
            acc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pole_solver::find_poles;
    use std::f64::consts::PI;

    fn basis(n: usize) -> ResonantBasis {
        let pot = DeltaShellPotential::new(4.5 * PI, 1.0).unwrap();
        ResonantBasis::new(&find_poles(&pot, n, n).unwrap()).unwrap()
    }

    /// Fourth-order one-sided difference; `h` signed to choose the side.
    fn one_sided(f: impl Fn(f64) -> C64, x: f64, h: f64) -> C64 {
        (-25.0 * f(x) + 48.0 * f(x + h) - 36.0 * f(x + 2.0 * h) + 16.0 * f(x + 3.0 * h) - 3.0 * f(x + 4.0 * h))
            / (12.0 * h)
    }

    #[test]
    fn normalization_holds_for_every_state() {
        let b = basis(40);
        for s in b.proper.iter().chain(&b.improper) {
            let tol = if s.pole.k.im.abs() < 1e-3 { 1e-8 } else { 1e-10 };
            assert!(s.normalization_residual().norm() < tol, "p = {}", s.index());
        }
    }

    #[test]
    fn normalization_of_singular_state() {
        let b = basis(10);
        assert!(b.get(-5).unwrap().normalization_residual().norm() < 1e-8);
        assert!(b.get(1).unwrap().normalization_residual().norm() < 1e-10);
    }

    #[test]
    fn boundary_conditions() {
        let b = basis(10);
        for s in b.proper.iter().chain(&b.improper) {
            assert_eq!(s.eval(0.0), C64::new(0.0, 0.0));
            let a = 1.0;
            let inside = s.amplitude * (s.k() * a).sin();
            let outside = s.exterior * (I * s.k() * a).exp();
            assert!((inside - outside).norm() < 1e-12);
            // outgoing wave just outside the shell
            let d = s.derivative(a + 1e-9);
            assert!((d - I * s.k() * s.eval(a + 1e-9)).norm() < 1e-12 * d.norm().max(1.0));
        }
    }

    #[test]
    fn derivative_jump_by_finite_differences() {
        let b = basis(5);
        for p in [1, 2, 3, -1, -5] {
            let s = b.get(p).unwrap();
            let a = 1.0;
            let h = 2e-4;
            let right = one_sided(|r| s.eval(r), a, h);
            let left = one_sided(|r| s.eval(r), a, -h);
            let jump = right - left;
            let expected = -I * (4.5 * PI) * s.eval(a);
            assert!((jump - expected).norm() < 1e-10 * expected.norm().max(1.0), "p = {p}: {}", (jump - expected).norm());
        }
    }

    #[test]
    fn first_order_sum_rule_converges() {
        let b = basis(40);
        let d10 = sum_rule_defect(&b, 0.5, 0.5, -1, 10).unwrap().norm();
        let d40 = sum_rule_defect(&b, 0.5, 0.5, -1, 40).unwrap().norm();
        assert!(d40 < 0.05 && d40 < d10, "{d10} {d40}");
        let off10 = sum_rule_defect(&b, 0.3, 0.7, -1, 10).unwrap().norm();
        let off40 = sum_rule_defect(&b, 0.3, 0.7, -1, 40).unwrap().norm();
        assert!(off40 < 0.05 && off40 < off10);
    }

    #[test]
    fn off_diagonal_closure_averages_to_zero() {
        let b = basis(40);
        let c10 = cesaro_sum_rule_defect(&b, 0.3, 0.7, 0, 10).unwrap().norm();
        let c40 = cesaro_sum_rule_defect(&b, 0.3, 0.7, 0, 40).unwrap().norm();
        assert!(c40 < c10 && c40 < 0.02, "{c10} {c40}");
    }

    #[test]
    fn sum_rule_domain_errors() {
        let b = basis(5);
        assert!(sum_rule_defect(&b, 1.0, 1.0, -1, 5).is_err());
        assert!(sum_rule_defect(&b, 0.5, 1.2, -1, 5).is_err());
        assert!(sum_rule_defect(&b, 0.5, 0.5, 2, 5).is_err());
        assert!(sum_rule_defect(&b, 0.5, 0.5, 0, 6).is_err());
        assert!(sum_rule_defect(&b, 1.0, 0.5, 1, 5).is_ok());
    }

    #[test]
    fn sign_of_amplitude_does_not_change_products() {
        let b = basis(5);
        for s in &b.proper {
            let n = s.negated();
            let prod = s.eval(0.3) * s.eval(0.8);
            let flipped = n.eval(0.3) * n.eval(0.8);
            assert_eq!(prod, flipped);
        }
    }
}
