//! Invariant suite behind the `verify` command.
//!
//! Each check reports a measured value, the threshold it was held to, and a
//! status. Convergence checks whose thresholds are calibrated at 40 pole
//! pairs report `inconclusive` rather than `fail` when the basis is too short
//! to show a trend.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::expansion::{closure_sum, Expansion};
use crate::model::{DeltaShellPotential, SineInitialState};
use crate::oracle::{green_function, jost_function, numerical_residue, survival_amplitude_exact, OracleOptions};
use crate::pole_solver::find_poles;
use crate::resonant_basis::{cesaro_sum_rule_defect, sum_rule_defect, ResonantBasis};
use crate::C64;

/// Truncation at which the convergence thresholds were calibrated.
pub const CALIBRATED_PAIRS: usize = 40;
/// Reference truncation for trend comparisons.
pub const TREND_BASE: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    TrendInconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Check {
    fn bound(name: &str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        let status = if value < threshold { Status::Pass } else { Status::Fail };
        Self {
            name: name.into(),
            status,
            value,
            threshold,
            detail: detail.into(),
        }
    }

    fn inconclusive(name: &str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::TrendInconclusive,
            value,
            threshold,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub potential: DeltaShellPotential,
    pub init: SineInitialState,
    pub pairs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::TrendInconclusive)
    }
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

/// Trend-based convergence check against the value at [`TREND_BASE`] pairs:
/// falling and under `threshold` passes, falling but above it is
/// inconclusive, not falling fails.
fn trend(name: &str, n: usize, value: f64, base: Option<f64>, threshold: f64) -> Check {
    let Some(base) = base.filter(|_| n > TREND_BASE) else {
        return Check::inconclusive(name, value, threshold, format!("needs more than {TREND_BASE} pairs"));
    };
    let detail = format!("{base:.3e} at {TREND_BASE} pairs");
    if value >= base {
        Check {
            status: Status::Fail,
            ..Check::inconclusive(name, value, threshold, format!("not decreasing: {detail}"))
        }
    } else if value < threshold {
        Check::bound(name, value, threshold, detail)
    } else {
        Check::inconclusive(name, value, threshold, format!("decreasing but above threshold: {detail}"))
    }
}

fn at_base<F: Fn(usize) -> Result<f64>>(n: usize, f: F) -> Result<Option<f64>> {
    if n > TREND_BASE {
        f(TREND_BASE).map(Some)
    } else {
        Ok(None)
    }
}

pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let pot = cfg.potential;
    let n = cfg.pairs;
    let a = pot.radius();
    let poles = find_poles(&pot, n, n)?;
    let basis = ResonantBasis::new(&poles)?;
    let mut checks = Vec::new();

    let states = || basis.proper.iter().chain(&basis.improper);
    checks.push(Check::bound(
        "normalization",
        max_of(states().map(|s| {
            // near-real poles lose two digits to cancellation
            let scale = if s.k().im.abs() < 1e-3 { 1e-2 } else { 1.0 };
            s.normalization_residual().norm() * scale
        })),
        1e-10,
        "max |∫u² + iu²(a)/2k − 1|, near-real poles scaled by 1e-2",
    ));
    checks.push(Check::bound(
        "jost zeros",
        max_of(states().map(|s| jost_function(s.k(), &pot).norm())),
        1e-10,
        "max |F(k_p)|",
    ));

    let (r, rp) = (0.3 * a, 0.6 * a);
    let residue_err = basis
        .proper
        .iter()
        .take(5)
        .map(|s| {
            let radius = 0.1 * (PI / a).min(s.k().im.abs().max(0.05));
            let res = numerical_residue(r, rp, s.k(), radius, 128, &pot)?;
            Ok((res - s.eval(r) * s.eval(rp) / (2.0 * s.k())).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    checks.push(Check::bound("residue identity", max_of(residue_err.into_iter()), 1e-8, "proper poles 1..5"));

    let k = C64::new(2.0 / a, 0.0);
    let exact = green_function(r, rp, k, &pot)?;
    let rel = |m: usize| Ok((basis.green_expansion(r, rp, k, m)? - exact).norm() / exact.norm());
    checks.push(trend("pole expansion of G+", n, rel(n)?, at_base(n, rel)?, 1e-3));

    for (x, y) in [(0.5 * a, 0.5 * a), (0.3 * a, 0.7 * a)] {
        let d = |m: usize| Ok(sum_rule_defect(&basis, x, y, -1, m)?.norm());
        checks.push(trend(&format!("sum rule order -1 at ({x:.3}, {y:.3})"), n, d(n)?, at_base(n, d)?, 0.05));
    }

    let c = |m: usize| Ok(cesaro_sum_rule_defect(&basis, 0.3 * a, 0.7 * a, 0, m)?.norm());
    checks.push(trend("closure off the diagonal (Cesàro)", n, c(n)?, at_base(n, c)?, 0.02));

    // Partial sums weighted by k_p grow with the truncation; there is no
    // pointwise limit to test against.
    let plus = sum_rule_defect(&basis, 0.3 * a, 0.7 * a, 1, n)?.norm();
    checks.push(Check::inconclusive(
        "sum rule order +1",
        plus,
        0.05,
        "partial sums do not converge pointwise; the identity holds only as a distribution",
    ));

    let expansion = Expansion::from_basis(basis, &cfg.init)?;
    let closure = |m: usize| Ok((closure_sum(&expansion.overlaps, m)? - 1.0).norm());
    checks.push(trend("closure of overlaps", n, closure(n)?, at_base(n, closure)?, 0.02));

    checks.push(oracle_agreement(&expansion, n)?);
    Ok(VerifyReport { checks })
}

/// Expansion against oracle on `[0.5τ, 5τ]`, provided the exponential regime
/// covers that window; otherwise only the late power-law regime can be
/// compared and the check is reported as inconclusive.
fn oracle_agreement(expansion: &Expansion, n: usize) -> Result<Check> {
    let name = "oracle agreement";
    let tau = expansion.lifetime()?;
    let opts = OracleOptions::default();
    let rel = |t: f64| -> Result<f64> {
        let exact = survival_amplitude_exact(expansion, t, n, &opts)?.total.norm_sqr();
        let series = expansion.survival_amplitude(t)?.total.norm_sqr();
        Ok((exact - series).abs() / exact)
    };
    let exponential_regime = expansion.transition_time().map(|t| t > 5.0 * tau).unwrap_or(false);
    if !exponential_regime {
        let late = rel(1000.0 * tau)?;
        return Ok(Check::inconclusive(
            name,
            late,
            1e-2,
            "no exponential regime on [0.5τ, 5τ]; value is the relative difference at 1000τ",
        ));
    }
    let worst = (0..=15)
        .map(|i| rel(tau * (0.5 + 4.5 * f64::from(i) / 15.0)))
        .collect::<Result<Vec<f64>>>()?;
    let worst = max_of(worst.into_iter());
    Ok(if worst >= 1e-2 && n < CALIBRATED_PAIRS {
        Check::inconclusive(name, worst, 1e-2, "undertruncated")
    } else {
        Check::bound(name, worst, 1e-2, "max relative |S| difference on [0.5τ, 5τ]")
    })
}
