//! Complex poles of the outgoing Green's function.
//!
//! Poles are the roots of `2k - b(e^{2ika} - 1) = 0` other than the removable
//! root at `k = 0`. Roots are bracketed with the argument principle applied to
//! the reduced function `2 - b(e^{2ika} - 1)/k`, which is entire and nonzero
//! at the origin; rectangles are bisected until each holds a single root,
//! which is then polished by damped Newton iteration.
//!
//! Convention: `k = α - iβ`. Proper poles live in the fourth quadrant
//! (`α > β > 0`) and carry positive indices; the remaining poles lie in the
//! second and third quadrants (or on the negative real axis at a spectral
//! singularity) and carry negative indices.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cmath::{expm1, I};
use crate::error::{Error, Result};
use crate::model::DeltaShellPotential;
use crate::C64;

/// Roots closer than this are the same root.
pub const DUPLICATE_TOL: f64 = 1e-8;
/// Outward shift applied to a rectangle whose edge grazes a root.
pub const BOUNDARY_JITTER: f64 = 1e-6;
/// |Im k| below which a pole is classified as sitting on the real axis.
pub const REAL_AXIS_TOL: f64 = 1e-10;
/// Target residual of Newton polishing.
pub const POLISH_TOL: f64 = 1e-12;

const MAX_JITTER_RETRIES: usize = 6;
const NEAR_ROOT: f64 = 1e-12;
const MAX_NEWTON_ITER: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrant {
    Second,
    Third,
    Fourth,
    RealAxis,
}

impl Quadrant {
    pub fn of(k: C64) -> Self {
        if k.im.abs() <= REAL_AXIS_TOL {
            Quadrant::RealAxis
        } else if k.im < 0.0 && k.re > 0.0 {
            Quadrant::Fourth
        } else if k.im < 0.0 {
            Quadrant::Third
        } else {
            Quadrant::Second
        }
    }
}

/// One pole `k_p` with its signed family index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub index: i32,
    pub k: C64,
    pub quadrant: Quadrant,
}

impl Pole {
    pub fn new(index: i32, k: C64) -> Self {
        Self {
            index,
            k,
            quadrant: Quadrant::of(k),
        }
    }

    pub fn is_proper(&self) -> bool {
        self.index > 0
    }

    /// `α = Re k`.
    pub fn alpha(&self) -> f64 {
        self.k.re
    }

    /// `β = -Im k`.
    pub fn beta(&self) -> f64 {
        -self.k.im
    }

    /// Complex energy `k²`.
    pub fn energy(&self) -> C64 {
        self.k * self.k
    }

    /// `α² - β²`; meaningful as a resonance position for proper poles.
    pub fn resonance_position(&self) -> f64 {
        self.alpha().powi(2) - self.beta().powi(2)
    }

    /// `4αβ`; meaningful as a decay width for proper poles.
    pub fn width(&self) -> f64 {
        4.0 * self.alpha() * self.beta()
    }
}

/// `(ℰ_p, Γ_p)` of a proper pole.
pub fn resonance_parameters(pole: &Pole) -> Result<(f64, f64)> {
    if !pole.is_proper() {
        return Err(Error::domain(format!(
            "resonance parameters are defined for proper poles only (index {})",
            pole.index
        )));
    }
    Ok((pole.resonance_position(), pole.width()))
}

/// The first poles of both families for one potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    pub potential: DeltaShellPotential,
    /// Indices 1, 2, ... by increasing `Re k`.
    pub proper: Vec<Pole>,
    /// Indices -1, -2, ... by increasing `|Re k|`.
    pub improper: Vec<Pole>,
}

impl PoleSet {
    pub fn get(&self, index: i32) -> Option<&Pole> {
        match index {
            0 => None,
            i if i > 0 => self.proper.get(i as usize - 1),
            i => self.improper.get(i.unsigned_abs() as usize - 1),
        }
    }

    /// Number of complete `(p, -p)` pairs.
    pub fn pairs(&self) -> usize {
        self.proper.len().min(self.improper.len())
    }

    /// Poles in the fixed summation order: ascending `p`, improper before proper.
    pub fn iter_pairs(&self, n: usize) -> impl Iterator<Item = (&Pole, &Pole)> {
        self.improper.iter().zip(self.proper.iter()).take(n)
    }

    pub fn all(&self) -> impl Iterator<Item = &Pole> {
        self.improper.iter().chain(self.proper.iter())
    }
}

/// `2k - b(e^{2ika} - 1)`; zero exactly at the poles.
pub fn pole_equation_residual(k: C64, pot: &DeltaShellPotential) -> Result<C64> {
    if k == C64::new(0.0, 0.0) {
        return Err(Error::domain("k = 0 is a removable root of the pole equation, not a pole"));
    }
    Ok(residual(k, pot))
}

fn residual(k: C64, pot: &DeltaShellPotential) -> C64 {
    let (b, a) = (pot.intensity(), pot.radius());
    2.0 * k - b * expm1(2.0 * I * k * a)
}

fn residual_derivative(k: C64, pot: &DeltaShellPotential) -> C64 {
    let (b, a) = (pot.intensity(), pot.radius());
    2.0 - 2.0 * I * a * b * (2.0 * I * k * a).exp()
}

/// `2 - b(e^{2ika} - 1)/k`, continued analytically through `k = 0`.
fn reduced(k: C64, pot: &DeltaShellPotential) -> C64 {
    let (b, a) = (pot.intensity(), pot.radius());
    let x = 2.0 * I * k * a;
    // (e^x - 1)/k = 2ia (e^x - 1)/x
    let ratio = if x.norm() < 1e-6 {
        1.0 + x * (0.5 + x / 6.0)
    } else {
        expm1(x) / x
    };
    2.0 - b * 2.0 * I * a * ratio
}

/// Axis-aligned rectangle `[re_lo, re_hi] × [im_lo, im_hi]` in the k plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Rect {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Result<Self> {
        let ok = [re_lo, re_hi, im_lo, im_hi].iter().all(|v| v.is_finite());
        if !ok || re_lo >= re_hi || im_lo >= im_hi {
            return Err(Error::domain("rectangle must have finite, increasing bounds"));
        }
        Ok(Self {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
        })
    }

    fn center(&self) -> C64 {
        C64::new(0.5 * (self.re_lo + self.re_hi), 0.5 * (self.im_lo + self.im_hi))
    }

    fn width(&self) -> f64 {
        self.re_hi - self.re_lo
    }

    fn height(&self) -> f64 {
        self.im_hi - self.im_lo
    }

    fn contains(&self, k: C64, margin: f64) -> bool {
        k.re >= self.re_lo - margin
            && k.re <= self.re_hi + margin
            && k.im >= self.im_lo - margin
            && k.im <= self.im_hi + margin
    }

    fn grown(&self, by: f64) -> Self {
        Self {
            re_lo: self.re_lo - by,
            re_hi: self.re_hi + by,
            im_lo: self.im_lo - by,
            im_hi: self.im_hi + by,
        }
    }

    fn split(&self, fraction: f64) -> (Self, Self) {
        if self.width() >= self.height() {
            let x = self.re_lo + fraction * self.width();
            (Self { re_hi: x, ..*self }, Self { re_lo: x, ..*self })
        } else {
            let y = self.im_lo + fraction * self.height();
            (Self { im_hi: y, ..*self }, Self { im_lo: y, ..*self })
        }
    }
}

/// A boundary point where the reduced function nearly vanishes.
#[derive(Debug)]
struct NearRoot(f64);

/// Total phase change of the reduced function along one straight edge.
fn edge_phase(pot: &DeltaShellPotential, from: C64, to: C64) -> std::result::Result<f64, NearRoot> {
    let a = pot.radius();
    let len = (to - from).norm();
    // e^{2ika} turns once per π/a along Re k; resolve that comfortably.
    let n0 = ((len * 16.0 * a / PI).ceil() as usize).max(8);
    let point = |s: f64| from + (to - from) * s;
    let mut total = 0.0;
    let mut s0 = 0.0;
    let mut g0 = reduced(point(0.0), pot);
    if g0.norm() < NEAR_ROOT {
        return Err(NearRoot(g0.norm()));
    }
    for i in 1..=n0 {
        let s1 = i as f64 / n0 as f64;
        let g1 = reduced(point(s1), pot);
        if g1.norm() < NEAR_ROOT {
            return Err(NearRoot(g1.norm()));
        }
        total += segment_phase(pot, &point, s0, s1, g0, g1, 0, len)?;
        s0 = s1;
        g0 = g1;
    }
    Ok(total)
}

fn segment_phase(
    pot: &DeltaShellPotential,
    point: &dyn Fn(f64) -> C64,
    s0: f64,
    s1: f64,
    g0: C64,
    g1: C64,
    depth: usize,
    len: f64,
) -> std::result::Result<f64, NearRoot> {
    let whole = (g1 / g0).arg();
    let sm = 0.5 * (s0 + s1);
    let gm = reduced(point(sm), pot);
    if gm.norm() < NEAR_ROOT {
        return Err(NearRoot(gm.norm()));
    }
    let left = (gm / g0).arg();
    let right = (g1 / gm).arg();
    if whole.abs() < PI / 4.0 && (left + right - whole).abs() < 1e-9 {
        return Ok(whole);
    }
    if depth > 48 || (s1 - s0) * len < 1e-13 {
        return Err(NearRoot(g0.norm().min(g1.norm()).min(gm.norm())));
    }
    Ok(segment_phase(pot, point, s0, sm, g0, gm, depth + 1, len)?
        + segment_phase(pot, point, sm, s1, gm, g1, depth + 1, len)?)
}

fn winding(rect: &Rect, pot: &DeltaShellPotential) -> std::result::Result<usize, NearRoot> {
    let c = [
        C64::new(rect.re_lo, rect.im_lo),
        C64::new(rect.re_hi, rect.im_lo),
        C64::new(rect.re_hi, rect.im_hi),
        C64::new(rect.re_lo, rect.im_hi),
    ];
    let mut phase = 0.0;
    for i in 0..4 {
        phase += edge_phase(pot, c[i], c[(i + 1) % 4])?;
    }
    let turns = phase / (2.0 * PI);
    let n = turns.round();
    if (turns - n).abs() > 1e-3 || n < 0.0 {
        // A non-integral winding means a sampling failure near a root.
        return Err(NearRoot(0.0));
    }
    Ok(n as usize)
}

/// Number of poles strictly inside `rect`, by the argument principle.
///
/// When the boundary grazes a root the rectangle is grown by
/// [`BOUNDARY_JITTER`] and the count retried.
pub fn count_roots_in_rectangle(rect: &Rect, pot: &DeltaShellPotential) -> Result<usize> {
    let mut last = 0.0;
    for attempt in 0..=MAX_JITTER_RETRIES {
        let r = rect.grown(BOUNDARY_JITTER * attempt as f64);
        match winding(&r, pot) {
            Ok(n) => return Ok(n),
            Err(NearRoot(d)) => last = d,
        }
    }
    Err(Error::RetryExhausted {
        retries: MAX_JITTER_RETRIES,
        distance: last,
    })
}

/// Damped Newton iteration on the pole equation.
pub fn polish(seed: C64, pot: &DeltaShellPotential) -> Result<C64> {
    let mut k = seed;
    let mut f = residual(k, pot);
    let scale = seed.norm().max(1.0);
    for _ in 0..MAX_NEWTON_ITER {
        let step = f / residual_derivative(k, pot);
        if !step.is_finite() {
            break;
        }
        let mut damping = 1.0;
        let mut next = k - step;
        let mut fn_ = residual(next, pot);
        while fn_.norm() > f.norm() && damping > 1e-4 {
            damping *= 0.5;
            next = k - step * damping;
            fn_ = residual(next, pot);
        }
        let moved = (next - k).norm();
        k = next;
        f = fn_;
        if f.norm() <= POLISH_TOL * scale || moved <= 4.0 * f64::EPSILON * k.norm().max(1.0) {
            break;
        }
    }
    // A couple of plain steps can shave the last ulp-level residual.
    for _ in 0..2 {
        let next = k - residual(k, pot) / residual_derivative(k, pot);
        let fn_ = residual(next, pot);
        if fn_.norm() < f.norm() {
            k = next;
            f = fn_;
        }
    }
    // both terms of the residual grow like |k|, and so does its rounding floor
    if f.norm() < 1e-10 * k.norm().max(1.0) && k.norm() > 1e-6 {
        Ok(k)
    } else {
        Err(Error::NewtonDiverged {
            seed,
            residual: f.norm(),
        })
    }
}

const SPLIT_FRACTIONS: [f64; 4] = [0.507_316_4, 0.462_091_7, 0.553_812_9, 0.418_733_1];

fn collect_roots(rect: Rect, count: usize, pot: &DeltaShellPotential, leaf: f64) -> Result<Vec<C64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let size = rect.width().max(rect.height());
    if count == 1 && size <= leaf {
        if let Ok(k) = polish(rect.center(), pot) {
            if rect.contains(k, 1e-3 * size + BOUNDARY_JITTER) {
                return Ok(vec![k]);
            }
        }
        if size < 1e-7 {
            return Err(Error::NewtonDiverged {
                seed: rect.center(),
                residual: residual(rect.center(), pot).norm(),
            });
        }
    }
    let mut last_err = None;
    for &fraction in &SPLIT_FRACTIONS {
        let (lo, hi) = rect.split(fraction);
        let (n_lo, n_hi) = match (winding(&lo, pot), winding(&hi, pot)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(NearRoot(d)), _) | (_, Err(NearRoot(d))) => {
                last_err = Some(d);
                continue;
            }
        };
        if n_lo + n_hi != count {
            last_err = Some(0.0);
            continue;
        }
        let (a, b) = rayon::join(
            || collect_roots(lo, n_lo, pot, leaf),
            || collect_roots(hi, n_hi, pot, leaf),
        );
        let mut roots = a?;
        roots.extend(b?);
        return Ok(roots);
    }
    Err(Error::RetryExhausted {
        retries: SPLIT_FRACTIONS.len(),
        distance: last_err.unwrap_or(0.0),
    })
}

fn dedup(mut roots: Vec<C64>) -> Vec<C64> {
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let mut out: Vec<C64> = Vec::with_capacity(roots.len());
    for k in roots {
        if !out.iter().any(|q| (q - k).norm() < DUPLICATE_TOL) {
            out.push(k);
        }
    }
    out
}

/// Depth of the search strip below (and above) the real axis.
///
/// `|Im k_p|` grows like `ln(2|k_p|/b)/(2a)`; the strip is at least `5/a`.
pub fn search_depth(pot: &DeltaShellPotential, max_re: f64) -> f64 {
    let (b, a) = (pot.intensity(), pot.radius());
    let asymptotic = 1.0 / a + 1.5 * (2.0 * max_re / b + 1.0).ln() / (2.0 * a);
    (5.0 / a).max(asymptotic)
}

fn solve_region(
    pot: &DeltaShellPotential,
    wanted: usize,
    make: impl Fn(f64, f64) -> Result<Rect>,
) -> Result<Vec<C64>> {
    let a = pot.radius();
    let mut extent = (wanted as f64 + 1.0) * PI / a;
    loop {
        let rect = make(extent, search_depth(pot, extent))?;
        let certified = count_roots_in_rectangle(&rect, pot)?;
        if certified >= wanted {
            let roots = dedup(collect_roots(rect, certified, pot, 1.0 / a)?);
            if roots.len() != certified {
                return Err(Error::Incomplete {
                    certified,
                    found: roots.len(),
                });
            }
            return Ok(roots);
        }
        extent += 2.0 * PI / a;
    }
}

/// The first `n_proper` fourth-quadrant poles and the first `n_improper`
/// poles with negative real part, each certified complete by a root count
/// over the covering rectangle.
pub fn find_poles(pot: &DeltaShellPotential, n_proper: usize, n_improper: usize) -> Result<PoleSet> {
    if n_proper == 0 || n_improper == 0 {
        return Err(Error::domain("pole counts must be at least 1"));
    }
    let (proper, improper) = rayon::join(
        || solve_region(pot, n_proper, |re, depth| Rect::new(0.0, re, -depth, 0.0)),
        || solve_region(pot, n_improper, |re, depth| Rect::new(-re, 0.0, -depth, depth)),
    );
    let mut proper = proper?;
    let mut improper = improper?;
    proper.sort_by(|x, y| x.re.abs().total_cmp(&y.re.abs()));
    improper.sort_by(|x, y| x.re.abs().total_cmp(&y.re.abs()));

    let proper = proper
        .into_iter()
        .take(n_proper)
        .enumerate()
        .map(|(i, k)| Pole::new(i as i32 + 1, k))
        .collect();
    let improper = improper
        .into_iter()
        .take(n_improper)
        .enumerate()
        .map(|(i, k)| Pole::new(-(i as i32) - 1, k))
        .collect();
    Ok(PoleSet {
        potential: *pot,
        proper,
        improper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reference_potential() -> DeltaShellPotential {
        DeltaShellPotential::new(4.5 * PI, 1.0).unwrap()
    }

    #[test]
    fn residual_of_printed_first_pole_is_small() {
        // Five printed decimals put the exact root within 5e-6·√2 of the
        // printed value, so the residual is bounded by |f'| times that radius.
        let pot = reference_potential();
        let k = C64::new(3.13260, -0.18350);
        let r = pole_equation_residual(k, &pot).unwrap();
        let bound = residual_derivative(k, &pot).norm() * 5e-6 * 2f64.sqrt();
        assert!(r.norm() < bound, "{} vs {}", r.norm(), bound);
        assert!(r.norm() < 2e-4);
    }

    #[test]
    fn residual_of_printed_singular_pole_is_bounded_by_rounding() {
        // The exact root is -9π/2 + 0i; the printed Im part 0.00001 is itself
        // off by 1e-5, so the residual is bounded by |f'| ≈ 28.4 times a
        // distance of √(5e-6² + 1.5e-5²).
        let pot = reference_potential();
        let k = C64::new(-14.13717, 0.00001);
        let r = pole_equation_residual(k, &pot).unwrap();
        let bound = residual_derivative(k, &pot).norm() * (5e-6f64.hypot(1.5e-5));
        assert!(r.norm() < bound, "{} vs {}", r.norm(), bound);
        assert!(residual(C64::new(-4.5 * PI, 0.0), &pot).norm() < 1e-13);
    }

    #[test]
    fn first_quadrant_point_is_not_a_root() {
        let r = pole_equation_residual(C64::new(1.0, 1.0), &reference_potential()).unwrap();
        assert!(r.norm() > 1.0);
        assert!(pole_equation_residual(C64::new(0.0, 0.0), &reference_potential()).is_err());
    }

    #[test]
    fn counting_examples() {
        let pot = reference_potential();
        // k_11 ≈ 34.547 - 0.886i also falls inside [0, 35] × [-1, 0].
        let strip = Rect::new(0.0, 35.0, -1.0, 0.0).unwrap();
        assert_eq!(count_roots_in_rectangle(&strip, &pot).unwrap(), 11);
        let ten = Rect::new(0.0, 33.0, -1.0, 0.0).unwrap();
        assert_eq!(count_roots_in_rectangle(&ten, &pot).unwrap(), 10);
        let q1 = Rect::new(1.0, 2.0, 1.0, 2.0).unwrap();
        assert_eq!(count_roots_in_rectangle(&q1, &pot).unwrap(), 0);
        let sing = Rect::new(-15.0, -13.0, -0.1, 0.1).unwrap();
        assert_eq!(count_roots_in_rectangle(&sing, &pot).unwrap(), 1);
    }

    #[test]
    fn origin_is_not_counted() {
        let pot = reference_potential();
        let around = Rect::new(-0.5, 0.5, -0.5, 0.5).unwrap();
        assert_eq!(count_roots_in_rectangle(&around, &pot).unwrap(), 0);
    }

    #[test]
    fn no_roots_near_imaginary_axis() {
        for b in [0.1, 1.0, 4.5 * PI, 40.0] {
            let pot = DeltaShellPotential::new(b, 1.0).unwrap();
            let strip = Rect::new(-1e-6, 1e-6, -5.0, 5.0).unwrap();
            assert_eq!(count_roots_in_rectangle(&strip, &pot).unwrap(), 0);
        }
    }

    #[test]
    fn asymptotic_real_parts() {
        let set = find_poles(&reference_potential(), 10, 10).unwrap();
        for p in &set.proper {
            assert!((p.alpha() - f64::from(p.index) * PI).abs() < 0.5);
        }
        for p in set.improper.iter().skip(4) {
            let m = f64::from(p.index.abs());
            assert!((p.alpha() + (2.0 * m - 1.0) * PI / 2.0).abs() < 0.5);
        }
    }

    #[test]
    fn proper_pole_invariants() {
        let set = find_poles(&reference_potential(), 12, 12).unwrap();
        for w in set.proper.windows(2) {
            assert!(w[0].alpha() < w[1].alpha());
            assert!(w[0].beta() < w[1].beta());
        }
        for p in &set.proper {
            assert_eq!(p.quadrant, Quadrant::Fourth);
            assert!(p.alpha() > p.beta() && p.beta() > 0.0);
            let (e, g) = resonance_parameters(p).unwrap();
            assert!(e > g);
        }
        for p in set.all() {
            assert!(residual(p.k, &set.potential).norm() < 1e-10);
            assert!(!(p.k.re > 0.0 && p.k.im > 0.0));
            assert!(p.k.re.abs() > 1e-6);
        }
        assert_eq!(set.get(-5).unwrap().quadrant, Quadrant::RealAxis);
        assert_eq!(set.get(-1).unwrap().quadrant, Quadrant::Second);
        assert_eq!(set.get(-6).unwrap().quadrant, Quadrant::Third);
    }

    #[test]
    fn resonance_parameter_examples() {
        let p = Pole::new(1, C64::new(3.13260, -0.18350));
        let (e, g) = resonance_parameters(&p).unwrap();
        assert_abs_diff_eq!(e, 9.7795, epsilon = 1e-3);
        assert_abs_diff_eq!(g, 2.2993, epsilon = 1e-3);
        assert_abs_diff_eq!(e / g, 4.25, epsilon = 0.01);
        let edge = Pole::new(1, C64::new(2.0, -2.0));
        assert_eq!(resonance_parameters(&edge).unwrap().0, 0.0);
        assert!(resonance_parameters(&Pole::new(-1, C64::new(-3.0, 0.2))).is_err());
    }

    #[test]
    fn find_poles_is_deterministic() {
        let pot = reference_potential();
        let a = find_poles(&pot, 15, 15).unwrap();
        let b = find_poles(&pot, 15, 15).unwrap();
        for (x, y) in a.all().zip(b.all()) {
            assert_eq!(x.k.re.to_bits(), y.k.re.to_bits());
            assert_eq!(x.k.im.to_bits(), y.k.im.to_bits());
        }
    }

    #[test]
    fn deep_poles_converge_to_rounding() {
        // past |k| ≈ 500 the residual floor alone exceeds 1e-10
        let set = find_poles(&reference_potential(), 300, 1).unwrap();
        let last = set.proper.last().unwrap().k;
        assert!((last.re - 300.0 * PI).abs() < 0.05, "{last}");
        for p in &set.proper {
            assert!(residual(p.k, &reference_potential()).norm() < 1e-10 * p.k.norm());
        }
    }

    #[test]
    fn rejects_zero_counts() {
        assert!(find_poles(&reference_potential(), 0, 3).is_err());
    }

    #[test]
    fn weak_and_strong_shells() {
        for b in [0.1, 1.0, 30.0] {
            let pot = DeltaShellPotential::new(b, 1.0).unwrap();
            let set = find_poles(&pot, 20, 20).unwrap();
            assert_eq!(set.proper.len(), 20);
            assert_eq!(set.improper.len(), 20);
            for p in set.all() {
                assert!(residual(p.k, &pot).norm() < 1e-10);
            }
        }
    }
}
