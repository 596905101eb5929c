//! Continuum limit of the ladder and semiclassical quantization.
//!
//! With `x = s/N` the ladder equation becomes a zero-energy Schrödinger
//! equation for a particle of mass `N` in
//!
//! ```text
//! U(x) = ε / g(x) - 2,      g(x) = x^{3/2} (1 - x)^{1/2},
//! ```
//!
//! where `ε = |E/N - Ω| / Λ`. Levels below the band centre follow from
//! `Φ(ε) = ∫ N sqrt(-U) dx = (k + δ) π` between the turning points `U = 0`.
//! The default offset is `δ = 0`.

mod quadrature;

pub use quadrature::GaussLegendre;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::Selection;
use crate::model::{lower_branch_len, shifted_levels, ModelParams};
use crate::{Error, Result};

/// Upper edge of the reduced energy, `2 g(3/4) = 3√3/8`.
pub const EPSILON_MAX: f64 = 0.649_519_052_838_329;
/// Concentration at the minimum of `U`.
pub const X_CRITICAL: f64 = 0.75;
/// Harmonic level spacing near the well bottom in units of `Λ`, `3/√2`.
pub const HARMONIC_SPACING: f64 = 2.121_320_343_559_642_4;

/// Default Gauss-Legendre order per panel.
pub const DEFAULT_ORDER: usize = 20;
/// Absolute tolerance on `Φ / N`.
const REDUCED_PHASE_TOL: f64 = 1e-13;
const EPSILON_TOL: f64 = 1e-12;

fn check_unit_interval(x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("x = {x} outside (0, 1)")))
    }
}

fn g(x: f64) -> f64 {
    x * x.sqrt() * (1.0 - x).sqrt()
}

/// `g(x) = x^{3/2} (1-x)^{1/2}`, maximal at `x = 3/4`.
pub fn shape_g(x: f64) -> Result<f64> {
    check_unit_interval(x)?;
    Ok(g(x))
}

/// `U(x) = ε / g(x) - 2`.
pub fn potential_u(x: f64, epsilon: f64) -> Result<f64> {
    check_unit_interval(x)?;
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be non-negative")));
    }
    Ok(epsilon / g(x) - 2.0)
}

/// Bisection to machine precision on a monotone branch of `g`.
fn bisect_branch(mut lo: f64, mut hi: f64, target: f64, increasing: bool) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if (g(mid) < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Classical turning points `x1 < 3/4 < x2` with `g(x) = ε/2`.
pub fn turning_points(epsilon: f64) -> Result<(f64, f64)> {
    if !(epsilon > 0.0 && epsilon < EPSILON_MAX) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} outside (0, {EPSILON_MAX})")));
    }
    let target = 0.5 * epsilon;
    Ok((bisect_branch(0.0, X_CRITICAL, target, true), bisect_branch(X_CRITICAL, 1.0, target, false)))
}

/// Phase integral divided by `N`, `∫ sqrt(-U) dx`.
///
/// The substitution `x = x1 + (x2 - x1)(1 - cos θ)/2` turns both
/// square-root zeros at the turning points into smooth factors of `sin θ`.
fn reduced_phase(epsilon: f64, rule: &GaussLegendre, tol: f64) -> Result<f64> {
    if epsilon <= 0.0 {
        return Ok(2f64.sqrt());
    }
    if epsilon >= EPSILON_MAX {
        return Ok(0.0);
    }
    let (x1, x2) = turning_points(epsilon)?;
    let half_width = 0.5 * (x2 - x1);
    let integrand = |theta: f64| {
        let x = x1 + half_width * (1.0 - theta.cos());
        let minus_u = 2.0 - epsilon / g(x);
        minus_u.max(0.0).sqrt() * half_width * theta.sin()
    };
    rule.adaptive(&integrand, 0.0, PI, tol)
}

fn check_phase_args(epsilon: f64, n_total: usize) -> Result<()> {
    if n_total == 0 {
        return Err(Error::InvalidParameter("n_total must be at least 1".into()));
    }
    if !(0.0..EPSILON_MAX).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} outside [0, {EPSILON_MAX})")));
    }
    Ok(())
}

/// `Φ(ε) = ∫_{x1}^{x2} N sqrt(-U(x)) dx`, strictly decreasing from `√2 N`.
pub fn phase_integral(epsilon: f64, n_total: usize) -> Result<f64> {
    phase_integral_with_order(epsilon, n_total, DEFAULT_ORDER)
}

/// [`phase_integral`] with an explicit per-panel Gauss-Legendre order.
pub fn phase_integral_with_order(epsilon: f64, n_total: usize, order: usize) -> Result<f64> {
    check_phase_args(epsilon, n_total)?;
    let rule = GaussLegendre::new(order);
    Ok(n_total as f64 * reduced_phase(epsilon, &rule, REDUCED_PHASE_TOL)?)
}

/// Which end of the lower branch the quantum number counts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `Φ(ε) = (k + δ) π`: nodes counted from the well bottom.
    Bottom,
    /// `Φ(0) - Φ(ε) = k π`: levels counted down from the band centre.
    Top,
}

/// A semiclassical level below the band centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WkbLevel {
    pub k_bottom: usize,
    pub k_top: usize,
    pub epsilon: f64,
    pub energy: f64,
}

/// Quantization condition `Φ = (k + offset) π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantization {
    offset: f64,
}

impl Default for Quantization {
    fn default() -> Self {
        Self { offset: 0.0 }
    }
}

impl Quantization {
    pub fn with_offset(offset: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&offset) {
            return Err(Error::InvalidParameter(format!("offset {offset} outside [0, 1)")));
        }
        Ok(Self { offset })
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Largest admissible `k` for `N` bosons.
    pub fn max_level(&self, n_total: usize, convention: Convention) -> usize {
        let full = 2f64.sqrt() * n_total as f64 / PI;
        let bound = match convention {
            Convention::Bottom => full - self.offset,
            Convention::Top => full,
        };
        // k < bound strictly
        (bound.ceil() as i64 - 1).max(0) as usize
    }

    /// Solves the quantization condition for level `k ≥ 1`.
    pub fn solve_level(&self, k: usize, p: &ModelParams, convention: Convention) -> Result<WkbLevel> {
        let available = self.max_level(p.n_total(), convention);
        if k == 0 || k > available {
            return Err(Error::LevelOutOfRange { requested: k, available });
        }
        let n = p.n_total() as f64;
        let rule = GaussLegendre::new(DEFAULT_ORDER);
        let phase = |eps: f64| reduced_phase(eps, &rule, REDUCED_PHASE_TOL).map(|v| n * v);
        let phase_zero = 2f64.sqrt() * n;
        let target = match convention {
            Convention::Bottom => (k as f64 + self.offset) * PI,
            Convention::Top => phase_zero - k as f64 * PI,
        };

        // Φ decreases from √2 N at ε = 0 to 0 at ε_max.
        let (mut lo, mut hi) = (0.0, EPSILON_MAX);
        while hi - lo > EPSILON_TOL {
            let mid = 0.5 * (lo + hi);
            if phase(mid)? > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let epsilon = 0.5 * (lo + hi);
        let phase_at = phase(epsilon)?;
        let (k_bottom, k_top) = match convention {
            Convention::Bottom => (k, ((phase_zero - phase_at) / PI).round().max(1.0) as usize),
            Convention::Top => ((phase_at / PI - self.offset).round().max(1.0) as usize, k),
        };
        Ok(WkbLevel { k_bottom, k_top, epsilon, energy: n * (p.omega() - epsilon * p.lambda()) })
    }
}

/// [`Quantization::solve_level`] with the default `kπ` condition.
pub fn solve_level(k: usize, p: &ModelParams, convention: Convention) -> Result<WkbLevel> {
    Quantization::default().solve_level(k, p, convention)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelDeviation {
    pub k_bottom: usize,
    pub k_top: usize,
    pub epsilon_wkb: f64,
    pub epsilon_exact: f64,
    pub rel_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WkbComparison {
    pub n_total: usize,
    pub rows: Vec<LevelDeviation>,
    pub max_rel_dev: f64,
    pub median_rel_dev: f64,
}

/// Pairs the `depth` deepest exact levels with bottom-convention WKB levels.
///
/// The depth is truncated to the number of levels both sides provide.
pub fn compare_wkb_exact(p: &ModelParams, depth: usize) -> Result<WkbComparison> {
    compare_wkb_exact_with(p, depth, Quantization::default())
}

pub fn compare_wkb_exact_with(p: &ModelParams, depth: usize, quantization: Quantization) -> Result<WkbComparison> {
    let n = p.n_total();
    let depth = depth.min(lower_branch_len(n)).min(quantization.max_level(n, Convention::Bottom));
    let exact = shifted_levels(p, Selection::Indices { lo: 0, hi: depth })?;
    let rows: Vec<LevelDeviation> = (1..=depth)
        .into_par_iter()
        .map(|k| {
            let level = quantization.solve_level(k, p, Convention::Bottom)?;
            let epsilon_exact = -exact[k - 1] / (n as f64 * p.lambda());
            Ok(LevelDeviation {
                k_bottom: level.k_bottom,
                k_top: level.k_top,
                epsilon_wkb: level.epsilon,
                epsilon_exact,
                rel_dev: (level.epsilon - epsilon_exact).abs() / epsilon_exact,
            })
        })
        .collect::<Result<_>>()?;

    let max_rel_dev = rows.iter().map(|r| r.rel_dev).fold(0.0, f64::max);
    let median_rel_dev = median(rows.iter().map(|r| r.rel_dev).collect());
    Ok(WkbComparison { n_total: n, rows, max_rel_dev, median_rel_dev })
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Mirrors lower-branch energies to the upper branch, `E ↦ 2NΩ - E`.
pub fn reflect_upper_branch(spectrum_lower: &[f64], p: &ModelParams) -> Vec<f64> {
    let twice_center = 2.0 * p.band_center();
    let mut upper: Vec<f64> = spectrum_lower.iter().map(|e| twice_center - e).collect();
    upper.sort_by(f64::total_cmp);
    upper
}
