//! Ground state, low excitations and the coherent-state picture.

use num_complex::Complex64;
use serde::Serialize;

use crate::eigen::{eigenpairs_tridiag, eigenvalues_tridiag, Selection};
use crate::model::{build_reduced_hamiltonian, ln_factorial_table, lower_branch_len, ModelParams, WaveProfile};
use crate::{Error, Result};

/// Geometry and energetics of the exact ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundReport {
    /// `E_G / N - Ω`.
    pub e_g_per_particle: f64,
    pub x_peak: f64,
    /// Width of `Θ ≈ exp(-(x - x_peak)² / σ²)`.
    pub sigma: f64,
    /// `E_1 - E_0`.
    pub gap: f64,
    /// Set when the fit window had to be widened because `N` is small.
    pub fit_window_widened: bool,
}

/// Result of the coherent-state ansatz `|α_A> ⊗ |α_B>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentReport {
    pub n_a: f64,
    pub n_b: f64,
    /// `<H> - NΩ` at the closed-form minimizer.
    pub energy_shifted: f64,
    /// Minimizer found numerically by golden-section search.
    pub n_b_numeric: f64,
    pub energy_numeric: f64,
    pub alpha_phase: f64,
}

const MIN_FIT_POINTS: usize = 5;

/// Exact ground state profile with peak position, Gaussian width and gap.
///
/// `σ` is read from the curvature of a parabola fitted to `ln|Θ|` over
/// `|x - x_peak| ≤ 2/√N`. For small `N` the window is widened to at least
/// five ladder points.
pub fn ground_state_profile(p: &ModelParams) -> Result<(WaveProfile, GroundReport)> {
    let n = p.n_total();
    if n < 3 {
        return Err(Error::InvalidParameter(format!("ground-state fit needs N ≥ 3, got {n}")));
    }
    let unit = build_reduced_hamiltonian(&ModelParams::unit(n)?);
    let (values, mut vectors) = eigenpairs_tridiag(&unit, Selection::Indices { lo: 0, hi: 2 })?;
    let ground = vectors.swap_remove(0);
    let nf = n as f64;
    let e_g_per_particle = p.lambda() * values[0] / nf;
    let gap = p.lambda() * (values[1] - values[0]);

    let mags: Vec<f64> = ground.theta().iter().map(|v| v.abs()).collect();
    let imax = mags.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).expect("non-empty profile");
    let mut s_peak = (imax + 1) as f64;
    if imax > 0 && imax + 1 < n {
        let (l, c, r) = (mags[imax - 1], mags[imax], mags[imax + 1]);
        let denom = l - 2.0 * c + r;
        if denom < 0.0 {
            s_peak += 0.5 * (l - r) / denom;
        }
    }
    let x_peak = s_peak / nf;

    let mut half_width = 2.0 / nf.sqrt();
    let in_window =
        |hw: f64| (1..=n).filter(|&s| (s as f64 / nf - x_peak).abs() <= hw && mags[s - 1] > 0.0).collect::<Vec<_>>();
    let mut window = in_window(half_width);
    let mut widened = false;
    while window.len() < MIN_FIT_POINTS.min(n) {
        half_width *= 1.5;
        widened = true;
        window = in_window(half_width);
    }
    if widened {
        log::warn!("ground-state fit window widened to ±{half_width:.4} for N = {n}");
    }
    let pts: Vec<(f64, f64)> = window.iter().map(|&s| (s as f64 / nf, mags[s - 1].ln())).collect();
    let curvature = quadratic_fit(&pts)?[2];
    if !(curvature < 0.0) {
        return Err(Error::NoConvergence(format!("ln|Θ| fit has non-negative curvature {curvature}")));
    }
    let sigma = 1.0 / (-curvature).sqrt();

    Ok((ground, GroundReport { e_g_per_particle, x_peak, sigma, gap, fit_window_widened: widened }))
}

/// Least-squares coefficients `[c0, c1, c2]` of `c0 + c1 u + c2 u²` in the
/// original variable, fitted in centred coordinates for conditioning.
fn quadratic_fit(pts: &[(f64, f64)]) -> Result<[f64; 3]> {
    if pts.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, have: pts.len() });
    }
    let m = pts.len() as f64;
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for &(x, y) in pts {
        let u = x - xm;
        let basis = [1.0, u, u * u];
        for i in 0..3 {
            b[i] += basis[i] * y;
            for j in 0..3 {
                a[i][j] += basis[i] * basis[j];
            }
        }
    }
    let c = solve3(a, b).ok_or_else(|| Error::NoConvergence("singular quadratic fit".into()))?;
    // Back to the original variable: c0 + c1 (x - xm) + c2 (x - xm)².
    Ok([c[0] - c[1] * xm + c[2] * xm * xm, c[1] - 2.0 * c[2] * xm, c[2]])
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (dst, src) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *dst -= f * src;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// `E_1 - E_0` of the ladder.
pub fn gap(p: &ModelParams) -> Result<f64> {
    let n = p.n_total();
    if n < 2 {
        return Err(Error::InvalidParameter("gap needs N ≥ 2".into()));
    }
    let unit = build_reduced_hamiltonian(&ModelParams::unit(n)?);
    let v = eigenvalues_tridiag(&unit, Selection::Indices { lo: 0, hi: 2 })?;
    Ok(p.lambda() * (v[1] - v[0]))
}

/// `<α_A, α_B| H - NΩ |α_A, α_B>` with `α = sqrt(N_·) e^{iφ}` on both modes.
///
/// Evaluated from the normal-ordered interaction with complex amplitudes; the
/// common phase cancels term by term.
pub fn coherent_energy(p: &ModelParams, n_b: f64, phase: f64) -> f64 {
    let nf = p.n_total() as f64;
    let rot = Complex64::from_polar(1.0, phase);
    let alpha_a = rot * (nf - n_b).max(0.0).sqrt();
    let alpha_b = rot * n_b.max(0.0).sqrt();
    // b† a† b b  +  b† b† a b
    let scatter =
        alpha_b.conj() * alpha_a.conj() * alpha_b * alpha_b + alpha_b.conj() * alpha_b.conj() * alpha_a * alpha_b;
    -(p.lambda() / nf) * scatter.re
}

/// Closed-form and numerical minimization of the coherent-state energy.
pub fn coherent_variational(p: &ModelParams, phase: f64) -> Result<CoherentReport> {
    if !phase.is_finite() {
        return Err(Error::InvalidParameter(format!("phase {phase} not finite")));
    }
    let nf = p.n_total() as f64;
    let n_b = 0.75 * nf;
    let n_a = nf - n_b;
    let energy_shifted = coherent_energy(p, n_b, phase);

    let (n_b_numeric, energy_numeric) =
        golden_section_min(|x| coherent_energy(p, x, phase), 0.0, nf, 1e-10 * nf.max(1.0));
    Ok(CoherentReport { n_a, n_b, energy_shifted, n_b_numeric, energy_numeric, alpha_phase: phase })
}

/// Minimizes a unimodal function on `[a, b]`.
fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Binomial profile `sqrt(C(N, s)) q^{s/2} (1-q)^{(N-s)/2}` over `s = 1..N`.
fn binomial_profile(n: usize, q: f64) -> Vec<f64> {
    let lf = ln_factorial_table(n);
    let (lq, lr) = (q.ln(), (1.0 - q).ln());
    let logs: Vec<f64> = (1..=n)
        .map(|s| {
            let sf = s as f64;
            0.5 * (lf[n] - lf[s] - lf[n - s]) + 0.5 * sf * lq + 0.5 * (n as f64 - sf) * lr
        })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    logs.into_iter().map(|l| (l - top).exp()).collect()
}

/// Projection of the coherent ground state onto the `N`-boson ladder.
pub fn projected_coherent_profile(p: &ModelParams) -> Result<WaveProfile> {
    let n = p.n_total();
    if n < 2 {
        return Err(Error::InvalidParameter("projection needs N ≥ 2".into()));
    }
    WaveProfile::from_unnormalized(binomial_profile(n, 0.75))
}

/// One-quasiparticle state `(α_B a† - α_A b†)|G'>` projected onto the
/// `(N+1)`-boson ladder, for the `N`-boson ground-state amplitudes.
pub fn quasiparticle_profile(p: &ModelParams) -> Result<WaveProfile> {
    let n = p.n_total();
    if n < 2 {
        return Err(Error::InvalidParameter("quasiparticle needs N ≥ 2".into()));
    }
    let nf = n as f64;
    let (n_a, n_b) = (0.25 * nf, 0.75 * nf);
    let beta = binomial_profile(n + 1, 0.75);
    let theta = beta
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let s = (i + 1) as f64;
            b * (n_b * (nf + 1.0 - s) - n_a * s)
        })
        .collect();
    WaveProfile::from_unnormalized(theta)
}

/// `|<a, b>|`.
pub fn overlap(a: &WaveProfile, b: &WaveProfile) -> Result<f64> {
    if a.n_total() != b.n_total() {
        return Err(Error::LengthMismatch { left: a.n_total(), right: b.n_total() });
    }
    let dot: f64 = a.theta().iter().zip(b.theta()).map(|(x, y)| x * y).sum();
    Ok(dot.abs().min(1.0))
}

/// Log-log slope of `ε` against `k_top / N` for exact lower-branch levels
/// with `ε < epsilon_cut`, `k_top = 1` being the level nearest `NΩ`.
pub fn edge_scaling_fit(p: &ModelParams, epsilon_cut: f64) -> Result<EdgeFit> {
    const MIN_POINTS: usize = 10;
    if !(epsilon_cut > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon_cut {epsilon_cut} must be positive")));
    }
    let n = p.n_total();
    let nf = n as f64;
    let unit = build_reduced_hamiltonian(&ModelParams::unit(n)?);
    let lower = lower_branch_len(n);
    let first = crate::eigen::sturm_count(&unit, -epsilon_cut * nf).min(lower);
    let levels = eigenvalues_tridiag(&unit, Selection::Indices { lo: first, hi: lower })?;
    let pts: Vec<(f64, f64)> = levels
        .iter()
        .rev()
        .enumerate()
        .map(|(i, e)| (((i + 1) as f64 / nf).ln(), (-e / nf).ln()))
        .filter(|(_, le)| le.exp() < epsilon_cut)
        .collect();
    if pts.len() < MIN_POINTS {
        return Err(Error::InsufficientData { needed: MIN_POINTS, have: pts.len() });
    }
    let m = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / m, b + y / m));
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms_residual = (pts.iter().map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / m).sqrt();
    Ok(EdgeFit { slope, intercept, points: pts.len(), rms_residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
    pub rms_residual: f64,
}
