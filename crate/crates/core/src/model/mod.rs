//! Model parameters and Hamiltonian construction.
//!
//! The reduced Hamiltonian acts on the Fock ladder of normalized states
//! `|s> = (a†)^(N-s) (b†)^s |0> / sqrt((N-s)! s!)`, `s = 1..N`. Its only
//! interaction term moves one step along the ladder, so the matrix is
//! tridiagonal with constant diagonal `NΩ`. The `s = 0` state (no `B` bosons)
//! is an exact eigenstate at `E = NΩ` and is not part of the ladder matrix.

mod full;

pub use full::{
    build_full_hamiltonian, check_sector_invariance, sector_invariance_check, two_species_report, FullBasisIndex,
    FullModelParams, SectorReport, TwoSpeciesReport, FULL_DIM_LIMIT,
};

use serde::Serialize;

use crate::eigen::{eigenvalues_tridiag, Selection};
use crate::{Error, Result};

/// Parameters of the reduced single-species model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    n_total: usize,
    omega: f64,
    lambda: f64,
}

impl ModelParams {
    pub fn new(n_total: usize, omega: f64, lambda: f64) -> Result<Self> {
        if n_total == 0 {
            return Err(Error::InvalidParameter("n_total must be at least 1".into()));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidParameter(format!("omega must be finite, got {omega}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be positive and finite, got {lambda}")));
        }
        Ok(Self { n_total, omega, lambda })
    }

    /// `Ω = 0`, `Λ = 1`: the shape of every spectrum up to an affine map.
    pub fn unit(n_total: usize) -> Result<Self> {
        Self::new(n_total, 0.0, 1.0)
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The band centre `NΩ`, energy of the ready state and of the `s = 0` state.
    pub fn band_center(&self) -> f64 {
        self.n_total as f64 * self.omega
    }

    /// Reduced energy `ε = |E/N - Ω| / Λ`.
    pub fn epsilon_of(&self, energy: f64) -> f64 {
        (energy / self.n_total as f64 - self.omega).abs() / self.lambda
    }

    /// Same `Ω` and `Λ` with a different particle number.
    pub fn with_n(&self, n_total: usize) -> Result<Self> {
        Self::new(n_total, self.omega, self.lambda)
    }
}

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidParameter("empty tridiagonal matrix".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::LengthMismatch { left: diag.len(), right: offdiag.len() + 1 });
        }
        if let Some(i) = diag.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("diagonal entry {i}")));
        }
        if let Some(i) = offdiag.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("off-diagonal entry {i}")));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Infinity norm, an upper bound on the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.offdiag[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }

    /// `‖(T - λ) v‖₂`.
    pub fn residual(&self, eigenvalue: f64, v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(v).map(|(tv, vi)| (tv - eigenvalue * vi).powi(2)).sum::<f64>().sqrt()
    }

    /// `T + shift·I`.
    pub fn shifted(&self, shift: f64) -> Self {
        Self { diag: self.diag.iter().map(|d| d + shift).collect(), offdiag: self.offdiag.clone() }
    }
}

/// Normalized coefficient vector `Θ_s` over the ladder `s = 1..N`.
///
/// Index `i` of [`WaveProfile::theta`] holds `Θ_{i+1}`. The Fock expansion
/// coefficients `C_s = Θ_s / sqrt(s! (N-s)!)` are derived on demand because the
/// factorials overflow long before `N` gets interesting.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProfile {
    theta: Vec<f64>,
}

impl WaveProfile {
    /// Normalizes `theta` to unit Euclidean norm.
    pub fn from_unnormalized(mut theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidParameter("empty profile".into()));
        }
        let norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NonFinite(format!("profile norm {norm}")));
        }
        theta.iter_mut().for_each(|v| *v /= norm);
        Ok(Self { theta })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Number of bosons `N` (equal to the ladder length).
    pub fn n_total(&self) -> usize {
        self.theta.len()
    }

    /// `Θ_s` for `s` in `1..=N`.
    pub fn at(&self, s: usize) -> f64 {
        self.theta[s - 1]
    }

    /// `(ln |C_s|, sign C_s)` for `s` in `1..=N`.
    pub fn log_fock_coefficient(&self, s: usize) -> (f64, f64) {
        let n = self.n_total();
        let theta = self.at(s);
        let ln = theta.abs().ln() - 0.5 * (ln_factorial(s) + ln_factorial(n - s));
        (ln, theta.signum())
    }

    /// `C_s` in linear scale; `None` above `N = 170`, where `s!` overflows.
    pub fn fock_coefficient(&self, s: usize) -> Option<f64> {
        if self.n_total() > 170 {
            return None;
        }
        let (ln, sign) = self.log_fock_coefficient(s);
        Some(sign * ln.exp())
    }

    /// Flips the overall sign so that the first entry of largest magnitude is
    /// positive. Entries within a relative `1e-9` of the maximum count as ties.
    pub(crate) fn canonicalize_sign(theta: &mut [f64]) {
        let max = theta.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if let Some(lead) = theta.iter().find(|v| v.abs() >= max * (1.0 - 1e-9)) {
            if *lead < 0.0 {
                theta.iter_mut().for_each(|v| *v = -*v);
            }
        }
    }

    pub(crate) fn from_normalized_unchecked(theta: Vec<f64>) -> Self {
        Self { theta }
    }
}

/// `ln n!` by direct summation.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Table of `ln k!` for `k = 0..=n`.
pub fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

/// Off-diagonal element `<s+1| H |s> = -(Λ/N) s sqrt((s+1)(N-s))`.
///
/// # Panics
///
/// If `s` is outside `1..N`.
pub fn coupling_element(s: usize, p: &ModelParams) -> f64 {
    let n = p.n_total;
    assert!(s >= 1 && s < n, "ladder index {s} outside 1..{n}");
    let (s, nf) = (s as f64, n as f64);
    -(p.lambda / nf) * s * ((s + 1.0) * (nf - s)).sqrt()
}

/// Reduced ladder Hamiltonian over `s = 1..N`.
pub fn build_reduced_hamiltonian(p: &ModelParams) -> SymTridiag {
    let n = p.n_total;
    let diag = vec![p.band_center(); n];
    let offdiag = (1..n).map(|s| coupling_element(s, p)).collect();
    SymTridiag { diag, offdiag }
}

/// Ladder levels measured from the band centre, `E - NΩ`, in ascending order.
///
/// Computed as `Λ` times the spectrum of the `Ω = 0, Λ = 1` matrix, so the
/// reduced energies do not lose digits to a large `NΩ` offset.
pub fn shifted_levels(p: &ModelParams, which: Selection) -> Result<Vec<f64>> {
    let unit = build_reduced_hamiltonian(&ModelParams::unit(p.n_total)?);
    let levels = eigenvalues_tridiag(&unit, which)?;
    Ok(levels.into_iter().map(|e| p.lambda * e).collect())
}

/// Number of ladder levels strictly below the band centre.
///
/// The shifted matrix has zero diagonal, so its spectrum is symmetric about
/// zero and, being irreducible, simple. Odd `N` has one exact zero mode.
pub fn lower_branch_len(n_total: usize) -> usize {
    n_total / 2
}
