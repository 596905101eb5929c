//! Full two-species Hamiltonian on the occupation simplex.
//!
//! Basis states are `(n_ξ, n_η)` with `n_A = N - n_ξ - n_η ≥ 0`. The model is
//! only tractable densely for small `N`; it serves as an oracle for the reduced
//! ladder and for the decoupling of the two `B` species.

use serde::Serialize;

use super::{build_reduced_hamiltonian, ModelParams};
use crate::eigen::{eig_dense_sym, eigenvalues_tridiag, DenseSym, Selection};
use crate::{Error, Result};

/// Largest basis dimension `(N+1)(N+2)/2` accepted for dense work.
pub const FULL_DIM_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FullModelParams {
    pub n_total: usize,
    pub omega: f64,
    pub lambda_xi: f64,
    pub lambda_eta: f64,
    pub xi: f64,
}

impl FullModelParams {
    pub fn new(n_total: usize, omega: f64, lambda_xi: f64, lambda_eta: f64, xi: f64) -> Result<Self> {
        if n_total == 0 {
            return Err(Error::InvalidParameter("n_total must be at least 1".into()));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidParameter(format!("omega must be finite, got {omega}")));
        }
        for (name, v) in [("lambda_xi", lambda_xi), ("lambda_eta", lambda_eta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(xi >= 0.0 && xi.is_finite()) {
            return Err(Error::InvalidParameter(format!("xi must be non-negative, got {xi}")));
        }
        Ok(Self { n_total, omega, lambda_xi, lambda_eta, xi })
    }

    pub fn dim(&self) -> usize {
        (self.n_total + 1) * (self.n_total + 2) / 2
    }

    /// Reduced model of the `ξ` species alone.
    pub fn reduced_xi(&self) -> ModelParams {
        ModelParams { n_total: self.n_total, omega: self.omega, lambda: self.lambda_xi }
    }

    /// Reduced model of the `η` species alone.
    pub fn reduced_eta(&self) -> ModelParams {
        ModelParams { n_total: self.n_total, omega: self.omega, lambda: self.lambda_eta }
    }
}

/// Bijection between flat indices and occupation pairs `(n_ξ, n_η)`.
///
/// States are ordered by `n_η`, then `n_ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullBasisIndex {
    n_total: usize,
    pairs: Vec<(usize, usize)>,
}

impl FullBasisIndex {
    pub fn new(n_total: usize) -> Self {
        let pairs = (0..=n_total).flat_map(|n_eta| (0..=n_total - n_eta).map(move |n_xi| (n_xi, n_eta))).collect();
        Self { n_total, pairs }
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn pair(&self, index: usize) -> (usize, usize) {
        self.pairs[index]
    }

    pub fn index_of(&self, n_xi: usize, n_eta: usize) -> Option<usize> {
        let n = self.n_total;
        if n_xi + n_eta > n {
            return None;
        }
        Some(n_eta * (n + 1) - n_eta * n_eta.saturating_sub(1) / 2 + n_xi)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, (usize, usize))> + '_ {
        self.pairs.iter().copied().enumerate()
    }
}

/// Dense Hamiltonian `H_0 + V_AB + V_BB` and its basis.
pub fn build_full_hamiltonian(p: &FullModelParams) -> Result<(DenseSym, FullBasisIndex)> {
    let dim = p.dim();
    if dim > FULL_DIM_LIMIT {
        return Err(Error::DimensionGuard { dim, limit: FULL_DIM_LIMIT });
    }
    let basis = FullBasisIndex::new(p.n_total);
    let nf = p.n_total as f64;
    let mut h = DenseSym::zeros(dim);
    for (i, (n_xi, n_eta)) in basis.iter() {
        let n_a = p.n_total - n_xi - n_eta;
        h.set(i, i, nf * p.omega + (p.xi / nf) * (n_xi * n_eta) as f64);
        // b†a†bb lowers n_B by one and raises n_A by one; its adjoint is the
        // same element seen from the other side.
        if n_xi >= 1 {
            let j = basis.index_of(n_xi - 1, n_eta).expect("lower neighbour in simplex");
            let v = -(p.lambda_xi / nf) * (n_xi as f64 - 1.0) * ((n_xi * (n_a + 1)) as f64).sqrt();
            h.set(i, j, v);
        }
        if n_eta >= 1 {
            let j = basis.index_of(n_xi, n_eta - 1).expect("lower neighbour in simplex");
            let v = -(p.lambda_eta / nf) * (n_eta as f64 - 1.0) * ((n_eta * (n_a + 1)) as f64).sqrt();
            h.set(i, j, v);
        }
    }
    Ok((h, basis))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorViolation {
    pub row: (usize, usize),
    pub col: (usize, usize),
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorReport {
    pub invariant: bool,
    pub violators: Vec<SectorViolation>,
}

/// Checks that no matrix element links `n_η = 0` with `n_η ≥ 1`, or
/// `n_ξ = 0` with `n_ξ ≥ 1`. Any nonzero element counts as a violation.
pub fn check_sector_invariance(h: &DenseSym, basis: &FullBasisIndex) -> SectorReport {
    let mut violators = Vec::new();
    for (i, (xi_i, eta_i)) in basis.iter() {
        for (j, (xi_j, eta_j)) in basis.iter().skip(i + 1) {
            let crosses = (eta_i == 0) != (eta_j == 0) || (xi_i == 0) != (xi_j == 0);
            let value = h.get(i, j);
            if crosses && value != 0.0 {
                violators.push(SectorViolation { row: (xi_i, eta_i), col: (xi_j, eta_j), value });
            }
        }
    }
    SectorReport { invariant: violators.is_empty(), violators }
}

pub fn sector_invariance_check(p: &FullModelParams) -> Result<SectorReport> {
    let (h, basis) = build_full_hamiltonian(p)?;
    Ok(check_sector_invariance(&h, &basis))
}

/// Cross-check of the full model against the two reduced ladders.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSpeciesReport {
    pub params: FullModelParams,
    pub dim: usize,
    pub sector_invariant: bool,
    pub violations: usize,
    /// Largest distance from a reduced `ξ` eigenvalue to the full spectrum.
    pub embedding_deviation_xi: f64,
    pub embedding_deviation_eta: f64,
    /// Lowest level with both species present.
    pub mixed_min: f64,
    /// Lowest level with a single species present.
    pub pure_min: f64,
    /// `mixed_min - pure_min`.
    pub mixed_lift: f64,
    /// Mixed-sector levels below the band centre `NΩ`.
    pub mixed_levels_below_center: usize,
    /// Single-species levels strictly between `pure_min` and `mixed_min`.
    pub pure_levels_below_mixed_min: usize,
}

/// Diagonalizes the full model and compares it to the reduced ladders.
pub fn two_species_report(p: &FullModelParams) -> Result<TwoSpeciesReport> {
    let (h, basis) = build_full_hamiltonian(p)?;
    let sector = check_sector_invariance(&h, &basis);
    let full = eig_dense_sym(&h)?.eigenvalues;

    let reduced = |mp: &ModelParams| eigenvalues_tridiag(&build_reduced_hamiltonian(mp), Selection::All);
    let red_xi = reduced(&p.reduced_xi())?;
    let red_eta = reduced(&p.reduced_eta())?;
    let deviation = |levels: &[f64]| {
        levels.iter().map(|e| full.iter().map(|f| (f - e).abs()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };

    let mixed: Vec<usize> = basis.iter().filter(|(_, (x, e))| *x >= 1 && *e >= 1).map(|(i, _)| i).collect();
    let mixed_levels = if mixed.is_empty() { Vec::new() } else { eig_dense_sym(&h.submatrix(&mixed))?.eigenvalues };
    let center = p.n_total as f64 * p.omega;
    let pure_min = red_xi[0].min(red_eta[0]);
    let mixed_min = mixed_levels.first().copied().unwrap_or(f64::INFINITY);
    let pure_levels_below_mixed_min = red_xi.iter().chain(&red_eta).filter(|&&e| e > pure_min && e < mixed_min).count();

    Ok(TwoSpeciesReport {
        params: *p,
        dim: basis.dim(),
        sector_invariant: sector.invariant,
        violations: sector.violators.len(),
        embedding_deviation_xi: deviation(&red_xi),
        embedding_deviation_eta: deviation(&red_eta),
        mixed_min,
        pure_min,
        mixed_lift: mixed_min - pure_min,
        mixed_levels_below_center: mixed_levels.iter().filter(|&&e| e < center).count(),
        pure_levels_below_mixed_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_is_bijective() {
        for n in [1, 2, 5, 12] {
            let b = FullBasisIndex::new(n);
            assert_eq!(b.dim(), (n + 1) * (n + 2) / 2);
            for (i, (x, e)) in b.iter() {
                assert_eq!(b.index_of(x, e), Some(i));
            }
            assert_eq!(b.index_of(n, 1), None);
        }
    }

    #[test]
    fn n2_block_equals_reduced() {
        let p = FullModelParams::new(2, 0.0, 1.0, 1.0, 0.0).unwrap();
        let (h, b) = build_full_hamiltonian(&p).unwrap();
        assert_eq!(h.dim(), 6);
        let i1 = b.index_of(1, 0).unwrap();
        let i2 = b.index_of(2, 0).unwrap();
        let red = build_reduced_hamiltonian(&ModelParams::unit(2).unwrap());
        assert_eq!(h.get(i1, i1), red.diag()[0]);
        assert_eq!(h.get(i2, i2), red.diag()[1]);
        assert_eq!(h.get(i1, i2), red.offdiag()[0]);
    }

    #[test]
    fn xi_sector_matches_reduced_exactly() {
        let p = FullModelParams::new(9, 0.4, 1.3, 0.7, 25.0).unwrap();
        let (h, b) = build_full_hamiltonian(&p).unwrap();
        let red = build_reduced_hamiltonian(&p.reduced_xi());
        for s in 1..=9 {
            let i = b.index_of(s, 0).unwrap();
            assert_eq!(h.get(i, i), red.diag()[s - 1]);
            if s < 9 {
                let j = b.index_of(s + 1, 0).unwrap();
                assert_eq!(h.get(i, j), red.offdiag()[s - 1]);
            }
        }
    }

    #[test]
    fn single_boson_is_diagonal() {
        let p = FullModelParams::new(1, 0.8, 1.0, 2.0, 50.0).unwrap();
        let (h, _) = build_full_hamiltonian(&p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 0.8 } else { 0.0 };
                assert_eq!(h.get(i, j), expect);
            }
        }
    }

    #[test]
    fn interaction_diagonal_entry() {
        let p = FullModelParams::new(10, 0.0, 1.0, 1.0, 100.0).unwrap();
        let (h, b) = build_full_hamiltonian(&p).unwrap();
        let i = b.index_of(2, 3).unwrap();
        assert_abs_diff_eq!(h.get(i, i), 60.0, epsilon = 1e-12);
    }

    #[test]
    fn sectors_decouple() {
        let p = FullModelParams::new(12, 0.3, 1.0, 1.4, 7.0).unwrap();
        assert!(sector_invariance_check(&p).unwrap().invariant);
        let p1 = FullModelParams::new(1, 0.0, 1.0, 1.0, 0.0).unwrap();
        assert!(sector_invariance_check(&p1).unwrap().invariant);
    }

    #[test]
    fn perturbed_matrix_is_flagged() {
        let p = FullModelParams::new(6, 0.0, 1.0, 1.0, 10.0).unwrap();
        let (mut h, b) = build_full_hamiltonian(&p).unwrap();
        let i = b.index_of(3, 0).unwrap();
        let j = b.index_of(3, 1).unwrap();
        h.set(i, j, 1e-3);
        let report = check_sector_invariance(&h, &b);
        assert!(!report.invariant);
        assert_eq!(report.violators.len(), 1);
        assert_eq!(report.violators[0].row, (3, 0));
        assert_eq!(report.violators[0].col, (3, 1));
        assert_eq!(report.violators[0].value, 1e-3);
    }

    #[test]
    fn dimension_guard() {
        let p = FullModelParams::new(140, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(build_full_hamiltonian(&p), Err(Error::DimensionGuard { .. })));
        let p = FullModelParams::new(139, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.dim(), 9870);
    }

    #[test]
    fn params_validation() {
        assert!(FullModelParams::new(0, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(FullModelParams::new(3, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(FullModelParams::new(3, 0.0, 1.0, 1.0, -1.0).is_err());
        assert!(FullModelParams::new(3, 0.0, 1.0, 1.0, 0.0).is_ok());
    }
}
