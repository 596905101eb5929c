//! Sturm-sequence bisection and inverse iteration for [`SymTridiag`].

use rayon::prelude::*;

use crate::model::{SymTridiag, WaveProfile};
use crate::{Error, Result};

const MAX_BISECTION_STEPS: usize = 300;
const MAX_INVERSE_ITERATIONS: usize = 12;
/// Relative width below which neighbouring eigenvalues are treated as a cluster.
const CLUSTER_TOL: f64 = 1e-10;

/// Which eigenvalues to compute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    All,
    /// Ascending indices `lo..hi` (0-based, half-open).
    Indices {
        lo: usize,
        hi: usize,
    },
    /// Eigenvalues in `[lower, upper)`.
    Interval {
        lower: f64,
        upper: f64,
    },
}

fn pivmin(m: &SymTridiag) -> f64 {
    let max_e2 = m.offdiag().iter().fold(1.0_f64, |acc, e| acc.max(e * e));
    f64::MIN_POSITIVE * max_e2
}

/// Number of eigenvalues strictly below `x`.
///
/// Counts negative pivots of the `LDLᵀ` factorization of `T - x`. Pivots
/// smaller than `pivmin` are replaced by `-pivmin`, the usual guard that keeps
/// the recurrence finite.
pub fn sturm_count(m: &SymTridiag, x: f64) -> usize {
    sturm_count_with(m, x, pivmin(m))
}

fn sturm_count_with(m: &SymTridiag, x: f64, pivmin: f64) -> usize {
    let d = m.diag();
    let e = m.offdiag();
    let mut q = d[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    let mut count = usize::from(q < 0.0);
    for i in 1..d.len() {
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

struct Bracket {
    lo: f64,
    hi: f64,
    abs_tol: f64,
    pivmin: f64,
}

impl Bracket {
    fn new(m: &SymTridiag) -> Self {
        let (glo, ghi) = m.gershgorin();
        let radius = glo.abs().max(ghi.abs()).max(1.0);
        let margin = 4.0 * f64::EPSILON * radius;
        Self { lo: glo - margin, hi: ghi + margin, abs_tol: 2.0 * f64::EPSILON * radius, pivmin: pivmin(m) }
    }

    /// Eigenvalue number `k` (0-based ascending) by bisection.
    fn bisect(&self, m: &SymTridiag, k: usize) -> Result<f64> {
        let (mut lo, mut hi) = (self.lo, self.hi);
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= self.abs_tol || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if sturm_count_with(m, mid, self.pivmin) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::NoConvergence(format!("bisection for eigenvalue {k} stalled in [{lo}, {hi}]")))
    }
}

fn check_finite(m: &SymTridiag) -> Result<()> {
    if m.diag().iter().chain(m.offdiag()).all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("tridiagonal matrix entry".into()))
    }
}

fn index_range(m: &SymTridiag, which: Selection) -> Result<(usize, usize)> {
    let n = m.dim();
    match which {
        Selection::All => Ok((0, n)),
        Selection::Indices { lo, hi } => {
            if lo > hi || hi > n {
                return Err(Error::InvalidParameter(format!("index range {lo}..{hi} invalid for dimension {n}")));
            }
            Ok((lo, hi))
        }
        Selection::Interval { lower, upper } => {
            if !(lower.is_finite() && upper.is_finite()) || lower > upper {
                return Err(Error::InvalidParameter(format!("interval [{lower}, {upper}) invalid")));
            }
            Ok((sturm_count(m, lower), sturm_count(m, upper)))
        }
    }
}

/// Selected eigenvalues in ascending order.
///
/// Every eigenvalue is located independently by bisection on the Sturm count,
/// so none is missed or duplicated and the result does not depend on how the
/// work is scheduled across threads.
pub fn eigenvalues_tridiag(m: &SymTridiag, which: Selection) -> Result<Vec<f64>> {
    check_finite(m)?;
    let (lo, hi) = index_range(m, which)?;
    if m.dim() == 1 {
        return Ok(m.diag()[lo..hi].to_vec());
    }
    let bracket = Bracket::new(m);
    (lo..hi).into_par_iter().map(|k| bracket.bisect(m, k)).collect()
}

/// Banded LU of `T - λ` with partial pivoting.
struct ShiftedLu {
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(m: &SymTridiag, lambda: f64, tiny: f64) -> Self {
        let n = m.dim();
        let mut d: Vec<f64> = m.diag().iter().map(|v| v - lambda).collect();
        let mut du = m.offdiag().to_vec();
        let mut dl = m.offdiag().to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let f = dl[i] / d[i];
                    dl[i] = f;
                    d[i + 1] -= f * du[i];
                } else {
                    dl[i] = 0.0;
                }
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let old_du = du[i];
                du[i] = d[i + 1];
                d[i + 1] = old_du - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
                swapped[i] = true;
            }
        }
        for v in d.iter_mut() {
            if v.abs() < tiny {
                *v = if *v < 0.0 { -tiny } else { tiny };
            }
        }
        Self { d, du, du2, dl, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    for u in against {
        let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(u).for_each(|(a, b)| *a -= dot * b);
    }
}

fn rayleigh(m: &SymTridiag, v: &[f64]) -> f64 {
    m.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Deterministic start vector with no special structure.
fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut state = 0x9E37_79B9_7F4A_7C15_u64 ^ seed.wrapping_mul(0xD1B5_4A32_D192_ED03);
    (0..n)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            0.5 + (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect()
}

fn inverse_iteration(m: &SymTridiag, lambda: f64, against: &[Vec<f64>], seed: u64) -> Result<Vec<f64>> {
    let n = m.dim();
    let scale = m.norm_inf().max(f64::MIN_POSITIVE);
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let lu = ShiftedLu::factor(m, lambda, f64::EPSILON * scale);
    let mut v = start_vector(n, seed);
    orthogonalize(&mut v, against);
    normalize(&mut v);
    let target = 16.0 * f64::EPSILON * scale * (n as f64).sqrt();
    let mut residual = f64::INFINITY;
    for iter in 0..MAX_INVERSE_ITERATIONS {
        lu.solve(&mut v);
        orthogonalize(&mut v, against);
        if normalize(&mut v) == 0.0 || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NoConvergence(format!("inverse iteration at {lambda} collapsed")));
        }
        let r = m.residual(rayleigh(m, &v), &v);
        if iter >= 1 && (r <= target || r >= 0.5 * residual) {
            residual = r.min(residual);
            break;
        }
        residual = r;
    }
    if residual > 1e-9 * scale {
        return Err(Error::NoConvergence(format!(
            "inverse iteration at {lambda} stagnated with residual {residual:e}"
        )));
    }
    WaveProfile::canonicalize_sign(&mut v);
    Ok(v)
}

/// Eigenvector for an eigenvalue known to about `1e-8` accuracy.
///
/// Sign convention: the first entry of largest magnitude is positive.
pub fn eigenvector_tridiag(m: &SymTridiag, eigenvalue: f64) -> Result<WaveProfile> {
    check_finite(m)?;
    if !eigenvalue.is_finite() {
        return Err(Error::NonFinite("eigenvalue".into()));
    }
    let v = inverse_iteration(m, eigenvalue, &[], 0)?;
    Ok(WaveProfile::from_normalized_unchecked(v))
}

/// Selected eigenvalues with their eigenvectors.
///
/// Eigenvalues closer than `1e-10` (relative to the matrix scale) form a
/// cluster; vectors inside a cluster are orthogonalized against each other and
/// their shifts are separated by a few ulps.
pub fn eigenpairs_tridiag(m: &SymTridiag, which: Selection) -> Result<(Vec<f64>, Vec<WaveProfile>)> {
    let values = eigenvalues_tridiag(m, which)?;
    let scale = m.norm_inf().max(1.0);

    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > CLUSTER_TOL * scale {
            clusters.push((start, i));
            start = i;
        }
    }

    let per_cluster: Vec<Vec<Vec<f64>>> = clusters
        .par_iter()
        .map(|&(a, b)| {
            let mut found: Vec<Vec<f64>> = Vec::with_capacity(b - a);
            for (j, &value) in values[a..b].iter().enumerate() {
                let shift = value + j as f64 * 10.0 * f64::EPSILON * scale;
                let v = inverse_iteration(m, shift, &found, (a + j) as u64)?;
                found.push(v);
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;

    let vectors = per_cluster.into_iter().flatten().map(WaveProfile::from_normalized_unchecked).collect();
    Ok((values, vectors))
}
