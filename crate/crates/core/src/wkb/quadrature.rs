//! Gauss-Legendre rules and adaptive composite integration.

use crate::{Error, Result};

/// Panel tolerances stop halving at this fraction of the requested tolerance,
/// so an endpoint singularity refined along a single path still terminates.
const TOL_FLOOR_RATIO: f64 = 1.0 / (1u64 << 20) as f64;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `order`-point rule on `[-1, 1]`, nodes from Newton iteration on `P_order`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Single application of the rule on `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
    }

    /// Composite rule refined by panel bisection until each panel agrees with
    /// its two halves within its share of `tol`.
    pub fn adaptive<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
        let whole = self.integrate(f, a, b);
        self.refine(f, a, b, whole, tol, tol * TOL_FLOOR_RATIO, 0)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        tol_floor: f64,
        depth: usize,
    ) -> Result<f64> {
        const MAX_DEPTH: usize = 48;
        let m = 0.5 * (a + b);
        let left = self.integrate(f, a, m);
        let right = self.integrate(f, m, b);
        let halves = left + right;
        if !halves.is_finite() {
            return Err(Error::NoConvergence(format!("non-finite integrand on [{a}, {b}]")));
        }
        let rounding = 8.0 * f64::EPSILON * (left.abs() + right.abs());
        if (halves - whole).abs() <= tol.max(rounding) {
            return Ok(halves);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::NoConvergence(format!(
                "adaptive quadrature on [{a}, {b}] did not reach tolerance {tol:e}"
            )));
        }
        let sub_tol = (0.5 * tol).max(tol_floor);
        Ok(self.refine(f, a, m, left, sub_tol, tol_floor, depth + 1)?
            + self.refine(f, m, b, right, sub_tol, tol_floor, depth + 1)?)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}
