//! Classical avalanche dynamics in the intensive variable `y = n_B / N`.
//!
//! Treating the number operators as classical variables, the double commutator
//! `n̈_B = -[H̃, [H̃, n_B]]` gives
//!
//! ```text
//! ÿ = F(y) = 2Λ² [ 3(1-y)y² - y³ + (2y² - (1-y)y)/N - y/N² ]
//! ```
//!
//! with no damping. `½ẏ² + W(y)`, `W' = -F`, `W(0) = 0`, is conserved.

use serde::Serialize;

use crate::{Error, Result};

const DOMAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynParams {
    pub n_total: f64,
    pub lambda: f64,
    pub dt: f64,
    pub t_max: f64,
}

impl DynParams {
    pub fn new(n_total: u64, lambda: f64, dt: f64, t_max: f64) -> Result<Self> {
        if n_total == 0 {
            return Err(Error::InvalidParameter("n_total must be at least 1".into()));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_max must be positive, got {t_max}")));
        }
        Ok(Self { n_total: n_total as f64, lambda, dt, t_max })
    }

    /// Same model with a different step and horizon.
    pub fn with_steps(&self, dt: f64, t_max: f64) -> Result<Self> {
        Self::new(self.n_total as u64, self.lambda, dt, t_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub y: f64,
    pub ydot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    /// `max |I(t) - I(0)|` over the run.
    pub max_abs_drift: f64,
    /// `max_abs_drift` divided by the energy scale of the run,
    /// `max(|I(0)|, max_t |W(y(t))|, 1e-12)`.
    pub max_rel_drift: f64,
}

impl Trajectory {
    pub fn last(&self) -> TrajectorySample {
        *self.samples.last().expect("trajectory has at least the initial sample")
    }

    pub fn max_y(&self) -> f64 {
        self.samples.iter().map(|s| s.y).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `ÿ = F(y)`.
pub fn accel(y: f64, d: &DynParams) -> f64 {
    let n = d.n_total;
    let bulk = 3.0 * (1.0 - y) * y * y - y * y * y;
    let surface = (2.0 * y * y - (1.0 - y) * y) / n;
    2.0 * d.lambda * d.lambda * (bulk + surface - y / (n * n))
}

/// `W(y) = -∫₀^y F = -2Λ² [ y³ - y⁴ + (y³ - y²/2)/N - y²/(2N²) ]`.
pub fn potential_w(y: f64, d: &DynParams) -> f64 {
    let n = d.n_total;
    let y2 = y * y;
    let y3 = y2 * y;
    -2.0 * d.lambda * d.lambda * (y3 - y2 * y2 + (y3 - 0.5 * y2) / n - 0.5 * y2 / (n * n))
}

/// `½ẏ² + W(y)`.
pub fn first_integral(y: f64, ydot: f64, d: &DynParams) -> f64 {
    0.5 * ydot * ydot + potential_w(y, d)
}

fn rk4_step(y: f64, v: f64, dt: f64, d: &DynParams) -> (f64, f64) {
    let k1y = v;
    let k1v = accel(y, d);
    let k2y = v + 0.5 * dt * k1v;
    let k2v = accel(y + 0.5 * dt * k1y, d);
    let k3y = v + 0.5 * dt * k2v;
    let k3v = accel(y + 0.5 * dt * k2y, d);
    let k4y = v + dt * k3v;
    let k4v = accel(y + dt * k3y, d);
    (y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y), v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v))
}

/// Fixed-step classical RK4 from `(y0, v0)` over `[0, t_max]`.
///
/// Steps are `round(t_max / dt)`. Leaving `[0, 1]` by more than `1e-9` aborts
/// with the offending step.
pub fn simulate(y0: f64, v0: f64, d: &DynParams) -> Result<Trajectory> {
    simulate_until(y0, v0, d, f64::INFINITY)
}

/// As [`simulate`], but stops after the first step with `y ≥ y_stop`.
///
/// At finite `N` the conserved first integral carries the trigger orbit past
/// `y = 1` by about `1/(2N)`, so a run that should end on the saturated side
/// needs a threshold below 1.
pub fn simulate_until(y0: f64, v0: f64, d: &DynParams, y_stop: f64) -> Result<Trajectory> {
    if y_stop.is_nan() {
        return Err(Error::InvalidParameter("y_stop is NaN".into()));
    }
    if !(0.0..=1.0).contains(&y0) {
        return Err(Error::InvalidParameter(format!("y0 = {y0} outside [0, 1]")));
    }
    if !v0.is_finite() {
        return Err(Error::InvalidParameter(format!("v0 = {v0} not finite")));
    }
    let steps = (d.t_max / d.dt).round().max(1.0) as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(TrajectorySample { t: 0.0, y: y0, ydot: v0 });
    let i0 = first_integral(y0, v0, d);
    let mut w_scale = potential_w(y0, d).abs();
    let mut max_abs_drift: f64 = 0.0;
    let (mut y, mut v) = (y0, v0);
    for step in 1..=steps {
        (y, v) = rk4_step(y, v, d.dt, d);
        let t = step as f64 * d.dt;
        if !(-DOMAIN_TOL..=1.0 + DOMAIN_TOL).contains(&y) {
            return Err(Error::OutOfDomain { step, t, y });
        }
        max_abs_drift = max_abs_drift.max((first_integral(y, v, d) - i0).abs());
        w_scale = w_scale.max(potential_w(y, d).abs());
        samples.push(TrajectorySample { t, y, ydot: v });
        if y >= y_stop {
            break;
        }
    }
    let scale = i0.abs().max(w_scale).max(1e-12);
    Ok(Trajectory { samples, max_abs_drift, max_rel_drift: max_abs_drift / scale })
}

/// Roots of `F` in `[0, 1]`, ascending. `y = 0` is always one.
///
/// `F(y) / y` is scanned on a uniform grid and every sign change is refined by
/// bisection.
pub fn equilibria(d: &DynParams) -> Vec<f64> {
    const GRID: usize = 4096;
    let reduced = |y: f64| {
        let n = d.n_total;
        3.0 * (1.0 - y) * y - y * y + (2.0 * y - (1.0 - y)) / n - 1.0 / (n * n)
    };
    let mut roots = vec![0.0];
    let mut prev_x = 0.0;
    let mut prev_f = reduced(0.0);
    for i in 1..=GRID {
        let x = i as f64 / GRID as f64;
        let fx = reduced(x);
        if fx == 0.0 {
            roots.push(x);
        } else if prev_f != 0.0 && (prev_f < 0.0) != (fx < 0.0) {
            let (mut lo, mut hi) = (prev_x, x);
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if (reduced(mid) < 0.0) == (prev_f < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = fx;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(n: u64) -> DynParams {
        DynParams::new(n, 1.0, 1e-3, 50.0).unwrap()
    }

    #[test]
    fn accel_spot_values() {
        let d = params(1000);
        assert_eq!(accel(0.0, &d), 0.0);
        let big = params(u64::MAX / 2);
        assert_abs_diff_eq!(accel(0.75, &big), 0.0, epsilon = 1e-15);
        // y = 1: 2Λ²(-1 + 2/N - 1/N²).
        let n = 1000.0;
        assert_abs_diff_eq!(accel(1.0, &d), 2.0 * (-1.0 + 2.0 / n - 1.0 / (n * n)), epsilon = 1e-15);
        assert!(accel(1.0, &d) < 0.0);
    }

    #[test]
    fn accel_matches_operator_form() {
        // n̈_B = 2Λ²(3 n_A n_B² - n_B³ + 2 n_B² - n_A n_B - n_B)/N², divided by N.
        let lambda = 1.3;
        for n in [10u64, 100, 12345] {
            let d = DynParams::new(n, lambda, 1e-3, 1.0).unwrap();
            let nf = n as f64;
            for y in [0.0, 0.1, 0.5, 0.75, 0.93, 1.0] {
                let nb = y * nf;
                let na = nf - nb;
                let ndd = 2.0 * lambda * lambda * (3.0 * na * nb * nb - nb * nb * nb + 2.0 * nb * nb - na * nb - nb)
                    / (nf * nf);
                assert_abs_diff_eq!(accel(y, &d), ndd / nf, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn potential_is_antiderivative() {
        let d = params(37);
        for y in [0.05, 0.3, 0.6, 0.9] {
            let h = 1e-5;
            let dw = (potential_w(y + h, &d) - potential_w(y - h, &d)) / (2.0 * h);
            assert_abs_diff_eq!(dw, -accel(y, &d), epsilon = 1e-8);
        }
        assert_eq!(potential_w(0.0, &d), 0.0);
        let big = params(u64::MAX / 2);
        assert_abs_diff_eq!(potential_w(1.0, &big), 0.0, epsilon = 1e-15);
        // W∞(3/4) = -2 (27/64 - 81/256) = -27/128.
        assert_abs_diff_eq!(potential_w(0.75, &big), -27.0 / 128.0, epsilon = 1e-15);
        assert_eq!(first_integral(0.0, 0.0, &d), 0.0);
    }

    #[test]
    fn sign_structure_infinite_n() {
        let big = params(u64::MAX / 2);
        for i in 1..75 {
            assert!(accel(i as f64 / 100.0, &big) > 0.0);
        }
        for i in 76..100 {
            assert!(accel(i as f64 / 100.0, &big) < 0.0);
        }
    }

    #[test]
    fn fixed_point_stays_put() {
        let t = simulate(0.0, 0.0, &params(100)).unwrap();
        assert!(t.samples.iter().all(|s| s.y == 0.0 && s.ydot == 0.0));
        assert_eq!(t.max_abs_drift, 0.0);
    }

    #[test]
    fn equilibria_cases() {
        let big = params(u64::MAX / 2);
        let r = equilibria(&big);
        assert_eq!(r[0], 0.0);
        assert_abs_diff_eq!(*r.last().unwrap(), 0.75, epsilon = 1e-12);

        let r = equilibria(&params(100));
        // 4y² - (3 + 3/N)y + (1/N + 1/N²) = 0
        let (a, b, c) = (4.0, -3.03, 0.0101);
        let disc: f64 = b * b - 4.0 * a * c;
        let big_root = (-b + disc.sqrt()) / (2.0 * a);
        let small_root = (-b - disc.sqrt()) / (2.0 * a);
        assert_eq!(r.len(), 3);
        assert_abs_diff_eq!(r[1], small_root, epsilon = 1e-12);
        assert_abs_diff_eq!(r[2], big_root, epsilon = 1e-12);
        assert!((r[2] - 0.75).abs() < 0.01);

        let scaled = DynParams::new(100, 7.5, 1e-3, 1.0).unwrap();
        assert_eq!(equilibria(&scaled), r);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(DynParams::new(10, 1.0, 0.0, 1.0).is_err());
        assert!(DynParams::new(10, 1.0, -1e-3, 1.0).is_err());
        assert!(DynParams::new(10, 1.0, 1e-3, 0.0).is_err());
        assert!(DynParams::new(0, 1.0, 1e-3, 1.0).is_err());
        assert!(simulate(1.5, 0.0, &params(10)).is_err());
    }

    #[test]
    fn leaving_domain_aborts() {
        let d = DynParams::new(100, 1.0, 1e-2, 10.0).unwrap();
        match simulate(0.99, 1.0, &d) {
            Err(Error::OutOfDomain { step, y, .. }) => {
                assert!(step >= 1);
                assert!(y > 1.0);
            }
            other => panic!("expected abort, got {other:?}"),
        }
    }

    #[test]
    fn stop_threshold_ends_run_early() {
        let d = DynParams::new(100, 1.0, 1e-2, 100.0).unwrap();
        let t = simulate_until(0.1, 0.0, &d, 0.5).unwrap();
        let last = t.last();
        assert!(last.y >= 0.5 && last.t < 100.0);
        assert!(t.samples[..t.samples.len() - 1].iter().all(|s| s.y < 0.5));
        assert!(simulate_until(0.1, 0.0, &d, f64::NAN).is_err());
    }

    #[test]
    fn time_reversal_returns_home() {
        let d = DynParams::new(1000, 1.0, 1e-3, 20.0).unwrap();
        let fwd = simulate(0.5, 0.0, &d).unwrap().last();
        let back = simulate(fwd.y, -fwd.ydot, &d).unwrap().last();
        assert_abs_diff_eq!(back.y, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(back.ydot, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn drift_small_on_default_horizon() {
        let d = DynParams::new(1000, 1.0, 1e-3, 50.0).unwrap();
        let t = simulate(0.3, 0.1, &d).unwrap();
        let i0 = first_integral(0.3, 0.1, &d);
        assert!(t.max_abs_drift / i0.abs().max(1e-12) <= 1e-8);
    }
}
