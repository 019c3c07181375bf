//! Node occupancy of a balanced chain, `∂_t p = a(t) - λ p`.

use super::scheme::BalancedScheme;
use crate::error::{Error, Result};
use crate::tolerances::TOLERANCES;

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

fn check_distribution(p: &[f64], q: usize) -> Result<()> {
    if p.len() != q {
        return Err(Error::DimensionMismatch { expected: q, got: p.len() });
    }
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(Error::Config(format!("{p:?} is not a probability vector")));
    }
    Ok(())
}

/// Closed-form occupancy
/// `p(t) = q(t) + (p0 - q(0)) e^{-λt} - ∫_0^t q̇(τ) e^{-λ(t-τ)} dτ`.
///
/// Starting from `p0 = w(0)` the result is `w(t)` itself.
pub fn occupancy_solution(scheme: &BalancedScheme, p0: &[f64], t: f64) -> Result<Vec<f64>> {
    check_distribution(p0, scheme.nodes())?;
    let lambda = scheme.lambda();
    let q_t = scheme.stationary(t)?;
    let q_0 = scheme.stationary(0.0)?;
    let decay = (-lambda * t).exp();
    let constant = scheme.schedule().is_constant();
    Ok((0..scheme.nodes())
        .map(|i| {
            let memory = if constant {
                0.0
            } else {
                let f = |tau: f64| scheme.stationary_derivative(tau)[i] * (-lambda * (t - tau)).exp();
                adaptive_simpson(&f, 0.0, t, TOLERANCES.quadrature)
            };
            q_t[i] + (p0[i] - q_0[i]) * decay - memory
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::WeightSchedule;

    /// Independent RK4 integration of ∂_t p = a(t) - λ p.
    fn rk4_oracle(scheme: &BalancedScheme, p0: &[f64], t: f64, steps: usize) -> Vec<f64> {
        let h = t / steps as f64;
        let lam = scheme.lambda();
        let rhs = |s: f64, p: &[f64]| -> Vec<f64> {
            let a = scheme.rates(s).unwrap();
            a.iter().zip(p).map(|(a, p)| a - lam * p).collect()
        };
        let mut p = p0.to_vec();
        for k in 0..steps {
            let s = k as f64 * h;
            let add = |p: &[f64], k: &[f64], c: f64| -> Vec<f64> { p.iter().zip(k).map(|(p, k)| p + c * k).collect() };
            let k1 = rhs(s, &p);
            let k2 = rhs(s + h / 2.0, &add(&p, &k1, h / 2.0));
            let k3 = rhs(s + h / 2.0, &add(&p, &k2, h / 2.0));
            let k4 = rhs(s + h, &add(&p, &k3, h));
            for i in 0..p.len() {
                p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        p
    }

    #[test]
    fn simpson_integrates_exponential() {
        let v = adaptive_simpson(&|x: f64| (-3.0 * x).exp(), 0.0, 2.0, 1e-12);
        assert!((v - (1.0 - (-6.0f64).exp()) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn stationary_start_stays_put() {
        let s = BalancedScheme::new(WeightSchedule::constant(vec![0.2, 0.8]).unwrap(), 5.0, 2.0).unwrap();
        for t in [0.0, 0.3, 1.7] {
            let p = occupancy_solution(&s, &[0.2, 0.8], t).unwrap();
            assert!((p[0] - 0.2).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
        }
    }

    #[test]
    fn two_node_relaxation() {
        let s = BalancedScheme::new(WeightSchedule::uniform(2).unwrap(), 4.0, 1.0).unwrap();
        let p = occupancy_solution(&s, &[1.0, 0.0], 1.0).unwrap();
        let e = (-4.0f64).exp();
        assert!((p[0] - (0.5 + 0.5 * e)).abs() < 1e-14);
        assert!((p[1] - (0.5 - 0.5 * e)).abs() < 1e-14);
        let oracle = rk4_oracle(&s, &[1.0, 0.0], 1.0, 4000);
        assert!((p[0] - oracle[0]).abs() < 1e-12);
    }

    #[test]
    fn time_dependent_matches_rk4() {
        let sched = WeightSchedule::tabulated(
            vec![0.0, 0.3, 0.7, 1.0],
            vec![vec![0.5, 0.3, 0.2], vec![0.3, 0.3, 0.4], vec![0.2, 0.5, 0.3], vec![0.4, 0.4, 0.2]],
        )
        .unwrap();
        let s = BalancedScheme::new(sched, 12.0, 1.0).unwrap();
        let p0 = [0.6, 0.1, 0.3];
        for t in [0.25, 0.5, 1.0] {
            let p = occupancy_solution(&s, &p0, t).unwrap();
            let oracle = rk4_oracle(&s, &p0, t, 20_000);
            for i in 0..3 {
                assert!((p[i] - oracle[i]).abs() < 1e-8, "t={t} i={i}: {} vs {}", p[i], oracle[i]);
            }
        }
        // starting on w(0) reproduces w(t)
        let w0 = s.schedule().value(0.0);
        let p = occupancy_solution(&s, &w0, 0.8).unwrap();
        let w = s.schedule().value(0.8);
        for i in 0..3 {
            assert!((p[i] - w[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_invalid_initial_distribution() {
        let s = BalancedScheme::new(WeightSchedule::uniform(2).unwrap(), 4.0, 1.0).unwrap();
        assert!(occupancy_solution(&s, &[0.7, 0.7], 1.0).is_err());
        assert!(occupancy_solution(&s, &[1.0], 1.0).is_err());
    }
}
