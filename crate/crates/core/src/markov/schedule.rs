//! Time-dependent node weights `w(t)` with their derivatives.

use crate::error::{Error, Result};
use crate::tolerances::TOLERANCES;

/// Points used when a property of a schedule is checked on a grid.
pub const VALIDATION_GRID: usize = 1001;

/// A probability vector over `Q` nodes as a differentiable function of time.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSchedule {
    Constant { weights: Vec<f64> },
    /// `w(t) = (1 - t/T) start + (t/T) end`.
    LinearInterpolation { start: Vec<f64>, end: Vec<f64>, horizon: f64 },
    /// Two nodes, `w_1(t) = δ + (1 - 2δ)(1 - t/T)`, `w_2 = 1 - w_1`.
    ClampedAdiabatic { delta: f64, horizon: f64 },
    Tabulated(TabulatedSchedule),
}

fn check_probability_vector(w: &[f64], what: &str) -> Result<()> {
    if w.is_empty() {
        return Err(Error::InvalidSchedule(format!("{what}: no nodes")));
    }
    if let Some((i, x)) = w.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidSchedule(format!("{what}[{i}] = {x} is negative or not finite")));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > TOLERANCES.weight_sum {
        return Err(Error::InvalidSchedule(format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidSchedule(format!("horizon {horizon} must be positive")));
    }
    Ok(())
}

impl WeightSchedule {
    pub fn constant(weights: Vec<f64>) -> Result<Self> {
        check_probability_vector(&weights, "weights")?;
        Ok(Self::Constant { weights })
    }

    /// Uniform weights over `q` nodes.
    pub fn uniform(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidSchedule("no nodes".into()));
        }
        let mut w = vec![1.0 / q as f64; q];
        // make the sum exactly one
        let rest: f64 = w[1..].iter().sum();
        w[0] = 1.0 - rest;
        Self::constant(w)
    }

    pub fn linear(start: Vec<f64>, end: Vec<f64>, horizon: f64) -> Result<Self> {
        check_probability_vector(&start, "start")?;
        check_probability_vector(&end, "end")?;
        check_horizon(horizon)?;
        if start.len() != end.len() {
            return Err(Error::InvalidSchedule(format!(
                "start has {} nodes, end has {}",
                start.len(),
                end.len()
            )));
        }
        Ok(Self::LinearInterpolation { start, end, horizon })
    }

    pub fn clamped_adiabatic(delta: f64, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::InvalidSchedule(format!("clamp delta {delta} must lie in (0, 1/2)")));
        }
        Ok(Self::ClampedAdiabatic { delta, horizon })
    }

    pub fn tabulated(times: Vec<f64>, weights: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Self::Tabulated(TabulatedSchedule::new(times, weights)?))
    }

    pub fn nodes(&self) -> usize {
        match self {
            Self::Constant { weights } => weights.len(),
            Self::LinearInterpolation { start, .. } => start.len(),
            Self::ClampedAdiabatic { .. } => 2,
            Self::Tabulated(t) => t.nodes(),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Self::Constant { .. } => true,
            Self::LinearInterpolation { start, end, .. } => start == end,
            _ => false,
        }
    }

    pub fn value(&self, t: f64) -> Vec<f64> {
        match self {
            Self::Constant { weights } => weights.clone(),
            Self::LinearInterpolation { start, end, horizon } => {
                let s = t / horizon;
                start.iter().zip(end).map(|(a, b)| (1.0 - s) * a + s * b).collect()
            }
            Self::ClampedAdiabatic { delta, horizon } => {
                let w1 = delta + (1.0 - 2.0 * delta) * (1.0 - t / horizon);
                vec![w1, 1.0 - w1]
            }
            Self::Tabulated(tab) => tab.eval(t, 0),
        }
    }

    pub fn derivative(&self, t: f64) -> Vec<f64> {
        match self {
            Self::Constant { weights } => vec![0.0; weights.len()],
            Self::LinearInterpolation { start, end, horizon } => {
                start.iter().zip(end).map(|(a, b)| (b - a) / horizon).collect()
            }
            Self::ClampedAdiabatic { delta, horizon } => {
                let d = (1.0 - 2.0 * delta) / horizon;
                vec![-d, d]
            }
            Self::Tabulated(tab) => tab.eval(t, 1),
        }
    }

    pub fn second_derivative(&self, t: f64) -> Vec<f64> {
        match self {
            Self::Tabulated(tab) => tab.eval(t, 2),
            _ => vec![0.0; self.nodes()],
        }
    }

    /// Check normalization and nonnegativity on a grid over `[0, horizon]`.
    pub fn validate(&self, horizon: f64) -> Result<()> {
        check_horizon(horizon)?;
        for k in 0..VALIDATION_GRID {
            let t = horizon * k as f64 / (VALIDATION_GRID - 1) as f64;
            let w = self.value(t);
            let s: f64 = w.iter().sum();
            if (s - 1.0).abs() > TOLERANCES.weight_sum {
                return Err(Error::InvalidSchedule(format!("weights sum to {s} at t = {t}")));
            }
            if let Some((i, x)) = w.iter().enumerate().find(|(_, x)| **x < 0.0) {
                return Err(Error::InvalidSchedule(format!("w[{i}]({t}) = {x} is negative")));
            }
        }
        Ok(())
    }

    /// Smallest `λ` with `ẇ_j + λ w_j >= 0` on the validation grid, i.e.
    /// `max_t max_j (-ẇ_j / w_j)`, floored at zero. Infinite if some weight
    /// reaches zero while decreasing.
    pub fn minimum_lambda(&self, horizon: f64) -> f64 {
        if let Self::ClampedAdiabatic { delta, horizon: h } = self {
            return (1.0 - 2.0 * delta) / (delta * h);
        }
        let mut need: f64 = 0.0;
        for k in 0..VALIDATION_GRID {
            let t = horizon * k as f64 / (VALIDATION_GRID - 1) as f64;
            for (w, d) in self.value(t).into_iter().zip(self.derivative(t)) {
                if d < 0.0 {
                    need = need.max(if w > 0.0 { -d / w } else { f64::INFINITY });
                }
            }
        }
        need
    }

    /// `sup_t w_1(t) w_2(t)` over `[0, horizon]` on a 10⁴-point grid.
    pub fn sup_pair_product(&self, horizon: f64) -> f64 {
        const GRID: usize = 10_000;
        let mut best: f64 = 0.0;
        for k in 0..=GRID {
            let t = horizon * k as f64 / GRID as f64;
            let w = self.value(t);
            if w.len() >= 2 {
                best = best.max(w[0] * w[1]);
            }
        }
        best
    }
}

/// Natural cubic spline through tabulated probability vectors.
///
/// Splines are linear in the data, so the interpolated components still sum
/// to one; nonnegativity between knots is checked by
/// [`WeightSchedule::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSchedule {
    times: Vec<f64>,
    weights: Vec<Vec<f64>>,
    /// Second derivatives at the knots, `[node][knot]`.
    curvature: Vec<Vec<f64>>,
}

impl TabulatedSchedule {
    pub fn new(times: Vec<f64>, weights: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidSchedule("a tabulated schedule needs at least two knots".into()));
        }
        if times.len() != weights.len() {
            return Err(Error::InvalidSchedule(format!(
                "{} knot times but {} weight rows",
                times.len(),
                weights.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidSchedule("knot times must be finite and strictly increasing".into()));
        }
        let q = weights[0].len();
        for (k, row) in weights.iter().enumerate() {
            if row.len() != q {
                return Err(Error::InvalidSchedule(format!("row {k} has {} nodes, expected {q}", row.len())));
            }
            check_probability_vector(row, &format!("weights[{k}]"))?;
        }
        let curvature = (0..q)
            .map(|i| {
                let y: Vec<f64> = weights.iter().map(|row| row[i]).collect();
                natural_spline_curvature(&times, &y)
            })
            .collect();
        Ok(Self { times, weights, curvature })
    }

    pub fn nodes(&self) -> usize {
        self.weights[0].len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Value (`order = 0`), first or second derivative. Times outside the
    /// table extrapolate the end intervals' cubic.
    fn eval(&self, t: f64, order: u8) -> Vec<f64> {
        let n = self.times.len();
        let k = match self.times.partition_point(|&x| x <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let h = t1 - t0;
        let a = (t1 - t) / h;
        let b = 1.0 - a;
        (0..self.nodes())
            .map(|i| {
                let (y0, y1) = (self.weights[k][i], self.weights[k + 1][i]);
                let (m0, m1) = (self.curvature[i][k], self.curvature[i][k + 1]);
                match order {
                    0 => a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0,
                    1 => (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1,
                    _ => a * m0 + b * m1,
                }
            })
            .collect()
    }
}

/// Knot second derivatives of the natural cubic spline (Thomas algorithm).
fn natural_spline_curvature(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    let inner = n - 2;
    let mut diag = vec![0.0; inner];
    let mut upper = vec![0.0; inner];
    let mut rhs = vec![0.0; inner];
    for j in 0..inner {
        let i = j + 1;
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[j] = 2.0 * (h0 + h1);
        upper[j] = h1;
        rhs[j] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    // forward elimination; sub-diagonal entry j is h0 of row j = x[j+1]-x[j]
    for j in 1..inner {
        let lower = x[j + 1] - x[j];
        let factor = lower / diag[j - 1];
        diag[j] -= factor * upper[j - 1];
        rhs[j] -= factor * rhs[j - 1];
    }
    let mut sol = vec![0.0; inner];
    for j in (0..inner).rev() {
        let next = if j + 1 < inner { upper[j] * sol[j + 1] } else { 0.0 };
        sol[j] = (rhs[j] - next) / diag[j];
    }
    m[1..n - 1].copy_from_slice(&sol);
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_node_table() -> WeightSchedule {
        WeightSchedule::tabulated(
            vec![0.0, 0.3, 0.55, 1.0],
            vec![
                vec![0.25, 0.25, 0.25, 0.25],
                vec![0.4, 0.2, 0.3, 0.1],
                vec![0.3, 0.3, 0.2, 0.2],
                vec![0.1, 0.4, 0.25, 0.25],
            ],
        )
        .unwrap()
    }

    fn all_kinds() -> Vec<WeightSchedule> {
        vec![
            WeightSchedule::constant(vec![0.3, 0.7]).unwrap(),
            WeightSchedule::linear(vec![0.9, 0.1, 0.0], vec![0.2, 0.3, 0.5], 2.0).unwrap(),
            WeightSchedule::clamped_adiabatic(0.1, 1.0).unwrap(),
            four_node_table(),
        ]
    }

    #[test]
    fn normalization_and_zero_sum_derivative() {
        for s in all_kinds() {
            for k in 0..=200 {
                let t = k as f64 / 200.0;
                let w = s.value(t);
                assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12, "{s:?}");
                assert!(w.iter().all(|&x| x >= 0.0));
                assert!(s.derivative(t).iter().sum::<f64>().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn derivative_matches_centered_difference() {
        let h = 1e-5;
        for s in all_kinds() {
            for k in 1..100 {
                let t = k as f64 / 100.0;
                let (p, m) = (s.value(t + h), s.value(t - h));
                let d = s.derivative(t);
                for i in 0..s.nodes() {
                    let fd = (p[i] - m[i]) / (2.0 * h);
                    assert!((fd - d[i]).abs() <= 1e-6 * d[i].abs().max(1.0), "{s:?} t={t} i={i}");
                }
                let d2 = s.second_derivative(t);
                let (dp, dm) = (s.derivative(t + h), s.derivative(t - h));
                for i in 0..s.nodes() {
                    let fd = (dp[i] - dm[i]) / (2.0 * h);
                    assert!((fd - d2[i]).abs() <= 1e-4 * d2[i].abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn spline_interpolates_knots() {
        let s = four_node_table();
        let WeightSchedule::Tabulated(tab) = &s else { unreachable!() };
        for (t, row) in tab.times().iter().zip(tab.weights()) {
            let w = s.value(*t);
            for (a, b) in w.iter().zip(row) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn clamped_minimum_lambda() {
        let s = WeightSchedule::clamped_adiabatic(0.1, 1.0).unwrap();
        assert!((s.minimum_lambda(1.0) - 8.0).abs() < 1e-12);
        let lin = WeightSchedule::linear(vec![0.6, 0.4], vec![0.2, 0.8], 1.0).unwrap();
        // node 0 decreases at rate 0.4, smallest weight 0.2 at t = 1
        assert!((lin.minimum_lambda(1.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(WeightSchedule::constant(vec![0.5, 0.6]).is_err());
        assert!(WeightSchedule::constant(vec![-0.1, 1.1]).is_err());
        assert!(WeightSchedule::clamped_adiabatic(0.5, 1.0).is_err());
        assert!(WeightSchedule::tabulated(vec![0.0, 0.0], vec![vec![1.0], vec![1.0]]).is_err());
        // spline overshoot below zero is caught by the grid check
        let s = WeightSchedule::tabulated(
            vec![0.0, 0.1, 0.2, 1.0],
            vec![vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 0.0]],
        )
        .unwrap();
        assert!(s.validate(1.0).is_err());
    }

    #[test]
    fn sup_pair_product_uniform() {
        let s = WeightSchedule::uniform(2).unwrap();
        assert_eq!(s.sup_pair_product(1.0), 0.25);
    }
}
