//! Parameter sweeps over one scenario axis.

use std::fmt;
use std::str::FromStr;

use crate::error::{HarnessError, Result};
use crate::run::{run_scenario, Report};
use crate::scenario::{LambdaSpec, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Lambda,
    Horizon,
    Realizations,
    BaselineN,
}

impl FromStr for SweepAxis {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(Self::Lambda),
            "T" => Ok(Self::Horizon),
            "M" => Ok(Self::Realizations),
            "N_baseline" => Ok(Self::BaselineN),
            other => Err(HarnessError::config("axis", format!("unknown axis {other:?}; use lambda, T, M or N_baseline"))),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lambda => "lambda",
            Self::Horizon => "T",
            Self::Realizations => "M",
            Self::BaselineN => "N_baseline",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub reports: Vec<Report>,
    /// Least-squares slope of `log bias_p1` against `log λ` (λ sweeps only).
    pub slope: Option<f64>,
}

fn as_count(v: f64, path: &str) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(HarnessError::config(path, format!("{v} is not a positive integer")))
    }
}

/// Copy of `base` with one axis set to `value`.
pub fn with_axis(base: &Scenario, axis: SweepAxis, value: f64) -> Result<Scenario> {
    let mut s = base.clone();
    match axis {
        SweepAxis::Lambda => s.lambda = LambdaSpec::Explicit(value),
        SweepAxis::Horizon => s.horizon = value,
        SweepAxis::Realizations => s.realizations = as_count(value, "values")?,
        SweepAxis::BaselineN => {
            if s.baselines.is_empty() {
                return Err(HarnessError::config("baselines", "an N_baseline sweep needs at least one baseline"));
            }
            let n = as_count(value, "values")?;
            for b in &mut s.baselines {
                b.n = n;
            }
        }
    }
    Ok(s)
}

/// Least-squares slope of `log y` on `log x`; `None` with fewer than two
/// usable points.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn sweep(base: &Scenario, axis: SweepAxis, values: &[f64]) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(HarnessError::config("values", "at least one value is required"));
    }
    let reports = values.iter().map(|&v| run_scenario(&with_axis(base, axis, v)?)).collect::<Result<Vec<_>>>()?;
    let slope = if axis == SweepAxis::Lambda {
        let ys: Vec<f64> = reports.iter().map(|r| r.row.bias_p1).collect();
        loglog_slope(values, &ys)
    } else {
        None
    };
    Ok(SweepResult { axis, values: values.to_vec(), reports, slope })
}

/// Parse `8,16,32`.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| HarnessError::config("values", format!("{v:?}: {e}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs = [8.0, 16.0, 32.0, 64.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 / x).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&[1.0], &[1.0]), None);
    }

    #[test]
    fn axis_names_round_trip() {
        for a in [SweepAxis::Lambda, SweepAxis::Horizon, SweepAxis::Realizations, SweepAxis::BaselineN] {
            assert_eq!(a.to_string().parse::<SweepAxis>().unwrap(), a);
        }
        assert!("x".parse::<SweepAxis>().is_err());
    }

    #[test]
    fn values_parse() {
        assert_eq!(parse_values("8, 16,32").unwrap(), vec![8.0, 16.0, 32.0]);
        assert!(parse_values("8,a").is_err());
        assert!(as_count(2.5, "values").is_err());
    }
}
