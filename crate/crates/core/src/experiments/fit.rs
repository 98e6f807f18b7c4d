//! Single-parameter least-squares fit of `1 − e^{−at}`.

use argmin::core::{CostFunction, Executor};
use argmin::solver::goldensectionsearch::GoldenSectionSearch;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    /// Decay rate (1/time).
    pub a: f64,
    /// Sum of squared residuals.
    pub residual: f64,
}

struct Sse<'a> {
    t: &'a [f64],
    y: &'a [f64],
}

impl Sse<'_> {
    fn eval(&self, a: f64) -> f64 {
        self.t.iter().zip(self.y).map(|(t, y)| (1.0 - (-a * t).exp() - y).powi(2)).sum()
    }
}

impl CostFunction for Sse<'_> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, a: &f64) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.eval(*a))
    }
}

const A_MAX: f64 = 1e3;

/// Fit `y ≈ 1 − e^{−at}` with `a ≥ 0`.
pub fn discard_rate_fit(t: &[f64], y: &[f64]) -> Result<FitResult> {
    if t.len() != y.len() {
        return Err(Error::LengthMismatch(t.len(), y.len()));
    }
    if let Some(&bad) = y.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidProbability(bad));
    }
    if y.iter().all(|&v| v == 0.0) || t.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateSeries);
    }
    let sse = Sse { t, y };
    // the cost is unimodal in a but can be very flat; bracket on a log grid
    let grid: Vec<f64> = (0..=120).map(|k| 1e-6 * 10f64.powf(k as f64 / 13.0)).filter(|a| *a <= A_MAX).collect();
    let best = grid
        .iter()
        .enumerate()
        .min_by(|a, b| sse.eval(*a.1).total_cmp(&sse.eval(*b.1)))
        .map(|(i, _)| i)
        .expect("non-empty grid");
    let lo = if best == 0 { 0.0 } else { grid[best - 1] };
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let init = grid[best];
    let solver = GoldenSectionSearch::new(lo, hi.max(lo + 1e-12))
        .and_then(|s| s.with_tolerance(1e-12))
        .map_err(|e| Error::Parse(e.to_string()))?;
    let res = Executor::new(Sse { t, y }, solver)
        .configure(|s| s.param(init).max_iters(500))
        .run()
        .map_err(|e| Error::Parse(e.to_string()))?;
    let a = res.state().best_param.unwrap_or(init);
    Ok(FitResult { a, residual: sse.eval(a) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn recovers_generator() {
        let t: Vec<f64> = (1..=50).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| 1.0 - (-0.5 * t).exp()).collect();
        let f = discard_rate_fit(&t, &y).unwrap();
        assert!((f.a - 0.5).abs() < 1e-6, "{}", f.a);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(discard_rate_fit(&[1.0, 2.0], &[0.0, 0.0]), Err(Error::DegenerateSeries)));
        assert!(discard_rate_fit(&[1.0], &[0.1, 0.2]).is_err());
        assert!(discard_rate_fit(&[1.0], &[1.5]).is_err());
    }

    proptest! {
        #[test]
        fn fit_is_nonnegative_and_recovers(a in 0.01f64..20.0) {
            let t: Vec<f64> = (1..=30).map(|i| i as f64 * 0.1).collect();
            let y: Vec<f64> = t.iter().map(|t| 1.0 - (-a * t).exp()).collect();
            let f = discard_rate_fit(&t, &y).unwrap();
            prop_assert!(f.a >= 0.0);
            prop_assert!((f.a - a).abs() < 1e-6 * a.max(1.0));
        }
    }
}
