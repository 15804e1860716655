//! Log-space accumulation and least-squares fits.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// `log Σ exp(x_i)` accumulated in the given order. Empty input or all `-inf`
/// gives `-inf`.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let s: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + s.ln()
}

/// Ordinary least squares on explicit columns; the result holds one
/// coefficient per column and the residual sum of squares.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub rss: f64,
}

pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Option<LeastSquares> {
    let rows = y.len();
    let cols = columns.len();
    if cols == 0 || rows < cols || columns.iter().any(|c| c.len() != rows) {
        return None;
    }
    let a = DMatrix::from_fn(rows, cols, |i, j| columns[j][i]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-12).ok()?;
    let r = &a * &x - &b;
    Some(LeastSquares {
        coefficients: x.iter().copied().collect(),
        rss: r.norm_squared(),
    })
}

/// Straight-line fit `y ≈ intercept + slope·x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub rss: f64,
}

pub fn line_fit(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let ls = least_squares(&[vec![1.0; x.len()], x.to_vec()], y)?;
    Some(LineFit {
        intercept: ls.coefficients[0],
        slope: ls.coefficients[1],
        rss: ls.rss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_direct_sum() {
        let v = [0.1f64, -2.0, 3.5];
        let direct = v.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(v) - direct).abs() < 1e-14);
        assert_eq!(log_sum_exp([]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp([f64::NEG_INFINITY, 0.0]), 0.0);
        // no overflow far from zero
        assert!((log_sum_exp([1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn recovers_exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&t| 2.0 - 0.5 * t).collect();
        let f = line_fit(&x, &y).unwrap();
        assert!((f.intercept - 2.0).abs() < 1e-12);
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!(f.rss < 1e-20);
    }

    #[test]
    fn matches_normal_equations() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 3.0, 2.0, 5.0];
        // closed-form slope cov(x,y)/var(x)
        let mx = 2.5;
        let my = 2.75;
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
        let f = line_fit(&x, &y).unwrap();
        assert!((f.slope - sxy / sxx).abs() < 1e-12);
        assert!((f.intercept - (my - f.slope * mx)).abs() < 1e-12);
    }

    #[test]
    fn underdetermined_is_none() {
        assert!(line_fit(&[1.0], &[2.0]).is_none());
    }
}
