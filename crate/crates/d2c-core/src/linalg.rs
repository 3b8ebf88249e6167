//! Dense solves for the tiny regression systems used by the estimators.
//!
//! Conditioning sets are truncated upstream, so the normal-equation
//! matrices here are at most a handful of rows; Gauss-Jordan with partial
//! pivoting is plenty.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Invert a symmetric positive (semi)definite `p x p` matrix in place,
/// row-major. Returns `None` on a vanishing pivot.
fn invert(mut a: Vec<f64>, p: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; p * p];
    for i in 0..p {
        inv[i * p + i] = 1.0;
    }
    for col in 0..p {
        // partial pivot
        let mut piv = col;
        for r in (col + 1)..p {
            if crate::math::abs(a[r * p + col]) > crate::math::abs(a[piv * p + col]) {
                piv = r;
            }
        }
        if crate::math::abs(a[piv * p + col]) < 1e-300 {
            return None;
        }
        if piv != col {
            for c in 0..p {
                a.swap(col * p + c, piv * p + c);
                inv.swap(col * p + c, piv * p + c);
            }
        }
        let d = a[col * p + col];
        for c in 0..p {
            a[col * p + c] /= d;
            inv[col * p + c] /= d;
        }
        for r in 0..p {
            if r == col {
                continue;
            }
            let f = a[r * p + col];
            if f == 0.0 {
                continue;
            }
            for c in 0..p {
                a[r * p + c] -= f * a[col * p + c];
                inv[r * p + c] -= f * inv[col * p + c];
            }
        }
    }
    Some(inv)
}

fn gram(design: &[Vec<f64>], p: usize) -> Vec<f64> {
    let mut g = vec![0.0; p * p];
    for row in design {
        for i in 0..p {
            for j in i..p {
                g[i * p + j] += row[i] * row[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            g[i * p + j] = g[j * p + i];
        }
    }
    g
}

/// Leave-one-out squared residuals of an OLS fit of `y` on the given
/// predictor columns (intercept added here). Uses the hat-matrix identity
/// e_loo = e / (1 - h); falls back to a small ridge on a singular Gram
/// matrix and errors only if that still fails.
pub fn loo_sq_residuals(y: &[f64], predictors: &[&[f64]]) -> Result<Vec<f64>> {
    let n = y.len();
    let p = predictors.len() + 1;
    debug_assert!(predictors.iter().all(|c| c.len() == n));

    let mut design: Vec<Vec<f64>> = Vec::with_capacity(n);
    for r in 0..n {
        let mut row = Vec::with_capacity(p);
        row.push(1.0);
        for c in predictors {
            row.push(c[r]);
        }
        design.push(row);
    }

    let g = gram(&design, p);
    let mut ginv = invert(g.clone(), p);
    if !well_conditioned(&ginv, p) {
        // ridge fallback scaled to the Gram diagonal
        let mut trace = 0.0;
        for i in 0..p {
            trace += g[i * p + i];
        }
        let lambda = 1e-8 * trace.max(1.0) / p as f64;
        let mut gr = g;
        for i in 0..p {
            gr[i * p + i] += lambda;
        }
        ginv = invert(gr, p);
        if !well_conditioned(&ginv, p) {
            return Err(Error::SingularDesign);
        }
    }
    let ginv = ginv.unwrap();

    // beta = G^-1 X^T y
    let mut xty = vec![0.0; p];
    for (r, row) in design.iter().enumerate() {
        for i in 0..p {
            xty[i] += row[i] * y[r];
        }
    }
    let mut beta = vec![0.0; p];
    for i in 0..p {
        for j in 0..p {
            beta[i] += ginv[i * p + j] * xty[j];
        }
    }

    let mut out = Vec::with_capacity(n);
    for (r, row) in design.iter().enumerate() {
        let mut fit = 0.0;
        let mut h = 0.0;
        for i in 0..p {
            fit += row[i] * beta[i];
            let mut gi = 0.0;
            for j in 0..p {
                gi += ginv[i * p + j] * row[j];
            }
            h += row[i] * gi;
        }
        let denom = (1.0 - h).max(1e-8);
        let e = (y[r] - fit) / denom;
        out.push(e * e);
    }
    Ok(out)
}

fn well_conditioned(inv: &Option<Vec<f64>>, p: usize) -> bool {
    match inv {
        None => false,
        Some(m) => m.iter().take(p * p).all(|v| v.is_finite()),
    }
}

/// OLS residuals (not leave-one-out); used by the partial-correlation
/// baseline.
pub fn ols_residuals(y: &[f64], predictors: &[&[f64]]) -> Result<Vec<f64>> {
    let n = y.len();
    let p = predictors.len() + 1;
    let mut design: Vec<Vec<f64>> = Vec::with_capacity(n);
    for r in 0..n {
        let mut row = Vec::with_capacity(p);
        row.push(1.0);
        for c in predictors {
            row.push(c[r]);
        }
        design.push(row);
    }
    let g = gram(&design, p);
    let mut ginv = invert(g.clone(), p);
    if !well_conditioned(&ginv, p) {
        let mut trace = 0.0;
        for i in 0..p {
            trace += g[i * p + i];
        }
        let lambda = 1e-8 * trace.max(1.0) / p as f64;
        let mut gr = g;
        for i in 0..p {
            gr[i * p + i] += lambda;
        }
        ginv = invert(gr, p);
        if !well_conditioned(&ginv, p) {
            return Err(Error::SingularDesign);
        }
    }
    let ginv = ginv.unwrap();
    let mut xty = vec![0.0; p];
    for (r, row) in design.iter().enumerate() {
        for i in 0..p {
            xty[i] += row[i] * y[r];
        }
    }
    let mut beta = vec![0.0; p];
    for i in 0..p {
        for j in 0..p {
            beta[i] += ginv[i * p + j] * xty[j];
        }
    }
    let mut out = Vec::with_capacity(n);
    for (r, row) in design.iter().enumerate() {
        let mut fit = 0.0;
        for i in 0..p {
            fit += row[i] * beta[i];
        }
        out.push(y[r] - fit);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec;

    #[test]
    fn loo_empty_predictors_matches_direct_loop() {
        // LOO against the mean: residual_i = x_i - mean(others)
        let y = [1.0, 4.0, 2.0, 8.0, 5.0];
        let got = loo_sq_residuals(&y, &[]).unwrap();
        let n = y.len();
        for i in 0..n {
            let others: Vec<f64> = (0..n).filter(|&k| k != i).map(|k| y[k]).collect();
            let m = crate::math::mean(&others);
            let e = y[i] - m;
            assert!((got[i] - e * e).abs() < 1e-10, "i={i}: {} vs {}", got[i], e * e);
        }
    }

    #[test]
    fn loo_exact_linear_fit_has_zero_residuals() {
        let x: Vec<f64> = (0..20).map(|v| v as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 2.0 * v).collect();
        let got = loo_sq_residuals(&y, &[&x]).unwrap();
        assert!(got.iter().all(|&e| e < 1e-16));
    }

    #[test]
    fn duplicated_predictor_hits_ridge_not_error() {
        let x: Vec<f64> = (0..30).map(|v| (v as f64) * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.0 + v).collect();
        let res = loo_sq_residuals(&y, &[&x, &x]);
        assert!(res.is_ok());
    }

    #[test]
    fn ols_residuals_orthogonal_to_predictor() {
        let x: Vec<f64> = (0..50).map(|v| (v as f64) * 0.3 - 7.0).collect();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| 2.0 * v + ((i * 7919) % 13) as f64).collect();
        let r = ols_residuals(&y, &[&x]).unwrap();
        let dot: f64 = r.iter().zip(&x).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-6, "dot {dot}");
    }
}
