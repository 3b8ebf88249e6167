//! Mutual information and conditional mutual information estimated from
//! samples via entropy differences under a Gaussian-residual assumption.
//!
//! Conditional entropies come from leave-one-out residual variances of a
//! configurable regressor: `H(x | C) = 1/2 ln(2*pi*e * var_loo(x | C))`.
//! MI and CMI are then entropy differences, averaged over both argument
//! orders so the estimate is exactly symmetric in (x, y), and clamped at
//! zero since the true quantities are non-negative.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::math;

/// Leave-one-out residual variance floor; keeps entropies finite on
/// perfectly predictable targets.
pub const VAR_FLOOR: f64 = 1e-12;

/// Default cap on |rho| in the Gaussian closed form; prevents infinite
/// MI on collinear columns.
pub const RHO_GUARD_DEFAULT: f64 = 0.9999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regressor {
    /// Ordinary least squares; matches the Gaussian-noise protocol and is
    /// equivalent to partial correlation under Gaussianity.
    Linear,
    /// Distance-weighted k-nearest-neighbor regression; the nonlinear
    /// option (k defaults to ceil(sqrt(N))).
    Knn,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorConfig {
    pub regressor: Regressor,
    /// Neighbor count for the knn regressor; `None` means ceil(sqrt(N)).
    pub knn_k: Option<usize>,
    /// Estimates below this threshold clamp to zero (must be <= 0).
    pub mi_floor: f64,
    /// Cap on |rho| in the Gaussian closed form.
    pub rho_guard: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            regressor: Regressor::Linear,
            knn_k: None,
            mi_floor: 0.0,
            rho_guard: RHO_GUARD_DEFAULT,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.knn_k {
            if k < 3 {
                return Err(Error::Config(format!("knn_k must be at least 3, got {k}")));
            }
        }
        if !(self.rho_guard > 0.0 && self.rho_guard < 1.0) {
            return Err(Error::Config(format!("rho_guard must be in (0, 1), got {}", self.rho_guard)));
        }
        if self.mi_floor > 0.0 {
            return Err(Error::Config(format!("mi_floor must be <= 0, got {}", self.mi_floor)));
        }
        Ok(())
    }

    fn clamp_mi(&self, v: f64) -> f64 {
        if v < self.mi_floor {
            0.0
        } else {
            v.max(0.0)
        }
    }
}

fn check_series(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::BadSeries(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::BadSeries(format!("need at least 3 samples, got {}", x.len())));
    }
    if !math::is_finite_slice(x) || !math::is_finite_slice(y) {
        return Err(Error::NonFinite("estimator input".to_string()));
    }
    Ok(())
}

/// Gaussian closed-form mutual information `-1/2 ln(1 - rho^2)` with the
/// sample Pearson correlation, |rho| capped at [`RHO_GUARD_DEFAULT`].
/// Exactly symmetric in its arguments.
pub fn gaussian_mi(x: &[f64], y: &[f64]) -> Result<f64> {
    gaussian_mi_guarded(x, y, RHO_GUARD_DEFAULT)
}

pub fn gaussian_mi_guarded(x: &[f64], y: &[f64], rho_guard: f64) -> Result<f64> {
    check_series(x, y)?;
    if math::variance(x) <= 0.0 {
        return Err(Error::DegenerateInput("zero-variance first series".to_string()));
    }
    if math::variance(y) <= 0.0 {
        return Err(Error::DegenerateInput("zero-variance second series".to_string()));
    }
    let mut rho = math::pearson(x, y);
    if math::abs(rho) > rho_guard {
        rho = if rho > 0.0 { rho_guard } else { -rho_guard };
    }
    Ok(-0.5 * math::ln(1.0 - rho * rho))
}

/// Mean squared leave-one-out residual of regressing `target` on
/// `predictors` with the configured regressor, floored at [`VAR_FLOOR`].
/// An empty predictor set reduces to leave-one-out prediction by the mean.
pub fn loo_cond_variance(target: &[f64], predictors: &[&[f64]], cfg: &EstimatorConfig) -> Result<f64> {
    cfg.validate()?;
    let n = target.len();
    if n < 3 + predictors.len() {
        return Err(Error::IllPosedRegression { predictors: predictors.len(), samples: n });
    }
    if !math::is_finite_slice(target) || predictors.iter().any(|p| !math::is_finite_slice(p)) {
        return Err(Error::NonFinite("regression input".to_string()));
    }
    if predictors.iter().any(|p| p.len() != n) {
        return Err(Error::BadSeries("predictor length mismatch".to_string()));
    }
    let sq = match (cfg.regressor, predictors.is_empty()) {
        // LOO mean residuals have a closed form regardless of regressor
        (_, true) => linalg::loo_sq_residuals(target, &[])?,
        (Regressor::Linear, false) => linalg::loo_sq_residuals(target, predictors)?,
        (Regressor::Knn, false) => knn_loo_sq_residuals(target, predictors, cfg),
    };
    Ok(math::mean(&sq).max(VAR_FLOOR))
}

/// Distance-weighted k-NN leave-one-out residuals in predictor space.
fn knn_loo_sq_residuals(target: &[f64], predictors: &[&[f64]], cfg: &EstimatorConfig) -> Vec<f64> {
    let n = target.len();
    let k = cfg
        .knn_k
        .unwrap_or_else(|| {
            let mut k = 1;
            while k * k < n {
                k += 1;
            }
            k
        })
        .clamp(3, n - 1);

    let mut out = Vec::with_capacity(n);
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        dist.clear();
        for j in 0..n {
            if j == i {
                continue;
            }
            let mut d2 = 0.0;
            for p in predictors {
                let d = p[i] - p[j];
                d2 += d * d;
            }
            dist.push((d2, j));
        }
        dist.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut num = 0.0;
        let mut den = 0.0;
        for &(d2, j) in dist.iter().take(k) {
            let w = 1.0 / (math::sqrt(d2) + 1e-9);
            num += w * target[j];
            den += w;
        }
        let pred = num / den;
        let e = target[i] - pred;
        out.push(e * e);
    }
    out
}

fn cond_entropy(target: &[f64], predictors: &[&[f64]], cfg: &EstimatorConfig) -> Result<f64> {
    let var = loo_cond_variance(target, predictors, cfg)?;
    Ok(0.5 * math::ln(2.0 * core::f64::consts::PI * core::f64::consts::E * var))
}

/// Conditional mutual information `I(x; y | cond)` as an entropy
/// difference, averaged over both argument orders (so swapping `x` and
/// `y` gives the bit-identical result) and clamped below at zero.
/// An empty conditioning set reduces this to plain mutual information.
pub fn cond_mi(x: &[f64], y: &[f64], cond: &[&[f64]], cfg: &EstimatorConfig) -> Result<f64> {
    check_series(x, y)?;
    let n = x.len();
    if cond.len() > n / 2 {
        return Err(Error::IllPosedRegression { predictors: cond.len(), samples: n });
    }

    let mut with_y: Vec<&[f64]> = Vec::with_capacity(cond.len() + 1);
    with_y.push(y);
    with_y.extend_from_slice(cond);
    let mut with_x: Vec<&[f64]> = Vec::with_capacity(cond.len() + 1);
    with_x.push(x);
    with_x.extend_from_slice(cond);

    let forward = cond_entropy(x, cond, cfg)? - cond_entropy(x, &with_y, cfg)?;
    let backward = cond_entropy(y, cond, cfg)? - cond_entropy(y, &with_x, cfg)?;
    Ok(cfg.clamp_mi(0.5 * (forward + backward)))
}

/// Mutual information `I(x; y)` under the configured estimator.
pub fn mi(x: &[f64], y: &[f64], cfg: &EstimatorConfig) -> Result<f64> {
    cond_mi(x, y, &[], cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use std::vec::Vec;

    fn bivariate_gaussian(n: usize, rho: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut r = rng::stream(seed, &[0xb1]);
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let z1 = rng::standard_normal(&mut r);
            let z2 = rng::standard_normal(&mut r);
            x.push(z1);
            y.push(rho * z1 + math::sqrt(1.0 - rho * rho) * z2);
        }
        (x, y)
    }

    #[test]
    fn gaussian_mi_zero_at_zero_sample_correlation() {
        // orthogonal by construction: sample rho is exactly 0
        let x = [1.0, 1.0, -1.0, -1.0];
        let y = [1.0, -1.0, 1.0, -1.0];
        assert_eq!(gaussian_mi(&x, &y).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_mi_matches_closed_form_at_sample_rho_08() {
        // y = 0.8 u + 0.6 v with corr(u, v) = 0 and var(u) = var(v)
        // gives sample correlation exactly 0.8
        let u = [1.0, 1.0, -1.0, -1.0];
        let v = [1.0, -1.0, 1.0, -1.0];
        let x = u;
        let y: Vec<f64> = (0..4).map(|i| 0.8 * u[i] + 0.6 * v[i]).collect();
        let got = gaussian_mi(&x, &y).unwrap();
        let expected = -0.5 * math::ln(1.0 - 0.64);
        assert!((got - expected).abs() < 1e-4, "{got} vs {expected}");
        assert!((got - 0.5108).abs() < 1e-4);
    }

    #[test]
    fn identical_series_hits_rho_guard() {
        let x: Vec<f64> = (0..50).map(|i| (i as f64) * 0.3 - 2.0).collect();
        let got = gaussian_mi(&x, &x).unwrap();
        let expected = -0.5 * math::ln(1.0 - RHO_GUARD_DEFAULT * RHO_GUARD_DEFAULT);
        assert!(got.is_finite());
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_is_degenerate_input() {
        let x = [2.0; 10];
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert!(matches!(gaussian_mi(&x, &y), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn loo_variance_of_constant_target_is_floored() {
        let t = [5.0; 20];
        let p: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let v = loo_cond_variance(&t, &[&p], &EstimatorConfig::default()).unwrap();
        assert_eq!(v, VAR_FLOOR);
    }

    #[test]
    fn loo_variance_recovers_noise_level() {
        // target = 2 p + eps, eps ~ N(0, 0.5^2): residual variance 0.25
        let mut r = rng::stream(3, &[1]);
        let n = 5000;
        let p: Vec<f64> = (0..n).map(|_| rng::standard_normal(&mut r)).collect();
        let t: Vec<f64> = p.iter().map(|&v| 2.0 * v + 0.5 * rng::standard_normal(&mut r)).collect();
        let got = loo_cond_variance(&t, &[&p], &EstimatorConfig::default()).unwrap();
        assert!((got - 0.25).abs() < 0.02, "{got}");
    }

    #[test]
    fn loo_variance_empty_predictors_matches_loo_mean_oracle() {
        let y = [0.4, -1.2, 3.3, 0.0, 2.2, -0.7, 1.9];
        let got = loo_cond_variance(&y, &[], &EstimatorConfig::default()).unwrap();
        let n = y.len();
        let mut acc = 0.0;
        for i in 0..n {
            let others: Vec<f64> = (0..n).filter(|&k| k != i).map(|k| y[k]).collect();
            let e = y[i] - math::mean(&others);
            acc += e * e;
        }
        let oracle = acc / n as f64;
        assert!((got - oracle).abs() < 1e-12, "{got} vs {oracle}");
    }

    #[test]
    fn cond_mi_empty_cond_agrees_with_gaussian_closed_form() {
        for (seed, rho) in [(1u64, 0.5), (2, 0.3), (3, 0.7)] {
            let (x, y) = bivariate_gaussian(2000, rho, seed);
            let a = cond_mi(&x, &y, &[], &EstimatorConfig::default()).unwrap();
            let b = gaussian_mi(&x, &y).unwrap();
            assert!((a - b).abs() < 0.02, "rho {rho}: {a} vs {b}");
        }
    }

    #[test]
    fn chain_middle_variable_screens_off() {
        // z1 -> z2 -> z3: I(z1; z3 | z2) should be near zero
        let mut r = rng::stream(8, &[2]);
        let n = 2000;
        let z1: Vec<f64> = (0..n).map(|_| rng::standard_normal(&mut r)).collect();
        let z2: Vec<f64> = z1.iter().map(|&v| 0.9 * v + 0.5 * rng::standard_normal(&mut r)).collect();
        let z3: Vec<f64> = z2.iter().map(|&v| 0.9 * v + 0.5 * rng::standard_normal(&mut r)).collect();
        let cfg = EstimatorConfig::default();
        let screened = cond_mi(&z1, &z3, &[&z2], &cfg).unwrap();
        assert!(screened < 0.02, "{screened}");
        let open = cond_mi(&z1, &z3, &[], &cfg).unwrap();
        assert!(open > 0.2, "{open}");
    }

    #[test]
    fn independent_series_mi_clamps_to_near_zero() {
        let (x, _) = bivariate_gaussian(1500, 0.0, 5);
        let (_, y) = bivariate_gaussian(1500, 0.0, 6);
        let v = cond_mi(&x, &y, &[], &EstimatorConfig::default()).unwrap();
        assert!(v >= 0.0);
        assert!(v < 0.02, "{v}");
    }

    #[test]
    fn oversized_conditioning_set_is_ill_posed() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0];
        let c1 = [1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        let c2 = [0.0, 1.0, 1.0, 0.0, 0.0, 1.0];
        let c3 = [1.0, 1.0, 0.0, 0.0, 1.0, 1.0];
        let c4 = [0.5, 0.25, 0.75, 0.1, 0.9, 0.3];
        let cond: [&[f64]; 4] = [&c1, &c2, &c3, &c4];
        let r = cond_mi(&x, &y, &cond, &EstimatorConfig::default());
        assert!(matches!(r, Err(Error::IllPosedRegression { .. })));
    }

    #[test]
    fn knn_regressor_sees_nonlinear_dependence() {
        // y = x^2 + small noise: linear MI is ~0, knn MI is clearly positive
        let mut r = rng::stream(4, &[9]);
        let n = 600;
        let x: Vec<f64> = (0..n).map(|_| rng::standard_normal(&mut r)).collect();
        let y: Vec<f64> = x.iter().map(|&v| v * v + 0.1 * rng::standard_normal(&mut r)).collect();
        let lin = mi(&x, &y, &EstimatorConfig::default()).unwrap();
        let knn = mi(
            &x,
            &y,
            &EstimatorConfig { regressor: Regressor::Knn, ..Default::default() },
        )
        .unwrap();
        assert!(lin < 0.1, "linear sees {lin}");
        assert!(knn > 0.5, "knn sees {knn}");
    }

    #[test]
    fn cond_mi_is_bitwise_symmetric() {
        let (x, y) = bivariate_gaussian(300, 0.4, 12);
        let (c, _) = bivariate_gaussian(300, 0.0, 13);
        let cfg = EstimatorConfig::default();
        let a = cond_mi(&x, &y, &[&c], &cfg).unwrap();
        let b = cond_mi(&y, &x, &[&c], &cfg).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
