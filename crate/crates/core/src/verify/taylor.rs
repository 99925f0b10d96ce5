//! Second-order Taylor remainders of the perturbed nonlinearity
//! `f_ε(t) = |t|^{e+cε-1} t` and of `f_ε'` in `ε`.
//!
//! With `L = log|t|`:
//! `ξ = (f_ε - |t|^{e-1}t - cε|t|^{e-1}t L) / ε²` and
//! `η = (f_ε' - e|t|^{e-1} - cε|t|^{e-1}(1 + eL)) / ε²`, bounded by
//! `½ max(1,c²)(|t|^e + |t|^{e+cε}) L²` and
//! `2(e+1) max(1,c²)(|t|^{e-1} + |t|^{e-1+cε})(|L| + L²)`.

use serde::{Deserialize, Serialize};

use super::{Criterion, ExpansionReport, Series};
use crate::error::{Error, Result};

/// `e^x - 1 - x` without cancellation.
fn expm1_minus_x(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let mut term = x * x / 2.0;
        let mut sum = 0.0f64;
        let mut k = 2.0;
        while term.abs() > 1e-18 * sum.abs() || sum == 0.0 {
            sum += term;
            k += 1.0;
            term *= x / k;
            if term == 0.0 {
                break;
            }
        }
        sum
    } else {
        x.exp_m1() - x
    }
}

/// Remainders and bounds at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorBound {
    pub t: f64,
    pub epsilon: f64,
    pub xi: f64,
    pub xi_bound: f64,
    pub eta: f64,
    pub eta_bound: f64,
}

impl TaylorBound {
    pub fn new(e: f64, c: f64, t: f64, epsilon: f64) -> Self {
        let a = t.abs();
        let l = a.ln();
        let x = c * epsilon * l;
        let e2 = epsilon * epsilon;
        let k = c.abs().max(1.0).powi(2);
        let xi = t.signum() * a.powf(e) * expm1_minus_x(x) / e2;
        let eta = a.powf(e - 1.0) * (e * expm1_minus_x(x) + c * epsilon * x.exp_m1()) / e2;
        Self {
            t,
            epsilon,
            xi,
            xi_bound: 0.5 * k * (a.powf(e) + a.powf(e + c * epsilon)) * l * l,
            eta,
            eta_bound: 2.0
                * (e + 1.0)
                * k
                * (a.powf(e - 1.0) + a.powf(e - 1.0 + c * epsilon))
                * (l.abs() + l * l),
        }
    }

    fn ratio(v: f64, bound: f64) -> f64 {
        if v == 0.0 {
            0.0
        } else {
            v.abs() / bound
        }
    }

    pub fn xi_ratio(&self) -> f64 {
        Self::ratio(self.xi, self.xi_bound)
    }

    pub fn eta_ratio(&self) -> f64 {
        Self::ratio(self.eta, self.eta_bound)
    }
}

/// Worst remainder-to-bound ratios over `t_samples × epsilons` for
/// exponent `e` and coefficient `c`; contract `≤ 1`.
pub fn check_f_taylor(
    e: f64,
    c: f64,
    t_samples: &[f64],
    epsilons: &[f64],
) -> Result<ExpansionReport> {
    if t_samples.iter().any(|t| *t == 0.0 || !t.is_finite()) {
        return Err(Error::Domain(
            "t samples must be finite and non-zero".into(),
        ));
    }
    if epsilons.iter().any(|x| !(*x > 0.0 && *x <= 0.1)) {
        return Err(Error::Domain("epsilon samples must lie in (0, 0.1]".into()));
    }
    if !(e > 1.0) || !c.is_finite() {
        return Err(Error::Domain(format!(
            "exponent {e} must exceed 1 and c must be finite"
        )));
    }
    let mut worst_xi = 0.0f64;
    let mut worst_eta = 0.0f64;
    let mut series = Vec::new();
    for &x in epsilons {
        let pts: Vec<TaylorBound> = t_samples
            .iter()
            .map(|&t| TaylorBound::new(e, c, t, x))
            .collect();
        worst_xi = pts
            .iter()
            .map(TaylorBound::xi_ratio)
            .fold(worst_xi, f64::max);
        worst_eta = pts
            .iter()
            .map(TaylorBound::eta_ratio)
            .fold(worst_eta, f64::max);
        series.push(Series::new(
            &format!("xi_ratio_eps{x}"),
            "t",
            t_samples.to_vec(),
            pts.iter().map(TaylorBound::xi_ratio).collect(),
        ));
        series.push(Series::new(
            &format!("eta_ratio_eps{x}"),
            "t",
            t_samples.to_vec(),
            pts.iter().map(TaylorBound::eta_ratio).collect(),
        ));
    }
    let criteria = vec![
        Criterion::at_most("xi_ratio", worst_xi, 1.0),
        Criterion::at_most("eta_ratio", worst_eta, 1.0),
    ];
    Ok(ExpansionReport::new("f_taylor", criteria, series))
}

/// `n` points spaced geometrically over `[lo, hi]`.
pub fn geometric_samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_at_one() {
        let b = TaylorBound::new(3.0, 1.0, 1.0, 0.05);
        assert_eq!(b.xi, 0.0);
        assert_eq!(b.eta, 0.0);
        assert_eq!(b.xi_ratio(), 0.0);
    }

    #[test]
    fn direct_evaluation_at_e() {
        let (q, eps) = (3.0, 0.01);
        let t = std::f64::consts::E;
        let b = TaylorBound::new(q, 1.0, t, eps);
        let direct = (t.powf(q + eps) - t.powf(q) - eps * t.powf(q)) / (eps * eps);
        assert!((b.xi - direct).abs() < 1e-6 * direct.abs());
        assert!(b.xi.abs() <= 0.5 * (t.powf(q) + t.powf(q + eps)));
    }

    #[test]
    fn grid_within_bounds() {
        let ts = geometric_samples(0.1, 10.0, 201);
        let neg: Vec<f64> = ts.iter().map(|t| -t).collect();
        for c in [1.0, 0.5, 2.0] {
            for samples in [&ts, &neg] {
                let r = check_f_taylor(3.0, c, samples, &[0.1, 0.01]).unwrap();
                assert!(r.passed(), "{:?}", r.criteria);
            }
        }
        assert!(check_f_taylor(3.0, 1.0, &[0.0], &[0.1]).is_err());
        assert!(check_f_taylor(3.0, 1.0, &[1.0], &[0.2]).is_err());
    }

    proptest! {
        #[test]
        fn series_matches_direct_formula(x in -0.49f64..0.49) {
            let direct = x.exp_m1() - x;
            prop_assert!((expm1_minus_x(x) - direct).abs() <= 1e-15 + 1e-12 * direct.abs());
        }

        #[test]
        fn remainders_respect_bounds(t in 0.01f64..100.0, e in 1.2f64..6.0, c in -3.0f64..3.0, eps in 0.001f64..0.1) {
            let b = TaylorBound::new(e, c, t, eps);
            prop_assert!(b.xi_ratio() <= 1.0 + 1e-9);
            prop_assert!(b.eta_ratio() <= 1.0 + 1e-9);
        }
    }
}
