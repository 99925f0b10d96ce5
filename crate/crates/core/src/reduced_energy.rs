//! The reduced energy `J_ε(d) = (2/n)𝒜_1 + c ε log ε + 𝒢(d) ε + o(ε)` and
//! its unique maximizer `d*`.
//!
//! `𝒢(d) = G_0 + K log d - L d` with `K, L > 0`, so `d* = K / L` and
//! `𝒢(e^s)` is strictly concave in `s`.

use serde::{Deserialize, Serialize};

use crate::constants::EnergyConstants;
use crate::error::{Error, Result};
use crate::fit::golden_section;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedEnergy {
    pub constants: EnergyConstants,
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub p: f64,
    pub q: f64,
}

/// The three explicit addends of `J_ε(d)`; the `o(ε)` remainder is not modelled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JExpansion {
    pub leading: f64,
    pub eps_log_eps_term: f64,
    pub eps_term: f64,
}

impl JExpansion {
    pub fn total(&self) -> f64 {
        self.leading + self.eps_log_eps_term + self.eps_term
    }
}

/// Summary of the reduced problem as emitted by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedSummary {
    pub d_star: f64,
    pub g_at_d_star: f64,
    pub g_second_at_d_star: f64,
    pub constant_term: f64,
    pub log_coefficient: f64,
    pub linear_coefficient: f64,
    pub leading: f64,
    pub eps_log_eps_coefficient: f64,
    pub eta: f64,
    pub d_star_golden: f64,
    pub d_star_bisection: f64,
}

impl ReducedEnergy {
    pub fn new(constants: EnergyConstants, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::Domain("alpha and beta must be finite".into()));
        }
        let pr = constants.params;
        Ok(Self {
            n: pr.n,
            p: pr.p,
            q: pr.q,
            constants,
            alpha,
            beta,
        })
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `(2/n) 𝒜_1`.
    pub fn leading(&self) -> f64 {
        2.0 / self.nf() * self.constants.a1
    }

    /// `K = (nα/(p+1)² + nβ/(q+1)²) 𝒜_1`, the coefficient of both `log d`
    /// and `ε log ε`.
    pub fn log_coefficient(&self) -> f64 {
        let (p1, q1, n) = (self.p + 1.0, self.q + 1.0, self.nf());
        (n * self.alpha / (p1 * p1) + n * self.beta / (q1 * q1)) * self.constants.a1
    }

    /// `L = (1 - 2/(p+1)) ℬ_2 + (1 - 2/(q+1)) ℬ_1 + (𝒞_1 + 𝒞_2)/2`.
    pub fn linear_coefficient(&self) -> f64 {
        let k = &self.constants;
        (1.0 - 2.0 / (self.p + 1.0)) * k.b2
            + (1.0 - 2.0 / (self.q + 1.0)) * k.b1
            + 0.5 * (k.c1 + k.c2)
    }

    /// The `d`-independent part of `𝒢`.
    pub fn constant_term(&self) -> f64 {
        let k = &self.constants;
        let (p1, q1) = (self.p + 1.0, self.q + 1.0);
        (self.alpha * k.a1 / p1 - self.alpha * k.d1) / p1
            + (self.beta * k.a2 / q1 - self.beta * k.d2) / q1
    }

    pub fn g(&self, d: f64) -> Result<f64> {
        check_d(d)?;
        Ok(self.constant_term() + self.log_coefficient() * d.ln() - self.linear_coefficient() * d)
    }

    pub fn g_prime(&self, d: f64) -> Result<f64> {
        check_d(d)?;
        Ok(self.log_coefficient() / d - self.linear_coefficient())
    }

    pub fn g_second(&self, d: f64) -> Result<f64> {
        check_d(d)?;
        Ok(-self.log_coefficient() / (d * d))
    }

    /// `d* = K / L`.
    pub fn d_star(&self) -> Result<f64> {
        let (k, l) = (self.log_coefficient(), self.linear_coefficient());
        if !(k > 0.0 && l > 0.0) {
            return Err(Error::Domain(format!(
                "G has no interior maximum: log coefficient {k:.6e}, linear coefficient {l:.6e}"
            )));
        }
        Ok(k / l)
    }

    /// Maximizer of `𝒢` by golden-section search in `log d`.
    pub fn d_star_golden(&self) -> Result<f64> {
        self.d_star()?;
        let (c, k, l) = (
            self.constant_term(),
            self.log_coefficient(),
            self.linear_coefficient(),
        );
        let s = golden_section(|s| -(c + k * s - l * s.exp()), -40.0, 40.0, 1e-12);
        Ok(s.exp())
    }

    /// Root of `𝒢'` by bisection in `log d`.
    pub fn d_star_bisection(&self) -> Result<f64> {
        self.d_star()?;
        let (k, l) = (self.log_coefficient(), self.linear_coefficient());
        let gp = |s: f64| k * (-s).exp() - l;
        let (mut lo, mut hi) = (-40.0f64, 40.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if gp(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((0.5 * (lo + hi)).exp())
    }

    pub fn j_expansion(&self, epsilon: f64, d: f64) -> Result<JExpansion> {
        if !(epsilon > 0.0 && epsilon <= 0.1) {
            return Err(Error::Domain(format!(
                "epsilon = {epsilon} must lie in (0, 0.1]"
            )));
        }
        Ok(JExpansion {
            leading: self.leading(),
            eps_log_eps_term: self.log_coefficient() * epsilon * epsilon.ln(),
            eps_term: self.g(d)? * epsilon,
        })
    }

    /// `η` with `d* ∈ (2η, 1/(2η))`.
    pub fn eta(&self) -> Result<f64> {
        let d = self.d_star()?;
        Ok(0.25 * d.min(1.0 / d))
    }

    /// `(d, 𝒢(d))` on a logarithmic grid of `count` points.
    pub fn sample(&self, d_lo: f64, d_hi: f64, count: usize) -> Result<Vec<(f64, f64)>> {
        check_d(d_lo)?;
        if !(d_hi > d_lo) || count < 2 {
            return Err(Error::Domain(
                "sample range must satisfy 0 < d_lo < d_hi and count ≥ 2".into(),
            ));
        }
        let ratio = (d_hi / d_lo).ln();
        (0..count)
            .map(|k| {
                let d = d_lo * (ratio * k as f64 / (count - 1) as f64).exp();
                Ok((d, self.g(d)?))
            })
            .collect()
    }

    pub fn summary(&self) -> Result<ReducedSummary> {
        let d_star = self.d_star()?;
        Ok(ReducedSummary {
            d_star,
            g_at_d_star: self.g(d_star)?,
            g_second_at_d_star: self.g_second(d_star)?,
            constant_term: self.constant_term(),
            log_coefficient: self.log_coefficient(),
            linear_coefficient: self.linear_coefficient(),
            leading: self.leading(),
            eps_log_eps_coefficient: self.log_coefficient(),
            eta: self.eta()?,
            d_star_golden: self.d_star_golden()?,
            d_star_bisection: self.d_star_bisection()?,
        })
    }
}

fn check_d(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("d = {d} must be positive")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::closed_form;
    use crate::params::ProblemParams;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn synthetic() -> ReducedEnergy {
        let k = EnergyConstants::from_values(ProblemParams::new(4, 3.0).unwrap(), [1.0; 8]);
        ReducedEnergy::new(k, 1.0, 1.0).unwrap()
    }

    fn symmetric() -> ReducedEnergy {
        let (a, b, c) = (closed_form::a(), closed_form::b(), closed_form::c());
        let k = EnergyConstants::from_values(
            ProblemParams::new(4, 3.0).unwrap(),
            [a, a, b, b, c, c, 0.0, 0.0],
        );
        ReducedEnergy::new(k, 1.0, 1.0).unwrap()
    }

    #[test]
    fn synthetic_fixture() {
        let re = synthetic();
        assert!((re.g(1.0).unwrap() + 2.375).abs() < 1e-14);
        assert!((re.d_star().unwrap() - 0.25).abs() < 1e-15);
        assert!(re.g(0.0).is_err());
        assert!(re.g(-1.0).is_err());
    }

    #[test]
    fn symmetric_point_d_star() {
        let re = symmetric();
        let d = re.d_star().unwrap();
        assert!((d - closed_form::d_star()).abs() < 1e-12);
        assert!(re.g_prime(d).unwrap().abs() <= 1e-12 * re.linear_coefficient());
        assert!(re.g_second(d).unwrap() < 0.0);
        assert!((re.d_star_golden().unwrap() / d - 1.0).abs() < 1e-6);
        assert!((re.d_star_bisection().unwrap() / d - 1.0).abs() < 1e-10);
        let c = re.j_expansion(0.01, 1.0).unwrap().eps_log_eps_term / (0.01 * 0.01f64.ln());
        assert!((c / (16.0 * PI * PI / 3.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn g_diverges_at_both_ends() {
        let re = symmetric();
        let mid = re.g(re.d_star().unwrap()).unwrap();
        assert!(re.g(1e-12).unwrap() < mid - 100.0);
        assert!(re.g(1e6).unwrap() < mid - 100.0);
    }

    #[test]
    fn single_sign_change_and_log_concavity() {
        let re = symmetric();
        let grid = re.sample(1e-6, 1e4, 1000).unwrap();
        let signs: Vec<bool> = grid
            .iter()
            .map(|(d, _)| re.g_prime(*d).unwrap() > 0.0)
            .collect();
        assert_eq!(signs.windows(2).filter(|w| w[0] != w[1]).count(), 1);
        for w in grid.windows(3) {
            assert!(w[0].1 + w[2].1 - 2.0 * w[1].1 < 1e-9 * w[1].1.abs().max(1.0));
        }
    }

    #[test]
    fn expansion_limits_and_maximum() {
        let re = symmetric();
        let lead = re.j_expansion(1e-3, 0.5).unwrap();
        assert_eq!(lead.leading, 0.5 * closed_form::a());
        let d = re.d_star().unwrap();
        let best = re.j_expansion(0.01, d).unwrap().total();
        for other in [0.5 * d, 0.9 * d, 1.1 * d, 3.0 * d] {
            assert!(re.j_expansion(0.01, other).unwrap().total() < best);
        }
        assert!(re.j_expansion(0.2, d).is_err());
    }

    #[test]
    fn eta_window_contains_d_star() {
        for re in [synthetic(), symmetric()] {
            let (d, eta) = (re.d_star().unwrap(), re.eta().unwrap());
            assert!(2.0 * eta < d && d < 1.0 / (2.0 * eta));
        }
    }

    #[test]
    fn no_maximum_without_perturbation() {
        let mut re = synthetic();
        re.alpha = 0.0;
        re.beta = 0.0;
        assert!(re.d_star().is_err());
    }

    proptest! {
        #[test]
        fn closed_form_is_critical_point(
            a in 1.0f64..200.0, b in 1.0f64..200.0, c in 1.0f64..400.0,
            alpha in 0.05f64..3.0, beta in 0.05f64..3.0, p in 2.05f64..2.95,
        ) {
            let pr = ProblemParams::new(4, p).unwrap();
            let k = EnergyConstants::from_values(pr, [a, a, b, 1.3 * b, c, 0.7 * c, -1.0, 2.0]);
            let re = ReducedEnergy::new(k, alpha, beta).unwrap();
            let d = re.d_star().unwrap();
            prop_assert!(re.g_prime(d).unwrap().abs() <= 1e-12 * re.linear_coefficient());
            prop_assert!((re.d_star_golden().unwrap() / d - 1.0).abs() < 1e-6);
            prop_assert!((re.d_star_bisection().unwrap() / d - 1.0).abs() < 1e-10);
        }
    }
}
