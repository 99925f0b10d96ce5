//! Problem parameters on the critical hyperbola.
//!
//! The pair `(p, q)` always satisfies `1/(p+1) + 1/(q+1) = (n-2)/n`; `q` is
//! derived from `(n, p)` and never accepted on its own.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of `p` relative to the border exponent `n/(n-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseTag {
    /// `p > n/(n-2)`: both components decay like the fundamental solution.
    Super,
    /// `p < n/(n-2)`: `U` decays like `r^{-((n-2)p-2)}`.
    Sub,
    /// `p = n/(n-2)`.
    Border,
}

/// Classification of `p` against condition (P).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionClass {
    /// `n/(n-2) < p < (n+2)/(n-2)`.
    CaseI,
    /// `p_n < p < n/(n-2)`.
    CaseII,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionP {
    pub class: ConditionClass,
    pub p_n: f64,
}

/// Bubble scaling exponents: `U_δ = δ^{-su} U(·/δ)`, `V_δ = δ^{-sv} V(·/δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingExponents {
    pub su: f64,
    pub sv: f64,
}

const BORDER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub case_tag: CaseTag,
}

/// Solves the critical hyperbola for `q`.
pub fn critical_exponent(n: usize, p: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "dimension n = {n} must be at least 3"
        )));
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::Domain(format!("exponent p = {p} must be positive")));
    }
    let nf = n as f64;
    let rest = (nf - 2.0) / nf - 1.0 / (p + 1.0);
    if rest <= 0.0 {
        return Err(Error::Domain(format!(
            "(n-2)/n - 1/(p+1) = {rest:.3e} <= 0: no positive q on the hyperbola"
        )));
    }
    Ok(1.0 / rest - 1.0)
}

/// `p_n = (2n+1+sqrt((2n+1)^2 - 24(n-2))) / (4(n-2))`.
pub fn lower_threshold(n: usize) -> f64 {
    let nf = n as f64;
    let a = 2.0 * nf + 1.0;
    (a + (a * a - 24.0 * (nf - 2.0)).sqrt()) / (4.0 * (nf - 2.0))
}

/// Border exponent `n/(n-2)`.
pub fn border_exponent(n: usize) -> f64 {
    let nf = n as f64;
    nf / (nf - 2.0)
}

/// Sobolev exponent `(n+2)/(n-2)`, the self-dual point of the hyperbola.
pub fn sobolev_exponent(n: usize) -> f64 {
    let nf = n as f64;
    (nf + 2.0) / (nf - 2.0)
}

/// Parses a real given either as a decimal (`"2.5"`) or a ratio (`"11/3"`).
pub fn parse_real(text: &str) -> Result<f64> {
    let t = text.trim();
    let bad = || Error::Domain(format!("cannot parse '{text}' as a real number"));
    let value = match t.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0.0 {
                return Err(bad());
            }
            num / den
        }
        None => t.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

impl ProblemParams {
    /// Builds parameters with `α = β = ε = 0`.
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::Domain(format!(
                "dimension n = {n} must be at least 4"
            )));
        }
        if !(p > 1.0) {
            return Err(Error::Domain(format!("exponent p = {p} must exceed 1")));
        }
        if p > sobolev_exponent(n) + BORDER_TOL {
            return Err(Error::Domain(format!(
                "p = {p} exceeds (n+2)/(n-2) = {}; only p <= q is supported",
                sobolev_exponent(n)
            )));
        }
        let q = critical_exponent(n, p)?;
        let border = border_exponent(n);
        let case_tag = if (p - border).abs() <= BORDER_TOL * border {
            CaseTag::Border
        } else if p > border {
            CaseTag::Super
        } else {
            CaseTag::Sub
        };
        Ok(Self {
            n,
            p,
            q,
            alpha: 0.0,
            beta: 0.0,
            epsilon: 0.0,
            case_tag,
        })
    }

    pub fn with_perturbation(mut self, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= 0.0) {
            return Err(Error::Domain(format!(
                "perturbation slopes must be nonnegative (alpha = {alpha}, beta = {beta})"
            )));
        }
        self.alpha = alpha;
        self.beta = beta;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::Domain(format!(
                "epsilon = {epsilon} must be nonnegative"
            )));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `p_ε = p + αε`.
    pub fn p_eps(&self) -> f64 {
        self.p + self.alpha * self.epsilon
    }

    /// `q_ε = q + βε`.
    pub fn q_eps(&self) -> f64 {
        self.q + self.beta * self.epsilon
    }

    pub fn hyperbola_residual(&self) -> f64 {
        1.0 / (self.p + 1.0) + 1.0 / (self.q + 1.0) - (self.nf() - 2.0) / self.nf()
    }

    pub fn is_symmetric_point(&self) -> bool {
        (self.p - self.q).abs() <= 1e-12 * self.q
    }

    pub fn condition_p(&self) -> ConditionP {
        check_condition_p(self)
    }

    pub fn scaling(&self) -> ScalingExponents {
        scaling_exponents(self)
    }

    /// Decay exponent of `U`: `n-2` in case (i), `(n-2)p-2` in case (ii).
    pub fn decay_exponent_u(&self) -> f64 {
        let nf = self.nf();
        match self.case_tag {
            CaseTag::Sub => (nf - 2.0) * self.p - 2.0,
            _ => nf - 2.0,
        }
    }

    /// Decay exponent of `V`, always `n-2`.
    pub fn decay_exponent_v(&self) -> f64 {
        self.nf() - 2.0
    }

    /// Rejects parameters the downstream modules cannot handle: the border
    /// case and anything outside (P) other than the self-dual point.
    pub fn require_supported(&self) -> Result<()> {
        if self.case_tag == CaseTag::Border {
            return Err(Error::BorderCase);
        }
        if self.is_symmetric_point() {
            return Ok(());
        }
        let cond = self.condition_p();
        match cond.class {
            ConditionClass::Outside => Err(Error::OutsideConditionP {
                p: self.p,
                p_n: cond.p_n,
                border: border_exponent(self.n),
                upper: sobolev_exponent(self.n),
            }),
            _ => Ok(()),
        }
    }
}

/// Classifies `p` against condition (P). Total.
pub fn check_condition_p(params: &ProblemParams) -> ConditionP {
    let p_n = lower_threshold(params.n);
    let border = border_exponent(params.n);
    let upper = sobolev_exponent(params.n);
    let p = params.p;
    let class = if p > border && p < upper {
        ConditionClass::CaseI
    } else if p > p_n && p < border {
        ConditionClass::CaseII
    } else {
        ConditionClass::Outside
    };
    ConditionP { class, p_n }
}

pub fn scaling_exponents(params: &ProblemParams) -> ScalingExponents {
    let nf = params.nf();
    ScalingExponents {
        su: nf / (params.q + 1.0),
        sv: nf / (params.p + 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn critical_exponent_examples() {
        assert!((critical_exponent(4, 3.0).unwrap() - 3.0).abs() < 1e-14);
        assert!((critical_exponent(4, 2.5).unwrap() - 11.0 / 3.0).abs() < 1e-13);
        assert!((critical_exponent(5, 7.0 / 3.0).unwrap() - 7.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn critical_exponent_rejects_empty_hyperbola() {
        // (n-2)/n = 1/2 for n = 4, so p + 1 <= 2 leaves nothing for q.
        assert!(matches!(critical_exponent(4, 1.0), Err(Error::Domain(_))));
        assert!(matches!(critical_exponent(4, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn condition_p_examples() {
        let c = ProblemParams::new(4, 2.5).unwrap().condition_p();
        assert_eq!(c.class, ConditionClass::CaseI);

        let c = ProblemParams::new(4, 1.9).unwrap().condition_p();
        assert_eq!(c.class, ConditionClass::CaseII);
        assert!((c.p_n - (9.0 + 33f64.sqrt()) / 8.0).abs() < 1e-14);
        assert!((c.p_n - 1.8431).abs() < 1e-4);

        let c = ProblemParams::new(4, 1.5).unwrap().condition_p();
        assert_eq!(c.class, ConditionClass::Outside);
    }

    #[test]
    fn scaling_examples() {
        let s = ProblemParams::new(4, 3.0).unwrap().scaling();
        assert!((s.su - 1.0).abs() < 1e-14 && (s.sv - 1.0).abs() < 1e-14);
        let s = ProblemParams::new(4, 2.5).unwrap().scaling();
        assert!((s.su - 6.0 / 7.0).abs() < 1e-13);
        assert!((s.sv - 8.0 / 7.0).abs() < 1e-13);
    }

    #[test]
    fn case_tags() {
        assert_eq!(
            ProblemParams::new(4, 2.0).unwrap().case_tag,
            CaseTag::Border
        );
        assert_eq!(ProblemParams::new(4, 2.5).unwrap().case_tag, CaseTag::Super);
        assert_eq!(ProblemParams::new(4, 1.9).unwrap().case_tag, CaseTag::Sub);
        assert!(matches!(
            ProblemParams::new(4, 2.0).unwrap().require_supported(),
            Err(Error::BorderCase)
        ));
        assert!(matches!(
            ProblemParams::new(4, 1.5).unwrap().require_supported(),
            Err(Error::OutsideConditionP { .. })
        ));
        ProblemParams::new(4, 3.0)
            .unwrap()
            .require_supported()
            .unwrap();
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ProblemParams::new(3, 4.0).is_err());
        assert!(ProblemParams::new(4, 3.5).is_err());
        assert!(ProblemParams::new(4, 1.0).is_err());
        assert!(ProblemParams::new(4, 2.5)
            .unwrap()
            .with_perturbation(-1.0, 0.0)
            .is_err());
    }

    #[test]
    fn parses_ratios() {
        assert_eq!(parse_real("11/3").unwrap(), 11.0 / 3.0);
        assert_eq!(parse_real(" 2.5 ").unwrap(), 2.5);
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("abc").is_err());
    }

    proptest! {
        #[test]
        fn hyperbola_and_scaling_identities(n in 4usize..9, frac in 0.001f64..0.999) {
            let lo = 2.0 / (n as f64 - 2.0) + 1e-6;
            let lo = lo.max(1.0 + 1e-6);
            let p = lo + frac * (sobolev_exponent(n) - lo);
            let params = ProblemParams::new(n, p).unwrap();
            prop_assert!(params.hyperbola_residual().abs() < 1e-12);
            let s = params.scaling();
            prop_assert!((s.su + s.sv - (n as f64 - 2.0)).abs() < 1e-12);
            prop_assert!(params.q >= params.p - 1e-9);
        }

        #[test]
        fn condition_p_is_monotone_partition(n in 4usize..9, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let upper = sobolev_exponent(n);
            let floor = (2.0 / (n as f64 - 2.0)).max(1.0) + 1e-6;
            let at = |t: f64| floor + t * (upper - floor) * (1.0 - 1e-9);
            let (lo, hi) = if a < b { (at(a), at(b)) } else { (at(b), at(a)) };
            let rank = |p: f64| match ProblemParams::new(n, p).unwrap().condition_p().class {
                ConditionClass::Outside if p <= lower_threshold(n) => 0,
                ConditionClass::CaseII => 1,
                ConditionClass::Outside => 2,
                ConditionClass::CaseI => 3,
            };
            prop_assert!(rank(lo) <= rank(hi));
        }
    }
}
