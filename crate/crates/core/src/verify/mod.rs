//! Numerical verification of the δ- and ε-expansions, the kernel identity of
//! the linearized system, the half-space corrections, the bubble scaling
//! table and the Taylor bounds of the perturbed nonlinearity.
//!
//! Every check returns an [`ExpansionReport`] whose verdict is `PASS` iff
//! each of its criteria holds at the declared tolerance.

pub mod ball;
pub mod expansions;
pub mod kernel;
pub mod phi;
pub mod scaling;
pub mod taylor;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzField, FieldKind, FieldParts};
use crate::constants::EnergyConstants;
use crate::error::{Error, Result};
use crate::radial_ode::RadialProfile;

pub use ball::BallQuadrature;
pub use expansions::{
    check_cross_terms, check_gradient_expansion, check_lem_c1, check_nonlinear_expansion,
    check_norm_orders, check_phi_pairing, NonlinearSide,
};
pub use kernel::{check_kernel, check_kernel_closed_form, KernelResidual};
pub use phi::check_phi_corrections;
pub use scaling::{check_scaling_table, ScalingRow};
pub use taylor::{check_f_taylor, TaylorBound};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

/// How a criterion compares `measured` with `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|measured - target| / max(|target|, floor) ≤ tolerance`.
    Relative,
    /// `measured ≥ target`.
    AtLeast,
    /// `measured ≤ target`.
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub label: String,
    pub comparison: Comparison,
    pub measured: f64,
    pub target: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Criterion {
    pub fn relative(label: &str, measured: f64, target: f64, tolerance: f64) -> Self {
        Self::relative_floor(label, measured, target, tolerance, 0.0)
    }

    /// Relative deviation with the denominator bounded below by `floor`.
    pub fn relative_floor(
        label: &str,
        measured: f64,
        target: f64,
        tolerance: f64,
        floor: f64,
    ) -> Self {
        let deviation = (measured - target).abs() / target.abs().max(floor);
        Self {
            label: label.into(),
            comparison: Comparison::Relative,
            measured,
            target,
            deviation,
            tolerance,
            pass: deviation <= tolerance,
        }
    }

    pub fn at_least(label: &str, measured: f64, threshold: f64) -> Self {
        Self {
            label: label.into(),
            comparison: Comparison::AtLeast,
            measured,
            target: threshold,
            deviation: (threshold - measured).max(0.0),
            tolerance: 0.0,
            pass: measured >= threshold,
        }
    }

    pub fn at_most(label: &str, measured: f64, bound: f64) -> Self {
        Self {
            label: label.into(),
            comparison: Comparison::AtMost,
            measured,
            target: bound,
            deviation: (measured - bound).max(0.0),
            tolerance: 0.0,
            pass: measured <= bound,
        }
    }
}

/// Raw samples behind a report, e.g. `δ` against a measured integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub x_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Series {
    pub fn new(label: &str, x_label: &str, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            x_label: x_label.into(),
            x,
            y,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub name: String,
    pub criteria: Vec<Criterion>,
    pub series: Vec<Series>,
    pub verdict: Verdict,
}

impl ExpansionReport {
    pub fn new(name: &str, criteria: Vec<Criterion>, series: Vec<Series>) -> Self {
        let verdict = if criteria.iter().all(|c| c.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            name: name.into(),
            criteria,
            series,
            verdict,
        }
    }

    /// One report from several, with criteria and series labels prefixed by
    /// the part tag.
    pub fn combine(name: &str, parts: Vec<(String, ExpansionReport)>) -> Self {
        let mut criteria = Vec::new();
        let mut series = Vec::new();
        for (tag, r) in parts {
            criteria.extend(r.criteria.into_iter().map(|mut c| {
                c.label = format!("{tag}.{}", c.label);
                c
            }));
            series.extend(r.series.into_iter().map(|mut s| {
                s.label = format!("{tag}.{}", s.label);
                s
            }));
        }
        Self::new(name, criteria, series)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Labels of the failing criteria.
    pub fn failures(&self) -> Vec<&str> {
        self.criteria
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.label.as_str())
            .collect()
    }

    pub fn criterion(&self, label: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.label == label)
    }

    /// Long-format CSV of every series: `series,x_label,x,y`.
    pub fn series_csv(&self) -> String {
        let mut out = String::from("series,x_label,x,y\n");
        for s in &self.series {
            for (x, y) in s.x.iter().zip(&s.y) {
                out.push_str(&format!(
                    "{},{},{:.16e},{:.16e}\n",
                    s.label, s.x_label, x, y
                ));
            }
        }
        out
    }
}

/// Smallest factor by which `|value|/h` shrinks from one sample to the next
/// (samples ordered by decreasing `h`).
pub fn min_shrink_factor(h: &[f64], values: &[f64]) -> f64 {
    let scaled: Vec<f64> = h.iter().zip(values).map(|(h, v)| v.abs() / h).collect();
    scaled
        .windows(2)
        .map(|w| w[0] / w[1])
        .fold(f64::INFINITY, f64::min)
}

/// Linear extrapolation to `h = 0` through the two smallest samples.
pub fn extrapolate_to_zero(h: &[f64], values: &[f64]) -> f64 {
    let k = h.len();
    let (h1, h2, s1, s2) = (h[k - 1], h[k - 2], values[k - 1], values[k - 2]);
    (h2 * s1 - h1 * s2) / (h2 - h1)
}

pub(crate) fn require_decreasing(label: &str, xs: &[f64], max: f64, min_len: usize) -> Result<()> {
    if xs.len() < min_len {
        return Err(Error::Domain(format!(
            "{label}: need at least {min_len} samples"
        )));
    }
    if xs.windows(2).any(|w| !(w[1] < w[0])) || !(xs[0] <= max) || !(xs[xs.len() - 1] > 0.0) {
        return Err(Error::Domain(format!(
            "{label}: samples must decrease within (0, {max}]"
        )));
    }
    Ok(())
}

type PartsKey = (FieldKind, u64, usize);

/// Shared state for the ball-integral checks: the profile, its constants,
/// the mesh level and a cache of sampled field parts keyed by `(kind, δ)`.
pub struct Harness {
    pub profile: Arc<RadialProfile>,
    pub constants: EnergyConstants,
    pub level: usize,
    quads: Mutex<HashMap<(u64, usize), Arc<BallQuadrature>>>,
    parts: Mutex<HashMap<PartsKey, Arc<Vec<FieldParts>>>>,
}

impl Harness {
    pub fn new(profile: Arc<RadialProfile>, constants: EnergyConstants, level: usize) -> Self {
        Self {
            profile,
            constants,
            level,
            quads: Mutex::new(HashMap::new()),
            parts: Mutex::new(HashMap::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.profile.params.n
    }

    /// Mesh resolving bubbles of scale `delta`.
    pub fn quadrature(&self, delta: f64, level: usize) -> Result<Arc<BallQuadrature>> {
        let key = (delta.to_bits(), level);
        if let Some(q) = self.quads.lock().expect("cache poisoned").get(&key) {
            return Ok(q.clone());
        }
        let q = Arc::new(BallQuadrature::new(self.n(), delta, level)?);
        self.quads
            .lock()
            .expect("cache poisoned")
            .insert(key, q.clone());
        Ok(q)
    }

    /// Field parts at the upper-half nodes; the lower half is their mirror.
    pub fn field_parts(
        &self,
        kind: FieldKind,
        delta: f64,
        level: usize,
    ) -> Result<Arc<Vec<FieldParts>>> {
        let key = (kind, delta.to_bits(), level);
        if let Some(v) = self.parts.lock().expect("cache poisoned").get(&key) {
            return Ok(v.clone());
        }
        let quad = self.quadrature(delta, level)?;
        let field = AnsatzField::new(self.profile.clone(), kind, delta)?;
        let v = Arc::new(quad.sample_upper(|s, t| field.parts(s, t)));
        if v.iter().any(|p| !(p.pw().is_finite())) {
            return Err(Error::QuadratureNonConvergent(format!(
                "non-finite field value at delta = {delta}"
            )));
        }
        self.parts
            .lock()
            .expect("cache poisoned")
            .insert(key, v.clone());
        Ok(v)
    }

    /// `∫_Ω h(parts)` with the mirrored lower half added node by node.
    pub fn integrate_parts<H: Fn(&FieldParts) -> f64>(
        &self,
        quad: &BallQuadrature,
        parts: &[FieldParts],
        h: H,
    ) -> f64 {
        let terms: Vec<f64> = quad
            .nodes
            .iter()
            .zip(parts)
            .map(|(nd, p)| nd.w * (h(p) + h(&p.mirrored())))
            .collect();
        crate::quadrature::pairwise_sum(&terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria_and_verdict() {
        let a = Criterion::relative("a", 1.04, 1.0, 0.05);
        let b = Criterion::at_least("b", 1.4, 1.5);
        let c = Criterion::at_most("c", 0.5, 1.0);
        assert!(a.pass && !b.pass && c.pass);
        assert_eq!(
            ExpansionReport::new("x", vec![a.clone(), c], vec![]).verdict,
            Verdict::Pass
        );
        assert_eq!(
            ExpansionReport::new("x", vec![a, b], vec![]).verdict,
            Verdict::Fail
        );
        let f = Criterion::relative_floor("f", 0.01, 0.0, 0.02, 1.0);
        assert!(f.pass);
    }

    #[test]
    fn shrink_and_extrapolation() {
        let h = [0.04, 0.02, 0.01];
        let v: Vec<f64> = h.iter().map(|h| h * h).collect();
        assert!((min_shrink_factor(&h, &v) - 2.0).abs() < 1e-12);
        let s: Vec<f64> = h.iter().map(|h| 3.0 - 5.0 * h).collect();
        assert!((extrapolate_to_zero(&h, &s) - 3.0).abs() < 1e-12);
        assert!(require_decreasing("d", &h, 0.1, 3).is_ok());
        assert!(require_decreasing("d", &[0.01, 0.02, 0.04], 0.1, 3).is_err());
        assert!(require_decreasing("d", &[0.4, 0.02], 0.1, 2).is_err());
    }

    #[test]
    fn combine_prefixes_labels() {
        let a = ExpansionReport::new("a", vec![Criterion::at_most("x", 1.0, 2.0)], vec![]);
        let b = ExpansionReport::new(
            "b",
            vec![Criterion::at_most("x", 3.0, 2.0)],
            vec![Series::new("s", "t", vec![], vec![])],
        );
        let c = ExpansionReport::combine("both", vec![("a".into(), a), ("b".into(), b)]);
        assert_eq!(c.verdict, Verdict::Fail);
        assert_eq!(c.failures(), vec!["b.x"]);
        assert_eq!(c.series[0].label, "b.s");
    }

    #[test]
    fn csv_layout() {
        let r = ExpansionReport::new(
            "x",
            vec![],
            vec![Series::new("s", "delta", vec![0.5], vec![2.0])],
        );
        assert_eq!(
            r.series_csv(),
            "series,x_label,x,y\ns,delta,5.0000000000000000e-1,2.0000000000000000e0\n"
        );
    }
}
