//! Two-bubble fields `W_{i,δ}` and the approximate projections `PW_{i,δ}`
//! on the unit ball, with bubbles centred at the poles `±e_n`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfspace::{poisson_integral, HalfSpaceCorrection, Which};
use crate::radial_ode::RadialProfile;
use crate::verify::ball::BallQuadrature;

/// Largest admissible concentration parameter.
pub const DELTA_MAX: f64 = 0.2;

/// `(U_{ξ,δ}(x), V_{ξ,δ}(x))`.
pub fn bubble_eval(
    profile: &RadialProfile,
    xi: &[f64],
    delta: f64,
    x: &[f64],
) -> Result<(f64, f64)> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta = {delta} must be positive")));
    }
    if xi.len() != x.len() {
        return Err(Error::Domain("centre and point differ in dimension".into()));
    }
    let r = xi
        .iter()
        .zip(x)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(bubble_radial(profile, delta, r))
}

/// Bubble values at distance `r` from the centre.
pub fn bubble_radial(profile: &RadialProfile, delta: f64, r: f64) -> (f64, f64) {
    let sc = profile.params.scaling();
    let smp = profile.evaluate(r / delta);
    (delta.powf(-sc.su) * smp.u, delta.powf(-sc.sv) * smp.v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FieldKind {
    W1,
    W2,
    Pw1Approx,
    Pw2Approx,
}

impl FieldKind {
    fn component(self) -> Which {
        match self {
            FieldKind::W1 | FieldKind::Pw1Approx => Which::Phi1,
            FieldKind::W2 | FieldKind::Pw2Approx => Which::Phi2,
        }
    }

    fn projected(self) -> bool {
        matches!(self, FieldKind::Pw1Approx | FieldKind::Pw2Approx)
    }
}

/// The four pieces of a field at `(s, t)`: bubbles at `±e_n` and the scaled
/// corrections `δ^{1-σ} φ((e_n ∓ x)/δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldParts {
    pub bubble_plus: f64,
    pub bubble_minus: f64,
    pub corr_plus: f64,
    pub corr_minus: f64,
}

impl FieldParts {
    /// `W = bubble_plus - bubble_minus`.
    pub fn w(&self) -> f64 {
        self.bubble_plus - self.bubble_minus
    }

    /// `PW ≈ W - (corr_plus - corr_minus)`.
    pub fn pw(&self) -> f64 {
        self.w() - (self.corr_plus - self.corr_minus)
    }

    /// The same parts at the mirror point `(s, -t)`.
    pub fn mirrored(&self) -> Self {
        Self {
            bubble_plus: self.bubble_minus,
            bubble_minus: self.bubble_plus,
            corr_plus: self.corr_minus,
            corr_minus: self.corr_plus,
        }
    }
}

/// An axisymmetric scalar field on the ball.
pub trait AxisymmetricField: Sync {
    fn dim(&self) -> usize;
    fn value(&self, s: f64, t: f64) -> f64;
}

#[derive(Debug, Clone)]
pub struct AnsatzField {
    pub profile: Arc<RadialProfile>,
    pub correction: HalfSpaceCorrection,
    pub delta: f64,
    pub kind: FieldKind,
}

impl AnsatzField {
    pub fn new(profile: Arc<RadialProfile>, kind: FieldKind, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= DELTA_MAX) {
            return Err(Error::Domain(format!(
                "delta = {delta} must lie in (0, {DELTA_MAX}]"
            )));
        }
        let correction = HalfSpaceCorrection::new(profile.clone(), kind.component());
        Ok(Self {
            profile,
            correction,
            delta,
            kind,
        })
    }

    /// Scaling exponent `σ` of the bubble: `n/(q+1)` for `U`, `n/(p+1)` for `V`.
    pub fn sigma(&self) -> f64 {
        let sc = self.profile.params.scaling();
        match self.kind.component() {
            Which::Phi1 => sc.su,
            Which::Phi2 => sc.sv,
        }
    }

    fn bubble(&self, r: f64) -> f64 {
        let (u, v) = bubble_radial(&self.profile, self.delta, r);
        match self.kind.component() {
            Which::Phi1 => u,
            Which::Phi2 => v,
        }
    }

    /// Bubble pieces only; the corrections are left at zero.
    pub fn bubble_parts(&self, s: f64, t: f64) -> FieldParts {
        let rp = (s * s + (t - 1.0) * (t - 1.0)).sqrt();
        let rm = (s * s + (t + 1.0) * (t + 1.0)).sqrt();
        FieldParts {
            bubble_plus: self.bubble(rp),
            bubble_minus: self.bubble(rm),
            ..FieldParts::default()
        }
    }

    /// All pieces at `(s, t)`; the corrections are zero for `W` kinds.
    pub fn parts(&self, s: f64, t: f64) -> FieldParts {
        let mut parts = self.bubble_parts(s, t);
        if self.kind.projected() {
            let d = self.delta;
            let scale = d.powf(1.0 - self.sigma());
            parts.corr_plus =
                scale * poisson_integral(&self.correction, s / d, ((1.0 - t) / d).max(0.0));
            parts.corr_minus =
                scale * poisson_integral(&self.correction, s / d, ((1.0 + t) / d).max(0.0));
        }
        parts
    }

    /// Value at a point of the ball given in full coordinates.
    pub fn field_eval(&self, x: &[f64]) -> Result<f64> {
        let n = self.profile.params.n;
        if x.len() != n {
            return Err(Error::Domain(format!(
                "point has {} coordinates, expected {n}",
                x.len()
            )));
        }
        let s = x[..n - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
        let t = x[n - 1];
        if s * s + t * t > 1.0 + 1e-12 {
            return Err(Error::Domain("point lies outside the unit ball".into()));
        }
        Ok(self.value(s, t))
    }
}

impl AxisymmetricField for AnsatzField {
    fn dim(&self) -> usize {
        self.profile.params.n
    }

    fn value(&self, s: f64, t: f64) -> f64 {
        let p = self.parts(s, t);
        if self.kind.projected() {
            p.pw()
        } else {
            p.w()
        }
    }
}

/// `∫_Ω F` and `∫_Ω |F|^{t-1} F` with an estimate of the rounding error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub mean: f64,
    pub signed_power_mean: f64,
    pub error_estimate: f64,
}

/// Both integrals vanish analytically for odd fields; a result larger than
/// ten times the rounding estimate is reported as an asymmetry.
pub fn symmetry_and_compatibility_check<F: AxisymmetricField + ?Sized>(
    field: &F,
    quad: &BallQuadrature,
    power: f64,
) -> Result<CompatibilityReport> {
    let vals = quad.sample(|s, t| field.value(s, t));
    let sp = |v: &f64| v.abs().powf(power - 1.0) * v;
    let mean = quad.integrate_samples(&vals, |v| *v);
    let signed_power_mean = quad.integrate_samples(&vals, sp);
    let scale_a = quad.integrate_samples(&vals, |v| v.abs());
    let scale_b = quad.integrate_samples(&vals, |v| sp(v).abs());
    let eps = f64::EPSILON * (quad.len() as f64).sqrt();
    let error_estimate = eps * scale_a.max(scale_b);
    if mean.abs() > 10.0 * eps * scale_a || signed_power_mean.abs() > 10.0 * eps * scale_b {
        let value =
            if mean.abs() / scale_a.max(1e-300) > signed_power_mean.abs() / scale_b.max(1e-300) {
                mean
            } else {
                signed_power_mean
            };
        return Err(Error::QuadratureAsymmetry {
            value,
            estimate: error_estimate,
        });
    }
    Ok(CompatibilityReport {
        mean,
        signed_power_mean,
        error_estimate,
    })
}

/// `(s, t, value)` on a grid of the half disc, points outside the ball skipped.
pub fn field_slice<F: AxisymmetricField + ?Sized>(
    field: &F,
    s_values: &[f64],
    t_values: &[f64],
) -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    for &t in t_values {
        for &s in s_values {
            if s * s + t * t <= 1.0 {
                out.push([s, t, field.value(s, t)]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_ode::find_ground_state;
    use crate::ProblemParams;
    use std::sync::OnceLock;

    fn profile() -> Arc<RadialProfile> {
        static P: OnceLock<Arc<RadialProfile>> = OnceLock::new();
        P.get_or_init(|| {
            Arc::new(find_ground_state(&ProblemParams::new(4, 3.0).unwrap(), 1e-12).unwrap())
        })
        .clone()
    }

    #[test]
    fn bubble_centre_and_scaling() {
        let p = profile();
        let xi = [0.0, 0.0, 0.0, 1.0];
        let (u, v) = bubble_eval(&p, &xi, 0.1, &xi).unwrap();
        assert!((u - 10.0).abs() < 1e-9);
        assert!((v - 10.0 * p.v0).abs() < 1e-9);
        let (u1, _) = bubble_eval(&p, &xi, 0.1, &[0.1, 0.0, 0.0, 1.0]).unwrap();
        assert!((u1 - 10.0 * 8.0 / 9.0).abs() < 1e-6);
        let (a, _) = bubble_eval(&p, &xi, 0.05, &[0.03, 0.0, 0.0, 1.0]).unwrap();
        let (b, _) = bubble_eval(&p, &xi, 0.1, &[0.06, 0.0, 0.0, 1.0]).unwrap();
        assert!((b - 0.5 * a).abs() < 1e-12 * a);
        assert!(bubble_eval(&p, &xi, 0.0, &xi).is_err());
    }

    #[test]
    fn fields_are_odd() {
        let p = profile();
        for kind in [
            FieldKind::W1,
            FieldKind::W2,
            FieldKind::Pw1Approx,
            FieldKind::Pw2Approx,
        ] {
            let f = AnsatzField::new(p.clone(), kind, 0.1).unwrap();
            assert_eq!(f.value(0.5, 0.0), 0.0);
            assert_eq!(f.value(0.3, 0.4), -f.value(0.3, -0.4));
        }
    }

    #[test]
    fn near_pole_dominated_by_first_bubble() {
        let p = profile();
        let f = AnsatzField::new(p.clone(), FieldKind::W1, 0.05).unwrap();
        let first = f.bubble(0.1);
        assert!((f.value(0.0, 0.9) / first - 1.0).abs() < 1e-2);
    }

    #[test]
    fn rejects_bad_delta_and_points() {
        let p = profile();
        assert!(AnsatzField::new(p.clone(), FieldKind::W1, 0.3).is_err());
        let f = AnsatzField::new(p, FieldKind::W1, 0.1).unwrap();
        assert!(f.field_eval(&[1.0, 1.0, 0.0, 0.0]).is_err());
    }
}
