//! Scaling orders of `∫_{B_R(ξ)} w^t` for the model bubbles
//! `w = δ^a (1 + |x-ξ|²/δ²)^{-m/2}`.
//!
//! Each row has three regimes split at `t* = n/m`: below it the integral is
//! dominated by the far field, above it by the core, and at `t*` a
//! logarithm appears (divided out before fitting).

use serde::{Deserialize, Serialize};

use super::{Criterion, ExpansionReport, Series};
use crate::error::{Error, Result};
use crate::fit::loglog_fit;
use crate::params::ProblemParams;
use crate::quadrature::{sphere_measure, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingRow {
    U1,
    U1Tilde,
    U2,
    V1,
    V1Tilde,
    V2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Below,
    Threshold,
    Above,
}

/// Ball radius of the table.
pub const TABLE_RADIUS: f64 = 0.5;

impl ScalingRow {
    pub const ALL: [ScalingRow; 6] = [
        Self::U1,
        Self::U1Tilde,
        Self::U2,
        Self::V1,
        Self::V1Tilde,
        Self::V2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::U1 => "u1",
            Self::U1Tilde => "u1_tilde",
            Self::U2 => "u2",
            Self::V1 => "v1",
            Self::V1Tilde => "v1_tilde",
            Self::V2 => "v2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == s)
    }

    /// `(a, m)`: amplitude exponent and profile decay.
    pub fn shape(self, pr: &ProblemParams) -> (f64, f64) {
        let n = pr.nf();
        let (sq, sp) = (n / (pr.q + 1.0), n / (pr.p + 1.0));
        match self {
            Self::U1 => (-sq, n - 2.0),
            Self::U1Tilde => (-sq, (n - 2.0) * pr.p - 2.0),
            Self::U2 => (-sp, n - 2.0),
            Self::V1 => (1.0 - sq, n - 3.0),
            Self::V1Tilde => (1.0 - sq, (n - 2.0) * pr.p - 3.0),
            Self::V2 => (1.0 - sp, n - 3.0),
        }
    }

    pub fn threshold(self, pr: &ProblemParams) -> f64 {
        pr.nf() / self.shape(pr).1
    }

    pub fn regime(self, pr: &ProblemParams, t: f64) -> Regime {
        let ts = self.threshold(pr);
        if (t - ts).abs() <= 1e-9 * ts {
            Regime::Threshold
        } else if t < ts {
            Regime::Below
        } else {
            Regime::Above
        }
    }

    /// Tabulated exponent of `δ` for the given `t`.
    pub fn table_exponent(self, pr: &ProblemParams, t: f64) -> f64 {
        let n = pr.nf();
        let (p1, q1) = (pr.p + 1.0, pr.q + 1.0);
        let p = pr.p;
        let regime = self.regime(pr, t);
        match (self, regime) {
            (Self::U1, Regime::Below) => t * n / p1,
            (Self::U1, Regime::Threshold) => n * (1.0 - n / ((n - 2.0) * q1)),
            (Self::U1, Regime::Above) => n - n * t / q1,
            (Self::U1Tilde, Regime::Below) => t * p * n / q1,
            (Self::U1Tilde, Regime::Threshold) => n * (1.0 - n / (((n - 2.0) * p - 2.0) * q1)),
            (Self::U1Tilde, Regime::Above) => n - n * t / q1,
            (Self::U2, Regime::Below) => t * n / q1,
            (Self::U2, Regime::Threshold) => n * (1.0 - n / ((n - 2.0) * p1)),
            (Self::U2, Regime::Above) => n - n * t / p1,
            (Self::V1, Regime::Below) => t * n / p1,
            (Self::V1, Regime::Threshold) => n * n / ((n - 3.0) * p1),
            (Self::V1, Regime::Above) => n - t * (n / q1 - 1.0),
            (Self::V1Tilde, Regime::Below) => t * p * n / q1,
            (Self::V1Tilde, Regime::Threshold) => n * n * p / (((n - 2.0) * p - 3.0) * q1),
            (Self::V1Tilde, Regime::Above) => n - t * (n / q1 - 1.0),
            (Self::V2, Regime::Below) => t * n / q1,
            (Self::V2, Regime::Threshold) => n * n / ((n - 3.0) * q1),
            (Self::V2, Regime::Above) => n - t * (n / p1 - 1.0),
        }
    }

    /// `∫_{B_R} w^t = |S^{n-1}| δ^{ta+n} ∫_0^{R/δ} (1+ρ²)^{-tm/2} ρ^{n-1} dρ`.
    pub fn integral(self, pr: &ProblemParams, t: f64, delta: f64, radius: f64) -> f64 {
        let n = pr.nf();
        let (a, m) = self.shape(pr);
        let gl = GaussLegendre::new(20);
        let top = radius / delta;
        let mut breaks = vec![0.0];
        let mut x = 0.25;
        while x < top {
            breaks.push(x);
            x *= 2.0;
        }
        breaks.push(top);
        let inner = gl.composite(&breaks, |rho| {
            (1.0 + rho * rho).powf(-0.5 * t * m) * rho.powf(n - 1.0)
        });
        sphere_measure(pr.n - 1) * delta.powf(t * a + n) * inner
    }
}

/// `δ`-exponent of the row integral from the two finest samples against the
/// table, within 2% relative to `max(|target|, 1)`.
pub fn check_scaling_table(
    pr: &ProblemParams,
    row: ScalingRow,
    t: f64,
    deltas: &[f64],
) -> Result<ExpansionReport> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    super::require_decreasing("deltas", deltas, 0.1, 2)?;
    if row.shape(pr).1 <= 0.0 {
        return Err(Error::Domain(format!(
            "row {} has no decay for n = {}",
            row.name(),
            pr.n
        )));
    }
    let regime = row.regime(pr, t);
    let values: Vec<f64> = deltas
        .iter()
        .map(|&d| row.integral(pr, t, d, TABLE_RADIUS))
        .collect();
    let fitted: Vec<f64> = match regime {
        Regime::Threshold => values
            .iter()
            .zip(deltas)
            .map(|(v, d)| v / d.ln().abs())
            .collect(),
        _ => values.clone(),
    };
    let k = deltas.len();
    let slope = loglog_fit(&deltas[k - 2..], &fitted[k - 2..]).slope;
    let target = row.table_exponent(pr, t);
    let criteria = vec![Criterion::relative_floor(
        "exponent", slope, target, 0.02, 1.0,
    )];
    let series = vec![Series::new("integral", "delta", deltas.to_vec(), values)];
    let name = format!("scaling_table_{}_t{}", row.name(), t);
    Ok(ExpansionReport::new(&name, criteria, series))
}
