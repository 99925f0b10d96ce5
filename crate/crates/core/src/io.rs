//! Plot-ready serialization: CSV with 17 significant digits and JSON
//! sidecars.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::params::{CaseTag, ConditionClass, ProblemParams, ScalingExponents};
use crate::radial_ode::{RadialProfile, TailFit};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with the given header and one row per record.
pub fn csv<R: AsRef<[f64]>>(header: &[&str], rows: &[R]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.as_ref().iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Profile samples as `r,U,dU,V,dV`.
pub fn profile_csv(profile: &RadialProfile) -> String {
    let mut out = String::from("r,U,dU,V,dV\n");
    for k in 0..profile.grid.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(profile.grid[k]),
            fmt_f64(profile.u[k]),
            fmt_f64(profile.du[k]),
            fmt_f64(profile.v[k]),
            fmt_f64(profile.dv[k])
        );
    }
    out
}

/// Everything about a profile except its samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSidecar {
    pub params: ProblemParams,
    pub case_tag: CaseTag,
    pub condition: ConditionClass,
    pub scaling: ScalingExponents,
    pub v0: f64,
    pub tail: TailFit,
    pub expected_exp_u: f64,
    pub expected_exp_v: f64,
    pub ode_tol: f64,
    pub r_max: f64,
    pub bracket_width: f64,
    pub grid_points: usize,
    pub ode_residual: f64,
    pub tail_mismatch: f64,
    pub scaling_derivative_bound: f64,
}

impl ProfileSidecar {
    pub fn new(profile: &RadialProfile) -> Self {
        let pr = profile.params;
        Self {
            params: pr,
            case_tag: pr.case_tag,
            condition: pr.condition_p().class,
            scaling: pr.scaling(),
            v0: profile.v0,
            tail: profile.tail,
            expected_exp_u: pr.decay_exponent_u(),
            expected_exp_v: pr.decay_exponent_v(),
            ode_tol: profile.ode_tol,
            r_max: profile.r_max,
            bracket_width: profile.bracket_width,
            grid_points: profile.grid.len(),
            ode_residual: profile.ode_residual(),
            tail_mismatch: profile.tail_mismatch(),
            scaling_derivative_bound: profile.scaling_derivative_bound(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [
            std::f64::consts::PI,
            -1e-300,
            123456789.123456789,
            0.1 + 0.2,
        ] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert!(!s.contains(' '));
        }
    }

    #[test]
    fn csv_rows() {
        let s = csv(&["d", "G"], &[[1.0, -2.5], [2.0, 0.5]]);
        assert_eq!(s, "d,G\n1.0000000000000000e0,-2.5000000000000000e0\n2.0000000000000000e0,5.0000000000000000e-1\n");
    }
}
