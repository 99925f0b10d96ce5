//! Defining properties of the half-space corrections: harmonicity, Neumann
//! data on the boundary and the far-field decay law.

use std::sync::Arc;

use super::{Criterion, ExpansionReport, Series};
use crate::error::Result;
use crate::halfspace::{
    box_corners, fit_decay, verify_harmonic, verify_neumann_data, HalfSpaceCorrection, Which,
};
use crate::radial_ode::RadialProfile;

const STEPS: [f64; 4] = [0.4, 0.2, 0.1, 0.05];
const NEUMANN_RADII: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
const DECAY_WINDOW: [f64; 2] = [10.0, 100.0];
const DIRECTIONS: [(&str, [f64; 2]); 3] = [
    ("tangential", [1.0, 0.0]),
    ("diagonal", [1.0, 1.0]),
    ("normal", [0.0, 1.0]),
];

/// Per correction: the observed order of the FD Laplacian residual on the
/// corners of `[1,2]^n` (contract `≥ 1.8`), the Neumann mismatch (`≤ 1e-2`)
/// and the decay exponent along three rays over one decade (within 5%).
pub fn check_phi_corrections(profile: Arc<RadialProfile>) -> Result<ExpansionReport> {
    let n = profile.params.n;
    let corners = box_corners(n, 1.0, 2.0);
    let mut criteria = Vec::new();
    let mut series = Vec::new();
    for (tag, which) in [("phi1", Which::Phi1), ("phi2", Which::Phi2)] {
        let corr = HalfSpaceCorrection::new(profile.clone(), which);
        let res = STEPS
            .iter()
            .map(|&h| verify_harmonic(&corr, &corners, h))
            .collect::<Result<Vec<f64>>>()?;
        let order = res
            .windows(2)
            .map(|w| (w[0] / w[1]).log2())
            .fold(f64::INFINITY, f64::min);
        criteria.push(Criterion::at_least(
            &format!("{tag}_harmonic_order"),
            order,
            1.8,
        ));
        series.push(Series::new(
            &format!("{tag}_laplacian"),
            "h",
            STEPS.to_vec(),
            res,
        ));
        let neu = verify_neumann_data(&corr, &NEUMANN_RADII, 1e-3);
        criteria.push(Criterion::at_most(&format!("{tag}_neumann"), neu, 1e-2));
        for (dir, v) in DIRECTIONS {
            let fit = fit_decay(&corr, v, DECAY_WINDOW, 30);
            criteria.push(Criterion::relative(
                &format!("{tag}_decay_{dir}"),
                fit.exponent,
                fit.target,
                0.05,
            ));
        }
    }
    Ok(ExpansionReport::new("phi_corrections", criteria, series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_ode::find_ground_state;
    use crate::ProblemParams;

    #[test]
    fn symmetric_point_passes() {
        let prof =
            Arc::new(find_ground_state(&ProblemParams::new(4, 3.0).unwrap(), 1e-12).unwrap());
        let r = check_phi_corrections(prof).unwrap();
        assert!(r.passed(), "{:?}", r.criteria);
        assert_eq!(r.criteria.len(), 10);
        let order = r.criterion("phi1_harmonic_order").unwrap().measured;
        assert!((order - 2.0).abs() < 0.05);
    }
}
