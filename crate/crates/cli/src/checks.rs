//! Registry of verification checks addressable from the command line.

use std::sync::Arc;

use lane_emden::verify::expansions::NonlinearSide;
use lane_emden::verify::scaling::ScalingRow;
use lane_emden::verify::taylor::geometric_samples;
use lane_emden::verify::{self, ExpansionReport, Harness};
use lane_emden::{RadialProfile, Result};
use serde::{Serialize, Serializer};

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckName {
    BoundaryLoss,
    CrossTerms,
    PhiPairing,
    GradientExpansion,
    Nonlinear,
    Kernel,
    PhiCorrections,
    ScalingTable,
    FTaylor,
    NormOrders,
}

impl CheckName {
    pub const ALL: [CheckName; 10] = [
        Self::Kernel,
        Self::PhiCorrections,
        Self::BoundaryLoss,
        Self::CrossTerms,
        Self::PhiPairing,
        Self::GradientExpansion,
        Self::Nonlinear,
        Self::ScalingTable,
        Self::FTaylor,
        Self::NormOrders,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::BoundaryLoss => "boundary_loss",
            Self::CrossTerms => "cross_terms",
            Self::PhiPairing => "phi_pairing",
            Self::GradientExpansion => "gradient_expansion",
            Self::Nonlinear => "nonlinear",
            Self::Kernel => "kernel",
            Self::PhiCorrections => "phi_corrections",
            Self::ScalingTable => "scaling_table",
            Self::FTaylor => "f_taylor",
            Self::NormOrders => "norm_orders",
        }
    }

    fn aliases(self) -> &'static [&'static str] {
        match self {
            Self::BoundaryLoss => &["lemc1"],
            Self::CrossTerms => &["lemb6"],
            Self::PhiPairing => &["lemb8", "lemb7"],
            Self::GradientExpansion => &["propnabla", "prop43"],
            Self::Nonlinear => &["prop44", "1p"],
            Self::Kernel => &["lemnonde", "lem24"],
            Self::PhiCorrections => &["estphi0", "phi"],
            Self::ScalingTable => &["lemb3"],
            Self::FTaylor => &["lemb2"],
            Self::NormOrders => &["lemb12", "lemb13"],
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s || c.aliases().contains(&s.as_str()))
    }
}

impl Serialize for CheckName {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

const TAYLOR_EPS: [f64; 2] = [0.1, 0.01];

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub profile: Arc<RadialProfile>,
    pub harness: &'a Harness,
}

pub fn run(check: CheckName, cx: &Context) -> Result<ExpansionReport> {
    let cfg = cx.cfg;
    let h = cx.harness;
    let pr = cx.profile.params;
    match check {
        CheckName::BoundaryLoss => verify::check_lem_c1(h, &cfg.deltas),
        CheckName::CrossTerms => verify::check_cross_terms(h, &cfg.deltas),
        CheckName::PhiPairing => verify::check_phi_pairing(h, &cfg.deltas),
        CheckName::GradientExpansion => verify::check_gradient_expansion(h, &cfg.deltas),
        CheckName::Nonlinear => {
            let p =
                verify::check_nonlinear_expansion(h, NonlinearSide::P, cfg.alpha, cfg.d, &cfg.eps)?;
            let q =
                verify::check_nonlinear_expansion(h, NonlinearSide::Q, cfg.beta, cfg.d, &cfg.eps)?;
            Ok(ExpansionReport::combine(
                check.name(),
                vec![("p".into(), p), ("q".into(), q)],
            ))
        }
        CheckName::Kernel => verify::check_kernel(&cx.profile),
        CheckName::PhiCorrections => verify::check_phi_corrections(cx.profile.clone()),
        CheckName::ScalingTable => {
            let rows = [
                (ScalingRow::U1, pr.q + 1.0),
                (ScalingRow::U1, 1.0),
                (ScalingRow::V2, 2.0),
            ];
            let mut parts = Vec::new();
            for (row, t) in rows {
                let r = verify::check_scaling_table(&pr, row, t, &cfg.deltas)?;
                parts.push((format!("{}_t{}", row.name(), t), r));
            }
            Ok(ExpansionReport::combine(check.name(), parts))
        }
        CheckName::FTaylor => {
            let pos = geometric_samples(0.1, 10.0, 201);
            let ts: Vec<f64> = pos.iter().map(|t| -t).chain(pos.iter().copied()).collect();
            let f1 = verify::check_f_taylor(pr.q, cfg.beta, &ts, &TAYLOR_EPS)?;
            let f2 = verify::check_f_taylor(pr.p, cfg.alpha, &ts, &TAYLOR_EPS)?;
            Ok(ExpansionReport::combine(
                check.name(),
                vec![("f1".into(), f1), ("f2".into(), f2)],
            ))
        }
        CheckName::NormOrders => verify::check_norm_orders(h, cfg.alpha, cfg.beta, cfg.d, &cfg.eps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_aliases_resolve() {
        for c in CheckName::ALL {
            assert_eq!(CheckName::parse(c.name()), Some(c));
            for a in c.aliases() {
                assert_eq!(CheckName::parse(a), Some(c));
            }
        }
        assert_eq!(
            CheckName::parse("Boundary-Loss"),
            Some(CheckName::BoundaryLoss)
        );
        assert_eq!(CheckName::parse("lemb99"), None);
    }
}
