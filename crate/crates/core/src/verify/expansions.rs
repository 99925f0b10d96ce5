//! Ball-integral checks of the δ- and ε-expansions of the two-bubble ansatz.
//!
//! Bubbles sit at `±e_n` with scale `δ`; `U_±`, `V_±` denote them and
//! `corr_±` the scaled half-space corrections carried by the `PW` fields.

use serde::{Deserialize, Serialize};

use super::{
    extrapolate_to_zero, min_shrink_factor, require_decreasing, Criterion, ExpansionReport,
    Harness, Series,
};
use crate::ansatz::{bubble_radial, FieldKind, FieldParts, DELTA_MAX};
use crate::error::{Error, Result};
use crate::fit::{least_squares, loglog_fit};

/// Shrink factor required of `|value|/h` per halving of `h` for `o(h)` claims.
pub const SHRINK_FACTOR: f64 = 1.5;

fn distances(s: f64, t: f64) -> (f64, f64) {
    let rp = (s * s + (t - 1.0) * (t - 1.0)).sqrt();
    let rm = (s * s + (t + 1.0) * (t + 1.0)).sqrt();
    (rp, rm)
}

fn finite(label: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::QuadratureNonConvergent(format!(
            "{label} is not finite"
        )))
    }
}

/// `∫_Ω U_+^{q+1} = 𝒜_1/2 - ℬ_1 δ + o(δ)` and the `V` analogue; the slope
/// is extrapolated linearly to `δ = 0` from the two smallest samples.
pub fn check_lem_c1(h: &Harness, deltas: &[f64]) -> Result<ExpansionReport> {
    require_decreasing("deltas", deltas, 0.1, 2)?;
    let pr = h.profile.params;
    let k = &h.constants;
    let (mut iu, mut iv) = (Vec::new(), Vec::new());
    for &d in deltas {
        let quad = h.quadrature(d, h.level)?;
        let vals = quad.sample_upper(|s, t| {
            let (rp, rm) = distances(s, t);
            let (up, vp) = bubble_radial(&h.profile, d, rp);
            let (um, vm) = bubble_radial(&h.profile, d, rm);
            [
                up.powf(pr.q + 1.0) + um.powf(pr.q + 1.0),
                vp.powf(pr.p + 1.0) + vm.powf(pr.p + 1.0),
            ]
        });
        iu.push(finite(
            "U integral",
            quad.integrate_upper_samples(&vals, |v| v[0]),
        )?);
        iv.push(finite(
            "V integral",
            quad.integrate_upper_samples(&vals, |v| v[1]),
        )?);
    }
    let su: Vec<f64> = iu
        .iter()
        .zip(deltas)
        .map(|(i, d)| (i - 0.5 * k.a1) / d)
        .collect();
    let sv: Vec<f64> = iv
        .iter()
        .zip(deltas)
        .map(|(i, d)| (i - 0.5 * k.a2) / d)
        .collect();
    let last = deltas.len() - 1;
    let criteria = vec![
        Criterion::relative("slope_U", extrapolate_to_zero(deltas, &su), -k.b1, 0.05),
        Criterion::relative("slope_V", extrapolate_to_zero(deltas, &sv), -k.b2, 0.05),
        Criterion::at_most("boundary_loss_U", iu[last] - 0.5 * k.a1, 0.0),
        Criterion::at_most("boundary_loss_V", iv[last] - 0.5 * k.a2, 0.0),
    ];
    let series = vec![
        Series::new("integral_U", "delta", deltas.to_vec(), iu),
        Series::new("integral_V", "delta", deltas.to_vec(), iv),
        Series::new("slope_U", "delta", deltas.to_vec(), su),
        Series::new("slope_V", "delta", deltas.to_vec(), sv),
    ];
    Ok(ExpansionReport::new("boundary_loss", criteria, series))
}

/// `∫_Ω U_+ U_-^q` and `∫_Ω V_+ V_-^p` are `o(δ)`.
pub fn check_cross_terms(h: &Harness, deltas: &[f64]) -> Result<ExpansionReport> {
    require_decreasing("deltas", deltas, 0.1, 2)?;
    let pr = h.profile.params;
    let (mut cu, mut cv, mut swap) = (Vec::new(), Vec::new(), 0.0f64);
    for &d in deltas {
        let quad = h.quadrature(d, h.level)?;
        let vals = quad.sample(|s, t| {
            let (rp, rm) = distances(s, t);
            let (up, vp) = bubble_radial(&h.profile, d, rp);
            let (um, vm) = bubble_radial(&h.profile, d, rm);
            [up * um.powf(pr.q), vp * vm.powf(pr.p), um * up.powf(pr.q)]
        });
        let u = quad.integrate_samples(&vals, |v| v[0]);
        let swapped = quad.integrate_samples(&vals, |v| v[2]);
        swap = swap.max((u - swapped).abs() / u.abs().max(f64::MIN_POSITIVE));
        cu.push(finite("U cross term", u)?);
        cv.push(finite(
            "V cross term",
            quad.integrate_samples(&vals, |v| v[1]),
        )?);
    }
    let criteria = vec![
        Criterion::at_least("shrink_U", min_shrink_factor(deltas, &cu), SHRINK_FACTOR),
        Criterion::at_least("shrink_V", min_shrink_factor(deltas, &cv), SHRINK_FACTOR),
        Criterion::at_most("reflection_defect", swap, 1e-12),
    ];
    let series = vec![
        Series::new("cross_U", "delta", deltas.to_vec(), cu),
        Series::new("cross_V", "delta", deltas.to_vec(), cv),
    ];
    Ok(ExpansionReport::new("cross_terms", criteria, series))
}

/// `corr_+` paired with `U_+^q` (matched, `-𝒞_1 δ/2`) and with `U_-^q`
/// (mismatched, `o(δ)`), and the same for `V`.
pub fn check_phi_pairing(h: &Harness, deltas: &[f64]) -> Result<ExpansionReport> {
    require_decreasing("deltas", deltas, 0.1, 2)?;
    let pr = h.profile.params;
    let k = &h.constants;
    let mut out: [Vec<f64>; 4] = Default::default();
    for &d in deltas {
        let quad = h.quadrature(d, h.level)?;
        for (slot, kind, e) in [
            (0, FieldKind::Pw1Approx, pr.q),
            (2, FieldKind::Pw2Approx, pr.p),
        ] {
            let parts = h.field_parts(kind, d, h.level)?;
            let matched = h.integrate_parts(&quad, &parts, |f| f.corr_plus * f.bubble_plus.powf(e));
            let mismatched =
                h.integrate_parts(&quad, &parts, |f| f.corr_plus * f.bubble_minus.powf(e));
            out[slot].push(finite("matched pairing", matched)?);
            out[slot + 1].push(finite("mismatched pairing", mismatched)?);
        }
    }
    let slope = |v: &[f64]| -> Vec<f64> { v.iter().zip(deltas).map(|(x, d)| x / d).collect() };
    let (s1, s2) = (slope(&out[0]), slope(&out[2]));
    let negative = out[0]
        .iter()
        .chain(&out[2])
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let criteria = vec![
        Criterion::relative(
            "matched_slope_1",
            extrapolate_to_zero(deltas, &s1),
            -0.5 * k.c1,
            0.05,
        ),
        Criterion::relative(
            "matched_slope_2",
            extrapolate_to_zero(deltas, &s2),
            -0.5 * k.c2,
            0.05,
        ),
        Criterion::at_most("matched_sign", negative, 0.0),
        Criterion::at_least(
            "mismatched_shrink_1",
            min_shrink_factor(deltas, &out[1]),
            SHRINK_FACTOR,
        ),
        Criterion::at_least(
            "mismatched_shrink_2",
            min_shrink_factor(deltas, &out[3]),
            SHRINK_FACTOR,
        ),
    ];
    let [m1, x1, m2, x2] = out;
    let series = vec![
        Series::new("matched_1", "delta", deltas.to_vec(), m1),
        Series::new("mismatched_1", "delta", deltas.to_vec(), x1),
        Series::new("matched_2", "delta", deltas.to_vec(), m2),
        Series::new("mismatched_2", "delta", deltas.to_vec(), x2),
    ];
    Ok(ExpansionReport::new("phi_pairing", criteria, series))
}

/// `∫_Ω PW_1 (U_+^q - U_-^q) = 𝒜_1 - (ℬ_1+ℬ_2)δ + (𝒞_1+𝒞_2)δ/2 + o(δ)`,
/// split into the bubble part `I_1 = 𝒜_1 - 2ℬ_1 δ` and the correction part
/// `I_2 = -𝒞_1 δ`.
pub fn check_gradient_expansion(h: &Harness, deltas: &[f64]) -> Result<ExpansionReport> {
    require_decreasing("deltas", deltas, DELTA_MAX, 2)?;
    let q = h.profile.params.q;
    let k = &h.constants;
    let (mut total, mut i1, mut i2) = (Vec::new(), Vec::new(), Vec::new());
    for &d in deltas {
        let quad = h.quadrature(d, h.level)?;
        let parts = h.field_parts(FieldKind::Pw1Approx, d, h.level)?;
        let src = |f: &FieldParts| f.bubble_plus.powf(q) - f.bubble_minus.powf(q);
        let a = h.integrate_parts(&quad, &parts, |f| f.w() * src(f));
        let b = h.integrate_parts(&quad, &parts, |f| (f.corr_plus - f.corr_minus) * src(f));
        i1.push(finite("bubble part", a)?);
        i2.push(finite("correction part", b)?);
        total.push(a - b);
    }
    let slope = |v: &[f64], base: f64| -> Vec<f64> {
        v.iter().zip(deltas).map(|(x, d)| (x - base) / d).collect()
    };
    let st = slope(&total, k.a1);
    let s1 = slope(&i1, k.a1);
    let s2 = slope(&i2, 0.0);
    let target = -(k.b1 + k.b2) + 0.5 * (k.c1 + k.c2);
    let last = deltas.len() - 1;
    let criteria = vec![
        Criterion::relative("slope", extrapolate_to_zero(deltas, &st), target, 0.10),
        Criterion::relative("leading", total[last], k.a1, 0.05),
        Criterion::relative(
            "slope_I1",
            extrapolate_to_zero(deltas, &s1),
            -2.0 * k.b1,
            0.10,
        ),
        Criterion::relative("slope_I2", extrapolate_to_zero(deltas, &s2), -k.c1, 0.10),
    ];
    let series = vec![
        Series::new("value", "delta", deltas.to_vec(), total),
        Series::new("I1", "delta", deltas.to_vec(), i1),
        Series::new("I2", "delta", deltas.to_vec(), i2),
        Series::new("slope", "delta", deltas.to_vec(), st),
    ];
    Ok(ExpansionReport::new("gradient_expansion", criteria, series))
}

/// Which nonlinear term is expanded: `∫|PW_2|^{p_ε+1}` (`P`, perturbed by
/// `α`) or `∫|PW_1|^{q_ε+1}` (`Q`, perturbed by `β`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NonlinearSide {
    P,
    Q,
}

/// `(1/(e_ε+1)) ∫|PW|^{e_ε+1}` with `e_ε = e + cε` and `δ = dε` equals
/// `(1/(e+1))(𝒜 - 2ℬδ + (e+1)𝒞δ) - (nc/(e+1)²) 𝒜 ε log δ + (c/(e+1)) 𝒟 ε
/// - (c/(e+1)²) 𝒜 ε + o(ε)`.
///
/// The pieces are isolated from the same samples: the unperturbed integral
/// `F_0(δ)` gives the `δ`-expansion (quadratic fit in `δ`); the exponent
/// derivative `Λ(δ) = ∫|PW|^{e+1} log|PW|` is fitted as
/// `c_1 F_0 log δ + 𝒟 + c_2 δ`.
pub fn check_nonlinear_expansion(
    h: &Harness,
    side: NonlinearSide,
    coefficient: f64,
    d: f64,
    eps: &[f64],
) -> Result<ExpansionReport> {
    require_decreasing("epsilons", eps, 0.1, 3)?;
    if !(0.05..=0.5).contains(&d) {
        return Err(Error::Domain(format!("d = {d} must lie in [0.05, 0.5]")));
    }
    if !(coefficient >= 0.0 && coefficient.is_finite()) {
        return Err(Error::Domain(
            "the perturbation coefficient must be nonnegative".into(),
        ));
    }
    let pr = h.profile.params;
    let k = &h.constants;
    let n = pr.nf();
    let (kind, e, a, b, c, dd, name) = match side {
        NonlinearSide::P => (
            FieldKind::Pw2Approx,
            pr.p,
            k.a2,
            k.b2,
            k.c2,
            k.d2,
            "nonlinear_p",
        ),
        NonlinearSide::Q => (
            FieldKind::Pw1Approx,
            pr.q,
            k.a1,
            k.b1,
            k.c1,
            k.d1,
            "nonlinear_q",
        ),
    };
    let e1 = e + 1.0;
    let deltas: Vec<f64> = eps.iter().map(|x| d * x).collect();
    let (mut f0, mut fp, mut lam) = (Vec::new(), Vec::new(), Vec::new());
    for (&x, &delta) in eps.iter().zip(&deltas) {
        let quad = h.quadrature(delta, h.level)?;
        let parts = h.field_parts(kind, delta, h.level)?;
        let s = coefficient * x;
        let zero = h.integrate_parts(&quad, &parts, |f| f.pw().abs().powf(e1));
        let plus = h.integrate_parts(&quad, &parts, |f| f.pw().abs().powf(e1 + s));
        let moment = h.integrate_parts(&quad, &parts, |f| {
            let a = f.pw().abs();
            if a > 0.0 {
                a.powf(e1) * a.ln()
            } else {
                0.0
            }
        });
        f0.push(finite("unperturbed integral", zero)?);
        fp.push(finite("perturbed integral", plus)?);
        lam.push(finite("log moment", moment)?);
    }

    let e0: Vec<f64> = f0.iter().map(|v| v / e1).collect();
    let quad_rows: Vec<Vec<f64>> = deltas.iter().map(|dl| vec![1.0, *dl, dl * dl]).collect();
    let (delta_fit, _) = least_squares(&quad_rows, &e0);
    let rows: Vec<Vec<f64>> = deltas
        .iter()
        .zip(&f0)
        .map(|(dl, f)| vec![f * dl.ln(), 1.0, *dl])
        .collect();
    let (log_fit, _) = least_squares(&rows, &lam);
    // With the log δ part removed, what remains tends to 𝒟 with O(δ) terms.
    let sigma = n / e1;
    let shifted: Vec<f64> = lam
        .iter()
        .zip(&deltas)
        .zip(&f0)
        .map(|((l, dl), f)| l + sigma * dl.ln() * f)
        .collect();
    let (d_fit, _) = least_squares(&quad_rows, &shifted);

    let last = eps.len() - 1;
    let (x, dl) = (eps[last], deltas[last]);
    let delta_part = |dl: f64| (a - 2.0 * b * dl + e1 * c * dl) / e1;
    let eps_part = |x: f64, dl: f64| {
        -n * coefficient / (e1 * e1) * a * x * dl.ln() + coefficient / e1 * dd * x
            - coefficient / (e1 * e1) * a * x
    };
    let measured: Vec<f64> = eps
        .iter()
        .zip(&fp)
        .map(|(x, f)| f / (e1 + coefficient * x))
        .collect();
    // The residual splits into the δ-expansion of the unperturbed integral
    // and the part switched on by the perturbation; both must be o(ε).
    let residual_delta: Vec<f64> = deltas
        .iter()
        .zip(&e0)
        .map(|(dl, v)| v - delta_part(*dl))
        .collect();
    let residual_eps: Vec<f64> = eps
        .iter()
        .zip(&deltas)
        .zip(measured.iter().zip(&e0))
        .map(|((x, dl), (m, v))| m - v - eps_part(*x, *dl))
        .collect();
    let residual: Vec<f64> = residual_delta
        .iter()
        .zip(&residual_eps)
        .map(|(a, b)| a + b)
        .collect();
    let prefactor = (1.0 / (e1 + coefficient * x) - 1.0 / e1) * f0[last];

    let mut criteria = vec![
        Criterion::relative("leading", delta_fit[0], a / e1, 0.10),
        Criterion::relative("delta_slope", delta_fit[1], (-2.0 * b + e1 * c) / e1, 0.10),
        Criterion::at_least(
            "residual_delta_shrink",
            min_shrink_factor(eps, &residual_delta),
            SHRINK_FACTOR,
        ),
    ];
    if coefficient == 0.0 {
        let worst = residual_eps.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        criteria.push(Criterion::at_most("perturbation_vanishes", worst, 0.0));
    } else {
        criteria.extend([
            Criterion::relative(
                "eps_log_delta_term",
                coefficient / e1 * log_fit[0] * a * x * dl.ln(),
                -n * coefficient / (e1 * e1) * a * x * dl.ln(),
                0.10,
            ),
            Criterion::relative(
                "eps_D_term",
                coefficient / e1 * d_fit[0] * x,
                coefficient / e1 * dd * x,
                0.10,
            ),
            Criterion::relative(
                "eps_prefactor_term",
                prefactor,
                -coefficient / (e1 * e1) * a * x,
                0.10,
            ),
            Criterion::at_least(
                "residual_eps_shrink",
                min_shrink_factor(eps, &residual_eps),
                SHRINK_FACTOR,
            ),
        ]);
    }
    let series = vec![
        Series::new("unperturbed_integral", "epsilon", eps.to_vec(), f0),
        Series::new("log_moment", "epsilon", eps.to_vec(), lam),
        Series::new("measured", "epsilon", eps.to_vec(), measured),
        Series::new("residual_delta", "epsilon", eps.to_vec(), residual_delta),
        Series::new("residual_eps", "epsilon", eps.to_vec(), residual_eps),
        Series::new("residual", "epsilon", eps.to_vec(), residual),
    ];
    Ok(ExpansionReport::new(name, criteria, series))
}

/// `‖f_ε(PW) - f_0(PW)‖` in `L^{(e+1)/e}` and the derivative analogue in
/// `L^{(e+1)/(e-1)}`, for both components, with `δ = dε`. After dividing
/// by `|log δ|` the fitted order in `ε` must be at least `0.9`.
pub fn check_norm_orders(
    h: &Harness,
    alpha: f64,
    beta: f64,
    d: f64,
    eps: &[f64],
) -> Result<ExpansionReport> {
    require_decreasing("epsilons", eps, 0.1, 2)?;
    let pr = h.profile.params;
    let deltas: Vec<f64> = eps.iter().map(|x| d * x).collect();
    let mut criteria = Vec::new();
    let mut series = Vec::new();
    for (label, kind, e, c) in [
        ("1", FieldKind::Pw1Approx, pr.q, beta),
        ("2", FieldKind::Pw2Approx, pr.p, alpha),
    ] {
        let (mut nf, mut nd) = (Vec::new(), Vec::new());
        for (&x, &delta) in eps.iter().zip(&deltas) {
            let quad = h.quadrature(delta, h.level)?;
            let parts = h.field_parts(kind, delta, h.level)?;
            let s = c * x;
            let rf = (e + 1.0) / e;
            let diff_f = |f: &FieldParts| {
                let v = f.pw();
                let a = v.abs();
                ((a.powf(e - 1.0 + s) - a.powf(e - 1.0)) * v).abs().powf(rf)
            };
            nf.push(finite(
                "norm",
                h.integrate_parts(&quad, &parts, diff_f).powf(1.0 / rf),
            )?);
            if e > 1.0 {
                let rd = (e + 1.0) / (e - 1.0);
                let diff_d = |f: &FieldParts| {
                    let a = f.pw().abs();
                    ((e + s) * a.powf(e - 1.0 + s) - e * a.powf(e - 1.0))
                        .abs()
                        .powf(rd)
                };
                nd.push(finite(
                    "derivative norm",
                    h.integrate_parts(&quad, &parts, diff_d).powf(1.0 / rd),
                )?);
            }
        }
        for (what, norms) in [("f", &nf), ("df", &nd)] {
            if norms.is_empty() {
                continue;
            }
            if c == 0.0 {
                let worst = norms.iter().cloned().fold(0.0, f64::max);
                criteria.push(Criterion::at_most(
                    &format!("{what}{label}_vanishes"),
                    worst,
                    0.0,
                ));
            } else {
                let scaled: Vec<f64> = norms
                    .iter()
                    .zip(&deltas)
                    .map(|(v, dl)| v / dl.ln().abs())
                    .collect();
                let order = loglog_fit(eps, &scaled).slope;
                criteria.push(Criterion::at_least(
                    &format!("order_{what}{label}"),
                    order,
                    0.9,
                ));
            }
            series.push(Series::new(
                &format!("norm_{what}{label}"),
                "epsilon",
                eps.to_vec(),
                norms.clone(),
            ));
        }
    }
    Ok(ExpansionReport::new("norm_orders", criteria, series))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::constants::{compute_constants, BMode};
    use crate::radial_ode::find_ground_state;
    use crate::ProblemParams;

    fn harness() -> Harness {
        let prof =
            Arc::new(find_ground_state(&ProblemParams::new(4, 3.0).unwrap(), 1e-12).unwrap());
        let k = compute_constants(&prof, BMode::Limit).unwrap();
        Harness::new(prof, k, 0)
    }

    #[test]
    fn boundary_loss_at_symmetric_point() {
        let h = harness();
        let r = check_lem_c1(&h, &[0.04, 0.02, 0.01]).unwrap();
        assert!(r.passed(), "{:?}", r.criteria);
        let c = r.criterion("slope_U").unwrap();
        assert!((c.target + 8.0 * 2f64.sqrt() * std::f64::consts::PI.powi(2)).abs() < 1e-3);
    }

    #[test]
    fn cross_terms_vanish_faster_than_delta() {
        let r = check_cross_terms(&harness(), &[0.04, 0.02, 0.01]).unwrap();
        assert!(r.passed(), "{:?}", r.criteria);
    }

    #[test]
    fn unperturbed_side_has_no_eps_terms() {
        let h = harness();
        let r =
            check_nonlinear_expansion(&h, NonlinearSide::P, 0.0, 0.2, &[0.1, 0.05, 0.025]).unwrap();
        assert_eq!(r.criterion("perturbation_vanishes").unwrap().measured, 0.0);
        assert!(r.criterion("eps_D_term").is_none());
        assert!(r.passed(), "{:?}", r.criteria);
    }

    #[test]
    fn rejects_bad_samples() {
        let h = harness();
        assert!(check_lem_c1(&h, &[0.01, 0.02]).is_err());
        assert!(check_cross_terms(&h, &[0.2, 0.1]).is_err());
        assert!(check_nonlinear_expansion(&h, NonlinearSide::Q, 1.0, 0.2, &[0.1, 0.05]).is_err());
        assert!(
            check_nonlinear_expansion(&h, NonlinearSide::Q, 1.0, 0.9, &[0.1, 0.05, 0.025]).is_err()
        );
        assert!(
            check_nonlinear_expansion(&h, NonlinearSide::Q, -1.0, 0.2, &[0.1, 0.05, 0.025])
                .is_err()
        );
    }
}
