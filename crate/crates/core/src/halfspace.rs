//! Harmonic half-space corrections `φ_{1,0}`, `φ_{2,0}`.
//!
//! For boundary data `g` on `∂R^n_+`, the decaying harmonic function with
//! `∂_{x_n} φ = g` on `{x_n = 0}` is
//!
//! ```text
//! φ(x) = -(2 / (ω_n (n-2))) ∫_{R^{n-1}} g(|y'|) |x - (y', 0)|^{2-n} dy'.
//! ```
//!
//! With `g = -(ρ/2) U'(ρ) ≥ 0` (resp. `V'`) this is the correction entering
//! the ansatz; it is therefore non-positive. The `(n-1)`-fold integral is
//! reduced to `(ρ, ψ)` with `ρ = |y'|` and `ψ` the angle between `x'` and `y'`.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_power_series, Term};
use crate::params::CaseTag;
use crate::quadrature::{pairwise_sum, sphere_measure, GaussLegendre};
use crate::radial_ode::RadialProfile;

/// Radial boundary data for the Poisson integral.
pub trait BoundaryData: Send + Sync {
    fn dim(&self) -> usize;
    /// `g(ρ)` with `ρ = |y'|`.
    fn g(&self, rho: f64) -> f64;
    /// Power-law expansion `g(ρ) ≈ Σ c ρ^{-e}` valid beyond [`Self::tail_start`].
    fn tail_terms(&self) -> Vec<(f64, f64)>;
    fn tail_start(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Which {
    /// Driven by `U'`.
    Phi1,
    /// Driven by `V'`.
    Phi2,
}

/// `φ_{1,0}` or `φ_{2,0}` attached to a ground state.
#[derive(Debug, Clone)]
pub struct HalfSpaceCorrection {
    pub profile: Arc<RadialProfile>,
    pub which: Which,
}

impl HalfSpaceCorrection {
    pub fn new(profile: Arc<RadialProfile>, which: Which) -> Self {
        Self { profile, which }
    }

    /// Decay exponent of `|φ(x)|` at infinity.
    pub fn decay_exponent(&self) -> f64 {
        let params = &self.profile.params;
        let n = params.nf();
        match (self.which, params.case_tag) {
            (Which::Phi1, CaseTag::Sub) => params.p * (n - 2.0) - 3.0,
            _ => n - 3.0,
        }
    }

    /// The next two terms of the far-field expansion, used as fixed
    /// subleading terms of decay fits. They come from the second tail term of
    /// the data (`e_2 - 1`), the monopole of the data minus its leading tail
    /// (`n - 2`) and the quadrupole-type `n - 1`; when `e_2 = n - 1` the
    /// monopole diverges logarithmically and carries a `ln |x|` factor.
    pub fn sub_decay_terms(&self) -> Vec<Term> {
        let n = self.profile.params.nf();
        let k = self.decay_exponent();
        let e2 = self.tail_terms()[1].1;
        let mut cands: Vec<Term> = Vec::new();
        if (e2 - (n - 1.0)).abs() < 1e-6 {
            cands.push(Term {
                exponent: n - 2.0,
                log: true,
            });
            cands.push(Term::power(n - 2.0));
        } else {
            cands.extend([
                Term::power(n - 2.0),
                Term::power(e2 - 1.0),
                Term::power(n - 1.0),
            ]);
        }
        cands.retain(|t| t.exponent > k + 1e-6);
        cands.sort_by(|a, b| {
            (a.exponent, !a.log)
                .partial_cmp(&(b.exponent, !b.log))
                .unwrap()
        });
        cands.dedup_by(|a, b| (a.exponent - b.exponent).abs() < 1e-9 && a.log == b.log);
        cands.truncate(2);
        cands
    }
}

impl BoundaryData for HalfSpaceCorrection {
    fn dim(&self) -> usize {
        self.profile.params.n
    }

    fn g(&self, rho: f64) -> f64 {
        let s = self.profile.evaluate(rho);
        let d = match self.which {
            Which::Phi1 => s.du,
            Which::Phi2 => s.dv,
        };
        -0.5 * rho * d
    }

    fn tail_terms(&self) -> Vec<(f64, f64)> {
        let terms = match self.which {
            Which::Phi1 => self.profile.tail.u_terms(),
            Which::Phi2 => self.profile.tail.v_terms(),
        };
        terms.iter().map(|&(c, e)| (0.5 * c * e, e)).collect()
    }

    fn tail_start(&self) -> f64 {
        self.profile.r_max
    }
}

/// `g` for a point charge below the boundary: `Φ(x) = c |x + z e_n|^{2-n}`
/// is harmonic in the half-space with `∂_{x_n}Φ = g` on the boundary, so its
/// Poisson integral reproduces `Φ` exactly.
#[derive(Debug, Clone, Copy)]
pub struct PointCharge {
    pub n: usize,
    pub charge: f64,
    pub depth: f64,
}

impl PointCharge {
    pub fn potential(&self, s: f64, t: f64) -> f64 {
        let d2 = s * s + (t + self.depth) * (t + self.depth);
        self.charge * d2.powf(-(self.n as f64 - 2.0) / 2.0)
    }
}

impl BoundaryData for PointCharge {
    fn dim(&self) -> usize {
        self.n
    }

    fn g(&self, rho: f64) -> f64 {
        let n = self.n as f64;
        let z = self.depth;
        -self.charge * (n - 2.0) * z * (rho * rho + z * z).powf(-n / 2.0)
    }

    fn tail_terms(&self) -> Vec<(f64, f64)> {
        let n = self.n as f64;
        let z = self.depth;
        let c0 = -self.charge * (n - 2.0) * z;
        vec![(c0, n), (-c0 * n / 2.0 * z * z, n + 2.0)]
    }

    fn tail_start(&self) -> f64 {
        1e3 * (1.0 + self.depth)
    }
}

const PANEL_ORDER: usize = 14;
const ANGLE_ORDER: usize = 16;

fn panel_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PANEL_ORDER))
}

fn angle_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(ANGLE_ORDER))
}

/// Kernel normalization `2 / (ω_n (n-2))`, `ω_n = |S^{n-1}|`.
pub fn kernel_constant(n: usize) -> f64 {
    2.0 / (sphere_measure(n - 1) * (n as f64 - 2.0))
}

/// `∫_{S^{n-2}} |x - y'|^{2-n} dσ(ŷ')` for `|x'| = s`, `|y'| = ρ`, `x_n = t`.
pub fn angular_kernel(n: usize, s: f64, rho: f64, t: f64) -> f64 {
    let b = 2.0 * s * rho;
    let dmin = (rho - s) * (rho - s) + t * t;
    let a = dmin + b;
    if n == 4 {
        if b <= 1e-4 * a {
            let x = b / a;
            let x2 = x * x;
            return 2.0 * PI * (2.0 / a) * (1.0 + x2 / 3.0 + x2 * x2 / 5.0 + x2 * x2 * x2 / 7.0);
        }
        return 2.0 * PI / b * (2.0 * b / dmin).ln_1p();
    }
    angular_kernel_quadrature(n, s, rho, t)
}

/// Same as [`angular_kernel`] by Gauss–Legendre in `ψ`, graded towards `ψ = 0`
/// where `|x - y'|` is smallest.
pub fn angular_kernel_quadrature(n: usize, s: f64, rho: f64, t: f64) -> f64 {
    let nf = n as f64;
    let b = 2.0 * s * rho;
    let dmin = (rho - s) * (rho - s) + t * t;
    let pw = -(nf - 2.0) / 2.0;
    let surf = sphere_measure(n - 3);
    if b == 0.0 {
        return sphere_measure(n - 2) * dmin.powf(pw);
    }
    let f = |psi: f64| {
        let h = (0.5 * psi).sin();
        psi.sin().powi(n as i32 - 3) * (dmin + 2.0 * b * h * h).powf(pw)
    };
    let w = (dmin / b).sqrt();
    let mut breaks = vec![0.0];
    if w < 0.5 {
        let mut x = w.max(1e-12);
        while x < 0.5 {
            breaks.push(x);
            x *= 2.0;
        }
    }
    breaks.extend([0.5, PI / 2.0, PI]);
    surf * angle_rule().composite(&breaks, f)
}

/// Radial breakpoints for the Poisson integral at `(s, t)`, truncated at `r_cut`.
fn rho_breaks(s: f64, t: f64, r_cut: f64) -> Vec<f64> {
    let c = t.max(1e-9 * s.max(1.0));
    let mut pts = vec![0.0, r_cut];
    let mut x = 0.25;
    while x < r_cut {
        pts.push(x);
        x *= 2.0;
    }
    let mut x = c;
    while x < r_cut {
        pts.push(x);
        x *= 2.0;
    }
    if s > 0.0 {
        pts.push(s);
        let mut w = c;
        while s + w < r_cut {
            pts.push(s + w);
            if w < 0.5 * s {
                pts.push(s - w);
            }
            w *= 2.0;
        }
    }
    pts.retain(|&p| (0.0..=r_cut).contains(&p));
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last() {
            Some(&last) if p - last <= 1e-12 * p.max(1e-300) => {}
            _ => out.push(p),
        }
    }
    out
}

/// Truncation radius for an evaluation point at distance `r` from the origin.
fn cut_radius<D: BoundaryData + ?Sized>(data: &D, r: f64) -> f64 {
    data.tail_start().max(100.0 * (r + 1.0))
}

/// `φ` at `x = (s e_1, t)` with `s = |x'| ≥ 0`, `t = x_n ≥ 0`.
pub fn poisson_integral<D: BoundaryData + ?Sized>(data: &D, s: f64, t: f64) -> f64 {
    let n = data.dim();
    let nf = n as f64;
    let r_cut = cut_radius(data, (s * s + t * t).sqrt());
    let breaks = rho_breaks(s, t, r_cut);
    let body = panel_rule().composite(&breaks, |rho| {
        rho.powf(nf - 2.0) * data.g(rho) * angular_kernel(n, s, rho, t)
    });
    let tail: f64 = data
        .tail_terms()
        .iter()
        .map(|&(c, e)| c * r_cut.powf(1.0 - e) / (e - 1.0))
        .sum::<f64>()
        * sphere_measure(n - 2);
    -kernel_constant(n) * (body + tail)
}

/// On-axis evaluation `x = t e_n` by the one-dimensional route.
pub fn poisson_integral_axis<D: BoundaryData + ?Sized>(data: &D, t: f64) -> f64 {
    let n = data.dim();
    let nf = n as f64;
    let r_cut = cut_radius(data, t);
    let breaks = rho_breaks(0.0, t, r_cut);
    let surf = sphere_measure(n - 2);
    let body = panel_rule().composite(&breaks, |rho| {
        rho.powf(nf - 2.0) * data.g(rho) * surf * (rho * rho + t * t).powf(-(nf - 2.0) / 2.0)
    });
    let tail: f64 = data
        .tail_terms()
        .iter()
        .map(|&(c, e)| c * r_cut.powf(1.0 - e) / (e - 1.0))
        .sum::<f64>()
        * surf;
    -kernel_constant(n) * (body + tail)
}

fn split_point(x: &[f64]) -> Result<(f64, f64)> {
    let (tn, rest) = x
        .split_last()
        .ok_or_else(|| Error::Domain("empty point".into()))?;
    if *tn < 0.0 {
        return Err(Error::Domain(format!("x_n = {tn} lies below the boundary")));
    }
    let s = rest.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok((s, *tn))
}

/// `φ(x)` for a point of the closed half-space given in full coordinates.
pub fn phi_eval<D: BoundaryData + ?Sized>(data: &D, x: &[f64]) -> Result<f64> {
    if x.len() != data.dim() {
        return Err(Error::Domain(format!(
            "point has {} coordinates, expected {}",
            x.len(),
            data.dim()
        )));
    }
    let (s, t) = split_point(x)?;
    Ok(poisson_integral(data, s, t))
}

/// Central-difference Laplacian at every sample; returns the max `|Δφ|`.
pub fn verify_harmonic<D: BoundaryData + ?Sized>(
    data: &D,
    samples: &[Vec<f64>],
    h: f64,
) -> Result<f64> {
    let n = data.dim();
    let mut worst = 0.0f64;
    for x in samples {
        if x.len() != n || x[n - 1] < 2.0 * h {
            return Err(Error::Domain(
                "sample must be interior with x_n ≥ 2h".into(),
            ));
        }
        let centre = phi_eval(data, x)?;
        let mut terms = Vec::with_capacity(n);
        for i in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            terms.push(phi_eval(data, &xp)? - 2.0 * centre + phi_eval(data, &xm)?);
        }
        worst = worst.max((pairwise_sum(&terms) / (h * h)).abs());
    }
    Ok(worst)
}

/// Samples on the grid `{lo, hi}^{n}` of a box (the corners of the box).
pub fn box_corners(n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..1usize << n)
        .map(|mask| {
            (0..n)
                .map(|i| if mask >> i & 1 == 1 { hi } else { lo })
                .collect()
        })
        .collect()
}

/// One-sided second-order normal derivative at `(ρ e_1, 0)` against `g(ρ)`;
/// returns the max relative mismatch over `radii`.
pub fn verify_neumann_data<D: BoundaryData + ?Sized>(data: &D, radii: &[f64], h: f64) -> f64 {
    let mut worst = 0.0f64;
    for &rho in radii {
        let f0 = poisson_integral(data, rho, 0.0);
        let f1 = poisson_integral(data, rho, h);
        let f2 = poisson_integral(data, rho, 2.0 * h);
        let d = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
        let target = data.g(rho);
        worst = worst.max((d - target).abs() / target.abs().max(1e-300));
    }
    worst
}

/// Decay fit of `|φ|` along the ray through `direction` for `|x| ∈ [r_lo, r_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub target: f64,
    pub constant: f64,
    pub sub_terms: Vec<Term>,
    pub residual: f64,
    pub window: [f64; 2],
}

pub fn fit_decay(
    corr: &HalfSpaceCorrection,
    direction: [f64; 2],
    window: [f64; 2],
    samples: usize,
) -> DecayFit {
    let norm = (direction[0] * direction[0] + direction[1] * direction[1]).sqrt();
    let (ds, dt) = (direction[0] / norm, direction[1] / norm);
    let [lo, hi] = window;
    let rs: Vec<f64> = (0..samples)
        .map(|k| lo * (hi / lo).powf(k as f64 / (samples - 1) as f64))
        .collect();
    let ys: Vec<f64> = rs
        .iter()
        .map(|&r| -poisson_integral(corr, r * ds, r * dt))
        .collect();
    let target = corr.decay_exponent();
    let fit = fit_power_series(&rs, &ys, target, &corr.sub_decay_terms());
    DecayFit {
        exponent: fit.exponent(),
        target,
        constant: fit.coefficients[0],
        sub_terms: fit.terms[1..].to_vec(),
        residual: fit.residual,
        window,
    }
}

/// `(s, t, φ)` samples on a tensor grid, for plotting.
pub fn sample_grid<D: BoundaryData + ?Sized>(
    data: &D,
    s_values: &[f64],
    t_values: &[f64],
) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(s_values.len() * t_values.len());
    for &t in t_values {
        for &s in s_values {
            out.push([s, t, poisson_integral(data, s, t)]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_ode::find_ground_state;
    use crate::ProblemParams;

    #[test]
    fn angular_kernel_closed_form_matches_quadrature() {
        for &(s, rho, t) in &[
            (1.0, 0.5, 0.3),
            (1.0, 1.0, 1e-3),
            (2.0, 0.01, 0.5),
            (0.3, 7.0, 2.0),
        ] {
            let a = angular_kernel(4, s, rho, t);
            let b = angular_kernel_quadrature(4, s, rho, t);
            assert!((a / b - 1.0).abs() < 1e-10, "{s} {rho} {t}: {a} vs {b}");
        }
    }

    #[test]
    fn point_charge_is_reproduced() {
        for n in [4, 5] {
            let pc = PointCharge {
                n,
                charge: 1.0,
                depth: 0.7,
            };
            for &(s, t) in &[(0.0, 0.5), (0.4, 0.1), (2.0, 1.0), (5.0, 0.0), (0.3, 3.0)] {
                let exact = pc.potential(s, t);
                let got = poisson_integral(&pc, s, t);
                assert!(
                    (got / exact - 1.0).abs() < 1e-6,
                    "n={n} s={s} t={t}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn axis_route_agrees() {
        let pc = PointCharge {
            n: 4,
            charge: 2.0,
            depth: 0.5,
        };
        for t in [0.01, 0.3, 4.0] {
            let a = poisson_integral_axis(&pc, t);
            let b = poisson_integral(&pc, 0.0, t);
            assert!((a / b - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_points_below_boundary() {
        let pc = PointCharge {
            n: 4,
            charge: 1.0,
            depth: 1.0,
        };
        assert!(phi_eval(&pc, &[0.0, 0.0, 0.0, -0.1]).is_err());
        assert!(phi_eval(&pc, &[0.0, 0.0, 0.1]).is_err());
    }

    #[test]
    fn profile_correction_sign_and_neumann() {
        let prof =
            Arc::new(find_ground_state(&ProblemParams::new(4, 3.0).unwrap(), 1e-12).unwrap());
        let corr = HalfSpaceCorrection::new(prof, Which::Phi1);
        let g1 = corr.g(1.0);
        let exact = 0.5 * 0.25 / (1.125f64 * 1.125);
        assert!((g1 - exact).abs() < 1e-8);
        for &(s, t) in &[(0.0, 0.5), (1.0, 0.2), (3.0, 2.0)] {
            assert!(poisson_integral(&corr, s, t) < 0.0);
        }
        assert!(verify_neumann_data(&corr, &[0.5, 1.0, 5.0], 1e-3) < 1e-2);
    }
}
