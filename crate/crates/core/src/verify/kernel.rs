//! Radial form of the kernel of the linearized system.
//!
//! The scaling direction `Ψ⁰ = rU' + σ_u U`, `Φ⁰ = rV' + σ_v V` solves
//! `-ΔΨ⁰ = pV^{p-1}Φ⁰`, `-ΔΦ⁰ = qU^{q-1}Ψ⁰`; the translation direction
//! `(U', V')·x_l/r` solves the same system with the extra `(n-1)/r²` term of
//! the first spherical harmonic.

use serde::{Deserialize, Serialize};

use super::{Criterion, ExpansionReport, Series};
use crate::error::{Error, Result};
use crate::radial_ode::RadialProfile;

/// Values and the first three derivatives of a radial function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub f: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// Maximum residuals, each relative to the sup of the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelResidual {
    pub scaling: f64,
    pub translation: f64,
}

impl KernelResidual {
    pub fn max(&self) -> f64 {
        self.scaling.max(self.translation)
    }
}

struct Accum {
    res: f64,
    scale: f64,
}

impl Accum {
    fn new() -> Self {
        Self {
            res: 0.0,
            scale: 0.0,
        }
    }

    fn push(&mut self, lhs: f64, rhs: f64) {
        self.res = self.res.max((lhs - rhs).abs());
        self.scale = self.scale.max(rhs.abs());
    }

    fn value(&self) -> f64 {
        self.res / self.scale.max(f64::MIN_POSITIVE)
    }
}

/// Residuals from exact jets of `U` and `V` at the given radii.
fn residual_from_jets<F: Fn(f64) -> (Jet, Jet)>(
    n: f64,
    p: f64,
    q: f64,
    radii: &[f64],
    jets: F,
) -> KernelResidual {
    let (su, sv) = (n / (q + 1.0), n / (p + 1.0));
    let mut scal = Accum::new();
    let mut tran = Accum::new();
    for &r in radii {
        let (u, v) = jets(r);
        let psi = r * u.d1 + su * u.f;
        let phi = r * v.d1 + sv * v.f;
        let lap = |j: &Jet, s: f64| {
            let d1 = (1.0 + s) * j.d1 + r * j.d2;
            let d2 = (2.0 + s) * j.d2 + r * j.d3;
            d2 + (n - 1.0) * d1 / r
        };
        scal.push(-lap(&u, su), p * v.f.powf(p - 1.0) * phi);
        scal.push(-lap(&v, sv), q * u.f.powf(q - 1.0) * psi);
        let tl = |j: &Jet| -j.d3 - (n - 1.0) * j.d2 / r + (n - 1.0) * j.d1 / (r * r);
        tran.push(tl(&u), p * v.f.powf(p - 1.0) * v.d1);
        tran.push(tl(&v), q * u.f.powf(q - 1.0) * u.d1);
    }
    KernelResidual {
        scaling: scal.value(),
        translation: tran.value(),
    }
}

/// Residuals with finite differences of `Ψ⁰`, `Φ⁰`, `U'`, `V'` built from
/// the interpolated profile.
fn residual_fd(profile: &RadialProfile, radii: &[f64]) -> KernelResidual {
    let pr = profile.params;
    let (n, p, q) = (pr.nf(), pr.p, pr.q);
    let sc = pr.scaling();
    let mut scal = Accum::new();
    let mut tran = Accum::new();
    for &r in radii {
        let h = 1e-3 * r.max(0.1);
        let at = |k: f64| profile.evaluate(r + k * h);
        let st = [at(-2.0), at(-1.0), at(0.0), at(1.0), at(2.0)];
        let lap = |f: &dyn Fn(usize) -> f64| {
            let d1 = (f(0) - 8.0 * f(1) + 8.0 * f(3) - f(4)) / (12.0 * h);
            let d2 = (-f(0) + 16.0 * f(1) - 30.0 * f(2) + 16.0 * f(3) - f(4)) / (12.0 * h * h);
            (d1, d2 + (n - 1.0) * d1 / r)
        };
        let rk = |k: usize| r + (k as f64 - 2.0) * h;
        let psi = |k: usize| rk(k) * st[k].du + sc.su * st[k].u;
        let phi = |k: usize| rk(k) * st[k].dv + sc.sv * st[k].v;
        let c = st[2];
        scal.push(-lap(&psi).1, p * c.v.powf(p - 1.0) * phi(2));
        scal.push(-lap(&phi).1, q * c.u.powf(q - 1.0) * psi(2));
        let du = |k: usize| st[k].du;
        let dv = |k: usize| st[k].dv;
        tran.push(
            -lap(&du).1 + (n - 1.0) * c.du / (r * r),
            p * c.v.powf(p - 1.0) * c.dv,
        );
        tran.push(
            -lap(&dv).1 + (n - 1.0) * c.dv / (r * r),
            q * c.u.powf(q - 1.0) * c.du,
        );
    }
    KernelResidual {
        scaling: scal.value(),
        translation: tran.value(),
    }
}

/// Jets of the profile with `U'' , U'''` taken from the equation itself.
fn ode_jets(profile: &RadialProfile, r: f64) -> (Jet, Jet) {
    let pr = profile.params;
    let (n, p, q) = (pr.nf(), pr.p, pr.q);
    let s = profile.evaluate(r);
    let u2 = -s.v.powf(p) - (n - 1.0) * s.du / r;
    let v2 = -s.u.powf(q) - (n - 1.0) * s.dv / r;
    let u3 = -p * s.v.powf(p - 1.0) * s.dv - (n - 1.0) * (u2 / r - s.du / (r * r));
    let v3 = -q * s.u.powf(q - 1.0) * s.du - (n - 1.0) * (v2 / r - s.dv / (r * r));
    (
        Jet {
            f: s.u,
            d1: s.du,
            d2: u2,
            d3: u3,
        },
        Jet {
            f: s.v,
            d1: s.dv,
            d2: v2,
            d3: v3,
        },
    )
}

/// Jet of `(1 + r²/(n(n-2)))^{-(n-2)/2}`.
pub fn aubin_talenti_jet(n: usize, r: f64) -> Jet {
    let nf = n as f64;
    let c = nf * (nf - 2.0);
    let k = 0.5 * (nf - 2.0);
    let w = 1.0 + r * r / c;
    let (w1, w2) = (2.0 * r / c, 2.0 / c);
    Jet {
        f: w.powf(-k),
        d1: -k * w.powf(-k - 1.0) * w1,
        d2: k * (k + 1.0) * w.powf(-k - 2.0) * w1 * w1 - k * w.powf(-k - 1.0) * w2,
        d3: -k * (k + 1.0) * (k + 2.0) * w.powf(-k - 3.0) * w1.powi(3)
            + 3.0 * k * (k + 1.0) * w.powf(-k - 2.0) * w1 * w2,
    }
}

fn radii(r_max: f64) -> Vec<f64> {
    let (lo, hi) = (0.05f64, r_max);
    let m = 240;
    (0..m)
        .map(|k| lo * (hi / lo).powf(k as f64 / (m - 1) as f64))
        .collect()
}

/// Residual of the kernel identities at the symmetric point, where the
/// ground state is known in closed form.
pub fn check_kernel_closed_form(n: usize) -> Result<KernelResidual> {
    if n < 3 {
        return Err(Error::Domain(format!("dimension {n} too small")));
    }
    let p = (n as f64 + 2.0) / (n as f64 - 2.0);
    let jet = |r: f64| {
        let j = aubin_talenti_jet(n, r);
        (j, j)
    };
    Ok(residual_from_jets(n as f64, p, p, &radii(100.0), jet))
}

/// Finite-difference residual (contract `≤ 1e-4`) and the residual with
/// exact derivatives from the equation; at the symmetric point the
/// closed-form residual (contract `≤ 1e-6`) is reported too.
pub fn check_kernel(profile: &RadialProfile) -> Result<ExpansionReport> {
    let pr = profile.params;
    if profile.grid.is_empty() {
        return Err(Error::Domain("empty profile".into()));
    }
    let rs = radii(0.1 * profile.r_max);
    let fd = residual_fd(profile, &rs);
    let exact = residual_from_jets(pr.nf(), pr.p, pr.q, &rs, |r| ode_jets(profile, r));
    let mut criteria = vec![
        Criterion::at_most("fd_scaling", fd.scaling, 1e-4),
        Criterion::at_most("fd_translation", fd.translation, 1e-4),
        Criterion::at_most("analytic_scaling", exact.scaling, 1e-6),
        Criterion::at_most("analytic_translation", exact.translation, 1e-6),
    ];
    if pr.is_symmetric_point() {
        let cf = check_kernel_closed_form(pr.n)?;
        criteria.push(Criterion::at_most("closed_form", cf.max(), 1e-6));
    }
    let fd_series: Vec<f64> = rs
        .iter()
        .map(|&r| residual_fd(profile, &[r]).max())
        .collect();
    let series = vec![Series::new("fd_pointwise", "r", rs.clone(), fd_series)];
    Ok(ExpansionReport::new("kernel", criteria, series))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_matches_finite_differences() {
        let h = 1e-4;
        for r in [0.3, 1.0, 4.0] {
            let j = aubin_talenti_jet(5, r);
            let (a, b) = (aubin_talenti_jet(5, r + h), aubin_talenti_jet(5, r - h));
            assert!(((a.f - b.f) / (2.0 * h) - j.d1).abs() < 1e-7);
            assert!(((a.d1 - b.d1) / (2.0 * h) - j.d2).abs() < 1e-7);
            assert!(((a.d2 - b.d2) / (2.0 * h) - j.d3).abs() < 1e-7);
        }
    }

    #[test]
    fn closed_form_residual_is_rounding_level() {
        for n in [3, 4, 5, 6] {
            let r = check_kernel_closed_form(n).unwrap();
            assert!(r.max() < 1e-12, "n={n}: {r:?}");
        }
        assert!(check_kernel_closed_form(2).is_err());
    }

    #[test]
    fn wrong_scaling_exponent_is_detected() {
        // Using the exponent of the other component breaks the identity.
        let jet = |r: f64| {
            let j = aubin_talenti_jet(4, r);
            (j, j)
        };
        let bad = residual_from_jets(4.0, 3.0, 2.5, &radii(50.0), jet);
        assert!(bad.scaling > 1e-3);
    }
}
