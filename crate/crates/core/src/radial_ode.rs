//! Radial ground state `(U, V)` of the limit system
//!
//! ```text
//! -U'' - (n-1)/r U' = V^p,    -V'' - (n-1)/r V' = U^q,    U(0) = 1,
//! ```
//!
//! found by shooting on `v0 = V(0)`: too small a `v0` sends `V` through zero,
//! too large a `v0` sends `U` through zero, and the ground state sits at the
//! boundary between the two behaviours. The profile is stored on the accepted
//! step grid of the integrator and extended beyond `r_max` by a fitted
//! power-law tail.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_two_term_power, loglog_fit};
use crate::ode::{self, State, Stop, Tolerance};
use crate::params::{CaseTag, ProblemParams};

/// First radius of the integration; the Taylor start has truncation `O(r^6)`.
pub const R_START: f64 = 1e-4;
/// Divergence guard on `U + V` relative to `1 + v0`.
pub const DIVERGENCE_GUARD: f64 = 1e3;
/// Default outer radius.
pub const DEFAULT_R_MAX: f64 = 1e4;
/// Sweep range for the initial bracket.
pub const V0_RANGE: (f64, f64) = (1e-3, 1e3);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    UHitsZero,
    VHitsZero,
    Decaying,
    Diverging,
}

/// Sampled `(r, U, U', V, V')` from one integration.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub r: Vec<f64>,
    pub y: Vec<State>,
}

#[derive(Debug, Clone)]
pub struct ShootResult {
    pub trajectory: Trajectory,
    pub classification: Classification,
    /// Radius at which the classification was decided.
    pub r_event: f64,
}

fn signed_pow(x: f64, e: f64) -> f64 {
    if x >= 0.0 {
        x.powf(e)
    } else {
        -(-x).powf(e)
    }
}

fn rhs(n: f64, p: f64, q: f64) -> impl Fn(f64, &State) -> State {
    move |r: f64, y: &State| {
        [
            y[1],
            -signed_pow(y[2], p) - (n - 1.0) * y[1] / r,
            y[3],
            -signed_pow(y[0], q) - (n - 1.0) * y[3] / r,
        ]
    }
}

/// Taylor start at small `r`, through order `r^4`.
fn taylor_start(n: f64, p: f64, q: f64, v0: f64, r: f64) -> State {
    let vp = v0.powf(p);
    let c2u = -vp / (2.0 * n);
    let c2v = -1.0 / (2.0 * n);
    let c4u = p * v0.powf(p - 1.0) / (8.0 * n * (n + 2.0));
    let c4v = q * vp / (8.0 * n * (n + 2.0));
    let r2 = r * r;
    [
        1.0 + c2u * r2 + c4u * r2 * r2,
        2.0 * c2u * r + 4.0 * c4u * r2 * r,
        v0 + c2v * r2 + c4v * r2 * r2,
        2.0 * c2v * r + 4.0 * c4v * r2 * r,
    ]
}

fn ode_tolerance(tol: f64) -> Tolerance {
    Tolerance {
        rtol: tol,
        atol: tol * 1e-12,
        h_min: 1e-14,
    }
}

/// Integrates the radial system from the Taylor start until a component
/// crosses zero, the divergence guard trips, or `r_max` is reached.
pub fn shoot(params: &ProblemParams, v0: f64, r_max: f64, tol: f64) -> Result<ShootResult> {
    if !(v0 > 0.0 && v0.is_finite()) {
        return Err(Error::Domain(format!(
            "shooting value v0 = {v0} must be positive"
        )));
    }
    if !(r_max > 1.0) {
        return Err(Error::Domain(format!("r_max = {r_max} must exceed 1")));
    }
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::Domain(format!(
            "tolerance {tol} must lie in (0, 1e-4]"
        )));
    }
    let (n, p, q) = (params.nf(), params.p, params.q);
    let f = rhs(n, p, q);
    let y0 = taylor_start(n, p, q, v0, R_START);
    let guard = DIVERGENCE_GUARD * (1.0 + v0);
    let event = |_r: f64, y: &State| {
        if !(y[0] + y[2]).is_finite() || y[0] + y[2] > guard {
            Some(2)
        } else if y[0] < 0.0 {
            Some(0)
        } else if y[2] < 0.0 {
            Some(1)
        } else {
            None
        }
    };
    let mut traj = Trajectory::default();
    let (r_end, _, stop) = ode::integrate_until(
        &f,
        R_START,
        y0,
        r_max,
        R_START,
        ode_tolerance(tol),
        event,
        |r, y| {
            traj.r.push(r);
            traj.y.push(*y);
        },
    )?;
    let classification = match stop {
        Stop::End => Classification::Decaying,
        Stop::Event(0) => Classification::UHitsZero,
        Stop::Event(1) => Classification::VHitsZero,
        Stop::Event(_) => Classification::Diverging,
    };
    Ok(ShootResult {
        trajectory: traj,
        classification,
        r_event: r_end,
    })
}

/// Power-law tail `U ≈ a r^{-e} + c r^{-e2}` (and the same shape for `V`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// `a_{n,p}`: leading coefficient of `U`.
    pub a: f64,
    /// `b_{n,p}`: leading coefficient of `V`.
    pub b: f64,
    pub exp_u: f64,
    pub exp_v: f64,
    /// Coefficients and exponents of the subleading terms.
    pub sub_u: f64,
    pub sub_exp_u: f64,
    pub sub_v: f64,
    pub sub_exp_v: f64,
    /// Plain log-log slopes over the window and their standard errors.
    pub loglog_exp_u: f64,
    pub loglog_exp_u_se: f64,
    pub loglog_exp_v: f64,
    pub loglog_exp_v_se: f64,
    pub fit_window: [f64; 2],
    /// Max relative deviation of the fitted model from the data in the window.
    pub fit_residual: f64,
}

impl TailFit {
    pub fn u(&self, r: f64) -> f64 {
        self.a * r.powf(-self.exp_u) + self.sub_u * r.powf(-self.sub_exp_u)
    }

    pub fn du(&self, r: f64) -> f64 {
        -self.a * self.exp_u * r.powf(-self.exp_u - 1.0)
            - self.sub_u * self.sub_exp_u * r.powf(-self.sub_exp_u - 1.0)
    }

    pub fn v(&self, r: f64) -> f64 {
        self.b * r.powf(-self.exp_v) + self.sub_v * r.powf(-self.sub_exp_v)
    }

    pub fn dv(&self, r: f64) -> f64 {
        -self.b * self.exp_v * r.powf(-self.exp_v - 1.0)
            - self.sub_v * self.sub_exp_v * r.powf(-self.sub_exp_v - 1.0)
    }

    /// `U ≈ Σ c_k r^{-e_k}` as (coefficient, exponent) pairs.
    pub fn u_terms(&self) -> [(f64, f64); 2] {
        [(self.a, self.exp_u), (self.sub_u, self.sub_exp_u)]
    }

    pub fn v_terms(&self) -> [(f64, f64); 2] {
        [(self.b, self.exp_v), (self.sub_v, self.sub_exp_v)]
    }
}

/// Values and first derivatives at a radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub u: f64,
    pub du: f64,
    pub v: f64,
    pub dv: f64,
}

/// The computed ground state.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub params: ProblemParams,
    pub v0: f64,
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    pub tail: TailFit,
    pub ode_tol: f64,
    pub r_max: f64,
    /// Relative width of the final shooting bracket.
    pub bracket_width: f64,
}

/// Options for [`find_ground_state_with`].
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub ode_tol: f64,
    /// Relative bracket width at which bisection stops.
    pub bracket_tol: f64,
    pub r_max: f64,
    /// Tail fit window; defaults to `[r_max/10, r_max]` (two decades in case (ii)).
    pub fit_window: Option<[f64; 2]>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            ode_tol: 1e-12,
            bracket_tol: 1e-15,
            r_max: DEFAULT_R_MAX,
            fit_window: None,
        }
    }
}

/// Ground state with the given tolerance for the bracket and the integrator.
pub fn find_ground_state(params: &ProblemParams, tol: f64) -> Result<RadialProfile> {
    let opts = SolverOptions {
        ode_tol: tol.clamp(1e-14, 1e-12),
        bracket_tol: tol.min(1e-15),
        ..SolverOptions::default()
    };
    find_ground_state_with(params, &opts)
}

fn side(c: Classification) -> Option<bool> {
    match c {
        Classification::VHitsZero => Some(false),
        Classification::UHitsZero | Classification::Diverging => Some(true),
        Classification::Decaying => None,
    }
}

pub fn find_ground_state_with(
    params: &ProblemParams,
    opts: &SolverOptions,
) -> Result<RadialProfile> {
    params.require_supported()?;
    let probe_r = opts.r_max * 1e3;
    let classify = |v0: f64| -> Result<Classification> {
        Ok(shoot(params, v0, probe_r, opts.ode_tol)?.classification)
    };

    // Coarse logarithmic sweep; which failure lies on which side is read off
    // the data rather than assumed.
    let (lo_v, hi_v) = V0_RANGE;
    let steps = 24;
    let mut sweep = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let v0 = lo_v * (hi_v / lo_v).powf(k as f64 / steps as f64);
        sweep.push((v0, classify(v0)?));
    }
    let mut bracket = None;
    for w in sweep.windows(2) {
        match (side(w[0].1), side(w[1].1)) {
            (Some(a), Some(b)) if a != b => {
                bracket = Some((w[0].0, w[1].0, a));
                break;
            }
            _ => {}
        }
    }
    if bracket.is_none() {
        for w in sweep.windows(3) {
            if let (Some(a), None, Some(b)) = (side(w[0].1), side(w[1].1), side(w[2].1)) {
                if a != b {
                    bracket = Some((w[0].0, w[2].0, a));
                    break;
                }
            }
        }
    }
    let (mut lo, mut hi, lo_side) =
        bracket.ok_or(Error::BracketingFailure { lo: lo_v, hi: hi_v })?;

    while (hi - lo) > opts.bracket_tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match side(classify(mid)?) {
            Some(s) if s == lo_side => lo = mid,
            Some(_) => hi = mid,
            None => {
                lo = mid;
                hi = mid;
            }
        }
    }
    let mut v0 = 0.5 * (lo + hi);
    // On the diagonal p = q the ground state has U = V; starting exactly at
    // v0 = 1 keeps both components bitwise identical.
    if params.is_symmetric_point() && (v0 - 1.0).abs() < 1e-8 {
        v0 = 1.0;
    }
    let bracket_width = (hi - lo) / v0;
    let run = shoot(params, v0, opts.r_max, opts.ode_tol)?;
    let r_max = match run.classification {
        Classification::Decaying => opts.r_max,
        _ => {
            return Err(Error::MonotonicityViolation { r: run.r_event });
        }
    };
    let traj = run.trajectory;
    let mut profile = RadialProfile {
        params: *params,
        v0,
        grid: traj.r.clone(),
        u: traj.y.iter().map(|y| y[0]).collect(),
        du: traj.y.iter().map(|y| y[1]).collect(),
        v: traj.y.iter().map(|y| y[2]).collect(),
        dv: traj.y.iter().map(|y| y[3]).collect(),
        tail: TailFit {
            a: 0.0,
            b: 0.0,
            exp_u: params.decay_exponent_u(),
            exp_v: params.decay_exponent_v(),
            sub_u: 0.0,
            sub_exp_u: 0.0,
            sub_v: 0.0,
            sub_exp_v: 0.0,
            loglog_exp_u: 0.0,
            loglog_exp_u_se: 0.0,
            loglog_exp_v: 0.0,
            loglog_exp_v_se: 0.0,
            fit_window: [0.0, 0.0],
            fit_residual: 0.0,
        },
        ode_tol: opts.ode_tol,
        r_max,
        bracket_width,
    };
    profile.check_monotone()?;
    let window = opts
        .fit_window
        .unwrap_or_else(|| default_window(params, r_max));
    profile.tail = fit_tail(&profile, window)?;
    Ok(profile)
}

/// `[r_max/10, r_max]`, widened to two decades in case (ii).
pub fn default_window(params: &ProblemParams, r_max: f64) -> [f64; 2] {
    match params.case_tag {
        CaseTag::Sub => [r_max / 100.0, r_max],
        _ => [r_max / 10.0, r_max],
    }
}

/// Fits the power-law tails of `U` and `V` over `window`.
///
/// The leading exponent is fitted together with a subleading term whose
/// exponent is fixed by the equations (`max(n-2, (n-2)p-2)` for `U`,
/// `e_U·q - 2` for `V`); the plain log-log slopes are reported alongside.
pub fn fit_tail(profile: &RadialProfile, window: [f64; 2]) -> Result<TailFit> {
    let [lo, hi] = window;
    if !(lo > 0.0 && hi > lo) || hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(Error::WindowTooNarrow { lo, hi });
    }
    let hi = hi.min(profile.r_max);
    let lo = lo.max(profile.r_max / 1e4);
    if hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(Error::WindowTooNarrow { lo, hi });
    }
    let params = &profile.params;
    let nf = params.nf();
    let m = 200;
    let rs: Vec<f64> = (0..m)
        .map(|k| lo * (hi / lo).powf(k as f64 / (m - 1) as f64))
        .collect();
    let samples: Vec<Sample> = rs.iter().map(|&r| profile.interpolate(r)).collect();
    let us: Vec<f64> = samples.iter().map(|s| s.u).collect();
    let vs: Vec<f64> = samples.iter().map(|s| s.v).collect();
    if us.iter().chain(&vs).any(|x| !(*x > 0.0)) {
        return Err(Error::MonotonicityViolation { r: lo });
    }

    let lead_u = (nf - 2.0).min((nf - 2.0) * params.p - 2.0);
    let sub_u = (nf - 2.0).max((nf - 2.0) * params.p - 2.0);
    let sub_u = if (sub_u - lead_u).abs() < 1e-9 {
        lead_u + 2.0
    } else {
        sub_u
    };
    let fu = fit_two_term_power(&rs, &us, lead_u, sub_u);
    let (exp_u, a, c_u) = (fu.exponent, fu.c1, fu.c2);

    let lead_v = nf - 2.0;
    let sub_v = (lead_u * params.q - 2.0).max(lead_v + 0.5);
    let fv = fit_two_term_power(&rs, &vs, lead_v, sub_v);
    let (exp_v, b, c_v) = (fv.exponent, fv.c1, fv.c2);

    let llu = loglog_fit(&rs, &us);
    let llv = loglog_fit(&rs, &vs);
    let (ll_u, ll_u_se, ll_v, ll_v_se) = (-llu.slope, llu.slope_se, -llv.slope, llv.slope_se);

    let mut fit = TailFit {
        a,
        b,
        exp_u,
        exp_v,
        sub_u: c_u,
        sub_exp_u: sub_u,
        sub_v: c_v,
        sub_exp_v: sub_v,
        loglog_exp_u: ll_u,
        loglog_exp_u_se: ll_u_se,
        loglog_exp_v: ll_v,
        loglog_exp_v_se: ll_v_se,
        fit_window: [lo, hi],
        fit_residual: 0.0,
    };
    let mut worst = 0.0f64;
    for ((&r, &u), &v) in rs.iter().zip(&us).zip(&vs) {
        worst = worst
            .max((fit.u(r) / u - 1.0).abs())
            .max((fit.v(r) / v - 1.0).abs());
    }
    fit.fit_residual = worst;
    if !(a > 0.0 && b > 0.0) || worst > 0.05 {
        return Err(Error::PoorFit {
            residual: worst,
            limit: 0.05,
        });
    }
    Ok(fit)
}

fn quintic_hermite(x0: f64, x1: f64, f0: [f64; 3], f1: [f64; 3], x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    let h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h5 = 0.5 * t3 - t4 + 0.5 * t5;
    let d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    let d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let d2 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
    let d3 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
    let d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let d5 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
    let val = f0[0] * h0
        + h * f0[1] * h1
        + h * h * f0[2] * h2
        + f1[0] * h3
        + h * f1[1] * h4
        + h * h * f1[2] * h5;
    let der = (f0[0] * d0
        + h * f0[1] * d1
        + h * h * f0[2] * d2
        + f1[0] * d3
        + h * f1[1] * d4
        + h * h * f1[2] * d5)
        / h;
    (val, der)
}

impl RadialProfile {
    /// Second and third derivatives of `U` and `V` from the equations.
    fn higher_derivatives(&self, r: f64, u: f64, du: f64, v: f64, dv: f64) -> [f64; 4] {
        let (n, p, q) = (self.params.nf(), self.params.p, self.params.q);
        let vp = signed_pow(v, p);
        let uq = signed_pow(u, q);
        let d2u = -vp - (n - 1.0) * du / r;
        let d2v = -uq - (n - 1.0) * dv / r;
        let d3u = -p * v.abs().powf(p - 1.0) * dv - (n - 1.0) * (d2u / r - du / (r * r));
        let d3v = -q * u.abs().powf(q - 1.0) * du - (n - 1.0) * (d2v / r - dv / (r * r));
        [d2u, d3u, d2v, d3v]
    }

    /// Quintic Hermite interpolation on the grid; Taylor series below the
    /// first grid point and the tail fit beyond `r_max`.
    pub fn interpolate(&self, r: f64) -> Sample {
        let r = r.abs();
        if r <= self.grid[0] {
            let y = taylor_start(self.params.nf(), self.params.p, self.params.q, self.v0, r);
            return Sample {
                u: y[0],
                du: y[1],
                v: y[2],
                dv: y[3],
            };
        }
        let last = self.grid.len() - 1;
        if r > self.grid[last] {
            let t = &self.tail;
            return Sample {
                u: t.u(r),
                du: t.du(r),
                v: t.v(r),
                dv: t.dv(r),
            };
        }
        let i = match self.grid.binary_search_by(|g| g.partial_cmp(&r).unwrap()) {
            Ok(i) => {
                return Sample {
                    u: self.u[i],
                    du: self.du[i],
                    v: self.v[i],
                    dv: self.dv[i],
                }
            }
            Err(i) => i - 1,
        };
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let h0 = self.higher_derivatives(x0, self.u[i], self.du[i], self.v[i], self.dv[i]);
        let h1 = self.higher_derivatives(
            x1,
            self.u[i + 1],
            self.du[i + 1],
            self.v[i + 1],
            self.dv[i + 1],
        );
        let (u, _) = quintic_hermite(
            x0,
            x1,
            [self.u[i], self.du[i], h0[0]],
            [self.u[i + 1], self.du[i + 1], h1[0]],
            r,
        );
        let (du, _) = quintic_hermite(
            x0,
            x1,
            [self.du[i], h0[0], h0[1]],
            [self.du[i + 1], h1[0], h1[1]],
            r,
        );
        let (v, _) = quintic_hermite(
            x0,
            x1,
            [self.v[i], self.dv[i], h0[2]],
            [self.v[i + 1], self.dv[i + 1], h1[2]],
            r,
        );
        let (dv, _) = quintic_hermite(
            x0,
            x1,
            [self.dv[i], h0[2], h0[3]],
            [self.dv[i + 1], h1[2], h1[3]],
            r,
        );
        Sample { u, du, v, dv }
    }

    /// `(U, U', V, V')` at radius `r ≥ 0`.
    pub fn evaluate(&self, r: f64) -> Sample {
        if r == 0.0 {
            return Sample {
                u: 1.0,
                du: 0.0,
                v: self.v0,
                dv: 0.0,
            };
        }
        self.interpolate(r)
    }

    pub fn u_at(&self, r: f64) -> f64 {
        self.evaluate(r).u
    }

    pub fn v_at(&self, r: f64) -> f64 {
        self.evaluate(r).v
    }

    fn check_monotone(&self) -> Result<()> {
        for k in 1..self.grid.len() {
            let ok = self.u[k] > 0.0
                && self.v[k] > 0.0
                && self.du[k] < 0.0
                && self.dv[k] < 0.0
                && self.u[k] < self.u[k - 1]
                && self.v[k] < self.v[k - 1];
            if !ok {
                return Err(Error::MonotonicityViolation { r: self.grid[k] });
            }
        }
        Ok(())
    }

    /// Max residual of the radial equations with `U''`, `V''` taken from a
    /// five-point finite-difference stencil of the sampled `U'`, `V'`,
    /// normalized by the size of the terms.
    pub fn ode_residual(&self) -> f64 {
        let (n, p, q) = (self.params.nf(), self.params.p, self.params.q);
        let mut worst = 0.0f64;
        for k in 2..self.grid.len().saturating_sub(2) {
            let xs = &self.grid[k - 2..=k + 2];
            let w = fd_weights(self.grid[k], xs);
            let d2u: f64 = (0..5).map(|j| w[j] * self.du[k - 2 + j]).sum();
            let d2v: f64 = (0..5).map(|j| w[j] * self.dv[k - 2 + j]).sum();
            let r = self.grid[k];
            let tu = (n - 1.0) * self.du[k] / r;
            let tv = (n - 1.0) * self.dv[k] / r;
            let vp = self.v[k].powf(p);
            let uq = self.u[k].powf(q);
            let ru = (d2u + tu + vp).abs() / (d2u.abs() + tu.abs() + vp);
            let rv = (d2v + tv + uq).abs() / (d2v.abs() + tv.abs() + uq);
            worst = worst.max(ru).max(rv);
        }
        worst
    }

    /// `sup_r |n U/(q+1) + r U'| / U`, the constant in `δ|∂_δ U_δ| ≤ C U_δ`.
    pub fn scaling_derivative_bound(&self) -> f64 {
        let su = self.params.scaling().su;
        let mut worst = 0.0f64;
        for k in 0..self.grid.len() {
            let r = self.grid[k];
            worst = worst.max((su * self.u[k] + r * self.du[k]).abs() / self.u[k]);
        }
        // The tail limit of the same quantity.
        let t = &self.tail;
        worst.max((su - t.exp_u).abs())
    }

    /// Max relative jump between grid data and the tail fit at `r_max`.
    pub fn tail_mismatch(&self) -> f64 {
        let k = self.grid.len() - 1;
        let r = self.grid[k];
        let t = &self.tail;
        ((t.u(r) / self.u[k] - 1.0).abs()).max((t.v(r) / self.v[k] - 1.0).abs())
    }
}

/// Fornberg weights for the first derivative at `x0` over nodes `xs`.
fn fd_weights(x0: f64, xs: &[f64]) -> Vec<f64> {
    let m = xs.len();
    let order = 1;
    let mut c = vec![vec![0.0; order + 1]; m];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..m {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[order]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bubble(r: f64) -> f64 {
        1.0 / (1.0 + r * r / 8.0)
    }

    #[test]
    fn quintic_hermite_is_exact_on_quintics() {
        let f = |x: f64| 1.0 + x - 2.0 * x.powi(3) + 0.5 * x.powi(5);
        let df = |x: f64| 1.0 - 6.0 * x * x + 2.5 * x.powi(4);
        let d2f = |x: f64| -12.0 * x + 10.0 * x.powi(3);
        let (x0, x1) = (0.3, 1.1);
        for k in 0..=10 {
            let x = x0 + (x1 - x0) * k as f64 / 10.0;
            let (v, d) = quintic_hermite(
                x0,
                x1,
                [f(x0), df(x0), d2f(x0)],
                [f(x1), df(x1), d2f(x1)],
                x,
            );
            assert!((v - f(x)).abs() < 1e-13);
            assert!((d - df(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn fornberg_weights_differentiate_quartics() {
        let xs = [0.0, 0.1, 0.25, 0.3, 0.6];
        let w = fd_weights(0.25, &xs);
        let d: f64 = xs.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((d - 4.0 * 0.25f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn shooting_at_one_follows_the_closed_form() {
        let params = ProblemParams::new(4, 3.0).unwrap();
        let run = shoot(&params, 1.0, 50.0, 1e-12).unwrap();
        assert_eq!(run.classification, Classification::Decaying);
        for (r, y) in run.trajectory.r.iter().zip(&run.trajectory.y) {
            assert!((y[0] / bubble(*r) - 1.0).abs() < 1e-8, "r = {r}");
            assert!((y[2] / bubble(*r) - 1.0).abs() < 1e-8, "r = {r}");
        }
    }

    #[test]
    fn small_v0_is_not_a_ground_state() {
        let params = ProblemParams::new(4, 3.0).unwrap();
        let run = shoot(&params, 0.2, 1e4, 1e-10).unwrap();
        assert_eq!(run.classification, Classification::VHitsZero);
        let again = shoot(&params, 0.2, 1e4, 1e-10).unwrap();
        assert_eq!(again.classification, run.classification);
        assert_eq!(again.r_event, run.r_event);
    }

    #[test]
    fn shoot_validates_inputs() {
        let params = ProblemParams::new(4, 3.0).unwrap();
        assert!(shoot(&params, -1.0, 10.0, 1e-8).is_err());
        assert!(shoot(&params, 1.0, 0.5, 1e-8).is_err());
        assert!(shoot(&params, 1.0, 10.0, 1e-2).is_err());
    }

    #[test]
    fn ground_state_matches_aubin_talenti() {
        let params = ProblemParams::new(4, 3.0).unwrap();
        let prof = find_ground_state(&params, 1e-12).unwrap();
        assert!((prof.v0 - 1.0).abs() < 1e-6);
        for k in 0..=1000 {
            let r = 10.0 * k as f64 / 1000.0;
            let s = prof.evaluate(r);
            assert!((s.u / bubble(r) - 1.0).abs() < 1e-6, "r = {r}");
            assert!((s.v / bubble(r) - 1.0).abs() < 1e-6, "r = {r}");
        }
        let s = prof.evaluate(2.0);
        assert!((s.u - 2.0 / 3.0).abs() < 1e-8);
        assert_eq!(
            prof.evaluate(0.0),
            Sample {
                u: 1.0,
                du: 0.0,
                v: prof.v0,
                dv: 0.0
            }
        );
        assert!((prof.tail.a - 8.0).abs() < 8e-3);
        assert!((prof.tail.b - 8.0).abs() < 8e-3);
        assert!((prof.tail.exp_u - 2.0).abs() < 2e-2);
        assert!((prof.tail.exp_v - 2.0).abs() < 2e-2);
        assert!(prof.tail_mismatch() < 1e-6);
        let far = prof.evaluate(2.0 * prof.r_max);
        assert_eq!(far.u, prof.tail.u(2.0 * prof.r_max));
    }

    #[test]
    fn border_and_outside_are_rejected() {
        let border = ProblemParams::new(4, 2.0).unwrap();
        assert!(matches!(
            find_ground_state(&border, 1e-12),
            Err(Error::BorderCase)
        ));
        let outside = ProblemParams::new(4, 1.5).unwrap();
        assert!(matches!(
            find_ground_state(&outside, 1e-12),
            Err(Error::OutsideConditionP { .. })
        ));
    }

    #[test]
    fn narrow_window_is_rejected() {
        let params = ProblemParams::new(4, 3.0).unwrap();
        let prof = find_ground_state(&params, 1e-12).unwrap();
        assert!(matches!(
            fit_tail(&prof, [5e3, 1e4]),
            Err(Error::WindowTooNarrow { .. })
        ));
    }
}
