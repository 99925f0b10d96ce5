//! Dormand–Prince 5(4) stepper for small fixed-size systems.

use crate::error::{Error, Result};

pub type State = [f64; 4];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..4 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince step; returns the 5th-order solution and the embedded
/// error vector.
pub fn dopri_step<F: Fn(f64, &State) -> State>(f: &F, t: f64, y: &State, h: f64) -> (State, State) {
    let k1 = f(t, y);
    let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, &k1)]));
    let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
    let k4 = f(
        t + C4 * h,
        &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
    );
    let k5 = f(
        t + C5 * h,
        &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        t + h,
        &axpy(
            y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    );
    let y5 = axpy(
        y,
        h,
        &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
    );
    let k7 = f(t + h, &y5);
    let mut err = [0.0; 4];
    for i in 0..4 {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y5, err)
}

/// Step-size controller settings.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
}

/// Outcome of [`integrate_until`].
pub enum Stop {
    /// Reached the end of the interval.
    End,
    /// The event predicate changed from false to true; the event is localized
    /// to within `h_min` and the returned state is just before it.
    Event(usize),
}

/// Adaptive integration from `t0` to `t_end`, recording every accepted step
/// through `record`. `event` returns `Some(id)` when the state is past an
/// event; the crossing is then localized by bisection of the last step.
pub fn integrate_until<F, E, R>(
    f: &F,
    t0: f64,
    y0: State,
    t_end: f64,
    h0: f64,
    tol: Tolerance,
    event: E,
    mut record: R,
) -> Result<(f64, State, Stop)>
where
    F: Fn(f64, &State) -> State,
    E: Fn(f64, &State) -> Option<usize>,
    R: FnMut(f64, &State),
{
    let mut t = t0;
    let mut y = y0;
    let mut h = h0;
    record(t, &y);
    let mut rejects = 0usize;
    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        let (y_new, err) = dopri_step(f, t, &y, h);
        let mut norm = 0.0f64;
        for i in 0..4 {
            let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            norm = norm.max((err[i] / sc).abs());
        }
        if !norm.is_finite() {
            norm = 1e10;
        }
        if norm <= 1.0 {
            if let Some(id) = event(t + h, &y_new) {
                // Bisect on the step length to bracket the event.
                let (mut lo, mut hi) = (0.0, h);
                let mut y_lo = y;
                while hi - lo > tol.h_min.max(1e-14 * t.abs()) {
                    let mid = 0.5 * (lo + hi);
                    let (ym, _) = dopri_step(f, t, &y, mid);
                    if event(t + mid, &ym).is_some() {
                        hi = mid;
                    } else {
                        lo = mid;
                        y_lo = ym;
                    }
                }
                let t_ev = t + lo;
                if lo > 0.0 {
                    record(t_ev, &y_lo);
                }
                return Ok((t_ev, y_lo, Stop::Event(id)));
            }
            t += h;
            y = y_new;
            record(t, &y);
            rejects = 0;
            let fac = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        } else {
            rejects += 1;
            h *= (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9);
            if h < tol.h_min || rejects > 60 {
                return Err(Error::StepFailure {
                    r: t,
                    reason: format!("step size {h:.3e} below minimum with error ratio {norm:.3e}"),
                });
            }
        }
    }
    Ok((t, y, Stop::End))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_to_tolerance() {
        let f = |_t: f64, y: &State| [y[1], -y[0], y[3], -y[2]];
        let tol = Tolerance {
            rtol: 1e-11,
            atol: 1e-13,
            h_min: 1e-12,
        };
        let (t, y, stop) = integrate_until(
            &f,
            0.0,
            [0.0, 1.0, 1.0, 0.0],
            10.0,
            1e-3,
            tol,
            |_, _| None,
            |_, _| {},
        )
        .unwrap();
        assert!(matches!(stop, Stop::End));
        assert_eq!(t, 10.0);
        assert!((y[0] - 10f64.sin()).abs() < 1e-9);
        assert!((y[2] - 10f64.cos()).abs() < 1e-9);
    }

    #[test]
    fn event_is_localized() {
        let f = |_t: f64, y: &State| [y[1], -y[0], 0.0, 0.0];
        let tol = Tolerance {
            rtol: 1e-10,
            atol: 1e-12,
            h_min: 1e-13,
        };
        let (t, _, stop) = integrate_until(
            &f,
            0.0,
            [1.0, 0.0, 0.0, 0.0],
            10.0,
            1e-2,
            tol,
            |_, y| if y[0] < 0.0 { Some(0) } else { None },
            |_, _| {},
        )
        .unwrap();
        assert!(matches!(stop, Stop::Event(0)));
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    }
}
