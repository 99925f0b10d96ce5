//! The Poisson integral against an independent route: spherical coordinates
//! centred at the evaluation point, at randomly drawn points.

use std::f64::consts::PI;
use std::sync::Arc;

use lane_emden::halfspace::{poisson_integral, BoundaryData, HalfSpaceCorrection, Which};
use lane_emden::quadrature::GaussLegendre;
use lane_emden::{find_ground_state, ProblemParams};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// `φ(s e_1, t)` for `n = 4` with `y' = x' + r ω`:
/// `-c_4 · 2π ∫_0^∞ r²/(r²+t²) ∫_0^π g(|x'+rω|) sin θ dθ dr`.
fn recentred(data: &dyn BoundaryData, s: f64, t: f64) -> f64 {
    let gl = GaussLegendre::new(24);
    let r_cut = 1e4;
    let mut breaks = vec![0.0];
    let mut x = 1e-3;
    while x < r_cut {
        breaks.push(x);
        x *= 1.5;
    }
    breaks.push(r_cut);
    let mut theta = vec![0.0];
    for k in 1..=16 {
        theta.push(PI * k as f64 / 16.0);
    }
    let body = gl.composite(&breaks, |r| {
        let inner = gl.composite(&theta, |th| {
            let rho = (s * s + r * r + 2.0 * s * r * th.cos()).max(0.0).sqrt();
            data.g(rho) * th.sin()
        });
        2.0 * PI * inner * r * r / (r * r + t * t)
    });
    let tail: f64 = data
        .tail_terms()
        .iter()
        .map(|&(c, e)| c * r_cut.powf(1.0 - e) / (e - 1.0))
        .sum::<f64>()
        * 4.0
        * PI;
    let c4 = 2.0 / (2.0 * PI * PI * 2.0);
    -c4 * (body + tail)
}

fn run(p: f64, which: Which, seed: u64) {
    let prof = Arc::new(find_ground_state(&ProblemParams::new(4, p).unwrap(), 1e-12).unwrap());
    let corr = HalfSpaceCorrection::new(prof, which);
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..10 {
        let s = rng.gen_range(0.0..3.0);
        let t = rng.gen_range(0.2..3.0);
        let a = poisson_integral(&corr, s, t);
        let b = recentred(&corr, s, t);
        assert!(
            (a - b).abs() <= 1e-3 * b.abs(),
            "p={p} {which:?} s={s} t={t}: {a} vs {b}"
        );
    }
}

#[test]
fn symmetric_point_random_points() {
    run(3.0, Which::Phi1, 7);
}

#[test]
fn case_ii_both_corrections() {
    run(1.9, Which::Phi1, 11);
    run(1.9, Which::Phi2, 13);
}
