//! End-to-end: profile, constants, reduced energy and a few harness checks.

use std::f64::consts::PI;
use std::sync::Arc;

use lane_emden::verify::{check_cross_terms, check_lem_c1, Harness};
use lane_emden::{compute_constants, find_ground_state, BMode, ProblemParams, ReducedEnergy};

fn harness(p: f64, level: usize) -> Harness {
    let prof = Arc::new(find_ground_state(&ProblemParams::new(4, p).unwrap(), 1e-12).unwrap());
    let k = compute_constants(&prof, BMode::Limit).unwrap();
    Harness::new(prof, k, level)
}

#[test]
fn numerical_constants_reproduce_symmetric_maximizer() {
    let h = harness(3.0, 0);
    let k = &h.constants;
    let pi2 = PI * PI;
    assert!((k.a1 / (32.0 * pi2 / 3.0) - 1.0).abs() < 1e-6);
    assert!((k.b1 / (8.0 * 2f64.sqrt() * pi2) - 1.0).abs() < 1e-6);
    assert!((k.c1 / (24.0 * 2f64.sqrt() * pi2) - 1.0).abs() < 1e-6);
    let re = ReducedEnergy::new(k.clone(), 1.0, 1.0).unwrap();
    let d = re.d_star().unwrap();
    assert!((d - 1.0 / (6.0 * 2f64.sqrt())).abs() < 1e-6);
    assert!(re.g_second(d).unwrap() < 0.0);
}

#[test]
fn boundary_constants_agree_across_modes() {
    for p in [3.0, 2.5, 1.9] {
        let prof = find_ground_state(&ProblemParams::new(4, p).unwrap(), 1e-12).unwrap();
        let lim = compute_constants(&prof, BMode::Limit).unwrap();
        let near = compute_constants(&prof, BMode::Delta(0.01)).unwrap();
        let nearer = compute_constants(&prof, BMode::Delta(0.001)).unwrap();
        assert!(lim.a_identity_defect() < 1e-3, "p={p}");
        assert!((near.b1 / lim.b1 - 1.0).abs() < 0.05, "p={p}");
        for (a, b, l) in [(near.b1, nearer.b1, lim.b1), (near.b2, nearer.b2, lim.b2)] {
            assert!((b - l).abs() < (a - l).abs(), "p={p}");
        }
        if p > 2.0 {
            assert!((near.b2 / lim.b2 - 1.0).abs() < 0.05, "p={p}");
        } else {
            // V^{p+1} r^n decays like r^{-1.8}: the strip integral converges slowly.
            assert!((nearer.b2 / lim.b2 - 1.0).abs() < 0.05, "p={p}");
        }
    }
}

#[test]
fn off_diagonal_maximizer_is_critical() {
    let h = harness(2.5, 0);
    let re = ReducedEnergy::new(h.constants.clone(), 1.0, 0.5).unwrap();
    let d = re.d_star().unwrap();
    let scale = re.log_coefficient() / d;
    assert!(re.g_prime(d).unwrap().abs() <= 1e-12 * scale);
    assert!((re.d_star_golden().unwrap() / d - 1.0).abs() < 1e-6);
}

#[test]
fn boundary_loss_is_resolved_at_level_zero() {
    let ds = [0.04, 0.02, 0.01];
    let coarse = check_lem_c1(&harness(3.0, 0), &ds).unwrap();
    let fine = check_lem_c1(&harness(3.0, 1), &ds).unwrap();
    for label in ["slope_U", "slope_V"] {
        let (a, b) = (
            coarse.criterion(label).unwrap(),
            fine.criterion(label).unwrap(),
        );
        assert!(
            (a.measured - b.measured).abs() <= 1e-6 * b.measured.abs(),
            "{label}"
        );
        assert!(b.pass);
    }
}

// Case (ii): the cross terms still vanish faster than δ, only more slowly
// than the 1.5-per-halving rule used at the symmetric point.
#[test]
fn case_ii_cross_terms_still_sublinear() {
    let r = check_cross_terms(&harness(1.9, 0), &[0.04, 0.02, 0.01]).unwrap();
    for label in ["shrink_U", "shrink_V"] {
        let c = r.criterion(label).unwrap();
        assert!(c.measured > 1.2, "{label}: {}", c.measured);
    }
    for s in &r.series {
        let scaled: Vec<f64> = s.x.iter().zip(&s.y).map(|(d, v)| v / d).collect();
        assert!(
            scaled.windows(2).all(|w| w[1] < w[0]),
            "{}: {scaled:?}",
            s.label
        );
    }
}
