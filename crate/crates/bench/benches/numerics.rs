use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use lane_emden::halfspace::phi_eval;
use lane_emden::verify::BallQuadrature;
use lane_emden::{
    compute_constants, find_ground_state, BMode, HalfSpaceCorrection, ProblemParams, Which,
};

fn ground_state(c: &mut Criterion) {
    let mut g = c.benchmark_group("ground_state");
    g.sample_size(10);
    for p in [3.0, 1.9] {
        let pr = ProblemParams::new(4, p).unwrap();
        g.bench_function(format!("p={p}"), |b| {
            b.iter(|| find_ground_state(black_box(&pr), 1e-12).unwrap())
        });
    }
    g.finish();
}

fn phi(c: &mut Criterion) {
    let profile = Arc::new(find_ground_state(&ProblemParams::new(4, 3.0).unwrap(), 1e-12).unwrap());
    let corr = HalfSpaceCorrection::new(profile, Which::Phi1);
    let mut g = c.benchmark_group("phi_eval");
    for (name, x) in [
        ("near", [0.5, 0.0, 0.0, 0.3]),
        ("far", [20.0, 5.0, 0.0, 10.0]),
    ] {
        g.bench_function(name, |b| b.iter(|| phi_eval(&corr, black_box(&x)).unwrap()));
    }
    g.finish();
}

fn constants(c: &mut Criterion) {
    let profile = find_ground_state(&ProblemParams::new(4, 2.5).unwrap(), 1e-12).unwrap();
    let mut g = c.benchmark_group("constants");
    g.sample_size(10);
    g.bench_function("limit", |b| {
        b.iter(|| compute_constants(black_box(&profile), BMode::Limit).unwrap())
    });
    g.bench_function("delta", |b| {
        b.iter(|| compute_constants(black_box(&profile), BMode::Delta(0.01)).unwrap())
    });
    g.finish();
}

fn ball(c: &mut Criterion) {
    let mut g = c.benchmark_group("ball_quadrature");
    g.sample_size(10);
    g.bench_function("build", |b| {
        b.iter(|| BallQuadrature::new(4, black_box(0.01), 0).unwrap())
    });
    let quad = BallQuadrature::new(4, 0.01, 0).unwrap();
    g.bench_function("integrate", |b| {
        b.iter(|| quad.integrate(|s, t| 1.0 / (1.0 + s * s + (t - 0.99).powi(2) / 1e-4)))
    });
    g.finish();
}

criterion_group!(benches, ground_state, phi, constants, ball);
criterion_main!(benches);
