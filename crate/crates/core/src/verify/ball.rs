//! Axisymmetric quadrature over the unit ball.
//!
//! Every integrand in scope depends on `x` only through `s = |x'|` and
//! `t = x_n`, so `∫_Ω f dx = |S^{n-2}| ∫∫ f(s,t) s^{n-2} ds dt` over the half
//! disc. The upper half is parametrized around the north pole by
//! `(s, t) = (ρ sin θ, 1 - ρ cos θ)` with panels in `ρ` graded geometrically
//! towards the pole; the lower half is its exact mirror `t ↦ -t`, so odd
//! integrands cancel node by node.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{ball_volume, pairwise_sum, sphere_measure, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub s: f64,
    pub t: f64,
    /// Includes `|S^{n-2}| s^{n-2}` and the Jacobian.
    pub w: f64,
}

#[derive(Debug, Clone)]
pub struct BallQuadrature {
    pub n: usize,
    pub delta_min: f64,
    pub level: usize,
    /// Nodes of the upper half (`t > 0`).
    pub nodes: Vec<Node>,
}

impl BallQuadrature {
    /// `delta_min` sets the finest panel (`≈ delta_min / 4`) at the poles;
    /// `level` raises the Gauss orders.
    pub fn new(n: usize, delta_min: f64, level: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("dimension {n} too small")));
        }
        if !(delta_min > 0.0 && delta_min <= 1.0) {
            return Err(Error::Domain(format!(
                "delta_min = {delta_min} must lie in (0, 1]"
            )));
        }
        let rho_rule = GaussLegendre::new(10 + 4 * level);
        let theta_rule = GaussLegendre::new(16 + 6 * level);
        let surf = sphere_measure(n - 2);

        let mut breaks = vec![0.0];
        let mut r = delta_min / 4.0;
        while r < 0.75 {
            breaks.push(r);
            r *= 2.0;
        }
        breaks.push(1.0);

        // (ρ, dρ-weight) pairs over [0, √2].
        let mut rho_nodes: Vec<(f64, f64)> = Vec::new();
        for pair in breaks.windows(2) {
            rho_nodes.extend(rho_rule.mapped(pair[0], pair[1]));
        }
        let u_max = (2f64.sqrt() - 1.0).sqrt();
        for pair in [[0.0, 0.5 * u_max], [0.5 * u_max, u_max]] {
            for (u, w) in rho_rule.mapped(pair[0], pair[1]) {
                rho_nodes.push((1.0 + u * u, 2.0 * u * w));
            }
        }

        let mut nodes = Vec::with_capacity(rho_nodes.len() * theta_rule.order());
        for (rho, wr) in rho_nodes {
            let lo = (1.0 / rho).min(1.0).acos();
            let hi = (0.5 * rho).acos();
            for (th, wt) in theta_rule.mapped(lo, hi) {
                let s = rho * th.sin();
                let t = 1.0 - rho * th.cos();
                nodes.push(Node {
                    s,
                    t,
                    w: surf * s.powi(n as i32 - 2) * rho * wr * wt,
                });
            }
        }
        Ok(Self {
            n,
            delta_min,
            level,
            nodes,
        })
    }

    pub fn refined(&self) -> Result<Self> {
        Self::new(self.n, self.delta_min, self.level + 1)
    }

    pub fn len(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Values of `f` at each upper node and its mirror: `(f(s,t), f(s,-t))`.
    pub fn sample<T, F>(&self, f: F) -> Vec<(T, T)>
    where
        T: Send,
        F: Fn(f64, f64) -> T + Sync,
    {
        self.nodes
            .par_iter()
            .map(|nd| (f(nd.s, nd.t), f(nd.s, -nd.t)))
            .collect()
    }

    /// Values of `f` at each upper node only.
    pub fn sample_upper<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(f64, f64) -> T + Sync,
    {
        self.nodes.par_iter().map(|nd| f(nd.s, nd.t)).collect()
    }

    /// `Σ w (h(upper) + h(lower))` over previously sampled values; each pair is
    /// summed before weighting so odd integrands cancel exactly.
    pub fn integrate_samples<T, H>(&self, samples: &[(T, T)], h: H) -> f64
    where
        H: Fn(&T) -> f64,
    {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(samples)
            .map(|(nd, (a, b))| nd.w * (h(a) + h(b)))
            .collect();
        pairwise_sum(&terms)
    }

    /// `Σ w h(v)` over the upper half only.
    pub fn integrate_upper_samples<T, H>(&self, samples: &[T], h: H) -> f64
    where
        H: Fn(&T) -> f64,
    {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(samples)
            .map(|(nd, v)| nd.w * h(v))
            .collect();
        pairwise_sum(&terms)
    }

    /// `∫_Ω f`.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let vals = self.sample(f);
        self.integrate_samples(&vals, |v| *v)
    }

    /// `∫_{Ω ∩ {x_n > 0}} f`.
    pub fn integrate_upper<F>(&self, f: F) -> f64
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let vals = self.sample_upper(f);
        self.integrate_upper_samples(&vals, |v| *v)
    }

    /// `∫_Ω |f|`, a scale for judging cancellation.
    pub fn integrate_abs<F>(&self, f: F) -> f64
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let vals = self.sample(|s, t| f(s, t).abs());
        self.integrate_samples(&vals, |v| *v)
    }

    /// Relative error of `∫_Ω 1` against the exact ball volume.
    pub fn volume_error(&self) -> f64 {
        let v = self.integrate(|_, _| 1.0);
        (v / ball_volume(self.n) - 1.0).abs()
    }
}
