//! One-dimensional quadrature building blocks.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_m` from the Tricomi initial guess.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let m = order;
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        for i in 0..m.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(m, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Maps the rule onto `[a, b]`, returning `(x, w)` pairs.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over consecutive breakpoints.
    pub fn composite<F: FnMut(f64) -> f64>(&self, breaks: &[f64], mut f: F) -> f64 {
        let mut panels = Vec::with_capacity(breaks.len());
        for pair in breaks.windows(2) {
            panels.push(self.integrate(pair[0], pair[1], &mut f));
        }
        pairwise_sum(&panels)
    }
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Breakpoints `a = b_0 < b_1 < … < b_k = b` that shrink geometrically
/// towards `a` with ratio 1/2 until the first panel is no wider than `finest`.
pub fn graded_towards_left(a: f64, b: f64, finest: f64) -> Vec<f64> {
    let mut pts = vec![b];
    let mut w = b - a;
    while w > finest && w > 0.0 {
        w *= 0.5;
        pts.push(a + w);
    }
    pts.push(a);
    pts.reverse();
    pts.dedup();
    pts
}

/// Same as [`graded_towards_left`] but refined towards `b`.
pub fn graded_towards_right(a: f64, b: f64, finest: f64) -> Vec<f64> {
    graded_towards_left(-b, -a, finest)
        .into_iter()
        .rev()
        .map(|x| -x)
        .collect()
}

/// Breakpoints on `[a, b]` with geometric growth factor 2 starting from `first`
/// (used for semi-infinite style ranges with a known inner scale).
pub fn geometric_outward(a: f64, b: f64, first: f64) -> Vec<f64> {
    let mut pts = vec![a];
    let mut w = first.max(1e-300);
    let mut x = a;
    while x + w < b {
        x += w;
        pts.push(x);
        w *= 2.0;
    }
    if b - x < 0.5 * w / 2.0 && pts.len() > 1 {
        pts.pop();
    }
    pts.push(b);
    pts
}

/// Pairwise (cascade) summation with a fixed reduction tree.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

const GK15_XK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const GK15_WK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const GK15_WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: FnMut(f64) -> f64>(a: f64, b: f64, f: &mut F) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * GK15_WK[7];
    let mut gauss = fc * GK15_WG[3];
    for j in 0..7 {
        let dx = h * GK15_XK[j];
        let s = f(c - dx) + f(c + dx);
        kron += GK15_WK[j] * s;
        if j % 2 == 1 {
            gauss += GK15_WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive Gauss–Kronrod (7/15) over `[a, b]` with initial
/// breakpoints; bisects the worst panel until `error <= max(abs_tol, rel_tol·|I|)`.
pub fn adaptive_gk<F: FnMut(f64) -> f64>(
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
    mut f: F,
) -> Result<Adaptive> {
    let mut panels: Vec<(f64, f64, f64, f64)> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (v, e) = gk15(w[0], w[1], &mut f);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let values: Vec<f64> = panels.iter().map(|p| p.2).collect();
        let errors: Vec<f64> = panels.iter().map(|p| p.3).collect();
        let value = pairwise_sum(&values);
        let error = pairwise_sum(&errors);
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Adaptive { value, error });
        }
        if panels.len() >= max_panels {
            return Err(Error::QuadratureNonConvergent(format!(
                "adaptive Gauss-Kronrod stalled at error {error:.3e} (value {value:.6e}) after {max_panels} panels"
            )));
        }
        let (worst, _) =
            panels.iter().enumerate().fold(
                (0, -1.0),
                |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc },
            );
        let (a, b, _, _) = panels[worst];
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            return Err(Error::QuadratureNonConvergent(format!(
                "panel [{a}, {b}] cannot be bisected further"
            )));
        }
        let (v1, e1) = gk15(a, m, &mut f);
        let (v2, e2) = gk15(m, b, &mut f);
        panels[worst] = (a, m, v1, e1);
        panels.insert(worst + 1, (m, b, v2, e2));
    }
}

/// `Γ(k/2)` for positive integers `k`, exact recursion from `Γ(1/2)` and `Γ(1)`.
pub fn gamma_half_integer(k: usize) -> f64 {
    assert!(k >= 1);
    let mut g = if k % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if k % 2 == 0 { 1.0 } else { 0.5 };
    let target = k as f64 / 2.0;
    while x < target - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface measure of the unit sphere `S^{d}` in `R^{d+1}`.
pub fn sphere_measure(d: usize) -> f64 {
    2.0 * PI.powf((d as f64 + 1.0) / 2.0) / gamma_half_integer(d + 1)
}

/// Volume of the unit ball in `R^n`.
pub fn ball_volume(n: usize) -> f64 {
    sphere_measure(n - 1) / n as f64
}
