//! Small least-squares and extrapolation helpers shared by the tail fits and
//! the verification harness.

/// Result of fitting `y ≈ c1 x^{-e} + c2 x^{-e2}` with `e2` fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub exponent: f64,
    pub c1: f64,
    pub c2: f64,
    pub sub_exponent: f64,
    /// Max relative deviation of the model from the data.
    pub residual: f64,
}

impl PowerFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.c1 * x.powf(-self.exponent) + self.c2 * x.powf(-self.sub_exponent)
    }
}

/// Least squares of `y ≈ c1 x^{-e1} + c2 x^{-e2}` in relative error; returns
/// `(c1, c2, sum of squared relative residuals)`.
pub fn two_term_ls(xs: &[f64], ys: &[f64], e1: f64, e2: f64) -> (f64, f64, f64) {
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let f1 = x.powf(-e1) / y;
        let f2 = x.powf(-e2) / y;
        s11 += f1 * f1;
        s12 += f1 * f2;
        s22 += f2 * f2;
        t1 += f1;
        t2 += f2;
    }
    let det = s11 * s22 - s12 * s12;
    let (c1, c2) = if det.abs() > 1e-14 * s11 * s22 {
        ((t1 * s22 - t2 * s12) / det, (s11 * t2 - s12 * t1) / det)
    } else {
        (t1 / s11, 0.0)
    };
    let mut sse = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let rel = (c1 * x.powf(-e1) + c2 * x.powf(-e2)) / y - 1.0;
        sse += rel * rel;
    }
    (c1, c2, sse)
}

/// Minimizes `f` on `[a, b]` by golden-section search.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..300 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Fits the leading exponent of a two-term power law, searching
/// `[0.7·guess, 1.3·guess]` (capped below the subleading exponent).
pub fn fit_two_term_power(xs: &[f64], ys: &[f64], guess: f64, sub: f64) -> PowerFit {
    let lo = 0.7 * guess;
    let mut hi = 1.3 * guess;
    if sub > guess {
        hi = hi.min(sub - 1e-3 * (sub - guess).max(1e-3));
    }
    let e = golden_section(
        |e| two_term_ls(xs, ys, e, sub).2,
        lo,
        hi,
        1e-13 * guess.abs().max(1.0),
    );
    let (c1, c2, _) = two_term_ls(xs, ys, e, sub);
    let mut residual = 0.0f64;
    for (&x, &y) in xs.iter().zip(ys) {
        residual = residual.max(((c1 * x.powf(-e) + c2 * x.powf(-sub)) / y - 1.0).abs());
    }
    PowerFit {
        exponent: e,
        c1,
        c2,
        sub_exponent: sub,
        residual,
    }
}

/// Basis function `x^{-exponent}`, times `ln x` when `log` is set.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Term {
    pub exponent: f64,
    pub log: bool,
}

impl Term {
    pub fn power(exponent: f64) -> Self {
        Self {
            exponent,
            log: false,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let v = x.powf(-self.exponent);
        if self.log {
            v * x.ln()
        } else {
            v
        }
    }
}

/// Fit of `y ≈ Σ_k c_k x^{-e_k}` with `e_0` free and the rest fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeriesFit {
    pub terms: Vec<Term>,
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

impl PowerSeriesFit {
    pub fn exponent(&self) -> f64 {
        self.terms[0].exponent
    }
}

/// Linear least squares for the coefficients of fixed basis terms, in
/// relative error; returns the coefficients and the sum of squared residuals.
pub fn power_series_ls(xs: &[f64], ys: &[f64], terms: &[Term]) -> (Vec<f64>, f64) {
    let m = terms.len();
    let mut ata = vec![vec![0.0; m]; m];
    let mut atb = vec![0.0; m];
    let rows: Vec<Vec<f64>> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| terms.iter().map(|t| t.eval(x) / y).collect())
        .collect();
    for row in &rows {
        for i in 0..m {
            atb[i] += row[i];
            for j in 0..m {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let coef = solve_dense(ata, atb);
    let mut sse = 0.0;
    for row in &rows {
        let r: f64 = row.iter().zip(&coef).map(|(a, c)| a * c).sum::<f64>() - 1.0;
        sse += r * r;
    }
    (coef, sse)
}

/// Ordinary least squares `y ≈ Σ_k c_k row_k`; returns `c` and the sum of
/// squared residuals.
pub fn least_squares(rows: &[Vec<f64>], ys: &[f64]) -> (Vec<f64>, f64) {
    let m = rows.first().map_or(0, Vec::len);
    let mut ata = vec![vec![0.0; m]; m];
    let mut atb = vec![0.0; m];
    for (row, &y) in rows.iter().zip(ys) {
        for i in 0..m {
            atb[i] += row[i] * y;
            for j in 0..m {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let coef = solve_dense(ata, atb);
    let sse = rows
        .iter()
        .zip(ys)
        .map(|(row, y)| {
            let r = row.iter().zip(&coef).map(|(a, c)| a * c).sum::<f64>() - y;
            r * r
        })
        .sum();
    (coef, sse)
}

/// Gaussian elimination with partial pivoting on a small system, with
/// diagonal scaling for the badly scaled normal equations of power laws.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let m = b.len();
    let scale: Vec<f64> = (0..m).map(|i| a[i][i].abs().sqrt().max(1e-300)).collect();
    for i in 0..m {
        for j in 0..m {
            a[i][j] /= scale[i] * scale[j];
        }
        b[i] /= scale[i];
    }
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        if d.abs() < 1e-300 {
            continue;
        }
        for row in col + 1..m {
            let f = a[row][col] / d;
            for k in col..m {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let s: f64 = (i + 1..m).map(|k| a[i][k] * x[k]).sum();
        x[i] = if a[i][i].abs() < 1e-300 {
            0.0
        } else {
            (b[i] - s) / a[i][i]
        };
    }
    x.iter().zip(&scale).map(|(v, s)| v / s).collect()
}

/// Fits the free leading exponent near `guess` with fixed subleading terms,
/// searching `[0.7·guess, 1.3·guess]` below the smallest subleading exponent.
pub fn fit_power_series(xs: &[f64], ys: &[f64], guess: f64, subs: &[Term]) -> PowerSeriesFit {
    let lo = 0.7 * guess;
    let mut hi = 1.3 * guess;
    if let Some(first) = subs.iter().map(|t| t.exponent).reduce(f64::min) {
        if first > guess {
            hi = hi.min(first - 1e-3 * (first - guess).max(1e-3));
        }
    }
    let terms_for = |e: f64| {
        let mut v = vec![Term::power(e)];
        v.extend_from_slice(subs);
        v
    };
    let e = golden_section(
        |e| power_series_ls(xs, ys, &terms_for(e)).1,
        lo,
        hi,
        1e-13 * guess.abs().max(1.0),
    );
    let terms = terms_for(e);
    let (coefficients, _) = power_series_ls(xs, ys, &terms);
    let mut residual = 0.0f64;
    for (&x, &y) in xs.iter().zip(ys) {
        let model: f64 = terms
            .iter()
            .zip(&coefficients)
            .map(|(t, c)| c * t.eval(x))
            .sum();
        residual = residual.max((model / y - 1.0).abs());
    }
    PowerSeriesFit {
        terms,
        coefficients,
        residual,
    }
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub slope_se: f64,
}

pub fn line_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let resid: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let d = y - my - slope * (x - mx);
            d * d
        })
        .sum();
    let slope_se = if m > 2.0 {
        (resid / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    LineFit {
        intercept: my - slope * mx,
        slope,
        slope_se,
    }
}

/// Slope of `ln|y|` against `ln x`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    line_fit(&lx, &ly)
}

/// First-order Richardson extrapolation for a sequence halving `h`:
/// `2 s(h) - s(2h)`.
pub fn richardson(s_h: f64, s_2h: f64) -> f64 {
    2.0 * s_h - s_2h
}
