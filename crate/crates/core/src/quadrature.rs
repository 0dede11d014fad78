//! Scalar quadrature and the smooth bumps shared by several modules.

/// Adaptive Simpson with Richardson correction; `tol` is an absolute target.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Unnormalized C-infinity bump `exp(1/(s^2 - 1))` on `(-1, 1)`.
pub fn smooth_bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 / (s * s - 1.0)).exp()
    }
}

/// Normalized mollifier kernel on `(-1, 1)` and its cumulative integral.
#[derive(Clone, Debug)]
pub struct Mollifier {
    norm: f64,
}

impl Default for Mollifier {
    fn default() -> Self {
        let norm = adaptive_simpson(&smooth_bump, -1.0, 1.0, 1e-15);
        Self { norm }
    }
}

impl Mollifier {
    pub fn density(&self, s: f64) -> f64 {
        smooth_bump(s) / self.norm
    }

    /// `int_{-1}^{s} density`, clamped to `[0, 1]`.
    pub fn cdf(&self, s: f64) -> f64 {
        if s <= -1.0 {
            0.0
        } else if s >= 1.0 {
            1.0
        } else if s <= 0.0 {
            adaptive_simpson(&smooth_bump, -1.0, s, 1e-15) / self.norm
        } else {
            1.0 - adaptive_simpson(&smooth_bump, s, 1.0, 1e-15) / self.norm
        }
    }
}

/// C2 polynomial bump `(1 - s^2)^3` on `(-1, 1)`, with first derivative.
pub fn poly_bump(s: f64) -> (f64, f64) {
    if s.abs() >= 1.0 {
        (0.0, 0.0)
    } else {
        let r = 1.0 - s * s;
        (r * r * r, -6.0 * s * r * r)
    }
}

/// Time window `16 s^2 (1 - s)^2` on `[0, 1]`: peak 1, vanishing to second order at both ends.
pub fn time_window(s: f64) -> f64 {
    if !(0.0..=1.0).contains(&s) {
        0.0
    } else {
        16.0 * s * s * (1.0 - s) * (1.0 - s)
    }
}

/// Trapezoid rule on a possibly non-uniform abscissa.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1])).sum()
}

/// Running trapezoid integral, starting at zero.
pub fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for i in 0..x.len() {
        if i > 0 {
            acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
        }
        out.push(acc);
    }
    out
}
