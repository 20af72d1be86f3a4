//! Small numeric helpers shared across modules.

use crate::{Error, Result};

/// Adaptive Simpson quadrature on [a, b] to the given absolute tolerance.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }

    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let err = left + right - whole;
        // the halved tolerance cannot chase the residual below rounding
        // noise, so accept once the residual reaches that scale
        let floor = f64::EPSILON * (1.0 + left.abs() + right.abs());
        if err.abs() <= (15.0 * tol).max(floor) {
            return Ok(left + right + err / 15.0);
        }
        if depth == 0 {
            return Err(Error::QuadratureUnconverged(format!(
                "adaptive Simpson recursion exhausted on [{a}, {b}], residual {err:e}"
            )));
        }
        let half_tol = 0.5 * tol;
        Ok(recurse(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?
            + recurse(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?)
    }

    if !(a < b) {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// by Newton iteration on the Legendre recurrence. Panics for n < 2.
/// Quadrature oracle for tests; production code integrates adaptively.
#[cfg(test)]
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2, "Gauss-Legendre rule needs at least two points");
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x =
            (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..64 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

// P_n(x) and its derivative via the three-term recurrence
#[cfg(test)]
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = x;
    for k in 2..=n {
        let k = k as f64;
        let next = ((2.0 * k - 1.0) * x * cur - (k - 1.0) * prev) / k;
        prev = cur;
        cur = next;
    }
    let dp = n as f64 * (x * cur - prev) / (x * x - 1.0);
    (cur, dp)
}

/// Composite Gauss-Legendre integration of f over [a, b] with panels at
/// most max_width wide. Spectrally accurate on integrands smooth within
/// each panel; the caller aligns panel edges with any kinks.
/// Quadrature oracle for tests; production code integrates adaptively.
#[cfg(test)]
pub(crate) fn panel_gauss_legendre<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    max_width: f64,
    rule: &[(f64, f64)],
) -> f64 {
    if !(a < b) {
        return 0.0;
    }
    let panels = ((b - a) / max_width).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let center = a + h * (i as f64 + 0.5);
        let radius = 0.5 * h;
        let panel: f64 = rule
            .iter()
            .map(|&(x, w)| w * f(center + radius * x))
            .sum();
        total += panel * radius;
    }
    total
}
