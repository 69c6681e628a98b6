//! Adaptive quadrature for the piecewise-smooth integrands that show up in
//! the transition kernels (exponential tails, kinks along |x - y| folds).

/// Adaptive Simpson integration of `f` on `[a, b]`.
///
/// `tol` is an absolute error target; recursion stops once the usual
/// Richardson estimate falls below it (or at a depth cap, which for the
/// integrands here is never the binding constraint).
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
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
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrates over `[a, b]` split at the interior points of `splits`.
///
/// Use the split points to isolate kinks (absolute-value folds) so each
/// panel sees a smooth integrand. Split points outside `(a, b)` are ignored;
/// they need not be sorted.
pub fn integrate_with_splits(f: &dyn Fn(f64) -> f64, a: f64, b: f64, splits: &[f64], tol: f64) -> f64 {
    let mut pts: Vec<f64> = splits.iter().copied().filter(|s| *s > a && *s < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).expect("finite split points"));
    pts.dedup();
    let panel_tol = tol / pts.len() as f64;
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += adaptive_simpson(f, w[0], w[1], panel_tol);
    }
    total
}

/// Integrates `f` over `[a, +inf)` assuming an exponentially decaying tail.
///
/// `span` controls the truncation point `a + span`; with unit-rate decay the
/// truncated mass is about `e^(-span)`, so the default callers pass spans of
/// 50-80 to stay far below quadrature tolerance. Extra split points isolate
/// kinks in the finite part.
pub fn integrate_half_line(f: &dyn Fn(f64) -> f64, a: f64, splits: &[f64], span: f64, tol: f64) -> f64 {
    // Graded panels: fine near a, coarse in the deep tail.
    let mut pts = vec![a, a + 1.0, a + 3.0, a + 8.0, a + 20.0, a + span];
    pts.extend_from_slice(splits);
    integrate_with_splits(f, a, a + span, &pts, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_exact() {
        let f = |x: f64| 3.0 * x * x;
        assert_abs_diff_eq!(adaptive_simpson(&f, 0.0, 2.0, 1e-12), 8.0, epsilon = 1e-10);
    }

    #[test]
    fn kinked_integrand_with_split() {
        let f = |x: f64| (x - 1.0).abs();
        // Integral over [0, 3] equals 0.5 + 2.
        let v = integrate_with_splits(&f, 0.0, 3.0, &[1.0], 1e-12);
        assert_abs_diff_eq!(v, 2.5, epsilon = 1e-10);
    }

    #[test]
    fn exponential_tail() {
        let f = |x: f64| (-x).exp();
        let v = integrate_half_line(&f, 0.0, &[], 60.0, 1e-10);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn oscillatory_smooth() {
        let f = |x: f64| x.sin();
        let v = adaptive_simpson(&f, 0.0, core::f64::consts::PI, 1e-12);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn empty_interval_is_zero() {
        let f = |_: f64| 42.0;
        assert_eq!(adaptive_simpson(&f, 1.0, 1.0, 1e-9), 0.0);
    }
}
