//! Adaptive Simpson quadrature, used for domes without a closed-form
//! integral and as an independent check in tests.

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
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
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// `∫_a^b f` to roughly absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_and_singular_derivatives() {
        assert!(
            (adaptive_simpson(&|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12) - 2.0).abs() < 1e-11
        );
        let semi = adaptive_simpson(&|x: f64| (x * (1.0 - x)).max(0.0).sqrt(), 0.0, 1.0, 1e-12);
        assert!((semi - std::f64::consts::PI / 8.0).abs() < 1e-9);
    }
}
