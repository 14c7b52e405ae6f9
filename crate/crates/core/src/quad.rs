//! Adaptive Simpson quadrature.
//!
//! Used by the verification harness for the integrals that have no closed
//! form by construction, e.g. `integral |c - c_delta|` in the mollifier
//! bounds and the brute-force drift growth probe. Closed-form operations in
//! the library never go through this module.

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` by adaptive
/// Simpson with Richardson correction. Integrands with isolated kinks
/// (absolute values at sign changes) are handled by the recursion; callers
/// should still split at known jump points of `f`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    assert!(a.is_finite() && b.is_finite() && b >= a, "bad interval");
    assert!(tol > 0.0, "tolerance must be positive");
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 60)
}

/// Integrates with explicit interior split points (known kinks or jumps of
/// the integrand) before adapting on each smooth-ish piece.
pub fn adaptive_simpson_split(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    splits: &[f64],
    tol: f64,
) -> f64 {
    let mut points: Vec<f64> = splits
        .iter()
        .copied()
        .filter(|&s| s > a && s < b)
        .collect();
    points.push(a);
    points.push(b);
    points.sort_by(|x, y| x.partial_cmp(y).unwrap());
    points.dedup();
    let pieces = (points.len() - 1).max(1) as f64;
    points
        .windows(2)
        .map(|pair| adaptive_simpson(f, pair[0], pair[1], tol / pieces))
        .sum()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
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
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let refined = left + right;
    if depth == 0 || (refined - whole).abs() <= 15.0 * tol {
        return refined + (refined - whole) / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
