//! Shared test oracles, independent of the library's evaluation paths.

/// Adaptive Simpson quadrature with absolute tolerance.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Quadrature oracle for u: ∫_{r_trap}^{r} (s²+M²)² w(s)/(s−M)² ds, split
/// at the branch point r_* where the integrand has a kink.
pub fn u_by_quadrature(mass: f64, r: f64, tol: f64) -> f64 {
    let rt = (1.0 + 2.0_f64.sqrt()) * mass;
    let rs = (2.0 + 3.0_f64.sqrt()) * mass;
    let w = |s: f64| {
        if s <= rs {
            1.0 / (4.0 * mass)
        } else {
            let d = s * s + mass * mass;
            2.0 * s * (s - mass) * (s - mass) / (d * d)
        }
    };
    let integrand = move |s: f64| {
        let d = s * s + mass * mass;
        d * d * w(s) / ((s - mass) * (s - mass))
    };
    if r <= rs {
        adaptive_simpson(&integrand, rt, r, tol)
    } else {
        adaptive_simpson(&integrand, rt, rs, tol) + adaptive_simpson(&integrand, rs, r, tol)
    }
}
