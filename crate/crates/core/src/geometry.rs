//! Extremal Kerr background in Boyer-Lindquist coordinates.
//!
//! Spin is hard-wired to a = M: Δ = (r−M)² has a double root at the
//! horizon and every formula below is the |a| = M specialization.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Black-hole parameters. Extremality means the spin never appears as a
/// separate field: a = M everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub mass: f64,
}

impl Params {
    pub fn new(mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Config(format!("mass must be positive, got {mass}")));
        }
        Ok(Self { mass })
    }

    /// Unique root of the trapping cubic in the exterior: r_trap = (1+√2) M.
    pub fn r_trap(&self) -> f64 {
        (1.0 + 2.0_f64.sqrt()) * self.mass
    }

    /// r_* = (2+√3) M, the maximum of 2r(r−M)²/(r²+M²)² and the branch
    /// point of the piecewise multiplier functions.
    pub fn r_star_pt(&self) -> f64 {
        (2.0 + 3.0_f64.sqrt()) * self.mass
    }
}

/// A point of the exterior in (r, θ); t and φ never enter radial formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub r: f64,
    pub theta: f64,
}

impl Point {
    pub fn new(r: f64, theta: f64) -> Self {
        debug_assert!(r > 0.0);
        debug_assert!((0.0..=std::f64::consts::PI).contains(&theta));
        Self { r, theta }
    }
}

/// Δ = (r−M)².
pub fn delta(p: &Params, r: f64) -> f64 {
    let s = r - p.mass;
    s * s
}

/// |q|² = r² + M² cos²θ. Lies in [r², r² + M²] for every θ.
pub fn q2(p: &Params, pt: &Point) -> f64 {
    let c = pt.theta.cos();
    pt.r * pt.r + p.mass * p.mass * c * c
}

/// Trapping cubic 𝒯 = r³ − 3Mr² + M²r + M³ = (r−M)(r² − 2Mr − M²).
///
/// Negative on (M, r_trap), positive on (r_trap, ∞); evaluated in the
/// factored form so the sign structure is exact.
pub fn trapping_poly(p: &Params, r: f64) -> f64 {
    let m = p.mass;
    (r - m) * (r * r - 2.0 * m * r - m * m)
}

/// Tortoise coordinate with the integration constant fixed so that
/// r* = (r−M) + 2M ln((r−M)/M) − 2M²/(r−M) exactly.
pub fn tortoise(p: &Params, r: f64) -> Result<f64> {
    let m = p.mass;
    if r <= m {
        return Err(Error::Domain {
            op: "tortoise",
            msg: format!("r = {r} must exceed M = {m}"),
        });
    }
    let s = r - m;
    Ok(s + 2.0 * m * (s / m).ln() - 2.0 * m * m / s)
}

/// dr*/dr = (r² + M²)/Δ.
pub fn tortoise_deriv(p: &Params, r: f64) -> f64 {
    let m = p.mass;
    (r * r + m * m) / delta(p, r)
}

/// Invert the tortoise map by safeguarded Newton iteration with bracketing.
///
/// Terminates when |tortoise(r) − rs| ≤ 1e−12 · max(1, |rs|).
pub fn invert_tortoise(p: &Params, rs: f64) -> Result<f64> {
    let m = p.mass;
    let tol = 1e-12 * rs.abs().max(1.0);

    // Bracket: tortoise is strictly increasing, -inf at the horizon.
    let mut lo = m * (1.0 + 1e-14);
    let mut hi = m * 2.0 + rs.abs() + 10.0 * m;
    while tortoise(p, lo)? > rs {
        lo = m + (lo - m) / 16.0;
        if lo - m < 1e-300 {
            return Err(Error::NoConvergence {
                op: "invert_tortoise",
                iterations: 0,
                residual: f64::INFINITY,
            });
        }
    }
    debug_assert!(tortoise(p, hi)? > rs);

    // Initial guess from the asymptotics: rs ~ r for large rs,
    // rs ~ -2M^2/(r-M) near the horizon.
    let mut r = if rs > 4.0 * m {
        rs
    } else {
        m + 2.0 * m * m / (2.0 * m + rs.abs())
    };
    r = r.clamp(lo, hi);

    let max_iter = 200;
    for it in 0..max_iter {
        let f = tortoise(p, r)? - rs;
        if f.abs() <= tol {
            return Ok(r);
        }
        if f > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        let step = f / tortoise_deriv(p, r);
        let mut next = r - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == r {
            next = 0.5 * (lo + hi);
        }
        let _ = it;
        r = next;
    }
    Err(Error::NoConvergence {
        op: "invert_tortoise",
        iterations: max_iter,
        residual: (tortoise(p, r)? - rs).abs(),
    })
}

/// g(T̂, T̂) = −Δ |q|² / (r² + M²)², the norm of the Hawking vectorfield.
/// Nonpositive on the exterior, zero exactly on the horizon.
pub fn g_hat_t_hat_t(p: &Params, pt: &Point) -> f64 {
    let m = p.mass;
    let r2m2 = pt.r * pt.r + m * m;
    -delta(p, pt.r) * q2(p, pt) / (r2m2 * r2m2)
}
