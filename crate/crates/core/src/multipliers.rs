//! Radial multiplier functions and divergence coefficients for the
//! Morawetz current on extremal Kerr.
//!
//! The current is built from X = z u ∂_r, the scalar w = z ∂_r u and the
//! one-form J = v ∂_r, with
//!
//!   z   = (r−M)²/(r²+M²)²,
//!   w   = 1/(4M) for r ≤ r_*,  2r(r−M)²/(r²+M²)² for r > r_*,
//!   u   = ∫_{r_trap}^r (s²+M²)² w(s)/(s−M)² ds   (closed form below),
//!   v   = c₁ y on [r_e, r_*],  y = −2/(r(r+M)(r−M)),
//!   w_T = −(r−M)²(r−r_trap)²/r⁷   (trapped control of ∂_t).
//!
//! The divergence of the current then carries the coefficients
//!
//!   𝒜      = (r−M)⁴/(r²+M²) · ∂_r(u/(r²+M²))     on |∂_r ψ|²,
//!   u𝒯/(r²+M²)³                                   on the angular block,
//!   𝒱      = −¼ ∂_r(Δ ∂_r w)                      on |ψ|²,
//!
//! plus the J-term and, for the trapped control, −¼ ∂_r(Δ ∂_r w_T) whose
//! numerator is a quartic with four real roots x₁ < x₂ < x₃ < x₄.

use crate::error::{Error, Result};
use crate::geometry::{delta, Params};
use serde::Serialize;

/// Number of grid points used for the c₁ minimization and the δ_T search.
const C1_GRID: usize = 10_000;
const DELTA_GRID: usize = 200_000;
const KAPPA0_GRID: usize = 200_000;
const DELTA_RMAX_OVER_M: f64 = 1e4;

// ---------------------------------------------------------------------------
// free functions of Params only

/// z = (r−M)²/(r²+M²)².
pub fn eval_z(p: &Params, r: f64) -> f64 {
    let m = p.mass;
    let d = r * r + m * m;
    delta(p, r) / (d * d)
}

/// The positive piecewise multiplier profile; constant 1/(4M) up to r_*,
/// then 2r(r−M)²/(r²+M²)². C¹ at r_* with value 1/(4M) from both sides.
pub fn eval_w(p: &Params, r: f64) -> f64 {
    let m = p.mass;
    if r <= p.r_star_pt() {
        1.0 / (4.0 * m)
    } else {
        let d = r * r + m * m;
        2.0 * r * delta(p, r) / (d * d)
    }
}

/// dw/dr; zero up to r_*, then 2(r−M)(−r³+3Mr²+3M²r−M³)/(r²+M²)³.
/// Both one-sided derivatives vanish at r_*.
pub fn eval_w_prime(p: &Params, r: f64) -> f64 {
    let m = p.mass;
    if r <= p.r_star_pt() {
        0.0
    } else {
        let d = r * r + m * m;
        2.0 * (r - m) * (-r * r * r + 3.0 * m * r * r + 3.0 * m * m * r - m * m * m)
            / (d * d * d)
    }
}

/// 𝒱 = −¼ ∂_r(Δ ∂_r w): zero up to r_*, then
/// 3M(r−M)²(r⁴−6M²r²+M⁴)/(r²+M²)⁴, which is positive since r_* > (1+√2)M.
pub fn eval_v_coeff(p: &Params, r: f64) -> f64 {
    let m = p.mass;
    if r <= p.r_star_pt() {
        0.0
    } else {
        let m2 = m * m;
        let r2 = r * r;
        let d = r2 + m2;
        3.0 * m * delta(p, r) * (r2 * r2 - 6.0 * m2 * r2 + m2 * m2) / (d * d * d * d)
    }
}

/// w_T = −(r−M)²(r−r_trap)²/r⁷, the trapped-control profile; nonpositive
/// with double zeros at the horizon and at r_trap.
pub fn eval_w_t(p: &Params, r: f64) -> f64 {
    let s = r - p.mass;
    let q = r - p.r_trap();
    -(s * s) * (q * q) / r.powi(7)
}

/// dw_T/dr.
pub fn eval_w_t_prime(p: &Params, r: f64) -> f64 {
    let s = r - p.mass;
    let q = r - p.r_trap();
    let r7 = r.powi(7);
    -(2.0 * s * q * q + 2.0 * s * s * q) / r7 + 7.0 * s * s * q * q / (r7 * r)
}

/// The Hardy profile y₀ = −4/(r(r+M)(r−M)), the exact negative solution of
/// y' + (2/r) y − ((r²+M²)/4) y² = 0.
pub fn hardy_y0(p: &Params, r: f64) -> f64 {
    let m = p.mass;
    -4.0 / (r * (r + m) * (r - m))
}

pub fn hardy_y0_prime(p: &Params, r: f64) -> f64 {
    let m = p.mass;
    let f = r * (r + m) * (r - m);
    4.0 * (3.0 * r * r - m * m) / (f * f)
}

/// Theorem weights for the (∂_r, ∂_t, angular, ψ) channels:
/// (1/r³)(1−M/r)², (1/r³)(1−r_trap/r)², (1/r)(1−r_trap/r)², (1/r⁴)(1−M/r)².
pub fn theorem_coeffs(p: &Params, r: f64) -> [f64; 4] {
    let m = p.mass;
    let rt = p.r_trap();
    let a = (1.0 - m / r) * (1.0 - m / r);
    let b = (1.0 - rt / r) * (1.0 - rt / r);
    let r3 = r * r * r;
    [a / r3, b / r3, b / r, a / (r3 * r)]
}

// ---------------------------------------------------------------------------
// quartic roots of the trapped-control coefficient

/// Roots of 3x⁴ − 3(9+4√2)x³ + (93+68√2)x² − 7(21+16√2)x + 56√2 + 84 = 0,
/// ascending. These are the zeros (in r/M) of −¼∂_r(Δ∂_r w_T) away from
/// the horizon double zero.
pub fn quartic_roots() -> Result<[f64; 4]> {
    let s2 = 2.0_f64.sqrt();
    let c = [
        3.0,
        -3.0 * (9.0 + 4.0 * s2),
        93.0 + 68.0 * s2,
        -7.0 * (21.0 + 16.0 * s2),
        56.0 * s2 + 84.0,
    ];
    let poly = |x: f64| (((c[0] * x + c[1]) * x + c[2]) * x + c[3]) * x + c[4];
    let dpoly = |x: f64| ((4.0 * c[0] * x + 3.0 * c[1]) * x + 2.0 * c[2]) * x + c[3];

    // Sign-change scan on [1, 12], then bisection-safeguarded Newton.
    let mut roots = Vec::with_capacity(4);
    let n = 11_000;
    let (a, b) = (1.0, 12.0);
    let mut x_prev = a;
    let mut f_prev = poly(a);
    for k in 1..=n {
        let x = a + (b - a) * k as f64 / n as f64;
        let f = poly(x);
        if f_prev == 0.0 {
            roots.push(x_prev);
        } else if f_prev * f < 0.0 {
            let (mut lo, mut hi) = (x_prev, x);
            let mut xr = 0.5 * (lo + hi);
            for _ in 0..100 {
                let fr = poly(xr);
                if fr == 0.0 {
                    break;
                }
                if poly(lo) * fr < 0.0 {
                    hi = xr;
                } else {
                    lo = xr;
                }
                let step = fr / dpoly(xr);
                let mut next = xr - step;
                if !(next > lo && next < hi) {
                    next = 0.5 * (lo + hi);
                }
                if (next - xr).abs() <= 1e-13 * xr.abs() {
                    xr = next;
                    break;
                }
                xr = next;
            }
            roots.push(xr);
        }
        x_prev = x;
        f_prev = f;
    }
    if roots.len() != 4 {
        return Err(Error::NoConvergence {
            op: "quartic_roots",
            iterations: n,
            residual: roots.len() as f64,
        });
    }
    let out = [roots[0], roots[1], roots[2], roots[3]];
    for &x in &out {
        if !(x > 1.0) {
            return Err(Error::Domain {
                op: "quartic_roots",
                msg: format!("root {x} not greater than 1; transcription error"),
            });
        }
    }
    // Vieta guards against a transcription slip in the coefficients.
    let sum: f64 = out.iter().sum();
    let prod: f64 = out.iter().product();
    if (sum - (9.0 + 4.0 * s2)).abs() > 1e-10 || (prod - (84.0 + 56.0 * s2) / 3.0).abs() > 1e-9 {
        return Err(Error::Domain {
            op: "quartic_roots",
            msg: format!("Vieta check failed: sum={sum}, prod={prod}"),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// the assembled multiplier set

/// Description of how v is extended outside the Hardy interval [r_e, r_*]:
/// identically zero below r_e, and multiplied by a C¹ smoothstep cutoff that
/// reaches zero at `outer_cutoff` (= 2 r_*).
#[derive(Debug, Clone, Serialize)]
pub struct Taper {
    pub inner: &'static str,
    pub outer_cutoff: f64,
}

/// All multiplier functions and derived constants for one background.
/// Construction is a one-time pure computation; the set is immutable.
#[derive(Debug, Clone, Serialize)]
pub struct MultiplierSet {
    pub params: Params,
    /// Integration constant of u on r ≤ r_* (u(r_trap) = 0).
    pub c_1: f64,
    /// Integration constant of u on r ≥ r_* (continuity at r_*).
    pub c_2: f64,
    /// Closed-form lower-bound constant c₀ = 2(2+√3)(1+√2−√3).
    pub c0: f64,
    /// Sharp constant Ã(r_*) = M² − C₂ of the 𝒜 lower bound.
    pub a_tilde_star: f64,
    /// Lower end of the Hardy interval.
    pub r_e: f64,
    /// c₁ = min 𝒜 on [r_e, r_*].
    pub c1: f64,
    /// Roots of the trapped-control quartic, in units of M.
    pub quartic_roots: [f64; 4],
    /// Largest dyadic δ satisfying the display inequality
    /// (1/r²)1_{r>r_e} − ¼ δ |q|²□w_T ≥ (1/r²)(1−M/r)² on a dense grid.
    pub delta_display: f64,
    /// Measured constant κ₀ with Hardy-yield + 𝒱 ≥ κ₀/r² on (r_e, ∞).
    pub kappa0: f64,
    /// δ_T used in the combined current: κ₀ · delta_display.
    pub delta_t: f64,
    /// Square-completion split: (1−η)𝒜 stays on the ∂_r channel, η𝒜 backs
    /// the Hardy completion.
    pub eta: f64,
    pub taper: Taper,
}

/// One row of the coefficient dump.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoefficientSample {
    pub r: f64,
    pub z: f64,
    pub u: f64,
    pub w: f64,
    pub v: f64,
    pub w_t: f64,
    pub a: f64,
    pub v_coeff: f64,
    pub box_w_t: f64,
    pub theorem: [f64; 4],
}

impl MultiplierSet {
    /// Build the full set for mass M, Hardy radius r_e and split η.
    pub fn build(params: Params, r_e: f64, eta: f64) -> Result<Self> {
        let m = params.mass;
        let rs = params.r_star_pt();
        if !(r_e > m && r_e < rs) {
            return Err(Error::Config(format!(
                "r_e = {r_e} must lie in (M, r_*) = ({m}, {rs})"
            )));
        }
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::Config(format!("eta = {eta} must lie in (0,1)")));
        }
        let s3 = 3.0_f64.sqrt();
        let s2 = 2.0_f64.sqrt();
        let c0 = 2.0 * (2.0 + s3) * (1.0 + s2 - s3);
        let rt = params.r_trap();

        let u_left_raw = |r: f64| {
            -m * m * m / (r - m)
                + 5.0 * m * r / 4.0
                + r * r / 4.0
                + r * r * r / (12.0 * m)
                + 2.0 * m * m * ((r - m) / m).ln()
        };
        let c_1 = -u_left_raw(rt);
        let u_star = u_left_raw(rs) + c_1;
        let c_2 = u_star - rs * rs;
        let a_tilde_star = m * m - c_2;

        let roots = quartic_roots()?;

        let mut set = Self {
            params,
            c_1,
            c_2,
            c0,
            a_tilde_star,
            r_e,
            c1: 0.0,
            quartic_roots: roots,
            delta_display: 0.0,
            kappa0: 0.0,
            delta_t: 0.0,
            eta,
            taper: Taper {
                inner: "zero",
                outer_cutoff: 2.0 * rs,
            },
        };

        set.c1 = set.c1_of(r_e)?;
        set.delta_display = set.find_delta_t()?;
        set.kappa0 = set.measure_kappa0();
        if !(set.kappa0 > 0.0) {
            return Err(Error::Domain {
                op: "MultiplierSet::build",
                msg: format!("measured kappa0 = {} is not positive", set.kappa0),
            });
        }
        set.delta_t = set.kappa0 * set.delta_display;
        Ok(set)
    }

    pub fn with_defaults(params: Params) -> Result<Self> {
        Self::build(params, 1.1 * params.mass, 0.5)
    }

    /// u in closed form: for r ≤ r_*,
    /// u = −M³/(r−M) + 5Mr/4 + r²/4 + r³/(12M) + 2M² ln((r−M)/M) + C₁,
    /// and u = r² + C₂ for r ≥ r_*. Normalized by u(r_trap) = 0.
    pub fn eval_u(&self, r: f64) -> Result<f64> {
        let m = self.params.mass;
        if r <= m {
            return Err(Error::Domain {
                op: "eval_u",
                msg: format!("r = {r} must exceed M = {m}"),
            });
        }
        let rs = self.params.r_star_pt();
        if r <= rs {
            Ok(-m * m * m / (r - m)
                + 5.0 * m * r / 4.0
                + r * r / 4.0
                + r * r * r / (12.0 * m)
                + 2.0 * m * m * ((r - m) / m).ln()
                + self.c_1)
        } else {
            Ok(r * r + self.c_2)
        }
    }

    /// du/dr = (r²+M²)² w / (r−M)², the defining relation.
    pub fn eval_u_prime(&self, r: f64) -> f64 {
        let m = self.params.mass;
        let d = r * r + m * m;
        d * d * eval_w(&self.params, r) / delta(&self.params, r)
    }

    /// 𝒜 via the specialized formula
    /// 𝒜 = (r−M)² w − 2r(r−M)⁴ u/(r²+M²)³,
    /// which is (r−M)⁴/(r²+M²)·∂_r(u/(r²+M²)) with the analytic u′ folded in.
    pub fn eval_a(&self, r: f64) -> Result<f64> {
        let m = self.params.mass;
        let u = self.eval_u(r)?;
        let d = r * r + m * m;
        let s2 = delta(&self.params, r);
        Ok(s2 * eval_w(&self.params, r) - 2.0 * r * s2 * s2 * u / (d * d * d))
    }

    /// 𝒜 via the generic current form z^{1/2} Δ^{3/2} ∂_r(z^{1/2} u Δ^{−1/2}),
    /// expanded with the product rule. Used as an independent arithmetic
    /// route to cross-check `eval_a`.
    pub fn eval_a_general_route(&self, r: f64) -> Result<f64> {
        let m = self.params.mass;
        if r <= m {
            return Err(Error::Domain {
                op: "eval_a_general_route",
                msg: format!("r = {r} must exceed M = {m}"),
            });
        }
        let u = self.eval_u(r)?;
        let up = self.eval_u_prime(r);
        let d = r * r + m * m;
        let z12 = (r - m) / d;
        let dz12 = (m * m + 2.0 * m * r - r * r) / (d * d);
        let sqrt_delta = r - m;
        // G = z^{1/2} u Δ^{-1/2}; G' by the three-factor product rule.
        let gp = dz12 * u / sqrt_delta + z12 * up / sqrt_delta
            - z12 * u / (sqrt_delta * sqrt_delta);
        Ok(z12 * sqrt_delta.powi(3) * gp)
    }

    /// Ã = (r²+M²)²/(2r) ∂_r(u/(r²+M²)), evaluated per branch:
    ///   r ≤ r_*:  (r²+M²)³/(8Mr(r−M)²) − u(r)
    ///   r > r_*:  M² − C₂ exactly (the function is constant there).
    /// Non-increasing on (M, r_*]; 𝒜 = 2r(r−M)⁴/(r²+M²)³ · Ã.
    pub fn a_tilde(&self, r: f64) -> Result<f64> {
        let m = self.params.mass;
        if r <= self.params.r_star_pt() {
            let d = r * r + m * m;
            Ok(d * d * d / (8.0 * m * r * delta(&self.params, r)) - self.eval_u(r)?)
        } else {
            Ok(self.a_tilde_star)
        }
    }

    /// −¼ ∂_r(Δ ∂_r w_T) in the factored form
    /// 3(r−M)²/(2r⁹) · Π (r − x_i M) with the precomputed quartic roots.
    pub fn eval_box_w_t(&self, r: f64) -> f64 {
        let m = self.params.mass;
        let s = r - m;
        let mut prod = 1.0;
        for &x in &self.quartic_roots {
            prod *= r - x * m;
        }
        3.0 * s * s * prod / (2.0 * r.powi(9))
    }

    /// c₁ = min 𝒜 on [r_e, r_*], by a 10⁴-point grid with one Newton
    /// refinement at the located minimum (skipped when the minimum sits on
    /// an endpoint, where 𝒜 is evaluated exactly).
    pub fn c1_of(&self, r_e: f64) -> Result<f64> {
        let m = self.params.mass;
        let rs = self.params.r_star_pt();
        if !(r_e > m && r_e < rs) {
            return Err(Error::Config(format!("c1_of: r_e = {r_e} not in (M, r_*)")));
        }
        let n = C1_GRID;
        let mut best = f64::INFINITY;
        let mut best_r = r_e;
        for k in 0..=n {
            let r = r_e + (rs - r_e) * k as f64 / n as f64;
            let a = self.eval_a(r)?;
            if a < best {
                best = a;
                best_r = r;
            }
        }
        if best_r > r_e && best_r < rs {
            // one Newton step on 𝒜' via central differences
            let h = (rs - r_e) / n as f64;
            let ap = (self.eval_a(best_r + h)? - self.eval_a(best_r - h)?) / (2.0 * h);
            let app = (self.eval_a(best_r + h)? - 2.0 * best + self.eval_a(best_r - h)?)
                / (h * h);
            if app > 0.0 {
                let refined = (best_r - ap / app).clamp(r_e, rs);
                best = best.min(self.eval_a(refined)?);
            }
        }
        if !(best > 0.0) {
            return Err(Error::Domain {
                op: "c1_of",
                msg: format!("min A = {best} on [{r_e}, {rs}] is not positive"),
            });
        }
        Ok(best)
    }

    /// Hardy function v with its derivative. Supported on [r_e, 2r_*]:
    /// the exact c₁ y on [r_e, r_*], then multiplied by a C¹ smoothstep
    /// cutoff reaching 0 at 2r_*, and identically zero below r_e.
    pub fn eval_v_with_deriv(&self, r: f64) -> (f64, f64) {
        let rs = self.params.r_star_pt();
        if r <= self.r_e || r >= self.taper.outer_cutoff {
            return (0.0, 0.0);
        }
        let y = 0.5 * hardy_y0(&self.params, r);
        let yp = 0.5 * hardy_y0_prime(&self.params, r);
        if r <= rs {
            (self.c1 * y, self.c1 * yp)
        } else {
            let tau = (r - rs) / rs;
            let rho = tau * tau * (3.0 - 2.0 * tau);
            let rho_p = 6.0 * tau * (1.0 - tau) / rs;
            (
                self.c1 * y * (1.0 - rho),
                self.c1 * (yp * (1.0 - rho) - y * rho_p),
            )
        }
    }

    pub fn eval_v(&self, r: f64) -> Result<f64> {
        if r <= self.params.mass {
            return Err(Error::Domain {
                op: "eval_v",
                msg: format!("r = {r} must exceed M"),
            });
        }
        Ok(self.eval_v_with_deriv(r).0)
    }

    /// ψ²-coefficient produced by the J-current after completing the square
    /// against η𝒜: ¼(|q|²v' + 2rv) − |q|⁴v²/(16η𝒜). Concave in |q|², so
    /// extremes in θ occur at the axis and the equator.
    pub fn hardy_yield(&self, r: f64, q2: f64) -> Result<f64> {
        let (v, vp) = self.eval_v_with_deriv(r);
        if v == 0.0 && vp == 0.0 {
            return Ok(0.0);
        }
        let a = self.eval_a(r)?;
        Ok(0.25 * (q2 * vp + 2.0 * r * v) - q2 * q2 * v * v / (16.0 * self.eta * a))
    }

    /// Largest dyadic δ_T satisfying, on a dense log grid over (M, 10⁴M],
    ///
    ///   (1/r²) 1_{r>r_e} − ¼ δ_T |q|²□w_T ≥ (1/r²)(1−M/r)²,
    ///
    /// with |q|²□w_T = ∂_r(Δ ∂_r w_T). The constraint is linear in δ_T at
    /// each grid point, so the feasible set is an interval [lo, hi]; the
    /// search walks dyadic values downward from 2⁶ and returns the first
    /// feasible one. Errors when the interval is empty (e.g. r_e ≥ x₁M).
    pub fn find_delta_t(&self) -> Result<f64> {
        let (lo, hi) = self.delta_t_window()?;
        let mut d = 64.0;
        while d > 1e-8 {
            if d >= lo && d <= hi {
                return Ok(d);
            }
            d *= 0.5;
        }
        Err(Error::DeltaInfeasible {
            min: 1e-8,
            msg: format!("window [{lo:e}, {hi:e}] contains no dyadic candidate"),
        })
    }

    /// The feasible interval for δ_T in the display inequality.
    pub fn delta_t_window(&self) -> Result<(f64, f64)> {
        let m = self.params.mass;
        let mut lo = 0.0_f64;
        let mut hi = f64::INFINITY;
        let (lg_min, lg_max) = ((1e-8_f64).ln(), DELTA_RMAX_OVER_M.ln());
        for k in 1..=DELTA_GRID {
            let r = m * (1.0 + (lg_min + (lg_max - lg_min) * k as f64 / DELTA_GRID as f64).exp());
            let b = self.eval_box_w_t(r);
            let target = (1.0 - m / r) * (1.0 - m / r) / (r * r);
            let have = if r > self.r_e { 1.0 / (r * r) } else { 0.0 };
            let need = target - have;
            if b > 0.0 {
                if need > 0.0 {
                    lo = lo.max(need / b);
                }
            } else if b < 0.0 {
                hi = hi.min(need / b);
            } else if need > 0.0 {
                return Err(Error::DeltaInfeasible {
                    min: 1e-8,
                    msg: format!("hard infeasibility at r = {r} (box w_T = 0)"),
                });
            }
        }
        if lo > hi {
            return Err(Error::DeltaInfeasible {
                min: 1e-8,
                msg: format!("empty window: lower {lo:e} exceeds upper {hi:e} (r_e = {})", self.r_e),
            });
        }
        Ok((lo, hi))
    }

    /// Measured constant κ₀ > 0 such that Hardy-yield + 𝒱 ≥ κ₀ / r² on
    /// (r_e, ∞), sampled on a dense log grid with θ at the axis and the
    /// equator (the yield is concave in |q|², so those are the extremes).
    pub fn measure_kappa0(&self) -> f64 {
        let m = self.params.mass;
        let lg_min = (self.r_e - m).ln();
        let lg_max = (DELTA_RMAX_OVER_M * m).ln();
        let mut min_val = f64::INFINITY;
        for k in 1..=KAPPA0_GRID {
            let r = m + (lg_min + (lg_max - lg_min) * k as f64 / KAPPA0_GRID as f64).exp();
            if r <= self.r_e {
                continue;
            }
            let vc = eval_v_coeff(&self.params, r);
            for q2 in [r * r, r * r + m * m] {
                let y = self.hardy_yield(r, q2).unwrap_or(f64::NEG_INFINITY);
                let val = r * r * (y + vc);
                if val < min_val {
                    min_val = val;
                }
            }
        }
        min_val
    }

    /// One coefficient-dump row at radius r (radial quantities only).
    pub fn sample(&self, r: f64) -> Result<CoefficientSample> {
        Ok(CoefficientSample {
            r,
            z: eval_z(&self.params, r),
            u: self.eval_u(r)?,
            w: eval_w(&self.params, r),
            v: self.eval_v(r)?,
            w_t: eval_w_t(&self.params, r),
            a: self.eval_a(r)?,
            v_coeff: eval_v_coeff(&self.params, r),
            box_w_t: self.eval_box_w_t(r),
            theorem: theorem_coeffs(&self.params, r),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set() -> MultiplierSet {
        MultiplierSet::with_defaults(Params::new(1.0).unwrap()).unwrap()
    }

    #[test]
    fn z_values() {
        let p = Params::new(1.0).unwrap();
        assert_eq!(eval_z(&p, 1.0), 0.0);
        assert!((eval_z(&p, 2.0) - 0.04).abs() < 1e-16);
        // z r^2 -> 1 at large r
        assert!((eval_z(&p, 1e6) * 1e12 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn w_branch_values() {
        let p = Params::new(1.0).unwrap();
        assert_eq!(eval_w(&p, 2.0), 0.25);
        assert!((eval_w(&p, 5.0) - 160.0 / 676.0).abs() < 1e-16);
        // both branches meet at r_* with value 1/(4M): (r_*−M)² = 2Mr_* and
        // r_*²+M² = 4Mr_* make the second branch collapse to 1/(4M).
        let rs = p.r_star_pt();
        let d = rs * rs + 1.0;
        let right = 2.0 * rs * (rs - 1.0) * (rs - 1.0) / (d * d);
        assert!((right - 0.25).abs() < 1e-14);
        assert_eq!(eval_w(&p, rs), 0.25);
        // C¹: both one-sided derivatives vanish at r_*
        assert_eq!(eval_w_prime(&p, rs), 0.0);
        let eps = 1e-7;
        assert!(eval_w_prime(&p, rs + eps).abs() < 1e-5);
    }

    #[test]
    fn u_normalization_and_constants() {
        let ms = set();
        let rt = ms.params.r_trap();
        assert!(ms.eval_u(rt).unwrap().abs() < 1e-12);
        // frozen against the adaptive-quadrature oracle (tests/quadrature_oracle.rs)
        assert!((ms.c_1 - (-5.633503117848437)).abs() < 1e-12);
        assert!((ms.c_2 - (-5.438782181265886)).abs() < 1e-12);
        let rs = ms.params.r_star_pt();
        assert!((ms.eval_u(rs).unwrap() - 8.489421049009623).abs() < 1e-11);
        // continuity at r_*
        let left = ms.eval_u(rs).unwrap();
        let right = rs * rs + ms.c_2;
        assert!((left - right).abs() < 1e-12);
    }

    #[test]
    fn u_monotone_and_signed() {
        let ms = set();
        let rt = ms.params.r_trap();
        let mut prev = ms.eval_u(1.0 + 1e-9).unwrap();
        let mut r = 1.0 + 1e-6;
        while r < 50.0 {
            let u = ms.eval_u(r).unwrap();
            assert!(u > prev, "u not increasing at r={r}");
            assert_eq!(u > 0.0, r > rt, "sign(u) != sign(r - r_trap) at r={r}");
            prev = u;
            r *= 1.05;
        }
    }

    #[test]
    fn u_prime_matches_closed_forms() {
        // analytic derivative of each branch vs the defining relation
        let ms = set();
        for &r in &[1.2, 2.0, 3.0, 3.9, 6.0, 50.0] {
            let h = 1e-6 * r;
            let fd = (ms.eval_u(r + h).unwrap() - ms.eval_u(r - h).unwrap()) / (2.0 * h);
            let exact = ms.eval_u_prime(r);
            assert!(
                ((fd - exact) / exact).abs() < 1e-7,
                "u' mismatch at r={r}: fd={fd} exact={exact}"
            );
        }
    }

    #[test]
    fn a_near_horizon_degeneracy() {
        // A(1+h)/h^2 -> 1/(4M)
        let ms = set();
        let mut prev_gap = f64::INFINITY;
        for &h in &[1e-2, 1e-3, 1e-4, 1e-5] {
            let val = ms.eval_a(1.0 + h).unwrap() / (h * h);
            let gap = (val - 0.25).abs();
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-4);
    }

    #[test]
    fn a_two_routes_agree() {
        let ms = set();
        for &r in &[1.5, 3.0, 10.0] {
            let a1 = ms.eval_a(r).unwrap();
            let a2 = ms.eval_a_general_route(r).unwrap();
            assert!(
                ((a1 - a2) / a1).abs() < 1e-10,
                "route mismatch at r={r}: {a1} vs {a2}"
            );
        }
    }

    #[test]
    fn a_lower_bound_at_r_star() {
        let ms = set();
        let rs = ms.params.r_star_pt();
        let d = rs * rs + 1.0;
        let bound = 2.0 * ms.c0 * rs * (rs - 1.0).powi(4) / (d * d * d);
        assert!(ms.eval_a(rs).unwrap() >= bound);
        // the sharp constant exceeds the closed-form one
        assert!(ms.a_tilde_star > ms.c0);
        assert!((ms.a_tilde_star - 6.438782181265886).abs() < 1e-12);
    }

    #[test]
    fn v_coeff_values() {
        let p = Params::new(1.0).unwrap();
        assert_eq!(eval_v_coeff(&p, 2.0), 0.0);
        assert!((eval_v_coeff(&p, 4.0) - 4347.0 / 83521.0).abs() < 1e-15);
        // V jumps at r_*: the right branch limit is positive
        let rs = p.r_star_pt();
        assert_eq!(eval_v_coeff(&p, rs), 0.0);
        assert!(eval_v_coeff(&p, rs + 1e-9) > 0.0);
    }

    #[test]
    fn w_t_values() {
        let p = Params::new(1.0).unwrap();
        assert_eq!(eval_w_t(&p, 1.0), 0.0);
        assert!(eval_w_t(&p, p.r_trap()).abs() < 1e-30);
        let rt = p.r_trap();
        let expect = -(1.0) * (2.0 - rt) * (2.0 - rt) / 128.0;
        assert!((eval_w_t(&p, 2.0) - expect).abs() < 1e-15);
        assert!(expect < 0.0 && (expect + 0.001341).abs() < 1e-5);
    }

    #[test]
    fn box_w_t_signs() {
        let ms = set();
        let [x1, _, _, x4] = ms.quartic_roots;
        assert!(ms.eval_box_w_t(0.5 * (1.0 + x1)) > 0.0);
        assert!(ms.eval_box_w_t(x4 + 1.0) > 0.0);
        assert!(ms.eval_box_w_t(1.4) < 0.0); // inside (x1, x2)
    }

    #[test]
    fn quartic_root_values() {
        let r = quartic_roots().unwrap();
        let s2 = 2.0_f64.sqrt();
        assert!((r.iter().sum::<f64>() - (9.0 + 4.0 * s2)).abs() < 1e-10);
        assert!((r.iter().product::<f64>() - (84.0 + 56.0 * s2) / 3.0).abs() < 1e-9);
        let expect = [
            1.1714703926104009,
            1.7158628092402374,
            3.133849696754226,
            8.635671350887516,
        ];
        for (a, b) in r.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn c1_monotone_in_r_e() {
        let ms = set();
        let a = ms.c1_of(1.05).unwrap();
        let b = ms.c1_of(1.1).unwrap();
        let c = ms.c1_of(1.2).unwrap();
        assert!(c >= b && b >= a);
        assert!(a > 0.0);
        // regression constant: min is attained at r_e for the default window
        assert!((b - 0.002876052319015167).abs() < 1e-12);
        // c1 dominates the closed-form lower bound on the interval
        let rs = ms.params.r_star_pt();
        let mut lower: f64 = f64::INFINITY;
        let mut r = 1.1;
        while r <= rs {
            let d = r * r + 1.0;
            lower = lower.min(2.0 * ms.c0 * r * (r - 1.0).powi(4) / (d * d * d));
            r += 1e-3;
        }
        assert!(b >= lower);
    }

    #[test]
    fn hardy_ode_exact() {
        let p = Params::new(1.0).unwrap();
        for &r in &[1.5, 2.0, 3.0] {
            let y = hardy_y0(&p, r);
            let yp = hardy_y0_prime(&p, r);
            let res = yp + 2.0 / r * y - (r * r + 1.0) / 4.0 * y * y;
            assert!(
                res.abs() < 1e-12 * y.abs().max(1.0),
                "ODE residual {res} at r={r}"
            );
        }
    }

    #[test]
    fn v_on_interval() {
        let ms = set();
        // on [r_e, r_*] the exact formula: v(2) = -2 c1 / (2*3*1) = -c1/3
        let v = ms.eval_v(2.0).unwrap();
        assert!((v + ms.c1 / 3.0).abs() < 1e-15);
        // zero below r_e and beyond the outer cutoff
        assert_eq!(ms.eval_v(1.05).unwrap(), 0.0);
        assert_eq!(ms.eval_v(10.0 * ms.params.r_star_pt()).unwrap(), 0.0);
        // C¹ across r_* (smoothstep has zero slope there)
        let rs = ms.params.r_star_pt();
        let (vl, vpl) = ms.eval_v_with_deriv(rs - 1e-9);
        let (vr, vpr) = ms.eval_v_with_deriv(rs + 1e-9);
        assert!((vl - vr).abs() < 1e-10);
        assert!((vpl - vpr).abs() < 1e-6);
    }

    #[test]
    fn delta_search_and_window() {
        let ms = set();
        let (lo, hi) = ms.delta_t_window().unwrap();
        // regression constants for the default configuration
        assert!(lo > 1.5 && lo < 1.7, "window low = {lo}");
        assert!(hi > 13.0 && hi < 14.0, "window high = {hi}");
        assert_eq!(ms.delta_display, 8.0);
        assert!(ms.delta_t > 0.0 && ms.delta_t < 1.0);
        // kappa0 regression: the (4.13)-style zeroth-order constant
        assert!(ms.kappa0 > 1.5e-3 && ms.kappa0 < 2.2e-3, "kappa0 = {}", ms.kappa0);
    }

    #[test]
    fn delta_search_fails_beyond_x1() {
        // r_e = 1.5 M exceeds x1 M: the display inequality has no feasible delta
        let ms = MultiplierSet::build(Params::new(1.0).unwrap(), 1.5, 0.5);
        assert!(ms.is_err());
    }

    #[test]
    fn theorem_weight_structure() {
        let p = Params::new(1.0).unwrap();
        let rt = p.r_trap();
        let w = theorem_coeffs(&p, rt);
        assert_eq!(w[1], 0.0);
        assert_eq!(w[2], 0.0);
        let near = theorem_coeffs(&p, 1.0 + 1e-8);
        assert!(near[0] < 1e-15 && near[3] < 1e-15);
        let far = theorem_coeffs(&p, 1e6);
        assert!((far[0] * 1e18 - 1.0).abs() < 1e-4);
        assert!((far[2] * 1e6 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn mass_scaling() {
        // A is homogeneous of degree 1 in M at fixed r/M; the margin of the
        // sharp bound inherits the same scaling.
        let m1 = set();
        let m2 = MultiplierSet::build(Params::new(2.0).unwrap(), 2.2, 0.5).unwrap();
        for &x in &[1.3, 2.0, 5.0] {
            let a1 = m1.eval_a(x).unwrap();
            let a2 = m2.eval_a(2.0 * x).unwrap();
            assert!(
                (a2 / a1 - 2.0).abs() < 1e-10,
                "A mass scaling at r/M={x}: {}",
                a2 / a1
            );
        }
        assert!((m2.c_1 / m1.c_1 - 4.0).abs() < 1e-16 * 4.0 + 1e-12);
    }
}
