//! Closed-form test fields with analytic derivatives.
//!
//! These are not solutions of the wave equation; they exist to exercise
//! identities and discretizations against an exact oracle. Each field is a
//! separable product T(t) R(r) S(θ) so every derivative up to second order
//! is available in closed form.

/// Which separable profile to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManufacturedField {
    /// e^{−t/(10M)} · (M/r) · P₂(cosθ)
    DecayInverseRadiusP2,
    /// e^{−t/(8M)} · M²/(r²+M²) · cos(r/(2M)) · P₀
    DecayRationalOscillatory,
    /// e^{−t/(12M)} · (M/r) sin(r/(3M)) · P₂(cosθ)
    DecayOscillatoryP2,
    /// ψ ≡ 1
    Constant,
}

/// Value and derivatives of ψ at one spacetime point.
#[derive(Debug, Clone, Copy, Default)]
pub struct FieldJet {
    pub psi: f64,
    pub d_t: f64,
    pub d_r: f64,
    pub d_th: f64,
    pub d_tt: f64,
    pub d_rr: f64,
    pub d_thth: f64,
}

fn p2(c: f64) -> f64 {
    0.5 * (3.0 * c * c - 1.0)
}

impl ManufacturedField {
    pub const CATALOG: [ManufacturedField; 3] = [
        ManufacturedField::DecayInverseRadiusP2,
        ManufacturedField::DecayRationalOscillatory,
        ManufacturedField::DecayOscillatoryP2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ManufacturedField::DecayInverseRadiusP2 => "decay_inverse_radius_p2",
            ManufacturedField::DecayRationalOscillatory => "decay_rational_oscillatory",
            ManufacturedField::DecayOscillatoryP2 => "decay_oscillatory_p2",
            ManufacturedField::Constant => "constant",
        }
    }

    /// Evaluate ψ and all derivatives needed by the divergence check.
    pub fn jet(&self, mass: f64, t: f64, r: f64, theta: f64) -> FieldJet {
        let m = mass;
        let c = theta.cos();
        let s = theta.sin();
        match self {
            ManufacturedField::Constant => FieldJet {
                psi: 1.0,
                ..Default::default()
            },
            ManufacturedField::DecayInverseRadiusP2 => {
                let lam = 1.0 / (10.0 * m);
                let tt = (-lam * t).exp();
                let rr = m / r;
                let rr_p = -m / (r * r);
                let rr_pp = 2.0 * m / (r * r * r);
                let ang = p2(c);
                let ang_p = -3.0 * c * s;
                let ang_pp = 3.0 * (s * s - c * c);
                FieldJet {
                    psi: tt * rr * ang,
                    d_t: -lam * tt * rr * ang,
                    d_tt: lam * lam * tt * rr * ang,
                    d_r: tt * rr_p * ang,
                    d_rr: tt * rr_pp * ang,
                    d_th: tt * rr * ang_p,
                    d_thth: tt * rr * ang_pp,
                }
            }
            ManufacturedField::DecayRationalOscillatory => {
                let lam = 1.0 / (8.0 * m);
                let tt = (-lam * t).exp();
                let d = r * r + m * m;
                let g = m * m / d;
                let g_p = -2.0 * m * m * r / (d * d);
                let g_pp = m * m * (6.0 * r * r - 2.0 * m * m) / (d * d * d);
                let k = 1.0 / (2.0 * m);
                let (h, h_p, h_pp) = ((k * r).cos(), -k * (k * r).sin(), -k * k * (k * r).cos());
                FieldJet {
                    psi: tt * g * h,
                    d_t: -lam * tt * g * h,
                    d_tt: lam * lam * tt * g * h,
                    d_r: tt * (g_p * h + g * h_p),
                    d_rr: tt * (g_pp * h + 2.0 * g_p * h_p + g * h_pp),
                    d_th: 0.0,
                    d_thth: 0.0,
                }
            }
            ManufacturedField::DecayOscillatoryP2 => {
                let lam = 1.0 / (12.0 * m);
                let tt = (-lam * t).exp();
                let k = 1.0 / (3.0 * m);
                let g = m / r * (k * r).sin();
                let g_p = -m / (r * r) * (k * r).sin() + m * k / r * (k * r).cos();
                let g_pp = 2.0 * m / (r * r * r) * (k * r).sin()
                    - 2.0 * m * k / (r * r) * (k * r).cos()
                    - m * k * k / r * (k * r).sin();
                let ang = p2(c);
                let ang_p = -3.0 * c * s;
                let ang_pp = 3.0 * (s * s - c * c);
                FieldJet {
                    psi: tt * g * ang,
                    d_t: -lam * tt * g * ang,
                    d_tt: lam * lam * tt * g * ang,
                    d_r: tt * g_p * ang,
                    d_rr: tt * g_pp * ang,
                    d_th: tt * g * ang_p,
                    d_thth: tt * g * ang_pp,
                }
            }
        }
    }

    /// |q|² □ψ in Boyer-Lindquist coordinates for an axisymmetric field:
    /// ∂_r(Δ ∂_r ψ) − ((r²+M²)²/Δ − M²sin²θ) ∂_t²ψ + (1/sinθ)∂_θ(sinθ ∂_θψ).
    pub fn q2_box(&self, mass: f64, t: f64, r: f64, theta: f64) -> f64 {
        let m = mass;
        let j = self.jet(m, t, r, theta);
        let d = (r - m) * (r - m);
        let d_prime = 2.0 * (r - m);
        let r2m2 = r * r + m * m;
        let s = theta.sin();
        let radial = d_prime * j.d_r + d * j.d_rr;
        let time = -(r2m2 * r2m2 / d - m * m * s * s) * j.d_tt;
        let ang = j.d_thth + (theta.cos() / s) * j.d_th;
        radial + time + ang
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jets_match_finite_differences() {
        let m = 1.0;
        let (t, r, th) = (0.7, 3.1, 1.0);
        let h = 1e-5;
        for f in ManufacturedField::CATALOG {
            let j = f.jet(m, t, r, th);
            let fd_t = (f.jet(m, t + h, r, th).psi - f.jet(m, t - h, r, th).psi) / (2.0 * h);
            let fd_r = (f.jet(m, t, r + h, th).psi - f.jet(m, t, r - h, th).psi) / (2.0 * h);
            let fd_th = (f.jet(m, t, r, th + h).psi - f.jet(m, t, r, th - h).psi) / (2.0 * h);
            let fd_rr = (f.jet(m, t, r + h, th).psi - 2.0 * j.psi + f.jet(m, t, r - h, th).psi)
                / (h * h);
            assert!((fd_t - j.d_t).abs() < 1e-8, "{}", f.name());
            assert!((fd_r - j.d_r).abs() < 1e-8, "{}", f.name());
            assert!((fd_th - j.d_th).abs() < 1e-8, "{}", f.name());
            assert!((fd_rr - j.d_rr).abs() < 1e-5, "{}", f.name());
        }
    }

    #[test]
    fn constant_field_is_flat() {
        let j = ManufacturedField::Constant.jet(1.0, 0.0, 2.0, 0.5);
        assert_eq!(j.psi, 1.0);
        assert_eq!(j.d_r, 0.0);
        assert_eq!(ManufacturedField::Constant.q2_box(1.0, 0.0, 2.0, 0.5), 0.0);
    }
}
