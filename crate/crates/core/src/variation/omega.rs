//! The enlarged domain Ω: the unit ball with a flat-topped bump over each pole.
//!
//! Over the disk of radius `2R` about the axis `(b1, b2)` the upper boundary is
//! the graph of `G = c·(1 − H(τ)) + f·H(τ)`, `τ = (r − R)/R` clamped to
//! `[0, 1]`, with `f = √(1 − x² − y²)` the sphere sheet and `H` the quintic
//! smoothstep. `G ≡ c` on the radius-`R` disk and `G = f` beyond `2R`. The
//! lower boundary is the mirror image.

use crate::family_core::Vec3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OmegaError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlendKind {
    /// `H(τ) = 10τ³ − 15τ⁴ + 6τ⁵`: C² with vanishing first and second
    /// derivatives at both ends.
    QuinticHermite,
}

/// Tuning for [`build_omega`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaConfig {
    /// Constant of the gradient bound `|∇G| ≤ C″·(ε1 + ε2)` on the blend ring.
    pub c_double_prime: f64,
    /// Plateau margin above the sphere, as a multiple of `t`.
    pub margin_factor: f64,
    /// Number of dense samples used to assert the invariants.
    pub check_samples: usize,
}

impl Default for OmegaConfig {
    fn default() -> Self {
        Self { c_double_prime: 80.0, margin_factor: 1e-3, check_samples: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaDomain {
    pub b1: f64,
    pub b2: f64,
    pub t: f64,
    /// `R = 20√t`.
    pub r: f64,
    /// Plateau height over the radius-`R` disk.
    pub c: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub blend_kind: BlendKind,
    pub config: OmegaConfig,
    /// Largest `|∇G|` found by the dense invariant check.
    pub max_height_gradient: f64,
}

/// Radius of the outermost cylinder of the boundary partition.
pub const S3_RADIUS: f64 = 0.25;

fn smoothstep(t: f64) -> (f64, f64) {
    let t = t.clamp(0.0, 1.0);
    let h = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    let dh = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    (h, dh)
}

fn sphere_sheet(x: f64, y: f64) -> (f64, f64, f64) {
    let f = (1.0 - x * x - y * y).max(0.0).sqrt();
    if f == 0.0 {
        return (0.0, f64::INFINITY, f64::INFINITY);
    }
    (f, -x / f, -y / f)
}

impl OmegaDomain {
    /// Distance from the bump axis in the horizontal plane.
    pub fn axis_distance(&self, x: &Vec3) -> f64 {
        (x.x - self.b1).hypot(x.y - self.b2)
    }

    /// Upper boundary height `G(x, y)` and its gradient, valid for
    /// `x² + y² < 1`.
    pub fn height(&self, x: f64, y: f64) -> (f64, [f64; 2]) {
        let (f, fx, fy) = sphere_sheet(x, y);
        let dx = x - self.b1;
        let dy = y - self.b2;
        let r = dx.hypot(dy);
        if r >= 2.0 * self.r {
            return (f, [fx, fy]);
        }
        if r <= self.r {
            return (self.c, [0.0, 0.0]);
        }
        let (h, dh) = smoothstep((r - self.r) / self.r);
        let g = self.c * (1.0 - h) + f * h;
        let radial = (f - self.c) * dh / (self.r * r);
        (g, [radial * dx + h * fx, radial * dy + h * fy])
    }

    fn in_cap_chart(x: &Vec3) -> bool {
        x.z.abs() > 0.5 && x.x * x.x + x.y * x.y < 0.64
    }

    /// Signed level function, negative inside. Near the poles it is
    /// `|z| − G(x, y)`, elsewhere `|x| − 1`.
    pub fn level(&self, x: &Vec3) -> f64 {
        if Self::in_cap_chart(x) {
            x.z.abs() - self.height(x.x, x.y).0
        } else {
            x.norm() - 1.0
        }
    }

    pub fn level_gradient(&self, x: &Vec3) -> Vec3 {
        if Self::in_cap_chart(x) {
            let (_, g) = self.height(x.x, x.y);
            Vec3::new(-g[0], -g[1], x.z.signum())
        } else {
            let n = x.norm();
            if n == 0.0 {
                Vec3::new(0.0, 0.0, 1.0)
            } else {
                x / n
            }
        }
    }

    /// Outward unit normal `w` of the level set through `x`.
    pub fn outward_normal(&self, x: &Vec3) -> Vec3 {
        self.level_gradient(x).normalize()
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        self.level(x) <= 0.0
    }

    pub fn gradient_bound(&self) -> f64 {
        self.config.c_double_prime * (self.eps1 + self.eps2)
    }
}

pub fn build_omega(b1: f64, b2: f64, t: f64, eps1: f64, eps2: f64) -> Result<OmegaDomain, OmegaError> {
    build_omega_with(b1, b2, t, eps1, eps2, OmegaConfig::default())
}

pub fn build_omega_with(b1: f64, b2: f64, t: f64, eps1: f64, eps2: f64, config: OmegaConfig) -> Result<OmegaDomain, OmegaError> {
    if !(t > 0.0 && t < eps2) {
        return Err(OmegaError::Precondition(format!("t = {t} is not in (0, eps2 = {eps2})")));
    }
    if !(b1.abs() < eps1 && b2.abs() < eps1) {
        return Err(OmegaError::Precondition(format!("(b1, b2) = ({b1}, {b2}) is not in (-eps1, eps1)^2")));
    }
    let r = 20.0 * t.sqrt();
    if !(2.0 * r < S3_RADIUS) {
        return Err(OmegaError::Precondition(format!("2R = {} is not below {S3_RADIUS}", 2.0 * r)));
    }
    // The sheet f is largest at the point of the 2R-disk nearest the origin.
    let bn = b1.hypot(b2);
    let nearest = (bn - 2.0 * r).max(0.0);
    let c = (1.0 - nearest * nearest).sqrt() + config.margin_factor * t;
    let mut omega = OmegaDomain {
        b1,
        b2,
        t,
        r,
        c,
        eps1,
        eps2,
        blend_kind: BlendKind::QuinticHermite,
        config,
        max_height_gradient: 0.0,
    };
    omega.max_height_gradient = check_invariants(&omega)?;
    Ok(omega)
}

/// Dense polar sampling of the radius-2R disk. Returns the largest `|∇G|`.
fn check_invariants(omega: &OmegaDomain) -> Result<f64, OmegaError> {
    let n = omega.config.check_samples.max(100);
    let n_theta = (n as f64).sqrt().ceil() as usize;
    let n_r = n.div_ceil(n_theta);
    let bound = omega.gradient_bound();
    let mut worst: f64 = 0.0;
    for i in 0..n_r {
        let rho = 2.0 * omega.r * (i as f64 + 0.5) / n_r as f64;
        for j in 0..n_theta {
            let th = std::f64::consts::TAU * j as f64 / n_theta as f64;
            let x = omega.b1 + rho * th.cos();
            let y = omega.b2 + rho * th.sin();
            let (g, grad) = omega.height(x, y);
            let (f, _, _) = sphere_sheet(x, y);
            if g < f {
                return Err(OmegaError::InvariantViolation(format!("G < f at ({x}, {y}): {g} < {f}")));
            }
            let gn = grad[0].hypot(grad[1]);
            if rho <= omega.r && gn != 0.0 {
                return Err(OmegaError::InvariantViolation(format!("boundary not horizontal at radius {rho}")));
            }
            worst = worst.max(gn);
        }
    }
    if worst > bound {
        return Err(OmegaError::InvariantViolation(format!(
            "|grad G| = {worst:.4} exceeds C''(eps1 + eps2) = {bound:.4}"
        )));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_formula() {
        // R = 20√t: t = 1e-4 gives R = 0.2, which violates 2R < 1/4.
        assert!((20.0 * 1e-4f64.sqrt() - 0.2).abs() < 1e-15);
        assert!(matches!(build_omega(0.0, 0.0, 1e-4, 1e-2, 2e-4), Err(OmegaError::Precondition(_))));
        assert!(matches!(build_omega(0.0, 0.0, 1.0 / 25_600.0, 1e-2, 1e-4), Err(OmegaError::Precondition(_))));
    }

    #[test]
    fn plateau_and_blend() {
        let om = build_omega(0.0, 0.0, 1e-5, 1e-2, 1e-4).unwrap();
        assert!((om.r - 20.0 * 1e-5f64.sqrt()).abs() < 1e-15);
        assert!(om.c > 1.0);
        for k in 0..50 {
            let rho = om.r * k as f64 / 50.0;
            let (g, grad) = om.height(rho, 0.0);
            assert_eq!(g, om.c);
            assert_eq!(grad, [0.0, 0.0]);
        }
        let (g, _) = om.height(0.5, 0.1);
        assert_eq!(g, (1.0f64 - 0.26).sqrt());
    }

    #[test]
    fn offset_axis_passes_invariants() {
        let om = build_omega(0.009, -0.009, 2.5e-5, 1e-2, 1e-4).unwrap();
        assert!((om.r - 0.1).abs() < 1e-15);
        assert!(om.max_height_gradient <= om.gradient_bound());
    }

    #[test]
    fn small_c_double_prime_is_reported() {
        let cfg = OmegaConfig { c_double_prime: 10.0, ..Default::default() };
        let err = build_omega_with(0.0, 0.0, 3e-5, 1e-2, 1e-4, cfg).unwrap_err();
        assert!(matches!(err, OmegaError::InvariantViolation(_)));
    }

    #[test]
    fn height_gradient_matches_differences() {
        let om = build_omega(0.004, 0.003, 1e-5, 1e-2, 1e-4).unwrap();
        let h = 1e-7;
        for k in 0..40 {
            let th = k as f64 * 0.37;
            let rho = om.r * (1.05 + 0.9 * (k as f64 / 40.0));
            let (x, y) = (om.b1 + rho * th.cos(), om.b2 + rho * th.sin());
            let (_, g) = om.height(x, y);
            let gx = (om.height(x + h, y).0 - om.height(x - h, y).0) / (2.0 * h);
            let gy = (om.height(x, y + h).0 - om.height(x, y - h).0) / (2.0 * h);
            assert!((gx - g[0]).abs() < 1e-6 && (gy - g[1]).abs() < 1e-6);
        }
    }

    #[test]
    fn contains_the_ball() {
        let om = build_omega(-0.005, 0.002, 2e-5, 1e-2, 1e-4).unwrap();
        for i in 0..40 {
            for j in 0..80 {
                let th = std::f64::consts::PI * (i as f64 + 0.5) / 40.0;
                let ph = std::f64::consts::TAU * j as f64 / 80.0;
                let x = Vec3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos());
                assert!(om.level(&x) <= 1e-15);
            }
        }
        assert!(om.contains(&Vec3::new(om.b1, om.b2, 1.0 + 0.5 * om.config.margin_factor * om.t)));
        assert!(!om.contains(&Vec3::new(om.b1, om.b2, om.c + 1e-9)));
        assert!(om.contains(&Vec3::new(om.b1, om.b2, -om.c + 1e-9)));
    }
}
