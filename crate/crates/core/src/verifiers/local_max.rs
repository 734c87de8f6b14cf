//! Opening the crossing line lowers the area.
//!
//! `area(Σ_t ∩ B) − 2π ≤ area(Σ_t ∩ Ω) − 2π = cap + ∫₀ᵗ (d/ds) area(Σ_s ∩ Ω) ds`,
//! where `cap = area(Σ₀ ∩ Ω) − 2π` is the cost of the polar bumps.

use super::report::ScanReport;
use crate::family_core::{classify_cubic, Phi5Surface};
use crate::quadrature::GaussRule;
use crate::surface_mesh::{area_estimate, AreaEstimate, DomainSpec, MeshOptions};
use crate::variation::{build_omega, slice_area, variation_integrals, OmegaDomain, Phi5Parameter, VariationError, VariationResolution, S3_RADIUS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// Default admissible scales.
pub const EPS1: f64 = 1e-2;
pub const EPS2: f64 = 1e-4;
/// Largest `t` with `2R = 40√t` below the outer cylinder radius.
pub const T_MAX: f64 = 3.5e-5;
/// Smallest `t` drawn by the local-max campaign. Below it the neck of `Σ_t` is
/// narrower than a few cells of the 256/512 meshes and the mesh estimate
/// stops resolving the area deficit.
pub const T_MIN_MESHABLE: f64 = 2e-5;

/// `|b1|, |b2| < eps1`, `t ∈ [t_min, t_max]` with `t_max < eps2` and `2R < 1/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scales {
    pub eps1: f64,
    pub eps2: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Default for Scales {
    fn default() -> Self {
        Self { eps1: EPS1, eps2: EPS2, t_min: T_MIN_MESHABLE, t_max: T_MAX }
    }
}

impl Scales {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.eps1 > 0.0 && self.eps2 > 0.0) {
            return Err(format!("eps1 = {}, eps2 = {} must be positive", self.eps1, self.eps2));
        }
        if !(0.0 < self.t_min && self.t_min <= self.t_max && self.t_max < self.eps2) {
            return Err(format!("need 0 < t_min <= t_max < eps2, got t in [{}, {}], eps2 = {}", self.t_min, self.t_max, self.eps2));
        }
        if 40.0 * self.t_max.sqrt() >= S3_RADIUS {
            return Err(format!("t_max = {} gives 2R = 40 sqrt(t) >= {S3_RADIUS}", self.t_max));
        }
        Ok(())
    }
}
/// Directions whose profile has a root inside `|z| ≤ 1.1` with `|φ′|` below
/// this are redrawn; the opened surfaces are then uniformly smooth.
pub const MIN_ROOT_SLOPE: f64 = 0.05;

/// A random admissible `(b1, b2, direction, t)` with `s = t`.
pub fn sample_admissible(rng: &mut ChaCha8Rng, eps1: f64, t_range: (f64, f64)) -> Phi5Parameter {
    loop {
        let b1 = rng.gen_range(-0.5 * eps1..0.5 * eps1);
        let b2 = rng.gen_range(-0.5 * eps1..0.5 * eps1);
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n2 = v.iter().map(|x| x * x).sum::<f64>();
        if !(1e-4..=1.0).contains(&n2) {
            continue;
        }
        let dir = [v[0], v[1], v[2].abs()];
        let t = rng.gen_range(t_range.0..t_range.1);
        let p = Phi5Parameter::from_direction(b1, b2, dir, t, t).expect("unit direction");
        let prof = classify_cubic(p.b3, p.b4, p.b5);
        let steep = prof.roots.iter().filter(|r| r.z.abs() <= 1.1).all(|r| (p.b3 + 3.0 * p.b5 * r.z * r.z).abs() >= MIN_ROOT_SLOPE);
        if steep && p.check_smooth(1.1).is_ok() {
            return p;
        }
    }
}

/// Antiderivative of `√(h² − ρ²)`.
fn circle_primitive(rho: f64, h: f64) -> f64 {
    let r = rho.clamp(-h, h);
    0.5 * (r * (h * h - r * r).max(0.0).sqrt() + h * h * (r / h).asin())
}

/// Area of the vertical plane through `(b1, b2)` with horizontal direction `u`
/// inside Ω: `∫ 2G dr`, exact on the sphere sheets and Gauss–Legendre on the
/// blend ring and plateau.
fn vertical_plane_area(omega: &OmegaDomain, u: [f64; 2], nodes: usize) -> f64 {
    let (b1, b2) = (omega.b1, omega.b2);
    let bu = b1 * u[0] + b2 * u[1];
    let h2 = 1.0 - (b1 * b1 + b2 * b2) + bu * bu;
    let h = h2.sqrt();
    // |b + r u|² = (r + b·u)² + 1 − h²
    let (r_lo, r_hi) = (-bu - h, -bu + h);
    let sheet = |a: f64, b: f64| 2.0 * (circle_primitive(b + bu, h) - circle_primitive(a + bu, h));
    let (r1, r2) = (omega.r, 2.0 * omega.r);
    let g = |r: f64| 2.0 * omega.height(b1 + r * u[0], b2 + r * u[1]).0;
    let rule = GaussRule::new(nodes);
    let gl = |a: f64, b: f64| rule.integrate(a, b, g);
    sheet(r_lo, -r2) + gl(-r2, -r1) + gl(-r1, r1) + gl(r1, r2) + sheet(r2, r_hi)
}

/// `area(Σ₀ ∩ Ω)`: the plane pair through the axis, clipped to Ω.
pub fn plane_pair_area_in(omega: &OmegaDomain) -> AreaEstimate {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let at = |n: usize| vertical_plane_area(omega, [s, s], n) + vertical_plane_area(omega, [s, -s], n);
    let (coarse, fine) = (at(24), at(48));
    AreaEstimate { value: fine, error_bound: (fine - coarse).abs(), resolutions_used: vec![24, 48], richardson: None }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalMaxRecord {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub b5: f64,
    pub t: f64,
    /// `area(Σ₀ ∩ Ω) − 2π`.
    pub cap: f64,
    pub cap_error: f64,
    /// `∫₀ᵗ (I1 + … + I6) ds`.
    pub integral: f64,
    pub integral_error: f64,
    /// `∫₀ᵗ I1 ds`.
    pub integral_i1: f64,
    /// `area(Σ_t ∩ Ω) − 2π` computed directly.
    pub omega_difference: f64,
    pub omega_difference_error: f64,
    /// `area(Σ_t ∩ B) − 2π` by slices.
    pub direct: f64,
    pub direct_error: f64,
    /// Mesh area of `Σ_t ∩ B` and its error bound.
    pub mesh_area: f64,
    pub mesh_error: f64,
}

impl LocalMaxRecord {
    pub fn decomposition(&self) -> f64 {
        self.cap + self.integral
    }

    /// Error of the decomposition, including its disagreement with the direct
    /// `Ω` area difference.
    pub fn decomposition_error(&self) -> f64 {
        self.cap_error + self.integral_error + (self.decomposition() - self.omega_difference).abs() + self.omega_difference_error
    }

    /// The mesh area clears `2π` with its error bound, and
    /// `direct ≤ cap + ∫ < 0` holds with all error bounds against it.
    pub fn passes(&self) -> bool {
        let dec = self.decomposition();
        let de = self.decomposition_error();
        self.mesh_area + self.mesh_error < TWO_PI && self.direct + self.direct_error <= dec - de && dec + de < 0.0
    }
}

/// Resolution of the local-max computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalMaxResolution {
    /// Gauss–Legendre nodes of the `s` integral (in `u` with `s = t·u²`).
    pub s_nodes: usize,
    pub variation: VariationResolution,
    pub mesh_n: usize,
}

impl Default for LocalMaxResolution {
    fn default() -> Self {
        Self { s_nodes: 16, variation: VariationResolution::from_mesh_n(96), mesh_n: 256 }
    }
}

/// Runs the decomposition for `(b1, b2, direction)` at each `t`.
pub fn local_max_experiment(
    b1: f64,
    b2: f64,
    dir: [f64; 3],
    t_list: &[f64],
    scales: &Scales,
    res: &LocalMaxResolution,
) -> Result<Vec<LocalMaxRecord>, VariationError> {
    t_list.iter().map(|&t| local_max_at(&Phi5Parameter::from_direction(b1, b2, dir, t, t)?, scales, res)).collect()
}

fn local_max_at(p: &Phi5Parameter, scales: &Scales, res: &LocalMaxResolution) -> Result<LocalMaxRecord, VariationError> {
    let t = p.t;
    let omega = build_omega(p.b1, p.b2, t, scales.eps1, scales.eps2)?;
    let cap = plane_pair_area_in(&omega);

    // s = t u² removes the s^(-1/2) singularity of I1 at s = 0.
    let nodes: Vec<(f64, f64)> = GaussRule::new(res.s_nodes).mapped(0.0, 1.0).collect();
    let mut integral = 0.0;
    let mut integral_i1 = 0.0;
    let mut integral_error = 0.0;
    for &(u, wu) in &nodes {
        let s = t * u * u;
        let ints = variation_integrals(&p.with_s(s), &omega, &res.variation)?;
        let jac = 2.0 * t * u * wu;
        integral += jac * ints.total();
        integral_i1 += jac * ints.terms[0];
        integral_error += jac * ints.error();
    }

    let surf: Phi5Surface = p.surface_at(t);
    let in_omega = slice_area(&surf, &DomainSpec::Omega(omega.clone()), res.variation.slices);
    let in_ball = slice_area(&surf, &DomainSpec::UnitBall, res.variation.slices);
    let family = surf.to_family().map_err(|e| VariationError::InvalidParameter(e.to_string()))?;
    let mesh = area_estimate(&family, &DomainSpec::UnitBall, res.mesh_n, MeshOptions { allow_singular: true })
        .map_err(|e| VariationError::InvalidParameter(format!("mesh: {e}")))?;
    Ok(LocalMaxRecord {
        b1: p.b1,
        b2: p.b2,
        b3: p.b3,
        b4: p.b4,
        b5: p.b5,
        t,
        cap: cap.value - TWO_PI,
        cap_error: cap.error_bound,
        integral,
        integral_error,
        integral_i1,
        omega_difference: in_omega.value - TWO_PI,
        omega_difference_error: in_omega.error_bound,
        direct: in_ball.value - TWO_PI,
        direct_error: in_ball.error_bound,
        mesh_area: mesh.value,
        mesh_error: mesh.error_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalMaxScan {
    pub report: ScanReport,
    pub records: Vec<LocalMaxRecord>,
}

pub fn local_max_verdict(records: &[LocalMaxRecord], required: usize) -> bool {
    records.len() >= required && records.iter().all(LocalMaxRecord::passes)
}

/// `samples` random admissible configurations with `t ∈ [t_min, t_max]`.
pub fn local_max_campaign(samples: usize, seed: u64, scales: &Scales, res: &LocalMaxResolution) -> Result<LocalMaxScan, VariationError> {
    scales.validate().map_err(VariationError::InvalidParameter)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<Phi5Parameter> = (0..samples).map(|_| sample_admissible(&mut rng, scales.eps1, (scales.t_min, scales.t_max))).collect();
    let records = params.par_iter().map(|p| local_max_at(p, scales, res)).collect::<Result<Vec<_>, _>>()?;
    let worst_mesh = records.iter().map(|r| TWO_PI - r.mesh_area - r.mesh_error).fold(f64::INFINITY, f64::min);
    let worst_dec = records.iter().map(|r| -(r.decomposition() + r.decomposition_error())).fold(f64::INFINITY, f64::min);
    let worst_bracket = records
        .iter()
        .map(|r| r.decomposition() - r.decomposition_error() - r.direct - r.direct_error)
        .fold(f64::INFINITY, f64::min);
    let mut report = ScanReport::new("local-max", records.len())
        .margin("two_pi_minus_mesh_upper", worst_mesh)
        .margin("decomposition_below_zero", worst_dec)
        .margin("bracket_gap", worst_bracket);
    report.passed = local_max_verdict(&records, samples);
    report.notes.push(format!("eps1 = {}, eps2 = {}, t in [{}, {}], {} s nodes, mesh n = {}", scales.eps1, scales.eps2, scales.t_min, scales.t_max, res.s_nodes, res.mesh_n));
    Ok(LocalMaxScan { report, records })
}
