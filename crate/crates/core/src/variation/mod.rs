//! First variation of area for the translated family inside the enlarged domain.
//!
//! `Σ_s = {(x − b1)² − (y − b2)² + s·φ(z) = 0} ∩ Ω` with `φ = b3 z + b4 + b5 z³`.
//! The derivative of its area splits into two interior integrals
//! (`−∫ H·V`, with `H·V` expanded) and four boundary integrals over the parts
//! of `∂Σ_s` inside the cylinders of radius `R`, `2R`, `1/4` about the axis
//! `(b1, b2)` and outside them.

mod boundary;
mod omega;
mod slices;

pub use omega::{build_omega, build_omega_with, BlendKind, OmegaConfig, OmegaDomain, OmegaError, S3_RADIUS};
pub use slices::{SliceIntegral, SliceResolution};

use crate::family_core::{classify_cubic, ImplicitSurface, Phi5Surface, Vec3};
use crate::surface_mesh::{AreaEstimate, DomainSpec};
use boundary::{boundary_sums, Tracer};
use serde::{Deserialize, Serialize};
use slices::Slicer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VariationError {
    #[error("|grad p| = {gradient_norm:e} at {point:?} is below the threshold")]
    NearSingular { point: [f64; 3], gradient_norm: f64 },
    #[error("nu . w = {value:e} at {point:?}")]
    ConormalDegenerate { point: [f64; 3], value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("boundary tracing failed: {0}")]
    TraceFailure(String),
    #[error(transparent)]
    Omega(#[from] OmegaError),
}

/// Gradient norms below this are treated as singular.
pub const GRADIENT_FLOOR: f64 = 1e-10;

/// A member `Φ₅(b1, b2, s·b3, s·b4, s·b5)` with its cap scale `t ≥ s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phi5Parameter {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub b5: f64,
    pub s: f64,
    pub t: f64,
}

impl Phi5Parameter {
    pub fn new(b: [f64; 5], s: f64, t: f64) -> Result<Self, VariationError> {
        let [b1, b2, b3, b4, b5] = b;
        let norm2 = b3 * b3 + b4 * b4 + b5 * b5;
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(VariationError::InvalidParameter(format!("b3² + b4² + b5² = {norm2}, expected 1")));
        }
        if b5 < 0.0 {
            return Err(VariationError::InvalidParameter(format!("b5 = {b5} is negative")));
        }
        if !(s > 0.0 && s <= t) {
            return Err(VariationError::InvalidParameter(format!("need 0 < s <= t, got s = {s}, t = {t}")));
        }
        Ok(Self { b1, b2, b3, b4, b5, s, t })
    }

    /// Normalizes the direction `(b3, b4, b5)` first.
    pub fn from_direction(b1: f64, b2: f64, dir: [f64; 3], s: f64, t: f64) -> Result<Self, VariationError> {
        let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        if n == 0.0 {
            return Err(VariationError::InvalidParameter("zero direction".into()));
        }
        Self::new([b1, b2, dir[0] / n, dir[1] / n, dir[2] / n], s, t)
    }

    pub fn b(&self) -> [f64; 5] {
        [self.b1, self.b2, self.b3, self.b4, self.b5]
    }

    pub fn with_s(&self, s: f64) -> Self {
        Self { s, ..*self }
    }

    pub fn surface(&self) -> Phi5Surface {
        self.surface_at(self.s)
    }

    /// The same direction at opening `s` (which may be 0 or exceed `t`).
    pub fn surface_at(&self, s: f64) -> Phi5Surface {
        Phi5Surface::new(self.b(), s)
    }

    /// Rejects directions whose profile has a multiple root in `[−z_max, z_max]`
    /// (then every `Σ_s` is singular).
    pub fn check_smooth(&self, z_max: f64) -> Result<(), VariationError> {
        let prof = classify_cubic(self.b3, self.b4, self.b5);
        if let Some(z) = prof.multiple_roots().find(|z| z.abs() <= z_max) {
            return Err(VariationError::NearSingular { point: [self.b1, self.b2, z], gradient_norm: 0.0 });
        }
        Ok(())
    }
}

/// Mean curvature `(∇p·Hess p·∇p − |∇p|² Δp)/|∇p|³` for the normal
/// `∇p/|∇p|`.
pub fn mean_curvature<S: ImplicitSurface>(surface: &S, x: &Vec3) -> Result<f64, VariationError> {
    let g = surface.gradient(x);
    let gn = g.norm();
    if gn <= GRADIENT_FLOOR {
        return Err(VariationError::NearSingular { point: [x.x, x.y, x.z], gradient_norm: gn });
    }
    let h = surface.hessian(x);
    Ok(((g.transpose() * h * g)[0] - gn * gn * h.trace()) / (gn * gn * gn))
}

/// `V = −(∂ₛp/|∇p|²) ∇p`, so that `∂ₛp + ∇p·V = 0`.
pub fn deformation_field(param: &Phi5Parameter, x: &Vec3) -> Result<Vec3, VariationError> {
    let surf = param.surface();
    let g = surf.gradient(x);
    let g2 = g.norm_squared();
    if g2.sqrt() <= GRADIENT_FLOOR {
        return Err(VariationError::NearSingular { point: [x.x, x.y, x.z], gradient_norm: g2.sqrt() });
    }
    Ok(-g * (surf.profile(x.z) / g2))
}

/// Numerical resolution of the integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationResolution {
    pub slices: SliceResolution,
    /// Boundary step as a fraction of the axis distance; a second pass uses
    /// half of it for the error estimate and Richardson extrapolation.
    pub boundary_alpha: f64,
    pub boundary_max_step: f64,
}

impl VariationResolution {
    /// Resolution comparable to a surface mesh of `mesh_n` cells per axis.
    /// The boundary is walked at four times that resolution.
    pub fn from_mesh_n(mesh_n: usize) -> Self {
        let n = mesh_n.max(16) as f64;
        let slices = SliceResolution { rel_tol: 1e-10 * (128.0 / n).powi(2), ..SliceResolution::default() };
        Self { slices, boundary_alpha: 8.0 / n, boundary_max_step: 2.0 / n }
    }
}

impl Default for VariationResolution {
    fn default() -> Self {
        Self::from_mesh_n(128)
    }
}

/// Area of `Σ ∩ D` by slice quadrature. The error bound is the accumulated
/// `n`/`2n` panel disagreement.
pub fn slice_area(surf: &Phi5Surface, domain: &DomainSpec, res: SliceResolution) -> AreaEstimate {
    let q = Slicer::new(surf, domain, res).integrate(|_| [1.0]);
    AreaEstimate {
        value: q.value[0],
        error_bound: q.error[0],
        resolutions_used: vec![res.z_nodes, 2 * res.z_nodes],
        richardson: None,
    }
}

/// The six integrals without the finite-difference check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationIntegrals {
    /// `I1 … I6`.
    pub terms: [f64; 6],
    /// Error estimates of the six terms.
    pub errors: [f64; 6],
    /// `I3 + … + I6` recomputed over the whole boundary without partitioning.
    pub boundary_unpartitioned: f64,
    /// Largest `|n·w|` seen in each boundary region.
    pub max_nw: [f64; 4],
    pub boundary_length: f64,
    pub boundary_components: usize,
}

impl VariationIntegrals {
    pub fn total(&self) -> f64 {
        self.terms.iter().sum()
    }

    pub fn error(&self) -> f64 {
        self.errors.iter().sum()
    }
}

/// Heights used to seed the boundary tracer.
fn seed_heights(z_max: f64) -> Vec<f64> {
    let mut zs: Vec<f64> = (0..64).map(|i| -z_max + 2.0 * z_max * (i as f64 + 0.5) / 64.0).collect();
    for k in 1..=8 {
        let d = 10f64.powi(-k);
        zs.push(z_max - d);
        zs.push(-z_max + d);
    }
    zs
}

fn boundary_integrand(surf: &Phi5Surface, domain: &DomainSpec, x: &Vec3) -> Result<(f64, f64), VariationError> {
    let g = surf.gradient(x);
    let gn = g.norm();
    if gn <= GRADIENT_FLOOR {
        return Err(VariationError::NearSingular { point: [x.x, x.y, x.z], gradient_norm: gn });
    }
    let w = domain.outward_normal(x);
    let nw = g.dot(&w) / gn;
    let nu_w = (1.0 - nw * nw).max(0.0).sqrt();
    if nu_w < 1e-8 {
        return Err(VariationError::ConormalDegenerate { point: [x.x, x.y, x.z], value: nu_w });
    }
    // −(n·w)(V·n)/(ν·w) with V·n = −φ/|∇p|
    Ok((nw * surf.profile(x.z) / (gn * nu_w), nw))
}

/// Computes `I1 … I6` for `Σ_s ∩ Ω`.
pub fn variation_integrals(param: &Phi5Parameter, omega: &OmegaDomain, res: &VariationResolution) -> Result<VariationIntegrals, VariationError> {
    param.check_smooth(omega.c)?;
    let radii = [omega.r, 2.0 * omega.r, S3_RADIUS];
    integrals_in(&param.surface(), &DomainSpec::Omega(omega.clone()), radii, res)
}

/// The same decomposition for any domain, with the boundary split at axis
/// distances `radii`.
pub fn integrals_in(surf: &Phi5Surface, domain: &DomainSpec, radii: [f64; 3], res: &VariationResolution) -> Result<VariationIntegrals, VariationError> {
    let [b1, b2, _, _, b5] = surf.b;
    let s = surf.s;
    let slicer = Slicer::new(surf, domain, res.slices);
    let interior = slicer.integrate(|x| {
        let g2 = surf.gradient(x).norm_squared();
        let phi = surf.profile(x.z);
        let rho2 = (x.x - b1).powi(2) + (x.y - b2).powi(2);
        let g4 = g2 * g2;
        [-8.0 * s * phi * phi / g4, -24.0 * b5 * s * x.z * phi * rho2 / g4]
    });

    let seeds: Vec<Vec3> = seed_heights(domain.half_extents().z).into_iter().flat_map(|z| slicer.boundary_points(z)).collect();
    let g = |x: &Vec3| boundary_integrand(surf, domain, x);
    let mut sums = Vec::with_capacity(2);
    let mut components = 0;
    for k in [1.0, 0.5] {
        let tracer = Tracer { surf, domain, alpha: res.boundary_alpha * k, max_step: res.boundary_max_step * k };
        let loops = tracer.trace_all(&seeds)?;
        components = loops.len();
        sums.push(boundary_sums(&tracer, &loops, radii, g)?);
    }
    let (coarse, fine) = (sums[0], sums[1]);
    let rich = |c: f64, f: f64| (4.0 * f - c) / 3.0;
    let mut terms = [interior.value[0], interior.value[1], 0.0, 0.0, 0.0, 0.0];
    let mut errors = [interior.error[0], interior.error[1], 0.0, 0.0, 0.0, 0.0];
    let mut max_nw = [0.0; 4];
    for k in 0..4 {
        terms[2 + k] = rich(coarse.parts[k], fine.parts[k]);
        errors[2 + k] = (fine.parts[k] - coarse.parts[k]).abs() / 3.0;
        max_nw[k] = coarse.max_nw[k].max(fine.max_nw[k]);
    }
    Ok(VariationIntegrals {
        terms,
        errors,
        boundary_unpartitioned: rich(coarse.whole, fine.whole),
        max_nw,
        boundary_length: fine.length,
        boundary_components: components,
    })
}

/// Central difference `(A(s + h) − A(s − h))/(2h)` with its error terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDifference {
    pub derivative: f64,
    pub step: f64,
    /// Propagated area quadrature error, `(e₊ + e₋)/(2h)`.
    pub area_error: f64,
    /// Truncation estimate `(4/3)|D(h) − D(h/2)|`.
    pub truncation: f64,
    /// `D(h/2)`.
    pub half_step_derivative: f64,
}

impl FiniteDifference {
    pub fn error(&self) -> f64 {
        self.area_error + self.truncation
    }
}

/// Central difference of any area function, with a half-step truncation
/// estimate.
pub fn central_difference<E>(area: impl Fn(f64) -> Result<AreaEstimate, E>, s: f64, h: f64) -> Result<FiniteDifference, E> {
    let plus = area(s + h)?;
    let minus = area(s - h)?;
    let half_plus = area(s + 0.5 * h)?;
    let half_minus = area(s - 0.5 * h)?;
    let d = (plus.value - minus.value) / (2.0 * h);
    let d_half = (half_plus.value - half_minus.value) / h;
    Ok(FiniteDifference {
        derivative: d,
        step: h,
        area_error: (plus.error_bound + minus.error_bound) / (2.0 * h),
        truncation: 4.0 / 3.0 * (d - d_half).abs(),
        half_step_derivative: d_half,
    })
}

/// Finite-difference derivative in `s` of `area(Σ_s ∩ Ω)`.
pub fn finite_diff_area(param: &Phi5Parameter, omega: &OmegaDomain, s: f64, h: f64, mesh_n: usize) -> Result<FiniteDifference, VariationError> {
    if !(s - h > 0.0) {
        return Err(VariationError::InvalidParameter(format!("s - h = {} must be positive", s - h)));
    }
    let res = VariationResolution::from_mesh_n(mesh_n);
    let domain = DomainSpec::Omega(omega.clone());
    central_difference(|ss| Ok::<_, VariationError>(slice_area(&param.surface_at(ss), &domain, res.slices)), s, h)
}

/// The six integrals, their sum, and the finite-difference check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationBreakdown {
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
    #[serde(rename = "I3")]
    pub i3: f64,
    #[serde(rename = "I4")]
    pub i4: f64,
    #[serde(rename = "I5")]
    pub i5: f64,
    #[serde(rename = "I6")]
    pub i6: f64,
    pub total: f64,
    pub fd_total: f64,
    pub fd_step: f64,
    /// Quadrature error of `total`.
    pub total_error: f64,
    pub fd_area_error: f64,
    pub fd_truncation: f64,
    pub boundary_unpartitioned: f64,
    pub max_nw: [f64; 4],
    pub param: Phi5Parameter,
}

impl VariationBreakdown {
    /// `|total − fd_total|`.
    pub fn discrepancy(&self) -> f64 {
        (self.total - self.fd_total).abs()
    }

    /// Numerical error budget of the comparison: quadrature error of both
    /// sides plus the finite-difference truncation estimate.
    pub fn error_budget(&self) -> f64 {
        self.total_error + self.fd_area_error + self.fd_truncation
    }
}

/// Analytic first variation at `param.s` and its finite-difference check with
/// step `s/10`.
pub fn first_variation(param: &Phi5Parameter, omega: &OmegaDomain, mesh_n: usize) -> Result<VariationBreakdown, VariationError> {
    let res = VariationResolution::from_mesh_n(mesh_n);
    let ints = variation_integrals(param, omega, &res)?;
    let h = param.s / 10.0;
    let fd = finite_diff_area(param, omega, param.s, h, mesh_n)?;
    let [i1, i2, i3, i4, i5, i6] = ints.terms;
    Ok(VariationBreakdown {
        i1,
        i2,
        i3,
        i4,
        i5,
        i6,
        total: i1 + i2 + i3 + i4 + i5 + i6,
        fd_total: fd.derivative,
        fd_step: h,
        total_error: ints.error(),
        fd_area_error: fd.area_error,
        fd_truncation: fd.truncation,
        boundary_unpartitioned: ints.boundary_unpartitioned,
        max_nw: ints.max_nw,
        param: *param,
    })
}
