//! Area of a family member inside the unit ball.
//!
//! The ball is rotation invariant, so only `(a, a5)` matters. With `a0 ≠ 0`,
//! completing squares turns the member into the translated form
//! `(x − b1)² − (y − b2)² + φ(z)`, which the slice quadrature handles to near
//! machine precision; `a0 = 0` gives a plane with a closed-form area.

use crate::family_core::{FamilyParameter, Phi5Surface};
use crate::surface_mesh::{area_estimate, AreaEstimate, DomainSpec, MeshError, MeshOptions};
use crate::variation::{slice_area, SliceResolution};
use std::f64::consts::{PI, SQRT_2};

/// `(b1, b2, b3, b4, b5)` with `s = 1`, or `None` when `a0 = 0`.
pub fn translated_form(param: &FamilyParameter) -> Option<Phi5Surface> {
    let a = param.proj.coords();
    if a[0] == 0.0 {
        return None;
    }
    let b1 = -a[1] / (2.0 * a[0]);
    let b2 = a[2] / (2.0 * a[0]);
    let b = [b1, b2, a[3] / a[0], a[4] / a[0] - b1 * b1 + b2 * b2, param.a5];
    Some(Phi5Surface::new(b, 1.0))
}

/// Area of `{a1 x + a2 y + a3 z + a4 = 0} ∩ B`.
pub fn plane_area(a: &[f64; 5]) -> f64 {
    let n = (a[1] * a[1] + a[2] * a[2] + a[3] * a[3]).sqrt();
    if n == 0.0 {
        return 0.0;
    }
    let d = a[4].abs() / n;
    if d >= 1.0 {
        0.0
    } else {
        PI * (1.0 - d * d)
    }
}

/// Area of the plane pair `(x − b1)² = (y − b2)²` inside the ball. The planes
/// `x ∓ y = b1 ∓ b2` meet along a line, so the areas add.
pub fn plane_pair_area(b1: f64, b2: f64) -> f64 {
    let disk = |d: f64| if d >= 1.0 { 0.0 } else { PI * (1.0 - d * d) };
    disk((b1 - b2).abs() / SQRT_2) + disk((b1 + b2).abs() / SQRT_2)
}

/// Translated forms with `|b3|, |b4|, |b5|` below this are plane pairs up to
/// round-off. The slice error estimate does not see the crossing line, so
/// these use the closed form.
pub const PLANE_PAIR_TOL: f64 = 1e-12;

/// `|a0| / |(a1, a2, a3)|` at or below this counts as a near-plane: the
/// translated form would need `b ~ 1/a0`.
pub const NEAR_PLANE_RATIO: f64 = 1e-10;

/// Plane area with a perturbation bound. In the ball `|x² − y² + a5 z³| ≤ 1 + a5`
/// and its gradient is at most `2 + 3a5`, so with `r = |a0|/|n|` the zero set
/// is a graph over the plane, offset by at most `(1 + a5)r` and tilted by at
/// most `(2 + 3a5)r`. The disk area is `2π`-Lipschitz in the offset.
fn near_plane_area(a: &[f64; 5], a5: f64) -> Option<AreaEstimate> {
    let n = (a[1] * a[1] + a[2] * a[2] + a[3] * a[3]).sqrt();
    let r = a[0].abs() / n;
    if a[0] == 0.0 || !(r <= NEAR_PLANE_RATIO) {
        return None;
    }
    let tilt = (2.0 + 3.0 * a5) * r;
    let error = 2.0 * PI * (1.0 + a5) * r + PI * tilt * tilt;
    Some(AreaEstimate { value: plane_area(a), error_bound: error, resolutions_used: Vec::new(), richardson: None })
}

/// Area by slices, or exactly for planes and plane pairs.
pub fn member_area(param: &FamilyParameter) -> AreaEstimate {
    if let Some(est) = near_plane_area(&param.proj.coords(), param.a5) {
        return est;
    }
    match translated_form(param) {
        Some(surf) if surf.b[2..].iter().all(|v| v.abs() <= PLANE_PAIR_TOL) => AreaEstimate::exact(plane_pair_area(surf.b[0], surf.b[1])),
        Some(surf) => slice_area(&surf, &DomainSpec::UnitBall, SliceResolution::default()),
        None => AreaEstimate::exact(plane_area(&param.proj.coords())),
    }
}

/// Area from meshes at `n` and `2n`; singular members are meshed anyway.
pub fn member_mesh_area(param: &FamilyParameter, n: usize) -> Result<AreaEstimate, MeshError> {
    area_estimate(param, &DomainSpec::UnitBall, n, MeshOptions { allow_singular: true })
}
