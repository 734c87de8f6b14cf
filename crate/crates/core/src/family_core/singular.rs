//! Singular points of family members.
//!
//! For `a0 ≠ 0` the polynomial divided by `a0` is
//! `(y1 − c1)² − (y2 − c2)² + a5·y3³ + A3·y3 + A4` with
//! `c1 = −a1/(2a0)`, `c2 = a2/(2a0)`, `A3 = a3/a0` and
//! `A4 = a4/a0 − (a1² − a2²)/(4a0²)`. Its gradient vanishes only on the
//! vertical line through `(c1, c2)` at critical points of the cubic, so the
//! singular points are the multiple roots of the translated profile.

use super::{classify_cubic, CubicProfile, FamilyError, FamilyParameter, ProjectivePoint4, Vec3};

/// `a0` below this magnitude is treated as a plane.
const PLANE_A0: f64 = 1e-14;
/// Absolute tolerance for the vanishing of the linear profile.
const LINE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TranslatedProfile {
    pub center: (f64, f64),
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
}

impl TranslatedProfile {
    pub fn classify(&self) -> CubicProfile {
        classify_cubic(self.a3, self.a4, self.a5)
    }

    /// Profile value `a5·z³ + A3·z + A4`.
    pub fn value(&self, z: f64) -> f64 {
        self.a5 * z * z * z + self.a3 * z + self.a4
    }
}

/// The translated profile, or `None` when the member is a plane (`a0 = 0`).
pub fn translated_profile(param: &FamilyParameter) -> Option<TranslatedProfile> {
    let [a0, a1, a2, a3, a4] = param.proj.coords();
    if a0.abs() <= PLANE_A0 {
        return None;
    }
    Some(TranslatedProfile {
        center: (-a1 / (2.0 * a0), a2 / (2.0 * a0)),
        a3: a3 / a0,
        a4: a4 / a0 - (a1 * a1 - a2 * a2) / (4.0 * a0 * a0),
        a5: param.a5,
    })
}

fn is_line_pair(prof: &TranslatedProfile) -> bool {
    prof.a5 == 0.0 && prof.a3.abs() <= LINE_TOL && prof.a4.abs() <= LINE_TOL
}

/// Singular points inside the closed unit ball, in ambient coordinates.
pub fn singular_points(param: &FamilyParameter) -> Result<Vec<Vec3>, FamilyError> {
    let Some(prof) = translated_profile(param) else {
        return Ok(Vec::new());
    };
    if is_line_pair(&prof) {
        return Err(FamilyError::SingularLine);
    }
    if prof.a5 == 0.0 {
        return Ok(Vec::new());
    }
    let cubic = prof.classify();
    let qt = param.rot.matrix().transpose();
    Ok(cubic
        .multiple_roots()
        .map(|z| qt * Vec3::new(prof.center.0, prof.center.1, z))
        .filter(|x| x.norm() <= 1.0 + 1e-12)
        .collect())
}

/// When the member is a pair of planes crossing in a line, the two planes as
/// separate family members (same rotation).
pub fn plane_pair(param: &FamilyParameter) -> Option<[FamilyParameter; 2]> {
    let prof = translated_profile(param)?;
    if !is_line_pair(&prof) {
        return None;
    }
    let (c1, c2) = prof.center;
    // (y1 − c1)² − (y2 − c2)² = (y1 − y2 − c1 + c2)(y1 + y2 − c1 − c2)
    let first = ProjectivePoint4::new([0.0, 1.0, -1.0, 0.0, c2 - c1]).ok()?;
    let second = ProjectivePoint4::new([0.0, 1.0, 1.0, 0.0, -c1 - c2]).ok()?;
    Some([
        FamilyParameter { proj: first, a5: 0.0, rot: param.rot },
        FamilyParameter { proj: second, a5: 0.0, rot: param.rot },
    ])
}
