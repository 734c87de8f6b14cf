//! The saddle polynomial family, its D₂ symmetry and singularity analysis.
//!
//! A member is `p(Q·x)` with
//! `p(y) = a0·(y1² − y2² + a5·y3³) + a1·y1 + a2·y2 + a3·y3 + a4`,
//! where `[a0:…:a4]` is a point of ℝP⁴, `a5 ∈ [0,1]` is the cubic perturbation
//! strength and `Q ∈ SO(3)`.

mod cubic;
mod group;
mod singular;

pub use cubic::{classify_cubic, sturm_root_count, CubicKind, CubicProfile, CubicRoot};
pub use group::{d2_act, param_hash, quotient_representative, verify_equivariance, verify_equivariance_with, GroupElement};
pub use singular::{plane_pair, singular_points, translated_profile, TranslatedProfile};

use nalgebra::{Matrix3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("projective point has zero homogeneous coordinates")]
    ZeroVector,
    #[error("matrix is not a rotation (orthogonality defect {orth:e}, det {det})")]
    InvalidRotation { orth: f64, det: f64 },
    #[error("perturbation strength a5 = {0} is outside [0, 1]")]
    A5OutOfRange(f64),
    #[error("singular set is a line (intersecting planes), not isolated points")]
    SingularLine,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Anything with an exact value, gradient and Hessian in ambient coordinates.
pub trait ImplicitSurface: Sync {
    fn value(&self, x: &Vec3) -> f64;
    fn gradient(&self, x: &Vec3) -> Vec3;
    fn hessian(&self, x: &Vec3) -> Mat3;
}

impl<T: ImplicitSurface + ?Sized> ImplicitSurface for &T {
    fn value(&self, x: &Vec3) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &Vec3) -> Vec3 {
        (**self).gradient(x)
    }
    fn hessian(&self, x: &Vec3) -> Mat3 {
        (**self).hessian(x)
    }
}

/// Canonical representative of a point of ℝP⁴: unit norm, first nonzero
/// coordinate positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 5]", into = "[f64; 5]")]
pub struct ProjectivePoint4 {
    a: [f64; 5],
}

/// Coordinates at or below this magnitude are skipped when choosing the sign.
const SIGN_ZERO: f64 = 1e-14;

impl ProjectivePoint4 {
    pub fn new(raw: [f64; 5]) -> Result<Self, FamilyError> {
        canonicalize(raw).map(|a| Self { a }).ok_or(FamilyError::ZeroVector)
    }

    pub fn coords(&self) -> [f64; 5] {
        self.a
    }

    pub fn apex() -> Self {
        Self { a: [1.0, 0.0, 0.0, 0.0, 0.0] }
    }

    /// Chordal distance on ℝP⁴: `min(|a − b|, |a + b|)` of unit representatives.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut dm = 0.0;
        let mut dp = 0.0;
        for i in 0..5 {
            dm += (self.a[i] - other.a[i]).powi(2);
            dp += (self.a[i] + other.a[i]).powi(2);
        }
        dm.min(dp).sqrt()
    }
}

impl TryFrom<[f64; 5]> for ProjectivePoint4 {
    type Error = FamilyError;
    fn try_from(raw: [f64; 5]) -> Result<Self, FamilyError> {
        Self::new(raw)
    }
}

impl From<ProjectivePoint4> for [f64; 5] {
    fn from(p: ProjectivePoint4) -> [f64; 5] {
        p.a
    }
}

/// Unit norm and first nonzero coordinate positive. Returns `None` for the zero
/// vector or non-finite input.
pub fn canonicalize(raw: [f64; 5]) -> Option<[f64; 5]> {
    if raw.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let mut a = raw;
    // Leave already-normalized input untouched so that signed permutations of a
    // canonical vector stay bit-exact.
    if (norm - 1.0).abs() > 4.0 * f64::EPSILON {
        for v in a.iter_mut() {
            *v /= norm;
        }
    }
    let lead = a.iter().copied().find(|v| v.abs() > SIGN_ZERO).unwrap_or(a[0]);
    if lead < 0.0 {
        for v in a.iter_mut() {
            *v = -*v;
        }
    }
    for v in a.iter_mut() {
        if *v == 0.0 {
            *v = 0.0; // drop negative zeros
        }
    }
    Some(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct Rotation3 {
    q: Mat3,
}

impl Rotation3 {
    pub const TOL: f64 = 1e-12;

    pub fn new(q: Mat3) -> Result<Self, FamilyError> {
        let orth = (q.transpose() * q - Mat3::identity()).abs().max();
        let det = q.determinant();
        if !(orth <= Self::TOL) || !((det - 1.0).abs() <= Self::TOL) {
            return Err(FamilyError::InvalidRotation { orth, det });
        }
        Ok(Self { q })
    }

    pub fn identity() -> Self {
        Self { q: Mat3::identity() }
    }

    /// Rotation of the unit quaternion `(w, x, y, z)` after normalization.
    pub fn from_quaternion(q: [f64; 4]) -> Result<Self, FamilyError> {
        let quat = nalgebra::Quaternion::new(q[0], q[1], q[2], q[3]);
        if !(quat.norm() > 0.0) || !quat.norm().is_finite() {
            return Err(FamilyError::InvalidRotation { orth: f64::NAN, det: f64::NAN });
        }
        let unit = UnitQuaternion::from_quaternion(quat);
        Ok(Self { q: unit.to_rotation_matrix().into_inner() })
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.q
    }

    pub fn apply(&self, x: &Vec3) -> Vec3 {
        self.q * x
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Rotation3) -> Rotation3 {
        Rotation3 { q: self.q * other.q }
    }

    pub fn row_major(&self) -> [f64; 9] {
        let m = &self.q;
        [m[(0, 0)], m[(0, 1)], m[(0, 2)], m[(1, 0)], m[(1, 1)], m[(1, 2)], m[(2, 0)], m[(2, 1)], m[(2, 2)]]
    }

    pub(crate) fn from_matrix_unchecked(q: Mat3) -> Self {
        Self { q }
    }
}

impl TryFrom<[[f64; 3]; 3]> for Rotation3 {
    type Error = FamilyError;
    fn try_from(rows: [[f64; 3]; 3]) -> Result<Self, FamilyError> {
        Rotation3::new(Mat3::from_fn(|i, j| rows[i][j]))
    }
}

impl From<Rotation3> for [[f64; 3]; 3] {
    fn from(r: Rotation3) -> Self {
        let m = r.q;
        [[m[(0, 0)], m[(0, 1)], m[(0, 2)]], [m[(1, 0)], m[(1, 1)], m[(1, 2)]], [m[(2, 0)], m[(2, 1)], m[(2, 2)]]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParameter {
    pub proj: ProjectivePoint4,
    pub a5: f64,
    pub rot: Rotation3,
}

/// Replacement for the cubic block used by the negative control of the
/// equivariance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Perturbation {
    #[default]
    None,
    /// `a5·z³` replaced by `a5·z²`, which is not invariant under `z ↦ −z`.
    ZSquared,
}

impl FamilyParameter {
    pub fn new(proj: ProjectivePoint4, a5: f64, rot: Rotation3) -> Result<Self, FamilyError> {
        if !(0.0..=1.0).contains(&a5) {
            return Err(FamilyError::A5OutOfRange(a5));
        }
        Ok(Self { proj, a5, rot })
    }

    /// Convenience constructor from raw homogeneous coordinates, identity rotation.
    pub fn from_coords(raw: [f64; 5], a5: f64) -> Result<Self, FamilyError> {
        Self::new(ProjectivePoint4::new(raw)?, a5, Rotation3::identity())
    }

    pub fn with_rotation(self, rot: Rotation3) -> Self {
        Self { rot, ..self }
    }

    /// Value of the unrotated polynomial at `y`.
    pub fn eval_local(&self, y: &Vec3, pert: Perturbation) -> f64 {
        let a = self.proj.coords();
        let cubic = match pert {
            Perturbation::None => self.a5 * y.z * y.z * y.z,
            Perturbation::ZSquared => self.a5 * y.z * y.z,
        };
        a[0] * (y.x * y.x - y.y * y.y + cubic) + a[1] * y.x + a[2] * y.y + a[3] * y.z + a[4]
    }
}

/// `p(Q·x)`.
pub fn eval(param: &FamilyParameter, x: &Vec3) -> f64 {
    eval_with(param, x, Perturbation::None)
}

pub fn eval_with(param: &FamilyParameter, x: &Vec3, pert: Perturbation) -> f64 {
    param.eval_local(&param.rot.apply(x), pert)
}

/// `Qᵀ ∇p(Q·x)`.
pub fn gradient(param: &FamilyParameter, x: &Vec3) -> Vec3 {
    let a = param.proj.coords();
    let y = param.rot.apply(x);
    let gy = Vec3::new(
        2.0 * a[0] * y.x + a[1],
        -2.0 * a[0] * y.y + a[2],
        3.0 * a[0] * param.a5 * y.z * y.z + a[3],
    );
    param.rot.matrix().transpose() * gy
}

/// `Qᵀ Hess p(Q·x) Q`.
pub fn hessian(param: &FamilyParameter, x: &Vec3) -> Mat3 {
    let a = param.proj.coords();
    let y = param.rot.apply(x);
    let hy = Mat3::from_diagonal(&Vec3::new(2.0 * a[0], -2.0 * a[0], 6.0 * a[0] * param.a5 * y.z));
    let q = param.rot.matrix();
    q.transpose() * hy * q
}

impl ImplicitSurface for FamilyParameter {
    fn value(&self, x: &Vec3) -> f64 {
        eval(self, x)
    }
    fn gradient(&self, x: &Vec3) -> Vec3 {
        gradient(self, x)
    }
    fn hessian(&self, x: &Vec3) -> Mat3 {
        hessian(self, x)
    }
}

/// The translated, scaled family
/// `(x − b1)² − (y − b2)² + s·(b3·z + b4 + b5·z³)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phi5Surface {
    pub b: [f64; 5],
    pub s: f64,
}

impl Phi5Surface {
    pub fn new(b: [f64; 5], s: f64) -> Self {
        Self { b, s }
    }

    /// The opening profile `φ(z) = b3·z + b4 + b5·z³`; the surface opens by `s·φ`.
    pub fn profile(&self, z: f64) -> f64 {
        self.b[2] * z + self.b[3] + self.b[4] * z * z * z
    }

    pub fn profile_derivative(&self, z: f64) -> f64 {
        self.b[2] + 3.0 * self.b[4] * z * z
    }

    /// The same zero set as a member of the saddle family (identity rotation).
    /// Fails when `s·b5` exceeds the family's perturbation range.
    pub fn to_family(&self) -> Result<FamilyParameter, FamilyError> {
        let [b1, b2, b3, b4, b5] = self.b;
        let s = self.s;
        let a5 = s * b5;
        if !(0.0..=1.0).contains(&a5) {
            return Err(FamilyError::A5OutOfRange(a5));
        }
        let raw = [1.0, -2.0 * b1, 2.0 * b2, s * b3, b1 * b1 - b2 * b2 + s * b4];
        FamilyParameter::from_coords(raw, a5)
    }
}

impl ImplicitSurface for Phi5Surface {
    fn value(&self, x: &Vec3) -> f64 {
        let dx = x.x - self.b[0];
        let dy = x.y - self.b[1];
        dx * dx - dy * dy + self.s * self.profile(x.z)
    }
    fn gradient(&self, x: &Vec3) -> Vec3 {
        Vec3::new(2.0 * (x.x - self.b[0]), -2.0 * (x.y - self.b[1]), self.s * self.profile_derivative(x.z))
    }
    fn hessian(&self, x: &Vec3) -> Mat3 {
        Mat3::from_diagonal(&Vec3::new(2.0, -2.0, 6.0 * self.s * self.b[4] * x.z))
    }
}

/// `∂p/∂s = b3·z + b4 + b5·z³`, independent of `s`.
pub fn ds_partial(surface: &Phi5Surface, x: &Vec3) -> f64 {
    surface.profile(x.z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_param(rng: &mut ChaCha8Rng) -> FamilyParameter {
        let raw: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let q: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        FamilyParameter::new(ProjectivePoint4::new(raw).unwrap(), rng.gen_range(0.0..=1.0), Rotation3::from_quaternion(q).unwrap())
            .unwrap()
    }

    #[test]
    fn eval_examples() {
        let apex = FamilyParameter::from_coords([1.0, 0.0, 0.0, 0.0, 0.0], 0.0).unwrap();
        assert_eq!(eval(&apex, &Vec3::new(1.0, 1.0, 0.0)), 0.0);
        let cubic = FamilyParameter::from_coords([1.0, 0.0, 0.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(eval(&cubic, &Vec3::new(0.0, 0.0, 1.0)), 1.0);
        let plane = FamilyParameter::from_coords([0.0, 0.0, 0.0, 1.0, 1.0], 0.0).unwrap();
        assert!(eval(&plane, &Vec3::new(0.0, 0.0, -1.0)).abs() < 1e-15);
    }

    #[test]
    fn saddle_derivatives_at_origin() {
        let saddle = Phi5Surface::new([0.0, 0.0, 1.0, 0.0, 0.0], 1.0);
        let o = Vec3::zeros();
        assert_eq!(saddle.gradient(&o), Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(saddle.hessian(&o), Mat3::from_diagonal(&Vec3::new(2.0, -2.0, 0.0)));
        let cube = Phi5Surface::new([0.0, 0.0, 0.0, 0.0, 1.0], 1.0);
        assert_eq!(ds_partial(&cube, &Vec3::new(0.0, 0.0, 1.0)), 1.0);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-5;
        let mut worst_g: f64 = 0.0;
        let mut worst_h: f64 = 0.0;
        for _ in 0..100 {
            let p = random_param(&mut rng);
            let x = Vec3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let g = gradient(&p, &x);
            let hs = hessian(&p, &x);
            for k in 0..3 {
                let mut e = Vec3::zeros();
                e[k] = h;
                let fd = (eval(&p, &(x + e)) - eval(&p, &(x - e))) / (2.0 * h);
                worst_g = worst_g.max((fd - g[k]).abs());
                let col = (gradient(&p, &(x + e)) - gradient(&p, &(x - e))) / (2.0 * h);
                worst_h = worst_h.max((col - hs.column(k)).abs().max());
            }
        }
        assert!(worst_g < 1e-6, "gradient deviation {worst_g}");
        assert!(worst_h < 1e-6, "hessian deviation {worst_h}");
    }

    #[test]
    fn phi5_derivatives_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let h = 1e-5;
        for _ in 0..100 {
            let b: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let s = rng.gen_range(0.0..1.0);
            let surf = Phi5Surface::new(b, s);
            let x = Vec3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let g = surf.gradient(&x);
            for k in 0..3 {
                let mut e = Vec3::zeros();
                e[k] = h;
                let fd = (surf.value(&(x + e)) - surf.value(&(x - e))) / (2.0 * h);
                assert!((fd - g[k]).abs() < 1e-6);
                let col = (surf.gradient(&(x + e)) - surf.gradient(&(x - e))) / (2.0 * h);
                assert!((col - surf.hessian(&x).column(k)).abs().max() < 1e-6);
            }
            let ds = (Phi5Surface::new(b, s + h).value(&x) - Phi5Surface::new(b, s - h).value(&x)) / (2.0 * h);
            assert!((ds - ds_partial(&surf, &x)).abs() < 1e-6);
        }
    }

    #[test]
    fn phi5_embeds_in_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let b: [f64; 5] = [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0)];
            let surf = Phi5Surface::new(b, rng.gen_range(0.0..1.0));
            let fam = surf.to_family().unwrap();
            let raw_norm = {
                let raw = [1.0, -2.0 * b[0], 2.0 * b[1], surf.s * b[2], b[0] * b[0] - b[1] * b[1] + surf.s * b[3]];
                raw.iter().map(|v| v * v).sum::<f64>().sqrt()
            };
            let x = Vec3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            assert!((eval(&fam, &x) * raw_norm - surf.value(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_validation() {
        assert!(Rotation3::new(Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0))).is_err());
        assert!(Rotation3::new(Mat3::identity() * 1.01).is_err());
        let r = Rotation3::from_quaternion([0.3, -0.1, 0.7, 0.2]).unwrap();
        assert!(Rotation3::new(*r.matrix()).is_ok());
    }

    #[test]
    fn canonical_examples() {
        let p = ProjectivePoint4::new([-2.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.coords(), [1.0, 0.0, 0.0, 0.0, 0.0]);
        let q = ProjectivePoint4::new([0.0, -3.0, 4.0, 0.0, 0.0]).unwrap();
        assert_eq!(q.coords(), [0.0, 0.6, -0.8, 0.0, 0.0]);
        assert!(ProjectivePoint4::new([0.0; 5]).is_err());
        assert!(FamilyParameter::from_coords([1.0, 0.0, 0.0, 0.0, 0.0], 1.5).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let p = random_param(&mut rng);
        let text = serde_json::to_string(&p).unwrap();
        let back: FamilyParameter = serde_json::from_str(&text).unwrap();
        assert_eq!(p, back);
    }
}
