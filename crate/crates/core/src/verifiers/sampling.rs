//! Scrambled Sobol points mapped to the parameter space.

use crate::family_core::{quotient_representative, FamilyParameter, ProjectivePoint4, Rotation3};
use statrs::distribution::{ContinuousCDF, Normal};

/// Quasi-random parameters: 5 Gaussian coordinates for `a ∈ S⁴` and 4 for a
/// unit quaternion, each from an Owen-scrambled Sobol dimension.
#[derive(Debug, Clone)]
pub struct ParameterSampler {
    seed: u32,
    normal: Normal,
}

impl ParameterSampler {
    pub fn new(seed: u64) -> Self {
        Self { seed: (seed ^ (seed >> 32)) as u32, normal: Normal::new(0.0, 1.0).unwrap() }
    }

    fn gaussian(&self, index: usize, dim: u32) -> f64 {
        let u = sobol_burley::sample(index as u32, dim, self.seed) as f64;
        self.normal.inverse_cdf(u.clamp(1e-12, 1.0 - 1e-12))
    }

    /// Raw `(a, Q)` at index `i`, not reduced by the group.
    pub fn raw(&self, i: usize, a5: f64) -> FamilyParameter {
        let mut a: [f64; 5] = std::array::from_fn(|k| self.gaussian(i, k as u32));
        if a.iter().all(|v| *v == 0.0) {
            a[0] = 1.0;
        }
        let q: [f64; 4] = std::array::from_fn(|k| self.gaussian(i, 5 + k as u32));
        let q = if q.iter().all(|v| *v == 0.0) { [1.0, 0.0, 0.0, 0.0] } else { q };
        let proj = ProjectivePoint4::new(a).expect("nonzero");
        FamilyParameter::new(proj, a5, Rotation3::from_quaternion(q).expect("nonzero")).expect("a5 in range")
    }

    /// The quotient representative of [`Self::raw`].
    pub fn quotient(&self, i: usize, a5: f64) -> FamilyParameter {
        quotient_representative(&self.raw(i, a5))
    }
}

/// Geodesic distance on `ℝP⁴` between the classes of `a` and `b`.
pub fn projective_distance(a: &[f64; 5], b: &[f64; 5]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot.abs() / (na * nb)).min(1.0).acos()
}
