//! The Klein four-group D₂ acting on ℝP⁴ × SO(3).

use super::{canonicalize, eval_with, FamilyParameter, Mat3, Perturbation, ProjectivePoint4, Rotation3, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupElement {
    Id,
    G1,
    G2,
    G1G2,
}

impl GroupElement {
    pub const ALL: [GroupElement; 4] = [GroupElement::Id, GroupElement::G1, GroupElement::G2, GroupElement::G1G2];

    pub fn matrix(self) -> [[i8; 3]; 3] {
        match self {
            GroupElement::Id => [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            GroupElement::G1 => [[0, 1, 0], [1, 0, 0], [0, 0, -1]],
            GroupElement::G2 => [[0, -1, 0], [-1, 0, 0], [0, 0, -1]],
            GroupElement::G1G2 => [[-1, 0, 0], [0, -1, 0], [0, 0, 1]],
        }
    }

    pub fn matrix_f64(self) -> Mat3 {
        let m = self.matrix();
        Mat3::from_fn(|i, j| m[i][j] as f64)
    }

    pub fn from_matrix(m: [[i8; 3]; 3]) -> Option<GroupElement> {
        Self::ALL.into_iter().find(|g| g.matrix() == m)
    }

    /// Product `self · other`, computed from the matrices.
    pub fn mul(self, other: GroupElement) -> GroupElement {
        let a = self.matrix();
        let b = other.matrix();
        let mut c = [[0i8; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        Self::from_matrix(c).expect("D2 is closed under multiplication")
    }

    pub fn inverse(self) -> GroupElement {
        self
    }

    /// Action on homogeneous coordinates, before canonicalization:
    /// `g1·a = (−a0, a2, a1, −a3, a4)`, `g2·a = (−a0, −a2, −a1, −a3, a4)`.
    pub fn act_on_coords(self, a: [f64; 5]) -> [f64; 5] {
        match self {
            GroupElement::Id => a,
            GroupElement::G1 => [-a[0], a[2], a[1], -a[3], a[4]],
            GroupElement::G2 => [-a[0], -a[2], -a[1], -a[3], a[4]],
            GroupElement::G1G2 => GroupElement::G1.act_on_coords(GroupElement::G2.act_on_coords(a)),
        }
    }
}

/// `g·(a, Q) = (g·a, g·Q)`, canonicalized.
pub fn d2_act(g: GroupElement, param: &FamilyParameter) -> FamilyParameter {
    let a = canonicalize(g.act_on_coords(param.proj.coords())).expect("action preserves nonzero vectors");
    let rot = Rotation3::from_matrix_unchecked(g.matrix_f64() * param.rot.matrix());
    FamilyParameter {
        proj: ProjectivePoint4::new(a).expect("canonical"),
        a5: param.a5,
        rot,
    }
}

pub fn verify_equivariance(param: &FamilyParameter, n_points: usize) -> bool {
    verify_equivariance_with(param, n_points, Perturbation::None)
}

/// For every `g`, checks on `n_points` random points of `[−1.5, 1.5]³` that
/// (i) the rotated members `p_{g·a}(gQx)` and `p_a(Qx)` agree and
/// (ii) the unrotated polynomials satisfy `p_{g·a}(y) = p_a(g⁻¹y)`,
/// each up to one global sign per `g` and within 1e−10.
pub fn verify_equivariance_with(param: &FamilyParameter, n_points: usize, pert: Perturbation) -> bool {
    assert!(n_points >= 1, "n_points must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_edd2);
    let points: Vec<Vec3> = (0..n_points).map(|_| Vec3::from_fn(|_, _| rng.gen_range(-1.5..1.5))).collect();
    GroupElement::ALL.iter().all(|&g| {
        let image = d2_act(g, param);
        let ginv = g.inverse().matrix_f64();
        let ambient = points.iter().map(|x| (eval_with(param, x, pert), eval_with(&image, x, pert)));
        let local = points.iter().map(|y| (param.eval_local(&(ginv * y), pert), image.eval_local(y, pert)));
        agree_up_to_sign(ambient.collect()) && agree_up_to_sign(local.collect())
    })
}

fn agree_up_to_sign(pairs: Vec<(f64, f64)>) -> bool {
    let anchor = pairs.iter().copied().max_by(|a, b| a.0.abs().total_cmp(&b.0.abs())).unwrap();
    let sign = if anchor.0 * anchor.1 < 0.0 { -1.0 } else { 1.0 };
    pairs.iter().all(|(u, v)| (v - sign * u).abs() <= 1e-10 * (1.0 + u.abs()))
}

fn lex_cmp(a: &FamilyParameter, b: &FamilyParameter) -> Ordering {
    let ka = a.proj.coords().into_iter().chain(a.rot.row_major());
    let kb = b.proj.coords().into_iter().chain(b.rot.row_major());
    for (x, y) in ka.zip(kb) {
        match x.total_cmp(&y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// The lexicographically smallest of the four orbit images (canonical `a`
/// first, then `Q` row-major).
pub fn quotient_representative(param: &FamilyParameter) -> FamilyParameter {
    GroupElement::ALL.iter().map(|&g| d2_act(g, param)).min_by(lex_cmp).unwrap()
}

/// Stable short hex digest of the quotient class, used in file names.
pub fn param_hash(param: &FamilyParameter) -> String {
    let rep = quotient_representative(param);
    let mut h = Sha256::new();
    for v in rep.proj.coords().into_iter().chain([rep.a5]).chain(rep.rot.row_major()) {
        // Round away the last few bits so that nearly identical classes share a name.
        h.update(format!("{:.12e};", v + 0.0).as_bytes());
    }
    hex::encode(&h.finalize()[..8])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn param(raw: [f64; 5], a5: f64, q: [f64; 4]) -> FamilyParameter {
        FamilyParameter::new(ProjectivePoint4::new(raw).unwrap(), a5, Rotation3::from_quaternion(q).unwrap()).unwrap()
    }

    fn arb_param() -> impl Strategy<Value = FamilyParameter> {
        (prop::array::uniform5(-1.0f64..1.0), 0.0f64..=1.0, prop::array::uniform4(-1.0f64..1.0)).prop_filter_map(
            "nonzero",
            |(raw, a5, q)| {
                let ok = raw.iter().any(|v| v.abs() > 1e-3) && q.iter().any(|v| v.abs() > 1e-3);
                ok.then(|| param(raw, a5, q))
            },
        )
    }

    #[test]
    fn action_examples() {
        let apex = FamilyParameter::from_coords([1.0, 0.0, 0.0, 0.0, 0.0], 0.0).unwrap();
        assert_eq!(d2_act(GroupElement::G1, &apex).proj.coords(), [1.0, 0.0, 0.0, 0.0, 0.0]);
        let e1 = FamilyParameter::from_coords([0.0, 1.0, 0.0, 0.0, 0.0], 0.0).unwrap();
        assert_eq!(d2_act(GroupElement::G1, &e1).proj.coords(), [0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn group_is_closed_and_abelian() {
        for g in GroupElement::ALL {
            assert_eq!(g.mul(g), GroupElement::Id);
            for h in GroupElement::ALL {
                assert_eq!(g.mul(h), h.mul(g));
            }
        }
        assert_eq!(GroupElement::G1.mul(GroupElement::G2), GroupElement::G1G2);
    }

    #[test]
    fn equivariance_examples() {
        let apex = FamilyParameter::from_coords([1.0, 0.0, 0.0, 0.0, 0.0], 0.0).unwrap();
        assert!(verify_equivariance(&apex, 64));
        let p = param([1.0, 0.3, -0.2, 0.5, 0.1], 0.7, [1.0, 0.0, 0.0, 0.0]);
        assert!(verify_equivariance(&p, 64));
        assert!(!verify_equivariance_with(&p, 64, Perturbation::ZSquared));
    }

    #[test]
    fn equivariance_polynomial_identity() {
        // Direct expansion: p_{g1 a}(y2, y1, −y3) equals p_a(y1, y2, y3) term by term.
        let a = [0.4, -0.3, 0.7, 0.2, -0.5];
        let a5 = 0.35;
        let p = |c: [f64; 5], y: [f64; 3]| c[0] * (y[0] * y[0] - y[1] * y[1] + a5 * y[2].powi(3)) + c[1] * y[0] + c[2] * y[1] + c[3] * y[2] + c[4];
        let g1a = [-a[0], a[2], a[1], -a[3], a[4]];
        let g2a = [-a[0], -a[2], -a[1], -a[3], a[4]];
        for y in [[0.1, 0.7, -0.3], [1.2, -0.4, 0.9], [-0.6, -0.2, 0.5]] {
            assert!((p(g1a, [y[1], y[0], -y[2]]) - p(a, y)).abs() < 1e-14);
            assert!((p(g2a, [-y[1], -y[0], -y[2]]) - p(a, y)).abs() < 1e-14);
        }
    }

    #[test]
    fn representative_is_orbit_invariant() {
        let p = param([0.2, -0.5, 0.1, 0.4, 0.3], 0.2, [0.3, 0.1, -0.8, 0.2]);
        let rep = quotient_representative(&p);
        for g in GroupElement::ALL {
            assert_eq!(quotient_representative(&d2_act(g, &p)), rep);
            assert_eq!(param_hash(&d2_act(g, &p)), param_hash(&p));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn canonicalization_is_idempotent(raw in prop::array::uniform5(-10.0f64..10.0)) {
            if let Some(c) = canonicalize(raw) {
                prop_assert_eq!(canonicalize(c), Some(c));
                let n: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                prop_assert!((n - 1.0).abs() < 1e-14);
            }
        }

        #[test]
        fn action_is_a_homomorphism(p in arb_param()) {
            for g in GroupElement::ALL {
                for h in GroupElement::ALL {
                    let lhs = d2_act(g.mul(h), &p);
                    let rhs = d2_act(g, &d2_act(h, &p));
                    prop_assert_eq!(lhs.proj, rhs.proj);
                    prop_assert!((lhs.rot.matrix() - rhs.rot.matrix()).abs().max() < 1e-15);
                }
            }
        }

        #[test]
        fn g2_is_an_involution(p in arb_param()) {
            let back = d2_act(GroupElement::G2, &d2_act(GroupElement::G2, &p));
            prop_assert_eq!(back.proj, p.proj);
            prop_assert!((back.rot.matrix() - p.rot.matrix()).abs().max() < 1e-15);
        }

        #[test]
        fn equivariance_holds(p in arb_param()) {
            prop_assert!(verify_equivariance(&p, 16));
        }
    }

    #[test]
    fn canonicalization_idempotent_ten_thousand() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let raw: [f64; 5] = std::array::from_fn(|_| rand::Rng::gen_range(&mut rng, -5.0..5.0));
            let c = canonicalize(raw).unwrap();
            assert_eq!(canonicalize(c), Some(c));
        }
    }
}
