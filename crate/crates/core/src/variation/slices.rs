//! Surface integrals over `Σ_s ∩ D` by horizontal slicing.
//!
//! With `X = x − b1`, `Y = y − b2` and `κ(z) = −s·φ(z)` the slice of `Σ_s` at
//! height `z` is the hyperbola `X² − Y² = κ`. For `κ > 0` its branches are
//! `X = ±√κ cosh v, Y = √κ sinh v` (swap `X`, `Y` for `κ < 0`), and the area
//! element is `dA = √(|κ| cosh 2v + κ′²/4) dv dz`. At `s = 0` the slices are
//! the two lines `X = ±Y`, parametrized by arc length.
//!
//! The `z` integral uses tanh-sinh panels split at the roots of `φ`, where
//! branches degenerate, and at heights where a branch stops meeting the
//! domain.
//! Panels are bisected until the `n`/`2n` node estimates agree.

use crate::family_core::{classify_cubic, Phi5Surface, Vec3};
use crate::quadrature::{refine_root, GaussRule, TanhSinhRule};
use crate::surface_mesh::DomainSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceResolution {
    /// Tanh-sinh nodes per half panel in `z` (the error check uses twice this).
    pub z_nodes: usize,
    /// Gauss-Legendre nodes per `v` panel.
    pub v_gauss: usize,
    /// Largest `v` panel width.
    pub v_panel: f64,
    /// Sampling step in `v` used to locate where a branch leaves the domain.
    pub v_sample: f64,
    /// Panel acceptance tolerance relative to `∫|f|`.
    pub rel_tol: f64,
    /// Bisection depth limit for `z` panels.
    pub max_depth: u32,
}

impl Default for SliceResolution {
    fn default() -> Self {
        Self { z_nodes: 24, v_gauss: 12, v_panel: 0.5, v_sample: 0.05, rel_tol: 1e-10, max_depth: 12 }
    }
}

/// Integral values with per-component error estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceIntegral<const K: usize> {
    pub value: [f64; K],
    pub error: [f64; K],
    /// `∫|f|`, the scale the tolerance refers to.
    pub magnitude: [f64; K],
    pub panels: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Branch {
    /// Hyperbola branch; `along_x` for `κ > 0`, `sign` selects the half.
    Hyperbola { along_x: bool, sign: f64 },
    /// Line `Y = slope·X` (the `s = 0` planes).
    Line { slope: f64 },
}

pub(crate) struct Slicer<'a> {
    pub surf: &'a Phi5Surface,
    pub domain: &'a DomainSpec,
    pub res: SliceResolution,
    gauss: GaussRule,
    /// Horizontal reach beyond which no branch point can be inside the domain.
    reach: f64,
}

impl<'a> Slicer<'a> {
    pub fn new(surf: &'a Phi5Surface, domain: &'a DomainSpec, res: SliceResolution) -> Self {
        let ext = domain.half_extents();
        let reach = ext.x.max(ext.y) * std::f64::consts::SQRT_2 + surf.b[0].hypot(surf.b[1]) + 0.05;
        Self { surf, domain, res, gauss: GaussRule::new(res.v_gauss), reach }
    }

    fn kappa(&self, z: f64) -> (f64, f64) {
        (-self.surf.s * self.surf.profile(z), -self.surf.s * self.surf.profile_derivative(z))
    }

    fn branches(&self, kappa: f64) -> Vec<Branch> {
        if self.surf.s == 0.0 {
            return vec![Branch::Line { slope: 1.0 }, Branch::Line { slope: -1.0 }];
        }
        if kappa == 0.0 {
            return Vec::new();
        }
        let along_x = kappa > 0.0;
        vec![Branch::Hyperbola { along_x, sign: 1.0 }, Branch::Hyperbola { along_x, sign: -1.0 }]
    }

    fn point(&self, z: f64, kappa: f64, branch: Branch, v: f64) -> Vec3 {
        let (dx, dy) = match branch {
            Branch::Hyperbola { along_x, sign } => {
                let r = kappa.abs().sqrt();
                let (c, s) = (r * v.cosh(), r * v.sinh());
                if along_x {
                    (sign * c, s)
                } else {
                    (s, sign * c)
                }
            }
            Branch::Line { slope } => (v * std::f64::consts::FRAC_1_SQRT_2, slope * v * std::f64::consts::FRAC_1_SQRT_2),
        };
        Vec3::new(self.surf.b[0] + dx, self.surf.b[1] + dy, z)
    }

    fn jacobian(kappa: f64, dkappa: f64, branch: Branch, v: f64) -> f64 {
        match branch {
            Branch::Hyperbola { .. } => (kappa.abs() * (2.0 * v).cosh() + 0.25 * dkappa * dkappa).sqrt(),
            Branch::Line { .. } => 1.0,
        }
    }

    fn v_max(&self, kappa: f64, branch: Branch) -> Option<f64> {
        match branch {
            Branch::Hyperbola { .. } => {
                let ratio = self.reach * self.reach / kappa.abs();
                (ratio > 1.0).then(|| 0.5 * ratio.acosh())
            }
            Branch::Line { .. } => Some(self.reach),
        }
    }

    fn sample_grid(&self, kappa: f64, branch: Branch) -> Option<Vec<f64>> {
        let vm = self.v_max(kappa, branch)?;
        let step = match branch {
            Branch::Hyperbola { .. } => self.res.v_sample,
            Branch::Line { .. } => self.res.v_sample * 0.2,
        };
        let n = ((2.0 * vm / step).ceil() as usize).max(4);
        Some((0..=n).map(|i| -vm + 2.0 * vm * i as f64 / n as f64).collect())
    }

    /// Golden-section refinement of a sampled local minimum of `g` on `[a, b]`.
    fn refine_min(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        let (mut gc, mut gd) = (g(c), g(d));
        for _ in 0..80 {
            if (b - a).abs() <= 1e-13 * (1.0 + a.abs()) {
                break;
            }
            if gc < gd {
                b = d;
                d = c;
                gd = gc;
                c = b - r * (b - a);
                gc = g(c);
            } else {
                a = c;
                c = d;
                gc = gd;
                d = a + r * (b - a);
                gd = g(d);
            }
        }
        if gc < gd {
            (c, gc)
        } else {
            (d, gd)
        }
    }

    /// Parameter intervals of `branch` inside the domain at height `z`.
    /// Sign changes between samples are refined; local minima above zero are
    /// refined too, so short chords between samples are not lost.
    fn intervals(&self, z: f64, kappa: f64, branch: Branch) -> Vec<(f64, f64)> {
        let Some(grid) = self.sample_grid(kappa, branch) else {
            return Vec::new();
        };
        let level = |v: f64| self.domain.level(&self.point(z, kappa, branch, v));
        let mut vs: Vec<f64> = Vec::with_capacity(grid.len() + 4);
        let mut ls: Vec<f64> = Vec::with_capacity(grid.len() + 4);
        for (i, &v) in grid.iter().enumerate() {
            let l = level(v);
            // a positive local minimum hides a possible short interval
            if i >= 2 && ls[ls.len() - 1] > 0.0 && ls[ls.len() - 1] <= ls[ls.len() - 2] && ls[ls.len() - 1] <= l {
                let (vmin, lmin) = Self::refine_min(level, vs[vs.len() - 2], v);
                if lmin <= 0.0 {
                    let (vl, ll) = (vs.pop().unwrap(), ls.pop().unwrap());
                    if vmin < vl {
                        vs.push(vmin);
                        ls.push(lmin);
                        vs.push(vl);
                        ls.push(ll);
                    } else {
                        vs.push(vl);
                        ls.push(ll);
                        vs.push(vmin);
                        ls.push(lmin);
                    }
                }
            }
            vs.push(v);
            ls.push(l);
        }
        let mut out = Vec::new();
        let mut start = (ls[0] <= 0.0).then_some(vs[0]);
        for i in 1..vs.len() {
            let (pv, pl, v, l) = (vs[i - 1], ls[i - 1], vs[i], ls[i]);
            if (l <= 0.0) != (pl <= 0.0) {
                let root = refine_root(pv, v, pl, l, level, 1e-14 * (1.0 + v.abs()));
                if l <= 0.0 {
                    start = Some(root);
                } else if let Some(a) = start.take() {
                    if root > a {
                        out.push((a, root));
                    }
                }
            }
        }
        if let Some(a) = start {
            out.push((a, vs[vs.len() - 1]));
        }
        out
    }

    /// Smallest domain level along `branch` at height `z`.
    fn min_level(&self, z: f64, branch_sign: f64) -> f64 {
        let (k, _) = self.kappa(z);
        let br = if self.surf.s == 0.0 {
            Branch::Line { slope: branch_sign }
        } else if k == 0.0 {
            return -1.0;
        } else {
            Branch::Hyperbola { along_x: k > 0.0, sign: branch_sign }
        };
        let Some(grid) = self.sample_grid(k, br) else {
            return 1.0;
        };
        let level = |v: f64| self.domain.level(&self.point(z, k, br, v));
        let ls: Vec<f64> = grid.iter().map(|&v| level(v)).collect();
        let i = (0..ls.len()).min_by(|&a, &b| ls[a].total_cmp(&ls[b])).unwrap();
        let a = grid[i.saturating_sub(1)];
        let b = grid[(i + 1).min(grid.len() - 1)];
        Self::refine_min(level, a, b).1.min(ls[i])
    }

    /// Points where the slice at `z` leaves the domain, i.e. on `∂Σ`.
    pub fn boundary_points(&self, z: f64) -> Vec<Vec3> {
        let (k, _) = self.kappa(z);
        let mut pts = Vec::new();
        for br in self.branches(k) {
            for (a, b) in self.intervals(z, k, br) {
                pts.push(self.point(z, k, br, a));
                pts.push(self.point(z, k, br, b));
            }
        }
        pts
    }

    /// `∫ f dℓ/|∇ₕz|` over the slice at height `z`, with `∫|f|` alongside.
    fn slice<const K: usize>(&self, z: f64, f: &impl Fn(&Vec3) -> [f64; K]) -> ([f64; K], [f64; K]) {
        let (k, dk) = self.kappa(z);
        let mut val = [0.0; K];
        let mut abs = [0.0; K];
        for br in self.branches(k) {
            for (a, b) in self.intervals(z, k, br) {
                let mut cuts = vec![a];
                if a < 0.0 && b > 0.0 {
                    cuts.push(0.0);
                }
                cuts.push(b);
                for w in cuts.windows(2) {
                    let (lo, hi) = (w[0], w[1]);
                    let m = ((hi - lo) / self.res.v_panel).ceil().max(1.0) as usize;
                    for j in 0..m {
                        let p0 = lo + (hi - lo) * j as f64 / m as f64;
                        let p1 = lo + (hi - lo) * (j + 1) as f64 / m as f64;
                        for (v, wt) in self.gauss.mapped(p0, p1) {
                            let x = self.point(z, k, br, v);
                            let jw = wt * Self::jacobian(k, dk, br, v);
                            let fx = f(&x);
                            for c in 0..K {
                                val[c] += jw * fx[c];
                                abs[c] += jw * fx[c].abs();
                            }
                        }
                    }
                }
            }
        }
        (val, abs)
    }

    fn z_breakpoints(&self) -> Vec<f64> {
        let zmax = self.domain.half_extents().z;
        let mut pts = vec![-zmax, zmax];
        if self.surf.s > 0.0 {
            let [_, _, b3, b4, b5] = self.surf.b;
            if (b3, b4, b5) != (0.0, 0.0, 0.0) {
                for r in classify_cubic(b3, b4, b5).roots {
                    if r.z.abs() < zmax {
                        pts.push(r.z);
                    }
                }
            }
        }
        pts.sort_by(f64::total_cmp);
        // Heights where a branch stops meeting the domain.
        let mut extra = Vec::new();
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            for sign in [1.0, -1.0] {
                let n = 256;
                let mut pz = a + (b - a) / (2 * n) as f64;
                let mut pl = self.min_level(pz, sign);
                for i in 1..n {
                    let z = a + (b - a) * (i as f64 + 0.5) / n as f64;
                    let l = self.min_level(z, sign);
                    if (l <= 0.0) != (pl <= 0.0) {
                        extra.push(refine_root(pz, z, pl, l, |zz| self.min_level(zz, sign), 1e-15));
                    }
                    pz = z;
                    pl = l;
                }
            }
        }
        pts.extend(extra);
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        pts
    }

    /// `∫_{Σ∩D} f dA` for `K` integrands at once.
    pub fn integrate<const K: usize>(&self, f: impl Fn(&Vec3) -> [f64; K]) -> SliceIntegral<K> {
        let coarse = TanhSinhRule::new(self.res.z_nodes);
        let fine = TanhSinhRule::new(2 * self.res.z_nodes);
        let bps = self.z_breakpoints();
        let total_len = bps[bps.len() - 1] - bps[0];

        let eval = |rule: &TanhSinhRule, a: f64, b: f64| {
            let mut v = [0.0; K];
            let mut m = [0.0; K];
            for (z, w) in rule.mapped(a, b) {
                let (sv, sa) = self.slice(z, &f);
                for c in 0..K {
                    v[c] += w * sv[c];
                    m[c] += w * sa[c];
                }
            }
            (v, m)
        };

        // Global scale from a first pass over the breakpoint panels.
        let mut scale = [0.0; K];
        for w in bps.windows(2) {
            let (_, m) = eval(&coarse, w[0], w[1]);
            for c in 0..K {
                scale[c] += m[c];
            }
        }

        let mut out = SliceIntegral { value: [0.0; K], error: [0.0; K], magnitude: [0.0; K], panels: 0 };
        let mut stack: Vec<(f64, f64, u32)> = bps.windows(2).rev().map(|w| (w[0], w[1], 0)).collect();
        while let Some((a, b, depth)) = stack.pop() {
            let (q1, _) = eval(&coarse, a, b);
            let (q2, m2) = eval(&fine, a, b);
            let share = (b - a) / total_len;
            let ok = (0..K).all(|c| (q2[c] - q1[c]).abs() <= self.res.rel_tol * m2[c].max(scale[c] * share));
            if ok || depth >= self.res.max_depth {
                for c in 0..K {
                    out.value[c] += q2[c];
                    out.error[c] += (q2[c] - q1[c]).abs();
                    out.magnitude[c] += m2[c];
                }
                out.panels += 1;
            } else {
                let mid = 0.5 * (a + b);
                stack.push((mid, b, depth + 1));
                stack.push((a, mid, depth + 1));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variation::build_omega;
    use std::f64::consts::PI;

    #[test]
    fn crossing_planes_in_the_ball() {
        let surf = Phi5Surface::new([0.0; 5], 0.0);
        let sl = Slicer::new(&surf, &DomainSpec::UnitBall, SliceResolution::default());
        let a = sl.integrate(|_| [1.0]);
        assert!((a.value[0] - 2.0 * PI).abs() < 1e-9, "{a:?}");
    }

    #[test]
    fn offset_planes_in_the_ball() {
        // planes through (b1, b2, ·) at distance d = |b1 ∓ b2|/√2 from the origin
        let (b1, b2) = (0.2, -0.1);
        let surf = Phi5Surface::new([b1, b2, 0.0, 0.0, 0.0], 0.0);
        let sl = Slicer::new(&surf, &DomainSpec::UnitBall, SliceResolution::default());
        let a = sl.integrate(|_| [1.0]);
        let d1 = (b1 - b2) / 2f64.sqrt();
        let d2 = (b1 + b2) / 2f64.sqrt();
        let exact = PI * (1.0 - d1 * d1) + PI * (1.0 - d2 * d2);
        assert!((a.value[0] - exact).abs() < 1e-9, "{} vs {exact}", a.value[0]);
    }

    #[test]
    fn hyperbolic_cylinder_matches_mesh() {
        let surf = Phi5Surface::new([0.0, 0.0, 0.0, 1.0, 0.0], 0.05);
        let sl = Slicer::new(&surf, &DomainSpec::UnitBall, SliceResolution::default());
        let a = sl.integrate(|_| [1.0]);
        let mesh = crate::surface_mesh::area_estimate(
            &surf.to_family().unwrap(),
            &DomainSpec::UnitBall,
            96,
            crate::surface_mesh::MeshOptions::default(),
        )
        .unwrap();
        assert!((a.value[0] - mesh.value).abs() <= 2.0 * mesh.error_bound + 1e-4, "{} vs {mesh:?}", a.value[0]);
    }

    #[test]
    fn cubic_profile_matches_mesh() {
        let surf = Phi5Surface::new([0.01, -0.02, -0.6, 0.1, 1.0], 0.3);
        let sl = Slicer::new(&surf, &DomainSpec::UnitBall, SliceResolution::default());
        let a = sl.integrate(|_| [1.0]);
        assert!(a.error[0] < 1e-8, "{a:?}");
        let mesh = crate::surface_mesh::area_estimate(
            &surf.to_family().unwrap(),
            &DomainSpec::UnitBall,
            96,
            crate::surface_mesh::MeshOptions::default(),
        )
        .unwrap();
        let rich = mesh.richardson.unwrap();
        assert!((a.value[0] - rich).abs() <= mesh.error_bound, "{} vs {mesh:?}", a.value[0]);
    }

    #[test]
    fn omega_adds_cap_area() {
        let om = build_omega(0.0, 0.0, 2e-5, 1e-2, 1e-4).unwrap();
        let dom = DomainSpec::Omega(om.clone());
        let surf = Phi5Surface::new([0.0; 5], 0.0);
        let sl = Slicer::new(&surf, &dom, SliceResolution::default());
        let a = sl.integrate(|_| [1.0]);
        // each of the four pieces lies under the plateau height over a segment of length ≤ 4R
        let extra = a.value[0] - 2.0 * PI;
        assert!(extra > 0.0 && extra < 4.0 * 4.0 * om.r * (om.c - (1.0 - 4.0 * om.r * om.r).sqrt()), "{extra}");
    }
}
