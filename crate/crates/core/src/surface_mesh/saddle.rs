//! Area of the saddle `M = {x(s,t) = (s+t, s−t, 4st)}` inside balls.
//!
//! `M` is foliated by straight lines; its area element is
//! `|∂ₛx × ∂ₜx| = 2√(1 + 8s² + 8t²)`. The parametric area is integrated over
//! the preimage of the ball by recursive subdivision of the `(s,t)` box, with
//! interval bounds deciding which cells are inside, outside or straddling.

use super::AreaEstimate;
use crate::family_core::{FamilyParameter, Vec3};
use crate::quadrature::GaussRule;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug)]
struct Interval(f64, f64);

impl Interval {
    fn add(self, o: Interval) -> Interval {
        Interval(self.0 + o.0, self.1 + o.1)
    }
    fn shift(self, c: f64) -> Interval {
        Interval(self.0 + c, self.1 + c)
    }
    fn scale(self, k: f64) -> Interval {
        if k >= 0.0 {
            Interval(self.0 * k, self.1 * k)
        } else {
            Interval(self.1 * k, self.0 * k)
        }
    }
    fn mul(self, o: Interval) -> Interval {
        let c = [self.0 * o.0, self.0 * o.1, self.1 * o.0, self.1 * o.1];
        Interval(c.iter().copied().fold(f64::INFINITY, f64::min), c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }
    fn square(self) -> Interval {
        if self.0 >= 0.0 {
            Interval(self.0 * self.0, self.1 * self.1)
        } else if self.1 <= 0.0 {
            Interval(self.1 * self.1, self.0 * self.0)
        } else {
            Interval(0.0, (self.0 * self.0).max(self.1 * self.1))
        }
    }
}

fn jacobian(s: f64, t: f64) -> f64 {
    2.0 * (1.0 + 8.0 * s * s + 8.0 * t * t).sqrt()
}

fn embed(s: f64, t: f64) -> Vec3 {
    Vec3::new(s + t, s - t, 4.0 * s * t)
}

struct Integrator {
    center: Vec3,
    r2: f64,
    max_depth: u32,
    /// Inside cells larger than this are subdivided further before Gauss
    /// quadrature, so the area element is well resolved.
    max_inside_size: f64,
    rule: GaussRule,
}

impl Integrator {
    /// `|x(s,t) − c|² − R²`.
    fn excess(&self, s: f64, t: f64) -> f64 {
        (embed(s, t) - self.center).norm_squared() - self.r2
    }

    fn excess_gradient(&self, s: f64, t: f64) -> [f64; 2] {
        let d = embed(s, t) - self.center;
        [2.0 * (d.x + d.y + 4.0 * t * d.z), 2.0 * (d.x - d.y + 4.0 * s * d.z)]
    }

    fn excess_bounds(&self, s: Interval, t: Interval) -> Interval {
        let c = self.center;
        let u = s.add(t).shift(-c.x).square();
        let v = s.add(t.scale(-1.0)).shift(-c.y).square();
        let w = s.mul(t).scale(4.0).shift(-c.z).square();
        u.add(v).add(w).shift(-self.r2)
    }

    fn cell(&self, s0: f64, s1: f64, t0: f64, t1: f64, depth: u32) -> f64 {
        let b = self.excess_bounds(Interval(s0, s1), Interval(t0, t1));
        if b.0 > 0.0 {
            return 0.0;
        }
        let size = (s1 - s0).max(t1 - t0);
        let inside = b.1 <= 0.0;
        if inside && size <= self.max_inside_size {
            return self.rule.mapped(s0, s1).map(|(s, ws)| ws * self.rule.mapped(t0, t1).map(|(t, wt)| wt * jacobian(s, t)).sum::<f64>()).sum();
        }
        if depth >= self.max_depth && !inside {
            return self.straddling_leaf(s0, s1, t0, t1);
        }
        let sm = 0.5 * (s0 + s1);
        let tm = 0.5 * (t0 + t1);
        self.cell(s0, sm, t0, tm, depth + 1)
            + self.cell(sm, s1, t0, tm, depth + 1)
            + self.cell(s0, sm, tm, t1, depth + 1)
            + self.cell(sm, s1, tm, t1, depth + 1)
    }

    /// Clips the leaf against the linearization of the excess at its center
    /// and integrates the area element at the centroid of the clipped part.
    fn straddling_leaf(&self, s0: f64, s1: f64, t0: f64, t1: f64) -> f64 {
        let (sc, tc) = (0.5 * (s0 + s1), 0.5 * (t0 + t1));
        let f0 = self.excess(sc, tc);
        let g = self.excess_gradient(sc, tc);
        let lin = |p: (f64, f64)| f0 + g[0] * (p.0 - sc) + g[1] * (p.1 - tc);
        let square = [(s0, t0), (s1, t0), (s1, t1), (s0, t1)];
        let mut poly: Vec<(f64, f64)> = Vec::with_capacity(5);
        for i in 0..4 {
            let (p, q) = (square[i], square[(i + 1) % 4]);
            let (fp, fq) = (lin(p), lin(q));
            if fp <= 0.0 {
                poly.push(p);
            }
            if (fp <= 0.0) != (fq <= 0.0) {
                let u = fp / (fp - fq);
                poly.push((p.0 + u * (q.0 - p.0), p.1 + u * (q.1 - p.1)));
            }
        }
        if poly.len() < 3 {
            return 0.0;
        }
        let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
        for i in 0..poly.len() {
            let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
            let cr = p.0 * q.1 - q.0 * p.1;
            a += cr;
            cx += (p.0 + q.0) * cr;
            cy += (p.1 + q.1) * cr;
        }
        a *= 0.5;
        if a.abs() < 1e-300 {
            return 0.0;
        }
        a.abs() * jacobian(cx / (6.0 * a), cy / (6.0 * a))
    }
}

fn integrate(center: Vec3, radius: f64, quad_n: usize) -> f64 {
    let depth = (quad_n.max(2) as f64).log2().ceil() as u32;
    let it = Integrator {
        center,
        r2: radius * radius,
        max_depth: depth,
        max_inside_size: 0.25 * radius.min(1.0),
        rule: GaussRule::new(6),
    };
    let sc = 0.5 * (center.x + center.y);
    let tc = 0.5 * (center.x - center.y);
    it.cell(sc - radius, sc + radius, tc - radius, tc + radius, 0)
}

/// Area of `M ∩ B(center, R)`; the error bound is the difference between
/// leaf resolutions `quad_n` and `2·quad_n`.
pub fn saddle_patch_area(center: Vec3, radius: f64, quad_n: usize) -> AreaEstimate {
    assert!(radius > 0.0, "radius must be positive");
    let coarse = integrate(center, radius, quad_n);
    let fine = integrate(center, radius, 2 * quad_n);
    AreaEstimate {
        value: fine,
        error_bound: (fine - coarse).abs(),
        resolutions_used: vec![quad_n, 2 * quad_n],
        richardson: Some(fine + (fine - coarse) / 3.0),
    }
}

/// The family member whose intersection with the unit ball is
/// `(M ∩ B(center, R) − center)/R`. Areas scale by `R²`.
pub fn saddle_surface_in_ball(center: Vec3, radius: f64) -> FamilyParameter {
    let (c, r) = (center, radius);
    // M = {x² − y² − z = 0}; substitute x = c + R·u and divide by R².
    let raw = [1.0, 2.0 * c.x / r, -2.0 * c.y / r, -1.0 / r, (c.x * c.x - c.y * c.y - c.z) / (r * r)];
    FamilyParameter::from_coords(raw, 0.0).expect("a0 = 1")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSample {
    pub center: [f64; 3],
    pub radius: f64,
    pub area: f64,
    pub error_bound: f64,
    /// `area / (2πR²)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixAReport {
    pub samples: Vec<BallSample>,
    pub max_ratio: f64,
    /// Largest `(area + error_bound)/(2πR²)`.
    pub max_ratio_upper: f64,
    pub argmax: usize,
    pub passed: bool,
}

/// Random balls meeting `M`: radius log-uniform in `r_range`, center a point
/// of `M` with `|s|, |t| ≤ center_range` displaced by less than `R`.
pub fn appendix_a_bound_check(samples: usize, r_range: (f64, f64), center_range: f64, quad_n: usize, seed: u64) -> AppendixAReport {
    assert!(samples >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let balls: Vec<(Vec3, f64)> = (0..samples)
        .map(|_| {
            let radius = (rng.gen_range(r_range.0.ln()..=r_range.1.ln())).exp();
            let foot = embed(rng.gen_range(-center_range..=center_range), rng.gen_range(-center_range..=center_range));
            let dir = loop {
                let v = Vec3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
                if v.norm() <= 1.0 {
                    break v;
                }
            };
            (foot + dir * radius, radius)
        })
        .collect();
    let records: Vec<BallSample> = {
        use rayon::prelude::*;
        balls
            .par_iter()
            .map(|&(c, r)| {
                let est = saddle_patch_area(c, r, quad_n);
                BallSample { center: [c.x, c.y, c.z], radius: r, area: est.value, error_bound: est.error_bound, ratio: est.value / (2.0 * PI * r * r) }
            })
            .collect()
    };
    report_from(records)
}

pub(crate) fn report_from(samples: Vec<BallSample>) -> AppendixAReport {
    let upper = |b: &BallSample| (b.area + b.error_bound) / (2.0 * PI * b.radius * b.radius);
    let argmax = (0..samples.len()).max_by(|&i, &j| samples[i].ratio.total_cmp(&samples[j].ratio)).unwrap_or(0);
    let max_ratio = samples.iter().map(|b| b.ratio).fold(0.0, f64::max);
    let max_ratio_upper = samples.iter().map(upper).fold(0.0, f64::max);
    AppendixAReport { passed: max_ratio_upper < 1.0, samples, max_ratio, max_ratio_upper, argmax }
}
