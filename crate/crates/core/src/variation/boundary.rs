//! Tracing `∂Σ_s = Σ_s ∩ ∂Ω` and the boundary integrals over it.
//!
//! Each closed component is followed by predictor-corrector steps along
//! `∇p × ∇d`, with step length proportional to the distance from the bump axis
//! (the integrands vary on that scale). Crossings of the cylinders of radius
//! `R`, `2R`, `1/4` are inserted as nodes so the four partial sums add up to
//! the whole-curve sum of the same nodes.

use super::VariationError;
use crate::family_core::{ImplicitSurface, Phi5Surface, Vec3};
use crate::quadrature::refine_root;
use crate::surface_mesh::DomainSpec;

pub(crate) struct Tracer<'a> {
    pub surf: &'a Phi5Surface,
    pub domain: &'a DomainSpec,
    /// Step length as a fraction of the axis distance.
    pub alpha: f64,
    pub max_step: f64,
}

impl<'a> Tracer<'a> {
    pub fn axis_distance(&self, x: &Vec3) -> f64 {
        (x.x - self.surf.b[0]).hypot(x.y - self.surf.b[1])
    }

    fn step_length(&self, x: &Vec3) -> f64 {
        (self.alpha * self.axis_distance(x)).clamp(1e-12, self.max_step)
    }

    fn tangent(&self, x: &Vec3) -> Option<Vec3> {
        let t = self.surf.gradient(x).cross(&self.domain.level_gradient(x));
        let n = t.norm();
        (n > 1e-300).then(|| t / n)
    }

    /// Gauss-Newton onto `p = 0, d = 0` with the minimum-norm update.
    pub fn correct(&self, mut x: Vec3) -> Option<Vec3> {
        for _ in 0..30 {
            let f = self.surf.value(&x);
            let d = self.domain.level(&x);
            let gf = self.surf.gradient(&x);
            let gd = self.domain.level_gradient(&x);
            let scale = gf.norm();
            if f.abs() <= 1e-15 * scale.max(1e-300) * (1.0 + x.norm()) && d.abs() <= 2e-16 {
                return Some(x);
            }
            let a = gf.dot(&gf);
            let b = gf.dot(&gd);
            let c = gd.dot(&gd);
            let det = a * c - b * b;
            if !(det > 1e-20 * a * c) {
                return None;
            }
            let l1 = (c * f - b * d) / det;
            let l2 = (a * d - b * f) / det;
            let step = gf * l1 + gd * l2;
            x -= step;
            if step.norm() <= 1e-16 * (1.0 + x.norm()) {
                return Some(x);
            }
        }
        let ok = self.surf.value(&x).abs() <= 1e-12 * self.surf.gradient(&x).norm() && self.domain.level(&x).abs() <= 1e-12;
        ok.then_some(x)
    }

    /// One closed component through `seed`.
    pub fn trace_loop(&self, seed: Vec3) -> Result<Vec<Vec3>, VariationError> {
        let x0 = seed;
        let mut pts = vec![x0];
        let mut dir = self.tangent(&x0).ok_or_else(|| VariationError::TraceFailure(format!("no tangent at {x0:?}")))?;
        let mut x = x0;
        let mut arc = 0.0;
        for _ in 0..2_000_000 {
            let mut h = self.step_length(&x);
            let next = loop {
                let guess = x + dir * h;
                if let Some(y) = self.correct(guess) {
                    if let Some(t) = self.tangent(&y) {
                        let t = if t.dot(&dir) < 0.0 { -t } else { t };
                        let chord = (y - x).norm();
                        // reject steps that jump to another sheet or turn too sharply
                        if t.dot(&dir) > (4.0 * self.alpha).min(0.5).cos() && chord > 0.5 * h && chord < 1.5 * h {
                            break (y, t);
                        }
                    }
                }
                h *= 0.5;
                if h < 1e-14 {
                    return Err(VariationError::TraceFailure(format!("step collapsed near {x:?}")));
                }
            };
            let (y, t) = next;
            arc += (y - x).norm();
            let close = (y - x0).norm();
            if arc > 4.0 * h && close < 1.2 * self.step_length(&y).max(h) && (x0 - y).dot(&t) > -0.25 * close {
                return Ok(pts);
            }
            if close < 0.5 * h && arc > 4.0 * h {
                return Ok(pts);
            }
            pts.push(y);
            x = y;
            dir = t;
        }
        Err(VariationError::TraceFailure("boundary component does not close".into()))
    }

    /// All components reachable from `seeds`; a seed already lying on a traced
    /// component is skipped.
    pub fn trace_all(&self, seeds: &[Vec3]) -> Result<Vec<Vec<Vec3>>, VariationError> {
        let mut loops: Vec<Vec<Vec3>> = Vec::new();
        for &s in seeds {
            let Some(s) = self.correct(s) else { continue };
            let tol = self.step_length(&s);
            let covered = loops.iter().any(|lp| {
                let n = lp.len();
                (0..n).any(|i| segment_distance(&s, &lp[i], &lp[(i + 1) % n]) < 0.05 * tol)
            });
            if !covered {
                loops.push(self.trace_loop(s)?);
            }
        }
        Ok(loops)
    }

    /// Point on the curve between the nodes `a` and `b` at axis distance `rho`.
    fn crossing(&self, a: &Vec3, b: &Vec3, rho: f64) -> Vec3 {
        let at = |lam: f64| self.correct(a + (b - a) * lam).unwrap_or(a + (b - a) * lam);
        let f = |lam: f64| self.axis_distance(&at(lam)) - rho;
        let lam = refine_root(0.0, 1.0, f(0.0), f(1.0), f, 1e-13);
        at(lam)
    }
}

fn segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_squared();
    let t = if l2 > 0.0 { ((p - a).dot(&ab) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (p - (a + ab * t)).norm()
}

/// Boundary sums of `g` over one tracing: the four cylinder regions and the
/// whole curve.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct BoundarySums {
    pub parts: [f64; 4],
    pub whole: f64,
    pub length: f64,
    pub max_nw: [f64; 4],
}

/// Trapezoid sums of `g` over the traced loops with crossing nodes inserted.
pub(crate) fn boundary_sums(
    tracer: &Tracer,
    loops: &[Vec<Vec3>],
    radii: [f64; 3],
    g: impl Fn(&Vec3) -> Result<(f64, f64), VariationError>,
) -> Result<BoundarySums, VariationError> {
    let region = |r: f64| radii.iter().filter(|&&rho| r >= rho).count();
    let mut out = BoundarySums::default();
    for lp in loops {
        let n = lp.len();
        let mut nodes: Vec<Vec3> = Vec::with_capacity(n + 16);
        for i in 0..n {
            let (a, b) = (lp[i], lp[(i + 1) % n]);
            nodes.push(a);
            let (ra, rb) = (tracer.axis_distance(&a), tracer.axis_distance(&b));
            let mut cross: Vec<Vec3> = radii
                .iter()
                .filter(|&&rho| (ra < rho) != (rb < rho))
                .map(|&rho| tracer.crossing(&a, &b, rho))
                .collect();
            cross.sort_by(|p, q| (p - a).norm().total_cmp(&(q - a).norm()));
            nodes.extend(cross);
        }
        let vals: Vec<(f64, f64)> = nodes.iter().map(&g).collect::<Result<_, _>>()?;
        let m = nodes.len();
        for i in 0..m {
            let j = (i + 1) % m;
            let len = (nodes[j] - nodes[i]).norm();
            let r_mid = 0.5 * (tracer.axis_distance(&nodes[i]) + tracer.axis_distance(&nodes[j]));
            let k = region(r_mid);
            out.parts[k] += 0.5 * (vals[i].0 + vals[j].0) * len;
            out.max_nw[k] = out.max_nw[k].max(vals[i].1.abs());
        }
        // the unpartitioned sum, node by node with trapezoid weights
        for i in 0..m {
            let prev = (nodes[i] - nodes[(i + m - 1) % m]).norm();
            let next = (nodes[(i + 1) % m] - nodes[i]).norm();
            out.whole += 0.5 * (prev + next) * vals[i].0;
            out.length += next;
        }
    }
    Ok(out)
}
