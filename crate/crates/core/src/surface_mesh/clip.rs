//! Vertex projection onto the surface and clipping against the domain.

use super::marching::RawMesh;
use super::DomainSpec;
use crate::family_core::{ImplicitSurface, Vec3};
use std::collections::HashMap;

pub(crate) struct ClippedMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
    /// Vertices created on the domain boundary.
    pub on_boundary: Vec<bool>,
}

/// Newton steps along the gradient, each limited to one grid spacing.
pub(crate) fn project_to_surface<S: ImplicitSurface>(surface: &S, mut x: Vec3, max_step: f64) -> Vec3 {
    for _ in 0..6 {
        let f = surface.value(&x);
        let g = surface.gradient(&x);
        let g2 = g.norm_squared();
        if g2 < 1e-300 || f.abs() <= 1e-15 * g2.sqrt() {
            break;
        }
        let mut step = g * (f / g2);
        let len = step.norm();
        if len > max_step {
            step *= max_step / len;
        }
        x -= step;
    }
    x
}

/// Gauss-Newton on `(p, d) = 0` with the minimum-norm update, falling back to
/// a projection onto `d = 0` alone when the two gradients are nearly parallel.
pub(crate) fn project_to_rim<S: ImplicitSurface>(surface: &S, domain: &DomainSpec, mut x: Vec3, max_step: f64) -> Vec3 {
    let start = x;
    for _ in 0..12 {
        let f = surface.value(&x);
        let d = domain.level(&x);
        let gf = surface.gradient(&x);
        let gd = domain.level_gradient(&x);
        let scale = gf.norm().max(1e-300);
        if f.abs() <= 1e-14 * scale && d.abs() <= 1e-14 {
            return x;
        }
        // Solve (J Jᵀ) λ = F for J = [gf; gd].
        let a = gf.dot(&gf);
        let b = gf.dot(&gd);
        let c = gd.dot(&gd);
        let det = a * c - b * b;
        if det <= 1e-14 * a * c {
            break;
        }
        let l1 = (c * f - b * d) / det;
        let l2 = (a * d - b * f) / det;
        let mut step = gf * l1 + gd * l2;
        let len = step.norm();
        if len > max_step {
            step *= max_step / len;
        }
        x -= step;
    }
    if !(domain.level(&x).abs() <= 1e-12) || (x - start).norm() > 4.0 * max_step {
        x = start;
    }
    project_to_level(domain, x)
}

/// Newton on the domain level along its gradient.
pub(crate) fn project_to_level(domain: &DomainSpec, mut x: Vec3) -> Vec3 {
    for _ in 0..20 {
        let d = domain.level(&x);
        if d.abs() <= 1e-14 {
            break;
        }
        let g = domain.level_gradient(&x);
        x -= g * (d / g.norm_squared());
    }
    x
}

pub(crate) fn clip_to_domain<S: ImplicitSurface>(surface: &S, domain: &DomainSpec, raw: RawMesh) -> ClippedMesh {
    let h = raw.spacing;
    let mut vertices: Vec<Vec3> = raw.vertices.iter().map(|&x| project_to_surface(surface, x, h)).collect();
    let level: Vec<f64> = vertices.iter().map(|x| domain.level(x)).collect();
    let inside = |i: u32| level[i as usize] <= 0.0;
    let mut on_boundary = vec![false; vertices.len()];
    let mut cut_vertex: HashMap<(u32, u32), u32> = HashMap::new();
    let mut triangles = Vec::with_capacity(raw.triangles.len());

    let mut cut = |a: u32, b: u32, vertices: &mut Vec<Vec3>, on_boundary: &mut Vec<bool>| -> u32 {
        let key = if a < b { (a, b) } else { (b, a) };
        *cut_vertex.entry(key).or_insert_with(|| {
            let (xa, xb) = (vertices[key.0 as usize], vertices[key.1 as usize]);
            let (da, db) = (level[key.0 as usize], level[key.1 as usize]);
            let t = (da / (da - db)).clamp(0.0, 1.0);
            let guess = xa + (xb - xa) * t;
            vertices.push(project_to_rim(surface, domain, guess, h));
            on_boundary.push(true);
            (vertices.len() - 1) as u32
        })
    };

    for tri in &raw.triangles {
        let flags = tri.map(inside);
        let n_in = flags.iter().filter(|&&f| f).count();
        match n_in {
            3 => triangles.push(*tri),
            0 => {}
            1 => {
                let r = flags.iter().position(|&f| f).unwrap();
                let (a, b, c) = (tri[r], tri[(r + 1) % 3], tri[(r + 2) % 3]);
                let ab = cut(a, b, &mut vertices, &mut on_boundary);
                let ac = cut(a, c, &mut vertices, &mut on_boundary);
                triangles.push([a, ab, ac]);
            }
            _ => {
                let r = flags.iter().position(|&f| !f).unwrap();
                let (c, a, b) = (tri[r], tri[(r + 1) % 3], tri[(r + 2) % 3]);
                let bc = cut(b, c, &mut vertices, &mut on_boundary);
                let ca = cut(c, a, &mut vertices, &mut on_boundary);
                triangles.push([a, b, bc]);
                triangles.push([a, bc, ca]);
            }
        }
    }
    ClippedMesh { vertices, triangles, on_boundary }
}
