//! Marching tetrahedra on a uniform grid.
//!
//! Every cube is split into the six Kuhn tetrahedra around its main diagonal.
//! The split is the same in every cube, so neighbouring cubes agree on their
//! shared face diagonals and the output is a closed-up 2-manifold wherever it
//! does not hit the grid boundary. Vertices live on grid edges and are shared
//! through an edge-keyed map.

use super::DomainSpec;
use crate::family_core::{ImplicitSurface, Vec3};
use std::collections::HashMap;

pub(crate) struct RawMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
    pub spacing: f64,
}

/// Corner `c` of a cube has offset `(c & 1, (c >> 1) & 1, (c >> 2) & 1)`.
const KUHN: [[usize; 4]; 6] = [[0, 1, 3, 7], [0, 1, 5, 7], [0, 2, 3, 7], [0, 2, 6, 7], [0, 4, 5, 7], [0, 4, 6, 7]];

/// Fractional shift of the grid, so that planes through the origin and the
/// coordinate planes do not pass through grid nodes.
const GRID_SHIFT: [f64; 3] = [0.191_3, 0.357_1, 0.271_9];

struct Grid {
    origin: Vec3,
    h: f64,
    cells: [usize; 3],
}

impl Grid {
    fn new(domain: &DomainSpec, grid_n: usize) -> Self {
        let ext = domain.half_extents();
        let h = 2.0 * ext.max() / grid_n as f64;
        let cells = [0, 1, 2].map(|a| (2.0 * ext[a] / h).ceil() as usize + 2);
        let origin = Vec3::from_fn(|a, _| -ext[a] - h + GRID_SHIFT[a] * h);
        Grid { origin, h, cells }
    }

    fn node(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.origin + Vec3::new(i as f64, j as f64, k as f64) * self.h
    }

    fn node_id(&self, i: usize, j: usize, k: usize) -> u64 {
        let nx = self.cells[0] as u64 + 1;
        let ny = self.cells[1] as u64 + 1;
        i as u64 + nx * (j as u64 + ny * k as u64)
    }
}

fn evaluate_layer<S: ImplicitSurface>(surface: &S, grid: &Grid, k: usize) -> Vec<f64> {
    let nx = grid.cells[0] + 1;
    let ny = grid.cells[1] + 1;
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            out.push(surface.value(&grid.node(i, j, k)));
        }
    }
    out
}

pub(crate) fn march<S: ImplicitSurface>(surface: &S, domain: &DomainSpec, grid_n: usize) -> RawMesh {
    let grid = Grid::new(domain, grid_n);
    let nx = grid.cells[0] + 1;
    let reach = grid.h * 3f64.sqrt();
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    let mut edge_vertex: HashMap<u64, u32> = HashMap::new();

    let mut lower = evaluate_layer(surface, &grid, 0);
    for k in 0..grid.cells[2] {
        let upper = evaluate_layer(surface, &grid, k + 1);
        for j in 0..grid.cells[1] {
            for i in 0..grid.cells[0] {
                let mut f = [0.0; 8];
                let mut any_neg = false;
                let mut any_pos = false;
                for (c, fc) in f.iter_mut().enumerate() {
                    let (di, dj, dk) = (c & 1, (c >> 1) & 1, (c >> 2) & 1);
                    let layer = if dk == 0 { &lower } else { &upper };
                    *fc = layer[(i + di) + nx * (j + dj)];
                    if *fc < 0.0 {
                        any_neg = true;
                    } else {
                        any_pos = true;
                    }
                }
                if !(any_neg && any_pos) {
                    continue;
                }
                let center = grid.node(i, j, k) + Vec3::repeat(0.5 * grid.h);
                if domain.level(&center) > reach {
                    continue;
                }
                let pos: [Vec3; 8] = std::array::from_fn(|c| grid.node(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)));
                let ids: [u64; 8] = std::array::from_fn(|c| grid.node_id(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)));
                for tet in KUHN.iter() {
                    let tf = tet.map(|c| f[c]);
                    let tp = tet.map(|c| pos[c]);
                    let tid = tet.map(|c| ids[c]);
                    emit_tet(&tf, &tp, &tid, &mut vertices, &mut triangles, &mut edge_vertex);
                }
            }
        }
        lower = upper;
    }
    RawMesh { vertices, triangles, spacing: grid.h }
}

fn emit_tet(
    f: &[f64; 4],
    p: &[Vec3; 4],
    ids: &[u64; 4],
    vertices: &mut Vec<Vec3>,
    triangles: &mut Vec<[u32; 3]>,
    edge_vertex: &mut HashMap<u64, u32>,
) {
    let mut neg = [0usize; 4];
    let mut pos = [0usize; 4];
    let (mut nn, mut np) = (0, 0);
    for c in 0..4 {
        if f[c] < 0.0 {
            neg[nn] = c;
            nn += 1;
        } else {
            pos[np] = c;
            np += 1;
        }
    }
    if nn == 0 || np == 0 {
        return;
    }
    let mut vertex_on = |a: usize, b: usize| -> (u32, Vec3) {
        let (lo, hi) = if ids[a] < ids[b] { (a, b) } else { (b, a) };
        let key = (ids[lo] << 32) | ids[hi];
        let mid = 0.5 * (p[a] + p[b]);
        let idx = *edge_vertex.entry(key).or_insert_with(|| {
            let t = f[lo] / (f[lo] - f[hi]);
            vertices.push(p[lo] + (p[hi] - p[lo]) * t);
            (vertices.len() - 1) as u32
        });
        (idx, mid)
    };
    // Orientation: normal points from the negative side to the positive side.
    // Decided on edge midpoints, which never degenerate.
    let neg_c: Vec3 = neg[..nn].iter().map(|&c| p[c]).sum::<Vec3>() / nn as f64;
    let pos_c: Vec3 = pos[..np].iter().map(|&c| p[c]).sum::<Vec3>() / np as f64;
    let dir = pos_c - neg_c;
    let mut push = |a: (u32, Vec3), b: (u32, Vec3), c: (u32, Vec3)| {
        let n = (b.1 - a.1).cross(&(c.1 - a.1));
        if n.dot(&dir) >= 0.0 {
            triangles.push([a.0, b.0, c.0]);
        } else {
            triangles.push([a.0, c.0, b.0]);
        }
    };
    match nn {
        1 | 3 => {
            let (apex, others) = if nn == 1 { (neg[0], [pos[0], pos[1], pos[2]]) } else { (pos[0], [neg[0], neg[1], neg[2]]) };
            let a = vertex_on(apex, others[0]);
            let b = vertex_on(apex, others[1]);
            let c = vertex_on(apex, others[2]);
            push(a, b, c);
        }
        _ => {
            let (n0, n1, p0, p1) = (neg[0], neg[1], pos[0], pos[1]);
            let q0 = vertex_on(n0, p0);
            let q1 = vertex_on(n0, p1);
            let q2 = vertex_on(n1, p1);
            let q3 = vertex_on(n1, p0);
            push(q0, q1, q2);
            push(q0, q2, q3);
        }
    }
}
