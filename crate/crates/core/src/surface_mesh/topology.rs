//! Connectivity, boundary loops and Euler-characteristic topology.

use super::clip::ClippedMesh;
use super::{DomainSpec, MeshError, SurfaceMesh, TANGENTIAL_TOL};
use crate::family_core::ImplicitSurface;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentTopology {
    pub genus: u32,
    pub boundary_count: u32,
    pub euler_characteristic: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub components: Vec<ComponentTopology>,
    pub total_genus: u32,
}

fn edge_key(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Undirected edge → incident triangles. Fails on edges with three or more.
fn edge_incidence(triangles: &[[u32; 3]]) -> Result<HashMap<(u32, u32), Vec<u32>>, MeshError> {
    let mut map: HashMap<(u32, u32), Vec<u32>> = HashMap::with_capacity(triangles.len() * 3 / 2);
    for (ti, t) in triangles.iter().enumerate() {
        for e in 0..3 {
            map.entry(edge_key(t[e], t[(e + 1) % 3])).or_default().push(ti as u32);
        }
    }
    if let Some((k, v)) = map.iter().find(|(_, v)| v.len() > 2) {
        return Err(MeshError::NonManifoldMesh(k.0, k.1, v.len()));
    }
    Ok(map)
}

fn find(parent: &mut [u32], mut i: u32) -> u32 {
    while parent[i as usize] != i {
        parent[i as usize] = parent[parent[i as usize] as usize];
        i = parent[i as usize];
    }
    i
}

fn components(n_tri: usize, edges: &HashMap<(u32, u32), Vec<u32>>) -> Vec<Vec<u32>> {
    let mut parent: Vec<u32> = (0..n_tri as u32).collect();
    for tris in edges.values() {
        if tris.len() == 2 {
            let (a, b) = (find(&mut parent, tris[0]), find(&mut parent, tris[1]));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
    }
    let mut groups: HashMap<u32, Vec<u32>> = HashMap::new();
    for t in 0..n_tri as u32 {
        let r = find(&mut parent, t);
        groups.entry(r).or_default().push(t);
    }
    let mut out: Vec<Vec<u32>> = groups.into_values().collect();
    out.sort_by_key(|c| c[0]);
    out
}

/// Boundary loops as cyclic vertex sequences, following triangle orientation.
fn boundary_loops(triangles: &[[u32; 3]], edges: &HashMap<(u32, u32), Vec<u32>>) -> Result<Vec<Vec<u32>>, MeshError> {
    let mut next: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut starts: Vec<(u32, u32)> = Vec::new();
    for t in triangles {
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            if edges[&edge_key(a, b)].len() == 1 {
                next.entry(a).or_default().push(b);
                starts.push((a, b));
            }
        }
    }
    starts.sort_unstable();
    let mut used: HashMap<(u32, u32), bool> = starts.iter().map(|&e| (e, false)).collect();
    let mut loops = Vec::new();
    for &(a, b) in &starts {
        if used[&(a, b)] {
            continue;
        }
        used.insert((a, b), true);
        let mut lp = vec![a];
        let mut cur = b;
        while cur != a {
            lp.push(cur);
            let succ = next
                .get(&cur)
                .and_then(|cands| cands.iter().copied().find(|&c| !used[&(cur, c)]))
                .ok_or_else(|| MeshError::InvalidTopology(format!("boundary walk stuck at vertex {cur}")))?;
            used.insert((cur, succ), true);
            cur = succ;
            if lp.len() > starts.len() {
                return Err(MeshError::InvalidTopology("boundary walk does not close".into()));
            }
        }
        loops.push(lp);
    }
    Ok(loops)
}

pub(crate) fn finish<S: ImplicitSurface>(clipped: ClippedMesh, surface: &S, domain: &DomainSpec, grid_n: usize) -> Result<SurfaceMesh, MeshError> {
    // Compact away vertices that no triangle references.
    let mut remap = vec![u32::MAX; clipped.vertices.len()];
    let mut vertices = Vec::new();
    let mut on_boundary = Vec::new();
    let triangles: Vec<[u32; 3]> = clipped
        .triangles
        .iter()
        .map(|t| {
            t.map(|v| {
                if remap[v as usize] == u32::MAX {
                    remap[v as usize] = vertices.len() as u32;
                    let x = clipped.vertices[v as usize];
                    vertices.push([x.x, x.y, x.z]);
                    on_boundary.push(clipped.on_boundary[v as usize]);
                }
                remap[v as usize]
            })
        })
        .collect();
    let edges = edge_incidence(&triangles)?;
    let comps = components(triangles.len(), &edges);
    let loops = boundary_loops(&triangles, &edges)?;

    let mut mesh = SurfaceMesh {
        vertices,
        triangles,
        boundary_loops: loops,
        components: comps,
        grid_n,
        min_boundary_transversality: 1.0,
        tangential: false,
    };
    let mut worst: f64 = 1.0;
    for v in mesh.boundary_vertices() {
        let x = mesh.vertex(v);
        let g = surface.gradient(&x);
        let gn = g.norm();
        if gn == 0.0 {
            worst = 0.0;
            continue;
        }
        let nd = domain.outward_normal(&x);
        worst = worst.min((g / gn).cross(&nd).norm());
    }
    mesh.min_boundary_transversality = worst;
    mesh.tangential = worst < TANGENTIAL_TOL;
    Ok(mesh)
}

/// Per-component `χ = V − E + F`, boundary count and genus `(2 − χ − b)/2`.
pub fn topology(mesh: &SurfaceMesh) -> Result<TopologyReport, MeshError> {
    let edges = edge_incidence(&mesh.triangles)?;
    let comps = components(mesh.triangles.len(), &edges);
    let loops = boundary_loops(&mesh.triangles, &edges)?;
    let mut tri_comp = vec![0usize; mesh.triangles.len()];
    for (ci, c) in comps.iter().enumerate() {
        for &t in c {
            tri_comp[t as usize] = ci;
        }
    }
    let mut chi = vec![0i64; comps.len()];
    let mut bcount = vec![0u32; comps.len()];
    let mut seen_vertex: HashMap<u32, Vec<usize>> = HashMap::new();
    for (ci, c) in comps.iter().enumerate() {
        chi[ci] += c.len() as i64;
        for &t in c {
            for &v in &mesh.triangles[t as usize] {
                let owners = seen_vertex.entry(v).or_default();
                if !owners.contains(&ci) {
                    owners.push(ci);
                    chi[ci] += 1;
                }
            }
        }
    }
    for tris in edges.values() {
        chi[tri_comp[tris[0] as usize]] -= 1;
    }
    for lp in &loops {
        let e = edge_key(lp[0], lp[1 % lp.len()]);
        let t = edges[&e][0];
        bcount[tri_comp[t as usize]] += 1;
    }
    let mut out = Vec::with_capacity(comps.len());
    for ci in 0..comps.len() {
        let twice_genus = 2 - chi[ci] - bcount[ci] as i64;
        if twice_genus < 0 || twice_genus % 2 != 0 {
            return Err(MeshError::InvalidTopology(format!(
                "component {ci}: chi = {}, b = {} give a non-integral genus",
                chi[ci], bcount[ci]
            )));
        }
        out.push(ComponentTopology {
            genus: (twice_genus / 2) as u32,
            boundary_count: bcount[ci],
            euler_characteristic: chi[ci],
        });
    }
    let total_genus = out.iter().map(|c| c.genus).sum();
    Ok(TopologyReport { components: out, total_genus })
}
