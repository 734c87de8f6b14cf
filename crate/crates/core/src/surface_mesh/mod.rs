//! Triangulated zero sets clipped to a domain, their areas and topology.

mod clip;
mod export;
mod marching;
mod saddle;
mod topology;

pub use export::{mesh_file_stem, write_obj, write_ply};
pub use saddle::{appendix_a_bound_check, saddle_patch_area, saddle_surface_in_ball, AppendixAReport, BallSample};
pub use topology::{topology, ComponentTopology, TopologyReport};

use crate::family_core::{plane_pair, translated_profile, FamilyError, FamilyParameter, ImplicitSurface, Vec3};
use crate::variation::OmegaDomain;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("singular point {point:?} lies within {radius:e} of the domain")]
    SingularityTooClose { point: [f64; 3], radius: f64 },
    #[error("singular set is a line; mesh the two planes separately")]
    SingularLine,
    #[error("edge ({0}, {1}) is shared by {2} triangles")]
    NonManifoldMesh(u32, u32, usize),
    #[error("inconsistent topology: {0}")]
    InvalidTopology(String),
    #[error("grid_n = {0} is below the minimum of 16")]
    GridTooCoarse(usize),
}

impl From<FamilyError> for MeshError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::SingularLine => MeshError::SingularLine,
            other => MeshError::InvalidTopology(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DomainSpec {
    UnitBall,
    Omega(OmegaDomain),
}

impl DomainSpec {
    /// Signed level function, negative inside.
    pub fn level(&self, x: &Vec3) -> f64 {
        match self {
            DomainSpec::UnitBall => x.norm() - 1.0,
            DomainSpec::Omega(om) => om.level(x),
        }
    }

    pub fn level_gradient(&self, x: &Vec3) -> Vec3 {
        match self {
            DomainSpec::UnitBall => {
                let n = x.norm();
                if n == 0.0 {
                    Vec3::new(0.0, 0.0, 1.0)
                } else {
                    x / n
                }
            }
            DomainSpec::Omega(om) => om.level_gradient(x),
        }
    }

    pub fn outward_normal(&self, x: &Vec3) -> Vec3 {
        self.level_gradient(x).normalize()
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        self.level(x) <= 0.0
    }

    /// Half extents of an origin-centered box containing the domain.
    pub fn half_extents(&self) -> Vec3 {
        match self {
            DomainSpec::UnitBall => Vec3::new(1.0, 1.0, 1.0),
            DomainSpec::Omega(om) => Vec3::new(1.0, 1.0, om.c),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[u32; 3]>,
    pub boundary_loops: Vec<Vec<u32>>,
    /// Triangle indices of each edge-connected component.
    pub components: Vec<Vec<u32>>,
    pub grid_n: usize,
    /// Smallest `sin` of the angle between surface and domain normals over the
    /// boundary vertices (1 when there is no boundary).
    pub min_boundary_transversality: f64,
    /// Set when `min_boundary_transversality` is below [`TANGENTIAL_TOL`].
    pub tangential: bool,
}

/// Threshold of the transversality guard.
pub const TANGENTIAL_TOL: f64 = 1e-6;

impl SurfaceMesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn vertex(&self, i: u32) -> Vec3 {
        let v = self.vertices[i as usize];
        Vec3::new(v[0], v[1], v[2])
    }

    pub fn triangle_area(&self, t: &[u32; 3]) -> f64 {
        let a = self.vertex(t[0]);
        let b = self.vertex(t[1]);
        let c = self.vertex(t[2]);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| self.triangle_area(t)).sum()
    }

    /// Vertices appearing on some boundary loop.
    pub fn boundary_vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.boundary_loops.iter().flatten().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub resolutions_used: Vec<usize>,
    /// `A(2n) + (A(2n) − A(n))/3`, assuming second-order convergence.
    pub richardson: Option<f64>,
}

impl AreaEstimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error_bound: 0.0, resolutions_used: Vec::new(), richardson: None }
    }

    /// Sum of independent estimates (e.g. the two planes of a crossing pair).
    pub fn sum(parts: &[AreaEstimate]) -> AreaEstimate {
        AreaEstimate {
            value: parts.iter().map(|p| p.value).sum(),
            error_bound: parts.iter().map(|p| p.error_bound).sum(),
            resolutions_used: parts.first().map(|p| p.resolutions_used.clone()).unwrap_or_default(),
            richardson: parts.iter().map(|p| p.richardson).sum(),
        }
    }
}

/// Area estimate from a coarse and a fine mesh of the same surface.
pub fn area(coarse: &SurfaceMesh, fine: &SurfaceMesh) -> AreaEstimate {
    let a_n = coarse.area();
    let a_2n = fine.area();
    AreaEstimate {
        value: a_2n,
        error_bound: (a_2n - a_n).abs(),
        resolutions_used: vec![coarse.grid_n, fine.grid_n],
        richardson: Some(a_2n + (a_2n - a_n) / 3.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MeshOptions {
    /// Skip the singular-point guard (used for parameters known to be singular,
    /// whose area is still well defined).
    pub allow_singular: bool,
}

/// Meshes a family member clipped to `domain`.
pub fn extract_mesh(param: &FamilyParameter, domain: &DomainSpec, grid_n: usize) -> Result<SurfaceMesh, MeshError> {
    extract_mesh_with(param, domain, grid_n, MeshOptions::default())
}

pub fn extract_mesh_with(
    param: &FamilyParameter,
    domain: &DomainSpec,
    grid_n: usize,
    options: MeshOptions,
) -> Result<SurfaceMesh, MeshError> {
    if grid_n < 16 {
        return Err(MeshError::GridTooCoarse(grid_n));
    }
    if !options.allow_singular {
        let radius = 2.0 / grid_n as f64;
        for x in near_singular_candidates(param)? {
            if domain.level(&x) <= radius {
                return Err(MeshError::SingularityTooClose { point: [x.x, x.y, x.z], radius });
            }
        }
    }
    mesh_implicit(param, domain, grid_n)
}

/// Multiple-root points of the profile, inside the domain or not.
fn near_singular_candidates(param: &FamilyParameter) -> Result<Vec<Vec3>, MeshError> {
    let Some(prof) = translated_profile(param) else {
        return Ok(Vec::new());
    };
    if prof.a5 == 0.0 {
        if plane_pair(param).is_some() {
            return Err(MeshError::SingularLine);
        }
        return Ok(Vec::new());
    }
    let qt = param.rot.matrix().transpose();
    Ok(prof.classify().multiple_roots().map(|z| qt * Vec3::new(prof.center.0, prof.center.1, z)).collect())
}

/// Meshes any implicit surface without singularity checks.
pub fn mesh_implicit<S: ImplicitSurface>(surface: &S, domain: &DomainSpec, grid_n: usize) -> Result<SurfaceMesh, MeshError> {
    let raw = marching::march(surface, domain, grid_n);
    let clipped = clip::clip_to_domain(surface, domain, raw);
    topology::finish(clipped, surface, domain, grid_n)
}

/// Area at resolutions `n` and `2n`. Crossing plane pairs are meshed plane by
/// plane.
pub fn area_estimate(param: &FamilyParameter, domain: &DomainSpec, n: usize, options: MeshOptions) -> Result<AreaEstimate, MeshError> {
    if let Some(planes) = plane_pair(param) {
        let parts = planes
            .iter()
            .map(|p| area_estimate(p, domain, n, options))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(AreaEstimate::sum(&parts));
    }
    let coarse = extract_mesh_with(param, domain, n, options)?;
    let fine = extract_mesh_with(param, domain, 2 * n, options)?;
    Ok(area(&coarse, &fine))
}
