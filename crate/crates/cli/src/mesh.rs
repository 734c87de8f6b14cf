//! `sweepoutlab mesh`: one member, its area, topology and singular points.

use crate::{config_err, io_err, CliError, CliResult};
use clap::{Args, ValueEnum};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use sweepoutlab::family_core::{
    singular_points, translated_profile, FamilyError, FamilyParameter, Phi5Surface, ProjectivePoint4, Rotation3,
};
use sweepoutlab::surface_mesh::{area_estimate, extract_mesh, mesh_file_stem, topology, write_obj, write_ply, DomainSpec, MeshError, MeshOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeshFormat {
    Obj,
    Ply,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("member").required(true).args(["proj", "phi5"]))]
pub struct MeshArgs {
    /// Homogeneous coordinates a0,a1,a2,a3,a4.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub proj: Option<Vec<f64>>,
    /// Perturbation strength, with --proj.
    #[arg(long, default_value_t = 0.0, requires = "proj", allow_hyphen_values = true)]
    pub a5: f64,
    /// Rotation as a quaternion q0,q1,q2,q3 (normalized), with --proj.
    #[arg(long, value_delimiter = ',', requires = "proj", allow_hyphen_values = true)]
    pub rot: Option<Vec<f64>>,
    /// Translated form b1,b2,b3,b4,b5,s: (x−b1)² − (y−b2)² + s(b3 z + b4 + b5 z³).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi5: Option<Vec<f64>>,
    /// Cells per axis; the area estimate also uses a mesh at twice this.
    #[arg(long, default_value_t = 64)]
    pub grid_n: usize,
    #[arg(long, value_enum, default_value_t = MeshFormat::Obj)]
    pub format: MeshFormat,
    /// Mesh file path (default: `<out>/<hash>_<grid_n>.<format>`).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn family_err(e: FamilyError) -> CliError {
    match e {
        FamilyError::SingularLine => CliError::Singular("the member is a pair of planes crossing along a line".into()),
        other => config_err(other),
    }
}

fn mesh_err(e: MeshError) -> CliError {
    match e {
        MeshError::SingularityTooClose { point, radius } => CliError::Singular(format!(
            "singular point ({:.6}, {:.6}, {:.6}) lies within {radius:.3e} of the unit ball",
            point[0], point[1], point[2]
        )),
        MeshError::SingularLine => CliError::Singular("the member is a pair of planes crossing along a line".into()),
        MeshError::GridTooCoarse(_) => config_err(e),
        other => CliError::Failed(other.into()),
    }
}

fn count_err(flag: &str, want: usize, got: usize) -> CliError {
    config_err(anyhow::anyhow!("{flag} takes {want} comma-separated values, got {got}"))
}

pub fn parameter(args: &MeshArgs) -> CliResult<FamilyParameter> {
    if let Some(b) = &args.phi5 {
        let [b1, b2, b3, b4, b5, s]: [f64; 6] = b.as_slice().try_into().map_err(|_| count_err("--phi5", 6, b.len()))?;
        return Phi5Surface::new([b1, b2, b3, b4, b5], s).to_family().map_err(family_err);
    }
    let proj = args.proj.as_ref().ok_or_else(|| config_err(anyhow::anyhow!("either --proj or --phi5 is required")))?;
    let raw: [f64; 5] = proj.as_slice().try_into().map_err(|_| count_err("--proj", 5, proj.len()))?;
    let rot = match &args.rot {
        Some(q) => Rotation3::from_quaternion(q.as_slice().try_into().map_err(|_| count_err("--rot", 4, q.len()))?).map_err(family_err)?,
        None => Rotation3::identity(),
    };
    FamilyParameter::new(ProjectivePoint4::new(raw).map_err(family_err)?, args.a5, rot).map_err(family_err)
}

/// Fails with [`CliError::Singular`] when the member has a singular point in
/// the closed ball.
pub fn check_regular(param: &FamilyParameter) -> CliResult<()> {
    let pts = singular_points(param).map_err(family_err)?;
    if pts.is_empty() {
        return Ok(());
    }
    let list: Vec<String> = pts.iter().map(|x| format!("({:.6}, {:.6}, {:.6})", x.x, x.y, x.z)).collect();
    Err(CliError::Singular(format!("singular point {} inside the unit ball", list.join(", "))))
}

pub fn cmd_mesh(args: &MeshArgs, out: &Path) -> CliResult<()> {
    let param = parameter(args)?;
    check_regular(&param)?;
    let est = area_estimate(&param, &DomainSpec::UnitBall, args.grid_n, MeshOptions::default()).map_err(mesh_err)?;
    let mesh = extract_mesh(&param, &DomainSpec::UnitBall, args.grid_n).map_err(mesh_err)?;
    let topo = topology(&mesh).map_err(mesh_err)?;

    let ext = match args.format {
        MeshFormat::Obj => "obj",
        MeshFormat::Ply => "ply",
    };
    let path = match &args.output {
        Some(p) => p.clone(),
        None => {
            std::fs::create_dir_all(out).map_err(|e| io_err(anyhow::anyhow!("cannot create {}: {e}", out.display())))?;
            out.join(format!("{}.{ext}", mesh_file_stem(&param, args.grid_n)))
        }
    };
    let file = File::create(&path).map_err(|e| io_err(anyhow::anyhow!("cannot create {}: {e}", path.display())))?;
    let written = match args.format {
        MeshFormat::Obj => write_obj(&mesh, BufWriter::new(file)),
        MeshFormat::Ply => write_ply(&mesh, BufWriter::new(file)),
    };
    written.map_err(|e| io_err(anyhow::anyhow!("cannot write {}: {e}", path.display())))?;

    let profile = translated_profile(&param).map(|p| p.classify());
    let report = serde_json::json!({
        "parameter": {
            "proj": param.proj.coords(),
            "a5": param.a5,
            "rotation": param.rot.row_major(),
        },
        "grid_n": args.grid_n,
        "area": est,
        "topology": topo,
        "genus": topo.total_genus,
        "singular_points": [],
        "profile": profile,
        "mesh": {
            "path": path.display().to_string(),
            "vertices": mesh.vertices.len(),
            "triangles": mesh.triangles.len(),
            "tangential": mesh.tangential,
        },
    });
    let text = serde_json::to_string_pretty(&report).map_err(io_err)?;
    writeln!(std::io::stdout().lock(), "{text}").map_err(io_err)
}
