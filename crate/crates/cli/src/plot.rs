//! `sweepoutlab plot-data <figure> [config]`: mesh files and gnuplot tables.

use crate::config::CampaignConfig;
use crate::output::{dat_table, OutputDir};
use crate::{io_err, CliError, CliResult};
use std::f64::consts::PI;
use std::fs::File;
use std::io::BufWriter;
use sweepoutlab::family_core::{classify_cubic, singular_points, FamilyParameter, Phi5Surface};
use sweepoutlab::surface_mesh::{extract_mesh_with, topology, write_obj, DomainSpec, MeshOptions, SurfaceMesh};
use sweepoutlab::variation::VariationResolution;
use sweepoutlab::verifiers::{area_record, scaling_campaign};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Table1,
    Phi1Figure,
    Scaling,
}

impl Figure {
    pub fn parse(name: &str) -> anyhow::Result<Self> {
        Ok(match name {
            "table1" => Self::Table1,
            "phi1-figure" => Self::Phi1Figure,
            "scaling" => Self::Scaling,
            other => anyhow::bail!("unknown figure {other:?}; expected table1, phi1-figure or scaling"),
        })
    }

    fn name(self) -> &'static str {
        match self {
            Self::Table1 => "table1",
            Self::Phi1Figure => "phi1-figure",
            Self::Scaling => "scaling",
        }
    }
}

pub fn cmd_plot_data(figure: Figure, cfg: &CampaignConfig) -> CliResult<()> {
    let out = OutputDir::create(cfg, &format!("plot-data/{}", figure.name()))?;
    match figure {
        Figure::Table1 => table1(cfg, &out)?,
        Figure::Phi1Figure => phi1_figure(cfg, &out)?,
        Figure::Scaling => scaling(cfg, &out)?,
    }
    out.finish(cfg, None)?;
    println!("{}: data in {}", figure.name(), out.dir.display());
    Ok(())
}

fn write_mesh(out: &OutputDir, file: &str, mesh: &SurfaceMesh) -> CliResult<()> {
    let path = out.path(file);
    let f = File::create(&path).map_err(|e| io_err(anyhow::anyhow!("cannot create {}: {e}", path.display())))?;
    write_obj(mesh, BufWriter::new(f)).map_err(|e| io_err(anyhow::anyhow!("cannot write {}: {e}", path.display())))
}

/// Meshes singular members too; their genus is reported as `-`.
fn mesh_member(param: &FamilyParameter, n: usize) -> CliResult<(SurfaceMesh, Option<u32>)> {
    let mesh = extract_mesh_with(param, &DomainSpec::UnitBall, n, MeshOptions { allow_singular: true }).map_err(|e| CliError::Failed(e.into()))?;
    let singular = !matches!(singular_points(param), Ok(pts) if pts.is_empty());
    let genus = if singular { None } else { topology(&mesh).ok().map(|t| t.total_genus) };
    Ok((mesh, genus))
}

/// `b3` with a double root of `z³ + b3·z + 1/10`.
fn double_root_b3() -> f64 {
    -(27.0 * 0.01 / 4.0f64).cbrt()
}

/// The surfaces `x² − y² + s(b3·z + 1/10 + z³) = 0`, at the printed `b3` and
/// with the sign that gives 1, 2 and 3 roots.
fn table1(cfg: &CampaignConfig, out: &OutputDir) -> CliResult<()> {
    const B4: f64 = 0.1;
    let sets = [("printed", [0.1, 0.407, 0.6]), ("corrected", [0.1, double_root_b3(), -0.6])];
    let mut rows = Vec::new();
    for (set, b3s) in sets {
        for b3 in b3s {
            for s in [0.05, 0.3] {
                let surf = Phi5Surface::new([0.0, 0.0, b3, B4, 1.0], s);
                let param = surf.to_family().map_err(|e| CliError::Failed(e.into()))?;
                let prof = classify_cubic(b3, B4, 1.0);
                let (mesh, genus) = mesh_member(&param, cfg.grids.plot_mesh_n)?;
                let file = format!("{set}_b3_{b3:.5}_s_{s}.obj");
                write_mesh(out, &file, &mesh)?;
                rows.push(vec![
                    set.to_string(),
                    format!("{b3:.9}"),
                    s.to_string(),
                    format!("{:?}", prof.kind),
                    prof.roots.len().to_string(),
                    genus.map_or("-".into(), |g| g.to_string()),
                    format!("{:.9}", mesh.area()),
                    file,
                ]);
            }
        }
    }
    out.text("table1.dat", &dat_table(&["set", "b3", "s", "kind", "distinct_roots", "genus", "mesh_area", "mesh_file"], rows))?;

    let b3s = [0.1, 0.407, 0.6, double_root_b3(), -0.6];
    let header: Vec<String> = std::iter::once("z".to_string()).chain(b3s.iter().map(|b| format!("phi_b3={b:.5}"))).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let profiles = (0..=200).map(|k| {
        let z = -1.0 + k as f64 / 100.0;
        std::iter::once(format!("{z:.2}")).chain(b3s.iter().map(|b3| format!("{:.12e}", z * z * z + b3 * z + B4))).collect()
    });
    out.text("table1_profiles.dat", &dat_table(&header, profiles))?;
    Ok(())
}

/// The pencil `[cos θ : 0 : 0 : sin θ : 0]`, i.e. `a0(x² − y² + a5 z³) + a3 z`.
fn phi1_figure(cfg: &CampaignConfig, out: &OutputDir) -> CliResult<()> {
    let a5 = cfg.a5_list[0];
    let member = |theta: f64| FamilyParameter::from_coords([theta.cos(), 0.0, 0.0, theta.sin(), 0.0], a5).map_err(|e| CliError::Failed(e.into()));
    let mut curve = Vec::new();
    for k in 0..=180 {
        let theta = PI * k as f64 / 180.0;
        let r = area_record(&member(theta)?, Some(k));
        curve.push(vec![format!("{theta:.9}"), format!("{:.12e}", theta.cos()), format!("{:.12e}", theta.sin()), format!("{:.12e}", r.area), format!("{:.3e}", r.error_bound)]);
    }
    out.text("area_curve.dat", &dat_table(&["theta", "a0", "a3", "area", "error_bound"], curve))?;

    let mut meshes = Vec::new();
    for k in 0..8 {
        let theta = PI * k as f64 / 8.0;
        let (mesh, genus) = mesh_member(&member(theta)?, cfg.grids.plot_mesh_n)?;
        let file = format!("theta_{k}_of_8.obj");
        write_mesh(out, &file, &mesh)?;
        meshes.push(vec![
            format!("{theta:.9}"),
            format!("{:.12e}", theta.cos()),
            format!("{:.12e}", theta.sin()),
            genus.map_or("-".into(), |g| g.to_string()),
            format!("{:.9}", mesh.area()),
            file,
        ]);
    }
    out.text("meshes.dat", &dat_table(&["theta", "a0", "a3", "genus", "mesh_area", "mesh_file"], meshes))?;
    Ok(())
}

/// `I1 … I6` against `s`, one gnuplot data block per configuration.
fn scaling(cfg: &CampaignConfig, out: &OutputDir) -> CliResult<()> {
    let res = VariationResolution::from_mesh_n(cfg.grids.scaling_mesh_n);
    let c = scaling_campaign(cfg.samples.lemma43, cfg.seed, &cfg.scales(), &res).map_err(|e| CliError::Failed(e.into()))?;
    let mut body = String::from("# s I1 I2 I3 I4 I5 I6\n");
    let mut current = None;
    for p in &c.points {
        if current != Some(p.sample) {
            if current.is_some() {
                body.push_str("\n\n");
            }
            body.push_str(&format!("# sample {}: b = ({}, {}, {}, {}, {}), t = {}\n", p.sample, p.b1, p.b2, p.b3, p.b4, p.b5, p.t));
            current = Some(p.sample);
        }
        let cols: Vec<String> = std::iter::once(p.s).chain(p.terms()).map(|v| format!("{v:.12e}")).collect();
        body.push_str(&cols.join(" "));
        body.push('\n');
    }
    out.text("scaling.dat", &body)?;
    out.json("fits.json", &c.fits)?;
    Ok(())
}
