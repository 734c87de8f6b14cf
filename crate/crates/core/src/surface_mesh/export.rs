use super::SurfaceMesh;
use crate::family_core::{param_hash, FamilyParameter};
use std::io::{self, Write};

/// `<hash(param)>_<grid_n>`.
pub fn mesh_file_stem(param: &FamilyParameter, grid_n: usize) -> String {
    format!("{}_{}", param_hash(param), grid_n)
}

/// ASCII OBJ with `v`/`f` records; faces keep the mesh orientation
/// (counterclockwise seen from the side the surface normal points to).
pub fn write_obj<W: Write>(mesh: &SurfaceMesh, mut out: W) -> io::Result<()> {
    writeln!(out, "# {} vertices, {} triangles", mesh.vertices.len(), mesh.triangles.len())?;
    for v in &mesh.vertices {
        writeln!(out, "v {:.12} {:.12} {:.12}", v[0], v[1], v[2])?;
    }
    for t in &mesh.triangles {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    out.flush()
}

/// Binary little-endian PLY with double-precision vertices.
pub fn write_ply<W: Write>(mesh: &SurfaceMesh, mut out: W) -> io::Result<()> {
    write!(
        out,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\nelement face {}\nproperty list uchar uint vertex_indices\nend_header\n",
        mesh.vertices.len(),
        mesh.triangles.len()
    )?;
    for v in &mesh.vertices {
        for c in v {
            out.write_all(&c.to_le_bytes())?;
        }
    }
    for t in &mesh.triangles {
        out.write_all(&[3u8])?;
        for i in t {
            out.write_all(&i.to_le_bytes())?;
        }
    }
    out.flush()
}
