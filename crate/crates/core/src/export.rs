//! Text exporters: OBJ meshes with scalar sidecars, and CSV tables.
//!
//! Floats are written in shortest round-trip form, so re-parsing recovers the
//! exact bits and repeated runs are byte-identical.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::curve::SpaceCurve;
use crate::error::{Error, Result};
use crate::ricci::ResidualPoint;
use crate::ruled::{shape_operator_sample, RuledPatch, SurfaceRecord};

/// Shortest round-trip decimal; scientific outside `[1e-5, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Vertices of a `(t, u)` grid in row-major order (`t` outer), quads, and per-vertex scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshBuffer {
    pub nt: usize,
    pub nu: usize,
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices, counter-clockwise in `(t, u)`.
    pub quads: Vec<[usize; 4]>,
    pub channels: BTreeMap<String, Vec<f64>>,
}

impl MeshBuffer {
    /// Grid connectivity for `nt × nu` vertices.
    pub fn grid(nt: usize, nu: usize, vertices: Vec<[f64; 3]>) -> Result<Self> {
        if nt < 2 || nu < 2 {
            return Err(Error::InvalidArgument(format!("mesh grid must be at least 2x2, got {nt}x{nu}")));
        }
        if vertices.len() != nt * nu {
            return Err(Error::InvalidArgument(format!("{} vertices for a {nt}x{nu} grid", vertices.len())));
        }
        let idx = |i: usize, j: usize| i * nu + j;
        let quads = (0..nt - 1)
            .flat_map(|i| (0..nu - 1).map(move |j| [idx(i, j), idx(i, j + 1), idx(i + 1, j + 1), idx(i + 1, j)]))
            .collect();
        Ok(MeshBuffer { nt, nu, vertices, quads, channels: BTreeMap::new() })
    }

    /// Sample a patch on its rectangle; channels `K` and `H` from the fundamental
    /// forms, `NaN` where the surface is singular.
    pub fn from_patch(patch: &RuledPatch, nt: usize, nu: usize) -> Result<Self> {
        let ts = patch.t_range().linspace(nt);
        let us = patch.u_range().linspace(nu);
        let samples: Vec<([f64; 3], f64, f64)> = ts
            .par_iter()
            .flat_map_iter(|&t| us.iter().map(move |&u| (t, u)))
            .map(|(t, u)| {
                let p = patch.point(t, u)?;
                let (k, h) = match shape_operator_sample(patch, t, u) {
                    Ok(s) => (s.k, s.h),
                    Err(Error::Degenerate { .. }) => (f64::NAN, f64::NAN),
                    Err(e) => return Err(e),
                };
                Ok(([p.x, p.y, p.z], k, h))
            })
            .collect::<Result<_>>()?;
        let mut mesh = MeshBuffer::grid(nt, nu, samples.iter().map(|s| s.0).collect())?;
        mesh.channels.insert("K".into(), samples.iter().map(|s| s.1).collect());
        mesh.channels.insert("H".into(), samples.iter().map(|s| s.2).collect());
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if n != self.nt * self.nu {
            return Err(Error::InvalidArgument(format!("{n} vertices for a {}x{} grid", self.nt, self.nu)));
        }
        if let Some(q) = self.quads.iter().find(|q| q.iter().any(|&i| i >= n)) {
            return Err(Error::InvalidArgument(format!("quad {q:?} indexes past {n} vertices")));
        }
        if let Some((name, v)) = self.channels.iter().find(|(_, v)| v.len() != n) {
            return Err(Error::InvalidArgument(format!("channel `{name}` has {} values for {n} vertices", v.len())));
        }
        Ok(())
    }
}

/// `v x y z` lines then `f a b c d` quads with one-based indices.
pub fn write_obj_to<W: Write>(mesh: &MeshBuffer, out: &mut W) -> io::Result<()> {
    writeln!(out, "# {}x{} ruled surface grid", mesh.nt, mesh.nu)?;
    for v in &mesh.vertices {
        writeln!(out, "v {} {} {}", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2]))?;
    }
    for q in &mesh.quads {
        writeln!(out, "f {} {} {} {}", q[0] + 1, q[1] + 1, q[2] + 1, q[3] + 1)?;
    }
    Ok(())
}

/// `vertex,<channel>...` keyed by one-based vertex index, matching OBJ numbering.
pub fn write_scalars_to<W: Write>(mesh: &MeshBuffer, out: &mut W) -> io::Result<()> {
    let names: Vec<&String> = mesh.channels.keys().collect();
    write!(out, "vertex")?;
    for n in &names {
        write!(out, ",{n}")?;
    }
    writeln!(out)?;
    for i in 0..mesh.vertices.len() {
        write!(out, "{}", i + 1)?;
        for n in &names {
            write!(out, ",{}", fmt_f64(mesh.channels[*n][i]))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Sidecar path for a mesh: `surface.obj` → `surface.scalars.csv`.
pub fn scalar_sidecar_path(obj: &Path) -> PathBuf {
    obj.with_extension("scalars.csv")
}

/// Write the OBJ and, when the mesh has channels, its scalar sidecar.
pub fn write_obj(mesh: &MeshBuffer, path: &Path) -> Result<(), ExportError> {
    mesh.validate()?;
    write_file(path, |w| write_obj_to(mesh, w))?;
    if !mesh.channels.is_empty() {
        write_file(&scalar_sidecar_path(path), |w| write_scalars_to(mesh, w))?;
    }
    Ok(())
}

/// Failures while exporting: geometry or I/O.
#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error(transparent)]
    Geometry(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

pub fn write_file<F>(path: &Path, body: F) -> Result<(), ExportError>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let io = |source| ExportError::Io { path: path.to_path_buf(), source };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    body(&mut w).map_err(io)?;
    w.flush().map_err(io)
}

/// `t,x,y,z` at `n` equally spaced parameters.
pub fn write_curve_csv<W: Write>(curve: &SpaceCurve, n: usize, out: &mut W) -> Result<(), ExportError> {
    let rows: Vec<(f64, [f64; 3])> = curve
        .domain()
        .linspace(n)
        .into_iter()
        .map(|t| curve.position(t).map(|p| (t, [p.x, p.y, p.z])))
        .collect::<Result<_>>()?;
    let io = |source| ExportError::Io { path: PathBuf::from("<curve csv>"), source };
    writeln!(out, "t,x,y,z").map_err(io)?;
    for (t, p) in rows {
        writeln!(out, "{},{},{},{}", fmt_f64(t), fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2])).map_err(io)?;
    }
    Ok(())
}

pub const SURFACE_HEADER: &str = "t,u,E,F,G,K_closed,K_forms,H_closed,H_forms,lambda";

/// Surface table; `H_closed` is empty for non-canonical patches.
pub fn write_surface_csv<W: Write>(records: &[SurfaceRecord], out: &mut W) -> io::Result<()> {
    writeln!(out, "{SURFACE_HEADER}")?;
    for r in records {
        let hc = r.h_closed.map(fmt_f64).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.u),
            fmt_f64(r.e),
            fmt_f64(r.f),
            fmt_f64(r.g),
            fmt_f64(r.k_closed),
            fmt_f64(r.k_forms),
            hc,
            fmt_f64(r.h_forms),
            fmt_f64(r.lambda)
        )?;
    }
    Ok(())
}

pub fn write_residual_csv<W: Write>(points: &[ResidualPoint], out: &mut W) -> io::Result<()> {
    writeln!(out, "t,u,K,residual,normalized")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(p.t),
            fmt_f64(p.u),
            fmt_f64(p.k),
            fmt_f64(p.residual),
            fmt_f64(p.normalized)
        )?;
    }
    Ok(())
}
