//! Problem description: mean-flow fields, boundary conditions, flame model
//! and solver settings, loadable from a JSON case file.
//!
//! Case files keep user-facing frequency bounds in Hz; everything is
//! converted to angular frequency [rad/s] at load time.

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{self, BlockSpec, Mesh, PatchId};
use crate::scalar::{cplx, real, two_pi, Cplx, Scalar};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const CASE_DIR_ENV: &str = "RESONARE_CASE_DIR";

// ------------------------------------------------------------ domain types

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFlowField<T> {
    pub sound_speed: Vec<T>,
    pub density: Vec<T>,
    pub gamma: Vec<T>,
    /// Normalized heat release in [0, 1], peak exactly 1 inside the flame.
    pub q_norm: Vec<T>,
}

impl<T: Scalar> MeanFlowField<T> {
    pub fn validate(&self, n_cells: usize) -> Result<()> {
        if self.sound_speed.len() != n_cells
            || self.density.len() != n_cells
            || self.gamma.len() != n_cells
            || self.q_norm.len() != n_cells
        {
            return Err(Error::CaseLoad("fields: per-cell arrays must match cell count".into()));
        }
        if self.sound_speed.iter().any(|&v| !(v > T::zero())) {
            return Err(Error::CaseLoad("fields.c: sound speed must be positive".into()));
        }
        if self.density.iter().any(|&v| !(v > T::zero())) {
            return Err(Error::CaseLoad("fields.rho: density must be positive".into()));
        }
        if self.gamma.iter().any(|&v| !(v > T::one())) {
            return Err(Error::CaseLoad("fields.gamma: must exceed 1".into()));
        }
        let mut peak = T::zero();
        for &q in &self.q_norm {
            if q < T::zero() || q > T::one() {
                return Err(Error::CaseLoad("fields.q_norm: values must lie in [0, 1]".into()));
            }
            peak = peak.max(q);
        }
        if peak > T::zero() && (peak - T::one()).abs() > real::<T>(1e-12) {
            return Err(Error::CaseLoad("fields.q_norm: nonzero field must peak at exactly 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind<T> {
    Reflecting,
    ZeroPressure,
    ConstantImpedance(Cplx<T>),
    GeneralImpedance { z0: Cplx<T>, z1: Cplx<T>, z2: Cplx<T> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec<T> {
    pub patch: PatchId,
    pub kind: BoundaryKind<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtdTerm<T> {
    pub eta: T,
    pub tau: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlameModel<T> {
    pub eta: T,
    pub tau: T,
    pub ref_cell: usize,
    pub ref_dir: Vec3<T>,
    pub rho_ref: T,
    pub q_tot: T,
    pub u_bulk: T,
    /// When nonempty these supersede (eta, tau).
    pub dtd_terms: Vec<DtdTerm<T>>,
}

impl<T: Scalar> FlameModel<T> {
    /// The active delay terms: the DTD list, or the single (eta, tau) pair.
    pub fn delay_terms(&self) -> Vec<DtdTerm<T>> {
        if self.dtd_terms.is_empty() {
            vec![DtdTerm { eta: self.eta, tau: self.tau }]
        } else {
            self.dtd_terms.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientOrder {
    First,
    Second,
}

/// Rectangle in the complex omega plane [rad/s].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region<T> {
    pub re_min: T,
    pub re_max: T,
    pub im_min: T,
    pub im_max: T,
}

impl<T: Scalar> Region<T> {
    pub fn contains(&self, w: Cplx<T>, inflate: T) -> bool {
        let dre = (self.re_max - self.re_min) * inflate;
        let dim = (self.im_max - self.im_min) * inflate;
        w.re >= self.re_min - dre
            && w.re <= self.re_max + dre
            && w.im >= self.im_min - dim
            && w.im <= self.im_max + dim
    }

    pub fn centre(&self) -> Cplx<T> {
        let half = real::<T>(0.5);
        Cplx::new((self.re_min + self.re_max) * half, (self.im_min + self.im_max) * half)
    }

    pub fn diameter(&self) -> T {
        let dre = self.re_max - self.re_min;
        let dim = self.im_max - self.im_min;
        (dre * dre + dim * dim).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    /// Shift target [rad/s].
    pub target: Cplx<T>,
    pub nev: usize,
    pub ncv: usize,
    pub tol: T,
    pub restart_fraction: T,
    pub nleigs_degree_max: usize,
    pub region: Option<Region<T>>,
    pub gradient_order: GradientOrder,
    /// Modes below this |omega| are dropped (gauge/constant mode filter).
    pub omega_min: T,
}

impl<T: Scalar> SolverConfig<T> {
    pub fn with_nev(nev: usize) -> Self {
        SolverConfig {
            target: Cplx::new(T::zero(), T::zero()),
            nev,
            ncv: (4 * nev).max(20),
            tol: real(1e-8),
            restart_fraction: real(0.5),
            nleigs_degree_max: 40,
            region: None,
            gradient_order: GradientOrder::Second,
            omega_min: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nev < 1 {
            return Err(Error::CaseLoad("solver.nev: need at least one mode".into()));
        }
        if self.ncv < 2 * self.nev {
            return Err(Error::CaseLoad("solver.ncv: must be at least 2*nev".into()));
        }
        if !(self.restart_fraction > T::zero() && self.restart_fraction < T::one()) {
            return Err(Error::CaseLoad("solver.restart_fraction: must lie in (0, 1)".into()));
        }
        if !(self.tol > T::zero()) {
            return Err(Error::CaseLoad("solver.tol: must be positive".into()));
        }
        if let Some(r) = &self.region {
            if !(r.re_max > r.re_min) || !(r.im_max > r.im_min) {
                return Err(Error::CaseLoad("solver.region: empty rectangle".into()));
            }
        }
        Ok(())
    }
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self::with_nev(6)
    }
}

/// A fully loaded, validated case.
#[derive(Debug, Clone)]
pub struct Case<T: Scalar> {
    pub mesh: Mesh<T>,
    pub fields: MeanFlowField<T>,
    pub boundaries: Vec<BoundarySpec<T>>,
    pub flame: Option<FlameModel<T>>,
    pub config: SolverConfig<T>,
    /// Distance from the requested flame reference point to the snapped
    /// cell centroid, when a flame is present.
    pub ref_snap_distance: Option<T>,
    /// The parsed document, kept for exact round-tripping.
    pub document: CaseFile<T>,
}

// ------------------------------------------------------------- field ops

/// Constant fields with no heat release.
pub fn uniform_fields<T: Scalar>(
    mesh: &Mesh<T>,
    sound_speed: T,
    density: T,
    gamma: T,
) -> Result<MeanFlowField<T>> {
    if !(sound_speed > T::zero()) || !(density > T::zero()) {
        return Err(Error::invalid("uniform fields need positive c and rho"));
    }
    if !(gamma > T::one()) {
        return Err(Error::invalid("gamma must exceed 1"));
    }
    let n = mesh.n_cells();
    Ok(MeanFlowField {
        sound_speed: vec![sound_speed; n],
        density: vec![density; n],
        gamma: vec![gamma; n],
        q_norm: vec![T::zero(); n],
    })
}

/// Tanh transition of c and rho centred at `x_flame` over `thickness`,
/// with a normalized Gaussian heat-release profile of the same width.
#[allow(clippy::too_many_arguments)]
pub fn two_zone_fields<T: Scalar>(
    mesh: &Mesh<T>,
    x_flame: T,
    thickness: T,
    c_cold: T,
    c_hot: T,
    rho_cold: T,
    rho_hot: T,
    gamma: T,
) -> Result<MeanFlowField<T>> {
    if !(thickness > T::zero()) {
        return Err(Error::invalid("two_zone thickness must be positive"));
    }
    if !(c_cold > T::zero() && c_hot > T::zero() && rho_cold > T::zero() && rho_hot > T::zero()) {
        return Err(Error::invalid("two_zone speeds and densities must be positive"));
    }
    if !(gamma > T::one()) {
        return Err(Error::invalid("gamma must exceed 1"));
    }
    let (mut x_min, mut x_max) = (T::infinity(), T::neg_infinity());
    for c in &mesh.cells {
        x_min = x_min.min(c.centroid.x());
        x_max = x_max.max(c.centroid.x());
    }
    if x_flame < x_min || x_flame > x_max {
        return Err(Error::invalid("x_flame lies outside the mesh"));
    }
    let n = mesh.n_cells();
    let two = real::<T>(2.0);
    let sigma = thickness / two;
    let mut f = MeanFlowField {
        sound_speed: Vec::with_capacity(n),
        density: Vec::with_capacity(n),
        gamma: vec![gamma; n],
        q_norm: Vec::with_capacity(n),
    };
    for c in &mesh.cells {
        let x = c.centroid.x();
        let blend = (T::one() + ((x - x_flame) * two / thickness).tanh()) / two;
        f.sound_speed.push(c_cold + (c_hot - c_cold) * blend);
        f.density.push(rho_cold + (rho_hot - rho_cold) * blend);
        let z = (x - x_flame) / sigma;
        f.q_norm.push((-z * z / two).exp());
    }
    let peak = f.q_norm.iter().cloned().fold(T::zero(), T::max);
    let floor = real::<T>(1e-12);
    for q in &mut f.q_norm {
        *q = *q / peak;
        if *q < floor {
            *q = T::zero();
        }
    }
    Ok(f)
}

// -------------------------------------------------------------- case file

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct CaseFile<T: Scalar> {
    pub mesh: MeshSection<T>,
    pub fields: FieldsSection<T>,
    pub boundaries: Vec<BoundaryEntry<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flame: Option<FlameSection<T>>,
    #[serde(default)]
    pub solver: SolverSection<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields, bound = "T: Scalar")]
pub enum MeshSection<T: Scalar> {
    Line { length: T, cells: usize },
    Blocks(Vec<BlockEntry<T>>),
    Csv { cells: String, faces: String },
}

/// Axis-aligned block; 2-component arrays describe a 2D block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct BlockEntry<T: Scalar> {
    pub origin: Vec<T>,
    pub extents: Vec<T>,
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields, bound = "T: Scalar")]
pub enum FieldsSection<T: Scalar> {
    Uniform {
        c: T,
        rho: T,
        gamma: T,
    },
    TwoZone {
        x_flame: T,
        thickness: T,
        c_cold: T,
        c_hot: T,
        rho_cold: T,
        rho_hot: T,
        gamma: T,
    },
    PerCell {
        c: Vec<T>,
        rho: Vec<T>,
        gamma: Vec<T>,
        q_norm: Vec<T>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct BoundaryEntry<T: Scalar> {
    pub patch: String,
    pub kind: BoundaryKindEntry<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields, bound = "T: Scalar")]
pub enum BoundaryKindEntry<T: Scalar> {
    Reflecting,
    ZeroPressure,
    /// [re, im] of the constant impedance Z.
    ConstantImpedance([T; 2]),
    /// 1/Z = 1/Z0 + omega Z1 + Z2/omega, each as [re, im].
    GeneralImpedance { z0: [T; 2], z1: [T; 2], z2: [T; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct FlameSection<T: Scalar> {
    pub eta: T,
    pub tau: T,
    pub ref_point: Vec<T>,
    pub ref_dir: Vec<T>,
    pub q_tot: T,
    pub u_bulk: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_ref: Option<T>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dtd_terms: Vec<DtdEntry<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct DtdEntry<T: Scalar> {
    pub eta: T,
    pub tau: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct SolverSection<T: Scalar> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_hz: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nev: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ncv: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart_fraction: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nleigs_degree_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionEntry<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_order: Option<GradientOrder>,
    /// [rad/s]; defaults to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_min: Option<T>,
}

impl<T: Scalar> Default for SolverSection<T> {
    fn default() -> Self {
        SolverSection {
            target_hz: None,
            nev: None,
            ncv: None,
            tol: None,
            restart_fraction: None,
            nleigs_degree_max: None,
            region: None,
            gradient_order: None,
            omega_min: None,
        }
    }
}

/// Search region: frequencies in Hz, growth rates in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct RegionEntry<T: Scalar> {
    pub f_min_hz: T,
    pub f_max_hz: T,
    pub growth_min: T,
    pub growth_max: T,
}

// ---------------------------------------------------------------- loading

/// Resolve `path` against the working directory, then RESONARE_CASE_DIR.
pub fn resolve_case_path(path: &Path) -> PathBuf {
    if path.is_absolute() || path.exists() {
        return path.to_path_buf();
    }
    if let Ok(dir) = std::env::var(CASE_DIR_ENV) {
        let cand = Path::new(&dir).join(path);
        if cand.exists() {
            return cand;
        }
    }
    path.to_path_buf()
}

pub fn load_case<T: Scalar>(path: &Path) -> Result<Case<T>> {
    let resolved = resolve_case_path(path);
    let text = std::fs::read_to_string(&resolved)
        .map_err(|e| Error::CaseLoad(format!("{}: {e}", resolved.display())))?;
    let doc: CaseFile<T> = serde_json::from_str(&text)
        .map_err(|e| Error::CaseLoad(format!("{}: {e}", resolved.display())))?;
    let base = resolved.parent().map(Path::to_path_buf).unwrap_or_default();
    instantiate_case(doc, &base)
}

pub fn write_case<T: Scalar>(doc: &CaseFile<T>, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Build the runtime case from a parsed document.
pub fn instantiate_case<T: Scalar>(doc: CaseFile<T>, base_dir: &Path) -> Result<Case<T>> {
    let mesh = build_mesh_section(&doc.mesh, base_dir)?;
    let n = mesh.n_cells();

    let fields = match &doc.fields {
        FieldsSection::Uniform { c, rho, gamma } => uniform_fields(&mesh, *c, *rho, *gamma)
            .map_err(|e| Error::CaseLoad(format!("fields.uniform: {e}")))?,
        FieldsSection::TwoZone { x_flame, thickness, c_cold, c_hot, rho_cold, rho_hot, gamma } => {
            two_zone_fields(&mesh, *x_flame, *thickness, *c_cold, *c_hot, *rho_cold, *rho_hot, *gamma)
                .map_err(|e| Error::CaseLoad(format!("fields.two_zone: {e}")))?
        }
        FieldsSection::PerCell { c, rho, gamma, q_norm } => MeanFlowField {
            sound_speed: c.clone(),
            density: rho.clone(),
            gamma: gamma.clone(),
            q_norm: q_norm.clone(),
        },
    };
    fields.validate(n)?;

    // boundaries: every mesh patch exactly once
    let mut boundaries = Vec::with_capacity(doc.boundaries.len());
    let mut seen = vec![false; mesh.patches.len()];
    for entry in &doc.boundaries {
        let pid = mesh
            .patch_by_name(&entry.patch)
            .ok_or_else(|| Error::CaseLoad(format!("boundaries: unknown patch '{}'", entry.patch)))?;
        if seen[pid.0] {
            return Err(Error::CaseLoad(format!("boundaries: patch '{}' listed twice", entry.patch)));
        }
        seen[pid.0] = true;
        let kind = match &entry.kind {
            BoundaryKindEntry::Reflecting => BoundaryKind::Reflecting,
            BoundaryKindEntry::ZeroPressure => BoundaryKind::ZeroPressure,
            BoundaryKindEntry::ConstantImpedance(z) => {
                let zc = Cplx::new(z[0], z[1]);
                if zc.norm() == T::zero() {
                    // zero impedance falls back to the zero-pressure condition
                    BoundaryKind::ZeroPressure
                } else {
                    BoundaryKind::ConstantImpedance(zc)
                }
            }
            BoundaryKindEntry::GeneralImpedance { z0, z1, z2 } => BoundaryKind::GeneralImpedance {
                z0: Cplx::new(z0[0], z0[1]),
                z1: Cplx::new(z1[0], z1[1]),
                z2: Cplx::new(z2[0], z2[1]),
            },
        };
        boundaries.push(BoundarySpec { patch: pid, kind });
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::CaseLoad(format!(
            "boundaries: patch '{}' has no boundary condition",
            mesh.patch_name(PatchId(missing))
        )));
    }

    // flame
    let mut ref_snap_distance = None;
    let flame = match &doc.flame {
        None => None,
        Some(f) => {
            if !(f.u_bulk > T::zero()) {
                return Err(Error::CaseLoad("flame.u_bulk: must be positive".into()));
            }
            if !(f.q_tot > T::zero()) {
                return Err(Error::CaseLoad("flame.q_tot: must be positive".into()));
            }
            if f.tau < T::zero() {
                return Err(Error::CaseLoad("flame.tau: must be nonnegative".into()));
            }
            for (i, t) in f.dtd_terms.iter().enumerate() {
                if t.tau < T::zero() {
                    return Err(Error::CaseLoad(format!("flame.dtd_terms[{i}].tau: must be nonnegative")));
                }
            }
            let rp = vec3_from(&f.ref_point, "flame.ref_point")?;
            let rd = vec3_from(&f.ref_dir, "flame.ref_dir")?;
            if rd.norm() == T::zero() {
                return Err(Error::CaseLoad("flame.ref_dir: zero vector".into()));
            }
            let ref_cell = mesh.nearest_cell(rp);
            ref_snap_distance = Some((mesh.cells[ref_cell].centroid - rp).norm());
            let rho_ref = match f.rho_ref {
                Some(r) => {
                    if !(r > T::zero()) {
                        return Err(Error::CaseLoad("flame.rho_ref: must be positive".into()));
                    }
                    r
                }
                None => fields.density[ref_cell],
            };
            Some(FlameModel {
                eta: f.eta,
                tau: f.tau,
                ref_cell,
                ref_dir: rd.normalized(),
                rho_ref,
                q_tot: f.q_tot,
                u_bulk: f.u_bulk,
                dtd_terms: f.dtd_terms.iter().map(|t| DtdTerm { eta: t.eta, tau: t.tau }).collect(),
            })
        }
    };

    // solver settings with defaults
    let s = &doc.solver;
    let nev = s.nev.unwrap_or(6);
    let mut config = SolverConfig::with_nev(nev);
    if let Some(t) = s.target_hz {
        config.target = cplx::<T>(0.0, 0.0) + Cplx::new(t * two_pi::<T>(), T::zero());
    }
    if let Some(v) = s.ncv {
        config.ncv = v;
    }
    if let Some(v) = s.tol {
        config.tol = v;
    }
    if let Some(v) = s.restart_fraction {
        config.restart_fraction = v;
    }
    if let Some(v) = s.nleigs_degree_max {
        config.nleigs_degree_max = v;
    }
    if let Some(v) = s.gradient_order {
        config.gradient_order = v;
    }
    if let Some(v) = s.omega_min {
        config.omega_min = v;
    }
    if let Some(r) = &s.region {
        config.region = Some(Region {
            re_min: r.f_min_hz * two_pi::<T>(),
            re_max: r.f_max_hz * two_pi::<T>(),
            im_min: r.growth_min,
            im_max: r.growth_max,
        });
    }
    config.validate()?;
    if flame.is_some() && config.region.is_none() {
        return Err(Error::CaseLoad(
            "solver.region: required when a flame model is present".into(),
        ));
    }

    Ok(Case { mesh, fields, boundaries, flame, config, ref_snap_distance, document: doc })
}

fn vec3_from<T: Scalar>(v: &[T], what: &str) -> Result<Vec3<T>> {
    match v.len() {
        2 => Ok(Vec3::new(v[0], v[1], T::zero())),
        3 => Ok(Vec3::new(v[0], v[1], v[2])),
        _ => Err(Error::CaseLoad(format!("{what}: need 2 or 3 components"))),
    }
}

pub fn build_mesh_section<T: Scalar>(section: &MeshSection<T>, base_dir: &Path) -> Result<Mesh<T>> {
    match section {
        MeshSection::Line { length, cells } => mesh::build_1d_mesh(*length, *cells),
        MeshSection::Blocks(entries) => {
            let mut blocks = Vec::with_capacity(entries.len());
            for (i, e) in entries.iter().enumerate() {
                let dims = [e.origin.len(), e.extents.len(), e.cells.len()];
                if dims.iter().any(|&d| d != dims[0]) || (dims[0] != 2 && dims[0] != 3) {
                    return Err(Error::CaseLoad(format!(
                        "mesh.blocks[{i}]: origin/extents/cells need matching length 2 or 3"
                    )));
                }
                let b = if dims[0] == 2 {
                    BlockSpec::new_2d(
                        [e.origin[0], e.origin[1]],
                        [e.extents[0], e.extents[1]],
                        [e.cells[0], e.cells[1]],
                    )
                } else {
                    BlockSpec::new_3d(
                        [e.origin[0], e.origin[1], e.origin[2]],
                        [e.extents[0], e.extents[1], e.extents[2]],
                        [e.cells[0], e.cells[1], e.cells[2]],
                    )
                };
                blocks.push(b);
            }
            mesh::build_block_mesh(&blocks)
        }
        MeshSection::Csv { cells, faces } => {
            let cp = base_dir.join(cells);
            let fp = base_dir.join(faces);
            mesh::import_csv(&cp, &fp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_1d_mesh;

    fn resonator_doc() -> CaseFile<f64> {
        serde_json::from_str(
            r#"{
            "mesh": {"blocks": [
                {"origin": [0.0, 0.0, 0.0], "extents": [0.1, 0.08, 0.08], "cells": [10, 8, 8]},
                {"origin": [0.1, 0.03, 0.03], "extents": [0.02, 0.02, 0.02], "cells": [2, 2, 2]}
            ]},
            "fields": {"uniform": {"c": 347.73, "rho": 1.174, "gamma": 1.4}},
            "boundaries": [
                {"patch": "b0_xmin", "kind": "reflecting"},
                {"patch": "b0_xmax", "kind": "reflecting"},
                {"patch": "b0_ymin", "kind": "reflecting"},
                {"patch": "b0_ymax", "kind": "reflecting"},
                {"patch": "b0_zmin", "kind": "reflecting"},
                {"patch": "b0_zmax", "kind": "reflecting"},
                {"patch": "b1_xmax", "kind": "zero_pressure"},
                {"patch": "b1_ymin", "kind": "reflecting"},
                {"patch": "b1_ymax", "kind": "reflecting"},
                {"patch": "b1_zmin", "kind": "reflecting"},
                {"patch": "b1_zmax", "kind": "reflecting"}
            ],
            "solver": {"nev": 8}
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn resonator_case_loads_without_flame() {
        let case = instantiate_case(resonator_doc(), Path::new(".")).unwrap();
        assert!(case.flame.is_none());
        assert_eq!(case.config.nev, 8);
        assert_eq!(case.config.ncv, 32);
        assert!((case.config.tol - 1e-8).abs() < 1e-20);
        assert_eq!(case.mesh.n_cells(), 10 * 8 * 8 + 8);
    }

    #[test]
    fn zero_impedance_normalizes_to_zero_pressure() {
        let mut doc = resonator_doc();
        doc.boundaries[6].kind = BoundaryKindEntry::ConstantImpedance([0.0, 0.0]);
        let case = instantiate_case(doc, Path::new(".")).unwrap();
        assert!(matches!(case.boundaries[6].kind, BoundaryKind::ZeroPressure));
    }

    #[test]
    fn unknown_patch_named_in_error() {
        let mut doc = resonator_doc();
        doc.boundaries[0].patch = "nonsense".into();
        let err = instantiate_case(doc, Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("nonsense"), "{err}");
    }

    #[test]
    fn missing_patch_named_in_error() {
        let mut doc = resonator_doc();
        doc.boundaries.pop();
        let err = instantiate_case(doc, Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("b1_zmax"), "{err}");
    }

    #[test]
    fn case_file_round_trips_exactly() {
        let doc = resonator_doc();
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let doc2: CaseFile<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(doc, doc2);
    }

    #[test]
    fn uniform_fields_reject_bad_values() {
        let m = build_1d_mesh::<f64>(1.0, 4).unwrap();
        assert!(uniform_fields(&m, -1.0, 1.0, 1.4).is_err());
        assert!(uniform_fields(&m, 340.0, 1.2, 1.0).is_err());
        let f = uniform_fields(&m, 347.73, 1.174, 1.4).unwrap();
        assert!(f.q_norm.iter().all(|&q| q == 0.0));
    }

    #[test]
    fn two_zone_monotone_and_peaked() {
        let m = build_1d_mesh::<f64>(0.5, 200).unwrap();
        let f = two_zone_fields(&m, 0.25, 0.025, 347.0, 694.0, 1.17, 0.585, 1.4).unwrap();
        for w in f.sound_speed.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "c not monotone");
        }
        let (imax, _) = f
            .q_norm
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let x_peak = m.cells[imax].centroid.x();
        assert!((x_peak - 0.25).abs() <= 0.5 / 200.0, "peak at {x_peak}");
        assert_eq!(f.q_norm[imax], 1.0);
    }

    #[test]
    fn two_zone_wide_flame_covers_half_the_duct() {
        let m = build_1d_mesh::<f64>(0.5, 100).unwrap();
        let f = two_zone_fields(&m, 0.25, 0.5, 347.0, 694.0, 1.17, 0.585, 1.4).unwrap();
        let over_half = f.q_norm.iter().filter(|&&q| q > 0.5).count();
        assert!(over_half > 50, "only {over_half} cells above 0.5");
    }

    #[test]
    fn two_zone_degenerate_equal_speeds() {
        let m = build_1d_mesh::<f64>(0.5, 50).unwrap();
        let f = two_zone_fields(&m, 0.25, 0.025, 400.0, 400.0, 1.0, 1.0, 1.4).unwrap();
        assert!(f.sound_speed.iter().all(|&c| (c - 400.0).abs() < 1e-12));
    }

    #[test]
    fn two_zone_outside_domain_rejected() {
        let m = build_1d_mesh::<f64>(0.5, 50).unwrap();
        assert!(two_zone_fields(&m, 0.9, 0.025, 347.0, 694.0, 1.17, 0.585, 1.4).is_err());
    }

    #[test]
    fn flame_requires_region() {
        let m = r#"{
            "mesh": {"line": {"length": 0.5, "cells": 16}},
            "fields": {"two_zone": {"x_flame": 0.25, "thickness": 0.025, "c_cold": 347.73,
                       "c_hot": 695.46, "rho_cold": 1.174, "rho_hot": 0.2935, "gamma": 1.4}},
            "boundaries": [
                {"patch": "left", "kind": "reflecting"},
                {"patch": "right", "kind": "zero_pressure"}
            ],
            "flame": {"eta": 5.0, "tau": 1e-4, "ref_point": [0.2501, 0.5, 0.5],
                      "ref_dir": [1.0, 0.0, 0.0], "q_tot": 6e5, "u_bulk": 1.0, "rho_ref": 1.174}
        }"#;
        let doc: CaseFile<f64> = serde_json::from_str(m).unwrap();
        let err = instantiate_case(doc.clone(), Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("region"), "{err}");
        let mut doc = doc;
        doc.solver.region = Some(RegionEntry {
            f_min_hz: 50.0,
            f_max_hz: 1800.0,
            growth_min: -300.0,
            growth_max: 300.0,
        });
        let case = instantiate_case(doc, Path::new(".")).unwrap();
        let flame = case.flame.unwrap();
        assert_eq!(flame.rho_ref, 1.174);
        // snapped near x = 0.25
        assert!((case.mesh.cells[flame.ref_cell].centroid.x() - 0.25).abs() < 0.5 / 16.0);
        assert!(case.ref_snap_distance.unwrap() < 0.72); // lateral offset from unit cross-section
    }
}
