//! Cell/face meshes for the finite-volume discretization: 1D lines and
//! conforming multi-block boxes (2D blocks are one cell thick with unit
//! depth and carry only in-plane faces).

mod build;
mod csv;

pub use build::{build_1d_mesh, build_block_mesh, skew_mesh, BlockSpec};
pub use csv::{export_csv, import_csv};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::scalar::{real, Scalar};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatchId(pub usize);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub id: PatchId,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell<T> {
    pub centroid: Vec3<T>,
    pub volume: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteriorFace<T> {
    pub owner: usize,
    pub neighbor: usize,
    /// Face area vector oriented from owner into neighbor.
    pub area_vector: Vec3<T>,
    /// Owner centroid to neighbor centroid.
    pub ds: Vec3<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFace<T> {
    pub owner: usize,
    /// Outward area vector.
    pub area_vector: Vec3<T>,
    /// Owner centroid to face centroid.
    pub ds: Vec3<T>,
    pub patch: PatchId,
}

/// Construction-time node topology kept so a mesh can be skewed and its
/// geometry recomputed. Meshes imported from CSV do not carry it.
#[derive(Debug, Clone)]
pub(crate) struct Topology<T> {
    pub nodes: Vec<Vec3<T>>,
    /// Hex corners per cell, canonical order: index = dx + 2*dy + 4*dz.
    pub cell_nodes: Vec<[usize; 8]>,
    pub interior_face_nodes: Vec<[usize; 4]>,
    pub boundary_face_nodes: Vec<[usize; 4]>,
    /// Per node, bitmask of axes in which the node must not move.
    pub constraints: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct Mesh<T> {
    pub cells: Vec<Cell<T>>,
    pub interior_faces: Vec<InteriorFace<T>>,
    pub boundary_faces: Vec<BoundaryFace<T>>,
    pub patches: Vec<Patch>,
    pub(crate) topology: Option<Topology<T>>,
}

impl<T: Scalar> Mesh<T> {
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn patch_by_name(&self, name: &str) -> Option<PatchId> {
        self.patches.iter().find(|p| p.name == name).map(|p| p.id)
    }

    pub fn patch_name(&self, id: PatchId) -> &str {
        &self.patches[id.0].name
    }

    /// Index of the cell whose centroid is closest to `point`.
    pub fn nearest_cell(&self, point: Vec3<T>) -> usize {
        let mut best = 0usize;
        let mut best_d = T::infinity();
        for (i, c) in self.cells.iter().enumerate() {
            let d = (c.centroid - point).norm();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    pub fn total_volume(&self) -> T {
        self.cells.iter().map(|c| c.volume).fold(T::zero(), |a, b| a + b)
    }

    /// Check the geometric invariants; returns a descriptive error on the
    /// first violation.
    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.cells.iter().enumerate() {
            if !(c.volume > T::zero()) {
                return Err(Error::Geometry(format!("cell {i} has non-positive volume")));
            }
        }
        for (k, f) in self.interior_faces.iter().enumerate() {
            if !(f.area_vector.norm() > T::zero()) {
                return Err(Error::Geometry(format!("interior face {k} has zero area")));
            }
            if !(f.ds.dot(&f.area_vector) > T::zero()) {
                return Err(Error::Geometry(format!(
                    "interior face {k}: ds.A_f <= 0 (owner {} neighbor {})",
                    f.owner, f.neighbor
                )));
            }
        }
        for (k, f) in self.boundary_faces.iter().enumerate() {
            if !(f.area_vector.norm() > T::zero()) {
                return Err(Error::Geometry(format!("boundary face {k} has zero area")));
            }
            if !(f.ds.dot(&f.area_vector) > T::zero()) {
                return Err(Error::Geometry(format!("boundary face {k}: ds_b.A_f <= 0")));
            }
        }
        // watertightness: signed area vectors close each cell
        let n = self.cells.len();
        let mut sums = vec![Vec3::<T>::zero(); n];
        let mut areas = vec![T::zero(); n];
        for f in &self.interior_faces {
            sums[f.owner] += f.area_vector;
            sums[f.neighbor] += -f.area_vector;
            areas[f.owner] += f.area_vector.norm();
            areas[f.neighbor] += f.area_vector.norm();
        }
        for f in &self.boundary_faces {
            sums[f.owner] += f.area_vector;
            areas[f.owner] += f.area_vector.norm();
        }
        let tol = real::<T>(1e-12);
        for i in 0..n {
            if sums[i].norm() > tol * areas[i] {
                return Err(Error::Geometry(format!(
                    "cell {i} not watertight: |sum A| = {:?}",
                    sums[i].norm()
                )));
            }
        }
        Ok(())
    }

    /// Largest skewness sin(angle between ds and A_f) over interior faces.
    pub fn max_skewness(&self) -> T {
        let mut worst = T::zero();
        for f in &self.interior_faces {
            let cross = f.ds.cross(&f.area_vector).norm();
            let denom = f.ds.norm() * f.area_vector.norm();
            if denom > T::zero() {
                worst = worst.max(cross / denom);
            }
        }
        worst
    }
}
