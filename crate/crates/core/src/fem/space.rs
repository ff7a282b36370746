use std::collections::BTreeMap;

use super::{basis, Degree};
use crate::error::Result;
use crate::mesh::{Mesh, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDof {
    pub dof: usize,
    /// Side markers of the boundary edges touching this dof (two at corners).
    pub markers: Vec<u32>,
}

/// P1 or P2 Lagrange space on a mesh.
///
/// Dofs are numbered vertices first, then (P2) one per mesh edge in the
/// mesh's edge order.
#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: Mesh,
    degree: Degree,
    dof_coordinates: Vec<Point>,
    element_dofs: Vec<usize>,
    boundary_dofs: Vec<BoundaryDof>,
    boundary_slot: Vec<Option<usize>>,
    boundary_edge_dofs: Vec<Vec<usize>>,
}

impl FeSpace {
    pub fn new(mesh: Mesh, degree: usize) -> Result<Self> {
        let degree = Degree::try_from(degree)?;
        let nv = mesh.vertices().len();
        let mut dof_coordinates = mesh.vertices().to_vec();
        if degree == Degree::P2 {
            dof_coordinates.extend(mesh.edges().iter().map(|&[a, b]| {
                let (p, q) = (mesh.vertices()[a], mesh.vertices()[b]);
                [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
            }));
        }

        let nloc = basis::local_dofs(degree);
        let mut element_dofs = Vec::with_capacity(nloc * mesh.triangles().len());
        for (tri, te) in mesh.triangles().iter().zip(mesh.triangle_edges()) {
            element_dofs.extend_from_slice(tri);
            if degree == Degree::P2 {
                element_dofs.extend(te.iter().map(|e| nv + e));
            }
        }

        let mut markers: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        let mut boundary_edge_dofs = Vec::with_capacity(mesh.boundary_edges().len());
        for (be, &e) in mesh.boundary_edges().iter().zip(mesh.boundary_edge_ids()) {
            let mut dofs = be.vertices.to_vec();
            if degree == Degree::P2 {
                dofs.push(nv + e);
            }
            for &d in &dofs {
                let m = markers.entry(d).or_default();
                if !m.contains(&be.marker) {
                    m.push(be.marker);
                }
            }
            boundary_edge_dofs.push(dofs);
        }
        let boundary_dofs: Vec<BoundaryDof> = markers
            .into_iter()
            .map(|(dof, mut markers)| {
                markers.sort_unstable();
                BoundaryDof { dof, markers }
            })
            .collect();
        let mut boundary_slot = vec![None; dof_coordinates.len()];
        for (k, bd) in boundary_dofs.iter().enumerate() {
            boundary_slot[bd.dof] = Some(k);
        }

        Ok(FeSpace { mesh, degree, dof_coordinates, element_dofs, boundary_dofs, boundary_slot, boundary_edge_dofs })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn dof_count(&self) -> usize {
        self.dof_coordinates.len()
    }

    pub fn dof_coordinates(&self) -> &[Point] {
        &self.dof_coordinates
    }

    pub fn local_dofs(&self) -> usize {
        basis::local_dofs(self.degree)
    }

    pub fn element_dofs(&self, t: usize) -> &[usize] {
        let n = self.local_dofs();
        &self.element_dofs[t * n..(t + 1) * n]
    }

    /// Boundary dofs sorted by dof index.
    pub fn boundary_dofs(&self) -> &[BoundaryDof] {
        &self.boundary_dofs
    }

    /// Position of `dof` in [`FeSpace::boundary_dofs`], if it is on ∂D.
    pub fn boundary_slot(&self, dof: usize) -> Option<usize> {
        self.boundary_slot[dof]
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.boundary_slot[dof].is_some()
    }

    /// Dofs of each boundary edge in edge-local order `start, end, (mid)`.
    pub fn boundary_edge_dofs(&self, k: usize) -> &[usize] {
        &self.boundary_edge_dofs[k]
    }

    /// Volume quadrature order used by default: `2·degree + 2`.
    pub fn volume_quadrature_order(&self) -> usize {
        2 * self.degree.order() + 2
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.dof_coordinates.iter().map(|p| f(p[0], p[1])).collect()
    }
}
