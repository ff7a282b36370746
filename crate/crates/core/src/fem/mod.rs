//! Lagrange finite elements on triangles: reference bases, quadrature, the
//! dof bookkeeping of [`FeSpace`] and assembly of the stiffness, mass and
//! load objects.

mod assembly;
pub mod basis;
pub mod quadrature;
mod space;

pub use assembly::{
    assemble_boundary_load, assemble_boundary_mass, assemble_load, assemble_mass, assemble_stiffness,
    integrate_boundary, integrate_domain, visit_boundary_quadrature, visit_quadrature, BoundaryQuadPoint, QuadPoint,
};
pub use quadrature::{segment_quadrature, triangle_quadrature, QuadratureRule, SegmentRule, TriangleRule};
pub use space::{BoundaryDof, FeSpace};

use crate::error::{Error, Result};

/// Boundary quadrature order used for all boundary integrals.
pub const BOUNDARY_QUADRATURE_ORDER: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degree {
    P1,
    P2,
}

impl Degree {
    pub fn order(self) -> usize {
        match self {
            Degree::P1 => 1,
            Degree::P2 => 2,
        }
    }
}

impl TryFrom<usize> for Degree {
    type Error = Error;

    fn try_from(d: usize) -> Result<Self> {
        match d {
            1 => Ok(Degree::P1),
            2 => Ok(Degree::P2),
            _ => Err(Error::invalid(format!("finite element degree must be 1 or 2, got {d}"))),
        }
    }
}
