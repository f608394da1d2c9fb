//! File formats: surface scans in, versioned JSON documents and legacy VTK out.

mod json;
mod scan;
mod vtk;

use thiserror::Error;

use crate::fem::SolutionField;
use crate::geometry::GeometryError;
use crate::meshgen::{MeshError, TetMesh};

pub use json::{
    mesh_checksum, read_mesh, read_problem, read_solution, read_space, write_mesh, write_problem, write_solution_json,
    write_space, SolutionExport, SCHEMA,
};
pub use scan::{read_surface_scan, write_ply, ScanFormat, ScanImport};
pub use vtk::write_vtk;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected schema {expected:?}, found {found:?}")]
    SchemaMismatch { expected: &'static str, found: String },
    #[error("{expected} values expected, found {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("invalid solution: {0}")]
    InvalidSolution(String),
}

impl IoError {
    pub fn name(&self) -> &'static str {
        match self {
            IoError::Parse { .. } => "ParseError",
            IoError::UnsupportedFormat(_) => "UnsupportedFormat",
            IoError::Json(_) => "ParseError",
            IoError::SchemaMismatch { .. } => "SchemaMismatch",
            IoError::LengthMismatch { .. } => "LengthMismatch",
            IoError::Geometry(e) => e.name(),
            IoError::Mesh(e) => e.name(),
            IoError::InvalidSolution(_) => "InvalidSolution",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionFormat {
    Json,
    VtkLegacy,
}

/// Serializes a solved field over its mesh.
pub fn write_solution(mesh: &TetMesh, field: &SolutionField, format: SolutionFormat) -> Result<Vec<u8>, IoError> {
    if field.values.len() != mesh.vertices.len() {
        return Err(IoError::LengthMismatch {
            expected: mesh.vertices.len(),
            got: field.values.len(),
        });
    }
    match format {
        SolutionFormat::Json => write_solution_json(mesh, field),
        SolutionFormat::VtkLegacy => Ok(write_vtk(mesh, field).into_bytes()),
    }
}
