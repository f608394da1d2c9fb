//! Scan-to-solution pipeline for Poisson's equation in a room.
//!
//! A surface scan is reduced to a prism-shaped [`geometry::Space`], meshed
//! into conforming tetrahedra ([`meshgen`]), and `−Δu = f` is solved with P1
//! elements ([`fem`]) using Jacobi-preconditioned CG ([`solver`]). [`io`]
//! holds the scan readers and the `roomfem/v1` JSON and VTK writers.

pub mod fem;
pub mod geometry;
pub mod io;
pub mod meshgen;
pub mod solver;
pub mod synth;

use thiserror::Error;

/// Any error raised by the library, tagged with its module error name.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Mesh(#[from] meshgen::MeshError),
    #[error(transparent)]
    Fem(#[from] fem::FemError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error(transparent)]
    Io(#[from] io::IoError),
}

impl Error {
    /// Stable error identifier such as `NoDirichletData` or `ParseError`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Geometry(e) => e.name(),
            Error::Mesh(e) => e.name(),
            Error::Fem(e) => e.name(),
            Error::Solver(e) => e.name(),
            Error::Io(e) => e.name(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
