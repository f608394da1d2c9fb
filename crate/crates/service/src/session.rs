use std::fs;
use std::path::Path;
use std::sync::Arc;

use roomfem_core::fem::{PoissonProblem, SolutionField};
use roomfem_core::geometry::{Space, SurfaceMesh};
use roomfem_core::io::{self, ScanFormat};
use roomfem_core::meshgen::TetMesh;
use roomfem_core::solver::SolveStats;
use serde::Serialize;

use crate::error::{ApiError, ErrorBody};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Stage {
    Empty,
    Scanned,
    Spaced,
    Meshed,
    Solved,
}

/// Artifacts of one workflow. A field is `Some` exactly when the stage that
/// produces it has been reached.
#[derive(Debug, Default)]
pub struct Session {
    pub scan: Option<SurfaceMesh>,
    pub space: Option<Space>,
    pub mesh: Option<Arc<TetMesh>>,
    pub problem: PoissonProblem,
    pub solution: Option<SolutionField>,
    pub stats: Option<SolveStats>,
    pub solving: bool,
    pub last_error: Option<ErrorBody>,
}

impl Session {
    pub fn stage(&self) -> Stage {
        if self.solution.is_some() {
            Stage::Solved
        } else if self.mesh.is_some() {
            Stage::Meshed
        } else if self.space.is_some() {
            Stage::Spaced
        } else if self.scan.is_some() {
            Stage::Scanned
        } else {
            Stage::Empty
        }
    }

    pub fn require(&self, stage: Stage) -> Result<(), ApiError> {
        let current = self.stage();
        if current < stage {
            return Err(ApiError::stage_conflict(format!(
                "requires stage {stage:?}, session is at {current:?}"
            )));
        }
        Ok(())
    }

    /// Mutations are refused while a solve is in flight.
    pub fn require_idle(&self) -> Result<(), ApiError> {
        if self.solving {
            return Err(ApiError::busy());
        }
        Ok(())
    }

    pub fn set_scan(&mut self, scan: SurfaceMesh) {
        *self = Session {
            scan: Some(scan),
            ..Session::default()
        };
    }

    pub fn set_space(&mut self, space: Space) {
        self.space = Some(space);
        self.mesh = None;
        self.problem = PoissonProblem::default();
        self.clear_solution();
    }

    /// Re-meshing the same space keeps the problem: tags still refer to the
    /// same walls.
    pub fn set_mesh(&mut self, mesh: TetMesh) {
        self.mesh = Some(Arc::new(mesh));
        self.clear_solution();
    }

    pub fn set_problem(&mut self, problem: PoissonProblem) {
        self.problem = problem;
        self.clear_solution();
    }

    fn clear_solution(&mut self) {
        self.solution = None;
        self.stats = None;
        self.last_error = None;
    }

    /// Writes every present artifact into `dir`, removing stale ones.
    pub fn save(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        let mesh = self.mesh.as_deref();
        let files: [(&str, Option<Vec<u8>>); 5] = [
            ("scan.ply", self.scan.as_ref().map(|s| io::write_ply(s).into_bytes())),
            ("space.json", self.space.as_ref().map(io::write_space)),
            ("mesh.json", mesh.map(io::write_mesh)),
            ("problem.json", mesh.map(|_| io::write_problem(&self.problem))),
            (
                "solution.json",
                mesh.zip(self.solution.as_ref())
                    .and_then(|(m, f)| io::write_solution_json(m, f).ok()),
            ),
        ];
        for (name, bytes) in files {
            let path = dir.join(name);
            match bytes {
                Some(b) => fs::write(path, b)?,
                None if path.exists() => fs::remove_file(path)?,
                None => {}
            }
        }
        Ok(())
    }

    /// Restores whatever prefix of the pipeline is present on disk.
    pub fn load(dir: &Path) -> Result<Session, String> {
        let read = |name: &str| fs::read(dir.join(name)).ok();
        let mut s = Session::default();
        let Some(scan) = read("scan.ply") else { return Ok(s) };
        let scan = io::read_surface_scan(&scan, ScanFormat::Ply).map_err(|e| e.to_string())?;
        s.scan = Some(scan.mesh);
        let Some(space) = read("space.json") else { return Ok(s) };
        s.space = Some(io::read_space(&space).map_err(|e| e.to_string())?);
        let Some(mesh) = read("mesh.json") else { return Ok(s) };
        let mesh = io::read_mesh(&mesh).map_err(|e| e.to_string())?;
        if let Some(problem) = read("problem.json") {
            s.problem = io::read_problem(&problem).map_err(|e| e.to_string())?;
        }
        if let Some(solution) = read("solution.json") {
            let export = io::read_solution(&solution).map_err(|e| e.to_string())?;
            if export.matches_mesh(&mesh) {
                s.solution = Some(export.field());
            }
        }
        s.mesh = Some(Arc::new(mesh));
        Ok(s)
    }
}
