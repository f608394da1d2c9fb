//! P1 finite elements for `−Δu = f` with Dirichlet data on tagged surfaces.
//!
//! Sources enter as discrete Dirac deltas: a point source of strength `q` at
//! `x` contributes `q·φ_i(x)` to the four nodes of the tet containing `x`.
//! Boundary values are imposed by symmetric elimination so the constrained
//! matrix stays SPD for conjugate gradients.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Matrix4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vec3;
use crate::meshgen::{BoundaryTag, TetMesh};
use crate::solver::{default_max_iter, pcg_solve_from, CsrMatrix, JacobiPreconditioner, SolveStats, SolverError};

/// Tets with volume at or below this are rejected.
pub const MIN_TET_VOLUME: f64 = 1e-14;
/// Barycentric slack accepted by point location.
pub const LOCATE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("tet {tet} is degenerate (volume {volume})")]
    DegenerateTet { tet: usize, volume: f64 },
    #[error("point {point:?}{} lies outside the mesh", source_index.map(|i| format!(" (source {i})")).unwrap_or_default())]
    PointOutsideDomain {
        source_index: Option<usize>,
        point: [f64; 3],
    },
    #[error("no Dirichlet data: the pure Neumann problem is singular")]
    NoDirichletData,
    #[error("boundary tag {0} does not exist on the mesh")]
    UnknownTag(BoundaryTag),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("PCG stopped after {iterations} iterations at relative residual {residual:e}")]
    SolverDiverged { iterations: usize, residual: f64 },
    #[error("solution contains non-finite values")]
    NonFiniteSolution,
    #[error(transparent)]
    Solver(#[from] SolverError),
}

impl FemError {
    pub fn name(&self) -> &'static str {
        match self {
            FemError::DegenerateTet { .. } => "DegenerateTet",
            FemError::PointOutsideDomain { .. } => "PointOutsideDomain",
            FemError::NoDirichletData => "NoDirichletData",
            FemError::UnknownTag(_) => "UnknownTag",
            FemError::LengthMismatch { .. } => "LengthMismatch",
            FemError::SolverDiverged { .. } => "SolverDiverged",
            FemError::NonFiniteSolution => "NonFiniteSolution",
            FemError::Solver(e) => e.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSource {
    pub position: [f64; 3],
    pub strength: f64,
}

/// Point sources plus one constant boundary value per tagged surface.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PoissonProblem {
    #[serde(default)]
    pub sources: Vec<PointSource>,
    #[serde(default)]
    pub dirichlet: BTreeMap<BoundaryTag, f64>,
}

/// Nodal values of the discrete solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

impl SolutionField {
    pub fn from_values(values: Vec<f64>) -> Result<Self, FemError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FemError::NonFiniteSolution);
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (min, max) = if values.is_empty() { (0.0, 0.0) } else { (min, max) };
        Ok(SolutionField { values, min, max })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    /// Defaults to `max(1000, 10 n)` when unset.
    pub max_iter: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            max_iter: None,
        }
    }
}

/// Gradients of the four barycentric coordinates and the signed volume.
fn barycentric_gradients(p: &[Vec3; 4]) -> Option<([Vec3; 4], f64)> {
    let jac = Matrix3::from_columns(&[p[1] - p[0], p[2] - p[0], p[3] - p[0]]);
    let volume = jac.determinant() / 6.0;
    let inv = jac.try_inverse()?;
    // Rows of J⁻¹ are the gradients of λ1..λ3.
    let g1 = inv.row(0).transpose();
    let g2 = inv.row(1).transpose();
    let g3 = inv.row(2).transpose();
    Some(([-(g1 + g2 + g3), g1, g2, g3], volume))
}

/// Element stiffness `K_ij = |T| ∇φ_i · ∇φ_j`.
pub fn local_stiffness(coords: &[Vec3; 4]) -> Result<Matrix4<f64>, FemError> {
    local_stiffness_of(coords, 0)
}

fn local_stiffness_of(coords: &[Vec3; 4], tet: usize) -> Result<Matrix4<f64>, FemError> {
    let degenerate = |volume| FemError::DegenerateTet { tet, volume };
    let (grads, volume) = barycentric_gradients(coords).ok_or(degenerate(0.0))?;
    if !(volume > MIN_TET_VOLUME) {
        return Err(degenerate(volume));
    }
    Ok(Matrix4::from_fn(|i, j| volume * grads[i].dot(&grads[j])))
}

/// Global stiffness matrix, summed in element order.
pub fn assemble_stiffness(mesh: &TetMesh) -> Result<CsrMatrix, FemError> {
    let mut triplets = Vec::with_capacity(16 * mesh.tets.len());
    for (t, tet) in mesh.tets.iter().enumerate() {
        let k = local_stiffness_of(&mesh.tet_coords(t), t)?;
        for (a, &i) in tet.iter().enumerate() {
            for (b, &j) in tet.iter().enumerate() {
                triplets.push((i, j, k[(a, b)]));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(mesh.vertices.len(), &triplets)?)
}

/// Row sums of the consistent mass matrix: `Σ_{T ∋ i} |T| / 4`.
pub fn lumped_mass(mesh: &TetMesh) -> Vec<f64> {
    let mut mass = vec![0.0; mesh.vertices.len()];
    for (t, tet) in mesh.tets.iter().enumerate() {
        let quarter = mesh.tet_volume(t).abs() / 4.0;
        for &i in tet {
            mass[i] += quarter;
        }
    }
    mass
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub tet: usize,
    pub barycentric: [f64; 4],
}

/// Finds the lowest-indexed tet containing `p`.
pub fn locate_point(mesh: &TetMesh, p: [f64; 3]) -> Result<Location, FemError> {
    let point = Vec3::from(p);
    for t in 0..mesh.tets.len() {
        let coords = mesh.tet_coords(t);
        let lo = coords.iter().fold(Vec3::repeat(f64::INFINITY), |m, c| m.inf(c));
        let hi = coords.iter().fold(Vec3::repeat(f64::NEG_INFINITY), |m, c| m.sup(c));
        let pad = LOCATE_TOL * (hi - lo).amax().max(1.0);
        if (0..3).any(|k| point[k] < lo[k] - pad || point[k] > hi[k] + pad) {
            continue;
        }
        let Some((grads, _)) = barycentric_gradients(&coords) else {
            continue;
        };
        let d = point - coords[0];
        let l1 = grads[1].dot(&d);
        let l2 = grads[2].dot(&d);
        let l3 = grads[3].dot(&d);
        let bary = [1.0 - l1 - l2 - l3, l1, l2, l3];
        if bary.iter().all(|l| (-LOCATE_TOL..=1.0 + LOCATE_TOL).contains(l)) {
            return Ok(Location {
                tet: t,
                barycentric: bary,
            });
        }
    }
    Err(FemError::PointOutsideDomain {
        source_index: None,
        point: p,
    })
}

/// Load vector of discrete Dirac sources.
pub fn assemble_point_sources(mesh: &TetMesh, sources: &[PointSource]) -> Result<Vec<f64>, FemError> {
    let mut b = vec![0.0; mesh.vertices.len()];
    for (s, source) in sources.iter().enumerate() {
        let loc = locate_point(mesh, source.position).map_err(|_| FemError::PointOutsideDomain {
            source_index: Some(s),
            point: source.position,
        })?;
        for (&i, &phi) in mesh.tets[loc.tet].iter().zip(&loc.barycentric) {
            b[i] += source.strength * phi;
        }
    }
    Ok(b)
}

/// Nodes carrying Dirichlet values, sorted by node index. A node on several
/// constrained surfaces takes the value of the first tag in tag order
/// (`FLOOR`, `CEILING`, `WALL:0`, `WALL:1`, ...).
pub fn dirichlet_nodes(mesh: &TetMesh, dirichlet: &BTreeMap<BoundaryTag, f64>) -> Result<Vec<(usize, f64)>, FemError> {
    if dirichlet.is_empty() {
        return Err(FemError::NoDirichletData);
    }
    let present = mesh.tags();
    if let Some(tag) = dirichlet.keys().find(|t| present.binary_search(t).is_err()) {
        return Err(FemError::UnknownTag(*tag));
    }
    let mut value: BTreeMap<usize, (BoundaryTag, f64)> = BTreeMap::new();
    for facet in &mesh.boundary {
        let Some(&g) = dirichlet.get(&facet.tag) else { continue };
        for &i in &facet.tri {
            value
                .entry(i)
                .and_modify(|e| {
                    if facet.tag < e.0 {
                        *e = (facet.tag, g);
                    }
                })
                .or_insert((facet.tag, g));
        }
    }
    Ok(value.into_iter().map(|(i, (_, g))| (i, g)).collect())
}

/// Symmetric elimination of the given `(node, value)` pairs in place. The
/// sparsity pattern is kept; eliminated couplings are stored as zeros.
pub fn apply_dirichlet_nodes(a: &mut CsrMatrix, b: &mut [f64], nodes: &[(usize, f64)]) -> Result<(), FemError> {
    let n = a.n();
    if b.len() != n {
        return Err(FemError::LengthMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let mut constrained: Vec<Option<f64>> = vec![None; n];
    for &(i, g) in nodes {
        if i >= n {
            return Err(FemError::LengthMismatch {
                expected: n,
                got: i + 1,
            });
        }
        constrained[i] = Some(g);
    }
    if constrained.iter().all(Option::is_none) {
        return Err(FemError::NoDirichletData);
    }
    for i in 0..n {
        let (cols, vals) = a.row_mut(i);
        match constrained[i] {
            Some(g) => {
                for (&j, v) in cols.iter().zip(vals.iter_mut()) {
                    *v = if j == i { 1.0 } else { 0.0 };
                }
                b[i] = g;
            }
            None => {
                for (&j, v) in cols.iter().zip(vals.iter_mut()) {
                    if let Some(g) = constrained[j] {
                        b[i] -= *v * g;
                        *v = 0.0;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Constrains `(a, b)` with the problem's per-surface values and returns the
/// constrained node indices.
pub fn apply_dirichlet(
    a: &mut CsrMatrix,
    b: &mut [f64],
    mesh: &TetMesh,
    dirichlet: &BTreeMap<BoundaryTag, f64>,
) -> Result<Vec<usize>, FemError> {
    let nodes = dirichlet_nodes(mesh, dirichlet)?;
    apply_dirichlet_nodes(a, b, &nodes)?;
    Ok(nodes.into_iter().map(|(i, _)| i).collect())
}

/// Checks the problem against the mesh without solving: Dirichlet tags exist
/// and every source can be located.
pub fn validate_problem(mesh: &TetMesh, problem: &PoissonProblem) -> Result<(), FemError> {
    dirichlet_nodes(mesh, &problem.dirichlet)?;
    assemble_point_sources(mesh, &problem.sources)?;
    Ok(())
}

/// Assembles, constrains and solves the point-source problem.
pub fn solve_poisson(
    mesh: &TetMesh,
    problem: &PoissonProblem,
    opts: &SolverOptions,
) -> Result<SolutionField, FemError> {
    let nodes = dirichlet_nodes(mesh, &problem.dirichlet)?;
    let loads = assemble_point_sources(mesh, &problem.sources)?;
    solve_with_loads(mesh, loads, &nodes, opts).map(|(field, _)| field)
}

/// Solves with arbitrary nodal loads and per-node Dirichlet values.
///
/// The initial guess carries the boundary values, so constrained nodes are
/// returned exactly as given.
pub fn solve_with_loads(
    mesh: &TetMesh,
    mut loads: Vec<f64>,
    constraints: &[(usize, f64)],
    opts: &SolverOptions,
) -> Result<(SolutionField, SolveStats), FemError> {
    let n = mesh.vertices.len();
    if loads.len() != n {
        return Err(FemError::LengthMismatch {
            expected: n,
            got: loads.len(),
        });
    }
    let mut a = assemble_stiffness(mesh)?;
    apply_dirichlet_nodes(&mut a, &mut loads, constraints)?;
    let precond = JacobiPreconditioner::new(&a)?;
    let mut x0 = vec![0.0; n];
    for &(i, g) in constraints {
        x0[i] = g;
    }
    let max_iter = opts.max_iter.unwrap_or_else(|| default_max_iter(n));
    let (x, stats) = pcg_solve_from(&a, &loads, x0, &precond, opts.tol, max_iter)?;
    if !stats.converged {
        return Err(FemError::SolverDiverged {
            iterations: stats.iterations,
            residual: stats.final_relative_residual,
        });
    }
    Ok((SolutionField::from_values(x)?, stats))
}
