//! `roomfem/v1` JSON documents.
//!
//! Every document carries `"schema": "roomfem/v1"`. Readers accept a missing
//! schema field but reject any other value. Floats are written in shortest
//! round-trip form and parsed exactly, so `read(write(x)) == x` bit for bit.

use std::collections::BTreeMap;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::fem::{PointSource, PoissonProblem, SolutionField};
use crate::geometry::Space;
use crate::meshgen::{BoundaryFacet, BoundaryTag, TetMesh};

use super::IoError;

pub const SCHEMA: &str = "roomfem/v1";

fn default_schema() -> String {
    SCHEMA.to_string()
}

fn to_bytes<T: Serialize>(doc: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec(doc).expect("documents contain only finite numbers and string keys");
    bytes.push(b'\n');
    bytes
}

fn from_bytes<T: DeserializeOwned + HasSchema>(bytes: &[u8]) -> Result<T, IoError> {
    let doc: T = serde_json::from_slice(bytes)?;
    if doc.schema() != SCHEMA {
        return Err(IoError::SchemaMismatch {
            expected: SCHEMA,
            found: doc.schema().to_string(),
        });
    }
    Ok(doc)
}

trait HasSchema {
    fn schema(&self) -> &str;
}

macro_rules! has_schema {
    ($($t:ty),*) => {$(
        impl HasSchema for $t {
            fn schema(&self) -> &str {
                &self.schema
            }
        }
    )*};
}

#[derive(Serialize, Deserialize)]
struct SpaceDoc {
    #[serde(default = "default_schema")]
    schema: String,
    footprint: Vec<[f64; 2]>,
    z_floor: f64,
    z_ceiling: f64,
}

#[derive(Serialize, Deserialize)]
struct FacetDoc {
    tri: [usize; 3],
    tag: BoundaryTag,
}

#[derive(Serialize, Deserialize)]
struct MeshDoc {
    #[serde(default = "default_schema")]
    schema: String,
    vertices: Vec<[f64; 3]>,
    tets: Vec<[usize; 4]>,
    boundary: Vec<FacetDoc>,
}

#[derive(Serialize, Deserialize)]
struct ProblemDoc {
    #[serde(default = "default_schema")]
    schema: String,
    #[serde(default)]
    sources: Vec<PointSource>,
    #[serde(default)]
    dirichlet: BTreeMap<BoundaryTag, f64>,
}

/// Solution as handed to viewers: nodal values next to the node positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionExport {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub vertices: Vec<[f64; 3]>,
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
    /// SHA-256 (hex) of the mesh document the solve used.
    pub mesh_checksum: String,
}

has_schema!(SpaceDoc, MeshDoc, ProblemDoc, SolutionExport);

impl SolutionExport {
    pub fn field(&self) -> SolutionField {
        SolutionField {
            values: self.values.clone(),
            min: self.min,
            max: self.max,
        }
    }

    /// True when the export was produced from `mesh`.
    pub fn matches_mesh(&self, mesh: &TetMesh) -> bool {
        self.mesh_checksum == mesh_checksum(mesh)
    }
}

pub fn write_space(space: &Space) -> Vec<u8> {
    to_bytes(&SpaceDoc {
        schema: default_schema(),
        footprint: space.footprint.clone(),
        z_floor: space.z_floor,
        z_ceiling: space.z_ceiling,
    })
}

pub fn read_space(bytes: &[u8]) -> Result<Space, IoError> {
    let doc: SpaceDoc = from_bytes(bytes)?;
    Ok(Space::new(doc.footprint, doc.z_floor, doc.z_ceiling)?)
}

pub fn write_mesh(mesh: &TetMesh) -> Vec<u8> {
    to_bytes(&MeshDoc {
        schema: default_schema(),
        vertices: mesh.vertices.clone(),
        tets: mesh.tets.clone(),
        boundary: mesh
            .boundary
            .iter()
            .map(|f| FacetDoc { tri: f.tri, tag: f.tag })
            .collect(),
    })
}

pub fn read_mesh(bytes: &[u8]) -> Result<TetMesh, IoError> {
    let doc: MeshDoc = from_bytes(bytes)?;
    let mesh = TetMesh {
        vertices: doc.vertices,
        tets: doc.tets,
        boundary: doc
            .boundary
            .into_iter()
            .map(|f| BoundaryFacet { tri: f.tri, tag: f.tag })
            .collect(),
    };
    mesh.validate()?;
    Ok(mesh)
}

pub fn write_problem(problem: &PoissonProblem) -> Vec<u8> {
    to_bytes(&ProblemDoc {
        schema: default_schema(),
        sources: problem.sources.clone(),
        dirichlet: problem.dirichlet.clone(),
    })
}

pub fn read_problem(bytes: &[u8]) -> Result<PoissonProblem, IoError> {
    let doc: ProblemDoc = from_bytes(bytes)?;
    Ok(PoissonProblem {
        sources: doc.sources,
        dirichlet: doc.dirichlet,
    })
}

/// Hex SHA-256 of the mesh's JSON document.
pub fn mesh_checksum(mesh: &TetMesh) -> String {
    hex::encode(Sha256::digest(write_mesh(mesh)))
}

pub fn write_solution_json(mesh: &TetMesh, field: &SolutionField) -> Result<Vec<u8>, IoError> {
    if field.values.len() != mesh.vertices.len() {
        return Err(IoError::LengthMismatch {
            expected: mesh.vertices.len(),
            got: field.values.len(),
        });
    }
    Ok(to_bytes(&SolutionExport {
        schema: default_schema(),
        vertices: mesh.vertices.clone(),
        values: field.values.clone(),
        min: field.min,
        max: field.max,
        mesh_checksum: mesh_checksum(mesh),
    }))
}

pub fn read_solution(bytes: &[u8]) -> Result<SolutionExport, IoError> {
    let doc: SolutionExport = from_bytes(bytes)?;
    if doc.values.len() != doc.vertices.len() {
        return Err(IoError::LengthMismatch {
            expected: doc.vertices.len(),
            got: doc.values.len(),
        });
    }
    let recomputed =
        SolutionField::from_values(doc.values.clone()).map_err(|e| IoError::InvalidSolution(e.to_string()))?;
    if !doc.values.is_empty() && (recomputed.min != doc.min || recomputed.max != doc.max) {
        return Err(IoError::InvalidSolution("min/max do not match the values".into()));
    }
    Ok(doc)
}
