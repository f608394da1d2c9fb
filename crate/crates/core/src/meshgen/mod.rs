//! Tetrahedral meshing of a [`Space`](crate::geometry::Space).
//!
//! The footprint is ear-clipped, optionally refined by midpoint subdivision,
//! and extruded in layers. Every triangular prism is cut into three
//! tetrahedra with diagonals chosen from global vertex indices, so shared
//! prism faces always agree and the mesh is conforming.

mod earclip;
mod extrude;
mod quality;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::geometry::Vec3;

pub use earclip::triangulate_footprint;
pub use extrude::{extrude, extrude_to_tets, layer_count, mesh_space, FootprintMesh};
pub use quality::{mesh_quality, MeshQuality};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),
    #[error("polygon is not simple")]
    NotSimple,
    #[error("polygon is not counterclockwise")]
    NotCounterClockwise,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("tet {tet} references vertex {index} but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        tet: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("tet {tet} has nonpositive volume {volume}")]
    InvertedTet { tet: usize, volume: f64 },
    #[error("invalid boundary tag {0:?}")]
    InvalidTag(String),
}

impl MeshError {
    pub fn name(&self) -> &'static str {
        match self {
            MeshError::DegeneratePolygon(_) => "DegeneratePolygon",
            MeshError::NotSimple => "NotSimple",
            MeshError::NotCounterClockwise => "NotCounterClockwise",
            MeshError::InvalidParameter(_) => "InvalidParameter",
            MeshError::IndexOutOfRange { .. } => "IndexOutOfRange",
            MeshError::InvertedTet { .. } => "InvertedTet",
            MeshError::InvalidTag(_) => "InvalidTag",
        }
    }
}

/// Boundary surface label. Serialized as `FLOOR`, `CEILING` or `WALL:<k>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryTag {
    Floor,
    Ceiling,
    Wall(usize),
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryTag::Floor => f.write_str("FLOOR"),
            BoundaryTag::Ceiling => f.write_str("CEILING"),
            BoundaryTag::Wall(k) => write!(f, "WALL:{k}"),
        }
    }
}

impl FromStr for BoundaryTag {
    type Err = MeshError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "FLOOR" => Ok(BoundaryTag::Floor),
            "CEILING" => Ok(BoundaryTag::Ceiling),
            _ => s
                .strip_prefix("WALL:")
                .and_then(|k| k.parse().ok())
                .map(BoundaryTag::Wall)
                .ok_or_else(|| MeshError::InvalidTag(s.to_string())),
        }
    }
}

impl Serialize for BoundaryTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BoundaryTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFacet {
    pub tri: [usize; 3],
    pub tag: BoundaryTag,
}

/// Conforming tetrahedral mesh with tagged boundary facets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TetMesh {
    pub vertices: Vec<[f64; 3]>,
    pub tets: Vec<[usize; 4]>,
    pub boundary: Vec<BoundaryFacet>,
}

/// Six times the signed volume of `(a, b, c, d)`.
pub fn orient3d(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> f64 {
    (b - a).cross(&(c - a)).dot(&(d - a))
}

impl TetMesh {
    pub fn vertex(&self, i: usize) -> Vec3 {
        Vec3::from(self.vertices[i])
    }

    pub fn tet_coords(&self, t: usize) -> [Vec3; 4] {
        self.tets[t].map(|i| self.vertex(i))
    }

    pub fn tet_volume(&self, t: usize) -> f64 {
        let [a, b, c, d] = self.tet_coords(t);
        orient3d(&a, &b, &c, &d) / 6.0
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.tets.len()).map(|t| self.tet_volume(t)).sum()
    }

    pub fn facet_area(&self, f: &BoundaryFacet) -> f64 {
        let [a, b, c] = f.tri.map(|i| self.vertex(i));
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    /// Distinct tags present on the boundary, in tag order.
    pub fn tags(&self) -> Vec<BoundaryTag> {
        let mut tags: Vec<_> = self.boundary.iter().map(|f| f.tag).collect();
        tags.sort();
        tags.dedup();
        tags
    }

    /// Checks index ranges and that every tet is positively oriented.
    pub fn validate(&self) -> Result<(), MeshError> {
        let n = self.vertices.len();
        for (t, tet) in self.tets.iter().enumerate() {
            if let Some(&index) = tet.iter().find(|&&i| i >= n) {
                return Err(MeshError::IndexOutOfRange {
                    tet: t,
                    index,
                    vertex_count: n,
                });
            }
            let volume = self.tet_volume(t);
            if !(volume > 0.0) {
                return Err(MeshError::InvertedTet { tet: t, volume });
            }
        }
        for f in &self.boundary {
            if let Some(&index) = f.tri.iter().find(|&&i| i >= n) {
                return Err(MeshError::IndexOutOfRange {
                    tet: usize::MAX,
                    index,
                    vertex_count: n,
                });
            }
        }
        Ok(())
    }
}
