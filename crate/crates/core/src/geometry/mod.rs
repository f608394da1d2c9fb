//! Room reconstruction from a scanned surface mesh.
//!
//! The pipeline is `extract_planes` -> `classify_planes` -> `build_space`:
//! dominant planes are pulled out of the triangle soup with a seeded RANSAC,
//! sorted into floor, ceiling and walls relative to a gravity direction, and
//! the walls' inward half-planes are intersected into a convex footprint.

mod classify;
mod footprint;
pub mod polygon;
mod ransac;

use nalgebra::Vector3;
use thiserror::Error;

pub use classify::classify_planes;
pub use footprint::build_space;
pub use ransac::{extract_plane_segments, extract_planes, PlaneSegment};

pub type Vec3 = Vector3<f64>;

/// Triangles with area at or below this are dropped on ingestion.
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("scan contains no triangles")]
    EmptyScan,
    #[error("no plane reaches the minimum inlier area of {min_area} m²")]
    NoPlanesFound { min_area: f64 },
    #[error("triangle {triangle} references vertex {index} but the scan has {vertex_count} vertices")]
    IndexOutOfRange {
        triangle: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no horizontal plane below the room")]
    MissingFloor,
    #[error("no horizontal plane above the floor")]
    MissingCeiling,
    #[error("found {found} walls, at least 3 are needed")]
    TooFewWalls { found: usize },
    #[error("wall half-planes do not enclose a bounded footprint")]
    UnboundedFootprint,
    #[error("wall half-planes have an empty intersection")]
    EmptyFootprint,
    #[error("invalid space: {0}")]
    InvalidSpace(String),
}

impl GeometryError {
    pub fn name(&self) -> &'static str {
        match self {
            GeometryError::EmptyScan => "EmptyScan",
            GeometryError::NoPlanesFound { .. } => "NoPlanesFound",
            GeometryError::IndexOutOfRange { .. } => "IndexOutOfRange",
            GeometryError::InvalidParameter(_) => "InvalidParameter",
            GeometryError::MissingFloor => "MissingFloor",
            GeometryError::MissingCeiling => "MissingCeiling",
            GeometryError::TooFewWalls { .. } => "TooFewWalls",
            GeometryError::UnboundedFootprint => "UnboundedFootprint",
            GeometryError::EmptyFootprint => "EmptyFootprint",
            GeometryError::InvalidSpace(_) => "InvalidSpace",
        }
    }
}

/// Indexed triangle soup as delivered by a surface scan.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
}

impl SurfaceMesh {
    /// Builds a mesh, dropping degenerate triangles. Returns the mesh and the
    /// number of triangles that were dropped.
    pub fn cleaned(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<(Self, usize), GeometryError> {
        let n = vertices.len();
        let mut kept = Vec::with_capacity(triangles.len());
        let mut dropped = 0;
        for (t, tri) in triangles.into_iter().enumerate() {
            if let Some(&index) = tri.iter().find(|&&i| i >= n) {
                return Err(GeometryError::IndexOutOfRange {
                    triangle: t,
                    index,
                    vertex_count: n,
                });
            }
            if triangle_area(&vertices, tri) > MIN_TRIANGLE_AREA {
                kept.push(tri);
            } else {
                dropped += 1;
            }
        }
        Ok((
            SurfaceMesh {
                vertices,
                triangles: kept,
            },
            dropped,
        ))
    }

    /// Like [`SurfaceMesh::cleaned`] but discards the drop count.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self, GeometryError> {
        Self::cleaned(vertices, triangles).map(|(mesh, _)| mesh)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        triangle_area(&self.vertices, self.triangles[t])
    }

    /// Applies `f` to every vertex, keeping connectivity.
    pub fn map_vertices(&self, f: impl Fn(&Vec3) -> Vec3) -> SurfaceMesh {
        SurfaceMesh {
            vertices: self.vertices.iter().map(f).collect(),
            triangles: self.triangles.clone(),
        }
    }
}

fn triangle_area(vertices: &[Vec3], [a, b, c]: [usize; 3]) -> f64 {
    0.5 * (vertices[b] - vertices[a]).cross(&(vertices[c] - vertices[a])).norm()
}

/// A plane `{x : normal · x = offset}` with the support it gathered in a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub normal: Vec3,
    pub offset: f64,
    pub inlier_area: f64,
    pub inlier_count: usize,
    /// Area-weighted centroid of the inlier triangles.
    pub centroid: Vec3,
}

impl Plane {
    /// Plane through `point` with the given normal (normalized here). Support
    /// statistics are zero.
    pub fn through(point: Vec3, normal: Vec3) -> Plane {
        let normal = normal.normalize();
        Plane {
            normal,
            offset: normal.dot(&point),
            inlier_area: 0.0,
            inlier_count: 0,
            centroid: point,
        }
    }

    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    pub fn flipped(&self) -> Plane {
        Plane {
            normal: -self.normal,
            offset: -self.offset,
            ..self.clone()
        }
    }
}

/// Orthonormal right-handed frame `(e1, e2, up)`. Footprints live in the
/// `(e1, e2)` plane, heights are measured along `up`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub e1: Vec3,
    pub e2: Vec3,
    pub up: Vec3,
}

impl Frame {
    pub fn from_up(up: Vec3) -> Result<Frame, GeometryError> {
        let len = up.norm();
        if !len.is_finite() || len < 1e-12 {
            return Err(GeometryError::InvalidParameter(
                "up direction must be a nonzero vector".into(),
            ));
        }
        let up = up / len;
        // Gram-Schmidt against whichever axis is least aligned with up, so that
        // up = +z yields e1 = +x, e2 = +y.
        let seed = if up.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let e1 = (seed - up * up.dot(&seed)).normalize();
        let e2 = up.cross(&e1);
        Ok(Frame { e1, e2, up })
    }

    pub fn to_local(&self, p: &Vec3) -> Vec3 {
        Vec3::new(self.e1.dot(p), self.e2.dot(p), self.up.dot(p))
    }

    pub fn to_world(&self, local: &Vec3) -> Vec3 {
        self.e1 * local.x + self.e2 * local.y + self.up * local.z
    }
}

impl Default for Frame {
    fn default() -> Self {
        Frame {
            e1: Vec3::x(),
            e2: Vec3::y(),
            up: Vec3::z(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedPlanes {
    pub floor: Plane,
    pub ceiling: Plane,
    /// Walls with inward-facing normals, ordered by azimuth of the normal.
    pub walls: Vec<Plane>,
    /// Planes that were neither floor, ceiling nor wall.
    pub discarded: Vec<Plane>,
    pub frame: Frame,
}

/// The reconstructed room: a prism over a simple CCW footprint.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    pub footprint: Vec<[f64; 2]>,
    pub z_floor: f64,
    pub z_ceiling: f64,
}

impl Space {
    pub fn new(footprint: Vec<[f64; 2]>, z_floor: f64, z_ceiling: f64) -> Result<Space, GeometryError> {
        let space = Space {
            footprint,
            z_floor,
            z_ceiling,
        };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.z_floor.is_finite() && self.z_ceiling.is_finite()) || self.z_ceiling <= self.z_floor {
            return Err(GeometryError::InvalidSpace(format!(
                "z_ceiling ({}) must exceed z_floor ({})",
                self.z_ceiling, self.z_floor
            )));
        }
        if self.footprint.len() < 3 {
            return Err(GeometryError::InvalidSpace(
                "footprint needs at least 3 vertices".into(),
            ));
        }
        if self.footprint.iter().flatten().any(|c| !c.is_finite()) {
            return Err(GeometryError::InvalidSpace("non-finite footprint coordinate".into()));
        }
        if polygon::signed_area(&self.footprint) <= 0.0 {
            return Err(GeometryError::InvalidSpace(
                "footprint must be counterclockwise with positive area".into(),
            ));
        }
        if !polygon::is_simple(&self.footprint) {
            return Err(GeometryError::InvalidSpace("footprint self-intersects".into()));
        }
        Ok(())
    }

    pub fn height(&self) -> f64 {
        self.z_ceiling - self.z_floor
    }

    pub fn area(&self) -> f64 {
        polygon::signed_area(&self.footprint)
    }

    pub fn volume(&self) -> f64 {
        self.area() * self.height()
    }
}

/// Parameters for [`extract_planes`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionParams {
    /// Maximum vertex distance from a plane for a triangle to count as inlier (m).
    pub dist_tol: f64,
    /// Maximum angle between triangle and plane normals (degrees).
    pub angle_tol: f64,
    /// Minimum inlier area for a plane to be accepted (m²).
    pub min_area: f64,
    pub max_planes: usize,
    pub seed: u64,
    /// Candidate triangles sampled per extraction round.
    pub candidates: usize,
}

impl Default for ExtractionParams {
    fn default() -> Self {
        ExtractionParams {
            dist_tol: 0.03,
            angle_tol: 10.0,
            min_area: 0.5,
            max_planes: 12,
            seed: 0,
            candidates: 200,
        }
    }
}

/// Runs the whole reconstruction with one parameter set.
pub fn reconstruct_space(scan: &SurfaceMesh, params: &ExtractionParams, up: Vec3) -> Result<Space, GeometryError> {
    let planes = extract_planes(scan, params)?;
    let classified = classify_planes(&planes, up, params.angle_tol)?;
    build_space(&classified)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cleaned_drops_degenerate_triangles() {
        let v = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
        ];
        let (mesh, dropped) = SurfaceMesh::cleaned(v, vec![[0, 1, 2], [0, 1, 3], [2, 2, 1]]).unwrap();
        assert_eq!(mesh.triangles(), &[[0, 1, 2]]);
        assert_eq!(dropped, 2);
    }

    #[test]
    fn cleaned_rejects_out_of_range_index() {
        let v = vec![Vec3::zeros(), Vec3::x(), Vec3::y()];
        let err = SurfaceMesh::cleaned(v, vec![[0, 1, 3]]).unwrap_err();
        assert_eq!(err.name(), "IndexOutOfRange");
    }

    #[test]
    fn frame_for_z_up_is_identity() {
        let f = Frame::from_up(Vec3::new(0.0, 0.0, 2.0)).unwrap();
        assert!((f.e1 - Vec3::x()).norm() < 1e-15);
        assert!((f.e2 - Vec3::y()).norm() < 1e-15);
        let p = Vec3::new(1.0, -2.0, 3.0);
        assert!((f.to_world(&f.to_local(&p)) - p).norm() < 1e-15);
    }

    #[test]
    fn frame_is_right_handed_for_tilted_up() {
        let f = Frame::from_up(Vec3::new(1.0, 0.2, 0.1)).unwrap();
        assert!((f.e1.cross(&f.e2) - f.up).norm() < 1e-12);
        assert!(f.e1.dot(&f.up).abs() < 1e-12);
    }

    #[test]
    fn space_validation() {
        assert!(Space::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]], 0.0, 1.0).is_ok());
        // clockwise
        assert!(Space::new(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0]], 0.0, 1.0).is_err());
        // inverted heights
        assert!(Space::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]], 1.0, 1.0).is_err());
        // bow tie
        let bowtie = vec![[0.0, 0.0], [2.0, 2.0], [2.0, 0.0], [0.0, 2.0], [-1.0, 1.0]];
        assert!(Space::new(bowtie, 0.0, 1.0).is_err());
    }
}
