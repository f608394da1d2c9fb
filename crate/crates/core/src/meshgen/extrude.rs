use std::collections::HashMap;

use crate::geometry::{polygon, Space, Vec3};

use super::{orient3d, triangulate_footprint, BoundaryFacet, BoundaryTag, MeshError, TetMesh};

/// A triangulated footprint. `boundary` lists the outline segments with the
/// index of the footprint edge each one lies on.
#[derive(Debug, Clone, PartialEq)]
pub struct FootprintMesh {
    pub points: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<([usize; 2], usize)>,
}

impl FootprintMesh {
    /// Footprint mesh without interior points: the polygon's own vertices and
    /// the given triangulation of it.
    pub fn from_polygon(polygon: &[[f64; 2]], triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let n = polygon.len();
        if let Some(&i) = triangles.iter().flatten().find(|&&i| i >= n) {
            return Err(MeshError::InvalidParameter(format!(
                "base triangle references vertex {i} of a {n}-gon"
            )));
        }
        Ok(FootprintMesh {
            points: polygon.to_vec(),
            triangles,
            boundary: (0..n).map(|k| ([k, (k + 1) % n], k)).collect(),
        })
    }

    /// Splits every triangle into four through its edge midpoints.
    pub fn refined(&self) -> FootprintMesh {
        let mut points = self.points.clone();
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, points: &mut Vec<[f64; 2]>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (points[a], points[b]);
                points.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
                points.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = midpoint(a, b, &mut points);
            let bc = midpoint(b, c, &mut points);
            let ca = midpoint(c, a, &mut points);
            triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        let mut boundary = Vec::with_capacity(2 * self.boundary.len());
        for &([a, b], k) in &self.boundary {
            let m = midpoint(a, b, &mut points);
            boundary.push(([a, m], k));
            boundary.push(([m, b], k));
        }
        FootprintMesh {
            points,
            triangles,
            boundary,
        }
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|&[a, b, c]| 0.5 * polygon::orient(self.points[a], self.points[b], self.points[c]))
            .sum()
    }
}

/// Number of vertical layers for a given target spacing.
pub fn layer_count(height: f64, target_h: f64) -> usize {
    ((height / target_h).round() as usize).max(1)
}

/// Extrudes `base_triangles` of the space footprint with layer spacing close
/// to `target_h`.
pub fn extrude_to_tets(space: &Space, base_triangles: &[[usize; 3]], target_h: f64) -> Result<TetMesh, MeshError> {
    if !(target_h > 0.0 && target_h.is_finite()) {
        return Err(MeshError::InvalidParameter("target_h must be positive".into()));
    }
    let footprint = FootprintMesh::from_polygon(&space.footprint, base_triangles.to_vec())?;
    extrude(
        &footprint,
        space.z_floor,
        space.z_ceiling,
        layer_count(space.height(), target_h),
    )
}

/// Triangulates, refines `refine` times and extrudes a space.
pub fn mesh_space(space: &Space, target_h: f64, refine: u32) -> Result<TetMesh, MeshError> {
    if !(target_h > 0.0 && target_h.is_finite()) {
        return Err(MeshError::InvalidParameter("target_h must be positive".into()));
    }
    let base = triangulate_footprint(&space.footprint)?;
    let mut footprint = FootprintMesh::from_polygon(&space.footprint, base)?;
    for _ in 0..refine {
        footprint = footprint.refined();
    }
    extrude(
        &footprint,
        space.z_floor,
        space.z_ceiling,
        layer_count(space.height(), target_h),
    )
}

/// Builds `layers` copies of the footprint vertices between the two heights
/// and splits each prism into three tets.
///
/// Vertex `i` of layer `l` has global index `l * n + i`. For a prism over
/// base vertices `v0 < v1 < v2` (with top copies `v0' < v1' < v2'`) the
/// tets are `(v0 v1 v2 v2')`, `(v0 v1 v1' v2')`, `(v0 v0' v1' v2')`: each
/// side quad is cut from its lower-index bottom vertex to the other top
/// vertex, which is a property of the quad alone.
pub fn extrude(footprint: &FootprintMesh, z_floor: f64, z_ceiling: f64, layers: usize) -> Result<TetMesh, MeshError> {
    if layers == 0 {
        return Err(MeshError::InvalidParameter("at least one layer is required".into()));
    }
    if !(z_ceiling > z_floor) {
        return Err(MeshError::InvalidParameter("z_ceiling must exceed z_floor".into()));
    }
    let n = footprint.points.len();
    let dz = (z_ceiling - z_floor) / layers as f64;
    let mut vertices = Vec::with_capacity(n * (layers + 1));
    for l in 0..=layers {
        let z = if l == layers {
            z_ceiling
        } else {
            z_floor + l as f64 * dz
        };
        vertices.extend(footprint.points.iter().map(|&[x, y]| [x, y, z]));
    }

    let mut tets = Vec::with_capacity(3 * footprint.triangles.len() * layers);
    for l in 0..layers {
        for tri in &footprint.triangles {
            let mut v = tri.map(|i| l * n + i);
            v.sort_unstable();
            let [a, b, c] = v;
            let (at, bt, ct) = (a + n, b + n, c + n);
            for mut tet in [[a, b, c, ct], [a, b, bt, ct], [a, at, bt, ct]] {
                let p = tet.map(|i| Vec3::from(vertices[i]));
                if orient3d(&p[0], &p[1], &p[2], &p[3]) < 0.0 {
                    tet.swap(2, 3);
                }
                tets.push(tet);
            }
        }
    }

    let mut boundary = Vec::new();
    for &[a, b, c] in &footprint.triangles {
        boundary.push(BoundaryFacet {
            tri: [a, c, b],
            tag: BoundaryTag::Floor,
        });
        let top = layers * n;
        boundary.push(BoundaryFacet {
            tri: [a + top, b + top, c + top],
            tag: BoundaryTag::Ceiling,
        });
    }
    for &([a, b], k) in &footprint.boundary {
        for l in 0..layers {
            let (lo, hi) = ((l * n + a).min(l * n + b), (l * n + a).max(l * n + b));
            let tag = BoundaryTag::Wall(k);
            boundary.push(BoundaryFacet {
                tri: [lo, hi, hi + n],
                tag,
            });
            boundary.push(BoundaryFacet {
                tri: [lo, hi + n, lo + n],
                tag,
            });
        }
    }

    let mesh = TetMesh {
        vertices,
        tets,
        boundary,
    };
    mesh.validate()?;
    Ok(mesh)
}
