use super::classify::floor_and_ceiling_heights;
use super::{polygon, ClassifiedPlanes, GeometryError, Space};

const PARALLEL_EPS: f64 = 1e-12;
const LENGTH_EPS: f64 = 1e-9;

/// Inward half-plane `normal · p >= rhs` in footprint coordinates.
#[derive(Debug, Clone, Copy)]
struct HalfPlane {
    normal: [f64; 2],
    rhs: f64,
}

impl HalfPlane {
    fn eval(&self, p: [f64; 2]) -> f64 {
        self.normal[0] * p[0] + self.normal[1] * p[1] - self.rhs
    }
}

/// Intersects the walls' inward half-planes into a CCW convex footprint.
///
/// Footprint edge `k` is the `k`-th wall (in the classified azimuth order)
/// that contributes a boundary segment; redundant walls produce no edge.
pub fn build_space(classified: &ClassifiedPlanes) -> Result<Space, GeometryError> {
    if classified.walls.len() < 3 {
        return Err(GeometryError::TooFewWalls {
            found: classified.walls.len(),
        });
    }
    let (z_floor, z_ceiling) = floor_and_ceiling_heights(classified);
    if z_ceiling <= z_floor {
        return Err(GeometryError::InvalidSpace("ceiling is not above the floor".into()));
    }
    let frame = &classified.frame;
    let mid = 0.5 * (z_floor + z_ceiling);

    let mut half_planes = Vec::with_capacity(classified.walls.len());
    for wall in &classified.walls {
        let a = wall.normal.dot(&frame.e1);
        let b = wall.normal.dot(&frame.e2);
        let c = wall.normal.dot(&frame.up);
        let len = a.hypot(b);
        if len < 1e-9 {
            return Err(GeometryError::InvalidParameter("wall normal is vertical".into()));
        }
        // Tilted walls are cut at mid-height.
        half_planes.push(HalfPlane {
            normal: [a / len, b / len],
            rhs: (wall.offset - c * mid) / len,
        });
    }

    let footprint = intersect_half_planes(&half_planes)?;
    Space::new(footprint, z_floor, z_ceiling).map_err(|_| GeometryError::EmptyFootprint)
}

/// Clips each bounding line against every other half-plane and keeps the
/// segments of nonzero length. Each surviving segment contributes its start
/// point, so vertices come out in the order of the input half-planes.
fn intersect_half_planes(hp: &[HalfPlane]) -> Result<Vec<[f64; 2]>, GeometryError> {
    let mut vertices = Vec::new();
    let mut unbounded = false;
    for (i, h) in hp.iter().enumerate() {
        let dir = [h.normal[1], -h.normal[0]];
        let origin = [h.normal[0] * h.rhs, h.normal[1] * h.rhs];
        let mut t_min = f64::NEG_INFINITY;
        let mut t_max = f64::INFINITY;
        let mut empty = false;
        for (j, g) in hp.iter().enumerate() {
            if i == j {
                continue;
            }
            let denom = g.normal[0] * dir[0] + g.normal[1] * dir[1];
            let slack = g.eval(origin);
            if denom.abs() < PARALLEL_EPS {
                let same_line = slack.abs() < LENGTH_EPS && g.normal[0] * h.normal[0] + g.normal[1] * h.normal[1] > 0.0;
                // Duplicate walls: the lower index keeps the edge.
                if slack < -LENGTH_EPS || (same_line && j < i) {
                    empty = true;
                    break;
                }
                continue;
            }
            let t = -slack / denom;
            if denom > 0.0 {
                t_min = t_min.max(t);
            } else {
                t_max = t_max.min(t);
            }
        }
        if empty || t_max - t_min <= LENGTH_EPS {
            continue;
        }
        if !t_min.is_finite() || !t_max.is_finite() {
            unbounded = true;
            continue;
        }
        vertices.push([origin[0] + t_min * dir[0], origin[1] + t_min * dir[1]]);
    }
    if unbounded {
        return Err(GeometryError::UnboundedFootprint);
    }
    if vertices.len() < 3 || polygon::signed_area(&vertices) <= 0.0 {
        return Err(GeometryError::EmptyFootprint);
    }
    Ok(vertices)
}
