use std::f64::consts::TAU;

use super::{ClassifiedPlanes, Frame, GeometryError, Plane, Vec3};

/// Height of a near-horizontal plane along `up`.
fn height(plane: &Plane, up: &Vec3) -> f64 {
    plane.offset / plane.normal.dot(up)
}

/// Splits planes into floor, ceiling and walls relative to `up`.
///
/// Floor and ceiling are the lowest and highest horizontal planes; when
/// several horizontal planes sit within a few millimetres of the extreme
/// height the one with the largest inlier area wins. Walls are re-oriented to
/// face into the room and sorted by the azimuth of that inward normal.
pub fn classify_planes(planes: &[Plane], up: Vec3, angle_tol: f64) -> Result<ClassifiedPlanes, GeometryError> {
    if planes.is_empty() {
        return Err(GeometryError::InvalidParameter("no planes to classify".into()));
    }
    if !(angle_tol > 0.0 && angle_tol < 45.0) {
        return Err(GeometryError::InvalidParameter(
            "angle_tol must lie in (0, 45) degrees".into(),
        ));
    }
    let frame = Frame::from_up(up)?;
    let up = frame.up;
    let cos_tol = angle_tol.to_radians().cos();
    let sin_tol = angle_tol.to_radians().sin();

    let mut horizontal = Vec::new();
    let mut walls = Vec::new();
    let mut discarded = Vec::new();
    for plane in planes {
        let c = plane.normal.dot(&up).abs();
        if c >= cos_tol {
            horizontal.push(plane.clone());
        } else if c <= sin_tol {
            walls.push(plane.clone());
        } else {
            discarded.push(plane.clone());
        }
    }

    if horizontal.is_empty() {
        return Err(GeometryError::MissingFloor);
    }
    let heights: Vec<f64> = horizontal.iter().map(|p| height(p, &up)).collect();
    let lowest = heights.iter().copied().fold(f64::INFINITY, f64::min);
    let highest = heights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if highest - lowest <= 0.0 {
        return Err(GeometryError::MissingCeiling);
    }
    let tie = 1e-3 * (highest - lowest);
    let pick = |target: f64| {
        (0..horizontal.len())
            .filter(|&i| (heights[i] - target).abs() <= tie)
            .max_by(|&a, &b| {
                horizontal[a]
                    .inlier_area
                    .total_cmp(&horizontal[b].inlier_area)
                    .then(b.cmp(&a))
            })
            .expect("extreme height is attained")
    };
    let floor_idx = pick(lowest);
    let ceiling_idx = pick(highest);

    let mut floor = None;
    let mut ceiling = None;
    for (i, plane) in horizontal.into_iter().enumerate() {
        if i == floor_idx {
            floor = Some(plane);
        } else if i == ceiling_idx {
            ceiling = Some(plane);
        } else {
            discarded.push(plane);
        }
    }
    let floor = floor.ok_or(GeometryError::MissingFloor)?;
    let ceiling = ceiling.ok_or(GeometryError::MissingCeiling)?;

    if walls.len() < 3 {
        return Err(GeometryError::TooFewWalls { found: walls.len() });
    }

    // Any convex combination of wall centroids lies inside a convex room.
    let total: f64 = walls.iter().map(|w| w.inlier_area).sum();
    let reference = if total > 0.0 {
        walls.iter().map(|w| w.centroid * w.inlier_area).sum::<Vec3>() / total
    } else {
        walls.iter().map(|w| w.centroid).sum::<Vec3>() / walls.len() as f64
    };
    for wall in &mut walls {
        if wall.signed_distance(&reference) < 0.0 {
            *wall = wall.flipped();
        }
    }
    let azimuth = |p: &Plane| p.normal.dot(&frame.e2).atan2(p.normal.dot(&frame.e1)).rem_euclid(TAU);
    walls.sort_by(|a, b| azimuth(a).total_cmp(&azimuth(b)).then(a.offset.total_cmp(&b.offset)));

    Ok(ClassifiedPlanes {
        floor,
        ceiling,
        walls,
        discarded,
        frame,
    })
}

/// Heights of the floor and ceiling planes along the frame's `up`.
pub(super) fn floor_and_ceiling_heights(c: &ClassifiedPlanes) -> (f64, f64) {
    (height(&c.floor, &c.frame.up), height(&c.ceiling, &c.frame.up))
}
