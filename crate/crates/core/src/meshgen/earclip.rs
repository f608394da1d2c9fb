use crate::geometry::polygon::{is_simple, orient, point_in_triangle, signed_area, Point2};

use super::MeshError;

/// Ear-clips a simple CCW polygon into `n - 2` CCW triangles.
pub fn triangulate_footprint(polygon: &[Point2]) -> Result<Vec<[usize; 3]>, MeshError> {
    let n = polygon.len();
    if n < 3 {
        return Err(MeshError::DegeneratePolygon(format!("{n} vertices")));
    }
    if polygon.iter().flatten().any(|c| !c.is_finite()) {
        return Err(MeshError::DegeneratePolygon("non-finite coordinate".into()));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if polygon[i] == polygon[j] {
                return Err(MeshError::DegeneratePolygon(format!("vertices {i} and {j} coincide")));
            }
        }
    }
    let area = signed_area(polygon);
    let scale = polygon.iter().flatten().fold(0.0f64, |m, c| m.max(c.abs())).max(1e-300);
    let eps = 1e-14 * scale * scale;
    if polygon.iter().all(|&p| orient(polygon[0], polygon[1], p).abs() <= eps) {
        return Err(MeshError::DegeneratePolygon("all vertices are collinear".into()));
    }
    if !is_simple(polygon) {
        return Err(MeshError::NotSimple);
    }
    if area.abs() <= eps {
        return Err(MeshError::DegeneratePolygon("zero area".into()));
    }
    if area < 0.0 {
        return Err(MeshError::NotCounterClockwise);
    }

    let mut ring: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n - 2);
    while ring.len() > 3 {
        let m = ring.len();
        let corner = |k: usize| (ring[(k + m - 1) % m], ring[k], ring[(k + 1) % m]);
        let is_ear = |k: usize| {
            let (a, b, c) = corner(k);
            let (pa, pb, pc) = (polygon[a], polygon[b], polygon[c]);
            if orient(pa, pb, pc) <= eps {
                return false;
            }
            ring.iter()
                .filter(|&&v| v != a && v != b && v != c)
                .all(|&v| !point_in_triangle(polygon[v], pa, pb, pc, eps))
        };
        // Fall back to the most convex corner if rounding hides every ear.
        let k = (0..m).find(|&k| is_ear(k)).unwrap_or_else(|| {
            (0..m)
                .max_by(|&x, &y| {
                    let (a, b, c) = corner(x);
                    let (d, e, f) = corner(y);
                    orient(polygon[a], polygon[b], polygon[c]).total_cmp(&orient(polygon[d], polygon[e], polygon[f]))
                })
                .expect("ring is non-empty")
        });
        let (a, b, c) = corner(k);
        out.push([a, b, c]);
        ring.remove(k);
    }
    out.push([ring[0], ring[1], ring[2]]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri_area(p: &[Point2], t: [usize; 3]) -> f64 {
        0.5 * orient(p[t[0]], p[t[1]], p[t[2]])
    }

    fn check(poly: &[Point2]) -> Vec<[usize; 3]> {
        let tris = triangulate_footprint(poly).unwrap();
        assert_eq!(tris.len(), poly.len() - 2);
        let mut sum = 0.0;
        for &t in &tris {
            let a = tri_area(poly, t);
            assert!(a > 0.0, "triangle {t:?} has area {a}");
            sum += a;
        }
        let shoelace = signed_area(poly);
        assert!((sum - shoelace).abs() <= 1e-12 * shoelace);
        tris
    }

    #[test]
    fn unit_square() {
        let tris = check(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(tris.len(), 2);
    }

    #[test]
    fn regular_pentagon() {
        let poly: Vec<Point2> = (0..5)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 5.0;
                [a.cos(), a.sin()]
            })
            .collect();
        assert_eq!(check(&poly).len(), 3);
    }

    #[test]
    fn l_shaped_hexagon() {
        let poly = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        assert_eq!(check(&poly).len(), 4);
    }

    #[test]
    fn collinear_midpoints() {
        let poly = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [0.0, 1.0]];
        check(&poly);
    }

    #[test]
    fn comb_polygon() {
        let poly = [
            [0.0, 0.0],
            [5.0, 0.0],
            [5.0, 3.0],
            [4.0, 3.0],
            [4.0, 1.0],
            [3.0, 1.0],
            [3.0, 3.0],
            [2.0, 3.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 3.0],
            [0.0, 3.0],
        ];
        check(&poly);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            triangulate_footprint(&[[0.0, 0.0], [1.0, 0.0]]),
            Err(MeshError::DegeneratePolygon(_))
        ));
        assert!(matches!(
            triangulate_footprint(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]),
            Err(MeshError::DegeneratePolygon(_))
        ));
        assert!(matches!(
            triangulate_footprint(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
            Err(MeshError::DegeneratePolygon(_))
        ));
        assert_eq!(
            triangulate_footprint(&[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]),
            Err(MeshError::NotSimple)
        );
        assert_eq!(
            triangulate_footprint(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]),
            Err(MeshError::NotCounterClockwise)
        );
    }
}
