use crate::geometry::Vec3;

use super::TetMesh;

#[derive(Debug, Clone, PartialEq)]
pub struct MeshQuality {
    /// Smallest dihedral angle over all tets, degrees.
    pub min_dihedral: f64,
    pub max_dihedral: f64,
    /// Largest circumradius / shortest-edge ratio. A regular tet has √6/4.
    pub max_aspect: f64,
    pub min_volume: f64,
    pub max_volume: f64,
    pub total_volume: f64,
}

// Pairs of faces meeting at each of the six edges, indexed by opposite vertex.
const FACE_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn dihedral_angles(p: &[Vec3; 4]) -> [f64; 6] {
    // Outward normal of the face opposite vertex k.
    let normal = |k: usize| {
        let idx: Vec<usize> = (0..4).filter(|&i| i != k).collect();
        let n = (p[idx[1]] - p[idx[0]]).cross(&(p[idx[2]] - p[idx[0]]));
        let n = if n.dot(&(p[k] - p[idx[0]])) > 0.0 { -n } else { n };
        n.normalize()
    };
    let normals = [normal(0), normal(1), normal(2), normal(3)];
    FACE_PAIRS.map(|(i, j)| {
        let c = (-normals[i].dot(&normals[j])).clamp(-1.0, 1.0);
        c.acos().to_degrees()
    })
}

fn circumradius(p: &[Vec3; 4]) -> f64 {
    let a = p[1] - p[0];
    let b = p[2] - p[0];
    let c = p[3] - p[0];
    let num = b.cross(&c) * a.norm_squared() + c.cross(&a) * b.norm_squared() + a.cross(&b) * c.norm_squared();
    num.norm() / (2.0 * a.dot(&b.cross(&c)).abs())
}

/// Diagnostic summary of element shapes and sizes.
pub fn mesh_quality(mesh: &TetMesh) -> MeshQuality {
    let mut q = MeshQuality {
        min_dihedral: f64::INFINITY,
        max_dihedral: f64::NEG_INFINITY,
        max_aspect: 0.0,
        min_volume: f64::INFINITY,
        max_volume: f64::NEG_INFINITY,
        total_volume: 0.0,
    };
    for t in 0..mesh.tets.len() {
        let p = mesh.tet_coords(t);
        for angle in dihedral_angles(&p) {
            q.min_dihedral = q.min_dihedral.min(angle);
            q.max_dihedral = q.max_dihedral.max(angle);
        }
        let shortest = FACE_PAIRS
            .iter()
            .map(|&(i, j)| (p[i] - p[j]).norm())
            .fold(f64::INFINITY, f64::min);
        q.max_aspect = q.max_aspect.max(circumradius(&p) / shortest);
        let v = mesh.tet_volume(t);
        q.min_volume = q.min_volume.min(v);
        q.max_volume = q.max_volume.max(v);
        q.total_volume += v;
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Space;
    use crate::meshgen::mesh_space;

    fn regular_tet() -> TetMesh {
        let s = 1.0 / 2f64.sqrt();
        TetMesh {
            vertices: vec![[1.0, 0.0, -s], [-1.0, 0.0, -s], [0.0, 1.0, s], [0.0, -1.0, s]],
            tets: vec![[0, 1, 2, 3]],
            boundary: vec![],
        }
    }

    #[test]
    fn regular_tet_dihedral() {
        let mut mesh = regular_tet();
        if mesh.tet_volume(0) < 0.0 {
            mesh.tets[0].swap(2, 3);
        }
        let q = mesh_quality(&mesh);
        let expected = (1.0f64 / 3.0).acos().to_degrees();
        assert!((q.min_dihedral - expected).abs() < 1e-10, "{}", q.min_dihedral);
        assert!((q.max_dihedral - expected).abs() < 1e-10);
        assert!((q.max_aspect - 6f64.sqrt() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn unit_cube_six_tets() {
        let s = Space::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], 0.0, 1.0).unwrap();
        let mesh = mesh_space(&s, 1.0, 0).unwrap();
        assert_eq!(mesh.tets.len(), 6);
        // brute-force determinant per tet
        for tet in &mesh.tets {
            let p: Vec<[f64; 3]> = tet.iter().map(|&i| mesh.vertices[i]).collect();
            let d = |k: usize, c: usize| p[k][c] - p[0][c];
            let det = d(1, 0) * (d(2, 1) * d(3, 2) - d(2, 2) * d(3, 1))
                - d(1, 1) * (d(2, 0) * d(3, 2) - d(2, 2) * d(3, 0))
                + d(1, 2) * (d(2, 0) * d(3, 1) - d(2, 1) * d(3, 0));
            assert!((det / 6.0 - 1.0 / 6.0).abs() < 1e-15);
        }
        let q = mesh_quality(&mesh);
        assert!((q.min_volume - 1.0 / 6.0).abs() < 1e-15);
        assert!((q.total_volume - 1.0).abs() < 1e-14);
    }
}
