//! Reference implementations used as test oracles. None of these share code
//! paths with the library routines they check.

#![allow(dead_code)]

use std::collections::HashMap;

use roomfem_core::meshgen::TetMesh;

/// Gaussian elimination with partial pivoting on a dense copy.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                let pivot_row = m[col].clone();
                for (x, p) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (m[row][n] - s) / m[row][row];
    }
    x
}

/// Counts how many tets contain each (sorted) triangular face.
pub fn face_incidence(mesh: &TetMesh) -> HashMap<[usize; 3], usize> {
    let mut faces = HashMap::new();
    for tet in &mesh.tets {
        for skip in 0..4 {
            let mut f = [0; 3];
            let mut k = 0;
            for (m, &v) in tet.iter().enumerate() {
                if m != skip {
                    f[k] = v;
                    k += 1;
                }
            }
            f.sort_unstable();
            *faces.entry(f).or_insert(0) += 1;
        }
    }
    faces
}

/// Conformity: every face has 1 or 2 incident tets, the faces with exactly
/// one are precisely the tagged boundary facets (each tagged once).
pub fn check_conformity(mesh: &TetMesh) -> Result<(), String> {
    let faces = face_incidence(mesh);
    let mut boundary: HashMap<[usize; 3], usize> = HashMap::new();
    for f in &mesh.boundary {
        let mut t = f.tri;
        t.sort_unstable();
        *boundary.entry(t).or_insert(0) += 1;
    }
    for (face, &count) in &faces {
        match count {
            1 => {
                if boundary.get(face) != Some(&1) {
                    return Err(format!(
                        "face {face:?} has one tet but is tagged {:?} times",
                        boundary.get(face)
                    ));
                }
            }
            2 => {
                if boundary.contains_key(face) {
                    return Err(format!("interior face {face:?} is tagged"));
                }
            }
            n => return Err(format!("face {face:?} shared by {n} tets")),
        }
    }
    for face in boundary.keys() {
        if faces.get(face) != Some(&1) {
            return Err(format!("tagged facet {face:?} is not a boundary face"));
        }
    }
    Ok(())
}

/// Determinant-based signed volume (cofactor expansion).
pub fn det_volume(p: [[f64; 3]; 4]) -> f64 {
    let d = |k: usize, c: usize| p[k][c] - p[0][c];
    (d(1, 0) * (d(2, 1) * d(3, 2) - d(2, 2) * d(3, 1)) - d(1, 1) * (d(2, 0) * d(3, 2) - d(2, 2) * d(3, 0))
        + d(1, 2) * (d(2, 0) * d(3, 1) - d(2, 1) * d(3, 0)))
        / 6.0
}

pub fn shoelace(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| poly[i][0] * poly[(i + 1) % n][1] - poly[(i + 1) % n][0] * poly[i][1])
        .sum::<f64>()
        / 2.0
}

/// Sutherland-Hodgman: clip a large square by half-planes `n · p >= c`.
pub fn clip_half_planes(half_planes: &[([f64; 2], f64)], extent: f64) -> Vec<[f64; 2]> {
    let mut poly = vec![
        [-extent, -extent],
        [extent, -extent],
        [extent, extent],
        [-extent, extent],
    ];
    for &(n, c) in half_planes {
        let inside = |p: [f64; 2]| n[0] * p[0] + n[1] * p[1] - c;
        let mut out = Vec::new();
        for i in 0..poly.len() {
            let p = poly[i];
            let q = poly[(i + 1) % poly.len()];
            let (fp, fq) = (inside(p), inside(q));
            if fp >= 0.0 {
                out.push(p);
            }
            if (fp >= 0.0) != (fq >= 0.0) {
                let t = fp / (fp - fq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        poly = out;
    }
    poly
}

/// Barycentric coordinate `i` of `x` as a ratio of sub-volumes.
pub fn barycentric(p: [[f64; 3]; 4], i: usize, x: [f64; 3]) -> f64 {
    let mut q = p;
    q[i] = x;
    det_volume(q) / det_volume(p)
}

/// Stiffness from central differences of the barycentric coordinates,
/// integrated with a one-point rule at the centroid.
pub fn stiffness_oracle(p: [[f64; 3]; 4]) -> [[f64; 4]; 4] {
    let h = 0.25;
    let c = [0, 1, 2].map(|k| p.iter().map(|v| v[k]).sum::<f64>() / 4.0);
    let grad = |i: usize| {
        [0, 1, 2].map(|k| {
            let (mut xp, mut xm) = (c, c);
            xp[k] += h;
            xm[k] -= h;
            (barycentric(p, i, xp) - barycentric(p, i, xm)) / (2.0 * h)
        })
    };
    let g = [0, 1, 2, 3].map(grad);
    let vol = det_volume(p).abs();
    let mut k = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            k[i][j] = vol * (0..3).map(|d| g[i][d] * g[j][d]).sum::<f64>();
        }
    }
    k
}
