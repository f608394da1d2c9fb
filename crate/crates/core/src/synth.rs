//! Synthetic room scans with known ground truth.
//!
//! Each face of the prism is tessellated on its own (faces do not share
//! vertices) with triangles oriented into the room, and every vertex receives
//! isotropic Gaussian noise from a seeded ChaCha stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::geometry::{Space, SurfaceMesh, Vec3};
use crate::meshgen::{triangulate_footprint, FootprintMesh};

/// Target edge length of the generated tessellation (m).
pub const DEFAULT_SPACING: f64 = 0.25;

/// Axis-aligned box `[0, l] × [0, w] × [0, h]`.
pub fn box_scan(dims: [f64; 3], noise: f64, seed: u64) -> SurfaceMesh {
    let [l, w, h] = dims;
    let space =
        Space::new(vec![[0.0, 0.0], [l, 0.0], [l, w], [0.0, w]], 0.0, h).expect("box dimensions must be positive");
    room_scan(&space, DEFAULT_SPACING, noise, seed)
}

/// Regular `sides`-gon of circumradius `radius` centred at the origin.
pub fn polygon_footprint(sides: usize, radius: f64) -> Vec<[f64; 2]> {
    (0..sides)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / sides as f64;
            [radius * a.cos(), radius * a.sin()]
        })
        .collect()
}

pub fn room_scan(space: &Space, spacing: f64, noise: f64, seed: u64) -> SurfaceMesh {
    assert!(spacing > 0.0, "spacing must be positive");
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();

    let base = triangulate_footprint(&space.footprint).expect("space footprint is a valid polygon");
    let mut floor = FootprintMesh::from_polygon(&space.footprint, base).expect("triangulation indexes the footprint");
    while longest_edge(&floor) > spacing {
        floor = floor.refined();
    }
    for (z, flip) in [(space.z_floor, false), (space.z_ceiling, true)] {
        let offset = vertices.len();
        vertices.extend(floor.points.iter().map(|&[x, y]| Vec3::new(x, y, z)));
        triangles.extend(floor.triangles.iter().map(|&[a, b, c]| {
            if flip {
                [a + offset, c + offset, b + offset]
            } else {
                [a + offset, b + offset, c + offset]
            }
        }));
    }

    let n = space.footprint.len();
    let height = space.height();
    for k in 0..n {
        let p = space.footprint[k];
        let q = space.footprint[(k + 1) % n];
        let len = (q[0] - p[0]).hypot(q[1] - p[1]);
        let ns = (len / spacing).ceil().max(1.0) as usize;
        let nt = (height / spacing).ceil().max(1.0) as usize;
        let offset = vertices.len();
        for j in 0..=nt {
            let z = space.z_floor + height * j as f64 / nt as f64;
            for i in 0..=ns {
                let s = i as f64 / ns as f64;
                vertices.push(Vec3::new(p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1]), z));
            }
        }
        let at = |i: usize, j: usize| offset + j * (ns + 1) + i;
        for j in 0..nt {
            for i in 0..ns {
                // Wound so the normal points left of p -> q, i.e. into the room.
                triangles.push([at(i, j), at(i + 1, j + 1), at(i + 1, j)]);
                triangles.push([at(i, j), at(i, j + 1), at(i + 1, j + 1)]);
            }
        }
    }

    if noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise).expect("noise is finite and positive");
        for v in &mut vertices {
            *v += Vec3::new(
                normal.sample(&mut rng),
                normal.sample(&mut rng),
                normal.sample(&mut rng),
            );
        }
    }
    SurfaceMesh::new(vertices, triangles).expect("generated indices are in range")
}

fn longest_edge(fm: &FootprintMesh) -> f64 {
    fm.triangles
        .iter()
        .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
        .map(|(i, j)| {
            let (p, q) = (fm.points[i], fm.points[j]);
            (q[0] - p[0]).hypot(q[1] - p[1])
        })
        .fold(0.0, f64::max)
}
