mod common;

use proptest::prelude::*;
use roomfem_core::geometry::Space;
use roomfem_core::meshgen::{
    extrude, mesh_quality, mesh_space, triangulate_footprint, BoundaryTag, FootprintMesh, TetMesh,
};

fn tag_area(mesh: &TetMesh, pred: impl Fn(BoundaryTag) -> bool) -> f64 {
    mesh.boundary
        .iter()
        .filter(|f| pred(f.tag))
        .map(|f| mesh.facet_area(f))
        .sum()
}

fn assert_positive(mesh: &TetMesh) {
    for t in 0..mesh.tets.len() {
        let p = mesh.tets[t].map(|v| mesh.vertices[v]);
        assert!(common::det_volume(p) > 0.0, "tet {t} not positive");
    }
}

#[test]
fn unit_square_two_layers() {
    let space = Space::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], 0.0, 1.0).unwrap();
    let mesh = mesh_space(&space, 0.5, 0).unwrap();
    assert_eq!(mesh.tets.len(), 12);
    assert_eq!(mesh.vertices.len(), 12);
    common::check_conformity(&mesh).unwrap();
    assert_positive(&mesh);
}

#[test]
fn box_tag_areas() {
    let space = Space::new(vec![[0.0, 0.0], [4.0, 0.0], [4.0, 3.0], [0.0, 3.0]], 0.0, 2.5).unwrap();
    let mesh = mesh_space(&space, 0.5, 0).unwrap();
    common::check_conformity(&mesh).unwrap();
    let horizontal = tag_area(&mesh, |t| matches!(t, BoundaryTag::Floor | BoundaryTag::Ceiling));
    let walls = tag_area(&mesh, |t| matches!(t, BoundaryTag::Wall(_)));
    assert!((horizontal - 24.0).abs() < 1e-9);
    assert!((walls - 35.0).abs() < 1e-9);
    assert!((tag_area(&mesh, |t| t == BoundaryTag::Wall(0)) - 4.0 * 2.5).abs() < 1e-9);
    assert!((tag_area(&mesh, |t| t == BoundaryTag::Wall(1)) - 3.0 * 2.5).abs() < 1e-9);
    assert!((mesh.total_volume() - 30.0).abs() < 1e-9 * 30.0);
}

#[test]
fn refined_mesh_is_conforming_with_interior_nodes() {
    let space = Space::new(vec![[0.0, 0.0], [4.0, 0.0], [4.0, 3.0], [0.0, 3.0]], 0.0, 2.5).unwrap();
    let mesh = mesh_space(&space, 0.5, 2).unwrap();
    common::check_conformity(&mesh).unwrap();
    assert_positive(&mesh);
    let on_boundary: std::collections::HashSet<usize> = mesh.boundary.iter().flat_map(|f| f.tri).collect();
    assert!(on_boundary.len() < mesh.vertices.len());
    let q = mesh_quality(&mesh);
    assert!(q.min_volume > 0.0);
    assert!((q.total_volume - 30.0).abs() < 1e-9 * 30.0);
}

#[test]
fn non_convex_footprint_extrudes() {
    let l = vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
    let tris = triangulate_footprint(&l).unwrap();
    assert_eq!(tris.len(), 4);
    let fm = FootprintMesh::from_polygon(&l, tris).unwrap();
    assert!((fm.area() - common::shoelace(&l)).abs() < 1e-12);
    let mesh = extrude(&fm, 0.0, 2.0, 3).unwrap();
    common::check_conformity(&mesh).unwrap();
    assert!((mesh.total_volume() - 6.0).abs() < 1e-12);
}

/// Random convex polygon: sorted random angles on a jittered circle.
fn convex_polygon() -> impl Strategy<Value = Vec<[f64; 2]>> {
    (3usize..12, any::<u64>(), 0.5f64..5.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(n, seed, r, cx, cy)| {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        angles.dedup_by(|a, b| (*a - *b).abs() < 0.05);
        let pts: Vec<[f64; 2]> = angles.iter().map(|a| [cx + r * a.cos(), cy + r * a.sin()]).collect();
        hull(pts)
    })
}

/// Monotone-chain convex hull, dropping collinear points.
fn hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-9 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-9 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_convex_prisms(poly in convex_polygon(), layers in 1usize..6, refine in 0u32..2, z0 in -1.0f64..1.0, h in 0.5f64..4.0) {
        prop_assume!(poly.len() >= 3 && common::shoelace(&poly) > 1e-3);
        let tris = triangulate_footprint(&poly).unwrap();
        let mut fm = FootprintMesh::from_polygon(&poly, tris).unwrap();
        for _ in 0..refine {
            fm = fm.refined();
        }
        let mesh = extrude(&fm, z0, z0 + h, layers).unwrap();
        prop_assert_eq!(mesh.tets.len(), 3 * layers * fm.triangles.len());
        prop_assert_eq!(mesh.vertices.len(), (layers + 1) * fm.points.len());
        for tet in &mesh.tets {
            prop_assert!(common::det_volume(tet.map(|v| mesh.vertices[v])) > 0.0);
        }
        prop_assert!(common::check_conformity(&mesh).is_ok(), "{:?}", common::check_conformity(&mesh));
        let prism = common::shoelace(&poly) * h;
        let total: f64 = mesh.tets.iter().map(|t| common::det_volume(t.map(|v| mesh.vertices[v]))).sum();
        prop_assert!((total - prism).abs() <= 1e-9 * prism, "{} vs {}", total, prism);
    }
}
