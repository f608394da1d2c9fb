use std::collections::BTreeMap;

use proptest::prelude::*;
use roomfem_core::fem::{solve_poisson, PointSource, PoissonProblem, SolverOptions};
use roomfem_core::geometry::{reconstruct_space, ExtractionParams, Space, Vec3};
use roomfem_core::io::{self, ScanFormat, SolutionFormat};
use roomfem_core::meshgen::{mesh_space, BoundaryTag};
use roomfem_core::synth;

fn rectangle() -> impl Strategy<Value = Space> {
    (
        -1e3f64..1e3,
        -1e3f64..1e3,
        1e-3f64..1e3,
        1e-3f64..1e3,
        -10.0f64..10.0,
        1e-3f64..10.0,
    )
        .prop_map(|(x, y, w, d, z, h)| {
            Space::new(vec![[x, y], [x + w, y], [x + w, y + d], [x, y + d]], z, z + h).unwrap()
        })
}

fn tag() -> impl Strategy<Value = BoundaryTag> {
    prop_oneof![
        Just(BoundaryTag::Floor),
        Just(BoundaryTag::Ceiling),
        (0usize..64).prop_map(BoundaryTag::Wall)
    ]
}

fn problem() -> impl Strategy<Value = PoissonProblem> {
    let source = (prop::array::uniform3(-1e6f64..1e6), -1e6f64..1e6)
        .prop_map(|(position, strength)| PointSource { position, strength });
    (
        prop::collection::vec(source, 0..5),
        prop::collection::btree_map(tag(), -1e6f64..1e6, 0..6),
    )
        .prop_map(|(sources, dirichlet)| PoissonProblem { sources, dirichlet })
}

proptest! {
    #[test]
    fn space_round_trips_bitwise(space in rectangle()) {
        let bytes = io::write_space(&space);
        let back = io::read_space(&bytes).unwrap();
        prop_assert_eq!(&back, &space);
        prop_assert_eq!(io::write_space(&back), bytes);
    }

    #[test]
    fn problem_round_trips_bitwise(p in problem()) {
        let bytes = io::write_problem(&p);
        let back = io::read_problem(&bytes).unwrap();
        prop_assert_eq!(&back, &p);
    }

    #[test]
    fn mesh_round_trips_bitwise(space in rectangle(), refine in 0u32..2) {
        let mesh = mesh_space(&space, space.height() / 2.0, refine).unwrap();
        let bytes = io::write_mesh(&mesh);
        let back = io::read_mesh(&bytes).unwrap();
        prop_assert_eq!(&back, &mesh);
        prop_assert_eq!(io::mesh_checksum(&back), io::mesh_checksum(&mesh));
    }
}

#[test]
fn scan_survives_ply_export() {
    let scan = synth::box_scan([4.0, 3.0, 2.5], 0.01, 2);
    let ply = io::write_ply(&scan);
    let back = io::read_surface_scan(ply.as_bytes(), ScanFormat::Ply).unwrap();
    assert_eq!(back.dropped_faces, 0);
    assert_eq!(back.mesh, scan);
}

#[test]
fn obj_and_ply_agree() {
    let ply = "ply\nformat ascii 1.0\nelement vertex 4\nproperty float x\nproperty float y\nproperty float z\n\
               element face 1\nproperty list uchar int vertex_indices\nend_header\n\
               0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
    let obj = "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1 2/2 3/3 -1\n";
    let a = io::read_surface_scan(ply.as_bytes(), ScanFormat::Ply).unwrap();
    let b = io::read_surface_scan(obj.as_bytes(), ScanFormat::Obj).unwrap();
    assert_eq!(a.mesh, b.mesh);
    assert_eq!(a.mesh.triangles().len(), 2);
}

#[test]
fn solution_export_links_to_its_mesh() {
    let scan = synth::box_scan([4.0, 3.0, 2.5], 0.0, 0);
    let space = reconstruct_space(&scan, &ExtractionParams::default(), Vec3::z()).unwrap();
    let mesh = mesh_space(&space, 0.5, 1).unwrap();
    let problem = PoissonProblem {
        sources: vec![PointSource {
            position: [2.0, 1.5, 1.2],
            strength: 1.0,
        }],
        dirichlet: BTreeMap::from([(BoundaryTag::Wall(0), 0.0), (BoundaryTag::Wall(2), 1.0)]),
    };
    let field = solve_poisson(&mesh, &problem, &SolverOptions::default()).unwrap();
    let bytes = io::write_solution(&mesh, &field, SolutionFormat::Json).unwrap();
    let export = io::read_solution(&bytes).unwrap();
    assert!(export.matches_mesh(&mesh));
    assert_eq!(export.field(), field);
    assert_eq!(export.vertices, mesh.vertices);

    let vtk = String::from_utf8(io::write_solution(&mesh, &field, SolutionFormat::VtkLegacy).unwrap()).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version"));
    assert!(vtk.contains(&format!("POINTS {} double", mesh.vertices.len())));
    assert!(vtk.contains(&format!("CELL_TYPES {}", mesh.tets.len())));
    assert!(vtk.contains(&format!("POINT_DATA {}", mesh.vertices.len())));
}

#[test]
fn wrong_schema_is_refused() {
    let doc = br#"{"schema":"roomfem/v2","footprint":[[0,0],[1,0],[0,1]],"z_floor":0,"z_ceiling":1}"#;
    let err = io::read_space(doc).unwrap_err();
    assert_eq!(err.name(), "SchemaMismatch");
    let missing = br#"{"footprint":[[0,0],[1,0],[0,1]],"z_floor":0,"z_ceiling":1}"#;
    assert!(io::read_space(missing).is_ok());
    assert_eq!(io::read_space(b"{").unwrap_err().name(), "ParseError");
}
