use roomfem_web::{color_map, sphere_radius, Demo};

#[test]
fn color_ramp_endpoints_and_midpoint() {
    assert_eq!(color_map(1.0, 1.0, 3.0), [0, 0, 255]);
    assert_eq!(color_map(3.0, 1.0, 3.0), [255, 0, 0]);
    assert_eq!(color_map(2.0, 1.0, 3.0), [0, 255, 0]);
    assert_eq!(color_map(5.0, 5.0, 5.0), [0, 0, 255]);
}

#[test]
fn color_ramp_is_monotone_in_hue() {
    // hue decreases from 240 to 0: red never falls and blue never rises
    let mut prev = color_map(0.0, 0.0, 1.0);
    for i in 1..=100 {
        let c = color_map(i as f64 / 100.0, 0.0, 1.0);
        assert!(c[0] >= prev[0] && c[2] <= prev[2], "{prev:?} -> {c:?}");
        prev = c;
    }
}

#[test]
fn sphere_radius_rules() {
    assert_eq!(sphere_radius(3.0, 1.0, 3.0, 0.1), 0.1);
    assert_eq!(sphere_radius(1.0, 1.0, 3.0, 0.1), 0.002);
    assert!((sphere_radius(2.0, 1.0, 3.0, 0.1) - 0.05).abs() < 1e-15);
    assert_eq!(sphere_radius(2.0, 2.0, 2.0, 0.1), 0.002);
}

#[test]
fn demo_workflow() {
    let mut demo = Demo::scan(0, 0.0, 0.0, 0.005, 3).unwrap();
    assert!((demo.space.area() - 12.0).abs() < 0.24);
    assert!(demo.solve().unwrap_err().starts_with("StageConflict"));
    let n = demo.mesh(0.5, 2).unwrap();
    assert!(demo
        .add_source([20.0, 0.0, 1.0], 1.0)
        .unwrap_err()
        .starts_with("PointOutsideDomain"));
    demo.add_source([2.0, 1.5, 1.2], 1.0).unwrap();
    assert!(demo.solve().unwrap_err().starts_with("NoDirichletData"));
    assert!(demo.set_boundary("WALL:9", 0.0).is_err());
    demo.set_boundary("WALL:0", 0.0).unwrap();
    let field = demo.solve().unwrap();
    assert_eq!(field.values.len(), n);
    assert_eq!(field.min, 0.0);
    assert!(field.max > 0.0);
    assert!(!demo.boundary_edges().is_empty());
}
