use std::fmt::Write as _;

use crate::fem::SolutionField;
use crate::meshgen::TetMesh;

const VTK_TETRA: u8 = 10;

/// Legacy ASCII VTK unstructured grid with one point scalar `u`.
pub fn write_vtk(mesh: &TetMesh, field: &SolutionField) -> String {
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\nroomfem solution\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {} double", mesh.vertices.len());
    for [x, y, z] in &mesh.vertices {
        let _ = writeln!(out, "{x:?} {y:?} {z:?}");
    }
    let _ = writeln!(out, "CELLS {} {}", mesh.tets.len(), 5 * mesh.tets.len());
    for [a, b, c, d] in &mesh.tets {
        let _ = writeln!(out, "4 {a} {b} {c} {d}");
    }
    let _ = writeln!(out, "CELL_TYPES {}", mesh.tets.len());
    for _ in &mesh.tets {
        let _ = writeln!(out, "{VTK_TETRA}");
    }
    let _ = writeln!(out, "POINT_DATA {}", mesh.vertices.len());
    out.push_str("SCALARS u double 1\nLOOKUP_TABLE default\n");
    for v in &field.values {
        let _ = writeln!(out, "{v:?}");
    }
    out
}
