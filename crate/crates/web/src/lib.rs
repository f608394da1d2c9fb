//! Browser demo: scan a synthetic room, mesh it, place sources and wall
//! values, solve, and read back per-node colours and sphere radii.
//!
//! [`Demo`] holds the logic and is usable natively; [`Room`] is its thin
//! wasm-bindgen face.

use roomfem_core::fem::{locate_point, solve_poisson, PointSource, PoissonProblem, SolutionField, SolverOptions};
use roomfem_core::geometry::{reconstruct_space, ExtractionParams, Space, Vec3};
use roomfem_core::io;
use roomfem_core::meshgen::{mesh_space, BoundaryTag, TetMesh};
use roomfem_core::synth;
use wasm_bindgen::prelude::*;

/// Linear hue ramp from blue (240°) at `min` to red (0°) at `max`, full
/// saturation and value. A flat range maps to blue.
pub fn color_map(value: f64, min: f64, max: f64) -> [u8; 3] {
    let t = if max > min {
        ((value - min) / (max - min)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let hue = 240.0 * (1.0 - t);
    // HSV with s = v = 1: each channel is a clamped triangle wave of hue.
    let channel = |n: f64| {
        let k = (n + hue / 60.0) % 6.0;
        1.0 - k.min(4.0 - k).clamp(0.0, 1.0)
    };
    [5.0, 3.0, 1.0].map(|n| (255.0 * channel(n)).round() as u8)
}

/// Radius proportional to the value above `min`, never below `0.02 r_max`
/// so that zero-valued nodes stay visible.
pub fn sphere_radius(value: f64, min: f64, max: f64, r_max: f64) -> f64 {
    let floor = 0.02 * r_max;
    if !(max > min) {
        return floor;
    }
    (r_max * (value - min) / (max - min)).clamp(floor, r_max)
}

/// Room state for the demo page.
#[derive(Debug, Clone)]
pub struct Demo {
    pub space: Space,
    pub scan_triangles: usize,
    pub mesh: Option<TetMesh>,
    pub problem: PoissonProblem,
    pub field: Option<SolutionField>,
}

impl Demo {
    /// Generates a noisy synthetic scan and reconstructs its Space. `sides`
    /// of 0 gives the 4 × 3 × 2.5 m box, otherwise a regular polygon.
    pub fn scan(sides: usize, radius: f64, height: f64, noise: f64, seed: u64) -> Result<Demo, String> {
        if !(0.0..=0.05).contains(&noise) {
            return Err(format!("noise must be in [0, 0.05] m, got {noise}"));
        }
        let truth = if sides == 0 {
            Space::new(vec![[0.0, 0.0], [4.0, 0.0], [4.0, 3.0], [0.0, 3.0]], 0.0, 2.5)
        } else if sides >= 3 {
            Space::new(synth::polygon_footprint(sides, radius), 0.0, height)
        } else {
            return Err(format!("a polygon room needs at least 3 sides, got {sides}"));
        }
        .map_err(|e| e.to_string())?;
        let scan = synth::room_scan(&truth, synth::DEFAULT_SPACING, noise, seed);
        let params = ExtractionParams {
            seed,
            ..Default::default()
        };
        let space = reconstruct_space(&scan, &params, Vec3::z()).map_err(|e| format!("{}: {e}", e.name()))?;
        Ok(Demo {
            space,
            scan_triangles: scan.triangles().len(),
            mesh: None,
            problem: PoissonProblem::default(),
            field: None,
        })
    }

    pub fn mesh(&mut self, target_h: f64, refine: u32) -> Result<usize, String> {
        if refine > 4 {
            return Err("refine is limited to 4 in the browser".into());
        }
        let mesh = mesh_space(&self.space, target_h, refine).map_err(|e| format!("{}: {e}", e.name()))?;
        let n = mesh.vertices.len();
        self.mesh = Some(mesh);
        self.field = None;
        Ok(n)
    }

    fn mesh_ref(&self) -> Result<&TetMesh, String> {
        self.mesh
            .as_ref()
            .ok_or_else(|| "StageConflict: generate a mesh first".to_string())
    }

    pub fn add_source(&mut self, position: [f64; 3], strength: f64) -> Result<(), String> {
        locate_point(self.mesh_ref()?, position).map_err(|e| format!("{}: {e}", e.name()))?;
        self.problem.sources.push(PointSource { position, strength });
        self.field = None;
        Ok(())
    }

    pub fn set_boundary(&mut self, tag: &str, value: f64) -> Result<(), String> {
        let tag: BoundaryTag = tag
            .parse()
            .map_err(|e: roomfem_core::meshgen::MeshError| e.to_string())?;
        if !self.mesh_ref()?.tags().contains(&tag) {
            return Err(format!("UnknownTag: {tag} is not on this mesh"));
        }
        self.problem.dirichlet.insert(tag, value);
        self.field = None;
        Ok(())
    }

    pub fn clear_problem(&mut self) {
        self.problem = PoissonProblem::default();
        self.field = None;
    }

    pub fn solve(&mut self) -> Result<&SolutionField, String> {
        let field = solve_poisson(self.mesh_ref()?, &self.problem, &SolverOptions::default())
            .map_err(|e| format!("{}: {e}", e.name()))?;
        Ok(self.field.insert(field))
    }

    /// Boundary facet edges as index pairs, each edge once.
    pub fn boundary_edges(&self) -> Vec<[usize; 2]> {
        let Some(mesh) = &self.mesh else { return Vec::new() };
        let mut edges: Vec<[usize; 2]> = mesh
            .boundary
            .iter()
            .flat_map(|f| {
                let [a, b, c] = f.tri;
                [[a, b], [b, c], [c, a]]
            })
            .map(|[a, b]| [a.min(b), a.max(b)])
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }
}

#[wasm_bindgen(js_name = colorMap)]
pub fn color_map_js(value: f64, min: f64, max: f64) -> Vec<u8> {
    color_map(value, min, max).to_vec()
}

#[wasm_bindgen(js_name = sphereRadius)]
pub fn sphere_radius_js(value: f64, min: f64, max: f64, r_max: f64) -> f64 {
    sphere_radius(value, min, max, r_max)
}

#[wasm_bindgen]
pub struct Room(Demo);

#[wasm_bindgen]
impl Room {
    /// "Scan room": synthetic scan plus plane extraction.
    pub fn scan(sides: usize, radius: f64, height: f64, noise: f64, seed: u32) -> Result<Room, JsError> {
        Demo::scan(sides, radius, height, noise, seed.into())
            .map(Room)
            .map_err(|e| JsError::new(&e))
    }

    /// Footprint as flat `[x0, y0, x1, y1, ...]`.
    pub fn footprint(&self) -> Vec<f64> {
        self.0.space.footprint.iter().flatten().copied().collect()
    }

    #[wasm_bindgen(getter)]
    pub fn z_floor(&self) -> f64 {
        self.0.space.z_floor
    }

    #[wasm_bindgen(getter)]
    pub fn z_ceiling(&self) -> f64 {
        self.0.space.z_ceiling
    }

    #[wasm_bindgen(getter)]
    pub fn scan_triangles(&self) -> usize {
        self.0.scan_triangles
    }

    /// "Generate mesh"; returns the vertex count.
    pub fn mesh(&mut self, target_h: f64, refine: u32) -> Result<usize, JsError> {
        self.0.mesh(target_h, refine).map_err(|e| JsError::new(&e))
    }

    /// Mesh vertices as flat `[x, y, z, ...]`.
    pub fn vertices(&self) -> Vec<f64> {
        self.0
            .mesh
            .iter()
            .flat_map(|m| m.vertices.iter().flatten().copied())
            .collect()
    }

    pub fn tet_count(&self) -> usize {
        self.0.mesh.as_ref().map_or(0, |m| m.tets.len())
    }

    pub fn boundary_edges(&self) -> Vec<u32> {
        self.0.boundary_edges().iter().flatten().map(|&i| i as u32).collect()
    }

    /// "Create source".
    pub fn add_source(&mut self, x: f64, y: f64, z: f64, strength: f64) -> Result<(), JsError> {
        self.0.add_source([x, y, z], strength).map_err(|e| JsError::new(&e))
    }

    /// "Set boundary value" on `FLOOR`, `CEILING` or `WALL:k`.
    pub fn set_boundary(&mut self, tag: &str, value: f64) -> Result<(), JsError> {
        self.0.set_boundary(tag, value).map_err(|e| JsError::new(&e))
    }

    pub fn clear_problem(&mut self) {
        self.0.clear_problem();
    }

    /// The current problem as a `roomfem/v1` document.
    pub fn problem_json(&self) -> String {
        String::from_utf8(io::write_problem(&self.0.problem)).expect("JSON is UTF-8")
    }

    /// "Solve problem"; returns the nodal values.
    pub fn solve(&mut self) -> Result<Vec<f64>, JsError> {
        self.0.solve().map(|f| f.values.clone()).map_err(|e| JsError::new(&e))
    }

    /// `[min, max]` of the last solution, empty if none.
    pub fn range(&self) -> Vec<f64> {
        self.0.field.iter().flat_map(|f| [f.min, f.max]).collect()
    }

    /// RGB per node of the last solution.
    pub fn colors(&self) -> Vec<u8> {
        self.0
            .field
            .iter()
            .flat_map(|f| f.values.iter().flat_map(|&v| color_map(v, f.min, f.max)))
            .collect()
    }

    /// Sphere radius per node of the last solution.
    pub fn radii(&self, r_max: f64) -> Vec<f64> {
        self.0
            .field
            .iter()
            .flat_map(|f| f.values.iter().map(move |&v| sphere_radius(v, f.min, f.max, r_max)))
            .collect()
    }
}
