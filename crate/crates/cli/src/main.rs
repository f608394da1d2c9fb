//! `roomfem`: batch front-end over the library.
//!
//! Exit codes: 0 on success, 1 on a domain or file error (the error name is
//! printed first), 2 on a usage error.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use roomfem_core::fem::{solve_poisson, SolverOptions};
use roomfem_core::geometry::{reconstruct_space, ExtractionParams, Space, Vec3};
use roomfem_core::io::{self, ScanFormat, SolutionFormat};
use roomfem_core::meshgen::mesh_space;
use roomfem_core::synth;

#[derive(Parser)]
#[command(name = "roomfem", version, about = "Scan-to-solution Poisson pipeline for rooms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct a prism Space from a PLY or OBJ surface scan.
    ExtractPlanes {
        /// Scan file, or `-` for stdin.
        scan: PathBuf,
        /// Scan format; guessed from the extension when omitted.
        #[arg(long, value_enum)]
        format: Option<ScanArg>,
        #[arg(long, default_value_t = 0.03)]
        dist_tol: f64,
        /// Degrees.
        #[arg(long, default_value_t = 10.0)]
        angle_tol: f64,
        #[arg(long, default_value_t = 0.5)]
        min_area: f64,
        #[arg(long, default_value_t = 12)]
        max_planes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Up direction as `x,y,z`.
        #[arg(long, value_parser = parse_vec3, default_value = "0,0,1")]
        up: [f64; 3],
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Extrude a Space into a tetrahedral mesh.
    Mesh {
        space: PathBuf,
        /// Target vertical layer spacing (m).
        #[arg(long)]
        target_h: f64,
        /// Midpoint refinements of the footprint triangulation.
        #[arg(long, default_value_t = 0)]
        refine: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve the point-source problem on a mesh.
    Solve {
        mesh: PathBuf,
        problem: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write a legacy VTK file.
        #[arg(long)]
        vtk: Option<PathBuf>,
    },
    /// Generate a synthetic room scan with seeded Gaussian vertex noise.
    SynthScan {
        #[arg(long, value_enum, default_value_t = Room::Box)]
        room: Room,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Box dimensions `l,w,h`.
        #[arg(long, value_parser = parse_vec3, default_value = "4,3,2.5")]
        dims: [f64; 3],
        /// Polygon room: number of sides.
        #[arg(long, default_value_t = 6)]
        sides: usize,
        /// Polygon room: circumradius (m).
        #[arg(long, default_value_t = 3.0)]
        radius: f64,
        /// Polygon room: height (m).
        #[arg(long, default_value_t = 2.5)]
        height: f64,
        /// Tessellation edge length (m).
        #[arg(long, default_value_t = synth::DEFAULT_SPACING)]
        spacing: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the HTTP session service.
    Serve {
        /// Defaults to $ROOMFEM_PORT, then 8080.
        #[arg(long)]
        port: Option<u16>,
        /// Mirror sessions to this directory.
        #[arg(long)]
        persist: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanArg {
    Ply,
    Obj,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Room {
    Box,
    Polygon,
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(parts).map_err(|p| format!("expected 3 comma-separated numbers, got {}", p.len()))
}

/// A failure reported with exit code 1.
struct Failure {
    name: &'static str,
    message: String,
}

impl From<roomfem_core::Error> for Failure {
    fn from(e: roomfem_core::Error) -> Self {
        Failure {
            name: e.name(),
            message: e.to_string(),
        }
    }
}

macro_rules! impl_from_domain {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                roomfem_core::Error::from(e).into()
            }
        }
    )*};
}

impl_from_domain!(
    roomfem_core::geometry::GeometryError,
    roomfem_core::meshgen::MeshError,
    roomfem_core::fem::FemError,
    roomfem_core::io::IoError
);

fn file_error(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        name: "FileError",
        message: format!("{}: {e}", path.display()),
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| file_error(path, e))?;
        return Ok(buf);
    }
    fs::read(path).map_err(|e| file_error(path, e))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::write(p, bytes).map_err(|e| file_error(p, e)),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| file_error(Path::new("<stdout>"), e))
        }
    }
}

/// Adds the file name to parse errors so messages say which input was bad.
fn in_file<T, E: Into<Failure>>(path: &Path, r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| {
        let mut f = e.into();
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::ExtractPlanes {
            scan,
            format,
            dist_tol,
            angle_tol,
            min_area,
            max_planes,
            seed,
            up,
            output,
        } => {
            let format = match format {
                Some(ScanArg::Ply) => ScanFormat::Ply,
                Some(ScanArg::Obj) => ScanFormat::Obj,
                None => ScanFormat::from_path(&scan).unwrap_or(ScanFormat::Ply),
            };
            let bytes = read_input(&scan)?;
            let import = in_file(&scan, io::read_surface_scan(&bytes, format))?;
            let params = ExtractionParams {
                dist_tol,
                angle_tol,
                min_area,
                max_planes,
                seed,
                ..ExtractionParams::default()
            };
            let space = reconstruct_space(&import.mesh, &params, Vec3::from(up))?;
            write_output(output.as_deref(), &io::write_space(&space))
        }
        Command::Mesh {
            space,
            target_h,
            refine,
            output,
        } => {
            let doc = in_file(&space, io::read_space(&read_input(&space)?))?;
            let mesh = mesh_space(&doc, target_h, refine)?;
            write_output(output.as_deref(), &io::write_mesh(&mesh))
        }
        Command::Solve {
            mesh,
            problem,
            tol,
            max_iter,
            output,
            vtk,
        } => {
            let m = in_file(&mesh, io::read_mesh(&read_input(&mesh)?))?;
            let p = in_file(&problem, io::read_problem(&read_input(&problem)?))?;
            let field = solve_poisson(&m, &p, &SolverOptions { tol, max_iter })?;
            write_output(
                output.as_deref(),
                &io::write_solution(&m, &field, SolutionFormat::Json)?,
            )?;
            if let Some(path) = vtk {
                write_output(Some(&path), &io::write_solution(&m, &field, SolutionFormat::VtkLegacy)?)?;
            }
            Ok(())
        }
        Command::SynthScan {
            room,
            noise,
            seed,
            dims,
            sides,
            radius,
            height,
            spacing,
            output,
        } => {
            let invalid = |message: String| Failure {
                name: "InvalidParameter",
                message,
            };
            if !(noise >= 0.0 && noise.is_finite()) {
                return Err(invalid(format!("noise must be non-negative, got {noise}")));
            }
            if !(spacing > 0.0 && spacing.is_finite()) {
                return Err(invalid(format!("spacing must be positive, got {spacing}")));
            }
            let space = match room {
                Room::Box => Space::new(
                    vec![[0.0, 0.0], [dims[0], 0.0], [dims[0], dims[1]], [0.0, dims[1]]],
                    0.0,
                    dims[2],
                ),
                Room::Polygon => {
                    if sides < 3 {
                        return Err(invalid(format!("a polygon room needs at least 3 sides, got {sides}")));
                    }
                    Space::new(synth::polygon_footprint(sides, radius), 0.0, height)
                }
            }
            .map_err(|e| invalid(e.to_string()))?;
            let scan = synth::room_scan(&space, spacing, noise, seed);
            write_output(output.as_deref(), io::write_ply(&scan).as_bytes())
        }
        Command::Serve { port, persist } => {
            let port = port.unwrap_or_else(roomfem_service::port_from_env);
            let runtime = tokio::runtime::Runtime::new().map_err(|e| file_error(Path::new("<runtime>"), e))?;
            runtime
                .block_on(roomfem_service::serve(port, persist))
                .map_err(|e| Failure {
                    name: "ServiceError",
                    message: e.to_string(),
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}: {}", f.name, f.message);
            ExitCode::from(1)
        }
    }
}
