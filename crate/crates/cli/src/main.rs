//! Command line front end: volume-fraction initialization, convergence
//! studies, the shifted-paraboloid sweep and single-cell clips.
//!
//! Exit codes: 0 success, 1 usage/parameter errors, 2 per-cell kernel
//! faults.

use clap::{Args, Parser, Subcommand};
use paravof::clip::{clip_volume, ClipParams, ParaboloidFrame};
use paravof::levelset::Surface;
use paravof::mesh::{self, PolyMesh};
use paravof::vof::{self, ApproxMode, VofError};
use paravof::Vec3;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "paravof", version, about = "volume fractions by paraboloid clipping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Gauss-Legendre nodes per quadrature panel.
    #[arg(long, default_value_t = 5)]
    quad: usize,
    /// Worker threads for the cell loop (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Initialize volume fractions of a surface on a mesh.
    Init {
        /// Mesh descriptor: `cube:N=20`, `tet:N=15`, `table`, or `vtk:path`.
        #[arg(long)]
        mesh: String,
        /// Surface descriptor, e.g. `sphere:r=0.8`.
        #[arg(long)]
        surface: String,
        /// Tangent-plane approximation instead of the osculating paraboloid.
        #[arg(long)]
        linear: bool,
        /// Write the fractions as CELL_DATA into a legacy VTK file.
        #[arg(long)]
        out_vtk: Option<PathBuf>,
        /// Write one line per cell: `cell,status,alpha`.
        #[arg(long)]
        out_csv: Option<PathBuf>,
        /// Print the wall-clock share of the kernel stages (single threaded).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Global volume error over a mesh family.
    Convergence {
        #[arg(long)]
        surface: String,
        /// Family descriptor `cube:15:40:5` or `tet:10:35:5`.
        #[arg(long)]
        mesh_family: String,
        #[arg(long)]
        linear: bool,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Shifted-paraboloid family across the table polyhedron.
    Sweep {
        #[arg(long, default_value_t = 500)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Clip one cell (JSON format) by an explicit paraboloid frame.
    ClipOne {
        /// Path to the cell JSON file.
        #[arg(long)]
        cell: PathBuf,
        /// Base point `x,y,z`.
        #[arg(long)]
        base: String,
        /// Base normal `x,y,z`.
        #[arg(long)]
        normal: String,
        /// First principal tangent `x,y,z` (orthonormalized internally).
        #[arg(long)]
        tau1: String,
        #[arg(long)]
        kappa1: f64,
        #[arg(long)]
        kappa2: f64,
        /// Shift along the base normal.
        #[arg(long, default_value_t = 0.0)]
        shift: f64,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn build_pool(threads: Option<usize>) -> Result<Option<rayon::ThreadPool>, String> {
    match threads {
        None => Ok(None),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(Some)
            .map_err(|e| e.to_string()),
    }
}

fn in_pool<T: Send>(
    pool: &Option<rayon::ThreadPool>,
    f: impl FnOnce() -> T + Send,
) -> T {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, found `{s}`"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad coordinate `{p}`: {e}"))?;
    }
    Ok(Vec3::new(v[0], v[1], v[2]))
}

fn parse_mesh(desc: &str) -> Result<PolyMesh, String> {
    if let Some(path) = desc.strip_prefix("vtk:") {
        return mesh::read_vtk_legacy(path).map_err(|e| e.to_string());
    }
    if desc == "table" {
        let cell = mesh::build_table_polyhedron(0.25);
        let faces: Vec<Vec<u32>> = cell.faces.clone();
        return Ok(PolyMesh {
            vertices: cell.vertices,
            cells: vec![(0..faces.len()).map(|f| (f as u32, false)).collect()],
            faces,
            legacy: None,
        });
    }
    let (kind, rest) = desc
        .split_once(':')
        .ok_or_else(|| format!("malformed mesh descriptor `{desc}`"))?;
    let n = rest
        .strip_prefix("N=")
        .ok_or_else(|| format!("mesh descriptor `{desc}` needs N=<resolution>"))?
        .parse::<usize>()
        .map_err(|e| format!("bad resolution: {e}"))?;
    let domain = mesh::Box3::unit_symmetric();
    match kind {
        "cube" => Ok(mesh::build_cube_mesh(n, domain)),
        "tet" => Ok(mesh::build_tet_mesh(n, domain)),
        other => Err(format!("unknown mesh kind `{other}`")),
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Init {
            mesh: mesh_desc,
            surface,
            linear,
            out_vtk,
            out_csv,
            timing,
            common,
        } => {
            let mesh = parse_mesh(&mesh_desc)?;
            let surface = Surface::parse(&surface)?;
            let params = ClipParams::new(common.quad).map_err(|e| e.to_string())?;
            let mode = if linear { ApproxMode::Linear } else { ApproxMode::Quadratic };
            let pool = build_pool(common.threads)?;

            let result = if timing {
                vof::init_volume_fractions_timed(&mesh, surface.field(), mode, &params)
                    .map(|(f, stages)| {
                        print!("{}", vof::timing_table(&stages));
                        f
                    })
            } else {
                in_pool(&pool, || {
                    vof::init_volume_fractions(&mesh, surface.field(), mode, &params)
                })
            };
            let fractions = match result {
                Ok(f) => f,
                Err(VofError::CellFaults(faults)) => {
                    eprintln!("kernel faults in {} cells:", faults.len());
                    for f in faults.iter().take(20) {
                        eprintln!("  cell {}: {}", f.cell, f.message);
                    }
                    return Ok(ExitCode::from(2));
                }
                Err(e) => return Err(e.to_string()),
            };

            let interior = fractions.interior_volume();
            println!("cells: {}", mesh.n_cells());
            println!("intersected: {}", fractions.n_intersected);
            println!("interior volume: {interior:.17e}");
            let exact = surface.exact_enclosed_volume();
            println!("exact volume: {exact:.17e}");
            println!(
                "global volume error: {:.17e}",
                vof::global_volume_error(&fractions, exact)
            );

            if let Some(path) = out_vtk {
                mesh::write_vtk_cell_scalars(&mesh, "alpha", &fractions.alpha, path)
                    .map_err(|e| e.to_string())?;
            }
            if let Some(path) = out_csv {
                let mut out = String::from("cell,status,alpha\n");
                for (i, (a, s)) in fractions.alpha.iter().zip(&fractions.status).enumerate() {
                    out.push_str(&format!("{i},{s:?},{a:.17e}\n"));
                }
                std::fs::write(path, out).map_err(|e| e.to_string())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Convergence {
            surface,
            mesh_family,
            linear,
            out,
            common,
        } => {
            let surface = Surface::parse(&surface)?;
            let (kind, resolutions) =
                vof::parse_mesh_family(&mesh_family).map_err(|e| e.to_string())?;
            let params = ClipParams::new(common.quad).map_err(|e| e.to_string())?;
            let mode = if linear { ApproxMode::Linear } else { ApproxMode::Quadratic };
            let pool = build_pool(common.threads)?;
            let rows = in_pool(&pool, || {
                vof::convergence_study(&surface, kind, &resolutions, mode, &params)
            })
            .map_err(|e| e.to_string())?;
            std::fs::write(&out, vof::convergence_csv(&rows)).map_err(|e| e.to_string())?;
            println!(
                "least-squares order: {:.3}",
                -vof::least_squares_slope(&rows)
            );
            for r in &rows {
                println!(
                    "N={:<3} cells={:<7} intersected={:<6} error={:.6e}",
                    r.n, r.cells, r.n_intersected, r.error
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { steps, out, common } => {
            let params = ClipParams::new(common.quad).map_err(|e| e.to_string())?;
            let pool = build_pool(common.threads)?;
            let rows = in_pool(&pool, || vof::paraboloid_sweep(steps, &params))
                .map_err(|e| e.to_string())?;
            std::fs::write(&out, vof::sweep_csv(&rows)).map_err(|e| e.to_string())?;
            println!(
                "swept {} shifts: rho({}) = {}, rho({}) = {}",
                rows.len(),
                rows[0].shift,
                rows[0].fraction,
                rows[rows.len() - 1].shift,
                rows[rows.len() - 1].fraction
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::ClipOne {
            cell,
            base,
            normal,
            tau1,
            kappa1,
            kappa2,
            shift,
            common,
        } => {
            let text = std::fs::read_to_string(&cell).map_err(|e| e.to_string())?;
            let cell = mesh::cell_from_json(&text).map_err(|e| e.to_string())?;
            let params = ClipParams::new(common.quad).map_err(|e| e.to_string())?;
            let frame = ParaboloidFrame::new(
                parse_vec3(&base)?,
                parse_vec3(&normal)?,
                parse_vec3(&tau1)?,
                kappa1,
                kappa2,
            )
            .shifted(shift);
            match clip_volume(&cell, &frame, &params) {
                Ok(r) => {
                    let json = serde_json::json!({
                        "volume": r.volume,
                        "supp_area": r.supp_area,
                        "face_areas": r.face_areas,
                        "class_histogram": {
                            "elliptic": r.class_histogram.elliptic,
                            "hyperbolic": r.class_histogram.hyperbolic,
                            "parabolic": r.class_histogram.parabolic,
                            "linear": r.class_histogram.linear,
                            "parallel_lines": r.class_histogram.parallel_lines,
                        },
                    });
                    println!("{}", serde_json::to_string_pretty(&json).unwrap());
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("kernel fault: {e}");
                    Ok(ExitCode::from(2))
                }
            }
        }
    }
}
