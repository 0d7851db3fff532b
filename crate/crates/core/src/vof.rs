//! Experiment drivers: volume-fraction initialization over a mesh,
//! convergence studies, the shifted-paraboloid sweep over the table
//! polyhedron, and the wall-clock breakdown of the kernel stages.

use crate::clip::{clip_volume, clip_volume_timed, ClipParams, ClipTiming, ParaboloidFrame};
use crate::levelset::{LevelSetField, Surface};
use crate::math::KahanSum;
use crate::mesh::{build_cube_mesh, build_table_polyhedron, build_tet_mesh, Box3, PolyCell, PolyMesh};
use crate::surface::{approximate_cell_surface, classify_from_values, SurfaceCellStatus};
use crate::Vec3;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxMode {
    /// Full osculating paraboloid.
    Quadratic,
    /// Tangent plane only (principal curvatures forced to zero).
    Linear,
}

#[derive(Debug, Error)]
pub enum VofError {
    #[error("surface not resolved at N={0} (no intersected cells)")]
    NotResolved(usize),
    #[error("{0}")]
    Parameter(String),
    #[error("kernel faults in {} cells (first: cell {} - {})", .0.len(), .0[0].cell, .0[0].message)]
    CellFaults(Vec<CellFault>),
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
}

#[derive(Debug, Clone)]
pub struct CellFault {
    pub cell: usize,
    pub message: String,
}

/// Per-cell volume fractions over a mesh.
#[derive(Debug, Clone)]
pub struct VolumeFractionField {
    pub alpha: Vec<f64>,
    pub status: Vec<SurfaceCellStatus>,
    pub cell_volumes: Vec<f64>,
    pub n_intersected: usize,
}

impl VolumeFractionField {
    /// Total interior volume `sum |cell_i| alpha_i` in fixed cell order.
    pub fn interior_volume(&self) -> f64 {
        let mut acc = KahanSum::default();
        for (a, v) in self.alpha.iter().zip(&self.cell_volumes) {
            acc.add(a * v);
        }
        acc.value()
    }
}

/// Initialize volume fractions: classify every cell from cached vertex
/// values; on intersected cells build the osculating paraboloid (or tangent
/// plane in linear mode) and clip.
///
/// The cell loop is data parallel with per-cell slots, so results are
/// deterministic for any worker count.
pub fn init_volume_fractions(
    mesh: &PolyMesh,
    field: &dyn LevelSetField,
    mode: ApproxMode,
    params: &ClipParams,
) -> Result<VolumeFractionField, VofError> {
    let vertex_values: Vec<f64> = mesh
        .vertices
        .par_iter()
        .map(|&v| field.value(v))
        .collect();

    let results: Vec<Result<(f64, SurfaceCellStatus, f64), CellFault>> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|i| cell_fraction(mesh, i, field, &vertex_values, mode, params, None))
        .collect();

    collect_fractions(results)
}

/// Single-threaded variant that accumulates the kernel stage timings plus
/// the hypersurface-approximation time.
pub fn init_volume_fractions_timed(
    mesh: &PolyMesh,
    field: &dyn LevelSetField,
    mode: ApproxMode,
    params: &ClipParams,
) -> Result<(VolumeFractionField, StageTimes), VofError> {
    let vertex_values: Vec<f64> = mesh.vertices.iter().map(|&v| field.value(v)).collect();
    let mut stages = StageTimes::default();
    let results: Vec<Result<(f64, SurfaceCellStatus, f64), CellFault>> = (0..mesh.n_cells())
        .map(|i| cell_fraction(mesh, i, field, &vertex_values, mode, params, Some(&mut stages)))
        .collect();
    let field = collect_fractions(results)?;
    stages.intersected_cells = field.n_intersected;
    Ok((field, stages))
}

fn cell_fraction(
    mesh: &PolyMesh,
    i: usize,
    field: &dyn LevelSetField,
    vertex_values: &[f64],
    mode: ApproxMode,
    params: &ClipParams,
    mut stages: Option<&mut StageTimes>,
) -> Result<(f64, SurfaceCellStatus, f64), CellFault> {
    let (cell, global) = mesh.cell_with_map(i);
    let volume = cell.volume();
    let values: Vec<f64> = global.iter().map(|&g| vertex_values[g as usize]).collect();
    let status = classify_from_values(&values);
    match status {
        SurfaceCellStatus::Interior => Ok((1.0, status, volume)),
        SurfaceCellStatus::Exterior => Ok((0.0, status, volume)),
        SurfaceCellStatus::Intersected => {
            let t0 = stages.as_ref().map(|_| std::time::Instant::now());
            let mut frame = approximate_cell_surface(&cell, field).map_err(|e| CellFault {
                cell: i,
                message: e.to_string(),
            })?;
            if let (Some(t), Some(st)) = (t0, stages.as_deref_mut()) {
                st.hypersurface_approximation += t.elapsed();
            }
            if mode == ApproxMode::Linear {
                frame.kappa1 = 0.0;
                frame.kappa2 = 0.0;
            }
            let mut timing = stages.as_ref().map(|_| ClipTiming::default());
            let result = clip_volume_timed(&cell, &frame, params, timing.as_mut())
                .map_err(|e| CellFault {
                    cell: i,
                    message: e.to_string(),
                })?;
            if let (Some(t), Some(st)) = (timing, stages.as_deref_mut()) {
                st.kernel += t;
            }
            let alpha = result.volume / volume;
            let clamped = if (-1e-12..=0.0).contains(&alpha) {
                0.0
            } else if (1.0..=1.0 + 1e-12).contains(&alpha) {
                1.0
            } else {
                alpha
            };
            if !(0.0..=1.0).contains(&clamped) {
                return Err(CellFault {
                    cell: i,
                    message: format!("volume fraction {alpha} out of bounds"),
                });
            }
            Ok((clamped, status, volume))
        }
    }
}

fn collect_fractions(
    results: Vec<Result<(f64, SurfaceCellStatus, f64), CellFault>>,
) -> Result<VolumeFractionField, VofError> {
    let mut alpha = Vec::with_capacity(results.len());
    let mut status = Vec::with_capacity(results.len());
    let mut cell_volumes = Vec::with_capacity(results.len());
    let mut faults = Vec::new();
    let mut n_intersected = 0;
    for r in results {
        match r {
            Ok((a, s, v)) => {
                if s == SurfaceCellStatus::Intersected {
                    n_intersected += 1;
                }
                alpha.push(a);
                status.push(s);
                cell_volumes.push(v);
            }
            Err(f) => faults.push(f),
        }
    }
    if !faults.is_empty() {
        return Err(VofError::CellFaults(faults));
    }
    Ok(VolumeFractionField {
        alpha,
        status,
        cell_volumes,
        n_intersected,
    })
}

/// Relative mismatch of the summed interior volume against the exact
/// enclosed volume.
pub fn global_volume_error(fractions: &VolumeFractionField, exact_volume: f64) -> f64 {
    (1.0 - fractions.interior_volume() / exact_volume).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshKind {
    Cube,
    Tet,
}

/// Mesh family descriptor `cube:15:40:5` or `tet:10:35:5`.
pub fn parse_mesh_family(desc: &str) -> Result<(MeshKind, Vec<usize>), VofError> {
    let parts: Vec<&str> = desc.split(':').collect();
    if parts.len() != 4 {
        return Err(VofError::Parameter(format!(
            "mesh family `{desc}` must be kind:start:end:step"
        )));
    }
    let kind = match parts[0] {
        "cube" => MeshKind::Cube,
        "tet" => MeshKind::Tet,
        other => {
            return Err(VofError::Parameter(format!(
                "unknown mesh family kind `{other}`"
            )))
        }
    };
    let nums: Vec<usize> = parts[1..]
        .iter()
        .map(|s| s.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| VofError::Parameter(format!("bad mesh family `{desc}`: {e}")))?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if step == 0 || start == 0 || end < start {
        return Err(VofError::Parameter(format!("bad mesh family `{desc}`")));
    }
    Ok((kind, (start..=end).step_by(step).collect()))
}

pub fn build_family_mesh(kind: MeshKind, n: usize) -> PolyMesh {
    match kind {
        MeshKind::Cube => build_cube_mesh(n, Box3::unit_symmetric()),
        MeshKind::Tet => build_tet_mesh(n, Box3::unit_symmetric()),
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n: usize,
    pub cells: usize,
    pub n_intersected: usize,
    pub sqrt_intersected: f64,
    pub error: f64,
    /// Pairwise order against the previous row, when defined.
    pub order: Option<f64>,
}

/// Run the initialization over a mesh family and report the global volume
/// error per resolution plus pairwise convergence orders.
pub fn convergence_study(
    surface: &Surface,
    kind: MeshKind,
    resolutions: &[usize],
    mode: ApproxMode,
    params: &ClipParams,
) -> Result<Vec<ConvergenceRow>, VofError> {
    let exact = surface.exact_enclosed_volume();
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(resolutions.len());
    for &n in resolutions {
        let mesh = build_family_mesh(kind, n);
        let fractions = init_volume_fractions(&mesh, surface.field(), mode, params)?;
        if fractions.n_intersected == 0 {
            return Err(VofError::NotResolved(n));
        }
        let error = global_volume_error(&fractions, exact);
        let sqrt_intersected = (fractions.n_intersected as f64).sqrt();
        let order = rows.last().map(|prev: &ConvergenceRow| {
            -(error.ln() - prev.error.ln()) / (sqrt_intersected.ln() - prev.sqrt_intersected.ln())
        });
        rows.push(ConvergenceRow {
            n,
            cells: mesh.n_cells(),
            n_intersected: fractions.n_intersected,
            sqrt_intersected,
            error,
            order,
        });
    }
    Ok(rows)
}

/// Least-squares slope of `log error` against `log sqrt(N_intersected)`.
pub fn least_squares_slope(rows: &[ConvergenceRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.sqrt_intersected.ln(), r.error.ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("N,cells,n_intersected,sqrt_n_intersected,error,order\n");
    for r in rows {
        let order = r
            .order
            .map(|o| format!("{o:.17e}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{:.17e},{:.17e},{}\n",
            r.n, r.cells, r.n_intersected, r.sqrt_intersected, r.error, order
        ));
    }
    out
}

/// Frame constants of the shifted-paraboloid family used in the table
/// sweep.
pub fn sweep_frame() -> ParaboloidFrame {
    ParaboloidFrame::from_parts(
        Vec3::new(0.5, 0.5, 0.5),
        Vec3::new(4.0, -7.0, 2.0) / 69.0_f64.sqrt(),
        Vec3::new(-8.0, 14.0, 65.0) / 4485.0_f64.sqrt(),
        Vec3::new(-7.0, -4.0, 0.0) / 65.0_f64.sqrt(),
        -19.0 / 4.0,
        0.0,
    )
}

/// The table polyhedron posed in the frame basis of the sweep: local axes
/// mapped onto `(tau1, tau2, n0)` around the frame base point. This pose
/// keeps the whole shift range `[-1, 3/2]` effective (the fraction reaches
/// exactly 0 and 1 at the ends) and exercises the parabolic and linear
/// boundary classes.
pub fn sweep_cell(a: f64) -> PolyCell {
    let frame = sweep_frame();
    let mut table = build_table_polyhedron(a);
    for v in &mut table.vertices {
        let local = *v - Vec3::new(0.5, 0.5, 0.5);
        *v = frame.base + frame.tau1 * local.x + frame.tau2 * local.y + frame.normal * local.z;
    }
    table
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub shift: f64,
    pub fraction: f64,
    pub dfraction_dshift: f64,
    pub supp_area: f64,
}

/// Sweep the shifted paraboloid family across the table polyhedron:
/// `rho(s)` together with its analytic derivative `|supp| / |cell|`.
pub fn paraboloid_sweep(steps: usize, params: &ClipParams) -> Result<Vec<SweepRow>, VofError> {
    if steps < 2 {
        return Err(VofError::Parameter("sweep needs at least 2 steps".into()));
    }
    let cell = sweep_cell(0.25);
    let frame = sweep_frame();
    let cell_volume = cell.volume();
    let (s_min, s_max) = (-1.0, 1.5);
    let rows: Result<Vec<SweepRow>, VofError> = (0..steps)
        .into_par_iter()
        .map(|i| {
            let s = s_min + (s_max - s_min) * i as f64 / (steps - 1) as f64;
            let r = clip_volume(&cell, &frame.shifted(s), params).map_err(|e| {
                VofError::Parameter(format!("sweep kernel fault at s={s}: {e}"))
            })?;
            Ok(SweepRow {
                shift: s,
                fraction: r.volume / cell_volume,
                dfraction_dshift: r.supp_area / cell_volume,
                supp_area: r.supp_area,
            })
        })
        .collect();
    rows
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("s,rho,drho_ds,supp_area\n");
    for r in rows {
        out.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{:.17e}\n",
            r.shift, r.fraction, r.dfraction_dshift, r.supp_area
        ));
    }
    out
}

/// Wall-clock totals per kernel stage, accumulated over the intersected
/// cells of one run.
#[derive(Debug, Clone, Default)]
pub struct StageTimes {
    pub hypersurface_approximation: std::time::Duration,
    pub kernel: ClipTiming,
    pub intersected_cells: usize,
}

impl StageTimes {
    /// `(category, share in percent, average per intersected cell)` rows;
    /// the shares sum to 100.
    pub fn report(&self) -> Vec<(&'static str, f64, std::time::Duration)> {
        let entries = [
            ("hypersurface approximation", self.hypersurface_approximation),
            ("face intersection", self.kernel.face_intersection),
            ("principal transformation", self.kernel.principal_transformation),
            ("interiority check", self.kernel.interiority_check),
            ("reconstruction of boundary segments", self.kernel.reconstruction),
            ("quadrature", self.kernel.quadrature),
        ];
        let total: f64 = entries.iter().map(|e| e.1.as_secs_f64()).sum();
        let cells = self.intersected_cells.max(1) as u32;
        entries
            .iter()
            .map(|&(name, d)| {
                (
                    name,
                    if total > 0.0 { 100.0 * d.as_secs_f64() / total } else { 0.0 },
                    d / cells,
                )
            })
            .collect()
    }
}

/// Render the timing table.
pub fn timing_table(stages: &StageTimes) -> String {
    let mut out = String::from("sub-algorithm,share_percent,avg_per_intersected_cell_us\n");
    for (name, share, avg) in stages.report() {
        out.push_str(&format!(
            "{name},{share:.2},{:.3}\n",
            avg.as_secs_f64() * 1e6
        ));
    }
    out
}
