//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see them).
//!
//! Criteria:
//!  1. sphere on cube meshes converges with least-squares order >= 3.5,
//!     N=40 init under 60 s single-threaded
//!  2. ellipsoids and perturbed spheres on cube meshes: order >= 2.7 each
//!  3. the same surfaces on the tetrahedral family, identical thresholds
//!  4. linear-mode error at N=40 at least 100x the quadratic-mode error
//!  5. table-polyhedron sweep: exact endpoints, monotone fraction, analytic
//!     derivative equals the graph-base area
//!  6. oracle equivalence: half-space clips against polygon clipping,
//!     random paraboloid clips against Monte Carlo
//!  7. complementarity over randomized cells including the non-convex table
//!  8. volumes stable under quadrature order 5 -> 20 to 1e-12 relative
//!  9. closed-form cap areas against adaptive quadrature for every class
//! 10. curvature recovery on every intersected cell of the sphere runs

use paravof::clip::{
    build_segments, cap_area, cap_area_quadrature, classify_face, clip_complement_check,
    clip_volume, edge_clip, ClipParams, ConicClass, CurveSegment, ParaboloidFrame,
};
use paravof::levelset::rng::SplitMix64;
use paravof::levelset::{EllipsoidField, SphereField, Surface};
use paravof::mesh::{
    build_cube_mesh, build_table_polyhedron, build_tet_mesh, newell_normal, Box3, PolyCell,
};
use paravof::oracle;
use paravof::surface::{approximate_cell_surface, classify_from_values, SurfaceCellStatus};
use paravof::vof::{
    convergence_study, global_volume_error, init_volume_fractions, least_squares_slope,
    paraboloid_sweep, sweep_cell, sweep_frame, ApproxMode, MeshKind,
};
use paravof::Vec3;
use rayon::prelude::*;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion}: {detail}");
}

fn sphere_surface() -> Surface {
    Surface::Sphere(SphereField::new(Vec3::zero(), 0.8))
}

#[test]
fn criterion_01_sphere_cube_convergence_and_runtime() {
    let params = ClipParams::default();
    let rows = convergence_study(
        &sphere_surface(),
        MeshKind::Cube,
        &[15, 20, 25, 30, 40],
        ApproxMode::Quadratic,
        &params,
    )
    .unwrap();
    let slope = least_squares_slope(&rows);

    // single-threaded runtime at N=40
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let mesh = build_cube_mesh(40, Box3::unit_symmetric());
    let t0 = std::time::Instant::now();
    let surface = sphere_surface();
    pool.install(|| {
        init_volume_fractions(&mesh, surface.field(), ApproxMode::Quadratic, &params).unwrap()
    });
    let elapsed = t0.elapsed();

    report(
        "1",
        slope <= -3.5 && elapsed.as_secs_f64() < 60.0,
        &format!(
            "sphere/cube least-squares slope {slope:.3} (need <= -3.5), N=40 single-threaded {:.2} s (need < 60)",
            elapsed.as_secs_f64()
        ),
    );
}

fn general_surfaces() -> Vec<(&'static str, Surface, bool)> {
    // (name, surface, restrict to N >= 20)
    vec![
        (
            "prolate ellipsoid",
            Surface::Ellipsoid(EllipsoidField::new(Vec3::zero(), 0.75, 0.5, 0.25)),
            false,
        ),
        (
            "oblate ellipsoid",
            Surface::Ellipsoid(EllipsoidField::new(Vec3::zero(), 0.8, 0.8, 0.4)),
            false,
        ),
        (
            "perturbed sphere L=3",
            Surface::parse("psphere:r=0.8,L=3,var=5e-4,seed=1").unwrap(),
            true,
        ),
        (
            "perturbed sphere L=6",
            Surface::parse("psphere:r=0.8,L=6,var=5e-4,seed=1").unwrap(),
            true,
        ),
    ]
}

fn family_slopes(kind: MeshKind, all: &[usize], restricted: &[usize]) -> Vec<(String, f64)> {
    let params = ClipParams::default();
    general_surfaces()
        .into_iter()
        .map(|(name, surface, restrict)| {
            let ns = if restrict { restricted } else { all };
            let rows =
                convergence_study(&surface, kind, ns, ApproxMode::Quadratic, &params).unwrap();
            (name.to_string(), least_squares_slope(&rows))
        })
        .collect()
}

#[test]
fn criterion_02_general_surfaces_cube_convergence() {
    let slopes = family_slopes(MeshKind::Cube, &[15, 20, 25, 30, 40], &[20, 25, 30, 40]);
    let detail: Vec<String> = slopes
        .iter()
        .map(|(n, s)| format!("{n}: {s:.3}"))
        .collect();
    let pass = slopes.iter().all(|(_, s)| *s <= -2.7);
    report(
        "2",
        pass,
        &format!("cube-family slopes (need <= -2.7 each): {}", detail.join("; ")),
    );
}

#[test]
fn criterion_03_tetrahedral_family() {
    let params = ClipParams::default();
    let rows = convergence_study(
        &sphere_surface(),
        MeshKind::Tet,
        &[10, 15, 20, 25, 30, 35],
        ApproxMode::Quadratic,
        &params,
    )
    .unwrap();
    let sphere_slope = least_squares_slope(&rows);

    let slopes = family_slopes(MeshKind::Tet, &[10, 15, 20, 25, 30, 35], &[20, 25, 30, 35]);
    let mut detail = vec![format!("sphere: {sphere_slope:.3} (need <= -3.5)")];
    detail.extend(slopes.iter().map(|(n, s)| format!("{n}: {s:.3}")));
    let pass = sphere_slope <= -3.5 && slopes.iter().all(|(_, s)| *s <= -2.7);
    report(
        "3",
        pass,
        &format!("tet-family slopes: {}", detail.join("; ")),
    );
}

#[test]
fn criterion_04_linear_mode_gap() {
    let params = ClipParams::default();
    let mesh = build_cube_mesh(40, Box3::unit_symmetric());
    let surface = sphere_surface();
    let exact = surface.exact_enclosed_volume();
    let quad =
        init_volume_fractions(&mesh, surface.field(), ApproxMode::Quadratic, &params).unwrap();
    let lin = init_volume_fractions(&mesh, surface.field(), ApproxMode::Linear, &params).unwrap();
    let e_quad = global_volume_error(&quad, exact);
    let e_lin = global_volume_error(&lin, exact);
    let ratio = e_lin / e_quad;
    report(
        "4",
        ratio >= 1e2,
        &format!("E_V(linear)/E_V(quadratic) = {ratio:.1} at N=40 (need >= 100)"),
    );
}

#[test]
fn criterion_05_table_sweep() {
    let params = ClipParams::default();
    let rows = paraboloid_sweep(500, &params).unwrap();
    let cell = sweep_cell(0.25);
    let frame = sweep_frame();
    let cell_volume = cell.volume();

    let rho_min = rows.first().unwrap().fraction;
    let rho_max = rows.last().unwrap().fraction;
    let endpoints = rho_min.abs() <= 1e-12 && (rho_max - 1.0).abs() <= 1e-12;

    let monotone = rows
        .windows(2)
        .all(|w| w[1].fraction >= w[0].fraction - 1e-12);

    // analytic derivative vs central differences away from kinks
    let delta = 1e-5;
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for i in (10..rows.len() - 10).step_by(7) {
        let s = rows[i].shift;
        let vol = |sh: f64| {
            clip_volume(&cell, &frame.shifted(sh), &params)
                .unwrap()
                .volume
        };
        let supp = |sh: f64| {
            clip_volume(&cell, &frame.shifted(sh), &params)
                .unwrap()
                .supp_area
        };
        // a jump of the graph-base area across the stencil marks a kink
        let (sm, sp) = (supp(s - 10.0 * delta), supp(s + 10.0 * delta));
        let scale = sm.abs().max(sp.abs());
        if scale < 1e-6 || (sp - sm).abs() > 1e-3 * scale {
            continue;
        }
        let fd = (vol(s + delta) - vol(s - delta)) / (2.0 * delta);
        let analytic = rows[i].supp_area;
        let rel = (fd - analytic).abs() / analytic.abs().max(1e-12);
        worst = worst.max(rel);
        checked += 1;
        let _ = cell_volume;
    }
    let derivative_ok = checked >= 10 && worst <= 1e-5;

    report(
        "5",
        endpoints && monotone && derivative_ok,
        &format!(
            "rho(-1) = {rho_min:.2e}, rho(3/2) - 1 = {:.2e}, monotone over 500 samples: {monotone}, d rho/ds vs central differences: worst {worst:.2e} over {checked} smooth points",
            rho_max - 1.0
        ),
    );
}

fn rand_unit(rng: &mut SplitMix64) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.next_range(-1.0, 1.0),
            rng.next_range(-1.0, 1.0),
            rng.next_range(-1.0, 1.0),
        );
        let n = v.norm();
        if n > 0.1 && n < 1.0 {
            return v / n;
        }
    }
}

fn rand_frame(rng: &mut SplitMix64, base_range: f64, kappa_range: f64) -> ParaboloidFrame {
    let base = Vec3::new(
        rng.next_range(-base_range, base_range) + 0.5,
        rng.next_range(-base_range, base_range) + 0.5,
        rng.next_range(-base_range, base_range) + 0.5,
    );
    let normal = rand_unit(rng);
    let tau = rand_unit(rng);
    if tau.cross(normal).norm() < 0.1 {
        return rand_frame(rng, base_range, kappa_range);
    }
    ParaboloidFrame::new(
        base,
        normal,
        tau,
        rng.next_range(-kappa_range, kappa_range),
        rng.next_range(-kappa_range, kappa_range),
    )
}

/// The randomized cell pool: unit-cube cell, a Kuhn tetrahedron, the table.
fn cell_pool() -> Vec<PolyCell> {
    vec![
        build_cube_mesh(1, Box3::new(Vec3::zero(), Vec3::new(1.0, 1.0, 1.0))).cell(0),
        build_tet_mesh(1, Box3::new(Vec3::zero(), Vec3::new(1.0, 1.0, 1.0))).cell(2),
        build_table_polyhedron(0.25),
    ]
}

fn convex_membership(cell: &PolyCell, p: Vec3) -> bool {
    cell.faces.iter().all(|face| {
        let pts: Vec<Vec3> = face.iter().map(|&i| cell.vertices[i as usize]).collect();
        let n = newell_normal(&pts);
        (p - pts[0]).dot(n) <= 0.0
    })
}

#[test]
fn criterion_06_oracle_equivalence() {
    // (a) plane-degenerate clips against the half-space polygon oracle
    let params = ClipParams::default();
    let cells = cell_pool();
    let mut rng = SplitMix64::new(600);
    let mut worst_plane: f64 = 0.0;
    for case in 0..200 {
        let cell = &cells[case % cells.len()];
        let base = Vec3::new(
            rng.next_range(0.05, 0.95),
            rng.next_range(0.05, 0.95),
            rng.next_range(0.05, 0.95),
        );
        let normal = rand_unit(&mut rng);
        let frame = ParaboloidFrame::new(base, normal, rand_unit(&mut rng), 0.0, 0.0);
        let got = clip_volume(cell, &frame, &params).unwrap().volume;
        let want = oracle::halfspace_clip_volume(cell, base, normal);
        worst_plane = worst_plane.max((got - want).abs() / cell.volume());
    }
    let plane_ok = worst_plane <= 1e-12;

    // (b) randomized paraboloid clips against stratified Monte Carlo
    let cases: Vec<(usize, ParaboloidFrame)> = {
        let mut rng = SplitMix64::new(6600);
        (0..100)
            .map(|i| (i % cells.len(), rand_frame(&mut rng, 0.6, 8.0)))
            .collect()
    };
    let results: Vec<(f64, f64, f64)> = cases
        .par_iter()
        .enumerate()
        .map(|(i, (ci, frame))| {
            let cell = &cells[*ci];
            let is_table = *ci == 2;
            let mut rng = SplitMix64::new(7000 + i as u64);
            let bbox = Box3::new(Vec3::zero(), Vec3::new(1.0, 1.0, 1.0));
            let (mc, sigma) = oracle::monte_carlo_volume(bbox, 1_000_000, &mut rng, |p| {
                let inside = if is_table {
                    oracle::table_membership(0.25, p)
                } else {
                    convex_membership(cell, p)
                };
                inside && frame.value(p) <= 0.0
            });
            let got = clip_volume(cell, frame, &params).unwrap().volume;
            (got, mc, sigma)
        })
        .collect();
    let mut worst_sigmas: f64 = 0.0;
    for (got, mc, sigma) in &results {
        worst_sigmas = worst_sigmas.max((got - mc).abs() / sigma.max(1e-9));
    }
    let mc_ok = worst_sigmas <= 3.0;

    report(
        "6",
        plane_ok && mc_ok,
        &format!(
            "half-space oracle worst relative deviation {worst_plane:.2e} over 200 cells (need <= 1e-12); Monte-Carlo worst deviation {worst_sigmas:.2} sigma over 100 clips (need <= 3)"
        ),
    );
}

#[test]
fn criterion_07_complementarity() {
    let params = ClipParams::default();
    let cells = cell_pool();
    let mut rng = SplitMix64::new(700);
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let cell = &cells[case % cells.len()];
        let frame = rand_frame(&mut rng, 0.8, 8.0);
        let (v, vbar) = clip_complement_check(cell, &frame, &params).unwrap();
        worst = worst.max(((v + vbar - cell.volume()) / cell.volume()).abs());
    }
    report(
        "7",
        worst <= 1e-10,
        &format!("worst |v + v_bar - |cell|| / |cell| = {worst:.2e} over 1000 cases (need <= 1e-10)"),
    );
}

#[test]
fn criterion_08_quadrature_stability() {
    let p5 = ClipParams::new(5).unwrap();
    let p20 = ClipParams::new(20).unwrap();

    // sweep configurations (criterion 5)
    let cell = sweep_cell(0.25);
    let frame = sweep_frame();
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let s = -1.0 + 2.5 * i as f64 / 499.0;
        let f = frame.shifted(s);
        let v5 = clip_volume(&cell, &f, &p5).unwrap().volume;
        let v20 = clip_volume(&cell, &f, &p20).unwrap().volume;
        worst = worst.max((v5 - v20).abs() / cell.volume());
    }

    // randomized configurations (criteria 6 and 7)
    let cells = cell_pool();
    for seed in [6600u64, 700] {
        let mut rng = SplitMix64::new(seed);
        for case in 0..300 {
            let cell = &cells[case % cells.len()];
            let f = rand_frame(&mut rng, 0.8, 8.0);
            let v5 = clip_volume(cell, &f, &p5).unwrap().volume;
            let v20 = clip_volume(cell, &f, &p20).unwrap().volume;
            worst = worst.max((v5 - v20).abs() / cell.volume());
        }
    }
    report(
        "8",
        worst < 1e-12,
        &format!("worst relative volume change N_quad 5 -> 20: {worst:.2e} (need < 1e-12)"),
    );
}

#[test]
fn criterion_09_cap_closed_forms() {
    let params = ClipParams::default();
    let mut rng = SplitMix64::new(900);
    let mut counts = std::collections::HashMap::new();
    let mut worst: f64 = 0.0;
    let mut total = 0;
    let mut attempts = 0usize;

    while total < 1000 {
        attempts += 1;
        assert!(attempts < 100_000, "conic generator starved: {counts:?}");
        // random frames; force kappa2 = 0 now and then for the degenerate
        // classes, and an in-base-plane face for parallel lines
        let mode = attempts % 5;
        let mut frame = rand_frame(&mut rng, 0.6, 6.0);
        if mode >= 2 {
            frame.kappa2 = 0.0;
        }
        if frame.kappa1.abs() < 0.3 {
            continue;
        }
        let face: Vec<Vec3> = {
            let c = Vec3::new(
                rng.next_range(0.0, 1.0),
                rng.next_range(0.0, 1.0),
                rng.next_range(0.0, 1.0),
            );
            let (n_f, half) = match mode {
                3 => (frame.normal, 0.9), // parallel lines
                4 => (frame.tau1, 0.9),   // linear (face holds the base normal)
                _ => (rand_unit(&mut rng), 0.8),
            };
            let e1 = n_f.any_orthonormal();
            let e2 = n_f.cross(e1);
            vec![
                c - e1 * half - e2 * half,
                c + e1 * half - e2 * half,
                c + e1 * half + e2 * half,
                c - e1 * half + e2 * half,
            ]
        };
        let n_f = newell_normal(&face).normalize();
        let diameter = 3.0;
        let conic = match classify_face(0, &face, n_f, &frame, diameter) {
            Some(c) => c,
            None => continue,
        };
        let clips: Vec<_> = (0..face.len())
            .map(|m| edge_clip(face[m], face[(m + 1) % face.len()], &frame, diameter))
            .collect();
        if clips.iter().map(|c| c.roots.len()).sum::<usize>() == 0 {
            continue;
        }
        let segments: Vec<CurveSegment> =
            match build_segments(0, &face, &clips, &conic, diameter) {
                Ok(s) => s,
                Err(_) => continue,
            };
        if segments.is_empty() {
            continue;
        }
        for seg in &segments {
            let span = (seg.end_param - seg.start_param).abs();
            if !conic.well_conditioned || span > 8.0 {
                continue; // ill-conditioned parametrizations are validated
                          // through the raw-frame bisection machinery
            }
            let closed = cap_area(&conic, seg, &params).unwrap();
            let numeric = cap_area_quadrature(&conic, seg, 3e-14);
            // The quadrature route differences the antiderivative and the
            // chord term; for flattened-hyperbola caps those are many orders
            // larger than the cap itself, which bounds the achievable
            // comparison precision (the quadrature terminates at a relative
            // tolerance of its own internal magnitudes).
            let gdiff = (conic.green_antiderivative(seg.branch, seg.end_param)
                - conic.green_antiderivative(seg.branch, seg.start_param))
            .abs();
            let chord = 0.5 * seg.end_up.cross(seg.start_up).abs();
            let mut floor = 1e-12 * (1.0 + gdiff + chord);
            if conic.class == ConicClass::ParallelLines {
                // The endpoints lie on the true pair of lines, not on the
                // flattened hyperbola that replaces them; the cap is only
                // defined up to the flooring-induced curve deviation.
                let ext = (seg.end_up - seg.start_up).norm();
                let p_axis = match conic.form {
                    paravof::clip::ConicForm::HyperbolaLr { p, .. }
                    | paravof::clip::ConicForm::HyperbolaUd { p, .. } => p,
                    _ => 1.0,
                };
                floor += 4.0 * (conic.b2.abs() / conic.b1.abs()) * ext.powi(3)
                    / p_axis.max(1e-3);
            }
            let rel = ((closed - numeric).abs() - floor).max(0.0)
                / closed.abs().max(numeric.abs()).max(1e-14);
            let key = match conic.class {
                ConicClass::Hyperbolic => {
                    if seg.branch > 0 {
                        "hyperbolic+"
                    } else {
                        "hyperbolic-"
                    }
                }
                ConicClass::Elliptic => "elliptic",
                ConicClass::Parabolic => "parabolic",
                ConicClass::Linear => "linear",
                ConicClass::ParallelLines => "parallel-lines",
            };
            *counts.entry(key).or_insert(0usize) += 1;
            total += 1;
            if rel > worst {
                worst = rel;
                if rel > 1e-10 {
                    println!(
                        "  [{key}] rel {rel:.2e}: closed {closed:.6e} numeric {numeric:.6e} span {span:.3e} b1 {:.3e} b2 {:.3e} b {:.3e}",
                        conic.b1, conic.b2, conic.b
                    );
                }
            }
        }
    }
    let all_classes = ["elliptic", "hyperbolic+", "hyperbolic-", "parabolic", "linear", "parallel-lines"]
        .iter()
        .all(|k| counts.get(*k).copied().unwrap_or(0) > 0);
    report(
        "9",
        worst <= 1e-10 && all_classes,
        &format!(
            "worst closed-form vs quadrature cap deviation {worst:.2e} over {total} arcs, class coverage {counts:?}"
        ),
    );
}

#[test]
fn criterion_10_curvature_recovery() {
    let surface = sphere_surface();
    let field = surface.field();
    let mut worst: f64 = 0.0;
    let mut cells_checked = 0usize;
    for n in [15usize, 20, 25, 30, 40] {
        let mesh = build_cube_mesh(n, Box3::unit_symmetric());
        let values: Vec<f64> = mesh.vertices.par_iter().map(|&v| field.value(v)).collect();
        let deviations: Vec<f64> = (0..mesh.n_cells())
            .into_par_iter()
            .filter_map(|i| {
                let (cell, global) = mesh.cell_with_map(i);
                let vals: Vec<f64> = global.iter().map(|&g| values[g as usize]).collect();
                if classify_from_values(&vals) != SurfaceCellStatus::Intersected {
                    return None;
                }
                let frame = approximate_cell_surface(&cell, field).unwrap();
                Some(
                    (frame.kappa1 + 1.25)
                        .abs()
                        .max((frame.kappa2 + 1.25).abs()),
                )
            })
            .collect();
        cells_checked += deviations.len();
        worst = worst.max(deviations.into_iter().fold(0.0, f64::max));
    }
    report(
        "10",
        worst <= 1e-9,
        &format!(
            "worst |kappa + 1/0.8| = {worst:.2e} over {cells_checked} intersected cells (need <= 1e-9)"
        ),
    );
}
