//! Post-processing diagnostics and the thin-film convergence study.
//!
//! Vortices are located by plaquette winding: the phase of `(p1, p2)` is
//! summed around each active cell with branch-cut-safe increments, so a zero
//! of the field is any cell carrying nonzero integer winding — no modulus
//! thresholding involved. Adjacent flagged cells merge into one record.
//! Boundary layers are measured by marching inward from the boundary until
//! the modulus first reaches 90% of its plateau. Biaxiality is evaluated
//! nodewise in the film parameterization.
//!
//! [`gamma_study`] ties the solvers together: it minimizes the 2D limit
//! functional once, then for each thickness ratio minimizes the 3D energy
//! from the trivially extended 2D minimizer, recording the energy gap to the
//! limit, the z-variation seminorm, and the distance of the z-averaged slab
//! field to the 2D minimizer.

use crate::energy2d::{
    f0_energy, reduced_energy, stability_threshold, EdgeScheme, PotentialSpec,
};
use crate::energy3d::{
    minimize_eps, total_energy_eps, z_variation, ElasticConstants, ModelParams,
};
use crate::error::Result;
use crate::grid::{DomainShape, Grid2d, Grid3d, PField, QField2d, QField3d};
use crate::minimizer::{boundary_case1, minimize_reduced, BoundaryData, SolverConfig};
use crate::tensor::{biaxiality_p, tr_q2};
use serde::Serialize;

/// One detected zero of the planar field.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VortexRecord {
    pub x: f64,
    pub y: f64,
    pub winding: i32,
    /// Distance at which the modulus recovers half its far-field plateau,
    /// averaged over the four axis directions.
    pub core_radius: f64,
}

/// Winding of `(p1, p2)` around one cell, as a real number (integer up to
/// roundoff away from zeros).
fn plaquette_winding(grid: &Grid2d, field: &PField, ci: usize, cj: usize) -> f64 {
    let loop_ids = [
        grid.node_id(ci, cj),
        grid.node_id(ci + 1, cj),
        grid.node_id(ci + 1, cj + 1),
        grid.node_id(ci, cj + 1),
    ];
    let mut total = 0.0;
    for k in 0..4 {
        let a = loop_ids[k];
        let b = loop_ids[(k + 1) % 4];
        let ta = field.p2[a].atan2(field.p1[a]);
        let tb = field.p2[b].atan2(field.p1[b]);
        let mut d = tb - ta;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        total += d;
    }
    total / (2.0 * std::f64::consts::PI)
}

/// Sum of all plaquette windings; equals the boundary degree of the data for
/// fields matching it.
pub fn total_winding(grid: &Grid2d, field: &PField) -> i32 {
    let mut total = 0.0;
    for cj in 0..grid.ny {
        for ci in 0..grid.nx {
            if grid.cell_active[cj * grid.nx + ci] {
                total += plaquette_winding(grid, field, ci, cj);
            }
        }
    }
    total.round() as i32
}

/// Fields with every modulus at or below this are treated as the trivial
/// branch: the phase of pure solver roundoff winds arbitrarily, so plaquette
/// windings below this floor are noise, not zeros. This is a roundoff guard
/// (matching the solver's trivial-branch resolution), not a physical
/// modulus threshold — detection itself stays winding-based.
pub const VORTEX_NOISE_FLOOR: f64 = 1e-6;

/// All zeros of the planar field: plaquettes with nonzero winding whose
/// corners rise above the roundoff floor, merged when adjacent (within one
/// cell spacing).
pub fn find_vortices(grid: &Grid2d, field: &PField) -> Vec<VortexRecord> {
    let mut flagged: Vec<(usize, usize, f64)> = Vec::new();
    for cj in 0..grid.ny {
        for ci in 0..grid.nx {
            if !grid.cell_active[cj * grid.nx + ci] {
                continue;
            }
            let corners_alive = [
                grid.node_id(ci, cj),
                grid.node_id(ci + 1, cj),
                grid.node_id(ci, cj + 1),
                grid.node_id(ci + 1, cj + 1),
            ]
            .iter()
            .any(|&id| field.planar_norm_at(id) > VORTEX_NOISE_FLOOR);
            if !corners_alive {
                continue;
            }
            let w = plaquette_winding(grid, field, ci, cj);
            if w.round().abs() >= 1.0 {
                flagged.push((ci, cj, w));
            }
        }
    }
    // Cluster by cell adjacency (Chebyshev distance 1).
    let mut assigned = vec![usize::MAX; flagged.len()];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..flagged.len() {
        if assigned[k] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        let mut stack = vec![k];
        assigned[k] = id;
        let mut members = vec![k];
        while let Some(top) = stack.pop() {
            for j in 0..flagged.len() {
                if assigned[j] != usize::MAX {
                    continue;
                }
                let dx = flagged[top].0 as i64 - flagged[j].0 as i64;
                let dy = flagged[top].1 as i64 - flagged[j].1 as i64;
                if dx.abs() <= 1 && dy.abs() <= 1 {
                    assigned[j] = id;
                    stack.push(j);
                    members.push(j);
                }
            }
        }
        clusters.push(members);
    }

    let modulus: Vec<f64> = (0..grid.num_nodes())
        .map(|id| field.planar_norm_at(id))
        .collect();
    let plateau = modulus
        .iter()
        .enumerate()
        .filter(|(id, _)| grid.node_weight[*id] > 0.0)
        .map(|(_, &m)| m)
        .fold(0.0f64, f64::max);

    let mut out = Vec::new();
    for members in clusters {
        let mut wsum = 0.0;
        let (mut cx, mut cy) = (0.0, 0.0);
        for &k in &members {
            let (ci, cj, w) = flagged[k];
            wsum += w;
            cx += grid.x0 + (ci as f64 + 0.5) * grid.hx;
            cy += grid.y0 + (cj as f64 + 0.5) * grid.hy;
        }
        cx /= members.len() as f64;
        cy /= members.len() as f64;
        let winding = wsum.round() as i32;
        if winding == 0 {
            continue;
        }
        let core_radius = half_plateau_radius(grid, &modulus, cx, cy, plateau);
        out.push(VortexRecord {
            x: cx,
            y: cy,
            winding,
            core_radius,
        });
    }
    out.sort_by(|a, b| (a.y, a.x).partial_cmp(&(b.y, b.x)).unwrap());
    out
}

fn half_plateau_radius(grid: &Grid2d, modulus: &[f64], cx: f64, cy: f64, plateau: f64) -> f64 {
    let target = 0.5 * plateau;
    let step = 0.5 * grid.hx.min(grid.hy);
    let mut radii = Vec::new();
    for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
        let mut prev = 0.0;
        let mut prev_r = 0.0;
        let mut s = step;
        while s < 1000.0 * step {
            let v = match grid.sample_scalar(modulus, cx + s * dx, cy + s * dy) {
                Some(v) => v,
                None => break,
            };
            if v >= target {
                let frac = if v > prev { (target - prev) / (v - prev) } else { 1.0 };
                radii.push(prev_r + frac * (s - prev_r));
                break;
            }
            prev = v;
            prev_r = s;
            s += step;
        }
    }
    if radii.is_empty() {
        f64::NAN
    } else {
        radii.iter().sum::<f64>() / radii.len() as f64
    }
}

/// Distance from the boundary at which the modulus first reaches 90% of
/// `plateau`, averaged over inward rays.
pub fn boundary_layer_width(grid: &Grid2d, field: &PField, plateau: f64) -> f64 {
    let modulus: Vec<f64> = (0..grid.num_nodes())
        .map(|id| field.planar_norm_at(id))
        .collect();
    let target = 0.9 * plateau;
    let step = 0.25 * grid.hx.min(grid.hy);
    let rays: Vec<((f64, f64), (f64, f64))> = match grid.shape {
        DomainShape::Disc => (0..64)
            .map(|k| {
                let phi = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
                ((phi.cos(), phi.sin()), (-phi.cos(), -phi.sin()))
            })
            .collect(),
        DomainShape::Square => {
            let mut r = Vec::new();
            for k in 1..16 {
                let t = k as f64 / 16.0;
                r.push(((t, 0.0), (0.0, 1.0)));
                r.push(((t, 1.0), (0.0, -1.0)));
                r.push(((0.0, t), (1.0, 0.0)));
                r.push(((1.0, t), (-1.0, 0.0)));
            }
            r
        }
    };

    let mut widths = Vec::new();
    let max_depth = match grid.shape {
        DomainShape::Disc => 1.0,
        DomainShape::Square => 0.5,
    };
    for ((sx, sy), (dx, dy)) in rays {
        // Depth is measured from where the active complex starts along the
        // ray: on masked grids the discrete Dirichlet ring sits O(h) inside
        // the true boundary, and referencing the true boundary would bias
        // every width by that offset.
        let mut depth = 0.0;
        let mut start: Option<f64> = None;
        let mut prev: Option<(f64, f64)> = None;
        let mut found = None;
        while depth <= max_depth {
            let (x, y) = (sx + depth * dx, sy + depth * dy);
            if let Some(v) = grid.sample_scalar(&modulus, x, y) {
                if start.is_none() {
                    start = Some(depth);
                }
                if v >= target {
                    let rc = match prev {
                        Some((d0, v0)) if v > v0 => d0 + (target - v0) / (v - v0) * (depth - d0),
                        _ => depth,
                    };
                    found = Some(rc - start.unwrap());
                    break;
                }
                prev = Some((depth, v));
            }
            depth += step;
        }
        if let Some(w) = found {
            widths.push(w);
        }
    }
    if widths.is_empty() {
        f64::NAN
    } else {
        widths.iter().sum::<f64>() / widths.len() as f64
    }
}

/// Nodal biaxiality of a planar field (zero weight nodes included for
/// layout).
pub fn biaxiality_field(grid: &Grid2d, field: &PField) -> Vec<f64> {
    (0..grid.num_nodes())
        .map(|id| biaxiality_p(field.planar_norm_at(id), field.b_at(id)))
        .collect()
}

/// One thickness-ratio point of the convergence study.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GammaStudyRow {
    pub epsilon: f64,
    /// `F_eps` of the z-independent initial field (equals the 2D limit
    /// energy for constraint-compatible data).
    pub f_eps_initial: f64,
    pub min_f_eps: f64,
    /// `int |d_z Q|^2` of the 3D minimizer.
    pub z_variation: f64,
    /// L2 distance of the z-averaged 3D minimizer to the 2D minimizer.
    pub l2_distance_to_2d: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaStudy {
    /// Minimum of the 2D limit functional on the matching grid.
    pub min_f0: f64,
    pub rows: Vec<GammaStudyRow>,
}

/// Runs the thin-film ladder: one 2D solve, then a 3D solve per epsilon
/// warm-started from the trivially extended 2D minimizer.
#[allow(clippy::too_many_arguments)]
pub fn gamma_study(
    shape: DomainShape,
    nx: usize,
    ny: usize,
    nz: usize,
    ec: &ElasticConstants,
    mp: &ModelParams,
    epsilons: &[f64],
    bd: &BoundaryData,
    cfg: &SolverConfig,
) -> Result<GammaStudy> {
    let grid2 = Grid2d::new(shape, nx, ny);
    let scheme = EdgeScheme::build(&grid2);
    let spec = PotentialSpec::from_model(ec, mp);
    let (p2d, _) = minimize_reduced(&grid2, &scheme, bd, &spec, cfg)?;
    let q2d = QField2d::from_pfield(&grid2, &p2d);
    let min_f0 = f0_energy(&grid2, &q2d, ec, mp)?.total;

    let grid3 = Grid3d::new(shape, nx, ny, nz);
    let mut rows = Vec::new();
    for &eps in epsilons {
        let mp_eps = mp.with_epsilon(eps);
        let init = QField3d::extend_2d(&grid3, &q2d);
        let f_eps_initial = total_energy_eps(&grid3, &init, ec, &mp_eps).total;
        let (field, breakdown, stats) =
            minimize_eps(&grid3, &init, ec, &mp_eps, cfg.tol, cfg.max_iters)?;
        let zvar = z_variation(&grid3, &field);
        let avg = field.z_average(&grid3);
        let mut dist2 = 0.0;
        for id in 0..grid2.num_nodes() {
            let w = grid2.node_weight[id];
            if w > 0.0 {
                let d = avg.q[id].sub(&q2d.q[id]);
                dist2 += w * tr_q2(&d);
            }
        }
        rows.push(GammaStudyRow {
            epsilon: eps,
            f_eps_initial,
            min_f_eps: breakdown.total,
            z_variation: zvar,
            l2_distance_to_2d: dist2.sqrt(),
            iterations: stats.iterations,
            converged: stats.converged,
        });
    }
    Ok(GammaStudy { min_f0, rows })
}

/// One delta point of the bifurcation sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StabilityRow {
    pub delta: f64,
    pub lambda1: f64,
    /// `lambda1 + 2 C~/delta^2`; negative predicts instability.
    pub threshold: f64,
    /// Whether the seeded solve left the trivial branch.
    pub nontrivial_branch: bool,
    pub sup_p: f64,
}

/// Sweeps the delta ladder on Case 1 data: for each delta the linear
/// threshold is computed and a seeded minimization reports which branch the
/// descent reached. A sign change in the threshold brackets the bifurcation.
pub fn stability_report(
    grid: &Grid2d,
    scheme: &EdgeScheme,
    ctilde_value: f64,
    beta: f64,
    deltas: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<StabilityRow>> {
    let mut rows = Vec::new();
    for &delta in deltas {
        let spec = PotentialSpec::new(ctilde_value, delta);
        let rep = stability_threshold(grid, scheme, &spec);
        let bd = boundary_case1(grid, beta);
        let (field, solve) = minimize_reduced(grid, scheme, &bd, &spec, cfg)?;
        let _ = solve;
        let sup_p = grid
            .interior_nodes
            .iter()
            .map(|&id| field.planar_norm_at(id))
            .fold(0.0f64, f64::max);
        rows.push(StabilityRow {
            delta,
            lambda1: rep.lambda1,
            threshold: rep.threshold,
            nontrivial_branch: sup_p > 1e-4,
            sup_p,
        });
    }
    Ok(rows)
}

/// Energy of a reduced field (re-exported convenience for study drivers).
pub fn reduced_energy_of(
    grid: &Grid2d,
    scheme: &EdgeScheme,
    field: &PField,
    spec: &PotentialSpec,
) -> f64 {
    reduced_energy(grid, scheme, field, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimizer::boundary_case2;

    fn synthetic_vortex(grid: &Grid2d, plateau: f64, core: f64, beta: f64) -> PField {
        let mut f = PField::zeros(grid, beta);
        for id in 0..grid.num_nodes() {
            let (x, y) = grid.node_pos(id);
            let r = (x * x + y * y).sqrt();
            let m = plateau * (r / core).tanh();
            let th = y.atan2(x);
            f.p1[id] = m * th.cos();
            f.p2[id] = m * th.sin();
        }
        f
    }

    #[test]
    fn synthetic_vortex_is_found_at_origin() {
        let grid = Grid2d::new(DomainShape::Disc, 48, 48);
        let f = synthetic_vortex(&grid, 0.75, 0.1, 0.2);
        let vortices = find_vortices(&grid, &f);
        assert_eq!(vortices.len(), 1);
        let v = vortices[0];
        assert_eq!(v.winding, 1);
        assert!(v.x.abs() < 2.0 * grid.hx && v.y.abs() < 2.0 * grid.hy);
        // tanh reaches 1/2 at atanh(0.5) * core.
        let expect = 0.5493061443340549 * 0.1;
        assert!(
            (v.core_radius - expect).abs() < 2.0 * grid.hx,
            "core {} vs {expect}",
            v.core_radius
        );
        assert_eq!(total_winding(&grid, &f), 1);
    }

    #[test]
    fn trivial_field_has_no_vortices() {
        let grid = Grid2d::new(DomainShape::Square, 20, 20);
        let f = PField::zeros(&grid, 0.2);
        assert!(find_vortices(&grid, &f).is_empty());
    }

    #[test]
    fn boundary_winding_matches_plaquette_sum() {
        let grid = Grid2d::new(DomainShape::Disc, 40, 40);
        for d in [1i32, 2, 3] {
            let bd = boundary_case2(&grid, d, 0.2);
            let f = crate::minimizer::initial_guess(&grid, &bd, 0.1);
            assert_eq!(total_winding(&grid, &f), d, "degree {d}");
        }
    }

    #[test]
    fn loops_enclosing_no_zero_carry_no_winding() {
        // Winding telescopes: the plaquette sum over any subregion equals
        // the winding of its boundary loop, so a vortex-free patch sums to
        // zero while the full complex sums to the boundary degree.
        let grid = Grid2d::new(DomainShape::Square, 32, 32);
        let mut f = PField::zeros(&grid, 0.2);
        for id in 0..grid.num_nodes() {
            let (x, y) = grid.node_pos(id);
            // Single synthetic vortex at the center of the square.
            let (dx, dy) = (x - 0.5, y - 0.5);
            let r = (dx * dx + dy * dy).sqrt().max(1e-9);
            f.p1[id] = 0.5 * dx / r * (r / 0.1).tanh();
            f.p2[id] = 0.5 * dy / r * (r / 0.1).tanh();
        }
        assert_eq!(total_winding(&grid, &f), 1);
        // Corner patch away from the vortex.
        let mut patch = 0.0;
        for cj in 0..8 {
            for ci in 0..8 {
                patch += super::plaquette_winding(&grid, &f, ci, cj);
            }
        }
        assert!(patch.abs() < 1e-10, "vortex-free patch winding {patch}");
    }

    #[test]
    fn layer_width_of_tanh_profile() {
        // p rises like tanh(dist/w): 90% at atanh(0.9) w.
        let grid = Grid2d::new(DomainShape::Disc, 96, 96);
        let w = 0.08;
        let plateau = 0.7;
        let mut f = PField::zeros(&grid, 0.2);
        for id in 0..grid.num_nodes() {
            let (x, y) = grid.node_pos(id);
            let dist = (1.0 - (x * x + y * y).sqrt()).max(0.0);
            f.p1[id] = plateau * (dist / w).tanh();
        }
        let width = boundary_layer_width(&grid, &f, plateau);
        let expect = 1.4722194895832204 * w;
        assert!(
            (width - expect).abs() < 0.02 * expect + grid.hx,
            "width {width} vs {expect}"
        );

        // Constant plateau field: zero width.
        let mut flat = PField::zeros(&grid, 0.2);
        for id in 0..grid.num_nodes() {
            flat.p1[id] = plateau;
        }
        let width = boundary_layer_width(&grid, &flat, plateau);
        assert!(width < 2.0 * grid.hx, "width {width}");
    }

    #[test]
    fn biaxiality_of_trivial_field_vanishes() {
        let grid = Grid2d::new(DomainShape::Square, 10, 10);
        let f = PField::zeros(&grid, 0.2);
        let xi = biaxiality_field(&grid, &f);
        assert!(xi.iter().all(|&v| v < 1e-7));
    }
}
