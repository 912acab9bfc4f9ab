//! The thin-film limit energy `F_0` and its scalar reduction.
//!
//! Over fields constrained to have `z` as an eigenvector (with eigenvalue
//! `beta` when the leading anchoring pins it), the limit functional is
//!
//! ```text
//! F_0[Q] = int_Omega f_e0(grad Q) + w_l f_LdG(Q) + 2 f_s1(Q, z) dA,
//! ```
//!
//! infinite off the constraint set. In the film parameterization
//! `(p1, p2, b)` the planar elastic density decomposes exactly as
//!
//! ```text
//! f_e0 = (2 + M2 + M3) |grad p|^2 + (6 + M2 + M3)/4 |grad b|^2
//!      - (M2 + M3) (p1x bx - p1y by + p2y bx + p2x by)
//!      + 2 (M2 - M3) (p1x p2y - p1y p2x),
//! ```
//!
//! where the last term is a null Lagrangian: its integral only sees the
//! boundary values. [`bpp_identity_residual`] verifies this identity with
//! analytic gradients (and also reports the residual against the commonly
//! quoted variant that carries `(M2 + M3)/2` on the cross term and
//! `|M2 + M3|` on the Jacobian — that variant matches a `1/2`-normalized
//! elastic density and only for special constants; see the module tests).
//!
//! For constant `b = beta` the whole functional collapses, up to the factor
//! `M = 2 (2 + M2 + M3)` and a boundary constant, to the reduced
//! Ginzburg-Landau / Allen-Cahn form
//!
//! ```text
//! F~[p] = int 1/2 |grad p|^2 + W(|p|) / delta^2,
//! W(t) = 4 t^4 + C~ t^2 + D~,   C~ = 6 beta^2 - 4 B beta + 4 A,
//! ```
//!
//! with `delta = sqrt(M / w_l)`. Its trivial branch `p = 0` is linearly
//! stable exactly while `lambda_1(Omega) + 2 C~ / delta^2 > 0`, which
//! [`stability_threshold`] evaluates with the same discrete operator the
//! solver descends on.

use crate::energy3d::{
    elastic_density_grads, elastic_group0, ldg_density, ldg_density_grad, ElasticConstants,
    EnergyBreakdown, ModelParams,
};
use crate::error::{Error, Result};
use crate::grid::{Grid2d, PField, QField2d};
use crate::surface::{eval_fs0, eval_fs1};
use crate::tensor::{q_from_p, PVector, QTensor};
use crate::vec3::Z_HAT;
use serde::Serialize;

/// Membership tolerance for the constraint set: `f_s0(Q) <= D_TOL` per node.
pub const D_TOL: f64 = 1e-10;

/// `C~ = 6 beta^2 - 4 B beta + 4 A`.
pub fn ctilde(a: f64, b: f64, beta: f64) -> f64 {
    6.0 * beta * beta - 4.0 * b * beta + 4.0 * a
}

/// Parameters of the reduced potential `W(t) = 4 t^4 + C~ t^2 + D~`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PotentialSpec {
    pub ctilde: f64,
    pub dtilde: f64,
    pub delta: f64,
    /// Elastic reduction factor `2 (2 + M2 + M3)`; `delta^2 = m / w_l`.
    pub m: f64,
}

impl PotentialSpec {
    /// Standalone reduced problem: `delta` given directly, `D~` chosen so
    /// `min W = 0`, isotropic elastic factor.
    pub fn new(ctilde: f64, delta: f64) -> Self {
        let dtilde = if ctilde < 0.0 {
            ctilde * ctilde / 16.0
        } else {
            0.0
        };
        PotentialSpec {
            ctilde,
            dtilde,
            delta,
            m: 4.0,
        }
    }

    /// Derived from the film model: `C~` from `(A, B, beta)`,
    /// `M = 2 (2 + M2 + M3)`, `delta = sqrt(M / w_l)`, and `D~` matching
    /// the offset bulk potential on the constant-`b` slice, so that
    /// `F_0 = M (F~ + boundary constant)` holds exactly.
    pub fn from_model(ec: &ElasticConstants, mp: &ModelParams) -> Self {
        let beta = mp.anchoring.beta;
        let m = 2.0 * (2.0 + ec.m2 + ec.m3);
        let dtilde = 3.0 * mp.a * beta * beta
            + mp.b * beta * beta * beta
            + 2.25 * beta.powi(4)
            + mp.ldg_offset;
        PotentialSpec {
            ctilde: ctilde(mp.a, mp.b, beta),
            dtilde,
            delta: (m / mp.w_l).sqrt(),
            m,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// Equilibrium modulus `sqrt(-C~/8)` of the bulk wells (0 when `C~ >= 0`).
    pub fn plateau(&self) -> f64 {
        if self.ctilde < 0.0 {
            (-self.ctilde / 8.0).sqrt()
        } else {
            0.0
        }
    }
}

/// `W(t) = 4 t^4 + C~ t^2 + D~`.
pub fn potential_w(t: f64, spec: &PotentialSpec) -> f64 {
    let t2 = t * t;
    4.0 * t2 * t2 + spec.ctilde * t2 + spec.dtilde
}

/// `W'(t) = 16 t^3 + 2 C~ t`.
pub fn potential_w_prime(t: f64, spec: &PotentialSpec) -> f64 {
    16.0 * t * t * t + 2.0 * spec.ctilde * t
}

// ---------------------------------------------------------------------------
// Edge scheme for the reduced scalar/planar problems.
// ---------------------------------------------------------------------------

/// Precomputed edge list of the corner-difference quadrature.
/// `dirichlet_energy` reproduces the corner quadrature of `int |grad u|^2`,
/// and the Euler-Lagrange operator of `1/2 dirichlet_energy` at interior
/// nodes is the 5-point Laplacian.
#[derive(Debug, Clone)]
pub struct EdgeScheme {
    /// `(node_a, node_b, coef)` with `coef = n_cells * h_perp / (2 h_par)`.
    pub edges: Vec<(u32, u32, f64)>,
}

impl EdgeScheme {
    pub fn build(grid: &Grid2d) -> Self {
        let nx = grid.nx;
        let ny = grid.ny;
        let cx = grid.hy / (2.0 * grid.hx);
        let cy = grid.hx / (2.0 * grid.hy);
        let mut acc: std::collections::HashMap<(u32, u32), f64> = std::collections::HashMap::new();
        for cj in 0..ny {
            for ci in 0..nx {
                if !grid.cell_active[cj * nx + ci] {
                    continue;
                }
                let n00 = grid.node_id(ci, cj) as u32;
                let n10 = grid.node_id(ci + 1, cj) as u32;
                let n01 = grid.node_id(ci, cj + 1) as u32;
                let n11 = grid.node_id(ci + 1, cj + 1) as u32;
                for (a, b, c) in [
                    (n00, n10, cx),
                    (n01, n11, cx),
                    (n00, n01, cy),
                    (n10, n11, cy),
                ] {
                    *acc.entry((a, b)).or_insert(0.0) += c;
                }
            }
        }
        let mut edges: Vec<(u32, u32, f64)> = acc
            .into_iter()
            .map(|((a, b), c)| (a, b, c))
            .collect();
        edges.sort_unstable_by_key(|&(a, b, _)| (a, b));
        EdgeScheme { edges }
    }

    /// `sum_e coef_e (u_a - u_b)^2`.
    pub fn dirichlet_energy(&self, u: &[f64]) -> f64 {
        let mut e = 0.0;
        for &(a, b, c) in &self.edges {
            let d = u[a as usize] - u[b as usize];
            e += c * d * d;
        }
        e
    }

    /// Accumulates `d/du` of [`Self::dirichlet_energy`] scaled by `factor`.
    pub fn add_dirichlet_grad(&self, u: &[f64], factor: f64, grad: &mut [f64]) {
        for &(a, b, c) in &self.edges {
            let d = 2.0 * factor * c * (u[a as usize] - u[b as usize]);
            grad[a as usize] += d;
            grad[b as usize] -= d;
        }
    }
}

/// Reduced energy `int 1/2 |grad p|^2 + W(|p|)/delta^2` by the edge/trapezoid
/// quadrature. Requires a constant-`b` field (the `b` slot must be `None`).
pub fn reduced_energy(grid: &Grid2d, scheme: &EdgeScheme, field: &PField, spec: &PotentialSpec) -> f64 {
    debug_assert!(field.b.is_none(), "reduced functional assumes constant b");
    let grad_part = 0.5 * (scheme.dirichlet_energy(&field.p1) + scheme.dirichlet_energy(&field.p2));
    let inv_d2 = 1.0 / (spec.delta * spec.delta);
    let mut pot = 0.0;
    for id in 0..grid.num_nodes() {
        let w = grid.node_weight[id];
        if w > 0.0 {
            pot += w * potential_w(field.planar_norm_at(id), spec);
        }
    }
    grad_part + inv_d2 * pot
}

/// Analytic gradient of [`reduced_energy`] with respect to all nodal
/// `(p1, p2)` values.
pub fn reduced_gradient(
    grid: &Grid2d,
    scheme: &EdgeScheme,
    field: &PField,
    spec: &PotentialSpec,
) -> (Vec<f64>, Vec<f64>) {
    let n = grid.num_nodes();
    let mut g1 = vec![0.0; n];
    let mut g2 = vec![0.0; n];
    scheme.add_dirichlet_grad(&field.p1, 0.5, &mut g1);
    scheme.add_dirichlet_grad(&field.p2, 0.5, &mut g2);
    let inv_d2 = 1.0 / (spec.delta * spec.delta);
    for id in 0..n {
        let w = grid.node_weight[id];
        if w > 0.0 {
            let t2 = field.p1[id] * field.p1[id] + field.p2[id] * field.p2[id];
            // dW(|p|)/dp = (16 t^2 + 2 C~) p.
            let c = inv_d2 * w * (16.0 * t2 + 2.0 * spec.ctilde);
            g1[id] += c * field.p1[id];
            g2[id] += c * field.p2[id];
        }
    }
    (g1, g2)
}

const CORNERS_2D: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

fn corner_derivs_2d(q: &[QTensor; 4], corner: (usize, usize), hx: f64, hy: f64) -> (QTensor, QTensor) {
    let idx = |a: usize, b: usize| -> usize { a + 2 * b };
    let (a, b) = corner;
    let dx = q[idx(1, b)].sub(&q[idx(0, b)]).scale(1.0 / hx);
    let dy = q[idx(a, 1)].sub(&q[idx(a, 0)]).scale(1.0 / hy);
    (dx, dy)
}

fn gather_cell_2d(grid: &Grid2d, field: &QField2d, ci: usize, cj: usize) -> [QTensor; 4] {
    [
        field.q[grid.node_id(ci, cj)],
        field.q[grid.node_id(ci + 1, cj)],
        field.q[grid.node_id(ci, cj + 1)],
        field.q[grid.node_id(ci + 1, cj + 1)],
    ]
}

/// Limit energy `F_0` of a constrained tensor field: planar elastic density
/// plus bulk potential plus twice the first-order surface density. Fails with
/// the worst offender when any weighted node leaves the constraint set
/// (`f_s0 > D_TOL`), mirroring the `+infinity` branch.
pub fn f0_energy(
    grid: &Grid2d,
    field: &QField2d,
    ec: &ElasticConstants,
    mp: &ModelParams,
) -> Result<EnergyBreakdown> {
    let mut worst = (0usize, 0.0f64);
    for id in 0..grid.num_nodes() {
        if grid.node_weight[id] > 0.0 {
            let v = eval_fs0(&field.q[id], Z_HAT, &mp.anchoring);
            if v > worst.1 {
                worst = (id, v);
            }
        }
    }
    if worst.1 > D_TOL {
        let (i, j) = grid.node_ij(worst.0);
        return Err(Error::NotDValued {
            i,
            j,
            fs0: worst.1,
        });
    }
    Ok(f0_energy_unchecked(grid, field, ec, mp))
}

/// [`f0_energy`] without the membership gate, for solvers that keep the
/// constraint structurally.
pub fn f0_energy_unchecked(
    grid: &Grid2d,
    field: &QField2d,
    ec: &ElasticConstants,
    mp: &ModelParams,
) -> EnergyBreakdown {
    let wq = grid.hx * grid.hy / 4.0;
    let mut elastic = 0.0;
    for cj in 0..grid.ny {
        for ci in 0..grid.nx {
            if !grid.cell_active[cj * grid.nx + ci] {
                continue;
            }
            let q = gather_cell_2d(grid, field, ci, cj);
            for &corner in &CORNERS_2D {
                let (dx, dy) = corner_derivs_2d(&q, corner, grid.hx, grid.hy);
                elastic += wq * elastic_group0(&dx, &dy, ec.m2, ec.m3);
            }
        }
    }

    let mut bulk = 0.0;
    let mut surface = 0.0;
    for id in 0..grid.num_nodes() {
        let w = grid.node_weight[id];
        if w > 0.0 {
            bulk += w * mp.w_l * ldg_density(&field.q[id], mp.a, mp.b, mp.ldg_offset);
            surface += w * 2.0 * eval_fs1(&field.q[id], Z_HAT, &mp.anchoring);
        }
    }
    EnergyBreakdown::new(elastic, bulk, surface, [elastic, 0.0, 0.0])
}

/// Analytic gradient of [`f0_energy`] over all nodal tensors (no membership
/// gate: used inside solvers that keep the constraint by construction).
pub fn f0_energy_grad(
    grid: &Grid2d,
    field: &QField2d,
    ec: &ElasticConstants,
    mp: &ModelParams,
) -> Vec<QTensor> {
    let wq = grid.hx * grid.hy / 4.0;
    let mut grad = vec![QTensor::ZERO; grid.num_nodes()];
    let idx = |a: usize, b: usize| -> usize { a + 2 * b };
    for cj in 0..grid.ny {
        for ci in 0..grid.nx {
            if !grid.cell_active[cj * grid.nx + ci] {
                continue;
            }
            let q = gather_cell_2d(grid, field, ci, cj);
            let ids = [
                grid.node_id(ci, cj),
                grid.node_id(ci + 1, cj),
                grid.node_id(ci, cj + 1),
                grid.node_id(ci + 1, cj + 1),
            ];
            let mut local = [QTensor::ZERO; 4];
            for &(a, b) in &CORNERS_2D {
                let (dx, dy) = corner_derivs_2d(&q, (a, b), grid.hx, grid.hy);
                let (gx, gy, _) = elastic_density_grads(
                    &dx,
                    &dy,
                    &QTensor::ZERO,
                    ec.m2,
                    ec.m3,
                    1.0,
                    0.0,
                    0.0,
                );
                let gx = gx.scale(wq / grid.hx);
                let gy = gy.scale(wq / grid.hy);
                local[idx(1, b)] = local[idx(1, b)].add(&gx);
                local[idx(0, b)] = local[idx(0, b)].sub(&gx);
                local[idx(a, 1)] = local[idx(a, 1)].add(&gy);
                local[idx(a, 0)] = local[idx(a, 0)].sub(&gy);
            }
            for k in 0..4 {
                grad[ids[k]] = grad[ids[k]].add(&local[k]);
            }
        }
    }

    for id in 0..grid.num_nodes() {
        let w = grid.node_weight[id];
        if w <= 0.0 {
            continue;
        }
        let q = &field.q[id];
        let gb = ldg_density_grad(q, mp.a, mp.b).scale(w * mp.w_l);
        // 2 f_s1 = 2 alpha1 (q33 - beta)^2 + 2 gamma1 (q13^2 + q23^2).
        let d33 = 4.0 * mp.anchoring.alpha1 * (q.q33() - mp.anchoring.beta);
        let gs = QTensor::new(
            -d33,
            0.0,
            4.0 * mp.anchoring.gamma1 * q.q13,
            -d33,
            4.0 * mp.anchoring.gamma1 * q.q23,
        )
        .scale(w);
        grad[id] = grad[id].add(&gb).add(&gs);
    }
    grad
}

// ---------------------------------------------------------------------------
// The p-representation identity.
// ---------------------------------------------------------------------------

/// Analytic first derivatives of `(p1, p2, b)` at one evaluation point.
#[derive(Debug, Clone, Copy)]
pub struct PGradient {
    pub p1x: f64,
    pub p1y: f64,
    pub p2x: f64,
    pub p2y: f64,
    pub bx: f64,
    pub by: f64,
}

/// Residuals of the planar elastic density against its p-space closed forms.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BppResidual {
    /// Against the exact decomposition (see module docs); zero to roundoff.
    pub residual: f64,
    /// Against the half-normalized variant (gradient coefficients halved,
    /// `(M2+M3)/2` cross term, `|M2+M3|` Jacobian coefficient), reported
    /// for comparison; see the module docs.
    pub half_convention_residual: f64,
}

/// Pointwise check of the identity: evaluates `f_e0` through the generic
/// tensor contraction on `q_from_p` derivatives and subtracts the closed
/// forms, using the supplied analytic gradients (no stencils involved).
pub fn bpp_identity_residual_at(g: &PGradient, m2: f64, m3: f64) -> BppResidual {
    // Derivatives of Q(p1, p2, b) are q_from_p of the derivative triple.
    let dxq = q_from_p(&PVector::new(g.p1x, g.p2x, g.bx));
    let dyq = q_from_p(&PVector::new(g.p1y, g.p2y, g.by));
    let fe0 = elastic_group0(&dxq, &dyq, m2, m3);

    let grad_p2 = g.p1x * g.p1x + g.p1y * g.p1y + g.p2x * g.p2x + g.p2y * g.p2y;
    let grad_b2 = g.bx * g.bx + g.by * g.by;
    let cross = g.p1x * g.bx - g.p1y * g.by + g.p2y * g.bx + g.p2x * g.by;
    let jac = g.p1x * g.p2y - g.p1y * g.p2x;

    let exact = (2.0 + m2 + m3) * grad_p2
        + 0.25 * (6.0 + m2 + m3) * grad_b2
        - (m2 + m3) * cross
        + 2.0 * (m2 - m3) * jac;
    let half_form = 0.5 * (2.0 + m2 + m3) * grad_p2
        + 0.125 * (6.0 + m2 + m3) * grad_b2
        + 0.5 * (m2 + m3) * cross
        + (m2 + m3).abs() * jac;

    BppResidual {
        residual: (fe0 - exact).abs(),
        half_convention_residual: (fe0 - half_form).abs(),
    }
}

/// Max-norm of [`bpp_identity_residual_at`] over a set of evaluation points.
pub fn bpp_identity_residual(points: &[PGradient], m2: f64, m3: f64) -> BppResidual {
    let mut out = BppResidual {
        residual: 0.0,
        half_convention_residual: 0.0,
    };
    for g in points {
        let r = bpp_identity_residual_at(g, m2, m3);
        out.residual = out.residual.max(r.residual);
        out.half_convention_residual = out.half_convention_residual.max(r.half_convention_residual);
    }
    out
}

// ---------------------------------------------------------------------------
// Allen-Cahn residual and linear stability.
// ---------------------------------------------------------------------------

/// Nodal residual of `-Lap p + W'(p)/delta^2` with the 5-point stencil; zero
/// on non-interior nodes.
pub fn allen_cahn_residual(grid: &Grid2d, p: &[f64], spec: &PotentialSpec) -> Vec<f64> {
    let n = grid.num_nodes();
    let mut r = vec![0.0; n];
    let ihx2 = 1.0 / (grid.hx * grid.hx);
    let ihy2 = 1.0 / (grid.hy * grid.hy);
    let inv_d2 = 1.0 / (spec.delta * spec.delta);
    for &id in &grid.interior_nodes {
        let (i, j) = grid.node_ij(id);
        let lap = (p[grid.node_id(i + 1, j)] - 2.0 * p[id] + p[grid.node_id(i - 1, j)]) * ihx2
            + (p[grid.node_id(i, j + 1)] - 2.0 * p[id] + p[grid.node_id(i, j - 1)]) * ihy2;
        r[id] = -lap + inv_d2 * potential_w_prime(p[id], spec);
    }
    r
}

/// Linear stability of the trivial branch.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StabilityReport {
    /// Smallest Dirichlet eigenvalue of the discrete Laplacian on the grid.
    pub lambda1: f64,
    /// `lambda1 + 2 C~ / delta^2`; negative means `p = 0` is unstable.
    pub threshold: f64,
}

/// Smallest eigenvalue of the discrete Dirichlet quadratic form (generalized
/// against the trapezoid mass) by inverse power iteration with conjugate
/// gradient solves; deterministic start vector, eigenvalue tolerance 1e-10.
pub fn stability_threshold(grid: &Grid2d, scheme: &EdgeScheme, spec: &PotentialSpec) -> StabilityReport {
    let lambda1 = smallest_dirichlet_eigenvalue(grid, scheme);
    StabilityReport {
        lambda1,
        threshold: lambda1 + 2.0 * spec.ctilde / (spec.delta * spec.delta),
    }
}

/// See [`stability_threshold`]; exposed for refinement studies.
pub fn smallest_dirichlet_eigenvalue(grid: &Grid2d, scheme: &EdgeScheme) -> f64 {
    let free = &grid.interior_nodes;
    let n = free.len();
    let mut slot = vec![usize::MAX; grid.num_nodes()];
    for (k, &id) in free.iter().enumerate() {
        slot[id] = k;
    }
    // Stiffness of 1/2 dirichlet_energy on interior dofs (boundary pinned
    // to zero): L u = sum over incident edges of coef (u_a - u_b).
    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    let mut diag = vec![0.0; n];
    for &(a, b, c) in &scheme.edges {
        let (sa, sb) = (slot[a as usize], slot[b as usize]);
        if sa != usize::MAX {
            diag[sa] += c;
            if sb != usize::MAX {
                rows[sa].push((sb as u32, -c));
            }
        }
        if sb != usize::MAX {
            diag[sb] += c;
            if sa != usize::MAX {
                rows[sb].push((sa as u32, -c));
            }
        }
    }
    let mass: Vec<f64> = free.iter().map(|&id| grid.node_weight[id]).collect();

    let apply = |u: &[f64], out: &mut [f64]| {
        for k in 0..n {
            let mut s = diag[k] * u[k];
            for &(j, c) in &rows[k] {
                s += c * u[j as usize];
            }
            out[k] = s;
        }
    };

    // CG solve of L z = rhs.
    let cg = |rhs: &[f64], z: &mut Vec<f64>| {
        z.iter_mut().for_each(|v| *v = 0.0);
        let mut r = rhs.to_vec();
        let mut p = r.clone();
        let mut ap = vec![0.0; n];
        let mut rr: f64 = r.iter().map(|v| v * v).sum();
        let tol = 1e-26 * rr.max(1e-300);
        for _ in 0..10 * n.max(100) {
            if rr <= tol {
                break;
            }
            apply(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                break;
            }
            let alpha = rr / pap;
            for k in 0..n {
                z[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            let rr_new: f64 = r.iter().map(|v| v * v).sum();
            let beta = rr_new / rr;
            rr = rr_new;
            for k in 0..n {
                p[k] = r[k] + beta * p[k];
            }
        }
    };

    let mut v: Vec<f64> = vec![1.0; n];
    let mut z = vec![0.0; n];
    let mut lv = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..400 {
        // Normalize in the mass inner product and invert.
        let vm: f64 = v.iter().zip(&mass).map(|(a, m)| a * a * m).sum();
        let s = 1.0 / vm.sqrt();
        v.iter_mut().for_each(|x| *x *= s);
        let rhs: Vec<f64> = v.iter().zip(&mass).map(|(a, m)| a * m).collect();
        cg(&rhs, &mut z);
        apply(&z, &mut lv);
        let num: f64 = z.iter().zip(&lv).map(|(a, b)| a * b).sum();
        let den: f64 = z.iter().zip(&mass).map(|(a, m)| a * a * m).sum();
        let lambda_new = num / den;
        let done = (lambda_new - lambda).abs() <= 1e-10 * lambda_new.abs().max(1.0);
        lambda = lambda_new;
        std::mem::swap(&mut v, &mut z);
        if done {
            break;
        }
    }
    lambda
}
