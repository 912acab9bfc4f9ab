//! Non-dimensionalized 3D film energy on the unit slab.
//!
//! After rescaling the film to `Omega x (0, 1)`, the energy reads
//!
//! ```text
//! F_eps[Q] = int ( f_e(grad Q) + w_l f_LdG(Q) ) dV
//!          + (1/eps) int_{top+bottom} f_s(Q, z) dA
//! ```
//!
//! with the elastic density split into epsilon groups
//!
//! ```text
//! f_e = [ |grad_xy Q|^2 + M2 Q_{ik,k} Q_{ij,j} + M3 Q_{ij,k} Q_{ik,j} ]
//!     + (2/eps)  [ M2 Q_{ij,j} Q_{i3,3} + M3 Q_{i3,j} Q_{ij,3} ]
//!     + (1/eps^2)[ |d_z Q|^2 + (M2 + M3) |d_z Q z|^2 ]
//! ```
//!
//! (in-plane indices `j, k`, full indices `i, m`), and the quartic bulk
//! potential
//!
//! ```text
//! f_LdG(Q) = 2 A tr(Q^2) + (4/3) B tr(Q^3) + (tr Q^2)^2 + offset,
//! ```
//!
//! shifted by a constant so its minimum is zero. Groups 1 and 2 vanish
//! identically for z-independent fields, which makes `F_eps` coincide with
//! the 2D limit functional on trivially extended fields.
//!
//! Derivatives are one-sided per cell corner (see [`crate::grid`]), so the
//! discrete gradient of the total energy is exact and cheap to assemble.

use crate::error::{Error, Result};
use crate::grid::{Grid3d, QField3d};
use crate::solver::{minimize_bb, Objective, SolveStats};
use crate::surface::{eval_anchoring, AnchoringParams};
use crate::tensor::{tr_q2, tr_q3, QTensor};
use crate::vec3::Z_HAT;
use serde::Serialize;

/// Dimensionless elastic ratios `M2 = L2/L1`, `M3 = L3/L1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElasticConstants {
    pub m2: f64,
    pub m3: f64,
}

impl ElasticConstants {
    pub fn new(m2: f64, m3: f64) -> Self {
        ElasticConstants { m2, m3 }
    }

    pub fn isotropic() -> Self {
        ElasticConstants { m2: 0.0, m3: 0.0 }
    }
}

/// Coercivity of the elastic form: `-1 < M3 < 2` and
/// `M2 > -3/5 - M3/10`, both strict. Returns the flag and the margin
/// (smallest slack; negative when violated).
pub fn check_coercivity(m2: f64, m3: f64) -> (bool, f64) {
    let margin = (m3 + 1.0).min(2.0 - m3).min(m2 + 0.6 + m3 / 10.0);
    (margin > 0.0, margin)
}

/// Model parameters of the rescaled problem. `a` and `b` are the ratios
/// `a/c` and `b/c` of the bulk potential; `w_l` the relative bulk strength;
/// `epsilon` the thickness ratio `h/D`. `ldg_offset` shifts the bulk
/// potential so its global minimum over tensors is zero.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    pub a: f64,
    pub b: f64,
    pub w_l: f64,
    pub epsilon: f64,
    pub anchoring: AnchoringParams,
    pub ldg_offset: f64,
}

impl ModelParams {
    pub fn new(a: f64, b: f64, w_l: f64, epsilon: f64, anchoring: AnchoringParams) -> Result<Self> {
        if w_l <= 0.0 {
            return Err(Error::Invalid("w_l must be positive".into()));
        }
        if epsilon <= 0.0 {
            return Err(Error::Invalid("epsilon must be positive".into()));
        }
        Ok(ModelParams {
            a,
            b,
            w_l,
            epsilon,
            anchoring,
            ldg_offset: compute_ldg_offset(a, b),
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }
}

/// Rescaled bulk potential `2A tr Q^2 + (4/3) B tr Q^3 + (tr Q^2)^2 + offset`.
pub fn ldg_density(q: &QTensor, a: f64, b: f64, offset: f64) -> f64 {
    let t2 = tr_q2(q);
    let t3 = tr_q3(q);
    2.0 * a * t2 + (4.0 / 3.0) * b * t3 + t2 * t2 + offset
}

/// Gradient of [`ldg_density`] with respect to the five stored components.
pub fn ldg_density_grad(q: &QTensor, a: f64, b: f64) -> QTensor {
    let t2 = tr_q2(q);
    // d tr(Q^2) in stored components (q33 eliminated).
    let q33 = q.q33();
    let dt2 = QTensor::new(
        2.0 * (q.q11 - q33),
        4.0 * q.q12,
        4.0 * q.q13,
        2.0 * (q.q22 - q33),
        4.0 * q.q23,
    );
    // d tr(Q^3) = 3 (Q^2)_{ij} dQ_{ij}, pulled back to stored components.
    let m = q.as_matrix();
    let mut sq = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                sq[i][j] += m[i][k] * m[k][j];
            }
        }
    }
    let dt3 = QTensor::new(
        3.0 * (sq[0][0] - sq[2][2]),
        3.0 * (sq[0][1] + sq[1][0]),
        3.0 * (sq[0][2] + sq[2][0]),
        3.0 * (sq[1][1] - sq[2][2]),
        3.0 * (sq[1][2] + sq[2][1]),
    );
    let c2 = 2.0 * a + 2.0 * t2;
    dt2.scale(c2).add(&dt3.scale((4.0 / 3.0) * b))
}

/// `-min f_LdG`: the potential depends only on the two scalar order
/// parameters, so the minimum is found by a scan over that plane plus a
/// descent polish.
pub fn compute_ldg_offset(a: f64, b: f64) -> f64 {
    struct EigPlane {
        a: f64,
        b: f64,
        weights: Vec<f64>,
    }
    fn q_of(s1: f64, s2: f64) -> QTensor {
        // Diagonal tensor with eigenvalues from the order parameters.
        let l1 = (2.0 * s1 - s2) / 3.0;
        let l3 = (2.0 * s2 - s1) / 3.0;
        QTensor::new(l1, 0.0, 0.0, -(l1 + l3), 0.0)
    }
    impl Objective for EigPlane {
        fn value(&self, x: &[f64]) -> f64 {
            ldg_density(&q_of(x[0], x[1]), self.a, self.b, 0.0)
        }
        fn gradient(&self, x: &[f64], grad: &mut [f64]) {
            let q = q_of(x[0], x[1]);
            let g = ldg_density_grad(&q, self.a, self.b);
            // Chain rule through the diagonal embedding: q11 = (2s1 - s2)/3,
            // q22 = -(l1 + l3) = (-s1 - s2)/3.
            grad[0] = (2.0 * g.q11 - g.q22) / 3.0;
            grad[1] = (-g.q11 - g.q22) / 3.0;
        }
        fn weights(&self) -> &[f64] {
            &self.weights
        }
    }

    let plane = EigPlane {
        a,
        b,
        weights: vec![1.0; 2],
    };
    let mut best = (0.0, [0.0, 0.0]);
    let mut best_val = f64::INFINITY;
    let n = 61;
    for i in 0..n {
        for j in 0..n {
            let s1 = -6.0 + 12.0 * i as f64 / (n - 1) as f64;
            let s2 = -6.0 + 12.0 * j as f64 / (n - 1) as f64;
            let v = plane.value(&[s1, s2]);
            if v < best_val {
                best_val = v;
                best = (v, [s1, s2]);
            }
        }
    }
    let mut x = best.1;
    if let Ok(stats) = minimize_bb(&plane, &mut x, 1e-13, 5000) {
        best_val = best_val.min(stats.energy);
    }
    -best_val.min(best.0)
}

// ---------------------------------------------------------------------------
// Pointwise elastic densities. Derivative slots `dx, dy, dz` hold the
// component derivatives of the field along each direction; since the field is
// symmetric traceless, so are its derivatives, and the QTensor representation
// applies verbatim.
// ---------------------------------------------------------------------------

/// eps^0 group: `|grad_xy Q|^2 + M2 (div_2 Q)_i^2 + M3 Q_{ij,k} Q_{ik,j}`.
pub fn elastic_group0(dx: &QTensor, dy: &QTensor, m2: f64, m3: f64) -> f64 {
    let dxm = dx.as_matrix();
    let dym = dy.as_matrix();
    let mut iso = 0.0;
    for i in 0..3 {
        for m in 0..3 {
            iso += dxm[i][m] * dxm[i][m] + dym[i][m] * dym[i][m];
        }
    }
    let mut div = 0.0;
    let mut cross = 0.0;
    for i in 0..3 {
        let d = dxm[i][0] + dym[i][1];
        div += d * d;
        // sum over j,k in {x,y} of d_k Q_ij d_j Q_ik
        cross += dxm[i][0] * dxm[i][0]
            + dym[i][0] * dxm[i][1]
            + dxm[i][1] * dym[i][0]
            + dym[i][1] * dym[i][1];
    }
    iso + m2 * div + m3 * cross
}

/// eps^-1 group (entering with weight `2/eps`):
/// `M2 Q_{ij,j} Q_{i3,3} + M3 Q_{i3,j} Q_{ij,3}`.
pub fn elastic_group1(dx: &QTensor, dy: &QTensor, dz: &QTensor, m2: f64, m3: f64) -> f64 {
    let dxm = dx.as_matrix();
    let dym = dy.as_matrix();
    let dzm = dz.as_matrix();
    let mut g = 0.0;
    for i in 0..3 {
        let div = dxm[i][0] + dym[i][1];
        g += m2 * div * dzm[i][2];
        g += m3 * (dxm[i][2] * dzm[i][0] + dym[i][2] * dzm[i][1]);
    }
    g
}

/// eps^-2 group: `|d_z Q|^2 + (M2 + M3) |(d_z Q) z|^2`.
pub fn elastic_group2(dz: &QTensor, m2: f64, m3: f64) -> f64 {
    let dzm = dz.as_matrix();
    let mut iso = 0.0;
    for i in 0..3 {
        for m in 0..3 {
            iso += dzm[i][m] * dzm[i][m];
        }
    }
    let col = dzm[0][2] * dzm[0][2] + dzm[1][2] * dzm[1][2] + dzm[2][2] * dzm[2][2];
    iso + (m2 + m3) * col
}

/// Full rescaled elastic density `g0 + (2/eps) g1 + (1/eps^2) g2`.
pub fn elastic_density_3d(
    dx: &QTensor,
    dy: &QTensor,
    dz: &QTensor,
    m2: f64,
    m3: f64,
    epsilon: f64,
) -> f64 {
    elastic_group0(dx, dy, m2, m3)
        + (2.0 / epsilon) * elastic_group1(dx, dy, dz, m2, m3)
        + (1.0 / (epsilon * epsilon)) * elastic_group2(dz, m2, m3)
}

/// Pull a full-matrix sensitivity back to the five stored components.
fn pullback(g: &[[f64; 3]; 3]) -> QTensor {
    QTensor::new(
        g[0][0] - g[2][2],
        g[0][1] + g[1][0],
        g[0][2] + g[2][0],
        g[1][1] - g[2][2],
        g[1][2] + g[2][1],
    )
}

/// Gradients of the weighted elastic density
/// `w0 g0 + w1 g1 + w2 g2` with respect to `dx, dy, dz`.
#[allow(clippy::too_many_arguments)]
pub fn elastic_density_grads(
    dx: &QTensor,
    dy: &QTensor,
    dz: &QTensor,
    m2: f64,
    m3: f64,
    w0: f64,
    w1: f64,
    w2: f64,
) -> (QTensor, QTensor, QTensor) {
    let dxm = dx.as_matrix();
    let dym = dy.as_matrix();
    let dzm = dz.as_matrix();
    let mut gx = [[0.0; 3]; 3];
    let mut gy = [[0.0; 3]; 3];
    let mut gz = [[0.0; 3]; 3];

    for i in 0..3 {
        for m in 0..3 {
            gx[i][m] += w0 * 2.0 * dxm[i][m];
            gy[i][m] += w0 * 2.0 * dym[i][m];
            gz[i][m] += w2 * 2.0 * dzm[i][m];
        }
        let div = dxm[i][0] + dym[i][1];
        // group0: M2 div^2 + M3 cross
        gx[i][0] += w0 * (2.0 * m2 * div + 2.0 * m3 * dxm[i][0]);
        gy[i][1] += w0 * (2.0 * m2 * div + 2.0 * m3 * dym[i][1]);
        gx[i][1] += w0 * 2.0 * m3 * dym[i][0];
        gy[i][0] += w0 * 2.0 * m3 * dxm[i][1];
        // group1
        gx[i][0] += w1 * m2 * dzm[i][2];
        gy[i][1] += w1 * m2 * dzm[i][2];
        gz[i][2] += w1 * m2 * div;
        gx[i][2] += w1 * m3 * dzm[i][0];
        gy[i][2] += w1 * m3 * dzm[i][1];
        gz[i][0] += w1 * m3 * dxm[i][2];
        gz[i][1] += w1 * m3 * dym[i][2];
        // group2 column term
        gz[i][2] += w2 * 2.0 * (m2 + m3) * dzm[i][2];
    }
    (pullback(&gx), pullback(&gy), pullback(&gz))
}

/// Per-term energies of a configuration. `elastic_groups` holds the raw
/// integrals of the three epsilon groups; `elastic` already includes the
/// epsilon weights.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyBreakdown {
    pub elastic: f64,
    pub bulk: f64,
    pub surface: f64,
    pub total: f64,
    pub elastic_groups: [f64; 3],
}

impl EnergyBreakdown {
    pub fn new(elastic: f64, bulk: f64, surface: f64, elastic_groups: [f64; 3]) -> Self {
        EnergyBreakdown {
            elastic,
            bulk,
            surface,
            total: elastic + bulk + surface,
            elastic_groups,
        }
    }
}

const CORNERS_3D: [(usize, usize, usize); 8] = [
    (0, 0, 0),
    (1, 0, 0),
    (0, 1, 0),
    (1, 1, 0),
    (0, 0, 1),
    (1, 0, 1),
    (0, 1, 1),
    (1, 1, 1),
];

/// Corner derivative triple inside one cell: each corner uses the one-sided
/// differences along its three adjacent edges.
fn corner_derivs(
    q: &[QTensor; 8],
    corner: (usize, usize, usize),
    hx: f64,
    hy: f64,
    hz: f64,
) -> (QTensor, QTensor, QTensor) {
    let idx = |a: usize, b: usize, c: usize| -> usize { a + 2 * b + 4 * c };
    let (a, b, c) = corner;
    let dx = q[idx(1, b, c)].sub(&q[idx(0, b, c)]).scale(1.0 / hx);
    let dy = q[idx(a, 1, c)].sub(&q[idx(a, 0, c)]).scale(1.0 / hy);
    let dz = q[idx(a, b, 1)].sub(&q[idx(a, b, 0)]).scale(1.0 / hz);
    (dx, dy, dz)
}

fn gather_cell(grid: &Grid3d, field: &QField3d, ci: usize, cj: usize, ck: usize) -> [QTensor; 8] {
    let mut q = [QTensor::ZERO; 8];
    for (n, &(a, b, c) ) in CORNERS_3D.iter().enumerate() {
        q[n] = field.q[grid.node_id(ci + a, cj + b, ck + c)];
    }
    q
}

/// Total film energy by corner quadrature: elastic over active cells, bulk
/// over nodes with trapezoid weights, surface over the top and bottom faces
/// weighted by `1/eps`.
pub fn total_energy_eps(
    grid: &Grid3d,
    field: &QField3d,
    ec: &ElasticConstants,
    mp: &ModelParams,
) -> EnergyBreakdown {
    let eps = mp.epsilon;
    let (hx, hy, hz) = (grid.base.hx, grid.base.hy, grid.hz);
    let wq = hx * hy * hz / 8.0;
    let mut groups = [0.0; 3];
    for ck in 0..grid.nz {
        for cj in 0..grid.base.ny {
            for ci in 0..grid.base.nx {
                if !grid.base.cell_active[cj * grid.base.nx + ci] {
                    continue;
                }
                let q = gather_cell(grid, field, ci, cj, ck);
                for &corner in &CORNERS_3D {
                    let (dx, dy, dz) = corner_derivs(&q, corner, hx, hy, hz);
                    groups[0] += wq * elastic_group0(&dx, &dy, ec.m2, ec.m3);
                    groups[1] += wq * elastic_group1(&dx, &dy, &dz, ec.m2, ec.m3);
                    groups[2] += wq * elastic_group2(&dz, ec.m2, ec.m3);
                }
            }
        }
    }
    let elastic = groups[0] + (2.0 / eps) * groups[1] + (1.0 / (eps * eps)) * groups[2];

    let mut bulk = 0.0;
    for (id, q) in field.q.iter().enumerate() {
        let w = grid.node_weight[id];
        if w > 0.0 {
            bulk += w * mp.w_l * ldg_density(q, mp.a, mp.b, mp.ldg_offset);
        }
    }

    let n2 = grid.base.num_nodes();
    let alpha = mp.anchoring.alpha(eps);
    let gamma = mp.anchoring.gamma(eps);
    let mut surface = 0.0;
    for id2 in 0..n2 {
        let w = grid.base.node_weight[id2];
        if w > 0.0 {
            let q_bot = &field.q[id2];
            let q_top = &field.q[grid.nz * n2 + id2];
            surface += w
                * (eval_anchoring(q_bot, Z_HAT, alpha, mp.anchoring.beta, gamma)
                    + eval_anchoring(q_top, Z_HAT, alpha, mp.anchoring.beta, gamma));
        }
    }
    surface /= eps;

    EnergyBreakdown::new(elastic, bulk, surface, groups)
}

/// Analytic gradient of [`total_energy_eps`] with respect to every nodal
/// tensor (including Dirichlet nodes; the caller masks them).
pub fn total_energy_eps_grad(
    grid: &Grid3d,
    field: &QField3d,
    ec: &ElasticConstants,
    mp: &ModelParams,
) -> Vec<QTensor> {
    let eps = mp.epsilon;
    let (hx, hy, hz) = (grid.base.hx, grid.base.hy, grid.hz);
    let wq = hx * hy * hz / 8.0;
    let w1 = 2.0 / eps;
    let w2 = 1.0 / (eps * eps);
    let mut grad = vec![QTensor::ZERO; grid.num_nodes()];

    let idx = |a: usize, b: usize, c: usize| -> usize { a + 2 * b + 4 * c };
    for ck in 0..grid.nz {
        for cj in 0..grid.base.ny {
            for ci in 0..grid.base.nx {
                if !grid.base.cell_active[cj * grid.base.nx + ci] {
                    continue;
                }
                let q = gather_cell(grid, field, ci, cj, ck);
                let mut local = [QTensor::ZERO; 8];
                for &(a, b, c) in &CORNERS_3D {
                    let (dx, dy, dz) = corner_derivs(&q, (a, b, c), hx, hy, hz);
                    let (gx, gy, gz) =
                        elastic_density_grads(&dx, &dy, &dz, ec.m2, ec.m3, 1.0, w1, w2);
                    let gx = gx.scale(wq / hx);
                    let gy = gy.scale(wq / hy);
                    let gz = gz.scale(wq / hz);
                    local[idx(1, b, c)] = local[idx(1, b, c)].add(&gx);
                    local[idx(0, b, c)] = local[idx(0, b, c)].sub(&gx);
                    local[idx(a, 1, c)] = local[idx(a, 1, c)].add(&gy);
                    local[idx(a, 0, c)] = local[idx(a, 0, c)].sub(&gy);
                    local[idx(a, b, 1)] = local[idx(a, b, 1)].add(&gz);
                    local[idx(a, b, 0)] = local[idx(a, b, 0)].sub(&gz);
                }
                for (n, &(a, b, c)) in CORNERS_3D.iter().enumerate() {
                    let gid = grid.node_id(ci + a, cj + b, ck + c);
                    grad[gid] = grad[gid].add(&local[n]);
                }
            }
        }
    }

    for (id, q) in field.q.iter().enumerate() {
        let w = grid.node_weight[id];
        if w > 0.0 {
            let g = ldg_density_grad(q, mp.a, mp.b).scale(w * mp.w_l);
            grad[id] = grad[id].add(&g);
        }
    }

    let n2 = grid.base.num_nodes();
    let alpha = mp.anchoring.alpha(eps);
    let gamma = mp.anchoring.gamma(eps);
    for id2 in 0..n2 {
        let w = grid.base.node_weight[id2];
        if w <= 0.0 {
            continue;
        }
        for face in [0usize, grid.nz] {
            let id = face * n2 + id2;
            let q = &field.q[id];
            // d/dq of alpha (q33 - beta)^2 + gamma (q13^2 + q23^2), with
            // q33 = -q11 - q22 folded in.
            let d33 = 2.0 * alpha * (q.q33() - mp.anchoring.beta);
            let g = QTensor::new(
                -d33,
                0.0,
                2.0 * gamma * q.q13,
                -d33,
                2.0 * gamma * q.q23,
            );
            grad[id] = grad[id].add(&g.scale(w / eps));
        }
    }
    grad
}

/// `int |d_z Q|^2` of a slab field (z-variation diagnostic).
pub fn z_variation(grid: &Grid3d, field: &QField3d) -> f64 {
    let (hx, hy, hz) = (grid.base.hx, grid.base.hy, grid.hz);
    let wq = hx * hy * hz / 8.0;
    let mut total = 0.0;
    for ck in 0..grid.nz {
        for cj in 0..grid.base.ny {
            for ci in 0..grid.base.nx {
                if !grid.base.cell_active[cj * grid.base.nx + ci] {
                    continue;
                }
                let q = gather_cell(grid, field, ci, cj, ck);
                for &corner in &CORNERS_3D {
                    let (_, _, dz) = corner_derivs(&q, corner, hx, hy, hz);
                    total += wq * tr_q2(&dz);
                }
            }
        }
    }
    total
}

const COMP: usize = 5;

fn unpack_into(field: &mut QField3d, free: &[usize], x: &[f64]) {
    for (n, &id) in free.iter().enumerate() {
        field.q[id] = QTensor::new(
            x[n * COMP],
            x[n * COMP + 1],
            x[n * COMP + 2],
            x[n * COMP + 3],
            x[n * COMP + 4],
        );
    }
}

struct FilmObjective<'a> {
    grid: &'a Grid3d,
    template: QField3d,
    free: Vec<usize>,
    ec: ElasticConstants,
    mp: ModelParams,
    weights: Vec<f64>,
}

impl<'a> FilmObjective<'a> {
    fn new(grid: &'a Grid3d, init: &QField3d, ec: &ElasticConstants, mp: &ModelParams) -> Self {
        let free: Vec<usize> = (0..grid.num_nodes())
            .filter(|&id| grid.is_free(id))
            .collect();
        let mut weights = Vec::with_capacity(free.len() * COMP);
        for &id in &free {
            for _ in 0..COMP {
                weights.push(grid.node_weight[id].max(1e-300));
            }
        }
        FilmObjective {
            grid,
            template: init.clone(),
            free,
            ec: *ec,
            mp: *mp,
            weights,
        }
    }

    fn pack(&self, field: &QField3d) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.free.len() * COMP);
        for &id in &self.free {
            let q = &field.q[id];
            x.extend_from_slice(&[q.q11, q.q12, q.q13, q.q22, q.q23]);
        }
        x
    }
}

impl<'a> Objective for FilmObjective<'a> {
    fn value(&self, x: &[f64]) -> f64 {
        let mut field = self.template.clone();
        unpack_into(&mut field, &self.free, x);
        total_energy_eps(self.grid, &field, &self.ec, &self.mp).total
    }
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let mut field = self.template.clone();
        unpack_into(&mut field, &self.free, x);
        let g = total_energy_eps_grad(self.grid, &field, &self.ec, &self.mp);
        for (n, &id) in self.free.iter().enumerate() {
            let q = &g[id];
            grad[n * COMP] = q.q11;
            grad[n * COMP + 1] = q.q12;
            grad[n * COMP + 2] = q.q13;
            grad[n * COMP + 3] = q.q22;
            grad[n * COMP + 4] = q.q23;
        }
    }
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Direct minimization of `F_eps` over all non-lateral nodes. The lateral
/// Dirichlet ring of `initial` is held fixed; requires coercive elastic
/// constants. Returns the final field, its breakdown and solver statistics
/// (`converged = false` flags an iteration-capped partial result).
pub fn minimize_eps(
    grid: &Grid3d,
    initial: &QField3d,
    ec: &ElasticConstants,
    mp: &ModelParams,
    tol: f64,
    max_iters: usize,
) -> Result<(QField3d, EnergyBreakdown, SolveStats)> {
    let (ok, _) = check_coercivity(ec.m2, ec.m3);
    if !ok {
        return Err(Error::NonCoercive {
            m2: ec.m2,
            m3: ec.m3,
        });
    }
    let obj = FilmObjective::new(grid, initial, ec, mp);
    let mut x = obj.pack(initial);
    let stats = minimize_bb(&obj, &mut x, tol, max_iters)?;
    let mut field = initial.clone();
    unpack_into(&mut field, &obj.free, &x);
    let breakdown = total_energy_eps(grid, &field, ec, mp);
    Ok((field, breakdown, stats))
}
