//! Uniform tensor-product grids on the unit square and the unit disc, and the
//! slab grids built on top of them.
//!
//! The disc is handled as a masked grid: a cell is active when all four
//! corners lie inside the disc, a node is active when it belongs to an active
//! cell, and the Dirichlet ring consists of active nodes that are not
//! surrounded by four active cells. Boundary data for the disc is evaluated
//! at the node position snapped to the true circle.
//!
//! All energies in this crate share one discretization: per active cell, each
//! corner carries the one-sided difference gradients along its two (three in
//! 3D) adjacent edges, and the cell contributes the corner average times the
//! cell volume. For nodal (potential, surface) terms the induced node weights
//! are exactly the trapezoid weights. The Euler-Lagrange operator of the
//! resulting discrete Dirichlet energy at interior nodes is the classic
//! 5-point (7-point in 3D) Laplacian, which keeps the energy, its gradient,
//! the Allen-Cahn residual and the stability operator mutually consistent.

use crate::tensor::QTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainShape {
    /// Unit square `[0, 1]^2`.
    Square,
    /// Unit disc `x^2 + y^2 <= 1` on the bounding box `[-1, 1]^2`.
    Disc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    /// Outside the domain (masked off).
    Exterior,
    /// Carries Dirichlet data.
    Boundary,
    /// Unknown of the discrete problem.
    Interior,
}

/// Uniform 2D grid with `nx * ny` cells.
#[derive(Debug, Clone)]
pub struct Grid2d {
    pub shape: DomainShape,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub x0: f64,
    pub y0: f64,
    pub roles: Vec<NodeRole>,
    pub cell_active: Vec<bool>,
    /// Trapezoid weight of each node (sum of `hx hy / 4` over incident
    /// active cells); zero on exterior nodes.
    pub node_weight: Vec<f64>,
    /// Active-cell area (the quadrature measure of the discrete domain).
    pub area: f64,
    /// Boundary nodes ordered by angle about the domain center, forming a
    /// single loop for star-shaped domains.
    pub boundary_loop: Vec<usize>,
    pub interior_nodes: Vec<usize>,
}

impl Grid2d {
    pub fn new(shape: DomainShape, nx: usize, ny: usize) -> Self {
        assert!(nx >= 2 && ny >= 2, "grid needs at least 2 cells per side");
        let (x0, y0, lx, ly) = match shape {
            DomainShape::Square => (0.0, 0.0, 1.0, 1.0),
            DomainShape::Disc => (-1.0, -1.0, 2.0, 2.0),
        };
        let hx = lx / nx as f64;
        let hy = ly / ny as f64;
        let nnx = nx + 1;
        let nny = ny + 1;

        let inside = |i: usize, j: usize| -> bool {
            match shape {
                DomainShape::Square => true,
                DomainShape::Disc => {
                    let x = x0 + i as f64 * hx;
                    let y = y0 + j as f64 * hy;
                    x * x + y * y <= 1.0 + 1e-12
                }
            }
        };

        let mut cell_active = vec![false; nx * ny];
        for cj in 0..ny {
            for ci in 0..nx {
                cell_active[cj * nx + ci] = inside(ci, cj)
                    && inside(ci + 1, cj)
                    && inside(ci, cj + 1)
                    && inside(ci + 1, cj + 1);
            }
        }

        let mut roles = vec![NodeRole::Exterior; nnx * nny];
        let mut node_weight = vec![0.0; nnx * nny];
        let w4 = hx * hy / 4.0;
        let mut area = 0.0;
        for j in 0..nny {
            for i in 0..nnx {
                let mut incident = 0usize;
                let mut possible = 0usize;
                for (di, dj) in [(0i64, 0i64), (-1, 0), (0, -1), (-1, -1)] {
                    let ci = i as i64 + di;
                    let cj = j as i64 + dj;
                    if ci < 0 || cj < 0 || ci >= nx as i64 || cj >= ny as i64 {
                        continue;
                    }
                    possible += 1;
                    if cell_active[cj as usize * nx + ci as usize] {
                        incident += 1;
                    }
                }
                let id = j * nnx + i;
                node_weight[id] = incident as f64 * w4;
                roles[id] = if incident == 0 {
                    NodeRole::Exterior
                } else if incident == 4 && possible == 4 {
                    NodeRole::Interior
                } else {
                    NodeRole::Boundary
                };
            }
        }
        for &active in &cell_active {
            if active {
                area += hx * hy;
            }
        }

        let (cx, cy) = match shape {
            DomainShape::Square => (0.5, 0.5),
            DomainShape::Disc => (0.0, 0.0),
        };
        let mut boundary_loop: Vec<usize> = (0..nnx * nny)
            .filter(|&id| roles[id] == NodeRole::Boundary)
            .collect();
        boundary_loop.sort_by(|&a, &b| {
            let pa = (x0 + (a % nnx) as f64 * hx, y0 + (a / nnx) as f64 * hy);
            let pb = (x0 + (b % nnx) as f64 * hx, y0 + (b / nnx) as f64 * hy);
            let ta = (pa.1 - cy).atan2(pa.0 - cx);
            let tb = (pb.1 - cy).atan2(pb.0 - cx);
            ta.partial_cmp(&tb).unwrap().then(a.cmp(&b))
        });
        let interior_nodes = (0..nnx * nny)
            .filter(|&id| roles[id] == NodeRole::Interior)
            .collect();

        Grid2d {
            shape,
            nx,
            ny,
            hx,
            hy,
            x0,
            y0,
            roles,
            cell_active,
            node_weight,
            area,
            boundary_loop,
            interior_nodes,
        }
    }

    pub fn num_nodes(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn node_id(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn node_ij(&self, id: usize) -> (usize, usize) {
        (id % (self.nx + 1), id / (self.nx + 1))
    }

    pub fn node_pos(&self, id: usize) -> (f64, f64) {
        let (i, j) = self.node_ij(id);
        (self.x0 + i as f64 * self.hx, self.y0 + j as f64 * self.hy)
    }

    pub fn role(&self, id: usize) -> NodeRole {
        self.roles[id]
    }

    /// Node position snapped to the true domain boundary (identity for the
    /// square; radial projection onto the circle for the disc).
    pub fn snapped_boundary_pos(&self, id: usize) -> (f64, f64) {
        let (x, y) = self.node_pos(id);
        match self.shape {
            DomainShape::Square => (x, y),
            DomainShape::Disc => {
                let r = (x * x + y * y).sqrt();
                if r < 1e-14 {
                    (1.0, 0.0)
                } else {
                    (x / r, y / r)
                }
            }
        }
    }

    /// Polar angle of a node about the domain center.
    pub fn node_theta(&self, id: usize) -> f64 {
        let (x, y) = self.node_pos(id);
        let (cx, cy) = self.center();
        (y - cy).atan2(x - cx)
    }

    pub fn center(&self) -> (f64, f64) {
        match self.shape {
            DomainShape::Square => (0.5, 0.5),
            DomainShape::Disc => (0.0, 0.0),
        }
    }

    /// Bilinear interpolation of a nodal scalar at `(x, y)`; `None` outside
    /// the active cell complex.
    pub fn sample_scalar(&self, values: &[f64], x: f64, y: f64) -> Option<f64> {
        let fx = (x - self.x0) / self.hx;
        let fy = (y - self.y0) / self.hy;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let ci = (fx.floor() as usize).min(self.nx - 1);
        let cj = (fy.floor() as usize).min(self.ny - 1);
        if !self.cell_active[cj * self.nx + ci] {
            return None;
        }
        let tx = fx - ci as f64;
        let ty = fy - cj as f64;
        let v00 = values[self.node_id(ci, cj)];
        let v10 = values[self.node_id(ci + 1, cj)];
        let v01 = values[self.node_id(ci, cj + 1)];
        let v11 = values[self.node_id(ci + 1, cj + 1)];
        Some(
            v00 * (1.0 - tx) * (1.0 - ty)
                + v10 * tx * (1.0 - ty)
                + v01 * (1.0 - tx) * ty
                + v11 * tx * ty,
        )
    }
}

/// Slab grid: a [`Grid2d`] extruded into `nz` cells over the rescaled unit
/// height. Lateral boundary columns carry Dirichlet data at every level; top
/// and bottom faces remain free (they carry surface energy instead).
#[derive(Debug, Clone)]
pub struct Grid3d {
    pub base: Grid2d,
    pub nz: usize,
    pub hz: f64,
    /// Trapezoid volume weight per 3D node (zero off the active complex).
    pub node_weight: Vec<f64>,
}

impl Grid3d {
    pub fn new(shape: DomainShape, nx: usize, ny: usize, nz: usize) -> Self {
        assert!(nz >= 1, "slab needs at least one cell across the thickness");
        let base = Grid2d::new(shape, nx, ny);
        let hz = 1.0 / nz as f64;
        let n2 = base.num_nodes();
        let mut node_weight = vec![0.0; n2 * (nz + 1)];
        for k in 0..=nz {
            let wz = if k == 0 || k == nz { 0.5 } else { 1.0 } * hz;
            for id2 in 0..n2 {
                node_weight[k * n2 + id2] = base.node_weight[id2] * wz;
            }
        }
        Grid3d {
            base,
            nz,
            hz,
            node_weight,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.base.num_nodes() * (self.nz + 1)
    }

    pub fn node_id(&self, i: usize, j: usize, k: usize) -> usize {
        k * self.base.num_nodes() + self.base.node_id(i, j)
    }

    /// 2D node id and level of a 3D node.
    pub fn split_id(&self, id: usize) -> (usize, usize) {
        let n2 = self.base.num_nodes();
        (id % n2, id / n2)
    }

    /// Free nodes are active non-lateral-Dirichlet columns at every level.
    pub fn is_free(&self, id: usize) -> bool {
        let (id2, _) = self.split_id(id);
        self.base.roles[id2] == NodeRole::Interior
    }
}

/// Planar field `(p1, p2)` with an optional per-node z-eigenvalue `b` (used
/// when the normal eigenvalue is a free variable); `beta` is the anchoring
/// target.
#[derive(Debug, Clone)]
pub struct PField {
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub b: Option<Vec<f64>>,
    pub beta: f64,
}

impl PField {
    pub fn zeros(grid: &Grid2d, beta: f64) -> Self {
        PField {
            p1: vec![0.0; grid.num_nodes()],
            p2: vec![0.0; grid.num_nodes()],
            b: None,
            beta,
        }
    }

    pub fn planar_norm_at(&self, id: usize) -> f64 {
        (self.p1[id] * self.p1[id] + self.p2[id] * self.p2[id]).sqrt()
    }

    pub fn b_at(&self, id: usize) -> f64 {
        match &self.b {
            Some(b) => b[id],
            None => self.beta,
        }
    }

    pub fn q_at(&self, id: usize) -> QTensor {
        let b = self.b_at(id);
        QTensor::new(
            self.p1[id] - 0.5 * b,
            self.p2[id],
            0.0,
            -self.p1[id] - 0.5 * b,
            0.0,
        )
    }
}

/// Full five-component tensor field on a 2D grid.
#[derive(Debug, Clone)]
pub struct QField2d {
    pub q: Vec<QTensor>,
}

impl QField2d {
    pub fn zeros(grid: &Grid2d) -> Self {
        QField2d {
            q: vec![QTensor::ZERO; grid.num_nodes()],
        }
    }

    pub fn from_pfield(grid: &Grid2d, p: &PField) -> Self {
        QField2d {
            q: (0..grid.num_nodes()).map(|id| p.q_at(id)).collect(),
        }
    }
}

/// Full five-component tensor field on a slab grid.
#[derive(Debug, Clone)]
pub struct QField3d {
    pub q: Vec<QTensor>,
}

impl QField3d {
    pub fn zeros(grid: &Grid3d) -> Self {
        QField3d {
            q: vec![QTensor::ZERO; grid.num_nodes()],
        }
    }

    /// z-independent extension of a 2D field.
    pub fn extend_2d(grid: &Grid3d, field: &QField2d) -> Self {
        let n2 = grid.base.num_nodes();
        let mut q = Vec::with_capacity(grid.num_nodes());
        for _ in 0..=grid.nz {
            q.extend_from_slice(&field.q[..n2]);
        }
        QField3d { q }
    }

    /// z-average down to a 2D field (trapezoid in z).
    pub fn z_average(&self, grid: &Grid3d) -> QField2d {
        let n2 = grid.base.num_nodes();
        let mut q = vec![QTensor::ZERO; n2];
        for k in 0..=grid.nz {
            let wz = if k == 0 || k == grid.nz { 0.5 } else { 1.0 } * grid.hz;
            for id2 in 0..n2 {
                q[id2] = q[id2].add(&self.q[k * n2 + id2].scale(wz));
            }
        }
        QField2d { q }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_grid_roles() {
        let g = Grid2d::new(DomainShape::Square, 4, 4);
        assert_eq!(g.num_nodes(), 25);
        assert_eq!(g.interior_nodes.len(), 9);
        assert_eq!(g.boundary_loop.len(), 16);
        assert!((g.area - 1.0).abs() < 1e-15);
        // Trapezoid weights: h^2 inside, h^2/2 on edges, h^2/4 at corners.
        let h2 = g.hx * g.hy;
        assert!((g.node_weight[g.node_id(2, 2)] - h2).abs() < 1e-15);
        assert!((g.node_weight[g.node_id(0, 2)] - h2 / 2.0).abs() < 1e-15);
        assert!((g.node_weight[g.node_id(0, 0)] - h2 / 4.0).abs() < 1e-15);
        let total: f64 = g.node_weight.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disc_grid_masks_the_complement() {
        let g = Grid2d::new(DomainShape::Disc, 64, 64);
        // Area of the active complex approaches pi from below.
        assert!(g.area < std::f64::consts::PI);
        assert!(g.area > std::f64::consts::PI - 0.4);
        // Center is interior; the box corner is exterior.
        let c = g.node_id(32, 32);
        assert_eq!(g.roles[c], NodeRole::Interior);
        assert_eq!(g.roles[g.node_id(0, 0)], NodeRole::Exterior);
        // Every interior node has four active incident cells, so the 5-point
        // stencil never touches an exterior node.
        for &id in &g.interior_nodes {
            let (i, j) = g.node_ij(id);
            for (ni, nj) in [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)] {
                assert_ne!(g.roles[g.node_id(ni, nj)], NodeRole::Exterior);
            }
        }
        // Snapped boundary positions live on the unit circle.
        for &id in &g.boundary_loop {
            let (x, y) = g.snapped_boundary_pos(id);
            assert!((x * x + y * y - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_loop_is_angle_ordered() {
        for shape in [DomainShape::Square, DomainShape::Disc] {
            let g = Grid2d::new(shape, 16, 16);
            let (cx, cy) = g.center();
            let mut prev = f64::NEG_INFINITY;
            for &id in &g.boundary_loop {
                let (x, y) = g.node_pos(id);
                let t = (y - cy).atan2(x - cx);
                assert!(t >= prev - 1e-12);
                prev = t;
            }
        }
    }

    #[test]
    fn slab_weights_sum_to_volume() {
        let g = Grid3d::new(DomainShape::Square, 4, 4, 3);
        let total: f64 = g.node_weight.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(g.num_nodes(), 25 * 4);
    }

    #[test]
    fn extension_and_average_roundtrip() {
        let g = Grid3d::new(DomainShape::Square, 3, 3, 2);
        let mut f2 = QField2d::zeros(&g.base);
        for (id, q) in f2.q.iter_mut().enumerate() {
            *q = QTensor::new(id as f64, 0.1, 0.0, -0.2, 0.0);
        }
        let f3 = QField3d::extend_2d(&g, &f2);
        let back = f3.z_average(&g);
        for id in 0..g.base.num_nodes() {
            assert!(back.q[id].sub(&f2.q[id]).norm() < 1e-13);
        }
    }

    #[test]
    fn sampling_respects_the_mask() {
        let g = Grid2d::new(DomainShape::Disc, 32, 32);
        let vals: Vec<f64> = (0..g.num_nodes())
            .map(|id| {
                let (x, y) = g.node_pos(id);
                x + 2.0 * y
            })
            .collect();
        // Bilinear reproduction of a linear function inside.
        let v = g.sample_scalar(&vals, 0.21, -0.13).unwrap();
        assert!((v - (0.21 - 0.26)).abs() < 1e-12);
        assert!(g.sample_scalar(&vals, 0.999, 0.999).is_none());
    }
}
