//! Boundary data and solver drivers for the 2D limit problems.
//!
//! Two families of lateral data are supported. Case 1 pins the boundary to
//! the constant homeotropic state, `p = 0`. Case 2 prescribes the planar
//! pair of a uniaxial in-plane director of winding `d/2`:
//!
//! ```text
//! p(theta) = -(3 beta / 2) (cos d theta, sin d theta),
//! ```
//!
//! which has modulus `3|beta|/2` and winding `d`. Odd `d` is fine even
//! though the director itself is then discontinuous: the data lives on `p`,
//! which is single-valued.
//!
//! The reduced solver descends the planar Ginzburg-Landau functional with
//! optional continuation in `delta` (coarse wells first, then sharper), and
//! the full solver minimizes `F_0` with the normal eigenvalue `b` as a third
//! unknown per node when the leading anchoring leaves it free.

use crate::energy2d::{
    allen_cahn_residual, f0_energy, f0_energy_grad, reduced_energy, reduced_gradient, EdgeScheme,
    PotentialSpec,
};
use crate::energy3d::{ElasticConstants, EnergyBreakdown, ModelParams};
use crate::error::{Error, Result};
use crate::grid::{DomainShape, Grid2d, PField, QField2d};
use crate::solver::{minimize_bb, Objective, SolveStats};
use crate::tensor::{p_from_q, QTensor};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryKind {
    /// Constant homeotropic data, `p = 0` on the boundary.
    Case1,
    /// Planar director data of tensor winding `degree`.
    Case2 { degree: i32 },
}

/// Nodal Dirichlet values for the planar pair on the boundary loop.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub kind: BoundaryKind,
    pub beta: f64,
    /// Node ids in loop order (shared with `grid.boundary_loop`).
    pub nodes: Vec<usize>,
    pub values: Vec<(f64, f64)>,
}

impl BoundaryData {
    /// Total winding of the boundary values around the loop.
    pub fn winding(&self) -> i32 {
        let mut total = 0.0;
        let n = self.values.len();
        for k in 0..n {
            let (a1, a2) = self.values[k];
            let (b1, b2) = self.values[(k + 1) % n];
            let ta = a2.atan2(a1);
            let tb = b2.atan2(b1);
            let mut d = tb - ta;
            while d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            }
            while d < -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
            }
            total += d;
        }
        (total / (2.0 * std::f64::consts::PI)).round() as i32
    }
}

/// Case 1: `p = 0` everywhere on the boundary (the tensor datum is the
/// constant `Q_beta`).
pub fn boundary_case1(grid: &Grid2d, beta: f64) -> BoundaryData {
    BoundaryData {
        kind: BoundaryKind::Case1,
        beta,
        nodes: grid.boundary_loop.clone(),
        values: vec![(0.0, 0.0); grid.boundary_loop.len()],
    }
}

/// Case 2: degree-`d` planar data evaluated at each boundary node's angle.
pub fn boundary_case2(grid: &Grid2d, degree: i32, beta: f64) -> BoundaryData {
    let amp = -1.5 * beta;
    let values = grid
        .boundary_loop
        .iter()
        .map(|&id| {
            let th = grid.node_theta(id) * degree as f64;
            (amp * th.cos(), amp * th.sin())
        })
        .collect();
    BoundaryData {
        kind: BoundaryKind::Case2 { degree },
        beta,
        nodes: grid.boundary_loop.clone(),
        values,
    }
}

/// Solver controls shared by the 2D and 3D drivers.
#[derive(Debug, Clone, Serialize)]
pub struct SolverConfig {
    /// Sup-norm target for the weight-normalized gradient.
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Decreasing ladder of delta values solved before the target delta.
    pub continuation: Vec<f64>,
    /// Amplitude of the seeded symmetry-breaking perturbation.
    pub perturbation: f64,
}

impl SolverConfig {
    pub fn new(tol: f64, max_iters: usize, seed: u64) -> Self {
        SolverConfig {
            tol,
            max_iters,
            seed,
            continuation: Vec::new(),
            perturbation: 1e-3,
        }
    }

    pub fn with_continuation(mut self, ladder: Vec<f64>) -> Result<Self> {
        for w in ladder.windows(2) {
            if w[1] >= w[0] {
                return Err(Error::Invalid(
                    "continuation ladder must be strictly decreasing".into(),
                ));
            }
        }
        self.continuation = ladder;
        Ok(self)
    }
}

/// Outcome of a 2D solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub energy: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    /// Sup-norm of the 5-point Allen-Cahn residual of the final modulus
    /// (reported for the reduced solves, where the modulus equation holds).
    pub allen_cahn_residual: Option<f64>,
    /// Per-stage (delta, energy, iterations) along the continuation ladder.
    pub stages: Vec<(f64, f64, usize)>,
    #[serde(skip)]
    pub history: Vec<(usize, f64, f64)>,
}

pub fn apply_boundary(field: &mut PField, bd: &BoundaryData) {
    for (&id, &(v1, v2)) in bd.nodes.iter().zip(&bd.values) {
        field.p1[id] = v1;
        field.p2[id] = v2;
        if let Some(b) = field.b.as_mut() {
            b[id] = field.beta;
        }
    }
}

/// Smooth initial guess compatible with the boundary data: zero for Case 1;
/// for Case 2 a field of `|d|` separated unit-winding zeros (a single
/// central zero when `|d| = 1`) whose phases multiply up to the boundary
/// winding. `core` sets the modulus ramp width around each zero. Separated
/// seeds matter for `|d| >= 2`: a single degree-`d` zero splits into slowly
/// migrating unit vortices, and descent from the split configuration
/// converges far faster.
pub fn initial_guess(grid: &Grid2d, bd: &BoundaryData, core: f64) -> PField {
    let mut field = PField::zeros(grid, bd.beta);
    if let BoundaryKind::Case2 { degree } = bd.kind {
        let amp = -1.5 * bd.beta;
        let (cx, cy) = grid.center();
        let rmax = match grid.shape {
            DomainShape::Square => 0.5,
            DomainShape::Disc => 1.0,
        };
        let n_zeros = degree.unsigned_abs() as usize;
        let sign = if degree >= 0 { 1.0 } else { -1.0 };
        let seed_r = if n_zeros > 1 { 0.4 * rmax } else { 0.0 };
        let zeros: Vec<(f64, f64)> = (0..n_zeros)
            .map(|k| {
                let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n_zeros as f64;
                (cx + seed_r * phi.cos(), cy + seed_r * phi.sin())
            })
            .collect();
        let w = core.max(3.0 * grid.hx.min(grid.hy));
        for id in 0..grid.num_nodes() {
            if grid.node_weight[id] <= 0.0 {
                continue;
            }
            let (x, y) = grid.node_pos(id);
            let mut modulus = 1.0;
            let mut phase = 0.0;
            for &(zx, zy) in &zeros {
                let (dx, dy) = (x - zx, y - zy);
                modulus *= (dx * dx + dy * dy).sqrt().min(w) / w;
                phase += sign * dy.atan2(dx);
            }
            field.p1[id] = amp * modulus * phase.cos();
            field.p2[id] = amp * modulus * phase.sin();
        }
    }
    apply_boundary(&mut field, bd);
    field
}

struct ReducedObjective<'a> {
    grid: &'a Grid2d,
    scheme: &'a EdgeScheme,
    template: PField,
    spec: PotentialSpec,
    weights: Vec<f64>,
}

impl<'a> ReducedObjective<'a> {
    fn new(grid: &'a Grid2d, scheme: &'a EdgeScheme, template: PField, spec: PotentialSpec) -> Self {
        let mut weights = Vec::with_capacity(grid.interior_nodes.len() * 2);
        for &id in &grid.interior_nodes {
            weights.push(grid.node_weight[id]);
            weights.push(grid.node_weight[id]);
        }
        ReducedObjective {
            grid,
            scheme,
            template,
            spec,
            weights,
        }
    }

    fn pack(&self, field: &PField) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.weights.len());
        for &id in &self.grid.interior_nodes {
            x.push(field.p1[id]);
            x.push(field.p2[id]);
        }
        x
    }

    fn unpack(&self, x: &[f64]) -> PField {
        let mut field = self.template.clone();
        for (n, &id) in self.grid.interior_nodes.iter().enumerate() {
            field.p1[id] = x[2 * n];
            field.p2[id] = x[2 * n + 1];
        }
        field
    }
}

impl<'a> Objective for ReducedObjective<'a> {
    fn value(&self, x: &[f64]) -> f64 {
        let field = self.unpack(x);
        reduced_energy(self.grid, self.scheme, &field, &self.spec)
    }
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let field = self.unpack(x);
        let (g1, g2) = reduced_gradient(self.grid, self.scheme, &field, &self.spec);
        for (n, &id) in self.grid.interior_nodes.iter().enumerate() {
            grad[2 * n] = g1[id];
            grad[2 * n + 1] = g2[id];
        }
    }
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Minimizes the reduced functional subject to the boundary data, walking
/// the continuation ladder down to `spec.delta`. Dirichlet nodes are never
/// touched; a seeded perturbation breaks the symmetry of the trivial branch.
pub fn minimize_reduced(
    grid: &Grid2d,
    scheme: &EdgeScheme,
    bd: &BoundaryData,
    spec: &PotentialSpec,
    cfg: &SolverConfig,
) -> Result<(PField, SolveReport)> {
    if bd.nodes.len() != grid.boundary_loop.len() {
        return Err(Error::Invalid(
            "boundary data does not match the grid boundary".into(),
        ));
    }
    let first_delta = cfg.continuation.first().copied().unwrap_or(spec.delta);
    let mut field = initial_guess(grid, bd, first_delta);
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    for &id in &grid.interior_nodes {
        field.p1[id] += cfg.perturbation * rng.gen_range(-1.0..1.0);
        field.p2[id] += cfg.perturbation * rng.gen_range(-1.0..1.0);
    }

    let mut ladder: Vec<f64> = cfg
        .continuation
        .iter()
        .copied()
        .filter(|&d| d > spec.delta)
        .collect();
    ladder.push(spec.delta);

    let mut stages = Vec::new();
    let mut total_iters = 0;
    let mut last: Option<SolveStats> = None;
    for &delta in &ladder {
        let stage_spec = spec.with_delta(delta);
        let obj = ReducedObjective::new(grid, scheme, field.clone(), stage_spec);
        let mut x = obj.pack(&field);
        let stats = minimize_bb(&obj, &mut x, cfg.tol, cfg.max_iters)?;
        field = obj.unpack(&x);
        total_iters += stats.iterations;
        stages.push((delta, stats.energy, stats.iterations));
        last = Some(stats);
    }
    let stats = last.expect("ladder is never empty");

    let modulus: Vec<f64> = (0..grid.num_nodes())
        .map(|id| field.planar_norm_at(id))
        .collect();
    let ac = allen_cahn_residual(grid, &modulus, spec);
    let ac_res = ac.iter().fold(0.0f64, |a, &b| a.max(b.abs()));

    Ok((
        field,
        SolveReport {
            energy: stats.energy,
            iterations: total_iters,
            residual: stats.residual,
            converged: stats.converged,
            allen_cahn_residual: Some(ac_res),
            stages,
            history: stats.history,
        },
    ))
}

struct F0Objective<'a> {
    grid: &'a Grid2d,
    template: PField,
    ec: ElasticConstants,
    mp: ModelParams,
    b_free: bool,
    weights: Vec<f64>,
}

impl<'a> F0Objective<'a> {
    fn new(
        grid: &'a Grid2d,
        template: PField,
        ec: &ElasticConstants,
        mp: &ModelParams,
        b_free: bool,
    ) -> Self {
        let per = if b_free { 3 } else { 2 };
        let mut weights = Vec::with_capacity(grid.interior_nodes.len() * per);
        for &id in &grid.interior_nodes {
            for _ in 0..per {
                weights.push(grid.node_weight[id]);
            }
        }
        F0Objective {
            grid,
            template,
            ec: *ec,
            mp: *mp,
            b_free,
            weights,
        }
    }

    fn per_node(&self) -> usize {
        if self.b_free {
            3
        } else {
            2
        }
    }

    fn pack(&self, field: &PField) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.weights.len());
        for &id in &self.grid.interior_nodes {
            x.push(field.p1[id]);
            x.push(field.p2[id]);
            if self.b_free {
                x.push(field.b_at(id));
            }
        }
        x
    }

    fn unpack(&self, x: &[f64]) -> PField {
        let mut field = self.template.clone();
        let per = self.per_node();
        for (n, &id) in self.grid.interior_nodes.iter().enumerate() {
            field.p1[id] = x[per * n];
            field.p2[id] = x[per * n + 1];
            if self.b_free {
                field
                    .b
                    .as_mut()
                    .expect("b slot allocated for the free-b solve")[id] = x[per * n + 2];
            }
        }
        field
    }

    fn qfield(&self, field: &PField) -> QField2d {
        QField2d::from_pfield(self.grid, field)
    }
}

impl<'a> Objective for F0Objective<'a> {
    fn value(&self, x: &[f64]) -> f64 {
        let field = self.unpack(x);
        let qf = self.qfield(&field);
        // Membership holds by construction (q13 = q23 = 0), so the gate-free
        // breakdown is evaluated directly.
        crate::energy2d::f0_energy_unchecked(self.grid, &qf, &self.ec, &self.mp).total
    }
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let field = self.unpack(x);
        let qf = self.qfield(&field);
        let g = f0_energy_grad(self.grid, &qf, &self.ec, &self.mp);
        let per = self.per_node();
        for (n, &id) in self.grid.interior_nodes.iter().enumerate() {
            let gq = &g[id];
            grad[per * n] = gq.q11 - gq.q22;
            grad[per * n + 1] = gq.q12;
            if self.b_free {
                grad[per * n + 2] = -0.5 * (gq.q11 + gq.q22);
            }
        }
    }
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Minimizes `F_0` with unknowns `(p1, p2)` per node, adding the normal
/// eigenvalue `b` as a third unknown when the leading anchoring does not pin
/// it (`alpha0 = 0`). Boundary tensors must have `z` as an eigenvector.
pub fn minimize_f0_full(
    grid: &Grid2d,
    boundary_q: &[QTensor],
    ec: &ElasticConstants,
    mp: &ModelParams,
    cfg: &SolverConfig,
) -> Result<(PField, EnergyBreakdown, SolveReport)> {
    if boundary_q.len() != grid.boundary_loop.len() {
        return Err(Error::Invalid(
            "boundary data does not match the grid boundary".into(),
        ));
    }
    let b_free = mp.anchoring.alpha0 == 0.0;
    let beta = mp.anchoring.beta;
    let mut field = PField::zeros(grid, beta);
    field.b = Some(vec![beta; grid.num_nodes()]);
    for (&id, q) in grid.boundary_loop.iter().zip(boundary_q) {
        let pv = p_from_q(q)?;
        field.p1[id] = pv.p1;
        field.p2[id] = pv.p2;
        field.b.as_mut().unwrap()[id] = pv.beta;
    }
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    for &id in &grid.interior_nodes {
        field.p1[id] += cfg.perturbation * rng.gen_range(-1.0..1.0);
        field.p2[id] += cfg.perturbation * rng.gen_range(-1.0..1.0);
    }

    let obj = F0Objective::new(grid, field.clone(), ec, mp, b_free);
    let mut x = obj.pack(&field);
    let stats = minimize_bb(&obj, &mut x, cfg.tol, cfg.max_iters)?;
    let field = obj.unpack(&x);
    let qf = QField2d::from_pfield(grid, &field);
    let breakdown = f0_energy(grid, &qf, ec, mp)?;

    let report = SolveReport {
        energy: stats.energy,
        iterations: stats.iterations,
        residual: stats.residual,
        converged: stats.converged,
        allen_cahn_residual: None,
        stages: Vec::new(),
        history: stats.history,
    };
    Ok((field, breakdown, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy2d::{potential_w, stability_threshold};
    use crate::surface::AnchoringParams;
    use crate::tensor::q_from_p;

    #[test]
    fn case1_boundary_is_trivial() {
        let grid = Grid2d::new(DomainShape::Disc, 16, 16);
        let bd = boundary_case1(&grid, 0.2);
        assert_eq!(bd.winding(), 0);
        assert!(bd.values.iter().all(|&(a, b)| a == 0.0 && b == 0.0));
        // The tensor datum is Q_beta at every boundary node.
        let qb = q_from_p(&crate::tensor::PVector::new(0.0, 0.0, 0.2));
        for &(v1, v2) in &bd.values {
            let q = q_from_p(&crate::tensor::PVector::new(v1, v2, 0.2));
            assert!(q.sub(&qb).norm() < 1e-15);
        }
    }

    #[test]
    fn case2_boundary_modulus_and_winding() {
        let grid = Grid2d::new(DomainShape::Disc, 24, 24);
        for d in [0i32, 1, 2, 3, -1] {
            let bd = boundary_case2(&grid, d, 0.2);
            for &(v1, v2) in &bd.values {
                let m = (v1 * v1 + v2 * v2).sqrt();
                assert!((m - 0.3).abs() < 1e-12, "modulus {m}");
            }
            assert_eq!(bd.winding(), d, "degree {d}");
        }
        let bd = boundary_case2(&grid, 0, 0.2);
        assert!(bd
            .values
            .iter()
            .all(|&(a, b)| (a + 0.3).abs() < 1e-12 && b.abs() < 1e-12));
    }

    #[test]
    fn case1_convex_regime_returns_trivial_branch() {
        let grid = Grid2d::new(DomainShape::Square, 24, 24);
        let scheme = EdgeScheme::build(&grid);
        let spec = PotentialSpec::new(1.0, 0.3);
        let bd = boundary_case1(&grid, 0.2);
        let cfg = SolverConfig::new(1e-9, 20_000, 7);
        let (field, report) = minimize_reduced(&grid, &scheme, &bd, &spec, &cfg).unwrap();
        assert!(report.converged);
        let sup = grid
            .interior_nodes
            .iter()
            .map(|&id| field.planar_norm_at(id))
            .fold(0.0f64, f64::max);
        assert!(sup <= 1e-6, "sup |p| = {sup}");
        // Energy of the trivial branch: W(0) |Omega| / delta^2.
        let expect = potential_w(0.0, &spec) * grid.area / (spec.delta * spec.delta);
        assert!((report.energy - expect).abs() <= 1e-9 * expect.abs().max(1.0));
    }

    #[test]
    fn case1_unstable_regime_bifurcates() {
        let grid = Grid2d::new(DomainShape::Disc, 32, 32);
        let scheme = EdgeScheme::build(&grid);
        // Threshold eigenvalue well below zero -> nontrivial branch.
        let spec = PotentialSpec::new(-4.56, 0.4);
        let rep = stability_threshold(&grid, &scheme, &spec);
        assert!(rep.threshold < 0.0);
        let bd = boundary_case1(&grid, 0.2);
        let cfg = SolverConfig::new(1e-8, 40_000, 3);
        let (field, report) = minimize_reduced(&grid, &scheme, &bd, &spec, &cfg).unwrap();
        assert!(report.converged);
        let sup = grid
            .interior_nodes
            .iter()
            .map(|&id| field.planar_norm_at(id))
            .fold(0.0f64, f64::max);
        assert!(sup > 0.1, "expected a nontrivial branch, sup |p| = {sup}");
        // Dirichlet ring untouched.
        for &id in &grid.boundary_loop {
            assert_eq!(field.p1[id], 0.0);
            assert_eq!(field.p2[id], 0.0);
        }
        // The converged constant-phase minimizer solves the scalar modulus
        // equation to the solver tolerance (up to the sqrt(2) projection).
        let ac = report.allen_cahn_residual.unwrap();
        assert!(ac <= 10.0 * cfg.tol, "Allen-Cahn residual {ac}");
    }

    #[test]
    fn vortex_core_radius_scales_with_delta() {
        let grid = Grid2d::new(DomainShape::Disc, 192, 192);
        let scheme = EdgeScheme::build(&grid);
        let bd = boundary_case2(&grid, 1, 0.4);
        let mut radii = Vec::new();
        for delta in [0.16, 0.08] {
            let spec = PotentialSpec::new(-4.64, delta);
            let cfg = SolverConfig::new(1e-6, 60_000, 7);
            let (field, report) = minimize_reduced(&grid, &scheme, &bd, &spec, &cfg).unwrap();
            assert!(report.converged);
            let vortices = crate::analysis::find_vortices(&grid, &field);
            assert_eq!(vortices.len(), 1, "one zero expected at delta {delta}");
            assert!(vortices[0].core_radius.is_finite());
            radii.push(vortices[0].core_radius);
        }
        let ratio = radii[0] / radii[1];
        assert!(
            (1.6..=2.4).contains(&ratio),
            "core radii {radii:?} should scale linearly in delta (ratio {ratio})"
        );
    }

    #[test]
    fn f0_full_matches_reduced_when_b_is_pinned() {
        // alpha1 = 0, B = 0, alpha0 > 0 pins b = beta: the full F0 solve and
        // M * (reduced solve) agree up to the boundary-dependent constant
        // (here zero boundary data, zero Jacobian constant).
        let grid = Grid2d::new(DomainShape::Square, 16, 16);
        let scheme = EdgeScheme::build(&grid);
        let anch = AnchoringParams::new(1.0, 0.0, 1.0, 0.0, 0.2).unwrap();
        let mp = ModelParams::new(-1.0, 0.0, 50.0, 0.1, anch).unwrap();
        let ec = ElasticConstants::isotropic();
        let spec = PotentialSpec::from_model(&ec, &mp);

        let bd = boundary_case1(&grid, 0.2);
        let cfg = SolverConfig::new(1e-9, 40_000, 11);
        let (_, rep_reduced) = minimize_reduced(&grid, &scheme, &bd, &spec, &cfg).unwrap();

        let qb = q_from_p(&crate::tensor::PVector::new(0.0, 0.0, 0.2));
        let boundary_q = vec![qb; grid.boundary_loop.len()];
        let (field, breakdown, rep_full) =
            minimize_f0_full(&grid, &boundary_q, &ec, &mp, &cfg).unwrap();
        assert!(rep_full.converged);
        // b frozen at beta.
        for id in 0..grid.num_nodes() {
            assert_eq!(field.b_at(id), 0.2);
        }
        let lhs = breakdown.total;
        let rhs = spec.m * rep_reduced.energy;
        assert!(
            (lhs - rhs).abs() <= 1e-6 * lhs.abs().max(1.0),
            "{lhs} vs {rhs}"
        );
    }

    #[test]
    fn f0_full_b_relaxes_toward_beta_as_alpha1_grows() {
        let grid = Grid2d::new(DomainShape::Square, 12, 12);
        let ec = ElasticConstants::isotropic();
        let cfg = SolverConfig::new(1e-8, 60_000, 5);
        let beta = 0.2;
        let mut sups = Vec::new();
        for alpha1 in [1.0, 10.0, 100.0] {
            let anch = AnchoringParams::new(0.0, alpha1, 1.0, 0.0, beta).unwrap();
            let mp = ModelParams::new(-1.0, 1.0, 20.0, 0.1, anch).unwrap();
            let bd = boundary_case2(&grid, 0, beta);
            let boundary_q: Vec<QTensor> = bd
                .values
                .iter()
                .map(|&(p1, p2)| q_from_p(&crate::tensor::PVector::new(p1, p2, beta)))
                .collect();
            let (field, _, rep) = minimize_f0_full(&grid, &boundary_q, &ec, &mp, &cfg).unwrap();
            assert!(rep.converged);
            let sup = grid
                .interior_nodes
                .iter()
                .map(|&id| (field.b_at(id) - beta).abs())
                .fold(0.0f64, f64::max);
            sups.push(sup);
        }
        assert!(
            sups[0] > sups[1] && sups[1] > sups[2],
            "sup |b - beta| not decreasing: {sups:?}"
        );
    }

    #[test]
    fn rotation_equivariance_of_case2_minimizers() {
        // Rotating the boundary datum is a global phase rotation of the
        // nodal data; minimizer energies agree to solver accuracy.
        let grid = Grid2d::new(DomainShape::Disc, 24, 24);
        let scheme = EdgeScheme::build(&grid);
        let spec = PotentialSpec::new(-4.56, 0.3);
        let cfg = SolverConfig::new(1e-9, 60_000, 13);
        let bd = boundary_case2(&grid, 1, 0.2);
        let (_, rep0) = minimize_reduced(&grid, &scheme, &bd, &spec, &cfg).unwrap();

        let phi: f64 = std::f64::consts::FRAC_PI_3;
        let (c, s) = (phi.cos(), phi.sin());
        let mut rotated = bd.clone();
        for v in rotated.values.iter_mut() {
            *v = (c * v.0 - s * v.1, s * v.0 + c * v.1);
        }
        let (_, rep1) = minimize_reduced(&grid, &scheme, &rotated, &spec, &cfg).unwrap();
        assert!(rep0.converged && rep1.converged);
        assert!(
            (rep0.energy - rep1.energy).abs() <= 1e-8 * rep0.energy.abs().max(1.0),
            "{} vs {}",
            rep0.energy,
            rep1.energy
        );
    }

    #[test]
    fn continuation_ladder_validation() {
        assert!(SolverConfig::new(1e-8, 100, 0)
            .with_continuation(vec![0.4, 0.2, 0.1])
            .is_ok());
        assert!(SolverConfig::new(1e-8, 100, 0)
            .with_continuation(vec![0.2, 0.4])
            .is_err());
    }
}
