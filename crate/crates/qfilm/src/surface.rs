//! Quadratic surface energy of a nematic film and its exact minimization.
//!
//! The bare surface density is
//!
//! ```text
//! f_s(Q, nu) = c1 (Q nu . nu) + c2 Q.Q + c3 (Q nu . nu)^2 + c4 |Q nu|^2
//! ```
//!
//! Minimizing over all symmetric traceless tensors is bounded in exactly five
//! parameter regimes; [`classify_regime`] reproduces those case hypotheses
//! and reports the minimizing family, [`minimizer_samples`] constructs
//! representatives, and [`verify_unbounded`] produces explicit witnesses of
//! divergence in the complement.
//!
//! The weak-anchoring form
//!
//! ```text
//! alpha [(Q nu . nu) - beta]^2 + gamma |(I - nu (x) nu) Q nu|^2
//! ```
//!
//! is the same object up to the additive constant `alpha beta^2` when
//! `c2 = 0`; it vanishes exactly when `nu` is an eigenvector of `Q` with
//! eigenvalue `beta`. Its epsilon-splitting `f_s = f_s0 + eps f_s1` drives
//! the thin-film limit.

use crate::error::{Error, Result};
use crate::tensor::{frobenius, QTensor};
use crate::vec3::{self, Vec3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

/// Coefficients of the bare surface energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl SurfaceCoefficients {
    pub fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        SurfaceCoefficients { c1, c2, c3, c4 }
    }
}

/// Weak-anchoring parameters with the epsilon-splitting
/// `alpha = alpha0 + eps alpha1`, `gamma = gamma0 + eps gamma1`.
/// The splitting must have `alpha0 alpha1 = gamma0 gamma1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnchoringParams {
    pub alpha0: f64,
    pub alpha1: f64,
    pub gamma0: f64,
    pub gamma1: f64,
    pub beta: f64,
}

impl AnchoringParams {
    pub fn new(alpha0: f64, alpha1: f64, gamma0: f64, gamma1: f64, beta: f64) -> Result<Self> {
        if alpha0 < 0.0 || alpha1 < 0.0 || gamma0 < 0.0 || gamma1 < 0.0 {
            return Err(Error::Anchoring(
                "anchoring strengths must be nonnegative".into(),
            ));
        }
        if alpha0 * alpha1 != 0.0 || gamma0 * gamma1 != 0.0 {
            return Err(Error::Anchoring(
                "the splitting requires alpha0*alpha1 = 0 and gamma0*gamma1 = 0".into(),
            ));
        }
        Ok(AnchoringParams {
            alpha0,
            alpha1,
            gamma0,
            gamma1,
            beta,
        })
    }

    pub fn alpha(&self, eps: f64) -> f64 {
        self.alpha0 + eps * self.alpha1
    }

    pub fn gamma(&self, eps: f64) -> f64 {
        self.gamma0 + eps * self.gamma1
    }
}

/// Bare surface energy `c1 (Q nu.nu) + c2 Q.Q + c3 (Q nu.nu)^2 + c4 |Q nu|^2`.
pub fn eval_bare(q: &QTensor, nu: Vec3, c: &SurfaceCoefficients) -> f64 {
    let qn = q.mul_vec(nu);
    let qnn = vec3::dot(qn, nu);
    let qn2 = vec3::dot(qn, qn);
    c.c1 * qnn + c.c2 * frobenius(q, q) + c.c3 * qnn * qnn + c.c4 * qn2
}

/// Anchoring form `alpha [(Q nu.nu) - beta]^2 + gamma |(I - nu nu) Q nu|^2`.
/// Nonnegative; zero exactly when `nu` is an eigenvector with eigenvalue
/// `beta`.
pub fn eval_anchoring(q: &QTensor, nu: Vec3, alpha: f64, beta: f64, gamma: f64) -> f64 {
    let qn = q.mul_vec(nu);
    let qnn = vec3::dot(qn, nu);
    let tang = vec3::sub(qn, vec3::scale(nu, qnn));
    alpha * (qnn - beta) * (qnn - beta) + gamma * vec3::dot(tang, tang)
}

/// Leading-order surface density (weighted by `alpha0`, `gamma0`).
pub fn eval_fs0(q: &QTensor, nu: Vec3, params: &AnchoringParams) -> f64 {
    eval_anchoring(q, nu, params.alpha0, params.beta, params.gamma0)
}

/// First-order surface density (weighted by `alpha1`, `gamma1`).
pub fn eval_fs1(q: &QTensor, nu: Vec3, params: &AnchoringParams) -> f64 {
    eval_anchoring(q, nu, params.alpha1, params.beta, params.gamma1)
}

/// The five bounded regimes of the bare surface energy, or `Unbounded`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegimeKind {
    CaseI,
    CaseII,
    CaseIII,
    CaseIV,
    CaseV,
    Unbounded,
}

/// Classification outcome: regime, case-specific scalars, the dimension of
/// the minimizing family, and the attained minimum value.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub variant: RegimeKind,
    /// Case I: eigenvalue on `nu`, `-c1 / (3 c2 + 2 c3 + 2 c4)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Case III: normal value `sigma = c1 / (c2 - 2 c3)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Case III: eigenvalue of the tangent eigenvector, `c1 / (4 c3 - 2 c2)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangent_eigenvalue: Option<f64>,
    /// Case IV: eigenvalue on `nu`, `-c1 / (2 (c3 + c4))`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal_eigenvalue: Option<f64>,
    /// Case V: constrained normal value `-c1 / (2 c3)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal_value: Option<f64>,
    /// Dimension of the minimizing family inside the 5-dimensional tensor
    /// space (0 = single tensor).
    pub family_dim: u32,
    pub family: String,
    /// Minimum of the bare energy over all symmetric traceless tensors;
    /// absent in the unbounded regime.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_min: Option<f64>,
}

/// Exact case split of the bounded/unbounded classification. Equalities are
/// tested with tolerance `1e-12 * max|c_i|` since user inputs are decimal.
pub fn classify_regime(c: &SurfaceCoefficients) -> RegimeReport {
    let scale = c.c1.abs().max(c.c2.abs()).max(c.c3.abs()).max(c.c4.abs());
    let z = 1e-12 * scale;
    let zero = |x: f64| x.abs() <= z;
    let pos = |x: f64| x > z;

    let s_i = 3.0 * c.c2 + 2.0 * c.c3 + 2.0 * c.c4;
    let s_t = 2.0 * c.c2 + c.c4;

    let mut report = RegimeReport {
        variant: RegimeKind::Unbounded,
        lambda: None,
        sigma: None,
        tangent_eigenvalue: None,
        normal_eigenvalue: None,
        normal_value: None,
        family_dim: 0,
        family: String::new(),
        analytic_min: None,
    };

    if pos(c.c2) && pos(s_t) && pos(s_i) {
        let lambda = -c.c1 / s_i;
        report.variant = RegimeKind::CaseI;
        report.lambda = Some(lambda);
        report.family_dim = 0;
        report.family = "single uniaxial homeotropic tensor (3 lambda / 2)(nu nu - I/3)".into();
        report.analytic_min = Some(-c.c1 * c.c1 / (2.0 * s_i));
    } else if pos(c.c2) && pos(s_t) && zero(s_i) && zero(c.c1) {
        report.variant = RegimeKind::CaseII;
        report.family_dim = 1;
        report.family = "uniaxial homeotropic tensors, arbitrary order parameter".into();
        report.analytic_min = Some(0.0);
    } else if pos(c.c2) && pos(2.0 * c.c3 - c.c2) && zero(s_t) {
        let sigma = c.c1 / (c.c2 - 2.0 * c.c3);
        report.variant = RegimeKind::CaseIII;
        report.sigma = Some(sigma);
        report.tangent_eigenvalue = Some(c.c1 / (4.0 * c.c3 - 2.0 * c.c2));
        report.family_dim = 2;
        report.family =
            "biaxial family with free (q13, q23); (-q23, q13, 0) is a tangent eigenvector".into();
        report.analytic_min = Some(-c.c1 * c.c1 / (2.0 * (2.0 * c.c3 - c.c2)));
    } else if zero(c.c2) && pos(s_t) && pos(c.c3 + c.c4) {
        let mu_nn = -c.c1 / (2.0 * (c.c3 + c.c4));
        report.variant = RegimeKind::CaseIV;
        report.normal_eigenvalue = Some(mu_nn);
        report.family_dim = 2;
        report.family =
            "mu m(x)m + (-nu_eig - mu) n(x)n + nu_eig nu(x)nu, free mu and tangent frame".into();
        report.analytic_min = Some(-c.c1 * c.c1 / (4.0 * (c.c3 + c.c4)));
    } else if zero(c.c2) && zero(c.c4) && pos(c.c3) {
        report.variant = RegimeKind::CaseV;
        report.normal_value = Some(-c.c1 / (2.0 * c.c3));
        report.family_dim = 4;
        report.family = "all tensors with Q nu . nu = -c1 / (2 c3)".into();
        report.analytic_min = Some(-c.c1 * c.c1 / (4.0 * c.c3));
    } else {
        report.family = "unbounded: inf f_s = -infinity".into();
    }
    report
}

/// Deterministic orthonormal tangent frame `(t1, t2)` for `nu`.
fn tangent_frame(nu: Vec3) -> (Vec3, Vec3) {
    let t1 = vec3::any_orthogonal(nu);
    let t2 = vec3::cross(nu, t1);
    (t1, t2)
}

/// Symmetric tensor from its components in the frame `(t1, t2, nu)`:
/// entries are (t1t1, t1t2, t1nu, t2t2, t2nu, nunu).
#[allow(clippy::too_many_arguments)]
fn from_frame(nu: Vec3, a11: f64, a12: f64, a13: f64, a22: f64, a23: f64, a33: f64) -> QTensor {
    let (t1, t2) = tangent_frame(nu);
    let mut m = [[0.0; 3]; 3];
    let basis = [t1, t2, nu];
    let comp = [[a11, a12, a13], [a12, a22, a23], [a13, a23, a33]];
    for a in 0..3 {
        for b in 0..3 {
            for r in 0..3 {
                for s in 0..3 {
                    m[r][s] += comp[a][b] * basis[a][r] * basis[b][s];
                }
            }
        }
    }
    QTensor::from_matrix(&m)
}

/// One element of a minimizing family, flagged when it violates the physical
/// eigenvalue bounds.
#[derive(Debug, Clone, Copy)]
pub struct MinimizerSample {
    pub q: QTensor,
    pub within_eigenvalue_bounds: bool,
}

/// Constructs `count` members of the minimizing family described by a bounded
/// `report`. Free parameters sweep `[-1/2, 1/2]`; random angles and remainders
/// are drawn from `seed` for reproducibility. All samples attain the analytic
/// minimum of the bare energy.
pub fn minimizer_samples(
    report: &RegimeReport,
    nu: Vec3,
    count: usize,
    seed: u64,
) -> Result<Vec<MinimizerSample>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let sweep = |k: usize| -> f64 {
        if count <= 1 {
            0.25
        } else {
            -0.5 + k as f64 / (count as f64 - 1.0)
        }
    };
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let q = match report.variant {
            RegimeKind::CaseI => {
                let lambda = report.lambda.expect("case I carries lambda");
                let s = 1.5 * lambda;
                from_frame(nu, -s / 3.0, 0.0, 0.0, -s / 3.0, 0.0, 2.0 * s / 3.0)
            }
            RegimeKind::CaseII => {
                let s = sweep(k);
                from_frame(nu, -s / 3.0, 0.0, 0.0, -s / 3.0, 0.0, 2.0 * s / 3.0)
            }
            RegimeKind::CaseIII => {
                let sigma = report.sigma.expect("case III carries sigma");
                let q13 = sweep(k);
                let q23 = rng.gen_range(-0.5..0.5);
                from_frame(nu, -0.5 * sigma, 0.0, q13, -0.5 * sigma, q23, sigma)
            }
            RegimeKind::CaseIV => {
                let nn = report
                    .normal_eigenvalue
                    .expect("case IV carries the eigenvalue");
                let mu = sweep(k);
                let phi = rng.gen_range(0.0..std::f64::consts::PI);
                let (cs, sn) = (phi.cos(), phi.sin());
                // mu m(x)m + (-nn - mu) n(x)n + nn nu(x)nu in a rotated
                // tangent frame m = (cs, sn), n = (-sn, cs).
                let other = -nn - mu;
                let a11 = mu * cs * cs + other * sn * sn;
                let a22 = mu * sn * sn + other * cs * cs;
                let a12 = (mu - other) * cs * sn;
                from_frame(nu, a11, a12, 0.0, a22, 0.0, nn)
            }
            RegimeKind::CaseV => {
                let nn = report.normal_value.expect("case V carries the value");
                let a = rng.gen_range(-0.5..0.5);
                let b = rng.gen_range(-0.5..0.5);
                let x1 = rng.gen_range(-0.5..0.5);
                let x2 = rng.gen_range(-0.5..0.5);
                from_frame(nu, a, b, x1, -nn - a, x2, nn)
            }
            RegimeKind::Unbounded => return Err(Error::UnboundedRegime),
        };
        out.push(MinimizerSample {
            q,
            within_eigenvalue_bounds: crate::tensor::check_eigenvalue_bounds(&q).ok,
        });
    }
    Ok(out)
}

const WITNESS_MAX_SCALE: f64 = 1e8;

/// Finds a tensor whose bare energy lies below `target` by scaling along an
/// unbounded direction of the complement regime. Directions tried: the
/// traceless tangential block (`c2 < 0`), a tangential column
/// (`2 c2 + c4 < 0`), and the homeotropic axis (negative or vanishing
/// quadratic coefficient `3 c2 + 2 c3 + 2 c4` with a linear term).
pub fn verify_unbounded(c: &SurfaceCoefficients, nu: Vec3, target: f64) -> Result<QTensor> {
    let report = classify_regime(c);
    if report.variant != RegimeKind::Unbounded {
        return Err(Error::BoundedRegime);
    }

    // Candidate rays Q(t) = t * dir, each with closed-form energy
    // a t^2 + b t; directions expressed in the (t1, t2, nu) frame.
    let dirs = [
        // Traceless 2x2 tangential block: f = 2 c2 t^2.
        from_frame(nu, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0),
        // Tangential column x_t: f = (2 c2 + c4) t^2.
        from_frame(nu, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0),
        // Homeotropic axis: f = c1 t + (3 c2 + 2 c3 + 2 c4)/2 t^2.
        from_frame(nu, -0.5, 0.0, 0.0, -0.5, 0.0, 1.0),
    ];

    for dir in dirs {
        for sign in [1.0, -1.0] {
            let mut t = 1.0;
            while t <= WITNESS_MAX_SCALE {
                let q = dir.scale(sign * t);
                if eval_bare(&q, nu, c) < target {
                    return Ok(q);
                }
                t *= 10.0;
            }
        }
    }
    Err(Error::NoWitnessFound {
        max_scale: WITNESS_MAX_SCALE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{check_eigenvalue_bounds, make_uniaxial, q_from_p, PVector};
    use crate::vec3::Z_HAT;

    fn rand_q(rng: &mut StdRng, range: f64) -> QTensor {
        QTensor::new(
            rng.gen_range(-range..range),
            rng.gen_range(-range..range),
            rng.gen_range(-range..range),
            rng.gen_range(-range..range),
            rng.gen_range(-range..range),
        )
    }

    #[test]
    fn bare_energy_values() {
        let c = SurfaceCoefficients::new(1.0, 1.0, 1.0, 1.0);
        assert_eq!(eval_bare(&QTensor::ZERO, Z_HAT, &c), 0.0);

        let c2only = SurfaceCoefficients::new(0.0, 1.0, 0.0, 0.0);
        let q = make_uniaxial(1.0, Z_HAT).unwrap();
        assert!((eval_bare(&q, Z_HAT, &c2only) - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn case1_minimum_beats_random_probes() {
        let c = SurfaceCoefficients::new(1.0, 1.0, 1.0, 1.0);
        let report = classify_regime(&c);
        assert_eq!(report.variant, RegimeKind::CaseI);
        let lambda = report.lambda.unwrap();
        assert!((lambda + 1.0 / 7.0).abs() < 1e-14);
        let qmin = make_uniaxial(1.5 * lambda, Z_HAT).unwrap();
        let emin = eval_bare(&qmin, Z_HAT, &c);
        assert!((emin - report.analytic_min.unwrap()).abs() < 1e-13);

        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..100_000 {
            let q = rand_q(&mut rng, 2.0);
            assert!(eval_bare(&q, Z_HAT, &c) >= emin - 1e-12);
        }
    }

    #[test]
    fn anchoring_basics() {
        // Zero on the constraint set for any planar pair.
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..100 {
            let q = q_from_p(&PVector::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                0.3,
            ));
            assert!(eval_anchoring(&q, Z_HAT, 1.3, 0.3, 0.7).abs() < 1e-14);
        }
        // Strictly positive once nu is no longer an eigenvector.
        let tilted = make_uniaxial(0.45, vec3::normalize([0.3, 0.1, 1.0])).unwrap();
        assert!(eval_anchoring(&tilted, Z_HAT, 1.0, 0.3, 1.0) > 1e-6);
    }

    #[test]
    fn anchoring_bare_correspondence() {
        // eval_bare with c = (-2 alpha beta, 0, alpha - gamma, gamma) equals
        // eval_anchoring - alpha beta^2.
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..1000 {
            let alpha = rng.gen_range(0.1..3.0);
            let beta = rng.gen_range(-1.0..1.0);
            let gamma = rng.gen_range(0.1..3.0);
            let c = SurfaceCoefficients::new(-2.0 * alpha * beta, 0.0, alpha - gamma, gamma);
            let q = rand_q(&mut rng, 2.0);
            let lhs = eval_bare(&q, Z_HAT, &c);
            let rhs = eval_anchoring(&q, Z_HAT, alpha, beta, gamma) - alpha * beta * beta;
            assert!(
                (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                "{lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn fs_split_sum() {
        let p61 = AnchoringParams::new(1.2, 0.0, 0.8, 0.0, 0.25).unwrap();
        let q = QTensor::new(0.2, -0.1, 0.07, 0.05, -0.3);
        assert_eq!(eval_fs1(&q, Z_HAT, &p61), 0.0);

        let p62 = AnchoringParams::new(0.0, 1.7, 0.9, 0.0, 0.25).unwrap();
        let qn = q.mul_vec(Z_HAT);
        let qnn = qn[2];
        let tang2 = qn[0] * qn[0] + qn[1] * qn[1];
        assert!((eval_fs0(&q, Z_HAT, &p62) - 0.9 * tang2).abs() < 1e-15);
        let d = qnn - 0.25;
        assert!((eval_fs1(&q, Z_HAT, &p62) - 1.7 * d * d).abs() < 1e-15);

        let mut rng = StdRng::seed_from_u64(4);
        let eps = 0.1;
        for _ in 0..500 {
            let q = rand_q(&mut rng, 2.0);
            let split = eval_fs0(&q, Z_HAT, &p62) + eps * eval_fs1(&q, Z_HAT, &p62);
            let direct = eval_anchoring(&q, Z_HAT, p62.alpha(eps), p62.beta, p62.gamma(eps));
            assert!((split - direct).abs() <= 1e-12 * direct.abs().max(1.0));
        }

        assert!(AnchoringParams::new(1.0, 1.0, 0.0, 0.0, 0.1).is_err());
        assert!(AnchoringParams::new(-1.0, 0.0, 0.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn classification_examples() {
        let r = classify_regime(&SurfaceCoefficients::new(0.0, -1.0, 0.0, 0.0));
        assert_eq!(r.variant, RegimeKind::Unbounded);

        let r = classify_regime(&SurfaceCoefficients::new(1.0, 1.0, 2.0, -2.0));
        assert_eq!(r.variant, RegimeKind::CaseIII);
        assert!((r.sigma.unwrap() + 1.0 / 3.0).abs() < 1e-14);
        assert!((r.tangent_eigenvalue.unwrap() - 1.0 / 6.0).abs() < 1e-14);

        let r = classify_regime(&SurfaceCoefficients::new(1.0, 0.0, 1.0, 1.0));
        assert_eq!(r.variant, RegimeKind::CaseIV);
        assert!((r.normal_eigenvalue.unwrap() + 0.25).abs() < 1e-14);

        let r = classify_regime(&SurfaceCoefficients::new(0.5, 0.0, 2.0, 0.0));
        assert_eq!(r.variant, RegimeKind::CaseV);
        assert!((r.normal_value.unwrap() + 0.125).abs() < 1e-14);

        let r = classify_regime(&SurfaceCoefficients::new(0.0, 1.0, -2.5, 1.0));
        assert_eq!(r.variant, RegimeKind::CaseII);
    }

    #[test]
    fn classification_scale_invariance() {
        let mut rng = StdRng::seed_from_u64(6);
        for _ in 0..200 {
            let c = SurfaceCoefficients::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let s = rng.gen_range(0.1..50.0);
            let cs = SurfaceCoefficients::new(s * c.c1, s * c.c2, s * c.c3, s * c.c4);
            let (a, b) = (classify_regime(&c), classify_regime(&cs));
            assert_eq!(a.variant, b.variant);
            // Case scalars are ratios, hence unchanged.
            for (x, y) in [
                (a.lambda, b.lambda),
                (a.sigma, b.sigma),
                (a.tangent_eigenvalue, b.tangent_eigenvalue),
                (a.normal_eigenvalue, b.normal_eigenvalue),
                (a.normal_value, b.normal_value),
            ] {
                match (x, y) {
                    (Some(u), Some(v)) => {
                        assert!((u - v).abs() <= 1e-10 * u.abs().max(1.0))
                    }
                    (None, None) => {}
                    other => panic!("scalar mismatch under scaling: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn samples_attain_the_minimum() {
        let cases = [
            SurfaceCoefficients::new(1.0, 1.0, 1.0, 1.0),
            SurfaceCoefficients::new(0.0, 1.0, -2.5, 1.0),
            SurfaceCoefficients::new(1.0, 1.0, 2.0, -2.0),
            SurfaceCoefficients::new(1.0, 0.0, 1.0, 1.0),
            SurfaceCoefficients::new(0.5, 0.0, 2.0, 0.0),
        ];
        let nus = [Z_HAT, vec3::normalize([1.0, -2.0, 0.5])];
        for c in &cases {
            let report = classify_regime(c);
            for &nu in &nus {
                let samples = minimizer_samples(&report, nu, 9, 123).unwrap();
                let emin = report.analytic_min.unwrap();
                for s in &samples {
                    let e = eval_bare(&s.q, nu, c);
                    assert!(
                        (e - emin).abs() <= 1e-10 * emin.abs().max(1.0),
                        "{:?}: sample energy {e} vs analytic {emin}",
                        report.variant
                    );
                }
            }
        }
    }

    #[test]
    fn case_iii_tangent_eigenvector() {
        let c = SurfaceCoefficients::new(1.0, 1.0, 2.0, -2.0);
        let report = classify_regime(&c);
        let samples = minimizer_samples(&report, Z_HAT, 7, 9).unwrap();
        let lam = report.tangent_eigenvalue.unwrap();
        for s in &samples {
            let v = [-s.q.q23, s.q.q13, 0.0];
            let n = vec3::norm(v);
            if n < 1e-9 {
                continue;
            }
            let qv = s.q.mul_vec(v);
            let resid = vec3::norm(vec3::sub(qv, vec3::scale(v, lam)));
            assert!(resid <= 1e-12 * n.max(1.0), "eigenvector residual {resid}");
        }
    }

    #[test]
    fn case_iv_normal_structure() {
        let c = SurfaceCoefficients::new(1.0, 0.0, 1.0, 1.0);
        let report = classify_regime(&c);
        let samples = minimizer_samples(&report, Z_HAT, 6, 11).unwrap();
        for s in &samples {
            let qz = s.q.mul_vec(Z_HAT);
            assert!((qz[2] + 0.25).abs() < 1e-12);
            assert!(qz[0].abs() < 1e-12 && qz[1].abs() < 1e-12);
        }
    }

    #[test]
    fn case_i_single_tensor_and_flags() {
        let c = SurfaceCoefficients::new(1.0, 1.0, 1.0, 1.0);
        let report = classify_regime(&c);
        let samples = minimizer_samples(&report, Z_HAT, 3, 5).unwrap();
        let expected = make_uniaxial(1.5 * report.lambda.unwrap(), Z_HAT).unwrap();
        for s in &samples {
            assert!(s.q.sub(&expected).norm() < 1e-14);
            assert_eq!(s.within_eigenvalue_bounds, check_eigenvalue_bounds(&s.q).ok);
        }
    }

    #[test]
    fn unbounded_witnesses() {
        let target = -1e6;
        let neg_c2 = SurfaceCoefficients::new(0.0, -1.0, 0.0, 0.0);
        let w = verify_unbounded(&neg_c2, Z_HAT, target).unwrap();
        assert!(eval_bare(&w, Z_HAT, &neg_c2) < target);

        let c = SurfaceCoefficients::new(1.0, 1.0, -10.0, 0.0);
        let w = verify_unbounded(&c, Z_HAT, target).unwrap();
        assert!(eval_bare(&w, Z_HAT, &c) < target);

        assert!(matches!(
            verify_unbounded(&SurfaceCoefficients::new(1.0, 1.0, 1.0, 1.0), Z_HAT, target),
            Err(Error::BoundedRegime)
        ));

        // Degenerate complement tuple: classified unbounded but f_s vanishes
        // identically, so no witness can exist.
        assert!(matches!(
            verify_unbounded(&SurfaceCoefficients::new(0.0, 0.0, 0.0, 0.0), Z_HAT, target),
            Err(Error::NoWitnessFound { .. })
        ));
    }
}
