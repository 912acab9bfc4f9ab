//! Symmetric traceless 3x3 tensor algebra.
//!
//! The nematic order parameter is a Q-tensor: a symmetric, traceless 3x3
//! matrix with five independent components. Tracelessness is built into the
//! representation — only `q11, q12, q13, q22, q23` are stored and
//! `q33 = -q11 - q22` is derived, so no operation can violate it.
//!
//! Besides construction (uniaxial/biaxial states) and the usual invariants
//! (`tr Q^2`, `tr Q^3`, Frobenius products), this module provides:
//!
//! * a closed-form trigonometric eigensolver for symmetric 3x3 matrices with
//!   deterministic ordering and sign conventions, so results are reproducible
//!   bit-for-bit across runs;
//! * the biaxiality measure `xi(Q) in [0, 1]`, which vanishes exactly on
//!   uniaxial (and, by convention, isotropic) tensors;
//! * the film-adapted `(p1, p2, beta)` parameterization of tensors that have
//!   the film normal `z` as an eigenvector, and its inverse.
//!
//! Note on symbols: the biaxiality measure is called `xi` here (the same
//! letter is used elsewhere for an elastic length scale, which never appears
//! explicitly in this crate — it is absorbed by non-dimensionalization).

use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

const UNIT_TOL: f64 = 1e-12;

/// Symmetric traceless 3x3 tensor; `q33 = -q11 - q22` is implied.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QTensor {
    pub q11: f64,
    pub q12: f64,
    pub q13: f64,
    pub q22: f64,
    pub q23: f64,
}

impl QTensor {
    pub const ZERO: QTensor = QTensor {
        q11: 0.0,
        q12: 0.0,
        q13: 0.0,
        q22: 0.0,
        q23: 0.0,
    };

    pub fn new(q11: f64, q12: f64, q13: f64, q22: f64, q23: f64) -> Self {
        QTensor {
            q11,
            q12,
            q13,
            q22,
            q23,
        }
    }

    /// Derived component: trace is identically zero.
    pub fn q33(&self) -> f64 {
        -self.q11 - self.q22
    }

    /// Builds a tensor from the upper triangle of a symmetric matrix.
    /// The (3,3) entry is discarded; tracelessness is enforced by the
    /// representation, so the caller must pass a (numerically) traceless
    /// symmetric matrix for a faithful round trip.
    pub fn from_matrix(m: &[[f64; 3]; 3]) -> Self {
        QTensor::new(m[0][0], m[0][1], m[0][2], m[1][1], m[1][2])
    }

    pub fn as_matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.q11, self.q12, self.q13],
            [self.q12, self.q22, self.q23],
            [self.q13, self.q23, self.q33()],
        ]
    }

    /// Matrix-vector product `Q v`.
    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        let m = self.as_matrix();
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn scale(&self, s: f64) -> Self {
        QTensor::new(
            self.q11 * s,
            self.q12 * s,
            self.q13 * s,
            self.q22 * s,
            self.q23 * s,
        )
    }

    pub fn add(&self, other: &QTensor) -> Self {
        QTensor::new(
            self.q11 + other.q11,
            self.q12 + other.q12,
            self.q13 + other.q13,
            self.q22 + other.q22,
            self.q23 + other.q23,
        )
    }

    pub fn sub(&self, other: &QTensor) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn norm(&self) -> f64 {
        tr_q2(self).sqrt()
    }
}

/// Frobenius inner product `A . B = tr(B^T A)`.
pub fn frobenius(a: &QTensor, b: &QTensor) -> f64 {
    a.q11 * b.q11
        + a.q22 * b.q22
        + a.q33() * b.q33()
        + 2.0 * (a.q12 * b.q12 + a.q13 * b.q13 + a.q23 * b.q23)
}

/// `tr(Q^2)`, the squared Frobenius norm.
pub fn tr_q2(q: &QTensor) -> f64 {
    frobenius(q, q)
}

/// `tr(Q^3)`. For a traceless matrix this equals `3 det Q`.
pub fn tr_q3(q: &QTensor) -> f64 {
    let q33 = q.q33();
    let det = q.q11 * (q.q22 * q33 - q.q23 * q.q23) - q.q12 * (q.q12 * q33 - q.q23 * q.q13)
        + q.q13 * (q.q12 * q.q23 - q.q22 * q.q13);
    3.0 * det
}

fn check_unit(v: Vec3) -> Result<()> {
    let n = vec3::norm(v);
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NonUnitVector { norm: n });
    }
    Ok(())
}

/// Uniaxial state `S (n (x) n - I/3)` with director `n` and order parameter `S`.
pub fn make_uniaxial(s: f64, n: Vec3) -> Result<QTensor> {
    check_unit(n)?;
    Ok(QTensor::new(
        s * (n[0] * n[0] - 1.0 / 3.0),
        s * n[0] * n[1],
        s * n[0] * n[2],
        s * (n[1] * n[1] - 1.0 / 3.0),
        s * n[1] * n[2],
    ))
}

/// Biaxial state `S1 (l (x) l - I/3) + S2 (n (x) n - I/3)` for an orthonormal
/// pair `l, n`.
pub fn make_biaxial(s1: f64, s2: f64, l: Vec3, n: Vec3) -> Result<QTensor> {
    check_unit(l)?;
    check_unit(n)?;
    let d = vec3::dot(l, n);
    if d.abs() > UNIT_TOL {
        return Err(Error::NonOrthogonalPair { dot: d });
    }
    let a = make_uniaxial(s1, l)?;
    let b = make_uniaxial(s2, n)?;
    Ok(a.add(&b))
}

/// Eigenvalues (descending) and an orthonormal eigenvector frame.
#[derive(Debug, Clone, Copy)]
pub struct EigenSystem {
    /// `lambda[0] >= lambda[1] >= lambda[2]`, summing to zero.
    pub eigenvalues: [f64; 3],
    /// `frame[i]` is the unit eigenvector for `eigenvalues[i]`.
    pub frame: [Vec3; 3],
}

impl EigenSystem {
    /// Rebuilds `sum_i lambda_i v_i (x) v_i` (diagnostic).
    pub fn reconstruct(&self) -> QTensor {
        let mut m = [[0.0; 3]; 3];
        for k in 0..3 {
            let v = self.frame[k];
            let lam = self.eigenvalues[k];
            for a in 0..3 {
                for b in 0..3 {
                    m[a][b] += lam * v[a] * v[b];
                }
            }
        }
        QTensor::from_matrix(&m)
    }
}

/// First entry with magnitude above threshold is made positive.
fn fix_sign(v: &mut Vec3) {
    for x in v.iter() {
        if x.abs() > 1e-12 {
            if *x < 0.0 {
                *v = vec3::scale(*v, -1.0);
            }
            return;
        }
    }
}

fn lex_less(a: Vec3, b: Vec3) -> bool {
    for k in 0..3 {
        if a[k] < b[k] - 1e-14 {
            return true;
        }
        if a[k] > b[k] + 1e-14 {
            return false;
        }
    }
    false
}

/// Largest-norm column of `(Q - a I)(Q - b I)`, whose columns span the
/// eigenspace complementary to eigenvalues `a` and `b`.
fn projector_column(m: &[[f64; 3]; 3], a: f64, b: f64) -> Vec3 {
    let mut ma = *m;
    let mut mb = *m;
    for k in 0..3 {
        ma[k][k] -= a;
        mb[k][k] -= b;
    }
    let mut best = [0.0; 3];
    let mut best_n = -1.0;
    for col in 0..3 {
        let mut v = [0.0; 3];
        for r in 0..3 {
            for k in 0..3 {
                v[r] += ma[r][k] * mb[k][col];
            }
        }
        let n = vec3::dot(v, v);
        if n > best_n {
            best_n = n;
            best = v;
        }
    }
    best
}

/// Closed-form trigonometric eigensolver for the (traceless, symmetric)
/// Q-tensor. Eigenvalues are returned in descending order; eigenvectors are
/// deterministic: computed from spectral projectors on the better-separated
/// side of the spectrum, orthonormalized, with the first nonzero component of
/// each vector made positive. Exact ties are ordered lexicographically.
pub fn eigensystem(q: &QTensor) -> EigenSystem {
    let scale = q.norm();
    if scale < 1e-300 {
        return EigenSystem {
            eigenvalues: [0.0; 3],
            frame: [vec3::X_HAT, vec3::Y_HAT, vec3::Z_HAT],
        };
    }
    // Work on the normalized tensor; q = tr/3 = 0 by construction.
    let b = q.scale(1.0 / scale);
    let p = (tr_q2(&b) / 6.0).sqrt();
    let bm = b.as_matrix();
    let r = (tr_q3(&b) / 3.0) / (2.0 * p * p * p);
    let phi = if r <= -1.0 {
        std::f64::consts::PI / 3.0
    } else if r >= 1.0 {
        0.0
    } else {
        r.acos() / 3.0
    };
    let l1 = 2.0 * p * phi.cos();
    let l3 = 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let l2 = -l1 - l3;
    let lam = [l1, l2, l3];

    // Eigenvectors: resolve the isolated end of the spectrum first.
    let g12 = lam[0] - lam[1];
    let g23 = lam[1] - lam[2];
    let deg_tol = 1e-7;
    let (mut v_first, mut v_last);
    if g12 >= g23 {
        v_first = vec3::normalize(projector_column(&bm, lam[1], lam[2]));
        if g23 > deg_tol {
            v_last = vec3::normalize(projector_column(&bm, lam[0], lam[1]));
        } else {
            v_last = vec3::any_orthogonal(v_first);
        }
        // Re-orthogonalize the weaker vector against the stronger one.
        let d = vec3::dot(v_last, v_first);
        v_last = vec3::normalize(vec3::sub(v_last, vec3::scale(v_first, d)));
    } else {
        v_last = vec3::normalize(projector_column(&bm, lam[0], lam[1]));
        if g12 > deg_tol {
            v_first = vec3::normalize(projector_column(&bm, lam[1], lam[2]));
        } else {
            v_first = vec3::any_orthogonal(v_last);
        }
        let d = vec3::dot(v_first, v_last);
        v_first = vec3::normalize(vec3::sub(v_first, vec3::scale(v_last, d)));
    }
    let v_mid = vec3::normalize(vec3::cross(v_last, v_first));

    let mut eigenvalues = [lam[0] * scale, lam[1] * scale, lam[2] * scale];
    let mut frame = [v_first, v_mid, v_last];
    for v in frame.iter_mut() {
        fix_sign(v);
    }
    // Deterministic ordering inside (numerically) degenerate pairs.
    let tie = 1e-12 * scale.max(1.0);
    for k in 0..2 {
        if (eigenvalues[k] - eigenvalues[k + 1]).abs() <= tie && lex_less(frame[k + 1], frame[k]) {
            frame.swap(k, k + 1);
            eigenvalues.swap(k, k + 1);
        }
    }
    EigenSystem { eigenvalues, frame }
}

/// Result of the advisory eigenvalue-bound check `lambda_i in [-1/3, 2/3]`.
#[derive(Debug, Clone, Copy)]
pub struct EigenvalueBounds {
    pub ok: bool,
    /// Eigenvalue with the largest excursion outside the admissible interval
    /// (the extreme eigenvalue when all are admissible).
    pub worst_eigenvalue: f64,
}

/// Physical bounds on the eigenvalues. Advisory only: violations are
/// reported, never enforced.
pub fn check_eigenvalue_bounds(q: &QTensor) -> EigenvalueBounds {
    let es = eigensystem(q);
    let mut worst = es.eigenvalues[0];
    let mut worst_exc = f64::NEG_INFINITY;
    for &l in &es.eigenvalues {
        let exc = (l - 2.0 / 3.0).max(-1.0 / 3.0 - l);
        if exc > worst_exc {
            worst_exc = exc;
            worst = l;
        }
    }
    EigenvalueBounds {
        ok: worst_exc <= 1e-12,
        worst_eigenvalue: worst,
    }
}

/// Biaxiality measure `xi in [0, 1]`:
/// `xi^2 = 1 - 6 (tr Q^3)^2 / (tr Q^2)^3`, with `xi = 0` for uniaxial
/// tensors and, by convention, for the isotropic state `Q = 0` (where the
/// expression is undefined).
pub fn biaxiality(q: &QTensor) -> f64 {
    let t2 = tr_q2(q);
    if t2 <= 1e-14 {
        return 0.0;
    }
    let t3 = tr_q3(q);
    let xi2 = 1.0 - 6.0 * t3 * t3 / (t2 * t2 * t2);
    xi2.clamp(0.0, 1.0).sqrt()
}

/// Biaxiality in the film parameterization, as a function of the planar
/// magnitude `p = |(p1, p2)|` and the z-eigenvalue `beta`:
/// `xi^2 = 1 - 27 beta^2 (4p^2 - beta^2)^2 / (4p^2 + 3 beta^2)^3`.
///
/// The right-hand side is the square of the measure (it reproduces
/// `biaxiality(q_from_p(..))`); the degenerate point `p = beta = 0` is 0 by
/// the same isotropic convention.
pub fn biaxiality_p(p: f64, beta: f64) -> f64 {
    let p2 = p * p;
    let den = 4.0 * p2 + 3.0 * beta * beta;
    if den <= 1e-14 {
        return 0.0;
    }
    let num = 4.0 * p2 - beta * beta;
    let xi2 = 1.0 - 27.0 * beta * beta * num * num / (den * den * den);
    xi2.clamp(0.0, 1.0).sqrt()
}

/// Film parameterization of a tensor with `z` as an eigenvector: planar pair
/// `(p1, p2)` and z-eigenvalue `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PVector {
    pub p1: f64,
    pub p2: f64,
    pub beta: f64,
}

impl PVector {
    pub fn new(p1: f64, p2: f64, beta: f64) -> Self {
        PVector { p1, p2, beta }
    }

    pub fn planar_norm(&self) -> f64 {
        (self.p1 * self.p1 + self.p2 * self.p2).sqrt()
    }
}

/// `[[p1 - b/2, p2, 0], [p2, -p1 - b/2, 0], [0, 0, b]]`; `z` is an
/// eigenvector with eigenvalue `beta`.
pub fn q_from_p(pv: &PVector) -> QTensor {
    QTensor::new(
        pv.p1 - 0.5 * pv.beta,
        pv.p2,
        0.0,
        -pv.p1 - 0.5 * pv.beta,
        0.0,
    )
}

/// Inverse of [`q_from_p`]; fails when `z` is not an eigenvector.
pub fn p_from_q(q: &QTensor) -> Result<PVector> {
    let off_axis = (q.q13 * q.q13 + q.q23 * q.q23).sqrt();
    if off_axis > 1e-10 {
        return Err(Error::ZAxisNotEigenvector { off_axis });
    }
    Ok(PVector::new(
        0.5 * (q.q11 - q.q22),
        q.q12,
        q.q33(),
    ))
}

/// Scalar order parameters built from the (descending) eigenvalues:
/// `S1 = 2 lambda_1 + lambda_3`, `S2 = lambda_1 + 2 lambda_3`, and the
/// conventional uniaxial amplitude `S = 3/2 x` (eigenvalue of largest
/// magnitude).
#[derive(Debug, Clone, Copy)]
pub struct OrderParameters {
    pub s: f64,
    pub s1: f64,
    pub s2: f64,
}

pub fn order_parameters(q: &QTensor) -> OrderParameters {
    let es = eigensystem(q);
    let [l1, _, l3] = es.eigenvalues;
    let dominant = if l1.abs() >= l3.abs() { l1 } else { l3 };
    OrderParameters {
        s: 1.5 * dominant,
        s1: 2.0 * l1 + l3,
        s2: l1 + 2.0 * l3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3::{X_HAT, Z_HAT};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rand_q(rng: &mut StdRng) -> QTensor {
        QTensor::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        )
    }

    fn rand_unit(rng: &mut StdRng) -> Vec3 {
        loop {
            let v = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let n = vec3::norm(v);
            if n > 0.1 {
                return vec3::scale(v, 1.0 / n);
            }
        }
    }

    #[test]
    fn uniaxial_construction() {
        let q = make_uniaxial(0.0, Z_HAT).unwrap();
        assert_eq!(q, QTensor::ZERO);

        let q = make_uniaxial(1.0, Z_HAT).unwrap();
        assert!((q.q11 + 1.0 / 3.0).abs() < 1e-15);
        assert!((q.q22 + 1.0 / 3.0).abs() < 1e-15);
        assert!((q.q33() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(q.q12, 0.0);

        // S = 3 beta / 2 with beta = 0.2 reproduces diag(-0.1, -0.1, 0.2).
        let beta = 0.2;
        let q = make_uniaxial(1.5 * beta, Z_HAT).unwrap();
        assert!((q.q11 + 0.1).abs() < 1e-15);
        assert!((q.q33() - 0.2).abs() < 1e-15);
        let qb = q_from_p(&PVector::new(0.0, 0.0, beta));
        assert!(frobenius(&q.sub(&qb), &q.sub(&qb)).sqrt() < 1e-15);

        assert!(make_uniaxial(1.0, [0.0, 0.0, 2.0]).is_err());
    }

    #[test]
    fn biaxial_construction() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rand_unit(&mut rng);
            let s = rng.gen_range(-1.0..1.0);
            let a = make_biaxial(0.0, s, vec3::any_orthogonal(n), n).unwrap();
            let b = make_uniaxial(s, n).unwrap();
            assert!(a.sub(&b).norm() < 1e-14);
        }
        assert_eq!(make_biaxial(0.0, 0.0, X_HAT, Z_HAT).unwrap(), QTensor::ZERO);

        // Direct matrix-arithmetic oracle for S1 = 1, S2 = 2, l = x, n = z.
        let q = make_biaxial(1.0, 2.0, X_HAT, Z_HAT).unwrap();
        let expect = [
            1.0 * (1.0 - 1.0 / 3.0) + 2.0 * (-1.0 / 3.0),
            1.0 * (-1.0 / 3.0) + 2.0 * (-1.0 / 3.0),
            1.0 * (-1.0 / 3.0) + 2.0 * (1.0 - 1.0 / 3.0),
        ];
        assert!((q.q11 - expect[0]).abs() < 1e-15);
        assert!((q.q22 - expect[1]).abs() < 1e-15);
        assert!((q.q33() - expect[2]).abs() < 1e-15);

        // Non-orthogonal pair rejected.
        assert!(make_biaxial(1.0, 1.0, X_HAT, X_HAT).is_err());
    }

    #[test]
    fn traces() {
        assert_eq!(frobenius(&QTensor::ZERO, &make_uniaxial(1.0, Z_HAT).unwrap()), 0.0);
        let q = make_uniaxial(1.0, Z_HAT).unwrap();
        assert!((tr_q2(&q) - 2.0 / 3.0).abs() < 1e-15);
        assert!((tr_q3(&q) - 2.0 / 9.0).abs() < 1e-15);

        // tr Q^3 against an explicit triple product.
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..100 {
            let q = rand_q(&mut rng);
            let m = q.as_matrix();
            let mut t3 = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        t3 += m[i][j] * m[j][k] * m[k][i];
                    }
                }
            }
            assert!((tr_q3(&q) - t3).abs() < 1e-12 * t3.abs().max(1.0));
        }
    }

    #[test]
    fn eigensystem_trivial_cases() {
        let es = eigensystem(&QTensor::ZERO);
        assert_eq!(es.eigenvalues, [0.0; 3]);
        assert_eq!(es.frame, [X_HAT, vec3::Y_HAT, Z_HAT]);

        let es = eigensystem(&make_uniaxial(1.0, Z_HAT).unwrap());
        assert!((es.eigenvalues[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((es.eigenvalues[1] + 1.0 / 3.0).abs() < 1e-14);
        assert!((es.eigenvalues[2] + 1.0 / 3.0).abs() < 1e-14);
        assert!(vec3::cross(es.frame[0], Z_HAT).iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn eigensystem_reconstruction_property() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..10_000 {
            let q = rand_q(&mut rng);
            let es = eigensystem(&q);
            // Trace and ordering.
            let sum: f64 = es.eigenvalues.iter().sum();
            assert!(sum.abs() <= 1e-12 * q.norm().max(1.0));
            assert!(es.eigenvalues[0] >= es.eigenvalues[1] - 1e-13);
            assert!(es.eigenvalues[1] >= es.eigenvalues[2] - 1e-13);
            // Orthonormal frame.
            for a in 0..3 {
                for b in 0..3 {
                    let d = vec3::dot(es.frame[a], es.frame[b]);
                    let target = if a == b { 1.0 } else { 0.0 };
                    assert!(
                        (d - target).abs() < 1e-12,
                        "frame not orthonormal: <{a},{b}> = {d}"
                    );
                }
            }
            // Reconstruction.
            let err = es.reconstruct().sub(&q).norm();
            assert!(
                err <= 1e-10 * q.norm().max(1.0),
                "reconstruction error {err} for {q:?}"
            );
        }
    }

    #[test]
    fn eigensystem_determinism() {
        let q = QTensor::new(0.3, -0.2, 0.11, -0.05, 0.07);
        let a = eigensystem(&q);
        let b = eigensystem(&q);
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.frame, b.frame);
    }

    #[test]
    fn eigenvalue_bounds() {
        assert!(check_eigenvalue_bounds(&QTensor::ZERO).ok);
        assert!(check_eigenvalue_bounds(&make_uniaxial(1.0, Z_HAT).unwrap()).ok);
        let chk = check_eigenvalue_bounds(&make_uniaxial(1.5, Z_HAT).unwrap());
        assert!(!chk.ok);
        assert!((chk.worst_eigenvalue - 1.0).abs() < 1e-12);
    }

    #[test]
    fn biaxiality_uniaxial_is_zero() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let s = rng.gen_range(-0.33..0.66);
            let n = rand_unit(&mut rng);
            let xi = biaxiality(&make_uniaxial(s, n).unwrap());
            assert!(xi < 2e-6, "xi = {xi} for S = {s}");
        }
    }

    #[test]
    fn biaxiality_p_matches_tensor_route() {
        // Maximal biaxiality at 4 p^2 = beta^2.
        assert!((biaxiality_p(0.1, 0.2) - 1.0).abs() < 1e-12);
        let q = q_from_p(&PVector::new(0.1, 0.0, 0.2));
        assert!((biaxiality(&q) - 1.0).abs() < 1e-10);
        // Uniaxial points. The square root amplifies O(1e-16) cancellation
        // error to O(1e-8), so these are tolerance checks, not exact zeros.
        assert!(biaxiality_p(0.0, 0.2) < 1e-7);
        assert!(biaxiality(&q_from_p(&PVector::new(0.0, 0.0, 1.0))) < 1e-7);
        assert_eq!(biaxiality_p(0.0, 0.0), 0.0);

        // Cross-oracle on random p-vectors, including the quoted point.
        // Away from the uniaxial locus |sqrt a - sqrt b| <= |a - b|/(xa + xb),
        // so the two routes agree to 1e-10; near it compare the squares.
        let mut rng = StdRng::seed_from_u64(5);
        let check = |p1: f64, p2: f64, beta: f64| {
            let q = q_from_p(&PVector::new(p1, p2, beta));
            let xa = biaxiality(&q);
            let xb = biaxiality_p((p1 * p1 + p2 * p2).sqrt(), beta);
            if xa + xb >= 1e-5 {
                assert!((xa - xb).abs() < 1e-10, "{xa} vs {xb}");
            } else {
                assert!((xa * xa - xb * xb).abs() < 1e-14);
            }
        };
        check(0.755, 0.0, 0.2);
        for _ in 0..500 {
            check(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
        }

        // The clamp only ever absorbs roundoff: the raw square stays within
        // 1e-12 of [0, 1] on random tensors.
        for _ in 0..5000 {
            let q = rand_q(&mut rng);
            let t2 = tr_q2(&q);
            if t2 <= 1e-14 {
                continue;
            }
            let t3 = tr_q3(&q);
            let xi2 = 1.0 - 6.0 * t3 * t3 / (t2 * t2 * t2);
            assert!((-1e-12..=1.0 + 1e-12).contains(&xi2), "raw xi^2 = {xi2}");
        }
    }

    #[test]
    fn p_roundtrip() {
        let qb = q_from_p(&PVector::new(0.0, 0.0, 0.3));
        assert!((qb.q11 + 0.15).abs() < 1e-15);
        assert!((qb.q33() - 0.3).abs() < 1e-15);
        let planar = q_from_p(&PVector::new(0.4, -0.2, 0.0));
        assert_eq!(planar.q33(), 0.0);

        let mut rng = StdRng::seed_from_u64(19);
        for _ in 0..1000 {
            let pv = PVector::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let back = p_from_q(&q_from_p(&pv)).unwrap();
            assert!((back.p1 - pv.p1).abs() < 1e-14);
            assert!((back.p2 - pv.p2).abs() < 1e-14);
            assert!((back.beta - pv.beta).abs() < 1e-14);
        }

        let bad = QTensor::new(0.1, 0.0, 0.2, -0.1, 0.0);
        match p_from_q(&bad) {
            Err(Error::ZAxisNotEigenvector { off_axis }) => {
                assert!((off_axis - 0.2).abs() < 1e-15)
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn order_parameter_conventions() {
        // With descending eigenvalues, a positive uniaxial state lands on the
        // (S1 = S, S2 = 0) labeling of uniaxiality.
        let q = make_uniaxial(0.5, Z_HAT).unwrap();
        let op = order_parameters(&q);
        assert!((op.s - 0.5).abs() < 1e-12);
        assert!((op.s1 - 0.5).abs() < 1e-12);
        assert!(op.s2.abs() < 1e-12);
    }
}
