//! Minimal 3-vector helpers used by the tensor algebra.

pub type Vec3 = [f64; 3];

pub const X_HAT: Vec3 = [1.0, 0.0, 0.0];
pub const Y_HAT: Vec3 = [0.0, 1.0, 0.0];
pub const Z_HAT: Vec3 = [0.0, 0.0, 1.0];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn normalize(a: Vec3) -> Vec3 {
    let n = norm(a);
    scale(a, 1.0 / n)
}

/// Deterministic unit vector orthogonal to `a` (|a| = 1): cross with the
/// standard basis vector least aligned with `a`.
pub fn any_orthogonal(a: Vec3) -> Vec3 {
    let abs = [a[0].abs(), a[1].abs(), a[2].abs()];
    let e = if abs[0] <= abs[1] && abs[0] <= abs[2] {
        X_HAT
    } else if abs[1] <= abs[2] {
        Y_HAT
    } else {
        Z_HAT
    };
    normalize(cross(a, e))
}
