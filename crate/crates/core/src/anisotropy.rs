//! Geometric-anisotropy metric H = PᵀP, the transformation matrix P, its
//! inverse Q, and the coordinate machinery of the transformed space
//! y = P x, ν = Qᵀ ω.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnisotropyError {
    #[error("H must be symmetric: |h12 - h21| = {0}")]
    NotSymmetric(f64),
    #[error("H must be strictly positive-definite: offending eigenvalue {0}")]
    NotPositiveDefinite(f64),
    #[error("invalid transformation matrix: {0}")]
    BadTransform(String),
}

/// A point in the plane; used for space x, frequency ω, and their
/// transformed counterparts y = Px, ν = Qᵀω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(s * self.x, s * self.y)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        m: [[1.0, 0.0], [0.0, 1.0]],
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Mat2::new(a, 0.0, 0.0, d)
    }

    /// Counter-clockwise rotation by θ: [[cos, -sin], [sin, cos]].
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn det(self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn transpose(self) -> Mat2 {
        Mat2::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn inverse(self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Mat2::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        ))
    }

    pub fn mul(self, other: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &other.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn apply(self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    /// Eigenvalues of a symmetric 2x2 matrix, ascending.
    pub fn symmetric_eigenvalues(self) -> (f64, f64) {
        let tr = self.m[0][0] + self.m[1][1];
        let det = self.det();
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        (tr / 2.0 - disc, tr / 2.0 + disc)
    }
}

/// The metric H together with its fixed factorization H = PᵀP,
/// Q = P⁻¹, and det P.
///
/// The factor convention is the upper-triangular Cholesky-style one with
/// positive diagonal; any valid factor defines the same metric, a fixed
/// choice keeps results deterministic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisotropySpec {
    pub h: Mat2,
    pub p: Mat2,
    pub q: Mat2,
    pub det_p: f64,
}

impl AnisotropySpec {
    /// The isotropic metric H = I.
    pub fn identity() -> Self {
        AnisotropySpec {
            h: Mat2::IDENTITY,
            p: Mat2::IDENTITY,
            q: Mat2::IDENTITY,
            det_p: 1.0,
        }
    }

    /// Factor a symmetric positive-definite H as PᵀP with P upper
    /// triangular, positive diagonal. Degenerate H is rejected (Q would be
    /// unbounded); study small but nonzero anisotropy ratios instead.
    pub fn decompose(h: Mat2) -> Result<Self, AnisotropyError> {
        let asym = (h.m[0][1] - h.m[1][0]).abs();
        let scale = h.m.iter().flatten().fold(0.0f64, |a, &v| a.max(v.abs()));
        if asym > 1e-14 * scale.max(1.0) {
            return Err(AnisotropyError::NotSymmetric(asym));
        }
        let (lo, _hi) = h.symmetric_eigenvalues();
        if !(lo > 0.0) || !lo.is_finite() {
            return Err(AnisotropyError::NotPositiveDefinite(lo));
        }
        // Upper-triangular factor: P = [[p11, p12], [0, p22]] with
        // p11^2 = h11, p11 p12 = h12, p12^2 + p22^2 = h22.
        let p11 = h.m[0][0].sqrt();
        let p12 = h.m[0][1] / p11;
        let p22sq = h.m[1][1] - p12 * p12;
        if !(p22sq > 0.0) {
            return Err(AnisotropyError::NotPositiveDefinite(p22sq));
        }
        let p = Mat2::new(p11, p12, 0.0, p22sq.sqrt());
        Self::from_transform(p)
    }

    /// Build the spec from an explicit upper-triangular factor P.
    pub fn from_transform(p: Mat2) -> Result<Self, AnisotropyError> {
        if p.m[1][0] != 0.0 {
            return Err(AnisotropyError::BadTransform(format!(
                "P must be upper triangular, got p21 = {}",
                p.m[1][0]
            )));
        }
        if !(p.m[0][0] > 0.0 && p.m[1][1] > 0.0) {
            return Err(AnisotropyError::BadTransform(
                "P must have a strictly positive diagonal".into(),
            ));
        }
        let det_p = p.det();
        let q = p
            .inverse()
            .ok_or_else(|| AnisotropyError::BadTransform("P is singular".into()))?;
        let h = p.transpose().mul(p);
        Ok(AnisotropySpec { h, p, q, det_p })
    }

    /// Transformed coordinates: y = P x, ν = Qᵀ ω.
    pub fn to_transformed(&self, x: Vec2, omega: Vec2) -> (Vec2, Vec2) {
        (self.p.apply(x), self.q.transpose().apply(omega))
    }

    /// Inverse map: x = Q y, ω = Pᵀ ν.
    pub fn from_transformed(&self, y: Vec2, nu: Vec2) -> (Vec2, Vec2) {
        (self.q.apply(y), self.p.transpose().apply(nu))
    }

    /// Transformed frequency ν = Qᵀω.
    pub fn nu(&self, omega: Vec2) -> Vec2 {
        self.q.transpose().apply(omega)
    }

    /// Rotation carried out in the transformed coordinates:
    /// r̃_{-θ,H} = [(Pᵀ r_{-θ} Qᵀ)ᵀ]⁻¹, which simplifies to Q r_{-θ} P.
    pub fn transformed_rotation(&self, theta: f64) -> Mat2 {
        self.q.mul(Mat2::rotation(-theta)).mul(self.p)
    }
}
