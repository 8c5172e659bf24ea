//! Concentration regions: the index-space disc a² + b² + 1 ≤ 2aC, its
//! image in the (y, ν) half-plane, frequency bounds, and the closed-form
//! area and hypervolume.

use crate::morse::{MorseError, MorseParams};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("concentration level must satisfy C >= 1, got {0}")]
    BadLevel(f64),
    #[error("transformed frequency modulus must be positive, got {0}")]
    BadFrequency(f64),
    #[error(transparent)]
    Morse(#[from] MorseError),
}

/// Concentration level C ≥ 1; C = 1 is the degenerate single-point region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationLevel {
    c: f64,
}

impl ConcentrationLevel {
    pub fn new(c: f64) -> Result<Self, RegionError> {
        if !(c >= 1.0) || !c.is_finite() {
            return Err(RegionError::BadLevel(c));
        }
        Ok(ConcentrationLevel { c })
    }

    pub fn value(self) -> f64 {
        self.c
    }

    /// Scale bounds of the index region: a ∈ [C − sqrt(C²−1), C + sqrt(C²−1)].
    /// The lower bound is computed as 1/(C + sqrt(C²−1)) so the product of
    /// the bounds is exactly 1 in floating point.
    pub fn scale_bounds(self) -> (f64, f64) {
        let hi = self.c + (self.c * self.c - 1.0).sqrt();
        (1.0 / hi, hi)
    }
}

/// Membership in the index region: a² + b² + 1 ≤ 2aC.
pub fn index_region_contains(level: ConcentrationLevel, a: f64, b: f64) -> bool {
    a * a + b * b + 1.0 <= 2.0 * a * level.value()
}

/// Largest shift radius at scale a, sqrt(2aC − 1 − a²); zero outside the
/// scale bounds.
pub fn max_shift_radius(level: ConcentrationLevel, a: f64) -> f64 {
    (2.0 * a * level.value() - 1.0 - a * a).max(0.0).sqrt()
}

/// Extreme transformed wave numbers attained over the region:
/// ν_max = C₃ (C − sqrt(C²−1))^{−1/γ}, ν_min = C₃ (C + sqrt(C²−1))^{−1/γ}.
pub fn nu_bounds(p: &MorseParams, level: ConcentrationLevel) -> Result<(f64, f64), RegionError> {
    let c3 = p.constants()?.c3;
    let (a_lo, a_hi) = level.scale_bounds();
    Ok((
        c3 / a_hi.powf(1.0 / p.gamma),
        c3 / a_lo.powf(1.0 / p.gamma),
    ))
}

/// Closed-form area factor:
/// 2C sqrt(C²−1) + log((C − sqrt(C²−1))/(C + sqrt(C²−1))).
/// Zero at C = 1 and strictly increasing in C.
pub fn area_c(level: ConcentrationLevel) -> f64 {
    let c = level.value();
    let s = (c * c - 1.0).sqrt();
    if s == 0.0 {
        return 0.0;
    }
    2.0 * c * s + ((c - s) / (c + s)).ln()
}

/// Hypervolume of the phase-space region, A(β,γ) · area(C). It equals the
/// weighted area ∫∫ y ν dy dν of the (y, ν) image of the index region.
pub fn hypervolume(p: &MorseParams, level: ConcentrationLevel) -> Result<f64, RegionError> {
    Ok(p.constants()?.area_scale * area_c(level))
}

/// Pull a point of the (y, ν) half-plane back to index coordinates:
/// a = (C₃/ν)^γ, b = C₃^{γ−1} y / (C₄ ν^{γ−1}).
pub fn pullback_index(p: &MorseParams, y: f64, nu: f64) -> Result<(f64, f64), RegionError> {
    if !(nu > 0.0) {
        return Err(RegionError::BadFrequency(nu));
    }
    let k = p.constants()?;
    let a = (k.c3 / nu).powf(p.gamma);
    let b = k.c3.powf(p.gamma - 1.0) * y / (k.c4 * nu.powf(p.gamma - 1.0));
    Ok((a, b))
}

/// Membership of a phase-space point (y ≥ 0, ν > 0) in the region, decided
/// by the index-space pullback (the authoritative definition).
pub fn phase_region_contains(
    p: &MorseParams,
    level: ConcentrationLevel,
    y: f64,
    nu: f64,
) -> Result<bool, RegionError> {
    let (a, b) = pullback_index(p, y, nu)?;
    Ok(index_region_contains(level, a, b))
}

/// Diagnostic companion: evaluates the direct inequality
/// (y ν E₃)² + (ν^γ − C E₄)² ≤ E₄² (C² − 1) and reports whether it agrees
/// with the pullback decision at this point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRegionDiagnostic {
    pub pullback: bool,
    pub direct: bool,
    pub agree: bool,
}

pub fn phase_region_diagnostic(
    p: &MorseParams,
    level: ConcentrationLevel,
    y: f64,
    nu: f64,
) -> Result<PhaseRegionDiagnostic, RegionError> {
    let pullback = phase_region_contains(p, level, y, nu)?;
    let k = p.constants()?;
    let c = level.value();
    let lhs = (y * nu * k.e3).powi(2) + (nu.powf(p.gamma) - c * k.e4).powi(2);
    let direct = lhs <= k.e4 * k.e4 * (c * c - 1.0) + 1e-12 * k.e4 * k.e4;
    Ok(PhaseRegionDiagnostic {
        pullback,
        direct,
        agree: pullback == direct,
    })
}

/// n points on the curved boundary of the (y, ν) image, ordered by
/// increasing ν; the endpoints sit at (y = 0, ν_min) and (y = 0, ν_max).
pub fn region_boundary_samples(
    p: &MorseParams,
    level: ConcentrationLevel,
    n: usize,
) -> Result<Vec<(f64, f64)>, RegionError> {
    if n < 8 {
        return Err(RegionError::BadLevel(n as f64));
    }
    let k = p.constants()?;
    let (a_lo, a_hi) = level.scale_bounds();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // a decreasing => ν = C₃ a^{-1/γ} increasing. The shift radius is
        // exactly zero at the scale extremes.
        let a = a_hi + (a_lo - a_hi) * i as f64 / (n - 1) as f64;
        let b = if i == 0 || i == n - 1 {
            0.0
        } else {
            max_shift_radius(level, a)
        };
        let nu = k.c3 / a.powf(1.0 / p.gamma);
        let y = k.c4 * nu.powf(p.gamma - 1.0) * b / k.c3.powf(p.gamma - 1.0);
        out.push((y, nu));
    }
    Ok(out)
}
