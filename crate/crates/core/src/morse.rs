//! The Morse window family: 1-D frequency window, radial state, anisotropic
//! fiducial vector, and the closed-form shape constants that drive every
//! moment and region formula downstream.

use crate::anisotropy::{AnisotropySpec, Vec2};
use crate::specfun::{log_gamma, SpecfunError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MorseError {
    #[error("shape parameters out of range: {0}")]
    Domain(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// Shape parameters (β, γ) with the derived order r = (2β+1)/γ and the
/// eigensystem indices l = β − 1/2, m = γ, c = (2l+2)/m − 1 = r − 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseParams {
    pub beta: f64,
    pub gamma: f64,
    pub r: f64,
    pub l: f64,
    pub m: f64,
    pub c: f64,
}

impl MorseParams {
    /// Requires β, γ > 0, r = (2β+1)/γ > 1 (finite normalization and
    /// eigenvalue order), and β > (γ−1)/2 (admissibility).
    pub fn new(beta: f64, gamma: f64) -> Result<Self, MorseError> {
        if !(beta > 0.0 && gamma > 0.0) {
            return Err(MorseError::Domain(format!(
                "beta and gamma must be positive, got ({beta}, {gamma})"
            )));
        }
        let r = (2.0 * beta + 1.0) / gamma;
        // r > 1 is the same condition as admissibility, beta > (gamma-1)/2.
        if !(r > 1.0) {
            return Err(MorseError::Domain(format!(
                "order r = (2 beta + 1)/gamma = {r} must exceed 1 \
                 (admissibility requires beta > (gamma - 1)/2)"
            )));
        }
        let l = beta - 0.5;
        let m = gamma;
        let c = (2.0 * l + 2.0) / m - 1.0;
        Ok(MorseParams {
            beta,
            gamma,
            r,
            l,
            m,
            c,
        })
    }

    /// Unit-energy 1-D window: 2^{(r+1)/2} sqrt(πγ)/sqrt(Γ(r)) · ω^β e^{−ω^γ}
    /// for ω > 0, identically zero for ω ≤ 0.
    pub fn window_1d(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        // Assembled in log space: β ln ω can be large before the e^{−ω^γ}
        // tail wins.
        let ln_norm = 0.5 * (self.r + 1.0) * std::f64::consts::LN_2
            + 0.5 * (std::f64::consts::PI * self.gamma).ln()
            - 0.5 * log_gamma_cached(self.r);
        (ln_norm + self.beta * omega.ln() - omega.powf(self.gamma)).exp()
    }

    /// Radial state profile V_r(ν) = ν^{(γ−1)/2} window_1d(ν) for ν ≥ 0.
    pub fn radial_state(&self, nu: f64) -> f64 {
        if nu <= 0.0 {
            return 0.0;
        }
        nu.powf(0.5 * (self.gamma - 1.0)) * self.window_1d(nu)
    }

    /// Anisotropic fiducial vector in frequency:
    /// V_H(ω) = |P|^{−1/2} V_r(‖Qᵀω‖).
    pub fn fiducial_freq(&self, spec: &AnisotropySpec, omega: Vec2) -> f64 {
        let nu = spec.nu(omega).norm();
        self.radial_state(nu) / spec.det_p.sqrt()
    }

    /// Peak frequency ω₀ = ((2β+γ−1)/(2γ))^{1/γ}, the stationary point of
    /// ω^{γ−1} |window_1d(ω)|².
    pub fn peak_frequency(&self) -> Result<f64, MorseError> {
        let num = 2.0 * self.beta + self.gamma - 1.0;
        if !(num > 0.0) {
            return Err(MorseError::Domain(format!(
                "peak frequency needs 2 beta + gamma - 1 > 0, got {num}"
            )));
        }
        Ok((num / (2.0 * self.gamma)).powf(1.0 / self.gamma))
    }

    /// The closed-form shape constants, all assembled in log space.
    pub fn constants(&self) -> Result<MorseConstants, MorseError> {
        let g = self.gamma;
        let r = self.r;
        if !(r - 1.0 / g + 2.0 > 0.0) {
            return Err(MorseError::Domain(format!(
                "constants need r - 1/gamma + 2 > 0, got {}",
                r - 1.0 / g + 2.0
            )));
        }
        let ln2 = std::f64::consts::LN_2;
        let lg_r1 = log_gamma(r + 1.0)?;
        let lg_up = log_gamma(r + 1.0 / g + 1.0)?;
        let lg_dn = log_gamma(r - 1.0 / g + 2.0)?;
        let c3 = (lg_up - lg_r1 - ln2 / g).exp();
        let c4 = ((1.0 / g - 2.0) * ln2 + (g + 1.0).ln() + lg_dn - lg_r1).exp();
        let e3 = c3.powf(g - 1.0) / c4;
        let e4 = c3.powf(g);
        let area_scale = (2.0 * (g + 1.0).ln() + 2.0 * lg_dn + 2.0 * lg_up
            - 5.0 * ln2
            - 4.0 * lg_r1
            - g.ln())
        .exp();
        Ok(MorseConstants {
            c3,
            c4,
            e3,
            e4,
            area_scale,
        })
    }
}

fn log_gamma_cached(x: f64) -> f64 {
    // r > 1 always here, so unwrap is safe.
    log_gamma(x).expect("log_gamma positive argument")
}

/// The five shape constants: mean-frequency scale C₃, mean-position scale
/// C₄, the region constants E₃ = C₃^{γ−1}/C₄ and E₄ = C₃^γ, and the
/// hypervolume scale A with hypervolume(C) = A · area(C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseConstants {
    pub c3: f64,
    pub c4: f64,
    pub e3: f64,
    pub e4: f64,
    pub area_scale: f64,
}
