//! Analytic eigensystem of the radial localisation operator: Laguerre-type
//! radial eigenfunctions, regularized-incomplete-beta eigenvalues, the
//! anisotropic re-parameterization, and space-domain synthesis grids.

use crate::anisotropy::{AnisotropySpec, Vec2};
use crate::grid::{dft_inverse, fft_freq, FieldGrid, GridData, GridError};
use crate::morse::{MorseError, MorseParams};
use crate::region::{nu_bounds, ConcentrationLevel, RegionError};
use crate::specfun::{laguerre, log_gamma, reg_inc_beta, SpecfunError};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("eigenvalue order requires r > 1, got {0}")]
    BadOrder(f64),
    #[error("grid undersampled: Nyquist π/d = {nyquist:?} must exceed {required:?} per axis; need dx <= {max_dx:.6}, dy <= {max_dy:.6}")]
    Undersampled {
        nyquist: [f64; 2],
        required: [f64; 2],
        max_dx: f64,
        max_dy: f64,
    },
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Everything needed to evaluate one eigenfunction: order n, shape
/// parameters, metric, and concentration level.
#[derive(Debug, Clone, Copy)]
pub struct EigenSpec {
    pub n: u32,
    pub params: MorseParams,
    pub spec: AnisotropySpec,
    pub level: ConcentrationLevel,
}

/// Localisation eigenvalue λ_{n,r}(C) = I_{(C-1)/(C+1)}(n+1, r-1). Always
/// in [0, 1); zero at C = 1 and approaching 1 as C grows.
pub fn eigenvalue(n: u32, r: f64, level: ConcentrationLevel) -> Result<f64, EigenError> {
    if !(r > 1.0) {
        return Err(EigenError::BadOrder(r));
    }
    let c = level.value();
    let x0 = (c - 1.0) / (c + 1.0);
    Ok(reg_inc_beta(x0, n as f64 + 1.0, r - 1.0)?)
}

/// Norming constant of the radial eigenfunction: the prefactor sqrt(2) A_n
/// with A_n² = 2πγ 2^{r-1} Γ(n+1)/Γ(n+r), fixed so the weighted norm
/// (2π)^{-1} ∫ Ψ_n² ν dν equals one, positive at the origin.
fn norming_constant(n: u32, p: &MorseParams) -> Result<f64, EigenError> {
    let ln_a2 = (2.0 * std::f64::consts::PI * p.gamma).ln()
        + (p.r - 1.0) * std::f64::consts::LN_2
        + log_gamma(n as f64 + 1.0)?
        - log_gamma(n as f64 + p.r)?;
    Ok((0.5 * std::f64::consts::LN_2 + 0.5 * ln_a2).exp())
}

/// Radial eigenfunction profile Ψ_n(ν) = sqrt(2) A_n ν^l e^{-ν^m} L_n^c(2ν^m)
/// for ν ≥ 0, with l = β - 1/2, m = γ, c = r - 1.
pub fn radial_eigenfunction(n: u32, p: &MorseParams, nu: f64) -> Result<f64, EigenError> {
    if nu <= 0.0 {
        return Ok(0.0);
    }
    let num = nu.powf(p.m);
    let lag = laguerre(n, p.c, 2.0 * num)?;
    Ok(norming_constant(n, p)? * nu.powf(p.l) * (-num).exp() * lag)
}

/// Anisotropic eigenfunction in frequency: the radial profile evaluated at
/// the transformed modulus, Ψ^{(A)}(ω) = Ψ_n(‖Qᵀω‖). With this convention
/// the space-domain version satisfies ψ_H(x) = |P| ψ_I(P x); its weighted
/// norm is |P|, so divide by |P|^{1/2} where a unit norm is wanted.
pub fn aniso_eigenfunction_freq(eig: &EigenSpec, omega: Vec2) -> Result<f64, EigenError> {
    radial_eigenfunction(eig.n, &eig.params, eig.spec.nu(omega).norm())
}

/// Band edge used for sampling checks: three times the region's maximum
/// transformed wave number, mapped through Pᵀ per axis.
pub fn required_band(eig: &EigenSpec) -> Result<[f64; 2], EigenError> {
    let (_, nu_max) = nu_bounds(&eig.params, eig.level)?;
    let p = &eig.spec.p.m;
    // |ω_l| over the disc ‖Qᵀω‖ <= ν is bounded by ν ‖col_l(P)‖.
    Ok([
        3.0 * nu_max * Vec2::new(p[0][0], p[1][0]).norm(),
        3.0 * nu_max * Vec2::new(p[0][1], p[1][1]).norm(),
    ])
}

/// Eigenfunction sampled on the signed frequency lattice of an (nx, ny,
/// dx, dy) spatial grid, returned in physical (ascending-frequency) order.
pub fn eigenfunction_freq_grid(
    eig: &EigenSpec,
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
) -> Result<FieldGrid, EigenError> {
    check_sampling(eig, dx, dy)?;
    let dw1 = std::f64::consts::TAU / (nx as f64 * dx);
    let dw2 = std::f64::consts::TAU / (ny as f64 * dy);
    let ox = -((nx / 2) as f64) * dw1;
    let oy = -((ny / 2) as f64) * dw2;
    let mut out = FieldGrid::zeros_real(nx, ny, dw1, dw2)?.with_origin(ox, oy);
    let params = eig.clone();
    let values: Vec<f64> = (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let wy = oy + j as f64 * dw2;
            (0..nx).map(move |i| {
                let w = Vec2::new(ox + i as f64 * dw1, wy);
                aniso_eigenfunction_freq(&params, w).unwrap_or(0.0)
            })
        })
        .collect();
    out.data = GridData::Real(values);
    Ok(out)
}

/// Space-domain eigenfunction by inverse discrete Fourier transform of the
/// lattice-sampled frequency profile; the grid is centered on the origin.
pub fn eigenfunction_space_grid(
    eig: &EigenSpec,
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
) -> Result<FieldGrid, EigenError> {
    check_sampling(eig, dx, dy)?;
    let mut shell = FieldGrid::zeros_complex(nx, ny, dx, dy)?
        .with_origin(-((nx / 2) as f64) * dx, -((ny / 2) as f64) * dy);
    // Sample on the unshifted DFT lattice.
    let mut spectrum = vec![Complex64::new(0.0, 0.0); nx * ny];
    spectrum
        .par_chunks_mut(nx)
        .enumerate()
        .for_each(|(j, row)| {
            let wy = fft_freq(j, ny, dy);
            for (i, z) in row.iter_mut().enumerate() {
                let w = Vec2::new(fft_freq(i, nx, dx), wy);
                *z = Complex64::new(aniso_eigenfunction_freq(eig, w).unwrap_or(0.0), 0.0);
            }
        });
    let values = dft_inverse(&spectrum, &shell);
    shell.data = GridData::Complex(values);
    Ok(shell)
}

fn check_sampling(eig: &EigenSpec, dx: f64, dy: f64) -> Result<(), EigenError> {
    let band = required_band(eig)?;
    let nyq = [std::f64::consts::PI / dx, std::f64::consts::PI / dy];
    if nyq[0] < band[0] || nyq[1] < band[1] {
        return Err(EigenError::Undersampled {
            nyquist: nyq,
            required: band,
            max_dx: std::f64::consts::PI / band[0],
            max_dy: std::f64::consts::PI / band[1],
        });
    }
    Ok(())
}
