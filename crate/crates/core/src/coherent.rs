//! Coherent-state family generated from the fiducial vector by dilation,
//! transformed rotation, and the generalized spatial shift, plus the
//! closed-form energy and phase-space moments.

use crate::anisotropy::{AnisotropySpec, Vec2};
use crate::morse::{MorseError, MorseParams};
use num_complex::Complex64;

/// Full coherent-state index ξ = (a, θ, b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalIndex {
    pub a: f64,
    pub theta: f64,
    pub b: Vec2,
}

impl LocalIndex {
    /// a > 0 required; θ is normalized into [0, 2π).
    pub fn new(a: f64, theta: f64, b: Vec2) -> Result<Self, MorseError> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(MorseError::Domain(format!("scale a must be positive, got {a}")));
        }
        Ok(LocalIndex {
            a,
            theta: theta.rem_euclid(std::f64::consts::TAU),
            b,
        })
    }

    pub fn unshifted(a: f64) -> Result<Self, MorseError> {
        Self::new(a, 0.0, Vec2::ZERO)
    }
}

/// Radial (direction-averaged) index ξ_I = (a, b) with scalar shift radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialIndex {
    pub a: f64,
    pub b: f64,
}

impl RadialIndex {
    pub fn new(a: f64, b: f64) -> Result<Self, MorseError> {
        if !(a > 0.0) || !(b >= 0.0) {
            return Err(MorseError::Domain(format!(
                "radial index needs a > 0, b >= 0, got ({a}, {b})"
            )));
        }
        Ok(RadialIndex { a, b })
    }
}

/// Generalized spatial shift phase e^{−j bᵀν ν^{γ−1}}; always unimodular.
/// At γ = 1 it is the ordinary shift phase e^{−j bᵀν}.
pub fn generalized_shift_phase(p: &MorseParams, nu: Vec2, b: Vec2) -> Complex64 {
    let n = nu.norm();
    if n == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::cis(-b.dot(nu) * n.powf(p.gamma - 1.0))
}

/// Coherent state in frequency, built compositionally: the fiducial vector
/// is dilated by a^{1/γ}, rotated through the transformed rotation, and
/// given the generalized shift phase at the output frequency. The radial
/// modulus makes the rotation weight-neutral, so the modulus is
/// a^{1/γ} |P|^{−1/2} V_r(a^{1/γ} ‖Qᵀω‖) independent of θ and b.
pub fn coherent_state_freq(
    p: &MorseParams,
    spec: &AnisotropySpec,
    xi: &LocalIndex,
    omega: Vec2,
) -> Complex64 {
    let scale = xi.a.powf(1.0 / p.gamma);
    // Rotation stage: argument map ω ↦ r̃^{-T} ω ahead of the dilation.
    let r_tilde_inv_t = spec
        .transformed_rotation(xi.theta)
        .inverse()
        .expect("transformed rotation is unimodular")
        .transpose();
    let rotated = r_tilde_inv_t.apply(omega).scale(scale);
    let modulus = scale * p.fiducial_freq(spec, rotated);
    generalized_shift_phase(p, spec.nu(omega), xi.b).scale(modulus)
}

/// Direction-averaged coherent state for the radial index, real-valued:
/// a^{1/γ} (a^{1/γ}ν)^{(γ-1)/2} window(a^{1/γ}ν) cos(ν^γ b − π/4)
/// / sqrt(π ν^γ b |P| / 2), with ν = ‖Qᵀω‖.
///
/// The b = 0 limit diverges like 1/sqrt(b); quadratures against the b db
/// measure never place nodes there.
pub fn radial_coherent_state_freq(
    p: &MorseParams,
    spec: &AnisotropySpec,
    xi: &RadialIndex,
    omega: Vec2,
) -> f64 {
    let nu = spec.nu(omega).norm();
    radial_state_profile(p, xi, nu) / spec.det_p.sqrt()
}

/// The |P| = 1 radial profile in the transformed frequency modulus ν.
pub fn radial_state_profile(p: &MorseParams, xi: &RadialIndex, nu: f64) -> f64 {
    if nu <= 0.0 {
        return 0.0;
    }
    let scale = xi.a.powf(1.0 / p.gamma);
    let t = scale * nu;
    let nug = nu.powf(p.gamma);
    let osc = (nug * xi.b - std::f64::consts::FRAC_PI_4).cos()
        / (0.5 * std::f64::consts::PI * nug * xi.b).sqrt();
    scale * t.powf(0.5 * (p.gamma - 1.0)) * p.window_1d(t) * osc
}

/// Squared-norm of any coherent state: ⟨1⟩ = r/2, independent of the index
/// and of the metric (the |P| Jacobians cancel).
pub fn energy(p: &MorseParams, _spec: &AnisotropySpec, _xi: &LocalIndex) -> f64 {
    p.r / 2.0
}

/// Mean transformed frequency ⟨ν⟩ = C₃ a^{−1/γ}.
pub fn mean_frequency(p: &MorseParams, xi: &LocalIndex) -> Result<f64, MorseError> {
    Ok(p.constants()?.c3 * xi.a.powf(-1.0 / p.gamma))
}

/// Mean position in both coordinate systems: ⟨y⟩ = C₄ a^{1/γ−1} b and
/// ⟨x⟩ = Q ⟨y⟩.
pub fn mean_position(
    p: &MorseParams,
    spec: &AnisotropySpec,
    xi: &LocalIndex,
) -> Result<(Vec2, Vec2), MorseError> {
    let c4 = p.constants()?.c4;
    let y = xi.b.scale(c4 * xi.a.powf(1.0 / p.gamma - 1.0));
    Ok((y, spec.q.apply(y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anisotropy::Mat2;
    use crate::quad::GaussLegendre;
    use crate::specfun::log_gamma;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn p83() -> MorseParams {
        MorseParams::new(8.0, 3.0).unwrap()
    }

    /// Printed closed form of the coherent state, coded independently of the
    /// compositional path: e^{−(aν + j νᵀb) ν^{γ−1}} a^{1/γ} 2^{(r+1)/2}
    /// sqrt(πγ) (a^{1/γ}ν)^{(2β+γ−1)/2} / sqrt(|P| Γ(r)).
    fn closed_form(
        p: &MorseParams,
        spec: &AnisotropySpec,
        xi: &LocalIndex,
        omega: Vec2,
    ) -> Complex64 {
        let nu_vec = spec.nu(omega);
        let nu = nu_vec.norm();
        if nu == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let scale = xi.a.powf(1.0 / p.gamma);
        let nug1 = nu.powf(p.gamma - 1.0);
        let amp = scale
            * (0.5 * (p.r + 1.0) * std::f64::consts::LN_2).exp()
            * (std::f64::consts::PI * p.gamma).sqrt()
            * (scale * nu).powf(0.5 * (2.0 * p.beta + p.gamma - 1.0))
            / (spec.det_p * log_gamma(p.r).unwrap().exp()).sqrt();
        let phase = Complex64::new(-xi.a * nu * nug1, -nu_vec.dot(xi.b) * nug1).exp();
        phase * amp
    }

    #[test]
    fn shift_phase_properties() {
        let p = p83();
        let nu = Vec2::new(0.8, -0.3);
        assert_eq!(
            generalized_shift_phase(&p, nu, Vec2::ZERO),
            Complex64::new(1.0, 0.0)
        );
        let b = Vec2::new(1.5, 2.0);
        let ph = generalized_shift_phase(&p, nu, b);
        assert_relative_eq!(ph.norm(), 1.0, max_relative = 1e-15);
        // Unimodular inverse under b -> -b.
        let back = generalized_shift_phase(&p, nu, Vec2::new(-1.5, -2.0));
        assert_relative_eq!((ph * back).re, 1.0, max_relative = 1e-14);
        // γ = 1 reduces to the plain Fourier shift phase.
        let p1 = MorseParams::new(2.0, 1.0).unwrap();
        let plain = Complex64::cis(-b.dot(nu));
        let got = generalized_shift_phase(&p1, nu, b);
        assert_relative_eq!(got.re, plain.re, max_relative = 1e-14);
        assert_relative_eq!(got.im, plain.im, max_relative = 1e-14);
    }

    #[test]
    fn identity_index_reduces_to_fiducial() {
        let p = p83();
        let spec = AnisotropySpec::decompose(Mat2::diag(1.0, 0.25)).unwrap();
        let xi = LocalIndex::unshifted(1.0).unwrap();
        for w in [Vec2::new(0.9, 0.1), Vec2::new(-0.4, 1.2)] {
            let v = coherent_state_freq(&p, &spec, &xi, w);
            assert_relative_eq!(v.re, p.fiducial_freq(&spec, w), max_relative = 1e-13);
            assert!(v.im.abs() < 1e-15);
        }
    }

    #[test]
    fn compositional_path_equals_closed_form() {
        let p = p83();
        let specs = [
            AnisotropySpec::identity(),
            AnisotropySpec::decompose(Mat2::diag(1.0, 0.0225)).unwrap(),
            AnisotropySpec::decompose(Mat2::new(2.0, 1.0, 1.0, 1.0)).unwrap(),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let spec = specs[rng.gen_range(0..specs.len())];
            let xi = LocalIndex::new(
                rng.gen_range(0.3..3.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
                Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            )
            .unwrap();
            let w = Vec2::new(rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5));
            let got = coherent_state_freq(&p, &spec, &xi, w);
            let want = closed_form(&p, &spec, &xi, w);
            let scale = want.norm().max(1e-30);
            assert!(
                (got - want).norm() <= 1e-12 * scale.max(1e-12),
                "xi = {xi:?}, w = {w:?}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn modulus_independent_of_shift_and_angle() {
        let p = p83();
        let spec = AnisotropySpec::decompose(Mat2::diag(1.0, 0.25)).unwrap();
        let w = Vec2::new(1.1, 0.4);
        let reference = coherent_state_freq(
            &p,
            &spec,
            &LocalIndex::unshifted(0.8).unwrap(),
            w,
        )
        .norm();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let xi = LocalIndex::new(
                0.8,
                rng.gen_range(0.0..std::f64::consts::TAU),
                Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
            )
            .unwrap();
            let m = coherent_state_freq(&p, &spec, &xi, w).norm();
            assert_relative_eq!(m, reference, max_relative = 1e-12);
        }
    }

    #[test]
    fn modulus_law_pointwise() {
        // |V_ξ(ω)| = a^{1/γ} |P|^{-1/2} V_r(a^{1/γ} ‖Qᵀω‖).
        let p = p83();
        let spec = AnisotropySpec::decompose(Mat2::new(2.0, 1.0, 1.0, 1.0)).unwrap();
        let xi = LocalIndex::new(1.7, 2.1, Vec2::new(0.5, -0.25)).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let w = Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let scale = xi.a.powf(1.0 / p.gamma);
            let want = scale * p.radial_state(scale * spec.nu(w).norm()) / spec.det_p.sqrt();
            let got = coherent_state_freq(&p, &spec, &xi, w).norm();
            assert!((got - want).abs() <= 1e-12 * want.max(1e-12));
        }
    }

    #[test]
    fn radial_state_zeros_and_rotation_invariance() {
        let p = p83();
        let spec = AnisotropySpec::decompose(Mat2::diag(1.0, 0.25)).unwrap();
        let xi = RadialIndex::new(1.0, 1.3).unwrap();
        // Zeros where ν^γ b = 3π/4 + kπ.
        for k in 0..3 {
            let nug = (0.75 * std::f64::consts::PI + k as f64 * std::f64::consts::PI) / xi.b;
            let nu = nug.powf(1.0 / p.gamma);
            let w = spec.p.transpose().apply(Vec2::new(nu, 0.0));
            assert!(radial_coherent_state_freq(&p, &spec, &xi, w).abs() < 1e-12);
        }
        // Value depends on ν only: rotate ν⃗ within the transformed metric.
        let nu = 1.2;
        let reference = {
            let w = spec.p.transpose().apply(Vec2::new(nu, 0.0));
            radial_coherent_state_freq(&p, &spec, &xi, w)
        };
        for k in 1..16 {
            let t = k as f64 * std::f64::consts::TAU / 16.0;
            let w = spec
                .p
                .transpose()
                .apply(Vec2::new(nu * t.cos(), nu * t.sin()));
            assert_relative_eq!(
                radial_coherent_state_freq(&p, &spec, &xi, w),
                reference,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn radial_state_isotropic_reduction() {
        // spec = I agrees with a direct isotropic evaluation.
        let p = p83();
        let id = AnisotropySpec::identity();
        let xi = RadialIndex::new(0.7, 2.0).unwrap();
        for w in [Vec2::new(1.0, 0.3), Vec2::new(-0.4, 0.9)] {
            let got = radial_coherent_state_freq(&p, &id, &xi, w);
            let want = radial_state_profile(&p, &xi, w.norm());
            assert_relative_eq!(got, want, max_relative = 1e-14);
        }
    }

    /// 2-D quadrature of (1/2π)² ∫ f(ω) d²ω through the transformed polar
    /// map ω = Pᵀ(ν cos φ, ν sin φ), d²ω = |P| ν dν dφ.
    fn quad2d(
        spec: &AnisotropySpec,
        nu_hi: f64,
        n_nu: usize,
        n_phi: usize,
        f: impl Fn(Vec2) -> f64,
    ) -> f64 {
        let rule = GaussLegendre::new(n_nu);
        let dphi = std::f64::consts::TAU / n_phi as f64;
        let mut total = 0.0;
        for (nu, w_nu) in rule.mapped(0.0, nu_hi) {
            let mut ring = 0.0;
            for k in 0..n_phi {
                let t = k as f64 * dphi;
                let omega = spec
                    .p
                    .transpose()
                    .apply(Vec2::new(nu * t.cos(), nu * t.sin()));
                ring += f(omega);
            }
            total += w_nu * nu * ring * dphi;
        }
        total * spec.det_p / (2.0 * std::f64::consts::PI).powi(2)
    }

    #[test]
    fn energy_matches_quadrature_across_specs() {
        let p = p83();
        let specs = [
            AnisotropySpec::identity(),
            AnisotropySpec::decompose(Mat2::diag(1.0, 0.0225)).unwrap(),
        ];
        let xis = [
            LocalIndex::new(1.0, 0.0, Vec2::ZERO).unwrap(),
            LocalIndex::new(0.6, 1.0, Vec2::new(1.0, -0.5)).unwrap(),
        ];
        for spec in &specs {
            for xi in &xis {
                let cut = 4.5 / xi.a.powf(1.0 / p.gamma);
                let quad = quad2d(spec, cut, 220, 16, |w| {
                    coherent_state_freq(&p, spec, xi, w).norm_sqr()
                });
                assert_relative_eq!(quad, energy(&p, spec, xi), max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn mean_frequency_closed_form_vs_quadrature() {
        let p = p83();
        let spec = AnisotropySpec::decompose(Mat2::diag(1.0, 0.25)).unwrap();
        for a in [0.5, 1.0, 2.0] {
            let xi = LocalIndex::new(a, 0.3, Vec2::new(0.4, 0.2)).unwrap();
            let cut = 4.5 / a.powf(1.0 / p.gamma);
            let num = quad2d(&spec, cut, 260, 16, |w| {
                spec.nu(w).norm() * coherent_state_freq(&p, &spec, &xi, w).norm_sqr()
            });
            let got = num / energy(&p, &spec, &xi);
            assert_relative_eq!(got, mean_frequency(&p, &xi).unwrap(), max_relative = 1e-8);
            // Scaling law: ⟨ν⟩ a^{1/γ} constant.
            assert_relative_eq!(
                mean_frequency(&p, &xi).unwrap() * a.powf(1.0 / p.gamma),
                p.constants().unwrap().c3,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn mean_position_closed_form_vs_derivative_oracle() {
        // Frequency-domain moment: ⟨y_l⟩ = Re (1/⟨1⟩)(|P|/(2π)²) ∫ j ∂lnV/∂ν_l |V|² d²ν
        // with the analytic derivative of the closed form; only the imaginary
        // part of ∂lnV contributes.
        let p = p83();
        for (spec, a, b) in [
            (AnisotropySpec::identity(), 1.0, Vec2::new(0.8, -0.6)),
            (
                AnisotropySpec::decompose(Mat2::diag(1.0, 0.25)).unwrap(),
                0.5,
                Vec2::new(-0.3, 0.9),
            ),
            (
                AnisotropySpec::decompose(Mat2::diag(1.0, 0.25)).unwrap(),
                2.0,
                Vec2::new(1.2, 0.4),
            ),
        ] {
            let xi = LocalIndex::new(a, 0.0, b).unwrap();
            let cut = 4.5 / a.powf(1.0 / p.gamma);
            let mut moment = [0.0; 2];
            for (l, m) in moment.iter_mut().enumerate() {
                *m = quad2d(&spec, cut, 260, 48, |w| {
                    let nu_vec = spec.nu(w);
                    let nu = nu_vec.norm();
                    if nu == 0.0 {
                        return 0.0;
                    }
                    let nl = if l == 0 { nu_vec.x } else { nu_vec.y };
                    let bl = if l == 0 { b.x } else { b.y };
                    let d_im = bl * nu.powf(p.gamma - 1.0)
                        + (p.gamma - 1.0) * nu.powf(p.gamma - 2.0) * nu_vec.dot(b) * nl / nu;
                    d_im * coherent_state_freq(&p, &spec, &xi, w).norm_sqr()
                }) / energy(&p, &spec, &xi);
            }
            let (y, x) = mean_position(&p, &spec, &xi).unwrap();
            assert_relative_eq!(moment[0], y.x, max_relative = 1e-6);
            assert_relative_eq!(moment[1], y.y, max_relative = 1e-6);
            // ⟨x⟩ = Q ⟨y⟩.
            let xq = spec.q.apply(Vec2::new(moment[0], moment[1]));
            assert_relative_eq!(xq.x, x.x, max_relative = 1e-6);
            assert_relative_eq!(xq.y, x.y, max_relative = 1e-6);
        }
    }

    #[test]
    fn mean_position_special_cases() {
        let p = p83();
        let spec = AnisotropySpec::identity();
        let xi = LocalIndex::unshifted(1.4).unwrap();
        let (y, x) = mean_position(&p, &spec, &xi).unwrap();
        assert_eq!((y.x, y.y, x.x, x.y), (0.0, 0.0, 0.0, 0.0));
        // γ = 1: ⟨y⟩ = b exactly for every scale.
        let p1 = MorseParams::new(2.0, 1.0).unwrap();
        for a in [0.5, 1.0, 3.0] {
            let xi = LocalIndex::new(a, 0.0, Vec2::new(0.7, -0.2)).unwrap();
            let (y, _) = mean_position(&p1, &spec, &xi).unwrap();
            assert_relative_eq!(y.x, 0.7, max_relative = 1e-13);
            assert_relative_eq!(y.y, -0.2, max_relative = 1e-13);
        }
    }
}
