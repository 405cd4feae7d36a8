//! Single-mode Gaussian states in the Wigner parameterization
//!
//!   W(alpha) = exp(-[u z^2 + u* z*^2 + tau |z|^2] / (tau^2 - 4|u|^2))
//!              / (pi sqrt(tau^2 - 4|u|^2)),        z = alpha - alpha0,
//!
//! with <a> = alpha0, <a%^2> - <a%>^2 = -2u and <a%a> + 1/2 - |<a>|^2 = tau
//! (`%` marks the adjoint). The parity expectation of the mode is read off
//! the origin: <(-1)^N> = (pi/2) W(0,0).

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Validated Wigner parameters (alpha0, u, tau) of a single mode.
///
/// `u` and `tau` describe the centered second moments, so a displaced state
/// keeps the same `u`, `tau` as its undisplaced version.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMoments<R: Real> {
    alpha0: C<R>,
    u: C<R>,
    tau: R,
}

impl<R: Real> GaussianMoments<R> {
    /// Checks the vacuum floor `tau >= 1/2` and the uncertainty bound
    /// `tau^2 - 4|u|^2 >= 1/4`, both up to the scalar's physicality slack.
    pub fn new(alpha0: C<R>, u: C<R>, tau: R) -> Result<Self> {
        let half = R::of(0.5);
        let quarter = R::of(0.25);
        let slack = R::physicality_slack();
        let disc = tau * tau - R::of(4.0) * u.norm_sqr();
        if tau < half - slack || disc < quarter - slack {
            return Err(Error::UnphysicalMoments {
                tau: tau.to_f64().unwrap_or(f64::NAN),
                two_u_mag: (R::of(2.0) * u.norm()).to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { alpha0, u, tau })
    }

    /// Builds the parameters from raw moments <a>, <a^2>, <a%a>.
    pub fn from_raw_moments(a_mean: C<R>, asq_mean: C<R>, n_mean: R) -> Result<Self> {
        let half = R::of(0.5);
        // <a%^2> - <a%>^2 = conj(<a^2>) - conj(<a>)^2 = -2u
        let u = -(asq_mean.conj() - a_mean.conj() * a_mean.conj()) * half;
        let tau = n_mean + half - a_mean.norm_sqr();
        Self::new(a_mean, u, tau)
    }

    pub fn vacuum() -> Self {
        Self { alpha0: C::new(R::zero(), R::zero()), u: C::new(R::zero(), R::zero()), tau: R::of(0.5) }
    }

    #[inline]
    pub fn alpha0(&self) -> C<R> {
        self.alpha0
    }

    #[inline]
    pub fn u(&self) -> C<R> {
        self.u
    }

    #[inline]
    pub fn tau(&self) -> R {
        self.tau
    }

    /// tau^2 - 4|u|^2; equals 1/4 exactly for pure states.
    #[inline]
    pub fn discriminant(&self) -> R {
        self.tau * self.tau - R::of(4.0) * self.u.norm_sqr()
    }

    /// Raw moments (<a>, <a^2>, <a%a>), inverting `from_raw_moments`.
    pub fn raw_moments(&self) -> (C<R>, C<R>, R) {
        let half = R::of(0.5);
        let asq = (-(self.u.conj()) * R::of(2.0)) + self.alpha0 * self.alpha0;
        let n = self.tau - half + self.alpha0.norm_sqr();
        (self.alpha0, asq, n)
    }

    /// Mean photon number <a%a>.
    #[inline]
    pub fn mean_photons(&self) -> R {
        self.tau - R::of(0.5) + self.alpha0.norm_sqr()
    }

    /// Wigner function value at the phase-space point `alpha`.
    ///
    /// Strictly positive for every Gaussian state; integrates to one over the
    /// plane. The denominator cannot degenerate because construction enforces
    /// the uncertainty bound.
    pub fn wigner(&self, alpha: C<R>) -> R {
        let disc = self.discriminant();
        let z = alpha - self.alpha0;
        // u z^2 + u* z*^2 = 2 Re(u z^2), so the exponent is real.
        let q = R::of(2.0) * (self.u * z * z).re + self.tau * z.norm_sqr();
        (-q / disc).exp() / (R::PI() * disc.sqrt())
    }

    /// Wigner function value at the origin.
    #[inline]
    pub fn wigner_at_origin(&self) -> R {
        self.wigner(C::new(R::zero(), R::zero()))
    }

    /// Parity expectation <(-1)^N> = (pi/2) W(0,0).
    ///
    /// Lies in (0, 1] for zero-mean states, with 1 exactly on pure states.
    #[inline]
    pub fn parity(&self) -> R {
        R::of(0.5) * R::PI() * self.wigner_at_origin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_wigner_peak_and_parity() {
        let v = GaussianMoments::<f64>::vacuum();
        assert_relative_eq!(v.wigner_at_origin(), 2.0 / std::f64::consts::PI, epsilon = 1e-15);
        assert_relative_eq!(v.parity(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn coherent_state_keeps_vacuum_noise() {
        let beta = c(1.0, 0.0);
        let m = GaussianMoments::from_raw_moments(beta, beta * beta, 1.0).unwrap();
        assert_eq!(m.u(), c(0.0, 0.0));
        assert_relative_eq!(m.tau(), 0.5, epsilon = 1e-15);
        // displaced vacuum: parity e^{-2|beta|^2}
        assert_relative_eq!(m.parity(), (-2.0f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(m.mean_photons(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn thermal_mode_origin_value() {
        // n = 1 thermal: tau = 1.5, W(0,0) = 1/(1.5 pi)
        let m = GaussianMoments::from_raw_moments(c(0.0, 0.0), c(0.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(m.wigner_at_origin(), 1.0 / (1.5 * std::f64::consts::PI), epsilon = 1e-15);
        // parity of a thermal mode is 1/(2 n + 1)
        assert_relative_eq!(m.parity(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn amplifier_arm_origin_value() {
        // reduced arm of the two-mode squeezed vacuum at r = 1:
        // thermal with n = sinh^2 1, tau = sinh^2 1 + 1/2
        let n = 1.0f64.sinh().powi(2);
        let m = GaussianMoments::from_raw_moments(c(0.0, 0.0), c(0.0, 0.0), n).unwrap();
        assert_relative_eq!(m.tau(), n + 0.5, epsilon = 1e-15);
        assert_relative_eq!(m.wigner_at_origin(), 1.0 / (std::f64::consts::PI * (n + 0.5)), epsilon = 1e-15);
    }

    #[test]
    fn pure_squeezed_mode_has_unit_parity() {
        for &r in &[0.2f64, 0.5, 1.0, 1.7] {
            let (mu, nu) = (r.cosh(), r.sinh());
            // |2u| = cosh r sinh r, tau = sinh^2 r + 1/2: pure by construction
            let u = c(0.0, mu * nu / 2.0);
            let m = GaussianMoments::new(c(0.0, 0.0), u, nu * nu + 0.5).unwrap();
            assert_relative_eq!(m.discriminant(), 0.25, epsilon = 1e-12);
            assert_relative_eq!(m.parity(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn uncertainty_floor_is_enforced() {
        assert!(matches!(
            GaussianMoments::<f64>::new(c(0.0, 0.0), c(0.0, 0.0), 0.3),
            Err(Error::UnphysicalMoments { .. })
        ));
        // tau fine, |u| too large for it
        assert!(matches!(
            GaussianMoments::<f64>::new(c(0.0, 0.0), c(0.4, 0.0), 0.6),
            Err(Error::UnphysicalMoments { .. })
        ));
        // within slack: accepted
        assert!(GaussianMoments::<f64>::new(c(0.0, 0.0), c(0.0, 0.0), 0.5 - 1e-12).is_ok());
    }

    #[test]
    fn raw_moment_round_trip() {
        let m = GaussianMoments::from_raw_moments(c(0.3, -0.4), c(0.5, 0.2), 1.1).unwrap();
        let (a, asq, n) = m.raw_moments();
        let back = GaussianMoments::from_raw_moments(a, asq, n).unwrap();
        assert_relative_eq!((back.u() - m.u()).norm(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(back.tau(), m.tau(), epsilon = 1e-14);
        assert_relative_eq!(asq.re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(n, 1.1, epsilon = 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let v = GaussianMoments::<f32>::vacuum();
        assert!((v.parity() - 1.0).abs() < 1e-6);
    }
}
