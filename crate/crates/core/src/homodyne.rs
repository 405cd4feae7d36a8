//! Balanced-detector readout of the interferometer: intensity correlations
//! between the two output ports recover the squared field moment of the
//! signal mode, which together with its mean intensity fixes the
//! photon-number parity of a zero-mean Gaussian state (`%` marks the
//! adjoint).
//!
//! Measured quantities, with b the bright oscillator of magnitude |beta|
//! and phase theta mixed onto the signal at the final splitter:
//! * X(theta, |beta|) = 4 <n_d n_c>, the correlated detector intensities;
//! * Y(theta) = <n_d> - <n_c>, the mean-field (difference) readout;
//! * <n_d> + <n_c> - |beta|^2, the signal intensity.
//!
//! For a zero-mean signal, X(theta, |beta|) = <a%^2 a^2>
//! + |beta|^2 (e^{2 i theta} <a%^2> + c.c.) + |beta|^4, so two bright
//! phases plus a dark run (or four bright phases) invert to <a%^2>.
//!
//! Every routine that drives the interferometer biases the probe phase a
//! quarter turn so the parity sits mid-fringe: the reported signal is
//! 1/sqrt(1 + sinh^2(2r) sin^2 phi) as a function of the nominal phase.

use crate::circuit::{
    build_mzi_circuit, build_proxy_circuit, mzi_passive_elements, proxy_passive_elements,
    MultiModeMoments, MODE_LO, MODE_OUT,
};
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::gaussian::GaussianMoments;
use crate::scalar::{Real, C};

/// Detector wired to the oscillator-side output of the final splitter.
pub const DETECTOR_D: usize = 1;
/// Detector wired to the signal-side output of the final splitter.
pub const DETECTOR_C: usize = 2;

/// How the correlation measurements are scheduled to invert for <a%^2>.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prescription {
    /// Two bright oscillator phases (0, pi/4) plus one dark run.
    ThreeMeasurement,
    /// Four bright phases (0, pi/4, pi/2, -pi/4); the dark term cancels.
    FourPhase,
}

/// Oscillator phase and magnitude for one correlation measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XSetting<R: Real> {
    pub theta: R,
    pub beta_mag: R,
}

/// One completed correlation measurement X(theta, |beta|).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XMeasurement<R: Real> {
    pub theta: R,
    pub beta_mag: R,
    pub value: R,
}

/// One completed difference measurement Y(theta).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YMeasurement<R: Real> {
    pub theta: R,
    pub beta_mag: R,
    pub value: R,
}

impl Prescription {
    /// The canonical measurement schedule at oscillator magnitude `beta_mag`.
    pub fn settings<R: Real>(self, beta_mag: R) -> Vec<XSetting<R>> {
        match self {
            Prescription::ThreeMeasurement => vec![
                XSetting { theta: R::zero(), beta_mag },
                XSetting { theta: R::FRAC_PI_4(), beta_mag },
                XSetting { theta: R::zero(), beta_mag: R::zero() },
            ],
            Prescription::FourPhase => vec![
                XSetting { theta: R::zero(), beta_mag },
                XSetting { theta: R::FRAC_PI_4(), beta_mag },
                XSetting { theta: R::FRAC_PI_2(), beta_mag },
                XSetting { theta: -R::FRAC_PI_4(), beta_mag },
            ],
        }
    }
}

fn setting_tol<R: Real>() -> R {
    R::of(1e-12).max(R::epsilon() * R::of(16.0))
}

fn expect_setting<R: Real>(m: &XMeasurement<R>, theta: R, beta_mag: R, role: &str) -> Result<()> {
    let tol = setting_tol::<R>();
    if (m.theta - theta).abs() > tol || (m.beta_mag - beta_mag).abs() > tol {
        return Err(Error::MismatchedSettings {
            detail: format!(
                "{role} must be taken at theta={theta}, |beta|={beta_mag}; got theta={}, |beta|={}",
                m.theta, m.beta_mag
            ),
        });
    }
    Ok(())
}

/// Normally ordered fourth moment <a%^2 a^2> of a Gaussian state, by Wick
/// pairing of the centered fluctuations.
pub fn gaussian_fourth_moment<R: Real>(g: &GaussianMoments<R>) -> R {
    let alpha = g.alpha0();
    let s = -(g.u().conj() + g.u().conj()); // <da^2> = -2 conj(u)
    let n = g.tau() - R::of(0.5);
    let a2 = alpha.norm_sqr();
    let cross = (alpha.conj() * alpha.conj() * s).re;
    a2 * a2 + (cross + cross) + R::of(4.0) * a2 * n + (n * n + n * n) + s.norm_sqr()
}

/// <n_i n_j> for two distinct modes of a Gaussian state, by Wick pairing.
pub fn correlated_intensity<R: Real>(
    state: &MultiModeMoments<R>,
    mode_a: usize,
    mode_b: usize,
) -> Result<R> {
    let modes = state.num_modes();
    for &m in &[mode_a, mode_b] {
        if m >= modes {
            return Err(Error::ModeOutOfRange { mode: m, modes });
        }
    }
    if mode_a == mode_b {
        return Err(Error::IdenticalModes { mode: mode_a });
    }
    let ai = state.mean(mode_a);
    let aj = state.mean(mode_b);
    let bii = state.b(mode_a, mode_a).re;
    let bjj = state.b(mode_b, mode_b).re;
    let aij = state.a(mode_a, mode_b);
    let bij = state.b(mode_a, mode_b);
    let pair = (ai.conj() * aj.conj() * aij).re;
    let exch = (ai * aj.conj() * bij).re;
    Ok(ai.norm_sqr() * aj.norm_sqr()
        + ai.norm_sqr() * bjj
        + aj.norm_sqr() * bii
        + (pair + pair)
        + (exch + exch)
        + bii * bjj
        + aij.norm_sqr()
        + bij.norm_sqr())
}

/// Difference readout Y(theta) = <n_d> - <n_c> for a signal with first
/// moment `signal_mean` against an oscillator of magnitude `beta_mag`.
pub fn y_measurement<R: Real>(signal_mean: C<R>, theta: R, beta_mag: R) -> YMeasurement<R> {
    let rotated = signal_mean.conj() * C::from_polar(R::one(), theta);
    YMeasurement { theta, beta_mag, value: (beta_mag + beta_mag) * rotated.im }
}

/// Inverts two difference readouts at theta = 0 and theta = pi/2 for the
/// signal's first moment <a>.
pub fn recover_first_moments<R: Real>(
    y_zero: &YMeasurement<R>,
    y_quarter: &YMeasurement<R>,
) -> Result<C<R>> {
    let tol = setting_tol::<R>();
    if y_zero.beta_mag <= R::zero() || y_quarter.beta_mag <= R::zero() {
        return Err(Error::DegenerateLocalOscillator);
    }
    if (y_zero.beta_mag - y_quarter.beta_mag).abs() > tol {
        return Err(Error::MismatchedSettings {
            detail: "difference readouts must share one oscillator magnitude".into(),
        });
    }
    if y_zero.theta.abs() > tol || (y_quarter.theta - R::FRAC_PI_2()).abs() > tol {
        return Err(Error::MismatchedSettings {
            detail: "first-moment recovery needs theta = 0 and theta = pi/2".into(),
        });
    }
    let scale = y_zero.beta_mag + y_zero.beta_mag;
    Ok(C::new(y_quarter.value / scale, -y_zero.value / scale))
}

fn recover_pair_moment_three<R: Real>(xs: &[XMeasurement<R>]) -> Result<C<R>> {
    let [x_inphase, x_quarter, x_dark] = match xs {
        [a, b, c] => [a, b, c],
        _ => {
            return Err(Error::MismatchedSettings {
                detail: format!("three-measurement recovery needs 3 measurements, got {}", xs.len()),
            })
        }
    };
    let beta = x_inphase.beta_mag;
    if beta <= R::zero() {
        return Err(Error::DegenerateLocalOscillator);
    }
    expect_setting(x_inphase, R::zero(), beta, "first measurement")?;
    expect_setting(x_quarter, R::FRAC_PI_4(), beta, "second measurement")?;
    expect_setting(x_dark, x_dark.theta, R::zero(), "dark measurement")?;
    let b2 = beta * beta;
    let b4 = b2 * b2;
    let re = (x_inphase.value - x_dark.value - b4) / (b2 + b2);
    let im = (x_quarter.value - x_dark.value - b4) / (b2 + b2);
    Ok(C::new(re, im).conj())
}

fn recover_pair_moment_four<R: Real>(xs: &[XMeasurement<R>]) -> Result<C<R>> {
    let [x0, xq, xh, xmq] = match xs {
        [a, b, c, d] => [a, b, c, d],
        _ => {
            return Err(Error::MismatchedSettings {
                detail: format!("four-phase recovery needs 4 measurements, got {}", xs.len()),
            })
        }
    };
    let beta = x0.beta_mag;
    if beta <= R::zero() {
        return Err(Error::DegenerateLocalOscillator);
    }
    expect_setting(x0, R::zero(), beta, "first measurement")?;
    expect_setting(xq, R::FRAC_PI_4(), beta, "second measurement")?;
    expect_setting(xh, R::FRAC_PI_2(), beta, "third measurement")?;
    expect_setting(xmq, -R::FRAC_PI_4(), beta, "fourth measurement")?;
    let scale = R::of(4.0) * beta * beta;
    let re = (x0.value - xh.value) / scale;
    let im = (xq.value - xmq.value) / scale;
    Ok(C::new(re, im).conj())
}

/// Inverts a schedule of correlation measurements for the signal's squared
/// creation moment <a%^2>. The measurements must follow the prescription's
/// canonical settings in order.
pub fn recover_pair_moment<R: Real>(
    prescription: Prescription,
    xs: &[XMeasurement<R>],
) -> Result<C<R>> {
    match prescription {
        Prescription::ThreeMeasurement => recover_pair_moment_three(xs),
        Prescription::FourPhase => recover_pair_moment_four(xs),
    }
}

/// Signal intensity from the total detected power: the final splitter
/// conserves photon number, so <n_f> = <n_d> + <n_c> - |beta|^2. A total
/// below the oscillator power (beyond numerical slack) has no consistent
/// reading and is rejected.
pub fn intensity_from_detectors<R: Real>(detector_sum: R, beta_mag: R) -> Result<R> {
    let value = detector_sum - beta_mag * beta_mag;
    let slack = R::physicality_slack() * (R::one() + beta_mag * beta_mag);
    if value < -slack {
        return Err(Error::InconsistentIntensity { value: value.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(value.max(R::zero()))
}

/// Parity of a zero-mean Gaussian signal from its recovered squared
/// creation moment and intensity: 1 / (2 sqrt((n + 1/2)^2 - |<a%^2>|^2)).
pub fn proxy_signal<R: Real>(pair_moment: C<R>, intensity: R) -> Result<R> {
    GaussianMoments::from_raw_moments(C::new(R::zero(), R::zero()), pair_moment.conj(), intensity)
        .map(|g| g.parity())
}

/// Parity of the interferometer output mode read directly off the
/// propagated moments, at the same mid-fringe bias as the proxy readout.
pub fn direct_parity<R: Real>(r: R, phi: R) -> Result<R> {
    let chi = phi + R::FRAC_PI_2();
    Ok(MultiModeMoments::vacuum(3)
        .propagate(&build_mzi_circuit(chi, r))?
        .reduce_mode(MODE_OUT)?
        .parity())
}

/// Mid-fringe-biased parity in closed form: 1/sqrt(1 + sinh^2(2r) sin^2 phi).
pub fn signal_closed_form<R: Real>(r: R, phi: R) -> R {
    let g = (r + r).sinh();
    (R::one() + g * g * phi.sin() * phi.sin()).sqrt().recip()
}

/// Correlation measurement in closed form at raw probe phase `phi` (no
/// bias): X = 2 sinh^4 r + cosh^2 r sinh^2 r sin^2 phi
/// + 2 |beta|^2 cosh r sinh r sin phi cos(2 theta - phi) + |beta|^4.
pub fn closed_form_x<R: Real>(r: R, phi: R, theta: R, beta_mag: R) -> R {
    let mu = r.cosh();
    let nu = r.sinh();
    let b2 = beta_mag * beta_mag;
    let nu2 = nu * nu;
    let cross = mu * nu * phi.sin() * (theta + theta - phi).cos();
    (nu2 * nu2 + nu2 * nu2)
        + mu * mu * nu2 * phi.sin() * phi.sin()
        + (b2 + b2) * cross
        + b2 * b2
}

/// Phase uncertainty at the biased operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityEstimate<R: Real> {
    pub phi: R,
    pub signal: R,
    pub delta_phi: R,
}

/// Error-propagated phase uncertainty of the parity fringe,
/// delta_phi = (1 + g sin^2 phi) / (sqrt(g) |cos phi|) with g = sinh^2(2r).
/// Undefined where the fringe has no slope to first order in the noise
/// (r = 0, or phi at an odd quarter turn).
pub fn phase_sensitivity<R: Real>(r: R, phi: R) -> Result<SensitivityEstimate<R>> {
    let sinh2r = (r + r).sinh();
    let g = sinh2r * sinh2r;
    let cos_abs = phi.cos().abs();
    if g <= R::zero() || cos_abs < R::of(1e-12) {
        return Err(Error::UndefinedSensitivity { phi: phi.to_f64().unwrap_or(f64::NAN) });
    }
    let sin2 = phi.sin() * phi.sin();
    let delta_phi = (R::one() + g * sin2) / (g.sqrt() * cos_abs);
    Ok(SensitivityEstimate { phi, signal: signal_closed_form(r, phi), delta_phi })
}

/// Everything the exact (infinite-statistics) proxy run produces.
#[derive(Debug, Clone)]
pub struct ProxyReadout<R: Real> {
    /// The recovered parity.
    pub signal: R,
    /// The recovered squared creation moment <a%^2> of the signal mode.
    pub pair_moment: C<R>,
    /// The recovered signal intensity, averaged over all settings.
    pub intensity: R,
    /// The correlation measurements, in prescription order.
    pub measurements: Vec<XMeasurement<R>>,
}

/// Runs the full chain exactly at nominal probe phase `phi` (biased a
/// quarter turn internally) and inverts the prescription for the parity.
pub fn exact_proxy_readout<R: Real>(
    r: R,
    phi: R,
    beta_mag: R,
    prescription: Prescription,
) -> Result<ProxyReadout<R>> {
    if beta_mag <= R::zero() {
        return Err(Error::DegenerateLocalOscillator);
    }
    let chi = phi + R::FRAC_PI_2();
    let settings = prescription.settings(beta_mag);
    let mut measurements = Vec::with_capacity(settings.len());
    let mut intensity_acc = R::zero();
    for s in &settings {
        let out = MultiModeMoments::vacuum(3)
            .with_coherent(MODE_LO, C::new(s.beta_mag, R::zero()))?
            .propagate(&build_proxy_circuit(chi, s.theta, r))?;
        let x = R::of(4.0) * correlated_intensity(&out, DETECTOR_D, DETECTOR_C)?;
        let sum = out.raw_mean_photons(DETECTOR_D) + out.raw_mean_photons(DETECTOR_C);
        intensity_acc += intensity_from_detectors(sum, s.beta_mag)?;
        measurements.push(XMeasurement { theta: s.theta, beta_mag: s.beta_mag, value: x });
    }
    let intensity = intensity_acc / R::of(settings.len() as f64);
    let pair_moment = recover_pair_moment(prescription, &measurements)?;
    let signal = proxy_signal(pair_moment, intensity)?;
    Ok(ProxyReadout { signal, pair_moment, intensity, measurements })
}

/// Number-basis replica of the interferometer core at raw probe phase
/// `circuit_phi`: squeezed pair in, passive chain applied gate by gate.
/// The oscillator slot is carried as a trivial one-level ladder.
pub fn fock_interferometer_output<R: Real>(
    r: R,
    circuit_phi: R,
    cutoff: usize,
) -> Result<FockVector<R>> {
    let pair = FockVector::two_mode_squeezed(r, cutoff)?;
    let mut state = pair.tensor(&FockVector::vacuum(&[1]));
    state.swap_modes(MODE_LO, MODE_OUT)?;
    state.apply_elements(&mzi_passive_elements(circuit_phi))?;
    Ok(state)
}

/// Number-basis replica of the full chain at raw probe phase `circuit_phi`
/// and oscillator phase `theta`; all three ladders share `cutoff` levels.
pub fn fock_proxy_output<R: Real>(
    r: R,
    circuit_phi: R,
    theta: R,
    beta_mag: R,
    cutoff: usize,
) -> Result<FockVector<R>> {
    let pair = FockVector::two_mode_squeezed(r, cutoff)?;
    let lo = FockVector::coherent(C::new(beta_mag, R::zero()), cutoff)?;
    let mut state = pair.tensor(&lo);
    state.swap_modes(MODE_LO, MODE_OUT)?;
    state.apply_elements(&proxy_passive_elements(circuit_phi, theta))?;
    Ok(state)
}
