//! Finite-statistics simulation of the proxy readout: joint detector counts
//! are drawn from the exact number-basis distribution at each oscillator
//! setting, and the parity estimate inherits shot noise through the same
//! inversion the exact readout uses.
//!
//! Reproducibility: one master seed per plan; setting k samples on RNG
//! stream k+1, and bootstrap resampling for setting k runs on stream
//! 2^63 | k, so results are byte-stable for a fixed plan regardless of
//! error model.
//!
//! All count statistics accumulate in f64 — counts stay exact there well
//! past any realistic shot budget — and convert to the working scalar at
//! the boundary.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::fock::CountDistribution;
use crate::homodyne::{
    fock_proxy_output, recover_pair_moment, Prescription, XMeasurement, XSetting, DETECTOR_C,
    DETECTOR_D,
};
use crate::scalar::{Real, C};

/// A complete sampling plan: which prescription to run, how bright the
/// oscillator is, how many shots per setting, and the master seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotPlan<R: Real> {
    prescription: Prescription,
    beta_mag: R,
    shots: u64,
    seed: u64,
}

impl<R: Real> ShotPlan<R> {
    pub fn new(prescription: Prescription, beta_mag: R, shots: u64, seed: u64) -> Result<Self> {
        if !(beta_mag > R::zero()) || !beta_mag.is_finite() {
            return Err(Error::InvalidShotPlan {
                reason: "oscillator magnitude must be finite and positive".into(),
            });
        }
        if shots == 0 {
            return Err(Error::InvalidShotPlan { reason: "need at least one shot per setting".into() });
        }
        Ok(Self { prescription, beta_mag, shots, seed })
    }

    #[inline]
    pub fn prescription(&self) -> Prescription {
        self.prescription
    }

    #[inline]
    pub fn beta_mag(&self) -> R {
        self.beta_mag
    }

    #[inline]
    pub fn shots(&self) -> u64 {
        self.shots
    }

    #[inline]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn settings(&self) -> Vec<XSetting<R>> {
        self.prescription.settings(self.beta_mag)
    }
}

/// How the parity's statistical error is assessed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorModel {
    /// First-order propagation through the inversion formula.
    DeltaMethod,
    /// Resample the empirical count histograms and re-invert.
    Bootstrap { resamples: u32 },
}

impl Default for ErrorModel {
    fn default() -> Self {
        ErrorModel::DeltaMethod
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentOptions {
    /// Ladder size per mode for the underlying number-basis states.
    pub cutoff: usize,
    pub error_model: ErrorModel,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self { cutoff: 40, error_model: ErrorModel::DeltaMethod }
    }
}

/// A sampled mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorResult<R: Real> {
    pub mean: R,
    pub stderr: R,
    pub shots: u64,
}

/// One correlation measurement with sampling uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XEstimate<R: Real> {
    pub setting: XSetting<R>,
    pub result: EstimatorResult<R>,
}

/// The parity estimate, or the diagnosis that this shot budget produced
/// estimates outside the inversion's domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalEstimate<R: Real> {
    Valid { signal: R, stderr: R },
    /// (intensity + 1/2)^2 - |<a%^2>|^2 came out nonpositive; more shots
    /// (or a brighter oscillator) are needed before the inversion exists.
    InvalidShotBudget { radicand: R },
}

impl<R: Real> SignalEstimate<R> {
    pub fn signal(&self) -> Option<R> {
        match *self {
            SignalEstimate::Valid { signal, .. } => Some(signal),
            SignalEstimate::InvalidShotBudget { .. } => None,
        }
    }
}

/// Everything a finite-shot run produces.
#[derive(Debug, Clone)]
pub struct ProxyExperiment<R: Real> {
    pub signal: SignalEstimate<R>,
    /// Point estimate of the squared creation moment <a%^2>.
    pub pair_moment: C<R>,
    /// Signal intensity pooled over every setting.
    pub intensity: EstimatorResult<R>,
    /// Per-setting correlation estimates, in prescription order.
    pub measurements: Vec<XEstimate<R>>,
}

fn sample_flat(weights: &[f64], shots: u64, rng: &mut impl Rng) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0f64;
    for &w in weights {
        acc += w;
        cdf.push(acc);
    }
    let total = *cdf.last().expect("nonempty weights");
    let mut hist = vec![0u64; weights.len()];
    for _ in 0..shots {
        let u = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= u).min(weights.len() - 1);
        hist[idx] += 1;
    }
    hist
}

/// Draws joint detector counts from an (unnormalized) count distribution,
/// returning a histogram with the distribution's shape.
pub fn sample_counts<R: Real>(
    dist: &CountDistribution<R>,
    shots: u64,
    rng: &mut impl Rng,
) -> Result<Array2<u64>> {
    let dim = dist.counts().dim();
    let weights: Vec<f64> =
        dist.counts().iter().map(|w| w.to_f64().unwrap_or(0.0).max(0.0)).collect();
    if !(weights.iter().sum::<f64>() > 0.0) {
        return Err(Error::EmptyDistribution);
    }
    let flat = sample_flat(&weights, shots, rng);
    Ok(Array2::from_shape_vec(dim, flat).expect("histogram matches distribution shape"))
}

/// Per-setting sufficient statistics of x = 4 n_d n_c and s = n_d + n_c.
struct CountStats {
    shots: f64,
    mean_x: f64,
    var_mean_x: f64,
    mean_s: f64,
    var_mean_s: f64,
    cov_means_xs: f64,
}

fn flat_means(flat: &[u64], ncols: usize) -> (f64, f64) {
    let (mut n, mut sx, mut ss) = (0.0f64, 0.0f64, 0.0f64);
    for (idx, &count) in flat.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let c = count as f64;
        let (m, k) = (idx / ncols, idx % ncols);
        n += c;
        sx += c * 4.0 * (m as f64) * (k as f64);
        ss += c * (m + k) as f64;
    }
    (sx / n, ss / n)
}

fn count_stats(hist: &Array2<u64>) -> Option<CountStats> {
    let mut n = 0.0f64;
    let (mut sx, mut sxx, mut ss, mut sss, mut sxs) = (0.0f64, 0.0, 0.0, 0.0, 0.0);
    for ((m, k), &count) in hist.indexed_iter() {
        if count == 0 {
            continue;
        }
        let c = count as f64;
        let x = 4.0 * (m as f64) * (k as f64);
        let s = (m + k) as f64;
        n += c;
        sx += c * x;
        sxx += c * x * x;
        ss += c * s;
        sss += c * s * s;
        sxs += c * x * s;
    }
    if n == 0.0 {
        return None;
    }
    let mean_x = sx / n;
    let mean_s = ss / n;
    if n < 1.5 {
        return Some(CountStats {
            shots: n,
            mean_x,
            var_mean_x: f64::INFINITY,
            mean_s,
            var_mean_s: f64::INFINITY,
            cov_means_xs: 0.0,
        });
    }
    let var_x = (sxx - n * mean_x * mean_x).max(0.0) / (n - 1.0);
    let var_s = (sss - n * mean_s * mean_s).max(0.0) / (n - 1.0);
    let cov_xs = (sxs - n * mean_x * mean_s) / (n - 1.0);
    Some(CountStats {
        shots: n,
        mean_x,
        var_mean_x: var_x / n,
        mean_s,
        var_mean_s: var_s / n,
        cov_means_xs: cov_xs / n,
    })
}

/// Sample mean and standard error of X = 4 n_d n_c over a count histogram.
pub fn estimate_x<R: Real>(hist: &Array2<u64>) -> Result<EstimatorResult<R>> {
    let stats = count_stats(hist).ok_or(Error::NoSamples)?;
    Ok(EstimatorResult {
        mean: R::of(stats.mean_x),
        stderr: R::of(stats.var_mean_x.sqrt()),
        shots: stats.shots as u64,
    })
}

/// Derivatives of Re/Im of the recovered <a%^2> with respect to each
/// setting's X, matching `recover_pair_moment`.
fn recovery_coefficients(prescription: Prescription, beta_mag: f64) -> (Vec<f64>, Vec<f64>) {
    let b2 = beta_mag * beta_mag;
    match prescription {
        Prescription::ThreeMeasurement => {
            let s = 0.5 / b2;
            (vec![s, 0.0, -s], vec![0.0, -s, s])
        }
        Prescription::FourPhase => {
            let s = 0.25 / b2;
            (vec![s, 0.0, -s, 0.0], vec![0.0, -s, 0.0, s])
        }
    }
}

/// The inversion formula itself; Err carries a nonpositive radicand.
fn point_signal(pair_re: f64, pair_im: f64, intensity: f64) -> std::result::Result<f64, f64> {
    let tau = intensity + 0.5;
    let radicand = tau * tau - pair_re * pair_re - pair_im * pair_im;
    if radicand <= 0.0 {
        Err(radicand)
    } else {
        Ok(0.5 / radicand.sqrt())
    }
}

fn delta_method_stderr(
    pair: num_complex::Complex64,
    intensity: f64,
    intensity_var: f64,
    stats: &[CountStats],
    c_re: &[f64],
    c_im: &[f64],
) -> f64 {
    let tau = intensity + 0.5;
    let d = tau * tau - pair.norm_sqr();
    // S = 1/(2 sqrt(D)) with D = tau^2 - Re^2 - Im^2, so
    //   dS/dI = -tau/(2 D^{3/2}),  dS/dRe = Re/(2 D^{3/2}),  dS/dIm likewise
    let scale = 1.0 / (2.0 * d.powf(1.5));
    let g_i = -tau * scale;
    let g_re = pair.re * scale;
    let g_im = pair.im * scale;
    let kf = stats.len() as f64;
    let (mut v_rr, mut v_imim, mut v_rim) = (0.0f64, 0.0, 0.0);
    let (mut cov_i_re, mut cov_i_im) = (0.0f64, 0.0);
    for (k, st) in stats.iter().enumerate() {
        v_rr += c_re[k] * c_re[k] * st.var_mean_x;
        v_imim += c_im[k] * c_im[k] * st.var_mean_x;
        v_rim += c_re[k] * c_im[k] * st.var_mean_x;
        cov_i_re += c_re[k] * st.cov_means_xs / kf;
        cov_i_im += c_im[k] * st.cov_means_xs / kf;
    }
    let var = g_re * g_re * v_rr
        + g_im * g_im * v_imim
        + 2.0 * g_re * g_im * v_rim
        + g_i * g_i * intensity_var
        + 2.0 * g_i * g_re * cov_i_re
        + 2.0 * g_i * g_im * cov_i_im;
    var.max(0.0).sqrt()
}

#[allow(clippy::too_many_arguments)]
fn bootstrap_stderr(
    plan_seed: u64,
    shots: u64,
    resamples: u32,
    prescription: Prescription,
    settings64: &[XSetting<f64>],
    empirical: &[(Vec<f64>, usize)],
    xs64: &[XMeasurement<f64>],
) -> f64 {
    let kf = settings64.len() as f64;
    let mut rngs: Vec<ChaCha12Rng> = (0..settings64.len())
        .map(|k| {
            let mut rng = ChaCha12Rng::seed_from_u64(plan_seed);
            rng.set_stream(0x8000_0000_0000_0000u64 | k as u64);
            rng
        })
        .collect();
    let mut replicas = Vec::with_capacity(resamples as usize);
    let mut xs_star = xs64.to_vec();
    for _ in 0..resamples {
        let mut intensity_star = 0.0f64;
        for (k, (weights, ncols)) in empirical.iter().enumerate() {
            let flat = sample_flat(weights, shots, &mut rngs[k]);
            let (mean_x, mean_s) = flat_means(&flat, *ncols);
            xs_star[k].value = mean_x;
            intensity_star += (mean_s - settings64[k].beta_mag * settings64[k].beta_mag) / kf;
        }
        if let Ok(p_star) = recover_pair_moment(prescription, &xs_star) {
            if let Ok(s_star) = point_signal(p_star.re, p_star.im, intensity_star) {
                replicas.push(s_star);
            }
        }
    }
    if replicas.len() < 2 {
        return f64::INFINITY;
    }
    let nb = replicas.len() as f64;
    let mean = replicas.iter().sum::<f64>() / nb;
    let var = replicas.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nb - 1.0);
    var.sqrt()
}

/// Runs the sampled experiment at nominal probe phase `phi` (biased a
/// quarter turn internally, like the exact readout).
pub fn run_proxy_experiment<R: Real>(
    r: R,
    phi: R,
    plan: &ShotPlan<R>,
    options: &ExperimentOptions,
) -> Result<ProxyExperiment<R>> {
    if let ErrorModel::Bootstrap { resamples } = options.error_model {
        if resamples < 2 {
            return Err(Error::InvalidShotPlan {
                reason: "bootstrap needs at least two resamples".into(),
            });
        }
    }
    let chi = phi + R::FRAC_PI_2();
    let beta64 = plan.beta_mag.to_f64().expect("finite oscillator magnitude");
    let settings64 = plan.prescription.settings::<f64>(beta64);
    let k_count = settings64.len();

    let mut stats: Vec<CountStats> = Vec::with_capacity(k_count);
    let mut empirical: Vec<(Vec<f64>, usize)> = Vec::with_capacity(k_count);
    for (k, s) in plan.settings().iter().enumerate() {
        let state = fock_proxy_output(r, chi, s.theta, s.beta_mag, options.cutoff)?;
        let dist = state.joint_count_distribution(DETECTOR_D, DETECTOR_C)?;
        let mut rng = ChaCha12Rng::seed_from_u64(plan.seed);
        rng.set_stream(k as u64 + 1);
        let hist = sample_counts(&dist, plan.shots, &mut rng)?;
        stats.push(count_stats(&hist).ok_or(Error::NoSamples)?);
        let ncols = hist.dim().1;
        empirical.push((hist.iter().map(|&c| c as f64).collect(), ncols));
    }

    let xs64: Vec<XMeasurement<f64>> = settings64
        .iter()
        .zip(&stats)
        .map(|(s, st)| XMeasurement { theta: s.theta, beta_mag: s.beta_mag, value: st.mean_x })
        .collect();
    let pair = recover_pair_moment(plan.prescription, &xs64)?;
    let kf = k_count as f64;
    let intensity_mean = settings64
        .iter()
        .zip(&stats)
        .map(|(s, st)| st.mean_s - s.beta_mag * s.beta_mag)
        .sum::<f64>()
        / kf;
    let intensity_var = stats.iter().map(|st| st.var_mean_s).sum::<f64>() / (kf * kf);

    let signal = match point_signal(pair.re, pair.im, intensity_mean) {
        Err(radicand) => SignalEstimate::InvalidShotBudget { radicand: R::of(radicand) },
        Ok(s_hat) => {
            let stderr = match options.error_model {
                ErrorModel::DeltaMethod => {
                    let (c_re, c_im) = recovery_coefficients(plan.prescription, beta64);
                    delta_method_stderr(pair, intensity_mean, intensity_var, &stats, &c_re, &c_im)
                }
                ErrorModel::Bootstrap { resamples } => bootstrap_stderr(
                    plan.seed,
                    plan.shots,
                    resamples,
                    plan.prescription,
                    &settings64,
                    &empirical,
                    &xs64,
                ),
            };
            SignalEstimate::Valid { signal: R::of(s_hat), stderr: R::of(stderr) }
        }
    };

    let measurements = plan
        .settings()
        .into_iter()
        .zip(&stats)
        .map(|(setting, st)| XEstimate {
            setting,
            result: EstimatorResult {
                mean: R::of(st.mean_x),
                stderr: R::of(st.var_mean_x.sqrt()),
                shots: st.shots as u64,
            },
        })
        .collect();

    Ok(ProxyExperiment {
        signal,
        pair_moment: C::new(R::of(pair.re), R::of(pair.im)),
        intensity: EstimatorResult {
            mean: R::of(intensity_mean),
            stderr: R::of(intensity_var.sqrt()),
            shots: plan.shots,
        },
        measurements,
    })
}
