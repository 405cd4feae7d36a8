//! Simulator of a parity-by-proxy interferometer readout for Gaussian
//! states of light.
//!
//! A two-mode squeezed vacuum feeds a Mach-Zehnder interferometer; the
//! photon-number parity of one output arm — the quantity that carries the
//! phase fringe — is never counted directly. Instead, a bright local
//! oscillator is mixed onto that arm and the correlations between the two
//! balanced detectors are recorded at a few oscillator phases. Those
//! correlations invert exactly to the arm's squared field moment and
//! intensity, which for a zero-mean Gaussian state determine its parity
//! through the origin value of its phase-space quasiprobability.
//!
//! The crate keeps two independent computational routes to every quantity:
//! exact moment propagation through the circuit ([`circuit`], [`gaussian`],
//! [`homodyne`]) and a truncated number-basis evolution ([`fock`]) that
//! knows nothing about Wick pairings. [`montecarlo`] adds finite-shot
//! sampling on top of the number-basis route.
//!
//! Everything is generic over the working scalar (f32 or f64) through the
//! [`scalar::Real`] trait; the `*64`/`*32` aliases at the crate root pick
//! one concretely.
//!
//! ```
//! use parity_proxy::homodyne::{exact_proxy_readout, signal_closed_form, Prescription};
//!
//! let readout = exact_proxy_readout(0.5f64, 0.3, 2.0, Prescription::ThreeMeasurement)?;
//! assert!((readout.signal - signal_closed_form(0.5, 0.3)).abs() < 1e-12);
//! # Ok::<(), parity_proxy::Error>(())
//! ```

pub mod circuit;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod homodyne;
pub mod montecarlo;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Real, C};

/// Double-precision aliases — the default working set.
pub type GaussianMoments64 = gaussian::GaussianMoments<f64>;
pub type BogoliubovTransform64 = circuit::BogoliubovTransform<f64>;
pub type MultiModeMoments64 = circuit::MultiModeMoments<f64>;
pub type CircuitElement64 = circuit::CircuitElement<f64>;
pub type FockVector64 = fock::FockVector<f64>;
pub type ProxyReadout64 = homodyne::ProxyReadout<f64>;
pub type ShotPlan64 = montecarlo::ShotPlan<f64>;
pub type ProxyExperiment64 = montecarlo::ProxyExperiment<f64>;

/// Single-precision aliases, for quick scans where accuracy is secondary.
pub type GaussianMoments32 = gaussian::GaussianMoments<f32>;
pub type BogoliubovTransform32 = circuit::BogoliubovTransform<f32>;
pub type MultiModeMoments32 = circuit::MultiModeMoments<f32>;
pub type CircuitElement32 = circuit::CircuitElement<f32>;
pub type FockVector32 = fock::FockVector<f32>;
pub type ProxyReadout32 = homodyne::ProxyReadout<f32>;
pub type ShotPlan32 = montecarlo::ShotPlan<f32>;
pub type ProxyExperiment32 = montecarlo::ProxyExperiment<f32>;
