//! Error type shared by the whole crate. Payload values are reported as `f64`
//! regardless of the working scalar so the type stays object-safe and cheap.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Moments violate the uncertainty floor `tau^2 - 4|u|^2 >= 1/4` (within
    /// slack) or `tau >= 1/2`, or a derived radicand came out non-positive.
    #[error("unphysical Gaussian moments: tau = {tau}, |2u| = {two_u_mag}")]
    UnphysicalMoments { tau: f64, two_u_mag: f64 },

    #[error("mode {mode} out of range for a {modes}-mode state")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("two-mode element needs distinct modes, got mode {mode} twice")]
    IdenticalModes { mode: usize },

    #[error("mode count mismatch: expected {expected}, got {got}")]
    ModeCountMismatch { expected: usize, got: usize },

    #[error("cannot compose an empty element list")]
    EmptyCircuit,

    #[error("local oscillator amplitude must be positive")]
    DegenerateLocalOscillator,

    /// Measurement set handed to a recovery routine does not form one of the
    /// supported phase prescriptions.
    #[error("measurement settings do not match the prescription: {detail}")]
    MismatchedSettings { detail: String },

    /// Detector sums undershoot the local-oscillator background by more than
    /// the tolerance.
    #[error("detector intensities inconsistent with |beta|^2: residual {value}")]
    InconsistentIntensity { value: f64 },

    /// The fringe derivative vanishes at this phase; no first-order phase
    /// information.
    #[error("phase sensitivity undefined at phi = {phi} (vanishing slope)")]
    UndefinedSensitivity { phi: f64 },

    /// A number-basis constructor would truncate more probability than allowed.
    #[error("cutoff {cutoff} leaves tail mass {tail:.3e} > {tol:.3e}; raise the cutoff")]
    InsufficientCutoff { cutoff: usize, tail: f64, tol: f64 },

    /// A gate pushed amplitude past the truncation edge.
    #[error("norm loss {lost:.3e} exceeds {tol:.3e}; cutoff too small for this circuit")]
    CutoffTooSmall { lost: f64, tol: f64 },

    #[error("two-mode squeezing cannot run in the truncated number basis; prepare it in the input state")]
    NonPassiveElement,

    #[error("count distribution has no probability mass")]
    EmptyDistribution,

    #[error("no samples to estimate from")]
    NoSamples,

    #[error("invalid shot plan: {reason}")]
    InvalidShotPlan { reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
