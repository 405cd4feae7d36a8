//! The cross-route invariant suite behind `validate`: each check compares
//! two independent computations of the same quantity and reports its worst
//! deviation against a pinned tolerance.

use num_complex::Complex64;
use parity_proxy::circuit::{
    build_proxy_circuit, compose, mzi_passive_elements, CircuitElement, MultiModeMoments,
    MODE_LO, MODE_OUT,
};
use parity_proxy::fock::FockVector;
use parity_proxy::homodyne::{
    closed_form_x, correlated_intensity, direct_parity, exact_proxy_readout, phase_sensitivity,
    signal_closed_form, Prescription, DETECTOR_C, DETECTOR_D,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::config::ExperimentConfig;

const PI: f64 = std::f64::consts::PI;

/// Leak allowance for number-basis chains driven at configured gain; the
/// induced parity/intensity bias stays near the leak itself, well inside
/// the 1e-6 agreement tolerances used below.
const ORACLE_BUDGET: f64 = 1e-6;

/// One named check: two routes to the same number, their worst spread, and
/// the spread this suite permits.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub check: &'static str,
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

fn outcome(check: &'static str, max_deviation: f64, tolerance: f64, detail: String) -> CheckOutcome {
    // NaN deviation (an errored route) never passes
    CheckOutcome { check, passed: max_deviation <= tolerance, max_deviation, tolerance, detail }
}

fn errored(check: &'static str, tolerance: f64, error: impl std::fmt::Display) -> CheckOutcome {
    CheckOutcome {
        check,
        passed: false,
        max_deviation: f64::NAN,
        tolerance,
        detail: error.to_string(),
    }
}

fn random_elements(rng: &mut ChaCha12Rng) -> Vec<CircuitElement<f64>> {
    let len = rng.gen_range(1..8);
    (0..len)
        .map(|_| {
            let i = rng.gen_range(0..3);
            let j = (i + rng.gen_range(1..3)) % 3;
            match rng.gen_range(0..3) {
                0 => CircuitElement::BeamSplitter { mode_a: i, mode_b: j },
                1 => CircuitElement::PhaseShift { mode: i, phase: rng.gen_range(-3.2..3.2) },
                _ => CircuitElement::TwoModeSqueezer { mode_a: i, mode_b: j, r: rng.gen_range(0.0..=1.0) },
            }
        })
        .collect()
}

/// S K S^T = K and S Z S% = Z across random compositions.
fn symplectic_form() -> CheckOutcome {
    let mut rng = ChaCha12Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let elements = random_elements(&mut rng);
        match compose(&elements, 3) {
            Ok(t) => worst = worst.max(t.commutation_defect()),
            Err(e) => return errored("symplectic-form", 1e-12, e),
        }
    }
    outcome("symplectic-form", worst, 1e-12, "100 random compositions, gain <= 1".into())
}

/// Origin value of the phase-space quasiprobability vs directly counted
/// parity, across the Gaussian family.
fn origin_identity() -> CheckOutcome {
    let check = "origin-identity";
    let tol = 1e-8;
    let mut worst = 0.0f64;
    let mut run = |state: &FockVector<f64>| -> Result<(), parity_proxy::Error> {
        worst = worst.max(state.wigner_parity_identity(0)?.abs_diff);
        Ok(())
    };
    let result = (|| -> Result<(), parity_proxy::Error> {
        run(&FockVector::vacuum(&[8]))?;
        for beta in [0.5, 1.0, 2.0] {
            run(&FockVector::coherent(Complex64::new(beta, 0.0), 40)?)?;
        }
        for r in [0.3, 0.5, 0.8] {
            run(&FockVector::two_mode_squeezed(r, 40)?)?;
        }
        for r in [0.3, 0.6] {
            let mut split = FockVector::two_mode_squeezed(r, 56)?;
            split.apply_beam_splitter(0, 1)?;
            run(&split)?;
        }
        Ok(())
    })();
    match result {
        Ok(()) => outcome(check, worst, tol, "vacuum, coherent, thermal, squeezed vacuum".into()),
        Err(e) => errored(check, tol, e),
    }
}

/// Interferometer chain in the number basis at the configured gain and
/// ladder size; fails with the library's cutoff diagnostic when the ladder
/// cannot carry the state.
fn number_basis_chain(cfg: &ExperimentConfig, chi: f64) -> Result<FockVector<f64>, parity_proxy::Error> {
    let pair = FockVector::two_mode_squeezed(cfg.r, cfg.cutoff)?.with_tail_tol(ORACLE_BUDGET);
    let mut state = pair.tensor(&FockVector::vacuum(&[1]));
    state.swap_modes(MODE_LO, MODE_OUT)?;
    state.apply_elements(&mzi_passive_elements(chi))?;
    Ok(state)
}

/// Counted parity of the number-basis chain vs the moment route.
fn oracle_agreement(cfg: &ExperimentConfig) -> CheckOutcome {
    let check = "oracle-agreement";
    let tol = 1e-6;
    let mut worst = 0.0f64;
    for k in 0..9 {
        let chi = k as f64 * PI / 8.0;
        let counted = match number_basis_chain(cfg, chi).and_then(|s| s.mode_parity(MODE_OUT)) {
            Ok(p) => p,
            Err(e) => return errored(check, tol, e),
        };
        let direct = match direct_parity(cfg.r, chi - PI / 2.0) {
            Ok(p) => p,
            Err(e) => return errored(check, tol, e),
        };
        worst = worst.max((counted - direct).abs());
    }
    outcome(check, worst, tol, format!("r = {}, cutoff = {}, 9 phases", cfg.r, cfg.cutoff))
}

/// Both measurement schedules must invert to the same signal.
fn prescription_equivalence(cfg: &ExperimentConfig) -> CheckOutcome {
    let check = "prescription-equivalence";
    let tol = 1e-12;
    let mut worst = 0.0f64;
    for k in 0..33 {
        let phi = -PI + k as f64 * PI / 16.0;
        let pair = exact_proxy_readout(cfg.r, phi, cfg.beta, Prescription::ThreeMeasurement)
            .and_then(|three| {
                exact_proxy_readout(cfg.r, phi, cfg.beta, Prescription::FourPhase)
                    .map(|four| (three.signal, four.signal))
            });
        match pair {
            Ok((three, four)) => worst = worst.max((three - four).abs()),
            Err(e) => return errored(check, tol, e),
        }
    }
    outcome(check, worst, tol, format!("r = {}, |beta| = {}, 33 phases", cfg.r, cfg.beta))
}

fn driven_x(r: f64, chi: f64, theta: f64, beta: f64) -> Result<f64, parity_proxy::Error> {
    let out = MultiModeMoments::vacuum(3)
        .with_coherent(MODE_LO, Complex64::new(beta, 0.0))?
        .propagate(&build_proxy_circuit(chi, theta, r))?;
    Ok(4.0 * correlated_intensity(&out, DETECTOR_D, DETECTOR_C)?)
}

/// Moment-propagated correlation measurement vs its closed form.
fn correlation_closed_form() -> CheckOutcome {
    let check = "correlation-closed-form";
    let tol = 1e-10;
    let mut worst = 0.0f64;
    for r in [0.2, 0.6] {
        for chi in [0.0, PI / 6.0, PI / 2.0] {
            for theta in [0.0, PI / 4.0, PI / 2.0] {
                for beta in [0.0, 1.0, 2.0] {
                    match driven_x(r, chi, theta, beta) {
                        Ok(x) => worst = worst.max((x - closed_form_x(r, chi, theta, beta)).abs()),
                        Err(e) => return errored(check, tol, e),
                    }
                }
            }
        }
    }
    outcome(check, worst, tol, "54 points across gain, phase, oscillator settings".into())
}

/// Recovered signal vs the closed-form fringe on a dense grid.
fn signal_equivalence(cfg: &ExperimentConfig) -> CheckOutcome {
    let check = "signal-equivalence";
    let tol = 1e-10;
    let mut gains = vec![0.1, 0.5, 1.0];
    if !gains.contains(&cfg.r) {
        gains.push(cfg.r);
    }
    let mut worst = 0.0f64;
    for &r in &gains {
        for k in 0..200 {
            let phi = k as f64 * PI / 199.0;
            match exact_proxy_readout(r, phi, cfg.beta, cfg.prescription.into()) {
                Ok(readout) => {
                    worst = worst.max((readout.signal - signal_closed_form(r, phi)).abs())
                }
                Err(e) => return errored(check, tol, e),
            }
        }
    }
    outcome(check, worst, tol, format!("gains {gains:?}, 200-point grid"))
}

/// The recovered intensity must not depend on the probe phase (moment path).
fn intensity_constancy_moment(cfg: &ExperimentConfig) -> CheckOutcome {
    let check = "intensity-constancy-moment";
    let tol = 1e-10;
    let target = cfg.r.sinh().powi(2);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let phi = k as f64 * PI / 199.0;
        match exact_proxy_readout(cfg.r, phi, cfg.beta, cfg.prescription.into()) {
            Ok(readout) => worst = worst.max((readout.intensity - target).abs()),
            Err(e) => return errored(check, tol, e),
        }
    }
    outcome(check, worst, tol, format!("r = {}, 200-point grid", cfg.r))
}

/// Same constancy counted in the number basis.
fn intensity_constancy_oracle(cfg: &ExperimentConfig) -> CheckOutcome {
    let check = "intensity-constancy-oracle";
    let tol = 1e-6;
    if cfg.r > 0.8 {
        return CheckOutcome {
            check,
            passed: true,
            max_deviation: 0.0,
            tolerance: tol,
            detail: format!("skipped: r = {} exceeds the number-basis envelope", cfg.r),
        };
    }
    let target = cfg.r.sinh().powi(2);
    let mut worst = 0.0f64;
    for k in 0..5 {
        let chi = k as f64 * PI / 4.0;
        let counted = number_basis_chain(cfg, chi).and_then(|s| s.mode_moments(MODE_OUT));
        match counted {
            Ok(mm) => worst = worst.max((mm.n_mean - target).abs()),
            Err(e) => return errored(check, tol, e),
        }
    }
    outcome(check, worst, tol, format!("r = {}, cutoff = {}, 5 phases", cfg.r, cfg.cutoff))
}

/// Small-phase uncertainty against 1/sqrt(n(n+2)), plus the sub-Heisenberg
/// bound delta_phi_min < 1/n for n <= 2.
fn sensitivity_bound() -> CheckOutcome {
    let check = "sensitivity-bound";
    let tol = 1e-2;
    let mut worst = 0.0f64;
    for r in [0.3f64, 0.5, 1.0] {
        let formula = 1.0 / (2.0 * r).sinh();
        match phase_sensitivity(r, 1e-3) {
            Ok(est) => worst = worst.max((est.delta_phi - formula).abs() / formula),
            Err(e) => return errored(check, tol, e),
        }
    }
    let mut sub_heisenberg = true;
    for r in [0.35f64, 0.6, 0.88] {
        let n = 2.0 * r.sinh().powi(2);
        sub_heisenberg &= n <= 2.0 && 1.0 / (2.0 * r).sinh() < 1.0 / n;
    }
    let mut result = outcome(
        check,
        worst,
        tol,
        "relative deviation at phi = 1e-3; minimum below 1/n for n <= 2".into(),
    );
    result.passed &= sub_heisenberg;
    result
}

/// Runs every check; the caller decides what a failure means.
pub fn run_checks(cfg: &ExperimentConfig) -> Vec<CheckOutcome> {
    vec![
        symplectic_form(),
        origin_identity(),
        oracle_agreement(cfg),
        prescription_equivalence(cfg),
        correlation_closed_form(),
        signal_equivalence(cfg),
        intensity_constancy_moment(cfg),
        intensity_constancy_oracle(cfg),
        sensitivity_bound(),
    ]
}
