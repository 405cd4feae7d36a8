//! Linear-optical circuits as Bogoliubov transforms on the stacked operator
//! vector (a_1, a_1%, a_2, a_2%, ...) and exact propagation of first and
//! second moments through them (`%` marks the adjoint).
//!
//! Conventions, fixed once and used everywhere:
//! * balanced splitter on modes (i, j): out_i = (in_i + i in_j)/sqrt 2,
//!   out_j = (in_j + i in_i)/sqrt 2 (symmetric under i <-> j);
//! * phase shifter: out = e^{i phi} in;
//! * two-mode squeezer, pump phase zero: out_i = cosh(r) in_i + sinh(r) in_j%.
//!
//! The canonical three-mode layout of the proxy interferometer is
//! [signal arm, local oscillator, signal arm]; after the full chain mode 1
//! feeds detector d and mode 2 detector c.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::gaussian::GaussianMoments;
use crate::scalar::{Real, C};

/// Mode index of the interferometer arm that exits unmonitored.
pub const MODE_UPPER: usize = 0;
/// Mode index of the local oscillator.
pub const MODE_LO: usize = 1;
/// Mode index of the homodyned output arm (detector c after the final mix).
pub const MODE_OUT: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircuitElement<R: Real> {
    /// Balanced (50:50) splitter on two distinct modes.
    BeamSplitter { mode_a: usize, mode_b: usize },
    PhaseShift { mode: usize, phase: R },
    /// Nondegenerate amplifier with gain cosh(r), pump phase zero.
    TwoModeSqueezer { mode_a: usize, mode_b: usize, r: R },
}

/// 2M x 2M linear transform of the stacked operator vector: row 2i gives the
/// output annihilator of mode i in terms of the input operators, row 2i+1 its
/// adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovTransform<R: Real> {
    modes: usize,
    m: Array2<C<R>>,
}

fn czero<R: Real>() -> C<R> {
    C::new(R::zero(), R::zero())
}

impl<R: Real> BogoliubovTransform<R> {
    pub fn identity(modes: usize) -> Self {
        Self { modes, m: Array2::eye(2 * modes) }
    }

    #[inline]
    pub fn num_modes(&self) -> usize {
        self.modes
    }

    #[inline]
    pub fn matrix(&self) -> &Array2<C<R>> {
        &self.m
    }

    /// Applies `other` after `self`.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if self.modes != other.modes {
            return Err(Error::ModeCountMismatch { expected: self.modes, got: other.modes });
        }
        Ok(Self { modes: self.modes, m: other.m.dot(&self.m) })
    }

    /// Largest residual of the commutation-preservation identities
    /// S K S^T = K (K antisymmetric per mode) and S Z S% = Z
    /// (Z = diag(1, -1) per mode). Zero for any physical transform.
    pub fn commutation_defect(&self) -> R {
        let n = 2 * self.modes;
        let mut k = Array2::from_elem((n, n), czero::<R>());
        let mut z = Array2::from_elem((n, n), czero::<R>());
        for i in 0..self.modes {
            k[[2 * i, 2 * i + 1]] = C::new(R::one(), R::zero());
            k[[2 * i + 1, 2 * i]] = C::new(-R::one(), R::zero());
            z[[2 * i, 2 * i]] = C::new(R::one(), R::zero());
            z[[2 * i + 1, 2 * i + 1]] = C::new(-R::one(), R::zero());
        }
        let skst = self.m.dot(&k).dot(&self.m.t());
        let adj = self.m.mapv(|v| v.conj()).reversed_axes().to_owned();
        let szsd = self.m.dot(&z).dot(&adj);
        let mut worst = R::zero();
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((skst[[i, j]] - k[[i, j]]).norm());
                worst = worst.max((szsd[[i, j]] - z[[i, j]]).norm());
            }
        }
        worst
    }
}

/// The 2M x 2M matrix of a single element acting on an M-mode system.
pub fn element_matrix<R: Real>(element: &CircuitElement<R>, modes: usize) -> Result<BogoliubovTransform<R>> {
    let check = |mode: usize| -> Result<()> {
        if mode >= modes {
            Err(Error::ModeOutOfRange { mode, modes })
        } else {
            Ok(())
        }
    };
    let mut m = Array2::eye(2 * modes);
    match *element {
        CircuitElement::BeamSplitter { mode_a, mode_b } => {
            check(mode_a)?;
            check(mode_b)?;
            if mode_a == mode_b {
                return Err(Error::IdenticalModes { mode: mode_a });
            }
            let s = C::new(R::FRAC_1_SQRT_2(), R::zero());
            let is = C::new(R::zero(), R::FRAC_1_SQRT_2());
            for (i, j) in [(mode_a, mode_b), (mode_b, mode_a)] {
                m[[2 * i, 2 * i]] = s;
                m[[2 * i, 2 * j]] = is;
                m[[2 * i + 1, 2 * i + 1]] = s;
                m[[2 * i + 1, 2 * j + 1]] = -is;
            }
        }
        CircuitElement::PhaseShift { mode, phase } => {
            check(mode)?;
            m[[2 * mode, 2 * mode]] = C::from_polar(R::one(), phase);
            m[[2 * mode + 1, 2 * mode + 1]] = C::from_polar(R::one(), -phase);
        }
        CircuitElement::TwoModeSqueezer { mode_a, mode_b, r } => {
            check(mode_a)?;
            check(mode_b)?;
            if mode_a == mode_b {
                return Err(Error::IdenticalModes { mode: mode_a });
            }
            let mu = C::new(r.cosh(), R::zero());
            let nu = C::new(r.sinh(), R::zero());
            for (i, j) in [(mode_a, mode_b), (mode_b, mode_a)] {
                m[[2 * i, 2 * i]] = mu;
                m[[2 * i, 2 * j + 1]] = nu;
                m[[2 * i + 1, 2 * i + 1]] = mu;
                m[[2 * i + 1, 2 * j]] = nu;
            }
        }
    }
    Ok(BogoliubovTransform { modes, m })
}

/// Composes elements listed in order of application: the first element acts
/// first, so the total matrix is M(e_n) ... M(e_2) M(e_1).
pub fn compose<R: Real>(elements: &[CircuitElement<R>], modes: usize) -> Result<BogoliubovTransform<R>> {
    if elements.is_empty() {
        return Err(Error::EmptyCircuit);
    }
    let mut total = BogoliubovTransform::identity(modes);
    for e in elements {
        total = total.then(&element_matrix(e, modes)?)?;
    }
    Ok(total)
}

/// Everything downstream of the amplifier in the interferometer core:
/// balanced split, probe phase `phi` on the upper arm, recombine. Kept
/// separate so the number-basis oracle can replay the identical chain on a
/// pre-squeezed input.
pub fn mzi_passive_elements<R: Real>(phi: R) -> Vec<CircuitElement<R>> {
    vec![
        CircuitElement::BeamSplitter { mode_a: MODE_UPPER, mode_b: MODE_OUT },
        CircuitElement::PhaseShift { mode: MODE_UPPER, phase: phi },
        CircuitElement::BeamSplitter { mode_a: MODE_UPPER, mode_b: MODE_OUT },
    ]
}

/// Passive part of the full chain: interferometer core, local-oscillator
/// phase `theta`, and the final mix of oscillator and output arm onto the
/// two detectors.
pub fn proxy_passive_elements<R: Real>(phi: R, theta: R) -> Vec<CircuitElement<R>> {
    vec![
        CircuitElement::BeamSplitter { mode_a: MODE_UPPER, mode_b: MODE_OUT },
        CircuitElement::PhaseShift { mode: MODE_UPPER, phase: phi },
        CircuitElement::PhaseShift { mode: MODE_LO, phase: theta },
        CircuitElement::BeamSplitter { mode_a: MODE_UPPER, mode_b: MODE_OUT },
        CircuitElement::BeamSplitter { mode_a: MODE_LO, mode_b: MODE_OUT },
    ]
}

fn with_amplifier<R: Real>(passive: Vec<CircuitElement<R>>, r: R) -> BogoliubovTransform<R> {
    let mut elements = vec![CircuitElement::TwoModeSqueezer { mode_a: MODE_UPPER, mode_b: MODE_OUT, r }];
    elements.extend(passive);
    compose(&elements, 3).expect("fixed three-mode chain is well formed")
}

/// Interferometer core on the three-mode layout: amplifier across the two
/// signal arms, then the passive core. The local oscillator (mode 1)
/// passes through untouched.
pub fn build_mzi_circuit<R: Real>(phi: R, r: R) -> BogoliubovTransform<R> {
    with_amplifier(mzi_passive_elements(phi), r)
}

/// Full proxy chain: amplifier, interferometer core, oscillator phase, and
/// the detector mix.
pub fn build_proxy_circuit<R: Real>(phi: R, theta: R, r: R) -> BogoliubovTransform<R> {
    with_amplifier(proxy_passive_elements(phi, theta), r)
}

/// First moments plus centered second moments of an M-mode Gaussian state:
/// A_ij = <da_i da_j> (symmetric) and B_ij = <da_i% da_j> (Hermitian,
/// non-negative diagonal), where da = a - <a>. Raw moments are reassembled on
/// extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiModeMoments<R: Real> {
    mean: Array1<C<R>>,
    a: Array2<C<R>>,
    b: Array2<C<R>>,
}

impl<R: Real> MultiModeMoments<R> {
    /// M-mode vacuum: zero mean, zero centered moments.
    pub fn vacuum(modes: usize) -> Self {
        Self {
            mean: Array1::from_elem(modes, czero::<R>()),
            a: Array2::from_elem((modes, modes), czero::<R>()),
            b: Array2::from_elem((modes, modes), czero::<R>()),
        }
    }

    /// Displaces one mode into a coherent state of amplitude `beta`, leaving
    /// the noise moments untouched (vacuum noise stays vacuum noise).
    pub fn with_coherent(mut self, mode: usize, beta: C<R>) -> Result<Self> {
        if mode >= self.num_modes() {
            return Err(Error::ModeOutOfRange { mode, modes: self.num_modes() });
        }
        self.mean[mode] = beta;
        Ok(self)
    }

    #[inline]
    pub fn num_modes(&self) -> usize {
        self.mean.len()
    }

    #[inline]
    pub fn mean(&self, mode: usize) -> C<R> {
        self.mean[mode]
    }

    /// Centered <da_i da_j>.
    #[inline]
    pub fn a(&self, i: usize, j: usize) -> C<R> {
        self.a[[i, j]]
    }

    /// Centered <da_i% da_j>.
    #[inline]
    pub fn b(&self, i: usize, j: usize) -> C<R> {
        self.b[[i, j]]
    }

    /// Raw <a_m^2>.
    #[inline]
    pub fn raw_asq(&self, mode: usize) -> C<R> {
        self.a[[mode, mode]] + self.mean[mode] * self.mean[mode]
    }

    /// Raw <a_m% a_m>.
    #[inline]
    pub fn raw_mean_photons(&self, mode: usize) -> R {
        self.b[[mode, mode]].re + self.mean[mode].norm_sqr()
    }

    /// Pushes the state through a transform: means via T m, stacked central
    /// covariance via T C T^T with C_{2i,2j} = A_ij, C_{2i,2j+1} = B_ji + d_ij,
    /// C_{2i+1,2j} = B_ij, C_{2i+1,2j+1} = conj(A_ij).
    pub fn propagate(&self, t: &BogoliubovTransform<R>) -> Result<Self> {
        let modes = self.num_modes();
        if t.num_modes() != modes {
            return Err(Error::ModeCountMismatch { expected: modes, got: t.num_modes() });
        }
        let n = 2 * modes;
        let mut stacked_mean = Array1::from_elem(n, czero::<R>());
        let mut c = Array2::from_elem((n, n), czero::<R>());
        for i in 0..modes {
            stacked_mean[2 * i] = self.mean[i];
            stacked_mean[2 * i + 1] = self.mean[i].conj();
            for j in 0..modes {
                let delta = if i == j { C::new(R::one(), R::zero()) } else { czero::<R>() };
                c[[2 * i, 2 * j]] = self.a[[i, j]];
                c[[2 * i, 2 * j + 1]] = self.b[[j, i]] + delta;
                c[[2 * i + 1, 2 * j]] = self.b[[i, j]];
                c[[2 * i + 1, 2 * j + 1]] = self.a[[i, j]].conj();
            }
        }
        let m_out = t.m.dot(&stacked_mean);
        let c_out = t.m.dot(&c).dot(&t.m.t());

        let mut mean = Array1::from_elem(modes, czero::<R>());
        let mut a = Array2::from_elem((modes, modes), czero::<R>());
        let mut b = Array2::from_elem((modes, modes), czero::<R>());
        let half = R::of(0.5);
        for i in 0..modes {
            mean[i] = m_out[2 * i];
            for j in 0..modes {
                a[[i, j]] = (c_out[[2 * i, 2 * j]] + c_out[[2 * j, 2 * i]]) * half;
                b[[i, j]] = (c_out[[2 * i + 1, 2 * j]] + c_out[[2 * j + 1, 2 * i]].conj()) * half;
            }
        }
        // keep the Hermitian diagonal exactly real
        for i in 0..modes {
            b[[i, i]] = C::new(b[[i, i]].re, R::zero());
        }
        Ok(Self { mean, a, b })
    }

    /// Single-mode Wigner parameters of one mode, discarding the others.
    pub fn reduce_mode(&self, mode: usize) -> Result<GaussianMoments<R>> {
        if mode >= self.num_modes() {
            return Err(Error::ModeOutOfRange { mode, modes: self.num_modes() });
        }
        GaussianMoments::from_raw_moments(self.mean[mode], self.raw_asq(mode), self.raw_mean_photons(mode))
    }
}
