//! Truncated number-basis state vectors: an independent oracle for the
//! moment-based machinery. States are built exactly (two-mode squeezed
//! vacuum, coherent), pushed through passive elements with exact
//! photon-number-conserving block matrices, and interrogated for parities,
//! low-order moments, and joint count statistics.
//!
//! Truncation bookkeeping: amplitudes are never renormalized. The squared
//! norm starts within `tail_tol` of one and every gate checks it stays
//! there, so a cutoff that is too small for the state surfaces as an error
//! instead of silently skewing expectations.
//!
//! Combinatorial tables (log-factorials, splitter blocks) are always built
//! in `f64` and converted at the boundary; the alternating sums lose all
//! relative accuracy near the truncation corner, but the state families
//! used here carry no weight there, so the absolute error stays negligible.

use ndarray::Array2;

use crate::circuit::CircuitElement;
use crate::error::{Error, Result};
use crate::gaussian::GaussianMoments;
use crate::scalar::{i_pow, Real, C};

/// Default cap on the probability mass a state may lose to truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

fn czero<R: Real>() -> C<R> {
    C::new(R::zero(), R::zero())
}

fn effective_tail_tol<R: Real>() -> R {
    // widen for scalars whose epsilon dwarfs the nominal tolerance (f32)
    R::of(DEFAULT_TAIL_TOL).max(R::epsilon() * R::of(256.0))
}

fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut l = vec![0.0f64; n_max + 1];
    for k in 1..=n_max {
        l[k] = l[k - 1] + (k as f64).ln();
    }
    l
}

/// Signed 256-bit integer, just wide enough for the splitter pyramid:
/// coefficients of (1+z)^m (1-z)^n are bounded by 2^(m+n), and the widest
/// admissible ladder pair (120 levels per mode) reaches totals of 238.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct I256 {
    hi: i128,
    lo: u128,
}

impl I256 {
    const ZERO: Self = I256 { hi: 0, lo: 0 };
    const ONE: Self = I256 { hi: 0, lo: 1 };

    fn add(self, other: Self) -> Self {
        let (lo, carry) = self.lo.overflowing_add(other.lo);
        I256 { hi: self.hi.wrapping_add(other.hi).wrapping_add(carry as i128), lo }
    }

    fn sub(self, other: Self) -> Self {
        let (lo, borrow) = self.lo.overflowing_sub(other.lo);
        I256 { hi: self.hi.wrapping_sub(other.hi).wrapping_sub(borrow as i128), lo }
    }

    fn to_f64(self) -> f64 {
        if self.hi < 0 {
            -Self::ZERO.sub(self).to_f64()
        } else {
            (self.hi as u128 as f64) * 2f64.powi(128) + (self.lo as f64)
        }
    }
}

/// Joint photon-count weights of two modes, unnormalized: entry (m, n) is
/// the probability mass on m photons in the first mode and n in the second,
/// summing to the squared norm of the state.
#[derive(Debug, Clone)]
pub struct CountDistribution<R: Real> {
    counts: Array2<R>,
}

impl<R: Real> CountDistribution<R> {
    #[inline]
    pub fn counts(&self) -> &Array2<R> {
        &self.counts
    }

    pub fn total(&self) -> R {
        self.counts.iter().fold(R::zero(), |acc, &w| acc + w)
    }

    /// <n_i n_j> over the normalized distribution.
    pub fn normalized_mean_product(&self) -> Result<R> {
        let total = self.total();
        if total <= R::zero() {
            return Err(Error::EmptyDistribution);
        }
        let mut acc = R::zero();
        for ((m, n), &w) in self.counts.indexed_iter() {
            acc += R::of(m as f64) * R::of(n as f64) * w;
        }
        Ok(acc / total)
    }

    /// (<n_i>, <n_j>) over the normalized distribution.
    pub fn normalized_means(&self) -> Result<(R, R)> {
        let total = self.total();
        if total <= R::zero() {
            return Err(Error::EmptyDistribution);
        }
        let mut mi = R::zero();
        let mut mj = R::zero();
        for ((m, n), &w) in self.counts.indexed_iter() {
            mi += R::of(m as f64) * w;
            mj += R::of(n as f64) * w;
        }
        Ok((mi / total, mj / total))
    }
}

/// Low-order moments of a single mode, normalized by the squared norm.
#[derive(Debug, Clone, Copy)]
pub struct ModeMoments<R: Real> {
    pub a_mean: C<R>,
    pub asq_mean: C<R>,
    pub n_mean: R,
    /// <a%^2 a^2> = <n(n-1)>.
    pub adag2_a2_mean: R,
}

/// Two evaluations of the same parity, one through the origin value of the
/// mode's phase-space quasiprobability, one by direct photon-number count.
#[derive(Debug, Clone, Copy)]
pub struct IdentityCheck<R: Real> {
    pub gaussian_side: R,
    pub fock_side: R,
    pub abs_diff: R,
}

/// State vector over a product of truncated number ladders; mode k holds
/// occupations 0..dims[k]. The last mode varies fastest in `amp`.
#[derive(Debug, Clone)]
pub struct FockVector<R: Real> {
    dims: Vec<usize>,
    amp: Vec<C<R>>,
    tail_tol: R,
}

impl<R: Real> FockVector<R> {
    fn strides(dims: &[usize]) -> Vec<usize> {
        let mut s = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * dims[k + 1];
        }
        s
    }

    fn check_dims(dims: &[usize]) -> usize {
        assert!(!dims.is_empty(), "a state needs at least one mode");
        let mut total = 1usize;
        for &d in dims {
            assert!(d >= 1, "every mode needs at least the vacuum level");
            total = total.checked_mul(d).expect("state dimension overflows usize");
        }
        assert!(total <= 1 << 28, "state dimension {total} is unreasonably large");
        total
    }

    pub fn vacuum(dims: &[usize]) -> Self {
        let total = Self::check_dims(dims);
        let mut amp = vec![czero::<R>(); total];
        amp[0] = C::new(R::one(), R::zero());
        Self { dims: dims.to_vec(), amp, tail_tol: effective_tail_tol::<R>() }
    }

    /// Product number state |occ_0, occ_1, ...>.
    pub fn number_state(dims: &[usize], occupations: &[usize]) -> Self {
        let mut state = Self::vacuum(dims);
        state.amp[0] = czero::<R>();
        let idx = state.index_of(occupations);
        state.amp[idx] = C::new(R::one(), R::zero());
        state
    }

    /// Two-mode squeezed vacuum with pump phase zero: amplitudes
    /// tanh(r)^n / cosh(r) on the diagonal |n, n>.
    pub fn two_mode_squeezed(r: R, cutoff: usize) -> Result<Self> {
        let mut state = Self::vacuum(&[cutoff, cutoff]);
        state.amp[0] = czero::<R>();
        let rf = r.to_f64().expect("squeeze parameter must be finite");
        let t = rf.tanh();
        let tail = t.powi(2 * cutoff as i32).abs();
        let tol = state.tail_tol.to_f64().unwrap_or(DEFAULT_TAIL_TOL);
        if tail > tol {
            return Err(Error::InsufficientCutoff { cutoff, tail, tol });
        }
        let mut c_n = 1.0 / rf.cosh();
        for n in 0..cutoff {
            state.amp[n * cutoff + n] = C::new(R::of(c_n), R::zero());
            c_n *= t;
        }
        Ok(state)
    }

    /// Single-mode coherent state of complex amplitude `beta`.
    pub fn coherent(beta: C<R>, cutoff: usize) -> Result<Self> {
        let bf = num_complex::Complex64::new(
            beta.re.to_f64().expect("amplitude must be finite"),
            beta.im.to_f64().expect("amplitude must be finite"),
        );
        let mut psi = Vec::with_capacity(cutoff);
        let mut cur = num_complex::Complex64::new((-bf.norm_sqr() / 2.0).exp(), 0.0);
        let mut kept = 0.0f64;
        for n in 0..cutoff {
            if n > 0 {
                cur *= bf / (n as f64).sqrt();
            }
            kept += cur.norm_sqr();
            psi.push(cur);
        }
        let tail = (1.0 - kept).max(0.0);
        let mut state = Self::vacuum(&[cutoff]);
        let tol = state.tail_tol.to_f64().unwrap_or(DEFAULT_TAIL_TOL);
        if tail > tol {
            return Err(Error::InsufficientCutoff { cutoff, tail, tol });
        }
        for (n, c) in psi.into_iter().enumerate() {
            state.amp[n] = C::new(R::of(c.re), R::of(c.im));
        }
        Ok(state)
    }

    #[inline]
    pub fn num_modes(&self) -> usize {
        self.dims.len()
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn tail_tol(&self) -> R {
        self.tail_tol
    }

    /// Replaces the truncation budget checked after every gate. Mixing
    /// elements spread occupation across ladders, so a chain may need a
    /// larger budget than the inputs themselves; expectation values drawn
    /// from a leaky state carry a bias of order `tol * cutoff`.
    pub fn with_tail_tol(mut self, tol: R) -> Self {
        self.tail_tol = tol;
        self
    }

    fn index_of(&self, occupations: &[usize]) -> usize {
        assert_eq!(occupations.len(), self.dims.len(), "one occupation per mode");
        let strides = Self::strides(&self.dims);
        let mut idx = 0usize;
        for (k, (&n, &d)) in occupations.iter().zip(&self.dims).enumerate() {
            assert!(n < d, "occupation {n} exceeds the ladder of mode {k}");
            idx += n * strides[k];
        }
        idx
    }

    pub fn amplitude(&self, occupations: &[usize]) -> C<R> {
        self.amp[self.index_of(occupations)]
    }

    pub fn probability(&self, occupations: &[usize]) -> R {
        self.amplitude(occupations).norm_sqr()
    }

    pub fn norm_sqr(&self) -> R {
        self.amp.iter().fold(R::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Appends the modes of `other` after the modes of `self`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let total = Self::check_dims(&dims);
        let mut amp = vec![czero::<R>(); total];
        for (ia, &va) in self.amp.iter().enumerate() {
            if va == czero::<R>() {
                continue;
            }
            let base = ia * other.amp.len();
            for (ib, &vb) in other.amp.iter().enumerate() {
                amp[base + ib] = va * vb;
            }
        }
        Self { dims, amp, tail_tol: self.tail_tol.max(other.tail_tol) }
    }

    /// Relabels two modes, exchanging their ladders.
    pub fn swap_modes(&mut self, mode_a: usize, mode_b: usize) -> Result<()> {
        let modes = self.num_modes();
        for &m in &[mode_a, mode_b] {
            if m >= modes {
                return Err(Error::ModeOutOfRange { mode: m, modes });
            }
        }
        if mode_a == mode_b {
            return Ok(());
        }
        let mut dims = self.dims.clone();
        dims.swap(mode_a, mode_b);
        let old_strides = Self::strides(&self.dims);
        let new_strides = Self::strides(&dims);
        let mut amp = vec![czero::<R>(); self.amp.len()];
        let mut occ = vec![0usize; modes];
        for (idx, &v) in self.amp.iter().enumerate() {
            if v == czero::<R>() {
                continue;
            }
            let mut rest = idx;
            for k in 0..modes {
                occ[k] = rest / old_strides[k];
                rest %= old_strides[k];
            }
            occ.swap(mode_a, mode_b);
            let mut new_idx = 0usize;
            for k in 0..modes {
                new_idx += occ[k] * new_strides[k];
            }
            amp[new_idx] = v;
        }
        self.dims = dims;
        self.amp = amp;
        Ok(())
    }

    pub fn apply_phase(&mut self, mode: usize, phase: R) -> Result<()> {
        let modes = self.num_modes();
        if mode >= modes {
            return Err(Error::ModeOutOfRange { mode, modes });
        }
        let stride = Self::strides(&self.dims)[mode];
        let dim = self.dims[mode];
        let rotors: Vec<C<R>> = (0..dim)
            .map(|n| C::from_polar(R::one(), phase * R::of(n as f64)))
            .collect();
        for (idx, a) in self.amp.iter_mut().enumerate() {
            let n = (idx / stride) % dim;
            *a = *a * rotors[n];
        }
        Ok(())
    }

    /// Balanced splitter on two modes, same convention as the moment side:
    /// creators map as a_i% -> (a_i% + i a_j%)/sqrt 2 and symmetrically.
    /// Errors if the truncation sheds more probability than `tail_tol`.
    pub fn apply_beam_splitter(&mut self, mode_a: usize, mode_b: usize) -> Result<()> {
        let modes = self.num_modes();
        for &m in &[mode_a, mode_b] {
            if m >= modes {
                return Err(Error::ModeOutOfRange { mode: m, modes });
            }
        }
        if mode_a == mode_b {
            return Err(Error::IdenticalModes { mode: mode_a });
        }
        let di = self.dims[mode_a];
        let dj = self.dims[mode_b];
        let n_max = (di - 1) + (dj - 1);
        let l = ln_factorials(n_max);

        // block (k, m) for fixed pair total N: <k, N-k| splitter |m, N-m>
        //   = i^(n+N-k) * g_(N-k) * sqrt(k!(N-k)!/(m!n!)) / 2^(N/2)
        // with g_t the integer coefficient of z^t in (1+z)^m (1-z)^n. The
        // integer pyramid keeps blocks exact at large totals, where the
        // equivalent alternating factorial sum cancels catastrophically.
        let coeffs: Vec<Array2<C<R>>> = (0..=n_max)
            .map(|n_total| {
                let lo = n_total.saturating_sub(dj - 1);
                let hi = n_total.min(di - 1);
                let size = hi + 1 - lo;
                let mut table = Array2::from_elem((size, size), czero::<R>());
                // g holds (1+z)^m (1-z)^(n_total-m), advanced in m from lo
                let mut g = vec![I256::ZERO; n_total + 2];
                g[0] = I256::ONE;
                for step in 1..=n_total {
                    if step <= lo {
                        for t in (1..=step).rev() {
                            g[t] = g[t].add(g[t - 1]);
                        }
                    } else {
                        for t in (1..=step).rev() {
                            g[t] = g[t].sub(g[t - 1]);
                        }
                    }
                }
                for (m_col, m) in (lo..=hi).enumerate() {
                    if m > lo {
                        // advance m: multiply by (1+z), divide exactly by (1-z)
                        for t in (1..=n_total + 1).rev() {
                            g[t] = g[t].add(g[t - 1]);
                        }
                        let mut run = I256::ZERO;
                        for coeff in g.iter_mut().take(n_total + 1) {
                            run = coeff.add(run);
                            *coeff = run;
                        }
                        debug_assert_eq!(g[n_total + 1].add(run), I256::ZERO);
                        g[n_total + 1] = I256::ZERO;
                    }
                    let n = n_total - m;
                    for (k_row, k) in (lo..=hi).enumerate() {
                        let gt = g[n_total - k];
                        if gt == I256::ZERO {
                            continue;
                        }
                        let gf = gt.to_f64();
                        let pref = 0.5 * (l[k] + l[n_total - k] - l[m] - l[n])
                            - 0.5 * (n_total as f64) * std::f64::consts::LN_2;
                        let mag = (pref + gf.abs().ln()).exp();
                        let signed = if gf < 0.0 { -mag } else { mag };
                        table[[k_row, m_col]] =
                            i_pow::<R>(n + n_total - k) * C::new(R::of(signed), R::zero());
                    }
                }
                table
            })
            .collect();

        let strides = Self::strides(&self.dims);
        let (si, sj) = (strides[mode_a], strides[mode_b]);
        let mut block = vec![czero::<R>(); di * dj];
        let mut out = vec![czero::<R>(); di * dj];
        for base in 0..self.amp.len() {
            if (base / si) % di != 0 || (base / sj) % dj != 0 {
                continue;
            }
            for m in 0..di {
                for n in 0..dj {
                    block[m * dj + n] = self.amp[base + m * si + n * sj];
                }
            }
            for v in out.iter_mut() {
                *v = czero::<R>();
            }
            for (n_total, table) in coeffs.iter().enumerate() {
                let lo = n_total.saturating_sub(dj - 1);
                let hi = n_total.min(di - 1);
                for (k_row, k) in (lo..=hi).enumerate() {
                    let mut acc = czero::<R>();
                    for (m_col, m) in (lo..=hi).enumerate() {
                        acc += table[[k_row, m_col]] * block[m * dj + (n_total - m)];
                    }
                    out[k * dj + (n_total - k)] = acc;
                }
            }
            for m in 0..di {
                for n in 0..dj {
                    self.amp[base + m * si + n * sj] = out[m * dj + n];
                }
            }
        }

        let lost = R::one() - self.norm_sqr();
        if lost > self.tail_tol {
            return Err(Error::CutoffTooSmall {
                lost: lost.to_f64().unwrap_or(f64::NAN),
                tol: self.tail_tol.to_f64().unwrap_or(DEFAULT_TAIL_TOL),
            });
        }
        Ok(())
    }

    pub fn apply_element(&mut self, element: &CircuitElement<R>) -> Result<()> {
        match *element {
            CircuitElement::BeamSplitter { mode_a, mode_b } => self.apply_beam_splitter(mode_a, mode_b),
            CircuitElement::PhaseShift { mode, phase } => self.apply_phase(mode, phase),
            CircuitElement::TwoModeSqueezer { .. } => Err(Error::NonPassiveElement),
        }
    }

    pub fn apply_elements(&mut self, elements: &[CircuitElement<R>]) -> Result<()> {
        for e in elements {
            self.apply_element(e)?;
        }
        Ok(())
    }

    /// <(-1)^n> of one mode, normalized.
    pub fn mode_parity(&self, mode: usize) -> Result<R> {
        let modes = self.num_modes();
        if mode >= modes {
            return Err(Error::ModeOutOfRange { mode, modes });
        }
        let stride = Self::strides(&self.dims)[mode];
        let dim = self.dims[mode];
        let mut even = R::zero();
        let mut odd = R::zero();
        for (idx, a) in self.amp.iter().enumerate() {
            let n = (idx / stride) % dim;
            if n % 2 == 0 {
                even += a.norm_sqr();
            } else {
                odd += a.norm_sqr();
            }
        }
        Ok((even - odd) / (even + odd))
    }

    /// First, second, and fourth-order moments of one mode, normalized.
    pub fn mode_moments(&self, mode: usize) -> Result<ModeMoments<R>> {
        let modes = self.num_modes();
        if mode >= modes {
            return Err(Error::ModeOutOfRange { mode, modes });
        }
        let stride = Self::strides(&self.dims)[mode];
        let dim = self.dims[mode];
        let sqrt_n: Vec<R> = (0..dim).map(|n| R::of((n as f64).sqrt())).collect();
        let mut a_mean = czero::<R>();
        let mut asq_mean = czero::<R>();
        let mut n_mean = R::zero();
        let mut n2_mean = R::zero();
        let mut norm = R::zero();
        for (idx, a) in self.amp.iter().enumerate() {
            let n = (idx / stride) % dim;
            let w = a.norm_sqr();
            norm += w;
            n_mean += R::of(n as f64) * w;
            n2_mean += R::of((n * n.saturating_sub(1)) as f64) * w;
            if n >= 1 {
                a_mean += self.amp[idx - stride].conj() * *a * sqrt_n[n];
            }
            if n >= 2 {
                asq_mean += self.amp[idx - 2 * stride].conj() * *a * (sqrt_n[n] * sqrt_n[n - 1]);
            }
        }
        Ok(ModeMoments {
            a_mean: a_mean / norm,
            asq_mean: asq_mean / norm,
            n_mean: n_mean / norm,
            adag2_a2_mean: n2_mean / norm,
        })
    }

    /// Unnormalized joint count weights of two distinct modes.
    pub fn joint_count_distribution(&self, mode_a: usize, mode_b: usize) -> Result<CountDistribution<R>> {
        let modes = self.num_modes();
        for &m in &[mode_a, mode_b] {
            if m >= modes {
                return Err(Error::ModeOutOfRange { mode: m, modes });
            }
        }
        if mode_a == mode_b {
            return Err(Error::IdenticalModes { mode: mode_a });
        }
        let strides = Self::strides(&self.dims);
        let (si, sj) = (strides[mode_a], strides[mode_b]);
        let (di, dj) = (self.dims[mode_a], self.dims[mode_b]);
        let mut counts = Array2::from_elem((di, dj), R::zero());
        for (idx, a) in self.amp.iter().enumerate() {
            let m = (idx / si) % di;
            let n = (idx / sj) % dj;
            counts[[m, n]] += a.norm_sqr();
        }
        Ok(CountDistribution { counts })
    }

    /// Checks that the origin value of the mode's Gaussian quasiprobability
    /// reproduces the directly counted parity. Meaningful only when the mode
    /// is in a Gaussian state; otherwise the two sides legitimately differ.
    pub fn wigner_parity_identity(&self, mode: usize) -> Result<IdentityCheck<R>> {
        let mm = self.mode_moments(mode)?;
        let gaussian = GaussianMoments::from_raw_moments(mm.a_mean, mm.asq_mean, mm.n_mean)?;
        let gaussian_side = gaussian.parity();
        let fock_side = self.mode_parity(mode)?;
        Ok(IdentityCheck { gaussian_side, fock_side, abs_diff: (gaussian_side - fock_side).abs() })
    }
}

/// A ladder size comfortably holding a state of the given mean occupation:
/// mean + 10 sqrt(mean) + 20 levels.
pub fn suggest_cutoff(mean_photons: f64) -> usize {
    let m = mean_photons.max(0.0);
    (m + 10.0 * m.sqrt() + 20.0).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_photon_splits_evenly_with_the_right_phases() {
        let mut s = FockVector::<f64>::number_state(&[3, 3], &[1, 0]);
        s.apply_beam_splitter(0, 1).unwrap();
        assert!((s.amplitude(&[1, 0]) - c(1.0 / 2.0f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!((s.amplitude(&[0, 1]) - c(0.0, 1.0 / 2.0f64.sqrt())).norm() < 1e-15);
        assert_relative_eq!(s.norm_sqr(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn two_single_photons_bunch() {
        let mut s = FockVector::<f64>::number_state(&[4, 4], &[1, 1]);
        s.apply_beam_splitter(0, 1).unwrap();
        assert!(s.probability(&[1, 1]) < 1e-28);
        assert!((s.amplitude(&[2, 0]) - c(0.0, 1.0 / 2.0f64.sqrt())).norm() < 1e-15);
        assert!((s.amplitude(&[0, 2]) - c(0.0, 1.0 / 2.0f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn splitter_pyramid_matches_the_factorial_sum_at_small_totals() {
        // the alternating factorial sum is trustworthy at small pair totals;
        // pin the integer-pyramid route against it entry by entry
        let dim = 14usize;
        let n_max = 2 * (dim - 1);
        let l = ln_factorials(n_max);
        let reference = |k: usize, m: usize, n_total: usize| -> Complex64 {
            let n = n_total - m;
            let ll = n_total - k;
            let base = 0.5 * (l[m] + l[n] + l[k] + l[ll])
                - 0.5 * (n_total as f64) * std::f64::consts::LN_2;
            let mut sum = 0.0f64;
            for p in k.saturating_sub(n)..=m.min(k) {
                let term = (base - l[p] - l[m - p] - l[k - p] - l[n + p - k]).exp();
                sum += if p % 2 == 0 { term } else { -term };
            }
            i_pow::<f64>(m + k) * Complex64::new(sum, 0.0)
        };
        for m in 0..dim {
            for n in 0..dim {
                let mut s = FockVector::<f64>::number_state(&[dim, dim], &[m, n]);
                s = {
                    let mut t = s.with_tail_tol(1.0);
                    t.apply_beam_splitter(0, 1).unwrap();
                    t
                };
                for k in (m + n).saturating_sub(dim - 1)..=(m + n).min(dim - 1) {
                    let got = s.amplitude(&[k, m + n - k]);
                    let want = reference(k, m, m + n);
                    assert!(
                        (got - want).norm() < 1e-12,
                        "entry (k={k} | m={m}, n={n}): {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn splitter_blocks_are_unitary_on_untruncated_support() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let dim = 9;
        let mut s = FockVector::<f64>::vacuum(&[dim, dim]);
        let mut norm = 0.0;
        for m in 0..dim {
            for n in 0..dim {
                if m + n <= dim - 1 {
                    let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    s.amp[m * dim + n] = v;
                    norm += v.norm_sqr();
                }
            }
        }
        let norm = norm.sqrt();
        for a in s.amp.iter_mut() {
            *a /= c(norm, 0.0);
        }
        let before = s.norm_sqr();
        s.apply_beam_splitter(0, 1).unwrap();
        assert_relative_eq!(s.norm_sqr(), before, epsilon = 1e-13);
    }

    #[test]
    fn squeezed_pair_has_geometric_diagonal_statistics() {
        let r = 0.5f64;
        let s = FockVector::<f64>::two_mode_squeezed(r, 24).unwrap();
        let t = r.tanh();
        for n in 0..6 {
            assert_relative_eq!(s.probability(&[n, n]), (1.0 - t * t) * t.powi(2 * n as i32), epsilon = 1e-15);
            if n > 0 {
                assert_eq!(s.probability(&[n, 0]), 0.0);
            }
        }
        let mm = s.mode_moments(0).unwrap();
        let nbar = r.sinh().powi(2);
        assert_relative_eq!(mm.n_mean, nbar, epsilon = 1e-12);
        assert!(mm.a_mean.norm() < 1e-15);
        assert!(mm.asq_mean.norm() < 1e-15);
        // thermal marginal: <n(n-1)> = 2 nbar^2
        assert_relative_eq!(mm.adag2_a2_mean, 2.0 * nbar * nbar, epsilon = 1e-11);
        // and <n_a n_b> = <n^2> of the marginal = 2 nbar^2 + nbar
        let joint = s.joint_count_distribution(0, 1).unwrap();
        assert_relative_eq!(joint.normalized_mean_product().unwrap(), 2.0 * nbar * nbar + nbar, epsilon = 1e-11);
    }

    #[test]
    fn squeezed_pair_marginal_parity_is_inverse_cosh() {
        let s = FockVector::<f64>::two_mode_squeezed(0.5, 30).unwrap();
        assert_relative_eq!(s.mode_parity(0).unwrap(), 1.0 / 1.0f64.cosh(), epsilon = 1e-12);
        assert_relative_eq!(s.mode_parity(0).unwrap(), 0.6480542736638855, epsilon = 1e-12);
    }

    #[test]
    fn coherent_moments_match_their_amplitude() {
        let beta = c(0.7, -0.4);
        let s = FockVector::<f64>::coherent(beta, 30).unwrap();
        let mm = s.mode_moments(0).unwrap();
        assert!((mm.a_mean - beta).norm() < 1e-13);
        assert!((mm.asq_mean - beta * beta).norm() < 1e-13);
        assert_relative_eq!(mm.n_mean, beta.norm_sqr(), epsilon = 1e-13);
        assert_relative_eq!(mm.adag2_a2_mean, beta.norm_sqr().powi(2), epsilon = 1e-12);
        assert_relative_eq!(s.mode_parity(0).unwrap(), (-2.0 * beta.norm_sqr()).exp(), epsilon = 1e-13);
    }

    #[test]
    fn phase_gate_rotates_the_amplitude() {
        let beta = c(1.1, 0.0);
        let phi = 0.83;
        let mut s = FockVector::<f64>::coherent(beta, 30).unwrap();
        s.apply_phase(0, phi).unwrap();
        let mm = s.mode_moments(0).unwrap();
        assert!((mm.a_mean - beta * Complex64::from_polar(1.0, phi)).norm() < 1e-13);
        assert!((mm.asq_mean - beta * beta * Complex64::from_polar(1.0, 2.0 * phi)).norm() < 1e-13);
    }

    #[test]
    fn split_squeezed_pair_factorizes_into_even_ladders() {
        // headroom: the splitter spreads pair totals up to 2*(cutoff-1)
        let mut s = FockVector::<f64>::two_mode_squeezed(0.6, 56).unwrap();
        s.apply_beam_splitter(0, 1).unwrap();
        let joint = s.joint_count_distribution(0, 1).unwrap();
        let mut odd_mass = 0.0f64;
        for ((m, n), &w) in joint.counts().indexed_iter() {
            if m % 2 == 1 || n % 2 == 1 {
                odd_mass += w;
            }
        }
        assert!(odd_mass < 1e-24, "odd occupation mass {odd_mass:.3e}");
        // each output mode is pure squeezed vacuum: parity one
        assert_relative_eq!(s.mode_parity(0).unwrap(), 1.0, epsilon = 1e-12);
        let mm = s.mode_moments(0).unwrap();
        let (mu, nu) = (0.6f64.cosh(), 0.6f64.sinh());
        let dev = (mm.asq_mean - c(0.0, mu * nu)).norm();
        assert!(dev < 1e-12, "asq deviation {dev:.3e}");
        assert_relative_eq!(mm.n_mean, nu * nu, epsilon = 1e-12);
    }

    #[test]
    fn parity_identity_holds_for_gaussian_families() {
        for (state, label) in [
            (FockVector::<f64>::coherent(c(1.0, 0.5), 40).unwrap(), "coherent"),
            (FockVector::<f64>::two_mode_squeezed(0.7, 40).unwrap().tensor(&FockVector::vacuum(&[1])), "thermal"),
        ] {
            let check = state.wigner_parity_identity(0).unwrap();
            assert!(check.abs_diff < 1e-12, "{label}: {:?}", check);
        }
    }

    #[test]
    fn truncation_is_reported_not_absorbed() {
        assert!(matches!(
            FockVector::<f64>::two_mode_squeezed(1.2, 10),
            Err(Error::InsufficientCutoff { cutoff: 10, .. })
        ));
        assert!(matches!(
            FockVector::<f64>::coherent(c(2.0, 0.0), 6),
            Err(Error::InsufficientCutoff { cutoff: 6, .. })
        ));
        // two bright beams interfering constructively overflow a short ladder
        let a = FockVector::<f64>::coherent(c(2.0, 0.0), 26).unwrap();
        let b = FockVector::<f64>::coherent(c(0.0, 2.0), 26).unwrap();
        let mut s = a.tensor(&b);
        assert!(matches!(s.apply_beam_splitter(0, 1), Err(Error::CutoffTooSmall { .. })));
    }

    #[test]
    fn swap_relabels_modes() {
        let a = FockVector::<f64>::coherent(c(0.9, 0.0), 16).unwrap();
        let pair = FockVector::<f64>::two_mode_squeezed(0.4, 24).unwrap();
        let mut s = pair.tensor(&a);
        s.swap_modes(1, 2).unwrap();
        let mm = s.mode_moments(1).unwrap();
        assert!((mm.a_mean - c(0.9, 0.0)).norm() < 1e-13);
        assert_relative_eq!(s.mode_moments(2).unwrap().n_mean, 0.4f64.sinh().powi(2), epsilon = 1e-13);
        assert!(s.mode_moments(2).unwrap().a_mean.norm() < 1e-15);
    }

    #[test]
    fn squeezer_elements_cannot_run_in_the_number_basis() {
        let mut s = FockVector::<f64>::vacuum(&[4, 4]);
        let err = s
            .apply_element(&CircuitElement::TwoModeSqueezer { mode_a: 0, mode_b: 1, r: 0.3 })
            .unwrap_err();
        assert!(matches!(err, Error::NonPassiveElement));
    }

    #[test]
    fn suggested_cutoffs_cover_their_states() {
        for nbar in [0.0, 0.5, 2.0, 4.0, 9.0] {
            let cut = suggest_cutoff(nbar);
            assert!(FockVector::<f64>::coherent(c(nbar.sqrt(), 0.0), cut).is_ok(), "nbar={nbar}");
        }
        assert!(suggest_cutoff(4.0) >= suggest_cutoff(1.0));
    }

    #[test]
    fn f32_states_carry_the_same_structure() {
        let s = FockVector::<f32>::two_mode_squeezed(0.5f32, 20).unwrap();
        assert_relative_eq!(s.mode_parity(0).unwrap(), 1.0 / 1.0f32.cosh(), epsilon = 1e-5);
        let mut split = s.clone();
        split.apply_beam_splitter(0, 1).unwrap();
        assert_relative_eq!(split.mode_parity(0).unwrap(), 1.0, epsilon = 1e-5);
    }
}
