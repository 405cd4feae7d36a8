//! Scalar abstraction. Everything downstream is generic over the real field;
//! `f64` is what the command-line tools and the acceptance tolerances assume,
//! `f32` works where its seven digits are enough.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar type the simulator is generic over.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Default
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Conversion from an `f64` constant or internally tabulated value.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant must convert into the scalar type")
    }

    /// Slack used by physicality checks. The nominal slack is 1e-9; for
    /// narrower types the machine epsilon dominates.
    #[inline]
    fn physicality_slack() -> Self {
        Self::of(1e-9).max(Self::epsilon() * Self::of(64.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over the chosen real scalar.
pub type C<R> = Complex<R>;

/// Shorthand for `i^k` (`k` taken mod 4).
#[inline]
pub(crate) fn i_pow<R: Real>(k: usize) -> C<R> {
    match k % 4 {
        0 => C::new(R::one(), R::zero()),
        1 => C::new(R::zero(), R::one()),
        2 => C::new(-R::one(), R::zero()),
        _ => C::new(R::zero(), -R::one()),
    }
}
