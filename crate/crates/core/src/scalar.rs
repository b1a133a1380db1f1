//! Generic floating-point scalar used throughout the solver.
//!
//! All field arithmetic, stencils, tableaux and linear solvers are written
//! against this trait so the whole pipeline runs in `f32` or `f64`. The
//! crate root exports `f64` aliases for the common types; `f64` is the
//! precision every shipped experiment uses.

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating point scalar, implemented for `f32` and `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + 'static
{
    /// Conversion from an `f64` literal; exact for every constant this crate uses.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant must be representable")
    }

    /// Conversion from a grid size or index.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize must be representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
