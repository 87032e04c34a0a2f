use num_complex::Complex64;
use rand::{Rng, RngExt};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// The base field of a matrix or problem instance.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Real => "real",
            Field::Complex => "complex",
        })
    }
}

/// Field element: `f64` or `Complex64`.
///
/// The two invariants the rest of the crate leans on:
///
/// * `abs` is exact for real scalars (no `sqrt(x*x)` detour), which is what
///   makes 1x1 polar factors reduce bitwise to the sign function;
/// * `standard_normal` draws a unit-variance element, splitting the variance
///   evenly across real and imaginary parts in the complex case (circularly
///   symmetric convention).
pub trait Scalar:
    Copy
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    const FIELD: Field;
    const ZERO: Self;
    const ONE: Self;

    fn from_re(x: f64) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn conj(self) -> Self;
    /// Modulus |x|. Exact for reals.
    fn abs(self) -> f64;
    /// Squared modulus |x|^2.
    fn abs2(self) -> f64;
    /// The imaginary unit, or zero in the real field (where `re + im*IMAG`
    /// silently drops imaginary parts; callers must reject nonzero `im`
    /// themselves when that matters).
    const IMAG: Self;
    /// Multiply by a real scalar.
    fn scale(self, s: f64) -> Self;
    /// Divide by a real scalar, componentwise. Unlike `scale(1.0 / s)` this
    /// is correctly rounded per component — `x.div_re(x.abs())` of a real
    /// is exactly its sign — which column normalization relies on.
    fn div_re(self, s: f64) -> Self;
    fn is_finite(self) -> bool;
    /// One sample with `E|x|^2 = 1`.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    const FIELD: Field = Field::Real;
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    const IMAG: Self = 0.0;

    #[inline]
    fn from_re(x: f64) -> Self {
        x
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn abs2(self) -> f64 {
        self * self
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn div_re(self, s: f64) -> Self {
        self / s
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

impl Scalar for Complex64 {
    const FIELD: Field = Field::Complex;
    const ZERO: Self = Complex64 { re: 0.0, im: 0.0 };
    const ONE: Self = Complex64 { re: 1.0, im: 0.0 };
    const IMAG: Self = Complex64 { re: 0.0, im: 1.0 };

    #[inline]
    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn abs(self) -> f64 {
        // hypot-based, robust to overflow in the parts
        self.norm()
    }
    #[inline]
    fn abs2(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        Complex64::new(self.re * s, self.im * s)
    }
    #[inline]
    fn div_re(self, s: f64) -> Self {
        Complex64::new(self.re / s, self.im / s)
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        // Re and Im each N(0, 1/2), so E|z|^2 = 1.
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(
            re * std::f64::consts::FRAC_1_SQRT_2,
            im * std::f64::consts::FRAC_1_SQRT_2,
        )
    }
}
