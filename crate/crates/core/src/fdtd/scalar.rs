//! Field sample scalar: real for ordinary runs, complex when a Bloch phase
//! is active. The update kernels are generic over this trait so the real
//! path pays nothing for the complex machinery.

use num_complex::Complex64;
use std::ops::{Add, AddAssign, Sub};

pub trait FieldScalar:
    Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + AddAssign + 'static
{
    const ZERO: Self;

    fn scale(self, s: f64) -> Self;
    /// Multiply by a unit phase given as (re, im). The real implementation
    /// only supports real phases (+1/-1), which covers plain periodic wrap
    /// and Bloch wavenumbers 0 and pi/a.
    fn mul_phase(self, phase: (f64, f64)) -> Self;
    fn from_real(v: f64) -> Self;
    fn norm_sqr(self) -> f64;
    /// Instantaneous Poynting-style product: `e * h` for real fields,
    /// `Re(e * conj(h))` for complex (cycle-mean of the analytic signal).
    fn prod_re(self, other: Self) -> f64;
    fn to_complex(self) -> Complex64;
    fn is_finite(self) -> bool;
}

impl FieldScalar for f64 {
    const ZERO: f64 = 0.0;

    #[inline(always)]
    fn scale(self, s: f64) -> f64 {
        self * s
    }

    #[inline(always)]
    fn mul_phase(self, phase: (f64, f64)) -> f64 {
        debug_assert!(phase.1.abs() < 1e-12, "real fields cannot carry a complex phase");
        self * phase.0
    }

    #[inline(always)]
    fn from_real(v: f64) -> f64 {
        v
    }

    #[inline(always)]
    fn norm_sqr(self) -> f64 {
        self * self
    }

    #[inline(always)]
    fn prod_re(self, other: f64) -> f64 {
        self * other
    }

    #[inline(always)]
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }

    #[inline(always)]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl FieldScalar for Complex64 {
    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    #[inline(always)]
    fn scale(self, s: f64) -> Complex64 {
        Complex64::new(self.re * s, self.im * s)
    }

    #[inline(always)]
    fn mul_phase(self, phase: (f64, f64)) -> Complex64 {
        Complex64::new(
            self.re * phase.0 - self.im * phase.1,
            self.re * phase.1 + self.im * phase.0,
        )
    }

    #[inline(always)]
    fn from_real(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[inline(always)]
    fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline(always)]
    fn prod_re(self, other: Complex64) -> f64 {
        self.re * other.re + self.im * other.im
    }

    #[inline(always)]
    fn to_complex(self) -> Complex64 {
        self
    }

    #[inline(always)]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}
