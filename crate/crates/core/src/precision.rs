//! Extended-precision reals used for the finite-sum coefficients.
//!
//! The partial-fraction weights of the finite-sum representation alternate in
//! sign and grow like `gap^-k` as scales approach each other, so they are
//! formed with a binary floating-point type of configurable mantissa width and
//! only rounded to `f64` once the final polynomial coefficients are known.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

use crate::error::{Error, Result};

pub type BigReal = FBig<HalfEven, 2>;

pub const DEFAULT_PRECISION_BITS: usize = 128;

/// Working precision (mantissa bits) for extended-precision arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision {
    bits: usize,
}

impl Default for Precision {
    fn default() -> Self {
        Self { bits: DEFAULT_PRECISION_BITS }
    }
}

impl Precision {
    pub fn new(bits: usize) -> Result<Self> {
        if bits < 64 {
            return Err(Error::InvalidArgument(format!("precision must be at least 64 bits, got {bits}")));
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Exact conversion of a finite `f64`, then tagged with this precision.
    pub fn real(&self, x: f64) -> BigReal {
        BigReal::try_from(x).expect("finite f64 converts exactly").with_precision(self.bits).value()
    }

    pub fn int(&self, x: i64) -> BigReal {
        BigReal::from(x).with_precision(self.bits).value()
    }

    pub fn zero(&self) -> BigReal {
        self.int(0)
    }

    pub fn one(&self) -> BigReal {
        self.int(1)
    }

    /// `n!` at this precision.
    pub fn factorial(&self, n: u32) -> BigReal {
        let mut acc = self.one();
        for i in 2..=n {
            acc *= self.int(i as i64);
        }
        acc
    }
}

pub fn to_f64(x: &BigReal) -> f64 {
    x.to_f64().value()
}

/// `x^n` for a possibly negative integer exponent.
pub fn powi(x: &BigReal, n: i32) -> BigReal {
    let p = x.clone().powi(n.unsigned_abs().into());
    if n < 0 {
        let one = BigReal::ONE.with_precision(x.precision()).value();
        one / p
    } else {
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_is_more_accurate_than_f64() {
        let p = Precision::default();
        let third = p.one() / p.int(3);
        let back = &third * &p.int(3) - p.one();
        assert_eq!(to_f64(&back), 0.0);
        assert_eq!(to_f64(&third), 1.0 / 3.0);
    }

    #[test]
    fn negative_powers() {
        let p = Precision::default();
        assert_eq!(to_f64(&powi(&p.real(2.0), -3)), 0.125);
        assert_eq!(to_f64(&powi(&p.real(2.0), 0)), 1.0);
    }

    #[test]
    fn factorials() {
        let p = Precision::default();
        assert_eq!(to_f64(&p.factorial(0)), 1.0);
        assert_eq!(to_f64(&p.factorial(5)), 120.0);
        assert_eq!(to_f64(&p.factorial(20)), 2_432_902_008_176_640_000.0);
    }

    #[test]
    fn rejects_tiny_precision() {
        assert!(Precision::new(32).is_err());
        assert!(Precision::new(256).is_ok());
    }

    #[test]
    fn cancellation_survives() {
        // (1 + 2^-80) - 1 vanishes in f64 but not at 128 bits.
        let p = Precision::default();
        let tiny = powi(&p.real(2.0), -80);
        let diff = (p.one() + &tiny) - p.one();
        assert_eq!(to_f64(&diff), 2f64.powi(-80));
    }
}
