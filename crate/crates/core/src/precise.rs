//! Fixed-point arithmetic on big integers with a caller-chosen number of
//! fractional bits. Used where an alternating sum loses more digits than
//! `f64` carries.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Value `mantissa · 2^{−bits}` for the owning [`FixedContext`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Fixed(BigInt);

impl Fixed {
    pub fn is_negative(&self) -> bool {
        self.0.sign() == Sign::Minus
    }

    pub fn abs(&self) -> Fixed {
        Fixed(self.0.abs())
    }

    pub fn add(&self, other: &Fixed) -> Fixed {
        Fixed(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Fixed) -> Fixed {
        Fixed(&self.0 - &other.0)
    }

    pub fn neg(&self) -> Fixed {
        Fixed(-&self.0)
    }

    pub fn add_assign(&mut self, other: &Fixed) {
        self.0 += &other.0;
    }

    pub fn sub_assign(&mut self, other: &Fixed) {
        self.0 -= &other.0;
    }

    /// Exact product with an integer.
    pub fn mul_int(&self, k: &BigInt) -> Fixed {
        Fixed(&self.0 * k)
    }

    pub fn mul_i64(&self, k: i64) -> Fixed {
        Fixed(&self.0 * k)
    }

    /// Truncating division by a non-zero integer.
    pub fn div_i64(&self, k: i64) -> Fixed {
        Fixed(&self.0 / k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct FixedContext {
    bits: u64,
}

impl FixedContext {
    pub fn new(bits: u64) -> Self {
        Self { bits }
    }

    pub fn zero(&self) -> Fixed {
        Fixed(BigInt::zero())
    }

    pub fn one(&self) -> Fixed {
        Fixed(BigInt::one() << self.bits)
    }

    pub fn from_int(&self, k: i64) -> Fixed {
        Fixed(BigInt::from(k) << self.bits)
    }

    /// Exact for every finite `x` whose lowest set bit is at or above `2^{−bits}`.
    pub fn from_f64(&self, x: f64) -> Fixed {
        assert!(x.is_finite(), "fixed-point conversion of non-finite value");
        if x == 0.0 {
            return self.zero();
        }
        let raw = x.to_bits();
        let negative = raw >> 63 == 1;
        let exp_field = ((raw >> 52) & 0x7ff) as i64;
        let frac = raw & ((1u64 << 52) - 1);
        let (mant, exp) = if exp_field == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_field - 1075)
        };
        let shift = exp + self.bits as i64;
        let mut v = BigInt::from(mant);
        if shift >= 0 {
            v <<= shift as usize;
        } else {
            v >>= (-shift) as usize;
        }
        Fixed(if negative { -v } else { v })
    }

    pub fn mul(&self, a: &Fixed, b: &Fixed) -> Fixed {
        Fixed((&a.0 * &b.0) >> self.bits as usize)
    }

    pub fn div(&self, a: &Fixed, b: &Fixed) -> Fixed {
        assert!(!b.0.is_zero(), "fixed-point division by zero");
        Fixed((&a.0 << self.bits as usize) / &b.0)
    }

    pub fn to_f64(&self, a: &Fixed) -> f64 {
        let mag = a.0.abs();
        let nbits = mag.bits() as i64;
        if nbits == 0 {
            return 0.0;
        }
        // Keep the leading 64 bits and rescale by the dropped exponent.
        let drop = (nbits - 64).max(0);
        let top = (&mag >> drop as usize).to_f64().unwrap_or(f64::INFINITY);
        let v = scale_by_pow2(top, drop - self.bits as i64);
        if a.is_negative() {
            -v
        } else {
            v
        }
    }

    /// `log2 |a|` (or −∞ for zero).
    pub fn log2_abs(&self, a: &Fixed) -> f64 {
        let mag = a.0.abs();
        let nbits = mag.bits() as i64;
        if nbits == 0 {
            return f64::NEG_INFINITY;
        }
        let drop = (nbits - 64).max(0);
        let top = (&mag >> drop as usize).to_f64().unwrap_or(f64::INFINITY);
        top.log2() + (drop - self.bits as i64) as f64
    }
}

fn scale_by_pow2(mut v: f64, mut e: i64) -> f64 {
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}
