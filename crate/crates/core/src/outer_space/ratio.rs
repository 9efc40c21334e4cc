use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// An exact nonnegative ratio `num / den` of integers, compared by cross
/// multiplication. Logs are taken only when a real distance is requested.
#[derive(Clone)]
pub struct LengthRatio {
    num: BigUint,
    den: BigUint,
}

impl LengthRatio {
    pub fn new(num: impl Into<BigUint>, den: impl Into<BigUint>) -> Self {
        let den = den.into();
        assert!(!den.is_zero(), "zero denominator");
        LengthRatio { num: num.into(), den }
    }

    pub fn one() -> Self {
        LengthRatio::new(1u32, 1u32)
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn denominator(&self) -> &BigUint {
        &self.den
    }

    pub fn mul(&self, other: &LengthRatio) -> LengthRatio {
        LengthRatio {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        }
    }

    pub fn recip(&self) -> LengthRatio {
        LengthRatio::new(self.den.clone(), self.num.clone())
    }

    /// `ln(num / den)`; exactly 0 when `num == den`.
    ///
    /// When both parts are exact in `f64` the quotient is rounded once, so the
    /// result is monotone in the ratio.
    pub fn ln(&self) -> f64 {
        if self.num == self.den {
            return 0.0;
        }
        match (exact_f64(&self.num), exact_f64(&self.den)) {
            (Some(n), Some(d)) => (n / d).ln(),
            _ => ln_big(&self.num) - ln_big(&self.den),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.ln().exp()
    }

    /// The same ratio in lowest terms.
    pub fn reduced(&self) -> LengthRatio {
        let (mut a, mut b) = (self.num.clone(), self.den.clone());
        while !b.is_zero() {
            let r = &a % &b;
            a = std::mem::replace(&mut b, r);
        }
        LengthRatio {
            num: &self.num / &a,
            den: &self.den / &a,
        }
    }
}

fn exact_f64(x: &BigUint) -> Option<f64> {
    (x.bits() <= 53).then(|| x.to_f64().expect("small integer"))
}

/// Natural log of a big integer without overflowing `f64`.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value fits in f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Compares `a / b` with `c / d` for positive denominators.
#[inline]
pub(crate) fn cmp_fractions(a: u128, b: u128, c: u128, d: u128) -> Ordering {
    match (a.checked_mul(d), c.checked_mul(b)) {
        (Some(x), Some(y)) => x.cmp(&y),
        _ => (BigUint::from(a) * d).cmp(&(BigUint::from(c) * b)),
    }
}

impl PartialEq for LengthRatio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for LengthRatio {}

impl PartialOrd for LengthRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LengthRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl fmt::Debug for LengthRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Display for LengthRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_is_by_value() {
        assert_eq!(LengthRatio::new(2u32, 4u32), LengthRatio::new(1u32, 2u32));
        assert!(LengthRatio::new(9u32, 5u32) > LengthRatio::new(17u32, 10u32));
        assert_eq!(LengthRatio::new(7u32, 7u32).ln(), 0.0);
    }

    #[test]
    fn fast_comparison_falls_back_on_overflow() {
        let big = u128::MAX / 3;
        assert_eq!(cmp_fractions(big, 3, big, 3), Ordering::Equal);
        assert_eq!(cmp_fractions(big, 3, big - 1, 3), Ordering::Greater);
        assert_eq!(cmp_fractions(1, 2, 2, 3), Ordering::Less);
    }

    #[test]
    fn log_of_huge_integers() {
        let x = BigUint::from(1u32) << 5000u32;
        let expected = 5000.0 * std::f64::consts::LN_2;
        assert!((ln_big(&x) - expected).abs() < 1e-9);
        assert!((ln_big(&BigUint::from(10u32)) - 10f64.ln()).abs() < 1e-15);
    }
}
