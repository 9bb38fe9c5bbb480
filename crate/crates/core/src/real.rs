//! Adjustable-precision reals over astro-float.
//!
//! Rounding is to nearest with at least 64 guard bits beyond the requested
//! decimal precision; truncation errors are tracked separately by callers.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Working precision in bits for a target number of decimal digits.
pub fn bits_for_digits(digits: u32) -> usize {
    (digits as usize * 3322).div_ceil(1000) + 64
}

#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    p: usize,
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_sci(20))
    }
}

impl Real {
    fn wrap(v: BigFloat, p: usize) -> Real {
        assert!(!v.is_nan(), "NaN in real arithmetic");
        Real { v, p }
    }

    pub fn precision(&self) -> usize {
        self.p
    }

    pub fn zero(p: usize) -> Real {
        Real::wrap(BigFloat::from_u8(0, p), p)
    }

    pub fn one(p: usize) -> Real {
        Real::wrap(BigFloat::from_u8(1, p), p)
    }

    pub fn from_i64(v: i64, p: usize) -> Real {
        Real::wrap(BigFloat::from_i64(v, p), p)
    }

    pub fn from_f64(v: f64, p: usize) -> Real {
        Real::wrap(BigFloat::from_f64(v, p), p)
    }

    pub fn from_bigint(v: &BigInt, p: usize) -> Real {
        if let Some(x) = v.to_i64() {
            return Real::from_i64(x, p);
        }
        let s = v.to_string();
        let bits = (s.len() * 3322).div_ceil(1000) + 64;
        let f = with_cc(|cc| BigFloat::parse(&s, Radix::Dec, bits.max(p), RM, cc));
        Real::wrap(f, p)
    }

    pub fn from_rational(r: &BigRational, p: usize) -> Real {
        Real::from_bigint(r.numer(), p + 64).div(&Real::from_bigint(r.denom(), p + 64)).with_precision(p)
    }

    fn with_precision(mut self, p: usize) -> Real {
        self.v.set_precision(p, RM).expect("precision");
        self.p = p;
        self
    }

    fn pp(&self, o: &Real) -> usize {
        self.p.max(o.p)
    }

    pub fn add(&self, o: &Real) -> Real {
        let p = self.pp(o);
        Real::wrap(self.v.add(&o.v, p, RM), p)
    }

    pub fn sub(&self, o: &Real) -> Real {
        let p = self.pp(o);
        Real::wrap(self.v.sub(&o.v, p, RM), p)
    }

    pub fn mul(&self, o: &Real) -> Real {
        let p = self.pp(o);
        Real::wrap(self.v.mul(&o.v, p, RM), p)
    }

    pub fn div(&self, o: &Real) -> Real {
        assert!(!o.v.is_zero(), "division by zero");
        let p = self.pp(o);
        Real::wrap(self.v.div(&o.v, p, RM), p)
    }

    pub fn neg(&self) -> Real {
        Real::wrap(self.v.neg(), self.p)
    }

    pub fn abs(&self) -> Real {
        Real::wrap(self.v.abs(), self.p)
    }

    pub fn exp(&self) -> Real {
        Real::wrap(with_cc(|cc| self.v.exp(self.p, RM, cc)), self.p)
    }

    pub fn ln(&self) -> Real {
        assert!(self.is_positive(), "logarithm of a non-positive number");
        Real::wrap(with_cc(|cc| self.v.ln(self.p, RM, cc)), self.p)
    }

    pub fn sqrt(&self) -> Real {
        assert!(!self.is_negative(), "square root of a negative number");
        Real::wrap(self.v.sqrt(self.p, RM), self.p)
    }

    /// self^e for self > 0.
    pub fn pow(&self, e: &Real) -> Real {
        if e.is_zero() {
            return Real::one(self.p);
        }
        self.ln().mul(e).exp()
    }

    pub fn powi(&self, n: u64) -> Real {
        Real::wrap(self.v.powi(n as usize, self.p, RM), self.p)
    }

    pub fn pow_rational(&self, e: &BigRational) -> Real {
        self.pow(&Real::from_rational(e, self.p))
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.v.is_zero() && self.v.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        !self.v.is_zero() && self.v.is_negative()
    }

    pub fn max(&self, o: &Real) -> Real {
        if self >= o {
            self.clone()
        } else {
            o.clone()
        }
    }

    /// Exact value of the binary float.
    pub fn to_rational(&self) -> BigRational {
        let Some((words, _, sign, exp, _)) = self.v.as_raw_parts() else {
            panic!("non-finite real");
        };
        if self.v.is_zero() {
            return BigRational::zero();
        }
        let mut digits = Vec::with_capacity(words.len() * 2);
        for w in words {
            let w = *w;
            digits.push(w as u32);
            digits.push((w >> 32) as u32);
        }
        let bits = words.len() as i64 * astro_float::WORD_BIT_SIZE as i64;
        let m = BigInt::from(BigUint::new(digits));
        let m = if sign == Sign::Neg { -m } else { m };
        let shift = exp as i64 - bits;
        let two = BigInt::from(2);
        if shift >= 0 {
            BigRational::from_integer(m * num_traits::pow(two, shift as usize))
        } else {
            BigRational::new(m, num_traits::pow(two, (-shift) as usize))
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// Scientific notation with `sig` significant digits, e.g. `1.2346e-3`.
    pub fn to_sci(&self, sig: u32) -> String {
        format_sci(&self.to_rational(), sig)
    }
}

/// Scientific notation of an exact rational, rounded half away from zero.
pub fn format_sci(x: &BigRational, sig: u32) -> String {
    let sig = sig.max(1);
    if x.is_zero() {
        return "0".into();
    }
    let neg = x.is_negative();
    let a = x.abs();
    let ten = BigInt::from(10);
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    // decimal exponent e with 10^e ≤ a < 10^(e+1)
    let est = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let mut e = est;
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let scaled = &a * pow10(sig as i64 - 1 - e);
    let mut m = (scaled + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
    if m == num_traits::pow(ten.clone(), sig as usize) {
        m /= &ten;
        e += 1;
    }
    let s = m.to_string();
    let mant = if s.len() > 1 { format!("{}.{}", &s[..1], &s[1..]) } else { s };
    format!("{}{}e{}", if neg { "-" } else { "" }, mant, e)
}

impl PartialEq for Real {
    fn eq(&self, o: &Real) -> bool {
        self.partial_cmp(o) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, o: &Real) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|c| c.cmp(&0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nt::rat;

    #[test]
    fn exact_round_trip() {
        let p = bits_for_digits(30);
        for r in [rat(1, 1), rat(1, 2), rat(3, 1), rat(-5, 8), rat(1, 1024), rat(12345, 1)] {
            assert_eq!(Real::from_rational(&r, p).to_rational(), r);
        }
        let big = BigInt::from(3).pow(200);
        assert_eq!(Real::from_bigint(&big, 400).to_rational(), BigRational::from_integer(big));
    }

    #[test]
    fn elementary_functions() {
        let p = bits_for_digits(40);
        let two = Real::from_i64(2, p);
        let s = two.sqrt();
        let diff = s.mul(&s).sub(&two).abs();
        assert!(diff < Real::from_f64(1e-45, p));
        let e = Real::one(p).exp();
        assert_eq!(e.to_sci(20), "2.7182818284590452354e0");
        assert!((e.ln().to_f64() - 1.0).abs() < 1e-15);
        let x = Real::from_rational(&rat(1, 3), p).pow_rational(&rat(1, 2));
        assert!((x.to_f64() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sci_format() {
        assert_eq!(format_sci(&rat(1, 3), 5), "3.3333e-1");
        assert_eq!(format_sci(&rat(-2, 3), 3), "-6.67e-1");
        assert_eq!(format_sci(&rat(999996, 1), 5), "1.0000e6");
        assert_eq!(format_sci(&rat(0, 1), 5), "0");
        assert_eq!(format_sci(&rat(1, 1), 1), "1e0");
    }
}
