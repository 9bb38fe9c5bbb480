//! L-polynomials of function fields and the place counts they determine.

use nalgebra::{Complex, DMatrix};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::nt::{self, divisors, mobius, pow_i};

/// Degrees up to which place counts are checked when an L-polynomial is built.
const VALIDATION_DEGREES: u64 = 24;
/// Relative tolerance on |ω| / sqrt(q) − 1 for the root-modulus check.
pub const RH_TOLERANCE: f64 = 1e-9;

/// Numerator L_K(u) = Σ c_i u^i of a zeta function over F_q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPolynomial {
    q: u64,
    coeffs: Vec<BigInt>,
}

impl LPolynomial {
    /// Validates c_0 = 1, even degree, root moduli and nonnegative counts.
    pub fn new(q: u64, coeffs: Vec<BigInt>) -> Result<Self> {
        nt::prime_power(q).ok_or(Error::NotPrimePower(q))?;
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.first() != Some(&BigInt::one()) {
            return Err(Error::Malformed("L-polynomial must have constant term 1".into()));
        }
        if !(coeffs.len() - 1).is_multiple_of(2) {
            return Err(Error::Malformed("L-polynomial must have even degree".into()));
        }
        let l = LPolynomial { q, coeffs };
        l.check_root_moduli()?;
        for n in 1..=VALIDATION_DEGREES.max(2 * l.genus() as u64 + 4) {
            l.pi_k(n)?;
        }
        Ok(l)
    }

    /// The rational function field, L = 1.
    pub fn rational(q: u64) -> Result<Self> {
        Self::new(q, vec![BigInt::one()])
    }

    pub fn from_i64(q: u64, coeffs: &[i64]) -> Result<Self> {
        Self::new(q, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Parses `{"q": 5, "coefficients": [1, -2, 5]}`; coefficients may be
    /// JSON integers or decimal strings.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let q =
            v.get("q").and_then(Value::as_u64).ok_or_else(|| Error::Malformed("missing integer field 'q'".into()))?;
        let arr = v
            .get("coefficients")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Malformed("missing array field 'coefficients'".into()))?;
        let coeffs = arr
            .iter()
            .map(|c| match c {
                Value::Number(n) => n.as_i64().map(BigInt::from),
                Value::String(s) => s.parse().ok(),
                _ => None,
            })
            .collect::<Option<Vec<BigInt>>>()
            .ok_or_else(|| Error::Malformed("coefficients must be integers".into()))?;
        Self::new(q, coeffs)
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "q": self.q,
            "coefficients": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn genus(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Power sums s_1..s_N of the inverse roots via Newton's identities.
    pub fn power_sums(&self, n_max: usize) -> Vec<BigInt> {
        let c = |k: usize| self.coeffs.get(k).cloned().unwrap_or_default();
        let mut s = vec![BigInt::zero(); n_max + 1];
        for n in 1..=n_max {
            let mut acc = -BigInt::from(n) * c(n);
            for k in 1..n.min(self.coeffs.len()) {
                acc -= c(k) * &s[n - k];
            }
            s[n] = acc;
        }
        s
    }

    /// N_n, the number of degree-one places over F_{q^n}.
    pub fn point_count(&self, n: u64) -> BigInt {
        let s = self.power_sums(n as usize);
        pow_i(self.q, n) + 1 - &s[n as usize]
    }

    /// Number of places of degree n.
    pub fn pi_k(&self, n: u64) -> Result<BigUint> {
        assert!(n >= 1, "degree must be positive");
        let s = self.power_sums(n as usize);
        let count = |d: u64| pow_i(self.q, d) + 1 - &s[d as usize];
        let mut acc = BigInt::zero();
        for d in divisors(n) {
            let mu = mobius(n / d);
            if mu != 0 {
                acc += BigInt::from(mu) * count(d);
            }
        }
        let (quot, rem) = acc.div_rem(&BigInt::from(n));
        if !rem.is_zero() || quot.is_negative() {
            return Err(Error::NegativeCount(n));
        }
        Ok(quot.to_biguint().unwrap())
    }

    /// π_K(1..=N), index 0 unused.
    pub fn place_counts(&self, n_max: u64) -> Result<Vec<BigUint>> {
        let mut out = vec![BigUint::zero()];
        for n in 1..=n_max {
            out.push(self.pi_k(n)?);
        }
        Ok(out)
    }

    /// Largest |ω|/sqrt(q) − 1 over the distinct inverse roots (f64 diagnostic).
    pub fn root_modulus_deviation(&self) -> f64 {
        self.inverse_root_moduli().into_iter().map(|r| (r / (self.q as f64).sqrt() - 1.0).abs()).fold(0.0, f64::max)
    }

    fn check_root_moduli(&self) -> Result<()> {
        let sq = (self.q as f64).sqrt();
        for r in self.inverse_root_moduli() {
            let dev = (r / sq - 1.0).abs();
            if dev.is_nan() || dev > RH_TOLERANCE {
                return Err(Error::RhViolation { modulus: format!("{r:.12}"), expected: format!("{sq:.12}") });
            }
        }
        Ok(())
    }

    /// Moduli of the distinct roots of t^{2g} L(1/t).
    fn inverse_root_moduli(&self) -> Vec<f64> {
        if self.genus() == 0 {
            return Vec::new();
        }
        // Reversed polynomial, high coefficient first is c_0 = 1, so it is monic.
        let rev: Vec<BigRational> = self.coeffs.iter().rev().map(|c| BigRational::from_integer(c.clone())).collect();
        let sqf = squarefree_part(&rev);
        let coeffs: Vec<f64> = sqf.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        roots(&coeffs).into_iter().map(|z| z.norm()).collect()
    }
}

type RatPoly = Vec<BigRational>;

fn rp_trim(mut a: RatPoly) -> RatPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn rp_divrem(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly) {
    let mut r = a.clone();
    if a.len() < b.len() {
        return (Vec::new(), r);
    }
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut quot = vec![BigRational::zero(); a.len() - db];
    for i in (db..a.len()).rev() {
        let c = &r[i] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i - db + j] -= &c * bj;
        }
        quot[i - db] = c;
    }
    r.truncate(db);
    (rp_trim(quot), rp_trim(r))
}

fn rp_monic(a: RatPoly) -> RatPoly {
    let lead = a.last().unwrap().clone();
    a.into_iter().map(|c| c / &lead).collect()
}

/// f / gcd(f, f'), monic; coefficients low-to-high.
fn squarefree_part(f: &RatPoly) -> RatPoly {
    let deriv: RatPoly =
        rp_trim(f.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect());
    let (mut x, mut y) = (f.clone(), deriv);
    while !y.is_empty() {
        let r = rp_divrem(&x, &y).1;
        x = y;
        y = r;
    }
    let g = rp_monic(x);
    rp_monic(rp_divrem(f, &g).0)
}

/// Complex roots of a monic real polynomial (low-to-high), by companion
/// matrix eigenvalues refined with Newton steps.
fn roots(coeffs: &[f64]) -> Vec<Complex<f64>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -coeffs[i];
    }
    let eig = comp.complex_eigenvalues();
    let eval = |z: Complex<f64>| -> (Complex<f64>, Complex<f64>) {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + Complex::new(c, 0.0);
        }
        (p, dp)
    };
    eig.iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..50 {
                let (p, dp) = eval(z);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                z -= step;
                if step.norm() <= 1e-16 * z.norm().max(1.0) {
                    break;
                }
            }
            z
        })
        .collect()
}
