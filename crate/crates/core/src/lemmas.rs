//! Executable forms of the estimator's auxiliary inequalities and identities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::estimator::EstimatorSpec;
use crate::lpoly::LPolynomial;
use crate::nt::{binom_rat, falling, pow_i, rat_int};
use crate::real::Real;
use crate::semigroup::{count_landau, psi_value, FamilySpec};
use crate::series::{power2_transform, verify_power2_product, TruncatedSeries};

/// Constant in the bound on the inner double sum for m = 0.
pub const SUM_CONSTANT: i64 = 24;
/// Constant in the bound on the integral remainder for m = 0.
pub const INTEGRAL_CONSTANT: i64 = 12;
/// Residual constants for unbounded and bounded divisor counts.
pub const DIVISOR_CONSTANT: i64 = 16;
pub const BOUNDED_DIVISOR_CONSTANT: i64 = 42;

/// (−1)^i binom(−c1, n−i)/binom(−c1, n) and Σ_{k≤i} binom(i,k) binom(k−c1,k)/binom(n+c1−1,k).
pub fn binomial_quotient_identity(c1: &BigRational, n: u64, i: u64) -> Result<(BigRational, BigRational)> {
    if c1.is_integer() {
        return Err(Error::IntegerC1);
    }
    if i > n {
        return Err(Error::Malformed(format!("need i <= n, got i = {i}, n = {n}")));
    }
    let neg = -c1;
    let mut lhs = binom_rat(&neg, n - i) / binom_rat(&neg, n);
    if i % 2 == 1 {
        lhs = -lhs;
    }
    let top = rat_int(n) + c1 - rat_int(1);
    let mut rhs = BigRational::zero();
    for k in 0..=i {
        rhs += binom_rat(&rat_int(i), k) * binom_rat(&(rat_int(k) - c1), k) / binom_rat(&top, k);
    }
    Ok((lhs, rhs))
}

/// Exact left side and real right side of the partial-sum inequality
/// Σ_{k=m+1}^{i} binom(i,k) binom(k−c1,k)/binom(n+c1−1,k) ≤ bound.
pub fn partial_sum_check(c1: &BigRational, m: u64, i: u64, n: u64, p: usize) -> Result<(BigRational, Real)> {
    if !(m < i && i <= n) {
        return Err(Error::Malformed(format!("need m < i <= n, got m = {m}, i = {i}, n = {n}")));
    }
    if *c1 <= BigRational::zero() || *c1 >= BigRational::one() {
        return Err(Error::HypothesisViolation(format!("c1 = {c1} is outside (0, 1)")));
    }
    let top = rat_int(n) + c1 - rat_int(1);
    let mut lhs = BigRational::zero();
    for k in m + 1..=i {
        lhs += binom_rat(&rat_int(i), k) * binom_rat(&(rat_int(k) - c1), k) / binom_rat(&top, k);
    }
    let rhs = if i < n {
        let v = falling(&rat_int(i), m + 1) / falling(&top, m + 1) * rat_int(i - m);
        Real::from_rational(&v, p)
    } else {
        let nr = Real::from_i64(n as i64, p);
        let c1r = Real::from_rational(c1, p);
        nr.mul(&Real::from_i64((n - m) as i64, p).ln().add(&Real::from_i64(2, p).div(&c1r)))
    };
    Ok((lhs, rhs))
}

/// |truncated a^{(i)}(x)|, its tail majorant and the envelope
/// α^{−i}(c2+i−1)_i (1 − x/α)^{−c2−i}, at rational 0 ≤ x < α.
pub struct DerivativeEnvelope {
    pub partial: Real,
    pub tail: Real,
    pub envelope: Real,
}

impl DerivativeEnvelope {
    pub fn holds(&self) -> bool {
        self.partial <= self.envelope.add(&self.tail)
    }
}

pub fn derivative_envelope_check(
    spec: &EstimatorSpec,
    x: &BigRational,
    i: usize,
    p: usize,
) -> Result<DerivativeEnvelope> {
    if x.is_negative() || x * x >= spec.alpha_sq {
        return Err(Error::Malformed("need 0 <= x < alpha".into()));
    }
    let a = spec.a_coeffs();
    let n = a.len() - 1;
    let ii = i as u64;
    let mut sum = BigRational::zero();
    let mut xp = BigRational::one();
    for (j, aj) in a.iter().enumerate().skip(i) {
        if !aj.is_zero() {
            sum += falling(&rat_int(j as u64), ii) * aj * &xp;
        }
        xp *= x;
    }
    let one = Real::one(p);
    let alpha = Real::from_rational(&spec.alpha_sq, p).sqrt();
    let s = Real::from_rational(x, p).div(&alpha);
    let c2 = &spec.c2;
    let alpha_i = alpha.powi(ii);
    // Σ_{j>N} (j)_i binom(c2+j−1, j) α^{−i} s^{j−i}, geometric from j = N+1
    let tail = if x.is_zero() {
        Real::zero(p)
    } else {
        let j = (n + 1) as u64;
        let first = falling(&rat_int(j), ii) * binom_rat(&(c2 + rat_int(j) - rat_int(1)), j);
        let first = Real::from_rational(&first, p).mul(&s.powi(j - ii)).div(&alpha_i);
        let growth = (c2 + rat_int(j)) / rat_int(j + 1 - ii);
        let growth = if growth > BigRational::one() { growth } else { BigRational::one() };
        let rho = s.mul(&Real::from_rational(&growth, p));
        if rho >= one {
            return Err(Error::HypothesisViolation("series too short for a tail bound at this x".into()));
        }
        first.div(&one.sub(&rho))
    };
    let rising = falling(&(c2 + rat_int(ii) - rat_int(1)), ii);
    let envelope = Real::from_rational(&rising, p)
        .div(&alpha_i)
        .mul(&one.sub(&s).pow(&Real::from_rational(&(-(c2 + rat_int(ii))), p)));
    Ok(DerivativeEnvelope { partial: Real::from_rational(&sum, p).abs(), tail, envelope })
}

/// n = ⌈1 + 5(t+1)ln(t+1)⌉ and the value (n−1)/(ln n + 1), which should be ≥ t.
pub fn threshold_inequality(t: &BigRational, p: usize) -> (u64, Real) {
    let one = Real::one(p);
    let t1 = Real::from_rational(t, p).add(&one);
    let bound = one.add(&Real::from_i64(5, p).mul(&t1).mul(&t1.ln()));
    let n = bound.to_rational().ceil().to_integer().to_u64().expect("moderate t");
    let v = Real::from_i64(n as i64 - 1, p).div(&Real::from_i64(n as i64, p).ln().add(&one));
    (n, v)
}

/// The inner double sum for m = 0, exactly, against 24 times its envelope.
pub fn sum_bound_check(spec: &EstimatorSpec, n: u64, p: usize) -> Result<(Real, Real)> {
    spec.check()?;
    let a = spec.a_coeffs();
    if (a.len() as u64) <= n {
        return Err(Error::Malformed(format!("need at least {} coefficients", n + 1)));
    }
    let c1 = &spec.c1;
    let top = rat_int(n) + c1 - rat_int(1);
    let inner: Vec<BigRational> = (1..=n).map(|k| binom_rat(&(rat_int(k) - c1), k) / binom_rat(&top, k)).collect();
    let mut s1 = BigRational::zero();
    let mut bp = BigRational::one();
    for i in 1..=n {
        bp *= &spec.beta;
        let mut w = BigRational::zero();
        for k in 1..=i {
            w += binom_rat(&rat_int(i), k) * &inner[k as usize - 1];
        }
        s1 += &bp * w * &a[i as usize];
    }
    let one = Real::one(p);
    let r = spec.r(p);
    let nr = Real::from_i64(n as i64, p);
    let c1r = Real::from_rational(c1, p);
    let c2r = Real::from_rational(&spec.c2, p);
    let binom_c2 = Real::from_rational(&binom_rat(&(rat_int(n) + &spec.c2 - rat_int(1)), n), p);
    let far = binom_c2.mul(&r.powi(n)).mul(&nr.mul(&nr.ln()).add(&Real::from_i64(2, p).mul(&nr).div(&c1r)));
    let near = r.div(&nr).mul(&c2r).mul(&one.sub(&r).pow(&c2r.neg())).mul(&one.add(&c2r.mul(&r)));
    Ok((Real::from_rational(&s1, p).abs(), Real::from_i64(SUM_CONSTANT, p).mul(&far.add(&near))))
}

/// Residual of a divisor family's ψ against q^{rn}/r.
#[derive(Clone, Debug)]
pub struct DivisorResidual {
    pub n: u64,
    pub psi: BigInt,
    pub ratio: f64,
    pub constant: i64,
}

impl DivisorResidual {
    pub fn holds(&self) -> bool {
        self.ratio <= self.constant as f64
    }
}

/// |ψ(n) − q^{rn}/r| / ((max(g,1)/r) q^{rn/2}) for the unbounded (ell = None)
/// or bounded divisor family.
pub fn divisor_residual(l: &LPolynomial, r: u32, ell: Option<u32>, n: u64) -> Result<DivisorResidual> {
    let spec = match ell {
        None => FamilySpec::Divisors { l: l.clone(), r },
        Some(ell) => FamilySpec::BoundedDivisors { l: l.clone(), r, ell },
    };
    let psi = psi_value(&spec, n)?;
    let q = l.q();
    let rn = r as u64 * n;
    let dev = (&psi - BigRational::new(pow_i(q, rn), BigInt::from(r))).abs();
    let g = l.genus().max(1) as f64;
    // compare in log space: q^{rn/2} overflows f64 quickly
    let log_ratio = ln_rational(&dev) - (g / r as f64).ln() - (rn as f64 / 2.0) * (q as f64).ln();
    let ratio = if dev.is_zero() { 0.0 } else { log_ratio.exp() };
    Ok(DivisorResidual {
        n,
        psi: psi.to_integer(),
        ratio,
        constant: if ell.is_some() { BOUNDED_DIVISOR_CONSTANT } else { DIVISOR_CONSTANT },
    })
}

/// ln x for positive rationals of any size.
pub fn ln_rational(x: &BigRational) -> f64 {
    fn ln_int(v: &BigInt) -> f64 {
        let bits = v.bits();
        if bits < 1000 {
            return v.to_f64().unwrap().ln();
        }
        let shift = bits - 60;
        (v >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
    ln_int(x.numer()) - ln_int(x.denom())
}

/// F(x)² = F(x²)(1+x)/(1−qx) for the sums-of-squares count series, to order N.
pub fn functional_equation_holds(q: u64, order: usize) -> Result<bool> {
    let table = count_landau(q, order)?;
    let f = TruncatedSeries::new(table.values.iter().map(|v| rat_int(BigInt::from(v.clone()))).collect());
    let lhs = f.mul(&f)?;
    let mut num = vec![BigRational::zero(); order + 1];
    num[0] = BigRational::one();
    if order >= 1 {
        num[1] = BigRational::one();
    }
    let mut den = vec![BigRational::zero(); order + 1];
    den[0] = BigRational::one();
    if order >= 1 {
        den[1] = -rat_int(q);
    }
    let rhs = f.substitute_power(2).mul(&TruncatedSeries::new(num))?.mul(&TruncatedSeries::new(den).inverse()?)?;
    Ok(lhs == rhs)
}

/// The dyadic product identity for a family's exponent series, plus the
/// closed form of its factor B: B⁴(1 − qx²) = (1+x)² for the sums-of-squares
/// family and B⁴(1 − qx) = 1 + qx for the even-multiplicity family (with x
/// the series variable).
pub fn power2_identity_holds(family: &FamilySpec, order: usize) -> Result<bool> {
    let q = family.q();
    let coeffs = crate::estimator::family_coefficients(family, order)?;
    let a = TruncatedSeries::from_exponents(&coeffs);
    let b_exps = power2_transform(&coeffs);
    let b = TruncatedSeries::from_exponents(&b_exps);
    if !verify_power2_product(&a, &b, order)? {
        return Ok(false);
    }
    let b2 = b.mul(&b)?;
    let b4 = b2.mul(&b2)?;
    let poly = |c: &[(usize, BigRational)]| {
        let mut v = vec![BigRational::zero(); order + 1];
        for (i, x) in c {
            if *i <= order {
                v[*i] += x;
            }
        }
        TruncatedSeries::new(v)
    };
    let one = BigRational::one();
    let (lhs, rhs) = match family {
        FamilySpec::Landau { .. } => {
            let onex = poly(&[(0, one.clone()), (1, one.clone())]);
            (b4.mul(&poly(&[(0, one.clone()), (2, -rat_int(q))]))?, onex.mul(&onex)?)
        }
        FamilySpec::EvenMultiplicity { .. } => {
            (b4.mul(&poly(&[(0, one.clone()), (1, -rat_int(q))]))?, poly(&[(0, one.clone()), (1, rat_int(q))]))
        }
        _ => return Ok(true),
    };
    Ok(lhs == rhs)
}
