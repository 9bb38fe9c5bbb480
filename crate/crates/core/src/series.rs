//! Exact truncated power series.
//!
//! Coefficients live in any ring implementing [`Coeff`]; the two used here are
//! `BigRational` and [`QPoly`] (rational polynomials in a formal symbol q).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::nt::{divisors, mobius, rat_int};

/// Coefficient ring of a [`TruncatedSeries`]: a commutative Q-algebra.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn is_zero_value(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, r: &BigRational) -> Self;
    fn neg(&self) -> Self {
        Self::zero_value().sub(self)
    }
}

impl Coeff for BigRational {
    fn zero_value() -> Self {
        Zero::zero()
    }
    fn one_value() -> Self {
        One::one()
    }
    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, r: &BigRational) -> Self {
        self * r
    }
}

/// Polynomial in q with rational coefficients, low-to-high, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct QPoly(pub Vec<BigRational>);

impl QPoly {
    pub fn constant(c: BigRational) -> Self {
        let mut p = QPoly(vec![c]);
        p.trim();
        p
    }

    /// The monomial c·q^k.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        let mut p = QPoly(v);
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.0.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, q: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * q + c)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !Zero::is_zero(*c))
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})q"),
                _ => format!("({c})q^{i}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

impl Coeff for QPoly {
    fn zero_value() -> Self {
        QPoly(Vec::new())
    }
    fn one_value() -> Self {
        QPoly(vec![BigRational::one()])
    }
    fn is_zero_value(&self) -> bool {
        self.0.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let z = BigRational::zero();
        let mut p = QPoly((0..n).map(|i| self.0.get(i).unwrap_or(&z) + other.0.get(i).unwrap_or(&z)).collect());
        p.trim();
        p
    }
    fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let z = BigRational::zero();
        let mut p = QPoly((0..n).map(|i| self.0.get(i).unwrap_or(&z) - other.0.get(i).unwrap_or(&z)).collect());
        p.trim();
        p
    }
    fn mul(&self, other: &Self) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return QPoly(Vec::new());
        }
        let mut v = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        let mut p = QPoly(v);
        p.trim();
        p
    }
    fn scale(&self, r: &BigRational) -> Self {
        let mut p = QPoly(self.0.iter().map(|c| c * r).collect());
        p.trim();
        p
    }
}

/// Power series c_0 + c_1 x + ... + c_N x^N modulo x^{N+1}.
#[derive(Clone, PartialEq, Debug)]
pub struct TruncatedSeries<C: Coeff = BigRational> {
    coeffs: Vec<C>,
}

impl<C: Coeff> TruncatedSeries<C> {
    /// Series of order `coeffs.len() - 1`; panics on an empty vector.
    pub fn new(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least one coefficient");
        TruncatedSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncatedSeries { coeffs: vec![C::zero_value(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = C::one_value();
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c: Vec<C> = self.coeffs.iter().take(order + 1).cloned().collect();
        c.resize(order + 1, C::zero_value());
        TruncatedSeries { coeffs: c }
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::TruncationMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(TruncatedSeries { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(TruncatedSeries { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect() })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| c.scale(r)).collect() }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let n = self.order();
        let mut out = vec![C::zero_value(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_value() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero_value() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// exp(a) for a_0 = 0, from f' = a' f.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero_value() {
            return Err(Error::BadConstantTerm("0"));
        }
        let n = self.order();
        let mut f = vec![C::zero_value(); n + 1];
        f[0] = C::one_value();
        for m in 1..=n {
            let mut acc = C::zero_value();
            for k in 1..=m {
                if !self.coeffs[k].is_zero_value() {
                    acc = acc.add(&self.coeffs[k].mul(&f[m - k]).scale(&rat_int(k as u64)));
                }
            }
            f[m] = acc.scale(&BigRational::new(BigInt::one(), BigInt::from(m)));
        }
        Ok(TruncatedSeries { coeffs: f })
    }

    /// log(a) for a_0 = 1, from a b' = a'.
    pub fn log(&self) -> Result<Self> {
        if self.coeffs[0] != C::one_value() {
            return Err(Error::BadConstantTerm("1"));
        }
        let n = self.order();
        let mut b = vec![C::zero_value(); n + 1];
        for m in 1..=n {
            let mut acc = self.coeffs[m].scale(&rat_int(m as u64));
            for k in 1..m {
                if !b[k].is_zero_value() {
                    acc = acc.sub(&b[k].mul(&self.coeffs[m - k]).scale(&rat_int(k as u64)));
                }
            }
            b[m] = acc.scale(&BigRational::new(BigInt::one(), BigInt::from(m)));
        }
        Ok(TruncatedSeries { coeffs: b })
    }

    /// 1/a for a_0 = 1.
    pub fn inverse(&self) -> Result<Self> {
        if self.coeffs[0] != C::one_value() {
            return Err(Error::BadConstantTerm("1"));
        }
        let n = self.order();
        let mut g = vec![C::zero_value(); n + 1];
        g[0] = C::one_value();
        for m in 1..=n {
            let mut acc = C::zero_value();
            for k in 1..=m {
                acc = acc.add(&self.coeffs[k].mul(&g[m - k]));
            }
            g[m] = acc.neg();
        }
        Ok(TruncatedSeries { coeffs: g })
    }

    /// a^r = exp(r log a) for a_0 = 1.
    pub fn pow_rational(&self, r: &BigRational) -> Result<Self> {
        self.log()?.scale(r).exp()
    }

    /// a(x^k), same order.
    pub fn substitute_power(&self, k: usize) -> Self {
        assert!(k >= 1);
        let n = self.order();
        let mut out = vec![C::zero_value(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i * k > n {
                break;
            }
            out[i * k] = c.clone();
        }
        TruncatedSeries { coeffs: out }
    }

    /// exp(Σ_{n≥1} ã_n x^n / n) from the exponent coefficients ã_1..ã_N
    /// (`exps[0]` is ignored).
    pub fn from_exponents(exps: &[C]) -> Self {
        let n = exps.len() - 1;
        let mut log = vec![C::zero_value(); n + 1];
        for k in 1..=n {
            log[k] = exps[k].scale(&BigRational::new(BigInt::one(), BigInt::from(k)));
        }
        TruncatedSeries { coeffs: log }.exp().expect("constant term is zero")
    }
}

/// Free-function form of [`TruncatedSeries::mul`].
pub fn series_mul<C: Coeff>(a: &TruncatedSeries<C>, b: &TruncatedSeries<C>) -> Result<TruncatedSeries<C>> {
    a.mul(b)
}

/// Coefficients binom(n + c1 − 1, n) β^{−n} of (1 − x/β)^{−c1}.
pub fn binomial_series(beta_inv: &BigRational, c1: &BigRational, order: usize) -> TruncatedSeries {
    let mut c = Vec::with_capacity(order + 1);
    c.push(BigRational::one());
    for n in 1..=order {
        let prev: &BigRational = &c[n - 1];
        let next = prev * (rat_int(n as u64 - 1) + c1) / rat_int(n as u64) * beta_inv;
        c.push(next);
    }
    TruncatedSeries::new(c)
}

/// Generator counts g(1..=N) of a free commutative monoid, index 0 unused.
///
/// Values may be negative: some families are naturally written as a product
/// with signed exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorCounts {
    g: Vec<BigInt>,
}

impl GeneratorCounts {
    /// From g(1), g(2), ... (the slice starts at degree 1).
    pub fn new(values: Vec<BigInt>) -> Self {
        let mut g = vec![BigInt::zero()];
        g.extend(values);
        GeneratorCounts { g }
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize) -> BigInt) -> Self {
        GeneratorCounts::new((1..=order).map(&mut f).collect())
    }

    pub fn order(&self) -> usize {
        self.g.len() - 1
    }

    pub fn get(&self, n: usize) -> &BigInt {
        &self.g[n]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.g.iter().all(|x| !x.is_negative())
    }

    /// ψ(n) = Σ_{d|n} d·g(d), index 0 unused.
    pub fn psi(&self) -> Vec<BigInt> {
        psi_from_g(self)
    }
}

/// ψ(n) = Σ_{d|n} d·g(d) for n ≤ N, index 0 unused.
pub fn psi_from_g(g: &GeneratorCounts) -> Vec<BigInt> {
    let n_max = g.order();
    let mut psi = vec![BigInt::zero(); n_max + 1];
    for (n, slot) in psi.iter_mut().enumerate().skip(1) {
        *slot = divisors(n as u64).into_iter().map(|d| BigInt::from(d) * g.get(d as usize)).sum();
    }
    psi
}

/// Inverse of [`psi_from_g`]: n·g(n) = Σ_{d|n} μ(n/d) ψ(d).
pub fn g_from_psi(psi: &[BigInt]) -> Result<GeneratorCounts> {
    let n_max = psi.len() - 1;
    let mut g = Vec::with_capacity(n_max);
    for n in 1..=n_max as u64 {
        let mut acc = BigInt::zero();
        for d in divisors(n) {
            let mu = mobius(n / d);
            if mu != 0 {
                acc += BigInt::from(mu) * &psi[d as usize];
            }
        }
        let (quot, rem) = acc.div_rem(&BigInt::from(n));
        if !rem.is_zero() {
            return Err(Error::NotInvertible(n as usize));
        }
        g.push(quot);
    }
    Ok(GeneratorCounts::new(g))
}

/// Integer coefficients of exp(Σ ψ(n) x^n / n); fails if a division is not exact.
pub fn product_from_psi(psi: &[BigInt]) -> Result<Vec<BigInt>> {
    let n_max = psi.len() - 1;
    let mut f = vec![BigInt::zero(); n_max + 1];
    f[0] = BigInt::one();
    for n in 1..=n_max {
        let mut acc = BigInt::zero();
        for k in 1..=n {
            if !psi[k].is_zero() && !f[n - k].is_zero() {
                acc += &psi[k] * &f[n - k];
            }
        }
        let (quot, rem) = acc.div_rem(&BigInt::from(n));
        if !rem.is_zero() {
            return Err(Error::NotInvertible(n));
        }
        f[n] = quot;
    }
    Ok(f)
}

/// ∏_{n≤N} (1 − x^n)^{−g(n)} to order N.
pub fn product_form(g: &GeneratorCounts, order: usize) -> TruncatedSeries {
    let g = if g.order() >= order {
        GeneratorCounts::new(g.g[1..=order].to_vec())
    } else {
        let mut v = g.g[1..].to_vec();
        v.resize(order, BigInt::zero());
        GeneratorCounts::new(v)
    };
    let ints = product_from_psi(&psi_from_g(&g)).expect("integral exponents give integral coefficients");
    TruncatedSeries::new(ints.into_iter().map(BigRational::from_integer).collect())
}

/// b_n = ã_n − ã_{n/2} (second term only for even n); index 0 unused.
pub fn power2_transform(a: &[BigRational]) -> Vec<BigRational> {
    (0..a.len())
        .map(|n| {
            if n == 0 {
                BigRational::zero()
            } else if n % 2 == 0 {
                &a[n] - &a[n / 2]
            } else {
                a[n].clone()
            }
        })
        .collect()
}

/// Checks A(x) = ∏_{2^k ≤ N} B(x^{2^k})^{2^{−k}} exactly to order N.
pub fn verify_power2_product(a: &TruncatedSeries, b: &TruncatedSeries, order: usize) -> Result<bool> {
    let a = a.truncate(order);
    let b = b.truncate(order);
    let mut prod = TruncatedSeries::one(order);
    let mut k = 0u32;
    while (1usize << k) <= order.max(1) {
        let factor =
            b.substitute_power(1 << k).pow_rational(&BigRational::new(BigInt::one(), BigInt::from(1u64 << k)))?;
        prod = prod.mul(&factor)?;
        k += 1;
    }
    Ok(prod == a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nt::{binom_u, pow_i, rat};
    use proptest::prelude::*;

    fn series(v: &[i64]) -> TruncatedSeries {
        TruncatedSeries::new(v.iter().map(|&x| rat_int(x)).collect())
    }

    /// Coefficients of (1 - x^n)^{-g} by the binomial theorem, for g of either sign.
    fn factor_series(n: usize, g: i64, order: usize) -> TruncatedSeries {
        let mut c = vec![BigRational::zero(); order + 1];
        let x = rat_int(-g);
        let mut j = 0;
        while j * n <= order {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            c[j * n] = crate::nt::binom_rat(&x, j as u64) * rat_int(sign);
            j += 1;
        }
        TruncatedSeries::new(c)
    }

    #[test]
    fn mul_examples() {
        let a = series(&[1, 1, 0]);
        let b = series(&[1, -1, 0]);
        assert_eq!(a.mul(&b).unwrap(), series(&[1, 0, -1]));
        assert_eq!(a.mul(&TruncatedSeries::one(2)).unwrap(), a);
        assert_eq!(a.mul(&series(&[1, 2])), Err(Error::TruncationMismatch(2, 1)));
    }

    #[test]
    fn square_of_half_power_is_geometric() {
        let s = binomial_series(&rat_int(3), &rat(1, 2), 30);
        let sq = s.mul(&s).unwrap();
        let geom = TruncatedSeries::new((0..=30).map(|n| BigRational::from_integer(pow_i(3, n))).collect());
        assert_eq!(sq, geom);
    }

    #[test]
    fn exp_log_examples() {
        assert_eq!(TruncatedSeries::<BigRational>::zero(5).exp().unwrap(), TruncatedSeries::one(5));
        let exps: Vec<BigRational> = (0..=20).map(|n| BigRational::from_integer(pow_i(3, n))).collect();
        let f = TruncatedSeries::from_exponents(&exps);
        for n in 0..=20 {
            assert_eq!(*f.coeff(n), BigRational::from_integer(pow_i(3, n as u64)));
        }
        assert_eq!(series(&[1, 1]).exp(), Err(Error::BadConstantTerm("0")));
        assert_eq!(series(&[0, 1]).log(), Err(Error::BadConstantTerm("1")));
    }

    #[test]
    fn binomial_examples() {
        let q = 5u64;
        let s = binomial_series(&rat_int(q as i64), &rat(1, 2), 12);
        for n in 0..=12u64 {
            let expect = BigRational::new(BigInt::from(binom_u(2 * n, n)) * pow_i(q, n), pow_i(4, n));
            assert_eq!(*s.coeff(n as usize), expect);
        }
        assert_eq!(*s.coeff(1), rat(5, 2));
        let geom = binomial_series(&rat_int(q as i64), &rat_int(1), 10);
        for n in 0..=10 {
            assert_eq!(*geom.coeff(n), BigRational::from_integer(pow_i(q, n as u64)));
        }
    }

    #[test]
    fn binomial_is_exp_of_log() {
        for (bi, c1) in [(rat_int(3), rat(1, 2)), (rat(7, 2), rat(-2, 3)), (rat_int(9), rat(5, 4))] {
            let direct = binomial_series(&bi, &c1, 40);
            // -log(1 - x/β) = Σ β^{-n} x^n / n, so the exponent coefficients are c1 β^{-n}
            let exps: Vec<BigRational> = (0..=40).map(|n| &c1 * num_traits::pow(bi.clone(), n)).collect();
            assert_eq!(TruncatedSeries::from_exponents(&exps), direct);
        }
    }

    #[test]
    fn product_form_examples() {
        assert_eq!(product_form(&GeneratorCounts::new(vec![BigInt::zero(); 4]), 4), TruncatedSeries::one(4));
        let g = GeneratorCounts::new(vec![BigInt::from(2), BigInt::from(2)]);
        assert_eq!(product_form(&g, 2), series(&[1, 2, 5]));
        let pi = GeneratorCounts::from_fn(15, |n| BigInt::from(crate::primes::pi_q(3, n as u64)));
        let f = product_form(&pi, 15);
        for n in 0..=15 {
            assert_eq!(*f.coeff(n), BigRational::from_integer(pow_i(3, n as u64)));
        }
    }

    #[test]
    fn product_form_matches_binomial_expansion() {
        let gs = [3i64, -1, 2, 0, -2, 1, 4];
        let order = 14;
        let g = GeneratorCounts::new(gs.iter().map(|&x| BigInt::from(x)).collect());
        let mut expect = TruncatedSeries::one(order);
        for (i, &gi) in gs.iter().enumerate() {
            expect = expect.mul(&factor_series(i + 1, gi, order)).unwrap();
        }
        assert_eq!(product_form(&g, order), expect);
    }

    #[test]
    fn psi_examples() {
        let pi = GeneratorCounts::from_fn(12, |n| BigInt::from(crate::primes::pi_q(4, n as u64)));
        let psi = psi_from_g(&pi);
        for n in 1..=12 {
            assert_eq!(psi[n], pow_i(4, n as u64));
        }
        let mut v = vec![BigInt::zero(); 9];
        v[0] = BigInt::one();
        let psi = psi_from_g(&GeneratorCounts::new(v));
        assert!(psi[1..].iter().all(|x| x.is_one()));
        let mut bad = vec![BigInt::zero(); 3];
        bad[2] = BigInt::one();
        assert_eq!(g_from_psi(&bad), Err(Error::NotInvertible(2)));
    }

    #[test]
    fn power2_examples() {
        let q = 3u64;
        // ψ(n) = q^n/2 + e_n with e_n = 1/2 + Σ_{i=1}^{v2(n)} (q^{n/2^i} - 1)/2
        let psi: Vec<BigRational> = (0..=20u64)
            .map(|n| {
                if n == 0 {
                    return BigRational::zero();
                }
                let mut e = rat(1, 2);
                let mut m = n;
                while m % 2 == 0 {
                    m /= 2;
                    e += BigRational::new(pow_i(q, m) - 1, BigInt::from(2));
                }
                BigRational::new(pow_i(q, n), BigInt::from(2)) + e
            })
            .collect();
        let b = power2_transform(&psi);
        for n in 1..=20u64 {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(b[n as usize], BigRational::new(pow_i(q, n) - sign, BigInt::from(2)));
        }
        // B(x) = sqrt((1 + x) / (1 - qx))
        let order = 20;
        let big_b = TruncatedSeries::from_exponents(&b);
        let ratio =
            series(&[1, 1]).truncate(order).mul(&series(&[1, -(q as i64)]).truncate(order).inverse().unwrap()).unwrap();
        assert_eq!(big_b.mul(&big_b).unwrap(), ratio);
        let big_a = TruncatedSeries::from_exponents(&psi);
        assert!(verify_power2_product(&big_a, &big_b, order).unwrap());
        let zero = vec![BigRational::zero(); 9];
        assert!(power2_transform(&zero).iter().all(Zero::is_zero));
        let one = TruncatedSeries::one(8);
        assert!(verify_power2_product(&one, &one, 8).unwrap());
        assert!(!verify_power2_product(&big_b, &big_b, order).unwrap());
    }

    #[test]
    fn qpoly_ring() {
        let q = QPoly::monomial(rat_int(1), 1);
        let p = q.add(&QPoly::one_value()).mul(&q.sub(&QPoly::one_value()));
        assert_eq!(p, QPoly(vec![rat_int(-1), rat_int(0), rat_int(1)]));
        assert_eq!(p.eval(&rat_int(3)), rat_int(8));
        assert_eq!(p.degree(), Some(2));
        let s = TruncatedSeries::new(vec![QPoly::one_value(), q.clone(), QPoly::zero_value()]);
        let inv = s.inverse().unwrap();
        assert_eq!(*inv.coeff(2), q.mul(&q));
    }

    fn arb_series(order: usize) -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec((-20i64..20, 1i64..6), order).prop_map(move |v| {
            let mut c = vec![BigRational::zero()];
            c.extend(v.into_iter().map(|(n, d)| rat(n, d)));
            TruncatedSeries::new(c)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn log_inverts_exp(a in arb_series(16)) {
            prop_assert_eq!(a.exp().unwrap().log().unwrap(), a);
        }

        #[test]
        fn psi_round_trip(g in proptest::collection::vec(0i64..1000, 24)) {
            let g = GeneratorCounts::new(g.into_iter().map(BigInt::from).collect());
            prop_assert_eq!(g_from_psi(&psi_from_g(&g)).unwrap(), g);
        }

        #[test]
        fn products_count_nonnegatively(g in proptest::collection::vec(0i64..50, 12)) {
            let g = GeneratorCounts::new(g.into_iter().map(BigInt::from).collect());
            let f = product_form(&g, 12);
            prop_assert!(f.coeffs().iter().all(|c| c.is_integer() && !c.is_negative()));
        }

        #[test]
        fn inverse_is_inverse(a in arb_series(12)) {
            let one_plus = TruncatedSeries::one(12).add(&a).unwrap();
            let prod = one_plus.mul(&one_plus.inverse().unwrap()).unwrap();
            prop_assert_eq!(prod, TruncatedSeries::one(12));
        }
    }
}
