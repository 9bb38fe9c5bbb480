//! Coefficient asymptotics for a(x)·(1 − x/β)^{−c1} with explicit error terms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Elem, FieldSpec};
use crate::lpoly::LPolynomial;
use crate::nt::{binom_rat, falling, odd_part, pow_i, rat, rat_int};
use crate::poly::MonicPoly;
use crate::primes::{phi_m, ArithPrimeTable};
use crate::real::{bits_for_digits, format_sci, Real};
use crate::semigroup::{count, FamilySpec};
use crate::series::TruncatedSeries;

/// Implied constant of the m = 0 error term.
pub const THM_CONSTANT: i64 = 24;
/// Implied constant of the simplified bound past the threshold.
pub const COROLLARY_CONSTANT: i64 = 48;

/// a(x) = exp(Σ ã_n x^n / n), b(x) = (1 − x/β)^{−c1}.
///
/// α is stored through α² so that every family used here has exact
/// parameters (α^{-2} is a power of q).
#[derive(Clone, Debug)]
pub struct EstimatorSpec {
    pub alpha_sq: BigRational,
    pub beta: BigRational,
    pub c1: BigRational,
    pub c2: BigRational,
    pub m: usize,
    /// ã_0..=ã_N; index 0 is ignored.
    pub coeffs: Vec<BigRational>,
}

#[derive(Clone, Debug)]
pub struct EstimateOptions {
    pub digits: u32,
    /// Constant applied to the m ≥ 1 error shape (not certified).
    pub m_constant: BigRational,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions { digits: 30, m_constant: rat_int(THM_CONSTANT) }
    }
}

#[derive(Clone, Debug)]
pub struct EstimateResult {
    pub n: u64,
    pub m: usize,
    /// binom(n + c1 − 1, n)·β^{−n}.
    pub b_n: BigRational,
    /// Truncated main term (exact); the true M is within `eval_tail_bound`.
    pub main_term: BigRational,
    pub eval_tail_bound: Real,
    pub error_bound: Real,
    /// True when `error_bound` uses the proved m = 0 constant.
    pub certified: bool,
    /// Bound assembled from the explicit lemma inequalities (any m).
    pub chain_bound: Real,
    /// 48·exp(3c2r)·c2r/n, valid when `in_range`.
    pub corollary_bound: Real,
    pub threshold: u64,
    pub in_range: bool,
    pub eval_order: usize,
}

impl EstimateResult {
    /// Largest deviation |f_n/b_n − M| allowed by the corollary form.
    pub fn corollary_radius(&self) -> Real {
        self.corollary_bound.add(&self.eval_tail_bound)
    }

    /// |f_n/b_n − M_truncated| for an exact coefficient f_n.
    pub fn deviation(&self, exact: &BigInt) -> BigRational {
        (BigRational::from_integer(exact.clone()) / &self.b_n - &self.main_term).abs()
    }

    pub fn to_json(&self, sig: u32) -> Value {
        json!({
            "n": self.n,
            "m": self.m,
            "b_n": format_sci(&self.b_n, sig),
            "main_term": format_sci(&self.main_term, sig),
            "eval_tail_bound": self.eval_tail_bound.to_sci(6),
            "error_bound": self.error_bound.to_sci(6),
            "error_bound_certified": self.certified,
            "chain_bound": self.chain_bound.to_sci(6),
            "corollary_bound": self.corollary_bound.to_sci(6),
            "threshold": self.threshold,
            "in_range": self.in_range,
            "eval_order": self.eval_order,
        })
    }
}

fn hyp(msg: impl Into<String>) -> Error {
    Error::HypothesisViolation(msg.into())
}

impl EstimatorSpec {
    pub fn eval_order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// r² = β²/α².
    pub fn r_sq(&self) -> BigRational {
        &self.beta * &self.beta / &self.alpha_sq
    }

    pub fn r(&self, p: usize) -> Real {
        Real::from_rational(&self.r_sq(), p).sqrt()
    }

    /// Checks every hypothesis, including the coefficient envelope over all
    /// stored coefficients.
    pub fn check(&self) -> Result<()> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        if self.c1 <= zero || self.c1 >= one {
            return Err(hyp(format!("c1 = {} is outside (0, 1)", self.c1)));
        }
        if self.c2 <= zero {
            return Err(hyp("c2 must be positive"));
        }
        if self.beta <= zero || self.alpha_sq <= &self.beta * &self.beta {
            return Err(hyp("need alpha > beta > 0"));
        }
        if self.r_sq() * rat_int(2) > one {
            return Err(hyp("r = beta/alpha exceeds 1/sqrt(2)"));
        }
        // ã_n² · α^{2n} ≤ c2²
        let c2sq = &self.c2 * &self.c2;
        let mut apow = one.clone();
        for (n, a) in self.coeffs.iter().enumerate().skip(1) {
            apow *= &self.alpha_sq;
            if a * a * &apow > c2sq {
                return Err(hyp(format!("coefficient envelope |a_{n}| <= c2 alpha^-{n} fails")));
            }
        }
        Ok(())
    }

    /// Power-series coefficients a_0..=a_N of a(x).
    pub fn a_coeffs(&self) -> Vec<BigRational> {
        TruncatedSeries::from_exponents(&self.coeffs).into_coeffs()
    }

    /// Majorant of Σ_{j>N} (j)_k |a_j| β^{j−k} from |a_j| ≤ binom(c2+j−1, j)·α^{−j}.
    fn derivative_tail(&self, k: usize, r: &Real, p: usize) -> Result<Real> {
        let n = self.eval_order();
        let j = (n + 1) as u64;
        let first = falling(&rat_int(j), k as u64) * binom_rat(&(&self.c2 + rat_int(j) - rat_int(1)), j);
        let first = Real::from_rational(&first, p).mul(&r.powi(j));
        let growth = (&self.c2 + rat_int(j)) / rat_int(j + 1 - k as u64);
        let growth = if growth > BigRational::one() { growth } else { BigRational::one() };
        let rho = r.mul(&Real::from_rational(&growth, p));
        let one = Real::one(p);
        if rho >= one {
            return Err(hyp("evaluation order too small for a convergent tail bound"));
        }
        let beta_k = Real::from_rational(&self.beta, p).powi(k as u64);
        Ok(first.div(&one.sub(&rho)).div(&beta_k))
    }

    /// Exact truncated a^{(k)}(β) for k = 0..=kmax, with tail majorants.
    pub fn derivatives_at_beta(&self, kmax: usize, p: usize) -> Result<Vec<(BigRational, Real)>> {
        let a = self.a_coeffs();
        let r = self.r(p);
        let mut out = Vec::with_capacity(kmax + 1);
        for k in 0..=kmax {
            let mut sum = BigRational::zero();
            let mut bpow = BigRational::one();
            for (j, aj) in a.iter().enumerate().skip(k) {
                if !aj.is_zero() {
                    sum += falling(&rat_int(j as u64), k as u64) * aj * &bpow;
                }
                bpow *= &self.beta;
            }
            out.push((sum, self.derivative_tail(k, &r, p)?));
        }
        Ok(out)
    }

    pub fn threshold(&self, p: usize) -> Result<u64> {
        simplified_bound_threshold(&self.c1, &self.c2, &self.r(p))
    }
}

/// Smallest n past which the simplified 48-constant bound holds.
pub fn simplified_bound_threshold(c1: &BigRational, c2: &BigRational, r: &Real) -> Result<u64> {
    let p = r.precision().max(128);
    let one = Real::one(p);
    let half = Real::from_rational(&rat(1, 2), p);
    let slack = Real::from_rational(&BigRational::new(BigInt::one(), BigInt::one() << (p - 16)), p);
    if !r.is_positive() || r.mul(r) > half.add(&slack) {
        return Err(hyp("threshold needs r in (0, 1/sqrt(2)]"));
    }
    if *c1 <= BigRational::zero() || *c1 >= BigRational::one() {
        return Err(hyp(format!("c1 = {c1} is outside (0, 1)")));
    }
    let lr = one.div(r).ln();
    let c2r = Real::from_rational(c2, p);
    let t = c2r.mul(&Real::from_i64(2, p)).add(&Real::from_i64(4, p)).div(&lr);
    let t1 = t.add(&one);
    let first = Real::from_i64(5, p).mul(&t1).mul(&t1.ln()).add(&one);
    let c1r = Real::from_rational(c1, p);
    let second = Real::from_i64(2, p).mul(&one.div(&c1r).ln()).div(&lr).add(&one);
    let bound = first.max(&second);
    let n = bound.to_rational().ceil().to_integer();
    Ok(n.to_u64().unwrap_or(u64::MAX).max(1))
}

/// (x)_k as a real.
fn falling_real(x: &BigRational, k: usize, p: usize) -> Real {
    Real::from_rational(&falling(x, k as u64), p)
}

/// Main term, its evaluation tail and error bounds for the n-th coefficient.
pub fn estimate_coefficient(spec: &EstimatorSpec, n: u64, opts: &EstimateOptions) -> Result<EstimateResult> {
    Ok(estimate_range(spec, &[n], opts)?.remove(0))
}

/// As [`estimate_coefficient`] for several n, evaluating a^{(k)}(β) once.
pub fn estimate_range(spec: &EstimatorSpec, ns: &[u64], opts: &EstimateOptions) -> Result<Vec<EstimateResult>> {
    spec.check()?;
    let p = bits_for_digits(opts.digits);
    let ders = spec.derivatives_at_beta(spec.m, p)?;
    ns.iter().map(|&n| estimate_with(spec, n, opts, &ders)).collect()
}

fn estimate_with(
    spec: &EstimatorSpec,
    n: u64,
    opts: &EstimateOptions,
    ders: &[(BigRational, Real)],
) -> Result<EstimateResult> {
    let m = spec.m;
    if m as u64 >= n {
        return Err(Error::ExpansionOrderTooLarge { m, n });
    }
    let p = bits_for_digits(opts.digits);
    let c1 = &spec.c1;
    let c2 = &spec.c2;
    let nr = rat_int(n);
    let one_r = BigRational::one();
    let b_n = binom_rat(&(&nr + c1 - &one_r), n) / num_traits::pow(spec.beta.clone(), n as usize);

    let mut main = BigRational::zero();
    let mut tail = Real::zero(p);
    let mut kfact = BigRational::one();
    let mut bpow = BigRational::one();
    for (k, (dk, tk)) in ders.iter().enumerate() {
        if k > 0 {
            kfact *= rat_int(k as u64);
            bpow *= &spec.beta;
        }
        let kk = k as u64;
        let w = binom_rat(&(rat_int(kk) - c1), kk) / binom_rat(&(&nr + c1 - &one_r), kk) * &bpow / &kfact;
        main += &w * dk;
        tail = tail.add(&Real::from_rational(&w.abs(), p).mul(tk));
    }

    let r = spec.r(p);
    let one = Real::one(p);
    let nreal = Real::from_i64(n as i64, p);
    let c1r = Real::from_rational(c1, p);
    let c2r = Real::from_rational(c2, p);
    let e3 = Real::from_i64(3, p).mul(&c2r).mul(&r).exp();
    let binom_c2 = Real::from_rational(&binom_rat(&(&nr + c2 - &one_r), n), p);
    let rn = r.powi(n);
    // binom(n+c2−1, n)·(4n²/c1)·rⁿ
    let far = binom_c2.mul(&Real::from_i64(4, p)).mul(&nreal).mul(&nreal).div(&c1r).mul(&rn);
    let near = r.div(&nreal).powi(m as u64 + 1).mul(&falling_real(&(c2 + rat_int(m as u64)), m + 1, p));
    let (constant, certified) = if m == 0 {
        (Real::from_i64(THM_CONSTANT, p), true)
    } else {
        (Real::from_rational(&opts.m_constant, p), false)
    };
    let error_bound = constant.mul(&e3).mul(&near.add(&far));

    // S′, S″ and the integral remainder, each from its explicit inequality.
    let mm = m as u64;
    let s_prime = binom_c2
        .mul(&rn)
        .mul(&nreal)
        .mul(&Real::from_i64((n - mm) as i64, p).ln().add(&Real::from_i64(2, p).div(&c1r)));
    let one_minus_r = one.sub(&r);
    let r_ratio = r.div(&one_minus_r);
    let pow_c2 = |e: &BigRational| one_minus_r.pow(&Real::from_rational(&(-e), p));
    let s_dprime = if mm + 1 == n {
        Real::zero(p)
    } else {
        falling_real(&(c2 + rat_int(mm)), m + 1, p)
            .div(&falling_real(&(&nr + c1 - &one_r), m + 1, p))
            .mul(&r_ratio.powi(mm + 1))
            .mul(&pow_c2(c2))
            .mul(&one.add(&r_ratio.mul(&Real::from_rational(&(c2 + rat_int(mm + 1)), p))))
    };
    let s_int = binom_c2
        .mul(&one.add(&c2r.mul(&r)))
        .mul(&Real::from_rational(&(rat_int(n * (1 + mm)) / rat_int(n - mm)), p))
        .mul(&rn)
        .mul(&pow_c2(&(c2 + rat_int(mm + 2))));
    let chain_bound = s_prime.add(&s_dprime).add(&s_int);

    let corollary_bound = Real::from_i64(COROLLARY_CONSTANT, p).mul(&e3).mul(&c2r).mul(&r).div(&nreal);
    let threshold = simplified_bound_threshold(c1, c2, &r)?;
    Ok(EstimateResult {
        n,
        m,
        b_n,
        main_term: main,
        eval_tail_bound: tail,
        error_bound,
        certified,
        chain_bound,
        corollary_bound,
        threshold,
        in_range: n >= threshold,
        eval_order: spec.eval_order(),
    })
}

/// Evaluation order for which the tail of a(β) drops below 10^{−digits−5}.
pub fn default_eval_order(alpha_sq: &BigRational, beta: &BigRational, c2: &BigRational, digits: u32) -> usize {
    let r = (beta * beta / alpha_sq).to_f64().unwrap().sqrt();
    let c2 = c2.to_f64().unwrap();
    let target = -((digits + 5) as f64) * std::f64::consts::LN_10;
    let mut log_binom = 0.0f64;
    let mut j = 0usize;
    loop {
        j += 1;
        log_binom += ((c2 + j as f64 - 1.0) / j as f64).ln();
        let log_term = log_binom + 4.0 * (j as f64).ln() + j as f64 * r.ln();
        if (j > 8 && log_term < target) || j >= 5000 {
            return j;
        }
    }
}

/// e_n as an exact rational.
fn e_coeff(q: u64, n: u64) -> BigRational {
    crate::semigroup::e_n(q, n)
}

fn f_coeff(q: u64, n: u64) -> BigRational {
    BigRational::new(pow_i(q, odd_part(n)), BigInt::from(2))
}

/// ψ(1..=N) of a family from its exact generator counts.
fn exact_psi(family: &FamilySpec, order: usize) -> Result<Vec<BigInt>> {
    let g = crate::semigroup::generator_counts(family, order)?;
    Ok(crate::series::psi_from_g(&g))
}

/// Estimator parameters for a counted family.
///
/// The evaluation order is chosen from `digits` unless `eval_order` is given.
pub fn family_estimator(
    family: &FamilySpec,
    m: usize,
    digits: u32,
    eval_order: Option<usize>,
) -> Result<EstimatorSpec> {
    family.validate()?;
    let q = family.q();
    let qr = rat_int(q);
    let (alpha_sq, beta, c1, c2) = match family {
        FamilySpec::Landau { .. } => (qr.recip(), qr.recip(), rat(1, 2), rat(1, 1)),
        FamilySpec::EvenMultiplicity { .. } | FamilySpec::EvenDegree { .. } => {
            ((&qr * &qr).recip(), (&qr * &qr).recip(), rat(1, 2), rat(1, 2))
        }
        FamilySpec::EvenDegreeSquarefree { .. } => ((&qr * &qr).recip(), (&qr * &qr).recip(), rat(1, 2), rat(1, 1)),
        FamilySpec::Divisors { l, r } | FamilySpec::BoundedDivisors { l, r, .. } => {
            let g = l.genus().max(1) as i64;
            let k = if matches!(family, FamilySpec::Divisors { .. }) { 16 } else { 42 };
            let qr_pow = BigRational::from_integer(pow_i(q, *r as u64));
            (qr_pow.recip(), qr_pow.recip(), rat(1, *r as i64), rat(k * g, *r as i64))
        }
        FamilySpec::Arith { field, m: modulus, .. } => {
            let phi = BigRational::from_integer(phi_m(field, modulus)?.into());
            if phi == BigRational::one() {
                return Err(hyp("phi(m) = 1 gives c1 = 1, outside (0, 1); no estimate is produced"));
            }
            (qr.recip(), qr.recip(), phi.recip(), rat_int(modulus.degree() as u64 + 3))
        }
    };
    let n_eval = eval_order.unwrap_or_else(|| default_eval_order(&alpha_sq, &beta, &c2, digits));
    let coeffs = family_coefficients(family, n_eval)?;
    Ok(EstimatorSpec { alpha_sq, beta, c1, c2, m, coeffs })
}

/// ã_0..=ã_N for a family (ψ minus the main exponential term).
pub fn family_coefficients(family: &FamilySpec, order: usize) -> Result<Vec<BigRational>> {
    let q = family.q();
    let mut out = vec![BigRational::zero(); order + 1];
    match family {
        FamilySpec::Landau { .. } => {
            for (n, c) in out.iter_mut().enumerate().skip(1) {
                *c = e_coeff(q, n as u64);
            }
        }
        FamilySpec::EvenMultiplicity { .. } => {
            for (n, c) in out.iter_mut().enumerate().skip(1) {
                *c = f_coeff(q, n as u64);
            }
        }
        FamilySpec::EvenDegree { .. } => {
            for (n, c) in out.iter_mut().enumerate().skip(1) {
                *c = -f_coeff(q, n as u64);
            }
        }
        FamilySpec::EvenDegreeSquarefree { .. } => {
            for (n, c) in out.iter_mut().enumerate().skip(1) {
                *c = -f_coeff(q, n as u64);
                if n % 2 == 0 {
                    *c -= BigRational::from_integer(pow_i(q, n as u64) - pow_i(q, odd_part(n as u64)));
                }
            }
        }
        FamilySpec::Divisors { r, .. } | FamilySpec::BoundedDivisors { r, .. } => {
            let psi = exact_psi(family, order)?;
            for (n, c) in out.iter_mut().enumerate().skip(1) {
                *c = BigRational::from_integer(psi[n].clone())
                    - BigRational::new(pow_i(q, *r as u64 * n as u64), BigInt::from(*r));
            }
        }
        FamilySpec::Arith { field, a, m } => {
            let table = ArithPrimeTable::new(field, m, order)?;
            let series = table.class_series(a)?;
            let phi = BigInt::from(phi_m(field, m)?);
            for (n, c) in out.iter_mut().enumerate().skip(1) {
                let mut psi = BigInt::zero();
                for d in crate::nt::divisors(n as u64) {
                    psi += BigInt::from(series[d as usize].clone()) * d;
                }
                *c = BigRational::from_integer(psi) - BigRational::new(pow_i(q, n as u64), phi.clone());
            }
        }
    }
    Ok(out)
}

/// Estimate for a family together with its exact count when `exact` is set.
pub fn estimate_family(
    family: &FamilySpec,
    n: u64,
    m: usize,
    opts: &EstimateOptions,
    exact: bool,
) -> Result<(EstimateResult, Option<BigInt>)> {
    let spec = family_estimator(family, m, opts.digits, None)?;
    let est = estimate_coefficient(&spec, n, opts)?;
    let value = if exact { Some(BigInt::from(count(family, n as usize)?.values[n as usize].clone())) } else { None };
    Ok((est, value))
}

/// Convenience constructor for the progression family.
pub fn arith_family(field: &FieldSpec, a: &[Elem], m: &MonicPoly) -> FamilySpec {
    FamilySpec::Arith { field: field.clone(), a: a.to_vec(), m: m.clone() }
}

/// Whether n is past the explicit validity threshold of the divisor-family
/// estimate (with α and β in their natural roles).
pub fn divisor_range_check(l: &LPolynomial, r: u32, ell: Option<u32>, n: u64) -> bool {
    n as f64 >= divisor_range_threshold(l, r, ell)
}

/// max{2(u+1)ln(u+1) + 1, 4 ln r / (r ln q) + 1} with u = (4·42·g̃/r + 8)/(r ln q).
pub fn divisor_range_threshold(l: &LPolynomial, r: u32, _ell: Option<u32>) -> f64 {
    let g = l.genus().max(1) as f64;
    let r = r as f64;
    let lq = (l.q() as f64).ln();
    let u = (4.0 * 42.0 * g / r + 8.0) / (r * lq) + 1.0;
    let first = 2.0 * u * u.ln() + 1.0;
    let second = 4.0 / lq * r.ln() / r + 1.0;
    first.max(second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use crate::semigroup::count_landau;

    fn opts() -> EstimateOptions {
        EstimateOptions { digits: 25, ..Default::default() }
    }

    #[test]
    fn thresholds() {
        let p = 256;
        let r3 = Real::from_rational(&rat(1, 3), p).sqrt();
        assert_eq!(simplified_bound_threshold(&rat(1, 2), &rat(1, 1), &r3).unwrap(), 149);
        let r9 = Real::from_rational(&rat(1, 3), p);
        assert_eq!(simplified_bound_threshold(&rat(1, 2), &rat(1, 1), &r9).unwrap(), 62);
        let too_big = Real::from_f64(0.8, p);
        assert!(simplified_bound_threshold(&rat(1, 2), &rat(1, 1), &too_big).is_err());
        assert!(simplified_bound_threshold(&rat(1, 1), &rat(1, 1), &r3).is_err());
        // q = 2 sits exactly on r = 1/sqrt(2)
        let r2 = Real::from_rational(&rat(1, 2), p).sqrt();
        assert!(simplified_bound_threshold(&rat(1, 2), &rat(4, 1), &r2).is_ok());
    }

    #[test]
    fn pure_binomial() {
        let spec = EstimatorSpec {
            alpha_sq: rat(1, 3),
            beta: rat(1, 3),
            c1: rat(1, 2),
            c2: rat(1, 1),
            m: 0,
            coeffs: vec![BigRational::zero(); 130],
        };
        let est = estimate_coefficient(&spec, 20, &opts()).unwrap();
        assert_eq!(est.main_term, BigRational::one());
        let b = crate::series::binomial_series(&rat_int(3), &rat(1, 2), 20);
        assert_eq!(*b.coeff(20), est.b_n);
        assert!(est.eval_tail_bound.to_f64() < 1e-20);
    }

    #[test]
    fn landau_enclosure_q3_n30() {
        let fam = FamilySpec::Landau { q: 3 };
        let (est, exact) = estimate_family(&fam, 30, 0, &opts(), true).unwrap();
        let dev = est.deviation(&exact.unwrap());
        let radius = est.error_bound.add(&est.eval_tail_bound);
        assert!(Real::from_rational(&dev, 128) <= radius);
        assert!(!est.in_range);
        assert!(est.certified);
    }

    #[test]
    fn hypotheses_enforced() {
        let f2 = build_field(2, 1, None).unwrap();
        let fam = arith_family(&f2, &[1], &MonicPoly::t());
        assert!(matches!(family_estimator(&fam, 0, 20, None), Err(Error::HypothesisViolation(_))));
        let mut spec = family_estimator(&FamilySpec::Landau { q: 3 }, 0, 20, Some(40)).unwrap();
        spec.coeffs[7] = rat_int(10_000);
        assert!(matches!(estimate_coefficient(&spec, 10, &opts()), Err(Error::HypothesisViolation(_))));
        let spec = family_estimator(&FamilySpec::Landau { q: 3 }, 3, 20, Some(40)).unwrap();
        assert!(matches!(estimate_coefficient(&spec, 3, &opts()), Err(Error::ExpansionOrderTooLarge { .. })));
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let s1 = family_estimator(&FamilySpec::EvenMultiplicity { q }, 0, 20, Some(60)).unwrap();
            s1.check().unwrap();
            if q % 2 == 1 {
                family_estimator(&FamilySpec::Landau { q }, 0, 20, Some(60)).unwrap().check().unwrap();
            }
        }
    }

    #[test]
    fn family_coefficients_match_exact_psi() {
        for q in [2u64, 3, 5] {
            for fam in [
                FamilySpec::EvenMultiplicity { q },
                FamilySpec::EvenDegree { q },
                FamilySpec::EvenDegreeSquarefree { q },
            ] {
                let closed = family_coefficients(&fam, 24).unwrap();
                let psi = exact_psi(&fam, 24).unwrap();
                for n in 1..=24u64 {
                    let main = BigRational::new(pow_i(q, 2 * n), BigInt::from(2));
                    assert_eq!(
                        closed[n as usize],
                        BigRational::from_integer(psi[n as usize].clone()) - main,
                        "{}",
                        fam.id()
                    );
                }
            }
        }
        let landau = family_coefficients(&FamilySpec::Landau { q: 5 }, 30).unwrap();
        let psi = exact_psi(&FamilySpec::Landau { q: 5 }, 30).unwrap();
        for n in 1..=30u64 {
            let main = BigRational::new(pow_i(5, n), BigInt::from(2));
            assert_eq!(landau[n as usize], BigRational::from_integer(psi[n as usize].clone()) - main);
        }
    }

    #[test]
    fn second_order_term_moves_toward_exact() {
        // With m = 1 the main term should track B(n, 3) better than m = 0.
        let fam = FamilySpec::Landau { q: 3 };
        let exact = BigInt::from(count_landau(3, 60).unwrap().values[60].clone());
        let s0 = family_estimator(&fam, 0, 25, None).unwrap();
        let s1 = family_estimator(&fam, 1, 25, None).unwrap();
        let e0 = estimate_coefficient(&s0, 60, &opts()).unwrap();
        let e1 = estimate_coefficient(&s1, 60, &opts()).unwrap();
        assert!(e1.deviation(&exact) < e0.deviation(&exact));
        assert!(!e1.certified);
        let dev = Real::from_rational(&e1.deviation(&exact), 128);
        assert!(dev <= e1.chain_bound.add(&e1.eval_tail_bound));
    }

    #[test]
    fn divisor_range() {
        let l = LPolynomial::rational(3).unwrap();
        assert!(divisor_range_check(&l, 2, None, 10_000));
        let g1 = LPolynomial::from_i64(5, &[1, -2, 5]).unwrap();
        let t = divisor_range_threshold(&g1, 2, None);
        // u = (84 + 8)/(2 ln 5) + 1
        let u = 92.0 / (2.0 * 5f64.ln()) + 1.0;
        assert!((t - (2.0 * u * u.ln() + 1.0)).abs() < 1e-9);
        for n in 1..200 {
            if divisor_range_check(&g1, 2, None, n) {
                assert!(divisor_range_check(&g1, 2, None, n + 1));
            }
        }
    }
}
