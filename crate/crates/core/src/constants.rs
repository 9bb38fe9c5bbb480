//! Limiting constants by several independent formulas, each with an explicit
//! truncation bound.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::estimator::{family_coefficients, family_estimator};
use crate::field::{Elem, FieldSpec};
use crate::nt::{odd_part, pow_i, rat, rat_int};
use crate::poly::MonicPoly;
use crate::primes::{pi_chi2, pi_q, Chi2Class};
use crate::real::{bits_for_digits, Real};
use crate::semigroup::{e_n, FamilySpec};

#[derive(Clone, Debug)]
pub struct MethodValue {
    pub tag: &'static str,
    pub value: Real,
    pub tail_bound: Real,
    /// Number of terms or factors kept.
    pub truncation: usize,
}

#[derive(Clone, Debug)]
pub struct ConstantReport {
    pub name: &'static str,
    pub params: Value,
    pub digits: u32,
    pub methods: Vec<MethodValue>,
}

impl ConstantReport {
    /// Value of the method with the smallest tail bound.
    pub fn consensus(&self) -> &MethodValue {
        self.methods
            .iter()
            .min_by(|a, b| a.tail_bound.partial_cmp(&b.tail_bound).unwrap())
            .expect("at least one method")
    }

    fn rounding_slack(&self, v: &Real) -> Real {
        let p = v.precision();
        v.abs().mul(&Real::from_rational(&BigRational::new(BigInt::one(), BigInt::one() << (p - 40)), p))
    }

    /// Largest |v_i − v_j| − (t_i + t_j + slack) over all pairs; ≤ 0 means
    /// every pair agrees within its declared bounds.
    pub fn worst_disagreement(&self) -> Real {
        let p = self.methods[0].value.precision();
        let mut worst = Real::from_i64(-1, p);
        for (i, a) in self.methods.iter().enumerate() {
            for b in &self.methods[i + 1..] {
                let gap = a.value.sub(&b.value).abs();
                let allowed = a.tail_bound.add(&b.tail_bound).add(&self.rounding_slack(&a.value));
                worst = worst.max(&gap.sub(&allowed));
            }
        }
        worst
    }

    pub fn methods_agree(&self) -> bool {
        !self.worst_disagreement().is_positive()
    }

    pub fn to_json(&self) -> Value {
        let sig = self.digits;
        let mut obj = serde_json::Map::new();
        obj.insert("name".into(), json!(self.name));
        if let Some(q) = self.params.get("q") {
            obj.insert("q".into(), q.clone());
        }
        obj.insert("params".into(), self.params.clone());
        obj.insert(
            "methods".into(),
            Value::Array(
                self.methods
                    .iter()
                    .map(|m| {
                        json!({
                            "tag": m.tag,
                            "value": m.value.to_sci(sig),
                            "tail_bound": m.tail_bound.to_sci(4),
                            "truncation": m.truncation,
                        })
                    })
                    .collect(),
            ),
        );
        obj.insert("consensus".into(), json!(self.consensus().value.to_sci(sig)));
        obj.insert("methods_agree".into(), json!(self.methods_agree()));
        Value::Object(obj)
    }
}

struct Ctx {
    q: u64,
    p: usize,
    digits: u32,
}

impl Ctx {
    fn new(q: u64, digits: u32) -> Ctx {
        Ctx { q, p: bits_for_digits(digits), digits }
    }

    fn r(&self, x: &BigRational) -> Real {
        Real::from_rational(x, self.p)
    }

    fn i(&self, v: i64) -> Real {
        Real::from_i64(v, self.p)
    }

    /// q^{−e} as an exact rational.
    fn qinv(&self, e: u64) -> BigRational {
        BigRational::new(BigInt::one(), pow_i(self.q, e))
    }

    /// 10^{−(digits+3)} as a target for truncation bounds.
    fn target(&self) -> f64 {
        10f64.powi(-(self.digits as i32 + 3))
    }

    fn log_q(&self) -> f64 {
        (self.q as f64).ln()
    }

    /// Smallest N ≥ 1 with q^{−N·scale} below the target.
    fn terms(&self, scale: f64) -> usize {
        let n = (-(self.target().ln()) / (self.log_q() * scale)).ceil() as usize;
        n.max(2)
    }

    /// Levels k with q^{−2^k} below the target.
    fn levels(&self) -> usize {
        let need = -(self.target().ln()) / self.log_q();
        let mut k = 0usize;
        while ((1u64 << k) as f64) < need {
            k += 1;
        }
        k + 1
    }

    /// exp(s) with its truncation bound exp(s)(e^T − 1) for |tail| ≤ T.
    fn exp_with_tail(&self, s: &Real, t: &Real) -> (Real, Real) {
        let v = s.exp();
        let b = v.mul(&t.exp().sub(&self.i(1)));
        (v, b)
    }

    /// −ln(1 − x) for rational x ∈ (0, 1/2].
    fn neg_ln1m(&self, x: &BigRational) -> Real {
        self.i(1).sub(&self.r(x)).ln().neg()
    }
}

fn report(name: &'static str, params: Value, digits: u32, methods: Vec<MethodValue>) -> ConstantReport {
    ConstantReport { name, params, digits, methods }
}

/// exp(Σ_{n≤N} ã_n β^n / n), the logarithmic series of a(β).
fn log_series(c: &Ctx, coeffs: &[BigRational], beta: &BigRational) -> Real {
    let mut s = BigRational::zero();
    let mut bp = BigRational::one();
    for (n, a) in coeffs.iter().enumerate().skip(1) {
        bp *= beta;
        s += a * &bp / rat_int(n as u64);
    }
    c.r(&s)
}

/// K_q by the e_n series, the dyadic nested product and the Euler product
/// over primes with χ₂(P) = −1.
pub fn constant_kq(q: u64, digits: u32) -> Result<ConstantReport> {
    if q.is_multiple_of(2) {
        return Err(Error::EvenCharacteristic(q));
    }
    crate::nt::prime_power(q).ok_or(Error::NotPrimePower(q))?;
    let c = Ctx::new(q, digits);
    let qf = q as f64;

    // e_n q^{−n}/n ≤ q^{−⌈n/2⌉}/n
    let n = 2 * c.terms(1.0) + 2;
    let coeffs = family_coefficients(&FamilySpec::Landau { q }, n)?;
    let s = log_series(&c, &coeffs, &c.qinv(1));
    let t =
        c.r(&(c.qinv(((n + 2) / 2) as u64) * rat_int(2) / rat_int(n as u64 + 1))).div(&c.i(1).sub(&c.r(&c.qinv(1))));
    let (v1, b1) = c.exp_with_tail(&s, &t);

    // Π_k (1 + q^{−2^k})^{2^{−k−1}} (1 − q^{1−2^{k+1}})^{−2^{−k−2}}
    let levels = c.levels();
    let mut l = c.i(0);
    for k in 0..levels {
        let x = c.qinv(1u64 << k);
        let y = c.qinv((1u64 << (k + 1)) - 1);
        let w1 = c.r(&BigRational::new(BigInt::one(), BigInt::one() << (k + 1)));
        let w2 = c.r(&BigRational::new(BigInt::one(), BigInt::one() << (k + 2)));
        l = l.add(&c.i(1).add(&c.r(&x)).ln().mul(&w1)).add(&c.neg_ln1m(&y).mul(&w2));
    }
    let xk = c.qinv(1u64 << levels);
    let yk = c.qinv((1u64 << (levels + 1)) - 1);
    let t2 = c.r(&((xk + yk) * rat(3, 2) / BigRational::from_integer(BigInt::one() << (levels + 1))));
    let (v2, b2) = c.exp_with_tail(&l, &t2);

    // (1 − q^{−1})^{−1/2} Π_{d≤D} (1 − q^{−2d})^{−π(d;χ₂,−1)/2}
    let d_max = c.terms(1.0) + 1;
    let mut l = c.neg_ln1m(&c.qinv(1)).mul(&c.r(&rat(1, 2)));
    for d in 1..=d_max as u64 {
        let cnt = pi_chi2(q, d, Chi2Class::Minus)?;
        if cnt.is_zero() {
            continue;
        }
        let w = c.r(&BigRational::new(BigInt::from(cnt), BigInt::from(2)));
        l = l.add(&c.neg_ln1m(&c.qinv(2 * d)).mul(&w));
    }
    let t3 = c.r(&(c.qinv(d_max as u64 + 1) / rat_int(d_max as u64 + 1) * rat_int(q) / rat_int(q - 1)));
    let (v3, b3) = c.exp_with_tail(&l, &t3);
    let _ = qf;

    Ok(report(
        "K_q",
        json!({ "q": q }),
        digits,
        vec![
            MethodValue { tag: "series-exp-e_n", value: v1, tail_bound: b1, truncation: n },
            MethodValue { tag: "nested-dyadic-product", value: v2, tail_bound: b2, truncation: levels },
            MethodValue { tag: "euler-product-chi2-minus", value: v3, tail_bound: b3, truncation: d_max },
        ],
    ))
}

/// Σ_{d ∈ degrees, d ≤ D} w(d)·π_q(d)·(−ln(1 − q^{−2d})).
fn euler_log(c: &Ctx, d_max: usize, mut weight: impl FnMut(u64) -> BigRational) -> Real {
    let mut l = c.i(0);
    for d in 1..=d_max as u64 {
        let w = weight(d);
        if w.is_zero() {
            continue;
        }
        let cnt: BigUint = pi_q(c.q, d);
        let w = w * BigRational::from_integer(BigInt::from(cnt));
        l = l.add(&c.neg_ln1m(&c.qinv(2 * d)).mul(&c.r(&w)));
    }
    l
}

/// C_{q,i} for i ∈ {1, 2, 3}.
pub fn constant_cq_big(q: u64, which: u8, digits: u32) -> Result<ConstantReport> {
    crate::nt::prime_power(q).ok_or(Error::NotPrimePower(q))?;
    let family = match which {
        1 => FamilySpec::EvenMultiplicity { q },
        2 => FamilySpec::EvenDegree { q },
        3 => FamilySpec::EvenDegreeSquarefree { q },
        _ => return Err(Error::Malformed(format!("unknown constant index {which}"))),
    };
    let c = Ctx::new(q, digits);
    let geo = rat_int(q) / rat_int(q - 1);
    let mut methods = Vec::new();

    // |ã_n| q^{−2n} ≤ q^{−n} for all three families
    let n = c.terms(1.0) + 2;
    let coeffs = family_coefficients(&family, n)?;
    let s = log_series(&c, &coeffs, &c.qinv(2));
    let t = c.r(&(c.qinv(n as u64 + 1) / rat_int(n as u64 + 1) * &geo));
    let (v, b) = c.exp_with_tail(&s, &t);
    methods.push(MethodValue { tag: "series-exp", value: v, tail_bound: b, truncation: n });

    if which == 1 {
        // Π_k ((1 + z_k)/(1 − z_k))^{2^{−k−2}}, z_k = q^{1−2^{k+1}}
        let levels = c.levels();
        let mut l = c.i(0);
        for k in 0..levels {
            let z = c.qinv((1u64 << (k + 1)) - 1);
            let w = c.r(&BigRational::new(BigInt::one(), BigInt::one() << (k + 2)));
            let term = c.i(1).add(&c.r(&z)).ln().add(&c.neg_ln1m(&z));
            l = l.add(&term.mul(&w));
        }
        let z = c.qinv((1u64 << (levels + 1)) - 1);
        let t = c.r(&(z * rat_int(6) / BigRational::from_integer(BigInt::one() << (levels + 2))));
        let (v, b) = c.exp_with_tail(&l, &t);
        methods.push(MethodValue { tag: "nested-dyadic-product", value: v, tail_bound: b, truncation: levels });
    }

    // Euler products over prime degrees
    let d_max = c.terms(1.0) + 1;
    let half = rat(1, 2);
    let (l, scale) = match which {
        1 => (euler_log(&c, d_max, |d| if d % 2 == 1 { half.clone() } else { BigRational::zero() }), 1),
        2 => (euler_log(&c, d_max, |d| if d % 2 == 1 { half.clone() } else { BigRational::zero() }).neg(), 1),
        _ => (euler_log(&c, d_max, |d| if d % 2 == 1 { half.clone() } else { BigRational::one() }).neg(), 2),
    };
    let t = c.r(&(c.qinv(d_max as u64 + 1) / rat_int(d_max as u64 + 1) * &geo * rat_int(scale)));
    let (v, b) = c.exp_with_tail(&l, &t);
    methods.push(MethodValue { tag: "euler-product", value: v, tail_bound: b, truncation: d_max });

    let name = match which {
        1 => "C_{q,1}",
        2 => "C_{q,2}",
        _ => "C_{q,3}",
    };
    Ok(report(name, json!({ "q": q }), digits, methods))
}

/// Second-order constant c_q = ½ Σ e_i q^{−i}.
pub fn constant_cq(q: u64, digits: u32) -> Result<ConstantReport> {
    if q.is_multiple_of(2) {
        return Err(Error::EvenCharacteristic(q));
    }
    crate::nt::prime_power(q).ok_or(Error::NotPrimePower(q))?;
    let c = Ctx::new(q, digits);
    let qb = rat_int(q);

    // ¼(1/(q−1) + Σ_j [1/(q^{2^j−1} − 1) − 1/(q^{2^j} − 1)])
    let levels = c.levels();
    let mut s = (&qb - rat_int(1)).recip();
    for j in 1..=levels {
        let a = BigRational::from_integer(pow_i(q, (1u64 << j) - 1) - 1).recip();
        let b = BigRational::from_integer(pow_i(q, 1u64 << j) - 1).recip();
        s += a - b;
    }
    let v1 = c.r(&(s * rat(1, 4)));
    let t1 = c.r(&(c.qinv((1u64 << (levels + 1)) - 1) * rat(3, 4)));

    let n = 2 * c.terms(1.0) + 2;
    let mut s = BigRational::zero();
    for i in 1..=n as u64 {
        s += e_n(q, i) * c.qinv(i);
    }
    let v2 = c.r(&(s * rat(1, 2)));
    let t2 = c.r(&(c.qinv((n as u64 + 2) / 2) * &qb / (&qb - rat_int(1))));
    Ok(report(
        "c_q",
        json!({ "q": q }),
        digits,
        vec![
            MethodValue { tag: "closed-dyadic-sum", value: v1, tail_bound: t1, truncation: levels },
            MethodValue { tag: "series-e_n", value: v2, tail_bound: t2, truncation: n },
        ],
    ))
}

/// Second-order constant c′_q = ½ Σ f_i q^{−2i}.
pub fn constant_cq_prime(q: u64, digits: u32) -> Result<ConstantReport> {
    crate::nt::prime_power(q).ok_or(Error::NotPrimePower(q))?;
    let c = Ctx::new(q, digits);
    let qb = rat_int(q);

    let n = c.terms(1.0) + 2;
    let mut s = BigRational::zero();
    for i in 1..=n as u64 {
        s += BigRational::new(pow_i(q, odd_part(i)), pow_i(q, 2 * i));
    }
    let v1 = c.r(&(s * rat(1, 4)));
    let t1 = c.r(&(c.qinv(n as u64 + 1) * &qb / (&qb - rat_int(1)) * rat(1, 4)));

    // grouping by odd part: Σ_k x_k/(1 − x_k²), x_k = q^{1−2^{k+1}}
    let levels = c.levels();
    let mut s = BigRational::zero();
    for k in 0..levels {
        let x = c.qinv((1u64 << (k + 1)) - 1);
        s += &x / (rat_int(1) - &x * &x);
    }
    let v2 = c.r(&(s * rat(1, 4)));
    let t2 = c.r(&c.qinv((1u64 << (levels + 1)) - 1));
    Ok(report(
        "c'_q",
        json!({ "q": q }),
        digits,
        vec![
            MethodValue { tag: "series-f_n", value: v1, tail_bound: t1, truncation: n },
            MethodValue { tag: "odd-part-grouping", value: v2, tail_bound: t2, truncation: levels },
        ],
    ))
}

/// C_{a,m} = a(1/q) for the progression family.
pub fn constant_cam(field: &FieldSpec, a: &[Elem], m: &MonicPoly, digits: u32) -> Result<ConstantReport> {
    let family = FamilySpec::Arith { field: field.clone(), a: a.to_vec(), m: m.clone() };
    family.validate()?;
    let q = field.q();
    let c = Ctx::new(q, digits);
    let c2 = rat_int(m.degree() as u64 + 3);

    // |ã_n| q^{−n} ≤ c2 q^{−n/2}
    let n = c.terms(0.5) + 2 + (m.degree() as f64 / (c.log_q() * 0.5)).ceil() as usize;
    let spec = family_estimator(&family, 0, digits, None).or_else(|e| match e {
        // φ(m) = 1: the constant is still defined; only the estimate is refused
        Error::HypothesisViolation(_) => Ok(crate::estimator::EstimatorSpec {
            alpha_sq: rat_int(q).recip(),
            beta: rat_int(q).recip(),
            c1: rat(1, 2),
            c2: c2.clone(),
            m: 0,
            coeffs: Vec::new(),
        }),
        other => Err(other),
    })?;
    let order = n.max(spec.eval_order());
    let coeffs = family_coefficients(&family, order)?;
    let s = log_series(&c, &coeffs[..=n], &c.qinv(1));
    let sq = c.r(&rat_int(q)).sqrt();
    let t = c.r(&c2).div(&sq.powi(n as u64 + 1)).div(&c.i(n as i64 + 1)).div(&c.i(1).sub(&c.i(1).div(&sq)));
    let (v1, b1) = c.exp_with_tail(&s, &t);
    let mut methods = vec![MethodValue { tag: "series-exp", value: v1, tail_bound: b1, truncation: n }];

    let spec = crate::estimator::EstimatorSpec { coeffs: coeffs[..=spec.eval_order().max(8)].to_vec(), ..spec };
    if let Ok(ders) = spec.derivatives_at_beta(0, c.p) {
        let (v, t) = &ders[0];
        methods.push(MethodValue {
            tag: "power-series-at-beta",
            value: c.r(v),
            tail_bound: t.clone(),
            truncation: spec.eval_order(),
        });
    }
    Ok(report(
        "C_{a,m}",
        json!({
            "q": q,
            "a": crate::poly::format_poly(&field.poly_rem(a, m.coeffs())),
            "m": m.to_string(),
        }),
        digits,
        methods,
    ))
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in points {
        let dx = x.ln() - mx;
        num += dx * (y.ln() - my);
        den += dx * dx;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;

    fn check(rep: &ConstantReport, max_tail: f64) {
        assert!(rep.methods_agree(), "{} {:?}", rep.name, rep.to_json());
        for m in &rep.methods {
            assert!(m.tail_bound.to_f64() <= max_tail, "{} {} tail {}", rep.name, m.tag, m.tail_bound.to_f64());
        }
    }

    #[test]
    fn kq_methods_agree() {
        for q in [3u64, 5, 9, 27] {
            let rep = constant_kq(q, 20).unwrap();
            check(&rep, 1e-20);
            assert_eq!(rep.methods.len(), 3);
        }
        assert!(matches!(constant_kq(4, 10), Err(Error::EvenCharacteristic(4))));
    }

    #[test]
    fn cq_big_methods_agree() {
        for q in [2u64, 3, 4, 5, 9] {
            for which in 1..=3u8 {
                check(&constant_cq_big(q, which, 20).unwrap(), 1e-20);
            }
            let c1 = constant_cq_big(q, 1, 20).unwrap().consensus().value.clone();
            let c2 = constant_cq_big(q, 2, 20).unwrap().consensus().value.clone();
            assert!((c1.mul(&c2).to_f64() - 1.0).abs() < 1e-18);
        }
        assert_eq!(constant_cq_big(3, 1, 15).unwrap().methods.len(), 3);
    }

    #[test]
    fn second_order_constants() {
        for q in [3u64, 5, 7, 9] {
            let rep = constant_cq(q, 25).unwrap();
            check(&rep, 1e-25);
        }
        for q in [2u64, 3, 4, 5] {
            check(&constant_cq_prime(q, 25).unwrap(), 1e-25);
        }
        // ¼(1/2 + 3/8 + 1/26 − 1/80 + ...)
        let c3 = constant_cq(3, 20).unwrap().consensus().value.to_f64();
        assert!((c3 - 0.2253).abs() < 1e-3, "{c3}");
    }

    #[test]
    fn cam_methods_agree() {
        let f3 = build_field(3, 1, None).unwrap();
        let rep = constant_cam(&f3, &[1], &MonicPoly::t(), 15).unwrap();
        check(&rep, 1e-15);
        assert_eq!(rep.methods.len(), 2);
        // φ(T) = 1 over F_2: the constant is 1 since every prime but T is counted
        let f2 = build_field(2, 1, None).unwrap();
        let rep = constant_cam(&f2, &[1], &MonicPoly::t(), 12).unwrap();
        assert!(rep.methods_agree());
    }

    #[test]
    fn truncation_doubling_is_stable() {
        let f3 = build_field(3, 1, None).unwrap();
        let lo = constant_cam(&f3, &[2], &MonicPoly::t(), 10).unwrap();
        let hi = constant_cam(&f3, &[2], &MonicPoly::t(), 20).unwrap();
        let gap = lo.consensus().value.sub(&hi.consensus().value).abs();
        assert!(gap <= lo.consensus().tail_bound.add(&hi.consensus().tail_bound));
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (2..20).map(|x| (x as f64, 3.0 / (x as f64).powi(2))).collect();
        assert!((loglog_slope(&pts) + 2.0).abs() < 1e-12);
    }
}
