//! Exact counts for the multiplicative families, generating-function and
//! brute-force routes, plus the closed forms e_n, f_n and ψ.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{cap_error, Error, Result};
use crate::field::{Elem, FieldSpec};
use crate::lpoly::LPolynomial;
use crate::nt::{self, odd_part, pow_i, rat, rat_int};
use crate::poly::{format_poly, Factorization, MonicPoly};
use crate::primes::{pi_chi2, pi_q, ArithPrimeTable, Chi2Class};
use crate::series::{product_from_psi, psi_from_g, GeneratorCounts, QPoly, TruncatedSeries};

/// One of the counted families with its parameters.
#[derive(Clone, Debug)]
pub enum FamilySpec {
    /// f = A² + T·B²: primes with χ₂(P) = −1 occur to even powers (q odd).
    Landau { q: u64 },
    /// Odd-degree primes occur to even powers.
    EvenMultiplicity { q: u64 },
    /// Every prime factor has even degree.
    EvenDegree { q: u64 },
    /// Squarefree with every prime factor of even degree.
    EvenDegreeSquarefree { q: u64 },
    /// Effective divisors supported on places of degree divisible by r.
    Divisors { l: LPolynomial, r: u32 },
    /// As `Divisors`, with every multiplicity at most ℓ.
    BoundedDivisors { l: LPolynomial, r: u32, ell: u32 },
    /// Every prime factor is ≡ a mod m.
    Arith { field: FieldSpec, a: Vec<Elem>, m: MonicPoly },
}

impl FamilySpec {
    pub fn id(&self) -> &'static str {
        match self {
            FamilySpec::Landau { .. } => "landau-A2TB2",
            FamilySpec::EvenMultiplicity { .. } => "s1-even-multiplicity",
            FamilySpec::EvenDegree { .. } => "s2-even-degree",
            FamilySpec::EvenDegreeSquarefree { .. } => "s3-even-degree-squarefree",
            FamilySpec::Divisors { .. } => "divisors-r-K",
            FamilySpec::BoundedDivisors { .. } => "divisors-r-ell-K",
            FamilySpec::Arith { .. } => "arith-progression",
        }
    }

    pub fn q(&self) -> u64 {
        match self {
            FamilySpec::Landau { q }
            | FamilySpec::EvenMultiplicity { q }
            | FamilySpec::EvenDegree { q }
            | FamilySpec::EvenDegreeSquarefree { q } => *q,
            FamilySpec::Divisors { l, .. } | FamilySpec::BoundedDivisors { l, .. } => l.q(),
            FamilySpec::Arith { field, .. } => field.q(),
        }
    }

    /// Polynomial degree (or divisor degree) counted at table index n.
    pub fn degree_of_index(&self, n: u64) -> u64 {
        match self {
            FamilySpec::EvenMultiplicity { .. }
            | FamilySpec::EvenDegree { .. }
            | FamilySpec::EvenDegreeSquarefree { .. } => 2 * n,
            FamilySpec::Divisors { r, .. } | FamilySpec::BoundedDivisors { r, .. } => *r as u64 * n,
            _ => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.q();
        nt::prime_power(q).ok_or(Error::NotPrimePower(q))?;
        match self {
            FamilySpec::Landau { q } if q % 2 == 0 => Err(Error::EvenCharacteristic(*q)),
            FamilySpec::Divisors { r, .. } if *r < 2 => Err(Error::Malformed("r must be at least 2".into())),
            FamilySpec::BoundedDivisors { r, ell, .. } if *r < 2 || *ell < 1 => {
                Err(Error::Malformed("need r >= 2 and ell >= 1".into()))
            }
            FamilySpec::Arith { field, a, m } => {
                if m.degree() == 0 {
                    return Err(Error::Malformed("modulus must have positive degree".into()));
                }
                let r = field.poly_rem(a, m.coeffs());
                if r.is_empty() || field.poly_gcd(&r, m.coeffs()) != vec![1] {
                    return Err(Error::NotCoprime);
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn params_json(&self) -> Value {
        match self {
            FamilySpec::Landau { q }
            | FamilySpec::EvenMultiplicity { q }
            | FamilySpec::EvenDegree { q }
            | FamilySpec::EvenDegreeSquarefree { q } => json!({ "q": q }),
            FamilySpec::Divisors { l, r } => json!({ "L": l.to_json(), "r": r }),
            FamilySpec::BoundedDivisors { l, r, ell } => json!({ "L": l.to_json(), "r": r, "ell": ell }),
            FamilySpec::Arith { field, a, m } => json!({
                "q": field.q(),
                "modulus": field.modulus(),
                "a": format_poly(&field.poly_rem(a, m.coeffs())),
                "m": m.to_string(),
            }),
        }
    }
}

/// Which route produced a [`CountTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    GeneratingFunction,
    Oracle,
}

impl CountMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            CountMethod::GeneratingFunction => "generating-function",
            CountMethod::Oracle => "oracle",
        }
    }
}

/// Exact counts indexed by n = 0..=N, see [`FamilySpec::degree_of_index`].
#[derive(Clone, Debug)]
pub struct CountTable {
    pub spec: FamilySpec,
    pub values: Vec<BigUint>,
    pub method: CountMethod,
}

impl CountTable {
    pub fn truncation(&self) -> usize {
        self.values.len() - 1
    }

    pub fn to_json(&self) -> Value {
        let mut values = serde_json::Map::new();
        for (i, v) in self.values.iter().enumerate() {
            values.insert(i.to_string(), Value::String(v.to_string()));
        }
        json!({
            "family": self.spec.id(),
            "params": self.spec.params_json(),
            "N": self.truncation(),
            "values": Value::Object(values),
        })
    }
}

fn big(v: BigUint) -> BigInt {
    BigInt::from(v)
}

/// Generator counts g(1..=N) for a family (signed for some families).
pub fn generator_counts(spec: &FamilySpec, order: usize) -> Result<GeneratorCounts> {
    spec.validate()?;
    let q = spec.q();
    let pi = |n: u64| big(pi_q(q, n));
    Ok(match spec {
        FamilySpec::Landau { .. } => {
            let mut g = Vec::with_capacity(order);
            for n in 1..=order as u64 {
                let mut v = big(pi_chi2(q, n, Chi2Class::ZeroOrPlus)?);
                if n % 2 == 0 {
                    v += big(pi_chi2(q, n / 2, Chi2Class::Minus)?);
                }
                g.push(v);
            }
            GeneratorCounts::new(g)
        }
        FamilySpec::EvenMultiplicity { .. } => GeneratorCounts::from_fn(order, |n| {
            pi(2 * n as u64) + if n % 2 == 1 { pi(n as u64) } else { BigInt::zero() }
        }),
        FamilySpec::EvenDegree { .. } => GeneratorCounts::from_fn(order, |n| pi(2 * n as u64)),
        // ∏(1 + x^n)^{π(2n)} = ∏(1 − x^{2n})^{π(2n)} (1 − x^n)^{−π(2n)}
        FamilySpec::EvenDegreeSquarefree { .. } => GeneratorCounts::from_fn(order, |n| {
            pi(2 * n as u64) - if n % 2 == 0 { pi(n as u64) } else { BigInt::zero() }
        }),
        FamilySpec::Divisors { l, r } => {
            let places = l.place_counts(*r as u64 * order as u64)?;
            GeneratorCounts::from_fn(order, |n| big(places[*r as usize * n].clone()))
        }
        FamilySpec::BoundedDivisors { l, r, ell } => {
            let places = l.place_counts(*r as u64 * order as u64)?;
            let r = *r as usize;
            let e = *ell as usize + 1;
            GeneratorCounts::from_fn(order, |n| {
                let mut v = big(places[r * n].clone());
                if n % e == 0 {
                    v -= big(places[r * n / e].clone());
                }
                v
            })
        }
        FamilySpec::Arith { field, a, m } => {
            let table = ArithPrimeTable::new(field, m, order)?;
            let series = table.class_series(a)?;
            GeneratorCounts::new(series[1..].iter().cloned().map(big).collect())
        }
    })
}

/// Exact counts for n ≤ N through the generating function.
pub fn count(spec: &FamilySpec, order: usize) -> Result<CountTable> {
    let g = generator_counts(spec, order)?;
    let coeffs = product_from_psi(&psi_from_g(&g))?;
    let values = coeffs
        .into_iter()
        .enumerate()
        .map(|(n, c)| c.to_biguint().ok_or_else(|| Error::Malformed(format!("negative coefficient at index {n}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(CountTable { spec: spec.clone(), values, method: CountMethod::GeneratingFunction })
}

/// B(n, q) for n ≤ N.
pub fn count_landau(q: u64, order: usize) -> Result<CountTable> {
    count(&FamilySpec::Landau { q }, order)
}

/// B_i(2n, q) for n ≤ N, i ∈ {1, 2, 3}.
pub fn count_s_family(q: u64, which: u8, order: usize) -> Result<CountTable> {
    let spec = match which {
        1 => FamilySpec::EvenMultiplicity { q },
        2 => FamilySpec::EvenDegree { q },
        3 => FamilySpec::EvenDegreeSquarefree { q },
        _ => return Err(Error::Malformed(format!("unknown family index {which}"))),
    };
    count(&spec, order)
}

/// B_2(rn, r, K) (ell = None) or B_3(rn, r, ℓ, K) for n ≤ N.
pub fn count_divisors(l: &LPolynomial, r: u32, ell: Option<u32>, order: usize) -> Result<CountTable> {
    let spec = match ell {
        None => FamilySpec::Divisors { l: l.clone(), r },
        Some(ell) => FamilySpec::BoundedDivisors { l: l.clone(), r, ell },
    };
    count(&spec, order)
}

/// S(n; a, m) for n ≤ N.
pub fn count_arith(field: &FieldSpec, a: &[Elem], m: &MonicPoly, order: usize) -> Result<CountTable> {
    count(&FamilySpec::Arith { field: field.clone(), a: a.to_vec(), m: m.clone() }, order)
}

/// B(n, q) as a polynomial in q, for n ≤ N.
pub fn landau_polys_in_q(order: usize) -> Vec<QPoly> {
    let exps: Vec<QPoly> =
        (0..=order as u64).map(|n| if n == 0 { QPoly::default() } else { psi_landau_in_q(n) }).collect();
    TruncatedSeries::from_exponents(&exps).into_coeffs()
}

/// B(n, q) as a polynomial in q.
pub fn count_landau_poly_in_q(n: usize) -> QPoly {
    landau_polys_in_q(n).pop().unwrap()
}

fn half() -> BigRational {
    rat(1, 2)
}

/// e_n as a polynomial in q.
pub fn e_n_in_q(n: u64) -> QPoly {
    use crate::series::Coeff;
    let mut e = QPoly::constant(half());
    let mut m = n;
    while m.is_multiple_of(2) {
        m /= 2;
        e = e.add(&QPoly::monomial(half(), m as usize)).sub(&QPoly::constant(half()));
    }
    e
}

fn psi_landau_in_q(n: u64) -> QPoly {
    use crate::series::Coeff;
    QPoly::monomial(half(), n as usize).add(&e_n_in_q(n))
}

/// e_n = 1/2 + Σ_{i=1}^{v2(n)} (q^{n/2^i} − 1)/2.
pub fn e_n(q: u64, n: u64) -> BigRational {
    e_n_in_q(n).eval(&rat_int(q))
}

/// f_n = q^{n / 2^{v2(n)}} / 2.
pub fn f_n(q: u64, n: u64) -> BigRational {
    BigRational::new(pow_i(q, odd_part(n)), BigInt::from(2))
}

/// ψ(n) of a family: closed forms for Landau and the even-multiplicity family,
/// divisor sums over prime tables otherwise.
pub fn psi_value(spec: &FamilySpec, n: u64) -> Result<BigRational> {
    spec.validate()?;
    let q = spec.q();
    Ok(match spec {
        FamilySpec::Landau { .. } => BigRational::new(pow_i(q, n), BigInt::from(2)) + e_n(q, n),
        FamilySpec::EvenMultiplicity { .. } => BigRational::new(pow_i(q, 2 * n), BigInt::from(2)) + f_n(q, n),
        _ => {
            let g = generator_counts(spec, n as usize)?;
            BigRational::from_integer(psi_from_g(&g)[n as usize].clone())
        }
    })
}

/// Decides membership from a factorization of f.
fn member(field: &FieldSpec, fac: &Factorization, spec: &FamilySpec) -> Result<bool> {
    let fs = &fac.factors;
    Ok(match spec {
        FamilySpec::Landau { .. } => {
            let mut ok = true;
            for (p, v) in fs {
                if field.chi2(p)? == -1 && v % 2 == 1 {
                    ok = false;
                }
            }
            ok
        }
        FamilySpec::EvenMultiplicity { .. } => fs.iter().all(|(p, v)| p.degree() % 2 == 0 || v % 2 == 0),
        FamilySpec::EvenDegree { .. } => fs.iter().all(|(p, _)| p.degree() % 2 == 0),
        FamilySpec::EvenDegreeSquarefree { .. } => fs.iter().all(|(p, v)| p.degree() % 2 == 0 && *v == 1),
        FamilySpec::Divisors { r, .. } => fs.iter().all(|(p, _)| p.degree() % *r as usize == 0),
        FamilySpec::BoundedDivisors { r, ell, .. } => fs.iter().all(|(p, v)| p.degree() % *r as usize == 0 && v <= ell),
        FamilySpec::Arith { a, m, .. } => {
            let a = field.poly_rem(a, m.coeffs());
            fs.iter().all(|(p, _)| field.poly_rem(p.coeffs(), m.coeffs()) == a)
        }
    })
}

fn check_oracle_field(field: &FieldSpec, spec: &FamilySpec) -> Result<()> {
    spec.validate()?;
    if field.q() != spec.q() {
        return Err(Error::Malformed(format!("field has q = {}, family has q = {}", field.q(), spec.q())));
    }
    match spec {
        FamilySpec::Divisors { l, .. } | FamilySpec::BoundedDivisors { l, .. } if l.genus() != 0 => {
            Err(Error::Malformed("the polynomial oracle only models the rational function field (genus 0)".into()))
        }
        FamilySpec::Arith { field: own, .. } if own != field => {
            Err(Error::Malformed("oracle field differs from the family's field".into()))
        }
        _ => Ok(()),
    }
}

/// Membership of a monic f in a family, decided from its factorization.
///
/// Divisor families are only supported for the rational function field,
/// where a divisor supported on places of degree divisible by r ≥ 2 is a monic
/// polynomial (the place at infinity has degree 1).
pub fn membership_oracle(field: &FieldSpec, f: &MonicPoly, spec: &FamilySpec) -> Result<bool> {
    check_oracle_field(field, spec)?;
    if f.degree() == 0 {
        return Ok(true);
    }
    member(field, &field.factor(f)?, spec)
}

/// For each family, the number of monic polynomials of the given degree that
/// belong to it. Each polynomial is factored once.
pub fn oracle_counts_at_degree(field: &FieldSpec, specs: &[FamilySpec], degree: usize, cap: u64) -> Result<Vec<u64>> {
    for s in specs {
        check_oracle_field(field, s)?;
    }
    let total = field.count_monic(degree);
    if total > cap as u128 {
        return Err(cap_error(format!("monic polynomials of degree {degree}"), total, cap));
    }
    if degree == 0 {
        return Ok(vec![1; specs.len()]);
    }
    (0..total as u64)
        .into_par_iter()
        .map(|code| -> Result<Vec<u64>> {
            let f = MonicPoly::new(field, field.monic_from_code(degree, code))?;
            let fac = field.factor(&f)?;
            specs.iter().map(|s| member(field, &fac, s).map(u64::from)).collect()
        })
        .try_reduce(|| vec![0; specs.len()], |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()))
}

/// Brute-force count at table index n (degree per [`FamilySpec::degree_of_index`]).
pub fn oracle_count(field: &FieldSpec, spec: &FamilySpec, n: u64, cap: u64) -> Result<BigUint> {
    let degree = spec.degree_of_index(n) as usize;
    Ok(BigUint::from(oracle_counts_at_degree(field, std::slice::from_ref(spec), degree, cap)?[0]))
}

/// Number of monic f of degree n with f = A² + T·B², by direct search over
/// (A, B). Exponential; meant for n ≤ 4.
pub fn landau_search_count(field: &FieldSpec, n: usize) -> Result<u64> {
    if field.q().is_multiple_of(2) {
        return Err(Error::EvenCharacteristic(field.q()));
    }
    if field.count_monic(n).saturating_mul(field.q() as u128) > 10_000_000 {
        return Err(cap_error("search space for A^2 + T B^2", field.count_monic(n), 10_000_000));
    }
    let q = field.q();
    // all polynomials of degree ≤ d (including zero), as coefficient vectors
    let all_upto = |d: Option<usize>| -> Vec<Vec<Elem>> {
        let Some(d) = d else { return vec![Vec::new()] };
        let count = (q as u128).pow(d as u32 + 1) as u64;
        (0..count)
            .map(|mut code| {
                let mut v: Vec<Elem> = (0..=d)
                    .map(|_| {
                        let c = (code % q) as Elem;
                        code /= q;
                        c
                    })
                    .collect();
                while v.last() == Some(&0) {
                    v.pop();
                }
                v
            })
            .collect()
    };
    let mut found = std::collections::HashSet::new();
    let minus_one = field.neg(1);
    let (a_polys, b_polys): (Vec<Vec<Elem>>, Vec<Vec<Elem>>) = if n.is_multiple_of(2) {
        // deg A = n/2 with lead(A)² = 1, deg B ≤ n/2 − 1
        let a: Vec<Vec<Elem>> = all_upto(Some(n / 2))
            .into_iter()
            .filter(|v| v.len() == n / 2 + 1 && (v[n / 2] == 1 || v[n / 2] == minus_one))
            .collect();
        (a, all_upto((n / 2).checked_sub(1)))
    } else {
        let d = (n - 1) / 2;
        let b: Vec<Vec<Elem>> =
            all_upto(Some(d)).into_iter().filter(|v| v.len() == d + 1 && (v[d] == 1 || v[d] == minus_one)).collect();
        (all_upto(Some(d)), b)
    };
    for a in &a_polys {
        let a2 = field.poly_mul(a, a);
        for b in &b_polys {
            let tb2 = field.poly_mul(&[0, 1], &field.poly_mul(b, b));
            let f = field.poly_add(&a2, &tb2);
            if f.len() == n + 1 && f[n] == 1 {
                found.insert(f);
            }
        }
    }
    Ok(found.len() as u64)
}

/// True when every entry is nonnegative (counts always are).
pub fn all_nonnegative(v: &[BigInt]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, field_of_size};
    use crate::poly::parse_monic;
    use crate::series::Coeff;

    fn u(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn values(t: &CountTable) -> Vec<u64> {
        t.values.iter().map(|v| v.try_into().unwrap()).collect()
    }

    #[test]
    fn landau_examples() {
        let t = count_landau(3, 5).unwrap();
        assert_eq!(&values(&t)[..3], &[1, 2, 5]);
        assert!(matches!(count_landau(4, 3), Err(Error::EvenCharacteristic(4))));
        for q in [3u64, 5, 7, 9, 11, 13] {
            assert_eq!(count_landau(q, 1).unwrap().values[1], u(q.div_ceil(2)));
        }
    }

    #[test]
    fn s_family_examples() {
        assert_eq!(values(&count_s_family(3, 1, 1).unwrap()), vec![1, 6]);
        assert_eq!(values(&count_s_family(3, 2, 1).unwrap()), vec![1, 3]);
        assert_eq!(values(&count_s_family(3, 3, 1).unwrap()), vec![1, 3]);
    }

    #[test]
    fn s_families_are_nested() {
        for q in [2u64, 3, 4, 5] {
            let b1 = count_s_family(q, 1, 15).unwrap().values;
            let b2 = count_s_family(q, 2, 15).unwrap().values;
            let b3 = count_s_family(q, 3, 15).unwrap().values;
            for n in 0..=15 {
                assert!(b1[n] >= b2[n] && b2[n] >= b3[n]);
            }
        }
    }

    #[test]
    fn divisor_examples() {
        let l = LPolynomial::rational(3).unwrap();
        let t = count_divisors(&l, 2, None, 3).unwrap();
        assert_eq!(t.values[0], u(1));
        assert_eq!(t.values[1], u(3));
        // ℓ = 1 is the squarefree product ∏(1 + x^n)^{π_K(rn)}
        let g1 = LPolynomial::from_i64(5, &[1, -2, 5]).unwrap();
        for r in [2u32, 3] {
            let order = 8;
            let t = count_divisors(&g1, r, Some(1), order).unwrap();
            let mut expect = TruncatedSeries::<BigRational>::one(order);
            for n in 1..=order {
                let e = g1.pi_k(r as u64 * n as u64).unwrap();
                let mut c = vec![BigRational::zero(); order + 1];
                c[0] = rat_int(1);
                c[n] = rat_int(1);
                let factor = TruncatedSeries::new(c).pow_rational(&BigRational::from_integer(big(e))).unwrap();
                expect = expect.mul(&factor).unwrap();
            }
            for n in 0..=order {
                assert_eq!(BigRational::from_integer(big(t.values[n].clone())), *expect.coeff(n));
            }
        }
    }

    #[test]
    fn arith_examples() {
        let f = build_field(3, 1, None).unwrap();
        let t = count_arith(&f, &[1], &MonicPoly::t(), 4).unwrap();
        assert_eq!(&values(&t)[..3], &[1, 1, 2]);
        assert!(matches!(count_arith(&f, &[0], &MonicPoly::t(), 2), Err(Error::NotCoprime)));
    }

    #[test]
    fn poly_in_q() {
        let p1 = count_landau_poly_in_q(1);
        assert_eq!(p1, QPoly(vec![rat(1, 2), rat(1, 2)]));
        let p2 = count_landau_poly_in_q(2);
        assert_eq!(p2, QPoly(vec![rat(1, 8), rat(4, 8), rat(3, 8)]));
        assert_eq!(p2.eval(&rat_int(3)), rat_int(5));
        assert_eq!(p2.eval(&rat_int(5)), rat_int(12));
        let polys = landau_polys_in_q(8);
        for q in [3u64, 5, 7, 9, 11, 13, 25] {
            let t = count_landau(q, 8).unwrap();
            for n in 0..=8 {
                assert_eq!(polys[n].eval(&rat_int(q)), BigRational::from_integer(big(t.values[n].clone())));
            }
        }
        for (n, p) in polys.iter().enumerate() {
            assert_eq!(p.degree(), Some(n));
            assert_eq!(p.leading(), nt::binom_rat(&(rat_int(n as u64) - half()), n as u64));
        }
    }

    #[test]
    fn closed_forms() {
        for n in [1u64, 3, 5, 7, 99] {
            assert_eq!(e_n(3, n), half());
        }
        assert_eq!(e_n(3, 2), rat(3, 2));
        assert_eq!(f_n(3, 1), rat(3, 2));
        for q in [3u64, 5, 9] {
            for n in 1..=50u64 {
                let e = e_n(q, n);
                assert!(e >= half() && e <= BigRational::from_integer(pow_i(q, n / 2)));
            }
        }
        let landau = FamilySpec::Landau { q: 3 };
        assert_eq!(psi_value(&landau, 2).unwrap(), rat_int(6));
        let s1 = FamilySpec::EvenMultiplicity { q: 3 };
        assert_eq!(psi_value(&s1, 1).unwrap(), rat_int(6));
        for q in [3u64, 5] {
            let g = generator_counts(&FamilySpec::Landau { q }, 30).unwrap();
            let psi = psi_from_g(&g);
            let g1 = generator_counts(&FamilySpec::EvenMultiplicity { q }, 30).unwrap();
            let psi1 = psi_from_g(&g1);
            for n in 1..=30u64 {
                let closed = psi_value(&FamilySpec::Landau { q }, n).unwrap();
                assert_eq!(BigRational::from_integer(psi[n as usize].clone()), closed);
                assert_eq!(&closed - BigRational::new(pow_i(q, n), BigInt::from(2)), e_n(q, n));
                let closed1 = psi_value(&FamilySpec::EvenMultiplicity { q }, n).unwrap();
                assert_eq!(BigRational::from_integer(psi1[n as usize].clone()), closed1);
            }
        }
    }

    #[test]
    fn membership_examples() {
        let f = build_field(3, 1, None).unwrap();
        let landau = FamilySpec::Landau { q: 3 };
        assert!(membership_oracle(&f, &MonicPoly::t(), &landau).unwrap());
        assert!(membership_oracle(&f, &parse_monic(&f, "T^2+T+1").unwrap(), &landau).unwrap());
        assert!(!membership_oracle(&f, &parse_monic(&f, "T+2").unwrap(), &landau).unwrap());
        let f4 = field_of_size(4).unwrap();
        assert!(matches!(
            membership_oracle(&f4, &MonicPoly::t(), &FamilySpec::Landau { q: 4 }),
            Err(Error::EvenCharacteristic(4))
        ));
    }

    #[test]
    fn oracle_examples() {
        let f = build_field(3, 1, None).unwrap();
        assert_eq!(oracle_count(&f, &FamilySpec::Landau { q: 3 }, 2, 1000).unwrap(), u(5));
        assert_eq!(oracle_count(&f, &FamilySpec::EvenDegree { q: 3 }, 1, 1000).unwrap(), u(3));
        let arith = FamilySpec::Arith { field: f.clone(), a: vec![1], m: MonicPoly::t() };
        assert_eq!(oracle_count(&f, &arith, 2, 1000).unwrap(), u(2));
        assert!(matches!(oracle_count(&f, &arith, 20, 1000), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn generating_functions_match_oracle_small() {
        for q in [3u64, 5, 9] {
            let f = field_of_size(q).unwrap();
            let l = LPolynomial::rational(q).unwrap();
            let specs = vec![
                FamilySpec::Landau { q },
                FamilySpec::EvenMultiplicity { q },
                FamilySpec::EvenDegree { q },
                FamilySpec::EvenDegreeSquarefree { q },
                FamilySpec::Divisors { l: l.clone(), r: 2 },
                FamilySpec::BoundedDivisors { l: l.clone(), r: 2, ell: 2 },
                FamilySpec::BoundedDivisors { l, r: 3, ell: 1 },
                FamilySpec::Arith { field: f.clone(), a: vec![2], m: MonicPoly::t() },
            ];
            let max_deg = (1..).take_while(|&d| f.count_monic(d) <= 5000).last().unwrap();
            let tables: Vec<CountTable> = specs.iter().map(|s| count(s, max_deg).unwrap()).collect();
            for d in 0..=max_deg {
                let got = oracle_counts_at_degree(&f, &specs, d, u64::MAX).unwrap();
                for (i, s) in specs.iter().enumerate() {
                    let expected = (0..=max_deg as u64)
                        .find(|&n| s.degree_of_index(n) == d as u64)
                        .map(|n| tables[i].values[n as usize].clone())
                        .unwrap_or_else(BigUint::zero);
                    assert_eq!(BigUint::from(got[i]), expected, "{} q={q} degree={d}", s.id());
                }
            }
        }
    }

    #[test]
    fn landau_search_agrees_with_criterion() {
        for q in [3u64, 5, 7] {
            let f = field_of_size(q).unwrap();
            let t = count_landau(q, 4).unwrap();
            for n in 1..=4usize {
                if let Ok(c) = landau_search_count(&f, n) {
                    assert_eq!(u(c), t.values[n], "q={q} n={n}");
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let t = count_landau(3, 11).unwrap();
        let j = t.to_json();
        assert_eq!(j["family"], "landau-A2TB2");
        assert_eq!(j["N"], 11);
        assert_eq!(j["values"]["2"], "5");
        let keys: Vec<&String> = j["values"].as_object().unwrap().keys().collect();
        assert_eq!(keys[10], "10");
        let _ = QPoly::one_value();
    }
}
