//! Exact prime counts over F_q[T]: all primes, primes split by the quadratic
//! character modulo T, and primes in a residue class modulo m.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{cap_error, Error, Result};
use crate::field::{Elem, FieldSpec};
use crate::nt::{self, divisors, mobius, pow_i, pow_u};
use crate::poly::MonicPoly;

/// Number of monic irreducibles of degree n over F_q.
pub fn pi_q(q: u64, n: u64) -> BigUint {
    assert!(n >= 1, "degree must be positive");
    let mut acc = BigInt::zero();
    for d in divisors(n) {
        let mu = mobius(n / d);
        if mu != 0 {
            acc += BigInt::from(mu) * pow_i(q, d);
        }
    }
    let (quot, rem) = acc.div_rem(&BigInt::from(n));
    debug_assert!(rem.is_zero());
    quot.to_biguint().expect("count is nonnegative")
}

/// Class of a prime under the quadratic character modulo T.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chi2Class {
    /// Non-square constant term.
    Minus,
    /// The prime T or a nonzero square constant term.
    ZeroOrPlus,
}

/// Exact count of degree-n primes in the given class (q odd).
pub fn pi_chi2(q: u64, n: u64, class: Chi2Class) -> Result<BigUint> {
    if q.is_multiple_of(2) {
        return Err(Error::EvenCharacteristic(q));
    }
    assert!(n >= 1, "degree must be positive");
    // A(d) = Σ_{e | d, d/e odd} e π(e; -1)
    let a = |d: u64| -> BigInt { (0..=nt::v2(d)).map(|i| (pow_i(q, d >> i) - 1) / 2).sum() };
    let mut acc = BigInt::zero();
    for d in divisors(n) {
        let mu = mobius(n / d);
        if mu != 0 {
            acc += BigInt::from(mu) * a(d);
        }
    }
    let (minus, rem) = acc.div_rem(&BigInt::from(n));
    if !rem.is_zero() || minus.is_negative() {
        return Err(Error::Malformed(format!("q = {q} is not an odd prime power")));
    }
    let minus = minus.to_biguint().unwrap();
    Ok(match class {
        Chi2Class::Minus => minus,
        Chi2Class::ZeroOrPlus => pi_q(q, n) - minus,
    })
}

/// Which prime count a [`PrimeCountTable`] holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeKind {
    All { q: u64 },
    Chi2 { q: u64, class: Chi2Class },
}

/// Prime counts for degrees 1..=N; `values[0]` is unused and zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeCountTable {
    pub kind: PrimeKind,
    pub values: Vec<BigUint>,
}

impl PrimeCountTable {
    pub fn all(q: u64, n_max: u64) -> Self {
        let values = std::iter::once(BigUint::zero()).chain((1..=n_max).map(|n| pi_q(q, n))).collect();
        PrimeCountTable { kind: PrimeKind::All { q }, values }
    }

    pub fn chi2(q: u64, class: Chi2Class, n_max: u64) -> Result<Self> {
        let mut values = vec![BigUint::zero()];
        for n in 1..=n_max {
            values.push(pi_chi2(q, n, class)?);
        }
        Ok(PrimeCountTable { kind: PrimeKind::Chi2 { q, class }, values })
    }

    /// Σ_{d|n} d·π(d) = q^n for every tabulated n (only meaningful for `All`).
    pub fn divisor_sum_identity_holds(&self) -> bool {
        let PrimeKind::All { q } = self.kind else { return false };
        (1..self.values.len() as u64).all(|n| {
            let s: BigUint = divisors(n).into_iter().map(|d| BigUint::from(d) * &self.values[d as usize]).sum();
            s == pow_u(q, n)
        })
    }
}

/// Euler totient of m in F_q[T].
pub fn phi_m(field: &FieldSpec, m: &MonicPoly) -> Result<BigUint> {
    if m.degree() == 0 {
        return Err(Error::Malformed("modulus must have positive degree".into()));
    }
    let q = field.q();
    let mut acc = BigUint::one();
    for (p, v) in field.factor(m)?.factors {
        let d = p.degree() as u64;
        acc *= pow_u(q, d * v as u64) - pow_u(q, d * (v as u64 - 1));
    }
    Ok(acc)
}

fn check_residue(field: &FieldSpec, a: &[Elem], m: &MonicPoly) -> Result<Vec<Elem>> {
    if m.degree() == 0 {
        return Err(Error::Malformed("modulus must have positive degree".into()));
    }
    let r = field.poly_rem(a, m.coeffs());
    if r.is_empty() || field.poly_gcd(&r, m.coeffs()) != vec![1] {
        return Err(Error::NotCoprime);
    }
    Ok(r)
}

/// π_q(n; a, m) by enumerating the degree-n irreducibles.
pub fn pi_arith(field: &FieldSpec, n: usize, a: &[Elem], m: &MonicPoly, cap: u64) -> Result<BigUint> {
    let a = check_residue(field, a, m)?;
    let primes = field.irreducibles(n, cap)?;
    let count = primes.par_iter().filter(|p| field.poly_rem(p.coeffs(), m.coeffs()) == a).count();
    Ok(BigUint::from(count))
}

/// Wan's inequality |n·π(n;a,m) − q^n/φ(m)| ≤ (deg m + 1) q^{n/2}, decided exactly.
pub fn wan_bound_holds(q: u64, n: u64, count: &BigUint, phi: &BigUint, deg_m: usize) -> bool {
    let phi = BigInt::from(phi.clone());
    let lhs = BigInt::from(n) * &phi * BigInt::from(count.clone()) - pow_i(q, n);
    let rhs = BigInt::from(deg_m as u64 + 1) * &phi;
    &lhs * &lhs <= &rhs * &rhs * pow_i(q, n)
}

/// Largest residue ring q^{deg m} handled by [`ResidueGroup`].
pub const MAX_RESIDUES: u64 = 1 << 22;
const MUL_TABLE_MAX: usize = 2048;

/// The unit group (F_q[T]/m)^× with a dense indexing of its elements.
pub struct ResidueGroup {
    field: FieldSpec,
    m: MonicPoly,
    /// unit residues, as polynomials of degree < deg m
    units: Vec<Vec<Elem>>,
    /// residue code -> unit position, `u32::MAX` for non-units
    position: Vec<u32>,
    table: Option<Vec<u32>>,
}

impl ResidueGroup {
    pub fn new(field: &FieldSpec, m: &MonicPoly) -> Result<Self> {
        let d = m.degree();
        if d == 0 {
            return Err(Error::Malformed("modulus must have positive degree".into()));
        }
        let size = field.count_monic(d);
        if size > MAX_RESIDUES as u128 {
            return Err(cap_error("residues modulo m", size, MAX_RESIDUES));
        }
        let mut units = Vec::new();
        let mut position = vec![u32::MAX; size as usize];
        for code in 0..size as u64 {
            let r = residue_from_code(field, d, code);
            if !r.is_empty() && field.poly_gcd(&r, m.coeffs()) == vec![1] {
                position[code as usize] = units.len() as u32;
                units.push(r);
            }
        }
        let mut group = ResidueGroup { field: field.clone(), m: m.clone(), units, position, table: None };
        let phi = group.order();
        if phi <= MUL_TABLE_MAX {
            let mut t = vec![0u32; phi * phi];
            for i in 0..phi {
                for j in 0..phi {
                    t[i * phi + j] = group.mul_slow(i, j);
                }
            }
            group.table = Some(t);
        }
        Ok(group)
    }

    pub fn order(&self) -> usize {
        self.units.len()
    }

    pub fn modulus(&self) -> &MonicPoly {
        &self.m
    }

    pub fn units(&self) -> &[Vec<Elem>] {
        &self.units
    }

    /// Position of the class of `f`, or None when f is not a unit mod m.
    pub fn class_of(&self, f: &[Elem]) -> Option<usize> {
        let r = self.field.poly_rem(f, self.m.coeffs());
        let code = residue_code(&self.field, &r);
        match self.position[code as usize] {
            u32::MAX => None,
            p => Some(p as usize),
        }
    }

    fn mul_slow(&self, i: usize, j: usize) -> u32 {
        let prod = self.field.poly_mulmod(&self.units[i], &self.units[j], self.m.coeffs());
        self.position[residue_code(&self.field, &prod) as usize]
    }

    fn mul(&self, i: usize, j: usize) -> usize {
        match &self.table {
            Some(t) => t[i * self.order() + j] as usize,
            None => self.mul_slow(i, j) as usize,
        }
    }

    fn power_map(&self, k: u64) -> Vec<usize> {
        (0..self.order())
            .map(|i| {
                let r = self.field.poly_powmod(&self.units[i], k, self.m.coeffs());
                self.position[residue_code(&self.field, &r) as usize] as usize
            })
            .collect()
    }

    fn convolve(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.order()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    out[self.mul(i, j)] += x * y;
                }
            }
        }
        out
    }
}

fn residue_from_code(field: &FieldSpec, d: usize, mut code: u64) -> Vec<Elem> {
    let q = field.q();
    let mut r: Vec<Elem> = (0..d)
        .map(|_| {
            let c = (code % q) as Elem;
            code /= q;
            c
        })
        .collect();
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

fn residue_code(field: &FieldSpec, r: &[Elem]) -> u64 {
    let q = field.q();
    r.iter().rev().fold(0u64, |acc, &c| acc * q + c as u64)
}

/// π_q(n; b, m) for every unit class b and every n ≤ N, computed exactly in
/// the group ring Z[(F_q[T]/m)^×] from the class-valued zeta function.
pub struct ArithPrimeTable {
    pub group: ResidueGroup,
    /// `counts[n][class]`, with `counts[0]` all zero
    pub counts: Vec<Vec<BigUint>>,
}

impl ArithPrimeTable {
    pub fn new(field: &FieldSpec, m: &MonicPoly, n_max: usize) -> Result<Self> {
        let group = ResidueGroup::new(field, m)?;
        let phi = group.order();
        let dm = m.degree();
        let q = field.q();
        // Z_k for k < deg m: classes of the coprime monic polynomials of degree k.
        let low: Vec<Vec<BigInt>> = (0..dm.min(n_max + 1))
            .map(|k| {
                let mut z = vec![BigInt::zero(); phi];
                for f in field.monic_iter(k) {
                    if let Some(c) = group.class_of(f.coeffs()) {
                        z[c] += 1;
                    }
                }
                z
            })
            .collect();
        let mut lambda: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); phi]];
        let mut lambda_mass: Vec<BigInt> = vec![BigInt::zero()];
        let mut counts: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); phi]];
        let mut adams: HashMap<u64, Vec<usize>> = HashMap::new();
        for n in 1..=n_max {
            // n Z_n
            let mut l: Vec<BigInt> = if n < dm {
                low[n].iter().map(|x| x * BigInt::from(n)).collect()
            } else {
                vec![pow_i(q, (n - dm) as u64) * BigInt::from(n); phi]
            };
            let mut flat = BigInt::zero();
            for j in 1..n {
                let k = n - j;
                if k < dm {
                    for (acc, x) in l.iter_mut().zip(group.convolve(&lambda[j], &low[k])) {
                        *acc -= x;
                    }
                } else {
                    flat += pow_i(q, (k - dm) as u64) * &lambda_mass[j];
                }
            }
            for x in l.iter_mut() {
                *x -= &flat;
            }
            lambda_mass.push(l.iter().sum());
            // n p_n = λ_n − Σ_{d | n, d < n} d ψ_{n/d}(p_d)
            let mut np = l.clone();
            for d in divisors(n as u64) {
                if d == n as u64 {
                    continue;
                }
                let k = n as u64 / d;
                let map = adams.entry(k).or_insert_with(|| group.power_map(k));
                for (g, c) in counts[d as usize].iter().enumerate() {
                    if !c.is_zero() {
                        np[map[g]] -= BigInt::from(d) * BigInt::from(c.clone());
                    }
                }
            }
            let mut row = Vec::with_capacity(phi);
            for x in np {
                let (quot, rem) = x.div_rem(&BigInt::from(n));
                if !rem.is_zero() || quot.is_negative() {
                    return Err(Error::Malformed(format!("inconsistent class counts at degree {n}")));
                }
                row.push(quot.to_biguint().unwrap());
            }
            lambda.push(l);
            counts.push(row);
        }
        Ok(ArithPrimeTable { group, counts })
    }

    pub fn n_max(&self) -> usize {
        self.counts.len() - 1
    }

    /// π_q(n; a, m).
    pub fn count(&self, n: usize, a: &[Elem]) -> Result<BigUint> {
        let class = self.group.class_of(a).ok_or(Error::NotCoprime)?;
        Ok(self.counts[n][class].clone())
    }

    /// Counts for the class of `a`, indexed by degree (index 0 unused).
    pub fn class_series(&self, a: &[Elem]) -> Result<Vec<BigUint>> {
        let class = self.group.class_of(a).ok_or(Error::NotCoprime)?;
        Ok(self.counts.iter().map(|row| row[class].clone()).collect())
    }
}

/// Exact π_q(n; a, m) through [`ArithPrimeTable`], without enumerating degree n.
pub fn pi_arith_exact(field: &FieldSpec, n: usize, a: &[Elem], m: &MonicPoly) -> Result<BigUint> {
    let a = check_residue(field, a, m)?;
    ArithPrimeTable::new(field, m, n)?.count(n, &a)
}

/// φ(m) as a machine integer, for code that needs it small.
#[allow(dead_code)]
pub(crate) fn phi_small(field: &FieldSpec, m: &MonicPoly) -> Result<u64> {
    phi_m(field, m)?.to_u64().ok_or_else(|| cap_error("phi(m)", "more than 2^64", u64::MAX))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, field_of_size};
    use crate::poly::{parse_monic, parse_poly};

    #[test]
    fn pi_q_examples() {
        assert_eq!(pi_q(7, 1), BigUint::from(7u32));
        assert_eq!(pi_q(2, 4), BigUint::from(3u32));
        assert_eq!(pi_q(3, 2), BigUint::from(3u32));
    }

    #[test]
    fn pi_q_matches_enumeration() {
        for q in [2u64, 3, 4, 5] {
            let f = field_of_size(q).unwrap();
            for n in 1..=5 {
                let by_rabin = f.monic_iter(n).filter(|p| f.is_irreducible(p)).count();
                assert_eq!(pi_q(q, n as u64), BigUint::from(by_rabin), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn divisor_sum_identity() {
        for q in [2u64, 3, 4, 5, 7, 9, 11] {
            assert!(PrimeCountTable::all(q, 20).divisor_sum_identity_holds());
        }
    }

    #[test]
    fn chi2_examples() {
        assert_eq!(pi_chi2(3, 1, Chi2Class::Minus).unwrap(), BigUint::from(1u32));
        assert_eq!(pi_chi2(3, 2, Chi2Class::Minus).unwrap(), BigUint::from(2u32));
        assert_eq!(pi_chi2(3, 2, Chi2Class::ZeroOrPlus).unwrap(), BigUint::from(1u32));
        assert_eq!(pi_chi2(4, 2, Chi2Class::Minus), Err(Error::EvenCharacteristic(4)));
    }

    #[test]
    fn chi2_classes_partition() {
        for q in [3u64, 5, 9] {
            for n in 1..=12 {
                let a = pi_chi2(q, n, Chi2Class::Minus).unwrap();
                let b = pi_chi2(q, n, Chi2Class::ZeroOrPlus).unwrap();
                assert_eq!(a + b, pi_q(q, n));
            }
        }
    }

    #[test]
    fn chi2_matches_enumeration() {
        for q in [3u64, 5] {
            let f = field_of_size(q).unwrap();
            for n in 1..=5usize {
                let mut minus = 0u32;
                for p in f.irreducibles(n, u64::MAX).unwrap().iter() {
                    if f.chi2(p).unwrap() == -1 {
                        minus += 1;
                    }
                }
                assert_eq!(pi_chi2(q, n as u64, Chi2Class::Minus).unwrap(), BigUint::from(minus));
            }
        }
    }

    #[test]
    fn phi_examples() {
        let f = build_field(3, 1, None).unwrap();
        for (m, expected) in [("T", 2u32), ("T^2", 6), ("T^2+T", 4)] {
            let m = parse_monic(&f, m).unwrap();
            assert_eq!(phi_m(&f, &m).unwrap(), BigUint::from(expected));
            assert_eq!(ResidueGroup::new(&f, &m).unwrap().order(), expected as usize);
        }
    }

    #[test]
    fn arith_examples() {
        let f = build_field(3, 1, None).unwrap();
        let t = MonicPoly::t();
        assert_eq!(pi_arith(&f, 1, &[1], &t, 1000).unwrap(), BigUint::from(1u32));
        assert_eq!(pi_arith(&f, 2, &[1], &t, 1000).unwrap(), BigUint::from(1u32));
        assert_eq!(pi_arith(&f, 2, &[0, 1], &t, 1000), Err(Error::NotCoprime));
    }

    #[test]
    fn group_ring_matches_enumeration() {
        let cases = [(3u64, "T"), (3, "T^2+1"), (3, "T^2+T"), (2, "T^3+T+1"), (2, "T^2"), (5, "T+2"), (4, "T^2")];
        for (q, ms) in cases {
            let f = field_of_size(q).unwrap();
            let m = parse_monic(&f, ms).unwrap();
            let n_max = (1..).take_while(|&n| f.count_monic(n) <= 20_000).last().unwrap();
            let table = ArithPrimeTable::new(&f, &m, n_max).unwrap();
            let phi = phi_m(&f, &m).unwrap();
            for n in 1..=n_max {
                for unit in table.group.units() {
                    let expect = pi_arith(&f, n, unit, &m, u64::MAX).unwrap();
                    assert_eq!(table.count(n, unit).unwrap(), expect, "q={q} m={ms} n={n}");
                    assert!(wan_bound_holds(q, n as u64, &expect, &phi, m.degree()));
                }
            }
        }
    }

    #[test]
    fn group_ring_total_is_coprime_prime_count() {
        let f = field_of_size(3).unwrap();
        let m = parse_monic(&f, "T^3+2T+1").unwrap();
        let table = ArithPrimeTable::new(&f, &m, 30).unwrap();
        for n in 4..=30usize {
            let total: BigUint = table.counts[n].iter().sum();
            assert_eq!(total, pi_q(3, n as u64));
        }
        let a = parse_poly(&f, "2T").unwrap();
        assert!(table.count(10, &a).is_ok());
    }
}
