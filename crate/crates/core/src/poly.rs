//! Polynomials over F_q: monic enumeration, irreducibility, factorization,
//! the quadratic character and a small text format.
//!
//! General polynomials are plain `Vec<Elem>` (low-to-high, no trailing zeros,
//! the zero polynomial is empty). Monic ones get their own type.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{cap_error, Error, Result};
use crate::field::{Elem, FieldSpec};
use crate::nt;

/// A monic polynomial, coefficients low-to-high with leading coefficient 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MonicPoly {
    coeffs: Vec<Elem>,
}

impl MonicPoly {
    /// Validated constructor.
    pub fn new(field: &FieldSpec, coeffs: Vec<Elem>) -> Result<Self> {
        if coeffs.last() != Some(&1) {
            return Err(Error::Malformed("polynomial is not monic".into()));
        }
        if coeffs.iter().any(|&c| c as u64 >= field.q()) {
            return Err(Error::Malformed("coefficient outside the field".into()));
        }
        Ok(MonicPoly { coeffs })
    }

    pub(crate) fn from_raw(coeffs: Vec<Elem>) -> Self {
        debug_assert_eq!(coeffs.last(), Some(&1));
        MonicPoly { coeffs }
    }

    pub fn one() -> Self {
        MonicPoly { coeffs: vec![1] }
    }

    /// The polynomial T.
    pub fn t() -> Self {
        MonicPoly { coeffs: vec![0, 1] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> Elem {
        self.coeffs[0]
    }
}

impl Ord for MonicPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for MonicPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_poly(&self.coeffs))
    }
}

/// Renders a polynomial as `T^2+2T+1`. Coefficients are element indices.
pub fn format_poly(coeffs: &[Elem]) -> String {
    if coeffs.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
        parts.push(match i {
            0 => coef,
            1 => format!("{coef}T"),
            _ => format!("{coef}T^{i}"),
        });
    }
    parts.join("+")
}

/// Parses `T^2+2T+1`, `2*T + 1`, `T^3-T` and similar.
pub fn parse_poly(field: &FieldSpec, s: &str) -> Result<Vec<Elem>> {
    let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if text.is_empty() {
        return Err(Error::Malformed("empty polynomial".into()));
    }
    let bad = || Error::Malformed(format!("cannot parse polynomial '{s}'"));
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let mut start = 0;
    let mut negative = false;
    let bytes = text.as_bytes();
    for i in 0..=bytes.len() {
        if i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && i > 0 && bytes[i - 1] != b'^') {
            let piece = &text[start..i];
            if !(piece.is_empty() && start == 0) {
                terms.push((negative, piece));
            }
            if i < bytes.len() {
                negative = bytes[i] == b'-';
            }
            start = i + 1;
        } else if i == 0 && (bytes[0] == b'+' || bytes[0] == b'-') {
            negative = bytes[0] == b'-';
            start = 1;
        }
    }
    let mut out: Vec<Elem> = Vec::new();
    for (neg, term) in terms {
        if term.is_empty() {
            return Err(bad());
        }
        let (coef_str, exp) = match term.find(['T', 't']) {
            None => (term, 0usize),
            Some(pos) => {
                let coef = term[..pos].trim_end_matches('*');
                let rest = &term[pos + 1..];
                let exp = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^').and_then(|e| e.parse().ok()).ok_or_else(bad)?
                };
                (coef, exp)
            }
        };
        let coef: u64 = if coef_str.is_empty() { 1 } else { coef_str.parse().map_err(|_| bad())? };
        if coef >= field.q() {
            return Err(Error::Malformed(format!("coefficient {coef} is not below q = {}", field.q())));
        }
        let mut c = coef as Elem;
        if neg {
            c = field.neg(c);
        }
        if out.len() <= exp {
            out.resize(exp + 1, 0);
        }
        out[exp] = field.add(out[exp], c);
    }
    trim(&mut out);
    Ok(out)
}

pub fn parse_monic(field: &FieldSpec, s: &str) -> Result<MonicPoly> {
    let v = parse_poly(field, s)?;
    MonicPoly::new(field, v).map_err(|_| Error::Malformed(format!("'{s}' is not a monic polynomial")))
}

fn trim(v: &mut Vec<Elem>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Canonical factorization: distinct monic primes with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<(MonicPoly, u32)>,
}

impl Factorization {
    pub fn expand(&self, field: &FieldSpec) -> MonicPoly {
        let mut acc = vec![1];
        for (p, e) in &self.factors {
            for _ in 0..*e {
                acc = field.poly_mul(&acc, p.coeffs());
            }
        }
        MonicPoly::from_raw(acc)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }
}

/// Iterator over monic polynomials of one degree in canonical order.
pub struct MonicIter {
    field: FieldSpec,
    digits: Vec<u32>,
    done: bool,
}

impl Iterator for MonicIter {
    type Item = MonicPoly;

    fn next(&mut self) -> Option<MonicPoly> {
        if self.done {
            return None;
        }
        let mut coeffs = self.digits.clone();
        coeffs.push(1);
        // The constant coefficient is the most significant digit.
        let q = self.field.q() as u32;
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < q {
                break;
            }
            self.digits[i] = 0;
        }
        Some(MonicPoly { coeffs })
    }
}

impl FieldSpec {
    pub fn poly_add(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let mut out: Vec<Elem> =
            (0..a.len().max(b.len())).map(|i| self.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0))).collect();
        trim(&mut out);
        out
    }

    pub fn poly_sub(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let mut out: Vec<Elem> =
            (0..a.len().max(b.len())).map(|i| self.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0))).collect();
        trim(&mut out);
        out
    }

    pub fn poly_mul(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        trim(&mut out);
        out
    }

    pub fn poly_scale(&self, a: &[Elem], c: Elem) -> Vec<Elem> {
        let mut out: Vec<Elem> = a.iter().map(|&x| self.mul(x, c)).collect();
        trim(&mut out);
        out
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn poly_divrem(&self, a: &[Elem], b: &[Elem]) -> (Vec<Elem>, Vec<Elem>) {
        assert!(!b.is_empty(), "division by the zero polynomial");
        if a.len() < b.len() {
            let mut r = a.to_vec();
            trim(&mut r);
            return (Vec::new(), r);
        }
        let db = b.len() - 1;
        let lead_inv = self.inv(b[db]);
        let mut work = a.to_vec();
        let mut quot = vec![0; a.len() - db];
        for i in (db..a.len()).rev() {
            let c = self.mul(work[i], lead_inv);
            quot[i - db] = c;
            if c == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                work[i - db + j] = self.sub(work[i - db + j], self.mul(c, bj));
            }
        }
        work.truncate(db);
        trim(&mut work);
        trim(&mut quot);
        (quot, work)
    }

    pub fn poly_rem(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        self.poly_divrem(a, b).1
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn poly_gcd(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let (mut x, mut y) = (a.to_vec(), b.to_vec());
        while !y.is_empty() {
            let r = self.poly_rem(&x, &y);
            x = y;
            y = r;
        }
        if let Some(&lead) = x.last() {
            x = self.poly_scale(&x, self.inv(lead));
        }
        x
    }

    pub fn poly_mulmod(&self, a: &[Elem], b: &[Elem], m: &[Elem]) -> Vec<Elem> {
        self.poly_rem(&self.poly_mul(a, b), m)
    }

    pub fn poly_powmod(&self, a: &[Elem], mut e: u64, m: &[Elem]) -> Vec<Elem> {
        let mut base = self.poly_rem(a, m);
        let mut acc = self.poly_rem(&[1], m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.poly_mulmod(&acc, &base, m);
            }
            base = self.poly_mulmod(&base, &base, m);
            e >>= 1;
        }
        acc
    }

    pub fn poly_eval(&self, a: &[Elem], x: Elem) -> Elem {
        a.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Exact quotient a / b for monic b, or None when b does not divide a.
    /// `work` is scratch space reused across calls.
    fn exact_div_monic(&self, a: &[Elem], b: &[Elem], work: &mut Vec<Elem>) -> Option<Vec<Elem>> {
        let db = b.len() - 1;
        if a.len() < b.len() {
            return None;
        }
        work.clear();
        work.extend_from_slice(a);
        for i in (db..a.len()).rev() {
            let c = work[i];
            if c == 0 {
                continue;
            }
            for j in 0..db {
                work[i - db + j] = self.sub(work[i - db + j], self.mul(c, b[j]));
            }
        }
        if work[..db].iter().any(|&c| c != 0) {
            return None;
        }
        Some(work[db..].to_vec())
    }

    /// Monic polynomials of degree n in canonical order, without a cap.
    pub fn monic_iter(&self, n: usize) -> MonicIter {
        MonicIter { field: self.clone(), digits: vec![0; n], done: false }
    }

    /// All q^n monic polynomials of degree n in canonical order.
    pub fn enumerate_monic(&self, n: usize, cap: u64) -> Result<Vec<MonicPoly>> {
        let count = self.count_monic(n);
        if count > cap as u128 {
            return Err(cap_error(format!("monic polynomials of degree {n}"), count, cap));
        }
        Ok(self.monic_iter(n).collect())
    }

    /// q^n, saturating.
    pub fn count_monic(&self, n: usize) -> u128 {
        (self.q() as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
    }

    /// Monic polynomial of degree n whose low coefficients are the base-q
    /// digits of `code`, least significant first.
    pub(crate) fn monic_from_code(&self, n: usize, mut code: u64) -> Vec<Elem> {
        let q = self.q();
        let mut c = Vec::with_capacity(n + 1);
        for _ in 0..n {
            c.push((code % q) as Elem);
            code /= q;
        }
        c.push(1);
        c
    }

    fn code_of_monic(&self, c: &[Elem]) -> u64 {
        let q = self.q();
        c[..c.len() - 1].iter().rev().fold(0u64, |acc, &x| acc * q + x as u64)
    }

    /// Rabin irreducibility test.
    pub fn is_irreducible(&self, f: &MonicPoly) -> bool {
        let n = f.degree();
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let m = f.coeffs();
        let x = vec![0, 1];
        let q = self.q();
        let mut frob = Vec::with_capacity(n + 1);
        let mut h = x.clone();
        frob.push(h.clone());
        for _ in 0..n {
            h = self.poly_powmod(&h, q, m);
            frob.push(h.clone());
        }
        // frob[n] is reduced and n >= 2, so the congruence is an equality.
        if frob[n] != x {
            return false;
        }
        for (l, _) in nt::factorize(n as u64) {
            let d = n / l as usize;
            let g = self.poly_gcd(&self.poly_sub(&frob[d], &x), m);
            if g != vec![1] {
                return false;
            }
        }
        true
    }

    /// Monic irreducibles of degree d in canonical order, cached per field.
    pub fn irreducibles(&self, d: usize, cap: u64) -> Result<Arc<Vec<MonicPoly>>> {
        if let Some(hit) = self.irreducible_cache().lock().unwrap().get(&d) {
            return Ok(hit.clone());
        }
        let count = self.count_monic(d);
        if count > cap as u128 {
            return Err(cap_error(format!("sieve for irreducibles of degree {d}"), count, cap));
        }
        let list = Arc::new(self.sieve_irreducibles(d, cap)?);
        self.irreducible_cache().lock().unwrap().insert(d, list.clone());
        Ok(list)
    }

    fn sieve_irreducibles(&self, n: usize, cap: u64) -> Result<Vec<MonicPoly>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        if n == 1 {
            return Ok(self.monic_iter(1).collect());
        }
        let size = self.count_monic(n) as u64;
        let mut composite = vec![0u64; size.div_ceil(64) as usize];
        for d in 1..=n / 2 {
            let small = self.irreducibles(d, cap)?;
            let cofactors = self.count_monic(n - d) as u64;
            for p in small.iter() {
                for code in 0..cofactors {
                    let g = self.monic_from_code(n - d, code);
                    let prod = self.poly_mul(p.coeffs(), &g);
                    let c = self.code_of_monic(&prod);
                    composite[(c / 64) as usize] |= 1 << (c % 64);
                }
            }
        }
        let mut out: Vec<MonicPoly> = (0..size)
            .filter(|c| composite[(c / 64) as usize] & (1 << (c % 64)) == 0)
            .map(|c| MonicPoly::from_raw(self.monic_from_code(n, c)))
            .collect();
        out.sort();
        Ok(out)
    }

    /// Factorization by trial division with cached irreducibles.
    pub fn factor(&self, f: &MonicPoly) -> Result<Factorization> {
        if f.degree() == 0 {
            return Err(Error::Malformed("cannot factor a constant".into()));
        }
        let cap = u64::MAX;
        let mut rem = f.coeffs().to_vec();
        let mut factors = Vec::new();
        let mut work = Vec::new();
        let mut d = 1;
        'levels: while 2 * d < rem.len() {
            let primes = self.irreducibles(d, cap)?;
            for p in primes.iter() {
                if 2 * d > rem.len() - 1 {
                    break 'levels;
                }
                let mut mult = 0;
                while let Some(quot) = self.exact_div_monic(&rem, p.coeffs(), &mut work) {
                    rem = quot;
                    mult += 1;
                }
                if mult > 0 {
                    factors.push((p.clone(), mult));
                }
            }
            d += 1;
        }
        if rem.len() > 1 {
            factors.push((MonicPoly::from_raw(rem), 1));
        }
        factors.sort();
        Ok(Factorization { factors })
    }

    /// Quadratic character modulo T: 0, +1 or -1 from f(0).
    pub fn chi2(&self, f: &MonicPoly) -> Result<i8> {
        self.chi2_of_constant(f.constant_term())
    }

    pub(crate) fn chi2_of_constant(&self, c: Elem) -> Result<i8> {
        if self.q().is_multiple_of(2) {
            return Err(Error::EvenCharacteristic(self.q()));
        }
        Ok(if c == 0 {
            0
        } else if self.is_square(c) {
            1
        } else {
            -1
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, field_of_size};
    use proptest::prelude::*;

    fn f3() -> FieldSpec {
        build_field(3, 1, None).unwrap()
    }

    #[test]
    fn enumeration_order() {
        let f = f3();
        let lin: Vec<String> = f.enumerate_monic(1, 100).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(lin, vec!["T", "T+1", "T+2"]);
        assert_eq!(f.enumerate_monic(0, 100).unwrap(), vec![MonicPoly::one()]);
        let f9 = field_of_size(9).unwrap();
        let quads = f9.enumerate_monic(2, 1000).unwrap();
        assert_eq!(quads.len(), 81);
        let mut sorted = quads.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), 81);
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(f3().enumerate_monic(10, 1000), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn factor_examples() {
        let f = f3();
        let sq = parse_monic(&f, "T^2+2T+1").unwrap();
        assert_eq!(f.factor(&sq).unwrap().factors, vec![(parse_monic(&f, "T+1").unwrap(), 2)]);
        let irr = parse_monic(&f, "T^2+1").unwrap();
        assert_eq!(f.factor(&irr).unwrap().factors, vec![(irr.clone(), 1)]);
        // T^3 + T = T (T^2 + 1)
        let cubic = parse_monic(&f, "T^3+T").unwrap();
        let fac = f.factor(&cubic).unwrap();
        assert_eq!(fac.factors, vec![(MonicPoly::t(), 1), (irr, 1)]);
        assert_eq!(fac.expand(&f), cubic);
    }

    #[test]
    fn chi2_examples() {
        let f = f3();
        assert_eq!(f.chi2(&parse_monic(&f, "T").unwrap()), Ok(0));
        assert_eq!(f.chi2(&parse_monic(&f, "T+1").unwrap()), Ok(1));
        assert_eq!(f.chi2(&parse_monic(&f, "T+2").unwrap()), Ok(-1));
        let f4 = field_of_size(4).unwrap();
        assert_eq!(f4.chi2(&MonicPoly::t()), Err(Error::EvenCharacteristic(4)));
    }

    #[test]
    fn sieve_matches_rabin() {
        for q in [2u64, 3, 4, 5, 9] {
            let f = field_of_size(q).unwrap();
            for n in 1..=5 {
                if f.count_monic(n) > 100_000 {
                    continue;
                }
                let sieve = f.irreducibles(n, u64::MAX).unwrap();
                let rabin: Vec<MonicPoly> = f.monic_iter(n).filter(|p| f.is_irreducible(p)).collect();
                let mut rabin_sorted = rabin.clone();
                rabin_sorted.sort();
                assert_eq!(*sieve, rabin_sorted, "q = {q}, n = {n}");
            }
        }
    }

    #[test]
    fn factorizations_round_trip() {
        for q in [2u64, 3, 5, 9] {
            let f = field_of_size(q).unwrap();
            for n in 1..=6 {
                if f.count_monic(n) > 60_000 {
                    continue;
                }
                for p in f.monic_iter(n) {
                    let fac = f.factor(&p).unwrap();
                    assert_eq!(fac.expand(&f), p);
                    for (prime, _) in &fac.factors {
                        assert!(f.is_irreducible(prime));
                    }
                    let mut sorted = fac.factors.clone();
                    sorted.sort();
                    sorted.dedup_by(|a, b| a.0 == b.0);
                    assert_eq!(sorted, fac.factors);
                }
            }
        }
    }

    #[test]
    fn parse_and_format() {
        let f = build_field(5, 1, None).unwrap();
        let p = parse_poly(&f, "T^3 - T + 2").unwrap();
        assert_eq!(p, vec![2, 4, 0, 1]);
        assert_eq!(format_poly(&p), "T^3+4T+2");
        assert_eq!(parse_poly(&f, "2*T+1").unwrap(), vec![1, 2]);
        assert_eq!(parse_poly(&f, "1").unwrap(), vec![1]);
        assert!(parse_poly(&f, "T^2+7").is_err());
        assert!(parse_poly(&f, "T^").is_err());
        assert!(parse_monic(&f, "2T").is_err());
    }

    #[test]
    fn divrem_identity() {
        let f = build_field(7, 1, None).unwrap();
        let a = vec![3, 1, 4, 1, 5, 6];
        let b = vec![2, 0, 3];
        let (qt, r) = f.poly_divrem(&a, &b);
        assert!(r.len() < b.len());
        assert_eq!(f.poly_add(&f.poly_mul(&qt, &b), &r), a);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn chi2_is_multiplicative(a in 0u32..5, b in 0u32..5, c in 0u32..5, d in 0u32..5, use_f3 in any::<bool>()) {
            let f = if use_f3 { f3() } else { build_field(5, 1, None).unwrap() };
            let q = f.q() as u32;
            let x = MonicPoly::from_raw(vec![a % q, b % q, 1]);
            let y = MonicPoly::from_raw(vec![c % q, d % q, 1]);
            let xy = MonicPoly::from_raw(f.poly_mul(x.coeffs(), y.coeffs()));
            prop_assert_eq!(f.chi2(&xy).unwrap(), f.chi2(&x).unwrap() * f.chi2(&y).unwrap());
        }

        #[test]
        fn factor_round_trip_random(coeffs in proptest::collection::vec(0u32..7, 1..12)) {
            let f = build_field(7, 1, None).unwrap();
            let mut c = coeffs;
            c.push(1);
            let p = MonicPoly::from_raw(c);
            prop_assert_eq!(f.factor(&p).unwrap().expand(&f), p);
        }
    }
}
