//! Arithmetic in F_{p^k}.
//!
//! Elements are indices `Σ c_i p^i` where `c_0 + c_1 t + ... ` is the reduced
//! representative modulo the defining polynomial. Index order is the canonical
//! element order used everywhere else.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{cap_error, Error, Result};
use crate::nt;
use crate::poly::MonicPoly;

/// Field element, stored as its canonical index.
pub type Elem = u32;

/// Largest field size accepted for extension fields (log tables are dense).
pub const MAX_EXTENSION_Q: u64 = 1 << 20;
/// Largest prime accepted for prime fields.
pub const MAX_PRIME: u64 = (1 << 31) - 1;
/// Default enumeration cap (number of polynomials).
pub const DEFAULT_CAP: u64 = 100_000_000;

const ADD_TABLE_MAX_Q: u32 = 1024;

#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add: Option<Vec<u32>>,
    pub(crate) irreducibles: Mutex<HashMap<usize, Arc<Vec<MonicPoly>>>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q())?;
        if self.k() > 1 {
            write!(f, " mod {:?}", self.modulus())?;
        }
        Ok(())
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p() && self.k() == other.k() && self.modulus() == other.modulus()
    }
}

impl Eq for FieldSpec {}

/// Builds F_{p^k}. Without a modulus the lexicographically smallest monic
/// irreducible of degree k is used (for k = 1 this is T).
pub fn build_field(p: u64, k: u32, modulus: Option<&[u64]>) -> Result<FieldSpec> {
    if !nt::is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    if k == 0 {
        return Err(Error::Malformed("extension degree must be at least 1".into()));
    }
    if k == 1 {
        if p > MAX_PRIME {
            return Err(cap_error("prime field size", p, MAX_PRIME));
        }
        let modulus = match modulus {
            None => vec![0, 1],
            Some(m) => validate_modulus(p, 1, m)?,
        };
        return Ok(FieldSpec(Arc::new(Inner {
            p: p as u32,
            k: 1,
            q: p as u32,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            add: None,
            irreducibles: Mutex::new(HashMap::new()),
        })));
    }
    let q = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
    if q > MAX_EXTENSION_Q as u128 {
        return Err(cap_error("extension field size", q, MAX_EXTENSION_Q));
    }
    let prime = build_field(p, 1, None)?;
    let modulus = match modulus {
        Some(m) => validate_modulus(p, k, m)?,
        None => smallest_irreducible(&prime, k as usize),
    };
    if modulus.len() != k as usize + 1 || !prime.is_irreducible(&MonicPoly::from_raw(modulus.clone())) {
        return Err(Error::ReducibleModulus(format!("{:?}", modulus)));
    }
    let (exp, log) = log_tables(p as u32, q as u32, &modulus);
    let mut inner =
        Inner { p: p as u32, k, q: q as u32, modulus, exp, log, add: None, irreducibles: Mutex::new(HashMap::new()) };
    if inner.q <= ADD_TABLE_MAX_Q {
        let q = inner.q;
        let mut table = vec![0u32; (q * q) as usize];
        for a in 0..q {
            for b in 0..q {
                table[(a * q + b) as usize] = digit_add(p as u32, a, b);
            }
        }
        inner.add = Some(table);
    }
    Ok(FieldSpec(Arc::new(inner)))
}

/// Builds the field of size q with its default modulus.
pub fn field_of_size(q: u64) -> Result<FieldSpec> {
    let (p, k) = nt::prime_power(q).ok_or(Error::NotPrimePower(q))?;
    build_field(p, k, None)
}

fn validate_modulus(p: u64, k: u32, m: &[u64]) -> Result<Vec<u32>> {
    if m.len() != k as usize + 1 || m.last() != Some(&1) || m.iter().any(|&c| c >= p) {
        return Err(Error::ReducibleModulus(format!("{:?}", m)));
    }
    Ok(m.iter().map(|&c| c as u32).collect())
}

fn smallest_irreducible(prime: &FieldSpec, k: usize) -> Vec<u32> {
    for f in prime.monic_iter(k) {
        if prime.is_irreducible(&f) {
            return f.coeffs().to_vec();
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn digit_add(p: u32, mut a: u32, mut b: u32) -> u32 {
    let mut out = 0;
    let mut place = 1;
    while a > 0 || b > 0 {
        let d = (a % p + b % p) % p;
        out += d * place;
        place *= p;
        a /= p;
        b /= p;
    }
    out
}

fn digit_neg(p: u32, mut a: u32) -> u32 {
    let mut out = 0;
    let mut place = 1;
    while a > 0 {
        let d = (p - a % p) % p;
        out += d * place;
        place *= p;
        a /= p;
    }
    out
}

fn to_digits(p: u32, k: usize, mut a: u32) -> Vec<u32> {
    let mut d = vec![0; k];
    for slot in d.iter_mut() {
        *slot = a % p;
        a /= p;
    }
    d
}

fn from_digits(p: u32, d: &[u32]) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Multiplication of residues modulo a monic polynomial over F_p, on digits.
fn mulmod_digits(p: u32, a: &[u32], b: &[u32], modulus: &[u32]) -> Vec<u32> {
    let k = modulus.len() - 1;
    let p64 = p as u64;
    let mut prod = vec![0u64; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
        }
    }
    for i in (k..2 * k).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (j, &m) in modulus[..k].iter().enumerate() {
            prod[i - k + j] = (prod[i - k + j] + (p64 - c) * m as u64) % p64;
        }
    }
    prod[..k].iter().map(|&c| c as u32).collect()
}

fn log_tables(p: u32, q: u32, modulus: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let k = modulus.len() - 1;
    let order = q - 1;
    let prime_divisors: Vec<u64> = nt::factorize(order as u64).into_iter().map(|(l, _)| l).collect();
    let one = to_digits(p, k, 1);
    let pow = |g: &[u32], mut e: u64| -> Vec<u32> {
        let mut base = g.to_vec();
        let mut acc = one.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod_digits(p, &acc, &base, modulus);
            }
            base = mulmod_digits(p, &base, &base, modulus);
            e >>= 1;
        }
        acc
    };
    let generator = (2..q)
        .map(|c| to_digits(p, k, c))
        .find(|g| prime_divisors.iter().all(|&l| pow(g, order as u64 / l) != one))
        .expect("multiplicative group is cyclic");
    let mut exp = vec![0u32; 2 * order as usize];
    let mut log = vec![0u32; q as usize];
    let mut cur = one.clone();
    for i in 0..order {
        let idx = from_digits(p, &cur);
        exp[i as usize] = idx;
        exp[(i + order) as usize] = idx;
        log[idx as usize] = i;
        cur = mulmod_digits(p, &cur, &generator, modulus);
    }
    (exp, log)
}

impl FieldSpec {
    pub fn p(&self) -> u64 {
        self.0.p as u64
    }
    pub fn k(&self) -> u32 {
        self.0.k
    }
    pub fn q(&self) -> u64 {
        self.0.q as u64
    }
    /// Defining polynomial over F_p, low-to-high.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub(crate) fn irreducible_cache(&self) -> &Mutex<HashMap<usize, Arc<Vec<MonicPoly>>>> {
        &self.0.irreducibles
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        0
    }
    #[inline]
    pub fn one(&self) -> Elem {
        1
    }

    /// Image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.0.p as i64) as Elem
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let i = &*self.0;
        if i.k == 1 {
            let s = a as u64 + b as u64;
            return if s >= i.p as u64 { (s - i.p as u64) as Elem } else { s as Elem };
        }
        match &i.add {
            Some(t) => t[(a * i.q + b) as usize],
            None => digit_add(i.p, a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let i = &*self.0;
        if i.k == 1 {
            return if a == 0 { 0 } else { i.p - a };
        }
        digit_neg(i.p, a)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let i = &*self.0;
        if i.k == 1 {
            return ((a as u64 * b as u64) % i.p as u64) as Elem;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        i.exp[(i.log[a as usize] + i.log[b as usize]) as usize]
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "inverse of zero");
        let i = &*self.0;
        if i.k == 1 {
            return self.pow(a, i.p as u64 - 2);
        }
        let order = i.q - 1;
        i.exp[((order - i.log[a as usize]) % order) as usize]
    }

    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b))
    }

    /// True for 0 and for nonzero squares.
    pub fn is_square(&self, a: Elem) -> bool {
        if a == 0 || self.0.p == 2 {
            return true;
        }
        let i = &*self.0;
        if i.k == 1 {
            return self.pow(a, (i.p as u64 - 1) / 2) == 1;
        }
        i.log[a as usize].is_multiple_of(2)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.0.q
    }

    /// Enumeration cap from the environment (`FQT_CAP`) or the default.
    pub fn default_cap() -> u64 {
        std::env::var("FQT_CAP").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_CAP)
    }
}
