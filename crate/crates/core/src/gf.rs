//! Arithmetic in GF(p^k) in the polynomial basis.
//!
//! An element is stored as its coefficient vector `(c_0, …, c_{k-1})` packed
//! into a single integer `c_0 + c_1 p + … + c_{k-1} p^{k-1}`. The packed value
//! is also the element's index, so iterating `0..q` walks the field and the
//! derived ordering on [`FieldElement`] is a fixed lexicographic order.
//!
//! Small fields (q ≤ 256) memoise the polynomial arithmetic in full operation
//! tables; larger fields fall back to multiplying and reducing coefficient
//! vectors directly.

use std::fmt;

use thiserror::Error;

/// Largest field order accepted by [`Field::new`].
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

const TABLE_LIMIT: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {0} exceeds the supported maximum of 2^20")]
    TooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("conjugation needs a field of square order, got {0}")]
    NotSquareOrder(u32),
    #[error("invalid field element: {0}")]
    InvalidElement(String),
}

/// An element of some [`Field`]; meaningless without the field it came from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    /// Packed coefficient index in `0..q`.
    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

/// A finite field GF(p^k) with a fixed, deterministically chosen modulus.
#[derive(Clone)]
pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, `k + 1` coefficients, lowest degree first.
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, k)` with `q = p^k`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1 && p <= u32::MAX as u64).then_some((p as u32, k))
}

impl Field {
    /// GF(p^k) with the lexicographically smallest monic irreducible modulus
    /// of degree `k` (coefficients compared lowest degree first).
    pub fn new(p: u32, k: u32) -> Result<Self, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NonPrime(p as u64));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
        if q > MAX_FIELD_ORDER {
            return Err(FieldError::TooLarge(q));
        }
        let modulus = smallest_irreducible(p, k);
        let mut field = Field {
            p,
            k,
            q: q as u32,
            modulus,
            tables: None,
        };
        if field.q <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }

    /// The field of order `q`, which must be a prime power.
    pub fn with_order(q: u64) -> Result<Self, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Field::new(p, k)
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn is_square_order(&self) -> bool {
        self.k.is_multiple_of(2)
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    pub fn from_index(&self, index: u32) -> Result<FieldElement, FieldError> {
        if index < self.q {
            Ok(FieldElement(index))
        } else {
            Err(FieldError::InvalidElement(format!(
                "index {index} out of range for GF({})",
                self.q
            )))
        }
    }

    /// Element with the given coefficient vector (lowest degree first).
    pub fn element(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::InvalidElement(format!("{coeffs:?}")));
        }
        Ok(FieldElement(self.pack(coeffs)))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        self.unpack(a.0)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.tables {
            Some(t) => FieldElement(t.add[(a.0 * self.q + b.0) as usize]),
            None => FieldElement(self.poly_add(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        match &self.tables {
            Some(t) => FieldElement(t.neg[a.0 as usize]),
            None => FieldElement(self.poly_neg(a.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.tables {
            Some(t) => FieldElement(t.mul[(a.0 * self.q + b.0) as usize]),
            None => FieldElement(self.poly_mul(a.0, b.0)),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match &self.tables {
            Some(t) => FieldElement(t.inv[a.0 as usize]),
            None => self.pow(a, self.q as u64 - 2),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// The involution `a ↦ a^√q`; defined only for square order.
    pub fn conjugate(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if !self.is_square_order() {
            return Err(FieldError::NotSquareOrder(self.q));
        }
        Ok(self.pow(a, (self.p as u64).pow(self.k / 2)))
    }

    fn pack(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn unpack(&self, mut v: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k as usize);
        for _ in 0..self.k {
            out.push(v % self.p);
            v /= self.p;
        }
        out
    }

    fn poly_add(&self, a: u32, b: u32) -> u32 {
        let (a, b) = (self.unpack(a), self.unpack(b));
        let sum: Vec<u32> = a.iter().zip(&b).map(|(x, y)| (x + y) % self.p).collect();
        self.pack(&sum)
    }

    fn poly_neg(&self, a: u32) -> u32 {
        let neg: Vec<u32> = self
            .unpack(a)
            .iter()
            .map(|&x| (self.p - x) % self.p)
            .collect();
        self.pack(&neg)
    }

    fn poly_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let k = self.k as usize;
        let (a, b) = (self.unpack(a), self.unpack(b));
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // reduce from the top using the monic modulus
        for deg in (k..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (j, &m) in self.modulus[..k].iter().enumerate() {
                let idx = deg - k + j;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        let reduced: Vec<u32> = prod[..k].iter().map(|&c| c as u32).collect();
        self.pack(&reduced)
    }

    fn build_tables(&self) -> Tables {
        let q = self.q;
        let mut add = vec![0; (q * q) as usize];
        let mut mul = vec![0; (q * q) as usize];
        for a in 0..q {
            for b in 0..q {
                add[(a * q + b) as usize] = self.poly_add(a, b);
                mul[(a * q + b) as usize] = self.poly_mul(a, b);
            }
        }
        let neg = (0..q).map(|a| self.poly_neg(a)).collect();
        let mut inv = vec![0; q as usize];
        for a in 1..q {
            for b in 1..q {
                if mul[(a * q + b) as usize] == 1 {
                    inv[a as usize] = b;
                    break;
                }
            }
        }
        Tables { add, mul, neg, inv }
    }
}

/// Remainder of `f` modulo the monic `g` over GF(p); both lowest degree first.
fn poly_rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let p = p as u64;
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = r.pop().unwrap_or(0);
        if lead != 0 {
            let base = r.len() - dg;
            for (j, &m) in g[..dg].iter().enumerate() {
                r[base + j] = (r[base + j] + (p - lead) * m as u64) % p;
            }
        }
    }
    r.into_iter().map(|c| c as u32).collect()
}

/// Monic polynomials of degree `deg`, lower coefficients enumerated in
/// lexicographic order with the constant term most significant.
fn monic_polys(p: u32, deg: u32) -> impl Iterator<Item = Vec<u32>> {
    let count = (p as u64).pow(deg);
    (0..count).map(move |mut idx| {
        let mut coeffs = vec![0u32; deg as usize + 1];
        for j in (0..deg as usize).rev() {
            coeffs[j] = (idx % p as u64) as u32;
            idx /= p as u64;
        }
        coeffs[deg as usize] = 1;
        coeffs
    })
}

pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() as u32 - 1;
    (1..=deg / 2).all(|dg| monic_polys(p, dg).all(|g| poly_rem(f, &g, p).iter().any(|&c| c != 0)))
}

fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    monic_polys(p, k)
        .find(|f| is_irreducible(f, p))
        .expect("an irreducible polynomial exists in every degree")
}
