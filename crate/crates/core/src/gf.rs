//! Finite fields F_q with q = p^e.
//!
//! An element is an integer code in `[0, q)`. Its base-p digits, least
//! significant first, are the coefficients `c_0, c_1, ..., c_{e-1}` of the
//! polynomial representative modulo the field's irreducible modulus. Code 0 is
//! the additive identity and code 1 the multiplicative identity.
//!
//! Fields of order at most 256 carry full addition, subtraction, product and
//! inverse tables; larger fields fall back to polynomial arithmetic.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Largest field order accepted by [`Field::new`].
pub const DEFAULT_MAX_ORDER: u64 = 1 << 16;

const TABLE_MAX_ORDER: u64 = 1 << 8;

/// Serializable description of a field: characteristic, degree and modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    /// Coefficients `c_0 ..= c_e` of the monic irreducible modulus over F_p.
    pub modulus: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn code(self) -> u32 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

/// Scalar arithmetic needed by the polynomial helpers.
pub(crate) trait Coefficients {
    fn order(&self) -> u64;
    fn c_add(&self, a: u32, b: u32) -> u32;
    fn c_sub(&self, a: u32, b: u32) -> u32;
    fn c_mul(&self, a: u32, b: u32) -> u32;
}

struct PrimeModulus(u32);

impl Coefficients for PrimeModulus {
    fn order(&self) -> u64 {
        self.0 as u64
    }
    fn c_add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.0 as u64) as u32
    }
    fn c_sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.0 as u64 - b as u64) % self.0 as u64) as u32
    }
    fn c_mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }
}

/// Dense polynomials, coefficients low degree first.
mod poly {
    use super::Coefficients;

    pub fn mul<R: Coefficients>(r: &R, a: &[u32], b: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = r.c_add(out[i + j], r.c_mul(x, y));
            }
        }
        out
    }

    /// Reduces `a` modulo the monic polynomial `m` in place. On return
    /// `a.len() <= deg(m)`.
    pub fn rem<R: Coefficients>(r: &R, a: &mut Vec<u32>, m: &[u32]) {
        let deg = m.len() - 1;
        while a.len() > deg {
            let lead = a.pop().expect("nonempty");
            if lead == 0 {
                continue;
            }
            let shift = a.len() - deg;
            for i in 0..deg {
                a[shift + i] = r.c_sub(a[shift + i], r.c_mul(lead, m[i]));
            }
        }
    }

    /// Base-`q` digits of `code`, least significant first, padded to `len`.
    pub fn digits(mut code: u64, q: u64, len: usize) -> Vec<u32> {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push((code % q) as u32);
            code /= q;
        }
        out
    }

    pub fn from_digits(c: &[u32], q: u64) -> u64 {
        c.iter().rev().fold(0u64, |acc, &x| acc * q + x as u64)
    }

    /// Trial division by every monic polynomial of degree `1 ..= deg/2`.
    pub fn is_irreducible<R: Coefficients>(r: &R, f: &[u32]) -> bool {
        let deg = f.len() - 1;
        if deg <= 1 {
            return deg == 1;
        }
        let q = r.order();
        for k in 1..=deg / 2 {
            for lower in 0..q.pow(k as u32) {
                let mut g = digits(lower, q, k);
                g.push(1);
                let mut rest = f.to_vec();
                rem(r, &mut rest, &g);
                if rest.iter().all(|&c| c == 0) {
                    return false;
                }
            }
        }
        true
    }

    /// The lexicographically smallest monic irreducible of degree `deg`,
    /// comparing `c_0` first, then `c_1`, and so on.
    pub fn smallest_irreducible<R: Coefficients>(r: &R, deg: usize) -> Vec<u32> {
        let q = r.order();
        for k in 0..q.pow(deg as u32) {
            // c_0 is the most significant digit of k.
            let mut f = digits(k, q, deg);
            f.reverse();
            f.push(1);
            if is_irreducible(r, &f) {
                return f;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

struct Tables {
    add: Vec<u8>,
    sub: Vec<u8>,
    mul: Vec<u8>,
    inv: Vec<u8>,
}

struct Inner {
    spec: FieldSpec,
    q: u32,
    tables: Option<Tables>,
}

/// A finite field. Cheap to clone; all clones share the same tables.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.spec == other.inner.spec
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}; modulus {:?})", self.q(), self.inner.spec.modulus)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q())
    }
}

impl Field {
    /// F_{p^e} with the smallest monic irreducible modulus of degree `e`.
    pub fn new(p: u32, e: u32) -> Result<Self> {
        Self::with_max_order(p, e, DEFAULT_MAX_ORDER)
    }

    pub fn with_max_order(p: u32, e: u32, max_order: u64) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if e == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= max_order && q <= u32::MAX as u64)
            .ok_or_else(|| {
                let size = (p as u128).saturating_pow(e);
                Error::cap("field order", size, max_order as u128)
            })?;
        let modulus = poly::smallest_irreducible(&PrimeModulus(p), e as usize);
        Ok(Self::build(FieldSpec { p, e, modulus }, q as u32))
    }

    /// The field of order `q`, which must be a prime power.
    pub fn from_order(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::NotPrimePower(q));
        }
        if q > DEFAULT_MAX_ORDER {
            return Err(Error::cap(
                "field order",
                q as u128,
                DEFAULT_MAX_ORDER as u128,
            ));
        }
        let p = (2..=q)
            .find(|k| q.is_multiple_of(*k))
            .expect("q >= 2 has a prime factor");
        let mut e = 0u32;
        let mut rest = q;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        if rest != 1 {
            return Err(Error::NotPrimePower(q));
        }
        Self::new(p as u32, e)
    }

    /// Rebuilds a field from its serialized description, checking that the
    /// modulus is monic, of the right degree and irreducible.
    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        let FieldSpec { p, e, modulus } = spec;
        if !is_prime(*p as u64) {
            return Err(Error::NotPrime(*p as u64));
        }
        if *e == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = (*p as u64)
            .checked_pow(*e)
            .filter(|&q| q <= DEFAULT_MAX_ORDER)
            .ok_or_else(|| {
                Error::cap(
                    "field order",
                    (*p as u128).saturating_pow(*e),
                    DEFAULT_MAX_ORDER as u128,
                )
            })?;
        if modulus.len() != *e as usize + 1 {
            return Err(Error::InvalidModulus(format!(
                "expected {} coefficients, got {}",
                e + 1,
                modulus.len()
            )));
        }
        if modulus.last() != Some(&1) {
            return Err(Error::InvalidModulus("modulus is not monic".into()));
        }
        if modulus.iter().any(|&c| c >= *p) {
            return Err(Error::InvalidModulus("coefficient out of range".into()));
        }
        if !poly::is_irreducible(&PrimeModulus(*p), modulus) {
            return Err(Error::InvalidModulus("modulus is reducible".into()));
        }
        Ok(Self::build(spec.clone(), q as u32))
    }

    fn build(spec: FieldSpec, q: u32) -> Self {
        let mut field = Field {
            inner: Arc::new(Inner {
                spec,
                q,
                tables: None,
            }),
        };
        if (q as u64) <= TABLE_MAX_ORDER {
            let qs = q as usize;
            let mut add = vec![0u8; qs * qs];
            let mut sub = vec![0u8; qs * qs];
            let mut mul = vec![0u8; qs * qs];
            let mut inv = vec![0u8; qs];
            for a in 0..q {
                for b in 0..q {
                    let i = a as usize * qs + b as usize;
                    add[i] = field.slow_add(a, b) as u8;
                    sub[i] = field.slow_sub(a, b) as u8;
                    let m = field.slow_mul(a, b);
                    mul[i] = m as u8;
                    if m == 1 {
                        inv[a as usize] = b as u8;
                    }
                }
            }
            let inner = Arc::get_mut(&mut field.inner).expect("unshared during construction");
            inner.tables = Some(Tables { add, sub, mul, inv });
        }
        field
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.inner.spec
    }

    pub fn p(&self) -> u32 {
        self.inner.spec.p
    }

    pub fn e(&self) -> u32 {
        self.inner.spec.e
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.inner.spec.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q()
    }

    pub fn element(&self, code: u32) -> Result<FieldElement> {
        if code >= self.q() {
            return Err(Error::ElementOutOfRange {
                code: code as u64,
                q: self.q() as u64,
            });
        }
        Ok(FieldElement(code))
    }

    /// Checked arithmetic on two elements of this field.
    pub fn arith(&self, a: FieldElement, b: FieldElement, op: Op) -> Result<FieldElement> {
        let (a, b) = (self.element(a.0)?.0, self.element(b.0)?.0);
        let out = match op {
            Op::Add => self.add(a, b),
            Op::Sub => self.sub(a, b),
            Op::Mul => self.mul(a, b),
            Op::Div => {
                if b == 0 {
                    return Err(Error::DivisionByZero);
                }
                self.mul(a, self.inv(b))
            }
        };
        Ok(FieldElement(out))
    }

    pub fn checked_inv(&self, a: FieldElement) -> Result<FieldElement> {
        let a = self.element(a.0)?.0;
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElement(self.inv(a)))
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match &self.inner.tables {
            Some(t) => t.add[a as usize * self.q() as usize + b as usize] as u32,
            None => self.slow_add(a, b),
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        match &self.inner.tables {
            Some(t) => t.sub[a as usize * self.q() as usize + b as usize] as u32,
            None => self.slow_sub(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.inner.tables {
            Some(t) => t.mul[a as usize * self.q() as usize + b as usize] as u32,
            None => self.slow_mul(a, b),
        }
    }

    /// Multiplicative inverse of a nonzero element. Use
    /// [`Field::checked_inv`] when `a` may be zero.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0, "inverse of zero");
        match &self.inner.tables {
            Some(t) => t.inv[a as usize] as u32,
            None => self.pow(a, self.q() as u64 - 2),
        }
    }

    pub fn pow(&self, a: u32, mut exp: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `y += a * x`, coordinatewise.
    #[inline]
    pub fn axpy(&self, y: &mut [u32], a: u32, x: &[u32]) {
        debug_assert_eq!(y.len(), x.len());
        if a == 0 {
            return;
        }
        if self.p() == 2 && a == 1 {
            y.iter_mut().zip(x).for_each(|(u, &v)| *u ^= v);
            return;
        }
        for (u, &v) in y.iter_mut().zip(x) {
            *u = self.add(*u, self.mul(a, v));
        }
    }

    pub fn scale(&self, x: &mut [u32], a: u32) {
        for u in x.iter_mut() {
            *u = self.mul(*u, a);
        }
    }

    fn slow_add(&self, a: u32, b: u32) -> u32 {
        let p = self.p();
        if p == 2 {
            return a ^ b;
        }
        if self.e() == 1 {
            return PrimeModulus(p).c_add(a, b);
        }
        let (da, db) = self.digit_pair(a, b);
        let r = PrimeModulus(p);
        let sum: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| r.c_add(x, y)).collect();
        poly::from_digits(&sum, p as u64) as u32
    }

    fn slow_sub(&self, a: u32, b: u32) -> u32 {
        let p = self.p();
        if p == 2 {
            return a ^ b;
        }
        if self.e() == 1 {
            return PrimeModulus(p).c_sub(a, b);
        }
        let (da, db) = self.digit_pair(a, b);
        let r = PrimeModulus(p);
        let diff: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| r.c_sub(x, y)).collect();
        poly::from_digits(&diff, p as u64) as u32
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p();
        let r = PrimeModulus(p);
        if self.e() == 1 {
            return r.c_mul(a, b);
        }
        let (da, db) = self.digit_pair(a, b);
        let mut prod = poly::mul(&r, &da, &db);
        poly::rem(&r, &mut prod, self.modulus());
        poly::from_digits(&prod, p as u64) as u32
    }

    fn digit_pair(&self, a: u32, b: u32) -> (Vec<u32>, Vec<u32>) {
        let (p, e) = (self.p() as u64, self.e() as usize);
        (poly::digits(a as u64, p, e), poly::digits(b as u64, p, e))
    }
}

impl Coefficients for Field {
    fn order(&self) -> u64 {
        self.q() as u64
    }
    fn c_add(&self, a: u32, b: u32) -> u32 {
        self.add(a, b)
    }
    fn c_sub(&self, a: u32, b: u32) -> u32 {
        self.sub(a, b)
    }
    fn c_mul(&self, a: u32, b: u32) -> u32 {
        self.mul(a, b)
    }
}

/// F_{q^t} presented as F_q[x] / (m) for the smallest monic irreducible `m`
/// of degree `t` over the base field. Elements are codes whose base-q digits,
/// least significant first, are the coordinates in the basis
/// `1, x, ..., x^{t-1}`.
#[derive(Clone, Debug)]
pub struct Extension {
    base: Field,
    degree: usize,
    modulus: Vec<u32>,
    order: u64,
}

impl Extension {
    pub fn new(base: &Field, degree: usize, max_order: u64) -> Result<Self> {
        if degree == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = base.q() as u64;
        let order = q
            .checked_pow(degree as u32)
            .filter(|&o| o <= max_order)
            .ok_or_else(|| {
                Error::cap(
                    "extension field order",
                    (q as u128).saturating_pow(degree as u32),
                    max_order as u128,
                )
            })?;
        let modulus = poly::smallest_irreducible(base, degree);
        Ok(Extension {
            base: base.clone(),
            degree,
            modulus,
            order,
        })
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.order
    }

    pub fn coeffs(&self, a: u64) -> Vec<u32> {
        poly::digits(a, self.base.q() as u64, self.degree)
    }

    pub fn from_coeffs(&self, c: &[u32]) -> u64 {
        poly::from_digits(c, self.base.q() as u64)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (ca, cb) = (self.coeffs(a), self.coeffs(b));
        let sum: Vec<u32> = ca
            .iter()
            .zip(&cb)
            .map(|(&x, &y)| self.base.add(x, y))
            .collect();
        self.from_coeffs(&sum)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let mut prod = poly::mul(&self.base, &self.coeffs(a), &self.coeffs(b));
        poly::rem(&self.base, &mut prod, &self.modulus);
        self.from_coeffs(&prod)
    }

    /// The `t x t` matrix over the base field of `y -> alpha * y`: column `j`
    /// holds the coordinates of `alpha * x^j`.
    pub fn mul_matrix(&self, alpha: u64) -> Result<Mat> {
        if alpha >= self.order {
            return Err(Error::ElementOutOfRange {
                code: alpha,
                q: self.order,
            });
        }
        let t = self.degree;
        let q = self.base.q() as u64;
        let mut m = Mat::zeros(&self.base, t, t);
        for j in 0..t {
            let image = self.coeffs(self.mul(alpha, q.pow(j as u32)));
            for (i, &c) in image.iter().enumerate() {
                m.set(i, j, c);
            }
        }
        Ok(m)
    }
}
