//! Finite fields `F_q`, `q = p^k`, backed by full lookup tables.
//!
//! An element is stored as its canonical index: the coefficient vector of its
//! polynomial-basis representation read as a base-`p` number, constant term
//! in the least significant digit. With the modulus `x^2 + x + 1` over `F_2`,
//! the element `x` has index 2 and `x + 1` has index 3.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order supported by the table representation.
pub const MAX_ORDER: usize = 256;

/// Built-in irreducible moduli (Conway polynomials), coefficients from the
/// constant term upwards, including the leading 1.
const BUILTIN_MODULI: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),       // x^2 + x + 1
    (2, 3, &[1, 1, 0, 1]),    // x^3 + x + 1
    (3, 2, &[2, 2, 1]),       // x^2 + 2x + 2
    (2, 4, &[1, 1, 0, 0, 1]), // x^4 + x + 1
    (5, 2, &[2, 4, 1]),       // x^2 + 4x + 2
    (3, 3, &[1, 2, 0, 1]),    // x^3 + 2x + 1
];

/// An element of a finite field, as its canonical index in `[0, q)`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Felt(u8);

impl Felt {
    pub const ZERO: Felt = Felt(0);
    pub const ONE: Felt = Felt(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Caller guarantees `i < q` for the field the element is used with.
    #[inline]
    pub(crate) fn from_index_unchecked(i: usize) -> Felt {
        debug_assert!(i < MAX_ORDER);
        Felt(i as u8)
    }
}

impl fmt::Display for Felt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    p: u32,
    k: u32,
    q: usize,
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    // frob[j][a] = a^(p^j)
    frob: Vec<Vec<u8>>,
}

/// A finite field. Cheap to clone; all clones share the same tables.
#[derive(Clone)]
pub struct Field(Arc<Tables>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.0.p)
            .field("k", &self.0.k)
            .field("modulus", &self.0.modulus)
            .finish()
    }
}

pub fn is_prime(n: u32) -> bool {
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

/// Splits `q` into `(p, k)` with `q = p^k`, if `q` is a prime power.
pub fn prime_power(q: usize) -> Option<(u32, u32)> {
    if q < 2 || q > u32::MAX as usize {
        return None;
    }
    let q = q as u32;
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut k) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

pub fn builtin_modulus(p: u32, k: u32) -> Option<&'static [u32]> {
    BUILTIN_MODULI
        .iter()
        .find(|(bp, bk, _)| *bp == p && *bk == k)
        .map(|(_, _, m)| *m)
}

// Polynomials over F_p as coefficient vectors, constant term first.

fn poly_trim(a: &mut Vec<u32>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    // b is monic
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let shift = r.len() - 1 - db;
        let c = *r.last().unwrap();
        for (i, &bi) in b.iter().enumerate() {
            let idx = shift + i;
            r[idx] = (r[idx] + p - (c * bi) % p) % p;
        }
        r.pop();
        poly_trim(&mut r);
    }
    r
}

fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let k = modulus.len() - 1;
    if k == 1 {
        return true;
    }
    // try every monic divisor of degree 1..=k/2
    for d in 1..=k / 2 {
        let count = (p as usize).pow(d as u32);
        for code in 0..count {
            let mut f = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                f.push((c % p as usize) as u32);
                c /= p as usize;
            }
            f.push(1);
            let r = poly_rem(modulus, &f, p);
            if r.iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// Builds `F_{p^k}`. For `k > 1` the modulus defaults to the built-in
    /// table when omitted.
    pub fn new(p: u32, k: u32, modulus: Option<&[u32]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = (p as u64).checked_pow(k).filter(|&q| q <= MAX_ORDER as u64);
        let q = q.ok_or(Error::FieldTooLarge { p, k })? as usize;

        let modulus: Vec<u32> = match (k, modulus) {
            (_, Some(m)) => m.to_vec(),
            (1, None) => vec![0, 1],
            (_, None) => builtin_modulus(p, k).ok_or(Error::NoModulus(q))?.to_vec(),
        };
        if modulus.len() != k as usize + 1
            || *modulus.last().unwrap() != 1
            || modulus.iter().any(|&c| c >= p)
        {
            return Err(Error::BadModulus { p, expected: k });
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::ReducibleModulus(p));
        }
        Ok(Field(Arc::new(Tables::build(p, k, q, modulus))))
    }

    /// The field of order `q`, using the built-in modulus when `q` is not prime.
    pub fn of_order(q: usize) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or(Error::UnsupportedOrder(q))?;
        Field::new(p, k, None)
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn k(&self) -> u32 {
        self.0.k
    }

    pub fn q(&self) -> usize {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Felt> + Clone {
        (0..self.0.q).map(|i| Felt(i as u8))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Felt> + Clone {
        (1..self.0.q).map(|i| Felt(i as u8))
    }

    pub fn elem(&self, index: usize) -> Result<Felt> {
        if index < self.0.q {
            Ok(Felt(index as u8))
        } else {
            Err(Error::Invalid(format!(
                "element index {index} >= q = {}",
                self.0.q
            )))
        }
    }

    /// The element with the given polynomial-basis coefficients (constant first).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Felt> {
        if coeffs.len() > self.0.k as usize || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(Error::Invalid(format!("bad coefficient vector {coeffs:?}")));
        }
        let v = coeffs
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * self.0.p as usize + c as usize);
        Ok(Felt(v as u8))
    }

    pub fn coeffs(&self, a: Felt) -> Vec<u32> {
        digits(a.index(), self.0.p, self.0.k)
    }

    #[inline]
    pub fn add(&self, a: Felt, b: Felt) -> Felt {
        Felt(self.0.add[a.index() * self.0.q + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: Felt) -> Felt {
        Felt(self.0.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Felt, b: Felt) -> Felt {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Felt, b: Felt) -> Felt {
        Felt(self.0.mul[a.index() * self.0.q + b.index()])
    }

    pub fn inv(&self, a: Felt) -> Result<Felt> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Felt(self.0.inv[a.index()]))
        }
    }

    pub fn div(&self, a: Felt, b: Felt) -> Result<Felt> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Felt, mut e: u64) -> Felt {
        let (mut base, mut acc) = (a, Felt::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^(p^j)`.
    pub fn frobenius(&self, a: Felt, j: u32) -> Result<Felt> {
        if j >= self.0.k {
            return Err(Error::FrobeniusRange { j, k: self.0.k });
        }
        Ok(Felt(self.0.frob[j as usize][a.index()]))
    }

    /// Exponents `j` of the automorphisms `a -> a^(p^j)`; this is the whole
    /// Galois group of `F_q` over its prime field.
    pub fn field_automorphisms(&self) -> Vec<u32> {
        (0..self.0.k).collect()
    }
}

fn digits(mut v: usize, p: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = (v % p as usize) as u32;
            v /= p as usize;
            d
        })
        .collect()
}

fn pack(d: &[u32], p: u32) -> usize {
    d.iter()
        .rev()
        .fold(0, |acc, &c| acc * p as usize + c as usize)
}

impl Tables {
    fn build(p: u32, k: u32, q: usize, modulus: Vec<u32>) -> Tables {
        let digits_of: Vec<Vec<u32>> = (0..q).map(|v| digits(v, p, k)).collect();
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                let s: Vec<u32> = digits_of[a]
                    .iter()
                    .zip(&digits_of[b])
                    .map(|(x, y)| (x + y) % p)
                    .collect();
                add[a * q + b] = pack(&s, p) as u8;

                let (da, db) = (&digits_of[a], &digits_of[b]);
                let mut prod = vec![0u32; 2 * k as usize - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = poly_rem(&prod, &modulus, p);
                r.resize(k as usize, 0);
                mul[a * q + b] = pack(&r, p) as u8;
            }
        }
        let neg: Vec<u8> = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8)
            .collect();
        let inv: Vec<u8> = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u8
                }
            })
            .collect();
        let mut frob = Vec::with_capacity(k as usize);
        let mut cur: Vec<u8> = (0..q).map(|v| v as u8).collect();
        for _ in 0..k {
            frob.push(cur.clone());
            // raise every entry to the p-th power
            cur = cur
                .iter()
                .map(|&a| {
                    let mut acc = 1usize;
                    for _ in 0..p {
                        acc = mul[acc * q + a as usize] as usize;
                    }
                    acc as u8
                })
                .collect();
        }
        Tables {
            p,
            k,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
            frob,
        }
    }
}
