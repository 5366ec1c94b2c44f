//! Exact arithmetic in GF(p^m).
//!
//! Elements are residues of polynomials modulo a monic irreducible of degree
//! `m`. A [`FieldElement`] stores the little-endian coefficient vector packed
//! as the integer `c0 + c1 p + ... + c_{m-1} p^{m-1}`, so `0` is zero and `1`
//! is one in every field. Fields with at most [`TABLE_LIMIT`] elements carry
//! precomputed addition and multiplication tables; the enumeration code in
//! [`crate::unitary`] depends on those for speed.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest field order for which operation tables are built.
pub const TABLE_LIMIT: u32 = 256;

const MAX_DEGREE: u32 = 16;

/// Moduli for the small fields, low coefficient first (monic leading 1 included).
///
/// Each entry is the lexicographically least monic irreducible, so the table
/// agrees with [`least_irreducible`]; a unit test pins that.
const BUILTIN_MODULI: &[(u32, u32, &[u32])] = &[
    (2, 1, &[0, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (3, 1, &[0, 1]),
    (3, 2, &[1, 0, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 1, 0, 0, 1]),
    (5, 1, &[0, 1]),
    (5, 2, &[2, 0, 1]),
    (5, 3, &[1, 1, 0, 1]),
    (5, 4, &[2, 0, 0, 0, 1]),
];

/// A field element in packed coefficient form. Only meaningful together with
/// the [`FieldSpec`] that produced it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Packed encoding. Not range-checked; use [`FieldSpec::element_from_index`]
    /// for untrusted input.
    #[inline]
    pub const fn from_raw(value: u32) -> Self {
        FieldElement(value)
    }

    #[inline]
    pub const fn raw(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone)]
struct Tables {
    add: Vec<FieldElement>,
    mul: Vec<FieldElement>,
    neg: Vec<FieldElement>,
    inv: Vec<FieldElement>,
}

/// GF(p^m) with an explicit modulus.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    m: u32,
    order: u32,
    modulus: Vec<u32>,
    tables: Option<Box<Tables>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.m)
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.literal())
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Builds the field with `p^m` elements and its deterministic modulus.
pub fn make_field(p: u32, m: u32) -> Result<FieldSpec> {
    check_params(p, m)?;
    let modulus = match BUILTIN_MODULI.iter().find(|(bp, bm, _)| *bp == p && *bm == m) {
        Some((_, _, coeffs)) => coeffs.to_vec(),
        None => least_irreducible(p, m).ok_or(Error::NoModulusFound { p, m })?,
    };
    Ok(FieldSpec::assemble(p, m, modulus))
}

fn check_params(p: u32, m: u32) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    if m == 0 || m > MAX_DEGREE {
        return Err(Error::BadDegree(m));
    }
    (p as u64)
        .checked_pow(m)
        .filter(|&q| q <= u32::MAX as u64)
        .map(|q| q as u32)
        .ok_or(Error::FieldTooLarge { p, m })
}

/// Searches monic degree-`m` polynomials in increasing packed order of their
/// lower coefficients and returns the first irreducible one.
pub fn least_irreducible(p: u32, m: u32) -> Option<Vec<u32>> {
    let count = (p as u64).checked_pow(m)?;
    (0..count).find_map(|low| {
        let mut poly = unpack(low, p, m as usize);
        poly.push(1);
        is_irreducible(&poly, p).then_some(poly)
    })
}

/// Irreducibility over Z/p by trial division with every monic polynomial of
/// degree `1..=deg/2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = match poly.iter().rposition(|&c| c % p != 0) {
        Some(d) => d,
        None => return false,
    };
    if deg == 0 || poly[deg] % p != 1 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut divisor = unpack(low, p, d);
            divisor.push(1);
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn unpack(mut value: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len + 1);
    for _ in 0..len {
        out.push((value % p as u64) as u32);
        value /= p as u64;
    }
    out
}

/// Remainder of `num` by a monic `den` over Z/p.
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let mut rem: Vec<u32> = num.iter().map(|c| c % p).collect();
    let dd = den.len() - 1;
    for top in (dd..rem.len()).rev() {
        let lead = rem[top];
        if lead == 0 {
            continue;
        }
        for (k, &dc) in den.iter().enumerate() {
            let idx = top - dd + k;
            let sub = (lead as u64 * dc as u64) % p as u64;
            rem[idx] = ((rem[idx] as u64 + p as u64 - sub) % p as u64) as u32;
        }
    }
    rem.truncate(dd);
    rem
}

impl FieldSpec {
    /// Field with a caller-chosen modulus (low coefficient first, monic).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<FieldSpec> {
        let m = modulus.len().saturating_sub(1) as u32;
        check_params(p, m)?;
        if modulus.iter().any(|&c| c >= p) || !is_irreducible(&modulus, p) {
            return Err(Error::NotIrreducible);
        }
        Ok(FieldSpec::assemble(p, m, modulus))
    }

    fn assemble(p: u32, m: u32, modulus: Vec<u32>) -> FieldSpec {
        let order = p.pow(m);
        let mut spec = FieldSpec { p, m, order, modulus, tables: None };
        if order <= TABLE_LIMIT {
            spec.tables = Some(Box::new(spec.build_tables()));
        }
        spec
    }

    fn build_tables(&self) -> Tables {
        let q = self.order as usize;
        let mut add = Vec::with_capacity(q * q);
        let mut mul = Vec::with_capacity(q * q);
        for a in 0..q as u32 {
            for b in 0..q as u32 {
                add.push(self.slow_add(FieldElement(a), FieldElement(b)));
                mul.push(self.slow_mul(FieldElement(a), FieldElement(b)));
            }
        }
        let neg = (0..q as u32).map(|a| self.slow_neg(FieldElement(a))).collect();
        let mut inv = vec![FieldElement::ZERO; q];
        for a in 1..q {
            for b in 1..q {
                if mul[a * q + b] == FieldElement::ONE {
                    inv[a] = FieldElement(b as u32);
                    break;
                }
            }
        }
        Tables { add, mul, neg, inv }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Number of elements, `p^m`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The `"p^m"` literal accepted by [`parse_field`].
    pub fn literal(&self) -> String {
        format!("{}^{}", self.p, self.m)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// The residue of an integer in the prime subfield.
    pub fn from_int(&self, k: i64) -> FieldElement {
        FieldElement(k.rem_euclid(self.p as i64) as u32)
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.order
    }

    pub fn element_from_index(&self, index: u64) -> Result<FieldElement> {
        if index < self.order as u64 {
            Ok(FieldElement(index as u32))
        } else {
            Err(Error::NotInField(index))
        }
    }

    pub fn element(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.m as usize {
            return Err(Error::LengthMismatch { got: coeffs.len(), expected: self.m as usize });
        }
        let mut value = 0u64;
        for &c in coeffs.iter().rev() {
            if c >= self.p {
                return Err(Error::NotInField(c as u64));
            }
            value = value * self.p as u64 + c as u64;
        }
        Ok(FieldElement(value as u32))
    }

    /// Little-endian coefficient vector of length `m`.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        unpack(a.0 as u64, self.p, self.m as usize)
    }

    /// All elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order).map(FieldElement)
    }

    /// Additive basis `1, x, ..., x^{m-1}` over the prime field.
    pub fn additive_basis(&self) -> Vec<FieldElement> {
        (0..self.m).map(|i| FieldElement(self.p.pow(i))).collect()
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.tables {
            Some(t) => t.add[(a.0 * self.order + b.0) as usize],
            None => self.slow_add(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        match &self.tables {
            Some(t) => t.neg[a.0 as usize],
            None => self.slow_neg(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.tables {
            Some(t) => t.mul[(a.0 * self.order + b.0) as usize],
            None => self.slow_mul(a, b),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.tables {
            Some(t) => t.inv[a.0 as usize],
            // a^(q-2) by Lagrange
            None => self.pow(a, self.order as u64 - 2),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `tau(a) = a + a^2`, additive in characteristic 2.
    pub fn tau(&self, a: FieldElement) -> Result<FieldElement> {
        if self.p != 2 {
            return Err(Error::OddCharacteristic);
        }
        Ok(self.add(a, self.mul(a, a)))
    }

    /// Image of [`tau`](Self::tau), sorted; always has `|F|/2` elements.
    pub fn tau_image(&self) -> Result<Vec<FieldElement>> {
        let mut image = self.elements().map(|a| self.tau(a)).collect::<Result<Vec<_>>>()?;
        image.sort_unstable();
        image.dedup();
        Ok(image)
    }

    /// Parses the colon-free coefficient string `c0c1...` (base-36 digits,
    /// missing high coefficients are zero).
    pub fn parse_element(&self, literal: &str) -> Result<FieldElement> {
        let literal = literal.trim();
        if literal.is_empty() {
            return Err(Error::Parse("empty field element".into()));
        }
        let coeffs = literal
            .chars()
            .map(|ch| {
                ch.to_digit(36)
                    .ok_or_else(|| Error::Parse(format!("bad coefficient digit {ch:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.element(&coeffs)
    }

    /// Inverse of [`parse_element`](Self::parse_element); always `m` digits.
    pub fn format_element(&self, a: FieldElement) -> String {
        self.coeffs(a)
            .into_iter()
            .map(|c| std::char::from_digit(c, 36).unwrap_or('?'))
            .collect()
    }

    fn slow_add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let sum: Vec<u32> = x.iter().zip(&y).map(|(&u, &v)| ((u as u64 + v as u64) % self.p as u64) as u32).collect();
        self.pack(&sum)
    }

    fn slow_neg(&self, a: FieldElement) -> FieldElement {
        let x: Vec<u32> = self.coeffs(a).iter().map(|c| (self.p - c) % self.p).collect();
        self.pack(&x)
    }

    fn slow_mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let p = self.p as u64;
        let mut prod = vec![0u64; x.len() + y.len()];
        for (i, &u) in x.iter().enumerate() {
            if u == 0 {
                continue;
            }
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u as u64 * v as u64) % p;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
        self.pack(&poly_rem(&prod, &self.modulus, self.p))
    }

    fn pack(&self, coeffs: &[u32]) -> FieldElement {
        let value = coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p as u64 + c as u64);
        FieldElement(value as u32)
    }
}

/// Parses a field literal `"p^m"` (or a bare prime `"p"`).
pub fn parse_field(literal: &str) -> Result<FieldSpec> {
    let literal = literal.trim();
    let (p, m) = match literal.split_once('^') {
        Some((p, m)) => (p.trim(), m.trim()),
        None => (literal, "1"),
    };
    let p = p.parse::<u32>().map_err(|_| Error::Parse(format!("bad field literal {literal:?}")))?;
    let m = m.parse::<u32>().map_err(|_| Error::Parse(format!("bad field literal {literal:?}")))?;
    make_field(p, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_fields() -> Vec<FieldSpec> {
        [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (7, 1), (13, 1)]
            .iter()
            .map(|&(p, m)| make_field(p, m).unwrap())
            .collect()
    }

    #[test]
    fn prime_fields() {
        assert_eq!(make_field(2, 1).unwrap().order(), 2);
        assert_eq!(make_field(3, 1).unwrap().order(), 3);
        let f2 = make_field(2, 1).unwrap();
        assert_eq!(f2.add(f2.one(), f2.one()), f2.zero());
    }

    #[test]
    fn gf4_modulus_has_no_root() {
        let f = make_field(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        for x in 0..2u32 {
            let value = (1 + x + x * x) % 2;
            assert_ne!(value, 0);
        }
    }

    #[test]
    fn gf4_hand_products() {
        let f = make_field(2, 2).unwrap();
        let w = f.element(&[0, 1]).unwrap();
        let w1 = f.element(&[1, 1]).unwrap();
        assert_eq!(f.mul(w, w), w1);
        assert_eq!(f.inv(w).unwrap(), w1);
        assert_eq!(f.mul(w, w1), f.one());
    }

    #[test]
    fn builtin_table_matches_search() {
        for &(p, m, coeffs) in BUILTIN_MODULI {
            assert_eq!(least_irreducible(p, m).unwrap(), coeffs.to_vec(), "{p}^{m}");
            assert!(is_irreducible(coeffs, p));
        }
    }

    #[test]
    fn searched_moduli_are_irreducible() {
        for (p, m) in [(2, 5), (2, 8), (3, 5), (7, 2), (2, 16)] {
            let f = make_field(p, m).unwrap();
            assert!(is_irreducible(f.modulus(), p));
            assert_eq!(f.modulus().len(), m as usize + 1);
        }
    }

    #[test]
    fn bad_parameters() {
        assert_eq!(make_field(4, 1).unwrap_err(), Error::NonPrime(4));
        assert_eq!(make_field(1, 1).unwrap_err(), Error::NonPrime(1));
        assert_eq!(make_field(2, 0).unwrap_err(), Error::BadDegree(0));
        assert_eq!(make_field(2, 17).unwrap_err(), Error::BadDegree(17));
        assert!(matches!(make_field(7, 16), Err(Error::FieldTooLarge { .. })));
        assert_eq!(FieldSpec::with_modulus(2, vec![1, 0, 1]).unwrap_err(), Error::NotIrreducible);
    }

    #[test]
    fn axioms_exhaustive() {
        for f in small_fields() {
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), f.zero());
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one(), "{f} inverse of {a:?}");
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn tables_agree_with_polynomial_arithmetic() {
        let f = make_field(3, 2).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.mul(a, b), f.slow_mul(a, b));
                assert_eq!(f.add(a, b), f.slow_add(a, b));
            }
        }
        // untabled field still satisfies inverses
        let big = make_field(2, 10).unwrap();
        for v in [1u32, 2, 3, 500, 1023] {
            let a = FieldElement::from_raw(v);
            assert_eq!(big.mul(a, big.inv(a).unwrap()), big.one());
        }
    }

    #[test]
    fn division_by_zero() {
        let f = make_field(5, 1).unwrap();
        assert_eq!(f.inv(f.zero()).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn tau_small() {
        let f2 = make_field(2, 1).unwrap();
        assert_eq!(f2.tau(f2.one()).unwrap(), f2.zero());
        assert_eq!(f2.tau_image().unwrap(), vec![f2.zero()]);

        let f4 = make_field(2, 2).unwrap();
        let w = f4.element(&[0, 1]).unwrap();
        assert_eq!(f4.tau(w).unwrap(), f4.one());
        assert_eq!(f4.tau_image().unwrap(), vec![f4.zero(), f4.one()]);
        assert_eq!(f4.tau(f4.zero()).unwrap(), f4.zero());

        let f3 = make_field(3, 1).unwrap();
        assert_eq!(f3.tau(f3.one()).unwrap_err(), Error::OddCharacteristic);
    }

    #[test]
    fn tau_additive_with_two_element_kernel() {
        for m in 1..=4 {
            let f = make_field(2, m).unwrap();
            let kernel = f.elements().filter(|&a| f.tau(a).unwrap().is_zero()).count();
            assert_eq!(kernel, 2);
            assert_eq!(f.tau_image().unwrap().len() as u32, f.order() / 2);
            for a in f.elements() {
                for b in f.elements() {
                    let lhs = f.tau(f.add(a, b)).unwrap();
                    let rhs = f.add(f.tau(a).unwrap(), f.tau(b).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
            let image = f.tau_image().unwrap();
            for &a in &image {
                for &b in &image {
                    assert!(image.binary_search(&f.add(a, b)).is_ok());
                }
            }
        }
    }

    #[test]
    fn literals() {
        let f = parse_field("2^2").unwrap();
        assert_eq!(f.order(), 4);
        assert_eq!(f.literal(), "2^2");
        assert_eq!(parse_field("3").unwrap().order(), 3);
        assert!(parse_field("2^x").is_err());
        let w = f.parse_element("01").unwrap();
        assert_eq!(f.coeffs(w), vec![0, 1]);
        assert_eq!(f.format_element(w), "01");
        assert_eq!(f.parse_element("1").unwrap(), f.one());
        assert!(f.parse_element("2").is_err());
        assert!(f.parse_element("011").is_err());
    }
}
