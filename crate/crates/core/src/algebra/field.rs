use std::fmt;

use serde::{Deserialize, Serialize};

use super::AlgebraError;
use crate::numtheory::is_prime;

/// Largest extension degree accepted by [`FiniteField::new`].
pub const MAX_EXTENSION_DEGREE: u32 = 8;

const MAX_FIELD_ORDER: u64 = 1 << 24;
const TABLE_LIMIT: u32 = 1024;

/// An element of `F_{p^e}`, encoded as `Σ c_i p^i` over its residue
/// coefficients `c_0, ..., c_{e-1}` (constant term first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// `F_p[x]/(modulus)` with a deterministic choice of modulus.
#[derive(Clone)]
pub struct FiniteField {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    mul_table: Option<Vec<u32>>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

impl FiniteField {
    /// `F_{p^e}` modulo the lexicographically smallest monic irreducible of
    /// degree `e`, coefficients compared constant term first.
    pub fn new(p: u64, e: u32) -> Result<Self, AlgebraError> {
        check_params(p, e)?;
        let p32 = p as u32;
        let modulus = smallest_irreducible(p32, e).ok_or(AlgebraError::NoIrreducible { p, e })?;
        Ok(Self::build(p32, e, modulus))
    }

    /// A field with an explicit modulus (monic, constant term first, degree `e`).
    pub fn with_modulus(p: u64, modulus: Vec<u32>) -> Result<Self, AlgebraError> {
        if modulus.len() < 2 {
            return Err(AlgebraError::BadModulus);
        }
        let e = (modulus.len() - 1) as u32;
        check_params(p, e)?;
        let p32 = p as u32;
        if let Some(&c) = modulus.iter().find(|&&c| c >= p32) {
            return Err(AlgebraError::BadCoefficient(c as u64));
        }
        if modulus[e as usize] != 1 || !is_irreducible(&modulus, p32) {
            return Err(AlgebraError::BadModulus);
        }
        Ok(Self::build(p32, e, modulus))
    }

    fn build(p: u32, e: u32, modulus: Vec<u32>) -> Self {
        let q = p.pow(e);
        let mut field = FiniteField { p, e, q, modulus, mul_table: None };
        if q <= TABLE_LIMIT {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = field.mul_slow(FieldElem(a), FieldElem(b)).0;
                }
            }
            field.mul_table = Some(table);
        }
        field
    }

    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u64 {
        self.q as u64
    }

    /// Monic modulus, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.q).map(FieldElem)
    }

    /// The image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.p as i64) as u32)
    }

    /// Coefficients `c_0..c_{e-1}`, constant term first.
    pub fn coeffs(&self, x: FieldElem) -> Vec<u32> {
        let mut v = x.0;
        (0..self.e)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem, AlgebraError> {
        if coeffs.len() > self.e as usize {
            return Err(AlgebraError::Dimension(format!(
                "{} coefficients for a degree-{} field",
                coeffs.len(),
                self.e
            )));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(AlgebraError::BadCoefficient(c as u64));
        }
        Ok(FieldElem(coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)))
    }

    /// The class of `x` itself in `F_p[x]/(modulus)`.
    pub fn generator_x(&self) -> FieldElem {
        if self.e == 1 {
            // F_p[x]/(x + c) identifies x with -c.
            self.from_int(-(self.modulus[0] as i64))
        } else {
            FieldElem(self.p)
        }
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.e == 1 {
            return FieldElem((a.0 + b.0) % self.p);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0, 1);
        for _ in 0..self.e {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        FieldElem(out)
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.e == 1 {
            return FieldElem((self.p - a.0) % self.p);
        }
        let (mut x, mut out, mut place) = (a.0, 0, 1);
        for _ in 0..self.e {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        FieldElem(out)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        match &self.mul_table {
            Some(t) => FieldElem(t[(a.0 * self.q + b.0) as usize]),
            None => self.mul_slow(a, b),
        }
    }

    fn mul_slow(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.p as u64;
        if self.e == 1 {
            return FieldElem(((a.0 as u64 * b.0 as u64) % p) as u32);
        }
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let e = self.e as usize;
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &xi) in x.iter().enumerate() {
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi as u64 * yj as u64) % p;
            }
        }
        // Reduce with x^e = -(m_0 + ... + m_{e-1} x^{e-1}).
        for k in (e..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &m) in self.modulus[..e].iter().enumerate() {
                let idx = k - e + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        let coeffs: Vec<u32> = prod[..e].iter().map(|&c| c as u32).collect();
        FieldElem(coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c))
    }

    pub fn pow(&self, a: FieldElem, mut k: u64) -> FieldElem {
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        if a.is_zero() {
            None
        } else {
            Some(self.pow(a, self.q as u64 - 2))
        }
    }

    /// `x ↦ x^p`.
    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.p as u64)
    }

    /// Absolute trace to the prime field, returned as a residue in `0..p`.
    pub fn trace(&self, a: FieldElem) -> u32 {
        let mut acc = FieldElem::ZERO;
        let mut x = a;
        for _ in 0..self.e {
            acc = self.add(acc, x);
            x = self.frobenius(x);
        }
        debug_assert!(acc.0 < self.p, "trace left the prime field");
        acc.0
    }

    /// Fixed basis `1, x, ..., x^{e-1}` of the field over `F_p`.
    pub fn prime_basis(&self) -> Vec<FieldElem> {
        (0..self.e).map(|i| FieldElem(self.p.pow(i))).collect()
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: FieldElem) -> u64 {
        assert!(!a.is_zero(), "zero has no multiplicative order");
        let mut k = 1;
        let mut x = a;
        while x != FieldElem::ONE {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// The first element (in encoding order) generating the multiplicative group.
    pub fn primitive_element(&self) -> FieldElem {
        self.nonzero_elements()
            .find(|&a| self.mult_order(a) == self.q as u64 - 1)
            .expect("multiplicative group of a finite field is cyclic")
    }

    /// Builds `F_{q^2}` as the degree-`2e` extension of the prime field,
    /// together with an embedding of `self` into it.
    pub fn quadratic_extension(&self) -> Result<FieldEmbedding, AlgebraError> {
        let big = FiniteField::new(self.p as u64, 2 * self.e)?;
        // A root of our modulus in the big field is the image of x.
        let root = big
            .elements()
            .find(|&b| {
                let mut acc = FieldElem::ZERO;
                for &c in self.modulus.iter().rev() {
                    acc = big.add(big.mul(acc, b), FieldElem(c));
                }
                acc.is_zero()
            })
            .ok_or(AlgebraError::BadModulus)?;
        let images = self
            .elements()
            .map(|a| {
                let mut acc = FieldElem::ZERO;
                for &c in self.coeffs(a).iter().rev() {
                    acc = big.add(big.mul(acc, root), FieldElem(c));
                }
                acc
            })
            .collect();
        Ok(FieldEmbedding { base: self.clone(), ext: big, images })
    }

    pub fn format(&self, a: FieldElem) -> String {
        if self.e == 1 {
            return a.0.to_string();
        }
        let terms: Vec<String> = self
            .coeffs(a)
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".into(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// `F_q ⊂ F_{q^2}` realized through a root of the base modulus.
#[derive(Clone, Debug)]
pub struct FieldEmbedding {
    pub base: FiniteField,
    pub ext: FiniteField,
    images: Vec<FieldElem>,
}

impl FieldEmbedding {
    pub fn embed(&self, a: FieldElem) -> FieldElem {
        self.images[a.0 as usize]
    }

    /// Preimage of an extension element lying in the image of the base field.
    pub fn restrict(&self, b: FieldElem) -> Option<FieldElem> {
        self.images.iter().position(|&x| x == b).map(|i| FieldElem(i as u32))
    }

    /// Coordinates `(c0, c1)` with `z = c0 + c1·basis` for a fixed element
    /// `basis` outside the base field.
    pub fn coordinates(&self, z: FieldElem, basis: FieldElem) -> Option<(FieldElem, FieldElem)> {
        for c1 in self.base.elements() {
            let rest = self.ext.sub(z, self.ext.mul(self.embed(c1), basis));
            if let Some(c0) = self.restrict(rest) {
                return Some((c0, c1));
            }
        }
        None
    }
}

fn check_params(p: u64, e: u32) -> Result<(), AlgebraError> {
    if !is_prime(p) {
        return Err(AlgebraError::NotPrime(p));
    }
    if e == 0 || e > MAX_EXTENSION_DEGREE {
        return Err(AlgebraError::BadDegree(e));
    }
    if (p as u128).pow(e) > MAX_FIELD_ORDER as u128 {
        return Err(AlgebraError::FieldTooLarge { p, e });
    }
    Ok(())
}

fn smallest_irreducible(p: u32, e: u32) -> Option<Vec<u32>> {
    let count = p.pow(e);
    (0..count).find_map(|idx| {
        // c_0 is the most significant digit of idx: lexicographic order low-to-high.
        let mut digits = vec![0u32; e as usize];
        let mut v = idx;
        for slot in digits.iter_mut().rev() {
            *slot = v % p;
            v /= p;
        }
        digits.push(1);
        is_irreducible(&digits, p).then_some(digits)
    })
}

/// Exhaustive check: no monic factor of degree `1..=deg/2`.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        for idx in 0..p.pow(d as u32) {
            let mut divisor: Vec<u32> = (0..d).map(|i| (idx / p.pow(i as u32)) % p).collect();
            divisor.push(1);
            if poly_rem_is_zero(poly, &divisor, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(num: &[u32], monic_div: &[u32], p: u32) -> bool {
    let p = p as u64;
    let mut r: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let d = monic_div.len() - 1;
    for k in (d..r.len()).rev() {
        let c = r[k];
        if c == 0 {
            continue;
        }
        for (i, &m) in monic_div.iter().enumerate() {
            let idx = k - d + i;
            r[idx] = (r[idx] + (p - c) * m as u64 % p) % p;
        }
    }
    r[..d].iter().all(|&c| c == 0)
}
