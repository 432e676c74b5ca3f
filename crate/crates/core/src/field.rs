//! Prime-field arithmetic and dense polynomials over `F_p`.
//!
//! Residues are stored canonically in `[0, p)`. The balanced view
//! `[-(p-1)/2, (p-1)/2]` is a conversion used by window and bound checks.
//! Hot loops elsewhere in the crate work on raw `u64` residues through the
//! [`PrimeField`] methods; [`FieldElement`] is the typed public surface.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus: products of two residues fit in a `u128`
/// with room to spare.
pub const MAX_MODULUS: u64 = (1 << 61) - 1;

/// The field `F_p` for an odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    p: u64,
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.p
    }
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p.is_multiple_of(2) && p != 0 {
            return Err(Error::EvenModulus(p));
        }
        if p > MAX_MODULUS {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// `(p - 1) / 2`, the largest balanced magnitude.
    #[inline]
    pub fn half(&self) -> u64 {
        (self.p - 1) / 2
    }

    pub fn elem(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.p,
            field: *self,
        }
    }

    pub fn elem_i64(&self, value: i64) -> FieldElement {
        FieldElement {
            value: self.reduce_i64(value),
            field: *self,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    /// All elements `0, 1, ..., p-1` as raw residues.
    pub fn residues(&self) -> std::ops::Range<u64> {
        0..self.p
    }

    #[inline]
    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.p as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(s0.rem_euclid(self.p as i128) as u64)
    }

    /// Balanced representative of a raw residue.
    #[inline]
    pub fn balanced(&self, a: u64) -> i64 {
        if a > self.half() {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    /// Number of bits needed to write any residue, `ceil(log2 p)`.
    pub fn symbol_bits(&self) -> u32 {
        ceil_log2(self.p)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// `ceil(log2 x)` for `x >= 1`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// `ceil(a / b)`.
pub fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Deterministic Miller-Rabin, exact for every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for &a in &SMALL {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Odd primes in `[lo, hi]`.
pub fn odd_primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&q| q % 2 == 1 && is_prime(q)).collect()
}

/// An element of a specific prime field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    field: PrimeField,
}

impl FieldElement {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn balanced_rep(&self) -> i64 {
        self.field.balanced(self.value)
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(FieldElement {
            value: self.field.inv(self.value)?,
            field: self.field,
        })
    }

    pub fn pow(&self, exp: u64) -> FieldElement {
        FieldElement {
            value: self.field.pow(self.value, exp),
            field: self.field,
        }
    }

    fn check(&self, other: &FieldElement) {
        assert_eq!(
            self.field, other.field,
            "arithmetic between elements of different fields"
        );
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        self.check(&rhs);
        self.field.elem(self.field.add(self.value, rhs.value))
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self.check(&rhs);
        self.field.elem(self.field.sub(self.value, rhs.value))
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.check(&rhs);
        self.field.elem(self.field.mul(self.value, rhs.value))
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.field.elem(self.field.neg(self.value))
    }
}

/// Dense polynomial over `F_p`, lowest-degree coefficient first.
///
/// Trailing zero coefficients are allowed in storage; [`Poly::degree`]
/// ignores them and equality compares the trimmed form.
#[derive(Debug, Clone)]
pub struct Poly {
    field: PrimeField,
    coeffs: Vec<u64>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Poly) -> bool {
        self.field == other.field && self.trimmed() == other.trimmed()
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn new(field: PrimeField, coeffs: Vec<u64>) -> Poly {
        let coeffs = coeffs.into_iter().map(|c| c % field.p).collect();
        Poly { field, coeffs }
    }

    pub fn from_i64(field: PrimeField, coeffs: &[i64]) -> Poly {
        Poly {
            field,
            coeffs: coeffs.iter().map(|&c| field.reduce_i64(c)).collect(),
        }
    }

    pub fn from_elements(coeffs: &[FieldElement]) -> Result<Poly> {
        let Some(first) = coeffs.first() else {
            return Err(Error::NoPoints);
        };
        let field = first.field;
        let mut raw = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            if c.field != field {
                return Err(Error::FieldMismatch(field.p, c.field.p));
            }
            raw.push(c.value);
        }
        Ok(Poly { field, coeffs: raw })
    }

    pub fn zero(field: PrimeField) -> Poly {
        Poly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: PrimeField, c: u64) -> Poly {
        Poly::new(field, vec![c])
    }

    /// The monomial `c * x^d`.
    pub fn monomial(field: PrimeField, c: u64, d: usize) -> Poly {
        let mut coeffs = vec![0; d + 1];
        coeffs[d] = c % field.p;
        Poly { field, coeffs }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Raw coefficients as stored (may carry trailing zeros).
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficients with trailing zeros removed.
    pub fn trimmed(&self) -> &[u64] {
        let len = self
            .coeffs
            .iter()
            .rposition(|&c| c != 0)
            .map_or(0, |i| i + 1);
        &self.coeffs[..len]
    }

    /// Coefficient vector padded or truncated to exactly `len` entries.
    pub fn padded(&self, len: usize) -> Vec<u64> {
        let mut v = self.trimmed().to_vec();
        v.resize(len.max(v.len()), 0);
        v
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.trimmed().len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.trimmed().is_empty()
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Horner evaluation at a raw residue.
    pub fn eval(&self, x: u64) -> u64 {
        let f = &self.field;
        let x = x % f.p;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn eval_at(&self, x: FieldElement) -> FieldElement {
        assert_eq!(self.field, x.field, "evaluation point from another field");
        self.field.elem(self.eval(x.value))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let f = self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| f.add(self.coeff(i), other.coeff(i)))
            .collect();
        Poly { field: f, coeffs }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let f = self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| f.sub(self.coeff(i), other.coeff(i)))
            .collect();
        Poly { field: f, coeffs }
    }

    pub fn scale(&self, c: u64) -> Poly {
        let f = self.field;
        Poly {
            field: f,
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let f = self.field;
        let (a, b) = (self.trimmed(), other.trimmed());
        if a.is_empty() || b.is_empty() {
            return Poly::zero(f);
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        Poly { field: f, coeffs: out }
    }

    /// `prod (x - r)` over the given roots.
    pub fn from_roots(field: PrimeField, roots: &[u64]) -> Poly {
        let mut coeffs = vec![1u64];
        for &r in roots {
            let neg_r = field.neg(r % field.p);
            let mut next = vec![0u64; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] = field.add(next[i + 1], c);
                next[i] = field.add(next[i], field.mul(c, neg_r));
            }
            coeffs = next;
        }
        Poly { field, coeffs }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.trimmed();
        if t.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in t.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}x")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Lagrange interpolation through `(x, y)` pairs with distinct abscissas.
pub fn interpolate(points: &[(FieldElement, FieldElement)]) -> Result<Poly> {
    let Some(&(x0, _)) = points.first() else {
        return Err(Error::NoPoints);
    };
    let field = x0.field;
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for (x, y) in points {
        for e in [x, y] {
            if e.field != field {
                return Err(Error::FieldMismatch(field.p, e.field.p));
            }
        }
        xs.push(x.value);
        ys.push(y.value);
    }
    interpolate_raw(field, &xs, &ys)
}

/// Raw-residue form of [`interpolate`].
pub fn interpolate_raw(field: PrimeField, xs: &[u64], ys: &[u64]) -> Result<Poly> {
    let basis = LagrangeBasis::new(field, xs)?;
    Ok(basis.interpolate(ys))
}

/// Precomputed Lagrange basis over fixed abscissas.
///
/// Interpolation becomes a matrix-vector product and evaluation of the
/// interpolant at a known point becomes a dot product with a weight row,
/// which is what the constrained searches use in their inner loops.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    field: PrimeField,
    xs: Vec<u64>,
    /// `basis[j]` holds the coefficients of `L_j`.
    basis: Vec<Vec<u64>>,
}

impl LagrangeBasis {
    pub fn new(field: PrimeField, xs: &[u64]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::NoPoints);
        }
        let xs: Vec<u64> = xs.iter().map(|&x| x % field.p).collect();
        for (i, &a) in xs.iter().enumerate() {
            if xs[..i].contains(&a) {
                return Err(Error::DuplicateAbscissa(a));
            }
        }
        let master = Poly::from_roots(field, &xs);
        let d = xs.len();
        let mut basis = Vec::with_capacity(d);
        for (j, &xj) in xs.iter().enumerate() {
            // synthetic division of the master polynomial by (x - xj)
            let m = &master.coeffs;
            let mut q = vec![0u64; d];
            let mut carry = 0u64;
            for i in (0..d).rev() {
                carry = field.add(m[i + 1], field.mul(carry, xj));
                q[i] = carry;
            }
            let denom = xs
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .fold(1u64, |acc, (_, &xi)| field.mul(acc, field.sub(xj, xi)));
            let scale = field.inv(denom)?;
            basis.push(q.into_iter().map(|c| field.mul(c, scale)).collect());
        }
        Ok(LagrangeBasis { field, xs, basis })
    }

    pub fn abscissas(&self) -> &[u64] {
        &self.xs
    }

    pub fn interpolate(&self, ys: &[u64]) -> Poly {
        assert_eq!(ys.len(), self.xs.len());
        let f = self.field;
        let d = self.xs.len();
        let mut coeffs = vec![0u64; d];
        for (row, &y) in self.basis.iter().zip(ys) {
            if y == 0 {
                continue;
            }
            for (c, &b) in coeffs.iter_mut().zip(row) {
                *c = f.add(*c, f.mul(b, y));
            }
        }
        Poly { field: f, coeffs }
    }

    /// `[L_0(x), ..., L_{d-1}(x)]`.
    pub fn weights_at(&self, x: u64) -> Vec<u64> {
        let f = self.field;
        self.basis
            .iter()
            .map(|row| row.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn make_field_cases() {
        assert_eq!(PrimeField::new(7).unwrap().modulus(), 7);
        assert_eq!(PrimeField::new(9), Err(Error::NotPrime(9)));
        assert_eq!(PrimeField::new(2), Err(Error::EvenModulus(2)));
        assert_eq!(PrimeField::new(1), Err(Error::NotPrime(1)));
        assert_eq!(PrimeField::new(0), Err(Error::NotPrime(0)));
        assert_eq!(PrimeField::new(1 << 62), Err(Error::EvenModulus(1 << 62)));
        assert!(PrimeField::new(MAX_MODULUS).is_ok());
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        for n in 0..20_000u64 {
            let naive = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime(n), naive, "n={n}");
        }
        // strong pseudoprimes to several small bases
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(3_825_123_056_546_413_051));
        assert!(is_prime(1_000_000_007));
    }

    #[test]
    fn balanced_examples() {
        assert_eq!(f7().elem(5).balanced_rep(), -2);
        assert_eq!(f7().elem(3).balanced_rep(), 3);
        let f101 = PrimeField::new(101).unwrap();
        assert_eq!(f101.elem(51).balanced_rep(), -50);
    }

    #[test]
    fn balanced_is_bijection() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            let f = PrimeField::new(p).unwrap();
            let h = f.half() as i64;
            let mut seen: Vec<i64> = f.residues().map(|x| f.balanced(x)).collect();
            for x in f.residues() {
                assert_eq!(f.reduce_i64(f.balanced(x)), x);
            }
            seen.sort();
            assert_eq!(seen, (-h..=h).collect::<Vec<_>>());
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(f7().elem(3).inv().unwrap().value(), 5);
        assert_eq!(f7().elem(1).inv().unwrap().value(), 1);
        assert_eq!(f7().elem(0).inv(), Err(Error::ZeroInverse));
    }

    #[test]
    fn inverse_exhaustive() {
        for p in odd_primes_in(3, 101) {
            let f = PrimeField::new(p).unwrap();
            for x in 1..p {
                assert_eq!(f.mul(x, f.inv(x).unwrap()), 1);
            }
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Poly::zero(f7()).eval(4), 0);
        assert_eq!(Poly::new(f7(), vec![1, 0, 1]).eval(3), 3);
        let f101 = PrimeField::new(101).unwrap();
        assert_eq!(Poly::new(f101, vec![0, 1]).eval_at(f101.elem(51)).value(), 51);
    }

    #[test]
    fn interpolate_examples() {
        let f = f7();
        let e = |x| f.elem(x);
        assert_eq!(
            interpolate(&[(e(0), e(4))]).unwrap(),
            Poly::constant(f, 4)
        );
        let g = interpolate(&[(e(1), e(2)), (e(2), e(4)), (e(3), e(6))]).unwrap();
        assert_eq!(g, Poly::new(f, vec![0, 2]));
        for x in 1..=3 {
            assert_eq!(g.eval(x), 2 * x);
        }
        assert_eq!(
            interpolate(&[(e(1), e(2)), (e(1), e(3))]),
            Err(Error::DuplicateAbscissa(1))
        );
    }

    #[test]
    fn interpolation_round_trip_exhaustive() {
        for p in [3u64, 5, 7, 11, 13] {
            let f = PrimeField::new(p).unwrap();
            for d in 1..=3usize {
                let xs: Vec<u64> = (0..d as u64).map(|i| (2 * i + 1) % p).collect();
                let basis = LagrangeBasis::new(f, &xs).unwrap();
                let total = p.pow(d as u32);
                for idx in 0..total {
                    let coeffs: Vec<u64> =
                        (0..d).map(|i| (idx / p.pow(i as u32)) % p).collect();
                    let poly = Poly::new(f, coeffs);
                    let ys: Vec<u64> = xs.iter().map(|&x| poly.eval(x)).collect();
                    assert_eq!(basis.interpolate(&ys), poly);
                }
            }
        }
    }

    #[test]
    fn weights_reproduce_evaluation() {
        let f = PrimeField::new(101).unwrap();
        let xs = [3u64, 17, 40, 99];
        let basis = LagrangeBasis::new(f, &xs).unwrap();
        let poly = Poly::new(f, vec![5, 0, 77, 12]);
        let ys: Vec<u64> = xs.iter().map(|&x| poly.eval(x)).collect();
        for z in 0..101 {
            let w = basis.weights_at(z);
            let v = w.iter().zip(&ys).fold(0, |a, (&w, &y)| f.add(a, f.mul(w, y)));
            assert_eq!(v, poly.eval(z));
        }
    }

    #[test]
    fn degree_strips_trailing_zeros() {
        let p = Poly::new(f7(), vec![1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Poly::new(f7(), vec![0, 0]).degree(), None);
        assert_eq!(p, Poly::new(f7(), vec![1, 2]));
    }

    #[test]
    fn from_roots_vanishes() {
        let f = PrimeField::new(13).unwrap();
        let g = Poly::from_roots(f, &[2, 5, 11]);
        assert_eq!(g.degree(), Some(3));
        for r in [2, 5, 11] {
            assert_eq!(g.eval(r), 0);
        }
        assert_ne!(g.eval(0), 0);
    }
}
