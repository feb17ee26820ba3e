//! Arithmetic in finite fields `F_{p^d}`.
//!
//! Elements are stored as integer codes: the polynomial representative
//! `c_0 + c_1 t + … + c_{d-1} t^{d-1}` is encoded as the base-`p` integer
//! `Σ c_i p^i`. Codes `0` and `1` are therefore always the additive and
//! multiplicative identities, independent of the modulus.
//!
//! For small fields (order ≤ 512) all operations are table-driven; larger
//! fields fall back to polynomial arithmetic. Fields of even degree carry
//! the order-2 automorphism `x ↦ x^(p^(d/2))`, exposed through
//! [`Involution::FrobeniusSqrt`].

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use thiserror::Error;

/// Largest field order for which lookup tables are built.
const TABLE_LIMIT: u32 = 512;

/// Largest supported field order.
const ORDER_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("order {p}^{degree} exceeds the supported limit")]
    OrderTooLarge { p: u32, degree: u32 },
    #[error("modulus must have length degree+1 = {expected}, got {got}")]
    ModulusLength { expected: usize, got: usize },
    #[error("modulus must be monic")]
    ModulusNotMonic,
    #[error("modulus coefficient {coeff} is not reduced mod {p}")]
    ModulusCoefficient { coeff: u32, p: u32 },
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u32 },
    #[error("element code {code} out of range for a field of order {order}")]
    ElementRange { code: u32, order: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("the order-2 automorphism needs even degree, field has degree {degree}")]
    SigmaUnavailable { degree: u32 },
}

/// The field automorphisms this crate works with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Involution {
    /// The identity map.
    Identity,
    /// `x ↦ x^(p^(d/2))` on a field of even degree `d`; its fixed field is
    /// the subfield of order `p^(d/2)`.
    FrobeniusSqrt,
}

impl fmt::Display for Involution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Involution::Identity => write!(f, "id"),
            Involution::FrobeniusSqrt => write!(f, "frob"),
        }
    }
}

/// An element of a [`Field`], stored as its base-`p` digit code.
///
/// Elements do not carry a reference to their field; all arithmetic goes
/// through `Field` methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    frob_sqrt: Option<Vec<u32>>,
}

/// A finite field `F_{p^d}`, presented as `F_p[t] / (modulus)`.
pub struct Field {
    p: u32,
    degree: u32,
    /// Monic, little-endian, length `degree + 1`.
    modulus: Vec<u32>,
    order: u32,
    tables: OnceLock<Option<Box<Tables>>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.order)?;
        if self.degree > 1 {
            write!(f, " = F_{}[t]/({})", self.p, poly_string(&self.modulus))?;
        }
        Ok(())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.degree == other.degree && self.modulus == other.modulus
    }
}
impl Eq for Field {}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn poly_string(coeffs: &[u32]) -> String {
    let mut parts = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let term = match (i, c) {
            (0, c) => format!("{c}"),
            (1, 1) => "t".to_string(),
            (1, c) => format!("{c}t"),
            (i, 1) => format!("t^{i}"),
            (i, c) => format!("{c}t^{i}"),
        };
        parts.push(term);
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join("+")
    }
}

// --- polynomial helpers over F_p (little-endian coefficient vectors) ---

fn poly_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    debug_assert!(!b.is_empty() && *b.last().unwrap() != 0);
    let mut r: Vec<u32> = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_inv(*b.last().unwrap(), p);
    while r.len() > db {
        let da = r.len() - 1;
        let c = (r[da] as u64 * lead_inv as u64 % p as u64) as u32;
        for i in 0..=db {
            let idx = da - db + i;
            let sub = (c as u64 * b[i] as u64 % p as u64) as u32;
            r[idx] = ((r[idx] + p) - sub) % p;
        }
        poly_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    // Fermat; p is prime and a ≠ 0 mod p.
    mod_pow(a, p as u64 - 2, p)
}

fn mod_pow(base: u32, mut exp: u64, p: u32) -> u32 {
    let mut acc: u64 = 1;
    let mut b = base as u64 % p as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u64;
        }
        b = b * b % p as u64;
        exp >>= 1;
    }
    acc as u32
}

fn poly_is_irreducible(f: &[u32], p: u32) -> bool {
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    if f[0] == 0 {
        return false; // divisible by t
    }
    // Trial division by every monic polynomial of degree 1..=d/2.
    for e in 1..=d / 2 {
        let count = (p as u64).pow(e as u32);
        for code in 0..count {
            let mut g = vec![0u32; e + 1];
            let mut c = code;
            for gi in g.iter_mut().take(e) {
                *gi = (c % p as u64) as u32;
                c /= p as u64;
            }
            g[e] = 1;
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Arc<Field>, FieldError> {
        Field::new(p, 1, vec![0, 1])
    }

    /// `F_{p^d}` with the lexicographically least monic irreducible modulus
    /// (coefficients compared as the base-`p` code of the non-leading part).
    pub fn with_default_modulus(p: u32, degree: u32) -> Result<Arc<Field>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if degree == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order64 = (p as u64).checked_pow(degree).filter(|&o| o <= ORDER_LIMIT);
        let order64 = order64.ok_or(FieldError::OrderTooLarge { p, degree })?;
        for code in 0..order64 {
            let mut m = vec![0u32; degree as usize + 1];
            let mut c = code;
            for mi in m.iter_mut().take(degree as usize) {
                *mi = (c % p as u64) as u32;
                c /= p as u64;
            }
            m[degree as usize] = 1;
            if poly_is_irreducible(&m, p) {
                return Field::new(p, degree, m);
            }
        }
        unreachable!("an irreducible polynomial of every degree exists over F_p")
    }

    /// `F_{p^d}` presented by an explicit monic irreducible modulus
    /// (little-endian, length `degree + 1`).
    pub fn new(p: u32, degree: u32, modulus: Vec<u32>) -> Result<Arc<Field>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if degree == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order64 = (p as u64)
            .checked_pow(degree)
            .filter(|&o| o <= ORDER_LIMIT)
            .ok_or(FieldError::OrderTooLarge { p, degree })?;
        if modulus.len() != degree as usize + 1 {
            return Err(FieldError::ModulusLength {
                expected: degree as usize + 1,
                got: modulus.len(),
            });
        }
        if *modulus.last().unwrap() != 1 {
            return Err(FieldError::ModulusNotMonic);
        }
        if let Some(&c) = modulus.iter().find(|&&c| c >= p) {
            return Err(FieldError::ModulusCoefficient { coeff: c, p });
        }
        if degree > 1 && !poly_is_irreducible(&modulus, p) {
            return Err(FieldError::ReducibleModulus { p });
        }
        Ok(Arc::new(Field {
            p,
            degree,
            modulus,
            order: order64 as u32,
            tables: OnceLock::new(),
        }))
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    pub fn minus_one(&self) -> FieldElement {
        self.neg(FieldElement(1))
    }

    /// The class of `t` (only interesting for degree ≥ 2).
    pub fn gen(&self) -> FieldElement {
        if self.degree == 1 {
            FieldElement(0)
        } else {
            FieldElement(self.p)
        }
    }

    /// Validated element construction from a code.
    pub fn element(&self, code: u32) -> Result<FieldElement, FieldError> {
        if code < self.order {
            Ok(FieldElement(code))
        } else {
            Err(FieldError::ElementRange {
                code,
                order: self.order,
            })
        }
    }

    /// Unvalidated element construction; used by tests and internal loops
    /// where the code is known to be in range.
    pub fn el(&self, code: u32) -> FieldElement {
        debug_assert!(code < self.order);
        FieldElement(code)
    }

    /// The image of the integer `n` under `Z → F_p ⊆ F_{p^d}`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        let p = self.p as i64;
        FieldElement(n.rem_euclid(p) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order).map(FieldElement)
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.order))
    }

    fn digits(&self, x: FieldElement) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.degree as usize);
        let mut c = x.0;
        for _ in 0..self.degree {
            v.push(c % self.p);
            c /= self.p;
        }
        v
    }

    fn encode(&self, digits: &[u32]) -> FieldElement {
        let mut code = 0u64;
        for &d in digits.iter().rev() {
            code = code * self.p as u64 + d as u64;
        }
        FieldElement(code as u32)
    }

    fn tables(&self) -> Option<&Tables> {
        self.tables
            .get_or_init(|| {
                if self.order > TABLE_LIMIT {
                    return None;
                }
                let n = self.order as usize;
                let mut add = vec![0u32; n * n];
                let mut mul = vec![0u32; n * n];
                let mut neg = vec![0u32; n];
                let mut inv = vec![0u32; n];
                for a in 0..self.order {
                    neg[a as usize] = self.neg_poly(FieldElement(a)).0;
                    for b in 0..self.order {
                        add[(a * self.order + b) as usize] =
                            self.add_poly(FieldElement(a), FieldElement(b)).0;
                        mul[(a * self.order + b) as usize] =
                            self.mul_poly(FieldElement(a), FieldElement(b)).0;
                    }
                }
                for a in 1..self.order {
                    inv[a as usize] = self.inv_poly(FieldElement(a)).0;
                }
                let frob_sqrt = (self.degree % 2 == 0).then(|| {
                    let e = (self.p as u64).pow(self.degree / 2);
                    (0..self.order)
                        .map(|a| self.pow_poly(FieldElement(a), e).0)
                        .collect()
                });
                Some(Box::new(Tables {
                    add,
                    mul,
                    neg,
                    inv,
                    frob_sqrt,
                }))
            })
            .as_deref()
    }

    // --- polynomial-backed arithmetic (ground truth, also builds tables) ---

    fn add_poly(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.encode(&sum)
    }

    fn neg_poly(&self, a: FieldElement) -> FieldElement {
        let da = self.digits(a);
        let neg: Vec<u32> = da.iter().map(|&x| (self.p - x) % self.p).collect();
        self.encode(&neg)
    }

    fn mul_poly(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (da, db) = (self.digits(a), self.digits(b));
        let d = self.degree as usize;
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % self.p as u64;
            }
        }
        // Reduce modulo the monic modulus.
        for i in (d..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for (j, &m) in self.modulus.iter().enumerate().take(d) {
                let idx = i - d + j;
                let sub = c * m as u64 % self.p as u64;
                prod[idx] = (prod[idx] + self.p as u64 - sub) % self.p as u64;
            }
        }
        let digits: Vec<u32> = prod[..d].iter().map(|&x| x as u32).collect();
        self.encode(&digits)
    }

    fn pow_poly(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        acc
    }

    fn inv_poly(&self, a: FieldElement) -> FieldElement {
        debug_assert!(!a.is_zero());
        self.pow_poly(a, self.order as u64 - 2)
    }

    // --- public arithmetic ---

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match self.tables() {
            Some(t) => FieldElement(t.add[(a.0 * self.order + b.0) as usize]),
            None => self.add_poly(a, b),
        }
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        match self.tables() {
            Some(t) => FieldElement(t.neg[a.0 as usize]),
            None => self.neg_poly(a),
        }
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match self.tables() {
            Some(t) => FieldElement(t.mul[(a.0 * self.order + b.0) as usize]),
            None => self.mul_poly(a, b),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match self.tables() {
            Some(t) => FieldElement(t.inv[a.0 as usize]),
            None => self.inv_poly(a),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        self.pow_poly(a, e)
    }

    /// `x ↦ x^(p^(d/2))`; requires even degree.
    pub fn frobenius_sqrt(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if self.degree % 2 != 0 {
            return Err(FieldError::SigmaUnavailable {
                degree: self.degree,
            });
        }
        Ok(match self.tables().and_then(|t| t.frob_sqrt.as_ref()) {
            Some(t) => FieldElement(t[a.0 as usize]),
            None => self.pow_poly(a, (self.p as u64).pow(self.degree / 2)),
        })
    }

    /// Apply an involution.
    pub fn apply(&self, sigma: Involution, a: FieldElement) -> Result<FieldElement, FieldError> {
        match sigma {
            Involution::Identity => Ok(a),
            Involution::FrobeniusSqrt => self.frobenius_sqrt(a),
        }
    }

    /// Whether this field supports the given involution.
    pub fn supports(&self, sigma: Involution) -> bool {
        match sigma {
            Involution::Identity => true,
            Involution::FrobeniusSqrt => self.degree % 2 == 0,
        }
    }

    /// `x · σ(x)` for the order-2 automorphism; lands in the fixed subfield.
    pub fn norm(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.frobenius_sqrt(a)?))
    }

    /// Render an element as a polynomial in `t`.
    pub fn format_element(&self, a: FieldElement) -> String {
        if self.degree == 1 {
            return format!("{}", a.0);
        }
        poly_string(&self.digits(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_moduli_are_the_expected_ones() {
        assert_eq!(
            Field::with_default_modulus(2, 2).unwrap().modulus(),
            &[1, 1, 1]
        );
        assert_eq!(
            Field::with_default_modulus(3, 2).unwrap().modulus(),
            &[1, 0, 1]
        );
        assert_eq!(
            Field::with_default_modulus(5, 2).unwrap().modulus(),
            &[2, 0, 1]
        );
        assert_eq!(
            Field::with_default_modulus(2, 4).unwrap().modulus(),
            &[1, 1, 0, 0, 1]
        );
    }

    #[test]
    fn f4_generator_squares_to_generator_plus_one() {
        let f = Field::with_default_modulus(2, 2).unwrap();
        let a = f.gen(); // t, code 2
        assert_eq!(a.code(), 2);
        let sq = f.mul(a, a);
        assert_eq!(sq, f.add(a, f.one())); // t^2 = t + 1
        assert_eq!(sq.code(), 3);
    }

    #[test]
    fn f9_inverse_of_t_is_2t() {
        // F_9 = F_3[t]/(t^2+1): t·2t = 2t^2 = -2 = 1.
        let f = Field::with_default_modulus(3, 2).unwrap();
        let t = f.gen();
        assert_eq!(t.code(), 3);
        let inv = f.inv(t).unwrap();
        assert_eq!(inv.code(), 6); // 2t
        assert_eq!(f.mul(t, inv), f.one());
    }

    #[test]
    fn reducible_modulus_rejected() {
        // t^2+1 = (t+1)^2 over F_2.
        let err = Field::new(2, 2, vec![1, 0, 1]).unwrap_err();
        assert_eq!(err, FieldError::ReducibleModulus { p: 2 });
    }

    #[test]
    fn composite_characteristic_rejected() {
        assert_eq!(Field::prime(6).unwrap_err(), FieldError::NotPrime(6));
        assert_eq!(Field::prime(1).unwrap_err(), FieldError::NotPrime(1));
    }

    #[test]
    fn element_code_out_of_range() {
        let f = Field::prime(5).unwrap();
        assert!(f.element(4).is_ok());
        assert_eq!(
            f.element(5).unwrap_err(),
            FieldError::ElementRange { code: 5, order: 5 }
        );
    }

    #[test]
    fn field_axioms_exhaustive_small_orders() {
        for (p, d) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4)] {
            let f = Field::with_default_modulus(p, d).unwrap();
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.zero()), a);
                assert_eq!(f.mul(a, f.one()), a);
                assert_eq!(f.add(a, f.neg(a)), f.zero());
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_sqrt_is_an_involution_with_small_fixed_field() {
        for (p, d) in [(3, 2), (5, 2), (2, 4)] {
            let f = Field::with_default_modulus(p, d).unwrap();
            let q = (p as u32).pow(d / 2);
            let mut fixed = 0;
            for a in f.elements() {
                let s = f.frobenius_sqrt(a).unwrap();
                assert_eq!(f.frobenius_sqrt(s).unwrap(), a);
                // σ is a ring homomorphism.
                for b in f.elements().take(12) {
                    let sb = f.frobenius_sqrt(b).unwrap();
                    assert_eq!(f.frobenius_sqrt(f.add(a, b)).unwrap(), f.add(s, sb));
                    assert_eq!(f.frobenius_sqrt(f.mul(a, b)).unwrap(), f.mul(s, sb));
                }
                if s == a {
                    fixed += 1;
                }
            }
            assert_eq!(fixed, q, "fixed field of σ on F_{} has order {q}", f.order());
        }
    }

    #[test]
    fn frobenius_sqrt_rejected_on_odd_degree() {
        let f = Field::with_default_modulus(2, 3).unwrap();
        assert_eq!(
            f.frobenius_sqrt(f.one()).unwrap_err(),
            FieldError::SigmaUnavailable { degree: 3 }
        );
        assert!(!f.supports(Involution::FrobeniusSqrt));
    }

    #[test]
    fn norm_is_q_plus_one_to_one_onto_fixed_field() {
        // F_9 → F_3: norm is surjective onto the subfield, each nonzero
        // target hit q+1 = 4 times.
        let f = Field::with_default_modulus(3, 2).unwrap();
        let mut counts = std::collections::BTreeMap::new();
        for a in f.elements() {
            *counts.entry(f.norm(a).unwrap()).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 3);
        assert_eq!(counts[&f.zero()], 1);
        assert_eq!(counts[&f.one()], 4);
        assert_eq!(counts[&f.el(2)], 4);
    }

    #[test]
    fn large_field_uses_polynomial_path() {
        // Order 1024 > TABLE_LIMIT: exercises the non-tabled code paths.
        let f = Field::with_default_modulus(2, 10).unwrap();
        assert_eq!(f.order(), 1024);
        let a = f.el(777);
        assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
        let s = f.frobenius_sqrt(a).unwrap();
        assert_eq!(f.frobenius_sqrt(s).unwrap(), a);
        assert_eq!(f.add(a, a), f.zero()); // char 2
    }

    #[test]
    fn from_int_wraps_mod_p() {
        let f = Field::with_default_modulus(3, 2).unwrap();
        assert_eq!(f.from_int(-1), f.el(2));
        assert_eq!(f.from_int(4), f.one());
        assert_eq!(f.minus_one(), f.el(2));
    }

    #[test]
    fn element_formatting() {
        let f = Field::with_default_modulus(3, 2).unwrap();
        assert_eq!(f.format_element(f.el(0)), "0");
        assert_eq!(f.format_element(f.el(5)), "t+2");
        assert_eq!(f.format_element(f.el(6)), "2t");
        let g = Field::prime(7).unwrap();
        assert_eq!(g.format_element(g.el(5)), "5");
    }
}
