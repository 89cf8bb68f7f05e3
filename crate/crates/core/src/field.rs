//! Arithmetic in GF(q) for prime powers q = p^e, q <= 4096.
//!
//! Elements are integers in `0..q` encoding polynomial coefficients in base
//! p: the p^i digit of the integer is the coefficient of x^i. Under this
//! encoding, addition is digit-wise addition mod p and multiplication is
//! polynomial multiplication modulo a fixed reduction polynomial.
//!
//! The reduction polynomial is chosen deterministically: the first monic
//! irreducible polynomial of degree e over GF(p), where candidates
//! x^e + c_{e-1} x^{e-1} + ... + c_0 are ordered lexicographically by the
//! coefficient tuple (c_{e-1}, ..., c_0). Two constructions of GF(q)
//! therefore always agree element by element. For GF(4) this yields
//! x^2 + x + 1.

use crate::{Error, Result};

/// Maximum supported field order.
pub const MAX_ORDER: u64 = 4096;

/// Orders up to this bound get full operation tables and an exhaustive
/// inverse-existence check at construction time.
const TABLE_ORDER: u16 = 256;

/// A finite field GF(p^e). Immutable after construction; share via `Arc`.
#[derive(Debug)]
pub struct Field {
    q: u16,
    p: u16,
    e: u32,
    /// Reduction polynomial coefficients, little-endian, length e+1, monic.
    reduction: Vec<u16>,
    add_tab: Option<Vec<u16>>,
    mul_tab: Option<Vec<u16>>,
    inv_tab: Option<Vec<u16>>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.reduction == other.reduction
    }
}
impl Eq for Field {}

impl Field {
    /// Constructs GF(q). Fails unless q is a prime power in `2..=4096`.
    pub fn new(q: u64) -> Result<Field> {
        if q > MAX_ORDER {
            return Err(Error::OrderTooLarge(q));
        }
        if q < 2 {
            return Err(Error::NotPrimePower(q));
        }
        let (p, e) = factor_prime_power(q).ok_or(Error::NotPrimePower(q))?;
        let reduction = first_irreducible(p, e);
        let mut field = Field {
            q: q as u16,
            p,
            e,
            reduction,
            add_tab: None,
            mul_tab: None,
            inv_tab: None,
        };
        if field.q <= TABLE_ORDER {
            field.build_tables()?;
        }
        Ok(field)
    }

    pub fn q(&self) -> u16 {
        self.q
    }

    pub fn characteristic(&self) -> u16 {
        self.p
    }

    pub fn extension_degree(&self) -> u32 {
        self.e
    }

    /// Reduction polynomial coefficients, little-endian, length e+1.
    pub fn reduction_poly(&self) -> &[u16] {
        &self.reduction
    }

    /// All field elements in increasing integer order.
    pub fn elements(&self) -> impl Iterator<Item = u16> {
        0..self.q
    }

    pub fn validate_element(&self, v: u64) -> Result<u16> {
        if v < u64::from(self.q) {
            Ok(v as u16)
        } else {
            Err(Error::ElementOutOfRange { element: v, q: self.q })
        }
    }

    pub fn add(&self, a: u16, b: u16) -> u16 {
        debug_assert!(a < self.q && b < self.q);
        if let Some(tab) = &self.add_tab {
            return tab[a as usize * self.q as usize + b as usize];
        }
        self.add_raw(a, b)
    }

    pub fn neg(&self, a: u16) -> u16 {
        debug_assert!(a < self.q);
        if self.p == 2 {
            return a;
        }
        // Negate each base-p digit.
        let mut out = 0u16;
        let mut a = a;
        let mut place = 1u16;
        for _ in 0..self.e {
            let d = a % self.p;
            a /= self.p;
            out += if d == 0 { 0 } else { (self.p - d) * place };
            place = place.saturating_mul(self.p);
        }
        out
    }

    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        debug_assert!(a < self.q && b < self.q);
        if let Some(tab) = &self.mul_tab {
            return tab[a as usize * self.q as usize + b as usize];
        }
        self.mul_raw(a, b)
    }

    /// Multiplicative inverse. Fails on zero.
    pub fn inv(&self, a: u16) -> Result<u16> {
        if a == 0 {
            return Err(Error::DivisionByZero(self.q));
        }
        if let Some(tab) = &self.inv_tab {
            return Ok(tab[a as usize]);
        }
        // a^(q-2); the multiplicative group has order q-1.
        Ok(self.pow(a, u64::from(self.q) - 2))
    }

    pub fn div(&self, a: u16, b: u16) -> Result<u16> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u16, mut n: u64) -> u16 {
        debug_assert!(a < self.q);
        let mut base = a;
        let mut acc = 1u16;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    fn add_raw(&self, a: u16, b: u16) -> u16 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.e == 1 {
            return (a + b) % self.p;
        }
        let mut out = 0u16;
        let (mut a, mut b) = (a, b);
        let mut place = 1u16;
        for _ in 0..self.e {
            let d = (a % self.p + b % self.p) % self.p;
            a /= self.p;
            b /= self.p;
            out += d * place;
            place = place.saturating_mul(self.p);
        }
        out
    }

    fn mul_raw(&self, a: u16, b: u16) -> u16 {
        if self.e == 1 {
            return ((u32::from(a) * u32::from(b)) % u32::from(self.p)) as u16;
        }
        let pa = self.to_poly(a);
        let pb = self.to_poly(b);
        let mut prod = vec![0u16; 2 * self.e as usize - 1];
        for (i, &ca) in pa.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in pb.iter().enumerate() {
                prod[i + j] = ((u32::from(prod[i + j]) + u32::from(ca) * u32::from(cb))
                    % u32::from(self.p)) as u16;
            }
        }
        poly_rem_in_place(&mut prod, &self.reduction, self.p);
        self.pack_poly(&prod)
    }

    fn to_poly(&self, mut a: u16) -> Vec<u16> {
        let mut out = vec![0u16; self.e as usize];
        for c in out.iter_mut() {
            *c = a % self.p;
            a /= self.p;
        }
        out
    }

    fn pack_poly(&self, coeffs: &[u16]) -> u16 {
        let mut out = 0u16;
        for &c in coeffs.iter().rev() {
            out = out * self.p + c;
        }
        out
    }

    fn build_tables(&mut self) -> Result<()> {
        let q = self.q as usize;
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for a in 0..q as u16 {
            for b in 0..q as u16 {
                add[a as usize * q + b as usize] = self.add_raw(a, b);
                mul[a as usize * q + b as usize] = self.mul_raw(a, b);
            }
        }
        // Exhaustive validation: every nonzero element must have an inverse.
        let mut inv = vec![0u16; q];
        for a in 1..q as u16 {
            let mut found = None;
            for b in 1..q as u16 {
                if mul[a as usize * q + b as usize] == 1 {
                    found = Some(b);
                    break;
                }
            }
            inv[a as usize] =
                found.ok_or_else(|| Error::InvalidArgument(format!(
                    "no inverse for {a} in GF({}); reduction polynomial is not irreducible",
                    self.q
                )))?;
        }
        self.add_tab = Some(add);
        self.mul_tab = Some(mul);
        self.inv_tab = Some(inv);
        Ok(())
    }
}

/// Factors q as p^e with p prime, if possible.
fn factor_prime_power(q: u64) -> Option<(u16, u32)> {
    let mut p = 2u64;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut rest = q;
            let mut e = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            return if rest == 1 { Some((p as u16, e)) } else { None };
        }
        p += 1;
    }
    // q itself is prime.
    Some((q as u16, 1))
}

/// In-place remainder of `poly` modulo the monic `modulus`, over GF(p).
fn poly_rem_in_place(poly: &mut Vec<u16>, modulus: &[u16], p: u16) {
    let deg_m = modulus.len() - 1;
    while poly.len() > deg_m {
        let lead = *poly.last().unwrap();
        let shift = poly.len() - 1 - deg_m;
        if lead != 0 {
            for (i, &mc) in modulus.iter().enumerate() {
                let idx = shift + i;
                let sub = (u32::from(lead) * u32::from(mc)) % u32::from(p);
                let cur = u32::from(poly[idx]);
                poly[idx] = ((cur + u32::from(p) * u32::from(p) - sub) % u32::from(p)) as u16;
            }
        }
        poly.pop();
        while poly.len() > deg_m && *poly.last().unwrap() == 0 {
            if poly.len() == 1 {
                break;
            }
            poly.pop();
        }
    }
    poly.resize(deg_m.max(1), 0);
}

/// First monic irreducible polynomial of degree e over GF(p), candidates
/// ordered lexicographically by (c_{e-1}, ..., c_0). Little-endian output of
/// length e+1. For e = 1 this is the polynomial x.
fn first_irreducible(p: u16, e: u32) -> Vec<u16> {
    let e = e as usize;
    if e == 1 {
        return vec![0, 1];
    }
    let total = (p as u64).pow(e as u32);
    for t in 0..total {
        // Digit i of t (base p, most significant first) is c_{e-1-i}.
        let mut coeffs = vec![0u16; e + 1];
        coeffs[e] = 1;
        let mut rest = t;
        for c in coeffs.iter_mut().take(e) {
            *c = (rest % u64::from(p)) as u16;
            rest /= u64::from(p);
        }
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over GF(p)")
}

/// Trial division by all monic polynomials of degree 1..=e/2.
fn is_irreducible(poly: &[u16], p: u16) -> bool {
    let e = poly.len() - 1;
    for d in 1..=e / 2 {
        let count = (p as u64).pow(d as u32);
        for t in 0..count {
            let mut divisor = vec![0u16; d + 1];
            divisor[d] = 1;
            let mut rest = t;
            for c in divisor.iter_mut().take(d) {
                *c = (rest % u64::from(p)) as u16;
                rest /= u64::from(p);
            }
            if poly_divides(&divisor, poly, p) {
                return false;
            }
        }
    }
    true
}

fn poly_divides(divisor: &[u16], poly: &[u16], p: u16) -> bool {
    let mut rem = poly.to_vec();
    poly_rem_in_place(&mut rem, divisor, p);
    rem.iter().all(|&c| c == 0)
}
