//! Lookup-table arithmetic in GF(q) for the small prime powers used here.
//!
//! An element of GF(p^k) is the polynomial `a_0 + a_1 x + ... + a_{k-1} x^{k-1}`
//! reduced modulo a fixed irreducible polynomial, and is encoded as the integer
//! `a_0 + a_1 p + ... + a_{k-1} p^{k-1}`. For prime fields this is the usual
//! residue `0..p`. The encoding and the chosen moduli never change, so element
//! integers are stable across runs and can be written to files.

use thiserror::Error;

/// Field element, encoded as described in the module docs.
pub type Elem = u8;

/// Orders accepted by [`FieldTable::new`].
pub const SUPPORTED_ORDERS: [u32; 12] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("{0} is not a supported prime power (supported: 2,3,4,5,7,8,9,11,13,16,25,27)")]
    NotAPrimePower(u32),
}

/// Monic irreducible moduli for the extension fields, lowest coefficient first.
fn modulus_for(q: u32) -> Option<(u32, &'static [u8])> {
    // (p, coefficients)
    Some(match q {
        4 => (2, &[1, 1, 1]),        // x^2 + x + 1
        8 => (2, &[1, 1, 0, 1]),     // x^3 + x + 1
        9 => (3, &[1, 0, 1]),        // x^2 + 1
        16 => (2, &[1, 1, 0, 0, 1]), // x^4 + x + 1
        25 => (5, &[2, 4, 1]),       // x^2 + 4x + 2
        27 => (3, &[1, 2, 0, 1]),    // x^3 + 2x + 1
        _ => return None,
    })
}

fn small_prime(q: u32) -> bool {
    matches!(q, 2 | 3 | 5 | 7 | 11 | 13)
}

/// Addition, multiplication and inversion tables for GF(q).
#[derive(Clone, PartialEq, Eq)]
pub struct FieldTable {
    q: usize,
    p: usize,
    k: usize,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
    modulus: Vec<u8>,
}

impl std::fmt::Debug for FieldTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldTable")
            .field("q", &self.q)
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish_non_exhaustive()
    }
}

impl FieldTable {
    pub fn new(q: u32) -> Result<Self, GfError> {
        let (p, modulus): (u32, Vec<u8>) = if small_prime(q) {
            (q, Vec::new())
        } else if let Some((p, m)) = modulus_for(q) {
            (p, m.to_vec())
        } else {
            return Err(GfError::NotAPrimePower(q));
        };
        let q = q as usize;
        let p = p as usize;
        let k = if modulus.is_empty() { 1 } else { modulus.len() - 1 };

        let mut table = FieldTable {
            q,
            p,
            k,
            add: vec![0; q * q],
            mul: vec![0; q * q],
            neg: vec![0; q],
            inv: vec![0; q],
            modulus,
        };
        for a in 0..q {
            let ca = table.decode(a as Elem);
            for b in 0..q {
                let cb = table.decode(b as Elem);
                let sum: Vec<u8> = ca
                    .iter()
                    .zip(&cb)
                    .map(|(x, y)| ((*x as usize + *y as usize) % p) as u8)
                    .collect();
                table.add[a * q + b] = table.encode(&sum);
                table.mul[a * q + b] = table.encode(&table.poly_mul_mod(&ca, &cb));
            }
        }
        for a in 0..q {
            table.neg[a] = (0..q).find(|&b| table.add[a * q + b] == 0).unwrap() as Elem;
            if a != 0 {
                // a reducible modulus would leave some inverse missing; the
                // constants above are irreducible, checked by the unit tests
                table.inv[a] = (0..q).find(|&b| table.mul[a * q + b] == 1).unwrap_or(0) as Elem;
            }
        }
        Ok(table)
    }

    fn poly_mul_mod(&self, a: &[u8], b: &[u8]) -> Vec<u8> {
        let p = self.p;
        let mut prod = vec![0usize; 2 * self.k];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as usize * y as usize) % p;
            }
        }
        if self.k > 1 {
            // reduce by the monic modulus, top degree down
            for deg in (self.k..2 * self.k).rev() {
                let c = prod[deg];
                if c == 0 {
                    continue;
                }
                for (i, &m) in self.modulus.iter().enumerate() {
                    let idx = deg - self.k + i;
                    prod[idx] = (prod[idx] + p * p - c * m as usize) % p;
                }
            }
        }
        prod.truncate(self.k);
        prod.into_iter().map(|c| c as u8).collect()
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn characteristic(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.k
    }

    /// Modulus coefficients, lowest first; empty for prime fields.
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.q + b as usize]
    }

    /// Multiplicative inverse. `a` must be nonzero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        debug_assert!(a != 0, "zero has no inverse");
        self.inv[a as usize]
    }

    /// Coefficient vector (length k, lowest degree first) of an element.
    pub fn decode(&self, a: Elem) -> Vec<u8> {
        let mut a = a as usize;
        (0..self.k)
            .map(|_| {
                let c = a % self.p;
                a /= self.p;
                c as u8
            })
            .collect()
    }

    pub fn encode(&self, coeffs: &[u8]) -> Elem {
        coeffs.iter().rev().fold(0usize, |acc, &c| acc * self.p + c as usize) as Elem
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q as u32).map(|a| a as Elem)
    }
}

/// Exhaustively checks the field axioms on the tables.
pub fn field_axiom_check(f: &FieldTable) -> bool {
    let q = f.q;
    if q < 2 || f.add.len() != q * q || f.mul.len() != q * q {
        return false;
    }
    let els = || (0..q).map(|a| a as Elem);
    let in_range = f.add.iter().chain(&f.mul).all(|&x| (x as usize) < q);
    if !in_range {
        return false;
    }
    for a in els() {
        if f.add(a, 0) != a || f.mul(a, 1) != a || f.mul(a, 0) != 0 {
            return false;
        }
        if f.add(a, f.neg(a)) != 0 {
            return false;
        }
        if a != 0 && f.mul(a, f.inv(a)) != 1 {
            return false;
        }
        for b in els() {
            if f.add(a, b) != f.add(b, a) || f.mul(a, b) != f.mul(b, a) {
                return false;
            }
            for c in els() {
                if f.add(f.add(a, b), c) != f.add(a, f.add(b, c)) {
                    return false;
                }
                if f.mul(f.mul(a, b), c) != f.mul(a, f.mul(b, c)) {
                    return false;
                }
                if f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c)) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf2_basics() {
        let f = FieldTable::new(2).unwrap();
        assert_eq!(f.add(1, 1), 0);
        assert_eq!(f.mul(1, 1), 1);
        assert!(field_axiom_check(&f));
    }

    #[test]
    fn gf3_inverse_of_two() {
        let f = FieldTable::new(3).unwrap();
        assert_eq!(f.inv(2), 2);
    }

    #[test]
    fn gf4_x_squared() {
        let f = FieldTable::new(4).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        assert_eq!(f.mul(2, 2), 3);
    }

    #[test]
    fn gf9_from_x2_plus_1() {
        let f = FieldTable::new(9).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        // x * x = -1 = 2
        assert_eq!(f.mul(3, 3), 2);
        assert!(field_axiom_check(&f));
    }

    #[test]
    fn every_supported_order_is_a_field() {
        for &q in &SUPPORTED_ORDERS {
            let f = FieldTable::new(q).unwrap();
            assert_eq!(f.order(), q as usize);
            assert_eq!(f.characteristic().pow(f.degree() as u32), q as usize);
            assert!(field_axiom_check(&f), "GF({q})");
        }
    }

    #[test]
    fn prime_fields_match_integer_arithmetic() {
        for q in [2u32, 3, 5, 7, 11, 13] {
            let f = FieldTable::new(q).unwrap();
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(f.add(a as u8, b as u8) as u32, (a + b) % q);
                    assert_eq!(f.mul(a as u8, b as u8) as u32, (a * b) % q);
                }
            }
        }
    }

    #[test]
    fn encoding_round_trips() {
        for &q in &SUPPORTED_ORDERS {
            let f = FieldTable::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.encode(&f.decode(a)), a);
            }
        }
    }

    #[test]
    fn rejects_unsupported_orders() {
        for q in [0, 1, 6, 10, 12, 15, 17, 32] {
            assert_eq!(FieldTable::new(q), Err(GfError::NotAPrimePower(q)));
        }
    }

    #[test]
    fn tampered_identity_fails_check() {
        let mut f = FieldTable::new(5).unwrap();
        f.mul[5 + 1] = 0;
        assert!(!field_axiom_check(&f));
    }
}
