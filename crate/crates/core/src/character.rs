//! Multiplicative characters φ^k of k^×, the additive character ψ, and
//! pullbacks of characters along the norm map.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::cyclotomic::CycloNumber;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FqField, TowerEmbedding};

/// The character φ^k, where φ(g^j) = ζ_{q−1}^j for the field generator g.
///
/// Every character vanishes at 0, the trivial one included.
#[derive(Clone)]
pub struct MultChar {
    field: Arc<FqField>,
    exponent: u32,
}

impl fmt::Debug for MultChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "phi^{} on F_{}", self.exponent, self.field.q())
    }
}

impl PartialEq for MultChar {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.exponent == other.exponent
    }
}

impl Eq for MultChar {}

impl MultChar {
    pub fn new(field: &Arc<FqField>, k: i64) -> Self {
        MultChar {
            field: field.clone(),
            exponent: k.rem_euclid(field.order() as i64) as u32,
        }
    }

    /// The trivial character ε.
    pub fn trivial(field: &Arc<FqField>) -> Self {
        Self::new(field, 0)
    }

    /// The generator φ of the character group.
    pub fn generator(field: &Arc<FqField>) -> Self {
        Self::new(field, 1)
    }

    /// φ_d = φ^{(q−1)/d}, a character of exact order d.
    pub fn of_exact_order(field: &Arc<FqField>, d: u64) -> Result<Self> {
        let q1 = field.order() as u64;
        if d == 0 || q1 % d != 0 {
            return Err(Error::NotDivisor { d, modulus: q1 });
        }
        Ok(Self::new(field, (q1 / d) as i64))
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    /// The exponent k in [0, q−1).
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_trivial(&self) -> bool {
        self.exponent == 0
    }

    /// δ(χ): 1 for the trivial character, 0 otherwise.
    pub fn delta(&self) -> u32 {
        u32::from(self.is_trivial())
    }

    /// Multiplicative order of the character.
    pub fn order(&self) -> u64 {
        let q1 = self.field.order() as u64;
        q1 / (self.exponent as u64).gcd(&q1)
    }

    fn same(&self, other: &Self) -> Result<()> {
        if *self.field == *other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(Self::new(
            &self.field,
            self.exponent as i64 + other.exponent as i64,
        ))
    }

    /// χ̄ = χ^{-1}.
    pub fn conj(&self) -> Self {
        Self::new(&self.field, -(self.exponent as i64))
    }

    pub fn pow(&self, e: i64) -> Self {
        let q1 = self.field.order() as i64;
        Self::new(
            &self.field,
            (self.exponent as i64 * e.rem_euclid(q1)).rem_euclid(q1),
        )
    }

    /// Exponent of ζ_{q−1} in χ(x), or `None` at x = 0.
    #[inline]
    pub fn eval_exponent(&self, x: u32) -> Option<u32> {
        let l = self.field.log(x)?;
        let q1 = self.field.order() as u64;
        Some((l as u64 * self.exponent as u64 % q1) as u32)
    }

    /// χ(x) in Q(ζ_{q−1}).
    pub fn eval(&self, x: u32) -> CycloNumber {
        let n = self.field.order() as u64;
        match self.eval_exponent(x) {
            None => CycloNumber::zero(n),
            Some(e) => CycloNumber::root_of_unity(n, e as i64),
        }
    }

    pub fn eval_element(&self, x: &FieldElement) -> Result<CycloNumber> {
        if **x.field() != *self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(self.eval(x.value()))
    }

    /// χ(x) written over Q(ζ_o), o the order of χ.
    pub fn eval_reduced(&self, x: u32) -> CycloNumber {
        let o = self.order();
        let q1 = self.field.order() as u64;
        match self.eval_exponent(x) {
            None => CycloNumber::zero(o),
            Some(e) => CycloNumber::root_of_unity(o, (e as u64 / (q1 / o)) as i64),
        }
    }

    /// χ ∘ N_{k_r/k} as a character of k_r.
    pub fn norm_pullback(&self, tower: &TowerEmbedding) -> Result<Self> {
        if **tower.base() != *self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(MultChar {
            field: tower.ext().clone(),
            exponent: tower.pullback_exponent(self.exponent as i64) as u32,
        })
    }
}

/// δ(χ) as a free function.
pub fn delta(chi: &MultChar) -> u32 {
    chi.delta()
}

/// ψ_t(x) = ζ_p^{Tr(t x)}.
#[derive(Clone)]
pub struct AddChar {
    field: Arc<FqField>,
    twist: u32,
}

impl fmt::Debug for AddChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "psi_{} on F_{}", self.twist, self.field.q())
    }
}

impl AddChar {
    pub fn standard(field: &Arc<FqField>) -> Self {
        AddChar {
            field: field.clone(),
            twist: 1,
        }
    }

    pub fn twisted(field: &Arc<FqField>, twist: u32) -> Result<Self> {
        if twist == 0 || twist >= field.q() {
            return Err(Error::Invalid(format!("twist {twist} is not a unit")));
        }
        Ok(AddChar {
            field: field.clone(),
            twist,
        })
    }

    pub fn twist(&self) -> u32 {
        self.twist
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    /// Exponent of ζ_p in ψ(x).
    #[inline]
    pub fn eval_exponent(&self, x: u32) -> u32 {
        self.field.trace(self.field.mul(self.twist, x))
    }

    pub fn eval(&self, x: u32) -> CycloNumber {
        CycloNumber::root_of_unity(self.field.p() as u64, self.eval_exponent(x) as i64)
    }
}

/// Parses a character given as an exponent `k` or as `phi_d^m`.
pub fn parse_char(s: &str, q1: u64) -> Result<i64> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("phi_") {
        let (d, m) = match rest.split_once('^') {
            Some((d, m)) => (d, m),
            None => (rest, "1"),
        };
        let d: u64 = d
            .parse()
            .map_err(|_| Error::Invalid(format!("bad character {s}")))?;
        let m: i64 = m
            .parse()
            .map_err(|_| Error::Invalid(format!("bad character {s}")))?;
        if d == 0 || q1 % d != 0 {
            return Err(Error::NotDivisor { d, modulus: q1 });
        }
        return Ok((m * (q1 / d) as i64).rem_euclid(q1 as i64));
    }
    s.parse::<i64>()
        .map(|k| k.rem_euclid(q1 as i64))
        .map_err(|_| Error::Invalid(format!("bad character {s}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{extend, make_field};

    #[test]
    fn conventions() {
        let k = make_field(5, 1).unwrap();
        let eps = MultChar::trivial(&k);
        assert!((1..5).all(|x| eps.eval(x).is_one()));
        for e in 0..4 {
            assert!(MultChar::new(&k, e).eval(0).is_zero());
        }
        let quad = MultChar::of_exact_order(&k, 2).unwrap();
        assert!(quad.eval(4).is_one());
        assert_eq!(quad.eval(2), CycloNumber::from_int(4, -1));
        assert_eq!(eps.delta(), 1);
        assert_eq!(MultChar::generator(&k).delta(), 0);
        let chi = MultChar::new(&k, 3);
        assert_eq!(chi.mul(&chi.conj()).unwrap().delta(), 1);
        assert!(MultChar::of_exact_order(&k, 3).is_err());
        assert!(MultChar::of_exact_order(&k, 1).unwrap().is_trivial());
    }

    #[test]
    fn exact_orders() {
        for q in [5u64, 7, 13] {
            let k = make_field(q, 1).unwrap();
            for d in crate::arith::divisors(q - 1) {
                assert_eq!(MultChar::of_exact_order(&k, d).unwrap().order(), d);
            }
        }
    }

    #[test]
    fn orthogonality() {
        for (p, f) in [(5u64, 1u32), (7, 1), (3, 2)] {
            let k = make_field(p, f).unwrap();
            for e in 0..k.order() as i64 {
                let chi = MultChar::new(&k, e);
                let s = (1..k.q()).fold(CycloNumber::zero(k.order() as u64), |acc, x| {
                    acc + chi.eval(x)
                });
                let expect = if e == 0 { k.order() as i64 } else { 0 };
                assert_eq!(s, CycloNumber::from_int(1, expect));
            }
        }
    }

    #[test]
    fn power_residue_count() {
        let k = make_field(13, 1).unwrap();
        for d in [2u64, 3, 4, 6] {
            let phi_d = MultChar::of_exact_order(&k, d).unwrap();
            for t in 1..13 {
                let s = (0..d as i64).fold(CycloNumber::zero(12), |acc, i| {
                    acc + phi_d.pow(i).eval(t)
                });
                let is_power = (1..13).any(|y| k.pow(y, d) == t);
                assert_eq!(s, CycloNumber::from_int(1, if is_power { d as i64 } else { 0 }));
            }
        }
    }

    #[test]
    fn conjugate_is_inverse() {
        let k = make_field(7, 1).unwrap();
        let chi = MultChar::new(&k, 2);
        for x in 1..7 {
            assert_eq!(chi.conj().eval(x), chi.eval(x).invert().unwrap());
        }
    }

    #[test]
    fn additive_character() {
        let k = make_field(3, 2).unwrap();
        let psi = AddChar::standard(&k);
        assert!(psi.eval(0).is_one());
        for x in 0..9 {
            assert!((psi.eval(x) * psi.eval(k.neg(x))).is_one());
            for y in 0..9 {
                assert_eq!(psi.eval(k.add(x, y)), psi.eval(x) * psi.eval(y));
            }
        }
        let total = (0..9).fold(CycloNumber::zero(3), |acc, x| acc + psi.eval(x));
        assert!(total.is_zero());
    }

    #[test]
    fn pullback_along_norm() {
        let k = make_field(5, 1).unwrap();
        for r in [2u32, 3] {
            let t = extend(&k, r).unwrap();
            let ext = t.ext();
            assert!(MultChar::trivial(&k).norm_pullback(&t).unwrap().is_trivial());
            for e in 0..4 {
                let chi = MultChar::new(&k, e);
                let pulled = chi.norm_pullback(&t).unwrap();
                for y in 0..ext.q() {
                    assert_eq!(pulled.eval(y), chi.eval(t.norm(y)));
                }
                for x in 1..5 {
                    assert_eq!(pulled.eval(t.embed(x)), chi.eval(x).pow(r as i64).unwrap());
                }
            }
            let phi2 = MultChar::of_exact_order(&k, 2).unwrap().norm_pullback(&t).unwrap();
            assert!(phi2.pow(2).is_trivial());
        }
    }

    #[test]
    fn character_names() {
        assert_eq!(parse_char("phi_4^3", 12).unwrap(), 9);
        assert_eq!(parse_char("phi_2", 4).unwrap(), 2);
        assert_eq!(parse_char("-1", 6).unwrap(), 5);
        assert!(parse_char("phi_5^1", 12).is_err());
        assert!(parse_char("x", 12).is_err());
    }
}
