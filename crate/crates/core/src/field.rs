//! Finite fields F_{p^f} with full logarithm tables, and embeddings k ⊂ k_r.
//!
//! Elements are encoded as integers `Σ c_i p^i` where `c_0 + c_1 x + …` is the
//! residue modulo the defining polynomial. Zero is encoded as 0 and the
//! prime subfield as `0..p`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime, mod_inv};
use crate::error::{Error, Result};

/// Default upper bound on the field size q = p^f.
pub const DEFAULT_FIELD_BOUND: u64 = 2_000_000;

const NO_LOG: u32 = u32::MAX;

pub struct FqField {
    p: u32,
    f: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u32>,
}

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FqField")
            .field("p", &self.p)
            .field("f", &self.f)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .finish()
    }
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f
    }
}

impl Eq for FqField {}

/// JSON descriptor of a field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub f: u32,
    pub modulus: Vec<u32>,
    pub generator: u32,
}

fn field_cache() -> &'static RwLock<HashMap<(u32, u32), Arc<FqField>>> {
    static CACHE: OnceLock<RwLock<HashMap<(u32, u32), Arc<FqField>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// F_{p^f} under the default size bound.
pub fn make_field(p: u64, f: u32) -> Result<Arc<FqField>> {
    make_field_with_bound(p, f, DEFAULT_FIELD_BOUND)
}

/// F_{p^f}, refusing fields with more than `bound` elements.
///
/// Construction is deterministic and memoized per (p, f).
pub fn make_field_with_bound(p: u64, f: u32, bound: u64) -> Result<Arc<FqField>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if f == 0 {
        return Err(Error::Invalid("field degree must be positive".into()));
    }
    let size = (p as u128).checked_pow(f).unwrap_or(u128::MAX);
    if size > bound as u128 || size > u32::MAX as u128 / 2 {
        return Err(Error::FieldTooLarge { size, bound });
    }
    let key = (p as u32, f);
    if let Some(k) = field_cache().read().unwrap().get(&key) {
        return Ok(k.clone());
    }
    let field = Arc::new(FqField::build(p as u32, f));
    Ok(field_cache()
        .write()
        .unwrap()
        .entry(key)
        .or_insert(field)
        .clone())
}

fn digits(mut x: u32, p: u32, f: u32) -> Vec<u32> {
    let mut out = vec![0; f as usize];
    for d in out.iter_mut() {
        *d = x % p;
        x /= p;
    }
    out
}

fn encode(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Remainder of `a` modulo a monic polynomial `m` over F_p (low degree first).
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let deg = m.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let p64 = p as u64;
    for i in (deg..r.len()).rev() {
        let c = r[i] % p64;
        if c == 0 {
            continue;
        }
        for j in 0..deg {
            r[i - deg + j] = (r[i - deg + j] + (p64 - m[j] as u64) * c) % p64;
        }
        r[i] = 0;
    }
    r.truncate(deg);
    r.resize(deg, 0);
    r.into_iter().map(|c| (c % p64) as u32).collect()
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
    poly_rem(&prod, m, p)
}

fn poly_powmod(a: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
    let deg = m.len() - 1;
    let mut acc = vec![0u32; deg];
    acc[0] = 1;
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, m, p);
        }
        e >>= 1;
        if e > 0 {
            base = poly_mulmod(&base, &base, m, p);
        }
    }
    acc
}

/// Irreducibility by trial division with every monic polynomial of degree
/// at most half the degree.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let f = m.len() - 1;
    for k in 1..=f / 2 {
        let count = (p as u64).pow(k as u32);
        for idx in 0..count {
            let mut div = digits(idx as u32, p, k as u32);
            div.push(1);
            if poly_rem(m, &div, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FqField {
    fn build(p: u32, f: u32) -> FqField {
        let q = p.pow(f);
        // first monic irreducible, enumerating lower coefficients as an integer
        let modulus = (0..q)
            .map(|idx| {
                let mut m = digits(idx, p, f);
                m.push(1);
                m
            })
            .find(|m| is_irreducible(m, p))
            .expect("irreducible polynomials exist in every degree");
        let order = (q - 1) as u64;
        let primes: Vec<u64> = factorize(order).into_iter().map(|(l, _)| l).collect();
        let generator = (1..q)
            .find(|&cand| {
                let ds = digits(cand, p, f);
                primes.iter().all(|&l| {
                    let v = poly_powmod(&ds, order / l, &modulus, p);
                    !(v[0] == 1 && v[1..].iter().all(|&c| c == 0))
                })
            })
            .expect("the multiplicative group is cyclic");

        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut log = vec![NO_LOG; q as usize];
        let g = digits(generator, p, f);
        let x_is_gen = f > 1 && generator == p;
        let mut cur = digits(1, p, f);
        for j in 0..q - 1 {
            let enc = encode(&cur, p);
            assert_eq!(log[enc as usize], NO_LOG, "generator is not primitive");
            log[enc as usize] = j;
            exp.push(enc);
            cur = if x_is_gen {
                // multiply by x: shift then subtract the modulus
                let top = cur[f as usize - 1];
                let mut next = vec![0u32; f as usize];
                for i in (1..f as usize).rev() {
                    next[i] = cur[i - 1];
                }
                for (i, nx) in next.iter_mut().enumerate() {
                    *nx = (*nx + (p - modulus[i]) * top % p) % p;
                }
                next
            } else if f == 1 {
                vec![(cur[0] as u64 * generator as u64 % p as u64) as u32]
            } else {
                poly_mulmod(&cur, &g, &modulus, p)
            };
        }
        assert_eq!(encode(&cur, p), 1, "g^(q-1) must be 1");

        let mut field = FqField {
            p,
            f,
            q,
            modulus,
            generator,
            exp,
            log,
            trace: Vec::new(),
        };
        field.trace = field.trace_table();
        field
    }

    /// Tr is F_p-linear, so it is fixed by its values on 1, x, …, x^{f-1}.
    fn trace_table(&self) -> Vec<u32> {
        let (p, f) = (self.p, self.f);
        let basis: Vec<u32> = (0..f)
            .map(|i| {
                let x = p.pow(i);
                let mut acc = 0;
                let mut y = x;
                for _ in 0..f {
                    acc = self.add(acc, y);
                    y = self.pow(y, p as u64);
                }
                assert!(acc < p, "trace must lie in the prime field");
                acc
            })
            .collect();
        (0..self.q)
            .map(|x| {
                let ds = digits(x, p, f);
                let s: u64 = ds
                    .iter()
                    .zip(&basis)
                    .map(|(&c, &t)| c as u64 * t as u64)
                    .sum();
                (s % p as u64) as u32
            })
            .collect()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// q − 1, the order of the multiplicative group.
    pub fn order(&self) -> u32 {
        self.q - 1
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Encoded primitive element g.
    pub fn generator(&self) -> u32 {
        self.generator
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            f: self.f,
            modulus: self.modulus.clone(),
            generator: self.generator,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.f == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.f {
            let s = (a % self.p + b % self.p) % self.p;
            out += s * scale;
            scale *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.f == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.f {
            let c = a % self.p;
            out += ((self.p - c) % self.p) * scale;
            scale *= self.p;
            a /= self.p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(s % (self.q as u64 - 1)) as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::ZeroInverse(0));
        }
        let l = self.log[a as usize];
        Ok(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u128 * e as u128 % (self.q as u128 - 1);
        self.exp[l as usize]
    }

    /// g^j for any integer j.
    #[inline]
    pub fn exp(&self, j: i64) -> u32 {
        self.exp[j.rem_euclid(self.q as i64 - 1) as usize]
    }

    /// Discrete logarithm base g, as a value in [0, q−1).
    #[inline]
    pub fn dlog(&self, x: u32) -> Result<u32> {
        if x == 0 {
            return Err(Error::ZeroLog);
        }
        Ok(self.log[x as usize])
    }

    /// Discrete logarithm without the zero check; `None` at 0.
    #[inline]
    pub fn log(&self, x: u32) -> Option<u32> {
        match self.log[x as usize] {
            NO_LOG => None,
            l => Some(l),
        }
    }

    /// Tr_{F_q/F_p}(x) as an integer in [0, p).
    #[inline]
    pub fn trace(&self, x: u32) -> u32 {
        self.trace[x as usize]
    }

    /// The prime-field element `k mod p`.
    pub fn from_int(&self, k: i64) -> u32 {
        k.rem_euclid(self.p as i64) as u32
    }

    pub fn element(self: &Arc<Self>, value: u32) -> Result<FieldElement> {
        if value >= self.q {
            return Err(Error::Invalid(format!(
                "{value} does not encode an element of F_{}",
                self.q
            )));
        }
        Ok(FieldElement {
            field: self.clone(),
            value,
        })
    }
}

/// An element of a specific field.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<FqField>,
    value: u32,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in F_{}", self.value, self.field.q)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.value == other.value
    }
}

impl Eq for FieldElement {}

impl FieldElement {
    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    /// Coefficients of the residue polynomial, constant term first.
    pub fn coefficients(&self) -> Vec<u32> {
        digits(self.value, self.field.p, self.field.f)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same(&self, other: &Self) -> Result<()> {
        if *self.field == *other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn with(&self, value: u32) -> Self {
        FieldElement {
            field: self.field.clone(),
            value,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> Self {
        self.with(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.with(self.field.inv(self.value)?))
    }

    pub fn pow(&self, e: u64) -> Self {
        self.with(self.field.pow(self.value, e))
    }

    pub fn dlog(&self) -> Result<u32> {
        self.field.dlog(self.value)
    }

    pub fn trace_to_prime(&self) -> u32 {
        self.field.trace(self.value)
    }
}

/// An embedding of k = F_q into k_r = F_{q^r}, both with their own tables.
#[derive(Debug, Clone)]
pub struct TowerEmbedding {
    base: Arc<FqField>,
    ext: Arc<FqField>,
    r: u32,
    /// g ↦ G^{t (Q−1)/(q−1)}
    t: u64,
    t_inv: u64,
    cofactor: u64,
    image: Vec<u32>,
}

/// Builds k_r with the default size bound.
pub fn extend(base: &Arc<FqField>, r: u32) -> Result<TowerEmbedding> {
    extend_with_bound(base, r, DEFAULT_FIELD_BOUND)
}

pub fn extend_with_bound(base: &Arc<FqField>, r: u32, bound: u64) -> Result<TowerEmbedding> {
    if r == 0 {
        return Err(Error::Invalid("extension degree must be positive".into()));
    }
    let ext = make_field_with_bound(base.p as u64, base.f * r, bound)?;
    let q1 = base.order() as u64;
    let big1 = ext.order() as u64;
    let cofactor = big1 / q1;

    // minimal polynomial of g over F_p: ∏ (X − g^{p^i}) over the conjugates
    let mut conj = Vec::new();
    let mut y = base.generator;
    loop {
        conj.push(y);
        y = base.pow(y, base.p as u64);
        if y == base.generator {
            break;
        }
    }
    let mut minpoly = vec![1u32];
    for &c in &conj {
        let mut next = vec![0u32; minpoly.len() + 1];
        for (i, &m) in minpoly.iter().enumerate() {
            next[i + 1] = base.add(next[i + 1], m);
            next[i] = base.sub(next[i], base.mul(m, c));
        }
        minpoly = next;
    }
    assert!(minpoly.iter().all(|&c| c < base.p), "minimal polynomial over F_p");

    let t = (1..q1.max(2))
        .filter(|s| s.gcd(&q1) == 1)
        .find(|&s| {
            let h = ext.exp((s * cofactor) as i64);
            let mut acc = 0u32;
            for &c in minpoly.iter().rev() {
                acc = ext.add(ext.mul(acc, h), c);
            }
            acc == 0
        })
        .expect("some conjugate of the image generator is a root");
    let t_inv = mod_inv(t as i64, q1.max(1) as i64).unwrap_or(0) as u64;

    let mut image = vec![0u32; base.q as usize];
    for j in 0..q1 {
        image[base.exp[j as usize] as usize] = ext.exp((j * t % q1 * cofactor) as i64);
    }
    let emb = TowerEmbedding {
        base: base.clone(),
        ext,
        r,
        t,
        t_inv,
        cofactor,
        image,
    };
    for a in 0..base.q {
        let lhs = emb.embed(base.add(1, a));
        let rhs = emb.ext.add(1, emb.embed(a));
        assert_eq!(lhs, rhs, "embedding must be additive");
    }
    Ok(emb)
}

impl TowerEmbedding {
    pub fn base(&self) -> &Arc<FqField> {
        &self.base
    }

    pub fn ext(&self) -> &Arc<FqField> {
        &self.ext
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    /// The index t with ι(g) = G^{t (Q−1)/(q−1)}.
    pub fn twist_index(&self) -> u64 {
        self.t
    }

    #[inline]
    pub fn embed(&self, x: u32) -> u32 {
        self.image[x as usize]
    }

    /// log_g N(y) for y ≠ 0, computed from log_G y.
    #[inline]
    pub fn norm_log(&self, ext_log: u64) -> u64 {
        let q1 = self.base.order() as u64;
        (ext_log % q1) * self.t_inv % q1
    }

    /// N_{k_r/k}(y) = y^{(Q−1)/(q−1)} as a base-field element.
    pub fn norm(&self, y: u32) -> u32 {
        match self.ext.log(y) {
            None => 0,
            Some(l) => self.base.exp(self.norm_log(l as u64) as i64),
        }
    }

    /// Preimage of an element of the embedded base field.
    pub fn restrict(&self, y: u32) -> Option<u32> {
        let l = match self.ext.log(y) {
            None => return Some(0),
            Some(l) => l as u64,
        };
        if l % self.cofactor != 0 {
            return None;
        }
        let q1 = self.base.order() as u64;
        Some(self.base.exp(((l / self.cofactor) % q1 * self.t_inv % q1) as i64))
    }

    /// Exponent E with φ^k ∘ N = Φ^E, where Φ(G^i) = ζ_{Q−1}^i on k_r.
    pub fn pullback_exponent(&self, k: i64) -> u64 {
        let q1 = self.base.order() as i64;
        let big1 = self.ext.order() as u64;
        let k = k.rem_euclid(q1.max(1)) as u64;
        (k * self.t_inv % q1.max(1) as u64) * self.cofactor % big1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_generators() {
        assert_eq!(make_field(5, 1).unwrap().generator(), 2);
        assert_eq!(make_field(7, 1).unwrap().generator(), 3);
        assert_eq!(make_field(13, 1).unwrap().generator(), 2);
        let f9 = make_field(3, 2).unwrap();
        assert_eq!(f9.q(), 9);
        assert_eq!(f9.pow(f9.generator(), 8), 1);
        assert!((1..8).all(|k| f9.pow(f9.generator(), k) != 1));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(make_field(6, 1).unwrap_err(), Error::NotPrime(6));
        assert!(matches!(
            make_field(2, 40),
            Err(Error::FieldTooLarge { .. })
        ));
    }

    #[test]
    fn arithmetic_basics() {
        let k = make_field(7, 1).unwrap();
        for a in 1..7 {
            assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
        }
        assert!(k.inv(0).is_err());
        assert_eq!(k.dlog(1).unwrap(), 0);
        assert_eq!(k.dlog(k.generator()).unwrap(), 1);
        assert_eq!(k.dlog(k.exp(5)).unwrap(), 5);
        assert_eq!(k.dlog(0), Err(Error::ZeroLog));
    }

    #[test]
    fn trace_is_linear() {
        let k = make_field(3, 2).unwrap();
        assert_eq!(k.trace(0), 0);
        for x in 0..9 {
            for y in 0..9 {
                assert_eq!(k.trace(k.add(x, y)), (k.trace(x) + k.trace(y)) % 3);
            }
        }
        let k5 = make_field(5, 1).unwrap();
        assert!((0..5).all(|x| k5.trace(x) == x));
    }

    #[test]
    fn ring_laws_in_extension() {
        let k = make_field(2, 4).unwrap();
        for a in 0..16 {
            for b in 0..16 {
                for c in [0, 1, 7, 13] {
                    let lhs = k.mul(a, k.add(b, c));
                    let rhs = k.add(k.mul(a, b), k.mul(a, c));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_base() {
        for (p, f) in [(5u64, 1u32), (7, 1), (3, 2), (13, 1)] {
            let k = make_field(p, f).unwrap();
            for r in 1..=3 {
                let Ok(t) = extend(&k, r) else { continue };
                let ext = t.ext();
                let fixed = ext
                    .elements()
                    .filter(|&x| ext.pow(x, k.q() as u64) == x)
                    .count();
                assert_eq!(fixed as u32, k.q());
            }
        }
    }

    #[test]
    fn norm_of_embedded_is_power() {
        let k = make_field(5, 1).unwrap();
        let t = extend(&k, 2).unwrap();
        let ext = t.ext();
        assert_eq!(ext.pow(t.embed(k.generator()), 4), 1);
        assert_ne!(ext.pow(t.embed(k.generator()), 2), 1);
        for x in 0..5 {
            assert_eq!(t.norm(t.embed(x)), k.pow(x, 2));
            assert_eq!(t.restrict(t.embed(x)), Some(x));
        }
        let q1 = ext.order() as u64 / 4;
        for y in ext.elements() {
            assert_eq!(t.embed(t.norm(y)), ext.pow(y, q1));
            for z in [1, 3, 17, 24] {
                assert_eq!(t.norm(ext.mul(y, z)), k.mul(t.norm(y), t.norm(z)));
            }
        }
        assert_eq!(t.norm(0), 0);
        assert_eq!(t.norm(1), 1);
    }

    #[test]
    fn trivial_extension_is_identity() {
        let k = make_field(5, 1).unwrap();
        let t = extend(&k, 1).unwrap();
        assert!((0..5).all(|x| t.embed(x) == x));
    }

    #[test]
    fn power_map_images() {
        for q in [5u64, 7, 13] {
            let k = make_field(q, 1).unwrap();
            for d in crate::arith::divisors(q - 1) {
                let img: std::collections::HashSet<u32> =
                    (1..q as u32).map(|x| k.pow(x, d)).collect();
                assert_eq!(img.len() as u64, (q - 1) / d);
            }
        }
    }

    #[test]
    fn deterministic_descriptor() {
        let a = FqField::build(3, 3);
        let b = FqField::build(3, 3);
        assert_eq!(a.descriptor(), b.descriptor());
        assert_eq!(a.exp, b.exp);
        let json = serde_json::to_string(&a.descriptor()).unwrap();
        assert!(json.starts_with(r#"{"p":3,"f":3,"modulus":["#));
    }
}
