//! Exact arithmetic in cyclotomic fields Q(ζ_n).
//!
//! An element is stored on the power basis `1, ζ_n, …, ζ_n^{φ(n)-1}` after
//! reduction modulo the n-th cyclotomic polynomial Φ_n, as an integer
//! coefficient vector over one common positive denominator. The pair is kept
//! in lowest terms, so two elements of the same order are equal exactly when
//! their stored vectors are equal. Elements of different orders are compared
//! and combined after lifting both to the lcm of the orders.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{divisors, mobius, unit_group_basis};
use crate::error::{Error, Result};

/// Arbitrary precision rational number, always in lowest terms.
pub type Rational = BigRational;

/// Φ_n = x^φ + Σ low[j].1 · x^{low[j].0}
struct CycloPoly {
    n: u64,
    phi: usize,
    low: Vec<(usize, i64)>,
}

fn cyclo_cache() -> &'static RwLock<HashMap<u64, Arc<CycloPoly>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<CycloPoly>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn cyclo(n: u64) -> Arc<CycloPoly> {
    if let Some(c) = cyclo_cache().read().unwrap().get(&n) {
        return c.clone();
    }
    let dense = cyclotomic_polynomial(n);
    let phi = dense.len() - 1;
    let low = dense[..phi]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| (j, c))
        .collect();
    let poly = Arc::new(CycloPoly { n, phi, low });
    cyclo_cache()
        .write()
        .unwrap()
        .entry(n)
        .or_insert(poly)
        .clone()
}

/// Dense integer coefficients of Φ_n, constant term first.
///
/// Uses Φ_n(x) = ∏_{d | n} (x^d − 1)^{μ(n/d)}: all multiplications first,
/// then exact divisions by binomials.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    assert!(n >= 1);
    let mut poly = vec![1i64];
    let ds = divisors(n);
    for &d in &ds {
        if mobius(n / d) == 1 {
            let d = d as usize;
            let mut next = vec![0i64; poly.len() + d];
            for (i, &c) in poly.iter().enumerate() {
                next[i + d] += c;
                next[i] -= c;
            }
            poly = next;
        }
    }
    for &d in &ds {
        if mobius(n / d) == -1 {
            let d = d as usize;
            let deg = poly.len() - 1;
            let mut quot = vec![0i64; deg + 1 - d];
            for j in (d..=deg).rev() {
                let carry = if j <= deg - d { quot[j] } else { 0 };
                quot[j - d] = poly[j] + carry;
            }
            poly = quot;
        }
    }
    poly
}

/// Reduces an integer vector (coefficients of powers of ζ_n) to the
/// canonical basis: fold modulo x^n − 1, then divide by Φ_n.
fn reduce(mut v: Vec<BigInt>, cy: &CycloPoly) -> Vec<BigInt> {
    let n = cy.n as usize;
    if v.len() > n {
        for i in n..v.len() {
            let c = std::mem::take(&mut v[i]);
            if !c.is_zero() {
                v[i % n] += c;
            }
        }
        v.truncate(n);
    }
    let phi = cy.phi;
    for e in (phi..v.len()).rev() {
        let c = std::mem::take(&mut v[e]);
        if c.is_zero() {
            continue;
        }
        for &(j, cj) in &cy.low {
            v[e - phi + j] -= &c * cj;
        }
    }
    v.resize(phi, BigInt::zero());
    v
}

const SMALL: u64 = 1 << 40;

fn small_coeffs(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter()
        .map(|c| c.to_i64().filter(|x| x.unsigned_abs() < SMALL))
        .collect()
}

/// Product and reduction in i128, or `None` if an intermediate overflows.
fn mul_small(a: &[i64], b: &[i64], cy: &CycloPoly) -> Option<Vec<BigInt>> {
    let mut v = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            v[i + j] += x as i128 * y as i128;
        }
    }
    let n = cy.n as usize;
    if v.len() > n {
        for i in n..v.len() {
            let c = std::mem::take(&mut v[i]);
            v[i % n] = v[i % n].checked_add(c)?;
        }
        v.truncate(n);
    }
    let phi = cy.phi;
    for e in (phi..v.len()).rev() {
        let c = std::mem::take(&mut v[e]);
        if c == 0 {
            continue;
        }
        for &(j, cj) in &cy.low {
            let t = c.checked_mul(cj as i128)?;
            v[e - phi + j] = v[e - phi + j].checked_sub(t)?;
        }
    }
    v.resize(phi, 0);
    Some(v.into_iter().map(BigInt::from).collect())
}

/// Exact element of Q(ζ_n) in canonical form.
#[derive(Clone, Debug)]
pub struct CycloNumber {
    order: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycloNumber {
    fn from_parts(order: u64, num: Vec<BigInt>, den: BigInt) -> Self {
        let mut x = CycloNumber { order, num, den };
        x.normalize();
        x
    }

    /// Builds `(Σ num[i] ζ_n^i) / den` from an integer vector of any length.
    pub fn from_int_vec(order: u64, num: Vec<BigInt>, den: BigInt) -> Self {
        assert!(order >= 1 && !den.is_zero());
        let cy = cyclo(order);
        Self::from_parts(order, reduce(num, &cy), den)
    }

    /// Builds `Σ coeffs[i] ζ_n^i` from rational coefficients of any length.
    pub fn from_rationals(order: u64, coeffs: &[Rational]) -> Self {
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Self::from_int_vec(order, num, den)
    }

    /// `Σ_k counts[k] ζ_n^k` for a histogram of exponents.
    pub fn from_root_counts(order: u64, counts: &[i64]) -> Self {
        let num = counts.iter().map(|&c| BigInt::from(c)).collect();
        Self::from_int_vec(order, num, BigInt::one())
    }

    pub fn zero(order: u64) -> Self {
        let phi = cyclo(order).phi;
        CycloNumber {
            order,
            num: vec![BigInt::zero(); phi],
            den: BigInt::one(),
        }
    }

    pub fn one(order: u64) -> Self {
        Self::from_int(order, 1)
    }

    pub fn from_int(order: u64, k: i64) -> Self {
        Self::from_bigint(order, BigInt::from(k))
    }

    pub fn from_bigint(order: u64, k: BigInt) -> Self {
        let mut x = Self::zero(order);
        x.num[0] = k;
        x
    }

    pub fn from_rational(order: u64, r: &Rational) -> Self {
        let mut x = Self::zero(order);
        x.num[0] = r.numer().clone();
        x.den = r.denom().clone();
        x.normalize();
        x
    }

    /// ζ_n^{k mod n}.
    pub fn root_of_unity(order: u64, k: i64) -> Self {
        assert!(order >= 1);
        let e = k.rem_euclid(order as i64) as usize;
        let mut v = vec![BigInt::zero(); e + 1];
        v[e] = BigInt::one();
        Self::from_int_vec(order, v, BigInt::one())
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Canonical rational coefficients on `1, ζ_n, …, ζ_n^{φ(n)-1}`.
    pub fn coeffs(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|c| Rational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.try_rational().is_some_and(|r| r.is_one())
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in self.num.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            for c in self.num.iter_mut() {
                *c /= &g;
            }
            self.den /= &g;
        }
    }

    /// Image under ζ_m ↦ ζ_n^{n/m}; requires `m | n`.
    pub fn embed(&self, n: u64) -> Result<Self> {
        if n == 0 || n % self.order != 0 {
            return Err(Error::BadEmbedding {
                from: self.order,
                to: n,
            });
        }
        Ok(self.lift(n))
    }

    fn lift(&self, n: u64) -> Self {
        if n == self.order {
            return self.clone();
        }
        let k = (n / self.order) as usize;
        let mut v = vec![BigInt::zero(); (self.num.len() - 1) * k + 1];
        for (i, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                v[i * k] = c.clone();
            }
        }
        let cy = cyclo(n);
        // already in lowest terms: the embedding is injective and Z-linear
        CycloNumber {
            order: n,
            num: reduce(v, &cy),
            den: self.den.clone(),
        }
    }

    fn aligned<'a>(
        a: &'a Self,
        b: &'a Self,
    ) -> (std::borrow::Cow<'a, Self>, std::borrow::Cow<'a, Self>) {
        use std::borrow::Cow;
        if a.order == b.order {
            (Cow::Borrowed(a), Cow::Borrowed(b))
        } else {
            let n = a.order.lcm(&b.order);
            (Cow::Owned(a.lift(n)), Cow::Owned(b.lift(n)))
        }
    }

    /// Rational value if every non-constant coefficient vanishes.
    pub fn try_rational(&self) -> Option<Rational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(Rational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn is_rational(&self) -> bool {
        self.num[1..].iter().all(Zero::is_zero)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let num = self.num.iter().map(|c| c * r.numer()).collect();
        Self::from_parts(self.order, num, &self.den * r.denom())
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let num = self.num.iter().map(|c| c * k).collect();
        Self::from_parts(self.order, num, self.den.clone())
    }

    /// Multiplication by ζ_n^k.
    pub fn mul_root(&self, k: i64) -> Self {
        let n = self.order as usize;
        let k = k.rem_euclid(n as i64) as usize;
        if k == 0 {
            return self.clone();
        }
        let mut v = vec![BigInt::zero(); n];
        for (i, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                v[(i + k) % n] = c.clone();
            }
        }
        let cy = cyclo(self.order);
        CycloNumber {
            order: self.order,
            num: reduce(v, &cy),
            den: self.den.clone(),
        }
    }

    /// Galois automorphism ζ_n ↦ ζ_n^u, gcd(u, n) = 1.
    pub fn galois(&self, u: u64) -> Self {
        let n = self.order as usize;
        let u = (u % self.order) as usize;
        if u == 1 || n <= 2 {
            return self.clone();
        }
        let mut v = vec![BigInt::zero(); n];
        for (i, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                v[i * u % n] = c.clone();
            }
        }
        let cy = cyclo(self.order);
        CycloNumber {
            order: self.order,
            num: reduce(v, &cy),
            den: self.den.clone(),
        }
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        self.galois(self.order - 1)
    }

    /// Multiplicative inverse.
    ///
    /// Uses x⁻¹ = (∏_{σ≠1} σ(x)) / N(x), with the product over the Galois
    /// group assembled along a cyclic decomposition of (Z/n)^×.
    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse(self.order));
        }
        if let Some(r) = self.try_rational() {
            return Ok(Self::from_rational(self.order, &r.recip()));
        }
        let n = self.order;
        let mut z = self.clone();
        let mut cof = Self::one(n);
        for (u, o) in unit_group_basis(n) {
            let t = conjugate_product(&z, u, o - 1);
            let c = t.galois(u);
            z = &z * &c;
            cof = &cof * &c;
        }
        let norm = z
            .try_rational()
            .expect("the norm of a cyclotomic number is rational");
        Ok(cof.scale(&norm.recip()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.invert()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.order);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Approximate value at ζ_n = exp(2πi/n).
    ///
    /// Evaluation is in double precision, so the absolute error is about
    /// 1e-16 times the sum of the coefficient magnitudes; requests beyond
    /// 15 significant digits are served at that accuracy.
    pub fn complex_value(&self, precision: u32) -> Complex64 {
        let _ = precision;
        let n = self.order as f64;
        let den = bigint_to_f64(&self.den);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (s, co) = (std::f64::consts::TAU * i as f64 / n).sin_cos();
            let root = if i == 0 {
                Complex64::new(1.0, 0.0)
            } else if 4 * i == self.order as usize {
                Complex64::new(0.0, 1.0)
            } else if 2 * i == self.order as usize {
                Complex64::new(-1.0, 0.0)
            } else if 4 * i == 3 * self.order as usize {
                Complex64::new(0.0, -1.0)
            } else {
                Complex64::new(co, s)
            };
            acc += root * bigint_to_f64(c);
        }
        acc / den
    }

    /// The same number as an element of Q(ζ_m), if it lies in that subfield.
    pub fn descend(&self, m: u64) -> Option<Self> {
        if m == self.order {
            return Some(self.clone());
        }
        if m == 0 || self.order % m != 0 {
            return None;
        }
        if self.is_rational() {
            return Some(Self::from_rational(m, &self.try_rational().unwrap()));
        }
        let proj = projector(self.order, m);
        let phi_m = proj.inverse.len();
        let mut coeffs = vec![Rational::zero(); phi_m];
        for (i, row) in proj.inverse.iter().enumerate() {
            let mut acc = Rational::zero();
            for (k, &p) in proj.pivots.iter().enumerate() {
                if !row[k].is_zero() && !self.num[p].is_zero() {
                    acc += &row[k] * Rational::from_integer(self.num[p].clone());
                }
            }
            coeffs[i] = acc / Rational::from_integer(self.den.clone());
        }
        let y = Self::from_rationals(m, &coeffs);
        if y.lift(self.order) == *self {
            Some(y)
        } else {
            None
        }
    }

    pub fn lies_in(&self, m: u64) -> bool {
        self.descend(m).is_some()
    }

    /// Representation at the smallest order whose field contains this number.
    pub fn minimal_order(&self) -> Self {
        for m in divisors(self.order) {
            if let Some(y) = self.descend(m) {
                return y;
            }
        }
        self.clone()
    }
}

/// ∏_{j=0}^{k-1} σ_u^j(z), by a binary addition chain on k.
fn conjugate_product(z: &CycloNumber, u: u64, k: u64) -> CycloNumber {
    let n = z.order;
    if k == 0 {
        return CycloNumber::one(n);
    }
    let mut acc = z.clone();
    let mut a = 1u64;
    let top = 63 - k.leading_zeros();
    for bit in (0..top).rev() {
        let ua = crate::arith::mod_pow(u, a, n);
        acc = &acc * &acc.galois(ua);
        a *= 2;
        if (k >> bit) & 1 == 1 {
            let ua = crate::arith::mod_pow(u, a, n);
            acc = &acc * &z.galois(ua);
            a += 1;
        }
    }
    debug_assert_eq!(a, k);
    acc
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Left inverse of the embedding Q(ζ_m) → Q(ζ_n) restricted to pivot rows.
struct Projector {
    pivots: Vec<usize>,
    inverse: Vec<Vec<Rational>>,
}

fn projector(n: u64, m: u64) -> Arc<Projector> {
    type Cache = RwLock<HashMap<(u64, u64), Arc<Projector>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.read().unwrap().get(&(n, m)) {
        return p.clone();
    }
    let phi_m = cyclo(m).phi;
    let phi_n = cyclo(n).phi;
    // columns: images of ζ_m^j
    let cols: Vec<Vec<Rational>> = (0..phi_m)
        .map(|j| {
            CycloNumber::root_of_unity(m, j as i64)
                .lift(n)
                .coeffs()
        })
        .collect();
    // row-reduce the transpose to find independent rows of the embedding
    let mut work: Vec<Vec<Rational>> = cols.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..phi_n {
        if row == phi_m {
            break;
        }
        let Some(r) = (row..phi_m).find(|&r| !work[r][c].is_zero()) else {
            continue;
        };
        work.swap(row, r);
        let inv = work[row][c].recip();
        for x in work[row].iter_mut() {
            *x *= &inv;
        }
        for r2 in 0..phi_m {
            if r2 != row && !work[r2][c].is_zero() {
                let f = work[r2][c].clone();
                for k in 0..phi_n {
                    let t = &work[row][k] * &f;
                    work[r2][k] -= t;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    assert_eq!(pivots.len(), phi_m, "embedding must be injective");
    // square system A[k][j] = cols[j][pivots[k]]; invert by Gauss-Jordan
    let mut a: Vec<Vec<Rational>> = pivots
        .iter()
        .map(|&p| (0..phi_m).map(|j| cols[j][p].clone()).collect())
        .collect();
    let mut inv: Vec<Vec<Rational>> = (0..phi_m)
        .map(|i| {
            (0..phi_m)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    for c in 0..phi_m {
        let r = (c..phi_m).find(|&r| !a[r][c].is_zero()).unwrap();
        a.swap(c, r);
        inv.swap(c, r);
        let f = a[c][c].recip();
        for k in 0..phi_m {
            a[c][k] *= &f;
            inv[c][k] *= &f;
        }
        for r2 in 0..phi_m {
            if r2 != c && !a[r2][c].is_zero() {
                let g = a[r2][c].clone();
                for k in 0..phi_m {
                    let t = &a[c][k] * &g;
                    a[r2][k] -= t;
                    let t = &inv[c][k] * &g;
                    inv[r2][k] -= t;
                }
            }
        }
    }
    let proj = Arc::new(Projector {
        pivots,
        inverse: inv,
    });
    cache.write().unwrap().insert((n, m), proj.clone());
    proj
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::aligned(self, other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for CycloNumber {}

impl<'a> Add<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: &CycloNumber) -> CycloNumber {
        let (a, b) = CycloNumber::aligned(self, rhs);
        if a.den == b.den {
            let num = a.num.iter().zip(&b.num).map(|(x, y)| x + y).collect();
            CycloNumber::from_parts(a.order, num, a.den.clone())
        } else {
            let num = a
                .num
                .iter()
                .zip(&b.num)
                .map(|(x, y)| x * &b.den + y * &a.den)
                .collect();
            CycloNumber::from_parts(a.order, num, &a.den * &b.den)
        }
    }
}

impl<'a> Sub<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: &CycloNumber) -> CycloNumber {
        self + &(-rhs)
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber {
            order: self.order,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl Neg for CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        -&self
    }
}

impl<'a> Mul<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn mul(self, rhs: &CycloNumber) -> CycloNumber {
        let (a, b) = CycloNumber::aligned(self, rhs);
        if b.is_rational() {
            let s = &b.num[0];
            let num = a.num.iter().map(|c| c * s).collect();
            return CycloNumber::from_parts(a.order, num, &a.den * &b.den);
        }
        if a.is_rational() {
            let s = &a.num[0];
            let num = b.num.iter().map(|c| c * s).collect();
            return CycloNumber::from_parts(a.order, num, &a.den * &b.den);
        }
        let cy = cyclo(a.order);
        if let (Some(x), Some(y)) = (small_coeffs(&a.num), small_coeffs(&b.num)) {
            if let Some(v) = mul_small(&x, &y, &cy) {
                return CycloNumber::from_parts(a.order, v, &a.den * &b.den);
            }
        }
        let len = a.num.len() + b.num.len() - 1;
        let mut v = vec![BigInt::zero(); len];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                if !y.is_zero() {
                    v[i + j] += x * y;
                }
            }
        }
        CycloNumber::from_parts(a.order, reduce(v, &cy), &a.den * &b.den)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: CycloNumber) -> CycloNumber {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: &CycloNumber) -> CycloNumber {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<CycloNumber> for &'a CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: CycloNumber) -> CycloNumber {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&CycloNumber> for CycloNumber {
    fn add_assign(&mut self, rhs: &CycloNumber) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&CycloNumber> for CycloNumber {
    fn sub_assign(&mut self, rhs: &CycloNumber) {
        *self = &*self - rhs;
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => write!(f, "z{}^{}", self.order, i)?,
                _ => write!(f, "{mag}*z{}^{}", self.order, i)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CycloRepr {
    order: u64,
    coeffs: Vec<String>,
}

impl Serialize for CycloNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloRepr {
            order: self.order,
            coeffs: self
                .coeffs()
                .iter()
                .map(|c| format!("{}/{}", c.numer(), c.denom()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = CycloRepr::deserialize(d)?;
        if repr.order == 0 {
            return Err(D::Error::custom("order must be positive"));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| D::Error::custom(format!("bad rational {s}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(CycloNumber::from_rationals(repr.order, &coeffs))
    }
}

/// Parses `"a/b"` or `"a"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.trim().parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64, k: i64) -> CycloNumber {
        CycloNumber::root_of_unity(n, k)
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(5), vec![1; 5]);
        // the classical first non-unit coefficient
        assert!(cyclotomic_polynomial(105).contains(&-2));
        assert_eq!(cyclotomic_polynomial(156).len() - 1, 48);
    }

    #[test]
    fn root_of_unity_basics() {
        assert!(z(1, 0).is_one());
        assert_eq!(&z(4, 1) * &z(4, 1), CycloNumber::from_int(4, -1));
        assert_eq!(z(3, 1).embed(6).unwrap(), z(6, 2));
        assert_eq!(z(3, 1), z(6, 2));
        assert_eq!(z(7, -1), z(7, 6));
    }

    #[test]
    fn phi_relation() {
        let s = (0..4).fold(CycloNumber::zero(5), |acc, k| acc + z(5, k));
        assert_eq!(s, -z(5, 4));
        let t = (1..7).fold(CycloNumber::zero(7), |acc, k| acc + z(7, k));
        assert_eq!(t.try_rational(), Some(Rational::from_integer((-1).into())));
        assert_eq!(z(7, 1).try_rational(), None);
        assert_eq!(z(7, 0).try_rational(), Some(Rational::one()));
    }

    #[test]
    fn inversion() {
        assert_eq!(z(5, 1).invert().unwrap(), z(5, 4));
        assert!(CycloNumber::zero(5).invert().is_err());
        let x = &z(12, 1) + &CycloNumber::from_int(12, 3);
        assert!((&x * &x.invert().unwrap()).is_one());
        let y = &(&z(156, 5) + &z(156, 17)) - &CycloNumber::from_int(156, 2);
        assert!((&y * &y.invert().unwrap()).is_one());
    }

    #[test]
    fn embedding_errors_and_values() {
        assert!(z(4, 1).embed(6).is_err());
        assert_eq!(z(2, 1).embed(6).unwrap(), CycloNumber::from_int(6, -1));
        assert_eq!(z(2, 1).embed(6).unwrap(), z(6, 3));
    }

    #[test]
    fn complex_values() {
        let v = z(8, 1).complex_value(15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v.re - h).abs() < 1e-12 && (v.im - h).abs() < 1e-12);
        let m = CycloNumber::from_int(9, -1).complex_value(15);
        assert_eq!(m.re, -1.0);
        assert_eq!(m.im, 0.0);
    }

    #[test]
    fn descend_subfields() {
        let a = &z(12, 1) + &z(12, 5);
        let big = a.embed(156).unwrap();
        assert_eq!(big.descend(12).unwrap(), a);
        assert!(z(156, 1).descend(12).is_none());
        assert_eq!(z(12, 4).minimal_order().order(), 3);
        // sqrt(-3) = ζ_3 - ζ_3^2 lies in Q(ζ_3) but not in Q
        let s = &z(3, 1) - &z(3, 2);
        assert!(s.embed(12).unwrap().lies_in(3));
        assert!(!s.lies_in(1));
    }

    #[test]
    fn json_format() {
        let x = &z(4, 1).scale(&Rational::new(3.into(), 2.into())) - &CycloNumber::from_int(4, 1);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"order":4,"coeffs":["-1/1","3/2"]}"#);
        let back: CycloNumber = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
