//! Gauss sums, Jacobi sums and the Pochhammer analogues.
//!
//! A [`GaussTable`] holds g(φ^k) for one field and one additive character.
//! Everything downstream is assembled from its entries. Quotients that are
//! invariant under ζ_p ↦ ζ_p^c (the "balanced" ratios below) are descended
//! to Q(ζ_{q−1}), which keeps the hypergeometric sums small.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use crate::character::MultChar;
use crate::cyclotomic::{CycloNumber, Rational};
use crate::error::{Error, Result};
use crate::field::FqField;

type RowKey = (u32, u32, bool);

pub struct GaussTable {
    field: Arc<FqField>,
    twist: u32,
    order: u64,
    values: Vec<CycloNumber>,
    inverses: OnceLock<Vec<CycloNumber>>,
    rows: RwLock<HashMap<RowKey, Arc<Vec<CycloNumber>>>>,
    beta_rows: RwLock<HashMap<(u32, bool), Arc<Vec<CycloNumber>>>>,
}

impl std::fmt::Debug for GaussTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GaussTable")
            .field("q", &self.field.q())
            .field("twist", &self.twist)
            .finish()
    }
}

fn table_cache() -> &'static RwLock<HashMap<(u32, u32, u32), Arc<GaussTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<(u32, u32, u32), Arc<GaussTable>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The shared table for ψ(x) = ζ_p^{Tr(x)}.
pub fn gauss_table(field: &Arc<FqField>) -> Arc<GaussTable> {
    gauss_table_twisted(field, 1).expect("1 is a unit")
}

/// The shared table for ψ_t(x) = ζ_p^{Tr(t x)}.
pub fn gauss_table_twisted(field: &Arc<FqField>, twist: u32) -> Result<Arc<GaussTable>> {
    if twist == 0 || twist >= field.q() {
        return Err(Error::Invalid(format!("twist {twist} is not a unit")));
    }
    let key = (field.p(), field.degree(), twist);
    if let Some(t) = table_cache().read().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let table = Arc::new(GaussTable::build(field, twist));
    Ok(table_cache()
        .write()
        .unwrap()
        .entry(key)
        .or_insert(table)
        .clone())
}

impl GaussTable {
    fn build(field: &Arc<FqField>, twist: u32) -> GaussTable {
        let p = field.p() as u64;
        let q1 = field.order() as u64;
        let n = p * q1;
        // ψ(g^j) φ^k(g^j) = ζ_N^{(q−1) Tr(t g^j) + p k j}
        let traces: Vec<u64> = (0..q1)
            .map(|j| field.trace(field.mul(twist, field.exp(j as i64))) as u64)
            .collect();
        let values = (0..q1)
            .map(|k| {
                let mut counts = vec![0i64; n as usize];
                for (j, &tr) in traces.iter().enumerate() {
                    let e = (q1 * tr + p * (k * j as u64 % q1)) % n;
                    counts[e as usize] -= 1;
                }
                CycloNumber::from_root_counts(n, &counts)
            })
            .collect();
        GaussTable {
            field: field.clone(),
            twist,
            order: n,
            values,
            inverses: OnceLock::new(),
            rows: RwLock::new(HashMap::new()),
            beta_rows: RwLock::new(HashMap::new()),
        }
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    pub fn twist(&self) -> u32 {
        self.twist
    }

    /// p(q−1), the cyclotomic order of the entries.
    pub fn value_order(&self) -> u64 {
        self.order
    }

    fn q1(&self) -> i64 {
        self.field.order() as i64
    }

    fn idx(&self, k: i64) -> usize {
        k.rem_euclid(self.q1()) as usize
    }

    fn q_factor(&self, k: i64) -> Option<Rational> {
        (self.idx(k) == 0).then(|| Rational::from_integer(BigInt::from(self.field.q())))
    }

    /// g(φ^k).
    pub fn g(&self, k: i64) -> &CycloNumber {
        &self.values[self.idx(k)]
    }

    /// g°(φ^k) = q^{δ} g(φ^k).
    pub fn g_circ(&self, k: i64) -> CycloNumber {
        match self.q_factor(k) {
            Some(q) => self.g(k).scale(&q),
            None => self.g(k).clone(),
        }
    }

    fn inverses(&self) -> &[CycloNumber] {
        self.inverses.get_or_init(|| {
            use rayon::prelude::*;
            self.values
                .par_iter()
                .map(|v| v.invert().expect("Gauss sums never vanish"))
                .collect()
        })
    }

    /// g(φ^k)^{-1}.
    pub fn g_inv(&self, k: i64) -> &CycloNumber {
        &self.inverses()[self.idx(k)]
    }

    /// g°(φ^k)^{-1}.
    pub fn g_circ_inv(&self, k: i64) -> CycloNumber {
        match self.q_factor(k) {
            Some(q) => self.g_inv(k).scale(&q.recip()),
            None => self.g_inv(k).clone(),
        }
    }

    /// (α)_ν = g(αν)/g(α).
    pub fn poch(&self, a: i64, nu: i64) -> CycloNumber {
        self.g(a + nu) * self.g_inv(a)
    }

    /// (α)°_ν = g°(αν)/g°(α).
    pub fn poch_circ(&self, a: i64, nu: i64) -> CycloNumber {
        self.g_circ(a + nu) * self.g_circ_inv(a)
    }

    fn to_base(&self, x: CycloNumber) -> CycloNumber {
        x.descend(self.field.order() as u64)
            .expect("balanced Gauss-sum quotients lie in Q(zeta_{q-1})")
    }

    /// Row ν ↦ (α)_ν / (β)°_ν (or (α)°_ν / (β)°_ν when `circ`), in Q(ζ_{q−1}).
    pub fn ratio_row(&self, a: i64, b: i64, circ: bool) -> Arc<Vec<CycloNumber>> {
        let key = (self.idx(a) as u32, self.idx(b) as u32, circ);
        if let Some(r) = self.rows.read().unwrap().get(&key) {
            return r.clone();
        }
        use rayon::prelude::*;
        let fixed = if circ {
            self.g_circ_inv(a) * self.g_circ(b)
        } else {
            self.g_inv(a) * self.g_circ(b)
        };
        let row: Vec<CycloNumber> = (0..self.q1())
            .into_par_iter()
            .map(|nu| {
                let top = if circ {
                    self.g_circ(a + nu)
                } else {
                    self.g(a + nu).clone()
                };
                self.to_base(&(&top * &fixed) * &self.g_circ_inv(b + nu))
            })
            .collect();
        let row = Arc::new(row);
        self.rows.write().unwrap().insert(key, row.clone());
        row
    }

    /// (α)_ν / (β)°_ν in Q(ζ_{q−1}).
    pub fn ratio(&self, a: i64, b: i64, nu: i64) -> CycloNumber {
        self.ratio_row(a, b, false)[self.idx(nu)].clone()
    }

    /// Row y ↦ g°(xy) / (g°(x) g°(y)) in Q(ζ_{q−1}).
    pub fn beta_row(&self, x: i64) -> Arc<Vec<CycloNumber>> {
        self.beta_row_impl(x, false)
    }

    /// Row y ↦ g°(x) g°(y) / g°(xy) in Q(ζ_{q−1}).
    pub fn beta_inv_row(&self, x: i64) -> Arc<Vec<CycloNumber>> {
        self.beta_row_impl(x, true)
    }

    /// Row b ↦ j(φ^a, φ^b), counted directly in Q(ζ_{q−1}).
    fn jacobi_pair_row(&self, a: i64) -> Vec<CycloNumber> {
        let k = &self.field;
        let q1 = k.order() as u64;
        let a = self.idx(a) as u64;
        let one = k.from_int(1);
        // (log u, log(1 − u)) for u ∉ {0, 1}
        let logs: Vec<(u64, u64)> = k
            .elements()
            .filter(|&u| u != 0 && u != one)
            .map(|u| (k.log(u).unwrap() as u64, k.log(k.sub(one, u)).unwrap() as u64))
            .collect();
        (0..q1)
            .into_par_iter()
            .map(|b| {
                let mut counts = vec![0i64; q1 as usize];
                for &(lu, lv) in &logs {
                    counts[((a * lu + b * lv) % q1) as usize] -= 1;
                }
                CycloNumber::from_root_counts(q1, &counts)
            })
            .collect()
    }

    // g°(x)g°(y)/g°(xy) = q^{δ(x)+δ(y)} j(x, y) and
    // g°(xy)/(g°(x)g°(y)) = q^{δ(xy)−1} j(x̄, ȳ), except at x = y = ε.
    fn beta_row_impl(&self, x: i64, inverse: bool) -> Arc<Vec<CycloNumber>> {
        let key = (self.idx(x) as u32, inverse);
        if let Some(r) = self.beta_rows.read().unwrap().get(&key) {
            return r.clone();
        }
        let q1 = self.q1();
        let q = Rational::from_integer(BigInt::from(self.field.q()));
        let delta = |e: i64| self.idx(e) == 0;
        let qpow = |e: i32| {
            if e >= 0 {
                num_traits::pow(q.clone(), e as usize)
            } else {
                num_traits::pow(q.recip(), (-e) as usize)
            }
        };
        let row: Vec<CycloNumber> = if inverse {
            let js = self.jacobi_pair_row(x);
            (0..q1)
                .map(|y| {
                    if delta(x) && delta(y) {
                        CycloNumber::from_rational(q1 as u64, &q)
                    } else {
                        js[y as usize].scale(&qpow(delta(x) as i32 + delta(y) as i32))
                    }
                })
                .collect()
        } else {
            let js = self.jacobi_pair_row(-x);
            (0..q1)
                .map(|y| {
                    if delta(x) && delta(y) {
                        CycloNumber::from_rational(q1 as u64, &q.recip())
                    } else {
                        js[self.idx(-y)].scale(&qpow(delta(x + y) as i32 - 1))
                    }
                })
                .collect()
        };
        let row = Arc::new(row);
        self.beta_rows.write().unwrap().insert(key, row.clone());
        row
    }

    /// Jacobi sum through Gauss sums, in Q(ζ_{q−1}).
    pub fn jacobi(&self, chars: &[i64]) -> Result<CycloNumber> {
        if chars.len() < 2 {
            return Err(Error::Arity {
                expected: 2,
                got: chars.len(),
            });
        }
        let q1 = self.field.order() as u64;
        if chars.iter().all(|&k| self.idx(k) == 0) {
            let q = BigInt::from(self.field.q());
            let one_minus_q = BigInt::one() - &q;
            let num = BigInt::one() - num_traits::pow(one_minus_q, chars.len());
            return Ok(CycloNumber::from_rational(q1, &Rational::new(num, q)));
        }
        let mut acc = self.g_circ_inv(chars.iter().sum());
        for &k in chars {
            acc = &acc * self.g(k);
        }
        Ok(self.to_base(acc))
    }
}

/// g(η) for the standard additive character.
pub fn gauss(eta: &MultChar) -> CycloNumber {
    gauss_table(eta.field()).g(eta.exponent() as i64).clone()
}

/// g°(η) = q^{δ(η)} g(η).
pub fn gauss_circ(eta: &MultChar) -> CycloNumber {
    gauss_table(eta.field()).g_circ(eta.exponent() as i64)
}

/// g(η) by direct summation −Σ ψ(x) η(x), without any table.
pub fn gauss_direct(eta: &MultChar, twist: u32) -> CycloNumber {
    let k = eta.field();
    let p = k.p() as u64;
    let q1 = k.order() as u64;
    let n = p * q1;
    let mut acc = CycloNumber::zero(n);
    for x in 1..k.q() {
        let psi = CycloNumber::root_of_unity(p, k.trace(k.mul(twist, x)) as i64);
        acc -= &(psi * eta.eval(x));
    }
    acc
}

fn check_fields(chars: &[MultChar]) -> Result<&Arc<FqField>> {
    let first = chars.first().ok_or(Error::Arity {
        expected: 2,
        got: 0,
    })?;
    if chars.iter().any(|c| **c.field() != **first.field()) {
        return Err(Error::FieldMismatch);
    }
    Ok(first.field())
}

/// j(η_1, …, η_n) = (−1)^{n−1} Σ_{x_1+…+x_n=1, x_i≠0} ∏ η_i(x_i), by
/// enumerating the first n−1 coordinates.
pub fn jacobi_direct(chars: &[MultChar]) -> Result<CycloNumber> {
    if chars.len() < 2 {
        return Err(Error::Arity {
            expected: 2,
            got: chars.len(),
        });
    }
    let k = check_fields(chars)?;
    let exps: Vec<i64> = chars.iter().map(|c| c.exponent() as i64).collect();
    Ok(jacobi_direct_exponents(k, &exps))
}

/// [`jacobi_direct`] on raw exponents.
pub fn jacobi_direct_exponents(k: &FqField, exps: &[i64]) -> CycloNumber {
    let q1 = k.order() as u64;
    let n = exps.len();
    let free = n - 1;
    let mut counts = vec![0i64; q1 as usize];
    let mut xs = vec![1u32; free];
    let exps: Vec<u64> = exps.iter().map(|&e| e.rem_euclid(q1 as i64) as u64).collect();
    'outer: loop {
        let mut sum = 0u32;
        let mut e = 0u64;
        for (i, &x) in xs.iter().enumerate() {
            sum = k.add(sum, x);
            e += exps[i] * k.log(x).unwrap() as u64;
        }
        let last = k.sub(1, sum);
        if let Some(l) = k.log(last) {
            e += exps[free] * l as u64;
            counts[(e % q1) as usize] += 1;
        }
        for x in xs.iter_mut() {
            *x += 1;
            if *x < k.q() {
                continue 'outer;
            }
            *x = 1;
        }
        break;
    }
    let s = CycloNumber::from_root_counts(q1, &counts);
    if free % 2 == 1 {
        -s
    } else {
        s
    }
}

/// j(η_1, …, η_n) through Gauss sums; the all-trivial case uses
/// (1 − (1 − q)^n)/q.
pub fn jacobi_via_gauss(chars: &[MultChar]) -> Result<CycloNumber> {
    let k = check_fields(chars)?;
    let exps: Vec<i64> = chars.iter().map(|c| c.exponent() as i64).collect();
    gauss_table(k).jacobi(&exps)
}

/// (α)_ν.
pub fn poch(alpha: &MultChar, nu: &MultChar) -> CycloNumber {
    gauss_table(alpha.field()).poch(alpha.exponent() as i64, nu.exponent() as i64)
}

/// (α)°_ν.
pub fn poch_circ(alpha: &MultChar, nu: &MultChar) -> CycloNumber {
    gauss_table(alpha.field()).poch_circ(alpha.exponent() as i64, nu.exponent() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    #[test]
    fn table_matches_direct_sum() {
        for (p, f) in [(5u64, 1u32), (7, 1), (3, 2)] {
            let k = make_field(p, f).unwrap();
            let t = gauss_table(&k);
            for e in 0..k.order() as i64 {
                assert_eq!(t.g(e), &gauss_direct(&MultChar::new(&k, e), 1));
            }
        }
    }

    #[test]
    fn small_values() {
        let k = make_field(5, 1).unwrap();
        assert!(gauss(&MultChar::trivial(&k)).is_one());
        assert_eq!(
            gauss_circ(&MultChar::trivial(&k)),
            CycloNumber::from_int(1, 5)
        );
        let quad = MultChar::of_exact_order(&k, 2).unwrap();
        let g = gauss(&quad);
        assert_eq!(&g * &g, CycloNumber::from_int(1, 5));
        let phi = MultChar::generator(&k);
        assert_eq!(gauss_circ(&phi), gauss(&phi));
        let v = g.complex_value(15);
        assert!((v.norm_sqr() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn jacobi_small_cases() {
        let k = make_field(5, 1).unwrap();
        let eps = MultChar::trivial(&k);
        assert_eq!(
            jacobi_direct(&[eps.clone(), eps.clone()]).unwrap(),
            CycloNumber::from_int(1, -3)
        );
        assert_eq!(
            jacobi_via_gauss(&[eps.clone(), eps.clone(), eps.clone()]).unwrap(),
            CycloNumber::from_int(1, 13)
        );
        assert!(jacobi_direct(&[eps.clone()]).is_err());
        let k7 = make_field(7, 1).unwrap();
        for a in 1..6 {
            let eta = MultChar::new(&k7, a);
            // j(η, η̄) = g(η) g(η̄) / g°(ε) = η(−1)
            assert_eq!(
                jacobi_via_gauss(&[eta.clone(), eta.conj()]).unwrap(),
                eta.eval(6)
            );
            assert_eq!(
                jacobi_direct(&[eta.clone(), eta.conj()]).unwrap(),
                eta.eval(6)
            );
            for b in 0..6 {
                let other = MultChar::new(&k7, b);
                assert_eq!(
                    jacobi_direct(&[eta.clone(), other.clone()]).unwrap(),
                    jacobi_direct(&[other, eta.clone()]).unwrap()
                );
            }
        }
    }

    #[test]
    fn pochhammer_edges() {
        let k = make_field(5, 1).unwrap();
        let t = gauss_table(&k);
        for a in 0..4 {
            assert!(t.poch(a, 0).is_one());
            assert_eq!(t.poch(0, a), t.g(a).clone());
        }
    }

    #[test]
    fn balanced_rows_descend() {
        let k = make_field(13, 1).unwrap();
        let t = gauss_table(&k);
        let row = t.ratio_row(3, 5, false);
        for (nu, v) in row.iter().enumerate() {
            assert_eq!(v.order(), 12);
            let raw = t.poch(3, nu as i64) * t.poch_circ(5, nu as i64).invert().unwrap();
            assert_eq!(*v, raw);
        }
        let beta = t.beta_row(4);
        assert_eq!(
            beta[7],
            t.g_circ(11) * t.g_circ_inv(4) * t.g_circ_inv(7)
        );
    }

    #[test]
    fn twisted_table_differs_by_character_value() {
        let k = make_field(7, 1).unwrap();
        let t1 = gauss_table(&k);
        let t3 = gauss_table_twisted(&k, 3).unwrap();
        for e in 0..6 {
            let eta = MultChar::new(&k, e);
            assert_eq!(t3.g(e).clone(), t1.g(e) * &eta.conj().eval(3));
        }
        assert!(gauss_table_twisted(&k, 0).is_err());
    }
}
