//! χ-decomposed point counts on the hypersurfaces attached to F_A, F_B, F_C,
//! F_D and F_4, and on the smooth model X_D of the curve C_D.
//!
//! For a variety V with its μ_d-action (x, y) ↦ (x, ξy), the count N_r(V; χ^m)
//! is computed three ways:
//!
//! * [`chi_fixed_point`] counts, for each ξ, the points with F^r(x, y) = (x, ξy)
//!   over a field big enough to hold every such y;
//! * [`chi_char_sum`] sums φ_{d,r}^m(f(x)) over the base coordinates;
//! * [`chi_formula`] evaluates the closed form (Jacobi sum times a Lauricella
//!   function over k_r).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::mod_pow;
use crate::character::MultChar;
use crate::charsum::{gauss_table, jacobi_direct_exponents};
use crate::cyclotomic::{CycloNumber, Rational};
use crate::error::{Error, Result};
use crate::f4::{f4_constants, F4Chars};
use crate::field::{extend_with_bound, FqField, TowerEmbedding, DEFAULT_FIELD_BOUND};
use crate::hypergeometric::{Hypergeometric, LauricellaParams};

/// The variety families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// y^d = ∏(1 − λ_i x)^{b_i} x^a (1 − x)^c
    CD,
    /// y^d = (1 − Σλ_i x_i)^a ∏x_i^{b_i} (1 − Σx_i)^c
    SD,
    /// y^d = (1 − Σλ_i x_i)^a ∏x_i^{b_i}(1 − x_i)^{c_i}
    SA,
    /// y^d = ∏(1 − λ_i x_i)^{a_i} ∏x_i^{b_i} (1 − Σx_i)^c
    SB,
    /// y^d = ∏x_i^{c_i} (1 − Σx_i)^a (∏x_i − Σλ_i ∏_{j≠i} x_j)^b
    SC,
    /// The surface attached to F_4 at (λ_1(1 − λ_2), λ_2(1 − λ_1)).
    S4,
    /// The smooth projective model of C_D.
    XD,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::CD,
        Family::SD,
        Family::SA,
        Family::SB,
        Family::SC,
        Family::S4,
        Family::XD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::CD => "CD",
            Family::SD => "SD",
            Family::SA => "SA",
            Family::SB => "SB",
            Family::SC => "SC",
            Family::S4 => "S4",
            Family::XD => "XD",
        }
    }

    /// Number of exponents for n variables λ_1..λ_n.
    pub fn exponent_count(self, n: usize) -> usize {
        match self {
            Family::CD | Family::XD | Family::SD => n + 2,
            Family::SA | Family::SB => 2 * n + 1,
            Family::SC => n + 2,
            Family::S4 => 4,
        }
    }

    /// Layout of the exponent vector, for messages and help text.
    pub fn exponent_layout(self) -> &'static str {
        match self {
            Family::CD | Family::XD | Family::SD => "a, b_1..b_n, c",
            Family::SA => "a, b_1..b_n, c_1..c_n",
            Family::SB => "a_1..a_n, b_1..b_n, c",
            Family::SC => "a, b, c_1..c_n",
            Family::S4 => "a, b, c_1, c_2",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Invalid(format!("unknown family {s:?}")))
    }
}

/// Which computation produced a count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    FixedPoint,
    CharSum,
    Formula,
}

impl Route {
    pub const ALL: [Route; 3] = [Route::FixedPoint, Route::CharSum, Route::Formula];

    pub fn name(self) -> &'static str {
        match self {
            Route::FixedPoint => "fixed_point",
            Route::CharSum => "char_sum",
            Route::Formula => "formula",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fixed" | "fixed_point" | "fixed-point" => Ok(Route::FixedPoint),
            "charsum" | "char_sum" | "char-sum" => Ok(Route::CharSum),
            "formula" => Ok(Route::Formula),
            _ => Err(Error::Invalid(format!("unknown route {s:?}"))),
        }
    }
}

/// Enumeration and field-size limits shared by the counting routes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of loop iterations a count may take.
    pub enumeration: u128,
    /// Largest field (k_r or a working extension) that may be built.
    pub field_bound: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration: 50_000_000,
            field_bound: DEFAULT_FIELD_BOUND,
        }
    }
}

impl Limits {
    fn check(&self, needed: u128) -> Result<()> {
        if needed > self.enumeration {
            return Err(Error::Budget {
                needed,
                budget: self.enumeration,
            });
        }
        Ok(())
    }
}

/// A member of one of the families over k, with its μ_d-action.
#[derive(Clone, Debug)]
pub struct VarietySpec {
    field: Arc<FqField>,
    family: Family,
    d: u64,
    exponents: Vec<i64>,
    lambda: Vec<u32>,
}

/// Serializable description of a [`VarietySpec`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietyDescriptor {
    pub family: Family,
    pub p: u32,
    pub f: u32,
    pub d: u64,
    pub exponents: Vec<i64>,
    pub lambda: Vec<u32>,
}

impl VarietySpec {
    /// Validates the parameters; S_4 exponents are reduced mod d.
    pub fn new(
        field: &Arc<FqField>,
        family: Family,
        d: u64,
        exponents: Vec<i64>,
        lambda: Vec<u32>,
    ) -> Result<Self> {
        let q1 = field.order() as u64;
        if d == 0 || q1 % d != 0 {
            return Err(Error::NotDivisor { d, modulus: q1 });
        }
        let n = lambda.len();
        if n == 0 {
            return Err(Error::Invalid("at least one λ is required".into()));
        }
        if family == Family::S4 && n != 2 {
            return Err(Error::Arity { expected: 2, got: n });
        }
        let want = family.exponent_count(n);
        if exponents.len() != want {
            return Err(Error::Arity {
                expected: want,
                got: exponents.len(),
            });
        }
        if lambda.iter().any(|&l| l == 0 || l >= field.q()) {
            return Err(Error::Invalid("λ must lie in k^×".into()));
        }
        let exponents = if family == Family::S4 {
            exponents.iter().map(|e| e.rem_euclid(d as i64)).collect()
        } else {
            if exponents.iter().any(|&e| e < 1) {
                return Err(Error::Invalid("exponents must be positive".into()));
            }
            exponents
        };
        match family {
            Family::CD | Family::XD => {
                let mut sorted = lambda.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != n || lambda.contains(&1) {
                    return Err(Error::Invalid("λ_i must be distinct and different from 1".into()));
                }
            }
            Family::S4 => {
                if lambda.contains(&1) {
                    return Err(Error::Invalid("λ_1, λ_2 must differ from 1".into()));
                }
            }
            _ => {}
        }
        let spec = VarietySpec {
            field: field.clone(),
            family,
            d,
            exponents,
            lambda,
        };
        if family == Family::XD {
            let e = spec.xd_e();
            if e == 0 {
                return Err(Error::Invalid("X_D needs a + Σb_i + c ≠ d".into()));
            }
            if let Some(msg) = spec.formula_hypothesis_failure() {
                return Err(Error::Hypothesis(msg));
            }
        }
        Ok(spec)
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn lambda(&self) -> &[u32] {
        &self.lambda
    }

    /// Number of parameters λ_i.
    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// Number of base coordinates x.
    pub fn dim(&self) -> usize {
        match self.family {
            Family::CD | Family::XD => 1,
            Family::S4 => 2,
            _ => self.n(),
        }
    }

    pub fn descriptor(&self) -> VarietyDescriptor {
        VarietyDescriptor {
            family: self.family,
            p: self.field.p(),
            f: self.field.degree(),
            d: self.d,
            exponents: self.exponents.clone(),
            lambda: self.lambda.clone(),
        }
    }

    /// e = |a + Σb_i + c − d| for C_D and X_D.
    pub fn xd_e(&self) -> u64 {
        let s: i64 = self.exponents.iter().sum();
        (s - self.d as i64).unsigned_abs()
    }

    /// The seven exponents of the S_4 equation, each reduced to 0..d−1.
    fn s4_equation_exponents(&self) -> [u64; 7] {
        let [a, b, c1, c2] = [0, 1, 2, 3].map(|i| self.exponents[i]);
        let r = |e: i64| e.rem_euclid(self.d as i64) as u64;
        [
            r(a),
            r(b),
            r(c1 - a),
            r(c2 - b),
            r(a - c1 - c2),
            r(b - c1 - c2),
            r(c1 + c2 - a - b),
        ]
    }

    /// The first gcd condition of the family's counting theorem that fails.
    pub fn formula_hypothesis_failure(&self) -> Option<String> {
        let n = self.n();
        let e = &self.exponents;
        let d = self.d as i64;
        let coprime = |x: i64| x.gcd(&d) == 1;
        let named: Vec<(String, i64)> = match self.family {
            Family::CD => {
                let mut v: Vec<(String, i64)> =
                    (0..n).map(|i| (format!("b_{}", i + 1), e[1 + i])).collect();
                v.push(("c".into(), e[n + 1]));
                v
            }
            Family::XD => {
                let mut v = vec![("a".to_string(), e[0])];
                v.extend((0..n).map(|i| (format!("b_{}", i + 1), e[1 + i])));
                v.push(("c".into(), e[n + 1]));
                v.push(("e".into(), self.xd_e() as i64));
                v
            }
            Family::SD => vec![("a".into(), e[0]), ("c".into(), e[n + 1])],
            Family::SA => {
                let mut v = vec![("a".to_string(), e[0])];
                v.extend((0..n).map(|i| (format!("c_{}", i + 1), e[1 + n + i])));
                v
            }
            Family::SB => {
                let mut v: Vec<(String, i64)> =
                    (0..n).map(|i| (format!("a_{}", i + 1), e[i])).collect();
                v.push(("c".into(), e[2 * n]));
                v
            }
            Family::SC => vec![("a".into(), e[0]), ("b".into(), e[1])],
            Family::S4 => {
                let (a, b) = (e[0], e[1]);
                let mut v = vec![("a".to_string(), a), ("b".to_string(), b)];
                for i in 0..2 {
                    v.push((format!("c_{} - a", i + 1), e[2 + i] - a));
                    v.push((format!("c_{} - b", i + 1), e[2 + i] - b));
                }
                v
            }
        };
        named
            .into_iter()
            .find(|(_, x)| !coprime(*x))
            .map(|(name, x)| format!("gcd(d, {name}) = gcd({d}, {x}) ≠ 1"))
    }

    /// True when d divides c_1 + c_2 − a − b for S_4, the case in which the
    /// last factor of the equation disappears.
    pub fn s4_balanced(&self) -> bool {
        self.family == Family::S4 && self.s4_equation_exponents()[6] == 0
    }
}

/// One value N_r(V; χ^m).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiCount {
    pub m: u64,
    pub r: u32,
    pub value: CycloNumber,
    pub route: Route,
}

/// k ⊂ k_r together with the equation's polynomial over k_r.
struct Level {
    tower: TowerEmbedding,
    lambda: Vec<u32>,
}

fn level(v: &VarietySpec, r: u32, limits: &Limits) -> Result<Level> {
    let tower = extend_with_bound(&v.field, r, limits.field_bound)?;
    let lambda = v.lambda.iter().map(|&l| tower.embed(l)).collect();
    Ok(Level { tower, lambda })
}

#[inline]
fn powe(k: &FqField, x: u32, e: i64) -> u32 {
    k.pow(x, e as u64)
}

impl Level {
    fn k(&self) -> &FqField {
        self.tower.ext()
    }

    /// f(x) for the affine equation y^d = f(x) over k_r.
    fn eval(&self, v: &VarietySpec, x: &[u32]) -> u32 {
        let k = self.k();
        let e = &v.exponents;
        let lam = &self.lambda;
        let n = lam.len();
        let sum = |xs: &[u32]| xs.iter().fold(0, |acc, &t| k.add(acc, t));
        let lin = |xs: &[u32]| {
            xs.iter()
                .zip(lam)
                .fold(0, |acc, (&t, &l)| k.add(acc, k.mul(l, t)))
        };
        let mut acc = 1u32;
        let mut mul = |base: u32, ex: i64| acc = k.mul(acc, powe(k, base, ex));
        match v.family {
            Family::CD | Family::XD => {
                let t = x[0];
                for i in 0..n {
                    mul(k.sub(1, k.mul(lam[i], t)), e[1 + i]);
                }
                mul(t, e[0]);
                mul(k.sub(1, t), e[n + 1]);
            }
            Family::SD => {
                mul(k.sub(1, lin(x)), e[0]);
                for i in 0..n {
                    mul(x[i], e[1 + i]);
                }
                mul(k.sub(1, sum(x)), e[n + 1]);
            }
            Family::SA => {
                mul(k.sub(1, lin(x)), e[0]);
                for i in 0..n {
                    mul(x[i], e[1 + i]);
                    mul(k.sub(1, x[i]), e[1 + n + i]);
                }
            }
            Family::SB => {
                for i in 0..n {
                    mul(k.sub(1, k.mul(lam[i], x[i])), e[i]);
                    mul(x[i], e[n + i]);
                }
                mul(k.sub(1, sum(x)), e[2 * n]);
            }
            Family::SC => {
                for i in 0..n {
                    mul(x[i], e[2 + i]);
                }
                mul(k.sub(1, sum(x)), e[0]);
                let all = x.iter().fold(1, |a, &t| k.mul(a, t));
                let mut s = 0u32;
                for i in 0..n {
                    let others = (0..n)
                        .filter(|&j| j != i)
                        .fold(1, |a, j| k.mul(a, x[j]));
                    s = k.add(s, k.mul(lam[i], others));
                }
                mul(k.sub(all, s), e[1]);
            }
            Family::S4 => {
                let ex = v.s4_equation_exponents().map(|t| t as i64);
                let (u, w) = (x[0], x[1]);
                let lu = k.mul(lam[0], u);
                let lw = k.mul(lam[1], w);
                mul(u, ex[0]);
                mul(w, ex[1]);
                mul(k.sub(1, u), ex[2]);
                mul(k.sub(1, w), ex[3]);
                mul(k.sub(1, lu), ex[4]);
                mul(k.sub(1, lw), ex[5]);
                mul(k.sub(k.sub(1, lu), lw), ex[6]);
            }
        }
        acc
    }

    /// Calls `f` on every point of k_r^dim, in parallel, folding with `fold`.
    fn fold_points<T, F, G>(&self, dim: usize, init: T, f: F, merge: G) -> T
    where
        T: Clone + Send + Sync,
        F: Fn(&mut T, &[u32]) + Send + Sync,
        G: Fn(T, T) -> T + Send + Sync,
    {
        let q = self.k().q() as u64;
        let total = q.pow(dim as u32);
        (0..total)
            .into_par_iter()
            .fold(
                || (init.clone(), vec![0u32; dim]),
                |(mut acc, mut x), idx| {
                    let mut t = idx;
                    for c in x.iter_mut() {
                        *c = (t % q) as u32;
                        t /= q;
                    }
                    f(&mut acc, &x);
                    (acc, x)
                },
            )
            .map(|(acc, _)| acc)
            .reduce(|| init.clone(), &merge)
    }
}

fn q_r(v: &VarietySpec, r: u32) -> u128 {
    (v.field.q() as u128).pow(r)
}

/// Exact number of affine points (x, y) ∈ k_r^{dim+1} on V; for X_D, the
/// point at infinity is added.
pub fn brute_count(v: &VarietySpec, r: u32, limits: &Limits) -> Result<u64> {
    let dim = v.dim();
    limits.check(q_r(v, r).saturating_pow(dim as u32 + 1))?;
    let lv = level(v, r, limits)?;
    let k = lv.k();
    let d = v.d;
    let affine = lv.fold_points(
        dim,
        0u64,
        |acc, x| {
            let fx = lv.eval(v, x);
            *acc += k.elements().filter(|&y| k.pow(y, d) == fx).count() as u64;
        },
        |a, b| a + b,
    );
    Ok(affine + u64::from(v.family == Family::XD))
}

fn m_reduced(v: &VarietySpec, m: i64) -> u64 {
    m.rem_euclid(v.d as i64) as u64
}

/// m = 0 value shared by the routes: q^{r·dim}, or 1 + q^r for X_D.
fn trivial_value(v: &VarietySpec, r: u32) -> CycloNumber {
    let qr = BigInt::from(v.field.q()).pow(r);
    let val = match v.family {
        Family::XD => qr + 1,
        _ => qr.pow(v.dim() as u32),
    };
    CycloNumber::from_bigint(v.d, val)
}

/// Smallest s ≥ 1 with d(Q − 1) | Q^s − 1.
fn working_degree(d: u64, big_q: u64) -> u32 {
    let modulus = d * (big_q - 1);
    (1..)
        .find(|&s| mod_pow(big_q % modulus, s as u64, modulus) == 1 % modulus)
        .unwrap()
}

/// The definition of N_r(V; χ^m) as an average over μ_d of fixed-point counts.
///
/// Every y with y^{Q−1} ∈ μ_d lies in W = k_{rs}; for each x ∈ k_r^dim the
/// solutions y ∈ W of y^d = f(x) are sorted by ξ = y^{Q−1}, and y = 0 counts
/// once for every ξ.
pub fn chi_fixed_point(v: &VarietySpec, m: i64, r: u32, limits: &Limits) -> Result<ChiCount> {
    let m = m_reduced(v, m);
    let dim = v.dim();
    let lv = level(v, r, limits)?;
    let kr = lv.k();
    let big_q = kr.q() as u64;
    let s = working_degree(v.d, big_q);
    let w_size = (big_q as u128).saturating_pow(s);
    limits.check(w_size + (big_q as u128).saturating_pow(dim as u32))?;
    let to_w = extend_with_bound(lv.tower.ext(), s, limits.field_bound)?;
    let w = to_w.ext();
    let k = &v.field;
    let d = v.d as usize;
    let step = (k.order() as u64) / v.d;

    // hist[v][j]: number of y ∈ W^× with y^d = v ∈ k_r and y^{Q−1} = g^{j·step}
    let hist: Vec<Vec<u64>> = (1..w.q())
        .into_par_iter()
        .fold(
            || vec![vec![0u64; d]; big_q as usize],
            |mut h, y| {
                let Some(val) = to_w.restrict(w.pow(y, v.d)) else {
                    return h;
                };
                let xi = to_w
                    .restrict(w.pow(y, big_q - 1))
                    .and_then(|t| lv.tower.restrict(t))
                    .expect("y^(Q-1) lies in μ_d ⊂ k");
                let j = k.log(xi).expect("ξ ≠ 0") as u64 / step;
                h[val as usize][j as usize] += 1;
                h
            },
        )
        .reduce(
            || vec![vec![0u64; d]; big_q as usize],
            |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
                a
            },
        );

    let per_xi = lv.fold_points(
        dim,
        vec![0u64; d],
        |acc, x| {
            let fx = lv.eval(v, x);
            for (j, slot) in acc.iter_mut().enumerate() {
                *slot += hist[fx as usize][j] + u64::from(fx == 0);
            }
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    let mut counts = vec![0i64; d];
    for (j, &c) in per_xi.iter().enumerate() {
        counts[(m as usize * j) % d] += c as i64;
    }
    let mut value = CycloNumber::from_root_counts(v.d, &counts)
        .scale(&Rational::new(BigInt::from(1), BigInt::from(v.d)));
    if v.family == Family::XD && m == 0 {
        value += &CycloNumber::one(v.d);
    }
    Ok(ChiCount {
        m,
        r,
        value,
        route: Route::FixedPoint,
    })
}

/// Σ_{x ∈ k_r^dim} φ_{d,r}^m(f(x)) with φ_{d,r} = φ_d ∘ N_{k_r/k}.
///
/// For m = 0 the count is returned directly: q^{r·dim}, or 1 + q^r for X_D.
pub fn chi_char_sum(v: &VarietySpec, m: i64, r: u32, limits: &Limits) -> Result<ChiCount> {
    let m = m_reduced(v, m);
    if m == 0 {
        return Ok(ChiCount {
            m,
            r,
            value: trivial_value(v, r),
            route: Route::CharSum,
        });
    }
    let dim = v.dim();
    limits.check(q_r(v, r).saturating_pow(dim as u32))?;
    let lv = level(v, r, limits)?;
    let k = &v.field;
    let step = (k.order() as u64) / v.d;
    let chi = MultChar::new(k, (step * m) as i64).norm_pullback(&lv.tower)?;
    let d = v.d as usize;
    let big_step = lv.k().order() as u64 / v.d;
    let counts = lv.fold_points(
        dim,
        vec![0i64; d],
        |acc, x| {
            if let Some(e) = chi.eval_exponent(lv.eval(v, x)) {
                acc[(e as u64 / big_step) as usize] += 1;
            }
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    Ok(ChiCount {
        m,
        r,
        value: CycloNumber::from_root_counts(v.d, &counts),
        route: Route::CharSum,
    })
}

/// The family's closed form for N_r(V; χ^m).
///
/// The Jacobi-sum constants are taken over k and raised to the r-th power;
/// the hypergeometric factor is evaluated over k_r with the characters
/// φ_{d,r}^{m·e}. S_D, S_A, S_B and S_C carry the sign (−1)^n. Errors with [`Error::Hypothesis`] when the family's gcd
/// conditions fail.
pub fn chi_formula(v: &VarietySpec, m: i64, r: u32, limits: &Limits) -> Result<ChiCount> {
    if let Some(msg) = v.formula_hypothesis_failure() {
        return Err(Error::Hypothesis(msg));
    }
    let m = m_reduced(v, m);
    let value = if m == 0 {
        trivial_value(v, r)
    } else {
        formula_value(v, m, r, limits)?
    };
    Ok(ChiCount {
        m,
        r,
        value,
        route: Route::Formula,
    })
}

/// The closed form split into its pieces:
/// N_r = sign · constant^r · hypergeometric + Σ_i extra_i^r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaParts {
    /// Jacobi-sum constant over k.
    pub constant: CycloNumber,
    pub sign: i64,
    /// The Lauricella (or F_4) value over k_r.
    pub hypergeometric: CycloNumber,
    /// S_0, S_1, S_2 over k for S_4; empty otherwise.
    pub extra: Vec<CycloNumber>,
}

impl FormulaParts {
    pub fn value(&self, r: u32) -> Result<CycloNumber> {
        let ri = r as i64;
        let mut v = (self.constant.pow(ri)? * &self.hypergeometric).scale_int(self.sign);
        for s in &self.extra {
            v += &s.pow(ri)?;
        }
        Ok(v)
    }
}

/// Pieces of the closed form for m ≠ 0 mod d.
pub fn formula_parts(v: &VarietySpec, m: i64, r: u32, limits: &Limits) -> Result<FormulaParts> {
    if let Some(msg) = v.formula_hypothesis_failure() {
        return Err(Error::Hypothesis(msg));
    }
    let m = m_reduced(v, m);
    if m == 0 {
        return Err(Error::Invalid("the closed form is for m ≠ 0".into()));
    }
    let k = &v.field;
    let n = v.n();
    let e = &v.exponents;
    let step = (k.order() as u64 / v.d * m) as i64;
    // φ_d^{m·x} as an exponent of φ over k
    let over_k = |x: i64| x * step;
    let jac = |xs: &[i64]| {
        let ex: Vec<i64> = xs.iter().map(|&x| over_k(x)).collect();
        jacobi_direct_exponents(k, &ex)
    };
    let lv = level(v, r, limits)?;
    let kr = lv.tower.ext();
    limits.check((kr.q() as u128).saturating_pow(2))?;
    // φ_{d,r}^{m·x} as an exponent of the generator character of k_r
    let over_kr = |x: i64| lv.tower.pullback_exponent(over_k(x)) as i64;
    let h = Hypergeometric::new(kr);
    let odd = if n % 2 == 0 { 1 } else { -1 };
    let mut extra = Vec::new();

    let (constant, sign, params, args) = match v.family {
        Family::CD | Family::XD => {
            let (a, c) = (e[0], e[n + 1]);
            let params = LauricellaParams::fd(
                over_kr(a),
                (1..=n).map(|i| over_kr(-e[i])).collect(),
                over_kr(a + c),
            );
            (jac(&[a, c]), -1, params, lv.lambda.clone())
        }
        Family::SD => {
            let (a, c) = (e[0], e[n + 1]);
            let b = &e[1..=n];
            let mut js = b.to_vec();
            js.push(c);
            let params = LauricellaParams::fd(
                over_kr(-a),
                b.iter().map(|&x| over_kr(x)).collect(),
                over_kr(b.iter().sum::<i64>() + c),
            );
            (jac(&js), odd, params, lv.lambda.clone())
        }
        Family::SA => {
            let a = e[0];
            let b = &e[1..=n];
            let c = &e[n + 1..];
            let cst = (0..n).fold(CycloNumber::one(v.d), |acc, i| acc * jac(&[b[i], c[i]]));
            let params = LauricellaParams::fa(
                over_kr(-a),
                b.iter().map(|&x| over_kr(x)).collect(),
                (0..n).map(|i| over_kr(b[i] + c[i])).collect(),
            );
            (cst, odd, params, lv.lambda.clone())
        }
        Family::SB => {
            let a = &e[..n];
            let b = &e[n..2 * n];
            let c = e[2 * n];
            let mut js = b.to_vec();
            js.push(c);
            let params = LauricellaParams::fb(
                a.iter().map(|&x| over_kr(-x)).collect(),
                b.iter().map(|&x| over_kr(x)).collect(),
                over_kr(b.iter().sum::<i64>() + c),
            );
            (jac(&js), odd, params, lv.lambda.clone())
        }
        Family::SC => {
            let (a, b) = (e[0], e[1]);
            let c = &e[2..];
            let mut js = vec![a];
            js.extend(c.iter().map(|&ci| b + ci));
            let top = a + n as i64 * b + c.iter().sum::<i64>();
            let params = LauricellaParams::fc(
                over_kr(-top),
                over_kr(-b),
                c.iter().map(|&ci| over_kr(-(b + ci))).collect(),
            );
            (jac(&js), odd, params, lv.lambda.clone())
        }
        Family::S4 => {
            let ch = F4Chars::new(over_k(e[0]), over_k(e[1]), over_k(e[2]), over_k(e[3]));
            let (l1, l2) = (v.lambda[0], v.lambda[1]);
            let consts = f4_constants(&gauss_table(k), &ch, l1, l2);
            let x = k.mul(l1, k.sub(1, l2));
            let y = k.mul(l2, k.sub(1, l1));
            let params = LauricellaParams::fc(
                over_kr(e[0]),
                over_kr(e[1]),
                vec![over_kr(e[2]), over_kr(e[3])],
            );
            extra = vec![consts.s0, consts.s1, consts.s2];
            let args = vec![lv.tower.embed(x), lv.tower.embed(y)];
            (consts.j, 1, params, args)
        }
    };
    let f = h.lauricella(&params, &args)?;
    let small = |z: CycloNumber| z.descend(v.d).unwrap_or_else(|| z.minimal_order());
    Ok(FormulaParts {
        constant: small(constant),
        sign,
        hypergeometric: small(f),
        extra: extra.into_iter().map(small).collect(),
    })
}

fn formula_value(v: &VarietySpec, m: u64, r: u32, limits: &Limits) -> Result<CycloNumber> {
    let value = formula_parts(v, m as i64, r, limits)?.value(r)?;
    Ok(value.descend(v.d).unwrap_or_else(|| value.minimal_order()))
}

/// Dispatch on the route.
pub fn chi_count(v: &VarietySpec, m: i64, r: u32, route: Route, limits: &Limits) -> Result<ChiCount> {
    match route {
        Route::FixedPoint => chi_fixed_point(v, m, r, limits),
        Route::CharSum => chi_char_sum(v, m, r, limits),
        Route::Formula => chi_formula(v, m, r, limits),
    }
}

/// Σ_m of a route's values, as an integer when it is one.
pub fn sum_over_m(counts: &[ChiCount]) -> Option<BigInt> {
    let d = counts.first()?.value.order();
    let total = counts
        .iter()
        .fold(CycloNumber::zero(d), |acc, c| acc + &c.value);
    let r = total.try_rational()?;
    r.is_integer().then(|| r.to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn spec(q: u64, fam: Family, d: u64, ex: Vec<i64>, lam: Vec<u32>) -> VarietySpec {
        VarietySpec::new(&make_field(q, 1).unwrap(), fam, d, ex, lam).unwrap()
    }

    #[test]
    fn working_degrees() {
        assert_eq!(working_degree(2, 5), 2);
        assert_eq!(working_degree(3, 7), 3);
        assert_eq!(working_degree(1, 7), 1);
    }

    #[test]
    fn validation() {
        let k = make_field(5, 1).unwrap();
        assert!(VarietySpec::new(&k, Family::CD, 3, vec![1, 1, 1], vec![2]).is_err());
        assert!(VarietySpec::new(&k, Family::CD, 2, vec![1, 1, 1], vec![1]).is_err());
        assert!(VarietySpec::new(&k, Family::CD, 2, vec![1, 1, 1, 1], vec![2, 2]).is_err());
        assert!(VarietySpec::new(&k, Family::S4, 2, vec![1, 1, 1, 1], vec![2]).is_err());
        // e = 0
        assert!(VarietySpec::new(&k, Family::XD, 4, vec![1, 2, 1], vec![2]).is_err());
        let s4 = spec(7, Family::S4, 3, vec![4, -2, 3, 3], vec![2, 3]);
        assert_eq!(s4.exponents(), &[1, 1, 0, 0]);
        assert_eq!("xd".parse::<Family>().unwrap(), Family::XD);
        assert_eq!("fixed".parse::<Route>().unwrap(), Route::FixedPoint);
    }

    #[test]
    fn curve_routes_agree_over_f5() {
        let v = spec(5, Family::CD, 2, vec![1, 1, 1], vec![2]);
        let lim = Limits::default();
        for m in 0..2 {
            let fp = chi_fixed_point(&v, m, 1, &lim).unwrap();
            let cs = chi_char_sum(&v, m, 1, &lim).unwrap();
            let fo = chi_formula(&v, m, 1, &lim).unwrap();
            assert_eq!(fp.value, cs.value, "m = {m}");
            assert_eq!(cs.value, fo.value, "m = {m}");
        }
        assert_eq!(chi_fixed_point(&v, 0, 1, &lim).unwrap().value, CycloNumber::from_int(2, 5));
    }

    #[test]
    fn formula_reports_hypotheses() {
        let v = spec(7, Family::CD, 3, vec![1, 3, 1], vec![2]);
        assert!(matches!(
            chi_formula(&v, 1, 1, &Limits::default()),
            Err(Error::Hypothesis(_))
        ));
    }
}
