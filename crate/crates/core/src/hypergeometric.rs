//! Hypergeometric functions over finite fields: the one-variable
//! ₍n+1₎F_n and the Lauricella families F_A, F_B, F_C, F_D.
//!
//! The fast evaluators work on balanced Gauss-sum quotients in Q(ζ_{q−1}).
//! A Lauricella sum over (ν_1, …, ν_n) depends on the tuple only through the
//! single factors in ν_i and the product s = ν_1⋯ν_n, so it is evaluated as
//! an n-fold convolution over the character group followed by one sum over s.
//! The g° factors that do not split this way telescope into the weights
//! B(x, y) = g°(xy)/(g°(x)g°(y)).
//!
//! [`lauricella_naive`] and [`hgf_naive`] sum the defining expressions term
//! by term over Q(ζ_{p(q−1)}) and serve as oracles.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::character::MultChar;
use crate::charsum::{gauss_table, gauss_table_twisted, GaussTable};
use crate::cyclotomic::{CycloNumber, Rational};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FqField};

/// Parameters of ₍n+1₎F_n: n+1 numerator and n denominator characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HgfParams {
    pub numer: Vec<MultChar>,
    pub denom: Vec<MultChar>,
}

impl HgfParams {
    pub fn new(numer: Vec<MultChar>, denom: Vec<MultChar>) -> Result<Self> {
        if numer.len() != denom.len() + 1 {
            return Err(Error::Arity {
                expected: denom.len() + 1,
                got: numer.len(),
            });
        }
        let f = numer[0].field();
        if numer.iter().chain(&denom).any(|c| **c.field() != **f) {
            return Err(Error::FieldMismatch);
        }
        Ok(HgfParams { numer, denom })
    }

    pub fn from_exponents(field: &Arc<FqField>, a: &[i64], b: &[i64]) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Arity {
                expected: b.len() + 1,
                got: 0,
            });
        }
        Self::new(
            a.iter().map(|&k| MultChar::new(field, k)).collect(),
            b.iter().map(|&k| MultChar::new(field, k)).collect(),
        )
    }

    pub fn field(&self) -> &Arc<FqField> {
        self.numer[0].field()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LauricellaKind {
    A,
    B,
    C,
    D,
}

impl fmt::Display for LauricellaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LauricellaKind::A => "A",
            LauricellaKind::B => "B",
            LauricellaKind::C => "C",
            LauricellaKind::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for LauricellaKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(LauricellaKind::A),
            "B" | "b" => Ok(LauricellaKind::B),
            "C" | "c" => Ok(LauricellaKind::C),
            "D" | "d" => Ok(LauricellaKind::D),
            _ => Err(Error::Invalid(format!("unknown Lauricella kind {s}"))),
        }
    }
}

/// Character data of a Lauricella function, as exponents of φ.
///
/// Per kind: A has `a = [a]`, `b`, `c` of length n; B has `a`, `b` of
/// length n and `c = [c]`; C has `a = [a]`, `b = [b]`, `c` of length n;
/// D has `a = [a]`, `b` of length n, `c = [c]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LauricellaParams {
    pub kind: LauricellaKind,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
}

impl LauricellaParams {
    pub fn new(kind: LauricellaKind, a: Vec<i64>, b: Vec<i64>, c: Vec<i64>) -> Result<Self> {
        let p = LauricellaParams { kind, a, b, c };
        p.validate()?;
        Ok(p)
    }

    pub fn fd(a: i64, b: Vec<i64>, c: i64) -> Self {
        LauricellaParams {
            kind: LauricellaKind::D,
            a: vec![a],
            b,
            c: vec![c],
        }
    }

    pub fn fa(a: i64, b: Vec<i64>, c: Vec<i64>) -> Self {
        LauricellaParams {
            kind: LauricellaKind::A,
            a: vec![a],
            b,
            c,
        }
    }

    pub fn fb(a: Vec<i64>, b: Vec<i64>, c: i64) -> Self {
        LauricellaParams {
            kind: LauricellaKind::B,
            a,
            b,
            c: vec![c],
        }
    }

    pub fn fc(a: i64, b: i64, c: Vec<i64>) -> Self {
        LauricellaParams {
            kind: LauricellaKind::C,
            a: vec![a],
            b: vec![b],
            c,
        }
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        match self.kind {
            LauricellaKind::A | LauricellaKind::D => self.b.len(),
            LauricellaKind::B => self.a.len(),
            LauricellaKind::C => self.c.len(),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        let (la, lb, lc) = match self.kind {
            LauricellaKind::A => (1, n, n),
            LauricellaKind::B => (n, n, 1),
            LauricellaKind::C => (1, 1, n),
            LauricellaKind::D => (1, n, 1),
        };
        for (want, got) in [(la, self.a.len()), (lb, self.b.len()), (lc, self.c.len())] {
            if want != got {
                return Err(Error::Arity {
                    expected: want,
                    got,
                });
            }
        }
        if n == 0 {
            return Err(Error::Arity {
                expected: 1,
                got: 0,
            });
        }
        Ok(())
    }
}

/// Evaluator bound to one field and one additive character.
#[derive(Clone, Debug)]
pub struct Hypergeometric {
    table: Arc<GaussTable>,
}

fn rational(k: i64) -> Rational {
    Rational::from_integer(BigInt::from(k))
}

fn q_power(q: u32, e: i64) -> Rational {
    let qr = rational(q as i64);
    if e >= 0 {
        num_traits::pow(qr, e as usize)
    } else {
        num_traits::pow(qr.recip(), (-e) as usize)
    }
}

impl Hypergeometric {
    pub fn new(field: &Arc<FqField>) -> Self {
        Hypergeometric {
            table: gauss_table(field),
        }
    }

    pub fn with_twist(field: &Arc<FqField>, twist: u32) -> Result<Self> {
        Ok(Hypergeometric {
            table: gauss_table_twisted(field, twist)?,
        })
    }

    pub fn table(&self) -> &Arc<GaussTable> {
        &self.table
    }

    pub fn field(&self) -> &Arc<FqField> {
        self.table.field()
    }

    fn q1(&self) -> u64 {
        self.field().order() as u64
    }

    fn one_minus_q_inv(&self, n: usize) -> Rational {
        let base = rational(1 - self.field().q() as i64).recip();
        num_traits::pow(base, n)
    }

    /// ₍n+1₎F_n(a_0, …, a_n; b_1, …, b_n; λ) with characters as exponents.
    pub fn hgf(&self, a: &[i64], b: &[i64], lambda: u32) -> Result<CycloNumber> {
        if a.len() != b.len() + 1 {
            return Err(Error::Arity {
                expected: b.len() + 1,
                got: a.len(),
            });
        }
        let q1 = self.q1();
        let Some(l) = self.field().log(lambda) else {
            return Ok(CycloNumber::zero(q1));
        };
        let rows: Vec<_> = a
            .iter()
            .zip(std::iter::once(&0).chain(b))
            .map(|(&ai, &bi)| self.table.ratio_row(ai, bi, false))
            .collect();
        let terms: Vec<CycloNumber> = (0..q1 as usize)
            .into_par_iter()
            .map(|nu| {
                let mut t = rows[0][nu].clone();
                for row in &rows[1..] {
                    t = &t * &row[nu];
                }
                t.mul_root((nu as u64 * l as u64 % q1) as i64)
            })
            .collect();
        let sum = terms
            .iter()
            .fold(CycloNumber::zero(q1), |acc, t| acc + t);
        Ok(sum.scale(&self.one_minus_q_inv(1)))
    }

    /// HgfParams-based entry point.
    pub fn hgf_params(&self, params: &HgfParams, lambda: &FieldElement) -> Result<CycloNumber> {
        if **params.field() != **self.field() || **lambda.field() != **self.field() {
            return Err(Error::FieldMismatch);
        }
        let a: Vec<i64> = params.numer.iter().map(|c| c.exponent() as i64).collect();
        let b: Vec<i64> = params.denom.iter().map(|c| c.exponent() as i64).collect();
        self.hgf(&a, &b, lambda.value())
    }

    /// Lauricella function of the given kind at (λ_1, …, λ_n).
    pub fn lauricella(&self, params: &LauricellaParams, lambdas: &[u32]) -> Result<CycloNumber> {
        params.validate()?;
        let n = params.n();
        if lambdas.len() != n {
            return Err(Error::Arity {
                expected: n,
                got: lambdas.len(),
            });
        }
        let q1 = self.q1();
        let logs: Vec<u32> = match lambdas.iter().map(|&x| self.field().log(x)).collect() {
            Some(v) => v,
            None => return Ok(CycloNumber::zero(q1)),
        };
        let t = &self.table;
        let q = self.field().q();
        let ni = n as i64;
        let (outer, scale): (Vec<CycloNumber>, Rational) = match params.kind {
            LauricellaKind::D => (
                t.ratio_row(params.a[0], params.c[0], false).to_vec(),
                rational(1),
            ),
            LauricellaKind::A => (
                t.ratio_row(params.a[0], 0, false).to_vec(),
                q_power(q, ni - 1),
            ),
            LauricellaKind::B => (
                t.ratio_row(0, params.c[0], true).to_vec(),
                q_power(q, 1 - ni),
            ),
            LauricellaKind::C => {
                let ra = t.ratio_row(params.a[0], 0, false);
                let rb = t.ratio_row(params.b[0], 0, false);
                (
                    ra.iter().zip(rb.iter()).map(|(x, y)| x * y).collect(),
                    q_power(q, 2 * (ni - 1)),
                )
            }
        };
        let inner: Vec<Vec<CycloNumber>> = (0..n)
            .map(|i| {
                let base: Vec<CycloNumber> = match params.kind {
                    LauricellaKind::D => t.ratio_row(params.b[i], 0, false).to_vec(),
                    LauricellaKind::A => t.ratio_row(params.b[i], params.c[i], false).to_vec(),
                    LauricellaKind::B => {
                        let ra = t.ratio_row(params.a[i], 0, false);
                        let rb = t.ratio_row(params.b[i], 0, false);
                        ra.iter().zip(rb.iter()).map(|(x, y)| x * y).collect()
                    }
                    LauricellaKind::C => t.ratio_row(0, params.c[i], true).to_vec(),
                };
                base.into_iter()
                    .enumerate()
                    .map(|(nu, v)| v.mul_root((nu as u64 * logs[i] as u64 % q1) as i64))
                    .collect()
            })
            .collect();

        let weight_power = match params.kind {
            LauricellaKind::D => 0i32,
            LauricellaKind::A => 1,
            LauricellaKind::B => -1,
            LauricellaKind::C => 2,
        };
        let weights: Vec<Arc<Vec<CycloNumber>>> = if weight_power == 0 || n == 1 {
            Vec::new()
        } else if weight_power > 0 {
            (0..q1 as i64).map(|x| t.beta_row(x)).collect()
        } else {
            (0..q1 as i64).map(|x| t.beta_inv_row(x)).collect()
        };

        // P[s] = Σ over (ν_1..ν_k) with product s of ∏ h_i(ν_i) · weights
        let mut partial = inner[0].clone();
        for h in &inner[1..] {
            partial = (0..q1 as usize)
                .into_par_iter()
                .map(|u| {
                    let mut acc = CycloNumber::zero(q1);
                    for (tt, pt) in partial.iter().enumerate() {
                        if pt.is_zero() {
                            continue;
                        }
                        let nu = (u + q1 as usize - tt) % q1 as usize;
                        let mut term = pt * &h[nu];
                        if !weights.is_empty() {
                            let w = &weights[tt][nu];
                            term = &term * w;
                            if weight_power == 2 {
                                term = &term * w;
                            }
                        }
                        acc += &term;
                    }
                    acc
                })
                .collect();
        }
        let total = outer
            .iter()
            .zip(&partial)
            .fold(CycloNumber::zero(q1), |acc, (g, p)| acc + g * p);
        Ok(total.scale(&(scale * self.one_minus_q_inv(n))))
    }

    /// Appell F_1..F_4 as the two-variable Lauricella F_D, F_A, F_B, F_C.
    pub fn appell(&self, i: u8, params: &LauricellaParams, l1: u32, l2: u32) -> Result<CycloNumber> {
        let kind = match i {
            1 => LauricellaKind::D,
            2 => LauricellaKind::A,
            3 => LauricellaKind::B,
            4 => LauricellaKind::C,
            _ => return Err(Error::Invalid(format!("Appell index {i} not in 1..4"))),
        };
        if params.kind != kind {
            return Err(Error::Invalid(format!(
                "F_{i} needs Lauricella kind {kind}, got {}",
                params.kind
            )));
        }
        if params.n() != 2 {
            return Err(Error::Arity {
                expected: 2,
                got: params.n(),
            });
        }
        self.lauricella(params, &[l1, l2])
    }
}

/// ₍n+1₎F_n with the standard additive character.
pub fn hgf(params: &HgfParams, lambda: &FieldElement) -> Result<CycloNumber> {
    Hypergeometric::new(params.field()).hgf_params(params, lambda)
}

/// Lauricella function with the standard additive character.
pub fn lauricella(
    field: &Arc<FqField>,
    params: &LauricellaParams,
    lambdas: &[u32],
) -> Result<CycloNumber> {
    Hypergeometric::new(field).lauricella(params, lambdas)
}

/// Term-by-term (α)_ν and 1/(β)°_ν over Q(ζ_{p(q−1)}).
struct RawPoch<'a> {
    t: &'a GaussTable,
}

impl RawPoch<'_> {
    fn up(&self, a: i64, nu: i64) -> CycloNumber {
        self.t.g(a + nu) * self.t.g_inv(a)
    }

    fn down_circ(&self, b: i64, nu: i64) -> CycloNumber {
        self.t.g_circ(b) * self.t.g_circ_inv(b + nu)
    }
}

/// ₍n+1₎F_n summed from its definition, one ν at a time, in Q(ζ_{p(q−1)}).
pub fn hgf_naive(table: &GaussTable, a: &[i64], b: &[i64], lambda: u32) -> Result<CycloNumber> {
    if a.len() != b.len() + 1 {
        return Err(Error::Arity {
            expected: b.len() + 1,
            got: a.len(),
        });
    }
    let k = table.field();
    let n_ord = table.value_order();
    let q1 = k.order() as i64;
    let raw = RawPoch { t: table };
    let mut acc = CycloNumber::zero(n_ord);
    let lam = MultChar::new(k, 1);
    for nu in 0..q1 {
        let nu_l = lam.pow(nu).eval(lambda);
        if nu_l.is_zero() {
            continue;
        }
        let mut term = raw.down_circ(0, nu);
        for &ai in a {
            term = &term * &raw.up(ai, nu);
        }
        for &bi in b {
            term = &term * &raw.down_circ(bi, nu);
        }
        acc += &(&term * &nu_l);
    }
    Ok(acc.scale(&rational(1 - k.q() as i64).recip()))
}

/// Lauricella function summed from its definition over all (ν_1, …, ν_n)
/// in odometer order, in Q(ζ_{p(q−1)}).
pub fn lauricella_naive(
    table: &GaussTable,
    params: &LauricellaParams,
    lambdas: &[u32],
) -> Result<CycloNumber> {
    params.validate()?;
    let n = params.n();
    if lambdas.len() != n {
        return Err(Error::Arity {
            expected: n,
            got: lambdas.len(),
        });
    }
    let k = table.field();
    let q1 = k.order() as i64;
    let raw = RawPoch { t: table };
    let phi = MultChar::generator(k);
    let mut acc = CycloNumber::zero(table.value_order());
    let mut nus = vec![0i64; n];
    loop {
        let s: i64 = nus.iter().sum();
        let mut term = CycloNumber::one(table.value_order());
        for (i, &nu) in nus.iter().enumerate() {
            term = &term * &phi.pow(nu).eval(lambdas[i]);
            term = &term * &raw.down_circ(0, nu);
        }
        if !term.is_zero() {
            match params.kind {
                LauricellaKind::A => {
                    term = &term * &raw.up(params.a[0], s);
                    for (i, &nu) in nus.iter().enumerate() {
                        term = &term * &raw.up(params.b[i], nu);
                        term = &term * &raw.down_circ(params.c[i], nu);
                    }
                }
                LauricellaKind::B => {
                    for (i, &nu) in nus.iter().enumerate() {
                        term = &term * &raw.up(params.a[i], nu);
                        term = &term * &raw.up(params.b[i], nu);
                    }
                    term = &term * &raw.down_circ(params.c[0], s);
                }
                LauricellaKind::C => {
                    term = &term * &raw.up(params.a[0], s);
                    term = &term * &raw.up(params.b[0], s);
                    for (i, &nu) in nus.iter().enumerate() {
                        term = &term * &raw.down_circ(params.c[i], nu);
                    }
                }
                LauricellaKind::D => {
                    term = &term * &raw.up(params.a[0], s);
                    for (i, &nu) in nus.iter().enumerate() {
                        term = &term * &raw.up(params.b[i], nu);
                    }
                    term = &term * &raw.down_circ(params.c[0], s);
                }
            }
            acc += &term;
        }
        let mut i = 0;
        loop {
            if i == n {
                let scale = num_traits::pow(rational(1 - k.q() as i64).recip(), n);
                return Ok(acc.scale(&scale));
            }
            nus[i] += 1;
            if nus[i] < q1 {
                break;
            }
            nus[i] = 0;
            i += 1;
        }
    }
}
