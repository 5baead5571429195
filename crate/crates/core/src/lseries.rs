//! Zeta and Artin L-functions from point counts, as truncated power series.

use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CycloNumber, Rational};
use crate::error::{Error, Result};
use crate::varieties::{
    brute_count, chi_count, formula_parts, Family, Limits, Route, VarietyDescriptor, VarietySpec,
};

/// Σ_{i=0}^{R} c_i t^i, coefficients in Q(ζ_order).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncSeries {
    pub coeffs: Vec<CycloNumber>,
}

impl TruncSeries {
    /// The constant series 1 through t^R.
    pub fn one(order: u64, r: usize) -> Self {
        let mut coeffs = vec![CycloNumber::zero(order); r + 1];
        coeffs[0] = CycloNumber::one(order);
        TruncSeries { coeffs }
    }

    /// A polynomial truncated (or zero-padded) to t^R.
    pub fn from_poly(order: u64, poly: &[CycloNumber], r: usize) -> Self {
        let mut coeffs = vec![CycloNumber::zero(order); r + 1];
        for (c, p) in coeffs.iter_mut().zip(poly) {
            *c = p.clone();
        }
        TruncSeries { coeffs }
    }

    /// Truncation order R.
    pub fn len(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn order(&self) -> u64 {
        self.coeffs[0].order()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let r = self.len().min(other.len());
        let coeffs = (0..=r)
            .map(|n| {
                (0..=n).fold(CycloNumber::zero(self.order()), |acc, i| {
                    acc + &self.coeffs[i] * &other.coeffs[n - i]
                })
            })
            .collect();
        TruncSeries { coeffs }
    }

    /// 1/s, for a series with constant term 1.
    pub fn inverse(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Invalid("series inverse needs constant term 1".into()));
        }
        let mut out: Vec<CycloNumber> = vec![CycloNumber::one(self.order())];
        for n in 1..=self.len() {
            let s = (1..=n).fold(CycloNumber::zero(self.order()), |acc, i| {
                acc + &self.coeffs[i] * &out[n - i]
            });
            out.push(-s);
        }
        Ok(TruncSeries { coeffs: out })
    }

    /// Coefficients as rationals, when all of them are.
    pub fn rationals(&self) -> Option<Vec<Rational>> {
        self.coeffs.iter().map(CycloNumber::try_rational).collect()
    }
}

/// exp(Σ_{r=1}^{R} N_r t^r / r) through t^R, via n·e_n = Σ_{k=1}^{n} N_k e_{n−k}.
pub fn exp_series(n_values: &[CycloNumber]) -> TruncSeries {
    let order = n_values.first().map_or(1, CycloNumber::order);
    let mut e: Vec<CycloNumber> = vec![CycloNumber::one(order)];
    for n in 1..=n_values.len() {
        let s = (1..=n).fold(CycloNumber::zero(order), |acc, k| {
            acc + &n_values[k - 1] * &e[n - k]
        });
        e.push(s.scale(&Rational::new(BigInt::from(1), BigInt::from(n))));
    }
    TruncSeries { coeffs: e }
}

/// N_r(V; χ^m) for r = 1..R on the chosen route.
pub fn chi_counts(
    v: &VarietySpec,
    m: i64,
    r_max: u32,
    route: Route,
    limits: &Limits,
) -> Result<Vec<CycloNumber>> {
    (1..=r_max)
        .into_par_iter()
        .map(|r| chi_count(v, m, r, route, limits).map(|c| c.value))
        .collect()
}

/// L(V, χ^m; t) through t^R.
pub fn artin_l(v: &VarietySpec, m: i64, r_max: u32, route: Route, limits: &Limits) -> Result<TruncSeries> {
    Ok(exp_series(&chi_counts(v, m, r_max, route, limits)?))
}

/// Z(V, t) through t^R from exact point counts.
pub fn zeta(v: &VarietySpec, r_max: u32, limits: &Limits) -> Result<TruncSeries> {
    let counts: Vec<CycloNumber> = (1..=r_max)
        .into_par_iter()
        .map(|r| brute_count(v, r, limits).map(|c| CycloNumber::from_bigint(1, c.into())))
        .collect::<Result<_>>()?;
    Ok(exp_series(&counts))
}

/// ∏_m L(V, χ^m; t) through t^R.
pub fn product_of_l(v: &VarietySpec, r_max: u32, route: Route, limits: &Limits) -> Result<TruncSeries> {
    let mut acc = TruncSeries::one(v.d(), r_max as usize);
    for m in 0..v.d() as i64 {
        acc = acc.mul(&artin_l(v, m, r_max, route, limits)?);
    }
    Ok(acc)
}

/// A polynomial L-function 1 + c_1 t + … + c_g t^g.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPolynomial {
    pub degree: usize,
    pub coeffs: Vec<CycloNumber>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub variety: Option<VarietyDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u64>,
}

/// The polynomial of degree ≤ `max_deg` agreeing with `s`, if every
/// coefficient beyond `max_deg` vanishes. Needs at least three of them.
pub fn detect_polynomial(s: &TruncSeries, max_deg: usize) -> Result<Option<LPolynomial>> {
    if s.len() < max_deg + 3 {
        return Err(Error::Invalid(format!(
            "truncation order {} is below max_deg + 3 = {}",
            s.len(),
            max_deg + 3
        )));
    }
    if s.coeffs[max_deg + 1..].iter().any(|c| !c.is_zero()) {
        return Ok(None);
    }
    let degree = (0..=max_deg).rev().find(|&i| !s.coeffs[i].is_zero()).unwrap_or(0);
    Ok(Some(LPolynomial {
        degree,
        coeffs: s.coeffs[..=degree].to_vec(),
        variety: None,
        m: None,
    }))
}

/// Reciprocal roots of an L-polynomial and their moduli against q^{w/2}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeilReport {
    /// (re, im) of each reciprocal root.
    pub roots: Vec<(f64, f64)>,
    pub moduli: Vec<f64>,
    pub target: f64,
    pub max_deviation: f64,
    pub pass: bool,
}

/// Roots of Σ a_i z^i (a_deg ≠ 0) by Aberth–Ehrlich iteration.
pub fn polynomial_roots(a: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = a.len() - 1;
    if deg == 0 {
        return Ok(vec![]);
    }
    let lead = a[deg];
    let monic: Vec<Complex64> = a.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    // Cauchy bound for the starting circle
    let radius = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repel: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repel);
            z[i] -= step;
            moved = moved.max(step.norm() / z[i].norm().max(1.0));
        }
        if moved < 1e-15 {
            return Ok(z);
        }
    }
    // accept if residuals are negligible
    let scale = monic.iter().map(|c| c.norm()).sum::<f64>();
    if z.iter().all(|&r| eval(r).0.norm() <= 1e-9 * scale * radius.powi(deg as i32)) {
        Ok(z)
    } else {
        Err(Error::NoConvergence)
    }
}

/// Checks | |α| − q^{w/2} | < tol for every reciprocal root α of `p`.
pub fn weil_check(p: &LPolynomial, q: u64, w: u32, tol: f64) -> Result<WeilReport> {
    if tol <= 0.0 {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    // reciprocal roots are the roots of z^g L(1/z) = Σ c_i z^{g−i}
    let rev: Vec<Complex64> = p.coeffs.iter().rev().map(|c| c.complex_value(64)).collect();
    let roots = polynomial_roots(&rev)?;
    let target = (q as f64).powf(w as f64 / 2.0);
    let moduli: Vec<f64> = roots.iter().map(|r| r.norm()).collect();
    let max_deviation = moduli.iter().map(|m| (m - target).abs()).fold(0.0, f64::max);
    Ok(WeilReport {
        roots: roots.iter().map(|r| (r.re, r.im)).collect(),
        moduli,
        target,
        max_deviation,
        pass: max_deviation < tol,
    })
}

/// How the corollary treats the factor ∏(1 − S_i t) for S_4.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum S4Factor {
    /// ∏(1 − S_i t)^{−1}, which is what N_r = J^r f_r + Σ S_i^r gives.
    Inverse,
    /// ∏(1 − S_i t) with exponent +1.
    Direct,
}

/// The corollary's expression for L(V, χ^m; t) through t^R:
/// exp(Σ_r C^r f_r t^r / r)^{±1}, times the S_i factor for S_4.
pub fn l_from_theorem(v: &VarietySpec, m: i64, r_max: u32, limits: &Limits) -> Result<TruncSeries> {
    l_from_theorem_with(v, m, r_max, limits, S4Factor::Inverse)
}

pub fn l_from_theorem_with(
    v: &VarietySpec,
    m: i64,
    r_max: u32,
    limits: &Limits,
    s4: S4Factor,
) -> Result<TruncSeries> {
    let d = v.d();
    let r_len = r_max as usize;
    let m = m.rem_euclid(d as i64);
    let q = BigInt::from(v.field().q());
    if m == 0 {
        let one = CycloNumber::one(d);
        let lin = |a: BigInt| vec![one.clone(), CycloNumber::from_bigint(d, -a)];
        let denom = match v.family() {
            Family::XD => TruncSeries::from_poly(d, &lin(BigInt::from(1)), r_len)
                .mul(&TruncSeries::from_poly(d, &lin(q), r_len)),
            _ => TruncSeries::from_poly(d, &lin(q.pow(v.dim() as u32)), r_len),
        };
        return denom.inverse();
    }
    let parts: Vec<_> = (1..=r_max)
        .into_par_iter()
        .map(|r| formula_parts(v, m, r, limits))
        .collect::<Result<_>>()?;
    let terms: Vec<CycloNumber> = parts
        .iter()
        .zip(1..)
        .map(|(p, r)| Ok(p.constant.pow(r)? * &p.hypergeometric))
        .collect::<Result<_>>()?;
    let mut l = exp_series(&terms);
    if parts[0].sign < 0 {
        l = l.inverse()?;
    }
    if !parts[0].extra.is_empty() {
        let one = CycloNumber::one(d);
        let mut factor = TruncSeries::one(d, r_len);
        for s in &parts[0].extra {
            factor = factor.mul(&TruncSeries::from_poly(d, &[one.clone(), -s], r_len));
        }
        l = match s4 {
            S4Factor::Inverse => l.mul(&factor.inverse()?),
            S4Factor::Direct => l.mul(&factor),
        };
    }
    Ok(l)
}
