//! Exact verification of the character-sum identities.
//!
//! Every check evaluates its two sides from their own defining expressions:
//! hypergeometric values come from [`crate::hypergeometric`], Euler-type
//! sides are direct loops over field points, and constants come from Gauss
//! and Jacobi sums. Hypotheses are evaluated separately and recorded; a
//! verdict whose hypotheses fail is reported but never counts as a failure.

mod appell_f4;
mod classical;
mod euler;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::character::MultChar;
use crate::charsum::{jacobi_direct_exponents, GaussTable};
use crate::cyclotomic::{CycloNumber, Rational};
use crate::error::{Error, Result};
use crate::field::{make_field, FqField};
use crate::hypergeometric::{Hypergeometric, LauricellaParams};

macro_rules! identities {
    ($($variant:ident => $name:literal),* $(,)?) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub enum IdentityId { $($variant),* }

        impl IdentityId {
            pub const ALL: &'static [IdentityId] = &[$(IdentityId::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(IdentityId::$variant => $name),* }
            }
        }

        impl FromStr for IdentityId {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_uppercase().as_str() {
                    $($name => Ok(IdentityId::$variant),)*
                    _ => Err(Error::Invalid(format!("unknown identity {s}"))),
                }
            }
        }
    };
}

identities! {
    GaussRefl => "GAUSS_REFL",
    JacobiGauss => "JACOBI_GAUSS",
    PochChain => "POCH_CHAIN",
    PochRefl => "POCH_REFL",
    PochSign => "POCH_SIGN",
    OneFZero => "ONE_F_ZERO",
    Euler2F1 => "EULER_2F1",
    Reduction => "REDUCTION",
    TwoF1Eps => "TWO_F1_EPS",
    Pfaff => "PFAFF",
    VandermondeI => "VANDERMONDE_I",
    VandermondeII => "VANDERMONDE_II",
    Saalschutz => "SAALSCHUTZ",
    FdEulerI => "FD_EULER_I",
    FdEulerII => "FD_EULER_II",
    Karlsson => "KARLSSON",
    FaEuler => "FA_EULER",
    FbEuler => "FB_EULER",
    FcEuler => "FC_EULER",
    F4UnitArg => "F4_UNIT_ARG",
    Product3F2 => "PRODUCT_3F2",
    KeyProp => "KEY_PROP",
    F4Expansion => "F4_EXPANSION",
    F4Euler => "F4_EULER",
    F4Balanced => "F4_BALANCED",
    FbToFa => "FB_TO_FA",
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for IdentityId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for IdentityId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One point of an identity: field, size parameter, characters (as
/// exponents of φ) and field arguments.
///
/// `n` is the number of variables or the arity where the identity has one
/// (JACOBI_GAUSS, REDUCTION, the Lauricella checks), the order d for
/// KARLSSON, and selects the plain (0) or ° (1) law for POCH_CHAIN.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub p: u64,
    pub f: u32,
    pub n: usize,
    pub chars: Vec<i64>,
    pub args: Vec<u32>,
}

impl Instance {
    pub fn new(field: &FqField, n: usize, chars: Vec<i64>, args: Vec<u32>) -> Self {
        Instance {
            p: field.p() as u64,
            f: field.degree(),
            n,
            chars,
            args,
        }
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityVerdict {
    pub identity: IdentityId,
    pub hypotheses_met: bool,
    pub lhs: CycloNumber,
    pub rhs: CycloNumber,
    pub equal: bool,
    pub witness: Instance,
}

impl IdentityVerdict {
    /// True unless the hypotheses hold and the sides differ.
    pub fn ok(&self) -> bool {
        self.equal || !self.hypotheses_met
    }
}

/// Where a field argument ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ArgDomain {
    All,
    Units,
    NotOne,
}

impl ArgDomain {
    fn values(self, q: u32) -> Vec<u32> {
        match self {
            ArgDomain::All => (0..q).collect(),
            ArgDomain::Units => (1..q).collect(),
            ArgDomain::NotOne => (0..q).filter(|&x| x != 1).collect(),
        }
    }
}

/// Number of characters and argument domains of an identity at size `n`.
pub(crate) struct Shape {
    pub chars: usize,
    pub args: Vec<ArgDomain>,
}

/// Evaluation context: one field, its Gauss-sum table and a hypergeometric
/// evaluator.
pub(crate) struct Ctx {
    pub k: Arc<FqField>,
    pub h: Hypergeometric,
    pub q1: i64,
    pub q: i64,
}

impl Ctx {
    pub fn new(k: &Arc<FqField>) -> Self {
        Ctx {
            k: k.clone(),
            h: Hypergeometric::new(k),
            q1: k.order() as i64,
            q: k.q() as i64,
        }
    }

    pub fn t(&self) -> &GaussTable {
        self.h.table()
    }

    pub fn n_ord(&self) -> u64 {
        self.t().value_order()
    }

    /// Exponent of φ^e(x) as a power of ζ_{q−1}, `None` at x = 0.
    pub fn ex(&self, e: i64, x: u32) -> Option<i64> {
        let l = self.k.log(x)? as i64;
        Some((e.rem_euclid(self.q1) * l) % self.q1)
    }

    pub fn chi(&self, e: i64, x: u32) -> CycloNumber {
        MultChar::new(&self.k, e).eval(x)
    }

    pub fn is_triv(&self, e: i64) -> bool {
        e.rem_euclid(self.q1) == 0
    }

    pub fn same(&self, a: i64, b: i64) -> bool {
        self.is_triv(a - b)
    }

    pub fn delta(&self, e: i64) -> i64 {
        i64::from(self.is_triv(e))
    }

    pub fn int(&self, v: i64) -> CycloNumber {
        CycloNumber::from_int(1, v)
    }

    pub fn rat(&self, num: i64, den: i64) -> CycloNumber {
        CycloNumber::from_rational(1, &Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// q^e for e ∈ Z.
    pub fn qpow(&self, e: i64) -> CycloNumber {
        if e >= 0 {
            self.int(self.q.pow(e as u32))
        } else {
            self.rat(1, self.q.pow((-e) as u32))
        }
    }

    pub fn g(&self, e: i64) -> CycloNumber {
        self.t().g(e).clone()
    }

    pub fn gc(&self, e: i64) -> CycloNumber {
        self.t().g_circ(e)
    }

    pub fn g_inv(&self, e: i64) -> CycloNumber {
        self.t().g_inv(e).clone()
    }

    pub fn gc_inv(&self, e: i64) -> CycloNumber {
        self.t().g_circ_inv(e)
    }

    /// (α)_ν.
    pub fn poch(&self, a: i64, nu: i64) -> CycloNumber {
        self.t().poch(a, nu)
    }

    /// (α)°_ν.
    pub fn poch_c(&self, a: i64, nu: i64) -> CycloNumber {
        self.t().poch_circ(a, nu)
    }

    /// Jacobi sum from its definition.
    pub fn j(&self, chars: &[i64]) -> CycloNumber {
        jacobi_direct_exponents(&self.k, chars)
    }

    pub fn hgf(&self, a: &[i64], b: &[i64], lambda: u32) -> Result<CycloNumber> {
        self.h.hgf(a, b, lambda)
    }

    pub fn lauricella(&self, p: &LauricellaParams, lambdas: &[u32]) -> Result<CycloNumber> {
        self.h.lauricella(p, lambdas)
    }

    /// Σ over `points` of the root of unity ζ_{q−1}^{e}, where the closure
    /// returns the exponent of the summand or `None` when it vanishes.
    pub fn char_sum<I, F>(&self, points: I, f: F) -> CycloNumber
    where
        I: Iterator,
        F: Fn(I::Item) -> Option<i64>,
    {
        let mut counts = vec![0i64; self.q1 as usize];
        for pt in points {
            if let Some(e) = f(pt) {
                counts[e.rem_euclid(self.q1) as usize] += 1;
            }
        }
        CycloNumber::from_root_counts(self.q1 as u64, &counts)
    }

    /// All tuples in (k^×)^n.
    pub fn unit_tuples(&self, n: usize) -> impl Iterator<Item = Vec<u32>> {
        let q = self.q as u32;
        let total = (q as u64 - 1).pow(n as u32);
        (0..total).map(move |mut i| {
            (0..n)
                .map(|_| {
                    let v = (i % (q as u64 - 1)) as u32 + 1;
                    i /= q as u64 - 1;
                    v
                })
                .collect()
        })
    }
}

/// Sum of exponents, propagating vanishing factors.
pub(crate) fn prod(parts: &[Option<i64>]) -> Option<i64> {
    parts.iter().try_fold(0i64, |acc, p| p.map(|e| acc + e))
}

pub(crate) struct Sides {
    pub lhs: CycloNumber,
    pub rhs: CycloNumber,
}

fn shape(id: IdentityId, n: usize) -> Result<Shape> {
    classical::shape(id, n)
        .or_else(|| euler::shape(id, n))
        .or_else(|| appell_f4::shape(id, n))
        .ok_or_else(|| Error::Invalid(format!("no shape for {id}")))
}

fn hypotheses(ctx: &Ctx, id: IdentityId, inst: &Instance) -> bool {
    classical::hypotheses(ctx, id, inst)
        .or_else(|| euler::hypotheses(ctx, id, inst))
        .or_else(|| appell_f4::hypotheses(ctx, id, inst))
        .unwrap_or(false)
}

fn sides(ctx: &Ctx, id: IdentityId, inst: &Instance) -> Result<Sides> {
    if let Some(s) = classical::sides(ctx, id, inst) {
        return s;
    }
    if let Some(s) = euler::sides(ctx, id, inst) {
        return s;
    }
    appell_f4::sides(ctx, id, inst).unwrap_or_else(|| Err(Error::Invalid(format!("{id}"))))
}

fn valid_size(id: IdentityId, n: usize, q1: u64) -> Result<()> {
    let bad = match id {
        IdentityId::JacobiGauss => n < 2,
        IdentityId::Reduction
        | IdentityId::FdEulerI
        | IdentityId::FdEulerII
        | IdentityId::FaEuler
        | IdentityId::FbEuler
        | IdentityId::FcEuler
        | IdentityId::FbToFa => n < 1,
        IdentityId::Karlsson => n < 1 || q1 % n as u64 != 0,
        IdentityId::PochChain => n > 1,
        _ => false,
    };
    if bad {
        Err(Error::Invalid(format!("size parameter {n} not valid for {id}")))
    } else {
        Ok(())
    }
}

fn check_in(ctx: &Ctx, id: IdentityId, inst: &Instance) -> Result<IdentityVerdict> {
    valid_size(id, inst.n, ctx.q1 as u64)?;
    let sh = shape(id, inst.n)?;
    if inst.chars.len() != sh.chars {
        return Err(Error::Arity {
            expected: sh.chars,
            got: inst.chars.len(),
        });
    }
    if inst.args.len() != sh.args.len() {
        return Err(Error::Arity {
            expected: sh.args.len(),
            got: inst.args.len(),
        });
    }
    for (&x, dom) in inst.args.iter().zip(&sh.args) {
        if !dom.values(ctx.q as u32).contains(&x) {
            return Err(Error::Invalid(format!("argument {x} outside the domain of {id}")));
        }
    }
    let hyp = hypotheses(ctx, id, inst);
    let s = sides(ctx, id, inst)?;
    let equal = s.lhs == s.rhs;
    Ok(IdentityVerdict {
        identity: id,
        hypotheses_met: hyp,
        lhs: s.lhs,
        rhs: s.rhs,
        equal,
        witness: inst.clone(),
    })
}

/// Evaluates both sides of one identity at one instance.
pub fn check(id: IdentityId, inst: &Instance) -> Result<IdentityVerdict> {
    let k = make_field(inst.p, inst.f)?;
    if k.p() as u64 != inst.p {
        return Err(Error::NotPrime(inst.p));
    }
    check_in(&Ctx::new(&k), id, inst)
}

/// How a sweep chooses its instances.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Size parameter passed to every instance.
    pub n: usize,
    /// Skip instances whose hypotheses fail.
    pub hypotheses_only: bool,
    /// Enumerate exhaustively when the instance space is at most this large.
    pub cap: u64,
    /// Draw this many instances instead of enumerating.
    pub sample: Option<usize>,
    pub seed: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            n: 1,
            hypotheses_only: false,
            cap: 100_000,
            sample: None,
            seed: 0,
        }
    }
}

/// Default size parameter of an identity.
pub fn default_size(id: IdentityId, q1: u64) -> usize {
    match id {
        IdentityId::JacobiGauss | IdentityId::FbToFa => 2,
        IdentityId::FdEulerI
        | IdentityId::FdEulerII
        | IdentityId::FaEuler
        | IdentityId::FbEuler
        | IdentityId::FcEuler => 2,
        IdentityId::Karlsson => {
            if q1 % 2 == 0 {
                2
            } else {
                1
            }
        }
        IdentityId::PochChain => 0,
        _ => 1,
    }
}

struct Space {
    chars: usize,
    domains: Vec<Vec<u32>>,
    q1: u64,
}

impl Space {
    fn size(&self) -> u128 {
        let mut s = (self.q1 as u128).pow(self.chars as u32);
        for d in &self.domains {
            s *= d.len() as u128;
        }
        s
    }

    fn nth(&self, mut i: u128) -> (Vec<i64>, Vec<u32>) {
        let mut chars = Vec::with_capacity(self.chars);
        for _ in 0..self.chars {
            chars.push((i % self.q1 as u128) as i64);
            i /= self.q1 as u128;
        }
        let mut args = Vec::with_capacity(self.domains.len());
        for d in &self.domains {
            args.push(d[(i % d.len() as u128) as usize]);
            i /= d.len() as u128;
        }
        (chars, args)
    }
}

/// Number of instances an exhaustive sweep of `id` at size `n` visits.
pub fn space_size(id: IdentityId, field: &FqField, n: usize) -> Result<u128> {
    let q1 = field.order() as u64;
    valid_size(id, n, q1)?;
    let sh = shape(id, n)?;
    Ok(Space {
        chars: sh.chars,
        domains: sh.args.iter().map(|d| d.values(field.q())).collect(),
        q1,
    }
    .size())
}

/// Verdicts for every instance in the space of an identity over `field`, or
/// for a seeded sample of it. Output order is the enumeration order.
///
/// Samples are stratified over the first character: the i-th draw fixes it
/// to φ^{i mod (q−1)} and draws the rest uniformly.
pub fn sweep(
    id: IdentityId,
    field: &Arc<FqField>,
    opts: &SweepOptions,
) -> Result<Vec<IdentityVerdict>> {
    let ctx = Ctx::new(field);
    valid_size(id, opts.n, ctx.q1 as u64)?;
    let sh = shape(id, opts.n)?;
    let space = Space {
        chars: sh.chars,
        domains: sh.args.iter().map(|d| d.values(ctx.q as u32)).collect(),
        q1: ctx.q1 as u64,
    };
    let total = space.size();
    let make = |(chars, args): (Vec<i64>, Vec<u32>)| Instance::new(field, opts.n, chars, args);
    let keep = |inst: &Instance| !opts.hypotheses_only || hypotheses(&ctx, id, inst);

    let instances: Vec<Instance> = match opts.sample {
        None if total <= opts.cap as u128 => {
            (0..total).map(|i| make(space.nth(i))).filter(|i| keep(i)).collect()
        }
        _ => {
            let want = opts.sample.unwrap_or(opts.cap as usize);
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut out = Vec::with_capacity(want);
            let mut attempts = 0usize;
            while out.len() < want && attempts < want.saturating_mul(200).max(1000) {
                attempts += 1;
                let mut idx = rng.gen_range(0..total);
                if space.chars > 0 {
                    let q1 = space.q1 as u128;
                    idx = idx - idx % q1 + (attempts as u128 % q1);
                }
                let inst = make(space.nth(idx));
                if keep(&inst) {
                    out.push(inst);
                }
            }
            out
        }
    };
    instances
        .par_iter()
        .map(|inst| check_in(&ctx, id, inst))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for &id in IdentityId::ALL {
            assert_eq!(id.name().parse::<IdentityId>().unwrap(), id);
            let js = serde_json::to_string(&id).unwrap();
            assert_eq!(serde_json::from_str::<IdentityId>(&js).unwrap(), id);
        }
        assert!("NOPE".parse::<IdentityId>().is_err());
    }

    #[test]
    fn every_identity_has_a_shape() {
        for &id in IdentityId::ALL {
            assert!(shape(id, default_size(id, 4)).is_ok(), "{id}");
        }
    }

    #[test]
    fn malformed_instances_are_errors() {
        let k = make_field(5, 1).unwrap();
        let bad = Instance::new(&k, 1, vec![1, 2], vec![]);
        assert!(matches!(check(IdentityId::GaussRefl, &bad), Err(Error::Arity { .. })));
        let bad = Instance::new(&k, 3, vec![1], vec![2]);
        assert!(check(IdentityId::Karlsson, &bad).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let k = make_field(7, 1).unwrap();
        let opts = SweepOptions {
            sample: Some(20),
            seed: 42,
            ..Default::default()
        };
        let a = sweep(IdentityId::Euler2F1, &k, &opts).unwrap();
        let b = sweep(IdentityId::Euler2F1, &k, &opts).unwrap();
        assert_eq!(a.len(), 20);
        assert!(a.iter().zip(&b).all(|(x, y)| x.witness == y.witness));
    }
}
