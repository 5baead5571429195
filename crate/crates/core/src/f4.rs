//! Constants in the decomposition of Appell's F_4(a; b; c_1, c_2; x(1−y), y(1−x)).
//!
//! Shared by the F_4 identity checks and the S_4 point-count formula so both
//! consume the same values.

use num_bigint::BigInt;

use crate::character::MultChar;
use crate::charsum::{jacobi_direct_exponents, GaussTable};
use crate::cyclotomic::{CycloNumber, Rational};

/// Character data (a; b; c_1, c_2) as exponents of φ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct F4Chars {
    pub a: i64,
    pub b: i64,
    pub c1: i64,
    pub c2: i64,
}

impl F4Chars {
    pub fn new(a: i64, b: i64, c1: i64, c2: i64) -> Self {
        F4Chars { a, b, c1, c2 }
    }

    /// The exponent of \bar{ab}c_1c_2.
    pub fn balance(&self) -> i64 {
        self.c1 + self.c2 - self.a - self.b
    }
}

#[derive(Clone, Debug)]
pub struct F4Constants {
    /// J = j(a, āc_1) j(b, b̄c_2).
    pub j: CycloNumber,
    pub s0: CycloNumber,
    pub s1: CycloNumber,
    pub s2: CycloNumber,
    pub r1: CycloNumber,
    pub r2: CycloNumber,
    pub c1: CycloNumber,
    pub c2: CycloNumber,
}

fn chi(t: &GaussTable, e: i64, x: u32) -> CycloNumber {
    MultChar::new(t.field(), e).eval(x)
}

/// J alone; it does not depend on (x, y).
pub fn f4_j(t: &GaussTable, ch: &F4Chars) -> CycloNumber {
    let k = t.field();
    jacobi_direct_exponents(k, &[ch.a, ch.c1 - ch.a])
        * jacobi_direct_exponents(k, &[ch.b, ch.c2 - ch.b])
}

/// All constants at the point (x, y) ∈ k².
pub fn f4_constants(t: &GaussTable, ch: &F4Chars, x: u32, y: u32) -> F4Constants {
    let k = t.field();
    let F4Chars { a, b, c1, c2 } = *ch;
    let bal = ch.balance();
    let jac = |u: i64, v: i64| jacobi_direct_exponents(k, &[u, v]);
    let xm1 = k.sub(x, 1);
    let ym1 = k.sub(y, 1);
    let one_x = k.sub(1, x);
    let one_y = k.sub(1, y);
    let minus_one = k.neg(1);
    let cx_cy = chi(t, -c1, x) * chi(t, -c2, y);

    let s0 = chi(t, a + b, minus_one) * jac(a - c2, b - c1) * &cx_cy;
    let s1 = jac(bal, b) * chi(t, -c1, x) * chi(t, c1 - a, xm1) * chi(t, -b, y);
    let s2 = jac(bal, a) * chi(t, -c2, y) * chi(t, c2 - b, ym1) * chi(t, -a, x);
    let r1 = jac(bal, b)
        * jac(a - c2, c2 - b)
        * chi(t, c1 - a, xm1)
        * chi(t, c2 - a, one_y)
        * &cx_cy;
    let r2 = jac(bal, a)
        * jac(c1 - a, b - c1)
        * chi(t, c1 - b, one_x)
        * chi(t, c2 - b, ym1)
        * &cx_cy;

    let q = Rational::from_integer(BigInt::from(k.q()));
    let qd = |e: i64| {
        if e.rem_euclid(k.order() as i64) == 0 {
            q.clone()
        } else {
            Rational::from_integer(BigInt::from(1))
        }
    };
    let c1v = (t.g(bal) * &t.g_circ(c2) * t.g_circ_inv(c1 + c2 - a) * t.g_inv(c2 - b))
        .scale(&qd(c1));
    let c2v = (t.g(bal) * &t.g_circ(c1) * t.g_circ_inv(c1 + c2 - b) * t.g_inv(c1 - a))
        .scale(&qd(c2));

    F4Constants {
        j: f4_j(t, ch),
        s0,
        s1,
        s2,
        r1,
        r2,
        c1: c1v,
        c2: c2v,
    }
}
