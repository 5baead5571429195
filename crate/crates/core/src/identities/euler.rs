//! Euler-integral analogues for the Lauricella functions, the Karlsson
//! reduction of F_D, and the F_B → F_A transformation.

use super::{prod, ArgDomain, Ctx, IdentityId, Instance, Shape, Sides};
use crate::cyclotomic::CycloNumber;
use crate::error::Result;
use crate::hypergeometric::LauricellaParams;

pub(super) fn shape(id: IdentityId, n: usize) -> Option<Shape> {
    use ArgDomain::*;
    let (chars, args) = match id {
        IdentityId::FdEulerI | IdentityId::FdEulerII => (n + 2, vec![All; n]),
        IdentityId::FaEuler | IdentityId::FbEuler => (2 * n + 1, vec![All; n]),
        IdentityId::FcEuler => (n + 2, vec![All; n]),
        IdentityId::Karlsson => (3, vec![Units]),
        IdentityId::FbToFa => (2 * n + 1, vec![Units; n]),
        _ => return None,
    };
    Some(Shape { chars, args })
}

pub(super) fn hypotheses(ctx: &Ctx, id: IdentityId, inst: &Instance) -> Option<bool> {
    let n = inst.n;
    let ch = &inst.chars;
    let units = inst.args.iter().all(|&x| x != 0);
    Some(match id {
        IdentityId::FdEulerI => {
            let (a, b, c) = (ch[0], &ch[1..=n], ch[n + 1]);
            !ctx.same(a, c) && b.iter().all(|&e| !ctx.is_triv(e)) && units
        }
        IdentityId::FdEulerII => {
            let (a, b, c) = (ch[0], &ch[1..=n], ch[n + 1]);
            !ctx.is_triv(a) && !ctx.same(b.iter().sum(), c) && units
        }
        IdentityId::FaEuler => {
            let (a, b, c) = (ch[0], &ch[1..=n], &ch[n + 1..]);
            !ctx.is_triv(a) && b.iter().zip(c).all(|(&x, &y)| !ctx.same(x, y)) && units
        }
        IdentityId::FbEuler => {
            let (a, b, c) = (&ch[..n], &ch[n..2 * n], ch[2 * n]);
            a.iter().all(|&e| !ctx.is_triv(e)) && !ctx.same(b.iter().sum(), c) && units
        }
        IdentityId::FcEuler => {
            let (a, b, c) = (ch[0], ch[1], &ch[2..]);
            !ctx.same(c.iter().sum(), a) && !ctx.is_triv(b) && units
        }
        IdentityId::Karlsson => !ctx.same(ch[0], ch[2]) && !ctx.is_triv(ch[1]),
        IdentityId::FbToFa => units,
        _ => return None,
    })
}

pub(super) fn sides(ctx: &Ctx, id: IdentityId, inst: &Instance) -> Option<Result<Sides>> {
    let f = match id {
        IdentityId::FdEulerI => fd_euler_i,
        IdentityId::FdEulerII => fd_euler_ii,
        IdentityId::FaEuler => fa_euler,
        IdentityId::FbEuler => fb_euler,
        IdentityId::FcEuler => fc_euler,
        IdentityId::Karlsson => karlsson,
        IdentityId::FbToFa => fb_to_fa,
        _ => return None,
    };
    Some(f(ctx, inst))
}

/// (−1)^n, the sign carried by every n-fold Euler-type sum.
fn sign(n: usize) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Σ_i λ_i u_i.
fn dot(ctx: &Ctx, lam: &[u32], u: &[u32]) -> u32 {
    lam.iter()
        .zip(u)
        .fold(0, |acc, (&l, &x)| ctx.k.add(acc, ctx.k.mul(l, x)))
}

fn one_minus_sum(ctx: &Ctx, u: &[u32]) -> u32 {
    let s = u.iter().fold(0, |acc, &x| ctx.k.add(acc, x));
    ctx.k.sub(1, s)
}

fn fd_euler_i(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let n = inst.n;
    let (a, b, c) = (inst.chars[0], &inst.chars[1..=n], inst.chars[n + 1]);
    let lam = &inst.args;
    let k = &ctx.k;
    let fd = ctx.lauricella(&LauricellaParams::fd(a, b.to_vec(), c), lam)?;
    let lhs = -(ctx.j(&[a, c - a]) * fd);
    let rhs = ctx.char_sum(1..k.q(), |u| {
        let mut parts = vec![ctx.ex(a, u), ctx.ex(c - a, k.sub(1, u))];
        for (&bi, &li) in b.iter().zip(lam) {
            parts.push(ctx.ex(-bi, k.sub(1, k.mul(li, u))));
        }
        prod(&parts)
    });
    Ok(Sides { lhs, rhs })
}

fn fd_euler_ii(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let n = inst.n;
    let (a, b, c) = (inst.chars[0], &inst.chars[1..=n], inst.chars[n + 1]);
    let lam = &inst.args;
    let sb: i64 = b.iter().sum();
    let fd = ctx.lauricella(&LauricellaParams::fd(a, b.to_vec(), c), lam)?;
    let mut coef = ctx.g(c - sb) * ctx.gc_inv(c);
    for &bi in b {
        coef = coef * ctx.g(bi);
    }
    let lhs = (coef * fd).scale_int(sign(n));
    let rhs = ctx.char_sum(ctx.unit_tuples(n), |u| {
        let mut parts = vec![
            ctx.ex(-a, ctx.k.sub(1, dot(ctx, lam, &u))),
            ctx.ex(c - sb, one_minus_sum(ctx, &u)),
        ];
        for (&bi, &ui) in b.iter().zip(&u) {
            parts.push(ctx.ex(bi, ui));
        }
        prod(&parts)
    });
    Ok(Sides { lhs, rhs })
}

/// (−1)^n ∏ j(b_i, b̄_i c_i) · F_A = Σ_u ā(1 − Σλ_i u_i) ∏ b_i(u_i) b̄_i c_i(1 − u_i).
fn fa_euler(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let n = inst.n;
    let (a, b, c) = (inst.chars[0], &inst.chars[1..=n], &inst.chars[n + 1..]);
    let lam = &inst.args;
    let k = &ctx.k;
    let fa = ctx.lauricella(&LauricellaParams::fa(a, b.to_vec(), c.to_vec()), lam)?;
    let coef = b
        .iter()
        .zip(c)
        .fold(CycloNumber::one(1), |acc, (&bi, &ci)| acc * ctx.j(&[bi, ci - bi]));
    let rhs = ctx.char_sum(ctx.unit_tuples(n), |u| {
        let mut parts = vec![ctx.ex(-a, k.sub(1, dot(ctx, lam, &u)))];
        for i in 0..n {
            parts.push(ctx.ex(b[i], u[i]));
            parts.push(ctx.ex(c[i] - b[i], k.sub(1, u[i])));
        }
        prod(&parts)
    });
    Ok(Sides {
        lhs: (coef * fa).scale_int(sign(n)),
        rhs,
    })
}

/// (−1)^n ∏ g(b_i) g(\bar{b_1⋯b_n} c)/g°(c) · F_B = Σ_u ∏ ā_i(1 − λ_i u_i) b_i(u_i) · \bar{b_1⋯b_n} c(1 − Σu_i).
fn fb_euler(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let n = inst.n;
    let (a, b, c) = (&inst.chars[..n], &inst.chars[n..2 * n], inst.chars[2 * n]);
    let lam = &inst.args;
    let k = &ctx.k;
    let sb: i64 = b.iter().sum();
    let fb = ctx.lauricella(&LauricellaParams::fb(a.to_vec(), b.to_vec(), c), lam)?;
    let mut coef = ctx.g(c - sb) * ctx.gc_inv(c);
    for &bi in b {
        coef = coef * ctx.g(bi);
    }
    let rhs = ctx.char_sum(ctx.unit_tuples(n), |u| {
        let mut parts = vec![ctx.ex(c - sb, one_minus_sum(ctx, &u))];
        for i in 0..n {
            parts.push(ctx.ex(-a[i], k.sub(1, k.mul(lam[i], u[i]))));
            parts.push(ctx.ex(b[i], u[i]));
        }
        prod(&parts)
    });
    Ok(Sides {
        lhs: (coef * fb).scale_int(sign(n)),
        rhs,
    })
}

/// (−1)^n ∏ g(c̄_i) g(ā c_1⋯c_n)/g°(ā) · F_C = Σ_u b̄(1 − Σλ_i/u_i) ∏ c̄_i(u_i) · ā c_1⋯c_n(1 − Σu_i).
fn fc_euler(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let n = inst.n;
    let (a, b, c) = (inst.chars[0], inst.chars[1], &inst.chars[2..]);
    let lam = &inst.args;
    let k = &ctx.k;
    let sc: i64 = c.iter().sum();
    let fc = ctx.lauricella(&LauricellaParams::fc(a, b, c.to_vec()), lam)?;
    let mut coef = ctx.g(sc - a) * ctx.gc_inv(-a);
    for &ci in c {
        coef = coef * ctx.g(-ci);
    }
    let rhs = ctx.char_sum(ctx.unit_tuples(n), |u| {
        let s = lam
            .iter()
            .zip(&u)
            .fold(0, |acc, (&l, &x)| k.add(acc, k.div(l, x).expect("u is a unit")));
        let mut parts = vec![
            ctx.ex(-b, k.sub(1, s)),
            ctx.ex(sc - a, one_minus_sum(ctx, &u)),
        ];
        for (&ci, &ui) in c.iter().zip(&u) {
            parts.push(ctx.ex(-ci, ui));
        }
        prod(&parts)
    });
    Ok(Sides {
        lhs: (coef * fc).scale_int(sign(n)),
        rhs,
    })
}

fn karlsson(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let d = inst.n as i64;
    let (a, b, c) = (inst.chars[0], inst.chars[1], inst.chars[2]);
    let lam = inst.args[0];
    let k = &ctx.k;
    let step = ctx.q1 / d;
    // ξ = g^{(q−1)/d}
    let xi = k.exp(step);
    let mut bs = vec![a - c; (d - 1) as usize];
    bs.extend(std::iter::repeat(b).take(d as usize));
    let mut lams: Vec<u32> = (1..d).map(|i| k.pow(xi, i as u64)).collect();
    lams.extend((0..d).map(|i| k.mul(k.pow(xi, i as u64), lam)));
    let lhs = ctx.lauricella(&LauricellaParams::fd(d * a, bs, (d - 1) * a + c), &lams)?;

    let lam_d = k.pow(lam, d as u64);
    let mut rhs = CycloNumber::zero(1);
    for i in 0..d {
        let ai = i * step + a;
        let ci = i * step + c;
        let coef = ctx.g(ai) * ctx.gc((d - 1) * a + c) * ctx.g_inv(d * a) * ctx.gc_inv(ci);
        rhs = rhs + coef * ctx.hgf(&[ai, b], &[ci], lam_d)?;
    }
    Ok(Sides { lhs, rhs })
}

/// F_B(a; b; c; λ) = (c̄)_{b_1⋯b_n} ∏ (a_i)_{b̄_i} b̄_i(λ_i) · F_A(b_1⋯b_n c̄; b; ā_i b_i; 1/λ).
///
/// The leading factor is g(c̄ b_1⋯b_n)/g(c̄); writing it as
/// (b_1⋯b_n)_{c̄} = g(b_1⋯b_n c̄)/g(b_1⋯b_n) breaks the identity whenever
/// g(b_1⋯b_n) ≠ g(c̄).
fn fb_to_fa(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let n = inst.n;
    let (a, b, c) = (&inst.chars[..n], &inst.chars[n..2 * n], inst.chars[2 * n]);
    let lam = &inst.args;
    let k = &ctx.k;
    let sb: i64 = b.iter().sum();
    let lhs = ctx.lauricella(&LauricellaParams::fb(a.to_vec(), b.to_vec(), c), lam)?;
    let mut coef = ctx.poch(-c, sb);
    for i in 0..n {
        coef = coef * ctx.poch(a[i], -b[i]) * ctx.chi(-b[i], lam[i]);
    }
    let inv: Vec<u32> = lam.iter().map(|&l| k.inv(l)).collect::<Result<_>>()?;
    let fa = ctx.lauricella(
        &LauricellaParams::fa(
            sb - c,
            b.to_vec(),
            b.iter().zip(a).map(|(&bi, &ai)| bi - ai).collect(),
        ),
        &inv,
    )?;
    Ok(Sides {
        lhs,
        rhs: coef * fa,
    })
}
