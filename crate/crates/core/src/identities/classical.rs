//! Gauss, Jacobi and Pochhammer laws, and the one-variable ₍n+1₎F_n results.

use super::{prod, ArgDomain, Ctx, IdentityId, Instance, Shape, Sides};
use crate::cyclotomic::CycloNumber;
use crate::error::Result;

pub(super) fn shape(id: IdentityId, n: usize) -> Option<Shape> {
    use ArgDomain::*;
    let (chars, args) = match id {
        IdentityId::GaussRefl => (1, vec![]),
        IdentityId::JacobiGauss => (n, vec![]),
        IdentityId::PochChain => (3, vec![]),
        IdentityId::PochRefl | IdentityId::PochSign => (2, vec![]),
        IdentityId::OneFZero => (1, vec![All]),
        IdentityId::Euler2F1 => (3, vec![All]),
        IdentityId::Reduction => (2 * n, vec![All]),
        IdentityId::TwoF1Eps => (2, vec![All]),
        IdentityId::Pfaff => (3, vec![NotOne]),
        IdentityId::VandermondeI | IdentityId::VandermondeII => (3, vec![]),
        IdentityId::Saalschutz => (4, vec![]),
        _ => return None,
    };
    Some(Shape { chars, args })
}

fn set_eq(ctx: &Ctx, a: &[i64], b: &[i64]) -> bool {
    let norm = |v: &[i64]| {
        let mut v: Vec<i64> = v.iter().map(|e| e.rem_euclid(ctx.q1)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    norm(a) == norm(b)
}

/// {α, μ̄} = {ε, c} as sets.
fn vandermonde_exceptional(ctx: &Ctx, ch: &[i64]) -> bool {
    let (a, mu, c) = (ch[0], ch[1], ch[2]);
    set_eq(ctx, &[a, -mu], &[0, c])
}

pub(super) fn hypotheses(ctx: &Ctx, id: IdentityId, inst: &Instance) -> Option<bool> {
    let ch = &inst.chars;
    let nonzero = |i: usize| inst.args[i] != 0;
    Some(match id {
        IdentityId::GaussRefl
        | IdentityId::JacobiGauss
        | IdentityId::PochChain
        | IdentityId::PochRefl
        | IdentityId::PochSign
        | IdentityId::Reduction => true,
        IdentityId::OneFZero | IdentityId::TwoF1Eps => nonzero(0),
        IdentityId::Euler2F1 => !ctx.same(ch[1], ch[2]) && nonzero(0),
        IdentityId::Pfaff => !ctx.is_triv(ch[1]) && !ctx.same(ch[0], ch[2]),
        IdentityId::VandermondeI => !vandermonde_exceptional(ctx, ch),
        IdentityId::VandermondeII => vandermonde_exceptional(ctx, ch),
        IdentityId::Saalschutz => {
            !ctx.is_triv(ch[0]) && !ctx.same(ch[1], ch[3]) && !ctx.same(ch[0] + ch[1], ch[3])
        }
        _ => return None,
    })
}

pub(super) fn sides(ctx: &Ctx, id: IdentityId, inst: &Instance) -> Option<Result<Sides>> {
    let f = match id {
        IdentityId::GaussRefl => gauss_refl,
        IdentityId::JacobiGauss => jacobi_gauss,
        IdentityId::PochChain => poch_chain,
        IdentityId::PochRefl => poch_refl,
        IdentityId::PochSign => poch_sign,
        IdentityId::OneFZero => one_f_zero,
        IdentityId::Euler2F1 => euler_2f1,
        IdentityId::Reduction => reduction,
        IdentityId::TwoF1Eps => two_f1_eps,
        IdentityId::Pfaff => pfaff,
        IdentityId::VandermondeI => vandermonde_i,
        IdentityId::VandermondeII => vandermonde_ii,
        IdentityId::Saalschutz => saalschutz,
        _ => return None,
    };
    Some(f(ctx, inst))
}

fn gauss_refl(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let e = inst.chars[0];
    Ok(Sides {
        lhs: ctx.g(e) * ctx.gc(-e),
        rhs: ctx.chi(e, ctx.k.neg(1)).scale_int(ctx.q),
    })
}

fn jacobi_gauss(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let ch = &inst.chars;
    let lhs = ctx.j(ch);
    let rhs = if ch.iter().all(|&e| ctx.is_triv(e)) {
        ctx.rat(1 - (1 - ctx.q).pow(ch.len() as u32), ctx.q)
    } else {
        let num = ch
            .iter()
            .fold(CycloNumber::one(ctx.n_ord()), |acc, &e| acc * ctx.g(e));
        num * ctx.gc_inv(ch.iter().sum())
    };
    Ok(Sides { lhs, rhs })
}

fn poch_chain(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let (a, nu, mu) = (inst.chars[0], inst.chars[1], inst.chars[2]);
    let p = |x, y| {
        if inst.n == 1 {
            ctx.poch_c(x, y)
        } else {
            ctx.poch(x, y)
        }
    };
    Ok(Sides {
        lhs: p(a, nu + mu),
        rhs: p(a, nu) * p(a + nu, mu),
    })
}

fn poch_refl(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let (a, nu) = (inst.chars[0], inst.chars[1]);
    Ok(Sides {
        lhs: ctx.poch(a, nu) * ctx.poch_c(-a, -nu),
        rhs: ctx.chi(nu, ctx.k.neg(1)),
    })
}

fn poch_sign(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let (chi, phi) = (inst.chars[0], inst.chars[1]);
    let base = -chi - phi;
    // 1/(base)°_φ = g°(base)/g°(base φ)
    Ok(Sides {
        lhs: ctx.poch(chi, phi) * ctx.gc(base) * ctx.gc_inv(base + phi),
        rhs: ctx.chi(phi, ctx.k.neg(1)),
    })
}

fn one_f_zero(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let a = inst.chars[0];
    let lam = inst.args[0];
    let lhs = ctx.hgf(&[a], &[], lam)?;
    let rhs = if ctx.is_triv(a) && lam == 1 {
        ctx.int(1 - ctx.q)
    } else {
        ctx.chi(-a, ctx.k.sub(1, lam))
    };
    Ok(Sides { lhs, rhs })
}

fn euler_2f1(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let (a, b, c) = (inst.chars[0], inst.chars[1], inst.chars[2]);
    let lam = inst.args[0];
    let k = &ctx.k;
    let lhs = -(ctx.j(&[b, c - b]) * ctx.hgf(&[a, b], &[c], lam)?);
    let sum = ctx.char_sum(1..k.q(), |u| {
        prod(&[
            ctx.ex(b, u),
            ctx.ex(c - b, k.sub(1, u)),
            ctx.ex(-a, k.sub(1, k.mul(lam, u))),
        ])
    });
    let corr = (ctx.chi(-c, lam) * ctx.chi(c - b, k.sub(lam, 1)))
        .scale_int(ctx.delta(a) * (1 - ctx.q));
    Ok(Sides {
        lhs,
        rhs: sum + corr,
    })
}

fn reduction(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let n = inst.n;
    let a = &inst.chars[..n];
    let b = &inst.chars[n..2 * n - 1];
    let c = inst.chars[2 * n - 1];
    let lam = inst.args[0];
    let mut big_a = a.to_vec();
    big_a.push(c);
    let mut big_b = b.to_vec();
    big_b.push(c);
    let lhs = ctx.hgf(&big_a, &big_b, lam)?;

    let mut tail = ctx.gc(0) * ctx.gc_inv(-c);
    for &ai in a {
        tail = tail * ctx.poch(ai, -c);
    }
    for &bi in b {
        tail = tail * ctx.gc(bi) * ctx.gc_inv(bi - c);
    }
    let tail = tail * ctx.chi(-c, lam) * ctx.rat(1, ctx.q);
    let rhs = (ctx.hgf(a, b, lam)? + tail) * ctx.qpow(ctx.delta(c));
    Ok(Sides { lhs, rhs })
}

fn two_f1_eps(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let (a, c) = (inst.chars[0], inst.chars[1]);
    let lam = inst.args[0];
    let lhs = ctx.hgf(&[a, 0], &[c], lam)?;
    let rhs = if lam == 1 && ctx.same(a, c) {
        ctx.int(1) + ctx.qpow(ctx.delta(a)).scale_int(1 - ctx.q)
    } else {
        ctx.g(a - c) * ctx.gc(c) * ctx.g_inv(a)
            * ctx.chi(-c, lam)
            * ctx.chi(c - a, ctx.k.sub(1, lam))
            + ctx.int(1)
    };
    Ok(Sides { lhs, rhs })
}

fn pfaff(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let (a, b, c) = (inst.chars[0], inst.chars[1], inst.chars[2]);
    let lam = inst.args[0];
    let k = &ctx.k;
    let lhs = ctx.chi(a, k.sub(1, lam)) * ctx.hgf(&[a, b], &[c], lam)?;
    let arg = k.div(lam, k.sub(lam, 1))?;
    let corr = (ctx.gc(c) * ctx.g_inv(a) * ctx.g_inv(c - a))
        * ctx.chi(-c, lam)
        * ctx.chi(a, k.sub(lam, 1));
    let rhs = ctx.hgf(&[a, c - b], &[c], arg)? + corr.scale_int(ctx.delta(c - b) * (1 - ctx.q));
    Ok(Sides { lhs, rhs })
}

fn vandermonde_main(ctx: &Ctx, ch: &[i64]) -> Result<(CycloNumber, CycloNumber)> {
    let (a, mu, c) = (ch[0], ch[1], ch[2]);
    let lhs = ctx.hgf(&[a, -mu], &[c], 1)?;
    let main = ctx.qpow(-ctx.delta(c - a)) * ctx.poch(c - a, mu) * ctx.gc(c) * ctx.gc_inv(c + mu);
    Ok((lhs, main))
}

fn vandermonde_i(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let (lhs, rhs) = vandermonde_main(ctx, &inst.chars)?;
    Ok(Sides { lhs, rhs })
}

fn vandermonde_ii(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let (lhs, main) = vandermonde_main(ctx, &inst.chars)?;
    let c = inst.chars[2];
    let corr = ctx.rat((1 - ctx.q).pow(2) * (1 + ctx.q).pow(ctx.delta(c) as u32), ctx.q);
    Ok(Sides {
        lhs,
        rhs: main - corr,
    })
}

fn saalschutz(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let (a, b, nu, c) = (inst.chars[0], inst.chars[1], inst.chars[2], inst.chars[3]);
    let lhs = ctx.hgf(&[a, b, -nu], &[c, a + b - c - nu], 1)?;
    let d = c - a - b;
    let first = ctx.qpow(-ctx.delta(c - a))
        * ctx.poch(c - a, nu)
        * ctx.poch(c - b, nu)
        * ctx.gc(c)
        * ctx.gc_inv(c + nu)
        * ctx.g(d)
        * ctx.g_inv(d + nu);
    let second = ctx.gc(c) * ctx.gc(a + b - c - nu) * ctx.g_inv(a) * ctx.g_inv(b) * ctx.g_inv(-nu);
    let deltas = ctx.delta(c - a) * ctx.delta(nu) + ctx.delta(b) * ctx.delta(c + nu);
    let third = ctx.rat(deltas * (1 - ctx.q).pow(2), ctx.q);
    Ok(Sides {
        lhs,
        rhs: first + second - third,
    })
}
