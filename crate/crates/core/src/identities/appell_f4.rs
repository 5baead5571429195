//! Appell's F_4: the unit-argument expansion, the ₂F₁·₂F₁ = ₃F₂ lemma, the
//! η-expansions at (x(1−y), y(1−x)), the Euler-type double sum and the
//! balanced case.

use super::{prod, ArgDomain, Ctx, IdentityId, Instance, Shape, Sides};
use crate::cyclotomic::CycloNumber;
use crate::error::Result;
use crate::f4::{f4_constants, F4Chars};
use crate::hypergeometric::LauricellaParams;

pub(super) fn shape(id: IdentityId, _n: usize) -> Option<Shape> {
    use ArgDomain::*;
    let (chars, args) = match id {
        IdentityId::F4UnitArg
        | IdentityId::KeyProp
        | IdentityId::F4Expansion
        | IdentityId::F4Euler
        | IdentityId::F4Balanced => (4, vec![NotOne, NotOne]),
        IdentityId::Product3F2 => (6, vec![]),
        _ => return None,
    };
    Some(Shape { chars, args })
}

fn chars(inst: &Instance) -> F4Chars {
    let c = &inst.chars;
    F4Chars::new(c[0], c[1], c[2], c[3])
}

/// a, b ∉ {ε, c_1, c_2}.
fn generic(ctx: &Ctx, ch: &F4Chars) -> bool {
    [ch.a, ch.b]
        .iter()
        .all(|&e| !ctx.is_triv(e) && !ctx.same(e, ch.c1) && !ctx.same(e, ch.c2))
}

pub(super) fn hypotheses(ctx: &Ctx, id: IdentityId, inst: &Instance) -> Option<bool> {
    let ch = chars(inst);
    let units = inst.args.iter().all(|&x| x != 0);
    let unbalanced = !ctx.is_triv(ch.balance());
    Some(match id {
        IdentityId::F4UnitArg => true,
        IdentityId::Product3F2 | IdentityId::F4Expansion => generic(ctx, &ch) && unbalanced,
        IdentityId::KeyProp => generic(ctx, &ch) && unbalanced && units,
        IdentityId::F4Euler => generic(ctx, &ch) && units,
        IdentityId::F4Balanced => generic(ctx, &ch) && !unbalanced && units,
        _ => return None,
    })
}

pub(super) fn sides(ctx: &Ctx, id: IdentityId, inst: &Instance) -> Option<Result<Sides>> {
    let f = match id {
        IdentityId::F4UnitArg => unit_arg,
        IdentityId::Product3F2 => product_3f2,
        IdentityId::KeyProp => key_prop,
        IdentityId::F4Expansion => expansion,
        IdentityId::F4Euler => euler,
        IdentityId::F4Balanced => balanced,
        _ => return None,
    };
    Some(f(ctx, inst))
}

fn f4(ctx: &Ctx, ch: &F4Chars, l1: u32, l2: u32) -> Result<CycloNumber> {
    ctx.lauricella(&LauricellaParams::fc(ch.a, ch.b, vec![ch.c1, ch.c2]), &[l1, l2])
}

/// F_4 at (x(1−y), y(1−x)).
fn f4_at(ctx: &Ctx, ch: &F4Chars, x: u32, y: u32) -> Result<CycloNumber> {
    let k = &ctx.k;
    f4(ctx, ch, k.mul(x, k.sub(1, y)), k.mul(y, k.sub(1, x)))
}

fn inv_q1(ctx: &Ctx, power: u32) -> CycloNumber {
    ctx.rat(1, (1 - ctx.q).pow(power))
}

fn unit_arg(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let ch = chars(inst);
    let (x, y) = (inst.args[0], inst.args[1]);
    let k = &ctx.k;
    let denom = k.mul(k.sub(1, x), k.sub(1, y));
    let l1 = k.div(k.neg(x), denom)?;
    let l2 = k.div(k.neg(y), denom)?;
    let lhs = ctx.chi(-ch.a, k.sub(1, x)) * ctx.chi(-ch.b, k.sub(1, y)) * f4(ctx, &ch, l1, l2)?;

    let ra = ctx.t().ratio_row(ch.a, 0, false);
    let rb = ctx.t().ratio_row(ch.b, 0, false);
    let mut rhs = CycloNumber::zero(ctx.q1 as u64);
    for mu in 0..ctx.q1 {
        let Some(ex_mu) = ctx.ex(mu, x) else { continue };
        for nu in 0..ctx.q1 {
            let Some(ex_nu) = ctx.ex(nu, y) else { continue };
            let h1 = ctx.hgf(&[ch.b + nu, -mu], &[ch.c1], 1)?;
            let h2 = ctx.hgf(&[ch.a + mu, -nu], &[ch.c2], 1)?;
            let term = &ra[mu as usize] * &rb[nu as usize] * h1 * h2;
            rhs += &term.mul_root(ex_mu + ex_nu);
        }
    }
    Ok(Sides {
        lhs,
        rhs: rhs * inv_q1(ctx, 2),
    })
}

fn product_3f2(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let ch = chars(inst);
    let (mu, nu) = (inst.chars[4], inst.chars[5]);
    let F4Chars { a, b, c1, c2 } = ch;
    let lhs = ctx.hgf(&[b + nu, -mu], &[c1], 1)? * ctx.hgf(&[a + mu, -nu], &[c2], 1)?;

    let inv_c = ctx.gc(c1) * ctx.gc_inv(c1 + mu) * ctx.gc(c2) * ctx.gc_inv(c2 + nu);
    let first = ctx.poch(c1 - b, mu)
        * ctx.poch(c2 - a, nu)
        * &inv_c
        * ctx.hgf(
            &[-ch.balance(), -mu, -nu],
            &[b - c1 - mu, a - c2 - nu],
            1,
        )?;
    let second = ctx.j(&[a - c2, b - c1]) * ctx.poch_c(0, mu) * ctx.poch_c(0, nu) * &inv_c;
    let consts = f4_constants(ctx.t(), &ch, 1, 1);
    let corr = (consts.c1.scale_int(ctx.delta(c1 + mu) * ctx.delta(b + nu))
        + consts.c2.scale_int(ctx.delta(a + mu) * ctx.delta(c2 + nu)))
        * ctx.rat((1 - ctx.q).pow(2), ctx.q);
    Ok(Sides {
        lhs,
        rhs: first - second - corr,
    })
}

/// Σ_η (a)_η (b)_η (ab\bar{c_1c_2})_η / ((ε)°_η (c_1)°_η (c_2)°_η) η(z) · t(η).
fn eta_sum<F>(ctx: &Ctx, ch: &F4Chars, z: u32, mut term: F) -> Result<CycloNumber>
where
    F: FnMut(i64) -> Result<CycloNumber>,
{
    let t = ctx.t();
    let r1 = t.ratio_row(ch.a, 0, false);
    let r2 = t.ratio_row(ch.b, ch.c1, false);
    let r3 = t.ratio_row(-ch.balance(), ch.c2, false);
    let mut acc = CycloNumber::zero(ctx.q1 as u64);
    for eta in 0..ctx.q1 {
        let Some(e) = ctx.ex(eta, z) else { continue };
        let i = eta as usize;
        let w = &r1[i] * &r2[i] * &r3[i];
        acc += &(w * term(eta)?).mul_root(e);
    }
    Ok(acc)
}

fn key_prop(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let ch = chars(inst);
    let F4Chars { a, b, c1, c2 } = ch;
    let (x, y) = (inst.args[0], inst.args[1]);
    let k = &ctx.k;
    let consts = f4_constants(ctx.t(), &ch, x, y);
    let lhs = consts.j.clone() * f4_at(ctx, &ch, x, y)?;

    let (xm1, ym1) = (k.sub(x, 1), k.sub(y, 1));
    let z = k.div(k.mul(x, y), k.mul(xm1, ym1))?;
    let x1 = k.div(x, xm1)?;
    let y1 = k.div(y, ym1)?;
    let sum = eta_sum(ctx, &ch, z, |eta| {
        Ok(ctx.hgf(&[a + eta, c1 - b], &[c1 + eta], x1)?
            * ctx.hgf(&[b + eta, c2 - a], &[c2 + eta], y1)?)
    })?;
    let rhs = ctx.chi(-a, k.sub(1, x)) * ctx.chi(-b, k.sub(1, y)) * &consts.j * sum * inv_q1(ctx, 1)
        - &consts.s0
        - &consts.s1
        - &consts.s2;
    Ok(Sides { lhs, rhs })
}

fn expansion(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let ch = chars(inst);
    let F4Chars { a, b, c1, c2 } = ch;
    let (x, y) = (inst.args[0], inst.args[1]);
    let k = &ctx.k;
    let consts = f4_constants(ctx.t(), &ch, x, y);
    let lhs = consts.j.clone() * f4_at(ctx, &ch, x, y)?;
    let sum = eta_sum(ctx, &ch, k.mul(x, y), |eta| {
        Ok(ctx.hgf(&[a + eta, b + eta], &[c1 + eta], x)?
            * ctx.hgf(&[a + eta, b + eta], &[c2 + eta], y)?)
    })?;
    let rhs = &consts.j * sum * inv_q1(ctx, 1) - &consts.s0
        + &consts.r1
        + ctx.qpow(ctx.delta(a - b)) * &consts.r2;
    Ok(Sides { lhs, rhs })
}

fn euler(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let ch = chars(inst);
    let F4Chars { a, b, c1, c2 } = ch;
    let bal = ch.balance();
    let (x, y) = (inst.args[0], inst.args[1]);
    let k = &ctx.k;
    let consts = f4_constants(ctx.t(), &ch, x, y);
    let lhs = consts.j.clone() * f4_at(ctx, &ch, x, y)?;
    let sum = ctx.char_sum(ctx.unit_tuples(2), |uv| {
        let (u, v) = (uv[0], uv[1]);
        let xu = k.mul(x, u);
        let yv = k.mul(y, v);
        prod(&[
            ctx.ex(a, u),
            ctx.ex(b, v),
            ctx.ex(c1 - a, k.sub(1, u)),
            ctx.ex(c2 - b, k.sub(1, v)),
            ctx.ex(a - c1 - c2, k.sub(1, xu)),
            ctx.ex(b - c1 - c2, k.sub(1, yv)),
            ctx.ex(bal, k.sub(k.sub(1, xu), yv)),
        ])
    });
    Ok(Sides {
        lhs,
        rhs: sum - &consts.s0 - &consts.s1 - &consts.s2,
    })
}

fn balanced(ctx: &Ctx, inst: &Instance) -> Result<Sides> {
    let ch = chars(inst);
    let F4Chars { a, b, c1, c2 } = ch;
    let (x, y) = (inst.args[0], inst.args[1]);
    let k = &ctx.k;
    let consts = f4_constants(ctx.t(), &ch, x, y);
    let lhs = consts.j.clone() * f4_at(ctx, &ch, x, y)?;
    let on_line = i64::from(k.sub(k.sub(1, x), y) == 0);
    let rhs = &consts.j * ctx.hgf(&[a, b], &[c1], x)? * ctx.hgf(&[a, b], &[c2], y)?
        - consts.s0.scale_int(on_line * ctx.q);
    Ok(Sides { lhs, rhs })
}
