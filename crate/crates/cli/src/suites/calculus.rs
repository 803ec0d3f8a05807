//! Exterior algebra and exterior derivative identities.

use msc_core::calculus::exterior_derivative;
use msc_core::multiphase::volume_contracted;
use msc_core::random::Sampler;
use msc_core::scalar::parity;
use msc_core::{Form, Multivector};

use super::{ensure, ensure_eq, run, Context, Identity, Outcome};

pub const IDENTITIES: &[(&str, Identity)] = &[
    ("wedge graded commutativity", commutativity),
    ("wedge associativity", associativity),
    ("contraction antiderivation", antiderivation),
    ("iterated contraction", iterated),
    ("d squared", d_squared),
    ("d leibniz", d_leibniz),
    ("contracted volume rules", contracted_volumes),
];

fn small(s: &mut Sampler, ch: msc_core::Chart) -> usize {
    s.below(4).min(ch.dim())
}

pub fn commutativity(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "wedge graded commutativity", trials, |s, _| {
        let (p, q) = (small(s, ch), small(s, ch));
        let (a, b) = (s.form(ch, p), s.form(ch, q));
        ensure_eq(&a.wedge(&b), &b.wedge(&a).signed(p * q), "forms")?;
        let (x, y) = (s.multivector(ch, p), s.multivector(ch, q));
        ensure_eq(&x.wedge(&y), &y.wedge(&x).signed(p * q), "multivectors")
    })
}

pub fn associativity(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "wedge associativity", trials, |s, _| {
        let (p, q, t) = (small(s, ch), small(s, ch), s.below(3));
        let (a, b, c) = (s.form(ch, p), s.form(ch, q), s.form(ch, t));
        ensure_eq(&a.wedge(&b).wedge(&c), &a.wedge(&b.wedge(&c)), "forms")?;
        let (x, y, z) = (s.multivector(ch, p), s.multivector(ch, q), s.multivector(ch, t));
        ensure_eq(&x.wedge(&y).wedge(&z), &x.wedge(&y.wedge(&z)), "multivectors")
    })
}

pub fn antiderivation(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "contraction antiderivation", trials, |s, _| {
        let (p, q) = (small(s, ch), s.below(3));
        let (a, b, v) = (s.form(ch, p), s.form(ch, q), s.multivector(ch, 1));
        let lhs = a.wedge(&b).contract(&v);
        let rhs = a.contract(&v).wedge(&b) + a.wedge(&b.contract(&v)).signed(p);
        ensure_eq(&lhs, &rhs, "i_v(a^b)")
    })
}

pub fn iterated(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "iterated contraction", trials, |s, _| {
        let (r, t) = (1 + s.below(2), 1 + s.below(2));
        let p = (r + t + s.below(2)).min(ch.dim());
        let (a, x, y) = (s.form(ch, p), s.multivector(ch, r), s.multivector(ch, t));
        ensure_eq(&a.contract(&x.wedge(&y)), &a.contract(&x).contract(&y), "i_{X^Y} = i_Y i_X")
    })
}

pub fn d_squared(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "d squared", trials, |s, _| {
        let p = small(s, ch);
        let a = s.form(ch, p);
        let dd = exterior_derivative(&exterior_derivative(&a));
        ensure(dd.is_zero(), || format!("dd({a}) = {dd}"))
    })
}

pub fn d_leibniz(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "d leibniz", trials, |s, _| {
        let (p, q) = (small(s, ch), s.below(3));
        let (a, b) = (s.form(ch, p), s.form(ch, q));
        let lhs = exterior_derivative(&a.wedge(&b));
        let rhs = exterior_derivative(&a).wedge(&b) + a.wedge(&exterior_derivative(&b)).signed(p);
        ensure_eq(&lhs, &rhs, "d(a^b)")
    })
}

/// `dx^k ^ d^n x_{mu_1..mu_r}` and `i_{d_k}` on contracted volume forms.
pub fn contracted_volumes(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    let n = ch.n();
    run(ctx, "contracted volume rules", trials, |s, _| {
        let r = s.below(n + 1);
        let mut tuple: Vec<usize> = Vec::new();
        while tuple.len() < r {
            let mu = s.below(n);
            if !tuple.contains(&mu) {
                tuple.push(mu);
            }
        }
        let kappa = s.below(n);
        let base = volume_contracted(ch, &tuple);
        let lhs = Form::coordinate(ch, ch.x(kappa)).wedge(&base);
        let mut rhs = Form::zero(ch, n - r + 1);
        if let Some(pos) = tuple.iter().position(|&mu| mu == kappa) {
            let mut rest = tuple.clone();
            rest.remove(pos);
            rhs = volume_contracted(ch, &rest).scale_rational(&parity(r - 1 - pos));
        }
        ensure_eq(&lhs, &rhs, &format!("dx{} wedge contracted volume {tuple:?}", kappa + 1))?;
        let mut longer = tuple.clone();
        longer.push(kappa);
        let contracted = base.contract(&Multivector::coordinate(ch, ch.x(kappa)));
        ensure_eq(&contracted, &volume_contracted(ch, &longer), "contraction appends an index")
    })
}
