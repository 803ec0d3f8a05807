//! Schouten bracket axioms and Lie derivatives along multivector fields.

use msc_core::calculus::{exterior_derivative, lie_derivative, schouten_bracket};
use msc_core::exterior::Blade;
use msc_core::random::Sampler;
use msc_core::{Multivector, Scalar};

use super::{ensure, ensure_eq, run, Context, Identity, OrFail, Outcome};

pub const IDENTITIES: &[(&str, Identity)] = &[
    ("bracket degree", degree),
    ("graded antisymmetry", antisymmetry),
    ("vector field bracket", vector_fields),
    ("left leibniz", left_leibniz),
    ("right leibniz", right_leibniz),
    ("graded jacobi", jacobi),
    ("decomposable formula", decomposable),
    ("d commutes with lie derivative", d_lie),
    ("contraction with bracket", contraction_bracket),
    ("lie derivative along bracket", lie_bracket),
    ("lie derivative along wedge", lie_wedge),
];

fn tensor_degree(s: &mut Sampler, max: usize) -> usize {
    1 + s.below(max.max(1))
}

fn bracket(x: &Multivector, y: &Multivector) -> Result<Multivector, String> {
    schouten_bracket(x, y).or_fail()
}

pub fn degree(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "bracket degree", trials, |s, _| {
        let (r, u) = (tensor_degree(s, ctx.max_degree), tensor_degree(s, ctx.max_degree));
        let b = bracket(&s.multivector(ch, r), &s.multivector(ch, u))?;
        ensure(b.degree() == r + u - 1, || format!("degree {} for r={r} s={u}", b.degree()))
    })
}

pub fn antisymmetry(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "graded antisymmetry", trials, |s, _| {
        let (r, u) = (tensor_degree(s, ctx.max_degree), tensor_degree(s, ctx.max_degree));
        let (x, y) = (s.multivector(ch, r), s.multivector(ch, u));
        let lhs = bracket(&y, &x)?;
        let rhs = -bracket(&x, &y)?.signed((r - 1) * (u - 1));
        ensure_eq(&lhs, &rhs, "[Y,X] vs -(-1)^{(r-1)(s-1)}[X,Y]")
    })
}

pub fn vector_fields(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "vector field bracket", trials, |s, _| {
        let (x, y) = (s.multivector(ch, 1), s.multivector(ch, 1));
        let component = |v: &Multivector, a: usize| v.coefficient(Blade::single(a));
        let mut expected = Multivector::zero(ch, 1);
        for a in 0..ch.dim() {
            let mut c = Scalar::zero(ch);
            for b in 0..ch.dim() {
                c = &c + &(&component(&x, b) * &component(&y, a).partial(b).or_fail()?);
                c = &c - &(&component(&y, b) * &component(&x, a).partial(b).or_fail()?);
            }
            expected = expected + Multivector::coordinate(ch, a).scale(&c);
        }
        ensure_eq(&bracket(&x, &y)?, &expected, "Lie bracket of vector fields")
    })
}

pub fn left_leibniz(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "left leibniz", trials, |s, _| {
        let (r, u, t) = (tensor_degree(s, ctx.max_degree), tensor_degree(s, ctx.max_degree), tensor_degree(s, ctx.max_degree));
        let (x, y, z) = (s.multivector(ch, r), s.multivector(ch, u), s.multivector(ch, t));
        let lhs = bracket(&x, &y.wedge(&z))?;
        let rhs = bracket(&x, &y)?.wedge(&z) + y.wedge(&bracket(&x, &z)?).signed((r - 1) * u);
        ensure_eq(&lhs, &rhs, "[X,Y^Z]")
    })
}

pub fn right_leibniz(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "right leibniz", trials, |s, _| {
        let (r, u, t) = (tensor_degree(s, ctx.max_degree), tensor_degree(s, ctx.max_degree), tensor_degree(s, ctx.max_degree));
        let (x, y, z) = (s.multivector(ch, r), s.multivector(ch, u), s.multivector(ch, t));
        let lhs = bracket(&x.wedge(&y), &z)?;
        let rhs = bracket(&x, &z)?.wedge(&y).signed((t - 1) * u) + x.wedge(&bracket(&y, &z)?);
        ensure_eq(&lhs, &rhs, "[X^Y,Z]")
    })
}

pub fn jacobi(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "graded jacobi", trials, |s, _| {
        let degrees = [tensor_degree(s, ctx.max_degree), tensor_degree(s, ctx.max_degree), tensor_degree(s, ctx.max_degree)];
        let fields: Vec<Multivector> = degrees.iter().map(|&d| s.multivector(ch, d)).collect();
        let mut total = Multivector::zero(ch, degrees.iter().sum::<usize>() - 2);
        for k in 0..3 {
            let (a, b, c) = (k, (k + 1) % 3, (k + 2) % 3);
            let inner = bracket(&fields[b], &fields[c])?;
            total = total + bracket(&fields[a], &inner)?.signed((degrees[a] - 1) * (degrees[c] - 1));
        }
        ensure(total.is_zero(), || format!("cyclic sum = {total} for degrees {degrees:?}"))
    })
}

fn wedge_except(ch: msc_core::Chart, fields: &[Multivector], skip: usize) -> Multivector {
    fields
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != skip)
        .fold(Multivector::scalar(Scalar::one(ch)), |acc, (_, f)| acc.wedge(f))
}

pub fn decomposable(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "decomposable formula", trials, |s, _| {
        let (r, u) = (tensor_degree(s, ctx.max_degree), tensor_degree(s, ctx.max_degree));
        let xs: Vec<Multivector> = (0..r).map(|_| s.multivector(ch, 1)).collect();
        let ys: Vec<Multivector> = (0..u).map(|_| s.multivector(ch, 1)).collect();
        let lhs = bracket(&wedge_except(ch, &xs, r), &wedge_except(ch, &ys, u))?;
        let mut rhs = Multivector::zero(ch, r + u - 1);
        for i in 0..r {
            for j in 0..u {
                let term = bracket(&xs[i], &ys[j])?.wedge(&wedge_except(ch, &xs, i)).wedge(&wedge_except(ch, &ys, j));
                rhs = rhs + term.signed(i + j);
            }
        }
        ensure_eq(&lhs, &rhs, "decomposable expansion")
    })
}

fn lie(alpha: &msc_core::Form, x: &Multivector) -> Result<msc_core::Form, String> {
    lie_derivative(alpha, x).or_fail()
}

pub fn d_lie(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "d commutes with lie derivative", trials, |s, _| {
        let r = tensor_degree(s, ctx.max_degree);
        let p = (r + s.below(3)).min(ch.dim());
        let (x, alpha) = (s.multivector(ch, r), s.form(ch, p));
        let lhs = exterior_derivative(&lie(&alpha, &x)?);
        let rhs = lie(&exterior_derivative(&alpha), &x)?.signed(r - 1);
        ensure_eq(&lhs, &rhs, "d L_X")
    })
}

pub fn contraction_bracket(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "contraction with bracket", trials, |s, _| {
        let (r, u) = (tensor_degree(s, ctx.max_degree), tensor_degree(s, ctx.max_degree));
        let p = (r + u - 1 + s.below(3)).min(ch.dim());
        let (x, y, alpha) = (s.multivector(ch, r), s.multivector(ch, u), s.form(ch, p));
        let lhs = alpha.contract(&bracket(&x, &y)?);
        let rhs = lie(&alpha.contract(&y), &x)?.signed((r - 1) * u) - lie(&alpha, &x)?.contract(&y);
        ensure_eq(&lhs, &rhs, "i_[X,Y]")
    })
}

pub fn lie_bracket(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "lie derivative along bracket", trials, |s, _| {
        let (r, u) = (tensor_degree(s, ctx.max_degree), tensor_degree(s, ctx.max_degree));
        let p = (r + u - 1 + s.below(3)).min(ch.dim());
        let (x, y, alpha) = (s.multivector(ch, r), s.multivector(ch, u), s.form(ch, p));
        let lhs = lie(&alpha, &bracket(&x, &y)?)?;
        let rhs = lie(&lie(&alpha, &y)?, &x)?.signed((r - 1) * (u - 1)) - lie(&lie(&alpha, &x)?, &y)?;
        ensure_eq(&lhs, &rhs, "L_[X,Y]")
    })
}

pub fn lie_wedge(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "lie derivative along wedge", trials, |s, _| {
        let (r, u) = (tensor_degree(s, ctx.max_degree), tensor_degree(s, ctx.max_degree));
        let p = (r + u - 1 + s.below(3)).min(ch.dim());
        let (x, y, alpha) = (s.multivector(ch, r), s.multivector(ch, u), s.form(ch, p));
        let lhs = lie(&alpha, &x.wedge(&y))?;
        let rhs = lie(&alpha, &x)?.contract(&y).signed(u) + lie(&alpha.contract(&x), &y)?;
        ensure_eq(&lhs, &rhs, "L_{X^Y}")
    })
}
