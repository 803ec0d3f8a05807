//! Canonical forms on extended multiphase space.

use msc_core::calculus::{exterior_derivative, lie_derivative};
use msc_core::hamiltonian::kernel_basis;
use msc_core::multiphase::{omega, sigma, theta};

use super::{ensure, ensure_eq, run, Context, Identity, OrFail, Outcome};

pub const IDENTITIES: &[(&str, Identity)] = &[
    ("euler field scales theta", euler_theta),
    ("euler field scales omega", euler_omega),
    ("euler field annihilates theta", euler_contract_theta),
    ("euler field contracts omega to minus theta", euler_contract_omega),
    ("omega is minus d theta", omega_exact),
    ("omega is closed", omega_closed),
    ("canonical forms are invariant", invariance),
    ("pullback commutes with d", pullback_d),
    ("omega has no vector kernel", no_vector_kernel),
];

pub fn euler_theta(ctx: &Context, _: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "euler field scales theta", 1, |_, _| {
        let th = theta(ch).or_fail()?;
        ensure_eq(&lie_derivative(&th, &sigma(ch).or_fail()?).or_fail()?, &th, "L_Sigma theta")
    })
}

pub fn euler_omega(ctx: &Context, _: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "euler field scales omega", 1, |_, _| {
        let om = omega(ch).or_fail()?;
        ensure_eq(&lie_derivative(&om, &sigma(ch).or_fail()?).or_fail()?, &om, "L_Sigma omega")
    })
}

pub fn euler_contract_theta(ctx: &Context, _: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "euler field annihilates theta", 1, |_, _| {
        let c = theta(ch).or_fail()?.contract(&sigma(ch).or_fail()?);
        ensure(c.is_zero(), || format!("i_Sigma theta = {c}"))
    })
}

pub fn euler_contract_omega(ctx: &Context, _: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "euler field contracts omega to minus theta", 1, |_, _| {
        let c = omega(ch).or_fail()?.contract(&sigma(ch).or_fail()?);
        ensure_eq(&c, &-theta(ch).or_fail()?, "i_Sigma omega")
    })
}

pub fn omega_exact(ctx: &Context, _: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "omega is minus d theta", 1, |_, _| {
        ensure_eq(&omega(ch).or_fail()?, &-exterior_derivative(&theta(ch).or_fail()?), "omega vs -d theta")
    })
}

pub fn omega_closed(ctx: &Context, _: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "omega is closed", 1, |_, _| {
        let d = exterior_derivative(&omega(ch).or_fail()?);
        ensure(d.is_zero(), || format!("d omega = {d}"))
    })
}

pub fn invariance(ctx: &Context, trials: usize) -> Outcome {
    let (ch, base) = (ctx.extended(), ctx.base());
    run(ctx, "canonical forms are invariant", trials, |s, _| {
        let change = s.affine_change(base);
        let (th, om) = (theta(ch).or_fail()?, omega(ch).or_fail()?);
        ensure_eq(&change.pullback_form(&th).or_fail()?, &th, "pulled back theta")?;
        ensure_eq(&change.pullback_form(&om).or_fail()?, &om, "pulled back omega")
    })
}

pub fn pullback_d(ctx: &Context, trials: usize) -> Outcome {
    let (ch, base) = (ctx.extended(), ctx.base());
    run(ctx, "pullback commutes with d", trials, |s, _| {
        let change = s.affine_change(base);
        let p = s.below(3);
        let alpha = s.form(ch, p);
        let lhs = change.pullback_form(&exterior_derivative(&alpha)).or_fail()?;
        let rhs = exterior_derivative(&change.pullback_form(&alpha).or_fail()?);
        ensure_eq(&lhs, &rhs, "pullback of d")
    })
}

pub fn no_vector_kernel(ctx: &Context, _: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "omega has no vector kernel", 1, |_, _| {
        let basis = kernel_basis(ch, 1).or_fail()?;
        ensure(basis.elements.is_empty(), || format!("{} kernel vectors", basis.elements.len()))
    })
}
