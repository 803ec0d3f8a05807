//! Hamiltonian multivector fields, Poisson forms and their bracket.

use msc_core::calculus::{exterior_derivative, schouten_bracket};
use msc_core::hamiltonian::{
    bracket_formula, bracket_lie_form, bracket_pair, de_donder_weyl_field, hamiltonian_field_for_function,
    is_exact_hamiltonian, is_poisson_form, kernel_basis, momentum_map, poisson_bracket, solve_hamiltonian_field,
    uncorrected_bracket, uncorrected_bracket_pair, wedge_all, HamiltonianPair,
};
use msc_core::multiphase::{omega, theta};
use msc_core::random::Sampler;
use msc_core::{Chart, Form, Multivector, Scalar};

use super::{ensure, ensure_eq, run, Context, Identity, OrFail, Outcome, Trial};

pub const IDENTITIES: &[(&str, Identity)] = &[
    ("bracket field contracts omega exactly", bracket_field_contraction),
    ("kernel is an ideal", kernel_ideal),
    ("omega cyclic identity", omega_cyclic),
    ("theta cyclic identity", theta_cyclic),
    ("bracket expressions agree", bracket_expressions),
    ("bracket antisymmetry", antisymmetry),
    ("bracket jacobi", jacobi),
    ("uncorrected bracket breaks jacobi", uncorrected_jacobi),
    ("bracket ignores kernel shifts", kernel_shift),
    ("d of bracket", d_bracket),
    ("exact fields close under schouten", exact_closure),
    ("momentum map is hamiltonian", momentum_map_hamiltonian),
    ("momentum map is an antihomomorphism", momentum_map_bracket),
    ("function fields", function_fields),
    ("de donder weyl field", de_donder_weyl),
];

fn field(s: &mut Sampler, ch: Chart) -> Result<Multivector, String> {
    Ok(s.locally_hamiltonian_pair(ch).or_fail()?.field().clone())
}

fn contract_all(form: &Form, fields: &[&Multivector]) -> Form {
    fields.iter().rev().fold(form.clone(), |acc, x| acc.contract(x))
}

pub fn bracket_field_contraction(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "bracket field contracts omega exactly", trials, |s, _| {
        let (x, y) = (field(s, ch)?, field(s, ch)?);
        let (r, u) = (x.degree(), y.degree());
        let om = omega(ch).or_fail()?;
        let lhs = om.contract(&schouten_bracket(&x, &y).or_fail()?);
        let rhs = exterior_derivative(&contract_all(&om, &[&x, &y])).signed((r - 1) * u);
        ensure_eq(&lhs, &rhs, "i_[X,Y] omega")
    })
}

pub fn kernel_ideal(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "kernel is an ideal", trials, |s, _| {
        let k = 2 + s.below(ch.n());
        let xi = s.kernel_field(ch, k);
        let x = field(s, ch)?;
        let om = omega(ch).or_fail()?;
        ensure(om.contract(&xi).is_zero(), || format!("{xi} is not in the kernel"))?;
        let c = om.contract(&schouten_bracket(&xi, &x).or_fail()?);
        ensure(c.is_zero(), || format!("i_[xi,X] omega = {c} for xi = {xi}, X = {x}"))
    })
}

fn triple(s: &mut Sampler, ch: Chart) -> Result<[Multivector; 3], String> {
    Ok([field(s, ch)?, field(s, ch)?, field(s, ch)?])
}

pub fn omega_cyclic(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "omega cyclic identity", trials, |s, _| {
        let f = triple(s, ch)?;
        let om = omega(ch).or_fail()?;
        let deg = |k: usize| f[k].degree();
        let (r, u, t) = (deg(0), deg(1), deg(2));
        let mut lhs: Option<Form> = None;
        for k in 0..3 {
            let (a, b, c) = (k, (k + 1) % 3, (k + 2) % 3);
            let term = exterior_derivative(&contract_all(&om, &[&f[b], &f[c]]))
                .contract(&f[a])
                .signed(deg(a) * (deg(c) + 1));
            lhs = Some(match lhs {
                None => term,
                Some(acc) => acc.try_add(&term).or_fail()?,
            });
        }
        let rhs = exterior_derivative(&contract_all(&om, &[&f[0], &f[1], &f[2]])).signed(r * t);
        let lhs = lhs.unwrap();
        ensure(lhs.try_add(&-rhs.clone()).map(|d| d.is_zero()).unwrap_or(lhs.is_zero() && rhs.is_zero()), || {
            format!("degrees ({r},{u},{t}): lhs = {lhs}, rhs = {rhs}")
        })
    })
}

pub fn theta_cyclic(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "theta cyclic identity", trials, |s, _| {
        let f = triple(s, ch)?;
        let (om, th) = (omega(ch).or_fail()?, theta(ch).or_fail()?);
        let deg = |k: usize| f[k].degree();
        let (r, u, t) = (deg(0), deg(1), deg(2));
        let mut lhs: Option<Form> = None;
        for k in 0..3 {
            let (a, b, c) = (k, (k + 1) % 3, (k + 2) % 3);
            let sign = deg(a) * (deg(c) + 1);
            let first = exterior_derivative(&contract_all(&th, &[&f[b], &f[c]])).contract(&f[a]).signed(sign);
            let second =
                contract_all(&exterior_derivative(&th.contract(&f[c])), &[&f[a], &f[b]]).signed(sign + deg(b));
            let term = first.try_add(&-second).or_fail()?;
            lhs = Some(match lhs {
                None => term,
                Some(acc) => acc.try_add(&term).or_fail()?,
            });
        }
        let all = [&f[0], &f[1], &f[2]];
        let rhs_omega = contract_all(&om, &all).signed(r * t + r + u + t);
        let rhs_theta = exterior_derivative(&contract_all(&th, &all)).signed(r * t);
        let lhs = lhs.unwrap();
        let residual = lhs.try_add(&-rhs_omega.clone()).and_then(|d| d.try_add(&-rhs_theta.clone()));
        let ok = match residual {
            Ok(d) => d.is_zero(),
            Err(_) => lhs.is_zero() && rhs_omega.is_zero() && rhs_theta.is_zero(),
        };
        ensure(ok, || format!("degrees ({r},{u},{t}): lhs = {lhs}, rhs = {rhs_omega} + {rhs_theta}"))
    })
}

/// A Poisson pair of a kind chosen by `k`: a function, a momentum map image or a horizontal form.
fn poisson(s: &mut Sampler, ch: Chart, k: usize) -> Result<HamiltonianPair, String> {
    s.poisson_pair(ch, k).or_fail()
}

pub fn bracket_expressions(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "bracket expressions agree", trials, |s, k| {
        let (a, b) = (poisson(s, ch, k)?, poisson(s, ch, k + 1)?);
        let lhs = bracket_formula(&a, &b).or_fail()?;
        let rhs = bracket_lie_form(&a, &b).or_fail()?;
        ensure_eq(&lhs, &rhs, "contraction form vs Lie derivative form")
    })
}

pub fn antisymmetry(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "bracket antisymmetry", trials, |s, k| {
        let (a, b) = (poisson(s, ch, k)?, poisson(s, ch, k + 1)?);
        let fg = poisson_bracket(&a, &b).or_fail()?;
        let gf = poisson_bracket(&b, &a).or_fail()?;
        ensure_eq(&gf, &-fg.signed((a.r() - 1) * (b.r() - 1)), "{g,f} vs -(-1)^{(r-1)(s-1)}{f,g}")
    })
}

fn degree_one(s: &mut Sampler, ch: Chart, kind: usize) -> Result<HamiltonianPair, String> {
    for _ in 0..64 {
        let pair = poisson(s, ch, kind)?;
        if pair.r() == 1 {
            return Ok(pair);
        }
    }
    Err("no Poisson form of degree n - 1 generated".into())
}

/// Three Poisson pairs whose nested brackets have non-negative degree: a
/// function with two forms of degree `n - 1` on even trials, three forms of
/// degree `n - 1` mixing momentum map images and horizontal forms on odd ones.
fn poisson_triple(s: &mut Sampler, ch: Chart, k: usize) -> Result<[HamiltonianPair; 3], String> {
    if k % 2 == 1 {
        return Ok([degree_one(s, ch, 1)?, degree_one(s, ch, 2)?, degree_one(s, ch, 1 + (k / 2) % 2)?]);
    }
    let mut t = [poisson(s, ch, 0)?, degree_one(s, ch, 1)?, degree_one(s, ch, 2)?];
    t.rotate_left((k / 2) % 3);
    Ok(t)
}

type Bracket = fn(&HamiltonianPair, &HamiltonianPair) -> msc_core::Result<Form>;
type PairBracket = fn(&HamiltonianPair, &HamiltonianPair) -> msc_core::Result<HamiltonianPair>;

fn jacobi_sum(t: &[HamiltonianPair; 3], outer: Bracket, inner: PairBracket) -> Result<Form, String> {
    let mut total: Option<Form> = None;
    for k in 0..3 {
        let (a, b, c) = (&t[k], &t[(k + 1) % 3], &t[(k + 2) % 3]);
        let nested = outer(a, &inner(b, c).or_fail()?).or_fail()?.signed((a.r() - 1) * (c.r() - 1));
        total = Some(match total {
            None => nested,
            Some(acc) => acc.try_add(&nested).or_fail()?,
        });
    }
    Ok(total.unwrap())
}

fn describe(t: &[HamiltonianPair; 3]) -> String {
    t.iter().map(|p| format!("[{}]", p.form())).collect::<Vec<_>>().join(", ")
}

pub fn jacobi(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "bracket jacobi", trials, |s, k| {
        let t = poisson_triple(s, ch, k)?;
        let sum = jacobi_sum(&t, poisson_bracket, bracket_pair)?;
        ensure(sum.is_zero(), || format!("cyclic sum = {sum} for {}", describe(&t)))
    })
}

/// Negative control: dropping the exact correction terms must break Jacobi on some triple.
/// For `n = 1` every bracket is a function and the corrections vanish, so no trials run.
pub fn uncorrected_jacobi(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    let trials = if ch.n() > 1 { trials } else { 0 };
    let mut broken = false;
    let mut outcome = run(ctx, "uncorrected bracket breaks jacobi", trials, |s, k| {
        let t = poisson_triple(s, ch, k)?;
        if !jacobi_sum(&t, uncorrected_bracket, uncorrected_bracket_pair)?.is_zero() {
            broken = true;
        }
        Ok(())
    });
    if trials > 0 && outcome.passed() && !broken {
        outcome.failure = Some("the uncorrected bracket satisfied Jacobi on every triple".into());
    }
    outcome
}

pub fn kernel_shift(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "bracket ignores kernel shifts", trials, |s, k| {
        let (a, b) = (poisson(s, ch, k)?, poisson(s, ch, k + 1)?);
        let expected = poisson_bracket(&a, &b).or_fail()?;
        let shifted_a = a.with_field(a.field().clone() + s.kernel_field(ch, a.r())).or_fail()?;
        let shifted_b = b.with_field(b.field().clone() + s.kernel_field(ch, b.r())).or_fail()?;
        ensure_eq(&poisson_bracket(&shifted_a, &b).or_fail()?, &expected, "shifted X")?;
        ensure_eq(&poisson_bracket(&a, &shifted_b).or_fail()?, &expected, "shifted Y")
    })
}

pub fn d_bracket(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "d of bracket", trials, |s, k| {
        let mut pairs = (poisson(s, ch, k)?, poisson(s, ch, k + 1)?);
        while pairs.0.r() + pairs.1.r() > ch.n() + 1 {
            pairs = (poisson(s, ch, k)?, poisson(s, ch, k + 1)?);
        }
        let (a, b) = pairs;
        let lhs = exterior_derivative(&poisson_bracket(&a, &b).or_fail()?);
        let rhs = omega(ch).or_fail()?.contract(&schouten_bracket(b.field(), a.field()).or_fail()?);
        ensure_eq(&lhs, &rhs, "d{f,g} vs i_[Y,X] omega")
    })
}

pub fn exact_closure(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "exact fields close under schouten", trials, |s, _| {
        let (r, u) = (1 + s.below(ch.n()), 1 + s.below(ch.n()));
        let (x, y) = (s.exact_hamiltonian_field(ch, r), s.exact_hamiltonian_field(ch, u));
        ensure(is_exact_hamiltonian(&x).or_fail()? && is_exact_hamiltonian(&y).or_fail()?, || {
            "generator produced a field that is not exact Hamiltonian".into()
        })?;
        let b = schouten_bracket(&x, &y).or_fail()?;
        ensure(is_exact_hamiltonian(&b).or_fail()?, || format!("[X,Y] = {b} is not exact for X = {x}, Y = {y}"))
    })
}

pub fn momentum_map_hamiltonian(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "momentum map is hamiltonian", trials, |s, _| {
        let r = 1 + s.below(ch.n());
        let x = s.exact_hamiltonian_field(ch, r);
        let j = momentum_map(&x).or_fail()?;
        ensure_eq(&exterior_derivative(j.form()), &omega(ch).or_fail()?.contract(&x), "dJ(X) vs i_X omega")?;
        let class = is_poisson_form(j.form()).or_fail()?;
        ensure(class.admits_bracket(), || format!("J(X) = {} is {class}", j.form()))
    })
}

/// Degree pairs for which `[Y, X]` still has a momentum map image.
fn momentum_degrees(n: usize, k: usize) -> (usize, usize) {
    let options: Vec<(usize, usize)> = [(1, 1), (1, 2), (2, 2)].into_iter().filter(|(r, u)| r + u - 1 <= n).collect();
    options[k % options.len()]
}

/// `{J(X), J(Y)} = J([Y, X])`.
pub fn momentum_map_pair(x: &Multivector, y: &Multivector) -> Trial {
    let (jx, jy) = (momentum_map(x).or_fail()?, momentum_map(y).or_fail()?);
    let lhs = poisson_bracket(&jx, &jy).or_fail()?;
    let rhs = momentum_map(&schouten_bracket(y, x).or_fail()?).or_fail()?;
    ensure_eq(&lhs, rhs.form(), "{J(X),J(Y)} vs J([Y,X])")
}

pub fn momentum_map_bracket(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "momentum map is an antihomomorphism", trials, |s, k| {
        let (r, u) = momentum_degrees(ch.n(), k);
        let (x, y) = (s.exact_hamiltonian_field(ch, r), s.exact_hamiltonian_field(ch, u));
        momentum_map_pair(&x, &y)
    })
}

pub fn function_fields(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.extended();
    run(ctx, "function fields", trials, |s, _| {
        let f = s.scalar(ch);
        let x = hamiltonian_field_for_function(&f).or_fail()?;
        let df = exterior_derivative(&Form::scalar(f.clone()));
        ensure_eq(&omega(ch).or_fail()?.contract(&x), &df, "i_X omega vs df")?;
        let solved = solve_hamiltonian_field(&Form::scalar(f)).or_fail()?;
        let difference = x.clone() - solved.field().clone();
        ensure(kernel_basis(ch, ch.n()).or_fail()?.contains(&difference), || {
            format!("explicit and solved fields differ outside the kernel by {difference}")
        })
    })
}

pub fn de_donder_weyl(ctx: &Context, trials: usize) -> Outcome {
    let (ch, ordinary) = (ctx.extended(), ctx.ordinary());
    run(ctx, "de donder weyl field", trials, |s, _| {
        let hamiltonian = s.scalar(ordinary);
        let xs = de_donder_weyl_field(&hamiltonian).or_fail()?;
        let x = wedge_all(ch, &xs);
        let energy = Scalar::coordinate(ch, ch.energy().unwrap());
        let h = -(&hamiltonian.transfer(ch).or_fail()? + &energy);
        let dh = exterior_derivative(&Form::scalar(h));
        ensure_eq(&omega(ch).or_fail()?.contract(&x), &dh, &format!("i_X omega vs dh for H = {hamiltonian}"))
    })
}
