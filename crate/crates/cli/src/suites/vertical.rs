//! Horizontal forms on ordinary multiphase space and their vertical structures.

use msc_core::connections::ConnectionData;
use msc_core::hamiltonian::{kernel_class, poisson_bracket, solve_hamiltonian_field, PoissonClass};
use msc_core::multiphase::theta;
use msc_core::random::Sampler;
use msc_core::scalar::integer;
use msc_core::vertical::{
    bullet_product, d_vertical, horizontal_components, horizontality_grade, project_eta, project_field,
    vertical_bracket, HorizontalMetric, Projection, VerticalCoframe, VerticalPair,
};
use msc_core::{Chart, Form, Multivector};

use super::{ensure, ensure_eq, run, Context, Identity, OrFail, Outcome};

pub const IDENTITIES: &[(&str, Identity)] = &[
    ("projection round trip", round_trip),
    ("vertical bracket agrees with pullback", bracket_agreement),
    ("vertical derivative squares to zero", d_vertical_squared),
    ("bullet associativity", bullet_associativity),
    ("bullet leibniz", bullet_leibniz),
];

/// The Euclidean metric or a diagonal one of mixed signature, by trial index.
pub fn metric(n: usize, k: usize) -> HorizontalMetric {
    if k.is_multiple_of(2) {
        return HorizontalMetric::euclidean(n);
    }
    let entries: Vec<_> = (0..n).map(|mu| integer([-1, 4, 1][mu.min(2)])).collect();
    HorizontalMetric::diagonal(&entries).expect("square determinant")
}

fn connection(s: &mut Sampler, base: Chart, k: usize) -> ConnectionData {
    match k % 3 {
        0 => ConnectionData::zero(base).expect("valid base chart"),
        1 => s.constant_connection(base),
        _ => s.connection(base),
    }
}

/// Projection back to the ordinary chart of a p-independent extended form.
fn to_ordinary(f: &Form, ordinary: Chart) -> Result<Form, String> {
    f.transfer(ordinary).or_fail()
}

pub fn round_trip(ctx: &Context, trials: usize) -> Outcome {
    let (ch, ext) = (ctx.ordinary(), ctx.extended());
    let n = ch.n();
    let zero = ConnectionData::zero(ctx.base()).expect("valid base chart");
    run(ctx, "projection round trip", if n > 1 { trials } else { 0 }, |s, _| {
        let r = 1 + s.below(n - 1);
        let f = s.kanatchikov_form(ch, r);
        let pulled = project_eta(&f).or_fail()?;
        let class = kernel_class(&pulled).or_fail()?;
        ensure(class == PoissonClass::Poisson, || format!("pullback of {f} is {class}"))?;
        let pair = solve_hamiltonian_field(&pulled).or_fail()?;
        let x = pair.field();
        ensure(horizontality_grade(x, Projection::Source) >= 1, || format!("field {x} is not 1-vertical"))?;
        let projected = project_field(x).or_fail()?;
        VerticalPair::new(f.clone(), projected, &zero).or_fail()?;
        // X_0^{mu2..mur} = -d_nu f^{mu2..mur nu}
        let components = horizontal_components(&f).or_fail()?;
        let mut expected = Multivector::zero(ext, r);
        let energy = ext.energy().unwrap();
        for (tuple, c) in &components {
            if tuple[..r - 1].windows(2).all(|w| w[0] < w[1]) {
                let nu = tuple[r - 1];
                let rest: Vec<usize> = std::iter::once(energy).chain(tuple[..r - 1].iter().map(|&mu| ext.x(mu))).collect();
                let term = Multivector::basis(ext, &rest).or_fail()?;
                expected = expected - term.scale(&c.partial(ch.x(nu)).or_fail()?.transfer(ext).or_fail()?);
            }
        }
        let mut actual = Multivector::zero(ext, r);
        for (blade, c) in x.terms() {
            if blade.indices().contains(&energy) {
                actual = actual + Multivector::from_terms(ext, r, [(*blade, c.clone())]);
            }
        }
        ensure_eq(&actual, &expected, "energy components")
    })
}

pub fn bracket_agreement(ctx: &Context, trials: usize) -> Outcome {
    let (ch, ext) = (ctx.ordinary(), ctx.extended());
    let n = ch.n();
    run(ctx, "vertical bracket agrees with pullback", if n > 1 { trials } else { 0 }, |s, k| {
        let conn = connection(s, ctx.base(), k % 2);
        let (r, u) = (1 + s.below(n - 1), 1 + s.below(n - 1));
        let (f, g) = (s.kanatchikov_form(ch, r), s.kanatchikov_form(ch, u));
        let (a, b) = (
            solve_hamiltonian_field(&project_eta(&f).or_fail()?).or_fail()?,
            solve_hamiltonian_field(&project_eta(&g).or_fail()?).or_fail()?,
        );
        let (x, y) = (a.field(), b.field());
        ensure(a.form().contract(y).is_zero(), || "i_Y f does not vanish".into())?;
        ensure(b.form().contract(x).is_zero(), || "i_X g does not vanish".into())?;
        ensure(theta(ext).or_fail()?.contract(x).contract(y).is_zero(), || "i_Y i_X theta does not vanish".into())?;
        let (va, vb) = (VerticalPair::solve(&f, &conn).or_fail()?, VerticalPair::solve(&g, &conn).or_fail()?);
        let vertical = project_eta(&vertical_bracket(&va, &vb, &conn).or_fail()?).or_fail()?;
        ensure_eq(&vertical, &poisson_bracket(&a, &b).or_fail()?, "vertical bracket vs extended bracket")
    })
}

pub fn d_vertical_squared(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.ordinary();
    run(ctx, "vertical derivative squares to zero", trials, |s, k| {
        let conn = connection(s, ctx.base(), k);
        let p = s.below(ch.n() + 1);
        let f = s.horizontal_form(ch, p);
        let once = d_vertical(&f, &conn).or_fail()?;
        let dd = VerticalCoframe::new(&conn, ch).or_fail()?.vertical_derivative(&once).or_fail()?;
        ensure(dd.is_zero(), || format!("d^V d^V {f} = {dd}"))
    })
}

pub fn bullet_associativity(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.ordinary();
    let n = ch.n();
    run(ctx, "bullet associativity", trials, |s, k| {
        let m = metric(n, k);
        let mut forms: Vec<Form> = Vec::new();
        for _ in 0..3 {
            let p = n - s.below(2.min(n) + 1);
            forms.push(s.horizontal_form(ch, p));
        }
        let bullet = |a: &Form, b: &Form| bullet_product(a, b, &m).or_fail();
        let lhs = bullet(&bullet(&forms[0], &forms[1])?, &forms[2])?;
        let rhs = bullet(&forms[0], &bullet(&forms[1], &forms[2])?)?;
        ensure_eq(&lhs, &rhs, "(f.g).h vs f.(g.h)")
    })
}

/// Horizontal form with coefficients in `(x, q)` only, of degree `n - r`.
fn configuration_form(s: &mut Sampler, ch: Chart, r: usize) -> Form {
    let base: Vec<usize> = (0..ch.n() + ch.fields()).collect();
    let mut out = Form::zero(ch, ch.n() - r);
    let template = s.horizontal_form(ch, ch.n() - r);
    for blade in template.terms().keys() {
        out = out + Form::from_terms(ch, ch.n() - r, [(*blade, s.scalar_in(ch, &base, 2, 2))]);
    }
    out
}

pub fn bullet_leibniz(ctx: &Context, trials: usize) -> Outcome {
    let ch = ctx.ordinary();
    let n = ch.n();
    run(ctx, "bullet leibniz", if n > 1 { trials } else { 0 }, |s, k| {
        let m = metric(n, k);
        let r = 1 + s.below(n - 1);
        let u = 1 + s.below(n - 1);
        let t = 1 + s.below(n - u);
        let f = s.kanatchikov_form(ch, r);
        let (g, h) = (configuration_form(s, ch, u), configuration_form(s, ch, t));
        let solve = |form: &Form| solve_hamiltonian_field(&project_eta(form).or_fail()?).or_fail();
        let bracket = |a: &Form, b: &Form| -> Result<Form, String> {
            let value = poisson_bracket(&solve(a)?, &solve(b)?).or_fail()?;
            to_ordinary(&value, ch)
        };
        let bullet = |a: &Form, b: &Form| bullet_product(a, b, &m).or_fail();
        let lhs = bracket(&f, &bullet(&g, &h)?)?;
        let rhs = bullet(&bracket(&f, &g)?, &h)?
            .signed((r - 1) * t)
            .try_add(&bullet(&g, &bracket(&f, &h)?)?)
            .or_fail()?;
        ensure_eq(&lhs, &rhs, &format!("degrees ({r},{u},{t}) {{f, g.h}} for f = {f}, g = {g}, h = {h}"))
    })
}
