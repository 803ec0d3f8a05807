//! Connections induced on derived bundles.

use msc_core::connections::{duality_check, induce, Bundle, ConnectionData};
use msc_core::exterior::Blade;
use msc_core::random::Sampler;
use msc_core::vertical::VerticalCoframe;
use msc_core::{Chart, Scalar};

use super::{ensure, ensure_eq, run, Context, Identity, OrFail, Outcome};

pub const IDENTITIES: &[(&str, Identity)] = &[
    ("duality check", duality),
    ("vector bundle coefficients are linear", linearity),
    ("jet bundle coefficients are affine", jet_offset),
    ("coframe matches ordinary induced connection", coframe),
];

fn random_connection(s: &mut Sampler, base: Chart, k: usize) -> ConnectionData {
    if k.is_multiple_of(2) {
        s.connection(base)
    } else {
        s.constant_connection(base)
    }
}

pub fn duality(ctx: &Context, trials: usize) -> Outcome {
    let base = ctx.base();
    run(ctx, "duality check", trials, |s, k| {
        let conn = random_connection(s, base, k);
        ensure(duality_check(&conn).or_fail()?, || "induced connections are not mutually dual".into())
    })
}

/// Total degree in the fiber coordinates of every monomial.
fn fiber_degrees(c: &Scalar, offset: usize) -> Vec<u32> {
    c.terms().keys().map(|m| m.iter().skip(offset).map(|&e| u32::from(e)).sum()).collect()
}

pub fn linearity(ctx: &Context, trials: usize) -> Outcome {
    let base = ctx.base();
    run(ctx, "vector bundle coefficients are linear", trials, |s, k| {
        let conn = random_connection(s, base, k);
        for bundle in Bundle::ALL.into_iter().filter(|&b| b != Bundle::JE) {
            let induced = induce(&conn, bundle).or_fail()?;
            let offset = base.n() + base.fields();
            for (mu, row) in induced.coefficients.iter().enumerate() {
                for (a, c) in row.iter().enumerate() {
                    ensure(fiber_degrees(c, offset).iter().all(|&d| d == 1), || {
                        format!("{bundle} coefficient ({}, {a}) = {c} is not linear in the fiber", mu + 1)
                    })?;
                }
            }
        }
        Ok(())
    })
}

/// On the affine jet bundle the coefficient is the linear jet one evaluated at
/// `q^l_kappa - Gamma^l_kappa`.
pub fn jet_offset(ctx: &Context, trials: usize) -> Outcome {
    let base = ctx.base();
    let (n, fields) = (base.n(), base.fields());
    run(ctx, "jet bundle coefficients are affine", trials, |s, k| {
        let conn = random_connection(s, base, k);
        let (je, linear) = (induce(&conn, Bundle::JE).or_fail()?, induce(&conn, Bundle::JvecE).or_fail()?);
        let ch = je.chart;
        let g = conn.on(ch).or_fail()?;
        let same_slots: Vec<Scalar> = (0..ch.dim()).map(|a| Scalar::coordinate(ch, a)).collect();
        for mu in 0..n {
            for kk in 0..fields {
                for kappa in 0..n {
                    let a = ch.p(kk, kappa);
                    let mut offset = Scalar::zero(ch);
                    for l in 0..fields {
                        offset = &offset - &(&g.dq_gamma(kk, mu, l) * g.gamma_e(l, kappa));
                    }
                    for lambda in 0..n {
                        offset = &offset + &(g.gamma_tm(lambda, mu, kappa) * g.gamma_e(kk, lambda));
                    }
                    let expected = &linear.coefficient(mu, a).substitute(&same_slots, ch).or_fail()? + &offset;
                    ensure_eq(je.coefficient(mu, a), &expected, &format!("JE coefficient mu={} fiber {a}", mu + 1))?;
                }
            }
        }
        Ok(())
    })
}

pub fn coframe(ctx: &Context, trials: usize) -> Outcome {
    let (base, ch) = (ctx.base(), ctx.ordinary());
    run(ctx, "coframe matches ordinary induced connection", trials, |s, k| {
        let conn = random_connection(s, base, k);
        let frame = VerticalCoframe::new(&conn, ch).or_fail()?;
        let induced = induce(&conn, Bundle::OrdinaryMultiphase).or_fail()?;
        let g = conn.on(ch).or_fail()?;
        for kappa in 0..ch.n() {
            let dx = Blade::single(ch.x(kappa));
            for i in 0..ch.fields() {
                ensure_eq(&frame.e_q(i).coefficient(dx), g.gamma_e(i, kappa), "e^i coefficient")?;
                for mu in 0..ch.n() {
                    let a = ch.p(i, mu);
                    let expected = induced.coefficient(kappa, a).transfer(ch).or_fail()?;
                    ensure_eq(&frame.element(a).coefficient(dx), &expected, "e_i^mu coefficient")?;
                }
            }
        }
        Ok(())
    })
}
