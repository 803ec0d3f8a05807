//! Exterior derivative, Lie derivative along multivector fields and the
//! Schouten bracket.

use crate::error::{usage, Error, Result};
use crate::exterior::{Blade, Form, Multivector};

pub fn exterior_derivative(alpha: &Form) -> Form {
    let chart = alpha.chart();
    let mut out = Form::zero(chart, alpha.degree() + 1);
    for (b, c) in alpha.terms() {
        for (idx, partial) in c.partials() {
            if b.contains(idx) {
                continue;
            }
            let blade = Blade(b.0 | 1 << idx);
            out.add_term(blade, if b.insertion_sign(idx) { -partial } else { partial });
        }
    }
    out
}

/// `L_X alpha = d i_X alpha - (-1)^r i_X d alpha`.
pub fn lie_derivative(alpha: &Form, x: &Multivector) -> Result<Form> {
    if alpha.chart() != x.chart() {
        return Err(Error::ChartMismatch(alpha.chart().to_string(), x.chart().to_string()));
    }
    let r = x.degree();
    if r > alpha.degree() + 1 {
        return Ok(Form::zero(alpha.chart(), 0));
    }
    let first = if r <= alpha.degree() {
        exterior_derivative(&alpha.contract(x))
    } else {
        Form::zero(alpha.chart(), 0)
    };
    let second = exterior_derivative(alpha).contract(x).signed(r);
    Ok(&first - &second)
}

/// Schouten bracket of multivector fields of degrees `r, s >= 1`.
///
/// For `X = f @a1^..^@ar` and `Y = g @b1^..^@bs` (ascending indices) the
/// decomposable formula reduces to
/// `sum_i (-1)^(r+i) f (d_ai g) @A\ai ^ @B + sum_j (-1)^j g (d_bj f) @A ^ @B\bj`
/// with 1-based positions `i`, `j`; the bracket is extended bilinearly.
pub fn schouten_bracket(x: &Multivector, y: &Multivector) -> Result<Multivector> {
    if x.chart() != y.chart() {
        return Err(Error::ChartMismatch(x.chart().to_string(), y.chart().to_string()));
    }
    let (r, s) = (x.degree(), y.degree());
    if r == 0 || s == 0 {
        return usage("the Schouten bracket needs arguments of degree at least 1");
    }
    let mut out = Multivector::zero(x.chart(), r + s - 1);
    for (a, f) in x.terms() {
        let a_idx = a.indices();
        for (b, g) in y.terms() {
            let b_idx = b.indices();
            for (pos, &ai) in a_idx.iter().enumerate() {
                let dg = g.partial(ai)?;
                if dg.is_zero() {
                    continue;
                }
                let rest = Blade(a.0 & !(1 << ai));
                if let Some((odd, blade)) = rest.wedge(*b) {
                    let negative = odd ^ ((r + pos + 1) % 2 == 1);
                    let c = f * &dg;
                    out.add_term(blade, if negative { -c } else { c });
                }
            }
            for (pos, &bj) in b_idx.iter().enumerate() {
                let df = f.partial(bj)?;
                if df.is_zero() {
                    continue;
                }
                let rest = Blade(b.0 & !(1 << bj));
                if let Some((odd, blade)) = a.wedge(rest) {
                    let negative = odd ^ ((pos + 1) % 2 == 1);
                    let c = g * &df;
                    out.add_term(blade, if negative { -c } else { c });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::scalar::Scalar;

    fn c21() -> Chart {
        Chart::extended(2, 1).unwrap()
    }

    fn var(name: &str) -> Scalar {
        Scalar::coordinate(c21(), c21().lookup(name).unwrap())
    }

    fn d(name: &str) -> Form {
        Form::coordinate(c21(), c21().lookup(name).unwrap())
    }

    fn at(name: &str) -> Multivector {
        Multivector::coordinate(c21(), c21().lookup(name).unwrap())
    }

    #[test]
    fn derivative_of_monomial_term() {
        let alpha = d("q").scale(&var("p1_1"));
        assert_eq!(exterior_derivative(&alpha), d("p1_1").wedge(&d("q")));
    }

    #[test]
    fn derivative_squares_to_zero() {
        let alpha = d("x1").scale(&(&var("q") * &var("p")));
        assert!(exterior_derivative(&exterior_derivative(&alpha)).is_zero());
    }

    #[test]
    fn lie_derivative_of_closed_form_along_constant_field() {
        let vol = d("x1").wedge(&d("x2"));
        assert!(lie_derivative(&vol, &at("x1")).unwrap().is_zero());
    }

    #[test]
    fn vector_field_brackets() {
        let lhs = schouten_bracket(&at("q"), &at("p1_1").scale(&var("q"))).unwrap();
        assert_eq!(lhs, at("p1_1"));
        let x = at("x2").scale(&(&var("q") * &var("x1"))) + at("p").scale(&var("p1_2"));
        assert!(schouten_bracket(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn bivector_with_vector() {
        let lhs = schouten_bracket(&at("x1").wedge(&at("q")), &at("x2").scale(&var("q"))).unwrap();
        assert_eq!(lhs, at("x1").wedge(&at("x2")));
    }

    #[test]
    fn degree_zero_rejected() {
        let f = Multivector::scalar(var("q"));
        assert!(schouten_bracket(&f, &at("q")).is_err());
    }

    #[test]
    fn classical_lie_bracket() {
        // [X, Y]^a = X^b d_b Y^a - Y^b d_b X^a
        let c = c21();
        let xs = [var("q"), Scalar::zero(c), &var("x1") * &var("p"), Scalar::zero(c), var("x2"), Scalar::one(c)];
        let ys = [Scalar::zero(c), &var("q") * &var("q"), var("p1_1"), var("x1"), Scalar::zero(c), var("p")];
        let field = |v: &[Scalar]| {
            v.iter().enumerate().fold(Multivector::zero(c, 1), |acc, (i, s)| {
                acc + Multivector::coordinate(c, i).scale(s)
            })
        };
        let mut expected = Multivector::zero(c, 1);
        for a in 0..6 {
            let mut comp = Scalar::zero(c);
            for b in 0..6 {
                comp = &comp + &(&xs[b] * &ys[a].partial(b).unwrap());
                comp = &comp - &(&ys[b] * &xs[a].partial(b).unwrap());
            }
            expected = expected + Multivector::coordinate(c, a).scale(&comp);
        }
        assert_eq!(schouten_bracket(&field(&xs), &field(&ys)).unwrap(), expected);
    }
}
