//! Ordinary multiphase space: the vertical multisymplectic form and vertical
//! exterior derivative built from a connection, the vertical bracket of
//! horizontal Hamiltonian forms, and the Hodge bullet product.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::chart::{Chart, ChartKind};
use crate::connections::{ConnectionData, ConnectionOn};
use crate::error::{usage, Error, Result};
use crate::exterior::{basis_monomial_sign, Blade, Form, Graded, Multivector, Variance};
use crate::hamiltonian::solve_contraction;
use crate::linalg;
use crate::multiphase::{volume, volume_contracted};
use crate::scalar::{parity, Rational, Scalar};

fn require_ordinary(chart: Chart) -> Result<()> {
    if chart.kind() == ChartKind::Ordinary {
        Ok(())
    } else {
        usage(format!("an ordinary multiphase chart is required, got {chart}"))
    }
}

/// Pull back along the projection forgetting the energy variable.
pub fn project_eta(f: &Form) -> Result<Form> {
    require_ordinary(f.chart())?;
    f.transfer(Chart::extended(f.chart().n(), f.chart().fields())?)
}

/// Read an extended-chart multivector on the ordinary chart, dropping `@p`
/// terms; coefficients must not depend on `p`.
pub fn project_field(x: &Multivector) -> Result<Multivector> {
    let chart = x.chart();
    let energy = chart.energy().ok_or_else(|| Error::Usage("an extended chart is required".into()))?;
    let ordinary = Chart::ordinary(chart.n(), chart.fields())?;
    let kept: Vec<(Blade, Scalar)> = x
        .terms()
        .iter()
        .filter(|(b, _)| !b.contains(energy))
        .map(|(b, c)| (*b, c.clone()))
        .collect();
    Multivector::from_terms(chart, x.degree(), kept).transfer(ordinary)
}

pub fn is_horizontal(f: &Form) -> bool {
    let mask = f.chart().x_mask();
    f.terms().keys().all(|b| b.0 & !mask == 0)
}

/// Apply `images[a]` in place of every basis vector `@a` and wedge out.
fn substitute_vectors(x: &Multivector, images: &[Multivector]) -> Multivector {
    let chart = x.chart();
    let mut out = Multivector::zero(chart, x.degree());
    for (b, c) in x.terms() {
        let acc = b.indices().iter().fold(Multivector::scalar(c.clone()), |acc, &a| acc.wedge(&images[a]));
        out = out + acc;
    }
    out
}

/// The vertical 1-forms `e^i = dq^i + Gamma^i_nu dx^nu` and
/// `e_i^mu = dp_i^mu + C_{i,kappa}^mu dx^kappa` on the ordinary chart, with
/// `C` the coefficients of the induced connection.
#[derive(Clone, Debug)]
pub struct VerticalCoframe {
    chart: Chart,
    gamma: ConnectionOn,
    /// `dx` components of `e^a - dy^a`, indexed by chart coordinate `a`.
    shifts: Vec<Form>,
}

impl VerticalCoframe {
    pub fn new(conn: &ConnectionData, chart: Chart) -> Result<VerticalCoframe> {
        require_ordinary(chart)?;
        if conn.base().n() != chart.n() || conn.base().fields() != chart.fields() {
            return Err(Error::ChartMismatch(conn.base().to_string(), chart.to_string()));
        }
        let gamma = conn.on(chart)?;
        let n = chart.n();
        let dx = |nu: usize| Form::coordinate(chart, chart.x(nu));
        let mut shifts = vec![Form::zero(chart, 1); chart.dim()];
        for i in 0..chart.fields() {
            shifts[chart.q(i)] = (0..n).fold(Form::zero(chart, 1), |acc, nu| acc + dx(nu).scale(gamma.gamma_e(i, nu)));
            for mu in 0..n {
                shifts[chart.p(i, mu)] = (0..n).fold(Form::zero(chart, 1), |acc, kappa| {
                    acc + dx(kappa).scale(&gamma.momentum_coefficient(i, mu, kappa))
                });
            }
        }
        Ok(VerticalCoframe { chart, gamma, shifts })
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    /// `e^a` for a vertical coordinate `a`, `dx^mu` for a horizontal one.
    pub fn element(&self, a: usize) -> Form {
        Form::coordinate(self.chart, a) + self.shifts[a].clone()
    }

    pub fn e_q(&self, i: usize) -> Form {
        self.element(self.chart.q(i))
    }

    pub fn e_p(&self, i: usize, mu: usize) -> Form {
        self.element(self.chart.p(i, mu))
    }

    /// Coefficient of `dx^kappa` in `e_i^mu`.
    pub fn momentum_coefficient(&self, i: usize, mu: usize, kappa: usize) -> Scalar {
        self.gamma.momentum_coefficient(i, mu, kappa)
    }

    /// Horizontal lift `h_kappa`, annihilated by every `e^a`.
    pub fn horizontal_lift(&self, kappa: usize) -> Multivector {
        let chart = self.chart;
        let mut h = Multivector::coordinate(chart, chart.x(kappa));
        for (a, shift) in self.shifts.iter().enumerate() {
            let c = shift.coefficient(Blade::single(chart.x(kappa)));
            h = h - Multivector::coordinate(chart, a).scale(&c);
        }
        h
    }

    /// Rewrite a form in the coframe `(dx, e)`, stored with `e^a` in the slot of `dy^a`.
    pub fn to_frame(&self, f: &Form) -> Result<Form> {
        let images: Vec<Form> = (0..self.chart.dim())
            .map(|a| Form::coordinate(self.chart, a) - self.shifts[a].clone())
            .collect();
        f.substitute_one_forms(&images)
    }

    /// Inverse of [`VerticalCoframe::to_frame`].
    pub fn from_frame(&self, f: &Form) -> Result<Form> {
        let images: Vec<Form> = (0..self.chart.dim()).map(|a| self.element(a)).collect();
        f.substitute_one_forms(&images)
    }

    /// Multivector given in the frame `(h, @y)` dual to the coframe, read in coordinates.
    pub fn field_from_frame(&self, x: &Multivector) -> Multivector {
        let chart = self.chart;
        let images: Vec<Multivector> = (0..chart.dim())
            .map(|a| if a < chart.n() { self.horizontal_lift(a) } else { Multivector::coordinate(chart, a) })
            .collect();
        substitute_vectors(x, &images)
    }

    /// `e^a ^ d/dy^a` applied to frame-basis coefficients.
    fn derivative_in_frame(&self, f: &Form) -> Result<Form> {
        let chart = self.chart;
        let mut out = Form::zero(chart, f.degree() + 1);
        for (b, c) in f.terms() {
            for a in chart.n()..chart.dim() {
                self.push_derivative(&mut out, *b, c, a)?;
            }
        }
        Ok(out)
    }

    fn push_derivative(&self, out: &mut Form, b: Blade, c: &Scalar, a: usize) -> Result<()> {
        let partial = c.partial(a)?;
        if partial.is_zero() || b.contains(a) {
            return Ok(());
        }
        let term = Form::coordinate(self.chart, a).wedge(&Form::from_terms(self.chart, b.grade(), [(b, partial)]));
        *out = out.try_add(&term)?;
        Ok(())
    }

    /// The vertical exterior derivative on arbitrary forms: coefficients in
    /// the coframe basis are differentiated along the fiber.
    pub fn vertical_derivative(&self, f: &Form) -> Result<Form> {
        if f.chart() != self.chart {
            return Err(Error::ChartMismatch(f.chart().to_string(), self.chart.to_string()));
        }
        self.from_frame(&self.derivative_in_frame(&self.to_frame(f)?)?)
    }

    /// `e^i ^ e_i^mu ^ d^n x_mu`.
    pub fn omega_vertical(&self) -> Form {
        let chart = self.chart;
        let mut out = Form::zero(chart, chart.n() + 1);
        for i in 0..chart.fields() {
            for mu in 0..chart.n() {
                out = out + self.e_q(i).wedge(&self.e_p(i, mu)).wedge(&volume_contracted(chart, &[mu]));
            }
        }
        out
    }
}

/// `dq^i ^ dp_i^mu ^ d^n x_mu`, the vertical form of the zero connection.
pub fn flat_vertical_omega(chart: Chart) -> Form {
    let mut out = Form::zero(chart, chart.n() + 1);
    for i in 0..chart.fields() {
        let dq = Form::coordinate(chart, chart.q(i));
        for mu in 0..chart.n() {
            let dp = Form::coordinate(chart, chart.p(i, mu));
            out = out + dq.wedge(&dp).wedge(&volume_contracted(chart, &[mu]));
        }
    }
    out
}

pub fn omega_vertical(conn: &ConnectionData, chart: Chart) -> Result<Form> {
    Ok(VerticalCoframe::new(conn, chart)?.omega_vertical())
}

/// `d^V f = e^i ^ df/dq^i + e_i^mu ^ df/dp_i^mu` for a horizontal form.
pub fn d_vertical(f: &Form, conn: &ConnectionData) -> Result<Form> {
    if !is_horizontal(f) {
        return usage(format!("{f} is not horizontal"));
    }
    VerticalCoframe::new(conn, f.chart())?.vertical_derivative(f)
}

/// A horizontal form with a multivector field solving `i_X omega^V = d^V f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerticalPair {
    form: Form,
    field: Multivector,
}

impl VerticalPair {
    pub fn new(form: Form, field: Multivector, conn: &ConnectionData) -> Result<VerticalPair> {
        let coframe = VerticalCoframe::new(conn, form.chart())?;
        if coframe.omega_vertical().contract(&field) != d_vertical(&form, conn)? {
            return Err(Error::NotHamiltonian(format!("i_X omega^V differs from d^V({form})")));
        }
        Ok(VerticalPair { form, field })
    }

    /// Solve `i_X omega^V = d^V f` in the frame adapted to the connection.
    pub fn solve(form: &Form, conn: &ConnectionData) -> Result<VerticalPair> {
        let chart = form.chart();
        if !is_horizontal(form) {
            return usage(format!("{form} is not horizontal"));
        }
        if form.degree() > chart.n() {
            return Err(Error::NotHamiltonian(format!("degree {} exceeds n", form.degree())));
        }
        let coframe = VerticalCoframe::new(conn, chart)?;
        let target = coframe.derivative_in_frame(&coframe.to_frame(form)?)?;
        let r = chart.n() - form.degree();
        let frame_field = solve_contraction(chart, r, &target)
            .ok_or_else(|| Error::NotHamiltonian(format!("i_X omega^V = d^V({form}) has no solution")))?;
        Ok(VerticalPair { form: form.clone(), field: coframe.field_from_frame(&frame_field) })
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn field(&self) -> &Multivector {
        &self.field
    }

    pub fn r(&self) -> usize {
        self.form.chart().n() - self.form.degree()
    }
}

/// `{f, g}^V = (-1)^{r(s-1)} i_Y i_X omega^V`.
pub fn vertical_bracket(a: &VerticalPair, b: &VerticalPair, conn: &ConnectionData) -> Result<Form> {
    let chart = a.form.chart();
    if b.form.chart() != chart {
        return Err(Error::ChartMismatch(a.form.chart().to_string(), b.form.chart().to_string()));
    }
    let (r, s) = (a.r(), b.r());
    if r + s > chart.n() + 1 {
        return Ok(Form::zero(chart, 0));
    }
    let om = omega_vertical(conn, chart)?;
    Ok(om.contract(&a.field).contract(&b.field).signed(r * (s + 1)))
}

/// Coefficients `f^{mu1..mur}` of a horizontal form `f = 1/r! f^{mu..} d^n x_{mu..}`,
/// listed for every ordered tuple of distinct indices.
pub fn horizontal_components(f: &Form) -> Result<BTreeMap<Vec<usize>, Scalar>> {
    if !is_horizontal(f) {
        return usage(format!("{f} is not horizontal"));
    }
    let chart = f.chart();
    let n = chart.n();
    let r = n - f.degree();
    let mut out = BTreeMap::new();
    for tuple in ordered_tuples(n, r) {
        let basis = volume_contracted(chart, &tuple);
        let Some((blade, sign)) = basis.terms().iter().next() else { continue };
        let c = f.coefficient(*blade);
        if !c.is_zero() {
            let sign = sign.as_constant().expect("constant basis");
            out.insert(tuple, c.scale(&sign));
        }
    }
    Ok(out)
}

fn ordered_tuples(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for t in ordered_tuples(n, r - 1) {
        for mu in 0..n {
            if !t.contains(&mu) {
                let mut u = t.clone();
                u.push(mu);
                out.push(u);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    /// Onto space-time `M`.
    Source,
    /// Onto the configuration bundle `E`.
    Target,
}

/// Largest `s` such that every term has at least `s` horizontal covectors
/// (forms) or `s` vertical vectors (multivectors).
pub fn horizontality_grade<K: Variance>(obj: &Graded<K>, projection: Projection) -> usize {
    let chart = obj.chart();
    let vertical = |i: usize| match projection {
        Projection::Source => chart.is_source_vertical(i),
        Projection::Target => chart.is_target_vertical(i),
    };
    obj.terms()
        .keys()
        .map(|b| b.indices().into_iter().filter(|&i| vertical(i) != K::IS_FORM).count())
        .min()
        .unwrap_or(obj.degree())
}

/// Constant metric on space-time whose determinant has a rational square root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizontalMetric {
    g: Vec<Vec<Rational>>,
    inverse: Vec<Vec<Rational>>,
    det: Rational,
    sqrt_abs_det: Rational,
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    let root = |v: &BigInt| {
        let s = v.sqrt();
        (&s * &s == *v).then_some(s)
    };
    Some(Rational::new(root(r.numer())?, root(r.denom())?))
}

impl HorizontalMetric {
    pub fn new(g: Vec<Vec<Rational>>) -> Result<HorizontalMetric> {
        let n = g.len();
        if n == 0 || g.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric("the metric must be a square matrix".into()));
        }
        for a in 0..n {
            for b in 0..a {
                if g[a][b] != g[b][a] {
                    return Err(Error::InvalidMetric("the metric must be symmetric".into()));
                }
            }
        }
        let det = linalg::determinant(&g);
        let inverse = linalg::inverse(&g).ok_or_else(|| Error::InvalidMetric("the metric is degenerate".into()))?;
        let sqrt_abs_det = rational_sqrt(&det.abs())
            .ok_or_else(|| Error::InvalidMetric(format!("|det g| = {} is not a rational square", det.abs())))?;
        Ok(HorizontalMetric { g, inverse, det, sqrt_abs_det })
    }

    pub fn euclidean(n: usize) -> HorizontalMetric {
        Self::diagonal(&vec![Rational::one(); n]).expect("identity metric")
    }

    pub fn diagonal(entries: &[Rational]) -> Result<HorizontalMetric> {
        let n = entries.len();
        let g = (0..n)
            .map(|a| (0..n).map(|b| if a == b { entries[a].clone() } else { Rational::zero() }).collect())
            .collect();
        HorizontalMetric::new(g)
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn det(&self) -> &Rational {
        &self.det
    }

    fn sign(&self) -> Rational {
        if self.det.is_negative() {
            -Rational::one()
        } else {
            Rational::one()
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn check_metric(f: &Form, metric: &HorizontalMetric) -> Result<()> {
    if metric.dim() != f.chart().n() {
        return Err(Error::InvalidMetric(format!("metric of size {} on n = {}", metric.dim(), f.chart().n())));
    }
    if !is_horizontal(f) {
        return usage(format!("{f} is not horizontal"));
    }
    Ok(())
}

/// Hodge star on horizontal forms:
/// `*(dx^I) = sqrt|g| sum_J det(g^-1[I, J]) eps(J, J^c) dx^{J^c}`.
pub fn hodge_star(f: &Form, metric: &HorizontalMetric) -> Result<Form> {
    check_metric(f, metric)?;
    let chart = f.chart();
    let n = chart.n();
    let k = f.degree();
    let mut out = Form::zero(chart, n - k);
    for (blade, c) in f.terms() {
        let rows = blade.indices();
        for cols in subsets(n, k) {
            let minor: Vec<Vec<Rational>> =
                rows.iter().map(|&a| cols.iter().map(|&b| metric.inverse[a][b].clone()).collect()).collect();
            let m = linalg::determinant(&minor);
            if m.is_zero() {
                continue;
            }
            let complement: Vec<usize> = (0..n).filter(|mu| !cols.contains(mu)).collect();
            let order: Vec<usize> = cols.iter().chain(&complement).copied().collect();
            let (_, sign) = basis_monomial_sign(&order);
            let factor = m * &metric.sqrt_abs_det * Rational::from_integer(sign.into());
            let basis = Form::basis(chart, &complement.iter().map(|&mu| chart.x(mu)).collect::<Vec<_>>())?;
            out = out + basis.scale(&c.scale(&factor));
        }
    }
    Ok(out)
}

/// `*^{-1} = (-1)^{k(n-k)} sign(det g) *` on k-forms.
pub fn hodge_inverse(f: &Form, metric: &HorizontalMetric) -> Result<Form> {
    let (n, k) = (f.chart().n(), f.degree());
    Ok(hodge_star(f, metric)?.scale_rational(&(parity(k * (n - k)) * metric.sign())))
}

/// `f . g = *^{-1}(*f ^ *g)`, of degree `deg f + deg g - n`.
pub fn bullet_product(f: &Form, g: &Form, metric: &HorizontalMetric) -> Result<Form> {
    let chart = f.chart();
    if g.chart() != chart {
        return Err(Error::ChartMismatch(chart.to_string(), g.chart().to_string()));
    }
    check_metric(g, metric)?;
    if f.degree() + g.degree() < chart.n() {
        return Ok(Form::zero(chart, 0));
    }
    hodge_inverse(&hodge_star(f, metric)?.wedge(&hodge_star(g, metric)?), metric)
}

/// The unit of the bullet product, `sign(det g) sqrt|g| d^n x`.
pub fn bullet_unit(chart: Chart, metric: &HorizontalMetric) -> Form {
    volume(chart).scale_rational(&(metric.sign() * &metric.sqrt_abs_det))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{bracket_formula, solve_hamiltonian_field, uncorrected_bracket};
    use crate::scalar::{integer, rational};

    fn ord(n: usize, f: usize) -> Chart {
        Chart::ordinary(n, f).unwrap()
    }

    fn var(chart: Chart, name: &str) -> Scalar {
        Scalar::coordinate(chart, chart.lookup(name).unwrap())
    }

    fn d(chart: Chart, name: &str) -> Form {
        Form::coordinate(chart, chart.lookup(name).unwrap())
    }

    fn zero_conn(n: usize, f: usize) -> ConnectionData {
        ConnectionData::zero(Chart::base(n, f).unwrap()).unwrap()
    }

    fn constant_conn() -> ConnectionData {
        let b = Chart::base(2, 1).unwrap();
        let c = |v: i64| Scalar::constant(b, integer(v));
        let tm = vec![
            vec![vec![c(1), c(0)], vec![c(0), c(2)]],
            vec![vec![c(0), c(-1)], vec![c(-1), c(3)]],
        ];
        ConnectionData::new(b, vec![vec![c(2), c(-3)]], tm).unwrap()
    }

    #[test]
    fn eta_is_an_inclusion() {
        let ch = ord(2, 1);
        let f = d(ch, "x2").scale(&var(ch, "p1_1"));
        let ext = project_eta(&f).unwrap();
        assert_eq!(ext.chart(), Chart::extended(2, 1).unwrap());
        assert_eq!(ext.to_string(), "p1_1*d(x2)");
    }

    #[test]
    fn flat_vertical_form() {
        let ch = ord(2, 1);
        let expected = d(ch, "q").wedge(&d(ch, "p1_1")).wedge(&d(ch, "x2"))
            - d(ch, "q").wedge(&d(ch, "p1_2")).wedge(&d(ch, "x1"));
        assert_eq!(omega_vertical(&zero_conn(2, 1), ch).unwrap(), expected);
    }

    #[test]
    fn constant_shift_keeps_vertical_block() {
        let ch = ord(2, 1);
        let om = omega_vertical(&constant_conn(), ch).unwrap();
        let flat = flat_vertical_omega(ch);
        let two_vertical = |f: &Form| {
            Form::from_terms(
                ch,
                f.degree(),
                f.terms().iter().filter(|(b, _)| b.indices().iter().filter(|&&i| i >= 2).count() >= 2).map(|(b, c)| (*b, c.clone())),
            )
        };
        assert_eq!(two_vertical(&om), two_vertical(&flat));
        assert_ne!(om, flat);
    }

    #[test]
    fn vertical_derivative_examples() {
        let ch = ord(2, 1);
        let f = Form::scalar(&var(ch, "q") * &var(ch, "p1_1"));
        let expected = d(ch, "q").scale(&var(ch, "p1_1")) + d(ch, "p1_1").scale(&var(ch, "q"));
        assert_eq!(d_vertical(&f, &zero_conn(2, 1)).unwrap(), expected);
        let constant = d(ch, "x1").scale(&Scalar::constant(ch, integer(4)));
        assert!(d_vertical(&constant, &constant_conn()).unwrap().is_zero());
        assert!(d_vertical(&d(ch, "q"), &zero_conn(2, 1)).is_err());
    }

    #[test]
    fn vertical_derivative_squares_to_zero() {
        let ch = ord(2, 1);
        let conn = constant_conn();
        let cf = VerticalCoframe::new(&conn, ch).unwrap();
        let f = d(ch, "x1").scale(&(&(&var(ch, "q") * &var(ch, "p1_2")) + &var(ch, "x2").pow(2)));
        let once = d_vertical(&f, &conn).unwrap();
        assert!(!once.is_zero());
        assert!(cf.vertical_derivative(&once).unwrap().is_zero());
    }

    #[test]
    fn frame_round_trip_and_lifts() {
        let ch = ord(2, 1);
        let cf = VerticalCoframe::new(&constant_conn(), ch).unwrap();
        let f = d(ch, "q").wedge(&d(ch, "p1_2")).scale(&var(ch, "x1")) + d(ch, "x2").wedge(&d(ch, "p1_1"));
        assert_eq!(cf.from_frame(&cf.to_frame(&f).unwrap()).unwrap(), f);
        for kappa in 0..2 {
            let h = cf.horizontal_lift(kappa);
            for a in 2..ch.dim() {
                assert!(cf.element(a).contract(&h).is_zero());
            }
            assert_eq!(d(ch, "x1").contract(&h).as_scalar().unwrap().as_constant(), Some(integer((kappa == 0) as i64)));
        }
    }

    #[test]
    fn vertical_bracket_matches_extended_bracket() {
        let ch = ord(2, 1);
        let f = d(ch, "x2").scale(&var(ch, "p1_1")) - d(ch, "x1").scale(&var(ch, "p1_2"));
        let g = Form::scalar(var(ch, "q"));
        for conn in [zero_conn(2, 1), constant_conn()] {
            let (a, b) = (VerticalPair::solve(&f, &conn).unwrap(), VerticalPair::solve(&g, &conn).unwrap());
            let ext_a = solve_hamiltonian_field(&project_eta(&f).unwrap()).unwrap();
            let ext_b = solve_hamiltonian_field(&project_eta(&g).unwrap()).unwrap();
            let expected = bracket_formula(&ext_a, &ext_b).unwrap();
            assert_eq!(expected, uncorrected_bracket(&ext_a, &ext_b).unwrap());
            assert_eq!(project_eta(&vertical_bracket(&a, &b, &conn).unwrap()).unwrap(), expected);
        }
    }

    #[test]
    fn vertical_pair_validation() {
        let ch = ord(2, 1);
        let conn = constant_conn();
        let f = d(ch, "x2").scale(&var(ch, "p1_1")) - d(ch, "x1").scale(&var(ch, "p1_2"));
        let pair = VerticalPair::solve(&f, &conn).unwrap();
        assert!(VerticalPair::new(f.clone(), pair.field().clone(), &conn).is_ok());
        assert!(VerticalPair::new(f, Multivector::coordinate(ch, 0), &conn).is_err());
    }

    #[test]
    fn grades_of_canonical_objects() {
        let ch = Chart::extended(2, 1).unwrap();
        let th = crate::multiphase::theta(ch).unwrap();
        assert_eq!(horizontality_grade(&th, Projection::Source), 1);
        assert_eq!(horizontality_grade(&th, Projection::Target), 2);
        let s = crate::multiphase::sigma(ch).unwrap();
        assert_eq!(horizontality_grade(&s, Projection::Source), 1);
        assert_eq!(horizontality_grade(&s, Projection::Target), 1);
    }

    #[test]
    fn components_of_horizontal_forms() {
        let ch = ord(2, 1);
        let f = d(ch, "x2").scale(&var(ch, "p1_1")) - d(ch, "x1").scale(&var(ch, "p1_2"));
        let comps = horizontal_components(&f).unwrap();
        assert_eq!(comps[&vec![0]], var(ch, "p1_1"));
        assert_eq!(comps[&vec![1]], var(ch, "p1_2"));
    }

    #[test]
    fn hodge_star_euclidean_and_lorentzian() {
        let ch = ord(2, 1);
        let e = HorizontalMetric::euclidean(2);
        assert_eq!(hodge_star(&d(ch, "x1"), &e).unwrap(), d(ch, "x2"));
        assert_eq!(hodge_star(&d(ch, "x2"), &e).unwrap(), -d(ch, "x1"));
        let one = bullet_product(&d(ch, "x1"), &d(ch, "x2"), &e).unwrap();
        assert_eq!(one.as_scalar().unwrap().as_constant(), Some(integer(1)));
        let m = HorizontalMetric::diagonal(&[integer(-1), integer(1)]).unwrap();
        let unit = bullet_unit(ch, &m);
        assert_eq!(unit, -d(ch, "x1").wedge(&d(ch, "x2")));
        let g = d(ch, "x1").scale(&var(ch, "q")) + d(ch, "x2").scale(&var(ch, "p1_1"));
        for metric in [&e, &m] {
            assert_eq!(bullet_product(&bullet_unit(ch, metric), &g, metric).unwrap(), g);
            for k in 0..=2 {
                let basis = Form::basis(ch, &(0..k).collect::<Vec<_>>()).unwrap();
                assert_eq!(hodge_inverse(&hodge_star(&basis, metric).unwrap(), metric).unwrap(), basis);
            }
        }
        assert!(HorizontalMetric::diagonal(&[integer(2), integer(1)]).is_err());
        assert!(HorizontalMetric::diagonal(&[rational(4, 9), integer(-1)]).is_ok());
    }

    #[test]
    fn two_vertical_contractions_agree() {
        let ch = ord(2, 1);
        let ext = Chart::extended(2, 1).unwrap();
        let om_v = omega_vertical(&zero_conn(2, 1), ch).unwrap();
        let om = crate::multiphase::omega(ext).unwrap();
        let v = |name: &str| Multivector::coordinate(ch, ch.lookup(name).unwrap());
        let fields = [v("q"), v("p1_1").scale(&var(ch, "x1")), v("p1_2") + v("q").scale(&var(ch, "p1_1"))];
        for x in &fields {
            for y in &fields {
                let lhs = project_eta(&om_v.contract(x).contract(y)).unwrap();
                let rhs = om.contract(&x.transfer(ext).unwrap()).contract(&y.transfer(ext).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn kanatchikov_forms_pull_back_to_poisson_forms() {
        let ch = ord(2, 1);
        let f = d(ch, "x2").scale(&(&var(ch, "p1_1") * &var(ch, "q"))) - d(ch, "x1").scale(&(&var(ch, "p1_2") * &var(ch, "q")))
            + d(ch, "x1").scale(&var(ch, "x2"));
        let pulled = project_eta(&f).unwrap();
        assert_eq!(crate::hamiltonian::kernel_class(&pulled).unwrap(), crate::hamiltonian::PoissonClass::Poisson);
    }

    #[test]
    fn correction_terms_vanish_for_horizontal_pairs() {
        let ch = ord(2, 1);
        let ext = Chart::extended(2, 1).unwrap();
        let f = project_eta(&(d(ch, "x2").scale(&var(ch, "p1_1")) - d(ch, "x1").scale(&var(ch, "p1_2")))).unwrap();
        let g = project_eta(&d(ch, "x1").scale(&(&var(ch, "q") * &var(ch, "x2")))).unwrap();
        let (a, b) = (solve_hamiltonian_field(&f).unwrap(), solve_hamiltonian_field(&g).unwrap());
        assert!(f.contract(b.field()).is_zero());
        assert!(g.contract(a.field()).is_zero());
        assert!(crate::multiphase::theta(ext).unwrap().contract(a.field()).contract(b.field()).is_zero());
    }

    #[test]
    fn constant_form_brackets_to_zero() {
        let ch = ord(2, 1);
        let conn = constant_conn();
        let f = d(ch, "x2").scale(&var(ch, "p1_1")) - d(ch, "x1").scale(&var(ch, "p1_2"));
        let g = d(ch, "x1").scale(&Scalar::constant(ch, integer(3)));
        let b = VerticalPair::solve(&g, &conn).unwrap();
        assert!(b.field().is_zero());
        let a = VerticalPair::solve(&f, &conn).unwrap();
        assert!(vertical_bracket(&a, &b, &conn).unwrap().is_zero());
    }

    #[test]
    fn coframe_matches_ordinary_induced_connection() {
        let ch = ord(2, 1);
        let conn = constant_conn();
        let cf = VerticalCoframe::new(&conn, ch).unwrap();
        let induced = crate::connections::induce(&conn, crate::connections::Bundle::OrdinaryMultiphase).unwrap();
        for mu in 0..2 {
            for kappa in 0..2 {
                let a = ch.p(0, mu);
                assert_eq!(cf.element(a).coefficient(Blade::single(ch.x(kappa))), *induced.coefficient(kappa, a));
            }
        }
    }

    #[test]
    fn horizontal_poisson_forms_project_to_vertical_solutions() {
        for n in [2, 3] {
            let ch = ord(n, 1);
            let ext = Chart::extended(n, 1).unwrap();
            let mut f = Form::zero(ch, n - 1);
            for mu in 0..n {
                let coefficient = &(&var(ch, &format!("p1_{}", mu + 1)) * &var(ch, "q")) + &var(ch, "x1").pow(2).scale(&integer(mu as i64 + 1));
                f = f + volume_contracted(ch, &[mu]).scale(&coefficient);
            }
            let pair = solve_hamiltonian_field(&project_eta(&f).unwrap()).unwrap();
            assert!(horizontality_grade(pair.field(), Projection::Source) >= 1);
            let projected = project_field(pair.field()).unwrap();
            assert!(VerticalPair::new(f.clone(), projected, &zero_conn(n, 1)).is_ok());
            let divergence = horizontal_components(&f)
                .unwrap()
                .iter()
                .fold(Scalar::zero(ch), |acc, (mu, c)| &acc + &c.partial(ch.x(mu[0])).unwrap());
            let energy = pair.field().coefficient(Blade::single(ext.energy().unwrap()));
            assert_eq!(energy, (-divergence).transfer(ext).unwrap());
        }
    }
}
