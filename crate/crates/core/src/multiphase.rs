//! Canonical geometry of multiphase space in adapted coordinates: the
//! multicanonical form, the multisymplectic form, the scaling field, dual
//! pairings and affine changes of adapted coordinates.

use num_traits::{One, Zero};

use crate::calculus::exterior_derivative;
use crate::chart::{Chart, ChartKind};
use crate::error::{usage, Error, Result};
use crate::exterior::{Form, Multivector};
use crate::linalg;
use crate::scalar::{Rational, Scalar};

pub(crate) fn require_extended(chart: Chart) -> Result<()> {
    if chart.is_extended() {
        Ok(())
    } else {
        usage(format!("an extended chart is required, got {chart}"))
    }
}

fn require_multiphase(chart: Chart) -> Result<()> {
    match chart.kind() {
        ChartKind::Extended | ChartKind::Ordinary => Ok(()),
        _ => usage(format!("a multiphase chart is required, got {chart}")),
    }
}

/// The horizontal volume form `d^n x = dx^1 ^ .. ^ dx^n`.
pub fn volume(chart: Chart) -> Form {
    let xs: Vec<usize> = (0..chart.n()).map(|mu| chart.x(mu)).collect();
    Form::basis(chart, &xs).expect("x coordinates exist on every chart")
}

/// `d^n x_{mu1..mur} = i_{@x^mur} .. i_{@x^mu1} d^n x`, indices 0-based.
pub fn volume_contracted(chart: Chart, mus: &[usize]) -> Form {
    mus.iter().fold(volume(chart), |acc, &mu| {
        acc.contract(&Multivector::coordinate(chart, chart.x(mu)))
    })
}

/// `theta = p_i^mu dq^i ^ d^n x_mu + p d^n x`.
pub fn theta(chart: Chart) -> Result<Form> {
    require_extended(chart)?;
    let mut out = volume(chart).scale(&Scalar::coordinate(chart, chart.energy().unwrap()));
    for i in 0..chart.fields() {
        let dq = Form::coordinate(chart, chart.q(i));
        for mu in 0..chart.n() {
            let p = Scalar::coordinate(chart, chart.p(i, mu));
            out = out + dq.wedge(&volume_contracted(chart, &[mu])).scale(&p);
        }
    }
    Ok(out)
}

/// `omega = dq^i ^ dp_i^mu ^ d^n x_mu - dp ^ d^n x`.
pub fn omega(chart: Chart) -> Result<Form> {
    require_extended(chart)?;
    let dp = Form::coordinate(chart, chart.energy().unwrap());
    let mut out = -dp.wedge(&volume(chart));
    for i in 0..chart.fields() {
        let dq = Form::coordinate(chart, chart.q(i));
        for mu in 0..chart.n() {
            let dpi = Form::coordinate(chart, chart.p(i, mu));
            out = out + dq.wedge(&dpi).wedge(&volume_contracted(chart, &[mu]));
        }
    }
    Ok(out)
}

/// The scaling field `p_i^mu @p_i^mu (+ p @p on the extended chart)`.
pub fn sigma(chart: Chart) -> Result<Multivector> {
    require_multiphase(chart)?;
    let mut idx: Vec<usize> = (0..chart.fields())
        .flat_map(|i| (0..chart.n()).map(move |mu| (i, mu)))
        .map(|(i, mu)| chart.p(i, mu))
        .collect();
    idx.extend(chart.energy());
    Ok(idx.into_iter().fold(Multivector::zero(chart, 1), |acc, a| {
        acc + Multivector::coordinate(chart, a).scale(&Scalar::coordinate(chart, a))
    }))
}

/// The constant n-form `p_i^mu dq^i ^ d^n x_mu + p d^n x` attached to a point
/// of extended multiphase space.
pub fn phi_form(chart: Chart, point: &[Rational]) -> Result<Form> {
    require_extended(chart)?;
    if point.len() != chart.dim() {
        return Err(Error::LengthMismatch { expected: chart.dim(), got: point.len() });
    }
    let constant = |idx: usize| Scalar::constant(chart, point[idx].clone());
    let mut out = volume(chart).scale(&constant(chart.energy().unwrap()));
    for i in 0..chart.fields() {
        let dq = Form::coordinate(chart, chart.q(i));
        for mu in 0..chart.n() {
            out = out + dq.wedge(&volume_contracted(chart, &[mu])).scale(&constant(chart.p(i, mu)));
        }
    }
    Ok(out)
}

/// Value of a dual pairing: a number, or a multiple of `d^n x` when twisted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairingResult {
    Scalar(Rational),
    VolumeMultiple(Rational),
}

impl PairingResult {
    pub fn value(&self) -> &Rational {
        match self {
            PairingResult::Scalar(v) | PairingResult::VolumeMultiple(v) => v,
        }
    }
}

/// Pair a multiphase point `z` with jet values `u` (field-major, `u[i*n + mu] = q^i_mu`).
/// On the extended chart the pairing is affine, `p_i^mu q^i_mu + p`; on the
/// ordinary chart it is linear.
pub fn dual_pairing(chart: Chart, z: &[Rational], u: &[Rational], twisted: bool) -> Result<PairingResult> {
    require_multiphase(chart)?;
    if z.len() != chart.dim() {
        return Err(Error::LengthMismatch { expected: chart.dim(), got: z.len() });
    }
    let (n, fields) = (chart.n(), chart.fields());
    if u.len() != n * fields {
        return Err(Error::LengthMismatch { expected: n * fields, got: u.len() });
    }
    let mut value = chart.energy().map_or_else(Rational::zero, |e| z[e].clone());
    for i in 0..fields {
        for mu in 0..n {
            value += &z[chart.p(i, mu)] * &u[i * n + mu];
        }
    }
    Ok(if twisted { PairingResult::VolumeMultiple(value) } else { PairingResult::Scalar(value) })
}

type Matrix = Vec<Vec<Rational>>;

/// An affine change of adapted coordinates `x' = x'(x)`, `q' = q'(x, q)`,
/// with polynomials over the base chart `(x, q)`.
#[derive(Clone, Debug)]
pub struct CoordinateChange {
    base: Chart,
    x_map: Vec<Scalar>,
    q_map: Vec<Scalar>,
    x_inverse: Vec<Scalar>,
    q_inverse: Vec<Scalar>,
    /// `dx'^kappa / dx^mu`
    a: Matrix,
    /// `dq'^k / dq^i`
    b: Matrix,
    /// `dq'^k / dx^mu`
    c: Matrix,
    a_inv: Matrix,
    b_inv: Matrix,
    det_a: Rational,
}

fn constant_of(s: &Scalar) -> Result<Rational> {
    s.as_constant()
        .ok_or_else(|| Error::UnsupportedChange(format!("non-constant Jacobian entry {s}")))
}

impl CoordinateChange {
    /// Build a change with explicit inverse maps; both compositions must be the identity.
    pub fn new(
        x_map: Vec<Scalar>,
        q_map: Vec<Scalar>,
        x_inverse: Vec<Scalar>,
        q_inverse: Vec<Scalar>,
    ) -> Result<CoordinateChange> {
        let base = Self::base_of(&x_map, &q_map)?;
        let change = Self::assemble(base, x_map, q_map, x_inverse, q_inverse)?;
        let forward: Vec<Scalar> = change.x_map.iter().chain(&change.q_map).cloned().collect();
        let backward: Vec<Scalar> = change.x_inverse.iter().chain(&change.q_inverse).cloned().collect();
        for (outer, inner) in [(&forward, &backward), (&backward, &forward)] {
            for (a, f) in outer.iter().enumerate() {
                if f.substitute(inner, base)? != Scalar::coordinate(base, a) {
                    return Err(Error::UnsupportedChange("inverse maps do not compose to the identity".into()));
                }
            }
        }
        Ok(change)
    }

    /// Build an affine change, computing its inverse.
    pub fn affine(x_map: Vec<Scalar>, q_map: Vec<Scalar>) -> Result<CoordinateChange> {
        let base = Self::base_of(&x_map, &q_map)?;
        let forward: Vec<Scalar> = x_map.iter().chain(&q_map).cloned().collect();
        // y = J v + t  =>  v = J^{-1} (y - t)
        let dim = base.dim();
        let jac: Matrix = forward
            .iter()
            .map(|f| (0..dim).map(|a| constant_of(&f.partial(a).unwrap())).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let origin = vec![Rational::zero(); dim];
        let shift: Vec<Rational> = forward.iter().map(|f| f.eval(&origin)).collect::<Result<_>>()?;
        let inv = linalg::inverse(&jac)
            .ok_or_else(|| Error::UnsupportedChange("singular Jacobian".into()))?;
        let inverse: Vec<Scalar> = (0..dim)
            .map(|a| {
                (0..dim).fold(Scalar::zero(base), |acc, b| {
                    let y = &Scalar::coordinate(base, b) - &Scalar::constant(base, shift[b].clone());
                    &acc + &y.scale(&inv[a][b])
                })
            })
            .collect();
        let (xi, qi) = inverse.split_at(base.n());
        Self::new(x_map, q_map, xi.to_vec(), qi.to_vec())
    }

    fn base_of(x_map: &[Scalar], q_map: &[Scalar]) -> Result<Chart> {
        let (Some(first), false) = (x_map.first(), q_map.is_empty()) else {
            return usage("a coordinate change needs at least one x and one q coordinate");
        };
        let base = Chart::base(x_map.len(), q_map.len())?;
        if first.chart() != base {
            return usage(format!("coordinate maps must live on the base chart with n={} and N={}", x_map.len(), q_map.len()));
        }
        Ok(base)
    }

    fn assemble(
        base: Chart,
        x_map: Vec<Scalar>,
        q_map: Vec<Scalar>,
        x_inverse: Vec<Scalar>,
        q_inverse: Vec<Scalar>,
    ) -> Result<CoordinateChange> {
        let (n, fields) = (base.n(), base.fields());
        if x_inverse.len() != n || q_inverse.len() != fields {
            return Err(Error::LengthMismatch { expected: n + fields, got: x_inverse.len() + q_inverse.len() });
        }
        for s in x_map.iter().chain(&q_map).chain(&x_inverse).chain(&q_inverse) {
            if s.chart() != base {
                return Err(Error::ChartMismatch(s.chart().to_string(), base.to_string()));
            }
            if s.degree().unwrap_or(0) > 1 {
                return Err(Error::UnsupportedChange(format!("{s} is not affine")));
            }
        }
        let x_only = |s: &Scalar| s.depends_only_on(|i| i < n);
        if !x_map.iter().chain(&x_inverse).all(x_only) {
            return Err(Error::UnsupportedChange("x' may depend on x only".into()));
        }
        let jac = |maps: &[Scalar], cols: &mut dyn Iterator<Item = usize>| -> Result<Matrix> {
            let cols: Vec<usize> = cols.collect();
            maps.iter()
                .map(|f| cols.iter().map(|&a| constant_of(&f.partial(a)?)).collect())
                .collect()
        };
        let a = jac(&x_map, &mut (0..n).map(|mu| base.x(mu)))?;
        let b = jac(&q_map, &mut (0..fields).map(|i| base.q(i)))?;
        let c = jac(&q_map, &mut (0..n).map(|mu| base.x(mu)))?;
        let a_inv = linalg::inverse(&a).ok_or_else(|| Error::UnsupportedChange("singular x Jacobian".into()))?;
        let b_inv = linalg::inverse(&b).ok_or_else(|| Error::UnsupportedChange("singular q Jacobian".into()))?;
        let det_a = linalg::determinant(&a);
        Ok(CoordinateChange { base, x_map, q_map, x_inverse, q_inverse, a, b, c, a_inv, b_inv, det_a })
    }

    pub fn base(&self) -> Chart {
        self.base
    }

    /// `det(dx'/dx)`.
    pub fn jacobian_determinant(&self) -> &Rational {
        &self.det_a
    }

    /// The inverse change.
    pub fn inverse(&self) -> CoordinateChange {
        Self::new(self.x_inverse.clone(), self.q_inverse.clone(), self.x_map.clone(), self.q_map.clone())
            .expect("inverse of a valid change is valid")
    }

    fn momentum_scale(&self, twisted: bool) -> Rational {
        if twisted {
            Rational::one() / &self.det_a
        } else {
            Rational::one()
        }
    }

    /// New coordinates of a multiphase point. Twisted momenta pick up `det(dx/dx')`.
    pub fn transform_momenta(&self, chart: Chart, point: &[Rational], twisted: bool) -> Result<Vec<Rational>> {
        self.check_chart(chart)?;
        if point.len() != chart.dim() {
            return Err(Error::LengthMismatch { expected: chart.dim(), got: point.len() });
        }
        let images = self.induced_map(chart, twisted)?;
        images.iter().map(|s| s.eval(point)).collect()
    }

    /// New jet coordinates `q'^k_kappa` at a point `(x, q)` of the base.
    /// The linear variant drops the `dq'/dx` term.
    pub fn transform_jet(&self, jet: &[Rational], linear: bool) -> Result<Vec<Rational>> {
        let (n, fields) = (self.base.n(), self.base.fields());
        if jet.len() != n * fields {
            return Err(Error::LengthMismatch { expected: n * fields, got: jet.len() });
        }
        let mut out = vec![Rational::zero(); n * fields];
        for k in 0..fields {
            for kappa in 0..n {
                let mut v = Rational::zero();
                for mu in 0..n {
                    let mut inner: Rational = (0..fields).map(|i| &self.b[k][i] * &jet[i * n + mu]).sum();
                    if !linear {
                        inner += &self.c[k][mu];
                    }
                    v += &self.a_inv[mu][kappa] * inner;
                }
                out[k * n + kappa] = v;
            }
        }
        Ok(out)
    }

    fn check_chart(&self, chart: Chart) -> Result<()> {
        if chart.n() != self.base.n() || chart.fields() != self.base.fields() {
            return Err(Error::ChartMismatch(chart.to_string(), self.base.to_string()));
        }
        match chart.kind() {
            ChartKind::Extended | ChartKind::Ordinary | ChartKind::Base => Ok(()),
            _ => usage(format!("no induced change on {chart}")),
        }
    }

    /// Images of all primed coordinates as polynomials in the unprimed ones.
    pub fn induced_map(&self, chart: Chart, twisted: bool) -> Result<Vec<Scalar>> {
        self.check_chart(chart)?;
        let (n, fields) = (chart.n(), chart.fields());
        let mut images: Vec<Scalar> = self
            .x_map
            .iter()
            .chain(&self.q_map)
            .map(|s| s.transfer(chart))
            .collect::<Result<_>>()?;
        if chart.kind() == ChartKind::Base {
            return Ok(images);
        }
        let scale = self.momentum_scale(twisted);
        let p = |i: usize, mu: usize| Scalar::coordinate(chart, chart.p(i, mu));
        for k in 0..fields {
            for kappa in 0..n {
                let mut s = Scalar::zero(chart);
                for i in 0..fields {
                    for mu in 0..n {
                        let w = &self.a[kappa][mu] * &self.b_inv[i][k];
                        s = &s + &p(i, mu).scale(&w);
                    }
                }
                images.push(s.scale(&scale));
            }
        }
        if let Some(e) = chart.energy() {
            let mut s = Scalar::coordinate(chart, e);
            for k in 0..fields {
                for mu in 0..n {
                    for i in 0..fields {
                        let w = &self.c[k][mu] * &self.b_inv[i][k];
                        s = &s - &p(i, mu).scale(&w);
                    }
                }
            }
            images.push(s.scale(&scale));
        }
        Ok(images)
    }

    /// Pull back a form written in primed coordinates along the induced
    /// (twisted) change of the form's chart.
    pub fn pullback_form(&self, alpha: &Form) -> Result<Form> {
        let chart = alpha.chart();
        let images = self.induced_map(chart, true)?;
        let differentials: Vec<Form> = images.iter().map(|s| exterior_derivative(&Form::scalar(s.clone()))).collect();
        let mut out = Form::zero(chart, alpha.degree());
        for (blade, c) in alpha.terms() {
            let mut acc = Form::scalar(c.substitute(&images, chart)?);
            for idx in blade.indices() {
                acc = acc.wedge(&differentials[idx]);
            }
            out = out.try_add(&acc)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::lie_derivative;
    use crate::scalar::{integer, rational};

    fn c(n: usize, f: usize) -> Chart {
        Chart::extended(n, f).unwrap()
    }

    fn var(chart: Chart, name: &str) -> Scalar {
        Scalar::coordinate(chart, chart.lookup(name).unwrap())
    }

    fn d(chart: Chart, name: &str) -> Form {
        Form::coordinate(chart, chart.lookup(name).unwrap())
    }

    #[test]
    fn theta_by_hand() {
        let ch = c(2, 1);
        // d^2x_1 = dx2, d^2x_2 = -dx1
        let expected = d(ch, "q").wedge(&d(ch, "x2")).scale(&var(ch, "p1_1"))
            - d(ch, "q").wedge(&d(ch, "x1")).scale(&var(ch, "p1_2"))
            + d(ch, "x1").wedge(&d(ch, "x2")).scale(&var(ch, "p"));
        assert_eq!(theta(ch).unwrap(), expected);
        let ch = c(1, 1);
        let expected = d(ch, "q").scale(&var(ch, "p1_1")) + d(ch, "x1").scale(&var(ch, "p"));
        assert_eq!(theta(ch).unwrap(), expected);
        assert!(theta(Chart::ordinary(2, 1).unwrap()).is_err());
    }

    #[test]
    fn omega_by_hand() {
        let ch = c(1, 1);
        let expected = d(ch, "q").wedge(&d(ch, "p1_1")) - d(ch, "p").wedge(&d(ch, "x1"));
        assert_eq!(omega(ch).unwrap(), expected);
        let ch = c(2, 1);
        let expected = d(ch, "q").wedge(&d(ch, "p1_1")).wedge(&d(ch, "x2"))
            - d(ch, "q").wedge(&d(ch, "p1_2")).wedge(&d(ch, "x1"))
            - d(ch, "p").wedge(&d(ch, "x1")).wedge(&d(ch, "x2"));
        assert_eq!(omega(ch).unwrap(), expected);
    }

    #[test]
    fn scaling_field_relations() {
        for (n, f) in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)] {
            let ch = c(n, f);
            let (th, om, s) = (theta(ch).unwrap(), omega(ch).unwrap(), sigma(ch).unwrap());
            assert_eq!(om, -exterior_derivative(&th));
            assert!(exterior_derivative(&om).is_zero());
            assert_eq!(lie_derivative(&th, &s).unwrap(), th);
            assert_eq!(lie_derivative(&om, &s).unwrap(), om);
            assert!(th.contract(&s).is_zero());
            assert_eq!(om.contract(&s), -th);
        }
    }

    #[test]
    fn ordinary_sigma() {
        let ch = Chart::ordinary(2, 1).unwrap();
        let at = |name: &str| Multivector::coordinate(ch, ch.lookup(name).unwrap()).scale(&var(ch, name));
        assert_eq!(sigma(ch).unwrap(), at("p1_1") + at("p1_2"));
    }

    #[test]
    fn contracted_volumes() {
        let ch = c(3, 1);
        assert_eq!(volume_contracted(ch, &[0]), d(ch, "x2").wedge(&d(ch, "x3")));
        assert_eq!(volume_contracted(ch, &[1]), -d(ch, "x1").wedge(&d(ch, "x3")));
        // i_{@x2} i_{@x1} d^3x = i_{@x2}(dx2^dx3) = dx3
        assert_eq!(volume_contracted(ch, &[0, 1]), d(ch, "x3"));
        assert_eq!(volume_contracted(ch, &[1, 0]), -d(ch, "x3"));
        let top = volume_contracted(ch, &[2, 0, 1]);
        assert_eq!(top.as_scalar().unwrap().as_constant().unwrap(), integer(1));
    }

    #[test]
    fn phi_form_matches_theta_at_point() {
        let ch = c(2, 1);
        let pt = |vals: [i64; 6]| vals.iter().map(|&v| integer(v)).collect::<Vec<_>>();
        assert_eq!(phi_form(ch, &pt([0, 0, 0, 1, 0, 0])).unwrap(), d(ch, "q").wedge(&d(ch, "x2")));
        assert_eq!(phi_form(ch, &pt([0, 0, 0, 0, 0, 1])).unwrap(), d(ch, "x1").wedge(&d(ch, "x2")));
        let z = pt([3, -1, 2, 5, -4, 7]);
        assert_eq!(phi_form(ch, &z).unwrap(), theta(ch).unwrap().eval_at(&z).unwrap());
        assert!(phi_form(ch, &z[..5]).is_err());
    }

    #[test]
    fn pairings() {
        let ch = c(2, 1);
        let z: Vec<Rational> = [0, 0, 0, 2, 0, 3].iter().map(|&v| integer(v)).collect();
        let u = vec![integer(5), integer(0)];
        assert_eq!(dual_pairing(ch, &z, &u, false).unwrap(), PairingResult::Scalar(integer(13)));
        assert_eq!(dual_pairing(ch, &z, &u, true).unwrap(), PairingResult::VolumeMultiple(integer(13)));
        let zero = vec![integer(0); 6];
        assert_eq!(dual_pairing(ch, &zero, &[integer(0), integer(0)], false).unwrap().value(), &integer(0));
        let ord = Chart::ordinary(2, 1).unwrap();
        let ones = vec![integer(1); 5];
        assert_eq!(dual_pairing(ord, &ones, &[integer(1), integer(1)], false).unwrap().value(), &integer(2));
    }

    fn base(n: usize, f: usize) -> Chart {
        Chart::base(n, f).unwrap()
    }

    #[test]
    fn swap_of_space_time_coordinates() {
        let b = base(2, 1);
        let x = |mu| Scalar::coordinate(b, b.x(mu));
        let change = CoordinateChange::affine(vec![x(1), x(0)], vec![Scalar::coordinate(b, b.q(0))]).unwrap();
        assert_eq!(change.jacobian_determinant(), &integer(-1));
        let ch = c(2, 1);
        let z: Vec<Rational> = [1, 2, 3, 5, 7, 11].iter().map(|&v| integer(v)).collect();
        let out = change.transform_momenta(ch, &z, true).unwrap();
        let expected: Vec<Rational> = [2, 1, 3, -7, -5, -11].iter().map(|&v| integer(v)).collect();
        assert_eq!(out, expected);
    }

    #[test]
    fn field_shift_corrects_energy() {
        let b = base(1, 1);
        let change = CoordinateChange::affine(
            vec![Scalar::coordinate(b, 0)],
            vec![&Scalar::coordinate(b, 1) + &Scalar::coordinate(b, 0)],
        )
        .unwrap();
        let ch = c(1, 1);
        let z = vec![integer(0), integer(0), integer(4), integer(9)];
        let out = change.transform_momenta(ch, &z, true).unwrap();
        assert_eq!(out[2], integer(4));
        assert_eq!(out[3], integer(5));
    }

    #[test]
    fn identity_change_and_inverse() {
        let b = base(2, 2);
        let id = CoordinateChange::affine(
            (0..2).map(|mu| Scalar::coordinate(b, b.x(mu))).collect(),
            (0..2).map(|i| Scalar::coordinate(b, b.q(i))).collect(),
        )
        .unwrap();
        let ch = c(2, 2);
        let z: Vec<Rational> = (0..ch.dim()).map(|k| rational(k as i64 + 1, 3)).collect();
        assert_eq!(id.transform_momenta(ch, &z, true).unwrap(), z);
        let th = theta(ch).unwrap();
        assert_eq!(id.pullback_form(&th).unwrap(), th);
    }

    #[test]
    fn pullback_of_differential() {
        let b = base(2, 1);
        let x = |mu| Scalar::coordinate(b, b.x(mu));
        let change = CoordinateChange::affine(vec![&x(0) + &x(1), x(1)], vec![Scalar::coordinate(b, b.q(0))]).unwrap();
        let ch = c(2, 1);
        assert_eq!(change.pullback_form(&d(ch, "x1")).unwrap(), d(ch, "x1") + d(ch, "x2"));
    }

    #[test]
    fn rejects_nonaffine_and_bad_inverse() {
        let b = base(1, 1);
        let x = Scalar::coordinate(b, 0);
        let q = Scalar::coordinate(b, 1);
        assert!(CoordinateChange::affine(vec![&x * &x], vec![q.clone()]).is_err());
        assert!(CoordinateChange::affine(vec![q.clone()], vec![x.clone()]).is_err());
        let two = Scalar::constant(b, integer(2));
        assert!(CoordinateChange::new(vec![&x * &two], vec![q.clone()], vec![x.clone()], vec![q]).is_err());
    }

    #[test]
    fn jet_transformation_preserves_the_pairing() {
        let b = base(2, 1);
        let x = |mu| Scalar::coordinate(b, b.x(mu));
        let q = Scalar::coordinate(b, b.q(0));
        let three = Scalar::constant(b, integer(3));
        let change = CoordinateChange::affine(
            vec![&x(0) + &x(1), &x(1).scale(&integer(2)) - &three],
            vec![&(&q.scale(&integer(-2)) + &x(0)) + &x(1).scale(&integer(5))],
        )
        .unwrap();
        let ch = c(2, 1);
        let z: Vec<Rational> = [1, 2, 3, 5, -7, 11].iter().map(|&v| integer(v)).collect();
        let u = vec![rational(1, 2), integer(-3)];
        for twisted in [false, true] {
            let z2 = change.transform_momenta(ch, &z, twisted).unwrap();
            let u2 = change.transform_jet(&u, false).unwrap();
            let before = dual_pairing(ch, &z, &u, twisted).unwrap();
            let after = dual_pairing(ch, &z2, &u2, twisted).unwrap();
            let factor = if twisted { change.jacobian_determinant().clone() } else { integer(1) };
            assert_eq!(after.value() * factor, *before.value());
        }
    }
}
