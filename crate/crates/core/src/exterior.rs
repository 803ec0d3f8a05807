//! Differential forms and multivector fields with polynomial coefficients.
//!
//! Both are stored as maps from a basis blade (a strictly increasing tuple of
//! coordinate indices, kept as a bit mask) to its [`Scalar`] coefficient.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// A basis element `dx^{a1}^..^dx^{ak}` or `@a1^..^@ak` with `a1 < .. < ak`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Blade(pub u64);

impl Blade {
    pub const EMPTY: Blade = Blade(0);

    pub fn single(idx: usize) -> Blade {
        Blade(1 << idx)
    }

    pub fn from_sorted(indices: &[usize]) -> Blade {
        Blade(indices.iter().fold(0, |m, &i| m | 1 << i))
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, idx: usize) -> bool {
        self.0 >> idx & 1 == 1
    }

    pub fn indices(self) -> Vec<usize> {
        (0..64).filter(|&i| self.contains(i)).collect()
    }

    /// Number of members strictly below `idx`.
    fn below(self, idx: usize) -> u32 {
        (self.0 & ((1u64 << idx) - 1)).count_ones()
    }

    /// `self ^ other` as a sign and blade, `None` when they share an index.
    pub fn wedge(self, other: Blade) -> Option<(bool, Blade)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let swaps: u32 = other.indices().iter().map(|&b| (self.0 >> b).count_ones()).sum();
        Some((swaps % 2 == 1, Blade(self.0 | other.0)))
    }

    /// Contract the form blade `self` with the vector blade `v`, inserting the
    /// vectors of `v` one at a time in increasing order. Returns the sign flag
    /// and remaining blade, or `None` when the result vanishes.
    pub fn contract(self, v: Blade) -> Option<(bool, Blade)> {
        if v.0 & !self.0 != 0 {
            return None;
        }
        let mut rest = self;
        let mut odd = false;
        for a in v.indices() {
            odd ^= rest.below(a) % 2 == 1;
            rest = Blade(rest.0 & !(1 << a));
        }
        Some((odd, rest))
    }

    /// Sign flag for inserting `idx` at the front of the blade.
    pub fn insertion_sign(self, idx: usize) -> bool {
        self.below(idx) % 2 == 1
    }
}

impl Ord for Blade {
    /// Grade first, then lexicographic order of the sorted index tuples.
    fn cmp(&self, other: &Blade) -> Ordering {
        self.grade().cmp(&other.grade()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.contains(diff.trailing_zeros() as usize) {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Blade) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sort an index tuple, returning the sorted tuple and the parity of the
/// sorting permutation (`0` when an index repeats).
pub fn basis_monomial_sign(indices: &[usize]) -> (Vec<usize>, i8) {
    let mut v = indices.to_vec();
    let mut sign = 1i8;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return (v, 0);
    }
    (v, sign)
}

pub trait Variance: Clone + Copy + PartialEq + Eq + fmt::Debug + Default {
    const IS_FORM: bool;
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Hash)]
pub struct Covariant;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Hash)]
pub struct Contravariant;

impl Variance for Covariant {
    const IS_FORM: bool = true;
}

impl Variance for Contravariant {
    const IS_FORM: bool = false;
}

/// Homogeneous element of the exterior algebra with polynomial coefficients.
#[derive(Clone, Debug)]
pub struct Graded<K: Variance> {
    chart: Chart,
    degree: usize,
    terms: BTreeMap<Blade, Scalar>,
    kind: PhantomData<K>,
}

pub type Form = Graded<Covariant>;
pub type Multivector = Graded<Contravariant>;

impl<K: Variance> PartialEq for Graded<K> {
    /// Zero objects compare equal regardless of their nominal degree.
    fn eq(&self, other: &Self) -> bool {
        self.chart == other.chart
            && self.terms == other.terms
            && (self.degree == other.degree || self.terms.is_empty())
    }
}

impl<K: Variance> Eq for Graded<K> {}

impl<K: Variance> Graded<K> {
    pub fn zero(chart: Chart, degree: usize) -> Self {
        Graded { chart, degree, terms: BTreeMap::new(), kind: PhantomData }
    }

    /// A degree-0 object with the given coefficient.
    pub fn scalar(s: Scalar) -> Self {
        let mut g = Self::zero(s.chart(), 0);
        if !s.is_zero() {
            g.terms.insert(Blade::EMPTY, s);
        }
        g
    }

    /// Basis element of a single coordinate, `d(x)` or `@x`.
    pub fn coordinate(chart: Chart, idx: usize) -> Self {
        assert!(idx < chart.dim(), "coordinate index out of range");
        let mut g = Self::zero(chart, 1);
        g.terms.insert(Blade::single(idx), Scalar::one(chart));
        g
    }

    /// Wedge of the listed coordinate basis elements, in the given order.
    pub fn basis(chart: Chart, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= chart.dim()) {
            return Err(Error::UnknownCoordinate(format!("#{bad}")));
        }
        let (sorted, sign) = basis_monomial_sign(indices);
        let mut g = Self::zero(chart, indices.len());
        if sign != 0 {
            let c = Scalar::constant(chart, Rational::from_integer(sign.into()));
            g.terms.insert(Blade::from_sorted(&sorted), c);
        }
        Ok(g)
    }

    /// Build from blade/coefficient pairs; blades must have grade `degree`.
    pub fn from_terms(
        chart: Chart,
        degree: usize,
        terms: impl IntoIterator<Item = (Blade, Scalar)>,
    ) -> Self {
        let mut g = Self::zero(chart, degree);
        for (b, c) in terms {
            assert_eq!(b.grade(), degree, "blade grade differs from degree");
            g.add_term(b, c);
        }
        g
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Blade, Scalar> {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, blade: Blade) -> Scalar {
        self.terms.get(&blade).cloned().unwrap_or_else(|| Scalar::zero(self.chart))
    }

    /// The coefficient of a degree-0 object.
    pub fn as_scalar(&self) -> Option<Scalar> {
        (self.degree == 0 || self.is_zero()).then(|| self.coefficient(Blade::EMPTY))
    }

    pub(crate) fn add_term(&mut self, blade: Blade, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&blade) {
            Some(old) => {
                let sum = &old + &c;
                if !sum.is_zero() {
                    self.terms.insert(blade, sum);
                }
            }
            None => {
                self.terms.insert(blade, c);
            }
        }
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch(self.chart.to_string(), other.chart.to_string()));
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = if self.is_zero() { other.clone() } else { self.clone() };
        if !self.is_zero() {
            for (b, c) in &other.terms {
                out.add_term(*b, c.clone());
            }
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// Multiply every coefficient by a function.
    pub fn try_scale(&self, f: &Scalar) -> Result<Self> {
        if f.chart() != self.chart {
            return Err(Error::ChartMismatch(f.chart().to_string(), self.chart.to_string()));
        }
        let mut out = Self::zero(self.chart, self.degree);
        for (b, c) in &self.terms {
            out.add_term(*b, c * f);
        }
        Ok(out)
    }

    pub fn scale(&self, f: &Scalar) -> Self {
        self.try_scale(f).expect("scaling across charts")
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        let mut out = Self::zero(self.chart, self.degree);
        if r.is_zero() {
            return out;
        }
        for (b, c) in &self.terms {
            out.terms.insert(*b, c.scale(r));
        }
        out
    }

    /// Apply `(-1)^k`.
    pub fn signed(&self, k: usize) -> Self {
        if k.is_multiple_of(2) {
            self.clone()
        } else {
            -self
        }
    }

    pub fn try_wedge(&self, other: &Self) -> Result<Self> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch(self.chart.to_string(), other.chart.to_string()));
        }
        let mut out = Self::zero(self.chart, self.degree + other.degree);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((odd, blade)) = a.wedge(*b) {
                    let c = ca * cb;
                    out.add_term(blade, if odd { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Self) -> Self {
        self.try_wedge(other).expect("wedge across charts")
    }

    /// Apply a function to every coefficient, keeping blades.
    pub fn map_coefficients(&self, mut f: impl FnMut(&Scalar) -> Scalar) -> Self {
        let mut out = Self::zero(self.chart, self.degree);
        for (b, c) in &self.terms {
            out.add_term(*b, f(c));
        }
        out
    }

    /// Same object read on another chart with the same `(n, N)`.
    pub fn transfer(&self, target: Chart) -> Result<Self> {
        if target.n() != self.chart.n() || target.fields() != self.chart.fields() {
            return Err(Error::ChartMismatch(self.chart.to_string(), target.to_string()));
        }
        let map = |i: usize| {
            target
                .index_of(self.chart.coordinate(i))
                .ok_or_else(|| Error::Usage(format!("coordinate {} missing on {target}", self.chart.name(i))))
        };
        let mut out = Self::zero(target, self.degree);
        for (b, c) in &self.terms {
            let indices: Vec<usize> = b.indices().into_iter().map(map).collect::<Result<_>>()?;
            let basis = Self::basis(target, &indices)?;
            let coefficient = c.transfer(target)?;
            out = &out + &basis.scale(&coefficient);
        }
        Ok(out)
    }

    fn basis_text(&self, blade: Blade) -> String {
        blade
            .indices()
            .iter()
            .map(|&i| {
                let name = self.chart.name(i);
                if K::IS_FORM {
                    format!("d({name})")
                } else {
                    format!("@{name}")
                }
            })
            .collect::<Vec<_>>()
            .join("^")
    }
}

impl Form {
    /// Contraction `i_X alpha`, with `i_{X1^..^Xr} = i_{Xr} .. i_{X1}`.
    /// Returns the zero 0-form when `X` has higher degree than `alpha`.
    pub fn try_contract(&self, x: &Multivector) -> Result<Form> {
        if self.chart != x.chart {
            return Err(Error::ChartMismatch(self.chart.to_string(), x.chart.to_string()));
        }
        if x.degree > self.degree {
            return Ok(Form::zero(self.chart, 0));
        }
        let mut out = Form::zero(self.chart, self.degree - x.degree);
        for (v, cv) in &x.terms {
            for (b, cb) in &self.terms {
                if let Some((odd, rest)) = b.contract(*v) {
                    let c = cv * cb;
                    out.add_term(rest, if odd { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn contract(&self, x: &Multivector) -> Form {
        self.try_contract(x).expect("contraction across charts")
    }

    /// Evaluate every coefficient at a point, giving a constant form.
    pub fn eval_at(&self, point: &[Rational]) -> Result<Form> {
        let mut out = Form::zero(self.chart, self.degree);
        for (b, c) in &self.terms {
            out.add_term(*b, Scalar::constant(self.chart, c.eval(point)?));
        }
        Ok(out)
    }

    /// Replace each basis 1-form `dx^a` by `images[a]` and wedge out.
    pub fn substitute_one_forms(&self, images: &[Form]) -> Result<Form> {
        if images.len() != self.chart.dim() {
            return Err(Error::LengthMismatch { expected: self.chart.dim(), got: images.len() });
        }
        let mut out = Form::zero(self.chart, self.degree);
        for (b, c) in &self.terms {
            let mut acc = Form::scalar(c.clone());
            for i in b.indices() {
                acc = acc.try_wedge(&images[i])?;
            }
            out = out.try_add(&acc)?;
        }
        Ok(out)
    }
}

impl<K: Variance> fmt::Display for Graded<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (blade, c)) in self.terms.iter().enumerate() {
            let coefficient = c.to_string();
            let text = if blade.grade() == 0 {
                if c.len() > 1 && k > 0 {
                    format!("({coefficient})")
                } else {
                    coefficient
                }
            } else {
                let basis = self.basis_text(*blade);
                if c.len() > 1 {
                    format!("({coefficient})*{basis}")
                } else if coefficient == "1" {
                    basis
                } else if coefficient == "-1" {
                    format!("-{basis}")
                } else {
                    format!("{coefficient}*{basis}")
                }
            };
            match (k, text.strip_prefix('-')) {
                (0, _) => write!(f, "{text}")?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {text}")?,
            }
        }
        Ok(())
    }
}

impl<'a, K: Variance> Add<&'a Graded<K>> for &'a Graded<K> {
    type Output = Graded<K>;
    fn add(self, rhs: &Graded<K>) -> Graded<K> {
        self.try_add(rhs).expect("incompatible exterior sum")
    }
}

impl<'a, K: Variance> Sub<&'a Graded<K>> for &'a Graded<K> {
    type Output = Graded<K>;
    fn sub(self, rhs: &Graded<K>) -> Graded<K> {
        self.try_sub(rhs).expect("incompatible exterior difference")
    }
}

impl<K: Variance> Neg for &Graded<K> {
    type Output = Graded<K>;
    fn neg(self) -> Graded<K> {
        self.scale_rational(&-Rational::one())
    }
}

impl<K: Variance> Add for Graded<K> {
    type Output = Graded<K>;
    fn add(self, rhs: Graded<K>) -> Graded<K> {
        &self + &rhs
    }
}

impl<K: Variance> Sub for Graded<K> {
    type Output = Graded<K>;
    fn sub(self, rhs: Graded<K>) -> Graded<K> {
        &self - &rhs
    }
}

impl<K: Variance> Neg for Graded<K> {
    type Output = Graded<K>;
    fn neg(self) -> Graded<K> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::integer;

    fn c21() -> Chart {
        Chart::extended(2, 1).unwrap()
    }

    fn d(name: &str) -> Form {
        let c = c21();
        Form::coordinate(c, c.lookup(name).unwrap())
    }

    fn at(name: &str) -> Multivector {
        let c = c21();
        Multivector::coordinate(c, c.lookup(name).unwrap())
    }

    #[test]
    fn monomial_sign() {
        assert_eq!(basis_monomial_sign(&[2, 1]), (vec![1, 2], -1));
        assert_eq!(basis_monomial_sign(&[1, 1]).1, 0);
        assert_eq!(basis_monomial_sign(&[3, 1, 2]), (vec![1, 2, 3], 1));
    }

    #[test]
    fn wedge_basics() {
        let vol = d("x1").wedge(&d("x2"));
        assert_eq!(vol, Form::basis(c21(), &[0, 1]).unwrap());
        assert!(d("x1").wedge(&d("x1")).is_zero());
        let a = d("q").wedge(&d("x1"));
        let blade = Blade::from_sorted(&[0, 2]);
        assert_eq!(a.coefficient(blade), Scalar::constant(c21(), integer(-1)));
        assert_eq!(a, -d("x1").wedge(&d("q")));
    }

    #[test]
    fn iterated_contraction() {
        let alpha = d("q").wedge(&d("p1_1")).wedge(&d("x2"));
        let x = at("q").wedge(&at("p1_1"));
        let stepwise = alpha.contract(&at("q")).contract(&at("p1_1"));
        assert_eq!(alpha.contract(&x), stepwise);
        assert_eq!(stepwise, d("x2"));
        assert_eq!(d("x1").wedge(&d("x2")).contract(&at("x1")), d("x2"));
    }

    #[test]
    fn underflow_is_zero_function() {
        let out = d("x1").contract(&at("x1").wedge(&at("x2")));
        assert!(out.is_zero());
        assert_eq!(out.degree(), 0);
    }

    #[test]
    fn blade_order_is_tuple_lex() {
        let a = Blade::from_sorted(&[0, 3]);
        let b = Blade::from_sorted(&[1, 2]);
        assert!(a < b);
        assert!(Blade::from_sorted(&[0, 1]) < a);
        assert!(Blade::single(5) < Blade::from_sorted(&[0, 1]));
    }

    #[test]
    fn rendering() {
        let c = c21();
        let p11 = Scalar::coordinate(c, c.lookup("p1_1").unwrap());
        let f = d("q").wedge(&d("x2")).scale(&p11) + d("x1").wedge(&d("q")).scale(&(&p11 + &Scalar::one(c)));
        assert_eq!(f.to_string(), "(p1_1 + 1)*d(x1)^d(q) - p1_1*d(x2)^d(q)");
        assert_eq!(at("q").scale_rational(&integer(2)).to_string(), "2*@q");
        assert_eq!(Form::zero(c, 3).to_string(), "0");
    }

    #[test]
    fn degree_mismatch_rejected() {
        assert!(matches!(d("x1").try_add(&d("x1").wedge(&d("q"))), Err(Error::DegreeMismatch(1, 2))));
        assert!(d("x1").try_add(&Form::zero(c21(), 2)).is_ok());
    }
}
