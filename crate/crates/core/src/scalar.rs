//! Polynomials with exact rational coefficients in the coordinates of a chart.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::chart::Chart;
use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Exponent vector, one entry per chart coordinate.
pub type Monomial = Vec<u16>;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `(-1)^k` as a rational.
pub fn parity(k: usize) -> Rational {
    if k.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

pub fn factorial(k: usize) -> Rational {
    (1..=k as i64).fold(Rational::one(), |acc, v| acc * integer(v))
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    chart: Chart,
    terms: BTreeMap<Monomial, Rational>,
}

impl Scalar {
    pub fn zero(chart: Chart) -> Scalar {
        Scalar { chart, terms: BTreeMap::new() }
    }

    pub fn constant(chart: Chart, value: Rational) -> Scalar {
        let mut s = Scalar::zero(chart);
        if !value.is_zero() {
            s.terms.insert(vec![0; chart.dim()], value);
        }
        s
    }

    pub fn one(chart: Chart) -> Scalar {
        Scalar::constant(chart, Rational::one())
    }

    /// The coordinate function with the given index.
    pub fn coordinate(chart: Chart, idx: usize) -> Scalar {
        assert!(idx < chart.dim(), "coordinate index out of range");
        let mut mono = vec![0; chart.dim()];
        mono[idx] = 1;
        let mut s = Scalar::zero(chart);
        s.terms.insert(mono, Rational::one());
        s
    }

    pub fn monomial(chart: Chart, exponents: Monomial, coefficient: Rational) -> Result<Scalar> {
        if exponents.len() != chart.dim() {
            return Err(Error::LengthMismatch { expected: chart.dim(), got: exponents.len() });
        }
        let mut s = Scalar::zero(chart);
        if !coefficient.is_zero() {
            s.terms.insert(exponents, coefficient);
        }
        Ok(s)
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.iter().map(|&e| e as usize).sum()).max()
    }

    /// True when every monomial only involves coordinates accepted by `allowed`.
    pub fn depends_only_on(&self, allowed: impl Fn(usize) -> bool) -> bool {
        self.terms
            .keys()
            .all(|m| m.iter().enumerate().all(|(i, &e)| e == 0 || allowed(i)))
    }

    /// Set of coordinate indices that actually occur.
    pub fn support(&self) -> Vec<usize> {
        let mut used = vec![false; self.chart.dim()];
        for m in self.terms.keys() {
            for (i, &e) in m.iter().enumerate() {
                used[i] |= e > 0;
            }
        }
        used.iter().enumerate().filter(|(_, &u)| u).map(|(i, _)| i).collect()
    }

    fn check_chart(&self, other: &Scalar) -> Result<()> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch(self.chart.to_string(), other.chart.to_string()));
        }
        Ok(())
    }

    fn insert(&mut self, mono: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        self.check_chart(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.check_chart(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check_chart(other)?;
        let mut out = Scalar::zero(self.chart);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mono = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.insert(mono, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rational) -> Scalar {
        if factor.is_zero() {
            return Scalar::zero(self.chart);
        }
        Scalar {
            chart: self.chart,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * factor)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Scalar {
        (0..k).fold(Scalar::one(self.chart), |acc, _| &acc * self)
    }

    /// Formal partial derivative with respect to the coordinate with index `idx`.
    pub fn partial(&self, idx: usize) -> Result<Scalar> {
        if idx >= self.chart.dim() {
            return Err(Error::UnknownCoordinate(format!("#{idx}")));
        }
        let mut out = Scalar::zero(self.chart);
        for (m, c) in &self.terms {
            if m[idx] == 0 {
                continue;
            }
            let mut mono = m.clone();
            mono[idx] -= 1;
            out.insert(mono, c * integer(m[idx] as i64));
        }
        Ok(out)
    }

    /// Partial derivative with respect to a coordinate named as in the DSL.
    pub fn partial_by_name(&self, name: &str) -> Result<Scalar> {
        self.partial(self.chart.lookup(name)?)
    }

    /// All non-zero first partial derivatives, by coordinate index.
    pub fn partials(&self) -> Vec<(usize, Scalar)> {
        self.support()
            .into_iter()
            .map(|i| (i, self.partial(i).expect("index from support")))
            .filter(|(_, s)| !s.is_zero())
            .collect()
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.chart.dim() {
            return Err(Error::LengthMismatch { expected: self.chart.dim(), got: point.len() });
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(m) {
                for _ in 0..e {
                    term *= x;
                }
            }
            total += term;
        }
        Ok(total)
    }

    /// Replace every coordinate by a polynomial over `target`.
    pub fn substitute(&self, images: &[Scalar], target: Chart) -> Result<Scalar> {
        if images.len() != self.chart.dim() {
            return Err(Error::LengthMismatch { expected: self.chart.dim(), got: images.len() });
        }
        if let Some(bad) = images.iter().find(|s| s.chart != target) {
            return Err(Error::ChartMismatch(bad.chart.to_string(), target.to_string()));
        }
        let mut out = Scalar::zero(target);
        for (m, c) in &self.terms {
            let mut term = Scalar::constant(target, c.clone());
            for (img, &e) in images.iter().zip(m) {
                for _ in 0..e {
                    term = &term * img;
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Read the same polynomial on another chart with the same `(n, N)`,
    /// matching coordinates by identity.
    pub fn transfer(&self, target: Chart) -> Result<Scalar> {
        if target == self.chart {
            return Ok(self.clone());
        }
        if target.n() != self.chart.n() || target.fields() != self.chart.fields() {
            return Err(Error::ChartMismatch(self.chart.to_string(), target.to_string()));
        }
        let map: Vec<Option<usize>> = (0..self.chart.dim())
            .map(|i| target.index_of(self.chart.coordinate(i)))
            .collect();
        let mut out = Scalar::zero(target);
        for (m, c) in &self.terms {
            let mut mono = vec![0; target.dim()];
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => mono[j] = e,
                    None => {
                        return Err(Error::Usage(format!(
                            "coordinate {} does not exist on {}",
                            self.chart.name(i),
                            target
                        )))
                    }
                }
            }
            out.insert(mono, c.clone());
        }
        Ok(out)
    }

    /// Monomials ordered graded-lexicographically: higher total degree first,
    /// then larger exponents of earlier chart coordinates first.
    fn graded_lex(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().map(|&e| e as u32).sum();
            let db: u32 = b.iter().map(|&e| e as u32).sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (mono, c)) in self.graded_lex().into_iter().enumerate() {
            let factors: Vec<String> = mono
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let name = self.chart.name(i);
                    if e == 1 {
                        name
                    } else {
                        format!("{name}**{e}")
                    }
                })
                .collect();
            let magnitude = c.abs();
            let body = match (factors.is_empty(), magnitude.is_one()) {
                (true, _) => format_rational(&magnitude),
                (false, true) => factors.join("*"),
                (false, false) => format!("{}*{}", format_rational(&magnitude), factors.join("*")),
            };
            match (k, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar addition across charts")
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_sub(rhs).expect("scalar subtraction across charts")
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar product across charts")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.scale(&-Rational::one())
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Chart {
        Chart::extended(2, 1).unwrap()
    }

    fn var(name: &str) -> Scalar {
        let c = chart();
        Scalar::coordinate(c, c.lookup(name).unwrap())
    }

    fn k(v: i64) -> Scalar {
        Scalar::constant(chart(), integer(v))
    }

    #[test]
    fn difference_of_squares() {
        let q = var("q");
        let lhs = &(&q + &k(1)) * &(&q - &k(1));
        assert_eq!(lhs, &(&q * &q) - &k(1));
        assert_eq!(lhs.to_string(), "q**2 - 1");
    }

    #[test]
    fn additive_identity() {
        let p = var("p1_1");
        assert_eq!(&p + &Scalar::zero(chart()), p);
    }

    #[test]
    fn schoolbook_square() {
        let xq = &var("x1") * &var("q");
        let sq = &xq * &xq;
        let mut mono = vec![0; 6];
        mono[0] = 2;
        mono[2] = 2;
        assert_eq!(sq, Scalar::monomial(chart(), mono, integer(1)).unwrap());
    }

    #[test]
    fn partial_derivatives() {
        let f = &(&var("q") * &var("q")) * &var("p1_1");
        assert_eq!(f.partial_by_name("q").unwrap(), &(&k(2) * &var("q")) * &var("p1_1"));
        assert!(var("x1").partial_by_name("x2").unwrap().is_zero());
        let g = &var("p1_1") * &var("p1_2");
        assert_eq!(g.partial_by_name("p1_1").unwrap(), var("p1_2"));
        assert!(f.partial_by_name("y").is_err());
    }

    #[test]
    fn evaluation() {
        let f = &(&var("q") * &var("q")) - &k(1);
        let mut point = vec![integer(0); 6];
        point[2] = integer(3);
        assert_eq!(f.eval(&point).unwrap(), integer(8));
        assert_eq!(Scalar::zero(chart()).eval(&point).unwrap(), integer(0));
        let g = &var("p1_1") + &var("x1");
        point[3] = rational(1, 2);
        point[0] = rational(1, 3);
        assert_eq!(g.eval(&point).unwrap(), rational(5, 6));
        assert!(g.eval(&point[..3]).is_err());
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let other = Scalar::one(Chart::extended(1, 1).unwrap());
        assert!(matches!(k(1).try_add(&other), Err(Error::ChartMismatch(..))));
    }

    #[test]
    fn rendering_order() {
        let f = &(&var("x1") + &var("p")) + &(&var("q") * &var("p1_2")).scale(&rational(-3, 2));
        assert_eq!(f.to_string(), "-3/2*q*p1_2 + x1 + p");
    }

    #[test]
    fn transfer_between_charts() {
        let ord = Chart::ordinary(2, 1).unwrap();
        let f = &var("q") * &var("p1_2");
        let g = f.transfer(ord).unwrap();
        assert_eq!(g.to_string(), "q*p1_2");
        assert_eq!(g.transfer(chart()).unwrap(), f);
        assert!(var("p").transfer(ord).is_err());
    }
}
