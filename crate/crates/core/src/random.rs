//! Seeded generators of random polynomial objects for identity checks.
//!
//! Coefficients are rationals of magnitude at most 5 and polynomials have
//! total degree at most 2 unless stated otherwise.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::Chart;
use crate::connections::ConnectionData;
use crate::error::Result;
use crate::exterior::{Blade, Form, Graded, Multivector, Variance};
use crate::hamiltonian::{
    canonical_lift, hamiltonian_field_for_function, is_exact_hamiltonian, kernel_basis, momentum_map,
    solve_hamiltonian_field, HamiltonianPair,
};
use crate::multiphase::{volume_contracted, CoordinateChange};
use crate::scalar::{Rational, Scalar};

pub struct Sampler {
    rng: ChaCha8Rng,
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

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn below(&mut self, bound: usize) -> usize {
        self.rng.gen_range(0..bound)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen()
    }

    /// Nonzero rational `a/b` with `|a/b| <= 5`.
    pub fn rational(&mut self) -> Rational {
        loop {
            let den: i64 = self.rng.gen_range(1..=3);
            let num: i64 = self.rng.gen_range(-5 * den..=5 * den);
            if num != 0 {
                return Rational::new(num.into(), den.into());
            }
        }
    }

    pub fn small_integer(&mut self) -> i64 {
        self.rng.gen_range(-3..=3)
    }

    /// Polynomial in the listed coordinates with up to `terms` monomials of
    /// total degree at most `max_degree`.
    pub fn scalar_in(&mut self, chart: Chart, vars: &[usize], max_degree: usize, terms: usize) -> Scalar {
        let mut out = Scalar::zero(chart);
        for _ in 0..terms {
            let mut exponents = vec![0u16; chart.dim()];
            if !vars.is_empty() {
                for _ in 0..self.rng.gen_range(0..=max_degree) {
                    exponents[*vars.choose(&mut self.rng).unwrap()] += 1;
                }
            }
            let c = self.rational();
            out = out + Scalar::monomial(chart, exponents, c).expect("exponents sized to chart");
        }
        out
    }

    pub fn scalar(&mut self, chart: Chart) -> Scalar {
        let vars: Vec<usize> = (0..chart.dim()).collect();
        self.scalar_in(chart, &vars, 2, 3)
    }

    /// Polynomial in the base coordinates `(x, q)`.
    pub fn base_scalar(&mut self, chart: Chart) -> Scalar {
        let vars: Vec<usize> = (0..chart.n() + chart.fields()).collect();
        self.scalar_in(chart, &vars, 2, 3)
    }

    pub fn x_scalar(&mut self, chart: Chart) -> Scalar {
        let vars: Vec<usize> = (0..chart.n()).collect();
        self.scalar_in(chart, &vars, 2, 2)
    }

    fn graded<K: Variance>(&mut self, chart: Chart, degree: usize, allowed: &[usize], terms: usize) -> Graded<K> {
        let blades = subsets(allowed.len(), degree);
        let mut out = Graded::<K>::zero(chart, degree);
        if blades.is_empty() {
            return out;
        }
        for _ in 0..terms {
            let pick = blades.choose(&mut self.rng).unwrap();
            let blade = Blade::from_sorted(&pick.iter().map(|&k| allowed[k]).collect::<Vec<_>>());
            let c = self.scalar(chart);
            out = out + Graded::from_terms(chart, degree, [(blade, c)]);
        }
        out
    }

    pub fn form(&mut self, chart: Chart, degree: usize) -> Form {
        let all: Vec<usize> = (0..chart.dim()).collect();
        self.graded(chart, degree, &all, 2)
    }

    pub fn multivector(&mut self, chart: Chart, degree: usize) -> Multivector {
        let all: Vec<usize> = (0..chart.dim()).collect();
        self.graded(chart, degree, &all, 2)
    }

    /// Form built from `dx` only, coefficients in every coordinate.
    pub fn horizontal_form(&mut self, chart: Chart, degree: usize) -> Form {
        let xs: Vec<usize> = (0..chart.n()).collect();
        self.graded(chart, degree, &xs, 2)
    }

    /// Invertible affine change of base coordinates.
    pub fn affine_change(&mut self, base: Chart) -> CoordinateChange {
        loop {
            let (n, fields) = (base.n(), base.fields());
            let dim = n + fields;
            let linear = |s: &mut Sampler, allowed: usize| {
                let mut f = Scalar::constant(base, Rational::from_integer(s.small_integer().into()));
                for b in 0..allowed {
                    let c = s.small_integer();
                    if c != 0 {
                        f = f + Scalar::coordinate(base, b).scale(&Rational::from_integer(c.into()));
                    }
                }
                f
            };
            let x_map: Vec<Scalar> = (0..n).map(|_| linear(self, n)).collect();
            let q_map: Vec<Scalar> = (n..dim).map(|_| linear(self, dim)).collect();
            if let Ok(change) = CoordinateChange::affine(x_map, q_map) {
                return change;
            }
        }
    }

    pub fn connection(&mut self, base: Chart) -> ConnectionData {
        let (n, fields) = (base.n(), base.fields());
        let gamma_e = (0..fields).map(|_| (0..n).map(|_| self.base_scalar(base)).collect()).collect();
        let mut gamma_tm = vec![vec![vec![Scalar::zero(base); n]; n]; n];
        for kappa in 0..n {
            for mu in 0..n {
                for lambda in mu..n {
                    let c = self.x_scalar(base);
                    gamma_tm[kappa][mu][lambda] = c.clone();
                    gamma_tm[kappa][lambda][mu] = c;
                }
            }
        }
        ConnectionData::new(base, gamma_e, gamma_tm).expect("symmetric x-only data")
    }

    /// Connection with constant coefficients.
    pub fn constant_connection(&mut self, base: Chart) -> ConnectionData {
        let (n, fields) = (base.n(), base.fields());
        let c = |s: &mut Sampler| Scalar::constant(base, Rational::from_integer(s.small_integer().into()));
        let gamma_e = (0..fields).map(|_| (0..n).map(|_| c(self)).collect()).collect();
        let mut gamma_tm = vec![vec![vec![Scalar::zero(base); n]; n]; n];
        for kappa in 0..n {
            for mu in 0..n {
                for lambda in mu..n {
                    let v = c(self);
                    gamma_tm[kappa][mu][lambda] = v.clone();
                    gamma_tm[kappa][lambda][mu] = v;
                }
            }
        }
        ConnectionData::new(base, gamma_e, gamma_tm).expect("symmetric constant data")
    }

    /// Canonical lift of a random projectable vector field.
    pub fn lift(&mut self, chart: Chart) -> Multivector {
        let v_x: Vec<Scalar> = (0..chart.n()).map(|_| self.x_scalar(chart)).collect();
        let v_q: Vec<Scalar> = (0..chart.fields()).map(|_| self.base_scalar(chart)).collect();
        canonical_lift(&v_x, &v_q).expect("projectable field")
    }

    /// `h xi` for a random kernel element `xi` and random function `h`.
    pub fn kernel_field(&mut self, chart: Chart, r: usize) -> Multivector {
        let basis = kernel_basis(chart, r).expect("valid degree");
        let mut out = Multivector::zero(chart, r);
        if basis.elements.is_empty() {
            return out;
        }
        for _ in 0..2 {
            let xi = basis.elements.choose(&mut self.rng).unwrap().clone();
            let h = self.scalar_in(chart, &(0..chart.dim()).collect::<Vec<_>>(), 1, 2);
            out = out + xi.scale(&h);
        }
        out
    }

    fn constant_x_wedge(&mut self, chart: Chart, r: usize) -> Multivector {
        let tuple = subsets(chart.n(), r);
        let pick = tuple.choose(&mut self.rng).unwrap();
        let blade = Blade::from_sorted(&pick.iter().map(|&mu| chart.x(mu)).collect::<Vec<_>>());
        Multivector::from_terms(chart, r, [(blade, Scalar::constant(chart, self.rational()))])
    }

    /// Exact Hamiltonian `r`-multivector field, `1 <= r <= n`.
    pub fn exact_hamiltonian_field(&mut self, chart: Chart, r: usize) -> Multivector {
        if r == 1 {
            return self.lift(chart);
        }
        for _ in 0..16 {
            let head = match self.below(3) {
                0 => self.constant_x_wedge(chart, r - 1).wedge(&self.lift_constant_x(chart)),
                1 => self.constant_x_wedge(chart, r),
                _ => {
                    let lift = self.lift(chart);
                    let rest = self.constant_x_wedge(chart, r - 1);
                    lift.wedge(&rest)
                }
            };
            let candidate = head + self.kernel_field(chart, r);
            if is_exact_hamiltonian(&candidate).unwrap_or(false) {
                return candidate;
            }
        }
        self.constant_x_wedge(chart, r) + self.kernel_field(chart, r)
    }

    /// Lift of a field with constant `x` part and `q` part depending on `q` only.
    fn lift_constant_x(&mut self, chart: Chart) -> Multivector {
        let v_x: Vec<Scalar> = (0..chart.n()).map(|_| Scalar::constant(chart, self.rational())).collect();
        let qs: Vec<usize> = (chart.n()..chart.n() + chart.fields()).collect();
        let v_q: Vec<Scalar> = (0..chart.fields()).map(|_| self.scalar_in(chart, &qs, 2, 2)).collect();
        canonical_lift(&v_x, &v_q).expect("projectable field")
    }

    /// Horizontal form of degree `n - r` whose components are affine in the
    /// multimomenta: `f^{mu} = sum_k (-1)^{k-1} p_j^{mu_k} w^{j, mu \ mu_k}(x, q) + g^{mu}(x, q)`.
    pub fn kanatchikov_form(&mut self, chart: Chart, r: usize) -> Form {
        let n = chart.n();
        let mut w: std::collections::BTreeMap<(usize, Vec<usize>), Scalar> = Default::default();
        for j in 0..chart.fields() {
            for rest in subsets(n, r - 1) {
                if self.coin() {
                    w.insert((j, rest), self.base_scalar(chart));
                }
            }
        }
        let mut out = Form::zero(chart, n - r);
        for mus in subsets(n, r) {
            let mut c = if self.coin() { self.base_scalar(chart) } else { Scalar::zero(chart) };
            for (k, &mu) in mus.iter().enumerate() {
                let rest: Vec<usize> = mus.iter().copied().filter(|&m| m != mu).collect();
                for j in 0..chart.fields() {
                    if let Some(wj) = w.get(&(j, rest.clone())) {
                        let term = &Scalar::coordinate(chart, chart.p(j, mu)) * wj;
                        c = if k % 2 == 0 { &c + &term } else { &c - &term };
                    }
                }
            }
            out = out + volume_contracted(chart, &mus).scale(&c);
        }
        out
    }

    /// Random Poisson form with a Hamiltonian field: a function, a momentum
    /// map image or a horizontal form, chosen by `kind` modulo 3.
    pub fn poisson_pair(&mut self, chart: Chart, kind: usize) -> Result<HamiltonianPair> {
        let n = chart.n();
        match kind % 3 {
            0 => {
                let f = self.scalar(chart);
                let field = hamiltonian_field_for_function(&f)?;
                HamiltonianPair::new(Form::scalar(f), field)
            }
            1 => {
                let r = 1 + self.below(n);
                momentum_map(&self.exact_hamiltonian_field(chart, r))
            }
            _ => {
                let r = 1 + self.below(n.min(2));
                solve_hamiltonian_field(&self.kanatchikov_form(chart, r))
            }
        }
    }

    /// Locally Hamiltonian field: the field of a random Poisson form plus a
    /// kernel perturbation.
    pub fn locally_hamiltonian_pair(&mut self, chart: Chart) -> Result<HamiltonianPair> {
        let kind = self.below(3);
        let pair = self.poisson_pair(chart, kind)?;
        let r = pair.r();
        if r == 0 {
            return Ok(pair);
        }
        let field = pair.field().clone() + self.kernel_field(chart, r);
        pair.with_field(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{kernel_class, PoissonClass};

    #[test]
    fn seeds_are_deterministic() {
        let ch = Chart::extended(2, 1).unwrap();
        let (mut a, mut b) = (Sampler::new(7), Sampler::new(7));
        for _ in 0..5 {
            assert_eq!(a.form(ch, 2), b.form(ch, 2));
        }
    }

    #[test]
    fn coefficient_bounds() {
        let mut s = Sampler::new(1);
        let five = Rational::from_integer(5.into());
        for _ in 0..200 {
            let r = s.rational();
            assert!(r.numer() != &0.into() && r.clone() <= five && r >= -five.clone());
        }
        let ch = Chart::extended(2, 1).unwrap();
        for _ in 0..50 {
            assert!(s.scalar(ch).degree().unwrap_or(0) <= 2);
        }
    }

    #[test]
    fn generated_fields_have_their_classes() {
        let ch = Chart::extended(2, 1).unwrap();
        let mut s = Sampler::new(3);
        for r in 1..=2 {
            for _ in 0..4 {
                assert!(is_exact_hamiltonian(&s.exact_hamiltonian_field(ch, r)).unwrap());
            }
        }
        for r in 1..=2 {
            for _ in 0..4 {
                let f = s.kanatchikov_form(ch, r);
                assert_eq!(kernel_class(&f).unwrap(), PoissonClass::Poisson, "{f}");
            }
        }
        for kind in 0..6 {
            let pair = s.poisson_pair(ch, kind).unwrap();
            assert_eq!(kernel_class(pair.form()).unwrap(), PoissonClass::Poisson);
            assert!(crate::hamiltonian::is_locally_hamiltonian(s.locally_hamiltonian_pair(ch).unwrap().field()).unwrap());
        }
    }

    #[test]
    fn generated_connections_are_valid() {
        let base = Chart::base(2, 2).unwrap();
        let mut s = Sampler::new(5);
        for _ in 0..3 {
            assert!(crate::connections::duality_check(&s.connection(base)).unwrap());
        }
        let change = s.affine_change(base);
        assert!(!change.jacobian_determinant().numer().eq(&0.into()));
    }
}
