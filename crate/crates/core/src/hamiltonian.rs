//! Hamiltonian multivector fields and forms, Poisson forms and their bracket,
//! the universal multimomentum map and explicit Hamiltonian fields.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::One;

use crate::calculus::{exterior_derivative, lie_derivative, schouten_bracket};
use crate::chart::Chart;
use crate::error::{usage, Error, Result};
use crate::exterior::{Blade, Form, Multivector};
use crate::linalg::Reduction;
use crate::multiphase::{omega, require_extended, theta, volume_contracted};
use crate::vertical::flat_vertical_omega;
use crate::scalar::{factorial, parity, rational, Rational, Scalar};

/// `omega` on the extended chart, its flat vertical analogue on the ordinary one.
fn reference_omega(chart: Chart) -> Form {
    if chart.is_extended() {
        omega(chart).expect("extended chart")
    } else {
        flat_vertical_omega(chart)
    }
}

/// Particular solution of `i_X omega = target` for the constant reference form
/// of the chart, with no kernel component.
pub(crate) fn solve_contraction(chart: Chart, r: usize, target: &Form) -> Option<Multivector> {
    ContractionSystem::get(chart, r).solve(chart, r, target)
}

/// The constant linear map `xi -> i_xi omega` on degree-`r` basis blades.
struct ContractionSystem {
    columns: Vec<Blade>,
    rows: HashMap<Blade, usize>,
    reduction: Reduction,
    kernel: Vec<Multivector>,
}

fn all_blades(dim: usize, r: usize) -> Vec<Blade> {
    fn rec(start: usize, dim: usize, left: usize, acc: u64, out: &mut Vec<Blade>) {
        if left == 0 {
            out.push(Blade(acc));
            return;
        }
        for i in start..=dim - left {
            rec(i + 1, dim, left - 1, acc | 1 << i, out);
        }
    }
    let mut out = Vec::new();
    if r <= dim {
        rec(0, dim, r, 0, &mut out);
    }
    out
}

impl ContractionSystem {
    fn build(chart: Chart, r: usize) -> ContractionSystem {
        let om = reference_omega(chart);
        let vertical = |b: &Blade| b.indices().iter().filter(|&&i| chart.is_source_vertical(i)).count();
        let mut columns = all_blades(chart.dim(), r);
        columns.sort_by(|a, b| vertical(a).cmp(&vertical(b)).then(a.cmp(b)));
        let mut rows = HashMap::new();
        let entries: Vec<Vec<(usize, Rational)>> = columns
            .iter()
            .map(|&b| {
                let image = om.contract(&Multivector::from_terms(chart, r, [(b, Scalar::one(chart))]));
                image
                    .terms()
                    .iter()
                    .map(|(blade, c)| {
                        let next = rows.len();
                        let row = *rows.entry(*blade).or_insert(next);
                        (row, c.as_constant().expect("omega has constant coefficients"))
                    })
                    .collect()
            })
            .collect();
        let reduction = Reduction::new(rows.len(), &entries);
        let kernel = reduction
            .nullspace()
            .into_iter()
            .map(|v| {
                Multivector::from_terms(
                    chart,
                    r,
                    v.into_iter().map(|(j, c)| (columns[j], Scalar::constant(chart, c))),
                )
            })
            .collect();
        ContractionSystem { columns, rows, reduction, kernel }
    }

    fn get(chart: Chart, r: usize) -> Arc<ContractionSystem> {
        type Cache = Mutex<HashMap<(Chart, usize), Arc<ContractionSystem>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(s) = cache.lock().unwrap().get(&(chart, r)) {
            return s.clone();
        }
        let built = Arc::new(ContractionSystem::build(chart, r));
        cache.lock().unwrap().entry((chart, r)).or_insert(built).clone()
    }

    /// Particular solution of `i_X omega = target`, or `None`.
    fn solve(&self, chart: Chart, r: usize, target: &Form) -> Option<Multivector> {
        let zero = Scalar::zero(chart);
        let mut rhs = vec![zero.clone(); self.rows.len()];
        for (blade, c) in target.terms() {
            rhs[*self.rows.get(blade)?] = c.clone();
        }
        let x = self.reduction.solve(&rhs, &zero)?;
        Some(Multivector::from_terms(chart, r, self.columns.iter().copied().zip(x)))
    }
}

/// Basis of the constant kernel of `xi -> i_xi omega` in a fixed degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis {
    pub degree: usize,
    pub elements: Vec<Multivector>,
}

impl KernelBasis {
    /// Coefficients expressing `x` in the basis, with function coefficients.
    pub fn decompose(&self, x: &Multivector) -> Option<Vec<Scalar>> {
        let chart = x.chart();
        if x.is_zero() {
            return Some(vec![Scalar::zero(chart); self.elements.len()]);
        }
        if x.degree() != self.degree {
            return None;
        }
        let mut rows: HashMap<Blade, usize> = HashMap::new();
        let columns: Vec<Vec<(usize, Rational)>> = self
            .elements
            .iter()
            .map(|e| {
                e.terms()
                    .iter()
                    .map(|(b, c)| {
                        let next = rows.len();
                        (*rows.entry(*b).or_insert(next), c.as_constant().unwrap())
                    })
                    .collect()
            })
            .collect();
        let zero = Scalar::zero(chart);
        let mut rhs = vec![zero.clone(); rows.len()];
        for (b, c) in x.terms() {
            rhs[*rows.get(b)?] = c.clone();
        }
        Reduction::new(rows.len(), &columns).solve(&rhs, &zero)
    }

    pub fn contains(&self, x: &Multivector) -> bool {
        self.decompose(x).is_some()
    }
}

pub fn kernel_basis(chart: Chart, r: usize) -> Result<KernelBasis> {
    require_extended(chart)?;
    if r == 0 || r > chart.dim() {
        return usage(format!("kernel degree must lie in 1..={}", chart.dim()));
    }
    Ok(KernelBasis { degree: r, elements: ContractionSystem::get(chart, r).kernel.clone() })
}

/// `d(i_X omega) = 0`.
pub fn is_locally_hamiltonian(x: &Multivector) -> Result<bool> {
    require_extended(x.chart())?;
    Ok(exterior_derivative(&omega(x.chart())?.contract(x)).is_zero())
}

/// `L_X theta = 0`.
pub fn is_exact_hamiltonian(x: &Multivector) -> Result<bool> {
    require_extended(x.chart())?;
    Ok(lie_derivative(&theta(x.chart())?, x)?.is_zero())
}

/// A form `f` of degree `n - r` with a multivector field `X` of degree `r`
/// such that `i_X omega = df`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HamiltonianPair {
    form: Form,
    field: Multivector,
}

impl HamiltonianPair {
    pub fn new(form: Form, field: Multivector) -> Result<HamiltonianPair> {
        let chart = form.chart();
        require_extended(chart)?;
        if field.chart() != chart {
            return Err(Error::ChartMismatch(field.chart().to_string(), chart.to_string()));
        }
        if form.degree() > chart.n() {
            return Err(Error::NotHamiltonian(format!("degree {} exceeds n = {}", form.degree(), chart.n())));
        }
        let r = chart.n() - form.degree();
        if !field.is_zero() && field.degree() != r {
            return Err(Error::DegreeMismatch(field.degree(), r));
        }
        let field = if field.is_zero() { Multivector::zero(chart, r) } else { field };
        if omega(chart)?.contract(&field) != exterior_derivative(&form) {
            return Err(Error::NotHamiltonian(format!("i_X omega differs from d({form})")));
        }
        Ok(HamiltonianPair { form, field })
    }

    /// Pair without the `i_X omega = df` check, for deliberately broken brackets.
    pub fn new_unchecked(form: Form, field: Multivector) -> HamiltonianPair {
        HamiltonianPair { form, field }
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn field(&self) -> &Multivector {
        &self.field
    }

    pub fn chart(&self) -> Chart {
        self.form.chart()
    }

    /// Degree of the field, `r = n - deg f`.
    pub fn r(&self) -> usize {
        self.chart().n() - self.form.degree()
    }

    /// Same form with another field; validated.
    pub fn with_field(&self, field: Multivector) -> Result<HamiltonianPair> {
        HamiltonianPair::new(self.form.clone(), field)
    }
}

/// Solve `i_X omega = df`; the particular solution has no kernel component
/// and prefers space-time directions.
pub fn solve_hamiltonian_field(f: &Form) -> Result<HamiltonianPair> {
    let chart = f.chart();
    require_extended(chart)?;
    if f.degree() > chart.n() {
        return Err(Error::NotHamiltonian(format!("degree {} exceeds n = {}", f.degree(), chart.n())));
    }
    let r = chart.n() - f.degree();
    let df = exterior_derivative(f);
    let x = ContractionSystem::get(chart, r)
        .solve(chart, r, &df)
        .ok_or_else(|| Error::NotHamiltonian(format!("i_X omega = d({f}) has no solution")))?;
    Ok(HamiltonianPair { form: f.clone(), field: x })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PoissonClass {
    Poisson,
    WeakPoisson,
    HamiltonianOnly,
    NotHamiltonian,
}

impl PoissonClass {
    pub fn admits_bracket(self) -> bool {
        matches!(self, PoissonClass::Poisson | PoissonClass::WeakPoisson)
    }
}

impl fmt::Display for PoissonClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoissonClass::Poisson => "poisson",
            PoissonClass::WeakPoisson => "weak_poisson",
            PoissonClass::HamiltonianOnly => "hamiltonian_only",
            PoissonClass::NotHamiltonian => "not_hamiltonian",
        })
    }
}

/// Kernel condition alone, for a form already known to be Hamiltonian.
pub fn kernel_class(f: &Form) -> Result<PoissonClass> {
    let chart = f.chart();
    require_extended(chart)?;
    let mut weak = false;
    for k in 1..=f.degree() {
        for xi in &ContractionSystem::get(chart, k).kernel {
            let c = f.contract(xi);
            if c.is_zero() {
                continue;
            }
            if !exterior_derivative(&c).is_zero() {
                return Ok(PoissonClass::HamiltonianOnly);
            }
            weak = true;
        }
    }
    Ok(if weak { PoissonClass::WeakPoisson } else { PoissonClass::Poisson })
}

pub fn is_poisson_form(f: &Form) -> Result<PoissonClass> {
    match solve_hamiltonian_field(f) {
        Ok(_) => kernel_class(f),
        Err(Error::NotHamiltonian(_)) => Ok(PoissonClass::NotHamiltonian),
        Err(e) => Err(e),
    }
}

fn check_same_chart(a: &HamiltonianPair, b: &HamiltonianPair) -> Result<Chart> {
    if a.chart() != b.chart() {
        return Err(Error::ChartMismatch(a.chart().to_string(), b.chart().to_string()));
    }
    Ok(a.chart())
}

fn bracket_degree(chart: Chart, r: usize, s: usize) -> Option<usize> {
    (chart.n() + 1).checked_sub(r + s)
}

fn with_degree(chart: Chart, degree: usize, f: Form) -> Form {
    Form::from_terms(chart, degree, f.terms().clone())
}

/// `(-1)^{r(s-1)} i_Y i_X omega + d((-1)^{(r-1)(s-1)} i_Y f - i_X g - (-1)^{(r-1)s} i_Y i_X theta)`
/// without checking the kernel condition on the inputs.
pub fn bracket_formula(a: &HamiltonianPair, b: &HamiltonianPair) -> Result<Form> {
    let chart = check_same_chart(a, b)?;
    let (r, s) = (a.r(), b.r());
    let Some(degree) = bracket_degree(chart, r, s) else {
        return Ok(Form::zero(chart, 0));
    };
    let (x, y) = (a.field(), b.field());
    let main = omega(chart)?.contract(x).contract(y).signed(r * (s + 1));
    let inner = a.form().contract(y).signed((r + 1) * (s + 1))
        - b.form().contract(x)
        - theta(chart)?.contract(x).contract(y).signed((r + 1) * s);
    let correction = if degree == 0 { Form::zero(chart, 0) } else { exterior_derivative(&inner) };
    Ok(with_degree(chart, degree, main + correction))
}

/// The bracket without its exact correction terms, `(-1)^{r(s-1)} i_Y i_X omega`.
pub fn uncorrected_bracket(a: &HamiltonianPair, b: &HamiltonianPair) -> Result<Form> {
    let chart = check_same_chart(a, b)?;
    let (r, s) = (a.r(), b.r());
    let Some(degree) = bracket_degree(chart, r, s) else {
        return Ok(Form::zero(chart, 0));
    };
    let main = omega(chart)?.contract(a.field()).contract(b.field()).signed(r * (s + 1));
    Ok(with_degree(chart, degree, main))
}

/// `-L_X g + (-1)^{(r-1)(s-1)} L_Y f - (-1)^{(r-1)s} L_{X^Y} theta`.
pub fn bracket_lie_form(a: &HamiltonianPair, b: &HamiltonianPair) -> Result<Form> {
    let chart = check_same_chart(a, b)?;
    let (r, s) = (a.r(), b.r());
    let Some(degree) = bracket_degree(chart, r, s) else {
        return Ok(Form::zero(chart, 0));
    };
    let (x, y) = (a.field(), b.field());
    let sign = |k: usize| parity(k);
    let ly_f = if s == 0 { Form::zero(chart, 0) } else { lie_derivative(a.form(), y)? };
    let lx_g = if r == 0 { Form::zero(chart, 0) } else { lie_derivative(b.form(), x)? };
    let lxy = lie_derivative(&theta(chart)?, &x.wedge(y))?;
    let total = -lx_g + ly_f.scale_rational(&sign((r + 1) * (s + 1)))
        - lxy.scale_rational(&sign((r + 1) * s));
    Ok(with_degree(chart, degree, total))
}

/// Poisson bracket of two (weak) Poisson forms with chosen Hamiltonian fields.
pub fn poisson_bracket(a: &HamiltonianPair, b: &HamiltonianPair) -> Result<Form> {
    for p in [a, b] {
        let class = kernel_class(p.form())?;
        if !class.admits_bracket() {
            return Err(Error::NotPoisson(format!("{} is {class}", p.form())));
        }
    }
    bracket_formula(a, b)
}

/// `{f, g}` together with its Hamiltonian field `[Y, X]`.
pub fn bracket_pair(a: &HamiltonianPair, b: &HamiltonianPair) -> Result<HamiltonianPair> {
    let chart = check_same_chart(a, b)?;
    let form = poisson_bracket(a, b)?;
    if bracket_degree(chart, a.r(), b.r()).is_none() {
        return HamiltonianPair::new(Form::zero(chart, 0), Multivector::zero(chart, chart.n()));
    }
    HamiltonianPair::new(form, bracketed_field(a, b)?)
}

/// Uncorrected bracket with the same field bookkeeping as [`bracket_pair`].
pub fn uncorrected_bracket_pair(a: &HamiltonianPair, b: &HamiltonianPair) -> Result<HamiltonianPair> {
    let chart = check_same_chart(a, b)?;
    let form = uncorrected_bracket(a, b)?;
    if bracket_degree(chart, a.r(), b.r()).is_none() {
        return Ok(HamiltonianPair::new_unchecked(Form::zero(chart, 0), Multivector::zero(chart, chart.n())));
    }
    Ok(HamiltonianPair::new_unchecked(form, bracketed_field(a, b)?))
}

fn bracketed_field(a: &HamiltonianPair, b: &HamiltonianPair) -> Result<Multivector> {
    if a.r() == 0 || b.r() == 0 {
        return usage("brackets with fields of degree 0 are not supported");
    }
    schouten_bracket(b.field(), a.field())
}

/// `J(X) = (-1)^{r-1} i_X theta` for an exact Hamiltonian field `X`.
pub fn momentum_map(x: &Multivector) -> Result<HamiltonianPair> {
    let chart = x.chart();
    require_extended(chart)?;
    let r = x.degree();
    if r == 0 || r > chart.n() {
        return usage(format!("momentum map needs a field of degree 1..={}", chart.n()));
    }
    if !is_exact_hamiltonian(x)? {
        return usage(format!("{x} is not exact Hamiltonian"));
    }
    let j = theta(chart)?.contract(x).signed(r - 1);
    HamiltonianPair::new(j, x.clone())
}

fn x_vector(chart: Chart, mu: usize) -> Multivector {
    Multivector::coordinate(chart, chart.x(mu))
}

/// Explicit Hamiltonian n-multivector field of a function.
pub fn hamiltonian_field_for_function(f: &Scalar) -> Result<Multivector> {
    let chart = f.chart();
    require_extended(chart)?;
    let n = chart.n();
    let inv_n = rational(1, n as i64);
    let energy = chart.energy().unwrap();
    let at = |idx: usize| Multivector::coordinate(chart, idx);
    let mut out = Multivector::zero(chart, n);
    for mu in 0..n {
        // the remaining directions in ascending order, with eps^{R mu} = (-1)^{n-1-mu}
        let rest = (0..n).filter(|&nu| nu != mu).fold(Multivector::scalar(Scalar::one(chart)), |acc, nu| {
            acc.wedge(&x_vector(chart, nu))
        });
        let eps = parity(n - 1 - mu);
        let head = at(energy).scale(&f.partial(chart.x(mu))?)
            - x_vector(chart, mu).scale(&f.partial(energy)?.scale(&inv_n));
        let mut tail = Multivector::zero(chart, 1);
        for i in 0..chart.fields() {
            tail = tail + at(chart.q(i)).scale(&f.partial(chart.p(i, mu))?)
                - at(chart.p(i, mu)).scale(&f.partial(chart.q(i))?.scale(&inv_n));
        }
        out = out + (tail - head).wedge(&rest).scale_rational(&eps);
    }
    Ok(out)
}

/// Vector fields `X_1..X_n` whose wedge solves `i_X omega = dh` for `h = -H - p`.
pub fn de_donder_weyl_field(hamiltonian: &Scalar) -> Result<Vec<Multivector>> {
    let chart = match hamiltonian.chart() {
        c if c.is_extended() => c,
        c => Chart::extended(c.n(), c.fields())?,
    };
    let h_ext = hamiltonian.transfer(chart)?;
    let energy = chart.energy().unwrap();
    if !h_ext.partial(energy)?.is_zero() {
        return usage("the Hamiltonian must not depend on the energy variable");
    }
    let p = Scalar::coordinate(chart, energy);
    let h = -(&h_ext + &p);
    let inv_n = rational(1, chart.n() as i64);
    // the other n - 1 factors each pair their q-component with this p-component
    let cross = rational(chart.n() as i64 - 1, chart.n() as i64);
    let at = |idx: usize| Multivector::coordinate(chart, idx);
    (0..chart.n())
        .map(|mu| {
            let mut x = -x_vector(chart, mu);
            let mut energy_coefficient = h.partial(chart.x(mu))?;
            for i in 0..chart.fields() {
                let dh_dp = h.partial(chart.p(i, mu))?;
                let dh_dq = h.partial(chart.q(i))?;
                x = x + at(chart.q(i)).scale(&dh_dp) - at(chart.p(i, mu)).scale(&dh_dq.scale(&inv_n));
                energy_coefficient = &energy_coefficient - &(&dh_dq * &dh_dp).scale(&cross);
            }
            Ok(x - at(energy).scale(&energy_coefficient))
        })
        .collect()
}

/// Wedge of a list of multivector fields, in order.
pub fn wedge_all(chart: Chart, fields: &[Multivector]) -> Multivector {
    fields.iter().fold(Multivector::scalar(Scalar::one(chart)), |acc, x| acc.wedge(x))
}

/// Canonical lift to extended multiphase space of the projectable vector field
/// `v^mu(x) @x^mu + v^i(x, q) @q^i`; it preserves `theta`.
pub fn canonical_lift(v_x: &[Scalar], v_q: &[Scalar]) -> Result<Multivector> {
    let chart = v_x.first().map(|s| s.chart()).ok_or_else(|| Error::Usage("empty vector field".into()))?;
    require_extended(chart)?;
    let (n, fields) = (chart.n(), chart.fields());
    if v_x.len() != n || v_q.len() != fields {
        return Err(Error::LengthMismatch { expected: n + fields, got: v_x.len() + v_q.len() });
    }
    let x_mask = |i: usize| i < n;
    let base_mask = |i: usize| i < n + fields;
    if !v_x.iter().all(|s| s.depends_only_on(x_mask)) || !v_q.iter().all(|s| s.depends_only_on(base_mask)) {
        return usage("the vector field must be projectable: v^mu(x), v^i(x, q)");
    }
    let at = |idx: usize| Multivector::coordinate(chart, idx);
    let p = |i: usize, mu: usize| Scalar::coordinate(chart, chart.p(i, mu));
    let energy = chart.energy().unwrap();
    let div = (0..n).try_fold(Scalar::zero(chart), |acc, nu| Ok::<_, Error>(&acc + &v_x[nu].partial(chart.x(nu))?))?;
    let mut out = Multivector::zero(chart, 1);
    for mu in 0..n {
        out = out + at(chart.x(mu)).scale(&v_x[mu]);
    }
    for i in 0..fields {
        out = out + at(chart.q(i)).scale(&v_q[i]);
    }
    let mut energy_coefficient = -(&Scalar::coordinate(chart, energy) * &div);
    for i in 0..fields {
        for mu in 0..n {
            let mut c = -(&p(i, mu) * &div);
            for nu in 0..n {
                c = &c + &(&p(i, nu) * &v_x[mu].partial(chart.x(nu))?);
            }
            for j in 0..fields {
                c = &c - &(&p(j, mu) * &v_q[j].partial(chart.q(i))?);
            }
            out = out + at(chart.p(i, mu)).scale(&c);
            energy_coefficient = &energy_coefficient - &(&p(i, mu) * &v_q[i].partial(chart.x(mu))?);
        }
    }
    Ok(out + at(energy).scale(&energy_coefficient))
}

/// Coefficient blocks of the general expansion of an r-multivector field,
/// keyed by 0-based index tuples. Entries must be totally antisymmetric in
/// space-time indices; missing entries are zero.
#[derive(Clone, Debug, Default)]
pub struct AnsatzCoefficients {
    /// `X^{mu1..mur}`
    pub horizontal: BTreeMap<Vec<usize>, Scalar>,
    /// `X^{i, mu2..mur}`
    pub field: BTreeMap<(usize, Vec<usize>), Scalar>,
    /// `X_i^{mu1..mur}`
    pub momentum: BTreeMap<(usize, Vec<usize>), Scalar>,
    /// `X_0^{mu2..mur}`
    pub energy: BTreeMap<Vec<usize>, Scalar>,
}

fn permutations_with_sign(tuple: &[usize]) -> Vec<(Vec<usize>, bool)> {
    if tuple.len() <= 1 {
        return vec![(tuple.to_vec(), false)];
    }
    let mut out = Vec::new();
    for k in 0..tuple.len() {
        let mut rest = tuple.to_vec();
        let head = rest.remove(k);
        for (mut p, odd) in permutations_with_sign(&rest) {
            p.insert(0, head);
            out.push((p, odd ^ (k % 2 == 1)));
        }
    }
    out
}

fn set_antisymmetric<K: Ord>(map: &mut BTreeMap<K, Scalar>, key: impl Fn(Vec<usize>) -> K, tuple: &[usize], value: Scalar) {
    for (p, odd) in permutations_with_sign(tuple) {
        map.insert(key(p), if odd { -value.clone() } else { value.clone() });
    }
}

fn check_antisymmetric<K: Ord>(map: &BTreeMap<K, Scalar>, split: impl Fn(&K) -> Vec<usize>, key: impl Fn(&K, Vec<usize>) -> K) -> Result<()> {
    for (k, v) in map {
        let tuple = split(k);
        let mut seen = tuple.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != tuple.len() && !v.is_zero() {
            return usage("coefficients with a repeated space-time index must vanish");
        }
        for (p, odd) in permutations_with_sign(&tuple) {
            let other = map.get(&key(k, p)).cloned().unwrap_or_else(|| Scalar::zero(v.chart()));
            let expected = if odd { -v.clone() } else { v.clone() };
            if other != expected {
                return usage("coefficients are not totally antisymmetric");
            }
        }
    }
    Ok(())
}

impl AnsatzCoefficients {
    /// Set `X^{mu..}` and all its permutations.
    pub fn set_horizontal(&mut self, mus: &[usize], value: Scalar) {
        set_antisymmetric(&mut self.horizontal, |p| p, mus, value);
    }

    pub fn set_field(&mut self, i: usize, mus: &[usize], value: Scalar) {
        set_antisymmetric(&mut self.field, |p| (i, p), mus, value);
    }

    pub fn set_momentum(&mut self, i: usize, mus: &[usize], value: Scalar) {
        set_antisymmetric(&mut self.momentum, |p| (i, p), mus, value);
    }

    pub fn set_energy(&mut self, mus: &[usize], value: Scalar) {
        set_antisymmetric(&mut self.energy, |p| p, mus, value);
    }

    fn validate(&self, chart: Chart, r: usize) -> Result<()> {
        let n = chart.n();
        if r == 0 || r > n + 1 {
            return usage(format!("ansatz degree must lie in 1..={}", n + 1));
        }
        let ok = |t: &[usize], len: usize| t.len() == len && t.iter().all(|&mu| mu < n);
        let shapes = self.horizontal.keys().all(|t| ok(t, r))
            && self.field.keys().all(|(i, t)| *i < chart.fields() && ok(t, r - 1))
            && self.momentum.keys().all(|(i, t)| *i < chart.fields() && ok(t, r))
            && self.energy.keys().all(|t| ok(t, r - 1));
        if !shapes {
            return usage(format!("coefficient index out of range for r = {r}"));
        }
        check_antisymmetric(&self.horizontal, |k| k.clone(), |_, p| p)?;
        check_antisymmetric(&self.field, |k| k.1.clone(), |k, p| (k.0, p))?;
        check_antisymmetric(&self.momentum, |k| k.1.clone(), |k, p| (k.0, p))?;
        check_antisymmetric(&self.energy, |k| k.clone(), |_, p| p)
    }
}

fn x_wedge(chart: Chart, mus: &[usize]) -> Multivector {
    let idx: Vec<usize> = mus.iter().map(|&mu| chart.x(mu)).collect();
    Multivector::basis(chart, &idx).expect("x coordinates exist")
}

/// The multivector field of the general expansion, without its kernel part.
pub fn ansatz_multivector(chart: Chart, r: usize, c: &AnsatzCoefficients) -> Result<Multivector> {
    require_extended(chart)?;
    c.validate(chart, r)?;
    let inv_r = Rational::one() / factorial(r);
    let inv_r1 = Rational::one() / factorial(r - 1);
    let at = |idx: usize| Multivector::coordinate(chart, idx);
    let mut out = Multivector::zero(chart, r);
    for (mus, v) in &c.horizontal {
        out = out + x_wedge(chart, mus).scale(v).scale_rational(&inv_r);
    }
    for ((i, mus), v) in &c.field {
        out = out + at(chart.q(*i)).wedge(&x_wedge(chart, mus)).scale(v).scale_rational(&inv_r1);
    }
    for ((i, mus), v) in &c.momentum {
        out = out + at(chart.p(*i, mus[0])).wedge(&x_wedge(chart, &mus[1..])).scale(v).scale_rational(&inv_r);
    }
    for (mus, v) in &c.energy {
        out = out + at(chart.energy().unwrap()).wedge(&x_wedge(chart, mus)).scale(v).scale_rational(&inv_r1);
    }
    Ok(out)
}

fn prepend(mu: usize, mus: &[usize]) -> Vec<usize> {
    std::iter::once(mu).chain(mus.iter().copied()).collect()
}

/// `i_X omega` for the expansion, term by term from the coefficient blocks.
pub fn ansatz_contract_omega(chart: Chart, r: usize, c: &AnsatzCoefficients) -> Result<Form> {
    require_extended(chart)?;
    c.validate(chart, r)?;
    let n = chart.n();
    let d = |idx: usize| Form::coordinate(chart, idx);
    let inv_r = Rational::one() / factorial(r);
    let inv_r1 = Rational::one() / factorial(r - 1);
    let mut out = Form::zero(chart, n + 1 - r);
    for (mus, v) in &c.horizontal {
        if r < n {
            for i in 0..chart.fields() {
                for mu in 0..n {
                    let term = d(chart.q(i)).wedge(&d(chart.p(i, mu))).wedge(&volume_contracted(chart, &prepend(mu, mus)));
                    out = out + term.scale(v).scale_rational(&inv_r);
                }
            }
        }
        let term = d(chart.energy().unwrap()).wedge(&volume_contracted(chart, mus));
        out = out - term.scale(v).scale_rational(&(parity(r) * &inv_r));
    }
    for ((i, mus), v) in &c.field {
        for mu in 0..n {
            let term = d(chart.p(*i, mu)).wedge(&volume_contracted(chart, &prepend(mu, mus)));
            out = out + term.scale(v).scale_rational(&(parity(r - 1) * &inv_r1));
        }
    }
    for ((i, mus), v) in &c.momentum {
        let term = d(chart.q(*i)).wedge(&volume_contracted(chart, mus));
        out = out + term.scale(v).scale_rational(&(parity(r) * &inv_r));
    }
    for (mus, v) in &c.energy {
        out = out - volume_contracted(chart, mus).scale(v).scale_rational(&inv_r1);
    }
    Ok(out)
}

/// `i_X theta` for the expansion, term by term from the coefficient blocks.
pub fn ansatz_contract_theta(chart: Chart, r: usize, c: &AnsatzCoefficients) -> Result<Form> {
    require_extended(chart)?;
    c.validate(chart, r)?;
    let n = chart.n();
    if r > n {
        return Ok(Form::zero(chart, 0));
    }
    let d = |idx: usize| Form::coordinate(chart, idx);
    let p = |i: usize, mu: usize| Scalar::coordinate(chart, chart.p(i, mu));
    let energy = Scalar::coordinate(chart, chart.energy().unwrap());
    let inv_r = Rational::one() / factorial(r);
    let inv_r1 = Rational::one() / factorial(r - 1);
    let mut out = Form::zero(chart, n - r);
    for (mus, v) in &c.horizontal {
        if r < n {
            for i in 0..chart.fields() {
                for mu in 0..n {
                    let term = d(chart.q(i)).wedge(&volume_contracted(chart, &prepend(mu, mus)));
                    out = out + term.scale(&(v * &p(i, mu))).scale_rational(&(parity(r) * &inv_r));
                }
            }
        }
        out = out + volume_contracted(chart, mus).scale(&(v * &energy)).scale_rational(&inv_r);
    }
    for ((i, mus), v) in &c.field {
        for mu in 0..n {
            let term = volume_contracted(chart, &prepend(mu, mus));
            out = out + term.scale(&(v * &p(*i, mu))).scale_rational(&inv_r1);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiphase::sigma;
    use crate::scalar::integer;

    fn c21() -> Chart {
        Chart::extended(2, 1).unwrap()
    }

    fn var(chart: Chart, name: &str) -> Scalar {
        Scalar::coordinate(chart, chart.lookup(name).unwrap())
    }

    fn at(chart: Chart, name: &str) -> Multivector {
        Multivector::coordinate(chart, chart.lookup(name).unwrap())
    }

    fn d(chart: Chart, name: &str) -> Form {
        Form::coordinate(chart, chart.lookup(name).unwrap())
    }

    fn func(s: Scalar) -> Form {
        Form::scalar(s)
    }

    #[test]
    fn kernel_in_low_degrees() {
        let ch = c21();
        assert!(kernel_basis(ch, 1).unwrap().elements.is_empty());
        let k2 = kernel_basis(ch, 2).unwrap();
        assert!(k2.elements.contains(&at(ch, "q").wedge(&at(ch, "p"))));
        assert!(k2.elements.contains(&at(ch, "p1_1").wedge(&at(ch, "p1_2"))));
        let (om, th) = (omega(ch).unwrap(), theta(ch).unwrap());
        for r in 1..=ch.dim() {
            for xi in kernel_basis(ch, r).unwrap().elements {
                assert!(om.contract(&xi).is_zero());
                assert!(th.contract(&xi).is_zero());
            }
        }
    }

    #[test]
    fn kernel_is_complete() {
        // dimension of the kernel plus rank of the map equals the number of blades
        let ch = c21();
        for r in 1..=4 {
            let sys = ContractionSystem::get(ch, r);
            assert_eq!(sys.kernel.len() + sys.reduction.rank(), all_blades(ch.dim(), r).len());
        }
    }

    #[test]
    fn locally_and_exactly_hamiltonian() {
        let ch = c21();
        assert!(is_locally_hamiltonian(&at(ch, "x1")).unwrap());
        assert!(!is_locally_hamiltonian(&at(ch, "p").scale(&var(ch, "q"))).unwrap());
        let xi = at(ch, "q").wedge(&at(ch, "p")).scale(&(&var(ch, "x1") * &var(ch, "p1_2")));
        assert!(is_locally_hamiltonian(&xi).unwrap());
        assert!(is_exact_hamiltonian(&at(ch, "x1")).unwrap());
        assert!(!is_exact_hamiltonian(&sigma(ch).unwrap()).unwrap());
        let lift = at(ch, "q").scale(&var(ch, "q"))
            - at(ch, "p1_1").scale(&var(ch, "p1_1"))
            - at(ch, "p1_2").scale(&var(ch, "p1_2"));
        assert!(is_exact_hamiltonian(&lift).unwrap());
    }

    #[test]
    fn solver_examples() {
        let ch = c21();
        let om = omega(ch).unwrap();
        let k2 = kernel_basis(ch, 2).unwrap();
        let pair = solve_hamiltonian_field(&func(var(ch, "q"))).unwrap();
        assert_eq!(om.contract(pair.field()), d(ch, "q"));
        let half = rational(1, 2);
        let expected = (at(ch, "p1_1").wedge(&at(ch, "x2")) - at(ch, "p1_2").wedge(&at(ch, "x1"))).scale_rational(&half);
        assert!(k2.contains(&(pair.field() - &expected)));
        let pair = solve_hamiltonian_field(&func(var(ch, "p"))).unwrap();
        assert!(k2.contains(&(pair.field() + &at(ch, "x1").wedge(&at(ch, "x2")))));
        let c31 = Chart::extended(3, 1).unwrap();
        let closed = d(c31, "x1").wedge(&d(c31, "x2"));
        assert!(solve_hamiltonian_field(&closed).unwrap().field().is_zero());
        // theta is an n-form, its field is the function -1
        let pair = solve_hamiltonian_field(&theta(ch).unwrap()).unwrap();
        assert_eq!(pair.field().as_scalar().unwrap().as_constant(), Some(integer(-1)));
    }

    #[test]
    fn poisson_classification() {
        let ch = c21();
        assert_eq!(is_poisson_form(&theta(ch).unwrap()).unwrap(), PoissonClass::Poisson);
        let f = &var(ch, "q") * &var(ch, "p1_1");
        assert_eq!(is_poisson_form(&func(f)).unwrap(), PoissonClass::Poisson);
        let bad = d(ch, "p1_2").wedge(&d(ch, "x1")).scale(&var(ch, "p1_1"));
        assert_eq!(is_poisson_form(&bad).unwrap(), PoissonClass::NotHamiltonian);
        // closed 2-forms with X = 0; the kernel element @q^@p sees them
        let dqdp = d(ch, "q").wedge(&d(ch, "p"));
        assert_eq!(is_poisson_form(&dqdp).unwrap(), PoissonClass::WeakPoisson);
        assert_eq!(is_poisson_form(&dqdp.scale(&var(ch, "q"))).unwrap(), PoissonClass::HamiltonianOnly);
    }

    #[test]
    fn bracket_of_functions_underflows() {
        let ch = c21();
        let f = solve_hamiltonian_field(&func(var(ch, "q"))).unwrap();
        let g = solve_hamiltonian_field(&func(var(ch, "p1_1"))).unwrap();
        assert!(poisson_bracket(&f, &g).unwrap().is_zero());
    }

    #[test]
    fn momentum_maps() {
        let ch = c21();
        let j = momentum_map(&at(ch, "x1")).unwrap();
        assert_eq!(
            j.form(),
            &(d(ch, "q").scale(&var(ch, "p1_2")) + d(ch, "x2").scale(&var(ch, "p")))
        );
        let jq = momentum_map(&at(ch, "q")).unwrap();
        assert_eq!(jq.form(), &(d(ch, "x2").scale(&var(ch, "p1_1")) - d(ch, "x1").scale(&var(ch, "p1_2"))));
        assert_eq!(kernel_class(j.form()).unwrap(), PoissonClass::Poisson);
        let jx2 = momentum_map(&at(ch, "x2")).unwrap();
        assert!(poisson_bracket(&j, &jx2).unwrap().is_zero());
        assert!(momentum_map(&sigma(ch).unwrap()).is_err());
    }

    #[test]
    fn momentum_map_bracket_with_lift() {
        let ch = c21();
        let lift = canonical_lift(&[Scalar::zero(ch), Scalar::zero(ch)], &[var(ch, "q")]).unwrap();
        let expected_lift = at(ch, "q").scale(&var(ch, "q"))
            - at(ch, "p1_1").scale(&var(ch, "p1_1"))
            - at(ch, "p1_2").scale(&var(ch, "p1_2"));
        assert_eq!(lift, expected_lift);
        let jq = momentum_map(&at(ch, "q")).unwrap();
        let jv = momentum_map(&lift).unwrap();
        let bracket = poisson_bracket(&jq, &jv).unwrap();
        assert_eq!(bracket, -jq.form());
        assert_eq!(bracket, d(ch, "x1").scale(&var(ch, "p1_2")) - d(ch, "x2").scale(&var(ch, "p1_1")));
    }

    #[test]
    fn bracket_variants_agree() {
        let ch = c21();
        let jq = momentum_map(&at(ch, "q")).unwrap();
        let f = solve_hamiltonian_field(&func(&var(ch, "q") * &var(ch, "p1_2"))).unwrap();
        for (a, b) in [(&jq, &f), (&f, &jq), (&jq, &jq)] {
            assert_eq!(bracket_formula(a, b).unwrap(), bracket_lie_form(a, b).unwrap());
        }
    }

    #[test]
    fn closed_forms_form_an_ideal() {
        let ch = c21();
        let jq = momentum_map(&at(ch, "q")).unwrap();
        let three = Scalar::constant(ch, integer(3));
        let g = HamiltonianPair::new(d(ch, "x1").scale(&three), Multivector::zero(ch, 1)).unwrap();
        let expected = -exterior_derivative(&g.form().contract(jq.field()));
        assert_eq!(poisson_bracket(&jq, &g).unwrap(), expected);
    }

    #[test]
    fn explicit_function_fields() {
        let ch = c21();
        let half = rational(1, 2);
        assert_eq!(
            hamiltonian_field_for_function(&var(ch, "q")).unwrap(),
            (at(ch, "p1_1").wedge(&at(ch, "x2")) - at(ch, "p1_2").wedge(&at(ch, "x1"))).scale_rational(&half)
        );
        assert_eq!(hamiltonian_field_for_function(&var(ch, "p")).unwrap(), -at(ch, "x1").wedge(&at(ch, "x2")));
        assert!(hamiltonian_field_for_function(&Scalar::constant(ch, integer(7))).unwrap().is_zero());
        for (n, fields) in [(1, 1), (2, 2), (3, 1), (3, 2)] {
            let ch = Chart::extended(n, fields).unwrap();
            let om = omega(ch).unwrap();
            let f = (0..ch.dim()).fold(Scalar::zero(ch), |acc, a| {
                let c = Scalar::coordinate(ch, a);
                &acc + &(&c * &Scalar::coordinate(ch, (a * 5 + 3) % ch.dim())).scale(&integer(a as i64 + 1))
            });
            let x = hamiltonian_field_for_function(&f).unwrap();
            assert_eq!(om.contract(&x), exterior_derivative(&func(f)));
        }
    }

    #[test]
    fn de_donder_weyl_examples() {
        let ch = c21();
        let xs = de_donder_weyl_field(&Scalar::zero(ch)).unwrap();
        assert_eq!(xs, vec![-at(ch, "x1"), -at(ch, "x2")]);
        let h = (&var(ch, "p1_1").pow(2) + &var(ch, "p1_2").pow(2)).scale(&rational(1, 2));
        let xs = de_donder_weyl_field(&h).unwrap();
        // with h = -H - p the q-components are dh/dp_1^mu = -p_1^mu
        assert_eq!(xs[0], -at(ch, "x1") - at(ch, "q").scale(&var(ch, "p1_1")));
        assert_eq!(xs[1], -at(ch, "x2") - at(ch, "q").scale(&var(ch, "p1_2")));
        let om = omega(ch).unwrap();
        let dh = exterior_derivative(&func(-(&h + &var(ch, "p"))));
        assert_eq!(om.contract(&wedge_all(ch, &xs)), dh);
        let c11 = Chart::extended(1, 1).unwrap();
        let h = var(c11, "q").pow(2).scale(&rational(1, 2));
        let xs = de_donder_weyl_field(&h).unwrap();
        let dh = exterior_derivative(&func(-(&h + &var(c11, "p"))));
        assert_eq!(omega(c11).unwrap().contract(&xs[0]), dh);
        for (n, name) in [(1, "p1_1"), (3, "p1_3"), (4, "p1_2")] {
            let c = Chart::extended(n, 1).unwrap();
            let h = &var(c, "q") * &var(c, name);
            let xs = de_donder_weyl_field(&h).unwrap();
            let dh = exterior_derivative(&func(-(&h + &var(c, "p"))));
            assert_eq!(omega(c).unwrap().contract(&wedge_all(c, &xs)), dh, "n = {n}");
        }
        assert!(de_donder_weyl_field(&var(ch, "p")).is_err());
    }

    #[test]
    fn ansatz_examples() {
        let ch = c21();
        let mut c = AnsatzCoefficients::default();
        c.set_momentum(0, &[0, 1], Scalar::one(ch));
        let x = ansatz_multivector(ch, 2, &c).unwrap();
        let half = rational(1, 2);
        assert_eq!(x, (at(ch, "p1_1").wedge(&at(ch, "x2")) - at(ch, "p1_2").wedge(&at(ch, "x1"))).scale_rational(&half));
        assert_eq!(omega(ch).unwrap().contract(&x), d(ch, "q"));
        assert!(ansatz_multivector(ch, 2, &AnsatzCoefficients::default()).unwrap().is_zero());
        let mut c = AnsatzCoefficients::default();
        c.set_energy(&[0], Scalar::one(ch));
        let x = ansatz_multivector(ch, 2, &c).unwrap();
        assert_eq!(x, at(ch, "p").wedge(&at(ch, "x1")));
        assert_eq!(omega(ch).unwrap().contract(&x), -d(ch, "x2"));
        let mut bad = AnsatzCoefficients::default();
        bad.horizontal.insert(vec![0, 1], Scalar::one(ch));
        assert!(ansatz_multivector(ch, 2, &bad).is_err());
    }

    #[test]
    fn ansatz_contractions_match_generic_contraction() {
        for (n, fields) in [(1, 1), (2, 1), (2, 2), (3, 1)] {
            let ch = Chart::extended(n, fields).unwrap();
            let (om, th) = (omega(ch).unwrap(), theta(ch).unwrap());
            for r in 1..=n + 1 {
                let mut c = AnsatzCoefficients::default();
                let coef = |k: usize| &Scalar::coordinate(ch, k % ch.dim()) + &Scalar::constant(ch, integer(k as i64));
                let mut k = 0;
                for tuple in all_blades(n, r) {
                    k += 1;
                    c.set_horizontal(&tuple.indices(), coef(k));
                }
                for tuple in all_blades(n, r - 1) {
                    for i in 0..fields {
                        k += 1;
                        c.set_field(i, &tuple.indices(), coef(k));
                    }
                    k += 1;
                    c.set_energy(&tuple.indices(), coef(k));
                }
                for tuple in all_blades(n, r) {
                    for i in 0..fields {
                        k += 1;
                        c.set_momentum(i, &tuple.indices(), coef(k));
                    }
                }
                let x = ansatz_multivector(ch, r, &c).unwrap();
                assert_eq!(om.contract(&x), ansatz_contract_omega(ch, r, &c).unwrap(), "omega n={n} r={r}");
                assert_eq!(th.contract(&x), ansatz_contract_theta(ch, r, &c).unwrap(), "theta n={n} r={r}");
            }
        }
    }
}
