//! Connections induced on derived bundles by a connection in `E` and a
//! torsion-free linear connection in `TM`.

use std::fmt;
use std::str::FromStr;

use crate::chart::{Chart, ChartKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `Gamma^i_mu(x, q)` and `Gamma^kappa_{mu lambda}(x)` over the base chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionData {
    base: Chart,
    /// `gamma_e[i][mu]`
    gamma_e: Vec<Vec<Scalar>>,
    /// `gamma_tm[kappa][mu][lambda]`
    gamma_tm: Vec<Vec<Vec<Scalar>>>,
}

impl ConnectionData {
    pub fn new(base: Chart, gamma_e: Vec<Vec<Scalar>>, gamma_tm: Vec<Vec<Vec<Scalar>>>) -> Result<ConnectionData> {
        if base.kind() != ChartKind::Base {
            return Err(Error::InvalidConnection(format!("expected a base chart, got {base}")));
        }
        let (n, fields) = (base.n(), base.fields());
        let shape_e = gamma_e.len() == fields && gamma_e.iter().all(|row| row.len() == n);
        let shape_tm = gamma_tm.len() == n && gamma_tm.iter().all(|m| m.len() == n && m.iter().all(|r| r.len() == n));
        if !shape_e || !shape_tm {
            return Err(Error::InvalidConnection("coefficient arrays have the wrong shape".into()));
        }
        for s in gamma_e.iter().flatten().chain(gamma_tm.iter().flatten().flatten()) {
            if s.chart() != base {
                return Err(Error::InvalidConnection(format!("{s} is not over {base}")));
            }
        }
        for (kappa, m) in gamma_tm.iter().enumerate() {
            for mu in 0..n {
                for lambda in 0..n {
                    if !m[mu][lambda].depends_only_on(|i| i < n) {
                        return Err(Error::InvalidConnection(format!(
                            "Gamma^{}_{{{}{}}} depends on field coordinates",
                            kappa + 1,
                            mu + 1,
                            lambda + 1
                        )));
                    }
                    if m[mu][lambda] != m[lambda][mu] {
                        return Err(Error::InvalidConnection(format!(
                            "Gamma^{}_{{{}{}}} is not symmetric",
                            kappa + 1,
                            mu + 1,
                            lambda + 1
                        )));
                    }
                }
            }
        }
        Ok(ConnectionData { base, gamma_e, gamma_tm })
    }

    pub fn zero(base: Chart) -> Result<ConnectionData> {
        let (n, fields) = (base.n(), base.fields());
        let z = Scalar::zero(base);
        ConnectionData::new(base, vec![vec![z.clone(); n]; fields], vec![vec![vec![z; n]; n]; n])
    }

    pub fn base(&self) -> Chart {
        self.base
    }

    pub fn gamma_e(&self, i: usize, mu: usize) -> &Scalar {
        &self.gamma_e[i][mu]
    }

    pub fn gamma_tm(&self, kappa: usize, mu: usize, lambda: usize) -> &Scalar {
        &self.gamma_tm[kappa][mu][lambda]
    }

    /// `Gamma^rho_{mu rho}`.
    pub fn trace(&self, mu: usize) -> Scalar {
        (0..self.base.n()).fold(Scalar::zero(self.base), |acc, rho| &acc + &self.gamma_tm[rho][mu][rho])
    }

    /// All coefficient data read on another chart with the same `(n, N)`.
    pub fn on(&self, chart: Chart) -> Result<ConnectionOn> {
        let t = |s: &Scalar| s.transfer(chart);
        Ok(ConnectionOn {
            chart,
            gamma_e: self.gamma_e.iter().map(|r| r.iter().map(t).collect()).collect::<Result<_>>()?,
            gamma_tm: self
                .gamma_tm
                .iter()
                .map(|m| m.iter().map(|r| r.iter().map(t).collect()).collect())
                .collect::<Result<_>>()?,
        })
    }
}

/// Connection coefficients transferred to a fiber chart, with derivatives.
#[derive(Clone, Debug)]
pub struct ConnectionOn {
    chart: Chart,
    gamma_e: Vec<Vec<Scalar>>,
    gamma_tm: Vec<Vec<Vec<Scalar>>>,
}

impl ConnectionOn {
    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn gamma_e(&self, i: usize, mu: usize) -> &Scalar {
        &self.gamma_e[i][mu]
    }

    pub fn gamma_tm(&self, kappa: usize, mu: usize, lambda: usize) -> &Scalar {
        &self.gamma_tm[kappa][mu][lambda]
    }

    pub fn trace(&self, mu: usize) -> Scalar {
        (0..self.chart.n()).fold(Scalar::zero(self.chart), |acc, rho| &acc + &self.gamma_tm[rho][mu][rho])
    }

    /// `d_l Gamma^k_mu`, the derivative along `q^l`.
    pub fn dq_gamma(&self, k: usize, mu: usize, l: usize) -> Scalar {
        self.gamma_e[k][mu].partial(self.chart.q(l)).expect("q coordinate exists")
    }

    /// `d_nu Gamma^k_mu`, the derivative along `x^nu`.
    pub fn dx_gamma(&self, k: usize, mu: usize, nu: usize) -> Scalar {
        self.gamma_e[k][mu].partial(self.chart.x(nu)).expect("x coordinate exists")
    }

    /// Coefficient of `dx^kappa` in `e_i^mu - dp_i^mu` on the ordinary multiphase chart.
    pub fn momentum_coefficient(&self, i: usize, mu: usize, kappa: usize) -> Scalar {
        let ch = self.chart;
        let p = |j: usize, nu: usize| Scalar::coordinate(ch, ch.p(j, nu));
        let mut c = -(&p(i, mu) * &self.trace(kappa));
        for l in 0..ch.fields() {
            c = &c - &(&self.dq_gamma(l, kappa, i) * &p(l, mu));
        }
        for lambda in 0..ch.n() {
            c = &c + &(self.gamma_tm(mu, kappa, lambda) * &p(i, lambda));
        }
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bundle {
    VE,
    VstarE,
    PiTM,
    PiTstarM,
    PiVolM,
    JvecE,
    JE,
    OrdinaryMultiphase,
    ExtendedMultiphase,
}

impl Bundle {
    pub const ALL: [Bundle; 9] = [
        Bundle::VE,
        Bundle::VstarE,
        Bundle::PiTM,
        Bundle::PiTstarM,
        Bundle::PiVolM,
        Bundle::JvecE,
        Bundle::JE,
        Bundle::OrdinaryMultiphase,
        Bundle::ExtendedMultiphase,
    ];

    pub fn chart_kind(self) -> ChartKind {
        match self {
            Bundle::VE => ChartKind::Vertical,
            Bundle::VstarE => ChartKind::VerticalDual,
            Bundle::PiTM => ChartKind::Tangent,
            Bundle::PiTstarM => ChartKind::Cotangent,
            Bundle::PiVolM => ChartKind::Volume,
            Bundle::JvecE => ChartKind::LinearJet,
            Bundle::JE => ChartKind::Jet,
            Bundle::OrdinaryMultiphase => ChartKind::Ordinary,
            Bundle::ExtendedMultiphase => ChartKind::Extended,
        }
    }

    /// Vector bundles have coefficients linear in the fiber coordinates.
    pub fn is_linear(self) -> bool {
        !matches!(self, Bundle::JE | Bundle::ExtendedMultiphase)
    }

    pub fn name(self) -> &'static str {
        match self {
            Bundle::VE => "VE",
            Bundle::VstarE => "VstarE",
            Bundle::PiTM => "piTM",
            Bundle::PiTstarM => "piTstarM",
            Bundle::PiVolM => "piVolM",
            Bundle::JvecE => "JvecE",
            Bundle::JE => "JE",
            Bundle::OrdinaryMultiphase => "ordinary",
            Bundle::ExtendedMultiphase => "extended",
        }
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Bundle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Bundle> {
        Bundle::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Usage(format!("unknown bundle `{s}`")))
    }
}

/// Jet-section components `(x, q, y) -> (.., Gamma^i_mu, C^a_mu)` of an induced
/// connection; `coefficients[mu][a]` belongs to the fiber coordinate `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedConnection {
    pub bundle: Bundle,
    pub chart: Chart,
    pub coefficients: Vec<Vec<Scalar>>,
}

impl InducedConnection {
    /// Coefficient for direction `mu` and fiber coordinate index `a` of the chart.
    pub fn coefficient(&self, mu: usize, fiber_coordinate: usize) -> &Scalar {
        let offset = self.chart.n() + self.chart.fields();
        &self.coefficients[mu][fiber_coordinate - offset]
    }
}

pub fn induce(conn: &ConnectionData, bundle: Bundle) -> Result<InducedConnection> {
    let base = conn.base();
    let (n, fields) = (base.n(), base.fields());
    let chart = Chart::new(bundle.chart_kind(), n, fields)?;
    let g = conn.on(chart)?;
    let y = |a: usize| Scalar::coordinate(chart, a);
    let mut coefficients = Vec::with_capacity(n);
    for mu in 0..n {
        let mut row = Vec::new();
        match bundle {
            Bundle::VE => {
                for k in 0..fields {
                    row.push((0..fields).fold(Scalar::zero(chart), |acc, l| &acc + &(&g.dq_gamma(k, mu, l) * &y(chart.fiber(l)))));
                }
            }
            Bundle::VstarE => {
                for k in 0..fields {
                    row.push((0..fields).fold(Scalar::zero(chart), |acc, l| &acc - &(&g.dq_gamma(l, mu, k) * &y(chart.fiber(l)))));
                }
            }
            Bundle::PiTM => {
                for kappa in 0..n {
                    row.push((0..n).fold(Scalar::zero(chart), |acc, l| &acc + &(g.gamma_tm(kappa, mu, l) * &y(chart.fiber(l)))));
                }
            }
            Bundle::PiTstarM => {
                for kappa in 0..n {
                    row.push((0..n).fold(Scalar::zero(chart), |acc, l| &acc - &(g.gamma_tm(l, mu, kappa) * &y(chart.fiber(l)))));
                }
            }
            Bundle::PiVolM => row.push(-(&g.trace(mu) * &y(chart.fiber(0)))),
            Bundle::JvecE | Bundle::JE => {
                let affine = bundle == Bundle::JE;
                // q^l_kappa, shifted by -Gamma^l_kappa on the affine jet bundle
                let shifted = |l: usize, kappa: usize| {
                    let v = y(chart.p(l, kappa));
                    if affine {
                        &v - g.gamma_e(l, kappa)
                    } else {
                        v
                    }
                };
                for k in 0..fields {
                    for kappa in 0..n {
                        let mut c = Scalar::zero(chart);
                        for l in 0..fields {
                            c = &c + &(&g.dq_gamma(k, mu, l) * &shifted(l, kappa));
                        }
                        for lambda in 0..n {
                            c = &c - &(g.gamma_tm(lambda, mu, kappa) * &shifted(k, lambda));
                        }
                        row.push(c);
                    }
                }
            }
            Bundle::OrdinaryMultiphase | Bundle::ExtendedMultiphase => {
                for k in 0..fields {
                    for kappa in 0..n {
                        row.push(g.momentum_coefficient(k, kappa, mu));
                    }
                }
                if let Some(e) = chart.energy() {
                    let mut c = -(&g.trace(mu) * &y(e));
                    for j in 0..fields {
                        for nu in 0..n {
                            let mut t = g.dx_gamma(j, nu, mu);
                            for k in 0..fields {
                                t = &t - &(g.gamma_e(k, nu) * &g.dq_gamma(j, mu, k));
                            }
                            for kappa in 0..n {
                                t = &t - &(g.gamma_tm(kappa, mu, nu) * g.gamma_e(j, kappa));
                            }
                            c = &c - &(&t * &y(chart.p(j, nu)));
                        }
                    }
                    row.push(c);
                }
            }
        }
        coefficients.push(row);
    }
    Ok(InducedConnection { bundle, chart, coefficients })
}

/// Consistency between the induced connections on mutually dual bundles.
pub fn duality_check(conn: &ConnectionData) -> Result<bool> {
    let get = |b| induce(conn, b);
    let (ve, vse, tm, tsm, vol) = (get(Bundle::VE)?, get(Bundle::VstarE)?, get(Bundle::PiTM)?, get(Bundle::PiTstarM)?, get(Bundle::PiVolM)?);
    let (ord, ext) = (get(Bundle::OrdinaryMultiphase)?, get(Bundle::ExtendedMultiphase)?);
    let base = conn.base();
    let (n, fields) = (base.n(), base.fields());
    // matrix of a linear coefficient: d C_a / d y_b
    let matrix = |ic: &InducedConnection, mu: usize, a: usize, b: usize| -> Result<Scalar> {
        ic.coefficients[mu][a].partial(ic.chart.fiber(b))?.transfer(base)
    };
    for mu in 0..n {
        for a in 0..fields {
            for b in 0..fields {
                if matrix(&ve, mu, a, b)? != -matrix(&vse, mu, b, a)? {
                    return Ok(false);
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if matrix(&tm, mu, a, b)? != -matrix(&tsm, mu, b, a)? {
                    return Ok(false);
                }
            }
        }
        let trace = (0..n).try_fold(Scalar::zero(base), |acc, k| Ok::<_, Error>(&acc + &matrix(&tm, mu, k, k)?))?;
        if matrix(&vol, mu, 0, 0)? != -trace {
            return Ok(false);
        }
        for a in 0..fields * n {
            if ord.coefficients[mu][a].transfer(ext.chart)? != ext.coefficients[mu][a] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
