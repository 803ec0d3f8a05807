//! Adapted coordinate systems.
//!
//! Every chart orders its coordinates as `x^1..x^n`, `q^1..q^N`, then the
//! fiber block of the bundle it describes. For multiphase space the fiber
//! block is `p_1^1, p_1^2, .., p_1^n, p_2^1, .., p_N^n` (field index major)
//! followed by the energy variable `p` on the extended space.

use std::fmt;

use crate::error::{Error, Result};

/// Largest coordinate count a chart may have; blades are stored as `u64` masks.
pub const MAX_COORDINATES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChartKind {
    /// Extended multiphase space `(x, q, p_i^mu, p)`.
    Extended,
    /// Ordinary multiphase space `(x, q, p_i^mu)`.
    Ordinary,
    /// The configuration bundle `E` itself, `(x, q)`.
    Base,
    /// Vertical bundle `VE`, fiber `qdot^k`.
    Vertical,
    /// Dual vertical bundle `V*E`, fiber `p_k`.
    VerticalDual,
    /// `pi*TM`, fiber `xdot^kappa`.
    Tangent,
    /// `pi*T*M`, fiber `a_kappa`.
    Cotangent,
    /// `pi*(Lambda^n T*M)`, fiber `eps`.
    Volume,
    /// Linearized jet bundle, fiber `qbar^k_kappa`.
    LinearJet,
    /// First jet bundle `JE`, fiber `q^k_kappa`.
    Jet,
}

/// A single coordinate, with 0-based indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coordinate {
    X(usize),
    Q(usize),
    /// `p_i^mu` as `P(i, mu)`.
    P(usize, usize),
    Energy,
    Velocity(usize),
    Dual(usize),
    XVelocity(usize),
    Covector(usize),
    Density,
    LinearJet(usize, usize),
    Jet(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chart {
    n: usize,
    fields: usize,
    kind: ChartKind,
}

impl Chart {
    pub fn new(kind: ChartKind, n: usize, fields: usize) -> Result<Chart> {
        if n == 0 || fields == 0 {
            return Err(Error::InvalidChart(format!(
                "need n >= 1 and N >= 1, got n={n} N={fields}"
            )));
        }
        let chart = Chart { n, fields, kind };
        if chart.dim() > MAX_COORDINATES {
            return Err(Error::InvalidChart(format!(
                "{} coordinates exceed the limit of {MAX_COORDINATES}",
                chart.dim()
            )));
        }
        Ok(chart)
    }

    pub fn extended(n: usize, fields: usize) -> Result<Chart> {
        Chart::new(ChartKind::Extended, n, fields)
    }

    pub fn ordinary(n: usize, fields: usize) -> Result<Chart> {
        Chart::new(ChartKind::Ordinary, n, fields)
    }

    pub fn base(n: usize, fields: usize) -> Result<Chart> {
        Chart::new(ChartKind::Base, n, fields)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fields(&self) -> usize {
        self.fields
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn is_extended(&self) -> bool {
        self.kind == ChartKind::Extended
    }

    pub fn with_kind(&self, kind: ChartKind) -> Chart {
        Chart { kind, ..*self }
    }

    fn fiber_len(&self) -> usize {
        let (n, f) = (self.n, self.fields);
        match self.kind {
            ChartKind::Extended => f * n + 1,
            ChartKind::Ordinary => f * n,
            ChartKind::Base => 0,
            ChartKind::Vertical | ChartKind::VerticalDual => f,
            ChartKind::Tangent | ChartKind::Cotangent => n,
            ChartKind::Volume => 1,
            ChartKind::LinearJet | ChartKind::Jet => f * n,
        }
    }

    pub fn dim(&self) -> usize {
        self.n + self.fields + self.fiber_len()
    }

    pub fn x(&self, mu: usize) -> usize {
        assert!(mu < self.n, "x index {mu} out of range");
        mu
    }

    pub fn q(&self, i: usize) -> usize {
        assert!(i < self.fields, "q index {i} out of range");
        self.n + i
    }

    /// Index of `p_i^mu` (or of the jet-type fiber coordinate with the same shape).
    pub fn p(&self, i: usize, mu: usize) -> usize {
        assert!(i < self.fields && mu < self.n, "momentum index out of range");
        self.n + self.fields + i * self.n + mu
    }

    /// Index of the energy coordinate `p`, present on the extended chart only.
    pub fn energy(&self) -> Option<usize> {
        self.is_extended().then(|| self.dim() - 1)
    }

    /// Index of the `k`-th fiber coordinate.
    pub fn fiber(&self, k: usize) -> usize {
        assert!(k < self.fiber_len(), "fiber index out of range");
        self.n + self.fields + k
    }

    pub fn x_mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    pub fn q_mask(&self) -> u64 {
        ((1u64 << self.fields) - 1) << self.n
    }

    pub fn coordinate(&self, idx: usize) -> Coordinate {
        assert!(idx < self.dim(), "coordinate index {idx} out of range");
        let (n, f) = (self.n, self.fields);
        if idx < n {
            return Coordinate::X(idx);
        }
        if idx < n + f {
            return Coordinate::Q(idx - n);
        }
        let k = idx - n - f;
        let pair = (k / n, k % n);
        match self.kind {
            ChartKind::Extended if k == f * n => Coordinate::Energy,
            ChartKind::Extended | ChartKind::Ordinary => Coordinate::P(pair.0, pair.1),
            ChartKind::Base => unreachable!(),
            ChartKind::Vertical => Coordinate::Velocity(k),
            ChartKind::VerticalDual => Coordinate::Dual(k),
            ChartKind::Tangent => Coordinate::XVelocity(k),
            ChartKind::Cotangent => Coordinate::Covector(k),
            ChartKind::Volume => Coordinate::Density,
            ChartKind::LinearJet => Coordinate::LinearJet(pair.0, pair.1),
            ChartKind::Jet => Coordinate::Jet(pair.0, pair.1),
        }
    }

    pub fn index_of(&self, c: Coordinate) -> Option<usize> {
        (0..self.dim()).find(|&i| self.coordinate(i) == c)
    }

    pub fn coordinates(&self) -> impl Iterator<Item = Coordinate> + '_ {
        (0..self.dim()).map(|i| self.coordinate(i))
    }

    /// Canonical textual name of a coordinate, 1-based as in the DSL.
    pub fn name(&self, idx: usize) -> String {
        let single = self.fields == 1;
        match self.coordinate(idx) {
            Coordinate::X(m) => format!("x{}", m + 1),
            Coordinate::Q(_) if single => "q".to_string(),
            Coordinate::Q(i) => format!("q{}", i + 1),
            Coordinate::P(i, m) => format!("p{}_{}", i + 1, m + 1),
            Coordinate::Energy => "p".to_string(),
            Coordinate::Velocity(k) => format!("qdot{}", k + 1),
            Coordinate::Dual(k) => format!("pv{}", k + 1),
            Coordinate::XVelocity(k) => format!("xdot{}", k + 1),
            Coordinate::Covector(k) => format!("a{}", k + 1),
            Coordinate::Density => "eps".to_string(),
            Coordinate::LinearJet(i, m) => format!("qbar{}_{}", i + 1, m + 1),
            Coordinate::Jet(i, m) => format!("q{}_{}", i + 1, m + 1),
        }
    }

    /// Inverse of [`Chart::name`]; also accepts `q1` when `N = 1`.
    pub fn lookup(&self, name: &str) -> Result<usize> {
        if let Some(i) = (0..self.dim()).find(|&i| self.name(i) == name) {
            return Ok(i);
        }
        if self.fields == 1 && name == "q1" {
            return Ok(self.q(0));
        }
        Err(Error::UnknownCoordinate(name.to_string()))
    }

    /// True for coordinates that are vertical with respect to the source projection onto `M`.
    pub fn is_source_vertical(&self, idx: usize) -> bool {
        idx >= self.n
    }

    /// True for coordinates that are vertical with respect to the target projection onto `E`.
    pub fn is_target_vertical(&self, idx: usize) -> bool {
        idx >= self.n + self.fields
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ChartKind::Extended => "extended",
            ChartKind::Ordinary => "ordinary",
            ChartKind::Base => "base",
            ChartKind::Vertical => "VE",
            ChartKind::VerticalDual => "VstarE",
            ChartKind::Tangent => "piTM",
            ChartKind::Cotangent => "piTstarM",
            ChartKind::Volume => "piVolM",
            ChartKind::LinearJet => "JvecE",
            ChartKind::Jet => "JE",
        };
        write!(f, "{kind} n={} N={}", self.n, self.fields)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_layout() {
        let c = Chart::extended(2, 1).unwrap();
        let names: Vec<_> = (0..c.dim()).map(|i| c.name(i)).collect();
        assert_eq!(names, ["x1", "x2", "q", "p1_1", "p1_2", "p"]);
        assert_eq!(c.energy(), Some(5));
        assert_eq!(c.lookup("q1").unwrap(), 2);
    }

    #[test]
    fn field_major_momenta() {
        let c = Chart::ordinary(2, 2).unwrap();
        assert_eq!(c.dim(), 8);
        assert_eq!(c.name(c.p(1, 0)), "p2_1");
        assert_eq!(c.p(0, 1) + 1, c.p(1, 0));
        assert_eq!(c.energy(), None);
    }

    #[test]
    fn dimensions() {
        for (n, f) in [(1, 1), (2, 1), (3, 2)] {
            assert_eq!(Chart::extended(n, f).unwrap().dim(), n + f + n * f + 1);
            assert_eq!(Chart::ordinary(n, f).unwrap().dim(), n + f + n * f);
        }
        assert!(Chart::extended(0, 1).is_err());
    }

    #[test]
    fn names_round_trip() {
        for kind in [ChartKind::Extended, ChartKind::Jet, ChartKind::Volume] {
            let c = Chart::new(kind, 2, 2).unwrap();
            for i in 0..c.dim() {
                assert_eq!(c.lookup(&c.name(i)).unwrap(), i);
            }
        }
    }
}
