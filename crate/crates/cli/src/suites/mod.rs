//! Randomised identity suites with exact comparisons.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use msc_core::random::Sampler;
use msc_core::Chart;
use serde_json::{json, Value as Json};

pub mod calculus;
pub mod connections;
pub mod multiphase;
pub mod poisson;
pub mod schouten;
pub mod vertical;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Schouten,
    Calculus,
    Multiphase,
    Poisson,
    Vertical,
    Connections,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Schouten, Suite::Calculus, Suite::Multiphase, Suite::Poisson, Suite::Vertical, Suite::Connections];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Schouten => "schouten",
            Suite::Calculus => "calculus",
            Suite::Multiphase => "multiphase",
            Suite::Poisson => "poisson",
            Suite::Vertical => "vertical",
            Suite::Connections => "connections",
        }
    }

    pub fn identities(self) -> &'static [(&'static str, Identity)] {
        match self {
            Suite::Schouten => schouten::IDENTITIES,
            Suite::Calculus => calculus::IDENTITIES,
            Suite::Multiphase => multiphase::IDENTITIES,
            Suite::Poisson => poisson::IDENTITIES,
            Suite::Vertical => vertical::IDENTITIES,
            Suite::Connections => connections::IDENTITIES,
        }
    }

    /// Chart the suite works on for the given dimensions.
    pub fn chart(self, n: usize, fields: usize) -> msc_core::Result<Chart> {
        match self {
            Suite::Vertical => Chart::ordinary(n, fields),
            Suite::Connections => Chart::base(n, fields),
            _ => Chart::extended(n, fields),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Suite, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Parameters shared by every identity of a run.
#[derive(Clone, Copy, Debug)]
pub struct Context {
    pub n: usize,
    pub fields: usize,
    pub seed: u64,
    pub max_degree: usize,
}

impl Context {
    pub fn new(n: usize, fields: usize, seed: u64) -> Context {
        Context { n, fields, seed, max_degree: 3 }
    }

    pub fn extended(&self) -> Chart {
        Chart::extended(self.n, self.fields).expect("validated dimensions")
    }

    pub fn ordinary(&self) -> Chart {
        Chart::ordinary(self.n, self.fields).expect("validated dimensions")
    }

    pub fn base(&self) -> Chart {
        Chart::base(self.n, self.fields).expect("validated dimensions")
    }

    /// Independent random stream for a named identity.
    pub fn sampler(&self, name: &str) -> Sampler {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in name.bytes() {
            h = (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3);
        }
        Sampler::new(self.seed ^ h)
    }
}

pub type Identity = fn(&Context, usize) -> Outcome;

/// Result of one identity over its trials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub name: String,
    pub trials: usize,
    pub failure: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

pub type Trial = Result<(), String>;

/// Run `trials` independent checks; the first failure is kept as counterexample.
pub fn run(ctx: &Context, name: &str, trials: usize, mut check: impl FnMut(&mut Sampler, usize) -> Trial) -> Outcome {
    let mut sampler = ctx.sampler(name);
    for k in 0..trials {
        if let Err(message) = check(&mut sampler, k) {
            return Outcome { name: name.to_string(), trials, failure: Some(format!("trial {k}: {message}")) };
        }
    }
    Outcome { name: name.to_string(), trials, failure: None }
}

pub(crate) trait OrFail<T> {
    fn or_fail(self) -> Result<T, String>;
}

impl<T> OrFail<T> for msc_core::Result<T> {
    fn or_fail(self) -> Result<T, String> {
        self.map_err(|e| e.to_string())
    }
}

pub(crate) fn ensure_eq<T: PartialEq + fmt::Display>(lhs: &T, rhs: &T, what: &str) -> Trial {
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!("{what}: lhs = {lhs}, rhs = {rhs}"))
    }
}

pub(crate) fn ensure(condition: bool, what: impl FnOnce() -> String) -> Trial {
    if condition {
        Ok(())
    } else {
        Err(what())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub chart: Chart,
    pub seed: u64,
    pub trials: usize,
    pub outcomes: Vec<Outcome>,
    pub wall: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(Outcome::passed)
    }

    pub fn outcome(&self, name: &str) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }

    pub fn render(&self, timing: bool) -> String {
        let mut out = format!("suite {} on {} seed {} trials {}\n", self.suite, self.chart, self.seed, self.trials);
        for o in &self.outcomes {
            match &o.failure {
                None => out.push_str(&format!("  pass  {} ({} trials)\n", o.name, o.trials)),
                Some(msg) => out.push_str(&format!("  FAIL  {} ({} trials): {msg}\n", o.name, o.trials)),
            }
        }
        let passed = self.outcomes.iter().filter(|o| o.passed()).count();
        out.push_str(&format!("{passed}/{} identities pass", self.outcomes.len()));
        if timing {
            out.push_str(&format!(" in {:.3} s", self.wall.as_secs_f64()));
        }
        out.push('\n');
        out
    }

    pub fn to_json(&self, timing: bool) -> Json {
        let identities: Vec<Json> = self
            .outcomes
            .iter()
            .map(|o| json!({ "name": o.name, "trials": o.trials, "status": if o.passed() { "pass" } else { "fail" }, "counterexample": o.failure }))
            .collect();
        let mut v = json!({
            "suite": self.suite.name(),
            "chart": self.chart.to_string(),
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed(),
            "identities": identities,
        });
        if timing {
            v["wall_seconds"] = json!(self.wall.as_secs_f64());
        }
        v
    }
}

/// Run every identity of a suite with the same trial count.
pub fn run_suite(suite: Suite, ctx: &Context, trials: usize) -> msc_core::Result<SuiteReport> {
    let chart = suite.chart(ctx.n, ctx.fields)?;
    let start = Instant::now();
    let outcomes = suite.identities().iter().map(|(_, identity)| identity(ctx, trials)).collect();
    Ok(SuiteReport { suite, chart, seed: ctx.seed, trials, outcomes, wall: start.elapsed() })
}
