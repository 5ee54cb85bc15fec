//! Named checks over Boolean (and some real-valued) functions, sweep drivers
//! and the extremal-constant search.

mod checks;
pub mod search;
pub mod sweep;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bfn1;
use crate::calculus::{build_profile_with, high_order_influence_numerators, InfluenceProfile};
use crate::cube::{PseudoBooleanFunction, TruthTable};
use crate::entropy::{entropy, min_entropy, MinEntropy};
use crate::error::{Error, Result};
use crate::families::make_example_h;
use crate::render::{ser_opt_f64, round12};
use crate::spectrum::{transform, Spectrum};

pub use checks::{hypercontractivity_sides, two_point_sides, moment_step_rhs, ENT_MOMENT_CONSTANT};

/// Additive slack for inequality checks: `lhs <= rhs + TOL (1 + |rhs|)`.
pub const TOL: f64 = 1e-9;

pub fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + TOL * (1.0 + rhs.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Exact arithmetic, zero tolerance.
    Identity,
    /// Floating point with slack `TOL (1 + |rhs|)`.
    Inequality,
    /// Warn-only.
    Statistical,
    /// Records an observable, never fails.
    Report,
}

/// Which end of the observed constant is the interesting one across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremum {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    PerFunction,
    /// Independent of the function; a sweep runs it once.
    Scalar,
}

pub struct Check {
    pub id: &'static str,
    pub kind: CheckKind,
    pub scope: Scope,
    pub extremum: Option<Extremum>,
    pub summary: &'static str,
    eval: fn(&Subject, &CheckParams) -> Evaluation,
}

impl std::fmt::Debug for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Check").field("id", &self.id).field("kind", &self.kind).finish()
    }
}

pub fn registry() -> &'static [Check] {
    checks::REGISTRY
}

pub fn find_check(id: &str) -> Result<&'static Check> {
    registry().iter().find(|c| c.id == id).ok_or_else(|| Error::UnknownCheck(id.to_string()))
}

/// `all`, `identities`, or a comma-separated list of ids.
pub fn select_checks(selection: &str) -> Result<Vec<&'static Check>> {
    match selection.trim() {
        "all" => Ok(registry().iter().collect()),
        "identities" => Ok(registry().iter().filter(|c| c.kind == CheckKind::Identity).collect()),
        list => {
            let mut out: Vec<&'static Check> = Vec::new();
            for id in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let c = find_check(id)?;
                if !out.iter().any(|o| o.id == c.id) {
                    out.push(c);
                }
            }
            if out.is_empty() {
                return Err(Error::InvalidParam("empty check selection".into()));
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckParams {
    /// `eps` values for the restriction-moment checks, each in `(0, 1/2)`.
    pub eps_grid: Vec<f64>,
    /// Noise rates for hypercontractivity, each in `[0, 1]`.
    pub rho_grid: Vec<f64>,
    /// `eps` values for the junta concentration check.
    pub friedgut_eps: Vec<f64>,
    /// Optional assertion limits on observed constants, keyed by check id.
    /// For `Max` checks the constant must not exceed the limit, for `Min`
    /// checks it must not fall below it. Report-only checks ignore them.
    pub limits: BTreeMap<String, f64>,
    /// Inner function for `compose-degree`.
    pub compose_partner: TruthTable,
    pub sample_seed: u64,
    pub sample_count: usize,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            eps_grid: (1..=9).map(|i| i as f64 * 0.05).collect(),
            rho_grid: (0..=10).map(|i| i as f64 * 0.1).collect(),
            friedgut_eps: vec![0.125, 0.25, 0.5],
            limits: BTreeMap::new(),
            compose_partner: make_example_h(),
            sample_seed: 0,
            sample_count: 2000,
        }
    }
}

impl CheckParams {
    pub fn validate(&self) -> Result<()> {
        if let Some(e) = self.eps_grid.iter().find(|e| !(**e > 0.0 && **e < 0.5)) {
            return Err(Error::InvalidParam(format!("eps {e} outside (0, 1/2)")));
        }
        if let Some(r) = self.rho_grid.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::InvalidParam(format!("rho {r} outside [0, 1]")));
        }
        if let Some(e) = self.friedgut_eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidParam(format!("junta eps {e} must be positive")));
        }
        if self.compose_partner.is_constant() {
            return Err(Error::InvalidParam("compose partner must be non-constant".into()));
        }
        for id in self.limits.keys() {
            find_check(id)?;
        }
        Ok(())
    }
}

/// A Boolean function with everything the checks share, computed once.
#[derive(Debug, Clone)]
pub struct BooleanSubject {
    pub f: TruthTable,
    pub spec: Spectrum,
    /// `Σ_{T ⊇ S} (2^n f̂(T))^2` for every `S`.
    pub zeta: Vec<i64>,
    pub profile: InfluenceProfile,
    pub ent_bits: f64,
    pub min_entropy: MinEntropy,
    pub degree: u32,
}

impl BooleanSubject {
    pub fn new(f: TruthTable) -> Result<Self> {
        let spec = transform(&f);
        let zeta = high_order_influence_numerators(&spec)?;
        let profile = build_profile_with(&f, &spec)?;
        let ent_bits = entropy(&spec)?;
        let min_entropy = min_entropy(&spec);
        let degree = spec.degree();
        Ok(BooleanSubject { f, spec, zeta, profile, ent_bits, min_entropy, degree })
    }

    pub fn mean_is_zero(&self) -> bool {
        self.spec.scaled().map(|v| v[0] == 0).unwrap_or(false)
    }
}

#[derive(Debug, Clone)]
pub enum Subject {
    Boolean(Box<BooleanSubject>),
    Real(PseudoBooleanFunction),
}

impl Subject {
    pub fn boolean(f: TruthTable) -> Result<Subject> {
        Ok(Subject::Boolean(Box::new(BooleanSubject::new(f)?)))
    }

    pub fn n(&self) -> u32 {
        match self {
            Subject::Boolean(b) => b.f.n(),
            Subject::Real(g) => g.n(),
        }
    }

    pub fn table(&self) -> Option<&TruthTable> {
        match self {
            Subject::Boolean(b) => Some(&b.f),
            Subject::Real(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Pass,
    Fail(String),
    Skipped(String),
    Warn(String),
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail(_) => "fail",
            Status::Skipped(_) => "skipped",
            Status::Warn(_) => "warn",
        }
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Status::Pass => None,
            Status::Fail(r) | Status::Skipped(r) | Status::Warn(r) => Some(r),
        }
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Status::Fail(_))
    }
}

/// What an evaluator returns before the report is stamped with id and witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub status: Status,
    pub slack: Option<f64>,
    pub observed: Option<f64>,
    pub note: Option<String>,
    /// Parameters at the decisive point (worst grid point, violating pair, ...).
    pub params: String,
}

impl Evaluation {
    pub fn pass() -> Self {
        Evaluation { status: Status::Pass, slack: None, observed: None, note: None, params: String::new() }
    }

    pub fn skipped(reason: impl Into<String>) -> Self {
        Evaluation { status: Status::Skipped(reason.into()), ..Self::pass() }
    }

    pub fn fail(reason: impl Into<String>) -> Self {
        Evaluation { status: Status::Fail(reason.into()), ..Self::pass() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// BFN1 text for Boolean subjects.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bfn1: Option<String>,
    /// Values of a real-valued subject, rounded to 12 digits.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    pub params: String,
}

impl Witness {
    pub fn of(subject: &Subject, params: &str) -> Witness {
        match subject {
            Subject::Boolean(b) => Witness { bfn1: Some(bfn1::serialize(&b.f)), values: None, params: params.to_string() },
            Subject::Real(g) => Witness {
                bfn1: None,
                values: Some(g.values().iter().map(|&v| round12(v)).collect()),
                params: params.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub id: &'static str,
    pub kind: CheckKind,
    #[serde(serialize_with = "ser_status")]
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// `rhs - lhs` at the tightest point (nonnegative when the inequality holds).
    #[serde(serialize_with = "ser_opt_f64")]
    pub slack: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub observed_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Present on failures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

fn ser_status<S: serde::Serializer>(s: &Status, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(s.label())
}

/// Runs one check on a prepared subject, applying any configured limit.
pub fn evaluate(check: &Check, subject: &Subject, params: &CheckParams) -> CheckReport {
    let mut ev = (check.eval)(subject, params);
    if let (Status::Pass, Some(obs), Some(dir), Some(&limit)) =
        (&ev.status, ev.observed, check.extremum, params.limits.get(check.id))
    {
        if check.kind != CheckKind::Report {
            let beyond = match dir {
                Extremum::Max => !within(obs, limit),
                Extremum::Min => !within(limit, obs),
            };
            if beyond {
                ev.status = Status::Fail(format!("observed constant {obs} beyond limit {limit}"));
            }
        }
    }
    let witness = ev.status.is_fail().then(|| Witness::of(subject, &ev.params));
    CheckReport {
        id: check.id,
        kind: check.kind,
        reason: ev.status.reason().map(str::to_string),
        status: ev.status,
        slack: ev.slack,
        observed_constant: ev.observed,
        note: ev.note,
        witness,
    }
}

/// Runs `check_id` on `f`.
pub fn run_check(check_id: &str, f: &TruthTable, params: &CheckParams) -> Result<CheckReport> {
    let check = find_check(check_id)?;
    params.validate()?;
    let subject = Subject::boolean(f.clone())?;
    Ok(evaluate(check, &subject, params))
}

/// Runs every selected check on one subject, in selection order.
pub fn run_checks(checks: &[&'static Check], subject: &Subject, params: &CheckParams) -> Vec<CheckReport> {
    checks.iter().map(|c| evaluate(c, subject, params)).collect()
}

/// Reports for a function whose subject could not be built: every selected
/// check fails with the same reason.
pub fn failed_subject(checks: &[&'static Check], f: &TruthTable, err: &Error) -> Vec<CheckReport> {
    checks
        .iter()
        .map(|c| CheckReport {
            id: c.id,
            kind: c.kind,
            status: Status::Fail(err.to_string()),
            reason: Some(err.to_string()),
            slack: None,
            observed_constant: None,
            note: None,
            witness: Some(Witness { bfn1: Some(bfn1::serialize(f)), values: None, params: String::new() }),
        })
        .collect()
}
