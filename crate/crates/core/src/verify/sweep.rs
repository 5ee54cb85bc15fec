//! Sweep drivers: run selected checks over a generated population and
//! aggregate with order-independent reductions.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::{evaluate, failed_subject, Check, CheckParams, CheckReport, Extremum, Scope, Status, Subject, Witness};
use crate::bfn1;
use crate::cube::{check_dim, PseudoBooleanFunction, TruthTable, DEFAULT_MAX_DIM};
use crate::error::{Error, Result};
use crate::families::{make_random, make_random_real, stream_seed, FamilySpec, RealDistribution};
use crate::render::{ser_f64, ser_opt_f64};

pub const REPORT_SCHEMA: &str = "report-v1";
/// Largest `n` for exhaustive enumeration (`2^16` functions).
pub const EXHAUSTIVE_MAX_N: u32 = 4;
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// Every Boolean function on `n <= 4` variables, in table order.
    Exhaustive(u32),
    Random { n: u32, count: u64, seed: u64 },
    RandomReal { n: u32, count: u64, seed: u64, dist: RealDistribution },
    Family(Vec<FamilySpec>),
    /// Explicit tables with a label each.
    Tables(Vec<(String, TruthTable)>),
}

pub enum Item {
    Boolean(TruthTable),
    Real(PseudoBooleanFunction),
}

impl Generator {
    pub fn validate(&self) -> Result<()> {
        match self {
            Generator::Exhaustive(n) => {
                if *n == 0 || *n > EXHAUSTIVE_MAX_N {
                    return Err(Error::ExhaustiveTooLarge(*n));
                }
            }
            Generator::Random { n, .. } | Generator::RandomReal { n, .. } => check_dim(*n, DEFAULT_MAX_DIM)?,
            Generator::Family(_) | Generator::Tables(_) => {}
        }
        Ok(())
    }

    pub fn len(&self) -> u64 {
        match self {
            Generator::Exhaustive(n) => 1u64 << (1u32 << n),
            Generator::Random { count, .. } | Generator::RandomReal { count, .. } => *count,
            Generator::Family(v) => v.len() as u64,
            Generator::Tables(v) => v.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn describe(&self) -> String {
        match self {
            Generator::Exhaustive(n) => format!("exhaustive n={n}"),
            Generator::Random { n, count, seed } => format!("random n={n} count={count} seed={seed}"),
            Generator::RandomReal { n, count, seed, dist } => {
                format!("random-real n={n} count={count} seed={seed} dist={}", dist.name())
            }
            Generator::Family(v) => format!("family [{}]", v.iter().map(|f| f.describe()).collect::<Vec<_>>().join("; ")),
            Generator::Tables(v) => format!("tables [{}]", v.iter().map(|(l, _)| l.as_str()).collect::<Vec<_>>().join("; ")),
        }
    }

    /// The `i`-th member and a label that replays it.
    pub fn item(&self, i: u64) -> Result<(String, Item)> {
        Ok(match self {
            Generator::Exhaustive(n) => (format!("exhaustive n={n} index={i}"), Item::Boolean(TruthTable::from_bits(*n, i)?)),
            Generator::Random { n, seed, .. } => {
                (format!("random n={n} seed={seed} index={i}"), Item::Boolean(make_random(*n, stream_seed(*seed, i))?))
            }
            Generator::RandomReal { n, seed, dist, .. } => (
                format!("random-real n={n} seed={seed} index={i} dist={}", dist.name()),
                Item::Real(make_random_real(*n, stream_seed(*seed, i), *dist)?),
            ),
            Generator::Family(v) => {
                let spec = &v[i as usize];
                (spec.describe(), Item::Boolean(spec.build()?))
            }
            Generator::Tables(v) => (v[i as usize].0.clone(), Item::Boolean(v[i as usize].1.clone())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extremal {
    pub direction: Extremum,
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    pub witness_bfn1: Option<String>,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub index: u64,
    pub source: String,
    pub reason: String,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct CheckSummary {
    pub pass: u64,
    pub fail: u64,
    pub skipped: u64,
    pub warn: u64,
    pub extremal: Option<Extremal>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub min_slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema: &'static str,
    pub generator: String,
    pub functions: u64,
    pub checks: BTreeMap<String, CheckSummary>,
}

impl SweepReport {
    pub fn failed(&self) -> bool {
        self.checks.values().any(|c| c.fail > 0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

struct Row {
    index: u64,
    source: String,
    n: u32,
    table: Option<TruthTable>,
    reports: Vec<CheckReport>,
}

fn better(dir: Extremum, new: f64, new_table: Option<&TruthTable>, old: &Extremal) -> bool {
    let strictly = match dir {
        Extremum::Max => new > old.value,
        Extremum::Min => new < old.value,
    };
    if strictly || new != old.value {
        return strictly;
    }
    // tie: smaller serialized table wins
    match (new_table, &old.witness_bfn1) {
        (Some(t), Some(w)) => bfn1::serialize(t) < *w,
        _ => false,
    }
}

impl CheckSummary {
    fn absorb(&mut self, check: &Check, row_index: u64, source: &str, table: Option<&TruthTable>, r: &CheckReport) {
        match &r.status {
            Status::Pass => self.pass += 1,
            Status::Fail(reason) => {
                self.fail += 1;
                if self.first_failure.is_none() {
                    self.first_failure =
                        Some(Failure { index: row_index, source: source.to_string(), reason: reason.clone(), witness: r.witness.clone() });
                }
            }
            Status::Skipped(_) => self.skipped += 1,
            Status::Warn(_) => self.warn += 1,
        }
        if let Some(s) = r.slack {
            if self.min_slack.is_none_or(|m| s < m) {
                self.min_slack = Some(s);
            }
        }
        if let (Some(dir), Some(v)) = (check.extremum, r.observed_constant) {
            let replace = match &self.extremal {
                None => true,
                Some(old) => better(dir, v, table, old),
            };
            if replace {
                self.extremal = Some(Extremal {
                    direction: dir,
                    value: v,
                    witness_bfn1: table.map(bfn1::serialize),
                    source: source.to_string(),
                });
            }
        }
    }
}

const CSV_HEADER: [&str; 8] = ["index", "source", "n", "check", "status", "reason", "slack", "observed_constant"];

fn csv_record(index: &str, source: &str, n: &str, r: &CheckReport) -> [String; 8] {
    let num = |v: Option<f64>| v.map(crate::render::dec12).unwrap_or_default();
    [
        index.to_string(),
        source.to_string(),
        n.to_string(),
        r.id.to_string(),
        r.status.label().to_string(),
        r.status.reason().unwrap_or("").to_string(),
        num(r.slack),
        num(r.observed_constant),
    ]
}

/// Runs `checks` over every member of `generator`. Per-function work fans out
/// on the current rayon pool; aggregation walks results in index order, so
/// the report does not depend on the worker count. Scalar checks run once.
pub fn sweep(
    checks: &[&'static Check],
    generator: &Generator,
    params: &CheckParams,
    csv_out: Option<&mut dyn Write>,
) -> Result<SweepReport> {
    generator.validate()?;
    params.validate()?;
    let mut csv = csv_out.map(csv::Writer::from_writer);
    if let Some(w) = csv.as_mut() {
        w.write_record(CSV_HEADER).map_err(|e| Error::Io(e.to_string()))?;
    }
    let mut summaries: BTreeMap<String, CheckSummary> =
        checks.iter().map(|c| (c.id.to_string(), CheckSummary::default())).collect();

    let (scalar, per_fn): (Vec<&'static Check>, Vec<&'static Check>) =
        checks.iter().partition(|c| c.scope == Scope::Scalar);
    if !scalar.is_empty() {
        let dummy = Subject::Real(PseudoBooleanFunction::new(vec![1.0, 1.0])?);
        for c in &scalar {
            let r = evaluate(c, &dummy, params);
            let r = CheckReport { witness: r.witness.map(|w| Witness { values: None, ..w }), ..r };
            if let Some(w) = csv.as_mut() {
                w.write_record(csv_record("", "scalar", "", &r)).map_err(|e| Error::Io(e.to_string()))?;
            }
            summaries.get_mut(c.id).expect("selected").absorb(c, 0, "scalar", None, &r);
        }
    }

    let total = generator.len();
    let mut start = 0u64;
    while start < total && !per_fn.is_empty() {
        let end = (start + CHUNK).min(total);
        let rows: Vec<Result<Row>> = (start..end)
            .into_par_iter()
            .map(|i| {
                let (source, item) = generator.item(i)?;
                Ok(match item {
                    Item::Boolean(f) => {
                        let n = f.n();
                        let reports = match Subject::boolean(f.clone()) {
                            Ok(s) => super::run_checks(&per_fn, &s, params),
                            Err(e) => failed_subject(&per_fn, &f, &e),
                        };
                        Row { index: i, source, n, table: Some(f), reports }
                    }
                    Item::Real(g) => {
                        let n = g.n();
                        let s = Subject::Real(g);
                        Row { index: i, source, n, table: None, reports: super::run_checks(&per_fn, &s, params) }
                    }
                })
            })
            .collect();
        for row in rows {
            let row = row?;
            for (c, r) in per_fn.iter().zip(&row.reports) {
                summaries.get_mut(c.id).expect("selected").absorb(c, row.index, &row.source, row.table.as_ref(), r);
                if let Some(w) = csv.as_mut() {
                    w.write_record(csv_record(&row.index.to_string(), &row.source, &row.n.to_string(), r))
                        .map_err(|e| Error::Io(e.to_string()))?;
                }
            }
        }
        start = end;
    }
    if let Some(mut w) = csv {
        w.flush()?;
    }
    Ok(SweepReport { schema: REPORT_SCHEMA, generator: generator.describe(), functions: total, checks: summaries })
}
