//! Leaderboards of functions maximizing an observed constant.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::sweep::EXHAUSTIVE_MAX_N;
use super::BooleanSubject;
use crate::bfn1;
use crate::cube::{check_dim, TruthTable, DEFAULT_MAX_DIM};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::families::{compose, make_example_h, make_random, stream_seed};
use crate::render::ser_f64;

pub const LEADERBOARD_SIZE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `Ent / I`.
    FeiRatio,
    /// `-ln(max_k I_k) / I` over balanced functions.
    KklEdgeConstant,
    /// `-ln(max_S |f̂(S)|) / deg`.
    FmeiDegreeConstant,
}

impl std::str::FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "fei_ratio" => Ok(Objective::FeiRatio),
            "kkl_edge_constant" | "kkl_edge" => Ok(Objective::KklEdgeConstant),
            "fmei_degree_constant" | "fmei_degree" => Ok(Objective::FmeiDegreeConstant),
            _ => Err(Error::InvalidParam(format!("unknown objective `{s}`"))),
        }
    }
}

impl Objective {
    /// `None` when the objective does not apply (`I = 0`, unbalanced, degree 0).
    pub fn value(self, s: &BooleanSubject) -> Option<f64> {
        let total = s.profile.total;
        match self {
            Objective::FeiRatio => (!total.is_zero()).then(|| s.ent_bits / total.to_f64()),
            Objective::KklEdgeConstant => (s.mean_is_zero() && !total.is_zero()).then(|| {
                let max_ik = s.profile.per_bit.iter().copied().max().unwrap_or(Dyadic::ZERO);
                -max_ik.to_f64().ln() / total.to_f64()
            }),
            Objective::FmeiDegreeConstant => (s.degree > 0).then(|| -s.min_entropy.max_coef.ln() / s.degree as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Exhaustive { n: u32 },
    Random { n: u32, seed: u64 },
    /// Level 1 is `seeds`; level `d + 1` composes each kept level-`d`
    /// candidate with each seed on either side, keeping the best `width`.
    ComposeGreedy { seeds: Vec<TruthTable>, depth: u32, width: usize, max_dim: u32 },
}

impl Strategy {
    pub fn compose_greedy_default(depth: u32) -> Strategy {
        Strategy::ComposeGreedy { seeds: vec![make_example_h()], depth, width: 8, max_dim: 16 }
    }

    fn describe(&self) -> String {
        match self {
            Strategy::Exhaustive { n } => format!("exhaustive n={n}"),
            Strategy::Random { n, seed } => format!("random n={n} seed={seed}"),
            Strategy::ComposeGreedy { seeds, depth, width, max_dim } => {
                format!("compose_greedy seeds={} depth={depth} width={width} max_dim={max_dim}", seeds.len())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeaderEntry {
    pub rank: usize,
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    pub n: u32,
    pub bfn1: String,
    #[serde(serialize_with = "ser_f64")]
    pub ent_bits: f64,
    pub total_influence: Dyadic,
    pub degree: u32,
    #[serde(serialize_with = "ser_f64")]
    pub max_coef: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Leaderboard {
    pub objective: Objective,
    pub strategy: String,
    pub evaluated: u64,
    /// Candidates where the objective does not apply.
    pub skipped: u64,
    pub entries: Vec<LeaderEntry>,
}

impl Leaderboard {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["rank", "value", "n", "degree", "ent_bits", "total_influence", "max_coef", "bfn1"]).map_err(io)?;
        for e in &self.entries {
            w.write_record([
                e.rank.to_string(),
                crate::render::dec12(e.value),
                e.n.to_string(),
                e.degree.to_string(),
                crate::render::dec12(e.ent_bits),
                e.total_influence.to_string(),
                crate::render::dec12(e.max_coef),
                e.bfn1.clone(),
            ])
            .map_err(io)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
    }
}

struct Scored {
    value: f64,
    subject: BooleanSubject,
    bytes: Vec<u8>,
}

/// Value descending, then `n`, then table bytes.
fn rank_order(a: &Scored, b: &Scored) -> Ordering {
    b.value
        .partial_cmp(&a.value)
        .unwrap_or(Ordering::Equal)
        .then(a.subject.f.n().cmp(&b.subject.f.n()))
        .then_with(|| a.bytes.cmp(&b.bytes))
}

fn score(objective: Objective, f: TruthTable) -> Result<Option<Scored>> {
    let subject = BooleanSubject::new(f)?;
    Ok(objective.value(&subject).map(|value| Scored { value, bytes: subject.f.to_bytes(), subject }))
}

fn score_all(objective: Objective, tables: Vec<TruthTable>) -> Result<(u64, Vec<Scored>)> {
    let scored: Vec<Option<Scored>> =
        tables.into_par_iter().map(|f| score(objective, f)).collect::<Result<Vec<_>>>()?;
    let skipped = scored.iter().filter(|s| s.is_none()).count() as u64;
    Ok((skipped, scored.into_iter().flatten().collect()))
}

/// Top functions by `objective` among at most `budget` candidates.
pub fn tightness_search(objective: Objective, strategy: &Strategy, budget: u64) -> Result<Leaderboard> {
    if budget == 0 {
        return Err(Error::InvalidParam("budget must be positive".into()));
    }
    let (evaluated, skipped, mut pool) = match strategy {
        Strategy::Exhaustive { n } => {
            if *n == 0 || *n > EXHAUSTIVE_MAX_N {
                return Err(Error::ExhaustiveTooLarge(*n));
            }
            let count = budget.min(1u64 << (1u32 << n));
            let tables = (0..count).map(|i| TruthTable::from_bits(*n, i)).collect::<Result<Vec<_>>>()?;
            let (skipped, pool) = score_all(objective, tables)?;
            (count, skipped, pool)
        }
        Strategy::Random { n, seed } => {
            check_dim(*n, DEFAULT_MAX_DIM)?;
            let tables = (0..budget).map(|i| make_random(*n, stream_seed(*seed, i))).collect::<Result<Vec<_>>>()?;
            let (skipped, pool) = score_all(objective, tables)?;
            (budget, skipped, pool)
        }
        Strategy::ComposeGreedy { seeds, depth, width, max_dim } => compose_greedy(objective, seeds, *depth, *width, *max_dim, budget)?,
    };
    pool.sort_by(rank_order);
    let entries = pool
        .into_iter()
        .take(LEADERBOARD_SIZE)
        .enumerate()
        .map(|(i, s)| LeaderEntry {
            rank: i + 1,
            value: s.value,
            n: s.subject.f.n(),
            bfn1: bfn1::serialize(&s.subject.f),
            ent_bits: s.subject.ent_bits,
            total_influence: s.subject.profile.total,
            degree: s.subject.degree,
            max_coef: s.subject.min_entropy.max_coef,
        })
        .collect();
    Ok(Leaderboard { objective, strategy: strategy.describe(), evaluated, skipped, entries })
}

fn compose_greedy(
    objective: Objective,
    seeds: &[TruthTable],
    depth: u32,
    width: usize,
    max_dim: u32,
    budget: u64,
) -> Result<(u64, u64, Vec<Scored>)> {
    if seeds.is_empty() || depth == 0 || width == 0 {
        return Err(Error::InvalidParam("compose_greedy needs seeds, depth >= 1 and width >= 1".into()));
    }
    let max_dim = max_dim.min(DEFAULT_MAX_DIM);
    let mut seen: BTreeSet<TruthTable> = BTreeSet::new();
    let mut pool: Vec<Scored> = Vec::new();
    let (mut evaluated, mut skipped) = (0u64, 0u64);
    let mut level: Vec<TruthTable> = seeds.to_vec();
    for d in 1..=depth {
        if d > 1 {
            let mut next = Vec::new();
            for a in &level {
                for s in seeds {
                    for (outer, inner) in [(a, s), (s, a)] {
                        if outer.n() * inner.n() <= max_dim {
                            next.push(compose(outer, inner)?);
                        }
                    }
                }
            }
            level = next;
        }
        level.retain(|t| seen.insert(t.clone()));
        let room = (budget - evaluated) as usize;
        level.truncate(room);
        evaluated += level.len() as u64;
        let scored: Vec<(TruthTable, Option<Scored>)> = level
            .par_iter()
            .map(|t| Ok((t.clone(), score(objective, t.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        // keep the best `width` of this level as parents; unscored ones trail
        let mut ranked: Vec<(TruthTable, Option<f64>)> = Vec::with_capacity(scored.len());
        for (t, s) in scored {
            match s {
                Some(s) => {
                    ranked.push((t, Some(s.value)));
                    pool.push(s);
                }
                None => {
                    skipped += 1;
                    ranked.push((t, None));
                }
            }
        }
        ranked.sort_by(|a, b| match (a.1, b.1) {
            (Some(x), Some(y)) => y.partial_cmp(&x).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => a.0.cmp(&b.0),
        });
        level = ranked.into_iter().take(width).map(|(t, _)| t).collect();
        if evaluated >= budget || level.is_empty() {
            break;
        }
    }
    Ok((evaluated, skipped, pool))
}
