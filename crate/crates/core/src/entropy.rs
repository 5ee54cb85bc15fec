//! Spectral entropy, min-entropy, junta concentration sets and the
//! conjecture observables (reported, never asserted).

use serde::Serialize;

use crate::calculus::InfluenceProfile;
use crate::cube::{SubsetMask, TruthTable};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::render::{ser_f64, ser_opt_f64};
use crate::spectrum::Spectrum;

/// `Ent(f) = Σ_S f̂(S)^2 log2(1/f̂(S)^2)` in bits; zero weights contribute 0.
/// Sums in ascending mask order.
pub fn entropy(spec: &Spectrum) -> Result<f64> {
    if !spec.is_exact() {
        return Err(Error::NotNormalized);
    }
    Ok((0..spec.len() as u32).map(|s| plog2(spec.weight(SubsetMask(s)))).sum())
}

/// Shannon entropy (bits) of arbitrary nonnegative weights, no normalization check.
pub fn weight_entropy(weights: impl IntoIterator<Item = f64>) -> f64 {
    weights.into_iter().map(plog2).sum()
}

fn plog2(w: f64) -> f64 {
    if w > 0.0 {
        -w * w.log2()
    } else {
        0.0
    }
}

/// Largest `|f̂(S)|` with its mask; ties go to the smallest mask.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinEntropy {
    #[serde(serialize_with = "ser_f64")]
    pub max_coef: f64,
    pub argmax: u32,
}

pub fn min_entropy(spec: &Spectrum) -> MinEntropy {
    let mut best = (0.0f64, 0u32);
    for s in 0..spec.len() as u32 {
        let c = spec.coefficient(SubsetMask(s)).abs();
        if c > best.0 {
            best = (c, s);
        }
    }
    MinEntropy { max_coef: best.0, argmax: best.1 }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    #[serde(serialize_with = "ser_f64")]
    pub ent_bits: f64,
    #[serde(serialize_with = "ser_f64")]
    pub max_coef: f64,
    pub argmax_mask: u32,
    /// `Ent / I`, absent for constants.
    #[serde(serialize_with = "ser_opt_f64")]
    pub fei_ratio: Option<f64>,
    /// `-ln(max_S f̂(S)^2) / (2 I)`, absent for constants.
    #[serde(serialize_with = "ser_opt_f64")]
    pub fmei_exponent: Option<f64>,
    /// `Σ_k -I_k ln I_k`.
    #[serde(serialize_with = "ser_f64")]
    pub plogp_sum_nat: f64,
}

pub fn entropy_report(spec: &Spectrum, profile: &InfluenceProfile) -> Result<EntropyReport> {
    let ent_bits = entropy(spec)?;
    let me = min_entropy(spec);
    let total = profile.total.to_f64();
    let (fei_ratio, fmei_exponent) = if total > 0.0 {
        (Some(ent_bits / total), Some(-(me.max_coef * me.max_coef).ln() / (2.0 * total)))
    } else {
        (None, None)
    };
    Ok(EntropyReport {
        ent_bits,
        max_coef: me.max_coef,
        argmax_mask: me.argmax,
        fei_ratio,
        fmei_exponent,
        plogp_sum_nat: profile.plogp_sum_nat(),
    })
}

/// A family `A` of subsets for concentration checks.
#[derive(Debug, Clone, PartialEq)]
pub enum SetFamily {
    All,
    /// `{S : S ⊆ J, |S| <= cap}`.
    JuntaDegree { junta: SubsetMask, cap: u32 },
    Explicit(Vec<SubsetMask>),
    /// `{S : |S| <= cap}`.
    DegreeAtMost(u32),
}

impl SetFamily {
    pub fn contains(&self, s: SubsetMask) -> bool {
        match self {
            SetFamily::All => true,
            SetFamily::JuntaDegree { junta, cap } => s.is_subset_of(*junta) && s.len() <= *cap,
            SetFamily::Explicit(v) => v.contains(&s),
            SetFamily::DegreeAtMost(cap) => s.len() <= *cap,
        }
    }
}

/// Exact `Σ_{S ∉ A} f̂(S)^2`.
pub fn concentration_check(spec: &Spectrum, family: &SetFamily) -> Result<Dyadic> {
    let w = spec.weight_numerators()?;
    let leaked: i128 = w
        .iter()
        .enumerate()
        .filter(|(s, _)| !family.contains(SubsetMask(*s as u32)))
        .map(|(_, &v)| v as i128)
        .sum();
    Ok(Dyadic::new(leaked, 2 * spec.n()))
}

/// Markov tail `Σ_{|S| > 2 I} f̂(S)^2`.
pub fn markov_tail(spec: &Spectrum, total: Dyadic) -> Result<Dyadic> {
    let w = spec.weight_numerators()?;
    let twice = total * Dyadic::from_int(2);
    let leaked: i128 = w
        .iter()
        .enumerate()
        .filter(|(s, _)| Dyadic::from_int(s.count_ones() as i128) > twice)
        .map(|(_, &v)| v as i128)
        .sum();
    Ok(Dyadic::new(leaked, 2 * spec.n()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JuntaSet {
    #[serde(serialize_with = "ser_f64")]
    pub eps: f64,
    /// `(eps/I * 4^{-I/eps})^{5/3}`.
    #[serde(serialize_with = "ser_f64")]
    pub threshold: f64,
    pub junta: SubsetMask,
    /// `⌊I / eps⌋`.
    pub degree_cap: u32,
    /// `|A|`.
    pub family_size: u128,
    pub leaked_weight: Dyadic,
}

impl JuntaSet {
    pub fn family(&self) -> SetFamily {
        SetFamily::JuntaDegree { junta: self.junta, cap: self.degree_cap }
    }

    pub fn within_guarantee(&self) -> bool {
        self.leaked_weight.to_f64() <= 2.0 * self.eps
    }
}

/// High-influence coordinates `J = {k : I_k >= threshold}` and the leaked
/// weight outside `{S ⊆ J, |S| <= I/eps}`.
pub fn junta_set(spec: &Spectrum, profile: &InfluenceProfile, eps: f64) -> Result<JuntaSet> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParam(format!("eps must be positive, got {eps}")));
    }
    let total = profile.total.to_f64();
    if total == 0.0 {
        return Err(Error::ConstantFunction("the junta threshold"));
    }
    let ratio = total / eps;
    // compare in log space: ln I_k >= (5/3)(ln eps - ln I - (I/eps) ln 4)
    let log_threshold = 5.0 / 3.0 * (eps.ln() - total.ln() - ratio * 4f64.ln());
    let mut junta = 0u32;
    for (k, ik) in profile.per_bit.iter().enumerate() {
        let v = ik.to_f64();
        if v > 0.0 && v.ln() >= log_threshold {
            junta |= 1 << k;
        }
    }
    let junta = SubsetMask(junta);
    let degree_cap = ratio.floor() as u32;
    let family_size = (0..=degree_cap.min(junta.len())).map(|d| binomial(junta.len(), d)).sum();
    let leaked_weight = concentration_check(spec, &SetFamily::JuntaDegree { junta, cap: degree_cap })?;
    Ok(JuntaSet { eps, threshold: log_threshold.exp(), junta, degree_cap, family_size, leaked_weight })
}

pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `-(1/ln 2) dM_{[n],eps}/deps` at `0+`, by a one-sided difference with
/// step `h` and one Richardson step. Should reproduce `Ent(f)`.
pub fn entropy_from_moment_derivative(f: &TruthTable, h: f64) -> Result<f64> {
    let full = SubsetMask::full(f.n());
    let rc = crate::calculus::RestrictedCoefficients::new(f, full)?;
    let m0 = rc.moment(0.0)?;
    let d = |step: f64| -> Result<f64> { Ok((rc.moment(step)? - m0) / step) };
    let richardson = 2.0 * d(h / 2.0)? - d(h)?;
    Ok(-richardson / std::f64::consts::LN_2)
}
