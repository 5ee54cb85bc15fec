use crate::calculus::{
    derivative_scaled, influence, noise, pivotal_counts, pivotal_pair_count, restricted_influence,
    moment_identities, spectral_power_sum, InfluenceMethod, RestrictedCoefficients,
};
use crate::cube::{PseudoBooleanFunction, SubsetMask, DEFAULT_MAX_DIM};
use crate::dyadic::Dyadic;
use crate::entropy::{entropy_from_moment_derivative, junta_set, markov_tail};
use crate::error::Result;
use crate::families::compose;
use crate::spectrum::transform;

use super::{
    within, BooleanSubject, Check, CheckKind, CheckParams, Evaluation, Extremum, Scope, Status, Subject,
};

/// `(5 + ln 4) / ln 2`: the bound `Ent <= c E|S_f|^2` assembled from the
/// explicit entropy bound and the `p log p` bound.
pub const ENT_MOMENT_CONSTANT: f64 = (5.0 + 2.0 * std::f64::consts::LN_2) / std::f64::consts::LN_2;

macro_rules! boolean {
    ($s:expr) => {
        match $s {
            Subject::Boolean(b) => b.as_ref(),
            Subject::Real(_) => return Evaluation::skipped("requires a Boolean function"),
        }
    };
}

macro_rules! check {
    ($id:literal, $kind:ident, $scope:ident, $ext:expr, $summary:literal, $eval:ident) => {
        Check { id: $id, kind: CheckKind::$kind, scope: Scope::$scope, extremum: $ext, summary: $summary, eval: $eval }
    };
}

const MAX: Option<Extremum> = Some(Extremum::Max);
const MIN: Option<Extremum> = Some(Extremum::Min);

pub static REGISTRY: &[Check] = &[
    check!("parseval", Identity, PerFunction, None, "Σ f̂(S)^2 = 1", parseval),
    check!("influence-spectral", Identity, PerFunction, None, "pivotal I_k = Σ_{S∋k} f̂(S)^2", influence_spectral),
    check!("russo", Identity, PerFunction, None, "Σ_i f̂({i}) = E[f Σ x_i]; = I(f) when monotone", russo),
    check!("hyper", Inequality, PerFunction, MAX, "||T_rho g||_2 <= ||g||_{1+rho^2} for f and each ∂_k f", hyper),
    check!("kkl-edge", Inequality, PerFunction, MAX, "balanced f: I(f) >= 1; c = -ln(max I_k)/I", kkl_edge),
    check!("kkl", Inequality, PerFunction, MIN, "c = max_k I_k n / (Var f ln n)", kkl),
    check!("friedgut", Inequality, PerFunction, MAX, "junta family leaks at most 2 eps", friedgut),
    check!("fmei-quad", Inequality, PerFunction, MAX, "max f̂^2 >= 1/(2|A|); c = -ln(max|f̂|)/I^2", fmei_quad),
    check!("dSf-spectrum", Identity, PerFunction, None, "E(∂_S f)^2 = Σ_{T⊇S} f̂(T)^2", dsf_spectrum),
    check!("second-order-pivotal", Identity, PerFunction, None, "I_{k,l} = P(k, l both pivotal)", second_order_pivotal),
    check!("moment-identities", Identity, PerFunction, None, "influence, pivotal and spectral moments agree", moment_ids),
    check!("plogp-bound", Inequality, PerFunction, MAX, "Σ -I_k ln I_k <= 2 E|S_f|^2", plogp_bound),
    check!("fmei-degree", Inequality, PerFunction, MAX, "max f̂^2 >= 1/(2(2^{10 deg}+1)); c = -ln(max|f̂|)/deg", fmei_degree),
    check!("compose-degree", Inequality, PerFunction, None, "deg(f_g) <= deg f deg g, equality warn-only", compose_degree),
    check!("restriction-identity", Identity, PerFunction, None, "E_x Σ_{k∈S⊆J} restricted f̂(S)^2 = I_k", restriction_identity),
    check!("lemma-521", Inequality, Scalar, None, "two-point moment inequality on the (a, b, eps) grid", two_point),
    check!("moment-step", Inequality, PerFunction, None, "M_{V∪k} - M_V >= -I_k(3e+2e^2+(I_k/4)^-e-1)", moment_step),
    check!("ent-bound", Inequality, PerFunction, MAX, "Ent <= (3I + Σ I_k ln(4/I_k))/ln 2, moment lower bound", ent_bound),
    check!("ent-moment-bound", Inequality, PerFunction, MAX, "Ent <= ((5 + ln 4)/ln 2) E|S_f|^2", ent_moment_bound),
    check!("fei-ratio", Report, PerFunction, MAX, "Ent / I", fei_ratio),
    check!("fmei-ratio", Report, PerFunction, MAX, "-ln(max f̂^2) / (2I)", fmei_ratio),
    check!("markov-tail", Identity, PerFunction, None, "balanced f: Σ_{|S|>2I} f̂^2 <= 1/2", markov_tail_check),
    check!("monotone-structure", Identity, PerFunction, None, "monotone f: I_k = f̂({k}), |∂_{k,l} f| ∈ {0, 1/2}", monotone_structure),
    check!("spectral-sample", Statistical, PerFunction, None, "sample frequencies track f̂(S)^2", spectral_sample),
];

/// Tightest margin over a family of inequalities, keeping the first violation.
struct Margin {
    slack: f64,
    worst: String,
    violation: Option<String>,
}

impl Margin {
    fn new() -> Self {
        Margin { slack: f64::INFINITY, worst: String::new(), violation: None }
    }

    /// Records `lhs <= rhs`.
    fn le(&mut self, lhs: f64, rhs: f64, at: impl Fn() -> String) {
        let s = rhs - lhs;
        if s < self.slack || self.worst.is_empty() {
            self.slack = s;
            self.worst = at();
        }
        if self.violation.is_none() && !within(lhs, rhs) {
            self.violation = Some(format!("{}: {lhs} > {rhs}", at()));
        }
    }

    fn finish(self, observed: Option<f64>) -> Evaluation {
        let slack = self.slack.is_finite().then_some(self.slack);
        match self.violation {
            Some(v) => Evaluation { slack, observed, params: v.clone(), ..Evaluation::fail(v) },
            None => Evaluation { slack, observed, params: self.worst, ..Evaluation::pass() },
        }
    }
}

/// Running maximum of an observed ratio.
fn max_opt(acc: &mut Option<f64>, v: f64) {
    if v.is_finite() && acc.is_none_or(|a| v > a) {
        *acc = Some(v);
    }
}

fn exact(pass: bool, reason: impl FnOnce() -> String) -> Evaluation {
    if pass {
        Evaluation { slack: Some(0.0), ..Evaluation::pass() }
    } else {
        let r = reason();
        Evaluation { params: r.clone(), ..Evaluation::fail(r) }
    }
}

fn parseval(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    match b.spec.parseval_residue() {
        Ok(r) => exact(r == 0, || format!("Σ (2^n f̂)^2 - 4^n = {r}")),
        Err(e) => Evaluation::fail(e.to_string()),
    }
}

fn influence_spectral(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    let n = b.f.n();
    let counts = pivotal_counts(&b.f);
    let w = b.spec.weight_numerators().expect("exact");
    for k in 0..n {
        let bit = 1usize << k;
        let spectral: i128 = w.iter().enumerate().filter(|(m, _)| m & bit != 0).map(|(_, &v)| v as i128).sum();
        let (piv, spc) = (Dyadic::new(counts[k as usize] as i128, n), Dyadic::new(spectral, 2 * n));
        if piv != spc {
            return exact(false, || format!("k={}: pivotal {piv} vs spectral {spc}", k + 1));
        }
    }
    exact(true, String::new)
}

fn russo(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    let n = b.f.n();
    let spectral = b.spec.russo_derivative().expect("exact");
    let table: i128 =
        (0..b.f.len() as u32).map(|x| b.f.sign(x) as i128 * (n as i128 - 2 * x.count_ones() as i128)).sum();
    let table = Dyadic::new(table, n);
    if spectral != table {
        return exact(false, || format!("Σ f̂({{i}}) = {spectral} but E[f Σ x_i] = {table}"));
    }
    if b.f.is_monotone() {
        let mut ev = exact(spectral == b.profile.total, || format!("monotone: {spectral} != I = {}", b.profile.total));
        ev.note = Some("monotone: derivative equals I(f)".into());
        return ev;
    }
    exact(true, String::new)
}

/// `(||T_rho g||_2, ||g||_{1+rho^2})`.
pub fn hypercontractivity_sides(g: &PseudoBooleanFunction, rho: f64) -> Result<(f64, f64)> {
    Ok((noise(g, rho)?.norm(2.0), g.norm(1.0 + rho * rho)))
}

fn hyper(s: &Subject, p: &CheckParams) -> Evaluation {
    let mut m = Margin::new();
    let mut ratio = None;
    let mut record = |m: &mut Margin, lhs: f64, rhs: f64, at: &dyn Fn() -> String| {
        m.le(lhs, rhs, at);
        if rhs > 0.0 {
            max_opt(&mut ratio, lhs / rhs);
        }
    };
    match s {
        Subject::Real(g) => {
            for &rho in &p.rho_grid {
                match hypercontractivity_sides(g, rho) {
                    Ok((l, r)) => record(&mut m, l, r, &|| format!("rho={rho}")),
                    Err(e) => return Evaluation::fail(e.to_string()),
                }
            }
        }
        Subject::Boolean(b) => {
            let g = b.f.to_real();
            let w: Vec<f64> = (0..b.spec.len() as u32).map(|m| b.spec.weight(SubsetMask(m))).collect();
            for &rho in &p.rho_grid {
                match hypercontractivity_sides(&g, rho) {
                    Ok((l, r)) => record(&mut m, l, r, &|| format!("g=f rho={rho}")),
                    Err(e) => return Evaluation::fail(e.to_string()),
                }
                // ∂_k f takes values in {-1, 0, 1}: ||∂_k f||_q^q = I_k
                let q = 1.0 + rho * rho;
                let r2 = rho * rho;
                for k in 0..b.f.n() {
                    let bit = 1usize << k;
                    let lhs2: f64 = w
                        .iter()
                        .enumerate()
                        .filter(|(m, _)| m & bit != 0)
                        .map(|(m, &v)| r2.powi(m.count_ones() as i32) * v)
                        .sum();
                    let ik = b.profile.per_bit[k as usize].to_f64();
                    record(&mut m, lhs2.sqrt(), ik.powf(1.0 / q), &|| format!("g=∂_{} f rho={rho}", k + 1));
                }
            }
        }
    }
    m.finish(ratio)
}

fn kkl_edge(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    if !b.mean_is_zero() {
        return Evaluation::skipped("hypothesis: E f != 0");
    }
    let total = b.profile.total;
    let max_ik = b.profile.per_bit.iter().copied().max().unwrap_or(Dyadic::ZERO);
    let observed = -max_ik.to_f64().ln() / total.to_f64();
    if total < Dyadic::ONE {
        let r = format!("balanced function with I(f) = {total} < 1");
        return Evaluation { params: r.clone(), ..Evaluation::fail(r) };
    }
    Evaluation { slack: Some((total - Dyadic::ONE).to_f64()), observed: Some(observed), ..Evaluation::pass() }
}

fn kkl(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    let n = b.f.n();
    if b.f.is_constant() {
        return Evaluation::skipped("constant function");
    }
    if n < 2 {
        return Evaluation::skipped("needs n >= 2");
    }
    let var = Dyadic::ONE - b.spec.exact_weight(SubsetMask::EMPTY).expect("exact");
    let max_ik = b.profile.per_bit.iter().copied().max().unwrap_or(Dyadic::ZERO);
    let c = max_ik.to_f64() * n as f64 / (var.to_f64() * (n as f64).ln());
    Evaluation { observed: Some(c), ..Evaluation::pass() }
}

fn friedgut(s: &Subject, p: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    if b.f.is_constant() {
        return Evaluation::skipped("constant function");
    }
    let mut m = Margin::new();
    let mut ratio = None;
    for &eps in &p.friedgut_eps {
        match junta_set(&b.spec, &b.profile, eps) {
            Ok(j) => {
                let leaked = j.leaked_weight.to_f64();
                m.le(leaked, 2.0 * eps, || format!("eps={eps} J={} cap={}", j.junta.to_set_string(), j.degree_cap));
                max_opt(&mut ratio, leaked / (2.0 * eps));
            }
            Err(e) => return Evaluation::fail(e.to_string()),
        }
    }
    m.finish(ratio)
}

fn fmei_quad(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    if b.f.is_constant() {
        return Evaluation::skipped("constant function");
    }
    let total = b.profile.total.to_f64();
    let c = -b.min_entropy.max_coef.ln() / (total * total);
    if b.profile.total < Dyadic::ONE {
        return Evaluation { note: Some(format!("I(f) < 1: c = {c} reported only")), ..Evaluation::pass() };
    }
    let j = match junta_set(&b.spec, &b.profile, 0.25) {
        Ok(j) => j,
        Err(e) => return Evaluation::fail(e.to_string()),
    };
    let mut m = Margin::new();
    let max_sq = b.min_entropy.max_coef * b.min_entropy.max_coef;
    m.le(1.0 / (2.0 * j.family_size as f64), max_sq, || format!("eps=1/4 |A|={}", j.family_size));
    m.finish(Some(c))
}

fn dsf_spectrum(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    let n = b.f.n();
    let all = n <= 8;
    for mask in 1..b.f.len() as u32 {
        let set = SubsetMask(mask);
        if !all && set.len() > 2 {
            continue;
        }
        let comb = influence(&b.f, set, InfluenceMethod::Combinatorial).expect("valid set");
        let spc = Dyadic::new(b.zeta[mask as usize] as i128, 2 * n);
        if comb != spc {
            return exact(false, || format!("S={}: E(∂_S f)^2 = {comb}, superset weight {spc}", set.to_set_string()));
        }
    }
    let mut ev = exact(true, String::new);
    ev.note = (!all).then(|| "sets with |S| <= 2".to_string());
    ev
}

fn second_order_pivotal(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    let n = b.f.n();
    for k in 0..n {
        for l in k + 1..n {
            let piv = Dyadic::new(pivotal_pair_count(&b.f, k, l) as i128, n);
            let spc = Dyadic::new(b.zeta[(1usize << k) | (1usize << l)] as i128, 2 * n);
            if piv != spc {
                return exact(false, || format!("k={} l={}: P(both pivotal) = {piv}, I_kl = {spc}", k + 1, l + 1));
            }
        }
    }
    exact(true, String::new)
}

fn moment_ids(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    let ids = moment_identities(&b.f, &b.spec, &b.zeta);
    exact(ids.holds(), || {
        format!("influence {:?} pivotal {:?} spectral {:?}", ids.influence_side, ids.pivotal_side, ids.spectral_side)
    })
}

fn plogp_bound(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    let lhs = b.profile.plogp_sum_nat();
    let rhs = 2.0 * b.profile.second_moment.to_f64();
    let mut m = Margin::new();
    m.le(lhs, rhs, || "natural log".into());
    m.finish((rhs > 0.0).then(|| lhs / rhs))
}

fn fmei_degree(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    let d = b.degree;
    if d == 0 {
        return Evaluation::skipped("degree 0");
    }
    let ln_max_sq = 2.0 * b.min_entropy.max_coef.ln();
    let ln2 = std::f64::consts::LN_2;
    let bound = -ln2 - (10.0 * d as f64 * ln2 + (-10.0 * d as f64 * ln2).exp().ln_1p());
    let mut m = Margin::new();
    m.le(bound, ln_max_sq, || format!("deg={d}, log domain"));
    m.finish(Some(-b.min_entropy.max_coef.ln() / d as f64))
}

fn compose_degree(s: &Subject, p: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    let g = &p.compose_partner;
    if b.f.is_constant() {
        return Evaluation::skipped("constant function");
    }
    if b.f.n() as u64 * g.n() as u64 > DEFAULT_MAX_DIM as u64 {
        return Evaluation::skipped("composition exceeds the dimension cap");
    }
    let h = match compose(&b.f, g) {
        Ok(h) => h,
        Err(e) => return Evaluation::fail(e.to_string()),
    };
    let (df, dg, dh) = (b.degree, transform(g).degree(), transform(&h).degree());
    let params = format!("g={} deg f={df} deg g={dg} deg f_g={dh}", crate::bfn1::serialize(g).replace('\n', " "));
    if dh > df * dg {
        return Evaluation { params: params.clone(), ..Evaluation::fail(format!("deg(f_g) > deg f deg g: {params}")) };
    }
    let status = if dh == df * dg { Status::Pass } else { Status::Warn(format!("strict inequality: {params}")) };
    Evaluation { status, slack: Some((df * dg - dh) as f64), params, ..Evaluation::pass() }
}

fn restriction_identity(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    let n = b.f.n();
    let full = SubsetMask::full(n);
    let sets: Vec<SubsetMask> = if n <= 6 {
        (1..1u32 << n).map(SubsetMask).collect()
    } else {
        std::iter::once(full).chain((0..n).map(SubsetMask::singleton)).collect()
    };
    for j in sets {
        for k in j.bits() {
            let r = restricted_influence(&b.f, j, k).expect("k in J");
            if r != b.profile.per_bit[k as usize] {
                return exact(false, || {
                    format!("J={} k={}: {r} vs I_k = {}", j.to_set_string(), k + 1, b.profile.per_bit[k as usize])
                });
            }
        }
    }
    let mut ev = exact(true, String::new);
    ev.note = (n > 6).then(|| "J = [n] and singletons".to_string());
    ev
}

/// `(lhs, rhs)` of the two-point inequality for `0 <= a <= b <= 1`.
pub fn two_point_sides(a: f64, b: f64, eps: f64) -> (f64, f64) {
    let p = 2.0 * (1.0 + eps);
    let (sa, sb) = (a.sqrt(), b.sqrt());
    let lhs = ((sb + sa).powf(p) + (sb - sa).powf(p)) / 2.0 - a.powf(1.0 + eps) - b.powf(1.0 + eps);
    let rhs = (3.0 * eps + 2.0 * eps * eps) * a + (b.powf(eps) - a.powf(eps)) * a;
    (lhs, rhs)
}

fn two_point(_: &Subject, p: &CheckParams) -> Evaluation {
    let mut m = Margin::new();
    for &eps in &p.eps_grid {
        for i in 0..=20 {
            for j in i..=20 {
                let (a, b) = (i as f64 / 20.0, j as f64 / 20.0);
                let (l, r) = two_point_sides(a, b, eps);
                m.le(l, r, || format!("a={a} b={b} eps={eps}"));
            }
        }
    }
    m.finish(None)
}

/// `-I_k (3 eps + 2 eps^2 + (I_k/4)^-eps - 1)`, zero when `I_k = 0`.
pub fn moment_step_rhs(ik: f64, eps: f64) -> f64 {
    if ik == 0.0 {
        return 0.0;
    }
    -ik * (3.0 * eps + 2.0 * eps * eps + (ik / 4.0).powf(-eps) - 1.0)
}

fn moment_step(s: &Subject, p: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    let n = b.f.n();
    let all = n <= 8;
    let sets: Vec<u32> = if all { (0..1u32 << n).collect() } else { (0..=n).map(|k| (1u32 << k) - 1).collect() };
    let mut moments = vec![Vec::new(); if all { 1usize << n } else { 0 }];
    let mut prefix = Vec::new();
    for &v in &sets {
        let rc = match RestrictedCoefficients::new(&b.f, SubsetMask(v)) {
            Ok(rc) => rc,
            Err(e) => return Evaluation::fail(e.to_string()),
        };
        let row: Vec<f64> = p.eps_grid.iter().map(|&e| rc.moment(e).expect("eps validated")).collect();
        if all {
            moments[v as usize] = row;
        } else {
            prefix.push(row);
        }
    }
    let lookup = |v: u32| -> &Vec<f64> {
        if all {
            &moments[v as usize]
        } else {
            &prefix[v.count_ones() as usize]
        }
    };
    let mut m = Margin::new();
    for &v1 in &sets {
        for k in 0..n {
            if v1 >> k & 1 == 1 || (!all && v1 != (1u32 << k) - 1) {
                continue;
            }
            let v2 = v1 | 1 << k;
            let ik = b.profile.per_bit[k as usize].to_f64();
            for (e, &eps) in p.eps_grid.iter().enumerate() {
                let lhs = lookup(v2)[e] - lookup(v1)[e];
                m.le(moment_step_rhs(ik, eps), lhs, || {
                    format!("V1={} k={} eps={eps}", SubsetMask(v1).to_set_string(), k + 1)
                });
            }
        }
    }
    let mut ev = m.finish(None);
    ev.note = (!all).then(|| "V1 = [k-1] chain".to_string());
    ev
}

/// `Σ_k I_k ln(4 / I_k)` with zero influences dropped.
fn log_four_sum(b: &BooleanSubject) -> f64 {
    b.profile.per_bit.iter().map(|d| d.to_f64()).filter(|&v| v > 0.0).map(|v| v * (4.0 / v).ln()).sum()
}

fn ent_bound(s: &Subject, p: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    let ln2 = std::f64::consts::LN_2;
    let total = b.profile.total.to_f64();
    let rhs = (3.0 * total + log_four_sum(b)) / ln2;
    let mut m = Margin::new();
    m.le(b.ent_bits, rhs, || "Ent vs explicit bound".into());
    for &eps in &p.eps_grid {
        let lower = 1.0
            - (3.0 * eps + 2.0 * eps * eps) * total
            - b.profile.per_bit.iter().map(|d| d.to_f64()).filter(|&v| v > 0.0).map(|v| ((v / 4.0).powf(-eps) - 1.0) * v).sum::<f64>();
        m.le(lower, spectral_power_sum(&b.spec, eps), || format!("M_[n] lower bound eps={eps}"));
    }
    let ev = m.finish((rhs > 0.0).then(|| b.ent_bits / rhs));
    if ev.status.is_fail() {
        return ev;
    }
    match entropy_from_moment_derivative(&b.f, 1e-5) {
        Ok(d) if (d - b.ent_bits).abs() <= 1e-4 * b.ent_bits + 1e-9 => ev,
        Ok(d) => {
            let r = format!("moment derivative gives {d}, Ent = {}", b.ent_bits);
            Evaluation { params: r.clone(), ..Evaluation::fail(r) }
        }
        Err(e) => Evaluation::fail(e.to_string()),
    }
}

fn ent_moment_bound(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    let second = b.profile.second_moment.to_f64();
    let mut m = Margin::new();
    m.le(b.ent_bits, ENT_MOMENT_CONSTANT * second, || "conservative constant".into());
    m.finish((second > 0.0).then(|| b.ent_bits / second))
}

fn fei_ratio(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    if b.profile.total.is_zero() {
        return Evaluation::skipped("I(f) = 0");
    }
    Evaluation { observed: Some(b.ent_bits / b.profile.total.to_f64()), ..Evaluation::pass() }
}

fn fmei_ratio(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    if b.profile.total.is_zero() {
        return Evaluation::skipped("I(f) = 0");
    }
    let max_sq = b.min_entropy.max_coef * b.min_entropy.max_coef;
    Evaluation { observed: Some(-max_sq.ln() / (2.0 * b.profile.total.to_f64())), ..Evaluation::pass() }
}

fn markov_tail_check(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    if !b.mean_is_zero() {
        return Evaluation::skipped("hypothesis: E f != 0");
    }
    let tail = markov_tail(&b.spec, b.profile.total).expect("exact");
    let half = Dyadic::new(1, 1);
    let mut ev = exact(tail <= half, || format!("tail weight {tail} > 1/2"));
    ev.slack = Some((half - tail).to_f64());
    ev
}

fn monotone_structure(s: &Subject, _: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    if !b.f.is_monotone() {
        return Evaluation::skipped("hypothesis: not monotone");
    }
    let n = b.f.n();
    for k in 0..n {
        let c = b.spec.exact_coefficient(SubsetMask::singleton(k)).expect("exact");
        if c != b.profile.per_bit[k as usize] {
            return exact(false, || format!("k={}: f̂({{k}}) = {c}, I_k = {}", k + 1, b.profile.per_bit[k as usize]));
        }
    }
    for k in 0..n {
        for l in k + 1..n {
            let set = SubsetMask((1 << k) | (1 << l));
            if let Some(v) = derivative_scaled(&b.f, set).into_iter().find(|v| !matches!(v, 0 | 2 | -2)) {
                return exact(false, || format!("S={}: 4 ∂_S f takes value {v}", set.to_set_string()));
            }
        }
    }
    exact(true, String::new)
}

fn spectral_sample(s: &Subject, p: &CheckParams) -> Evaluation {
    let b = boolean!(s);
    let dist = match b.spec.sample_distribution() {
        Ok(d) => d,
        Err(e) => return Evaluation::fail(e.to_string()),
    };
    let mut counts = vec![0u64; b.spec.len()];
    for m in dist.draw(p.sample_seed, p.sample_count) {
        counts[m.0 as usize] += 1;
    }
    let total = p.sample_count as f64;
    let mut worst = 0.0f64;
    for (mask, &c) in counts.iter().enumerate() {
        let prob = dist.probability(SubsetMask(mask as u32)).to_f64();
        if prob == 0.0 && c > 0 {
            let r = format!("sampled zero-weight set {}", SubsetMask(mask as u32).to_set_string());
            return Evaluation { params: r.clone(), ..Evaluation::fail(r) };
        }
        let sd = (total * prob * (1.0 - prob)).sqrt();
        worst = worst.max((c as f64 - total * prob).abs() / (sd + 1.0 / 5.0));
    }
    let params = format!("seed={} count={}", p.sample_seed, p.sample_count);
    if worst > 5.0 {
        return Evaluation { status: Status::Warn(format!("deviation of {worst:.2} sd")), params, ..Evaluation::pass() };
    }
    Evaluation { params, ..Evaluation::pass() }
}
