//! Operators on functions: pivotality, discrete derivatives, influences of
//! every order, the noise operator, restrictions and restricted-coefficient
//! moments.

use serde::Serialize;

use crate::cube::{deposit_table, PointIndex, PseudoBooleanFunction, SubsetMask, TruthTable};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::spectrum::{fwht, transform, transform_real, Spectrum};

/// `P(x) = {k : f(x) != f(mu_k(x))}`.
pub fn pivotal_set(f: &TruthTable, x: PointIndex) -> SubsetMask {
    let v = f.is_minus(x.0);
    SubsetMask((0..f.n()).fold(0, |m, k| m | ((f.is_minus(x.0 ^ 1 << k) != v) as u32) << k))
}

/// Number of points at which each coordinate is pivotal (`I_k = count / 2^n`).
pub fn pivotal_counts(f: &TruthTable) -> Vec<u64> {
    (0..f.n())
        .map(|k| {
            let bit = 1u32 << k;
            // each pivotal edge is seen from both endpoints
            (0..f.len() as u32).filter(|&x| f.is_minus(x) != f.is_minus(x ^ bit)).count() as u64
        })
        .collect()
}

/// `hist[p]` = number of points with `|P(x)| = p`.
pub fn pivotal_size_histogram(f: &TruthTable) -> Vec<u64> {
    let mut hist = vec![0u64; f.n() as usize + 1];
    for x in 0..f.len() as u32 {
        hist[pivotal_set(f, PointIndex(x)).len() as usize] += 1;
    }
    hist
}

/// Number of points at which both `k` and `l` (0-based) are pivotal.
pub fn pivotal_pair_count(f: &TruthTable, k: u32, l: u32) -> u64 {
    (0..f.len() as u32)
        .filter(|&x| {
            let v = f.is_minus(x);
            f.is_minus(x ^ 1 << k) != v && f.is_minus(x ^ 1 << l) != v
        })
        .count() as u64
}

/// `2^|S| ∂_S f` as integers: `Σ_{T⊆S} (-1)^|T| f(mu_T(x))`.
pub fn derivative_scaled(f: &TruthTable, s: SubsetMask) -> Vec<i64> {
    let mut g = f.to_signs();
    for k in s.bits() {
        difference_in_place(&mut g, 1usize << k);
    }
    g
}

/// `g(x) <- g(x) - g(x ^ bit)` for every `x`.
fn difference_in_place<T: Copy + std::ops::Sub<Output = T>>(g: &mut [T], bit: usize) {
    for x in 0..g.len() {
        if x & bit == 0 {
            let (a, b) = (g[x], g[x | bit]);
            g[x] = a - b;
            g[x | bit] = b - a;
        }
    }
}

/// `∂_S f(x) = 2^-|S| Σ_{T⊆S} (-1)^|T| f(mu_T(x))`; `∂_∅ f = f`.
pub fn derivative(f: &PseudoBooleanFunction, s: SubsetMask) -> Result<PseudoBooleanFunction> {
    s.check(f.n())?;
    let mut g = f.values().to_vec();
    for k in s.bits() {
        difference_in_place(&mut g, 1usize << k);
    }
    let scale = (-(s.len() as f64)).exp2();
    g.iter_mut().for_each(|v| *v *= scale);
    Ok(PseudoBooleanFunction::from_parts(f.n(), g))
}

pub fn derivative_table(f: &TruthTable, s: SubsetMask) -> Result<PseudoBooleanFunction> {
    s.check(f.n())?;
    let scale = (-(s.len() as f64)).exp2();
    let vals = derivative_scaled(f, s).into_iter().map(|v| v as f64 * scale).collect();
    Ok(PseudoBooleanFunction::from_parts(f.n(), vals))
}

/// Superset sums: `out[S] = Σ_{T ⊇ S} w[T]`.
pub fn superset_sums(w: &mut [i64]) {
    let len = w.len();
    let mut bit = 1;
    while bit < len {
        for s in 0..len {
            if s & bit == 0 {
                w[s] += w[s | bit];
            }
        }
        bit <<= 1;
    }
}

/// Every high-order influence as numerators over `4^n`:
/// `out[S] = Σ_{T ⊇ S} (2^n f̂(T))^2`.
pub fn high_order_influence_numerators(spec: &Spectrum) -> Result<Vec<i64>> {
    let mut w = spec.weight_numerators()?;
    superset_sums(&mut w);
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfluenceMethod {
    /// `E (∂_S f)^2` straight from the table.
    Combinatorial,
    /// `Σ_{T ⊇ S} f̂(T)^2`.
    Spectral,
}

/// `I_S(f)` for nonempty `S`.
pub fn influence(f: &TruthTable, s: SubsetMask, method: InfluenceMethod) -> Result<Dyadic> {
    s.check(f.n())?;
    if s.is_empty() {
        return Err(Error::InvalidParam("influence needs a nonempty set".into()));
    }
    let n = f.n();
    Ok(match method {
        InfluenceMethod::Combinatorial => {
            let sum: i128 = derivative_scaled(f, s).iter().map(|&v| (v as i128) * (v as i128)).sum();
            Dyadic::new(sum, n + 2 * s.len())
        }
        InfluenceMethod::Spectral => {
            let spec = transform(f);
            let v = spec.scaled().expect("exact");
            let sum: i128 = (0..f.len())
                .filter(|&t| s.is_subset_of(SubsetMask(t as u32)))
                .map(|t| (v[t] as i128) * (v[t] as i128))
                .sum();
            Dyadic::new(sum, 2 * n)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairInfluence {
    /// 1-based coordinates, `k < l`.
    pub k: u32,
    pub l: u32,
    pub value: Dyadic,
}

/// The four pivotal-set / spectral-sample identities, each side computed
/// independently. Index 0..4: `I`, `I_{d=2}`, `I_{d<=2}`, `2 I_{d=2} + I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentIdentities {
    /// From the high-order influences (`Σ_k I_k`, `Σ_{|S|=2} I_S`, ...).
    pub influence_side: [Dyadic; 4],
    /// Expectations over `|P(x)|`.
    pub pivotal_side: [Dyadic; 4],
    /// Expectations over `|S_f|`.
    pub spectral_side: [Dyadic; 4],
}

impl MomentIdentities {
    pub fn holds(&self) -> bool {
        self.influence_side == self.pivotal_side && self.pivotal_side == self.spectral_side
    }
}

pub fn moment_identities(f: &TruthTable, spec: &Spectrum, zeta: &[i64]) -> MomentIdentities {
    let n = f.n();
    let dy4 = |num: i128| Dyadic::new(num, 2 * n);

    let singles: i128 = (0..n).map(|k| zeta[1usize << k] as i128).sum();
    let pairs: i128 = zeta.iter().enumerate().filter(|(s, _)| s.count_ones() == 2).map(|(_, &v)| v as i128).sum();
    let influence_side = [dy4(singles), dy4(pairs), dy4(singles + pairs), dy4(2 * pairs + singles)];

    let hist = pivotal_size_histogram(f);
    let piv = |g: &dyn Fn(i128) -> i128| -> Dyadic {
        Dyadic::new(hist.iter().enumerate().map(|(p, &c)| g(p as i128) * c as i128).sum(), n)
    };
    let pivotal_side = [piv(&|p| p), piv(&|p| p * (p - 1) / 2), piv(&|p| p * (p + 1) / 2), piv(&|p| p * p)];

    let w = spec.scaled().expect("exact");
    let spc = |g: &dyn Fn(i128) -> i128| -> Dyadic {
        dy4(w.iter().enumerate().map(|(s, &c)| g(s.count_ones() as i128) * (c as i128) * (c as i128)).sum())
    };
    let spectral_side = [spc(&|s| s), spc(&|s| s * (s - 1) / 2), spc(&|s| s * (s + 1) / 2), spc(&|s| s * s)];

    MomentIdentities { influence_side, pivotal_side, spectral_side }
}

/// Everything influence-related about one Boolean function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceProfile {
    pub n: u32,
    /// `I_k`, k = 1..n.
    pub per_bit: Vec<Dyadic>,
    /// `I(f)`.
    pub total: Dyadic,
    /// `I_{k,l}` for every pair.
    pub second_order: Vec<PairInfluence>,
    /// `I_{d=m}` for m = 1..n.
    pub by_degree: Vec<Dyadic>,
    /// `I_{d<=m}` for m = 1..n.
    pub cumulative: Vec<Dyadic>,
    /// `E|S_f|`.
    pub first_moment: Dyadic,
    /// `E|S_f|^2`.
    pub second_moment: Dyadic,
}

/// Builds the profile and re-derives the four moment identities from the
/// pivotal sets; a mismatch means a bug, reported as `InternalIdentity`.
pub fn build_profile(f: &TruthTable) -> Result<InfluenceProfile> {
    let spec = transform(f);
    build_profile_with(f, &spec)
}

pub fn build_profile_with(f: &TruthTable, spec: &Spectrum) -> Result<InfluenceProfile> {
    let n = f.n();
    let zeta = high_order_influence_numerators(spec)?;
    let dy4 = |num: i128| Dyadic::new(num, 2 * n);

    let per_bit: Vec<Dyadic> = (0..n).map(|k| dy4(zeta[1usize << k] as i128)).collect();
    let pivotal: Vec<Dyadic> = pivotal_counts(f).into_iter().map(|c| Dyadic::new(c as i128, n)).collect();
    if per_bit != pivotal {
        return Err(Error::InternalIdentity("per-bit influence: pivotal and spectral values differ".into()));
    }
    let total: Dyadic = per_bit.iter().copied().sum();

    let mut second_order = Vec::with_capacity((n * n.saturating_sub(1) / 2) as usize);
    for k in 0..n {
        for l in k + 1..n {
            second_order.push(PairInfluence { k: k + 1, l: l + 1, value: dy4(zeta[(1usize << k) | (1usize << l)] as i128) });
        }
    }

    let mut by_degree_num = vec![0i128; n as usize + 1];
    for (s, &v) in zeta.iter().enumerate().skip(1) {
        by_degree_num[s.count_ones() as usize] += v as i128;
    }
    let by_degree: Vec<Dyadic> = by_degree_num[1..].iter().map(|&v| dy4(v)).collect();
    let cumulative: Vec<Dyadic> = by_degree
        .iter()
        .scan(Dyadic::ZERO, |acc, &v| {
            *acc = *acc + v;
            Some(*acc)
        })
        .collect();

    let ids = moment_identities(f, spec, &zeta);
    if !ids.holds() {
        return Err(Error::InternalIdentity(format!("moment identities differ: {ids:?}")));
    }
    let first_moment = spec.sample_moment(1)?;
    let second_moment = spec.sample_moment(2)?;
    let second_degree = by_degree.get(1).copied().unwrap_or(Dyadic::ZERO);
    if first_moment != total || by_degree[0] != total || second_moment != second_degree * Dyadic::from_int(2) + total {
        return Err(Error::InternalIdentity("profile totals are inconsistent".into()));
    }

    Ok(InfluenceProfile { n, per_bit, total, second_order, by_degree, cumulative, first_moment, second_moment })
}

impl InfluenceProfile {
    pub fn per_bit_f64(&self) -> Vec<f64> {
        self.per_bit.iter().map(|d| d.to_f64()).collect()
    }

    pub fn pair(&self, k: u32, l: u32) -> Option<Dyadic> {
        let (k, l) = (k.min(l), k.max(l));
        self.second_order.iter().find(|p| p.k == k && p.l == l).map(|p| p.value)
    }

    /// `Σ_k -I_k ln I_k`, with `0 ln 0 = 0`.
    pub fn plogp_sum_nat(&self) -> f64 {
        self.per_bit.iter().map(|d| d.to_f64()).filter(|&v| v > 0.0).map(|v| -v * v.ln()).sum()
    }
}

/// `T_rho f = Σ_S rho^|S| f̂(S) X_S`, computed spectrally.
pub fn noise(f: &PseudoBooleanFunction, rho: f64) -> Result<PseudoBooleanFunction> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParam(format!("noise rate {rho} outside [0, 1]")));
    }
    let spec = transform_real(f);
    let mut c = spec.coefficients();
    let powers: Vec<f64> = (0..=f.n()).map(|d| rho.powi(d as i32)).collect();
    for (s, v) in c.iter_mut().enumerate() {
        *v *= powers[s.count_ones() as usize];
    }
    Ok(Spectrum::from_real_coefficients(c)?.inverse())
}

/// Free coordinates `J` and the pinned values of every coordinate outside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestrictionContext {
    n: u32,
    free: SubsetMask,
    /// Point whose bits outside `free` carry the assignment; bits inside are 0.
    pinned: PointIndex,
}

impl RestrictionContext {
    /// `values` lists `(coordinate (1-based), value in {-1,1})` for exactly
    /// the coordinates outside `free`.
    pub fn new(n: u32, free: SubsetMask, values: &[(u32, i8)]) -> Result<Self> {
        free.check(n)?;
        let mut seen = 0u32;
        let mut pinned = 0u32;
        for &(c, v) in values {
            if c == 0 || c > n || free.contains(c - 1) || seen >> (c - 1) & 1 == 1 {
                return Err(Error::InvalidParam(format!("coordinate {c} cannot be pinned")));
            }
            seen |= 1 << (c - 1);
            match v {
                1 => {}
                -1 => pinned |= 1 << (c - 1),
                _ => return Err(Error::InvalidParam(format!("value {v} not in {{-1,1}}"))),
            }
        }
        if seen | free.0 != SubsetMask::full(n).0 {
            return Err(Error::InvalidParam("assignment does not cover every pinned coordinate".into()));
        }
        Ok(RestrictionContext { n, free, pinned: PointIndex(pinned) })
    }

    /// Pin the coordinates outside `free` to their values in `x`.
    pub fn from_point(n: u32, free: SubsetMask, x: PointIndex) -> Result<Self> {
        free.check(n)?;
        SubsetMask(x.0).check(n)?;
        Ok(RestrictionContext { n, free, pinned: PointIndex(x.0 & !free.0) })
    }

    pub fn free(&self) -> SubsetMask {
        self.free
    }
}

/// `f_{J^c -> x}` over `|J|` variables, free coordinates renumbered in
/// increasing order. `J = ∅` yields the 0-ary constant `f(x)`.
pub fn restrict(f: &TruthTable, ctx: &RestrictionContext) -> Result<TruthTable> {
    if ctx.n != f.n() {
        return Err(Error::InvalidParam(format!("context is for n = {}, function has n = {}", ctx.n, f.n())));
    }
    let dep = deposit_table(ctx.free.0);
    let base = ctx.pinned.0;
    Ok(TruthTable::build(ctx.free.len(), |y| f.is_minus(base | dep[y as usize])))
}

/// Invoke `visit(assignment_index, scaled_coeffs)` for each of the
/// `2^(n-|V|)` pinnings of `V^c`, where `scaled_coeffs[S] = 2^|V| f̂_{V^c->x}(S)`.
fn for_each_restricted_spectrum(f: &TruthTable, free: SubsetMask, mut visit: impl FnMut(usize, &[i64])) {
    let inner = deposit_table(free.0);
    let outer = deposit_table(SubsetMask::full(f.n()).0 & !free.0);
    let mut buf = vec![0i64; inner.len()];
    for (a, &base) in outer.iter().enumerate() {
        for (slot, &d) in buf.iter_mut().zip(&inner) {
            *slot = f.sign(base | d);
        }
        fwht(&mut buf);
        visit(a, &buf);
    }
}

/// `E_x Σ_{k∈S⊆J} f̂_{J^c->x}(S)^2` exactly (`k` 0-based, must lie in `J`).
pub fn restricted_influence(f: &TruthTable, free: SubsetMask, k: u32) -> Result<Dyadic> {
    free.check(f.n())?;
    if !free.contains(k) {
        return Err(Error::InvalidParam(format!("coordinate {} not in the free set", k + 1)));
    }
    // position of k among the free coordinates
    let local = 1usize << (free.0 & ((1u32 << k) - 1)).count_ones();
    let mut sum = 0i128;
    for_each_restricted_spectrum(f, free, |_, c| {
        sum += c.iter().enumerate().filter(|(s, _)| s & local != 0).map(|(_, &v)| (v as i128) * (v as i128)).sum::<i128>();
    });
    let j = free.len();
    Ok(Dyadic::new(sum, 2 * j + (f.n() - j)))
}

/// Histogram of `|2^|V| f̂_{V^c->x}(S)|` over every pinning `x` and `S ⊆ V`.
/// `M_{V,eps}` is a weighted power sum over it.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedCoefficients {
    n: u32,
    free_dim: u32,
    /// `counts[c]` = occurrences of `|scaled coefficient| = c`.
    counts: Vec<u64>,
}

impl RestrictedCoefficients {
    pub fn new(f: &TruthTable, free: SubsetMask) -> Result<Self> {
        free.check(f.n())?;
        let mut counts = vec![0u64; (1usize << free.len()) + 1];
        for_each_restricted_spectrum(f, free, |_, c| {
            for &v in c {
                counts[v.unsigned_abs() as usize] += 1;
            }
        });
        Ok(RestrictedCoefficients { n: f.n(), free_dim: free.len(), counts })
    }

    /// `M_{V,eps}(f)`. Each `|coef|^{2(1+eps)}` is `exp((1+eps) ln coef^2)`
    /// with `coef^2` converted once; zero coefficients contribute 0. Summed
    /// in ascending coefficient order.
    pub fn moment(&self, eps: f64) -> Result<f64> {
        check_moment_eps(eps)?;
        let denom = (2.0 * self.free_dim as f64).exp2();
        let pinnings = ((self.n - self.free_dim) as f64).exp2();
        let total: f64 = self
            .counts
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &cnt)| cnt > 0)
            .map(|(c, &cnt)| {
                let sq = (c as f64) * (c as f64) / denom;
                cnt as f64 * ((1.0 + eps) * sq.ln()).exp()
            })
            .sum();
        Ok(total / pinnings)
    }
}

fn check_moment_eps(eps: f64) -> Result<()> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::InvalidParam(format!("moment parameter {eps} outside [0, 1/2)")));
    }
    Ok(())
}

/// `M_{V,eps}(f) = E_x Σ_{S⊆V} |f̂_{V^c->x}(S)|^{2(1+eps)}`.
pub fn restricted_moment(f: &TruthTable, v: SubsetMask, eps: f64) -> Result<f64> {
    check_moment_eps(eps)?;
    RestrictedCoefficients::new(f, v)?.moment(eps)
}

/// `Σ_S |f̂(S)|^{2(1+eps)}` straight from a spectrum.
pub fn spectral_power_sum(spec: &Spectrum, eps: f64) -> f64 {
    (0..spec.len() as u32)
        .map(|s| spec.weight(SubsetMask(s)))
        .filter(|&w| w > 0.0)
        .map(|w| ((1.0 + eps) * w.ln()).exp())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;
    use proptest::prelude::*;

    fn monotone_functions(n: u32) -> Vec<TruthTable> {
        (0..1u64 << (1u32 << n))
            .map(|b| TruthTable::from_bits(n, b).unwrap())
            .filter(|t| t.is_monotone())
            .collect()
    }

    #[test]
    fn and_pivotal_sets() {
        for n in 2..=6 {
            let f = make_and(n).unwrap();
            assert_eq!(pivotal_set(&f, PointIndex(0)), SubsetMask::full(n));
            assert_eq!(pivotal_set(&f, PointIndex(0b11)), SubsetMask::EMPTY);
        }
    }

    #[test]
    fn parity_derivative_is_parity() {
        let f = make_parity(4, SubsetMask::full(4)).unwrap();
        for k in 0..4 {
            let d = derivative_table(&f, SubsetMask::singleton(k)).unwrap();
            assert_eq!(d, f.to_real());
        }
        assert_eq!(derivative_table(&f, SubsetMask::EMPTY).unwrap(), f.to_real());
    }

    #[test]
    fn derivative_spectrum_is_superset_part() {
        for seed in 0..50u64 {
            let n = 1 + (seed % 6) as u32;
            let f = make_random(n, seed).unwrap();
            let spec = transform(&f);
            for s in 0..1u32 << n {
                let d = derivative_table(&f, SubsetMask(s)).unwrap();
                let ds = transform_real(&d);
                for t in 0..1u32 << n {
                    let expect = if s & !t == 0 { spec.coefficient(SubsetMask(t)) } else { 0.0 };
                    assert_eq!(ds.coefficient(SubsetMask(t)), expect);
                }
            }
        }
    }

    #[test]
    fn derivative_composes() {
        for seed in 0..20u64 {
            let n = 2 + (seed % 5) as u32;
            let f = make_random(n, seed).unwrap().to_real();
            for s in 0..1u32 << n {
                for k in 0..n {
                    if s >> k & 1 == 1 {
                        continue;
                    }
                    let lhs = derivative(&derivative(&f, SubsetMask::singleton(k)).unwrap(), SubsetMask(s)).unwrap();
                    let rhs = derivative(&f, SubsetMask(s | 1 << k)).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn and3_influences() {
        let f = make_and(3).unwrap();
        for k in 0..3 {
            for m in [InfluenceMethod::Combinatorial, InfluenceMethod::Spectral] {
                assert_eq!(influence(&f, SubsetMask::singleton(k), m).unwrap(), Dyadic::new(1, 2));
            }
        }
        assert!(influence(&f, SubsetMask::EMPTY, InfluenceMethod::Spectral).is_err());
    }

    #[test]
    fn influence_methods_agree_exhaustively() {
        for n in 1..=3u32 {
            for b in 0..1u64 << (1u32 << n) {
                let f = TruthTable::from_bits(n, b).unwrap();
                for s in 1..1u32 << n {
                    assert_eq!(
                        influence(&f, SubsetMask(s), InfluenceMethod::Combinatorial).unwrap(),
                        influence(&f, SubsetMask(s), InfluenceMethod::Spectral).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn second_order_is_pair_pivotality() {
        for n in 2..=4u32 {
            for b in (0..1u64 << (1u32 << n)).step_by(7) {
                let f = TruthTable::from_bits(n, b).unwrap();
                let p = build_profile(&f).unwrap();
                for pair in &p.second_order {
                    let c = pivotal_pair_count(&f, pair.k - 1, pair.l - 1);
                    assert_eq!(pair.value, Dyadic::new(c as i128, n));
                }
            }
        }
    }

    #[test]
    fn tribes_pair_influences() {
        let f = make_tribes(TribesParams::new(2, 2).unwrap()).unwrap();
        let p = build_profile(&f).unwrap();
        assert!(p.per_bit.iter().all(|v| *v == Dyadic::new(3, 3)));
        assert_eq!(p.pair(1, 2).unwrap(), Dyadic::new(3, 4));
        // different tribes: brute force gives 1/16
        assert_eq!(p.pair(1, 3).unwrap(), Dyadic::new(1, 4));
    }

    #[test]
    fn profile_examples() {
        let par = build_profile(&make_parity(4, SubsetMask::full(4)).unwrap()).unwrap();
        let binom = [4, 6, 4, 1];
        for (m, b) in binom.iter().enumerate() {
            assert_eq!(par.by_degree[m], Dyadic::from_int(*b));
        }
        let and3 = build_profile(&make_and(3).unwrap()).unwrap();
        assert_eq!(and3.total, Dyadic::new(3, 2));
        assert_eq!(and3.second_moment, and3.by_degree[1] * Dyadic::from_int(2) + and3.total);
        let maj = build_profile(&make_majority(3).unwrap()).unwrap();
        assert_eq!(maj.by_degree[0], Dyadic::new(3, 1));
        assert_eq!(maj.second_moment, Dyadic::from_int(3));
        let one = build_profile(&make_dictator(1, 1).unwrap()).unwrap();
        assert_eq!(one.total, Dyadic::ONE);
        assert_eq!(one.second_moment, Dyadic::ONE);
    }

    #[test]
    fn monotone_structure() {
        for n in 1..=4 {
            for f in monotone_functions(n) {
                let spec = transform(&f);
                let p = build_profile_with(&f, &spec).unwrap();
                for k in 0..n {
                    assert_eq!(p.per_bit[k as usize], spec.exact_coefficient(SubsetMask::singleton(k)).unwrap());
                }
                assert_eq!(spec.russo_derivative().unwrap(), p.total);
                for s in (0..1u32 << n).filter(|s| s.count_ones() == 2) {
                    let d = derivative_scaled(&f, SubsetMask(s));
                    // 4 ∂_S f in {0, ±2}
                    assert!(d.iter().all(|v| v.abs() == 0 || v.abs() == 2));
                }
            }
        }
    }

    #[test]
    fn noise_endpoints() {
        let f = make_random_real(5, 3, RealDistribution::Normal).unwrap();
        let t1 = noise(&f, 1.0).unwrap();
        for (a, b) in t1.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let t0 = noise(&f, 0.0).unwrap();
        assert!(t0.values().iter().all(|v| (v - f.mean()).abs() < 1e-12));
        assert!(noise(&f, 1.1).is_err());
        assert!(noise(&f, -0.1).is_err());
    }

    #[test]
    fn restriction_basics() {
        let f = make_random(4, 8).unwrap();
        let all = RestrictionContext::from_point(4, SubsetMask::full(4), PointIndex(0)).unwrap();
        assert_eq!(restrict(&f, &all).unwrap(), f);
        for x in 0..16 {
            let none = RestrictionContext::from_point(4, SubsetMask::EMPTY, PointIndex(x)).unwrap();
            let r = restrict(&f, &none).unwrap();
            assert_eq!(r.n(), 0);
            assert_eq!(r.sign(0), f.sign(x));
        }
        // pin x_2 = -1, x_4 = +1; free coordinates 1 and 3
        let ctx = RestrictionContext::new(4, SubsetMask(0b0101), &[(2, -1), (4, 1)]).unwrap();
        let r = restrict(&f, &ctx).unwrap();
        for y in 0..4u32 {
            let z = 0b0010 | (y & 1) | (y >> 1 & 1) << 2;
            assert_eq!(r.sign(y), f.sign(z));
        }
        assert!(RestrictionContext::new(4, SubsetMask(0b0101), &[(2, -1)]).is_err());
        assert!(RestrictionContext::new(4, SubsetMask(0b0101), &[(1, -1), (2, 1), (4, 1)]).is_err());
    }

    #[test]
    fn monotone_restrictions_stay_monotone() {
        for n in 1..=4 {
            for f in monotone_functions(n) {
                for j in 0..1u32 << n {
                    for x in 0..1u32 << n {
                        if x & j != 0 {
                            continue;
                        }
                        let ctx = RestrictionContext::from_point(n, SubsetMask(j), PointIndex(x)).unwrap();
                        assert!(restrict(&f, &ctx).unwrap().is_monotone());
                    }
                }
            }
        }
    }

    #[test]
    fn restricted_influence_exhaustive_small() {
        for n in 1..=3u32 {
            for b in 0..1u64 << (1u32 << n) {
                let f = TruthTable::from_bits(n, b).unwrap();
                let counts = pivotal_counts(&f);
                for j in 1..1u32 << n {
                    for k in SubsetMask(j).bits() {
                        let got = restricted_influence(&f, SubsetMask(j), k).unwrap();
                        assert_eq!(got, Dyadic::new(counts[k as usize] as i128, n));
                    }
                }
            }
        }
    }

    #[test]
    fn moment_base_cases() {
        for seed in 0..10 {
            let f = make_random(5, seed).unwrap();
            for v in [0u32, 0b1, 0b10110, 0b11111] {
                assert!((restricted_moment(&f, SubsetMask(v), 0.0).unwrap() - 1.0).abs() < 1e-12);
            }
            for eps in [0.1, 0.25, 0.49] {
                assert!((restricted_moment(&f, SubsetMask::EMPTY, eps).unwrap() - 1.0).abs() < 1e-15);
            }
        }
        let f = make_random(3, 0).unwrap();
        assert!(restricted_moment(&f, SubsetMask(1), 0.5).is_err());
        assert!(restricted_moment(&f, SubsetMask(1), -0.01).is_err());
    }

    #[test]
    fn full_moment_matches_spectral_sum() {
        for seed in 0..20u64 {
            let n = 1 + (seed % 5) as u32;
            let f = make_random(n, seed).unwrap();
            let spec = transform(&f);
            for eps in [0.1, 0.25, 0.4] {
                let a = restricted_moment(&f, SubsetMask::full(n), eps).unwrap();
                let b = spectral_power_sum(&spec, eps);
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    proptest! {
        #[test]
        fn pivotal_mean_is_total_influence(n in 1u32..=6, seed in any::<u64>()) {
            let f = make_random(n, seed).unwrap();
            let hist = pivotal_size_histogram(&f);
            let mean = Dyadic::new(hist.iter().enumerate().map(|(p, &c)| p as i128 * c as i128).sum(), n);
            prop_assert_eq!(mean, build_profile(&f).unwrap().total);
        }

        #[test]
        fn restriction_identity_random(n in 5u32..=6, seed in any::<u64>(), j in any::<u32>()) {
            let f = make_random(n, seed).unwrap();
            let free = SubsetMask(j & SubsetMask::full(n).0);
            let counts = pivotal_counts(&f);
            for k in free.bits() {
                prop_assert_eq!(restricted_influence(&f, free, k).unwrap(), Dyadic::new(counts[k as usize] as i128, n));
            }
        }

        #[test]
        fn restriction_marginalizes_spectrum(n in 2u32..=6, seed in any::<u64>(), j in any::<u32>()) {
            // averaging f̂_{V^c->x}(S) over pinnings gives f̂(S) for S ⊆ V
            let f = make_random(n, seed).unwrap();
            let free = SubsetMask(j & SubsetMask::full(n).0);
            let spec = transform(&f);
            let dep = deposit_table(free.0);
            let mut sums = vec![0i64; dep.len()];
            for_each_restricted_spectrum(&f, free, |_, c| sums.iter_mut().zip(c).for_each(|(s, v)| *s += v));
            for (local, &global) in dep.iter().enumerate() {
                // Σ_pinnings 2^|V| f̂_r = 2^|V| 2^{n-|V|} f̂ = 2^n f̂
                prop_assert_eq!(sums[local], spec.scaled().unwrap()[global as usize]);
            }
        }
    }
}
