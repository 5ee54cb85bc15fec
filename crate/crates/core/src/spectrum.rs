//! Fourier–Walsh spectra.
//!
//! Boolean sources are transformed in integer arithmetic: the stored value at
//! mask `S` is `2^n * f̂(S)`, so every derived quantity stays exact.

use std::ops::{Add, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::cube::{PseudoBooleanFunction, SubsetMask, TruthTable};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Threshold below which a real-mode coefficient counts as zero.
pub const REAL_ZERO: f64 = 1e-12;

/// In-place unnormalized Walsh–Hadamard butterfly. `data.len()` must be a
/// power of two.
pub fn fwht<T: Copy + Add<Output = T> + Sub<Output = T>>(data: &mut [T]) {
    let len = data.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Coefficients {
    /// `2^n * f̂(S)`.
    Exact(Vec<i64>),
    /// `f̂(S)`.
    Real(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: u32,
    coeffs: Coefficients,
}

/// Exact spectrum of a Boolean function.
pub fn transform(f: &TruthTable) -> Spectrum {
    let mut data = f.to_signs();
    fwht(&mut data);
    Spectrum { n: f.n(), coeffs: Coefficients::Exact(data) }
}

/// Real-mode spectrum of a real-valued function.
pub fn transform_real(f: &PseudoBooleanFunction) -> Spectrum {
    let mut data = f.values().to_vec();
    fwht(&mut data);
    let scale = (-(f.n() as f64)).exp2();
    data.iter_mut().for_each(|v| *v *= scale);
    Spectrum { n: f.n(), coeffs: Coefficients::Real(data) }
}

impl Spectrum {
    /// Real-mode spectrum from explicit coefficients `f̂(S)`.
    pub fn from_real_coefficients(coeffs: Vec<f64>) -> Result<Self> {
        if !coeffs.len().is_power_of_two() {
            return Err(Error::InvalidParam("coefficient count is not a power of two".into()));
        }
        Ok(Spectrum { n: coeffs.len().trailing_zeros(), coeffs: Coefficients::Real(coeffs) })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.coeffs, Coefficients::Exact(_))
    }

    /// `2^n f̂(S)` for every mask, exact mode only.
    pub fn scaled(&self) -> Option<&[i64]> {
        match &self.coeffs {
            Coefficients::Exact(v) => Some(v),
            Coefficients::Real(_) => None,
        }
    }

    fn require_exact(&self) -> Result<&[i64]> {
        self.scaled().ok_or(Error::NotNormalized)
    }

    pub fn coefficient(&self, s: SubsetMask) -> f64 {
        match &self.coeffs {
            Coefficients::Exact(v) => v[s.0 as usize] as f64 * (-(self.n as f64)).exp2(),
            Coefficients::Real(v) => v[s.0 as usize],
        }
    }

    pub fn coefficients(&self) -> Vec<f64> {
        (0..self.len() as u32).map(|s| self.coefficient(SubsetMask(s))).collect()
    }

    pub fn exact_coefficient(&self, s: SubsetMask) -> Option<Dyadic> {
        self.scaled().map(|v| Dyadic::new(v[s.0 as usize] as i128, self.n))
    }

    /// `f̂(S)^2` as a float (exact for Boolean sources up to n = 26).
    pub fn weight(&self, s: SubsetMask) -> f64 {
        match &self.coeffs {
            Coefficients::Exact(v) => {
                let c = v[s.0 as usize] as f64;
                c * c * (-2.0 * self.n as f64).exp2()
            }
            Coefficients::Real(v) => v[s.0 as usize] * v[s.0 as usize],
        }
    }

    pub fn exact_weight(&self, s: SubsetMask) -> Option<Dyadic> {
        self.scaled().map(|v| {
            let c = v[s.0 as usize] as i128;
            Dyadic::new(c * c, 2 * self.n)
        })
    }

    /// `(2^n f̂(S))^2` for every mask: weights over the common denominator `4^n`.
    pub fn weight_numerators(&self) -> Result<Vec<i64>> {
        Ok(self.require_exact()?.iter().map(|c| c * c).collect())
    }

    /// `Σ_S f̂(S)^2`.
    pub fn total_weight(&self) -> f64 {
        (0..self.len() as u32).map(|s| self.weight(SubsetMask(s))).sum()
    }

    /// Exact Parseval residue `Σ (2^n f̂)^2 - 4^n`.
    pub fn parseval_residue(&self) -> Result<i128> {
        let sum: i128 = self.require_exact()?.iter().map(|&c| (c as i128) * (c as i128)).sum();
        Ok(sum - (1i128 << (2 * self.n)))
    }

    pub fn inverse(&self) -> PseudoBooleanFunction {
        let mut data = self.coefficients();
        fwht(&mut data);
        PseudoBooleanFunction::from_parts(self.n, data)
    }

    /// Exact inverse; fails if the coefficients do not describe a `±1` table.
    pub fn inverse_exact(&self) -> Result<TruthTable> {
        let mut data = self.require_exact()?.to_vec();
        fwht(&mut data);
        let scale = 1i64 << self.n;
        let mut signs = Vec::with_capacity(data.len());
        for v in data {
            match v / scale {
                1 if v % scale == 0 => signs.push(1),
                -1 if v % scale == 0 => signs.push(-1),
                _ => return Err(Error::InvalidParam("spectrum is not that of a Boolean function".into())),
            }
        }
        TruthTable::from_signs(&signs)
    }

    /// `max {|S| : f̂(S) != 0}`, 0 for constants.
    pub fn degree(&self) -> u32 {
        let nonzero = |s: usize| match &self.coeffs {
            Coefficients::Exact(v) => v[s] != 0,
            Coefficients::Real(v) => v[s].abs() > REAL_ZERO,
        };
        (0..self.len()).filter(|&s| nonzero(s)).map(|s| s.count_ones()).max().unwrap_or(0)
    }

    /// `E|S_f|^k = Σ |S|^k f̂(S)^2`, exact. Defined for every `k >= 1`; only
    /// `k = 1, 2` have a pivotal-set counterpart.
    pub fn sample_moment(&self, k: u32) -> Result<Dyadic> {
        let v = self.require_exact()?;
        let num: i128 = v
            .iter()
            .enumerate()
            .map(|(s, &c)| (s.count_ones() as i128).pow(k) * (c as i128) * (c as i128))
            .sum();
        Ok(Dyadic::new(num, 2 * self.n))
    }

    /// `Σ_S f̂(S) Π_{i∈S} p_i`: expectation under independent bits with
    /// `P(y_i = 1) = (1 + p_i) / 2`. One pass per coordinate, O(n 2^n).
    pub fn biased_expectation(&self, p: &[f64]) -> Result<f64> {
        if p.len() != self.n as usize {
            return Err(Error::InvalidParam(format!("need {} biases, got {}", self.n, p.len())));
        }
        if let Some(bad) = p.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(Error::InvalidParam(format!("bias {bad} outside [-1, 1]")));
        }
        let mut acc = self.coefficients();
        for (i, &pi) in p.iter().enumerate() {
            let bit = 1usize << i;
            for s in 0..acc.len() {
                if s & bit == 0 {
                    acc[s] += pi * acc[s | bit];
                }
            }
        }
        Ok(acc[0])
    }

    /// `Σ_i f̂({i})`: derivative of `P(f = 1)` in the common bias `p` at 1/2.
    pub fn russo_derivative(&self) -> Result<Dyadic> {
        let v = self.require_exact()?;
        Ok((0..self.n).map(|i| Dyadic::new(v[1usize << i] as i128, self.n)).sum())
    }

    pub fn sample_distribution(&self) -> Result<SpectralSampleDist> {
        SpectralSampleDist::new(self)
    }
}

/// JSON export: mask (decimal string) to the reduced coefficient, in mask order.
impl Serialize for Spectrum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.len()))?;
        match &self.coeffs {
            Coefficients::Exact(v) => {
                for (mask, &c) in v.iter().enumerate() {
                    map.serialize_entry(&mask.to_string(), &Dyadic::new(c as i128, self.n))?;
                }
            }
            Coefficients::Real(v) => {
                for (mask, &c) in v.iter().enumerate() {
                    map.serialize_entry(&mask.to_string(), &crate::render::round12(c))?;
                }
            }
        }
        map.end()
    }
}

/// Distribution of the spectral sample `P(S_f = S) = f̂(S)^2`, held as
/// integer numerators over `4^n` so sampling is exact CDF inversion.
#[derive(Debug, Clone)]
pub struct SpectralSampleDist {
    n: u32,
    cumulative: Vec<u64>,
}

impl SpectralSampleDist {
    pub fn new(spec: &Spectrum) -> Result<Self> {
        let weights = spec.weight_numerators()?;
        let mut acc = 0u64;
        let cumulative: Vec<u64> = weights
            .iter()
            .map(|&w| {
                acc += w as u64;
                acc
            })
            .collect();
        if acc != 1u64 << (2 * spec.n()) {
            return Err(Error::NotNormalized);
        }
        Ok(SpectralSampleDist { n: spec.n(), cumulative })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn probability(&self, s: SubsetMask) -> Dyadic {
        let i = s.0 as usize;
        let prev = if i == 0 { 0 } else { self.cumulative[i - 1] };
        Dyadic::new((self.cumulative[i] - prev) as i128, 2 * self.n)
    }

    /// Inverse-CDF draws; deterministic for a given seed.
    pub fn draw(&self, seed: u64, count: usize) -> Vec<SubsetMask> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total = 1u64 << (2 * self.n);
        (0..count)
            .map(|_| {
                let u = rng.random_range(0..total);
                SubsetMask(self.cumulative.partition_point(|&c| c <= u) as u32)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;
    use proptest::prelude::*;

    /// O(4^n) definition: `Σ_x f(x) X_S(x)`.
    fn naive(f: &TruthTable) -> Vec<i64> {
        let len = f.len() as u32;
        (0..len)
            .map(|s| (0..len).map(|x| f.sign(x) * crate::cube::character(SubsetMask(s), crate::cube::PointIndex(x))).sum())
            .collect()
    }

    #[test]
    fn and3_closed_form() {
        let spec = transform(&make_and(3).unwrap());
        let v = spec.scaled().unwrap();
        assert_eq!(v[0], -6);
        assert!(v[1..].iter().all(|&c| c == 2));
        assert_eq!(spec.exact_coefficient(SubsetMask(0)).unwrap(), Dyadic::new(-3, 2));
    }

    #[test]
    fn parity_is_a_basis_vector() {
        let s = SubsetMask(0b1011);
        let spec = transform(&make_parity(5, s).unwrap());
        for m in 0..32 {
            let expect = if m == s.0 { 1.0 } else { 0.0 };
            assert_eq!(spec.coefficient(SubsetMask(m)), expect);
        }
    }

    #[test]
    fn degrees() {
        for k in 1..=5 {
            let f = make_parity(6, SubsetMask::full(k)).unwrap();
            assert_eq!(transform(&f).degree(), k);
        }
        assert_eq!(transform(&TruthTable::constant(3, 1).unwrap()).degree(), 0);
        assert_eq!(transform(&make_example_h()).degree(), 2);
    }

    #[test]
    fn majority3_spectrum() {
        let spec = transform(&make_majority(3).unwrap());
        for i in 0..3 {
            assert_eq!(spec.coefficient(SubsetMask(1 << i)), 0.5);
        }
        assert_eq!(spec.coefficient(SubsetMask(0b111)), -0.5);
        assert_eq!(spec.sample_moment(2).unwrap(), Dyadic::from_int(3));
    }

    #[test]
    fn parity_moments() {
        let spec = transform(&make_parity(4, SubsetMask::full(4)).unwrap());
        assert_eq!(spec.sample_moment(1).unwrap(), Dyadic::from_int(4));
        assert_eq!(spec.sample_moment(2).unwrap(), Dyadic::from_int(16));
        assert_eq!(spec.sample_moment(3).unwrap(), Dyadic::from_int(64));
    }

    #[test]
    fn real_mode_rejects_moments() {
        let f = make_random_real(3, 1, RealDistribution::Normal).unwrap();
        let spec = transform_real(&f);
        assert_eq!(spec.sample_moment(1), Err(Error::NotNormalized));
        assert!(spec.sample_distribution().is_err());
    }

    #[test]
    fn biased_expectation_examples() {
        let and3 = make_and(3).unwrap();
        let spec = transform(&and3);
        assert_eq!(spec.biased_expectation(&[0.0; 3]).unwrap(), spec.coefficient(SubsetMask(0)));
        assert_eq!(spec.biased_expectation(&[1.0; 3]).unwrap(), 1.0);
        // 2 * (3/4)^3 - 1 = -5/32
        let got = spec.biased_expectation(&[0.5; 3]).unwrap();
        assert!((got - (-5.0 / 32.0)).abs() < 1e-15);
        assert!(spec.biased_expectation(&[0.5; 2]).is_err());
        assert!(spec.biased_expectation(&[1.5, 0.0, 0.0]).is_err());
    }

    #[test]
    fn biased_expectation_matches_enumeration() {
        for seed in 0..20 {
            let f = make_random(5, seed).unwrap();
            let p = [0.3, -0.7, 0.1, 0.9, -0.2];
            let direct: f64 = (0..32u32)
                .map(|x| {
                    let prob: f64 = (0..5).map(|i| if x >> i & 1 == 0 { (1.0 + p[i]) / 2.0 } else { (1.0 - p[i]) / 2.0 }).product();
                    prob * f.sign(x) as f64
                })
                .sum();
            let got = transform(&f).biased_expectation(&p).unwrap();
            assert!((got - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn russo_examples() {
        assert_eq!(transform(&make_and(3).unwrap()).russo_derivative().unwrap(), Dyadic::new(3, 2));
        assert_eq!(transform(&make_parity(2, SubsetMask(3)).unwrap()).russo_derivative().unwrap(), Dyadic::ZERO);
    }

    #[test]
    fn fwht_matches_naive_definition() {
        for seed in 0..50u64 {
            let n = 1 + (seed % 8) as u32;
            let f = make_random(n, seed).unwrap();
            assert_eq!(transform(&f).scaled().unwrap(), naive(&f).as_slice());
        }
    }

    #[test]
    fn inverse_round_trips() {
        for seed in 0..10 {
            let f = make_random(6, seed).unwrap();
            assert_eq!(transform(&f).inverse_exact().unwrap(), f);
            let g = make_random_real(5, seed, RealDistribution::Uniform).unwrap();
            let back = transform_real(&g).inverse();
            for (a, b) in back.values().iter().zip(g.values()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn variance_identity() {
        for seed in 0..30 {
            let f = make_random(4, seed).unwrap();
            let spec = transform(&f);
            let var: Dyadic = (1..16).map(|s| spec.exact_weight(SubsetMask(s)).unwrap()).sum();
            let mean = spec.exact_coefficient(SubsetMask(0)).unwrap();
            assert_eq!(var, Dyadic::ONE - mean * mean);
        }
    }

    #[test]
    fn spectral_sampling_parity_and_majority() {
        let par = transform(&make_parity(3, SubsetMask(7)).unwrap()).sample_distribution().unwrap();
        assert!(par.draw(5, 100).iter().all(|s| *s == SubsetMask(7)));
        assert_eq!(par.draw(5, 0), vec![]);

        let maj = transform(&make_majority(3).unwrap()).sample_distribution().unwrap();
        let draws = maj.draw(11, 100_000);
        assert_eq!(draws, maj.draw(11, 100_000));
        for s in [1u32, 2, 4, 7] {
            let freq = draws.iter().filter(|d| d.0 == s).count() as f64 / 1e5;
            let sigma = (0.25f64 * 0.75 / 1e5).sqrt();
            assert!((freq - 0.25).abs() < 5.0 * sigma, "mask {s}: {freq}");
        }
        assert!(draws.iter().all(|d| [1, 2, 4, 7].contains(&d.0)));
    }

    #[test]
    fn export_json() {
        let spec = transform(&make_and(2).unwrap());
        let js = serde_json::to_string(&spec).unwrap();
        let half = r#"{"exact":"1/2","num":1,"den":2,"decimal":0.5}"#;
        let expect = format!(r#"{{"0":{},"1":{half},"2":{half},"3":{half}}}"#, r#"{"exact":"-1/2","num":-1,"den":2,"decimal":-0.5}"#);
        assert_eq!(js, expect);
    }

    proptest! {
        #[test]
        fn parseval_exact(n in 1u32..=10, seed in any::<u64>()) {
            let spec = transform(&make_random(n, seed).unwrap());
            prop_assert_eq!(spec.parseval_residue().unwrap(), 0);
        }

        #[test]
        fn first_moment_is_total_influence(n in 1u32..=6, seed in any::<u64>()) {
            let f = make_random(n, seed).unwrap();
            let spec = transform(&f);
            let pivotal: u64 = (0..f.len() as u32)
                .map(|x| (0..n).filter(|k| f.is_minus(x) != f.is_minus(x ^ (1 << k))).count() as u64)
                .sum();
            prop_assert_eq!(spec.sample_moment(1).unwrap(), Dyadic::new(pivotal as i128, n));
        }
    }
}
