//! Points, subsets and function containers on `{-1,1}^n`.
//!
//! Encoding: bit `i` of a point index is 1 iff `x_{i+1} = -1`, so index 0 is
//! the all-`+1` point. Bit `i` of a subset mask is 1 iff `i+1` is in the set.
//! Under these encodings the character `X_S(x)` is
//! `(-1)^popcount(mask & index)` and flipping the coordinates in `T` is
//! `index ^ mask`.

use crate::error::{Error, Result};

/// Default upper bound on the dimension (a 16M-entry table).
pub const DEFAULT_MAX_DIM: u32 = 24;

pub fn check_dim(n: u32, cap: u32) -> Result<()> {
    if n == 0 || n > cap {
        return Err(Error::Dimension { n, cap });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointIndex(pub u32);

impl PointIndex {
    /// Build from explicit coordinates in `{-1, 1}`.
    pub fn from_coords(x: &[i8]) -> Result<Self> {
        let mut idx = 0u32;
        for (i, &xi) in x.iter().enumerate() {
            match xi {
                1 => {}
                -1 => idx |= 1 << i,
                _ => return Err(Error::InvalidParam(format!("coordinate {xi} not in {{-1,1}}"))),
            }
        }
        Ok(PointIndex(idx))
    }

    pub fn coords(self, n: u32) -> Vec<i8> {
        (0..n).map(|i| if self.0 >> i & 1 == 1 { -1 } else { 1 }).collect()
    }

    /// `mu_T(x)`: flip every coordinate in `T`.
    #[inline]
    pub fn flip(self, t: SubsetMask) -> PointIndex {
        PointIndex(self.0 ^ t.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn full(n: u32) -> SubsetMask {
        SubsetMask(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(k: u32) -> SubsetMask {
        SubsetMask(1 << k)
    }

    /// From 1-based element indices.
    pub fn from_elements(elems: &[u32]) -> SubsetMask {
        SubsetMask(elems.iter().fold(0, |m, &e| m | 1 << (e - 1)))
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// 0-based membership.
    #[inline]
    pub fn contains(self, k: u32) -> bool {
        self.0 >> k & 1 == 1
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// 0-based elements in increasing order.
    pub fn bits(self) -> impl Iterator<Item = u32> {
        let m = self.0;
        (0..32).filter(move |i| m >> i & 1 == 1)
    }

    /// 1-based elements, e.g. `{1,3}`.
    pub fn to_set_string(self) -> String {
        let v: Vec<String> = self.bits().map(|b| (b + 1).to_string()).collect();
        format!("{{{}}}", v.join(","))
    }

    pub fn check(self, n: u32) -> Result<()> {
        if (self.0 as u64) >> n != 0 {
            return Err(Error::MaskOutOfRange { mask: self.0 as u64, n });
        }
        Ok(())
    }
}

impl serde::Serialize for SubsetMask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_set_string())
    }
}

/// `X_S(x) = prod_{i in S} x_i`.
#[inline]
pub fn character(s: SubsetMask, x: PointIndex) -> i64 {
    if (s.0 & x.0).count_ones() & 1 == 1 {
        -1
    } else {
        1
    }
}

/// Scatter the bits of `y` into the positions of `mask` (lowest first).
#[inline]
pub fn deposit(y: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut m = mask;
    let mut y = y;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if y & 1 == 1 {
            out |= low;
        }
        y >>= 1;
        m &= m - 1;
    }
    out
}

/// All `2^|mask|` depositions, indexed by the packed value.
pub fn deposit_table(mask: u32) -> Vec<u32> {
    let k = mask.count_ones();
    (0..1u32 << k).map(|y| deposit(y, mask)).collect()
}

/// Boolean function `{-1,1}^n -> {-1,1}` stored as packed bits
/// (bit 1 means the value `-1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: u32,
    words: Vec<u64>,
}

impl TruthTable {
    /// `minus(i)` returns true where the function equals `-1`.
    pub fn from_fn(n: u32, minus: impl Fn(u32) -> bool) -> Result<Self> {
        Self::from_fn_capped(n, DEFAULT_MAX_DIM, minus)
    }

    pub fn from_fn_capped(n: u32, cap: u32, minus: impl Fn(u32) -> bool) -> Result<Self> {
        check_dim(n, cap)?;
        Ok(Self::build(n, minus))
    }

    /// Also used for the 0-ary restriction, which is the only place `n = 0`
    /// is allowed.
    pub(crate) fn build(n: u32, minus: impl Fn(u32) -> bool) -> Self {
        let len = 1usize << n;
        let mut words = vec![0u64; len.div_ceil(64)];
        for i in 0..len {
            if minus(i as u32) {
                words[i >> 6] |= 1 << (i & 63);
            }
        }
        TruthTable { n, words }
    }

    pub(crate) fn from_words(n: u32, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), (1usize << n).div_ceil(64));
        TruthTable { n, words }
    }

    /// From a table of `±1` values.
    pub fn from_signs(values: &[i8]) -> Result<Self> {
        let n = values.len().trailing_zeros();
        if !values.len().is_power_of_two() {
            return Err(Error::InvalidParam(format!("table length {} is not a power of two", values.len())));
        }
        check_dim(n, DEFAULT_MAX_DIM)?;
        if let Some(v) = values.iter().find(|v| **v != 1 && **v != -1) {
            return Err(Error::InvalidParam(format!("table value {v} not in {{-1,1}}")));
        }
        Ok(Self::build(n, |i| values[i as usize] == -1))
    }

    /// Small tables given as an integer whose bit `i` is 1 where `f = -1`.
    pub fn from_bits(n: u32, bits: u64) -> Result<Self> {
        check_dim(n, 6)?;
        let len = 1u32 << n;
        if len < 64 && bits >> len != 0 {
            return Err(Error::InvalidParam(format!("bits {bits:#x} exceed 2^{n} entries")));
        }
        Ok(TruthTable { n, words: vec![bits] })
    }

    pub fn constant(n: u32, value: i8) -> Result<Self> {
        Self::from_fn(n, |_| value == -1)
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

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn is_minus(&self, i: u32) -> bool {
        self.words[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    /// `f(x)` as `±1`, unchecked index.
    #[inline]
    pub fn sign(&self, i: u32) -> i64 {
        1 - 2 * (self.is_minus(i) as i64)
    }

    pub fn evaluate(&self, x: PointIndex) -> Result<i64> {
        if (x.0 as u64) >= self.len() as u64 {
            return Err(Error::PointOutOfRange { index: x.0 as u64, n: self.n });
        }
        Ok(self.sign(x.0))
    }

    pub fn to_signs(&self) -> Vec<i64> {
        (0..self.len() as u32).map(|i| self.sign(i)).collect()
    }

    pub fn to_real(&self) -> PseudoBooleanFunction {
        PseudoBooleanFunction { n: self.n, values: (0..self.len() as u32).map(|i| self.sign(i) as f64).collect() }
    }

    /// Number of points where `f = -1`.
    pub fn count_minus(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_constant(&self) -> bool {
        let c = self.count_minus();
        c == 0 || c == self.len() as u64
    }

    pub fn negate(&self) -> TruthTable {
        Self::build(self.n, |i| !self.is_minus(i))
    }

    /// Packed bytes: bit `i` of the table is bit `i mod 8` of byte `i / 8`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = self.len().div_ceil(8);
        self.words.iter().flat_map(|w| w.to_le_bytes()).take(nbytes).collect()
    }

    /// True iff `f(x) <= f(y)` whenever `x <= y` coordinatewise, with `+1`
    /// the larger value. Scans every edge of the cube.
    pub fn is_monotone(&self) -> bool {
        for k in 0..self.n {
            let bit = 1u32 << k;
            for i in 0..self.len() as u32 {
                // x = i with x_k = +1 sits above i | bit.
                if i & bit == 0 && self.sign(i) < self.sign(i | bit) {
                    return false;
                }
            }
        }
        true
    }

    /// Coordinates the function actually depends on.
    pub fn relevant_coordinates(&self) -> SubsetMask {
        let mut m = 0;
        for k in 0..self.n {
            let bit = 1u32 << k;
            if (0..self.len() as u32).any(|i| i & bit == 0 && self.is_minus(i) != self.is_minus(i | bit)) {
                m |= bit;
            }
        }
        SubsetMask(m)
    }
}

impl PartialOrd for TruthTable {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order used for deterministic tie-breaking: dimension, then packed bytes.
impl Ord for TruthTable {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n.cmp(&other.n).then_with(|| self.to_bytes().cmp(&other.to_bytes()))
    }
}

/// Real-valued function on `{-1,1}^n`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoBooleanFunction {
    n: u32,
    values: Vec<f64>,
}

impl PseudoBooleanFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return Err(Error::InvalidParam(format!("table length {} is not a power of two", values.len())));
        }
        let n = values.len().trailing_zeros();
        check_dim(n, DEFAULT_MAX_DIM)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParam("non-finite function value".into()));
        }
        Ok(PseudoBooleanFunction { n, values })
    }

    pub(crate) fn from_parts(n: u32, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), 1usize << n);
        PseudoBooleanFunction { n, values }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn evaluate(&self, x: PointIndex) -> Result<f64> {
        self.values
            .get(x.0 as usize)
            .copied()
            .ok_or(Error::PointOutOfRange { index: x.0 as u64, n: self.n })
    }

    /// `||f||_p = (E|f|^p)^(1/p)` for `p >= 1`.
    pub fn norm(&self, p: f64) -> f64 {
        let mean = self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() / self.len() as f64;
        mean.powf(1.0 / p)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }
}
