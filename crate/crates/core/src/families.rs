//! Named function families and block composition.
//!
//! Convention throughout: `+1` plays the role of "true", so AND is `+1` only
//! at the all-`+1` point and OR is `-1` only at the all-`-1` point.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cube::{check_dim, PseudoBooleanFunction, SubsetMask, TruthTable, DEFAULT_MAX_DIM};
use crate::error::{Error, Result};

pub fn make_and(n: u32) -> Result<TruthTable> {
    TruthTable::from_fn(n, |i| i != 0)
}

pub fn make_or(n: u32) -> Result<TruthTable> {
    check_dim(n, DEFAULT_MAX_DIM)?;
    let all = (1u32 << n) - 1;
    TruthTable::from_fn(n, |i| i == all)
}

/// `X_S`.
pub fn make_parity(n: u32, s: SubsetMask) -> Result<TruthTable> {
    check_dim(n, DEFAULT_MAX_DIM)?;
    s.check(n)?;
    if s.is_empty() {
        return Err(Error::InvalidParam("parity needs a nonempty set".into()));
    }
    TruthTable::from_fn(n, |i| (i & s.0).count_ones() & 1 == 1)
}

/// `x -> x_k`, `k` 1-based.
pub fn make_dictator(n: u32, k: u32) -> Result<TruthTable> {
    if k == 0 || k > n {
        return Err(Error::InvalidParam(format!("dictator coordinate {k} not in 1..={n}")));
    }
    TruthTable::from_fn(n, |i| i >> (k - 1) & 1 == 1)
}

pub fn make_majority(n: u32) -> Result<TruthTable> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidParam(format!("majority needs odd n, got {n}")));
    }
    TruthTable::from_fn(n, |i| i.count_ones() > n / 2)
}

/// `h(x) = -1` iff `x = (1,-1,-1)` or `x = (-1,1,1)`.
pub fn make_example_h() -> TruthTable {
    TruthTable::from_fn(3, |i| i == 0b110 || i == 0b001).expect("n = 3")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TribesParams {
    /// Tribe width.
    pub m: u32,
    /// Number of tribes.
    pub count: u32,
}

impl TribesParams {
    pub fn new(m: u32, count: u32) -> Result<Self> {
        if m == 0 || count == 0 {
            return Err(Error::InvalidParam("tribes need m >= 1 and N >= 1".into()));
        }
        Ok(TribesParams { m, count })
    }

    /// Width `m` with the default tribe count.
    pub fn with_default_count(m: u32) -> Result<Self> {
        Self::new(m, default_tribe_count(m)?)
    }

    pub fn dimension(&self) -> u64 {
        self.m as u64 * self.count as u64
    }
}

/// Largest `N` with `(1 - 2^-m)^N >= 1/2`, i.e. `2 (2^m - 1)^N >= 2^(mN)`,
/// found in exact integer arithmetic.
pub fn default_tribe_count(m: u32) -> Result<u32> {
    if m == 0 || m > 64 {
        return Err(Error::InvalidParam(format!("tribe width {m} out of range")));
    }
    let base = (BigUint::one() << m) - BigUint::one();
    let two = BigUint::from(2u32);
    let mut pow = base.clone();
    let mut count = 1u32;
    loop {
        let next = &pow * &base;
        // (1 - 2^-m)^(count+1) >= 1/2 ?
        if &two * &next >= BigUint::one() << (m as u64 * (count as u64 + 1)) {
            pow = next;
            count += 1;
        } else {
            return Ok(count);
        }
    }
}

/// OR over `N` disjoint width-`m` ANDs on coordinates `jm+1 ..= jm+m`.
pub fn make_tribes(params: TribesParams) -> Result<TruthTable> {
    let n = params.dimension();
    if n > DEFAULT_MAX_DIM as u64 {
        return Err(Error::Dimension { n: n.min(u32::MAX as u64) as u32, cap: DEFAULT_MAX_DIM });
    }
    let block = (1u32 << params.m) - 1;
    TruthTable::from_fn(n as u32, |i| (0..params.count).all(|j| (i >> (j * params.m)) & block != 0))
}

/// Exact tribes quantities for dimensions beyond any truth table, computed by
/// enumerating a single width-`m` block and using independence of blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct TribesStructure {
    pub params: TribesParams,
    /// `E f`.
    pub mean: BigRational,
    /// `I_k`, identical for every coordinate.
    pub influence: BigRational,
    /// `I_{k,l}` for two coordinates in the same tribe.
    pub pair_same_tribe: BigRational,
    /// `I_{k,l}` for coordinates in different tribes (needs `N >= 2`).
    pub pair_different_tribes: Option<BigRational>,
}

pub fn tribes_structure(params: TribesParams) -> Result<TribesStructure> {
    let m = params.m;
    if m > 20 {
        return Err(Error::InvalidParam(format!("tribe width {m} too large to enumerate")));
    }
    let size = 1u32 << m;
    let full = size - 1;
    let block_true = |x: u32| x & full == 0;
    let ratio = |count: u64| BigRational::new(count.into(), (size as u64).into());
    // k = coordinate 0 and l = coordinate 1 of the block (by symmetry).
    let pivotal_in_block = |x: u32, k: u32| block_true(x) != block_true(x ^ (1 << k));

    let false_count = (0..size).filter(|&x| !block_true(x)).count() as u64;
    let q = ratio(false_count);
    let piv_k = ratio((0..size).filter(|&x| pivotal_in_block(x, 0)).count() as u64);
    // Coordinate k pivotal for f iff it flips its own block while every other block is false.
    let q_pow = |e: u32| num_traits::pow(q.clone(), e as usize);

    let mean = BigRational::one() - BigRational::from_integer(2.into()) * q_pow(params.count);
    let influence = &piv_k * q_pow(params.count - 1);
    let pair_same_tribe = if m >= 2 {
        let both = ratio((0..size).filter(|&x| pivotal_in_block(x, 0) && pivotal_in_block(x, 1)).count() as u64);
        both * q_pow(params.count - 1)
    } else {
        BigRational::zero()
    };
    let pair_different_tribes = (params.count >= 2).then(|| {
        // each of the two blocks must be pivotal at its coordinate and false
        let piv_and_false = ratio((0..size).filter(|&x| pivotal_in_block(x, 0) && !block_true(x)).count() as u64);
        &piv_and_false * &piv_and_false * q_pow(params.count - 2)
    });
    Ok(TribesStructure { params, mean, influence, pair_same_tribe, pair_different_tribes })
}

/// `f_g(x) = f(g(block_1), ..., g(block_n1))` with blocks of width `n2`.
pub fn compose(f: &TruthTable, g: &TruthTable) -> Result<TruthTable> {
    let (n1, n2) = (f.n(), g.n());
    let n = n1 as u64 * n2 as u64;
    if n > DEFAULT_MAX_DIM as u64 {
        return Err(Error::Dimension { n: n as u32, cap: DEFAULT_MAX_DIM });
    }
    let block = (1u32 << n2) - 1;
    TruthTable::from_fn(n as u32, |i| {
        let outer = (0..n1).fold(0u32, |acc, j| acc | (g.is_minus((i >> (j * n2)) & block) as u32) << j);
        f.is_minus(outer)
    })
}

/// `f^(1) = h`, `f^(k+1) = compose(f^(k), h)`.
pub fn iterate_compose(h: &TruthTable, k: u32) -> Result<TruthTable> {
    if k == 0 {
        return Err(Error::InvalidParam("iteration depth must be >= 1".into()));
    }
    let n = (h.n() as u64).checked_pow(k).unwrap_or(u64::MAX);
    if n > DEFAULT_MAX_DIM as u64 {
        return Err(Error::Dimension { n: n.min(u32::MAX as u64) as u32, cap: DEFAULT_MAX_DIM });
    }
    let mut f = h.clone();
    for _ in 1..k {
        f = compose(&f, h)?;
    }
    Ok(f)
}

/// Uniform random Boolean function.
pub fn make_random(n: u32, seed: u64) -> Result<TruthTable> {
    check_dim(n, DEFAULT_MAX_DIM)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = 1usize << n;
    let mut words: Vec<u64> = (0..len.div_ceil(64)).map(|_| rng.random()).collect();
    if len < 64 {
        words[0] &= (1u64 << len) - 1;
    }
    Ok(TruthTable::from_words(n, words))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealDistribution {
    /// Uniform on `[-1, 1]`.
    Uniform,
    /// Standard normal.
    Normal,
}

impl RealDistribution {
    pub fn name(self) -> &'static str {
        match self {
            RealDistribution::Uniform => "uniform",
            RealDistribution::Normal => "normal",
        }
    }
}

impl std::str::FromStr for RealDistribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(RealDistribution::Uniform),
            "normal" => Ok(RealDistribution::Normal),
            other => Err(Error::InvalidParam(format!("unknown distribution `{other}`"))),
        }
    }
}

pub fn make_random_real(n: u32, seed: u64, dist: RealDistribution) -> Result<PseudoBooleanFunction> {
    check_dim(n, DEFAULT_MAX_DIM)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..1usize << n)
        .map(|_| match dist {
            RealDistribution::Uniform => rng.random_range(-1.0..=1.0),
            RealDistribution::Normal => StandardNormal.sample(&mut rng),
        })
        .collect();
    Ok(PseudoBooleanFunction::from_parts(n, values))
}

/// Seed for the `index`-th member of a seeded stream (splitmix64 finalizer),
/// so parallel generation is independent of scheduling.
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A named family with its parameters; what `construct` and family sweeps build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    And(u32),
    Or(u32),
    Parity { n: u32, set: SubsetMask },
    Dictator { n: u32, k: u32 },
    Majority(u32),
    Tribes { m: u32, count: Option<u32> },
    ExampleH,
    Random { n: u32, seed: u64 },
}

impl FamilySpec {
    pub fn build(&self) -> Result<TruthTable> {
        match *self {
            FamilySpec::And(n) => make_and(n),
            FamilySpec::Or(n) => make_or(n),
            FamilySpec::Parity { n, set } => make_parity(n, set),
            FamilySpec::Dictator { n, k } => make_dictator(n, k),
            FamilySpec::Majority(n) => make_majority(n),
            FamilySpec::Tribes { m, count } => make_tribes(match count {
                Some(c) => TribesParams::new(m, c)?,
                None => TribesParams::with_default_count(m)?,
            }),
            FamilySpec::ExampleH => Ok(make_example_h()),
            FamilySpec::Random { n, seed } => make_random(n, seed),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            FamilySpec::And(n) => format!("and n={n}"),
            FamilySpec::Or(n) => format!("or n={n}"),
            FamilySpec::Parity { n, set } => format!("parity n={n} set={}", set.to_set_string()),
            FamilySpec::Dictator { n, k } => format!("dictator n={n} k={k}"),
            FamilySpec::Majority(n) => format!("majority n={n}"),
            FamilySpec::Tribes { m, count: Some(c) } => format!("tribes m={m} count={c}"),
            FamilySpec::Tribes { m, count: None } => format!("tribes m={m}"),
            FamilySpec::ExampleH => "example-h".to_string(),
            FamilySpec::Random { n, seed } => format!("random n={n} seed={seed}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::pivotal_counts;
    use crate::spectrum::transform;

    #[test]
    fn or_is_de_morgan_dual_of_and() {
        for n in 1..=4 {
            let and = make_and(n).unwrap();
            let or = make_or(n).unwrap();
            let all = (1u32 << n) - 1;
            for x in 0..=all {
                assert_eq!(or.sign(x), -and.sign(x ^ all));
            }
        }
    }

    #[test]
    fn and_closed_form_spectrum() {
        for n in 2..=10u32 {
            let v = transform(&make_and(n).unwrap()).scaled().unwrap().to_vec();
            // 2^n f̂(∅) = 2^n (-1 + 2^{1-n}) = 2 - 2^n, and 2 elsewhere
            assert_eq!(v[0], 2 - (1i64 << n));
            assert!(v[1..].iter().all(|&c| c == 2));
        }
    }

    #[test]
    fn bad_params() {
        assert!(make_parity(3, SubsetMask::EMPTY).is_err());
        assert!(make_parity(3, SubsetMask(8)).is_err());
        assert!(make_majority(4).is_err());
        assert!(make_dictator(3, 0).is_err());
        assert!(make_dictator(3, 4).is_err());
        assert!(make_and(0).is_err());
        assert!(make_tribes(TribesParams::new(5, 5).unwrap()).is_err());
        assert!(TribesParams::new(0, 2).is_err());
        assert!(iterate_compose(&make_example_h(), 3).is_err());
    }

    #[test]
    fn dictator_influences() {
        let f = make_dictator(4, 3).unwrap();
        let counts = pivotal_counts(&f);
        assert_eq!(counts, vec![0, 0, 16, 0]);
    }

    #[test]
    fn default_tribe_counts() {
        // (3/4)^2 = 9/16 >= 1/2 > 27/64
        assert_eq!(default_tribe_count(1).unwrap(), 1);
        assert_eq!(default_tribe_count(2).unwrap(), 2);
        assert_eq!(default_tribe_count(3).unwrap(), 5);
        assert_eq!(default_tribe_count(4).unwrap(), 10);
        for m in 1..=8 {
            let n = default_tribe_count(m).unwrap();
            let q = 1.0 - (-(m as f64)).exp2();
            assert!(q.powi(n as i32) >= 0.5 && q.powi(n as i32 + 1) < 0.5);
        }
    }

    #[test]
    fn tribes_is_monotone() {
        let t = make_tribes(TribesParams::new(2, 2).unwrap()).unwrap();
        assert!(t.is_monotone());
        assert_eq!(t.n(), 4);
    }

    #[test]
    fn tribes_structure_matches_truth_table() {
        for (m, count) in [(1, 3), (2, 2), (2, 3), (3, 2), (3, 5), (4, 2)] {
            let p = TribesParams::new(m, count).unwrap();
            let f = make_tribes(p).unwrap();
            let st = tribes_structure(p).unwrap();
            let n = f.n();
            let len = BigRational::from_integer((1u64 << n).into());
            let mean = BigRational::from_integer((f.len() as i64 - 2 * f.count_minus() as i64).into()) / &len;
            assert_eq!(st.mean, mean);
            for (k, c) in pivotal_counts(&f).into_iter().enumerate() {
                assert_eq!(st.influence, BigRational::from_integer(c.into()) / &len, "k={k}");
            }
            let pair = |k: u32, l: u32| {
                let c = (0..f.len() as u32)
                    .filter(|&x| f.is_minus(x) != f.is_minus(x ^ 1 << k) && f.is_minus(x) != f.is_minus(x ^ 1 << l))
                    .count() as u64;
                BigRational::from_integer(c.into()) / &len
            };
            if m >= 2 {
                assert_eq!(st.pair_same_tribe, pair(0, 1));
            }
            if count >= 2 {
                assert_eq!(st.pair_different_tribes.clone().unwrap(), pair(0, m));
            }
        }
    }

    #[test]
    fn compose_laws() {
        let g = make_random(3, 9).unwrap();
        let id = compose(&make_dictator(1, 1).unwrap(), &g).unwrap();
        assert_eq!(id, g);
        let p2 = make_parity(2, SubsetMask(3)).unwrap();
        let pp = compose(&p2, &p2).unwrap();
        assert_eq!(pp, make_parity(4, SubsetMask(15)).unwrap());
        assert_eq!(transform(&pp).degree(), 4);
        assert_eq!(compose(&make_and(2).unwrap(), &make_or(3).unwrap()).unwrap().n(), 6);
    }

    #[test]
    fn iterate_compose_base_case_and_growth() {
        let h = make_example_h();
        assert_eq!(iterate_compose(&h, 1).unwrap(), h);
        let f2 = iterate_compose(&h, 2).unwrap();
        assert_eq!(f2.n(), 9);
        assert_eq!(f2.relevant_coordinates(), SubsetMask::full(9));
        assert_eq!(transform(&f2).degree(), 4);
    }

    #[test]
    fn example_h_facts() {
        let h = make_example_h();
        let spec = transform(&h);
        assert_eq!(spec.scaled().unwrap()[7], 0);
        assert_eq!(spec.coefficient(SubsetMask(0)), 0.5);
        assert_eq!(h.relevant_coordinates(), SubsetMask::full(3));
        assert_eq!(h.count_minus(), 2);
    }

    #[test]
    fn random_is_seeded() {
        assert_eq!(make_random(7, 3).unwrap(), make_random(7, 3).unwrap());
        assert_ne!(make_random(7, 3).unwrap(), make_random(7, 4).unwrap());
        assert_eq!(make_random(3, 1).unwrap().words()[0] >> 8, 0);
        let a = make_random_real(4, 2, RealDistribution::Normal).unwrap();
        assert_eq!(a, make_random_real(4, 2, RealDistribution::Normal).unwrap());
        let u = make_random_real(6, 2, RealDistribution::Uniform).unwrap();
        assert!(u.values().iter().all(|v| (-1.0..=1.0).contains(v)));
    }
}
