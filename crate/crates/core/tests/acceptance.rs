//! Acceptance criteria. Each test prints one line per criterion part and
//! fails if any part fails. Run with `--nocapture` to see the lines.

use std::time::{Duration, Instant};

use boolcube::calculus::{build_profile, influence, pivotal_pair_count, restrict, restricted_moment, spectral_power_sum, InfluenceMethod, RestrictionContext};
use boolcube::cli;
use boolcube::entropy::entropy;
use boolcube::families::{
    compose, iterate_compose, make_and, make_example_h, make_parity, make_random, make_random_real, make_tribes, stream_seed,
    tribes_structure, RealDistribution, TribesParams,
};
use boolcube::verify::sweep::{sweep, Generator, SweepReport};
use boolcube::verify::{hypercontractivity_sides, select_checks, CheckParams};
use boolcube::{transform, Dyadic, PointIndex, SubsetMask, TruthTable};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

fn report(criterion: u32, part: &str, ok: bool, detail: impl std::fmt::Display) -> bool {
    println!("criterion {criterion} [{part}]: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    ok
}

fn run_sweep(checks: &str, generator: Generator, params: &CheckParams) -> SweepReport {
    sweep(&select_checks(checks).unwrap(), &generator, params, None).unwrap()
}

/// No failures and, per check, the number of evaluations that were not skipped.
fn clean(r: &SweepReport) -> (bool, String) {
    let ok = !r.failed();
    let detail = r
        .checks
        .iter()
        .map(|(id, s)| format!("{id}: {} pass, {} fail, {} skipped, {} warn", s.pass, s.fail, s.skipped, s.warn))
        .collect::<Vec<_>>()
        .join("; ");
    (ok, format!("{}: {detail}", r.generator))
}

fn to_rational(d: Dyadic) -> BigRational {
    BigRational::new(BigInt::from(d.numer()), BigInt::from(d.denom()))
}

fn frac(num: u64, den_log2: u32) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::one() << den_log2)
}

fn pow(q: &BigRational, e: u32) -> BigRational {
    num_traits::pow(q.clone(), e as usize)
}

#[test]
fn criterion_1_exactness_suite() {
    let params = CheckParams::default();
    let checks = "parseval,influence-spectral,dSf-spectrum,second-order-pivotal,moment-identities,restriction-identity";
    let start = Instant::now();
    let mut all = true;
    for n in 1..=4 {
        let r = run_sweep(checks, Generator::Exhaustive(n), &params);
        let (ok, detail) = clean(&r);
        let expected = 1u64 << (1u64 << n);
        let complete = r.functions == expected && r.checks.values().all(|s| s.pass == expected);
        all &= report(1, &format!("exhaustive n={n}"), ok && complete, detail);
    }
    let elapsed = start.elapsed();
    all &= report(1, "runtime under 5 min", elapsed < Duration::from_secs(300), format!("{elapsed:.2?}"));
    assert!(all);
}

#[test]
fn criterion_2_and_closed_forms() {
    let mut all = true;
    for n in 3..=10u32 {
        let f = make_and(n).unwrap();
        let spec = transform(&f);
        let profile = build_profile(&f).unwrap();
        let mut ok = profile.total == Dyadic::new(n as i128, n - 1);
        ok &= spec.exact_coefficient(SubsetMask::EMPTY).unwrap() == Dyadic::new(1, n - 1) - Dyadic::ONE;
        ok &= (1..1u32 << n).all(|s| spec.exact_coefficient(SubsetMask(s)).unwrap() == Dyadic::new(1, n - 1));

        // weights: (1 - 2^{1-n})^2 once, 4^{1-n} for the 2^n - 1 nonempty sets
        let w0 = (1.0 - (1.0 - n as f64).exp2()).powi(2);
        let w1 = (2.0 - 2.0 * n as f64).exp2();
        let closed = -w0 * w0.log2() - ((1u64 << n) - 1) as f64 * w1 * w1.log2();
        let ent = entropy(&spec).unwrap();
        ok &= (ent - closed).abs() <= 1e-12;
        let bound = 4.0 * n as f64 / (n as f64 - 1.0).exp2();
        ok &= ent <= bound;
        all &= report(2, &format!("AND n={n}"), ok, format!("I={} Ent={ent:.12} bound={bound:.12}", profile.total));
    }
    assert!(all);
}

/// Brute-force tribes quantities from a truth table.
struct TribesTable {
    abs_mean: BigRational,
    per_bit: Vec<BigRational>,
    same: BigRational,
    different: Option<BigRational>,
}

fn tribes_table(p: TribesParams) -> TribesTable {
    let f = make_tribes(p).unwrap();
    let n = f.n();
    let minus = f.count_minus();
    let abs_mean = frac(((1i64 << n) - 2 * minus as i64).unsigned_abs(), n);
    let per_bit = (0..n)
        .map(|k| to_rational(influence(&f, SubsetMask::singleton(k), InfluenceMethod::Combinatorial).unwrap()))
        .collect();
    let same = frac(pivotal_pair_count(&f, 0, 1), n);
    let different = (p.count >= 2).then(|| frac(pivotal_pair_count(&f, 0, p.m), n));
    TribesTable { abs_mean, per_bit, same, different }
}

#[test]
fn criterion_3_tribes_suite() {
    let mut all = true;
    let mut different_ok = true;

    // The block-enumeration structure is itself checked against a table,
    // including at m = 4 with the largest tabulable N.
    for p in [TribesParams::new(2, 2).unwrap(), TribesParams::new(3, 5).unwrap(), TribesParams::new(4, 5).unwrap()] {
        let t = tribes_table(p);
        let s = tribes_structure(p).unwrap();
        let ok = t.abs_mean == s.mean.abs()
            && t.per_bit.iter().all(|i| *i == s.influence)
            && t.same == s.pair_same_tribe
            && t.different == s.pair_different_tribes;
        all &= report(3, &format!("structure vs table m={} N={}", p.m, p.count), ok, format!("n={}", p.dimension()));
    }

    for m in 2..=4u32 {
        let p = TribesParams::with_default_count(m).unwrap();
        let big_n = p.count;
        let s = tribes_structure(p).unwrap();
        let q = BigRational::one() - frac(1, m);
        let mean_bound = frac(1, m - 1);
        let per_bit = pow(&q, big_n - 1) * frac(1, m - 1);
        let same = pow(&q, big_n - 1) * frac(1, m);
        let different = pow(&q, big_n - 2) * frac(1, 2 * m - 1);
        let label = format!("m={m} N={big_n} n={}", p.dimension());

        all &= report(3, &format!("|E f| <= 2^(1-m), {label}"), s.mean.abs() <= mean_bound, format!("|E f|={}", s.mean.abs()));
        all &= report(3, &format!("I_k closed form, {label}"), s.influence == per_bit, format!("I_k={}", s.influence));
        all &= report(3, &format!("I_kl same tribe, {label}"), s.pair_same_tribe == same, format!("{}", s.pair_same_tribe));
        let observed = s.pair_different_tribes.clone().unwrap();
        different_ok &= report(
            3,
            &format!("I_kl different tribes, {label}"),
            observed == different,
            format!("observed {observed}, closed form {different}"),
        );
        if p.dimension() <= 20 {
            let t = tribes_table(p);
            let ok = t.abs_mean <= mean_bound && t.per_bit.iter().all(|i| *i == per_bit) && t.same == same;
            all &= report(3, &format!("table, {label}"), ok, "per-bit, mean and same-tribe pair");
        }
    }
    assert!(all, "tribes structure, mean, per-bit or same-tribe part failed");
    assert!(different_ok, "different-tribe pair influence disagrees with the two-case closed form");
}

#[test]
fn criterion_4_hypercontractivity() {
    let params = CheckParams::default();
    let mut all = true;
    for n in 1..=6 {
        let r = run_sweep("hyper", Generator::RandomReal { n, count: 1000, seed: 4, dist: RealDistribution::Uniform }, &params);
        let s = &r.checks["hyper"];
        let ok = !r.failed() && s.pass == 1000 && s.min_slack.is_some_and(|m| m >= -1e-9);
        all &= report(4, &format!("random real n={n}"), ok, format!("pass={} min_slack={:?}", s.pass, s.min_slack));

        let worst = (0..50)
            .map(|i| {
                let g = make_random_real(n, stream_seed(40 + n as u64, i), RealDistribution::Normal).unwrap();
                let (lhs, rhs) = hypercontractivity_sides(&g, 1.0).unwrap();
                (lhs - rhs).abs()
            })
            .fold(0.0, f64::max);
        all &= report(4, &format!("equality at rho=1, n={n}"), worst <= 1e-12, format!("max gap {worst:e}"));
    }
    assert!(all);
}

#[test]
fn criterion_5_new_results() {
    let params = CheckParams::default();
    let mut all = true;
    for n in 1..=3 {
        let (ok, detail) = clean(&run_sweep("plogp-bound,lemma-521,moment-step,ent-bound", Generator::Exhaustive(n), &params));
        all &= report(5, &format!("exhaustive n={n}"), ok, detail);
    }
    let (ok, detail) = clean(&run_sweep("plogp-bound,ent-bound", Generator::Exhaustive(4), &params));
    all &= report(5, "exhaustive n=4", ok, detail);
    for n in [5, 6] {
        let r = run_sweep("moment-step", Generator::Random { n, count: 1000, seed: 5, }, &params);
        let (ok, detail) = clean(&r);
        all &= report(5, &format!("random n={n}"), ok && r.checks["moment-step"].pass + r.checks["moment-step"].skipped == 1000, detail);
    }
    assert!(all);
}

#[test]
fn criterion_6_friedgut_concentration() {
    let params = CheckParams::default();
    assert_eq!(params.friedgut_eps, vec![0.125, 0.25, 0.5]);
    let mut all = true;
    for n in 1..=4 {
        let r = run_sweep("friedgut,markov-tail", Generator::Exhaustive(n), &params);
        let (ok, detail) = clean(&r);
        // balanced functions: C(2^n, 2^(n-1))
        let size = 1u64 << n;
        let balanced = (1..=size / 2).fold(1u64, |acc, i| acc * (size / 2 + i) / i);
        let ok = ok && r.checks["markov-tail"].pass == balanced;
        all &= report(6, &format!("exhaustive n={n}"), ok, detail);
    }
    assert!(all);
}

#[test]
fn criterion_7_degree_laws() {
    let mut all = true;
    let mut pairs = 0;
    let mut i = 0u64;
    let mut ok = true;
    while pairs < 50 {
        let n1 = 1 + (i % 3) as u32;
        let n2 = 1 + ((i / 3) % 3) as u32;
        let f = make_random(n1, stream_seed(7, 2 * i)).unwrap();
        let g = make_random(n2, stream_seed(7, 2 * i + 1)).unwrap();
        i += 1;
        if f.is_constant() || g.is_constant() {
            continue;
        }
        pairs += 1;
        let fg = compose(&f, &g).unwrap();
        ok &= fg.n() == n1 * n2 && transform(&fg).degree() == transform(&f).degree() * transform(&g).degree();
    }
    all &= report(7, "compose degree, 50 random pairs", ok, format!("{i} draws"));

    let h = make_example_h();
    let dh = transform(&h).degree();
    let d2 = transform(&iterate_compose(&h, 2).unwrap()).degree();
    all &= report(7, "iterated example h", dh == 2 && d2 == 4, format!("deg h={dh}, deg h^(2)={d2}"));

    for k in 1..=5u32 {
        let f = make_parity(5, SubsetMask::from_elements(&(1..=k).collect::<Vec<_>>())).unwrap();
        let deg = transform(&f).degree();
        let total = build_profile(&f).unwrap().total;
        all &= report(7, &format!("parity on [{k}]"), deg == k && total == Dyadic::from_int(k as i128), format!("deg={deg} I={total}"));
    }
    assert!(all);
}

/// `2^n f̂(S) = Σ_x f(x) χ_S(x)`, one set at a time.
fn naive_scaled(f: &TruthTable) -> Vec<i64> {
    let size = 1u32 << f.n();
    (0..size)
        .map(|s| (0..size).map(|x| if (x & s).count_ones() % 2 == 0 { f.sign(x) } else { -f.sign(x) }).sum())
        .collect()
}

/// `M_{V,eps}` by pinning every outside coordinate and transforming each restriction.
fn moment_by_restriction(f: &TruthTable, v: SubsetMask, eps: f64) -> f64 {
    let n = f.n();
    let outside = SubsetMask(SubsetMask::full(n).0 & !v.0);
    let pinnings = 1u32 << outside.len();
    let mut total = 0.0;
    for p in 0..pinnings {
        // spread p over the outside coordinates
        let mut x = 0u32;
        for (j, k) in outside.bits().enumerate() {
            if p >> j & 1 == 1 {
                x |= 1 << k;
            }
        }
        let ctx = RestrictionContext::from_point(n, v, PointIndex(x)).unwrap();
        let spec = transform(&restrict(f, &ctx).unwrap());
        total += (0..spec.len() as u32).map(|s| spec.weight(SubsetMask(s)).powf(1.0 + eps)).sum::<f64>();
    }
    total / pinnings as f64
}

#[test]
fn criterion_8_oracle_equivalence() {
    let mut all = true;

    let ok = (0..50u64).all(|i| {
        let f = make_random(1 + (i % 8) as u32, stream_seed(8, i)).unwrap();
        transform(&f).scaled().unwrap() == naive_scaled(&f).as_slice()
    });
    all &= report(8, "FWHT vs naive transform, 50 functions n<=8", ok, "exact");

    for n in 1..=4u32 {
        let mut mismatches = 0u64;
        for bits in 0..1u64 << (1u64 << n) {
            let f = TruthTable::from_bits(n, bits).unwrap();
            for s in 1..1u32 << n {
                let s = SubsetMask(s);
                if influence(&f, s, InfluenceMethod::Combinatorial).unwrap() != influence(&f, s, InfluenceMethod::Spectral).unwrap() {
                    mismatches += 1;
                }
            }
        }
        all &= report(8, &format!("combinatorial vs spectral I_S, exhaustive n={n}"), mismatches == 0, format!("{mismatches} mismatches"));
    }

    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let n = 1 + (i % 5) as u32;
        let f = make_random(n, stream_seed(88, i)).unwrap();
        let spec = transform(&f);
        for eps in [0.0, 0.1, 0.25, 0.45] {
            let full = restricted_moment(&f, SubsetMask::full(n), eps).unwrap();
            worst = worst.max((full - spectral_power_sum(&spec, eps)).abs());
            worst = worst.max((full - moment_by_restriction(&f, SubsetMask::full(n), eps)).abs());
            let v = SubsetMask((stream_seed(89, i) as u32 | 1) & SubsetMask::full(n).0);
            worst = worst.max((restricted_moment(&f, v, eps).unwrap() - moment_by_restriction(&f, v, eps)).abs());
        }
    }
    all &= report(8, "M_V,eps via restrictions vs spectral sum, 20 functions n<=5", worst <= 1e-10, format!("max gap {worst:e}"));
    assert!(all);
}

fn cli_run(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("boolcube").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

#[test]
fn criterion_9_determinism_and_performance() {
    let mut all = true;
    for seed in ["1", "2"] {
        let args = ["verify", "--random", "8", "--count", "100", "--seed", seed, "--checks", "hyper"];
        let (c1, a) = cli_run(&args);
        let (c2, b) = cli_run(&args);
        let (c3, c) = cli_run(&[&args[..], &["--parallel", "1"]].concat());
        all &= report(9, &format!("verify --random seed {seed} byte-identical"), c1 == 0 && c2 == 0 && c3 == 0 && a == b && a == c, format!("{} bytes", a.len()));
    }

    let start = Instant::now();
    let (code, out) = cli_run(&["analyze", "--family", "random", "--n", "16", "--seed", "9", "--json"]);
    let elapsed = start.elapsed();
    all &= report(9, "analyze n=16 under 2 s", code == 0 && !out.is_empty() && elapsed < Duration::from_secs(2), format!("{elapsed:.2?}"));

    let f = make_random(20, 20).unwrap();
    let start = Instant::now();
    let spec = transform(&f);
    let elapsed = start.elapsed();
    let parseval = spec.parseval_residue().unwrap() == 0;
    all &= report(9, "FWHT n=20 under 10 s", parseval && elapsed < Duration::from_secs(10), format!("{elapsed:.2?}"));
    assert!(all);
}

#[test]
fn criterion_10_conjecture_observables_report_only() {
    let mut all = true;
    let (code, _) = cli_run(&["verify", "--exhaustive", "3", "--checks", "fei-ratio,fmei-ratio", "--limit", "fei-ratio=0", "--limit", "fmei-ratio=0"]);
    all &= report(10, "ratio checks with zero limits, exhaustive n=3", code == 0, format!("exit {code}"));
    let (code, _) = cli_run(&["verify", "--random", "6", "--count", "200", "--checks", "fei-ratio,fmei-ratio", "--limit", "fei-ratio=0"]);
    all &= report(10, "ratio checks, random n=6", code == 0, format!("exit {code}"));
    let (code, _) = cli_run(&["analyze", "--family", "and", "--n", "4", "--checks", "fei-ratio,fmei-ratio"]);
    all &= report(10, "analyze with ratio checks", code == 0, format!("exit {code}"));

    let args = ["search", "--objective", "fei-ratio", "--exhaustive", "3"];
    let (c1, a) = cli_run(&args);
    let (c2, b) = cli_run(&args);
    let (c3, c) = cli_run(&[&args[..], &["--parallel", "1"]].concat());
    let rows = String::from_utf8_lossy(&a).matches("BFN1 n=3").count();
    all &= report(10, "fei-ratio leaderboard n=3 stable", c1 == 0 && c2 == 0 && c3 == 0 && a == b && a == c && rows == 10, format!("{rows} rows"));
    assert!(all);
}

