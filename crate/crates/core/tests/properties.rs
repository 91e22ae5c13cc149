use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twistsel::constants::{
    bounded_sums, e_constant, e_enclosure, p_constant, round_down, round_up, ExponentMode, TABLE_ELLS,
};
use twistsel::ff::{factor, is_irreducible, sample_monic, Field, Place, Poly};
use twistsel::markov::{dtable, estimate_gamma, parity, parity_weighted_pr, tv_decay, MarkovOp, RankDist};
use twistsel::place::{
    classify_degree, classify_place, count_roots, count_roots_direct, CurveConfig, CurveSpec, FrobClass,
    PlaceClass,
};
use twistsel::residue::{symbol, MuEll};
use twistsel::sim::{rank_walk, run_experiment, RunOptions, SimConfig, TransitionMode, Walker};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn f11() -> Field {
    Field::prime(11).unwrap()
}

fn curve() -> CurveConfig {
    CurveConfig::new(CurveSpec::example()).unwrap()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A random place of degree at most `d_max`: the first factor of a random
/// monic polynomial.
fn random_place(field: &Field, d_max: usize, seed: u64) -> Place {
    let mut r = rng(seed);
    let d = 1 + (seed as usize % d_max);
    let g = sample_monic(field, d, &mut r);
    let (pi, _) = factor(field, &g, &mut r).unwrap().factors.swap_remove(0);
    Place::new(field, &pi).unwrap()
}

/// Every polynomial of degree below `d`.
fn residues_below(field: &Field, d: usize) -> Vec<Poly> {
    let q = field.q();
    (0..q.pow(d as u32))
        .map(|mut k| {
            let coeffs = (0..d)
                .map(|_| {
                    let c = k % q;
                    k /= q;
                    c
                })
                .collect();
            Poly::from_coeffs(field, coeffs)
        })
        .collect()
}

fn check_factorization(field: &Field, f: &Poly, seed: u64) {
    let fac = factor(field, f, &mut rng(seed)).unwrap();
    assert_eq!(&fac.expand(field), f);
    let mut seen = HashSet::new();
    for (g, m) in &fac.factors {
        assert!(g.is_monic() && *m >= 1);
        assert!(is_irreducible(field, g).unwrap());
        assert!(seen.insert(g.clone()));
    }
    let single = fac.factors.len() == 1 && fac.factors[0].1 == 1;
    if f.deg() >= 1 {
        assert_eq!(is_irreducible(field, f).unwrap(), single, "{f}");
    }
    assert_eq!(factor(field, f, &mut rng(seed ^ 0x5eed)).unwrap(), fac);
}

#[test]
fn factor_round_trip_exhaustive_small_fields() {
    for q in [2u64, 3, 5] {
        let field = Field::prime(q).unwrap();
        for d in 0..=6u32 {
            for k in 0..(q - 1) * q.pow(d) {
                let mut coeffs = Vec::with_capacity(d as usize + 1);
                let mut x = k;
                for _ in 0..d {
                    coeffs.push(x % q);
                    x /= q;
                }
                coeffs.push(1 + x);
                check_factorization(&field, &Poly::from_coeffs(&field, coeffs), k);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factor_round_trip_f11(coeffs in prop::collection::vec(0u64..11, 1..=40), lead in 1u64..11, seed: u64) {
        let field = f11();
        let mut c = coeffs;
        c.push(lead);
        check_factorization(&field, &Poly::from_coeffs(&field, c), seed);
    }

    #[test]
    fn products_of_irreducibles_factor_back(seeds in prop::collection::vec(any::<u64>(), 1..5)) {
        let field = f11();
        let mut f = Poly::one();
        let mut parts = BTreeSet::new();
        for s in &seeds {
            let pi = random_place(&field, 5, *s);
            f = f.mul(pi.poly(), &field);
            parts.insert(pi.poly().clone());
        }
        let fac = factor(&field, &f, &mut rng(seeds[0])).unwrap();
        let got: BTreeSet<Poly> = fac.factors.iter().map(|(g, _)| g.clone()).collect();
        prop_assert_eq!(got, parts);
        prop_assert_eq!(fac.factors.iter().map(|(g, m)| g.deg() * *m as usize).sum::<usize>(), f.deg());
    }

    #[test]
    fn symbol_is_multiplicative(
        a in prop::collection::vec(0u64..11, 1..8),
        b in prop::collection::vec(0u64..11, 1..8),
        seed: u64,
    ) {
        let field = f11();
        let mu = MuEll::new(&field, 5).unwrap();
        let pi = random_place(&field, 4, seed);
        let a = Poly::from_coeffs(&field, a);
        let b = Poly::from_coeffs(&field, b);
        prop_assume!(!a.rem(pi.poly(), &field).unwrap().is_zero());
        prop_assume!(!b.rem(pi.poly(), &field).unwrap().is_zero());
        let sa = symbol(&a, &pi, &mu).unwrap().0;
        let sb = symbol(&b, &pi, &mu).unwrap().0;
        let sab = symbol(&a.mul(&b, &field), &pi, &mu).unwrap().0;
        prop_assert_eq!(sab, (sa + sb) % 5);
        prop_assert!(symbol(&a.pow(5, &field), &pi, &mu).unwrap().is_identity());
    }

    #[test]
    fn classification_is_deterministic_and_ramification_is_disc_only(seed: u64) {
        let c = curve();
        let v = random_place(c.field(), 6, seed);
        let (frob, class) = classify_place(&c, &v);
        prop_assert_eq!(classify_place(&c, &v), (frob, class));
        let divides_disc = c.disc().rem(v.poly(), c.field()).unwrap().is_zero();
        prop_assert_eq!(frob == FrobClass::Ramified, divides_disc);
        prop_assert_eq!(class == PlaceClass::Ramified, divides_disc);
        if !divides_disc {
            prop_assert_eq!(count_roots(&c, &v), count_roots_direct(&c, &v));
        }
        prop_assert_ne!(class, PlaceClass::P1);
    }

    #[test]
    fn m_t_conserves_parity_exactly(weights in prop::collection::vec(0i64..20, 1..12), d0 in 1i64..12) {
        prop_assume!(weights.iter().any(|&w| w > 0));
        let probs: Vec<BigRational> = weights.iter().map(|&w| rat(w, 1)).collect();
        let mut probs = probs;
        probs.resize(17, BigRational::zero());
        let mu = RankDist::from_weights(probs).unwrap();
        let op = MarkovOp::<BigRational>::m_t(5, rat(d0, 12), 16).unwrap();
        let next = op.step(&mu);
        prop_assert_eq!(parity(&next), parity(&mu));
        let total = next.probs().iter().fold(next.tail().clone(), |acc, p| acc + p);
        prop_assert!(total.is_one());
    }

    #[test]
    fn parity_weighted_pr_is_fixed(rho0 in 0.0f64..=1.0, ell_idx in 0usize..2) {
        let ell = [5u64, 7][ell_idx];
        let op = MarkovOp::<f64>::m_t(ell, 5.0 / 6.0, 60).unwrap();
        let pi = parity_weighted_pr::<f64>(ell, rho0, 60).unwrap();
        let next = op.step(&pi);
        let err = next.probs().iter().zip(pi.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10, "{}", err);
        prop_assert!((parity(&pi) - rho0).abs() < 1e-12);
    }

    #[test]
    fn dtable_rows_sum_to_one(r in 0u32..=64, ell_idx in 0usize..5, p2: bool) {
        let class = if p2 { PlaceClass::P2 } else { PlaceClass::P1 };
        let row = dtable::<BigRational>(TABLE_ELLS[ell_idx], r, class).unwrap();
        let total = row.iter().fold(BigRational::zero(), |acc, (_, p)| acc + p);
        prop_assert!(total.is_one());
        prop_assert!(row.iter().all(|(_, p)| *p >= BigRational::zero()));
    }

    #[test]
    fn walks_keep_parity_and_replay(seed: u64, n in 1usize..=30, dtable_mode: bool, shuffle: bool) {
        let mut config = SimConfig::new(CurveSpec::example(), n, 1, seed);
        config.mu_star = vec![0.2, 0.3, 0.25, 0.25];
        config.shuffle = shuffle;
        config.transition_mode = if dtable_mode { TransitionMode::DTable } else { TransitionMode::TwoStep };
        let walker = Walker::new(&config).unwrap();
        let mut r = rng(seed);
        let f = sample_monic(walker.curve().field(), n, &mut r);
        let record = rank_walk(&f, &walker, &mut r.clone()).unwrap();
        prop_assert_eq!(record.final_rank % 2, record.initial % 2);
        prop_assert_eq!(rank_walk(&f, &walker, &mut r).unwrap(), record.clone());
        prop_assert!(record.fhat.w_prime <= record.fhat.w && record.fhat.big_n == n);
        prop_assert_eq!(record.class_counts.iter().sum::<u32>() as usize, record.fhat.w);
    }

    #[test]
    fn e_float_matches_enclosure(ell_idx in 0usize..5, p_idx in 0usize..5, m in 1u32..=4) {
        let (ell, p) = (TABLE_ELLS[ell_idx], TABLE_ELLS[p_idx]);
        prop_assume!(ell != p);
        let e = e_constant(ell, p, m, ExponentMode::Tabulated).unwrap();
        let enc = e_enclosure(ell, p, m, ExponentMode::Tabulated).unwrap();
        let (lo, hi) = enc.to_f64();
        let v = e.value.unwrap();
        prop_assert!(lo <= hi && (hi - lo) / hi < 1e-12);
        prop_assert!((v - lo).abs() / lo < 1e-10, "{} vs [{}, {}]", v, lo, hi);
    }

    #[test]
    fn p_matches_parity_weighted_masses(ell_idx in 0usize..5, m in 1u32..=20) {
        let ell = TABLE_ELLS[ell_idx];
        let p = p_constant::<f64>(ell, m).unwrap();
        let mass = |rho0: f64| -> f64 {
            parity_weighted_pr::<f64>(ell, rho0, 60).unwrap().probs()[..=m as usize].iter().sum()
        };
        prop_assert!((p - mass(0.0).min(mass(1.0))).abs() < 1e-10);
        prop_assert!(p <= p_constant::<f64>(ell, m + 1).unwrap() + 1e-15 && p <= 1.0 + 1e-15);
        let single = p_constant::<f32>(ell, m).unwrap() as f64;
        prop_assert!((single - p).abs() < 1e-5);
    }

    #[test]
    fn directed_rounding_brackets(n in -1_000_000_000i64..1_000_000_000, d in 1i64..1_000_000_007) {
        let x = rat(n, d);
        let lo = round_down(&x);
        let hi = round_up(&x);
        prop_assert!(BigRational::from_float(lo).unwrap() <= x);
        prop_assert!(BigRational::from_float(hi).unwrap() >= x);
        prop_assert!(hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(f64::MIN_POSITIVE));
    }
}

#[test]
fn exact_markov_rows_are_stochastic() {
    for ell in [5u64, 7] {
        let ops = [
            MarkovOp::<BigRational>::m_ell(ell, 64).unwrap(),
            MarkovOp::<BigRational>::m_ell2(ell, 64).unwrap(),
            MarkovOp::<BigRational>::m_t(ell, rat(5, 6), 64).unwrap(),
        ];
        for op in &ops {
            for r in 0..=64 {
                let (row, tail) = op.row(r);
                let total = row.iter().fold(tail, |acc, (_, p)| acc + p);
                assert!(total.is_one(), "ell {ell} r {r}");
            }
        }
    }
}

#[test]
fn m_t_decays_geometrically() {
    let op = MarkovOp::<f64>::m_t(5, 5.0 / 6.0, 60).unwrap();
    let gamma = estimate_gamma(&op).unwrap().gamma;
    for r0 in 0..=6usize {
        let start = RankDist::point_mass(r0, 60).unwrap();
        let target = parity_weighted_pr::<f64>(5, (r0 % 2) as f64, 60).unwrap();
        let tv = tv_decay(&op, &start, &target, 200);
        // eigenvalues cluster in [5/6, gamma], so C grows with r0 but stays finite
        let c = tv
            .iter()
            .enumerate()
            .filter(|(_, t)| **t >= 1e-12)
            .map(|(n, t)| t / gamma.powi(n as i32))
            .fold(0.0, f64::max);
        assert!(c < 1e3, "r0 {r0}: C = {c}");
        for (n, t) in tv.iter().enumerate() {
            assert!(*t <= c * gamma.powi(n as i32) + 1e-12, "r0 {r0} n {n}: {t}");
        }
        let rate = twistsel::markov::fitted_rate(&tv, 100, 1e-12).unwrap();
        assert!((rate - gamma).abs() / gamma < 0.02, "r0 {r0}: rate {rate}");
    }
}

#[test]
fn class_counts_partition_places() {
    let c = curve();
    for d in 1..=4usize {
        let counts = classify_degree(&c, d, 1 << 24).unwrap();
        let total = twistsel::ff::count_monic_irreducibles_u64(11, d as u32).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), total, "degree {d}");
    }
}

#[test]
fn power_residue_symbol_exhaustive_low_degree() {
    let field = f11();
    let mu = MuEll::new(&field, 5).unwrap();
    for d in 1..=2usize {
        for g in twistsel::ff::enumerate_monic(&field, d, twistsel::ff::MonicFilter::Irreducible, 1 << 20).unwrap() {
            let pi = Place::new(&field, &g).unwrap();
            let residues: Vec<Poly> = residues_below(&field, d);
            let fifth: HashSet<Poly> = residues
                .iter()
                .filter(|a| !a.is_zero())
                .map(|a| a.pow(5, &field).rem(&g, &field).unwrap())
                .collect();
            let mut hist = [0u64; 5];
            for a in residues.iter().filter(|a| !a.is_zero()) {
                let s = symbol(a, &pi, &mu).unwrap();
                assert_eq!(s.is_identity(), fifth.contains(a), "{a} mod {g}");
                hist[s.0 as usize] += 1;
            }
            let each = (11u64.pow(d as u32) - 1) / 5;
            assert_eq!(hist, [each; 5], "{g}");
        }
    }
}

#[test]
fn step_order_does_not_change_the_law() {
    for mode in [TransitionMode::TwoStep, TransitionMode::DTable] {
        let mut reports = Vec::new();
        for shuffle in [false, true] {
            let mut config = SimConfig::new(CurveSpec::example(), 12, 4000, 7);
            config.transition_mode = mode;
            config.shuffle = shuffle;
            config.mu_star = vec![0.5, 0.0, 0.5];
            reports.push(run_experiment(&config, &RunOptions::default()).unwrap());
        }
        let tv = reports[1].empirical.tv_distance(&reports[0].prediction);
        assert!(tv < 0.05, "{mode:?}: {tv}");
    }
}

#[test]
fn bounded_sums_are_exact_prefixes() {
    for &ell in &TABLE_ELLS {
        let exact = bounded_sums::<BigRational>(ell, 10);
        let float = bounded_sums::<f64>(ell, 10);
        assert!((round_down(&exact.even) - float.even).abs() < 1e-13);
        assert!((round_down(&exact.odd) - float.odd).abs() < 1e-13);
    }
}
