mod common;

use common::*;
use hpl_core::classifier::{classify, Verdict};
use hpl_core::cobar::{concat_product, differential, symbol_rep, CobarComplex, CobarConfig, SymbolRep};
use hpl_core::fp_linalg::FpMatrix;
use hpl_core::hopf::{bruteforce_sufficient_bound, ext1_basis, validate_bruteforce};
use hpl_core::symbolic::{steenrod_beta_p, steenrod_p, symbol_status, ExtPolynomial, ExtSymbol, SymbolStatus};
use hpl_core::ProfileFunction;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn neg_one_pow(p: hpl_core::Prime, s: usize) -> u32 {
    if s.is_multiple_of(2) {
        1
    } else {
        p.neg(1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_squared_is_zero(seed in any::<u64>(), p in prop::sample::select(vec![3u64, 5])) {
        let mut r = rng(seed);
        let pf = random_valid_profile(&mut r, p, 4, 3);
        let c = random_chain(&mut r, &pf, 200, 4);
        let dc = differential(&c);
        prop_assert!(differential(&dc).is_zero());
        prop_assert_eq!(dc.bidegree(), (c.bidegree().0 + 1, c.bidegree().1));
        let cx = CobarComplex::new(&pf, CobarConfig { max_s: 6, max_t: 200, max_words: 1000 }).unwrap();
        prop_assert_eq!(cx.differential(&c).unwrap(), dc);
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pf = random_valid_profile(&mut r, 3, 3, 3);
        let x = random_chain(&mut r, &pf, 80, 2);
        let y = random_chain(&mut r, &pf, 80, 2);
        let lhs = differential(&concat_product(&x, &y).unwrap());
        let left = concat_product(&differential(&x), &y).unwrap();
        let sign = neg_one_pow(pf.prime(), x.bidegree().0);
        let right = concat_product(&x, &differential(&y)).unwrap().scale(sign);
        prop_assert_eq!(lhs, left.add(&right).unwrap());
    }

    #[test]
    fn steenrod_bidegree_law(seed in any::<u64>(), i in 0u64..4) {
        let p = prime(3);
        let x = random_homogeneous(&mut rng(seed), p);
        let (s, t) = x.bidegree().unwrap();
        let step = 2 * i * (p.as_u64() - 1);
        let px = steenrod_p(i, &x);
        if let Some(bd) = px.bidegree() {
            prop_assert_eq!(bd, (s + step, t * 3));
        }
        let bx = steenrod_beta_p(i, &x);
        if let Some(bd) = bx.bidegree() {
            prop_assert_eq!(bd, (s + step + 1, t * 3));
        }
    }

    #[test]
    fn cartan_formula(seed in any::<u64>(), i in 0u64..5) {
        let p = prime(3);
        let mut r = rng(seed);
        let x = random_monomial(&mut r, p, 2);
        let y = random_monomial(&mut r, p, 2);
        let expanded = (0..=i).fold(ExtPolynomial::zero(p), |acc, a| {
            acc.add(&steenrod_p(a, &x).mul(&steenrod_p(i - a, &y)))
        });
        prop_assert_eq!(steenrod_p(i, &x.mul(&y)), expanded);
    }

    #[test]
    fn p0_is_a_ring_map(seed in any::<u64>()) {
        let p = prime(3);
        let mut r = rng(seed);
        let x = random_homogeneous(&mut r, p);
        let y = random_homogeneous(&mut r, p);
        prop_assert_eq!(steenrod_p(0, &x.mul(&y)), steenrod_p(0, &x).mul(&steenrod_p(0, &y)));
    }

    #[test]
    fn rank_of_transpose(rows in 1usize..7, cols in 1usize..7, seed in any::<u64>(), p in prop::sample::select(vec![3u64, 5, 7])) {
        use rand::Rng;
        let mut r = rng(seed);
        let dense: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| r.gen_range(0..p as i64)).collect()).collect();
        let m = FpMatrix::from_dense(prime(p), &dense);
        prop_assert_eq!(m.rank(), m.transpose().rank());
        let once = m.row_reduce().reduced;
        prop_assert_eq!(once.row_reduce().reduced, once.clone());
        for v in m.kernel_basis() {
            prop_assert!(m.mul_vec(&v).unwrap().iter().all(|&x| x == 0));
        }
        prop_assert_eq!(m.kernel_basis().len(), cols - m.rank());
    }

    #[test]
    fn validity_matches_bruteforce(entries in prop::collection::vec(0u32..4, 0..5), p in prop::sample::select(vec![3u64, 5])) {
        let pf = profile(p, &entries);
        let bound = bruteforce_sufficient_bound(&pf);
        prop_assert_eq!(pf.is_valid(), validate_bruteforce(&pf, bound).unwrap());
    }

    #[test]
    fn negative_verdicts_replay(seed in any::<u64>()) {
        let pf = random_valid_profile(&mut rng(seed), 3, 5, 4);
        let c = classify(&pf).unwrap();
        if c.verdict == Verdict::NotQuasiElementary {
            prop_assert!(c.replay().is_ok());
            prop_assert!(c.serre_pair.is_some());
        }
        if !pf.within_staircase() {
            prop_assert_ne!(c.verdict, Verdict::QuasiElementary);
        }
    }
}

#[test]
fn beta_p0_of_h_is_b() {
    let p = prime(5);
    for t in 1..=4 {
        for s in 0..=4 {
            let h = ExtPolynomial::symbol(p, ExtSymbol::h(t, s));
            assert_eq!(steenrod_beta_p(0, &h), ExtPolynomial::symbol(p, ExtSymbol::b(t, s)));
        }
    }
}

#[test]
fn ext1_from_cobar_matches_primitives() {
    for entries in hpl_core::classifier::all_vectors(3, 2) {
        let pf = profile(3, &entries);
        if !pf.is_valid() {
            continue;
        }
        let cx = CobarComplex::new(
            &pf,
            CobarConfig {
                max_s: 2,
                max_t: 100,
                max_words: 100_000,
            },
        )
        .unwrap();
        for d in 0..=100 {
            assert_eq!(
                cx.cohomology_dim(1, d).unwrap(),
                ext1_basis(&pf, d).len(),
                "{pf} degree {d}"
            );
        }
    }
}

fn cocycle(pf: &ProfileFunction, sym: ExtSymbol) -> Option<hpl_core::cobar::CobarChain> {
    match symbol_rep(pf, sym).unwrap() {
        SymbolRep::Chain(c) => Some(c),
        SymbolRep::ZeroClass => None,
    }
}

#[test]
fn odd_classes_graded_commute() {
    for entries in [&[2, 1][..], &[1, 1], &[2, 1, 1], &[0, 1, 1]] {
        let pf = profile(3, entries);
        let cx = CobarComplex::new(
            &pf,
            CobarConfig {
                max_s: 3,
                max_t: 200,
                max_words: 200_000,
            },
        )
        .unwrap();
        let hs: Vec<_> = (1..=3)
            .flat_map(|t| (0..3).map(move |s| (t, s)))
            .filter(|&(t, s)| symbol_status(&pf, t, s) == SymbolStatus::Valid)
            .filter_map(|(t, s)| cocycle(&pf, ExtSymbol::h(t, s)))
            .collect();
        for x in &hs {
            for y in &hs {
                let sum = concat_product(x, y)
                    .unwrap()
                    .add(&concat_product(y, x).unwrap())
                    .unwrap();
                if sum.bidegree().1 <= 200 {
                    assert!(cx.is_coboundary(&sum).unwrap().is_some(), "{pf}: {x} and {y}");
                }
            }
        }
    }
}

#[test]
fn serre_representatives_are_not_coboundaries() {
    for entries in [&[1][..], &[2, 1], &[1, 1], &[0, 1], &[2, 1, 1]] {
        let pf = profile(3, entries);
        let cx = CobarComplex::new(
            &pf,
            CobarConfig {
                max_s: 2,
                max_t: 300,
                max_words: 200_000,
            },
        )
        .unwrap();
        for e in hpl_core::classifier::serre_elements(&pf) {
            let c = cocycle(&pf, e.symbol).unwrap();
            assert!(differential(&c).is_zero());
            assert!(cx.is_coboundary(&c).unwrap().is_none(), "{pf}: {}", e.symbol);
        }
    }
}
