#![allow(dead_code)]

use std::collections::BTreeMap;

use hpl_core::cobar::{CobarChain, TensorWord};
use hpl_core::hopf::basis_up_to;
use hpl_core::symbolic::{ExtPolynomial, ExtSymbol};
use hpl_core::{Prime, ProfileFunction};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

pub fn profile(p: u64, entries: &[u32]) -> ProfileFunction {
    ProfileFunction::from_parts(p, entries).unwrap()
}

pub fn random_valid_profile<R: Rng>(rng: &mut R, p: u64, max_len: usize, max_entry: u32) -> ProfileFunction {
    loop {
        let len = rng.gen_range(1..=max_len);
        let entries: Vec<u32> = (0..len).map(|_| rng.gen_range(0..=max_entry)).collect();
        let pf = profile(p, &entries);
        if pf.is_valid() && pf.max_entry() > 0 {
            return pf;
        }
    }
}

/// A few permutations of one random word, with random coefficients.
pub fn random_chain<R: Rng>(rng: &mut R, pf: &ProfileFunction, max_t: u64, max_s: usize) -> CobarChain {
    let p = pf.prime();
    let monos = basis_up_to(pf, max_t);
    let s = rng.gen_range(1..=max_s);
    let mut factors = Vec::new();
    let mut t = 0;
    for _ in 0..s {
        let fits: Vec<_> = monos.iter().filter(|m| t + m.degree(p) <= max_t).collect();
        let Some(m) = fits.choose(rng) else { break };
        t += m.degree(p);
        factors.push((*m).clone());
    }
    let mut chain = CobarChain::zero(pf, factors.len(), t);
    for _ in 0..rng.gen_range(1..=4) {
        factors.shuffle(rng);
        let c = rng.gen_range(1..p.get());
        chain.add_term(TensorWord::new(p, factors.clone()), c);
    }
    chain
}

pub fn random_symbol<R: Rng>(rng: &mut R) -> ExtSymbol {
    let (t, s) = (rng.gen_range(1..=3), rng.gen_range(0..=2));
    if rng.gen_bool(0.5) {
        ExtSymbol::h(t, s)
    } else {
        ExtSymbol::b(t, s)
    }
}

pub fn random_monomial<R: Rng>(rng: &mut R, p: Prime, max_factors: usize) -> ExtPolynomial {
    let mut out = ExtPolynomial::one(p);
    for _ in 0..rng.gen_range(1..=max_factors) {
        out = out.mul(&ExtPolynomial::symbol(p, random_symbol(rng)));
    }
    out
}

/// Random monomials grouped by bidegree; the largest nonzero group, with
/// random coefficients.
pub fn random_homogeneous<R: Rng>(rng: &mut R, p: Prime) -> ExtPolynomial {
    let mut groups: BTreeMap<(u64, u128), ExtPolynomial> = BTreeMap::new();
    for _ in 0..24 {
        let m = random_monomial(rng, p, 3);
        if let Some(bd) = m.bidegree() {
            let c = rng.gen_range(1..p.get());
            let g = groups.entry(bd).or_insert_with(|| ExtPolynomial::zero(p));
            *g = g.add(&m.scale(c));
        }
    }
    groups
        .into_values()
        .filter(|g| !g.is_zero())
        .max_by_key(|g| g.len())
        .unwrap_or_else(|| ExtPolynomial::symbol(p, ExtSymbol::h(1, 0)))
}
