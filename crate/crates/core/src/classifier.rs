//! Quasi-elementary classification of finite profiles.
//!
//! Rules are tried in a fixed order:
//!
//! 1. some `n_i > i`: not quasi-elementary, with a derived witness;
//! 2. family A, `n_i = 0` for `i < k` and `n_i ≤ k` for `i ≥ k`;
//! 3. family B, `(0, …, 0, 1, n_k, …)` with `k-2` zeros and `n_i ≤ k`;
//! 4. a bounded search for a monomial relation between two b symbols;
//! 5. otherwise unknown.

use serde::Serialize;
use thiserror::Error;

use crate::arith::Prime;
use crate::derive::{
    derive_lemma_witness, derive_theorem_witness, search_relation, DerivationTrace, SerrePair, TheoremRoute,
};
use crate::hopf::{ext1_basis, HopfError, ProfileFunction, Violation};
use crate::par;
use crate::symbolic::{symbol_status, ExtPolynomial, ExtSymbol, SymbolStatus, SymbolicError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("profile {profile} is not valid ({violation})")]
    InvalidProfile { profile: String, violation: Violation },
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub generator_bound: usize,
    pub chain_bound: u32,
}

impl Bounds {
    /// `2·(len + 2)` generators and `max entry + 2` ladder steps.
    pub fn defaults_for(pf: &ProfileFunction) -> Self {
        Bounds {
            generator_bound: 2 * (pf.len() + 2),
            chain_bound: pf.max_entry() + 2,
        }
    }
}

/// `b_{t,s}` with `ξ_t^{p^s}` a nonzero primitive and `ξ_t^{p^{s+1}} = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SerreElement {
    pub symbol: ExtSymbol,
    pub nonzero: bool,
    pub primitive: bool,
    pub killed_by_p0: bool,
}

impl SerreElement {
    pub fn certified(&self) -> bool {
        self.nonzero && self.primitive && self.killed_by_p0
    }
}

pub fn serre_elements(pf: &ProfileFunction) -> Vec<SerreElement> {
    let mut out = Vec::new();
    for t in 1..=pf.len() as u32 {
        let nt = pf.n(t as usize);
        if nt == 0 {
            continue;
        }
        let s = nt - 1;
        let primitive = symbol_status(pf, t, s) == SymbolStatus::Valid;
        if primitive {
            out.push(SerreElement {
                symbol: ExtSymbol::b(t, s),
                nonzero: pf.xi_power(t as usize, s).is_some(),
                primitive,
                killed_by_p0: pf.xi_power(t as usize, s + 1).is_none(),
            });
        }
    }
    out
}

/// Degrees `d ≤ max_degree` where `dim Ext^{1,d}` differs from the number of
/// admissible `h_{t,s}` in that degree, as `(d, dim Ext^1, #h)`.
pub fn ext1_mismatches(pf: &ProfileFunction, max_degree: u64) -> Vec<(u64, usize, usize)> {
    let p = pf.prime();
    let mut h_count = std::collections::BTreeMap::<u64, usize>::new();
    for t in 1..=pf.len() as u32 {
        for s in 0..pf.n(t as usize) {
            let d = ExtSymbol::h(t, s).internal_degree(p);
            if d <= max_degree as u128 && symbol_status(pf, t, s) == SymbolStatus::Valid {
                *h_count.entry(d as u64).or_insert(0) += 1;
            }
        }
    }
    let degrees: Vec<u64> = (1..=max_degree / 2).map(|d| 2 * d).collect();
    par::map(&degrees, |&d| (d, ext1_basis(pf, d).len()))
        .into_iter()
        .filter_map(|(d, dim)| {
            let h = h_count.get(&d).copied().unwrap_or(0);
            (dim != h).then_some((d, dim, h))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    QuasiElementary,
    NotQuasiElementary,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    FamilyA,
    FamilyB,
    Theorem,
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilyMatch {
    pub rule: Rule,
    pub k: u32,
}

/// Smallest `k` with `n_i = 0` for `i < k` and `n_i ≤ k` for `i ≥ k`.
pub fn family_a(pf: &ProfileFunction) -> Option<u32> {
    let len = pf.len() as u32;
    (1..=len.max(1)).find(|&k| (1..k).all(|i| pf.n(i as usize) == 0) && (k..=len).all(|i| pf.n(i as usize) <= k))
}

/// `k ≥ 2` with `n_i = 0` for `i < k-1`, `n_{k-1} = 1` and `n_i ≤ k` for `i ≥ k`.
pub fn family_b(pf: &ProfileFunction) -> Option<u32> {
    let len = pf.len() as u32;
    let first = (1..=len).find(|&i| pf.n(i as usize) > 0)?;
    let k = first + 1;
    (pf.n(first as usize) == 1 && (k..=len).all(|i| pf.n(i as usize) <= k)).then_some(k)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub profile: ProfileFunction,
    pub p: u32,
    pub verdict: Verdict,
    pub rule: Option<Rule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Every family shape the profile fits, whichever rule decided.
    pub matched_families: Vec<FamilyMatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<TheoremRoute>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<ExtPolynomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_trace: Option<DerivationTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub serre_pair: Option<SerrePair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nilpotence_trace: Option<DerivationTrace>,
    pub bounds_used: Bounds,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Classification {
    fn new(pf: &ProfileFunction, bounds: Bounds) -> Self {
        let mut matched_families = Vec::new();
        if let Some(k) = family_a(pf) {
            matched_families.push(FamilyMatch { rule: Rule::FamilyA, k });
        }
        if let Some(k) = family_b(pf) {
            matched_families.push(FamilyMatch { rule: Rule::FamilyB, k });
        }
        Classification {
            profile: pf.clone(),
            p: pf.prime().get(),
            verdict: Verdict::Unknown,
            rule: None,
            k: None,
            matched_families,
            route: None,
            relation: None,
            witness_trace: None,
            serre_pair: None,
            nilpotence_trace: None,
            bounds_used: bounds,
            notes: Vec::new(),
        }
    }

    /// Replays both traces of a negative verdict.
    pub fn replay(&self) -> Result<(), crate::derive::ReplayError> {
        for t in [&self.witness_trace, &self.nilpotence_trace].into_iter().flatten() {
            t.replay()?;
        }
        Ok(())
    }
}

pub fn classify(pf: &ProfileFunction) -> Result<Classification, ClassifyError> {
    classify_with(pf, Bounds::defaults_for(pf))
}

pub fn classify_with(pf: &ProfileFunction, bounds: Bounds) -> Result<Classification, ClassifyError> {
    if let Some(violation) = pf.first_violation() {
        return Err(ClassifyError::InvalidProfile {
            profile: pf.to_string(),
            violation,
        });
    }
    let mut out = Classification::new(pf, bounds);

    if !pf.within_staircase() {
        out.rule = Some(Rule::Theorem);
        match derive_theorem_witness(pf) {
            Ok(w) => {
                out.route = Some(w.route);
                conclude_negative(pf, &mut out, w.relation, w.trace);
                return Ok(out);
            }
            Err(e) => out.notes.push(format!("theorem chain: {e}")),
        }
        match search_relation(pf, bounds.generator_bound, bounds.chain_bound)? {
            Some(d) => {
                out.rule = Some(Rule::Search);
                conclude_negative(pf, &mut out, d.relation, d.trace);
            }
            None => out.notes.push("no witness within bounds".into()),
        }
        return Ok(out);
    }

    if let Some(k) = family_a(pf) {
        out.verdict = Verdict::QuasiElementary;
        out.rule = Some(Rule::FamilyA);
        out.k = Some(k);
        return Ok(out);
    }
    if let Some(k) = family_b(pf) {
        out.verdict = Verdict::QuasiElementary;
        out.rule = Some(Rule::FamilyB);
        out.k = Some(k);
        return Ok(out);
    }
    if let Some(d) = search_relation(pf, bounds.generator_bound, bounds.chain_bound)? {
        out.rule = Some(Rule::Search);
        conclude_negative(pf, &mut out, d.relation, d.trace);
    } else {
        out.notes
            .push("no family shape fits and no relation found within bounds".into());
    }
    Ok(out)
}

fn conclude_negative(pf: &ProfileFunction, out: &mut Classification, relation: ExtPolynomial, trace: DerivationTrace) {
    match derive_lemma_witness(pf, &relation) {
        Ok(w) => {
            out.verdict = Verdict::NotQuasiElementary;
            out.serre_pair = Some(w.pair);
            out.nilpotence_trace = Some(w.trace);
        }
        Err(e) => {
            out.notes.push(format!("nilpotence step: {e}"));
        }
    }
    out.relation = Some(relation);
    out.witness_trace = Some(trace);
}

/// All valid profiles given by vectors of length `max_len` with entries in
/// `0..=max_entry`, in lexicographic order.
pub fn enumerate_valid_profiles(p: Prime, max_len: usize, max_entry: u32) -> Vec<ProfileFunction> {
    let candidates = all_vectors(max_len, max_entry);
    let checked = par::map(&candidates, |v| {
        ProfileFunction::new(p, v.clone()).ok().filter(|pf| pf.is_valid())
    });
    checked.into_iter().flatten().collect()
}

/// Every vector of length `len` with entries `0..=max_entry`, lexicographic.
pub fn all_vectors(len: usize, max_entry: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * (max_entry as usize + 1));
        for v in &out {
            for e in 0..=max_entry {
                let mut w = v.clone();
                w.push(e);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Classifies many profiles in parallel; output order follows input order.
pub fn classify_all(profiles: &[ProfileFunction]) -> Vec<Result<Classification, ClassifyError>> {
    par::map(profiles, classify)
}

impl From<HopfError> for ClassifyError {
    fn from(e: HopfError) -> Self {
        ClassifyError::Symbolic(SymbolicError::Hopf(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf(entries: &[u32]) -> ProfileFunction {
        ProfileFunction::from_parts(3, entries).unwrap()
    }

    #[test]
    fn serre_examples() {
        let syms = |e: &[u32]| -> Vec<ExtSymbol> { serre_elements(&pf(e)).iter().map(|s| s.symbol).collect() };
        assert_eq!(syms(&[1]), vec![ExtSymbol::b(1, 0)]);
        assert_eq!(syms(&[1, 2]), vec![ExtSymbol::b(1, 0), ExtSymbol::b(2, 1)]);
        assert!(syms(&[]).is_empty());
        assert!(serre_elements(&pf(&[2, 1, 1])).iter().all(|s| s.certified()));
    }

    #[test]
    fn families() {
        assert_eq!(family_a(&pf(&[1, 1, 1])), Some(1));
        assert_eq!(family_a(&pf(&[])), Some(1));
        assert_eq!(family_a(&pf(&[0, 0])), Some(1));
        assert_eq!(family_b(&pf(&[0, 1, 2])), Some(3));
        assert_eq!(family_a(&pf(&[0, 1, 2])), Some(2));
        assert_eq!(family_b(&pf(&[0, 2, 1])), None);
    }

    #[test]
    fn classify_examples() {
        let c = classify(&pf(&[1, 1, 1])).unwrap();
        assert_eq!(
            (c.verdict, c.rule, c.k),
            (Verdict::QuasiElementary, Some(Rule::FamilyA), Some(1))
        );

        let c = classify(&pf(&[2, 1])).unwrap();
        assert_eq!(c.verdict, Verdict::NotQuasiElementary);
        assert_eq!(c.relation.as_ref().unwrap().to_string(), "1*b[1,1]^4");
        c.replay().unwrap();

        let c = classify(&pf(&[0, 2, 0, 4, 0, 2])).unwrap();
        assert_eq!(c.verdict, Verdict::Unknown);

        let c = classify(&pf(&[0, 2, 3, 0, 1])).unwrap();
        assert_eq!((c.verdict, c.rule), (Verdict::NotQuasiElementary, Some(Rule::Search)));

        assert!(matches!(
            classify(&pf(&[1, 2, 3])),
            Err(ClassifyError::InvalidProfile { .. })
        ));
    }

    #[test]
    fn enumeration_example() {
        let p = Prime::new(3).unwrap();
        let got: Vec<Vec<u32>> = enumerate_valid_profiles(p, 2, 2)
            .iter()
            .map(|x| x.entries().to_vec())
            .collect();
        assert_eq!(
            got,
            vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![2, 1]]
        );
        assert_eq!(enumerate_valid_profiles(p, 0, 3).len(), 1);
    }
}
