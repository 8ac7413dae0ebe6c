//! Derivations of monomial relations in Ext.
//!
//! A derivation starts from the relation a coproduct gives in Ext, applies
//! Steenrod operations, and substitutes zero for symbols that vanish in the
//! profile. Every step is recorded in a [`DerivationTrace`] that can be
//! replayed independently.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::hopf::{is_primitive, reduced_coproduct, ProfileFunction};
use crate::symbolic::{
    normalize, steenrod_beta_p, steenrod_p, symbol_status, ExtMonomial, ExtPolynomial, ExtSymbol, SymbolKind,
    SymbolStatus, SymbolicError,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operation {
    P(u64),
    BetaP(u64),
    Mult(ExtPolynomial),
    SubstZero,
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operation::P(i) => write!(f, "P^{i}"),
            Operation::BetaP(i) => write!(f, "bP^{i}"),
            Operation::Mult(_) => write!(f, "mult"),
            Operation::SubstZero => write!(f, "subst-zero"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub op: Operation,
    pub before: ExtPolynomial,
    pub after: ExtPolynomial,
    pub killed_symbols: Vec<ExtSymbol>,
}

impl Serialize for TraceStep {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let factor = match &self.op {
            Operation::Mult(f) => Some(f),
            _ => None,
        };
        let mut st = serializer.serialize_struct("TraceStep", 5)?;
        st.serialize_field("op", &self.op.to_string())?;
        st.serialize_field("before", &self.before)?;
        st.serialize_field("after", &self.after)?;
        st.serialize_field("killed_symbols", &self.killed_symbols)?;
        if let Some(f) = factor {
            st.serialize_field("factor", f)?;
        } else {
            st.skip_field("factor")?;
        }
        st.end()
    }
}

/// Where the first relation of a trace comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// The reduced coproduct of `ξ_generator^{p^power}`.
    Coproduct { generator: usize, power: u32 },
    /// A relation supplied by the caller (already known to hold).
    Given,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationTrace {
    pub profile: ProfileFunction,
    pub provenance: Provenance,
    pub initial: ExtPolynomial,
    pub steps: Vec<TraceStep>,
    #[serde(rename = "final")]
    pub final_relation: ExtPolynomial,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("initial relation does not match its provenance")]
    Provenance,
    #[error("step {0} does not start where the previous one ended")]
    Discontinuity(usize),
    #[error("step {0} does not reproduce its recorded result")]
    Mismatch(usize),
    #[error("step {0} violates the bidegree law of its operation")]
    Bidegree(usize),
    #[error("final relation differs from the last step")]
    Final,
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

impl DerivationTrace {
    fn start(pf: &ProfileFunction, provenance: Provenance, initial: ExtPolynomial) -> Self {
        DerivationTrace {
            profile: pf.clone(),
            provenance,
            final_relation: initial.clone(),
            initial,
            steps: Vec::new(),
        }
    }

    /// Applies `op`, then substitutes zeros if anything vanishes.
    fn apply(&mut self, op: Operation) -> Result<(), SymbolicError> {
        let before = self.final_relation.clone();
        let after = run_op(&op, &before);
        self.steps.push(TraceStep {
            op,
            before,
            after: after.clone(),
            killed_symbols: Vec::new(),
        });
        let (norm, killed) = normalize(&self.profile, &after)?;
        if !killed.is_empty() {
            self.steps.push(TraceStep {
                op: Operation::SubstZero,
                before: after,
                after: norm.clone(),
                killed_symbols: killed,
            });
        }
        self.final_relation = norm;
        Ok(())
    }

    fn normalize_current(&mut self) -> Result<(), SymbolicError> {
        let before = self.final_relation.clone();
        let (norm, killed) = normalize(&self.profile, &before)?;
        if !killed.is_empty() {
            self.steps.push(TraceStep {
                op: Operation::SubstZero,
                before,
                after: norm.clone(),
                killed_symbols: killed,
            });
        }
        self.final_relation = norm;
        Ok(())
    }

    /// Re-derives every step from the previous line and checks the
    /// recorded results, the killed symbols' status, and bidegrees.
    pub fn replay(&self) -> Result<(), ReplayError> {
        let pf = &self.profile;
        if let Provenance::Coproduct { generator, power } = self.provenance {
            match relation_from_coproduct(pf, generator, power)? {
                CoproductRelation::Relation(r) if r == self.initial => {}
                _ => return Err(ReplayError::Provenance),
            }
        }
        let p = pf.prime().as_u64();
        let mut current = &self.initial;
        for (idx, step) in self.steps.iter().enumerate() {
            if &step.before != current {
                return Err(ReplayError::Discontinuity(idx));
            }
            match &step.op {
                Operation::SubstZero => {
                    let (norm, killed) = normalize(pf, &step.before)?;
                    if norm != step.after || killed != step.killed_symbols {
                        return Err(ReplayError::Mismatch(idx));
                    }
                    if killed.iter().any(|x| symbol_status(pf, x.t, x.s) != SymbolStatus::Zero) {
                        return Err(ReplayError::Mismatch(idx));
                    }
                }
                op => {
                    if run_op(op, &step.before) != step.after || !step.killed_symbols.is_empty() {
                        return Err(ReplayError::Mismatch(idx));
                    }
                    if let (Some((s0, t0)), Some((s1, t1))) = (step.before.bidegree(), step.after.bidegree()) {
                        let expected = match op {
                            Operation::P(i) => (s0 + 2 * i * (p - 1), t0 * p as u128),
                            Operation::BetaP(i) => (s0 + 2 * i * (p - 1) + 1, t0 * p as u128),
                            Operation::Mult(f) => {
                                let (fs, ft) = f.bidegree().ok_or(ReplayError::Bidegree(idx))?;
                                (s0 + fs, t0 + ft)
                            }
                            Operation::SubstZero => unreachable!(),
                        };
                        if (s1, t1) != expected {
                            return Err(ReplayError::Bidegree(idx));
                        }
                    } else if !step.after.is_zero() {
                        return Err(ReplayError::Bidegree(idx));
                    }
                }
            }
            current = &step.after;
        }
        if current != &self.final_relation {
            return Err(ReplayError::Final);
        }
        Ok(())
    }
}

fn run_op(op: &Operation, poly: &ExtPolynomial) -> ExtPolynomial {
    match op {
        Operation::P(i) => steenrod_p(*i, poly),
        Operation::BetaP(i) => steenrod_beta_p(*i, poly),
        Operation::Mult(f) => poly.mul(f),
        Operation::SubstZero => poly.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoproductRelation {
    Relation(ExtPolynomial),
    /// Some coproduct term is not a product of two admissible h classes.
    Unavailable(String),
}

/// The relation `Σ c h_a h_b = 0` read off the reduced coproduct
/// `Σ c ξ_a ⊗ ξ_b` of `ξ_m^{p^s}`, when every term is a tensor of primitive
/// p-th powers of generators.
pub fn relation_from_coproduct(pf: &ProfileFunction, m: usize, s: u32) -> Result<CoproductRelation, SymbolicError> {
    let p = pf.prime();
    let x = pf.xi_power(m, s).ok_or(SymbolicError::ZeroElement { m, s })?;
    let delta = reduced_coproduct(pf, &x)?;
    if delta.is_zero() {
        return Ok(CoproductRelation::Unavailable(format!("xi_{m}^(p^{s}) is primitive")));
    }
    let mut rel = ExtPolynomial::zero(p);
    for (l, r, c) in delta.iter() {
        let (Some(a), Some(b)) = (l.as_xi_p_power(p), r.as_xi_p_power(p)) else {
            return Ok(CoproductRelation::Unavailable(format!(
                "term {l} (x) {r} is not a tensor of xi powers"
            )));
        };
        for (mono, (t, e)) in [(l, a), (r, b)] {
            if !is_primitive(pf, mono)? {
                return Ok(CoproductRelation::Unavailable(format!(
                    "{} is not primitive",
                    ExtSymbol::h(t as u32, e)
                )));
            }
        }
        let term = ExtPolynomial::symbol(p, ExtSymbol::h(a.0 as u32, a.1))
            .mul(&ExtPolynomial::symbol(p, ExtSymbol::h(b.0 as u32, b.1)));
        rel = rel.add(&term.scale(c));
    }
    Ok(CoproductRelation::Relation(rel))
}

/// A relation together with the trace that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub relation: ExtPolynomial,
    pub trace: DerivationTrace,
}

fn coproduct_trace(pf: &ProfileFunction, m: usize, s: u32) -> Result<DerivationTrace, SymbolicError> {
    match relation_from_coproduct(pf, m, s)? {
        CoproductRelation::Relation(r) => {
            let mut trace = DerivationTrace::start(pf, Provenance::Coproduct { generator: m, power: s }, r);
            trace.normalize_current()?;
            Ok(trace)
        }
        CoproductRelation::Unavailable(why) => Err(SymbolicError::DerivationFailed(format!(
            "no relation from xi_{m}^(p^{s}): {why}"
        ))),
    }
}

/// `βP^0`, `βP^1`, then `P^p, P^{p^2}, …, P^{p^ladder}`.
fn run_annihilation_chain(trace: &mut DerivationTrace, ladder: u32) -> Result<(), SymbolicError> {
    let p = trace.profile.prime().as_u64();
    trace.apply(Operation::BetaP(0))?;
    trace.apply(Operation::BetaP(1))?;
    for e in 1..=ladder {
        trace.apply(Operation::P(p.pow(e)))?;
    }
    Ok(())
}

fn check_valid(pf: &ProfileFunction) -> Result<(), SymbolicError> {
    if pf.is_valid() {
        Ok(())
    } else {
        Err(SymbolicError::InvalidProfile(pf.to_string()))
    }
}

fn b_shape(p: crate::arith::Prime, parts: &[((u32, u32), u64)]) -> ExtPolynomial {
    ExtPolynomial::b_monomial(p, parts)
}

/// A power of `b_{t,s}` annihilates `b_{n,k}`: derives
/// `b_{n,k} · b_{t,s}^{p^{k-t-s}} = 0` from the coproduct of `ξ_{t+n}^{p^s}`.
pub fn derive_prop_annihilator(
    pf: &ProfileFunction,
    t: u32,
    s: u32,
    n: u32,
    k: u32,
) -> Result<Derivation, SymbolicError> {
    check_valid(pf)?;
    let fail = |what: String| Err(SymbolicError::Hypothesis(what));
    if t == 0 || t >= n {
        return fail(format!("need 0 < t < n, got t={t}, n={n}"));
    }
    if let Some(i) = (1..t).find(|&i| pf.n(i as usize) > 0) {
        return fail(format!("xi_{i} must vanish for i < t={t}"));
    }
    if s >= t {
        return fail(format!("need s < t, got s={s}, t={t}"));
    }
    if pf.n(t as usize) != s + 1 {
        return fail(format!("need xi_{t}^(p^{}) = 0 != xi_{t}^(p^{s})", s + 1));
    }
    if k < s + t + 1 {
        return fail(format!("need k >= s+t+1 = {}, got k={k}", s + t + 1));
    }
    if let Some(i) = (1..n).find(|&i| pf.n(i as usize) > k) {
        return fail(format!("xi_{i}^(p^{k}) must vanish for i < n={n}"));
    }
    if pf.n(n as usize) <= k {
        return fail(format!("need xi_{n}^(p^{k}) != 0"));
    }
    let mut trace = coproduct_trace(pf, (t + n) as usize, s)?;
    run_annihilation_chain(&mut trace, k - t - s - 1)?;
    let d = k - t - s;
    let expected = b_shape(pf.prime(), &[((n, k), 1), ((t, s), pf.prime().as_u64().pow(d))]);
    if !trace.final_relation.equals_up_to_scalar(&expected) {
        return Err(SymbolicError::DerivationFailed(format!(
            "chain ended in {} instead of a multiple of {expected}",
            trace.final_relation
        )));
    }
    Ok(Derivation {
        relation: trace.final_relation.clone(),
        trace,
    })
}

/// Two Serre elements whose product is nilpotent (possibly the same one twice).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SerrePair {
    pub first: ExtSymbol,
    pub second: ExtSymbol,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaWitness {
    pub pair: SerrePair,
    /// `b_{t,M}^i b_{n,N}^{j'} = 0`.
    pub relation: ExtPolynomial,
    pub trace: DerivationTrace,
}

/// Splits a single-term relation `c · b_{t,s}^i b_{n,k}^j` into its b factors,
/// requiring every symbol to be admissible.
pub fn lemma_input(pf: &ProfileFunction, relation: &ExtPolynomial) -> Option<Vec<((u32, u32), u64)>> {
    let (m, _) = relation.as_monomial()?;
    if !m.h_part().is_empty() || m.b_part().is_empty() || m.b_part().len() > 2 {
        return None;
    }
    let parts: Vec<_> = m.b_part().iter().map(|(&k, &e)| (k, e)).collect();
    parts
        .iter()
        .all(|&((t, s), _)| symbol_status(pf, t, s) == SymbolStatus::Valid)
        .then_some(parts)
}

fn top_power(pf: &ProfileFunction, t: u32) -> u32 {
    pf.n(t as usize) - 1
}

/// From `b_{t,s}^i b_{n,k}^j = 0`, produces a nilpotent product of the Serre
/// elements `b_{t,M}` and `b_{n,N}`, where `ξ_t^{p^M}` and `ξ_n^{p^N}` are
/// the last nonzero p-th powers.
pub fn derive_lemma_witness(pf: &ProfileFunction, relation: &ExtPolynomial) -> Result<LemmaWitness, SymbolicError> {
    let p = pf.prime();
    let parts = lemma_input(pf, relation).ok_or_else(|| {
        SymbolicError::Hypothesis(format!(
            "{relation} is not a monomial in one or two admissible b symbols"
        ))
    })?;
    let mut trace = DerivationTrace::start(pf, Provenance::Given, relation.clone());

    let headroom = |&((t, s), _): &((u32, u32), u64)| top_power(pf, t) - s;
    let shift = parts.iter().map(headroom).min().expect("nonempty");
    for _ in 0..shift {
        trace.apply(Operation::P(0))?;
    }
    let current = |trace: &DerivationTrace| lemma_input(pf, &trace.final_relation).expect("P^0 keeps the shape");
    let parts = current(&trace);
    if parts.iter().all(|x| headroom(x) == 0) {
        let first = ExtSymbol::b(parts[0].0 .0, parts[0].0 .1);
        let second = parts.last().map(|x| ExtSymbol::b(x.0 .0, x.0 .1)).expect("nonempty");
        return Ok(LemmaWitness {
            pair: SerrePair { first, second },
            relation: trace.final_relation.clone(),
            trace,
        });
    }
    // exactly two symbols, one at its top power
    let (top, low) = if headroom(&parts[0]) == 0 {
        (parts[0], parts[1])
    } else {
        (parts[1], parts[0])
    };
    let ((n, big_n), j) = top;
    let ((t, s), i) = low;
    let m_top = top_power(pf, t);
    let mut d = 0u32;
    while p.as_u64().pow(d) <= i.max(j) {
        d += 1;
    }
    let pd = p.as_u64().pow(d);
    if pd > j {
        trace.apply(Operation::Mult(b_shape(p, &[((n, big_n), pd - j)])))?;
    }
    for e in 0..(m_top - s) {
        trace.apply(Operation::P(p.as_u64().pow(d + e)))?;
    }
    let expected = b_shape(p, &[((t, m_top), i), ((n, big_n), p.as_u64().pow(d + m_top - s))]);
    if !trace.final_relation.equals_up_to_scalar(&expected) {
        return Err(SymbolicError::DerivationFailed(format!(
            "nilpotence chain ended in {}",
            trace.final_relation
        )));
    }
    let (a, b) = (ExtSymbol::b(t, m_top), ExtSymbol::b(n, big_n));
    Ok(LemmaWitness {
        pair: SerrePair {
            first: a.min(b),
            second: a.max(b),
        },
        relation: trace.final_relation.clone(),
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum TheoremRoute {
    /// `ξ_i = 0` for `i < n`: the chain from `h_{n,n} h_{n,0} = 0`.
    FirstGenerator { n: u32, d: u32 },
    /// The first nonzero entry is at `t < n` and the coproduct of `ξ_{2n}` gives a clean chain.
    General { t: u32, n: u32 },
    /// Some `ξ_k^{p^{2t}} ≠ 0` with `k > t`: an annihilator relation.
    Annihilator { t: u32, s: u32, n: u32, k: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremWitness {
    pub route: TheoremRoute,
    pub relation: ExtPolynomial,
    pub trace: DerivationTrace,
    /// `P^{p^{n-1}}` applied to the relation in the general case.
    pub cleaner: Option<TraceStep>,
}

/// Derives a monomial relation between b symbols for a profile outside the
/// staircase `(1, 2, 3, …)`.
pub fn derive_theorem_witness(pf: &ProfileFunction) -> Result<TheoremWitness, SymbolicError> {
    check_valid(pf)?;
    let p = pf.prime().as_u64();
    let len = pf.len() as u32;
    let Some(n) = (1..=len).find(|&i| pf.n(i as usize) > i) else {
        return Err(SymbolicError::NotApplicable(format!(
            "{pf} lies inside the staircase (1,2,3,...)"
        )));
    };
    let nn = pf.n(n as usize);
    let first = (1..n).find(|&i| pf.n(i as usize) > 0);

    let Some(t) = first else {
        let d = nn - n;
        let mut trace = coproduct_trace(pf, (2 * n) as usize, 0)?;
        run_annihilation_chain(&mut trace, d - 1)?;
        let expected = b_shape(pf.prime(), &[((n, n), p.pow(d)), ((n, d), 1)]);
        if !trace.final_relation.equals_up_to_scalar(&expected) {
            return Err(SymbolicError::DerivationFailed(format!(
                "chain ended in {} instead of {expected}",
                trace.final_relation
            )));
        }
        return Ok(TheoremWitness {
            route: TheoremRoute::FirstGenerator { n, d },
            relation: trace.final_relation.clone(),
            trace,
            cleaner: None,
        });
    };

    // an entry above 2t past position t switches to the annihilator route
    if let Some(big_n) = (t + 1..=len).find(|&k| pf.n(k as usize) > 2 * t) {
        return annihilator_route(pf, t, big_n);
    }
    if n > 2 * t - 1 {
        return Err(SymbolicError::DerivationFailed(format!(
            "condition n <= 2t-1 fails for t={t}, n={n}"
        )));
    }
    for j in t..=n {
        for (m, s) in [(2 * n - j, j), (j, 0)] {
            if let Some(x) = pf.xi_power(m as usize, s) {
                if !is_primitive(pf, &x)? {
                    return Err(SymbolicError::DerivationFailed(format!(
                        "xi_{m}^(p^{s}) is not primitive"
                    )));
                }
            }
        }
    }
    let mut trace = coproduct_trace(pf, (2 * n) as usize, 0)?;
    let mut expected_start = ExtPolynomial::zero(pf.prime());
    for j in t..=n {
        let term = ExtPolynomial::symbol(pf.prime(), ExtSymbol::h(2 * n - j, j))
            .mul(&ExtPolynomial::symbol(pf.prime(), ExtSymbol::h(j, 0)));
        expected_start = expected_start.add(&term);
    }
    let (expected_start, _) = normalize(pf, &expected_start)?;
    if !trace.final_relation.equals_up_to_scalar(&expected_start) {
        return Err(SymbolicError::DerivationFailed(format!(
            "coproduct of xi_{} gave {}",
            2 * n,
            trace.final_relation
        )));
    }
    run_annihilation_chain(&mut trace, n - 2)?;
    let expected = b_shape(pf.prime(), &[((n, n), p.pow(n - 1)), ((n, n - 1), 1)]);
    if !trace.final_relation.equals_up_to_scalar(&expected) {
        return Err(SymbolicError::DerivationFailed(format!(
            "chain ended in {} instead of {expected}",
            trace.final_relation
        )));
    }
    let relation = trace.final_relation.clone();
    let op = Operation::P(p.pow(n - 1));
    let cleaner_poly = run_op(&op, &relation);
    let cleaner = TraceStep {
        op,
        before: relation.clone(),
        after: cleaner_poly,
        killed_symbols: Vec::new(),
    };
    Ok(TheoremWitness {
        route: TheoremRoute::General { t, n },
        relation,
        trace,
        cleaner: Some(cleaner),
    })
}

fn annihilator_route(pf: &ProfileFunction, t: u32, big_n: u32) -> Result<TheoremWitness, SymbolicError> {
    let s = pf.n(t as usize) - 1;
    let mut attempts = vec![(big_n, 2 * t)];
    // other admissible (n, k) pairs, in case the preferred one leaves extra terms
    for n in t + 1..=pf.len() as u32 {
        for k in s + t + 1..pf.n(n as usize) {
            if !attempts.contains(&(n, k)) {
                attempts.push((n, k));
            }
        }
    }
    let mut last_err = None;
    for (n, k) in attempts {
        match derive_prop_annihilator(pf, t, s, n, k) {
            Ok(Derivation { relation, trace }) => {
                return Ok(TheoremWitness {
                    route: TheoremRoute::Annihilator { t, s, n, k },
                    relation,
                    trace,
                    cleaner: None,
                })
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| SymbolicError::DerivationFailed("no annihilator applies".into())))
}

/// Whether `poly` is a single monomial in one or two admissible b symbols.
pub fn is_b_monomial_relation(pf: &ProfileFunction, poly: &ExtPolynomial) -> bool {
    lemma_input(pf, poly).is_some()
}

/// Scans the coproducts of `ξ_m^{p^s}` for `m ≤ generator_bound` and runs
/// `βP^0, βP^1, P^p, …, P^{p^chain_bound}` on each relation found, stopping
/// at the first single monomial in admissible b symbols.
pub fn search_relation(
    pf: &ProfileFunction,
    generator_bound: usize,
    chain_bound: u32,
) -> Result<Option<Derivation>, SymbolicError> {
    check_valid(pf)?;
    let p = pf.prime().as_u64();
    for m in 1..=generator_bound {
        for s in 0..pf.n(m) {
            let Ok(CoproductRelation::Relation(rel)) = relation_from_coproduct(pf, m, s) else {
                continue;
            };
            let mut trace = DerivationTrace::start(pf, Provenance::Coproduct { generator: m, power: s }, rel);
            let mut ops = vec![Operation::BetaP(0), Operation::BetaP(1)];
            ops.extend((1..=chain_bound).map(|e| Operation::P(p.pow(e))));
            if trace.normalize_current().is_err() {
                continue;
            }
            for op in ops {
                if trace.final_relation.is_zero() || trace.apply(op).is_err() {
                    break;
                }
                if is_b_monomial_relation(pf, &trace.final_relation) {
                    return Ok(Some(Derivation {
                        relation: trace.final_relation.clone(),
                        trace,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Symbols of a monomial relation, for reports.
pub fn relation_symbols(poly: &ExtPolynomial) -> Vec<ExtSymbol> {
    poly.iter()
        .flat_map(|(m, _): (&ExtMonomial, u32)| m.symbols())
        .filter(|s| s.kind == SymbolKind::B)
        .collect()
}
