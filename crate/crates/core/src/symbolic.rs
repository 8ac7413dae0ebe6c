//! Ext symbols `h_{t,s}`, `b_{t,s}`, polynomials in them, and the formal
//! action of the Steenrod operations `P^i` and `βP^i`.
//!
//! `h_{t,s} ∈ Ext^{1, 2p^s(p^t-1)}` and `b_{t,s} ∈ Ext^{2, 2p^{s+1}(p^t-1)}`.
//! The h symbols anticommute and square to zero; the b symbols are central.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{binom_mod_p, Prime};
use crate::hopf::{is_primitive, HopfError, ProfileFunction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("symbol {0} is nonzero but not primitive in B_*")]
    InvalidSymbol(ExtSymbol),
    #[error("cannot parse {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
    #[error("xi_{m}^(p^{s}) is zero in B_*")]
    ZeroElement { m: usize, s: u32 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("derivation failed: {0}")]
    DerivationFailed(String),
    #[error("profile {0} is not valid")]
    InvalidProfile(String),
    #[error(transparent)]
    Hopf(#[from] HopfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    H,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtSymbol {
    pub kind: SymbolKind,
    pub t: u32,
    pub s: u32,
}

impl ExtSymbol {
    pub fn h(t: u32, s: u32) -> Self {
        ExtSymbol {
            kind: SymbolKind::H,
            t,
            s,
        }
    }

    pub fn b(t: u32, s: u32) -> Self {
        ExtSymbol {
            kind: SymbolKind::B,
            t,
            s,
        }
    }

    pub fn homological_degree(self) -> u64 {
        match self.kind {
            SymbolKind::H => 1,
            SymbolKind::B => 2,
        }
    }

    pub fn internal_degree(self, p: Prime) -> u128 {
        let p = p.as_u64() as u128;
        let shift = match self.kind {
            SymbolKind::H => self.s,
            SymbolKind::B => self.s + 1,
        };
        2 * p.pow(shift) * (p.pow(self.t) - 1)
    }
}

impl fmt::Display for ExtSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            SymbolKind::H => 'h',
            SymbolKind::B => 'b',
        };
        write!(f, "{k}[{},{}]", self.t, self.s)
    }
}

impl FromStr for ExtSymbol {
    type Err = SymbolicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| SymbolicError::Parse {
            literal: s.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let kind = match compact.chars().next() {
            Some('h') => SymbolKind::H,
            Some('b') => SymbolKind::B,
            _ => return Err(bad("expected h[t,s] or b[t,s]")),
        };
        let inner = compact[1..]
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| bad("expected brackets"))?;
        let (t, sv) = inner.split_once(',').ok_or_else(|| bad("expected t,s"))?;
        let t: u32 = t.parse().map_err(|_| bad("t is not an integer"))?;
        let sv: u32 = sv.parse().map_err(|_| bad("s is not an integer"))?;
        if t == 0 {
            return Err(bad("t must be positive"));
        }
        Ok(ExtSymbol { kind, t, s: sv })
    }
}

impl Serialize for ExtSymbol {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtSymbol {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Whether the symbols `h_{t,s}`, `b_{t,s}` make sense in a given `B_*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SymbolStatus {
    /// `ξ_t^{p^s} = 0`.
    Zero,
    /// Nonzero and primitive.
    Valid,
    /// Nonzero but not primitive.
    Invalid,
}

pub fn symbol_status(pf: &ProfileFunction, t: u32, s: u32) -> SymbolStatus {
    match pf.xi_power(t as usize, s) {
        None => SymbolStatus::Zero,
        Some(m) => {
            if is_primitive(pf, &m).expect("xi_power returns basis monomials") {
                SymbolStatus::Valid
            } else {
                SymbolStatus::Invalid
            }
        }
    }
}

/// A monomial `±h_{a_1}…h_{a_m} · Π b_k^{e_k}` in canonical form: h indices
/// strictly increasing, b exponents positive.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtMonomial {
    hs: Vec<(u32, u32)>,
    bs: BTreeMap<(u32, u32), u64>,
}

impl ExtMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    /// Canonical form of `h_{a_1} … h_{a_m} · Π b`, with the sign of the
    /// sorting permutation; `None` when an h repeats.
    pub fn from_factors(hs: &[(u32, u32)], bs: &[((u32, u32), u64)]) -> Option<(Self, bool)> {
        let mut sorted = hs.to_vec();
        let mut negate = false;
        // insertion sort, counting transpositions
        for i in 1..sorted.len() {
            let mut j = i;
            while j > 0 && sorted[j - 1] > sorted[j] {
                sorted.swap(j - 1, j);
                negate = !negate;
                j -= 1;
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        let mut map = BTreeMap::new();
        for &(k, e) in bs {
            if e > 0 {
                *map.entry(k).or_insert(0) += e;
            }
        }
        Some((ExtMonomial { hs: sorted, bs: map }, negate))
    }

    pub fn h_part(&self) -> &[(u32, u32)] {
        &self.hs
    }

    pub fn b_part(&self) -> &BTreeMap<(u32, u32), u64> {
        &self.bs
    }

    pub fn is_one(&self) -> bool {
        self.hs.is_empty() && self.bs.is_empty()
    }

    /// Distinct symbols, h before b.
    pub fn symbols(&self) -> Vec<ExtSymbol> {
        self.hs
            .iter()
            .map(|&(t, s)| ExtSymbol::h(t, s))
            .chain(self.bs.keys().map(|&(t, s)| ExtSymbol::b(t, s)))
            .collect()
    }

    pub fn bidegree(&self, p: Prime) -> (u64, u128) {
        let mut s = 0u64;
        let mut t = 0u128;
        for &(a, b) in &self.hs {
            s += 1;
            t += ExtSymbol::h(a, b).internal_degree(p);
        }
        for (&(a, b), &e) in &self.bs {
            s += 2 * e;
            t += e as u128 * ExtSymbol::b(a, b).internal_degree(p);
        }
        (s, t)
    }

    /// Product with the sign from reordering the h factors.
    pub fn mul(&self, other: &ExtMonomial) -> Option<(ExtMonomial, bool)> {
        let hs: Vec<_> = self.hs.iter().chain(&other.hs).copied().collect();
        let bs: Vec<_> = self.bs.iter().chain(&other.bs).map(|(&k, &e)| (k, e)).collect();
        Self::from_factors(&hs, &bs)
    }
}

impl fmt::Display for ExtMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for &(t, s) in &self.hs {
            parts.push(ExtSymbol::h(t, s).to_string());
        }
        for (&(t, s), &e) in &self.bs {
            if e == 1 {
                parts.push(ExtSymbol::b(t, s).to_string());
            } else {
                parts.push(format!("{}^{e}", ExtSymbol::b(t, s)));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// An F_p-linear combination of [`ExtMonomial`]s.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtPolynomial {
    p: Prime,
    terms: BTreeMap<ExtMonomial, u32>,
}

impl ExtPolynomial {
    pub fn zero(p: Prime) -> Self {
        ExtPolynomial {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(p: Prime) -> Self {
        Self::from_monomial(p, ExtMonomial::one(), 1)
    }

    pub fn from_monomial(p: Prime, m: ExtMonomial, c: u32) -> Self {
        let mut out = Self::zero(p);
        out.add_term(m, c);
        out
    }

    pub fn symbol(p: Prime, sym: ExtSymbol) -> Self {
        let m = match sym.kind {
            SymbolKind::H => ExtMonomial::from_factors(&[(sym.t, sym.s)], &[]),
            SymbolKind::B => ExtMonomial::from_factors(&[], &[((sym.t, sym.s), 1)]),
        };
        Self::from_monomial(p, m.expect("single factor").0, 1)
    }

    /// `Π b_k^{e_k}` with coefficient one.
    pub fn b_monomial(p: Prime, bs: &[((u32, u32), u64)]) -> Self {
        let (m, _) = ExtMonomial::from_factors(&[], bs).expect("no h factors");
        Self::from_monomial(p, m, 1)
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn add_term(&mut self, m: ExtMonomial, c: u32) {
        let c = c % self.p.get();
        if c == 0 {
            return;
        }
        let p = self.p;
        let slot = self.terms.entry(m).or_insert(0);
        *slot = p.add(*slot, c);
        if *slot == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn add(&self, other: &ExtPolynomial) -> ExtPolynomial {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &ExtPolynomial) -> ExtPolynomial {
        self.add(&other.scale(self.p.neg(1)))
    }

    pub fn scale(&self, c: u32) -> ExtPolynomial {
        let mut out = Self::zero(self.p);
        for (m, &v) in &self.terms {
            out.add_term(m.clone(), self.p.mul(v, c % self.p.get()));
        }
        out
    }

    pub fn mul(&self, other: &ExtPolynomial) -> ExtPolynomial {
        let p = self.p;
        let mut out = Self::zero(p);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                if let Some((m, negate)) = a.mul(b) {
                    let c = p.mul(ca, cb);
                    out.add_term(m, if negate { p.neg(c) } else { c });
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ExtMonomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, m: &ExtMonomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// The single term, if there is exactly one.
    pub fn as_monomial(&self) -> Option<(&ExtMonomial, u32)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, &c)| (m, c))
        } else {
            None
        }
    }

    /// Common bidegree of all terms; `None` for zero or inhomogeneous input.
    pub fn bidegree(&self) -> Option<(u64, u128)> {
        let mut it = self.terms.keys().map(|m| m.bidegree(self.p));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Whether `self = c · other` for some nonzero scalar `c`.
    pub fn equals_up_to_scalar(&self, other: &ExtPolynomial) -> bool {
        if self.p != other.p || self.terms.len() != other.terms.len() {
            return false;
        }
        let Some((m, c)) = self.terms.iter().next() else {
            return true;
        };
        let d = other.coeff(m);
        if d == 0 {
            return false;
        }
        let ratio = self.p.mul(*c, self.p.inv(d));
        *self == other.scale(ratio)
    }

    /// Parses `c*h[t,s]*b[t,s]^e + ...`; coefficients default to 1 and a
    /// leading `-` negates a term.
    pub fn parse(p: Prime, literal: &str) -> Result<Self, SymbolicError> {
        let bad = |reason: String| SymbolicError::Parse {
            literal: literal.to_string(),
            reason,
        };
        let compact: String = literal.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty polynomial".into()));
        }
        // split at top-level + and -
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut depth = 0i32;
        let mut cur = String::new();
        let mut negative = false;
        for ch in compact.chars() {
            match ch {
                '[' => depth += 1,
                ']' => depth -= 1,
                _ => {}
            }
            if depth == 0 && (ch == '+' || ch == '-') {
                if !cur.is_empty() {
                    terms.push((negative, std::mem::take(&mut cur)));
                } else if !terms.is_empty() || ch == '+' {
                    return Err(bad("dangling sign".into()));
                }
                negative = ch == '-';
                continue;
            }
            cur.push(ch);
        }
        if cur.is_empty() {
            return Err(bad("trailing sign".into()));
        }
        terms.push((negative, cur));

        let mut out = Self::zero(p);
        for (negative, term) in terms {
            let mut coeff = 1u32;
            let mut hs = Vec::new();
            let mut bs = Vec::new();
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err(bad("empty factor".into()));
                }
                if factor.chars().all(|c| c.is_ascii_digit()) {
                    let v: u64 = factor.parse().map_err(|_| bad(format!("bad coefficient {factor}")))?;
                    coeff = p.mul(coeff, (v % p.as_u64()) as u32);
                    continue;
                }
                let (sym, exp) = match factor.split_once("]^") {
                    Some((head, e)) => {
                        let e: u64 = e.parse().map_err(|_| bad(format!("bad exponent in {factor}")))?;
                        (format!("{head}]"), e)
                    }
                    None => (factor.to_string(), 1),
                };
                let sym: ExtSymbol = sym.parse().map_err(|e: SymbolicError| bad(e.to_string()))?;
                match sym.kind {
                    SymbolKind::H => {
                        for _ in 0..exp.min(2) {
                            hs.push((sym.t, sym.s));
                        }
                    }
                    SymbolKind::B => bs.push(((sym.t, sym.s), exp)),
                }
            }
            if let Some((m, negate)) = ExtMonomial::from_factors(&hs, &bs) {
                let c = if negate != negative { p.neg(coeff) } else { coeff };
                out.add_term(m, c);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ExtPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for ExtPolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Substitutes zero for every symbol whose power vanishes in `B_*`.
///
/// Returns the normalized polynomial and the symbols that were killed. A
/// surviving symbol that is nonzero but not primitive is an error.
pub fn normalize(pf: &ProfileFunction, poly: &ExtPolynomial) -> Result<(ExtPolynomial, Vec<ExtSymbol>), SymbolicError> {
    let mut cache: HashMap<(u32, u32), SymbolStatus> = HashMap::new();
    let mut status = |t: u32, s: u32| *cache.entry((t, s)).or_insert_with(|| symbol_status(pf, t, s));
    let mut out = ExtPolynomial::zero(poly.prime());
    let mut killed = Vec::new();
    for (m, c) in poly.iter() {
        let syms = m.symbols();
        let zeros: Vec<ExtSymbol> = syms
            .iter()
            .copied()
            .filter(|x| status(x.t, x.s) == SymbolStatus::Zero)
            .collect();
        if !zeros.is_empty() {
            killed.extend(zeros);
            continue;
        }
        if let Some(bad) = syms.iter().find(|x| status(x.t, x.s) == SymbolStatus::Invalid) {
            return Err(SymbolicError::InvalidSymbol(*bad));
        }
        out.add_term(m.clone(), c);
    }
    killed.sort();
    killed.dedup();
    Ok((out, killed))
}

// Base-p digit-wise sub-numbers j of e with j <= cap, i.e. C(e, j) != 0 mod p.
fn lucas_submasks(p: u64, e: u64, cap: u64) -> Vec<u64> {
    let mut digits = Vec::new();
    let mut x = e;
    while x > 0 {
        digits.push(x % p);
        x /= p;
    }
    let mut out = vec![0u64];
    let mut place = 1u64;
    for d in digits {
        let mut next = Vec::with_capacity(out.len() * (d as usize + 1));
        for &base in &out {
            for k in 0..=d {
                let v = base + k * place;
                if v <= cap {
                    next.push(v);
                }
            }
        }
        out = next;
        place = place.saturating_mul(p);
    }
    out
}

/// A b monomial as `((t, s), exponent)` factors, with a coefficient.
type BTerm = (Vec<((u32, u32), u64)>, u32);

// P^i on a product of b's: each copy of b_k goes to b_{k,+1} (P^0) or b_k^p (P^1).
fn steenrod_on_bs(p: Prime, i: u64, bs: &BTreeMap<(u32, u32), u64>) -> Vec<BTerm> {
    let items: Vec<((u32, u32), u64)> = bs.iter().map(|(&k, &e)| (k, e)).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(items.len());
    distribute(p, &items, 0, i, 1, &mut chosen, &mut out);
    out
}

fn distribute(
    p: Prime,
    items: &[((u32, u32), u64)],
    idx: usize,
    remaining: u64,
    coeff: u32,
    chosen: &mut Vec<u64>,
    out: &mut Vec<BTerm>,
) {
    if idx == items.len() {
        if remaining == 0 {
            let mut factors = Vec::with_capacity(2 * items.len());
            for (&((t, s), e), &j) in items.iter().zip(chosen.iter()) {
                factors.push(((t, s + 1), e - j));
                factors.push(((t, s), j.checked_mul(p.as_u64()).expect("exponent overflow")));
            }
            out.push((factors, coeff));
        }
        return;
    }
    let (_, e) = items[idx];
    let candidates = if idx + 1 == items.len() {
        vec![remaining]
    } else {
        lucas_submasks(p.as_u64(), e, remaining)
    };
    for j in candidates {
        let c = binom_mod_p(e, j, p);
        if c == 0 {
            continue;
        }
        chosen.push(j);
        distribute(p, items, idx + 1, remaining - j, p.mul(coeff, c), chosen, out);
        chosen.pop();
    }
}

fn shift_hs(hs: &[(u32, u32)]) -> Vec<(u32, u32)> {
    hs.iter().map(|&(t, s)| (t, s + 1)).collect()
}

/// `P^i`, expanded by the Cartan formula from `P^0 h_{t,s} = h_{t,s+1}`,
/// `P^i h = 0` for `i ≥ 1`, `P^0 b_{t,s} = b_{t,s+1}`, `P^1 b = b^p`, and
/// `P^i b = 0` for `i ≥ 2`. No profile is consulted.
pub fn steenrod_p(i: u64, poly: &ExtPolynomial) -> ExtPolynomial {
    let p = poly.prime();
    let mut out = ExtPolynomial::zero(p);
    for (m, c) in poly.iter() {
        let hs = shift_hs(m.h_part());
        for (bs, k) in steenrod_on_bs(p, i, m.b_part()) {
            let (mono, negate) = ExtMonomial::from_factors(&hs, &bs).expect("shifted h's stay distinct");
            let v = p.mul(c, k);
            out.add_term(mono, if negate { p.neg(v) } else { v });
        }
    }
    out
}

/// `βP^i`: the Bockstein acts as a derivation with sign `(-1)^{left degree}`,
/// sending `P^0 h_{t,s}` to `b_{t,s}` and killing everything built from b's.
pub fn steenrod_beta_p(i: u64, poly: &ExtPolynomial) -> ExtPolynomial {
    let p = poly.prime();
    let mut out = ExtPolynomial::zero(p);
    for (m, c) in poly.iter() {
        let hs = m.h_part();
        if hs.is_empty() {
            continue;
        }
        let shifted = shift_hs(hs);
        let b_terms = steenrod_on_bs(p, i, m.b_part());
        for (k, &(t, s)) in hs.iter().enumerate() {
            let mut rest = shifted.clone();
            rest.remove(k);
            let sign_neg = k % 2 == 1;
            for (bs, coeff) in &b_terms {
                let mut bs = bs.clone();
                bs.push(((t, s), 1));
                let (mono, negate) = ExtMonomial::from_factors(&rest, &bs).expect("distinct h's");
                let v = p.mul(c, *coeff);
                out.add_term(mono, if negate != sign_neg { p.neg(v) } else { v });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn poly(s: &str) -> ExtPolynomial {
        ExtPolynomial::parse(p3(), s).unwrap()
    }

    fn pf(entries: &[u32]) -> ProfileFunction {
        ProfileFunction::from_parts(3, entries).unwrap()
    }

    #[test]
    fn symbol_degrees() {
        let p = p3();
        assert_eq!(ExtSymbol::h(1, 0).internal_degree(p), 4);
        assert_eq!(ExtSymbol::h(1, 1).internal_degree(p), 12);
        assert_eq!(ExtSymbol::b(1, 0).internal_degree(p), 12);
        assert_eq!(ExtSymbol::b(1, 1).internal_degree(p), 36);
        assert_eq!("b[2,1]".parse::<ExtSymbol>().unwrap(), ExtSymbol::b(2, 1));
        assert!("x[1,1]".parse::<ExtSymbol>().is_err());
    }

    #[test]
    fn anticommutation_and_squares() {
        let a = poly("h[1,1]*h[1,0]");
        assert_eq!(a, poly("-h[1,0]*h[1,1]"));
        assert_eq!(a.to_string(), "2*h[1,0]*h[1,1]");
        assert!(poly("h[1,0]*h[1,0]").is_zero());
        assert!(poly("h[1,0]^2").is_zero());
        let b = poly("b[1,1]^3*b[1,1]");
        assert_eq!(b.to_string(), "1*b[1,1]^4");
        assert_eq!(poly("0"), ExtPolynomial::zero(p3()));
    }

    #[test]
    fn status_and_normalize() {
        let q = pf(&[2, 1]);
        assert_eq!(symbol_status(&q, 1, 2), SymbolStatus::Zero);
        assert_eq!(symbol_status(&q, 1, 1), SymbolStatus::Valid);
        assert_eq!(symbol_status(&q, 2, 0), SymbolStatus::Invalid);
        let (n, killed) = normalize(&q, &poly("b[1,1]*h[1,1] - h[1,2]*b[1,0]")).unwrap();
        assert_eq!(n, poly("b[1,1]*h[1,1]"));
        assert_eq!(killed, vec![ExtSymbol::h(1, 2)]);
        assert_eq!(
            normalize(&q, &poly("h[2,0]*h[1,0]")),
            Err(SymbolicError::InvalidSymbol(ExtSymbol::h(2, 0)))
        );
    }

    #[test]
    fn generator_actions() {
        assert_eq!(steenrod_p(0, &poly("h[1,0]")), poly("h[1,1]"));
        assert!(steenrod_p(1, &poly("h[2,0]")).is_zero());
        assert!(steenrod_p(2, &poly("h[2,0]")).is_zero());
        assert_eq!(steenrod_beta_p(0, &poly("h[2,1]")), poly("b[2,1]"));
        assert!(steenrod_beta_p(1, &poly("h[2,1]")).is_zero());
        assert_eq!(steenrod_p(1, &poly("b[1,0]")), poly("b[1,0]^3"));
        assert!(steenrod_p(2, &poly("b[1,0]")).is_zero());
        assert!(steenrod_beta_p(0, &poly("b[1,0]")).is_zero());
    }

    #[test]
    fn annihilation_lines() {
        // n = 3, t = 2
        let r = poly("h[3,2]*h[2,0]");
        let a = steenrod_beta_p(0, &r);
        assert!(a.equals_up_to_scalar(&poly("b[3,2]*h[2,1] - h[3,3]*b[2,0]")));
        let b = steenrod_beta_p(1, &a);
        assert!(b.equals_up_to_scalar(&poly("b[3,2]^3*b[2,1] - b[3,3]*b[2,0]^3")));
    }

    #[test]
    fn ladder_step_keeps_monomials() {
        // i = 1 < p^d = 3
        let x = poly("b[2,0]*b[3,3]^3");
        assert_eq!(steenrod_p(3, &x), poly("b[2,1]*b[3,3]^9"));
    }

    #[test]
    fn lucas_submasks_match_binomials() {
        let p = p3();
        for e in 0..100u64 {
            let subs = lucas_submasks(3, e, u64::MAX);
            let direct: Vec<u64> = (0..=e).filter(|&j| binom_mod_p(e, j, p) != 0).collect();
            let mut subs = subs;
            subs.sort();
            assert_eq!(subs, direct);
        }
    }
}
