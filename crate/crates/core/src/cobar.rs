//! The normalized cobar complex of `B_*`.
//!
//! Cochains of bidegree `(s, t)` are spanned by words `[a_1|…|a_s]` of
//! positive-degree basis monomials with degrees summing to `t`, and
//!
//! ```text
//! d[a_1|…|a_s] = Σ_i (-1)^i [a_1|…|Δ'(a_i)|…|a_s]
//! ```
//!
//! where `Δ'` is the reduced coproduct. Words are ordered lexicographically,
//! each factor compared by degree and then by [`Monomial`] order.
//!
//! [`CobarComplex`] holds the monomial and coproduct tables for one profile and
//! packs words into `u128` keys whose numeric order is the word order. The free
//! functions [`cobar_basis`] and [`differential`] work straight from the Hopf
//! algebra and serve as a cross-check.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use crate::arith::Prime;
use crate::fp_linalg::{ColumnSpan, FpMatrix, SparseVec};
use crate::hopf::{basis_up_to, reduced_coproduct, HopfError, Monomial, ProfileFunction};
use crate::par;
use crate::symbolic::{symbol_status, ExtMonomial, ExtSymbol, SymbolKind, SymbolStatus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CobarError {
    #[error("profile {0} is not valid")]
    InvalidProfile(String),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("chains belong to different profiles")]
    ProfileMismatch,
    #[error("chain in bidegree ({s},{t}) is not a cocycle")]
    NotACocycle { s: usize, t: u64 },
    #[error("{0} is not a primitive class in this profile")]
    InvalidSymbol(ExtSymbol),
    #[error("monomial {0} is not in the complex")]
    UnknownMonomial(String),
    #[error(transparent)]
    Hopf(#[from] HopfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CobarConfig {
    /// Largest cochain degree `s` handled.
    pub max_s: usize,
    /// Largest internal degree `t` handled.
    pub max_t: u64,
    /// Largest number of words in any basis that gets enumerated.
    pub max_words: usize,
}

impl Default for CobarConfig {
    fn default() -> Self {
        CobarConfig {
            max_s: 8,
            max_t: 256,
            max_words: 250_000,
        }
    }
}

impl CobarConfig {
    /// Budget for long-running verifications.
    pub fn heavy() -> Self {
        CobarConfig {
            max_s: 10,
            max_t: 512,
            max_words: 12_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub degree: u64,
    pub mono: Monomial,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorWord {
    pub factors: Vec<Factor>,
}

impl TensorWord {
    pub fn new(p: Prime, monos: Vec<Monomial>) -> Self {
        TensorWord {
            factors: monos
                .into_iter()
                .map(|mono| Factor {
                    degree: mono.degree(p),
                    mono,
                })
                .collect(),
        }
    }

    pub fn s(&self) -> usize {
        self.factors.len()
    }

    pub fn t(&self) -> u64 {
        self.factors.iter().map(|f| f.degree).sum()
    }

    pub fn concat(&self, other: &TensorWord) -> TensorWord {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        TensorWord { factors }
    }
}

impl fmt::Display for TensorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write!(f, "{}", x.mono)?;
        }
        write!(f, "]")
    }
}

/// An F_p-linear combination of words of one bidegree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CobarChain {
    profile: ProfileFunction,
    s: usize,
    t: u64,
    terms: BTreeMap<TensorWord, u32>,
}

impl CobarChain {
    pub fn zero(pf: &ProfileFunction, s: usize, t: u64) -> Self {
        CobarChain {
            profile: pf.clone(),
            s,
            t,
            terms: BTreeMap::new(),
        }
    }

    /// The single word `c·w`; every factor must be a nonzero positive-degree
    /// monomial of the profile.
    pub fn from_word(pf: &ProfileFunction, word: TensorWord, c: u32) -> Result<Self, CobarError> {
        for f in &word.factors {
            pf.check_monomial(&f.mono)?;
            if f.mono.is_one() {
                return Err(CobarError::UnknownMonomial("1".into()));
            }
        }
        let mut out = CobarChain::zero(pf, word.s(), word.t());
        out.add_term(word, c);
        Ok(out)
    }

    pub fn profile(&self) -> &ProfileFunction {
        &self.profile
    }

    pub fn bidegree(&self) -> (usize, u64) {
        (self.s, self.t)
    }

    pub fn add_term(&mut self, word: TensorWord, c: u32) {
        debug_assert_eq!((word.s(), word.t()), (self.s, self.t));
        let p = self.profile.prime();
        let c = c % p.get();
        if c == 0 {
            return;
        }
        match self.terms.entry(word) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let n = p.add(*o.get(), c);
                if n == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = n;
                }
            }
        }
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

    pub fn coeff(&self, word: &TensorWord) -> u32 {
        self.terms.get(word).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TensorWord, u32)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn scale(&self, c: u32) -> CobarChain {
        let mut out = CobarChain::zero(&self.profile, self.s, self.t);
        let p = self.profile.prime();
        for (w, &v) in &self.terms {
            out.add_term(w.clone(), p.mul(v, c % p.get()));
        }
        out
    }

    pub fn add(&self, other: &CobarChain) -> Result<CobarChain, CobarError> {
        if self.profile != other.profile {
            return Err(CobarError::ProfileMismatch);
        }
        if self.bidegree() != other.bidegree() {
            return Err(CobarError::BoundExceeded(format!(
                "cannot add chains of bidegrees {:?} and {:?}",
                self.bidegree(),
                other.bidegree()
            )));
        }
        let mut out = self.clone();
        for (w, &v) in &other.terms {
            out.add_term(w.clone(), v);
        }
        Ok(out)
    }

    /// One line per word, `coeff*[m1|m2|...]`, in basis order; `0` when empty.
    pub fn dump(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(w, c)| format!("{c}*{w}"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Display for CobarChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("{c}*{w}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// All words of bidegree `(s, t)` in word order, enumerated from the basis of
/// `B_*` directly.
pub fn cobar_basis(pf: &ProfileFunction, s: usize, t: u64) -> Vec<TensorWord> {
    let p = pf.prime();
    let monos: Vec<Factor> = basis_up_to(pf, t)
        .into_iter()
        .map(|mono| Factor {
            degree: mono.degree(p),
            mono,
        })
        .collect();
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    extend_words(&monos, s, t, &mut prefix, &mut out);
    out
}

fn extend_words(monos: &[Factor], s: usize, t: u64, prefix: &mut Vec<Factor>, out: &mut Vec<TensorWord>) {
    if s == 0 {
        if t == 0 {
            out.push(TensorWord {
                factors: prefix.clone(),
            });
        }
        return;
    }
    for f in monos {
        if f.degree > t {
            break;
        }
        prefix.push(f.clone());
        extend_words(monos, s - 1, t - f.degree, prefix, out);
        prefix.pop();
    }
}

/// The cobar differential computed directly from [`reduced_coproduct`].
pub fn differential(c: &CobarChain) -> CobarChain {
    let pf = &c.profile;
    let p = pf.prime();
    let mut out = CobarChain::zero(pf, c.s + 1, c.t);
    for (w, coeff) in c.iter() {
        for i in 0..w.s() {
            let sign = if i % 2 == 0 { p.neg(1) } else { 1 };
            let delta = reduced_coproduct(pf, &w.factors[i].mono).expect("chain factors lie in the profile");
            for (l, r, k) in delta.iter() {
                let mut monos: Vec<Monomial> = w.factors.iter().map(|f| f.mono.clone()).collect();
                monos.splice(i..=i, [l.clone(), r.clone()]);
                out.add_term(TensorWord::new(p, monos), p.mul(p.mul(sign, k), coeff));
            }
        }
    }
    out
}

/// Bilinear extension of word concatenation.
pub fn concat_product(a: &CobarChain, b: &CobarChain) -> Result<CobarChain, CobarError> {
    if a.profile != b.profile {
        return Err(CobarError::ProfileMismatch);
    }
    let p = a.profile.prime();
    let mut out = CobarChain::zero(&a.profile, a.s + b.s, a.t + b.t);
    for (u, x) in a.iter() {
        for (v, y) in b.iter() {
            out.add_term(u.concat(v), p.mul(x, y));
        }
    }
    Ok(out)
}

/// `(1/p)·C(p,i) mod p`, from the exact integer when it fits in a `u128`.
pub fn b_coefficient(p: Prime, i: u32) -> u32 {
    assert!(0 < i && i < p.get());
    let pp = p.get() as u128;
    let mut binom: Option<u128> = Some(1);
    for k in 1..=i as u128 {
        binom = binom.and_then(|b| b.checked_mul(pp - k + 1)).map(|b| b / k);
    }
    match binom {
        Some(b) => ((b / pp) % pp) as u32,
        None => {
            let sign = if i % 2 == 1 { 1 } else { p.neg(1) };
            p.mul(sign, p.inv(i))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolRep {
    /// The underlying power of `ξ_t` vanishes, so the class is zero.
    ZeroClass,
    Chain(CobarChain),
}

/// Cocycle representative of `h_{t,s}` or `b_{t,s}`.
pub fn symbol_rep(pf: &ProfileFunction, sym: ExtSymbol) -> Result<SymbolRep, CobarError> {
    match symbol_status(pf, sym.t, sym.s) {
        SymbolStatus::Zero => return Ok(SymbolRep::ZeroClass),
        SymbolStatus::Invalid => return Err(CobarError::InvalidSymbol(sym)),
        SymbolStatus::Valid => {}
    }
    let p = pf.prime();
    let ps = p.as_u64().pow(sym.s);
    let t = sym.t as usize;
    let chain = match sym.kind {
        SymbolKind::H => CobarChain::from_word(pf, TensorWord::new(p, vec![Monomial::xi_power(t, ps)]), 1)?,
        SymbolKind::B => {
            let mut c = CobarChain::zero(pf, 2, sym.internal_degree(p) as u64);
            for i in 1..p.get() {
                let left = Monomial::xi_power(t, i as u64 * ps);
                let right = Monomial::xi_power(t, (p.get() - i) as u64 * ps);
                c.add_term(TensorWord::new(p, vec![left, right]), b_coefficient(p, i));
            }
            c
        }
    };
    if !differential(&chain).is_zero() {
        return Err(CobarError::InvalidSymbol(sym));
    }
    Ok(SymbolRep::Chain(chain))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Vanishing {
    Zero,
    NonZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtVerdict {
    pub verdict: Vanishing,
    pub s: u64,
    pub t: u128,
    /// A cochain `y` with `d(y)` equal to the product of representatives.
    #[serde(skip)]
    pub certificate: Option<CobarChain>,
}

impl fmt::Display for ExtVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.verdict {
            Vanishing::Zero => "ZERO",
            Vanishing::NonZero => "NONZERO",
        };
        write!(f, "{v} ({},{})", self.s, self.t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassCoordinates {
    Coboundary,
    /// Coordinates in the cohomology basis chosen by [`CobarComplex::class_of`].
    Class(Vec<u32>),
}

type Word = u128;
type BasisCache = Mutex<HashMap<(usize, u64, u64), Arc<Vec<Word>>>>;

/// The cobar complex of one profile up to a degree bound.
#[derive(Debug)]
pub struct CobarComplex {
    pf: ProfileFunction,
    cfg: CobarConfig,
    monos: Vec<Monomial>,
    degree: Vec<u64>,
    weight: Vec<u64>,
    index: HashMap<Monomial, u32>,
    delta: Vec<Vec<(u32, u32, u32)>>,
    bits: u32,
    bases: BasisCache,
}

/// `(p^{n-1} - 1)/(p - 1)` for `ξ_n`; the reduced coproduct never raises it.
fn generator_weight(p: Prime, n: usize) -> u64 {
    (p.as_u64().pow(n as u32 - 1) - 1) / (p.as_u64() - 1)
}

impl CobarComplex {
    pub fn new(pf: &ProfileFunction, cfg: CobarConfig) -> Result<Self, CobarError> {
        if !pf.is_valid() {
            return Err(CobarError::InvalidProfile(pf.to_string()));
        }
        let p = pf.prime();
        let monos = basis_up_to(pf, cfg.max_t);
        let degree: Vec<u64> = monos.iter().map(|m| m.degree(p)).collect();
        let weight: Vec<u64> = monos
            .iter()
            .map(|m| {
                m.exponents()
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| e * generator_weight(p, i + 1))
                    .sum()
            })
            .collect();
        let index: HashMap<Monomial, u32> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i as u32)).collect();
        let delta = par::map(&monos, |m| {
            let sum = reduced_coproduct(pf, m).expect("basis monomials lie in the profile");
            sum.iter().map(|(l, r, c)| (index[l], index[r], c)).collect::<Vec<_>>()
        });
        let bits = (usize::BITS - monos.len().max(2).saturating_sub(1).leading_zeros()).max(1);
        if bits as usize * (cfg.max_s + 1) > 128 {
            return Err(CobarError::BoundExceeded(format!(
                "{} monomials up to degree {} are too many for words of length {}",
                monos.len(),
                cfg.max_t,
                cfg.max_s + 1
            )));
        }
        Ok(CobarComplex {
            pf: pf.clone(),
            cfg,
            monos,
            degree,
            weight,
            index,
            delta,
            bits,
            bases: Mutex::new(HashMap::new()),
        })
    }

    pub fn profile(&self) -> &ProfileFunction {
        &self.pf
    }

    pub fn config(&self) -> CobarConfig {
        self.cfg
    }

    fn check_bidegree(&self, s: usize, t: u64) -> Result<(), CobarError> {
        if s > self.cfg.max_s || t > self.cfg.max_t {
            return Err(CobarError::BoundExceeded(format!(
                "bidegree ({s},{t}) is outside s <= {}, t <= {}",
                self.cfg.max_s, self.cfg.max_t
            )));
        }
        Ok(())
    }

    fn pack(&self, idx: &[u32]) -> Word {
        idx.iter().fold(0u128, |acc, &i| (acc << self.bits) | i as u128)
    }

    fn unpack(&self, w: Word, s: usize, out: &mut Vec<u32>) {
        out.clear();
        let mask = (1u128 << self.bits) - 1;
        for k in (0..s).rev() {
            out.push(((w >> (self.bits as usize * k)) & mask) as u32);
        }
    }

    fn word_weight(&self, w: Word, s: usize) -> u64 {
        let mut idx = Vec::with_capacity(s);
        self.unpack(w, s, &mut idx);
        idx.iter().map(|&i| self.weight[i as usize]).sum()
    }

    fn to_word(&self, w: &TensorWord) -> Result<Word, CobarError> {
        let idx: Result<Vec<u32>, CobarError> = w
            .factors
            .iter()
            .map(|f| {
                self.index
                    .get(&f.mono)
                    .copied()
                    .ok_or_else(|| CobarError::UnknownMonomial(f.mono.to_string()))
            })
            .collect();
        Ok(self.pack(&idx?))
    }

    fn unpack_word(&self, w: Word, s: usize) -> TensorWord {
        let mut idx = Vec::with_capacity(s);
        self.unpack(w, s, &mut idx);
        TensorWord {
            factors: idx
                .iter()
                .map(|&i| Factor {
                    degree: self.degree[i as usize],
                    mono: self.monos[i as usize].clone(),
                })
                .collect(),
        }
    }

    /// Number of words of bidegree `(s, t)` with total weight exactly `w`, for
    /// every `w` that occurs.
    fn weight_profile(&self, s: usize, t: u64) -> BTreeMap<u64, u128> {
        let mut layer: HashMap<u64, BTreeMap<u64, u128>> = HashMap::new();
        layer.insert(0, BTreeMap::from([(0, 1)]));
        for _ in 0..s {
            let mut next: HashMap<u64, BTreeMap<u64, u128>> = HashMap::new();
            for (&d, ws) in &layer {
                for (i, &deg) in self.degree.iter().enumerate() {
                    if d + deg > t {
                        break;
                    }
                    let slot = next.entry(d + deg).or_default();
                    for (&w, &n) in ws {
                        *slot.entry(w + self.weight[i]).or_insert(0) += n;
                    }
                }
            }
            layer = next;
        }
        layer.remove(&t).unwrap_or_default()
    }

    /// Number of words of bidegree `(s, t)`.
    pub fn dim(&self, s: usize, t: u64) -> Result<u128, CobarError> {
        self.check_bidegree(s, t)?;
        Ok(self.weight_profile(s, t).values().sum())
    }

    fn dim_up_to_weight(&self, s: usize, t: u64, max_weight: u64) -> u128 {
        self.weight_profile(s, t).range(..=max_weight).map(|(_, &n)| n).sum()
    }

    /// Words of bidegree `(s, t)` and weight at most `max_weight`, sorted.
    fn basis_packed(&self, s: usize, t: u64, max_weight: u64) -> Result<Arc<Vec<Word>>, CobarError> {
        self.check_bidegree(s, t)?;
        let key = (s, t, max_weight);
        if let Some(b) = self.bases.lock().expect("basis memo").get(&key) {
            return Ok(b.clone());
        }
        let n = self.dim_up_to_weight(s, t, max_weight);
        if n > self.cfg.max_words as u128 {
            return Err(CobarError::BoundExceeded(format!(
                "{n} words in bidegree ({s},{t}) exceed the limit of {}",
                self.cfg.max_words
            )));
        }
        let words: Vec<Word> = if s == 0 {
            if t == 0 {
                vec![0]
            } else {
                Vec::new()
            }
        } else {
            let firsts: Vec<u32> = (0..self.monos.len() as u32)
                .filter(|&i| self.degree[i as usize] <= t && self.weight[i as usize] <= max_weight)
                .collect();
            par::map(&firsts, |&i| {
                let mut out = Vec::new();
                let mut prefix = vec![i];
                self.fill(
                    s,
                    t - self.degree[i as usize],
                    max_weight - self.weight[i as usize],
                    &mut prefix,
                    &mut out,
                );
                out
            })
            .concat()
        };
        let words = Arc::new(words);
        self.bases.lock().expect("basis memo").insert(key, words.clone());
        Ok(words)
    }

    fn fill(&self, s: usize, t: u64, w: u64, prefix: &mut Vec<u32>, out: &mut Vec<Word>) {
        if prefix.len() == s {
            if t == 0 {
                out.push(self.pack(prefix));
            }
            return;
        }
        let left = (s - prefix.len() - 1) as u64;
        let min_deg = self.degree[0];
        for i in 0..self.monos.len() {
            let d = self.degree[i];
            if d + left * min_deg > t {
                break;
            }
            if self.weight[i] > w {
                continue;
            }
            prefix.push(i as u32);
            self.fill(s, t - d, w - self.weight[i], prefix, out);
            prefix.pop();
        }
    }

    /// All words of bidegree `(s, t)` in word order.
    pub fn basis(&self, s: usize, t: u64) -> Result<Vec<TensorWord>, CobarError> {
        Ok(self
            .basis_packed(s, t, u64::MAX)?
            .iter()
            .map(|&w| self.unpack_word(w, s))
            .collect())
    }

    /// `d` of a single packed word, combined and sorted.
    fn d_word(&self, w: Word, s: usize) -> Vec<(Word, u32)> {
        let p = self.pf.prime();
        let mut idx = Vec::with_capacity(s);
        self.unpack(w, s, &mut idx);
        let mut out: Vec<(Word, u32)> = Vec::new();
        let mut buf = Vec::with_capacity(s + 1);
        for i in 0..s {
            let sign = if i % 2 == 0 { p.neg(1) } else { 1 };
            for &(l, r, c) in &self.delta[idx[i] as usize] {
                buf.clear();
                buf.extend_from_slice(&idx[..i]);
                buf.push(l);
                buf.push(r);
                buf.extend_from_slice(&idx[i + 1..]);
                out.push((self.pack(&buf), p.mul(sign, c)));
            }
        }
        out.sort_unstable_by_key(|&(w, _)| w);
        let mut merged: Vec<(Word, u32)> = Vec::with_capacity(out.len());
        for (w, c) in out {
            match merged.last_mut() {
                Some(last) if last.0 == w => last.1 = p.add(last.1, c),
                _ => merged.push((w, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0);
        merged
    }

    /// Column of `d` at a word, indexed by position in `rows`.
    fn column(&self, w: Word, s: usize, rows: &[Word]) -> SparseVec {
        self.d_word(w, s)
            .into_iter()
            .map(|(r, c)| {
                let pos = rows.binary_search(&r).expect("the complex is closed under d");
                (pos as u32, c)
            })
            .collect()
    }

    fn to_packed(&self, c: &CobarChain) -> Result<BTreeMap<Word, u32>, CobarError> {
        if c.profile != self.pf {
            return Err(CobarError::ProfileMismatch);
        }
        c.iter().map(|(w, v)| Ok((self.to_word(w)?, v))).collect()
    }

    fn unpack_chain(&self, s: usize, t: u64, terms: impl IntoIterator<Item = (Word, u32)>) -> CobarChain {
        let mut out = CobarChain::zero(&self.pf, s, t);
        for (w, c) in terms {
            out.add_term(self.unpack_word(w, s), c);
        }
        out
    }

    /// The differential, computed from the stored coproduct table.
    pub fn differential(&self, c: &CobarChain) -> Result<CobarChain, CobarError> {
        let (s, t) = c.bidegree();
        self.check_bidegree(s + 1, t)?;
        let p = self.pf.prime();
        let mut acc: BTreeMap<Word, u32> = BTreeMap::new();
        for (w, v) in self.to_packed(c)? {
            for (r, k) in self.d_word(w, s) {
                let e = acc.entry(r).or_insert(0);
                *e = p.add(*e, p.mul(v, k));
            }
        }
        Ok(self.unpack_chain(s + 1, t, acc.into_iter().filter(|&(_, c)| c != 0)))
    }

    /// Matrix of `d: C^{s,t} → C^{s+1,t}` in the word bases.
    pub fn differential_matrix(&self, s: usize, t: u64) -> Result<FpMatrix, CobarError> {
        let cols = self.basis_packed(s, t, u64::MAX)?;
        let rows = self.basis_packed(s + 1, t, u64::MAX)?;
        let columns = par::map(&cols, |&w| self.column(w, s, &rows));
        let transposed =
            FpMatrix::from_sparse_rows(self.pf.prime(), rows.len(), columns).expect("row indices in range");
        Ok(transposed.transpose())
    }

    /// `dim Ext^{s,t}`.
    pub fn cohomology_dim(&self, s: usize, t: u64) -> Result<usize, CobarError> {
        let n = self.basis_packed(s, t, u64::MAX)?.len();
        let out_rank = self.differential_matrix(s, t)?.rank();
        let in_rank = if s == 0 {
            0
        } else {
            self.differential_matrix(s - 1, t)?.rank()
        };
        Ok(n - out_rank - in_rank)
    }

    /// Coordinates of the class of a cocycle. The cohomology basis consists of
    /// the kernel vectors of `d` that are independent modulo coboundaries, taken
    /// in the order produced by [`FpMatrix::kernel_basis`].
    pub fn class_of(&self, c: &CobarChain) -> Result<ClassCoordinates, CobarError> {
        let (s, t) = c.bidegree();
        if !self.differential(c)?.is_zero() {
            return Err(CobarError::NotACocycle { s, t });
        }
        let here = self.basis_packed(s, t, u64::MAX)?;
        let mut span = ColumnSpan::new(self.pf.prime());
        let mut boundary_cols = 0;
        if s > 0 {
            let below = self.basis_packed(s - 1, t, u64::MAX)?;
            for col in par::map(&below, |&w| self.column(w, s - 1, &here)) {
                span.add_column(col);
                boundary_cols += 1;
            }
        }
        let mut class_index = HashMap::new();
        for (j, v) in self.differential_matrix(s, t)?.kernel_basis().into_iter().enumerate() {
            let sparse: SparseVec = v
                .iter()
                .enumerate()
                .filter(|&(_, &x)| x != 0)
                .map(|(i, &x)| (i as u32, x))
                .collect();
            let id = boundary_cols + j;
            if span.add_column(sparse) {
                let next = class_index.len();
                class_index.insert(id as u32, next);
            }
        }
        let target = self.sparse_target(c, &here)?;
        let combo = span
            .solve(target)
            .expect("every cocycle is a combination of kernel vectors");
        let mut coords = vec![0u32; class_index.len()];
        for (id, x) in combo {
            if let Some(&k) = class_index.get(&id) {
                coords[k] = x;
            }
        }
        Ok(if coords.iter().all(|&x| x == 0) {
            ClassCoordinates::Coboundary
        } else {
            ClassCoordinates::Class(coords)
        })
    }

    fn sparse_target(&self, c: &CobarChain, rows: &[Word]) -> Result<SparseVec, CobarError> {
        let mut v: SparseVec = Vec::with_capacity(c.len());
        for (w, x) in self.to_packed(c)? {
            let pos = rows
                .binary_search(&w)
                .map_err(|_| CobarError::UnknownMonomial(self.unpack_word(w, c.s).to_string()))?;
            v.push((pos as u32, x));
        }
        v.sort_unstable();
        Ok(v)
    }

    /// A cochain `y` with `d(y) = c`, or `None` when `c` is not a coboundary.
    ///
    /// Words of weight at most `w` span a subcomplex. The search solves inside
    /// these subcomplexes for increasing `w`, so a preimage is often found long
    /// before the whole bidegree is assembled; only the final weight proves
    /// that none exists.
    pub fn is_coboundary(&self, c: &CobarChain) -> Result<Option<CobarChain>, CobarError> {
        let (s, t) = c.bidegree();
        if c.is_zero() {
            return Ok(Some(CobarChain::zero(&self.pf, s.saturating_sub(1), t)));
        }
        if s == 0 {
            return Ok(None);
        }
        self.check_bidegree(s, t)?;
        let packed = self.to_packed(c)?;
        let w0 = packed.keys().map(|&w| self.word_weight(w, s)).max().unwrap_or(0);
        let col_weights = self.weight_profile(s - 1, t);
        let levels: Vec<u64> = col_weights.keys().copied().filter(|&w| w >= w0).collect();
        if levels.is_empty() {
            return Ok(None);
        }
        let max_level = *levels.last().expect("nonempty");
        for &w in &levels {
            let cols = self.basis_packed(s - 1, t, w)?;
            let rows = self.basis_packed(s, t, w)?;
            let target = self.sparse_target(c, &rows)?;
            if let Some(y) = self.solve_chunked(&cols, s - 1, &rows, target) {
                let y = self.unpack_chain(s - 1, t, y);
                let dy = self.differential(&y)?;
                assert_eq!(&dy, c, "preimage fails exact verification");
                return Ok(Some(y));
            }
            if w == max_level {
                break;
            }
        }
        Ok(None)
    }

    fn solve_chunked(&self, cols: &[Word], s: usize, rows: &[Word], target: SparseVec) -> Option<Vec<(Word, u32)>> {
        const CHUNK: usize = 1 << 15;
        let mut span = ColumnSpan::new(self.pf.prime());
        for chunk in cols.chunks(CHUNK) {
            for col in par::map(chunk, |&w| self.column(w, s, rows)) {
                span.add_column(col);
            }
            if let Some(x) = span.solve(target.clone()) {
                return Some(x.into_iter().map(|(j, v)| (cols[j as usize], v)).collect());
            }
        }
        None
    }

    /// Concatenation product of symbol representatives, tested for being a
    /// coboundary.
    pub fn verify_ext_monomial(&self, m: &ExtMonomial) -> Result<ExtVerdict, CobarError> {
        let p = self.pf.prime();
        let (s, t) = m.bidegree(p);
        if s > self.cfg.max_s as u64 || t > self.cfg.max_t as u128 {
            return Err(CobarError::BoundExceeded(format!(
                "bidegree ({s},{t}) is outside s <= {}, t <= {}",
                self.cfg.max_s, self.cfg.max_t
            )));
        }
        let mut product = CobarChain::from_word(&self.pf, TensorWord::default(), 1)?;
        let mut zero_class = false;
        let hs = m.h_part().iter().map(|&(t, s)| ExtSymbol::h(t, s));
        let bs = m
            .b_part()
            .iter()
            .flat_map(|(&(t, s), &e)| std::iter::repeat_n(ExtSymbol::b(t, s), e as usize));
        for sym in hs.chain(bs) {
            match symbol_rep(&self.pf, sym)? {
                SymbolRep::ZeroClass => zero_class = true,
                SymbolRep::Chain(c) => product = concat_product(&product, &c)?,
            }
        }
        if zero_class {
            return Ok(ExtVerdict {
                verdict: Vanishing::Zero,
                s,
                t,
                certificate: None,
            });
        }
        let certificate = self.is_coboundary(&product)?;
        Ok(ExtVerdict {
            verdict: if certificate.is_some() {
                Vanishing::Zero
            } else {
                Vanishing::NonZero
            },
            s,
            t,
            certificate,
        })
    }
}

/// Checks `m` in a complex sized for its bidegree.
pub fn verify_ext_monomial(pf: &ProfileFunction, m: &ExtMonomial, max_words: usize) -> Result<ExtVerdict, CobarError> {
    let (s, t) = m.bidegree(pf.prime());
    let cfg = CobarConfig {
        max_s: s as usize,
        max_t: u64::try_from(t).map_err(|_| CobarError::BoundExceeded(format!("internal degree {t}")))?,
        max_words,
    };
    CobarComplex::new(pf, cfg)?.verify_ext_monomial(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::ExtPolynomial;

    fn pf(entries: &[u32]) -> ProfileFunction {
        ProfileFunction::from_parts(3, entries).unwrap()
    }

    fn xi(t: usize, e: u64) -> Monomial {
        Monomial::xi_power(t, e)
    }

    fn word(pf: &ProfileFunction, monos: &[Monomial]) -> TensorWord {
        TensorWord::new(pf.prime(), monos.to_vec())
    }

    fn mono(p: u64, text: &str) -> ExtMonomial {
        let poly = ExtPolynomial::parse(Prime::new(p).unwrap(), text).unwrap();
        poly.as_monomial().unwrap().0.clone()
    }

    #[test]
    fn basis_examples() {
        let one = pf(&[1]);
        assert_eq!(cobar_basis(&one, 1, 4), vec![word(&one, &[xi(1, 1)])]);
        assert_eq!(cobar_basis(&one, 2, 16), vec![word(&one, &[xi(1, 2), xi(1, 2)])]);
        assert_eq!(cobar_basis(&one, 0, 0), vec![TensorWord::default()]);
        let c = CobarComplex::new(&pf(&[2, 1]), CobarConfig::default()).unwrap();
        for (s, t) in [(0, 0), (1, 16), (2, 32), (3, 48), (4, 40)] {
            assert_eq!(c.basis(s, t).unwrap(), cobar_basis(&pf(&[2, 1]), s, t));
            assert_eq!(c.dim(s, t).unwrap() as usize, c.basis(s, t).unwrap().len());
        }
    }

    #[test]
    fn differential_examples() {
        let p21 = pf(&[2, 1]);
        let c = CobarChain::from_word(&p21, word(&p21, &[xi(2, 1)]), 1).unwrap();
        let expected = CobarChain::from_word(&p21, word(&p21, &[xi(1, 3), xi(1, 1)]), 2).unwrap();
        assert_eq!(differential(&c), expected);
        let cx = CobarComplex::new(&p21, CobarConfig::default()).unwrap();
        assert_eq!(cx.differential(&c).unwrap(), expected);
        let prim = CobarChain::from_word(&p21, word(&p21, &[xi(1, 1)]), 1).unwrap();
        assert!(differential(&prim).is_zero());
        assert_eq!(expected.dump(), "2*[xi_1^3|xi_1^1]");
    }

    #[test]
    fn ext_of_one_generator() {
        let c = CobarComplex::new(&pf(&[1]), CobarConfig::default()).unwrap();
        for s in 0..=7 {
            for t in (0..=48).step_by(2) {
                let expected = (s % 2 == 0 && t == 6 * s as u64) || (s % 2 == 1 && t == 6 * (s as u64 - 1) + 4);
                assert_eq!(c.cohomology_dim(s, t).unwrap(), expected as usize, "({s},{t})");
            }
        }
    }

    #[test]
    fn class_and_products() {
        let p21 = pf(&[2, 1]);
        let cx = CobarComplex::new(&p21, CobarConfig::default()).unwrap();
        let h10 = CobarChain::from_word(&p21, word(&p21, &[xi(1, 1)]), 1).unwrap();
        let h11 = CobarChain::from_word(&p21, word(&p21, &[xi(1, 3)]), 1).unwrap();
        let prod = concat_product(&h11, &h10).unwrap();
        assert_eq!(cx.class_of(&prod).unwrap(), ClassCoordinates::Coboundary);
        let sym = concat_product(&h10, &h11).unwrap().add(&prod).unwrap();
        assert!(cx.is_coboundary(&sym).unwrap().is_some());
        assert!(matches!(cx.class_of(&h10).unwrap(), ClassCoordinates::Class(_)));
        let not_cocycle = CobarChain::from_word(&p21, word(&p21, &[xi(2, 1)]), 1).unwrap();
        assert!(matches!(cx.class_of(&not_cocycle), Err(CobarError::NotACocycle { .. })));
        assert_eq!(
            concat_product(&h10, &CobarChain::zero(&pf(&[1]), 0, 0)),
            Err(CobarError::ProfileMismatch)
        );
    }

    #[test]
    fn b_representatives() {
        let p3 = Prime::new(3).unwrap();
        assert_eq!((b_coefficient(p3, 1), b_coefficient(p3, 2)), (1, 1));
        for p in [3u64, 5, 7, 11, 13, 97, 131, 257] {
            let p = Prime::new(p).unwrap();
            for i in 1..p.get() {
                let sign = if i % 2 == 1 { 1 } else { p.neg(1) };
                assert_eq!(b_coefficient(p, i), p.mul(sign, p.inv(i)));
            }
        }
        let one = pf(&[1]);
        let SymbolRep::Chain(b) = symbol_rep(&one, ExtSymbol::b(1, 0)).unwrap() else {
            panic!()
        };
        assert_eq!(b.dump(), "1*[xi_1^1|xi_1^2]\n1*[xi_1^2|xi_1^1]");
        assert_eq!(symbol_rep(&one, ExtSymbol::h(1, 1)).unwrap(), SymbolRep::ZeroClass);
        assert_eq!(
            symbol_rep(&pf(&[2, 1]), ExtSymbol::h(2, 1)).unwrap(),
            SymbolRep::ZeroClass
        );
        assert!(matches!(
            symbol_rep(&pf(&[2, 1]), ExtSymbol::h(2, 0)),
            Err(CobarError::InvalidSymbol(_))
        ));
    }

    #[test]
    fn verify_examples() {
        let v = verify_ext_monomial(&pf(&[2, 1]), &mono(3, "h[1,1]*h[1,0]"), 100_000).unwrap();
        assert_eq!(v.to_string(), "ZERO (2,16)");
        let v = verify_ext_monomial(&pf(&[2, 1]), &mono(3, "b[1,1]*h[1,1]"), 100_000).unwrap();
        assert_eq!(v.to_string(), "ZERO (3,48)");
        let v = verify_ext_monomial(&pf(&[1]), &mono(3, "b[1,0]^3"), 100_000).unwrap();
        assert_eq!(v.to_string(), "NONZERO (6,36)");
        let r = verify_ext_monomial(&pf(&[2, 1]), &mono(3, "b[1,1]^4"), 1000);
        assert!(matches!(r, Err(CobarError::BoundExceeded(_))), "{r:?}");
    }
}
