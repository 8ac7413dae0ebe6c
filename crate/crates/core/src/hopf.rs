//! Profile functions and the quotient Hopf algebras they define.
//!
//! A profile `(n_1, ..., n_m)` at an odd prime p names the quotient
//! `B_* = F_p[ξ_1, ξ_2, ...] / (ξ_i^{p^{n_i}})` of the dual Steenrod algebra's
//! polynomial part, with `deg ξ_i = 2(p^i - 1)` and the Milnor coproduct
//! `ξ_n ↦ Σ_i ξ_{n-i}^{p^i} ⊗ ξ_i`. Entries past the end of the list are zero,
//! so `ξ_i = 0` there.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{Prime, PrimeError};
use crate::fp_linalg::FpMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HopfError {
    #[error(transparent)]
    Prime(#[from] PrimeError),
    #[error("malformed profile literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
    #[error("profile entry n_{index} = {entry} is too large to represent")]
    EntryTooLarge { index: usize, entry: u32 },
    #[error("{monomial} is zero in B_* for profile {profile}")]
    NotInBasis { monomial: String, profile: String },
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),
    #[error("degree bound {given} is below {needed}, the degree of the largest truncated generator")]
    BoundTooSmall { given: u64, needed: u64 },
}

/// A finite profile function at an odd prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProfileFunction {
    p: Prime,
    entries: Vec<u32>,
}

/// A failed instance of the coideal inequality: the term
/// `ξ_{k-i}^{p^{i+n_k}} ⊗ ξ_i^{p^{n_k}}` of `Δ(ξ_k^{p^{n_k}})` survives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub k: usize,
    pub i: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (k, i) = (self.k, self.i);
        write!(
            f,
            "k={k}, i={i}: n_{} <= {i} + n_{k} and n_{i} <= n_{k} both fail",
            k - i
        )
    }
}

impl ProfileFunction {
    pub fn new(p: Prime, entries: Vec<u32>) -> Result<Self, HopfError> {
        for (idx, &e) in entries.iter().enumerate() {
            let i = idx as u32 + 1;
            // p^{n_i} * deg ξ_i must fit comfortably in a u64.
            let ok = p
                .checked_pow(e)
                .zip(p.checked_pow(i))
                .and_then(|(a, b)| a.checked_mul(2 * b))
                .is_some_and(|x| x < (1u64 << 62));
            if !ok {
                return Err(HopfError::EntryTooLarge {
                    index: idx + 1,
                    entry: e,
                });
            }
        }
        Ok(ProfileFunction { p, entries })
    }

    pub fn from_parts(p: u64, entries: &[u32]) -> Result<Self, HopfError> {
        Self::new(Prime::new(p)?, entries.to_vec())
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `n_i` (1-based); zero past the stored list.
    pub fn n(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.entries.get(i - 1).copied().unwrap_or(0)
    }

    pub fn max_entry(&self) -> u32 {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    /// Index of the last nonzero entry.
    pub fn support_len(&self) -> usize {
        self.entries.iter().rposition(|&e| e > 0).map_or(0, |i| i + 1)
    }

    pub fn generator_degree(&self, i: usize) -> u64 {
        2 * (self.p.as_u64().pow(i as u32) - 1)
    }

    /// `p^{n_i}`, the first vanishing power of `ξ_i`.
    pub fn height(&self, i: usize) -> u64 {
        self.p.as_u64().pow(self.n(i))
    }

    /// Whether `ξ_t^{p^s}` is zero in `B_*`.
    pub fn power_is_zero(&self, t: usize, s: u32) -> bool {
        t == 0 || s >= self.n(t)
    }

    /// `ξ_t^{p^s}` as a basis monomial, or `None` when it vanishes.
    pub fn xi_power(&self, t: usize, s: u32) -> Option<Monomial> {
        (!self.power_is_zero(t, s)).then(|| Monomial::xi_power(t, self.p.as_u64().pow(s)))
    }

    /// Whether the monomial is a nonzero basis element of `B_*`.
    pub fn contains(&self, m: &Monomial) -> bool {
        m.exponents()
            .iter()
            .enumerate()
            .all(|(idx, &e)| e < self.height(idx + 1))
    }

    pub fn check_monomial(&self, m: &Monomial) -> Result<(), HopfError> {
        if self.contains(m) {
            Ok(())
        } else {
            Err(HopfError::NotInBasis {
                monomial: m.to_string(),
                profile: self.to_string(),
            })
        }
    }

    pub fn degree(&self, m: &Monomial) -> u64 {
        m.degree(self.p)
    }

    /// Degree of the top class of `B_*`.
    pub fn top_degree(&self) -> u64 {
        (1..=self.len())
            .map(|i| (self.height(i) - 1) * self.generator_degree(i))
            .sum()
    }

    /// Entries with trailing zeros removed.
    pub fn trimmed(&self) -> ProfileFunction {
        ProfileFunction {
            p: self.p,
            entries: self.entries[..self.support_len()].to_vec(),
        }
    }

    /// Largest `k` the coideal inequality has to be checked for.
    pub fn validity_cutoff(&self) -> usize {
        (2 * (self.len() + self.max_entry() as usize)).max(2)
    }

    /// The first `(k, i)` for which `ξ_k^{p^{n_k}}` fails to generate a coideal.
    pub fn first_violation(&self) -> Option<Violation> {
        for k in 2..=self.validity_cutoff() {
            let nk = self.n(k);
            for i in 1..k {
                if !(self.n(k - i) <= i as u32 + nk || self.n(i) <= nk) {
                    return Some(Violation { k, i });
                }
            }
        }
        None
    }

    /// Whether `(ξ_i^{p^{n_i}})` is a Hopf ideal, i.e. the profile defines a
    /// quotient Hopf algebra.
    pub fn is_valid(&self) -> bool {
        self.first_violation().is_none()
    }

    /// Pointwise `n^b_i <= n^c_i`: `B^*` is a sub-Hopf algebra of `C^*`.
    pub fn is_sub_profile(&self, other: &ProfileFunction) -> Result<bool, HopfError> {
        if self.p != other.p {
            return Err(HopfError::PrimeMismatch(self.p.get(), other.p.get()));
        }
        let len = self.len().max(other.len());
        Ok((1..=len).all(|i| self.n(i) <= other.n(i)))
    }

    /// Whether every entry satisfies `n_i <= i`, i.e. the profile lies in the
    /// one of `D^*`, `(1, 2, 3, ...)`.
    pub fn within_staircase(&self) -> bool {
        (1..=self.len()).all(|i| self.n(i) as usize <= i)
    }
}

impl fmt::Display for ProfileFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={};profile=[", self.p)?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for ProfileFunction {
    type Err = HopfError;

    /// Parses `p=<prime>;profile=[n1,n2,...]`, ignoring whitespace.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |reason: &str| HopfError::Parse {
            literal: s.to_string(),
            reason: reason.to_string(),
        };
        let (p_part, prof_part) = compact.split_once(';').ok_or_else(|| bad("expected ';'"))?;
        let p_str = p_part.strip_prefix("p=").ok_or_else(|| bad("expected 'p=<prime>'"))?;
        let p: u64 = p_str.parse().map_err(|_| bad("prime is not an integer"))?;
        let list = prof_part
            .strip_prefix("profile=[")
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| bad("expected 'profile=[...]'"))?;
        let entries = if list.is_empty() {
            Vec::new()
        } else {
            list.split(',')
                .map(|x| {
                    x.parse::<u32>()
                        .map_err(|_| bad("entries must be non-negative integers"))
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        ProfileFunction::new(Prime::new(p)?, entries)
    }
}

impl Serialize for ProfileFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ProfileFunction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A monomial `Π ξ_i^{e_i}`; `exponents()[i-1] = e_i`, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u64>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut exponents: Vec<u64>) -> Self {
        while exponents.last() == Some(&0) {
            exponents.pop();
        }
        Monomial(exponents)
    }

    /// `ξ_t^e`.
    pub fn xi_power(t: usize, e: u64) -> Self {
        assert!(t >= 1, "generators are indexed from 1");
        let mut v = vec![0; t];
        v[t - 1] = e;
        Monomial::new(v)
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    /// `e_i` (1-based).
    pub fn exponent(&self, i: usize) -> u64 {
        self.0.get(i.wrapping_sub(1)).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self, p: Prime) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(idx, &e)| e * 2 * (p.as_u64().pow(idx as u32 + 1) - 1))
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let len = self.0.len().max(other.0.len());
        Monomial::new((1..=len).map(|i| self.exponent(i) + other.exponent(i)).collect())
    }

    /// If the monomial is `ξ_t^{p^s}`, returns `(t, s)`.
    pub fn as_xi_p_power(&self, p: Prime) -> Option<(usize, u32)> {
        let t = self.0.len();
        if t == 0 || self.0[..t - 1].iter().any(|&e| e != 0) {
            return None;
        }
        let mut e = self.0[t - 1];
        let mut s = 0;
        while e.is_multiple_of(p.as_u64()) {
            e /= p.as_u64();
            s += 1;
        }
        (e == 1).then_some((t, s))
    }
}

impl Ord for Monomial {
    /// Lexicographic on exponent vectors read from the highest generator down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    /// `xi_1^4*xi_2^1`; the unit prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (idx, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "xi_{}^{}", idx + 1, e)?;
        }
        Ok(())
    }
}

impl FromStr for Monomial {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "1" {
            return Ok(Monomial::one());
        }
        let mut acc = Monomial::one();
        for factor in s.split('*') {
            let body = factor
                .trim()
                .strip_prefix("xi_")
                .ok_or_else(|| format!("bad factor {factor:?}"))?;
            let (i, e) = match body.split_once('^') {
                Some((i, e)) => (i, e),
                None => (body, "1"),
            };
            let i: usize = i.parse().map_err(|_| format!("bad index in {factor:?}"))?;
            let e: u64 = e.parse().map_err(|_| format!("bad exponent in {factor:?}"))?;
            if i == 0 {
                return Err("generators are indexed from 1".into());
            }
            acc = acc.mul(&Monomial::xi_power(i, e));
        }
        Ok(acc)
    }
}

/// An F_p-linear combination of `left ⊗ right` pairs in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSum {
    p: Prime,
    terms: BTreeMap<(Monomial, Monomial), u32>,
}

impl TensorSum {
    pub fn zero(p: Prime) -> Self {
        TensorSum {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, left: Monomial, right: Monomial, coeff: u32) {
        let p = self.p;
        let key = (left, right);
        let c = p.add(self.terms.get(&key).copied().unwrap_or(0), coeff % p.get());
        if c == 0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, c);
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

    pub fn coeff(&self, left: &Monomial, right: &Monomial) -> u32 {
        self.terms.get(&(left.clone(), right.clone())).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Monomial, u32)> {
        self.terms.iter().map(|((l, r), &c)| (l, r, c))
    }
}

impl fmt::Display for TensorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (l, r, c)) in self.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*({l} (x) {r})")?;
        }
        Ok(())
    }
}

/// Full coproduct `Δ(m)` in `B_* ⊗ B_*` as `(left, right, coeff)` terms,
/// including the two unit terms.
///
/// Each generator power `ξ_n^e` expands as `(Σ_i ξ_{n-i}^{p^i} ⊗ ξ_i)^e`; the
/// multinomial coefficients are taken mod p digit by digit (Lucas), so only
/// carry-free splittings of `e` appear. Partial products that leave `B_*` are
/// pruned as soon as they appear.
pub fn coproduct_terms(pf: &ProfileFunction, m: &Monomial) -> Vec<(Monomial, Monomial, u32)> {
    let p = pf.prime();
    let width = m.exponents().len();
    let heights: Vec<u64> = (1..=width).map(|i| pf.height(i)).collect();

    // One unit of work per (generator, base-p digit).
    let mut digits = Vec::new();
    for (idx, &e) in m.exponents().iter().enumerate() {
        for (k, d) in p.digits(e).into_iter().enumerate() {
            if d > 0 {
                digits.push((idx + 1, p.as_u64().pow(k as u32), d));
            }
        }
    }

    let mut out: HashMap<(Vec<u64>, Vec<u64>), u32> = HashMap::new();
    let mut left = vec![0u64; width];
    let mut right = vec![0u64; width];
    expand_digits(p, &digits, 0, &heights, &mut left, &mut right, 1, &mut out);

    let mut terms: Vec<(Monomial, Monomial, u32)> = out
        .into_iter()
        .filter(|&(_, c)| c != 0)
        .map(|((l, r), c)| (Monomial::new(l), Monomial::new(r), c))
        .collect();
    terms.sort();
    terms
}

#[allow(clippy::too_many_arguments)]
fn expand_digits(
    p: Prime,
    digits: &[(usize, u64, u64)],
    pos: usize,
    heights: &[u64],
    left: &mut Vec<u64>,
    right: &mut Vec<u64>,
    coeff: u32,
    out: &mut HashMap<(Vec<u64>, Vec<u64>), u32>,
) {
    if pos == digits.len() {
        let e = out.entry((left.clone(), right.clone())).or_insert(0);
        *e = p.add(*e, coeff);
        return;
    }
    let (n, scale, d) = digits[pos];
    split_digit(p, digits, pos, heights, left, right, coeff, out, n, scale, d, 0, d, 1);
}

// Distributes the remaining `rem` copies of `ξ_n^{scale}` among the terms
// `ξ_{n-i}^{p^i} ⊗ ξ_i` for `i >= part`; `denom` accumulates Π c_i!.
#[allow(clippy::too_many_arguments)]
fn split_digit(
    p: Prime,
    digits: &[(usize, u64, u64)],
    pos: usize,
    heights: &[u64],
    left: &mut Vec<u64>,
    right: &mut Vec<u64>,
    coeff: u32,
    out: &mut HashMap<(Vec<u64>, Vec<u64>), u32>,
    n: usize,
    scale: u64,
    digit: u64,
    part: usize,
    rem: u64,
    denom: u32,
) {
    if part == n {
        // The last term (i = n) is 1 ⊗ ξ_n and takes everything left.
        let amount = rem * scale;
        if right[n - 1] + amount >= heights[n - 1] {
            return;
        }
        right[n - 1] += amount;
        let denom = p.mul(denom, factorial_mod(rem, p));
        let c = p.mul(coeff, p.mul(factorial_mod(digit, p), p.inv(denom)));
        expand_digits(p, digits, pos + 1, heights, left, right, c, out);
        right[n - 1] -= amount;
        return;
    }
    let pp = p.as_u64();
    for c in 0..=rem {
        let amount = c * scale;
        // Term i = part: ξ_{n-i}^{p^i} ⊗ ξ_i (ξ_0 = 1).
        let l_idx = n - part;
        let l_add = amount * pp.pow(part as u32);
        if c > 0 {
            if left[l_idx - 1] + l_add >= heights[l_idx - 1] {
                break;
            }
            if part > 0 && right[part - 1] + amount >= heights[part - 1] {
                break;
            }
        }
        left[l_idx - 1] += l_add;
        if part > 0 {
            right[part - 1] += amount;
        }
        let denom2 = p.mul(denom, factorial_mod(c, p));
        split_digit(
            p,
            digits,
            pos,
            heights,
            left,
            right,
            coeff,
            out,
            n,
            scale,
            digit,
            part + 1,
            rem - c,
            denom2,
        );
        left[l_idx - 1] -= l_add;
        if part > 0 {
            right[part - 1] -= amount;
        }
    }
}

fn factorial_mod(n: u64, p: Prime) -> u32 {
    debug_assert!(n < p.as_u64());
    (1..=n).fold(1u32, |acc, k| p.mul(acc, k as u32))
}

/// `Δ(m) - m ⊗ 1 - 1 ⊗ m` in `B_* ⊗ B_*`.
pub fn reduced_coproduct(pf: &ProfileFunction, m: &Monomial) -> Result<TensorSum, HopfError> {
    pf.check_monomial(m)?;
    let mut sum = TensorSum::zero(pf.prime());
    for (l, r, c) in coproduct_terms(pf, m) {
        if !l.is_one() && !r.is_one() {
            sum.add_term(l, r, c);
        }
    }
    Ok(sum)
}

pub fn is_primitive(pf: &ProfileFunction, m: &Monomial) -> Result<bool, HopfError> {
    Ok(reduced_coproduct(pf, m)?.is_zero())
}

/// All basis monomials of `B_*` in internal degree `d`, in [`Monomial`] order.
pub fn basis_in_degree(pf: &ProfileFunction, d: u64) -> Vec<Monomial> {
    let mut out = Vec::new();
    if !d.is_multiple_of(2) {
        return out;
    }
    let len = pf.support_len();
    let mut exps = vec![0u64; len];
    fill_degree(pf, len, d, &mut exps, &mut out);
    out.sort();
    out
}

fn fill_degree(pf: &ProfileFunction, i: usize, remaining: u64, exps: &mut Vec<u64>, out: &mut Vec<Monomial>) {
    if i == 0 {
        if remaining == 0 {
            out.push(Monomial::new(exps.clone()));
        }
        return;
    }
    let deg = pf.generator_degree(i);
    let max = (pf.height(i) - 1).min(remaining / deg);
    for e in 0..=max {
        exps[i - 1] = e;
        fill_degree(pf, i - 1, remaining - e * deg, exps, out);
    }
    exps[i - 1] = 0;
}

/// Every positive-degree basis monomial of degree at most `max_degree`, sorted
/// by degree and then by [`Monomial`] order.
pub fn basis_up_to(pf: &ProfileFunction, max_degree: u64) -> Vec<Monomial> {
    let mut out = Vec::new();
    let len = pf.support_len();
    let mut exps = vec![0u64; len];
    fill_up_to(pf, len, max_degree, &mut exps, &mut out);
    out.retain(|m| !m.is_one());
    out.sort_by(|a, b| a.degree(pf.prime()).cmp(&b.degree(pf.prime())).then_with(|| a.cmp(b)));
    out
}

fn fill_up_to(pf: &ProfileFunction, i: usize, remaining: u64, exps: &mut Vec<u64>, out: &mut Vec<Monomial>) {
    if i == 0 {
        out.push(Monomial::new(exps.clone()));
        return;
    }
    let deg = pf.generator_degree(i);
    let max = (pf.height(i) - 1).min(remaining / deg);
    for e in 0..=max {
        exps[i - 1] = e;
        fill_up_to(pf, i - 1, remaining - e * deg, exps, out);
    }
    exps[i - 1] = 0;
}

/// A primitive element of `B_*`: a linear combination of basis monomials.
pub type Primitive = Vec<(Monomial, u32)>;

/// Basis of the primitives of `B_*` in degree `d`, i.e. of `Ext^{1,d}`.
pub fn ext1_basis(pf: &ProfileFunction, d: u64) -> Vec<Primitive> {
    if d == 0 {
        return Vec::new();
    }
    let basis = basis_in_degree(pf, d);
    let p = pf.prime();
    let mut row_of: HashMap<(Monomial, Monomial), usize> = HashMap::new();
    let mut triplets = Vec::new();
    for (col, m) in basis.iter().enumerate() {
        let delta = reduced_coproduct(pf, m).expect("basis monomials are nonzero");
        for (l, r, c) in delta.iter() {
            let next = row_of.len();
            let row = *row_of.entry((l.clone(), r.clone())).or_insert(next);
            triplets.push((row, col, c as i64));
        }
    }
    let mat = FpMatrix::from_triplets(p, row_of.len(), basis.len(), triplets).expect("indices in range");
    mat.kernel_basis()
        .into_iter()
        .map(|x| {
            basis
                .iter()
                .zip(x)
                .filter(|&(_, c)| c != 0)
                .map(|(m, c)| (m.clone(), c))
                .collect()
        })
        .collect()
}

/// Staircase chart of the profile: column `i` is `n_i` cells tall.
pub fn render_profile(pf: &ProfileFunction) -> String {
    let len = pf.support_len();
    let height = pf.max_entry() as usize;
    let label = height.to_string().len().max(1);
    let mut out = String::new();
    for h in (1..=height).rev() {
        out.push_str(&format!("{h:>label$} |"));
        let mut line = String::new();
        for i in 1..=len {
            line.push_str(if pf.n(i) as usize >= h { " ##" } else { "   " });
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out.push_str(&format!("{:>label$} +{}\n", "", "---".repeat(len)));
    if len > 0 {
        let mut axis = format!("{:>label$}  ", "");
        for i in 1..=len {
            axis.push_str(&format!("{i:>2} "));
        }
        out.push_str(axis.trim_end());
        out.push('\n');
    }
    out
}

/// Degree bound large enough for [`validate_bruteforce`] to see every
/// generator up to the validity cutoff.
pub fn bruteforce_sufficient_bound(pf: &ProfileFunction) -> u64 {
    (1..=pf.validity_cutoff())
        .map(|k| pf.height(k) * pf.generator_degree(k))
        .max()
        .unwrap_or(0)
}

type PolyTensor = HashMap<(Vec<u64>, Vec<u64>), u32>;

fn tensor_mul(p: Prime, a: &PolyTensor, b: &PolyTensor) -> PolyTensor {
    let add = |x: &[u64], y: &[u64]| -> Vec<u64> {
        let n = x.len().max(y.len());
        (0..n)
            .map(|i| x.get(i).copied().unwrap_or(0) + y.get(i).copied().unwrap_or(0))
            .collect()
    };
    let mut out = PolyTensor::new();
    for ((l1, r1), c1) in a {
        for ((l2, r2), c2) in b {
            let e = out.entry((add(l1, l2), add(r1, r2))).or_insert(0);
            *e = p.add(*e, p.mul(*c1, *c2));
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Checks the Hopf-ideal condition directly: expands `Δ(ξ_k)^{p^{n_k}}` in the
/// untruncated `P_* ⊗ P_*` by repeated multiplication and tests that every
/// surviving term lies in `I ⊗ P_* + P_* ⊗ I`, for each generator whose
/// truncation degree is within `degree_bound`.
///
/// Independent of the closed-form inequality behind [`ProfileFunction::is_valid`].
pub fn validate_bruteforce(pf: &ProfileFunction, degree_bound: u64) -> Result<bool, HopfError> {
    let p = pf.prime();
    let needed = (1..=pf.len())
        .map(|k| pf.height(k) * pf.generator_degree(k))
        .max()
        .unwrap_or(0);
    if degree_bound < needed {
        return Err(HopfError::BoundTooSmall {
            given: degree_bound,
            needed,
        });
    }
    let in_ideal = |exps: &[u64]| exps.iter().enumerate().any(|(idx, &e)| e >= pf.height(idx + 1));
    let mut k = 1;
    loop {
        let deg = pf.generator_degree(k).saturating_mul(pf.height(k));
        if deg > degree_bound {
            if pf.generator_degree(k) > degree_bound {
                break;
            }
            k += 1;
            continue;
        }
        // Δ(ξ_k) = Σ_i ξ_{k-i}^{p^i} ⊗ ξ_i
        let mut delta = PolyTensor::new();
        for i in 0..=k {
            let mut l = vec![0u64; k];
            let mut r = vec![0u64; k];
            if k - i > 0 {
                l[k - i - 1] = p.as_u64().pow(i as u32);
            }
            if i > 0 {
                r[i - 1] = 1;
            }
            delta.insert((l, r), 1);
        }
        // Raise to the p-th power n_k times, one multiplication at a time.
        let mut power = delta;
        for _ in 0..pf.n(k) {
            let base = power.clone();
            for _ in 1..p.get() {
                power = tensor_mul(p, &power, &base);
            }
        }
        if power.keys().any(|(l, r)| !in_ideal(l) && !in_ideal(r)) {
            return Ok(false);
        }
        k += 1;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf(p: u64, e: &[u32]) -> ProfileFunction {
        ProfileFunction::from_parts(p, e).unwrap()
    }

    fn xi(t: usize, e: u64) -> Monomial {
        Monomial::xi_power(t, e)
    }

    #[test]
    fn literal_round_trip() {
        let a: ProfileFunction = " p = 3 ; profile = [ 1, 2 ,3 ] ".parse().unwrap();
        assert_eq!(a, pf(3, &[1, 2, 3]));
        assert_eq!(a.to_string(), "p=3;profile=[1,2,3]");
        let e: ProfileFunction = "p=5;profile=[]".parse().unwrap();
        assert!(e.is_empty());
        assert!(matches!(
            "p=2;profile=[1]".parse::<ProfileFunction>(),
            Err(HopfError::Prime(_))
        ));
        assert!(matches!(
            "p=3;profile=[a]".parse::<ProfileFunction>(),
            Err(HopfError::Parse { .. })
        ));
        assert!(matches!(
            "p=3,profile=[1]".parse::<ProfileFunction>(),
            Err(HopfError::Parse { .. })
        ));
    }

    #[test]
    fn validity_examples() {
        // With implicit zeros after n_3, Δ(ξ_4) keeps ξ_3^3 ⊗ ξ_1.
        assert!(!pf(3, &[1, 2, 3]).is_valid());
        assert_eq!(pf(3, &[1, 2, 3]).first_violation(), Some(Violation { k: 4, i: 1 }));
        assert!(pf(3, &[1, 2, 3, 1, 1]).is_valid());
        assert!(!pf(3, &[2]).is_valid());
        assert_eq!(pf(3, &[2]).first_violation(), Some(Violation { k: 2, i: 1 }));
        assert!(pf(3, &[]).is_valid());
        assert!(pf(3, &[2, 1]).is_valid());
        assert!(!pf(3, &[0, 2, 3]).is_valid());
        assert!(pf(3, &[0, 2, 3, 0, 1]).is_valid());
    }

    #[test]
    fn bruteforce_examples() {
        let cases = [
            (&[1u32, 2, 3, 1, 1][..], true),
            (&[1, 2, 3][..], false),
            (&[2][..], false),
            (&[][..], true),
            (&[2, 1][..], true),
        ];
        for (e, want) in cases {
            let f = pf(3, e);
            let bound = bruteforce_sufficient_bound(&f);
            assert_eq!(validate_bruteforce(&f, bound).unwrap(), want, "{f}");
        }
        let f = pf(3, &[1, 2, 3]);
        assert!(matches!(
            validate_bruteforce(&f, 10),
            Err(HopfError::BoundTooSmall { .. })
        ));
    }

    #[test]
    fn sub_profiles() {
        assert!(pf(3, &[1, 1]).is_sub_profile(&pf(3, &[1, 2, 3])).unwrap());
        assert!(!pf(3, &[2, 1]).is_sub_profile(&pf(3, &[1, 2, 3, 4, 5])).unwrap());
        assert!(pf(3, &[]).is_sub_profile(&pf(3, &[0, 4])).unwrap());
        assert!(matches!(
            pf(3, &[1]).is_sub_profile(&pf(5, &[1])),
            Err(HopfError::PrimeMismatch(3, 5))
        ));
    }

    #[test]
    fn bases() {
        assert_eq!(basis_in_degree(&pf(3, &[1]), 4), vec![xi(1, 1)]);
        assert_eq!(basis_in_degree(&pf(3, &[2, 1]), 16), vec![xi(1, 4), xi(2, 1)]);
        assert!(basis_in_degree(&pf(3, &[2, 1]), 15).is_empty());
        assert_eq!(basis_in_degree(&pf(3, &[2, 1]), 0), vec![Monomial::one()]);
    }

    #[test]
    fn coproduct_examples() {
        let f = pf(3, &[3, 3]);
        let d = reduced_coproduct(&f, &xi(2, 1)).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.coeff(&xi(1, 3), &xi(1, 1)), 1);

        let g = pf(3, &[2, 1]);
        assert!(reduced_coproduct(&g, &xi(1, 3)).unwrap().is_zero());
        let sq = reduced_coproduct(&g, &xi(1, 2)).unwrap();
        assert_eq!(sq.len(), 1);
        assert_eq!(sq.coeff(&xi(1, 1), &xi(1, 1)), 2);
        assert!(matches!(
            reduced_coproduct(&g, &xi(1, 9)),
            Err(HopfError::NotInBasis { .. })
        ));
    }

    #[test]
    fn primitivity_examples() {
        assert!(is_primitive(&pf(3, &[1]), &xi(1, 1)).unwrap());
        assert!(!is_primitive(&pf(3, &[2, 1]), &xi(2, 1)).unwrap());
        assert!(is_primitive(&pf(3, &[1, 2]), &xi(2, 3)).unwrap());
    }

    #[test]
    fn ext1_examples() {
        let one = ext1_basis(&pf(3, &[1]), 4);
        assert_eq!(one, vec![vec![(xi(1, 1), 1)]]);
        assert!(ext1_basis(&pf(3, &[2, 1]), 16).is_empty());
        assert!(ext1_basis(&pf(3, &[]), 4).is_empty());
        assert!(ext1_basis(&pf(3, &[1]), 0).is_empty());
    }

    #[test]
    fn render_examples() {
        let d = render_profile(&pf(3, &[1, 2, 3]));
        assert_eq!(
            d,
            "3 |       ##\n2 |    ## ##\n1 | ## ## ##\n  +---------\n    1  2  3\n"
        );
        assert_eq!(render_profile(&pf(3, &[])), "  +\n");
        let r = render_profile(&pf(3, &[0, 0, 1, 1]));
        assert_eq!(r, "1 |       ## ##\n  +------------\n    1  2  3  4\n");
    }

    #[test]
    fn monomial_text() {
        let m = xi(1, 4).mul(&xi(2, 1));
        assert_eq!(m.to_string(), "xi_1^4*xi_2^1");
        assert_eq!("xi_1^4*xi_2".parse::<Monomial>().unwrap(), m);
        assert_eq!(Monomial::one().to_string(), "1");
        assert_eq!(xi(3, 9).as_xi_p_power(Prime::new(3).unwrap()), Some((3, 2)));
        assert_eq!(xi(3, 6).as_xi_p_power(Prime::new(3).unwrap()), None);
    }
}
