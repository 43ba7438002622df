//! The mod-p Steenrod algebra at p = 2 and p = 3 in the admissible basis.
//!
//! Monomials are words in the letters `Sq^k`, `b` (Bockstein) and `P^k`.
//! Normal forms are produced by rewriting inadmissible adjacent factors with
//! the Adem relations until the word is admissible.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prime::Prime;

pub const DEFAULT_DEGREE_CAP: u32 = 40;

/// A single generating letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    Sq(u32),
    Beta,
    P(u32),
}

impl Op {
    pub fn degree(self, prime: Prime) -> u32 {
        match self {
            Op::Sq(k) => k,
            Op::Beta => 1,
            Op::P(k) => 2 * k * (prime.value() - 1),
        }
    }

    fn is_unit(self) -> bool {
        matches!(self, Op::Sq(0) | Op::P(0))
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Sq(k) => write!(f, "Sq{k}"),
            Op::Beta => write!(f, "b"),
            Op::P(k) => write!(f, "P{k}"),
        }
    }
}

/// A word in the letters; the empty word is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial(pub Vec<Op>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn letter(op: Op) -> Self {
        if op.is_unit() {
            Self::unit()
        } else {
            Monomial(vec![op])
        }
    }

    pub fn ops(&self) -> &[Op] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self, prime: Prime) -> u32 {
        self.0.iter().map(|o| o.degree(prime)).sum()
    }

    pub fn is_admissible(&self, prime: Prime) -> bool {
        first_inadmissible(prime, &self.0, Strategy::Leftmost).is_none()
            && self.0.iter().all(|o| letter_valid(prime, *o))
    }

    /// Exponent sequence `(i_1, ..., i_k)` at p = 2.
    pub fn sq_exponents(&self) -> Option<Vec<u32>> {
        self.0
            .iter()
            .map(|o| match o {
                Op::Sq(k) => Some(*k),
                _ => None,
            })
            .collect()
    }

    /// `(e0, s1, e1, ..., sk, ek)` at odd primes.
    pub fn odd_sequence(&self) -> Option<Vec<u32>> {
        let mut out = vec![0u32];
        for o in &self.0 {
            match o {
                Op::Beta => {
                    let last = out.last_mut().unwrap();
                    if *last == 1 {
                        return None;
                    }
                    *last = 1;
                }
                Op::P(k) => {
                    out.push(*k);
                    out.push(0);
                }
                Op::Sq(_) => return None,
            }
        }
        Some(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{o}")?;
        }
        Ok(())
    }
}

fn letter_valid(prime: Prime, op: Op) -> bool {
    match op {
        Op::Sq(k) => prime.is_two() && k > 0,
        Op::Beta | Op::P(_) => !prime.is_two() && !op.is_unit(),
    }
}

/// An F_p-combination of admissible monomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "ElementRepr", try_from = "ElementRepr")]
pub struct SteenrodElement {
    prime: Prime,
    terms: BTreeMap<Monomial, u8>,
}

impl SteenrodElement {
    pub fn zero(prime: Prime) -> Self {
        SteenrodElement { prime, terms: BTreeMap::new() }
    }

    pub fn unit(prime: Prime) -> Self {
        Self::from_monomial(prime, Monomial::unit(), 1)
    }

    pub fn from_monomial(prime: Prime, m: Monomial, c: u8) -> Self {
        let mut e = Self::zero(prime);
        e.add_term(m, c);
        e
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u8)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> u8 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Degree of a homogeneous element; `None` for zero or mixed degrees.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.degree(self.prime));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn add_term(&mut self, m: Monomial, c: u8) {
        let p = self.prime.as_u8();
        let v = (self.coefficient(&m) + c % p) % p;
        if v == 0 {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, v);
        }
    }

    pub fn add_scaled(&mut self, other: &SteenrodElement, c: u8) {
        for (m, &v) in &other.terms {
            self.add_term(m.clone(), (v as u32 * c as u32 % self.prime.value()) as u8);
        }
    }

    pub fn scaled(&self, c: u8) -> SteenrodElement {
        let mut out = Self::zero(self.prime);
        out.add_scaled(self, c);
        out
    }
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    prime: Prime,
    terms: Vec<(Vec<Op>, u8)>,
}

impl From<SteenrodElement> for ElementRepr {
    fn from(e: SteenrodElement) -> Self {
        ElementRepr { prime: e.prime, terms: e.terms.into_iter().map(|(m, c)| (m.0, c)).collect() }
    }
}

impl TryFrom<ElementRepr> for SteenrodElement {
    type Error = Error;
    fn try_from(r: ElementRepr) -> Result<Self> {
        let mut e = SteenrodElement::zero(r.prime);
        for (w, c) in r.terms {
            let m = Monomial(w);
            if !m.is_admissible(r.prime) {
                return Err(Error::Parse(format!("stored monomial {m} is not admissible")));
            }
            e.add_term(m, c);
        }
        Ok(e)
    }
}

impl std::ops::Add for &SteenrodElement {
    type Output = SteenrodElement;
    fn add(self, rhs: &SteenrodElement) -> SteenrodElement {
        let mut out = self.clone();
        out.add_scaled(rhs, 1);
        out
    }
}

impl fmt::Display for SteenrodElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest-leading-letter first, matching the basis order
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| basis_order(a.0, b.0));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *c != 1 {
                write!(f, "{c} ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Order used for bases and printing: reverse lexicographic on the letter
/// sequence, so `Sq3` precedes `Sq2 Sq1`.
pub fn basis_order(a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    b.0.cmp(&a.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

/// Position of an inadmissible factor group. At p = 2 it covers letters
/// `i, i+1`; at odd p either `b b`, `P^a P^b` or `P^a b P^b`.
fn first_inadmissible(prime: Prime, w: &[Op], s: Strategy) -> Option<usize> {
    let p = prime.value();
    let check = |i: usize| -> bool {
        match (w[i], w.get(i + 1), w.get(i + 2)) {
            (Op::Sq(a), Some(Op::Sq(b)), _) => a < 2 * b,
            (Op::Beta, Some(Op::Beta), _) => true,
            (Op::P(a), Some(Op::P(b)), _) => a < p * b,
            (Op::P(a), Some(Op::Beta), Some(Op::P(b))) => a <= p * b,
            _ => false,
        }
    };
    let unit = |i: usize| w[i].is_unit();
    match s {
        Strategy::Leftmost => (0..w.len()).find(|&i| unit(i) || check(i)),
        Strategy::Rightmost => (0..w.len()).rev().find(|&i| unit(i) || check(i)),
    }
}

type Expansion = Vec<(u8, Vec<Op>)>;

/// Shared tables for one prime: Adem expansions, normal forms and bases.
pub struct SteenrodAlgebra {
    prime: Prime,
    cap: u32,
    adem: Mutex<HashMap<(u32, bool, u32), Arc<Expansion>>>,
    normal: Mutex<HashMap<Vec<Op>, Arc<SteenrodElement>>>,
    bases: Mutex<HashMap<u32, Arc<Vec<Monomial>>>>,
}

impl fmt::Debug for SteenrodAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SteenrodAlgebra").field("prime", &self.prime).field("cap", &self.cap).finish()
    }
}

impl SteenrodAlgebra {
    pub fn new(prime: Prime, cap: u32) -> Self {
        SteenrodAlgebra {
            prime,
            cap,
            adem: Mutex::new(HashMap::new()),
            normal: Mutex::new(HashMap::new()),
            bases: Mutex::new(HashMap::new()),
        }
    }

    /// Process-wide instance with the default degree cap.
    pub fn shared(prime: Prime) -> &'static SteenrodAlgebra {
        static TWO: OnceLock<SteenrodAlgebra> = OnceLock::new();
        static THREE: OnceLock<SteenrodAlgebra> = OnceLock::new();
        if prime.is_two() {
            TWO.get_or_init(|| SteenrodAlgebra::new(Prime::TWO, DEFAULT_DEGREE_CAP))
        } else {
            THREE.get_or_init(|| SteenrodAlgebra::new(Prime::THREE, DEFAULT_DEGREE_CAP))
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn degree_cap(&self) -> u32 {
        self.cap
    }

    /// Admissible monomials of the given degree, in `basis_order`.
    pub fn admissible_basis(&self, degree: u32) -> Result<Arc<Vec<Monomial>>> {
        if degree > self.cap {
            return Err(Error::Config(format!(
                "degree {degree} exceeds the configured cap {}",
                self.cap
            )));
        }
        if let Some(b) = self.bases.lock().unwrap().get(&degree) {
            return Ok(b.clone());
        }
        let mut out = Vec::new();
        if self.prime.is_two() {
            enumerate_two(degree, u32::MAX, &mut Vec::new(), &mut out);
        } else {
            enumerate_odd(self.prime.value(), degree, None, &mut Vec::new(), &mut out);
        }
        let mut out: Vec<Monomial> = out.into_iter().map(Monomial).collect();
        out.sort_by(basis_order);
        let out = Arc::new(out);
        self.bases.lock().unwrap().insert(degree, out.clone());
        Ok(out)
    }

    /// Parses a whitespace-separated product of letters.
    pub fn parse(&self, text: &str) -> Result<Vec<Op>> {
        let mut ops = Vec::new();
        for tok in text.split_whitespace() {
            let op = if let Some(k) = tok.strip_prefix("Sq") {
                Op::Sq(parse_exponent(tok, k)?)
            } else if let Some(k) = tok.strip_prefix('P') {
                Op::P(parse_exponent(tok, k)?)
            } else if tok == "b" {
                Op::Beta
            } else {
                return Err(Error::Parse(format!("unrecognised factor '{tok}'")));
            };
            let ok = match op {
                Op::Sq(_) => self.prime.is_two(),
                _ => !self.prime.is_two(),
            };
            if !ok {
                return Err(Error::Parse(format!("factor '{tok}' does not exist at p = {}", self.prime)));
            }
            ops.push(op);
        }
        Ok(ops)
    }

    /// Parses and normalizes an expression such as `"Sq2 Sq2"`.
    pub fn evaluate(&self, text: &str) -> Result<SteenrodElement> {
        let ops = self.parse(text)?;
        let d: u32 = ops.iter().map(|o| o.degree(self.prime)).sum();
        if d > self.cap {
            return Err(Error::Config(format!("degree {d} exceeds the configured cap {}", self.cap)));
        }
        Ok(self.adem_normalize(&ops))
    }

    /// Normal form of a word, rewriting the leftmost inadmissible factor first.
    pub fn adem_normalize(&self, word: &[Op]) -> SteenrodElement {
        (*self.normalize_cached(word)).clone()
    }

    pub(crate) fn normalize_cached(&self, word: &[Op]) -> Arc<SteenrodElement> {
        if let Some(e) = self.normal.lock().unwrap().get(word) {
            return e.clone();
        }
        let e = Arc::new(self.normalize_with(word, Strategy::Leftmost, true));
        self.normal.lock().unwrap().insert(word.to_vec(), e.clone());
        e
    }

    /// Normal form computed with an explicit rewriting strategy and no word
    /// cache; used to cross-check confluence.
    pub fn normalize_with_strategy(&self, word: &[Op], s: Strategy) -> SteenrodElement {
        self.normalize_with(word, s, false)
    }

    fn normalize_with(&self, word: &[Op], s: Strategy, cached: bool) -> SteenrodElement {
        let p = self.prime;
        let Some(i) = first_inadmissible(p, word, s) else {
            return SteenrodElement::from_monomial(p, Monomial(word.to_vec()), 1);
        };
        if word[i].is_unit() {
            let mut w = word.to_vec();
            w.remove(i);
            return self.recurse(&w, s, cached);
        }
        let (span, exp) = match (word[i], word[i + 1]) {
            (Op::Sq(a), Op::Sq(b)) => (2, self.adem_expansion(a, false, b)),
            (Op::Beta, Op::Beta) => return SteenrodElement::zero(p),
            (Op::P(a), Op::P(b)) => (2, self.adem_expansion(a, false, b)),
            (Op::P(a), Op::Beta) => match word[i + 2] {
                Op::P(b) => (3, self.adem_expansion(a, true, b)),
                _ => unreachable!(),
            },
            _ => unreachable!(),
        };
        let mut out = SteenrodElement::zero(p);
        for (c, rep) in exp.iter() {
            let mut w = Vec::with_capacity(word.len() + 1);
            w.extend_from_slice(&word[..i]);
            w.extend(rep.iter().copied().filter(|o| !o.is_unit()));
            w.extend_from_slice(&word[i + span..]);
            out.add_scaled(&self.recurse(&w, s, cached), *c);
        }
        out
    }

    fn recurse(&self, w: &[Op], s: Strategy, cached: bool) -> SteenrodElement {
        if cached {
            (*self.normalize_cached(w)).clone()
        } else {
            self.normalize_with(w, s, false)
        }
    }

    /// Right-hand side of the Adem relation for `Sq^a Sq^b` (a < 2b),
    /// `P^a P^b` (a < pb) or `P^a b P^b` (a <= pb, `beta` set).
    fn adem_expansion(&self, a: u32, beta: bool, b: u32) -> Arc<Expansion> {
        if let Some(e) = self.adem.lock().unwrap().get(&(a, beta, b)) {
            return e.clone();
        }
        let p = self.prime;
        let pv = p.value() as i64;
        let (a64, b64) = (a as i64, b as i64);
        let mut out: Expansion = Vec::new();
        if p.is_two() {
            for j in 0..=a64 / 2 {
                let c = p.binomial(b64 - 1 - j, a64 - 2 * j);
                if c != 0 {
                    out.push((c, vec![Op::Sq((a64 + b64 - j) as u32), Op::Sq(j as u32)]));
                }
            }
        } else {
            let sign = |e: i64| if e.rem_euclid(2) == 0 { 1i64 } else { -1 };
            for j in 0..=a64 / pv {
                if !beta {
                    let c = sign(a64 + j) * p.binomial((pv - 1) * (b64 - j) - 1, a64 - pv * j) as i64;
                    let c = p.reduce(c);
                    if c != 0 {
                        out.push((c, vec![Op::P((a64 + b64 - j) as u32), Op::P(j as u32)]));
                    }
                } else {
                    let c1 = sign(a64 + j) * p.binomial((pv - 1) * (b64 - j), a64 - pv * j) as i64;
                    let c1 = p.reduce(c1);
                    if c1 != 0 {
                        out.push((c1, vec![Op::Beta, Op::P((a64 + b64 - j) as u32), Op::P(j as u32)]));
                    }
                    let c2 =
                        sign(a64 + j + 1) * p.binomial((pv - 1) * (b64 - j) - 1, a64 - pv * j - 1) as i64;
                    let c2 = p.reduce(c2);
                    if c2 != 0 {
                        out.push((c2, vec![Op::P((a64 + b64 - j) as u32), Op::Beta, Op::P(j as u32)]));
                    }
                }
            }
        }
        let out = Arc::new(out);
        self.adem.lock().unwrap().insert((a, beta, b), out.clone());
        out
    }

    pub fn multiply(&self, a: &SteenrodElement, b: &SteenrodElement) -> Result<SteenrodElement> {
        if a.prime != self.prime || b.prime != self.prime {
            return Err(Error::Contract("prime mismatch in Steenrod product".into()));
        }
        let mut out = SteenrodElement::zero(self.prime);
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                let c = (ca as u32 * cb as u32 % self.prime.value()) as u8;
                out.add_scaled(&self.multiply_monomials(ma, mb), c);
            }
        }
        Ok(out)
    }

    pub fn multiply_monomials(&self, a: &Monomial, b: &Monomial) -> Arc<SteenrodElement> {
        let mut w = Vec::with_capacity(a.len() + b.len());
        w.extend_from_slice(&a.0);
        w.extend_from_slice(&b.0);
        self.normalize_cached(&w)
    }
}

fn parse_exponent(tok: &str, digits: &str) -> Result<u32> {
    digits
        .parse::<u32>()
        .map_err(|_| Error::Parse(format!("bad exponent in factor '{tok}'")))
}

// i_1 >= 2 i_2 >= ..., each positive, summing to `remaining`.
fn enumerate_two(remaining: u32, max_first: u32, cur: &mut Vec<Op>, out: &mut Vec<Vec<Op>>) {
    if remaining == 0 {
        out.push(cur.clone());
        return;
    }
    // the tail after choosing i can be at most i - 1 in degree (i/2 + i/4 + ...)
    for i in 1..=remaining.min(max_first) {
        let rest = remaining - i;
        if rest >= i {
            continue;
        }
        cur.push(Op::Sq(i));
        enumerate_two(rest, i / 2, cur, out);
        cur.pop();
    }
}

// Words read left to right: [b] P^{s1} [b] P^{s2} ... [b], with
// s_j >= p s_{j+1} + e_j where e_j is the Bockstein between them.
fn enumerate_odd(p: u32, remaining: u32, prev: Option<u32>, cur: &mut Vec<Op>, out: &mut Vec<Vec<Op>>) {
    let unit = 2 * (p - 1);
    for e in 0..=1u32 {
        if e > remaining {
            continue;
        }
        let rem = remaining - e;
        if e == 1 {
            cur.push(Op::Beta);
        }
        if rem == 0 {
            out.push(cur.clone());
        } else {
            let mut s = 1;
            while s * unit <= rem {
                if prev.map_or(true, |ps| ps >= p * s + e) {
                    cur.push(Op::P(s));
                    enumerate_odd(p, rem - s * unit, Some(s), cur, out);
                    cur.pop();
                }
                s += 1;
            }
        }
        if e == 1 {
            cur.pop();
        }
    }
}
