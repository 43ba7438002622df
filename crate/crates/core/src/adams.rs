//! From Adams E2 charts of Σ CP^∞_n to stable homotopy groups in stems up
//! to 2n+4, together with the η and ν multiplication maps between them.
//!
//! Differentials are never searched for. The one differential the chart
//! leaves open (from the tower in stem 2n+5 into stem 2n+4, for n ≡ 0, 1,
//! 4, 5 mod 8) is settled by a table of known group orders; every other
//! candidate must be ruled out by h0-linearity, or the run fails.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cache::ResolutionCache;
use crate::error::{Error, Result};
use crate::fp::FpVector;
use crate::prime::Prime;
use crate::reference;
use crate::resolution::{self, ExtChart};
use crate::strings::{HString, StemStrings};

/// 2-local orders of π_{2n+4}(Σ CP^∞_n) keyed by n mod 8, for the residues
/// where the chart alone does not decide them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownFacts {
    pub source: String,
    pub orders: BTreeMap<u32, u64>,
}

impl KnownFacts {
    pub fn embedded() -> Self {
        let d = &reference::tables().known_facts;
        KnownFacts {
            source: d.source.clone(),
            orders: d.orders.iter().map(|(k, v)| (k.parse().expect("numeric residue"), *v)).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn order_for(&self, n: u32) -> Option<u64> {
        self.orders.get(&(n % 8)).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summand {
    /// `None` for an infinite cyclic summand, else the exponent `k` of `p^k`.
    pub exponent: Option<u32>,
    pub bottom: u32,
    pub filtrations: Vec<u32>,
    /// Dots supporting the representing vector at each filtration.
    pub dots: Vec<Vec<String>>,
    pub string_index: usize,
}

impl Summand {
    pub fn is_infinite(&self) -> bool {
        self.exponent.is_none()
    }

    /// Cyclic order, 0 standing for infinite.
    pub fn order(&self, p: Prime) -> u64 {
        self.exponent.map_or(0, |k| (p.value() as u64).pow(k))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssembledGroup {
    pub prime: Prime,
    pub stem: i32,
    pub summands: Vec<Summand>,
}

impl AssembledGroup {
    pub fn trivial(prime: Prime, stem: i32) -> Self {
        AssembledGroup { prime, stem, summands: Vec::new() }
    }

    /// Cyclic orders of the summands, 0 for infinite cyclic, infinite first.
    pub fn cyclic_orders(&self) -> Vec<u64> {
        self.summands.iter().map(|s| s.order(self.prime)).collect()
    }

    pub fn rank(&self) -> usize {
        self.summands.iter().filter(|s| s.is_infinite()).count()
    }

    pub fn torsion_order(&self) -> u64 {
        self.summands.iter().filter_map(|s| s.exponent).map(|k| (self.prime.value() as u64).pow(k)).product()
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<u64> {
        (self.rank() == 0).then(|| self.torsion_order())
    }

    pub fn is_trivial(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn dot_count(&self) -> usize {
        self.summands.iter().filter(|s| !s.is_infinite()).map(|s| s.filtrations.len()).sum()
    }
}

/// Formats cyclic orders as `0`, `Z`, `Z/2`, `Z ⊕ Z/2`.
pub fn format_orders(orders: &[u64]) -> String {
    if orders.is_empty() {
        return "0".into();
    }
    orders
        .iter()
        .map(|&o| if o == 0 { "Z".to_string() } else { format!("Z/{o}") })
        .collect::<Vec<_>>()
        .join(" ⊕ ")
}

impl fmt::Display for AssembledGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_orders(&self.cyclic_orders()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdamsDifferential {
    pub r: u32,
    pub source_stem: i32,
    pub target_stem: i32,
    /// `(source filtration, target filtration)` pairs that were cancelled.
    pub cancelled: Vec<(u32, u32)>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EInfinity {
    pub chart: ExtChart,
    pub differentials: Vec<AdamsDifferential>,
}

fn levels_of(s: &HString) -> std::ops::RangeInclusive<u32> {
    s.bottom..=s.top()
}

/// Applies the differentials in stems `2n+1 ..= 2n+5` of the chart of
/// Σ CP^∞_n.
pub fn resolve_adams_differentials(chart: &ExtChart, facts: &KnownFacts, n: u32) -> Result<EInfinity> {
    let p = chart.prime;
    let lo = 2 * n as i32 + 1;
    let hi = lo + 4;
    if chart.window.t_max < hi + 2 {
        return Err(Error::WindowTooSmall(format!("chart window t <= {} does not cover stem {hi}", chart.window.t_max)));
    }
    let mut decomp: HashMap<i32, StemStrings> = HashMap::new();
    for stem in lo - 1..=hi {
        decomp.insert(stem, chart.decompose_stem(stem)?);
    }
    let fact = if p.is_two() { facts.order_for(n) } else { None };
    // the open differential: from the tower in stem 2n+5 into stem 2n+4
    let mut flagged: Option<(usize, usize)> = None;
    let mut removed: Vec<String> = Vec::new();
    let mut differentials = Vec::new();
    if let Some(order) = fact {
        let src = &decomp[&hi];
        let towers: Vec<usize> = (0..src.strings.len()).filter(|&i| src.strings[i].tower).collect();
        if towers.len() != 1 {
            return Err(Error::Inconsistent(format!("expected one tower in stem {hi}, found {}", towers.len())));
        }
        let tower = towers[0];
        let sb = src.strings[tower].bottom;
        let tgt = &decomp[&(hi - 1)];
        if tgt.tower_count() > 0 {
            return Err(Error::Inconsistent(format!("stem {} unexpectedly carries a tower", hi - 1)));
        }
        let dots = chart.dots_in_stem(hi - 1).len() as u32;
        let k = exact_log(order, p.value()).ok_or_else(|| {
            Error::Inconsistent(format!("known order {order} is not a power of {p}"))
        })?;
        if k > dots {
            return Err(Error::Inconsistent(format!(
                "known order p^{k} exceeds the {dots} dots available in stem {}",
                hi - 1
            )));
        }
        let kill = dots - k;
        let mut cancelled = Vec::new();
        for j in 0..kill {
            let (fs, ft) = (sb + j, sb + 2 + j);
            let s_dots = chart.dots_at(hi, fs);
            let t_dots = chart.dots_at(hi - 1, ft);
            if s_dots.len() != 1 || t_dots.len() != 1 {
                return Err(Error::Inconsistent(format!(
                    "a d2 from ({hi}, {fs}) to ({}, {ft}) cannot realise order {order}",
                    hi - 1
                )));
            }
            removed.push(s_dots[0].id.clone());
            removed.push(t_dots[0].id.clone());
            cancelled.push((fs, ft));
        }
        if kill > 0 {
            let lowest = sb + 2;
            if chart.dots_in_stem(hi - 1).iter().any(|d| d.s >= lowest + kill) {
                return Err(Error::Inconsistent(format!("the d2 into stem {} would not hit the top of a string", hi - 1)));
            }
        }
        if let Some(target_string) = tgt.string_at(sb + 2) {
            flagged = Some((tower, target_string));
        }
        differentials.push(AdamsDifferential {
            r: 2,
            source_stem: hi,
            target_stem: hi - 1,
            cancelled,
            note: format!("order of stem {} fixed at {order} by {}", hi - 1, facts.source),
        });
    }
    // every other differential must be excluded by h0-linearity
    for stem in lo..=hi {
        let src = &decomp[&stem];
        let tgt = &decomp[&(stem - 1)];
        for (ai, a) in src.strings.iter().enumerate() {
            for s in levels_of(a) {
                for (bi, b) in tgt.strings.iter().enumerate() {
                    if b.tower {
                        continue;
                    }
                    for ts in levels_of(b) {
                        if ts < s + 2 {
                            continue;
                        }
                        if stem == hi && flagged == Some((ai, bi)) && ts == s + 2 {
                            continue;
                        }
                        let pos_a = s - a.bottom;
                        let pos_b = ts - b.bottom;
                        let above_b = b.top() - ts;
                        let above_a = if a.tower { u32::MAX } else { a.top() - s };
                        if pos_b >= pos_a && above_b <= above_a {
                            return Err(Error::Inconsistent(format!(
                                "a d{} from ({stem}, {s}) to ({}, {ts}) is not excluded by the chart",
                                ts - s,
                                stem - 1
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(EInfinity { chart: chart.without_dots(&removed), differentials })
}

fn exact_log(v: u64, p: u32) -> Option<u32> {
    let mut k = 0;
    let mut x = v;
    while x > 1 {
        if x % p as u64 != 0 {
            return None;
        }
        x /= p as u64;
        k += 1;
    }
    (x == 1).then_some(k)
}

fn support(chart: &ExtChart, stem: i32, level: u32, v: &FpVector) -> Vec<String> {
    chart
        .dots_at(stem, level)
        .iter()
        .zip(v)
        .filter(|(_, &c)| c != 0)
        .map(|(d, _)| d.id.clone())
        .collect()
}

/// Summands of one stem: towers become Z, finite strings of length k
/// become Z/p^k.
pub fn assemble_stem(chart: &ExtChart, stem: i32) -> Result<(AssembledGroup, StemStrings)> {
    let st = chart.decompose_stem(stem)?;
    let mut summands: Vec<Summand> = st
        .strings
        .iter()
        .enumerate()
        .map(|(i, s)| Summand {
            exponent: if s.tower { None } else { Some(s.len() as u32) },
            bottom: s.bottom,
            filtrations: levels_of(s).collect(),
            dots: levels_of(s).map(|l| support(chart, stem, l, s.vector_at(l).unwrap())).collect(),
            string_index: i,
        })
        .collect();
    summands.sort_by(|a, b| {
        let key = |s: &Summand| (s.exponent.is_some(), std::cmp::Reverse(s.exponent), s.bottom, s.string_index);
        key(a).cmp(&key(b))
    });
    Ok((AssembledGroup { prime: chart.prime, stem, summands }, st))
}

/// Groups in stems `0 ..= max_stem`.
pub fn assemble_groups(e_inf: &ExtChart, max_stem: i32) -> Result<BTreeMap<i32, AssembledGroup>> {
    let mut out = BTreeMap::new();
    for stem in 0..=max_stem {
        out.insert(stem, assemble_stem(e_inf, stem)?.0);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HopfElement {
    /// Stem 1, detected by h1 at p = 2 and zero at p = 3.
    Eta,
    /// Stem 3, detected by h2 at p = 2 and by h0 = [P1] (α1) at p = 3.
    Nu,
}

impl HopfElement {
    pub fn stem(self) -> i32 {
        match self {
            HopfElement::Eta => 1,
            HopfElement::Nu => 3,
        }
    }

    fn label(self, p: Prime) -> Option<&'static str> {
        match (self, p.is_two()) {
            (HopfElement::Eta, true) => Some("h1"),
            (HopfElement::Nu, true) => Some("h2"),
            (HopfElement::Eta, false) => None,
            (HopfElement::Nu, false) => Some("h0"),
        }
    }
}

/// A homomorphism between assembled groups, as an integer matrix on the
/// summand generators (rows: target summands, columns: source summands).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHom {
    pub source: AssembledGroup,
    pub target: AssembledGroup,
    pub matrix: Vec<Vec<i64>>,
}

impl GroupHom {
    pub fn zero(source: AssembledGroup, target: AssembledGroup) -> Self {
        let matrix = vec![vec![0; source.summands.len()]; target.summands.len()];
        GroupHom { source, target, matrix }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    /// Image of source generator `j`.
    pub fn image_of(&self, j: usize) -> Vec<i64> {
        self.matrix.iter().map(|r| r[j]).collect()
    }

    pub fn scaled(&self, c: i64) -> GroupHom {
        let mut h = self.clone();
        for (i, row) in h.matrix.iter_mut().enumerate() {
            let o = h.target.summands[i].order(h.target.prime) as i64;
            for x in row.iter_mut() {
                *x *= c;
                if o > 0 {
                    *x = x.rem_euclid(o);
                }
            }
        }
        h
    }

    /// Checks that every relation of the source maps to a relation of the
    /// target.
    pub fn verify_well_defined(&self) -> Result<()> {
        let p = self.source.prime;
        for (j, s) in self.source.summands.iter().enumerate() {
            let rel = s.order(p) as i64;
            for (i, t) in self.target.summands.iter().enumerate() {
                let o = t.order(p) as i64;
                let v = self.matrix[i][j] * rel;
                let ok = if o == 0 { v == 0 } else { v.rem_euclid(o) == 0 };
                if !ok {
                    return Err(Error::Contract(format!(
                        "generator {j} of stem {} has order {rel} but its image in summand {i} does not",
                        self.source.stem
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Multiplication by η or ν from stem `stem` to `stem + |element|`. The
/// bottom dot of each source summand is pushed along the detecting line and
/// expressed in the target's adapted basis; coordinate `c_j` on a target
/// summand with bottom filtration `f0_j` contributes `c_j p^(f - f0_j)`.
pub fn multiplication_map(e_inf: &ExtChart, element: HopfElement, stem: i32) -> Result<GroupHom> {
    let p = e_inf.prime;
    let target_stem = stem + element.stem();
    let (source, src_strings) = assemble_stem(e_inf, stem)?;
    let (target, tgt_strings) = assemble_stem(e_inf, target_stem)?;
    let mut hom = GroupHom::zero(source.clone(), target.clone());
    let Some(label) = element.label(p) else {
        return Ok(hom);
    };
    let row_of: HashMap<usize, usize> =
        target.summands.iter().enumerate().map(|(i, s)| (s.string_index, i)).collect();
    for (j, s) in source.summands.iter().enumerate() {
        let f = s.bottom;
        let v = src_strings.strings[s.string_index].vector_at(f).unwrap();
        let m = e_inf.line_matrix(label, stem, f, element.stem());
        let img = m.apply(v)?;
        if img.iter().all(|&x| x == 0) {
            continue;
        }
        let coords = tgt_strings.coordinates(f + 1, &img)?;
        for (k, c) in coords {
            let i = *row_of.get(&k).ok_or_else(|| {
                Error::Contract(format!("target dot of the {label}-line in stem {target_stem} lies in no summand"))
            })?;
            let t = &target.summands[i];
            let shift = f + 1 - t.bottom;
            let o = t.order(p) as i64;
            let mut val = hom.matrix[i][j] + c as i64 * (p.value() as i64).pow(shift);
            if o > 0 {
                val = val.rem_euclid(o);
            }
            hom.matrix[i][j] = val;
        }
    }
    Ok(hom)
}

/// Everything computed for one `(prime, n)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StableGroups {
    pub prime: Prime,
    pub n: u32,
    pub e2: ExtChart,
    pub e_inf: EInfinity,
    /// Stems `0 ..= 2n+4`.
    pub groups: BTreeMap<i32, AssembledGroup>,
}

impl StableGroups {
    pub fn group(&self, stem: i32) -> Result<&AssembledGroup> {
        self.groups
            .get(&stem)
            .ok_or_else(|| Error::Range(format!("stem {stem} is outside 0..={}", 2 * self.n + 4)))
    }

    pub fn multiplication(&self, element: HopfElement, stem: i32) -> Result<GroupHom> {
        let top = 2 * self.n as i32 + 4;
        if stem + element.stem() > top || stem < 0 {
            return Err(Error::Range(format!("stems {stem} and {} must lie in 0..={top}", stem + element.stem())));
        }
        multiplication_map(&self.e_inf.chart, element, stem)
    }
}

pub fn compute_stable_groups(prime: Prime, n: u32, cache: Option<&ResolutionCache>) -> Result<StableGroups> {
    if n < 1 {
        return Err(Error::Range("n must be at least 1".into()));
    }
    let t_max = resolution::default_t_max(n);
    let module = crate::module::stunted_infinite(prime, n, t_max)?;
    let res = match cache {
        Some(c) => c.resolve(&module, t_max, resolution::DEFAULT_S_MAX)?,
        None => Arc::new(resolution::resolve_minimal(&module, t_max, resolution::DEFAULT_S_MAX)?),
    };
    let e2 = resolution::chart_of(&res)?;
    let e_inf = resolve_adams_differentials(&e2, &KnownFacts::embedded(), n)?;
    let groups = assemble_groups(&e_inf.chart, 2 * n as i32 + 4)?;
    Ok(StableGroups { prime, n, e2, e_inf, groups })
}

/// Memoized `compute_stable_groups` without a disk cache.
pub fn stable_groups(prime: Prime, n: u32) -> Result<Arc<StableGroups>> {
    static MEMO: OnceLock<Mutex<HashMap<(Prime, u32), Arc<StableGroups>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(g) = memo.lock().unwrap().get(&(prime, n)) {
        return Ok(g.clone());
    }
    let g = Arc::new(compute_stable_groups(prime, n, None)?);
    memo.lock().unwrap().insert((prime, n), g.clone());
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orders(p: Prime, n: u32, stem: i32) -> Vec<u64> {
        stable_groups(p, n).unwrap().group(stem).unwrap().cyclic_orders()
    }

    #[test]
    fn sigma_cp2() {
        for i in 0..=4 {
            assert!(orders(Prime::TWO, 2, i).is_empty());
        }
        assert_eq!(orders(Prime::TWO, 2, 5), vec![0]);
        assert_eq!(orders(Prime::TWO, 2, 6), vec![2]);
        assert_eq!(orders(Prime::TWO, 2, 7), vec![0, 2]);
        assert_eq!(orders(Prime::TWO, 2, 8), vec![2]);
    }

    #[test]
    fn top_stem_by_residue() {
        let want = [vec![8], vec![4], vec![2], vec![], vec![4], vec![2], vec![2], vec![]];
        for n in 4..=11u32 {
            assert_eq!(orders(Prime::TWO, n, 2 * n as i32 + 4), want[(n % 8) as usize], "n = {n}");
        }
    }

    #[test]
    fn three_primary() {
        for n in 3..=8u32 {
            let b = 2 * n as i32;
            assert_eq!(orders(Prime::THREE, n, b + 1), vec![0]);
            assert!(orders(Prime::THREE, n, b + 2).is_empty());
            assert_eq!(orders(Prime::THREE, n, b + 3), vec![0]);
            let top = if n % 3 == 0 { vec![3] } else { vec![] };
            assert_eq!(orders(Prime::THREE, n, b + 4), top, "n = {n}");
        }
    }

    #[test]
    fn eta_from_bottom_cell_n2() {
        let g = stable_groups(Prime::TWO, 2).unwrap();
        let h = g.multiplication(HopfElement::Eta, 5).unwrap();
        assert_eq!(h.matrix, vec![vec![1]]);
        h.verify_well_defined().unwrap();
    }

    #[test]
    fn eta_into_z8() {
        let g = stable_groups(Prime::TWO, 8).unwrap();
        let h = g.multiplication(HopfElement::Eta, 19).unwrap();
        assert_eq!(h.target.cyclic_orders(), vec![8]);
        assert_eq!(h.source.cyclic_orders(), vec![0, 2]);
        assert_eq!(h.matrix, vec![vec![0, 4]]);
    }

    #[test]
    fn eta_vanishes_at_three() {
        let g = stable_groups(Prime::THREE, 3).unwrap();
        assert!(g.multiplication(HopfElement::Eta, 7).unwrap().is_zero());
    }

    #[test]
    fn known_facts_table() {
        let f = KnownFacts::embedded();
        assert_eq!(f.orders, BTreeMap::from([(0, 8), (1, 4), (4, 4), (5, 2)]));
    }

    #[test]
    fn inconsistent_facts_are_rejected() {
        let (_, chart) = resolution::stunted_chart(Prime::TWO, 4).unwrap();
        let mut f = KnownFacts::embedded();
        f.orders.insert(4, 16);
        assert!(matches!(resolve_adams_differentials(&chart, &f, 4), Err(Error::Inconsistent(_))));
    }
}
