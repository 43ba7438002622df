//! Bundle counts over a range of l, with period detection and comparison
//! against the embedded tables.
//!
//! Only the primes 2 and 3 contribute: the groups involved carry no
//! p-torsion for p >= 5 in this range.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::ahss;
use crate::error::{Error, Result};
use crate::intlat::GroupType;
use crate::prime::Prime;
use crate::reference;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RankFamily {
    #[serde(rename = "l-1")]
    LMinus1,
    #[serde(rename = "l-2")]
    LMinus2,
}

impl RankFamily {
    pub fn offset(self) -> u32 {
        match self {
            RankFamily::LMinus1 => 1,
            RankFamily::LMinus2 => 2,
        }
    }

    pub fn from_offset(offset: u32) -> Result<Self> {
        match offset {
            1 => Ok(RankFamily::LMinus1),
            2 => Ok(RankFamily::LMinus2),
            o => Err(Error::Range(format!("rank offset {o} is not 1 or 2"))),
        }
    }

    /// Smallest l the count is defined for.
    pub fn min_l(self) -> u32 {
        self.offset() + 2
    }
}

impl fmt::Display for RankFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l-{}", self.offset())
    }
}

impl FromStr for RankFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l-1" => Ok(RankFamily::LMinus1),
            "l-2" => Ok(RankFamily::LMinus2),
            _ => Err(Error::Parse(format!("rank must be l-1 or l-2, got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountEntry {
    pub l: u32,
    pub r: u32,
    pub two_local: u64,
    pub three_local: u64,
    pub total: u64,
    /// Surviving diagonal groups, for provenance.
    pub two_local_group: Vec<GroupType>,
    pub three_local_group: Vec<GroupType>,
}

fn local_order(l: u32, r: u32, prime: Prime) -> Result<(u64, Vec<GroupType>)> {
    let run = ahss::run(l, r, prime)?;
    let d = run.diagonal;
    if d.ambiguous {
        return Err(Error::Inconsistent(format!(
            "l = {l}, r = {r}, p = {prime}: {} diagonal cells survive",
            d.survivors.len()
        )));
    }
    let groups: Vec<GroupType> = d.survivors.into_iter().map(|c| c.group).collect();
    let order = d
        .order
        .ok_or_else(|| Error::Inconsistent(format!("l = {l}, r = {r}, p = {prime}: infinite diagonal cell")))?;
    Ok((order, groups))
}

pub fn count_entry(l: u32, family: RankFamily) -> Result<CountEntry> {
    if l < family.min_l() {
        return Err(Error::Range(format!("rank {family} needs l >= {}, got {l}", family.min_l())));
    }
    let r = l - family.offset();
    let (two_local, two_local_group) = local_order(l, r, Prime::TWO)?;
    let (three_local, three_local_group) = local_order(l, r, Prime::THREE)?;
    Ok(CountEntry { l, r, two_local, three_local, total: two_local * three_local, two_local_group, three_local_group })
}

/// Number of rank `l - offset` bundles over CP^l with vanishing Chern
/// classes.
pub fn count_bundles(l: u32, offset: u32) -> Result<u64> {
    Ok(count_entry(l, RankFamily::from_offset(offset)?)?.total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub l: u32,
    pub what: String,
    pub expected: u64,
    pub computed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub rank: RankFamily,
    pub l_min: u32,
    pub l_max: u32,
    pub entries: Vec<CountEntry>,
    /// Smallest period fitting the data with at least two full repetitions.
    pub period: Option<u32>,
    /// Count by `l mod period`; `None` for residues absent from the range.
    pub residues: Vec<Option<u64>>,
    pub mismatches: Vec<Mismatch>,
}

/// Smallest `P` with `2P <= len` such that values `P` apart agree.
pub fn minimal_period(values: &[u64]) -> Option<usize> {
    (1..=values.len() / 2).find(|&p| values.iter().zip(&values[p..]).all(|(a, b)| a == b))
}

/// Counts for `l_min ..= l_max`, computed in parallel. The lower bound is
/// raised to the smallest admissible l.
pub fn census(l_min: u32, l_max: u32, family: RankFamily) -> Result<CountTable> {
    let lo = l_min.max(family.min_l());
    let ls: Vec<u32> = if lo <= l_max { (lo..=l_max).collect() } else { Vec::new() };
    let slots: Vec<Mutex<Option<Result<CountEntry>>>> = ls.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(ls.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= ls.len() {
                    break;
                }
                *slots[i].lock().unwrap() = Some(count_entry(ls[i], family));
            });
        }
    });
    let mut entries = Vec::with_capacity(ls.len());
    for slot in slots {
        entries.push(slot.into_inner().unwrap().expect("every slot filled")?);
    }
    let values: Vec<u64> = entries.iter().map(|e| e.total).collect();
    let period = minimal_period(&values).map(|p| p as u32);
    let residues = match period {
        Some(p) => (0..p).map(|k| entries.iter().find(|e| e.l % p == k).map(|e| e.total)).collect(),
        None => Vec::new(),
    };
    let mismatches = compare_with_tables(&entries, family);
    Ok(CountTable { rank: family, l_min, l_max, entries, period, residues, mismatches })
}

fn compare_with_tables(entries: &[CountEntry], family: RankFamily) -> Vec<Mismatch> {
    let t = reference::tables();
    let mut out = Vec::new();
    let mut check = |l: u32, what: &str, expected: u64, computed: u64| {
        if expected != computed {
            out.push(Mismatch { l, what: what.to_string(), expected, computed });
        }
    };
    for e in entries {
        if let Some(x) = t.expected_count(family.offset(), e.l) {
            check(e.l, "total", x, e.total);
        }
        match family {
            RankFamily::LMinus1 => check(e.l, "3-local", 1, e.three_local),
            RankFamily::LMinus2 => {
                let bc = &t.bundle_counts;
                check(e.l, "2-local", bc.rank_l_minus_2_two_local_by_l_mod_8[(e.l % 8) as usize], e.two_local);
                check(e.l, "3-local", bc.rank_l_minus_2_three_local_by_l_mod_3[(e.l % 3) as usize], e.three_local);
            }
        }
    }
    out
}

impl CountTable {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("l,r,two_local,three_local,total\n");
        for e in &self.entries {
            s.push_str(&format!("{},{},{},{},{}\n", e.l, e.r, e.two_local, e.three_local, e.total));
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("rank {}  l = {}..={}\n", self.rank, self.l_min, self.l_max);
        s.push_str(&format!("{:>4} {:>8} {:>8} {:>6}\n", "l", "2-local", "3-local", "count"));
        for e in &self.entries {
            s.push_str(&format!("{:>4} {:>8} {:>8} {:>6}\n", e.l, e.two_local, e.three_local, e.total));
        }
        match self.period {
            Some(p) => {
                let cells: Vec<String> =
                    self.residues.iter().map(|v| v.map_or("-".to_string(), |x| x.to_string())).collect();
                s.push_str(&format!("period {p}; by l mod {p}: {}\n", cells.join(" ")));
            }
            None => s.push_str("period: none detected\n"),
        }
        if self.mismatches.is_empty() {
            s.push_str("tables: all entries match\n");
        } else {
            for m in &self.mismatches {
                s.push_str(&format!("mismatch at l = {}: {} expected {}, computed {}\n", m.l, m.what, m.expected, m.computed));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_counts() {
        assert_eq!(count_bundles(5, 1).unwrap(), 2);
        assert_eq!(count_bundles(6, 1).unwrap(), 1);
        assert_eq!(count_bundles(26, 2).unwrap(), 12);
        assert_eq!(count_bundles(35, 2).unwrap(), 6);
    }

    #[test]
    fn hypotheses() {
        assert!(matches!(count_bundles(2, 1), Err(Error::Range(_))));
        assert!(matches!(count_bundles(3, 2), Err(Error::Range(_))));
        assert!(matches!(count_bundles(9, 3), Err(Error::Range(_))));
    }

    #[test]
    fn period_detection() {
        assert_eq!(minimal_period(&[1, 2, 1, 2, 1]), Some(2));
        assert_eq!(minimal_period(&[1, 1, 1]), Some(1));
        assert_eq!(minimal_period(&[1, 2, 3]), None);
        assert_eq!(minimal_period(&[]), None);
    }

    #[test]
    fn empty_range() {
        let t = census(10, 5, RankFamily::LMinus2).unwrap();
        assert!(t.entries.is_empty());
        assert_eq!(t.period, None);
        assert!(t.mismatches.is_empty());
    }

    #[test]
    fn rank_family_parsing() {
        assert_eq!("l-2".parse::<RankFamily>().unwrap(), RankFamily::LMinus2);
        assert!("l-3".parse::<RankFamily>().is_err());
        assert_eq!(RankFamily::LMinus1.to_string(), "l-1");
    }

    #[test]
    fn small_census_formats() {
        let t = census(3, 9, RankFamily::LMinus1).unwrap();
        assert_eq!(t.period, Some(2));
        assert_eq!(t.residues, vec![Some(1), Some(2)]);
        assert!(t.mismatches.is_empty());
        let back: CountTable = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.to_csv().lines().count(), 8);
        assert!(t.to_text().contains("period 2"));
    }
}
