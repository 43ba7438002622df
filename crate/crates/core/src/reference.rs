//! Embedded reference tables used by `--verify-paper` and by the tests.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

const RAW: &str = include_str!("../data/reference_tables.json");

#[derive(Debug, Clone, Deserialize)]
pub struct ReferenceTables {
    pub version: u32,
    pub action_diagrams: ActionDiagrams,
    pub bottom_two_cells_n2: BTreeMap<String, serde_json::Value>,
    pub resolution_n2_generators: ResolutionGenerators,
    pub stable_groups: StableGroups,
    pub known_facts: KnownFactsData,
    pub mosher: MosherData,
    pub worked_examples: WorkedExamples,
    pub bundle_counts: BundleCounts,
}

/// Residue class -> letter -> list of `[from, to]` window indices.
pub type Diagram = BTreeMap<String, BTreeMap<String, Vec<[u32; 2]>>>;

#[derive(Debug, Clone, Deserialize)]
pub struct ActionDiagrams {
    pub p2: Diagram,
    pub p3: Diagram,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ResolutionGenerators {
    pub generators: Vec<[u32; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ParityRow {
    pub even: Vec<u64>,
    pub odd: Vec<u64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TwoLocalRows {
    #[serde(rename = "1")]
    pub offset1: ParityRow,
    #[serde(rename = "2")]
    pub offset2: ParityRow,
    #[serde(rename = "3")]
    pub offset3: ParityRow,
    #[serde(rename = "4_by_n_mod_8")]
    pub offset4: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ThreeLocalRows {
    #[serde(rename = "1")]
    pub offset1: Vec<u64>,
    #[serde(rename = "2")]
    pub offset2: Vec<u64>,
    #[serde(rename = "3")]
    pub offset3: Vec<u64>,
    #[serde(rename = "4_by_n_mod_3")]
    pub offset4: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct StableGroups {
    pub sigma_cp2_p2: BTreeMap<String, Vec<u64>>,
    pub p2_rel_bottom: TwoLocalRows,
    pub p3_rel_bottom: ThreeLocalRows,
}

#[derive(Debug, Clone, Deserialize)]
pub struct KnownFactsData {
    pub source: String,
    pub orders: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MosherData {
    pub source: String,
    pub coefficients: Vec<u8>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct WorkedCase {
    pub l: u32,
    pub r: u32,
    pub order: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct WorkedExamples {
    pub cases: Vec<WorkedCase>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BundleCounts {
    pub rank_l_minus_1_by_l_mod_2: Vec<u64>,
    pub rank_l_minus_2_by_l_mod_24: Vec<u64>,
    pub rank_l_minus_2_two_local_by_l_mod_8: Vec<u64>,
    pub rank_l_minus_2_three_local_by_l_mod_3: Vec<u64>,
}

pub fn tables() -> &'static ReferenceTables {
    static T: OnceLock<ReferenceTables> = OnceLock::new();
    T.get_or_init(|| serde_json::from_str(RAW).expect("embedded reference tables are well-formed"))
}

impl ReferenceTables {
    /// Expected summand orders (0 = infinite cyclic) of the stable group in
    /// stem `2n + offset`, for offsets 1..=4 and below the bottom cell.
    pub fn expected_group(&self, prime: u32, n: u32, stem: u32) -> Option<Vec<u64>> {
        if stem <= 2 * n {
            return Some(Vec::new());
        }
        let off = stem - 2 * n;
        let even = n % 2 == 0;
        let pick = |r: &ParityRow| if even { r.even.clone() } else { r.odd.clone() };
        match prime {
            2 => {
                let t = &self.stable_groups.p2_rel_bottom;
                match off {
                    1 => Some(pick(&t.offset1)),
                    2 => Some(pick(&t.offset2)),
                    3 => Some(pick(&t.offset3)),
                    4 => Some(t.offset4[(n % 8) as usize].clone()),
                    _ => None,
                }
            }
            3 => {
                let t = &self.stable_groups.p3_rel_bottom;
                match off {
                    1 => Some(t.offset1.clone()),
                    2 => Some(t.offset2.clone()),
                    3 => Some(t.offset3.clone()),
                    4 => Some(t.offset4[(n % 3) as usize].clone()),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    pub fn expected_count(&self, rank_offset: u32, l: u32) -> Option<u64> {
        let c = &self.bundle_counts;
        match rank_offset {
            1 => Some(c.rank_l_minus_1_by_l_mod_2[(l % 2) as usize]),
            2 => Some(c.rank_l_minus_2_by_l_mod_24[(l % 24) as usize]),
            _ => None,
        }
    }
}
