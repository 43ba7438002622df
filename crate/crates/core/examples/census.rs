//! Bundle counts for rank l-1 and l-2 with the detected periods.
//!
//! cargo run --release --example census -- 100

use metastable::census::{census, RankFamily};

fn main() -> metastable::Result<()> {
    let l_max: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(60);
    for family in [RankFamily::LMinus1, RankFamily::LMinus2] {
        let t = census(family.min_l(), l_max, family)?;
        let counts: Vec<String> = t.entries.iter().map(|e| e.total.to_string()).collect();
        println!("rank {family}, l = {}..={l_max}: {}", family.min_l(), counts.join(" "));
        if let Some(p) = t.period {
            let res: Vec<String> = t.residues.iter().map(|v| v.map_or("-".into(), |x| x.to_string())).collect();
            println!("  period {p}, by l mod {p}: {}", res.join(" "));
        }
        println!("  {} mismatches against the embedded tables", t.mismatches.len());
    }
    Ok(())
}
