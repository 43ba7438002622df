//! Stable homotopy of Σ CP^∞_n through stem 2n+4 at p = 2 and p = 3,
//! checked against the embedded tables.
//!
//! cargo run --example pi_stable -- 4 11

use metastable::adams::stable_groups;
use metastable::reference::tables;
use metastable::Prime;

fn main() -> metastable::Result<()> {
    let mut args = std::env::args().skip(1).filter_map(|a| a.parse::<u32>().ok());
    let lo = args.next().unwrap_or(2);
    let hi = args.next().unwrap_or(lo + 7);
    for prime in [Prime::TWO, Prime::THREE] {
        println!("p = {prime}");
        for n in lo..=hi {
            let sg = stable_groups(prime, n)?;
            let mut row = Vec::new();
            for off in 1..=4 {
                let stem = 2 * n + off;
                let g = sg.group(stem as i32)?;
                let mut got = g.cyclic_orders();
                let mut want = tables().expected_group(prime.value(), n, stem).unwrap_or_default();
                got.sort();
                want.sort();
                let mark = if got == want { "" } else { " (!)" };
                row.push(format!("{:<10}", format!("{g}{mark}")));
            }
            println!("  n = {n:>2}  stems 2n+1..2n+4: {}", row.join(""));
        }
    }
    Ok(())
}
