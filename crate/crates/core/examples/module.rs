//! Steenrod action on H*(Σ CP^{n+4}_n) and the bottom-cell diagrams.
//!
//! cargo run --example module -- 5

use metastable::module::{stunted_module, verify_action_against_diagram};
use metastable::Prime;

fn main() -> metastable::Result<()> {
    let n: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    for prime in [Prime::TWO, Prime::THREE] {
        let m = stunted_module(prime, n, 4, 2 * n as i32 + 9)?;
        println!("p = {prime}, n = {n}: {}", m.descriptor());
        for a in m.to_json().arcs {
            println!("  {:>4} {} -> {}", a.op, a.from, a.to);
        }
        let report = verify_action_against_diagram(&m)?;
        println!("  diagram for residue {}: {}", report.residue, if report.all_match { "matches" } else { "DIFFERS" });
    }
    Ok(())
}
