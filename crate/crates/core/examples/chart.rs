//! Adams E2 and E-infinity charts of Σ CP^∞_n, drawn in ASCII.
//!
//! cargo run --example chart -- 2

use metastable::adams::stable_groups;
use metastable::render::chart_ascii;
use metastable::Prime;

fn main() -> metastable::Result<()> {
    let n: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let prime = match std::env::args().nth(2).as_deref() {
        Some("3") => Prime::THREE,
        _ => Prime::TWO,
    };
    let sg = stable_groups(prime, n)?;
    let stems = (2 * n as i32)..=(2 * n as i32 + 6);
    println!("E2, p = {prime}, n = {n}");
    print!("{}", chart_ascii(&sg.e2, Some(stems.clone())));
    println!();
    println!("E-infinity through stem {}", 2 * n + 4);
    print!("{}", chart_ascii(&sg.e_inf.chart, Some((2 * n as i32)..=(2 * n as i32 + 4))));
    for d in &sg.e_inf.differentials {
        println!("d{}: stem {} -> {}: {}", d.r, d.source_stem, d.target_stem, d.note);
    }
    Ok(())
}
