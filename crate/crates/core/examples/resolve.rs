//! A minimal resolution of H*(Σ CP^∞_2; F_2) in a small window, with its
//! generators and their differentials.
//!
//! cargo run --example resolve -- 13 4

use metastable::module::stunted_infinite;
use metastable::resolution::resolve_minimal;
use metastable::Prime;

fn main() -> metastable::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<i64>().ok());
    let t_max = args.next().flatten().unwrap_or(13) as i32;
    let s_max = args.next().flatten().unwrap_or(4) as u32;
    let m = stunted_infinite(Prime::TWO, 2, t_max)?;
    let res = resolve_minimal(&m, t_max, s_max)?;
    res.verify_minimal()?;
    for stage in &res.stages {
        println!("s = {}", stage.s);
        for (g, d) in stage.generators.iter().zip(&stage.differentials) {
            let terms: Vec<String> = d
                .iter()
                .map(|(j, e)| {
                    let prev = if stage.s == 0 { format!("y{j}") } else { res.stages[stage.s as usize - 1].generators[*j].id.clone() };
                    format!("({e}) {prev}")
                })
                .collect();
            let rhs = if stage.s == 0 { "augmentation".to_string() } else { terms.join(" + ") };
            println!("  {} (t = {:>2}) -> {rhs}", g.id, g.t);
        }
    }
    println!("{} generators", res.generator_count());
    Ok(())
}
