//! Adem relations: normal forms, admissible bases and products.
//!
//! cargo run --example adem -- "Sq2 Sq2" "Sq3 Sq5 Sq2"
//! cargo run --example adem -- --p3 "P1 P1" "P1 b P1"

use metastable::steenrod::{SteenrodAlgebra, Strategy};
use metastable::Prime;

fn main() -> metastable::Result<()> {
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    let prime = if args.first().map(String::as_str) == Some("--p3") {
        args.remove(0);
        Prime::THREE
    } else {
        Prime::TWO
    };
    if args.is_empty() {
        args = if prime.is_two() {
            vec!["Sq2 Sq2".into(), "Sq1 Sq2 Sq1".into(), "Sq3 Sq5 Sq2".into(), "Sq4 Sq4".into()]
        } else {
            vec!["P1 P1".into(), "P1 b P1".into(), "P1 P3".into()]
        };
    }
    let alg = SteenrodAlgebra::shared(prime);
    for text in &args {
        let left = alg.evaluate(text)?;
        let right = alg.normalize_with_strategy(&alg.parse(text)?, Strategy::Rightmost);
        println!("{text:>14}  =  {left}");
        assert_eq!(left, right, "rewriting order changed the normal form");
    }
    println!();
    let step = if prime.is_two() { 1 } else { 4 };
    for d in (0..=12).step_by(step) {
        let basis = alg.admissible_basis(d)?;
        let names: Vec<String> = basis.iter().map(|m| m.to_string()).collect();
        println!("degree {d:>2}: {}", names.join(", "));
    }
    Ok(())
}
