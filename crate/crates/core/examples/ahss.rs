//! Every page of the Atiyah-Hirzebruch spectral sequence for
//! {CP^l, Σ CP^∞_r}.
//!
//! cargo run --example ahss -- 4 2
//! cargo run --example ahss -- 11 9 3

use metastable::ahss::run;
use metastable::render::page_ascii;
use metastable::Prime;

fn main() -> metastable::Result<()> {
    let mut args = std::env::args().skip(1).filter_map(|a| a.parse::<u32>().ok());
    let l = args.next().unwrap_or(4);
    let r = args.next().unwrap_or(l - 2);
    let prime = Prime::new(args.next().unwrap_or(2))?;
    let out = run(l, r, prime)?;
    for page in &out.pages {
        println!("{}", page_ascii(page));
    }
    match out.diagonal.order {
        Some(o) => println!("order of the diagonal at p = {prime}: {o}"),
        None => println!("diagonal is infinite"),
    }
    Ok(())
}
