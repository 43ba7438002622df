//! Writes SVG charts for Σ CP^∞_n, one per residue of n mod 8, and an SVG
//! table of the last AHSS page for l = 4, r = 2.
//!
//! cargo run --example render_svg -- /tmp/charts

use std::path::PathBuf;

use metastable::adams::stable_groups;
use metastable::ahss::run;
use metastable::render::{chart_svg, page_svg};
use metastable::Prime;

fn main() -> metastable::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "charts".into()));
    std::fs::create_dir_all(&dir)?;
    for n in 8..16u32 {
        let sg = stable_groups(Prime::TWO, n)?;
        let lo = 2 * n as i32;
        let path = dir.join(format!("e2_n{n}.svg"));
        std::fs::write(&path, chart_svg(&sg.e2, Some(lo..=lo + 6)))?;
        println!("{}", path.display());
    }
    let out = run(4, 2, Prime::TWO)?;
    let path = dir.join("ahss_l4_r2.svg");
    std::fs::write(&path, page_svg(out.pages.last().unwrap()))?;
    println!("{}", path.display());
    Ok(())
}
