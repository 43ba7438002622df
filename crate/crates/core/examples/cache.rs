//! Resolutions stored on disk and reloaded.
//!
//! METASTABLE_CACHE_DIR=/tmp/mc cargo run --example cache

use std::time::Instant;

use metastable::cache::ResolutionCache;
use metastable::module::stunted_infinite;
use metastable::resolution::default_t_max;
use metastable::Prime;

fn main() -> metastable::Result<()> {
    let cache = ResolutionCache::from_env();
    let n = 6;
    let t_max = default_t_max(n);
    let m = stunted_infinite(Prime::TWO, n, t_max)?;
    for pass in 1..=2 {
        let t = Instant::now();
        let r = cache.resolve(&m, t_max, 12)?;
        println!("pass {pass}: {} generators in {:?}", r.generator_count(), t.elapsed());
    }
    for (file, key) in cache.entries() {
        println!("{file}  {key}");
    }
    Ok(())
}
