//! One line per acceptance criterion. Exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::process::Command;

use metastable::adams::stable_groups;
use metastable::ahss;
use metastable::census::{census, RankFamily};
use metastable::module::stunted_module;
use metastable::resolution::{chart_of, generator_id, resolve_minimal};
use metastable::steenrod::{SteenrodAlgebra, Strategy};
use metastable::Prime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CASES: u64 = 1000;

const PHI_BY_L_MOD_24: [u64; 24] = [1, 1, 12, 2, 1, 3, 2, 2, 3, 1, 4, 6, 1, 1, 6, 2, 1, 3, 4, 2, 3, 1, 2, 6];
const TWO_LOCAL_BY_L_MOD_8: [u64; 8] = [1, 1, 4, 2, 1, 1, 2, 2];
const THREE_LOCAL_BY_L_MOD_3: [u64; 3] = [1, 1, 3];

enum Verdict {
    Pass(String),
    Deviation(String),
    Fail(String),
}

type Outcome = Result<String, String>;

fn sorted(mut v: Vec<u64>) -> Vec<u64> {
    v.sort();
    v
}

fn rank_l_minus_1() -> Outcome {
    let t = census(3, 51, RankFamily::LMinus1).map_err(|e| e.to_string())?;
    for e in &t.entries {
        let want = if e.l % 2 == 1 { 2 } else { 1 };
        if e.total != want {
            return Err(format!("l = {}: {} bundles, expected {want}", e.l, e.total));
        }
    }
    Ok(format!("{} values of l, all exact", t.entries.len()))
}

fn rank_l_minus_2() -> Outcome {
    let t = census(4, 100, RankFamily::LMinus2).map_err(|e| e.to_string())?;
    for e in &t.entries {
        let want = PHI_BY_L_MOD_24[(e.l % 24) as usize];
        if e.total != want {
            return Err(format!("l = {}: {} bundles, expected {want}", e.l, e.total));
        }
    }
    if t.period != Some(24) {
        return Err(format!("minimal period {:?}, expected 24", t.period));
    }
    Ok("97 values of l exact, minimal period 24".into())
}

fn factor_tables() -> Outcome {
    let t = census(4, 100, RankFamily::LMinus2).map_err(|e| e.to_string())?;
    for e in &t.entries {
        let (two, three) = (TWO_LOCAL_BY_L_MOD_8[(e.l % 8) as usize], THREE_LOCAL_BY_L_MOD_3[(e.l % 3) as usize]);
        if e.two_local != two || e.three_local != three {
            return Err(format!("l = {}: local orders ({}, {}), expected ({two}, {three})", e.l, e.two_local, e.three_local));
        }
        if two * three != PHI_BY_L_MOD_24[(e.l % 24) as usize] {
            return Err(format!("l = {}: product of local orders disagrees with the count", e.l));
        }
    }
    Ok("2-local and 3-local tables exact, products agree for 4 <= l <= 100".into())
}

fn sigma_cp2() -> Outcome {
    let want: BTreeMap<i32, Vec<u64>> = (0..=8)
        .map(|i| {
            let g = match i {
                5 => vec![0],
                6 | 8 => vec![2],
                7 => vec![0, 2],
                _ => vec![],
            };
            (i, g)
        })
        .collect();
    let sg = stable_groups(Prime::TWO, 2).map_err(|e| e.to_string())?;
    for (stem, w) in want {
        let got = sg.group(stem).map_err(|e| e.to_string())?.cyclic_orders();
        if sorted(got.clone()) != w {
            return Err(format!("stem {stem}: {got:?}, expected {w:?}"));
        }
    }
    Ok("stems 0..=8 exact (0 = infinite cyclic)".into())
}

fn two_local_top_stem() -> Outcome {
    let by_n: [Vec<u64>; 8] = [vec![8], vec![4], vec![2], vec![], vec![4], vec![2], vec![2], vec![]];
    for n in 4..=19u32 {
        let sg = stable_groups(Prime::TWO, n).map_err(|e| e.to_string())?;
        let got = sg.group(2 * n as i32 + 4).map_err(|e| e.to_string())?.cyclic_orders();
        if got != by_n[(n % 8) as usize] {
            return Err(format!("n = {n}: {got:?}"));
        }
    }
    Ok("4 <= n <= 19 exact".into())
}

fn three_local_stems() -> Outcome {
    for n in 3..=11u32 {
        let sg = stable_groups(Prime::THREE, n).map_err(|e| e.to_string())?;
        let top = if n % 3 == 0 { vec![3] } else { vec![] };
        for (off, want) in [(1, vec![0]), (2, vec![]), (3, vec![0]), (4, top)] {
            let got = sg.group(2 * n as i32 + off).map_err(|e| e.to_string())?.cyclic_orders();
            if got != want {
                return Err(format!("n = {n}, stem 2n+{off}: {got:?}, expected {want:?}"));
            }
        }
    }
    Ok("3 <= n <= 11 exact in stems 2n+1..=2n+4".into())
}

fn resolution_fidelity() -> Verdict {
    let listed: Vec<(u32, i32)> = vec![
        (0, 5), (0, 7),
        (1, 6), (1, 7), (1, 8), (1, 9), (1, 13),
        (2, 7), (2, 9), (2, 9), (2, 13),
        (3, 8), (3, 10), (3, 12),
        (4, 9), (4, 11),
    ];
    let run = || -> Result<(Vec<(u32, i32)>, bool), String> {
        let m = stunted_module(Prime::TWO, 2, 5, 13).map_err(|e| e.to_string())?;
        let res = resolve_minimal(&m, 13, 4).map_err(|e| e.to_string())?;
        common::check_resolution(&res, &m)?;
        // the h0 line out of the bottom class needs a window tall enough to
        // confirm the towers
        let wide = stunted_module(Prime::TWO, 2, 7, 19).map_err(|e| e.to_string())?;
        let chart = chart_of(&resolve_minimal(&wide, 19, 12).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let (a, b) = (generator_id(0, 5, 0), generator_id(1, 6, 0));
        let h0 = chart.lines.iter().any(|l| l.label == "h0" && l.from == a && l.to == b);
        Ok((sorted_bidegrees(res.bidegrees()), h0))
    };
    let (mut got, h0) = match run() {
        Ok(x) => x,
        Err(e) => return Verdict::Fail(e),
    };
    if !h0 {
        return Verdict::Fail("no h0 line from (0,5) to (1,6)".into());
    }
    let mut missing = Vec::new();
    for g in &listed {
        match got.iter().position(|x| x == g) {
            Some(i) => {
                got.remove(i);
            }
            None => missing.push(*g),
        }
    }
    if !missing.is_empty() {
        return Verdict::Fail(format!("listed generators not produced: {missing:?}"));
    }
    match got.as_slice() {
        [] => Verdict::Pass("16 generators exact, h0 line (0,5)-(1,6) present".into()),
        [(4, 13)] => Verdict::Deviation(
            "all 16 listed generators produced plus (s,t) = (4,13), which the printed list omits; \
             exactness and minimality verified independently"
                .into(),
        ),
        extra => Verdict::Fail(format!("unexpected extra generators {extra:?}")),
    }
}

fn sorted_bidegrees(mut v: Vec<(u32, i32)>) -> Vec<(u32, i32)> {
    v.sort();
    v
}

fn worked_examples() -> Outcome {
    for (l, want) in [(3u32, 2u64), (4, 1)] {
        let out = ahss::run(l, 2, Prime::TWO).map_err(|e| e.to_string())?;
        if out.diagonal.order != Some(want) {
            return Err(format!("l = {l}: order {:?}, expected {want}", out.diagonal.order));
        }
    }
    Ok("orders 2 and 1".into())
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let pick = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { Prime::THREE } else { Prime::TWO };
    for _ in 0..CASES {
        let p = pick(&mut rng);
        let (r, c) = (rng.gen_range(0..9), rng.gen_range(0..9));
        common::check_linear_algebra(&common::random_matrix(&mut rng, p, r, c)).map_err(|e| format!("fp: {e}"))?;
    }
    for _ in 0..CASES {
        let p = pick(&mut rng);
        let alg = SteenrodAlgebra::shared(p);
        let len = rng.gen_range(2..=4);
        let word = common::random_word(&mut rng, p, len, if p.is_two() { 8 } else { 2 });
        let left = alg.normalize_with_strategy(&word, Strategy::Leftmost);
        if left != alg.normalize_with_strategy(&word, Strategy::Rightmost) {
            return Err(format!("steenrod: rewriting orders disagree on {word:?}"));
        }
        let cap = if p.is_two() { 9 } else { 12 };
        let (a, b, c) = (
            common::random_admissible(&mut rng, alg, cap),
            common::random_admissible(&mut rng, alg, cap),
            common::random_admissible(&mut rng, alg, cap),
        );
        common::check_associativity(alg, &a, &b, &c).map_err(|e| format!("steenrod: {e}"))?;
    }
    for _ in 0..CASES {
        let p = pick(&mut rng);
        let (n, k) = (rng.gen_range(1..40u32), rng.gen_range(0..6u32));
        let t_max = 2 * n as i32 + 1 + rng.gen_range(0..9);
        let m = stunted_module(p, n, k, t_max).map_err(|e| e.to_string())?;
        let res = resolve_minimal(&m, t_max, rng.gen_range(1..5)).map_err(|e| e.to_string())?;
        common::check_resolution(&res, &m).map_err(|e| format!("resolution n = {n}: {e}"))?;
    }
    for _ in 0..CASES {
        common::random_ahss_run(rng.gen()).map_err(|e| format!("ahss: {e}"))?;
    }
    for _ in 0..CASES {
        let p = pick(&mut rng);
        let n = rng.gen_range(1..=40u32);
        let off = rng.gen_range(1..6);
        let sg = stable_groups(p, n).map_err(|e| e.to_string())?;
        let towers = sg.e2.decompose_stem(2 * n as i32 + off).map_err(|e| e.to_string())?.tower_count();
        if towers != usize::from(off % 2 == 1) {
            return Err(format!("adams: n = {n}, stem 2n+{off} has {towers} towers"));
        }
    }
    Ok(format!("{CASES} cases each: fp, steenrod, resolution, ahss, adams"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let once = || {
        Command::new(env!("CARGO_BIN_EXE_metastable"))
            .args(["census", "--rank", "l-2", "--lmax", "100", "--format", "json"])
            .env("METASTABLE_CACHE_DIR", dir.path())
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (once()?, once()?);
    if !a.status.success() {
        return Err(String::from_utf8_lossy(&a.stderr).into_owned());
    }
    if a.stdout != b.stdout {
        return Err("outputs differ".into());
    }
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict>)> = vec![
        ("rank l-1 counts, 3 <= l <= 51", Box::new(|| verdict(rank_l_minus_1()))),
        ("rank l-2 counts and period, 4 <= l <= 100", Box::new(|| verdict(rank_l_minus_2()))),
        ("2-local and 3-local factor tables", Box::new(|| verdict(factor_tables()))),
        ("stable groups of Sigma CP^inf_2 through stem 8", Box::new(|| verdict(sigma_cp2()))),
        ("2-local stem 2n+4 by n mod 8", Box::new(|| verdict(two_local_top_stem()))),
        ("3-local stems 2n+1..2n+4", Box::new(|| verdict(three_local_stems()))),
        ("resolution of Sigma CP^inf_2, t <= 13, s <= 4", Box::new(resolution_fidelity)),
        ("worked examples l = 3, 4 with r = 2", Box::new(|| verdict(worked_examples()))),
        ("randomized property suites", Box::new(|| verdict(property_suites()))),
        ("byte-identical census output", Box::new(|| verdict(determinism()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Verdict::Pass(m) => println!("PASS {:>2}  {name}: {m}", i + 1),
            Verdict::Deviation(m) => println!("KNOWN-DEVIATION {:>2}  {name}: {m}", i + 1),
            Verdict::Fail(m) => {
                failed += 1;
                println!("FAIL {:>2}  {name}: {m}", i + 1);
            }
        }
    }
    println!("{} criteria, {failed} failed", criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn verdict(o: Outcome) -> Verdict {
    match o {
        Ok(m) => Verdict::Pass(m),
        Err(m) => Verdict::Fail(m),
    }
}
