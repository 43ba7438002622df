//! Command-line front end. `main.rs` only forwards to [`main_with_args`].

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::adams::{compute_stable_groups, format_orders};
use crate::ahss;
use crate::cache::ResolutionCache;
use crate::census::{self, RankFamily};
use crate::error::{Error, Result};
use crate::module::{stunted_module, verify_action_against_diagram};
use crate::prime::Prime;
use crate::reference;
use crate::render::{self, Format};
use crate::resolution::{self, chart_of};
use crate::steenrod::{SteenrodAlgebra, Strategy};

#[derive(Parser, Debug)]
#[command(name = "metastable", version, about = "Metastable vector bundles over CP^l via Adams and Atiyah-Hirzebruch spectral sequences")]
pub struct Cli {
    /// Resolution cache directory (default: $METASTABLE_CACHE_DIR or .metastable-cache).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Print progress notes on stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Leftmost,
    Rightmost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TextOrJson {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChartFormat {
    Ascii,
    Svg,
    Json,
}

impl From<ChartFormat> for Format {
    fn from(f: ChartFormat) -> Format {
        match f {
            ChartFormat::Ascii => Format::Ascii,
            ChartFormat::Svg => Format::Svg,
            ChartFormat::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RankArg {
    #[value(name = "l-1")]
    LMinus1,
    #[value(name = "l-2")]
    LMinus2,
}

impl From<RankArg> for RankFamily {
    fn from(r: RankArg) -> RankFamily {
        match r {
            RankArg::LMinus1 => RankFamily::LMinus1,
            RankArg::LMinus2 => RankFamily::LMinus2,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normalize a product of Steenrod operations, e.g. "Sq2 Sq2".
    Adem {
        #[arg(long, default_value_t = 2)]
        prime: u32,
        #[arg(long, value_enum, default_value_t = StrategyArg::Leftmost)]
        strategy: StrategyArg,
        expression: String,
    },
    /// Steenrod action on H*(Σ CP^{n+k}_n).
    Module {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 4)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        prime: u32,
        /// Compare the five bottom cells with the embedded arc diagram.
        #[arg(long)]
        verify_diagram: bool,
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        format: TextOrJson,
    },
    /// Minimal resolution and Adams E2 chart of Σ CP^∞_n.
    Resolve {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        prime: u32,
        #[arg(long)]
        t_max: Option<i32>,
        #[arg(long, default_value_t = resolution::DEFAULT_S_MAX)]
        s_max: u32,
        /// List generator bidegrees instead of drawing the chart.
        #[arg(long)]
        generators: bool,
        #[arg(long, value_enum, default_value_t = ChartFormat::Ascii)]
        format: ChartFormat,
    },
    /// Stable homotopy groups of Σ CP^∞_n through stem 2n+4.
    PiStable {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        prime: u32,
        #[arg(long)]
        verify_paper: bool,
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        format: TextOrJson,
    },
    /// Atiyah-Hirzebruch spectral sequence for {CP^l, Σ CP^∞_r}.
    Ahss {
        #[arg(long)]
        l: u32,
        #[arg(long, value_enum)]
        rank: RankArg,
        #[arg(long, default_value_t = 2)]
        prime: u32,
        /// Print every page, not just the diagonal.
        #[arg(long)]
        dump_pages: bool,
        #[arg(long, value_enum, default_value_t = ChartFormat::Ascii)]
        format: ChartFormat,
    },
    /// Number of bundles with vanishing Chern classes for one l.
    Count {
        #[arg(long)]
        l: u32,
        #[arg(long, value_enum)]
        rank: RankArg,
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        format: TextOrJson,
    },
    /// Counts over a range of l, with period detection.
    Census {
        #[arg(long, value_enum)]
        rank: RankArg,
        #[arg(long)]
        lmin: Option<u32>,
        #[arg(long, default_value_t = 100)]
        lmax: u32,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
        #[arg(long)]
        verify_paper: bool,
    },
    /// Inspect or empty the resolution cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum CacheAction {
    List,
    Clear,
}

fn cache_for(cli_dir: &Option<PathBuf>) -> ResolutionCache {
    match cli_dir {
        Some(d) => ResolutionCache::new(d.clone()),
        None => ResolutionCache::from_env(),
    }
}

/// Runs one parsed command, writing its report to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let note = |msg: &str| {
        if cli.verbose {
            eprintln!("{msg}");
        }
    };
    match &cli.command {
        Command::Adem { prime, strategy, expression } => {
            let prime = Prime::new(*prime)?;
            let alg = SteenrodAlgebra::shared(prime);
            let word = alg.parse(expression)?;
            let e = match strategy {
                StrategyArg::Leftmost => alg.evaluate(expression)?,
                StrategyArg::Rightmost => alg.normalize_with_strategy(&word, Strategy::Rightmost),
            };
            writeln!(out, "{e}")?;
        }
        Command::Module { n, k, prime, verify_diagram, format } => {
            let prime = Prime::new(*prime)?;
            let m = stunted_module(prime, *n, *k, i32::MAX - 1)?;
            match format {
                TextOrJson::Json => writeln!(out, "{}", serde_json::to_string_pretty(&m.to_json())?)?,
                TextOrJson::Text => {
                    let j = m.to_json();
                    let names: Vec<&str> = j.generators.iter().map(|g| g.name.as_str()).collect();
                    writeln!(out, "cells: {}", names.join(" "))?;
                    for a in &j.arcs {
                        let c = if a.coeff == 1 { String::new() } else { format!("{} ", a.coeff) };
                        writeln!(out, "{} {} = {c}{}", a.op, a.from, a.to)?;
                    }
                }
            }
            if *verify_diagram {
                let report = verify_action_against_diagram(&m)?;
                for c in report.checks.iter().filter(|c| c.expected != c.computed) {
                    writeln!(out, "diagram mismatch: {} {} -> {}", c.op, c.from, c.to)?;
                }
                if !report.all_match {
                    return Err(Error::Verification(format!("action differs from the diagram for residue {}", report.residue)));
                }
                writeln!(out, "diagram for residue {}: all {} arcs match", report.residue, report.checks.len())?;
            }
        }
        Command::Resolve { n, prime, t_max, s_max, generators, format } => {
            let prime = Prime::new(*prime)?;
            let t_max = t_max.unwrap_or_else(|| resolution::default_t_max(*n));
            let m = crate::module::stunted_infinite(prime, *n, t_max)?;
            let cache = cache_for(&cli.cache_dir);
            note(&format!("resolving {} up to t = {t_max}, s = {s_max}", m.descriptor()));
            let res = cache.resolve(&m, t_max, *s_max)?;
            if *generators {
                for st in &res.stages {
                    let ids: Vec<String> = st.generators.iter().map(|g| format!("{}({},{})", g.id, g.s, g.t)).collect();
                    writeln!(out, "s = {}: {}", st.s, ids.join(" "))?;
                }
            } else {
                let chart = chart_of(&res)?;
                write!(out, "{}", render::render_chart(&chart, (*format).into(), None)?)?;
                if *format == ChartFormat::Json {
                    writeln!(out)?;
                }
            }
        }
        Command::PiStable { n, prime, verify_paper, format } => {
            let p = Prime::new(*prime)?;
            let cache = cache_for(&cli.cache_dir);
            let sg = compute_stable_groups(p, *n, Some(&cache))?;
            match format {
                TextOrJson::Text => {
                    writeln!(out, "π_i(Σ CP^∞_{n}) localized at {p}; zero for i <= {}", 2 * n)?;
                    for (stem, g) in sg.groups.range(2 * *n as i32 + 1..) {
                        writeln!(out, "  i = {stem}: {g}")?;
                    }
                }
                TextOrJson::Json => {
                    let rows: Vec<(i32, Vec<u64>)> = sg.groups.iter().map(|(s, g)| (*s, g.cyclic_orders())).collect();
                    writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
                }
            }
            if *verify_paper {
                let mut bad = Vec::new();
                for (stem, g) in &sg.groups {
                    if let Some(exp) = reference::tables().expected_group(*prime, *n, *stem as u32) {
                        let mut got = g.cyclic_orders();
                        let mut want = exp.clone();
                        got.sort();
                        want.sort();
                        if got != want {
                            bad.push(format!("stem {stem}: expected {}, computed {g}", format_orders(&exp)));
                        }
                    }
                }
                if !bad.is_empty() {
                    return Err(Error::Verification(bad.join("; ")));
                }
                writeln!(out, "matches the embedded tables")?;
            }
        }
        Command::Ahss { l, rank, prime, dump_pages, format } => {
            let p = Prime::new(*prime)?;
            let family: RankFamily = (*rank).into();
            if *l < family.min_l() {
                return Err(Error::Range(format!("rank {family} needs l >= {}", family.min_l())));
            }
            let run = ahss::run(*l, l - family.offset(), p)?;
            let pages: Vec<_> = if *dump_pages { run.pages.iter().collect() } else { run.pages.last().into_iter().collect() };
            if *format == ChartFormat::Json {
                if *dump_pages {
                    writeln!(out, "{}", serde_json::to_string_pretty(&run)?)?;
                } else {
                    writeln!(out, "{}", serde_json::to_string_pretty(&run.diagonal)?)?;
                }
            } else {
                for pg in pages {
                    write!(out, "{}", render::render_page(pg, (*format).into())?)?;
                    writeln!(out)?;
                }
                let d = &run.diagonal;
                let order = d.order.map_or("infinite".to_string(), |o| o.to_string());
                writeln!(out, "diagonal order at p = {p}: {order}{}", if d.ambiguous { " (ambiguous)" } else { "" })?;
            }
        }
        Command::Count { l, rank, format } => {
            let e = census::count_entry(*l, (*rank).into())?;
            match format {
                TextOrJson::Text => writeln!(
                    out,
                    "l = {}, rank {}: {} (2-local {}, 3-local {})",
                    e.l, e.r, e.total, e.two_local, e.three_local
                )?,
                TextOrJson::Json => writeln!(out, "{}", serde_json::to_string_pretty(&e)?)?,
            }
        }
        Command::Census { rank, lmin, lmax, format, verify_paper } => {
            let family: RankFamily = (*rank).into();
            let t = census::census(lmin.unwrap_or(family.min_l()), *lmax, family)?;
            match format {
                TableFormat::Text => write!(out, "{}", t.to_text())?,
                TableFormat::Json => writeln!(out, "{}", t.to_json()?)?,
                TableFormat::Csv => write!(out, "{}", t.to_csv())?,
            }
            if *verify_paper {
                if !t.mismatches.is_empty() {
                    return Err(Error::Verification(format!("{} entries differ from the embedded tables", t.mismatches.len())));
                }
                let expected_period = match family {
                    RankFamily::LMinus1 => 2,
                    RankFamily::LMinus2 => 24,
                };
                if t.entries.len() >= 2 * expected_period as usize && t.period != Some(expected_period) {
                    return Err(Error::Verification(format!("detected period {:?}, expected {expected_period}", t.period)));
                }
            }
        }
        Command::Cache { action } => {
            let cache = cache_for(&cli.cache_dir);
            match action {
                CacheAction::List => {
                    for (file, key) in cache.entries() {
                        writeln!(out, "{file}\t{key}")?;
                    }
                }
                CacheAction::Clear => {
                    let n = cache.clear()?;
                    writeln!(out, "removed {n} files from {}", cache.dir().display())?;
                }
            }
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the exit status. Usage
/// errors exit with 2; engine errors print `error[category]` on stderr and
/// exit with the category's code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let status = match execute(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error[{}]: {e}", e.category());
            e.exit_code()
        }
    };
    let _ = lock.flush();
    status
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("metastable").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        execute(&cli, &mut buf)?;
        Ok(String::from_utf8(buf).unwrap())
    }

    #[test]
    fn adem_command() {
        assert_eq!(run(&["adem", "--prime", "2", "Sq2 Sq2"]).unwrap().trim(), "Sq3 Sq1");
        assert_eq!(run(&["adem", "--strategy", "rightmost", "Sq2 Sq2"]).unwrap().trim(), "Sq3 Sq1");
        assert!(matches!(run(&["adem", "Sq2 Q"]), Err(Error::Parse(_))));
    }

    #[test]
    fn usage_errors() {
        assert!(Cli::try_parse_from(["metastable", "census", "--rank", "l-3"]).is_err());
        assert!(Cli::try_parse_from(["metastable", "frobnicate"]).is_err());
        let e = Cli::try_parse_from(["metastable", "adem", "--bogus", "Sq1"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn module_diagram() {
        let s = run(&["module", "--n", "5", "--verify-diagram"]).unwrap();
        assert!(s.contains("all"));
        assert!(s.starts_with("cells: y11 y13 y15 y17 y19"));
    }

    #[test]
    fn count_and_ahss() {
        assert!(run(&["count", "--l", "26", "--rank", "l-2"]).unwrap().contains(": 12 "));
        let s = run(&["ahss", "--l", "4", "--rank", "l-2", "--dump-pages"]).unwrap();
        assert!(s.contains("E_2") && s.contains("E_5"));
        assert!(s.trim_end().ends_with("diagonal order at p = 2: 1"));
        assert!(matches!(run(&["ahss", "--l", "2", "--rank", "l-1"]), Err(Error::Range(_))));
    }
}
