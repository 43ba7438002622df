use std::path::Path;
use std::process::{Command, Output};

use metastable::census::CountTable;
use metastable::resolution::ExtChart;

fn run_in(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metastable"))
        .args(args)
        .env("METASTABLE_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn adem_prints_the_normal_form() {
    let o = run(&["adem", "--prime", "2", "Sq2 Sq2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "Sq3 Sq1");
    let o = run(&["adem", "--prime", "2", "--strategy", "rightmost", "Sq2 Sq2"]);
    assert_eq!(stdout(&o).trim(), "Sq3 Sq1");
}

#[test]
fn usage_and_engine_errors_have_distinct_codes() {
    assert_eq!(run(&["census", "--bogus"]).status.code(), Some(2));
    let o = run(&["count", "--l", "2", "--rank", "l-1"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error[range]"));
    let o = run(&["adem", "--prime", "2", "Sq2 Foo"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verification_flags_pass() {
    let o = run(&["census", "--rank", "l-1", "--lmax", "51", "--verify-paper"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("period 2"));
    let o = run(&["pi-stable", "--n", "2", "--verify-paper"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn count_and_ahss_subcommands() {
    let o = run(&["count", "--l", "26", "--rank", "l-2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("12"));
    let o = run(&["ahss", "--l", "4", "--rank", "l-2", "--prime", "2", "--dump-pages"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("E_2"));
}

#[test]
fn census_formats() {
    let o = run(&["census", "--rank", "l-2", "--lmax", "30", "--format", "csv"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("l,r,two_local,three_local,total"));
    assert_eq!(text.lines().count(), 28);
    let o = run(&["census", "--rank", "l-2", "--lmax", "30", "--format", "json"]);
    let t: CountTable = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(t.entries.len(), 27);
    assert!(t.mismatches.is_empty());
}

#[test]
fn resolve_json_round_trips_and_caches() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["resolve", "--n", "2", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let chart = ExtChart::from_json(&stdout(&o)).unwrap();
    assert!(chart.dots.iter().any(|d| d.s == 0 && d.t == 5));
    let again = run_in(dir.path(), &["resolve", "--n", "2", "--format", "json"]);
    assert_eq!(o.stdout, again.stdout);

    let listed = stdout(&run_in(dir.path(), &["cache", "list"]));
    assert_eq!(listed.lines().count(), 1);
    let cleared = run_in(dir.path(), &["cache", "clear"]);
    assert!(stdout(&cleared).starts_with("removed "));
    assert!(stdout(&run_in(dir.path(), &["cache", "list"])).is_empty());
}
