//! ASCII, SVG and JSON renderings of Adams charts and AHSS pages.
//!
//! Charts are drawn with stem t-s across and filtration s up. Lines are
//! drawn by geometry, so the slope tells the operation: vertical for
//! h0 (a0 at p = 3), slope 1 for h1, slope 1/3 for h2 (h0 = [P1] at p = 3).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::ahss::PageDump;
use crate::error::{Error, Result};
use crate::resolution::ExtChart;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Ascii,
    Svg,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii" => Ok(Format::Ascii),
            "svg" => Ok(Format::Svg),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unsupported format {s:?}"))),
        }
    }
}

/// The part of a chart inside a stem window.
struct Clip<'a> {
    chart: &'a ExtChart,
    stems: RangeInclusive<i32>,
    s_max: u32,
    /// `(stem, s)` of every visible dot by id, with its index among the
    /// dots sharing that position.
    place: BTreeMap<&'a str, (i32, u32, usize)>,
    counts: BTreeMap<(i32, u32), usize>,
}

impl<'a> Clip<'a> {
    fn new(chart: &'a ExtChart, stems: Option<RangeInclusive<i32>>) -> Self {
        let all = chart.stems();
        let stems = stems.unwrap_or_else(|| {
            let lo = all.first().copied().unwrap_or(0).min(0);
            let hi = all.last().copied().unwrap_or(0).max(lo);
            lo..=hi
        });
        let mut place = BTreeMap::new();
        let mut counts: BTreeMap<(i32, u32), usize> = BTreeMap::new();
        for d in &chart.dots {
            if stems.contains(&d.stem()) {
                let c = counts.entry((d.stem(), d.s)).or_default();
                place.insert(d.id.as_str(), (d.stem(), d.s, *c));
                *c += 1;
            }
        }
        let s_max = counts.keys().map(|k| k.1).max().unwrap_or(0);
        Clip { chart, stems, s_max, place, counts }
    }

    fn lines(&self) -> impl Iterator<Item = ((i32, u32, usize), (i32, u32, usize), &'a str)> + '_ {
        self.chart.lines.iter().filter_map(|l| {
            let a = self.place.get(l.from.as_str())?;
            let b = self.place.get(l.to.as_str())?;
            Some((*a, *b, l.label.as_str()))
        })
    }

    fn towers(&self) -> Vec<i32> {
        self.chart.towers.iter().copied().filter(|t| self.stems.contains(t)).collect()
    }
}

const CELL_W: usize = 4;

/// ASCII chart. Multiple dots at one position show as their count.
pub fn chart_ascii(chart: &ExtChart, stems: Option<RangeInclusive<i32>>) -> String {
    let clip = Clip::new(chart, stems);
    let lo = *clip.stems.start();
    let width = ((clip.stems.end() - lo + 1) as usize) * CELL_W;
    let rows = 2 * clip.s_max as usize + 2;
    let mut canvas = vec![vec![' '; width]; rows];
    // row for filtration s, counted from the top
    let row_of = |s: u32| rows - 1 - 2 * s as usize;
    let col_of = |stem: i32| (stem - lo) as usize * CELL_W;
    for (&(stem, s), &n) in &clip.counts {
        canvas[row_of(s)][col_of(stem)] = match n {
            1 => 'o',
            2..=9 => char::from_digit(n as u32, 10).unwrap(),
            _ => '*',
        };
    }
    for (a, b, _) in clip.lines() {
        if b.1 != a.1 + 1 {
            continue;
        }
        let row = row_of(a.1) - 1;
        let (x0, x1) = (col_of(a.0), col_of(b.0));
        let (ch, x) = match b.0 - a.0 {
            0 => ('|', x0),
            1 => ('/', (x0 + x1) / 2),
            _ => ('~', (x0 + x1) / 2),
        };
        canvas[row][x] = ch;
    }
    for t in clip.towers() {
        canvas[0][col_of(t)] = '^';
    }
    let mut out = String::new();
    for (i, line) in canvas.iter().enumerate() {
        let label = if i % 2 == 1 { format!("{:>3} ", (rows - 1 - i) / 2) } else { "    ".to_string() };
        let body: String = line.iter().collect();
        let _ = writeln!(out, "{label}{}", body.trim_end());
    }
    let _ = writeln!(out, "    {}", "-".repeat(width));
    let mut axis = String::from("    ");
    for stem in clip.stems.clone() {
        let _ = write!(axis, "{:<w$}", stem, w = CELL_W);
    }
    let _ = writeln!(out, "{}", axis.trim_end());
    let _ = writeln!(out, "    t-s across, s up; | h0  / h1  ~ h2 (at p = 3: | a0  ~ h0); ^ tower");
    out
}

const UNIT: f64 = 40.0;
const MARGIN: f64 = 40.0;

/// SVG 1.1 chart built from the same clipped data as the ASCII one.
pub fn chart_svg(chart: &ExtChart, stems: Option<RangeInclusive<i32>>) -> String {
    let clip = Clip::new(chart, stems);
    let lo = *clip.stems.start();
    let ncols = (clip.stems.end() - lo + 1) as f64;
    let w = ncols * UNIT + 2.0 * MARGIN;
    let h = (clip.s_max as f64 + 2.0) * UNIT + 2.0 * MARGIN;
    let pos = |(stem, s, k): (i32, u32, usize)| {
        let n = clip.counts[&(stem, s)] as f64;
        let x = MARGIN + ((stem - lo) as f64 + 0.5) * UNIT + (k as f64 - (n - 1.0) / 2.0) * 7.0;
        let y = h - MARGIN - (s as f64 + 0.5) * UNIT;
        (x, y)
    };
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(out, r##"<g stroke="#ddd" stroke-width="1">"##);
    for i in 0..=ncols as usize {
        let x = MARGIN + i as f64 * UNIT;
        let _ = writeln!(out, r#"<line x1="{x}" y1="{MARGIN}" x2="{x}" y2="{}"/>"#, h - MARGIN);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g font-family="monospace" font-size="11" text-anchor="middle">"#);
    for stem in clip.stems.clone() {
        let x = MARGIN + ((stem - lo) as f64 + 0.5) * UNIT;
        let _ = writeln!(out, r#"<text x="{x}" y="{}">{stem}</text>"#, h - MARGIN + 16.0);
    }
    for s in 0..=clip.s_max {
        let y = h - MARGIN - (s as f64 + 0.5) * UNIT + 4.0;
        let _ = writeln!(out, r#"<text x="{}" y="{y}">{s}</text>"#, MARGIN - 14.0);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g stroke="black" stroke-width="1.5">"#);
    for (a, b, label) in clip.lines() {
        let ((x1, y1), (x2, y2)) = (pos(a), pos(b));
        let _ = writeln!(out, r#"<line class="{label}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#);
    }
    for t in clip.towers() {
        let top = clip.place.values().filter(|p| p.0 == t).max_by_key(|p| p.1).copied();
        if let Some(p) = top {
            let (x, y) = pos(p);
            let _ = writeln!(out, r#"<line class="tower" x1="{x}" y1="{y}" x2="{x}" y2="{}"/>"#, y - UNIT * 0.8);
            let _ = writeln!(
                out,
                r#"<polygon class="tower" points="{},{} {},{} {},{}"/>"#,
                x - 4.0,
                y - UNIT * 0.8 + 6.0,
                x + 4.0,
                y - UNIT * 0.8 + 6.0,
                x,
                y - UNIT * 0.8 - 2.0
            );
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g fill="black">"#);
    for (id, p) in &clip.place {
        let (x, y) = pos(*p);
        let _ = writeln!(out, r#"<circle cx="{x}" cy="{y}" r="3"><title>{id}</title></circle>"#);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}

pub fn render_chart(chart: &ExtChart, format: Format, stems: Option<RangeInclusive<i32>>) -> Result<String> {
    match format {
        Format::Ascii => Ok(chart_ascii(chart, stems)),
        Format::Svg => Ok(chart_svg(chart, stems)),
        Format::Json => chart.to_json(),
    }
}

fn page_grid(page: &PageDump) -> (Vec<u32>, Vec<i32>, BTreeMap<(u32, i32), String>) {
    let mut columns: Vec<u32> = page.cells.iter().map(|c| c.column).collect();
    columns.sort();
    columns.dedup();
    let mut rows: Vec<i32> = page.cells.iter().map(|c| c.row).collect();
    rows.sort_by(|a, b| b.cmp(a));
    rows.dedup();
    let text = page.cells.iter().map(|c| ((c.column, c.row), c.group.to_string())).collect();
    (columns, rows, text)
}

/// ASCII table of an AHSS page followed by its differentials.
pub fn page_ascii(page: &PageDump) -> String {
    let (columns, rows, text) = page_grid(page);
    let width = text.values().map(|s| s.chars().count()).max().unwrap_or(1).max(3) + 2;
    let pad = |s: &str| format!("{}{}", s, " ".repeat(width.saturating_sub(s.chars().count())));
    let mut out = format!("E_{}  l = {}  r = {}  p = {}\n", page.page, page.l, page.r, page.prime);
    out.push_str("      ");
    for c in &columns {
        out.push_str(&pad(&c.to_string()));
    }
    out = out.trim_end().to_string();
    out.push('\n');
    for r in &rows {
        let mut line = format!("{:>5} ", r);
        for c in &columns {
            line.push_str(&pad(text.get(&(*c, *r)).map_or("", |s| s.as_str())));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    for d in &page.differentials {
        let _ = writeln!(
            out,
            "d{} {} -> {} by {}: {} -> {}, image {}",
            d.page, d.source, d.target, d.label, d.source_before, d.target_before, d.image
        );
    }
    out
}

/// SVG table of an AHSS page.
pub fn page_svg(page: &PageDump) -> String {
    let (columns, rows, text) = page_grid(page);
    let cw = 90.0;
    let rh = 28.0;
    let w = MARGIN * 2.0 + cw * (columns.len() as f64 + 1.0);
    let h = MARGIN * 2.0 + rh * (rows.len() as f64 + 1.0);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(out, r#"<g font-family="monospace" font-size="12" text-anchor="middle">"#);
    for (i, c) in columns.iter().enumerate() {
        let x = MARGIN + cw * (i as f64 + 1.5);
        let _ = writeln!(out, r#"<text x="{x}" y="{}">{c}</text>"#, MARGIN + rh * 0.6);
    }
    for (j, r) in rows.iter().enumerate() {
        let y = MARGIN + rh * (j as f64 + 1.6);
        let _ = writeln!(out, r#"<text x="{}" y="{y}">{r}</text>"#, MARGIN + cw * 0.5);
        for (i, c) in columns.iter().enumerate() {
            if let Some(s) = text.get(&(*c, *r)) {
                let x = MARGIN + cw * (i as f64 + 1.5);
                let _ = writeln!(out, r#"<text x="{x}" y="{y}">{s}</text>"#);
            }
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}

pub fn render_page(page: &PageDump, format: Format) -> Result<String> {
    match format {
        Format::Ascii => Ok(page_ascii(page)),
        Format::Svg => Ok(page_svg(page)),
        Format::Json => Ok(serde_json::to_string_pretty(page)?),
    }
}
