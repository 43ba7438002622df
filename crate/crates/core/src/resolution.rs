//! Minimal free resolutions over the Steenrod algebra and the Adams E2
//! charts read off from them.
//!
//! The resolution is built one internal degree at a time. In degree `t`,
//! stage `s` receives new generators exactly where the kernel of the
//! previous differential is not yet covered by the image of the existing
//! generators. The complement is chosen by deterministic echelon pivoting,
//! so generator numbering is stable across runs.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::{FpMatrix, FpVector, Span};
use crate::module::{ModulePresentation, SparseVec};
use crate::prime::Prime;
use crate::steenrod::{Monomial, Op, SteenrodAlgebra, SteenrodElement};
use crate::strings::{self, StemStrings};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeGenerator {
    pub id: String,
    pub s: u32,
    pub t: i32,
}

/// One filtration of the resolution. Stage 0 maps to the module through
/// `augmentation`; later stages map to the previous stage through
/// `differentials`, stored as `(generator of stage s-1, coefficient)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionStage {
    pub s: u32,
    pub generators: Vec<FreeGenerator>,
    pub differentials: Vec<Vec<(usize, SteenrodElement)>>,
    pub augmentation: Vec<SparseVec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub prime: Prime,
    pub module_descriptor: String,
    pub module_n: Option<u32>,
    pub module_k: Option<u32>,
    pub t_max: i32,
    pub s_max: u32,
    pub stages: Vec<ResolutionStage>,
}

impl Resolution {
    pub fn generator_count(&self) -> usize {
        self.stages.iter().map(|s| s.generators.len()).sum()
    }

    pub fn bidegrees(&self) -> Vec<(u32, i32)> {
        self.stages.iter().flat_map(|st| st.generators.iter().map(|g| (g.s, g.t))).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.generator_count() == 0
    }

    /// Number of stage-`s` generators in internal degree `t`, which is the
    /// dimension of Ext^{s,t}.
    pub fn ext_dim(&self, s: u32, t: i32) -> usize {
        self.stages.get(s as usize).map_or(0, |st| st.generators.iter().filter(|g| g.t == t).count())
    }

    /// Checks minimality: no differential has a unit coefficient.
    pub fn verify_minimal(&self) -> Result<()> {
        for st in &self.stages {
            for (g, d) in st.generators.iter().zip(&st.differentials) {
                for (_, e) in d {
                    if e.coefficient(&Monomial::unit()) != 0 {
                        return Err(Error::Contract(format!("differential of {} has a unit coefficient", g.id)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Basis of a free module in one degree: `(generator index, monomial)`.
struct FreeBasis {
    entries: Vec<(usize, Monomial)>,
    index: HashMap<(usize, Monomial), usize>,
}

impl FreeBasis {
    fn build(alg: &SteenrodAlgebra, gens: &[FreeGenerator], t: i32) -> Result<FreeBasis> {
        let mut entries = Vec::new();
        for (gi, g) in gens.iter().enumerate() {
            if g.t > t {
                continue;
            }
            for m in alg.admissible_basis((t - g.t) as u32)?.iter() {
                entries.push((gi, m.clone()));
            }
        }
        let index = entries.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        Ok(FreeBasis { entries, index })
    }

    fn dim(&self) -> usize {
        self.entries.len()
    }
}

struct Builder<'a> {
    alg: &'a SteenrodAlgebra,
    module: &'a ModulePresentation,
    stages: Vec<ResolutionStage>,
}

impl<'a> Builder<'a> {
    fn prime(&self) -> Prime {
        self.module.prime
    }

    /// Image of `theta * g` for generator `gi` of stage `s`, in the target
    /// basis (module degree-t basis for s = 0, free basis of stage s-1 else).
    fn column(&self, s: u32, gi: usize, theta: &Monomial, target: &Target) -> Result<FpVector> {
        let p = self.prime().value();
        let mut out = vec![0u8; target.dim()];
        let stage = &self.stages[s as usize];
        match target {
            Target::Module(idx) => {
                for &(b, c) in &stage.augmentation[gi] {
                    for (j, d) in self.module.act_monomial(theta, b) {
                        let pos = idx[&j];
                        out[pos] = ((out[pos] as u32 + c as u32 * d as u32) % p) as u8;
                    }
                }
            }
            Target::Free(basis) => {
                for (gj, coeff) in &stage.differentials[gi] {
                    for (m, c) in coeff.terms() {
                        let prod = self.alg.multiply_monomials(theta, m);
                        for (mu, d) in prod.terms() {
                            let pos = *basis.index.get(&(*gj, mu.clone())).ok_or_else(|| {
                                Error::Exactness(format!("product {mu} missing from the target basis"))
                            })?;
                            out[pos] = ((out[pos] as u32 + c as u32 * d as u32) % p) as u8;
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

enum Target {
    Module(HashMap<usize, usize>),
    Free(FreeBasis),
}

impl Target {
    fn dim(&self) -> usize {
        match self {
            Target::Module(m) => m.len(),
            Target::Free(b) => b.dim(),
        }
    }
}

pub fn generator_id(s: u32, t: i32, repeat: usize) -> String {
    format!("e_{{{s},{t}}}{}", "'".repeat(repeat))
}

/// Minimal resolution of `module` in the window `t <= t_max`, `s <= s_max`.
pub fn resolve_minimal(module: &ModulePresentation, t_max: i32, s_max: u32) -> Result<Resolution> {
    resolve_with(SteenrodAlgebra::shared(module.prime), module, t_max, s_max)
}

pub fn resolve_with(alg: &SteenrodAlgebra, module: &ModulePresentation, t_max: i32, s_max: u32) -> Result<Resolution> {
    if alg.prime() != module.prime {
        return Err(Error::Contract("algebra and module primes differ".into()));
    }
    if s_max < 1 {
        return Err(Error::Config("s_max must be at least 1".into()));
    }
    let mut b = Builder {
        alg,
        module,
        stages: (0..=s_max)
            .map(|s| ResolutionStage { s, generators: Vec::new(), differentials: Vec::new(), augmentation: Vec::new() })
            .collect(),
    };
    let res_meta = |stages| Resolution {
        prime: module.prime,
        module_descriptor: module.descriptor(),
        module_n: module.meta.n,
        module_k: module.meta.k,
        t_max,
        s_max,
        stages,
    };
    let Some(bottom) = module.bottom_degree() else {
        return Ok(res_meta(b.stages));
    };
    if t_max < bottom {
        return Ok(res_meta(b.stages));
    }
    let p = module.prime;
    for t in bottom..=t_max {
        // kernel of the previous map, in coordinates of its source basis
        let module_basis = module.basis_in_degree(t);
        let mut kernel: Vec<FpVector> = (0..module_basis.len())
            .map(|i| {
                let mut e = vec![0u8; module_basis.len()];
                e[i] = 1;
                e
            })
            .collect();
        let mut target = Target::Module(module_basis.iter().enumerate().map(|(i, &j)| (j, i)).collect());
        let mut prev_matrix: Option<FpMatrix> = None;
        for s in 0..=s_max {
            let old = b.stages[s as usize].generators.len();
            let basis_old = FreeBasis::build(alg, &b.stages[s as usize].generators, t)?;
            let rows = target.dim();
            let mut cols = Vec::with_capacity(basis_old.dim());
            for (gi, m) in &basis_old.entries {
                cols.push(b.column(s, *gi, m, &target)?);
            }
            let mut span = Span::new(p, rows);
            for c in &cols {
                span.insert(c);
            }
            let mut repeat = 0;
            for k in &kernel {
                if span.insert(k) {
                    let stage = &mut b.stages[s as usize];
                    stage.generators.push(FreeGenerator { id: generator_id(s, t, repeat), s, t });
                    repeat += 1;
                    match &target {
                        Target::Module(_) => {
                            let v: SparseVec = k
                                .iter()
                                .enumerate()
                                .filter(|(_, &c)| c != 0)
                                .map(|(i, &c)| (module_basis[i], c))
                                .collect();
                            stage.augmentation.push(v);
                            stage.differentials.push(Vec::new());
                        }
                        Target::Free(tb) => {
                            let mut by_gen: BTreeMap<usize, SteenrodElement> = BTreeMap::new();
                            for (i, &c) in k.iter().enumerate() {
                                if c != 0 {
                                    let (gj, m) = &tb.entries[i];
                                    by_gen.entry(*gj).or_insert_with(|| SteenrodElement::zero(p)).add_term(m.clone(), c);
                                }
                            }
                            stage.differentials.push(by_gen.into_iter().collect());
                            stage.augmentation.push(Vec::new());
                        }
                    }
                    cols.push(k.clone());
                }
            }
            let new = b.stages[s as usize].generators.len() - old;
            let matrix = FpMatrix::from_columns(p, rows, &cols);
            // exactness: the image must be the whole kernel
            if matrix.rank() != kernel.len() {
                return Err(Error::Exactness(format!(
                    "image of rank {} does not fill a kernel of dimension {} at (s, t) = ({s}, {t})",
                    matrix.rank(),
                    kernel.len()
                )));
            }
            if let Some(prev) = &prev_matrix {
                let comp = prev.mul(&matrix)?;
                if (0..comp.rows()).any(|i| comp.row(i).iter().any(|&x| x != 0)) {
                    return Err(Error::Exactness(format!("d o d != 0 at (s, t) = ({s}, {t})")));
                }
            }
            if s == s_max {
                break;
            }
            let basis_full = if new == 0 {
                basis_old
            } else {
                FreeBasis::build(alg, &b.stages[s as usize].generators, t)?
            };
            // the columns were built in `basis_old` order followed by the new
            // generators, which is exactly the order of `basis_full`
            debug_assert_eq!(basis_full.dim(), cols.len());
            kernel = matrix.kernel_basis();
            prev_matrix = Some(matrix);
            target = Target::Free(basis_full);
        }
    }
    let res = res_meta(b.stages);
    res.verify_minimal()?;
    Ok(res)
}

/// Structure-line label for a length-one monomial, if it detects one.
pub fn line_label(prime: Prime, op: Op) -> Option<&'static str> {
    match (prime.value(), op) {
        (2, Op::Sq(1)) => Some("h0"),
        (2, Op::Sq(2)) => Some("h1"),
        (2, Op::Sq(4)) => Some("h2"),
        (3, Op::Beta) => Some("a0"),
        (3, Op::P(1)) => Some("h0"),
        _ => None,
    }
}

/// Label of the element that builds strings: h0 at p = 2, a0 at p = 3.
pub fn string_label(prime: Prime) -> &'static str {
    if prime.is_two() {
        "h0"
    } else {
        "a0"
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartModule {
    pub n: Option<u32>,
    pub k: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartWindow {
    pub t_max: i32,
    pub s_max: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dot {
    pub s: u32,
    pub t: i32,
    pub id: String,
}

impl Dot {
    pub fn stem(&self) -> i32 {
        self.t - self.s as i32
    }
}

/// A structure line from a stage-s dot to a stage-(s+1) dot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Line {
    pub from: String,
    pub to: String,
    pub label: String,
    pub coeff: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtChart {
    pub prime: Prime,
    pub module: ChartModule,
    pub window: ChartWindow,
    pub dots: Vec<Dot>,
    pub lines: Vec<Line>,
    pub towers: Vec<i32>,
}

impl ExtChart {
    pub fn empty(prime: Prime, t_max: i32, s_max: u32) -> Self {
        ExtChart {
            prime,
            module: ChartModule { n: None, k: None },
            window: ChartWindow { t_max, s_max },
            dots: Vec::new(),
            lines: Vec::new(),
            towers: Vec::new(),
        }
    }

    /// Highest filtration visible in the given stem.
    pub fn s_top(&self, stem: i32) -> u32 {
        let by_t = self.window.t_max - stem;
        if by_t < 0 {
            0
        } else {
            (by_t as u32).min(self.window.s_max)
        }
    }

    pub fn dot(&self, id: &str) -> Option<&Dot> {
        self.dots.iter().find(|d| d.id == id)
    }

    /// Dots at `(stem, s)` in chart order.
    pub fn dots_at(&self, stem: i32, s: u32) -> Vec<&Dot> {
        self.dots.iter().filter(|d| d.s == s && d.stem() == stem).collect()
    }

    pub fn dots_in_stem(&self, stem: i32) -> Vec<&Dot> {
        self.dots.iter().filter(|d| d.stem() == stem).collect()
    }

    pub fn stems(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.dots.iter().map(|d| d.stem()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Matrix of multiplication by `label` from `(stem, s)` to
    /// `(stem + shift, s + 1)`; rows index target dots.
    pub fn line_matrix(&self, label: &str, stem: i32, s: u32, shift: i32) -> FpMatrix {
        let src = self.dots_at(stem, s);
        let dst = self.dots_at(stem + shift, s + 1);
        let mut m = FpMatrix::zero(self.prime, dst.len(), src.len());
        let si: HashMap<&str, usize> = src.iter().enumerate().map(|(i, d)| (d.id.as_str(), i)).collect();
        let di: HashMap<&str, usize> = dst.iter().enumerate().map(|(i, d)| (d.id.as_str(), i)).collect();
        for l in &self.lines {
            if l.label != label {
                continue;
            }
            if let (Some(&a), Some(&b)) = (si.get(l.from.as_str()), di.get(l.to.as_str())) {
                m.set(b, a, l.coeff);
            }
        }
        m
    }

    /// String decomposition of one stem under h0 (p = 2) or a0 (p = 3).
    pub fn decompose_stem(&self, stem: i32) -> Result<StemStrings> {
        let top = self.s_top(stem);
        let label = string_label(self.prime);
        let dims: Vec<usize> = (0..=top).map(|s| self.dots_at(stem, s).len()).collect();
        let maps: Vec<FpMatrix> = (0..top).map(|s| self.line_matrix(label, stem, s, 0)).collect();
        strings::decompose(self.prime, stem, &dims, &maps, top)
    }

    /// Removes dots and every line touching them.
    pub fn without_dots(&self, ids: &[String]) -> ExtChart {
        let mut c = self.clone();
        c.dots.retain(|d| !ids.contains(&d.id));
        c.lines.retain(|l| !ids.contains(&l.from) && !ids.contains(&l.to));
        c
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<ExtChart> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Reads dots and structure lines off a minimal resolution. Towers are the
/// strings that reach the top of the window with at least three dots; for
/// stunted projective modules they are checked against the rational rank
/// (one infinite cyclic summand per odd cell).
pub fn chart_of(res: &Resolution) -> Result<ExtChart> {
    res.verify_minimal()?;
    let p = res.prime;
    let mut chart = ExtChart {
        prime: p,
        module: ChartModule { n: res.module_n, k: res.module_k },
        window: ChartWindow { t_max: res.t_max, s_max: res.s_max },
        dots: Vec::new(),
        lines: Vec::new(),
        towers: Vec::new(),
    };
    for st in &res.stages {
        for g in &st.generators {
            chart.dots.push(Dot { s: g.s, t: g.t, id: g.id.clone() });
        }
    }
    for st in res.stages.iter().skip(1) {
        let below = &res.stages[st.s as usize - 1];
        for (g, d) in st.generators.iter().zip(&st.differentials) {
            for (gj, e) in d {
                for (m, c) in e.terms() {
                    if m.len() != 1 {
                        continue;
                    }
                    if let Some(label) = line_label(p, m.ops()[0]) {
                        chart.lines.push(Line {
                            from: below.generators[*gj].id.clone(),
                            to: g.id.clone(),
                            label: label.to_string(),
                            coeff: c,
                        });
                    }
                }
            }
        }
    }
    let mut towers = Vec::new();
    for stem in chart.stems() {
        if chart.decompose_stem(stem)?.tower_count() > 0 {
            towers.push(stem);
        }
    }
    chart.towers = towers;
    if res.module_descriptor.starts_with("stunted") {
        if let Some(n) = res.module_n {
            rational_rank_check(&chart, n)?;
        }
    }
    Ok(chart)
}

/// Stems `2n+1 ..= 2n+5` of Σ CP^∞_n carry exactly one tower when odd and
/// none when even.
pub fn rational_rank_check(chart: &ExtChart, n: u32) -> Result<()> {
    let lo = 2 * n as i32 + 1;
    for stem in lo..=lo + 4 {
        if stem > chart.window.t_max {
            break;
        }
        let count = chart.decompose_stem(stem)?.tower_count();
        let expected = if (stem - lo) % 2 == 0 { 1 } else { 0 };
        if count != expected {
            return Err(Error::WindowTooSmall(format!(
                "stem {stem} shows {count} towers where the rational rank requires {expected}; enlarge s_max"
            )));
        }
    }
    Ok(())
}

pub const DEFAULT_S_MAX: u32 = 12;

pub fn default_t_max(n: u32) -> i32 {
    2 * n as i32 + 15
}

/// Resolution and chart of Σ CP^∞_n in the default window.
pub fn stunted_chart(prime: Prime, n: u32) -> Result<(Arc<Resolution>, ExtChart)> {
    let t_max = default_t_max(n);
    let m = crate::module::stunted_infinite(prime, n, t_max)?;
    let res = Arc::new(resolve_minimal(&m, t_max, DEFAULT_S_MAX)?);
    let chart = chart_of(&res)?;
    Ok((res, chart))
}
