//! The Atiyah-Hirzebruch spectral sequence for stable maps from CP^l into
//! Σ CP^∞_r, localized at one prime.
//!
//! Cell `(2a, -b)` starts as π_b(Σ CP^∞_r) for `1 <= a <= l` and
//! `2r+1 <= b <= 2l`. Each cell is tracked as a subquotient `Z / B` of the
//! free abelian group on its E2 summand generators, so kernels and images
//! of later differentials are taken on the right subquotient. The letter
//! used for the column elsewhere doubles as the prime; here they are
//! `column` and `prime`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::adams::{self, AssembledGroup, GroupHom, HopfElement};
use crate::error::{Error, Result};
use crate::intlat::{integer_kernel, quotient_type, GroupType, IVec, Lattice};
use crate::prime::Prime;
use crate::reference;

/// Class of the attaching map S^{2l} -> S^{2l-3} in CP^l / CP^{l-3} as a
/// multiple of ν, by l mod 8 (Mosher).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MosherTable {
    pub source: String,
    pub coefficients: [u8; 8],
}

impl MosherTable {
    pub fn embedded() -> Self {
        let d = &reference::tables().mosher;
        let mut coefficients = [0u8; 8];
        coefficients.copy_from_slice(&d.coefficients);
        MosherTable { source: d.source.clone(), coefficients }
    }

    pub fn coefficient(&self, l: u32) -> u8 {
        self.coefficients[(l % 8) as usize]
    }
}

/// Multiple of the ν-map (α1 at p = 3) giving d4 into the corner cell.
pub fn d4_coefficient(prime: Prime, l: u32, mosher: &MosherTable) -> i64 {
    if prime.is_two() {
        mosher.coefficient(l) as i64
    } else {
        // P1 on x^{l-2} is C(l-2, 1) x^{l}
        prime.binomial(l as i64 - 2, 1) as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position {
    pub column: u32,
    pub row: i32,
}

impl Position {
    pub fn new(column: u32, row: i32) -> Self {
        Position { column, row }
    }

    /// Total degree `column + row`; the diagonal is degree zero.
    pub fn degree(&self) -> i32 {
        self.column as i32 + self.row
    }

    /// Where `d_r` from here lands.
    pub fn target(&self, r: u32) -> Position {
        Position { column: self.column + r, row: self.row - r as i32 + 1 }
    }
}

impl std::fmt::Display for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.column, self.row)
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub e2: AssembledGroup,
    /// Orders of the ambient generators, 0 for infinite.
    pub orders: Vec<u64>,
    pub cycles: Lattice,
    pub boundaries: Lattice,
    pub group: GroupType,
}

impl Cell {
    fn new(e2: &AssembledGroup) -> Result<Cell> {
        let orders = e2.cyclic_orders();
        let m = orders.len();
        let rel: Vec<IVec> = orders
            .iter()
            .enumerate()
            .map(|(i, &o)| {
                let mut v = vec![0; m];
                v[i] = o as i128;
                v
            })
            .collect();
        let cycles = Lattice::full(m);
        let boundaries = Lattice::from_generators(m, &rel);
        let group = quotient_type(&cycles, &boundaries)?;
        Ok(Cell { e2: e2.clone(), orders, cycles, boundaries, group })
    }

    pub fn dim(&self) -> usize {
        self.orders.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Differential {
    pub page: u32,
    pub source: Position,
    pub target: Position,
    /// What the map is built from, e.g. "eta" or "2 nu".
    pub label: String,
    /// Rows: target generators; columns: source generators.
    pub matrix: Vec<Vec<i64>>,
    pub image: GroupType,
    pub source_before: GroupType,
    pub target_before: GroupType,
    pub source_after: GroupType,
    pub target_after: GroupType,
}

impl Differential {
    pub fn is_nonzero(&self) -> bool {
        !self.image.is_trivial()
    }
}

#[derive(Clone, Debug)]
pub struct AhssPage {
    pub prime: Prime,
    pub l: u32,
    pub r: u32,
    pub page: u32,
    pub cells: BTreeMap<Position, Cell>,
    pub differentials: Vec<Differential>,
}

/// Serializable view of a page.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageDump {
    pub prime: Prime,
    pub l: u32,
    pub r: u32,
    pub page: u32,
    pub cells: Vec<CellDump>,
    pub differentials: Vec<Differential>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDump {
    pub column: u32,
    pub row: i32,
    pub e2: String,
    pub group: GroupType,
}

/// Checks `l/2 <= r <= l-1`.
pub fn check_metastable(l: u32, r: u32) -> Result<()> {
    if r < 1 {
        return Err(Error::Range(format!("r = {r} must be at least 1")));
    }
    if 2 * r < l {
        return Err(Error::Range(format!("l/2 <= r fails: l = {l}, r = {r}")));
    }
    if r + 1 > l {
        return Err(Error::Range(format!("r <= l-1 fails: l = {l}, r = {r}")));
    }
    Ok(())
}

/// E2 page from the stable groups in stems `2r+1 ..= 2l`.
pub fn build_e2(l: u32, r: u32, prime: Prime, groups: &BTreeMap<i32, AssembledGroup>) -> Result<AhssPage> {
    check_metastable(l, r)?;
    let mut cells = BTreeMap::new();
    for b in (2 * r + 1)..=(2 * l) {
        let g = groups
            .get(&(b as i32))
            .ok_or_else(|| Error::Config(format!("no stable group supplied for stem {b}")))?;
        if g.prime != prime {
            return Err(Error::Contract(format!("group in stem {b} is {}-local, expected {prime}", g.prime)));
        }
        let cell = Cell::new(g)?;
        for a in 1..=l {
            cells.insert(Position::new(2 * a, -(b as i32)), cell.clone());
        }
    }
    Ok(AhssPage { prime, l, r, page: 2, cells, differentials: Vec::new() })
}

fn apply_matrix(matrix: &[Vec<i64>], v: &[i128]) -> IVec {
    matrix.iter().map(|row| row.iter().zip(v).map(|(&a, &x)| a as i128 * x).sum()).collect()
}

impl AhssPage {
    pub fn cell(&self, pos: Position) -> Option<&Cell> {
        self.cells.get(&pos)
    }

    /// Current group at `pos`, trivial outside the grid.
    pub fn group(&self, pos: Position) -> GroupType {
        self.cells.get(&pos).map_or_else(GroupType::trivial, |c| c.group.clone())
    }

    pub fn rows(&self) -> Vec<i32> {
        ((2 * self.r + 1)..=(2 * self.l)).map(|b| -(b as i32)).collect()
    }

    pub fn columns(&self) -> Vec<u32> {
        (1..=self.l).map(|a| 2 * a).collect()
    }

    /// Applies `d_page` from `source` given by `matrix` on E2 generators.
    /// The map must carry cycles to cycles and boundaries to boundaries.
    pub fn apply_differential(&mut self, source: Position, matrix: &[Vec<i64>], label: &str) -> Result<Differential> {
        let target = source.target(self.page);
        let (Some(a), Some(b)) = (self.cells.get(&source), self.cells.get(&target)) else {
            return Err(Error::Contract(format!("d{} from {source} to {target} leaves the grid", self.page)));
        };
        if matrix.len() != b.dim() || matrix.iter().any(|r| r.len() != a.dim()) {
            return Err(Error::Contract(format!("d{} from {source}: matrix shape does not match the cells", self.page)));
        }
        let mb = b.dim();
        for v in &a.boundaries.basis {
            if !b.boundaries.contains(&apply_matrix(matrix, v)) {
                return Err(Error::Contract(format!(
                    "d{} from {source}: a boundary does not map to a boundary",
                    self.page
                )));
            }
        }
        let images: Vec<IVec> = a.cycles.basis.iter().map(|v| apply_matrix(matrix, v)).collect();
        for w in &images {
            if !b.cycles.contains(w) {
                return Err(Error::Contract(format!("d{} from {source}: a cycle maps outside the cycles", self.page)));
            }
        }
        // new cycles: z in Z_A with F z in B_B
        let mut cols = images.clone();
        cols.extend(b.boundaries.basis.iter().map(|v| v.iter().map(|x| -x).collect::<IVec>()));
        let kernel = integer_kernel(mb, &cols);
        let k = a.cycles.rank();
        let ma = a.dim();
        let gens: Vec<IVec> = kernel
            .iter()
            .map(|y| {
                let mut z = vec![0i128; ma];
                for (j, &c) in y[..k].iter().enumerate() {
                    for i in 0..ma {
                        z[i] += c * a.cycles.basis[j][i];
                    }
                }
                z
            })
            .collect();
        let new_cycles = Lattice::from_generators(ma, &gens);
        let new_boundaries = b.boundaries.sum(&Lattice::from_generators(mb, &images));

        let image_from_source = quotient_type(&a.cycles, &new_cycles)?;
        let image_from_target = quotient_type(&new_boundaries, &b.boundaries)?;
        if image_from_source != image_from_target {
            return Err(Error::Verification(format!(
                "d{} from {source}: image is {image_from_source} seen from the source but {image_from_target} from the target",
                self.page
            )));
        }
        let source_after = quotient_type(&new_cycles, &a.boundaries)?;
        let target_after = quotient_type(&b.cycles, &new_boundaries)?;
        for (before, after, pos) in [(&a.group, &source_after, source), (&b.group, &target_after, target)] {
            let grew = after.rank > before.rank
                || (after.rank == before.rank && after.torsion_order() > before.torsion_order());
            if grew {
                return Err(Error::Verification(format!(
                    "page {}: cell {pos} grew from {before} to {after}",
                    self.page
                )));
            }
        }
        let d = Differential {
            page: self.page,
            source,
            target,
            label: label.to_string(),
            matrix: matrix.to_vec(),
            image: image_from_source,
            source_before: a.group.clone(),
            target_before: b.group.clone(),
            source_after: source_after.clone(),
            target_after: target_after.clone(),
        };
        let a = self.cells.get_mut(&source).unwrap();
        a.cycles = new_cycles;
        a.group = source_after;
        let b = self.cells.get_mut(&target).unwrap();
        b.boundaries = new_boundaries;
        b.group = target_after;
        self.differentials.push(d.clone());
        Ok(d)
    }

    /// d2: η-multiplication out of columns 2a with a odd, zero out of the
    /// others. `eta` maps a source stem b to η: π_b -> π_{b+1}.
    pub fn apply_d2(&mut self, eta: &BTreeMap<i32, GroupHom>) -> Result<()> {
        if self.page != 2 {
            return Err(Error::Contract(format!("d2 applied on page {}", self.page)));
        }
        let sources: Vec<Position> = self
            .cells
            .keys()
            .copied()
            .filter(|p| (p.column / 2) % 2 == 1 && self.cells.contains_key(&p.target(2)))
            .collect();
        for pos in sources {
            let b = -pos.row;
            let h = eta
                .get(&b)
                .ok_or_else(|| Error::Config(format!("no eta map supplied out of stem {b}")))?;
            self.apply_differential(pos, &h.matrix, "eta")?;
        }
        self.page = 3;
        Ok(())
    }

    /// Steps over odd pages: with every cell in an even column, d3 has no
    /// target.
    pub fn skip_d3(&mut self) -> Result<()> {
        if self.page != 3 {
            return Err(Error::Contract(format!("d3 skipped on page {}", self.page)));
        }
        if self.cells.keys().any(|p| p.column % 2 == 1) {
            return Err(Error::Contract("odd column in the grid".into()));
        }
        self.page = 4;
        Ok(())
    }

    /// d4 from `(2l-4, -(2l-3))` into the corner `(2l, -2l)`, equal to
    /// `coefficient` times `nu`. Absent when either cell is off the grid.
    pub fn apply_d4(&mut self, coefficient: i64, nu: &GroupHom) -> Result<Option<Differential>> {
        if self.page != 4 {
            return Err(Error::Contract(format!("d4 applied on page {}", self.page)));
        }
        let l = self.l as i32;
        let out = if l >= 3 {
            let source = Position::new(2 * self.l - 4, -(2 * l - 3));
            if self.cells.contains_key(&source) && self.cells.contains_key(&source.target(4)) {
                let m = nu.scaled(coefficient);
                let label = match (self.prime.is_two(), coefficient) {
                    (true, 1) => "nu".to_string(),
                    (true, c) => format!("{c} nu"),
                    (false, 1) => "alpha1".to_string(),
                    (false, c) => format!("{c} alpha1"),
                };
                Some(self.apply_differential(source, &m.matrix, &label)?)
            } else {
                None
            }
        } else {
            None
        };
        self.page = 5;
        Ok(out)
    }

    /// Positions `(2a, -2a)` on the degree-zero diagonal inside the grid.
    pub fn diagonal(&self) -> Vec<Position> {
        self.cells.keys().copied().filter(|p| p.degree() == 0).collect()
    }

    /// Fails if any d_r not applied by this engine could still connect a
    /// nonzero diagonal cell with another nonzero cell.
    pub fn check_unmodeled(&self) -> Result<()> {
        let modeled = |r: u32, s: Position| {
            r == 2 || self.differentials.iter().any(|d| d.page == r && d.source == s)
        };
        let top = 2 * self.l + 1;
        for d in self.diagonal() {
            if self.group(d).is_trivial() {
                continue;
            }
            for r in 2..=top {
                let out = d.target(r);
                if !self.group(out).is_trivial() && !modeled(r, d) {
                    return Err(Error::Inconsistent(format!("unmodeled d{r} from {d} to {out}")));
                }
                if d.column > r {
                    let src = Position::new(d.column - r, d.row + r as i32 - 1);
                    if !self.group(src).is_trivial() && !modeled(r, src) {
                        return Err(Error::Inconsistent(format!("unmodeled d{r} from {src} to {d}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn diagonal_order(&self) -> DiagonalOrder {
        let survivors: Vec<(Position, GroupType)> = self
            .diagonal()
            .into_iter()
            .map(|p| (p, self.group(p)))
            .filter(|(_, g)| !g.is_trivial())
            .collect();
        let order = survivors.iter().try_fold(1u64, |acc, (_, g)| g.order().map(|o| acc * o));
        DiagonalOrder {
            prime: self.prime,
            order,
            ambiguous: survivors.len() > 1,
            survivors: survivors.into_iter().map(|(position, group)| DiagonalCell { position, group }).collect(),
        }
    }

    pub fn dump(&self) -> PageDump {
        PageDump {
            prime: self.prime,
            l: self.l,
            r: self.r,
            page: self.page,
            cells: self
                .cells
                .iter()
                .map(|(p, c)| CellDump { column: p.column, row: p.row, e2: c.e2.to_string(), group: c.group.clone() })
                .collect(),
            differentials: self.differentials.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalCell {
    pub position: Position,
    pub group: GroupType,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalOrder {
    pub prime: Prime,
    /// `None` when a surviving cell is infinite.
    pub order: Option<u64>,
    /// More than one nonzero cell survives, so the extension is open.
    pub ambiguous: bool,
    pub survivors: Vec<DiagonalCell>,
}

/// A complete run: the E2, E3 and E5 = E∞ pages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AhssRun {
    pub prime: Prime,
    pub l: u32,
    pub r: u32,
    pub pages: Vec<PageDump>,
    pub diagonal: DiagonalOrder,
}

/// Runs the spectral sequence for `{CP^l, Σ CP^∞_r}` at `prime`. The
/// stable groups are known through stem 2r+4, which limits `r` to `l-2`
/// and `l-1`.
pub fn run(l: u32, r: u32, prime: Prime) -> Result<AhssRun> {
    check_metastable(l, r)?;
    if 2 * l > 2 * r + 4 {
        return Err(Error::Range(format!(
            "stems up to 2l = {} are needed but only 2r+4 = {} are computed; use r = l-1 or l-2",
            2 * l,
            2 * r + 4
        )));
    }
    let sg = adams::stable_groups(prime, r)?;
    let mut page = build_e2(l, r, prime, &sg.groups)?;
    let mut pages = vec![page.dump()];

    let mut eta = BTreeMap::new();
    for b in (2 * r + 1)..(2 * l) {
        eta.insert(b as i32, sg.multiplication(HopfElement::Eta, b as i32)?);
    }
    page.apply_d2(&eta)?;
    pages.push(page.dump());
    page.skip_d3()?;

    if l >= 3 && 2 * l - 3 > 2 * r {
        let nu = sg.multiplication(HopfElement::Nu, 2 * l as i32 - 3)?;
        let c = d4_coefficient(prime, l, &MosherTable::embedded());
        page.apply_d4(c, &nu)?;
    } else {
        page.page = 5;
    }
    page.check_unmodeled()?;
    pages.push(page.dump());
    // each dump keeps only the differentials leading to it
    for i in (1..pages.len()).rev() {
        let since = pages[i - 1].page;
        pages[i].differentials.retain(|d| d.page >= since);
    }
    let diagonal = page.diagonal_order();
    Ok(AhssRun { prime, l, r, pages, diagonal })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(rank: usize, torsion: &[u64]) -> GroupType {
        GroupType { rank, torsion: torsion.to_vec() }
    }

    #[test]
    fn e2_rows_for_l4_r2() {
        let sg = adams::stable_groups(Prime::TWO, 2).unwrap();
        let page = build_e2(4, 2, Prime::TWO, &sg.groups).unwrap();
        assert_eq!(page.rows(), vec![-5, -6, -7, -8]);
        for c in [2, 4, 6, 8] {
            assert_eq!(page.group(Position::new(c, -5)), t(1, &[]));
            assert_eq!(page.group(Position::new(c, -6)), t(0, &[2]));
            assert_eq!(page.group(Position::new(c, -7)), t(1, &[2]));
            assert_eq!(page.group(Position::new(c, -8)), t(0, &[2]));
        }
        assert!(page.cell(Position::new(10, -5)).is_none());
    }

    #[test]
    fn e2_range_errors() {
        let sg = adams::stable_groups(Prime::TWO, 2).unwrap();
        assert!(matches!(build_e2(3, 3, Prime::TWO, &sg.groups), Err(Error::Range(_))));
        let e = build_e2(5, 2, Prime::TWO, &sg.groups).unwrap_err();
        assert!(e.to_string().contains("l/2 <= r"));
        assert!(matches!(build_e2(4, 2, Prime::THREE, &sg.groups), Err(Error::Contract(_))));
        assert!(matches!(run(8, 4, Prime::TWO), Err(Error::Range(_))));
    }

    #[test]
    fn worked_examples() {
        let r3 = run(3, 2, Prime::TWO).unwrap();
        assert_eq!(r3.pages[0].cells.iter().map(|c| c.row).max(), Some(-5));
        assert_eq!(r3.pages[0].cells.iter().map(|c| c.row).min(), Some(-6));
        assert_eq!(r3.diagonal.order, Some(2));
        let r4 = run(4, 2, Prime::TWO).unwrap();
        assert_eq!(r4.diagonal.order, Some(1));
        assert!(!r4.diagonal.ambiguous);
    }

    #[test]
    fn l4_d2_pattern() {
        let run = run(4, 2, Prime::TWO).unwrap();
        let d2: Vec<&Differential> = run.pages[1].differentials.iter().filter(|d| d.is_nonzero()).collect();
        // all sources in columns 2a with a odd
        assert!(d2.iter().all(|d| (d.source.column / 2) % 2 == 1));
        // ℤ/2 at (6,-6) maps onto the ℤ/2 summand of (8,-7)
        let a = d2.iter().find(|d| d.source == Position::new(6, -6)).unwrap();
        assert_eq!(a.image, t(0, &[2]));
        assert_eq!(a.target_after, t(1, &[]));
        // (6,-7) surjects onto (8,-8) through its free summand
        let b = d2.iter().find(|d| d.source == Position::new(6, -7)).unwrap();
        assert_eq!(b.matrix, vec![vec![1, 0]]);
        assert_eq!(b.target_after, GroupType::trivial());
    }

    #[test]
    fn rank_l_minus_1_diagonal() {
        for l in 3..=12 {
            let run2 = run(l, l - 1, Prime::TWO).unwrap();
            assert_eq!(run2.diagonal.order, Some(if l % 2 == 1 { 2 } else { 1 }), "l = {l}");
            let run3 = run(l, l - 1, Prime::THREE).unwrap();
            assert_eq!(run3.diagonal.order, Some(1));
        }
    }

    #[test]
    fn d4_cases() {
        // l ≡ 2 mod 8: coefficient zero, ℤ/4 survives
        let r = run(10, 8, Prime::TWO).unwrap();
        assert_eq!(d4_coefficient(Prime::TWO, 10, &MosherTable::embedded()), 0);
        assert_eq!(r.diagonal.order, Some(4));
        // l ≡ 3 mod 8: 2ν hits an index-2 subgroup of ℤ/4
        let r = run(11, 9, Prime::TWO).unwrap();
        let d4 = r.pages[2].differentials.iter().find(|d| d.page == 4).unwrap();
        assert_eq!(d4.label, "2 nu");
        assert_eq!(d4.target_before, t(0, &[4]));
        assert_eq!(d4.target_after, t(0, &[2]));
        assert_eq!(r.diagonal.order, Some(2));
        // p = 3, l ≡ 2 mod 3: zero coefficient, ℤ/3 survives
        assert_eq!(d4_coefficient(Prime::THREE, 8, &MosherTable::embedded()), 0);
        assert_eq!(run(8, 6, Prime::THREE).unwrap().diagonal.order, Some(3));
        assert_eq!(run(7, 5, Prime::THREE).unwrap().diagonal.order, Some(1));
    }

    #[test]
    fn no_d2_at_three() {
        let r = run(7, 5, Prime::THREE).unwrap();
        assert!(r.pages[1].differentials.iter().all(|d| !d.is_nonzero()));
    }

    #[test]
    fn dump_round_trip() {
        let r = run(5, 4, Prime::TWO).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: AhssRun = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
