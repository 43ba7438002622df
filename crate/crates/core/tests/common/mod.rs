//! Independent oracles shared by the property suites and the acceptance
//! harness. None of them call the code path they check.

#![allow(dead_code)]

use std::collections::BTreeMap;

use metastable::adams::{AssembledGroup, GroupHom, Summand};
use metastable::ahss::{build_e2, Differential, PageDump};
use metastable::fp::FpMatrix;
use metastable::intlat::GroupType;
use metastable::module::ModulePresentation;
use metastable::resolution::Resolution;
use metastable::steenrod::{Monomial, Op, SteenrodAlgebra, SteenrodElement};
use metastable::{Error, Prime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------- F_p

/// Determinant mod p by cofactor expansion along the first row.
pub fn det_mod(p: i64, m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0].rem_euclid(p);
    }
    let mut total = 0;
    for j in 0..n {
        if m[0][j] % p == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, &x)| x).collect()).collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        total += sign * m[0][j] * det_mod(p, &minor);
    }
    total.rem_euclid(p)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Rank as the size of the largest minor with nonzero determinant.
pub fn rank_by_minors(p: u32, m: &FpMatrix) -> usize {
    let (r, c) = (m.rows(), m.cols());
    for k in (1..=r.min(c)).rev() {
        for rows in subsets(r, k) {
            for cols in subsets(c, k) {
                let sub: Vec<Vec<i64>> =
                    rows.iter().map(|&i| cols.iter().map(|&j| m.get(i, j) as i64).collect()).collect();
                if det_mod(p as i64, &sub) != 0 {
                    return k;
                }
            }
        }
    }
    0
}

pub fn random_matrix<R: Rng>(rng: &mut R, p: Prime, rows: usize, cols: usize) -> FpMatrix {
    let data: Vec<Vec<i64>> =
        (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..p.value() as i64)).collect()).collect();
    FpMatrix::from_rows(p, cols, &data).unwrap()
}

/// Matrix of the given rank at most, as a product of thin factors.
pub fn random_low_rank<R: Rng>(rng: &mut R, p: Prime, rows: usize, cols: usize, rank: usize) -> FpMatrix {
    let a = random_matrix(rng, p, rows, rank);
    let b = random_matrix(rng, p, rank, cols);
    a.mul(&b).unwrap()
}

pub fn check_linear_algebra(m: &FpMatrix) -> Result<(), String> {
    let p = m.prime();
    let (r1, piv) = m.rref();
    let (r2, piv2) = r1.rref();
    if r1 != r2 || piv != piv2 {
        return Err("rref is not idempotent".into());
    }
    if piv.windows(2).any(|w| w[0] >= w[1]) {
        return Err("pivots not strictly increasing".into());
    }
    let rank = m.rank();
    let ker = m.kernel_basis();
    if rank + ker.len() != m.cols() {
        return Err(format!("rank {rank} + nullity {} != {}", ker.len(), m.cols()));
    }
    for v in &ker {
        if m.apply(v).unwrap().iter().any(|&x| x != 0) {
            return Err("kernel vector not annihilated".into());
        }
    }
    let kmat = FpMatrix::from_columns(p, m.cols(), &ker);
    if kmat.rank() != ker.len() {
        return Err("kernel basis is dependent".into());
    }
    Ok(())
}

// ---------------------------------------------------------------- Steenrod

/// A polynomial over F_p in classes of several copies of BZ/p, keyed by a
/// monomial: for p = 2 the exponents of x_i (degree 1); for p = 3 a mask of
/// the exterior u_i (degree 1) followed by exponents of v_i (degree 2),
/// with the u's written in index order.
pub type Poly = BTreeMap<Vec<u32>, u32>;

fn binom_mod(n: u32, k: u32, p: u32) -> u32 {
    // Pascal's triangle, independent of the engine's Lucas code
    if k > n {
        return 0;
    }
    let mut row = vec![1u32];
    for _ in 0..n {
        let mut next = vec![1u32; row.len() + 1];
        for i in 1..row.len() {
            next[i] = (row[i - 1] + row[i]) % p;
        }
        row = next;
    }
    row[k as usize] % p
}

fn add(poly: &mut Poly, key: Vec<u32>, c: u32, p: u32) {
    let e = poly.entry(key.clone()).or_insert(0);
    *e = (*e + c) % p;
    if *e == 0 {
        poly.remove(&key);
    }
}

/// Distributes `total` over the exponents with weight `C(a_j, i_j)`;
/// `step` is how much the degree of one power class rises per unit.
fn distribute(exps: &[u32], total: u32, step: u32, p: u32) -> Vec<(Vec<u32>, u32)> {
    let mut out = vec![(Vec::new(), 1u32, 0u32)];
    for &a in exps {
        let mut next = Vec::new();
        for (prefix, c, used) in &out {
            for i in 0..=(total - used).min(a) {
                let b = binom_mod(a, i, p);
                if b == 0 {
                    continue;
                }
                let mut v = prefix.clone();
                v.push(a + step * i);
                next.push((v, c * b % p, used + i));
            }
        }
        out = next;
    }
    out.into_iter().filter(|(_, _, u)| *u == total).map(|(v, c, _)| (v, c)).collect()
}

fn act_letter(op: Op, poly: &Poly, p: u32, m: usize) -> Poly {
    let mut out = Poly::new();
    for (key, &c) in poly {
        match (p, op) {
            (2, Op::Sq(k)) => {
                // Sq^i x^a = C(a, i) x^{a+i}
                for (v, b) in distribute(key, k, 1, 2) {
                    add(&mut out, v, c * b, 2);
                }
            }
            (3, Op::P(k)) => {
                let (mask, vs) = key.split_at(m);
                for (v, b) in distribute(vs, k, 2, 3) {
                    let mut full = mask.to_vec();
                    full.extend(v);
                    add(&mut out, full, c * b, 3);
                }
            }
            (3, Op::Beta) => {
                // β is a derivation with β u_j = v_j; sign from the odd
                // classes passed over
                let mut seen = 0;
                for j in 0..m {
                    if key[j] == 1 {
                        let mut v = key.clone();
                        v[j] = 0;
                        v[m + j] += 1;
                        let sign = if seen % 2 == 0 { 1 } else { 2 };
                        add(&mut out, v, c * sign, 3);
                        seen += 1;
                    }
                }
            }
            _ => panic!("letter {op} does not exist at p = {p}"),
        }
    }
    out
}

/// Applies a word (rightmost letter first) to a polynomial.
pub fn act_word(word: &[Op], poly: &Poly, p: u32, m: usize) -> Poly {
    let mut cur = poly.clone();
    for &op in word.iter().rev() {
        cur = act_letter(op, &cur, p, m);
    }
    cur
}

pub fn act_element(e: &SteenrodElement, poly: &Poly, p: u32, m: usize) -> Poly {
    let mut out = Poly::new();
    for (mono, c) in e.terms() {
        for (k, v) in act_word(mono.ops(), poly, p, m) {
            add(&mut out, k, v * c as u32, p);
        }
    }
    out
}

/// Test class: x_1 ... x_m at p = 2, u_1 v_1 ... u_m v_m at p = 3.
pub fn test_class(p: u32, m: usize) -> Poly {
    let mut poly = Poly::new();
    if p == 2 {
        poly.insert(vec![1; m], 1);
    } else {
        let mut key = vec![1; m];
        key.extend(vec![1; m]);
        poly.insert(key, 1);
    }
    poly
}

/// Checks that a word and its engine normal form act identically.
pub fn check_adem_by_action(alg: &SteenrodAlgebra, word: &[Op]) -> Result<(), String> {
    let p = alg.prime().value();
    let deg: u32 = word.iter().map(|o| o.degree(alg.prime())).sum();
    let m = if p == 2 { deg.max(1) as usize } else { (deg as usize / 4 + 2).min(4) };
    let class = test_class(p, m);
    let nf = alg.adem_normalize(word);
    for t in nf.terms() {
        if !t.0.is_admissible(alg.prime()) {
            return Err(format!("normal form of {word:?} has inadmissible term {}", t.0));
        }
    }
    let lhs = act_word(word, &class, p, m);
    let rhs = act_element(&nf, &class, p, m);
    if lhs != rhs {
        return Err(format!("{:?} and its normal form {nf} act differently", word));
    }
    Ok(())
}

pub fn random_word<R: Rng>(rng: &mut R, p: Prime, len: usize, max_letter: u32) -> Vec<Op> {
    (0..len)
        .map(|_| {
            if p.is_two() {
                Op::Sq(rng.gen_range(1..=max_letter))
            } else if rng.gen_bool(0.4) {
                Op::Beta
            } else {
                Op::P(rng.gen_range(1..=max_letter))
            }
        })
        .collect()
}

pub fn random_admissible<R: Rng>(rng: &mut R, alg: &SteenrodAlgebra, max_degree: u32) -> Monomial {
    loop {
        let d = rng.gen_range(0..=max_degree);
        let basis = alg.admissible_basis(d).unwrap();
        if !basis.is_empty() {
            return basis[rng.gen_range(0..basis.len())].clone();
        }
    }
}

/// `(ab)c == a(bc)` and both strategies agree on `abc`.
pub fn check_associativity(alg: &SteenrodAlgebra, a: &Monomial, b: &Monomial, c: &Monomial) -> Result<(), String> {
    let p = alg.prime();
    let ea = SteenrodElement::from_monomial(p, a.clone(), 1);
    let eb = SteenrodElement::from_monomial(p, b.clone(), 1);
    let ec = SteenrodElement::from_monomial(p, c.clone(), 1);
    let left = alg.multiply(&alg.multiply(&ea, &eb).unwrap(), &ec).unwrap();
    let right = alg.multiply(&ea, &alg.multiply(&eb, &ec).unwrap()).unwrap();
    if left != right {
        return Err(format!("({a})({b})({c}): {left} vs {right}"));
    }
    Ok(())
}

// ---------------------------------------------------------------- resolutions

fn free_basis(alg: &SteenrodAlgebra, gens: &[(usize, i32)], t: i32) -> Vec<(usize, Monomial)> {
    let mut out = Vec::new();
    for &(gi, gt) in gens {
        if gt <= t {
            for m in alg.admissible_basis((t - gt) as u32).unwrap().iter() {
                out.push((gi, m.clone()));
            }
        }
    }
    out
}

/// Rebuilds every map of the resolution in each degree from the stored
/// differentials and checks surjectivity onto the module, exactness at
/// every interior stage, d∘d = 0, and minimality.
pub fn check_resolution(res: &Resolution, module: &ModulePresentation) -> Result<(), String> {
    let p = res.prime;
    let alg = SteenrodAlgebra::shared(p);
    for st in &res.stages {
        for (g, d) in st.generators.iter().zip(&st.differentials) {
            if d.iter().any(|(_, e)| e.coefficient(&Monomial::unit()) != 0) {
                return Err(format!("{} has a unit coefficient", g.id));
            }
        }
    }
    let Some(bottom) = module.bottom_degree() else {
        return if res.is_empty() { Ok(()) } else { Err("generators for an empty module".into()) };
    };
    for t in bottom..=res.t_max {
        let mbasis = module.basis_in_degree(t);
        let mpos: BTreeMap<usize, usize> = mbasis.iter().enumerate().map(|(i, &j)| (j, i)).collect();
        let mut bases = Vec::new();
        for st in &res.stages {
            let gens: Vec<(usize, i32)> = st.generators.iter().enumerate().map(|(i, g)| (i, g.t)).collect();
            bases.push(free_basis(alg, &gens, t));
        }
        // maps[s]: F_s -> F_{s-1} (s >= 1), maps[0]: F_0 -> M
        let mut maps: Vec<FpMatrix> = Vec::new();
        for (s, st) in res.stages.iter().enumerate() {
            let rows = if s == 0 { mbasis.len() } else { bases[s - 1].len() };
            let mut cols = Vec::new();
            for (gi, theta) in &bases[s] {
                let mut v = vec![0u8; rows];
                if s == 0 {
                    for &(b, c) in &st.augmentation[*gi] {
                        for (j, d) in module.act_monomial(theta, b) {
                            let i = mpos[&j];
                            v[i] = ((v[i] as u32 + c as u32 * d as u32) % p.value()) as u8;
                        }
                    }
                } else {
                    let index: BTreeMap<(usize, Monomial), usize> =
                        bases[s - 1].iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
                    let th = SteenrodElement::from_monomial(p, theta.clone(), 1);
                    for (gj, a) in &st.differentials[*gi] {
                        let prod = alg.multiply(&th, a).map_err(|e| e.to_string())?;
                        for (mu, c) in prod.terms() {
                            let i = *index.get(&(*gj, mu.clone())).ok_or("product outside the window")?;
                            v[i] = ((v[i] as u32 + c as u32) % p.value()) as u8;
                        }
                    }
                }
                cols.push(v);
            }
            maps.push(FpMatrix::from_columns(p, rows, &cols));
        }
        if maps[0].rank() != mbasis.len() {
            return Err(format!("augmentation not onto in degree {t}"));
        }
        for s in 0..maps.len() - 1 {
            let kernel = bases[s].len() - maps[s].rank();
            if maps[s + 1].rank() != kernel {
                return Err(format!("not exact at stage {s}, degree {t}"));
            }
            let comp = maps[s].mul(&maps[s + 1]).unwrap();
            if comp.rank() != 0 {
                return Err(format!("d∘d != 0 at stage {}, degree {t}", s + 1));
            }
        }
    }
    Ok(())
}

/// Number of cells of H*(Σ CP^{n+k}_n) not hit by any Sq^{2i} / P^i from
/// a lower cell, which is the number of stage-0 generators.
pub fn indecomposable_count(p: Prime, n: u32, k: u32, t_max: i32) -> usize {
    let pv = p.value();
    let step = if p.is_two() { 1 } else { 2 };
    (n..=n + k)
        .filter(|&m| 2 * m as i32 + 1 <= t_max)
        .filter(|&m| {
            !(n..m).any(|m0| (m - m0) % step == 0 && binom_mod(m0, (m - m0) / step, pv) != 0)
        })
        .count()
}

// ---------------------------------------------------------------- AHSS

pub fn summand(exponent: Option<u32>) -> Summand {
    Summand { exponent, bottom: 0, filtrations: vec![0], dots: vec![Vec::new()], string_index: 0 }
}

pub fn random_group<R: Rng>(rng: &mut R, p: Prime, stem: i32) -> AssembledGroup {
    let n = rng.gen_range(0..=3);
    let summands = (0..n)
        .map(|_| summand(if rng.gen_bool(0.3) { None } else { Some(rng.gen_range(1..=3)) }))
        .collect();
    AssembledGroup { prime: p, stem, summands }
}

/// A random homomorphism between cyclic sums, well defined on relations.
pub fn random_hom_matrix<R: Rng>(rng: &mut R, src: &AssembledGroup, tgt: &AssembledGroup) -> Vec<Vec<i64>> {
    let p = src.prime;
    tgt.summands
        .iter()
        .map(|t| {
            src.summands
                .iter()
                .map(|s| {
                    let (so, to) = (s.order(p) as i64, t.order(p) as i64);
                    let unit = match (so, to) {
                        (_, 0) if so != 0 => return 0,
                        (0, _) | (_, 0) => 1,
                        _ => to / gcd(so, to),
                    };
                    unit * rng.gen_range(0..4)
                })
                .collect()
        })
        .collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Rank additivity and, for finite groups, order multiplicativity across
/// one differential; neither side may grow.
pub fn check_differential(d: &Differential) -> Result<(), String> {
    let img = &d.image;
    if d.source_before.rank != d.source_after.rank + img.rank || d.target_before.rank != d.target_after.rank + img.rank {
        return Err(format!("rank bookkeeping fails for d{} from {}", d.page, d.source));
    }
    if d.source_before.rank == 0 && d.source_before.torsion_order() != d.source_after.torsion_order() * img.torsion_order() {
        return Err(format!("source order bookkeeping fails for d{} from {}", d.page, d.source));
    }
    if d.target_before.rank == 0 && d.target_before.torsion_order() != d.target_after.torsion_order() * img.torsion_order() {
        return Err(format!("target order bookkeeping fails for d{} from {}", d.page, d.source));
    }
    Ok(())
}

fn not_larger(after: &GroupType, before: &GroupType) -> bool {
    after.rank < before.rank || (after.rank == before.rank && after.torsion_order() <= before.torsion_order())
}

/// Every cell is no larger on a later page.
pub fn check_monotone(pages: &[PageDump]) -> Result<(), String> {
    for w in pages.windows(2) {
        let before: BTreeMap<(u32, i32), &GroupType> = w[0].cells.iter().map(|c| ((c.column, c.row), &c.group)).collect();
        for c in &w[1].cells {
            let b = before[&(c.column, c.row)];
            if !not_larger(&c.group, b) {
                return Err(format!("cell ({},{}) grew from {b} to {} on page {}", c.column, c.row, c.group, w[1].page));
            }
        }
    }
    Ok(())
}

/// A random page: random groups per row, random well-defined d2 maps,
/// then a random d4 into the corner.
pub fn random_ahss_run(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = if rng.gen_bool(0.5) { Prime::TWO } else { Prime::THREE };
    let l = rng.gen_range(3..=9u32);
    let r = l - rng.gen_range(1..=2u32.min(l / 2));
    let groups: BTreeMap<i32, AssembledGroup> =
        (2 * r as i32 + 1..=2 * l as i32).map(|b| (b, random_group(&mut rng, p, b))).collect();
    let mut page = build_e2(l, r, p, &groups).map_err(|e| e.to_string())?;
    let mut e2 = page.dump();
    e2.differentials.clear();
    let mut eta = BTreeMap::new();
    for b in 2 * r as i32 + 1..2 * l as i32 {
        let (s, t) = (&groups[&b], &groups[&(b + 1)]);
        let matrix = random_hom_matrix(&mut rng, s, t);
        eta.insert(b, GroupHom { source: s.clone(), target: t.clone(), matrix });
    }
    page.apply_d2(&eta).map_err(|e| e.to_string())?;
    let e3 = page.dump();
    page.skip_d3().map_err(|e| e.to_string())?;
    if r + 2 == l {
        let b = 2 * l as i32 - 3;
        let (s, t) = (&groups[&b], &groups[&(2 * l as i32)]);
        let matrix = random_hom_matrix(&mut rng, s, t);
        let nu = GroupHom { source: s.clone(), target: t.clone(), matrix };
        match page.apply_d4(rng.gen_range(0..3), &nu) {
            Ok(_) => {}
            // the random map need not respect the page-4 boundaries
            Err(Error::Contract(_)) => return Ok(()),
            Err(e) => return Err(e.to_string()),
        }
    }
    let e5 = page.dump();
    for d in &page.differentials {
        check_differential(d)?;
        if d.page == 2 && d.is_nonzero() && (d.source.column / 2) % 2 == 0 {
            return Err(format!("d2 out of an even column at {}", d.source));
        }
    }
    check_monotone(&[e2, e3, e5])
}
