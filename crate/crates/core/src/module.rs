//! Finite graded modules over the Steenrod algebra, in particular the
//! cohomology of suspended stunted complex projective spaces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prime::Prime;
use crate::reference;
use crate::steenrod::{Monomial, Op, SteenrodAlgebra, SteenrodElement};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleGenerator {
    pub name: String,
    pub degree: i32,
}

/// What a presentation was built from; part of cache keys.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleMeta {
    pub kind: String,
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub shift: i32,
}

/// A sparse vector over the module basis: `(basis index, coefficient)`.
pub type SparseVec = Vec<(usize, u8)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulePresentation {
    pub prime: Prime,
    pub generators: Vec<ModuleGenerator>,
    /// Action of single letters on basis elements; absent entries are zero.
    pub actions: BTreeMap<(Op, usize), SparseVec>,
    pub meta: ModuleMeta,
    /// Degree cutoff; classes above it were discarded.
    pub t_max: Option<i32>,
}

impl ModulePresentation {
    pub fn empty(prime: Prime) -> Self {
        ModulePresentation {
            prime,
            generators: Vec::new(),
            actions: BTreeMap::new(),
            meta: ModuleMeta { kind: "empty".into(), n: None, k: None, shift: 0 },
            t_max: None,
        }
    }

    /// F_p in degree 0, the cohomology of the sphere spectrum.
    pub fn sphere(prime: Prime) -> Self {
        ModulePresentation {
            prime,
            generators: vec![ModuleGenerator { name: "1".into(), degree: 0 }],
            actions: BTreeMap::new(),
            meta: ModuleMeta { kind: "sphere".into(), n: None, k: None, shift: 0 },
            t_max: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn bottom_degree(&self) -> Option<i32> {
        self.generators.iter().map(|g| g.degree).min()
    }

    pub fn top_degree(&self) -> Option<i32> {
        self.generators.iter().map(|g| g.degree).max()
    }

    /// Basis indices in the given degree, in basis order.
    pub fn basis_in_degree(&self, t: i32) -> Vec<usize> {
        (0..self.generators.len()).filter(|&i| self.generators[i].degree == t).collect()
    }

    pub fn index_of(&self, degree: i32) -> Option<usize> {
        self.generators.iter().position(|g| g.degree == degree)
    }

    /// Short descriptor used in cache keys and chart metadata.
    pub fn descriptor(&self) -> String {
        format!(
            "{}:n={}:k={}:shift={}:tmax={}",
            self.meta.kind,
            self.meta.n.map_or("-".into(), |v| v.to_string()),
            self.meta.k.map_or("-".into(), |v| v.to_string()),
            self.meta.shift,
            self.t_max.map_or("-".into(), |v| v.to_string()),
        )
    }

    pub fn act_letter(&self, op: Op, v: &[(usize, u8)]) -> SparseVec {
        let p = self.prime.value();
        let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
        for &(i, c) in v {
            if let Some(img) = self.actions.get(&(op, i)) {
                for &(j, d) in img {
                    *acc.entry(j).or_insert(0) += c as u32 * d as u32;
                }
            }
        }
        acc.into_iter().filter_map(|(j, c)| (c % p != 0).then_some((j, (c % p) as u8))).collect()
    }

    /// Applies an admissible monomial letter by letter, rightmost first.
    pub fn act_monomial(&self, m: &Monomial, basis_index: usize) -> SparseVec {
        let mut v = vec![(basis_index, 1u8)];
        for &op in m.ops().iter().rev() {
            if v.is_empty() {
                break;
            }
            v = self.act_letter(op, &v);
        }
        v
    }

    pub fn act_element(&self, e: &SteenrodElement, basis_index: usize) -> SparseVec {
        let p = self.prime.value();
        let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
        for (m, c) in e.terms() {
            for (j, d) in self.act_monomial(m, basis_index) {
                *acc.entry(j).or_insert(0) += c as u32 * d as u32;
            }
        }
        acc.into_iter().filter_map(|(j, c)| (c % p != 0).then_some((j, (c % p) as u8))).collect()
    }

    /// The same module with every degree raised by `d`.
    pub fn shifted(&self, d: i32) -> Self {
        let mut out = self.clone();
        for g in out.generators.iter_mut() {
            g.degree += d;
        }
        out.meta.shift += d;
        out.t_max = out.t_max.map(|t| t + d);
        out
    }

    /// Checks that an inadmissible word and its Adem normal form act the
    /// same way on every basis element, for all words of two letters whose
    /// total degree is at most `max_degree`.
    pub fn verify_adem_compatibility(&self, max_degree: u32) -> Result<()> {
        let alg = SteenrodAlgebra::shared(self.prime);
        let letters: Vec<Op> = if self.prime.is_two() {
            (1..=max_degree).map(Op::Sq).collect()
        } else {
            let mut v = vec![Op::Beta];
            v.extend((1..=max_degree / 4).map(Op::P));
            v
        };
        for &a in &letters {
            for &b in &letters {
                if a.degree(self.prime) + b.degree(self.prime) > max_degree {
                    continue;
                }
                let word = Monomial(vec![a, b]);
                let normal = alg.adem_normalize(word.ops());
                for i in 0..self.generators.len() {
                    let lhs = self.act_monomial(&word, i);
                    let rhs = self.act_element(&normal, i);
                    if lhs != rhs {
                        return Err(Error::Inconsistent(format!(
                            "{word} and its normal form {normal} disagree on {}",
                            self.generators[i].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> ModuleJson {
        let mut arcs = Vec::new();
        for ((op, from), img) in &self.actions {
            if !is_indecomposable(*op, self.prime) {
                continue;
            }
            for &(to, c) in img {
                arcs.push(Arc {
                    op: op.to_string(),
                    from: self.generators[*from].name.clone(),
                    to: self.generators[to].name.clone(),
                    coeff: c,
                });
            }
        }
        arcs.sort_by(|a, b| {
            let da = self.generators.iter().find(|g| g.name == a.from).map(|g| g.degree);
            let db = self.generators.iter().find(|g| g.name == b.from).map(|g| g.degree);
            (a.op.len(), &a.op, da).cmp(&(b.op.len(), &b.op, db))
        });
        ModuleJson {
            prime: self.prime.value(),
            n: self.meta.n,
            k: self.meta.k,
            generators: self.generators.clone(),
            arcs,
        }
    }
}

/// `Sq^{2^i}` at p = 2; `b` and `P^{3^i}` at p = 3.
pub fn is_indecomposable(op: Op, prime: Prime) -> bool {
    match op {
        Op::Sq(k) => prime.is_two() && k.is_power_of_two(),
        Op::Beta => !prime.is_two(),
        Op::P(k) => {
            if prime.is_two() || k == 0 {
                return false;
            }
            let mut k = k;
            while k % 3 == 0 {
                k /= 3;
            }
            k == 1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub op: String,
    pub from: String,
    pub to: String,
    pub coeff: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub prime: u32,
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub generators: Vec<ModuleGenerator>,
    pub arcs: Vec<Arc>,
}

/// H*(CP^{n+k}_n; F_p) with classes x^m in degree 2m, before suspension.
pub fn projective_module(prime: Prime, n: u32, k: u32, t_max: i32) -> Result<ModulePresentation> {
    if n < 1 {
        return Err(Error::Range(format!("bottom index n = {n} must be at least 1")));
    }
    let top_m = ((t_max.max(0) / 2) as u32).min(n + k);
    let ms: Vec<u32> = if top_m >= n { (n..=top_m).collect() } else { Vec::new() };
    let generators: Vec<ModuleGenerator> =
        ms.iter().map(|&m| ModuleGenerator { name: format!("x{m}"), degree: 2 * m as i32 }).collect();
    // Sq^{2i} x^m = C(m, i) x^{m+i};  P^i x^m = C(m, i) x^{m+2i}
    let step = if prime.is_two() { 1 } else { 2 };
    let mut actions = BTreeMap::new();
    for (idx, &m) in ms.iter().enumerate() {
        for (jdx, &m2) in ms.iter().enumerate().skip(idx + 1) {
            let gap = m2 - m;
            if gap % step != 0 {
                continue;
            }
            let i = gap / step;
            let c = prime.binomial(m as i64, i as i64);
            if c != 0 {
                let op = if prime.is_two() { Op::Sq(2 * i) } else { Op::P(i) };
                actions.insert((op, idx), vec![(jdx, c)]);
            }
        }
    }
    Ok(ModulePresentation {
        prime,
        generators,
        actions,
        meta: ModuleMeta { kind: "cp".into(), n: Some(n), k: Some(k), shift: 0 },
        t_max: Some(t_max),
    })
}

/// H*(Sigma CP^{n+k}_n; F_p): one class y_{2m+1} for n <= m <= n+k, cut off
/// at degree `t_max`. `Sq^{2i}` and `P^i` act on y_{2m+1} by `C(m, i)`;
/// odd squares and the Bockstein act by zero.
pub fn stunted_module(prime: Prime, n: u32, k: u32, t_max: i32) -> Result<ModulePresentation> {
    let cp = projective_module(prime, n, k, t_max - 1)?;
    let mut m = cp.shifted(1);
    for g in m.generators.iter_mut() {
        g.name = format!("y{}", g.degree);
    }
    m.meta.kind = "stunted".into();
    m.t_max = Some(t_max);
    m.meta.shift = 0;
    Ok(m)
}

/// Σ CP^∞_n truncated at `t_max`.
pub fn stunted_infinite(prime: Prime, n: u32, t_max: i32) -> Result<ModulePresentation> {
    let k = ((t_max - 1).max(0) as u32 / 2).saturating_sub(n);
    stunted_module(prime, n, k, t_max)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramCheck {
    pub op: String,
    pub from: String,
    pub to: String,
    pub expected: bool,
    pub computed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramReport {
    pub residue: u32,
    pub checks: Vec<DiagramCheck>,
    pub all_match: bool,
}

/// Compares the action on the five bottom cells with the embedded arc
/// diagram for `n mod 8` (p = 2) or `n mod 3` (p = 3).
pub fn verify_action_against_diagram(m: &ModulePresentation) -> Result<DiagramReport> {
    let n = m
        .meta
        .n
        .filter(|_| m.meta.kind == "stunted")
        .ok_or_else(|| Error::Contract("diagram check needs a stunted module".into()))?;
    if m.meta.k.unwrap_or(0) < 4 || m.dim() < 5 {
        return Err(Error::Contract("diagram check needs at least five cells".into()));
    }
    let (residue, diagram, ops): (u32, _, Vec<(Op, &str)>) = if m.prime.is_two() {
        (n % 8, &reference::tables().action_diagrams.p2, vec![(Op::Sq(2), "Sq2"), (Op::Sq(4), "Sq4"), (Op::Sq(8), "Sq8")])
    } else {
        (n % 3, &reference::tables().action_diagrams.p3, vec![(Op::P(1), "P1")])
    };
    let arcs = diagram
        .get(&residue.to_string())
        .ok_or_else(|| Error::Config(format!("no diagram for residue {residue}")))?;
    let bottom = 2 * n as i32 + 1;
    let mut checks = Vec::new();
    for (op, name) in ops {
        let d = op.degree(m.prime) as i32;
        let expected_arcs = arcs.get(name).cloned().unwrap_or_default();
        for from in 0..5u32 {
            let from_deg = bottom + 2 * from as i32;
            let to_deg = from_deg + d;
            let to = ((to_deg - bottom) / 2) as u32;
            if to > 4 {
                continue;
            }
            let fi = m.index_of(from_deg).expect("cell present");
            let ti = m.index_of(to_deg).expect("cell present");
            let computed = m.act_letter(op, &[(fi, 1)]).iter().any(|&(j, c)| j == ti && c != 0);
            let expected = expected_arcs.iter().any(|a| a[0] == from && a[1] == to);
            checks.push(DiagramCheck {
                op: name.to_string(),
                from: format!("y{from_deg}"),
                to: format!("y{to_deg}"),
                expected,
                computed,
            });
        }
    }
    let all_match = checks.iter().all(|c| c.expected == c.computed);
    Ok(DiagramReport { residue, checks, all_match })
}
