//! Integer lattices in Z^m, kept in column echelon form, and Smith
//! invariants. Entries stay tiny in this workload; i128 leaves ample room.

use crate::error::{Error, Result};

pub type IVec = Vec<i128>;

/// Column echelon form of the generators `cols` (each of length `m`):
/// returns `(echelon, pivots, transform)` with `cols * transform` equal to
/// `echelon` followed by zero columns. `transform` is unimodular and given
/// by its columns.
pub fn column_echelon(m: usize, cols: &[IVec]) -> (Vec<IVec>, Vec<usize>, Vec<IVec>) {
    let k = cols.len();
    let mut a: Vec<IVec> = cols.to_vec();
    let mut u: Vec<IVec> = (0..k)
        .map(|j| {
            let mut e = vec![0i128; k];
            e[j] = 1;
            e
        })
        .collect();
    let mut pivots = Vec::new();
    let mut next = 0;
    for row in 0..m {
        if next == k {
            break;
        }
        loop {
            // smallest nonzero |entry| in this row among free columns
            let mut best: Option<usize> = None;
            for c in next..k {
                if a[c][row] != 0 && best.map_or(true, |b| a[c][row].abs() < a[b][row].abs()) {
                    best = Some(c);
                }
            }
            let Some(b) = best else { break };
            a.swap(next, b);
            u.swap(next, b);
            let mut done = true;
            for c in next + 1..k {
                let q = a[c][row].div_euclid(a[next][row]);
                if q != 0 {
                    for i in 0..m {
                        a[c][i] -= q * a[next][i];
                    }
                    for i in 0..k {
                        u[c][i] -= q * u[next][i];
                    }
                }
                if a[c][row] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[next][row] != 0 {
            if a[next][row] < 0 {
                for x in a[next].iter_mut() {
                    *x = -*x;
                }
                for x in u[next].iter_mut() {
                    *x = -*x;
                }
            }
            pivots.push(row);
            next += 1;
        }
    }
    let echelon = a[..next].to_vec();
    (echelon, pivots, u)
}

/// Basis of `{x in Z^k : sum x_j cols_j = 0}`.
pub fn integer_kernel(m: usize, cols: &[IVec]) -> Vec<IVec> {
    let (ech, _, u) = column_echelon(m, cols);
    u[ech.len()..].to_vec()
}

/// A sublattice of Z^m in echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub m: usize,
    pub basis: Vec<IVec>,
    pivots: Vec<usize>,
}

impl Lattice {
    pub fn from_generators(m: usize, gens: &[IVec]) -> Lattice {
        let (basis, pivots, _) = column_echelon(m, gens);
        Lattice { m, basis, pivots }
    }

    pub fn full(m: usize) -> Lattice {
        let gens: Vec<IVec> = (0..m)
            .map(|i| {
                let mut e = vec![0; m];
                e[i] = 1;
                e
            })
            .collect();
        Lattice::from_generators(m, &gens)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates in the echelon basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[i128]) -> Option<IVec> {
        let mut r = v.to_vec();
        let mut x = Vec::with_capacity(self.basis.len());
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if r[p] % b[p] != 0 {
                return None;
            }
            let q = r[p] / b[p];
            for i in 0..self.m {
                r[i] -= q * b[i];
            }
            x.push(q);
        }
        r.iter().all(|&e| e == 0).then_some(x)
    }

    pub fn contains(&self, v: &[i128]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        let mut g = self.basis.clone();
        g.extend(other.basis.iter().cloned());
        Lattice::from_generators(self.m, &g)
    }
}

/// Nonzero Smith invariants `d_1 | d_2 | ...` of the matrix with the given
/// columns (each of length `rows`).
pub fn smith_invariants(rows: usize, cols: &[IVec]) -> Vec<i128> {
    let mut a: Vec<Vec<i128>> = (0..rows).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let (nr, nc) = (rows, cols.len());
    let mut out = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // pivot: smallest nonzero entry in the trailing block
        let mut piv: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if a[i][j] != 0 && piv.map_or(true, |(pi, pj)| a[i][j].abs() < a[pi][pj].abs()) {
                    piv = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t];
            let mut changed = false;
            for i in t + 1..nr {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    for j in t..nc {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    changed = true;
                }
            }
            for j in t + 1..nc {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    for i in t..nr {
                        a[i][j] -= q * a[i][t];
                    }
                }
                if a[t][j] != 0 {
                    changed = true;
                }
            }
            if !changed {
                // enforce divisibility of the trailing block
                let bad = (t + 1..nr).flat_map(|i| (t + 1..nc).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % p != 0);
                match bad {
                    Some((i, _)) => {
                        for j in t..nc {
                            a[t][j] += a[i][j];
                        }
                        continue;
                    }
                    None => break,
                }
            }
            // move the smallest nonzero entry of row/column t into place
            let mut best = (t, t);
            for i in t..nr {
                if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..nc {
                if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if a[best.0][best.1] == 0 {
                break;
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// Isomorphism type of a finitely generated abelian group: free rank and
/// nontrivial invariant factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct GroupType {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl GroupType {
    pub fn trivial() -> Self {
        GroupType { rank: 0, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn torsion_order(&self) -> u64 {
        self.torsion.iter().product()
    }

    /// `None` when infinite.
    pub fn order(&self) -> Option<u64> {
        (self.rank == 0).then(|| self.torsion_order())
    }

    /// Compares cardinalities: infinite groups by rank, then torsion order.
    pub fn size_key(&self) -> (usize, u64) {
        (self.rank, self.torsion_order())
    }
}

impl std::fmt::Display for GroupType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = (0..self.rank).map(|_| "Z".to_string()).collect();
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

/// The group `sub / rel` for lattices `rel ⊆ sub`.
pub fn quotient_type(sub: &Lattice, rel: &Lattice) -> Result<GroupType> {
    let mut coords = Vec::with_capacity(rel.basis.len());
    for v in &rel.basis {
        coords.push(
            sub.coordinates(v)
                .ok_or_else(|| Error::Contract("relation lattice is not contained in the cycle lattice".into()))?,
        );
    }
    let inv = smith_invariants(sub.rank(), &coords);
    let nonzero = inv.iter().filter(|&&d| d != 0).count();
    let mut torsion: Vec<u64> = inv.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect();
    torsion.sort();
    Ok(GroupType { rank: sub.rank() - nonzero, torsion })
}
