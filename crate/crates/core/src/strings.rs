//! Decomposition of one chart column into strings under multiplication by
//! h0 (p = 2) or a0 (p = 3).
//!
//! Levels are processed from the bottom up. Each live string is pushed one
//! level higher by the multiplication map; a string whose image is a
//! combination of images of older strings ends, and its history is
//! rewritten by subtracting those older strings so that its top vector is
//! genuinely killed. Whatever the surviving images do not span starts new
//! strings, taken from the standard basis in order. At every level the
//! vectors of the strings present form a basis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::{FpMatrix, FpVector, Span};
use crate::prime::Prime;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HString {
    pub bottom: u32,
    /// One vector per level, starting at `bottom`.
    pub vectors: Vec<FpVector>,
    pub reaches_top: bool,
    pub tower: bool,
}

impl HString {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn top(&self) -> u32 {
        self.bottom + self.vectors.len() as u32 - 1
    }

    pub fn vector_at(&self, level: u32) -> Option<&FpVector> {
        level.checked_sub(self.bottom).and_then(|i| self.vectors.get(i as usize))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StemStrings {
    pub prime: Prime,
    pub stem: i32,
    pub s_top: u32,
    pub dims: Vec<usize>,
    pub strings: Vec<HString>,
}

/// Minimum length for a string reaching the top of the window to count as
/// an infinite tower.
pub const TOWER_MIN_LENGTH: usize = 3;

impl StemStrings {
    /// `(string index, vector)` for every string present at `level`.
    pub fn adapted_basis(&self, level: u32) -> Vec<(usize, &FpVector)> {
        self.strings
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.vector_at(level).map(|v| (i, v)))
            .collect()
    }

    /// Coordinates of `v` in the adapted basis at `level`.
    pub fn coordinates(&self, level: u32, v: &[u8]) -> Result<Vec<(usize, u8)>> {
        let basis = self.adapted_basis(level);
        let dim = self.dims.get(level as usize).copied().unwrap_or(0);
        if v.len() != dim {
            return Err(Error::Contract(format!("vector of length {} at a level of dimension {dim}", v.len())));
        }
        if dim == 0 {
            return Ok(Vec::new());
        }
        let cols: Vec<FpVector> = basis.iter().map(|(_, v)| (*v).clone()).collect();
        let m = FpMatrix::from_columns(self.prime, dim, &cols);
        let x = m
            .solve(v)?
            .ok_or_else(|| Error::Contract(format!("adapted basis at level {level} does not span")))?;
        Ok(basis.iter().zip(x).filter(|(_, c)| *c != 0).map(|((i, _), c)| (*i, c)).collect())
    }

    pub fn towers(&self) -> impl Iterator<Item = &HString> {
        self.strings.iter().filter(|s| s.tower)
    }

    pub fn tower_count(&self) -> usize {
        self.towers().count()
    }

    /// String containing the one-dimensional level, if the level has
    /// dimension one.
    pub fn string_at(&self, level: u32) -> Option<usize> {
        let b = self.adapted_basis(level);
        (b.len() == 1).then(|| b[0].0)
    }
}

/// `maps[s]` is the multiplication map from level `s` to level `s + 1`
/// (rows = `dims[s+1]`, cols = `dims[s]`).
pub fn decompose(prime: Prime, stem: i32, dims: &[usize], maps: &[FpMatrix], s_top: u32) -> Result<StemStrings> {
    let levels = dims.len();
    if levels == 0 || levels != s_top as usize + 1 || maps.len() + 1 != levels {
        return Err(Error::Contract("inconsistent level data for string decomposition".into()));
    }
    let mut strings: Vec<HString> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for s in 0..levels {
        let dim = dims[s];
        if s > 0 {
            let h = &maps[s - 1];
            if h.rows() != dim || h.cols() != dims[s - 1] {
                return Err(Error::Contract(format!("map at level {} has the wrong shape", s - 1)));
            }
            let mut survivors: Vec<usize> = Vec::new();
            let mut images: Vec<FpVector> = Vec::new();
            for &idx in &active {
                let v = strings[idx].vectors.last().unwrap().clone();
                let img = h.apply(&v)?;
                let dependence = if images.is_empty() {
                    img.iter().all(|&x| x == 0).then(Vec::new)
                } else {
                    FpMatrix::from_columns(prime, dim, &images).solve(&img)?
                };
                match dependence {
                    Some(coeffs) => {
                        // rewrite the history so the top vector is in the kernel
                        let pv = prime.value();
                        for (j, &c) in coeffs.iter().enumerate() {
                            if c == 0 {
                                continue;
                            }
                            let older = survivors[j];
                            let bottom = strings[idx].bottom;
                            for k in 0..strings[idx].vectors.len() {
                                let level = bottom + k as u32;
                                let w = strings[older].vector_at(level).expect("older string present").clone();
                                let target = &mut strings[idx].vectors[k];
                                for (x, y) in target.iter_mut().zip(&w) {
                                    *x = ((*x as u32 + (pv - c as u32) * *y as u32) % pv) as u8;
                                }
                            }
                        }
                    }
                    None => {
                        survivors.push(idx);
                        images.push(img);
                    }
                }
            }
            for (&idx, img) in survivors.iter().zip(&images) {
                strings[idx].vectors.push(img.clone());
            }
            active = survivors;
        }
        let mut span = Span::new(prime, dim);
        for &idx in &active {
            span.insert(strings[idx].vectors.last().unwrap());
        }
        for i in 0..dim {
            let mut e = vec![0u8; dim];
            e[i] = 1;
            if span.insert(&e) {
                strings.push(HString { bottom: s as u32, vectors: vec![e], reaches_top: false, tower: false });
                active.push(strings.len() - 1);
            }
        }
    }
    for &idx in &active {
        strings[idx].reaches_top = true;
        strings[idx].tower = strings[idx].len() >= TOWER_MIN_LENGTH;
    }
    Ok(StemStrings { prime, stem, s_top, dims: dims.to_vec(), strings })
}
