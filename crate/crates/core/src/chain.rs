//! Magnitude chain generators: tuples of vertices with consecutive entries
//! distinct, graded by degree k (tuple length minus one) and total length
//! L = sum of consecutive distances. Provides basis enumeration, smooth and
//! gap classification, and boundary matrices.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::graph::{Dist, DistanceMatrix, Graph};
use crate::linalg::SparseIntMatrix;

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("index {0} is not an interior index of a degree-{1} tuple")]
    NotInterior(usize, usize),
    #[error("bidegree mismatch: source ({0},{1}), target ({2},{3})")]
    BidegreeMismatch(usize, u32, usize, u32),
    #[error("source and target bases carry different restrictions")]
    RestrictionMismatch,
    #[error("consecutive entries {0} and {1} coincide or are at infinite distance")]
    BadConsecutive(usize, usize),
}

/// A generator (x_0, ..., x_k) with its cached total length.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tuple {
    verts: Vec<usize>,
    length: u32,
}

impl Tuple {
    pub fn new(verts: Vec<usize>, d: &DistanceMatrix) -> Result<Self, ChainError> {
        assert!(!verts.is_empty(), "a tuple has at least one entry");
        let mut length = 0;
        for w in verts.windows(2) {
            match d.get(w[0], w[1]) {
                Dist::Finite(v) if v > 0 => length += v,
                _ => return Err(ChainError::BadConsecutive(w[0], w[1])),
            }
        }
        Ok(Tuple { verts, length })
    }

    pub fn verts(&self) -> &[usize] {
        &self.verts
    }

    pub fn degree(&self) -> usize {
        self.verts.len() - 1
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn start(&self) -> usize {
        self.verts[0]
    }

    pub fn end(&self) -> usize {
        *self.verts.last().unwrap()
    }

    /// Whether interior entry x_i satisfies
    /// d(x_{i-1}, x_{i+1}) = d(x_{i-1}, x_i) + d(x_i, x_{i+1}).
    pub fn is_smooth(&self, i: usize, d: &DistanceMatrix) -> Result<bool, ChainError> {
        let k = self.degree();
        if i == 0 || i >= k {
            return Err(ChainError::NotInterior(i, k));
        }
        let through = d.get(self.verts[i - 1], self.verts[i]).finite()
            + d.get(self.verts[i], self.verts[i + 1]).finite();
        Ok(d.get(self.verts[i - 1], self.verts[i + 1]) == Dist::Finite(through))
    }

    /// Smallest index g with d(x_g, x_{g+1}) >= 2, with that distance.
    pub fn first_gap(&self, d: &DistanceMatrix) -> Option<(usize, u32)> {
        self.verts.windows(2).enumerate().find_map(|(g, w)| {
            let dist = d.get(w[0], w[1]).finite();
            (dist >= 2).then_some((g, dist))
        })
    }

    /// Smallest smooth interior index strictly before the first gap, or any
    /// smooth interior index when the tuple has no gap.
    pub fn first_smooth_before_gap(&self, d: &DistanceMatrix) -> Option<usize> {
        let limit = match self.first_gap(d) {
            Some((g, _)) => g,
            None => self.degree(),
        };
        (1..limit).find(|&i| self.is_smooth(i, d).unwrap())
    }

    /// Delete interior entry i. Only valid for smooth i, where the result
    /// keeps the same length and endpoints.
    pub fn delete(&self, i: usize, d: &DistanceMatrix) -> Result<Tuple, ChainError> {
        let k = self.degree();
        if i == 0 || i >= k {
            return Err(ChainError::NotInterior(i, k));
        }
        let mut verts = self.verts.clone();
        verts.remove(i);
        Tuple::new(verts, d)
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.verts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Optional endpoint constraints for a basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Restriction {
    pub start: Option<usize>,
    pub end: Option<usize>,
}

impl Restriction {
    pub fn none() -> Self {
        Restriction::default()
    }

    pub fn start(x: usize) -> Self {
        Restriction {
            start: Some(x),
            end: None,
        }
    }

    pub fn pair(x: usize, y: usize) -> Self {
        Restriction {
            start: Some(x),
            end: Some(y),
        }
    }

    pub fn admits(&self, t: &Tuple) -> bool {
        self.start.map_or(true, |x| t.start() == x) && self.end.map_or(true, |y| t.end() == y)
    }
}

/// The ordered generating set of MC_{k,l}, possibly endpoint-restricted.
#[derive(Clone, Debug)]
pub struct ChainBasis {
    pub k: usize,
    pub l: u32,
    pub restriction: Restriction,
    generators: Vec<Tuple>,
    index: HashMap<Tuple, usize>,
}

impl ChainBasis {
    pub fn generators(&self) -> &[Tuple] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn position(&self, t: &Tuple) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// Debug dump, one tuple per line in basis order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for t in &self.generators {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out
    }
}

/// Enumerate all (x_0, ..., x_k) with consecutive entries distinct, total
/// length l, and the given endpoint restriction, in lexicographic order.
///
/// Depth-first extension prunes by the remaining length budget: each further
/// step adds at least 1, so a prefix survives only while
/// l - L(prefix) >= remaining steps.
pub fn enumerate_basis(
    g: &Graph,
    k: usize,
    l: u32,
    d: &DistanceMatrix,
    restriction: Restriction,
) -> ChainBasis {
    let mut generators = Vec::new();
    if (k as u32) <= l {
        let starts: Vec<usize> = match restriction.start {
            Some(x) => vec![x],
            None => (0..g.n()).collect(),
        };
        let mut prefix = Vec::with_capacity(k + 1);
        for x in starts {
            prefix.push(x);
            extend(g, d, k, l, restriction.end, &mut prefix, 0, &mut generators);
            prefix.pop();
        }
    }
    let index = generators
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    ChainBasis {
        k,
        l,
        restriction,
        generators,
        index,
    }
}

fn extend(
    g: &Graph,
    d: &DistanceMatrix,
    k: usize,
    l: u32,
    end: Option<usize>,
    prefix: &mut Vec<usize>,
    used: u32,
    out: &mut Vec<Tuple>,
) {
    let steps_left = (k + 1 - prefix.len()) as u32;
    if steps_left == 0 {
        if used == l && end.map_or(true, |y| *prefix.last().unwrap() == y) {
            out.push(Tuple {
                verts: prefix.clone(),
                length: used,
            });
        }
        return;
    }
    if l - used < steps_left {
        return;
    }
    let last = *prefix.last().unwrap();
    for next in 0..g.n() {
        if next == last {
            continue;
        }
        let Dist::Finite(step) = d.get(last, next) else {
            continue;
        };
        if used + step + (steps_left - 1) > l {
            continue;
        }
        prefix.push(next);
        extend(g, d, k, l, end, prefix, used + step, out);
        prefix.pop();
    }
}

/// Boundary matrix from the degree-k basis to the degree-(k-1) basis at the
/// same length. Entry (row, col) is the signed coefficient of the row tuple
/// in the boundary of the column tuple.
#[derive(Clone, Debug)]
pub struct BoundarySpec {
    pub source: ChainBasis,
    pub target: ChainBasis,
    pub matrix: SparseIntMatrix,
}

/// Assemble the boundary: column t gets (-1)^i at each smooth interior i,
/// targeting the deletion of x_i. Deleting a smooth point preserves length
/// and endpoints, so every deletion lands in the target basis.
pub fn boundary(
    d: &DistanceMatrix,
    source: ChainBasis,
    target: ChainBasis,
) -> Result<BoundarySpec, ChainError> {
    if source.l != target.l || source.k != target.k + 1 {
        return Err(ChainError::BidegreeMismatch(
            source.k, source.l, target.k, target.l,
        ));
    }
    if source.restriction != target.restriction {
        return Err(ChainError::RestrictionMismatch);
    }
    let mut matrix = SparseIntMatrix::zero(target.len(), source.len());
    for (col, t) in source.generators().iter().enumerate() {
        for i in 1..t.degree() {
            if t.is_smooth(i, d).unwrap() {
                let deleted = t.delete(i, d).unwrap();
                let row = target
                    .position(&deleted)
                    .expect("smooth deletion stays in the target basis");
                let sign = if i % 2 == 0 { 1 } else { -1 };
                matrix.set(row, col, BigInt::from(sign));
            }
        }
    }
    Ok(BoundarySpec {
        source,
        target,
        matrix,
    })
}
