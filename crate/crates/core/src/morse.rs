//! Algebraic Morse reduction of magnitude chain complexes, with the two
//! girth-conditioned matchings: the f-matching deletes the first smooth
//! point before the first gap (valid when gir_x >= 5) and the h-matching
//! deletes a smooth gap endpoint on the f-reduced complex (valid when
//! gir_x >= 2i + 5).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::chain::{boundary, enumerate_basis, Restriction, Tuple};
use crate::graph::{Dist, DistanceMatrix, Graph};
use crate::linalg::SparseIntMatrix;

#[derive(Debug, Error)]
pub enum MorseError {
    #[error("girth around vertex {vertex} is {actual}, but the matching needs >= {required}")]
    GirthTooSmall {
        vertex: usize,
        required: u32,
        actual: Dist,
    },
    #[error("matching depth {depth} exceeds the maximum {max} for length {l}")]
    DepthOutOfRange { depth: usize, max: usize, l: u32 },
    #[error("matching is not a Morse matching: {0}")]
    InvalidMatching(String),
    #[error("reduced coefficient of a matched pair is {0}, expected a unit")]
    NonUnitReducedCoefficient(BigInt),
}

/// A chain complex over a contiguous range of homological degrees, with an
/// explicit tuple basis per degree.
#[derive(Clone, Debug)]
pub struct Complex {
    min_deg: usize,
    cells: Vec<Vec<Tuple>>,
    index: Vec<HashMap<Tuple, usize>>,
    // boundaries[j] maps degree min_deg + j + 1 to degree min_deg + j.
    boundaries: Vec<SparseIntMatrix>,
}

impl Complex {
    fn from_cells(min_deg: usize, cells: Vec<Vec<Tuple>>, boundaries: Vec<SparseIntMatrix>) -> Self {
        let index = cells
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .enumerate()
                    .map(|(i, t)| (t.clone(), i))
                    .collect()
            })
            .collect();
        Complex {
            min_deg,
            cells,
            index,
            boundaries,
        }
    }

    /// The magnitude chain complex at length `l` in degrees 0..=l,
    /// optionally restricted to tuples starting at `x`.
    pub fn magnitude(g: &Graph, d: &DistanceMatrix, x: Option<usize>, l: u32) -> Complex {
        let restriction = match x {
            Some(x) => Restriction::start(x),
            None => Restriction::none(),
        };
        let bases: Vec<_> = (0..=l as usize)
            .map(|k| enumerate_basis(g, k, l, d, restriction))
            .collect();
        let boundaries = bases
            .windows(2)
            .map(|w| boundary(d, w[1].clone(), w[0].clone()).unwrap().matrix)
            .collect();
        let cells = bases
            .into_iter()
            .map(|b| b.generators().to_vec())
            .collect();
        Complex::from_cells(0, cells, boundaries)
    }

    pub fn degree_range(&self) -> RangeInclusive<usize> {
        self.min_deg..=self.min_deg + self.cells.len() - 1
    }

    pub fn cells(&self, deg: usize) -> &[Tuple] {
        &self.cells[deg - self.min_deg]
    }

    pub fn position(&self, deg: usize, t: &Tuple) -> Option<usize> {
        self.index[deg - self.min_deg].get(t).copied()
    }

    /// Boundary map from degree `deg` to `deg - 1`; a zero matrix of the
    /// right shape when either side is outside the degree range.
    pub fn boundary_map(&self, deg: usize) -> SparseIntMatrix {
        let dim = |d: usize| {
            self.degree_range()
                .contains(&d)
                .then(|| self.cells(d).len())
                .unwrap_or(0)
        };
        if deg > self.min_deg && self.degree_range().contains(&deg) {
            self.boundaries[deg - self.min_deg - 1].clone()
        } else {
            SparseIntMatrix::zero(dim(deg.wrapping_sub(1)), dim(deg))
        }
    }

    /// Restriction to degrees lo..=hi, dropping boundary maps that cross
    /// the cut.
    pub fn truncate(&self, lo: usize, hi: usize) -> Complex {
        assert!(self.degree_range().contains(&lo) && self.degree_range().contains(&hi) && lo <= hi);
        let cells = self.cells[lo - self.min_deg..=hi - self.min_deg].to_vec();
        let boundaries = self.boundaries[lo - self.min_deg..hi - self.min_deg].to_vec();
        Complex::from_cells(lo, cells, boundaries)
    }

    pub fn total_cells(&self) -> usize {
        self.cells.iter().map(|c| c.len()).sum()
    }

    /// Debug dump of the cells at one degree, one tuple per line.
    pub fn dump_cells(&self, deg: usize) -> String {
        let mut out = String::new();
        for t in self.cells(deg) {
            let _ = writeln!(out, "{t}");
        }
        out
    }
}

/// One matched pair: `upper` at degree `lower_deg + 1`, `lower` at degree
/// `lower_deg`, and the +-1 coefficient of `lower` in the boundary of
/// `upper`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchedPair {
    pub lower_deg: usize,
    pub upper: Tuple,
    pub lower: Tuple,
    pub coeff: i8,
}

#[derive(Clone, Debug, Default)]
pub struct MorseMatching {
    pub pairs: Vec<MatchedPair>,
}

impl MorseMatching {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        self.pairs.iter().any(|p| &p.upper == t || &p.lower == t)
    }

    /// Debug dump, one pair per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for p in &self.pairs {
            let _ = writeln!(
                out,
                "deg {}: {} -> {} [{}]",
                p.lower_deg + 1,
                p.upper,
                p.lower,
                p.coeff
            );
        }
        out
    }
}

/// Outcome of checking the Morse matching conditions. Violations are data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchingReport {
    Valid,
    CellReused(Tuple),
    MissingCell(Tuple),
    NonUnitCoefficient { upper: Tuple, lower: Tuple, actual: BigInt },
    Cycle { lower_deg: usize },
}

/// Check disjointness, unit coefficients against the actual boundary, and
/// layerwise acyclicity of the inverted-edge digraph.
pub fn validate_matching(complex: &Complex, m: &MorseMatching) -> MatchingReport {
    let mut seen: HashMap<&Tuple, ()> = HashMap::new();
    for p in &m.pairs {
        for t in [&p.upper, &p.lower] {
            if seen.insert(t, ()).is_some() {
                return MatchingReport::CellReused(t.clone());
            }
        }
    }
    for p in &m.pairs {
        let (Some(uc), Some(lr)) = (
            complex.position(p.lower_deg + 1, &p.upper),
            complex.position(p.lower_deg, &p.lower),
        ) else {
            return MatchingReport::MissingCell(p.upper.clone());
        };
        let actual = complex.boundary_map(p.lower_deg + 1).get(lr, uc);
        if !actual.abs().is_one() || actual != BigInt::from(p.coeff) {
            return MatchingReport::NonUnitCoefficient {
                upper: p.upper.clone(),
                lower: p.lower.clone(),
                actual,
            };
        }
    }
    // Layerwise acyclicity: within one adjacent degree pair, draw an edge
    // from matched upper a to matched upper a' when the boundary of a hits
    // the lower of a'. A directed cycle invalidates the matching.
    let mut by_layer: HashMap<usize, Vec<&MatchedPair>> = HashMap::new();
    for p in &m.pairs {
        by_layer.entry(p.lower_deg).or_default().push(p);
    }
    for (&lower_deg, pairs) in &by_layer {
        let bmap = complex.boundary_map(lower_deg + 1);
        let lower_to_pair: HashMap<usize, usize> = pairs
            .iter()
            .enumerate()
            .map(|(i, p)| (complex.position(lower_deg, &p.lower).unwrap(), i))
            .collect();
        let succs: Vec<Vec<usize>> = pairs
            .iter()
            .map(|p| {
                let uc = complex.position(lower_deg + 1, &p.upper).unwrap();
                let own_lr = complex.position(lower_deg, &p.lower).unwrap();
                bmap.column(uc)
                    .keys()
                    .filter(|&&r| r != own_lr)
                    .filter_map(|r| lower_to_pair.get(r).copied())
                    .collect()
            })
            .collect();
        // 0 = unvisited, 1 = on stack, 2 = done.
        let mut state = vec![0u8; pairs.len()];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for start in 0..pairs.len() {
            if state[start] != 0 {
                continue;
            }
            stack.push((start, 0));
            state[start] = 1;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if *next < succs[v].len() {
                    let w = succs[v][*next];
                    *next += 1;
                    match state[w] {
                        0 => {
                            state[w] = 1;
                            stack.push((w, 0));
                        }
                        1 => return MatchingReport::Cycle { lower_deg },
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    stack.pop();
                }
            }
        }
    }
    MatchingReport::Valid
}

/// Morse-reduce: critical cells are the unmatched tuples; the reduced
/// differential sums signed products of unit coefficients over zig-zag
/// paths, memoized per intermediate matched cell.
pub fn reduce(complex: &Complex, m: &MorseMatching) -> Result<Complex, MorseError> {
    match validate_matching(complex, m) {
        MatchingReport::Valid => {}
        bad => return Err(MorseError::InvalidMatching(format!("{bad:?}"))),
    }
    let degs: Vec<usize> = complex.degree_range().collect();
    let nd = degs.len();
    // Per degree, how each cell participates in the matching.
    #[derive(Clone)]
    enum Role {
        Critical(usize),
        // Matched downward: the index of its upper one degree above, and
        // the unit coefficient of the pair.
        Lower { upper: usize, coeff: i8 },
        Upper,
    }
    let mut roles: Vec<Vec<Role>> = complex
        .cells
        .iter()
        .map(|layer| vec![Role::Critical(0); layer.len()])
        .collect();
    for p in &m.pairs {
        let li = p.lower_deg - complex.min_deg;
        let lower = complex.position(p.lower_deg, &p.lower).unwrap();
        let upper = complex.position(p.lower_deg + 1, &p.upper).unwrap();
        roles[li][lower] = Role::Lower { upper, coeff: p.coeff };
        roles[li + 1][upper] = Role::Upper;
    }
    let mut crit_cells: Vec<Vec<Tuple>> = Vec::with_capacity(nd);
    for (li, layer) in complex.cells.iter().enumerate() {
        let mut cells = Vec::new();
        for (i, t) in layer.iter().enumerate() {
            if matches!(roles[li][i], Role::Critical(_)) {
                roles[li][i] = Role::Critical(cells.len());
                cells.push(t.clone());
            }
        }
        crit_cells.push(cells);
    }

    let mut reduced = Vec::with_capacity(nd.saturating_sub(1));
    for li in 0..nd - 1 {
        let bmap = &complex.boundaries[li];
        // contrib[b] expresses the flow of the degree-(li) cell b into the
        // critical cells of the same degree.
        let mut memo: Vec<Option<HashMap<usize, BigInt>>> = vec![None; complex.cells[li].len()];
        // Iterative post-order over the dependency dag (acyclic because the
        // matching validated).
        let resolve = |b0: usize, memo: &mut Vec<Option<HashMap<usize, BigInt>>>| {
            let mut stack = vec![b0];
            while let Some(&b) = stack.last() {
                if memo[b].is_some() {
                    stack.pop();
                    continue;
                }
                match roles[li][b] {
                    Role::Critical(c) => {
                        memo[b] = Some(HashMap::from([(c, BigInt::one())]));
                        stack.pop();
                    }
                    Role::Upper => {
                        memo[b] = Some(HashMap::new());
                        stack.pop();
                    }
                    Role::Lower { upper, coeff } => {
                        let col = bmap.column(upper);
                        let pending: Vec<usize> = col
                            .keys()
                            .filter(|&&r| r != b && memo[r].is_none())
                            .copied()
                            .collect();
                        if !pending.is_empty() {
                            stack.extend(pending);
                            continue;
                        }
                        let mut acc: HashMap<usize, BigInt> = HashMap::new();
                        for (&r, v) in col {
                            if r == b {
                                continue;
                            }
                            for (&c, w) in memo[r].as_ref().unwrap() {
                                *acc.entry(c).or_insert_with(BigInt::zero) += v * w;
                            }
                        }
                        let inv = -BigInt::from(coeff); // coeff is +-1
                        for v in acc.values_mut() {
                            *v *= &inv;
                        }
                        acc.retain(|_, v| !v.is_zero());
                        memo[b] = Some(acc);
                        stack.pop();
                    }
                }
            }
        };
        let mut matrix = SparseIntMatrix::zero(crit_cells[li].len(), crit_cells[li + 1].len());
        for (a, role) in roles[li + 1].iter().enumerate() {
            let Role::Critical(col_out) = *role else { continue };
            let mut acc: HashMap<usize, BigInt> = HashMap::new();
            for (&b, v) in bmap.column(a) {
                resolve(b, &mut memo);
                for (&c, w) in memo[b].as_ref().unwrap() {
                    *acc.entry(c).or_insert_with(BigInt::zero) += v * w;
                }
            }
            for (c, v) in acc {
                matrix.set(c, col_out, v);
            }
        }
        reduced.push(matrix);
    }
    Ok(Complex::from_cells(complex.min_deg, crit_cells, reduced))
}

/// The f-matching: every tuple with a smooth point strictly before its
/// first gap (any smooth point when there is no gap) is matched with the
/// deletion of that point. Valid as a Morse matching when gir_x >= 5.
pub fn build_f_matching(
    g: &Graph,
    d: &DistanceMatrix,
    x: usize,
    l: u32,
    i_max: usize,
) -> Result<MorseMatching, MorseError> {
    require_girth(g, x, 5)?;
    if l == 0 {
        return Ok(MorseMatching::default());
    }
    if i_max > l as usize - 1 {
        return Err(MorseError::DepthOutOfRange {
            depth: i_max,
            max: l as usize - 1,
            l,
        });
    }
    let mut pairs = Vec::new();
    for i in 0..=i_max {
        let deg = l as usize - i;
        let basis = enumerate_basis(g, deg, l, d, Restriction::start(x));
        for t in basis.generators() {
            if let Some(j) = t.first_smooth_before_gap(d) {
                let lower = t.delete(j, d).unwrap();
                pairs.push(MatchedPair {
                    lower_deg: deg - 1,
                    upper: t.clone(),
                    lower,
                    coeff: if j % 2 == 0 { 1 } else { -1 },
                });
            }
        }
    }
    Ok(MorseMatching { pairs })
}

/// Which of the four critical-cell conditions an f-unmatched tuple
/// satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnmatchedClass {
    /// (i): no gaps and no smooth points.
    NoGapNoSmooth,
    /// (ii): first gap at index >= 1 with distance >= 3, no smooth point
    /// before it.
    WideGap,
    /// (iii): first gap at index g >= 1 with distance 2, no smooth point
    /// before it, and every common neighbor z of the gap endpoints makes
    /// x_g smooth in the extended tuple (d(x_{g-1}, z) = 2), so z can only
    /// ever be the second smooth point.
    NarrowGapShielded,
    /// (iv): first gap at index 0 with distance >= 3.
    WideGapAtStart,
    /// In the matching, either as an upper (has a smooth point before the
    /// first gap) or as a lower (in the image of the deletion map).
    Matched,
}

impl UnmatchedClass {
    pub fn is_critical(self) -> bool {
        self != UnmatchedClass::Matched
    }
}

/// Classify a tuple against the critical-cell conditions. Precondition
/// gir_x >= 5 for the classification to coincide with the f-matching.
pub fn classify_unmatched(t: &Tuple, g: &Graph, d: &DistanceMatrix) -> UnmatchedClass {
    if t.first_smooth_before_gap(d).is_some() {
        return UnmatchedClass::Matched;
    }
    let Some((gap, dist)) = t.first_gap(d) else {
        return UnmatchedClass::NoGapNoSmooth;
    };
    if gap == 0 {
        return if dist >= 3 {
            UnmatchedClass::WideGapAtStart
        } else {
            // A distance-2 gap at the start extends by a common neighbor
            // whose insertion is the first smooth point, so the tuple is in
            // the image of the deletion map.
            UnmatchedClass::Matched
        };
    }
    if dist >= 3 {
        return UnmatchedClass::WideGap;
    }
    let v = t.verts();
    let (prev, a, b) = (v[gap - 1], v[gap], v[gap + 1]);
    let shielded = common_neighbors(g, a, b)
        .all(|z| d.get(prev, z) == Dist::Finite(2));
    if shielded {
        UnmatchedClass::NarrowGapShielded
    } else {
        UnmatchedClass::Matched
    }
}

fn common_neighbors<'a>(g: &'a Graph, a: usize, b: usize) -> impl Iterator<Item = usize> + 'a {
    g.neighbors(a)
        .iter()
        .copied()
        .filter(move |&z| g.neighbors(b).binary_search(&z).is_ok())
}

/// The h-matching on the f-reduced complex: an f-critical tuple whose gap
/// endpoint x_g is smooth is matched with its x_g-deletion, for degrees
/// l - 1 down to l - i. Valid when gir_x >= 2i + 5; `freduced` must be the
/// f-reduction of the magnitude complex of (g, x, l).
pub fn build_h_matching(
    g: &Graph,
    d: &DistanceMatrix,
    x: usize,
    l: u32,
    i: usize,
    freduced: &Complex,
) -> Result<MorseMatching, MorseError> {
    require_girth(g, x, 2 * i as u32 + 5)?;
    let mut pairs = Vec::new();
    for j in 1..=i {
        let deg = l as usize - j;
        let bmap = freduced.boundary_map(deg);
        for (col, t) in freduced.cells(deg).iter().enumerate() {
            match classify_unmatched(t, g, d) {
                UnmatchedClass::WideGap | UnmatchedClass::NarrowGapShielded => {}
                _ => continue,
            }
            let (gap, _) = t.first_gap(d).unwrap();
            if !t.is_smooth(gap, d).unwrap() {
                continue;
            }
            let lower = t.delete(gap, d).unwrap();
            let row = freduced
                .position(deg - 1, &lower)
                .expect("deleting the smooth gap endpoint lands on an f-critical cell");
            let coeff = bmap.get(row, col);
            if !coeff.abs().is_one() {
                return Err(MorseError::NonUnitReducedCoefficient(coeff));
            }
            pairs.push(MatchedPair {
                lower_deg: deg - 1,
                upper: t.clone(),
                lower,
                coeff: if coeff.is_one() { 1 } else { -1 },
            });
        }
    }
    Ok(MorseMatching { pairs })
}

fn require_girth(g: &Graph, x: usize, required: u32) -> Result<(), MorseError> {
    let actual = g.girth_vertex(x);
    if actual < Dist::Finite(required) {
        return Err(MorseError::GirthTooSmall {
            vertex: x,
            required,
            actual,
        });
    }
    Ok(())
}
