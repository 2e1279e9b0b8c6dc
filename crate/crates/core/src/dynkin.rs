//! Dynkin type determination for connected posets.
//!
//! Four classifiers cooperate: a linear-time Hasse-shape fast path (paths and
//! multi-sink cycles), a tree-shape classifier, a full case split for
//! digraphs of maximum degree 2 (one-sink cycles), and a general method that
//! works from the Gram spectrum: special-index deletion for corank > 0 and an
//! exact root count for positive forms. The dispatcher runs every applicable
//! classifier and insists they agree.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::gram::{classify_definiteness, special_basis, symmetric_gram, Definiteness,
    SymIntMatrix};
use crate::poset::{HasseDigraph, Poset};

/// Errors raised by the classifiers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("Disconnected: classification is defined for connected posets")]
    Disconnected,
    #[error("NotATree: the Hasse digraph is not a tree")]
    NotATree,
    #[error("DegreeTooHigh: vertex {vertex} has underlying degree {degree} > 2")]
    DegreeTooHigh { vertex: usize, degree: usize },
    #[error("NotPositive: root sets are finite only for positive forms")]
    NotPositive,
    /// Two applicable classifiers produced different verdicts. This is an
    /// internal-consistency failure, never a property of the input.
    #[error("InternalDisagreement: {0}")]
    InternalDisagreement(String),
}

/// A simply-laced Dynkin type: A (rank >= 1), D (rank >= 4), E (rank 6..8).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DynkinType {
    A(usize),
    D(usize),
    E(usize),
}

impl DynkinType {
    pub fn family(&self) -> char {
        match self {
            DynkinType::A(_) => 'A',
            DynkinType::D(_) => 'D',
            DynkinType::E(_) => 'E',
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            DynkinType::A(r) | DynkinType::D(r) | DynkinType::E(r) => r,
        }
    }

    /// Number of vectors with q = 1 in the root system of this type.
    pub fn root_system_size(&self) -> u64 {
        match *self {
            DynkinType::A(n) => (n as u64) * (n as u64 + 1),
            DynkinType::D(n) => 2 * (n as u64) * (n as u64 - 1),
            DynkinType::E(6) => 72,
            DynkinType::E(7) => 126,
            DynkinType::E(8) => 240,
            DynkinType::E(r) => unreachable!("E rank {r} outside 6..=8"),
        }
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family(), self.rank())
    }
}

/// Which classifier decided a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    FastA,
    Tree,
    DegreeLe2,
    RootCount,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::FastA => "fast_a",
            Method::Tree => "tree",
            Method::DegreeLe2 => "degree_le2",
            Method::RootCount => "root_count",
        };
        f.write_str(s)
    }
}

/// A complete verdict: definiteness, Dynkin type when non-negative, the
/// classifier that decided, and the deleted special indices for corank > 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullClassification {
    pub definiteness: Definiteness,
    pub dynkin: Option<DynkinType>,
    pub method: Method,
    pub special_deleted: Option<Vec<usize>>,
}

impl FullClassification {
    pub fn corank(&self) -> Option<usize> {
        match self.definiteness {
            Definiteness::NonNegative { corank } => Some(corank),
            Definiteness::Indefinite { .. } => None,
        }
    }

    /// Verdicts agree when definiteness kind, corank and Dynkin type match
    /// (witness vectors and method tags may differ).
    fn agrees_with(&self, other: &FullClassification) -> bool {
        match (&self.definiteness, &other.definiteness) {
            (
                Definiteness::NonNegative { corank: a },
                Definiteness::NonNegative { corank: b },
            ) => a == b && self.dynkin == other.dynkin,
            (Definiteness::Indefinite { .. }, Definiteness::Indefinite { .. }) => true,
            _ => false,
        }
    }
}

/// Linear-time shape fast path: an underlying path is positive of type A_n;
/// a 2-regular digraph with at least two sinks is principal of type A_{n-1}.
/// Anything else gets no verdict here.
pub fn classify_fast_a(h: &HasseDigraph) -> Result<Option<FullClassification>, ClassifyError> {
    let shape = h.shape_report();
    if !shape.connected {
        return Err(ClassifyError::Disconnected);
    }
    if shape.underlying_is_path {
        return Ok(Some(FullClassification {
            definiteness: Definiteness::NonNegative { corank: 0 },
            dynkin: Some(DynkinType::A(h.n())),
            method: Method::FastA,
            special_deleted: None,
        }));
    }
    if shape.is_two_regular && shape.sinks.len() >= 2 {
        return Ok(Some(FullClassification {
            definiteness: Definiteness::NonNegative { corank: 1 },
            dynkin: Some(DynkinType::A(h.n() - 1)),
            method: Method::FastA,
            special_deleted: None,
        }));
    }
    Ok(None)
}

/// Underlying tree shapes that decide the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TreeShape {
    /// Simply-laced Dynkin tree: positive, type as given.
    Dynkin(DynkinType),
    /// Extended (one-point-enlarged) Dynkin tree: corank 1, type as given.
    Euclidean(DynkinType),
    /// Neither: the form is indefinite.
    Wild,
}

/// Walks from `from` (a neighbor of `start`) away from `start` until a vertex
/// of degree != 2, returning the number of edges walked and the end vertex.
fn walk_arm(adj: &[u64], start: usize, from: usize) -> (usize, usize) {
    let mut prev = start;
    let mut cur = from;
    let mut len = 1;
    while adj[cur].count_ones() == 2 {
        let next = (adj[cur] & !(1u64 << prev)).trailing_zeros() as usize;
        prev = cur;
        cur = next;
        len += 1;
    }
    (len, cur)
}

fn recognize_tree_shape(adj: &[u64], n: usize) -> TreeShape {
    let degrees: Vec<usize> = adj.iter().map(|m| m.count_ones() as usize).collect();
    let branches: Vec<usize> = (0..n).filter(|&v| degrees[v] >= 3).collect();
    match branches.as_slice() {
        [] => TreeShape::Dynkin(DynkinType::A(n)),
        [c] => {
            let c = *c;
            if degrees[c] >= 5 {
                return TreeShape::Wild;
            }
            let mut arms = Vec::new();
            let mut m = adj[c];
            while m != 0 {
                let nb = m.trailing_zeros() as usize;
                m &= m - 1;
                let (len, end) = walk_arm(adj, c, nb);
                if degrees[end] != 1 {
                    // Ends at another branch vertex: impossible with one
                    // branch vertex in a tree, but guard anyway.
                    return TreeShape::Wild;
                }
                arms.push(len);
            }
            arms.sort_unstable();
            if degrees[c] == 4 {
                return if arms == [1, 1, 1, 1] {
                    TreeShape::Euclidean(DynkinType::D(4))
                } else {
                    TreeShape::Wild
                };
            }
            match arms.as_slice() {
                [1, 1, _] => TreeShape::Dynkin(DynkinType::D(n)),
                [1, 2, 2] => TreeShape::Dynkin(DynkinType::E(6)),
                [1, 2, 3] => TreeShape::Dynkin(DynkinType::E(7)),
                [1, 2, 4] => TreeShape::Dynkin(DynkinType::E(8)),
                [2, 2, 2] => TreeShape::Euclidean(DynkinType::E(6)),
                [1, 3, 3] => TreeShape::Euclidean(DynkinType::E(7)),
                [1, 2, 5] => TreeShape::Euclidean(DynkinType::E(8)),
                _ => TreeShape::Wild,
            }
        }
        [c1, c2] => {
            // Two forks joined by a path, every fork arm a single leaf.
            for &c in [c1, c2].into_iter() {
                if degrees[c] != 3 {
                    return TreeShape::Wild;
                }
                let mut leaf_arms = 0;
                let mut m = adj[c];
                while m != 0 {
                    let nb = m.trailing_zeros() as usize;
                    m &= m - 1;
                    let (len, end) = walk_arm(adj, c, nb);
                    if degrees[end] == 1 && len == 1 {
                        leaf_arms += 1;
                    }
                }
                if leaf_arms != 2 {
                    return TreeShape::Wild;
                }
            }
            TreeShape::Euclidean(DynkinType::D(n - 1))
        }
        _ => TreeShape::Wild,
    }
}

/// Classifies a poset whose Hasse digraph is a tree: the verdict depends only
/// on the underlying tree shape, cross-checked against the Gram spectrum.
pub fn classify_tree(p: &Poset) -> Result<FullClassification, ClassifyError> {
    let h = p.hasse();
    let shape = h.shape_report();
    if !shape.is_tree {
        return Err(ClassifyError::NotATree);
    }
    let adj = h.underlying();
    let expected = recognize_tree_shape(&adj, p.n());
    let spectral = classify_definiteness(p);
    match (expected, spectral) {
        (TreeShape::Dynkin(d), Definiteness::NonNegative { corank: 0 }) => {
            Ok(FullClassification {
                definiteness: Definiteness::NonNegative { corank: 0 },
                dynkin: Some(d),
                method: Method::Tree,
                special_deleted: None,
            })
        }
        (TreeShape::Euclidean(d), Definiteness::NonNegative { corank: 1 }) => {
            let special = special_basis(p)
                .map_err(|e| ClassifyError::InternalDisagreement(e.to_string()))?;
            Ok(FullClassification {
                definiteness: Definiteness::NonNegative { corank: 1 },
                dynkin: Some(d),
                method: Method::Tree,
                special_deleted: special.special_indices,
            })
        }
        (TreeShape::Wild, Definiteness::Indefinite { witness }) => Ok(FullClassification {
            definiteness: Definiteness::Indefinite { witness },
            dynkin: None,
            method: Method::Tree,
            special_deleted: None,
        }),
        (shape, spectral) => Err(ClassifyError::InternalDisagreement(format!(
            "tree shape {shape:?} vs spectrum {spectral:?}"
        ))),
    }
}

/// Decomposition of a one-sink, one-source cycle into its two directed
/// chains, longest first. Lengths count arcs; interior vertices exclude the
/// shared source and sink.
struct CycleChains {
    source: usize,
    sink: usize,
    long_interior: Vec<usize>,
    short_interior: Vec<usize>,
}

impl CycleChains {
    fn p(&self) -> usize {
        self.long_interior.len() + 1
    }

    fn r(&self) -> usize {
        self.short_interior.len() + 1
    }
}

fn split_one_sink_cycle(h: &HasseDigraph, source: usize, sink: usize) -> CycleChains {
    let mut chains: Vec<Vec<usize>> = Vec::new();
    let mut m = h.out[source];
    while m != 0 {
        let first = m.trailing_zeros() as usize;
        m &= m - 1;
        let mut interior = Vec::new();
        let mut cur = first;
        while cur != sink {
            interior.push(cur);
            cur = h.out[cur].trailing_zeros() as usize;
        }
        chains.push(interior);
    }
    debug_assert_eq!(chains.len(), 2);
    let second = chains.pop().unwrap();
    let first = chains.pop().unwrap();
    let (long_interior, short_interior) = if first.len() >= second.len() {
        (first, second)
    } else {
        (second, first)
    };
    CycleChains { source, sink, long_interior, short_interior }
}

/// Witness construction for indefinite one-sink cycles: pad the hand-checked
/// witness of an embedded smaller cycle with zeros. `long_take` interior
/// vertices of the long chain get `long_val`, the first `short_take` of the
/// short chain get `short_val`.
#[allow(clippy::too_many_arguments)]
fn padded_cycle_witness(
    n: usize,
    chains: &CycleChains,
    source_val: i64,
    long_take: usize,
    long_val: i64,
    short_take: usize,
    short_val: i64,
    sink_val: i64,
) -> Vec<BigInt> {
    let mut w = vec![BigInt::zero(); n];
    w[chains.source] = BigInt::from(source_val);
    for &v in chains.long_interior.iter().take(long_take) {
        w[v] = BigInt::from(long_val);
    }
    for &v in chains.short_interior.iter().take(short_take) {
        w[v] = BigInt::from(short_val);
    }
    w[chains.sink] = BigInt::from(sink_val);
    w
}

/// Full classification for connected Hasse digraphs of maximum underlying
/// degree 2: paths, multi-sink cycles, and one-sink cycles split by the
/// lengths (p, r) of their two directed chains.
pub fn classify_deg_le2(h: &HasseDigraph) -> Result<FullClassification, ClassifyError> {
    let shape = h.shape_report();
    if !shape.connected {
        return Err(ClassifyError::Disconnected);
    }
    if shape.max_degree > 2 {
        let vertex = (1..=h.n())
            .find(|&v| (h.out[v - 1] | h.inn[v - 1]).count_ones() as usize > 2)
            .unwrap();
        let degree = (h.out[vertex - 1] | h.inn[vertex - 1]).count_ones() as usize;
        return Err(ClassifyError::DegreeTooHigh { vertex, degree });
    }
    let n = h.n();
    if shape.underlying_is_path {
        return Ok(FullClassification {
            definiteness: Definiteness::NonNegative { corank: 0 },
            dynkin: Some(DynkinType::A(n)),
            method: Method::DegreeLe2,
            special_deleted: None,
        });
    }
    // Connected, 2-regular: one cycle.
    if shape.sinks.len() >= 2 {
        return Ok(FullClassification {
            definiteness: Definiteness::NonNegative { corank: 1 },
            dynkin: Some(DynkinType::A(n - 1)),
            method: Method::DegreeLe2,
            special_deleted: None,
        });
    }
    let source = shape.sources[0] - 1;
    let sink = shape.sinks[0] - 1;
    let chains = split_one_sink_cycle(h, source, sink);
    let (p, r) = (chains.p(), chains.r());
    let verdict = |definiteness, dynkin| {
        Ok(FullClassification {
            definiteness,
            dynkin: Some(dynkin),
            method: Method::DegreeLe2,
            special_deleted: None,
        })
    };
    match (p, r) {
        (_, 1) => verdict(Definiteness::NonNegative { corank: 0 }, DynkinType::A(n)),
        (_, 2) => verdict(Definiteness::NonNegative { corank: 0 }, DynkinType::D(n)),
        (3, 3) => verdict(Definiteness::NonNegative { corank: 0 }, DynkinType::E(6)),
        (4, 3) => verdict(Definiteness::NonNegative { corank: 0 }, DynkinType::E(7)),
        (5, 3) => verdict(Definiteness::NonNegative { corank: 0 }, DynkinType::E(8)),
        (4, 4) => verdict(Definiteness::NonNegative { corank: 1 }, DynkinType::E(7)),
        (6, 3) => verdict(Definiteness::NonNegative { corank: 1 }, DynkinType::E(8)),
        (_, 3) => {
            // p >= 7: an embedded (7,3) cycle plus zero padding is negative.
            let witness = padded_cycle_witness(n, &chains, 11, 6, -3, 2, -7, 10);
            debug_assert!(deg2_witness_is_negative(h, &witness));
            Ok(FullClassification {
                definiteness: Definiteness::Indefinite { witness },
                dynkin: None,
                method: Method::DegreeLe2,
                special_deleted: None,
            })
        }
        _ => {
            // r >= 4 and (p, r) != (4, 4), so p >= 5: embed a (5, 4) cycle.
            let witness = padded_cycle_witness(n, &chains, 11, 4, -4, 3, -5, 9);
            debug_assert!(deg2_witness_is_negative(h, &witness));
            Ok(FullClassification {
                definiteness: Definiteness::Indefinite { witness },
                dynkin: None,
                method: Method::DegreeLe2,
                special_deleted: None,
            })
        }
    }
}

#[cfg(debug_assertions)]
fn deg2_witness_is_negative(h: &HasseDigraph, w: &[BigInt]) -> bool {
    let p = Poset::from_covers(h.n(), &h.arcs()).expect("Hasse arcs are acyclic");
    crate::gram::evaluate_q(&p, w).unwrap().is_negative()
}

#[cfg(not(debug_assertions))]
fn deg2_witness_is_negative(_h: &HasseDigraph, _w: &[BigInt]) -> bool {
    true
}

/// Exact size of `{v in Z^n : q(v) = 1}` for a positive poset, by
/// branch-and-bound: coordinates are fixed one at a time (most comparable
/// vertices first) and a prefix is cut as soon as the exact minimum of q over
/// all real completions exceeds 1. The minima come from precomputed Schur
/// complements of the doubled Gram matrix, scaled to integer matrices.
pub fn root_count(p: &Poset) -> Result<u64, ClassifyError> {
    if classify_definiteness(p) != (Definiteness::NonNegative { corank: 0 }) {
        return Err(ClassifyError::NotPositive);
    }
    let n = p.n();
    let gram = symmetric_gram(p);
    let mut order: Vec<usize> = (0..n).collect();
    let comp_degree: Vec<usize> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && p.comparable(i + 1, j + 1)).count())
        .collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(comp_degree[i]), i));

    // a = doubled Gram in the chosen coordinate order.
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from_integer(gram.get(order[i], order[j]).clone()))
                .collect()
        })
        .collect();
    // scaled[k] = (J, 2d) where J = d * (Schur complement keeping the first
    // k+1 coordinates) is integral; x J xᵗ <= 2d iff some real completion of
    // the prefix keeps the doubled form at or below 2.
    let mut scaled: Vec<(Vec<Vec<BigInt>>, BigInt)> = vec![(Vec::new(), BigInt::zero()); n];
    for s in (1..=n).rev() {
        let mut denom = BigInt::one();
        for row in a.iter().take(s) {
            for e in row.iter().take(s) {
                denom = denom.lcm(e.denom());
            }
        }
        let j: Vec<Vec<BigInt>> = (0..s)
            .map(|x| {
                (0..s)
                    .map(|y| (&a[x][y] * BigRational::from_integer(denom.clone())).to_integer())
                    .collect()
            })
            .collect();
        let threshold = BigInt::from(2) * &denom;
        scaled[s - 1] = (j, threshold);
        if s > 1 {
            // Eliminate coordinate s-1 (positive pivot: the form is positive).
            let last = s - 1;
            let pivot = a[last][last].clone();
            debug_assert!(pivot.is_positive());
            for x in 0..last {
                for y in 0..last {
                    let delta = &a[x][last] * &a[last][y] / &pivot;
                    a[x][y] -= delta;
                }
            }
        }
    }

    let mut x: Vec<BigInt> = Vec::with_capacity(n);
    let mut count = 0u64;
    dfs_roots(&scaled, &mut x, n, &mut count);
    // Only vectors whose first nonzero coordinate is positive were visited.
    Ok(count * 2)
}

fn dfs_roots(
    scaled: &[(Vec<Vec<BigInt>>, BigInt)],
    x: &mut Vec<BigInt>,
    n: usize,
    count: &mut u64,
) {
    let k = x.len();
    let (j, threshold) = &scaled[k];
    // f(t) = qa·t² + 2·qb·t + qc over the scaled Schur matrix of size k+1.
    let qa = j[k][k].clone();
    let mut qb = BigInt::zero();
    for (i, xi) in x.iter().enumerate() {
        qb += &j[k][i] * xi;
    }
    let mut qc = BigInt::zero();
    for (ii, xi) in x.iter().enumerate() {
        for (jj, xj) in x.iter().enumerate() {
            qc += &j[ii][jj] * xi * xj;
        }
    }
    let f = |t: &BigInt| &qa * t * t + BigInt::from(2) * &qb * t + &qc;
    let zero_prefix = x.iter().all(|v| v.is_zero());
    let mut vertex = (-&qb).div_floor(&qa);
    if zero_prefix && vertex.is_negative() {
        vertex = BigInt::zero();
    }
    let mut candidates: Vec<BigInt> = Vec::new();
    if f(&vertex) <= *threshold {
        // Down from the vertex, then up from vertex+1.
        let mut t = vertex.clone();
        loop {
            candidates.push(t.clone());
            let next: BigInt = &t - 1;
            if (zero_prefix && next.is_negative()) || f(&next) > *threshold {
                break;
            }
            t = next;
        }
        let mut t = &vertex + 1;
        while f(&t) <= *threshold {
            candidates.push(t.clone());
            t += 1;
        }
    } else {
        // Convexity: if the floor of the real minimizer fails, only its
        // ceiling can still qualify, and the scan continues upward.
        let mut t = &vertex + 1;
        while f(&t) <= *threshold {
            candidates.push(t.clone());
            t += 1;
        }
    }
    for t in candidates {
        if k + 1 == n {
            if f(&t) == *threshold {
                *count += 1;
            }
        } else {
            x.push(t);
            dfs_roots(scaled, x, n, count);
            x.pop();
        }
    }
}

/// The inverse of the incidence matrix `C` (integer because `C` is
/// unitriangular in any linear extension): the Möbius function of the poset.
pub fn incidence_inverse(p: &Poset) -> Vec<Vec<BigInt>> {
    let n = p.n();
    // mu[i][j] over 0-based labels: sum_{i <= z < j} mu(i, z) = -mu(i, j).
    let mut mu: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    // Process targets by increasing chain level so intermediate values exist.
    for i in 0..n {
        let mut targets: Vec<usize> = (0..n).filter(|&j| j != i && p.le(i + 1, j + 1)).collect();
        targets.sort_by_key(|&j| (0..n).filter(|&z| p.le(i + 1, z + 1) && p.lt(z + 1, j + 1)).count());
        for j in targets {
            let mut s = BigInt::zero();
            for z in 0..n {
                if p.le(i + 1, z + 1) && p.lt(z + 1, j + 1) {
                    s += &mu[i][z];
                }
            }
            mu[i][j] = -s;
        }
    }
    mu
}

/// The doubled Euler form `C⁻¹ + C⁻ᵗ` of a tree poset. `C⁻¹` is verified to
/// encode the Hasse arcs (1 on the diagonal, -1 exactly at arcs) and the
/// congruence `Cᵗ·(C⁻¹ + C⁻ᵗ)·C = C + Cᵗ` is verified by multiplication.
pub fn euler_form_tree(p: &Poset) -> Result<SymIntMatrix, ClassifyError> {
    let h = p.hasse();
    if !h.shape_report().is_tree {
        return Err(ClassifyError::NotATree);
    }
    let n = p.n();
    let inv = incidence_inverse(p);
    let arcs = h.arcs();
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j {
                BigInt::one()
            } else if arcs.contains(&(i + 1, j + 1)) {
                -BigInt::one()
            } else {
                BigInt::zero()
            };
            if inv[i][j] != expect {
                return Err(ClassifyError::InternalDisagreement(format!(
                    "C^-1 entry ({}, {}) = {} does not encode the arcs",
                    i + 1,
                    j + 1,
                    inv[i][j]
                )));
            }
        }
    }
    let doubled: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| &inv[i][j] + &inv[j][i]).collect())
        .collect();
    // Congruence check: Cᵗ·(2G_Q)·C must equal C + Cᵗ.
    let c = p.incidence();
    let big = |x: i64| BigInt::from(x);
    let mut back: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = BigInt::zero();
            for x in 0..n {
                for y in 0..n {
                    s += big(c.get(x, i)) * &doubled[x][y] * big(c.get(y, j));
                }
            }
            back[i][j] = s;
        }
    }
    let gram = symmetric_gram(p);
    for i in 0..n {
        for j in 0..n {
            if back[i][j] != *gram.get(i, j) {
                return Err(ClassifyError::InternalDisagreement(format!(
                    "congruence failed at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    SymIntMatrix::from_rows(doubled)
        .map_err(|e| ClassifyError::InternalDisagreement(e.to_string()))
}

/// An indefinite diagram template: a poset, a hand-checked negative witness,
/// and the arcs lying on hanging paths (whose orientation is free).
#[derive(Debug, Clone)]
pub struct IndefiniteTemplate {
    pub name: &'static str,
    pub poset: Poset,
    pub witness: Vec<BigInt>,
    /// Arcs that may be flipped without affecting indefiniteness.
    pub free_arcs: Vec<(usize, usize)>,
}

impl IndefiniteTemplate {
    fn new(
        name: &'static str,
        n: usize,
        arcs: &[(usize, usize)],
        witness: &[i64],
        free_arcs: &[(usize, usize)],
    ) -> Self {
        IndefiniteTemplate {
            name,
            poset: Poset::from_covers(n, arcs).expect("template arcs are acyclic"),
            witness: witness.iter().map(|&x| BigInt::from(x)).collect(),
            free_arcs: free_arcs.to_vec(),
        }
    }

    /// All posets obtained by flipping subsets of the free arcs; the template
    /// itself is the all-unflipped case.
    pub fn reorientations(&self) -> Vec<Poset> {
        let fixed: Vec<(usize, usize)> = self
            .poset
            .hasse()
            .arcs()
            .into_iter()
            .filter(|a| !self.free_arcs.contains(a))
            .collect();
        let k = self.free_arcs.len();
        (0..(1u64 << k))
            .map(|mask| {
                let mut arcs = fixed.clone();
                for (bit, &(a, b)) in self.free_arcs.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        arcs.push((b, a));
                    } else {
                        arcs.push((a, b));
                    }
                }
                Poset::from_covers(self.poset.n(), &arcs).expect("flipping tree arcs is acyclic")
            })
            .collect()
    }
}

/// The seven minimal indefinite diagram templates with their witnesses.
/// Every poset that matches one of these shapes (up to re-orienting hanging
/// paths) is indefinite.
pub fn indefinite_witness_catalog() -> Vec<IndefiniteTemplate> {
    vec![
        IndefiniteTemplate::new(
            "F1",
            5,
            &[(2, 1), (2, 3), (4, 1), (4, 3), (4, 5)],
            &[-2, 2, -2, 2, -1],
            &[(4, 5)],
        ),
        IndefiniteTemplate::new(
            "F2",
            5,
            &[(4, 2), (4, 3), (5, 2), (5, 3), (2, 1)],
            &[-4, -4, -6, 7, 5],
            &[(2, 1)],
        ),
        IndefiniteTemplate::new(
            "F3",
            9,
            &[(2, 1), (6, 1), (9, 1), (3, 2), (4, 3), (5, 4), (7, 6), (8, 7)],
            &[-20, 4, 4, 4, 4, 5, 5, 5, 9],
            &[(2, 1), (6, 1), (9, 1), (3, 2), (4, 3), (5, 4), (7, 6), (8, 7)],
        ),
        IndefiniteTemplate::new(
            "F4",
            10,
            &[(2, 1), (8, 1), (10, 1), (3, 2), (4, 3), (5, 4), (6, 5), (7, 6), (9, 8)],
            &[-21, 3, 3, 3, 3, 3, 3, 7, 7, 10],
            &[(2, 1), (8, 1), (10, 1), (3, 2), (4, 3), (5, 4), (6, 5), (7, 6), (9, 8)],
        ),
        IndefiniteTemplate::new(
            "F5",
            10,
            &[(2, 1), (1, 9), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 9), (9, 10)],
            &[-7, 5, -2, -2, -2, -2, -2, -2, 5, 4],
            &[(9, 10)],
        ),
        IndefiniteTemplate::new(
            "F6",
            10,
            &[(2, 3), (3, 1), (1, 10), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 9), (9, 10)],
            &[-7, 5, 5, -2, -2, -2, -2, -2, -2, 4],
            &[(2, 3)],
        ),
        IndefiniteTemplate::new(
            "F7",
            10,
            &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (1, 9), (9, 10), (10, 8)],
            &[-7, 2, 2, 2, 2, 2, 2, -7, 5, 4],
            &[],
        ),
    ]
}

/// Dynkin type of a positive connected poset, decided by counting roots and
/// matching against the simply-laced root-system sizes.
fn positive_type_by_roots(p: &Poset) -> Result<DynkinType, ClassifyError> {
    let n = p.n();
    let count = root_count(p)?;
    let nn = n as u64;
    if count == nn * (nn + 1) {
        return Ok(DynkinType::A(n));
    }
    if n >= 4 && count == 2 * nn * (nn - 1) {
        return Ok(DynkinType::D(n));
    }
    match (n, count) {
        (6, 72) => Ok(DynkinType::E(6)),
        (7, 126) => Ok(DynkinType::E(7)),
        (8, 240) => Ok(DynkinType::E(8)),
        _ => Err(ClassifyError::InternalDisagreement(format!(
            "positive form of rank {n} has {count} roots, matching no simply-laced type"
        ))),
    }
}

/// The Gram-spectrum method: definiteness by congruence; for corank > 0,
/// delete a special index set and classify the positive remainder; positive
/// types resolved by root counts.
fn classify_general(p: &Poset) -> Result<FullClassification, ClassifyError> {
    match classify_definiteness(p) {
        Definiteness::Indefinite { witness } => Ok(FullClassification {
            definiteness: Definiteness::Indefinite { witness },
            dynkin: None,
            method: Method::RootCount,
            special_deleted: None,
        }),
        Definiteness::NonNegative { corank: 0 } => Ok(FullClassification {
            definiteness: Definiteness::NonNegative { corank: 0 },
            dynkin: Some(positive_type_by_roots(p)?),
            method: Method::RootCount,
            special_deleted: None,
        }),
        Definiteness::NonNegative { corank } => {
            let special = special_basis(p)
                .map_err(|e| ClassifyError::InternalDisagreement(e.to_string()))?;
            let indices = special.special_indices.expect("special basis carries indices");
            let rest = p.delete_points(&indices).expect("corank < n");
            let dynkin = positive_type_by_roots(&rest)?;
            Ok(FullClassification {
                definiteness: Definiteness::NonNegative { corank },
                dynkin: Some(dynkin),
                method: Method::RootCount,
                special_deleted: Some(indices),
            })
        }
    }
}

/// Dispatcher: runs every applicable classifier (shape fast path, tree,
/// degree <= 2, Gram spectrum), checks that all verdicts agree, and returns
/// the most specific one. For corank > 0 the deleted special indices from the
/// spectrum method are attached if the winning method left them out.
pub fn dynkin_type(p: &Poset) -> Result<FullClassification, ClassifyError> {
    if !p.is_connected() {
        return Err(ClassifyError::Disconnected);
    }
    let h = p.hasse();
    let shape = h.shape_report();
    let mut verdicts: Vec<FullClassification> = Vec::new();
    if let Some(fast) = classify_fast_a(&h)? {
        verdicts.push(fast);
    }
    if shape.is_tree {
        verdicts.push(classify_tree(p)?);
    }
    if shape.max_degree <= 2 {
        verdicts.push(classify_deg_le2(&h)?);
    }
    let general = classify_general(p)?;
    for v in &verdicts {
        if !v.agrees_with(&general) {
            return Err(ClassifyError::InternalDisagreement(format!(
                "{} says {:?}/{:?}, root_count says {:?}/{:?}",
                v.method, v.definiteness, v.dynkin, general.definiteness, general.dynkin
            )));
        }
    }
    let mut best = verdicts.into_iter().next().unwrap_or_else(|| general.clone());
    if best.special_deleted.is_none() {
        best.special_deleted = general.special_deleted;
    }
    Ok(best)
}
