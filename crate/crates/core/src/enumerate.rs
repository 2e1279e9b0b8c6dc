//! Isomorphism-free poset generation, the almost-path census, and
//! brute-force orientation class counts for paths and cycles.
//!
//! Posets are generated by canonical augmentation: a poset on k+1 points is
//! built from one on k points by adding a new maximal element above a chosen
//! order ideal, and the extension is kept only when the deleted-element test
//! identifies the new element as the canonical last addition. Each
//! isomorphism class is produced exactly once, in a deterministic order.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::dynkin::{dynkin_type, ClassifyError, DynkinType};
use crate::gram::Definiteness;
use crate::poset::{CanonicalCode, Poset};
use crate::reflect::normalize_hanging_paths;

/// Soft ceiling for full poset enumeration; beyond it the class counts grow
/// past desk scale (2.5 million classes at 11 points).
pub const MAX_ENUMERATION_POINTS: usize = 10;

/// Errors raised by enumeration and census operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("ResourceLimit: {0}")]
    ResourceLimit(String),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    /// A census poset classified outside the tabulated categories; this
    /// signals an implementation fault, never an input fault.
    #[error("UnexpectedVerdict: {0}")]
    UnexpectedVerdict(String),
}

/// One census row: connected posets on `n` points where deleting some point
/// leaves a poset whose Hasse diagram is an (undirected) path, tallied by
/// spectral class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRow {
    pub n: usize,
    pub total_qualifying: u64,
    pub positive_a: u64,
    pub positive_d1: u64,
    pub positive_d2: u64,
    pub positive_d3: u64,
    pub positive_e: u64,
    pub principal_a: u64,
    pub principal_e: u64,
    pub indefinite: u64,
}

impl CensusRow {
    fn zero(n: usize) -> Self {
        CensusRow {
            n,
            total_qualifying: 0,
            positive_a: 0,
            positive_d1: 0,
            positive_d2: 0,
            positive_d3: 0,
            positive_e: 0,
            principal_a: 0,
            principal_e: 0,
            indefinite: 0,
        }
    }

    fn absorb(&mut self, other: &CensusRow) {
        self.total_qualifying += other.total_qualifying;
        self.positive_a += other.positive_a;
        self.positive_d1 += other.positive_d1;
        self.positive_d2 += other.positive_d2;
        self.positive_d3 += other.positive_d3;
        self.positive_e += other.positive_e;
        self.principal_a += other.principal_a;
        self.principal_e += other.principal_e;
        self.indefinite += other.indefinite;
    }

    /// Sum of the eight classified columns; equals `total_qualifying`.
    pub fn column_sum(&self) -> u64 {
        self.positive_a
            + self.positive_d1
            + self.positive_d2
            + self.positive_d3
            + self.positive_e
            + self.principal_a
            + self.principal_e
            + self.indefinite
    }
}

/// Orientation counts for a fixed underlying graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientationCount {
    pub n: usize,
    /// Total labeled orientations: 2^(n-1) for paths, 2^n for cycles.
    pub labeled: BigUint,
    /// Digraph isomorphism classes among them.
    pub up_to_iso: u64,
}

// ---- canonical augmentation ----

/// The deleted-element test: the child (built by adding the top label as a
/// maximal point) is canonical iff no maximal point deletes to a poset with
/// a strictly smaller canonical code than the construction parent's.
fn is_canonical_child(child: &Poset, parent_code: &CanonicalCode) -> bool {
    let m = child.n();
    for x in 1..m {
        if child.rows[x - 1] != 1 << (x - 1) {
            continue; // not maximal
        }
        let deleted = child
            .delete_points(&[x])
            .expect("deleting one point of a multi-point poset");
        if deleted.canonical_code() < *parent_code {
            return false;
        }
    }
    true
}

struct Frame {
    poset: Poset,
    code: CanonicalCode,
    ideals: Vec<u64>,
    next: usize,
    accepted: HashSet<CanonicalCode>,
}

impl Frame {
    fn new(poset: Poset) -> Frame {
        let code = poset.canonical_code();
        let ideals = poset.down_closed_masks();
        Frame { poset, code, ideals, next: 0, accepted: HashSet::new() }
    }
}

/// Depth-first stream over isomorphism classes of posets of a fixed size.
/// Deterministic; a fresh stream from [`enumerate_posets`] (or
/// [`PosetStream::restarted`]) replays the same sequence.
pub struct PosetStream {
    target: usize,
    connected_only: bool,
    root: Poset,
    pending_root: bool,
    stack: Vec<Frame>,
}

impl PosetStream {
    fn from_root(root: Poset, target: usize, connected_only: bool) -> PosetStream {
        let at_target = root.n() == target;
        PosetStream {
            target,
            connected_only,
            root: root.clone(),
            pending_root: at_target,
            stack: if at_target { Vec::new() } else { vec![Frame::new(root)] },
        }
    }

    /// A fresh stream replaying this stream's full sequence.
    pub fn restarted(&self) -> PosetStream {
        PosetStream::from_root(self.root.clone(), self.target, self.connected_only)
    }
}

impl Iterator for PosetStream {
    type Item = Poset;

    fn next(&mut self) -> Option<Poset> {
        if self.pending_root {
            self.pending_root = false;
            if !self.connected_only || self.root.is_connected() {
                return Some(self.root.clone());
            }
        }
        while let Some(frame) = self.stack.last_mut() {
            if frame.next >= frame.ideals.len() {
                self.stack.pop();
                continue;
            }
            let ideal = frame.ideals[frame.next];
            frame.next += 1;
            let child = frame.poset.extend_with_max(ideal);
            let child_code = child.canonical_code();
            if !frame.accepted.insert(child_code.clone()) {
                continue;
            }
            if !is_canonical_child(&child, &frame.code) {
                continue;
            }
            if child.n() == self.target {
                if !self.connected_only || child.is_connected() {
                    return Some(child);
                }
            } else {
                self.stack.push(Frame {
                    poset: child,
                    code: child_code,
                    ideals: Vec::new(),
                    next: 0,
                    accepted: HashSet::new(),
                });
                let top = self.stack.last_mut().expect("frame just pushed");
                top.ideals = top.poset.down_closed_masks();
            }
        }
        None
    }
}

/// Streams one representative per isomorphism class of posets on `n`
/// points, optionally restricted to connected ones.
pub fn enumerate_posets(n: usize, connected_only: bool) -> Result<PosetStream, EnumError> {
    if n == 0 {
        return Err(EnumError::ResourceLimit("posets need at least one point".into()));
    }
    if n > MAX_ENUMERATION_POINTS {
        return Err(EnumError::ResourceLimit(format!(
            "enumeration of posets on {n} points exceeds desk scale (limit {MAX_ENUMERATION_POINTS})"
        )));
    }
    Ok(PosetStream::from_root(Poset::singleton(), n, connected_only))
}

// ---- census ----

enum Column {
    PositiveA,
    PositiveD(u8),
    PositiveE,
    PrincipalA,
    PrincipalE,
    Indefinite,
}

/// True when deleting some single point leaves a poset whose Hasse diagram
/// has an underlying path graph.
fn almost_path(p: &Poset) -> bool {
    let n = p.n();
    (1..=n).any(|v| {
        p.delete_points(&[v])
            .expect("n >= 2 leaves a nonempty poset")
            .hasse()
            .shape_report()
            .underlying_is_path
    })
}

/// Splits positive D-type posets by Hasse shape: 1 for trees, 2 for a
/// 4-cycle whose hanging paths attach only at the cycle's source and sink,
/// 3 for every other unicyclic shape.
fn d_shape_class(p: &Poset) -> u8 {
    let h = p.hasse();
    let adj = h.underlying();
    let n = p.n();
    if h.arc_count() == n - 1 {
        return 1;
    }
    // Strip leaves repeatedly; the 2-core is the unique cycle.
    let mut alive: u64 = if n == 64 { !0 } else { (1 << n) - 1 };
    loop {
        let mut removed = false;
        for v in 0..n {
            if alive >> v & 1 == 1 && (adj[v] & alive).count_ones() == 1 {
                alive &= !(1 << v);
                removed = true;
            }
        }
        if !removed {
            break;
        }
    }
    if alive.count_ones() != 4 {
        return 3;
    }
    let mut source = None;
    let mut sink = None;
    let mut middles_clean = true;
    let mut m = alive;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        let out_core = (h.out[v] & alive).count_ones();
        let in_core = (h.inn[v] & alive).count_ones();
        match (out_core, in_core) {
            (2, 0) => source = Some(v),
            (0, 2) => sink = Some(v),
            (1, 1) => {
                if adj[v].count_ones() != 2 {
                    middles_clean = false; // something hangs at a middle
                }
            }
            _ => return 3,
        }
    }
    let (source, sink) = match (source, sink) {
        (Some(s), Some(t)) => (s, t),
        _ => return 3,
    };
    if !middles_clean {
        return 3;
    }
    // Off-cycle vertices must form paths: degree <= 2 everywhere outside
    // the core, at most one path hanging at each of source and sink.
    for v in 0..n {
        if alive >> v & 1 == 0 && adj[v].count_ones() > 2 {
            return 3;
        }
    }
    if adj[source].count_ones() > 3 || adj[sink].count_ones() > 3 {
        return 3;
    }
    2
}

fn census_column(p: &Poset) -> Result<Option<Column>, EnumError> {
    if !p.is_connected() || !almost_path(p) {
        return Ok(None);
    }
    let full = dynkin_type(p)?;
    let column = match (&full.definiteness, &full.dynkin) {
        (Definiteness::Indefinite { .. }, _) => Column::Indefinite,
        (Definiteness::NonNegative { corank: 0 }, Some(DynkinType::A(_))) => Column::PositiveA,
        (Definiteness::NonNegative { corank: 0 }, Some(DynkinType::D(_))) => {
            Column::PositiveD(d_shape_class(p))
        }
        (Definiteness::NonNegative { corank: 0 }, Some(DynkinType::E(_))) => Column::PositiveE,
        (Definiteness::NonNegative { corank: 1 }, Some(DynkinType::A(_))) => Column::PrincipalA,
        (Definiteness::NonNegative { corank: 1 }, Some(DynkinType::E(_))) => Column::PrincipalE,
        (Definiteness::NonNegative { corank }, dynkin) => {
            return Err(EnumError::UnexpectedVerdict(format!(
                "census poset {:?} is non-negative with corank {corank} and type {dynkin:?}, \
                 outside the tabulated columns",
                p
            )));
        }
    };
    Ok(Some(column))
}

struct CensusPartial {
    row: CensusRow,
    principal_e_normalized: HashSet<CanonicalCode>,
}

impl CensusPartial {
    fn zero(n: usize) -> Self {
        CensusPartial { row: CensusRow::zero(n), principal_e_normalized: HashSet::new() }
    }

    fn record(&mut self, p: &Poset, column: Column) {
        self.row.total_qualifying += 1;
        match column {
            Column::PositiveA => self.row.positive_a += 1,
            Column::PositiveD(1) => self.row.positive_d1 += 1,
            Column::PositiveD(2) => self.row.positive_d2 += 1,
            Column::PositiveD(_) => self.row.positive_d3 += 1,
            Column::PositiveE => self.row.positive_e += 1,
            Column::PrincipalA => self.row.principal_a += 1,
            Column::PrincipalE => {
                self.row.principal_e += 1;
                let (normed, _) = normalize_hanging_paths(p);
                self.principal_e_normalized.insert(normed.canonical_code());
            }
            Column::Indefinite => self.row.indefinite += 1,
        }
    }

    fn absorb(&mut self, other: CensusPartial) {
        self.row.absorb(&other.row);
        self.principal_e_normalized.extend(other.principal_e_normalized);
    }
}

fn census_item(root: Poset, n: usize) -> Result<CensusPartial, EnumError> {
    let mut partial = CensusPartial::zero(n);
    for p in PosetStream::from_root(root, n, false) {
        if let Some(column) = census_column(&p)? {
            partial.record(&p, column);
        }
    }
    Ok(partial)
}

/// Census row plus the count of principal E classes remaining after every
/// hanging path is re-oriented outward (identification by isomorphism of
/// the normalized posets). The row itself counts raw isomorphism classes.
pub fn census_detailed(n: usize, jobs: usize) -> Result<(CensusRow, u64), EnumError> {
    if !(4..=9).contains(&n) {
        return Err(EnumError::ResourceLimit(format!(
            "census covers 4..=9 points at desk scale; {n} requested"
        )));
    }
    let jobs = jobs.max(1);
    // Split the generation tree at a fixed shallow level; every work item is
    // an independent subtree and the merge is commutative addition, so the
    // result is identical for any worker count.
    let split = n.min(6);
    let roots: Vec<Poset> = PosetStream::from_root(Poset::singleton(), split, false).collect();
    let partials: Vec<Result<CensusPartial, EnumError>> = if jobs == 1 {
        roots.into_iter().map(|r| census_item(r, n)).collect()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| {
                use rayon::prelude::*;
                roots.into_par_iter().map(|r| census_item(r, n)).collect()
            }),
            // The result does not depend on the worker count.
            Err(_) => roots.into_iter().map(|r| census_item(r, n)).collect(),
        }
    };
    let mut total = CensusPartial::zero(n);
    for partial in partials {
        total.absorb(partial?);
    }
    debug_assert_eq!(total.row.column_sum(), total.row.total_qualifying);
    Ok((total.row, total.principal_e_normalized.len() as u64))
}

/// Tallies all connected posets on `n` points that become a path after
/// deleting one point, classified by definiteness, corank and Dynkin type.
pub fn census(n: usize, jobs: usize) -> Result<CensusRow, EnumError> {
    census_detailed(n, jobs).map(|(row, _)| row)
}

// ---- orientation orbits ----

const MAX_ORIENTATION_POINTS: usize = 24;

fn orientation_size_check(n: usize, min: usize, what: &str) -> Result<(), EnumError> {
    if n < min {
        return Err(EnumError::ResourceLimit(format!("{what} need at least {min} points")));
    }
    if n > MAX_ORIENTATION_POINTS {
        return Err(EnumError::ResourceLimit(format!(
            "orientation enumeration on {n} points exceeds the 2^{MAX_ORIENTATION_POINTS} limit"
        )));
    }
    Ok(())
}

/// Spatial reversal of a path orientation: reverse the edge order and flip
/// every direction.
fn path_reversal(mask: u32, bits: usize) -> u32 {
    if bits == 0 {
        return 0;
    }
    (!mask).reverse_bits() >> (32 - bits)
}

/// Counts arc orientations of the path on `n` vertices up to digraph
/// isomorphism (the reversal symmetry).
pub fn enumerate_path_orientations(n: usize) -> Result<OrientationCount, EnumError> {
    orientation_size_check(n, 1, "paths")?;
    let bits = n - 1;
    let mut classes = 0u64;
    for mask in 0..(1u32 << bits) {
        if mask <= path_reversal(mask, bits) {
            classes += 1;
        }
    }
    Ok(OrientationCount { n, labeled: BigUint::one() << bits, up_to_iso: classes })
}

fn rotate(mask: u32, k: usize, n: usize) -> u32 {
    let wrap = if n == 32 { !0 } else { (1u32 << n) - 1 };
    if k == 0 {
        return mask & wrap;
    }
    ((mask << k) | (mask >> (n - k))) & wrap
}

/// Minimal image of a cycle orientation under rotations and the vertex
/// reflection (which also flips arc directions).
fn cycle_canonical(mask: u32, n: usize) -> u32 {
    let reflected = (!mask).reverse_bits() >> (32 - n);
    let mut best = u32::MAX;
    for k in 0..n {
        best = best.min(rotate(mask, k, n));
        best = best.min(rotate(reflected, k, n));
    }
    best
}

/// Counts arc orientations of the cycle on `n` vertices up to digraph
/// isomorphism (the dihedral action on the underlying cycle).
pub fn enumerate_cycle_orientations(n: usize) -> Result<OrientationCount, EnumError> {
    orientation_size_check(n, 3, "cycles")?;
    let mut classes = 0u64;
    for mask in 0..(1u32 << n) {
        if mask == cycle_canonical(mask, n) {
            classes += 1;
        }
    }
    Ok(OrientationCount { n, labeled: BigUint::one() << n, up_to_iso: classes })
}

/// Orientation classes of the cycle that are acyclic as digraphs: all
/// classes except the single fully rotational one.
pub fn count_acyclic_cycle_orientations(n: usize) -> Result<u64, EnumError> {
    let all = enumerate_cycle_orientations(n)?;
    Ok(all.up_to_iso - 1)
}
