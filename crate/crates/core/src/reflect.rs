//! Hanging-path reflections and their unimodular congruence matrices.
//!
//! A hanging path is a chain of vertices attached to the rest of the Hasse
//! digraph at a single anchor. Reversing all arcs inside the path yields a
//! poset whose incidence matrix is strongly Z-congruent to the original; the
//! congruence is realized by an explicit integer matrix with determinant
//! +-1. Mixed-orientation paths are handled by composing reflections of
//! unidirectional sub-paths, innermost first.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::poset::{IncidenceMatrix, Poset};

/// Errors raised by reflection operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReflectError {
    #[error("LabelOutOfRange: {label} outside 1..={n}")]
    LabelOutOfRange { label: usize, n: usize },
    #[error("InvalidAnchoredPath: {0}")]
    InvalidAnchoredPath(String),
    #[error("NoSuchAnchoredPath: no hanging path is anchored at {anchor}")]
    NoSuchAnchoredPath { anchor: usize },
    #[error("MixedOrientation: the path mixes arc directions; normalize instead")]
    MixedOrientation,
}

/// Arc orientation pattern of a hanging path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    /// Every arc points toward the anchor: it is the unique maximal point of
    /// the sub-poset on the path.
    Inward,
    /// Every arc points away from the anchor: unique minimal point.
    Outward,
    Mixed,
}

impl fmt::Display for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PathKind::Inward => "inward",
            PathKind::Outward => "outward",
            PathKind::Mixed => "mixed",
        };
        f.write_str(s)
    }
}

/// A hanging path: `members` walk from the anchor's neighbor to the free
/// end, which touches nothing outside the path. Labels are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchoredPath {
    pub anchor: usize,
    pub members: Vec<usize>,
    pub kind: PathKind,
}

impl AnchoredPath {
    pub fn free_end(&self) -> usize {
        *self.members.last().expect("anchored paths have at least one member")
    }
}

/// An integer congruence between two incidence matrices:
/// `bᵗ · source · b = target` with `det(b) = +-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceWitness {
    pub b: Vec<Vec<BigInt>>,
    pub source_incidence: IncidenceMatrix,
    pub target_incidence: IncidenceMatrix,
}

impl CongruenceWitness {
    fn identity(p: &Poset) -> Self {
        let n = p.n();
        let b = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        CongruenceWitness {
            b,
            source_incidence: p.incidence(),
            target_incidence: p.incidence(),
        }
    }

    /// Chains two witnesses: the source of `next` must be this target.
    fn compose(self, next: CongruenceWitness) -> CongruenceWitness {
        debug_assert_eq!(self.target_incidence, next.source_incidence);
        CongruenceWitness {
            b: matmul(&self.b, &next.b),
            source_incidence: self.source_incidence,
            target_incidence: next.target_incidence,
        }
    }

    pub fn determinant(&self) -> BigInt {
        int_det(&self.b)
    }

    /// Checks both invariants by exact arithmetic.
    pub fn verify(&self) -> bool {
        let det = self.determinant();
        if det != BigInt::one() && det != -BigInt::one() {
            return false;
        }
        let c_s = incidence_bigint(&self.source_incidence);
        let c_t = incidence_bigint(&self.target_incidence);
        let bt = transpose(&self.b);
        matmul(&matmul(&bt, &c_s), &self.b) == c_t
    }
}

fn incidence_bigint(m: &IncidenceMatrix) -> Vec<Vec<BigInt>> {
    let n = m.n();
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(m.get(i, j))).collect())
        .collect()
}

fn transpose(a: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].clone()).collect()).collect()
}

fn matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for (j, bkj) in b[k].iter().enumerate() {
                if !bkj.is_zero() {
                    out[i][j] += aik * bkj;
                }
            }
        }
    }
    out
}

/// Fraction-free (Bareiss) determinant.
fn int_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut negated = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negated = !negated;
                }
                None => return BigInt::zero(),
            }
        }
        let pivot_row = a[k].clone();
        for row in a.iter_mut().skip(k + 1) {
            let head = row[k].clone();
            for j in k + 1..n {
                let num = &row[j] * &pivot_row[k] - &head * &pivot_row[j];
                row[j] = num / &prev;
            }
        }
        prev = pivot_row[k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negated {
        -d
    } else {
        d
    }
}

/// True when the single Hasse arc between two adjacent vertices points from
/// `closer` to `farther` (0-based labels).
fn ascends(p: &Poset, closer: usize, farther: usize) -> bool {
    p.lt(closer + 1, farther + 1)
}

fn orientation_kind(p: &Poset, anchor0: usize, members0: &[usize]) -> PathKind {
    let mut saw_away = false;
    let mut saw_toward = false;
    let mut closer = anchor0;
    for &m in members0 {
        if ascends(p, closer, m) {
            saw_away = true;
        } else {
            saw_toward = true;
        }
        closer = m;
    }
    match (saw_toward, saw_away) {
        (true, true) => PathKind::Mixed,
        (false, true) => PathKind::Outward,
        _ => PathKind::Inward,
    }
}

/// All maximal hanging paths, each reported once, sorted by (anchor,
/// free end). A poset whose Hasse digraph is a path is anchored at both
/// ends and yields two entries; cycles yield none.
pub fn find_anchored_paths(p: &Poset) -> Vec<AnchoredPath> {
    let h = p.hasse();
    let adj = h.underlying();
    let n = p.n();
    let deg = |v: usize| adj[v].count_ones() as usize;
    let mut out = Vec::new();
    for a in 0..n {
        if deg(a) == 2 {
            continue;
        }
        let mut m = adj[a];
        while m != 0 {
            let nb = m.trailing_zeros() as usize;
            m &= m - 1;
            let mut members = vec![nb];
            let mut prev = a;
            let mut cur = nb;
            while deg(cur) == 2 {
                let nxt = (adj[cur] & !(1u64 << prev)).trailing_zeros() as usize;
                prev = cur;
                cur = nxt;
                members.push(cur);
            }
            if deg(cur) != 1 {
                // The walk ended at a junction (or back at the anchor):
                // a connector, not a hanging path.
                continue;
            }
            let kind = orientation_kind(p, a, &members);
            out.push(AnchoredPath {
                anchor: a + 1,
                members: members.iter().map(|&v| v + 1).collect(),
                kind,
            });
        }
    }
    out.sort_by_key(|ap| (ap.anchor, ap.free_end()));
    out
}

/// The maximal hanging path at `anchor` with the smallest free-end label.
pub fn anchored_path_at(p: &Poset, anchor: usize) -> Result<AnchoredPath, ReflectError> {
    if anchor == 0 || anchor > p.n() {
        return Err(ReflectError::LabelOutOfRange { label: anchor, n: p.n() });
    }
    find_anchored_paths(p)
        .into_iter()
        .find(|ap| ap.anchor == anchor)
        .ok_or(ReflectError::NoSuchAnchoredPath { anchor })
}

/// Validates the path structure against the poset and returns 0-based
/// (anchor, members). The declared kind must match the arc orientations.
fn validate(p: &Poset, ap: &AnchoredPath) -> Result<(usize, Vec<usize>), ReflectError> {
    let n = p.n();
    for &label in std::iter::once(&ap.anchor).chain(ap.members.iter()) {
        if label == 0 || label > n {
            return Err(ReflectError::LabelOutOfRange { label, n });
        }
    }
    if ap.members.is_empty() {
        return Err(ReflectError::InvalidAnchoredPath("no members".into()));
    }
    let mut seen = 0u64;
    for &label in std::iter::once(&ap.anchor).chain(ap.members.iter()) {
        if seen >> (label - 1) & 1 == 1 {
            return Err(ReflectError::InvalidAnchoredPath(format!(
                "vertex {label} appears twice"
            )));
        }
        seen |= 1 << (label - 1);
    }
    let a0 = ap.anchor - 1;
    let members0: Vec<usize> = ap.members.iter().map(|&v| v - 1).collect();
    let adj = p.hasse().underlying();
    let r = members0.len();
    for i in 0..r {
        let m = members0[i];
        let prev = if i == 0 { a0 } else { members0[i - 1] };
        let expected = if i + 1 < r {
            (1u64 << prev) | (1u64 << members0[i + 1])
        } else {
            1u64 << prev
        };
        if adj[m] != expected {
            return Err(ReflectError::InvalidAnchoredPath(format!(
                "vertex {} is not a path vertex hanging at {}",
                m + 1,
                ap.anchor
            )));
        }
    }
    let kind = orientation_kind(p, a0, &members0);
    if kind != ap.kind {
        return Err(ReflectError::InvalidAnchoredPath(format!(
            "declared kind {} but arcs are {}",
            ap.kind, kind
        )));
    }
    Ok((a0, members0))
}

fn flip_path_arcs(p: &Poset, a0: usize, members0: &[usize]) -> Poset {
    let mut in_path = 1u64 << a0;
    for &m in members0 {
        in_path |= 1 << m;
    }
    let arcs: Vec<(usize, usize)> = p
        .hasse()
        .arcs()
        .into_iter()
        .map(|(u, v)| {
            if in_path >> (u - 1) & 1 == 1 && in_path >> (v - 1) & 1 == 1 {
                (v, u)
            } else {
                (u, v)
            }
        })
        .collect();
    Poset::from_covers(p.n(), &arcs).expect("reversing a hanging path keeps the digraph acyclic")
}

/// Reverses every Hasse arc inside {anchor} ∪ members. Applying the
/// reflection twice restores the original poset.
pub fn reflect(p: &Poset, ap: &AnchoredPath) -> Result<Poset, ReflectError> {
    let (a0, members0) = validate(p, ap)?;
    if ap.kind == PathKind::Mixed {
        return Err(ReflectError::MixedOrientation);
    }
    Ok(flip_path_arcs(p, a0, &members0))
}

/// The block reflection matrix in original labels: identity outside the
/// path; the column of member j carries 1 at the anchor row and -1 at the
/// row of the mirrored member (position r+1-j along the path).
fn reflection_matrix(n: usize, a0: usize, members0: &[usize]) -> Vec<Vec<BigInt>> {
    let mut b: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let r = members0.len();
    for j in 0..r {
        let col = members0[j];
        b[col][col] = BigInt::zero();
        b[a0][col] = BigInt::one();
        b[members0[r - 1 - j]][col] = -BigInt::one();
    }
    b
}

/// The unimodular matrix realizing `bᵗ · C_source · b = C_target` for the
/// reflection of a unidirectional hanging path.
pub fn congruence_matrix(p: &Poset, ap: &AnchoredPath) -> Result<CongruenceWitness, ReflectError> {
    let (a0, members0) = validate(p, ap)?;
    if ap.kind == PathKind::Mixed {
        return Err(ReflectError::MixedOrientation);
    }
    let target = flip_path_arcs(p, a0, &members0);
    let witness = CongruenceWitness {
        b: reflection_matrix(p.n(), a0, &members0),
        source_incidence: p.incidence(),
        target_incidence: target.incidence(),
    };
    debug_assert!(witness.verify());
    Ok(witness)
}

/// Re-orients a hanging path of any kind to point outward (every arc away
/// from the anchor), returning the resulting poset and the composed
/// congruence. Mixed paths are resolved by reflecting unidirectional
/// sub-paths innermost (free-end side) first, then flipping the whole path
/// if it ended up inward.
pub fn normalize_anchored_path(
    p: &Poset,
    ap: &AnchoredPath,
) -> Result<(Poset, CongruenceWitness), ReflectError> {
    let (a0, members0) = validate(p, ap)?;
    let mut current = p.clone();
    let mut witness = CongruenceWitness::identity(p);
    let verts: Vec<usize> = std::iter::once(a0).chain(members0.iter().copied()).collect();
    let r = members0.len();
    let step = |current: &mut Poset,
                    witness: &mut CongruenceWitness,
                    anchor0: usize,
                    sub_members0: &[usize]| {
        let sub = AnchoredPath {
            anchor: anchor0 + 1,
            members: sub_members0.iter().map(|&v| v + 1).collect(),
            kind: orientation_kind(current, anchor0, sub_members0),
        };
        let w = congruence_matrix(current, &sub).expect("sub-path is a uniform hanging path");
        *current = reflect(current, &sub).expect("sub-path is a uniform hanging path");
        let old = std::mem::replace(witness, CongruenceWitness::identity(current));
        *witness = old.compose(w);
    };
    // Align every arc to the direction of the anchor-adjacent arc, fixing
    // orientation breaks from the free end inward. The flipped suffix is
    // uniform at each step, so each reflection is a legal one.
    for i in (1..r).rev() {
        let d_here = ascends(&current, verts[i - 1], verts[i]);
        let d_next = ascends(&current, verts[i], verts[i + 1]);
        if d_here != d_next {
            step(&mut current, &mut witness, verts[i], &verts[i + 1..]);
        }
    }
    // The path is now uniform; make it outward.
    if !ascends(&current, verts[0], verts[1]) {
        step(&mut current, &mut witness, a0, &members0);
    }
    Ok((current, witness))
}

/// Normalizes every maximal hanging path to outward orientation, in
/// ascending (anchor, free end) order, and returns the composed congruence.
/// Posets without hanging paths are returned unchanged (identity witness).
pub fn normalize_hanging_paths(p: &Poset) -> (Poset, CongruenceWitness) {
    // The underlying graph never changes, so the path skeleton is stable;
    // only the orientation kinds must be recomputed per step.
    let skeleton: Vec<(usize, Vec<usize>)> = find_anchored_paths(p)
        .into_iter()
        .map(|ap| (ap.anchor, ap.members))
        .collect();
    let mut current = p.clone();
    let mut witness = CongruenceWitness::identity(p);
    for (anchor, members) in skeleton {
        let members0: Vec<usize> = members.iter().map(|&v| v - 1).collect();
        let kind = orientation_kind(&current, anchor - 1, &members0);
        let ap = AnchoredPath { anchor, members, kind };
        let (next, w) =
            normalize_anchored_path(&current, &ap).expect("skeleton paths stay valid");
        current = next;
        witness = witness.compose(w);
    }
    (current, witness)
}
