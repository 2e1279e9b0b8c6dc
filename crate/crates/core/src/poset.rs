//! Finite posets as bitset incidence rows, Hasse digraphs, shape reports and
//! canonical codes.
//!
//! A poset lives on points `1..=n` (n between 1 and [`MAX_POINTS`]). The
//! incidence relation is stored row-wise: bit `j` of row `i` says `i+1 <= j+1`.
//! Rows are always reflexive, antisymmetric and transitively closed; every
//! constructor either establishes or verifies this.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Hard limit on the number of points (one `u64` bit row per point).
pub const MAX_POINTS: usize = 64;

/// Errors raised by poset construction, parsing and point surgery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    /// Posets are nonempty by definition here; `n = 0` is rejected.
    #[error("SizeZero: a poset needs at least one point")]
    SizeZero,
    /// More points than the bitset representation supports.
    #[error("TooLarge: n = {0} exceeds the limit of {MAX_POINTS} points")]
    TooLarge(usize),
    /// A label outside `1..=n` appeared in input.
    #[error("LabelOutOfRange: label {label} is outside 1..={n}")]
    LabelOutOfRange { label: usize, n: usize },
    /// The cover list closes into a directed cycle (labels listed).
    #[error("DirectedCycle: cover arcs form a cycle through {0:?}")]
    DirectedCycle(Vec<usize>),
    /// Incidence matrix misses a diagonal 1.
    #[error("NotReflexive: entry ({0}, {0}) is not 1")]
    NotReflexive(usize),
    /// Incidence matrix relates two distinct points both ways.
    #[error("NotAntisymmetric: both ({0}, {1}) and ({1}, {0}) are 1")]
    NotAntisymmetric(usize, usize),
    /// Incidence matrix has a broken triple: `i <= j` and `j <= k` but not `i <= k`.
    #[error("NotTransitive: ({0}, {1}) and ({1}, {2}) hold but ({0}, {2}) does not")]
    NotTransitive(usize, usize, usize),
    /// Incidence matrix entry other than 0 or 1.
    #[error("BadEntry: entry ({i}, {j}) = {value}, expected 0 or 1")]
    BadEntry { i: usize, j: usize, value: i64 },
    /// Incidence matrix rows of unequal length.
    #[error("NotSquare: incidence matrix must be square")]
    NotSquare,
    /// Point deletion would remove every point.
    #[error("EmptyResult: deleting all points leaves nothing")]
    EmptyResult,
    /// Malformed textual or JSON input.
    #[error("Parse: {0}")]
    Parse(String),
}

/// Dense incidence matrix `C` with `c[i][j] = 1` iff `i+1 <= j+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    entries: Vec<Vec<i64>>,
}

impl IncidenceMatrix {
    /// Wraps a square 0/1 matrix without poset-axiom checks (those live in
    /// [`Poset::from_incidence`]).
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self, PosetError> {
        let n = entries.len();
        if n == 0 {
            return Err(PosetError::SizeZero);
        }
        if entries.iter().any(|r| r.len() != n) {
            return Err(PosetError::NotSquare);
        }
        Ok(IncidenceMatrix { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }
}

impl fmt::Display for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{e}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Canonical form of a poset: a byte string equal for exactly the isomorphic
/// posets. Usable as a hash/set key and totally ordered.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(pub Vec<u8>);

/// Input formats understood by the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// Line-oriented: first `n`, then one `i j` cover arc per line, `#` comments.
    Text,
    /// `{"n": 4, "covers": [[2,1],[2,4]]}`.
    Json,
}

/// A finite poset on points `1..=n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poset {
    pub(crate) n: usize,
    /// `rows[i]` bit `j`: `i+1 <= j+1`. Reflexive and transitively closed.
    pub(crate) rows: Vec<u64>,
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poset(n={}, covers={:?})", self.n, self.cover_arcs())
    }
}

fn check_size(n: usize) -> Result<(), PosetError> {
    if n == 0 {
        return Err(PosetError::SizeZero);
    }
    if n > MAX_POINTS {
        return Err(PosetError::TooLarge(n));
    }
    Ok(())
}

impl Poset {
    /// Builds the poset generated by a list of cover arcs `(i, j)` meaning
    /// `i < j`. The relation is closed transitively; arcs may be redundant.
    pub fn from_covers(n: usize, covers: &[(usize, usize)]) -> Result<Self, PosetError> {
        check_size(n)?;
        let mut adj = vec![0u64; n];
        for &(a, b) in covers {
            for label in [a, b] {
                if label == 0 || label > n {
                    return Err(PosetError::LabelOutOfRange { label, n });
                }
            }
            if a == b {
                return Err(PosetError::DirectedCycle(vec![a]));
            }
            adj[a - 1] |= 1u64 << (b - 1);
        }
        // Kahn's algorithm: a leftover vertex with positive in-degree is on a cycle.
        let mut indeg = vec![0usize; n];
        for i in 0..n {
            let mut m = adj[i];
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                indeg[j] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(i) = queue.pop() {
            topo.push(i);
            let mut m = adj[i];
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    queue.push(j);
                }
            }
        }
        if topo.len() < n {
            let stuck: Vec<usize> = (0..n).filter(|&i| indeg[i] > 0).map(|i| i + 1).collect();
            return Err(PosetError::DirectedCycle(stuck));
        }
        // Close transitively in reverse topological order.
        let mut rows = vec![0u64; n];
        for &i in topo.iter().rev() {
            let mut r = 1u64 << i;
            let mut m = adj[i];
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                r |= rows[j];
            }
            rows[i] = r;
        }
        Ok(Poset { n, rows })
    }

    /// Validates a full incidence matrix against the poset axioms and wraps it.
    /// Axiom failures carry 1-based witness points.
    pub fn from_incidence(m: &IncidenceMatrix) -> Result<Self, PosetError> {
        let n = m.n();
        check_size(n)?;
        let mut rows = vec![0u64; n];
        for i in 0..n {
            for j in 0..n {
                match m.get(i, j) {
                    0 => {}
                    1 => rows[i] |= 1u64 << j,
                    value => return Err(PosetError::BadEntry { i: i + 1, j: j + 1, value }),
                }
            }
        }
        for i in 0..n {
            if rows[i] & (1u64 << i) == 0 {
                return Err(PosetError::NotReflexive(i + 1));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[i] >> j & 1 == 1 && rows[j] >> i & 1 == 1 {
                    return Err(PosetError::NotAntisymmetric(i + 1, j + 1));
                }
            }
        }
        for i in 0..n {
            let mut m1 = rows[i];
            while m1 != 0 {
                let j = m1.trailing_zeros() as usize;
                m1 &= m1 - 1;
                if rows[j] & !rows[i] != 0 {
                    let k = (rows[j] & !rows[i]).trailing_zeros() as usize;
                    return Err(PosetError::NotTransitive(i + 1, j + 1, k + 1));
                }
            }
        }
        Ok(Poset { n, rows })
    }

    /// Single point, the unique 1-poset.
    pub(crate) fn singleton() -> Self {
        Poset { n: 1, rows: vec![1] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `i <= j` (1-based labels).
    pub fn le(&self, i: usize, j: usize) -> bool {
        assert!(i >= 1 && i <= self.n && j >= 1 && j <= self.n);
        self.rows[i - 1] >> (j - 1) & 1 == 1
    }

    /// `i < j` strictly.
    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.le(i, j)
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.le(i, j) || self.le(j, i)
    }

    /// Predecessor bit columns: bit `i` of entry `j` says `i+1 <= j+1`.
    pub(crate) fn cols(&self) -> Vec<u64> {
        let mut cols = vec![0u64; self.n];
        for i in 0..self.n {
            let mut m = self.rows[i];
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                cols[j] |= 1u64 << i;
            }
        }
        cols
    }

    pub fn incidence(&self) -> IncidenceMatrix {
        let entries = (0..self.n)
            .map(|i| (0..self.n).map(|j| (self.rows[i] >> j & 1) as i64).collect())
            .collect();
        IncidenceMatrix { entries }
    }

    /// The opposite poset (relation transposed). `q` is invariant under this.
    pub fn opposite(&self) -> Poset {
        Poset { n: self.n, rows: self.cols() }
    }

    /// Cover arcs `(i, j)`: `i < j` with nothing strictly between.
    pub(crate) fn cover_arcs(&self) -> Vec<(usize, usize)> {
        let cols = self.cols();
        let mut arcs = Vec::new();
        for i in 0..self.n {
            let strict = self.rows[i] & !(1u64 << i);
            let mut m = strict;
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                let between = strict & (cols[j] & !(1u64 << j));
                if between == 0 {
                    arcs.push((i + 1, j + 1));
                }
            }
        }
        arcs.sort_unstable();
        arcs
    }

    /// Hasse digraph: the transitive reduction of the strict order.
    pub fn hasse(&self) -> HasseDigraph {
        let mut out = vec![0u64; self.n];
        let mut inn = vec![0u64; self.n];
        for (a, b) in self.cover_arcs() {
            out[a - 1] |= 1u64 << (b - 1);
            inn[b - 1] |= 1u64 << (a - 1);
        }
        HasseDigraph { n: self.n, out, inn }
    }

    /// Connectivity of the comparability graph (equivalently of the Hasse
    /// diagram viewed as an undirected graph).
    pub fn is_connected(&self) -> bool {
        let cols = self.cols();
        let adj: Vec<u64> =
            (0..self.n).map(|i| (self.rows[i] | cols[i]) & !(1u64 << i)).collect();
        reachable_mask(&adj, 0).count_ones() as usize == self.n
    }

    /// Induced subposet after deleting the given 1-based points. Remaining
    /// points are relabeled `1..=m` preserving their relative label order.
    pub fn delete_points(&self, points: &[usize]) -> Result<Poset, PosetError> {
        let mut kill = 0u64;
        for &p in points {
            if p == 0 || p > self.n {
                return Err(PosetError::LabelOutOfRange { label: p, n: self.n });
            }
            kill |= 1u64 << (p - 1);
        }
        let keep: Vec<usize> = (0..self.n).filter(|&i| kill >> i & 1 == 0).collect();
        if keep.is_empty() {
            return Err(PosetError::EmptyResult);
        }
        Ok(self.restrict(&keep))
    }

    /// Induced subposet on the given 0-based vertices, in the given order.
    pub(crate) fn restrict(&self, keep: &[usize]) -> Poset {
        let m = keep.len();
        let mut rows = vec![0u64; m];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                if self.rows[i] >> j & 1 == 1 {
                    rows[a] |= 1u64 << b;
                }
            }
        }
        Poset { n: m, rows }
    }

    /// All down-closed subsets as bit masks, ascending. Requires `n <= 20`.
    pub(crate) fn down_closed_masks(&self) -> Vec<u64> {
        assert!(self.n <= 20, "ideal enumeration is exponential in n");
        let cols = self.cols();
        let strict_cols: Vec<u64> =
            (0..self.n).map(|i| cols[i] & !(1u64 << i)).collect();
        let mut out = Vec::new();
        'mask: for mask in 0..(1u64 << self.n) {
            let mut m = mask;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                if strict_cols[i] & !mask != 0 {
                    continue 'mask;
                }
            }
            out.push(mask);
        }
        out
    }

    /// Adds a new maximal point `n+1` whose strict down-set is `mask`
    /// (which must be down-closed).
    pub(crate) fn extend_with_max(&self, mask: u64) -> Poset {
        let n = self.n + 1;
        debug_assert!(n <= MAX_POINTS);
        let mut rows = Vec::with_capacity(n);
        let newbit = 1u64 << (n - 1);
        for i in 0..self.n {
            let mut r = self.rows[i];
            if mask >> i & 1 == 1 {
                r |= newbit;
            }
            rows.push(r);
        }
        rows.push(newbit);
        Poset { n, rows }
    }

    /// Canonical code: shared by exactly the isomorphic posets.
    pub fn canonical_code(&self) -> CanonicalCode {
        self.canonical_form().0
    }

    /// Canonical code plus one labeling achieving it: `perm[k]` is the 0-based
    /// vertex placed at canonical position `k`.
    pub(crate) fn canonical_form(&self) -> (CanonicalCode, Vec<usize>) {
        let perm = canonical_labeling(self);
        (code_for_labeling(self, &perm), perm)
    }

    // ---- textual formats ----

    /// Parses the line format: optional `#` comments, first number `n`, then
    /// one `i j` cover arc per line.
    pub fn parse_text(input: &str) -> Result<Poset, PosetError> {
        let mut n: Option<usize> = None;
        let mut covers = Vec::new();
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut nums = Vec::new();
            for tok in line.split_whitespace() {
                let v: usize = tok.parse().map_err(|_| {
                    PosetError::Parse(format!("line {}: bad number {tok:?}", lineno + 1))
                })?;
                nums.push(v);
            }
            match (n, nums.as_slice()) {
                (None, [size]) => n = Some(*size),
                (None, _) => {
                    return Err(PosetError::Parse(format!(
                        "line {}: expected the point count first",
                        lineno + 1
                    )))
                }
                (Some(_), [a, b]) => covers.push((*a, *b)),
                (Some(_), _) => {
                    return Err(PosetError::Parse(format!(
                        "line {}: expected a cover arc `i j`",
                        lineno + 1
                    )))
                }
            }
        }
        let n = n.ok_or_else(|| PosetError::Parse("empty input".into()))?;
        Poset::from_covers(n, &covers)
    }

    /// Parses `{"n": int, "covers": [[i, j], ...]}`.
    pub fn parse_json(input: &str) -> Result<Poset, PosetError> {
        let value: serde_json::Value = serde_json::from_str(input)
            .map_err(|e| PosetError::Parse(format!("invalid JSON: {e}")))?;
        let n = value
            .get("n")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| PosetError::Parse("missing integer field \"n\"".into()))?
            as usize;
        let mut covers = Vec::new();
        let list = value
            .get("covers")
            .and_then(|v| v.as_array())
            .ok_or_else(|| PosetError::Parse("missing array field \"covers\"".into()))?;
        for pair in list {
            let arr = pair.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
                PosetError::Parse("covers entries must be two-element arrays".into())
            })?;
            let a = arr[0].as_u64().ok_or_else(|| PosetError::Parse("bad cover label".into()))?;
            let b = arr[1].as_u64().ok_or_else(|| PosetError::Parse("bad cover label".into()))?;
            covers.push((a as usize, b as usize));
        }
        Poset::from_covers(n, &covers)
    }

    /// Detects the format from the first non-space character.
    pub fn parse_auto(input: &str) -> Result<(Poset, InputFormat), PosetError> {
        if input.trim_start().starts_with('{') {
            Ok((Poset::parse_json(input)?, InputFormat::Json))
        } else {
            Ok((Poset::parse_text(input)?, InputFormat::Text))
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (a, b) in self.cover_arcs() {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }

    pub fn to_json(&self) -> String {
        let covers: Vec<serde_json::Value> = self
            .cover_arcs()
            .into_iter()
            .map(|(a, b)| serde_json::json!([a, b]))
            .collect();
        serde_json::json!({ "n": self.n, "covers": covers }).to_string()
    }

    pub fn render(&self, format: InputFormat) -> String {
        match format {
            InputFormat::Text => self.to_text(),
            InputFormat::Json => self.to_json(),
        }
    }
}

/// BFS over bit-mask adjacency starting from `start`.
pub(crate) fn reachable_mask(adj: &[u64], start: usize) -> u64 {
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u64;
        let mut m = frontier;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            next |= adj[i];
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen
}

/// The Hasse digraph of a poset: vertices `1..=n`, arcs the cover relation.
/// Acyclic and transitively reduced by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HasseDigraph {
    pub(crate) n: usize,
    pub(crate) out: Vec<u64>,
    pub(crate) inn: Vec<u64>,
}

/// Linear-time shape facts about a Hasse digraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeReport {
    pub connected: bool,
    /// Underlying (undirected) degrees, ascending.
    pub degree_sequence: Vec<usize>,
    pub max_degree: usize,
    /// Points with no incoming arc (minimal points), ascending labels.
    pub sources: Vec<usize>,
    /// Points with no outgoing arc (maximal points), ascending labels.
    pub sinks: Vec<usize>,
    /// All arcs aligned along a single path (one source, one sink).
    pub is_oriented_path: bool,
    /// Every underlying degree equals 2.
    pub is_two_regular: bool,
    /// Connected and 2-regular: the underlying graph is one cycle.
    pub underlying_is_cycle: bool,
    /// The underlying graph is a path (any arc orientations).
    pub underlying_is_path: bool,
    /// Connected with exactly `n - 1` underlying edges.
    pub is_tree: bool,
}

impl HasseDigraph {
    /// Wraps raw arcs after checking labels and acyclicity only. Callers are
    /// responsible for transitive reducedness; poset-derived digraphs always
    /// have it, tests may deliberately not.
    #[cfg(test)]
    pub(crate) fn from_arcs_acyclic(
        n: usize,
        arcs: &[(usize, usize)],
    ) -> Result<HasseDigraph, PosetError> {
        // `from_covers` validates labels and rejects cycles.
        Poset::from_covers(n, arcs)?;
        let mut out = vec![0u64; n];
        let mut inn = vec![0u64; n];
        for &(a, b) in arcs {
            out[a - 1] |= 1u64 << (b - 1);
            inn[b - 1] |= 1u64 << (a - 1);
        }
        Ok(HasseDigraph { n, out, inn })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Arcs `(i, j)` with `i` covered-below `j`, ascending.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs = Vec::new();
        for i in 0..self.n {
            let mut m = self.out[i];
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                arcs.push((i + 1, j + 1));
            }
        }
        arcs.sort_unstable();
        arcs
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|m| m.count_ones() as usize).sum()
    }

    /// Underlying undirected adjacency masks.
    pub(crate) fn underlying(&self) -> Vec<u64> {
        (0..self.n).map(|i| self.out[i] | self.inn[i]).collect()
    }

    pub fn shape_report(&self) -> ShapeReport {
        let n = self.n;
        let adj = self.underlying();
        let degrees: Vec<usize> = adj.iter().map(|m| m.count_ones() as usize).collect();
        let max_degree = degrees.iter().copied().max().unwrap_or(0);
        let edge_count = degrees.iter().sum::<usize>() / 2;
        let connected = reachable_mask(&adj, 0).count_ones() as usize == n;
        let sources: Vec<usize> =
            (0..n).filter(|&i| self.inn[i] == 0).map(|i| i + 1).collect();
        let sinks: Vec<usize> = (0..n).filter(|&i| self.out[i] == 0).map(|i| i + 1).collect();
        let leaf_count = degrees.iter().filter(|&&d| d == 1).count();
        let underlying_is_path = connected
            && max_degree <= 2
            && (n == 1 || (leaf_count == 2 && edge_count == n - 1));
        let is_two_regular = n > 0 && degrees.iter().all(|&d| d == 2);
        let underlying_is_cycle = connected && is_two_regular;
        let is_oriented_path = underlying_is_path && sources.len() == 1 && sinks.len() == 1;
        let is_tree = connected && edge_count == n - 1;
        let mut degree_sequence = degrees;
        degree_sequence.sort_unstable();
        ShapeReport {
            connected,
            degree_sequence,
            max_degree,
            sources,
            sinks,
            is_oriented_path,
            is_two_regular,
            underlying_is_cycle,
            underlying_is_path,
            is_tree,
        }
    }
}

// ---- canonical labeling ----
//
// Partition refinement (degrees of the full relation, iterated neighbor color
// multisets) followed by backtracking over color-respecting labelings. The
// code is the lexicographically least bit stream of relation entries in
// placement order; twins (points interchangeable by an automorphism that
// fixes everything else) are tried only once per search node.

/// Longest-chain level of each point: 0 for minimal points, else one more
/// than the deepest strict predecessor.
fn chain_levels(p: &Poset, cols: &[u64]) -> Vec<u32> {
    let n = p.n;
    let strict: Vec<u64> = (0..n).map(|i| cols[i] & !(1u64 << i)).collect();
    // Ascending down-set size is a topological order (down-sets nest strictly).
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| strict[i].count_ones());
    let mut level = vec![0u32; n];
    for &i in &order {
        let mut m = strict[i];
        while m != 0 {
            let j = m.trailing_zeros() as usize;
            m &= m - 1;
            level[i] = level[i].max(level[j] + 1);
        }
    }
    level
}

fn refine_colors(p: &Poset) -> Vec<u32> {
    let n = p.n;
    let cols = p.cols();
    let level = chain_levels(p, &cols);
    let mut color: Vec<u32> = {
        let keys: Vec<(u32, u32, u32)> = (0..n)
            .map(|i| {
                let down = (cols[i] & !(1u64 << i)).count_ones();
                let up = (p.rows[i] & !(1u64 << i)).count_ones();
                (down, up, level[i])
            })
            .collect();
        dense_rank(&keys)
    };
    loop {
        let keys: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..n)
            .map(|i| {
                let mut ups = Vec::new();
                let mut m = p.rows[i] & !(1u64 << i);
                while m != 0 {
                    let j = m.trailing_zeros() as usize;
                    m &= m - 1;
                    ups.push(color[j]);
                }
                ups.sort_unstable();
                let mut downs = Vec::new();
                let mut m = cols[i] & !(1u64 << i);
                while m != 0 {
                    let j = m.trailing_zeros() as usize;
                    m &= m - 1;
                    downs.push(color[j]);
                }
                downs.sort_unstable();
                (color[i], ups, downs)
            })
            .collect();
        let next = dense_rank(&keys);
        if next == color {
            return color;
        }
        color = next;
    }
}

fn dense_rank<K: Ord + Clone>(keys: &[K]) -> Vec<u32> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("key present") as u32)
        .collect()
}

/// Equivalence classes of points swappable by a transposition automorphism:
/// identical rows and columns once both points' own bits are masked out.
fn twin_classes(p: &Poset) -> Vec<u32> {
    let cols = p.cols();
    let keys: Vec<(u64, u64)> = (0..p.n)
        .map(|i| (p.rows[i] & !(1u64 << i), cols[i] & !(1u64 << i)))
        .collect();
    dense_rank(&keys)
}

struct CanonSearch<'a> {
    p: &'a Poset,
    /// Color demanded at each canonical position.
    pos_color: Vec<u32>,
    color: Vec<u32>,
    twin: Vec<u32>,
    cur: Vec<u64>,
    perm: Vec<usize>,
    used: u64,
    best: Option<(Vec<u64>, Vec<usize>)>,
}

/// Lexicographic comparison of the first `bits` stream bits (MSB-first words).
fn cmp_prefix(a: &[u64], b: &[u64], bits: usize) -> Ordering {
    let full = bits / 64;
    for w in 0..full {
        match a[w].cmp(&b[w]) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    let rem = bits % 64;
    if rem == 0 {
        return Ordering::Equal;
    }
    let mask = !0u64 << (64 - rem);
    (a[full] & mask).cmp(&(b[full] & mask))
}

#[inline]
fn write_bit(words: &mut [u64], idx: usize, value: bool) {
    let w = idx / 64;
    let b = 63 - (idx % 64);
    if value {
        words[w] |= 1u64 << b;
    } else {
        words[w] &= !(1u64 << b);
    }
}

impl<'a> CanonSearch<'a> {
    fn place(&mut self, depth: usize) {
        let n = self.p.n;
        if depth == n {
            let better = match &self.best {
                None => true,
                Some((b, _)) => cmp_prefix(&self.cur, b, n * (n - 1)) == Ordering::Less,
            };
            if better {
                self.best = Some((self.cur.clone(), self.perm.clone()));
            }
            return;
        }
        let want = self.pos_color[depth];
        let base = depth * depth.saturating_sub(1);
        let mut tried_twins: Vec<u32> = Vec::new();
        for v in 0..n {
            if self.used >> v & 1 == 1 || self.color[v] != want {
                continue;
            }
            if tried_twins.contains(&self.twin[v]) {
                continue;
            }
            tried_twins.push(self.twin[v]);
            for (slot, &u) in self.perm[..depth].iter().enumerate() {
                write_bit(&mut self.cur, base + 2 * slot, self.p.rows[u] >> v & 1 == 1);
                write_bit(&mut self.cur, base + 2 * slot + 1, self.p.rows[v] >> u & 1 == 1);
            }
            let prefix_bits = depth * (depth + 1);
            let keep = match &self.best {
                None => true,
                Some((b, _)) => cmp_prefix(&self.cur, b, prefix_bits) != Ordering::Greater,
            };
            if keep {
                self.perm.push(v);
                self.used |= 1u64 << v;
                self.place(depth + 1);
                self.used &= !(1u64 << v);
                self.perm.pop();
            }
        }
    }
}

fn canonical_labeling(p: &Poset) -> Vec<usize> {
    let n = p.n;
    if n == 1 {
        return vec![0];
    }
    let color = refine_colors(p);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| color[i]);
    let pos_color: Vec<u32> = order.iter().map(|&i| color[i]).collect();
    let words = (n * (n - 1)).div_ceil(64);
    let mut search = CanonSearch {
        p,
        pos_color,
        color,
        twin: twin_classes(p),
        cur: vec![0u64; words],
        perm: Vec::with_capacity(n),
        used: 0,
        best: None,
    };
    search.place(0);
    search.best.expect("canonical search yields a labeling").1
}

/// Packs the relation matrix under the labeling `perm` (canonical position ->
/// vertex) into bytes, prefixed by `n`.
fn code_for_labeling(p: &Poset, perm: &[usize]) -> CanonicalCode {
    let n = p.n;
    let mut bytes = vec![0u8; 1 + (n * n).div_ceil(8)];
    bytes[0] = n as u8;
    for (i, &u) in perm.iter().enumerate() {
        for (j, &v) in perm.iter().enumerate() {
            if p.rows[u] >> v & 1 == 1 {
                let t = i * n + j;
                bytes[1 + t / 8] |= 1 << (7 - t % 8);
            }
        }
    }
    CanonicalCode(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Poset {
        let covers: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
        Poset::from_covers(n, &covers).unwrap()
    }

    #[test]
    fn covers_close_transitively() {
        let p = chain(4);
        assert!(p.le(1, 4));
        assert!(p.le(2, 4));
        assert!(!p.le(4, 1));
        assert_eq!(p.cover_arcs(), vec![(1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn redundant_covers_are_reduced_away() {
        // The long arc 1 -> 4 is implied by the chain and must not survive in
        // the Hasse digraph.
        let p = Poset::from_covers(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
        assert_eq!(p.hasse().arcs(), vec![(1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn rejects_cycles_and_bad_labels() {
        assert!(matches!(
            Poset::from_covers(3, &[(1, 2), (2, 3), (3, 1)]),
            Err(PosetError::DirectedCycle(_))
        ));
        assert!(matches!(
            Poset::from_covers(3, &[(1, 4)]),
            Err(PosetError::LabelOutOfRange { label: 4, n: 3 })
        ));
        assert!(matches!(Poset::from_covers(0, &[]), Err(PosetError::SizeZero)));
        assert!(matches!(
            Poset::from_covers(2, &[(1, 1)]),
            Err(PosetError::DirectedCycle(_))
        ));
    }

    #[test]
    fn incidence_axiom_witnesses() {
        let reflexive_fail = IncidenceMatrix::new(vec![vec![1, 0], vec![0, 0]]).unwrap();
        assert_eq!(
            Poset::from_incidence(&reflexive_fail),
            Err(PosetError::NotReflexive(2))
        );
        let antisym_fail = IncidenceMatrix::new(vec![vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(
            Poset::from_incidence(&antisym_fail),
            Err(PosetError::NotAntisymmetric(1, 2))
        );
        let trans_fail = IncidenceMatrix::new(vec![
            vec![1, 1, 0],
            vec![0, 1, 1],
            vec![0, 0, 1],
        ])
        .unwrap();
        assert_eq!(
            Poset::from_incidence(&trans_fail),
            Err(PosetError::NotTransitive(1, 2, 3))
        );
    }

    #[test]
    fn incidence_roundtrip() {
        let p = Poset::from_covers(4, &[(2, 1), (2, 4), (1, 3), (4, 3)]).unwrap();
        let q = Poset::from_incidence(&p.incidence()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn hasse_matches_brute_force_reduction() {
        // Reduction oracle: (i, j) is an arc iff i < j and no k has i < k < j.
        let posets = [
            chain(5),
            Poset::from_covers(4, &[(2, 1), (2, 4), (1, 3), (4, 3)]).unwrap(),
            Poset::from_covers(5, &[(1, 3), (4, 2), (5, 2), (5, 3)]).unwrap(),
            Poset::from_covers(6, &[(1, 2), (1, 3), (2, 4), (3, 4), (4, 5), (4, 6)]).unwrap(),
        ];
        for p in posets {
            let mut expect = Vec::new();
            for i in 1..=p.n() {
                for j in 1..=p.n() {
                    if p.lt(i, j) && (1..=p.n()).all(|k| !(p.lt(i, k) && p.lt(k, j))) {
                        expect.push((i, j));
                    }
                }
            }
            expect.sort_unstable();
            assert_eq!(p.hasse().arcs(), expect);
        }
    }

    #[test]
    fn opposite_is_involutive() {
        let p = Poset::from_covers(5, &[(1, 3), (4, 2), (5, 2), (5, 3)]).unwrap();
        assert_eq!(p.opposite().opposite(), p);
        assert!(p.opposite().le(3, 1));
    }

    #[test]
    fn delete_points_relabels_in_order() {
        let p = chain(5);
        let q = p.delete_points(&[3]).unwrap();
        // 1 < 2 and (old 4 < old 5) survive as 3 < 4; 2 < 3 via closure.
        assert_eq!(q.n(), 4);
        assert!(q.le(2, 3));
        assert_eq!(q.hasse().arcs(), vec![(1, 2), (2, 3), (3, 4)]);
        assert_eq!(p.delete_points(&[1, 2, 3, 4, 5]), Err(PosetError::EmptyResult));
    }

    #[test]
    fn shape_report_known_shapes() {
        let path = chain(4).hasse().shape_report();
        assert!(path.is_oriented_path && path.underlying_is_path && path.is_tree);
        assert_eq!(path.sources, vec![1]);
        assert_eq!(path.sinks, vec![4]);

        let zigzag = Poset::from_covers(3, &[(1, 2), (3, 2)]).unwrap().hasse().shape_report();
        assert!(zigzag.underlying_is_path && !zigzag.is_oriented_path);
        assert_eq!(zigzag.sources, vec![1, 3]);

        let diamond = Poset::from_covers(4, &[(1, 2), (1, 3), (2, 4), (3, 4)])
            .unwrap()
            .hasse()
            .shape_report();
        assert!(diamond.is_two_regular && diamond.underlying_is_cycle);
        assert!(!diamond.is_tree && !diamond.underlying_is_path);

        let single = Poset::singleton().hasse().shape_report();
        assert!(single.connected && single.underlying_is_path && single.is_tree);
        assert!(single.is_oriented_path);
        assert_eq!(single.degree_sequence, vec![0]);
    }

    #[test]
    fn connectivity() {
        assert!(chain(3).is_connected());
        let two_chains = Poset::from_covers(4, &[(1, 2), (3, 4)]).unwrap();
        assert!(!two_chains.is_connected());
    }

    #[test]
    fn equal_codes_exactly_for_isomorphic_posets() {
        // Oracle: brute-force isomorphism by trying every permutation.
        fn isomorphic(p: &Poset, q: &Poset) -> bool {
            if p.n() != q.n() {
                return false;
            }
            let n = p.n();
            let mut idx: Vec<usize> = (0..n).collect();
            let mut found = false;
            permute(&mut idx, 0, &mut |perm| {
                if !found {
                    found = (0..n).all(|i| {
                        (0..n).all(|j| {
                            (p.rows[i] >> j & 1) == (q.rows[perm[i]] >> perm[j] & 1)
                        })
                    });
                }
            });
            found
        }
        fn permute(xs: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
            if k == xs.len() {
                f(xs);
                return;
            }
            for i in k..xs.len() {
                xs.swap(k, i);
                permute(xs, k + 1, f);
                xs.swap(k, i);
            }
        }
        let samples = [
            chain(5),
            Poset::from_covers(4, &[(2, 1), (2, 4), (1, 3), (4, 3)]).unwrap(),
            Poset::from_covers(4, &[(1, 2), (1, 4), (3, 2), (3, 4)]).unwrap(),
            Poset::from_covers(5, &[(1, 3), (4, 2), (5, 2), (5, 3)]).unwrap(),
            Poset::from_covers(5, &[(5, 3), (2, 4), (1, 4), (1, 3)]).unwrap(),
            Poset::from_covers(5, &[]).unwrap(),
            Poset::from_covers(5, &[(1, 2), (1, 3), (1, 4), (1, 5)]).unwrap(),
            Poset::from_covers(5, &[(2, 1), (3, 1), (4, 1), (5, 1)]).unwrap(),
            Poset::from_covers(4, &[(1, 2), (3, 4)]).unwrap(),
            Poset::from_covers(4, &[(1, 2), (2, 3)]).unwrap(),
        ];
        for p in &samples {
            for q in &samples {
                assert_eq!(
                    p.canonical_code() == q.canonical_code(),
                    isomorphic(p, q),
                    "codes must agree exactly on isomorphism: {p:?} vs {q:?}"
                );
            }
        }
    }

    #[test]
    fn canonical_code_is_relabeling_invariant() {
        let p = Poset::from_covers(6, &[(1, 2), (1, 3), (2, 4), (3, 4), (4, 5), (4, 6)]).unwrap();
        // Relabel by a fixed permutation sigma (vertex i -> sigma[i]).
        let sigma = [3usize, 5, 1, 6, 2, 4];
        let covers: Vec<(usize, usize)> = p
            .cover_arcs()
            .into_iter()
            .map(|(a, b)| (sigma[a - 1], sigma[b - 1]))
            .collect();
        let q = Poset::from_covers(6, &covers).unwrap();
        assert_eq!(p.canonical_code(), q.canonical_code());
        let r = chain(6);
        assert_ne!(p.canonical_code(), r.canonical_code());
    }

    #[test]
    fn text_and_json_roundtrip() {
        let p = Poset::from_covers(4, &[(2, 1), (2, 4), (1, 3), (4, 3)]).unwrap();
        let (q, fmt) = Poset::parse_auto(&p.to_text()).unwrap();
        assert_eq!(fmt, InputFormat::Text);
        assert_eq!(p, q);
        let (r, fmt) = Poset::parse_auto(&p.to_json()).unwrap();
        assert_eq!(fmt, InputFormat::Json);
        assert_eq!(p, r);
        let commented = "# a diamond with a flipped top\n4\n1 2 # left\n1 3\n2 4\n3 4\n";
        assert!(Poset::parse_text(commented).is_ok());
    }

    #[test]
    fn down_closed_masks_are_exactly_the_ideals() {
        let p = Poset::from_covers(3, &[(1, 2), (1, 3)]).unwrap();
        // Ideals: {}, {1}, {1,2}, {1,3}, {1,2,3}.
        assert_eq!(p.down_closed_masks(), vec![0b000, 0b001, 0b011, 0b101, 0b111]);
    }

    #[test]
    fn extend_with_max_adds_a_maximal_point() {
        let p = chain(2);
        let q = p.extend_with_max(0b01);
        assert_eq!(q.n(), 3);
        assert!(q.le(1, 3) && !q.le(2, 3));
        assert!(q.hasse().shape_report().sinks.contains(&3));
    }
}
