//! Exact spectral classification of finite partially ordered sets.
//!
//! A finite poset `I` on points `{1, .., n}` has an incidence matrix `C` with
//! `c[i][j] = 1` iff `i <= j` in `I`, and a symmetric Gram matrix
//! `G = (C + C^T)/2`. The integral quadratic form `q(v) = v G v^T = v C v^T`
//! drives everything in this crate:
//!
//! * [`gram`] computes exact inertia, kernels and negativity witnesses for
//!   `q` over the integers (no floating point anywhere),
//! * [`dynkin`] names the weak congruence class of a non-negative form by a
//!   simply laced diagram (`A_n`, `D_n`, `E_6`, `E_7`, `E_8`) plus a corank,
//! * [`reflect`] re-orients hanging paths of the Hasse digraph through
//!   explicit unimodular congruences of the (non-symmetric) incidence matrix,
//! * [`enumerate`] streams posets up to isomorphism and tabulates the census
//!   of one-point path completions by spectral class,
//! * [`count`] evaluates the closed-form orientation counts that the census
//!   columns follow, in arbitrary precision.
//!
//! Points are labeled `1..=n` in every public interface; vectors are indexed
//! so that entry `i` belongs to point `i + 1`.

pub mod count;
pub mod dynkin;
pub mod enumerate;
pub mod gram;
pub mod poset;
pub mod reflect;
#[cfg(test)]
pub(crate) mod testutil;

pub use count::{asymptotic_report, count_cycle_orientations, count_necklaces,
    count_nonnegative_a, count_path_orientations, count_principal_a, euler_totient,
    AsymptoticRow, BigCount, CountError};
pub use dynkin::{classify_deg_le2, classify_fast_a, classify_tree, dynkin_type, euler_form_tree,
    incidence_inverse, indefinite_witness_catalog, root_count, ClassifyError, DynkinType,
    FullClassification, IndefiniteTemplate, Method};
pub use enumerate::{census, census_detailed, count_acyclic_cycle_orientations,
    enumerate_cycle_orientations, enumerate_path_orientations, enumerate_posets, CensusRow,
    EnumError, OrientationCount, PosetStream, MAX_ENUMERATION_POINTS};
pub use gram::{classify_definiteness, evaluate_q, inertia, kernel_z_basis, special_basis,
    symmetric_gram, Definiteness, GramError, Inertia, KernelBasis, SymIntMatrix};
pub use poset::{CanonicalCode, HasseDigraph, IncidenceMatrix, InputFormat, Poset, PosetError,
    ShapeReport, MAX_POINTS};
pub use reflect::{anchored_path_at, congruence_matrix, find_anchored_paths,
    normalize_anchored_path, normalize_hanging_paths, reflect, AnchoredPath, CongruenceWitness,
    PathKind, ReflectError};
