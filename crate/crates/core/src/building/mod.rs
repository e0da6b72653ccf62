//! The Bruhat–Tits tree of `SL(2)` and orbital integrals as fixed-point
//! counts on it.

pub mod lattice;
pub mod oracle;
pub mod orbital;
pub mod regular;

pub use lattice::{Lattice, LatticeKey};
pub use oracle::{ball, oracle_elliptic_count, oracle_split_window};
pub use orbital::{
    default_radius, find_fixed_vertex, fixed_vertex_count, fixed_vertex_count_bounded, fl_check, fl_check_bounded,
    kappa_orbital, kappa_orbital_bounded, matched_element, stable_orbital_h, ClassCount, CountResult, FlReport,
    HElement, HKind, KappaMode, OrbitalReport,
};
pub use regular::{
    are_conjugate, are_stably_conjugate, cayley, classify_centralizer, conjugacy_invariant, d_matrix, diagonalize,
    match_element, match_split, root_normalization, stable_class_reps, transfer_base_point, CentralizerKind,
    RegularElement, RootNormalization, StableClassRep,
};
