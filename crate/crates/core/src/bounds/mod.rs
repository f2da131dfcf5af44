//! Shadows of tuple families, r-good tuple counts, Turán-type independence
//! checks, and block constructions of disjoint subsets in one nerve family.

mod disjoint;
mod graphs;
mod rgood;
mod shadow;
pub mod text;

pub use disjoint::{find_k_disjoint_common, jamison_disjoint_subsets, CommonFamily, DisjointRoute};
pub use graphs::{
    below_turan_threshold, local_to_global_independent, local_to_global_sweep, turan_graph_sweep,
    turan_independent, Hypergraph, LocalGlobalReport, LocalGlobalSweep, TuranSweep,
    EXACT_VERTEX_CAP,
};
pub use rgood::{count_r_bad, is_r_good, labeled_forests, RBadReport, EXACT_TUPLE_CAP};
pub use shadow::{
    check_kk_bound, generalized_binomial, invert_binomial, kk_exhaustive_pairs, kk_random, shadow,
    KkReport, SweepSummary, TupleFamily, KK_SLACK,
};
