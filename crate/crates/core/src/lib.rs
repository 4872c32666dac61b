//! Exact toolkit for two-party Bell inequalities obtained from facets of
//! cut polytopes by triangular elimination.
//!
//! Inequalities live either in cut coordinates on a graph with a trace-out
//! node X ([`CutIneq`]) or in Collins–Gisin probability coordinates
//! ([`CgIneq`]). All arithmetic is exact.

pub mod analysis;
pub mod census;
pub mod elimination;
pub mod error;
pub mod families;
pub mod graph;
pub mod hull;
pub mod ineq;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod symmetry;

pub use analysis::{
    is_valid, is_valid_with, support_reduce, tightness_report, tightness_report_with, zero_lift, AnalysisOptions,
    Reduced, Scenario, TightnessReport, Validity,
};
pub use census::{
    census, census_from_facets, labelled_sources, CensusClass, CensusOptions, CensusReport, Labelling, SpotCheck,
};
pub use elimination::{
    eliminate_by_triangle_sums, eliminate_with_triangle, triangular_eliminate, triangular_eliminate_detailed,
    Eliminated, Triangle,
};
pub use error::{Error, Result};
pub use families::{
    catalog, cliqueweb, cliqueweb_bell, fix_observable, fix_observables, hypermetric, hypermetric_bell,
    hypermetric_tightness_condition, immm22, includes_chsh, pure_hypermetric_bell, CliqueWebParams, Inclusion,
    InclusionBudget, InclusionCertificate, TightnessCondition, WeightVector, CATALOG,
};
pub use graph::{build_graph, cut_vector, enumerate_cuts, Cut, EdgeVector, Graph, GraphKind, NodeId, Party};
pub use hull::{cut_polytope_facets, enumerate_facets, enumerate_facets_with, CutPolytopeFacets, HRep, HalfSpace, HullOptions};
pub use ineq::{convert_cg_to_cut, convert_cut_to_cg, evaluate, CgIneq, CutIneq, Inequality};
pub use io::{emit_ineq, emit_record, emit_records, parse_ineq, parse_points, parse_records, Format, Record};
pub use symmetry::{
    canonical_form, canonical_with, classify, classify_with, equivalent, equivalent_with, permute, switch, Budget,
    CanonicalKey, ClassReport, EquivCertificate, GroupMode, Relabelling,
};

/// Exact rational scalar used by every public inequality type.
pub type Rat = num_rational::BigRational;
/// Arbitrary-precision integer.
pub type Int = num_bigint::BigInt;
