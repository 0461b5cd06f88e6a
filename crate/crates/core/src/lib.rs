//! Polynomial-time minimization of Z-free binary valued constraint
//! satisfaction problems.
//!
//! An instance is lifted to a quadratic function on the one-hot index space.
//! Its cost structure is completed to an anti-ultrametric matrix, which makes
//! the lifted function M♮-convex. The minimum over feasible assignments is
//! then an M-convex intersection problem, solved by successive shortest
//! paths. All arithmetic is exact.
//!
//! ```
//! use zfree_core::{minimize_zfree, parse_instance, Status};
//!
//! let inst = parse_instance(
//!     r#"{"r": 2, "domains": [2, 2], "unary": [[0, 1], [0, 2]],
//!         "binary": [{"i": 1, "j": 2, "table": [[5, 0], [0, 0]]}]}"#,
//! )
//! .unwrap();
//! let report = minimize_zfree(&inst).unwrap();
//! assert_eq!(report.status, Status::Optimal);
//! assert_eq!(report.value.to_string(), "1");
//! ```

// Violation witnesses carry their offending values by design.
#![allow(clippy::result_large_err)]

pub mod completion;
pub mod error;
pub mod format;
pub mod instance;
pub mod intersection;
pub mod oracles;
pub mod pipeline;
pub mod properties;
pub mod quadratic;
pub mod value;

pub use completion::{
    complete, completable_oracle, for_each_chordless_cycle, is_threshold_clique, threshold_components,
    validate_partial, AssignmentGraph, ChordlessCycle, Coefficients, Completability, CompletedMatrix,
    NotCompletable, PartialMatrix,
};
pub use error::{Error, Result};
pub use format::{
    certificate_to_json, completion_to_json, instance_to_json, parse_instance, parse_partial_matrix,
    partial_matrix_to_json, report_to_json,
};
pub use instance::{evaluate_instance, one_hot_decode, one_hot_encode, Assignment, BitVec, IndexSpace, Instance};
pub use intersection::{
    build_aux_graph, shortest_path_min_hops, ssp_intersect, ArcKind, AuxArc, AuxGraph, Intersection, IterationTrace,
    NoPath, PathResult, Potential,
};
pub use oracles::{
    brute_force_min, check_exchange_axiom, check_local_exchange, OracleBudget, OracleViolation, ValueTable,
};
pub use pipeline::{
    certify_completability, generate_instance, minimize_zfree, minimize_zfree_with, GenConfig, SolveOptions, SolveReport,
    Status, StepTimings, CompletabilityCertificate, Validation,
};
pub use properties::{check_anti_ultrametric, check_jwp, check_mnatural_quadratic, check_zfree, Violation};
pub use quadratic::{
    build_overline_f, eval_layer, eval_quad, greedy_min_layer, GreedyOutcome, Infeasible, LayerRestriction, QuadFn,
    SignedQuadFn,
};
pub use value::{ExtValue, Extended};
