//! Exact-arithmetic analysis engine for quantum measures on finite history
//! spaces: decoherence functionals, consistent sets, null events and zero
//! covers, contrary inferences, selection criteria and coevents.
//!
//! Scalars live either in the exact field Q(i, sqrt2) or on a complex-double
//! backend with a relative tolerance; every structure is immutable after
//! construction and safe to share across threads.

pub mod config;
pub mod consistency;
pub mod error;
pub mod functional;
pub mod models;
pub mod preclusion;
pub mod scalar;
pub mod selection;
pub mod space;

pub use config::{bell_number, RunConfig, DEFAULT_EPSILON};
pub use consistency::{ConsistentSetRecord, Partition};
pub use error::{Error, Result};
pub use functional::{
    BranchVectorModel, DecoherenceFunctional, DecoherenceMode, OperatorModel, OperatorStepSpec,
    ValidationReport,
};
pub use preclusion::{ContraryWitness, NullCatalog};
pub use scalar::{conj_mul, parse_amplitude, render_exact, Backend, ExactScalar, Scalar, Sign};
pub use selection::{
    ClassificationTable, Coevent, CompatibilityReport, CsClassification, OcsSemantics, OcsWitness,
    PcsWitness, Property3Violation,
};
pub use space::{Event, HistorySpace, MAX_HISTORIES};
