//! morphforge: a morphotactic specification compiler and morphological
//! analyzer/generator for Modern Standard Arabic nominals.
//!
//! Editable TSV spec sheets (order, morphemes, lexicon, conditions, rewrite
//! rules) compile offline into a six-table database — three surface
//! lexicons for complex prefixes, stems and complex suffixes, plus three
//! pairwise category-compatibility tables — which drives exhaustive
//! analysis and generation with ortho-phonological rewrite rules.
//!
//! Allomorph selection is governed entirely by surface-fact conditions:
//! each allomorph *sets* labels and *requires* (possibly negated)
//! disjunctions of labels; a word form is valid exactly when every
//! member's requirements hold against the union of everything the word
//! sets. The compiler discharges these requirements into the pairwise
//! tables so the runtime engine only ever checks three table lookups.

pub mod analysis;
pub mod compiler;
pub mod conditions;
pub mod db;
pub mod engine;
pub mod eval;
pub mod features;
pub mod lexqa;
pub mod morphotax;
pub mod rewrite;
pub mod spec;
pub mod translit;

pub use analysis::{Analysis, FeatureRequest, Segmentation, SlotReq};
pub use compiler::{compile, stats, CompileError, StatsReport};
pub use conditions::{satisfies, ConditionExpr, ConditionLabel, Scope, Side, Term};
pub use db::{ComplexMorph, MorphDb};
pub use engine::{Engine, EngineError};
pub use features::{FeatureBundle, Pos};
pub use spec::{load_specs, validate_specs, SpecDiagnostic, SpecSet, SpecSheets};
