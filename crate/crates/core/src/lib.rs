//! Expert-system shell and bundled knowledge base for assessing whether a
//! proposed knowledge-based system is worth building.
//!
//! * [`kb`] — the `.fkb` rule language: parser, validator, serializer.
//! * [`engine`] — backward chaining with certainty factors and proofs.
//! * [`calculators`] — cost/benefit, payback, effort and risk arithmetic.
//! * [`feasibility`] — the bundled feasibility knowledge base and its cases.
//! * [`session`] — consultations, assessments, what-if analysis, reports.
//!
//! The certainty-factor algebra and the calculators are generic over the
//! scalar type; the aliases below fix them to `f64`, which the rule engine
//! uses throughout.

pub mod calculators;
pub mod cf;
pub mod engine;
pub mod feasibility;
pub mod kb;
pub mod scalar;
pub mod session;

pub use scalar::Scalar;

/// Certainty factor over `f64`.
pub type Cf = cf::CertaintyFactor<f64>;
/// Cost model over `f64`.
pub type CostModel = calculators::CostModel<f64>;
/// Benefit model over `f64`.
pub type BenefitModel = calculators::BenefitModel<f64>;
/// Payback outcome over `f64`.
pub type Payback = calculators::Payback<f64>;
