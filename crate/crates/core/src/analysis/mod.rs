//! Conley index reports, Poincaré indices, Morse decompositions and the
//! consistency checks tying them together.

mod critical;
mod morse;
mod report;
mod verify;

pub use critical::{
    critical_points_in, find_critical_points, winding, winding_index, CriticalPoint, Winding, MAX_WINDING_SAMPLES,
};
pub use morse::{
    morse_decomposition, morse_quotient, verify_morse_inequalities, MorseOptions, MorseReport, MorseSet,
};
pub use report::{conley_index, report_from_triple, Classification, ConleyReport};
pub use verify::{
    continuation_check, verify_duality, verify_exit_homology, verify_index_euler, verify_index_sum,
    verify_positive_index, Quantity, VerifierOutcome,
};

use thiserror::Error;

use crate::block::BlockError;
use crate::field::FieldError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("field vanishes on the curve (min |F| = {min_norm:e})")]
    VanishingOnCurve { min_norm: f64 },
    #[error("winding number did not settle with {samples} samples")]
    NonConvergent { samples: usize },
    #[error("winding number {raw} is not within the rounding gap of an integer")]
    RoundingGap { raw: f64 },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("block fails at lambda = {lambda}: {reason}")]
    BlockFailsAtLambda { lambda: f64, reason: String },
    #[error("Morse polynomial difference {d:?} is not divisible by 1 + t")]
    NotDivisible { d: Vec<i64> },
    #[error("no isolating block found for Morse set {index}: {reason}")]
    MorseSetBlock { index: usize, reason: String },
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl AnalysisError {
    pub fn kind(&self) -> &'static str {
        match self {
            AnalysisError::VanishingOnCurve { .. } => "VanishingOnCurve",
            AnalysisError::NonConvergent { .. } => "NonConvergent",
            AnalysisError::RoundingGap { .. } => "RoundingGap",
            AnalysisError::NotApplicable(_) => "NotApplicable",
            AnalysisError::BlockFailsAtLambda { .. } => "BlockFailsAtLambda",
            AnalysisError::NotDivisible { .. } => "NotDivisible",
            AnalysisError::MorseSetBlock { .. } => "MorseSetBlock",
            AnalysisError::Block(b) => b.kind(),
            AnalysisError::Field(_) => "FieldError",
        }
    }
}
