use crate::block::{build_triple, BlockError, BlockOptions, IndexTriple, Shape};
use crate::complex::Rect;
use crate::field::Field;
use crate::homology::{relative_homology, Coefficients, HomologySummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Attractor,
    Repeller,
    Neither,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Attractor => "attractor",
            Classification::Repeller => "repeller",
            Classification::Neither => "neither",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConleyReport {
    pub triple: IndexTriple,
    /// Homology of `(N, L⁺)`.
    pub forward: HomologySummary,
    /// Homology of `(N, L⁻)`.
    pub backward: HomologySummary,
    pub classification: Classification,
    pub ind_p: i64,
}

/// Homology indices of both flow directions on an existing triple.
pub fn report_from_triple(triple: IndexTriple) -> ConleyReport {
    let (forward, backward) = rayon::join(
        || relative_homology(&triple.n, &triple.lplus, Coefficients::Integers),
        || relative_homology(&triple.n, &triple.lminus, Coefficients::Integers),
    );
    let forward = forward.expect("exit faces lie in N");
    let backward = backward.expect("entrance faces lie in N");
    let classification = if triple.lplus.is_empty() {
        Classification::Attractor
    } else if triple.lminus.is_empty() {
        Classification::Repeller
    } else {
        Classification::Neither
    };
    ConleyReport { ind_p: forward.euler, triple, forward, backward, classification }
}

pub fn conley_index(
    field: &Field,
    domain: Rect,
    depth: u8,
    shape: &Shape,
    opts: &BlockOptions,
) -> Result<ConleyReport, BlockError> {
    build_triple(field, domain, depth, shape, opts).map(report_from_triple)
}
