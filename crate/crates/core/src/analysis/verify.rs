use crate::block::{triple_on_set, BlockError, BlockOptions, Region, Shape};
use crate::complex::{build_set, Rect, MAX_DEPTH};
use crate::field::VectorFieldSpec;
use crate::homology::{relative_homology, Coefficients};

use super::{AnalysisError, Classification, ConleyReport, CriticalPoint};

/// A value on either side of a checked identity.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    Int(i64),
    Ints(Vec<i64>),
    Rows(Vec<Vec<i64>>),
    Missing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifierOutcome {
    pub name: String,
    pub holds: bool,
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub notes: String,
}

fn outcome(name: &str, holds: bool, lhs: Quantity, rhs: Quantity, notes: impl Into<String>) -> VerifierOutcome {
    VerifierOutcome { name: name.to_string(), holds, lhs, rhs, notes: notes.into() }
}

fn ints(b: [u64; 3]) -> Vec<i64> {
    b.iter().map(|&v| v as i64).collect()
}

/// Unless the set is an attractor its exit-pair homology vanishes in degree
/// 0; unless it is a repeller it vanishes in degree 2 (over Z₂ as well).
pub fn verify_exit_homology(report: &ConleyReport) -> VerifierOutcome {
    let q = report.forward.betti();
    let z2 = report.forward.betti_z2;
    let mut lhs = Vec::new();
    let mut clauses = Vec::new();
    if report.classification != Classification::Attractor {
        lhs.push(q[0] as i64);
        clauses.push("b0");
    }
    if report.classification != Classification::Repeller {
        lhs.push(q[2] as i64);
        lhs.push(z2[2] as i64);
        clauses.push("b2 (rational and Z2)");
    }
    let holds = lhs.iter().all(|&v| v == 0);
    let rhs = vec![0; lhs.len()];
    let notes = format!("{}; checked {}", report.classification.as_str(), clauses.join(", "));
    outcome("exit_homology", holds, Quantity::Ints(lhs), Quantity::Ints(rhs), notes)
}

/// Z₂ Betti numbers of `(N, L⁺)` read backwards equal those of `(N, L⁻)`.
pub fn verify_duality(report: &ConleyReport) -> VerifierOutcome {
    let f = report.forward.betti_z2;
    let lhs = vec![f[2] as i64, f[1] as i64, f[0] as i64];
    let rhs = ints(report.backward.betti_z2);
    outcome("duality", lhs == rhs, Quantity::Ints(lhs), Quantity::Ints(rhs), "b_k(N,L+) = b_(2-k)(N,L-) over Z2")
}

/// The homological index equals `(-1)^m Σ ind(x)` over the enclosed zeros
/// (`m = 2`).
pub fn verify_index_sum(report: &ConleyReport, cps: &[CriticalPoint]) -> VerifierOutcome {
    let missing = cps.iter().filter(|c| c.winding_index.is_none()).count();
    let sum: i64 = cps.iter().filter_map(|c| c.winding_index).sum();
    let sign = 1; // (-1)^m with m = 2
    let notes = format!("(-1)^m * sum of {} winding indices, m = 2", cps.len());
    if missing > 0 {
        return outcome(
            "index_sum",
            false,
            Quantity::Int(report.ind_p),
            Quantity::Missing,
            format!("{missing} critical point(s) without a certified winding index"),
        );
    }
    outcome("index_sum", report.ind_p == sign * sum, Quantity::Int(report.ind_p), Quantity::Int(sign * sum), notes)
}

/// For attractors and repellers the index is the Euler characteristic of the
/// invariant set, supplied by the caller.
pub fn verify_index_euler(report: &ConleyReport, chi: i64) -> Result<VerifierOutcome, AnalysisError> {
    let rhs = match report.classification {
        Classification::Attractor => chi,
        Classification::Repeller => chi, // (-1)^m chi with m = 2
        Classification::Neither => {
            return Err(AnalysisError::NotApplicable("invariant set is neither an attractor nor a repeller".into()))
        }
    };
    Ok(outcome(
        "euler_characteristic",
        report.ind_p == rhs,
        Quantity::Int(report.ind_p),
        Quantity::Int(rhs),
        format!("{} with supplied chi = {chi}", report.classification.as_str()),
    ))
}

/// A positive index forces an attractor or a repeller.
pub fn verify_positive_index(report: &ConleyReport) -> VerifierOutcome {
    let applies = report.ind_p > 0;
    let holds = !applies || report.classification != Classification::Neither;
    let notes = if applies {
        format!("ind_p > 0 and the set is an {}", report.classification.as_str())
    } else {
        "vacuous: ind_p <= 0".to_string()
    };
    outcome(
        "attractor_or_repeller",
        holds,
        Quantity::Int(report.ind_p),
        Quantity::Int(i64::from(report.classification != Classification::Neither)),
        notes,
    )
}

/// Certifies one block for every sampled parameter value and compares the
/// forward Betti numbers. The grid is refined uniformly for all samples while
/// any of them leaves a face ambiguous, so the block stays common.
pub fn continuation_check(
    family: &VectorFieldSpec,
    domain: Rect,
    depth: u8,
    shape: &Shape,
    lambdas: &[f64],
    opts: &BlockOptions,
) -> Result<VerifierOutcome, AnalysisError> {
    if lambdas.is_empty() {
        return Err(AnalysisError::NotApplicable("no parameter samples".into()));
    }
    let region = Region::new(&domain, shape);
    let cap = opts.max_depth.min(MAX_DEPTH);
    let mut d = depth;
    'depth: loop {
        let n = build_set(domain, d, |p| shape.contains(p)).map_err(BlockError::from)?;
        let mut rows = Vec::with_capacity(lambdas.len());
        for &lambda in lambdas {
            let field = family.bind(Some(lambda))?;
            match triple_on_set(&field, &n, &region, shape, opts) {
                Ok(t) => {
                    let h = relative_homology(&t.n, &t.lplus, Coefficients::Integers).expect("exit faces lie in N");
                    rows.push(ints(h.betti()));
                }
                Err(BlockError::Ambiguous { .. }) if d < cap => {
                    d += 1;
                    continue 'depth;
                }
                Err(e) => return Err(AnalysisError::BlockFailsAtLambda { lambda, reason: e.to_string() }),
            }
        }
        let first = rows[0].clone();
        let holds = rows.iter().all(|r| *r == first);
        let notes = format!(
            "common block at depth {d} with {} squares; lambda samples {:?}{}",
            n.count(2),
            lambdas,
            if family.is_family() { "" } else { "; field does not depend on lambda" }
        );
        let rhs = Quantity::Rows(vec![first; rows.len()]);
        return Ok(outcome("continuation", holds, Quantity::Rows(rows), rhs, notes));
    }
}
