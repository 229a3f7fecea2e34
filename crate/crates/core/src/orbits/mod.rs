//! Orbit integration, limit-set classification and homoclinic censuses.

mod integrate;
mod limit;

pub use integrate::{
    flow_map, integrate, rk4_step, trace_csv, Controls, Direction, OrbitError, OrbitTrace, Termination,
    TRACE_CSV_HEADER,
};
pub use limit::{classify_limit, Evidence, LimitClassification, LimitVerdict};

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::CriticalPoint;
use crate::complex::Rect;
use crate::field::Field;
use crate::geometry::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("a census needs at least 8 seeds, got {0}")]
    TooFewSeeds(usize),
    #[error("seed radius must be positive, got {0}")]
    BadRadius(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusEntry {
    pub seed: Point,
    pub forward: LimitVerdict,
    pub backward: LimitVerdict,
    pub homoclinic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomoclinicCensus {
    pub critical_point: CriticalPoint,
    pub radius: f64,
    pub count: usize,
    pub domain: Rect,
    pub t_max: f64,
    pub entries: Vec<CensusEntry>,
    pub fraction: f64,
    pub near_periodic: usize,
    pub note: String,
}

/// Seeds `n_seeds` points on the circle of `radius` about `cp` and integrates
/// each both ways over a square of half-width `10·radius`.
pub fn homoclinic_scan(
    field: &Field,
    cp: &CriticalPoint,
    radius: f64,
    n_seeds: usize,
    controls: &Controls,
) -> Result<HomoclinicCensus, ScanError> {
    if n_seeds < 8 {
        return Err(ScanError::TooFewSeeds(n_seeds));
    }
    let domain = match Rect::square(cp.location, 10.0 * radius) {
        Ok(r) if radius > 0.0 => r,
        _ => return Err(ScanError::BadRadius(radius)),
    };
    let controls = Controls { domain, ..*controls };
    let t_max = 50.0 / radius;
    let cps = std::slice::from_ref(cp);

    let entries: Vec<CensusEntry> = (0..n_seeds)
        .into_par_iter()
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n_seeds as f64;
            let seed = cp.location + Point::new(theta.cos(), theta.sin()) * radius;
            let run = |dir| match integrate(field, seed, dir, t_max, &controls) {
                Ok(tr) => classify_limit(field, &tr, cps, &controls).verdict,
                Err(e) => LimitVerdict::Undetermined(e.to_string()),
            };
            let forward = run(Direction::Forward);
            let backward = run(Direction::Backward);
            let homoclinic = matches!(
                (&forward, &backward),
                (LimitVerdict::ConvergesToCriticalPoint(a), LimitVerdict::ConvergesToCriticalPoint(b)) if a == b
            );
            CensusEntry { seed, forward, backward, homoclinic }
        })
        .collect();

    let hits = entries.iter().filter(|e| e.homoclinic).count();
    let near_periodic = entries
        .iter()
        .filter(|e| e.forward == LimitVerdict::NearPeriodic || e.backward == LimitVerdict::NearPeriodic)
        .count();
    let note = match cp.winding_index {
        Some(i) if i > 1 => format!(
            "index {i} > 1: homoclinic orbits expected in every neighbourhood; cycles excluded, so no near-periodic verdicts expected"
        ),
        Some(i) => format!("index {i}: no homoclinic orbits expected from the index alone"),
        None => "index unavailable".to_string(),
    };
    Ok(HomoclinicCensus {
        critical_point: cp.clone(),
        radius,
        count: n_seeds,
        domain,
        t_max,
        fraction: hits as f64 / n_seeds as f64,
        near_periodic,
        entries,
        note,
    })
}

pub const CENSUS_CSV_HEADER: &str = "seed_x,seed_y,forward,backward,homoclinic";

pub fn census_csv(c: &HomoclinicCensus) -> String {
    let mut out = format!("{CENSUS_CSV_HEADER}\n");
    for e in &c.entries {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.seed.x,
            e.seed.y,
            e.forward.label(),
            e.backward.label(),
            e.homoclinic
        );
    }
    out
}
