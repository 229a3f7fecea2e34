use crate::analysis::CriticalPoint;
use crate::field::Field;
use crate::geometry::Point;

use super::integrate::{Controls, OrbitTrace, Termination};

#[derive(Debug, Clone, PartialEq)]
pub enum LimitVerdict {
    /// Index into the critical-point list.
    ConvergesToCriticalPoint(usize),
    NearPeriodic,
    Escapes,
    Undetermined(String),
}

impl LimitVerdict {
    pub fn label(&self) -> String {
        match self {
            LimitVerdict::ConvergesToCriticalPoint(k) => format!("converges:{k}"),
            LimitVerdict::NearPeriodic => "near_periodic".into(),
            LimitVerdict::Escapes => "escapes".into(),
            LimitVerdict::Undetermined(_) => "undetermined".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Evidence {
    /// Time span of the dwell window.
    pub dwell_time: f64,
    pub final_distance: Option<f64>,
    pub return_distance: Option<f64>,
    pub return_time: Option<f64>,
    pub exit: Option<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitClassification {
    pub verdict: LimitVerdict,
    pub evidence: Evidence,
}

fn hermite(a: Point, fa: Point, b: Point, fb: Point, dt: f64, s: f64) -> Point {
    let s2 = s * s;
    let s3 = s2 * s;
    a * (2.0 * s3 - 3.0 * s2 + 1.0)
        + fa * (dt * (s3 - 2.0 * s2 + s))
        + b * (-2.0 * s3 + 3.0 * s2)
        + fb * (dt * (s3 - s2))
}

/// Smallest distance from `p` to the cubic Hermite arc between two samples,
/// with the parameter at which it is attained.
fn arc_distance(field: &Field, a: (f64, Point), b: (f64, Point), p: Point) -> (f64, f64) {
    let (fa, fb) = (field.value(a.1), field.value(b.1));
    let dt = b.0 - a.0;
    let d = |s: f64| hermite(a.1, fa, b.1, fb, dt, s).dist(p);
    let n = 16;
    let (mut best_s, mut best) = (0.0, d(0.0));
    for k in 1..=n {
        let s = k as f64 / n as f64;
        let v = d(s);
        if v < best {
            best = v;
            best_s = s;
        }
    }
    // golden-section polish around the best grid point
    let (mut lo, mut hi) = ((best_s - 1.0 / n as f64).max(0.0), (best_s + 1.0 / n as f64).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..40 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if d(m1) < d(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let s = 0.5 * (lo + hi);
    let v = d(s);
    if v < best {
        (v, s)
    } else {
        (best, best_s)
    }
}

fn nearest_cp(cps: &[CriticalPoint], p: Point) -> Option<(usize, f64)> {
    cps.iter()
        .enumerate()
        .map(|(k, c)| (k, c.location.dist(p)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Decides what the trace is heading to: a critical point, a cycle, or out
/// of the domain.
pub fn classify_limit(
    field: &Field,
    trace: &OrbitTrace,
    cps: &[CriticalPoint],
    controls: &Controls,
) -> LimitClassification {
    let mut evidence = Evidence::default();
    if let Termination::DomainExit { at } = trace.termination {
        evidence.exit = Some(at);
        return LimitClassification { verdict: LimitVerdict::Escapes, evidence };
    }
    let s = &trace.samples;
    let end = trace.end();
    let start = ((s.len() as f64) * (1.0 - controls.dwell_fraction)).floor() as usize;
    let start = start.min(s.len().saturating_sub(2));
    let window = &s[start..];
    evidence.dwell_time = (window[window.len() - 1].0 - window[0].0).abs();

    if let Some((k, dist_end)) = nearest_cp(cps, end) {
        evidence.final_distance = Some(dist_end);
        let c = cps[k].location;
        let dists: Vec<f64> = window.iter().map(|(_, p)| p.dist(c)).collect();
        let dwell = dists.iter().all(|&d| d <= controls.eps_conv);
        let monotone = dists.windows(2).all(|w| w[1] <= w[0]) && dist_end < controls.eps_approach;
        if dwell || monotone {
            return LimitClassification { verdict: LimitVerdict::ConvergesToCriticalPoint(k), evidence };
        }
    }

    let t_end = s[s.len() - 1].0;
    let min_elapsed = 10.0 * trace.last_step;
    for j in (0..s.len() - 1).rev() {
        let (a, b) = (s[j], s[j + 1]);
        if (t_end - b.0).abs() <= min_elapsed {
            continue;
        }
        let chord = a.1.dist(b.1);
        if a.1.dist(end).min(b.1.dist(end)) > 2.0 * chord + controls.eps_ret {
            continue;
        }
        let (dist, sp) = arc_distance(field, a, b, end);
        if dist < controls.eps_ret {
            let loop_clear = s[j..]
                .iter()
                .all(|(_, p)| cps.iter().all(|c| c.location.dist(*p) > controls.eps_conv));
            if loop_clear {
                evidence.return_distance = Some(dist);
                evidence.return_time = Some((t_end - (a.0 + sp * (b.0 - a.0))).abs());
                return LimitClassification { verdict: LimitVerdict::NearPeriodic, evidence };
            }
        }
    }
    LimitClassification {
        verdict: LimitVerdict::Undetermined("no convergence, recurrence or exit detected".into()),
        evidence,
    }
}
