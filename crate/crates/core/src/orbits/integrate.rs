use std::fmt::Write as _;

use thiserror::Error;

use crate::complex::Rect;
use crate::field::Field;
use crate::geometry::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrbitError {
    #[error("step size underflow at t = {t} near ({}, {})", at.x, at.y)]
    StepUnderflow { t: f64, at: Point },
    #[error("seed ({}, {}) lies outside the domain", seed.x, seed.y)]
    SeedOutsideDomain { seed: Point },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    TimeLimit,
    DomainExit { at: Point },
    Stalled,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::TimeLimit => "time_limit",
            Termination::DomainExit { .. } => "domain_exit",
            Termination::Stalled => "stalled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Controls {
    pub rel_tol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub stall_tol: f64,
    pub domain: Rect,
    pub eps_conv: f64,
    /// Distance bound for the monotone-approach clause.
    pub eps_approach: f64,
    pub eps_ret: f64,
    /// Fraction of the trace (by sample count) used as the dwell window.
    pub dwell_fraction: f64,
}

impl Controls {
    pub fn new(domain: Rect) -> Self {
        Controls {
            rel_tol: 1e-9,
            h_init: 1e-2,
            h_max: 0.5,
            h_min: 1e-12,
            stall_tol: 1e-12,
            domain,
            eps_conv: 5e-3,
            eps_approach: 5e-2,
            eps_ret: 1e-4,
            dwell_fraction: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub seed: Point,
    pub direction: Direction,
    /// `(t, state)`; `t` decreases for backward traces.
    pub samples: Vec<(f64, Point)>,
    pub termination: Termination,
    /// Last accepted step length (positive).
    pub last_step: f64,
}

impl OrbitTrace {
    pub fn end(&self) -> Point {
        self.samples.last().map(|s| s.1).unwrap_or(self.seed)
    }

    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.0.abs())
    }
}

/// One classical Runge–Kutta step.
pub fn rk4_step(field: &Field, p: Point, h: f64) -> Point {
    let k1 = field.value(p);
    let k2 = field.value(p + k1 * (0.5 * h));
    let k3 = field.value(p + k2 * (0.5 * h));
    let k4 = field.value(p + k3 * h);
    p + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Fixed-step flow map `φ^τ(p)` with `steps` RK4 steps; `None` on blow-up.
pub fn flow_map(field: &Field, p: Point, tau: f64, steps: usize) -> Option<Point> {
    let h = tau / steps as f64;
    let mut q = p;
    for _ in 0..steps {
        q = rk4_step(field, q, h);
        if !q.is_finite() {
            return None;
        }
    }
    Some(q)
}

/// Adaptive RK4 with step doubling. Backward traces integrate the reversed
/// field and record negative times.
pub fn integrate(
    field: &Field,
    seed: Point,
    direction: Direction,
    t_max: f64,
    controls: &Controls,
) -> Result<OrbitTrace, OrbitError> {
    if !controls.domain.contains(seed) {
        return Err(OrbitError::SeedOutsideDomain { seed });
    }
    let reversed;
    let (f, sign) = match direction {
        Direction::Forward => (field, 1.0),
        Direction::Backward => {
            reversed = field.reversed();
            (&reversed, -1.0)
        }
    };
    let mut t = 0.0;
    let mut p = seed;
    let mut h = controls.h_init.min(controls.h_max);
    let mut accepted_run = 0;
    let mut samples = vec![(0.0, seed)];
    let mut last_step = h;
    let termination = loop {
        if t >= t_max {
            break Termination::TimeLimit;
        }
        let step = h.min(t_max - t);
        let full = rk4_step(f, p, step);
        let half = rk4_step(f, rk4_step(f, p, 0.5 * step), 0.5 * step);
        let err = (half - full).norm();
        let bound = controls.rel_tol * (1.0 + p.norm());
        if !(err <= bound) || !half.is_finite() {
            h = 0.5 * step;
            accepted_run = 0;
            if h < controls.h_min {
                return Err(OrbitError::StepUnderflow { t: sign * t, at: p });
            }
            continue;
        }
        let prev = p;
        p = half;
        t = if step == t_max - t { t_max } else { t + step };
        last_step = step;
        samples.push((sign * t, p));
        if !controls.domain.contains(p) {
            break Termination::DomainExit { at: p };
        }
        if f.value(p).norm() < controls.stall_tol && (p - prev).norm() <= 1e-15 * (1.0 + p.norm()) {
            break Termination::Stalled;
        }
        accepted_run += 1;
        if accepted_run >= 5 {
            h = (1.5 * h).min(controls.h_max);
            accepted_run = 0;
        }
    };
    Ok(OrbitTrace { seed, direction, samples, termination, last_step })
}

pub const TRACE_CSV_HEADER: &str = "t,x,y";

pub fn trace_csv(trace: &OrbitTrace) -> String {
    let mut out = format!("{TRACE_CSV_HEADER}\n");
    for (t, p) in &trace.samples {
        let _ = writeln!(out, "{t},{},{}", p.x, p.y);
    }
    out
}
