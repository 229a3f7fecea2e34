use std::f64::consts::PI;

use rayon::prelude::*;

use crate::complex::{Cell, CubicalSet, Rect};
use crate::field::Field;
use crate::geometry::Point;

use super::AnalysisError;

/// Largest sample count tried by [`winding_index`].
pub const MAX_WINDING_SAMPLES: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub location: Point,
    /// Winding index on a small circle; `None` if it could not be certified.
    pub winding_index: Option<i64>,
    pub newton_converged: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub index: i64,
    /// Unrounded turning number.
    pub raw: f64,
    pub samples: usize,
}

/// Turning number of `F` along the circle, refining the sampling until every
/// angle increment is below π/3.
pub fn winding(field: &Field, center: Point, radius: f64, initial_samples: usize, gap: f64) -> Result<Winding, AnalysisError> {
    let mut n = initial_samples.max(8);
    loop {
        let values: Vec<Point> = (0..n)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64;
                field.value(center + Point::new(th.cos(), th.sin()) * radius)
            })
            .collect();
        let min_norm = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        if !(min_norm > 1e-8) {
            return Err(AnalysisError::VanishingOnCurve { min_norm });
        }
        let mut total = 0.0;
        let mut largest: f64 = 0.0;
        for k in 0..n {
            let (a, b) = (values[k], values[(k + 1) % n]);
            let d = a.cross(b).atan2(a.dot(b));
            largest = largest.max(d.abs());
            total += d;
        }
        if largest < PI / 3.0 {
            let raw = total / (2.0 * PI);
            let index = raw.round();
            if (raw - index).abs() > gap {
                return Err(AnalysisError::RoundingGap { raw });
            }
            return Ok(Winding { index: index as i64, raw, samples: n });
        }
        if n >= MAX_WINDING_SAMPLES {
            return Err(AnalysisError::NonConvergent { samples: n });
        }
        n *= 2;
    }
}

pub fn winding_index(field: &Field, center: Point, radius: f64, initial_samples: usize) -> Result<i64, AnalysisError> {
    winding(field, center, radius, initial_samples, 1e-6).map(|w| w.index)
}

fn newton(field: &Field, start: Point) -> Point {
    let mut x = start;
    for _ in 0..200 {
        let f = field.value(x);
        let j = field.jacobian(x);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if !f.is_finite() || !det.is_finite() || det == 0.0 {
            break;
        }
        let step = Point::new(
            (j[1][1] * f.x - j[0][1] * f.y) / det,
            (-j[1][0] * f.x + j[0][0] * f.y) / det,
        );
        x = x - step;
        if !x.is_finite() || step.norm() <= 1e-15 * (1.0 + x.norm()) {
            break;
        }
    }
    x
}

fn is_candidate(field: &Field, rect: &Rect, c: &Cell) -> bool {
    let (lo, hi) = c.bounds(rect);
    let pts = [lo, Point::new(hi.x, lo.y), Point::new(lo.x, hi.y), hi, c.center(rect)];
    let vals: Vec<Point> = pts.iter().map(|&p| field.value(p)).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let spans = |g: fn(&Point) -> f64| {
        let lo = vals.iter().map(g).fold(f64::INFINITY, f64::min);
        let hi = vals.iter().map(g).fold(f64::NEG_INFINITY, f64::max);
        lo <= 0.0 && hi >= 0.0
    };
    spans(|v| v.x) && spans(|v| v.y)
}

/// Zeros of the field in `rect`, seeded from grid cells where both
/// components change sign, each with its winding index.
pub fn find_critical_points(field: &Field, rect: &Rect, depth: u8, newton_tol: f64) -> Vec<CriticalPoint> {
    let n = 1u32 << depth;
    let (hx, hy) = rect.cell_size(depth);
    let found: Vec<Point> = (0..n * n)
        .into_par_iter()
        .filter_map(|k| {
            let c = Cell::square(depth, k % n, k / n);
            if !is_candidate(field, rect, &c) {
                return None;
            }
            let x = newton(field, c.center(rect));
            let ok = x.is_finite() && rect.contains(x) && field.value(x).norm() <= newton_tol;
            ok.then_some(x)
        })
        .collect();

    let mut pts: Vec<Point> = Vec::new();
    for p in found {
        if !pts.iter().any(|q| q.dist(p) <= 1e-6) {
            pts.push(p);
        }
    }
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    let radius = 0.5 * hx.min(hy);
    pts.into_iter()
        .map(|p| {
            let residual = field.value(p).norm();
            CriticalPoint {
                location: p,
                winding_index: winding_index(field, p, radius, 64).ok(),
                newton_converged: residual <= newton_tol,
                residual,
            }
        })
        .collect()
}

/// Critical points lying in the closed squares of `n`.
pub fn critical_points_in(field: &Field, n: &CubicalSet, newton_tol: f64) -> Vec<CriticalPoint> {
    let depth = n.depth().max(5);
    find_critical_points(field, n.rect(), depth, newton_tol)
        .into_iter()
        .filter(|c| !n.squares_containing(c.location, 1e-12).is_empty())
        .collect()
}
