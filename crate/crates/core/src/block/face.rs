use std::f64::consts::PI;

use crate::complex::{Axis, Cell, Rect};
use crate::field::Field;
use crate::geometry::Point;

use super::shape::Region;

/// Spatial resolution of bisection-located zeros.
pub const ZERO_RESOLUTION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Exit,
    Entrance,
    Ambiguous,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Exit => "exit",
            Verdict::Entrance => "entrance",
            Verdict::Ambiguous => "ambiguous",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TangencyKind {
    Internal,
    External,
    Degenerate,
}

impl TangencyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TangencyKind::Internal => "internal",
            TangencyKind::External => "external",
            TangencyKind::Degenerate => "degenerate",
        }
    }
}

/// A boundary point where the normal component of the field vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangency {
    pub location: Point,
    pub kind: TangencyKind,
    /// Second-order value `∇g · F` at the zero.
    pub h: f64,
}

/// A boundary edge of a block with its outward axis normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceGeometry {
    pub cell: Cell,
    pub a: Point,
    pub b: Point,
    pub normal: Point,
}

impl FaceGeometry {
    /// `square` is the single block square adjacent to boundary edge `edge`.
    pub fn from_boundary_edge(rect: &Rect, edge: Cell, square: Cell) -> Self {
        let (a, b) = edge.bounds(rect);
        let normal = match edge.axis {
            Some(Axis::Horizontal) if square.j == edge.j => Point::new(0.0, -1.0),
            Some(Axis::Horizontal) => Point::new(0.0, 1.0),
            Some(Axis::Vertical) if square.i == edge.i => Point::new(-1.0, 0.0),
            _ => Point::new(1.0, 0.0),
        };
        FaceGeometry { cell: edge, a, b, normal }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn at(&self, s: f64) -> Point {
        if s == 1.0 {
            self.b
        } else {
            self.a + (self.b - self.a) * s
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceClassification {
    pub face: FaceGeometry,
    pub verdict: Verdict,
    pub tangencies: Vec<Tangency>,
}

#[derive(Debug, Clone, Copy)]
struct Probe {
    component: usize,
    q: Point,
    nu: Point,
    f: Point,
    g: f64,
}

fn probe(field: &Field, region: &Region, face: &FaceGeometry, p: Point) -> Probe {
    let component = region.nearest(p, face.normal);
    probe_component(field, region, component, p)
}

fn probe_component(field: &Field, region: &Region, component: usize, p: Point) -> Probe {
    let c = &region.components[component];
    let q = c.project(p);
    let nu = c.normal(q);
    let f = field.value(q);
    Probe { component, q, nu, f, g: f.dot(nu) }
}

/// `h = νᵀ J F + κ |F_tan|²`, the derivative of `g` along the flow.
fn second_order(field: &Field, region: &Region, pr: &Probe) -> f64 {
    let j = field.jacobian(pr.q);
    let jf = Point::new(
        j[0][0] * pr.f.x + j[0][1] * pr.f.y,
        j[1][0] * pr.f.x + j[1][1] * pr.f.y,
    );
    let tangential = pr.f - pr.nu * pr.f.dot(pr.nu);
    pr.nu.dot(jf) + region.components[pr.component].curvature() * tangential.dot(tangential)
}

fn sign(g: f64, tol: f64) -> i8 {
    if !g.is_finite() || g.abs() <= tol {
        0
    } else if g > 0.0 {
        1
    } else {
        -1
    }
}

/// Sample parameters in `[0, 1]`: both endpoints plus `m` Chebyshev nodes.
fn sample_params(m: usize) -> Vec<f64> {
    let mut s = Vec::with_capacity(m + 2);
    s.push(0.0);
    for k in 0..m {
        s.push(0.5 * (1.0 - (PI * (2 * k + 1) as f64 / (2 * m) as f64).cos()));
    }
    s.push(1.0);
    s
}

/// Classifies one boundary face by the sign of the outward normal component
/// `g = F · ν` of the field, measured against the smooth boundary of `region`.
pub fn classify_face(
    field: &Field,
    face: &FaceGeometry,
    region: &Region,
    samples: usize,
    tol: f64,
) -> FaceClassification {
    let params = sample_params(samples.max(1));
    let probes: Vec<Probe> = params.iter().map(|&s| probe(field, region, face, face.at(s))).collect();
    let signs: Vec<i8> = probes.iter().map(|p| sign(p.g, tol)).collect();
    let len = face.length();
    let last = params.len() - 1;

    let has_pos = signs.contains(&1);
    let has_neg = signs.contains(&-1);
    let mut tangencies = Vec::new();

    if !has_pos && !has_neg {
        let mid = probe(field, region, face, face.at(0.5));
        tangencies.push(Tangency {
            location: mid.q,
            kind: TangencyKind::Degenerate,
            h: second_order(field, region, &mid),
        });
        return FaceClassification { face: *face, verdict: Verdict::Ambiguous, tangencies };
    }

    // runs of near-zero samples
    let mut k = 0;
    while k <= last {
        if signs[k] != 0 {
            k += 1;
            continue;
        }
        let start = k;
        while k <= last && signs[k] == 0 {
            k += 1;
        }
        let end = k - 1;
        let rep = if start == 0 {
            0
        } else if end == last {
            last
        } else {
            (start + end) / 2
        };
        let at_end = rep == 0 || rep == last;
        tangencies.push(tangency_at(field, region, face, &probes[rep], at_end, tol));
    }

    // strict sign changes between neighbouring samples
    for k in 0..last {
        if signs[k] * signs[k + 1] == -1 {
            let (mut lo, mut hi) = (params[k], params[k + 1]);
            let s_lo = signs[k];
            while (hi - lo) * len > ZERO_RESOLUTION {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let g = probe(field, region, face, face.at(mid)).g;
                if sign(g, 0.0) == s_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let z = 0.5 * (lo + hi);
            let pr = probe(field, region, face, face.at(z));
            tangencies.push(tangency_at(field, region, face, &pr, false, tol));
        }
    }

    let verdict = if has_pos && has_neg {
        Verdict::Ambiguous
    } else if has_pos {
        Verdict::Exit
    } else {
        Verdict::Entrance
    };
    tangencies.sort_by(|a, b| {
        (a.location.x, a.location.y).partial_cmp(&(b.location.x, b.location.y)).unwrap_or(std::cmp::Ordering::Equal)
    });
    FaceClassification { face: *face, verdict, tangencies }
}

fn tangency_at(
    field: &Field,
    region: &Region,
    face: &FaceGeometry,
    pr: &Probe,
    at_endpoint: bool,
    tol: f64,
) -> Tangency {
    if !pr.g.is_finite() {
        return Tangency { location: pr.q, kind: TangencyKind::Degenerate, h: f64::NAN };
    }
    let h = second_order(field, region, pr);
    if at_endpoint && crosses_adjacent_side(field, region, face, pr, tol) {
        return Tangency { location: pr.q, kind: TangencyKind::External, h };
    }
    let kind = if h > tol {
        TangencyKind::External
    } else if h < -tol {
        TangencyKind::Internal
    } else {
        TangencyKind::Degenerate
    };
    Tangency { location: pr.q, kind, h }
}

/// At a corner of the region the orbit may graze one side while crossing
/// the other transversally; then it never runs along the inside of the block.
fn crosses_adjacent_side(field: &Field, region: &Region, _face: &FaceGeometry, pr: &Probe, tol: f64) -> bool {
    let p = pr.q;
    region.components.iter().enumerate().any(|(k, c)| {
        if k == pr.component || c.phi(p).abs() > 1e-12 * (1.0 + p.norm()) {
            return false;
        }
        let other = probe_component(field, region, k, p);
        other.nu.dot(pr.nu) < 1.0 - 1e-9 && sign(other.g, tol) != 0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::catalogue;

    fn unit_square() -> Rect {
        Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap()
    }

    fn bound(name: &str) -> Field {
        catalogue(name).unwrap().bind(None).unwrap()
    }

    fn face(a: (f64, f64), b: (f64, f64), n: (f64, f64)) -> FaceGeometry {
        FaceGeometry {
            cell: Cell::edge(0, Axis::Horizontal, 0, 0),
            a: a.into(),
            b: b.into(),
            normal: n.into(),
        }
    }

    #[test]
    fn chebyshev_params_are_sorted_and_interior() {
        let s = sample_params(33);
        assert_eq!(s.len(), 35);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!((s[0], s[34]), (0.0, 1.0));
    }

    #[test]
    fn saddle_right_face_exits() {
        let f = bound("saddle");
        let fc = classify_face(&f, &face((1.0, 0.0), (1.0, 1.0), (1.0, 0.0)), &Region::rect(&unit_square()), 33, 1e-9);
        assert_eq!(fc.verdict, Verdict::Exit);
        assert!(fc.tangencies.is_empty());
    }

    #[test]
    fn zpow2_top_face_has_internal_tangency() {
        let f = bound("zpow2");
        let fc = classify_face(&f, &face((-1.0, 1.0), (1.0, 1.0), (0.0, 1.0)), &Region::rect(&unit_square()), 33, 1e-9);
        assert_eq!(fc.verdict, Verdict::Ambiguous);
        let internal: Vec<_> = fc.tangencies.iter().filter(|t| t.kind == TangencyKind::Internal).collect();
        assert_eq!(internal.len(), 1);
        assert!(internal[0].location.dist(Point::new(0.0, 1.0)) < 1e-9);
        assert!((internal[0].h + 2.0).abs() < 1e-6);
        // the corners are grazing zeros of P but the field crosses the sides
        assert!(fc.tangencies.iter().all(|t| t.kind != TangencyKind::Degenerate));
    }

    #[test]
    fn zbarpow2_top_face_external_then_split() {
        let f = bound("zbarpow2");
        let region = Region::rect(&unit_square());
        let whole = classify_face(&f, &face((-1.0, 1.0), (1.0, 1.0), (0.0, 1.0)), &region, 33, 1e-9);
        assert_eq!(whole.verdict, Verdict::Ambiguous);
        let mid: Vec<_> = whole.tangencies.iter().filter(|t| t.location.dist(Point::new(0.0, 1.0)) < 1e-9).collect();
        assert_eq!(mid.len(), 1);
        assert_eq!(mid[0].kind, TangencyKind::External);
        assert!((mid[0].h - 2.0).abs() < 1e-6);

        let left = classify_face(&f, &face((-1.0, 1.0), (0.0, 1.0), (0.0, 1.0)), &region, 33, 1e-9);
        let right = classify_face(&f, &face((0.0, 1.0), (1.0, 1.0), (0.0, 1.0)), &region, 33, 1e-9);
        assert_eq!(left.verdict, Verdict::Exit);
        assert_eq!(right.verdict, Verdict::Entrance);
        assert!(left.tangencies.iter().any(|t| t.location == Point::new(0.0, 1.0) && t.kind == TangencyKind::External));
    }

    #[test]
    fn lie_derivative_matches_finite_difference_along_orbit() {
        // d/dt g(φ_t(p)) at t = 0 for zpow2 at (0, 1) with the top-side normal
        let f = bound("zpow2");
        let g = |p: Point| f.value(p).y;
        let p = Point::new(0.0, 1.0);
        let dt = 1e-6;
        let v = f.value(p);
        let fd = (g(p + v * dt) - g(p - v * dt)) / (2.0 * dt);
        let region = Region::rect(&unit_square());
        let fc = classify_face(&f, &face((-1.0, 1.0), (1.0, 1.0), (0.0, 1.0)), &region, 33, 1e-9);
        let t = fc.tangencies.iter().find(|t| t.kind == TangencyKind::Internal).unwrap();
        assert!((t.h - fd).abs() < 1e-6);
    }

    #[test]
    fn identically_tangent_face_is_degenerate() {
        let f = crate::field::VectorFieldSpec::parse("x - 1", "-y").unwrap().bind(None).unwrap();
        let fc = classify_face(&f, &face((1.0, -1.0), (1.0, 1.0), (1.0, 0.0)), &Region::rect(&unit_square()), 33, 1e-9);
        assert_eq!(fc.verdict, Verdict::Ambiguous);
        assert_eq!(fc.tangencies[0].kind, TangencyKind::Degenerate);
    }
}
