use std::fmt;

use crate::complex::Rect;
use crate::geometry::Point;

/// User-chosen block outline. The block is the set of grid squares whose
/// centers lie inside both the shape and the domain rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// The whole domain rectangle.
    Full,
    Rect(Rect),
    Disc { center: Point, radius: f64 },
    Annulus { center: Point, r0: f64, r1: f64 },
}

impl Shape {
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Shape::Full => true,
            Shape::Rect(r) => r.contains(p),
            Shape::Disc { center, radius } => p.dist(center) < radius,
            Shape::Annulus { center, r0, r1 } => {
                let d = p.dist(center);
                d > r0 && d < r1
            }
        }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            Shape::Full | Shape::Rect(_) => true,
            Shape::Disc { center, radius } => center.is_finite() && radius > 0.0,
            Shape::Annulus { center, r0, r1 } => center.is_finite() && r0 >= 0.0 && r1 > r0,
        }
    }

    /// Smallest axis-aligned rectangle holding the shape (`None` for `Full`).
    pub fn bounding_rect(&self) -> Option<Rect> {
        match *self {
            Shape::Full => None,
            Shape::Rect(r) => Some(r),
            Shape::Disc { center, radius: r } | Shape::Annulus { center, r1: r, .. } => {
                Rect::square(center, r).ok()
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Shape::Full => "full",
            Shape::Rect(_) => "rect",
            Shape::Disc { .. } => "disc",
            Shape::Annulus { .. } => "annulus",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Full => write!(f, "full"),
            Shape::Rect(r) => write!(f, "rect [{}, {}] x [{}, {}]", r.x0, r.x1, r.y0, r.y1),
            Shape::Disc { center, radius } => {
                write!(f, "disc center ({}, {}) radius {}", center.x, center.y, radius)
            }
            Shape::Annulus { center, r0, r1 } => {
                write!(f, "annulus center ({}, {}) radii {}..{}", center.x, center.y, r0, r1)
            }
        }
    }
}

/// One smooth piece of the boundary of `shape ∩ domain`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Component {
    /// `x = value` (vertical) or `y = value` (horizontal) with outward sign ±1.
    Vertical { x: f64, sign: f64 },
    Horizontal { y: f64, sign: f64 },
    /// Circle; `outer` when the region lies inside it.
    Circle { center: Point, radius: f64, outer: bool },
}

impl Component {
    /// Signed offset, positive on the outside.
    pub fn phi(&self, p: Point) -> f64 {
        match *self {
            Component::Vertical { x, sign } => sign * (p.x - x),
            Component::Horizontal { y, sign } => sign * (p.y - y),
            Component::Circle { center, radius, outer } => {
                let d = p.dist(center) - radius;
                if outer {
                    d
                } else {
                    -d
                }
            }
        }
    }

    pub fn project(&self, p: Point) -> Point {
        match *self {
            Component::Vertical { x, .. } => Point::new(x, p.y),
            Component::Horizontal { y, .. } => Point::new(p.x, y),
            Component::Circle { center, radius, .. } => {
                let v = p - center;
                let d = v.norm();
                if d == 0.0 {
                    center + Point::new(radius, 0.0)
                } else {
                    center + v * (radius / d)
                }
            }
        }
    }

    /// Outward unit normal at a point of the component.
    pub fn normal(&self, q: Point) -> Point {
        match *self {
            Component::Vertical { sign, .. } => Point::new(sign, 0.0),
            Component::Horizontal { sign, .. } => Point::new(0.0, sign),
            Component::Circle { center, radius, outer } => {
                let v = (q - center) * (1.0 / radius);
                if outer {
                    v
                } else {
                    -v
                }
            }
        }
    }

    /// Coefficient of `|F_tan|²` in the second-order test (the shape operator).
    pub fn curvature(&self) -> f64 {
        match *self {
            Component::Circle { radius, outer: true, .. } => 1.0 / radius,
            Component::Circle { radius, outer: false, .. } => -1.0 / radius,
            _ => 0.0,
        }
    }
}

fn rect_sides(r: &Rect) -> [Component; 4] {
    [
        Component::Vertical { x: r.x0, sign: -1.0 },
        Component::Vertical { x: r.x1, sign: 1.0 },
        Component::Horizontal { y: r.y0, sign: -1.0 },
        Component::Horizontal { y: r.y1, sign: 1.0 },
    ]
}

/// The region `shape ∩ domain` described by its boundary components.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub(crate) components: Vec<Component>,
}

impl Region {
    pub fn new(domain: &Rect, shape: &Shape) -> Self {
        let mut components = rect_sides(domain).to_vec();
        match *shape {
            Shape::Full => {}
            Shape::Rect(r) => components.extend(rect_sides(&r)),
            Shape::Disc { center, radius } => {
                components.push(Component::Circle { center, radius, outer: true })
            }
            Shape::Annulus { center, r0, r1 } => {
                components.push(Component::Circle { center, radius: r1, outer: true });
                if r0 > 0.0 {
                    components.push(Component::Circle { center, radius: r0, outer: false });
                }
            }
        }
        Region { components }
    }

    pub fn rect(domain: &Rect) -> Self {
        Region::new(domain, &Shape::Full)
    }

    /// Index of the component nearest to `p`; ties go to the component whose
    /// normal best matches `hint`.
    pub(crate) fn nearest(&self, p: Point, hint: Point) -> usize {
        let dist: Vec<f64> = self.components.iter().map(|c| c.phi(p).abs()).collect();
        let best = dist.iter().copied().fold(f64::INFINITY, f64::min);
        let slack = 1e-12 * (1.0 + best);
        (0..self.components.len())
            .filter(|&k| dist[k] <= best + slack)
            .max_by(|&a, &b| {
                let na = self.components[a].normal(self.components[a].project(p)).dot(hint);
                let nb = self.components[b].normal(self.components[b].project(p)).dot(hint);
                na.total_cmp(&nb).then(b.cmp(&a))
            })
            .expect("a region has at least four components")
    }
}
