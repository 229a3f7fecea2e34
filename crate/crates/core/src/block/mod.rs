//! Isolating blocks and their regular index triples `(N, L⁻, L⁺)`.

mod face;
mod shape;

pub use face::{
    classify_face, FaceClassification, FaceGeometry, Tangency, TangencyKind, Verdict, ZERO_RESOLUTION,
};
pub use shape::{Region, Shape};

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::complex::{build_set, cell_csv_row, ComplexError, CubicalSet, Rect, CELL_CSV_HEADER, MAX_DEPTH};
use crate::field::{Field, VectorFieldSpec};
use crate::geometry::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlockError {
    #[error("internal tangency at ({}, {}) with h = {h}: not an isolating block", location.x, location.y)]
    InternalTangency { location: Point, h: f64 },
    #[error("degenerate tangency at ({}, {}) with h = {h}", location.x, location.y)]
    DegenerateTangency { location: Point, h: f64 },
    #[error("faces remain ambiguous at depth {depth}")]
    Ambiguous { depth: u8 },
    #[error("ambiguous faces persist up to the depth cap {depth}")]
    DepthExhausted { depth: u8 },
    #[error("block squares are not edge-connected")]
    Disconnected,
    #[error("invalid block shape: {0}")]
    InvalidShape(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

impl BlockError {
    pub fn kind(&self) -> &'static str {
        match self {
            BlockError::InternalTangency { .. } => "InternalTangency",
            BlockError::DegenerateTangency { .. } => "DegenerateTangency",
            BlockError::Ambiguous { .. } => "Ambiguous",
            BlockError::DepthExhausted { .. } => "DepthExhausted",
            BlockError::Disconnected => "Disconnected",
            BlockError::InvalidShape(_) => "InvalidShape",
            BlockError::Complex(ComplexError::EmptySet) => "EmptySet",
            BlockError::Complex(ComplexError::DepthTooLarge(_)) => "DepthTooLarge",
            BlockError::Complex(_) => "ComplexError",
        }
    }

    pub fn location(&self) -> Option<Point> {
        match self {
            BlockError::InternalTangency { location, .. } | BlockError::DegenerateTangency { location, .. } => {
                Some(*location)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockOptions {
    /// Interior Chebyshev samples per face.
    pub samples: usize,
    pub tol: f64,
    pub max_depth: u8,
}

impl Default for BlockOptions {
    fn default() -> Self {
        BlockOptions { samples: 33, tol: 1e-9, max_depth: MAX_DEPTH }
    }
}

#[derive(Debug, Clone)]
pub struct IndexTriple {
    pub n: CubicalSet,
    /// Closure of the exit faces.
    pub lplus: CubicalSet,
    /// Closure of the entrance faces.
    pub lminus: CubicalSet,
    pub faces: Vec<FaceClassification>,
    /// Distinct (necessarily external) tangency points on the boundary.
    pub tangencies: Vec<Tangency>,
    pub depth: u8,
    pub field_name: String,
    pub lambda: Option<f64>,
    pub shape: Shape,
}

impl IndexTriple {
    pub fn exit_faces(&self) -> usize {
        self.faces.iter().filter(|f| f.verdict == Verdict::Exit).count()
    }

    pub fn entrance_faces(&self) -> usize {
        self.faces.iter().filter(|f| f.verdict == Verdict::Entrance).count()
    }

    /// The triple of the reverse flow on the same block.
    pub fn swapped(&self) -> IndexTriple {
        let flip = |v: Verdict| match v {
            Verdict::Exit => Verdict::Entrance,
            Verdict::Entrance => Verdict::Exit,
            Verdict::Ambiguous => Verdict::Ambiguous,
        };
        IndexTriple {
            lplus: self.lminus.clone(),
            lminus: self.lplus.clone(),
            faces: self
                .faces
                .iter()
                .map(|f| FaceClassification { verdict: flip(f.verdict), ..f.clone() })
                .collect(),
            ..self.clone()
        }
    }
}

/// Generator of the reverse flow.
pub fn reverse(spec: &VectorFieldSpec) -> VectorFieldSpec {
    spec.reverse()
}

/// Classifies every boundary face of a fixed `n`. Ambiguity is reported as
/// [`BlockError::Ambiguous`] rather than retried.
pub fn triple_on_set(
    field: &Field,
    n: &CubicalSet,
    region: &Region,
    shape: &Shape,
    opts: &BlockOptions,
) -> Result<IndexTriple, BlockError> {
    if !n.is_edge_connected() {
        return Err(BlockError::Disconnected);
    }
    let rect = *n.rect();
    let faces: Vec<FaceClassification> = n
        .boundary_edges()
        .into_par_iter()
        .map(|(edge, sq)| {
            let geom = FaceGeometry::from_boundary_edge(&rect, edge, sq);
            classify_face(field, &geom, region, opts.samples, opts.tol)
        })
        .collect();

    let mut tangencies: Vec<Tangency> = Vec::new();
    for t in faces.iter().flat_map(|f| f.tangencies.iter()) {
        if !tangencies.iter().any(|u| u.location.dist(t.location) <= 10.0 * ZERO_RESOLUTION) {
            tangencies.push(*t);
        }
    }
    if let Some(t) = tangencies.iter().find(|t| t.kind == TangencyKind::Internal) {
        return Err(BlockError::InternalTangency { location: t.location, h: t.h });
    }
    if let Some(t) = tangencies.iter().find(|t| t.kind == TangencyKind::Degenerate) {
        return Err(BlockError::DegenerateTangency { location: t.location, h: t.h });
    }
    if faces.iter().any(|f| f.verdict == Verdict::Ambiguous) {
        return Err(BlockError::Ambiguous { depth: n.depth() });
    }

    let pick = |v: Verdict| {
        CubicalSet::from_cells(rect, n.depth(), faces.iter().filter(|f| f.verdict == v).map(|f| f.face.cell))
    };
    Ok(IndexTriple {
        n: n.clone(),
        lplus: pick(Verdict::Exit),
        lminus: pick(Verdict::Entrance),
        faces,
        tangencies,
        depth: n.depth(),
        field_name: field.name().to_string(),
        lambda: field.lambda(),
        shape: *shape,
    })
}

/// Builds the block selected by `shape` on the `domain` grid and its index
/// triple, refining past `depth` while faces stay ambiguous.
pub fn build_triple(
    field: &Field,
    domain: Rect,
    depth: u8,
    shape: &Shape,
    opts: &BlockOptions,
) -> Result<IndexTriple, BlockError> {
    if !shape.is_valid() {
        return Err(BlockError::InvalidShape(shape.to_string()));
    }
    let cap = opts.max_depth.min(MAX_DEPTH);
    if depth > cap {
        return Err(ComplexError::DepthTooLarge(depth).into());
    }
    let region = Region::new(&domain, shape);
    let mut d = depth;
    loop {
        let n = build_set(domain, d, |p| shape.contains(p))?;
        match triple_on_set(field, &n, &region, shape, opts) {
            Err(BlockError::Ambiguous { .. }) if d < cap => d += 1,
            Err(BlockError::Ambiguous { depth }) => return Err(BlockError::DepthExhausted { depth }),
            other => return other,
        }
    }
}

pub const TRIPLE_CSV_HEADER_PREFIX: &str = "part";

/// Cell export of all three sets with a leading `part` column.
pub fn triple_csv(t: &IndexTriple) -> String {
    let mut out = format!("{TRIPLE_CSV_HEADER_PREFIX},{CELL_CSV_HEADER}\n");
    for (part, set) in [("N", &t.n), ("Lplus", &t.lplus), ("Lminus", &t.lminus)] {
        for c in set.cells() {
            let _ = writeln!(out, "{part},{}", cell_csv_row(c, set.rect()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Axis, Cell};
    use crate::field::catalogue;

    fn unit_square() -> Rect {
        Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap()
    }

    fn triple(name: &str, depth: u8) -> Result<IndexTriple, BlockError> {
        let f = catalogue(name).unwrap().bind(None).unwrap();
        build_triple(&f, unit_square(), depth, &Shape::Full, &BlockOptions::default())
    }

    fn top_edges(s: &CubicalSet) -> Vec<Cell> {
        s.cells_of_dim(1).copied().collect()
    }

    #[test]
    fn saddle_exits_through_vertical_sides() {
        let t = triple("saddle", 1).unwrap();
        assert_eq!(t.faces.len(), 8);
        let lp = top_edges(&t.lplus);
        let lm = top_edges(&t.lminus);
        assert_eq!(lp.len(), 4);
        assert_eq!(lm.len(), 4);
        assert!(lp.iter().all(|e| e.axis == Some(Axis::Vertical)));
        assert!(lm.iter().all(|e| e.axis == Some(Axis::Horizontal)));
        // corners are shared as vertices only
        let both = t.lplus.intersection(&t.lminus);
        assert_eq!(both.counts(), [4, 0, 0]);
    }

    #[test]
    fn node_has_empty_exit_set() {
        let t = triple("node", 2).unwrap();
        assert!(t.lplus.is_empty());
        assert_eq!(t.entrance_faces(), 16);
    }

    #[test]
    fn zpow2_fails_with_internal_tangency() {
        for depth in 0..=4 {
            match triple("zpow2", depth) {
                Err(BlockError::InternalTangency { location, h }) => {
                    assert!(location.dist(Point::new(0.0, 1.0)) < 1e-6 || location.dist(Point::new(0.0, -1.0)) < 1e-6);
                    assert!(h < 0.0);
                }
                other => panic!("depth {depth}: {other:?}"),
            }
        }
    }

    #[test]
    fn zbarpow2_refines_to_depth_one() {
        let t = triple("zbarpow2", 0).unwrap();
        assert_eq!(t.depth, 1);
        assert!(t.tangencies.iter().all(|t| t.kind == TangencyKind::External));
        assert!(t.tangencies.iter().any(|t| t.location == Point::new(0.0, 1.0)));
    }

    #[test]
    fn reverse_swaps_exit_and_entrance() {
        for name in ["saddle", "node", "source", "zbarpow2"] {
            let spec = catalogue(name).unwrap();
            let fwd = build_triple(&spec.bind(None).unwrap(), unit_square(), 2, &Shape::Full, &BlockOptions::default()).unwrap();
            let bwd = build_triple(&reverse(&spec).bind(None).unwrap(), unit_square(), 2, &Shape::Full, &BlockOptions::default()).unwrap();
            assert_eq!(fwd.n, bwd.n, "{name}");
            assert_eq!(fwd.lplus, bwd.lminus, "{name}");
            assert_eq!(fwd.lminus, bwd.lplus, "{name}");
        }
    }

    #[test]
    fn reverse_saddle_exits_horizontally() {
        let spec = reverse(&catalogue("saddle").unwrap());
        let t = build_triple(&spec.bind(None).unwrap(), unit_square(), 1, &Shape::Full, &BlockOptions::default()).unwrap();
        assert!(top_edges(&t.lplus).iter().all(|e| e.axis == Some(Axis::Horizontal)));
    }

    #[test]
    fn boundary_partition() {
        for name in ["saddle", "node", "source", "zbarpow2"] {
            let t = triple(name, 3).unwrap();
            let boundary: Vec<Cell> = t.n.boundary_edges().into_iter().map(|(e, _)| e).collect();
            for e in &boundary {
                assert!(t.lplus.contains(e) ^ t.lminus.contains(e), "{name} {e:?}");
            }
            assert_eq!(t.lplus.intersection(&t.lminus).count(1), 0);
        }
    }

    #[test]
    fn hopf_annulus_is_attracting() {
        let f = catalogue("hopf").unwrap().bind(None).unwrap();
        let domain = Rect::new(-1.5, 1.5, -1.5, 1.5).unwrap();
        let shape = Shape::Annulus { center: Point::ORIGIN, r0: 0.5, r1: 1.5 };
        let t = build_triple(&f, domain, 4, &shape, &BlockOptions::default()).unwrap();
        assert!(t.lplus.is_empty());
        assert!(t.exit_faces() == 0 && t.entrance_faces() > 0);
    }

    #[test]
    fn csv_has_part_column() {
        let t = triple("saddle", 1).unwrap();
        let csv = triple_csv(&t);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "part,dim,depth,i,j,axis,x_min,y_min,x_max,y_max");
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), t.n.len() + t.lplus.len() + t.lminus.len());
        assert!(rows.iter().any(|r| r.starts_with("Lplus,1,")));
    }

    #[test]
    fn invalid_shape_and_depth() {
        let f = catalogue("node").unwrap().bind(None).unwrap();
        let bad = Shape::Disc { center: Point::ORIGIN, radius: -1.0 };
        assert!(matches!(
            build_triple(&f, unit_square(), 1, &bad, &BlockOptions::default()),
            Err(BlockError::InvalidShape(_))
        ));
        assert!(matches!(
            build_triple(&f, unit_square(), 13, &Shape::Full, &BlockOptions::default()),
            Err(BlockError::Complex(ComplexError::DepthTooLarge(13)))
        ));
    }
}
