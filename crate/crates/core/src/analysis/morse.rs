use std::collections::{BTreeSet, HashMap};

use petgraph::algo::{condensation, has_path_connecting};
use petgraph::graph::{DiGraph, NodeIndex};
use rayon::prelude::*;

use crate::block::{build_triple, BlockOptions, Shape};
use crate::complex::{Cell, Rect};
use crate::field::Field;
use crate::geometry::Point;
use crate::homology::{divide_by_one_plus_t, poincare_polynomial};
use crate::orbits::flow_map;

use super::{
    conley_index, critical_points_in, report_from_triple, AnalysisError, ConleyReport, CriticalPoint, Quantity,
    VerifierOutcome,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseOptions {
    /// Flow time of the transition map.
    pub tau: f64,
    /// Samples per cell side.
    pub samples: usize,
    /// RK4 steps per transition.
    pub steps: usize,
    pub newton_tol: f64,
}

impl Default for MorseOptions {
    fn default() -> Self {
        MorseOptions { tau: 1.0, samples: 4, steps: 64, newton_tol: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct MorseSet {
    pub cells: Vec<Cell>,
    pub centroid: Point,
    /// Indices into [`MorseReport::critical_points`].
    pub critical_points: Vec<usize>,
    pub report: ConleyReport,
}

#[derive(Debug, Clone)]
pub struct MorseReport {
    pub sets: Vec<MorseSet>,
    /// `(a, b)`: set `b` is reachable from set `a`.
    pub order: Vec<(usize, usize)>,
    pub whole: ConleyReport,
    pub critical_points: Vec<CriticalPoint>,
    pub q_poly: Vec<i64>,
    pub inequality_holds: bool,
}

fn pad3(mut p: Vec<i64>) -> Vec<i64> {
    p.resize(3.max(p.len()), 0);
    p
}

/// `(Σ p(t, h(M_i)), p(t, h(I)), Q)` with `Σ p − p_I = (1 + t) Q`.
pub fn morse_quotient(sets: &[&ConleyReport], whole: &ConleyReport) -> Result<(Vec<i64>, Vec<i64>, Vec<i64>), AnalysisError> {
    let mut sum = vec![0i64; 3];
    for r in sets {
        for (k, c) in pad3(poincare_polynomial(&r.forward)).into_iter().enumerate() {
            sum[k] += c;
        }
    }
    let whole_p = pad3(poincare_polynomial(&whole.forward));
    let d: Vec<i64> = sum.iter().zip(&whole_p).map(|(a, b)| a - b).collect();
    match divide_by_one_plus_t(&d) {
        Some(q) => Ok((sum, whole_p, q)),
        None => Err(AnalysisError::NotDivisible { d }),
    }
}

/// Morse sets are the recurrent strongly connected components of the
/// time-τ transition graph on the squares of the block.
pub fn morse_decomposition(
    field: &Field,
    domain: Rect,
    depth: u8,
    shape: &Shape,
    block: &BlockOptions,
    opts: &MorseOptions,
) -> Result<MorseReport, AnalysisError> {
    let whole = conley_index(field, domain, depth, shape, block)?;
    let n = &whole.triple.n;
    let d = n.depth();
    let rect = *n.rect();
    let (hx, hy) = rect.cell_size(d);
    let cells: Vec<Cell> = n.squares().copied().collect();
    let index: HashMap<(u32, u32), usize> = cells.iter().enumerate().map(|(k, c)| ((c.i, c.j), k)).collect();
    let locate = |p: Point| -> Option<usize> {
        let fi = ((p.x - rect.x0) / hx).floor();
        let fj = ((p.y - rect.y0) / hy).floor();
        if !(fi >= 0.0 && fj >= 0.0) {
            return None;
        }
        index.get(&(fi as u32, fj as u32)).copied()
    };

    let m = opts.samples.max(1);
    let targets: Vec<BTreeSet<usize>> = cells
        .par_iter()
        .map(|c| {
            let (lo, _) = c.bounds(&rect);
            let mut out = BTreeSet::new();
            for a in 0..m {
                for b in 0..m {
                    let p = lo + Point::new((a as f64 + 0.5) / m as f64 * hx, (b as f64 + 0.5) / m as f64 * hy);
                    if let Some(q) = flow_map(field, p, opts.tau, opts.steps).and_then(&locate) {
                        out.insert(q);
                    }
                }
            }
            out
        })
        .collect();

    let cps = critical_points_in(field, n, opts.newton_tol);
    let mut graph: DiGraph<usize, ()> = DiGraph::with_capacity(cells.len(), 0);
    let nodes: Vec<NodeIndex> = (0..cells.len()).map(|k| graph.add_node(k)).collect();
    for (k, ts) in targets.iter().enumerate() {
        for &t in ts {
            graph.add_edge(nodes[k], nodes[t], ());
        }
    }
    let mut cp_cells: Vec<Vec<usize>> = Vec::new();
    for cp in &cps {
        let touching: Vec<usize> = n
            .squares_containing(cp.location, 1e-12)
            .iter()
            .filter_map(|c| index.get(&(c.i, c.j)).copied())
            .collect();
        for &u in &touching {
            for &v in &touching {
                if u != v {
                    graph.add_edge(nodes[u], nodes[v], ());
                }
            }
        }
        cp_cells.push(touching);
    }

    let dag = condensation(graph.clone(), true);
    let mut components: Vec<(NodeIndex, Vec<usize>)> = Vec::new();
    for ci in dag.node_indices() {
        let members = &dag[ci];
        let self_loop = members.len() == 1 && graph.contains_edge(nodes[members[0]], nodes[members[0]]);
        let has_cp = cp_cells.iter().any(|cc| cc.iter().any(|c| members.contains(c)));
        if members.len() > 1 || self_loop || has_cp {
            let mut ms = members.clone();
            ms.sort_unstable();
            components.push((ci, ms));
        }
    }

    let centroid = |ms: &[usize]| {
        let s = ms.iter().fold(Point::ORIGIN, |acc, &k| acc + cells[k].center(&rect));
        s * (1.0 / ms.len() as f64)
    };
    components.sort_by(|a, b| {
        let (ca, cb) = (centroid(&a.1), centroid(&b.1));
        (ca.x, ca.y).partial_cmp(&(cb.x, cb.y)).unwrap()
    });

    let mut order = Vec::new();
    for (a, (ca, _)) in components.iter().enumerate() {
        for (b, (cb, _)) in components.iter().enumerate() {
            if a != b && has_path_connecting(&dag, *ca, *cb, None) {
                order.push((a, b));
            }
        }
    }

    let cp_owner = |k: usize, ms: &[usize]| cp_cells[k].iter().any(|c| ms.contains(c));
    let reports: Vec<Result<ConleyReport, AnalysisError>> = components
        .par_iter()
        .enumerate()
        .map(|(idx, (_, ms))| {
            let others: Vec<Point> = components
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != idx)
                .flat_map(|(_, (_, o))| o.iter().map(|&k| cells[k].center(&rect)))
                .chain((0..cps.len()).filter(|&k| !cp_owner(k, ms)).map(|k| cps[k].location))
                .collect();
            let own: Vec<Point> = ms.iter().map(|&k| cells[k].center(&rect)).collect();
            enclosing_block(field, rect, d, &cells, ms, &own, &others, block)
                .map_err(|reason| AnalysisError::MorseSetBlock { index: idx, reason })
        })
        .collect();

    let mut sets = Vec::with_capacity(components.len());
    for ((_, ms), rep) in components.iter().zip(reports) {
        sets.push(MorseSet {
            centroid: centroid(ms),
            critical_points: (0..cps.len()).filter(|&k| cp_owner(k, ms)).collect(),
            cells: ms.iter().map(|&k| cells[k]).collect(),
            report: rep?,
        });
    }
    let refs: Vec<&ConleyReport> = sets.iter().map(|s| &s.report).collect();
    let (_, _, q_poly) = morse_quotient(&refs, &whole)?;
    let inequality_holds = q_poly.iter().all(|&c| c >= 0);
    Ok(MorseReport { sets, order, whole, critical_points: cps, q_poly, inequality_holds })
}

/// Tries a margin rectangle, a disc and an annulus about the set, keeping
/// the first that holds the set, excludes everything else, and is a block.
#[allow(clippy::too_many_arguments)]
fn enclosing_block(
    field: &Field,
    rect: Rect,
    depth: u8,
    cells: &[Cell],
    ms: &[usize],
    own: &[Point],
    others: &[Point],
    block: &BlockOptions,
) -> Result<ConleyReport, String> {
    let (hx, hy) = rect.cell_size(depth);
    let margin = hx.max(hy);
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut corners = Vec::new();
    for &k in ms {
        let (a, b) = cells[k].bounds(&rect);
        lo = Point::new(lo.x.min(a.x), lo.y.min(a.y));
        hi = Point::new(hi.x.max(b.x), hi.y.max(b.y));
        corners.extend([a, b, Point::new(a.x, b.y), Point::new(b.x, a.y)]);
    }
    let c = own.iter().fold(Point::ORIGIN, |acc, &p| acc + p) * (1.0 / own.len() as f64);
    let far = corners.iter().map(|p| p.dist(c)).fold(0.0, f64::max);
    let near = ms
        .iter()
        .map(|&k| {
            let (a, b) = cells[k].bounds(&rect);
            let q = Point::new(c.x.clamp(a.x, b.x), c.y.clamp(a.y, b.y));
            q.dist(c)
        })
        .fold(f64::INFINITY, f64::min);

    let mut candidates = Vec::new();
    if let Ok(r) = Rect::new(lo.x - hx, hi.x + hx, lo.y - hy, hi.y + hy) {
        candidates.push(Shape::Rect(r));
    }
    candidates.push(Shape::Disc { center: c, radius: far + margin });
    if near - margin > 0.0 {
        candidates.push(Shape::Annulus { center: c, r0: near - margin, r1: far + margin });
    }

    let mut failures = Vec::new();
    for shape in candidates {
        if !own.iter().all(|&p| shape.contains(p)) || others.iter().any(|&p| shape.contains(p)) {
            failures.push(format!("{}: overlaps another Morse set", shape.kind()));
            continue;
        }
        match build_triple(field, rect, depth, &shape, block) {
            Ok(t) => return Ok(report_from_triple(t)),
            Err(e) => failures.push(format!("{}: {e}", shape.kind())),
        }
    }
    Err(failures.join("; "))
}

/// Checks `Σ p(t, h(M_i)) = p(t, h(I)) + (1 + t) Q(t)` with `Q ≥ 0`.
pub fn verify_morse_inequalities(morse: &MorseReport, whole: &ConleyReport) -> Result<VerifierOutcome, AnalysisError> {
    let refs: Vec<&ConleyReport> = morse.sets.iter().map(|s| &s.report).collect();
    let (sum, whole_p, q) = morse_quotient(&refs, whole)?;
    let holds = q.iter().all(|&c| c >= 0);
    Ok(VerifierOutcome {
        name: "morse_inequalities".into(),
        holds,
        lhs: Quantity::Ints(sum),
        rhs: Quantity::Ints(whole_p),
        notes: format!("Q = {q:?} (coefficients from t^0)"),
    })
}
