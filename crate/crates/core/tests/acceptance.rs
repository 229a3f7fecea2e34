//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Built with `harness = false` so the lines always show in
//! `cargo test` output.

use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use conley_lab::analysis::{
    conley_index, continuation_check, critical_points_in, morse_decomposition, verify_duality, verify_exit_homology,
    verify_index_euler, verify_index_sum, verify_morse_inequalities, winding, Classification, ConleyReport,
    CriticalPoint, MorseOptions, Quantity,
};
use conley_lab::block::{build_triple, BlockError, BlockOptions, Shape};
use conley_lab::complex::{relative_complex, Cell, CubicalSet, Rect};
use conley_lab::field::{catalogue, Field, CATALOGUE};
use conley_lab::geometry::Point;
use conley_lab::homology::{evaluate, homology_of, poincare_polynomial, smith_normal_form, Coefficients};
use conley_lab::orbits::{homoclinic_scan, integrate, Controls, Direction};

type Verdict = (bool, String);

fn f(name: &str) -> Field {
    catalogue(name).unwrap().bind(None).unwrap()
}

fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> Rect {
    Rect::new(x0, x1, y0, y1).unwrap()
}

fn unit() -> Rect {
    rect(-1.0, 1.0, -1.0, 1.0)
}

fn index(name: &str, domain: Rect, depth: u8, shape: &Shape) -> ConleyReport {
    conley_index(&f(name), domain, depth, shape, &BlockOptions::default()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn hopf_annulus() -> ConleyReport {
    let shape = Shape::Annulus { center: Point::ORIGIN, r0: 0.5, r1: 1.5 };
    index("hopf", rect(-1.5, 1.5, -1.5, 1.5), 4, &shape)
}

/// Euler characteristic from cell counts of the quotient, compared with the
/// one read off the homology.
fn chi_consistent(r: &ConleyReport) -> bool {
    let count = |s: &CubicalSet| s.counts();
    let chi = |n: [usize; 3], l: [usize; 3]| (n[0] - l[0]) as i64 - (n[1] - l[1]) as i64 + (n[2] - l[2]) as i64;
    let n = count(&r.triple.n);
    r.forward.euler == chi(n, count(&r.triple.lplus)) && r.backward.euler == chi(n, count(&r.triple.lminus))
}

fn criterion_1(seen: &mut Vec<ConleyReport>) -> Verdict {
    let cases = [
        ("saddle", [0, 1, 0], -1, Classification::Neither),
        ("node", [1, 0, 0], 1, Classification::Attractor),
        ("source", [0, 0, 1], 1, Classification::Repeller),
        ("zbarpow2", [0, 2, 0], -2, Classification::Neither),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, betti, ind, class) in cases {
        let r = index(name, unit(), 1, &Shape::Full);
        let hit = r.forward.betti_q == Some(betti) && r.ind_p == ind && r.classification == class;
        ok &= hit;
        parts.push(format!("{name} {:?} {} {}", r.forward.betti(), r.ind_p, r.classification.as_str()));
        seen.push(r);
    }
    (ok, parts.join("; "))
}

fn criterion_2(seen: &mut Vec<ConleyReport>) -> Verdict {
    let cases = [
        ("saddle", unit(), -1),
        ("node", unit(), 1),
        ("source", unit(), 1),
        ("zbarpow2", unit(), -2),
        ("doublewell", rect(-2.0, 2.0, -1.0, 1.0), 1),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, domain, expected) in cases {
        let r = index(name, domain, 4, &Shape::Full);
        let cps = critical_points_in(&f(name), &r.triple.n, 1e-10);
        let sum: Option<i64> = cps.iter().map(|c: &CriticalPoint| c.winding_index).sum();
        let o = verify_index_sum(&r, &cps);
        let hit = o.holds && r.ind_p == expected && sum == Some(expected);
        ok &= hit;
        parts.push(format!("{name} ind_p={} sum={:?}", r.ind_p, sum));
        seen.push(r);
    }
    (ok, parts.join("; "))
}

fn criterion_3(seen: &mut Vec<ConleyReport>) -> Verdict {
    let mut blocks: Vec<(String, ConleyReport)> = ["saddle", "node", "source", "zbarpow2"]
        .iter()
        .map(|n| (n.to_string(), index(n, unit(), 1, &Shape::Full)))
        .collect();
    blocks.push(("hopf annulus".into(), hopf_annulus()));
    let mut ok = true;
    let mut failed = Vec::new();
    for (name, r) in &blocks {
        let (a, b) = (verify_exit_homology(r), verify_duality(r));
        if !(a.holds && b.holds) {
            ok = false;
            failed.push(name.clone());
        }
    }
    seen.extend(blocks.into_iter().map(|(_, r)| r));
    let detail = if ok { "exit homology and duality hold on 5 blocks".to_string() } else { format!("fails on {failed:?}") };
    (ok, detail)
}

fn criterion_4(seen: &mut Vec<ConleyReport>) -> Verdict {
    let hopf = hopf_annulus();
    let node = index("node", unit(), 1, &Shape::Full);
    let hopf_ok = hopf.triple.lplus.is_empty()
        && hopf.classification == Classification::Attractor
        && hopf.forward.betti_q == Some([1, 1, 0])
        && hopf.ind_p == 0
        && verify_index_euler(&hopf, 0).map(|o| o.holds).unwrap_or(false);
    let node_ok = node.ind_p == 1 && verify_index_euler(&node, 1).map(|o| o.holds).unwrap_or(false);
    let detail = format!(
        "hopf annulus L+ empty={} betti {:?} ind_p={}; node ind_p={}",
        hopf.triple.lplus.is_empty(),
        hopf.forward.betti(),
        hopf.ind_p,
        node.ind_p
    );
    seen.push(hopf);
    seen.push(node);
    (hopf_ok && node_ok, detail)
}

fn criterion_5(seen: &mut Vec<ConleyReport>) -> Verdict {
    let opts = BlockOptions::default();
    let mopts = MorseOptions::default();
    let dw = morse_decomposition(&f("doublewell"), rect(-2.0, 2.0, -1.0, 1.0), 4, &Shape::Full, &opts, &mopts);
    let disc = Shape::Disc { center: Point::ORIGIN, radius: 1.4 };
    let hopf = morse_decomposition(&f("hopf"), rect(-1.5, 1.5, -1.5, 1.5), 4, &disc, &opts, &mopts);
    let (dw, hopf) = match (dw, hopf) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => return (false, format!("decomposition failed: {:?} / {:?}", a.err(), b.err())),
    };
    let sum = |m: &conley_lab::analysis::MorseReport| {
        let mut s = vec![0i64; 3];
        for set in &m.sets {
            for (k, c) in poincare_polynomial(&set.report.forward).into_iter().enumerate() {
                s[k] += c;
            }
        }
        s
    };
    let dw_check = verify_morse_inequalities(&dw, &dw.whole).unwrap();
    let hopf_check = verify_morse_inequalities(&hopf, &hopf.whole).unwrap();
    let ok = sum(&dw) == vec![2, 1, 0]
        && poincare_polynomial(&dw.whole.forward) == vec![1, 0, 0]
        && dw.q_poly == vec![1]
        && hopf.q_poly == vec![0, 1]
        && dw_check.holds
        && hopf_check.holds;
    let detail = format!(
        "doublewell sum {:?} whole {:?} Q {:?}; hopf disc Q {:?}",
        sum(&dw),
        poincare_polynomial(&dw.whole.forward),
        dw.q_poly,
        hopf.q_poly
    );
    for m in [dw, hopf] {
        seen.push(m.whole.clone());
        seen.extend(m.sets.into_iter().map(|s| s.report));
    }
    (ok, detail)
}

fn criterion_6() -> Verdict {
    let fam = catalogue("saddle_family").unwrap();
    let lambdas = [0.0, 0.25, 0.5, 0.75, 1.0];
    match continuation_check(&fam, unit(), 1, &Shape::Full, &lambdas, &BlockOptions::default()) {
        Ok(o) => {
            let ok = o.holds && o.lhs == Quantity::Rows(vec![vec![0, 1, 0]; 5]);
            (ok, o.notes)
        }
        Err(e) => (false, e.to_string()),
    }
}

fn criterion_7() -> Verdict {
    let z = f("zpow2");
    let mut shapes: Vec<(String, Shape, Rect)> = Vec::new();
    for side in [0.5, 1.0, 2.0] {
        let h = side / 2.0;
        shapes.push((format!("square {side}"), Shape::Full, rect(-h, h, -h, h)));
    }
    for r in [0.25, 0.5, 1.0] {
        shapes.push((format!("disc {r}"), Shape::Disc { center: Point::ORIGIN, radius: r }, rect(-r, r, -r, r)));
    }
    let mut bad = Vec::new();
    let mut square_loc = None;
    for (label, shape, domain) in &shapes {
        for depth in 1..=6u8 {
            let opts = BlockOptions { max_depth: depth, ..BlockOptions::default() };
            match build_triple(&z, *domain, depth, shape, &opts) {
                Err(BlockError::InternalTangency { location, .. }) => {
                    if label == "square 2" && depth == 1 {
                        square_loc = Some(location);
                    }
                }
                other => bad.push(format!("{label} depth {depth}: {}", describe(&other))),
            }
        }
    }
    let near = square_loc.is_some_and(|p| p.dist(Point::new(0.0, 1.0)) < 1e-6 || p.dist(Point::new(0.0, -1.0)) < 1e-6);
    let detail = match (&bad[..], square_loc) {
        ([], Some(p)) => format!("InternalTangency for 6 shapes x depths 1..6; [-1,1]^2 tangency at ({:.3e}, {:.9})", p.x, p.y),
        _ => format!("unexpected: {bad:?}; [-1,1]^2 location {square_loc:?}"),
    };
    (bad.is_empty() && near, detail)
}

fn describe<T>(r: &Result<T, BlockError>) -> String {
    match r {
        Ok(_) => "block built".into(),
        Err(e) => e.kind().into(),
    }
}

fn origin(index: i64) -> CriticalPoint {
    CriticalPoint { location: Point::ORIGIN, winding_index: Some(index), newton_converged: true, residual: 0.0 }
}

fn criterion_8() -> Verdict {
    let controls = Controls::new(unit());
    let z = homoclinic_scan(&f("zpow2"), &origin(2), 0.2, 32, &controls).unwrap();
    let s = homoclinic_scan(&f("saddle"), &origin(-1), 0.2, 32, &controls).unwrap();
    let n = homoclinic_scan(&f("node"), &origin(1), 0.2, 32, &controls).unwrap();
    let ok = z.fraction >= 0.9 && z.near_periodic == 0 && s.fraction == 0.0 && n.fraction == 0.0;
    let detail = format!(
        "zpow2 fraction {:.4} near_periodic {}; saddle {:.1}; node {:.1}",
        z.fraction, z.near_periodic, s.fraction, n.fraction
    );
    (ok, detail)
}

fn criterion_9() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, expected) in [("zpow2", 2), ("zbarpow2", -2), ("saddle", -1)] {
        let mut worst: f64 = 0.0;
        for r in [0.3, 0.5, 0.7] {
            match winding(&f(name), Point::ORIGIN, r, 16, 1e-6) {
                Ok(w) => {
                    ok &= w.index == expected;
                    worst = worst.max((w.raw - w.index as f64).abs());
                }
                Err(_) => ok = false,
            }
        }
        ok &= worst <= 1e-6;
        parts.push(format!("{name} {expected:+} (max gap {worst:.1e})"));
    }
    (ok, parts.join("; "))
}

fn node_error(rel_tol: f64) -> f64 {
    let controls = Controls { rel_tol, ..Controls::new(rect(-2.0, 2.0, -2.0, 2.0)) };
    let seed = Point::new(1.0, 0.5);
    let tr = integrate(&f("node"), seed, Direction::Forward, 5.0, &controls).unwrap();
    let (t, p) = *tr.samples.last().unwrap();
    p.dist(seed * (-t).exp())
}

fn random_pair(rng: &mut StdRng) -> (CubicalSet, CubicalSet) {
    let depth = rng.gen_range(1..=3u8);
    let n = 1u32 << depth;
    let squares: Vec<Cell> = (0..n * n)
        .map(|k| Cell::square(depth, k % n, k / n))
        .filter(|_| rng.gen_bool(0.6))
        .collect();
    let big = CubicalSet::from_cells(unit(), depth, squares);
    let sub: Vec<Cell> = big.cells().copied().filter(|c| c.dim > 0 && rng.gen_bool(0.25)).collect();
    let small = CubicalSet::from_cells(unit(), depth, sub);
    (big, small)
}

fn criterion_10(seen: &[ConleyReport]) -> Verdict {
    let mut notes = Vec::new();

    let (coarse, fine) = (node_error(1e-6), node_error(1e-6 / 16.0));
    let ratio = coarse / fine;
    let order_ok = ratio >= 8.0;
    notes.push(format!("integrator error ratio {ratio:.1}"));

    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for (name, _, _) in CATALOGUE.iter().filter(|(n, _, _)| *n != "saddle_family") {
        let field = f(name);
        for _ in 0..100 {
            let p = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let j = field.jacobian(p);
            let h = 1e-6;
            let dx = (field.value(p + Point::new(h, 0.0)) - field.value(p - Point::new(h, 0.0))) * (0.5 / h);
            let dy = (field.value(p + Point::new(0.0, h)) - field.value(p - Point::new(0.0, h))) * (0.5 / h);
            for (sym, fd) in [(j[0][0], dx.x), (j[1][0], dx.y), (j[0][1], dy.x), (j[1][1], dy.y)] {
                worst = worst.max((sym - fd).abs() / (1.0 + sym.abs()));
            }
        }
    }
    let deriv_ok = worst <= 1e-6;
    notes.push(format!("derivative mismatch {worst:.1e}"));

    let mut complex_ok = true;
    for _ in 0..200 {
        let (n, l) = random_pair(&mut rng);
        let bm = relative_complex(&n, &l).unwrap();
        complex_ok &= bm.d1.mul(&bm.d2).is_zero();
        complex_ok &= smith_normal_form(&bm.d1).divisibility_chain_holds();
        complex_ok &= smith_normal_form(&bm.d2).divisibility_chain_holds();
        complex_ok &= homology_of(&bm, Coefficients::Integers).euler == bm.euler_from_cells();
    }
    notes.push("200 random pairs".into());

    let chi_ok = seen.iter().all(|r| chi_consistent(r) && evaluate(&r.forward.poincare_poly, -1) == r.ind_p);
    notes.push(format!("chi consistent on {} pairs", 2 * seen.len()));

    (order_ok && deriv_ok && complex_ok && chi_ok, notes.join("; "))
}

fn main() -> ExitCode {
    let mut seen = Vec::new();
    let mut results: Vec<(usize, &str, Verdict, f64)> = Vec::new();
    let mut record = |k: usize, label: &'static str, run: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = run();
        results.push((k, label, v, start.elapsed().as_secs_f64()));
    };
    record(1, "catalogue Conley indices", &mut || criterion_1(&mut seen));
    record(2, "index equals sum of winding indices", &mut || criterion_2(&mut seen));
    record(3, "exit homology and duality", &mut || criterion_3(&mut seen));
    record(4, "index of attractors is the Euler characteristic", &mut || criterion_4(&mut seen));
    record(5, "Morse inequalities", &mut || criterion_5(&mut seen));
    record(6, "continuation of the saddle family", &mut criterion_6);
    record(7, "no isolating block around the z^2 zero", &mut criterion_7);
    record(8, "homoclinic census", &mut criterion_8);
    record(9, "winding indices", &mut criterion_9);
    record(10, "numerics", &mut || criterion_10(&seen));

    let mut failed = 0;
    for (k, label, (ok, detail), secs) in &results {
        if !ok {
            failed += 1;
        }
        println!("criterion {k:>2} {}: {label} ({secs:.2}s): {detail}", if *ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
