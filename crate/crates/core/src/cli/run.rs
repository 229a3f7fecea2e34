use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::analysis::{
    conley_index, continuation_check, critical_points_in, find_critical_points, morse_decomposition, verify_duality,
    verify_exit_homology, verify_index_euler, verify_index_sum, verify_morse_inequalities, verify_positive_index,
    winding, AnalysisError, ConleyReport, CriticalPoint, MorseOptions, Quantity, VerifierOutcome,
};
use crate::block::{build_triple, triple_csv, BlockError, IndexTriple};
use crate::complex::{cell_csv_row, CELL_CSV_HEADER};
use crate::field::Field;
use crate::geometry::Point;
use crate::homology::{torsion_as_u64, HomologySummary};
use crate::orbits::{
    census_csv, classify_limit, homoclinic_scan, integrate, trace_csv, Controls, Direction, LimitVerdict,
};

use super::config::{OrbitDirection, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Block,
    Index,
    Winding,
    Morse,
    Verify,
    Orbits,
    Scan,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Block,
        Command::Index,
        Command::Winding,
        Command::Morse,
        Command::Verify,
        Command::Orbits,
        Command::Scan,
    ];

    pub fn from_name(name: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.as_str() == name)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Block => "block",
            Command::Index => "index",
            Command::Winding => "winding",
            Command::Morse => "morse",
            Command::Verify => "verify",
            Command::Orbits => "orbits",
            Command::Scan => "scan",
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFIER_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// One command's JSON result, its exit code and any CSV side files.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Value,
    pub exit_code: i32,
    /// `(file name, contents)`.
    pub csv: Vec<(String, String)>,
}

struct Failure {
    kind: String,
    message: String,
    location: Option<Point>,
}

impl From<BlockError> for Failure {
    fn from(e: BlockError) -> Self {
        Failure { kind: e.kind().into(), message: e.to_string(), location: e.location() }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        let location = match &e {
            AnalysisError::Block(b) => b.location(),
            _ => None,
        };
        Failure { kind: e.kind().into(), message: e.to_string(), location }
    }
}

impl From<crate::field::FieldError> for Failure {
    fn from(e: crate::field::FieldError) -> Self {
        Failure { kind: "FieldError".into(), message: e.to_string(), location: None }
    }
}

fn failure(kind: &str, message: impl Into<String>) -> Failure {
    Failure { kind: kind.into(), message: message.into(), location: None }
}

pub fn error_object(kind: &str, message: &str, location: Option<Point>) -> Value {
    let mut e = json!({"kind": kind, "message": message});
    if let Some(p) = location {
        e["location"] = pt(p);
    }
    e
}

fn pt(p: Point) -> Value {
    json!([p.x, p.y])
}

pub fn homology_json(h: &HomologySummary) -> Value {
    let torsion = h.torsion.as_ref().map(|t| {
        t.iter()
            .map(|deg| {
                deg.iter()
                    .map(|c| torsion_as_u64(c).map_or_else(|| Value::from(c.to_string()), Value::from))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    });
    json!({
        "betti": h.betti(),
        "betti_z2": h.betti_z2,
        "torsion": torsion,
        "poincare": h.poincare_poly,
        "euler": h.euler,
    })
}

pub fn triple_json(t: &IndexTriple) -> Value {
    json!({
        "depth": t.depth,
        "shape": t.shape.to_string(),
        "field": t.field_name,
        "lambda": t.lambda,
        "cells": {"n": t.n.counts(), "lplus": t.lplus.counts(), "lminus": t.lminus.counts()},
        "faces": {"total": t.faces.len(), "exit": t.exit_faces(), "entrance": t.entrance_faces()},
        "tangencies": t.tangencies.iter().map(|g| json!({
            "location": pt(g.location), "kind": g.kind.as_str(), "h": g.h,
        })).collect::<Vec<_>>(),
    })
}

pub fn report_json(r: &ConleyReport) -> Value {
    json!({
        "triple": triple_json(&r.triple),
        "forward": homology_json(&r.forward),
        "backward": homology_json(&r.backward),
        "classification": r.classification.as_str(),
        "ind_p": r.ind_p,
    })
}

fn cp_json(c: &CriticalPoint) -> Value {
    json!({
        "location": pt(c.location),
        "winding_index": c.winding_index,
        "newton_converged": c.newton_converged,
        "residual": c.residual,
    })
}

fn quantity(q: &Quantity) -> Value {
    match q {
        Quantity::Int(v) => json!(v),
        Quantity::Ints(v) => json!(v),
        Quantity::Rows(v) => json!(v),
        Quantity::Missing => Value::Null,
    }
}

pub fn verifier_json(o: &VerifierOutcome) -> Value {
    json!({"name": o.name, "holds": o.holds, "lhs": quantity(&o.lhs), "rhs": quantity(&o.rhs), "notes": o.notes})
}

fn bind(config: &RunConfig) -> Result<Field, Failure> {
    let lambda = config.lambda.or(config.spec.is_family().then_some(0.0));
    Ok(config.spec.bind(lambda)?)
}

fn controls(config: &RunConfig) -> Controls {
    Controls {
        rel_tol: config.tol.rel_tol,
        eps_conv: config.tol.eps_conv,
        eps_ret: config.tol.eps_ret,
        ..Controls::new(config.domain)
    }
}

fn search_depth(config: &RunConfig) -> u8 {
    config.depth.max(5)
}

/// Runs one command. Errors become an `error` object with exit code 2.
pub fn run(config: &RunConfig, command: Command) -> Outcome {
    let mut csv = Vec::new();
    let body = match command {
        Command::Block => run_block(config, &mut csv),
        Command::Index => run_index(config, &mut csv),
        Command::Winding => run_winding(config),
        Command::Morse => run_morse(config, &mut csv),
        Command::Verify => run_verify(config),
        Command::Orbits => run_orbits(config, &mut csv),
        Command::Scan => run_scan(config, &mut csv),
    };
    let (mut result, exit_code) = match body {
        Ok((Value::Object(map), holds)) => {
            let code = if holds { EXIT_OK } else { EXIT_VERIFIER_FAILED };
            let mut map = map;
            map.insert("status".into(), json!(if holds { "ok" } else { "failed" }));
            (Value::Object(map), code)
        }
        Ok((other, _)) => (json!({"value": other, "status": "ok"}), EXIT_OK),
        Err(f) => {
            csv.clear();
            (json!({"status": "error", "error": error_object(&f.kind, &f.message, f.location)}), EXIT_ERROR)
        }
    };
    result["command"] = json!(command.as_str());
    if !config.csv {
        csv.clear();
    }
    Outcome { result, exit_code, csv }
}

type Body = Result<(Value, bool), Failure>;

fn run_block(config: &RunConfig, csv: &mut Vec<(String, String)>) -> Body {
    let field = bind(config)?;
    let t = build_triple(&field, config.domain, config.depth, &config.shape, &config.block_options())?;
    csv.push(("triple.csv".into(), triple_csv(&t)));
    Ok((json!({"triple": triple_json(&t)}), true))
}

fn run_index(config: &RunConfig, csv: &mut Vec<(String, String)>) -> Body {
    let field = bind(config)?;
    let r = conley_index(&field, config.domain, config.depth, &config.shape, &config.block_options())?;
    let cps = critical_points_in(&field, &r.triple.n, config.tol.newton_tol);
    csv.push(("triple.csv".into(), triple_csv(&r.triple)));
    Ok((
        json!({"report": report_json(&r), "critical_points": cps.iter().map(cp_json).collect::<Vec<_>>()}),
        true,
    ))
}

fn run_winding(config: &RunConfig) -> Body {
    let field = bind(config)?;
    let w = winding(&field, config.winding_center, config.winding_radius, config.winding_samples, config.tol.winding_gap)?;
    let cps = find_critical_points(&field, &config.domain, search_depth(config), config.tol.newton_tol);
    Ok((
        json!({
            "winding": {
                "center": pt(config.winding_center),
                "radius": config.winding_radius,
                "index": w.index,
                "raw": w.raw,
                "samples": w.samples,
            },
            "critical_points": cps.iter().map(cp_json).collect::<Vec<_>>(),
        }),
        true,
    ))
}

fn morse_options(config: &RunConfig) -> MorseOptions {
    MorseOptions {
        tau: config.morse_tau,
        samples: config.morse_samples,
        steps: config.morse_steps,
        newton_tol: config.tol.newton_tol,
    }
}

fn run_morse(config: &RunConfig, csv: &mut Vec<(String, String)>) -> Body {
    let field = bind(config)?;
    let m = morse_decomposition(
        &field,
        config.domain,
        config.depth,
        &config.shape,
        &config.block_options(),
        &morse_options(config),
    )?;
    let check = verify_morse_inequalities(&m, &m.whole)?;
    let rect = *m.whole.triple.n.rect();
    let mut cells = format!("set,{CELL_CSV_HEADER}\n");
    for (k, s) in m.sets.iter().enumerate() {
        for c in &s.cells {
            let _ = writeln!(cells, "{k},{}", cell_csv_row(c, &rect));
        }
    }
    csv.push(("morse_sets.csv".into(), cells));
    let sets: Vec<Value> = m
        .sets
        .iter()
        .map(|s| {
            json!({
                "centroid": pt(s.centroid),
                "squares": s.cells.len(),
                "critical_points": s.critical_points,
                "block_shape": s.report.triple.shape.to_string(),
                "forward": homology_json(&s.report.forward),
                "classification": s.report.classification.as_str(),
                "ind_p": s.report.ind_p,
            })
        })
        .collect();
    Ok((
        json!({
            "sets": sets,
            "order": m.order.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "whole": report_json(&m.whole),
            "critical_points": m.critical_points.iter().map(cp_json).collect::<Vec<_>>(),
            "q_poly": m.q_poly,
            "verifier": verifier_json(&check),
        }),
        check.holds,
    ))
}

fn run_verify(config: &RunConfig) -> Body {
    let field = bind(config)?;
    let opts = config.block_options();
    let r = conley_index(&field, config.domain, config.depth, &config.shape, &opts)?;
    let cps = critical_points_in(&field, &r.triple.n, config.tol.newton_tol);
    let mut outcomes = vec![verify_exit_homology(&r), verify_duality(&r), verify_index_sum(&r, &cps)];
    let mut skipped: Vec<Value> = Vec::new();
    match config.chi {
        Some(chi) => match verify_index_euler(&r, chi) {
            Ok(o) => outcomes.push(o),
            Err(e) => skipped.push(json!({"name": "euler_characteristic", "reason": e.to_string()})),
        },
        None => skipped.push(json!({"name": "euler_characteristic", "reason": "no chi supplied"})),
    }
    outcomes.push(verify_positive_index(&r));
    if config.verify_morse {
        let m = morse_decomposition(&field, config.domain, config.depth, &config.shape, &opts, &morse_options(config))?;
        outcomes.push(verify_morse_inequalities(&m, &m.whole)?);
    } else {
        skipped.push(json!({"name": "morse_inequalities", "reason": "morse not requested"}));
    }
    if config.spec.is_family() {
        match continuation_check(&config.spec, config.domain, config.depth, &config.shape, &config.lambdas, &opts) {
            Ok(o) => outcomes.push(o),
            // no common block means continuation is not certified: a failed check, not a crash
            Err(AnalysisError::BlockFailsAtLambda { lambda, reason }) => outcomes.push(VerifierOutcome {
                name: "continuation".into(),
                holds: false,
                lhs: Quantity::Missing,
                rhs: Quantity::Missing,
                notes: format!("no common block: fails at lambda = {lambda}: {reason}"),
            }),
            Err(e) => return Err(e.into()),
        }
    } else {
        skipped.push(json!({"name": "continuation", "reason": "field has no lambda parameter"}));
    }
    let holds = outcomes.iter().all(|o| o.holds);
    Ok((
        json!({
            "report": report_json(&r),
            "critical_points": cps.iter().map(cp_json).collect::<Vec<_>>(),
            "verifiers": outcomes.iter().map(verifier_json).collect::<Vec<_>>(),
            "skipped": skipped,
        }),
        holds,
    ))
}

fn verdict_json(v: &LimitVerdict, cps: &[CriticalPoint]) -> Value {
    let mut out = json!({"verdict": v.label()});
    match v {
        LimitVerdict::ConvergesToCriticalPoint(k) => out["critical_point"] = pt(cps[*k].location),
        LimitVerdict::Undetermined(why) => out["reason"] = json!(why),
        _ => {}
    }
    out
}

fn run_orbits(config: &RunConfig, csv: &mut Vec<(String, String)>) -> Body {
    if config.orbit_seeds.is_empty() {
        return Err(failure("MissingRequired", "[orbits] seeds"));
    }
    let field = bind(config)?;
    let controls = controls(config);
    let cps = find_critical_points(&field, &config.domain, search_depth(config), config.tol.newton_tol);
    let dirs: &[Direction] = match config.orbit_direction {
        OrbitDirection::Forward => &[Direction::Forward],
        OrbitDirection::Backward => &[Direction::Backward],
        OrbitDirection::Both => &[Direction::Forward, Direction::Backward],
    };
    let mut orbits = Vec::new();
    for (k, &seed) in config.orbit_seeds.iter().enumerate() {
        for &dir in dirs {
            let tr = integrate(&field, seed, dir, config.orbit_t_max, &controls)
                .map_err(|e| Failure { kind: orbit_kind(&e).into(), message: e.to_string(), location: Some(seed) })?;
            let l = classify_limit(&field, &tr, &cps, &controls);
            let ev = &l.evidence;
            let mut entry = verdict_json(&l.verdict, &cps);
            let extra = json!({
                "seed": pt(seed),
                "direction": dir.as_str(),
                "termination": tr.termination.as_str(),
                "end": pt(tr.end()),
                "duration": tr.duration(),
                "samples": tr.samples.len(),
                "evidence": {
                    "dwell_time": ev.dwell_time,
                    "final_distance": ev.final_distance,
                    "return_distance": ev.return_distance,
                    "return_time": ev.return_time,
                    "exit": ev.exit.map(pt),
                },
            });
            merge(&mut entry, extra);
            orbits.push(entry);
            csv.push((format!("orbit_{k}_{}.csv", dir.as_str()), trace_csv(&tr)));
        }
    }
    Ok((json!({"orbits": orbits, "critical_points": cps.iter().map(cp_json).collect::<Vec<_>>()}), true))
}

fn orbit_kind(e: &crate::orbits::OrbitError) -> &'static str {
    match e {
        crate::orbits::OrbitError::StepUnderflow { .. } => "StepUnderflow",
        crate::orbits::OrbitError::SeedOutsideDomain { .. } => "SeedOutsideDomain",
    }
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        let b: Map<String, Value> = b;
        a.extend(b);
    }
}

fn run_scan(config: &RunConfig, csv: &mut Vec<(String, String)>) -> Body {
    let field = bind(config)?;
    let cps = find_critical_points(&field, &config.domain, search_depth(config), config.tol.newton_tol);
    let cp = cps
        .iter()
        .min_by(|a, b| {
            let (da, db) = (a.location.dist(config.scan_center), b.location.dist(config.scan_center));
            da.partial_cmp(&db).expect("finite distances")
        })
        .ok_or_else(|| failure("NoCriticalPoint", "no critical point found in the domain"))?;
    let census = homoclinic_scan(&field, cp, config.scan_radius, config.scan_seeds, &controls(config))
        .map_err(|e| failure("ScanError", e.to_string()))?;
    csv.push(("census.csv".into(), census_csv(&census)));
    let d = census.domain;
    let entries: Vec<Value> = census
        .entries
        .iter()
        .map(|e| {
            json!({
                "seed": pt(e.seed),
                "forward": e.forward.label(),
                "backward": e.backward.label(),
                "homoclinic": e.homoclinic,
            })
        })
        .collect();
    Ok((
        json!({
            "census": {
                "critical_point": cp_json(&census.critical_point),
                "radius": census.radius,
                "count": census.count,
                "domain": [d.x0, d.x1, d.y0, d.y1],
                "t_max": census.t_max,
                "fraction": census.fraction,
                "homoclinic": census.entries.iter().filter(|e| e.homoclinic).count(),
                "near_periodic": census.near_periodic,
                "note": census.note,
                "entries": entries,
            },
        }),
        true,
    ))
}
