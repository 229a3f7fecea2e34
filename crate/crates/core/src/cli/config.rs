use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;

use crate::block::{BlockOptions, Shape};
use crate::complex::{Rect, MAX_DEPTH};
use crate::field::{catalogue, FieldError, VectorFieldSpec};
use crate::geometry::Point;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown key `{key}` in section [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("missing required setting: {0}")]
    MissingRequired(String),
    #[error("line {line}: {key} = {value} is out of range ({expected})")]
    OutOfRange { line: usize, key: String, value: String, expected: String },
    #[error("field: {0}")]
    Field(#[from] FieldError),
}

impl ConfigError {
    pub fn kind(&self) -> &'static str {
        match self {
            ConfigError::Io(_) => "IoError",
            ConfigError::Parse { .. } => "ParseError",
            ConfigError::UnknownKey { .. } => "UnknownKey",
            ConfigError::MissingRequired(_) => "MissingRequired",
            ConfigError::OutOfRange { .. } => "OutOfRange",
            ConfigError::Field(_) => "FieldError",
        }
    }
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("field", &["name", "p", "q", "lambda"]),
    ("domain", &["x_min", "x_max", "y_min", "y_max"]),
    ("block", &["depth", "shape", "rect", "center", "radius", "r0", "r1", "samples", "max_depth"]),
    ("tolerances", &["face_tol", "winding_gap", "newton_tol", "rel_tol", "eps_conv", "eps_ret"]),
    ("winding", &["center", "radius", "samples"]),
    ("verify", &["chi", "lambdas", "morse"]),
    ("morse", &["tau", "samples", "steps"]),
    ("orbits", &["seeds", "t_max", "direction"]),
    ("scan", &["center", "radius", "seeds"]),
    ("output", &["csv"]),
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Raw `[section] key = value` table, keyed by section then key.
#[derive(Debug, Clone, Default)]
pub struct Ini {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl Ini {
    pub fn parse(text: &str) -> Result<Ini, ConfigError> {
        let mut ini = Ini::default();
        let mut section: Option<String> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split_once('#').map_or(raw, |(a, _)| a).trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::Parse { line, message: format!("malformed section header `{body}`") })?
                    .trim();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(ConfigError::Parse { line, message: format!("unknown section [{name}]") });
                }
                ini.sections.entry(name.to_string()).or_default();
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| ConfigError::Parse { line, message: format!("expected `key = value`, got `{body}`") })?;
            let (key, value) = (key.trim(), value.trim());
            let sec = section
                .clone()
                .ok_or_else(|| ConfigError::Parse { line, message: "key outside of any section".into() })?;
            let allowed = SCHEMA.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key) {
                return Err(ConfigError::UnknownKey { line, section: sec, key: key.to_string() });
            }
            if value.is_empty() {
                return Err(ConfigError::Parse { line, message: format!("empty value for `{key}`") });
            }
            let table = ini.sections.entry(sec).or_default();
            if table.contains_key(key) {
                return Err(ConfigError::Parse { line, message: format!("duplicate key `{key}`") });
            }
            table.insert(key.to_string(), Entry { value: value.to_string(), line });
        }
        Ok(ini)
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }
}

fn bad(e: &Entry, message: impl Into<String>) -> ConfigError {
    ConfigError::Parse { line: e.line, message: message.into() }
}

fn num(e: &Entry) -> Result<f64, ConfigError> {
    e.value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(e, format!("expected a number, got `{}`", e.value)))
}

fn nums(e: &Entry, sep: char) -> Result<Vec<f64>, ConfigError> {
    e.value
        .split(sep)
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(e, format!("expected numbers separated by `{sep}`, got `{}`", e.value)))
        })
        .collect()
}

fn point(e: &Entry) -> Result<Point, ConfigError> {
    match nums(e, ',')?[..] {
        [x, y] => Ok(Point::new(x, y)),
        _ => Err(bad(e, format!("expected `x, y`, got `{}`", e.value))),
    }
}

fn uint(e: &Entry) -> Result<u64, ConfigError> {
    e.value.parse::<u64>().map_err(|_| bad(e, format!("expected a non-negative integer, got `{}`", e.value)))
}

fn boolean(e: &Entry) -> Result<bool, ConfigError> {
    match e.value.as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        v => Err(bad(e, format!("expected true or false, got `{v}`"))),
    }
}

fn range(e: &Entry, key: &str, expected: &str) -> ConfigError {
    ConfigError::OutOfRange { line: e.line, key: key.to_string(), value: e.value.clone(), expected: expected.to_string() }
}

fn positive(ini: &Ini, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
    match ini.get(section, key) {
        None => Ok(default),
        Some(e) => {
            let v = num(e)?;
            if v > 0.0 {
                Ok(v)
            } else {
                Err(range(e, key, "must be positive"))
            }
        }
    }
}

fn count(ini: &Ini, section: &str, key: &str, default: usize, min: usize, max: usize) -> Result<usize, ConfigError> {
    match ini.get(section, key) {
        None => Ok(default),
        Some(e) => {
            let v = uint(e)?;
            if (min as u64..=max as u64).contains(&v) {
                Ok(v as usize)
            } else {
                Err(range(e, key, &format!("expected {min}..={max}")))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitDirection {
    Forward,
    Backward,
    Both,
}

impl OrbitDirection {
    fn as_str(self) -> &'static str {
        match self {
            OrbitDirection::Forward => "forward",
            OrbitDirection::Backward => "backward",
            OrbitDirection::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub face_tol: f64,
    pub winding_gap: f64,
    pub newton_tol: f64,
    pub rel_tol: f64,
    pub eps_conv: f64,
    pub eps_ret: f64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub field_label: String,
    pub spec: VectorFieldSpec,
    pub lambda: Option<f64>,
    pub domain: Rect,
    pub depth: u8,
    pub shape: Shape,
    pub samples: usize,
    pub max_depth: u8,
    pub tol: Tolerances,
    pub winding_center: Point,
    pub winding_radius: f64,
    pub winding_samples: usize,
    pub chi: Option<i64>,
    pub lambdas: Vec<f64>,
    pub verify_morse: bool,
    pub morse_tau: f64,
    pub morse_samples: usize,
    pub morse_steps: usize,
    pub orbit_seeds: Vec<Point>,
    pub orbit_t_max: f64,
    pub orbit_direction: OrbitDirection,
    pub scan_center: Point,
    pub scan_radius: f64,
    pub scan_seeds: usize,
    pub csv: bool,
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let ini = Ini::parse(text)?;

    let (field_label, spec) = match (ini.get("field", "name"), ini.get("field", "p"), ini.get("field", "q")) {
        (Some(n), None, None) => (n.value.clone(), catalogue(&n.value)?),
        (None, Some(p), Some(q)) => {
            let spec = VectorFieldSpec::parse(&p.value, &q.value)?;
            (format!("({}, {})", p.value, q.value), spec)
        }
        (Some(n), _, _) => return Err(bad(n, "give either `name` or the pair `p`, `q`, not both")),
        (None, Some(_), None) => return Err(ConfigError::MissingRequired("[field] q".into())),
        (None, None, Some(_)) => return Err(ConfigError::MissingRequired("[field] p".into())),
        (None, None, None) => return Err(ConfigError::MissingRequired("[field] name, or [field] p and q".into())),
    };
    let lambda = ini.get("field", "lambda").map(num).transpose()?;

    let coord = |key: &str, default: f64| ini.get("domain", key).map(num).transpose().map(|v| v.unwrap_or(default));
    let (x0, x1, y0, y1) = (coord("x_min", -1.0)?, coord("x_max", 1.0)?, coord("y_min", -1.0)?, coord("y_max", 1.0)?);
    let domain = Rect::new(x0, x1, y0, y1)
        .map_err(|e| ConfigError::Parse { line: ini.get("domain", "x_min").map_or(0, |e| e.line), message: e.to_string() })?;

    let depth = count(&ini, "block", "depth", 1, 0, MAX_DEPTH as usize)? as u8;
    let max_depth = count(&ini, "block", "max_depth", MAX_DEPTH as usize, 0, MAX_DEPTH as usize)? as u8;
    if max_depth < depth {
        let e = ini.get("block", "max_depth").expect("defaults to the cap");
        return Err(range(e, "max_depth", "must be at least depth"));
    }
    let samples = count(&ini, "block", "samples", BlockOptions::default().samples, 3, 4097)?;
    let shape = parse_shape(&ini)?;

    let tol = Tolerances {
        face_tol: positive(&ini, "tolerances", "face_tol", 1e-9)?,
        winding_gap: positive(&ini, "tolerances", "winding_gap", 1e-6)?,
        newton_tol: positive(&ini, "tolerances", "newton_tol", 1e-10)?,
        rel_tol: positive(&ini, "tolerances", "rel_tol", 1e-9)?,
        eps_conv: positive(&ini, "tolerances", "eps_conv", 5e-3)?,
        eps_ret: positive(&ini, "tolerances", "eps_ret", 1e-4)?,
    };

    let winding_center = ini.get("winding", "center").map(point).transpose()?.unwrap_or(Point::ORIGIN);
    let winding_radius = positive(&ini, "winding", "radius", 0.5)?;
    let winding_samples = count(&ini, "winding", "samples", 16, 8, 1 << 20)?;

    let chi = ini
        .get("verify", "chi")
        .map(|e| e.value.parse::<i64>().map_err(|_| bad(e, format!("expected an integer, got `{}`", e.value))))
        .transpose()?;
    let lambdas = match ini.get("verify", "lambdas") {
        Some(e) => nums(e, ',')?,
        None => vec![0.0, 0.25, 0.5, 0.75, 1.0],
    };
    let verify_morse = ini.get("verify", "morse").map(boolean).transpose()?.unwrap_or(false);

    let morse_tau = positive(&ini, "morse", "tau", 1.0)?;
    let morse_samples = count(&ini, "morse", "samples", 4, 1, 64)?;
    let morse_steps = count(&ini, "morse", "steps", 64, 1, 100_000)?;

    let orbit_seeds = match ini.get("orbits", "seeds") {
        Some(e) => e
            .value
            .split(';')
            .map(|s| point(&Entry { value: s.trim().to_string(), line: e.line }))
            .collect::<Result<Vec<_>, _>>()?,
        None if ini.has_section("orbits") => return Err(ConfigError::MissingRequired("[orbits] seeds".into())),
        None => Vec::new(),
    };
    let orbit_t_max = positive(&ini, "orbits", "t_max", 20.0)?;
    let orbit_direction = match ini.get("orbits", "direction") {
        None => OrbitDirection::Both,
        Some(e) => match e.value.as_str() {
            "forward" => OrbitDirection::Forward,
            "backward" => OrbitDirection::Backward,
            "both" => OrbitDirection::Both,
            v => return Err(bad(e, format!("direction must be forward, backward or both, got `{v}`"))),
        },
    };

    let scan_center = ini.get("scan", "center").map(point).transpose()?.unwrap_or(Point::ORIGIN);
    let scan_radius = positive(&ini, "scan", "radius", 0.2)?;
    let scan_seeds = count(&ini, "scan", "seeds", 32, 8, 1 << 16)?;
    let csv = ini.get("output", "csv").map(boolean).transpose()?.unwrap_or(true);

    Ok(RunConfig {
        field_label,
        spec,
        lambda,
        domain,
        depth,
        shape,
        samples,
        max_depth,
        tol,
        winding_center,
        winding_radius,
        winding_samples,
        chi,
        lambdas,
        verify_morse,
        morse_tau,
        morse_samples,
        morse_steps,
        orbit_seeds,
        orbit_t_max,
        orbit_direction,
        scan_center,
        scan_radius,
        scan_seeds,
        csv,
    })
}

fn parse_shape(ini: &Ini) -> Result<Shape, ConfigError> {
    let kind = ini.get("block", "shape");
    let used: BTreeSet<&str> = ["rect", "center", "radius", "r0", "r1"]
        .into_iter()
        .filter(|k| ini.get("block", k).is_some())
        .collect();
    let need = |key: &str| ini.get("block", key).ok_or_else(|| ConfigError::MissingRequired(format!("[block] {key}")));
    let (shape, allowed): (Shape, &[&str]) = match kind.map(|e| e.value.as_str()) {
        None | Some("full") => (Shape::Full, &[]),
        Some("rect") => match ini.get("block", "rect") {
            None => (Shape::Full, &["rect"]),
            Some(e) => match nums(e, ',')?[..] {
                [x0, x1, y0, y1] => {
                    let r = Rect::new(x0, x1, y0, y1).map_err(|err| bad(e, err.to_string()))?;
                    (Shape::Rect(r), &["rect"])
                }
                _ => return Err(bad(e, "rect expects `x_min, x_max, y_min, y_max`")),
            },
        },
        Some("disc") => {
            let radius = need("radius")?;
            let r = num(radius)?;
            if r <= 0.0 {
                return Err(range(radius, "radius", "must be positive"));
            }
            let center = ini.get("block", "center").map(point).transpose()?.unwrap_or(Point::ORIGIN);
            (Shape::Disc { center, radius: r }, &["center", "radius"])
        }
        Some("annulus") => {
            let (e0, e1) = (need("r0")?, need("r1")?);
            let (r0, r1) = (num(e0)?, num(e1)?);
            if !(r0 > 0.0 && r1 > r0) {
                return Err(range(e1, "r1", "need 0 < r0 < r1"));
            }
            let center = ini.get("block", "center").map(point).transpose()?.unwrap_or(Point::ORIGIN);
            (Shape::Annulus { center, r0, r1 }, &["center", "r0", "r1"])
        }
        Some(other) => {
            let e = kind.expect("matched Some");
            return Err(bad(e, format!("shape must be full, rect, disc or annulus, got `{other}`")));
        }
    };
    if let Some(k) = used.iter().find(|k| !allowed.contains(k)) {
        let e = ini.get("block", k).expect("key is present");
        return Err(bad(e, format!("`{k}` does not apply to shape {}", shape.kind())));
    }
    Ok(shape)
}

impl RunConfig {
    pub fn block_options(&self) -> BlockOptions {
        BlockOptions { samples: self.samples, tol: self.tol.face_tol, max_depth: self.max_depth }
    }

    /// Normalised echo with every default filled in.
    pub fn echo(&self) -> Value {
        let pt = |p: Point| json!([p.x, p.y]);
        let shape = match &self.shape {
            Shape::Full => json!({"kind": "full"}),
            Shape::Rect(r) => json!({"kind": "rect", "rect": [r.x0, r.x1, r.y0, r.y1]}),
            Shape::Disc { center, radius } => json!({"kind": "disc", "center": pt(*center), "radius": radius}),
            Shape::Annulus { center, r0, r1 } => json!({"kind": "annulus", "center": pt(*center), "r0": r0, "r1": r1}),
        };
        let d = &self.domain;
        json!({
            "field": {"name": self.field_label, "lambda": self.lambda, "family": self.spec.is_family()},
            "domain": [d.x0, d.x1, d.y0, d.y1],
            "block": {"depth": self.depth, "max_depth": self.max_depth, "samples": self.samples, "shape": shape},
            "tolerances": {
                "face_tol": self.tol.face_tol,
                "winding_gap": self.tol.winding_gap,
                "newton_tol": self.tol.newton_tol,
                "rel_tol": self.tol.rel_tol,
                "eps_conv": self.tol.eps_conv,
                "eps_ret": self.tol.eps_ret,
            },
            "winding": {"center": pt(self.winding_center), "radius": self.winding_radius, "samples": self.winding_samples},
            "verify": {"chi": self.chi, "lambdas": self.lambdas, "morse": self.verify_morse},
            "morse": {"tau": self.morse_tau, "samples": self.morse_samples, "steps": self.morse_steps},
            "orbits": {
                "seeds": self.orbit_seeds.iter().map(|p| pt(*p)).collect::<Vec<_>>(),
                "t_max": self.orbit_t_max,
                "direction": self.orbit_direction.as_str(),
            },
            "scan": {"center": pt(self.scan_center), "radius": self.scan_radius, "seeds": self.scan_seeds},
            "output": {"csv": self.csv},
        })
    }
}
