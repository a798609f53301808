//! INI-style experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! [integrand]
//! family = linear_minus_sqrt
//! t0 = 1
//! coef.a = affine(1, 0.1, -0.1)
//!
//! [structural]
//! n = 3
//! theta = 1
//! beta = 7/12
//!
//! [solver]
//! cells = 16, 32, 64
//! datum = harmonic_quadratic
//! datum.scale = 1
//!
//! [experiment]
//! rho = 0.1
//! R = 0.2
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::coefficient::{CoefficientField, CoefficientSet};
use crate::domain::BoxDomain;
use crate::dsl::{parse, to_integrand};
use crate::error::{Error, Result};
use crate::integrand::{make_builtin, Builtin, HProfile, IntegrandSpec, RegularizationClamp};
use crate::solver::{BoundaryDatum, Method, SolveOptions};
use crate::structural::{StructuralParams, DEFAULT_TWO_STAR_PLANE};

/// What a run does; also the name of the subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Check,
    Solve,
    VerifyBound,
    SweepMesh,
    SweepClamp,
    Lemmas,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Check => "check",
            Mode::Solve => "solve",
            Mode::VerifyBound => "verify-bound",
            Mode::SweepMesh => "sweep-mesh",
            Mode::SweepClamp => "sweep-clamp",
            Mode::Lemmas => "lemmas",
        }
    }

    fn from_name(s: &str) -> Option<Mode> {
        [Mode::Check, Mode::Solve, Mode::VerifyBound, Mode::SweepMesh, Mode::SweepClamp, Mode::Lemmas]
            .into_iter()
            .find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone)]
pub enum FamilyChoice {
    Quadratic,
    Exponential,
    VariableExponent,
    OrliczLog,
    LinearMinusSqrt,
    /// `b H(a t)` with a named profile.
    Composed(HProfile),
    /// DSL expression.
    Custom(String),
}

#[derive(Debug, Clone)]
pub struct IntegrandSection {
    pub family: FamilyChoice,
    pub t0: f64,
    pub coefficients: CoefficientSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuralSection {
    pub n: usize,
    pub theta: Option<f64>,
    pub beta: Option<f64>,
    pub alpha: Option<f64>,
    pub epsilon: f64,
    pub t_max: f64,
    pub subdomain: Option<(Vec<f64>, Vec<f64>)>,
    pub two_star_plane: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClampAxis {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSection {
    pub box_lo: [f64; 2],
    pub box_side: f64,
    /// Cells per side, increasing; single-mesh runs use the last entry.
    pub cells: Vec<usize>,
    pub components: usize,
    pub datum: BoundaryDatum,
    pub options: SolveOptions,
    pub clamp_lower: Option<f64>,
    pub clamp_upper: Option<f64>,
    pub clamp_sweep: ClampAxis,
    pub clamp_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSection {
    pub mode: Option<Mode>,
    pub rho: Option<f64>,
    pub radius: Option<f64>,
    pub center: Option<[f64; 2]>,
    pub output: Option<PathBuf>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub integrand: IntegrandSection,
    pub structural: StructuralSection,
    pub solver: SolverSection,
    pub experiment: ExperimentSection,
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Num(f64),
    List(Vec<f64>),
    Str(String),
    Ident(String),
    Call(String, Vec<f64>),
}

impl Value {
    fn describe(&self) -> &'static str {
        match self {
            Value::Num(_) => "a number",
            Value::List(_) => "a list of numbers",
            Value::Str(_) => "a quoted string",
            Value::Ident(_) => "a name",
            Value::Call(..) => "a call",
        }
    }
}

fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (b != 0.0).then(|| a / b);
    }
    s.parse().ok().filter(|v: &f64| v.is_finite() || s.contains("inf"))
}

fn parse_numbers(s: &str) -> Option<Vec<f64>> {
    if s.trim().is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(parse_number).collect()
}

fn is_name(s: &str) -> bool {
    let mut c = s.chars();
    c.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && c.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_value(raw: &str) -> std::result::Result<Value, String> {
    let s = raw.trim();
    if s.is_empty() {
        return Err("missing value".into());
    }
    if let Some(rest) = s.strip_prefix('"') {
        return match rest.strip_suffix('"') {
            Some(inner) if !inner.contains('"') => Ok(Value::Str(inner.to_string())),
            _ => Err(format!("unterminated string `{s}`")),
        };
    }
    if let Some(open) = s.find('(') {
        let name = s[..open].trim();
        if is_name(name) && s.ends_with(')') {
            let args = parse_numbers(&s[open + 1..s.len() - 1]).ok_or_else(|| format!("bad arguments in `{s}`"))?;
            return Ok(Value::Call(name.to_string(), args));
        }
    }
    if is_name(&s.replace('-', "_")) {
        return Ok(Value::Ident(s.to_string()));
    }
    if s.contains(',') {
        return parse_numbers(s).map(Value::List).ok_or_else(|| format!("`{s}` is not a list of numbers"));
    }
    parse_number(s).map(Value::Num).ok_or_else(|| format!("`{s}` is not a number"))
}

struct Entry {
    line: usize,
    value: Value,
    used: bool,
}

/// Section -> key -> entry, with lookups that record use.
struct Table {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

const SECTIONS: [&str; 4] = ["integrand", "structural", "solver", "experiment"];

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

impl Table {
    fn parse(text: &str) -> Result<Table> {
        let mut sections: BTreeMap<String, BTreeMap<String, Entry>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = strip_comment(raw).trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(line, format!("malformed section header `{content}`")))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(err(line, format!("unknown section [{name}]; expected one of {SECTIONS:?}")));
                }
                sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let section = current
                .as_ref()
                .ok_or_else(|| err(line, "key outside of any section"))?;
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(err(line, "empty key"));
            }
            let value = parse_value(value).map_err(|m| err(line, format!("{key}: {m}")))?;
            let keys = sections.get_mut(section).expect("section registered");
            if let Some(prev) = keys.get(key) {
                return Err(err(
                    line,
                    format!("duplicate key `{key}` in [{section}] (first set on line {}, again on line {line})", prev.line),
                ));
            }
            keys.insert(key.to_string(), Entry { line, value, used: false });
        }
        Ok(Table { sections })
    }

    fn take(&mut self, section: &str, key: &str) -> Option<(usize, Value)> {
        let e = self.sections.get_mut(section)?.get_mut(key)?;
        e.used = true;
        Some((e.line, e.value.clone()))
    }

    fn keys_with_prefix(&self, section: &str, prefix: &str) -> Vec<String> {
        self.sections
            .get(section)
            .map(|m| m.keys().filter(|k| k.starts_with(prefix)).cloned().collect())
            .unwrap_or_default()
    }

    fn line_of(&self, section: &str, key: &str) -> usize {
        self.sections.get(section).and_then(|m| m.get(key)).map_or(0, |e| e.line)
    }

    fn num(&mut self, section: &str, key: &str) -> Result<Option<(usize, f64)>> {
        match self.take(section, key) {
            None => Ok(None),
            Some((line, Value::Num(v))) => Ok(Some((line, v))),
            Some((line, v)) => Err(err(line, format!("{key} must be a number, got {}", v.describe()))),
        }
    }

    fn list(&mut self, section: &str, key: &str) -> Result<Option<(usize, Vec<f64>)>> {
        match self.take(section, key) {
            None => Ok(None),
            Some((line, Value::Num(v))) => Ok(Some((line, vec![v]))),
            Some((line, Value::List(v))) => Ok(Some((line, v))),
            Some((line, v)) => Err(err(line, format!("{key} must be a list of numbers, got {}", v.describe()))),
        }
    }

    fn name(&mut self, section: &str, key: &str) -> Result<Option<(usize, String)>> {
        match self.take(section, key) {
            None => Ok(None),
            Some((line, Value::Ident(s))) => Ok(Some((line, s))),
            Some((line, v)) => Err(err(line, format!("{key} must be a name, got {}", v.describe()))),
        }
    }

    fn first_unused(&self) -> Option<(usize, String, String)> {
        self.sections
            .iter()
            .flat_map(|(s, keys)| keys.iter().map(move |(k, e)| (e.line, s.clone(), k.clone(), e.used)))
            .filter(|e| !e.3)
            .min_by_key(|e| e.0)
            .map(|(l, s, k, _)| (l, s, k))
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

fn in_range(line: usize, key: &str, v: f64, ok: bool, what: &str) -> Result<f64> {
    if ok {
        Ok(v)
    } else {
        Err(err(line, format!("{key} = {v} out of range: {what}")))
    }
}

fn count(line: usize, key: &str, v: f64, min: usize) -> Result<usize> {
    if v.fract() == 0.0 && v >= min as f64 && v <= 1e9 {
        Ok(v as usize)
    } else {
        Err(err(line, format!("{key} = {v} must be an integer >= {min}")))
    }
}

fn coefficient(line: usize, key: &str, v: Value) -> Result<CoefficientField> {
    match v {
        Value::Num(c) => Ok(CoefficientField::constant(c)),
        Value::Call(f, args) => match (f.as_str(), args.as_slice()) {
            ("constant", [c]) => Ok(CoefficientField::constant(*c)),
            ("affine", [c0, slope @ ..]) if !slope.is_empty() => Ok(CoefficientField::affine(*c0, slope.to_vec())),
            ("periodic", [c0, amp, freq @ ..]) if !freq.is_empty() => {
                Ok(CoefficientField::periodic(*c0, *amp, freq.to_vec()))
            }
            _ => Err(err(
                line,
                format!("{key}: expected constant(c), affine(c0, s1, ..) or periodic(c0, amp, f1, ..), got {f}(..)"),
            )),
        },
        other => Err(err(line, format!("{key} must be a number or a coefficient call, got {}", other.describe()))),
    }
}

fn profile(line: usize, v: Value) -> Result<HProfile> {
    let r = match &v {
        Value::Ident(s) if s == "quadratic" => Ok(HProfile::quadratic()),
        Value::Call(f, a) if a.len() == 1 => match f.as_str() {
            "exp_square" => HProfile::exp_square(a[0]),
            "pow_log" => HProfile::pow_log(a[0]),
            "reg_power" => HProfile::reg_power(a[0]),
            "sqrt_linear" => HProfile::sqrt_linear(a[0]),
            _ => return Err(err(line, format!("unknown profile `{f}`"))),
        },
        _ => {
            return Err(err(
                line,
                "profile must be quadratic, exp_square(c), pow_log(p), reg_power(p) or sqrt_linear(t0)",
            ))
        }
    };
    r.map_err(|e| err(line, e.to_string()))
}

fn integrand_section(t: &mut Table) -> Result<IntegrandSection> {
    const S: &str = "integrand";
    let (fam_line, fam) = t.name(S, "family")?.unwrap_or((0, "quadratic".into()));
    let expr = t.take(S, "expr");
    let prof = t.take(S, "profile");
    let family = match fam.as_str() {
        "quadratic" => FamilyChoice::Quadratic,
        "exponential" => FamilyChoice::Exponential,
        "variable_exponent" => FamilyChoice::VariableExponent,
        "orlicz_log" => FamilyChoice::OrliczLog,
        "linear_minus_sqrt" => FamilyChoice::LinearMinusSqrt,
        "composed" => {
            let (line, v) = prof.clone().ok_or_else(|| err(fam_line, "family composed needs `profile`"))?;
            FamilyChoice::Composed(profile(line, v)?)
        }
        "custom" => match expr.clone() {
            Some((line, Value::Str(s))) => {
                parse(&s).map_err(|e| err(line, format!("expr: {e}")))?;
                FamilyChoice::Custom(s)
            }
            Some((line, v)) => return Err(err(line, format!("expr must be a quoted string, got {}", v.describe()))),
            None => return Err(err(fam_line, "family custom needs `expr`")),
        },
        other => {
            return Err(err(
                fam_line,
                format!(
                    "unknown family `{other}`; expected quadratic, exponential, variable_exponent, orlicz_log, \
                     linear_minus_sqrt, composed or custom"
                ),
            ))
        }
    };
    if let (Some((line, _)), false) = (&expr, matches!(family, FamilyChoice::Custom(_))) {
        return Err(err(*line, "`expr` is only valid with family = custom"));
    }
    if let (Some((line, _)), false) = (&prof, matches!(family, FamilyChoice::Composed(_))) {
        return Err(err(*line, "`profile` is only valid with family = composed"));
    }
    let t0 = match t.num(S, "t0")? {
        Some((line, v)) => in_range(line, "t0", v, v > 0.0 && v.is_finite(), "t0 > 0")?,
        None => 1.0,
    };
    let mut coefficients = CoefficientSet::new();
    for key in t.keys_with_prefix(S, "coef.") {
        let (line, v) = t.take(S, &key).expect("key listed");
        let name = &key["coef.".len()..];
        if !is_name(name) {
            return Err(err(line, format!("bad coefficient name `{name}`")));
        }
        coefficients.insert(name.to_string(), coefficient(line, &key, v)?);
    }
    Ok(IntegrandSection { family, t0, coefficients })
}

fn structural_section(t: &mut Table) -> Result<StructuralSection> {
    const S: &str = "structural";
    let n = match t.num(S, "n")? {
        Some((line, v)) => count(line, "n", v, 2)?,
        None => 2,
    };
    if n > 8 {
        return Err(err(t.line_of(S, "n"), format!("n = {n} out of range: 2 <= n <= 8")));
    }
    let nf = n as f64;
    let theta = t
        .num(S, "theta")?
        .map(|(l, v)| in_range(l, "theta", v, v >= 1.0 && v.is_finite(), "theta >= 1"))
        .transpose()?;
    let beta = t
        .num(S, "beta")?
        .map(|(l, v)| {
            in_range(
                l,
                "beta",
                v,
                v > 1.0 / nf && v < 2.0 / nf,
                &format!("1/n < beta < 2/n, i.e. ({}, {}) for n = {n}", 1.0 / nf, 2.0 / nf),
            )
        })
        .transpose()?;
    let alpha = t
        .num(S, "alpha")?
        .map(|(l, v)| {
            in_range(l, "alpha", v, v > 1.0 && v <= nf / (nf - 1.0) + 1e-15, &format!("1 < alpha <= n/(n-1) = {}", nf / (nf - 1.0)))
        })
        .transpose()?;
    let epsilon = match t.num(S, "epsilon")? {
        Some((l, v)) => in_range(l, "epsilon", v, v > 0.0 && v.is_finite(), "epsilon > 0")?,
        None => crate::bound::DEFAULT_EPSILON,
    };
    let t_max = match t.num(S, "t_max")? {
        Some((l, v)) => in_range(l, "t_max", v, v > 0.0 && v.is_finite(), "t_max > 0")?,
        None => 1e3,
    };
    let two_star_plane = match t.num(S, "two_star_plane")? {
        Some((l, v)) => in_range(l, "two_star_plane", v, v > 2.0 && v.is_finite(), "two_star_plane > 2")?,
        None => DEFAULT_TWO_STAR_PLANE,
    };
    let lo = t.list(S, "subdomain_lo")?;
    let hi = t.list(S, "subdomain_hi")?;
    let subdomain = match (lo, hi) {
        (None, None) => None,
        (Some((l, lo)), Some((_, hi))) => {
            if lo.len() != n || hi.len() != n {
                return Err(err(l, format!("subdomain corners need {n} coordinates each")));
            }
            let sub = BoxDomain::new(lo.clone(), hi.clone()).map_err(|e| err(l, e.to_string()))?;
            if !BoxDomain::unit(n).contains_box(&sub) {
                return Err(err(l, "the subdomain must lie inside the unit cube"));
            }
            Some((lo, hi))
        }
        (Some((l, _)), None) | (None, Some((l, _))) => {
            return Err(err(l, "subdomain_lo and subdomain_hi must be given together"))
        }
    };
    Ok(StructuralSection {
        n,
        theta,
        beta,
        alpha,
        epsilon,
        t_max,
        subdomain,
        two_star_plane,
    })
}

fn datum(t: &mut Table, components: usize) -> Result<BoundaryDatum> {
    const S: &str = "solver";
    let (line, id) = t.name(S, "datum")?.unwrap_or((0, "harmonic_quadratic".into()));
    let mut params = BTreeMap::new();
    for key in t.keys_with_prefix(S, "datum.") {
        let (l, v) = t.take(S, &key).expect("key listed");
        params.insert(key["datum.".len()..].to_string(), (l, v));
    }
    let allowed: &[&str] = match id.as_str() {
        "affine" => &["a", "b"],
        "harmonic_quadratic" | "dilation" => &["scale"],
        "sine" => &["k", "amplitude"],
        "radial" => &["power", "scale", "center"],
        other => {
            return Err(err(
                line,
                format!("unknown datum `{other}`; expected affine, harmonic_quadratic, dilation, sine or radial"),
            ))
        }
    };
    if let Some((k, (l, _))) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(err(*l, format!("datum {id} takes parameters {allowed:?}, got `datum.{k}`")));
    }
    let mut num = |k: &str, default: f64| -> Result<f64> {
        match params.remove(k) {
            None => Ok(default),
            Some((_, Value::Num(v))) => Ok(v),
            Some((l, v)) => Err(err(l, format!("datum.{k} must be a number, got {}", v.describe()))),
        }
    };
    let d = match id.as_str() {
        "harmonic_quadratic" => BoundaryDatum::HarmonicQuadratic { scale: num("scale", 1.0)? },
        "dilation" => BoundaryDatum::dilation(num("scale", 1.0)?),
        "sine" => BoundaryDatum::Sine {
            k: num("k", 1.0)?,
            amplitude: num("amplitude", 1.0)?,
        },
        "radial" => {
            let power = num("power", 2.0)?;
            let scale = num("scale", 1.0)?;
            let center = match params.remove("center") {
                None => [0.5, 0.5],
                Some((_, Value::List(c))) if c.len() == 2 => [c[0], c[1]],
                Some((l, _)) => return Err(err(l, "datum.center must be two numbers")),
            };
            BoundaryDatum::Radial { power, scale, center }
        }
        _ => {
            let list = |p: Option<(usize, Value)>, len: usize, name: &str| -> Result<Vec<f64>> {
                match p {
                    None => Err(err(line, format!("datum affine needs datum.{name} with {len} numbers"))),
                    Some((_, Value::Num(v))) if len == 1 => Ok(vec![v]),
                    Some((_, Value::List(v))) if v.len() == len => Ok(v),
                    Some((l, _)) => Err(err(l, format!("datum.{name} needs {len} numbers"))),
                }
            };
            let a = list(params.remove("a"), 2 * components, "a")?;
            let b = match params.remove("b") {
                None => vec![0.0; components],
                p => list(p, components, "b")?,
            };
            BoundaryDatum::affine(a, b).map_err(|e| err(line, e.to_string()))?
        }
    };
    d.check_components(components).map_err(|e| err(line, e.to_string()))?;
    Ok(d)
}

fn solver_section(t: &mut Table) -> Result<SolverSection> {
    const S: &str = "solver";
    let box_lo = match t.list(S, "box_lo")? {
        Some((_, v)) if v.len() == 2 => [v[0], v[1]],
        Some((l, _)) => return Err(err(l, "box_lo needs two numbers")),
        None => [0.0, 0.0],
    };
    let box_side = match t.num(S, "box_side")? {
        Some((l, v)) => in_range(l, "box_side", v, v > 0.0 && v.is_finite(), "box_side > 0")?,
        None => 1.0,
    };
    let cells = match t.list(S, "cells")? {
        Some((l, v)) => {
            let c = v.iter().map(|&c| count(l, "cells", c, 4)).collect::<Result<Vec<_>>>()?;
            if c.is_empty() || c.windows(2).any(|w| w[1] <= w[0]) {
                return Err(err(l, "cells must be a non-empty increasing list"));
            }
            c
        }
        None => vec![16, 32, 64],
    };
    let components = match t.num(S, "components")? {
        Some((l, v)) => {
            let c = count(l, "components", v, 1)?;
            if c > 8 {
                return Err(err(l, format!("components = {c} out of range: 1 <= components <= 8")));
            }
            c
        }
        None => 1,
    };
    let datum = datum(t, components)?;
    let mut options = SolveOptions::default();
    if let Some((l, v)) = t.num(S, "tol")? {
        options.tol = in_range(l, "tol", v, v > 0.0 && v.is_finite(), "tol > 0")?;
    }
    if let Some((l, v)) = t.num(S, "max_iter")? {
        options.max_iter = count(l, "max_iter", v, 1)?;
    }
    if let Some((l, m)) = t.name(S, "method")? {
        options.method = match m.as_str() {
            "ncg" => Method::NonlinearCG,
            "gradient_descent" => Method::GradientDescentArmijo,
            other => return Err(err(l, format!("unknown method `{other}`; expected ncg or gradient_descent"))),
        };
    }
    if let Some((l, v)) = t.num(S, "init_noise")? {
        options.init_noise = in_range(l, "init_noise", v, v >= 0.0 && v.is_finite(), "init_noise >= 0")?;
    }
    if let Some((l, v)) = t.num(S, "seed")? {
        options.seed = count(l, "seed", v, 0)? as u64;
    }
    let clamp_lower = t
        .num(S, "clamp_lower")?
        .map(|(l, v)| in_range(l, "clamp_lower", v, v > 0.0 && v.is_finite(), "clamp_lower > 0"))
        .transpose()?;
    let clamp_upper = t
        .num(S, "clamp_upper")?
        .map(|(l, v)| in_range(l, "clamp_upper", v, v > 0.0 && v.is_finite(), "clamp_upper > 0"))
        .transpose()?;
    if let (Some(n), Some(m)) = (clamp_lower, clamp_upper) {
        if n >= m {
            return Err(err(t.line_of(S, "clamp_upper"), format!("clamp needs N < M, got N = {n}, M = {m}")));
        }
    }
    let clamp_sweep = match t.name(S, "clamp_sweep")? {
        None => ClampAxis::Upper,
        Some((_, s)) if s == "upper" => ClampAxis::Upper,
        Some((_, s)) if s == "lower" => ClampAxis::Lower,
        Some((l, s)) => return Err(err(l, format!("clamp_sweep must be lower or upper, got `{s}`"))),
    };
    let clamp_values = match t.list(S, "clamp_values")? {
        Some((l, v)) => {
            if v.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
                return Err(err(l, "clamp_values must be positive"));
            }
            v
        }
        None => match clamp_sweep {
            ClampAxis::Upper => vec![1e1, 1e2, 1e3],
            ClampAxis::Lower => vec![1e-2, 1e-3, 1e-4],
        },
    };
    Ok(SolverSection {
        box_lo,
        box_side,
        cells,
        components,
        datum,
        options,
        clamp_lower,
        clamp_upper,
        clamp_sweep,
        clamp_values,
    })
}

fn experiment_section(t: &mut Table) -> Result<ExperimentSection> {
    const S: &str = "experiment";
    let mode = match t.name(S, "mode")? {
        None => None,
        Some((l, m)) => Some(Mode::from_name(&m.replace('_', "-")).ok_or_else(|| {
            err(l, format!("unknown mode `{m}`; expected check, solve, verify-bound, sweep-mesh, sweep-clamp or lemmas"))
        })?),
    };
    let rho = t
        .num(S, "rho")?
        .map(|(l, v)| in_range(l, "rho", v, v > 0.0 && v.is_finite(), "rho > 0"))
        .transpose()?;
    let radius = t
        .num(S, "R")?
        .map(|(l, v)| in_range(l, "R", v, v > 0.0 && v.is_finite(), "R > 0"))
        .transpose()?;
    if let (Some(r), Some(big)) = (rho, radius) {
        if r >= big {
            return Err(err(t.line_of(S, "R"), format!("need rho < R, got rho = {r}, R = {big}")));
        }
    }
    let center = match t.list(S, "center")? {
        Some((_, v)) if v.len() == 2 => Some([v[0], v[1]]),
        Some((l, _)) => return Err(err(l, "center needs two numbers")),
        None => None,
    };
    let output = match t.take(S, "output") {
        None => None,
        Some((_, Value::Str(s))) | Some((_, Value::Ident(s))) => Some(PathBuf::from(s)),
        Some((l, v)) => return Err(err(l, format!("output must be a path string, got {}", v.describe()))),
    };
    let samples = match t.num(S, "samples")? {
        Some((l, v)) => count(l, "samples", v, 1)?,
        None => 100_000,
    };
    let seed = match t.num(S, "seed")? {
        Some((l, v)) => count(l, "seed", v, 0)? as u64,
        None => 0,
    };
    Ok(ExperimentSection {
        mode,
        rho,
        radius,
        center,
        output,
        samples,
        seed,
    })
}

/// Parses and validates a config; errors carry the offending line.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut t = Table::parse(text)?;
    let cfg = ExperimentConfig {
        integrand: integrand_section(&mut t)?,
        structural: structural_section(&mut t)?,
        solver: solver_section(&mut t)?,
        experiment: experiment_section(&mut t)?,
    };
    if let Some((line, section, key)) = t.first_unused() {
        return Err(err(line, format!("unknown key `{key}` in [{section}]")));
    }
    Ok(cfg)
}

impl ExperimentConfig {
    /// The integrand on `domain`.
    pub fn build_integrand(&self, domain: BoxDomain) -> Result<IntegrandSpec> {
        let i = &self.integrand;
        let c = &i.coefficients;
        match &i.family {
            FamilyChoice::Quadratic => make_builtin(Builtin::ComposedH(HProfile::quadratic()), c, i.t0, domain),
            FamilyChoice::Exponential => make_builtin(Builtin::Exponential, c, i.t0, domain),
            FamilyChoice::VariableExponent => make_builtin(Builtin::VariableExponent, c, i.t0, domain),
            FamilyChoice::OrliczLog => make_builtin(Builtin::OrliczLog, c, i.t0, domain),
            FamilyChoice::LinearMinusSqrt => make_builtin(Builtin::LinearMinusSqrt, c, i.t0, domain),
            FamilyChoice::Composed(h) => make_builtin(Builtin::ComposedH(h.clone()), c, i.t0, domain),
            FamilyChoice::Custom(src) => to_integrand(&parse(src)?, c, i.t0, domain),
        }
    }

    /// The `n`-dimensional integrand on the unit cube used by `check` and `lemmas`.
    pub fn structural_integrand(&self) -> Result<IntegrandSpec> {
        self.build_integrand(BoxDomain::unit(self.structural.n))
    }

    /// The planar integrand on the solver box.
    pub fn solver_integrand(&self) -> Result<IntegrandSpec> {
        let s = &self.solver;
        let lo = s.box_lo.to_vec();
        let hi = vec![lo[0] + s.box_side, lo[1] + s.box_side];
        self.build_integrand(BoxDomain::new(lo, hi)?)
    }

    /// The clamp from `clamp_lower` / `clamp_upper`, if either is set.
    pub fn clamp(&self) -> Result<Option<RegularizationClamp>> {
        match (self.solver.clamp_lower, self.solver.clamp_upper) {
            (None, None) => Ok(None),
            (n, m) => RegularizationClamp::new(
                n.unwrap_or(crate::solver::DEFAULT_SLOW_GROWTH_LOWER),
                m.unwrap_or(crate::solver::DEFAULT_SLOW_GROWTH_UPPER),
            )
            .map(Some),
        }
    }

    /// Structural parameters with `θ`, `β` filled from the given defaults.
    pub fn structural_params(&self, theta: f64, beta: f64) -> StructuralParams {
        let s = &self.structural;
        let mut p = StructuralParams::new(s.n, s.theta.unwrap_or(theta), s.beta.unwrap_or(beta))
            .with_t_range(self.integrand.t0, s.t_max);
        if let Some(a) = s.alpha {
            p = p.with_alpha(a);
        }
        if let Some((lo, hi)) = &s.subdomain {
            p = p.with_subdomain(BoxDomain::new(lo.clone(), hi.clone()).expect("validated at parse time"));
        }
        p.two_star_plane = s.two_star_plane;
        p
    }
}
