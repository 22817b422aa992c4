//! JSON front end for the groupoid operations.
//!
//! Elements are `{"lambda": [...], "h": [...], "t": ...}`. Arrows live over
//! the simplex `Δ_m` (`m` = length of `lambda`) unless the request names a
//! Grassmannian with `"k"` and `"n"`.

use pnkit_core::geometry::{ChartId, OrbitSpec};
use pnkit_core::groupoid::{membership_cpn, pair_to_element, Groupoid, GroupoidElement, GtPolytope, MEMBERSHIP_TOL};
use pnkit_core::models::{GtPattern, HermitianModel};
use pnkit_core::Error;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Compose,
    Member,
    Target,
    PairMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub lambda: Vec<f64>,
    pub h: Vec<f64>,
    pub t: f64,
}

impl From<Element> for GroupoidElement {
    fn from(e: Element) -> Self {
        GroupoidElement {
            lambda: e.lambda,
            h: e.h,
            t: e.t,
        }
    }
}

impl From<GroupoidElement> for Element {
    fn from(g: GroupoidElement) -> Self {
        Element {
            lambda: g.lambda,
            h: g.h,
            t: g.t,
        }
    }
}

#[derive(Debug, Deserialize)]
struct Shape {
    k: Option<usize>,
    n: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct ComposeArgs {
    first: Element,
    second: Element,
}

#[derive(Debug, Deserialize)]
struct PairMapArgs {
    n: usize,
    #[serde(default = "one")]
    k: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    t: f64,
    #[serde(default = "default_c")]
    c: f64,
    #[serde(default = "default_kappa")]
    kappa: f64,
}

fn one() -> usize {
    1
}

fn default_c() -> f64 {
    0.5
}

fn default_kappa() -> f64 {
    2.0
}

/// A failed request: exit code plus a machine-readable error object.
#[derive(Debug, Clone, PartialEq)]
pub struct CliFailure {
    pub code: i32,
    pub body: Value,
}

pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_NOT_COMPOSABLE: i32 = 4;
pub const EXIT_OUTSIDE_POLYTOPE: i32 = 5;

fn failure(code: i32, kind: &str, message: String) -> CliFailure {
    CliFailure {
        code,
        body: json!({ "error": { "kind": kind, "message": message } }),
    }
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::NotComposable { .. } => (EXIT_NOT_COMPOSABLE, "NotComposable"),
            Error::TargetOutsidePolytope => (EXIT_OUTSIDE_POLYTOPE, "TargetOutsidePolytope"),
            Error::SingularLog { .. } => (EXIT_NUMERICAL, "SingularLog"),
            Error::DimensionMismatch { .. } | Error::InvalidSpec(_) => (EXIT_BAD_INPUT, "InvalidInput"),
            _ => (EXIT_NUMERICAL, "NumericalError"),
        };
        failure(code, kind, e.to_string())
    }
}

fn parse<T: for<'de> Deserialize<'de>>(args: &Value) -> Result<T, CliFailure> {
    T::deserialize(args).map_err(|e| failure(EXIT_BAD_INPUT, "InvalidInput", e.to_string()))
}

fn groupoid_for(args: &Value, dim: usize) -> Result<Groupoid, CliFailure> {
    let shape: Shape = parse(args)?;
    let polytope = match (shape.k, shape.n) {
        (Some(k), Some(n)) => GtPolytope::new(k, n)?,
        _ => GtPolytope::simplex(dim)?,
    };
    Ok(Groupoid::over_polytope(polytope))
}

pub fn run(command: Command, args: &Value) -> Result<Value, CliFailure> {
    match command {
        Command::Compose => {
            let a: ComposeArgs = parse(args)?;
            let g = groupoid_for(args, a.first.lambda.len())?;
            let out = g.compose(&a.first.into(), &a.second.into())?;
            Ok(json!({ "result": Element::from(out) }))
        }
        Command::Member => {
            let e: Element = parse(args)?;
            Ok(json!({ "member": membership_cpn(&e.into(), MEMBERSHIP_TOL) }))
        }
        Command::Target => {
            let e: Element = parse(args)?;
            let g = groupoid_for(args, e.lambda.len())?;
            Ok(json!({ "target": g.target(&e.into())? }))
        }
        Command::PairMap => {
            let a: PairMapArgs = parse(args)?;
            let spec = OrbitSpec::new(a.n, a.k, 1.0)?;
            let pattern = GtPattern::counting_rule(&spec);
            let model = HermitianModel::new(spec, a.c, a.kappa, ChartId::standard(a.k), pattern)?;
            let e = pair_to_element(&model, &a.x, &a.y, a.t)?;
            Ok(json!({ "element": Element::from(e) }))
        }
    }
}

/// Parses the argument string and runs `command`.
pub fn run_str(command: Command, args: &str) -> Result<Value, CliFailure> {
    let value: Value = serde_json::from_str(args).map_err(|e| failure(EXIT_BAD_INPUT, "InvalidJson", e.to_string()))?;
    run(command, &value)
}
