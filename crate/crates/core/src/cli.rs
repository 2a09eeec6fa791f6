//! Batch JSON front end: one job document in, one report document out.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use num_traits::Zero;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::decor::{self, ConfigClass, DecoratedConfig, FamilyMember, FiltrationNumerics, Frame, NPerRank, SubBounds};
use crate::error::Error;
use crate::fans;
use crate::kempf;
use crate::ratcore::{serde_rat, serde_rat_mat, Rational, RatPolynomial};
use crate::rep::{enumerate_weights, Character, TensorPoint, WeightedFlag};
use crate::VERSION;

#[derive(Parser, Debug)]
#[command(name = "stabwall", version, about = "Exact GIT stability and wall-and-chamber computations")]
pub struct Args {
    /// Job file: {"command": ..., "payload": {...}, "seed": n}
    #[arg(long)]
    pub job: PathBuf,
    /// Overrides the seed recorded in the job.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Mark walls that no single filtration crosses as unconfirmed.
    #[arg(long)]
    pub verify_walls: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Walls,
    Check,
    Instability,
    Fan,
    Testset,
    Thresholds,
    Probe,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    pub payload: Value,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed job or payload; exit code 2.
    Usage(String),
    /// Well-formed job the mathematics rejects; exit code 3.
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

fn parse<T: DeserializeOwned>(v: &Value) -> Result<T, CliError> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Usage(format!("payload: {e}")))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TypePayload {
    a: usize,
    b: usize,
    c: i64,
    r: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FanPayload {
    r: usize,
    #[serde(default)]
    weight_sets: Option<Vec<Vec<Character>>>,
    #[serde(default)]
    a: Option<usize>,
    #[serde(default)]
    b: Option<usize>,
    #[serde(default)]
    c: Option<i64>,
}

#[derive(Deserialize)]
struct Mat(#[serde(with = "serde_rat_mat")] Vec<Vec<Rational>>);

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstabilityPayload {
    point: TensorPoint,
    #[serde(default)]
    basis_changes: Vec<Mat>,
}

/// Sub-sheaf bounds shared by `walls` and `check`.
#[derive(Deserialize, Default)]
struct BoundsPayload {
    #[serde(default)]
    bounds: Option<BTreeMap<String, (i64, i64)>>,
    #[serde(default)]
    hilberts: Option<BTreeMap<String, Vec<RatPolynomial>>>,
    #[serde(default)]
    n: Option<BTreeMap<String, i64>>,
}

/// Rank-keyed maps arrive with string keys (flattened payloads buffer them).
fn rank_keys<T: Clone>(m: &BTreeMap<String, T>) -> Result<BTreeMap<usize, T>, CliError> {
    m.iter()
        .map(|(k, v)| {
            k.parse::<usize>()
                .map(|k| (k, v.clone()))
                .map_err(|_| CliError::Usage(format!("rank key {k:?} is not a nonnegative integer")))
        })
        .collect()
}

impl BoundsPayload {
    fn resolve(&self, class: &ConfigClass, ts: &fans::TestSet) -> Result<SubBounds, CliError> {
        match (&self.bounds, &self.hilberts) {
            (Some(_), Some(_)) => Err(CliError::Usage("give either bounds or hilberts, not both".into())),
            (Some(b), None) => Ok(SubBounds::Degrees(rank_keys(b)?)),
            (None, Some(h)) => Ok(SubBounds::Hilberts(rank_keys(h)?)),
            (None, None) => {
                if class.dim_x > 1 {
                    return Err(Error::Parameter("dimX > 1 needs explicit hilberts".into()).into());
                }
                let n = self.n.as_ref().map(rank_keys).transpose()?.unwrap_or_default();
                if !class.d_lambda.is_zero() && n.is_empty() {
                    return Err(Error::Parameter("default bounds with deg Λ ≠ 0 need n".into()).into());
                }
                let n = (1..class.r).map(|k| (k, n.get(&k).copied().unwrap_or(0))).collect();
                Ok(SubBounds::Degrees(decor::default_degree_bounds(class, ts, &n)?))
            }
        }
    }
}

#[derive(Deserialize)]
struct WallsPayload {
    #[serde(flatten)]
    class: ConfigClass,
    #[serde(flatten)]
    bounds: BoundsPayload,
    #[serde(default)]
    verify: bool,
}

#[derive(Deserialize)]
struct ThresholdsPayload {
    #[serde(flatten)]
    class: ConfigClass,
    n: BTreeMap<String, i64>,
}

#[derive(Deserialize)]
struct CheckConfig {
    #[serde(flatten)]
    class: ConfigClass,
    point: TensorPoint,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberPayload {
    flag: WeightedFlag,
    #[serde(default, with = "opt_rat_vec")]
    degrees: Option<Vec<Rational>>,
    #[serde(default)]
    hilberts: Option<Vec<RatPolynomial>>,
    #[serde(default)]
    frame: Frame,
}

mod opt_rat_vec {
    use serde::{Deserialize, Deserializer};

    use crate::ratcore::{serde_rat_vec, Rational};

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rational>>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "serde_rat_vec")] Vec<Rational>);
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridPayload {
    #[serde(with = "serde_rat")]
    from: Rational,
    #[serde(with = "serde_rat")]
    to: Rational,
    #[serde(with = "serde_rat")]
    step: Rational,
}

#[derive(Deserialize)]
struct CheckPayload {
    config: CheckConfig,
    delta: RatPolynomial,
    #[serde(default)]
    family: Option<Vec<MemberPayload>>,
    #[serde(flatten)]
    bounds: BoundsPayload,
    #[serde(default)]
    basis_changes: Vec<Mat>,
    /// A wall list, a wall report, or a full `walls` job report.
    #[serde(default)]
    walls: Option<Value>,
    #[serde(default)]
    grid: Option<GridPayload>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProbePayload {
    w1: TensorPoint,
    w2: TensorPoint,
    #[serde(with = "serde_rat")]
    eta: Rational,
}

const MAX_GRID_ROWS: usize = 100_000;

fn walls_from_value(v: &Value) -> Result<Vec<RatPolynomial>, CliError> {
    let list = match v {
        Value::Array(_) => v,
        Value::Object(o) => match (o.get("walls"), o.get("result")) {
            (Some(w), _) => w,
            (None, Some(res)) => return walls_from_value(res),
            _ => return Err(CliError::Usage("walls object has no walls field".into())),
        },
        _ => return Err(CliError::Usage("walls must be a list or a wall report".into())),
    };
    let mut walls: Vec<RatPolynomial> = parse(list)?;
    walls.sort();
    walls.dedup();
    Ok(walls)
}

fn run_walls(p: &Value, verify_flag: bool) -> Result<Value, CliError> {
    let p: WallsPayload = parse(p)?;
    let sheaf = p.class.sheaf()?;
    let ts = fans::test_set(p.class.a, p.class.b, p.class.c, p.class.r)?;
    let bounds = p.bounds.resolve(&p.class, &ts)?;
    let rep = decor::candidate_walls_for(&sheaf, p.class.a, &ts, &bounds, verify_flag || p.verify)?;
    Ok(to_value(&rep))
}

fn run_thresholds(p: &Value) -> Result<Value, CliError> {
    let p: ThresholdsPayload = parse(p)?;
    let ts = fans::test_set(p.class.a, p.class.b, p.class.c, p.class.r)?;
    let n: NPerRank = rank_keys(&p.n)?;
    let (d0, d1) = decor::delta_bounds(&p.class, &ts, &n)?;
    let bounds = decor::default_degree_bounds(&p.class, &ts, &n)?;
    Ok(json!({
        "delta0": d0.to_string(),
        "delta1": d1.to_string(),
        "default_bounds": bounds,
        "test_set": to_value(&ts),
    }))
}

fn run_check(p: &Value) -> Result<Value, CliError> {
    let p: CheckPayload = parse(p)?;
    let class = &p.config.class;
    let sheaf = class.sheaf()?;
    let config = DecoratedConfig::new(sheaf.clone(), class.a, class.b, class.c, class.d_lambda.clone(), p.config.point)?;
    let family: Vec<FamilyMember> = match &p.family {
        Some(members) => members
            .iter()
            .map(|m| {
                let filt = match (&m.degrees, &m.hilberts) {
                    (Some(d), None) => FiltrationNumerics::from_degrees(&sheaf, m.flag.clone(), d)?,
                    (None, Some(h)) => FiltrationNumerics::new(m.flag.clone(), h.clone())?,
                    _ => return Err(CliError::Usage("each member needs degrees or hilberts".into())),
                };
                Ok(FamilyMember { filt, frame: m.frame.clone() })
            })
            .collect::<Result<_, CliError>>()?,
        None => {
            let ts = fans::test_set(class.a, class.b, class.c, class.r)?;
            let bounds = p.bounds.resolve(class, &ts)?;
            decor::bounded_family(&sheaf, &ts.entries, &bounds, &decor::permutation_frames(class.r))?
        }
    };
    let basis: Vec<Vec<Vec<Rational>>> = p.basis_changes.into_iter().map(|m| m.0).collect();
    let verdict = decor::delta_semistable(&config, &p.delta, &family)?;
    let asym = decor::asymptotically_semistable(&config, &family, &basis)?;
    let mut out = json!({ "delta": to_value(&p.delta), "verdict": to_value(&verdict), "asymptotic": to_value(&asym) });
    if let Some(w) = &p.walls {
        let walls = walls_from_value(w)?;
        out["chamber"] = to_value(&decor::chamber_report(&walls, &p.delta)?);
    }
    if let Some(g) = &p.grid {
        if g.step <= Rational::zero() || g.from > g.to {
            return Err(Error::Parameter("grid needs from ≤ to and a positive step".into()).into());
        }
        let mut rows = Vec::new();
        let mut x = g.from.clone();
        while x <= g.to {
            if rows.len() >= MAX_GRID_ROWS {
                return Err(Error::Parameter(format!("grid exceeds {MAX_GRID_ROWS} rows")).into());
            }
            let dl = RatPolynomial::constant(x.clone());
            if dl.is_positive() {
                let v = decor::delta_semistable(&config, &dl, &family)?;
                rows.push(json!({ "delta": x.to_string(), "stability": to_value(&v.stability) }));
            }
            x += &g.step;
        }
        out["grid"] = Value::Array(rows);
    }
    Ok(out)
}

fn run_instability(p: &Value) -> Result<Value, CliError> {
    let p: InstabilityPayload = parse(p)?;
    let basis: Vec<Vec<Vec<Rational>>> = p.basis_changes.into_iter().map(|m| m.0).collect();
    if !kempf::torus_semistable(&p.point) {
        let (cert, residual) = kempf::destabilizing_certificate(&p.point)?;
        return Ok(json!({ "frame": Value::Null, "certificate": to_value(&cert), "residual": to_value(&residual) }));
    }
    let (frame, cert) = kempf::instability_under(&p.point, &basis)?;
    Ok(json!({ "frame": frame, "certificate": to_value(&cert) }))
}

fn run_fan(p: &Value) -> Result<Value, CliError> {
    let p: FanPayload = parse(p)?;
    let sets: Vec<BTreeSet<Character>> = match (&p.weight_sets, p.a, p.c) {
        (Some(ws), None, None) => ws.iter().map(|s| s.iter().cloned().collect()).collect(),
        (None, Some(a), Some(c)) => vec![enumerate_weights(a, p.b.unwrap_or(1).max(1), c, p.r).into_keys().collect()],
        _ => return Err(CliError::Usage("fan needs weight_sets or a and c".into())),
    };
    Ok(to_value(&fans::chamber_fan(&sets, p.r)?))
}

fn run_probe(p: &Value) -> Result<Value, CliError> {
    let p: ProbePayload = parse(p)?;
    Ok(to_value(&fans::product_instability_probe(&p.w1, &p.w2, &p.eta)?))
}

/// Computes the `result` part of a report.
pub fn execute(command: Command, payload: &Value, verify_walls: bool) -> Result<Value, CliError> {
    match command {
        Command::Testset => {
            let p: TypePayload = parse(payload)?;
            Ok(to_value(&fans::test_set(p.a, p.b, p.c, p.r)?))
        }
        Command::Fan => run_fan(payload),
        Command::Instability => run_instability(payload),
        Command::Walls => run_walls(payload, verify_walls),
        Command::Check => run_check(payload),
        Command::Thresholds => run_thresholds(payload),
        Command::Probe => run_probe(payload),
    }
}

/// Full report document; domain errors are reported in-band.
pub fn run(job: &JobSpec, verify_walls: bool) -> (Value, i32) {
    let mut doc = json!({
        "command": job.command,
        "version": VERSION,
        "seed": job.seed,
        "payload": job.payload,
    });
    match execute(job.command, &job.payload, verify_walls) {
        Ok(result) => {
            doc["result"] = result;
            (doc, 0)
        }
        Err(e) => {
            let code = e.exit_code();
            doc["error"] = match e {
                CliError::Usage(m) => json!({ "kind": "usage", "message": m }),
                CliError::Domain(e) => json!({ "kind": e.kind(), "message": e.to_string() }),
            };
            (doc, code)
        }
    }
}

pub fn parse_job(text: &str) -> Result<JobSpec, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Usage(format!("job: {e}")))
}

fn write_atomically(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

/// Runs the CLI and returns the process exit code.
pub fn main_with(args: Args) -> i32 {
    let text = match std::fs::read_to_string(&args.job) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.job.display());
            return 2;
        }
    };
    let mut job = match parse_job(&text) {
        Ok(j) => j,
        Err(CliError::Usage(m) | CliError::Domain(Error::Parse(m))) => {
            eprintln!("error: {m}");
            return 2;
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            return 3;
        }
    };
    if args.seed.is_some() {
        job.seed = args.seed;
    }
    let (doc, code) = run(&job, args.verify_walls);
    if let Some(err) = doc.get("error") {
        eprintln!("error: {}", err["message"].as_str().unwrap_or_default());
    }
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("reports serialize");
    bytes.push(b'\n');
    let written = match &args.out {
        Some(path) => write_atomically(path, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return 2;
    }
    code
}
