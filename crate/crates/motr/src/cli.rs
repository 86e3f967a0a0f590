//! Command-line front end: run-manifest parsing, solve orchestration, the
//! external evaluator wire protocol, and emission of the run artifacts
//! (`archive.csv`, `iterations.jsonl`, `density_surface.csv`,
//! `metrics.json`).

use std::fs;
use std::io::{BufRead, BufReader, Write as IoWrite};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, ChildStdout, Command, ExitCode, Stdio};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::core::{BoxBounds, DecisionVector, EvalError, ObjectiveVector, Problem};
use crate::driver::{DriverError, InfluenceKind, RhoConvention, Solver, SolverConfig};
use crate::geometry;
use crate::metrics::{self, FrontSample, HvReference, MetricsError};
use crate::problems::{self, ProblemSpec};
use crate::surrogate::quadratic_point_count;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("unknown manifest key `{0}`")]
    UnknownKey(String),
    #[error("{0}")]
    Invalid(String),
    #[error("external evaluator failure: {0}")]
    Evaluator(String),
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("cannot serialize output: {0}")]
    Serialize(#[from] serde_json::Error),
}

/// Where the objective function comes from: the built-in registry or an
/// external child process speaking the line protocol.
#[derive(Debug, Clone)]
pub enum ProblemSource {
    Registry(String),
    External {
        cmd: String,
        n: usize,
        p: usize,
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
}

/// Which quality metrics the run should emit, and their inputs.
#[derive(Debug, Clone)]
pub struct MetricToggles {
    /// Generational distance against a front sample.
    pub gd: bool,
    /// Optional CSV of front points overriding the registry sampler.
    pub front_path: Option<PathBuf>,
    /// Dominated hypervolume.
    pub hv: bool,
    /// Fixed hypervolume reference; derived from the run when absent.
    pub hv_ref: Option<Vec<f64>>,
}

impl Default for MetricToggles {
    fn default() -> Self {
        Self {
            gd: true,
            front_path: None,
            hv: true,
            hv_ref: None,
        }
    }
}

/// A fully validated run description parsed from a manifest file.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub problem: ProblemSource,
    pub solver: SolverConfig,
    pub metrics: MetricToggles,
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Invalid(format!("{key}: expected a finite number, got `{value}`")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value
        .parse::<usize>()
        .map_err(|_| CliError::Invalid(format!("{key}: expected a nonnegative integer, got `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(CliError::Invalid(format!(
            "{key}: expected true or false, got `{value}`"
        ))),
    }
}

/// Parses "c1,c2,…" (commas and/or whitespace) into finite numbers.
fn parse_vector(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    if parts.is_empty() {
        return Err(CliError::Invalid(format!("{key}: expected at least one number")));
    }
    parts.iter().map(|p| parse_f64(key, p)).collect()
}

#[derive(Default)]
struct ManifestBuilder {
    problem: Option<String>,
    evaluator_cmd: Option<String>,
    evaluator_n: Option<usize>,
    evaluator_p: Option<usize>,
    evaluator_lower: Option<Vec<f64>>,
    evaluator_upper: Option<Vec<f64>>,
    solver: SolverConfig,
    metrics: MetricToggles,
    seen: Vec<String>,
}

impl ManifestBuilder {
    fn apply(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if self.seen.iter().any(|k| k == key) {
            return Err(CliError::Invalid(format!("duplicate manifest key `{key}`")));
        }
        self.seen.push(key.to_string());
        let s = &mut self.solver;
        match key {
            "problem" => self.problem = Some(value.to_string()),
            "evaluator.cmd" => self.evaluator_cmd = Some(value.to_string()),
            "evaluator.n" => self.evaluator_n = Some(parse_usize(key, value)?),
            "evaluator.p" => self.evaluator_p = Some(parse_usize(key, value)?),
            "evaluator.lower" => self.evaluator_lower = Some(parse_vector(key, value)?),
            "evaluator.upper" => self.evaluator_upper = Some(parse_vector(key, value)?),
            "solver.x0" => {
                s.x0 = Some(
                    DecisionVector::new(parse_vector(key, value)?)
                        .map_err(|e| CliError::Invalid(format!("{key}: {e}")))?,
                )
            }
            "solver.delta0" => s.delta0 = parse_f64(key, value)?,
            "solver.delta_tol" => s.delta_tol = parse_f64(key, value)?,
            "solver.eta1" => s.eta1 = parse_f64(key, value)?,
            "solver.eta2" => s.eta2 = parse_f64(key, value)?,
            "solver.gamma0" => s.gamma0 = parse_f64(key, value)?,
            "solver.gamma1" => s.gamma1 = parse_f64(key, value)?,
            "solver.gamma2" => s.gamma2 = parse_f64(key, value)?,
            "solver.expand_factor" => s.expand_factor = parse_f64(key, value)?,
            "solver.sigma" => s.sigma = parse_f64(key, value)?,
            "solver.influence" => {
                s.influence = match value {
                    "gaussian" => InfluenceKind::Gaussian,
                    "sharing" => InfluenceKind::Sharing,
                    _ => {
                        return Err(CliError::Invalid(format!(
                            "{key}: expected gaussian or sharing, got `{value}`"
                        )))
                    }
                }
            }
            "solver.sharing_alpha" => {
                s.sharing_alpha = value.parse::<u32>().map_err(|_| {
                    CliError::Invalid(format!("{key}: expected a positive integer, got `{value}`"))
                })?
            }
            "solver.normalize_objectives" => s.normalize_objectives = parse_bool(key, value)?,
            "solver.eval_budget" => s.eval_budget = parse_usize(key, value)?,
            "solver.max_iterations" => s.max_iterations = parse_usize(key, value)?,
            "solver.seed" => {
                s.seed = value.parse::<u64>().map_err(|_| {
                    CliError::Invalid(format!("{key}: expected a nonnegative integer, got `{value}`"))
                })?
            }
            "solver.rho" => {
                s.rho = match value {
                    "min" => RhoConvention::Min,
                    "max" => RhoConvention::Max,
                    _ => {
                        return Err(CliError::Invalid(format!(
                            "{key}: expected min or max, got `{value}`"
                        )))
                    }
                }
            }
            "metrics.gd" => self.metrics.gd = parse_bool(key, value)?,
            "metrics.hv" => self.metrics.hv = parse_bool(key, value)?,
            "metrics.front" => self.metrics.front_path = Some(PathBuf::from(value)),
            "metrics.hv_ref" => self.metrics.hv_ref = Some(parse_vector(key, value)?),
            _ => return Err(CliError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    fn finish(self) -> Result<RunManifest, CliError> {
        let has_evaluator = self.evaluator_cmd.is_some()
            || self.evaluator_n.is_some()
            || self.evaluator_p.is_some()
            || self.evaluator_lower.is_some()
            || self.evaluator_upper.is_some();
        let problem = match (self.problem, has_evaluator) {
            (Some(_), true) => {
                return Err(CliError::Invalid(
                    "problem and evaluator.* keys are mutually exclusive".to_string(),
                ))
            }
            (None, false) => {
                return Err(CliError::Invalid(
                    "manifest must set either problem or evaluator.cmd".to_string(),
                ))
            }
            (Some(name), false) => {
                if problems::by_name(&name).is_none() {
                    return Err(CliError::Invalid(format!(
                        "unknown problem `{name}`; available: {}",
                        problems::names().join(", ")
                    )));
                }
                ProblemSource::Registry(name)
            }
            (None, true) => {
                let cmd = self
                    .evaluator_cmd
                    .ok_or_else(|| CliError::Invalid("evaluator.cmd is required".to_string()))?;
                let n = self
                    .evaluator_n
                    .ok_or_else(|| CliError::Invalid("evaluator.n is required".to_string()))?;
                let p = self
                    .evaluator_p
                    .ok_or_else(|| CliError::Invalid("evaluator.p is required".to_string()))?;
                let lower = self
                    .evaluator_lower
                    .ok_or_else(|| CliError::Invalid("evaluator.lower is required".to_string()))?;
                let upper = self
                    .evaluator_upper
                    .ok_or_else(|| CliError::Invalid("evaluator.upper is required".to_string()))?;
                if n == 0 || p == 0 {
                    return Err(CliError::Invalid(
                        "evaluator.n and evaluator.p must be positive".to_string(),
                    ));
                }
                if lower.len() != n || upper.len() != n {
                    return Err(CliError::Invalid(format!(
                        "evaluator.lower and evaluator.upper must each have {n} entries"
                    )));
                }
                // Validates lower < upper componentwise.
                BoxBounds::new(lower.clone(), upper.clone())
                    .map_err(|e| CliError::Invalid(format!("evaluator box: {e}")))?;
                ProblemSource::External {
                    cmd,
                    n,
                    p,
                    lower,
                    upper,
                }
            }
        };

        let manifest = RunManifest {
            problem,
            solver: self.solver,
            metrics: self.metrics,
        };
        manifest.solver.validate().map_err(|e| match e {
            DriverError::InvalidConfig(msg) => CliError::Invalid(msg),
            other => CliError::Driver(other),
        })?;

        let (n, bounds) = match &manifest.problem {
            ProblemSource::Registry(name) => {
                let spec = problems::by_name(name).expect("name validated above");
                (spec.decision_dim(), spec.bounds().clone())
            }
            ProblemSource::External {
                n, lower, upper, ..
            } => (
                *n,
                BoxBounds::new(lower.clone(), upper.clone()).expect("box validated above"),
            ),
        };
        let q = quadratic_point_count(n);
        if manifest.solver.eval_budget < q {
            return Err(CliError::Invalid(format!(
                "solver.eval_budget must be at least {q} so one model can be fit, got {}",
                manifest.solver.eval_budget
            )));
        }
        if let Some(x0) = &manifest.solver.x0 {
            if x0.len() != n {
                return Err(CliError::Invalid(format!(
                    "solver.x0 has {} coordinates but the problem expects {n}",
                    x0.len()
                )));
            }
            if !bounds.contains(x0.as_slice()) {
                return Err(CliError::Invalid(
                    "solver.x0 lies outside the problem box".to_string(),
                ));
            }
        }
        if let Some(path) = &manifest.metrics.front_path {
            if !path.exists() {
                return Err(CliError::Invalid(format!(
                    "metrics.front: no such file {}",
                    path.display()
                )));
            }
        }
        Ok(manifest)
    }
}

/// Parses a flat key-value manifest: one `section.key = value` per line,
/// `#` comments, blank lines ignored. Unknown or duplicate keys and any
/// constraint violation are errors naming the offending field.
pub fn parse_manifest(path: &Path) -> Result<RunManifest, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_manifest_str(&text)
}

/// Same as [`parse_manifest`] on in-memory text.
pub fn parse_manifest_str(text: &str) -> Result<RunManifest, CliError> {
    let mut builder = ManifestBuilder::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(CliError::Manifest {
            line: idx + 1,
            message: "expected `key = value`".to_string(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(CliError::Manifest {
                line: idx + 1,
                message: "expected `key = value`".to_string(),
            });
        }
        builder.apply(key, value).map_err(|e| match e {
            CliError::UnknownKey(k) => CliError::UnknownKey(k),
            CliError::Invalid(msg) => CliError::Manifest {
                line: idx + 1,
                message: msg,
            },
            other => other,
        })?;
    }
    builder.finish()
}

/// A black-box objective evaluated by a persistent child process.
///
/// Wire protocol, one evaluation per exchange: the parent writes a single
/// line `c1 c2 … cn` (space-separated decimals) to the child's stdin and
/// reads a single line `f1 f2 … fp` from its stdout. The child stays alive
/// across calls and is killed on drop. Any malformed reply or early exit
/// fails the evaluation with context.
pub struct ExternalEvaluator {
    cmd: String,
    n: usize,
    p: usize,
    bounds: BoxBounds,
    child: Mutex<EvaluatorChild>,
}

struct EvaluatorChild {
    process: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl ExternalEvaluator {
    /// Spawns `cmd` through `sh -c` with piped stdin/stdout.
    pub fn spawn(cmd: &str, n: usize, p: usize, bounds: BoxBounds) -> Result<Self, CliError> {
        let mut process = Command::new("sh")
            .arg("-c")
            .arg(cmd)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| CliError::Evaluator(format!("cannot spawn `{cmd}`: {e}")))?;
        let stdin = process
            .stdin
            .take()
            .ok_or_else(|| CliError::Evaluator("child stdin unavailable".to_string()))?;
        let stdout = BufReader::new(
            process
                .stdout
                .take()
                .ok_or_else(|| CliError::Evaluator("child stdout unavailable".to_string()))?,
        );
        Ok(Self {
            cmd: cmd.to_string(),
            n,
            p,
            bounds,
            child: Mutex::new(EvaluatorChild {
                process,
                stdin,
                stdout,
            }),
        })
    }

    fn exchange(&self, x: &[f64]) -> Result<Vec<f64>, String> {
        let mut child = self
            .child
            .lock()
            .map_err(|_| "evaluator state poisoned by an earlier panic".to_string())?;
        let line = x
            .iter()
            .map(|c| format!("{c}"))
            .collect::<Vec<_>>()
            .join(" ");
        child
            .stdin
            .write_all(line.as_bytes())
            .and_then(|_| child.stdin.write_all(b"\n"))
            .and_then(|_| child.stdin.flush())
            .map_err(|e| format!("cannot write to `{}`: {e}", self.cmd))?;
        let mut reply = String::new();
        let read = child
            .stdout
            .read_line(&mut reply)
            .map_err(|e| format!("cannot read from `{}`: {e}", self.cmd))?;
        if read == 0 {
            return Err(format!("`{}` closed its output mid-run", self.cmd));
        }
        let values: Result<Vec<f64>, _> = reply.split_whitespace().map(str::parse::<f64>).collect();
        let values =
            values.map_err(|_| format!("`{}` replied with a non-numeric token: {}", self.cmd, reply.trim()))?;
        if values.len() != self.p {
            return Err(format!(
                "`{}` replied with {} values, expected {}",
                self.cmd,
                values.len(),
                self.p
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(format!("`{}` replied with a non-finite value", self.cmd));
        }
        Ok(values)
    }
}

impl Problem for ExternalEvaluator {
    fn decision_dim(&self) -> usize {
        self.n
    }

    fn objective_dim(&self) -> usize {
        self.p
    }

    fn bounds(&self) -> &BoxBounds {
        &self.bounds
    }

    fn evaluate(&self, x: &DecisionVector) -> Result<ObjectiveVector, EvalError> {
        if x.len() != self.n {
            return Err(EvalError::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        let values = self.exchange(x.as_slice()).map_err(EvalError::Failed)?;
        ObjectiveVector::new(values).map_err(|e| EvalError::Failed(e.to_string()))
    }
}

impl Drop for ExternalEvaluator {
    fn drop(&mut self) {
        if let Ok(child) = self.child.get_mut() {
            let _ = child.process.kill();
            let _ = child.process.wait();
        }
    }
}

fn make_problem(source: &ProblemSource) -> Result<Box<dyn Problem>, CliError> {
    match source {
        ProblemSource::Registry(name) => Ok(Box::new(
            problems::by_name(name).expect("manifest validated the name"),
        )),
        ProblemSource::External {
            cmd,
            n,
            p,
            lower,
            upper,
        } => {
            let bounds = BoxBounds::new(lower.clone(), upper.clone())
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            Ok(Box::new(ExternalEvaluator::spawn(cmd, *n, *p, bounds)?))
        }
    }
}

/// The quality numbers attached to a finished run; also the exact payload
/// the `metrics` subcommand prints, so `metrics.json` can be reproduced
/// from the emitted CSV files alone.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub gd: Option<f64>,
    pub hv: Option<f64>,
    pub hv_standard_error: Option<f64>,
    pub hv_ref: Option<Vec<f64>>,
}

/// Reads the `f_1,…,f_p` columns of a CSV with a header row.
fn read_objective_csv(path: &Path) -> Result<Vec<ObjectiveVector>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Invalid(format!("{}: empty file", path.display())))?;
    let mut columns: Vec<(usize, usize)> = Vec::new();
    for (idx, name) in header.split(',').enumerate() {
        if let Some(suffix) = name.trim().strip_prefix("f_") {
            if let Ok(j) = suffix.parse::<usize>() {
                columns.push((j, idx));
            }
        }
    }
    columns.sort_unstable();
    if columns.is_empty() {
        return Err(CliError::Invalid(format!(
            "{}: header has no f_1,…,f_p columns",
            path.display()
        )));
    }
    let mut points = Vec::new();
    for (row_idx, row) in lines.enumerate() {
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        let mut f = Vec::with_capacity(columns.len());
        for (_, idx) in &columns {
            let field = fields.get(*idx).ok_or_else(|| {
                CliError::Invalid(format!("{}: row {} is too short", path.display(), row_idx + 2))
            })?;
            f.push(parse_f64("objective", field.trim()).map_err(|_| {
                CliError::Invalid(format!(
                    "{}: row {}: `{field}` is not a number",
                    path.display(),
                    row_idx + 2
                ))
            })?);
        }
        points.push(ObjectiveVector::new(f).map_err(|e| CliError::Invalid(e.to_string()))?);
    }
    if points.is_empty() {
        return Err(CliError::Invalid(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(points)
}

/// Computes GD and HV for `produced` from files and an explicit reference;
/// both the `metrics` subcommand and `metrics.json` go through here.
fn compute_metrics(
    front: Option<&Path>,
    produced: &Path,
    reference: Option<&[f64]>,
) -> Result<MetricsReport, CliError> {
    let produced_points = read_objective_csv(produced)?;
    let gd = match front {
        Some(path) => {
            let front_points = read_objective_csv(path)?;
            let sample = FrontSample::new(front_points)?;
            Some(metrics::gd(&produced_points, &sample)?)
        }
        None => None,
    };
    let (hv, hv_standard_error, hv_ref) = match reference {
        Some(r) => {
            let oref = ObjectiveVector::new(r.to_vec())
                .map_err(|e| CliError::Invalid(format!("hypervolume reference: {e}")))?;
            let estimate = metrics::hypervolume(&produced_points, &HvReference::new(oref))?;
            (Some(estimate.value), estimate.standard_error, Some(r.to_vec()))
        }
        None => (None, None, None),
    };
    Ok(MetricsReport {
        gd,
        hv,
        hv_standard_error,
        hv_ref,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// CSV with only the objective columns, for front samples.
fn objectives_to_csv(points: &[ObjectiveVector]) -> String {
    let p = points.first().map_or(0, |pt| pt.len());
    let mut out = (1..=p).map(|j| format!("f_{j}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for pt in points {
        let fields: Vec<String> = pt.as_slice().iter().map(|v| format!("{v}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Resolves the front sample for GD: an explicit CSV wins, then the
/// registry sampler when the problem has a known front.
fn resolve_front(manifest: &RunManifest) -> Result<Option<FrontSample>, CliError> {
    if !manifest.metrics.gd {
        return Ok(None);
    }
    if let Some(path) = &manifest.metrics.front_path {
        let points = read_objective_csv(path)?;
        return Ok(Some(FrontSample::new(points)?));
    }
    if let ProblemSource::Registry(name) = &manifest.problem {
        let spec = problems::by_name(name).expect("manifest validated the name");
        return match metrics::front_sampler(&spec) {
            Ok(sample) => Ok(Some(sample)),
            Err(MetricsError::UnsupportedFront { .. }) => Ok(None),
            Err(e) => Err(e.into()),
        };
    }
    Ok(None)
}

/// Runs one solve and writes all artifacts into `dir`.
///
/// Emits `archive.csv`, `iterations.jsonl`, `density_surface.csv` for the
/// final archive, `front_sample.csv` when GD was computed, and
/// `metrics.json` holding exactly what the `metrics` subcommand would
/// print for those files.
pub fn run_solve(manifest: &RunManifest, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let problem = make_problem(&manifest.problem)?;
    let front = resolve_front(manifest)?;

    let mut solver = Solver::new(problem.as_ref(), manifest.solver.clone())?;
    if let Some(sample) = &front {
        solver = solver.with_front(sample);
    }
    if let Some(r) = &manifest.metrics.hv_ref {
        solver = solver.with_hv_reference(r.clone());
    }
    let result = solver.run()?;
    log::info!(
        "run finished: {:?} after {} evaluations, archive holds {} points",
        result.termination,
        result.eval_count,
        result.archive.len()
    );

    write_file(&dir.join("archive.csv"), &result.archive.to_csv())?;

    let mut jsonl = String::new();
    for record in &result.records {
        jsonl.push_str(&serde_json::to_string(record)?);
        jsonl.push('\n');
    }
    write_file(&dir.join("iterations.jsonl"), &jsonl)?;

    let influence = manifest.solver.influence_function()?;
    let surface =
        geometry::density_surface(&result.archive, &influence, manifest.solver.normalize_objectives)
            .map_err(DriverError::from)?;
    write_file(&dir.join("density_surface.csv"), &surface.to_csv())?;

    let front_path = match &front {
        Some(sample) => {
            let path = dir.join("front_sample.csv");
            write_file(&path, &objectives_to_csv(sample.points()))?;
            Some(path)
        }
        None => None,
    };
    let hv_ref = if manifest.metrics.hv {
        manifest
            .metrics
            .hv_ref
            .clone()
            .or_else(|| result.hv_reference.clone())
    } else {
        None
    };
    let report = compute_metrics(
        front_path.as_deref(),
        &dir.join("archive.csv"),
        hv_ref.as_deref(),
    )?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_file(&dir.join("metrics.json"), &json)?;
    Ok(())
}

/// Runs `replicates` independent solves concurrently, one subdirectory and
/// seed offset per replicate.
pub fn run_replicates(
    manifest: &RunManifest,
    dir: &Path,
    replicates: usize,
) -> Result<(), CliError> {
    if replicates == 0 {
        return Err(CliError::Invalid("--replicates must be at least 1".to_string()));
    }
    if replicates == 1 {
        return run_solve(manifest, dir);
    }
    let results: Vec<Result<(), CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..replicates)
            .map(|i| {
                scope.spawn(move || {
                    let mut replicate = manifest.clone();
                    replicate.solver.seed = manifest.solver.seed.wrapping_add(i as u64);
                    run_solve(&replicate, &dir.join(format!("replicate_{i}")))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| match h.join() {
                Ok(r) => r,
                Err(_) => Err(CliError::Invalid("a replicate thread panicked".to_string())),
            })
            .collect()
    });
    let mut first_error = None;
    for (i, outcome) in results.into_iter().enumerate() {
        if let Err(e) = outcome {
            log::warn!("replicate {i} failed: {e}");
            first_error.get_or_insert(e);
        }
    }
    match first_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[derive(Parser)]
#[command(
    name = "motr",
    version,
    about = "Derivative-free multiobjective trust-region solver producing uniformly distributed Pareto front approximations"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandKind,
}

#[derive(Subcommand)]
enum CommandKind {
    /// Run the solver described by a manifest and write run artifacts.
    Solve(SolveArgs),
    /// Recompute quality metrics from emitted CSV files.
    Metrics(MetricsArgs),
    /// Inspect the built-in problem registry.
    Problems(ProblemsArgs),
    /// Evaluate a registered problem at one point, printing JSON.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Key-value run manifest, one `section.key = value` per line.
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory for archive.csv, iterations.jsonl,
    /// density_surface.csv, and metrics.json.
    #[arg(long)]
    out: PathBuf,
    /// Independent runs executed concurrently with seeds base+0..R-1,
    /// each writing to out/replicate_<i>.
    #[arg(long, default_value_t = 1)]
    replicates: usize,
}

#[derive(Args)]
struct MetricsArgs {
    /// CSV of true front points (f_ columns) for generational distance.
    #[arg(long)]
    front: Option<PathBuf>,
    /// Hypervolume reference point "r1,r2,…".
    #[arg(long = "ref")]
    reference: Option<String>,
    /// CSV of produced points (f_ columns), e.g. an emitted archive.csv.
    #[arg(long)]
    produced: PathBuf,
}

#[derive(Args)]
struct ProblemsArgs {
    #[command(subcommand)]
    action: ProblemsAction,
}

#[derive(Subcommand)]
enum ProblemsAction {
    /// Print one line per problem: name, dimensions, box, front support.
    List,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Registered problem name; see `problems list`.
    #[arg(long)]
    problem: String,
    /// Decision vector "c1,c2,…".
    #[arg(long)]
    x: String,
    /// For fonseca only: evaluate the degenerate variant whose two
    /// objectives coincide.
    #[arg(long)]
    literal: bool,
}

fn format_bounds(spec: &ProblemSpec) -> String {
    let lo: Vec<String> = spec.bounds().lower().iter().map(|v| format!("{v}")).collect();
    let hi: Vec<String> = spec.bounds().upper().iter().map(|v| format!("{v}")).collect();
    format!("[{}]..[{}]", lo.join(","), hi.join(","))
}

fn problems_list() {
    for spec in problems::registry() {
        println!(
            "{:<16} n={} p={} box={} front={}  {}",
            spec.name(),
            spec.decision_dim(),
            spec.objective_dim(),
            format_bounds(&spec),
            if spec.has_front() { "yes" } else { "no" },
            spec.summary()
        );
    }
}

fn run_evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let name = if args.literal {
        if args.problem != "fonseca" {
            return Err(CliError::Invalid(
                "--literal applies only to the fonseca problem".to_string(),
            ));
        }
        "fonseca_literal".to_string()
    } else {
        args.problem.clone()
    };
    let spec = problems::by_name(&name).ok_or_else(|| {
        CliError::Invalid(format!(
            "unknown problem `{name}`; available: {}",
            problems::names().join(", ")
        ))
    })?;
    let coords = parse_vector("--x", &args.x)?;
    if coords.len() != spec.decision_dim() {
        return Err(CliError::Invalid(format!(
            "--x has {} coordinates but {} expects {}",
            coords.len(),
            spec.name(),
            spec.decision_dim()
        )));
    }
    let x = DecisionVector::new(coords).map_err(|e| CliError::Invalid(e.to_string()))?;
    let f = spec
        .evaluate(&x)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    println!("{}", serde_json::to_string(f.as_slice())?);
    Ok(())
}

fn run_metrics(args: &MetricsArgs) -> Result<(), CliError> {
    let reference = match &args.reference {
        Some(text) => Some(parse_vector("--ref", text)?),
        None => None,
    };
    if args.front.is_none() && reference.is_none() {
        return Err(CliError::Invalid(
            "nothing to compute: pass --front for GD and/or --ref for hypervolume".to_string(),
        ));
    }
    let report = compute_metrics(args.front.as_deref(), &args.produced, reference.as_deref())?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

/// Maps MOTR_LOG (quiet | info | debug, default info) to a log filter.
fn init_logging() -> Result<(), CliError> {
    let level = match std::env::var("MOTR_LOG") {
        Err(_) => log::LevelFilter::Info,
        Ok(raw) => match raw.to_ascii_lowercase().as_str() {
            "quiet" => log::LevelFilter::Off,
            "info" => log::LevelFilter::Info,
            "debug" => log::LevelFilter::Debug,
            other => {
                return Err(CliError::Invalid(format!(
                    "MOTR_LOG must be quiet, info, or debug, got `{other}`"
                )))
            }
        },
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
    Ok(())
}

/// Full command-line entry point; returns the process exit code.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    let outcome = init_logging().and_then(|_| match &cli.command {
        CommandKind::Solve(args) => {
            let manifest = parse_manifest(&args.manifest)?;
            run_replicates(&manifest, &args.out, args.replicates)
        }
        CommandKind::Metrics(args) => run_metrics(args),
        CommandKind::Problems(args) => match args.action {
            ProblemsAction::List => {
                problems_list();
                Ok(())
            }
        },
        CommandKind::Evaluate(args) => run_evaluate(args),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
