//! The main solver loop: density-guided reference selection, criticality
//! controlled model building, a scalarized trial step, reduction-ratio
//! radius scheduling, and nondominated archive updates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::core::{
    Archive, ArchiveEntry, CoreError, DecisionVector, EvalCache, EvalError, InsertOutcome,
    ObjectiveVector, Problem,
};
use crate::geometry::{self, DecreasingFunction, GeometryError};
use crate::metrics::{self, FrontSample, HvReference, MetricsError};
use crate::subsolvers::{self, SubsolverError, TrustRegion};
use crate::surrogate::{self, ModelVector, SurrogateError};

/// Shrink-loop iteration cap; prevents livelock at model-critical
/// references when the radius tolerance is zero.
const CRITICALITY_SHRINK_CAP: usize = 50;
/// `t` values this close to zero count as "no model descent".
const T_ZERO_TOL: f64 = 1e-12;
/// Relative tolerance under which a model decrease counts as zero.
const MODEL_DECREASE_TOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Surrogate(#[from] SurrogateError),
    #[error(transparent)]
    Subsolver(#[from] SubsolverError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Which aggregate of the per-objective reduction ratios drives the radius
/// schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RhoConvention {
    /// Worst objective governs; the conservative default.
    Min,
    /// Best objective governs.
    Max,
}

/// Influence function family for the density computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InfluenceKind {
    Gaussian,
    Sharing,
}

/// All tunable solver inputs with their defaults.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Initial point; defaults to the box center when absent.
    pub x0: Option<DecisionVector>,
    /// Initial trust radius attached to `x0`.
    pub delta0: f64,
    /// Radius tolerance for the criticality gate and global termination.
    pub delta_tol: f64,
    /// Success threshold on the reduction ratio.
    pub eta1: f64,
    /// Strong-success threshold on the reduction ratio.
    pub eta2: f64,
    /// Shrink factor of the criticality loop and of repeated reference
    /// selection.
    pub gamma0: f64,
    /// Radius shrink factor after unsuccessful iterations; must stay below
    /// one so retries strictly shrink.
    pub gamma1: f64,
    /// Upper end of the shrink interval; kept for interval validation.
    pub gamma2: f64,
    /// Radius growth factor after very successful iterations, capped at
    /// ten times `delta0`.
    pub expand_factor: f64,
    /// Influence length scale of the density function.
    pub sigma: f64,
    /// Influence family.
    pub influence: InfluenceKind,
    /// Exponent of the sharing influence function.
    pub sharing_alpha: u32,
    /// Normalize objectives to the unit cube before density projection.
    pub normalize_objectives: bool,
    /// Hard cap on true objective evaluations.
    pub eval_budget: usize,
    /// Hard cap on iterations.
    pub max_iterations: usize,
    /// Seed for the scalarization multi-starts; everything else is
    /// deterministic.
    pub seed: u64,
    /// Reduction-ratio aggregation.
    pub rho: RhoConvention,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            x0: None,
            delta0: 1.0,
            delta_tol: 0.05,
            eta1: 0.5,
            eta2: 0.75,
            gamma0: 0.7,
            gamma1: 0.5,
            gamma2: 1.0,
            expand_factor: 2.0,
            sigma: 0.05,
            influence: InfluenceKind::Gaussian,
            sharing_alpha: 1,
            normalize_objectives: false,
            eval_budget: 2000,
            max_iterations: 500,
            seed: 0,
            rho: RhoConvention::Min,
        }
    }
}

impl SolverConfig {
    pub(crate) fn validate(&self) -> Result<(), DriverError> {
        let fail = |msg: String| Err(DriverError::InvalidConfig(msg));
        if !(self.delta0.is_finite() && self.delta0 > 0.0) {
            return fail(format!("delta0 must be positive, got {}", self.delta0));
        }
        if !(self.delta_tol.is_finite() && self.delta_tol >= 0.0) {
            return fail(format!(
                "delta_tol must be nonnegative, got {}",
                self.delta_tol
            ));
        }
        if !(0.0 < self.eta1 && self.eta1 <= self.eta2 && self.eta2 < 1.0) {
            return fail(format!(
                "thresholds must satisfy 0 < eta1 <= eta2 < 1, got eta1={}, eta2={}",
                self.eta1, self.eta2
            ));
        }
        if !(self.gamma0 > 0.0 && self.gamma0 < 1.0) {
            return fail(format!(
                "gamma0 must lie strictly inside (0, 1), got {}",
                self.gamma0
            ));
        }
        if !(0.0 < self.gamma1 && self.gamma1 <= self.gamma2 && self.gamma2 <= 1.0) {
            return fail(format!(
                "shrink interval must satisfy 0 < gamma1 <= gamma2 <= 1, got gamma1={}, gamma2={}",
                self.gamma1, self.gamma2
            ));
        }
        if self.gamma1 >= 1.0 {
            return fail(format!(
                "gamma1 must stay below 1 so retries strictly shrink, got {}",
                self.gamma1
            ));
        }
        if !(self.expand_factor.is_finite() && self.expand_factor > 1.0) {
            return fail(format!(
                "expand_factor must exceed 1, got {}",
                self.expand_factor
            ));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return fail(format!("sigma must be positive, got {}", self.sigma));
        }
        if self.influence == InfluenceKind::Sharing && self.sharing_alpha == 0 {
            return fail("sharing_alpha must be at least 1".to_string());
        }
        if self.eval_budget == 0 {
            return fail("eval_budget must be positive".to_string());
        }
        if self.max_iterations == 0 {
            return fail("max_iterations must be positive".to_string());
        }
        Ok(())
    }

    pub(crate) fn influence_function(&self) -> Result<DecreasingFunction, DriverError> {
        Ok(match self.influence {
            InfluenceKind::Gaussian => DecreasingFunction::gaussian(self.sigma)?,
            InfluenceKind::Sharing => {
                DecreasingFunction::sharing(self.sigma, self.sharing_alpha)?
            }
        })
    }
}

/// Per-iteration observability record, one JSON line each in run logs.
///
/// `ref_index` is the reference's archive position at selection time and is
/// kept through retries of the same reference. `accepted` is the outcome of
/// the iteration test: the ratio cleared `eta1` and the archive gained a
/// point. `gd` and `hv` stay `null` unless a front sample or hypervolume
/// reference is available.
#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    pub ref_index: usize,
    pub delta: f64,
    pub inner_shrinks: usize,
    pub t_plus: f64,
    pub rho: f64,
    pub accepted: bool,
    pub archive_size: usize,
    pub evals: usize,
    pub gd: Option<f64>,
    pub hv: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TerminationReason {
    /// The evaluation budget ran out; a graceful stop, not a failure.
    BudgetExhausted,
    /// The iteration cap was reached.
    MaxIterations,
    /// Every archive radius and the latest model criticality dropped below
    /// `delta_tol`.
    AllRadiiBelowTol,
}

/// Everything a finished run exposes.
#[derive(Debug)]
pub struct RunResult {
    pub archive: Archive,
    pub records: Vec<IterationRecord>,
    pub termination: TerminationReason,
    /// Hypervolume reference used for per-iteration logging, when any.
    pub hv_reference: Option<Vec<f64>>,
    /// True evaluations actually spent.
    pub eval_count: usize,
}

/// Solver handle binding a problem to a configuration, plus optional
/// metric inputs for per-iteration logging.
pub struct Solver<'a> {
    problem: &'a dyn Problem,
    config: SolverConfig,
    front: Option<&'a FrontSample>,
    hv_reference: Option<Vec<f64>>,
}

impl<'a> Solver<'a> {
    pub fn new(problem: &'a dyn Problem, config: SolverConfig) -> Result<Self, DriverError> {
        config.validate()?;
        if let Some(x0) = &config.x0 {
            if x0.len() != problem.decision_dim() {
                return Err(DriverError::InvalidConfig(format!(
                    "x0 has {} coordinates but the problem expects {}",
                    x0.len(),
                    problem.decision_dim()
                )));
            }
            if !problem.bounds().contains(x0.as_slice()) {
                return Err(DriverError::InvalidConfig(
                    "x0 lies outside the problem box".to_string(),
                ));
            }
        }
        Ok(Self {
            problem,
            config,
            front: None,
            hv_reference: None,
        })
    }

    /// Enables per-iteration generational distance against this front.
    pub fn with_front(mut self, front: &'a FrontSample) -> Self {
        self.front = Some(front);
        self
    }

    /// Fixes the hypervolume reference instead of deriving it from the
    /// first iteration's evaluations.
    pub fn with_hv_reference(mut self, reference: Vec<f64>) -> Self {
        self.hv_reference = Some(reference);
        self
    }

    /// Runs the solver to one of the three termination reasons.
    pub fn run(self) -> Result<RunResult, DriverError> {
        Run::start(self)?.drive()
    }
}

/// Mutable state of one run.
struct Run<'a> {
    problem: &'a dyn Problem,
    config: SolverConfig,
    front: Option<&'a FrontSample>,
    influence: DecreasingFunction,
    cache: EvalCache,
    rng: ChaCha8Rng,
    archive: Archive,
    records: Vec<IterationRecord>,
    hv_reference: Option<Vec<f64>>,
    /// Componentwise extremes over all true evaluations, for the automatic
    /// hypervolume reference.
    seen_min: Vec<f64>,
    seen_max: Vec<f64>,
}

/// Outcome of a budget-checked evaluation: a value, or the signal that the
/// budget is spent and the run must stop gracefully.
enum EvalOutcome {
    Value(ObjectiveVector),
    OutOfBudget,
}

impl<'a> Run<'a> {
    fn start(solver: Solver<'a>) -> Result<Self, DriverError> {
        let problem = solver.problem;
        let config = solver.config;
        let influence = config.influence_function()?;
        let x0 = match &config.x0 {
            Some(x) => x.clone(),
            None => DecisionVector::new(problem.bounds().center())?,
        };
        let p = problem.objective_dim();
        let mut run = Self {
            problem,
            influence,
            cache: EvalCache::new(config.eval_budget),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            archive: Archive::new(),
            records: Vec::new(),
            hv_reference: solver.hv_reference,
            front: solver.front,
            seen_min: vec![f64::INFINITY; p],
            seen_max: vec![f64::NEG_INFINITY; p],
            config,
        };
        let f0 = match run.evaluate(&x0)? {
            EvalOutcome::Value(f) => f,
            EvalOutcome::OutOfBudget => {
                return Err(DriverError::InvalidConfig(
                    "evaluation budget cannot cover the initial point".to_string(),
                ))
            }
        };
        run.archive
            .insert(ArchiveEntry::new(x0, f0, run.config.delta0, 0)?)?;
        Ok(run)
    }

    /// Budget-checked, cached true evaluation that tracks objective
    /// extremes. Evaluator failures are hard errors; budget exhaustion is a
    /// graceful signal.
    fn evaluate(&mut self, x: &DecisionVector) -> Result<EvalOutcome, DriverError> {
        match self.cache.evaluate(self.problem, x) {
            Ok(f) => {
                for ((mn, mx), v) in self
                    .seen_min
                    .iter_mut()
                    .zip(self.seen_max.iter_mut())
                    .zip(f.as_slice())
                {
                    *mn = mn.min(*v);
                    *mx = mx.max(*v);
                }
                Ok(EvalOutcome::Value(f))
            }
            Err(EvalError::BudgetExhausted) => Ok(EvalOutcome::OutOfBudget),
            Err(e) => Err(DriverError::Evaluation(e.to_string())),
        }
    }

    fn drive(mut self) -> Result<RunResult, DriverError> {
        let termination = self.iterate()?;
        Ok(RunResult {
            archive: self.archive,
            records: self.records,
            termination,
            hv_reference: self.hv_reference,
            eval_count: self.cache.eval_count(),
        })
    }

    fn iterate(&mut self) -> Result<TerminationReason, DriverError> {
        let cfg = self.config.clone();
        let mut k = 1usize;
        let mut prev_reference: Option<DecisionVector> = None;
        loop {
            if k > cfg.max_iterations {
                return Ok(TerminationReason::MaxIterations);
            }
            // Step 1: density-guided reference selection among entries
            // whose radius is still at or above the tolerance; entries
            // below it are locally converged and retrying them can only
            // shrink their radius further without changing the archive.
            // When none are left the whole front is resolved to tolerance.
            let live: Vec<usize> = (0..self.archive.len())
                .filter(|&i| self.archive.entry(i).radius >= cfg.delta_tol)
                .collect();
            if live.is_empty() {
                return Ok(TerminationReason::AllRadiiBelowTol);
            }
            let ref_index = geometry::select_reference_among(
                &self.archive,
                &self.influence,
                cfg.normalize_objectives,
                &live,
            )?;
            let same_as_previous = prev_reference
                .as_ref()
                .is_some_and(|p| self.archive.entry(ref_index).x.bits_eq(p));
            if same_as_previous {
                let entry = self.archive.entry_mut(ref_index);
                entry.radius *= cfg.gamma0;
            }
            let reference = self.archive.entry(ref_index).x.clone();
            let f_reference = self.archive.entry(ref_index).f.clone();
            prev_reference = Some(reference.clone());
            let mut delta_tilde = self.archive.entry(ref_index).radius;
            // Trial points sampled for this reference, in sampling order;
            // kept across retries of the same reference.
            let mut pool: Vec<DecisionVector> = Vec::new();

            // Retry loop: re-enters the model-building step with the same
            // reference and a shrunken radius until the iteration succeeds
            // or the run terminates.
            loop {
                // Step 2: build models, shrinking the radius until it falls
                // under the criticality estimate (or the tolerance).
                let mut shrinks = 0usize;
                let built = loop {
                    let region = TrustRegion::fitted(
                        reference.clone(),
                        delta_tilde,
                        self.problem.bounds().clone(),
                    )?;
                    delta_tilde = region.radius();
                    let sample = surrogate::generate_sample_set(
                        region.center(),
                        region.radius(),
                        self.problem.bounds(),
                    )?;
                    let mut evals = Vec::with_capacity(sample.len());
                    let mut interrupted = false;
                    for point in sample.points() {
                        match self.evaluate(point)? {
                            EvalOutcome::Value(f) => {
                                evals.push(f);
                                if !point.bits_eq(&reference) {
                                    pool.push(point.clone());
                                }
                            }
                            EvalOutcome::OutOfBudget => {
                                interrupted = true;
                                break;
                            }
                        }
                    }
                    if interrupted {
                        return Ok(TerminationReason::BudgetExhausted);
                    }
                    let models = surrogate::fit_models(&sample, &evals)?;
                    let omega_m = subsolvers::omega(&models.gradients_at_center()).omega;
                    if delta_tilde <= cfg.delta_tol.max(omega_m) {
                        break (region, models, omega_m);
                    }
                    shrinks += 1;
                    if shrinks >= CRITICALITY_SHRINK_CAP {
                        log::warn!(
                            "criticality loop hit the {CRITICALITY_SHRINK_CAP}-shrink cap at \
                             iteration {k}; proceeding with the current models"
                        );
                        break (region, models, omega_m);
                    }
                    delta_tilde *= cfg.gamma0;
                };
                let (region, models, omega_m) = built;

                // Steps 3 and 4: ideal point and scalarized trial point.
                let scalarized = subsolvers::pascoletti_serafini(
                    &models,
                    &region,
                    f_reference.as_slice(),
                    &mut self.rng,
                );
                let x_plus = scalarized.x_plus.clone();
                let f_plus = match self.evaluate(&x_plus)? {
                    EvalOutcome::Value(f) => f,
                    EvalOutcome::OutOfBudget => {
                        return Ok(TerminationReason::BudgetExhausted)
                    }
                };

                // Step 5: reduction ratio of true versus model decrease.
                let rho = reduction_ratio(
                    &models,
                    f_reference.as_slice(),
                    f_plus.as_slice(),
                    x_plus.as_slice(),
                    scalarized.t,
                    cfg.rho,
                );

                // Step 6: radius bucket for this iteration's new points.
                let new_radius = if rho < cfg.eta1 {
                    cfg.gamma1 * delta_tilde
                } else if rho < cfg.eta2 {
                    delta_tilde
                } else {
                    (cfg.expand_factor * delta_tilde).min(10.0 * cfg.delta0)
                };

                // Step 7: offer sampled points (in sampling order) and the
                // trial point to the archive; holdovers keep their radii.
                let mut archive_grew = false;
                for point in pool.iter().chain(std::iter::once(&x_plus)) {
                    let f = self
                        .cache
                        .cached(point)
                        .expect("pooled points were evaluated")
                        .clone();
                    let outcome = self.archive.insert(ArchiveEntry::new(
                        point.clone(),
                        f,
                        new_radius,
                        k,
                    )?)?;
                    if outcome == InsertOutcome::Accepted {
                        archive_grew = true;
                    }
                }

                // Step 8: iteration test.
                let accepted = rho >= cfg.eta1 && archive_grew;
                let mut reference_retryable = false;
                if !accepted {
                    // Retry: strictly shrink the reference's radius. The
                    // retry chain ends when the reference converged below
                    // the tolerance or was dominated out of the archive;
                    // selection then starts over.
                    delta_tilde *= cfg.gamma1;
                    if let Some(idx) = self.archive.position_of(&reference) {
                        self.archive.entry_mut(idx).radius = delta_tilde;
                        reference_retryable = delta_tilde >= cfg.delta_tol;
                    }
                }

                self.push_record(IterationRecord {
                    k,
                    ref_index,
                    delta: region.radius(),
                    inner_shrinks: shrinks,
                    t_plus: scalarized.t,
                    rho,
                    accepted,
                    archive_size: self.archive.len(),
                    evals: self.cache.eval_count(),
                    gd: None,
                    hv: None,
                })?;

                let all_radii_small = self
                    .archive
                    .iter()
                    .all(|entry| entry.radius < cfg.delta_tol);
                if all_radii_small && omega_m < cfg.delta_tol {
                    return Ok(TerminationReason::AllRadiiBelowTol);
                }
                k += 1;
                if k > cfg.max_iterations {
                    return Ok(TerminationReason::MaxIterations);
                }
                if accepted || !reference_retryable {
                    break;
                }
            }
        }
    }

    /// Fills the metric fields and appends the record. The hypervolume
    /// reference is fixed after the first iteration from the evaluation
    /// extremes plus a ten percent margin.
    fn push_record(&mut self, mut record: IterationRecord) -> Result<(), DriverError> {
        if self.hv_reference.is_none() {
            let reference: Vec<f64> = self
                .seen_min
                .iter()
                .zip(&self.seen_max)
                .map(|(&mn, &mx)| {
                    let span = mx - mn;
                    if span > 1e-12 {
                        mx + 0.1 * span
                    } else {
                        mx + 0.1 * (1.0 + mx.abs())
                    }
                })
                .collect();
            self.hv_reference = Some(reference);
        }
        if let Some(front) = self.front {
            let produced: Vec<ObjectiveVector> =
                self.archive.iter().map(|e| e.f.clone()).collect();
            record.gd = Some(metrics::gd(&produced, front)?);
        }
        if let Some(reference) = &self.hv_reference {
            let r = HvReference::new(ObjectiveVector::new(reference.clone())?);
            let mut inside: Vec<ObjectiveVector> = Vec::with_capacity(self.archive.len());
            let mut dropped = 0usize;
            for entry in self.archive.iter() {
                if entry
                    .f
                    .as_slice()
                    .iter()
                    .zip(reference)
                    .all(|(f, rr)| f <= rr)
                {
                    inside.push(entry.f.clone());
                } else {
                    dropped += 1;
                }
            }
            if dropped > 0 {
                log::warn!(
                    "iteration {}: {dropped} archive point(s) fall outside the hypervolume \
                     reference and were skipped",
                    record.k
                );
            }
            record.hv = Some(metrics::hypervolume(&inside, &r)?.value);
        }
        self.records.push(record);
        Ok(())
    }
}

/// Reduction ratio of true to model decrease.
///
/// Zero when the scalarization level vanishes or any model decrease is
/// (numerically) zero; otherwise the configured aggregate of the
/// per-objective ratios.
fn reduction_ratio(
    models: &ModelVector,
    f_reference: &[f64],
    f_plus: &[f64],
    x_plus: &[f64],
    t: f64,
    convention: RhoConvention,
) -> f64 {
    if t >= -T_ZERO_TOL {
        return 0.0;
    }
    let mut ratios = Vec::with_capacity(models.len());
    for (i, model) in models.models().iter().enumerate() {
        let m_ref = model.constant();
        let m_plus = model.value_at(x_plus);
        let scale = 1.0f64.max(m_ref.abs()).max(m_plus.abs());
        if (m_ref - m_plus).abs() <= MODEL_DECREASE_TOL * scale {
            return 0.0;
        }
        ratios.push((f_reference[i] - f_plus[i]) / (m_ref - m_plus));
    }
    match convention {
        RhoConvention::Min => ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        RhoConvention::Max => ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    }
}
