//! Decision/objective vector types, Pareto dominance, the nondominated
//! archive, box bounds, and budgeted black-box evaluation with caching.

use std::collections::HashMap;

use thiserror::Error;

/// Errors raised by the core vector, archive, and bounds types.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("vector must have at least one coordinate")]
    Empty,
    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },
    #[error("entry radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("invalid bounds at index {index}: lower {lower} must be below upper {upper}")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },
}

/// Errors raised when evaluating a black-box problem through the cache.
#[derive(Debug, Error)]
pub enum EvalError {
    /// The evaluation budget is spent; solvers treat this as a graceful stop.
    #[error("evaluation budget exhausted")]
    BudgetExhausted,
    #[error("point has {actual} coordinates but the problem expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("evaluation failed: {0}")]
    Failed(String),
}

fn check_finite(coords: &[f64]) -> Result<(), CoreError> {
    if coords.is_empty() {
        return Err(CoreError::Empty);
    }
    for (index, c) in coords.iter().enumerate() {
        if !c.is_finite() {
            return Err(CoreError::NonFinite { index });
        }
    }
    Ok(())
}

/// A point in decision space. Coordinates are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionVector(Vec<f64>);

impl DecisionVector {
    pub fn new(coords: Vec<f64>) -> Result<Self, CoreError> {
        check_finite(&coords)?;
        Ok(Self(coords))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Bit-exact key; distinguishes coordinates that merely compare equal
    /// (such as 0.0 and -0.0) so cache lookups stay reproducible.
    pub fn bit_key(&self) -> Vec<u64> {
        self.0.iter().map(|c| c.to_bits()).collect()
    }

    pub fn bits_eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl std::ops::Index<usize> for DecisionVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A point in objective space. Coordinates are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self, CoreError> {
        check_finite(&values)?;
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Index<usize> for ObjectiveVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Outcome of comparing objective vector `a` against `b`.
///
/// `Dominates` means `a` is no worse everywhere and strictly better
/// somewhere. `Equal` and `Dominates` both imply weak dominance;
/// `WeaklyDominates` names the relation itself and is exposed through
/// [`Dominance::weakly_dominates`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    Dominates,
    WeaklyDominates,
    Equal,
    Incomparable,
}

impl Dominance {
    /// True when `a_i <= b_i` holds in every coordinate.
    pub fn weakly_dominates(self) -> bool {
        matches!(
            self,
            Dominance::Dominates | Dominance::WeaklyDominates | Dominance::Equal
        )
    }
}

/// Classifies the componentwise order of `a` against `b`.
///
/// Returns the strictest relation that applies: `Equal` when the vectors
/// coincide, `Dominates` when `a <= b` with at least one strict coordinate,
/// and `Incomparable` otherwise.
pub fn dominance(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<Dominance, CoreError> {
    if a.len() != b.len() {
        return Err(CoreError::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let mut all_le = true;
    let mut some_lt = false;
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        if x > y {
            all_le = false;
        }
        if x < y {
            some_lt = true;
        }
    }
    Ok(match (all_le, some_lt) {
        (true, true) => Dominance::Dominates,
        (true, false) => Dominance::Equal,
        (false, _) => Dominance::Incomparable,
    })
}

/// Axis-aligned box constraints for the decision space.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, CoreError> {
        check_finite(&lower)?;
        check_finite(&upper)?;
        if lower.len() != upper.len() {
            return Err(CoreError::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        for (index, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if l >= u {
                return Err(CoreError::InvalidBounds {
                    index,
                    lower: l,
                    upper: u,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&c, (&l, &u))| c >= l && c <= u)
    }

    /// Componentwise projection onto the box.
    pub fn clip(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&c, (&l, &u))| c.clamp(l, u))
            .collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| 0.5 * (l + u))
            .collect()
    }

    /// Distance from `x` to the nearest face, the largest radius at which a
    /// ball around `x` still fits inside the box.
    pub fn face_slack(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&c, (&l, &u))| (c - l).min(u - c))
            .fold(f64::INFINITY, f64::min)
    }
}

/// A black-box multiobjective problem over a box-constrained domain.
pub trait Problem {
    /// Number of decision variables.
    fn decision_dim(&self) -> usize;

    /// Number of objectives.
    fn objective_dim(&self) -> usize;

    fn bounds(&self) -> &BoxBounds;

    fn evaluate(&self, x: &DecisionVector) -> Result<ObjectiveVector, EvalError>;
}

/// One archive member: a decision vector, its objectives, and the trust
/// radius the solver currently associates with it.
#[derive(Debug, Clone)]
pub struct ArchiveEntry {
    pub x: DecisionVector,
    pub f: ObjectiveVector,
    pub radius: f64,
    pub birth_iteration: usize,
}

impl ArchiveEntry {
    pub fn new(
        x: DecisionVector,
        f: ObjectiveVector,
        radius: f64,
        birth_iteration: usize,
    ) -> Result<Self, CoreError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(CoreError::InvalidRadius(radius));
        }
        Ok(Self {
            x,
            f,
            radius,
            birth_iteration,
        })
    }
}

/// Result of offering a candidate to the archive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    Accepted,
    Rejected,
}

/// Set of mutually nondominated evaluated points.
///
/// Insertion keeps the invariant: a candidate dominated by (or equal to) an
/// existing entry is rejected, and an accepted candidate evicts every entry
/// it dominates. Entry order is insertion order of the surviving members.
#[derive(Debug, Clone, Default)]
pub struct Archive {
    entries: Vec<ArchiveEntry>,
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn entry(&self, index: usize) -> &ArchiveEntry {
        &self.entries[index]
    }

    pub(crate) fn entry_mut(&mut self, index: usize) -> &mut ArchiveEntry {
        &mut self.entries[index]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ArchiveEntry> {
        self.entries.iter()
    }

    /// Index of the entry whose decision vector is bit-identical to `x`.
    pub fn position_of(&self, x: &DecisionVector) -> Option<usize> {
        self.entries.iter().position(|e| e.x.bits_eq(x))
    }

    /// Offers `candidate` to the archive.
    ///
    /// Rejected when an existing entry dominates or equals it; otherwise it
    /// is accepted and all entries it dominates are removed.
    pub fn insert(&mut self, candidate: ArchiveEntry) -> Result<InsertOutcome, CoreError> {
        for entry in &self.entries {
            match dominance(&entry.f, &candidate.f)? {
                Dominance::Dominates | Dominance::Equal => return Ok(InsertOutcome::Rejected),
                _ => {}
            }
        }
        let mut keep = Vec::with_capacity(self.entries.len() + 1);
        for entry in self.entries.drain(..) {
            if dominance(&candidate.f, &entry.f)? != Dominance::Dominates {
                keep.push(entry);
            }
        }
        keep.push(candidate);
        self.entries = keep;
        Ok(InsertOutcome::Accepted)
    }

    /// Serializes the archive as CSV with header `x_1..x_n,f_1..f_p,delta`.
    pub fn to_csv(&self) -> String {
        let n = self.entries.first().map_or(0, |e| e.x.len());
        let p = self.entries.first().map_or(0, |e| e.f.len());
        let mut header = Vec::with_capacity(n + p + 1);
        for j in 1..=n {
            header.push(format!("x_{j}"));
        }
        for j in 1..=p {
            header.push(format!("f_{j}"));
        }
        header.push("delta".to_string());
        let mut out = header.join(",");
        out.push('\n');
        for entry in &self.entries {
            let fields: Vec<String> = entry
                .x
                .as_slice()
                .iter()
                .chain(entry.f.as_slice())
                .chain(std::iter::once(&entry.radius))
                .map(|v| format!("{v}"))
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// Exact-match memoization of black-box evaluations with a hard call budget.
///
/// Keys are bit patterns of the coordinates, so only bit-identical points
/// share an evaluation. `eval_count` never exceeds `budget`.
#[derive(Debug)]
pub struct EvalCache {
    map: HashMap<Vec<u64>, ObjectiveVector>,
    eval_count: usize,
    budget: usize,
}

impl EvalCache {
    pub fn new(budget: usize) -> Self {
        Self {
            map: HashMap::new(),
            eval_count: 0,
            budget,
        }
    }

    pub fn eval_count(&self) -> usize {
        self.eval_count
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn cached(&self, x: &DecisionVector) -> Option<&ObjectiveVector> {
        self.map.get(&x.bit_key())
    }

    /// Returns the objectives at `x`, evaluating the problem only on a cache
    /// miss. A miss when the budget is spent raises `BudgetExhausted`.
    pub fn evaluate(
        &mut self,
        problem: &dyn Problem,
        x: &DecisionVector,
    ) -> Result<ObjectiveVector, EvalError> {
        if x.len() != problem.decision_dim() {
            return Err(EvalError::DimensionMismatch {
                expected: problem.decision_dim(),
                actual: x.len(),
            });
        }
        let key = x.bit_key();
        if let Some(f) = self.map.get(&key) {
            return Ok(f.clone());
        }
        if self.eval_count >= self.budget {
            return Err(EvalError::BudgetExhausted);
        }
        let f = problem.evaluate(x)?;
        if f.len() != problem.objective_dim() {
            return Err(EvalError::DimensionMismatch {
                expected: problem.objective_dim(),
                actual: f.len(),
            });
        }
        self.eval_count += 1;
        self.map.insert(key, f.clone());
        Ok(f)
    }
}
