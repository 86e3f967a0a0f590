//! Benchmark problems: box-bounded multiobjective test functions with
//! known front parameterizations where the front has a closed form.
//!
//! Problems are looked up by name through [`by_name`]; each entry carries
//! its box, an evaluator that is total on the box, and optionally a
//! deterministic sampler of the true Pareto front.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::core::{
    dominance, BoxBounds, DecisionVector, Dominance, EvalError, ObjectiveVector, Problem,
};

/// A named benchmark problem.
///
/// `strict_box` problems reject out-of-box points with an error; the others
/// extend their formula to all of space and leave feasibility to the
/// caller.
#[derive(Clone)]
pub struct ProblemSpec {
    name: &'static str,
    summary: &'static str,
    objective_dim: usize,
    bounds: BoxBounds,
    strict_box: bool,
    eval: fn(&[f64]) -> Vec<f64>,
    front: Option<fn(usize) -> Vec<ObjectiveVector>>,
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn summary(&self) -> &'static str {
        self.summary
    }

    pub fn has_front(&self) -> bool {
        self.front.is_some()
    }

    /// Deterministic sample of the true Pareto front with at least
    /// `min_points` points, or `None` when no closed form is known.
    pub fn front_points(&self, min_points: usize) -> Option<Vec<ObjectiveVector>> {
        self.front.map(|f| f(min_points))
    }
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("n", &self.bounds.dim())
            .field("p", &self.objective_dim)
            .finish()
    }
}

impl Problem for ProblemSpec {
    fn decision_dim(&self) -> usize {
        self.bounds.dim()
    }

    fn objective_dim(&self) -> usize {
        self.objective_dim
    }

    fn bounds(&self) -> &BoxBounds {
        &self.bounds
    }

    fn evaluate(&self, x: &DecisionVector) -> Result<ObjectiveVector, EvalError> {
        if x.len() != self.bounds.dim() {
            return Err(EvalError::DimensionMismatch {
                expected: self.bounds.dim(),
                actual: x.len(),
            });
        }
        if self.strict_box && !self.bounds.contains(x.as_slice()) {
            return Err(EvalError::Failed(format!(
                "point lies outside the box of problem '{}'",
                self.name
            )));
        }
        ObjectiveVector::new((self.eval)(x.as_slice()))
            .map_err(|e| EvalError::Failed(e.to_string()))
    }
}

/// All registered problems, in listing order.
pub fn registry() -> Vec<ProblemSpec> {
    vec![
        ProblemSpec {
            name: "fonseca",
            summary: "biobjective pair of mirrored exponential bowls",
            objective_dim: 2,
            bounds: BoxBounds::new(vec![-2.0; 4], vec![2.0; 4]).expect("static box"),
            strict_box: false,
            eval: fonseca,
            front: Some(fonseca_front),
        },
        ProblemSpec {
            name: "fonseca_literal",
            summary: "degenerate variant with both objectives identical",
            objective_dim: 2,
            bounds: BoxBounds::new(vec![-2.0; 4], vec![2.0; 4]).expect("static box"),
            strict_box: false,
            eval: fonseca_literal,
            front: None,
        },
        ProblemSpec {
            name: "dtlz2",
            summary: "three objectives on the unit sphere octant",
            objective_dim: 3,
            bounds: BoxBounds::new(vec![0.0; 3], vec![1.0; 3]).expect("static box"),
            strict_box: true,
            eval: dtlz2,
            front: Some(dtlz2_front),
        },
        ProblemSpec {
            name: "comet",
            summary: "three objectives with a comet-shaped front",
            objective_dim: 3,
            bounds: BoxBounds::new(vec![1.0, -2.0, 0.0], vec![3.5, 2.0, 1.0])
                .expect("static box"),
            strict_box: true,
            eval: comet,
            front: None,
        },
        ProblemSpec {
            name: "dtlz7",
            summary: "three objectives with a disconnected front",
            objective_dim: 3,
            bounds: BoxBounds::new(vec![0.0; 3], vec![1.0; 3]).expect("static box"),
            strict_box: true,
            eval: dtlz7,
            front: Some(dtlz7_front),
        },
    ]
}

/// Looks a problem up by its registry name.
pub fn by_name(name: &str) -> Option<ProblemSpec> {
    registry().into_iter().find(|p| p.name == name)
}

/// Names of all registered problems, for error messages.
pub fn names() -> Vec<&'static str> {
    registry().iter().map(|p| p.name).collect()
}

fn fonseca(x: &[f64]) -> Vec<f64> {
    let s1: f64 = x.iter().map(|xi| (xi - 0.5) * (xi - 0.5)).sum();
    let s2: f64 = x.iter().map(|xi| (xi + 0.5) * (xi + 0.5)).sum();
    vec![1.0 - (-s1).exp(), 1.0 - (-s2).exp()]
}

fn fonseca_literal(x: &[f64]) -> Vec<f64> {
    let s1: f64 = x.iter().map(|xi| (xi - 0.5) * (xi - 0.5)).sum();
    let f = 1.0 - (-s1).exp();
    vec![f, f]
}

fn dtlz2(x: &[f64]) -> Vec<f64> {
    let g = (x[2] - 0.5) * (x[2] - 0.5);
    let a = FRAC_PI_2 * x[0];
    let b = FRAC_PI_2 * x[1];
    vec![
        (1.0 + g) * a.cos() * b.cos(),
        (1.0 + g) * a.cos() * b.sin(),
        (1.0 + g) * a.sin(),
    ]
}

fn comet(x: &[f64]) -> Vec<f64> {
    let t = 1.0 + x[2];
    let core = x[0] * x[0] * x[0] * x[1] * x[1] - 10.0 * x[0];
    vec![
        t * (core - 4.0 * x[1]),
        t * (core + 4.0 * x[1]),
        3.0 * t * x[0] * x[0],
    ]
}

fn dtlz7(x: &[f64]) -> Vec<f64> {
    let g = 1.0 + 4.5 * x[2];
    let scale = 1.0 + g;
    let sum: f64 = x[..2]
        .iter()
        .map(|xi| (xi / scale) * (1.0 + (3.0 * PI * xi).sin()))
        .sum();
    vec![x[0], x[1], scale * (3.0 - sum)]
}

/// Trade-off segment of the mirrored pair: the diagonal
/// `x_1 = ... = x_4 = s` for `s` between the two per-objective minimizers.
fn fonseca_front(min_points: usize) -> Vec<ObjectiveVector> {
    let count = min_points.max(1000);
    (0..count)
        .map(|i| {
            let s = -0.5 + (i as f64) / ((count - 1) as f64);
            let f1 = 1.0 - (-4.0 * (s - 0.5) * (s - 0.5)).exp();
            let f2 = 1.0 - (-4.0 * (s + 0.5) * (s + 0.5)).exp();
            ObjectiveVector::new(vec![f1, f2]).expect("finite front values")
        })
        .collect()
}

/// Unit-sphere octant reached when the distance term vanishes; grid over
/// the two angle variables, with coincident images deduplicated.
fn dtlz2_front(min_points: usize) -> Vec<ObjectiveVector> {
    let count = min_points.max(1000);
    let k = (count as f64).sqrt().ceil() as usize + 1;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let a = FRAC_PI_2 * (i as f64) / ((k - 1) as f64);
            let b = FRAC_PI_2 * (j as f64) / ((k - 1) as f64);
            let f = vec![a.cos() * b.cos(), a.cos() * b.sin(), a.sin()];
            let key: Vec<u64> = f.iter().map(|v| v.to_bits()).collect();
            if seen.insert(key) {
                out.push(ObjectiveVector::new(f).expect("finite front values"));
            }
        }
    }
    out
}

/// Image of the minimal-distance surface (`x_3 = 0`) over a fine grid of
/// the two free variables, filtered down to its nondominated subset; the
/// filter leaves the four disconnected front patches.
fn dtlz7_front(min_points: usize) -> Vec<ObjectiveVector> {
    let count = min_points.max(1000);
    let k = 120usize.max(((count * 5) as f64).sqrt().ceil() as usize);
    let mut points = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let y1 = (i as f64) / ((k - 1) as f64);
            let y2 = (j as f64) / ((k - 1) as f64);
            points.push(dtlz7(&[y1, y2, 0.0]));
        }
    }
    nondominated_filter(points)
}

/// Exact nondominated subset of a point cloud, with duplicate vectors
/// collapsed. Points are sorted lexicographically so any dominator of a
/// point precedes it, which lets a single forward pass compare each
/// candidate against the kept set only.
fn nondominated_filter(mut points: Vec<Vec<f64>>) -> Vec<ObjectiveVector> {
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite objective values"));
    points.dedup();
    let mut kept: Vec<ObjectiveVector> = Vec::new();
    'candidates: for f in points {
        let cand = ObjectiveVector::new(f).expect("finite front values");
        for k in &kept {
            match dominance(k, &cand).expect("matching dimensions") {
                Dominance::Dominates | Dominance::Equal => continue 'candidates,
                _ => {}
            }
        }
        kept.push(cand);
    }
    kept
}
