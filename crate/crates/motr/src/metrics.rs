//! Solution-set quality measures: generational distance against a sampled
//! true front, and hypervolume relative to a reference point (exact sweep
//! for two objectives, slicing for three, Monte Carlo beyond).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::core::{dominance, Dominance, ObjectiveVector};
use crate::problems::ProblemSpec;

/// Fixed stream for the Monte Carlo estimator, independent of solver seeds.
const MC_SEED: u64 = 0x00AB_CDEF;
/// Sample count for the Monte Carlo estimator.
const MC_SAMPLES: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("produced set must not be empty")]
    EmptyProducedSet,
    #[error("front sample must not be empty")]
    EmptyFront,
    #[error("front sample is not mutually nondominated: point {a} orders against point {b}")]
    FrontNotNondominated { a: String, b: String },
    #[error("point {point} does not weakly dominate the reference {reference}")]
    RefNotDominated { point: String, reference: String },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("problem '{0}' has no known front parameterization")]
    UnsupportedFront(String),
}

/// Discretized true Pareto front; construction checks the points are
/// nonempty, of one dimension, and mutually nondominated.
#[derive(Debug, Clone)]
pub struct FrontSample {
    points: Vec<ObjectiveVector>,
}

impl FrontSample {
    pub fn new(points: Vec<ObjectiveVector>) -> Result<Self, MetricsError> {
        if points.is_empty() {
            return Err(MetricsError::EmptyFront);
        }
        let p = points[0].len();
        for f in &points {
            if f.len() != p {
                return Err(MetricsError::DimensionMismatch {
                    expected: p,
                    actual: f.len(),
                });
            }
        }
        for (i, a) in points.iter().enumerate() {
            for b in points.iter().skip(i + 1) {
                let d = dominance(a, b).expect("dimensions checked above");
                if !matches!(d, Dominance::Incomparable) {
                    return Err(MetricsError::FrontNotNondominated {
                        a: format!("{:?}", a.as_slice()),
                        b: format!("{:?}", b.as_slice()),
                    });
                }
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[ObjectiveVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }
}

/// Samples a problem's known front into a validated [`FrontSample`] of at
/// least 1000 points.
pub fn front_sampler(problem: &ProblemSpec) -> Result<FrontSample, MetricsError> {
    let points = problem
        .front_points(1000)
        .ok_or_else(|| MetricsError::UnsupportedFront(problem.name().to_string()))?;
    FrontSample::new(points)
}

/// Generational distance: the square root of the summed squared distances
/// from each produced point to its nearest front sample, divided by the
/// number of produced points.
pub fn gd(produced: &[ObjectiveVector], front: &FrontSample) -> Result<f64, MetricsError> {
    if produced.is_empty() {
        return Err(MetricsError::EmptyProducedSet);
    }
    let p = front.dim();
    let mut sum = 0.0;
    for f in produced {
        if f.len() != p {
            return Err(MetricsError::DimensionMismatch {
                expected: p,
                actual: f.len(),
            });
        }
        let nearest = front
            .points()
            .iter()
            .map(|g| {
                f.as_slice()
                    .iter()
                    .zip(g.as_slice())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        sum += nearest;
    }
    Ok(sum.sqrt() / produced.len() as f64)
}

/// Reference point for hypervolume; every compared point must weakly
/// dominate it, which [`hypervolume`] enforces per call.
#[derive(Debug, Clone)]
pub struct HvReference {
    r: ObjectiveVector,
}

impl HvReference {
    pub fn new(r: ObjectiveVector) -> Self {
        Self { r }
    }

    pub fn as_slice(&self) -> &[f64] {
        self.r.as_slice()
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Hypervolume value; `standard_error` is populated only by the Monte
/// Carlo path used for four or more objectives.
#[derive(Debug, Clone, Copy)]
pub struct HvEstimate {
    pub value: f64,
    pub standard_error: Option<f64>,
}

/// Measure of the union of boxes `[f, reference]` over the given points.
///
/// Exact for one to three objectives (sweep / slicing); Monte Carlo with
/// `10^6` fixed-seed samples beyond that. An empty point set has measure
/// zero. A point failing `f <= reference` componentwise is an error naming
/// the point.
pub fn hypervolume(
    points: &[ObjectiveVector],
    reference: &HvReference,
) -> Result<HvEstimate, MetricsError> {
    let p = reference.len();
    for f in points {
        if f.len() != p {
            return Err(MetricsError::DimensionMismatch {
                expected: p,
                actual: f.len(),
            });
        }
        if f.as_slice().iter().zip(reference.as_slice()).any(|(a, r)| a > r) {
            return Err(MetricsError::RefNotDominated {
                point: format!("{:?}", f.as_slice()),
                reference: format!("{:?}", reference.as_slice()),
            });
        }
    }
    if points.is_empty() {
        return Ok(HvEstimate {
            value: 0.0,
            standard_error: None,
        });
    }
    let value = match p {
        1 => {
            let min = points
                .iter()
                .map(|f| f.as_slice()[0])
                .fold(f64::INFINITY, f64::min);
            reference.as_slice()[0] - min
        }
        2 => hv2(
            &points
                .iter()
                .map(|f| (f.as_slice()[0], f.as_slice()[1]))
                .collect::<Vec<_>>(),
            reference.as_slice()[0],
            reference.as_slice()[1],
        ),
        3 => hv3(points, reference.as_slice()),
        _ => return Ok(hv_monte_carlo(points, reference.as_slice())),
    };
    Ok(HvEstimate {
        value,
        standard_error: None,
    })
}

/// Exact two-objective hypervolume by an ascending sweep over the first
/// objective of the staircase of nondominated points.
fn hv2(points: &[(f64, f64)], r1: f64, r2: f64) -> f64 {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite objectives"));
    let mut hv = 0.0;
    let mut prev_f2 = r2;
    for &(f1, f2) in &sorted {
        if f2 < prev_f2 {
            hv += (r1 - f1) * (prev_f2 - f2);
            prev_f2 = f2;
        }
    }
    hv
}

/// Exact three-objective hypervolume by slicing along the third objective:
/// each slab contributes its height times the 2D hypervolume of the points
/// active below it.
fn hv3(points: &[ObjectiveVector], r: &[f64]) -> f64 {
    let mut levels: Vec<f64> = points.iter().map(|f| f.as_slice()[2]).collect();
    levels.sort_by(|a, b| a.partial_cmp(b).expect("finite objectives"));
    levels.dedup();
    let mut volume = 0.0;
    for (j, &z) in levels.iter().enumerate() {
        let top = if j + 1 < levels.len() {
            levels[j + 1]
        } else {
            r[2]
        };
        if top <= z {
            continue;
        }
        let active: Vec<(f64, f64)> = points
            .iter()
            .filter(|f| f.as_slice()[2] <= z)
            .map(|f| (f.as_slice()[0], f.as_slice()[1]))
            .collect();
        volume += hv2(&active, r[0], r[1]) * (top - z);
    }
    volume
}

/// Monte Carlo hypervolume over the bounding box of the union, with the
/// binomial standard error of the hit fraction.
fn hv_monte_carlo(points: &[ObjectiveVector], r: &[f64]) -> HvEstimate {
    let p = r.len();
    let lower: Vec<f64> = (0..p)
        .map(|i| {
            points
                .iter()
                .map(|f| f.as_slice()[i])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let box_volume: f64 = lower.iter().zip(r).map(|(l, u)| u - l).product();
    if box_volume <= 0.0 {
        return HvEstimate {
            value: 0.0,
            standard_error: Some(0.0),
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(MC_SEED);
    let mut hits = 0usize;
    let mut sample = vec![0.0; p];
    for _ in 0..MC_SAMPLES {
        for (s, (l, u)) in sample.iter_mut().zip(lower.iter().zip(r)) {
            *s = rng.gen_range(*l..*u);
        }
        if points
            .iter()
            .any(|f| f.as_slice().iter().zip(&sample).all(|(fi, si)| fi <= si))
        {
            hits += 1;
        }
    }
    let fraction = hits as f64 / MC_SAMPLES as f64;
    let se = (fraction * (1.0 - fraction) / MC_SAMPLES as f64).sqrt();
    HvEstimate {
        value: box_volume * fraction,
        standard_error: Some(box_volume * se),
    }
}
