//! Quadratic interpolation surrogates: deterministic sample stencils kept
//! poised inside box constraints, and per-objective model fitting on a
//! trust-region ball.
//!
//! Sample coordinates are scaled by the set's spread before assembling the
//! interpolation system, so the poisedness condition gate is invariant to
//! the trust radius.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::core::{BoxBounds, DecisionVector, ObjectiveVector};

/// Condition-number gate for the scaled interpolation matrix.
const CONDITION_LIMIT: f64 = 1e8;
/// Point-replacement rounds before shrinking the stencil.
const IMPROVEMENT_ROUNDS: usize = 10;
/// Stencil shrink attempts before declaring the region degenerate.
const SHRINK_ATTEMPTS: usize = 6;
/// Fixed stream for improvement candidates; independent of solver seeds so
/// sample generation stays deterministic.
const CANDIDATE_SEED: u64 = 0x00C0_FFEE;

#[derive(Debug, Error)]
pub enum SurrogateError {
    #[error("sample region is degenerate: no poised interpolation set fits the box")]
    DegenerateRegion,
    #[error("interpolation system is singular or exceeds the conditioning gate")]
    SingularInterpolation,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("sample radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("a model vector needs at least one objective model")]
    NoObjectives,
    #[error("all models in a vector must share the same center")]
    CenterMismatch,
}

/// Number of interpolation points that determine a full quadratic in `n`
/// variables: `(n + 1)(n + 2) / 2`.
pub fn quadratic_point_count(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// A poised interpolation set around a center point.
///
/// `points[0]` is the center; every point lies within `radius` of it and
/// inside the generating box.
#[derive(Debug, Clone)]
pub struct SampleSet {
    center: DecisionVector,
    radius: f64,
    points: Vec<DecisionVector>,
}

impl SampleSet {
    pub fn center(&self) -> &DecisionVector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn points(&self) -> &[DecisionVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest distance from the center to any point; the scaling used by
    /// the interpolation system.
    fn spread(&self) -> f64 {
        self.points
            .iter()
            .map(|p| distance(p.as_slice(), self.center.as_slice()))
            .fold(0.0, f64::max)
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Scaled quadratic monomials of the displacement `u`:
/// `[u_1..u_n, u_1^2/2..u_n^2/2, u_a u_b (a < b)]`.
fn monomials(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut row = Vec::with_capacity(quadratic_point_count(n) - 1);
    row.extend_from_slice(u);
    for &value in u {
        row.push(0.5 * value * value);
    }
    for a in 0..n {
        for b in (a + 1)..n {
            row.push(u[a] * u[b]);
        }
    }
    row
}

fn scaled_displacement(point: &[f64], center: &[f64], scale: f64) -> Vec<f64> {
    point
        .iter()
        .zip(center)
        .map(|(p, c)| (p - c) / scale)
        .collect()
}

/// Interpolation matrix over the non-center points, scaled by the spread.
fn interpolation_matrix(points: &[DecisionVector], center: &[f64], scale: f64) -> DMatrix<f64> {
    let rows = points.len() - 1;
    let cols = quadratic_point_count(center.len()) - 1;
    let mut m = DMatrix::zeros(rows, cols);
    for (i, p) in points.iter().skip(1).enumerate() {
        let u = scaled_displacement(p.as_slice(), center, scale);
        for (j, v) in monomials(&u).into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

fn condition_number(svd: &nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>) -> f64 {
    let sv = &svd.singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Axis and diagonal stencil: the center, one pair of points per axis, and
/// one point per coordinate pair, all at distance `offset` (clipped).
fn stencil(center: &[f64], offset: f64, bounds: &BoxBounds) -> Vec<DecisionVector> {
    let n = center.len();
    let mut points = Vec::with_capacity(quadratic_point_count(n));
    let push = |points: &mut Vec<DecisionVector>, coords: Vec<f64>| {
        let clipped = bounds.clip(&coords);
        points.push(DecisionVector::new(clipped).expect("clipped coordinates are finite"));
    };
    push(&mut points, center.to_vec());
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut c = center.to_vec();
            c[j] += sign * offset;
            push(&mut points, c);
        }
    }
    let diag = offset / 2f64.sqrt();
    for a in 0..n {
        for b in (a + 1)..n {
            let mut c = center.to_vec();
            c[a] += diag;
            c[b] += diag;
            push(&mut points, c);
        }
    }
    points
}

/// Draws a point uniformly from the ball of `radius` around `center`,
/// clipped into the box.
fn random_ball_point(
    rng: &mut ChaCha8Rng,
    center: &[f64],
    radius: f64,
    bounds: &BoxBounds,
) -> DecisionVector {
    let n = center.len();
    loop {
        // Box-Muller pairs give an isotropic direction.
        let mut z = Vec::with_capacity(n + 1);
        while z.len() <= n {
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let r = (-2.0 * u1.ln()).sqrt();
            z.push(r * (2.0 * std::f64::consts::PI * u2).cos());
            z.push(r * (2.0 * std::f64::consts::PI * u2).sin());
        }
        z.truncate(n);
        let nrm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm < 1e-12 {
            continue;
        }
        let u: f64 = rng.gen_range(0.0f64..1.0);
        let scale = radius * u.powf(1.0 / n as f64) / nrm;
        let coords: Vec<f64> = center.iter().zip(&z).map(|(c, zi)| c + scale * zi).collect();
        return DecisionVector::new(bounds.clip(&coords)).expect("clipped coordinates are finite");
    }
}

/// Candidate replacement points within `radius` of the center: full-radius
/// axis and diagonal probes plus a fixed pseudorandom ball sample.
fn replacement_candidates(
    center: &[f64],
    radius: f64,
    bounds: &BoxBounds,
) -> Vec<DecisionVector> {
    let n = center.len();
    let mut candidates = Vec::new();
    let mut push = |coords: Vec<f64>| {
        let clipped = bounds.clip(&coords);
        candidates.push(DecisionVector::new(clipped).expect("clipped coordinates are finite"));
    };
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut c = center.to_vec();
            c[j] += sign * radius;
            push(c);
        }
    }
    let diag = radius / 2f64.sqrt();
    for a in 0..n {
        for b in (a + 1)..n {
            for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut c = center.to_vec();
                c[a] += sa * diag;
                c[b] += sb * diag;
                push(c);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(CANDIDATE_SEED);
    for _ in 0..64 {
        candidates.push(random_ball_point(&mut rng, center, radius, bounds));
    }
    candidates
}

/// Row most responsible for near-singularity: a duplicate point if one
/// exists, otherwise the largest component of the left singular vector for
/// the smallest singular value.
fn worst_row(
    points: &[DecisionVector],
    svd: &nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>,
    duplicate_tol: f64,
) -> usize {
    for i in 1..points.len() {
        for j in 0..i {
            if distance(points[i].as_slice(), points[j].as_slice()) <= duplicate_tol {
                return i - 1;
            }
        }
    }
    let sv = &svd.singular_values;
    let mut min_idx = 0;
    for k in 1..sv.len() {
        if sv[k] < sv[min_idx] {
            min_idx = k;
        }
    }
    let u = svd.u.as_ref().expect("svd computed with u");
    let mut row = 0;
    let mut best = -1.0;
    for i in 0..u.nrows() {
        let v = u[(i, min_idx)].abs();
        if v > best {
            best = v;
            row = i;
        }
    }
    row
}

/// Builds a poised quadratic interpolation set of `(n + 1)(n + 2) / 2`
/// points within `radius` of `center`, clipped to `bounds`.
///
/// Starts from the deterministic stencil; while the scaled interpolation
/// matrix exceeds the conditioning gate, the most redundant point is
/// replaced by the candidate maximizing the magnitude of its Lagrange
/// polynomial. If repeated repair and stencil shrinking both fail the
/// region is declared degenerate.
pub fn generate_sample_set(
    center: &DecisionVector,
    radius: f64,
    bounds: &BoxBounds,
) -> Result<SampleSet, SurrogateError> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(SurrogateError::InvalidRadius(radius));
    }
    if center.len() != bounds.dim() {
        return Err(SurrogateError::DimensionMismatch {
            expected: bounds.dim(),
            actual: center.len(),
        });
    }
    let center_coords = bounds.clip(center.as_slice());
    for attempt in 0..SHRINK_ATTEMPTS {
        let attempt_radius = radius / 2f64.powi(attempt as i32);
        let mut points = stencil(&center_coords, attempt_radius / 2.0, bounds);
        if improve_poisedness(&mut points, &center_coords, attempt_radius, bounds) {
            let center_dv =
                DecisionVector::new(center_coords).expect("clipped coordinates are finite");
            return Ok(SampleSet {
                center: center_dv,
                radius,
                points,
            });
        }
    }
    Err(SurrogateError::DegenerateRegion)
}

/// Repairs `points` in place; true when the conditioning gate passes.
fn improve_poisedness(
    points: &mut [DecisionVector],
    center: &[f64],
    radius: f64,
    bounds: &BoxBounds,
) -> bool {
    let candidates = replacement_candidates(center, radius, bounds);
    for _ in 0..=IMPROVEMENT_ROUNDS {
        let scale = points
            .iter()
            .map(|p| distance(p.as_slice(), center))
            .fold(0.0, f64::max);
        if scale <= 0.0 {
            return false;
        }
        let m = interpolation_matrix(points, center, scale);
        let svd = m.clone().svd(true, true);
        let duplicate_tol = 1e-12 * scale.max(1.0);
        let has_duplicate = (0..points.len()).any(|i| {
            (0..i).any(|j| distance(points[i].as_slice(), points[j].as_slice()) <= duplicate_tol)
        });
        if !has_duplicate && condition_number(&svd) < CONDITION_LIMIT {
            return true;
        }
        let row = worst_row(points, &svd, duplicate_tol);
        // Lagrange coefficients for the replaced point via the pseudoinverse,
        // tolerant of exact singularity.
        let mut e = DVector::zeros(m.nrows());
        e[row] = 1.0;
        let lagrange = svd.solve(&e, 1e-14).ok();
        let mut best: Option<(f64, &DecisionVector)> = None;
        for cand in &candidates {
            let too_close = points.iter().enumerate().any(|(i, p)| {
                i != row + 1 && distance(p.as_slice(), cand.as_slice()) <= duplicate_tol.max(1e-9 * scale)
            });
            if too_close {
                continue;
            }
            let value = match &lagrange {
                Some(c) => {
                    let u = scaled_displacement(cand.as_slice(), center, scale);
                    let phi = DVector::from_vec(monomials(&u));
                    (phi.transpose() * c)[(0, 0)].abs()
                }
                // Singular system without Lagrange data: prefer spread.
                None => points
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != row + 1)
                    .map(|(_, p)| distance(p.as_slice(), cand.as_slice()))
                    .fold(f64::INFINITY, f64::min),
            };
            if best.as_ref().is_none_or(|(bv, _)| value > *bv) {
                best = Some((value, cand));
            }
        }
        match best {
            Some((_, cand)) => points[row + 1] = cand.clone(),
            None => return false,
        }
    }
    false
}

/// A quadratic model `m(x) = c + g . (x - center) + (x - center)' H (x - center) / 2`.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    center: Vec<f64>,
    constant: f64,
    gradient: DVector<f64>,
    hessian: DMatrix<f64>,
}

impl QuadraticModel {
    pub fn new(center: Vec<f64>, constant: f64, gradient: DVector<f64>, hessian: DMatrix<f64>) -> Self {
        debug_assert_eq!(center.len(), gradient.len());
        debug_assert_eq!(hessian.nrows(), hessian.ncols());
        Self {
            center,
            constant,
            gradient,
            hessian,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Model value at the center; equals the interpolated objective there.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn gradient(&self) -> &DVector<f64> {
        &self.gradient
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.hessian
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        let d = DVector::from_iterator(
            self.center.len(),
            x.iter().zip(&self.center).map(|(xi, ci)| xi - ci),
        );
        self.constant + self.gradient.dot(&d) + 0.5 * (&self.hessian * &d).dot(&d)
    }

    pub fn gradient_at(&self, x: &[f64]) -> DVector<f64> {
        let d = DVector::from_iterator(
            self.center.len(),
            x.iter().zip(&self.center).map(|(xi, ci)| xi - ci),
        );
        &self.gradient + &self.hessian * d
    }
}

/// One quadratic model per objective, sharing an interpolation set.
#[derive(Debug, Clone)]
pub struct ModelVector {
    center: DecisionVector,
    models: Vec<QuadraticModel>,
}

impl ModelVector {
    /// Bundles already-built models; every model must share the center.
    pub fn from_models(
        center: DecisionVector,
        models: Vec<QuadraticModel>,
    ) -> Result<Self, SurrogateError> {
        if models.is_empty() {
            return Err(SurrogateError::NoObjectives);
        }
        for m in &models {
            if m.center() != center.as_slice() {
                return Err(SurrogateError::CenterMismatch);
            }
        }
        Ok(Self { center, models })
    }

    pub fn center(&self) -> &DecisionVector {
        &self.center
    }

    pub fn models(&self) -> &[QuadraticModel] {
        &self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Model gradients at the shared center, one per objective.
    pub fn gradients_at_center(&self) -> Vec<Vec<f64>> {
        self.models
            .iter()
            .map(|m| m.gradient().iter().cloned().collect())
            .collect()
    }
}

/// Fits one interpolating quadratic per objective through all sample
/// points. The model value at the center matches the evaluated objective
/// there exactly; the remaining coefficients solve the scaled system.
pub fn fit_models(
    sample: &SampleSet,
    evals: &[ObjectiveVector],
) -> Result<ModelVector, SurrogateError> {
    if evals.len() != sample.len() {
        return Err(SurrogateError::DimensionMismatch {
            expected: sample.len(),
            actual: evals.len(),
        });
    }
    let p = evals[0].len();
    if evals.iter().any(|f| f.len() != p) {
        return Err(SurrogateError::DimensionMismatch {
            expected: p,
            actual: evals.iter().map(|f| f.len()).find(|&l| l != p).unwrap_or(p),
        });
    }
    let n = sample.center().len();
    let scale = sample.spread();
    if scale <= 0.0 {
        return Err(SurrogateError::SingularInterpolation);
    }
    let center = sample.center().as_slice();
    let m = interpolation_matrix(sample.points(), center, scale);
    let lu = m.clone().lu();
    let mut models = Vec::with_capacity(p);
    for obj in 0..p {
        let f_center = evals[0][obj];
        let rhs = DVector::from_iterator(
            sample.len() - 1,
            evals.iter().skip(1).map(|f| f[obj] - f_center),
        );
        let theta = lu
            .solve(&rhs)
            .ok_or(SurrogateError::SingularInterpolation)?;
        let mut gradient = DVector::zeros(n);
        for j in 0..n {
            gradient[j] = theta[j] / scale;
        }
        let mut hessian = DMatrix::zeros(n, n);
        for a in 0..n {
            hessian[(a, a)] = theta[n + a] / (scale * scale);
        }
        let mut idx = 2 * n;
        for a in 0..n {
            for b in (a + 1)..n {
                let v = theta[idx] / (scale * scale);
                hessian[(a, b)] = v;
                hessian[(b, a)] = v;
                idx += 1;
            }
        }
        models.push(QuadraticModel::new(
            center.to_vec(),
            f_center,
            gradient,
            hessian,
        ));
    }
    // Interpolation residual gate: protects downstream steps from a fit
    // that slipped through conditioning.
    for (point, f) in sample.points().iter().zip(evals) {
        for (model, &target) in models.iter().zip(f.as_slice()) {
            let got = model.value_at(point.as_slice());
            if (got - target).abs() > 1e-6 * target.abs().max(1.0) {
                return Err(SurrogateError::SingularInterpolation);
            }
        }
    }
    Ok(ModelVector {
        center: sample.center().clone(),
        models,
    })
}

#[cfg(test)]
mod tests {
    // Index loops below mirror the matrix algebra they check.
    #![allow(clippy::needless_range_loop)]
    use super::*;

    fn dv(coords: &[f64]) -> DecisionVector {
        DecisionVector::new(coords.to_vec()).unwrap()
    }

    fn wide_bounds(n: usize) -> BoxBounds {
        BoxBounds::new(vec![-100.0; n], vec![100.0; n]).unwrap()
    }

    fn fit_function(
        sample: &SampleSet,
        f: impl Fn(&[f64]) -> Vec<f64>,
    ) -> ModelVector {
        let evals: Vec<ObjectiveVector> = sample
            .points()
            .iter()
            .map(|p| ObjectiveVector::new(f(p.as_slice())).unwrap())
            .collect();
        fit_models(sample, &evals).unwrap()
    }

    #[test]
    fn point_count_formula() {
        assert_eq!(quadratic_point_count(1), 3);
        assert_eq!(quadratic_point_count(2), 6);
        assert_eq!(quadratic_point_count(3), 10);
        assert_eq!(quadratic_point_count(4), 15);
    }

    #[test]
    fn sample_set_has_expected_size_and_center() {
        let bounds = wide_bounds(2);
        let set = generate_sample_set(&dv(&[0.0, 0.0]), 1.0, &bounds).unwrap();
        assert_eq!(set.len(), 6);
        assert_eq!(set.points()[0], dv(&[0.0, 0.0]));
    }

    #[test]
    fn sample_points_stay_within_radius_and_box() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let n = rng.gen_range(1..=4);
            let lower: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..0.0)).collect();
            let upper: Vec<f64> = lower.iter().map(|l| l + rng.gen_range(0.5..3.0)).collect();
            let bounds = BoxBounds::new(lower.clone(), upper.clone()).unwrap();
            let center: Vec<f64> = lower
                .iter()
                .zip(&upper)
                .map(|(&l, &u)| rng.gen_range(l..u))
                .collect();
            let radius = rng.gen_range(0.05..2.0);
            let set = generate_sample_set(&dv(&center), radius, &bounds).unwrap();
            for p in set.points() {
                assert!(bounds.contains(p.as_slice()));
                assert!(
                    distance(p.as_slice(), &center) <= radius * (1.0 + 1e-12),
                    "point escaped the sample radius"
                );
            }
        }
    }

    #[test]
    fn sample_set_is_poised_at_box_corner() {
        // Clipping collapses half the stencil onto the corner faces; the
        // repair sweep must restore poisedness.
        let bounds = BoxBounds::new(vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0]).unwrap();
        let set = generate_sample_set(&dv(&[0.0, 0.0, 0.5]), 0.5, &bounds).unwrap();
        let scale = set.spread();
        let m = interpolation_matrix(set.points(), set.center().as_slice(), scale);
        let svd = m.svd(false, false);
        assert!(condition_number(&svd) < CONDITION_LIMIT);
        let model = fit_function(&set, |x| vec![x[0] + 2.0 * x[1] * x[2]]);
        assert!(model.models()[0].value_at(&[0.0, 0.0, 0.5]).is_finite());
    }

    #[test]
    fn degenerate_box_is_reported() {
        let bounds = BoxBounds::new(vec![0.0, 0.0], vec![1.0, 1e-11]).unwrap();
        let err = generate_sample_set(&dv(&[0.5, 0.0]), 1.0, &bounds).unwrap_err();
        assert!(matches!(err, SurrogateError::DegenerateRegion));
    }

    #[test]
    fn fit_recovers_univariate_quadratic() {
        let bounds = wide_bounds(1);
        let set = generate_sample_set(&dv(&[0.3]), 1.0, &bounds).unwrap();
        let models = fit_function(&set, |x| vec![1.0 + 2.0 * x[0] + 3.0 * x[0] * x[0]]);
        let m = &models.models()[0];
        // Value, slope, and curvature at the center x = 0.3.
        assert!((m.constant() - 1.87).abs() < 1e-10);
        assert!((m.gradient()[0] - 3.8).abs() < 1e-9);
        assert!((m.hessian()[(0, 0)] - 6.0).abs() < 1e-8);
    }

    #[test]
    fn fit_of_constant_function_has_zero_derivatives() {
        let bounds = wide_bounds(3);
        let set = generate_sample_set(&dv(&[0.1, -0.2, 0.4]), 0.5, &bounds).unwrap();
        let models = fit_function(&set, |_| vec![5.0]);
        let m = &models.models()[0];
        assert_eq!(m.constant(), 5.0);
        assert!(m.gradient().amax() < 1e-10);
        assert!(m.hessian().amax() < 1e-9);
    }

    #[test]
    fn fit_recovers_cross_term() {
        let bounds = wide_bounds(2);
        let set = generate_sample_set(&dv(&[0.0, 0.0]), 1.0, &bounds).unwrap();
        let models = fit_function(&set, |x| vec![x[0] * x[1]]);
        let m = &models.models()[0];
        assert!((m.hessian()[(0, 1)] - 1.0).abs() < 1e-9);
        assert!((m.hessian()[(1, 0)] - 1.0).abs() < 1e-9);
        assert!(m.hessian()[(0, 0)].abs() < 1e-9);
    }

    #[test]
    fn fit_reproduces_random_quadratics_to_coefficient_precision() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let n = rng.gen_range(1..=4);
            let bounds = wide_bounds(n);
            let center: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let radius = rng.gen_range(0.1..2.0);
            let c: f64 = rng.gen_range(-2.0..2.0);
            let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut h = vec![vec![0.0; n]; n];
            for a in 0..n {
                for b in a..n {
                    let v = rng.gen_range(-2.0..2.0);
                    h[a][b] = v;
                    h[b][a] = v;
                }
            }
            let center_cl = center.clone();
            let g_cl = g.clone();
            let h_cl = h.clone();
            let quad = move |x: &[f64]| {
                let d: Vec<f64> = x.iter().zip(&center_cl).map(|(xi, ci)| xi - ci).collect();
                let mut v = c;
                for a in 0..d.len() {
                    v += g_cl[a] * d[a];
                    for b in 0..d.len() {
                        v += 0.5 * h_cl[a][b] * d[a] * d[b];
                    }
                }
                vec![v]
            };
            let set = generate_sample_set(&dv(&center), radius, &bounds).unwrap();
            let models = fit_function(&set, quad);
            let m = &models.models()[0];
            assert!((m.constant() - c).abs() <= 1e-8);
            for a in 0..n {
                assert!(
                    (m.gradient()[a] - g[a]).abs() <= 1e-8,
                    "gradient coefficient {a} off: {got} vs {want}",
                    got = m.gradient()[a],
                    want = g[a]
                );
                for b in 0..n {
                    assert!(
                        (m.hessian()[(a, b)] - h[a][b]).abs() <= 1e-8,
                        "hessian coefficient ({a},{b}) off: {got} vs {want}",
                        got = m.hessian()[(a, b)],
                        want = h[a][b]
                    );
                }
            }
        }
    }

    #[test]
    fn interpolation_residuals_are_tiny_at_sample_points() {
        let bounds = BoxBounds::new(vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0]).unwrap();
        let set = generate_sample_set(&dv(&[0.5, 0.5, 0.5]), 0.5, &bounds).unwrap();
        let f = |x: &[f64]| {
            let g = (x[2] - 0.5) * (x[2] - 0.5);
            vec![
                (1.0 + g)
                    * (x[0] * std::f64::consts::FRAC_PI_2).cos()
                    * (x[1] * std::f64::consts::FRAC_PI_2).cos(),
                (1.0 + g)
                    * (x[0] * std::f64::consts::FRAC_PI_2).cos()
                    * (x[1] * std::f64::consts::FRAC_PI_2).sin(),
                (1.0 + g) * (x[0] * std::f64::consts::FRAC_PI_2).sin(),
            ]
        };
        let evals: Vec<ObjectiveVector> = set
            .points()
            .iter()
            .map(|p| ObjectiveVector::new(f(p.as_slice())).unwrap())
            .collect();
        let models = fit_models(&set, &evals).unwrap();
        for (point, fv) in set.points().iter().zip(&evals) {
            for (model, &target) in models.models().iter().zip(fv.as_slice()) {
                let got = model.value_at(point.as_slice());
                assert!(
                    (got - target).abs() <= 1e-8 * target.abs().max(1.0),
                    "residual too large: {got} vs {target}"
                );
            }
        }
        // The center interpolates exactly by construction.
        assert_eq!(
            models.models()[0].value_at(set.center().as_slice()),
            evals[0][0]
        );
    }

    #[test]
    fn model_gradient_matches_finite_differences() {
        let bounds = wide_bounds(3);
        let set = generate_sample_set(&dv(&[0.2, -0.1, 0.05]), 0.8, &bounds).unwrap();
        let models = fit_function(&set, |x| {
            vec![x[0].sin() + (x[1] * x[2]).cos() + x[0] * x[1]]
        });
        let m = &models.models()[0];
        let probe = [0.3, 0.1, -0.2];
        let grad = m.gradient_at(&probe);
        let h = 1e-6;
        for j in 0..3 {
            let mut hi = probe;
            let mut lo = probe;
            hi[j] += h;
            lo[j] -= h;
            let fd = (m.value_at(&hi) - m.value_at(&lo)) / (2.0 * h);
            assert!(
                (grad[j] - fd).abs() <= 1e-5 * fd.abs().max(1.0),
                "gradient component {j}: {g} vs finite difference {fd}",
                g = grad[j]
            );
        }
    }

    #[test]
    fn hessian_is_exactly_symmetric() {
        let bounds = wide_bounds(3);
        let set = generate_sample_set(&dv(&[0.0, 0.0, 0.0]), 1.0, &bounds).unwrap();
        let models = fit_function(&set, |x| vec![(x[0] + 2.0 * x[1]).sin() * x[2].cos()]);
        let h = models.models()[0].hessian();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(h[(a, b)], h[(b, a)]);
            }
        }
    }
}
