//! Trust-region subproblem solvers: exact minimization of a quadratic on a
//! ball, a first-order criticality measure for several objectives at once,
//! and the scalarized search that turns per-objective models into a single
//! trial point.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use thiserror::Error;

use crate::core::{BoxBounds, DecisionVector};
use crate::surrogate::{ModelVector, QuadraticModel};

/// Slack below which a ball is not shrunk to fit the box; coordinatewise
/// clipping covers centers this close to a face.
const MIN_FIT_SLACK: f64 = 1e-6;
/// A scalarization weight below this counts as zero and becomes a hard
/// constraint instead of a ratio.
const WEIGHT_ZERO_TOL: f64 = 1e-12;
/// Violation tolerance for zero-weight hard constraints.
const HARD_CONSTRAINT_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum SubsolverError {
    #[error("trust-region radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

/// Ball around a center, optionally intersected with box bounds.
///
/// With bounds present the constructor shrinks the radius to the center's
/// face slack so the ball fits the box, except when the center sits
/// (numerically) on a face; there the radius is kept and feasibility relies
/// on projection.
#[derive(Debug, Clone)]
pub struct TrustRegion {
    center: DecisionVector,
    radius: f64,
    bounds: Option<BoxBounds>,
}

impl TrustRegion {
    pub fn new(center: DecisionVector, radius: f64) -> Result<Self, SubsolverError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(SubsolverError::InvalidRadius(radius));
        }
        Ok(Self {
            center,
            radius,
            bounds: None,
        })
    }

    pub fn fitted(
        center: DecisionVector,
        radius: f64,
        bounds: BoxBounds,
    ) -> Result<Self, SubsolverError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(SubsolverError::InvalidRadius(radius));
        }
        if center.len() != bounds.dim() {
            return Err(SubsolverError::DimensionMismatch {
                expected: bounds.dim(),
                actual: center.len(),
            });
        }
        let clipped = DecisionVector::new(bounds.clip(center.as_slice()))
            .expect("clipped coordinates are finite");
        let slack = bounds.face_slack(clipped.as_slice());
        let radius = if slack >= MIN_FIT_SLACK {
            radius.min(slack)
        } else {
            radius
        };
        Ok(Self {
            center: clipped,
            radius,
            bounds: Some(bounds),
        })
    }

    pub fn center(&self) -> &DecisionVector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn bounds(&self) -> Option<&BoxBounds> {
        self.bounds.as_ref()
    }

    /// Projects `x` into the ball-box intersection: box clip first, then a
    /// scale towards the center, which cannot leave the (convex) box.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut p = match &self.bounds {
            Some(b) => b.clip(x),
            None => x.to_vec(),
        };
        let dist = p
            .iter()
            .zip(self.center.as_slice())
            .map(|(a, c)| (a - c) * (a - c))
            .sum::<f64>()
            .sqrt();
        if dist > self.radius {
            let scale = self.radius / dist;
            for (pi, ci) in p.iter_mut().zip(self.center.as_slice()) {
                *pi = ci + (*pi - ci) * scale;
            }
        }
        p
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let dist = x
            .iter()
            .zip(self.center.as_slice())
            .map(|(a, c)| (a - c) * (a - c))
            .sum::<f64>()
            .sqrt();
        if dist > self.radius + tol {
            return false;
        }
        match &self.bounds {
            Some(b) => x
                .iter()
                .zip(b.lower().iter().zip(b.upper()))
                .all(|(&c, (&l, &u))| c >= l - tol && c <= u + tol),
            None => true,
        }
    }
}

/// Squared-norm helper over eigencoordinates for the secular equation.
fn coeff_norm(qg: &DVector<f64>, lambda: &DVector<f64>, mu: f64) -> f64 {
    qg.iter()
        .zip(lambda.iter())
        .map(|(&g, &l)| {
            let d = l + mu;
            (g / d) * (g / d)
        })
        .sum::<f64>()
        .sqrt()
}

/// Global minimizer of a quadratic model over the trust-region ball,
/// ignoring any box bounds on the region.
///
/// Solved exactly through the eigendecomposition of the Hessian: either the
/// unconstrained minimizer lies inside the ball, or the boundary multiplier
/// solves the secular equation, with the hard case handled by an
/// eigenvector step. Returns the minimizer and its model value.
pub fn min_quadratic_on_ball(model: &QuadraticModel, region: &TrustRegion) -> (DecisionVector, f64) {
    let n = model.dim();
    assert_eq!(
        region.center().len(),
        n,
        "model and region dimensions must agree"
    );
    let r = region.radius();
    let center = region.center().as_slice();
    // The model may be centered elsewhere; shift to the region center.
    let g0 = model.gradient_at(center);
    let c0 = model.value_at(center);
    let h = model.hessian().clone();

    let eig = nalgebra::SymmetricEigen::new(h);
    let lambda = eig.eigenvalues;
    let q = eig.eigenvectors;
    let qg = q.transpose() * &g0;
    let lam_min = lambda.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale_h = lambda.iter().fold(1.0f64, |acc, l| acc.max(l.abs()));
    let tol = 1e-12 * scale_h;

    let assemble = |s: &DVector<f64>| -> (DecisionVector, f64) {
        // Clamp numerically onto the ball.
        let nrm = s.norm();
        let s = if nrm > r { s * (r / nrm) } else { s.clone() };
        let x: Vec<f64> = center
            .iter()
            .zip((&q * &s).iter())
            .map(|(c, d)| c + d)
            .collect();
        let x = DecisionVector::new(x).expect("finite step");
        let value = model.value_at(x.as_slice());
        if value > c0 {
            (region.center().clone(), c0)
        } else {
            (x, value)
        }
    };

    // Interior solution for a positive-definite Hessian.
    if lam_min > tol {
        let s = DVector::from_iterator(n, qg.iter().zip(lambda.iter()).map(|(&g, &l)| -g / l));
        if s.norm() <= r {
            return assemble(&s);
        }
    }

    let mu0 = (-lam_min).max(0.0);
    let eps_g = 1e-11 * qg.amax().max(1.0);
    let near_min = |l: f64| l - lam_min <= tol.max(1e-14);

    if lam_min <= tol {
        let small_on_min = qg
            .iter()
            .zip(lambda.iter())
            .all(|(&g, &l)| !near_min(l) || g.abs() <= eps_g);
        if small_on_min {
            // Hard case: the gradient has no component along the most
            // negative curvature, so pad the partial solution with an
            // eigenvector step out to the boundary.
            let sbar = DVector::from_iterator(
                n,
                qg.iter().zip(lambda.iter()).map(|(&g, &l)| {
                    if near_min(l) {
                        0.0
                    } else {
                        -g / (l + mu0)
                    }
                }),
            );
            let nb = sbar.norm();
            if nb <= r {
                let tau = (r * r - nb * nb).max(0.0).sqrt();
                let idx = (0..n)
                    .find(|&i| near_min(lambda[i]))
                    .expect("a minimal eigenvalue exists");
                let mut s = sbar;
                s[idx] += tau;
                return assemble(&s);
            }
        }
    }

    // Secular equation: find mu > mu0 with ||s(mu)|| = r.
    let mut lo = mu0 + tol.max(1e-16);
    if coeff_norm(&qg, &lambda, lo) <= r {
        // The norm at the left edge should exceed r; if not the boundary
        // solution degenerates to the hard-case padding above.
        let sbar = DVector::from_iterator(
            n,
            qg.iter()
                .zip(lambda.iter())
                .map(|(&g, &l)| -g / (l + lo)),
        );
        let nb = sbar.norm();
        let tau = (r * r - nb * nb).max(0.0).sqrt();
        let idx = (0..n)
            .fold((0usize, f64::INFINITY), |best, i| {
                if lambda[i] < best.1 {
                    (i, lambda[i])
                } else {
                    best
                }
            })
            .0;
        let mut s = sbar;
        s[idx] += tau;
        return assemble(&s);
    }
    let mut hi = mu0 + (qg.norm() / r).max(1.0) + scale_h;
    let mut grow = 0;
    while coeff_norm(&qg, &lambda, hi) > r && grow < 200 {
        hi = mu0 + 2.0 * (hi - mu0);
        grow += 1;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let nrm = coeff_norm(&qg, &lambda, mid);
        // Newton step on 1/r - 1/||s(mu)||, safeguarded by the bracket.
        let dn: f64 = qg
            .iter()
            .zip(lambda.iter())
            .map(|(&g, &l)| {
                let d = l + mid;
                g * g / (d * d * d)
            })
            .sum();
        let h_val = 1.0 / r - 1.0 / nrm;
        let h_der = dn / (nrm * nrm * nrm);
        if nrm > r {
            lo = mid;
        } else {
            hi = mid;
        }
        if h_der > 0.0 {
            let newton = mid - h_val / h_der;
            if newton > lo && newton < hi {
                let nn = coeff_norm(&qg, &lambda, newton);
                if nn > r {
                    lo = newton;
                } else {
                    hi = newton;
                }
            }
        }
        if (hi - lo) <= 1e-13 * hi.abs().max(1.0) {
            break;
        }
    }
    let mu = 0.5 * (lo + hi);
    let s = DVector::from_iterator(
        n,
        qg.iter().zip(lambda.iter()).map(|(&g, &l)| -g / (l + mu)),
    );
    assemble(&s)
}

/// First-order criticality data at a point: the measure, the convex weights
/// attaining it, and the common descent direction.
#[derive(Debug, Clone)]
pub struct CriticalityResult {
    /// `max(0, -min over unit directions of the worst directional
    /// derivative)`; zero exactly at Pareto-critical points.
    pub omega: f64,
    /// Simplex weights of the minimum-norm convex combination.
    pub alpha: Vec<f64>,
    /// Unit descent direction shared by all objectives, or zeros when
    /// critical.
    pub direction: Vec<f64>,
}

/// Criticality measure for a set of objective gradients.
///
/// Computes the minimum-norm point of the gradients' convex hull by
/// Frank-Wolfe with away steps and exact line search; `omega` is that
/// norm, which equals the negative of the best joint descent rate.
pub fn omega(gradients: &[Vec<f64>]) -> CriticalityResult {
    let p = gradients.len();
    assert!(p >= 1, "criticality needs at least one gradient");
    let n = gradients[0].len();
    assert!(
        gradients.iter().all(|g| g.len() == n),
        "gradients must share a dimension"
    );
    let g = DMatrix::from_fn(n, p, |i, j| gradients[j][i]);
    let q = g.transpose() * &g;
    let mut alpha = DVector::from_element(p, 1.0 / p as f64);
    for _ in 0..500 {
        let grad = &q * &alpha;
        let mut i_fw = 0;
        for i in 1..p {
            if grad[i] < grad[i_fw] {
                i_fw = i;
            }
        }
        let ga = grad.dot(&alpha);
        let gap = ga - grad[i_fw];
        if gap <= 1e-10 {
            break;
        }
        let mut i_aw = i_fw;
        let mut best_aw = f64::NEG_INFINITY;
        for i in 0..p {
            if alpha[i] > 0.0 && grad[i] > best_aw {
                best_aw = grad[i];
                i_aw = i;
            }
        }
        let fw_dd = grad[i_fw] - ga;
        let aw_dd = ga - grad[i_aw];
        let mut d = DVector::zeros(p);
        let gamma_max = if fw_dd <= aw_dd {
            d -= &alpha;
            d[i_fw] += 1.0;
            1.0
        } else {
            d += &alpha;
            d[i_aw] -= 1.0;
            let denom = 1.0 - alpha[i_aw];
            if denom > 1e-16 {
                alpha[i_aw] / denom
            } else {
                1.0
            }
        };
        let dd = d.dot(&grad);
        if dd >= 0.0 {
            break;
        }
        let curv = (&q * &d).dot(&d);
        let gamma = if curv > 0.0 {
            (-dd / curv).clamp(0.0, gamma_max)
        } else {
            gamma_max
        };
        if gamma <= 0.0 {
            break;
        }
        alpha += gamma * d;
        let mut sum = 0.0;
        for a in alpha.iter_mut() {
            if *a < 0.0 {
                *a = 0.0;
            }
            sum += *a;
        }
        alpha /= sum;
    }
    let v = &g * &alpha;
    let omega = v.norm();
    let direction = if omega > 1e-12 {
        v.iter().map(|c| -c / omega).collect()
    } else {
        vec![0.0; n]
    };
    CriticalityResult {
        omega,
        alpha: alpha.iter().cloned().collect(),
        direction,
    }
}

/// Result of the scalarized trial-point search.
#[derive(Debug, Clone)]
pub struct ScalarizationResult {
    /// Attained scalarization level in `[-1, 0]`; 0 means no model descent.
    pub t: f64,
    /// Trial point inside the trust region (and box).
    pub x_plus: DecisionVector,
    /// Per-objective scalarization weights `f_center - ideal`.
    pub r: Vec<f64>,
}

/// Scalarized objective: the largest ratio `(m_i(x) - f_center_i) / r_i`
/// over objectives with positive weight. Zero-weight objectives act as hard
/// constraints `m_i(x) <= f_center_i` and send the value to infinity when
/// violated. Returns the value and the index driving it.
fn scalarized(
    models: &[QuadraticModel],
    f_center: &[f64],
    r: &[f64],
    x: &[f64],
) -> (f64, usize) {
    let mut value = f64::NEG_INFINITY;
    let mut idx = 0;
    let mut violated: Option<(f64, usize)> = None;
    for (i, model) in models.iter().enumerate() {
        let diff = model.value_at(x) - f_center[i];
        if r[i] > WEIGHT_ZERO_TOL {
            let ratio = diff / r[i];
            if ratio > value {
                value = ratio;
                idx = i;
            }
        } else if diff > HARD_CONSTRAINT_TOL {
            let v = diff;
            if violated.as_ref().is_none_or(|(bv, _)| v > *bv) {
                violated = Some((v, i));
            }
        }
    }
    if let Some((_, i)) = violated {
        return (f64::INFINITY, i);
    }
    if value == f64::NEG_INFINITY {
        (0.0, 0)
    } else {
        (value, idx)
    }
}

/// Projected subgradient descent on the scalarized objective with
/// diminishing steps `0.3 radius / sqrt(j)`.
fn subgradient_descent(
    models: &[QuadraticModel],
    f_center: &[f64],
    r: &[f64],
    region: &TrustRegion,
    start: Vec<f64>,
) -> (f64, Vec<f64>) {
    let radius = region.radius();
    let mut x = region.project(&start);
    let (mut best_v, _) = scalarized(models, f_center, r, &x);
    let mut best_x = x.clone();
    for j in 1..=300usize {
        let (v, idx) = scalarized(models, f_center, r, &x);
        if v < best_v {
            best_v = v;
            best_x = x.clone();
        }
        let grad = models[idx].gradient_at(&x);
        let scale = if r[idx] > WEIGHT_ZERO_TOL && v.is_finite() {
            r[idx]
        } else {
            1.0
        };
        let mut sg: Vec<f64> = grad.iter().map(|g| g / scale).collect();
        let nrm = sg.iter().map(|g| g * g).sum::<f64>().sqrt();
        if nrm < 1e-14 {
            break;
        }
        let step = 0.3 * radius / (j as f64).sqrt();
        for s in sg.iter_mut() {
            *s *= step / nrm;
        }
        let moved: Vec<f64> = x.iter().zip(&sg).map(|(xi, si)| xi - si).collect();
        x = region.project(&moved);
    }
    let (v, _) = scalarized(models, f_center, r, &x);
    if v < best_v {
        best_v = v;
        best_x = x;
    }
    (best_v, best_x)
}

/// Deterministic pattern-search refinement around `x`: axis and diagonal
/// probes with a halving step, keeping strict improvements.
fn pattern_polish(
    models: &[QuadraticModel],
    f_center: &[f64],
    r: &[f64],
    region: &TrustRegion,
    mut x: Vec<f64>,
) -> (f64, Vec<f64>) {
    let n = x.len();
    let radius = region.radius();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[j] = sign;
            dirs.push(d);
        }
    }
    let inv = 1.0 / 2f64.sqrt();
    for a in 0..n {
        for b in (a + 1)..n {
            for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut d = vec![0.0; n];
                d[a] = sa * inv;
                d[b] = sb * inv;
                dirs.push(d);
            }
        }
    }
    let (mut best_v, _) = scalarized(models, f_center, r, &x);
    let mut scale = 0.1 * radius;
    let mut evals = 0usize;
    while scale > 1e-7 * radius && evals < 5000 {
        let mut improved = false;
        let mut round_best: Option<(f64, Vec<f64>)> = None;
        for d in &dirs {
            let probe: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + scale * di).collect();
            let probe = region.project(&probe);
            let (v, _) = scalarized(models, f_center, r, &probe);
            evals += 1;
            if v < best_v && round_best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                round_best = Some((v, probe));
            }
        }
        if let Some((v, p)) = round_best {
            best_v = v;
            x = p;
            improved = true;
        }
        if !improved {
            scale *= 0.5;
        }
    }
    (best_v, x)
}

/// Finds the trial point by minimizing the scalarized objective over the
/// trust region.
///
/// The weights are `r_i = f_center_i - min (m_i over the ball)`, so `t` is
/// the fraction of ideal model decrease attained jointly; `t` always lands
/// in `[-1, 0]`. Starts are the region center, the per-objective ball
/// minimizers, and eight random feasible points; each start runs projected
/// subgradient descent followed by a deterministic polish, and the best
/// point wins. When every weight vanishes the center is returned with
/// `t = 0`.
pub fn pascoletti_serafini<R: Rng>(
    models: &ModelVector,
    region: &TrustRegion,
    f_center: &[f64],
    rng: &mut R,
) -> ScalarizationResult {
    let p = models.len();
    assert_eq!(p, f_center.len(), "one center value per objective");
    let n = region.center().len();
    let center = region.center().as_slice().to_vec();

    let mut seeds: Vec<Vec<f64>> = vec![center.clone()];
    let mut r = vec![0.0; p];
    for (i, model) in models.models().iter().enumerate() {
        let (xi, si) = min_quadratic_on_ball(model, region);
        r[i] = (f_center[i] - si).max(0.0);
        seeds.push(region.project(xi.as_slice()));
    }
    if r.iter().all(|&ri| ri <= WEIGHT_ZERO_TOL) {
        return ScalarizationResult {
            t: 0.0,
            x_plus: region.center().clone(),
            r,
        };
    }
    for _ in 0..8 {
        let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nrm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        let u: f64 = rng.gen_range(0.0f64..1.0);
        let seed: Vec<f64> = if nrm > 1e-12 {
            let s = region.radius() * u.powf(1.0 / n as f64) / nrm;
            center.iter().zip(&dir).map(|(c, d)| c + s * d).collect()
        } else {
            center.clone()
        };
        seeds.push(region.project(&seed));
    }

    let mut best_v = f64::INFINITY;
    let mut best_x = center.clone();
    for seed in seeds {
        let (v1, x1) =
            subgradient_descent(models.models(), f_center, &r, region, seed);
        let (v2, x2) = pattern_polish(models.models(), f_center, &r, region, x1);
        let (v, x) = if v2 <= v1 { (v2, x2) } else { (f64::INFINITY, vec![]) };
        if v < best_v {
            best_v = v;
            best_x = x;
        }
    }
    let mut t = best_v;
    if t < -1.0 - 1e-6 {
        log::warn!("scalarization level {t} fell below -1; clamping");
    }
    t = t.clamp(-1.0, 0.0);
    ScalarizationResult {
        t,
        x_plus: DecisionVector::new(best_x).expect("finite trial point"),
        r,
    }
}
