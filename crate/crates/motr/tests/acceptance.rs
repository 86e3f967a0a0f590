//! Acceptance checks for the solver stack: one criterion per shipped
//! guarantee. The target runs without the default harness so that every
//! criterion prints its own pass or fail line and a failure exits nonzero.

// Index loops below mirror the matrix algebra they check.
#![allow(clippy::needless_range_loop)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use motr::core::{
    Archive, ArchiveEntry, BoxBounds, DecisionVector, EvalError, ObjectiveVector, Problem,
};
use motr::driver::{Solver, SolverConfig};
use motr::metrics::{gd, hypervolume, FrontSample, HvReference};
use motr::problems;
use motr::subsolvers::{min_quadratic_on_ball, omega, pascoletti_serafini, TrustRegion};
use motr::surrogate::{fit_models, generate_sample_set, ModelVector, QuadraticModel};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<(), String>;

fn main() -> ExitCode {
    // Keep the output to exactly one line per criterion even when a check
    // panics somewhere inside the library.
    std::panic::set_hook(Box::new(|_| {}));
    let criteria: [(&str, Check); 11] = [
        (
            "criticality measure matches direction enumeration",
            criticality_oracle,
        ),
        (
            "ball-constrained minimizer matches grid search",
            ball_minimizer_oracle,
        ),
        (
            "scalarized step is feasible and matches grid search",
            scalarization_oracle,
        ),
        (
            "interpolation error shrinks at least quadratically",
            model_error_decay,
        ),
        (
            "interpolation recovers quadratic coefficients",
            coefficient_recovery,
        ),
        (
            "archive filtering matches pairwise brute force",
            archive_brute_force,
        ),
        (
            "hypervolume matches Monte Carlo and the hand case",
            hypervolume_oracle,
        ),
        (
            "biobjective run covers the front within budget",
            biobjective_end_to_end,
        ),
        (
            "three-objective run keeps hypervolume nondecreasing",
            dtlz2_end_to_end,
        ),
        (
            "identical objectives collapse onto the common minimizer",
            degenerate_collapse,
        ),
        (
            "equal manifests and seeds reproduce the iteration log",
            determinism,
        ),
    ];
    let mut failed = 0usize;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let check = *check;
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|payload| Err(panic_text(&payload)));
        match outcome {
            Ok(()) => println!("criterion {:2} ({name}): pass", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:2} ({name}): FAIL: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}

fn panic_text(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "panicked".to_string()
    }
}

fn ensure(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

fn dv(x: &[f64]) -> DecisionVector {
    DecisionVector::new(x.to_vec()).expect("finite coordinates")
}

fn ov(f: &[f64]) -> ObjectiveVector {
    ObjectiveVector::new(f.to_vec()).expect("finite values")
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Full lattice with `steps` points per axis over the given box.
fn lattice(lower: &[f64], upper: &[f64], steps: usize) -> Vec<Vec<f64>> {
    let n = lower.len();
    let mut points = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let point: Vec<f64> = (0..n)
            .map(|j| {
                lower[j] + (upper[j] - lower[j]) * (idx[j] as f64) / ((steps - 1) as f64)
            })
            .collect();
        points.push(point);
        let mut j = 0;
        loop {
            idx[j] += 1;
            if idx[j] < steps {
                break;
            }
            idx[j] = 0;
            j += 1;
            if j == n {
                break;
            }
        }
        if j == n {
            break;
        }
    }
    points
}

/// A quadratic kept in plain arrays so its values can be computed without
/// touching the model types under test.
struct RandomQuadratic {
    center: Vec<f64>,
    constant: f64,
    gradient: Vec<f64>,
    hessian: Vec<Vec<f64>>,
}

impl RandomQuadratic {
    fn sample(rng: &mut ChaCha8Rng, n: usize, grad_span: f64, hess_span: f64) -> Self {
        let center = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let constant = rng.gen_range(-1.0..1.0);
        let gradient = (0..n).map(|_| rng.gen_range(-grad_span..grad_span)).collect();
        let mut hessian = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in a..n {
                let v = rng.gen_range(-hess_span..hess_span);
                hessian[a][b] = v;
                hessian[b][a] = v;
            }
        }
        Self {
            center,
            constant,
            gradient,
            hessian,
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = self.center.len();
        let mut v = self.constant;
        for i in 0..n {
            let di = x[i] - self.center[i];
            v += self.gradient[i] * di;
            for j in 0..n {
                v += 0.5 * di * self.hessian[i][j] * (x[j] - self.center[j]);
            }
        }
        v
    }

    fn model(&self) -> QuadraticModel {
        let n = self.center.len();
        QuadraticModel::new(
            self.center.clone(),
            self.constant,
            DVector::from_vec(self.gradient.clone()),
            DMatrix::from_fn(n, n, |i, j| self.hessian[i][j]),
        )
    }

    fn min_eigenvalue(&self) -> f64 {
        match self.center.len() {
            1 => self.hessian[0][0],
            2 => {
                let a = self.hessian[0][0];
                let b = self.hessian[1][1];
                let c = self.hessian[0][1];
                0.5 * (a + b - ((a - b).powi(2) + 4.0 * c * c).sqrt())
            }
            _ => f64::NAN,
        }
    }
}

fn unit_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        2 => (0..count)
            .map(|i| {
                let theta = 2.0 * std::f64::consts::PI * (i as f64) / (count as f64);
                vec![theta.cos(), theta.sin()]
            })
            .collect(),
        3 => {
            // Fibonacci sphere: near-uniform covering of the unit sphere.
            let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * ((i as f64) + 0.5) / (count as f64);
                    let r = (1.0 - z * z).sqrt();
                    let phi = 2.0 * std::f64::consts::PI * (i as f64) / golden;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => unreachable!("directions are only needed for two or three variables"),
    }
}

/// The criticality measure equals brute-force minimization of the worst
/// directional derivative over ten thousand unit directions, within 2e-2,
/// across one hundred random gradient sets, in under five seconds.
fn criticality_oracle() -> Result<(), String> {
    let start = Instant::now();
    let directions_2d = unit_directions(2, 10_000);
    let directions_3d = unit_directions(3, 10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC01);
    for case in 0..100 {
        let p = 2 + (case % 2);
        let n = 2 + ((case / 2) % 2);
        let gradients: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let measured = omega(&gradients).omega;
        let directions = if n == 2 { &directions_2d } else { &directions_3d };
        let mut best = f64::INFINITY;
        for d in directions {
            let worst = gradients
                .iter()
                .map(|g| g.iter().zip(d).map(|(a, b)| a * b).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            best = best.min(worst);
        }
        let oracle = (-best).max(0.0);
        ensure((measured - oracle).abs() <= 2e-2, || {
            format!("case {case}: measure {measured} vs enumeration {oracle}")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))
}

/// Grid minimum over the ball, sharpened by local refinement so the
/// oracle's own resolution error sits far below the comparison tolerance.
///
/// An indefinite quadratic can have two boundary basins whose coarse-grid
/// values tie to within the grid resolution, so refinement starts from
/// several well-separated coarse candidates, not just the single best one.
fn ball_grid_min(q: &RandomQuadratic, center: &[f64], radius: f64) -> f64 {
    let lower: Vec<f64> = center.iter().map(|c| c - radius).collect();
    let upper: Vec<f64> = center.iter().map(|c| c + radius).collect();
    let mut coarse: Vec<(f64, Vec<f64>)> = lattice(&lower, &upper, 201)
        .into_iter()
        .filter(|point| euclid(point, center) <= radius)
        .map(|point| (q.value(&point), point))
        .collect();
    coarse.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    for (_, point) in &coarse {
        if seeds.iter().all(|s| euclid(s, point) > radius / 20.0) {
            seeds.push(point.clone());
            if seeds.len() == 6 {
                break;
            }
        }
    }
    let mut best_v = coarse[0].0;
    for seed in seeds {
        let mut best_x = seed;
        let mut half = radius / 50.0;
        for _ in 0..2 {
            let lower: Vec<f64> = best_x.iter().map(|c| c - half).collect();
            let upper: Vec<f64> = best_x.iter().map(|c| c + half).collect();
            let mut round_best = best_x.clone();
            let mut round_v = q.value(&best_x);
            for point in lattice(&lower, &upper, 41) {
                if euclid(&point, center) <= radius {
                    let v = q.value(&point);
                    if v < round_v {
                        round_v = v;
                        round_best = point;
                    }
                }
            }
            best_v = best_v.min(round_v);
            best_x = round_best;
            half /= 10.0;
        }
    }
    best_v
}

/// The ball-constrained quadratic minimizer matches a refined grid search
/// within 1e-3 in value on fifty random quadratics, many of them indefinite.
fn ball_minimizer_oracle() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC02);
    let mut indefinite = 0usize;
    for case in 0..50 {
        let n = 1 + (case % 2);
        let q = RandomQuadratic::sample(&mut rng, n, 2.0, 3.0);
        let radius = rng.gen_range(0.2..1.5);
        if q.min_eigenvalue() < 0.0 {
            indefinite += 1;
        }
        let region = TrustRegion::new(dv(&q.center), radius).map_err(|e| e.to_string())?;
        let (x, v) = min_quadratic_on_ball(&q.model(), &region);
        ensure(euclid(x.as_slice(), &q.center) <= radius + 1e-9, || {
            format!("case {case}: minimizer left the ball")
        })?;
        ensure((q.value(x.as_slice()) - v).abs() <= 1e-9 * (1.0 + v.abs()), || {
            format!("case {case}: reported value disagrees with the returned point")
        })?;
        let oracle = ball_grid_min(&q, &q.center, radius);
        ensure((v - oracle).abs() <= 1e-3, || {
            format!("case {case}: value {v} vs grid {oracle}")
        })?;
    }
    ensure(indefinite >= 10, || {
        format!("only {indefinite} indefinite Hessians were sampled")
    })
}

/// The scalarized step stays in the region, keeps its level in [-1, 0],
/// meets every constraint to 1e-8, and its level is no worse than a grid
/// search over the same region, on fifty random model pairs.
fn scalarization_oracle() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC03);
    let mut oracle_cases = 0usize;
    for case in 0..50 {
        let n = 1 + (case % 2);
        let shared: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let radius = rng.gen_range(0.3..1.2);
        let mut quads = Vec::new();
        let mut models = Vec::new();
        for _ in 0..2 {
            let mut q = RandomQuadratic::sample(&mut rng, n, 2.0, 2.0);
            q.center = shared.clone();
            models.push(q.model());
            quads.push(q);
        }
        let model_vec =
            ModelVector::from_models(dv(&shared), models).map_err(|e| e.to_string())?;
        let f_center: Vec<f64> = quads.iter().map(|q| q.constant).collect();
        let region = TrustRegion::new(dv(&shared), radius).map_err(|e| e.to_string())?;
        let res = pascoletti_serafini(&model_vec, &region, &f_center, &mut rng);
        ensure((-1.0..=0.0).contains(&res.t), || {
            format!("case {case}: level {t} outside [-1, 0]", t = res.t)
        })?;
        ensure(
            euclid(res.x_plus.as_slice(), &shared) <= radius + 1e-8,
            || format!("case {case}: step left the region"),
        )?;
        for i in 0..2 {
            let residual = f_center[i] - quads[i].value(res.x_plus.as_slice()) + res.t * res.r[i];
            ensure(residual >= -1e-8, || {
                format!("case {case}: constraint {i} residual {residual}")
            })?;
        }
        if res.r.iter().all(|&ri| ri <= 1e-9) {
            continue;
        }
        oracle_cases += 1;
        let lower: Vec<f64> = shared.iter().map(|c| c - radius).collect();
        let upper: Vec<f64> = shared.iter().map(|c| c + radius).collect();
        let mut oracle = f64::INFINITY;
        for point in lattice(&lower, &upper, 201) {
            if euclid(&point, &shared) > radius {
                continue;
            }
            let mut level = f64::NEG_INFINITY;
            let mut feasible = true;
            for i in 0..2 {
                let v = quads[i].value(&point);
                if res.r[i] > 1e-12 {
                    level = level.max((v - f_center[i]) / res.r[i]);
                } else if v - f_center[i] > 1e-10 {
                    feasible = false;
                }
            }
            if feasible {
                oracle = oracle.min(level);
            }
        }
        ensure(res.t <= oracle + 1e-3, || {
            format!("case {case}: level {t} vs grid {oracle}", t = res.t)
        })?;
    }
    ensure(oracle_cases >= 45, || {
        format!("only {oracle_cases} cases exercised the grid oracle")
    })
}

/// On a smooth three-objective benchmark, the worst interpolation error over
/// each trust region falls with radius at a log-log slope of at least 1.7.
fn model_error_decay() -> Result<(), String> {
    let spec = problems::by_name("dtlz2").ok_or("dtlz2 missing from the registry")?;
    let center = dv(&[0.4, 0.6, 0.3]);
    let deltas = [0.5, 0.25, 0.125, 0.0625];
    let mut logs = Vec::new();
    for &delta in &deltas {
        let sample =
            generate_sample_set(&center, delta, spec.bounds()).map_err(|e| e.to_string())?;
        let evals: Vec<ObjectiveVector> = sample
            .points()
            .iter()
            .map(|x| spec.evaluate(x))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let models = fit_models(&sample, &evals).map_err(|e| e.to_string())?;
        let lower: Vec<f64> = (0..3)
            .map(|j| (center[j] - delta).max(spec.bounds().lower()[j]))
            .collect();
        let upper: Vec<f64> = (0..3)
            .map(|j| (center[j] + delta).min(spec.bounds().upper()[j]))
            .collect();
        let mut worst: f64 = 0.0;
        for probe in lattice(&lower, &upper, 7) {
            if euclid(&probe, center.as_slice()) > delta {
                continue;
            }
            let truth = spec.evaluate(&dv(&probe)).map_err(|e| e.to_string())?;
            for (i, m) in models.models().iter().enumerate() {
                worst = worst.max((truth[i] - m.value_at(&probe)).abs());
            }
        }
        ensure(worst > 0.0, || "probe error is exactly zero".to_string())?;
        logs.push((delta.ln(), worst.ln()));
    }
    let slope = regression_slope(&logs);
    ensure(slope >= 1.7, || format!("log-log slope {slope:.3} is below 1.7"))
}

fn regression_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let var: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    cov / var
}

/// Fitting sample values taken from a known quadratic returns that quadratic:
/// every coefficient is recovered to 1e-8.
fn coefficient_recovery() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC05);
    for case in 0..25 {
        let n = 1 + (case % 3);
        let q = RandomQuadratic::sample(&mut rng, n, 2.0, 3.0);
        let radius = rng.gen_range(0.3..1.5);
        let bounds = BoxBounds::new(vec![-5.0; n], vec![5.0; n]).map_err(|e| e.to_string())?;
        let sample =
            generate_sample_set(&dv(&q.center), radius, &bounds).map_err(|e| e.to_string())?;
        let evals: Vec<ObjectiveVector> = sample
            .points()
            .iter()
            .map(|x| ov(&[q.value(x.as_slice())]))
            .collect();
        let fitted = fit_models(&sample, &evals).map_err(|e| e.to_string())?;
        let m = &fitted.models()[0];
        let mut err: f64 = (m.constant() - q.constant).abs();
        for i in 0..n {
            err = err.max((m.gradient()[i] - q.gradient[i]).abs());
            for j in 0..n {
                err = err.max((m.hessian()[(i, j)] - q.hessian[i][j]).abs());
            }
        }
        ensure(err <= 1e-8, || format!("case {case}: coefficient error {err:.3e}"))?;
    }
    Ok(())
}

/// Streaming insertion into the archive leaves exactly the points an
/// independent pairwise simulation keeps, across two hundred random sets
/// that include exact duplicates and lattice ties.
fn archive_brute_force() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC06);
    for case in 0..200 {
        let p = 2 + (case % 2);
        let count = 1 + rng.gen_range(0..50);
        let mut stream: Vec<Vec<f64>> = Vec::with_capacity(count);
        for i in 0..count {
            if i > 0 && rng.gen_bool(0.15) {
                let j = rng.gen_range(0..i);
                let copy = stream[j].clone();
                stream.push(copy);
            } else if rng.gen_bool(0.5) {
                stream.push(
                    (0..p)
                        .map(|_| f64::from(rng.gen_range(0u32..5)) * 0.25)
                        .collect(),
                );
            } else {
                stream.push((0..p).map(|_| rng.gen_range(0.0..1.0)).collect());
            }
        }
        let mut archive = Archive::new();
        for (i, f) in stream.iter().enumerate() {
            let entry =
                ArchiveEntry::new(dv(&[i as f64]), ov(f), 0.5, i).map_err(|e| e.to_string())?;
            archive.insert(entry).map_err(|e| e.to_string())?;
        }
        // Independent simulation of the same contract with plain loops: an
        // incumbent that is nowhere worse rejects the candidate; an accepted
        // candidate evicts everything it strictly dominates.
        let mut naive: Vec<(usize, Vec<f64>)> = Vec::new();
        'next: for (i, f) in stream.iter().enumerate() {
            for (_, kept) in &naive {
                if kept.iter().zip(f).all(|(a, b)| a <= b) {
                    continue 'next;
                }
            }
            naive.retain(|(_, kept)| {
                !(f.iter().zip(kept).all(|(a, b)| a <= b)
                    && f.iter().zip(kept).any(|(a, b)| a < b))
            });
            naive.push((i, f.clone()));
        }
        ensure(archive.len() == naive.len(), || {
            format!(
                "case {case}: {} archive entries vs {} expected",
                archive.len(),
                naive.len()
            )
        })?;
        for (entry, (i, f)) in archive.iter().zip(&naive) {
            ensure(
                entry.f.as_slice() == f.as_slice() && entry.birth_iteration == *i,
                || format!("case {case}: surviving set diverged"),
            )?;
        }
    }
    Ok(())
}

/// Exact low-dimensional hypervolume agrees with an independent million
/// sample Monte Carlo estimate within three standard errors on twenty random
/// fronts, and reproduces the hand-checked two-point case exactly.
fn hypervolume_oracle() -> Result<(), String> {
    let hand = hypervolume(
        &[ov(&[1.0, 2.0]), ov(&[2.0, 1.0])],
        &HvReference::new(ov(&[3.0, 3.0])),
    )
    .map_err(|e| e.to_string())?;
    ensure((hand.value - 3.0).abs() <= 1e-12, || {
        format!("hand case gave {v}, expected 3", v = hand.value)
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(0xAC07);
    for case in 0..20 {
        let p = 2 + (case % 2);
        let mut front: Vec<Vec<f64>> = Vec::new();
        'next: for _ in 0..40 {
            let f: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..1.0)).collect();
            for kept in &front {
                if kept.iter().zip(&f).all(|(a, b)| a <= b) {
                    continue 'next;
                }
            }
            front.retain(|kept| !f.iter().zip(kept).all(|(a, b)| a <= b));
            front.push(f);
        }
        let points: Vec<ObjectiveVector> = front.iter().map(|f| ov(f)).collect();
        let reference = HvReference::new(ov(&vec![1.2; p]));
        let exact = hypervolume(&points, &reference).map_err(|e| e.to_string())?;
        ensure(exact.standard_error.is_none(), || {
            "low-dimensional value should be exact".to_string()
        })?;
        let lower: Vec<f64> = (0..p)
            .map(|j| front.iter().map(|f| f[j]).fold(f64::INFINITY, f64::min))
            .collect();
        let volume: f64 = lower.iter().map(|l| 1.2 - l).product();
        let samples = 1_000_000usize;
        let mut hits = 0usize;
        let mut u = vec![0.0; p];
        for _ in 0..samples {
            for (slot, &l) in u.iter_mut().zip(&lower) {
                *slot = rng.gen_range(l..1.2);
            }
            if front
                .iter()
                .any(|f| f.iter().zip(&u).all(|(a, b)| a <= b))
            {
                hits += 1;
            }
        }
        let fraction = hits as f64 / samples as f64;
        let estimate = fraction * volume;
        let se = volume * (fraction * (1.0 - fraction) / samples as f64).sqrt();
        ensure((exact.value - estimate).abs() <= 3.0 * se.max(1e-12), || {
            format!(
                "case {case}: exact {v} vs Monte Carlo {estimate} (3 se = {bound:.3e})",
                v = exact.value,
                bound = 3.0 * se
            )
        })?;
    }
    Ok(())
}

/// A 500-evaluation biobjective run yields at least 25 mutually
/// nondominated points with generational distance under 0.05 against a
/// thousand-point front sample, in under thirty seconds.
fn biobjective_end_to_end() -> Result<(), String> {
    let start = Instant::now();
    let spec = problems::by_name("fonseca").ok_or("fonseca missing from the registry")?;
    let front_points = spec
        .front_points(1000)
        .ok_or("fonseca should expose a front sample")?;
    ensure(front_points.len() >= 1000, || {
        format!("front sample holds only {} points", front_points.len())
    })?;
    let front = FrontSample::new(front_points).map_err(|e| e.to_string())?;
    let config = SolverConfig {
        x0: Some(dv(&[0.1, -0.1, 0.1, -0.1])),
        eval_budget: 500,
        ..SolverConfig::default()
    };
    let result = Solver::new(&spec, config)
        .map_err(|e| e.to_string())?
        .with_front(&front)
        .run()
        .map_err(|e| e.to_string())?;
    ensure(result.eval_count <= 500, || {
        format!("budget overrun: {} evaluations", result.eval_count)
    })?;
    let objectives: Vec<&[f64]> = result.archive.iter().map(|e| e.f.as_slice()).collect();
    for i in 0..objectives.len() {
        for j in 0..objectives.len() {
            if i != j {
                ensure(
                    !objectives[i].iter().zip(objectives[j]).all(|(a, b)| a <= b),
                    || format!("entries {i} and {j} are not mutually nondominated"),
                )?;
            }
        }
    }
    ensure(result.archive.len() >= 25, || {
        format!("archive holds only {} points", result.archive.len())
    })?;
    let produced: Vec<ObjectiveVector> = result.archive.iter().map(|e| e.f.clone()).collect();
    let distance = gd(&produced, &front).map_err(|e| e.to_string())?;
    ensure(distance < 0.05, || format!("generational distance {distance}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))
}

/// A three-objective run with a 3000-evaluation budget logs a generational
/// distance that ends under 0.05 and a hypervolume, against the reference
/// fixed at the first iteration, that never decreases; the archive ends with
/// at least thirty points.
fn dtlz2_end_to_end() -> Result<(), String> {
    let spec = problems::by_name("dtlz2").ok_or("dtlz2 missing from the registry")?;
    let front = FrontSample::new(
        spec.front_points(1000)
            .ok_or("dtlz2 should expose a front sample")?,
    )
    .map_err(|e| e.to_string())?;
    let config = SolverConfig {
        x0: Some(dv(&[0.5, 0.5, 0.5])),
        expand_factor: 5.0,
        eval_budget: 3000,
        ..SolverConfig::default()
    };
    let result = Solver::new(&spec, config)
        .map_err(|e| e.to_string())?
        .with_front(&front)
        .run()
        .map_err(|e| e.to_string())?;
    ensure(!result.records.is_empty(), || "no iterations were logged".to_string())?;
    let mut previous = f64::NEG_INFINITY;
    for record in &result.records {
        record
            .gd
            .ok_or("generational distance missing from a record")?;
        let hv = record.hv.ok_or("hypervolume missing from a record")?;
        ensure(hv >= previous - 1e-12, || {
            format!(
                "hypervolume fell from {previous} to {hv} at iteration {k}",
                k = record.k
            )
        })?;
        previous = hv;
    }
    let final_gd = result
        .records
        .last()
        .and_then(|r| r.gd)
        .ok_or("final generational distance missing")?;
    ensure(final_gd < 0.05, || {
        format!("final generational distance {final_gd}")
    })?;
    ensure(result.archive.len() >= 30, || {
        format!("archive holds only {} points", result.archive.len())
    })
}

/// Two identical objectives: every point is comparable, so the front is the
/// single common minimizer.
struct SharedBowl {
    bounds: BoxBounds,
    target: Vec<f64>,
}

impl Problem for SharedBowl {
    fn decision_dim(&self) -> usize {
        self.bounds.dim()
    }

    fn objective_dim(&self) -> usize {
        2
    }

    fn bounds(&self) -> &BoxBounds {
        &self.bounds
    }

    fn evaluate(&self, x: &DecisionVector) -> Result<ObjectiveVector, EvalError> {
        let v: f64 = x
            .as_slice()
            .iter()
            .zip(&self.target)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        ObjectiveVector::new(vec![v, v]).map_err(|e| EvalError::Failed(e.to_string()))
    }
}

/// When both objectives are the same squared distance, the run collapses the
/// archive onto the minimizer: the surviving point sits within 0.1 of the
/// target and freshly fitted models there have criticality at most 0.1.
fn degenerate_collapse() -> Result<(), String> {
    let target = vec![0.3, -0.7];
    let problem = SharedBowl {
        bounds: BoxBounds::new(vec![-2.0, -2.0], vec![2.0, 2.0]).map_err(|e| e.to_string())?,
        target: target.clone(),
    };
    let result = Solver::new(&problem, SolverConfig::default())
        .map_err(|e| e.to_string())?
        .run()
        .map_err(|e| e.to_string())?;
    ensure(result.archive.len() == 1, || {
        format!(
            "archive holds {} points, expected the single minimizer",
            result.archive.len()
        )
    })?;
    for entry in result.archive.iter() {
        let distance = euclid(entry.x.as_slice(), &target);
        ensure(distance <= 0.1, || {
            format!("archive point sits {distance:.4} away from the minimizer")
        })?;
    }
    let best = result.archive.entry(0);
    let sample =
        generate_sample_set(&best.x, 0.05, problem.bounds()).map_err(|e| e.to_string())?;
    let evals: Vec<ObjectiveVector> = sample
        .points()
        .iter()
        .map(|x| problem.evaluate(x))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let models = fit_models(&sample, &evals).map_err(|e| e.to_string())?;
    let measure = omega(&models.gradients_at_center()).omega;
    ensure(measure <= 0.1, || {
        format!("criticality measure {measure} at the final point")
    })
}

/// Solving the same manifest twice through the installed binary produces
/// byte-identical iteration logs.
fn determinism() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest_path = dir.path().join("run.manifest");
    std::fs::write(
        &manifest_path,
        "problem = dtlz2\nsolver.eval_budget = 300\nsolver.max_iterations = 20\nsolver.seed = 42\n",
    )
    .map_err(|e| e.to_string())?;
    let exe = env!("CARGO_BIN_EXE_motr");
    let mut logs = Vec::new();
    for name in ["first", "second"] {
        let out = dir.path().join(name);
        let output = Command::new(exe)
            .arg("solve")
            .arg("--manifest")
            .arg(&manifest_path)
            .arg("--out")
            .arg(&out)
            .env("MOTR_LOG", "quiet")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(output.status.success(), || {
            format!("solve failed: {}", String::from_utf8_lossy(&output.stderr))
        })?;
        logs.push(std::fs::read(out.join("iterations.jsonl")).map_err(|e| e.to_string())?);
    }
    ensure(!logs[0].is_empty(), || "iteration log is empty".to_string())?;
    ensure(logs[0] == logs[1], || {
        "iteration logs differ between identical runs".to_string()
    })
}
