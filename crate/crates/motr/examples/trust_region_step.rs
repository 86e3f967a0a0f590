//! The three trust-region subproblems behind one solver step.
//!
//! Builds two hand-made quadratic models, then runs the machinery the
//! driver uses at each iteration: the criticality measure (how far from
//! Pareto-critical the models look), the exact single-objective minimum on
//! the trust-region ball, and the scalarized trial step that trades off
//! both objectives at once.
//!
//! Run with `cargo run --example trust_region_step`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use motr::core::{BoxBounds, DecisionVector};
use motr::subsolvers::{min_quadratic_on_ball, omega, pascoletti_serafini, TrustRegion};
use motr::surrogate::{ModelVector, QuadraticModel};

fn main() {
    let center = vec![0.2, -0.1];
    // Two bowls with minimizers on opposite sides of the center: a genuine
    // trade-off, so no direction decreases both objectives at full rate.
    let m1 = QuadraticModel::new(
        center.clone(),
        1.0,
        DVector::from_vec(vec![1.0, 0.2]),
        DMatrix::identity(2, 2) * 2.0,
    );
    let m2 = QuadraticModel::new(
        center.clone(),
        1.5,
        DVector::from_vec(vec![-0.8, 0.1]),
        DMatrix::identity(2, 2) * 2.0,
    );

    // Criticality: derived from the shortest convex combination of the
    // model gradients. Zero would mean Pareto-critical models.
    let gradients = vec![vec![1.0, 0.2], vec![-0.8, 0.1]];
    let crit = omega(&gradients);
    println!(
        "criticality omega = {:.4} at weights {:?}",
        crit.omega,
        crit.alpha
            .iter()
            .map(|a| (a * 1e4).round() / 1e4)
            .collect::<Vec<_>>()
    );

    let bounds = BoxBounds::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
    let region = TrustRegion::fitted(
        DecisionVector::new(center.clone()).unwrap(),
        0.5,
        bounds,
    )
    .unwrap();

    // Each objective alone: exact minimum of a quadratic on the ball.
    let (x1, v1) = min_quadratic_on_ball(&m1, &region);
    let (x2, v2) = min_quadratic_on_ball(&m2, &region);
    println!("objective 1 ball minimum {v1:.4} at {:?}", x1.as_slice());
    println!("objective 2 ball minimum {v2:.4} at {:?}", x2.as_slice());

    // The scalarized step: pushes both objectives below their center
    // values as far as the worse of the two allows. t = -1 would reach
    // both individual minima simultaneously; t = 0 means no joint descent.
    let models = ModelVector::from_models(
        DecisionVector::new(center.clone()).unwrap(),
        vec![m1.clone(), m2.clone()],
    )
    .unwrap();
    let f_center = vec![m1.value_at(&center), m2.value_at(&center)];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let step = pascoletti_serafini(&models, &region, &f_center, &mut rng);
    println!(
        "scalarized step: t = {:.4}, trial point {:?}",
        step.t,
        step.x_plus.as_slice()
    );
    for (i, (model, fc)) in models.models().iter().zip(&f_center).enumerate() {
        println!(
            "  objective {}: center {fc:.4} -> model at trial {:.4}",
            i + 1,
            model.value_at(step.x_plus.as_slice())
        );
    }
    assert!((-1.0..=0.0).contains(&step.t));
    assert!(step.t < 0.0, "a genuine trade-off still admits joint descent");
}
