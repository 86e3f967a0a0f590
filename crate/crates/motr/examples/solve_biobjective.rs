//! End-to-end biobjective solve.
//!
//! Runs the full solver on the fonseca benchmark from an off-center start
//! with a 500-evaluation budget, prints the per-iteration trace, and
//! checks the archive quality against the problem's known front.
//!
//! Run with `cargo run --release --example solve_biobjective`.

use motr::core::DecisionVector;
use motr::driver::{Solver, SolverConfig};
use motr::metrics::{front_sampler, gd};
use motr::problems;

fn main() {
    let problem = problems::by_name("fonseca").unwrap();
    let front = front_sampler(&problem).unwrap();

    let config = SolverConfig {
        x0: Some(DecisionVector::new(vec![0.1, -0.1, 0.1, -0.1]).unwrap()),
        eval_budget: 500,
        ..SolverConfig::default()
    };

    let result = Solver::new(&problem, config)
        .unwrap()
        .with_front(&front)
        .run()
        .unwrap();

    println!("k    delta     t        rho      accepted  |A|  evals  gd");
    for r in &result.records {
        println!(
            "{:<4} {:<9.4} {:<8.3} {:<8.3} {:<9} {:<4} {:<6} {:.5}",
            r.k,
            r.delta,
            r.t_plus,
            r.rho,
            r.accepted,
            r.archive_size,
            r.evals,
            r.gd.unwrap_or(f64::NAN)
        );
    }

    let final_gd = gd(
        &result
            .archive
            .iter()
            .map(|e| e.f.clone())
            .collect::<Vec<_>>(),
        &front,
    )
    .unwrap();
    println!(
        "\nterminated: {:?} after {} evaluations",
        result.termination, result.eval_count
    );
    println!(
        "archive: {} mutually nondominated points, gd = {final_gd:.5}",
        result.archive.len()
    );
    assert!(result.archive.len() >= 25);
    assert!(final_gd < 0.05);
}
