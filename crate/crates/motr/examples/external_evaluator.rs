//! Driving the solver with an out-of-process objective function.
//!
//! Objectives often live in another language or binary. The wire protocol
//! is one line per evaluation: the solver writes `c1 c2 ... cn` to the
//! child's stdin and reads `f1 f2 ... fp` back from its stdout; the child
//! stays alive for the whole run. This example spawns a Python child that
//! computes a two-objective quadratic trade-off, cross-checks the protocol
//! against an in-process implementation, then runs the solver through it.
//!
//! Run with `cargo run --release --example external_evaluator`.
//! Requires `python3` on PATH.

use motr::cli::ExternalEvaluator;
use motr::core::{BoxBounds, DecisionVector, Problem};
use motr::driver::{Solver, SolverConfig};

const CHILD: &str = r#"python3 -c '
import sys
for line in sys.stdin:
    x = [float(t) for t in line.split()]
    f1 = sum((c - 0.5) ** 2 for c in x)
    f2 = sum((c + 0.5) ** 2 for c in x)
    print(f1, f2, flush=True)
'"#;

fn in_process(x: &[f64]) -> [f64; 2] {
    [
        x.iter().map(|c| (c - 0.5).powi(2)).sum(),
        x.iter().map(|c| (c + 0.5).powi(2)).sum(),
    ]
}

fn main() {
    let bounds = BoxBounds::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
    let child = ExternalEvaluator::spawn(CHILD, 2, 2, bounds).unwrap();

    // Protocol round-trip: the child must agree with the local formula.
    for x in [[0.0, 0.0], [0.3, -0.7], [-1.0, 1.0]] {
        let f = child
            .evaluate(&DecisionVector::new(x.to_vec()).unwrap())
            .unwrap();
        let expected = in_process(&x);
        println!("x = {x:?} -> child {:?}, local {expected:?}", f.as_slice());
        assert!((f[0] - expected[0]).abs() < 1e-12);
        assert!((f[1] - expected[1]).abs() < 1e-12);
    }

    // The child is a Problem like any other; run the solver through it.
    let config = SolverConfig {
        eval_budget: 300,
        ..SolverConfig::default()
    };
    let result = Solver::new(&child, config).unwrap().run().unwrap();
    println!(
        "\nsolved through the child: {:?} after {} evaluations, {} archive points",
        result.termination,
        result.eval_count,
        result.archive.len()
    );
    // The trade-off set of the two bowls is the segment between their
    // minimizers, on which sqrt(f1) + sqrt(f2) equals the distance between
    // the minimizers (sqrt(2) here); off the segment the sum is larger.
    let excess = |f1: f64, f2: f64| f1.sqrt() + f2.sqrt() - 2f64.sqrt();
    let worst = result
        .archive
        .iter()
        .map(|e| excess(e.f[0], e.f[1]))
        .fold(f64::NEG_INFINITY, f64::max);
    println!("worst distance-sum excess over the archive: {worst:.4}");
    assert!(worst < 0.25, "archive strayed from the trade-off segment");
}
