//! Derivative-free multiobjective trust-region solver with density-guided
//! reference selection.
//!
//! The solver approximates the Pareto front of a box-constrained
//! multiobjective problem using only objective values, no derivatives. It
//! keeps a nondominated archive, repeatedly picks the archive point whose
//! neighborhood on the front is emptiest (the density argmin), builds local
//! quadratic interpolation models around it, and takes a scalarized
//! trust-region step from there. Accepted points join the archive; the
//! trust radii follow a classical success/failure schedule. Driving the
//! search from low-density references is what spreads the archive evenly
//! along the front instead of clustering it.
//!
//! Module map:
//!
//! - [`core`]: decision/objective vectors, box bounds, Pareto dominance,
//!   the nondominated [`core::Archive`], and the budget-capped evaluation
//!   cache.
//! - [`geometry`]: influence functions, density over the archive's
//!   projection hyperplane, and reference selection.
//! - [`surrogate`]: poised interpolation sets and quadratic model fitting.
//! - [`subsolvers`]: the criticality measure, exact quadratic minimization
//!   on a ball, and the scalarized trial-step subproblem.
//! - [`driver`]: the main loop tying the above together behind
//!   [`driver::Solver`] and [`driver::SolverConfig`].
//! - [`problems`]: built-in benchmark problems with known front samplers.
//! - [`metrics`]: generational distance and dominated hypervolume.
//! - [`cli`]: manifest-driven command line with run artifacts and an
//!   external evaluator protocol.
//!
//! # Example
//!
//! ```
//! use motr::driver::{Solver, SolverConfig};
//! use motr::problems;
//!
//! let problem = problems::by_name("dtlz2").unwrap();
//! let mut config = SolverConfig::default();
//! config.eval_budget = 200;
//! config.max_iterations = 10;
//! let result = Solver::new(&problem, config).unwrap().run().unwrap();
//! assert!(result.archive.len() >= 1);
//! ```

pub mod cli;
pub mod core;
pub mod driver;
pub mod geometry;
pub mod metrics;
pub mod problems;
pub mod subsolvers;
pub mod surrogate;
