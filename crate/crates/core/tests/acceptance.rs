//! Acceptance battery: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always shown. Each
//! criterion runs the matching verification suite. The thresholds the
//! suites use are pinned here against the required values, so loosening a
//! constant in the library fails this test.

use std::time::{Duration, Instant};

use strip_poisson::verify::{self, tol, Check, Suite};

struct Criterion {
    number: u32,
    title: &'static str,
    suite: Suite,
    budget: Duration,
}

const CRITERIA: [Criterion; 9] = [
    Criterion { number: 1, title: "polynomial-class table", suite: Suite::Table1, budget: Duration::from_secs(60) },
    Criterion { number: 2, title: "Green-function identities", suite: Suite::Green, budget: Duration::from_secs(60) },
    Criterion { number: 3, title: "manufactured-solution convergence", suite: Suite::Manufactured, budget: Duration::from_secs(10) },
    Criterion { number: 4, title: "per-mode vs Green quadrature", suite: Suite::SolverEquivalence, budget: Duration::from_secs(120) },
    Criterion { number: 5, title: "moment/growth dichotomy", suite: Suite::Dichotomy, budget: Duration::from_secs(60) },
    Criterion { number: 6, title: "half-strip and jump-lift pipeline", suite: Suite::Constructive, budget: Duration::from_secs(60) },
    Criterion { number: 7, title: "Hardy and Poincare-Wirtinger batches", suite: Suite::Inequalities, budget: Duration::from_secs(120) },
    Criterion { number: 8, title: "kernel characterization", suite: Suite::Kernel, budget: Duration::from_secs(60) },
    Criterion { number: 9, title: "norm-ratio boundedness", suite: Suite::NormRatio, budget: Duration::from_secs(120) },
];

fn thresholds_are_pinned() {
    assert_eq!(tol::SERIES_VS_CLOSED, 1e-12);
    assert_eq!(tol::DELTA_REPRODUCTION, 1e-4);
    assert_eq!(tol::GREEN_DECAY_RATE, 0.01);
    assert_eq!(tol::EVENNESS, 1e-14);
    assert_eq!(tol::MANUFACTURED, 1e-6);
    assert_eq!(tol::MANUFACTURED_RATIO, 8.0);
    assert_eq!(tol::MANUFACTURED_FLOOR, 1e-10);
    assert_eq!(tol::METHOD_EQUIVALENCE, 1e-5);
    assert_eq!(tol::GROWTH_SLOPE, 0.02);
    assert_eq!(tol::FLAT_SLOPE, 1e-3);
    assert_eq!(tol::DECAY_RATE_SLACK, 0.05);
    assert_eq!(tol::JUMP_MEAN_CANCELLATION, 1e-6);
    assert_eq!(tol::CONSTRUCTIVE, 1e-4);
    assert_eq!(tol::KERNEL_RESIDUAL, 1e-10);
    assert_eq!(tol::NORM_RATIO_SPREAD, 1e3);
    assert_eq!(tol::NORM_RATIO_REFINEMENT, 0.05);
    assert_eq!(verify::POLY_CLASS_TABLE, [[1, 0, -1, -1], [2, 1, 0, -1], [3, 2, 1, 0]]);
}

fn expected_check_count(suite: Suite) -> usize {
    match suite {
        Suite::Table1 => 12,
        Suite::Green => 6,
        Suite::Manufactured => 2,
        Suite::SolverEquivalence => 5,
        Suite::Dichotomy => 3,
        Suite::Constructive => 3,
        Suite::Inequalities => 7,
        Suite::Kernel => 3,
        Suite::NormRatio => 2,
        Suite::All => unreachable!(),
    }
}

fn main() {
    thresholds_are_pinned();
    println!("PASS thresholds pinned");
    let mut failures = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let checks: Vec<Check> = verify::run_suite(c.suite);
        let elapsed = start.elapsed();
        let complete = checks.len() == expected_check_count(c.suite);
        let passed = complete && checks.iter().all(|k| k.passed) && elapsed <= c.budget;
        println!(
            "{} criterion {} ({}): {}/{} checks, {:.1} s of {} s",
            if passed { "PASS" } else { "FAIL" },
            c.number,
            c.title,
            checks.iter().filter(|k| k.passed).count(),
            checks.len(),
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
        for k in &checks {
            println!("    {k}");
        }
        if !passed {
            failures.push(c.number);
        }
    }
    if !failures.is_empty() {
        eprintln!("failed criteria: {failures:?}");
        std::process::exit(1);
    }
    println!("acceptance: 9/9 criteria passed");
}
