//! Property tests for the invariants of the library.

use std::f64::consts::PI;

use proptest::prelude::*;
use strip_poisson::diagnostics::{
    hardy_check, poincare_wirtinger_check, quotient_norm, residual, weighted_norm,
};
use strip_poisson::green::{green_closed, green_series, green_split, mode_kernel};
use strip_poisson::mft::{horizontal_inverse, horizontal_refine, horizontal_transform};
use strip_poisson::solver::{solve_per_mode, MomentPolicy, SolveOptions};
use strip_poisson::weightspaces::{compute_q, monomial_in_space};
use strip_poisson::stripfield::Direction;
use strip_poisson::{DecayClass, PolyElement, StripField, StripGrid, WeightFunction, WeightSpec};

/// Exponents at least 0.1 away from every half-integer.
fn generic_alpha() -> impl Strategy<Value = f64> {
    (-3i32..3, 0.1f64..0.9).prop_map(|(i, t)| i as f64 + 0.5 + t)
}

/// A smooth field built from a few horizontal modes times Gaussians.
#[derive(Debug, Clone)]
struct Blob {
    k: i64,
    amp: f64,
    phase: f64,
    centre: f64,
    width: f64,
}

fn blob() -> impl Strategy<Value = Blob> {
    (0i64..4, -1.0f64..1.0, 0.0f64..(2.0 * PI), -1.5f64..1.5, 0.5f64..1.2).prop_map(
        |(k, amp, phase, centre, width)| Blob { k, amp, phase, centre, width },
    )
}

fn field(grid: &StripGrid, blobs: &[Blob]) -> StripField {
    StripField::from_fn(grid, DecayClass::Schwartz, |y1, y2| {
        blobs
            .iter()
            .map(|b| {
                let t = (y2 - b.centre) / b.width;
                b.amp * (2.0 * PI * b.k as f64 * y1 + b.phase).cos() * (-t * t).exp()
            })
            .sum()
    })
}

fn small_grid() -> StripGrid {
    StripGrid::new(8, 6.0, 241).unwrap()
}

fn max_diff(a: &StripField, b: &StripField) -> f64 {
    a.values
        .iter()
        .zip(b.values.iter())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_shifts_with_order(m in 0i64..4, alpha in -3.0f64..3.0) {
        prop_assert_eq!(compute_q(m + 1, alpha), compute_q(m, alpha) + 1);
    }

    #[test]
    fn q_shifts_with_generic_weight(m in 0i64..4, alpha in generic_alpha()) {
        prop_assert_eq!(compute_q(m, alpha + 1.0), compute_q(m, alpha) - 1);
    }

    #[test]
    fn q_matches_monomial_membership(m in 0u32..3, alpha in generic_alpha(), d in 0u32..5) {
        let q = compute_q(m as i64, alpha);
        let inside = monomial_in_space(&WeightSpec::new(m, alpha), d);
        prop_assert_eq!(inside, (d as i64) <= q, "m = {}, alpha = {}, d = {}, q = {}", m, alpha, d, q);
    }

    #[test]
    fn green_is_periodic_and_even(y1 in -2.0f64..2.0, y2 in 0.05f64..30.0, shift in -3i32..3) {
        let g = green_closed(y1, y2).unwrap().value;
        let scale = g.abs().max(1.0);
        let periodic = green_closed(y1 + shift as f64, y2).unwrap().value;
        prop_assert!((periodic - g).abs() <= 1e-12 * scale);
        prop_assert!((green_closed(-y1, y2).unwrap().value - g).abs() <= 1e-14 * scale);
        prop_assert!((green_closed(y1, -y2).unwrap().value - g).abs() <= 1e-14 * scale);
    }

    #[test]
    fn green_split_sums_to_closed_form(y1 in 0.0f64..1.0, y2 in 0.05f64..19.0) {
        let (g0, g1) = green_split(y1, y2).unwrap();
        let g = green_closed(y1, y2).unwrap().value;
        prop_assert!((g0 + g1 - g).abs() <= 1e-13 * g.abs().max(1.0));
    }

    #[test]
    fn green_series_matches_closed_form(y1 in 0.0f64..1.0, y2 in 0.25f64..4.0) {
        let s = green_series(y1, y2, 20).unwrap();
        let g = green_closed(y1, y2).unwrap().value;
        prop_assert!((s - g).abs() <= 1e-12 * g.abs().max(1.0));
    }

    #[test]
    fn mode_kernel_is_even_positive_decreasing(k in 1i64..16, t in 0.0f64..3.0, dt in 0.01f64..1.0) {
        let a = mode_kernel(k, t).unwrap();
        prop_assert!(a > 0.0);
        prop_assert_eq!(a, mode_kernel(-k, -t).unwrap());
        prop_assert!(mode_kernel(k, t + dt).unwrap() < a);
    }

    #[test]
    fn decay_differentiation_composes(a in -6.0f64..2.0, p in 0u32..3, r in 0u32..3) {
        for c in [DecayClass::Schwartz, DecayClass::Poly(a), DecayClass::PolyPlusLinear] {
            let two_steps = c.differentiated(p).differentiated(r);
            let one_step = c.differentiated(p + r);
            match (two_steps.exponent(), one_step.exponent()) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-12),
                (x, y) => prop_assert_eq!(x, y),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_round_trip_and_conjugate_symmetry(blobs in prop::collection::vec(blob(), 1..4)) {
        let f = field(&small_grid(), &blobs);
        let modes = horizontal_transform(&f);
        prop_assert!(modes.conjugate_asymmetry() <= 1e-12 * f.max_abs().max(1e-300));
        let back = horizontal_inverse(&modes).unwrap();
        prop_assert!(max_diff(&back, &f) <= 1e-13 * f.max_abs().max(1.0));
    }

    #[test]
    fn refinement_keeps_coarse_samples(blobs in prop::collection::vec(blob(), 1..4), log_factor in 0u32..3) {
        let factor = 1usize << log_factor;
        let f = field(&small_grid(), &blobs);
        let n1 = f.grid.n1;
        let fine = horizontal_refine(&f, n1 * factor).unwrap();
        let mut worst = 0.0f64;
        for i in 0..n1 {
            for j in 0..f.grid.n2 {
                worst = worst.max((fine.values[[i * factor, j]] - f.values[[i, j]]).abs());
            }
        }
        prop_assert!(worst <= 1e-13 * f.max_abs().max(1.0));
    }

    #[test]
    fn table_round_trip_is_bit_exact(bits in prop::collection::vec(any::<u64>(), 8 * 9)) {
        let grid = StripGrid::new(8, 2.0, 9).unwrap();
        let f = StripField::from_fn(&grid, DecayClass::Schwartz, |_, _| 0.0);
        let mut f = f;
        for (v, b) in f.values.iter_mut().zip(bits) {
            let x = f64::from_bits(b);
            *v = if x.is_finite() { x } else { 0.0 };
        }
        let g = StripField::from_table(&grid, &f.to_table(), DecayClass::Schwartz).unwrap();
        for (a, b) in f.values.iter().zip(g.values.iter()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn solver_is_linear_and_deterministic(
        fa in prop::collection::vec(blob(), 1..3),
        fb in prop::collection::vec(blob(), 1..3),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let grid = small_grid();
        let opts = SolveOptions::with_policy(MomentPolicy::AllowGrowth);
        let (f, g) = (field(&grid, &fa), field(&grid, &fb));
        let combo = f.scale(a).add(&g.scale(b));
        let uf = solve_per_mode(&f, &opts).unwrap().u;
        let ug = solve_per_mode(&g, &opts).unwrap().u;
        let uc = solve_per_mode(&combo, &opts).unwrap();
        let expected = uf.scale(a).add(&ug.scale(b));
        let scale = expected.max_abs().max(uc.u.max_abs()).max(1.0);
        prop_assert!(max_diff(&uc.u, &expected) <= 1e-10 * scale);
        let again = solve_per_mode(&combo, &opts).unwrap();
        prop_assert!(uc.u.values.iter().zip(again.u.values.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn solution_satisfies_the_equation(blobs in prop::collection::vec(blob(), 1..4)) {
        let grid = StripGrid::new(8, 8.0, 641).unwrap();
        let f = field(&grid, &blobs);
        let opts = SolveOptions::with_policy(MomentPolicy::AllowGrowth);
        let report = solve_per_mode(&f, &opts).unwrap();
        prop_assert!(residual(&report.raw(), &f) <= 1e-4, "residual {}", residual(&report.raw(), &f));
    }

    #[test]
    fn quotient_norm_ignores_linear_polynomials(
        blobs in prop::collection::vec(blob(), 1..3),
        c0 in -3.0f64..3.0,
        c1 in -3.0f64..3.0,
    ) {
        let grid = small_grid();
        let u = field(&grid, &blobs);
        let p = PolyElement::new(vec![c0, c1]);
        // the declared class describes the field modulo span{1, y₂}
        let shifted = u.add(&p.sample(&grid)).with_decay(DecayClass::Schwartz);
        let spec = WeightSpec::new(2, 1.0);
        let base = quotient_norm(&u, &spec, 1).unwrap();
        let moved = quotient_norm(&shifted, &spec, 1).unwrap();
        prop_assert!((base.value - moved.value).abs() <= 1e-8 * base.value.max(1e-3));
        let sum = moved.argmin.add(&p);
        for y in [-2.0, 0.0, 3.0] {
            prop_assert!((sum.eval(y) - base.argmin.eval(y)).abs() <= 1e-8 * (1.0 + c0.abs() + c1.abs()));
        }
    }

    #[test]
    fn norms_embed_into_lower_order(blobs in prop::collection::vec(blob(), 1..4), m in 1u32..3, alpha in generic_alpha()) {
        let u = field(&small_grid(), &blobs);
        let high = weighted_norm(&u, &WeightSpec::new(m, alpha)).unwrap().value;
        let low = weighted_norm(&u, &WeightSpec::new(m - 1, alpha - 1.0)).unwrap().value;
        prop_assert!(low <= high * (1.0 + 1e-12));
    }

    #[test]
    fn poincare_wirtinger_holds(blobs in prop::collection::vec(blob(), 1..4), alpha in -1.0f64..1.0) {
        let u = field(&StripGrid::new(16, 6.0, 241).unwrap(), &blobs);
        let c = poincare_wirtinger_check(&u, alpha).unwrap();
        let scale = c.rhs.max(1e-12);
        prop_assert!(c.lhs <= c.d1_only / (2.0 * PI) * (1.0 + 1e-6) + 1e-12 * scale);
        prop_assert!(c.d1_only <= c.rhs * (1.0 + 1e-12));
    }

    #[test]
    fn hardy_holds(
        amps in prop::collection::vec(-1.0f64..1.0, 1..4),
        beta in prop_oneof![Just(-2.0), Just(0.0), Just(1.0), Just(-1.0), -0.8f64..3.0],
    ) {
        let (r, step, n) = (2.0, 0.005, 1201);
        let span = step * (n - 1) as f64;
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let s = i as f64 * step / span;
                let bump = (s * (1.0 - s)).powi(3);
                bump * amps.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * PI * s).sin()).sum::<f64>()
            })
            .collect();
        let c = hardy_check(&samples, step, beta, r).unwrap();
        prop_assert!(c.lhs <= c.rhs * (1.0 + 1e-9) + 1e-300);
    }

    #[test]
    fn mean_free_sources_have_uniform_h2_bound(blobs in prop::collection::vec(blob(), 1..4)) {
        let grid = StripGrid::new(16, 8.0, 641).unwrap();
        let blobs: Vec<Blob> = blobs.into_iter().map(|b| Blob { k: b.k.max(1), ..b }).collect();
        let f = field(&grid, &blobs);
        let u = solve_per_mode(&f, &SolveOptions::default()).unwrap().u;
        let flat = WeightFunction::power(0.0);
        let sq = |g: &StripField| g.product(g).integrate(&flat).unwrap().value;
        let d1 = u.differentiate(Direction::Y1, 1);
        let d2 = u.differentiate(Direction::Y2, 1);
        let h2 = sq(&u)
            + sq(&d1)
            + sq(&d2)
            + sq(&d1.differentiate(Direction::Y1, 1))
            + 2.0 * sq(&d1.differentiate(Direction::Y2, 1))
            + sq(&d2.differentiate(Direction::Y2, 1));
        let f2 = sq(&f);
        prop_assume!(f2 > 1e-12);
        // every nonzero mode has |ξ| ≥ 2π, so the symbol bound is explicit
        let c2 = 1.0 + 1.0 / (4.0 * PI * PI) + 1.0 / (16.0 * PI.powi(4));
        prop_assert!(h2 <= c2 * f2 * (1.0 + 1e-3), "ratio {}", (h2 / f2).sqrt());
    }
}
