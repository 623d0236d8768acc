//! Integration checks for the shifted orthogonal-basis layer: weighted
//! orthogonality against quadrature, independent norm oracles via
//! double-exponential integration, endpoint and symmetry structure, and
//! zero bracketing. Tolerances are stated relative to the natural scale
//! of each quantity.

mod common;

use common::jacobi_weighted_integral;
use delaytau::orthopoly::{
    basis_zeros, eval_basis, eval_basis_all, eval_basis_derivative_all, gauss_rule, norm_squared,
    weight, BasisKind, BasisSpec,
};
use delaytau::BasisSpec64;
use proptest::prelude::*;

fn all_specs(tau: f64) -> Vec<BasisSpec64> {
    vec![
        BasisSpec::new(BasisKind::Chebyshev1, tau).unwrap(),
        BasisSpec::new(BasisKind::Chebyshev2, tau).unwrap(),
        BasisSpec::new(BasisKind::Legendre, tau).unwrap(),
        BasisSpec::new(
            BasisKind::Jacobi {
                alpha: -0.5,
                beta: -0.75,
            },
            tau,
        )
        .unwrap(),
    ]
}

fn symmetric_specs(tau: f64) -> Vec<BasisSpec64> {
    all_specs(tau).into_iter().filter(|s| s.kind().is_symmetric()).collect()
}

#[test]
fn weighted_orthogonality_holds_through_degree_12() {
    for tau in [1.0, 2.5] {
        for spec in all_specs(tau) {
            let rule = gauss_rule(&spec, 20).expect("rule");
            let norms: Vec<f64> = (0..=12)
                .map(|j| norm_squared(&spec, j).unwrap().sqrt())
                .collect();
            for j in 0..=12usize {
                for k in (j + 1)..=12usize {
                    let inner = rule.integrate(|theta| {
                        eval_basis(&spec, j, theta).unwrap() * eval_basis(&spec, k, theta).unwrap()
                    });
                    let bound = 1e-8 * norms[j] * norms[k];
                    assert!(
                        inner.abs() <= bound,
                        "<phi_{j}, phi_{k}> = {inner:.3e} exceeds {bound:.3e} ({spec:?})"
                    );
                }
            }
        }
    }
}

#[test]
fn norm_squared_matches_double_exponential_oracle() {
    // The oracle integrates phi_j^2 against its own statement of the
    // Jacobi weight with a quadrature scheme the library does not use
    // anywhere, so agreement cross-validates the closed-form norms, the
    // weight exponents, and the recurrences together.
    for tau in [1.0, 2.0] {
        for spec in all_specs(tau) {
            let (alpha, beta) = (spec.kind().alpha(), spec.kind().beta());
            for j in 0..=8usize {
                let closed = norm_squared(&spec, j).unwrap();
                let oracle = jacobi_weighted_integral(alpha, beta, tau, |theta| {
                    let v = eval_basis(&spec, j, theta).unwrap();
                    v * v
                });
                let rel = (closed - oracle).abs() / closed;
                assert!(
                    rel <= 1e-12,
                    "norm mismatch for degree {j}: closed {closed:.15e} oracle {oracle:.15e} ({spec:?})"
                );
            }
        }
    }
}

#[test]
fn weight_function_matches_its_defining_exponents() {
    // Spot-check the library's weight against a direct evaluation of
    // (1-x)^alpha (1+x)^beta at interior points where no cancellation
    // is in play.
    for spec in all_specs(2.0) {
        let (alpha, beta) = (spec.kind().alpha(), spec.kind().beta());
        for theta in [-1.7, -1.0, -0.31] {
            let x: f64 = 2.0 * theta / 2.0 + 1.0;
            let direct = (1.0 - x).powf(alpha) * (1.0 + x).powf(beta);
            let lib = weight(&spec, theta).unwrap();
            assert!(
                (lib - direct).abs() <= 1e-13 * direct,
                "weight mismatch at {theta}: {lib} vs {direct} ({spec:?})"
            );
        }
    }
}

#[test]
fn bases_are_degree_graded() {
    // The k-th derivative of the degree-k member is a nonzero constant:
    // its value must agree at two unrelated points and differ from zero.
    for spec in all_specs(1.0) {
        for k in 0..=12usize {
            let at_a = eval_basis_derivative_all(&spec, k, k, -0.9).unwrap()[k];
            let at_b = eval_basis_derivative_all(&spec, k, k, -0.2).unwrap()[k];
            assert!(at_a != 0.0, "degree-{k} leading derivative vanished ({spec:?})");
            assert!(
                (at_a - at_b).abs() <= 1e-12 * at_a.abs(),
                "degree-{k} top derivative not constant: {at_a} vs {at_b} ({spec:?})"
            );
        }
    }
}

#[test]
fn endpoint_values_match_quotable_closed_forms() {
    // Scale conventions pin phi_k(0): 1 for Chebyshev of the first kind
    // and Legendre, k+1 for the second kind, binom(k+alpha, k) for the
    // general Jacobi family. These feed the boundary rows of every
    // realization, so they are checked to near machine precision.
    for tau in [1.0, 0.5] {
        for spec in all_specs(tau) {
            for k in 0..=40usize {
                let value = eval_basis(&spec, k, 0.0).unwrap();
                let expected = match spec.kind() {
                    BasisKind::Chebyshev1 | BasisKind::Legendre => 1.0,
                    BasisKind::Chebyshev2 => (k + 1) as f64,
                    BasisKind::Jacobi { alpha, .. } => {
                        (1..=k).map(|i| (alpha + i as f64) / i as f64).product::<f64>()
                    }
                };
                assert!(
                    (value - expected).abs() <= 1e-12 * expected.abs().max(1.0),
                    "phi_{k}(0) = {value} expected {expected} ({spec:?})"
                );
                assert!(value.abs() > 0.0);
            }
        }
    }
}

#[test]
fn symmetric_families_alternate_parity_about_the_midpoint() {
    let tau = 1.7;
    for spec in symmetric_specs(tau) {
        for k in 0..=12usize {
            let grid: Vec<f64> = (0..33).map(|i| -tau + tau * i as f64 / 32.0).collect();
            let scale = grid
                .iter()
                .map(|&t| eval_basis(&spec, k, t).unwrap().abs())
                .fold(0.0f64, f64::max);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            for &theta in &grid {
                let direct = eval_basis(&spec, k, theta).unwrap();
                let mirrored = eval_basis(&spec, k, -tau - theta).unwrap();
                assert!(
                    (mirrored - sign * direct).abs() <= 1e-10 * scale,
                    "parity defect at degree {k}, theta {theta} ({spec:?})"
                );
            }
        }
    }
}

#[test]
fn zeros_are_simple_interior_and_ascending() {
    let tau = 2.0;
    for spec in all_specs(tau) {
        for k in 1..=12usize {
            let zeros = basis_zeros(&spec, k).unwrap();
            assert_eq!(zeros.len(), k, "degree {k} must have {k} zeros ({spec:?})");
            for w in zeros.windows(2) {
                assert!(w[0] < w[1], "zeros out of order ({spec:?})");
            }
            assert!(zeros[0] > -tau && zeros[k - 1] < 0.0, "zeros escape the interval");
            let scale = (0..65)
                .map(|i| eval_basis(&spec, k, -tau + tau * i as f64 / 64.0).unwrap().abs())
                .fold(0.0f64, f64::max);
            for &z in &zeros {
                let v = eval_basis(&spec, k, z).unwrap();
                assert!(
                    v.abs() <= 1e-9 * scale,
                    "phi_{k}({z}) = {v:.3e} is not numerically zero ({spec:?})"
                );
            }
        }
    }
}

#[test]
fn quadrature_rules_are_consistent_across_node_counts() {
    // A rule with m nodes is exact through polynomial degree 2m - 1, so
    // integrating a fixed product with any sufficient node count must
    // give the same answer.
    for spec in all_specs(1.0) {
        let small = gauss_rule(&spec, 9).unwrap();
        let large = gauss_rule(&spec, 30).unwrap();
        for (j, k) in [(0usize, 0usize), (3, 4), (8, 8), (5, 8)] {
            let f = |theta: f64| {
                eval_basis(&spec, j, theta).unwrap() * eval_basis(&spec, k, theta).unwrap()
            };
            let a = small.integrate(f);
            let b = large.integrate(f);
            let scale = a.abs().max(b.abs()).max(1e-30);
            assert!(
                (a - b).abs() <= 1e-12 * scale.max(1.0),
                "rule disagreement for ({j},{k}): {a:.15e} vs {b:.15e} ({spec:?})"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Evaluating through a longer recurrence must reproduce every prefix
    // bitwise; the nesting property of the discretization operators
    // inherits directly from this.
    #[test]
    fn evaluation_prefixes_are_bitwise_nested(
        theta in -0.999f64..-0.001,
        n_small in 1usize..10,
        extra in 1usize..10,
    ) {
        for spec in all_specs(1.0) {
            let short = eval_basis_all(&spec, n_small, theta).unwrap();
            let long = eval_basis_all(&spec, n_small + extra, theta).unwrap();
            for k in 0..=n_small {
                prop_assert_eq!(short[k], long[k]);
            }
        }
    }
}
