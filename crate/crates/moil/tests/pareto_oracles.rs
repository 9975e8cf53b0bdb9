//! Front construction and the distance program against enumeration-based
//! oracles and hand-solved fixtures.

use moil::envs::build_counterexample;
use moil::momdp::{evaluate_returns, DeterministicPolicy, ReturnVector};
use moil::pareto::{aliasing_groups, linf_pareto_distance, ols_front, pareto_path, ParetoError};
use moil::testkit::{
    enumerate_policy_returns, hull_edge_weights, hull_vertex_weights, random_deterministic_momdp,
    random_momdp, scalarized_best, upper_right_hull,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn interior_weight_grid(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let w = (i as f64 + 0.5) / n as f64;
            vec![w, 1.0 - w]
        })
        .collect()
}

#[test]
fn ols_matches_enumeration_hull_on_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let ns = rng.gen_range(2..=4);
        let na = rng.gen_range(2..=3);
        let gamma = [0.5, 0.9, 0.95][case % 3];
        let m = if case % 2 == 0 {
            random_momdp(&mut rng, ns, na, 2, gamma)
        } else {
            random_deterministic_momdp(&mut rng, ns, na, 2, gamma)
        };
        let front = ols_front(&m, 1e-9).unwrap();
        let returns = enumerate_policy_returns(&m).unwrap();
        let points: Vec<(f64, f64)> = returns
            .iter()
            .map(|(_, j)| (j.values[0], j.values[1]))
            .collect();
        let hull_idx = upper_right_hull(&points);
        let hull_pts: Vec<(f64, f64)> = hull_idx.iter().map(|&i| points[i]).collect();

        // Support functions agree on an interior grid plus the hull's own
        // vertex and edge weights.
        let mut weights = interior_weight_grid(21);
        weights.extend(hull_vertex_weights(&hull_pts));
        weights.extend(hull_edge_weights(&hull_pts));
        for w in &weights {
            let best = scalarized_best(&returns, w);
            let got = front.scalarized_max(w);
            assert!(
                (best - got).abs() <= 1e-6,
                "case {case}: support mismatch at {w:?}: front {got} vs enumeration {best}"
            );
        }
        // Every front vertex is realized by an actual policy, and every hull
        // vertex shows up on the front.
        for v in &front.vertices {
            assert!(
                returns.iter().any(|(_, j)| j.linf_distance(v) <= 1e-6),
                "case {case}: unrealizable front vertex {:?}",
                v.values
            );
        }
        for &hi in &hull_idx {
            let v = &returns[hi].1;
            assert!(
                front.vertices.iter().any(|u| u.linf_distance(v) <= 1e-5),
                "case {case}: hull vertex {:?} missing from front {:?}",
                v.values,
                front.vertices
            );
        }
    }
}

#[test]
fn three_objective_front_supports_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let steps = 10usize;
    for case in 0..10 {
        let m = random_momdp(&mut rng, 3, 3, 3, 0.9);
        let front = ols_front(&m, 1e-9).unwrap();
        let returns = enumerate_policy_returns(&m).unwrap();
        for i in 1..steps {
            for j in 1..(steps - i) {
                let w = vec![
                    i as f64 / steps as f64,
                    j as f64 / steps as f64,
                    (steps - i - j) as f64 / steps as f64,
                ];
                let best = scalarized_best(&returns, &w);
                let got = front.scalarized_max(&w);
                assert!(
                    (best - got).abs() <= 1e-6,
                    "case {case}: 3-d support mismatch at {w:?}: {got} vs {best}"
                );
            }
        }
    }
}

#[test]
fn distance_program_reproduces_hand_solved_cases() {
    let b = build_counterexample(1.0 / 3.0, 0.9).unwrap();
    let front = ols_front(&b.momdp, 1e-9).unwrap();
    assert_eq!(front.len(), 3);

    // The averaged-expert return sits exactly 1/3 of the per-axis range
    // below the middle vertex.
    let naive = ReturnVector {
        values: vec![5.0, 5.0],
    };
    let rep = linf_pareto_distance(&front, &naive).unwrap();
    assert!(
        (rep.delta - 1.0 / 3.0).abs() <= 1e-9,
        "delta {} is not 1/3",
        rep.delta
    );

    // Points on the front have zero distance, signed and clamped alike.
    for v in &front.vertices {
        let on = linf_pareto_distance(&front, v).unwrap();
        assert!(on.delta.abs() <= 1e-9);
        assert!(on.raw_delta.abs() <= 1e-9);
    }

    // A point strictly outside the achievable hull prices negatively:
    // best mixture is the middle vertex at margin (25/3 - 10) / 10.
    let above = ReturnVector {
        values: vec![10.0, 10.0],
    };
    let rep = linf_pareto_distance(&front, &above).unwrap();
    assert_eq!(rep.delta, 0.0);
    assert!((rep.raw_delta + 1.0 / 6.0).abs() <= 1e-9);
}

#[test]
fn distance_grows_as_returns_degrade() {
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    let m = random_momdp(&mut rng, 4, 3, 2, 0.9);
    let front = ols_front(&m, 1e-9).unwrap();
    let base = evaluate_returns(&m, &DeterministicPolicy::new(vec![0, 0, 0, 0])).unwrap();
    let mut last = -1.0;
    for t in 0..5 {
        let j = ReturnVector {
            values: base.values.iter().map(|v| v - t as f64 * 0.3).collect(),
        };
        let d = linf_pareto_distance(&front, &j).unwrap().delta;
        assert!(
            d >= last - 1e-12,
            "distance dropped from {last} to {d} as the point moved away"
        );
        last = d;
    }
}

#[test]
fn path_connects_tied_optimal_policies_on_deterministic_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut pairs_tested = 0usize;
    for _ in 0..25 {
        let ns = rng.gen_range(2..=4);
        let na = rng.gen_range(2..=3);
        let m = random_deterministic_momdp(&mut rng, ns, na, 2, 0.9);
        let returns = enumerate_policy_returns(&m).unwrap();
        let points: Vec<(f64, f64)> = returns
            .iter()
            .map(|(_, j)| (j.values[0], j.values[1]))
            .collect();
        let hull: Vec<(f64, f64)> = upper_right_hull(&points)
            .iter()
            .map(|&i| points[i])
            .collect();
        let mut weights = hull_vertex_weights(&hull);
        weights.extend(hull_edge_weights(&hull));
        for w in weights {
            let best = scalarized_best(&returns, &w);
            let optimal: Vec<&DeterministicPolicy> = returns
                .iter()
                .filter(|(_, j)| (dot(&w, &j.values) - best).abs() <= 1e-9)
                .map(|(p, _)| p)
                .collect();
            for other in optimal.iter().skip(1).take(3) {
                let path = pareto_path(&m, optimal[0], other, &w, 1e-7).unwrap();
                let flips = (0..ns)
                    .filter(|&s| optimal[0].action(s) != other.action(s))
                    .count();
                assert_eq!(path.len(), flips + 1);
                assert_eq!(path[0].actions, optimal[0].actions);
                assert_eq!(path[path.len() - 1].actions, other.actions);
                pairs_tested += 1;
            }
        }
    }
    assert!(
        pairs_tested >= 20,
        "expected tied optima across 25 models, exercised only {pairs_tested} pairs"
    );
}

#[test]
fn path_rejects_suboptimal_endpoints() {
    let b = build_counterexample(1.0 / 3.0, 0.9).unwrap();
    // At equal weights only the compromise arm is optimal.
    let err = pareto_path(
        &b.momdp,
        &DeterministicPolicy::new(vec![0]),
        &DeterministicPolicy::new(vec![2]),
        &[0.5, 0.5],
        1e-9,
    )
    .unwrap_err();
    assert!(matches!(err, ParetoError::NotOptimal { which: 'A', .. }));
}

#[test]
fn aliasing_groups_partition_the_policy_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let m = random_deterministic_momdp(&mut rng, 3, 3, 2, 0.9);
    let groups = aliasing_groups(&m, 1_000_000).unwrap();
    let total: usize = groups.iter().map(|g| g.policies.len()).sum();
    assert_eq!(total, 27);
    assert!(groups.len() >= 2, "round rewards should still split returns");
    for g in &groups {
        for p in &g.policies {
            let j = evaluate_returns(&m, p).unwrap();
            assert!(j.linf_distance(&g.value) <= 1e-8);
        }
    }
}
