//! Test support: independent reference implementations and random model
//! generators for oracle tests and the experiment harness's checks.
//!
//! Everything here recomputes results from first principles (enumeration,
//! simulation, convex geometry) without calling the solver paths it is used
//! to check, so a solver bug cannot cancel out of a comparison. Keep it that
//! way when extending this module.

use crate::momdp::{evaluate_returns, DeterministicPolicy, MomdpError, ReturnVector, StochasticPolicy, TabularMOMDP};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random dense model: every transition row is a normalized vector of
/// exponential draws (so all entries are positive), rewards are uniform on
/// [-1, 1], and the initial distribution is normalized the same way.
pub fn random_momdp<R: Rng>(
    rng: &mut R,
    num_states: usize,
    num_actions: usize,
    num_objectives: usize,
    gamma: f64,
) -> TabularMOMDP {
    let n = num_states;
    let mut transitions = vec![0.0; n * num_actions * n];
    for row in transitions.chunks_mut(n) {
        fill_simplex(rng, row);
    }
    let rewards: Vec<f64> = (0..n * num_actions * num_objectives)
        .map(|_| rng.gen_range(-1.0..=1.0))
        .collect();
    let mut nu0 = vec![0.0; n];
    fill_simplex(rng, &mut nu0);
    TabularMOMDP::new(n, num_actions, num_objectives, gamma, nu0, transitions, rewards)
        .expect("generated rows are normalized")
}

/// Random model with one successor per state-action pair; rewards are drawn
/// from a small set of round values so distinct policies often tie exactly.
pub fn random_deterministic_momdp<R: Rng>(
    rng: &mut R,
    num_states: usize,
    num_actions: usize,
    num_objectives: usize,
    gamma: f64,
) -> TabularMOMDP {
    let n = num_states;
    let mut transitions = vec![0.0; n * num_actions * n];
    for row in transitions.chunks_mut(n) {
        row[rng.gen_range(0..n)] = 1.0;
    }
    let levels = [-1.0, -0.5, 0.0, 0.0, 0.5, 1.0];
    let rewards: Vec<f64> = (0..n * num_actions * num_objectives)
        .map(|_| levels[rng.gen_range(0..levels.len())])
        .collect();
    // Full support matters: with states the initial distribution misses, a
    // policy can top the scalarized return while acting arbitrarily at
    // states it never reaches, and single-flip paths between such policies
    // are not value-preserving. Uniform weight keeps return-level ties
    // equivalent to per-state action ties.
    let nu0 = vec![1.0 / n as f64; n];
    TabularMOMDP::new(n, num_actions, num_objectives, gamma, nu0, transitions, rewards)
        .expect("generated rows are normalized")
}

fn fill_simplex<R: Rng>(rng: &mut R, row: &mut [f64]) {
    let mut total = 0.0;
    for v in row.iter_mut() {
        *v = -(1.0 - rng.gen::<f64>()).ln();
        total += *v;
    }
    for v in row.iter_mut() {
        *v /= total;
    }
}

/// Exhaustive deterministic policy enumeration with exact returns. Panics if
/// the policy space exceeds two million entries; oracle fixtures stay small.
pub fn enumerate_policy_returns(
    m: &TabularMOMDP,
) -> Result<Vec<(DeterministicPolicy, ReturnVector)>, MomdpError> {
    let n = m.num_states();
    let na = m.num_actions();
    assert!(
        (na as f64).powi(n as i32) <= 2e6,
        "policy space too large to enumerate"
    );
    let mut actions = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        let pol = DeterministicPolicy::new(actions.clone());
        let j = evaluate_returns(m, &pol)?;
        out.push((pol, j));
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            actions[i] += 1;
            if actions[i] < na {
                break;
            }
            actions[i] = 0;
            i += 1;
        }
    }
}

/// Best scalarized value over a return set; the enumeration-backed support
/// function of the achievable set.
pub fn scalarized_best(returns: &[(DeterministicPolicy, ReturnVector)], w: &[f64]) -> f64 {
    returns
        .iter()
        .map(|(_, j)| j.values.iter().zip(w).map(|(v, wi)| v * wi).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Vertices of the upper-right convex hull of 2-d points: the points that
/// uniquely maximize `w . p` for some strictly positive weight. Returned as
/// indices into the input, ordered by decreasing first coordinate. Points on
/// a hull edge but not at a corner are dropped.
pub fn upper_right_hull(points: &[(f64, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[j]
            .partial_cmp(&points[i])
            .expect("finite coordinates")
    });
    let scale_of = |v: f64| 1.0 + v.abs();
    // Collapse x-ties up to solver noise, keeping the highest y of each
    // cluster. Policies tied on one objective in exact arithmetic come back
    // from the linear solves a few ulps apart, and without the merge a
    // dominated point can pose as a vertex.
    let mut reps: Vec<usize> = Vec::new();
    for &i in &order {
        match reps.last() {
            Some(&r) if (points[r].0 - points[i].0).abs() <= 1e-9 * scale_of(points[r].0) => {
                if points[i].1 > points[r].1 {
                    *reps.last_mut().unwrap() = i;
                }
            }
            _ => reps.push(i),
        }
    }
    // Pareto staircase: strictly rising y as x falls.
    let mut staircase: Vec<usize> = Vec::new();
    let mut best_y = f64::NEG_INFINITY;
    for &i in &reps {
        if staircase.is_empty() || points[i].1 > best_y + 1e-9 * scale_of(best_y) {
            staircase.push(i);
            best_y = points[i].1;
        }
    }
    // Convexify; pop middle points that fail to make a strict left turn.
    let mut hull: Vec<usize> = Vec::new();
    for &i in &staircase {
        let c = points[i];
        while hull.len() >= 2 {
            let a = points[hull[hull.len() - 2]];
            let b = points[hull[hull.len() - 1]];
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            let scale = 1.0 + a.0.abs() + a.1.abs() + c.0.abs() + c.1.abs();
            if cross <= 1e-9 * scale {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Boundary weights of consecutive hull vertices: entry `i` is the weight
/// `(w1, 1 - w1)` at which vertices `i` and `i + 1` tie. Empty for a
/// single-vertex hull.
pub fn hull_edge_weights(hull: &[(f64, f64)]) -> Vec<Vec<f64>> {
    hull.windows(2)
        .map(|pair| {
            let (x0, y0) = pair[0];
            let (x1, y1) = pair[1];
            // ties: w1 x0 + (1 - w1) y0 = w1 x1 + (1 - w1) y1
            let s = (y1 - y0) / (x0 - x1);
            let w1 = s / (1.0 + s);
            vec![w1, 1.0 - w1]
        })
        .collect()
}

/// One strictly interior supporting weight per hull vertex (hull ordered by
/// decreasing first coordinate, as [`upper_right_hull`] returns it):
/// midpoints of the per-vertex optimality intervals cut by the edge weights.
pub fn hull_vertex_weights(hull: &[(f64, f64)]) -> Vec<Vec<f64>> {
    if hull.len() == 1 {
        return vec![vec![0.5, 0.5]];
    }
    let edges = hull_edge_weights(hull);
    let mut out = Vec::with_capacity(hull.len());
    for i in 0..hull.len() {
        let hi = if i == 0 { 1.0 } else { edges[i - 1][0] };
        let lo = if i == hull.len() - 1 { 0.0 } else { edges[i][0] };
        let w1 = 0.5 * (lo + hi);
        out.push(vec![w1, 1.0 - w1]);
    }
    out
}

/// Monte Carlo estimate of a policy's returns with per-objective standard
/// errors, from an independent simulator over the raw model tables. The
/// horizon is the caller's concern: choose it so the discounted tail is far
/// below the tolerance being tested.
pub fn mc_returns(
    m: &TabularMOMDP,
    policy: &StochasticPolicy,
    episodes: usize,
    horizon: usize,
    seed: u64,
) -> (Vec<f64>, Vec<f64>) {
    assert!(episodes >= 2, "need at least two episodes for a standard error");
    let d = m.num_objectives();
    let gamma = m.gamma();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = vec![0.0; d];
    let mut sumsq = vec![0.0; d];
    for _ in 0..episodes {
        let mut s = draw_dense(m.initial_dist(), &mut rng);
        let mut disc = 1.0;
        let mut ret = vec![0.0; d];
        for _ in 0..horizon {
            let a = draw_dense(policy.row(s), &mut rng);
            for (k, r) in m.reward(s, a).iter().enumerate() {
                ret[k] += disc * r;
            }
            disc *= gamma;
            if disc == 0.0 {
                break;
            }
            s = draw_support(m.successors(s, a), &mut rng);
        }
        for k in 0..d {
            sum[k] += ret[k];
            sumsq[k] += ret[k] * ret[k];
        }
    }
    let n = episodes as f64;
    let mean: Vec<f64> = sum.iter().map(|v| v / n).collect();
    let se: Vec<f64> = mean
        .iter()
        .zip(&sumsq)
        .map(|(mu, sq)| (((sq - n * mu * mu) / (n - 1.0)).max(0.0) / n).sqrt())
        .collect();
    (mean, se)
}

fn draw_dense<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

fn draw_support<R: Rng>(support: &[(u32, f64)], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for &(i, p) in support {
        acc += p;
        last = i as usize;
        if u < acc {
            return last;
        }
    }
    last
}

/// Spearman rank correlation with average ranks for ties; 0 when either
/// side is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx <= 0.0 || vy <= 0.0 {
        return 0.0;
    }
    cov / (vx.sqrt() * vy.sqrt())
}

fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].partial_cmp(&xs[j]).expect("finite values"));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_extracts_vertices_and_weights() {
        // Third point sits on the segment between the outer two and must
        // drop; the interior point must drop as well.
        let pts = [(10.0, 0.0), (25.0 / 3.0, 25.0 / 3.0), (0.0, 10.0), (5.0, 5.0), (4.0, 7.0)];
        let hull = upper_right_hull(&pts);
        assert_eq!(hull, vec![0, 1, 2]);
        let hp: Vec<(f64, f64)> = hull.iter().map(|&i| pts[i]).collect();
        let edges = hull_edge_weights(&hp);
        assert!((edges[0][0] - 5.0 / 6.0).abs() < 1e-12);
        assert!((edges[1][0] - 1.0 / 6.0).abs() < 1e-12);
        let verts = hull_vertex_weights(&hp);
        assert_eq!(verts.len(), 3);
        // Each midpoint weight picks out its own vertex as the scalarized max.
        for (k, w) in verts.iter().enumerate() {
            let scores: Vec<f64> = hp.iter().map(|p| w[0] * p.0 + w[1] * p.1).collect();
            let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!((scores[k] - best).abs() < 1e-12, "vertex {k} not optimal at {w:?}");
        }
    }

    #[test]
    fn mc_matches_closed_form_on_one_state_chain() {
        // Single state, reward 1 per step, gamma 0.5: J = 2 exactly.
        let m = TabularMOMDP::new(1, 1, 1, 0.5, vec![1.0], vec![1.0], vec![1.0]).unwrap();
        let pol = StochasticPolicy::uniform(1, 1);
        let (mean, se) = mc_returns(&m, &pol, 64, 80, 7);
        assert!((mean[0] - 2.0).abs() < 1e-9);
        assert!(se[0] < 1e-9, "deterministic returns have zero spread");
    }

    #[test]
    fn spearman_handles_monotone_reversed_and_tied_data() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&xs, &[2.0, 4.0, 5.0, 9.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&xs, &[9.0, 5.0, 4.0, 2.0]) + 1.0).abs() < 1e-12);
        assert_eq!(spearman(&xs, &[1.0, 1.0, 1.0, 1.0]), 0.0);
        let rho = spearman(&[1.0, 1.0, 2.0, 2.0], &[1.0, 2.0, 3.0, 4.0]);
        assert!(rho > 0.0 && rho < 1.0);
    }

    #[test]
    fn generators_build_valid_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_momdp(&mut rng, 4, 3, 2, 0.9);
        let d = random_deterministic_momdp(&mut rng, 4, 3, 2, 0.9);
        for model in [&m, &d] {
            for s in 0..model.num_states() {
                for a in 0..model.num_actions() {
                    let total: f64 = model.successors(s, a).iter().map(|&(_, p)| p).sum();
                    assert!((total - 1.0).abs() < 1e-9);
                }
            }
        }
        assert_eq!(d.successors(0, 0).len(), 1);
        let returns = enumerate_policy_returns(&m).unwrap();
        assert_eq!(returns.len(), 81);
        let best = scalarized_best(&returns, &[0.5, 0.5]);
        assert!(best.is_finite());
    }
}
