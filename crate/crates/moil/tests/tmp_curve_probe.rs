//! Scratch probe (not part of the suite): learner curves under
//! trajectory-flattened demonstrations, to pick experiment grids.

use moil::envs::{build_deep_sea, build_resource_gathering, build_y_maze, EnvironmentBundle};
use moil::imitation::{isolated_bc, mabc, naive_bc, SplitDemos};
use moil::momdp::{evaluate_returns, sample_trajectory};
use moil::pareto::{linf_pareto_distance, ols_front, ParetoFront};

fn traj_demos(bundle: &EnvironmentBundle, n_experts: usize, n_traj: usize, max_len: usize, trial: u64) -> SplitDemos {
    let per_expert = (0..n_experts)
        .map(|i| {
            let mut pairs = Vec::new();
            for t in 0..n_traj {
                let seed = 900_000 + trial * 50_000 + (i as u64) * 20_000 + t as u64;
                pairs.extend(sample_trajectory(&bundle.momdp, &bundle.experts[i], max_len, seed).unwrap());
            }
            pairs
        })
        .collect();
    SplitDemos::new(per_expert)
}

fn dist(front: &ParetoFront, bundle: &EnvironmentBundle, policy: &moil::momdp::StochasticPolicy) -> f64 {
    let j = evaluate_returns(&bundle.momdp, policy).unwrap();
    linf_pareto_distance(front, &j).unwrap().delta
}

fn mean_sem(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

fn probe_env(bundle: &EnvironmentBundle, n_experts: usize, max_len: usize, grid: &[usize], trials: u64) {
    let ns = bundle.momdp.num_states();
    let na = bundle.momdp.num_actions();
    let front = ols_front(&bundle.momdp, 1e-9).unwrap();
    println!("\n=== {} (|X|={}, front {} vertices) ===", bundle.name, ns, front.vertices.len());
    let mut iso_means = Vec::new();
    let mut mabc_means = Vec::new();
    let mut iso_sems = Vec::new();
    let mut mabc_sems = Vec::new();
    let mut naive_last = 0.0;
    let mut iso_last = 0.0;
    let mut mabc_last = 0.0;
    for &n in grid {
        let mut d_naive = Vec::new();
        let mut d_iso = Vec::new();
        let mut d_mabc = Vec::new();
        for trial in 0..trials {
            let demos = traj_demos(bundle, n_experts, n, max_len, trial);
            let pi_naive = naive_bc(&demos, ns, na);
            d_naive.push(dist(&front, bundle, &pi_naive));
            let iso = isolated_bc(&demos, ns, na);
            d_iso.push(iso.iter().map(|p| dist(&front, bundle, p)).sum::<f64>() / n_experts as f64);
            let ma = mabc(&demos, ns, na);
            d_mabc.push(ma.iter().map(|p| dist(&front, bundle, p)).sum::<f64>() / n_experts as f64);
        }
        let (mn, sn) = mean_sem(&d_naive);
        let (mi, si) = mean_sem(&d_iso);
        let (mm, sm) = mean_sem(&d_mabc);
        println!(
            "N={:>4}  naive {:.4}±{:.4}  iso {:.4}±{:.4}  mabc {:.4}±{:.4}   gap(iso-mabc)/pooledSEM {:+.2}",
            n, mn, sn, mi, si, mm, sm,
            (mi - mm) / (si * si + sm * sm).sqrt().max(1e-12)
        );
        iso_means.push(mi);
        mabc_means.push(mm);
        iso_sems.push(si);
        mabc_sems.push(sm);
        naive_last = mn;
        iso_last = mi;
        mabc_last = mm;
    }
    let ordering_ok = iso_means.iter().zip(&mabc_means).all(|(i, m)| m <= i);
    let first_gap = (iso_means[0] - mabc_means[0])
        / (iso_sems[0] * iso_sems[0] + mabc_sems[0] * mabc_sems[0]).sqrt().max(1e-12);
    println!(
        "verdicts: plateau naive>{:.3} iso<{:.3} mabc<{:.3} | mabc<=iso everywhere: {} | first-N gap {:.2} pooled SEMs",
        naive_last, iso_last, mabc_last, ordering_ok, first_gap
    );
}

#[test]
fn probe_curves() {
    let grid = [2usize, 5, 10, 20, 50, 100, 200];
    let ym = build_y_maze(0.9999).unwrap();
    probe_env(&ym, 2, 200, &grid, 20);
    let dst = build_deep_sea(0.999, 1.0).unwrap();
    probe_env(&dst, 2, 60, &grid, 20);
    let rg = build_resource_gathering(0.96, 1.0).unwrap();
    probe_env(&rg, 2, 100, &grid, 20);
}

/// Per-trial across-expert (isolated - mabc) distance gaps.
fn paired_gaps(
    bundle: &EnvironmentBundle,
    n_experts: usize,
    n_traj: usize,
    max_len: usize,
    trials: u64,
    seed_base: u64,
) -> Vec<f64> {
    let ns = bundle.momdp.num_states();
    let na = bundle.momdp.num_actions();
    let front = ols_front(&bundle.momdp, 1e-9).unwrap();
    (0..trials)
        .map(|trial| {
            let per_expert = (0..n_experts)
                .map(|i| {
                    let mut pairs = Vec::new();
                    for t in 0..n_traj {
                        let seed = seed_base + trial * 50_000 + (i as u64) * 20_000 + t as u64;
                        pairs.extend(
                            sample_trajectory(&bundle.momdp, &bundle.experts[i], max_len, seed)
                                .unwrap(),
                        );
                    }
                    pairs
                })
                .collect();
            let demos = SplitDemos::new(per_expert);
            let iso = isolated_bc(&demos, ns, na);
            let ma = mabc(&demos, ns, na);
            let di = iso.iter().map(|p| dist(&front, bundle, p)).sum::<f64>() / n_experts as f64;
            let dm = ma.iter().map(|p| dist(&front, bundle, p)).sum::<f64>() / n_experts as f64;
            di - dm
        })
        .collect()
}

#[test]
fn probe_concentrability_trend() {
    use moil::imitation::concentrability;
    let n_traj = 6;
    let trials = 100;
    println!("lower_bound gap trend, N={n_traj} trajectories/expert, {trials} trials");
    for &p in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        let bundle = moil::envs::build_lower_bound(1, 12, p, 0.9, 30).unwrap();
        let region1: Vec<usize> = bundle
            .layout
            .groups
            .iter()
            .find(|(g, _)| g == "region1")
            .map(|(_, s)| s.clone())
            .unwrap();
        let c = concentrability(&bundle.momdp, &bundle.experts, &[n_traj, n_traj], &region1).unwrap();
        let analytic = 2.0 / (1.0 + p);
        let gaps = paired_gaps(&bundle, 2, n_traj, 30, trials, 400_000);
        let (m, s) = mean_sem(&gaps);
        println!(
            "p={p:.1}  C_computed={c:.12}  C_analytic={analytic:.12}  |diff|={:.2e}  gap {m:.4}±{s:.4}",
            (c - analytic).abs()
        );
    }
}

#[test]
fn probe_spawn_mix_trend() {
    let trials = 20;
    let n = 2;
    let arms: Vec<(&str, Box<dyn Fn(f64) -> EnvironmentBundle>)> = vec![
        ("deep_sea", Box::new(|mix| build_deep_sea(0.999, mix).unwrap())),
        ("resource", Box::new(|mix| build_resource_gathering(0.96, mix).unwrap())),
    ];
    for (name, build) in &arms {
        let mut arm = Vec::new();
        for &mix in &[0.0, 1.0] {
            let bundle = build(mix);
            let max_len = if *name == "deep_sea" { 60 } else { 100 };
            let gaps = paired_gaps(&bundle, 2, n, max_len, trials, 600_000);
            let (m, s) = mean_sem(&gaps);
            println!("{name} spawn_mix={mix}: gap {m:.4}±{s:.4}");
            arm.push((m, s));
        }
        let diff = arm[1].0 - arm[0].0;
        let sem = (arm[0].1.powi(2) + arm[1].1.powi(2)).sqrt();
        println!("{name}: gap(mix1)-gap(mix0) = {diff:.4}, {:.2} pooled SEMs\n", diff / sem.max(1e-12));
    }
}

#[test]
fn probe_lqr_rho() {
    use moil::lqr::{build_drone, solve_dare, spectral_radius, LQRObjective};
    let sys = build_drone();
    for &w in &[1e-6, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0 - 1e-6, 0.25, 0.75] {
        let sol = solve_dare(&sys, &LQRObjective::blend(w), 1e-10).unwrap();
        let rho = spectral_radius(&(sys.a - sys.b * sol.controller.k));
        println!("w={w:<8}: rho {rho:.6}  iters {}", sol.iterations);
    }
}

#[test]
fn probe_lqr_tradeoff() {
    use moil::lqr::{
        build_drone, continuous_front, evaluate_controller, make_experts, normalized_lipschitz,
        pool_compatible, ridge_fit, sample_demos, LQRObjective,
    };

    let t0 = std::time::Instant::now();
    let sys = build_drone();
    let (_, ks) = make_experts(&sys, 0.5, 1e-10).unwrap();
    let front = continuous_front(&sys, 101, 1e-10).unwrap();
    let bases = [LQRObjective::tracking(), LQRObjective::eco()];
    println!("front: {} vertices ({:?})", front.len(), t0.elapsed());

    let deltas = [0.0, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0];
    let trials = 30;
    for &(n_traj, horizon) in &[(1usize, 40usize), (2, 20), (1, 100), (2, 50)] {
        let n_pairs = n_traj * horizon;
        println!("\nN={n_pairs} pairs/expert, {trials} trials");
        let mut unstable = 0usize;
        let mut by_delta: Vec<Vec<f64>> = vec![Vec::new(); deltas.len()];
        for trial in 0..trials {
            let demos: Vec<_> = (0..2)
                .map(|i| {
                    let seed = 5_000_000 + trial as u64 * 1_000 + i as u64 * 100 + n_pairs as u64;
                    sample_demos(&sys, &ks[i], n_traj, horizon, 0.1, seed)
                })
                .collect();
            for (di, &delta) in deltas.iter().enumerate() {
                let mut total = 0.0;
                for l in 0..2 {
                    let others = [demos[1 - l].clone()];
                    let norm = others
                        .iter()
                        .fold(demos[l].norm.clone(), |acc, d| acc.merge(&d.norm));
                    let lip = normalized_lipschitz(&ks[l].k, &norm);
                    let pooled = pool_compatible(&demos[l], &others, delta, lip);
                    let fit = ridge_fit(&pooled.pairs, 0.001).unwrap();
                    match evaluate_controller(&sys, &fit, &bases, 1.0) {
                        Ok(j) => total += linf_pareto_distance(&front, &j).unwrap().delta,
                        Err(_) => {
                            unstable += 1;
                            total += 1.0;
                        }
                    }
                }
                by_delta[di].push(total / 2.0);
            }
        }
        for (di, &delta) in deltas.iter().enumerate() {
            let (m, s) = mean_sem(&by_delta[di]);
            println!("  delta={delta:<5}: {m:.5} +- {s:.5}");
        }
        let (m0, s0) = mean_sem(&by_delta[0]);
        let mut best = (0usize, m0);
        for (di, vals) in by_delta.iter().enumerate() {
            let (m, _) = mean_sem(vals);
            if m < best.1 {
                best = (di, m);
            }
        }
        let (mb, sb) = mean_sem(&by_delta[best.0]);
        let gap_sems = (m0 - mb) / (s0 * s0 + sb * sb).sqrt();
        println!(
            "  best delta={} ({mb:.5}), vs delta=0 ({m0:.5}): {gap_sems:.2} pooled SEMs, unstable fits {unstable}"
        , deltas[best.0]);
    }
    println!("total {:?}", t0.elapsed());
}

#[test]
fn probe_unsplit_recovery() {
    use moil::imitation::{graph_failure_rate, unsplit_mabc, UnsplitDemos};
    use std::collections::BTreeSet;

    let bundle = build_y_maze(0.9999).unwrap();
    let m = &bundle.momdp;
    let max_len = 200;

    // Clause 1: partition of observed divergent pairs vs expert identity,
    // 100 trials at 200 trajectories per expert.
    let mut matches = 0;
    for trial in 0..100u64 {
        let mut demos = UnsplitDemos::default();
        let mut owner: Vec<usize> = Vec::new();
        for (i, pi) in bundle.experts.iter().enumerate() {
            for t in 0..200u64 {
                let seed = 3_000_000 + trial * 10_000 + (i as u64) * 3_000 + t;
                demos.trajectories.push(sample_trajectory(m, pi, max_len, seed).unwrap());
                owner.push(i);
            }
        }
        let mut seen: std::collections::BTreeMap<usize, BTreeSet<usize>> = Default::default();
        for traj in &demos.trajectories {
            for &(s, a) in traj {
                seen.entry(s).or_default().insert(a);
            }
        }
        let div: BTreeSet<usize> = seen.iter().filter(|(_, v)| v.len() >= 2).map(|(&s, _)| s).collect();
        let mut truth: Vec<BTreeSet<(usize, usize)>> = bundle
            .experts
            .iter()
            .map(|pi| div.iter().map(|&s| (s, pi.action(s))).collect())
            .collect();
        truth.sort();
        let (_, graph) = unsplit_mabc(&demos, 2, m.num_states(), m.num_actions());
        let mut found = graph.component_pairs();
        found.sort();
        if found == truth && !graph.count_mismatch {
            matches += 1;
        }
    }
    println!("clause 1: partition matches {matches}/100 (need >= 99)");

    // Clause 2: strict-truth failure curve + chain envelope.
    let div_states: Vec<usize> = (0..m.num_states())
        .filter(|&x| bundle.experts.iter().any(|pi| pi.action(x) != bundle.experts[0].action(x)))
        .collect();
    let k = div_states.len();
    println!("divergent states: {k}");

    // Held-out p_link: worst chain-link bridge frequency over consecutive
    // sorted divergent-state pairs and target experts, single mixture draw.
    let held = 2000usize;
    let mut bridge = vec![vec![0usize; bundle.experts.len()]; k.saturating_sub(1)];
    for (i, pi) in bundle.experts.iter().enumerate() {
        for t in 0..held / 2 {
            let seed = 7_000_000 + (i as u64) * 100_000 + t as u64;
            let traj = sample_trajectory(m, pi, max_len, seed).unwrap();
            let pairs: BTreeSet<(usize, usize)> = traj.iter().copied().collect();
            for w in 0..k - 1 {
                for (l, pl) in bundle.experts.iter().enumerate() {
                    let a = (div_states[w], pl.action(div_states[w]));
                    let b = (div_states[w + 1], pl.action(div_states[w + 1]));
                    if pairs.contains(&a) && pairs.contains(&b) {
                        bridge[w][l] += 1;
                    }
                }
            }
        }
    }
    let p_link = bridge
        .iter()
        .flatten()
        .map(|&c| c as f64 / held as f64)
        .fold(f64::INFINITY, f64::min);
    println!("p_link (held-out, {held} mixture trajectories): {p_link:.5}");

    let trials = 100;
    let mut prev = f64::INFINITY;
    for &n in &[10usize, 50, 200] {
        let rate = graph_failure_rate(m, &bundle.experts, n, max_len, trials, 8_000_000 + n as u64).unwrap();
        let envelope = (k as f64 - 1.0) * (1.0 - p_link).powi(2 * n as i32);
        let se = (rate * (1.0 - rate) / trials as f64).sqrt();
        let ok_env = rate <= envelope + 3.0 * se;
        let ok_mono = rate <= prev;
        println!(
            "N={n}: rate {rate:.4}  envelope {envelope:.4}  3SE {:.4}  env_ok={ok_env} mono_ok={ok_mono}",
            3.0 * se
        );
        prev = rate;
    }
}

#[test]
fn probe_y_maze_truncation_sensitivity() {
    let grid = [10usize, 50, 200];
    let ym = build_y_maze(0.9999).unwrap();
    for max_len in [8usize, 15, 50] {
        println!("\n--- y_maze with trajectories truncated at {max_len} steps ---");
        probe_env(&ym, 2, max_len, &grid, 20);
    }
}
