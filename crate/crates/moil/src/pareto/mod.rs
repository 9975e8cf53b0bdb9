//! Exact Pareto-front machinery for tabular models.
//!
//! [`ols_front`] enumerates the extreme non-dominated return vectors by
//! optimistic linear support over scalarization weights. [`linf_pareto_distance`]
//! measures how far a return vector sits below the front: the largest
//! range-normalized margin by which a mixture of front vertices dominates it,
//! computed as an exact linear program. [`pareto_path`] connects two equally
//! optimal deterministic policies through single-state action flips, and
//! [`aliasing_groups`] partitions enumerated policies by their exact returns.

mod simplex;

use crate::momdp::{
    evaluate_returns, enumerate_deterministic_policies, scalarized_value_iteration,
    DeterministicPolicy, MomdpError, ReturnVector, TabularMOMDP,
};
use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

/// Return vectors closer than this in sup norm count as the same vertex.
pub const VALUE_MERGE_TOL: f64 = 1e-8;

/// Endpoint weights are pulled this far into the simplex interior.
const OLS_EPS: f64 = 1e-7;
/// Weight candidates closer than this are solved only once.
const WEIGHT_DEDUP_TOL: f64 = 1e-10;
/// A vertex weakly reachable by a mixture of the others (signed gap above
/// minus this) is not extreme and is dropped.
const EXTREME_DROP_TOL: f64 = 1e-9;
/// Objectives flat across the front within this width normalize by 1 instead.
const FLAT_RANGE_TOL: f64 = 1e-9;
/// Value-iteration tolerance behind front search and path verification.
const VI_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ParetoError {
    #[error("{0} objectives unsupported here (1 to 3)")]
    UnsupportedObjectives(usize),
    #[error("front has no vertices")]
    EmptyFront,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Momdp(#[from] MomdpError),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("policy {which} is not optimal for the weight: value {got} < {want}")]
    NotOptimal { which: char, got: f64, want: f64 },
    #[error("path step flipping state {state} has value {got}, below {want}")]
    PathVerification { state: usize, got: f64, want: f64 },
}

/// Extreme non-dominated return vectors with, per vertex, a strictly positive
/// unit-1-norm weight under which it beats every other vertex, and optionally
/// a deterministic policy achieving it.
#[derive(Debug, Clone)]
pub struct ParetoFront {
    pub vertices: Vec<ReturnVector>,
    pub supporting_weights: Vec<Vec<f64>>,
    /// Either one witness per vertex or empty (fronts of non-tabular systems).
    pub witness_policies: Vec<DeterministicPolicy>,
}

impl ParetoFront {
    pub fn new(
        vertices: Vec<ReturnVector>,
        supporting_weights: Vec<Vec<f64>>,
        witness_policies: Vec<DeterministicPolicy>,
    ) -> Result<Self, ParetoError> {
        if vertices.is_empty() {
            return Err(ParetoError::EmptyFront);
        }
        let d = vertices[0].dim();
        if vertices.iter().any(|v| v.dim() != d) {
            return Err(ParetoError::Dimension("vertices of mixed dimension".into()));
        }
        if supporting_weights.len() != vertices.len() {
            return Err(ParetoError::Dimension(
                "one supporting weight per vertex required".into(),
            ));
        }
        if !witness_policies.is_empty() && witness_policies.len() != vertices.len() {
            return Err(ParetoError::Dimension(
                "witness policies must be empty or one per vertex".into(),
            ));
        }
        for (k, w) in supporting_weights.iter().enumerate() {
            if w.len() != d {
                return Err(ParetoError::Dimension(format!(
                    "weight {k} has {} entries, expected {d}",
                    w.len()
                )));
            }
            if w.iter().any(|&wi| wi <= 0.0) {
                return Err(ParetoError::Parameter(format!(
                    "weight {k} leaves the positive orthant"
                )));
            }
            let s: f64 = w.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(ParetoError::Parameter(format!("weight {k} sums to {s}")));
            }
            let own = dot(w, &vertices[k].values);
            for (j, v) in vertices.iter().enumerate() {
                if j != k && dot(w, &v.values) > own + 1e-8 {
                    return Err(ParetoError::Parameter(format!(
                        "vertex {k} is not maximal under its own weight (beaten by {j})"
                    )));
                }
            }
        }
        Ok(Self {
            vertices,
            supporting_weights,
            witness_policies,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn num_objectives(&self) -> usize {
        self.vertices[0].dim()
    }

    /// Per-objective spread across vertices; flat objectives normalize by 1.
    pub fn ranges(&self) -> Vec<f64> {
        let d = self.num_objectives();
        (0..d)
            .map(|i| {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for v in &self.vertices {
                    lo = lo.min(v.values[i]);
                    hi = hi.max(v.values[i]);
                }
                let r = hi - lo;
                if r > FLAT_RANGE_TOL {
                    r
                } else {
                    1.0
                }
            })
            .collect()
    }

    /// Best scalarized value over the vertices.
    pub fn scalarized_max(&self, w: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(w, &v.values))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Outcome of the front-distance program for one return vector.
#[derive(Debug, Clone)]
pub struct DistanceReport {
    /// Normalized sup-norm gap to the front, clamped at zero.
    pub delta: f64,
    /// Unclamped program optimum; negative when no vertex mixture weakly
    /// dominates the query point.
    pub raw_delta: f64,
    /// Mixture over vertices attaining the optimum.
    pub mixture_weights: Vec<f64>,
    /// Per-objective normalizers used by the program.
    pub ranges: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest `delta` such that some mixture of `vertices` dominates `j` by
/// `delta * ranges` in every objective. Returns the signed optimum and the
/// mixture.
fn signed_distance(
    vertices: &[ReturnVector],
    j: &ReturnVector,
    ranges: &[f64],
) -> Result<(f64, Vec<f64>), ParetoError> {
    let k = vertices.len();
    let d = j.dim();
    // Variables: alpha_0..alpha_{k-1}, delta_plus, delta_minus, s_0..s_{d-1}.
    let n = k + 2 + d;
    let m_rows = d + 1;
    let mut a = vec![0.0; m_rows * n];
    let mut b = vec![0.0; m_rows];
    for i in 0..d {
        for (q, v) in vertices.iter().enumerate() {
            a[i * n + q] = v.values[i];
        }
        a[i * n + k] = -ranges[i];
        a[i * n + k + 1] = ranges[i];
        a[i * n + k + 2 + i] = -1.0;
        b[i] = j.values[i];
    }
    for q in 0..k {
        a[d * n + q] = 1.0;
    }
    b[d] = 1.0;
    let mut c = vec![0.0; n];
    c[k] = 1.0;
    c[k + 1] = -1.0;

    let sol = simplex::maximize(&c, &a, &b, m_rows, n).map_err(|e| ParetoError::Lp(e.to_string()))?;
    let raw = sol.x[k] - sol.x[k + 1];
    Ok((raw, sol.x[..k].to_vec()))
}

/// Normalized sup-norm distance of `j` below the front, with the optimal
/// dominating mixture. Zero when `j` lies on the front or its mixture hull.
pub fn linf_pareto_distance(front: &ParetoFront, j: &ReturnVector) -> Result<DistanceReport, ParetoError> {
    if front.is_empty() {
        return Err(ParetoError::EmptyFront);
    }
    if j.dim() != front.num_objectives() {
        return Err(ParetoError::Dimension(format!(
            "query has {} objectives, front has {}",
            j.dim(),
            front.num_objectives()
        )));
    }
    let ranges = front.ranges();
    let (raw, mixture) = signed_distance(&front.vertices, j, &ranges)?;
    Ok(DistanceReport {
        delta: raw.max(0.0),
        raw_delta: raw,
        mixture_weights: mixture,
        ranges,
    })
}

/// True when some vertex mixture dominates `j` by strictly more than
/// `eps * ranges`.
pub fn is_dominated(front: &ParetoFront, j: &ReturnVector, eps: f64) -> Result<bool, ParetoError> {
    if eps < 0.0 {
        return Err(ParetoError::Parameter(format!("eps must be >= 0, got {eps}")));
    }
    Ok(linf_pareto_distance(front, j)?.delta > eps)
}

fn solve_at(m: &TabularMOMDP, w: &[f64]) -> Result<(ReturnVector, DeterministicPolicy), ParetoError> {
    let sol = scalarized_value_iteration(m, w, VI_TOL)?;
    let j = evaluate_returns(m, &sol.policy)?;
    Ok((j, sol.policy))
}

fn push_unique(found: &mut Vec<(ReturnVector, DeterministicPolicy)>, j: ReturnVector, p: DeterministicPolicy) -> bool {
    if found.iter().any(|(v, _)| v.linf_distance(&j) <= VALUE_MERGE_TOL) {
        return false;
    }
    found.push((j, p));
    true
}

/// Exact front of a 1- to 3-objective model.
///
/// For two objectives, corner-weight bisection: start at near-extreme
/// weights, test the tie weight of each adjacent value pair, and keep any
/// policy improving the tie value by more than `tol`. For three, candidate
/// weights come from the weight-space arrangement of the discovered value
/// vectors (triple intersections, pair intersections on the simplex boundary,
/// and the corners), iterated to a fixed point.
pub fn ols_front(m: &TabularMOMDP, tol: f64) -> Result<ParetoFront, ParetoError> {
    if !(tol > 0.0) {
        return Err(ParetoError::Parameter("tolerance must be positive".into()));
    }
    let found = match m.num_objectives() {
        1 => {
            let (j, p) = solve_at(m, &[1.0])?;
            vec![(j, p)]
        }
        2 => ols_two(m, tol)?,
        3 => ols_three(m, tol)?,
        d => return Err(ParetoError::UnsupportedObjectives(d)),
    };
    assemble_front(found)
}

fn ols_two(m: &TabularMOMDP, tol: f64) -> Result<Vec<(ReturnVector, DeterministicPolicy)>, ParetoError> {
    let e = OLS_EPS;
    let (jl, pl) = solve_at(m, &[1.0 - e, e])?;
    let (jr, pr) = solve_at(m, &[e, 1.0 - e])?;
    let mut found = Vec::new();
    push_unique(&mut found, jl.clone(), pl);
    push_unique(&mut found, jr.clone(), pr);

    let mut stack = vec![(jl, jr)];
    let mut guard = 0usize;
    while let Some((ja, jb)) = stack.pop() {
        guard += 1;
        if guard > 100_000 {
            return Err(ParetoError::Parameter("front search did not terminate".into()));
        }
        // Orient so `ja` is the objective-1-heavy endpoint; a degenerate
        // segment has no interior tie weight.
        let d1 = ja.values[0] - jb.values[0];
        let d2 = ja.values[1] - jb.values[1];
        if d1 <= 1e-12 || d2 >= -1e-12 {
            continue;
        }
        let w1 = -d2 / (d1 - d2);
        let w = [w1, 1.0 - w1];
        let tie = dot(&w, &ja.values).max(dot(&w, &jb.values));
        let (jn, pn) = solve_at(m, &w)?;
        if dot(&w, &jn.values) > tie + tol {
            let is_new = push_unique(&mut found, jn.clone(), pn);
            if is_new {
                stack.push((ja, jn.clone()));
                stack.push((jn, jb));
            }
        }
    }
    Ok(found)
}

fn ols_three(m: &TabularMOMDP, tol: f64) -> Result<Vec<(ReturnVector, DeterministicPolicy)>, ParetoError> {
    let e = OLS_EPS;
    let seeds: Vec<[f64; 3]> = vec![
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0 - 2.0 * e, e, e],
        [e, 1.0 - 2.0 * e, e],
        [e, e, 1.0 - 2.0 * e],
    ];
    let mut found: Vec<(ReturnVector, DeterministicPolicy)> = Vec::new();
    let mut visited: Vec<[f64; 3]> = Vec::new();

    for _pass in 0..100 {
        let mut cands = seeds.clone();
        let values: Vec<&ReturnVector> = found.iter().map(|(v, _)| v).collect();
        for (qa, va) in values.iter().enumerate() {
            for vb in values.iter().skip(qa + 1) {
                boundary_ties(va, vb, &mut cands);
            }
        }
        for (qa, va) in values.iter().enumerate() {
            for (qb, vb) in values.iter().enumerate().skip(qa + 1) {
                for vc in values.iter().skip(qb + 1) {
                    triple_tie(va, vb, vc, &mut cands);
                }
            }
        }

        let mut improved = false;
        for w in cands {
            if visited
                .iter()
                .any(|u| (0..3).all(|i| (u[i] - w[i]).abs() <= WEIGHT_DEDUP_TOL))
            {
                continue;
            }
            visited.push(w);
            let (jn, pn) = solve_at(m, &w)?;
            let vn = dot(&w, &jn.values);
            let env = found
                .iter()
                .map(|(v, _)| dot(&w, &v.values))
                .fold(f64::NEG_INFINITY, f64::max);
            if vn > env + tol && push_unique(&mut found, jn, pn) {
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(found)
}

/// Tie weights of two value vectors on each face `w_i = 0` of the simplex.
fn boundary_ties(va: &ReturnVector, vb: &ReturnVector, out: &mut Vec<[f64; 3]>) {
    for i in 0..3 {
        let j = (i + 1) % 3;
        let k = (i + 2) % 3;
        let dj = va.values[j] - vb.values[j];
        let dk = va.values[k] - vb.values[k];
        let denom = dk - dj;
        if denom.abs() < 1e-14 {
            continue;
        }
        let wj = dk / denom;
        if !(0.0..=1.0).contains(&wj) {
            continue;
        }
        let mut w = [0.0; 3];
        w[j] = wj;
        w[k] = 1.0 - wj;
        out.push(w);
    }
}

/// Interior weight where three value vectors scalarize equally, if it exists.
fn triple_tie(va: &ReturnVector, vb: &ReturnVector, vc: &ReturnVector, out: &mut Vec<[f64; 3]>) {
    let r0 = [
        va.values[0] - vb.values[0],
        va.values[1] - vb.values[1],
        va.values[2] - vb.values[2],
    ];
    let r1 = [
        va.values[0] - vc.values[0],
        va.values[1] - vc.values[1],
        va.values[2] - vc.values[2],
    ];
    let mat = Matrix3::new(
        r0[0], r0[1], r0[2], //
        r1[0], r1[1], r1[2], //
        1.0, 1.0, 1.0,
    );
    let Some(w) = mat.lu().solve(&Vector3::new(0.0, 0.0, 1.0)) else {
        return;
    };
    if w.iter().any(|&wi| wi < -1e-9 || !wi.is_finite()) {
        return;
    }
    let clamped = [w[0].max(0.0), w[1].max(0.0), w[2].max(0.0)];
    let s: f64 = clamped.iter().sum();
    if !(0.5..=1.5).contains(&s) {
        return;
    }
    out.push([clamped[0] / s, clamped[1] / s, clamped[2] / s]);
}

/// Drop non-extreme values, order deterministically, and attach supporting
/// weights found by margin maximization.
fn assemble_front(found: Vec<(ReturnVector, DeterministicPolicy)>) -> Result<ParetoFront, ParetoError> {
    if found.is_empty() {
        return Err(ParetoError::EmptyFront);
    }
    let d = found[0].0.dim();
    let ranges: Vec<f64> = (0..d)
        .map(|i| {
            let lo = found.iter().map(|(v, _)| v.values[i]).fold(f64::INFINITY, f64::min);
            let hi = found
                .iter()
                .map(|(v, _)| v.values[i])
                .fold(f64::NEG_INFINITY, f64::max);
            if hi - lo > FLAT_RANGE_TOL {
                hi - lo
            } else {
                1.0
            }
        })
        .collect();

    let mut kept: Vec<(ReturnVector, DeterministicPolicy)> = Vec::new();
    for (idx, (v, p)) in found.iter().enumerate() {
        let others: Vec<ReturnVector> = found
            .iter()
            .enumerate()
            .filter(|(q, _)| *q != idx)
            .map(|(_, (u, _))| u.clone())
            .collect();
        if others.is_empty() {
            kept.push((v.clone(), p.clone()));
            continue;
        }
        let (raw, _) = signed_distance(&others, v, &ranges)?;
        // A mixture of the others reaching v (within tolerance) means v is a
        // face point or dominated, not an extreme vertex.
        if raw < -EXTREME_DROP_TOL {
            kept.push((v.clone(), p.clone()));
        }
    }
    kept.sort_by(|(a, _), (b, _)| {
        b.values
            .iter()
            .zip(&a.values)
            .map(|(x, y)| x.partial_cmp(y).unwrap())
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let vertices: Vec<ReturnVector> = kept.iter().map(|(v, _)| v.clone()).collect();
    let witnesses: Vec<DeterministicPolicy> = kept.into_iter().map(|(_, p)| p).collect();
    let weights = supporting_weights(&vertices)?;
    ParetoFront::new(vertices, weights, witnesses)
}

/// For each vertex, a strictly positive unit-1-norm weight maximizing its
/// scalarized margin over the other vertices.
fn supporting_weights(vertices: &[ReturnVector]) -> Result<Vec<Vec<f64>>, ParetoError> {
    let d = vertices[0].dim();
    let k = vertices.len();
    let mut out = Vec::with_capacity(k);
    for (idx, v) in vertices.iter().enumerate() {
        if k == 1 {
            out.push(vec![1.0 / d as f64; d]);
            continue;
        }
        // Variables: w_0..w_{d-1}, t, one slack per other vertex.
        // Maximize t subject to w.(v - u) - t - s_u = 0 and sum(w) = 1.
        let others: Vec<&ReturnVector> = vertices
            .iter()
            .enumerate()
            .filter(|(q, _)| *q != idx)
            .map(|(_, u)| u)
            .collect();
        let n = d + 1 + others.len();
        let m_rows = others.len() + 1;
        let mut a = vec![0.0; m_rows * n];
        let mut b = vec![0.0; m_rows];
        for (q, u) in others.iter().enumerate() {
            for i in 0..d {
                a[q * n + i] = v.values[i] - u.values[i];
            }
            a[q * n + d] = -1.0;
            a[q * n + d + 1 + q] = -1.0;
        }
        for i in 0..d {
            a[others.len() * n + i] = 1.0;
        }
        b[others.len()] = 1.0;
        let mut c = vec![0.0; n];
        c[d] = 1.0;
        let sol = simplex::maximize(&c, &a, &b, m_rows, n).map_err(|e| ParetoError::Lp(e.to_string()))?;
        let t = sol.objective;
        // Tableau roundoff leaves the solved weight a few ulps off the
        // simplex; renormalize before blending.
        let w_sum: f64 = sol.x[..d].iter().sum();
        let w_star: Vec<f64> = sol.x[..d].iter().map(|&wi| wi / w_sum).collect();

        // Blend toward uniform just enough to stay strictly inside the
        // positive orthant without giving up the margin.
        let spread = others
            .iter()
            .map(|u| v.linf_distance(u))
            .fold(0.0, f64::max)
            .max(1e-12);
        let beta = if t > 0.0 {
            (t / (2.0 * (t + spread))).min(OLS_EPS)
        } else {
            1e-9
        };
        let w: Vec<f64> = w_star
            .iter()
            .map(|&wi| (1.0 - beta) * wi + beta / d as f64)
            .collect();
        out.push(w);
    }
    Ok(out)
}

/// Connect two `w`-optimal deterministic policies by flipping the action of
/// each differing state in ascending state order, verifying every
/// intermediate stays `w`-optimal within `tol`. Returns the full path
/// including both endpoints.
pub fn pareto_path(
    m: &TabularMOMDP,
    pi_a: &DeterministicPolicy,
    pi_b: &DeterministicPolicy,
    w: &[f64],
    tol: f64,
) -> Result<Vec<DeterministicPolicy>, ParetoError> {
    if w.len() != m.num_objectives() {
        return Err(ParetoError::Dimension(format!(
            "weight has {} entries, expected {}",
            w.len(),
            m.num_objectives()
        )));
    }
    if w.iter().any(|&wi| wi <= 0.0 || !wi.is_finite()) {
        return Err(ParetoError::Parameter(
            "weight must be componentwise positive".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(ParetoError::Parameter("tolerance must be positive".into()));
    }

    let sol = scalarized_value_iteration(m, w, VI_TOL.min(tol))?;
    let v_star = sol.initial_value(m);
    let scalar_value = |p: &DeterministicPolicy| -> Result<f64, ParetoError> {
        Ok(dot(w, &evaluate_returns(m, p)?.values))
    };
    for (which, p) in [('A', pi_a), ('B', pi_b)] {
        let got = scalar_value(p)?;
        if got < v_star - tol {
            return Err(ParetoError::NotOptimal {
                which,
                got,
                want: v_star - tol,
            });
        }
    }

    let mut path = vec![pi_a.clone()];
    let mut cur = pi_a.clone();
    for s in 0..m.num_states() {
        if cur.action(s) != pi_b.action(s) {
            cur = cur.with_action(s, pi_b.action(s));
            let got = scalar_value(&cur)?;
            if got < v_star - tol {
                return Err(ParetoError::PathVerification {
                    state: s,
                    got,
                    want: v_star - tol,
                });
            }
            path.push(cur.clone());
        }
    }
    Ok(path)
}

/// Deterministic policies sharing one exact return vector.
#[derive(Debug, Clone)]
pub struct AliasingGroup {
    pub value: ReturnVector,
    pub policies: Vec<DeterministicPolicy>,
}

/// Partition all deterministic policies by return vector (merged within
/// [`VALUE_MERGE_TOL`]), in enumeration order of first appearance.
pub fn aliasing_groups(m: &TabularMOMDP, cap: usize) -> Result<Vec<AliasingGroup>, ParetoError> {
    let policies = enumerate_deterministic_policies(m, cap)?;
    let mut groups: Vec<AliasingGroup> = Vec::new();
    for p in policies {
        let j = evaluate_returns(m, &p)?;
        match groups
            .iter_mut()
            .find(|g| g.value.linf_distance(&j) <= VALUE_MERGE_TOL)
        {
            Some(g) => g.policies.push(p),
            None => groups.push(AliasingGroup {
                value: j,
                policies: vec![p],
            }),
        }
    }
    Ok(groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::momdp::TabularMOMDP;

    /// One state, three actions: rewards [1,0], [0,1], and [0.5+a, 0.5+a].
    fn counterexample(alpha: f64, gamma: f64) -> TabularMOMDP {
        TabularMOMDP::new(
            1,
            3,
            2,
            gamma,
            vec![1.0],
            vec![1.0, 1.0, 1.0],
            vec![1.0, 0.0, 0.0, 1.0, 0.5 + alpha, 0.5 + alpha],
        )
        .unwrap()
    }

    fn counterexample_front() -> ParetoFront {
        ols_front(&counterexample(1.0 / 3.0, 0.9), 1e-9).unwrap()
    }

    #[test]
    fn front_of_counterexample_has_three_vertices() {
        let front = counterexample_front();
        assert_eq!(front.len(), 3);
        let expect = [[10.0, 0.0], [25.0 / 3.0, 25.0 / 3.0], [0.0, 10.0]];
        for (v, e) in front.vertices.iter().zip(expect) {
            assert!((v.values[0] - e[0]).abs() < 1e-8, "{:?} vs {e:?}", v.values);
            assert!((v.values[1] - e[1]).abs() < 1e-8);
        }
        for w in &front.supporting_weights {
            assert!(w.iter().all(|&wi| wi > 0.0));
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        assert_eq!(front.witness_policies.len(), 3);
    }

    #[test]
    fn front_vertices_are_mutually_non_dominated() {
        let front = counterexample_front();
        for (i, a) in front.vertices.iter().enumerate() {
            for (j, b) in front.vertices.iter().enumerate() {
                if i != j {
                    assert!(!a.dominates(b, 1e-9), "vertex {i} dominates vertex {j}");
                }
            }
        }
    }

    #[test]
    fn distance_fixture_midpoint_returns() {
        let front = counterexample_front();
        let rep = linf_pareto_distance(&front, &ReturnVector { values: vec![5.0, 5.0] }).unwrap();
        assert!((rep.delta - 1.0 / 3.0).abs() < 1e-9, "delta {}", rep.delta);
        assert!((rep.ranges[0] - 10.0).abs() < 1e-8);
        let alpha_sum: f64 = rep.mixture_weights.iter().sum();
        assert!((alpha_sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn distance_zero_on_vertices_and_faces() {
        let front = counterexample_front();
        for v in &front.vertices {
            let rep = linf_pareto_distance(&front, v).unwrap();
            assert!(rep.delta.abs() < 1e-9, "vertex delta {}", rep.delta);
        }
        let a = &front.vertices[0].values;
        let b = &front.vertices[1].values;
        for lam in [0.25, 0.5, 0.75] {
            let mid = ReturnVector {
                values: a.iter().zip(b).map(|(x, y)| lam * x + (1.0 - lam) * y).collect(),
            };
            let rep = linf_pareto_distance(&front, &mid).unwrap();
            assert!(rep.delta.abs() < 1e-9, "face delta {}", rep.delta);
        }
    }

    #[test]
    fn distance_of_origin_hits_middle_vertex() {
        let front = counterexample_front();
        let rep = linf_pareto_distance(&front, &ReturnVector { values: vec![0.0, 0.0] }).unwrap();
        assert!((rep.delta - 5.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn dominance_thresholds() {
        let front = counterexample_front();
        let j = ReturnVector { values: vec![5.0, 5.0] };
        assert!(is_dominated(&front, &j, 0.1).unwrap());
        assert!(!is_dominated(&front, &j, 0.4).unwrap());
        assert!(!is_dominated(&front, &front.vertices[0], 0.0).unwrap());
    }

    #[test]
    fn distance_monotone_in_query() {
        let front = counterexample_front();
        let mut rng_state = 12345u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let j = ReturnVector {
                values: vec![next() * 10.0, next() * 10.0],
            };
            let bump = ReturnVector {
                values: vec![j.values[0] + next(), j.values[1] + next()],
            };
            let dj = linf_pareto_distance(&front, &j).unwrap().delta;
            let db = linf_pareto_distance(&front, &bump).unwrap().delta;
            assert!(db <= dj + 1e-8, "bump {db} vs base {dj}");
        }
    }

    #[test]
    fn single_objective_front_is_the_optimum() {
        let m = TabularMOMDP::new(1, 2, 1, 0.5, vec![1.0], vec![1.0, 1.0], vec![3.0, 1.0]).unwrap();
        let front = ols_front(&m, 1e-9).unwrap();
        assert_eq!(front.len(), 1);
        assert!((front.vertices[0].values[0] - 6.0).abs() < 1e-10);
        assert_eq!(front.supporting_weights[0], vec![1.0]);
    }

    /// Initial state 0 is absorbing, so states 1 and 2 are unreachable and
    /// their actions never matter.
    fn unreachable_tail() -> TabularMOMDP {
        let mut transitions = vec![0.0; 3 * 2 * 3];
        let mut set = |s: usize, a: usize, sp: usize| transitions[(s * 2 + a) * 3 + sp] = 1.0;
        set(0, 0, 0);
        set(0, 1, 0);
        set(1, 0, 1);
        set(1, 1, 2);
        set(2, 0, 2);
        set(2, 1, 1);
        let mut rewards = vec![0.0; 3 * 2 * 2];
        rewards[0] = 1.0; // r(0, a0) = [1, 0]
        rewards[2] = 0.5; // r(0, a1) = [0.5, 0.5]
        rewards[3] = 0.5;
        rewards[4] = 9.0; // unreachable rewards must not matter
        TabularMOMDP::new(3, 2, 2, 0.5, vec![1.0, 0.0, 0.0], transitions, rewards).unwrap()
    }

    #[test]
    fn aliasing_groups_collapse_unreachable_states() {
        let m = unreachable_tail();
        let groups = aliasing_groups(&m, 100).unwrap();
        // Two reachable choices at state 0, each repeated over 4 tail combos.
        assert_eq!(groups.len(), 2);
        for g in &groups {
            assert_eq!(g.policies.len(), 4);
        }
    }

    #[test]
    fn aliasing_groups_on_counterexample_and_zero_rewards() {
        let groups = aliasing_groups(&counterexample(1.0 / 3.0, 0.9), 10).unwrap();
        assert_eq!(groups.len(), 3);

        let flat = TabularMOMDP::new(1, 3, 2, 0.9, vec![1.0], vec![1.0; 3], vec![0.0; 6]).unwrap();
        let groups = aliasing_groups(&flat, 10).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].policies.len(), 3);
    }

    #[test]
    fn path_connects_aliased_optima() {
        let m = unreachable_tail();
        let w = [0.9, 0.1];
        // All four policies taking a0 at state 0 are w-optimal.
        let pi_a = DeterministicPolicy::new(vec![0, 0, 0]);
        let pi_b = DeterministicPolicy::new(vec![0, 1, 1]);
        let path = pareto_path(&m, &pi_a, &pi_b, &w, 1e-9).unwrap();
        assert_eq!(path.len(), 3);
        assert_eq!(path[0], pi_a);
        assert_eq!(path[2], pi_b);
        for pair in path.windows(2) {
            let differing = (0..3).filter(|&s| pair[0].action(s) != pair[1].action(s)).count();
            assert_eq!(differing, 1);
        }
    }

    #[test]
    fn path_identical_endpoints_and_suboptimal_inputs() {
        let m = counterexample(1.0 / 3.0, 0.9);
        let w = [0.5, 0.5];
        let best = DeterministicPolicy::new(vec![2]);
        let path = pareto_path(&m, &best, &best, &w, 1e-9).unwrap();
        assert_eq!(path.len(), 1);

        let bad = DeterministicPolicy::new(vec![0]);
        let err = pareto_path(&m, &bad, &best, &w, 1e-9).unwrap_err();
        assert!(matches!(err, ParetoError::NotOptimal { which: 'A', .. }));
    }

    #[test]
    fn three_objective_front_on_independent_arms() {
        // One state, four actions: three extreme arms and one dominated blend.
        let m = TabularMOMDP::new(
            1,
            4,
            3,
            0.5,
            vec![1.0],
            vec![1.0; 4],
            vec![
                1.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, //
                0.0, 0.0, 1.0, //
                0.3, 0.3, 0.3,
            ],
        )
        .unwrap();
        let front = ols_front(&m, 1e-9).unwrap();
        assert_eq!(front.len(), 3);
        for v in &front.vertices {
            let top = v.values.iter().fold(0.0f64, |acc, &x| acc.max(x));
            assert!((top - 2.0).abs() < 1e-9);
        }

        // Raising the blend above the mixture plane makes it a fourth vertex.
        let m = TabularMOMDP::new(
            1,
            4,
            3,
            0.5,
            vec![1.0],
            vec![1.0; 4],
            vec![
                1.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, //
                0.0, 0.0, 1.0, //
                0.4, 0.4, 0.4,
            ],
        )
        .unwrap();
        let front = ols_front(&m, 1e-9).unwrap();
        assert_eq!(front.len(), 4);
    }
}
