//! Continuous control track: a linearized quadrotor, Riccati-optimal
//! experts, noisy demonstration sampling, compatibility-based cross-expert
//! pooling, ridge-regression controller recovery, and exact quadratic-cost
//! evaluation against a Riccati-swept front.
//!
//! State layout (12 dims): roll, pitch, yaw, X, Y, Z, then their rates
//! p, q, r, u, v, w. Actions (4 dims): thrust F and body torques. All
//! controllers use the `u = -Kx` sign convention.

use crate::momdp::ReturnVector;
use crate::pareto::{ParetoError, ParetoFront};
use nalgebra::{SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

pub const STATE_DIM: usize = 12;
pub const ACTION_DIM: usize = 4;

pub type StateVector = SVector<f64, STATE_DIM>;
pub type ActionVector = SVector<f64, ACTION_DIM>;
pub type GainMatrix = SMatrix<f64, ACTION_DIM, STATE_DIM>;
type Mat12 = SMatrix<f64, STATE_DIM, STATE_DIM>;
type Mat4 = SMatrix<f64, ACTION_DIM, ACTION_DIM>;

const DARE_MAX_ITERS: usize = 100_000;
const LYAPUNOV_MAX_DOUBLINGS: usize = 200;

#[derive(Debug, Error)]
pub enum LqrError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("Riccati iteration did not reach tolerance within {iterations} steps")]
    DareDiverged { iterations: usize },
    #[error("closed loop is unstable (spectral radius {rho})")]
    Unstable { rho: f64 },
    #[error("singular system in a linear solve")]
    Singular,
    #[error(transparent)]
    Front(#[from] ParetoError),
}

/// Discrete-time LTI dynamics `x' = Ax + Bu`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub a: Mat12,
    pub b: SMatrix<f64, STATE_DIM, ACTION_DIM>,
    pub dt: f64,
    pub gravity: f64,
}

/// Quadratic cost `x'Qx + u'Ru` with diagonal `Q` and `R = I`.
#[derive(Debug, Clone)]
pub struct LQRObjective {
    pub q: Mat12,
    pub r: Mat4,
}

impl LQRObjective {
    fn from_diag(diag: [f64; STATE_DIM]) -> Self {
        Self {
            q: Mat12::from_diagonal(&StateVector::from_column_slice(&diag)),
            r: Mat4::identity(),
        }
    }

    /// Heavy position tracking: diag(10,10,10, 100,100,100, 1 x6).
    pub fn tracking() -> Self {
        Self::from_diag([
            10.0, 10.0, 10.0, 100.0, 100.0, 100.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0,
        ])
    }

    /// Energy-lenient variant: diag(0.1,0.1,0.1, 1,1,1, 0.1 x6).
    pub fn eco() -> Self {
        Self::from_diag([0.1, 0.1, 0.1, 1.0, 1.0, 1.0, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1])
    }

    /// Convex blend `w_tracking * tracking + (1 - w_tracking) * eco`.
    pub fn blend(w_tracking: f64) -> Self {
        let t = Self::tracking();
        let e = Self::eco();
        Self {
            q: t.q * w_tracking + e.q * (1.0 - w_tracking),
            r: Mat4::identity(),
        }
    }
}

/// Static feedback law `u = -Kx`.
#[derive(Debug, Clone)]
pub struct LinearController {
    pub k: GainMatrix,
    /// Spectral norm of `K` in raw coordinates.
    pub lipschitz: f64,
}

impl LinearController {
    pub fn new(k: GainMatrix) -> Self {
        let lipschitz = spectral_norm(&k);
        Self { k, lipschitz }
    }

    pub fn action(&self, x: &StateVector) -> ActionVector {
        -(self.k * x)
    }
}

/// Result of [`solve_dare`]: cost-to-go matrix, gain, and convergence data.
#[derive(Debug, Clone)]
pub struct DareSolution {
    pub p: Mat12,
    pub controller: LinearController,
    pub residual: f64,
    pub iterations: usize,
}

/// Euler-discretized quadrotor linearized about hover.
///
/// Continuous-time rates: angle rates follow body rates, positions follow
/// velocities, `u' = -g*pitch`, `v' = g*roll`, `p' = 10*tau_x`,
/// `q' = 10*tau_y`, `r' = 6.6667*tau_z`, `w' = 5*F`; then `A = I + A_c*dt`
/// and `B = B_c*dt` with `dt = 0.05` and `g = 9.8`.
pub fn build_drone() -> LinearSystem {
    let dt = 0.05;
    let gravity = 9.8;
    let mut ac = Mat12::zeros();
    ac[(0, 6)] = 1.0; // roll rate
    ac[(1, 7)] = 1.0; // pitch rate
    ac[(2, 8)] = 1.0; // yaw rate
    ac[(3, 9)] = 1.0; // X velocity
    ac[(4, 10)] = 1.0; // Y velocity
    ac[(5, 11)] = 1.0; // Z velocity
    ac[(9, 1)] = -gravity; // pitch tilts the thrust vector along X
    ac[(10, 0)] = gravity; // roll tilts it along Y

    let mut bc = SMatrix::<f64, STATE_DIM, ACTION_DIM>::zeros();
    bc[(6, 1)] = 10.0; // roll torque
    bc[(7, 2)] = 10.0; // pitch torque
    bc[(8, 3)] = 6.6667; // yaw torque
    bc[(11, 0)] = 5.0; // thrust

    LinearSystem {
        a: Mat12::identity() + ac * dt,
        b: bc * dt,
        dt,
        gravity,
    }
}

/// The two experts at divergence `alpha`: objective blends
/// `(0.5 +- 0.5*alpha)` of tracking vs eco, with Riccati-optimal gains.
pub fn make_experts(
    sys: &LinearSystem,
    alpha: f64,
    tol: f64,
) -> Result<([LQRObjective; 2], [LinearController; 2]), LqrError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(LqrError::Parameter(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    let objectives = [
        LQRObjective::blend(0.5 + 0.5 * alpha),
        LQRObjective::blend(0.5 - 0.5 * alpha),
    ];
    let k1 = solve_dare(sys, &objectives[0], tol)?.controller;
    let k2 = solve_dare(sys, &objectives[1], tol)?.controller;
    Ok((objectives, [k1, k2]))
}

/// Fixed-point solution of the discrete algebraic Riccati equation.
///
/// Iterates `P <- Q + A'PA - A'PB (R + B'PB)^-1 B'PA` from `P = Q` until the
/// iterate moves less than `tol` in max norm, then reports the true residual
/// of the returned `P`. The gain is `K = (R + B'PB)^-1 B'PA`.
///
/// A `tol` below the float noise floor of the map (around `1e-13 * amax(P)`)
/// is not reachable; when the step size stops shrinking the iteration
/// accepts the fixed point found, and the reported residual tells the caller
/// how tight it actually is. Stability of the closed loop is still checked
/// either way.
pub fn solve_dare(
    sys: &LinearSystem,
    obj: &LQRObjective,
    tol: f64,
) -> Result<DareSolution, LqrError> {
    if tol <= 0.0 {
        return Err(LqrError::Parameter("tol must be positive".into()));
    }
    let mut p = obj.q;
    let mut iterations = 0;
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    loop {
        iterations += 1;
        if iterations > DARE_MAX_ITERS {
            return Err(LqrError::DareDiverged {
                iterations: DARE_MAX_ITERS,
            });
        }
        let next = riccati_map(sys, obj, &p)?;
        let next = (next + next.transpose()) * 0.5; // keep P exactly symmetric
        let diff = (next - p).amax();
        p = next;
        if diff <= tol {
            break;
        }
        if diff < 0.999 * best {
            best = diff;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > 500 {
                break;
            }
        }
    }
    let residual = (riccati_map(sys, obj, &p)? - p).amax();

    let btp = sys.b.transpose() * p;
    let gram = obj.r + btp * sys.b;
    let k = gram.try_inverse().ok_or(LqrError::Singular)? * btp * sys.a;
    let controller = LinearController::new(k);
    let rho = spectral_radius(&(sys.a - sys.b * controller.k));
    // The margin absorbs float error in rho so marginal closed loops
    // (repeated eigenvalues on the unit circle) classify as unstable.
    if rho >= 1.0 - 1e-9 {
        return Err(LqrError::Unstable { rho });
    }
    Ok(DareSolution {
        p,
        controller,
        residual,
        iterations,
    })
}

fn riccati_map(sys: &LinearSystem, obj: &LQRObjective, p: &Mat12) -> Result<Mat12, LqrError> {
    let btp = sys.b.transpose() * p; // 4x12
    let bpa = btp * sys.a; // 4x12
    let gram = obj.r + btp * sys.b;
    let inv = gram.try_inverse().ok_or(LqrError::Singular)?;
    Ok(obj.q + sys.a.transpose() * p * sys.a - bpa.transpose() * inv * bpa)
}

/// Largest eigenvalue magnitude.
///
/// Computed from Gelfand's formula with scaled repeated squaring: the
/// running product tracks `amax(M^(2^j))^(1/2^j)`, which converges to the
/// spectral radius. Sixty squarings put the polynomial correction from
/// Jordan blocks below 1e-12, and the iteration count is fixed, so
/// defective matrices (closed loops with repeated eigenvalues on the unit
/// circle) cannot stall it the way they can stall shifted-QR eigensolvers.
pub fn spectral_radius<const N: usize>(m: &SMatrix<f64, N, N>) -> f64 {
    let mut cur = *m;
    let mut acc = 0.0;
    let mut scale = 1.0; // 2^-j
    for _ in 0..=60 {
        let a = cur.amax();
        if a == 0.0 {
            return 0.0;
        }
        if !a.is_finite() {
            return f64::INFINITY;
        }
        acc += a.ln() * scale;
        scale *= 0.5;
        cur /= a;
        cur = cur * cur;
    }
    acc.exp()
}

/// Largest singular value, as the square root of the spectral radius of the
/// symmetric positive semidefinite Gram matrix `K K'`.
pub fn spectral_norm(k: &GainMatrix) -> f64 {
    spectral_radius(&(k * k.transpose())).sqrt()
}

/// Per-dimension min/max bounds for state and action coordinates.
#[derive(Debug, Clone)]
pub struct Normalization {
    pub state_lo: StateVector,
    pub state_hi: StateVector,
    pub action_lo: ActionVector,
    pub action_hi: ActionVector,
}

impl Normalization {
    pub fn fit<'a, I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (&'a StateVector, &'a ActionVector)>,
    {
        let mut out = Self {
            state_lo: StateVector::repeat(f64::INFINITY),
            state_hi: StateVector::repeat(f64::NEG_INFINITY),
            action_lo: ActionVector::repeat(f64::INFINITY),
            action_hi: ActionVector::repeat(f64::NEG_INFINITY),
        };
        for (x, u) in pairs {
            out.state_lo = out.state_lo.inf(x);
            out.state_hi = out.state_hi.sup(x);
            out.action_lo = out.action_lo.inf(u);
            out.action_hi = out.action_hi.sup(u);
        }
        out
    }

    pub fn merge(&self, other: &Self) -> Self {
        Self {
            state_lo: self.state_lo.inf(&other.state_lo),
            state_hi: self.state_hi.sup(&other.state_hi),
            action_lo: self.action_lo.inf(&other.action_lo),
            action_hi: self.action_hi.sup(&other.action_hi),
        }
    }

    /// Dimension widths; degenerate (or empty) dimensions map to width 1 so
    /// normalization leaves them fixed instead of dividing by zero.
    fn state_widths(&self) -> StateVector {
        self.state_hi.zip_map(&self.state_lo, |hi, lo| {
            if hi - lo > 0.0 && hi.is_finite() {
                hi - lo
            } else {
                1.0
            }
        })
    }

    fn action_widths(&self) -> ActionVector {
        self.action_hi.zip_map(&self.action_lo, |hi, lo| {
            if hi - lo > 0.0 && hi.is_finite() {
                hi - lo
            } else {
                1.0
            }
        })
    }

    pub fn normalize_state(&self, x: &StateVector) -> StateVector {
        (x - self.state_lo).component_div(&self.state_widths())
    }

    pub fn normalize_action(&self, u: &ActionVector) -> ActionVector {
        (u - self.action_lo).component_div(&self.action_widths())
    }
}

/// Spectral norm of the gain after rescaling rows and columns into the
/// normalized coordinates: the tightest Lipschitz constant of `x -> -Kx`
/// when both sides are measured in min/max units.
pub fn normalized_lipschitz(k: &GainMatrix, norm: &Normalization) -> f64 {
    let sw = norm.state_widths();
    let aw = norm.action_widths();
    let mut scaled = *k;
    for i in 0..ACTION_DIM {
        for j in 0..STATE_DIM {
            scaled[(i, j)] *= sw[j] / aw[i];
        }
    }
    spectral_norm(&scaled)
}

/// Demonstration pairs from one expert, with its own normalization bounds.
#[derive(Debug, Clone)]
pub struct ContinuousDemo {
    pub states: Vec<StateVector>,
    pub actions: Vec<ActionVector>,
    pub norm: Normalization,
}

impl ContinuousDemo {
    pub fn new(states: Vec<StateVector>, actions: Vec<ActionVector>) -> Self {
        assert_eq!(states.len(), actions.len(), "one action per state");
        let norm = Normalization::fit(states.iter().zip(actions.iter()));
        Self {
            states,
            actions,
            norm,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&StateVector, &ActionVector)> {
        self.states.iter().zip(self.actions.iter())
    }
}

/// Rolls out `n_traj` trajectories of `horizon` steps from standard-normal
/// starts under `u = -Kx + noise`, recording every `(x, u)` pair.
pub fn sample_demos(
    sys: &LinearSystem,
    controller: &LinearController,
    n_traj: usize,
    horizon: usize,
    noise_sigma: f64,
    seed: u64,
) -> ContinuousDemo {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(n_traj * horizon);
    let mut actions = Vec::with_capacity(n_traj * horizon);
    for _ in 0..n_traj {
        let mut x = StateVector::from_fn(|_, _| rng.sample(StandardNormal));
        for _ in 0..horizon {
            let noise = ActionVector::from_fn(|_, _| {
                noise_sigma * rng.sample::<f64, _>(StandardNormal)
            });
            let u = controller.action(&x) + noise;
            states.push(x);
            actions.push(u);
            x = sys.a * x + sys.b * u;
        }
    }
    ContinuousDemo::new(states, actions)
}

/// Output of [`pool_compatible`].
#[derive(Debug, Clone)]
pub struct PoolResult {
    /// The target's pairs followed by every accepted cross-expert pair, in
    /// raw coordinates.
    pub pairs: Vec<(StateVector, ActionVector)>,
    /// Accepted cross-expert pairs as `(demo index, pair index)`.
    pub accepted: Vec<(usize, usize)>,
    /// Accepted / offered cross-expert pairs (0 when none are offered).
    pub pooled_fraction: f64,
    /// For each accepted pair, its normalized action distance to the closest
    /// compatible target pair: an empirical bias proxy.
    pub action_bias: Vec<f64>,
}

/// Augments the target's dataset with every other-expert pair that has a
/// compatible target pair: state distance at most `delta` and action
/// distance within the `lipschitz` cone, both Euclidean in min/max
/// coordinates fitted over all provided data.
pub fn pool_compatible(
    target: &ContinuousDemo,
    others: &[ContinuousDemo],
    delta: f64,
    lipschitz: f64,
) -> PoolResult {
    assert!(delta >= 0.0, "delta must be non-negative");
    assert!(lipschitz >= 0.0, "lipschitz must be non-negative");
    let norm = others
        .iter()
        .fold(target.norm.clone(), |acc, d| acc.merge(&d.norm));

    let target_normed: Vec<(StateVector, ActionVector)> = target
        .pairs()
        .map(|(x, u)| (norm.normalize_state(x), norm.normalize_action(u)))
        .collect();

    let mut pairs: Vec<(StateVector, ActionVector)> =
        target.pairs().map(|(x, u)| (*x, *u)).collect();
    let mut accepted = Vec::new();
    let mut action_bias = Vec::new();
    let mut offered = 0usize;
    for (d_idx, demo) in others.iter().enumerate() {
        for (p_idx, (x, u)) in demo.pairs().enumerate() {
            offered += 1;
            let xn = norm.normalize_state(x);
            let un = norm.normalize_action(u);
            let mut best: Option<f64> = None;
            let mut bias = 0.0;
            for (tx, tu) in &target_normed {
                let dx = (xn - tx).norm();
                let du = (un - tu).norm();
                if dx <= delta && du <= lipschitz * dx && best.map_or(true, |b| dx < b) {
                    best = Some(dx);
                    bias = du;
                }
            }
            if best.is_some() {
                pairs.push((*x, *u));
                accepted.push((d_idx, p_idx));
                action_bias.push(bias);
            }
        }
    }
    let pooled_fraction = if offered == 0 {
        0.0
    } else {
        accepted.len() as f64 / offered as f64
    };
    PoolResult {
        pairs,
        accepted,
        pooled_fraction,
        action_bias,
    }
}

/// Ridge regression for `u = -Kx`: minimizes the squared action residual
/// plus `lambda` times the squared Frobenius norm of `K`, by normal
/// equations in raw coordinates.
pub fn ridge_fit(
    pairs: &[(StateVector, ActionVector)],
    lambda: f64,
) -> Result<LinearController, LqrError> {
    if lambda <= 0.0 {
        return Err(LqrError::Parameter("lambda must be positive".into()));
    }
    let mut s_xx = Mat12::identity() * lambda;
    let mut s_ax = GainMatrix::zeros();
    for (x, u) in pairs {
        s_xx += x * x.transpose();
        s_ax += u * x.transpose();
    }
    let inv = s_xx.try_inverse().ok_or(LqrError::Singular)?;
    Ok(LinearController::new(-(s_ax * inv)))
}

/// Exact quadratic returns of the closed loop `x' = (A - BK)x` from a
/// zero-mean start with covariance `init_cov * I`: for each base objective,
/// the negative expected infinite-horizon cost `-trace(P) * init_cov`, with
/// `P` the closed-loop Lyapunov solution for `Q + K'RK`.
pub fn evaluate_controller(
    sys: &LinearSystem,
    controller: &LinearController,
    q_bases: &[LQRObjective; 2],
    init_cov: f64,
) -> Result<ReturnVector, LqrError> {
    let a_cl = sys.a - sys.b * controller.k;
    let rho = spectral_radius(&a_cl);
    if rho >= 1.0 - 1e-9 {
        return Err(LqrError::Unstable { rho });
    }
    let mut values = Vec::with_capacity(2);
    for obj in q_bases {
        let m = obj.q + controller.k.transpose() * obj.r * controller.k;
        let p = lyapunov_doubling(&a_cl, &m)?;
        values.push(-p.trace() * init_cov);
    }
    Ok(ReturnVector { values })
}

/// Sums `sum_t (A')^t M A^t` by squaring: `S <- S + T'ST`, `T <- T^2`.
fn lyapunov_doubling(a_cl: &Mat12, m: &Mat12) -> Result<Mat12, LqrError> {
    let mut s = *m;
    let mut t = *a_cl;
    for _ in 0..LYAPUNOV_MAX_DOUBLINGS {
        if t.amax() < 1e-150 {
            return Ok(s);
        }
        s = s + t.transpose() * s * t;
        t = t * t;
    }
    // rho(a_cl) < 1 makes t vanish; reaching the cap means it did not.
    Err(LqrError::Unstable {
        rho: spectral_radius(a_cl),
    })
}

/// Sweeps `n_weights` tracking weights over [0, 1], solves each blend's
/// Riccati problem, evaluates the gains on the two base objectives, and
/// assembles the non-dominated vertices into a front. Witness policies are
/// not applicable here and stay empty.
pub fn continuous_front(
    sys: &LinearSystem,
    n_weights: usize,
    dare_tol: f64,
) -> Result<ParetoFront, LqrError> {
    if n_weights < 2 {
        return Err(LqrError::Parameter("need at least two weights".into()));
    }
    let bases = [LQRObjective::tracking(), LQRObjective::eco()];
    let mut candidates: Vec<(ReturnVector, Vec<f64>)> = Vec::with_capacity(n_weights);
    for i in 0..n_weights {
        // Front weights must stay strictly positive, so the sweep endpoints
        // move inward; solving the blend at the clamped weight keeps each
        // stored weight exactly the scalarization its vertex optimizes.
        let w = (i as f64 / (n_weights - 1) as f64).clamp(1e-6, 1.0 - 1e-6);
        let sol = solve_dare(sys, &LQRObjective::blend(w), dare_tol)?;
        let j = evaluate_controller(sys, &sol.controller, &bases, 1.0)?;
        candidates.push((j, vec![w, 1.0 - w]));
    }
    // Dominated or duplicated sweep points drop out.
    let mut kept: Vec<(ReturnVector, Vec<f64>)> = Vec::new();
    'outer: for (j, w) in candidates {
        for (other, _) in &kept {
            if other.linf_distance(&j) <= 1e-8 || other.dominates(&j, 1e-12) {
                continue 'outer;
            }
        }
        kept.retain(|(other, _)| !j.dominates(other, 1e-12));
        kept.push((j, w));
    }
    kept.sort_by(|(a, _), (b, _)| {
        b.values
            .partial_cmp(&a.values)
            .expect("finite returns")
    });
    let (vertices, weights): (Vec<_>, Vec<_>) = kept.into_iter().unzip();
    Ok(ParetoFront::new(vertices, weights, Vec::new())?)
}
