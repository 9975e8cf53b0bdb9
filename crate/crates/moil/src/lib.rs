//! Workbench for multi-objective imitation learning on exactly solvable models.
//!
//! The crate is organized around a tabular multi-objective MDP core
//! ([`momdp`]), exact Pareto-front machinery ([`pareto`]), a set of benchmark
//! environments ([`envs`]), behavioral-cloning learners that share
//! conflict-free demonstrations across experts ([`imitation`]), and a
//! continuous linear-quadratic track ([`lqr`]). Plain-text serialization for
//! all artifacts lives in [`io`].
//!
//! Everything that feeds a reported number goes through exact linear algebra;
//! Monte Carlo appears only in data sampling and in test oracles.

pub mod envs;
pub mod imitation;
pub mod io;
pub mod lqr;
pub mod momdp;
pub mod pareto;
pub mod testkit;

pub use momdp::{DeterministicPolicy, ReturnVector, StochasticPolicy, TabularMOMDP};
pub use pareto::ParetoFront;
