//! Interval branch-and-bound inverse kinematics for serial revolute chains.
//!
//! The solver paves the full solution set of a pose target with small boxes
//! in the space of link rotation matrices, recovers guaranteed joint-angle
//! enclosures for each box, and (for one degree of redundancy) orders the boxes
//! into self-motion curves.

// negated comparisons are used on purpose so that NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contractor;
pub mod error;
pub mod interval;
pub mod local_ik;
pub mod paving;
pub mod recovery;
pub mod robot;
pub mod solution;
pub mod solver;
pub mod system;

pub use contractor::{Constraint, ConstraintKind, ContractionOperator, Expr, PointEvaluator};
pub use error::{Error, Result};
pub use interval::{BisectionRule, Interval, IntervalBox};
pub use paving::{CurveSet, EndpointKind, SelfMotionCurve};
pub use recovery::JointIntervalVector;
pub use robot::{JointSpec, JointVector, PoseMode, PoseTarget, RobotModel, Transform};
pub use solution::{SolutionBox, SolutionSet};
pub use solver::{
    solve, solve_target, ExplorationStrategy, SolveOutcome, SolverConfig, SolverMode, Termination,
};
pub use system::ConstraintSystem;
