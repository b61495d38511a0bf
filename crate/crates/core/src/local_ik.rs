//! Damped least-squares inverse kinematics from random restarts.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::robot::{JointVector, PoseTarget, RobotModel};

// largest joint update per iteration, radians
const MAX_STEP: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LocalIkConfig {
    pub max_iterations: usize,
    pub pose_tolerance: f64,
    pub damping_lambda: f64,
    pub max_restarts: usize,
}

impl Default for LocalIkConfig {
    fn default() -> Self {
        LocalIkConfig {
            max_iterations: 200,
            pose_tolerance: 1e-6,
            damping_lambda: 1e-3,
            max_restarts: 50,
        }
    }
}

impl LocalIkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.max_restarts == 0 {
            return Err(Error::InvalidConfig(
                "local IK needs at least one iteration and restart".into(),
            ));
        }
        if !(self.pose_tolerance > 0.0) || !(self.damping_lambda >= 0.0) {
            return Err(Error::InvalidConfig(
                "local IK tolerance and damping must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Move `t` into the limits, trying 2π translates before clamping.
fn into_limits(model: &RobotModel, theta: &mut [f64]) {
    for (t, j) in theta.iter_mut().zip(model.joints()) {
        let (lo, hi) = (j.limits.lo(), j.limits.hi());
        if *t >= lo && *t <= hi {
            continue;
        }
        let tau = std::f64::consts::TAU;
        let shifted = *t - tau * ((*t - lo) / tau).floor();
        *t = if shifted <= hi {
            shifted
        } else {
            t.clamp(lo, hi)
        };
    }
}

// Task error and the matching Jacobian rows. In z-axis mode rotations about
// the current approach axis are free, so that component is projected out.
fn task(
    model: &RobotModel,
    target: &PoseTarget,
    theta: &[f64],
) -> (DVector<f64>, DMatrix<f64>, f64) {
    let pose = model.forward_kinematics(theta);
    let (ep, er) = target.error_vectors(&pose);
    let mut jac = model.geometric_jacobian(theta);
    if let PoseTarget::PositionAndZAxis { .. } = target {
        let z: Vector3<f64> = pose.rotation.column(2).into_owned();
        let proj = Matrix3::identity() - z * z.transpose();
        for c in 0..jac.ncols() {
            let w = Vector3::new(jac[(3, c)], jac[(4, c)], jac[(5, c)]);
            let pw = proj * w;
            for k in 0..3 {
                jac[(3 + k, c)] = pw[k];
            }
        }
    }
    let err = DVector::from_iterator(6, ep.iter().chain(er.iter()).copied());
    // a NaN in either part must not read as converged
    let norm = if err.iter().all(|e| e.is_finite()) {
        ep.norm().max(er.norm())
    } else {
        f64::INFINITY
    };
    (err, jac, norm)
}

/// Jacobian of the task error: six rows for a full pose, with the rotation
/// rows projected off the current approach axis in z-axis mode.
pub fn task_jacobian(model: &RobotModel, target: &PoseTarget, theta: &[f64]) -> DMatrix<f64> {
    task(model, target, theta).1
}

/// Converge from `seed` to a configuration meeting `target`, staying within
/// joint limits.
pub fn solve_local(
    model: &RobotModel,
    target: &PoseTarget,
    seed: &[f64],
    cfg: &LocalIkConfig,
) -> Result<JointVector> {
    if seed.len() != model.dof() {
        return Err(Error::DimensionMismatch {
            expected: model.dof(),
            found: seed.len(),
        });
    }
    let mut theta = seed.to_vec();
    into_limits(model, &mut theta);
    let lambda2 = cfg.damping_lambda * cfg.damping_lambda;
    let mut err_norm = f64::INFINITY;
    for _ in 0..cfg.max_iterations {
        let (err, jac, norm) = task(model, target, &theta);
        err_norm = norm;
        if norm < cfg.pose_tolerance {
            return Ok(theta);
        }
        let jjt = &jac * jac.transpose() + DMatrix::identity(6, 6) * lambda2;
        let Some(chol) = jjt.cholesky() else {
            break;
        };
        let mut step = jac.transpose() * chol.solve(&err);
        let s = step.amax();
        if s > MAX_STEP {
            step *= MAX_STEP / s;
        }
        for (t, d) in theta.iter_mut().zip(step.iter()) {
            *t += d;
        }
        into_limits(model, &mut theta);
    }
    let (_, _, norm) = task(model, target, &theta);
    if norm < cfg.pose_tolerance {
        return Ok(theta);
    }
    Err(Error::NotConverged {
        iterations: cfg.max_iterations,
        error: err_norm.min(norm),
    })
}

/// Uniform sample inside the joint limits.
pub fn random_configuration(model: &RobotModel, rng: &mut impl Rng) -> JointVector {
    model
        .joints()
        .iter()
        .map(|j| rng.random_range(j.limits.lo()..=j.limits.hi()))
        .collect()
}

/// Outcome counters of one [`calc_new_sol`] call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LocalIkStats {
    pub restarts: usize,
    pub converged: usize,
    pub rejected_known: usize,
}

/// Random-restart local IK returning the first converged configuration that
/// `is_known` does not already cover.
pub fn calc_new_sol(
    model: &RobotModel,
    target: &PoseTarget,
    cfg: &LocalIkConfig,
    rng: &mut impl Rng,
    mut is_known: impl FnMut(&[f64]) -> bool,
) -> (Option<JointVector>, LocalIkStats) {
    let mut stats = LocalIkStats::default();
    for _ in 0..cfg.max_restarts {
        stats.restarts += 1;
        let seed = random_configuration(model, rng);
        if let Ok(theta) = solve_local(model, target, &seed, cfg) {
            stats.converged += 1;
            if !is_known(&theta) {
                return (Some(theta), stats);
            }
            stats.rejected_known += 1;
        }
    }
    (None, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robot::{bundled, PoseMode};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn planar_2r_nearest_branch() {
        let m = bundled::planar_2r();
        let t = PoseTarget::position_and_z_axis(Vector3::new(1.0, 1.0, 0.0), Vector3::z()).unwrap();
        let th = solve_local(&m, &t, &[0.1, 1.4], &LocalIkConfig::default()).unwrap();
        assert!(
            th[0].abs() < 1e-5 && (th[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-5,
            "{th:?}"
        );
        let th = solve_local(&m, &t, &[1.4, -1.4], &LocalIkConfig::default()).unwrap();
        assert!(
            (th[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-5
                && (th[1] + std::f64::consts::FRAC_PI_2).abs() < 1e-5
        );
    }

    #[test]
    fn seed_already_solved_returns_immediately() {
        let m = bundled::ur5();
        let theta = vec![0.3, -1.2, 1.0, 0.2, 0.7, -0.5];
        let t = PoseTarget::from_transform(&m.forward_kinematics(&theta), PoseMode::FullPose);
        let got = solve_local(&m, &t, &theta, &LocalIkConfig::default()).unwrap();
        assert_eq!(got, theta);
    }

    #[test]
    fn unreachable_target_does_not_converge() {
        let m = bundled::planar_2r();
        let t = PoseTarget::position_and_z_axis(Vector3::new(3.0, 0.0, 0.0), Vector3::z()).unwrap();
        let err = solve_local(&m, &t, &[0.2, 0.2], &LocalIkConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::NotConverged {
                iterations: 200,
                ..
            }
        ));
    }

    #[test]
    fn random_restarts_solve_ur5_and_iiwa() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in [bundled::ur5(), bundled::iiwa()] {
            let theta = random_configuration(&m, &mut rng);
            let pose = m.forward_kinematics(&theta);
            let t = PoseTarget::from_transform(&pose, PoseMode::FullPose);
            let (sol, stats) = calc_new_sol(&m, &t, &LocalIkConfig::default(), &mut rng, |_| false);
            let sol = sol.expect("converges");
            assert!(stats.converged == 1);
            let (ep, er) = t.pose_error(&m.forward_kinematics(&sol));
            assert!(ep < 1e-6 && er < 1e-6);
            assert!(m.within_limits(&sol));
        }
    }

    #[test]
    fn known_solutions_are_rejected() {
        let m = bundled::planar_2r();
        let t = PoseTarget::position_and_z_axis(Vector3::new(1.0, 1.0, 0.0), Vector3::z()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = LocalIkConfig {
            max_restarts: 10,
            ..Default::default()
        };
        let (sol, stats) = calc_new_sol(&m, &t, &cfg, &mut rng, |_| true);
        assert!(sol.is_none());
        assert_eq!(stats.restarts, 10);
        assert_eq!(stats.rejected_known, stats.converged);
    }

    #[test]
    fn wraps_into_limits() {
        let m = bundled::planar_2r();
        let mut th = vec![3.5, -7.0];
        into_limits(&m, &mut th);
        assert!((th[0] - (3.5 - std::f64::consts::TAU)).abs() < 1e-12);
        assert!(m.within_limits(&th));
    }
}
