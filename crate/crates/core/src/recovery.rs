//! Joint angles from link rotations.
//!
//! For joint `j` the relative motion `F_j⁻¹ F_{j+1} Z_j⁻¹` is a rotation about
//! the joint axis. Picking unit vectors `a ⟂ d` and `b = d × a`, the angle is
//! `atan2(b · M a, a · M a)` with `M` the rotation part. Over a box of link
//! rotations both arguments are bilinear forms in which every matrix entry
//! appears once, so their interval evaluation is exact and the resulting angle
//! enclosure is guaranteed.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox};
use crate::robot::{JointSpec, RobotModel, Transform};
use crate::system::ConstraintSystem;

/// Default tolerance for deciding that a relative transform is a pure joint
/// rotation.
pub const MANIFOLD_TOL: f64 = 1e-4;

const ORTHO_TOL: f64 = 1e-6;

/// Twist of a revolute joint: unit axis `ω` and `v = -ω × p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistCoordinate {
    pub omega: Vector3<f64>,
    pub v: Vector3<f64>,
}

impl TwistCoordinate {
    pub fn of(joint: &JointSpec) -> Self {
        TwistCoordinate {
            omega: joint.axis,
            v: -joint.axis.cross(&joint.point),
        }
    }

    /// A point on the axis (the one closest to the origin).
    pub fn axis_point(&self) -> Vector3<f64> {
        self.omega.cross(&self.v)
    }
}

/// Joint-angle enclosure of one solution box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointIntervalVector {
    pub theta: Vec<Interval>,
    /// Enclosure touched the ±π branch cut and was widened to the full turn.
    pub wrapped: Vec<bool>,
}

impl JointIntervalVector {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Interval midpoints folded into `(-π, π]`.
    pub fn midpoint(&self) -> Vec<f64> {
        self.theta.iter().map(|t| wrap_angle(t.mid())).collect()
    }

    pub fn mean_width(&self) -> f64 {
        if self.theta.is_empty() {
            return 0.0;
        }
        self.theta.iter().map(Interval::width).sum::<f64>() / self.theta.len() as f64
    }

    pub fn max_width(&self) -> f64 {
        self.theta.iter().map(Interval::width).fold(0.0, f64::max)
    }

    /// Whether the enclosure contains `theta`, comparing angles modulo 2π.
    pub fn contains(&self, theta: &[f64]) -> bool {
        self.theta
            .iter()
            .zip(theta)
            .all(|(iv, &t)| contains_angle(iv, t, 0.0))
    }

    /// Same as [`contains`](Self::contains) with every interval widened by `tol`.
    pub fn contains_within(&self, theta: &[f64], tol: f64) -> bool {
        self.theta
            .iter()
            .zip(theta)
            .all(|(iv, &t)| contains_angle(iv, t, tol))
    }
}

/// Angle folded into `(-π, π]`.
pub fn wrap_angle(t: f64) -> f64 {
    let r = t.rem_euclid(std::f64::consts::TAU);
    if r > std::f64::consts::PI {
        r - std::f64::consts::TAU
    } else {
        r
    }
}

/// `iv` (widened by `tol`) contains some 2π-translate of `t`.
pub fn contains_angle(iv: &Interval, t: f64, tol: f64) -> bool {
    let w = iv.inflate(tol);
    [0.0, std::f64::consts::TAU, -std::f64::consts::TAU]
        .iter()
        .any(|k| w.contains(t + k))
}

/// `F_i⁻¹ · F_{i+1}` after checking both frames are rigid motions.
pub fn relative_transform(fi: &Transform, fi1: &Transform) -> Result<Transform> {
    for (name, f) in [("F_i", fi), ("F_i+1", fi1)] {
        let e = f.orthonormality_error();
        if e > ORTHO_TOL {
            return Err(Error::NonOrthonormal(format!(
                "{name} deviates from a rotation by {e:.3e}"
            )));
        }
    }
    Ok(fi.inverse() * *fi1)
}

// unit vector perpendicular to d, and d × a
fn basis(d: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let e = if d.x.abs() <= d.y.abs() && d.x.abs() <= d.z.abs() {
        Vector3::x()
    } else if d.y.abs() <= d.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let a = d.cross(&e).normalize();
    (a, d.cross(&a))
}

/// Joint angle producing the relative transform `rel = F_i⁻¹ F_{i+1}`, in
/// `(-π, π]`. Fails when `rel` is not a rotation about the joint axis
/// followed by the joint's zero transform.
pub fn recover_angle(rel: &Transform, joint: &JointSpec) -> Result<f64> {
    recover_angle_tol(rel, joint, MANIFOLD_TOL)
}

pub fn recover_angle_tol(rel: &Transform, joint: &JointSpec, tol: f64) -> Result<f64> {
    let e = rel.orthonormality_error();
    if e > ORTHO_TOL {
        return Err(Error::NonOrthonormal(format!(
            "relative transform deviates from a rotation by {e:.3e}"
        )));
    }
    let m = *rel * joint.zero_transform.inverse();
    let d = joint.axis;
    let axis_dev = (m.rotation * d - d).norm();
    let (a, b) = basis(&d);
    let ma = m.rotation * a;
    let theta = b.dot(&ma).atan2(a.dot(&ma));
    // the rotation must fix the axis point
    let point_dev = (m.apply(&joint.point) - joint.point).norm();
    let deviation = axis_dev.max(point_dev);
    if deviation > tol {
        return Err(Error::OffManifold { deviation });
    }
    Ok(theta)
}

/// Angle of joint `j` from the world rotations of the links it connects.
pub fn angle_from_rotations(
    model: &RobotModel,
    j: usize,
    ri: &Matrix3<f64>,
    ri1: &Matrix3<f64>,
) -> f64 {
    let joint = &model.joints()[j];
    let (a, b) = basis(&joint.axis);
    let c = joint.zero_transform.rotation.transpose() * a;
    let rc = ri1 * c;
    let cos = (ri * a).dot(&rc);
    let sin = (ri * b).dot(&rc);
    sin.atan2(cos)
}

/// Joint angles of a system point, one per joint.
pub fn recover_theta(system: &ConstraintSystem, model: &RobotModel, x: &[f64]) -> Vec<f64> {
    let rots: Vec<Matrix3<f64>> = (0..=model.dof())
        .map(|l| system.link_rotation(l, x))
        .collect();
    (0..model.dof())
        .map(|j| angle_from_rotations(model, j, &rots[j], &rots[j + 1]))
        .collect()
}

/// Guaranteed joint-angle enclosures for every rotation configuration in `b`.
pub fn recover_joint_box(
    system: &ConstraintSystem,
    model: &RobotModel,
    b: &IntervalBox,
) -> JointIntervalVector {
    let n = model.dof();
    let mut theta = Vec::with_capacity(n);
    let mut wrapped = Vec::with_capacity(n);
    for (j, joint) in model.joints().iter().enumerate() {
        let (a, bb) = basis(&joint.axis);
        let c = joint.zero_transform.rotation.transpose() * a;
        let rc = system.rotate_interval(j + 1, b, &c);
        let ra = system.rotate_interval(j, b, &a);
        let rb = system.rotate_interval(j, b, &bb);
        let dot = |p: &[Interval; 3], q: &[Interval; 3]| p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
        let (t, w) = Interval::atan2(&dot(&rb, &rc), &dot(&ra, &rc));
        theta.push(t);
        wrapped.push(w);
    }
    JointIntervalVector { theta, wrapped }
}

/// Joint recovery at a single rotation configuration given as link frames.
pub fn recover_from_frames(model: &RobotModel, frames: &[Transform]) -> Result<Vec<f64>> {
    if frames.len() != model.dof() + 1 {
        return Err(Error::DimensionMismatch {
            expected: model.dof() + 1,
            found: frames.len(),
        });
    }
    model
        .joints()
        .iter()
        .enumerate()
        .map(|(j, joint)| recover_angle(&relative_transform(&frames[j], &frames[j + 1])?, joint))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robot::{bundled, PoseMode, PoseTarget};
    use std::f64::consts::PI;

    #[test]
    fn planar_quarter_turn() {
        let m = bundled::planar_2r();
        let theta = [0.0, PI / 2.0];
        let f = m.link_frames(&theta);
        let rel = relative_transform(&f[1], &f[2]).unwrap();
        let t = recover_angle(&rel, &m.joints()[1]).unwrap();
        assert!((t - PI / 2.0).abs() < 1e-12);
        let all = recover_from_frames(&m, &f).unwrap();
        assert!((all[0]).abs() < 1e-12);
    }

    #[test]
    fn recovers_every_bundled_model() {
        for name in bundled::NAMES {
            let m = bundled::load(name).unwrap();
            for s in 0..20 {
                let theta: Vec<f64> = (0..m.dof())
                    .map(|i| wrap_angle(0.37 * (s * 7 + i * 3) as f64 - 2.9))
                    .collect();
                let got = recover_from_frames(&m, &m.link_frames(&theta)).unwrap();
                for (g, t) in got.iter().zip(&theta) {
                    assert!((wrap_angle(g - t)).abs() < 1e-9, "{name}: {g} vs {t}");
                }
            }
        }
    }

    #[test]
    fn off_manifold_and_non_rigid_inputs() {
        let m = bundled::planar_2r();
        let j = &m.joints()[0];
        // rotation about x is not a motion of a z-axis joint
        let rel = Transform::rotation_about(&Vector3::x(), &Vector3::zeros(), 0.3);
        assert!(matches!(
            recover_angle(&rel, j),
            Err(Error::OffManifold { .. })
        ));
        // right rotation, wrong pivot
        let rel = Transform::rotation_about(&Vector3::z(), &Vector3::new(0.5, 0.0, 0.0), 0.3);
        let e = recover_angle(&rel, &m.joints()[1]).unwrap_err();
        assert!(matches!(e, Error::OffManifold { .. }));
        let mut bad = Transform::identity();
        bad.rotation[(0, 0)] = 2.0;
        assert!(matches!(
            relative_transform(&bad, &Transform::identity()),
            Err(Error::NonOrthonormal(_))
        ));
    }

    #[test]
    fn twist_axis_point() {
        let m = bundled::planar_3r();
        let tw = TwistCoordinate::of(&m.joints()[2]);
        let p = tw.axis_point();
        assert!((p - Vector3::new(2.0, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn box_enclosure_contains_point_angles() {
        let m = bundled::ur5();
        let theta = [0.2, -1.1, 0.9, 0.4, -0.6, 1.3];
        let t = PoseTarget::from_transform(&m.forward_kinematics(&theta), PoseMode::FullPose);
        let sys = ConstraintSystem::build(&m, &t).unwrap();
        let x = sys.point_from_theta(&m, &theta);
        let pt = recover_theta(&sys, &m, &x);
        for (a, b) in pt.iter().zip(&theta) {
            assert!((a - b).abs() < 1e-9);
        }
        for r in [0.0, 1e-6, 1e-3, 1e-2] {
            let b = IntervalBox::from_point(&x).inflate(r);
            let jb = recover_joint_box(&sys, &m, &b);
            assert!(jb.contains(&theta), "radius {r}: {jb:?}");
            if r == 0.0 {
                assert!(jb.max_width() < 1e-12);
            }
        }
    }

    #[test]
    fn box_across_branch_cut_stays_narrow() {
        let m = bundled::planar_2r();
        let theta = [3.1, -3.1];
        let t =
            PoseTarget::from_transform(&m.forward_kinematics(&theta), PoseMode::PositionAndZAxis);
        let sys = ConstraintSystem::build(&m, &t).unwrap();
        let x = sys.point_from_theta(&m, &theta);
        let jb = recover_joint_box(&sys, &m, &IntervalBox::from_point(&x).inflate(0.1));
        assert!(!jb.wrapped[0]);
        assert!(jb.theta[0].contains(PI) && jb.theta[0].width() < 1.0);
        assert!(jb.contains(&theta));
    }
}
