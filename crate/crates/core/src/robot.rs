//! Serial revolute-chain description, forward kinematics and pose targets.
//!
//! Links are numbered from the base (link 0) to the end link (link `n`);
//! joint `j` connects link `j` to link `j + 1`. A joint's axis and axis point
//! are given in the frame of link `j`, and `zero_transform` places link
//! `j + 1` relative to link `j` at zero joint angle, so
//!
//! ```text
//! F[j+1] = F[j] · exp(ξ_j θ_j) · zero_transform_j
//! ```
//!
//! The end effector sits at `ee_offset` in the end link's frame.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use nalgebra::{DMatrix, Matrix3, Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Joint angles in radians, one per joint.
pub type JointVector = Vec<f64>;

const UNIT_TOL: f64 = 1e-9;

/// Rigid motion `x ↦ R x + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Default for Transform {
    fn default() -> Self {
        Transform::identity()
    }
}

impl Transform {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Transform {
            rotation,
            translation,
        }
    }

    pub fn identity() -> Self {
        Transform::new(Matrix3::identity(), Vector3::zeros())
    }

    pub fn from_translation(t: Vector3<f64>) -> Self {
        Transform::new(Matrix3::identity(), t)
    }

    pub fn from_rotation(r: Matrix3<f64>) -> Self {
        Transform::new(r, Vector3::zeros())
    }

    /// Rotation by `angle` about the unit `axis` through `point`.
    pub fn rotation_about(axis: &Vector3<f64>, point: &Vector3<f64>, angle: f64) -> Self {
        let r = rot_about(axis, angle);
        Transform::new(r, point - r * point)
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Transform::new(rt, -(rt * self.translation))
    }

    pub fn compose(&self, other: &Transform) -> Transform {
        Transform::new(
            self.rotation * other.rotation,
            self.rotation * other.translation + self.translation,
        )
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// Largest entry of `|RᵀR − I|` together with `|det R − 1|`.
    pub fn orthonormality_error(&self) -> f64 {
        orthonormality_error(&self.rotation)
    }

    pub fn is_orthonormal(&self, tol: f64) -> bool {
        self.orthonormality_error() <= tol && self.translation.iter().all(|x| x.is_finite())
    }
}

impl std::ops::Mul for Transform {
    type Output = Transform;

    fn mul(self, rhs: Transform) -> Transform {
        self.compose(&rhs)
    }
}

pub fn orthonormality_error(r: &Matrix3<f64>) -> f64 {
    if r.iter().any(|x| !x.is_finite()) {
        return f64::INFINITY;
    }
    let g = r.transpose() * r - Matrix3::identity();
    g.amax().max((r.determinant() - 1.0).abs())
}

/// Rodrigues rotation about a unit axis.
pub fn rot_about(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    Rotation3::from_axis_angle(&Unit::new_unchecked(*axis), angle).into_inner()
}

pub fn rot_z(angle: f64) -> Matrix3<f64> {
    rot_about(&Vector3::z(), angle)
}

// JSON shape of a transform: translation plus row-major rotation.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct TransformFile {
    t: [f64; 3],
    #[serde(rename = "R")]
    r: [f64; 9],
}

impl From<&Transform> for TransformFile {
    fn from(tf: &Transform) -> Self {
        let m = &tf.rotation;
        TransformFile {
            t: [tf.translation.x, tf.translation.y, tf.translation.z],
            r: [
                m[(0, 0)],
                m[(0, 1)],
                m[(0, 2)],
                m[(1, 0)],
                m[(1, 1)],
                m[(1, 2)],
                m[(2, 0)],
                m[(2, 1)],
                m[(2, 2)],
            ],
        }
    }
}

impl From<&TransformFile> for Transform {
    fn from(f: &TransformFile) -> Self {
        Transform::new(Matrix3::from_row_slice(&f.r), Vector3::from(f.t))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct JointFile {
    axis: [f64; 3],
    point: [f64; 3],
    limits: [f64; 2],
    zero_transform: TransformFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ModelFile {
    base_frame: TransformFile,
    joints: Vec<JointFile>,
    #[serde(default)]
    ee_offset: [f64; 3],
}

/// One revolute joint.
#[derive(Clone, Debug, PartialEq)]
pub struct JointSpec {
    /// Unit axis in the frame of the link the joint is fixed to.
    pub axis: Vector3<f64>,
    /// A point on the axis, same frame, meters.
    pub point: Vector3<f64>,
    /// Admissible angles, radians.
    pub limits: Interval,
    /// Pose of the next link relative to this one at zero angle.
    pub zero_transform: Transform,
}

impl JointSpec {
    pub fn new(
        axis: Vector3<f64>,
        point: Vector3<f64>,
        limits: Interval,
        zero_transform: Transform,
    ) -> Self {
        JointSpec {
            axis,
            point,
            limits,
            zero_transform,
        }
    }

    /// `exp(ξ θ)` for this joint, in the frame of its parent link.
    pub fn motion(&self, theta: f64) -> Transform {
        Transform::rotation_about(&self.axis, &self.point, theta)
    }

    /// Axis expressed in the child link frame.
    pub fn axis_in_child(&self) -> Vector3<f64> {
        self.zero_transform.rotation.transpose() * self.axis
    }

    /// Axis point expressed in the child link frame.
    pub fn point_in_child(&self) -> Vector3<f64> {
        self.zero_transform.inverse().apply(&self.point)
    }

    /// Whether the angle (or one of its 2π-translates) lies within the limits.
    pub fn admits(&self, theta: f64) -> bool {
        [0.0, TAU, -TAU]
            .iter()
            .any(|k| self.limits.contains(theta + k))
    }

    /// Whether any member of `iv` (modulo 2π) lies within the limits.
    pub fn admits_interval(&self, iv: &Interval) -> bool {
        [0.0, TAU, -TAU].iter().any(|&k| {
            let shifted = *iv + Interval::point(k);
            shifted.intersects(&self.limits)
        })
    }

    /// Limits cover a full turn, so they never cut a self-motion curve.
    pub fn is_unbounded(&self) -> bool {
        self.limits.lo() <= -PI && self.limits.hi() >= PI
    }

    fn validate(&self, index: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(format!("joint {index}: {msg}")));
        if (self.axis.norm() - 1.0).abs() > UNIT_TOL {
            return bad(format!("axis norm {} is not 1", self.axis.norm()));
        }
        if self.point.iter().any(|x| !x.is_finite()) {
            return bad("axis point is not finite".into());
        }
        let (lo, hi) = (self.limits.lo(), self.limits.hi());
        if !(lo < hi) || lo < -TAU - 1e-12 || hi > TAU + 1e-12 {
            return bad(format!(
                "limits [{lo}, {hi}] must satisfy -2π ≤ lo < hi ≤ 2π"
            ));
        }
        if !self.zero_transform.is_orthonormal(UNIT_TOL) {
            return bad("zero_transform rotation is not orthonormal".into());
        }
        Ok(())
    }
}

/// A serial chain of revolute joints.
#[derive(Clone, Debug, PartialEq)]
pub struct RobotModel {
    base_frame: Transform,
    joints: Vec<JointSpec>,
    ee_offset: Vector3<f64>,
    // axis and axis point of each joint in its child link frame
    axis_child: Vec<Vector3<f64>>,
    point_child: Vec<Vector3<f64>>,
}

impl RobotModel {
    pub fn new(
        base_frame: Transform,
        joints: Vec<JointSpec>,
        ee_offset: Vector3<f64>,
    ) -> Result<Self> {
        if joints.is_empty() {
            return Err(Error::InvalidModel(
                "a model needs at least one joint".into(),
            ));
        }
        if !base_frame.is_orthonormal(UNIT_TOL) {
            return Err(Error::InvalidModel(
                "base_frame rotation is not orthonormal".into(),
            ));
        }
        if ee_offset.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidModel("ee_offset is not finite".into()));
        }
        for (i, j) in joints.iter().enumerate() {
            j.validate(i)?;
        }
        let axis_child = joints.iter().map(JointSpec::axis_in_child).collect();
        let point_child = joints.iter().map(JointSpec::point_in_child).collect();
        Ok(RobotModel {
            base_frame,
            joints,
            ee_offset,
            axis_child,
            point_child,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: ModelFile = serde_json::from_str(s).map_err(|e| Error::Json {
            context: "robot model".into(),
            source: e,
        })?;
        let joints = f
            .joints
            .iter()
            .enumerate()
            .map(|(i, j)| {
                let limits = Interval::try_new(j.limits[0], j.limits[1]).map_err(|_| {
                    Error::InvalidModel(format!("joint {i}: limits {:?} are reversed", j.limits))
                })?;
                Ok(JointSpec::new(
                    Vector3::from(j.axis),
                    Vector3::from(j.point),
                    limits,
                    Transform::from(&j.zero_transform),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        RobotModel::new(
            Transform::from(&f.base_frame),
            joints,
            Vector3::from(f.ee_offset),
        )
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        RobotModel::from_json_str(&s).map_err(|e| match e {
            Error::Json { source, .. } => Error::Json {
                context: path.display().to_string(),
                source,
            },
            other => other,
        })
    }

    pub fn to_json_string(&self) -> String {
        let f = ModelFile {
            base_frame: (&self.base_frame).into(),
            joints: self
                .joints
                .iter()
                .map(|j| JointFile {
                    axis: j.axis.into(),
                    point: j.point.into(),
                    limits: [j.limits.lo(), j.limits.hi()],
                    zero_transform: (&j.zero_transform).into(),
                })
                .collect(),
            ee_offset: self.ee_offset.into(),
        };
        serde_json::to_string_pretty(&f).expect("model serializes")
    }

    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn joints(&self) -> &[JointSpec] {
        &self.joints
    }

    pub fn base_frame(&self) -> &Transform {
        &self.base_frame
    }

    pub fn ee_offset(&self) -> &Vector3<f64> {
        &self.ee_offset
    }

    pub fn axis_in_child(&self, j: usize) -> &Vector3<f64> {
        &self.axis_child[j]
    }

    pub fn point_in_child(&self, j: usize) -> &Vector3<f64> {
        &self.point_child[j]
    }

    /// Copy of the model with different limits on one joint.
    pub fn with_limits(&self, joint: usize, limits: Interval) -> Result<Self> {
        let mut joints = self.joints.clone();
        joints[joint].limits = limits;
        RobotModel::new(self.base_frame, joints, self.ee_offset)
    }

    /// World frames of links `0..=n`.
    pub fn link_frames(&self, theta: &[f64]) -> Vec<Transform> {
        assert_eq!(theta.len(), self.dof(), "joint vector length");
        let mut frames = Vec::with_capacity(self.dof() + 1);
        let mut f = self.base_frame;
        frames.push(f);
        for (j, &t) in self.joints.iter().zip(theta) {
            f = f * j.motion(t) * j.zero_transform;
            frames.push(f);
        }
        frames
    }

    /// End-effector pose.
    pub fn forward_kinematics(&self, theta: &[f64]) -> Transform {
        let last = *self.link_frames(theta).last().expect("at least one link");
        last * Transform::from_translation(self.ee_offset)
    }

    /// 6×n geometric Jacobian (linear rows first) of the end effector in world
    /// coordinates.
    pub fn geometric_jacobian(&self, theta: &[f64]) -> DMatrix<f64> {
        let frames = self.link_frames(theta);
        let ee = frames[self.dof()].apply(&self.ee_offset);
        let mut jac = DMatrix::zeros(6, self.dof());
        for (j, spec) in self.joints.iter().enumerate() {
            let w = frames[j].rotation * spec.axis;
            let q = frames[j].apply(&spec.point);
            let v = w.cross(&(ee - q));
            for k in 0..3 {
                jac[(k, j)] = v[k];
                jac[(k + 3, j)] = w[k];
            }
        }
        jac
    }

    pub fn within_limits(&self, theta: &[f64]) -> bool {
        self.joints
            .iter()
            .zip(theta)
            .all(|(j, &t)| j.limits.contains(t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoseMode {
    FullPose,
    PositionAndZAxis,
}

/// Desired end-effector pose.
#[derive(Clone, Debug, PartialEq)]
pub enum PoseTarget {
    FullPose {
        position: Vector3<f64>,
        rotation: Matrix3<f64>,
    },
    PositionAndZAxis {
        position: Vector3<f64>,
        z_axis: Vector3<f64>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
enum TargetFile {
    FullPose {
        position: [f64; 3],
        rotation: [f64; 9],
    },
    PositionAndZAxis {
        position: [f64; 3],
        z_axis: [f64; 3],
    },
}

impl PoseTarget {
    pub fn full_pose(position: Vector3<f64>, rotation: Matrix3<f64>) -> Result<Self> {
        let t = PoseTarget::FullPose { position, rotation };
        t.validate()?;
        Ok(t)
    }

    pub fn position_and_z_axis(position: Vector3<f64>, z_axis: Vector3<f64>) -> Result<Self> {
        let t = PoseTarget::PositionAndZAxis { position, z_axis };
        t.validate()?;
        Ok(t)
    }

    /// Target reproducing `pose` in the given mode.
    pub fn from_transform(pose: &Transform, mode: PoseMode) -> Self {
        match mode {
            PoseMode::FullPose => PoseTarget::FullPose {
                position: pose.translation,
                rotation: pose.rotation,
            },
            PoseMode::PositionAndZAxis => PoseTarget::PositionAndZAxis {
                position: pose.translation,
                z_axis: pose.rotation.column(2).into_owned(),
            },
        }
    }

    pub fn mode(&self) -> PoseMode {
        match self {
            PoseTarget::FullPose { .. } => PoseMode::FullPose,
            PoseTarget::PositionAndZAxis { .. } => PoseMode::PositionAndZAxis,
        }
    }

    pub fn position(&self) -> &Vector3<f64> {
        match self {
            PoseTarget::FullPose { position, .. }
            | PoseTarget::PositionAndZAxis { position, .. } => position,
        }
    }

    pub fn z_axis(&self) -> Vector3<f64> {
        match self {
            PoseTarget::FullPose { rotation, .. } => rotation.column(2).into_owned(),
            PoseTarget::PositionAndZAxis { z_axis, .. } => *z_axis,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.position().iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidTarget("position is not finite".into()));
        }
        match self {
            PoseTarget::FullPose { rotation, .. } => {
                if orthonormality_error(rotation) > UNIT_TOL {
                    return Err(Error::InvalidTarget("rotation is not orthonormal".into()));
                }
            }
            PoseTarget::PositionAndZAxis { z_axis, .. } => {
                if (z_axis.norm() - 1.0).abs() > UNIT_TOL {
                    return Err(Error::InvalidTarget(format!(
                        "z_axis norm {} is not 1",
                        z_axis.norm()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Position and orientation error of `pose` against the target. The
    /// orientation term is the rotation-vector norm for full poses and the
    /// z-axis misalignment angle otherwise.
    pub fn pose_error(&self, pose: &Transform) -> (f64, f64) {
        let (ep, er) = self.error_vectors(pose);
        (ep.norm(), er.norm())
    }

    /// Position error and world-frame rotation error vector.
    pub fn error_vectors(&self, pose: &Transform) -> (Vector3<f64>, Vector3<f64>) {
        let ep = self.position() - pose.translation;
        let er = match self {
            PoseTarget::FullPose { rotation, .. } => {
                // log map via atan2, which stays finite when rounding pushes
                // the trace cosine past ±1
                let r = rotation * pose.rotation.transpose();
                let v = 0.5
                    * Vector3::new(
                        r[(2, 1)] - r[(1, 2)],
                        r[(0, 2)] - r[(2, 0)],
                        r[(1, 0)] - r[(0, 1)],
                    );
                let s = v.norm();
                let c = 0.5 * (r.trace() - 1.0);
                if s > 1e-12 {
                    v * (s.atan2(c) / s)
                } else if c > 0.0 {
                    v
                } else {
                    // half turn: R + I = 2 a aᵀ, read the axis off its largest column
                    let b = 0.5 * (r + Matrix3::identity());
                    let k = (0..3)
                        .max_by(|&i, &j| b[(i, i)].total_cmp(&b[(j, j)]))
                        .unwrap_or(0);
                    b.column(k).into_owned() * (PI / b[(k, k)].max(f64::MIN_POSITIVE).sqrt())
                }
            }
            PoseTarget::PositionAndZAxis { z_axis, .. } => {
                let z = pose.rotation.column(2).into_owned();
                let c = z.cross(z_axis);
                let s = c.norm();
                let angle = s.atan2(z.dot(z_axis));
                if s > 1e-300 {
                    c * (angle / s)
                } else if angle > 1.0 {
                    // antiparallel: any perpendicular axis
                    let p = if z.x.abs() < 0.9 {
                        Vector3::x()
                    } else {
                        Vector3::y()
                    };
                    z.cross(&p).normalize() * angle
                } else {
                    Vector3::zeros()
                }
            }
        };
        (ep, er)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: TargetFile = serde_json::from_str(s).map_err(|e| Error::Json {
            context: "pose target".into(),
            source: e,
        })?;
        let t = match f {
            TargetFile::FullPose { position, rotation } => PoseTarget::FullPose {
                position: position.into(),
                rotation: Matrix3::from_row_slice(&rotation),
            },
            TargetFile::PositionAndZAxis { position, z_axis } => PoseTarget::PositionAndZAxis {
                position: position.into(),
                z_axis: z_axis.into(),
            },
        };
        t.validate()?;
        Ok(t)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        PoseTarget::from_json_str(&s).map_err(|e| match e {
            Error::Json { source, .. } => Error::Json {
                context: path.display().to_string(),
                source,
            },
            other => other,
        })
    }

    pub fn to_json_string(&self) -> String {
        let f = match self {
            PoseTarget::FullPose { position, rotation } => TargetFile::FullPose {
                position: (*position).into(),
                rotation: TransformFile::from(&Transform::from_rotation(*rotation)).r,
            },
            PoseTarget::PositionAndZAxis { position, z_axis } => TargetFile::PositionAndZAxis {
                position: (*position).into(),
                z_axis: (*z_axis).into(),
            },
        };
        serde_json::to_string_pretty(&f).expect("target serializes")
    }
}

/// Pose of a transform as JSON (`{"t": [...], "R": [...]}`).
pub fn transform_to_json(tf: &Transform) -> serde_json::Value {
    serde_json::to_value(TransformFile::from(tf)).expect("transform serializes")
}

/// Bundled example robots.
pub mod bundled {
    use super::RobotModel;

    pub const PLANAR_2R: &str = include_str!("../../../models/planar2r.json");
    pub const PLANAR_3R: &str = include_str!("../../../models/planar3r.json");
    pub const UR5: &str = include_str!("../../../models/ur5.json");
    pub const IIWA: &str = include_str!("../../../models/iiwa.json");

    pub const NAMES: [&str; 4] = ["planar2r", "planar3r", "ur5", "iiwa"];

    pub fn json(name: &str) -> Option<&'static str> {
        match name {
            "planar2r" => Some(PLANAR_2R),
            "planar3r" => Some(PLANAR_3R),
            "ur5" => Some(UR5),
            "iiwa" => Some(IIWA),
            _ => None,
        }
    }

    pub fn load(name: &str) -> Option<RobotModel> {
        json(name).map(|s| RobotModel::from_json_str(s).expect("bundled model is valid"))
    }

    pub fn planar_2r() -> RobotModel {
        load("planar2r").unwrap()
    }

    pub fn planar_3r() -> RobotModel {
        load("planar3r").unwrap()
    }

    pub fn ur5() -> RobotModel {
        load("ur5").unwrap()
    }

    pub fn iiwa() -> RobotModel {
        load("iiwa").unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn rotation_error_is_finite_everywhere() {
        let t = PoseTarget::from_transform(&Transform::identity(), PoseMode::FullPose);
        for angle in [0.0, 1e-9, 0.3, PI - 1e-9, PI] {
            let axis = Vector3::new(1.0, 2.0, 2.0) / 3.0;
            let pose = Transform::rotation_about(&axis, &Vector3::zeros(), angle);
            let (_, er) = t.error_vectors(&pose);
            assert!((er.norm() - angle).abs() < 1e-9, "{angle}: {er:?}");
            assert!(er.cross(&axis).norm() < 1e-6 * angle.max(1.0));
        }
        // identity perturbed so the trace cosine exceeds one
        let mut pose = Transform::identity();
        pose.rotation[(0, 0)] += 1e-15;
        pose.rotation[(0, 1)] = 1e-17;
        let (_, er) = t.error_vectors(&pose);
        assert!(er.iter().all(|e| e.is_finite()));
    }

    #[test]
    fn planar_2r_fk() {
        let m = bundled::planar_2r();
        let p = m.forward_kinematics(&[0.0, 0.0]);
        assert!((p.translation - Vector3::new(2.0, 0.0, 0.0)).norm() < 1e-12);
        assert!((p.rotation - Matrix3::identity()).amax() < 1e-12);
        let p = m.forward_kinematics(&[FRAC_PI_2, 0.0]);
        assert!((p.translation - Vector3::new(0.0, 2.0, 0.0)).norm() < 1e-12);
        let p = m.forward_kinematics(&[FRAC_PI_2, -FRAC_PI_2]);
        // x = c1 + c12, y = s1 + s12
        let (t1, t2) = (FRAC_PI_2, -FRAC_PI_2);
        let expect = Vector3::new(t1.cos() + (t1 + t2).cos(), t1.sin() + (t1 + t2).sin(), 0.0);
        assert!((p.translation - expect).norm() < 1e-12);
        assert!((p.translation - Vector3::new(1.0, 1.0, 0.0)).norm() < 1e-12);
        assert!(p.orthonormality_error() < 1e-9);
    }

    #[test]
    fn bundled_models_load() {
        for name in bundled::NAMES {
            let m = bundled::load(name).unwrap();
            assert!(m.dof() >= 2, "{name}");
        }
        let iiwa = bundled::iiwa();
        assert_eq!(iiwa.dof(), 7);
        assert!((iiwa.joints()[6].limits.hi() - 175f64.to_radians()).abs() < 1e-12);
        assert!((iiwa.joints()[1].limits.lo() + 120f64.to_radians()).abs() < 1e-12);
    }

    #[test]
    fn model_json_roundtrip() {
        let m = bundled::ur5();
        let back = RobotModel::from_json_str(&m.to_json_string()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_bad_models() {
        let mut v: serde_json::Value = serde_json::from_str(bundled::PLANAR_2R).unwrap();
        v["joints"][0]["axis"] = serde_json::json!([0.0, 0.0, 2.0]);
        let err = RobotModel::from_json_str(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("axis norm"), "{err}");

        let mut v: serde_json::Value = serde_json::from_str(bundled::PLANAR_2R).unwrap();
        v["joints"][1]["limits"] = serde_json::json!([-7.0, 1.0]);
        assert!(RobotModel::from_json_str(&v.to_string()).is_err());

        let mut v: serde_json::Value = serde_json::from_str(bundled::PLANAR_2R).unwrap();
        v["joints"][1]["zero_transform"]["R"] = serde_json::json!([1, 0, 0, 0, 1, 0, 0, 0, 2]);
        assert!(RobotModel::from_json_str(&v.to_string()).is_err());

        let err = RobotModel::from_json_str("{\"joints\": [}").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn target_json() {
        let t = PoseTarget::from_json_str(
            r#"{"mode":"position_and_z_axis","position":[1,1,0],"z_axis":[0,0,1]}"#,
        )
        .unwrap();
        assert_eq!(t.mode(), PoseMode::PositionAndZAxis);
        let back = PoseTarget::from_json_str(&t.to_json_string()).unwrap();
        assert_eq!(back, t);
        assert!(PoseTarget::from_json_str(
            r#"{"mode":"position_and_z_axis","position":[1,1,0],"z_axis":[0,0,2]}"#
        )
        .is_err());
        assert!(PoseTarget::from_json_str(
            r#"{"mode":"full_pose","position":[1,1,0],"rotation":[1,0,0,0,1,0,0,0,1]}"#
        )
        .is_ok());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let m = bundled::ur5();
        let th = [0.3, -0.7, 1.1, 0.4, -0.2, 0.9];
        let jac = m.geometric_jacobian(&th);
        let h = 1e-7;
        for j in 0..6 {
            let mut a = th;
            let mut b = th;
            a[j] += h;
            b[j] -= h;
            let pa = m.forward_kinematics(&a).translation;
            let pb = m.forward_kinematics(&b).translation;
            let d = (pa - pb) / (2.0 * h);
            for k in 0..3 {
                assert!((d[k] - jac[(k, j)]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn pose_error_modes() {
        let pose = Transform::new(rot_z(0.3), Vector3::new(1.0, 0.0, 0.0));
        let full = PoseTarget::from_transform(&pose, PoseMode::FullPose);
        assert_eq!(full.pose_error(&pose), (0.0, 0.0));
        let other = Transform::new(rot_z(0.5), Vector3::new(1.0, 0.0, 0.0));
        let (_, er) = full.pose_error(&other);
        assert!((er - 0.2).abs() < 1e-12);
        let zt = PoseTarget::from_transform(&pose, PoseMode::PositionAndZAxis);
        assert!(zt.pose_error(&other).1 < 1e-12);
    }
}
