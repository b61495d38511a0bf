//! Independent oracles shared by the integration tests: closed-form inverse
//! kinematics for the planar arms and the UR5, brute-force joint grids and a
//! flood fill over sampled self-motion curves.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use ikpaver::robot::{bundled, PoseMode};
use ikpaver::{JointIntervalVector, PoseTarget, RobotModel, SolutionSet, Transform};
use nalgebra::{Matrix3, Vector3};

/// Angle folded into `(-π, π]`.
pub fn wrap(a: f64) -> f64 {
    let w = a - TAU * ((a + PI) / TAU).floor();
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// Distance between two angles on the circle.
pub fn angle_dist(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}

/// Largest per-joint circular distance.
pub fn joint_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| angle_dist(*x, *y))
        .fold(0.0, f64::max)
}

pub fn planar_target(x: f64, y: f64) -> PoseTarget {
    PoseTarget::position_and_z_axis(Vector3::new(x, y, 0.0), Vector3::z()).unwrap()
}

pub fn full_target(model: &RobotModel, theta: &[f64]) -> PoseTarget {
    PoseTarget::from_transform(&model.forward_kinematics(theta), PoseMode::FullPose)
}

/// Joint vector inside the box inflated by `infl`, modulo 2π.
pub fn covered(set: &SolutionSet, theta: &[f64], infl: f64) -> bool {
    set.iter()
        .any(|b| inflated_contains(&b.joints, theta, infl))
}

pub fn inflated_contains(j: &JointIntervalVector, theta: &[f64], infl: f64) -> bool {
    j.theta.iter().zip(theta).all(|(iv, &t)| {
        let c = iv.mid();
        let r = 0.5 * iv.width() + infl;
        r >= PI || angle_dist(c, t) <= r
    })
}

/// Both elbow branches of a planar two-link arm with link lengths `l1`, `l2`
/// reaching `p`, as (shoulder, elbow) angles.
pub fn two_link_ik(l1: f64, l2: f64, p: (f64, f64)) -> Vec<(f64, f64)> {
    let r2 = p.0 * p.0 + p.1 * p.1;
    let c = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    if !(-1.0..=1.0).contains(&c) {
        return Vec::new();
    }
    let e = c.acos();
    let mut out = Vec::new();
    for elbow in [e, -e] {
        let shoulder = p.1.atan2(p.0) - (l2 * elbow.sin()).atan2(l1 + l2 * elbow.cos());
        out.push((wrap(shoulder), wrap(elbow)));
        if e == 0.0 {
            break;
        }
    }
    out
}

/// Planar position of a unit-link chain with relative angles `theta`.
pub fn planar_fk(theta: &[f64]) -> (f64, f64) {
    let (mut x, mut y, mut phi) = (0.0, 0.0, 0.0);
    for t in theta {
        phi += t;
        x += phi.cos();
        y += phi.sin();
    }
    (x, y)
}

/// Every point of a uniform grid over `[-π, π)^n` (step `step`) whose unit-link
/// planar position lies within `tol` of `p`. Only `n = 2` and `n = 3`.
pub fn planar_grid_solutions(n: usize, p: (f64, f64), step: f64, tol: f64) -> Vec<Vec<f64>> {
    assert!(n == 2 || n == 3);
    let m = (TAU / step).floor() as usize;
    let angle = |i: usize| -PI + step * i as f64;
    let mut out = Vec::new();
    for i in 0..m {
        let (y1, x1) = angle(i).sin_cos();
        for j in 0..m {
            let (s, c) = (angle(i) + angle(j)).sin_cos();
            let (x2, y2) = (x1 + c, y1 + s);
            if n == 2 {
                if (x2 - p.0).hypot(y2 - p.1) < tol {
                    out.push(vec![angle(i), angle(j)]);
                }
                continue;
            }
            // the last unit link must bridge the remaining gap
            if ((p.0 - x2).hypot(p.1 - y2) - 1.0).abs() >= tol {
                continue;
            }
            for k in 0..m {
                let (s, c) = (angle(i) + angle(j) + angle(k)).sin_cos();
                if (x2 + c - p.0).hypot(y2 + s - p.1) < tol {
                    out.push(vec![angle(i), angle(j), angle(k)]);
                }
            }
        }
    }
    out
}

/// Dense exact samples of the self-motion set of a unit-link planar 3R arm
/// reaching `p`: each joint in turn is stepped over a grid and the other two
/// follow in closed form, so no stretch of the curve is sampled sparsely.
pub fn planar3r_curve_samples(p: (f64, f64), step: f64) -> Vec<[f64; 3]> {
    let m = (TAU / step).ceil() as usize;
    let mut out = Vec::new();
    let mut keep = |t: [f64; 3]| {
        let t = [wrap(t[0]), wrap(t[1]), wrap(t[2])];
        let (x, y) = planar_fk(&t);
        if (x - p.0).hypot(y - p.1) < 1e-9 {
            out.push(t);
        }
    };
    for i in 0..m {
        let g = -PI + step * i as f64;
        // joint 1 fixed: links 2 and 3 reach from the elbow
        for (t2, t3) in two_link_ik(1.0, 1.0, (p.0 - g.cos(), p.1 - g.sin())) {
            keep([g, t2 - g, t3]);
        }
        // joint 3 fixed: links 2 and 3 act as one rigid link
        let (vx, vy) = (1.0 + g.cos(), g.sin());
        let (l, beta) = (vx.hypot(vy), vy.atan2(vx));
        if l > 1e-9 {
            for (t1, gamma) in two_link_ik(1.0, l, p) {
                keep([t1, gamma - beta, g]);
            }
        }
        // joint 2 fixed: links 1 and 2 act as one rigid link
        let (ux, uy) = (1.0 + g.cos(), g.sin());
        let (l, alpha) = (ux.hypot(uy), uy.atan2(ux));
        if l > 1e-9 {
            for (psi, delta) in two_link_ik(l, 1.0, p) {
                let t1 = psi - alpha;
                keep([t1, g, psi + delta - t1 - g]);
            }
        }
    }
    out
}

/// Connected components of `points` when points within `delta` (per joint,
/// modulo 2π) are linked.
pub fn flood_components<P: AsRef<[f64]>>(points: &[P], delta: f64) -> usize {
    let n = points.len();
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && joint_dist(points[i].as_ref(), points[j].as_ref()) <= delta {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    count
}

/// Standard DH rows `(d, a, alpha)` of the UR5.
pub const UR5_DH: [(f64, f64, f64); 6] = [
    (0.089159, 0.0, PI / 2.0),
    (0.0, -0.425, 0.0),
    (0.0, -0.39225, 0.0),
    (0.10915, 0.0, PI / 2.0),
    (0.09465, 0.0, -PI / 2.0),
    (0.0823, 0.0, 0.0),
];

fn dh(theta: f64, (d, a, alpha): (f64, f64, f64)) -> Transform {
    let rz = Transform::rotation_about(&Vector3::z(), &Vector3::zeros(), theta);
    let tr = Transform {
        rotation: Matrix3::identity(),
        translation: Vector3::new(a, 0.0, d),
    };
    let rx = Transform::rotation_about(&Vector3::x(), &Vector3::zeros(), alpha);
    rz * tr * rx
}

/// Flange pose from the textbook DH product, independent of the model file.
pub fn ur5_dh_fk(theta: &[f64]) -> Transform {
    theta
        .iter()
        .zip(UR5_DH)
        .fold(Transform::identity(), |acc, (&t, row)| acc * dh(t, row))
}

/// All UR5 joint solutions for a flange pose in closed form: two shoulder,
/// two wrist and two elbow branches. Each candidate is checked against the DH
/// forward map and duplicates (modulo 2π) are merged.
pub fn ur5_analytic_ik(pose: &Transform) -> Vec<[f64; 6]> {
    let (d4, d6) = (UR5_DH[3].0, UR5_DH[5].0);
    let (a2, a3) = (UR5_DH[1].1, UR5_DH[2].1);
    let r = pose.rotation;
    let p6 = pose.translation;
    let z6: Vector3<f64> = r.column(2).into_owned();
    let p5 = p6 - d6 * z6;
    let rho = p5.x.hypot(p5.y);
    let mut out: Vec<[f64; 6]> = Vec::new();
    if rho < d4.abs() {
        return out;
    }
    let phi = p5.y.atan2(p5.x);
    let s = (d4 / rho).asin();
    for t1 in [phi + s, phi + PI - s] {
        let (s1, c1) = t1.sin_cos();
        // the wrist axis component along joint 2's axis fixes joint 5
        let c5 = ((p6.x * s1 - p6.y * c1) - d4) / d6;
        if c5.abs() > 1.0 + 1e-12 {
            continue;
        }
        let a5 = c5.clamp(-1.0, 1.0).acos();
        for t5 in [a5, -a5] {
            let s5 = t5.sin();
            if s5.abs() < 1e-9 {
                continue;
            }
            // joint 2's axis seen from the flange frame
            let u = r.transpose() * Vector3::new(s1, -c1, 0.0);
            let t6 = (-u.y / s5).atan2(u.x / s5);
            let t14 = dh(t1, UR5_DH[0]).inverse()
                * *pose
                * dh(t6, UR5_DH[5]).inverse()
                * dh(t5, UR5_DH[4]).inverse();
            let (px, py) = (t14.translation.x, t14.translation.y);
            let t234 = t14.rotation[(1, 0)].atan2(t14.rotation[(0, 0)]);
            let c3 = (px * px + py * py - a2 * a2 - a3 * a3) / (2.0 * a2 * a3);
            if c3.abs() > 1.0 + 1e-12 {
                continue;
            }
            let a3c = c3.clamp(-1.0, 1.0).acos();
            for t3 in [a3c, -a3c] {
                let t2 = py.atan2(px) - (a3 * t3.sin()).atan2(a2 + a3 * t3.cos());
                let t4 = t234 - t2 - t3;
                let cand = [t1, t2, t3, t4, t5, t6].map(wrap);
                let fk = ur5_dh_fk(&cand);
                let err = (fk.translation - pose.translation).norm()
                    + (fk.rotation - pose.rotation).norm();
                if err < 1e-8 && !out.iter().any(|o| joint_dist(o, &cand) < 1e-6) {
                    out.push(cand);
                }
            }
        }
    }
    out
}

pub fn ur5() -> RobotModel {
    bundled::ur5()
}
