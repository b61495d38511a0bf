//! The test oracles agree with the library's own forward kinematics.

mod common;

use common::*;
use ikpaver::robot::bundled;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn ur5_model_matches_textbook_dh() {
    let m = bundled::ur5();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let th: Vec<f64> = (0..6).map(|_| rng.random_range(-3.0..3.0)).collect();
        let a = m.forward_kinematics(&th);
        let b = ur5_dh_fk(&th);
        assert!((a.translation - b.translation).norm() < 1e-12);
        assert!((a.rotation - b.rotation).norm() < 1e-12);
    }
}

#[test]
fn ur5_closed_form_recovers_the_generating_configuration() {
    let m = bundled::ur5();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut eights = 0;
    for _ in 0..200 {
        let th: Vec<f64> = (0..6).map(|_| rng.random_range(-3.1..3.1)).collect();
        let sols = ur5_analytic_ik(&m.forward_kinematics(&th));
        assert!(
            sols.iter().any(|s| joint_dist(s, &th) < 1e-7),
            "{th:?} not among {sols:?}"
        );
        assert!(
            sols.len() <= 8 && sols.len().is_multiple_of(2),
            "{}",
            sols.len()
        );
        eights += usize::from(sols.len() == 8);
    }
    assert!(eights > 100);
}

#[test]
fn planar_two_link_closed_form() {
    let sols = two_link_ik(1.0, 1.0, (1.0, 1.0));
    assert_eq!(sols.len(), 2);
    for (a, b) in sols {
        let (x, y) = planar_fk(&[a, b]);
        assert!((x - 1.0).abs() < 1e-12 && (y - 1.0).abs() < 1e-12);
    }
    assert!(two_link_ik(1.0, 1.0, (3.0, 0.0)).is_empty());
}

#[test]
fn planar3r_samples_form_one_loop() {
    let pts = planar3r_curve_samples((1.5, 0.0), 0.01);
    assert!(pts.len() > 1000);
    assert_eq!(flood_components(&pts, 0.05), 1);
    // grid points near the curve are close to some dense sample
    for g in planar_grid_solutions(3, (1.5, 0.0), 0.02, 1e-3) {
        let d = pts
            .iter()
            .map(|p| joint_dist(p, &g))
            .fold(f64::INFINITY, f64::min);
        assert!(d < 0.02, "{g:?} is {d} from the sampled curve");
    }
}

#[test]
fn wrap_is_canonical() {
    for a in [-7.0, -std::f64::consts::PI, 0.0, 3.0, 9.5] {
        let w = wrap(a);
        assert!(w > -std::f64::consts::PI && w <= std::f64::consts::PI);
        assert!(angle_dist(w, a) < 1e-12);
    }
}
