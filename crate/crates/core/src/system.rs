//! Polynomial inverse-kinematics system over rotation-matrix components.
//!
//! Every link whose orientation is not fixed by the problem contributes nine
//! unknowns, the columns `u, v, w` of its world rotation matrix. Joint angles
//! never appear: each joint ties the world direction of its axis as seen from
//! the two links it connects, and the end-effector position closes the chain
//! through a sum of rotated link vectors. Orthonormality of each unknown
//! rotation closes the system. All equations are linear, bilinear or
//! quadratic, which keeps forward–backward contraction effective.

use std::sync::OnceLock;

use nalgebra::{DMatrix, Matrix3, Vector3};

use crate::contractor::{Constraint, ContractionOperator, Expr, PointEvaluator};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox};
use crate::robot::{PoseMode, PoseTarget, RobotModel};

/// Number of unknowns per free link rotation.
pub const VARS_PER_LINK: usize = 9;

// constants below this are treated as zero when checking fixed equations
const FIXED_TOL: f64 = 1e-9;

/// Orientation of one link in the system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LinkRotation {
    /// Known world rotation (the base, or the end link under a full pose).
    Fixed(Matrix3<f64>),
    /// Unknown rotation whose column-major entries start at this variable.
    Free(usize),
}

impl LinkRotation {
    /// Variable index of entry `(row, col)` of a free rotation.
    pub fn var(offset: usize, row: usize, col: usize) -> usize {
        offset + 3 * col + row
    }
}

/// Role of a constraint, used for reporting and for tests of the layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintRole {
    Axis,
    Position,
    Orthonormality,
    ZAxis,
    Implied,
}

/// Constraint system of a robot and target.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    dim: usize,
    names: Vec<String>,
    constraints: Vec<Constraint>,
    roles: Vec<ConstraintRole>,
    initial_box: IntervalBox,
    links: Vec<LinkRotation>,
    /// A fixed equation (no unknowns) is violated: the target is unreachable
    /// for structural reasons.
    infeasible: bool,
    core_eval: OnceLock<PointEvaluator>,
}

impl ConstraintSystem {
    /// Assemble the system for `model` reaching `target`.
    pub fn build(model: &RobotModel, target: &PoseTarget) -> Result<Self> {
        target.validate()?;
        let n = model.dof();
        let mut links = Vec::with_capacity(n + 1);
        let mut names = Vec::new();
        links.push(LinkRotation::Fixed(model.base_frame().rotation));
        let free_end = matches!(target.mode(), PoseMode::PositionAndZAxis);
        for l in 1..=n {
            if l == n && !free_end {
                let PoseTarget::FullPose { rotation, .. } = target else {
                    unreachable!()
                };
                links.push(LinkRotation::Fixed(*rotation));
                continue;
            }
            let off = names.len();
            for col in ["u", "v", "w"] {
                for row in ["x", "y", "z"] {
                    names.push(format!("R{}.{col}.{row}", l + 1));
                }
            }
            links.push(LinkRotation::Free(off));
        }
        let dim = names.len();
        let mut sys = ConstraintSystem {
            dim,
            names,
            constraints: Vec::new(),
            roles: Vec::new(),
            initial_box: IntervalBox::uniform(dim, Interval::new(-1.0, 1.0)),
            links,
            infeasible: false,
            core_eval: OnceLock::new(),
        };

        // joint axes agree in both adjacent links
        for j in 0..n {
            let d = model.joints()[j].axis;
            let dn = *model.axis_in_child(j);
            for k in 0..3 {
                let mut lin = Linear::default();
                lin.add_rotated(&sys.links[j + 1], &dn, k, 1.0);
                lin.add_rotated(&sys.links[j], &d, k, -1.0);
                sys.push_linear(lin, ConstraintRole::Axis);
            }
        }

        // chain closure through the axis points
        let base = model.base_frame();
        let p0 = model.joints()[0].point;
        let rhs = base.translation + base.rotation * p0 - target.position();
        let last = model.point_in_child(n - 1) - model.ee_offset();
        let seg: Vec<Vector3<f64>> = (1..n)
            .map(|m| model.joints()[m].point - model.point_in_child(m - 1))
            .collect();
        for k in 0..3 {
            let mut lin = Linear::default();
            lin.add_rotated(&sys.links[n], &last, k, 1.0);
            for (m, s) in (1..n).zip(&seg) {
                lin.add_rotated(&sys.links[m], s, k, -1.0);
            }
            lin.konst -= rhs[k];
            sys.push_linear(lin, ConstraintRole::Position);
        }

        // end-link approach axis
        if let PoseTarget::PositionAndZAxis { z_axis, .. } = target {
            let LinkRotation::Free(off) = sys.links[n] else {
                unreachable!()
            };
            for k in 0..3 {
                sys.push(
                    Constraint::new(Expr::var(LinkRotation::var(off, k, 2)), z_axis[k]),
                    ConstraintRole::ZAxis,
                );
            }
        }

        let offsets: Vec<usize> = sys.free_offsets().collect();
        for off in offsets {
            for c in orthonormality(off) {
                sys.push(c, ConstraintRole::Orthonormality);
            }
        }
        Ok(sys)
    }

    /// System from explicit constraints; no robot structure attached.
    pub fn from_constraints(
        constraints: Vec<Constraint>,
        initial_box: IntervalBox,
    ) -> Result<Self> {
        let dim = initial_box.dim();
        ContractionOperator::new(dim, &constraints)?;
        let roles = vec![ConstraintRole::Position; constraints.len()];
        Ok(ConstraintSystem {
            dim,
            names: (0..dim).map(|i| format!("x{i}")).collect(),
            constraints,
            roles,
            initial_box,
            links: Vec::new(),
            infeasible: false,
            core_eval: OnceLock::new(),
        })
    }

    /// Add consequences of orthonormality (row norms, row orthogonality and
    /// the remaining cross products). They do not change the solution set but
    /// let forward–backward contraction see more of the rotation group.
    pub fn with_implied_constraints(mut self) -> Self {
        let offsets: Vec<usize> = self.free_offsets().collect();
        for off in offsets {
            for c in implied_orthonormality(off) {
                self.push(c, ConstraintRole::Implied);
            }
        }
        self
    }

    fn push(&mut self, c: Constraint, role: ConstraintRole) {
        self.constraints.push(c);
        self.roles.push(role);
    }

    fn push_linear(&mut self, lin: Linear, role: ConstraintRole) {
        if lin.terms.iter().all(|&(c, _)| c == 0.0) {
            if lin.konst.abs() > FIXED_TOL {
                self.infeasible = true;
            }
            return;
        }
        self.push(Constraint::new(Expr::linear(lin.terms), -lin.konst), role);
    }

    fn free_offsets(&self) -> impl Iterator<Item = usize> + '_ {
        self.links.iter().filter_map(|l| match l {
            LinkRotation::Free(off) => Some(*off),
            LinkRotation::Fixed(_) => None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn roles(&self) -> &[ConstraintRole] {
        &self.roles
    }

    /// Constraints that define the solution set (everything but implied ones).
    pub fn core_constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints
            .iter()
            .zip(&self.roles)
            .filter(|(_, r)| **r != ConstraintRole::Implied)
            .map(|(c, _)| c)
    }

    pub fn initial_box(&self) -> &IntervalBox {
        &self.initial_box
    }

    pub fn links(&self) -> &[LinkRotation] {
        &self.links
    }

    pub fn is_infeasible(&self) -> bool {
        self.infeasible
    }

    pub fn has_robot(&self) -> bool {
        !self.links.is_empty()
    }

    pub fn operator(&self) -> Result<ContractionOperator> {
        ContractionOperator::new(self.dim, &self.constraints)
    }

    /// Largest absolute violation of the core constraints at `x`.
    pub fn residual(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self
            .core_constraints()
            .map(|c| c.violation(x).abs())
            .fold(0.0, f64::max))
    }

    /// Values of the core constraints at `x` (expression minus right side).
    pub fn core_values(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.core_constraints().map(|c| c.violation(x)));
    }

    /// Exact Jacobian of the core constraints at `x`, one row per constraint.
    pub fn core_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let ev = self.core_eval.get_or_init(|| {
            let core: Vec<Constraint> = self.core_constraints().cloned().collect();
            PointEvaluator::new(self.dim, &core).expect("constraints checked at construction")
        });
        DMatrix::from_row_slice(ev.len(), self.dim, &ev.jacobian(x))
    }

    /// System point of a joint configuration.
    pub fn point_from_theta(&self, model: &RobotModel, theta: &[f64]) -> Vec<f64> {
        let frames = model.link_frames(theta);
        let rots: Vec<Matrix3<f64>> = frames.iter().map(|f| f.rotation).collect();
        self.point_from_rotations(&rots)
    }

    /// System point from world rotations of links `0..=n`.
    pub fn point_from_rotations(&self, rots: &[Matrix3<f64>]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for (l, r) in self.links.iter().zip(rots) {
            if let LinkRotation::Free(off) = *l {
                for col in 0..3 {
                    for row in 0..3 {
                        x[LinkRotation::var(off, row, col)] = r[(row, col)];
                    }
                }
            }
        }
        x
    }

    /// Rotation of link `l` at a point (fixed links ignore `x`).
    pub fn link_rotation(&self, l: usize, x: &[f64]) -> Matrix3<f64> {
        match self.links[l] {
            LinkRotation::Fixed(m) => m,
            LinkRotation::Free(off) => Matrix3::from_fn(|r, c| x[LinkRotation::var(off, r, c)]),
        }
    }

    /// `R_l · d` over a box, row by row. Each entry of `R_l` appears once per
    /// row, so this is the exact range of every component.
    pub fn rotate_interval(&self, l: usize, x: &IntervalBox, d: &Vector3<f64>) -> [Interval; 3] {
        match self.links[l] {
            LinkRotation::Fixed(m) => {
                let v = m * d;
                // outward rounding of the fixed product
                [0, 1, 2].map(|k| Interval::centered(v[k], 4.0 * f64::EPSILON * (1.0 + v[k].abs())))
            }
            LinkRotation::Free(off) => [0, 1, 2].map(|k| {
                (0..3).fold(Interval::point(0.0), |acc, col| {
                    acc + x[LinkRotation::var(off, k, col)] * d[col]
                })
            }),
        }
    }
}

#[derive(Default)]
struct Linear {
    terms: Vec<(f64, usize)>,
    konst: f64,
}

impl Linear {
    // adds sign · (R_l d)_row
    fn add_rotated(&mut self, link: &LinkRotation, d: &Vector3<f64>, row: usize, sign: f64) {
        match *link {
            LinkRotation::Fixed(m) => self.konst += sign * (m.row(row) * d)[0],
            LinkRotation::Free(off) => {
                for col in 0..3 {
                    if d[col] != 0.0 {
                        self.terms
                            .push((sign * d[col], LinkRotation::var(off, row, col)));
                    }
                }
            }
        }
    }
}

fn col(off: usize, c: usize) -> [Expr; 3] {
    [0, 1, 2].map(|r| Expr::var(LinkRotation::var(off, r, c)))
}

fn dot(a: &[Expr; 3], b: &[Expr; 3]) -> Expr {
    Expr::sum((0..3).map(|k| a[k].clone() * b[k].clone()))
}

fn norm_sq(a: &[Expr; 3]) -> Expr {
    Expr::sum(a.iter().map(|e| e.clone().sqr()))
}

// (a × b)_k - c_k = 0
fn cross_eq(a: &[Expr; 3], b: &[Expr; 3], c: &[Expr; 3]) -> [Constraint; 3] {
    [0, 1, 2].map(|k| {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        Constraint::new(
            a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone() - c[k].clone(),
            0.0,
        )
    })
}

/// Nine constraints making a free rotation orthonormal and right-handed:
/// unit columns, pairwise orthogonal columns and `u × v = w`.
pub fn orthonormality(off: usize) -> Vec<Constraint> {
    let (u, v, w) = (col(off, 0), col(off, 1), col(off, 2));
    let mut out = vec![
        Constraint::new(norm_sq(&u), 1.0),
        Constraint::new(norm_sq(&v), 1.0),
        Constraint::new(norm_sq(&w), 1.0),
        Constraint::new(dot(&u, &v), 0.0),
        Constraint::new(dot(&u, &w), 0.0),
        Constraint::new(dot(&v, &w), 0.0),
    ];
    out.extend(cross_eq(&u, &v, &w));
    out
}

fn implied_orthonormality(off: usize) -> Vec<Constraint> {
    let (u, v, w) = (col(off, 0), col(off, 1), col(off, 2));
    let row =
        |r: usize| -> [Expr; 3] { [0, 1, 2].map(|c| Expr::var(LinkRotation::var(off, r, c))) };
    let rows = [row(0), row(1), row(2)];
    let mut out: Vec<Constraint> = rows
        .iter()
        .map(|r| Constraint::new(norm_sq(r), 1.0))
        .collect();
    out.push(Constraint::new(dot(&rows[0], &rows[1]), 0.0));
    out.push(Constraint::new(dot(&rows[0], &rows[2]), 0.0));
    out.push(Constraint::new(dot(&rows[1], &rows[2]), 0.0));
    out.extend(cross_eq(&v, &w, &u));
    out.extend(cross_eq(&w, &u, &v));
    out
}
