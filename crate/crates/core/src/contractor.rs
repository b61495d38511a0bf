//! Forward–backward (HC4-style) contraction over polynomial constraints.
//!
//! A [`Constraint`] is an expression tree over `{+, -, ×, sqr}` set equal to a
//! constant. Each constraint is compiled into a post-order tape; contraction
//! evaluates the tape with interval arithmetic (forward), intersects the root
//! with the right-hand side and projects the narrowed value back down to the
//! variable leaves (backward). [`ContractionOperator`] chains these atomic
//! contractors in declaration order and repeats the sweep to a fixed point.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox};

/// Expression tree restricted to the node types of the kinematic constraints.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Sqr(Box<Expr>),
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Add(a, b) => write!(f, "({a:?} + {b:?})"),
            Expr::Sub(a, b) => write!(f, "({a:?} - {b:?})"),
            Expr::Mul(a, b) => write!(f, "{a:?}*{b:?}"),
            Expr::Sqr(a) => write!(f, "{a:?}^2"),
        }
    }
}

impl Expr {
    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn sqr(self) -> Expr {
        Expr::Sqr(Box::new(self))
    }

    /// `coef * x`, folding unit coefficients.
    pub fn scaled(coef: f64, e: Expr) -> Expr {
        if coef == 1.0 {
            e
        } else {
            Expr::Const(coef) * e
        }
    }

    /// Sum of terms; subtraction is used for negative leading coefficients of
    /// `Const * e` terms so the tree reads naturally. Returns `Const(0)` when
    /// `terms` is empty.
    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut acc: Option<Expr> = None;
        for t in terms {
            acc = Some(match acc {
                None => t,
                Some(a) => match t {
                    Expr::Mul(c, e) if matches!(*c, Expr::Const(k) if k < 0.0) => {
                        let Expr::Const(k) = *c else { unreachable!() };
                        a - Expr::scaled(-k, *e)
                    }
                    t => a + t,
                },
            });
        }
        acc.unwrap_or(Expr::Const(0.0))
    }

    /// `Σ coef_k · x_k`, dropping zero coefficients.
    pub fn linear(terms: impl IntoIterator<Item = (f64, usize)>) -> Expr {
        Expr::sum(
            terms
                .into_iter()
                .filter(|&(c, _)| c != 0.0)
                .map(|(c, i)| Expr::scaled(c, Expr::Var(i))),
        )
    }

    /// Point evaluation.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => x[*i],
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Sqr(a) => {
                let v = a.eval(x);
                v * v
            }
        }
    }

    /// Natural interval extension.
    pub fn eval_interval(&self, x: &[Interval]) -> Interval {
        match self {
            Expr::Const(c) => Interval::point(*c),
            Expr::Var(i) => x[*i],
            Expr::Add(a, b) => a.eval_interval(x) + b.eval_interval(x),
            Expr::Sub(a, b) => a.eval_interval(x) - b.eval_interval(x),
            Expr::Mul(a, b) => a.eval_interval(x) * b.eval_interval(x),
            Expr::Sqr(a) => a.eval_interval(x).sqr(),
        }
    }

    /// Polynomial degree in the variables.
    pub fn degree(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(_) => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) => a.degree().max(b.degree()),
            Expr::Mul(a, b) => a.degree() + b.degree(),
            Expr::Sqr(a) => 2 * a.degree(),
        }
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(i) => {
                out.insert(*i);
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Sqr(a) => a.collect_vars(out),
        }
    }

    /// Degree at most two, and no product multiplies a variable by itself
    /// except through `sqr`.
    pub fn is_light(&self) -> bool {
        fn walk(e: &Expr) -> bool {
            match e {
                Expr::Const(_) | Expr::Var(_) => true,
                Expr::Add(a, b) | Expr::Sub(a, b) => walk(a) && walk(b),
                Expr::Mul(a, b) => walk(a) && walk(b) && a.variables().is_disjoint(&b.variables()),
                Expr::Sqr(a) => walk(a),
            }
        }
        self.degree() <= 2 && walk(self)
    }

    fn has_square(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.has_square() || b.has_square(),
            Expr::Sqr(a) => a.degree() > 0 || a.has_square(),
        }
    }
}

impl Add for Expr {
    type Output = Expr;

    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl Sub for Expr {
    type Output = Expr;

    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl Mul for Expr {
    type Output = Expr;

    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    Linear,
    Quadratic,
    Bilinear,
}

/// `expr = rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub expr: Expr,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(expr: Expr, rhs: f64) -> Self {
        Constraint { expr, rhs }
    }

    /// `lhs = rhs` between two expressions.
    pub fn equate(lhs: Expr, rhs: Expr) -> Self {
        Constraint {
            expr: lhs - rhs,
            rhs: 0.0,
        }
    }

    pub fn kind(&self) -> ConstraintKind {
        if self.expr.degree() <= 1 {
            ConstraintKind::Linear
        } else if self.expr.has_square() {
            ConstraintKind::Quadratic
        } else {
            ConstraintKind::Bilinear
        }
    }

    /// `expr(x) - rhs`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.expr.eval(x) - self.rhs
    }

    pub fn max_variable(&self) -> Option<usize> {
        self.expr.variables().last().copied()
    }
}

#[derive(Clone, Copy, Debug)]
enum Node {
    Const(f64),
    Var(u32),
    Add(u32, u32),
    Sub(u32, u32),
    Mul(u32, u32),
    Scale(f64, u32),
    Sqr(u32),
}

/// A constraint flattened into post-order; the root is the last node.
#[derive(Clone, Debug)]
struct Tape {
    nodes: Vec<Node>,
    rhs: Interval,
}

impl Tape {
    fn compile(c: &Constraint) -> Tape {
        fn emit(e: &Expr, nodes: &mut Vec<Node>) -> u32 {
            let node = match e {
                Expr::Const(v) => Node::Const(*v),
                Expr::Var(i) => Node::Var(*i as u32),
                Expr::Add(a, b) => Node::Add(emit(a, nodes), emit(b, nodes)),
                Expr::Sub(a, b) => Node::Sub(emit(a, nodes), emit(b, nodes)),
                Expr::Mul(a, b) => match (a.as_ref(), b.as_ref()) {
                    (Expr::Const(c), e) | (e, Expr::Const(c)) => Node::Scale(*c, emit(e, nodes)),
                    _ => Node::Mul(emit(a, nodes), emit(b, nodes)),
                },
                Expr::Sqr(a) => Node::Sqr(emit(a, nodes)),
            };
            nodes.push(node);
            (nodes.len() - 1) as u32
        }
        let mut nodes = Vec::new();
        emit(&c.expr, &mut nodes);
        Tape {
            nodes,
            rhs: Interval::point(c.rhs),
        }
    }

    /// One forward–backward pass. Returns `false` when the constraint has no
    /// solution in `x`; `x` is then in an unspecified narrowed state.
    fn revise(&self, x: &mut [Interval], vals: &mut Vec<Interval>) -> bool {
        vals.clear();
        for node in &self.nodes {
            let v = match *node {
                Node::Const(c) => Interval::point(c),
                Node::Var(i) => x[i as usize],
                Node::Add(a, b) => vals[a as usize] + vals[b as usize],
                Node::Sub(a, b) => vals[a as usize] - vals[b as usize],
                Node::Mul(a, b) => vals[a as usize] * vals[b as usize],
                Node::Scale(c, a) => vals[a as usize].scale(c),
                Node::Sqr(a) => vals[a as usize].sqr(),
            };
            if v.is_empty() {
                return false;
            }
            vals.push(v);
        }
        let root = vals.len() - 1;
        vals[root] = vals[root].intersect(&self.rhs);
        if vals[root].is_empty() {
            return false;
        }
        for i in (0..self.nodes.len()).rev() {
            let v = vals[i];
            match self.nodes[i] {
                Node::Const(_) => {}
                Node::Var(k) => {
                    let k = k as usize;
                    x[k] = x[k].intersect(&v);
                    if x[k].is_empty() {
                        return false;
                    }
                }
                Node::Add(a, b) => {
                    let (a, b) = (a as usize, b as usize);
                    let na = v - vals[b];
                    if !narrow(vals, a, na) {
                        return false;
                    }
                    let nb = v - vals[a];
                    if !narrow(vals, b, nb) {
                        return false;
                    }
                }
                Node::Sub(a, b) => {
                    let (a, b) = (a as usize, b as usize);
                    let na = v + vals[b];
                    if !narrow(vals, a, na) {
                        return false;
                    }
                    let nb = vals[a] - v;
                    if !narrow(vals, b, nb) {
                        return false;
                    }
                }
                Node::Mul(a, b) => {
                    let (a, b) = (a as usize, b as usize);
                    let na = v / vals[b];
                    if !narrow(vals, a, na) {
                        return false;
                    }
                    let nb = v / vals[a];
                    if !narrow(vals, b, nb) {
                        return false;
                    }
                }
                Node::Scale(c, a) => {
                    let a = a as usize;
                    if !narrow(vals, a, v.div_scalar(c)) {
                        return false;
                    }
                }
                Node::Sqr(a) => {
                    let a = a as usize;
                    let pre = vals[a].sqr_preimage(&v);
                    if pre.is_empty() {
                        return false;
                    }
                    vals[a] = pre;
                }
            }
        }
        true
    }
}

impl Tape {
    /// Value of `expr(x) - rhs`, leaving node values in `vals`.
    fn eval_point(&self, x: &[f64], vals: &mut Vec<f64>) -> f64 {
        vals.clear();
        for node in &self.nodes {
            let v = match *node {
                Node::Const(c) => c,
                Node::Var(i) => x[i as usize],
                Node::Add(a, b) => vals[a as usize] + vals[b as usize],
                Node::Sub(a, b) => vals[a as usize] - vals[b as usize],
                Node::Mul(a, b) => vals[a as usize] * vals[b as usize],
                Node::Scale(c, a) => c * vals[a as usize],
                Node::Sqr(a) => vals[a as usize] * vals[a as usize],
            };
            vals.push(v);
        }
        vals.last().copied().unwrap_or(0.0) - self.rhs.lo()
    }

    /// Reverse-mode gradient accumulated into `grad`, after `eval_point`.
    fn gradient(&self, vals: &[f64], adj: &mut Vec<f64>, grad: &mut [f64]) {
        adj.clear();
        adj.resize(self.nodes.len(), 0.0);
        if let Some(last) = adj.last_mut() {
            *last = 1.0;
        }
        for i in (0..self.nodes.len()).rev() {
            let d = adj[i];
            if d == 0.0 {
                continue;
            }
            match self.nodes[i] {
                Node::Const(_) => {}
                Node::Var(k) => grad[k as usize] += d,
                Node::Add(a, b) => {
                    adj[a as usize] += d;
                    adj[b as usize] += d;
                }
                Node::Sub(a, b) => {
                    adj[a as usize] += d;
                    adj[b as usize] -= d;
                }
                Node::Mul(a, b) => {
                    adj[a as usize] += d * vals[b as usize];
                    adj[b as usize] += d * vals[a as usize];
                }
                Node::Scale(c, a) => adj[a as usize] += d * c,
                Node::Sqr(a) => adj[a as usize] += 2.0 * d * vals[a as usize],
            }
        }
    }
}

/// Constraints compiled for repeated point evaluation and exact gradients.
#[derive(Clone, Debug)]
pub struct PointEvaluator {
    dim: usize,
    tapes: Vec<Tape>,
}

impl PointEvaluator {
    pub fn new(dim: usize, constraints: &[Constraint]) -> Result<Self> {
        for c in constraints {
            if let Some(i) = c.max_variable() {
                if i >= dim {
                    return Err(Error::VariableOutOfRange { index: i, dim });
                }
            }
        }
        Ok(PointEvaluator {
            dim,
            tapes: constraints.iter().map(Tape::compile).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tapes.is_empty()
    }

    /// Violations `expr(x) - rhs`, one per constraint.
    pub fn values(&self, x: &[f64]) -> Vec<f64> {
        let mut vals = Vec::new();
        self.tapes
            .iter()
            .map(|t| t.eval_point(x, &mut vals))
            .collect()
    }

    /// Row-major Jacobian of the violations, `len() x dim()`.
    pub fn jacobian(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.tapes.len() * self.dim];
        let (mut vals, mut adj) = (Vec::new(), Vec::new());
        for (t, row) in self.tapes.iter().zip(out.chunks_mut(self.dim.max(1))) {
            t.eval_point(x, &mut vals);
            t.gradient(&vals, &mut adj, row);
        }
        out
    }
}

#[inline]
fn narrow(vals: &mut [Interval], i: usize, by: Interval) -> bool {
    let n = vals[i].intersect(&by);
    vals[i] = n;
    !n.is_empty()
}

pub const DEFAULT_MAX_ROUNDS: usize = 10;
pub const DEFAULT_MIN_RELATIVE_REDUCTION: f64 = 0.01;

/// Sequence of atomic forward–backward contractors iterated to a fixed point.
#[derive(Clone, Debug)]
pub struct ContractionOperator {
    dim: usize,
    tapes: Vec<Tape>,
    max_tape_len: usize,
    pub max_rounds: usize,
    pub min_relative_reduction: f64,
}

impl ContractionOperator {
    pub fn new(dim: usize, constraints: &[Constraint]) -> Result<Self> {
        for c in constraints {
            if let Some(i) = c.max_variable() {
                if i >= dim {
                    return Err(Error::VariableOutOfRange { index: i, dim });
                }
            }
        }
        let tapes: Vec<Tape> = constraints.iter().map(Tape::compile).collect();
        let max_tape_len = tapes.iter().map(|t| t.nodes.len()).max().unwrap_or(0);
        Ok(ContractionOperator {
            dim,
            tapes,
            max_tape_len,
            max_rounds: DEFAULT_MAX_ROUNDS,
            min_relative_reduction: DEFAULT_MIN_RELATIVE_REDUCTION,
        })
    }

    /// Relax every equation `expr = rhs` to `|expr - rhs| <= tol`, so inputs
    /// rounded to floating point (a target pose, say) keep their solutions.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        let tol = tol.max(0.0);
        for t in &mut self.tapes {
            t.rhs = Interval::centered(t.rhs.mid(), tol);
        }
        self
    }

    pub fn with_fixed_point(mut self, max_rounds: usize, min_relative_reduction: f64) -> Self {
        self.max_rounds = max_rounds.max(1);
        self.min_relative_reduction = min_relative_reduction;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tapes.is_empty()
    }

    /// Contract `b`. The result is a sub-box of `b`, and is empty only when no
    /// point of `b` satisfies every constraint.
    pub fn contract(&self, b: &IntervalBox) -> Result<IntervalBox> {
        if b.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: b.dim(),
            });
        }
        let mut out = b.clone();
        if !self.contract_in_place(&mut out) {
            return Ok(IntervalBox::empty(self.dim));
        }
        Ok(out)
    }

    /// In-place variant; returns `false` (leaving `b` unspecified) when the box
    /// is proven infeasible.
    pub fn contract_in_place(&self, b: &mut IntervalBox) -> bool {
        debug_assert_eq!(b.dim(), self.dim);
        if b.is_empty() {
            return false;
        }
        let mut vals = Vec::with_capacity(self.max_tape_len);
        let mut widths: Vec<f64> = b.iter().map(Interval::width).collect();
        for _ in 0..self.max_rounds {
            for tape in &self.tapes {
                if !tape.revise(b.components_mut(), &mut vals) {
                    return false;
                }
            }
            let mut best = 0.0f64;
            for (w, c) in widths.iter_mut().zip(b.iter()) {
                let nw = c.width();
                if *w > 0.0 {
                    best = best.max((*w - nw) / *w);
                }
                *w = nw;
            }
            if best <= self.min_relative_reduction {
                break;
            }
        }
        true
    }
}

/// Single forward–backward pass of one constraint.
pub fn contract_single(c: &Constraint, b: &IntervalBox) -> Result<IntervalBox> {
    if let Some(i) = c.max_variable() {
        if i >= b.dim() {
            return Err(Error::VariableOutOfRange {
                index: i,
                dim: b.dim(),
            });
        }
    }
    let tape = Tape::compile(c);
    let mut out = b.clone();
    let mut vals = Vec::with_capacity(tape.nodes.len());
    if !tape.revise(out.components_mut(), &mut vals) {
        return Ok(IntervalBox::empty(b.dim()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Expr {
        Expr::var(i)
    }

    fn close(a: Interval, lo: f64, hi: f64) -> bool {
        (a.lo() - lo).abs() <= 1e-12 && (a.hi() - hi).abs() <= 1e-12
    }

    #[test]
    fn square_equals_four() {
        let c = Constraint::new(x(0).sqr(), 4.0);
        let op = ContractionOperator::new(1, &[c]).unwrap();
        let r = op
            .contract(&IntervalBox::from_bounds(&[(0.0, 10.0)]))
            .unwrap();
        assert!(close(r[0], 2.0, 2.0), "{r:?}");
        assert!(r[0].contains(2.0));
    }

    #[test]
    fn linear_sum() {
        let c = Constraint::new(x(0) + x(1), 1.0);
        let op = ContractionOperator::new(2, &[c]).unwrap();
        let r = op
            .contract(&IntervalBox::from_bounds(&[(0.0, 1.0), (0.5, 2.0)]))
            .unwrap();
        assert!(close(r[0], 0.0, 0.5), "{r:?}");
        assert!(close(r[1], 0.5, 1.0), "{r:?}");
    }

    #[test]
    fn bilinear_infeasible() {
        let c = Constraint::new(x(0) * x(1), 1.0);
        let op = ContractionOperator::new(2, &[c]).unwrap();
        let r = op
            .contract(&IntervalBox::from_bounds(&[(2.0, 3.0), (2.0, 3.0)]))
            .unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn unit_norm_row() {
        let c = Constraint::new(x(0).sqr(), 1.0);
        let r = contract_single(&c, &IntervalBox::from_bounds(&[(0.5, 2.0)])).unwrap();
        assert!(close(r[0], 1.0, 1.0), "{r:?}");
    }

    #[test]
    fn orthogonality_is_fixed_point() {
        let c = Constraint::new(x(0) * x(2) + x(1) * x(3), 0.0);
        let b = IntervalBox::uniform(4, Interval::new(-1.0, 1.0));
        let r = contract_single(&c, &b).unwrap();
        assert_eq!(r, b);
    }

    #[test]
    fn orthogonality_forced() {
        let c = Constraint::new(x(0) * x(2) + x(1) * x(3), 0.0);
        let b = IntervalBox::from_bounds(&[(1.0, 1.0), (0.0, 0.0), (-1.0, 1.0), (-1.0, 1.0)]);
        let r = contract_single(&c, &b).unwrap();
        assert!(close(r[2], 0.0, 0.0), "{r:?}");
        assert_eq!(r[3], Interval::new(-1.0, 1.0));
    }

    #[test]
    fn scaled_terms_contract_both_ways() {
        let c = Constraint::new(Expr::scaled(-2.0, x(0)) + x(1), 0.0);
        let r = contract_single(&c, &IntervalBox::from_bounds(&[(0.0, 1.0), (1.0, 4.0)])).unwrap();
        assert!(close(r[0], 0.5, 1.0), "{r:?}");
        assert!(close(r[1], 1.0, 2.0), "{r:?}");
    }

    #[test]
    fn point_gradient_matches_hand_derivative() {
        // x0^2 + 3 x0 x1 - 2 x2 = 1
        let e = x(0).sqr() + Expr::scaled(3.0, x(0) * x(1)) - Expr::scaled(2.0, x(2));
        let ev = PointEvaluator::new(3, &[Constraint::new(e, 1.0)]).unwrap();
        let p = [0.5, -1.0, 2.0];
        assert!((ev.values(&p)[0] - (0.25 - 1.5 - 4.0 - 1.0)).abs() < 1e-15);
        let g = ev.jacobian(&p);
        let want = [2.0 * 0.5 - 3.0, 3.0 * 0.5, -2.0];
        for (a, b) in g.iter().zip(want) {
            assert!((a - b).abs() < 1e-15, "{g:?}");
        }
    }

    #[test]
    fn dimension_errors() {
        let c = Constraint::new(x(3), 0.0);
        assert!(matches!(
            ContractionOperator::new(2, std::slice::from_ref(&c)),
            Err(Error::VariableOutOfRange { index: 3, dim: 2 })
        ));
        let op = ContractionOperator::new(4, &[c]).unwrap();
        assert!(matches!(
            op.contract(&IntervalBox::uniform(2, Interval::new(0.0, 1.0))),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kinds_and_taxonomy() {
        let lin = Constraint::new(Expr::linear([(2.0, 0), (-1.0, 1)]), 3.0);
        assert_eq!(lin.kind(), ConstraintKind::Linear);
        let quad = Constraint::new(x(0).sqr() + x(1).sqr(), 1.0);
        assert_eq!(quad.kind(), ConstraintKind::Quadratic);
        let bil = Constraint::new(x(0) * x(1) - x(2), 0.0);
        assert_eq!(bil.kind(), ConstraintKind::Bilinear);
        assert!(lin.expr.is_light() && quad.expr.is_light() && bil.expr.is_light());
        assert!(!(x(0) * x(0)).is_light());
        assert!(!(x(0) * x(1) * x(2)).is_light());
    }

    #[test]
    fn linear_builder_uses_subtraction() {
        let e = Expr::linear([(1.0, 0), (-2.0, 1), (0.0, 2)]);
        assert_eq!(format!("{e:?}"), "(x0 - 2*x1)");
        assert_eq!(e.eval(&[1.0, 3.0, 7.0]), -5.0);
    }

    #[test]
    fn stops_after_max_rounds() {
        // x = y/2, y = x/2 only converges to 0 in the limit
        let cs = [
            Constraint::new(x(0) - Expr::Const(0.5) * x(1), 0.0),
            Constraint::new(x(1) - Expr::Const(0.5) * x(0), 0.0),
        ];
        let op = ContractionOperator::new(2, &cs)
            .unwrap()
            .with_fixed_point(3, 0.0);
        let r = op
            .contract(&IntervalBox::uniform(2, Interval::new(-1.0, 1.0)))
            .unwrap();
        assert!(r[0].width() > 0.0);
        assert!(r[0].width() < 2.0);
    }
}
