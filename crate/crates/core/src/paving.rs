//! Ordering accepted boxes into self-motion curves.
//!
//! While the solver runs, [`CurveSet::insert_box`] grows curves greedily: a box
//! touching nothing starts a curve, a box touching one curve end extends it,
//! and a box touching the ends of two curves joins them. Boxes that only touch
//! curve interiors (or three or more curves) go to an unordered pool.
//!
//! [`CurveSet::finalize`] discards that incremental state and rebuilds the
//! curves from the whole adjacency graph, so the final result does not depend
//! on acceptance order: each connected component yields one curve whose spine
//! runs between two far-apart boxes (or around the loop when the component is
//! a closed curve) and whose remaining boxes join the pool.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::interval::Interval;
use crate::solution::{box_key, SolutionSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointKind {
    /// The curve simply stops (end of the explored region or a singularity).
    Open,
    /// The end box touches a joint limit.
    LimitCut,
    /// The curve is a closed loop.
    Closed,
}

/// Ordered chain of mutually adjacent solution boxes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfMotionCurve {
    /// Indices into the solution set, in order along the curve.
    pub boxes: Vec<usize>,
    pub closed: bool,
    pub ends: [EndpointKind; 2],
}

impl SelfMotionCurve {
    fn single(b: usize) -> Self {
        SelfMotionCurve {
            boxes: vec![b],
            closed: false,
            ends: [EndpointKind::Open; 2],
        }
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn front(&self) -> usize {
        self.boxes[0]
    }

    pub fn back(&self) -> usize {
        *self.boxes.last().expect("curves are never empty")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertOutcome {
    NewCurve(usize),
    Appended(usize),
    Merged(usize),
    Closed(usize),
    Pooled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum End {
    Front,
    Back,
}

/// Curves plus the pool of boxes not on any curve.
#[derive(Clone, Debug)]
pub struct CurveSet {
    epsilon: f64,
    curves: Vec<Option<SelfMotionCurve>>,
    pool: Vec<usize>,
    owner: HashMap<usize, usize>,
    placed: HashSet<usize>,
}

impl CurveSet {
    pub fn new(epsilon: f64) -> Self {
        CurveSet {
            epsilon,
            curves: Vec::new(),
            pool: Vec::new(),
            owner: HashMap::new(),
            placed: HashSet::new(),
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Live curves with their ids.
    pub fn curves(&self) -> impl Iterator<Item = (usize, &SelfMotionCurve)> {
        self.curves
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_ref().map(|c| (i, c)))
    }

    pub fn curve_count(&self) -> usize {
        self.curves.iter().flatten().count()
    }

    pub fn pool(&self) -> &[usize] {
        &self.pool
    }

    /// Number of boxes placed on curves or in the pool.
    pub fn placed(&self) -> usize {
        self.placed.len()
    }

    /// Curve id and position of a box on its curve.
    pub fn position_of(&self, b: usize) -> Option<(usize, usize)> {
        let c = *self.owner.get(&b)?;
        let curve = self.curves[c].as_ref()?;
        curve.boxes.iter().position(|&x| x == b).map(|p| (c, p))
    }

    /// Every curve end box that is not closed, as (curve, box) pairs.
    pub fn open_ends(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (id, c) in self.curves() {
            if c.closed {
                continue;
            }
            out.push((id, c.front()));
            if c.len() > 1 {
                out.push((id, c.back()));
            }
        }
        out
    }

    /// Place box `b` of `set` incrementally.
    pub fn insert_box(&mut self, set: &SolutionSet, b: usize) -> InsertOutcome {
        if !self.placed.insert(b) {
            return match self.owner.get(&b) {
                Some(&c) => InsertOutcome::Appended(c),
                None => InsertOutcome::Pooled,
            };
        }
        let nbrs: Vec<usize> = set
            .neighbors(b, self.epsilon)
            .into_iter()
            .filter(|n| self.placed.contains(n) && *n != b)
            .collect();

        let mut ends: Vec<(usize, End)> = Vec::new();
        let mut touched: HashSet<usize> = HashSet::new();
        for n in &nbrs {
            let Some(&c) = self.owner.get(n) else {
                continue;
            };
            touched.insert(c);
            let curve = self.curves[c]
                .as_ref()
                .expect("owner points at a live curve");
            if curve.closed {
                continue;
            }
            if curve.front() == *n {
                ends.push((c, End::Front));
            }
            if curve.back() == *n && curve.len() > 1 {
                ends.push((c, End::Back));
            }
        }
        ends.sort_unstable();
        ends.dedup();
        let mut end_curves: Vec<usize> = ends.iter().map(|e| e.0).collect();
        end_curves.dedup();
        let interior_only = touched.iter().any(|c| !end_curves.contains(c));

        if touched.is_empty() {
            let id = self.curves.len();
            self.curves.push(Some(SelfMotionCurve::single(b)));
            self.owner.insert(b, id);
            return InsertOutcome::NewCurve(id);
        }
        if interior_only || end_curves.len() > 2 {
            self.pool.push(b);
            return InsertOutcome::Pooled;
        }
        if end_curves.len() == 1 {
            let c = end_curves[0];
            let both = ends.len() == 2;
            let curve = self.curves[c].as_mut().unwrap();
            self.owner.insert(b, c);
            if both && curve.len() >= 3 {
                curve.boxes.push(b);
                curve.closed = true;
                curve.ends = [EndpointKind::Closed; 2];
                return InsertOutcome::Closed(c);
            }
            if ends.contains(&(c, End::Back)) || curve.len() == 1 {
                curve.boxes.push(b);
            } else {
                curve.boxes.insert(0, b);
            }
            return InsertOutcome::Appended(c);
        }

        // join two curves through b
        let (c1, c2) = (end_curves[0], end_curves[1]);
        let e1 = if ends.contains(&(c1, End::Back)) {
            End::Back
        } else {
            End::Front
        };
        let e2 = if ends.contains(&(c2, End::Front)) {
            End::Front
        } else {
            End::Back
        };
        let mut first = self.curves[c1].take().unwrap();
        let mut second = self.curves[c2].take().unwrap();
        if e1 == End::Front {
            first.boxes.reverse();
        }
        if e2 == End::Back {
            second.boxes.reverse();
        }
        first.boxes.push(b);
        first.boxes.extend(second.boxes);
        for &x in &first.boxes {
            self.owner.insert(x, c1);
        }
        self.curves[c1] = Some(first);
        InsertOutcome::Merged(c1)
    }

    /// Every box of `set` in the pool, no curves. Used when the solution set is
    /// not a family of one-dimensional curves.
    pub fn pooled(set: &SolutionSet, epsilon: f64) -> CurveSet {
        let mut out = CurveSet::new(epsilon);
        out.pool = (0..set.len()).collect();
        out.placed = out.pool.iter().copied().collect();
        out
    }

    /// Canonical curves over every box of `set`. `limits` (one per joint, or
    /// empty) marks ends that touch a joint limit.
    pub fn finalize(set: &SolutionSet, epsilon: f64, limits: &[Option<Interval>]) -> CurveSet {
        let n = set.len();
        let mut order: Vec<usize> = (0..n).collect();
        let keys: Vec<_> = set.iter().map(|b| box_key(&b.rotation_box)).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let mut rank = vec![0usize; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        // adjacency in rank space, sorted
        let adj: Vec<Vec<usize>> = order
            .iter()
            .map(|&i| {
                let mut v: Vec<usize> = set
                    .neighbors(i, epsilon)
                    .into_iter()
                    .map(|j| rank[j])
                    .collect();
                v.sort_unstable();
                v
            })
            .collect();

        let mut out = CurveSet::new(epsilon);
        let mut comp = vec![usize::MAX; n];
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let members = bfs_component(&adj, start, &mut comp, out.curves.len());
            let (spine, closed) = extract_spine(&adj, &members);
            let on_spine: HashSet<usize> = spine.iter().copied().collect();
            let id = out.curves.len();
            let boxes: Vec<usize> = spine.iter().map(|&r| order[r]).collect();
            let ends = if closed {
                [EndpointKind::Closed; 2]
            } else {
                [
                    end_kind(set, boxes[0], epsilon, limits),
                    end_kind(set, *boxes.last().unwrap(), epsilon, limits),
                ]
            };
            for &b in &boxes {
                out.owner.insert(b, id);
                out.placed.insert(b);
            }
            for &m in &members {
                if !on_spine.contains(&m) {
                    out.pool.push(order[m]);
                    out.placed.insert(order[m]);
                }
            }
            out.curves.push(Some(SelfMotionCurve {
                boxes,
                closed,
                ends,
            }));
        }
        out
    }

    /// Consecutive boxes of every curve are adjacent, and every placed box is
    /// on exactly one curve or in the pool.
    pub fn check(&self, set: &SolutionSet) -> Result<(), String> {
        let mut seen = HashSet::new();
        for (id, c) in self.curves() {
            for w in c.boxes.windows(2) {
                if !set.get(w[0]).adjacent(set.get(w[1]), self.epsilon) {
                    return Err(format!(
                        "curve {id}: boxes {} and {} are not adjacent",
                        w[0], w[1]
                    ));
                }
            }
            if c.closed
                && c.len() > 2
                && !set.get(c.front()).adjacent(set.get(c.back()), self.epsilon)
            {
                return Err(format!(
                    "curve {id} is marked closed but its ends are apart"
                ));
            }
            for &b in &c.boxes {
                if !seen.insert(b) {
                    return Err(format!("box {b} appears twice"));
                }
            }
        }
        for &b in &self.pool {
            if !seen.insert(b) {
                return Err(format!("pooled box {b} is also on a curve"));
            }
        }
        if seen.len() != self.placed.len() {
            return Err(format!(
                "{} boxes placed but {} accounted for",
                self.placed.len(),
                seen.len()
            ));
        }
        Ok(())
    }
}

fn end_kind(set: &SolutionSet, b: usize, eps: f64, limits: &[Option<Interval>]) -> EndpointKind {
    let joints = &set.get(b).joints.theta;
    let cut = limits.iter().zip(joints).any(|(lim, t)| match lim {
        Some(l) => t.lo() <= l.lo() + eps || t.hi() >= l.hi() - eps,
        None => false,
    });
    if cut {
        EndpointKind::LimitCut
    } else {
        EndpointKind::Open
    }
}

fn bfs_component(adj: &[Vec<usize>], start: usize, comp: &mut [usize], id: usize) -> Vec<usize> {
    let mut members = vec![start];
    comp[start] = id;
    let mut i = 0;
    while i < members.len() {
        let v = members[i];
        i += 1;
        for &w in &adj[v] {
            if comp[w] == usize::MAX {
                comp[w] = id;
                members.push(w);
            }
        }
    }
    members.sort_unstable();
    members
}

// BFS distances and parents from `src`, skipping `blocked`.
fn bfs(adj: &[Vec<usize>], src: usize, blocked: &HashSet<usize>) -> HashMap<usize, (usize, usize)> {
    let mut info = HashMap::new();
    info.insert(src, (0usize, src));
    let mut q = VecDeque::from([src]);
    while let Some(v) = q.pop_front() {
        let d = info[&v].0;
        for &w in &adj[v] {
            if blocked.contains(&w) || info.contains_key(&w) {
                continue;
            }
            info.insert(w, (d + 1, v));
            q.push_back(w);
        }
    }
    info
}

fn farthest(info: &HashMap<usize, (usize, usize)>) -> usize {
    let mut best = (0usize, usize::MAX);
    for (&v, &(d, _)) in info {
        if d > best.0 || (d == best.0 && v < best.1) {
            best = (d, v);
        }
    }
    best.1
}

fn path_to(info: &HashMap<usize, (usize, usize)>, mut v: usize) -> Vec<usize> {
    let mut p = vec![v];
    while info[&v].1 != v {
        v = info[&v].1;
        p.push(v);
    }
    p.reverse();
    p
}

// Spine of one component: a loop when the component is ring-shaped, else a
// shortest path between two far-apart members.
fn extract_spine(adj: &[Vec<usize>], members: &[usize]) -> (Vec<usize>, bool) {
    if members.len() == 1 {
        return (vec![members[0]], false);
    }
    let none = HashSet::new();
    let a = farthest(&bfs(adj, members[0], &none));
    let from_a = bfs(adj, a, &none);
    let b = farthest(&from_a);
    let path1 = path_to(&from_a, b);
    let d = from_a[&b].0;
    if d >= 4 {
        let level = d / 2;
        let band: HashSet<usize> = from_a
            .iter()
            .filter(|(_, &(dv, _))| dv + 1 >= level && dv <= level + 1)
            .map(|(&v, _)| v)
            .collect();
        // band component holding the first path
        let mut arm = HashSet::new();
        let seed = path1[level];
        let mut q = VecDeque::from([seed]);
        arm.insert(seed);
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if band.contains(&w) && arm.insert(w) {
                    q.push_back(w);
                }
            }
        }
        if arm.len() < band.len() {
            let mut blocked: HashSet<usize> = arm;
            blocked.extend(path1[1..path1.len() - 1].iter().copied());
            let from_b = bfs(adj, b, &blocked);
            if from_b.contains_key(&a) {
                let path2 = path_to(&from_b, a);
                if path2.len() >= 3 {
                    let mut spine = path1;
                    spine.extend_from_slice(&path2[1..path2.len() - 1]);
                    return (spine, true);
                }
            }
        }
    }
    (path1, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::IntervalBox;
    use crate::recovery::JointIntervalVector;
    use crate::solution::SolutionBox;

    fn sb(t: &[(f64, f64)]) -> SolutionBox {
        SolutionBox {
            rotation_box: IntervalBox::from_bounds(t),
            joints: JointIntervalVector {
                theta: t.iter().map(|&(a, b)| Interval::new(a, b)).collect(),
                wrapped: vec![false; t.len()],
            },
            depth: 0,
        }
    }

    // unit box at x along a line, y fixed
    fn at(x: f64, y: f64) -> SolutionBox {
        sb(&[(x, x + 0.01), (y, y + 0.01)])
    }

    #[test]
    fn insertion_patterns() {
        let eps = 0.005;
        let mut set = SolutionSet::for_epsilon(eps);
        let mut curves = CurveSet::new(eps);
        let a = set.push(at(0.0, 0.0));
        assert_eq!(curves.insert_box(&set, a), InsertOutcome::NewCurve(0));
        let b = set.push(at(0.012, 0.0));
        assert_eq!(curves.insert_box(&set, b), InsertOutcome::Appended(0));
        let far = set.push(at(0.036, 0.0));
        assert_eq!(curves.insert_box(&set, far), InsertOutcome::NewCurve(1));
        let mid = set.push(at(0.024, 0.0));
        assert_eq!(curves.insert_box(&set, mid), InsertOutcome::Merged(0));
        assert_eq!(curves.curve_count(), 1);
        let (_, c) = curves.curves().next().unwrap();
        assert_eq!(c.boxes, vec![a, b, mid, far]);
        // a box beside the interior only
        let side = set.push(at(0.0175, 0.012));
        assert_eq!(curves.insert_box(&set, side), InsertOutcome::Pooled);
        curves.check(&set).unwrap();
    }

    #[test]
    fn prepend_at_front() {
        let eps = 0.005;
        let mut set = SolutionSet::for_epsilon(eps);
        let mut curves = CurveSet::new(eps);
        for x in [0.1, 0.112, 0.088] {
            let i = set.push(at(x, 0.0));
            curves.insert_box(&set, i);
        }
        let (_, c) = curves.curves().next().unwrap();
        assert_eq!(c.boxes, vec![2, 0, 1]);
    }

    fn ring(n: usize, r: f64) -> Vec<SolutionBox> {
        (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                at(r * a.cos(), r * a.sin())
            })
            .collect()
    }

    #[test]
    fn finalize_finds_loop_and_open_curve() {
        let eps = 0.005;
        let mut set = SolutionSet::for_epsilon(eps);
        for b in ring(40, 0.07) {
            set.push(b);
        }
        for k in 0..15 {
            set.push(at(1.0 + 0.012 * k as f64, 1.0));
        }
        let cs = CurveSet::finalize(&set, eps, &[]);
        cs.check(&set).unwrap();
        assert_eq!(cs.curve_count(), 2);
        let mut kinds: Vec<(bool, usize)> = cs.curves().map(|(_, c)| (c.closed, c.len())).collect();
        kinds.sort();
        assert_eq!(kinds[0], (false, 15));
        assert!(kinds[1].0 && kinds[1].1 >= 38, "{kinds:?}");
    }

    #[test]
    fn finalize_is_order_independent() {
        let eps = 0.005;
        let mut boxes = ring(30, 0.06);
        boxes.extend((0..10).map(|k| at(0.5 + 0.012 * k as f64, 0.0)));
        // thicken the open curve
        boxes.extend((0..10).map(|k| at(0.5 + 0.012 * k as f64, 0.011)));
        let canon = |bs: &[SolutionBox]| {
            let mut set = SolutionSet::for_epsilon(eps);
            for b in bs {
                set.push(b.clone());
            }
            let cs = CurveSet::finalize(&set, eps, &[]);
            cs.check(&set).unwrap();
            let mut out: Vec<Vec<Vec<(u64, u64)>>> = cs
                .curves()
                .map(|(_, c)| {
                    c.boxes
                        .iter()
                        .map(|&i| box_key(&set.get(i).rotation_box))
                        .collect()
                })
                .collect();
            out.sort();
            (out, cs.pool().len())
        };
        let first = canon(&boxes);
        boxes.reverse();
        assert_eq!(canon(&boxes), first);
        boxes.rotate_left(13);
        assert_eq!(canon(&boxes), first);
    }

    #[test]
    fn limit_cut_ends() {
        let eps = 0.005;
        let mut set = SolutionSet::for_epsilon(eps);
        for k in 0..5 {
            set.push(at(0.95 + 0.012 * k as f64, 0.0));
        }
        let limits = [Some(Interval::new(-1.0, 1.0)), None];
        let cs = CurveSet::finalize(&set, eps, &limits);
        let (_, c) = cs.curves().next().unwrap();
        let kinds = c.ends;
        assert!(kinds.contains(&EndpointKind::LimitCut));
        assert!(kinds.contains(&EndpointKind::Open));
    }
}
