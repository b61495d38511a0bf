//! Accepted boxes, their joint enclosures and a joint-space neighbor index.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::interval::{Interval, IntervalBox};
use crate::recovery::{contains_angle, wrap_angle, JointIntervalVector};

/// Number of leading joints used as grid keys.
const INDEX_DIMS: usize = 3;
// boxes with a joint wider than this bypass the grid
const WIDE_JOINT: f64 = 0.5;

/// One accepted ε-box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionBox {
    pub rotation_box: IntervalBox,
    pub joints: JointIntervalVector,
    /// Depth of the search node the box came from.
    pub depth: usize,
}

impl SolutionBox {
    /// Joint intervals, each widened by `delta`, meet those of `other` modulo
    /// 2π. This is the adjacency relation used for clustering and curves.
    pub fn adjacent(&self, other: &SolutionBox, delta: f64) -> bool {
        self.joints
            .theta
            .iter()
            .zip(&other.joints.theta)
            .all(|(a, b)| angles_meet(a, b, delta))
    }
}

/// `a` widened by `delta` meets `b` or one of its 2π translates.
pub fn angles_meet(a: &Interval, b: &Interval, delta: f64) -> bool {
    let a = a.inflate(delta);
    if a.intersects(b) {
        return true;
    }
    [TAU, -TAU]
        .iter()
        .any(|&k| a.intersects(&(*b + Interval::point(k))))
}

/// Canonical ordering key of a box, independent of insertion order.
pub fn box_key(b: &IntervalBox) -> Vec<(u64, u64)> {
    b.iter()
        .map(|c| (ordered_bits(c.lo()), ordered_bits(c.hi())))
        .collect()
}

fn ordered_bits(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

/// Uniform grid over joint midpoints (first few joints).
#[derive(Clone, Debug, Default)]
struct JointGrid {
    cell: f64,
    dims: usize,
    cells: HashMap<Vec<i32>, Vec<usize>>,
    // boxes too wide to bin usefully
    wide: Vec<usize>,
    max_half: f64,
}

impl JointGrid {
    fn new(cell: f64) -> Self {
        JointGrid {
            cell,
            ..Default::default()
        }
    }

    fn cell_of(&self, x: f64) -> i32 {
        (x / self.cell).floor() as i32
    }

    fn insert(&mut self, idx: usize, joints: &JointIntervalVector) {
        if self.dims == 0 {
            self.dims = joints.len().min(INDEX_DIMS);
        }
        let half = joints.theta[..self.dims]
            .iter()
            .map(|t| 0.5 * t.width())
            .fold(0.0, f64::max);
        if half > WIDE_JOINT {
            self.wide.push(idx);
            return;
        }
        self.max_half = self.max_half.max(half);
        let key: Vec<i32> = joints.theta[..self.dims]
            .iter()
            .map(|t| self.cell_of(wrap_angle(t.mid())))
            .collect();
        self.cells.entry(key).or_default().push(idx);
    }

    /// Indices of boxes whose joint intervals could meet `q` widened by
    /// `delta`, including across the ±π seam.
    fn candidates(&self, q: &JointIntervalVector, delta: f64, out: &mut Vec<usize>) {
        out.clear();
        out.extend_from_slice(&self.wide);
        if self.dims == 0 || self.cells.is_empty() {
            return;
        }
        let reach = delta + self.max_half;
        let mut ranges: Vec<Vec<(i32, i32)>> = Vec::with_capacity(self.dims);
        for t in &q.theta[..self.dims] {
            let lo = t.lo() - reach;
            let hi = t.hi() + reach;
            let mut r = Vec::with_capacity(2);
            if hi - lo >= TAU + 2.0 * self.cell {
                r.push((self.cell_of(-PI - self.cell), self.cell_of(PI + self.cell)));
            } else {
                for k in [0.0, TAU, -TAU] {
                    let (l, h) = (lo + k, hi + k);
                    if h >= -PI - self.cell && l <= PI + self.cell {
                        r.push((self.cell_of(l), self.cell_of(h)));
                    }
                }
            }
            ranges.push(r);
        }
        let volume: usize = ranges
            .iter()
            .map(|r| r.iter().map(|(a, b)| (b - a + 1) as usize).sum::<usize>())
            .product();
        if volume > self.cells.len() {
            // cheaper to scan what is there
            for v in self.cells.values() {
                out.extend_from_slice(v);
            }
            return;
        }
        let mut key = vec![0i32; self.dims];
        self.walk(&ranges, 0, &mut key, out);
    }

    fn walk(&self, ranges: &[Vec<(i32, i32)>], d: usize, key: &mut Vec<i32>, out: &mut Vec<usize>) {
        if d == ranges.len() {
            if let Some(v) = self.cells.get(key) {
                out.extend_from_slice(v);
            }
            return;
        }
        for &(a, b) in &ranges[d] {
            for c in a..=b {
                key[d] = c;
                self.walk(ranges, d + 1, key, out);
            }
        }
    }
}

/// All accepted boxes of a run, in acceptance order.
#[derive(Clone, Debug)]
pub struct SolutionSet {
    boxes: Vec<SolutionBox>,
    grid: JointGrid,
}

impl SolutionSet {
    /// Empty set; `cell` sets the joint-grid resolution (radians).
    pub fn new(cell: f64) -> Self {
        assert!(cell > 0.0, "grid cell must be positive");
        SolutionSet {
            boxes: Vec::new(),
            grid: JointGrid::new(cell),
        }
    }

    pub fn for_epsilon(epsilon: f64) -> Self {
        SolutionSet::new((4.0 * epsilon).clamp(1e-4, 0.5))
    }

    pub fn push(&mut self, b: SolutionBox) -> usize {
        let idx = self.boxes.len();
        self.grid.insert(idx, &b.joints);
        self.boxes.push(b);
        idx
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn get(&self, i: usize) -> &SolutionBox {
        &self.boxes[i]
    }

    pub fn boxes(&self) -> &[SolutionBox] {
        &self.boxes
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SolutionBox> {
        self.boxes.iter()
    }

    /// Boxes adjacent to `joints` (with `delta` slack), sorted by index.
    pub fn neighbors_of(&self, joints: &JointIntervalVector, delta: f64) -> Vec<usize> {
        let mut cand = Vec::new();
        self.grid.candidates(joints, delta, &mut cand);
        let mut out: Vec<usize> = cand
            .into_iter()
            .filter(|&i| {
                self.boxes[i]
                    .joints
                    .theta
                    .iter()
                    .zip(&joints.theta)
                    .all(|(a, b)| angles_meet(b, a, delta))
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Neighbors of box `i`, excluding itself.
    pub fn neighbors(&self, i: usize, delta: f64) -> Vec<usize> {
        let mut v = self.neighbors_of(&self.boxes[i].joints, delta);
        v.retain(|&k| k != i);
        v
    }

    /// Index of a box containing the rotation point `x` (whose joint angles
    /// are `theta`), with every box widened by `tol`.
    pub fn find_containing(&self, x: &[f64], theta: &[f64], tol: f64) -> Option<usize> {
        let q = JointIntervalVector {
            theta: theta.iter().map(|&t| Interval::point(t)).collect(),
            wrapped: vec![false; theta.len()],
        };
        let mut cand = Vec::new();
        self.grid.candidates(&q, tol, &mut cand);
        cand.sort_unstable();
        cand.into_iter().find(|&i| {
            let b = &self.boxes[i];
            b.joints
                .theta
                .iter()
                .zip(theta)
                .all(|(iv, &t)| contains_angle(iv, t, tol))
                && b.rotation_box
                    .iter()
                    .zip(x)
                    .all(|(c, &v)| c.inflate(tol).contains(v))
        })
    }

    /// Indices of boxes whose rotation box meets `b`, found through the
    /// joint-space enclosure `joints` of `b`.
    pub fn intersecting(&self, b: &IntervalBox, joints: &JointIntervalVector) -> Vec<usize> {
        self.neighbors_of(joints, 0.0)
            .into_iter()
            .filter(|&i| self.boxes[i].rotation_box.intersects(b))
            .collect()
    }

    /// Connected components of the adjacency graph; returns a component id
    /// per box (numbered by first member) and the component count.
    pub fn clusters(&self, delta: f64) -> (Vec<usize>, usize) {
        let n = self.boxes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for i in 0..n {
            for j in self.neighbors(i, delta) {
                if j > i {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut root_id = HashMap::new();
        let ids = (0..n)
            .map(|i| {
                let r = find(&mut parent, i);
                let next = root_id.len();
                *root_id.entry(r).or_insert(next)
            })
            .collect();
        (ids, root_id.len())
    }

    /// Clusters of a finite solution set, one per distinct refined root.
    /// `roots[i]` is where local refinement from box `i` converged, if it
    /// converged onto a covered configuration. Roots closer than `tol` (per
    /// joint, modulo 2π) are the same solution. Boxes without a root join the
    /// nearest labelled box by adjacency hops; adjacency components with no
    /// root at all stay clusters of their own. Returns the cluster id per
    /// box, the cluster count and how many clusters hold a root.
    pub fn anchored_clusters(
        &self,
        delta: f64,
        roots: &[Option<Vec<f64>>],
        tol: f64,
    ) -> (Vec<usize>, usize, usize) {
        let n = self.boxes.len();
        let mut distinct: Vec<&[f64]> = Vec::new();
        let mut label = vec![usize::MAX; n];
        for (i, r) in roots.iter().enumerate() {
            let Some(r) = r else { continue };
            let near = |d: &&[f64]| d.iter().zip(r).all(|(a, b)| wrap_angle(a - b).abs() <= tol);
            label[i] = distinct.iter().position(near).unwrap_or_else(|| {
                distinct.push(r);
                distinct.len() - 1
            });
        }
        // breadth-first from every labelled box, in index order
        let mut queue: std::collections::VecDeque<usize> =
            (0..n).filter(|&i| label[i] != usize::MAX).collect();
        let mut next = distinct.len();
        for start in 0..=n {
            while let Some(i) = queue.pop_front() {
                for j in self.neighbors(i, delta) {
                    if label[j] == usize::MAX {
                        label[j] = label[i];
                        queue.push_back(j);
                    }
                }
            }
            if let Some(s) = (start..n).find(|&s| label[s] == usize::MAX) {
                label[s] = next;
                next += 1;
                queue.push_back(s);
            }
        }
        // renumber by first member
        let mut ids = vec![0; n];
        let mut seen = HashMap::new();
        for i in 0..n {
            let k = seen.len();
            ids[i] = *seen.entry(label[i]).or_insert(k);
        }
        (ids, seen.len(), distinct.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jb(theta: &[(f64, f64)]) -> JointIntervalVector {
        JointIntervalVector {
            theta: theta.iter().map(|&(a, b)| Interval::new(a, b)).collect(),
            wrapped: vec![false; theta.len()],
        }
    }

    fn sb(theta: &[(f64, f64)]) -> SolutionBox {
        let rot = IntervalBox::from_bounds(theta);
        SolutionBox {
            rotation_box: rot,
            joints: jb(theta),
            depth: 0,
        }
    }

    #[test]
    fn neighbors_match_brute_force() {
        let mut set = SolutionSet::new(0.04);
        let mut boxes = Vec::new();
        let mut s = 12345u64;
        let mut rnd = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..400 {
            let c: Vec<(f64, f64)> = (0..4)
                .map(|_| {
                    let m = (rnd() * 2.0 - 1.0) * 3.1;
                    let w = rnd() * 0.03;
                    (m - w, m + w)
                })
                .collect();
            let b = sb(&c);
            boxes.push(b.clone());
            set.push(b);
        }
        for i in 0..boxes.len() {
            let mut brute: Vec<usize> = (0..boxes.len())
                .filter(|&j| j != i && boxes[i].adjacent(&boxes[j], 0.2))
                .collect();
            brute.sort_unstable();
            assert_eq!(set.neighbors(i, 0.2), brute, "box {i}");
        }
    }

    #[test]
    fn adjacency_wraps_across_pi() {
        let a = sb(&[(3.13, 3.137), (0.0, 0.01)]);
        let b = sb(&[(-3.137, -3.13), (0.0, 0.01)]);
        assert!(a.adjacent(&b, 0.01));
        let mut set = SolutionSet::new(0.04);
        set.push(a);
        set.push(b);
        assert_eq!(set.neighbors(0, 0.01), vec![1]);
        let (_, n) = set.clusters(0.01);
        assert_eq!(n, 1);
    }

    #[test]
    fn clusters_and_containment() {
        let mut set = SolutionSet::for_epsilon(0.01);
        set.push(sb(&[(0.0, 0.01), (0.0, 0.01)]));
        set.push(sb(&[(0.015, 0.025), (0.0, 0.01)]));
        set.push(sb(&[(1.0, 1.01), (1.0, 1.01)]));
        let (ids, n) = set.clusters(0.01);
        assert_eq!(n, 2);
        assert_eq!(ids, vec![0, 0, 1]);
        assert_eq!(
            set.find_containing(&[1.005, 1.005], &[1.005, 1.005], 0.0),
            Some(2)
        );
        assert_eq!(set.find_containing(&[0.5, 0.5], &[0.5, 0.5], 1e-3), None);
        let q = IntervalBox::from_bounds(&[(0.005, 0.02), (0.0, 0.001)]);
        assert_eq!(
            set.intersecting(&q, &jb(&[(0.005, 0.02), (0.0, 0.001)])),
            vec![0, 1]
        );
    }

    #[test]
    fn anchored_clusters_split_and_merge_by_root() {
        let mut set = SolutionSet::for_epsilon(0.01);
        // two roots inside one adjacency chain, and a detached stray box
        // whose refinement lands on the first root
        set.push(sb(&[(0.0, 0.01), (0.0, 0.01)]));
        set.push(sb(&[(0.015, 0.025), (0.0, 0.01)]));
        set.push(sb(&[(0.03, 0.04), (0.0, 0.01)]));
        set.push(sb(&[(0.5, 0.51), (0.0, 0.01)]));
        set.push(sb(&[(2.0, 2.01), (2.0, 2.01)]));
        let roots = vec![
            Some(vec![0.005, 0.005]),
            None,
            Some(vec![0.035, 0.005]),
            Some(vec![0.005, 0.005 + 1e-9]),
            None,
        ];
        assert_eq!(set.clusters(0.01).1, 3);
        let (ids, n, anchored) = set.anchored_clusters(0.01, &roots, 1e-6);
        assert_eq!((n, anchored), (3, 2));
        assert_eq!(ids, vec![0, 0, 1, 0, 2]);
    }

    #[test]
    fn canonical_key_orders_numerically() {
        let a = box_key(&IntervalBox::from_bounds(&[(-1.0, 0.5)]));
        let b = box_key(&IntervalBox::from_bounds(&[(-0.5, 0.5)]));
        let c = box_key(&IntervalBox::from_bounds(&[(0.5, 0.7)]));
        assert!(a < b && b < c);
    }
}
