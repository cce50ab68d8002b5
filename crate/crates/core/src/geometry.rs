//! Nearest-neighbor distances, the largest nearest-neighbor link `d_n`, and
//! isolated-vertex counts.
//!
//! Edges of `G(X, r)` join points at distance strictly less than `r`, so a
//! point is isolated at `r` exactly when its nearest-neighbor distance is at
//! least `r`.
//!
//! Both the kd-tree and the brute-force path compare squared distances
//! produced by the same [`squared_distance`] routine and take one square
//! root per point, so their outputs agree bit for bit.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampler::PointCloud;

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearestNeighborSummary {
    /// Distance from each point to its nearest other point.
    pub nn_dist: Vec<f64>,
    /// `max(nn_dist)`.
    pub dn: f64,
}

impl NearestNeighborSummary {
    fn from_squared(sq: Vec<f64>) -> Self {
        let nn_dist: Vec<f64> = sq.into_iter().map(f64::sqrt).collect();
        let dn = nn_dist.iter().copied().fold(0.0, f64::max);
        Self { nn_dist, dn }
    }

    pub fn n(&self) -> usize {
        self.nn_dist.len()
    }
}

#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let t = x - y;
        s += t * t;
    }
    s
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Static kd-tree with median splits along the axis of widest spread.
///
/// Points are copied into tree order so leaves scan contiguous memory.
#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    data: Vec<f64>,
    /// Original index of the point stored at each tree slot.
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn build(dim: usize, coords: &[f64]) -> Self {
        assert!(dim > 0 && coords.len().is_multiple_of(dim));
        let n = coords.len() / dim;
        let mut order: Vec<usize> = (0..n).collect();
        let mut nodes = Vec::with_capacity(2 * n / LEAF_SIZE + 1);
        if n > 0 {
            build_node(dim, coords, &mut order, 0, &mut nodes);
        }
        let mut data = Vec::with_capacity(coords.len());
        for &i in &order {
            data.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
        }
        Self {
            dim,
            data,
            order,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Nearest stored point to `query` other than the point with original
    /// index `exclude`. Returns `(squared distance, original index)`.
    pub fn nearest_excluding(&self, query: &[f64], exclude: usize) -> Option<(f64, usize)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (f64::INFINITY, usize::MAX);
        self.search(0, query, exclude, &mut best);
        (best.1 != usize::MAX).then_some(best)
    }

    fn search(&self, node: usize, q: &[f64], exclude: usize, best: &mut (f64, usize)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for slot in start..end {
                    let idx = self.order[slot];
                    if idx == exclude {
                        continue;
                    }
                    let p = &self.data[slot * self.dim..(slot + 1) * self.dim];
                    let d2 = squared_distance(q, p);
                    if d2 < best.0 {
                        *best = (d2, idx);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, exclude, best);
                // every point beyond the plane is at squared distance >= diff^2
                if diff * diff <= best.0 {
                    self.search(far, q, exclude, best);
                }
            }
        }
    }

    /// Squared nearest-neighbor distance of every stored point, indexed by
    /// original point index.
    fn all_nearest(&self) -> Result<Vec<f64>> {
        let n = self.len();
        let found: Vec<(f64, usize)> = (0..n)
            .into_par_iter()
            .with_min_len(512)
            .map(|slot| {
                let q = &self.data[slot * self.dim..(slot + 1) * self.dim];
                self.nearest_excluding(q, self.order[slot])
                    .expect("at least two points")
            })
            .collect();
        let mut sq = vec![0.0; n];
        for (slot, (d2, j)) in found.into_iter().enumerate() {
            let i = self.order[slot];
            if d2 == 0.0 {
                return Err(Error::DuplicatePoints {
                    first: i.min(j),
                    second: i.max(j),
                });
            }
            sq[i] = d2;
        }
        Ok(sq)
    }
}

fn build_node(
    dim: usize,
    coords: &[f64],
    idx: &mut [usize],
    offset: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let id = nodes.len();
    if idx.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            start: offset,
            end: offset + idx.len(),
        });
        return id;
    }
    let axis = widest_axis(dim, coords, idx);
    let mid = idx.len() / 2;
    idx.select_nth_unstable_by(mid, |&a, &b| {
        coords[a * dim + axis].total_cmp(&coords[b * dim + axis])
    });
    let value = coords[idx[mid] * dim + axis];
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let (lo, hi) = idx.split_at_mut(mid);
    let left = build_node(dim, coords, lo, offset, nodes);
    let right = build_node(dim, coords, hi, offset + mid, nodes);
    nodes[id] = Node::Split {
        axis,
        value,
        left,
        right,
    };
    id
}

fn widest_axis(dim: usize, coords: &[f64], idx: &[usize]) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for axis in 0..dim {
        let (lo, hi) = idx.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            let x = coords[i * dim + axis];
            (lo.min(x), hi.max(x))
        });
        if hi - lo > best.1 {
            best = (axis, hi - lo);
        }
    }
    best.0
}

fn check_len(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    Ok(())
}

/// Nearest-neighbor distances of raw row-major coordinates via the kd-tree.
pub fn nn_distances_of(dim: usize, coords: &[f64]) -> Result<NearestNeighborSummary> {
    check_len(coords.len() / dim)?;
    let tree = KdTree::build(dim, coords);
    Ok(NearestNeighborSummary::from_squared(tree.all_nearest()?))
}

/// Nearest-neighbor distances via the kd-tree.
pub fn nn_distances(cloud: &PointCloud) -> Result<NearestNeighborSummary> {
    nn_distances_of(cloud.dim(), cloud.coords())
}

/// Quadratic-time reference for [`nn_distances`].
pub fn nn_distances_brute(cloud: &PointCloud) -> Result<NearestNeighborSummary> {
    let n = cloud.len();
    check_len(n)?;
    let mut sq = vec![f64::INFINITY; n];
    for i in 0..n {
        let p = cloud.point(i);
        for j in (i + 1)..n {
            let d2 = squared_distance(p, cloud.point(j));
            if d2 == 0.0 {
                return Err(Error::DuplicatePoints { first: i, second: j });
            }
            if d2 < sq[i] {
                sq[i] = d2;
            }
            if d2 < sq[j] {
                sq[j] = d2;
            }
        }
    }
    Ok(NearestNeighborSummary::from_squared(sq))
}

/// `d_n`, the smallest `r` for which `G(X, r)` has no isolated vertex in the
/// limit from above.
pub fn largest_nn_link(summary: &NearestNeighborSummary) -> f64 {
    summary.dn
}

/// `W(r) = #{i : nn_dist[i] >= r}`.
pub fn count_isolated(summary: &NearestNeighborSummary, r: f64) -> usize {
    summary.nn_dist.iter().filter(|&&d| d >= r).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(dim: usize, pts: &[f64]) -> PointCloud {
        PointCloud::from_coords(dim, pts.to_vec())
    }

    #[test]
    fn right_triangle() {
        let c = cloud(2, &[0.0, 0.0, 3.0, 0.0, 0.0, 4.0]);
        for s in [nn_distances(&c).unwrap(), nn_distances_brute(&c).unwrap()] {
            assert_eq!(s.nn_dist, vec![3.0, 3.0, 4.0]);
            assert_eq!(largest_nn_link(&s), 4.0);
        }
    }

    #[test]
    fn collinear() {
        let c = cloud(2, &[0.0, 0.0, 1.0, 0.0, 3.0, 0.0]);
        let s = nn_distances(&c).unwrap();
        assert_eq!(s.nn_dist, vec![1.0, 1.0, 2.0]);
        assert_eq!(s.dn, 2.0);
        assert_eq!(count_isolated(&s, 1.5), 1);
        assert_eq!(count_isolated(&s, 1.0), 3);
        assert_eq!(count_isolated(&s, 0.5), 3);
        assert_eq!(count_isolated(&s, 2.0), 1);
        assert_eq!(count_isolated(&s, 2.0000001), 0);
    }

    #[test]
    fn equal_nn_distances() {
        let s = NearestNeighborSummary::from_squared(vec![2.25; 5]);
        assert_eq!(largest_nn_link(&s), 1.5);
    }

    #[test]
    fn too_few_points() {
        let c = cloud(3, &[1.0, 2.0, 3.0]);
        assert!(matches!(nn_distances(&c), Err(Error::TooFewPoints(1))));
        assert!(matches!(nn_distances_brute(&c), Err(Error::TooFewPoints(1))));
    }

    #[test]
    fn duplicates_rejected() {
        let mut pts = Vec::new();
        for i in 0..100 {
            pts.extend_from_slice(&[i as f64, (i * i) as f64 * 0.01]);
        }
        pts.extend_from_slice(&[17.0, 2.89]);
        let c = cloud(2, &pts);
        assert!(matches!(
            nn_distances(&c),
            Err(Error::DuplicatePoints { first: 17, second: 100 })
        ));
        assert!(matches!(
            nn_distances_brute(&c),
            Err(Error::DuplicatePoints { first: 17, second: 100 })
        ));
    }

    #[test]
    fn tree_handles_ties_in_split_axis() {
        // a lattice puts many points exactly on every splitting plane
        let mut pts = Vec::new();
        for i in 0..30 {
            for j in 0..30 {
                pts.extend_from_slice(&[i as f64, j as f64 * 1.5]);
            }
        }
        let c = cloud(2, &pts);
        assert_eq!(nn_distances(&c).unwrap(), nn_distances_brute(&c).unwrap());
        assert_eq!(nn_distances(&c).unwrap().dn, 1.0);
    }
}
