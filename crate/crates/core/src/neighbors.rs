//! Exact Euclidean k-nearest-neighbor search and cross-mapping.
//!
//! [`NeighborIndex`] is a k-d tree over the rows of an [`EmbeddedSeries`].
//! Results are exact: neighbors are ordered by `(squared distance, row index)`,
//! so equal distances resolve to the lower time index.

use crate::embedding::EmbeddedSeries;
use crate::error::{Error, Result};

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    /// Row (time) index in the indexed series.
    pub index: usize,
    pub distance: f64,
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// Immutable k-d tree over the rows of an embedding.
#[derive(Debug, Clone)]
pub struct NeighborIndex<'a> {
    points: &'a EmbeddedSeries,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// Sorted candidate list holding the best `k` `(d2, index)` pairs.
struct Candidates {
    k: usize,
    best: Vec<(f64, usize)>,
}

impl Candidates {
    fn new(k: usize) -> Self {
        Self { k, best: Vec::with_capacity(k + 1) }
    }

    #[inline]
    fn worst(&self) -> f64 {
        if self.best.len() < self.k {
            f64::INFINITY
        } else {
            self.best[self.k - 1].0
        }
    }

    #[inline]
    fn offer(&mut self, d2: f64, index: usize) {
        let key = (d2, index);
        if self.best.len() == self.k {
            let last = self.best[self.k - 1];
            if !(key.0 < last.0 || (key.0 == last.0 && key.1 < last.1)) {
                return;
            }
            self.best.pop();
        }
        let pos = self.best.partition_point(|&(d, i)| d < d2 || (d == d2 && i < index));
        self.best.insert(pos, key);
    }
}

/// Builds a k-d tree over all rows of `points`.
pub fn build_index(points: &EmbeddedSeries) -> Result<NeighborIndex<'_>> {
    NeighborIndex::new(points)
}

impl<'a> NeighborIndex<'a> {
    pub fn new(points: &'a EmbeddedSeries) -> Result<Self> {
        if points.rows() == 0 {
            return Err(Error::EmptyPointSet);
        }
        let mut index = Self { points, order: (0..points.rows()).collect(), nodes: Vec::new() };
        index.build(0, points.rows());
        Ok(index)
    }

    pub fn points(&self) -> &'a EmbeddedSeries {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.rows() == 0
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let m = self.points.dim();
        let mut axis = 0;
        let mut widest = -1.0;
        for c in 0..m {
            let (lo, hi) = self.order[start..end].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                let v = self.points.row(r)[c];
                (lo.min(v), hi.max(v))
            });
            if hi - lo > widest {
                widest = hi - lo;
                axis = c;
            }
        }
        if widest <= 0.0 {
            // all points coincide
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mid = start + (end - start) / 2;
        let pts = self.points;
        self.order[start..end]
            .select_nth_unstable_by(mid - start, |&a, &b| pts.row(a)[axis].total_cmp(&pts.row(b)[axis]));
        let value = pts.row(self.order[mid])[axis];
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        // left holds coordinates <= value, right holds coordinates >= value
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Split { axis, value, left, right };
        id
    }

    fn search(&self, node: usize, query: &[f64], exclude: Option<usize>, cands: &mut Candidates) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &r in &self.order[start..end] {
                    if Some(r) == exclude {
                        continue;
                    }
                    cands.offer(squared_distance(query, self.points.row(r)), r);
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = query[axis] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.search(near, query, exclude, cands);
                if diff * diff <= cands.worst() {
                    self.search(far, query, exclude, cands);
                }
            }
        }
    }

    /// The `k` nearest rows to an arbitrary point, optionally skipping one row.
    pub fn knn_point(&self, query: &[f64], k: usize, exclude: Option<usize>) -> Result<Vec<Neighbor>> {
        if query.len() != self.points.dim() {
            return Err(Error::ShapeMismatch(format!("query of dimension {} for {}-dimensional points", query.len(), self.points.dim())));
        }
        let available = self.len() - usize::from(exclude.is_some_and(|e| e < self.len()));
        if k > available {
            return Err(Error::TooManyNeighbors { requested: k, available });
        }
        if k == 0 {
            return Ok(Vec::new());
        }
        let mut cands = Candidates::new(k);
        self.search(0, query, exclude, &mut cands);
        Ok(cands.best.into_iter().map(|(d2, index)| Neighbor { index, distance: d2.sqrt() }).collect())
    }

    /// The `k` nearest rows to row `query_time`, in ascending distance.
    pub fn knn(&self, query_time: usize, k: usize, exclude_self: bool) -> Result<Vec<Neighbor>> {
        if query_time >= self.len() {
            return Err(Error::InvalidParameter(format!("query index {query_time} out of range ({} points)", self.len())));
        }
        self.knn_point(self.points.row(query_time), k, exclude_self.then_some(query_time))
    }
}

/// A neighborhood in one embedding and its same-time image in another.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossMapping {
    pub seed_time: usize,
    /// Neighbor times, ascending distance from the seed in the source embedding.
    pub times: Vec<usize>,
    pub source_rows: Vec<Vec<f64>>,
    pub target_rows: Vec<Vec<f64>>,
}

/// `K` nearest neighbors of `source(t_s)` (self excluded) and the matching rows of `target`.
pub fn cross_map_neighborhood(
    source: &EmbeddedSeries,
    target: &EmbeddedSeries,
    t_s: usize,
    k: usize,
) -> Result<CrossMapping> {
    let index = NeighborIndex::new(source)?;
    cross_map_with_index(&index, target, t_s, k)
}

/// As [`cross_map_neighborhood`] with a prebuilt index over the source.
pub fn cross_map_with_index(
    index: &NeighborIndex<'_>,
    target: &EmbeddedSeries,
    t_s: usize,
    k: usize,
) -> Result<CrossMapping> {
    let source = index.points();
    if source.rows() != target.rows() || source.t0() != target.t0() {
        return Err(Error::ShapeMismatch(format!(
            "cross-mapping needs aligned embeddings ({} rows at t0 {} vs {} rows at t0 {})",
            source.rows(),
            source.t0(),
            target.rows(),
            target.t0()
        )));
    }
    let neighbors = index.knn(t_s, k, true)?;
    let times: Vec<usize> = neighbors.iter().map(|n| n.index).collect();
    Ok(CrossMapping {
        seed_time: t_s,
        source_rows: times.iter().map(|&t| source.row(t).to_vec()).collect(),
        target_rows: times.iter().map(|&t| target.row(t).to_vec()).collect(),
        times,
    })
}

/// Largest pairwise Euclidean distance in a point set (0 for fewer than two points).
pub fn diameter(rows: &[Vec<f64>]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            best = best.max(squared_distance(a, b));
        }
    }
    best.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(values: &[f64]) -> EmbeddedSeries {
        EmbeddedSeries::from_flat(values.to_vec(), 1).unwrap()
    }

    #[test]
    fn single_point() {
        let p = line(&[4.0]);
        let idx = build_index(&p).unwrap();
        let n = idx.knn(0, 1, false).unwrap();
        assert_eq!(n, vec![Neighbor { index: 0, distance: 0.0 }]);
        assert!(matches!(idx.knn(0, 1, true), Err(Error::TooManyNeighbors { requested: 1, available: 0 })));
    }

    #[test]
    fn colinear_neighbors() {
        let p = line(&[0.0, 1.0, 2.0, 3.0]);
        let idx = build_index(&p).unwrap();
        let n = idx.knn(0, 2, true).unwrap();
        assert_eq!(n.iter().map(|n| n.index).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(n.iter().map(|n| n.distance).collect::<Vec<_>>(), vec![1.0, 2.0]);
        assert_eq!(idx.knn(2, 1, false).unwrap()[0].index, 2);
    }

    #[test]
    fn ties_prefer_lower_index() {
        let p = line(&[5.0, 4.0, 6.0, 4.0, 6.0]);
        let idx = build_index(&p).unwrap();
        let n: Vec<usize> = idx.knn(0, 4, true).unwrap().iter().map(|n| n.index).collect();
        assert_eq!(n, vec![1, 2, 3, 4]);
    }

    #[test]
    fn empty_input_is_rejected() {
        let p = EmbeddedSeries::from_flat(Vec::new(), 2).unwrap();
        assert!(matches!(build_index(&p), Err(Error::EmptyPointSet)));
    }

    #[test]
    fn identical_manifolds_cross_map_to_themselves() {
        let s: Vec<f64> = (0..300).map(|i| (i as f64 * 0.7).sin()).collect();
        let x = crate::embedding::delay_embed(&s, 3, 1).unwrap();
        let cm = cross_map_neighborhood(&x, &x, 17, 10).unwrap();
        assert_eq!(cm.source_rows, cm.target_rows);
        assert_eq!(cm.times.len(), 10);
        assert!(!cm.times.contains(&17));
    }

    #[test]
    fn diameter_of_square() {
        let rows = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        assert!((diameter(&rows) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(diameter(&rows[..1]), 0.0);
    }
}
