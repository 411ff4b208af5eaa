//! Static 2-d tree for nearest-neighbour queries.

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::scalar::Real;

/// Result of a nearest-neighbour query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbour<T> {
    pub index: usize,
    pub dist_sq: T,
    /// Another atom lies at exactly the same distance.
    pub tied: bool,
}

/// Immutable kd-tree over a borrowed point slice. Nodes are stored implicitly:
/// the median of each index range is the node, split on x at even depth.
#[derive(Debug, Clone)]
pub struct KdTree<'a, T> {
    points: &'a [Point2<T>],
    order: Vec<usize>,
}

fn coord<T: Real>(p: &Point2<T>, axis: usize) -> T {
    if axis == 0 {
        p.x
    } else {
        p.y
    }
}

impl<'a, T: Real> KdTree<'a, T> {
    pub fn build(points: &'a [Point2<T>]) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::param("points", format!("atom {i} is not finite")));
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        Self::split(points, &mut order, 0);
        Ok(KdTree { points, order })
    }

    fn split(points: &[Point2<T>], idx: &mut [usize], depth: usize) {
        if idx.len() <= 1 {
            return;
        }
        let axis = depth % 2;
        let mid = idx.len() / 2;
        idx.select_nth_unstable_by(mid, |&a, &b| {
            coord(&points[a], axis)
                .partial_cmp(&coord(&points[b], axis))
                .expect("finite coordinates")
        });
        let (left, right) = idx.split_at_mut(mid);
        Self::split(points, left, depth + 1);
        Self::split(points, &mut right[1..], depth + 1);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nearest atom to `query`, skipping index `exclude`.
    pub fn nearest(&self, query: &Point2<T>, exclude: Option<usize>) -> Option<Neighbour<T>> {
        let mut best: Option<Neighbour<T>> = None;
        self.search(query, exclude, 0, self.order.len(), 0, &mut best);
        best
    }

    /// Nearest other atom to atom `i`.
    pub fn nearest_to_atom(&self, i: usize) -> Option<Neighbour<T>> {
        self.nearest(&self.points[i], Some(i))
    }

    fn search(
        &self,
        q: &Point2<T>,
        exclude: Option<usize>,
        lo: usize,
        hi: usize,
        depth: usize,
        best: &mut Option<Neighbour<T>>,
    ) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let idx = self.order[mid];
        let p = &self.points[idx];
        if Some(idx) != exclude {
            let d2 = p.dist_sq(q);
            match best {
                None => {
                    *best = Some(Neighbour {
                        index: idx,
                        dist_sq: d2,
                        tied: false,
                    })
                }
                Some(b) if d2 < b.dist_sq => {
                    *b = Neighbour {
                        index: idx,
                        dist_sq: d2,
                        tied: false,
                    }
                }
                Some(b) if d2 == b.dist_sq => {
                    b.tied = true;
                    // keep a canonical representative
                    b.index = b.index.min(idx);
                }
                _ => {}
            }
        }
        let axis = depth % 2;
        let diff = coord(q, axis) - coord(p, axis);
        let (near, far) = if diff < T::zero() {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(q, exclude, near.0, near.1, depth + 1, best);
        // visit the far side on equality too, so ties are always detected
        let must = match best {
            None => true,
            Some(b) => diff * diff <= b.dist_sq,
        };
        if must {
            self.search(q, exclude, far.0, far.1, depth + 1, best);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(points: &[Point2<f64>], q: &Point2<f64>, exclude: Option<usize>) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for (i, p) in points.iter().enumerate() {
            if Some(i) == exclude {
                continue;
            }
            let d = p.dist_sq(q);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, i));
            }
        }
        best
    }

    #[test]
    fn empty_and_single() {
        let pts: Vec<Point2<f64>> = vec![];
        let t = KdTree::build(&pts).unwrap();
        assert!(t.nearest(&Point2::origin(), None).is_none());
        let pts = vec![Point2::new(1.0, 2.0)];
        let t = KdTree::build(&pts).unwrap();
        assert!(t.nearest_to_atom(0).is_none());
        assert_eq!(t.nearest(&Point2::origin(), None).unwrap().index, 0);
    }

    #[test]
    fn square_corners_tie() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
        ];
        let t = KdTree::build(&pts).unwrap();
        for i in 0..4 {
            assert!(t.nearest_to_atom(i).unwrap().tied);
        }
    }

    #[test]
    fn rejects_nan() {
        let pts = vec![Point2::new(0.0, f64::NAN)];
        assert!(KdTree::build(&pts).is_err());
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            coords in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..200),
            qx in -12.0f64..12.0, qy in -12.0f64..12.0,
        ) {
            let pts: Vec<_> = coords.iter().map(|&(x, y)| Point2::new(x, y)).collect();
            let t = KdTree::build(&pts).unwrap();
            let q = Point2::new(qx, qy);
            let got = t.nearest(&q, None).unwrap();
            let (d, _) = brute(&pts, &q, None).unwrap();
            prop_assert_eq!(got.dist_sq, d);
            for i in 0..pts.len() {
                match (t.nearest_to_atom(i), brute(&pts, &pts[i], Some(i))) {
                    (None, None) => {}
                    (Some(g), Some((d, _))) => prop_assert_eq!(g.dist_sq, d),
                    _ => prop_assert!(false),
                }
            }
        }
    }
}
