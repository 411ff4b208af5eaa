//! Mutually nearest neighbour relation: nearest-neighbour maps, the
//! partition into singles and cooperating pairs, and interior masks.

use crate::error::{Error, Result};
use crate::geometry::{Point2, Window};
use crate::scalar::Real;
use crate::spatial::KdTree;
use serde::{Deserialize, Serialize};

/// Nearest neighbour of every atom, using a kd-tree.
pub fn nearest_neighbors<T: Real>(points: &[Point2<T>]) -> Result<Vec<usize>> {
    if points.len() < 2 {
        return Err(Error::TooFewAtoms {
            needed: 2,
            got: points.len(),
        });
    }
    let tree = KdTree::build(points)?;
    (0..points.len())
        .map(|i| {
            let nb = tree.nearest_to_atom(i).expect("at least two atoms");
            if nb.tied {
                Err(Error::NearestNeighbourTie { index: i })
            } else {
                Ok(nb.index)
            }
        })
        .collect()
}

/// Nearest neighbour of atom `i`.
pub fn nearest_neighbor<T: Real>(points: &[Point2<T>], i: usize) -> Result<usize> {
    if points.len() < 2 {
        return Err(Error::TooFewAtoms {
            needed: 2,
            got: points.len(),
        });
    }
    if i >= points.len() {
        return Err(Error::param("i", format!("index {i} out of range")));
    }
    let nb = KdTree::build(points)?
        .nearest_to_atom(i)
        .expect("at least two atoms");
    if nb.tied {
        return Err(Error::NearestNeighbourTie { index: i });
    }
    Ok(nb.index)
}

/// Nearest neighbour of every atom from the full distance matrix.
pub fn nearest_neighbors_exhaustive<T: Real>(points: &[Point2<T>]) -> Result<Vec<usize>> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewAtoms { needed: 2, got: n });
    }
    let mut d = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = if i == j {
                T::infinity()
            } else {
                points[i].dist_sq(&points[j])
            };
        }
    }
    (0..n)
        .map(|i| {
            let row = &d[i * n..(i + 1) * n];
            let mut best = 0;
            for j in 1..n {
                if row[j] < row[best] {
                    best = j;
                }
            }
            if row.iter().enumerate().any(|(j, &v)| j != best && v == row[best]) {
                return Err(Error::NearestNeighbourTie { index: i });
            }
            Ok(best)
        })
        .collect()
}

/// Role of an atom in the partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Single,
    Paired,
}

/// Decomposition of a configuration into singles and mutually nearest pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub singles: Vec<usize>,
    /// Unordered pairs stored as `(i, j)` with `i < j`.
    pub pairs: Vec<(usize, usize)>,
    partner: Vec<Option<usize>>,
}

impl Partition {
    /// The partition of an empty configuration.
    pub fn empty() -> Self {
        Partition {
            singles: vec![],
            pairs: vec![],
            partner: vec![],
        }
    }

    fn from_nn(nn: &[usize]) -> Self {
        let n = nn.len();
        let mut partner = vec![None; n];
        let mut singles = Vec::new();
        let mut pairs = Vec::new();
        for i in 0..n {
            let j = nn[i];
            if nn[j] == i {
                partner[i] = Some(j);
                if i < j {
                    pairs.push((i, j));
                }
            } else {
                singles.push(i);
            }
        }
        Partition {
            singles,
            pairs,
            partner,
        }
    }

    fn single_atom() -> Self {
        Partition {
            singles: vec![0],
            pairs: vec![],
            partner: vec![None],
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, i: usize) -> Option<usize> {
        self.partner[i]
    }

    pub fn role(&self, i: usize) -> Role {
        if self.partner[i].is_some() {
            Role::Paired
        } else {
            Role::Single
        }
    }

    pub fn is_paired(&self, i: usize) -> bool {
        self.partner[i].is_some()
    }
}

/// MNNR partition via kd-tree nearest neighbours.
pub fn mnnr_partition<T: Real>(points: &[Point2<T>]) -> Result<Partition> {
    match points.len() {
        0 => Err(Error::TooFewAtoms { needed: 1, got: 0 }),
        1 => Ok(Partition::single_atom()),
        _ => Ok(Partition::from_nn(&nearest_neighbors(points)?)),
    }
}

/// MNNR partition via the distance matrix; the reference implementation.
pub fn mnnr_partition_exhaustive<T: Real>(points: &[Point2<T>]) -> Result<Partition> {
    match points.len() {
        0 => Err(Error::TooFewAtoms { needed: 1, got: 0 }),
        1 => Ok(Partition::single_atom()),
        _ => Ok(Partition::from_nn(&nearest_neighbors_exhaustive(points)?)),
    }
}

/// Pair indicator `H` and single indicator `I = 1 - H` of a finite point set.
pub fn indicator_vectors<T: Real>(points: &[Point2<T>]) -> Result<(Vec<bool>, Vec<bool>)> {
    let p = mnnr_partition(points)?;
    let h: Vec<bool> = (0..points.len()).map(|i| p.is_paired(i)).collect();
    let s = h.iter().map(|&b| !b).collect();
    Ok((h, s))
}

/// Default edge margin `3 / sqrt(lambda)`.
pub fn default_margin(lambda: f64) -> f64 {
    3.0 / lambda.sqrt()
}

/// Atoms at distance at least `margin` from the window boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorMask<T> {
    pub margin: T,
    pub interior: Vec<bool>,
}

impl<T: Real> InteriorMask<T> {
    pub fn new(points: &[Point2<T>], window: &Window<T>, margin: T) -> Result<Self> {
        if !(margin >= T::zero()) {
            return Err(Error::param("margin", "must be nonnegative"));
        }
        let interior = points
            .iter()
            .map(|p| window.boundary_distance(p) >= margin)
            .collect();
        Ok(InteriorMask { margin, interior })
    }

    pub fn count(&self) -> usize {
        self.interior.iter().filter(|&&b| b).count()
    }

    pub fn is_interior(&self, i: usize) -> bool {
        self.interior[i]
    }
}
