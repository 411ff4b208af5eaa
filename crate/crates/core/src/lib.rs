//! Cooperation of base stations that are mutually nearest neighbours.
//!
//! Stations form a planar Poisson process. Two stations that are each other's
//! nearest neighbour cooperate as a pair; the rest stay single. The crate covers
//! the partition itself, its spatial statistics, the signal models of pairs,
//! the superposition approximation of the partitioned process, interference
//! and coverage probabilities.
//!
//! Lengths are in km, intensities in km^-2 and powers in W.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::too_many_arguments)]

pub mod coverage;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod interference;
pub mod interp;
pub mod io;
pub mod mnnr;
pub mod pointproc;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod signals;
pub mod spatial;
pub mod special;
pub mod stats;
pub mod superposition;

pub use error::{Error, Result};
pub use geometry::{Point2, Window};
pub use mnnr::{mnnr_partition, Partition, Role};
pub use pointproc::{sample_ppp, Configuration, Point};
pub use rng::RngState;
pub use scalar::Real;
pub use signals::{PathLoss, Scheme};
pub use superposition::{derive_params, SuperParams};
