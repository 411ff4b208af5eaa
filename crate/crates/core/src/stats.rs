//! Structural statistics of the single and paired sub-processes: fractions,
//! Voronoi shares, nearest-neighbour, empty-space and J functions, and
//! goodness-of-fit statistics.

use crate::error::{Error, Result};
use crate::geometry::{lens_gamma, three_disc_residual_area, Point2, Window};
use crate::mnnr::{InteriorMask, Partition};
use crate::pointproc::{sample_in_window, Configuration, Point};
use crate::quadrature::{try_integrate_pieces, try_integrate_to_inf, Integral, Tolerance};
use crate::spatial::KdTree;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::f64::consts::PI;

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub n_reps: usize,
    pub seed: u64,
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Fraction of interior atoms that belong to a pair.
pub fn fraction_paired(partition: &Partition, mask: &InteriorMask<f64>) -> Result<f64> {
    let n = mask.count();
    if n == 0 {
        return Err(Error::EmptyInterior {
            margin: mask.margin,
        });
    }
    let paired = (0..partition.n_atoms())
        .filter(|&i| mask.is_interior(i) && partition.is_paired(i))
        .count();
    Ok(paired as f64 / n as f64)
}

/// Fraction of interior atoms that are single.
pub fn fraction_single(partition: &Partition, mask: &InteriorMask<f64>) -> Result<f64> {
    fraction_paired(partition, mask).map(|f| 1.0 - f)
}

/// Share of the plane served by paired and by single atoms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoronoiShare {
    pub pairs: f64,
    pub singles: f64,
    pub probes: usize,
}

/// Fraction of uniform probe locations whose nearest atom is paired. Probes
/// are drawn from the window shrunk by `margin`.
pub fn voronoi_share_pairs<R: Rng + ?Sized>(
    config: &Configuration,
    partition: &Partition,
    probes: usize,
    margin: f64,
    rng: &mut R,
) -> Result<VoronoiShare> {
    if probes == 0 {
        return Err(Error::param("probes", "need at least one probe"));
    }
    if config.is_empty() {
        return Err(Error::TooFewAtoms { needed: 1, got: 0 });
    }
    let region = config
        .window
        .eroded(margin)
        .ok_or(Error::EmptyInterior { margin })?;
    let tree = KdTree::build(&config.atoms)?;
    let hits = (0..probes)
        .filter(|_| {
            let q = sample_in_window(&region, rng);
            let nb = tree.nearest(&q, None).expect("nonempty");
            partition.is_paired(nb.index)
        })
        .count();
    let pairs = hits as f64 / probes as f64;
    Ok(VoronoiShare {
        pairs,
        singles: 1.0 - pairs,
        probes,
    })
}

/// Integrand of the Voronoi pair share: the density that the atom nearest to
/// the origin sits at `(r, theta)` and is paired with an atom at `(s, phi)`.
pub fn voronoi_integrand(lambda: f64, r: f64, s: f64, theta: f64, phi: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    if s <= r {
        return Ok(0.0);
    }
    let f = three_disc_residual_area(r, s, theta, phi)?;
    Ok(lambda * lambda * s * r * (-lambda * f - lambda * PI * r * r).exp())
}

/// Probability that the origin is served by a paired atom, from the
/// four-fold integral over the positions of the serving atom and its partner.
///
/// The angle of the serving atom is integrated out by rotation invariance and
/// the partner radius is written `s = r u`. The remaining `(u, phi, r)`
/// integrals are nested adaptive quadratures.
pub fn voronoi_pair_integral(lambda: f64, tolerance: f64) -> Result<Integral> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::param("lambda", "intensity must be positive"));
    }
    if !(tolerance > 0.0) {
        return Err(Error::param("tolerance", "must be positive"));
    }
    let inner = Tolerance::new(0.0, tolerance * 1e-2).with_max_evals(20_000);
    let middle = Tolerance::new(0.0, tolerance * 0.1).with_max_evals(20_000);
    let outer = Tolerance::new(tolerance * 0.1, tolerance * 0.5).with_max_evals(20_000);
    let mut evals = 0usize;
    let mut inner_err = 0.0f64;

    let mut radial = |u: f64, phi: f64| -> Result<f64> {
        // rho / r for the pair at (r, 0) and (r u, phi)
        let rho1 = (1.0 + u * u - 2.0 * u * phi.cos()).sqrt();
        let scale = 1.0 / (lambda * PI * rho1.max(1.0).powi(2)).sqrt();
        let r = try_integrate_to_inf(
            |r| {
                if r == 0.0 {
                    return Ok(0.0);
                }
                let f = three_disc_residual_area(r, r * u, 0.0, phi)?;
                Ok(r * r * r * (-lambda * (f + PI * r * r)).exp())
            },
            0.0,
            scale,
            &inner,
        )?;
        evals += r.evals;
        inner_err = inner_err.max(r.error);
        Ok(r.value)
    };

    let mut angular = |u: f64| -> Result<f64> {
        // the containment case rho >= 2r begins at cos(phi) = (u^2 - 3) / (2u)
        let c = ((u * u - 3.0) / (2.0 * u)).clamp(-1.0, 1.0);
        let kink = c.acos();
        let pts: Vec<f64> = if kink > 0.0 && kink < PI {
            vec![0.0, kink, PI]
        } else {
            vec![0.0, PI]
        };
        let v = try_integrate_pieces(|phi| radial(u, phi), &pts, &middle)?;
        // symmetric under phi -> 2 pi - phi
        Ok(2.0 * u * v.value)
    };

    let body = try_integrate_pieces(&mut angular, &[1.0, 1.5, 2.0, 3.0], &outer)?;
    let tail = try_integrate_to_inf(&mut angular, 3.0, 1.0, &outer)?;
    let factor = 2.0 * PI * lambda * lambda;
    Ok(Integral {
        value: factor * (body.value + tail.value),
        error: factor * (body.error + tail.error),
        evals: evals + body.evals + tail.evals,
    })
}

/// Exact contribution to the Voronoi pair share from partners beyond three
/// times the serving distance: `0.140625 / (2 - gamma)^2`.
pub fn voronoi_far_partner_share() -> f64 {
    let g = 2.0 - lens_gamma::<f64>();
    0.140_625 / (g * g)
}

/// Empirical distribution function tabulated on a radius grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub n_samples: usize,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) || grid[0] < 0.0 {
        return Err(Error::param("grid", "radii must be nonnegative and strictly increasing"));
    }
    Ok(())
}

/// Evenly spaced grid `0, h, 2h, ..., r_max`.
pub fn radius_grid(r_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(r_max > 0.0) || points < 2 {
        return Err(Error::param("grid", "need r_max > 0 and at least two points"));
    }
    Ok((0..points)
        .map(|k| r_max * k as f64 / (points - 1) as f64)
        .collect())
}

impl EmpiricalCdf {
    pub fn from_samples(samples: &[f64], grid: &[f64]) -> Result<Self> {
        check_grid(grid)?;
        if samples.is_empty() {
            return Err(Error::param("samples", "need at least one sample"));
        }
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        let n = s.len() as f64;
        let values = grid
            .iter()
            .map(|&r| s.partition_point(|&x| x <= r) as f64 / n)
            .collect();
        Ok(EmpiricalCdf {
            grid: grid.to_vec(),
            values,
            n_samples: s.len(),
        })
    }
}

/// Distance from each interior paired atom to its partner.
pub fn pair_distances(config: &Configuration, partition: &Partition, mask: &InteriorMask<f64>) -> Vec<f64> {
    (0..config.len())
        .filter(|&i| mask.is_interior(i))
        .filter_map(|i| partition.partner(i).map(|j| config.atoms[i].dist_sq(&config.atoms[j]).sqrt()))
        .collect()
}

/// Empirical CDF of the partner distance of interior paired atoms.
pub fn empirical_nn_pairs(samples: &[(Configuration, Partition, InteriorMask<f64>)], grid: &[f64]) -> Result<EmpiricalCdf> {
    let d: Vec<f64> = samples
        .iter()
        .flat_map(|(c, p, m)| pair_distances(c, p, m))
        .collect();
    EmpiricalCdf::from_samples(&d, grid)
}

/// CDF of the distance between cooperating atoms: `1 - exp(-lambda pi r^2 (2 - gamma))`.
pub fn analytic_nn_pairs(r: f64, lambda: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    -(-lambda * PI * r * r * (2.0 - lens_gamma::<f64>())).exp_m1()
}

/// Which sub-process a statistic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subprocess {
    All,
    Singles,
    Pairs,
}

impl Subprocess {
    fn select(self, partition: &Partition, i: usize) -> bool {
        match self {
            Subprocess::All => true,
            Subprocess::Singles => !partition.is_paired(i),
            Subprocess::Pairs => partition.is_paired(i),
        }
    }
}

fn sub_atoms(config: &Configuration, partition: &Partition, which: Subprocess) -> Vec<Point> {
    (0..config.len())
        .filter(|&i| which.select(partition, i))
        .map(|i| config.atoms[i])
        .collect()
}

/// Nearest-neighbour distances within a sub-process, for atoms at least
/// `margin` from the window boundary.
pub fn nn_distances(config: &Configuration, partition: &Partition, which: Subprocess, margin: f64) -> Result<Vec<f64>> {
    let pts = sub_atoms(config, partition, which);
    if pts.len() < 2 {
        return Ok(Vec::new());
    }
    let tree = KdTree::build(&pts)?;
    Ok((0..pts.len())
        .filter(|&i| config.window.boundary_distance(&pts[i]) >= margin)
        .map(|i| tree.nearest_to_atom(i).expect("two atoms").dist_sq.sqrt())
        .collect())
}

/// Empty-space distances: from uniform probes in the window shrunk by
/// `margin` to the nearest atom of the sub-process.
pub fn es_distances<R: Rng + ?Sized>(
    config: &Configuration,
    partition: &Partition,
    which: Subprocess,
    margin: f64,
    probes: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let pts = sub_atoms(config, partition, which);
    if pts.is_empty() {
        return Ok(Vec::new());
    }
    let region = config
        .window
        .eroded(margin)
        .ok_or(Error::EmptyInterior { margin })?;
    let tree = KdTree::build(&pts)?;
    Ok((0..probes)
        .map(|_| {
            let q: Point2<f64> = sample_in_window(&region, rng);
            tree.nearest(&q, None).expect("nonempty").dist_sq.sqrt()
        })
        .collect())
}

/// Pooled empty-space function of a sub-process.
pub fn empirical_es<R: Rng + ?Sized>(
    samples: &[(Configuration, Partition)],
    which: Subprocess,
    margin: f64,
    probes_per_config: usize,
    grid: &[f64],
    rng: &mut R,
) -> Result<EmpiricalCdf> {
    let mut d = Vec::new();
    for (c, p) in samples {
        d.extend(es_distances(c, p, which, margin, probes_per_config, rng)?);
    }
    EmpiricalCdf::from_samples(&d, grid)
}

/// `J(r) = (1 - G(r)) / (1 - F(r))` on the range where `1 - F >= 0.05`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// First grid radius excluded from the output, if any.
    pub cutoff: Option<f64>,
}

pub const J_RELIABLE_FLOOR: f64 = 0.05;

pub fn j_function(g: &EmpiricalCdf, f: &EmpiricalCdf) -> Result<JCurve> {
    if g.grid != f.grid {
        return Err(Error::GridMismatch("G and F must share a radius grid".into()));
    }
    let mut grid = Vec::new();
    let mut values = Vec::new();
    let mut cutoff = None;
    for (k, &r) in g.grid.iter().enumerate() {
        let denom = 1.0 - f.values[k];
        if denom < J_RELIABLE_FLOOR {
            cutoff = Some(r);
            break;
        }
        grid.push(r);
        values.push((1.0 - g.values[k]) / denom);
    }
    Ok(JCurve {
        grid,
        values,
        cutoff,
    })
}

/// Kolmogorov-Smirnov distance between the sample and a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::param("samples", "need at least one sample"));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let c = cdf(x);
        d = d.max(c - i as f64 / n).max((i + 1) as f64 / n - c);
    }
    Ok(d)
}

/// 5% critical value of the KS distance for `n` samples.
pub fn ks_critical_5pct(n: usize) -> f64 {
    1.36 / (n as f64).sqrt()
}

/// Index-of-dispersion test of counts against a Poisson law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionTest {
    pub statistic: f64,
    pub dof: usize,
    /// Variance-to-mean ratio of the counts.
    pub ratio: f64,
    /// Two-sided p-value.
    pub p_value: f64,
}

pub fn dispersion_test(counts: &[u64]) -> Result<DispersionTest> {
    if counts.len() < 2 {
        return Err(Error::param("counts", "need at least two counts"));
    }
    let v: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return Err(Error::param("counts", "all counts are zero"));
    }
    let ss = v.iter().map(|c| (c - mean).powi(2)).sum::<f64>();
    let statistic = ss / mean;
    let dof = counts.len() - 1;
    let chi = ChiSquared::new(dof as f64).map_err(|e| Error::param("dof", e.to_string()))?;
    let lower = chi.cdf(statistic);
    Ok(DispersionTest {
        statistic,
        dof,
        ratio: ss / (n - 1.0) / mean,
        p_value: (2.0 * lower.min(1.0 - lower)).min(1.0),
    })
}

/// Counts of selected atoms in a regular grid of square cells covering the
/// window shrunk by `margin`.
pub fn cell_counts(config: &Configuration, partition: &Partition, which: Subprocess, cell: f64, margin: f64) -> Result<Vec<u64>> {
    let region = config
        .window
        .eroded(margin)
        .ok_or(Error::EmptyInterior { margin })?;
    let (x0, x1, y0, y1) = match region {
        Window::Rectangle {
            x_min,
            x_max,
            y_min,
            y_max,
        } => (x_min, x_max, y_min, y_max),
        Window::Disc { .. } => return Err(Error::Unsupported("cell counts need a rectangular window".into())),
    };
    if !(cell > 0.0) {
        return Err(Error::param("cell", "must be positive"));
    }
    let nx = ((x1 - x0) / cell).floor() as usize;
    let ny = ((y1 - y0) / cell).floor() as usize;
    let mut counts = vec![0u64; nx * ny];
    for (i, p) in config.atoms.iter().enumerate() {
        if !which.select(partition, i) {
            continue;
        }
        let cx = ((p.x - x0) / cell).floor();
        let cy = ((p.y - y0) / cell).floor();
        if cx >= 0.0 && cy >= 0.0 && (cx as usize) < nx && (cy as usize) < ny {
            counts[cy as usize * nx + cx as usize] += 1;
        }
    }
    Ok(counts)
}
