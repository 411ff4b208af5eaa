//! Seeded samplers: Poisson and perturbed hexagonal configurations, and the
//! scalar laws used for distances, fading and random switching.

use crate::error::{Error, Result};
use crate::geometry::{Point2, Window};
use crate::spatial::KdTree;
use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

pub type Point = Point2<f64>;

/// A finite set of atoms (base stations) inside a sampling window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub atoms: Vec<Point>,
    pub window: Window<f64>,
}

impl Configuration {
    /// Build a configuration, checking that every atom lies in the window.
    pub fn new(atoms: Vec<Point>, window: Window<f64>) -> Result<Self> {
        if let Some(i) = atoms.iter().position(|p| !p.is_finite() || !window.contains(p)) {
            return Err(Error::param("atoms", format!("atom {i} lies outside the window")));
        }
        Ok(Configuration { atoms, window })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atoms per unit area.
    pub fn intensity(&self) -> f64 {
        self.atoms.len() as f64 / self.window.area()
    }
}

/// Uniform point in the window.
pub fn sample_in_window<R: Rng + ?Sized>(window: &Window<f64>, rng: &mut R) -> Point {
    match *window {
        Window::Rectangle {
            x_min,
            x_max,
            y_min,
            y_max,
        } => Point2::new(
            x_min + (x_max - x_min) * rng.random::<f64>(),
            y_min + (y_max - y_min) * rng.random::<f64>(),
        ),
        Window::Disc { center, radius } => {
            let r = radius * rng.random::<f64>().sqrt();
            center + Point2::from_polar(r, sample_uniform_angle(rng))
        }
    }
}

/// Poisson count with the given mean.
pub fn sample_poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<usize> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::param("mean", "must be finite and nonnegative"));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mean).map_err(|e| Error::param("mean", e.to_string()))?;
    Ok(d.sample(rng) as usize)
}

fn check_intensity(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::param("lambda", "intensity must be positive"));
    }
    Ok(())
}

/// Homogeneous Poisson point process of intensity `lambda` on `window`.
///
/// Atoms whose nearest neighbour is not unique (possible only through
/// floating-point collisions) are redrawn.
pub fn sample_ppp<R: Rng + ?Sized>(lambda: f64, window: &Window<f64>, rng: &mut R) -> Result<Configuration> {
    check_intensity(lambda)?;
    let n = sample_poisson_count(lambda * window.area(), rng)?;
    let mut atoms: Vec<Point> = (0..n).map(|_| sample_in_window(window, rng)).collect();
    resolve_ties(&mut atoms, |_, rng| sample_in_window(window, rng), rng)?;
    Ok(Configuration {
        atoms,
        window: *window,
    })
}

/// Centres of the hexagonal lattice with nearest-centre spacing `spacing`
/// (one centre at the origin) that fall inside `window`.
pub fn hex_centres(spacing: f64, window: &Window<f64>) -> Result<Vec<Point>> {
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::param("spacing", "must be positive"));
    }
    let row = spacing * 3f64.sqrt() / 2.0;
    let reach = window.max_radius();
    let jmax = (reach / row).ceil() as i64 + 1;
    let imax = (reach / spacing).ceil() as i64 + jmax + 1;
    let mut out = Vec::new();
    for j in -jmax..=jmax {
        for i in -imax..=imax {
            let p = Point2::new(spacing * (i as f64 + 0.5 * j as f64), row * j as f64);
            if window.contains(&p) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Hexagonal grid with each centre displaced by a uniform angle and a radius
/// uniform on `[0, q]`.
///
/// Displaced atoms may leave `window` by up to `q`; the returned window is
/// `window` enlarged by `q` so that it contains every atom.
pub fn sample_hex_grid<R: Rng + ?Sized>(
    spacing: f64,
    q: f64,
    window: &Window<f64>,
    rng: &mut R,
) -> Result<Configuration> {
    if !(q >= 0.0) || !q.is_finite() {
        return Err(Error::param("q", "perturbation radius must be nonnegative"));
    }
    let centres = hex_centres(spacing, window)?;
    let displace = |c: Point, rng: &mut R| {
        let r = q * rng.random::<f64>();
        c + Point2::from_polar(r, sample_uniform_angle(rng))
    };
    let mut atoms: Vec<Point> = centres.iter().map(|&c| displace(c, rng)).collect();
    if q > 0.0 {
        resolve_ties(&mut atoms, |i, rng| displace(centres[i], rng), rng)?;
    }
    let window = match window.eroded(-q) {
        Some(w) => w,
        None => *window,
    };
    Ok(Configuration { atoms, window })
}

const MAX_TIE_ROUNDS: usize = 64;

// Redraw atoms whose nearest-neighbour distance is zero or shared.
fn resolve_ties<R: Rng + ?Sized>(
    atoms: &mut [Point],
    mut redraw: impl FnMut(usize, &mut R) -> Point,
    rng: &mut R,
) -> Result<()> {
    for _ in 0..MAX_TIE_ROUNDS {
        let bad: Vec<usize> = {
            let tree = KdTree::build(atoms)?;
            (0..atoms.len())
                .filter(|&i| {
                    tree.nearest_to_atom(i)
                        .is_some_and(|nb| nb.tied || nb.dist_sq == 0.0)
                })
                .collect()
        };
        if bad.is_empty() {
            return Ok(());
        }
        for i in bad {
            atoms[i] = redraw(i, rng);
        }
    }
    Err(Error::Unsupported(
        "could not bring the configuration into generic position".into(),
    ))
}

/// Rayleigh variate with scale `sigma`.
pub fn sample_rayleigh<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::param("scale", "must be positive"));
    }
    let u: f64 = 1.0 - rng.random::<f64>();
    Ok(sigma * (-2.0 * u.ln()).sqrt())
}

/// Rice variate: the norm of `(nu + N(0, sigma^2), N(0, sigma^2))`.
pub fn sample_rice<R: Rng + ?Sized>(nu: f64, sigma: f64, rng: &mut R) -> Result<f64> {
    if !(sigma > 0.0) || !(nu >= 0.0) {
        return Err(Error::param("rice", "need nu >= 0 and sigma > 0"));
    }
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    Ok((nu + sigma * a).hypot(sigma * b))
}

/// Point at Gaussian offset `N(0, sigma^2 I)` from `centre`.
pub fn sample_gaussian_offset<R: Rng + ?Sized>(centre: Point, sigma: f64, rng: &mut R) -> Point {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    Point2::new(centre.x + sigma * a, centre.y + sigma * b)
}

/// Exponential variate with the given rate.
pub fn sample_exp<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> Result<f64> {
    if !(rate > 0.0) {
        return Err(Error::param("rate", "must be positive"));
    }
    let d = Exp::new(rate).map_err(|e| Error::param("rate", e.to_string()))?;
    Ok(d.sample(rng))
}

/// Bernoulli bit with success probability `q`.
pub fn sample_bernoulli<R: Rng + ?Sized>(q: f64, rng: &mut R) -> Result<bool> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::param("q", "must lie in [0, 1]"));
    }
    Ok(rng.random::<f64>() < q)
}

pub fn sample_uniform_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    TAU * rng.random::<f64>()
}
