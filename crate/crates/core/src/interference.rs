//! Interference fields of the cooperation model: Monte Carlo sums over
//! singles and pairs, their mean-value integrals, and the finite-window
//! Laplace functional series.

use crate::error::{Error, Result};
use crate::geometry::{lens_gamma, pair_probability, Window};
use crate::mnnr::{mnnr_partition, InteriorMask, Partition};
use crate::pointproc::{sample_in_window, sample_ppp, Configuration, Point};
use crate::quadrature::{integrate_pieces, try_integrate_pieces, try_integrate_power_tail, Tolerance};
use crate::rng::RngState;
use crate::signals::{combine, pair_mean, FadingDraw, PathLoss, PhaseLaw, Scheme};
use crate::special::bessel_i0e;
use crate::stats::{analytic_nn_pairs, ks_statistic, mean_stderr};
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Interference at the origin from singles (`i1`) and pairs (`i2`) beyond `exclusion_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceSample {
    pub i1: f64,
    pub i2: f64,
    pub exclusion_radius: f64,
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0) || r.is_nan() {
        return Err(Error::param("R", "exclusion radius must be nonnegative"));
    }
    Ok(())
}

/// One draw of the interference field. A pair contributes only when both
/// members lie beyond `radius`; each pair is counted once.
pub fn mc_interference<R: Rng + ?Sized>(
    config: &Configuration,
    partition: &Partition,
    scheme: &Scheme,
    pl: &PathLoss,
    radius: f64,
    rng: &mut R,
) -> Result<InterferenceSample> {
    check_radius(radius)?;
    if partition.n_atoms() != config.len() {
        return Err(Error::param("partition", "does not match the configuration"));
    }
    let mut i1 = 0.0;
    for &i in &partition.singles {
        let r = config.atoms[i].norm();
        if r > radius {
            let h: f64 = Exp1.sample(rng);
            i1 += pl.mean_power(r) * h;
        }
    }
    let mut i2 = 0.0;
    for &(a, b) in &partition.pairs {
        let (r, z) = (config.atoms[a].norm(), config.atoms[b].norm());
        if r > radius && z > radius {
            let d = FadingDraw::sample(scheme, rng);
            i2 += combine(scheme, pl, r, z, &d)?;
        }
    }
    Ok(InterferenceSample {
        i1,
        i2,
        exclusion_radius: radius,
    })
}

/// Mean interference from singles beyond `radius`:
/// `(1 - delta) lambda 2 pi p R^(2 - beta) / (beta - 2)`.
pub fn expected_interference_singles(lambda: f64, pl: &PathLoss, radius: f64) -> Result<f64> {
    check_radius(radius)?;
    if !(lambda > 0.0) {
        return Err(Error::param("lambda", "intensity must be positive"));
    }
    if radius == 0.0 {
        return Err(Error::Divergent("mean interference with no exclusion radius".into()));
    }
    let delta = pair_probability::<f64>();
    Ok((1.0 - delta) * lambda * 2.0 * PI * pl.p * radius.powf(2.0 - pl.beta) / (pl.beta - 2.0))
}

/// Mean interference from pairs with both members beyond `radius`.
///
/// After integrating out both angles the double integral over the plane is
/// `2 pi^2 lambda^2 int int r t E[g(r, t)] exp(-c (r - t)^2) i0e(2 c r t) dt dr`
/// over `r, t > R`, with `c = lambda pi (2 - gamma)`.
pub fn expected_interference_pairs(lambda: f64, scheme: &Scheme, pl: &PathLoss, radius: f64) -> Result<f64> {
    check_radius(radius)?;
    scheme.validate()?;
    if !(lambda > 0.0) {
        return Err(Error::param("lambda", "intensity must be positive"));
    }
    if radius == 0.0 {
        return Err(Error::Divergent("mean interference with no exclusion radius".into()));
    }
    if *scheme == Scheme::Single {
        return Err(Error::param("scheme", "`single` does not define a pair signal"));
    }
    let c = lambda * PI * (2.0 - lens_gamma::<f64>());
    // width of the Gaussian ridge around t = r
    let w = 12.0 / (2.0 * c).sqrt();
    let inner_tol = Tolerance::new(1e-300, 1e-10);
    let outer_tol = Tolerance::new(1e-300, 1e-8);
    let mut inner = |r: f64| -> Result<f64> {
        let lo = (r - w).max(radius);
        let hi = r + w;
        if lo >= hi {
            return Ok(0.0);
        }
        let mut failure = None;
        let f = |t: f64| match pair_mean(scheme, pl, r, t) {
            Ok(g) => t * g * (-c * (r - t) * (r - t)).exp() * bessel_i0e(2.0 * c * r * t),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        let pts: Vec<f64> = if r > lo { vec![lo, r, hi] } else { vec![lo, hi] };
        let v = integrate_pieces(f, &pts, &inner_tol)?;
        match failure {
            Some(e) => Err(e),
            None => Ok(r * v.value),
        }
    };
    let near = try_integrate_pieces(&mut inner, &[radius, radius + w], &outer_tol)?;
    let far = try_integrate_power_tail(&mut inner, radius + w, pl.beta - 1.0, &outer_tol)?;
    Ok(2.0 * PI * PI * lambda * lambda * (near.value + far.value))
}

/// Mean interference curves over exclusion radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferenceCurve {
    pub scheme: String,
    pub radii: Vec<f64>,
    pub mean_i1: Vec<f64>,
    pub mean_i2: Vec<f64>,
    pub stderr_i1: Vec<f64>,
    pub stderr_i2: Vec<f64>,
}

/// Expected interference curves evaluated by quadrature (stderr zero).
pub fn expected_interference_curve(lambda: f64, scheme: &Scheme, pl: &PathLoss, radii: &[f64]) -> Result<InterferenceCurve> {
    let mean_i1 = radii
        .iter()
        .map(|&r| expected_interference_singles(lambda, pl, r))
        .collect::<Result<Vec<_>>>()?;
    let mean_i2 = radii
        .iter()
        .map(|&r| expected_interference_pairs(lambda, scheme, pl, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(InterferenceCurve {
        scheme: scheme.to_string(),
        radii: radii.to_vec(),
        stderr_i1: vec![0.0; radii.len()],
        stderr_i2: vec![0.0; radii.len()],
        mean_i1,
        mean_i2,
    })
}

/// Fading shared by every scheme so that curves for several schemes are coupled.
fn coupled_draw(base: &FadingDraw, u: f64, scheme: &Scheme) -> FadingDraw {
    let mut d = *base;
    match *scheme {
        Scheme::Off { q } => d.r_on = u < q,
        Scheme::Ph {
            phase: PhaseLaw::Coherent,
        } => {
            d.theta_r = 0.0;
            d.theta_z = 0.0;
        }
        _ => {}
    }
    d
}

/// Monte Carlo interference curves for several schemes on the same
/// configurations and fading draws. Each replication samples a Poisson
/// process in a disc of radius `window_radius` around the origin.
pub fn mc_interference_curves(
    lambda: f64,
    schemes: &[Scheme],
    pl: &PathLoss,
    radii: &[f64],
    reps: usize,
    window_radius: f64,
    seed: u64,
) -> Result<Vec<InterferenceCurve>> {
    if reps < 2 {
        return Err(Error::param("reps", "need at least two replications"));
    }
    for &r in radii {
        check_radius(r)?;
    }
    for s in schemes {
        s.validate()?;
        if *s == Scheme::Single {
            return Err(Error::param("scheme", "`single` does not define a pair signal"));
        }
    }
    let window = Window::centered_disc(window_radius)?;
    let ph = Scheme::Ph {
        phase: PhaseLaw::Uniform,
    };
    // per replication: [scheme][radius] -> (i1, i2)
    let draws = (0..reps)
        .into_par_iter()
        .map(|rep| -> Result<Vec<Vec<(f64, f64)>>> {
            let mut rng = RngState::stream(seed, rep as u64);
            let config = sample_ppp(lambda, &window, &mut rng)?;
            let mut out = vec![vec![(0.0, 0.0); radii.len()]; schemes.len()];
            if config.is_empty() {
                return Ok(out);
            }
            let part = mnnr_partition(&config.atoms)?;
            for &i in &part.singles {
                let r = config.atoms[i].norm();
                let h: f64 = Exp1.sample(&mut rng);
                let v = pl.mean_power(r) * h;
                for per_scheme in out.iter_mut() {
                    for (k, &rad) in radii.iter().enumerate() {
                        if r > rad {
                            per_scheme[k].0 += v;
                        }
                    }
                }
            }
            for &(a, b) in &part.pairs {
                let (r, z) = (config.atoms[a].norm(), config.atoms[b].norm());
                let base = FadingDraw::sample(&ph, &mut rng);
                let u: f64 = rng.random();
                for (s, scheme) in schemes.iter().enumerate() {
                    let v = combine(scheme, pl, r, z, &coupled_draw(&base, u, scheme))?;
                    for (k, &rad) in radii.iter().enumerate() {
                        if r > rad && z > rad {
                            out[s][k].1 += v;
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(schemes
        .iter()
        .enumerate()
        .map(|(s, scheme)| {
            let mut c = InterferenceCurve {
                scheme: scheme.to_string(),
                radii: radii.to_vec(),
                mean_i1: vec![],
                mean_i2: vec![],
                stderr_i1: vec![],
                stderr_i2: vec![],
            };
            for k in 0..radii.len() {
                let a: Vec<f64> = draws.iter().map(|d| d[s][k].0).collect();
                let b: Vec<f64> = draws.iter().map(|d| d[s][k].1).collect();
                let (m1, e1) = mean_stderr(&a);
                let (m2, e2) = mean_stderr(&b);
                c.mean_i1.push(m1);
                c.stderr_i1.push(e1);
                c.mean_i2.push(m2);
                c.stderr_i2.push(e2);
            }
            c
        })
        .collect())
}

/// Empirical intensities of singles and paired atoms over interior regions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityCheck {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl IntensityCheck {
    pub fn total(&self) -> f64 {
        self.lambda1 + self.lambda2
    }

    /// Singles per paired atom.
    pub fn ratio(&self) -> f64 {
        self.lambda1 / self.lambda2
    }
}

pub fn intensity_check(samples: &[(Configuration, Partition, InteriorMask<f64>)]) -> Result<IntensityCheck> {
    if samples.is_empty() {
        return Err(Error::param("samples", "need at least one replication"));
    }
    let (mut n1, mut n2, mut area) = (0usize, 0usize, 0.0);
    for (c, p, m) in samples {
        let interior = c
            .window
            .eroded(m.margin)
            .ok_or(Error::EmptyInterior { margin: m.margin })?;
        area += interior.area();
        for i in 0..c.len() {
            if m.is_interior(i) {
                if p.is_paired(i) {
                    n2 += 1;
                } else {
                    n1 += 1;
                }
            }
        }
    }
    Ok(IntensityCheck {
        lambda1: n1 as f64 / area,
        lambda2: n2 as f64 / area,
    })
}

/// Which subprocess a Laplace functional is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Singles,
    Pairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub n: usize,
    /// Poisson weight `exp(-lambda S) (lambda S)^n / n!`
    pub weight: f64,
    /// Monte Carlo mean of the integrand over `A^n` under uniform sampling
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceSeries {
    pub value: f64,
    pub stderr: f64,
    /// Poisson mass of the omitted terms, `P(N > n_max)`
    pub truncation_bound: f64,
    pub terms: Vec<SeriesTerm>,
}

fn field_sum<F: Fn(f64) -> f64>(atoms: &[Point], f: &F, which: Field) -> Result<f64> {
    if atoms.is_empty() {
        return Ok(0.0);
    }
    let p = mnnr_partition(atoms)?;
    Ok((0..atoms.len())
        .filter(|&i| p.is_paired(i) == (which == Field::Pairs))
        .map(|i| f(atoms[i].norm()))
        .sum())
}

fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    let mut term = (-mean).exp();
    let mut cdf = term;
    for n in 1..=n_max {
        term *= mean / n as f64;
        cdf += term;
    }
    // summing the omitted terms directly avoids cancellation in 1 - cdf
    let mut tail = 0.0;
    let mut t = term;
    for n in n_max + 1..n_max + 400 {
        t *= mean / n as f64;
        tail += t;
        if t < 1e-300 || t < tail * 1e-17 {
            break;
        }
    }
    if tail > 0.0 {
        tail
    } else {
        (1.0 - cdf).max(0.0)
    }
}

/// Laplace functional `E[exp(-sum f(|x|))]` over the singles (or paired atoms)
/// of a Poisson process restricted to `window`, as the truncated series over
/// the number of atoms in the window. Term `n` integrates over `A^n` by
/// uniform Monte Carlo with `mc_per_term` draws.
#[allow(clippy::too_many_arguments)]
pub fn laplace_window_series<F: Fn(f64) -> f64 + Sync>(
    lambda: f64,
    window: &Window<f64>,
    f: F,
    which: Field,
    n_max: usize,
    mc_per_term: usize,
    tolerance: f64,
    rng: &mut RngState,
) -> Result<LaplaceSeries> {
    if !(lambda > 0.0) {
        return Err(Error::param("lambda", "intensity must be positive"));
    }
    if n_max < 2 || mc_per_term < 2 {
        return Err(Error::param("n_max, mc_per_term", "need n_max >= 2 and at least two draws per term"));
    }
    let mean = lambda * window.area();
    let bound = poisson_tail(mean, n_max);
    if bound > tolerance {
        return Err(Error::Truncation { bound, tolerance });
    }
    let mut rngs: Vec<RngState> = (0..=n_max).map(|n| rng.fork(n as u64)).collect();
    let terms = rngs
        .par_iter_mut()
        .enumerate()
        .map(|(n, rng)| -> Result<SeriesTerm> {
            let mut lw = -mean - (1..=n).map(|k| (k as f64).ln()).sum::<f64>();
            if n > 0 {
                lw += n as f64 * mean.ln();
            }
            let weight = lw.exp();
            if n == 0 {
                return Ok(SeriesTerm {
                    n,
                    weight,
                    mean: 1.0,
                    stderr: 0.0,
                });
            }
            let mut vals = Vec::with_capacity(mc_per_term);
            let mut atoms = Vec::with_capacity(n);
            for _ in 0..mc_per_term {
                atoms.clear();
                atoms.extend((0..n).map(|_| sample_in_window(window, rng)));
                vals.push((-field_sum(&atoms, &f, which)?).exp());
            }
            let (m, e) = mean_stderr(&vals);
            Ok(SeriesTerm {
                n,
                weight,
                mean: m,
                stderr: e,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let value = terms.iter().map(|t| t.weight * t.mean).sum();
    let stderr = terms.iter().map(|t| (t.weight * t.stderr).powi(2)).sum::<f64>().sqrt();
    Ok(LaplaceSeries {
        value,
        stderr,
        truncation_bound: bound,
        terms,
    })
}

/// Direct simulation of the same Laplace functional.
pub fn laplace_window_mc<F: Fn(f64) -> f64 + Sync>(
    lambda: f64,
    window: &Window<f64>,
    f: F,
    which: Field,
    reps: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if reps < 2 {
        return Err(Error::param("reps", "need at least two replications"));
    }
    let vals = (0..reps)
        .into_par_iter()
        .map(|rep| -> Result<f64> {
            let mut rng = RngState::stream(seed, rep as u64);
            let c = sample_ppp(lambda, window, &mut rng)?;
            Ok((-field_sum(&c.atoms, &f, which)?).exp())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_stderr(&vals))
}

/// Statistic tracked across growing windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceStatistic {
    /// Fraction of atoms in the window that are paired, edge effects included.
    PairedFraction,
    /// K-S distance between the pooled pair distances and their limiting law.
    PairDistanceKs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub radius: f64,
    pub expected_atoms: f64,
    pub value: f64,
    pub stderr: f64,
}

/// The statistic on discs of increasing radius, with no edge correction.
/// For the K-S statistic the stderr column is zero.
pub fn window_convergence_check(
    lambda: f64,
    radii: &[f64],
    statistic: ConvergenceStatistic,
    reps: usize,
    seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("radii", "need a nonempty increasing sequence"));
    }
    if reps < 2 {
        return Err(Error::param("reps", "need at least two replications"));
    }
    radii
        .iter()
        .enumerate()
        .map(|(k, &radius)| {
            let window = Window::centered_disc(radius)?;
            let per_rep = (0..reps)
                .into_par_iter()
                .map(|rep| -> Result<(Option<f64>, Vec<f64>)> {
                    let mut rng = RngState::stream(seed.wrapping_add(k as u64), rep as u64);
                    let c = sample_ppp(lambda, &window, &mut rng)?;
                    if c.is_empty() {
                        return Ok((None, vec![]));
                    }
                    let p = mnnr_partition(&c.atoms)?;
                    let frac = 2.0 * p.pairs.len() as f64 / c.len() as f64;
                    let d = p.pairs.iter().map(|&(a, b)| c.atoms[a].dist_sq(&c.atoms[b]).sqrt()).collect();
                    Ok((Some(frac), d))
                })
                .collect::<Result<Vec<_>>>()?;
            let (value, stderr) = match statistic {
                ConvergenceStatistic::PairedFraction => {
                    let v: Vec<f64> = per_rep.iter().filter_map(|x| x.0).collect();
                    if v.len() < 2 {
                        return Err(Error::TooFewAtoms { needed: 1, got: 0 });
                    }
                    mean_stderr(&v)
                }
                ConvergenceStatistic::PairDistanceKs => {
                    let d: Vec<f64> = per_rep.into_iter().flat_map(|x| x.1).collect();
                    (ks_statistic(&d, |r| analytic_nn_pairs(r, lambda))?, 0.0)
                }
            };
            Ok(ConvergenceRow {
                radius,
                expected_atoms: lambda * window.area(),
                value,
                stderr,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mnnr::default_margin;
    use crate::quadrature::integrate_power_tail;
    use approx::assert_relative_eq;

    fn pl4() -> PathLoss {
        PathLoss::new(1.0, 4.0).unwrap()
    }

    #[test]
    fn singles_closed_form() {
        let v = expected_interference_singles(0.25, &pl4(), 1.0).unwrap();
        assert_relative_eq!(v, (1.0 - pair_probability::<f64>()) * 0.25 * PI, epsilon = 1e-12);
        let v2 = expected_interference_singles(0.25, &pl4(), 2.0).unwrap();
        assert_relative_eq!(v / v2, 4.0, epsilon = 1e-12);
        assert!(matches!(expected_interference_singles(0.25, &pl4(), 0.0), Err(Error::Divergent(_))));
        // quadrature of (1 - delta) lambda 2 pi r p r^-beta over (R, inf)
        let pl = PathLoss::new(1.0, 3.0).unwrap();
        let q = integrate_power_tail(|r| 2.0 * PI * r * r.powi(-3), 1.5, 2.0, &Tolerance::default()).unwrap();
        let want = (1.0 - pair_probability::<f64>()) * 0.25 * q.value;
        assert_relative_eq!(expected_interference_singles(0.25, &pl, 1.5).unwrap(), want, max_relative = 1e-9);
    }

    #[test]
    fn pairs_expectation_ordering() {
        let pl = pl4();
        for r in [1.0, 2.0, 3.0] {
            let nsc = expected_interference_pairs(0.25, &Scheme::Nsc, &pl, r).unwrap();
            let max = expected_interference_pairs(0.25, &Scheme::Max, &pl, r).unwrap();
            let off = expected_interference_pairs(0.25, &Scheme::Off { q: 0.5 }, &pl, r).unwrap();
            let ph = expected_interference_pairs(0.25, &Scheme::Ph { phase: PhaseLaw::Uniform }, &pl, r).unwrap();
            assert!(max <= nsc && off <= max);
            assert_relative_eq!(ph, nsc, max_relative = 1e-12);
            // symmetric domain: OFF is exactly half of NSC
            assert_relative_eq!(off, 0.5 * nsc, max_relative = 1e-8);
        }
        assert!(expected_interference_pairs(0.25, &Scheme::Nsc, &pl, 0.0).is_err());
    }

    #[test]
    fn pairs_expectation_far_limit() {
        // far from the origin a partner almost never falls inside R, so the
        // mean tends to delta lambda 2 pi p R^(2 - beta) / (beta - 2)
        let pl = pl4();
        let r = 40.0;
        let v = expected_interference_pairs(0.25, &Scheme::Nsc, &pl, r).unwrap();
        let full = pair_probability::<f64>() * 0.25 * 2.0 * PI * r.powf(-2.0) / 2.0;
        assert!(v < full && v > 0.97 * full, "{v} vs {full}");
    }

    #[test]
    fn mc_sample_basics() {
        let c = Configuration::new(vec![], Window::centered_disc(5.0).unwrap()).unwrap();
        let p = Partition::empty();
        let mut rng = RngState::new(1);
        let s = mc_interference(&c, &p, &Scheme::Nsc, &pl4(), 1.0, &mut rng).unwrap();
        assert_eq!((s.i1, s.i2), (0.0, 0.0));
        let mut rng = RngState::new(2);
        let c = sample_ppp(0.25, &Window::centered_disc(5.0).unwrap(), &mut rng).unwrap();
        let p = mnnr_partition(&c.atoms).unwrap();
        let s = mc_interference(&c, &p, &Scheme::Max, &pl4(), 6.0, &mut rng).unwrap();
        assert_eq!((s.i1, s.i2), (0.0, 0.0));
        assert!(mc_interference(&c, &p, &Scheme::Max, &pl4(), -1.0, &mut rng).is_err());
    }

    #[test]
    fn coupled_curves_order_schemes() {
        let curves = mc_interference_curves(0.25, &[Scheme::Nsc, Scheme::Max, Scheme::Off { q: 0.5 }], &pl4(), &[1.0, 2.0], 40, 10.0, 3).unwrap();
        for k in 0..2 {
            assert_eq!(curves[0].mean_i1[k], curves[1].mean_i1[k]);
            assert!(curves[1].mean_i2[k] <= curves[0].mean_i2[k]);
            assert!(curves[2].mean_i2[k] <= curves[1].mean_i2[k]);
        }
    }

    #[test]
    fn intensities_split_lambda() {
        let window = Window::centered_square(40.0).unwrap();
        let margin = default_margin(0.25);
        let samples: Vec<_> = (0..10)
            .map(|k| {
                let mut rng = RngState::stream(9, k);
                let c = sample_ppp(0.25, &window, &mut rng).unwrap();
                let p = mnnr_partition(&c.atoms).unwrap();
                let m = InteriorMask::new(&c.atoms, &window, margin).unwrap();
                (c, p, m)
            })
            .collect();
        let ic = intensity_check(&samples).unwrap();
        assert!((ic.total() - 0.25).abs() < 0.01);
        assert!((ic.ratio() - 0.609).abs() < 0.06);
    }

    #[test]
    fn poisson_tail_values() {
        assert_relative_eq!(poisson_tail(3.0, 0), 1.0 - (-3.0f64).exp(), max_relative = 1e-12);
        assert!(poisson_tail(3.0, 15) < 1e-6);
    }

    #[test]
    fn series_of_zero_functional_is_one() {
        let w = Window::centered_disc((3.0 / (0.25 * PI)).sqrt()).unwrap();
        let mut rng = RngState::new(4);
        let s = laplace_window_series(0.25, &w, |_| 0.0, Field::Singles, 15, 20, 1e-6, &mut rng).unwrap();
        assert_relative_eq!(s.value, 1.0 - s.truncation_bound, epsilon = 1e-12);
        assert!(matches!(
            laplace_window_series(0.25, &w, |_| 0.0, Field::Singles, 4, 20, 1e-6, &mut rng),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn series_low_order_terms() {
        let w = Window::centered_disc(2.0).unwrap();
        let mut rng = RngState::new(5);
        let c = 0.3;
        let s = laplace_window_series(0.25, &w, |_| c, Field::Pairs, 12, 50, 1e-3, &mut rng).unwrap();
        let m = 0.25 * w.area();
        // two atoms always pair
        assert_relative_eq!(s.terms[2].weight * s.terms[2].mean, (-m).exp() * m * m / 2.0 * (-2.0 * c).exp(), max_relative = 1e-12);
        // one atom is always single
        assert_relative_eq!(s.terms[1].mean, 1.0);
        let t = laplace_window_series(0.25, &w, |_| c, Field::Singles, 12, 50, 1e-3, &mut rng).unwrap();
        assert_relative_eq!(t.terms[2].mean, 1.0);
        assert_relative_eq!(t.terms[1].mean, (-c).exp(), max_relative = 1e-12);
    }

    #[test]
    fn convergence_rows() {
        let rows = window_convergence_check(0.25, &[2.0, 4.0], ConvergenceStatistic::PairedFraction, 50, 1).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.value)));
        assert!(window_convergence_check(0.25, &[4.0, 2.0], ConvergenceStatistic::PairedFraction, 50, 1).is_err());
    }
}
