//! Two-process approximation of the cooperation model: an independent Poisson
//! process of singles and a Poisson process of parents, each parent carrying a
//! daughter at a Gaussian offset. Includes the sampler, the law of the nearest
//! parent and its daughter, and Laplace transforms of both interference fields.

use crate::error::{Error, Result};
use crate::geometry::{lens_gamma, Point2, Window};
use crate::pointproc::{sample_gaussian_offset, sample_ppp, Configuration, Point};
use crate::quadrature::{integrate, integrate_pieces, integrate_power_tail, GaussRule, Tolerance};
use crate::signals::{lt_complement_from_rates, PathLoss, Scheme};
use crate::special::{bessel_i0e, rice_pdf, rice_pdf_offset, rice_support};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Constants of the superposition model at intensity `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperParams {
    pub lambda: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Scale of the parent-daughter separation.
    pub alpha: f64,
    /// Scale of the distance to the nearest single.
    pub xi: f64,
    /// Scale of the distance to the nearest parent.
    pub zeta: f64,
}

impl SuperParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::param("lambda", "intensity must be positive"));
        }
        let gamma = lens_gamma::<f64>();
        let delta = 1.0 / (2.0 - gamma);
        Ok(SuperParams {
            lambda,
            gamma,
            delta,
            alpha: (2.0 * lambda * PI * (2.0 - gamma)).powf(-0.5),
            xi: ((1.0 - delta) * 2.0 * lambda * PI).powf(-0.5),
            zeta: (delta * lambda * PI).powf(-0.5),
        })
    }

    pub fn singles_intensity(&self) -> f64 {
        (1.0 - self.delta) * self.lambda
    }

    pub fn parents_intensity(&self) -> f64 {
        0.5 * self.delta * self.lambda
    }

    /// Rayleigh scale of the distance from the origin to the nearest parent's daughter.
    pub fn z2_scale(&self) -> f64 {
        self.alpha.hypot(self.zeta)
    }
}

pub fn derive_params(lambda: f64) -> Result<SuperParams> {
    SuperParams::new(lambda)
}

/// Singles, parents, and one daughter per parent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkedConfiguration {
    pub singles: Configuration,
    pub parents: Configuration,
    pub daughters: Vec<Point>,
}

impl MarkedConfiguration {
    pub fn total_atoms(&self) -> usize {
        self.singles.len() + self.parents.len() + self.daughters.len()
    }
}

/// Sample the superposition on `window`. Daughters may fall outside it.
pub fn sample_superposition<R: Rng + ?Sized>(
    params: &SuperParams,
    window: &Window<f64>,
    rng: &mut R,
) -> Result<MarkedConfiguration> {
    let singles = sample_ppp(params.singles_intensity(), window, rng)?;
    let parents = sample_ppp(params.parents_intensity(), window, rng)?;
    let daughters = parents
        .atoms
        .iter()
        .map(|&c| sample_gaussian_offset(c, params.alpha, rng))
        .collect();
    Ok(MarkedConfiguration {
        singles,
        parents,
        daughters,
    })
}

/// Rayleigh CDF with scale `sigma`.
pub fn rayleigh_cdf(r: f64, sigma: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    -(-r * r / (2.0 * sigma * sigma)).exp_m1()
}

/// Rayleigh density with scale `sigma`.
pub fn rayleigh_pdf(r: f64, sigma: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let s2 = sigma * sigma;
    r / s2 * (-r * r / (2.0 * s2)).exp()
}

/// Joint density of the distance `R2` to the nearest parent and the distance
/// `Z2` to its daughter.
pub fn joint_density_r2_z2(params: &SuperParams, r: f64, z: f64) -> f64 {
    if r <= 0.0 || z <= 0.0 {
        return 0.0;
    }
    let (a2, s2) = (params.alpha * params.alpha, params.zeta * params.zeta);
    let d = r - z;
    let log_e = -r * r / (2.0 * s2) - d * d / (2.0 * a2);
    r * z / (a2 * s2) * log_e.exp() * bessel_i0e(r * z / a2)
}

/// `P(R2 <= a, Z2 <= b)`.
pub fn joint_cdf_r2_z2(params: &SuperParams, a: f64, b: f64) -> Result<f64> {
    if a <= 0.0 || b <= 0.0 {
        return Ok(0.0);
    }
    let alpha = params.alpha;
    let tol = Tolerance::new(1e-13, 1e-10);
    let mut failure = None;
    let v = integrate(
        |r| {
            let (lo, hi) = rice_support(r, alpha);
            let top = hi.min(b);
            if top <= lo {
                return 0.0;
            }
            match integrate(|z| rice_pdf(z, r, alpha), lo, top, &tol) {
                Ok(i) => rayleigh_pdf(r, params.zeta) * i.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        a,
        &tol,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(v.value.clamp(0.0, 1.0)),
    }
}

/// Laplace transform of the singles interference at `rho = 0` in closed form:
/// `exp(-lambda (1 - delta) 2 pi^2 (s p)^(2/beta) csc(2 pi / beta) / beta)`.
pub fn lt_singles_closed_form(params: &SuperParams, pl: &PathLoss, s: f64) -> f64 {
    let b = pl.beta;
    let k = params.singles_intensity() * 2.0 * PI * PI * (s * pl.p).powf(2.0 / b) / ((2.0 * PI / b).sin() * b);
    (-k).exp()
}

fn check_s_rho(s: f64, rho: f64) -> Result<()> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::param("s", "must be finite and nonnegative"));
    }
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::param("rho", "must be finite and nonnegative"));
    }
    Ok(())
}

/// `-log` of the Laplace transform of the singles interference with
/// exclusion radius `rho`: `lambda (1 - delta) 2 pi int_rho^inf (1 - L_f(s; r)) r dr`.
pub fn neg_log_lt_singles(params: &SuperParams, pl: &PathLoss, s: f64, rho: f64) -> Result<f64> {
    check_s_rho(s, rho)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let b = pl.beta;
    // r = (s p)^(1/beta) u turns the integrand into u / (1 + u^beta)
    let k = (s * pl.p).powf(1.0 / b);
    let a = rho / k;
    let f = |u: f64| u / (1.0 + u.powf(b));
    let tol = Tolerance::new(1e-15, 1e-12);
    let v = if a < 1.0 {
        integrate(f, a, 1.0, &tol)?.value + integrate_power_tail(f, 1.0, b - 1.0, &tol)?.value
    } else {
        integrate_power_tail(f, a, b - 1.0, &tol)?.value
    };
    Ok(params.singles_intensity() * 2.0 * PI * k * k * v)
}

pub fn lt_interference_singles(params: &SuperParams, pl: &PathLoss, s: f64, rho: f64) -> Result<f64> {
    Ok((-neg_log_lt_singles(params, pl, s, rho)?).exp())
}

const RICE_NODES: usize = 24;

fn rice_rule() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(RICE_NODES))
}

/// `E[(1 - exp(-s g(r, Z))) 1{Z > rho}]` for `Z` Rice(r, alpha), by a fixed
/// Gauss rule on the effective support split at `r`.
fn pair_complement_kernel(scheme: &Scheme, pl: &PathLoss, s: f64, r: f64, rho: f64, alpha: f64) -> Result<f64> {
    // offsets t = z - r keep the nodes distinct when alpha << r
    let (tlo, thi) = ((-10.0 * alpha).max(-r).max(rho - r), 10.0 * alpha);
    if tlo >= thi {
        return Ok(0.0);
    }
    let rule = rice_rule();
    let m1 = pl.rate(r);
    let mut acc = 0.0;
    let panels: &[(f64, f64)] = if tlo < 0.0 { &[(tlo, 0.0), (0.0, thi)] } else { &[(tlo, thi)] };
    for &(a, b) in panels {
        for (t, w) in rule.on(a, b) {
            let m2 = m1 * (pl.beta * (t / r).ln_1p()).exp();
            acc += w * rice_pdf_offset(t, r, alpha) * lt_complement_from_rates(scheme, m1, m2, s)?;
        }
    }
    Ok(acc)
}

/// `-log` of the Laplace transform of the pair interference with exclusion
/// radius `rho`: parents beyond `rho` whose daughter is also beyond `rho`
/// interfere, giving
/// `pi lambda delta int_rho^inf E[(1 - exp(-s g(r, Z_r))) 1{Z_r > rho}] r dr`.
pub fn neg_log_lt_pairs(params: &SuperParams, scheme: &Scheme, pl: &PathLoss, s: f64, rho: f64) -> Result<f64> {
    check_s_rho(s, rho)?;
    if !scheme.has_closed_form() {
        return Err(Error::Unsupported(format!("no analytic pair interference for `{scheme}`")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let alpha = params.alpha;
    let scale = (s * pl.p).powf(1.0 / pl.beta).max(alpha).max(rho);
    let mut failure = None;
    let tol = Tolerance::new(1e-14, 1e-9);
    let mut f = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        match pair_complement_kernel(scheme, pl, s, r, rho, alpha) {
            Ok(v) => v * r,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    // parents within 10 alpha inside rho can still have a daughter beyond it,
    // but they are excluded by the parent condition itself
    let near = integrate_pieces(&mut f, &[rho, rho + scale], &tol)?;
    let far = integrate_power_tail(&mut f, rho + scale, pl.beta - 1.0, &tol)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(PI * params.lambda * params.delta * (near.value + far.value))
}

pub fn lt_interference_pairs(params: &SuperParams, scheme: &Scheme, pl: &PathLoss, s: f64, rho: f64) -> Result<f64> {
    Ok((-neg_log_lt_pairs(params, scheme, pl, s, rho)?).exp())
}

/// Interference at the origin from every atom of a marked configuration,
/// with single stations fading independently and pairs per `scheme`.
pub fn superposition_interference<R: Rng + ?Sized>(
    m: &MarkedConfiguration,
    scheme: &Scheme,
    pl: &PathLoss,
    rng: &mut R,
) -> Result<f64> {
    let mut total = 0.0;
    for x in &m.singles.atoms {
        total += crate::signals::single_signal(pl, x.norm(), rng)?;
    }
    let origin = Point2::origin();
    for (y, d) in m.parents.atoms.iter().zip(&m.daughters) {
        total += crate::signals::pair_signal(scheme, pl, y.dist_sq(&origin).sqrt(), d.norm(), rng)?;
    }
    Ok(total)
}
