//! Coverage probability `P(SINR > T)` of the typical user: closed forms on
//! the superposition model, Monte Carlo on the superposition and on the
//! cooperation model itself, and the non-cooperative baselines.

use crate::error::{Error, Result};
use crate::geometry::Window;
use crate::interp::CubicSpline;
use crate::mnnr::mnnr_partition;
use crate::pointproc::sample_ppp;
use crate::quadrature::{integrate_power_tail, GaussRule, Tolerance};
use crate::rng::RngState;
use crate::signals::{pair_signal, single_signal, PathLoss, PhaseLaw, Scheme, TailForm};
use crate::special::{rice_pdf, rice_support};
use crate::superposition::{
    joint_cdf_r2_z2, neg_log_lt_pairs, neg_log_lt_singles, rayleigh_cdf, rayleigh_pdf, sample_superposition,
    SuperParams,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `10 log10(t)`, rounded to 1e-9 dB so grid values print as entered.
pub fn linear_to_db(t: f64) -> f64 {
    (1e10 * t.log10()).round() / 1e9
}

/// Linear thresholds for `lo_db, lo_db + step_db, ..., hi_db`.
pub fn db_grid(lo_db: f64, hi_db: f64, step_db: f64) -> Result<Vec<f64>> {
    if !(step_db > 0.0) || !(hi_db >= lo_db) {
        return Err(Error::param("thresholds", "need step > 0 and hi >= lo"));
    }
    let n = ((hi_db - lo_db) / step_db + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| db_to_linear(lo_db + k as f64 * step_db)).collect())
}

/// `-10 dB` to `20 dB` in 1 dB steps.
pub fn default_thresholds() -> Vec<f64> {
    db_grid(-10.0, 20.0, 1.0).expect("valid grid")
}

/// How the typical user picks its serving station(s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum Association {
    /// A station at distance `r0`, independent of the sampled atoms.
    Fixed { r0: f64 },
    /// The closest station, together with its partner if it has one.
    Closest,
}

impl Association {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Association::Fixed { r0 } if !(r0 > 0.0) || !r0.is_finite() => {
                Err(Error::param("r0", "serving distance must be positive"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Association {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Association::Fixed { .. } => write!(f, "fixed"),
            Association::Closest => write!(f, "closest"),
        }
    }
}

/// Signal scheme of the serving cluster and of interfering pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageScheme {
    pub serving: Scheme,
    pub interfering: Scheme,
}

impl CoverageScheme {
    pub fn uniform(scheme: Scheme) -> Self {
        CoverageScheme {
            serving: scheme,
            interfering: scheme,
        }
    }

    /// No cooperation at all.
    pub fn none() -> Self {
        Self::uniform(Scheme::Single)
    }

    /// Strongest-of-two serving, one-of-two interfering pairs.
    pub fn maxoff() -> Self {
        CoverageScheme {
            serving: Scheme::Max,
            interfering: Scheme::Off { q: 0.5 },
        }
    }

    pub fn is_cooperative(&self) -> bool {
        self.serving != Scheme::Single || self.interfering != Scheme::Single
    }

    pub fn validate(&self) -> Result<()> {
        self.serving.validate()?;
        self.interfering.validate()?;
        if (self.serving == Scheme::Single) != (self.interfering == Scheme::Single) {
            return Err(Error::param("scheme", "`single` cannot be mixed with a cooperative scheme"));
        }
        Ok(())
    }
}

impl fmt::Display for CoverageScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::none() {
            write!(f, "none")
        } else if *self == Self::maxoff() {
            write!(f, "maxoff")
        } else if self.serving == self.interfering {
            write!(f, "{}", self.serving)
        } else {
            write!(f, "{}/{}", self.serving, self.interfering)
        }
    }
}

impl FromStr for CoverageScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let cs = match t.as_str() {
            "none" | "single" => Self::none(),
            "maxoff" => Self::maxoff(),
            _ => match t.split_once('/') {
                Some((a, b)) => CoverageScheme {
                    serving: a.parse()?,
                    interfering: b.parse()?,
                },
                None => Self::uniform(t.parse()?),
            },
        };
        cs.validate()?;
        Ok(cs)
    }
}

/// Which model a curve was computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Mnnr,
    Superposition,
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Mc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub model: Model,
    pub association: Association,
    pub scheme: String,
    pub lambda: f64,
    pub beta: f64,
    pub p: f64,
    pub sigma2: f64,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub method: Method,
}

/// Coverage probability against linear thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve {
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    pub meta: CurveMeta,
}

impl CoverageCurve {
    pub fn thresholds_db(&self) -> Vec<f64> {
        self.thresholds.iter().map(|&t| linear_to_db(t)).collect()
    }

    /// Largest `|self - other|` over a shared threshold grid.
    pub fn max_abs_gap(&self, other: &CoverageCurve) -> Result<f64> {
        if self.thresholds != other.thresholds {
            return Err(Error::GridMismatch("coverage curves use different thresholds".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

fn check_thresholds(ts: &[f64]) -> Result<()> {
    if ts.is_empty() || ts.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::param("thresholds", "need finite nonnegative thresholds"));
    }
    Ok(())
}

fn check_sigma2(sigma2: f64) -> Result<()> {
    if !(sigma2 >= 0.0) || !sigma2.is_finite() {
        return Err(Error::param("sigma2", "noise power must be nonnegative"));
    }
    Ok(())
}

/// Non-cooperative coverage with closest-station association, Rayleigh
/// fading and no noise: `1 / (1 + T^(2/beta) int_{T^(-2/beta)}^inf du / (1 + u^(beta/2)))`.
pub fn coverage_baseline_nocoop(beta: f64, t: f64) -> Result<f64> {
    if !(beta > 2.0) {
        return Err(Error::param("beta", "path-loss exponent must exceed 2"));
    }
    if !(t >= 0.0) {
        return Err(Error::param("T", "threshold must be nonnegative"));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let a = t.powf(-2.0 / beta);
    let i = integrate_power_tail(|u| 1.0 / (1.0 + u.powf(beta / 2.0)), a, beta / 2.0, &Tolerance::new(1e-14, 1e-11))?;
    Ok(1.0 / (1.0 + i.value / a))
}

/// Non-cooperative coverage from a station at fixed distance `r0`:
/// `exp(-T sigma2 r0^beta / p - lambda pi r0^2 T^(2/beta) (2 pi / beta) / sin(2 pi / beta))`.
pub fn coverage_baseline_fixed(lambda: f64, pl: &PathLoss, r0: f64, sigma2: f64, t: f64) -> Result<f64> {
    check_sigma2(sigma2)?;
    if !(r0 > 0.0) || !(lambda > 0.0) || !(t >= 0.0) {
        return Err(Error::param("lambda, r0, T", "need lambda > 0, r0 > 0, T >= 0"));
    }
    let b = pl.beta;
    let k = lambda * PI * r0 * r0 * t.powf(2.0 / b) * (2.0 * PI / b) / (2.0 * PI / b).sin();
    Ok((-t * sigma2 * pl.rate(r0) - k).exp())
}

/// Coverage with a serving station at distance `r0`, single-station fading,
/// and interference from the whole superposition.
pub fn coverage_fixed_analytic(
    params: &SuperParams,
    interfering: &Scheme,
    pl: &PathLoss,
    r0: f64,
    sigma2: f64,
    t: f64,
) -> Result<f64> {
    check_sigma2(sigma2)?;
    Association::Fixed { r0 }.validate()?;
    if !(t >= 0.0) {
        return Err(Error::param("T", "threshold must be nonnegative"));
    }
    let s = t * pl.rate(r0);
    let e = s * sigma2 + neg_log_lt_singles(params, pl, s, 0.0)? + neg_log_lt_pairs(params, interfering, pl, s, 0.0)?;
    Ok((-e).exp())
}

/// The three association events of the closest rule and their coverage
/// contributions: nearest single (`g`), nearest parent (`h`), or the nearest
/// parent's daughter (`k`) being closest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosestTerms {
    pub g: f64,
    pub h: f64,
    pub k: f64,
}

impl ClosestTerms {
    pub fn total(&self) -> f64 {
        self.g + self.h + self.k
    }
}

/// Serving law of the cooperating pair in the closest-association analytics.
#[derive(Debug, Clone)]
pub enum ServingLaw {
    Scheme(Scheme),
    TailForm(TailForm),
}

struct InnerNode {
    z: f64,
    /// quadrature weight times the Rice density
    w: f64,
    surv_r1: f64,
}

struct OuterNode {
    r: f64,
    w: f64,
    f_r1: f64,
    f_r2: f64,
    surv_r1: f64,
    g_tilde: f64,
    inner: Vec<InnerNode>,
    /// log of the pair exponent against log s, with exclusion radius r
    nl2: CubicSpline,
}

const OUTER_PANELS: usize = 12;
const OUTER_NODES: usize = 10;
const INNER_NODES: usize = 16;
const NSC_SPLIT: f64 = 1e-3;

/// Evaluator of closest-association coverage on the superposition model for
/// thresholds in a fixed range. Building it tabulates the pair-interference
/// exponent once per outer node; each threshold is then cheap.
pub struct ClosestAnalytic {
    params: SuperParams,
    serving: ServingLaw,
    pl: PathLoss,
    sigma2: f64,
    t_range: (f64, f64),
    nodes: Vec<OuterNode>,
}

impl ClosestAnalytic {
    pub fn new(
        params: &SuperParams,
        serving: ServingLaw,
        interfering: &Scheme,
        pl: &PathLoss,
        sigma2: f64,
        t_range: (f64, f64),
    ) -> Result<Self> {
        check_sigma2(sigma2)?;
        let (t_lo, t_hi) = t_range;
        if !(t_lo > 0.0) || !(t_hi >= t_lo) || !t_hi.is_finite() {
            return Err(Error::param("thresholds", "need 0 < T_min <= T_max"));
        }
        if let ServingLaw::Scheme(s) = &serving {
            if !s.has_closed_form() {
                return Err(Error::Unsupported(format!("no analytic coverage for serving scheme `{s}`")));
            }
        }
        if !interfering.has_closed_form() {
            return Err(Error::Unsupported(format!("no analytic coverage for interfering scheme `{interfering}`")));
        }
        let alpha = params.alpha;
        let r_max = 8.0 * params.xi.max(params.zeta);
        let outer = GaussRule::new(OUTER_NODES);
        let inner = GaussRule::new(INNER_NODES);
        let h = r_max / OUTER_PANELS as f64;
        let mut raw = Vec::new();
        for k in 0..OUTER_PANELS {
            raw.extend(outer.on(k as f64 * h, (k + 1) as f64 * h));
        }
        let nodes = raw
            .into_par_iter()
            .map(|(r, w)| -> Result<OuterNode> {
                let (lo, hi) = rice_support(r, alpha);
                let mut inn = Vec::with_capacity(2 * INNER_NODES);
                for (a, b) in [(lo, r), (r, hi)] {
                    for (z, wz) in inner.on(a, b) {
                        inn.push(InnerNode {
                            z,
                            w: wz * rice_pdf(z, r, alpha),
                            surv_r1: 1.0 - rayleigh_cdf(z, params.xi),
                        });
                    }
                }
                let g_tilde = (1.0 - rayleigh_cdf(r, params.zeta) - rayleigh_cdf(r, params.z2_scale())
                    + joint_cdf_r2_z2(params, r, r)?)
                .clamp(0.0, 1.0);
                // rates queried at this node: single at r, pair members, and their sum
                let mu_r = pl.rate(r);
                let z_lo = inn.first().map_or(r, |n| n.z);
                let z_hi = r + 5.0 * alpha;
                let s_min = t_lo * mu_r.min(pl.rate(z_lo)) * (1.0 - 2.0 * NSC_SPLIT);
                let s_lo = s_min.max(1e-4 * mu_r);
                let s_hi = (t_hi * (mu_r + pl.rate(z_hi)) * (1.0 + 2.0 * NSC_SPLIT)).max(10.0 * s_lo);
                let decades = (s_hi / s_lo).log10();
                let n = ((5.0 * decades).ceil() as usize + 1).clamp(8, 80);
                let mut xs = Vec::with_capacity(n);
                let mut ys = Vec::with_capacity(n);
                for j in 0..n {
                    let ls = s_lo.ln() + (s_hi / s_lo).ln() * j as f64 / (n - 1) as f64;
                    let v = neg_log_lt_pairs(params, interfering, pl, ls.exp(), r)?;
                    xs.push(ls);
                    ys.push(v.max(1e-300).ln());
                }
                Ok(OuterNode {
                    r,
                    w,
                    f_r1: rayleigh_pdf(r, params.xi),
                    f_r2: rayleigh_pdf(r, params.zeta),
                    surv_r1: 1.0 - rayleigh_cdf(r, params.xi),
                    g_tilde,
                    inner: inn,
                    nl2: CubicSpline::natural(xs, ys)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ClosestAnalytic {
            params: *params,
            serving,
            pl: *pl,
            sigma2,
            t_range,
            nodes,
        })
    }

    /// `E[exp(-d T (I + sigma2))]` with singles beyond `rho1` and pairs beyond the node radius.
    fn phi(&self, node: &OuterNode, t: f64, d: f64, rho1: f64) -> Result<f64> {
        let s = t * d;
        if s == 0.0 {
            return Ok(1.0);
        }
        let nl2 = node.nl2.eval(s.ln()).exp();
        let e = s * self.sigma2 + neg_log_lt_singles(&self.params, &self.pl, s, rho1)? + nl2;
        Ok((-e).exp())
    }

    fn serve(&self, node: &OuterNode, t: f64, z: f64, rho1: f64) -> Result<f64> {
        let (r, pl) = (node.r, &self.pl);
        let phi = |d: f64| self.phi(node, t, d, rho1);
        match &self.serving {
            ServingLaw::Scheme(scheme) => {
                let (m1, m2) = (pl.rate(r), pl.rate(z));
                match *scheme {
                    Scheme::Nsc => {
                        let (a, b) = if (m2 - m1).abs() < NSC_SPLIT * m1.max(m2) {
                            let m = 0.5 * (m1 + m2);
                            (m * (1.0 - NSC_SPLIT), m * (1.0 + NSC_SPLIT))
                        } else {
                            (m1, m2)
                        };
                        Ok((b * phi(a)? - a * phi(b)?) / (b - a))
                    }
                    Scheme::Off { q } => Ok(q * phi(m1)? + (1.0 - q) * phi(m2)?),
                    Scheme::Max => Ok(phi(m1)? + phi(m2)? - phi(m1 + m2)?),
                    _ => Err(Error::Unsupported(format!("no analytic coverage for `{scheme}`"))),
                }
            }
            ServingLaw::TailForm(tf) => {
                let mut acc = 0.0;
                for (c, d) in tf.terms_at(r, z) {
                    acc += c * phi(d)?;
                }
                Ok(acc)
            }
        }
    }

    pub fn terms(&self, t: f64) -> Result<ClosestTerms> {
        let (lo, hi) = self.t_range;
        if !(t >= lo * (1.0 - 1e-12) && t <= hi * (1.0 + 1e-12)) {
            return Err(Error::param("T", format!("{t} outside the tabulated range [{lo}, {hi}]")));
        }
        let (mut g, mut h, mut k) = (0.0, 0.0, 0.0);
        for node in &self.nodes {
            let r = node.r;
            g += node.w * node.f_r1 * node.g_tilde * self.phi(node, t, self.pl.rate(r), r)?;
            let mut hh = 0.0;
            let mut kk = 0.0;
            for inn in &node.inner {
                if inn.w < 1e-300 {
                    continue;
                }
                if inn.z > r {
                    hh += inn.w * self.serve(node, t, inn.z, r)?;
                } else {
                    kk += inn.w * inn.surv_r1 * self.serve(node, t, inn.z, inn.z)?;
                }
            }
            h += node.w * node.f_r2 * node.surv_r1 * hh;
            k += node.w * node.f_r2 * kk;
        }
        Ok(ClosestTerms { g, h, k })
    }

    pub fn coverage(&self, t: f64) -> Result<f64> {
        Ok(self.terms(t)?.total().clamp(0.0, 1.0))
    }
}

/// Closest-association coverage on the superposition model at one threshold.
pub fn coverage_closest_analytic(
    params: &SuperParams,
    scheme: &CoverageScheme,
    pl: &PathLoss,
    sigma2: f64,
    t: f64,
) -> Result<ClosestTerms> {
    if !(t > 0.0) {
        if t == 0.0 && sigma2 >= 0.0 {
            return closest_event_probabilities(params);
        }
        return Err(Error::param("T", "threshold must be nonnegative"));
    }
    ClosestAnalytic::new(params, ServingLaw::Scheme(scheme.serving), &scheme.interfering, pl, sigma2, (t, t))?.terms(t)
}

/// Probabilities of the three association events (the terms at `T = 0`).
pub fn closest_event_probabilities(params: &SuperParams) -> Result<ClosestTerms> {
    let pl = PathLoss::new(1.0, 4.0)?;
    let a = ClosestAnalytic::new(params, ServingLaw::Scheme(Scheme::Nsc), &Scheme::Nsc, &pl, 0.0, (1e-300, 1e-300))?;
    a.terms(1e-300)
}

fn meta(
    model: Model,
    association: Association,
    scheme: String,
    lambda: f64,
    pl: &PathLoss,
    sigma2: f64,
    method: Method,
    mc: Option<&McSettings>,
) -> CurveMeta {
    CurveMeta {
        model,
        association,
        scheme,
        lambda,
        beta: pl.beta,
        p: pl.p,
        sigma2,
        seed: mc.map(|m| m.seed),
        reps: mc.map(|m| m.reps),
        method,
    }
}

/// Analytic coverage curve on the superposition model.
pub fn analytic_curve(
    params: &SuperParams,
    scheme: &CoverageScheme,
    pl: &PathLoss,
    association: Association,
    sigma2: f64,
    thresholds: &[f64],
) -> Result<CoverageCurve> {
    check_thresholds(thresholds)?;
    association.validate()?;
    let values = match association {
        Association::Fixed { r0 } => thresholds
            .iter()
            .map(|&t| coverage_fixed_analytic(params, &scheme.interfering, pl, r0, sigma2, t))
            .collect::<Result<Vec<_>>>()?,
        Association::Closest => {
            let positive: Vec<f64> = thresholds.iter().copied().filter(|&t| t > 0.0).collect();
            let lo = positive.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = positive.iter().copied().fold(0.0, f64::max);
            let eval = if positive.is_empty() {
                None
            } else {
                Some(ClosestAnalytic::new(params, ServingLaw::Scheme(scheme.serving), &scheme.interfering, pl, sigma2, (lo, hi))?)
            };
            thresholds
                .iter()
                .map(|&t| match &eval {
                    Some(e) if t > 0.0 => e.coverage(t),
                    _ => Ok(1.0),
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(CoverageCurve {
        thresholds: thresholds.to_vec(),
        stderr: vec![0.0; values.len()],
        values,
        meta: meta(Model::Superposition, association, scheme.to_string(), params.lambda, pl, sigma2, Method::Analytic, None),
    })
}

/// Analytic non-cooperative baseline curve.
pub fn baseline_curve(lambda: f64, pl: &PathLoss, association: Association, sigma2: f64, thresholds: &[f64]) -> Result<CoverageCurve> {
    check_thresholds(thresholds)?;
    association.validate()?;
    let values = thresholds
        .iter()
        .map(|&t| match association {
            Association::Fixed { r0 } => coverage_baseline_fixed(lambda, pl, r0, sigma2, t),
            Association::Closest if sigma2 == 0.0 => coverage_baseline_nocoop(pl.beta, t),
            Association::Closest => Err(Error::Unsupported("the closest-station baseline is noiseless".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverageCurve {
        thresholds: thresholds.to_vec(),
        stderr: vec![0.0; values.len()],
        values,
        meta: meta(Model::Baseline, association, "none".into(), lambda, pl, sigma2, Method::Analytic, None),
    })
}

/// Monte Carlo settings shared by the coverage simulators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub reps: usize,
    pub seed: u64,
    /// Radius of the disc window around the typical user [km].
    pub window_radius: f64,
    /// Add the mean interference of stations beyond the window.
    pub far_field: bool,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            reps: 10_000,
            seed: 1,
            window_radius: 25.0,
            far_field: true,
        }
    }
}

impl McSettings {
    fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::param("reps", "need at least one replication"));
        }
        if !(self.window_radius > 0.0) {
            return Err(Error::param("window_radius", "must be positive"));
        }
        Ok(())
    }
}

/// Mean power per station of an interfering scheme, relative to every
/// station transmitting alone, for stations far from the receiver.
pub fn far_field_factor(scheme: &Scheme, delta: f64) -> f64 {
    let per_paired_atom = match *scheme {
        Scheme::Single | Scheme::Nsc => 1.0,
        Scheme::Ph {
            phase: PhaseLaw::Uniform,
        } => 1.0,
        Scheme::Ph {
            phase: PhaseLaw::Coherent,
        } => 1.0 + PI / 4.0,
        Scheme::Off { .. } => 0.5,
        Scheme::Max => 0.75,
    };
    (1.0 - delta) + delta * per_paired_atom
}

/// Mean interference from stations of intensity `lambda` beyond radius `w`.
pub fn far_field_interference(lambda: f64, scheme: &Scheme, pl: &PathLoss, w: f64) -> f64 {
    let delta = crate::geometry::pair_probability::<f64>();
    far_field_factor(scheme, delta) * lambda * 2.0 * PI * pl.p * w.powf(2.0 - pl.beta) / (pl.beta - 2.0)
}

/// Observed frequencies of the three closest-association events.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchFrequencies {
    pub single: f64,
    pub parent: f64,
    pub daughter: f64,
}

fn curve_values(sirs: &[f64], thresholds: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = sirs.len() as f64;
    thresholds
        .iter()
        .map(|&t| {
            let c = sirs.iter().filter(|&&s| s > t).count() as f64 / n;
            (c, (c * (1.0 - c) / n).sqrt())
        })
        .unzip()
}

fn argmin(v: &[f64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
}

/// Monte Carlo coverage on the superposition model.
#[allow(clippy::too_many_arguments)]
pub fn mc_coverage_superposition(
    params: &SuperParams,
    scheme: &CoverageScheme,
    pl: &PathLoss,
    association: Association,
    sigma2: f64,
    thresholds: &[f64],
    mc: &McSettings,
) -> Result<(CoverageCurve, BranchFrequencies)> {
    check_thresholds(thresholds)?;
    check_sigma2(sigma2)?;
    association.validate()?;
    scheme.validate()?;
    mc.validate()?;
    if !scheme.is_cooperative() {
        return Err(Error::param("scheme", "the superposition model needs a cooperative scheme"));
    }
    let window = Window::centered_disc(mc.window_radius)?;
    let tail = if mc.far_field {
        far_field_interference(params.lambda, &scheme.interfering, pl, mc.window_radius)
    } else {
        0.0
    };
    let draws = (0..mc.reps)
        .into_par_iter()
        .map(|rep| -> Result<(f64, u8)> {
            let mut rng = RngState::stream(mc.seed, rep as u64);
            let m = sample_superposition(params, &window, &mut rng)?;
            let r1: Vec<f64> = m.singles.atoms.iter().map(|x| x.norm()).collect();
            let r2: Vec<f64> = m.parents.atoms.iter().map(|x| x.norm()).collect();
            let zs: Vec<f64> = m.daughters.iter().map(|x| x.norm()).collect();
            // serving signal, exclusion radii, excluded single / parent, branch
            let (signal, rho1, rho2, skip1, skip2, branch) = match association {
                Association::Fixed { r0 } => (single_signal(pl, r0, &mut rng)?, 0.0, 0.0, None, None, 3u8),
                Association::Closest => {
                    let k1 = argmin(&r1);
                    let k2 = argmin(&r2);
                    let big_r1 = k1.map_or(f64::INFINITY, |i| r1[i]);
                    let (big_r2, big_z2) = k2.map_or((f64::INFINITY, f64::INFINITY), |j| (r2[j], zs[j]));
                    if !big_r1.is_finite() && !big_r2.is_finite() {
                        return Ok((0.0, 3));
                    }
                    if big_r1 <= big_r2 && big_r1 <= big_z2 {
                        (single_signal(pl, big_r1, &mut rng)?, big_r1, big_r1, k1, None, 0)
                    } else {
                        let s = pair_signal(&scheme.serving, pl, big_r2, big_z2, &mut rng)?;
                        if big_r2 <= big_z2 {
                            (s, big_r2, big_r2, None, k2, 1)
                        } else {
                            (s, big_z2, big_r2, None, k2, 2)
                        }
                    }
                }
            };
            let mut interference = tail;
            for (i, &r) in r1.iter().enumerate() {
                if Some(i) != skip1 && r > rho1 {
                    interference += single_signal(pl, r, &mut rng)?;
                }
            }
            for (j, (&r, &z)) in r2.iter().zip(&zs).enumerate() {
                if Some(j) != skip2 && r > rho2 && z > rho2 {
                    interference += pair_signal(&scheme.interfering, pl, r, z, &mut rng)?;
                }
            }
            Ok((signal / (interference + sigma2), branch))
        })
        .collect::<Result<Vec<_>>>()?;
    let sirs: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let freq = |b: u8| draws.iter().filter(|d| d.1 == b).count() as f64 / mc.reps as f64;
    let (values, stderr) = curve_values(&sirs, thresholds);
    Ok((
        CoverageCurve {
            thresholds: thresholds.to_vec(),
            values,
            stderr,
            meta: meta(Model::Superposition, association, scheme.to_string(), params.lambda, pl, sigma2, Method::Mc, Some(mc)),
        },
        BranchFrequencies {
            single: freq(0),
            parent: freq(1),
            daughter: freq(2),
        },
    ))
}

/// Monte Carlo coverage on a Poisson process partitioned by the mutually
/// nearest neighbour relation. With [`CoverageScheme::none`] no partition is
/// made and every station transmits alone.
#[allow(clippy::too_many_arguments)]
pub fn mc_coverage_mnnr(
    lambda: f64,
    scheme: &CoverageScheme,
    pl: &PathLoss,
    association: Association,
    sigma2: f64,
    thresholds: &[f64],
    mc: &McSettings,
) -> Result<CoverageCurve> {
    check_thresholds(thresholds)?;
    check_sigma2(sigma2)?;
    association.validate()?;
    scheme.validate()?;
    mc.validate()?;
    let window = Window::centered_disc(mc.window_radius)?;
    let tail = if mc.far_field {
        far_field_interference(lambda, &scheme.interfering, pl, mc.window_radius)
    } else {
        0.0
    };
    let coop = scheme.is_cooperative();
    let sirs = (0..mc.reps)
        .into_par_iter()
        .map(|rep| -> Result<f64> {
            let mut rng = RngState::stream(mc.seed, rep as u64);
            let c = sample_ppp(lambda, &window, &mut rng)?;
            if c.is_empty() {
                return Ok(match association {
                    Association::Fixed { r0 } => single_signal(pl, r0, &mut rng)? / (tail + sigma2),
                    Association::Closest => 0.0,
                });
            }
            let dist: Vec<f64> = c.atoms.iter().map(|x| x.norm()).collect();
            let partner: Vec<Option<usize>> = if coop {
                let part = mnnr_partition(&c.atoms)?;
                (0..c.len()).map(|i| part.partner(i)).collect()
            } else {
                vec![None; c.len()]
            };
            let mut serving = [usize::MAX; 2];
            let signal = match association {
                Association::Fixed { r0 } => single_signal(pl, r0, &mut rng)?,
                Association::Closest => {
                    let k = argmin(&dist).expect("nonempty");
                    serving[0] = k;
                    match partner[k] {
                        Some(j) => {
                            serving[1] = j;
                            pair_signal(&scheme.serving, pl, dist[k], dist[j], &mut rng)?
                        }
                        None => single_signal(pl, dist[k], &mut rng)?,
                    }
                }
            };
            let mut interference = tail;
            for i in 0..c.len() {
                if serving.contains(&i) {
                    continue;
                }
                match partner[i] {
                    None => interference += single_signal(pl, dist[i], &mut rng)?,
                    Some(j) if i < j => {
                        interference += pair_signal(&scheme.interfering, pl, dist[i], dist[j], &mut rng)?
                    }
                    Some(_) => {}
                }
            }
            Ok(signal / (interference + sigma2))
        })
        .collect::<Result<Vec<_>>>()?;
    let (values, stderr) = curve_values(&sirs, thresholds);
    let model = if coop { Model::Mnnr } else { Model::Baseline };
    Ok(CoverageCurve {
        thresholds: thresholds.to_vec(),
        values,
        stderr,
        meta: meta(model, association, scheme.to_string(), lambda, pl, sigma2, Method::Mc, Some(mc)),
    })
}
