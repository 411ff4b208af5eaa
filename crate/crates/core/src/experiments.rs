//! Reproducible experiment runners. Each takes a plain configuration and
//! returns the data the command line tool writes to disk.

use crate::coverage::{
    analytic_curve, baseline_curve, db_grid, linear_to_db, mc_coverage_mnnr, mc_coverage_superposition,
    Association, BranchFrequencies, CoverageCurve, CoverageScheme, McSettings,
};
use crate::error::{Error, Result};
use crate::geometry::Window;
use crate::interference::{
    expected_interference_curve, laplace_window_mc, laplace_window_series, mc_interference_curves,
    window_convergence_check, ConvergenceRow, ConvergenceStatistic, Field, IntensityCheck, InterferenceCurve,
    LaplaceSeries,
};
use crate::mnnr::{default_margin, mnnr_partition, InteriorMask, Partition};
use crate::pointproc::{sample_hex_grid, sample_ppp, Configuration};
use crate::rng::RngState;
use crate::signals::{PathLoss, Scheme};
use crate::stats::{
    analytic_nn_pairs, es_distances, fraction_paired, j_function, ks_statistic, mean_stderr,
    nn_distances, radius_grid, voronoi_pair_integral, voronoi_share_pairs, EmpiricalCdf,
    ScalarEstimate, Subprocess,
};
use crate::superposition::{
    lt_interference_pairs, lt_singles_closed_form, lt_interference_singles, sample_superposition,
    superposition_interference, SuperParams,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type Sample = (Configuration, Partition, InteriorMask<f64>);

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::param("lambda", "intensity must be positive"));
    }
    Ok(())
}

fn check_reps(reps: usize, min: usize) -> Result<()> {
    if reps < min {
        return Err(Error::param("reps", format!("need at least {min} replications")));
    }
    Ok(())
}

/// Partitioned Poisson samples in a centred square, one RNG stream per replication.
pub fn ppp_samples(lambda: f64, side: f64, margin: f64, reps: usize, seed: u64) -> Result<Vec<Sample>> {
    check_lambda(lambda)?;
    let window = Window::centered_square(side)?;
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = RngState::stream(seed, rep as u64);
            let c = sample_ppp(lambda, &window, &mut rng)?;
            let p = mnnr_partition(&c.atoms)?;
            let m = InteriorMask::new(&c.atoms, &window, margin)?;
            Ok((c, p, m))
        })
        .collect()
}

fn estimate(values: &[f64], seed: u64) -> ScalarEstimate {
    let (estimate, stderr) = mean_stderr(values);
    ScalarEstimate {
        estimate,
        stderr,
        n_reps: values.len(),
        seed,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FractionsConfig {
    /// Intensity [km^-2].
    pub lambda: f64,
    /// Side of the square window [km].
    pub side: f64,
    /// Edge margin [km]; `3 / sqrt(lambda)` when absent.
    pub margin: Option<f64>,
    pub reps: usize,
    pub seed: u64,
}

impl Default for FractionsConfig {
    fn default() -> Self {
        FractionsConfig {
            lambda: 0.25,
            side: 100.0,
            margin: None,
            reps: 50,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionsResult {
    pub paired: ScalarEstimate,
    pub single: ScalarEstimate,
    /// Proportion of single atoms in each window, in replication order.
    pub single_per_window: Vec<f64>,
    pub intensities: IntensityCheck,
}

pub fn run_fractions(cfg: &FractionsConfig) -> Result<FractionsResult> {
    check_reps(cfg.reps, 2)?;
    let margin = cfg.margin.unwrap_or_else(|| default_margin(cfg.lambda));
    let samples = ppp_samples(cfg.lambda, cfg.side, margin, cfg.reps, cfg.seed)?;
    let fr = samples
        .iter()
        .map(|(_, p, m)| fraction_paired(p, m))
        .collect::<Result<Vec<_>>>()?;
    let singles: Vec<f64> = fr.iter().map(|f| 1.0 - f).collect();
    Ok(FractionsResult {
        paired: estimate(&fr, cfg.seed),
        single: estimate(&singles, cfg.seed),
        single_per_window: singles,
        intensities: crate::interference::intensity_check(&samples)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HexSweepConfig {
    /// Atom density [km^-2]; sets the lattice spacing.
    pub lambda: f64,
    pub side: f64,
    pub margin: Option<f64>,
    /// Perturbation radii [km].
    pub q_values: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
}

impl Default for HexSweepConfig {
    fn default() -> Self {
        HexSweepConfig {
            lambda: 0.25,
            side: 60.0,
            margin: None,
            q_values: (1..=20).map(|k| 0.25 * k as f64).collect(),
            reps: 20,
            seed: 7,
        }
    }
}

/// Paired fraction against the perturbation radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HexSweepResult {
    pub spacing: f64,
    pub q_values: Vec<f64>,
    pub paired: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Spacing of the hexagonal lattice with `lambda` centres per unit area.
pub fn hex_spacing(lambda: f64) -> f64 {
    (2.0 / (3f64.sqrt() * lambda)).sqrt()
}

pub fn run_hexgrid_sweep(cfg: &HexSweepConfig) -> Result<HexSweepResult> {
    check_lambda(cfg.lambda)?;
    check_reps(cfg.reps, 2)?;
    let spacing = hex_spacing(cfg.lambda);
    let margin = cfg.margin.unwrap_or_else(|| default_margin(cfg.lambda));
    let window = Window::centered_square(cfg.side)?;
    let mut paired = Vec::new();
    let mut stderr = Vec::new();
    for (k, &q) in cfg.q_values.iter().enumerate() {
        let fr = (0..cfg.reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = RngState::stream(cfg.seed.wrapping_add(k as u64), rep as u64);
                let c = sample_hex_grid(spacing, q, &window, &mut rng)?;
                let p = mnnr_partition(&c.atoms)?;
                let m = InteriorMask::new(&c.atoms, &window, margin)?;
                fraction_paired(&p, &m)
            })
            .collect::<Result<Vec<_>>>()?;
        let (m, e) = mean_stderr(&fr);
        paired.push(m);
        stderr.push(e);
    }
    Ok(HexSweepResult {
        spacing,
        q_values: cfg.q_values.clone(),
        paired,
        stderr,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VoronoiConfig {
    pub lambda: f64,
    pub side: f64,
    pub margin: Option<f64>,
    pub reps: usize,
    pub probes: usize,
    pub seed: u64,
    /// Relative tolerance of the four-fold integral; skipped when absent.
    pub tolerance: Option<f64>,
}

impl Default for VoronoiConfig {
    fn default() -> Self {
        VoronoiConfig {
            lambda: 0.25,
            side: 100.0,
            margin: None,
            reps: 20,
            probes: 20_000,
            seed: 7,
            tolerance: Some(1e-3),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoronoiResult {
    pub pairs: ScalarEstimate,
    pub singles: ScalarEstimate,
    pub integral: Option<f64>,
    pub integral_error: Option<f64>,
}

pub fn run_voronoi(cfg: &VoronoiConfig) -> Result<VoronoiResult> {
    check_reps(cfg.reps, 2)?;
    let margin = cfg.margin.unwrap_or_else(|| default_margin(cfg.lambda));
    let samples = ppp_samples(cfg.lambda, cfg.side, margin, cfg.reps, cfg.seed)?;
    let shares = samples
        .par_iter()
        .enumerate()
        .map(|(rep, (c, p, _))| {
            let mut rng = RngState::stream(cfg.seed ^ 0x5eed, rep as u64);
            voronoi_share_pairs(c, p, cfg.probes, margin, &mut rng).map(|s| s.pairs)
        })
        .collect::<Result<Vec<_>>>()?;
    let singles: Vec<f64> = shares.iter().map(|s| 1.0 - s).collect();
    let integral = cfg
        .tolerance
        .map(|tol| voronoi_pair_integral(cfg.lambda, tol))
        .transpose()?;
    Ok(VoronoiResult {
        pairs: estimate(&shares, cfg.seed),
        singles: estimate(&singles, cfg.seed),
        integral: integral.map(|i| i.value),
        integral_error: integral.map(|i| i.error),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NnCdfConfig {
    pub lambda: f64,
    pub side: f64,
    pub margin: Option<f64>,
    pub reps: usize,
    pub seed: u64,
    /// Largest tabulated radius [km].
    pub r_max: f64,
    pub points: usize,
}

impl Default for NnCdfConfig {
    fn default() -> Self {
        NnCdfConfig {
            lambda: 0.25,
            side: 100.0,
            margin: None,
            reps: 10,
            seed: 7,
            r_max: 3.0,
            points: 61,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnCdfResult {
    pub empirical: EmpiricalCdf,
    pub analytic: Vec<f64>,
    pub ks: f64,
    pub n_pairs: usize,
}

pub fn run_nn_cdf(cfg: &NnCdfConfig) -> Result<NnCdfResult> {
    check_reps(cfg.reps, 1)?;
    let margin = cfg.margin.unwrap_or_else(|| default_margin(cfg.lambda));
    let samples = ppp_samples(cfg.lambda, cfg.side, margin, cfg.reps, cfg.seed)?;
    let grid = radius_grid(cfg.r_max, cfg.points)?;
    // one distance per pair: keep the atom with the smaller index
    let d: Vec<f64> = samples
        .iter()
        .flat_map(|(c, p, m)| {
            p.pairs
                .iter()
                .filter(|&&(a, b)| m.is_interior(a) && m.is_interior(b))
                .map(|&(a, b)| c.atoms[a].dist_sq(&c.atoms[b]).sqrt())
                .collect::<Vec<_>>()
        })
        .collect();
    if d.is_empty() {
        return Err(Error::TooFewAtoms { needed: 2, got: 0 });
    }
    let ks = ks_statistic(&d, |r| analytic_nn_pairs(r, cfg.lambda))?;
    let empirical = EmpiricalCdf::from_samples(&d, &grid)?;
    Ok(NnCdfResult {
        analytic: grid.iter().map(|&r| analytic_nn_pairs(r, cfg.lambda)).collect(),
        empirical,
        ks,
        n_pairs: d.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JFunctionConfig {
    pub lambda: f64,
    pub side: f64,
    pub margin: Option<f64>,
    pub reps: usize,
    pub probes: usize,
    pub seed: u64,
    pub r_max: f64,
    pub points: usize,
}

impl Default for JFunctionConfig {
    fn default() -> Self {
        JFunctionConfig {
            lambda: 0.25,
            side: 60.0,
            margin: None,
            reps: 50,
            probes: 4000,
            seed: 7,
            r_max: 4.0,
            points: 41,
        }
    }
}

/// Replication-averaged J function with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JEstimate {
    pub which: Subprocess,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    /// First grid radius dropped because the pooled `1 - F` fell below the floor.
    pub cutoff: Option<f64>,
}

pub fn run_jfunction(cfg: &JFunctionConfig) -> Result<Vec<JEstimate>> {
    check_reps(cfg.reps, 2)?;
    let margin = cfg.margin.unwrap_or_else(|| default_margin(cfg.lambda));
    let samples = ppp_samples(cfg.lambda, cfg.side, margin, cfg.reps, cfg.seed)?;
    let grid = radius_grid(cfg.r_max, cfg.points)?;
    [Subprocess::All, Subprocess::Singles, Subprocess::Pairs]
        .into_iter()
        .map(|which| {
            let per_rep = samples
                .par_iter()
                .enumerate()
                .map(|(rep, (c, p, _))| -> Result<(EmpiricalCdf, EmpiricalCdf)> {
                    let mut rng = RngState::stream(cfg.seed ^ 0x1f, rep as u64);
                    let g = nn_distances(c, p, which, margin)?;
                    let f = es_distances(c, p, which, margin, cfg.probes, &mut rng)?;
                    Ok((EmpiricalCdf::from_samples(&g, &grid)?, EmpiricalCdf::from_samples(&f, &grid)?))
                })
                .collect::<Result<Vec<_>>>()?;
            // reliable range from the pooled empty-space function
            let n = per_rep.len() as f64;
            let pooled_f: Vec<f64> = (0..grid.len())
                .map(|k| per_rep.iter().map(|(_, f)| f.values[k]).sum::<f64>() / n)
                .collect();
            let pooled_g: Vec<f64> = (0..grid.len())
                .map(|k| per_rep.iter().map(|(g, _)| g.values[k]).sum::<f64>() / n)
                .collect();
            let pooled = j_function(
                &EmpiricalCdf {
                    grid: grid.clone(),
                    values: pooled_g,
                    n_samples: 0,
                },
                &EmpiricalCdf {
                    grid: grid.clone(),
                    values: pooled_f,
                    n_samples: 0,
                },
            )?;
            let mut values = Vec::new();
            let mut stderr = Vec::new();
            for k in 0..pooled.grid.len() {
                let js: Vec<f64> = per_rep
                    .iter()
                    .filter(|(_, f)| f.values[k] < 1.0)
                    .map(|(g, f)| (1.0 - g.values[k]) / (1.0 - f.values[k]))
                    .collect();
                let (m, e) = mean_stderr(&js);
                values.push(m);
                stderr.push(e);
            }
            Ok(JEstimate {
                which,
                grid: pooled.grid,
                values,
                stderr,
                cutoff: pooled.cutoff,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InterferenceConfig {
    pub lambda: f64,
    pub beta: f64,
    pub p: f64,
    /// Exclusion radii [km].
    pub radii: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub reps: usize,
    /// Radius of the simulated disc [km].
    pub window_radius: f64,
    pub seed: u64,
}

impl Default for InterferenceConfig {
    fn default() -> Self {
        InterferenceConfig {
            lambda: 0.25,
            beta: 4.0,
            p: 1.0,
            radii: vec![1.0, 1.5, 2.0, 2.5, 3.0],
            schemes: vec![Scheme::Nsc, Scheme::Max],
            reps: 20_000,
            window_radius: 40.0,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferenceResult {
    pub analytic: Vec<InterferenceCurve>,
    pub mc: Vec<InterferenceCurve>,
}

pub fn run_interference(cfg: &InterferenceConfig) -> Result<InterferenceResult> {
    let pl = PathLoss::new(cfg.p, cfg.beta)?;
    let analytic = cfg
        .schemes
        .iter()
        .map(|s| expected_interference_curve(cfg.lambda, s, &pl, &cfg.radii))
        .collect::<Result<Vec<_>>>()?;
    let mc = mc_interference_curves(cfg.lambda, &cfg.schemes, &pl, &cfg.radii, cfg.reps, cfg.window_radius, cfg.seed)?;
    Ok(InterferenceResult { analytic, mc })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LaplaceConfig {
    pub lambda: f64,
    /// Expected number of atoms in the disc window.
    pub expected_atoms: f64,
    /// The functional is `f(x) = scale |x|^2`.
    pub scale: f64,
    pub n_max: usize,
    pub mc_per_term: usize,
    pub direct_reps: usize,
    /// Largest acceptable Poisson mass of the omitted terms.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for LaplaceConfig {
    fn default() -> Self {
        LaplaceConfig {
            lambda: 0.25,
            expected_atoms: 3.0,
            scale: 0.1,
            n_max: 15,
            mc_per_term: 20_000,
            direct_reps: 100_000,
            tolerance: 1e-6,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceRow {
    pub field: Field,
    pub series: LaplaceSeries,
    pub direct: f64,
    pub direct_stderr: f64,
}

pub fn run_laplace_window(cfg: &LaplaceConfig) -> Result<Vec<LaplaceRow>> {
    check_lambda(cfg.lambda)?;
    if !(cfg.expected_atoms > 0.0) {
        return Err(Error::param("expected_atoms", "must be positive"));
    }
    let window = Window::centered_disc((cfg.expected_atoms / (cfg.lambda * PI)).sqrt())?;
    let scale = cfg.scale;
    let mut rng = RngState::new(cfg.seed);
    [Field::Singles, Field::Pairs]
        .into_iter()
        .enumerate()
        .map(|(k, field)| {
            let series = laplace_window_series(
                cfg.lambda,
                &window,
                |r| scale * r * r,
                field,
                cfg.n_max,
                cfg.mc_per_term,
                cfg.tolerance,
                &mut rng,
            )?;
            let (direct, direct_stderr) = laplace_window_mc(
                cfg.lambda,
                &window,
                |r| scale * r * r,
                field,
                cfg.direct_reps,
                cfg.seed.wrapping_add(1 + k as u64),
            )?;
            Ok(LaplaceRow {
                field,
                series,
                direct,
                direct_stderr,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LtCheckConfig {
    pub lambda: f64,
    pub beta: f64,
    pub p: f64,
    /// Laplace arguments for the closed-form comparison.
    pub s_values: Vec<f64>,
    /// Argument of the Monte Carlo comparison.
    pub s_mc: f64,
    pub scheme: Scheme,
    pub reps: usize,
    pub window_radius: f64,
    pub seed: u64,
}

impl Default for LtCheckConfig {
    fn default() -> Self {
        LtCheckConfig {
            lambda: 0.25,
            beta: 4.0,
            p: 1.0,
            s_values: vec![0.1, 1.0, 10.0],
            s_mc: 1.0,
            scheme: Scheme::Nsc,
            reps: 10_000,
            window_radius: 25.0,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LtRow {
    pub s: f64,
    pub quadrature: f64,
    pub closed_form: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtCheckResult {
    pub rows: Vec<LtRow>,
    pub s_mc: f64,
    pub analytic: f64,
    pub mc: ScalarEstimate,
}

pub fn run_lt_check(cfg: &LtCheckConfig) -> Result<LtCheckResult> {
    check_reps(cfg.reps, 2)?;
    let params = SuperParams::new(cfg.lambda)?;
    let pl = PathLoss::new(cfg.p, cfg.beta)?;
    let rows = cfg
        .s_values
        .iter()
        .map(|&s| {
            let quadrature = lt_interference_singles(&params, &pl, s, 0.0)?;
            let closed_form = lt_singles_closed_form(&params, &pl, s);
            Ok(LtRow {
                s,
                quadrature,
                closed_form,
                relative_error: (quadrature / closed_form - 1.0).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let analytic = lt_interference_singles(&params, &pl, cfg.s_mc, 0.0)?
        * lt_interference_pairs(&params, &cfg.scheme, &pl, cfg.s_mc, 0.0)?;
    let window = Window::centered_disc(cfg.window_radius)?;
    let vals = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = RngState::stream(cfg.seed, rep as u64);
            let m = sample_superposition(&params, &window, &mut rng)?;
            let i = superposition_interference(&m, &cfg.scheme, &pl, &mut rng)?;
            Ok((-cfg.s_mc * i).exp())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LtCheckResult {
        rows,
        s_mc: cfg.s_mc,
        analytic,
        mc: estimate(&vals, cfg.seed),
    })
}

/// Which coverage curves to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    /// Monte Carlo on the cooperation model.
    Mnnr,
    /// Monte Carlo on the superposition model.
    SuperpositionMc,
    /// Closed forms on the superposition model.
    SuperpositionAnalytic,
    /// Closed-form non-cooperative baseline.
    Baseline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoverageConfig {
    pub lambda: f64,
    pub beta: f64,
    pub p: f64,
    pub sigma2: f64,
    pub association: Association,
    pub scheme: CoverageScheme,
    pub curves: Vec<CurveKind>,
    pub t_min_db: f64,
    pub t_max_db: f64,
    pub t_step_db: f64,
    pub mc: McSettings,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        CoverageConfig {
            lambda: 0.25,
            beta: 3.0,
            p: 1.0,
            sigma2: 0.0,
            association: Association::Closest,
            scheme: CoverageScheme::maxoff(),
            curves: vec![CurveKind::Mnnr, CurveKind::Baseline],
            t_min_db: -10.0,
            t_max_db: 20.0,
            t_step_db: 1.0,
            mc: McSettings::default(),
        }
    }
}

/// Coverage gain of a cooperative curve over a baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainSummary {
    pub peak_gain: f64,
    pub peak_t_db: f64,
    /// Mean gain where the baseline lies in `[0.2, 0.8]`.
    pub mid_range_gain: Option<f64>,
    pub mid_range_points: usize,
}

pub const MID_RANGE: (f64, f64) = (0.2, 0.8);

pub fn gain_summary(coop: &CoverageCurve, baseline: &CoverageCurve) -> Result<GainSummary> {
    if coop.thresholds != baseline.thresholds {
        return Err(Error::GridMismatch("gain needs curves on one threshold grid".into()));
    }
    let gains: Vec<f64> = coop.values.iter().zip(&baseline.values).map(|(a, b)| a - b).collect();
    let (k, &peak_gain) = gains
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::param("thresholds", "empty curve"))?;
    let mid: Vec<f64> = gains
        .iter()
        .zip(&baseline.values)
        .filter(|(_, b)| (MID_RANGE.0..=MID_RANGE.1).contains(*b))
        .map(|(g, _)| *g)
        .collect();
    Ok(GainSummary {
        peak_gain,
        peak_t_db: linear_to_db(coop.thresholds[k]),
        mid_range_gain: (!mid.is_empty()).then(|| mid.iter().sum::<f64>() / mid.len() as f64),
        mid_range_points: mid.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    pub curves: Vec<(CurveKind, CoverageCurve)>,
    pub branches: Option<BranchFrequencies>,
    /// Gain of the cooperation-model curve over the baseline, when both were produced.
    pub gain: Option<GainSummary>,
}

impl CoverageResult {
    pub fn curve(&self, kind: CurveKind) -> Option<&CoverageCurve> {
        self.curves.iter().find(|(k, _)| *k == kind).map(|(_, c)| c)
    }
}

pub fn run_coverage(cfg: &CoverageConfig) -> Result<CoverageResult> {
    check_lambda(cfg.lambda)?;
    let pl = PathLoss::new(cfg.p, cfg.beta)?;
    let ts = db_grid(cfg.t_min_db, cfg.t_max_db, cfg.t_step_db)?;
    let params = SuperParams::new(cfg.lambda)?;
    let mut curves = Vec::new();
    let mut branches = None;
    for &kind in &cfg.curves {
        let c = match kind {
            CurveKind::Mnnr => mc_coverage_mnnr(cfg.lambda, &cfg.scheme, &pl, cfg.association, cfg.sigma2, &ts, &cfg.mc)?,
            CurveKind::SuperpositionMc => {
                let (c, b) = mc_coverage_superposition(&params, &cfg.scheme, &pl, cfg.association, cfg.sigma2, &ts, &cfg.mc)?;
                if cfg.association == Association::Closest {
                    branches = Some(b);
                }
                c
            }
            CurveKind::SuperpositionAnalytic => analytic_curve(&params, &cfg.scheme, &pl, cfg.association, cfg.sigma2, &ts)?,
            CurveKind::Baseline => baseline_curve(cfg.lambda, &pl, cfg.association, cfg.sigma2, &ts)?,
        };
        curves.push((kind, c));
    }
    let mut out = CoverageResult {
        curves,
        branches,
        gain: None,
    };
    if let (Some(c), Some(b)) = (out.curve(CurveKind::Mnnr), out.curve(CurveKind::Baseline)) {
        out.gain = Some(gain_summary(c, b)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConvergenceConfig {
    pub lambda: f64,
    /// Disc radii [km], increasing.
    pub radii: Vec<f64>,
    pub statistic: ConvergenceStatistic,
    pub reps: usize,
    pub seed: u64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            lambda: 0.25,
            radii: vec![3.5, 7.0, 14.0, 28.0, 56.0],
            statistic: ConvergenceStatistic::PairedFraction,
            reps: 200,
            seed: 7,
        }
    }
}

pub fn run_convergence(cfg: &ConvergenceConfig) -> Result<Vec<ConvergenceRow>> {
    check_lambda(cfg.lambda)?;
    window_convergence_check(cfg.lambda, &cfg.radii, cfg.statistic, cfg.reps, cfg.seed)
}
