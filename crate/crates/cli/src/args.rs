use clap::{Args, Parser, Subcommand, ValueEnum};
use mnnr::coverage::CoverageScheme;
use mnnr::experiments::CurveKind;
use mnnr::interference::ConvergenceStatistic;
use mnnr::signals::Scheme;
use std::path::PathBuf;

/// Experiments on static base-station cooperation by mutually nearest neighbours.
///
/// Units: lengths in km, intensities in km^-2, powers in W, thresholds in dB.
#[derive(Debug, Parser)]
#[command(name = "mnnr", version)]
pub struct Cli {
    /// Root under which each run gets its own directory `<command>-seed<seed>`.
    #[arg(long, env = "MNNR_OUTPUT_ROOT", default_value = "runs", global = true)]
    pub out_root: PathBuf,

    /// Exact run directory; overrides --out-root.
    #[arg(long, global = true)]
    pub run_dir: Option<PathBuf>,

    /// JSON file with command parameters; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads [default: available parallelism]. Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fractions of paired and single atoms of a Poisson process.
    Fractions(FractionsArgs),
    /// Paired fraction of a perturbed hexagonal grid against the perturbation radius.
    HexgridSweep(HexSweepArgs),
    /// Share of the plane served by paired atoms: probes and the four-fold integral.
    Voronoi(VoronoiArgs),
    /// Distribution of the distance between cooperating atoms.
    NnCdf(NnCdfArgs),
    /// J functions of all atoms, singles and paired atoms.
    Jfunction(JFunctionArgs),
    /// Mean interference of singles and pairs outside an exclusion radius.
    InterferenceMean(InterferenceArgs),
    /// Finite-window Laplace functional series against direct simulation.
    LaplaceWindow(LaplaceArgs),
    /// Laplace transforms of the superposition interference.
    LtCheck(LtCheckArgs),
    /// Coverage probability curves.
    Coverage(CoverageArgs),
    /// Stabilisation of a statistic as the window grows.
    Convergence(ConvergenceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fractions(_) => "fractions",
            Command::HexgridSweep(_) => "hexgrid-sweep",
            Command::Voronoi(_) => "voronoi",
            Command::NnCdf(_) => "nn-cdf",
            Command::Jfunction(_) => "jfunction",
            Command::InterferenceMean(_) => "interference-mean",
            Command::LaplaceWindow(_) => "laplace-window",
            Command::LtCheck(_) => "lt-check",
            Command::Coverage(_) => "coverage",
            Command::Convergence(_) => "convergence",
        }
    }
}

/// Parameters of a Poisson sample in a square window.
#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Intensity [km^-2].
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Side of the square window [km].
    #[arg(long)]
    pub side: Option<f64>,
    /// Edge margin [km] [default: 3 / sqrt(lambda)].
    #[arg(long)]
    pub margin: Option<f64>,
    /// Independent replications.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Seed of the random streams.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FractionsArgs {
    #[command(flatten)]
    pub w: WindowArgs,
}

#[derive(Debug, Args)]
pub struct HexSweepArgs {
    #[command(flatten)]
    pub w: WindowArgs,
    /// Perturbation radii Q [km], comma separated.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct VoronoiArgs {
    #[command(flatten)]
    pub w: WindowArgs,
    /// Probe points per replication.
    #[arg(long)]
    pub probes: Option<usize>,
    /// Relative tolerance of the four-fold integral.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Skip the four-fold integral.
    #[arg(long)]
    pub no_integral: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Largest tabulated radius [km].
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Grid points.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct NnCdfArgs {
    #[command(flatten)]
    pub w: WindowArgs,
    #[command(flatten)]
    pub g: GridArgs,
}

#[derive(Debug, Args)]
pub struct JFunctionArgs {
    #[command(flatten)]
    pub w: WindowArgs,
    #[command(flatten)]
    pub g: GridArgs,
    /// Empty-space probes per replication.
    #[arg(long)]
    pub probes: Option<usize>,
}

/// Path loss `p / r^beta`.
#[derive(Debug, Args)]
pub struct PathLossArgs {
    /// Path-loss exponent (> 2).
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Transmit power [W].
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
}

#[derive(Debug, Args)]
pub struct InterferenceArgs {
    /// Intensity [km^-2].
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[command(flatten)]
    pub pl: PathLossArgs,
    /// Exclusion radii R [km], comma separated.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Pair schemes, comma separated: nsc, off:q=<q>, max, ph:coherent, ph:uniform.
    #[arg(long, value_delimiter = ',')]
    pub schemes: Option<Vec<Scheme>>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Radius of the simulated disc [km].
    #[arg(long)]
    pub window_radius: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct LaplaceArgs {
    /// Intensity [km^-2].
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Expected number of atoms in the disc window.
    #[arg(long)]
    pub expected_atoms: Option<f64>,
    /// The functional is f(x) = scale * |x|^2 [km^-2].
    #[arg(long)]
    pub scale: Option<f64>,
    /// Last series term.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Monte Carlo draws per series term.
    #[arg(long)]
    pub mc_per_term: Option<usize>,
    /// Replications of the direct simulation.
    #[arg(long)]
    pub direct_reps: Option<usize>,
    /// Largest acceptable Poisson mass of omitted terms.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct LtCheckArgs {
    /// Intensity [km^-2].
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[command(flatten)]
    pub pl: PathLossArgs,
    /// Laplace arguments s [W^-1] for the closed-form comparison, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<f64>>,
    /// Laplace argument of the Monte Carlo comparison [W^-1].
    #[arg(long)]
    pub s_mc: Option<f64>,
    /// Pair scheme.
    #[arg(long)]
    pub scheme: Option<Scheme>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Radius of the simulated disc [km].
    #[arg(long)]
    pub window_radius: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AssociationArg {
    /// The closest station and its partner.
    Closest,
    /// An external station at distance --r0.
    Fixed,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    /// Intensity [km^-2].
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[command(flatten)]
    pub pl: PathLossArgs,
    /// Noise power [W].
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long, value_enum)]
    pub association: Option<AssociationArg>,
    /// Serving distance for fixed association [km] [default: 1].
    #[arg(long)]
    pub r0: Option<f64>,
    /// none, maxoff, a pair scheme, or <serving>/<interfering>.
    #[arg(long)]
    pub scheme: Option<CoverageScheme>,
    /// Curves to produce, comma separated.
    #[arg(long, value_delimiter = ',', value_enum)]
    pub curves: Option<Vec<CurveArg>>,
    /// Smallest threshold [dB].
    #[arg(long, allow_negative_numbers = true)]
    pub t_min_db: Option<f64>,
    /// Largest threshold [dB].
    #[arg(long, allow_negative_numbers = true)]
    pub t_max_db: Option<f64>,
    /// Threshold step [dB].
    #[arg(long)]
    pub t_step_db: Option<f64>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Radius of the simulated disc [km].
    #[arg(long)]
    pub window_radius: Option<f64>,
    /// Do not add the mean interference from beyond the simulated disc.
    #[arg(long)]
    pub no_far_field: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CurveArg {
    Mnnr,
    SuperpositionMc,
    SuperpositionAnalytic,
    Baseline,
}

impl From<CurveArg> for CurveKind {
    fn from(c: CurveArg) -> Self {
        match c {
            CurveArg::Mnnr => CurveKind::Mnnr,
            CurveArg::SuperpositionMc => CurveKind::SuperpositionMc,
            CurveArg::SuperpositionAnalytic => CurveKind::SuperpositionAnalytic,
            CurveArg::Baseline => CurveKind::Baseline,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StatisticArg {
    PairedFraction,
    PairDistanceKs,
}

impl From<StatisticArg> for ConvergenceStatistic {
    fn from(s: StatisticArg) -> Self {
        match s {
            StatisticArg::PairedFraction => ConvergenceStatistic::PairedFraction,
            StatisticArg::PairDistanceKs => ConvergenceStatistic::PairDistanceKs,
        }
    }
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    /// Intensity [km^-2].
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Disc radii [km], increasing, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub statistic: Option<StatisticArg>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}
