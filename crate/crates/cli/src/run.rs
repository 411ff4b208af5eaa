use crate::args::*;
use mnnr::coverage::Association;
use mnnr::experiments::*;
use mnnr::io::{write_coverage_csv, write_curve_csv, write_file, write_interference_csv, write_json};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn validation(msg: impl Into<String>) -> Self {
        CliError { code: 2, msg: msg.into() }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<mnnr::Error> for CliError {
    fn from(e: mnnr::Error) -> Self {
        let code = match e {
            _ if e.is_numerical() => 3,
            mnnr::Error::Io(_) => 1,
            _ => 2,
        };
        CliError { code, msg: e.to_string() }
    }
}

type Result<T> = std::result::Result<T, CliError>;

macro_rules! set {
    ($cfg:expr, $flag:expr) => {
        if let Some(v) = $flag {
            $cfg = v.into();
        }
    };
}

/// Command configuration: defaults, overlaid by the config file, overlaid by flags.
fn base<T: DeserializeOwned + Default>(file: &Option<Value>) -> Result<T> {
    match file {
        None => Ok(T::default()),
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| CliError::validation(format!("config file: {e}"))),
    }
}

fn require_seed(flag: Option<u64>, file: &Option<Value>) -> Result<()> {
    let in_file = file.as_ref().is_some_and(|v| v.get("seed").is_some());
    if flag.is_none() && !in_file {
        return Err(CliError::validation("a seed is required (--seed or `seed` in the config file)"));
    }
    Ok(())
}

fn apply_window(w: WindowArgs, lambda: &mut f64, side: &mut f64, margin: &mut Option<f64>, reps: &mut usize, seed: &mut u64) {
    set!(*lambda, w.lambda);
    set!(*side, w.side);
    if w.margin.is_some() {
        *margin = w.margin;
    }
    set!(*reps, w.reps);
    set!(*seed, w.seed);
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn path(&mut self, name: &str) -> PathBuf {
        let rel = format!("data/{name}");
        let p = self.dir.join(&rel);
        self.files.push(rel);
        p
    }

    fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let p = self.path(name);
        Ok(write_file(p, |w| write_json(w, value))?)
    }

    fn curve(&mut self, name: &str, grid: &[f64], values: &[f64], stderr: Option<&[f64]>) -> Result<()> {
        let p = self.path(name);
        Ok(write_file(p, |w| write_curve_csv(w, grid, values, stderr))?)
    }
}

fn token(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

fn print_json<T: Serialize>(value: &T) {
    if let Ok(s) = serde_json::to_string_pretty(value) {
        println!("{s}");
    }
}

pub fn run(cli: Cli) -> Result<PathBuf> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::validation("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::validation(e.to_string()))?;
    }
    let file: Option<Value> = match &cli.config {
        None => None,
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::validation(format!("{}: {e}", p.display())))?;
            Some(serde_json::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", p.display())))?)
        }
    };
    let name = cli.command.name();
    let start = Instant::now();
    let run_dir = |seed: u64| cli.run_dir.clone().unwrap_or_else(|| cli.out_root.join(format!("{name}-seed{seed}")));
    let (dir, files, config) = match cli.command {
        Command::Fractions(a) => {
            require_seed(a.w.seed, &file)?;
            let mut c: FractionsConfig = base(&file)?;
            apply_window(a.w, &mut c.lambda, &mut c.side, &mut c.margin, &mut c.reps, &mut c.seed);
            let r = run_fractions(&c)?;
            let mut o = Outputs { dir: run_dir(c.seed), files: vec![] };
            o.json("paired_fraction.json", &r.paired)?;
            o.json("single_fraction.json", &r.single)?;
            o.json("single_fraction_per_window.json", &r.single_per_window)?;
            o.json("intensities.json", &r.intensities)?;
            print_json(&r.paired);
            (o.dir, o.files, json!(c))
        }
        Command::HexgridSweep(a) => {
            require_seed(a.w.seed, &file)?;
            let mut c: HexSweepConfig = base(&file)?;
            apply_window(a.w, &mut c.lambda, &mut c.side, &mut c.margin, &mut c.reps, &mut c.seed);
            set!(c.q_values, a.q);
            let r = run_hexgrid_sweep(&c)?;
            let mut o = Outputs { dir: run_dir(c.seed), files: vec![] };
            o.curve("hexgrid_paired_fraction.csv", &r.q_values, &r.paired, Some(&r.stderr))?;
            println!("lattice spacing {} km, {} perturbation radii", r.spacing, r.q_values.len());
            (o.dir, o.files, json!(c))
        }
        Command::Voronoi(a) => {
            require_seed(a.w.seed, &file)?;
            let mut c: VoronoiConfig = base(&file)?;
            apply_window(a.w, &mut c.lambda, &mut c.side, &mut c.margin, &mut c.reps, &mut c.seed);
            set!(c.probes, a.probes);
            if a.tolerance.is_some() {
                c.tolerance = a.tolerance;
            }
            if a.no_integral {
                c.tolerance = None;
            }
            let r = run_voronoi(&c)?;
            let mut o = Outputs { dir: run_dir(c.seed), files: vec![] };
            o.json("voronoi_pairs.json", &r.pairs)?;
            o.json("voronoi_singles.json", &r.singles)?;
            if let (Some(v), Some(e)) = (r.integral, r.integral_error) {
                o.json("voronoi_integral.json", &json!({ "value": v, "error": e, "tolerance": c.tolerance }))?;
            }
            print_json(&r);
            (o.dir, o.files, json!(c))
        }
        Command::NnCdf(a) => {
            require_seed(a.w.seed, &file)?;
            let mut c: NnCdfConfig = base(&file)?;
            apply_window(a.w, &mut c.lambda, &mut c.side, &mut c.margin, &mut c.reps, &mut c.seed);
            set!(c.r_max, a.g.r_max);
            set!(c.points, a.g.points);
            let r = run_nn_cdf(&c)?;
            let mut o = Outputs { dir: run_dir(c.seed), files: vec![] };
            o.curve("nn_pairs_empirical.csv", &r.empirical.grid, &r.empirical.values, None)?;
            o.curve("nn_pairs_analytic.csv", &r.empirical.grid, &r.analytic, None)?;
            o.json("nn_pairs_ks.json", &json!({ "ks": r.ks, "n_pairs": r.n_pairs }))?;
            println!("K-S distance {} over {} pairs", r.ks, r.n_pairs);
            (o.dir, o.files, json!(c))
        }
        Command::Jfunction(a) => {
            require_seed(a.w.seed, &file)?;
            let mut c: JFunctionConfig = base(&file)?;
            apply_window(a.w, &mut c.lambda, &mut c.side, &mut c.margin, &mut c.reps, &mut c.seed);
            set!(c.r_max, a.g.r_max);
            set!(c.points, a.g.points);
            set!(c.probes, a.probes);
            let r = run_jfunction(&c)?;
            let mut o = Outputs { dir: run_dir(c.seed), files: vec![] };
            for j in &r {
                let which = json!(j.which);
                let tag = which.as_str().unwrap_or("process");
                o.curve(&format!("j_{tag}.csv"), &j.grid, &j.values, Some(&j.stderr))?;
            }
            (o.dir, o.files, json!(c))
        }
        Command::InterferenceMean(a) => {
            require_seed(a.seed, &file)?;
            let mut c: InterferenceConfig = base(&file)?;
            set!(c.lambda, a.lambda);
            set!(c.beta, a.pl.beta);
            set!(c.p, a.pl.p);
            set!(c.radii, a.radii);
            set!(c.schemes, a.schemes);
            set!(c.reps, a.reps);
            set!(c.window_radius, a.window_radius);
            set!(c.seed, a.seed);
            let r = run_interference(&c)?;
            let mut o = Outputs { dir: run_dir(c.seed), files: vec![] };
            for (kind, curves) in [("analytic", &r.analytic), ("mc", &r.mc)] {
                for cv in curves {
                    let p = o.path(&format!("interference_{}_{kind}.csv", token(&cv.scheme)));
                    write_file(p, |w| write_interference_csv(w, cv))?;
                }
            }
            (o.dir, o.files, json!(c))
        }
        Command::LaplaceWindow(a) => {
            require_seed(a.seed, &file)?;
            let mut c: LaplaceConfig = base(&file)?;
            set!(c.lambda, a.lambda);
            set!(c.expected_atoms, a.expected_atoms);
            set!(c.scale, a.scale);
            set!(c.n_max, a.n_max);
            set!(c.mc_per_term, a.mc_per_term);
            set!(c.direct_reps, a.direct_reps);
            set!(c.tolerance, a.tolerance);
            set!(c.seed, a.seed);
            let r = run_laplace_window(&c)?;
            let mut o = Outputs { dir: run_dir(c.seed), files: vec![] };
            o.json("laplace_window.json", &r)?;
            for row in &r {
                println!("{:?}: series {} direct {} +- {}", row.field, row.series.value, row.direct, row.direct_stderr);
            }
            (o.dir, o.files, json!(c))
        }
        Command::LtCheck(a) => {
            require_seed(a.seed, &file)?;
            let mut c: LtCheckConfig = base(&file)?;
            set!(c.lambda, a.lambda);
            set!(c.beta, a.pl.beta);
            set!(c.p, a.pl.p);
            set!(c.s_values, a.s);
            set!(c.s_mc, a.s_mc);
            set!(c.scheme, a.scheme);
            set!(c.reps, a.reps);
            set!(c.window_radius, a.window_radius);
            set!(c.seed, a.seed);
            let r = run_lt_check(&c)?;
            let mut o = Outputs { dir: run_dir(c.seed), files: vec![] };
            o.json("lt_check.json", &r)?;
            print_json(&r);
            (o.dir, o.files, json!(c))
        }
        Command::Coverage(a) => {
            let mut c: CoverageConfig = base(&file)?;
            set!(c.lambda, a.lambda);
            set!(c.beta, a.pl.beta);
            set!(c.p, a.pl.p);
            set!(c.sigma2, a.sigma2);
            match a.association {
                Some(AssociationArg::Closest) => c.association = Association::Closest,
                Some(AssociationArg::Fixed) => c.association = Association::Fixed { r0: a.r0.unwrap_or(1.0) },
                None => {
                    if let (Association::Fixed { .. }, Some(r0)) = (c.association, a.r0) {
                        c.association = Association::Fixed { r0 };
                    }
                }
            }
            set!(c.scheme, a.scheme);
            if let Some(cs) = a.curves {
                c.curves = cs.into_iter().map(CurveKind::from).collect();
            }
            set!(c.t_min_db, a.t_min_db);
            set!(c.t_max_db, a.t_max_db);
            set!(c.t_step_db, a.t_step_db);
            set!(c.mc.reps, a.reps);
            set!(c.mc.window_radius, a.window_radius);
            set!(c.mc.seed, a.seed);
            if a.no_far_field {
                c.mc.far_field = false;
            }
            if c.curves.iter().any(|k| matches!(k, CurveKind::Mnnr | CurveKind::SuperpositionMc)) {
                require_seed(a.seed, &file)?;
            }
            let r = run_coverage(&c)?;
            let mut o = Outputs { dir: run_dir(c.mc.seed), files: vec![] };
            for (kind, curve) in &r.curves {
                let k = json!(kind);
                let tag = k.as_str().unwrap_or("curve").replace('-', "_");
                let p = o.path(&format!("coverage_{tag}.csv"));
                write_file(p, |w| write_coverage_csv(w, curve))?;
                o.json(&format!("coverage_{tag}.json"), &curve.meta)?;
            }
            if let Some(b) = &r.branches {
                o.json("branch_frequencies.json", b)?;
            }
            if let Some(g) = &r.gain {
                o.json("gain.json", g)?;
                print_json(g);
            }
            (o.dir, o.files, json!(c))
        }
        Command::Convergence(a) => {
            require_seed(a.seed, &file)?;
            let mut c: ConvergenceConfig = base(&file)?;
            set!(c.lambda, a.lambda);
            set!(c.radii, a.radii);
            set!(c.statistic, a.statistic);
            set!(c.reps, a.reps);
            set!(c.seed, a.seed);
            let rows = run_convergence(&c)?;
            let mut o = Outputs { dir: run_dir(c.seed), files: vec![] };
            let radii: Vec<f64> = rows.iter().map(|r| r.radius).collect();
            let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
            let stderr: Vec<f64> = rows.iter().map(|r| r.stderr).collect();
            o.curve("convergence.csv", &radii, &values, Some(&stderr))?;
            (o.dir, o.files, json!(c))
        }
    };
    write_manifest(&dir, name, config, files, start.elapsed().as_secs_f64())?;
    Ok(dir)
}

fn write_manifest(dir: &Path, command: &str, config: Value, outputs: Vec<String>, wall: f64) -> Result<()> {
    let manifest = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "workers": rayon::current_num_threads(),
        "wall_time_s": wall,
        "outputs": outputs,
    });
    Ok(write_file(dir.join("manifest.json"), |w| write_json(w, &manifest))?)
}
