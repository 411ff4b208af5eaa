//! Acceptance suite. Each test prints one `PASS`/`FAIL` line to stderr,
//! uncaptured, so `cargo test --test acceptance` shows every outcome.

use mnnr::coverage::{
    analytic_curve, db_grid, mc_coverage_superposition, Association, CoverageCurve, CoverageScheme, McSettings,
};
use mnnr::experiments::*;
use mnnr::geometry::Window;
use mnnr::mnnr::{mnnr_partition, mnnr_partition_exhaustive};
use mnnr::pointproc::{sample_gaussian_offset, sample_rice};
use mnnr::quadrature::{integrate, Tolerance};
use mnnr::signals::{pair_ccdf, pair_signal, PathLoss, Scheme};
use mnnr::special::rice_pdf;
use mnnr::stats::{ks_statistic, ScalarEstimate, Subprocess};
use mnnr::superposition::{joint_cdf_r2_z2, rayleigh_cdf, sample_superposition, SuperParams};
use mnnr::{Point, RngState};
use rand::Rng;
use std::io::Write;
use std::time::Instant;

const DELTA: f64 = 0.6215;

fn report(name: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "{tag} {name}: {detail}");
    assert!(pass, "{name}: {detail}");
}

/// Kolmogorov critical value at level 0.01.
fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

fn fraction_at(lambda: f64) -> ScalarEstimate {
    run_fractions(&FractionsConfig {
        lambda,
        side: 100.0,
        margin: Some(6.0),
        reps: 50,
        seed: 7,
    })
    .unwrap()
    .paired
}

#[test]
fn delta_constant() {
    let t = Instant::now();
    let ScalarEstimate { estimate: est, stderr: se, .. } = fraction_at(0.25);
    let secs = t.elapsed().as_secs_f64();
    report(
        "delta-constant",
        (est - DELTA).abs() <= 0.005 && secs < 60.0,
        format!("paired fraction {est:.4} +- {se:.4} (target 0.6215 +- 0.005), {secs:.1} s"),
    );
}

#[test]
fn lambda_invariance() {
    let a = fraction_at(0.1);
    let b = fraction_at(1.0);
    report(
        "lambda-invariance",
        (a.estimate - DELTA).abs() <= 0.01 && (b.estimate - DELTA).abs() <= 0.01,
        format!("lambda 0.1: {:.4} +- {:.4}; lambda 1.0: {:.4} +- {:.4}", a.estimate, a.stderr, b.estimate, b.stderr),
    );
}

#[test]
fn voronoi_shares() {
    let t = Instant::now();
    let r = run_voronoi(&VoronoiConfig::default()).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let integral = r.integral.unwrap();
    let pass = (r.pairs.estimate - 0.5398).abs() <= 0.01
        && (r.singles.estimate - 0.4602).abs() <= 0.01
        && (integral - 0.5398).abs() <= 0.01
        && secs < 600.0;
    report(
        "voronoi-shares",
        pass,
        format!(
            "probes {:.4} +- {:.4}, complement {:.4}, integral {:.4} (err {:.1e}), {secs:.0} s",
            r.pairs.estimate,
            r.pairs.stderr,
            r.singles.estimate,
            integral,
            r.integral_error.unwrap_or(f64::NAN)
        ),
    );
}

#[test]
fn pair_distance_law() {
    let r = run_nn_cdf(&NnCdfConfig {
        reps: 20,
        ..Default::default()
    })
    .unwrap();
    report(
        "pair-distance-law",
        r.n_pairs >= 10_000 && r.ks < 0.02,
        format!("K-S {:.4} over {} interior pairs", r.ks, r.n_pairs),
    );
}

#[test]
fn rice_and_joint_density() {
    let p = SuperParams::new(0.25).unwrap();
    let tol = Tolerance::new(1e-14, 1e-10);
    let mut rng = RngState::new(41);

    // daughter radius given the parent radius
    let n = 20_000;
    let mut worst_given = 0.0f64;
    let mut pass = true;
    for r in [0.5, 1.4, 3.0] {
        let d: Vec<f64> = (0..n)
            .map(|_| sample_gaussian_offset(Point::new(r, 0.0), p.alpha, &mut rng).norm())
            .collect();
        let cdf = |x: f64| integrate(|z| rice_pdf(z, r, p.alpha), 0.0, x, &tol).unwrap().value;
        let ks = ks_statistic(&d, cdf).unwrap();
        worst_given = worst_given.max(ks * (n as f64).sqrt());
        pass &= ks < ks_critical_1pct(n);
        let e: Vec<f64> = (0..n).map(|_| sample_rice(r, p.alpha, &mut rng).unwrap()).collect();
        pass &= ks_statistic(&e, cdf).unwrap() < ks_critical_1pct(n);
    }

    // distance to the daughter of the nearest parent
    let window = Window::centered_disc(15.0).unwrap();
    let reps = 10_000;
    let z2: Vec<f64> = (0..reps)
        .map(|k| {
            let mut rng = RngState::stream(42, k);
            let m = sample_superposition(&p, &window, &mut rng).unwrap();
            let j = (0..m.parents.len())
                .min_by(|&a, &b| m.parents.atoms[a].norm().total_cmp(&m.parents.atoms[b].norm()))
                .expect("parents in the window");
            m.daughters[j].norm()
        })
        .collect();
    let ks_z2 = ks_statistic(&z2, |x| rayleigh_cdf(x, p.z2_scale())).unwrap();
    pass &= ks_z2 < ks_critical_1pct(z2.len());

    let total = joint_cdf_r2_z2(&p, 40.0, 40.0).unwrap();
    pass &= (total - 1.0).abs() <= 1e-4;
    report(
        "rice-joint-density",
        pass,
        format!(
            "worst sqrt(n) K-S given parent {worst_given:.3} (crit 1.628), Z2 K-S {ks_z2:.4} (crit {:.4}), joint mass {total:.8}",
            ks_critical_1pct(z2.len())
        ),
    );
}

#[test]
fn expected_interference() {
    let cfg = InterferenceConfig::default();
    assert_eq!(cfg.beta, 4.0);
    let r = run_interference(&cfg).unwrap();
    let mut worst: f64 = 0.0;
    let mut ordered = true;
    for (a, m) in r.analytic.iter().zip(&r.mc) {
        for (k, &radius) in a.radii.iter().enumerate() {
            if [1.0, 2.0, 3.0].contains(&radius) {
                worst = worst.max((m.mean_i1[k] / a.mean_i1[k] - 1.0).abs());
                worst = worst.max((m.mean_i2[k] / a.mean_i2[k] - 1.0).abs());
            }
        }
    }
    let nsc = r.analytic.iter().position(|c| c.scheme == "nsc").unwrap();
    let max = r.analytic.iter().position(|c| c.scheme == "max").unwrap();
    for curves in [&r.analytic, &r.mc] {
        ordered &= curves[max].mean_i2.iter().zip(&curves[nsc].mean_i2).all(|(a, b)| a <= b);
    }
    report(
        "expected-interference",
        worst < 0.03 && ordered,
        format!("largest relative error {:.2}% at R in {{1,2,3}}, MAX <= NSC everywhere: {ordered}", 100.0 * worst),
    );
}

#[test]
fn lt_closed_form_and_mc() {
    let r = run_lt_check(&LtCheckConfig {
        reps: 40_000,
        ..Default::default()
    })
    .unwrap();
    let worst = r.rows.iter().map(|row| row.relative_error).fold(0.0, f64::max);
    let gap = (r.mc.estimate - r.analytic).abs();
    report(
        "lt-closed-form",
        worst < 1e-6 && gap <= 0.005,
        format!(
            "quadrature vs closed form {worst:.1e}; MC {:.4} +- {:.4} vs analytic {:.4}",
            r.mc.estimate, r.mc.stderr, r.analytic
        ),
    );
}

#[test]
fn laplace_window_series() {
    let rows = run_laplace_window(&LaplaceConfig::default()).unwrap();
    let detail: Vec<String> = rows
        .iter()
        .map(|r| format!("{:?} series {:.4} direct {:.4}", r.field, r.series.value, r.direct))
        .collect();
    let pass = rows.len() == 2 && rows.iter().all(|r| (r.series.value / r.direct - 1.0).abs() < 0.02);
    report("laplace-window-series", pass, detail.join("; "));
}

fn thresholds() -> Vec<f64> {
    db_grid(-10.0, 20.0, 2.5).unwrap()
}

#[test]
fn coverage_validation() {
    let ts = thresholds();
    let mc = McSettings {
        reps: 40_000,
        seed: 5,
        window_radius: 25.0,
        far_field: true,
    };
    let params = SuperParams::new(0.25).unwrap();
    let mut worst = (0.0f64, String::new());
    for beta in [2.5, 4.0] {
        let pl = PathLoss::new(1.0, beta).unwrap();
        for scheme in [Scheme::Nsc, Scheme::Off { q: 0.5 }, Scheme::Max] {
            let cs = CoverageScheme::uniform(scheme);
            for assoc in [Association::Fixed { r0: 1.0 }, Association::Closest] {
                let a = analytic_curve(&params, &cs, &pl, assoc, 0.0, &ts).unwrap();
                let (m, _) = mc_coverage_superposition(&params, &cs, &pl, assoc, 0.0, &ts, &mc).unwrap();
                let gap = a.max_abs_gap(&m).unwrap();
                if gap >= worst.0 {
                    worst = (gap, format!("beta {beta}, {scheme}, {assoc}"));
                }
            }
        }
    }
    report(
        "coverage-validation",
        worst.0 <= 0.015,
        format!("largest analytic-vs-MC gap {:.4} ({})", worst.0, worst.1),
    );
}

fn coverage(association: Association, scheme: CoverageScheme, curves: Vec<CurveKind>, step: f64, reps: usize) -> CoverageResult {
    run_coverage(&CoverageConfig {
        beta: 3.0,
        association,
        scheme,
        curves,
        t_step_db: step,
        mc: McSettings {
            reps,
            seed: 9,
            ..Default::default()
        },
        ..Default::default()
    })
    .unwrap()
}

fn gap_and_sign(a: &CoverageCurve, b: &CoverageCurve) -> (f64, f64) {
    // largest |a - b| and largest a - b
    let d: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
    (d.iter().map(|x| x.abs()).fold(0.0, f64::max), d.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

#[test]
fn superposition_mnnr_closeness() {
    let mut pass = true;
    let mut detail = Vec::new();
    // the fixed-association gap sits close to the limit, so it gets the larger sample
    for (assoc, reps) in [(Association::Fixed { r0: 1.0 }, 100_000), (Association::Closest, 20_000)] {
        let mut worst: f64 = 0.0;
        let mut above: f64 = f64::NEG_INFINITY;
        let mut per_scheme = Vec::new();
        for scheme in [Scheme::Nsc, Scheme::Off { q: 0.5 }, Scheme::Max] {
            let r = coverage(
                assoc,
                CoverageScheme::uniform(scheme),
                vec![CurveKind::Mnnr, CurveKind::SuperpositionAnalytic],
                2.5,
                reps,
            );
            let (gap, excess) = gap_and_sign(
                r.curve(CurveKind::SuperpositionAnalytic).unwrap(),
                r.curve(CurveKind::Mnnr).unwrap(),
            );
            worst = worst.max(gap);
            above = above.max(excess);
            per_scheme.push(format!("{scheme} {gap:.3}"));
        }
        let mut ok = worst <= 0.03;
        if assoc == Association::Closest {
            // superposition below MNNR, up to Monte Carlo noise
            ok &= above <= 0.01;
        }
        pass &= ok;
        detail.push(format!(
            "{assoc} [{}]: max gap {worst:.4} ({}), max superposition - MNNR {above:+.4}, {reps} reps",
            if ok { "ok" } else { "exceeded" },
            per_scheme.join(", ")
        ));
    }
    report("superposition-mnnr-closeness", pass, detail.join("; "));
}

#[test]
fn cooperation_gains() {
    let base = vec![CurveKind::Mnnr, CurveKind::Baseline];
    let maxoff = coverage(Association::Closest, CoverageScheme::maxoff(), base.clone(), 1.0, 20_000).gain.unwrap();
    let nsc = coverage(Association::Closest, CoverageScheme::uniform(Scheme::Nsc), base.clone(), 1.0, 20_000).gain.unwrap();
    let off = coverage(Association::Fixed { r0: 1.0 }, CoverageScheme::uniform(Scheme::Off { q: 0.5 }), base, 1.0, 20_000)
        .gain
        .unwrap();
    let off_mid = off.mid_range_gain.unwrap_or(f64::NAN);
    let pass = (maxoff.peak_gain - 0.15).abs() <= 0.03 && (nsc.peak_gain - 0.09).abs() <= 0.03 && (off_mid - 0.10).abs() <= 0.03;
    report(
        "cooperation-gains",
        pass,
        format!(
            "closest maxoff peak {:.3} at {:.1} dB; closest nsc peak {:.3} at {:.1} dB; fixed off mid-range {:.3} over {} points",
            maxoff.peak_gain, maxoff.peak_t_db, nsc.peak_gain, nsc.peak_t_db, off_mid, off.mid_range_points
        ),
    );
}

#[test]
fn j_function_signs() {
    let est = run_jfunction(&JFunctionConfig::default()).unwrap();
    let z = |which: Subprocess| {
        let e = est.iter().find(|e| e.which == which).unwrap();
        e.values
            .iter()
            .zip(&e.stderr)
            .filter(|(_, s)| **s > 0.0)
            .map(|(v, s)| (v - 1.0) / s)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    };
    let (s_lo, _) = z(Subprocess::Singles);
    let (_, p_hi) = z(Subprocess::Pairs);
    report(
        "j-function-signs",
        s_lo >= -2.0 && p_hi <= 2.0,
        format!("singles min (J-1)/se {s_lo:.2}; pairs max (J-1)/se {p_hi:.2}"),
    );
}

#[test]
fn partition_oracle() {
    let mut rng = RngState::new(77);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=500);
        let side = rng.random_range(5.0..60.0);
        let pts: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side)))
            .collect();
        if mnnr_partition(&pts).unwrap() != mnnr_partition_exhaustive(&pts).unwrap() {
            mismatches += 1;
        }
    }
    report("partition-oracle", mismatches == 0, format!("{mismatches} mismatches in 1000 configurations"));
}

/// The NSC row of the printed CCDF table: `mu2 / (mu1 - mu2) (e^{-mu1 T} - e^{-mu2 T})` at p = 1.
fn printed_nsc_ccdf(mu1: f64, mu2: f64, t: f64) -> f64 {
    mu2 / (mu1 - mu2) * ((-mu1 * t).exp() - (-mu2 * t).exp())
}

#[test]
fn nsc_ccdf_erratum() {
    let pl = PathLoss::new(1.0, 4.0).unwrap();
    let n = 1_000_000;
    let mut worst: f64 = 0.0;
    let mut printed_gap: f64 = 0.0;
    for (k, (mu1, mu2)) in [(1.0, 2.0), (1.0, 16.0), (1.0, 1.0 + 1e-12)].into_iter().enumerate() {
        let (r, z) = (f64::powf(mu1, 0.25), f64::powf(mu2, 0.25));
        let mut rng = RngState::new(100 + k as u64);
        let draws: Vec<f64> = (0..n).map(|_| pair_signal(&Scheme::Nsc, &pl, r, z, &mut rng).unwrap()).collect();
        for t in [0.25, 0.5, 1.0, 2.0] {
            let mc = draws.iter().filter(|&&g| g > t).count() as f64 / n as f64;
            worst = worst.max((pair_ccdf(&Scheme::Nsc, &pl, r, z, t).unwrap() - mc).abs());
            if k == 0 {
                printed_gap = printed_gap.max((printed_nsc_ccdf(mu1, mu2, t) - mc).abs());
            }
        }
    }
    report(
        "nsc-ccdf-erratum",
        worst <= 1e-3 && printed_gap > 1e-3,
        format!("corrected CCDF vs MC {worst:.1e}; printed form off by {printed_gap:.3} at rates (1, 2)"),
    );
}
