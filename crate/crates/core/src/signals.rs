//! Signal models: the single-station signal, the cooperative pair schemes,
//! and closed forms for their tail distributions and Laplace transforms.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_pieces, Tolerance};
use crate::scalar::Real;
use crate::special::{rice_pdf, rice_support};
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Transmit power and path-loss exponent; received mean power is `p / r^beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLoss<T = f64> {
    pub p: T,
    pub beta: T,
}

impl<T: Real> PathLoss<T> {
    pub fn new(p: T, beta: T) -> Result<Self> {
        if !(p > T::zero()) || !p.is_finite() {
            return Err(Error::param("p", "transmit power must be positive"));
        }
        if !(beta > T::lit(2.0)) || !beta.is_finite() {
            return Err(Error::param("beta", "path-loss exponent must exceed 2"));
        }
        Ok(PathLoss { p, beta })
    }

    /// Mean received power from distance `r`.
    pub fn mean_power(&self, r: T) -> T {
        self.p / r.powf(self.beta)
    }

    /// Rate of the exponential received power from distance `r`.
    pub fn rate(&self, r: T) -> T {
        r.powf(self.beta) / self.p
    }
}

/// Law of the carrier phases in phase-aligned cooperation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseLaw {
    /// Both phases equal: amplitudes add coherently.
    Coherent,
    /// Independent phases uniform on `[0, 2 pi)`.
    Uniform,
}

/// How a pair of stations shapes the signal seen by a receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scheme {
    /// No cooperation: every station transmits alone.
    Single,
    /// Non-coherent joint transmission: powers add.
    Nsc,
    /// One station of the pair is on: the closer one with probability `q`.
    Off { q: f64 },
    /// The receiver takes the stronger of the two signals.
    Max,
    /// Phase-aligned joint transmission: amplitudes add with the given phases.
    Ph { phase: PhaseLaw },
}

impl Scheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Scheme::Off { q } if !(0.0..=1.0).contains(&q) => {
                Err(Error::param("q", "must lie in [0, 1]"))
            }
            _ => Ok(()),
        }
    }

    /// Whether closed-form CCDF and Laplace transform are available.
    pub fn has_closed_form(&self) -> bool {
        matches!(self, Scheme::Nsc | Scheme::Off { .. } | Scheme::Max)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Single => write!(f, "single"),
            Scheme::Nsc => write!(f, "nsc"),
            Scheme::Off { q } => write!(f, "off:q={q}"),
            Scheme::Max => write!(f, "max"),
            Scheme::Ph {
                phase: PhaseLaw::Coherent,
            } => write!(f, "ph:coherent"),
            Scheme::Ph {
                phase: PhaseLaw::Uniform,
            } => write!(f, "ph:uniform"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let scheme = match t.as_str() {
            "single" => Scheme::Single,
            "nsc" => Scheme::Nsc,
            "max" => Scheme::Max,
            "off" => Scheme::Off { q: 0.5 },
            "ph" | "ph:uniform" => Scheme::Ph {
                phase: PhaseLaw::Uniform,
            },
            "ph:coherent" => Scheme::Ph {
                phase: PhaseLaw::Coherent,
            },
            _ => {
                let q = t
                    .strip_prefix("off:q=")
                    .ok_or_else(|| Error::param("scheme", format!("unknown scheme `{s}`")))?;
                let q: f64 = q
                    .parse()
                    .map_err(|_| Error::param("scheme", format!("bad probability in `{s}`")))?;
                Scheme::Off { q }
            }
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

/// One draw of the random quantities a pair signal depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingDraw {
    pub h_r: f64,
    pub h_z: f64,
    pub theta_r: f64,
    pub theta_z: f64,
    /// For OFF: whether the station at distance `r` is the one transmitting.
    pub r_on: bool,
}

impl FadingDraw {
    pub fn sample<R: Rng + ?Sized>(scheme: &Scheme, rng: &mut R) -> Self {
        let h_r = Exp1.sample(rng);
        let h_z = Exp1.sample(rng);
        let (theta_r, theta_z) = match scheme {
            Scheme::Ph {
                phase: PhaseLaw::Uniform,
            } => (
                std::f64::consts::TAU * rng.random::<f64>(),
                std::f64::consts::TAU * rng.random::<f64>(),
            ),
            _ => (0.0, 0.0),
        };
        let r_on = match scheme {
            Scheme::Off { q } => rng.random::<f64>() < *q,
            _ => true,
        };
        FadingDraw {
            h_r,
            h_z,
            theta_r,
            theta_z,
            r_on,
        }
    }
}

/// Received power `p h / r^beta` from a single station.
pub fn single_signal<R: Rng + ?Sized>(pl: &PathLoss, r: f64, rng: &mut R) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::param("r", "distance must be positive"));
    }
    let h: f64 = Exp1.sample(rng);
    Ok(pl.mean_power(r) * h)
}

/// Pair signal for the given fading draw.
pub fn combine(scheme: &Scheme, pl: &PathLoss, r: f64, z: f64, d: &FadingDraw) -> Result<f64> {
    let a = pl.mean_power(r) * d.h_r;
    let b = pl.mean_power(z) * d.h_z;
    Ok(match *scheme {
        Scheme::Nsc => a + b,
        Scheme::Max => a.max(b),
        Scheme::Off { .. } => {
            if d.r_on {
                a
            } else {
                b
            }
        }
        Scheme::Ph { .. } => {
            let (sa, sb) = (a.sqrt(), b.sqrt());
            let re = sa * d.theta_r.cos() + sb * d.theta_z.cos();
            let im = sa * d.theta_r.sin() + sb * d.theta_z.sin();
            re * re + im * im
        }
        Scheme::Single => {
            return Err(Error::param("scheme", "`single` does not define a pair signal"))
        }
    })
}

/// One draw of the pair signal from stations at distances `r` and `z`.
pub fn pair_signal<R: Rng + ?Sized>(scheme: &Scheme, pl: &PathLoss, r: f64, z: f64, rng: &mut R) -> Result<f64> {
    if !(r > 0.0) || !(z > 0.0) {
        return Err(Error::param("r, z", "distances must be positive"));
    }
    scheme.validate()?;
    let d = FadingDraw::sample(scheme, rng);
    combine(scheme, pl, r, z, &d)
}

/// Mean of the pair signal.
pub fn pair_mean(scheme: &Scheme, pl: &PathLoss, r: f64, z: f64) -> Result<f64> {
    let a = pl.mean_power(r);
    let b = pl.mean_power(z);
    Ok(match *scheme {
        Scheme::Nsc
        | Scheme::Ph {
            phase: PhaseLaw::Uniform,
        } => a + b,
        Scheme::Off { q } => q * a + (1.0 - q) * b,
        Scheme::Max => a + b - a * b / (a + b),
        Scheme::Ph {
            phase: PhaseLaw::Coherent,
        } => a + b + std::f64::consts::FRAC_PI_2 * (a * b).sqrt(),
        Scheme::Single => {
            return Err(Error::param("scheme", "`single` does not define a pair signal"))
        }
    })
}

/// CCDF of the single-station signal: `exp(-T r^beta / p)`.
pub fn single_ccdf<T: Real>(pl: &PathLoss<T>, r: T, t: T) -> T {
    (-t * pl.rate(r)).exp()
}

/// Laplace transform of the single-station signal: `r^beta / (s p + r^beta)`.
pub fn single_lt<T: Real>(pl: &PathLoss<T>, r: T, s: T) -> T {
    let mu = pl.rate(r);
    mu / (s + mu)
}

const ERLANG_SWITCH: f64 = 1e-9;

fn check_rz<T: Real>(r: T, z: T) -> Result<()> {
    if !(r > T::zero()) || !(z > T::zero()) {
        return Err(Error::param("r, z", "distances must be positive"));
    }
    Ok(())
}

fn unsupported(scheme: &Scheme) -> Error {
    Error::Unsupported(format!("no closed form for scheme `{scheme}`"))
}

/// CCDF `P(g > T)` of the pair signal.
pub fn pair_ccdf<T: Real>(scheme: &Scheme, pl: &PathLoss<T>, r: T, z: T, t: T) -> Result<T> {
    check_rz(r, z)?;
    if t < T::zero() {
        return Err(Error::param("T", "threshold must be nonnegative"));
    }
    let m1 = pl.rate(r);
    let m2 = pl.rate(z);
    let e1 = (-m1 * t).exp();
    let e2 = (-m2 * t).exp();
    Ok(match *scheme {
        Scheme::Nsc => {
            if (m1 - m2).abs() < T::lit(ERLANG_SWITCH) * m1 {
                let m = (m1 + m2) / T::lit(2.0);
                (T::one() + m * t) * (-m * t).exp()
            } else {
                (m2 * e1 - m1 * e2) / (m2 - m1)
            }
        }
        Scheme::Off { q } => {
            let q = T::lit(q);
            q * e1 + (T::one() - q) * e2
        }
        Scheme::Max => e1 + e2 - (-(m1 + m2) * t).exp(),
        _ => return Err(unsupported(scheme)),
    })
}

/// Laplace transform `E[exp(-s g)]` of the pair signal.
pub fn pair_lt<T: Real>(scheme: &Scheme, pl: &PathLoss<T>, r: T, z: T, s: T) -> Result<T> {
    Ok(T::one() - pair_lt_complement(scheme, pl, r, z, s)?)
}

/// `1 - E[exp(-s g)]`, evaluated without cancellation for small `s`.
pub fn pair_lt_complement<T: Real>(scheme: &Scheme, pl: &PathLoss<T>, r: T, z: T, s: T) -> Result<T> {
    check_rz(r, z)?;
    if s < T::zero() {
        return Err(Error::param("s", "must be nonnegative"));
    }
    lt_complement_from_rates(scheme, pl.rate(r), pl.rate(z), s)
}

/// `1 - E[exp(-s g)]` given the rates `r^beta / p` and `z^beta / p`.
pub fn lt_complement_from_rates<T: Real>(scheme: &Scheme, m1: T, m2: T, s: T) -> Result<T> {
    let c1 = s / (s + m1);
    let c2 = s / (s + m2);
    Ok(match *scheme {
        // 1 - ab = (1 - a) + a (1 - b)
        Scheme::Nsc => c1 + (T::one() - c1) * c2,
        Scheme::Off { q } => {
            let q = T::lit(q);
            q * c1 + (T::one() - q) * c2
        }
        Scheme::Max => c1 + c2 - s / (s + m1 + m2),
        _ => return Err(unsupported(scheme)),
    })
}

/// `E[exp(-s g(r, Z)) 1{Z > rho}]` where `Z` is Rice(r, alpha).
pub fn pair_lt_conditional(scheme: &Scheme, pl: &PathLoss, s: f64, r: f64, rho: f64, alpha: f64) -> Result<f64> {
    rice_window_integral(r, rho, alpha, |z| pair_lt(scheme, pl, r, z, s))
}

/// `E[(1 - exp(-s g(r, Z))) 1{Z > rho}]` where `Z` is Rice(r, alpha).
pub fn pair_lt_complement_conditional(scheme: &Scheme, pl: &PathLoss, s: f64, r: f64, rho: f64, alpha: f64) -> Result<f64> {
    rice_window_integral(r, rho, alpha, |z| pair_lt_complement(scheme, pl, r, z, s))
}

/// `P(Z > rho)` for `Z` Rice(r, alpha).
pub fn rice_tail(r: f64, rho: f64, alpha: f64) -> Result<f64> {
    rice_window_integral(r, rho, alpha, |_| Ok(1.0))
}

fn rice_window_integral<F: Fn(f64) -> Result<f64>>(r: f64, rho: f64, alpha: f64, f: F) -> Result<f64> {
    if !(r > 0.0) || !(rho >= 0.0) || !(alpha > 0.0) {
        return Err(Error::param("r, rho, alpha", "need r > 0, rho >= 0, alpha > 0"));
    }
    let (a, b) = rice_support(r, alpha);
    let lo = a.max(rho);
    if lo >= b {
        return Ok(0.0);
    }
    let mut pts = vec![lo];
    if r > lo && r < b {
        pts.push(r);
    }
    pts.push(b);
    let mut failure = None;
    let tol = Tolerance::new(1e-13, 1e-10);
    let v = integrate_pieces(
        |z| {
            if z <= 0.0 {
                return 0.0;
            }
            match f(z) {
                Ok(v) => v * rice_pdf(z, r, alpha),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &pts,
        &tol,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(v.value),
    }
}

/// A term `c(r, z) exp(-d(r, z) T)` of a tail-form CCDF.
pub type TermFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Signal law whose CCDF is `sum_i c_i(r, z) exp(-d_i(r, z) T)`, with
/// `d_i > 0` and `sum_i c_i = 1`.
#[derive(Clone)]
pub struct TailForm {
    terms: Vec<(TermFn, TermFn)>,
}

impl fmt::Debug for TailForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TailForm({} terms)", self.terms.len())
    }
}

impl TailForm {
    /// Build a tail form, checking on a probe grid of `(r, z)` that it is a
    /// valid CCDF.
    pub fn new(terms: Vec<(TermFn, TermFn)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::param("terms", "need at least one term"));
        }
        let tf = TailForm { terms };
        // disjoint grids: some forms are singular on r = z
        for &r in &[0.3, 0.8, 1.7] {
            for &z in &[0.5, 1.1, 4.0] {
                let at0 = tf.ccdf(r, z, 0.0);
                if !((at0 - 1.0).abs() < 1e-9) {
                    return Err(Error::param("terms", format!("CCDF at T = 0 is {at0} for r = {r}, z = {z}")));
                }
                if tf.terms.iter().any(|(_, d)| !(d(r, z) > 0.0)) {
                    return Err(Error::param("terms", "exponents must be positive"));
                }
                let mut prev = 1.0 + 1e-12;
                for k in 0..200 {
                    let t = 1e-3 * 1.08f64.powi(k);
                    let v = tf.ccdf(r, z, t);
                    if v > prev + 1e-12 || v < -1e-12 {
                        return Err(Error::param("terms", format!("not a CCDF near T = {t} for r = {r}, z = {z}")));
                    }
                    prev = v;
                }
            }
        }
        Ok(tf)
    }

    /// Tail form of a built-in scheme, for a fixed path loss.
    pub fn from_scheme(scheme: &Scheme, pl: PathLoss) -> Result<Self> {
        let rate = move |x: f64| pl.rate(x);
        let c = |f: fn(f64, f64) -> f64| -> TermFn { Arc::new(move |r, z| f(rate(r), rate(z))) };
        let terms: Vec<(TermFn, TermFn)> = match *scheme {
            Scheme::Nsc => vec![
                (c(|m1, m2| m2 / (m2 - m1)), c(|m1, _| m1)),
                (c(|m1, m2| -m1 / (m2 - m1)), c(|_, m2| m2)),
            ],
            Scheme::Off { q } => {
                let c1: TermFn = Arc::new(move |_, _| q);
                let c2: TermFn = Arc::new(move |_, _| 1.0 - q);
                vec![(c1, c(|m1, _| m1)), (c2, c(|_, m2| m2))]
            }
            Scheme::Max => vec![
                (c(|_, _| 1.0), c(|m1, _| m1)),
                (c(|_, _| 1.0), c(|_, m2| m2)),
                (c(|_, _| -1.0), c(|m1, m2| m1 + m2)),
            ],
            _ => return Err(unsupported(scheme)),
        };
        Ok(TailForm { terms })
    }

    /// Coefficients and exponents at `(r, z)`.
    pub fn terms_at(&self, r: f64, z: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.terms.iter().map(move |(c, d)| (c(r, z), d(r, z)))
    }

    pub fn ccdf(&self, r: f64, z: f64, t: f64) -> f64 {
        self.terms_at(r, z).map(|(c, d)| c * (-d * t).exp()).sum()
    }

    /// `E[exp(-s g)] = sum_i c_i d_i / (s + d_i)`.
    pub fn lt(&self, r: f64, z: f64, s: f64) -> f64 {
        self.terms_at(r, z).map(|(c, d)| c * d / (s + d)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_to_inf, Tolerance};
    use crate::rng::RngState;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pl(beta: f64) -> PathLoss {
        PathLoss::new(1.0, beta).unwrap()
    }

    const CLOSED: [Scheme; 4] = [Scheme::Nsc, Scheme::Off { q: 0.5 }, Scheme::Off { q: 0.2 }, Scheme::Max];

    #[test]
    fn path_loss_validation() {
        assert!(PathLoss::new(0.0, 4.0).is_err());
        assert!(PathLoss::new(1.0, 2.0).is_err());
        assert!(PathLoss::new(1.0, f64::NAN).is_err());
        assert_eq!(pl(4.0).mean_power(2.0), 1.0 / 16.0);
        assert!(PathLoss::<f32>::new(1.0, 3.0).is_ok());
    }

    #[test]
    fn scheme_tokens_round_trip() {
        for tok in ["single", "nsc", "off:q=0.5", "max", "ph:coherent", "ph:uniform"] {
            let s: Scheme = tok.parse().unwrap();
            assert_eq!(s.to_string(), tok);
        }
        assert_eq!("off:q=0.25".parse::<Scheme>().unwrap(), Scheme::Off { q: 0.25 });
        assert!("off:q=2".parse::<Scheme>().is_err());
        assert!("bogus".parse::<Scheme>().is_err());
    }

    #[test]
    fn single_signal_law() {
        let mut rng = RngState::new(1);
        assert!(single_signal(&pl(4.0), 0.0, &mut rng).is_err());
        let n = 200_000;
        let m = (0..n).map(|_| single_signal(&pl(4.0), 2.0, &mut rng).unwrap()).sum::<f64>() / n as f64;
        assert_relative_eq!(m, 1.0 / 16.0, max_relative = 0.01);
        let m = (0..n).map(|_| single_signal(&pl(4.0), 1.0, &mut rng).unwrap()).sum::<f64>() / n as f64;
        assert_relative_eq!(m, 1.0, max_relative = 0.01);
        assert_relative_eq!(single_ccdf(&pl(4.0), 1.5, 0.3), (-0.3 * 1.5f64.powi(4)).exp());
    }

    #[test]
    fn max_ccdf_and_lt_values() {
        let v = pair_ccdf(&Scheme::Max, &pl(4.0), 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(v, 2.0 * (-1.0f64).exp() - (-2.0f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(v, 0.6004, epsilon = 1e-4);
        let l = pair_lt(&Scheme::Max, &pl(4.0), 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(l, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn nsc_ccdf_against_simulation() {
        // rates 1 and 2: p = 1, beta = 4, r = 1, z = 2^(1/4)
        let z = 2f64.powf(0.25);
        let v = pair_ccdf(&Scheme::Nsc, &pl(4.0), 1.0, z, 1.0).unwrap();
        assert_relative_eq!(v, 2.0 * (-1.0f64).exp() - (-2.0f64).exp(), epsilon = 1e-12);
        let mut rng = RngState::new(2);
        let n = 1_000_000;
        let hits = (0..n)
            .filter(|_| pair_signal(&Scheme::Nsc, &pl(4.0), 1.0, z, &mut rng).unwrap() > 1.0)
            .count();
        assert!((hits as f64 / n as f64 - v).abs() < 1e-3);
    }

    #[test]
    fn nsc_erlang_limit_is_continuous() {
        let z = 1.0 + 1e-12;
        let v = pair_ccdf(&Scheme::Nsc, &pl(4.0), 1.0, z, 1.0).unwrap();
        assert_relative_eq!(v, 2.0 * (-1.0f64).exp(), epsilon = 1e-9);
        let near = pair_ccdf(&Scheme::Nsc, &pl(4.0), 1.0, 1.0 + 1e-6, 1.0).unwrap();
        assert_relative_eq!(near, v, epsilon = 1e-6);
    }

    #[test]
    fn ph_has_no_closed_form() {
        let ph = Scheme::Ph { phase: PhaseLaw::Uniform };
        assert!(matches!(pair_ccdf(&ph, &pl(4.0), 1.0, 2.0, 1.0), Err(Error::Unsupported(_))));
        assert!(matches!(pair_lt(&ph, &pl(4.0), 1.0, 2.0, 1.0), Err(Error::Unsupported(_))));
        assert!(pair_ccdf(&Scheme::Single, &pl(4.0), 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn coherent_phase_adds_amplitudes() {
        let d = FadingDraw { h_r: 0.7, h_z: 1.9, theta_r: 0.0, theta_z: 0.0, r_on: true };
        let p = pl(3.0);
        let g = combine(&Scheme::Ph { phase: PhaseLaw::Coherent }, &p, 1.2, 0.8, &d).unwrap();
        let want = ((p.mean_power(1.2) * 0.7).sqrt() + (p.mean_power(0.8) * 1.9).sqrt()).powi(2);
        assert_relative_eq!(g, want, epsilon = 1e-14);
    }

    #[test]
    fn pair_means_match_simulation() {
        let p = pl(4.0);
        let (r, z) = (1.0, 1.3);
        let mut rng = RngState::new(3);
        let n = 400_000;
        for scheme in [
            Scheme::Nsc,
            Scheme::Off { q: 0.3 },
            Scheme::Max,
            Scheme::Ph { phase: PhaseLaw::Coherent },
            Scheme::Ph { phase: PhaseLaw::Uniform },
        ] {
            let m = (0..n).map(|_| pair_signal(&scheme, &p, r, z, &mut rng).unwrap()).sum::<f64>() / n as f64;
            assert_relative_eq!(m, pair_mean(&scheme, &p, r, z).unwrap(), max_relative = 0.01);
        }
        let nsc = pair_mean(&Scheme::Nsc, &p, 1.0, 2.0).unwrap();
        assert_relative_eq!(nsc, 1.0 + 1.0 / 16.0);
    }

    #[test]
    fn max_dominates_off_on_same_draws() {
        let mut rng = RngState::new(4);
        let p = pl(3.5);
        for _ in 0..1000 {
            let d = FadingDraw::sample(&Scheme::Off { q: 0.5 }, &mut rng);
            let m = combine(&Scheme::Max, &p, 1.0, 1.5, &d).unwrap();
            let o = combine(&Scheme::Off { q: 0.5 }, &p, 1.0, 1.5, &d).unwrap();
            let s = combine(&Scheme::Nsc, &p, 1.0, 1.5, &d).unwrap();
            assert!(m >= o && m <= s);
        }
    }

    #[test]
    fn conditional_lt_limits() {
        let p = pl(4.0);
        for s in CLOSED {
            assert_relative_eq!(pair_lt_conditional(&s, &p, 0.0, 1.0, 0.0, 0.63).unwrap(), 1.0, epsilon = 1e-9);
            assert_eq!(pair_lt_conditional(&s, &p, 1.0, 1.0, 100.0, 0.63).unwrap(), 0.0);
        }
    }

    #[test]
    fn conditional_lt_against_simulation() {
        let p = pl(4.0);
        let alpha = 0.629;
        let (s, r, rho) = (1.0, 1.1, 0.8);
        let mut rng = RngState::new(5);
        let n = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let z = crate::pointproc::sample_rice(r, alpha, &mut rng).unwrap();
            if z > rho {
                acc += (-s * pair_signal(&Scheme::Nsc, &p, r, z, &mut rng).unwrap()).exp();
            }
        }
        let mc = acc / n as f64;
        let q = pair_lt_conditional(&Scheme::Nsc, &p, s, r, rho, alpha).unwrap();
        assert!((q - mc).abs() < 2e-3, "{q} vs {mc}");
        let c = pair_lt_complement_conditional(&Scheme::Nsc, &p, s, r, rho, alpha).unwrap();
        assert_relative_eq!(q + c, rice_tail(r, rho, alpha).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn tail_forms_match_closed_forms() {
        let p = pl(3.0);
        for s in CLOSED {
            let tf = TailForm::from_scheme(&s, p).unwrap();
            let tf = TailForm::new(tf.terms.clone()).unwrap();
            for &(r, z, t) in &[(1.0, 2.0, 0.5), (0.7, 0.9, 3.0), (2.0, 1.0, 0.01)] {
                assert_relative_eq!(tf.ccdf(r, z, t), pair_ccdf(&s, &p, r, z, t).unwrap(), epsilon = 1e-12);
                assert_relative_eq!(tf.lt(r, z, t), pair_lt(&s, &p, r, z, t).unwrap(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn tail_form_rejects_invalid() {
        let bad: TermFn = Arc::new(|_, _| 0.5);
        let d: TermFn = Arc::new(|_, _| 1.0);
        assert!(TailForm::new(vec![(bad, d.clone())]).is_err());
        let one: TermFn = Arc::new(|_, _| 1.0);
        let neg: TermFn = Arc::new(|_, _| -1.0);
        assert!(TailForm::new(vec![(one, neg)]).is_err());
        assert!(TailForm::new(vec![]).is_err());
    }

    #[test]
    fn ccdf_is_a_distribution_and_matches_lt() {
        let p = pl(4.0);
        let tol = Tolerance::new(1e-13, 1e-11);
        for s in CLOSED {
            for &(r, z) in &[(1.0, 2.0), (1.3, 0.9), (1.0, 1.0)] {
                // the CCDF falls from 1 to 0, so -dCCDF/dT integrates to 1
                assert_relative_eq!(pair_ccdf(&s, &p, r, z, 0.0).unwrap(), 1.0, epsilon = 1e-15);
                assert!(pair_ccdf(&s, &p, r, z, 1e4).unwrap() < 1e-12);
                for sv in [0.1, 1.0, 7.0] {
                    let i = integrate_to_inf(|t| (-sv * t).exp() * pair_ccdf(&s, &p, r, z, t).unwrap(), 0.0, 1.0, &tol).unwrap();
                    assert_relative_eq!(1.0 - sv * i.value, pair_lt(&s, &p, r, z, sv).unwrap(), epsilon = 1e-6);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn monotone_and_bounded(r in 0.1f64..5.0, z in 0.1f64..5.0, t in 0.0f64..10.0, dt in 0.0f64..3.0, beta in 2.1f64..6.0) {
            let p = pl(beta);
            for s in CLOSED {
                let a = pair_ccdf(&s, &p, r, z, t).unwrap();
                let b = pair_ccdf(&s, &p, r, z, t + dt).unwrap();
                prop_assert!(b <= a + 1e-12);
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&a));
                let la = pair_lt(&s, &p, r, z, t).unwrap();
                let lb = pair_lt(&s, &p, r, z, t + dt).unwrap();
                prop_assert!(lb <= la + 1e-12);
                prop_assert!(la > 0.0 && la <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn symmetric_schemes(r in 0.1f64..5.0, z in 0.1f64..5.0, t in 0.0f64..10.0) {
            let p = pl(4.0);
            for s in [Scheme::Nsc, Scheme::Max] {
                let a = pair_ccdf(&s, &p, r, z, t).unwrap();
                let b = pair_ccdf(&s, &p, z, r, t).unwrap();
                prop_assert!((a - b).abs() <= 1e-9);
                let a = pair_lt(&s, &p, r, z, t).unwrap();
                let b = pair_lt(&s, &p, z, r, t).unwrap();
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}
