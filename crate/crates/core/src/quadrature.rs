//! Adaptive Gauss-Kronrod quadrature (7/15-point pair) with global interval
//! bisection, plus fixed Gauss-Legendre rules for tensor-product integrals.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_evals: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_evals: 200_000,
        }
    }

    pub const fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-12, 1e-9)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_k = kron.abs();
    let mut fv = [0.0; 15];
    fv[7] = fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        kron += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kron * 0.5;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let value = kron * half;
    let asc = asc * half.abs();
    let abs_k = abs_k * half.abs();
    let mut error = ((kron - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (1.0f64).min((200.0 * error / asc).powf(1.5));
    }
    if abs_k > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_k);
    }
    Segment { a, b, value, error }
}

/// Integrate `f` over the union of consecutive intervals `[p0,p1], [p1,p2], ...`.
/// Interior points are used as initial breakpoints (kinks, singularities).
pub fn integrate_pieces<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: &Tolerance,
) -> Result<Integral> {
    if points.len() < 2 {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod15(&mut f, w[0], w[1]));
            evals += 15;
        }
    }
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature {
                achieved: f64::INFINITY,
                requested: tol.target(0.0),
                evals,
            });
        }
        if error <= tol.target(value) {
            return Ok(Integral {
                value,
                error,
                evals,
            });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => {
                return Ok(Integral {
                    value,
                    error,
                    evals,
                })
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        if evals + 30 > tol.max_evals || !(mid > worst.a && mid < worst.b) {
            heap.push(worst);
            return Err(Error::Quadrature {
                achieved: error,
                requested: tol.target(value),
                evals,
            });
        }
        heap.push(kronrod15(&mut f, worst.a, mid));
        heap.push(kronrod15(&mut f, mid, worst.b));
        evals += 30;
    }
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    if b < a {
        let r = integrate_pieces(f, &[b, a], tol)?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }
    integrate_pieces(f, &[a, b], tol)
}

/// Integrate `f` over `[a, inf)` using `x = a + t / (1 - t)`.
/// `scale` sets where the map puts the midpoint `t = 1/2`.
pub fn integrate_to_inf<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    scale: f64,
    tol: &Tolerance,
) -> Result<Integral> {
    let g = |t: f64| {
        let u = 1.0 - t;
        if u <= 0.0 {
            return 0.0;
        }
        let x = a + scale * t / u;
        let v = f(x) * scale / (u * u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_pieces(g, &[0.0, 0.5, 1.0], tol)
}

/// Integrate `f` over `[a, inf)` for `a > 0` when `f(x)` decays like `x^-q`
/// with `q > 1`. The map `x = a w^(-1/(q-1))` makes the transformed integrand
/// tend to a constant at `w = 0`, so slow algebraic tails converge.
pub fn integrate_power_tail<F: FnMut(f64) -> f64>(mut f: F, a: f64, q: f64, tol: &Tolerance) -> Result<Integral> {
    if !(a > 0.0) || !(q > 1.0) {
        return Err(Error::param("a, q", "need a > 0 and decay exponent q > 1"));
    }
    let e = 1.0 / (q - 1.0);
    let g = |w: f64| {
        if w <= 0.0 {
            return 0.0;
        }
        let x = a * w.powf(-e);
        let v = f(x) * a * e * w.powf(-e - 1.0);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_pieces(g, &[0.0, 0.5, 1.0], tol)
}

/// [`integrate_pieces`] for an integrand that can fail; the first error is returned.
pub fn try_integrate_pieces<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    points: &[f64],
    tol: &Tolerance,
) -> Result<Integral> {
    let mut failure = None;
    let r = integrate_pieces(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        points,
        tol,
    );
    match failure {
        Some(e) => Err(e),
        None => r,
    }
}

/// [`integrate_to_inf`] for an integrand that can fail.
pub fn try_integrate_to_inf<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    a: f64,
    scale: f64,
    tol: &Tolerance,
) -> Result<Integral> {
    let mut failure = None;
    let r = integrate_to_inf(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        a,
        scale,
        tol,
    );
    match failure {
        Some(e) => Err(e),
        None => r,
    }
}

/// [`integrate_power_tail`] for an integrand that can fail.
pub fn try_integrate_power_tail<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    a: f64,
    q: f64,
    tol: &Tolerance,
) -> Result<Integral> {
    let mut failure = None;
    let r = integrate_power_tail(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        a,
        q,
        tol,
    );
    match failure {
        Some(e) => Err(e),
        None => r,
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Fixed Gauss-Legendre rule mapped to `[a, b]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        GaussRule { nodes, weights }
    }

    /// `(x, w)` pairs for the interval `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}
