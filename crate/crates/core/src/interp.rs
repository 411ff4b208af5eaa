//! Natural cubic spline interpolation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    /// Natural spline through `(xs[i], ys[i])`; `xs` must be strictly increasing.
    pub fn natural(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(Error::param("spline", "need at least two knots and matching values"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("spline", "knots must be strictly increasing"));
        }
        // second derivatives by the tridiagonal (Thomas) algorithm
        let mut m = vec![0.0; n];
        if n > 2 {
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let rhs = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
                let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
                c[i] = h1 / diag;
                d[i] = (rhs - h0 * d[i - 1]) / diag;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        Ok(CubicSpline { xs, ys, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Value at `x`; linear extrapolation with the end slopes outside the knots.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let (a, b) = self.domain();
        if x <= a {
            return self.ys[0] + self.slope(0) * (x - a);
        }
        if x >= b {
            return self.ys[n - 1] + self.slope(n - 1) * (x - b);
        }
        let i = self.xs.partition_point(|&k| k <= x).clamp(1, n - 1) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let u = 1.0 - t;
        u * self.ys[i] + t * self.ys[i + 1] + h * h / 6.0 * ((u * u * u - u) * self.m[i] + (t * t * t - t) * self.m[i + 1])
    }

    fn slope(&self, i: usize) -> f64 {
        let n = self.xs.len();
        if i == 0 {
            let h = self.xs[1] - self.xs[0];
            (self.ys[1] - self.ys[0]) / h - h / 6.0 * (2.0 * self.m[0] + self.m[1])
        } else {
            let h = self.xs[n - 1] - self.xs[n - 2];
            (self.ys[n - 1] - self.ys[n - 2]) / h + h / 6.0 * (self.m[n - 2] + 2.0 * self.m[n - 1])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_lines() {
        let s = CubicSpline::natural(vec![0.0, 1.0, 3.0], vec![1.0, 3.0, 7.0]).unwrap();
        assert!((s.eval(1.0) - 3.0).abs() < 1e-14);
        assert!((s.eval(2.0) - 5.0).abs() < 1e-14);
        assert!((s.eval(-1.0) + 1.0).abs() < 1e-14);
        assert!((s.eval(4.0) - 9.0).abs() < 1e-14);
    }

    #[test]
    fn approximates_smooth_function() {
        let xs: Vec<f64> = (0..=40).map(|k| k as f64 * 0.1).collect();
        let ys = xs.iter().map(|x| x.sin()).collect();
        let s = CubicSpline::natural(xs, ys).unwrap();
        for k in 0..200 {
            let x = 0.3 + k as f64 * 0.017;
            assert!((s.eval(x) - x.sin()).abs() < 1e-4);
        }
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(CubicSpline::natural(vec![0.0], vec![1.0]).is_err());
        assert!(CubicSpline::natural(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(CubicSpline::natural(vec![0.0, 1.0], vec![1.0]).is_err());
    }
}
