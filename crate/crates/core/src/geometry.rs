//! Planar primitives: points, sampling windows, disc and lens areas, and the
//! residual area of two mutually-centred discs outside a third disc.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_pieces, Tolerance};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// A point of the plane, coordinates in km.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }

    pub fn origin() -> Self {
        Point2::new(T::zero(), T::zero())
    }

    pub fn from_polar(radius: T, angle: T) -> Self {
        Point2::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn norm(&self) -> T {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(&self) -> T {
        self.x * self.x + self.y * self.y
    }

    pub fn dist_sq(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn angle(&self) -> T {
        self.y.atan2(self.x)
    }

    pub fn scale(&self, a: T) -> Self {
        Point2::new(self.x * a, self.y * a)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Real> std::ops::Add for Point2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> std::ops::Sub for Point2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

/// Euclidean distance.
pub fn distance<T: Real>(p: &Point2<T>, q: &Point2<T>) -> T {
    (p.x - q.x).hypot(p.y - q.y)
}

/// Sampling window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Window<T> {
    Rectangle { x_min: T, x_max: T, y_min: T, y_max: T },
    Disc { center: Point2<T>, radius: T },
}

impl<T: Real> Window<T> {
    pub fn rectangle(x_min: T, x_max: T, y_min: T, y_max: T) -> Result<Self> {
        if !(x_max >= x_min && y_max >= y_min) {
            return Err(Error::param("window", "rectangle bounds are inverted"));
        }
        Ok(Window::Rectangle {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// Square of side `side` centred on the origin.
    pub fn centered_square(side: T) -> Result<Self> {
        let h = side / T::lit(2.0);
        Self::rectangle(-h, h, -h, h)
    }

    pub fn disc(center: Point2<T>, radius: T) -> Result<Self> {
        if !(radius >= T::zero()) {
            return Err(Error::param("window", "disc radius must be nonnegative"));
        }
        Ok(Window::Disc { center, radius })
    }

    pub fn centered_disc(radius: T) -> Result<Self> {
        Self::disc(Point2::origin(), radius)
    }

    pub fn area(&self) -> T {
        match *self {
            Window::Rectangle {
                x_min,
                x_max,
                y_min,
                y_max,
            } => (x_max - x_min) * (y_max - y_min),
            Window::Disc { radius, .. } => T::PI() * radius * radius,
        }
    }

    pub fn contains(&self, p: &Point2<T>) -> bool {
        match *self {
            Window::Rectangle {
                x_min,
                x_max,
                y_min,
                y_max,
            } => p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max,
            Window::Disc { center, radius } => p.dist_sq(&center) <= radius * radius,
        }
    }

    /// Distance from an inside point to the window boundary (negative outside).
    pub fn boundary_distance(&self, p: &Point2<T>) -> T {
        match *self {
            Window::Rectangle {
                x_min,
                x_max,
                y_min,
                y_max,
            } => (p.x - x_min)
                .min(x_max - p.x)
                .min(p.y - y_min)
                .min(y_max - p.y),
            Window::Disc { center, radius } => radius - distance(p, &center),
        }
    }

    /// The window shrunk by `margin` on every side, if anything is left.
    pub fn eroded(&self, margin: T) -> Option<Self> {
        match *self {
            Window::Rectangle {
                x_min,
                x_max,
                y_min,
                y_max,
            } => {
                let w = Window::Rectangle {
                    x_min: x_min + margin,
                    x_max: x_max - margin,
                    y_min: y_min + margin,
                    y_max: y_max - margin,
                };
                (x_max - x_min > margin + margin && y_max - y_min > margin + margin).then_some(w)
            }
            Window::Disc { center, radius } => (radius > margin).then_some(Window::Disc {
                center,
                radius: radius - margin,
            }),
        }
    }

    /// Largest distance from the origin to a point of the window.
    pub fn max_radius(&self) -> T {
        match *self {
            Window::Rectangle {
                x_min,
                x_max,
                y_min,
                y_max,
            } => {
                let fx = x_min.abs().max(x_max.abs());
                let fy = y_min.abs().max(y_max.abs());
                fx.hypot(fy)
            }
            Window::Disc { center, radius } => center.norm() + radius,
        }
    }
}

/// Area, divided by pi, of the lens of two unit discs centred on each other's
/// circumference: `2/3 - sqrt(3)/(2 pi)`.
pub fn lens_gamma<T: Real>() -> T {
    T::lit(2.0) / T::lit(3.0) - T::lit(3.0).sqrt() / (T::lit(2.0) * T::PI())
}

/// Probability that an atom of a Poisson process belongs to a mutually
/// nearest pair: `1 / (2 - gamma)`.
pub fn pair_probability<T: Real>() -> T {
    T::one() / (T::lit(2.0) - lens_gamma::<T>())
}

/// Area of `B(x,|x-y|) ∪ B(y,|x-y|)`, the region that must be empty for
/// `x` and `y` to be mutual nearest neighbours.
pub fn pair_region_area<T: Real>(x: &Point2<T>, y: &Point2<T>) -> Result<T> {
    let d2 = x.dist_sq(y);
    if d2 == T::zero() {
        return Err(Error::CoincidentAtoms);
    }
    Ok(T::PI() * d2 * (T::lit(2.0) - lens_gamma::<T>()))
}

/// Area of the intersection of two discs.
pub fn lens_area<T: Real>(c1: &Point2<T>, r1: T, c2: &Point2<T>, r2: T) -> T {
    let d = distance(c1, c2);
    let zero = T::zero();
    if r1 <= zero || r2 <= zero || d >= r1 + r2 {
        return zero;
    }
    if d <= (r1 - r2).abs() {
        let m = r1.min(r2);
        return T::PI() * m * m;
    }
    let two = T::lit(2.0);
    let a1 = ((d * d + r1 * r1 - r2 * r2) / (two * d * r1)).max(-T::one()).min(T::one());
    let a2 = ((d * d + r2 * r2 - r1 * r1) / (two * d * r2)).max(-T::one()).min(T::one());
    let k = ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)).max(zero);
    r1 * r1 * a1.acos() + r2 * r2 * a2.acos() - k.sqrt() / two
}

/// Area of the union of two discs.
pub fn disc_union_area<T: Real>(c1: &Point2<T>, r1: T, c2: &Point2<T>, r2: T) -> Result<T> {
    if r1 < T::zero() || r2 < T::zero() {
        return Err(Error::param("radius", "must be nonnegative"));
    }
    Ok(T::PI() * (r1 * r1 + r2 * r2) - lens_area(c1, r1, c2, r2))
}

// Intersection of the ray `t * (cos psi, sin psi)`, t in [0, r], with B(c, rho).
fn ray_chord(c: Point2<f64>, rho: f64, ux: f64, uy: f64, r: f64) -> Option<(f64, f64)> {
    let b = ux * c.x + uy * c.y;
    let disc = b * b - (c.norm_sq() - rho * rho);
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let lo = (b - sq).max(0.0);
    let hi = (b + sq).min(r);
    (hi > lo).then_some((lo, hi))
}

fn wrap_angle(a: f64) -> f64 {
    a.rem_euclid(TAU)
}

/// Area of `(B(x,rho) ∪ B(y,rho)) ∩ B(0,r)` by angular integration of exact
/// ray chords. Breakpoints are placed at every angle where the chord
/// structure changes.
fn union_inside_disc(x: Point2<f64>, y: Point2<f64>, rho: f64, r: f64) -> Result<f64> {
    let mut breaks = vec![0.0, TAU];
    for c in [x, y] {
        let n = c.norm();
        let arg = c.angle();
        if n > rho {
            let a = (rho / n).asin();
            breaks.push(wrap_angle(arg + a));
            breaks.push(wrap_angle(arg - a));
        }
        if n > 0.0 {
            let cos_a = (r * r + n * n - rho * rho) / (2.0 * r * n);
            if cos_a.abs() <= 1.0 {
                let a = cos_a.acos();
                breaks.push(wrap_angle(arg + a));
                breaks.push(wrap_angle(arg - a));
            }
        }
    }
    // the two circles (equal radii rho, centres rho apart) cross at
    // midpoint ± (sqrt(3)/2) rho * unit normal
    let mid = Point2::new(0.5 * (x.x + y.x), 0.5 * (x.y + y.y));
    let d = y - x;
    let dn = d.norm();
    if dn > 0.0 {
        let h = 0.75f64.sqrt() * rho / dn;
        for sgn in [1.0, -1.0] {
            let p = Point2::new(mid.x - sgn * h * d.y, mid.y + sgn * h * d.x);
            if p.norm() > 0.0 {
                breaks.push(wrap_angle(p.angle()));
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let integrand = |psi: f64| {
        let (ux, uy) = (psi.cos(), psi.sin());
        let a = ray_chord(x, rho, ux, uy, r);
        let b = ray_chord(y, rho, ux, uy, r);
        let w = |(lo, hi): (f64, f64)| 0.5 * (hi * hi - lo * lo);
        match (a, b) {
            (None, None) => 0.0,
            (Some(i), None) | (None, Some(i)) => w(i),
            (Some(i), Some(j)) => {
                let lo = i.0.max(j.0);
                let hi = i.1.min(j.1);
                let overlap = if hi > lo { w((lo, hi)) } else { 0.0 };
                w(i) + w(j) - overlap
            }
        }
    };
    let tol = Tolerance::new(1e-15 * r * r, 1e-10);
    Ok(integrate_pieces(integrand, &breaks, &tol)?.value)
}

/// Area of `D(x,y) = (B(x,rho) ∪ B(y,rho)) \ B(0,r)` where `x`, `y` have polar
/// coordinates `(r, theta)`, `(s, phi)` and `rho = |x - y|`.
///
/// When `rho >= 2r` the disc `B(0,r)` lies inside `B(x,rho)` and the closed form
/// `pi rho^2 (2 - gamma) - pi r^2` is returned.
pub fn three_disc_residual_area(r: f64, s: f64, theta: f64, phi: f64) -> Result<f64> {
    if !(r > 0.0) || !(s > 0.0) {
        return Err(Error::param("r, s", "radii must be positive"));
    }
    let x = Point2::from_polar(r, theta);
    let y = Point2::from_polar(s, phi);
    let rho2 = r * r + s * s - 2.0 * r * s * (theta - phi).cos();
    if rho2 <= 0.0 || x.dist_sq(&y) == 0.0 {
        return Err(Error::CoincidentAtoms);
    }
    let rho = rho2.sqrt();
    let union = PI * rho2 * (2.0 - lens_gamma::<f64>());
    if rho >= 2.0 * r {
        return Ok(union - PI * r * r);
    }
    let inside = union_inside_disc(x, y, rho, r)?;
    Ok((union - inside).max(0.0))
}
