//! Sampled data: profiles on a uniform grid and fields on a rectangle.

use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn tag(&self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

/// Complex samples of a function of one variable on [0, (n-1) h].
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub axis: Axis,
    pub step: f64,
    pub samples: Vec<C64>,
}

impl Profile {
    pub fn new(axis: Axis, step: f64, samples: Vec<C64>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Validation(format!("profile step must be positive, got {step}")));
        }
        if samples.len() < 4 {
            return Err(Error::Validation(format!(
                "profile needs at least 4 samples, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Validation("profile contains non-finite samples".into()));
        }
        Ok(Self { axis, step, samples })
    }

    pub fn from_fn(axis: Axis, step: f64, n: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::new(axis, step, (0..n).map(|i| f(i as f64 * step)).collect())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn extent(&self) -> f64 {
        self.step * (self.samples.len() - 1) as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.samples.len()).map(|i| i as f64 * self.step).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Decay required of initial data: |last| < 1e-8 max|u|.
    pub fn check_decay(&self) -> Result<()> {
        let peak = self.max_abs();
        let tail = self.samples.last().map_or(0.0, |z| z.norm());
        if peak > 0.0 && tail >= 1e-8 * peak {
            return Err(Error::Validation(format!(
                "profile does not decay: |u(X)| = {tail:e} vs max {peak:e}"
            )));
        }
        Ok(())
    }
}

/// Boundary values g0, g1, g2 on a common y-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryProfiles {
    pub g0: Profile,
    pub g1: Profile,
    pub g2: Profile,
}

impl BoundaryProfiles {
    pub fn new(g0: Profile, g1: Profile, g2: Profile) -> Result<Self> {
        if g0.len() != g1.len() || g0.len() != g2.len() {
            return Err(Error::Validation(format!(
                "boundary profiles have mismatched lengths {}, {}, {}",
                g0.len(),
                g1.len(),
                g2.len()
            )));
        }
        let h = g0.step;
        if (g1.step - h).abs() > 1e-12 * h || (g2.step - h).abs() > 1e-12 * h {
            return Err(Error::Validation("boundary profiles have mismatched steps".into()));
        }
        Ok(Self { g0, g1, g2 })
    }

    pub fn length(&self) -> f64 {
        self.g0.extent()
    }

    pub fn zero(step: f64, n: usize) -> Result<Self> {
        let z = Profile::new(Axis::Y, step, vec![C64::default(); n])?;
        Self::new(z.clone(), z.clone(), z)
    }
}

/// Samples u(x_i, y_j) on [0, X] x [0, L], stored row-major in y.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub hx: f64,
    pub hy: f64,
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<C64>,
}

impl FieldGrid {
    pub fn new(hx: f64, hy: f64, nx: usize, ny: usize, data: Vec<C64>) -> Result<Self> {
        if !(hx > 0.0 && hy > 0.0) {
            return Err(Error::Validation("field steps must be positive".into()));
        }
        if data.len() != nx * ny {
            return Err(Error::Validation(format!(
                "field has {} samples, expected {nx} x {ny}",
                data.len()
            )));
        }
        Ok(Self { hx, hy, nx, ny, data })
    }

    pub fn from_fn(hx: f64, hy: f64, nx: usize, ny: usize, f: impl Fn(f64, f64) -> C64) -> Result<Self> {
        let mut data = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                data.push(f(i as f64 * hx, j as f64 * hy));
            }
        }
        Self::new(hx, hy, nx, ny, data)
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[j * self.nx + i]
    }

    pub fn row(&self, j: usize) -> &[C64] {
        &self.data[j * self.nx..(j + 1) * self.nx]
    }

    pub fn column(&self, i: usize) -> Vec<C64> {
        (0..self.ny).map(|j| self.at(i, j)).collect()
    }

    /// Every `sx`-th column and `sy`-th row.
    pub fn subsample(&self, sx: usize, sy: usize) -> Result<Self> {
        if sx == 0 || sy == 0 {
            return Err(Error::Validation("subsample strides must be positive".into()));
        }
        let nx = (self.nx - 1) / sx + 1;
        let ny = (self.ny - 1) / sy + 1;
        let mut data = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                data.push(self.at(i * sx, j * sy));
            }
        }
        Self::new(self.hx * sx as f64, self.hy * sy as f64, nx, ny, data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Cubic spline through complex samples on a uniform grid, with exact
/// antiderivative.
///
/// End slopes come from fourth-order one-sided differences, so the
/// interpolant keeps O(h^4) accuracy up to the boundary.
#[derive(Debug, Clone)]
pub struct Spline {
    step: f64,
    values: Vec<C64>,
    second: Vec<C64>,
    /// Integral from 0 to each knot.
    cumulative: Vec<C64>,
}

impl Spline {
    pub fn new(step: f64, values: Vec<C64>) -> Self {
        let n = values.len();
        let h = step;
        let second = if n >= 5 {
            let d0 = (values[0] * -25.0 + values[1] * 48.0 - values[2] * 36.0 + values[3] * 16.0
                - values[4] * 3.0)
                / (12.0 * h);
            let dn = (values[n - 1] * 25.0 - values[n - 2] * 48.0 + values[n - 3] * 36.0
                - values[n - 4] * 16.0
                + values[n - 5] * 3.0)
                / (12.0 * h);
            clamped_second_derivatives(h, &values, d0, dn)
        } else {
            natural_second_derivatives(h, &values)
        };
        let mut cumulative = vec![C64::default(); n];
        for i in 0..n - 1 {
            cumulative[i + 1] = cumulative[i] + (values[i] + values[i + 1]) * (0.5 * h)
                - (second[i] + second[i + 1]) * (h * h * h / 24.0);
        }
        Self {
            step,
            values,
            second,
            cumulative,
        }
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let n = self.values.len();
        let t = (s / self.step).clamp(0.0, (n - 1) as f64);
        let i = (t.floor() as usize).min(n - 2);
        (i, s - i as f64 * self.step)
    }

    pub fn value(&self, s: f64) -> C64 {
        let (i, d) = self.locate(s);
        let h = self.step;
        let (a, b) = (self.values[i], self.values[i + 1]);
        let (ma, mb) = (self.second[i], self.second[i + 1]);
        let t = d / h;
        let u = 1.0 - t;
        a * u + b * t + (ma * (u * u * u - u) + mb * (t * t * t - t)) * (h * h / 6.0)
    }

    /// Integral of the spline from 0 to s.
    pub fn integral(&self, s: f64) -> C64 {
        let (i, d) = self.locate(s);
        let h = self.step;
        let (a, b) = (self.values[i], self.values[i + 1]);
        let (ma, mb) = (self.second[i], self.second[i + 1]);
        let t = d / h;
        // antiderivative of the local cubic in t, times h
        let lin = a * (t - 0.5 * t * t) + b * (0.5 * t * t);
        let u = 1.0 - t;
        let cu = -(u.powi(4) / 4.0 - u * u / 2.0) + (1.0 / 4.0 - 1.0 / 2.0);
        let ct = t.powi(4) / 4.0 - t * t / 2.0;
        self.cumulative[i] + lin * h + (ma * cu + mb * ct) * (h * h * h / 6.0)
    }

    pub fn extent(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }
}

fn natural_second_derivatives(h: f64, y: &[C64]) -> Vec<C64> {
    let n = y.len();
    let mut m = vec![C64::default(); n];
    if n < 3 {
        return m;
    }
    let k = n - 2;
    let diag = vec![4.0; k];
    let off = vec![1.0; k];
    let rhs: Vec<C64> = (1..n - 1)
        .map(|i| (y[i + 1] - y[i] * 2.0 + y[i - 1]) * (6.0 / (h * h)))
        .collect();
    let sol = tridiagonal(&off, &diag, &off, rhs);
    m[1..n - 1].copy_from_slice(&sol);
    m
}

fn clamped_second_derivatives(h: f64, y: &[C64], d0: C64, dn: C64) -> Vec<C64> {
    let n = y.len();
    let mut diag = vec![4.0; n];
    diag[0] = 2.0;
    diag[n - 1] = 2.0;
    let off = vec![1.0; n];
    let mut rhs = vec![C64::default(); n];
    rhs[0] = ((y[1] - y[0]) / h - d0) * (6.0 / h);
    rhs[n - 1] = (dn - (y[n - 1] - y[n - 2]) / h) * (6.0 / h);
    for i in 1..n - 1 {
        rhs[i] = (y[i + 1] - y[i] * 2.0 + y[i - 1]) * (6.0 / (h * h));
    }
    tridiagonal(&off, &diag, &off, rhs)
}

/// Thomas algorithm; `lower[i]` multiplies x[i-1], `upper[i]` multiplies x[i+1].
fn tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], mut rhs: Vec<C64>) -> Vec<C64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut b = diag[0];
    c[0] = upper[0] / b;
    rhs[0] /= b;
    for i in 1..n {
        b = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / b;
        let prev = rhs[i - 1];
        rhs[i] = (rhs[i] - prev * lower[i]) / b;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= next * c[i];
    }
    rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_is_fourth_order_with_exact_integral() {
        let f = |x: f64| C64::new((x).sin(), (0.5 * x).cos());
        let fi = |x: f64| C64::new(1.0 - x.cos(), 2.0 * (0.5 * x).sin());
        let err = |h: f64| {
            let n = (4.0 / h).round() as usize + 1;
            let s = Spline::new(h, (0..n).map(|i| f(i as f64 * h)).collect());
            let mut e: f64 = 0.0;
            for k in 0..400 {
                let x = 4.0 * k as f64 / 400.0 + 0.0031;
                e = e.max((s.value(x.min(4.0)) - f(x.min(4.0))).norm());
                e = e.max((s.integral(x.min(4.0)) - fi(x.min(4.0))).norm());
            }
            e
        };
        let (e1, e2) = (err(0.1), err(0.05));
        assert!(e1 < 1e-5, "{e1}");
        assert!(e1 / e2 > 12.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn profile_validation() {
        assert!(Profile::new(Axis::X, 0.1, vec![C64::default(); 3]).is_err());
        assert!(Profile::new(Axis::X, -0.1, vec![C64::default(); 5]).is_err());
        let p = Profile::new(Axis::X, 0.1, vec![C64::from(1.0); 5]).unwrap();
        assert!(p.check_decay().is_err());
    }
}
