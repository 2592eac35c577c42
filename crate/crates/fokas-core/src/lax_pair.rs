//! Lax-pair level objects: U, V, the mu-gauge coefficients N1, N2, the
//! one-form Delta, and finite-difference residual checks on sampled fields.

use crate::error::{Error, Result};
use crate::field::FieldGrid;
use crate::linalg::{Matrix2, C64, I};

/// Pointwise field value with its first two x-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldJet {
    pub u: C64,
    pub u_x: C64,
    pub u_xx: C64,
}

impl FieldJet {
    pub fn new(u: C64, u_x: C64, u_xx: C64) -> Self {
        Self { u, u_x, u_xx }
    }
}

/// Components of Delta = d1 dx + d2 dy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OneFormSample {
    pub d1: C64,
    pub d2: C64,
}

pub fn assemble_u(jet: &FieldJet, lambda: C64) -> Matrix2 {
    let l2 = lambda * lambda;
    let d = -I * l2 - I * jet.u / 2.0;
    Matrix2::new(d, lambda * jet.u, lambda * 2.0, -d)
}

pub fn assemble_v(jet: &FieldJet, lambda: C64) -> Matrix2 {
    let FieldJet { u, u_x, u_xx } = *jet;
    let l = lambda;
    let (l2, l3) = (l * l, l * l * l);
    let (l4, l5) = (l2 * l2, l2 * l3);
    let l6 = l3 * l3;
    let u2 = u * u;
    let u3 = u2 * u;
    let v11 = -I * l6 * 2.0 - I * l4 * u * 2.0 + l2 * (u_x - I * u2) + I * u_xx / 4.0
        + u * u_x * 0.75
        - I * u3 / 4.0;
    let v12 = l5 * u * 2.0 + l3 * (I * u_x + u2) + l * (-u_xx / 2.0 + I * u * u_x * 1.5 + u3 / 2.0);
    let v21 = l5 * 4.0 + l3 * u * 2.0 + l * (I * u_x + u2);
    Matrix2::new(v11, v12, v21, -v11)
}

/// N1 of the x-equation; `gauge` is int_0^x Delta_1.
pub fn assemble_n1(u: C64, gauge: C64, lambda: C64) -> Matrix2 {
    let e = (I * gauge * 2.0).exp();
    Matrix2::new(-I * u, lambda * u / e, lambda * e * 2.0, I * u)
}

/// N2 of the y-equation; `gauge` is int_0^y Delta_2(0, eta) d eta.
pub fn assemble_n2(g0: C64, g1: C64, g2: C64, gauge: C64, lambda: C64) -> Matrix2 {
    let l = lambda;
    let (l2, l3) = (l * l, l * l * l);
    let (l4, l5) = (l2 * l2, l2 * l3);
    let e = (I * gauge * 2.0).exp();
    let g00 = g0 * g0;
    let n11 = -I * l4 * g0 * 2.0 + l2 * (g1 - I * g00) + I * g2 / 2.0 + g0 * g1 * 1.5
        - I * g00 * g0 / 2.0;
    let n12 = (l5 * g0 * 2.0 + l3 * (I * g1 + g00) + l * (-g2 / 2.0 + I * g0 * g1 * 1.5 + g00 * g0 / 2.0)) / e;
    let n21 = (l5 * 4.0 + l3 * g0 * 2.0 + l * (I * g1 + g00)) * e;
    Matrix2::new(n11, n12, n21, -n11)
}

pub fn delta_one_form(jet: &FieldJet) -> OneFormSample {
    let FieldJet { u, u_x, u_xx } = *jet;
    OneFormSample {
        d1: u / 2.0,
        d2: boundary_delta2(u, u_x, u_xx),
    }
}

/// Delta_2 written in the boundary variables (g0, g1, g2).
pub fn boundary_delta2(g0: C64, g1: C64, g2: C64) -> C64 {
    -g2 / 4.0 + I * g0 * g1 * 0.75 + g0 * g0 * g0 / 4.0
}

/// Path integral of Delta from (0, 0) along (0,0) -> (0,y) -> (x,y).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GaugeAccumulator {
    pub value: C64,
}

impl GaugeAccumulator {
    /// Adds the trapezoidal contribution of one path segment.
    pub fn push_segment(&mut self, start: C64, end: C64, length: f64) {
        self.value += (start + end) * (0.5 * length);
    }

    pub fn concat(self, other: GaugeAccumulator) -> GaugeAccumulator {
        GaugeAccumulator {
            value: self.value + other.value,
        }
    }
}

/// Cumulative trapezoidal integral of samples on a uniform grid.
pub fn cumulative_trapezoid(values: &[C64], h: f64) -> Vec<C64> {
    let mut acc = GaugeAccumulator::default();
    let mut out = Vec::with_capacity(values.len());
    out.push(C64::default());
    for w in values.windows(2) {
        acc.push_segment(w[0], w[1], h);
        out.push(acc.value);
    }
    out
}

/// Second-order first derivative with one-sided ends.
pub fn diff1(v: &[C64], h: f64) -> Vec<C64> {
    let n = v.len();
    let mut d = vec![C64::default(); n];
    if n < 3 {
        return d;
    }
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    d[0] = (v[0] * -3.0 + v[1] * 4.0 - v[2]) / (2.0 * h);
    d[n - 1] = (v[n - 1] * 3.0 - v[n - 2] * 4.0 + v[n - 3]) / (2.0 * h);
    d
}

/// Second-order second derivative with one-sided ends.
pub fn diff2(v: &[C64], h: f64) -> Vec<C64> {
    let n = v.len();
    let mut d = vec![C64::default(); n];
    if n < 4 {
        return d;
    }
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i] * 2.0 + v[i - 1]) / (h * h);
    }
    d[0] = (v[0] * 2.0 - v[1] * 5.0 + v[2] * 4.0 - v[3]) / (h * h);
    d[n - 1] = (v[n - 1] * 2.0 - v[n - 2] * 5.0 + v[n - 3] * 4.0 - v[n - 4]) / (h * h);
    d
}

/// Probe spectral parameters for the zero-curvature check.
pub fn probe_lambdas() -> [C64; 4] {
    [
        C64::new(0.7, 0.0),
        C64::new(0.5, 0.5),
        C64::new(0.0, 1.2),
        C64::from_polar(1.1, std::f64::consts::PI / 5.0),
    ]
}

struct Derivatives {
    jets: Vec<FieldJet>,
    u_y: Vec<C64>,
}

fn derivatives(field: &FieldGrid) -> Result<Derivatives> {
    if field.nx < 5 || field.ny < 3 {
        return Err(Error::Validation(format!(
            "residual check needs a grid of at least 5 x 3 points, got {} x {}",
            field.nx, field.ny
        )));
    }
    let mut jets = Vec::with_capacity(field.data.len());
    for j in 0..field.ny {
        let row = field.row(j);
        let dx = diff1(row, field.hx);
        let dxx = diff2(row, field.hx);
        for i in 0..field.nx {
            jets.push(FieldJet::new(row[i], dx[i], dxx[i]));
        }
    }
    let mut u_y = vec![C64::default(); field.data.len()];
    for i in 0..field.nx {
        let col = field.column(i);
        let d = diff1(&col, field.hy);
        for j in 0..field.ny {
            u_y[j * field.nx + i] = d[j];
        }
    }
    Ok(Derivatives { jets, u_y })
}

fn interior(field: &FieldGrid) -> impl Iterator<Item = (usize, usize)> + '_ {
    (1..field.ny - 1).flat_map(move |j| (2..field.nx - 2).map(move |i| (i, j)))
}

/// Max over interior points and probe lambdas of |U_y - V_x + [U, V]|.
pub fn zero_curvature_residual(field: &FieldGrid) -> Result<f64> {
    let d = derivatives(field)?;
    let nx = field.nx;
    let mut worst: f64 = 0.0;
    for lambda in probe_lambdas() {
        for (i, j) in interior(field) {
            let k = j * nx + i;
            let jet = d.jets[k];
            let uy = d.u_y[k];
            let u_y = Matrix2::new(-I * uy / 2.0, lambda * uy, C64::default(), I * uy / 2.0);
            let v_x = (assemble_v(&d.jets[k + 1], lambda) - assemble_v(&d.jets[k - 1], lambda))
                / C64::from(2.0 * field.hx);
            let u = assemble_u(&jet, lambda);
            let v = assemble_v(&jet, lambda);
            let r = u_y - v_x + (u * v - v * u);
            worst = worst.max(crate::linalg::max_abs(&r));
        }
    }
    Ok(worst)
}

fn flux(jet: &FieldJet) -> C64 {
    -jet.u_xx / 2.0 + I * jet.u * jet.u_x * 1.5 + jet.u * jet.u * jet.u / 2.0
}

/// Max of |u_y - (-u_xx/2 + (3i/2) u u_x + u^3/2)_x| over interior points.
pub fn conservation_residual(field: &FieldGrid) -> Result<f64> {
    let d = derivatives(field)?;
    let nx = field.nx;
    let mut worst: f64 = 0.0;
    for (i, j) in interior(field) {
        let k = j * nx + i;
        let fx = (flux(&d.jets[k + 1]) - flux(&d.jets[k - 1])) / (2.0 * field.hx);
        worst = worst.max((d.u_y[k] - fx).norm());
    }
    Ok(worst)
}

/// Max of |d_y Delta_1 - d_x Delta_2| over interior points.
pub fn closedness_residual(field: &FieldGrid) -> Result<f64> {
    let d = derivatives(field)?;
    let nx = field.nx;
    let mut worst: f64 = 0.0;
    for (i, j) in interior(field) {
        let k = j * nx + i;
        let d2 = |m: usize| delta_one_form(&d.jets[m]).d2;
        let dx = (d2(k + 1) - d2(k - 1)) / (2.0 * field.hx);
        worst = worst.max((d.u_y[k] / 2.0 - dx).norm());
    }
    Ok(worst)
}

/// One line of a refinement study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRecord {
    pub step: f64,
    pub residual: f64,
    /// residual(previous, coarser) / residual(this); NaN on the first line.
    pub ratio: f64,
}

/// Evaluates `check` on successively halved subsamplings of a fine field.
///
/// `strides` lists (sx, sy) pairs from coarse to fine.
pub fn refinement_study(
    field: &FieldGrid,
    strides: &[(usize, usize)],
    check: fn(&FieldGrid) -> Result<f64>,
) -> Result<Vec<ResidualRecord>> {
    let mut out: Vec<ResidualRecord> = Vec::new();
    for &(sx, sy) in strides {
        let sub = field.subsample(sx, sy)?;
        let residual = check(&sub)?;
        let ratio = out.last().map_or(f64::NAN, |p| p.residual / residual);
        out.push(ResidualRecord {
            step: sub.hx,
            residual,
            ratio,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, sigma3};

    fn close(a: &Matrix2, b: &Matrix2, tol: f64) -> bool {
        crate::linalg::max_abs(&(a - b)) <= tol
    }

    #[test]
    fn u_examples() {
        let u = assemble_u(&FieldJet::default(), C64::from(1.0));
        assert!(close(&u, &Matrix2::new(c(0.0, -1.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)), 0.0));
        let u = assemble_u(&FieldJet::new(C64::from(2.0), C64::default(), C64::default()), C64::default());
        assert!(close(&u, &Matrix2::new(c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)), 0.0));
    }

    #[test]
    fn v_examples() {
        let v = assemble_v(&FieldJet::default(), C64::from(1.0));
        assert!(close(&v, &Matrix2::new(c(0.0, -2.0), c(0.0, 0.0), c(4.0, 0.0), c(0.0, 2.0)), 0.0));
    }

    #[test]
    fn n_examples() {
        let one = C64::from(1.0);
        let n1 = assemble_n1(C64::default(), c(0.3, 0.1), one);
        let e = (I * c(0.3, 0.1) * 2.0).exp();
        assert!(close(&n1, &Matrix2::new(c(0.0, 0.0), c(0.0, 0.0), e * 2.0, c(0.0, 0.0)), 1e-15));
        let n1 = assemble_n1(one, C64::default(), one);
        assert!(close(&n1, &Matrix2::new(c(0.0, -1.0), one, c(2.0, 0.0), c(0.0, 1.0)), 0.0));
        let z = C64::default();
        let n2 = assemble_n2(z, z, z, z, one);
        assert!(close(&n2, &Matrix2::new(z, z, c(4.0, 0.0), z), 0.0));
        let n2 = assemble_n2(z, z, z, z, I);
        assert!(close(&n2, &Matrix2::new(z, z, c(0.0, 4.0), z), 1e-15));
    }

    #[test]
    fn one_form_examples() {
        let d = delta_one_form(&FieldJet::default());
        assert_eq!(d, OneFormSample::default());
        let d = delta_one_form(&FieldJet::new(C64::from(0.3), C64::default(), C64::default()));
        assert!((d.d1 - 0.15).norm() < 1e-16 && (d.d2 - 0.027 / 4.0).norm() < 1e-16);
    }

    #[test]
    fn v_parity_by_entry() {
        let jet = FieldJet::new(c(0.2, -0.1), c(0.05, 0.3), c(-0.4, 0.2));
        let l = c(0.7, 0.4);
        let s = sigma3();
        assert!(close(&assemble_v(&jet, -l), &(s * assemble_v(&jet, l) * s), 1e-13));
    }

    #[test]
    fn zero_field_residuals_vanish() {
        let f = FieldGrid::new(0.1, 0.1, 8, 5, vec![C64::default(); 40]).unwrap();
        // [U, V] cancels only up to rounding of the lambda powers
        assert!(zero_curvature_residual(&f).unwrap() < 1e-13);
        assert_eq!(conservation_residual(&f).unwrap(), 0.0);
        assert_eq!(closedness_residual(&f).unwrap(), 0.0);
    }

    #[test]
    fn single_frequency_conservation_residual() {
        let eps = 1e-6;
        let h = 1e-3;
        let f = FieldGrid::from_fn(h, h, 9, 5, |x, y| (I * (x + y)).exp() * eps).unwrap();
        let r = conservation_residual(&f).unwrap();
        assert!((r - eps / 2.0).abs() < 0.1 * eps / 2.0, "{r}");
    }
}
