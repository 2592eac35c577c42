//! Eigenfunctions along the axes and the spectral functions a, b, A, B.
//!
//! Each column of mu solves a linear 2-vector ODE obtained from
//! mu_s + i w(lambda) [sigma3, mu] = N mu, with w = lambda^2 on the x-axis
//! and w = 2 lambda^6 on the y-axis.

use crate::contour::{im_lambda2_nonneg, im_lambda2_nonpos, im_lambda6_nonneg, im_lambda6_nonpos};
use crate::data::{BoundaryData, InitialData, StepData};
use crate::error::{Error, Result};
use crate::lax_pair::{assemble_n1, assemble_n2, assemble_u, FieldJet};
use crate::linalg::{det, expm_tracefree, Matrix2, Vec2, C64, I};
use crate::ode::{integrate_column, IntegratorOptions, OdeFailure};

/// Which eigenfunction a trace belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    /// mu_1 on y = 0, normalized at x = X_max.
    Mu1X,
    /// mu_3 on y = 0, normalized at x = 0.
    Mu3X,
    /// mu_2 on x = 0, normalized at y = L.
    Mu2Y,
    /// mu_3 on x = 0, normalized at y = 0.
    Mu3Y,
}

impl TraceKind {
    pub fn name(&self) -> &'static str {
        match self {
            TraceKind::Mu1X => "mu1(x,0)",
            TraceKind::Mu3X => "mu3(x,0)",
            TraceKind::Mu2Y => "mu2(0,y)",
            TraceKind::Mu3Y => "mu3(0,y)",
        }
    }

    /// Whether column `col` (1 or 2) stays bounded at lambda.
    pub fn column_bounded(&self, col: usize, lambda: C64) -> bool {
        let (up, down) = match self {
            TraceKind::Mu1X => (im_lambda2_nonpos(lambda), im_lambda2_nonneg(lambda)),
            TraceKind::Mu3X => (im_lambda2_nonneg(lambda), im_lambda2_nonpos(lambda)),
            TraceKind::Mu2Y => (im_lambda6_nonpos(lambda), im_lambda6_nonneg(lambda)),
            TraceKind::Mu3Y => (im_lambda6_nonneg(lambda), im_lambda6_nonpos(lambda)),
        };
        if col == 1 {
            up
        } else {
            down
        }
    }

    fn backward(&self) -> bool {
        matches!(self, TraceKind::Mu1X | TraceKind::Mu2Y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Columns {
    First,
    Second,
    Both,
}

impl Columns {
    fn list(&self) -> &'static [usize] {
        match self {
            Columns::First => &[1],
            Columns::Second => &[2],
            Columns::Both => &[1, 2],
        }
    }
}

/// Samples of one eigenfunction along an axis grid (ascending).
#[derive(Debug, Clone)]
pub struct EigenfunctionTrace {
    pub which: TraceKind,
    pub lambda: C64,
    pub grid: Vec<f64>,
    pub first: Option<Vec<Vec2>>,
    pub second: Option<Vec<Vec2>>,
}

impl EigenfunctionTrace {
    /// Full matrix at grid index i when both columns were integrated.
    pub fn matrix(&self, i: usize) -> Option<Matrix2> {
        let (c1, c2) = (self.first.as_ref()?, self.second.as_ref()?);
        Some(Matrix2::from_columns(&[c1[i], c2[i]]))
    }

    /// max |det mu - 1| over the grid, if both columns are present.
    pub fn det_drift(&self) -> Option<f64> {
        (0..self.grid.len())
            .map(|i| self.matrix(i).map(|m| (det(&m) - 1.0).norm()))
            .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
    }
}

fn stiffness(lambda: C64, f: OdeFailure) -> Error {
    Error::Stiffness {
        modulus: lambda.norm(),
        at: f.at,
        detail: f.detail,
    }
}

/// Column system matrix: diag of the commutator term plus N.
fn column_matrix(n: Matrix2, w: C64, col: usize) -> Matrix2 {
    let mut a = n;
    if col == 1 {
        a[(1, 1)] += I * w * 2.0;
    } else {
        a[(0, 0)] -= I * w * 2.0;
    }
    a
}

fn unit(col: usize) -> [C64; 2] {
    if col == 1 {
        [C64::new(1.0, 0.0), C64::default()]
    } else {
        [C64::default(), C64::new(1.0, 0.0)]
    }
}

fn merge_path(grid: &[f64], breaks: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut p: Vec<f64> = grid
        .iter()
        .chain(breaks)
        .copied()
        .filter(|&s| s >= lo && s <= hi)
        .chain([lo, hi])
        .collect();
    p.sort_by(f64::total_cmp);
    p.dedup();
    p
}

fn check_columns(which: TraceKind, lambda: C64, cols: Columns) -> Result<()> {
    for &c in cols.list() {
        if !which.column_bounded(c, lambda) {
            return Err(Error::UnboundedColumn {
                which: which.name(),
                column: c,
                lambda,
            });
        }
    }
    Ok(())
}

/// Integrates `cols` of the system over `path` (ascending), starting from
/// the identity at the normalization end. Returns ascending-order samples.
fn run_columns<F>(
    coef: F,
    w: C64,
    path: &[f64],
    backward: bool,
    cols: Columns,
    lambda: C64,
    opts: &IntegratorOptions,
) -> Result<[Option<Vec<Vec2>>; 2]>
where
    F: Fn(f64) -> Matrix2,
{
    let mut out: [Option<Vec<Vec2>>; 2] = [None, None];
    for &c in cols.list() {
        let f = |s: f64| column_matrix(coef(s), w, c);
        let mut p = path.to_vec();
        if backward {
            p.reverse();
        }
        let mut vals = integrate_column(&f, &p, unit(c), opts).map_err(|e| stiffness(lambda, e))?;
        if backward {
            vals.reverse();
        }
        out[c - 1] = Some(vals.into_iter().map(|v| Vec2::new(v[0], v[1])).collect());
    }
    Ok(out)
}

fn x_coef<'a>(data: &'a dyn InitialData, lambda: C64) -> impl Fn(f64) -> Matrix2 + 'a {
    move |x| assemble_n1(data.value(x), data.gauge(x), lambda)
}

fn y_coef<'a>(data: &'a dyn BoundaryData, lambda: C64) -> impl Fn(f64) -> Matrix2 + 'a {
    move |y| {
        let (g0, g1, g2) = data.values(y);
        assemble_n2(g0, g1, g2, data.gauge(y), lambda)
    }
}

pub fn integrate_mu_x(
    data: &dyn InitialData,
    lambda: C64,
    which: TraceKind,
    cols: Columns,
    opts: &IntegratorOptions,
) -> Result<EigenfunctionTrace> {
    if !matches!(which, TraceKind::Mu1X | TraceKind::Mu3X) {
        return Err(Error::Validation(format!("{} is not an x-trace", which.name())));
    }
    check_columns(which, lambda, cols)?;
    let path = merge_path(&data.grid(), &data.breakpoints(), 0.0, data.x_max());
    let [first, second] = run_columns(x_coef(data, lambda), lambda * lambda, &path, which.backward(), cols, lambda, opts)?;
    Ok(EigenfunctionTrace {
        which,
        lambda,
        grid: path,
        first,
        second,
    })
}

pub fn integrate_mu_y(
    data: &dyn BoundaryData,
    lambda: C64,
    which: TraceKind,
    cols: Columns,
    opts: &IntegratorOptions,
) -> Result<EigenfunctionTrace> {
    if !matches!(which, TraceKind::Mu2Y | TraceKind::Mu3Y) {
        return Err(Error::Validation(format!("{} is not a y-trace", which.name())));
    }
    check_columns(which, lambda, cols)?;
    let path = merge_path(&data.grid(), &data.breakpoints(), 0.0, data.length());
    let w = lambda.powi(6) * 2.0;
    let [first, second] = run_columns(y_coef(data, lambda), w, &path, which.backward(), cols, lambda, opts)?;
    Ok(EigenfunctionTrace {
        which,
        lambda,
        grid: path,
        first,
        second,
    })
}

/// Integrates a single column between the two ends of an axis and returns
/// its value at the far end.
fn column_endpoint<F>(coef: F, w: C64, path: &[f64], col: usize, lambda: C64, opts: &IntegratorOptions) -> Result<Vec2>
where
    F: Fn(f64) -> Matrix2,
{
    let f = |s: f64| column_matrix(coef(s), w, col);
    let v = integrate_column(&f, path, unit(col), opts).map_err(|e| stiffness(lambda, e))?;
    let last = v.last().expect("path has at least two points");
    Ok(Vec2::new(last[0], last[1]))
}

/// (a, b) at one lambda with Im lambda^2 >= 0: (b, a) is the second column of mu_1(0, 0).
pub fn spectral_ab(data: &dyn InitialData, lambda: C64, opts: &IntegratorOptions) -> Result<(C64, C64)> {
    check_columns(TraceKind::Mu1X, lambda, Columns::Second)?;
    let mut path = merge_path(&[], &data.breakpoints(), 0.0, data.x_max());
    path.reverse();
    let v = column_endpoint(x_coef(data, lambda), lambda * lambda, &path, 2, lambda, opts)?;
    Ok((v[1], v[0]))
}

pub fn compute_ab(data: &dyn InitialData, lambdas: &[C64], opts: &IntegratorOptions) -> Result<Vec<(C64, C64)>> {
    lambdas.iter().map(|&l| spectral_ab(data, l, opts)).collect()
}

/// How A and B are extracted from the boundary eigenfunctions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbRoute {
    /// (B, A) = second column of mu_2(0, 0); needs Im lambda^6 >= 0.
    Mu2,
    /// A = mu_3^11(0, L), B = -e^{4i lambda^6 L} mu_3^12(0, L); needs lambda^6 real.
    Mu3,
}

pub fn spectral_big_ab(data: &dyn BoundaryData, lambda: C64, route: AbRoute, opts: &IntegratorOptions) -> Result<(C64, C64)> {
    let l6 = lambda.powi(6);
    let w = l6 * 2.0;
    let len = data.length();
    let forward = merge_path(&[], &data.breakpoints(), 0.0, len);
    let backward: Vec<f64> = forward.iter().rev().copied().collect();
    match route {
        AbRoute::Mu2 => {
            check_columns(TraceKind::Mu2Y, lambda, Columns::Second)?;
            let v = column_endpoint(y_coef(data, lambda), w, &backward, 2, lambda, opts)?;
            Ok((v[1], v[0]))
        }
        AbRoute::Mu3 => {
            check_columns(TraceKind::Mu3Y, lambda, Columns::Both)?;
            let c1 = column_endpoint(y_coef(data, lambda), w, &forward, 1, lambda, opts)?;
            let c2 = column_endpoint(y_coef(data, lambda), w, &forward, 2, lambda, opts)?;
            let big_a = c1[0];
            let big_b = -(I * l6 * (4.0 * len)).exp() * c2[0];
            Ok((big_a, big_b))
        }
    }
}

pub fn compute_big_ab(
    data: &dyn BoundaryData,
    lambdas: &[C64],
    route: AbRoute,
    opts: &IntegratorOptions,
) -> Result<Vec<(C64, C64)>> {
    lambdas.iter().map(|&l| spectral_big_ab(data, l, route, opts)).collect()
}

/// Exact (a, b) for piecewise-constant u0 from products of matrix exponentials of U.
pub fn oracle_ab_piecewise_constant(steps: &StepData, lambda: C64) -> (C64, C64) {
    // Pieces covering [0, X] in order, zero where no step is given.
    let mut pieces: Vec<(f64, C64)> = Vec::new();
    let mut at = 0.0;
    for &(s, e, v) in steps.steps() {
        if s > at {
            pieces.push((s - at, C64::default()));
        }
        pieces.push((e - s, v));
        at = e;
    }
    let x_end = at;
    // psi_1(0) = P^{-1} psi_1(X), P^{-1} = exp(-U_1 d_1) ... exp(-U_n d_n)
    let mut p_inv = Matrix2::identity();
    for &(d, v) in &pieces {
        let u = assemble_u(&FieldJet::new(v, C64::default(), C64::default()), lambda);
        p_inv *= expm_tracefree(&u, -d);
    }
    let phi = pieces.iter().map(|&(d, v)| v * d).sum::<C64>() / 2.0;
    let k = I * (phi - lambda * lambda * x_end);
    // second column of e^{i phi sigma3} e^{-i lambda^2 X sigma3}
    let col = p_inv * Vec2::new(C64::default(), (-k).exp());
    (col[1], col[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ZeroInitial;
    use crate::linalg::c;

    fn opts() -> IntegratorOptions {
        IntegratorOptions::default()
    }

    #[test]
    fn zero_data_gives_trivial_ab() {
        let z = ZeroInitial { x_max: 5.0 };
        for l in [c(1.0, 0.0), c(0.3, 0.4), c(0.0, 2.0)] {
            let (a, b) = spectral_ab(&z, l, &opts()).unwrap();
            assert_eq!(a, c(1.0, 0.0));
            assert_eq!(b, C64::default());
        }
    }

    #[test]
    fn unbounded_column_rejected() {
        let z = ZeroInitial { x_max: 5.0 };
        let err = spectral_ab(&z, c(1.0, -0.5), &opts()).unwrap_err();
        assert!(matches!(err, Error::UnboundedColumn { column: 2, .. }));
    }

    #[test]
    fn zero_data_mu3_matches_exponential() {
        // u0 = 0: column 1 of mu3 solves v' = [[0,0],[2 lambda, 2i lambda^2]] v.
        let z = ZeroInitial { x_max: 3.0 };
        let l = c(0.8, 0.3);
        let t = integrate_mu_x(&z, l, TraceKind::Mu3X, Columns::First, &opts()).unwrap();
        let a = Matrix2::new(-I * l * l, C64::default(), l * 2.0, I * l * l);
        let first = t.first.unwrap();
        for (i, &x) in t.grid.iter().enumerate() {
            // exp(x A) conjugated back from the traceless shift
            let e = expm_tracefree(&a, x) * (I * l * l * x).exp();
            assert!((first[i][1] - e[(1, 0)]).norm() < 1e-9);
            assert!((first[i][0] - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn oracle_zero_steps() {
        let s = StepData::new(vec![], 3.0).unwrap();
        let (a, b) = oracle_ab_piecewise_constant(&s, c(1.0, 0.5));
        assert!((a - 1.0).norm() < 1e-14 && b.norm() < 1e-14);
    }

    #[test]
    fn step_data_matches_oracle() {
        // global error at the default rtol is ~1e-8; tighten for the 1e-8 check
        let tight = IntegratorOptions {
            rtol: 1e-12,
            atol: 1e-14,
            ..Default::default()
        };
        let s = StepData::new(vec![(0.0, 1.0, c(0.1, 0.0))], 2.0).unwrap();
        for l in [c(1.0, 0.0), c(1.0, 0.5), c(0.0, 2.0), C64::from_polar(1.0, 0.2618)] {
            let (a, b) = spectral_ab(&s, l, &tight).unwrap();
            let (ao, bo) = oracle_ab_piecewise_constant(&s, l);
            assert!((a - ao).norm() < 1e-8, "{l}: {a} vs {ao}");
            assert!((b - bo).norm() < 1e-8, "{l}: {b} vs {bo}");
        }
    }
}
