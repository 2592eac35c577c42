//! Finite-difference evolver for u_y + (u_xxx - 3i(u u_x)_x - 3u^2 u_x)/2 = 0.
//!
//! The solve runs on [-x_left, x_max] so the half-line traces at x = 0 are
//! whatever the whole-line solution produces there, which makes (u0, g0, g1, g2)
//! compatible by construction. Fourth-order centred stencils with zero ghost
//! values past both ends, Crank-Nicolson on the third derivative.
//!
//! Two schemes. `Direct` steps u itself with AB2 on the nonlinear terms; the
//! term (3i/2) u u_xx is anti-diffusive wherever Im u > 0, so grid-scale
//! noise grows like exp(1.5 Im u k^2 y) and fine grids eventually blow up.
//! `Linearized` uses u = i phi_x / phi with phi_y = -phi_xxx / 2 and steps
//! chi = phi_x, which is purely dispersive.

use crate::data::InitialData;
use crate::error::{Error, Result};
use crate::field::{Axis, FieldGrid, Profile, Spline};
use crate::linalg::{C64, I};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleParams {
    pub hx: f64,
    pub hy: f64,
    pub x_max: f64,
    /// Length of the extension to the left of x = 0.
    pub x_left: f64,
    /// Keep every n-th y step in the output field.
    pub store_every: usize,
    pub scheme: Scheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Linearized,
    Direct,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Linearized => "linearized",
            Scheme::Direct => "direct",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linearized" => Some(Scheme::Linearized),
            "direct" => Some(Scheme::Direct),
            _ => None,
        }
    }
}

impl Default for OracleParams {
    fn default() -> Self {
        Self {
            hx: 0.05,
            hy: 1e-4,
            x_max: 20.0,
            x_left: 40.0,
            store_every: 100,
            scheme: Scheme::Linearized,
        }
    }
}

/// hy * (explicit-term eigenvalue bound) above which AB2 is refused. Empirical:
/// AB2 amplifies imaginary modes by about (hy lambda)^4 / 4 per step.
const STABILITY_LIMIT: f64 = 0.35;
/// Runtime blow-up guard relative to the initial amplitude.
const GROWTH_LIMIT: f64 = 10.0;
/// Smallest |phi| accepted by the linearized scheme.
const PHI_FLOOR: f64 = 0.1;

/// Exact solution u* = eps exp(i(x - x^2/20) - i y - ((x - c)/w)^2) with
/// the forcing that makes it one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub eps: f64,
    pub center: f64,
    pub width: f64,
}

impl Default for Manufactured {
    fn default() -> Self {
        Self {
            eps: 0.05,
            center: 4.0,
            width: 2.0,
        }
    }
}

impl Manufactured {
    /// (u, u_x, u_xx, u_xxx) at (x, y).
    pub fn jet(&self, x: f64, y: f64) -> [C64; 4] {
        let w2 = self.width * self.width;
        let q = I * (x - x * x / 20.0 - y) - (x - self.center).powi(2) / w2;
        let q1 = I * (1.0 - x / 10.0) - 2.0 * (x - self.center) / w2;
        let q2 = -I / 10.0 - 2.0 / w2;
        let u = q.exp() * self.eps;
        [u, q1 * u, (q2 + q1 * q1) * u, (q1 * q2 * 3.0 + q1 * q1 * q1) * u]
    }

    pub fn value(&self, x: f64, y: f64) -> C64 {
        self.jet(x, y)[0]
    }

    /// F = u*_y - (-u*_xxx/2 + nonlinear(u*)).
    pub fn forcing(&self, x: f64, y: f64) -> C64 {
        let [u, ux, uxx, uxxx] = self.jet(x, y);
        -I * u + uxxx / 2.0 - nonlinear(u, ux, uxx)
    }
}

fn nonlinear(u: C64, ux: C64, uxx: C64) -> C64 {
    I * 1.5 * (ux * ux + u * uxx) + u * u * ux * 1.5
}

/// Banded LU without pivoting; fine for I + (skew band), whose leading
/// minors never vanish.
struct BandLu {
    n: usize,
    k: usize,
    // row-major, width 2k + 1, column offset j - i + k
    a: Vec<C64>,
}

impl BandLu {
    fn new(n: usize, k: usize, entry: impl Fn(usize, isize) -> C64) -> Self {
        let w = 2 * k + 1;
        let mut a = vec![C64::default(); n * w];
        for i in 0..n {
            for d in -(k as isize)..=(k as isize) {
                let j = i as isize + d;
                if j >= 0 && (j as usize) < n {
                    a[i * w + (d + k as isize) as usize] = entry(i, d);
                }
            }
        }
        let mut lu = Self { n, k, a };
        lu.factor();
        lu
    }

    fn at(&mut self, i: usize, j: usize) -> &mut C64 {
        let w = 2 * self.k + 1;
        &mut self.a[i * w + (j + self.k - i)]
    }

    fn factor(&mut self) {
        let (n, k) = (self.n, self.k);
        for p in 0..n {
            let piv = *self.at(p, p);
            for i in p + 1..(p + k + 1).min(n) {
                let l = *self.at(i, p) / piv;
                *self.at(i, p) = l;
                for j in p + 1..(p + k + 1).min(n) {
                    let upj = *self.at(p, j);
                    *self.at(i, j) -= l * upj;
                }
            }
        }
    }

    fn solve(&mut self, b: &mut [C64]) {
        let (n, k) = (self.n, self.k);
        for i in 0..n {
            let lo = i.saturating_sub(k);
            let mut s = b[i];
            for j in lo..i {
                s -= *self.at(i, j) * b[j];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let hi = (i + k + 1).min(n);
            let mut s = b[i];
            for j in i + 1..hi {
                s -= *self.at(i, j) * b[j];
            }
            b[i] = s / *self.at(i, i);
        }
    }
}

const D3: [f64; 7] = [1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0];

fn stencil(u: &[C64], i: usize, off: isize) -> C64 {
    let j = i as isize + off;
    if j < 0 || j as usize >= u.len() {
        C64::default()
    } else {
        u[j as usize]
    }
}

fn third(u: &[C64], i: usize, h: f64) -> C64 {
    let mut s = C64::default();
    for (m, c) in D3.iter().enumerate() {
        s += stencil(u, i, m as isize - 3) * *c;
    }
    s / (8.0 * h * h * h)
}

fn rhs_nonlinear(u: &[C64], h: f64, out: &mut [C64]) {
    for i in 0..u.len() {
        let (m2, m1, p1, p2) = (stencil(u, i, -2), stencil(u, i, -1), stencil(u, i, 1), stencil(u, i, 2));
        let ux = (m2 - m1 * 8.0 + p1 * 8.0 - p2) / (12.0 * h);
        let uxx = (-m2 + m1 * 16.0 - u[i] * 30.0 + p1 * 16.0 - p2) / (12.0 * h * h);
        out[i] = nonlinear(u[i], ux, uxx);
    }
}

fn l2(u: &[C64], h: f64) -> f64 {
    (u.iter().map(|v| v.norm_sqr()).sum::<f64>() * h).sqrt()
}

/// Result of one evolution.
#[derive(Debug, Clone)]
pub struct OracleRun {
    /// u on [0, x_max] x [0, L], every `store_every`-th step.
    pub field: FieldGrid,
    pub steps: usize,
    /// | ||u(L)|| / ||u(0)|| - 1 | over the whole computational line.
    pub l2_drift: f64,
    /// max |u| over the run divided by max |u0|.
    pub growth: f64,
    /// |u0| at x = 0; the extension to x < 0 is smooth only if this is small.
    pub corner_amplitude: f64,
    /// Max error against the manufactured solution, if one was used.
    pub manufactured_error: Option<f64>,
}

fn validate(length: f64, p: &OracleParams) -> Result<(usize, usize, usize)> {
    let positive = [p.hx, p.hy, p.x_max, length];
    if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) || !(p.x_left >= 0.0) || p.store_every == 0 {
        return Err(Error::Validation("oracle steps, domain and horizon must be positive".into()));
    }
    let count = |len: f64, h: f64, what: &str| -> Result<usize> {
        let n = (len / h).round();
        if (n * h - len).abs() > 1e-9 * len.max(1.0) {
            return Err(Error::Validation(format!("{what} = {len} is not a multiple of the step {h}")));
        }
        Ok(n as usize)
    };
    let right = count(p.x_max, p.hx, "x_max")?;
    let left = if p.x_left > 0.0 { count(p.x_left, p.hx, "x_left")? } else { 0 };
    let steps = count(length, p.hy, "L")?;
    if steps % p.store_every != 0 {
        return Err(Error::Validation(format!(
            "store_every = {} does not divide the {steps} y-steps",
            p.store_every
        )));
    }
    if right < 6 {
        return Err(Error::Validation("need at least 6 grid points on x >= 0".into()));
    }
    Ok((left, right, steps))
}

/// Evolves sampled initial data. The profile is zero-extended to x < 0 and
/// past its own extent.
pub fn evolve(u0: &Profile, length: f64, params: &OracleParams) -> Result<OracleRun> {
    u0.check_decay()?;
    let spline = Spline::new(u0.step, u0.samples.clone());
    let extent = spline.extent();
    let f = move |x: f64| if (0.0..=extent).contains(&x) { spline.value(x) } else { C64::default() };
    evolve_fn(&f, length, params, None)
}

/// Evolves initial data given as a function on the whole computational line,
/// optionally with manufactured forcing (then `u0` is ignored and u*(., 0) used).
/// Forcing needs the direct scheme.
pub fn evolve_fn(
    u0: &dyn Fn(f64) -> C64,
    length: f64,
    params: &OracleParams,
    forcing: Option<&Manufactured>,
) -> Result<OracleRun> {
    let (left, right, steps) = validate(length, params)?;
    if forcing.is_some() && params.scheme != Scheme::Direct {
        return Err(Error::Validation("manufactured forcing needs the direct scheme".into()));
    }
    let hx = params.hx;
    let n = left + right + 1;
    let xs: Vec<f64> = (0..n).map(|i| (i as f64 - left as f64) * hx).collect();
    let mut u: Vec<C64> = match forcing {
        Some(m) => xs.iter().map(|&x| m.value(x, 0.0)).collect(),
        None => xs.iter().map(|&x| u0(x)).collect(),
    };
    // closure u = 0 at both ends
    u[0] = C64::default();
    u[n - 1] = C64::default();
    let amp = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let corner_amplitude = u[left].norm();
    let l2_start = l2(&u, hx);
    let grid = Grid { xs, left, right, steps };
    let (rows, last, peak) = match params.scheme {
        Scheme::Direct => direct(u, &grid, params, forcing)?,
        Scheme::Linearized => {
            let mid: Vec<C64> = grid.xs.windows(2).map(|w| u0(0.5 * (w[0] + w[1]))).collect();
            linearized(&u, &mid, &grid, params)?
        }
    };
    let manufactured_error = forcing.map(|mf| {
        let yl = steps as f64 * params.hy;
        last.iter().zip(&grid.xs).map(|(v, &x)| (v - mf.value(x, yl)).norm()).fold(0.0, f64::max)
    });
    let l2_end = l2(&last, hx);
    let field = FieldGrid::new(hx, params.hy * params.store_every as f64, right + 1, steps / params.store_every + 1, rows)?;
    Ok(OracleRun {
        field,
        steps,
        l2_drift: if l2_start > 0.0 { (l2_end / l2_start - 1.0).abs() } else { l2_end },
        growth: if amp > 0.0 { peak / amp } else { 0.0 },
        corner_amplitude,
        manufactured_error,
    })
}

/// One level of a manufactured-solution refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceLevel {
    pub hx: f64,
    pub hy: f64,
    pub error: f64,
    /// error of the previous level over this one.
    pub ratio: Option<f64>,
}

/// Max error against `m` at y = L over `levels` refinements, each halving hx
/// and quartering hy, so a scheme of order four in x and two in y gains a
/// factor 16 per level. Runs the direct scheme and keeps only the last row.
pub fn manufactured_study(base: &OracleParams, length: f64, m: &Manufactured, levels: usize) -> Result<Vec<ConvergenceLevel>> {
    // the closure u = 0 at the ends would otherwise dominate the error
    let tail = m.value(base.x_max, 0.0).norm().max(m.value(-base.x_left, 0.0).norm());
    if tail > 1e-6 * m.eps {
        return Err(Error::Validation(format!(
            "manufactured solution is {tail:e} at the domain ends; enlarge x_max or x_left"
        )));
    }
    let mut out: Vec<ConvergenceLevel> = Vec::with_capacity(levels);
    let zero = |_: f64| C64::default();
    for k in 0..levels {
        let hx = base.hx / f64::powi(2.0, k as i32);
        let hy = base.hy / f64::powi(4.0, k as i32);
        let steps = (length / hy).round() as usize;
        let p = OracleParams {
            hx,
            hy,
            store_every: steps.max(1),
            scheme: Scheme::Direct,
            ..*base
        };
        let error = evolve_fn(&zero, length, &p, Some(m))?
            .manufactured_error
            .unwrap_or(f64::NAN);
        let ratio = out.last().map(|prev| prev.error / error);
        out.push(ConvergenceLevel { hx, hy, error, ratio });
    }
    Ok(out)
}

struct Grid {
    xs: Vec<f64>,
    left: usize,
    right: usize,
    steps: usize,
}

/// (I + c D3) on the interior unknowns 1..n-1, with c = hy / 4.
fn cn_matrix(n: usize, hx: f64, hy: f64) -> BandLu {
    let c = hy / 4.0 / (8.0 * hx * hx * hx);
    BandLu::new(n - 2, 3, |_, d| {
        let diag = if d == 0 { C64::new(1.0, 0.0) } else { C64::default() };
        diag + D3[(d + 3) as usize] * c
    })
}

type Evolution = (Vec<C64>, Vec<C64>, f64);

fn direct(mut u: Vec<C64>, g: &Grid, params: &OracleParams, forcing: Option<&Manufactured>) -> Result<Evolution> {
    let (hx, hy) = (params.hx, params.hy);
    let n = u.len();
    let amp = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let slope = u.windows(2).map(|w| (w[1] - w[0]).norm() / hx).fold(0.0, f64::max);
    let k = std::f64::consts::PI / hx;
    // linearised explicit part: (3i/2) u d_xx + 3i u_x d_x + (3/2) u^2 d_x
    let bound = 1.5 * amp * k * k + 3.0 * slope * k + 1.5 * amp * amp * k;
    if hy * bound > STABILITY_LIMIT {
        return Err(Error::Unstable {
            detail: format!("hy * explicit bound = {:.3} exceeds {STABILITY_LIMIT}", hy * bound),
            suggested_hy: 0.5 * STABILITY_LIMIT / bound,
        });
    }
    let m = n - 2;
    let mut lu = cn_matrix(n, hx, hy);
    let store = params.store_every;
    let mut rows: Vec<C64> = Vec::with_capacity((g.steps / store + 1) * (g.right + 1));
    rows.extend_from_slice(&u[g.left..]);
    let mut n_now = vec![C64::default(); n];
    let mut n_prev = vec![C64::default(); n];
    let mut peak = amp;
    let mut rhs = vec![C64::default(); m];
    let force_at = |y: f64, out: &mut Vec<C64>| {
        if let Some(mf) = forcing {
            out.clear();
            out.extend(g.xs.iter().map(|&x| mf.forcing(x, y)));
        }
    };
    let mut f_now = Vec::new();
    let mut f_next = Vec::new();
    force_at(0.0, &mut f_now);
    for s in 0..g.steps {
        let y = s as f64 * hy;
        rhs_nonlinear(&u, hx, &mut n_now);
        force_at(y + hy, &mut f_next);
        for r in 0..m {
            let i = r + 1;
            // first step is forward Euler on the explicit part
            let ab = if s == 0 { n_now[i] } else { n_now[i] * 1.5 - n_prev[i] * 0.5 };
            let mut v = u[i] - third(&u, i, hx) * (hy / 4.0) + ab * hy;
            if forcing.is_some() {
                v += (f_now[i] + f_next[i]) * (hy / 2.0);
            }
            rhs[r] = v;
        }
        lu.solve(&mut rhs);
        u[1..n - 1].copy_from_slice(&rhs);
        std::mem::swap(&mut n_now, &mut n_prev);
        std::mem::swap(&mut f_now, &mut f_next);
        let top = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !top.is_finite() || (amp > 0.0 && top > GROWTH_LIMIT * amp) {
            return Err(Error::Unstable {
                detail: format!("|u| grew to {top:e} at y = {:.4}", y + hy),
                suggested_hy: hy / 4.0,
            });
        }
        peak = peak.max(top);
        if (s + 1) % store == 0 {
            rows.extend_from_slice(&u[g.left..]);
        }
    }
    Ok((rows, u, peak))
}

/// u = i chi / phi with phi = 1 + int chi from the left end.
fn field_from_chi(chi: &[C64], hx: f64, out: &mut Vec<C64>) -> Result<f64> {
    let spline = Spline::new(hx, chi.to_vec());
    out.clear();
    let mut floor = f64::INFINITY;
    for (i, c) in chi.iter().enumerate() {
        let phi = spline.integral(i as f64 * hx) + 1.0;
        floor = floor.min(phi.norm());
        out.push(I * c / phi);
    }
    if floor < PHI_FLOOR {
        return Err(Error::Envelope(format!(
            "|phi| dropped to {floor:.3e}; u = i phi_x / phi is near a pole"
        )));
    }
    Ok(floor)
}

fn linearized(u: &[C64], mid: &[C64], g: &Grid, params: &OracleParams) -> Result<Evolution> {
    let (hx, hy) = (params.hx, params.hy);
    let n = u.len();
    // phi0 = exp(-i int u0), Simpson on each cell using the midpoint values
    let mut chi = Vec::with_capacity(n);
    let mut acc = C64::default();
    for i in 0..n {
        if i > 0 {
            acc += (u[i - 1] + mid[i - 1] * 4.0 + u[i]) * (hx / 6.0);
        }
        chi.push(-I * u[i] * (-I * acc).exp());
    }
    let m = n - 2;
    let mut lu = cn_matrix(n, hx, hy);
    let store = params.store_every;
    let mut rows: Vec<C64> = Vec::with_capacity((g.steps / store + 1) * (g.right + 1));
    rows.extend_from_slice(&u[g.left..]);
    let mut cur = u.to_vec();
    let mut peak = cur.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut rhs = vec![C64::default(); m];
    for s in 0..g.steps {
        for r in 0..m {
            let i = r + 1;
            rhs[r] = chi[i] - third(&chi, i, hx) * (hy / 4.0);
        }
        lu.solve(&mut rhs);
        chi[1..n - 1].copy_from_slice(&rhs);
        if (s + 1) % store == 0 || s + 1 == g.steps {
            field_from_chi(&chi, hx, &mut cur)?;
            peak = peak.max(cur.iter().map(|v| v.norm()).fold(0.0, f64::max));
            if (s + 1) % store == 0 {
                rows.extend_from_slice(&cur[g.left..]);
            }
        }
    }
    Ok((rows, cur, peak))
}

/// Initial data as a function on the whole line, for `evolve_fn`.
pub fn initial_fn<'a>(data: &'a dyn InitialData) -> impl Fn(f64) -> C64 + 'a {
    move |x| if x >= 0.0 && x <= data.x_max() { data.value(x) } else { C64::default() }
}

/// Slices of an oracle field.
#[derive(Debug, Clone)]
pub struct Traces {
    pub u0: Profile,
    pub g0: Profile,
    pub g1: Profile,
    pub g2: Profile,
    pub h_l: Profile,
}

/// One-sided fourth-order u_x at the first sample.
pub fn one_sided_d1(v: &[C64], h: f64) -> C64 {
    (v[0] * -25.0 + v[1] * 48.0 - v[2] * 36.0 + v[3] * 16.0 - v[4] * 3.0) / (12.0 * h)
}

/// One-sided fourth-order u_xx at the first sample.
pub fn one_sided_d2(v: &[C64], h: f64) -> C64 {
    (v[0] * 45.0 - v[1] * 154.0 + v[2] * 214.0 - v[3] * 156.0 + v[4] * 61.0 - v[5] * 10.0) / (12.0 * h * h)
}

/// One-sided second-order u_xxx at the first sample.
fn one_sided_d3(v: &[C64], h: f64) -> C64 {
    (v[0] * -5.0 + v[1] * 18.0 - v[2] * 24.0 + v[3] * 14.0 - v[4] * 3.0) / (2.0 * h * h * h)
}

pub fn extract_traces(field: &FieldGrid) -> Result<Traces> {
    if field.nx < 6 {
        return Err(Error::Validation(format!(
            "one-sided fourth-order stencils need 6 x-points, got {}",
            field.nx
        )));
    }
    let mut g = [Vec::with_capacity(field.ny), Vec::with_capacity(field.ny), Vec::with_capacity(field.ny)];
    for j in 0..field.ny {
        let row = field.row(j);
        g[0].push(row[0]);
        g[1].push(one_sided_d1(row, field.hx));
        g[2].push(one_sided_d2(row, field.hx));
    }
    let [g0, g1, g2] = g;
    Ok(Traces {
        u0: Profile::new(Axis::X, field.hx, field.row(0).to_vec())?,
        g0: Profile::new(Axis::Y, field.hy, g0)?,
        g1: Profile::new(Axis::Y, field.hy, g1)?,
        g2: Profile::new(Axis::Y, field.hy, g2)?,
        h_l: Profile::new(Axis::X, field.hx, field.row(field.ny - 1).to_vec())?,
    })
}

/// Corner mismatches between initial and boundary data at x = y = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerReport {
    /// |g0(0) - u0(0)|
    pub value: f64,
    /// |g1(0) - u0'(0)|
    pub slope: f64,
    /// |g2(0) - u0''(0)|
    pub curvature: f64,
    /// |g0'(0) - u_y(0, 0)| with u_y from the equation applied to u0.
    pub y_rate: f64,
}

impl CornerReport {
    pub fn max(&self) -> f64 {
        self.value.max(self.slope).max(self.curvature).max(self.y_rate)
    }
}

pub fn compatibility_check(u0: &Profile, g0: &Profile, g1: &Profile, g2: &Profile) -> Result<CornerReport> {
    if u0.len() < 6 || g0.len() < 5 || g1.is_empty() || g2.is_empty() {
        return Err(Error::Validation("corner check needs 6 x-samples and 5 y-samples".into()));
    }
    let v = &u0.samples;
    let h = u0.step;
    let (u, ux, uxx, uxxx) = (v[0], one_sided_d1(v, h), one_sided_d2(v, h), one_sided_d3(v, h));
    let uy = -uxxx / 2.0 + nonlinear(u, ux, uxx);
    let g0y = one_sided_d1(&g0.samples, g0.step);
    Ok(CornerReport {
        value: (g0.samples[0] - u).norm(),
        slope: (g1.samples[0] - ux).norm(),
        curvature: (g2.samples[0] - uxx).norm(),
        y_rate: (g0y - uy).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> OracleParams {
        OracleParams {
            hx: 0.1,
            hy: 1e-3,
            x_max: 10.0,
            x_left: 10.0,
            store_every: 10,
            scheme: Scheme::Direct,
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let run = evolve_fn(&|_| C64::default(), 0.1, &small(), None).unwrap();
        assert!(run.field.data.iter().all(|v| *v == C64::default()));
        let t = extract_traces(&run.field).unwrap();
        assert_eq!(t.g2.max_abs(), 0.0);
    }

    #[test]
    fn band_solver_matches_dense_product() {
        let n = 12;
        let entry = |i: usize, d: isize| C64::new(1.0 + (i as f64) * 0.1 * (d == 0) as i32 as f64, d as f64 * 0.3);
        let mut lu = BandLu::new(n, 3, entry);
        let x: Vec<C64> = (0..n).map(|i| C64::new(i as f64, 1.0 - i as f64 * 0.5)).collect();
        let mut b = vec![C64::default(); n];
        for (i, bi) in b.iter_mut().enumerate() {
            for d in -3isize..=3 {
                let j = i as isize + d;
                if j >= 0 && (j as usize) < n {
                    *bi += entry(i, d) * x[j as usize];
                }
            }
        }
        lu.solve(&mut b);
        for (p, q) in b.iter().zip(&x) {
            assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn refuses_unstable_step() {
        let p = OracleParams { hy: 0.05, store_every: 1, ..small() };
        let e = evolve_fn(&|x| C64::new(0.4 * (-x * x).exp(), 0.0), 0.1, &p, None).unwrap_err();
        match e {
            Error::Unstable { suggested_hy, .. } => assert!(suggested_hy < 0.05),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn corner_shift_is_reported() {
        let u0 = Profile::from_fn(Axis::X, 0.1, 20, |x| C64::new((-x * x).exp() * 0.05, 0.0)).unwrap();
        let g0 = Profile::from_fn(Axis::Y, 0.1, 10, |_| C64::new(0.05 + 0.1, 0.0)).unwrap();
        let z = Profile::from_fn(Axis::Y, 0.1, 10, |_| C64::default()).unwrap();
        let r = compatibility_check(&u0, &g0, &z, &z).unwrap();
        assert!((r.value - 0.1).abs() < 1e-12);
    }

    #[test]
    fn schemes_agree_at_small_amplitude() {
        let u0 = |x: f64| C64::new(0.05 * (-(x - 2.0) * (x - 2.0)).exp(), 0.0);
        let d = evolve_fn(&u0, 0.1, &small(), None).unwrap();
        let p = OracleParams { scheme: Scheme::Linearized, x_left: 30.0, ..small() };
        let l = evolve_fn(&u0, 0.1, &p, None).unwrap();
        let diff = d.field.data.iter().zip(&l.field.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-4, "{diff}");
    }

    #[test]
    fn linearized_refuses_forcing() {
        let p = OracleParams { scheme: Scheme::Linearized, ..small() };
        let e = evolve_fn(&|_| C64::default(), 0.1, &p, Some(&Manufactured::default())).unwrap_err();
        assert!(matches!(e, Error::Validation(_)));
    }

    #[test]
    fn manufactured_study_converges() {
        let base = OracleParams { hx: 0.2, hy: 4e-3, x_max: 12.0, ..small() };
        let levels = manufactured_study(&base, 0.2, &Manufactured::default(), 3).unwrap();
        assert_eq!(levels.len(), 3);
        for l in &levels[1..] {
            let r = l.ratio.unwrap();
            assert!((8.0..32.0).contains(&r), "{levels:?}");
        }
    }
}
