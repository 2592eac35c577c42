//! Invariant suites over spectral data and the solve/reconstruct loop shared
//! by the command-line front end and the acceptance tests.

use std::f64::consts::PI;

use crate::contour::{build_contour, im_lambda2_nonneg, im_lambda6_nonneg, ray_direction, ray_of, Contour, Layout, Sector, LAMBDA2_RAYS};
use crate::data::{BoundaryData, InitialData};
use crate::direct::{integrate_mu_x, integrate_mu_y, Columns, TraceKind};
use crate::error::{Error, Result};
use crate::field::FieldGrid;
use crate::formats::Report;
use crate::linalg::{det, inverse, max_abs, Matrix2, C64};
use crate::ode::IntegratorOptions;
use crate::reconstruction::{reconstruct_boundary, reconstruct_u, BoundaryFormula};
use crate::rhp::{assemble_jump, composite_j4, family_phase, jump_coefficients, monodromy, solve_rhp, JumpAssembly, SolverOptions};
use crate::spectral::{alpha, beta, c_plus, s1, s2, s3, sample_set, ResidueData, RhpFamily, SpectralMeta, SpectralSource, SpectralTable};

/// One measured invariant with its limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub limit: f64,
    /// true when `measured` must not exceed `limit`, false when it must reach it.
    pub upper: bool,
    pub samples: usize,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, limit: f64, samples: usize) -> Self {
        Self { name: name.into(), measured, limit, upper: true, samples }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, limit: f64, samples: usize) -> Self {
        Self { name: name.into(), measured, limit, upper: false, samples }
    }

    pub fn pass(&self) -> bool {
        if self.upper {
            self.measured <= self.limit
        } else {
            self.measured >= self.limit
        }
    }

    pub fn report_into(&self, r: &mut Report) {
        r.push(format!("{}.status", self.name), if self.pass() { "pass" } else { "fail" });
        r.num(format!("{}.measured", self.name), self.measured);
        r.num(format!("{}.limit", self.name), self.limit);
        r.push(format!("{}.samples", self.name), self.samples);
    }
}

pub fn checks_report(checks: &[Check]) -> Report {
    let mut r = Report::new();
    for c in checks {
        c.report_into(&mut r);
    }
    let failed = checks.iter().filter(|c| !c.pass()).count();
    r.push("checks", checks.len()).push("failed", failed);
    r
}

/// Running max over samples where every value could be evaluated.
#[derive(Default)]
struct Worst {
    value: f64,
    count: usize,
}

impl Worst {
    fn add(&mut self, v: Result<f64>) -> Result<()> {
        match v {
            Ok(d) => {
                // NaN counts as a failure, not as a skipped sample
                self.value = if d.is_nan() { f64::INFINITY } else { self.value.max(d) };
                self.count += 1;
                Ok(())
            }
            Err(Error::MissingSpectral { .. }) => Ok(()),
            Err(e) => Err(e),
        }
    }
}

/// Spectral table over a twelve-ray contour plus the sector bisectors.
pub fn spectral_table(
    initial: Option<&dyn InitialData>,
    boundary: Option<&dyn BoundaryData>,
    radius: f64,
    nodes_per_ray: usize,
    opts: &IntegratorOptions,
) -> Result<SpectralTable> {
    let contour = build_contour(radius, nodes_per_ray)?;
    let meta = SpectralMeta {
        radius,
        nodes_per_ray,
        ..SpectralMeta::default()
    };
    SpectralTable::build(&sample_set(&contour, true), initial, boundary, meta, opts)
}

type Scalar = fn(&dyn SpectralSource, C64) -> Result<C64>;

fn get_a(s: &dyn SpectralSource, l: C64) -> Result<C64> {
    Ok(s.ab(l)?.0)
}
fn get_b(s: &dyn SpectralSource, l: C64) -> Result<C64> {
    Ok(s.ab(l)?.1)
}
fn get_big_a(s: &dyn SpectralSource, l: C64) -> Result<C64> {
    Ok(s.big_ab(l)?.0)
}
fn get_big_b(s: &dyn SpectralSource, l: C64) -> Result<C64> {
    Ok(s.big_ab(l)?.1)
}

/// a, A, alpha even; b, B, beta, c+ odd. Each lambda is paired with -lambda.
/// Defects are absolute up to |f| = 1 and relative beyond, since c+ carries
/// the weight e^{4 Im(lambda^6) L} and reaches 1e50 on the sector bisectors.
pub fn parity_suite(src: &dyn SpectralSource, lambdas: &[C64]) -> Result<Vec<Check>> {
    let list: [(&str, Scalar, f64); 7] = [
        ("parity.a", get_a, 1.0),
        ("parity.b", get_b, -1.0),
        ("parity.A", get_big_a, 1.0),
        ("parity.B", get_big_b, -1.0),
        ("parity.alpha", alpha, 1.0),
        ("parity.beta", beta, -1.0),
        ("parity.cplus", c_plus, -1.0),
    ];
    let mut out = Vec::new();
    for (name, f, sign) in list {
        let mut w = Worst::default();
        for &l in lambdas {
            w.add(f(src, l).and_then(|v| Ok((f(src, -l)? - v * sign).norm() / v.norm().max(1.0))))?;
        }
        if w.count > 0 {
            out.push(Check::at_most(name, w.value, 1e-10, w.count));
        }
    }
    Ok(out)
}

/// Nodes of `contour` on the given rays.
pub fn nodes_on(contour: &Contour, rays: &[usize]) -> Vec<(usize, C64)> {
    contour
        .rays
        .iter()
        .filter(|r| rays.contains(&r.index))
        .flat_map(|r| r.nodes().map(move |z| (r.index, z)))
        .collect()
}

fn det_defect(m: Result<Matrix2>) -> Result<f64> {
    m.map(|m| (det(&m) - 1.0).norm())
}

/// det S1, S2, S3 and det J of every family at the contour nodes.
pub fn determinant_suite(src: &dyn SpectralSource, contour: &Contour, x: f64, y: f64) -> Result<Vec<Check>> {
    let all: Vec<usize> = (0..12).collect();
    let on_l2 = nodes_on(contour, &LAMBDA2_RAYS);
    let on_all = nodes_on(contour, &all);
    let mut out = Vec::new();
    let mut push = |name: &str, w: Worst| {
        if w.count > 0 {
            out.push(Check::at_most(name, w.value, 1e-8, w.count));
        }
    };
    let mut w = Worst::default();
    for &(_, l) in &on_l2 {
        w.add(det_defect(s1(src, l)))?;
    }
    push("det.S1", w);
    let mut w = Worst::default();
    for &(_, l) in &on_all {
        w.add(det_defect(s2(src, l)))?;
    }
    push("det.S2", w);
    let mut w = Worst::default();
    for &(_, l) in &on_l2 {
        w.add(det_defect(s3(src, l)))?;
    }
    push("det.S3", w);
    for family in [RhpFamily::Principal, RhpFamily::X, RhpFamily::Y, RhpFamily::L] {
        let mut w = Worst::default();
        for &(_, l) in &nodes_on(contour, &family.rays()) {
            w.add(det_defect(assemble_jump(family, src, x, y, l)))?;
        }
        push(&format!("det.J.{}", family.name()), w);
    }
    Ok(out)
}

/// max |det mu - 1| along the axis traces at the given lambdas (both columns
/// are only bounded on the real lines of lambda^2 or lambda^6).
pub fn trace_determinants(
    initial: Option<&dyn InitialData>,
    boundary: Option<&dyn BoundaryData>,
    lambdas: &[C64],
    opts: &IntegratorOptions,
) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    if let Some(d) = initial {
        let mut w = Worst::default();
        for &l in lambdas.iter().filter(|&&l| (l * l).im.abs() < 1e-12 * l.norm_sqr()) {
            for k in [TraceKind::Mu1X, TraceKind::Mu3X] {
                let t = integrate_mu_x(d, l, k, Columns::Both, opts)?;
                w.add(Ok(t.det_drift().unwrap_or(f64::INFINITY)))?;
            }
        }
        if w.count > 0 {
            out.push(Check::at_most("det.mu.x", w.value, 1e-8, w.count));
        }
    }
    if let Some(g) = boundary {
        let mut w = Worst::default();
        for &l in lambdas.iter().filter(|&&l| l.powi(6).im.abs() < 1e-12 * l.norm().powi(6)) {
            for k in [TraceKind::Mu2Y, TraceKind::Mu3Y] {
                let t = integrate_mu_y(g, l, k, Columns::Both, opts)?;
                w.add(Ok(t.det_drift().unwrap_or(f64::INFINITY)))?;
            }
        }
        if w.count > 0 {
            out.push(Check::at_most("det.mu.y", w.value, 1e-8, w.count));
        }
    }
    Ok(out)
}

/// alpha conj(alpha(conj l)) - beta conj(beta(conj l)) = 1 on lambda^2 real.
pub fn unitarity_check(src: &dyn SpectralSource, lambdas: &[C64]) -> Result<Option<Check>> {
    let mut w = Worst::default();
    for &l in lambdas {
        w.add((|| {
            let v = alpha(src, l)? * alpha(src, l.conj())?.conj() - beta(src, l)? * beta(src, l.conj())?.conj();
            Ok((v - 1.0).norm())
        })())?;
    }
    Ok((w.count > 0).then(|| Check::at_most("alpha_beta.unitarity", w.value, 1e-8, w.count)))
}

/// J1(i kappa): Hermitian, positive definite, unit determinant.
pub fn hermitian_checks(src: &dyn SpectralSource, kappas: &[f64], x: f64, y: f64) -> Result<Vec<Check>> {
    let (mut herm, mut detw) = (Worst::default(), Worst::default());
    let mut min_eig = f64::INFINITY;
    for &k in kappas {
        let l = ray_direction(3) * k;
        let j = match assemble_jump(RhpFamily::X, src, x, y, l) {
            Err(Error::MissingSpectral { .. }) => continue,
            r => r?,
        };
        herm.add(Ok(max_abs(&(j.adjoint() - j))))?;
        detw.add(Ok((det(&j) - 1.0).norm()))?;
        // smaller eigenvalue of the Hermitian part
        let (p, q) = (j[(0, 0)].re, j[(1, 1)].re);
        let off = (j[(0, 1)] + j[(1, 0)].conj()) / 2.0;
        let disc = ((p - q) * (p - q) / 4.0 + off.norm_sqr()).sqrt();
        min_eig = min_eig.min((p + q) / 2.0 - disc);
    }
    if herm.count == 0 {
        return Ok(Vec::new());
    }
    let n = herm.count;
    Ok(vec![
        Check::at_most("J1.imag_axis.hermitian", herm.value, 1e-8, n),
        Check::at_least("J1.imag_axis.min_eigenvalue", min_eig, f64::MIN_POSITIVE, n),
        Check::at_most("J1.imag_axis.det", detw.value, 1e-8, n),
    ])
}

/// J(-conj l)^dagger = J(l) at the nodes of every family.
pub fn jump_symmetry_checks(src: &dyn SpectralSource, contour: &Contour, x: f64, y: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for family in [RhpFamily::Principal, RhpFamily::X, RhpFamily::Y, RhpFamily::L] {
        let mut w = Worst::default();
        for &(_, l) in &nodes_on(contour, &family.rays()) {
            w.add((|| {
                let j = assemble_jump(family, src, x, y, l)?;
                let r = assemble_jump(family, src, x, y, -l.conj())?;
                Ok(max_abs(&(r.adjoint() - j)))
            })())?;
        }
        if w.count > 0 {
            out.push(Check::at_most(format!("J.{}.reflection", family.name()), w.value, 1e-8, w.count));
        }
    }
    Ok(out)
}

/// Cyclic product of the principal jumps at radius r.
pub fn monodromy_check(src: &dyn SpectralSource, x: f64, y: f64, r: f64) -> Result<Option<Check>> {
    match monodromy(RhpFamily::Principal, src, x, y, r) {
        Ok(m) => Ok(Some(Check::at_most("J.principal.monodromy", max_abs(&(m - Matrix2::identity())), 1e-6, 12))),
        Err(Error::MissingSpectral { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Composite J4 against J2 J1^{-1} J3 built from the per-ray coefficients,
/// at the lambdas on rays 0, 3, 6, 9 where all three pieces exist.
pub fn j4_check(src: &dyn SpectralSource, lambdas: &[C64], x: f64, y: f64) -> Result<Option<Check>> {
    let mut w = Worst::default();
    for &l in lambdas.iter().filter(|&&l| matches!(ray_of(l), Some(0 | 3 | 6 | 9))) {
        w.add((|| {
            let ph = family_phase(RhpFamily::Principal, l, x, y, src.horizon());
            let piece = |k: usize| jump_coefficients(RhpFamily::Principal, src, k, l).map(|c| c.at_phase(ph));
            let (j1, j2, j3) = (piece(0)?, piece(1)?, piece(4)?);
            Ok(max_abs(&(composite_j4(src, x, y, l)? - j2 * inverse(&j1) * j3)))
        })())?;
    }
    Ok((w.count > 0).then(|| Check::at_most("J4.composite", w.value, 1e-12, w.count)))
}

/// Sectors where a, b and A, B are all defined.
pub const RELATION_SECTORS: [u8; 2] = [1, 3];

/// Global relation on the relevant sectors: |c+| along the two bounding rays
/// and the bisector of each wedge, and |a B - b A| on the bisector at the
/// outermost radius (the vanishing form holds in the open sector).
#[derive(Debug, Clone)]
pub struct RelationChecks {
    pub growth: Check,
    pub outer: Check,
    /// max |a B - b A| over every bisector sample; the incompatibility probe.
    pub interior_residual: f64,
    /// (angle, radius, |a B - b A|, |c+|) for reporting.
    pub samples: Vec<(f64, f64, f64, f64)>,
}

pub fn relation_lines() -> (Vec<f64>, Vec<f64>) {
    let mut rays = Vec::new();
    let mut bisectors = Vec::new();
    for k in RELATION_SECTORS {
        let s = Sector { index: k };
        let (lo, hi) = s.arg_range();
        for shift in [0.0, PI] {
            rays.push(lo + shift);
            rays.push(hi + shift);
            bisectors.push(s.bisector() + shift);
        }
    }
    (rays, bisectors)
}

pub fn relation_checks(src: &dyn SpectralSource, radii: &[f64]) -> Result<RelationChecks> {
    let len = src.horizon();
    let (rays, bisectors) = relation_lines();
    let mut samples = Vec::new();
    let mut growth: f64 = 0.0;
    let mut interior: f64 = 0.0;
    let mut outer: f64 = 0.0;
    let mut lines = 0;
    for (phi, is_bisector) in rays.iter().map(|&p| (p, false)).chain(bisectors.iter().map(|&p| (p, true))) {
        let mut prev: Option<f64> = None;
        for (i, &r) in radii.iter().enumerate() {
            let l = C64::from_polar(r, phi);
            if !(im_lambda2_nonneg(l) && im_lambda6_nonneg(l)) {
                continue;
            }
            let be = match beta(src, l) {
                Err(Error::MissingSpectral { .. }) => continue,
                other => other?.norm(),
            };
            let cp = be * (4.0 * l.powi(6).im * len).exp();
            samples.push((phi, r, be, cp));
            if let Some(p) = prev {
                let g = if cp.is_finite() && p > 0.0 { cp / p } else if cp == 0.0 { 0.0 } else { f64::INFINITY };
                growth = growth.max(g);
            }
            prev = Some(cp);
            if is_bisector {
                interior = interior.max(be);
                if i + 1 == radii.len() {
                    outer = outer.max(be);
                }
            }
        }
        lines += 1;
    }
    Ok(RelationChecks {
        growth: Check::at_most("global_relation.cplus_growth", growth, 2.0, lines),
        outer: Check::at_most("global_relation.outer_residual", outer, 1e-4, bisectors.len()),
        interior_residual: interior,
        samples,
    })
}

/// One RHP solve at (x, y) with its diagnostics.
#[derive(Debug, Clone)]
pub struct PointSolve {
    pub x: f64,
    pub y: f64,
    pub residual: f64,
    pub det_drift: f64,
    pub condition: f64,
    pub normalization: f64,
    pub m1: Matrix2,
}

/// Family chosen from the data present: x-problem for initial data only,
/// y-problem for boundary data only, principal otherwise.
pub fn family_for(table: &SpectralTable) -> Result<RhpFamily> {
    let has_a = table.records.iter().any(|r| r.a.is_some());
    let has_big_a = table.records.iter().any(|r| r.big_a.is_some());
    match (has_a, has_big_a) {
        (true, false) => Ok(RhpFamily::X),
        (false, true) => Ok(RhpFamily::Y),
        (true, true) => Ok(RhpFamily::Principal),
        (false, false) => Err(Error::Validation("table holds neither a, b nor A, B".into())),
    }
}

/// The table's contour restricted to the rays of `family`.
pub fn family_contour(table: &SpectralTable, family: RhpFamily) -> Result<Contour> {
    let n = table.meta.nodes_per_ray;
    Contour::new(&family.rays(), table.meta.radius, Layout::for_nodes(n), n)
}

/// Solves `family` at every point and reconstructs u on the grid xs x ys.
pub struct GridSolve {
    pub points: Vec<PointSolve>,
    pub m: FieldGrid,
    pub u: FieldGrid,
    pub iterations: usize,
}

pub fn solve_grid(
    table: &SpectralTable,
    family: RhpFamily,
    x: (f64, usize),
    y: (f64, usize),
    residues: &ResidueData,
    opts: &SolverOptions,
) -> Result<GridSolve> {
    let (hx, nx) = x;
    let (hy, ny) = y;
    if family == RhpFamily::Y && nx != 1 {
        return Err(Error::Validation("the y-problem lives on x = 0; use a single x point".into()));
    }
    let contour = family_contour(table, family)?;
    let asm = JumpAssembly::new(family, contour, table)?;
    let mut points = Vec::with_capacity(nx * ny);
    let mut m = Vec::with_capacity(nx * ny);
    let mut coeffs = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let (px, py) = (i as f64 * hx, j as f64 * hy);
            let sol = solve_rhp(&asm, residues, px, py, opts)?;
            let c = sol.coefficients(if family == RhpFamily::Y { 5 } else { 1 })?;
            let m1 = c[0];
            if family == RhpFamily::Y {
                coeffs.push([c[0], c[1], c[2], c[3], c[4]]);
            }
            m.push(m1[(0, 1)]);
            points.push(PointSolve {
                x: px,
                y: py,
                residual: sol.residual,
                det_drift: sol.det_drift,
                condition: sol.condition,
                normalization: sol.normalization,
                m1,
            });
        }
    }
    // a single point along an axis has no step; any positive value will do
    let step = |h: f64, n: usize| if n > 1 { h } else { 1.0 };
    let m = FieldGrid::new(step(hx, nx), step(hy, ny), nx, ny, m)?;
    if family == RhpFamily::Y {
        let b = reconstruct_boundary(&coeffs, m.hy, BoundaryFormula::Derived)?;
        return Ok(GridSolve {
            points,
            u: FieldGrid::new(m.hx, m.hy, 1, ny, b.g0.samples)?,
            m,
            iterations: b.iterations,
        });
    }
    let rec = reconstruct_u(&m)?;
    Ok(GridSolve {
        points,
        m,
        u: rec.u,
        iterations: rec.iterations,
    })
}
