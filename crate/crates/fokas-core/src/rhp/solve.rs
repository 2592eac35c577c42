//! Collocation solve of M_+ = M_- J with M = I + C(M_+ - M_-) + pole terms.

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;

use super::cauchy::PanelSet;
use super::jumps::JumpAssembly;
use crate::contour::{Contour, RAY_COUNT};
use crate::error::{Error, Result};
use crate::linalg::{det, max_abs, sigma3, Matrix2, Vec2, C64};
use crate::spectral::{Pole, ResidueData};

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub residual_tol: f64,
    pub condition_limit: f64,
    /// Use the lambda -> -lambda reduction when the jumps allow it.
    pub use_parity: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-6,
            condition_limit: 1e12,
            use_parity: true,
        }
    }
}

/// Collocation solution of one RHP at a fixed (x, y).
#[derive(Debug, Clone)]
pub struct RhpSolution {
    pub x: f64,
    pub y: f64,
    pub contour: Contour,
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
    /// U = M_+ - M_- at the nodes.
    pub density: Vec<Matrix2>,
    pub m_minus: Vec<Matrix2>,
    pub m_plus: Vec<Matrix2>,
    /// Solved pole terms: residue matrix column `pole.column` equals the vector.
    pub poles: Vec<(Pole, Vec2)>,
    pub residual: f64,
    pub condition: f64,
    pub det_drift: f64,
    /// |M - I| just outside the truncation radius.
    pub normalization: f64,
    pub used_parity: bool,
}

impl RhpSolution {
    /// M at a point off the contour.
    pub fn evaluate(&self, z: C64) -> Matrix2 {
        let panels = PanelSet::new(&self.contour);
        let k = panels.at_targets(&[z]);
        let mut m = Matrix2::identity();
        for (j, u) in self.density.iter().enumerate() {
            m += u * k[(0, j)];
        }
        for (p, v) in &self.poles {
            let col = v / (z - p.location);
            m[(0, p.column - 1)] += col[0];
            m[(1, p.column - 1)] += col[1];
        }
        m
    }

    /// Coefficients m^(1)..m^(order) of M = I + sum m^(j) / lambda^j.
    pub fn coefficients(&self, order: usize) -> Result<Vec<Matrix2>> {
        extract_coefficients(self, order)
    }
}

/// m^(j) = -(1/2 pi i) int s^{j-1} U(s) ds plus the pole contributions.
pub fn extract_coefficients(sol: &RhpSolution, order: usize) -> Result<Vec<Matrix2>> {
    if order == 0 || order > 5 {
        return Err(Error::Unsupported(format!("coefficient order {order} (1..5 supported)")));
    }
    let scale = -C64::new(1.0, 0.0) / (C64::new(0.0, 2.0 * std::f64::consts::PI));
    let mut out = Vec::with_capacity(order);
    for j in 1..=order {
        let mut m = Matrix2::zeros();
        for ((u, &s), &w) in sol.density.iter().zip(&sol.nodes).zip(&sol.weights) {
            m += u * (w * s.powi(j as i32 - 1));
        }
        m *= scale;
        for (p, v) in &sol.poles {
            let t = v * p.location.powi(j as i32 - 1);
            m[(0, p.column - 1)] += t[0];
            m[(1, p.column - 1)] += t[1];
        }
        out.push(m);
    }
    Ok(out)
}

/// Hager-style lower estimate of ||A||_1 ||A^{-1}||_1.
fn condition_estimate(a: &Mat<C64>, lu: &PartialPivLu<C64>) -> f64 {
    let n = a.nrows();
    let norm_a = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut x = Mat::<C64>::from_fn(n, 1, |_, _| C64::new(1.0 / n as f64, 0.0));
    let mut est = 0.0;
    for it in 0..5 {
        let y = lu.solve(&x);
        let ny: f64 = (0..n).map(|i| y[(i, 0)].norm()).sum();
        if it > 0 && ny <= est {
            break;
        }
        est = ny;
        let xi = Mat::<C64>::from_fn(n, 1, |i, _| {
            let v = y[(i, 0)];
            if v.norm() > 0.0 {
                v / v.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        });
        let z = lu.solve_adjoint(&xi);
        let (jmax, zmax) = (0..n)
            .map(|i| (i, z[(i, 0)].norm()))
            .fold((0, 0.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        let ztx: C64 = (0..n).map(|i| z[(i, 0)].conj() * x[(i, 0)]).sum();
        if zmax <= ztx.re {
            break;
        }
        x = Mat::<C64>::zeros(n, 1);
        x[(jmax, 0)] = C64::new(1.0, 0.0);
    }
    norm_a * est
}

struct LinearSolve {
    solution: Vec<C64>,
    residual: f64,
    condition: f64,
}

fn solve_dense(a: Mat<C64>, rhs: &[C64]) -> LinearSolve {
    let n = rhs.len();
    let lu = a.partial_piv_lu();
    let b = Mat::<C64>::from_fn(n, 1, |i, _| rhs[i]);
    let x = lu.solve(&b);
    let ax = &a * &x;
    let scale = rhs.iter().fold(1.0f64, |m, v| m.max(v.norm()));
    let residual = (0..n).map(|i| (ax[(i, 0)] - rhs[i]).norm()).fold(0.0, f64::max) / scale;
    let condition = condition_estimate(&a, &lu);
    LinearSolve {
        solution: (0..n).map(|i| x[(i, 0)]).collect(),
        residual,
        condition,
    }
}

fn finish(
    contour: &Contour,
    x: f64,
    y: f64,
    jt: &[Matrix2],
    density: Vec<Matrix2>,
    m_minus: Vec<Matrix2>,
    poles: Vec<(Pole, Vec2)>,
    residual: f64,
    condition: f64,
    used_parity: bool,
    opts: &SolverOptions,
) -> Result<RhpSolution> {
    if !(condition <= opts.condition_limit) {
        return Err(Error::IllConditioned { estimate: condition });
    }
    let m_plus: Vec<Matrix2> = m_minus.iter().zip(&density).map(|(m, u)| m + u).collect();
    // collocation residual of M_+ = M_- J
    let jump_res = m_plus
        .iter()
        .zip(&m_minus)
        .zip(jt)
        .map(|((p, m), t)| max_abs(&(p - m - m * t)))
        .fold(residual, f64::max);
    if !(jump_res <= opts.residual_tol) {
        return Err(Error::NonConvergence {
            residual: jump_res,
            tolerance: opts.residual_tol,
        });
    }
    let det_drift = m_minus
        .iter()
        .chain(&m_plus)
        .map(|m| (det(m) - 1.0).norm())
        .fold(0.0, f64::max);
    let mut sol = RhpSolution {
        x,
        y,
        contour: contour.clone(),
        nodes: contour.nodes(),
        weights: contour.complex_weights(),
        density,
        m_minus,
        m_plus,
        poles,
        residual: jump_res,
        condition,
        det_drift,
        normalization: 0.0,
        used_parity,
    };
    let probe = C64::from_polar(1.25 * contour.truncation_radius, std::f64::consts::PI / 12.0);
    sol.normalization = max_abs(&(sol.evaluate(probe) - Matrix2::identity()));
    Ok(sol)
}

/// Max |J(-s) - sigma3 J(s) sigma3| over node pairs, or None when the
/// contour is not symmetric.
fn parity_defect(contour: &Contour, jumps: &[Matrix2]) -> Option<f64> {
    if !contour.is_symmetric() {
        return None;
    }
    let n = contour.nodes_per_ray;
    let s3 = sigma3();
    let mut worst: f64 = 0.0;
    for (p, r) in contour.rays.iter().enumerate() {
        let q = contour.ray_position((r.index + 6) % RAY_COUNT)?;
        for i in 0..n {
            let d = jumps[q * n + i] - s3 * jumps[p * n + i] * s3;
            worst = worst.max(max_abs(&d) / max_abs(&jumps[p * n + i]).max(1.0));
        }
    }
    Some(worst)
}

/// Solves the RHP described by `assembly` at (x, y) with optional poles.
pub fn solve_rhp(assembly: &JumpAssembly, residues: &ResidueData, x: f64, y: f64, opts: &SolverOptions) -> Result<RhpSolution> {
    let jumps = assembly.oriented(x, y);
    for (j, z) in jumps.iter().zip(&assembly.nodes) {
        if !j.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::SingularJump {
                culprit: "jump entry",
                value: f64::INFINITY,
                lambda: *z,
            });
        }
    }
    solve_with_jumps(&assembly.contour, &jumps, residues, x, y, assembly.horizon, opts)
}

/// Solves M_+ = M_- J for explicit oriented node jumps.
pub fn solve_with_jumps(
    contour: &Contour,
    jumps: &[Matrix2],
    residues: &ResidueData,
    x: f64,
    y: f64,
    horizon: f64,
    opts: &SolverOptions,
) -> Result<RhpSolution> {
    let jt: Vec<Matrix2> = jumps.iter().map(|j| j - Matrix2::identity()).collect();
    let parity_ok = opts.use_parity
        && residues.is_empty()
        && parity_defect(contour, jumps).is_some_and(|d| d < 1e-10);
    if parity_ok {
        solve_parity(contour, &jt, x, y, opts)
    } else {
        solve_full(contour, &jt, residues, x, y, horizon, opts)
    }
}

fn solve_full(
    contour: &Contour,
    jt: &[Matrix2],
    residues: &ResidueData,
    x: f64,
    y: f64,
    horizon: f64,
    opts: &SolverOptions,
) -> Result<RhpSolution> {
    let panels = PanelSet::new(contour);
    let n = panels.len();
    let mut cm = panels.on_contour();
    for i in 0..n {
        cm[(i, i)] -= C64::new(0.5, 0.0);
    }
    let poles = &residues.poles;
    let np = poles.len();
    let kz = panels.at_targets(&poles.iter().map(|p| p.location).collect::<Vec<_>>());
    let coef: Vec<C64> = poles.iter().map(|p| p.factor(x, y, horizon)).collect();
    let size = 2 * n + np;
    let mut u_rows = [vec![C64::default(); 2 * n], vec![C64::default(); 2 * n]];
    let mut v_rows = [vec![C64::default(); np], vec![C64::default(); np]];
    let (mut residual, mut condition) = (0.0f64, 0.0f64);
    for r in 0..2 {
        let mut a = Mat::<C64>::zeros(size, size);
        let mut rhs = vec![C64::default(); size];
        for c in 0..2 {
            for i in 0..n {
                let row = c * n + i;
                a[(row, row)] += C64::new(1.0, 0.0);
                for d in 0..2 {
                    let t = jt[i][(d, c)];
                    if t == C64::default() {
                        continue;
                    }
                    for j in 0..n {
                        a[(row, d * n + j)] -= t * cm[(i, j)];
                    }
                    for (p, pole) in poles.iter().enumerate() {
                        if pole.column - 1 == d {
                            a[(row, 2 * n + p)] -= t / (panels.nodes[i] - pole.location);
                        }
                    }
                }
                rhs[row] = jt[i][(r, c)];
            }
        }
        for (p, pole) in poles.iter().enumerate() {
            let row = 2 * n + p;
            let t = pole.target - 1;
            a[(row, row)] += C64::new(1.0, 0.0);
            for j in 0..n {
                a[(row, t * n + j)] -= coef[p] * kz[(p, j)];
            }
            for (q, other) in poles.iter().enumerate() {
                if q != p && other.column - 1 == t {
                    a[(row, 2 * n + q)] -= coef[p] / (pole.location - other.location);
                }
            }
            if r == t {
                rhs[row] = coef[p];
            }
        }
        let s = solve_dense(a, &rhs);
        residual = residual.max(s.residual);
        condition = condition.max(s.condition);
        u_rows[r].copy_from_slice(&s.solution[..2 * n]);
        v_rows[r].copy_from_slice(&s.solution[2 * n..]);
    }
    let density: Vec<Matrix2> = (0..n)
        .map(|i| Matrix2::new(u_rows[0][i], u_rows[0][n + i], u_rows[1][i], u_rows[1][n + i]))
        .collect();
    let mut m_minus = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = Matrix2::identity();
        for (j, u) in density.iter().enumerate() {
            m += u * cm[(i, j)];
        }
        for (p, pole) in poles.iter().enumerate() {
            let w = C64::new(1.0, 0.0) / (panels.nodes[i] - pole.location);
            m[(0, pole.column - 1)] += v_rows[0][p] * w;
            m[(1, pole.column - 1)] += v_rows[1][p] * w;
        }
        m_minus.push(m);
    }
    let solved: Vec<(Pole, Vec2)> = poles
        .iter()
        .enumerate()
        .map(|(p, &pole)| (pole, Vec2::new(v_rows[0][p], v_rows[1][p])))
        .collect();
    finish(contour, x, y, jt, density, m_minus, solved, residual, condition, false, opts)
}

/// Reduced solve using U(-s) = sigma3 U(s) sigma3 on a symmetric contour.
fn solve_parity(contour: &Contour, jt: &[Matrix2], x: f64, y: f64, opts: &SolverOptions) -> Result<RhpSolution> {
    let npr = contour.nodes_per_ray;
    let half_rays: Vec<usize> = contour.ray_indices().into_iter().filter(|&k| k < 6).collect();
    let half = Contour::new(&half_rays, contour.truncation_radius, contour.layout, npr)?;
    let panels = PanelSet::new(&half);
    let n = panels.len();
    // node i of the half contour -> node index in the full contour
    let full_index = |i: usize| -> usize {
        let k = half_rays[i / npr];
        contour.ray_position(k).expect("half ray present") * npr + i % npr
    };
    let partner = |i: usize| -> usize {
        let k = (half_rays[i / npr] + 6) % RAY_COUNT;
        contour.ray_position(k).expect("symmetric contour") * npr + i % npr
    };
    let jt_half: Vec<Matrix2> = (0..n).map(|i| jt[full_index(i)]).collect();
    let mut cm = panels.on_contour();
    for i in 0..n {
        cm[(i, i)] -= C64::new(0.5, 0.0);
    }
    let reflected: Vec<C64> = panels.nodes.iter().map(|&z| -z).collect();
    let kr = panels.at_targets(&reflected);
    let mut u_rows = [vec![C64::default(); 2 * n], vec![C64::default(); 2 * n]];
    let (mut residual, mut condition) = (0.0f64, 0.0f64);
    for r in 0..2 {
        let mut a = Mat::<C64>::zeros(2 * n, 2 * n);
        let mut rhs = vec![C64::default(); 2 * n];
        for c in 0..2 {
            for i in 0..n {
                let row = c * n + i;
                a[(row, row)] += C64::new(1.0, 0.0);
                for d in 0..2 {
                    let t = jt_half[i][(d, c)];
                    if t == C64::default() {
                        continue;
                    }
                    let sgn = if r == d { 1.0 } else { -1.0 };
                    for j in 0..n {
                        a[(row, d * n + j)] -= t * (cm[(i, j)] + kr[(i, j)] * sgn);
                    }
                }
                rhs[row] = jt_half[i][(r, c)];
            }
        }
        let s = solve_dense(a, &rhs);
        residual = residual.max(s.residual);
        condition = condition.max(s.condition);
        u_rows[r].copy_from_slice(&s.solution);
    }
    let s3 = sigma3();
    let u_half: Vec<Matrix2> = (0..n)
        .map(|i| Matrix2::new(u_rows[0][i], u_rows[0][n + i], u_rows[1][i], u_rows[1][n + i]))
        .collect();
    let mut m_half = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = Matrix2::identity();
        for (j, u) in u_half.iter().enumerate() {
            let refl = s3 * u * s3;
            m += u * cm[(i, j)] + refl * kr[(i, j)];
        }
        m_half.push(m);
    }
    let total = contour.node_count();
    let mut density = vec![Matrix2::zeros(); total];
    let mut m_minus = vec![Matrix2::zeros(); total];
    for i in 0..n {
        density[full_index(i)] = u_half[i];
        m_minus[full_index(i)] = m_half[i];
        density[partner(i)] = s3 * u_half[i] * s3;
        m_minus[partner(i)] = s3 * m_half[i] * s3;
    }
    finish(contour, x, y, jt, density, m_minus, Vec::new(), residual, condition, true, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{build_contour, ray_direction};
    use std::f64::consts::PI;

    fn log_d(k: usize, s: f64, c: &[C64; 12]) -> C64 {
        c[k] * s * s * (-s * s).exp()
    }

    fn diagonal(contour: &Contour, c: &[C64; 12]) -> Vec<Matrix2> {
        let mut out = Vec::new();
        for r in &contour.rays {
            for &s in &r.radii {
                let l = log_d(r.index, s, c);
                out.push(Matrix2::new(l.exp(), C64::default(), C64::default(), (-l).exp()));
            }
        }
        out
    }

    /// (1/2 pi i) int log d(s) / (s - z) ds by composite Simpson on each ray.
    fn brute_cauchy(z: C64, radius: f64, c: &[C64; 12]) -> C64 {
        let n = 40_000;
        let h = radius / n as f64;
        let mut total = C64::default();
        for k in 0..12 {
            let e = ray_direction(k);
            let f = |s: f64| log_d(k, s, c) / (e * s - z) * e;
            let mut acc = f(0.0) + f(radius);
            for i in 1..n {
                acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            total += acc * (h / 3.0);
        }
        total / (C64::new(0.0, 2.0 * PI))
    }

    fn coefficients(symmetric: bool) -> [C64; 12] {
        std::array::from_fn(|k| {
            let j = if symmetric { k % 6 } else { k };
            C64::from_polar(0.3 + 0.05 * j as f64, 0.4 * j as f64)
        })
    }

    #[test]
    fn identity_jumps_give_identity() {
        let contour = build_contour(4.0, 24).unwrap();
        let jumps = vec![Matrix2::identity(); contour.node_count()];
        let opts = SolverOptions { use_parity: false, ..Default::default() };
        let sol = solve_with_jumps(&contour, &jumps, &ResidueData::default(), 0.0, 0.0, 0.0, &opts).unwrap();
        assert!(sol.density.iter().all(|u| max_abs(u) == 0.0));
        let m = sol.coefficients(5).unwrap();
        assert!(m.iter().all(|c| max_abs(c) == 0.0));
    }

    #[test]
    fn scalar_diagonal_matches_closed_form() {
        let radius = 6.0;
        let c = coefficients(false);
        let contour = build_contour(radius, 48).unwrap();
        let jumps = diagonal(&contour, &c);
        let sol = solve_with_jumps(&contour, &jumps, &ResidueData::default(), 0.0, 0.0, 0.0, &SolverOptions::default()).unwrap();
        assert!(!sol.used_parity);
        // int_0^inf s^2 e^{-s^2} ds = sqrt(pi) / 4
        let moment: C64 = (0..12).map(|k| c[k] * ray_direction(k)).sum::<C64>() * (PI.sqrt() / 4.0);
        let m1 = -moment / C64::new(0.0, 2.0 * PI);
        let m = sol.coefficients(1).unwrap()[0];
        assert!((m[(0, 0)] - m1).norm() < 1e-6, "{} vs {m1}", m[(0, 0)]);
        assert!((m[(1, 1)] + m1).norm() < 1e-6);
        assert!(m[(0, 1)].norm() < 1e-12 && m[(1, 0)].norm() < 1e-12);
        for z in [C64::new(0.7, 0.2), C64::new(-1.1, 0.9), C64::new(0.3, -1.7)] {
            let cz = brute_cauchy(z, radius, &c);
            let mz = sol.evaluate(z);
            assert!((mz[(0, 0)] - cz.exp()).norm() < 1e-6, "{z}");
            assert!((mz[(1, 1)] - (-cz).exp()).norm() < 1e-6, "{z}");
        }
    }

    #[test]
    fn parity_solve_agrees_with_full_solve() {
        let c = coefficients(true);
        let contour = build_contour(6.0, 24).unwrap();
        let mut jumps = diagonal(&contour, &c);
        // off-diagonal entries that respect J(-s) = sigma3 J(s) sigma3
        let n = contour.nodes_per_ray;
        for (p, r) in contour.rays.iter().enumerate() {
            let sign = if r.index < 6 { 1.0 } else { -1.0 };
            for (i, &s) in r.radii.iter().enumerate() {
                let w = C64::new(0.1, 0.05) * sign * s * (-s * s).exp();
                let j = &mut jumps[p * n + i];
                j[(0, 1)] = w;
            }
        }
        let reduced = solve_with_jumps(&contour, &jumps, &ResidueData::default(), 0.0, 0.0, 0.0, &SolverOptions::default()).unwrap();
        let opts = SolverOptions { use_parity: false, ..Default::default() };
        let full = solve_with_jumps(&contour, &jumps, &ResidueData::default(), 0.0, 0.0, 0.0, &opts).unwrap();
        assert!(reduced.used_parity && !full.used_parity);
        let a = reduced.coefficients(3).unwrap();
        let b = full.coefficients(3).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!(max_abs(&(p - q)) < 1e-10);
        }
    }
}
