//! Field values from RHP coefficients: u from m_12^(1), the boundary traces
//! from m^(1)..m^(5) of the y-problem, and the final slice h_L.

use crate::error::{Error, Result};
use crate::field::{Axis, FieldGrid, Profile};
use crate::lax_pair::{boundary_delta2, cumulative_trapezoid, diff1, diff2};
use crate::linalg::{Matrix2, C64, I};

const TOL: f64 = 1e-10;
const MAX_ITER: usize = 50;

/// Reconstructed field with fixed-point diagnostics.
#[derive(Debug, Clone)]
pub struct ReconstructionField {
    pub u: FieldGrid,
    /// int Delta along (0,0) -> (0,y) -> (x,y).
    pub gauge: FieldGrid,
    pub iterations: usize,
    /// max | |u| - 2|m| e^{-2 Im gauge} |
    pub modulus_defect: f64,
}

/// Gauge integral for a field guess: Delta_2 on the x = 0 column, then Delta_1 along rows.
fn gauge_of(u: &FieldGrid) -> Vec<C64> {
    let (nx, ny) = (u.nx, u.ny);
    let mut d2 = vec![C64::default(); ny];
    if nx >= 3 {
        for (j, d) in d2.iter_mut().enumerate() {
            let row = u.row(j);
            let ux = diff1(row, u.hx);
            let uxx = diff2(row, u.hx);
            *d = boundary_delta2(row[0], ux[0], uxx[0]);
        }
    }
    let col = if ny > 1 { cumulative_trapezoid(&d2, u.hy) } else { vec![C64::default()] };
    let mut g = vec![C64::default(); nx * ny];
    for j in 0..ny {
        let half: Vec<C64> = u.row(j).iter().map(|v| v / 2.0).collect();
        let along = cumulative_trapezoid(&half, u.hx);
        for i in 0..nx {
            g[j * nx + i] = col[j] + along[i];
        }
    }
    g
}

/// Damped fixed point u = 2i m e^{2i int Delta(u)}.
pub fn reconstruct_u(m: &FieldGrid) -> Result<ReconstructionField> {
    let two_i = I * 2.0;
    let mut u = FieldGrid::new(m.hx, m.hy, m.nx, m.ny, m.data.iter().map(|v| two_i * v).collect())?;
    let mut last_update = f64::INFINITY;
    let mut damping = 1.0;
    for it in 1..=MAX_ITER {
        let g = gauge_of(&u);
        let next: Vec<C64> = m.data.iter().zip(&g).map(|(mv, gv)| two_i * mv * (two_i * gv).exp()).collect();
        let update = next.iter().zip(&u.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if !update.is_finite() {
            return Err(Error::Divergence { iterations: it, update });
        }
        if update > last_update {
            damping = 0.5;
        }
        for (cur, nv) in u.data.iter_mut().zip(&next) {
            *cur += (nv - *cur) * damping;
        }
        if update < TOL {
            let g = gauge_of(&u);
            let modulus_defect = u
                .data
                .iter()
                .zip(&m.data)
                .zip(&g)
                .map(|((uv, mv), gv)| (uv.norm() - 2.0 * mv.norm() * (-2.0 * gv.im).exp()).abs())
                .fold(0.0, f64::max);
            return Ok(ReconstructionField {
                gauge: FieldGrid::new(m.hx, m.hy, m.nx, m.ny, g)?,
                u,
                iterations: it,
                modulus_defect,
            });
        }
        last_update = update;
    }
    Err(Error::Divergence {
        iterations: MAX_ITER,
        update: last_update,
    })
}

/// Max |u_x - i u_y - 2 mbar_21| over interior points (diagnostic only).
pub fn consistency_gradient(u: &FieldGrid, mbar21: &FieldGrid) -> Result<f64> {
    if u.nx != mbar21.nx || u.ny != mbar21.ny {
        return Err(Error::Validation("field and coefficient grids differ".into()));
    }
    if u.nx < 3 || u.ny < 3 {
        return Err(Error::Validation("consistency check needs at least 3 x 3 points".into()));
    }
    let mut worst: f64 = 0.0;
    for j in 1..u.ny - 1 {
        for i in 1..u.nx - 1 {
            let ux = (u.at(i + 1, j) - u.at(i - 1, j)) / (2.0 * u.hx);
            let uy = (u.at(i, j + 1) - u.at(i, j - 1)) / (2.0 * u.hy);
            worst = worst.max((ux - I * uy - mbar21.at(i, j) * 2.0).norm());
        }
    }
    Ok(worst)
}

/// Which closed form to use for g1 and g2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryFormula {
    /// Large-lambda matching of the y-equation carried out to fifth order.
    Derived,
    /// The formulas as printed in the source, kept for comparison.
    Printed,
}

/// Boundary values from one set of coefficients and the gauge factor E = e^{2i int Delta_2}.
pub fn boundary_from_coefficients(m: &[Matrix2; 5], e: C64, formula: BoundaryFormula) -> (C64, C64, C64) {
    let m1 = m[0][(0, 1)];
    let m3 = m[2][(0, 1)];
    let m5 = m[4][(0, 1)];
    let d2 = m[1][(1, 1)];
    let d4 = m[3][(1, 1)];
    let g0 = I * 2.0 * e * m1;
    match formula {
        BoundaryFormula::Derived => {
            let g1 = e * m3 * 4.0 + I * 2.0 * g0 * d2;
            let g2 = -I * 8.0 * e * m5 + I * g0 * g1 + I * 2.0 * g1 * d2 + g0 * d4 * 4.0;
            (g0, g1, g2)
        }
        BoundaryFormula::Printed => {
            let g1 = (m3 * 4.0 - g0 * m1 * 2.0) * e - I * g0 * (d2 * 2.0 + g0);
            let g2 = (I * 8.0 * m5 + I * 4.0 * g0 * m3 + (g1 - I * g0 * g0) * 2.0 * m1) * e
                - g0 * (d4 * 4.0 + I * 3.0 * g1 + g0 * g0);
            (g0, g1, g2)
        }
    }
}

/// Boundary traces with the gauge solved self-consistently.
#[derive(Debug, Clone)]
pub struct BoundaryReconstruction {
    pub g0: Profile,
    pub g1: Profile,
    pub g2: Profile,
    pub iterations: usize,
}

/// g0, g1, g2 on a uniform y-grid from the y-problem coefficients at each node.
pub fn reconstruct_boundary(coeffs: &[[Matrix2; 5]], hy: f64, formula: BoundaryFormula) -> Result<BoundaryReconstruction> {
    let n = coeffs.len();
    let mut gauge = vec![C64::default(); n];
    let mut last: Option<Vec<(C64, C64, C64)>> = None;
    let mut last_update = f64::INFINITY;
    for it in 1..=MAX_ITER {
        let vals: Vec<(C64, C64, C64)> = coeffs
            .iter()
            .zip(&gauge)
            .map(|(m, g)| boundary_from_coefficients(m, (I * 2.0 * g).exp(), formula))
            .collect();
        let update = match &last {
            Some(prev) => prev
                .iter()
                .zip(&vals)
                .map(|(p, q)| (p.0 - q.0).norm().max((p.1 - q.1).norm()).max((p.2 - q.2).norm()))
                .fold(0.0, f64::max),
            None => f64::INFINITY,
        };
        if update.is_nan() {
            return Err(Error::Divergence { iterations: it, update });
        }
        let damping = if update > last_update { 0.5 } else { 1.0 };
        let blended: Vec<(C64, C64, C64)> = match &last {
            Some(prev) if damping < 1.0 => prev
                .iter()
                .zip(&vals)
                .map(|(p, q)| (p.0 + (q.0 - p.0) * damping, p.1 + (q.1 - p.1) * damping, p.2 + (q.2 - p.2) * damping))
                .collect(),
            _ => vals,
        };
        let d2: Vec<C64> = blended.iter().map(|v| boundary_delta2(v.0, v.1, v.2)).collect();
        gauge = cumulative_trapezoid(&d2, hy);
        if update < TOL {
            let pick = |f: fn(&(C64, C64, C64)) -> C64| blended.iter().map(f).collect::<Vec<_>>();
            return Ok(BoundaryReconstruction {
                g0: Profile::new(Axis::Y, hy, pick(|v| v.0))?,
                g1: Profile::new(Axis::Y, hy, pick(|v| v.1))?,
                g2: Profile::new(Axis::Y, hy, pick(|v| v.2))?,
                iterations: it,
            });
        }
        if update.is_finite() {
            last_update = update;
        }
        last = Some(blended);
    }
    Err(Error::Divergence {
        iterations: MAX_ITER,
        update: last_update,
    })
}

/// h_L(x) = 2i m_L(x) e^{2i int Delta} on a uniform x-grid. `base` is the
/// gauge accumulated along x = 0 up to y = L.
pub fn reconstruct_h_l(m: &[C64], hx: f64, base: C64) -> Result<Profile> {
    let grid = FieldGrid::new(hx, 1.0, m.len(), 1, m.to_vec())?;
    let rec = reconstruct_u(&grid)?;
    let shift = (I * 2.0 * base).exp();
    Profile::new(Axis::X, hx, rec.u.data.iter().map(|v| v * shift).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_give_zero_fields() {
        let m = FieldGrid::new(0.1, 0.1, 6, 4, vec![C64::default(); 24]).unwrap();
        let r = reconstruct_u(&m).unwrap();
        assert!(r.u.data.iter().all(|v| *v == C64::default()));
        let b = reconstruct_boundary(&vec![[Matrix2::zeros(); 5]; 5], 0.1, BoundaryFormula::Derived).unwrap();
        assert!(b.g0.max_abs() == 0.0 && b.g1.max_abs() == 0.0 && b.g2.max_abs() == 0.0);
    }

    #[test]
    fn fixed_point_reproduces_known_gauge() {
        // u = eps e^{-x^2}: build m = u e^{-i int u} / 2i and recover u
        let eps = 0.05;
        let h = 0.01;
        let n = 400;
        let u: Vec<C64> = (0..n).map(|i| C64::new(eps * (-(i as f64 * h).powi(2)).exp(), 0.0)).collect();
        let phi = cumulative_trapezoid(&u, h);
        let m: Vec<C64> = u.iter().zip(&phi).map(|(uv, p)| uv * (-I * p).exp() / (I * 2.0)).collect();
        let rec = reconstruct_u(&FieldGrid::new(h, 1.0, n, 1, m).unwrap()).unwrap();
        let err = rec.u.data.iter().zip(&u).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        assert!(rec.iterations <= 10);
    }
}
