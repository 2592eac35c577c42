//! Thin wrapper around DOP853 for linear 2-vector ODEs v' = A(s) v.
//!
//! The integrator always runs forward in t = |s - s_i| on every output
//! segment, which keeps its dense-output bookkeeping out of the way.

use nalgebra::SVector;
use num_complex::Complex64;
use ode_solvers::{Dop853, OutputType, System};

use crate::linalg::Matrix2;

/// Adaptive integration settings.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: u32,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug)]
pub(crate) struct OdeFailure {
    pub at: f64,
    pub detail: String,
}

// The path parameter rides along as a fifth component: ode_solvers 0.6 has a
// wrong stage-12 node in its DOP853 tableau, which only matters when the
// right-hand side reads t directly.
type State = SVector<f64, 5>;

struct Segment<'a, F> {
    coef: &'a F,
    origin: f64,
    sign: f64,
}

impl<F> System<f64, State> for Segment<'_, F>
where
    F: Fn(f64) -> Matrix2,
{
    fn system(&self, _t: f64, y: &State, dy: &mut State) {
        let a = (self.coef)(self.origin + self.sign * y[4]);
        let v0 = Complex64::new(y[0], y[1]);
        let v1 = Complex64::new(y[2], y[3]);
        let d0 = (a[(0, 0)] * v0 + a[(0, 1)] * v1) * self.sign;
        let d1 = (a[(1, 0)] * v0 + a[(1, 1)] * v1) * self.sign;
        dy[0] = d0.re;
        dy[1] = d0.im;
        dy[2] = d1.re;
        dy[3] = d1.im;
        dy[4] = 1.0;
    }
}

/// Integrates along a monotone path, returning the state at every path point.
pub(crate) fn integrate_column<F>(
    coef: &F,
    path: &[f64],
    v0: [Complex64; 2],
    opts: &IntegratorOptions,
) -> Result<Vec<[Complex64; 2]>, OdeFailure>
where
    F: Fn(f64) -> Matrix2,
{
    let mut out = Vec::with_capacity(path.len());
    out.push(v0);
    let mut y = State::from([v0[0].re, v0[0].im, v0[1].re, v0[1].im, 0.0]);
    for w in path.windows(2) {
        let (s0, s1) = (w[0], w[1]);
        let len = (s1 - s0).abs();
        if len > 0.0 {
            y[4] = 0.0;
            let seg = Segment {
                coef,
                origin: s0,
                sign: (s1 - s0).signum(),
            };
            let mut solver = Dop853::from_param(
                seg,
                0.0,
                len,
                len,
                y,
                opts.rtol,
                opts.atol,
                0.9,
                0.0,
                0.333,
                6.0,
                len,
                0.0,
                opts.max_steps,
                u32::MAX,
                OutputType::Sparse,
            );
            solver.integrate().map_err(|e| OdeFailure {
                at: s0,
                detail: e.to_string(),
            })?;
            y = *solver
                .y_out()
                .last()
                .expect("integrator produced no output");
        }
        out.push([Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_dependent_coefficient_is_exact() {
        // v0' = e^{i w s} v1, v1 = 1: v0(s) = (e^{i w s} - 1) / (i w)
        let w = 3.0;
        let coef = |s: f64| {
            let z = Complex64::default();
            Matrix2::new(z, Complex64::new(0.0, w * s).exp(), z, z)
        };
        let opts = IntegratorOptions::default();
        let path = [0.0, 2.5, 7.0];
        let out = integrate_column(&coef, &path, [Complex64::default(), Complex64::new(1.0, 0.0)], &opts).unwrap();
        for (s, v) in path.iter().zip(&out) {
            let exact = (Complex64::new(0.0, w * s).exp() - 1.0) / Complex64::new(0.0, w);
            assert!((v[0] - exact).norm() < 1e-9, "{s}: {}", (v[0] - exact).norm());
        }
    }
}
