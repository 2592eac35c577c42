//! Gauss-Legendre rules and panel-local Cauchy weights.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Weights w_j with sum_j w_j f(t_j) ~ int_{-1}^{1} f(t)/(t - tau) dt.
///
/// Exact for polynomials of degree < n. `principal` selects the principal
/// value for tau on the open panel.
pub struct PanelRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    vt_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl PanelRule {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        let vt = DMatrix::from_fn(order, order, |k, j| nodes[j].powi(k as i32));
        Self {
            nodes,
            weights,
            vt_lu: vt.lu(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn cauchy_weights(&self, tau: Complex64, principal: bool) -> Vec<Complex64> {
        let n = self.order();
        let one = Complex64::from(1.0);
        let mut p = vec![Complex64::default(); n];
        p[0] = if principal {
            ((one - tau) / (one + tau)).ln()
        } else {
            ((one - tau) / (-one - tau)).ln()
        };
        for k in 0..n - 1 {
            let odd = if (k + 1) % 2 == 1 { 2.0 } else { 0.0 };
            p[k + 1] = tau * p[k] + odd / (k + 1) as f64;
        }
        let re = DVector::from_fn(n, |k, _| p[k].re);
        let im = DVector::from_fn(n, |k, _| p[k].im);
        let wr = self.vt_lu.solve(&re).expect("Vandermonde matrix is nonsingular");
        let wi = self.vt_lu.solve(&im).expect("Vandermonde matrix is nonsingular");
        (0..n).map(|j| Complex64::new(wr[j], wi[j])).collect()
    }

    /// Plain Gauss weights for the smooth kernel 1/(t - tau).
    pub fn smooth_weights(&self, tau: Complex64) -> Vec<Complex64> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w / (Complex64::from(t) - tau))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cauchy_weights_match_closed_form() {
        let rule = PanelRule::new(16);
        // f(t) = t^3: int t^3/(t - tau) = 2/3 + 2 tau^2 + tau^3 log((1-tau)/(-1-tau))
        let tau = Complex64::new(0.3, 0.2);
        let w = rule.cauchy_weights(tau, false);
        let got: Complex64 = rule.nodes.iter().zip(&w).map(|(&t, w)| w * t.powi(3)).sum();
        let one = Complex64::from(1.0);
        let exact = Complex64::from(2.0 / 3.0)
            + tau * tau * 2.0
            + tau.powi(3) * ((one - tau) / (-one - tau)).ln();
        assert!((got - exact).norm() < 1e-12, "{got} vs {exact}");
    }
}
