//! Product-quadrature Cauchy matrices on graded ray panels.

use std::f64::consts::PI;

use faer::Mat;

use crate::contour::Contour;
use crate::linalg::{C64, I};
use crate::quadrature::PanelRule;

/// Targets closer than this (in panel half-lengths) get analytic weights.
const NEAR: f64 = 2.5;

#[derive(Debug, Clone, Copy)]
struct Panel {
    center: C64,
    half: C64,
    first: usize,
}

/// Panels of a contour in node order.
pub struct PanelSet {
    panels: Vec<Panel>,
    rule: PanelRule,
    /// Panel index of every node.
    pub panel_of: Vec<usize>,
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
}

impl PanelSet {
    pub fn new(contour: &Contour) -> Self {
        let q = contour.layout.order;
        let rule = PanelRule::new(q);
        let mut panels = Vec::new();
        let mut panel_of = Vec::new();
        let mut first = 0;
        for r in &contour.rays {
            for e in r.edges.windows(2) {
                panels.push(Panel {
                    center: r.direction * (0.5 * (e[0] + e[1])),
                    half: r.direction * (0.5 * (e[1] - e[0])),
                    first,
                });
                panel_of.extend(std::iter::repeat_n(panels.len() - 1, q));
                first += q;
            }
        }
        Self {
            panels,
            rule,
            panel_of,
            nodes: contour.nodes(),
            weights: contour.complex_weights(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Row of (1/2 pi i) int f(s)/(s - z) ds weights for target z.
    /// `own` names the panel containing z, where the principal value is taken.
    pub fn row(&self, z: C64, own: Option<usize>, out: &mut [C64]) {
        let q = self.rule.order();
        let scale = C64::new(1.0, 0.0) / (I * (2.0 * PI));
        for (p, panel) in self.panels.iter().enumerate() {
            let tau = (z - panel.center) / panel.half;
            let w = if own == Some(p) {
                self.rule.cauchy_weights(C64::new(tau.re, 0.0), true)
            } else if tau.norm() < NEAR {
                self.rule.cauchy_weights(tau, false)
            } else {
                self.rule.smooth_weights(tau)
            };
            for j in 0..q {
                out[panel.first + j] = w[j] * scale;
            }
        }
    }

    /// Principal-value Cauchy matrix at the nodes.
    pub fn on_contour(&self) -> Mat<C64> {
        let n = self.len();
        let mut m = Mat::<C64>::zeros(n, n);
        let mut row = vec![C64::default(); n];
        for i in 0..n {
            self.row(self.nodes[i], Some(self.panel_of[i]), &mut row);
            for j in 0..n {
                m[(i, j)] = row[j];
            }
        }
        m
    }

    /// Cauchy matrix for targets off the contour (or on other panels only).
    pub fn at_targets(&self, targets: &[C64]) -> Mat<C64> {
        let n = self.len();
        let mut m = Mat::<C64>::zeros(targets.len(), n);
        let mut row = vec![C64::default(); n];
        for (i, &z) in targets.iter().enumerate() {
            self.row(z, None, &mut row);
            for j in 0..n {
                m[(i, j)] = row[j];
            }
        }
        m
    }
}
