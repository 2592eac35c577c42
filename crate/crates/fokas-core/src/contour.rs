//! The spectral plane: sectors D1..D6, the twelve rays of {Im lambda^6 = 0},
//! the phase theta and the graded node layout used by the RHP solver.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::quadrature::gauss_legendre;

pub const RAY_COUNT: usize = 12;
/// Angular tolerance for ray membership.
pub const ANGLE_TOL: f64 = 1e-10;
/// Inner edge of the graded panel layout.
const GRADING: f64 = 4.0;
pub const DEFAULT_RADIUS: f64 = 8.0;

/// A point of the spectral plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint(pub C64);

impl SpectralPoint {
    pub fn new(value: C64) -> Result<Self> {
        if value.re.is_finite() && value.im.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::Validation(format!("non-finite lambda {value}")))
        }
    }
}

/// Open sector D_index, the union of two opposite wedges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sector {
    pub index: u8,
}

impl Sector {
    pub fn new(index: u8) -> Result<Self> {
        if (1..=6).contains(&index) {
            Ok(Self { index })
        } else {
            Err(Error::Validation(format!("sector index {index} outside 1..6")))
        }
    }

    /// Angular interval of the k = 0 wedge; the other wedge is shifted by pi.
    pub fn arg_range(&self) -> (f64, f64) {
        let i = self.index as f64;
        ((i - 1.0) * PI / 6.0, i * PI / 6.0)
    }

    pub fn bisector(&self) -> f64 {
        let (lo, hi) = self.arg_range();
        0.5 * (lo + hi)
    }

    pub fn contains(&self, lambda: C64) -> bool {
        matches!(classify(lambda), Ok(Location::Sector(i)) if i == self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Sector(u8),
    Ray(u8),
}

fn arg_2pi(lambda: C64) -> f64 {
    let a = lambda.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Sector or ray containing lambda.
pub fn classify(lambda: C64) -> Result<Location> {
    if lambda == C64::default() {
        return Err(Error::Origin);
    }
    let a = arg_2pi(lambda);
    let step = PI / 6.0;
    let k = (a / step).round();
    if (a - k * step).abs() < ANGLE_TOL {
        return Ok(Location::Ray((k as usize % RAY_COUNT) as u8));
    }
    let folded = a % PI;
    let idx = (folded / step).floor() as u8 + 1;
    Ok(Location::Sector(idx.min(6)))
}

/// Index of the ray carrying lambda, if any.
pub fn ray_of(lambda: C64) -> Option<usize> {
    match classify(lambda) {
        Ok(Location::Ray(k)) => Some(k as usize),
        _ => None,
    }
}

pub fn ray_direction(k: usize) -> C64 {
    match k % RAY_COUNT {
        0 => C64::new(1.0, 0.0),
        3 => C64::new(0.0, 1.0),
        6 => C64::new(-1.0, 0.0),
        9 => C64::new(0.0, -1.0),
        k => C64::from_polar(1.0, k as f64 * PI / 6.0),
    }
}

/// theta(lambda) = lambda^2 x + 2 lambda^6 y.
pub fn theta(lambda: C64, x: f64, y: f64) -> C64 {
    let l2 = lambda * lambda;
    l2 * x + l2 * l2 * l2 * (2.0 * y)
}

/// Phase descriptor at a fixed (x, y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub x: f64,
    pub y: f64,
}

impl Phase {
    pub fn at(&self, lambda: C64) -> C64 {
        theta(lambda, self.x, self.y)
    }
}

/// One outward ray with its Gauss-Legendre panels.
#[derive(Debug, Clone)]
pub struct Ray {
    pub index: usize,
    pub direction: C64,
    /// Panel edges in radius, starting at 0.
    pub edges: Vec<f64>,
    pub radii: Vec<f64>,
    /// Radial quadrature weights (positive).
    pub weights: Vec<f64>,
}

impl Ray {
    pub fn nodes(&self) -> impl Iterator<Item = C64> + '_ {
        self.radii.iter().map(move |&r| self.direction * r)
    }
}

/// Panel layout for a contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layout {
    pub panels: usize,
    pub order: usize,
}

impl Layout {
    /// Default split of `nodes_per_ray` into panels of equal order.
    pub fn for_nodes(nodes_per_ray: usize) -> Self {
        let order = [16usize, 12, 8, 4]
            .into_iter()
            .find(|&q| nodes_per_ray.is_multiple_of(q) && nodes_per_ray >= 2 * q)
            .unwrap_or(nodes_per_ray);
        Self {
            panels: nodes_per_ray / order,
            order,
        }
    }

    /// Uniform panels of width h out to the radius, with [0, h] split
    /// geometrically (ratio 4) into a third of the panels for the corner at 0.
    fn edges(&self, radius: f64) -> Vec<f64> {
        let mut e = vec![0.0];
        if self.panels == 1 {
            e.push(radius);
            return e;
        }
        let graded = (self.panels / 3).max(1);
        let h = radius / (self.panels - graded + 1) as f64;
        for k in (0..graded).rev() {
            e.push(h * GRADING.powi(-(k as i32)));
        }
        for j in 2..=self.panels - graded + 1 {
            e.push(h * j as f64);
        }
        e
    }
}

/// Discretized contour: a subset of the twelve rays, truncated at a radius.
#[derive(Debug, Clone)]
pub struct Contour {
    pub rays: Vec<Ray>,
    pub truncation_radius: f64,
    pub nodes_per_ray: usize,
    pub layout: Layout,
}

/// Rays making up {Im lambda^2 = 0}.
pub const LAMBDA2_RAYS: [usize; 4] = [0, 3, 6, 9];

/// Twelve-ray contour with the default panel layout.
pub fn build_contour(truncation_radius: f64, nodes_per_ray: usize) -> Result<Contour> {
    let all: Vec<usize> = (0..RAY_COUNT).collect();
    Contour::new(&all, truncation_radius, Layout::for_nodes(nodes_per_ray.max(1)), nodes_per_ray)
}

impl Contour {
    pub fn new(ray_indices: &[usize], radius: f64, layout: Layout, nodes_per_ray: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Validation(format!("truncation radius must be positive, got {radius}")));
        }
        if nodes_per_ray < 4 {
            return Err(Error::Validation(format!("nodes_per_ray must be >= 4, got {nodes_per_ray}")));
        }
        if layout.panels * layout.order != nodes_per_ray {
            return Err(Error::Validation(format!(
                "layout {}x{} does not give {nodes_per_ray} nodes",
                layout.panels, layout.order
            )));
        }
        if ray_indices.iter().any(|&k| k >= RAY_COUNT) {
            return Err(Error::Validation("ray index outside 0..12".into()));
        }
        let (gx, gw) = gauss_legendre(layout.order);
        let edges = layout.edges(radius);
        let mut radii = Vec::with_capacity(nodes_per_ray);
        let mut weights = Vec::with_capacity(nodes_per_ray);
        for w in edges.windows(2) {
            let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (t, wt) in gx.iter().zip(&gw) {
                radii.push(c + h * t);
                weights.push(h * wt);
            }
        }
        let rays = ray_indices
            .iter()
            .map(|&k| Ray {
                index: k,
                direction: ray_direction(k),
                edges: edges.clone(),
                radii: radii.clone(),
                weights: weights.clone(),
            })
            .collect();
        Ok(Self {
            rays,
            truncation_radius: radius,
            nodes_per_ray,
            layout,
        })
    }

    /// Custom graded layout with an explicit panel count and order.
    pub fn graded(ray_indices: &[usize], radius: f64, panels: usize, order: usize) -> Result<Self> {
        let layout = Layout {
            panels,
            order,
        };
        Self::new(ray_indices, radius, layout, panels * order)
    }

    pub fn node_count(&self) -> usize {
        self.rays.len() * self.nodes_per_ray
    }

    /// All nodes in ray-major order.
    pub fn nodes(&self) -> Vec<C64> {
        self.rays.iter().flat_map(|r| r.nodes().collect::<Vec<_>>()).collect()
    }

    /// Complex weights for int f(s) ds along the outward rays.
    pub fn complex_weights(&self) -> Vec<C64> {
        self.rays
            .iter()
            .flat_map(|r| r.weights.iter().map(move |&w| r.direction * w))
            .collect()
    }

    pub fn ray_indices(&self) -> Vec<usize> {
        self.rays.iter().map(|r| r.index).collect()
    }

    /// Position of ray k in `rays`.
    pub fn ray_position(&self, k: usize) -> Option<usize> {
        self.rays.iter().position(|r| r.index == k)
    }

    /// True when the ray set is closed under lambda -> -lambda.
    pub fn is_symmetric(&self) -> bool {
        self.rays
            .iter()
            .all(|r| self.ray_position((r.index + 6) % RAY_COUNT).is_some())
    }

    /// Same rays and radius with twice as many panels.
    pub fn refined(&self) -> Result<Self> {
        let layout = Layout {
            panels: self.layout.panels * 2,
            ..self.layout
        };
        Self::new(&self.ray_indices(), self.truncation_radius, layout, layout.panels * layout.order)
    }

    /// Text export: one `ray re im weight` record per node.
    pub fn export(&self) -> String {
        let mut s = format!(
            "# contour rays={} radius={:.17e} nodes_per_ray={}\n",
            self.rays.len(),
            self.truncation_radius,
            self.nodes_per_ray
        );
        for r in &self.rays {
            for (z, w) in r.nodes().zip(&r.weights) {
                s.push_str(&format!("{} {:.17e} {:.17e} {:.17e}\n", r.index, z.re, z.im, w));
            }
        }
        s
    }
}

/// Sign structure used by the direct problem: closed half-planes of lambda^2 and lambda^6.
pub fn im_lambda2_nonneg(lambda: C64) -> bool {
    let l2 = lambda * lambda;
    l2.im >= -ANGLE_TOL * l2.norm()
}

pub fn im_lambda2_nonpos(lambda: C64) -> bool {
    let l2 = lambda * lambda;
    l2.im <= ANGLE_TOL * l2.norm()
}

pub fn im_lambda6_nonneg(lambda: C64) -> bool {
    let l6 = lambda.powi(6);
    l6.im >= -6.0 * ANGLE_TOL * l6.norm()
}

pub fn im_lambda6_nonpos(lambda: C64) -> bool {
    let l6 = lambda.powi(6);
    l6.im <= 6.0 * ANGLE_TOL * l6.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        assert_eq!(classify(C64::from_polar(1.0, PI / 12.0)).unwrap(), Location::Sector(1));
        assert_eq!(classify(C64::from_polar(1.0, PI / 4.0)).unwrap(), Location::Sector(2));
        assert_eq!(classify(C64::new(0.0, 1.0)).unwrap(), Location::Ray(3));
        assert!(matches!(classify(C64::default()), Err(Error::Origin)));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(C64::from(1.0), 0.0, 0.0), C64::default());
        assert_eq!(theta(C64::from(1.0), 2.0, 3.0), C64::from(8.0));
        assert!((theta(C64::new(0.0, 1.0), 1.0, 1.0) - C64::from(-3.0)).norm() < 1e-15);
    }

    #[test]
    fn contour_examples() {
        let c = build_contour(10.0, 8).unwrap();
        assert_eq!(c.node_count(), 96);
        for r in &c.rays {
            for z in r.nodes() {
                assert!(z.powi(6).im.abs() <= 1e-12 * z.norm().powi(6));
            }
        }
        assert!(c.rays[0].nodes().all(|z| z.re > 0.0 && z.im == 0.0));
        assert!(c.rays[3].nodes().all(|z| z.re == 0.0 && z.im > 0.0));
        assert!(c.rays.iter().all(|r| r.weights.iter().all(|&w| w > 0.0)));
        let d = build_contour(10.0, 16).unwrap();
        assert_eq!(d.truncation_radius, c.truncation_radius);
        for (a, b) in c.rays.iter().zip(&d.rays) {
            assert_eq!(a.direction, b.direction);
        }
        assert!(build_contour(0.0, 8).is_err());
        assert!(build_contour(1.0, 3).is_err());
    }

    #[test]
    fn weights_integrate_radial_polynomials() {
        let c = Contour::graded(&[0], 8.0, 12, 16).unwrap();
        let s: f64 = c.rays[0].radii.iter().zip(&c.rays[0].weights).map(|(r, w)| w * r * r).sum();
        assert!((s - 512.0 / 3.0).abs() < 1e-10);
    }
}
