//! Evaluable initial and boundary data for the direct problem.

use crate::error::{Error, Result};
use crate::field::{BoundaryProfiles, Profile, Spline};
use crate::lax_pair::boundary_delta2;
use crate::linalg::C64;

/// Initial data u0 on [0, X_max].
pub trait InitialData: Sync {
    fn value(&self, x: f64) -> C64;
    /// int_0^x Delta_1 = int_0^x u0 / 2.
    fn gauge(&self, x: f64) -> C64;
    fn x_max(&self) -> f64;
    /// Points where u0 is not smooth; the integrator restarts there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
    /// Output grid for eigenfunction traces.
    fn grid(&self) -> Vec<f64>;
}

/// Boundary data (g0, g1, g2) on [0, L].
pub trait BoundaryData: Sync {
    fn values(&self, y: f64) -> (C64, C64, C64);
    /// int_0^y Delta_2(0, eta) d eta.
    fn gauge(&self, y: f64) -> C64;
    fn length(&self) -> f64;
    /// Points where the data is not smooth; the integrator restarts there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
    fn grid(&self) -> Vec<f64>;
}

/// Spline interpolant of a sampled profile.
#[derive(Debug, Clone)]
pub struct SampledInitial {
    spline: Spline,
    n: usize,
    step: f64,
}

impl SampledInitial {
    pub fn new(profile: &Profile) -> Self {
        Self {
            spline: Spline::new(profile.step, profile.samples.clone()),
            n: profile.len(),
            step: profile.step,
        }
    }
}

impl InitialData for SampledInitial {
    fn value(&self, x: f64) -> C64 {
        self.spline.value(x)
    }
    fn gauge(&self, x: f64) -> C64 {
        self.spline.integral(x) / 2.0
    }
    fn x_max(&self) -> f64 {
        self.spline.extent()
    }
    // the spline is only C^2 across knots
    fn breakpoints(&self) -> Vec<f64> {
        self.grid()
    }
    fn grid(&self) -> Vec<f64> {
        (0..self.n).map(|i| i as f64 * self.step).collect()
    }
}

/// Piecewise-constant data: u0 = value on [start, end), zero elsewhere.
#[derive(Debug, Clone)]
pub struct StepData {
    steps: Vec<(f64, f64, C64)>,
    x_max: f64,
}

impl StepData {
    pub fn new(mut steps: Vec<(f64, f64, C64)>, x_max: f64) -> Result<Self> {
        steps.sort_by(|a, b| a.0.total_cmp(&b.0));
        for s in &steps {
            if !(s.0 >= 0.0 && s.1 > s.0 && s.1 <= x_max) {
                return Err(Error::Validation(format!(
                    "step interval [{}, {}) not inside [0, {x_max}]",
                    s.0, s.1
                )));
            }
        }
        if steps.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::Validation("overlapping step intervals".into()));
        }
        Ok(Self { steps, x_max })
    }

    pub fn steps(&self) -> &[(f64, f64, C64)] {
        &self.steps
    }

    /// Samples the step function on a uniform grid (value at the node).
    pub fn sample(&self, h: f64) -> Result<Profile> {
        let n = (self.x_max / h).round() as usize + 1;
        Profile::from_fn(crate::field::Axis::X, h, n, |x| self.value(x))
    }
}

impl InitialData for StepData {
    fn value(&self, x: f64) -> C64 {
        self.steps
            .iter()
            .find(|s| x >= s.0 && x < s.1)
            .map_or(C64::default(), |s| s.2)
    }
    fn gauge(&self, x: f64) -> C64 {
        self.steps
            .iter()
            .map(|s| s.2 * ((x.min(s.1) - s.0).max(0.0)))
            .sum::<C64>()
            / 2.0
    }
    fn x_max(&self) -> f64 {
        self.x_max
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.steps.iter().flat_map(|s| [s.0, s.1]).collect()
    }
    fn grid(&self) -> Vec<f64> {
        let mut g = vec![0.0, self.x_max];
        g.extend(self.breakpoints());
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    }
}

/// Identically zero initial data.
#[derive(Debug, Clone, Copy)]
pub struct ZeroInitial {
    pub x_max: f64,
}

impl InitialData for ZeroInitial {
    fn value(&self, _x: f64) -> C64 {
        C64::default()
    }
    fn gauge(&self, _x: f64) -> C64 {
        C64::default()
    }
    fn x_max(&self) -> f64 {
        self.x_max
    }
    fn grid(&self) -> Vec<f64> {
        vec![0.0, self.x_max]
    }
}

/// Spline interpolants of sampled boundary profiles.
#[derive(Debug, Clone)]
pub struct SampledBoundary {
    g: [Spline; 3],
    delta2: Spline,
    n: usize,
    step: f64,
}

impl SampledBoundary {
    pub fn new(profiles: &BoundaryProfiles) -> Self {
        let h = profiles.g0.step;
        let d2: Vec<C64> = (0..profiles.g0.len())
            .map(|i| {
                boundary_delta2(
                    profiles.g0.samples[i],
                    profiles.g1.samples[i],
                    profiles.g2.samples[i],
                )
            })
            .collect();
        Self {
            g: [
                Spline::new(h, profiles.g0.samples.clone()),
                Spline::new(h, profiles.g1.samples.clone()),
                Spline::new(h, profiles.g2.samples.clone()),
            ],
            delta2: Spline::new(h, d2),
            n: profiles.g0.len(),
            step: h,
        }
    }
}

impl BoundaryData for SampledBoundary {
    fn values(&self, y: f64) -> (C64, C64, C64) {
        (self.g[0].value(y), self.g[1].value(y), self.g[2].value(y))
    }
    fn gauge(&self, y: f64) -> C64 {
        self.delta2.integral(y)
    }
    fn length(&self) -> f64 {
        self.delta2.extent()
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.grid()
    }
    fn grid(&self) -> Vec<f64> {
        (0..self.n).map(|i| i as f64 * self.step).collect()
    }
}
