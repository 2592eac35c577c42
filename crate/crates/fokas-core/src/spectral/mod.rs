//! Spectral functions as evaluable sources, the tabulated form, the derived
//! quantities alpha, beta, c+, and the global relation report.

mod residues;
mod table;
mod zeros;

pub use residues::{residue_data, Pole, PoleExponent, ResidueData, RhpFamily};
pub use table::{sample_set, SampleLabel, SpectralMeta, SpectralRecord, SpectralTable};
pub use zeros::{certify_exclusion, find_zeros, sector_regions, zero_set, Region, Zero, ZeroOptions, ZeroSet};

use crate::contour::{im_lambda2_nonneg, im_lambda6_nonneg};
use crate::data::{BoundaryData, InitialData};
use crate::direct::{spectral_ab, spectral_big_ab, AbRoute};
use crate::error::Result;
use crate::linalg::{det, inverse, Matrix2, C64, I};
use crate::ode::IntegratorOptions;

/// Anything that can produce a, b (Im lambda^2 >= 0) and A, B (Im lambda^6 >= 0).
pub trait SpectralSource: Sync {
    fn ab(&self, lambda: C64) -> Result<(C64, C64)>;
    fn big_ab(&self, lambda: C64) -> Result<(C64, C64)>;
    /// The final time L entering c+.
    fn horizon(&self) -> f64;
}

/// Fresh integration at every request.
pub struct LiveSpectral<'a> {
    pub initial: &'a dyn InitialData,
    pub boundary: Option<&'a dyn BoundaryData>,
    pub opts: IntegratorOptions,
}

impl SpectralSource for LiveSpectral<'_> {
    fn ab(&self, lambda: C64) -> Result<(C64, C64)> {
        spectral_ab(self.initial, lambda, &self.opts)
    }
    fn big_ab(&self, lambda: C64) -> Result<(C64, C64)> {
        match self.boundary {
            Some(g) => spectral_big_ab(g, lambda, AbRoute::Mu2, &self.opts),
            None => Ok((C64::new(1.0, 0.0), C64::default())),
        }
    }
    fn horizon(&self) -> f64 {
        self.boundary.map_or(0.0, |g| g.length())
    }
}

/// Closure-backed source for synthetic fixtures; no domain restrictions.
pub struct FnSpectral<F, G>
where
    F: Fn(C64) -> (C64, C64) + Sync,
    G: Fn(C64) -> (C64, C64) + Sync,
{
    pub ab: F,
    pub big_ab: G,
    pub horizon: f64,
}

impl<F, G> SpectralSource for FnSpectral<F, G>
where
    F: Fn(C64) -> (C64, C64) + Sync,
    G: Fn(C64) -> (C64, C64) + Sync,
{
    fn ab(&self, lambda: C64) -> Result<(C64, C64)> {
        Ok((self.ab)(lambda))
    }
    fn big_ab(&self, lambda: C64) -> Result<(C64, C64)> {
        Ok((self.big_ab)(lambda))
    }
    fn horizon(&self) -> f64 {
        self.horizon
    }
}

/// conj(f(conj(lambda))).
pub fn reflect(f: impl Fn(C64) -> Result<C64>, lambda: C64) -> Result<C64> {
    Ok(f(lambda.conj())?.conj())
}

pub fn a_of(src: &dyn SpectralSource, l: C64) -> Result<C64> {
    Ok(src.ab(l)?.0)
}
pub fn b_of(src: &dyn SpectralSource, l: C64) -> Result<C64> {
    Ok(src.ab(l)?.1)
}
pub fn big_a_of(src: &dyn SpectralSource, l: C64) -> Result<C64> {
    Ok(src.big_ab(l)?.0)
}
pub fn big_b_of(src: &dyn SpectralSource, l: C64) -> Result<C64> {
    Ok(src.big_ab(l)?.1)
}

/// alpha = conj(a(conj l)) A - conj(b(conj l)) B.
pub fn alpha(src: &dyn SpectralSource, l: C64) -> Result<C64> {
    let (a, b) = src.ab(l.conj())?;
    let (big_a, big_b) = src.big_ab(l)?;
    Ok(a.conj() * big_a - b.conj() * big_b)
}

/// beta = a B - b A.
pub fn beta(src: &dyn SpectralSource, l: C64) -> Result<C64> {
    let (a, b) = src.ab(l)?;
    let (big_a, big_b) = src.big_ab(l)?;
    Ok(a * big_b - b * big_a)
}

/// c+ = (a B - b A) e^{-4i lambda^6 L}.
pub fn c_plus(src: &dyn SpectralSource, l: C64) -> Result<C64> {
    Ok(beta(src, l)? * (-I * l.powi(6) * (4.0 * src.horizon())).exp())
}

/// S1 = [[conj a(conj l), b], [conj b(conj l), a]].
pub fn s1(src: &dyn SpectralSource, l: C64) -> Result<Matrix2> {
    let (a, b) = src.ab(l)?;
    let (ar, br) = src.ab(l.conj())?;
    Ok(Matrix2::new(ar.conj(), b, br.conj(), a))
}

/// S2 = [[conj A(conj l), B], [conj B(conj l), A]].
pub fn s2(src: &dyn SpectralSource, l: C64) -> Result<Matrix2> {
    let (a, b) = src.big_ab(l)?;
    let (ar, br) = src.big_ab(l.conj())?;
    Ok(Matrix2::new(ar.conj(), b, br.conj(), a))
}

/// S3 assembled from alpha and beta.
pub fn s3(src: &dyn SpectralSource, l: C64) -> Result<Matrix2> {
    let al = alpha(src, l)?;
    let be = beta(src, l)?;
    let alr = alpha(src, l.conj())?;
    let ber = beta(src, l.conj())?;
    Ok(Matrix2::new(alr.conj(), be, ber.conj(), al))
}

/// Derived values at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRecord {
    pub lambda: C64,
    pub alpha: Option<C64>,
    pub beta: Option<C64>,
    pub c_plus: Option<C64>,
    /// max entry of |S3 - S1^{-1} S2| where all pieces exist.
    pub s3_mismatch: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct DerivedSpectral {
    pub records: Vec<DerivedRecord>,
    /// Samples with |a| < 1e-12, excluded from the S3 check.
    pub flagged: Vec<C64>,
}

impl DerivedSpectral {
    pub fn max_s3_mismatch(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(|r| r.s3_mismatch)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }
}

/// alpha, beta, c+ at every table sample where the inputs exist.
pub fn derive_alpha_beta(table: &SpectralTable) -> DerivedSpectral {
    let mut out = DerivedSpectral::default();
    for r in &table.records {
        let l = r.lambda;
        let al = alpha(table, l).ok();
        let be = beta(table, l).ok();
        let cp = c_plus(table, l).ok();
        let mut mismatch = None;
        if let (Ok(m1), Ok(m2), Ok(m3)) = (s1(table, l), s2(table, l), s3(table, l)) {
            if r.a.is_some_and(|a| a.norm() < 1e-12) {
                out.flagged.push(l);
            } else if det(&m1).norm() > 0.0 {
                let d = m3 - inverse(&m1) * m2;
                mismatch = Some(crate::linalg::max_abs(&d));
            }
        }
        out.records.push(DerivedRecord {
            lambda: l,
            alpha: al,
            beta: be,
            c_plus: cp,
            s3_mismatch: mismatch,
        });
    }
    out
}

/// One sample of the global relation along a radial line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationSample {
    pub lambda: C64,
    /// |a B - b A|
    pub beta_abs: f64,
    /// |c+| = |a B - b A| e^{4 Im(lambda^6) L}
    pub c_plus_abs: f64,
}

/// Global relation residuals on radial lines.
#[derive(Debug, Clone, Default)]
pub struct RelationReport {
    /// One entry per radial line, samples in increasing radius.
    pub lines: Vec<(f64, Vec<RelationSample>)>,
}

impl RelationReport {
    /// Largest ratio |c+(r_{k+1})| / |c+(r_k)| over consecutive radii, where
    /// values below `floor` count as `floor`.
    pub fn max_growth(&self, floor: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for (_, s) in &self.lines {
            for w in s.windows(2) {
                let (p, q) = (w[0].c_plus_abs.max(floor), w[1].c_plus_abs.max(floor));
                let g = if q.is_finite() { q / p } else { f64::INFINITY };
                worst = worst.max(g);
            }
        }
        worst
    }

    /// max |a B - b A| at the largest radius of every line.
    pub fn outer_residual(&self) -> f64 {
        self.lines
            .iter()
            .filter_map(|(_, s)| s.last())
            .fold(0.0, |acc, s| acc.max(s.beta_abs))
    }

    /// max |a B - b A| over every sample.
    pub fn max_residual(&self) -> f64 {
        self.lines
            .iter()
            .flat_map(|(_, s)| s.iter())
            .fold(0.0, |acc, s| acc.max(s.beta_abs))
    }
}

/// Evaluates a B - b A along radial lines at the given angles and radii.
pub fn global_relation_residual(src: &dyn SpectralSource, angles: &[f64], radii: &[f64]) -> Result<RelationReport> {
    let l_len = src.horizon();
    let mut rep = RelationReport::default();
    for &phi in angles {
        let mut line = Vec::with_capacity(radii.len());
        for &r in radii {
            let l = C64::from_polar(r, phi);
            if !(im_lambda2_nonneg(l) && im_lambda6_nonneg(l)) {
                continue;
            }
            let be = beta(src, l)?;
            let growth = (4.0 * l.powi(6).im * l_len).exp();
            line.push(RelationSample {
                lambda: l,
                beta_abs: be.norm(),
                c_plus_abs: be.norm() * growth,
            });
        }
        rep.lines.push((phi, line));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ZeroInitial;
    use crate::linalg::c;

    #[test]
    fn trivial_alpha_beta() {
        let z = ZeroInitial { x_max: 4.0 };
        let src = LiveSpectral {
            initial: &z,
            boundary: None,
            opts: IntegratorOptions::default(),
        };
        for l in [c(1.0, 0.0), c(0.0, 1.5), c(-2.0, 0.0)] {
            assert_eq!(alpha(&src, l).unwrap(), c(1.0, 0.0));
            assert_eq!(beta(&src, l).unwrap(), C64::default());
        }
    }

    #[test]
    fn s3_determinant_is_product() {
        // det S3 = det S1 det S2 holds for arbitrary entries
        let src = FnSpectral {
            ab: |l: C64| ((l * l * 0.3).cosh(), (l * l * 0.3).sinh() * l),
            big_ab: |l: C64| ((l * l * 0.2).cosh(), (l * l * 0.2).sinh() * l),
            horizon: 0.5,
        };
        for l in [c(0.7, 0.0), c(0.0, 0.9), c(-1.1, 0.0)] {
            let d1 = det(&s1(&src, l).unwrap());
            let d2 = det(&s2(&src, l).unwrap());
            let d3 = det(&s3(&src, l).unwrap());
            assert!((d3 - d1 * d2).norm() < 1e-12, "{l}: {d3} vs {}", d1 * d2);
        }
    }
}
