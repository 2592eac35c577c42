use std::f64::consts::PI;

use super::SpectralSource;
use crate::contour::{im_lambda2_nonneg, im_lambda6_nonneg, Contour, Sector};
use crate::data::{BoundaryData, InitialData};
use crate::direct::{spectral_ab, spectral_big_ab, AbRoute};
use crate::error::{Error, Result};
use crate::linalg::{C64, I};
use crate::ode::IntegratorOptions;

/// Where a tabulated sample lives: on a contour ray or on a sector bisector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleLabel {
    Ray(u8),
    Sector(u8),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralRecord {
    pub label: SampleLabel,
    pub lambda: C64,
    pub a: Option<C64>,
    pub b: Option<C64>,
    pub big_a: Option<C64>,
    pub big_b: Option<C64>,
    pub c_plus: Option<C64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpectralMeta {
    pub x_max: Option<f64>,
    pub length: Option<f64>,
    pub radius: f64,
    pub nodes_per_ray: usize,
    pub rtol: f64,
}

#[derive(Debug, Clone)]
struct Line {
    angle: f64,
    radii: Vec<f64>,
    idx: Vec<usize>,
}

/// Tabulated a, b, A, B over rays and sector bisectors.
#[derive(Debug, Clone)]
pub struct SpectralTable {
    pub meta: SpectralMeta,
    pub records: Vec<SpectralRecord>,
    lines: Vec<Line>,
}

fn angle_of(l: C64) -> f64 {
    let a = l.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

fn same_angle(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d) < 1e-9
}

/// Contour nodes on every ray plus, optionally, the same radii on both
/// wedges of every sector bisector.
pub fn sample_set(contour: &Contour, sector_lines: bool) -> Vec<(SampleLabel, C64)> {
    let mut out = Vec::new();
    for r in &contour.rays {
        out.extend(r.nodes().map(|z| (SampleLabel::Ray(r.index as u8), z)));
    }
    if sector_lines {
        let radii = &contour.rays[0].radii;
        for i in 1..=6u8 {
            let phi = Sector { index: i }.bisector();
            for wedge in [0.0, PI] {
                let d = C64::from_polar(1.0, phi + wedge);
                out.extend(radii.iter().map(|&r| (SampleLabel::Sector(i), d * r)));
            }
        }
    }
    out
}

impl SpectralTable {
    pub fn new(meta: SpectralMeta, records: Vec<SpectralRecord>) -> Self {
        let mut lines: Vec<Line> = Vec::new();
        for (k, r) in records.iter().enumerate() {
            let ang = angle_of(r.lambda);
            match lines.iter_mut().find(|l| same_angle(l.angle, ang)) {
                Some(l) => l.idx.push(k),
                None => lines.push(Line {
                    angle: ang,
                    radii: Vec::new(),
                    idx: vec![k],
                }),
            }
        }
        for l in &mut lines {
            l.idx.sort_by(|&p, &q| records[p].lambda.norm().total_cmp(&records[q].lambda.norm()));
            l.radii = l.idx.iter().map(|&k| records[k].lambda.norm()).collect();
        }
        Self { meta, records, lines }
    }

    /// Integrates a, b and A, B at every sample inside their half-planes.
    pub fn build(
        samples: &[(SampleLabel, C64)],
        initial: Option<&dyn InitialData>,
        boundary: Option<&dyn BoundaryData>,
        mut meta: SpectralMeta,
        opts: &IntegratorOptions,
    ) -> Result<Self> {
        meta.x_max = initial.map(|d| d.x_max());
        meta.length = boundary.map(|g| g.length());
        meta.rtol = opts.rtol;
        let mut records = Vec::with_capacity(samples.len());
        for &(label, l) in samples {
            let (mut a, mut b, mut big_a, mut big_b) = (None, None, None, None);
            if let Some(d) = initial.filter(|_| im_lambda2_nonneg(l)) {
                let v = spectral_ab(d, l, opts)?;
                a = Some(v.0);
                b = Some(v.1);
            }
            if let Some(g) = boundary.filter(|_| im_lambda6_nonneg(l)) {
                let v = spectral_big_ab(g, l, AbRoute::Mu2, opts)?;
                big_a = Some(v.0);
                big_b = Some(v.1);
            }
            let c_plus = match (a, b, big_a, big_b, meta.length) {
                (Some(a), Some(b), Some(ba), Some(bb), Some(len)) => {
                    Some((a * bb - b * ba) * (-I * l.powi(6) * (4.0 * len)).exp())
                }
                _ => None,
            };
            records.push(SpectralRecord {
                label,
                lambda: l,
                a,
                b,
                big_a,
                big_b,
                c_plus,
            });
        }
        Ok(Self::new(meta, records))
    }

    /// Joins an (a, b) table with an (A, B) table over the same samples and
    /// fills in c+.
    pub fn merge(&self, other: &SpectralTable) -> Result<SpectralTable> {
        if self.records.len() != other.records.len() {
            return Err(Error::Validation(format!(
                "tables hold {} and {} samples",
                self.records.len(),
                other.records.len()
            )));
        }
        let pick = |p: Option<f64>, q: Option<f64>| p.or(q);
        let meta = SpectralMeta {
            x_max: pick(self.meta.x_max, other.meta.x_max),
            length: pick(self.meta.length, other.meta.length),
            radius: self.meta.radius,
            nodes_per_ray: self.meta.nodes_per_ray,
            rtol: self.meta.rtol.max(other.meta.rtol),
        };
        let mut records = Vec::with_capacity(self.records.len());
        for (p, q) in self.records.iter().zip(&other.records) {
            if p.label != q.label || (p.lambda - q.lambda).norm() > 1e-12 * p.lambda.norm().max(1.0) {
                return Err(Error::Validation(format!(
                    "sample mismatch: {} vs {}",
                    p.lambda, q.lambda
                )));
            }
            let (a, b) = (p.a.or(q.a), p.b.or(q.b));
            let (big_a, big_b) = (p.big_a.or(q.big_a), p.big_b.or(q.big_b));
            let l = p.lambda;
            let c_plus = match (a, b, big_a, big_b, meta.length) {
                (Some(a), Some(b), Some(ba), Some(bb), Some(len)) => {
                    Some((a * bb - b * ba) * (-I * l.powi(6) * (4.0 * len)).exp())
                }
                _ => p.c_plus.or(q.c_plus),
            };
            records.push(SpectralRecord {
                label: p.label,
                lambda: l,
                a,
                b,
                big_a,
                big_b,
                c_plus,
            });
        }
        Ok(Self::new(meta, records))
    }

    /// Tabulated entry at lambda, exact match or local barycentric
    /// interpolation along the radial line through lambda.
    pub fn lookup(&self, lambda: C64, name: &'static str, get: impl Fn(&SpectralRecord) -> Option<C64>) -> Result<C64> {
        let missing = Error::MissingSpectral { name, lambda };
        let ang = angle_of(lambda);
        let line = match self.lines.iter().find(|l| same_angle(l.angle, ang)) {
            Some(l) => l,
            None => return Err(missing),
        };
        let r = lambda.norm();
        let pos = line.radii.partition_point(|&q| q < r);
        for k in [pos.saturating_sub(1), pos] {
            if k < line.radii.len() && (line.radii[k] - r).abs() <= 1e-12 * r.max(1.0) {
                return get(&self.records[line.idx[k]]).ok_or(missing);
            }
        }
        if pos == 0 || pos == line.radii.len() {
            return Err(missing);
        }
        // up to 8 neighbours around r
        let lo = pos.saturating_sub(4);
        let hi = (pos + 4).min(line.radii.len());
        let mut pts = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            match get(&self.records[line.idx[k]]) {
                Some(v) => pts.push((line.radii[k], v)),
                None => return Err(missing),
            }
        }
        Ok(barycentric(&pts, r))
    }
}

fn barycentric(pts: &[(f64, C64)], r: f64) -> C64 {
    let n = pts.len();
    let w: Vec<f64> = (0..n)
        .map(|j| {
            1.0 / (0..n)
                .filter(|&k| k != j)
                .map(|k| pts[j].0 - pts[k].0)
                .product::<f64>()
        })
        .collect();
    let (mut num, mut den) = (C64::default(), 0.0);
    for j in 0..n {
        let t = w[j] / (r - pts[j].0);
        num += pts[j].1 * t;
        den += t;
    }
    num / den
}

impl SpectralSource for SpectralTable {
    fn ab(&self, lambda: C64) -> Result<(C64, C64)> {
        Ok((self.lookup(lambda, "a", |r| r.a)?, self.lookup(lambda, "b", |r| r.b)?))
    }
    fn big_ab(&self, lambda: C64) -> Result<(C64, C64)> {
        Ok((
            self.lookup(lambda, "A", |r| r.big_a)?,
            self.lookup(lambda, "B", |r| r.big_b)?,
        ))
    }
    fn horizon(&self) -> f64 {
        self.meta.length.unwrap_or(0.0)
    }
}
