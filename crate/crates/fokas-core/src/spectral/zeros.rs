//! Argument-principle zero search with Newton polishing.

use std::f64::consts::PI;

use super::{alpha, SpectralSource};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Search region: a Cartesian box or an annular sector, both parametrized
/// over the unit square so they subdivide the same way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Box { re: (f64, f64), im: (f64, f64) },
    Annular { r: (f64, f64), phi: (f64, f64) },
}

impl Region {
    fn map(&self, s: f64, t: f64) -> C64 {
        match *self {
            Region::Box { re, im } => C64::new(re.0 + s * (re.1 - re.0), im.0 + t * (im.1 - im.0)),
            Region::Annular { r, phi } => C64::from_polar(r.0 + s * (r.1 - r.0), phi.0 + t * (phi.1 - phi.0)),
        }
    }

    fn sub(&self, s: (f64, f64), t: (f64, f64)) -> Region {
        match *self {
            Region::Box { re, im } => Region::Box {
                re: (re.0 + s.0 * (re.1 - re.0), re.0 + s.1 * (re.1 - re.0)),
                im: (im.0 + t.0 * (im.1 - im.0), im.0 + t.1 * (im.1 - im.0)),
            },
            Region::Annular { r, phi } => Region::Annular {
                r: (r.0 + s.0 * (r.1 - r.0), r.0 + s.1 * (r.1 - r.0)),
                phi: (phi.0 + t.0 * (phi.1 - phi.0), phi.0 + t.1 * (phi.1 - phi.0)),
            },
        }
    }

    pub fn contains(&self, z: C64) -> bool {
        match *self {
            Region::Box { re, im } => z.re >= re.0 && z.re <= re.1 && z.im >= im.0 && z.im <= im.1,
            Region::Annular { r, phi } => {
                let m = z.norm();
                let d = (z.arg() - phi.0).rem_euclid(2.0 * PI);
                m >= r.0 && m <= r.1 && d <= phi.1 - phi.0
            }
        }
    }

    fn center(&self) -> C64 {
        self.map(0.5, 0.5)
    }

    fn diameter(&self) -> f64 {
        (self.map(0.0, 0.0) - self.map(1.0, 1.0))
            .norm()
            .max((self.map(1.0, 0.0) - self.map(0.0, 1.0)).norm())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroOptions {
    /// Boundary samples per edge before adaptive refinement.
    pub edge_samples: usize,
    pub max_depth: usize,
    pub newton_tol: f64,
    pub diff_step: f64,
}

impl Default for ZeroOptions {
    fn default() -> Self {
        Self {
            edge_samples: 16,
            max_depth: 10,
            newton_tol: 1e-10,
            diff_step: 1e-6,
        }
    }
}

/// An isolated simple zero with f'(zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub location: C64,
    pub derivative: C64,
}

/// Zeros of a and alpha with their region labels.
#[derive(Debug, Clone, Default)]
pub struct ZeroSet {
    /// zeros of a in D1 u D3 (upper list) and D4 u D6 (lower list)
    pub a_upper: Vec<Zero>,
    pub a_lower: Vec<Zero>,
    pub alpha_upper: Vec<Zero>,
    pub alpha_lower: Vec<Zero>,
    /// zeros of A, used by the y-problem
    pub big_a: Vec<Zero>,
}

impl ZeroSet {
    pub fn is_empty(&self) -> bool {
        self.a_upper.is_empty()
            && self.a_lower.is_empty()
            && self.alpha_upper.is_empty()
            && self.alpha_lower.is_empty()
            && self.big_a.is_empty()
    }
}

fn central_diff(f: &dyn Fn(C64) -> Result<C64>, z: C64, h: f64) -> Result<C64> {
    Ok((f(z + h)? - f(z - h)?) / (2.0 * h))
}

/// Winding number of f along the boundary of `region`.
fn winding(f: &dyn Fn(C64) -> Result<C64>, region: &Region, opts: &ZeroOptions) -> Result<i64> {
    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)];
    let mut total = 0.0;
    for e in corners.windows(2) {
        let (p, q) = (e[0], e[1]);
        let at = |u: f64| region.map(p.0 + u * (q.0 - p.0), p.1 + u * (q.1 - p.1));
        let n = opts.edge_samples;
        let mut prev_u = 0.0;
        let mut prev = f(at(0.0))?;
        for k in 1..=n {
            let u1 = k as f64 / n as f64;
            total += arg_increment(f, &at, prev_u, prev, u1, 0)?;
            prev = f(at(u1))?;
            prev_u = u1;
        }
    }
    let w = total / (2.0 * PI);
    Ok(w.round() as i64)
}

/// arg f(at(u1)) - arg f(at(u0)), bisecting until each step turns by < pi/4.
fn arg_increment(
    f: &dyn Fn(C64) -> Result<C64>,
    at: &dyn Fn(f64) -> C64,
    u0: f64,
    f0: C64,
    u1: f64,
    depth: usize,
) -> Result<f64> {
    let f1 = f(at(u1))?;
    if f0.norm() == 0.0 || f1.norm() == 0.0 {
        return Err(Error::ClusteredZeros {
            near: at(u0),
            winding: 0,
        });
    }
    let d = (f1 / f0).arg();
    if d.abs() < PI / 4.0 {
        return Ok(d);
    }
    if depth > 40 {
        return Err(Error::ClusteredZeros {
            near: at(u0),
            winding: 0,
        });
    }
    let um = 0.5 * (u0 + u1);
    let fm = f(at(um))?;
    Ok(arg_increment(f, at, u0, f0, um, depth + 1)? + arg_increment(f, at, um, fm, u1, depth + 1)?)
}

fn newton(f: &dyn Fn(C64) -> Result<C64>, start: C64, opts: &ZeroOptions) -> Result<Option<C64>> {
    let mut z = start;
    for _ in 0..60 {
        let v = f(z)?;
        if v.norm() < opts.newton_tol {
            return Ok(Some(z));
        }
        let d = central_diff(f, z, opts.diff_step)?;
        if d.norm() == 0.0 {
            return Ok(None);
        }
        z -= v / d;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Ok(None);
        }
    }
    Ok(None)
}

fn search(
    f: &dyn Fn(C64) -> Result<C64>,
    region: Region,
    w: i64,
    depth: usize,
    opts: &ZeroOptions,
    out: &mut Vec<Zero>,
) -> Result<()> {
    if w == 0 {
        return Ok(());
    }
    if w < 0 {
        return Err(Error::ClusteredZeros {
            near: region.center(),
            winding: w,
        });
    }
    if w == 1 {
        if let Some(z) = newton(f, region.center(), opts)? {
            if region.contains(z) {
                let derivative = central_diff(f, z, opts.diff_step)?;
                out.push(Zero { location: z, derivative });
                return Ok(());
            }
        }
    }
    if depth >= opts.max_depth || region.diameter() < 1e-9 {
        return Err(Error::ClusteredZeros {
            near: region.center(),
            winding: w,
        });
    }
    // off-centre splits avoid zeros on symmetric split lines
    for split in [0.5123, 0.4571, 0.5389] {
        let halves = [(0.0, split), (split, 1.0)];
        let mut cells = Vec::with_capacity(4);
        let mut sum = 0;
        for s in halves {
            for t in halves {
                let c = region.sub(s, t);
                let cw = match winding(f, &c, opts) {
                    Ok(cw) => cw,
                    Err(Error::ClusteredZeros { .. }) => {
                        sum = i64::MIN;
                        break;
                    }
                    Err(e) => return Err(e),
                };
                sum += cw;
                cells.push((c, cw));
            }
            if sum == i64::MIN {
                break;
            }
        }
        if sum == w {
            for (c, cw) in cells {
                search(f, c, cw, depth + 1, opts, out)?;
            }
            return Ok(());
        }
    }
    Err(Error::ClusteredZeros {
        near: region.center(),
        winding: w,
    })
}

/// All zeros of an analytic f inside `region`; the count always equals the
/// winding number along the region boundary.
pub fn find_zeros(f: &dyn Fn(C64) -> Result<C64>, region: &Region, opts: &ZeroOptions) -> Result<Vec<Zero>> {
    let w = winding(f, region, opts)?;
    let mut out = Vec::new();
    search(f, *region, w, 0, opts, &mut out)?;
    out.sort_by(|p, q| p.location.re.total_cmp(&q.location.re).then(p.location.im.total_cmp(&q.location.im)));
    Ok(out)
}

/// max |f - 1| over `samples` points on the circle of the given radius
/// restricted to the angular window.
pub fn certify_exclusion(f: &dyn Fn(C64) -> Result<C64>, radius: f64, phi: (f64, f64), samples: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..samples {
        let t = phi.0 + (phi.1 - phi.0) * k as f64 / (samples.max(2) - 1) as f64;
        worst = worst.max((f(C64::from_polar(radius, t))? - 1.0).norm());
    }
    Ok(worst)
}

/// Wedges (both halves) of the given sectors as annular regions out to `radius`.
pub fn sector_regions(sectors: &[u8], inner: f64, radius: f64) -> Vec<Region> {
    let mut out = Vec::new();
    for &k in sectors {
        let (lo, hi) = (f64::from(k - 1) * PI / 6.0, f64::from(k) * PI / 6.0);
        for shift in [0.0, PI] {
            out.push(Region::Annular {
                r: (inner, radius),
                phi: (lo + shift, hi + shift),
            });
        }
    }
    out
}

/// Zeros of a in D1 u D3, alpha in D5 and A in D1 u D3 u D5, each inside
/// |lambda| <= radius; the lower lists hold the conjugate partners.
pub fn zero_set(src: &dyn SpectralSource, radius: f64, opts: &ZeroOptions) -> Result<ZeroSet> {
    const INNER: f64 = 1e-3;
    let collect = |f: &dyn Fn(C64) -> Result<C64>, sectors: &[u8]| -> Result<Vec<Zero>> {
        let mut v = Vec::new();
        for region in sector_regions(sectors, INNER, radius) {
            v.extend(find_zeros(f, &region, opts)?);
        }
        Ok(v)
    };
    let conj = |v: &[Zero]| -> Vec<Zero> {
        v.iter()
            .map(|z| Zero {
                location: z.location.conj(),
                derivative: z.derivative.conj(),
            })
            .collect()
    };
    let a_fn = |l: C64| Ok(src.ab(l)?.0);
    let al_fn = |l: C64| alpha(src, l);
    let big_a_fn = |l: C64| Ok(src.big_ab(l)?.0);
    let a_upper = collect(&a_fn, &[1, 3])?;
    let alpha_upper = collect(&al_fn, &[5])?;
    Ok(ZeroSet {
        a_lower: conj(&a_upper),
        alpha_lower: conj(&alpha_upper),
        a_upper,
        alpha_upper,
        big_a: collect(&big_a_fn, &[1, 3, 5])?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn quadratic_roots_in_box() {
        let z0 = c(1.0, 1.0);
        let f = |l: C64| -> Result<C64> { Ok(l * l - z0) };
        let region = Region::Box { re: (-2.0, 2.0), im: (-2.0, 2.0) };
        let zs = find_zeros(&f, &region, &ZeroOptions::default()).unwrap();
        assert_eq!(zs.len(), 2);
        let r = z0.sqrt();
        assert!((zs[0].location + r).norm() < 1e-10);
        assert!((zs[1].location - r).norm() < 1e-10);
        assert!((zs[1].derivative - r * 2.0).norm() < 1e-8);
    }

    #[test]
    fn constant_has_no_zeros() {
        let f = |_l: C64| -> Result<C64> { Ok(c(1.0, 0.0)) };
        let region = Region::Annular { r: (0.01, 8.0), phi: (0.0, PI / 2.0) };
        assert!(find_zeros(&f, &region, &ZeroOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn double_root_is_reported() {
        let f = |l: C64| -> Result<C64> { Ok((l - c(0.3, 0.2)) * (l - c(0.3, 0.2))) };
        let region = Region::Box { re: (-1.0, 1.0), im: (-1.0, 1.0) };
        let opts = ZeroOptions { max_depth: 4, ..Default::default() };
        assert!(matches!(find_zeros(&f, &region, &opts), Err(Error::ClusteredZeros { .. })));
    }

    #[test]
    fn trivial_source_is_zero_free() {
        let src = crate::spectral::FnSpectral {
            ab: |_| (C64::new(1.0, 0.0), C64::default()),
            big_ab: |_| (C64::new(1.0, 0.0), C64::default()),
            horizon: 0.5,
        };
        assert!(zero_set(&src, 2.0, &ZeroOptions::default()).unwrap().is_empty());
    }
}
