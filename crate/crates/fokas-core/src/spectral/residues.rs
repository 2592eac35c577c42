//! Pole data of the sectionally meromorphic RHP solutions.

use super::{alpha, beta, SpectralSource, ZeroSet};
use crate::error::{Error, Result};
use crate::linalg::{C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhpFamily {
    Principal,
    X,
    Y,
    L,
}

/// Exponential factor multiplying a residue coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleExponent {
    /// e^{sign 2i theta(z; x, y)}
    Theta(i8),
    /// e^{sign 4i z^6 y}
    Sextic(i8),
    /// e^{sign 2i (z^2 x + 2 z^6 L)}
    Slice(i8),
}

/// Res{[M]_column, location} = coefficient * exponent * [M(location)]_target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub location: C64,
    pub column: usize,
    pub target: usize,
    pub coefficient: C64,
    pub exponent: PoleExponent,
}

impl Pole {
    pub fn factor(&self, x: f64, y: f64, horizon: f64) -> C64 {
        let z = self.location;
        let z2 = z * z;
        let z6 = z2 * z2 * z2;
        let e = match self.exponent {
            PoleExponent::Theta(s) => I * (z2 * x + z6 * (2.0 * y)) * (2.0 * s as f64),
            PoleExponent::Sextic(s) => I * z6 * (4.0 * y * s as f64),
            PoleExponent::Slice(s) => I * (z2 * x + z6 * (2.0 * horizon)) * (2.0 * s as f64),
        };
        self.coefficient * e.exp()
    }
}

#[derive(Debug, Clone, Default)]
pub struct ResidueData {
    pub poles: Vec<Pole>,
}

impl ResidueData {
    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }
}

const DEGENERATE: f64 = 1e-10;

fn guard(name: &'static str, value: C64, location: C64) -> Result<C64> {
    if value.norm() < DEGENERATE {
        Err(Error::DegenerateResidue {
            name,
            value: value.norm(),
            location,
        })
    } else {
        Ok(value)
    }
}

fn diff(f: &dyn Fn(C64) -> Result<C64>, z: C64) -> Result<C64> {
    let h = 1e-6;
    Ok((f(z + h)? - f(z - h)?) / (2.0 * h))
}

/// Residue coefficients for one RHP family. Zeros are taken from the
/// upper lists of `zeros` (a for principal/x, alpha for principal/L, A for y);
/// each produces a pole and its conjugate partner.
pub fn residue_data(zeros: &ZeroSet, src: &dyn SpectralSource, family: RhpFamily) -> Result<ResidueData> {
    let mut poles = Vec::new();
    let a_fn = |l: C64| -> Result<C64> { Ok(src.ab(l)?.0) };
    let al_fn = |l: C64| alpha(src, l);
    let big_a_fn = |l: C64| -> Result<C64> { Ok(src.big_ab(l)?.0) };

    if matches!(family, RhpFamily::Principal | RhpFamily::X) {
        for zr in &zeros.a_upper {
            let z = zr.location;
            let da = guard("a'", diff(&a_fn, z)?, z)?;
            let b = src.ab(z)?.1;
            poles.push(Pole {
                location: z,
                column: 2,
                target: 1,
                coefficient: b / da,
                exponent: PoleExponent::Theta(-1),
            });
            poles.push(Pole {
                location: z.conj(),
                column: 1,
                target: 2,
                coefficient: b.conj() / da.conj(),
                exponent: PoleExponent::Theta(1),
            });
        }
    }
    if family == RhpFamily::Principal {
        for zr in &zeros.alpha_upper {
            let e = zr.location;
            let dal = guard("alpha'", diff(&al_fn, e)?, e)?;
            // conj(beta(conj e)) and beta(conj e)
            let be_r = beta(src, e.conj())?;
            poles.push(Pole {
                location: e,
                column: 1,
                target: 2,
                coefficient: -be_r.conj() / dal,
                exponent: PoleExponent::Theta(1),
            });
            poles.push(Pole {
                location: e.conj(),
                column: 2,
                target: 1,
                coefficient: -be_r / dal.conj(),
                exponent: PoleExponent::Theta(-1),
            });
        }
    }
    if family == RhpFamily::Y {
        for zr in &zeros.big_a {
            let g = zr.location;
            let da = guard("A'", diff(&big_a_fn, g)?, g)?;
            let bb = guard("B", src.big_ab(g)?.1, g)?;
            poles.push(Pole {
                location: g,
                column: 1,
                target: 2,
                coefficient: C64::new(1.0, 0.0) / (da * bb),
                exponent: PoleExponent::Sextic(1),
            });
            poles.push(Pole {
                location: g.conj(),
                column: 2,
                target: 1,
                coefficient: C64::new(1.0, 0.0) / (da.conj() * bb.conj()),
                exponent: PoleExponent::Sextic(-1),
            });
        }
    }
    if family == RhpFamily::L {
        for zr in &zeros.alpha_upper {
            let e = zr.location;
            let dal = guard("alpha'", diff(&al_fn, e)?, e)?;
            let be = guard("beta", beta(src, e)?, e)?;
            poles.push(Pole {
                location: e,
                column: 1,
                target: 2,
                coefficient: C64::new(1.0, 0.0) / (dal * be),
                exponent: PoleExponent::Slice(1),
            });
            poles.push(Pole {
                location: e.conj(),
                column: 2,
                target: 1,
                coefficient: C64::new(1.0, 0.0) / (be.conj() * dal.conj()),
                exponent: PoleExponent::Slice(-1),
            });
        }
    }
    Ok(ResidueData { poles })
}
