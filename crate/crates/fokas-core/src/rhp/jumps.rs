//! Jump matrices of the four RHP families and their oriented assembly.

use crate::contour::{classify, Contour, Location, LAMBDA2_RAYS, RAY_COUNT};
use crate::error::{Error, Result};
use crate::linalg::{inverse, Matrix2, C64, I};
use crate::spectral::{alpha, beta, RhpFamily, SpectralSource};

const SINGULAR: f64 = 1e-12;

impl RhpFamily {
    pub fn name(&self) -> &'static str {
        match self {
            RhpFamily::Principal => "principal",
            RhpFamily::X => "x",
            RhpFamily::Y => "y",
            RhpFamily::L => "L",
        }
    }

    /// Rays carrying a jump for this family.
    pub fn rays(&self) -> Vec<usize> {
        match self {
            RhpFamily::Principal | RhpFamily::Y => (0..RAY_COUNT).collect(),
            RhpFamily::X | RhpFamily::L => LAMBDA2_RAYS.to_vec(),
        }
    }

    /// Whether ray k uses the displayed matrix (true) or its inverse in the
    /// convention M_left = M_right J on outward rays.
    pub fn direct_on(&self, k: usize) -> bool {
        match self {
            RhpFamily::Principal | RhpFamily::Y => k.is_multiple_of(2),
            RhpFamily::X | RhpFamily::L => k.is_multiple_of(6),
        }
    }
}

/// Which displayed principal matrix sits on ray k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrincipalPiece {
    J1,
    J2,
    J3,
}

pub fn principal_piece(k: usize) -> PrincipalPiece {
    match k % 6 {
        0 | 3 => PrincipalPiece::J1,
        1 | 2 => PrincipalPiece::J2,
        _ => PrincipalPiece::J3,
    }
}

/// J = [[d11, c12 e^{-i Phi}], [c21 e^{i Phi}, d22]] with the x, y dependence
/// carried by the phase Phi alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpCoefficients {
    pub d11: C64,
    pub c12: C64,
    pub c21: C64,
    pub d22: C64,
}

impl JumpCoefficients {
    pub fn identity() -> Self {
        Self {
            d11: C64::new(1.0, 0.0),
            c12: C64::default(),
            c21: C64::default(),
            d22: C64::new(1.0, 0.0),
        }
    }

    pub fn at_phase(&self, phase: C64) -> Matrix2 {
        let e = (I * phase).exp();
        Matrix2::new(self.d11, self.c12 / e, self.c21 * e, self.d22)
    }
}

fn nonsingular(culprit: &'static str, v: C64, lambda: C64) -> Result<C64> {
    if v.norm() < SINGULAR {
        Err(Error::SingularJump {
            culprit,
            value: v.norm(),
            lambda,
        })
    } else {
        Ok(v)
    }
}

/// Phase Phi(lambda; x, y) of a family; `horizon` is L.
pub fn family_phase(family: RhpFamily, lambda: C64, x: f64, y: f64, horizon: f64) -> C64 {
    let l2 = lambda * lambda;
    let l6 = l2 * l2 * l2;
    match family {
        RhpFamily::Principal => (l2 * x + l6 * (2.0 * y)) * 2.0,
        RhpFamily::X => l2 * (2.0 * x),
        RhpFamily::Y => l6 * (4.0 * y),
        RhpFamily::L => (l2 * x + l6 * (2.0 * horizon)) * 2.0,
    }
}

fn on_family_ray(family: RhpFamily, lambda: C64) -> Result<usize> {
    match classify(lambda) {
        Ok(Location::Ray(k)) if family.rays().contains(&(k as usize)) => Ok(k as usize),
        _ => Err(Error::OffContour {
            family: family.name(),
            lambda,
        }),
    }
}

fn j1_coefficients(src: &dyn SpectralSource, l: C64) -> Result<JumpCoefficients> {
    let (a, b) = src.ab(l)?;
    let (ar, br) = src.ab(l.conj())?;
    let (abar, bbar) = (ar.conj(), br.conj());
    let a = nonsingular("a", a, l)?;
    let abar = nonsingular("conj a(conj lambda)", abar, l)?;
    Ok(JumpCoefficients {
        d11: C64::new(1.0, 0.0),
        c12: b / a,
        c21: -bbar / abar,
        d22: C64::new(1.0, 0.0) / (a * abar),
    })
}

fn j2_coefficients(src: &dyn SpectralSource, l: C64) -> Result<JumpCoefficients> {
    let a = nonsingular("a", src.ab(l)?.0, l)?;
    let alpha_bar = nonsingular("conj alpha(conj lambda)", alpha(src, l.conj())?.conj(), l)?;
    let big_b_bar = src.big_ab(l.conj())?.1.conj();
    Ok(JumpCoefficients {
        d11: a / alpha_bar,
        c12: C64::default(),
        c21: -big_b_bar,
        d22: alpha_bar / a,
    })
}

fn j3_coefficients(src: &dyn SpectralSource, l: C64) -> Result<JumpCoefficients> {
    let abar = nonsingular("conj a(conj lambda)", src.ab(l.conj())?.0.conj(), l)?;
    let al = nonsingular("alpha", alpha(src, l)?, l)?;
    let big_b = src.big_ab(l)?.1;
    Ok(JumpCoefficients {
        d11: abar / al,
        c12: big_b,
        c21: C64::default(),
        d22: al / abar,
    })
}

fn jy_coefficients(src: &dyn SpectralSource, l: C64) -> Result<JumpCoefficients> {
    let (big_a, big_b) = src.big_ab(l)?;
    let (ar, br) = src.big_ab(l.conj())?;
    let big_a = nonsingular("A", big_a, l)?;
    let abar = nonsingular("conj A(conj lambda)", ar.conj(), l)?;
    Ok(JumpCoefficients {
        d11: C64::new(1.0, 0.0) / (big_a * abar),
        c12: big_b / abar,
        c21: -br.conj() / big_a,
        d22: C64::new(1.0, 0.0),
    })
}

fn jl_coefficients(src: &dyn SpectralSource, l: C64) -> Result<JumpCoefficients> {
    let al = nonsingular("alpha", alpha(src, l)?, l)?;
    let alpha_bar = nonsingular("conj alpha(conj lambda)", alpha(src, l.conj())?.conj(), l)?;
    let be = beta(src, l)?;
    let beta_bar = beta(src, l.conj())?.conj();
    Ok(JumpCoefficients {
        d11: C64::new(1.0, 0.0),
        c12: -be / alpha_bar,
        c21: beta_bar / al,
        d22: C64::new(1.0, 0.0) / (al * alpha_bar),
    })
}

/// Coefficients of the displayed jump of `family` at lambda on ray k.
pub fn jump_coefficients(family: RhpFamily, src: &dyn SpectralSource, k: usize, lambda: C64) -> Result<JumpCoefficients> {
    match family {
        RhpFamily::Principal => match principal_piece(k) {
            PrincipalPiece::J1 => j1_coefficients(src, lambda),
            PrincipalPiece::J2 => j2_coefficients(src, lambda),
            PrincipalPiece::J3 => j3_coefficients(src, lambda),
        },
        RhpFamily::X => j1_coefficients(src, lambda),
        RhpFamily::Y => jy_coefficients(src, lambda),
        RhpFamily::L => jl_coefficients(src, lambda),
    }
}

/// The displayed jump matrix of `family` at a contour point.
pub fn assemble_jump(family: RhpFamily, src: &dyn SpectralSource, x: f64, y: f64, lambda: C64) -> Result<Matrix2> {
    let k = on_family_ray(family, lambda)?;
    let c = jump_coefficients(family, src, k, lambda)?;
    Ok(c.at_phase(family_phase(family, lambda, x, y, src.horizon())))
}

/// J4 = J2 J1^{-1} J3, evaluated at a point where all three are defined.
pub fn composite_j4(src: &dyn SpectralSource, x: f64, y: f64, lambda: C64) -> Result<Matrix2> {
    let ph = family_phase(RhpFamily::Principal, lambda, x, y, src.horizon());
    let j1 = j1_coefficients(src, lambda)?.at_phase(ph);
    let j2 = j2_coefficients(src, lambda)?.at_phase(ph);
    let j3 = j3_coefficients(src, lambda)?.at_phase(ph);
    Ok(j2 * inverse(&j1) * j3)
}

/// Per-node jump data of one family on a discretized contour.
#[derive(Debug, Clone)]
pub struct JumpAssembly {
    pub family: RhpFamily,
    pub contour: Contour,
    pub horizon: f64,
    pub nodes: Vec<C64>,
    /// Ray index of every node.
    pub ray_of_node: Vec<usize>,
    pub coefficients: Vec<JumpCoefficients>,
}

impl JumpAssembly {
    /// Evaluates the spectral coefficients at every node of `contour`.
    pub fn new(family: RhpFamily, contour: Contour, src: &dyn SpectralSource) -> Result<Self> {
        let allowed = family.rays();
        let mut nodes = Vec::with_capacity(contour.node_count());
        let mut ray_of_node = Vec::with_capacity(contour.node_count());
        let mut coefficients = Vec::with_capacity(contour.node_count());
        for r in &contour.rays {
            if !allowed.contains(&r.index) {
                return Err(Error::Validation(format!(
                    "ray {} carries no {} jump",
                    r.index,
                    family.name()
                )));
            }
            for z in r.nodes() {
                nodes.push(z);
                ray_of_node.push(r.index);
                coefficients.push(jump_coefficients(family, src, r.index, z)?);
            }
        }
        Ok(Self {
            family,
            contour,
            horizon: src.horizon(),
            nodes,
            ray_of_node,
            coefficients,
        })
    }

    /// Assembly from explicit per-node coefficients (synthetic jumps).
    pub fn from_coefficients(family: RhpFamily, contour: Contour, horizon: f64, coefficients: Vec<JumpCoefficients>) -> Result<Self> {
        if coefficients.len() != contour.node_count() {
            return Err(Error::Validation("one coefficient set per node required".into()));
        }
        let mut nodes = Vec::new();
        let mut ray_of_node = Vec::new();
        for r in &contour.rays {
            for z in r.nodes() {
                nodes.push(z);
                ray_of_node.push(r.index);
            }
        }
        Ok(Self {
            family,
            contour,
            horizon,
            nodes,
            ray_of_node,
            coefficients,
        })
    }

    /// Displayed jumps at (x, y).
    pub fn displayed(&self, x: f64, y: f64) -> Vec<Matrix2> {
        self.nodes
            .iter()
            .zip(&self.coefficients)
            .map(|(&z, c)| c.at_phase(family_phase(self.family, z, x, y, self.horizon)))
            .collect()
    }

    /// Jumps in the solver convention M_+ = M_- J (+ on the left of outward rays).
    pub fn oriented(&self, x: f64, y: f64) -> Vec<Matrix2> {
        self.displayed(x, y)
            .into_iter()
            .zip(&self.ray_of_node)
            .map(|(j, &k)| if self.family.direct_on(k) { j } else { inverse(&j) })
            .collect()
    }

    /// |J - I| at the outermost node of every ray, the truncation error proxy.
    pub fn truncation_defect(&self, x: f64, y: f64) -> f64 {
        let n = self.contour.nodes_per_ray;
        self.displayed(x, y)
            .iter()
            .enumerate()
            .filter(|(i, _)| (i + 1) % n == 0)
            .map(|(_, j)| crate::linalg::max_abs(&(j - Matrix2::identity())))
            .fold(0.0, f64::max)
    }
}

/// Ordered product of oriented jumps around the origin at radius r:
/// crossing ray k counterclockwise multiplies by J_k on the right.
pub fn monodromy(family: RhpFamily, src: &dyn SpectralSource, x: f64, y: f64, r: f64) -> Result<Matrix2> {
    let mut p = Matrix2::identity();
    for k in family.rays() {
        let z = crate::contour::ray_direction(k) * r;
        let j = jump_coefficients(family, src, k, z)?.at_phase(family_phase(family, z, x, y, src.horizon()));
        let jo = if family.direct_on(k) { j } else { inverse(&j) };
        p *= jo;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::spectral::FnSpectral;

    fn synthetic() -> FnSpectral<impl Fn(C64) -> (C64, C64) + Sync, impl Fn(C64) -> (C64, C64) + Sync> {
        FnSpectral {
            ab: |l: C64| (1.0 + 0.1 * (-l * l).exp(), 0.05 * l * (-l * l).exp()),
            big_ab: |l: C64| (1.0 + 0.08 * (-l * l).exp(), 0.03 * l * (-l * l * l * l).exp()),
            horizon: 0.5,
        }
    }

    #[test]
    fn trivial_source_gives_identity_jumps() {
        let src = FnSpectral {
            ab: |_| (C64::new(1.0, 0.0), C64::default()),
            big_ab: |_| (C64::new(1.0, 0.0), C64::default()),
            horizon: 1.0,
        };
        for family in [RhpFamily::Principal, RhpFamily::X, RhpFamily::Y, RhpFamily::L] {
            for k in family.rays() {
                let z = crate::contour::ray_direction(k) * 0.9;
                let j = assemble_jump(family, &src, 0.3, 0.2, z).unwrap();
                assert_eq!(j, Matrix2::identity(), "{} ray {k}", family.name());
            }
        }
    }

    #[test]
    fn monodromy_is_identity() {
        let src = synthetic();
        let defect = |r: f64| max_abs(&(monodromy(RhpFamily::Principal, &src, 0.4, 0.1, r).unwrap() - Matrix2::identity()));
        // neighbouring rays are sampled at different points, so the product is I + O(r^2)
        let ratio = defect(0.01) / defect(0.001);
        assert!((80.0..120.0).contains(&ratio), "{ratio}");
        assert!(defect(5e-4) < 1e-6);
    }

    #[test]
    fn hermitian_reflection_symmetry() {
        let src = synthetic();
        for family in [RhpFamily::Principal, RhpFamily::X, RhpFamily::Y, RhpFamily::L] {
            for k in family.rays() {
                let z = crate::contour::ray_direction(k) * 0.8;
                let j = assemble_jump(family, &src, 0.3, 0.05, z).unwrap();
                let r = assemble_jump(family, &src, 0.3, 0.05, -z.conj()).unwrap();
                assert!(max_abs(&(r.adjoint() - j)) < 1e-12, "{} ray {k}", family.name());
            }
        }
    }
}
