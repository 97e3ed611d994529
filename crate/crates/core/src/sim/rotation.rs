use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use super::SimError;

/// Complex amplitude of a basis term.
pub type Amplitude = Complex64;

const UNITARITY_TOL: f64 = 1e-9;

/// Tolerance used when recognising a rotation as one of the named gates.
const CLASS_TOL: f64 = 1e-12;

/// A single-qubit unitary stored as a row-major 2×2 matrix.
///
/// Every single-qubit operation in a program (X, H, phase gates, ...) is a
/// `Rotation`. Construction checks `M·M† = I` elementwise.
#[derive(Clone, Copy, PartialEq)]
pub struct Rotation {
    m: [[Amplitude; 2]; 2],
}

/// Named gates recognised by [`Rotation::class`]; codes use these to pick
/// transversal implementations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateClass {
    Identity,
    X,
    Y,
    Z,
    H,
    S,
}

/// Single-qubit Pauli error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn rotation(self) -> Rotation {
        match self {
            Pauli::X => Rotation::x(),
            Pauli::Y => Rotation::y(),
            Pauli::Z => Rotation::z(),
        }
    }
}

fn c(re: f64, im: f64) -> Amplitude {
    Complex64::new(re, im)
}

impl Rotation {
    pub fn new(m: [[Amplitude; 2]; 2]) -> Result<Self, SimError> {
        if m.iter().flatten().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(SimError::NonUnitary);
        }
        for i in 0..2 {
            for j in 0..2 {
                let dot = m[i][0] * m[j][0].conj() + m[i][1] * m[j][1].conj();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (dot.re - expect).abs() > UNITARITY_TOL || dot.im.abs() > UNITARITY_TOL {
                    return Err(SimError::NonUnitary);
                }
            }
        }
        Ok(Self { m })
    }

    const fn raw(m: [[Amplitude; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self::raw([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]])
    }

    /// Pauli X, the quantum NOT.
    pub fn x() -> Self {
        Self::raw([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
    }

    pub fn y() -> Self {
        Self::raw([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
    }

    pub fn z() -> Self {
        Self::raw([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
    }

    pub fn h() -> Self {
        let r = FRAC_1_SQRT_2;
        Self::raw([[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]])
    }

    pub fn s() -> Self {
        Self::raw([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]])
    }

    /// `diag(1, e^{iθ})`.
    pub fn phase(theta: f64) -> Self {
        Self::raw([
            [c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), Complex64::from_polar(1.0, theta)],
        ])
    }

    pub fn of_class(class: GateClass) -> Self {
        match class {
            GateClass::Identity => Self::identity(),
            GateClass::X => Self::x(),
            GateClass::Y => Self::y(),
            GateClass::Z => Self::z(),
            GateClass::H => Self::h(),
            GateClass::S => Self::s(),
        }
    }

    pub fn matrix(&self) -> &[[Amplitude; 2]; 2] {
        &self.m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::raw([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Rotation) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self::raw(out)
    }

    /// The named gate this matrix equals exactly (no global phase allowance).
    pub fn class(&self) -> Option<GateClass> {
        use GateClass::*;
        [Identity, X, Y, Z, H, S]
            .into_iter()
            .find(|&g| self.approx_eq(&Self::of_class(g), CLASS_TOL))
    }

    pub fn approx_eq(&self, other: &Rotation, tol: f64) -> bool {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .all(|(a, b)| (a - b).norm() <= tol)
    }
}

impl fmt::Debug for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.class() {
            Some(g) => write!(f, "{g:?}"),
            None => write!(f, "Rotation({:?})", self.m),
        }
    }
}
