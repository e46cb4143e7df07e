//! Small-matrix Lie algebra and Lie group arithmetic for SO(3), SU(2),
//! SL(2,ℝ) and SO(2,1).
//!
//! All four algebras are three dimensional. Coefficients are stored as
//! complex numbers throughout; the real groups simply carry zero imaginary
//! parts. Bases follow the ordering `(e₊, e₋, e₀)` for the 2×2 groups and
//! the axis generators `(L₁, L₂, L₃)` for SO(3).

mod algebra;
mod expm;
mod group;
mod inertia;

pub use algebra::AlgebraElement;
pub use expm::{exp_map, expm};
pub use group::GroupElement;
pub use inertia::InertiaOperator;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for the defining constraint of a group element.
pub const CONSTRAINT_TOL: f64 = 1e-10;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// The four supported matrix groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupId {
    So3,
    Su2,
    Sl2r,
    So21,
}

/// Which matrix the left argument of the trace pairing is transposed by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceConvention {
    /// `4 Tr(ξᵀ ζ)`
    Transpose,
    /// `4 Tr(ξ ζ)`
    Plain,
}

impl GroupId {
    pub const ALL: [GroupId; 4] = [GroupId::So3, GroupId::Su2, GroupId::Sl2r, GroupId::So21];

    /// Size of the defining matrix representation.
    pub fn dim(self) -> usize {
        match self {
            GroupId::So3 => 3,
            _ => 2,
        }
    }

    /// Whether the defining representation needs complex entries.
    pub fn is_complex(self) -> bool {
        matches!(self, GroupId::Su2 | GroupId::So21)
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupId::So3 => "so3",
            GroupId::Su2 => "su2",
            GroupId::Sl2r => "sl2r",
            GroupId::So21 => "so21",
        }
    }

    /// Component labels used in CSV headers and reports.
    pub fn component_labels(self) -> [&'static str; 3] {
        match self {
            GroupId::So3 => ["1", "2", "3"],
            _ => ["plus", "minus", "zero"],
        }
    }

    pub fn trace_convention(self) -> TraceConvention {
        match self {
            GroupId::So3 | GroupId::Sl2r => TraceConvention::Transpose,
            GroupId::Su2 | GroupId::So21 => TraceConvention::Plain,
        }
    }

    /// Basis matrices of the algebra in the order of the coefficient vector.
    pub fn basis(self) -> [CMatrix; 3] {
        let m2 = |a: C64, b: C64, c: C64, d: C64| CMatrix::from_row_slice(2, 2, &[a, b, c, d]);
        match self {
            GroupId::So3 => {
                let mut out = [CMatrix::zeros(3, 3), CMatrix::zeros(3, 3), CMatrix::zeros(3, 3)];
                for (a, m) in out.iter_mut().enumerate() {
                    for j in 0..3 {
                        for k in 0..3 {
                            m[(j, k)] = C64::from(-f64::from(levi_civita(a, j, k)));
                        }
                    }
                }
                out
            }
            GroupId::Su2 => [
                m2(ZERO, ONE, -ONE, ZERO),
                m2(ZERO, I, I, ZERO),
                m2(I, ZERO, ZERO, -I),
            ],
            GroupId::Sl2r => [
                m2(ZERO, ONE, ZERO, ZERO),
                m2(ZERO, ZERO, ONE, ZERO),
                m2(ONE, ZERO, ZERO, -ONE),
            ],
            GroupId::So21 => [
                m2(I, ZERO, ZERO, -I),
                m2(ZERO, I, -I, ZERO),
                m2(ZERO, -ONE, -ONE, ZERO),
            ],
        }
    }

    /// Integer structure constants `C[a][b][c]` with `[e_a, e_b] = C_ab^c e_c`.
    pub fn structure_constants(self) -> [[[i32; 3]; 3]; 3] {
        // (a, b, c, value) for a < b; the rest follows from antisymmetry.
        let upper: &[(usize, usize, usize, i32)] = match self {
            GroupId::So3 => &[(0, 1, 2, 1), (1, 2, 0, 1), (0, 2, 1, -1)],
            GroupId::Su2 => &[(0, 1, 2, 2), (1, 2, 0, 2), (0, 2, 1, -2)],
            GroupId::Sl2r => &[(0, 1, 2, 1), (0, 2, 0, -2), (1, 2, 1, 2)],
            GroupId::So21 => &[(0, 1, 2, 2), (0, 2, 1, -2), (1, 2, 0, -2)],
        };
        let mut c = [[[0; 3]; 3]; 3];
        for &(a, b, k, v) in upper {
            c[a][b][k] = v;
            c[b][a][k] = -v;
        }
        c
    }

    /// The indefinite form preserved by SO(2,1) elements, `g† η g = η`.
    pub(crate) fn pseudo_metric() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }
}

impl std::fmt::Display for GroupId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GroupId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GroupId::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| format!("unknown group `{s}` (expected so3, su2, sl2r or so21)"))
    }
}

pub(crate) fn levi_civita(i: usize, j: usize, k: usize) -> i32 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// Frobenius norm of a complex matrix.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn det2(m: &CMatrix) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}
