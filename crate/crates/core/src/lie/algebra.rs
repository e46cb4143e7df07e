use std::ops::{Add, Mul, Neg, Sub};

use super::{frobenius, CMatrix, GroupId, TraceConvention, C64};
use crate::error::{Error, Result};

/// An element `ξ = Σ ξ_a e_a` of one of the supported Lie algebras.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgebraElement {
    group: GroupId,
    coeffs: [C64; 3],
}

impl AlgebraElement {
    pub fn new(group: GroupId, coeffs: [C64; 3]) -> Self {
        Self { group, coeffs }
    }

    pub fn real(group: GroupId, coeffs: [f64; 3]) -> Self {
        Self::new(group, coeffs.map(C64::from))
    }

    pub fn zero(group: GroupId) -> Self {
        Self::real(group, [0.0; 3])
    }

    /// The `index`-th basis element.
    pub fn basis(group: GroupId, index: usize) -> Self {
        let mut c = [0.0; 3];
        c[index] = 1.0;
        Self::real(group, c)
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn coeffs(&self) -> &[C64; 3] {
        &self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|z| z.im == 0.0)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Matrix of `ξ` in the defining representation.
    pub fn matrix(&self) -> CMatrix {
        let n = self.group.dim();
        let mut m = CMatrix::zeros(n, n);
        for (c, e) in self.coeffs.iter().zip(self.group.basis()) {
            m += e * *c;
        }
        m
    }

    /// Orthogonal (Frobenius) projection of `m` onto the span of the basis.
    ///
    /// All four bases are Frobenius-orthogonal, so this is exact for any
    /// matrix in the complex span.
    pub fn from_matrix(group: GroupId, m: &CMatrix) -> Result<Self> {
        let n = group.dim();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Domain(format!(
                "{group} expects a {n}x{n} matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let basis = group.basis();
        let mut coeffs = [C64::from(0.0); 3];
        for (c, e) in coeffs.iter_mut().zip(basis.iter()) {
            let num: C64 = e.iter().zip(m.iter()).map(|(a, b)| a.conj() * b).sum();
            let den: f64 = e.iter().map(|a| a.norm_sqr()).sum();
            *c = num / den;
        }
        Ok(Self { group, coeffs })
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch {
                left: self.group,
                right: other.group,
            });
        }
        Ok(())
    }

    /// Lie bracket by structure-constant contraction.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let c = self.group.structure_constants();
        let mut out = [C64::from(0.0); 3];
        for a in 0..3 {
            for b in 0..3 {
                let ab = self.coeffs[a] * other.coeffs[b];
                for (k, o) in out.iter_mut().enumerate() {
                    if c[a][b][k] != 0 {
                        *o += ab * f64::from(c[a][b][k]);
                    }
                }
            }
        }
        Ok(Self::new(self.group, out))
    }

    /// The trace pairing used as the group's Killing form:
    /// `4 Tr(ξᵀζ)` for SO(3) and SL(2,ℝ), `4 Tr(ξζ)` for SU(2) and SO(2,1).
    ///
    /// Complex-bilinear; no conjugation is applied.
    pub fn killing_form(&self, other: &Self) -> Result<C64> {
        self.check_same(other)?;
        let a = self.matrix();
        let b = other.matrix();
        let lhs = match self.group.trace_convention() {
            TraceConvention::Transpose => a.transpose(),
            TraceConvention::Plain => a,
        };
        Ok((lhs * b).trace() * 4.0)
    }

    /// Conjugate transpose of the matrix, re-expanded in the basis.
    pub fn star(&self) -> Self {
        let m = self.matrix().adjoint();
        Self::from_matrix(self.group, &m).expect("square matrix of matching size")
    }

    /// Distance of the matrix from the real Lie algebra of the group, by
    /// the group's defining tangent-space predicate.
    pub fn tangent_residual(&self) -> f64 {
        tangent_predicate_residual(self.group, &self.matrix())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::new(self.group, self.coeffs.map(f))
    }
}

/// Residual of the tangent-space predicate at the identity for a matrix.
pub(crate) fn tangent_predicate_residual(group: GroupId, m: &CMatrix) -> f64 {
    let trace = m.trace().norm();
    match group {
        GroupId::So3 => {
            let imag: f64 = m.iter().map(|z| z.im.abs()).sum();
            frobenius(&(m + m.transpose())) + imag
        }
        GroupId::Su2 => frobenius(&(m + m.adjoint())) + trace,
        GroupId::Sl2r => {
            let imag: f64 = m.iter().map(|z| z.im.abs()).sum();
            trace + imag
        }
        GroupId::So21 => {
            let eta = GroupId::pseudo_metric();
            frobenius(&(m.adjoint() * &eta + &eta * m)) + trace
        }
    }
}

impl Add for AlgebraElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.group, rhs.group);
        let mut c = self.coeffs;
        for (a, b) in c.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        Self::new(self.group, c)
    }
}

impl Sub for AlgebraElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for AlgebraElement {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl Mul<f64> for AlgebraElement {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.map(|z| z * s)
    }
}

impl Mul<C64> for AlgebraElement {
    type Output = Self;
    fn mul(self, s: C64) -> Self {
        self.map(|z| z * s)
    }
}
