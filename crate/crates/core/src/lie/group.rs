use super::{det2, frobenius, CMatrix, GroupId, CONSTRAINT_TOL, C64};
use crate::error::{Error, Result};

/// A matrix satisfying the defining constraint of its group.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    group: GroupId,
    matrix: CMatrix,
}

impl GroupElement {
    /// Validates the group constraint to [`CONSTRAINT_TOL`].
    pub fn new(group: GroupId, matrix: CMatrix) -> Result<Self> {
        let n = group.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Domain(format!(
                "{group} elements are {n}x{n}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let residual = constraint_residual(group, &matrix);
        if !(residual <= CONSTRAINT_TOL) {
            return Err(Error::ConstraintViolation { residual });
        }
        Ok(Self { group, matrix })
    }

    pub(crate) fn from_matrix_unchecked(group: GroupId, matrix: CMatrix) -> Self {
        Self { group, matrix }
    }

    pub fn identity(group: GroupId) -> Self {
        let n = group.dim();
        Self::from_matrix_unchecked(group, CMatrix::identity(n, n))
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::GroupMismatch {
                left: self.group,
                right: other.group,
            });
        }
        Ok(Self::from_matrix_unchecked(self.group, &self.matrix * &other.matrix))
    }

    pub fn inverse(&self) -> Result<Self> {
        invert(&self.matrix).map(|m| Self::from_matrix_unchecked(self.group, m))
    }

    /// Largest violation of the group's defining equations.
    pub fn constraint_residual(&self) -> f64 {
        constraint_residual(self.group, &self.matrix)
    }
}

/// Inverse of a 2×2 or 3×3 complex matrix.
pub(crate) fn invert(m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() == 2 {
        let d = det2(m);
        if d.norm() < f64::MIN_POSITIVE || !d.is_finite() {
            return Err(Error::Singular("2x2 matrix has zero determinant".into()));
        }
        Ok(CMatrix::from_row_slice(2, 2, &[m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]]) / d)
    } else {
        m.clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("matrix is not invertible".into()))
    }
}

fn constraint_residual(group: GroupId, m: &CMatrix) -> f64 {
    let n = group.dim();
    let id = CMatrix::identity(n, n);
    let imag = || m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let det = m.determinant();
    let det_err = (det - C64::from(1.0)).norm();
    let r = match group {
        GroupId::So3 => frobenius(&(m.transpose() * m - id)).max(imag()).max(det_err),
        GroupId::Su2 => frobenius(&(m.adjoint() * m - id)).max(det_err),
        GroupId::Sl2r => det_err.max(imag()),
        GroupId::So21 => {
            let eta = GroupId::pseudo_metric();
            frobenius(&(m.adjoint() * &eta * m - eta)).max(det_err)
        }
    };
    if r.is_finite() {
        r
    } else {
        f64::INFINITY
    }
}
