use nalgebra::Matrix3;

use super::{AlgebraElement, CMatrix, GroupId, C64};
use crate::error::{Error, Result};

/// Symmetric invertible operator `J` on algebra coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct InertiaOperator {
    group: GroupId,
    matrix: Matrix3<f64>,
    inverse: Matrix3<f64>,
}

impl InertiaOperator {
    pub fn from_matrix(group: GroupId, matrix: Matrix3<f64>) -> Result<Self> {
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("inertia entries must be finite".into()));
        }
        let scale = matrix.amax().max(1.0);
        if (matrix - matrix.transpose()).amax() > 1e-12 * scale {
            return Err(Error::Domain("inertia matrix must be symmetric".into()));
        }
        let inverse = matrix
            .try_inverse()
            .filter(|inv| inv.iter().all(|v| v.is_finite()))
            .ok_or_else(|| Error::Singular("inertia matrix is not invertible".into()))?;
        Ok(Self {
            group,
            matrix,
            inverse,
        })
    }

    /// `diag(I₊, I₋, I₀)` in the algebra basis.
    pub fn diagonal(group: GroupId, diag: [f64; 3]) -> Result<Self> {
        if diag.contains(&0.0) {
            return Err(Error::Singular(format!(
                "diagonal inertia requires nonzero entries, got {diag:?}"
            )));
        }
        Self::from_matrix(group, Matrix3::from_diagonal(&diag.into()))
    }

    /// Coordinate matrix of `ξ ↦ Iξ + ξI`, projected onto the algebra.
    ///
    /// The anticommutator generally has a trace part outside the algebra;
    /// only its Frobenius projection onto the basis is kept.
    pub fn anticommutator(group: GroupId, i: &CMatrix) -> Result<Self> {
        let n = group.dim();
        if i.nrows() != n || i.ncols() != n {
            return Err(Error::Domain(format!("anticommutator inertia must be {n}x{n}")));
        }
        let mut m = Matrix3::zeros();
        for (b, e) in group.basis().iter().enumerate() {
            let image = i * e + e * i;
            let coords = AlgebraElement::from_matrix(group, &image)?;
            for (a, c) in coords.coeffs().iter().enumerate() {
                if c.im.abs() > 1e-12 * (1.0 + c.re.abs()) {
                    return Err(Error::Domain(
                        "anticommutator inertia does not act by a real coordinate matrix".into(),
                    ));
                }
                m[(a, b)] = c.re;
            }
        }
        Self::from_matrix(group, m)
    }

    /// [`anticommutator`](Self::anticommutator) with `I = diag(entries)`.
    pub fn anticommutator_diag(group: GroupId, entries: &[f64]) -> Result<Self> {
        let n = group.dim();
        if entries.len() != n {
            return Err(Error::Domain(format!(
                "{group} anticommutator inertia takes {n} diagonal entries, got {}",
                entries.len()
            )));
        }
        let mut i = CMatrix::zeros(n, n);
        for (k, v) in entries.iter().enumerate() {
            i[(k, k)] = C64::from(*v);
        }
        Self::anticommutator(group, &i)
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn matrix3(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    /// Diagonal entries when the operator is diagonal in the basis.
    pub fn as_diagonal(&self) -> Option<[f64; 3]> {
        let m = &self.matrix;
        let off = (0..3)
            .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
            .any(|(i, j)| m[(i, j)] != 0.0);
        (!off).then(|| [m[(0, 0)], m[(1, 1)], m[(2, 2)]])
    }

    fn check(&self, xi: &AlgebraElement) -> Result<()> {
        if xi.group() != self.group {
            return Err(Error::GroupMismatch {
                left: self.group,
                right: xi.group(),
            });
        }
        Ok(())
    }

    pub fn apply(&self, xi: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(xi)?;
        Ok(mat_vec(&self.matrix, xi))
    }

    pub fn solve(&self, eta: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(eta)?;
        Ok(mat_vec(&self.inverse, eta))
    }

    /// Coordinate kinetic energy `½ Σ ξ_a J_ab ξ_b` (complex-bilinear).
    pub fn coordinate_cost(&self, xi: &AlgebraElement) -> Result<C64> {
        let j = self.apply(xi)?;
        Ok(xi
            .coeffs()
            .iter()
            .zip(j.coeffs())
            .map(|(a, b)| a * b)
            .sum::<C64>()
            * 0.5)
    }

    /// Trace-pairing kinetic energy `½ ⟨ξ, Jξ⟩` with the group's Killing form.
    pub fn trace_cost(&self, xi: &AlgebraElement) -> Result<C64> {
        let j = self.apply(xi)?;
        Ok(xi.killing_form(&j)? * 0.5)
    }
}

fn mat_vec(m: &Matrix3<f64>, xi: &AlgebraElement) -> AlgebraElement {
    let c = xi.coeffs();
    let mut out = [C64::from(0.0); 3];
    for (a, o) in out.iter_mut().enumerate() {
        *o = (0..3).map(|b| c[b] * m[(a, b)]).sum();
    }
    AlgebraElement::new(xi.group(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::frobenius;
    use proptest::prelude::*;

    #[test]
    fn identity_inertia_is_identity() {
        let j = InertiaOperator::diagonal(GroupId::Sl2r, [1.0, 1.0, 1.0]).unwrap();
        let xi = AlgebraElement::real(GroupId::Sl2r, [0.2, -0.7, 1.5]);
        assert_eq!(j.apply(&xi).unwrap(), xi);
    }

    #[test]
    fn diagonal_scales_eigenvector() {
        let j = InertiaOperator::diagonal(GroupId::Su2, [1.0, 1.0, 2.0]).unwrap();
        let e0 = AlgebraElement::basis(GroupId::Su2, 2);
        assert_eq!(j.apply(&e0).unwrap(), e0 * 2.0);
    }

    #[test]
    fn zero_entry_is_rejected() {
        assert!(matches!(
            InertiaOperator::diagonal(GroupId::So3, [1.0, 0.0, 2.0]),
            Err(Error::Singular(_))
        ));
        let asym = Matrix3::new(1.0, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(InertiaOperator::from_matrix(GroupId::So3, asym).is_err());
    }

    #[test]
    fn anticommutator_matches_matrix_arithmetic() {
        let g = GroupId::Su2;
        let (i1, i2) = (1.5, 0.5);
        let j = InertiaOperator::anticommutator_diag(g, &[i1, i2]).unwrap();
        // Oracle: explicit Iξ+ξI on every basis element, projected by hand.
        let i = CMatrix::from_row_slice(2, 2, &[i1.into(), 0.0.into(), 0.0.into(), i2.into()]);
        for b in 0..3 {
            let e = AlgebraElement::basis(g, b);
            let full = &i * e.matrix() + e.matrix() * &i;
            let traceless = &full - CMatrix::identity(2, 2) * (full.trace() / 2.0);
            let got = j.apply(&e).unwrap().matrix();
            assert!(frobenius(&(got - traceless)) < 1e-14, "column {b}");
        }
        // For diagonal I the projected operator is (i₁+i₂)·Id.
        assert_eq!(j.as_diagonal(), Some([i1 + i2; 3]));
    }

    proptest! {
        #[test]
        fn solve_inverts_apply(d in prop::array::uniform3(0.2f64..5.0), c in prop::array::uniform3(-3.0f64..3.0)) {
            let j = InertiaOperator::diagonal(GroupId::So3, d).unwrap();
            let xi = AlgebraElement::real(GroupId::So3, c);
            let back = j.solve(&j.apply(&xi).unwrap()).unwrap();
            prop_assert!((back - xi).norm() < 1e-12);
        }
    }
}
