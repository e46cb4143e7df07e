//! Matrix exponential by scaling and squaring of a truncated Taylor series.

use super::{AlgebraElement, CMatrix, GroupElement, C64};

/// Taylor degree used after scaling. With `‖A‖₁ ≤ 1/2` the remainder is
/// below `0.5^19 / 19! ≈ 1.6e-23`.
const TAYLOR_DEGREE: usize = 18;
const SCALED_NORM: f64 = 0.5;

fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(A)` for a small dense complex matrix.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * C64::from(2f64.powi(-squarings));

    // Horner: I + A(I + A/2(I + A/3(...)))
    let id = CMatrix::identity(n, n);
    let mut acc = id.clone();
    for k in (1..=TAYLOR_DEGREE).rev() {
        acc = &id + (&scaled * acc) * C64::from(1.0 / k as f64);
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// Exponential map from the algebra to the group.
pub fn exp_map(xi: &AlgebraElement) -> GroupElement {
    GroupElement::from_matrix_unchecked(xi.group(), expm(&xi.matrix()))
}

#[cfg(test)]
mod tests {
    use super::super::{frobenius, GroupId};
    use super::*;
    use proptest::prelude::*;

    /// Plain Taylor series to high order; only usable for moderate norms.
    fn series_oracle(a: &CMatrix, terms: usize) -> CMatrix {
        let n = a.nrows();
        let mut term = CMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..terms {
            term = &term * a * C64::from(1.0 / k as f64);
            sum += &term;
        }
        sum
    }

    #[test]
    fn exp_of_zero_is_identity() {
        for g in GroupId::ALL {
            let e = exp_map(&AlgebraElement::zero(g));
            assert_eq!(e.matrix(), &CMatrix::identity(g.dim(), g.dim()));
        }
    }

    #[test]
    fn sl2r_diagonal_exponential() {
        for t in [-1.5, 0.3, 2.0] {
            let g = exp_map(&(AlgebraElement::basis(GroupId::Sl2r, 2) * t));
            let m = g.matrix();
            assert!((m[(0, 0)] - C64::from(f64::exp(t))).norm() < 1e-14 * f64::exp(t).max(1.0));
            assert!((m[(1, 1)] - C64::from(f64::exp(-t))).norm() < 1e-14);
            assert!(m[(0, 1)].norm() < 1e-15 && m[(1, 0)].norm() < 1e-15);
        }
    }

    #[test]
    fn su2_plus_generator_matches_series_and_rotation() {
        for theta in [0.1, 1.0, 2.5] {
            let xi = AlgebraElement::basis(GroupId::Su2, 0) * theta;
            let m = exp_map(&xi).matrix().clone();
            let oracle = series_oracle(&xi.matrix(), 60);
            assert!(frobenius(&(&m - oracle)) < 1e-12);
            let (s, c) = theta.sin_cos();
            let closed = CMatrix::from_row_slice(2, 2, &[c.into(), s.into(), (-s).into(), c.into()]);
            assert!(frobenius(&(m - closed)) < 1e-12);
        }
    }

    #[test]
    fn so3_matches_rodrigues() {
        let w = [0.4, -1.1, 2.3];
        let xi = AlgebraElement::real(GroupId::So3, w);
        let theta = xi.norm();
        let k = xi.matrix() * C64::from(1.0 / theta);
        let r = CMatrix::identity(3, 3)
            + &k * C64::from(theta.sin())
            + &k * &k * C64::from(1.0 - theta.cos());
        assert!(frobenius(&(exp_map(&xi).matrix() - r)) < 1e-12);
    }

    fn coeffs() -> impl Strategy<Value = [f64; 3]> {
        prop::array::uniform3(-5.0f64..5.0).prop_filter("norm <= 5", |c| {
            c.iter().map(|x| x * x).sum::<f64>() <= 25.0
        })
    }

    proptest! {
        #[test]
        fn exp_preserves_group_constraint(c in coeffs(), gi in 0usize..4) {
            let g = GroupId::ALL[gi];
            let e = exp_map(&AlgebraElement::real(g, c));
            prop_assert!(e.constraint_residual() < 1e-10, "{} {}", g, e.constraint_residual());
        }

        #[test]
        fn one_parameter_subgroup_property(c in prop::array::uniform3(-1.0f64..1.0),
                                           s in -1.0f64..1.0, t in -1.0f64..1.0, gi in 0usize..4) {
            let g = GroupId::ALL[gi];
            let xi = AlgebraElement::real(g, c);
            let lhs = exp_map(&(xi * (s + t)));
            let rhs = exp_map(&(xi * s)).compose(&exp_map(&(xi * t))).unwrap();
            prop_assert!(frobenius(&(lhs.matrix() - rhs.matrix())) < 1e-9);
        }
    }
}
