//! Composite quadrature and finite-difference derivatives on uniform grids.

use crate::actions::Value;
use crate::error::{Error, Result};
use crate::lie::{AlgebraElement, CMatrix, C64};

/// Types that admit real linear combinations.
pub trait Linear: Sized {
    fn combine(terms: &[(f64, &Self)]) -> Self;
}

impl Linear for C64 {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        terms.iter().map(|(w, z)| **z * *w).sum()
    }
}

impl Linear for f64 {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        terms.iter().map(|(w, z)| **z * *w).sum()
    }
}

impl Linear for CMatrix {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        let (_, first) = terms[0];
        let mut acc = CMatrix::zeros(first.nrows(), first.ncols());
        for (w, m) in terms {
            acc += *m * C64::from(*w);
        }
        acc
    }
}

impl Linear for AlgebraElement {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        let (_, first) = terms[0];
        let mut c = [C64::from(0.0); 3];
        for (w, xi) in terms {
            for (a, b) in c.iter_mut().zip(xi.coeffs()) {
                *a += b * *w;
            }
        }
        AlgebraElement::new(first.group(), c)
    }
}

impl Linear for Value {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        match terms[0].1 {
            Value::Scalar(_) => {
                let z = terms
                    .iter()
                    .map(|(w, v)| v.as_scalar().expect("homogeneous values") * *w)
                    .sum();
                Value::Scalar(z)
            }
            Value::Matrix(_) => {
                let ms: Vec<(f64, &CMatrix)> = terms
                    .iter()
                    .map(|(w, v)| (*w, v.as_matrix().expect("homogeneous values")))
                    .collect();
                Value::Matrix(CMatrix::combine(&ms))
            }
        }
    }
}

/// Composite Simpson rule; an odd number of intervals closes with the 3/8 rule.
pub fn simpson<T: Linear>(values: &[T], h: f64) -> Result<T> {
    let n = values.len();
    if n < 3 {
        return Err(Error::Domain(format!(
            "quadrature needs at least 3 samples, got {n}"
        )));
    }
    let intervals = n - 1;
    let simpson_end = if intervals.is_multiple_of(2) { n - 1 } else { n - 4 };
    let mut terms: Vec<(f64, &T)> = Vec::with_capacity(n + 4);
    if simpson_end > 0 {
        terms.push((h / 3.0, &values[0]));
        for (k, v) in values.iter().enumerate().take(simpson_end).skip(1) {
            terms.push((if k % 2 == 1 { 4.0 } else { 2.0 } * h / 3.0, v));
        }
        terms.push((h / 3.0, &values[simpson_end]));
    }
    if intervals % 2 == 1 {
        let s = simpson_end;
        let w = 3.0 * h / 8.0;
        terms.extend([
            (w, &values[s]),
            (3.0 * w, &values[s + 1]),
            (3.0 * w, &values[s + 2]),
            (w, &values[s + 3]),
        ]);
    }
    Ok(T::combine(&terms))
}

/// Second-order central differences with one-sided second-order end stencils.
pub fn central_difference<T: Linear>(values: &[T], h: f64) -> Result<Vec<T>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::Domain("central differences need at least 3 samples".into()));
    }
    let w = 1.0 / (2.0 * h);
    let v = values;
    let mut out = Vec::with_capacity(n);
    out.push(T::combine(&[(-3.0 * w, &v[0]), (4.0 * w, &v[1]), (-w, &v[2])]));
    for k in 1..n - 1 {
        out.push(T::combine(&[(w, &v[k + 1]), (-w, &v[k - 1])]));
    }
    out.push(T::combine(&[
        (3.0 * w, &v[n - 1]),
        (-4.0 * w, &v[n - 2]),
        (w, &v[n - 3]),
    ]));
    Ok(out)
}

/// Fourth-order differences: five-point central stencil inside, one-sided
/// fourth-order stencils on the first and last two samples.
pub fn fourth_order_difference<T: Linear>(values: &[T], h: f64) -> Result<Vec<T>> {
    let n = values.len();
    if n < 5 {
        return Err(Error::Domain("fourth-order differences need at least 5 samples".into()));
    }
    let w = 1.0 / (12.0 * h);
    let v = values;
    let fwd0 = [-25.0, 48.0, -36.0, 16.0, -3.0];
    let fwd1 = [-3.0, -10.0, 18.0, -6.0, 1.0];
    let stencil = |base: usize, coeffs: &[f64; 5], sign: f64, reversed: bool| {
        let terms: Vec<(f64, &T)> = (0..5)
            .map(|i| {
                let idx = if reversed { base - i } else { base + i };
                (sign * coeffs[i] * w, &v[idx])
            })
            .collect();
        T::combine(&terms)
    };
    let mut out = Vec::with_capacity(n);
    out.push(stencil(0, &fwd0, 1.0, false));
    out.push(stencil(0, &fwd1, 1.0, false));
    for k in 2..n - 2 {
        out.push(T::combine(&[
            (w, &v[k - 2]),
            (-8.0 * w, &v[k - 1]),
            (8.0 * w, &v[k + 1]),
            (-w, &v[k + 2]),
        ]));
    }
    out.push(stencil(n - 1, &fwd1, -1.0, true));
    out.push(stencil(n - 1, &fwd0, -1.0, true));
    Ok(out)
}
