//! State spaces, infinitesimal generators, the momentum map and the
//! Pontryagin and Clebsch Lagrangian functions built from them.
//!
//! Two kinds of state space appear:
//!
//! * the group manifold itself, acted on from the right, where the
//!   generator of `ξ` at `x` is the left-invariant field `x·ξ`;
//! * the Möbius line, a scalar `x` (complex for SU(2) and SO(2,1)) whose
//!   generators are quadratic polynomials in `x`, so that the control
//!   system `ẋ = ξ_P(x)` is a Riccati equation.
//!
//! On both spaces the costate `p` is paired with tangent vectors through
//! [`pairing`]: `Re Tr(p† v)` for matrices, plain multiplication on the line.

use crate::error::{Error, Result};
use crate::lie::{frobenius, AlgebraElement, CMatrix, GroupId, InertiaOperator, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Diagonal connection coefficients `(B₊, B₋, B₀)` in the algebra basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionCoefficients(pub [f64; 3]);

impl ConnectionCoefficients {
    pub fn new(diag: [f64; 3]) -> Result<Self> {
        if diag.iter().any(|b| !b.is_finite()) {
            return Err(Error::Domain(format!("connection coefficients must be finite: {diag:?}")));
        }
        Ok(Self(diag))
    }

    /// The Maurer–Cartan case `(1, 1, 1)`.
    pub fn maurer_cartan() -> Self {
        Self([1.0; 3])
    }

    /// `B(ξ)`: componentwise scaling of the coefficients.
    pub fn apply(&self, xi: &AlgebraElement) -> AlgebraElement {
        let c = xi.coeffs();
        AlgebraElement::new(xi.group(), [c[0] * self.0[0], c[1] * self.0[1], c[2] * self.0[2]])
    }
}

impl Default for ConnectionCoefficients {
    fn default() -> Self {
        Self::maurer_cartan()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateSpace {
    GroupManifold(GroupId),
    MoebiusLine(GroupId),
}

impl StateSpace {
    pub fn moebius(group: GroupId) -> Result<Self> {
        if group == GroupId::So3 {
            return Err(Error::Unsupported("SO(3) has no Möbius action on a line".into()));
        }
        Ok(StateSpace::MoebiusLine(group))
    }

    pub fn group(&self) -> GroupId {
        match *self {
            StateSpace::GroupManifold(g) | StateSpace::MoebiusLine(g) => g,
        }
    }

    /// Shape and finiteness check for a point, tangent vector or costate.
    pub fn validate(&self, v: &Value) -> Result<()> {
        let ok = match (self, v) {
            (StateSpace::GroupManifold(g), Value::Matrix(m)) => {
                m.nrows() == g.dim() && m.ncols() == g.dim()
            }
            (StateSpace::MoebiusLine(g), Value::Scalar(z)) => {
                *g != GroupId::So3 && (g.is_complex() || z.im == 0.0)
            }
            _ => false,
        };
        if !ok {
            return Err(Error::Domain(format!("value does not belong to {self:?}")));
        }
        if !v.is_finite() {
            return Err(Error::Domain("value is not finite".into()));
        }
        Ok(())
    }
}

/// A point, tangent vector or costate: a matrix on a group manifold, a
/// scalar on the Möbius line.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Matrix(CMatrix),
    Scalar(C64),
}

impl Value {
    pub fn real(x: f64) -> Self {
        Value::Scalar(C64::from(x))
    }

    pub fn zero_like(&self) -> Self {
        match self {
            Value::Matrix(m) => Value::Matrix(CMatrix::zeros(m.nrows(), m.ncols())),
            Value::Scalar(_) => Value::Scalar(C64::from(0.0)),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Value::Matrix(m) => frobenius(m),
            Value::Scalar(z) => z.norm(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Value::Matrix(m) => m.iter().all(|z| z.is_finite()),
            Value::Scalar(z) => z.is_finite(),
        }
    }

    pub fn as_scalar(&self) -> Option<C64> {
        match self {
            Value::Scalar(z) => Some(*z),
            Value::Matrix(_) => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&CMatrix> {
        match self {
            Value::Matrix(m) => Some(m),
            Value::Scalar(_) => None,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        match self {
            Value::Matrix(m) => Value::Matrix(m * s),
            Value::Scalar(z) => Value::Scalar(z * s),
        }
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: C64, other: &Value) -> Result<Self> {
        match (self, other) {
            (Value::Matrix(a), Value::Matrix(b)) if a.shape() == b.shape() => {
                Ok(Value::Matrix(a + b * s))
            }
            (Value::Scalar(a), Value::Scalar(b)) => Ok(Value::Scalar(a + b * s)),
            _ => Err(Error::Domain("mismatched value shapes".into())),
        }
    }

    pub fn sub(&self, other: &Value) -> Result<Self> {
        self.axpy(C64::from(-1.0), other)
    }
}

/// Pairing of a costate with a tangent vector.
pub fn pairing(p: &Value, v: &Value) -> Result<C64> {
    match (p, v) {
        (Value::Matrix(p), Value::Matrix(v)) if p.shape() == v.shape() => {
            let tr: C64 = p.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            Ok(C64::from(tr.re))
        }
        (Value::Scalar(p), Value::Scalar(v)) => Ok(p * v),
        _ => Err(Error::Domain("pairing of mismatched shapes".into())),
    }
}

/// Coefficients `[q₂, q₁, q₀]` of the Möbius generator `X_a(x) = q₂x² + q₁x + q₀`.
pub fn generator_polynomial(group: GroupId, a: usize, b: &ConnectionCoefficients) -> Result<[C64; 3]> {
    if a > 2 {
        return Err(Error::Domain(format!("basis index {a} out of range")));
    }
    let [bp, bm, b0] = b.0.map(C64::from);
    let z = C64::from(0.0);
    let polys = match group {
        GroupId::Sl2r => [[z, z, bp], [-bm, z, z], [z, b0 * 2.0, z]],
        GroupId::Su2 => [[bp, z, bp], [-I * bm, z, I * bm], [z, I * b0 * 2.0, z]],
        GroupId::So21 => [[z, I * bp * 2.0, z], [I * bm, z, I * bm], [b0, z, -b0]],
        GroupId::So3 => {
            return Err(Error::Unsupported("SO(3) has no Riccati generators".into()))
        }
    };
    Ok(polys[a])
}

fn eval_quadratic(q: &[C64; 3], x: C64) -> C64 {
    (q[0] * x + q[1]) * x + q[2]
}

/// Riccati vector field `a x² + b x + c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiccatiCoefficients {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl RiccatiCoefficients {
    pub fn eval(&self, x: C64) -> C64 {
        (self.a * x + self.b) * x + self.c
    }

    pub fn derivative(&self, x: C64) -> C64 {
        self.a * x * 2.0 + self.b
    }
}

/// The linear map `ξ ↦ (a, b, c)` of the control equation on the Möbius line.
pub fn riccati_coefficients(
    group: GroupId,
    xi: &AlgebraElement,
    b: &ConnectionCoefficients,
) -> Result<RiccatiCoefficients> {
    if xi.group() != group {
        return Err(Error::GroupMismatch {
            left: group,
            right: xi.group(),
        });
    }
    let mut acc = [C64::from(0.0); 3];
    for (k, u) in xi.coeffs().iter().enumerate() {
        let q = generator_polynomial(group, k, b)?;
        for (s, qi) in acc.iter_mut().zip(q) {
            *s += u * qi;
        }
    }
    Ok(RiccatiCoefficients {
        a: acc[0],
        b: acc[1],
        c: acc[2],
    })
}

/// The `a`-th generator `X_a` evaluated at `x`.
pub fn generator_field(
    space: StateSpace,
    a: usize,
    b: &ConnectionCoefficients,
    x: &Value,
) -> Result<Value> {
    if a > 2 {
        return Err(Error::Domain(format!("basis index {a} out of range")));
    }
    infinitesimal_action(space, &AlgebraElement::basis(space.group(), a), b, x)
}

/// `ξ_P(x)`: `x·B(ξ)` on a group manifold, `a x² + b x + c` on the line.
pub fn infinitesimal_action(
    space: StateSpace,
    xi: &AlgebraElement,
    b: &ConnectionCoefficients,
    x: &Value,
) -> Result<Value> {
    space.validate(x)?;
    if xi.group() != space.group() {
        return Err(Error::GroupMismatch {
            left: space.group(),
            right: xi.group(),
        });
    }
    match (space, x) {
        (StateSpace::GroupManifold(_), Value::Matrix(m)) => {
            Ok(Value::Matrix(m * b.apply(xi).matrix()))
        }
        (StateSpace::MoebiusLine(g), Value::Scalar(z)) => {
            Ok(Value::Scalar(riccati_coefficients(g, xi, b)?.eval(*z)))
        }
        _ => unreachable!("validated above"),
    }
}

/// Components `J_a(x, p) = ⟨p, X_a(x)⟩` of the momentum map.
pub fn momentum_map(
    space: StateSpace,
    b: &ConnectionCoefficients,
    x: &Value,
    p: &Value,
) -> Result<[C64; 3]> {
    space.validate(p)?;
    let mut out = [C64::from(0.0); 3];
    for (a, o) in out.iter_mut().enumerate() {
        *o = pairing(p, &generator_field(space, a, b, x)?)?;
    }
    Ok(out)
}

/// Coordinate form of the momentum map contracted with `ξ`: `Σ_a ξ_a J_a`.
pub fn momentum_pairing(
    space: StateSpace,
    b: &ConnectionCoefficients,
    x: &Value,
    p: &Value,
    xi: &AlgebraElement,
) -> Result<C64> {
    let j = momentum_map(space, b, x, p)?;
    Ok(j.iter().zip(xi.coeffs()).map(|(j, u)| j * u).sum())
}

/// Residual `ẋ − ξ_P(x)` of the Lin constraint.
pub fn lin_constraint_residual(
    space: StateSpace,
    b: &ConnectionCoefficients,
    x: &Value,
    xdot: &Value,
    xi: &AlgebraElement,
) -> Result<Value> {
    space.validate(xdot)?;
    xdot.sub(&infinitesimal_action(space, xi, b, x)?)
}

/// Which quadratic form on the algebra defines the running cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostConvention {
    /// `½ Σ ξ_a J_ab ξ_b` in algebra coordinates; reproduces the printed
    /// feedback relations.
    #[default]
    Coordinate,
    /// `½ ⟨ξ, Jξ⟩` with the group's trace pairing.
    TracePairing,
}

/// Running cost `L(ξ)`.
pub fn lagrangian(j: &InertiaOperator, xi: &AlgebraElement, cost: CostConvention) -> Result<C64> {
    match cost {
        CostConvention::Coordinate => j.coordinate_cost(xi),
        CostConvention::TracePairing => j.trace_cost(xi),
    }
}

/// Pontryagin's Hamiltonian `⟨p, ξ_P(x)⟩ − L(ξ)`.
#[allow(clippy::too_many_arguments)]
pub fn pontryagin_hamiltonian(
    space: StateSpace,
    b: &ConnectionCoefficients,
    j: &InertiaOperator,
    x: &Value,
    p: &Value,
    xi: &AlgebraElement,
    cost: CostConvention,
) -> Result<C64> {
    space.validate(p)?;
    let v = infinitesimal_action(space, xi, b, x)?;
    Ok(pairing(p, &v)? - lagrangian(j, xi, cost)?)
}

/// Clebsch Lagrangian `L(ξ) + ⟨p, ẋ − ξ_P(x)⟩`; equals `L(ξ)` on the
/// constraint surface.
#[allow(clippy::too_many_arguments)]
pub fn clebsch_lagrangian(
    space: StateSpace,
    b: &ConnectionCoefficients,
    j: &InertiaOperator,
    x: &Value,
    p: &Value,
    xdot: &Value,
    xi: &AlgebraElement,
    cost: CostConvention,
) -> Result<C64> {
    space.validate(p)?;
    let r = lin_constraint_residual(space, b, x, xdot, xi)?;
    Ok(lagrangian(j, xi, cost)? + pairing(p, &r)?)
}

/// Jacobi–Lie bracket `[X_a, X_b] = (X_a X_b' − X_b X_a') ∂ₓ` of two Möbius
/// generators, as exact polynomial coefficients `[x⁴, x³, x², x, 1]`.
pub fn generator_bracket_polynomial(
    group: GroupId,
    a: usize,
    b_idx: usize,
    b: &ConnectionCoefficients,
) -> Result<[C64; 5]> {
    let p = generator_polynomial(group, a, b)?;
    let q = generator_polynomial(group, b_idx, b)?;
    // ascending-degree forms
    let f = [p[2], p[1], p[0]];
    let g = [q[2], q[1], q[0]];
    let df = [f[1], f[2] * 2.0];
    let dg = [g[1], g[2] * 2.0];
    let mut out = [C64::from(0.0); 4];
    for i in 0..3 {
        for j in 0..2 {
            out[i + j] += f[i] * dg[j] - g[i] * df[j];
        }
    }
    Ok([C64::from(0.0), out[3], out[2], out[1], out[0]])
}

/// Evaluates a descending-degree polynomial.
pub fn eval_polynomial(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().fold(C64::from(0.0), |acc, c| acc * x + c)
}

/// Generators evaluated at `x` on the Möbius line, with their derivatives.
pub(crate) fn line_generators(
    group: GroupId,
    b: &ConnectionCoefficients,
    x: C64,
) -> Result<[(C64, C64); 3]> {
    let mut out = [(C64::from(0.0), C64::from(0.0)); 3];
    for (a, o) in out.iter_mut().enumerate() {
        let q = generator_polynomial(group, a, b)?;
        *o = (eval_quadratic(&q, x), q[0] * x * 2.0 + q[1]);
    }
    Ok(out)
}
